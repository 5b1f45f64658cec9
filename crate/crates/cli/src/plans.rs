use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use irmsep::analysis::{
    correlate_tables, default_mute_ratios, plan_mutes, rank_songs, select_subset, MutePlan,
};
use irmsep::{check_cola, DatasetManifest, ScoreTable};

use crate::{
    create_dir, json_document, preamble, provenance, write_file, CliError, CliResult,
    CorrelateArgs, MutePlanArgs, RankArgs, SelectArgs, StftArgs,
};

fn read_table(path: &Path) -> CliResult<ScoreTable> {
    ScoreTable::read_path(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Failed(format!("cannot write to stdout: {e}"))),
    }
}

#[derive(Serialize)]
struct RankConfig<'a> {
    scores: String,
    metric: irmsep::Metric,
    instrument: &'a str,
}

impl<'a> RankConfig<'a> {
    fn new(args: &'a RankArgs) -> Self {
        Self {
            scores: args.scores.display().to_string(),
            metric: args.metric,
            instrument: &args.instrument,
        }
    }
}

pub fn rank(args: &RankArgs) -> CliResult<()> {
    let table = read_table(&args.scores)?;
    let ranking = rank_songs(&table, args.metric, &args.instrument)?;
    let meta = provenance("rank", &RankConfig::new(args))?;
    emit(args.out.as_ref(), &json_document(&meta, &ranking)?)
}

#[derive(Serialize)]
struct SelectConfig<'a> {
    #[serde(flatten)]
    rank: RankConfig<'a>,
    criterion: irmsep::analysis::Criterion,
    fraction: f64,
    seed: u64,
}

pub fn select(args: &SelectArgs) -> CliResult<()> {
    let table = read_table(&args.rank.scores)?;
    let ranking = rank_songs(&table, args.rank.metric, &args.rank.instrument)?;
    let plan = select_subset(&ranking, args.criterion, args.fraction, args.seed)?;
    let config = SelectConfig {
        rank: RankConfig::new(&args.rank),
        criterion: args.criterion,
        fraction: args.fraction,
        seed: args.seed,
    };
    let meta = provenance("select", &config)?;
    emit(args.rank.out.as_ref(), &json_document(&meta, &plan)?)
}

#[derive(Serialize)]
struct CorrelateConfig {
    scores_a: String,
    scores_b: String,
}

/// Writes the correlation grid. Fails with exit status 1 if any cell could
/// not be computed, after writing the grid and printing the reasons.
pub fn correlate(args: &CorrelateArgs) -> CliResult<()> {
    let a = read_table(&args.scores_a)?;
    let b = read_table(&args.scores_b)?;
    let grid = correlate_tables(&a, &b);
    let meta = provenance(
        "correlate",
        &CorrelateConfig {
            scores_a: args.scores_a.display().to_string(),
            scores_b: args.scores_b.display().to_string(),
        },
    )?;
    let csv = grid.to_csv(&preamble(&meta));
    match &args.out {
        Some(dir) => {
            create_dir(dir)?;
            write_file(&dir.join("correlations.csv"), &csv)?;
            write_file(&dir.join("correlations.json"), &grid.to_json(&meta)?)?;
        }
        None => emit(None, &csv)?,
    }
    let missing = grid.missing_cells();
    if grid.instruments.is_empty() {
        return Err(CliError::Failed("score tables have no instruments".into()));
    }
    if missing > 0 {
        for (method, inst, metric, cell) in grid.cells() {
            if let Some(d) = &cell.diagnostic {
                eprintln!("{method} {inst} {metric}: {d}");
            }
        }
        return Err(CliError::Failed(format!(
            "{missing} correlation cells are missing"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct MutePlanConfig<'a> {
    dataset: String,
    manifest: String,
    instrument: &'a str,
    ratios: &'a [f64],
    seed: u64,
}

pub fn mute_plan_file_name(ratio: f64) -> String {
    format!("mute_plan_{ratio:.2}.json")
}

/// One plan file per ratio. Every plan is computed before anything is
/// written, so a bad instrument or ratio leaves the output untouched.
pub fn mute_plan(args: &MutePlanArgs) -> CliResult<Vec<MutePlan>> {
    let ratios = if args.ratios.is_empty() {
        default_mute_ratios()
    } else {
        args.ratios.clone()
    };
    let mut manifest = DatasetManifest::read(&args.manifest, &args.dataset)?;
    manifest.resolve_instruments()?;
    let plans = ratios
        .iter()
        .map(|&r| plan_mutes(&manifest, &args.instrument, r, args.seed))
        .collect::<irmsep::Result<Vec<_>>>()?;
    let meta = provenance(
        "mute-plan",
        &MutePlanConfig {
            dataset: args.dataset.display().to_string(),
            manifest: args.manifest.display().to_string(),
            instrument: &args.instrument,
            ratios: &ratios,
            seed: args.seed,
        },
    )?;
    create_dir(&args.out)?;
    for plan in &plans {
        let path = args.out.join(mute_plan_file_name(plan.ratio));
        write_file(&path, &json_document(&meta, plan)?)?;
    }
    Ok(plans)
}

pub fn check_cola_cmd(args: &StftArgs) -> CliResult<()> {
    let config = args.config();
    if config.window_size == 0 || config.hop_size == 0 || config.hop_size > config.window_size {
        return Err(CliError::Config(format!(
            "hop {} must lie in 1..={}",
            config.hop_size, config.window_size
        )));
    }
    let report = check_cola(&config);
    println!(
        "window={} size={} hop={} cola={} max_deviation={:.3e}",
        config.window,
        config.window_size,
        config.hop_size,
        if report.pass { "pass" } else { "fail" },
        report.max_deviation
    );
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Failed(
            "window does not reconstruct at this hop".into(),
        ))
    }
}
