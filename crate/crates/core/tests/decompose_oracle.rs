mod support;

use irmsep::metrics::{isr, sar, sdr, sir};
use irmsep::synth;
use irmsep::{decompose, AudioClip, MetricConfig};

fn config(filter_length: usize) -> MetricConfig {
    MetricConfig {
        filter_length,
        ..MetricConfig::default()
    }
}

fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn matches_dense_projection() {
    for (sources, channels, taps, seed) in
        [(2, 1, 1, 1u64), (3, 2, 1, 2), (2, 2, 16, 3), (3, 1, 32, 4)]
    {
        let refs: Vec<AudioClip> = (0..sources)
            .map(|j| synth::white_noise(channels, 2000, 44_100, seed * 100 + j as u64))
            .collect();
        let est = support::distorted_estimate(&refs, 0, seed);
        let fast = decompose(&refs, &est, 0, &config(taps)).unwrap();
        let dense = support::dense_decompose(&refs, &est, 0, taps);
        assert!(max_diff(&fast.e_spat, &dense.e_spat) < 1e-6);
        assert!(max_diff(&fast.e_interf, &dense.e_interf) < 1e-6);
        assert!(max_diff(&fast.e_artif, &dense.e_artif) < 1e-6);
        let want = dense.metrics();
        let got = [
            sdr(&fast, 300.0),
            isr(&fast, 300.0),
            sir(&fast, 300.0),
            sar(&fast, 300.0),
        ];
        for (g, w) in got.iter().zip(want) {
            assert!((g.unwrap() - w).abs() < 0.01, "{g:?} vs {w}");
        }
    }
}

#[test]
fn white_noise_artifact_share() {
    // Noise independent of the references keeps about 1 - L·J·C/N of its
    // energy in e_artif.
    let n = 2000;
    let (sources, taps) = (2, 32);
    let refs: Vec<AudioClip> = (0..sources)
        .map(|j| synth::white_noise(1, n, 44_100, 500 + j))
        .collect();
    let mut shares = Vec::new();
    for seed in 0..8 {
        let noise = synth::white_noise(1, n, 44_100, 9000 + seed);
        let est = refs[0].try_add(&noise).unwrap();
        let parts = decompose(&refs, &est, 0, &config(taps)).unwrap();
        let dense = support::dense_decompose(&refs, &est, 0, taps);
        assert!(max_diff(&parts.e_artif, &dense.e_artif) < 1e-6);
        let art: f64 = parts.e_artif[0].iter().map(|v| v * v).sum();
        shares.push(art / noise.energy());
    }
    let mean = shares.iter().sum::<f64>() / shares.len() as f64;
    let expected = 1.0 - (taps * sources as usize) as f64 / n as f64;
    assert!(
        (mean - expected).abs() < 0.02,
        "mean share {mean}, expected {expected}"
    );
}
