//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the code paths it checks: projections use an
//! explicit regressor matrix and an SVD least-squares solve, DFTs are
//! evaluated term by term, and ranks are counted pairwise.

#![allow(dead_code)]

use irmsep::AudioClip;
use nalgebra::{DMatrix, DVector};

/// Components on the padded support, as plain vectors per channel.
pub struct DenseComponents {
    pub target: Vec<Vec<f64>>,
    pub e_spat: Vec<Vec<f64>>,
    pub e_interf: Vec<Vec<f64>>,
    pub e_artif: Vec<Vec<f64>>,
}

/// Columns are every channel of every listed reference delayed by `0..taps`.
fn regressors(refs: &[&AudioClip], taps: usize) -> DMatrix<f64> {
    let n = refs[0].len();
    let rows = n + taps - 1;
    let cols: Vec<&[f64]> = refs
        .iter()
        .flat_map(|r| r.channels().iter().map(Vec::as_slice))
        .collect();
    let mut a = DMatrix::zeros(rows, cols.len() * taps);
    for (k, x) in cols.iter().enumerate() {
        for d in 0..taps {
            for (m, &v) in x.iter().enumerate() {
                a[(m + d, k * taps + d)] = v;
            }
        }
    }
    a
}

fn lstsq_projection(a: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let coef = svd.solve(y, 1e-12).expect("svd with vectors");
    a * coef
}

pub fn dense_decompose(
    refs: &[AudioClip],
    est: &AudioClip,
    target: usize,
    taps: usize,
) -> DenseComponents {
    let n = est.len();
    let rows = n + taps - 1;
    let all: Vec<&AudioClip> = refs.iter().collect();
    let a_all = regressors(&all, taps);
    let a_target = regressors(&[&refs[target]], taps);
    let mut out = DenseComponents {
        target: vec![],
        e_spat: vec![],
        e_interf: vec![],
        e_artif: vec![],
    };
    for c in 0..est.num_channels() {
        let mut y = DVector::zeros(rows);
        for (m, &v) in est.channel(c).iter().enumerate() {
            y[m] = v;
        }
        let mut s = DVector::zeros(rows);
        for (m, &v) in refs[target].channel(c).iter().enumerate() {
            s[m] = v;
        }
        let p_t = lstsq_projection(&a_target, &y);
        let p_a = lstsq_projection(&a_all, &y);
        out.e_spat.push((&p_t - &s).iter().copied().collect());
        out.e_interf.push((&p_a - &p_t).iter().copied().collect());
        out.e_artif.push((&y - &p_a).iter().copied().collect());
        out.target.push(s.iter().copied().collect());
    }
    out
}

fn energy_of(parts: &[&Vec<Vec<f64>>]) -> f64 {
    let channels = parts[0].len();
    let len = parts[0][0].len();
    let mut e = 0.0;
    for c in 0..channels {
        for n in 0..len {
            let v: f64 = parts.iter().map(|p| p[c][n]).sum();
            e += v * v;
        }
    }
    e
}

fn db(num: f64, den: f64) -> f64 {
    10.0 * (num / den).log10()
}

impl DenseComponents {
    /// `[sdr, isr, sir, sar]` straight from the energy-ratio definitions.
    pub fn metrics(&self) -> [f64; 4] {
        let s = energy_of(&[&self.target]);
        [
            db(s, energy_of(&[&self.e_spat, &self.e_interf, &self.e_artif])),
            db(s, energy_of(&[&self.e_spat])),
            db(
                energy_of(&[&self.target, &self.e_spat]),
                energy_of(&[&self.e_interf]),
            ),
            db(
                energy_of(&[&self.target, &self.e_spat, &self.e_interf]),
                energy_of(&[&self.e_artif]),
            ),
        ]
    }
}

/// Term-by-term DFT of a real frame, first `len / 2 + 1` bins as (re, im).
pub fn direct_dft(frame: &[f64]) -> Vec<(f64, f64)> {
    let n = frame.len();
    (0..n / 2 + 1)
        .map(|k| {
            frame
                .iter()
                .enumerate()
                .fold((0.0, 0.0), |(re, im), (t, &x)| {
                    let phase = -2.0 * std::f64::consts::PI * (k * t % n) as f64 / n as f64;
                    (re + x * phase.cos(), im + x * phase.sin())
                })
        })
        .collect()
}

/// Average ranks by counting: 1 + #smaller + (#equal - 1) / 2.
pub fn brute_force_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let smaller = x.iter().filter(|&&w| w < v).count() as f64;
            let equal = x.iter().filter(|&&w| w == v).count() as f64;
            1.0 + smaller + (equal - 1.0) / 2.0
        })
        .collect()
}

/// Pearson through raw sums, `(nΣxy − ΣxΣy) / sqrt((nΣx² − (Σx)²)(nΣy² − (Σy)²))`.
pub fn raw_sum_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
}

/// Estimate fixture: target through a short random FIR, plus leakage of the
/// other sources and independent noise.
pub fn distorted_estimate(refs: &[AudioClip], target: usize, seed: u64) -> AudioClip {
    let n = refs[0].len();
    let taps = irmsep::synth::uniform(3, seed);
    let noise = irmsep::synth::white_noise(
        refs[0].num_channels(),
        n,
        refs[0].sample_rate(),
        seed + 1000,
    );
    let channels = (0..refs[0].num_channels())
        .map(|c| {
            (0..n)
                .map(|m| {
                    let s = refs[target].channel(c);
                    let mut v = s[m];
                    for (d, h) in taps.iter().enumerate().skip(1) {
                        if m >= d {
                            v += 0.2 * h * s[m - d];
                        }
                    }
                    for (j, r) in refs.iter().enumerate() {
                        if j != target {
                            v += 0.3 * r.channel(c)[m];
                        }
                    }
                    v + 0.5 * noise.channel(c)[m]
                })
                .collect()
        })
        .collect();
    AudioClip::new(channels, refs[0].sample_rate()).unwrap()
}

/// SI-SDR straight from the definition, all channels concatenated.
pub fn si_sdr_direct(est: &AudioClip, reference: &AudioClip) -> f64 {
    let s: Vec<f64> = reference.iter_concat().collect();
    let e: Vec<f64> = est.iter_concat().collect();
    let dot: f64 = s.iter().zip(&e).map(|(a, b)| a * b).sum();
    let ss: f64 = s.iter().map(|a| a * a).sum();
    let alpha = dot / ss;
    let target: f64 = s.iter().map(|a| (alpha * a).powi(2)).sum();
    let noise: f64 = s.iter().zip(&e).map(|(a, b)| (alpha * a - b).powi(2)).sum();
    10.0 * (target / noise).log10()
}

/// Mono noise orthogonal to every reference (Gram-Schmidt on the plain
/// signals), rescaled to `energy`. Only orthogonal to delayed copies when
/// projections use a single tap.
pub fn orthogonal_noise(refs: &[&[f64]], energy: f64, seed: u64) -> Vec<f64> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in refs {
        let mut v = r.to_vec();
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        basis.push(v.into_iter().map(|x| x / norm).collect());
    }
    let mut n = irmsep::synth::gaussian(refs[0].len(), seed);
    for _ in 0..2 {
        for b in &basis {
            let c: f64 = n.iter().zip(b).map(|(x, y)| x * y).sum();
            n.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    let scale = (energy / n.iter().map(|x| x * x).sum::<f64>()).sqrt();
    n.into_iter().map(|x| x * scale).collect()
}

/// Two sine-bank sources of eight partials each. `round(rho · 8)` of the
/// second source's partials sit on the first source's frequencies; the rest
/// are an octave-and-a-half away from anything in the first.
pub fn overlap_pair(rho: f64, len: usize, sample_rate: u32) -> (AudioClip, AudioClip) {
    use irmsep::synth::{sine_clip, Partial};
    let a_freqs: Vec<f64> = (0..8).map(|i| 200.0 * 1.5f64.powi(i)).collect();
    let b_free: Vec<f64> = (0..8).map(|i| 200.0 * 1.5f64.powi(i) * 1.22).collect();
    let shared = (rho * 8.0 + 0.5).floor() as usize;
    let a: Vec<Partial> = a_freqs.iter().map(|&f| Partial::new(f, 0.1, 0.0)).collect();
    let b: Vec<Partial> = (0..8)
        .map(|i| {
            let f = if i < shared { a_freqs[i] } else { b_free[i] };
            Partial::new(f, 0.1, 1.3 + i as f64)
        })
        .collect();
    (
        sine_clip(&a, 2, len, sample_rate),
        sine_clip(&b, 2, len, sample_rate),
    )
}
