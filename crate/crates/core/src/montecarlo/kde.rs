//! Kernel estimate of the first-order correction to the hard-edge density.
//!
//! Samples `x = n²φₙ` are binned on a fine grid (width `h/16`) and smoothed
//! with a Gaussian kernel of Silverman bandwidth `h`. The hard-edge density
//! subtracted from the estimate is smoothed with the same kernel, so the
//! `O(h²)` smoothing bias of the estimate cancels against it instead of
//! being amplified by the `n eˣ` scale factor.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::asympt::{f_infinity_pdf, scaled_correction_density};
use crate::error::{Error, Result};
use crate::numerics::quad::integrate;

/// Fewer samples than this make the scaled estimate meaningless.
pub const MIN_SAMPLES: usize = 10_000;
pub const BOOTSTRAP_RESAMPLES: usize = 200;
/// Grid points with no sample within this many bandwidths are reported missing.
const SUPPORT_BANDWIDTHS: f64 = 3.0;
const KERNEL_REACH: f64 = 8.0;
const BINS_PER_BANDWIDTH: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledCorrectionPoint {
    pub x: f64,
    /// `None` when the grid point has no nearby samples.
    pub value: Option<f64>,
    /// Bootstrap standard error of `value`.
    pub stderr: Option<f64>,
    /// `asympt::scaled_correction_density` at `x`.
    pub theory: f64,
}

/// Silverman's rule `0.9 min(σ, IQR/1.34) N^{−1/5}` on sorted data.
pub fn silverman_bandwidth(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let sd = (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let q = |p: f64| sorted[((p * (n - 1.0)).round() as usize).min(sorted.len() - 1)];
    let iqr = q(0.75) - q(0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * n.powf(-0.2)
}

fn gauss(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

struct Binned {
    width: f64,
    counts: Vec<u64>,
    total: u64,
}

impl Binned {
    fn new(xs: &[f64], width: f64, upper: f64) -> Self {
        let nbins = (upper / width).ceil() as usize + 1;
        let mut counts = vec![0u64; nbins];
        for &x in xs {
            let b = (x.max(0.0) / width) as usize;
            if b < nbins {
                counts[b] += 1;
            }
        }
        Self { width, counts, total: xs.len() as u64 }
    }

    fn density(&self, counts: &[u64], x: f64, h: f64) -> f64 {
        let lo = (((x - KERNEL_REACH * h) / self.width).floor().max(0.0)) as usize;
        let hi = (((x + KERNEL_REACH * h) / self.width).ceil() as usize).min(counts.len());
        let mut s = 0.0;
        for (b, &c) in counts.iter().enumerate().take(hi).skip(lo) {
            if c > 0 {
                let centre = (b as f64 + 0.5) * self.width;
                s += c as f64 * gauss((x - centre) / h);
            }
        }
        s / (self.total as f64 * h)
    }

    /// Multinomial resample of the bin counts (same total).
    fn resample(&self, rng: &mut ChaCha8Rng) -> Vec<u64> {
        let in_range: u64 = self.counts.iter().sum();
        // samples beyond the last bin keep their share in the total
        let mut remaining = self.total;
        let mut left_prob = 1.0f64;
        let mut out = vec![0u64; self.counts.len()];
        for (b, &c) in self.counts.iter().enumerate() {
            if remaining == 0 || c == 0 {
                continue;
            }
            let p = c as f64 / self.total as f64;
            let q = (p / left_prob).clamp(0.0, 1.0);
            let k = Binomial::new(remaining, q).expect("valid binomial").sample(rng);
            out[b] = k;
            remaining -= k;
            left_prob -= p;
        }
        debug_assert!(in_range <= self.total);
        out
    }
}

/// `∫ f∞^{(α)}(t) φ((x−t)/h)/h dt` over `t ≥ 0`.
fn smoothed_limit_density(alpha: u32, x: f64, h: f64) -> Result<f64> {
    let mut err = None;
    let lo = (x - KERNEL_REACH * h).max(0.0);
    let (v, _) = integrate(
        |t| match f_infinity_pdf(alpha, t) {
            Ok(f) => f * gauss((x - t) / h) / h,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        lo,
        x + KERNEL_REACH * h,
        1e-14,
        1e-11,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `n eˣ (f̂(x) − (K_h * f∞)(x))` on `grid` from smallest-eigenvalue samples
/// `φ`, where `f̂` is the kernel density of `n²φ`. Standard errors come from
/// [`BOOTSTRAP_RESAMPLES`] multinomial resamples seeded by `seed`.
pub fn scaled_correction_from_samples(
    n: u32,
    alpha1: u32,
    alpha2: u32,
    smallest: &[f64],
    grid: &[f64],
    seed: u64,
) -> Result<Vec<ScaledCorrectionPoint>> {
    if smallest.len() < MIN_SAMPLES {
        return Err(Error::StatisticalPower(format!(
            "{} samples; the scaled correction needs at least {MIN_SAMPLES}",
            smallest.len()
        )));
    }
    if let Some(&bad) = grid.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("grid point {bad} must be > 0")));
    }
    let n2 = (n as f64) * (n as f64);
    let mut xs: Vec<f64> = smallest.iter().map(|&p| n2 * p).collect();
    xs.sort_by(f64::total_cmp);
    let h = silverman_bandwidth(&xs);
    let upper = grid.iter().cloned().fold(0.0, f64::max) + (KERNEL_REACH + 1.0) * h;
    let binned = Binned::new(&xs, h / BINS_PER_BANDWIDTH, upper);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boot: Vec<Vec<u64>> = (0..BOOTSTRAP_RESAMPLES).map(|_| binned.resample(&mut rng)).collect();

    grid.iter()
        .map(|&x| {
            let theory = scaled_correction_density(alpha1, alpha2, x)?;
            let lo = xs.partition_point(|&v| v < x - SUPPORT_BANDWIDTHS * h);
            let hi = xs.partition_point(|&v| v <= x + SUPPORT_BANDWIDTHS * h);
            if hi == lo {
                return Ok(ScaledCorrectionPoint { x, value: None, stderr: None, theory });
            }
            let scale = n as f64 * x.exp();
            let reference = smoothed_limit_density(alpha1, x, h)?;
            let value = scale * (binned.density(&binned.counts, x, h) - reference);
            let reps: Vec<f64> = boot.iter().map(|c| scale * binned.density(c, x, h)).collect();
            let m = reps.iter().sum::<f64>() / reps.len() as f64;
            let var = reps.iter().map(|r| (r - m).powi(2)).sum::<f64>() / (reps.len() - 1) as f64;
            Ok(ScaledCorrectionPoint { x, value: Some(value), stderr: Some(var.sqrt()), theory })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn silverman_on_a_regular_grid() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
        let sd = (1.0f64 / 12.0).sqrt();
        let h = silverman_bandwidth(&v);
        assert!((h - 0.9 * sd.min(0.5 / 1.34) * 1000f64.powf(-0.2)).abs() < 1e-3);
    }

    #[test]
    fn binned_kde_reproduces_an_exponential_density() {
        // samples of n²φ distributed as f∞^{(0)} = e^{−x}: the estimate of the
        // correction must be pure noise around 0
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 10u32;
        let phis: Vec<f64> = (0..200_000).map(|_| -(1.0 - rng.random::<f64>()).ln() / 100.0).collect();
        let grid: Vec<f64> = (1..=10).map(|k| 0.3 * k as f64).collect();
        let pts = scaled_correction_from_samples(n, 0, 0, &phis, &grid, 7).unwrap();
        let within = pts.iter().filter(|p| (p.value.unwrap() - p.theory).abs() <= 3.0 * p.stderr.unwrap()).count();
        assert!(within >= 9, "{pts:?}");
        assert!(pts.iter().all(|p| p.theory == 0.0));
    }

    #[test]
    fn missing_points_and_power() {
        let phis: Vec<f64> = (0..20_000).map(|i| 1e-4 * (1.0 + (i % 100) as f64 / 100.0)).collect();
        let pts = scaled_correction_from_samples(10, 1, 1, &phis, &[0.015, 50.0], 1).unwrap();
        assert!(pts[0].value.is_some());
        assert_eq!(pts[1].value, None);
        assert!(matches!(
            scaled_correction_from_samples(10, 1, 1, &phis[..100], &[1.0], 1),
            Err(Error::StatisticalPower(_))
        ));
        assert!(scaled_correction_from_samples(10, 1, 1, &phis, &[0.0], 1).is_err());
    }
}
