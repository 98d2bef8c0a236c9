//! Monte Carlo ground truth for the extreme eigenvalues of
//! `(W₁+W₂)⁻¹W₁`, empirical CDF tools, the kernel estimate of the scaled
//! first-order correction, and a joint-density quadrature oracle.
//!
//! Draw `i` uses a ChaCha8 stream keyed by `(seed, i)`, so results do not
//! depend on how draws are split across worker threads.

mod ecdf;
mod kde;
mod quadrature;
mod sampler;

pub use ecdf::{dkw_epsilon, ks_distance, ks_two_sample, try_ks_distance, two_sample_threshold, EmpiricalCDF};
pub use kde::{scaled_correction_from_samples, silverman_bandwidth, ScaledCorrectionPoint, BOOTSTRAP_RESAMPLES, MIN_SAMPLES};
pub use quadrature::jpdf_quadrature_cdf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactdist::EnsembleParams;
use sampler::Workspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MCConfig {
    pub params: EnsembleParams,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovarianceSpec {
    Identity,
    /// A Hermitian positive-definite `Σ` generated from the seed.
    Random(u64),
}

impl CovarianceSpec {
    /// `Σ` as a row-major `n × n` list of `(re, im)` entries.
    pub fn matrix(&self, n: usize) -> Vec<(f64, f64)> {
        match *self {
            CovarianceSpec::Identity => {
                (0..n * n).map(|k| if k / n == k % n { (1.0, 0.0) } else { (0.0, 0.0) }).collect()
            }
            CovarianceSpec::Random(seed) => {
                // Σ = G†G/n + I/2 with G complex Gaussian
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g: Vec<(f64, f64)> =
                    (0..n * n).map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
                let mut s = vec![(0.0, 0.0); n * n];
                for i in 0..n {
                    for j in 0..n {
                        let (mut re, mut im) = (0.0, 0.0);
                        for r in 0..n {
                            let (a, b) = g[r * n + i];
                            let (c, d) = g[r * n + j];
                            re += a * c + b * d;
                            im += a * d - b * c;
                        }
                        s[i * n + j] = (re / n as f64 + if i == j { 0.5 } else { 0.0 }, im / n as f64);
                    }
                }
                s
            }
        }
    }

    /// Upper-triangular `A` with `A†A = Σ`, or `None` for the identity.
    fn factor(&self, n: usize) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        if *self == CovarianceSpec::Identity {
            return Ok(None);
        }
        let s = self.matrix(n);
        // lower Cholesky Σ = L L†, then A = L†
        let mut l = vec![(0.0f64, 0.0f64); n * n];
        for j in 0..n {
            let mut d = s[j * n + j].0;
            for k in 0..j {
                d -= l[j * n + k].0.powi(2) + l[j * n + k].1.powi(2);
            }
            if d <= 0.0 {
                return Err(Error::NumericalQuality("covariance is not positive definite".into()));
            }
            let d = d.sqrt();
            l[j * n + j] = (d, 0.0);
            for i in j + 1..n {
                let (mut re, mut im) = s[i * n + j];
                for k in 0..j {
                    let (a, b) = l[i * n + k];
                    let (c, e) = l[j * n + k];
                    re -= a * c + b * e;
                    im -= b * c - a * e;
                }
                l[i * n + j] = (re / d, im / d);
            }
        }
        let mut ar = vec![0.0; n * n];
        let mut ai = vec![0.0; n * n];
        for k in 0..n {
            for j in k..n {
                let (re, im) = l[j * n + k];
                ar[k * n + j] = re;
                ai[k * n + j] = -im;
            }
        }
        Ok(Some((ar, ai)))
    }
}

/// Per-draw extremes of a Monte Carlo run.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub smallest: Vec<f64>,
    pub largest: Vec<f64>,
    /// Draws rejected because `W₁ + W₂` was numerically singular.
    pub cholesky_failures: u64,
}

/// Allowed fraction of rejected draws.
pub const MAX_CHOLESKY_INCIDENCE: f64 = 1e-4;
const EIGEN_SLACK: f64 = 1e-10;
/// Consecutive rejections after which a single draw gives up.
const MAX_RETRIES: u32 = 1000;

/// `samples` independent draws of `(φₙ, φ₁)` for `W = (W₁+W₂)⁻¹W₁`, with
/// `W_k = X_k†X_k` and the rows of `X_k` complex Gaussian with covariance `Σ`.
pub fn sample_extremes(cfg: &MCConfig, cov: CovarianceSpec) -> Result<Samples> {
    if cfg.samples == 0 {
        return Err(Error::InvalidInput("samples must be >= 1".into()));
    }
    if cfg.workers == 0 {
        return Err(Error::InvalidInput("workers must be >= 1".into()));
    }
    let p = cfg.params;
    let (n, m1, m2) = (p.n as usize, p.m1() as usize, p.m2() as usize);
    let mix = cov.factor(n)?;
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);

    let run = || {
        (0..cfg.samples as u64)
            .into_par_iter()
            .map_init(
                || Workspace::new(n, m1, m2, mix.clone()),
                |ws, i| {
                    let mut rng = base.clone();
                    rng.set_stream(i);
                    let mut failures = 0u32;
                    loop {
                        match ws.draw(&mut rng) {
                            Ok((lo, hi)) => return Ok((lo, hi, failures)),
                            Err(_) if failures < MAX_RETRIES => failures += 1,
                            Err(_) => {
                                return Err(Error::CholeskyIncidence {
                                    failures: failures as u64 + 1,
                                    draws: failures as u64 + 1,
                                })
                            }
                        }
                    }
                },
            )
            .collect::<Result<Vec<_>>>()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let draws = pool.install(run)?;

    let mut out = Samples {
        smallest: Vec::with_capacity(draws.len()),
        largest: Vec::with_capacity(draws.len()),
        cholesky_failures: 0,
    };
    for (lo, hi, f) in draws {
        if !(lo >= -EIGEN_SLACK && hi <= 1.0 + EIGEN_SLACK) {
            return Err(Error::NumericalQuality(format!(
                "eigenvalues [{lo:e}, {hi}] outside [0, 1] by more than {EIGEN_SLACK:e}"
            )));
        }
        out.smallest.push(lo);
        out.largest.push(hi);
        out.cholesky_failures += f as u64;
    }
    let attempts = cfg.samples as u64 + out.cholesky_failures;
    if out.cholesky_failures as f64 > MAX_CHOLESKY_INCIDENCE * attempts as f64 {
        return Err(Error::CholeskyIncidence { failures: out.cholesky_failures, draws: attempts });
    }
    Ok(out)
}

/// [`scaled_correction_from_samples`] on a fresh run of `cfg`.
pub fn empirical_scaled_correction(cfg: &MCConfig, grid: &[f64]) -> Result<Vec<ScaledCorrectionPoint>> {
    if cfg.samples < MIN_SAMPLES {
        return Err(Error::StatisticalPower(format!(
            "{} samples; the scaled correction needs at least {MIN_SAMPLES}",
            cfg.samples
        )));
    }
    let s = sample_extremes(cfg, CovarianceSpec::Identity)?;
    let p = cfg.params;
    // bootstrap stream derived from, but distinct from, the sampling seed
    scaled_correction_from_samples(p.n, p.alpha1, p.alpha2, &s.smallest, grid, cfg.seed ^ 0x9e37_79b9_7f4a_7c15)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32, a1: u32, a2: u32, samples: usize, workers: usize) -> MCConfig {
        MCConfig { params: EnsembleParams::new(n, a1, a2).unwrap(), samples, seed: 42, workers }
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let a = sample_extremes(&cfg(4, 1, 2, 500, 1), CovarianceSpec::Identity).unwrap();
        let b = sample_extremes(&cfg(4, 1, 2, 500, 3), CovarianceSpec::Identity).unwrap();
        assert_eq!(a, b);
        let c = sample_extremes(&MCConfig { seed: 43, ..cfg(4, 1, 2, 500, 1) }, CovarianceSpec::Identity).unwrap();
        assert_ne!(a.smallest, c.smallest);
    }

    #[test]
    fn random_covariance_is_hermitian_positive_definite() {
        let n = 5;
        let s = CovarianceSpec::Random(3).matrix(n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = s[i * n + j];
                let (c, d) = s[j * n + i];
                assert!((a - c).abs() < 1e-15 && (b + d).abs() < 1e-15);
            }
        }
        assert!(CovarianceSpec::Random(3).factor(n).unwrap().is_some());
    }

    #[test]
    fn n1_smallest_is_uniform() {
        let s = sample_extremes(&cfg(1, 0, 0, 20_000, 1), CovarianceSpec::Identity).unwrap();
        assert_eq!(s.smallest, s.largest);
        let e = EmpiricalCDF::new(s.smallest).unwrap();
        assert!(ks_distance(&e, |t| t.clamp(0.0, 1.0)) < dkw_epsilon(0.01, 20_000));
    }

    #[test]
    fn mean_matches_closed_form() {
        let c = cfg(3, 0, 2, 20_000, 1);
        let s = sample_extremes(&c, CovarianceSpec::Random(8)).unwrap();
        let e = EmpiricalCDF::new(s.smallest).unwrap();
        let (mean, _) = crate::exactdist::moments_alpha1_zero(c.params).unwrap();
        let se = e.std() / (e.count() as f64).sqrt();
        assert!((e.mean() - mean).abs() < 4.0 * se, "{} vs {mean}", e.mean());
    }

    #[test]
    fn rejects_empty_runs_and_singular_pencils() {
        assert!(sample_extremes(&cfg(2, 0, 0, 0, 1), CovarianceSpec::Identity).is_err());
        assert!(sample_extremes(&cfg(2, 0, 0, 10, 0), CovarianceSpec::Identity).is_err());
        assert!(empirical_scaled_correction(&cfg(2, 0, 0, 100, 1), &[1.0]).is_err());
    }
}
