//! Self-checks behind `jacobi-edge validate`: each suite re-derives a set of
//! identities or agreement tests from scratch and reports one line per check.
//!
//! The identities suite takes the Bessel implementation as a parameter so
//! that a deliberately corrupted one can be swapped in to confirm that the
//! suite notices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asympt::{corrected_cdf, f_infinity_cdf, lemma3_residuals, CorrectionQuery, Status};
use crate::bessel::{bessel_i, bessel_reduced_in, BesselFn};
use crate::error::{Error, Result};
use crate::exactdist::{
    corollary_cdf_with, edge_cdf, g_cdf_with, h_cdf_with, moments_alpha1_zero, moments_by_quadrature, Edge,
    EnsembleParams, Method,
};
use crate::montecarlo::{
    dkw_epsilon, jpdf_quadrature_cdf, ks_two_sample, sample_extremes, try_ks_distance, two_sample_threshold,
    CovarianceSpec, EmpiricalCDF, MCConfig,
};
use crate::numerics::quad::gauss_legendre;
use crate::numerics::{factorial, factorial_ratio, DoubleDouble, Precision, Real, ScaledReal};
use crate::orthopoly::identities::{derivative_recurrence_error, rodrigues_associated_error, rodrigues_recurrence_failures};
use crate::orthopoly::{legendre, legendre_deriv};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identities,
    CrossMethod,
    Convergence,
    Mc,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Identities, Suite::CrossMethod, Suite::Convergence, Suite::Mc];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::CrossMethod => "cross-method",
            Suite::Convergence => "convergence",
            Suite::Mc => "mc",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|v| v.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }

    /// `worst ≤ tol` (NaN fails).
    fn bound(name: impl Into<String>, worst: f64, tol: f64) -> Self {
        Self::new(name, worst <= tol, format!("worst {worst:.3e} (tol {tol:.3e})"))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    /// Smaller grids and sample counts; same tolerances.
    pub fast: bool,
    pub bessel: BesselFn,
    pub seed: u64,
    pub workers: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { fast: false, bessel: bessel_i, seed: 20240607, workers: 1 }
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<Check>> {
    match suite {
        Suite::Identities => identities(opts),
        Suite::CrossMethod => cross_method(opts),
        Suite::Convergence => convergence(opts),
        Suite::Mc => monte_carlo(opts),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn identities(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let max_n = if opts.fast { 6 } else { 10 };

    let failures = rodrigues_recurrence_failures(max_n)?;
    out.push(Check::new(
        "rodrigues-recurrence (exact)",
        failures.is_empty(),
        if failures.is_empty() {
            format!("n <= {max_n}, all m: exact")
        } else {
            format!("{} failing (n, m) pairs, first {:?}", failures.len(), failures[0])
        },
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let draws = if opts.fast { 300 } else { 3000 };
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let n = rng.random_range(0..=50u32);
        let m = rng.random_range(0..=6u32);
        let y = rng.random_range(-5.0..=5.0);
        worst = worst.max(derivative_recurrence_error(n, m, y));
    }
    out.push(Check::bound("derivative-recurrence (random y in [-5,5], n<=50, m<=6)", worst, 1e-10));

    let mut worst = 0.0f64;
    for n in 0..=max_n {
        for m in -(n as i64)..=n as i64 {
            for &y in &[-0.93, -0.5, -0.125, 0.0, 0.3, 0.71, 0.98] {
                worst = worst.max(rodrigues_associated_error(n, m, y)?);
            }
        }
    }
    out.push(Check::bound(format!("rodrigues-associated (n<={max_n}, |y|<1)"), worst, 1e-12));

    let mut worst = 0.0f64;
    let mut sign_ok = true;
    for n in 0..=60u32 {
        for &y in &[0.1, 0.5, 0.99, 1.0, 1.7, 6.0] {
            let (p, q) = (legendre(n, y).to_f64(), legendre(n, -y).to_f64());
            let expect = if n % 2 == 0 { p } else { -p };
            sign_ok &= p == 0.0 || expect.signum() == q.signum();
            worst = worst.max(rel(expect, q));
        }
    }
    out.push(Check::new(
        "legendre-parity",
        sign_ok && worst <= 1e-13,
        format!("sign {}; worst magnitude {worst:.3e} (tol 1e-13)", if sign_ok { "exact" } else { "WRONG" }),
    ));

    let (nodes, weights) = gauss_legendre(20);
    let mut worst = 0.0f64;
    for k in 0..=12u32 {
        for n in 0..=12u32 {
            let s: f64 = nodes.iter().zip(&weights).map(|(&t, &w)| w * legendre(k, t).to_f64() * legendre(n, t).to_f64()).sum();
            let want = if k == n { 2.0 / (2 * n + 1) as f64 } else { 0.0 };
            worst = worst.max((s - want).abs());
        }
    }
    out.push(Check::bound("legendre-orthogonality (n,k<=12)", worst, 1e-9));

    // d^m P_n(1) = (n+m)! / (2^m m! (n−m)!)
    let mut worst = 0.0f64;
    for n in 0..=200u32 {
        for m in 0..=8u32.min(n) {
            let want = factorial_ratio::<f64>((n + m) as u64, (n - m) as u64).ldexp(-(m as i64))
                / factorial::<f64>(m as u64);
            let got = legendre_deriv(n, m, 1.0);
            worst = worst.max((got / want - ScaledReal::ONE).abs().to_f64());
        }
    }
    out.push(Check::bound("legendre-derivative-at-one (n<=200, m<=8)", worst, 1e-12));

    out.extend(bessel_checks(opts.bessel)?);
    Ok(out)
}

fn bessel_checks(bessel: BesselFn) -> Result<Vec<Check>> {
    let zs: Vec<f64> = (0..=50).map(|k| 0.1 * (500.0f64).powf(k as f64 / 50.0)).collect();
    let mut worst = 0.0f64;
    for &z in &zs {
        for l in 0..=10i64 {
            let lhs = bessel(l + 2, z)?;
            let rhs = bessel(l, z)? - 2.0 * (l + 1) as f64 / z * bessel(l + 1, z)?;
            // cancellation in the right side is bounded by its largest term
            let scale = bessel(l, z)?.abs().max(lhs.abs());
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    let recurrence = Check::bound("bessel-recurrence (z in [0.1,50], l<=10)", worst, 1e-10);

    let mut symmetric = true;
    for &z in &zs {
        for l in 1..=12i64 {
            symmetric &= bessel(-l, z)?.to_bits() == bessel(l, z)?.to_bits();
        }
    }
    let symmetry = Check::new("bessel-symmetry", symmetric, if symmetric { "bit-identical" } else { "mismatch" });

    // independent double-double series: I_l(√4x) = x^{l/2} T_l(x)
    let mut worst = 0.0f64;
    for &z in &zs {
        let x = z * z / 4.0;
        for l in 0..=10u32 {
            let t = bessel_reduced_in(l, DoubleDouble::from(x)).to_f64();
            worst = worst.max(rel(bessel(l as i64, z)?, t * x.powf(l as f64 / 2.0)));
        }
    }
    let series = Check::bound("bessel-vs-double-double-series", worst, 1e-12);

    let mut increasing = true;
    let mut prev = bessel(0, 0.0)?;
    for k in 1..=500 {
        let v = bessel(0, 0.1 * k as f64)?;
        increasing &= v > prev;
        prev = v;
    }
    let monotone = Check::new("bessel-i0-increasing", increasing, "z = 0.1..50");
    Ok(vec![recurrence, symmetry, series, monotone])
}

/// Hard-edge points `x/n²` followed by bulk points.
fn xi_grid(n: u32) -> Vec<f64> {
    let n2 = (n as f64) * (n as f64);
    let mut g: Vec<f64> = (1..=10).map(|k| 0.5 * k as f64 / n2).filter(|&v| v < 0.5).collect();
    g.extend((1..=10).map(|k| k as f64 / 11.0));
    g
}

fn cross_method(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let ns: &[u32] = if opts.fast { &[2, 5, 10] } else { &[2, 5, 10, 25, 50] };
    let p = Precision::Auto;
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for &n in ns {
        for a in 0..=3 {
            for b in 0..=3 {
                for &xi in &xi_grid(n) {
                    worst = worst.max(rel(g_cdf_with(a, b, n, xi, p)?, h_cdf_with(a, b, n, xi, p)?));
                }
            }
        }
    }
    out.push(Check::bound(format!("legendre-vs-jacobi (n in {ns:?}, alpha,beta<=3)"), worst, 1e-9));

    let mut worst = 0.0f64;
    for &n in &[1u32, 3, 8, 20] {
        for (a1, a2) in [(0, 0), (1, 2), (3, 0), (2, 3)] {
            let q = EnsembleParams::new(n, a1, a2)?;
            for k in 0..=20 {
                let xi = k as f64 / 20.0;
                let lhs = edge_cdf(q, Edge::Largest, Method::ExactLegendre, xi, p)?;
                let rhs = 1.0 - edge_cdf(q.swapped(), Edge::Smallest, Method::ExactLegendre, 1.0 - xi, p)?;
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    out.push(Check::bound("largest-smallest-duality", worst, 1e-12));

    let mut worst = 0.0f64;
    for &n in &[1u32, 4, 12, 30] {
        for a in 1..=4 {
            for (a1, a2) in [(0, a), (a, 0)] {
                let q = EnsembleParams::new(n, a1, a2)?;
                for &xi in &xi_grid(n) {
                    for edge in [Edge::Smallest, Edge::Largest] {
                        let want = edge_cdf(q, edge, Method::ExactLegendre, xi, p)?;
                        worst = worst.max(rel(corollary_cdf_with(q, xi, edge, p)?, want));
                    }
                }
            }
        }
    }
    out.push(Check::bound("one-sided-closed-forms", worst, 1e-10));

    let mut worst = 0.0f64;
    for n in 1..=50u32 {
        for a2 in 0..=4 {
            let q = EnsembleParams::new(n, 0, a2)?;
            for k in 1..=50 {
                let xi = k as f64 / 51.0;
                let want = -((n * n + n * a2) as f64 * (-xi).ln_1p()).exp_m1();
                worst = worst.max(rel(edge_cdf(q, Edge::Smallest, Method::ExactLegendre, xi, p)?, want));
            }
        }
    }
    out.push(Check::bound("alpha1-zero-power-law", worst, 1e-12));

    let mut boundary = 0.0f64;
    let mut monotone = true;
    let mut range = 0.0f64;
    let points = if opts.fast { 50 } else { 200 };
    for (n, a1, a2) in [(3, 1, 2), (10, 2, 0), (25, 3, 3)] {
        let q = EnsembleParams::new(n, a1, a2)?;
        boundary = boundary.max(edge_cdf(q, Edge::Smallest, Method::ExactLegendre, 0.0, p)?.abs());
        boundary = boundary.max((edge_cdf(q, Edge::Largest, Method::ExactLegendre, 1.0, p)? - 1.0).abs());
        for edge in [Edge::Smallest, Edge::Largest] {
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=points {
                let v = edge_cdf(q, edge, Method::ExactLegendre, k as f64 / points as f64, p)?;
                monotone &= v >= prev;
                range = range.max(-v).max(v - 1.0);
                prev = v;
            }
        }
    }
    out.push(Check::bound("boundary-values", boundary, 1e-12));
    out.push(Check::new(
        "cdf-monotone-in-unit-interval",
        monotone && range <= 1e-9,
        format!("{points}-point grid; nondecreasing: {monotone}; worst excursion {range:.1e}"),
    ));

    let max_n = if opts.fast { 8 } else { 20 };
    let mut worst = 0.0f64;
    for n in 1..=max_n {
        for a2 in 0..=3 {
            let q = EnsembleParams::new(n, 0, a2)?;
            let (m, s) = moments_by_quadrature(q, Edge::Smallest, p)?;
            let (mw, sw) = moments_alpha1_zero(q)?;
            worst = worst.max((m - mw).abs()).max((s - sw).abs());
        }
    }
    out.push(Check::bound(format!("mean-std-closed-form (n<={max_n})"), worst, 1e-8));

    let ns: &[u32] = if opts.fast { &[2] } else { &[2, 3] };
    let mut worst = 0.0f64;
    for &n in ns {
        for a1 in 0..=2 {
            for a2 in 0..=2 {
                let q = EnsembleParams::new(n, a1, a2)?;
                for &xi in &[0.05, 0.1, 0.3, 0.6] {
                    let exact = edge_cdf(q, Edge::Smallest, Method::ExactLegendre, xi, p)?;
                    worst = worst.max((exact - jpdf_quadrature_cdf(q, xi)?).abs());
                }
            }
        }
    }
    out.push(Check::bound(format!("joint-density-quadrature (n in {ns:?})"), worst, 1e-6));
    Ok(out)
}

/// `n²ξ` grid for the rate checks.
const RATE_GRID: [f64; 30] = {
    let mut g = [0.0; 30];
    let mut k = 0;
    while k < 30 {
        g[k] = 0.5 * (k + 1) as f64;
        k += 1;
    }
    g
};

/// `sup_x |P(n²φ ≤ x) − approx(x)|` at the given edge. At the largest edge
/// the exact side is `P(n²(1−φ₁) ≤ x)`.
fn sup_gap(params: EnsembleParams, edge: Edge, corrected: bool) -> Result<f64> {
    let n2 = (params.n as f64) * (params.n as f64);
    let mut worst = 0.0f64;
    for &x in &RATE_GRID {
        let exact = match edge {
            Edge::Smallest => edge_cdf(params, Edge::Smallest, Method::ExactLegendre, x / n2, Precision::Auto)?,
            Edge::Largest => 1.0 - edge_cdf(params, Edge::Largest, Method::ExactLegendre, 1.0 - x / n2, Precision::Auto)?,
        };
        let approx = if corrected {
            corrected_cdf(&CorrectionQuery { params, x, edge })?.value
        } else {
            f_infinity_cdf(params.alpha1, x)?
        };
        worst = worst.max((exact - approx).abs());
    }
    Ok(worst)
}

fn ratios(ns: &[u32], mut gap: impl FnMut(u32) -> Result<f64>) -> Result<Vec<f64>> {
    let gaps = ns.iter().map(|&n| gap(n)).collect::<Result<Vec<_>>>()?;
    Ok(gaps.windows(2).map(|w| w[1] / w[0]).collect())
}

fn band_check(name: String, r: &[f64], lo: f64, hi: f64) -> Check {
    let ok = r.iter().all(|v| (lo..=hi).contains(v));
    let list: Vec<String> = r.iter().map(|v| format!("{v:.3}")).collect();
    Check::new(name, ok, format!("ratios [{}] (band [{lo}, {hi}])", list.join(", ")))
}

fn convergence(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let ns: &[u32] = if opts.fast { &[25, 50, 100] } else { &[25, 50, 100, 200] };
    let mut out = Vec::new();

    for a1 in 0..=3 {
        for a2 in 0..=3 {
            let r = ratios(ns, |n| sup_gap(EnsembleParams::new(n, a1, a2)?, Edge::Smallest, false))?;
            out.push(band_check(format!("hard-edge-rate ({a1},{a2})"), &r, 0.3, 0.7));
        }
    }

    let mut cases = Vec::new();
    for edge in [Edge::Smallest, Edge::Largest] {
        for own in 0..=3 {
            for other in 0..=3 {
                let (a1, a2) = match edge {
                    Edge::Smallest => (own, other),
                    Edge::Largest => (other, own),
                };
                let status = crate::asympt::correction_status(EnsembleParams::new(1, a1, a2)?, edge);
                let evidence = edge == Edge::Smallest && a1 == 3 && (a2 == 0 || a2 == 2);
                if status == Status::Proven || evidence {
                    cases.push((edge, a1, a2, status));
                }
            }
        }
    }
    for (edge, a1, a2, status) in cases {
        let r = ratios(ns, |n| sup_gap(EnsembleParams::new(n, a1, a2)?, edge, true))?;
        let label = if status == Status::Proven { "" } else { ", conjecture-evidence" };
        let e = if edge == Edge::Smallest { "min" } else { "max" };
        out.push(band_check(format!("correction-rate {e} ({a1},{a2}){label}"), &r, 0.15, 0.4));
    }

    for m in 0..=3 {
        for &c in &[-1, 0, 2] {
            for &x in &[0.5, 2.0] {
                let (d1, s1) = lemma3_residuals(m, c, 40, x)?;
                let (d2, s2) = lemma3_residuals(m, c, 80, x)?;
                out.push(band_check(format!("legendre-bessel-expansion m={m} c={c} x={x}"), &[d2 / d1, s2 / s1], 0.15, 0.4));
            }
        }
    }
    Ok(out)
}

fn monte_carlo(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let samples = if opts.fast { 10_000 } else { 100_000 };
    let eps = dkw_epsilon(0.01, samples);
    let mut out = Vec::new();
    for (i, (n, a1, a2)) in [(2u32, 0u32, 0u32), (2, 1, 1), (5, 2, 1), (5, 0, 3)].into_iter().enumerate() {
        let params = EnsembleParams::new(n, a1, a2)?;
        let mut smallest_by_sigma = Vec::new();
        // the pencil is invariant under Σ draw by draw, so the two runs need
        // independent streams for the two-sample test to mean anything
        for (j, (label, cov)) in
            [("identity", CovarianceSpec::Identity), ("random", CovarianceSpec::Random(opts.seed ^ 0x5eed))].into_iter().enumerate()
        {
            let seed = opts.seed.wrapping_add(2 * i as u64 + j as u64);
            let s = sample_extremes(&MCConfig { params, samples, seed, workers: opts.workers }, cov)?;
            let lo = EmpiricalCDF::new(s.smallest)?;
            let d = try_ks_distance(&lo, |t| edge_cdf(params, Edge::Smallest, Method::ExactLegendre, t.clamp(0.0, 1.0), Precision::Auto))?;
            out.push(Check::bound(format!("ks smallest ({n},{a1},{a2}) sigma={label}"), d, eps));
            // 1 − φ₁ follows the smallest-edge law with α₁ ↔ α₂
            let hi = EmpiricalCDF::new(s.largest.iter().map(|v| 1.0 - v).collect())?;
            let d = try_ks_distance(&hi, |t| {
                edge_cdf(params.swapped(), Edge::Smallest, Method::ExactLegendre, t.clamp(0.0, 1.0), Precision::Auto)
            })?;
            out.push(Check::bound(format!("ks largest ({n},{a1},{a2}) sigma={label}"), d, eps));
            smallest_by_sigma.push(lo);
        }
        let d = ks_two_sample(&smallest_by_sigma[0], &smallest_by_sigma[1]);
        out.push(Check::bound(
            format!("sigma-invariance ({n},{a1},{a2})"),
            d,
            two_sample_threshold(0.01, samples, samples),
        ));
    }

    let cfg = MCConfig { params: EnsembleParams::new(4, 1, 2)?, samples: 2000, seed: opts.seed, workers: 1 };
    let a = sample_extremes(&cfg, CovarianceSpec::Identity)?;
    let b = sample_extremes(&MCConfig { workers: opts.workers.max(2), ..cfg }, CovarianceSpec::Identity)?;
    out.push(Check::new("determinism-across-workers", a == b, format!("1 vs {} workers", opts.workers.max(2))));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corrupted(l: i64, z: f64) -> Result<f64> {
        let v = bessel_i(l, z)?;
        Ok(if l.abs() == 3 { v * (1.0 + 1e-7) } else { v })
    }

    #[test]
    fn identities_pass_and_detect_a_corrupted_bessel() {
        let opts = SuiteOptions { fast: true, ..Default::default() };
        let clean = run_suite(Suite::Identities, &opts).unwrap();
        assert!(clean.iter().all(|c| c.passed), "{clean:#?}");
        let bad = run_suite(Suite::Identities, &SuiteOptions { bessel: corrupted, ..opts }).unwrap();
        assert!(bad.iter().any(|c| !c.passed));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn fast_cross_method_passes() {
        let r = run_suite(Suite::CrossMethod, &SuiteOptions { fast: true, ..Default::default() }).unwrap();
        assert!(r.iter().all(|c| c.passed), "{r:#?}");
    }
}
