use crate::error::{Error, Result};

/// Empirical distribution of a finite sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCDF {
    sorted: Vec<f64>,
}

impl EmpiricalCDF {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("empirical CDF needs at least one sample".into()));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidInput("NaN in sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn count(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{samples ≤ t} / count`.
    pub fn evaluate(&self, t: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= t) as f64 / self.count() as f64
    }

    /// Smallest sample with `evaluate ≥ p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let k = ((p.clamp(0.0, 1.0) * self.count() as f64).ceil() as usize).clamp(1, self.count());
        self.sorted[k - 1]
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.count() as f64
    }

    /// Sample standard deviation (`count − 1` denominator).
    pub fn std(&self) -> f64 {
        let n = self.count();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        (self.sorted.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64).sqrt()
    }
}

/// `sup |F̂ − F|` over the sample points, both one-sided gaps.
pub fn ks_distance(e: &EmpiricalCDF, mut cdf: impl FnMut(f64) -> f64) -> f64 {
    try_ks_distance(e, |t| Ok(cdf(t))).expect("infallible")
}

/// [`ks_distance`] for a CDF that can fail.
pub fn try_ks_distance(e: &EmpiricalCDF, mut cdf: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let n = e.count() as f64;
    let mut d = 0.0f64;
    for (i, &x) in e.sorted.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Dvoretzky–Kiefer–Wolfowitz half-width: `P(sup|F̂ − F| > ε) ≤ δ`.
pub fn dkw_epsilon(delta: f64, count: usize) -> f64 {
    ((2.0 / delta).ln() / (2.0 * count as f64)).sqrt()
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &EmpiricalCDF, b: &EmpiricalCDF) -> f64 {
    let (x, y) = (a.sorted(), b.sorted());
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic two-sample rejection threshold `√(−ln(δ/2)/2) · √((n+m)/(nm))`.
pub fn two_sample_threshold(delta: f64, n: usize, m: usize) -> f64 {
    let c = (-(delta / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        let e = EmpiricalCDF::new(vec![0.3, 0.1, 0.2, 0.2]).unwrap();
        assert_eq!(e.sorted(), &[0.1, 0.2, 0.2, 0.3]);
        assert_eq!(e.evaluate(0.0), 0.0);
        assert_eq!(e.evaluate(0.2), 0.75);
        assert_eq!(e.evaluate(1.0), 1.0);
        assert_eq!(e.quantile(0.5), 0.2);
        assert!(EmpiricalCDF::new(vec![]).is_err());
        assert!(EmpiricalCDF::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn ks_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = EmpiricalCDF::new((0..1000).map(|_| rng.random::<f64>()).collect()).unwrap();
        assert!(ks_distance(&e, |t| e.evaluate(t)) <= 1.0 / 1000.0 + 1e-15);
        assert!(ks_distance(&e, |_| 0.5) >= 0.5 - 1.0 / 1000.0);
        assert!(ks_distance(&e, |t| t.clamp(0.0, 1.0)) < dkw_epsilon(0.01, 1000));
        assert_eq!(ks_two_sample(&e, &e), 0.0);
    }

    #[test]
    fn uniform_ks_rejects_at_about_the_nominal_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let eps = dkw_epsilon(0.05, 200);
        let rejections = (0..400)
            .filter(|_| {
                let e = EmpiricalCDF::new((0..200).map(|_| rng.random::<f64>()).collect()).unwrap();
                ks_distance(&e, |t| t) > eps
            })
            .count();
        // DKW is conservative: at most ~5% rejections
        assert!(rejections <= 30, "{rejections}");
    }

    proptest! {
        #[test]
        fn ecdf_is_monotone_in_unit_interval(v in prop::collection::vec(-5.0f64..5.0, 1..60), a in -6.0f64..6.0, b in -6.0f64..6.0) {
            let e = EmpiricalCDF::new(v).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(e.evaluate(lo) <= e.evaluate(hi));
            prop_assert!((0.0..=1.0).contains(&e.evaluate(lo)));
        }
    }
}
