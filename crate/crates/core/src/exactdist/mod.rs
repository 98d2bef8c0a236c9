//! Exact finite-n CDFs of the extreme eigenvalues of `W = (W₁+W₂)⁻¹W₁`,
//! with the JUE and F-matrix coordinate changes.
//!
//! Two independent routes are provided: an `(α+β)`-dimensional determinant
//! of Legendre derivatives ([`g_cdf`]) and an `α`-dimensional determinant of
//! Jacobi polynomials ([`h_cdf`]). The largest eigenvalue is obtained from
//! the smallest one by exchanging `α₁ ↔ α₂` and reflecting `ξ → 1 − ξ`.

mod backend;
mod jacobi_route;
mod legendre_route;

use std::fmt;
use std::str::FromStr;

use backend::{dispatch, Eval};
use legendre_route::EPoint;

use crate::asympt;
use crate::error::{Error, Result};
use crate::numerics::quad::integrate;
use crate::numerics::{DoubleDouble, Precision, ScaledMatrix};

/// `(n, α₁, α₂)` with `m₁ = n + α₁`, `m₂ = n + α₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EnsembleParams {
    pub n: u32,
    pub alpha1: u32,
    pub alpha2: u32,
}

impl EnsembleParams {
    pub fn new(n: u32, alpha1: u32, alpha2: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension n must be >= 1".into()));
        }
        Ok(Self { n, alpha1, alpha2 })
    }

    pub fn m1(&self) -> u32 {
        self.n + self.alpha1
    }

    pub fn m2(&self) -> u32 {
        self.n + self.alpha2
    }

    /// Parameters with `α₁ ↔ α₂` exchanged (the `W ↔ I − W` duality).
    pub fn swapped(&self) -> Self {
        Self { n: self.n, alpha1: self.alpha2, alpha2: self.alpha1 }
    }
}

impl fmt::Display for EnsembleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} alpha1={} alpha2={}", self.n, self.alpha1, self.alpha2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// Eigenvalues of `W` on `[0, 1]`.
    W,
    /// Jacobi unitary ensemble on `[−1, 1]`, `φ = (1 + φ̃)/2`.
    Jue,
    /// Complex F matrix `W₁W₂⁻¹` on `[0, ∞)`, `φ = φ̂/(1 + φ̂)`.
    F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Edge {
    Smallest,
    Largest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    ExactLegendre,
    ExactJacobi,
    Asymptotic,
    Corrected,
}

macro_rules! parse_enum {
    // the first spelling of each variant is its canonical name
    ($ty:ty, $what:literal, { $($first:literal $(| $s:literal)* => $v:path),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($first $(| $s)* => Ok($v),)+
                    other => Err(Error::InvalidInput(format!(concat!("unknown ", $what, " '{}'"), other))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self {
                    $($v => $first,)+
                })
            }
        }
    };
}

parse_enum!(Model, "model", { "w" => Model::W, "jue" => Model::Jue, "f" => Model::F });
parse_enum!(Edge, "edge", { "min" | "smallest" => Edge::Smallest, "max" | "largest" => Edge::Largest });
parse_enum!(Method, "method", {
    "legendre" | "exact-legendre" => Method::ExactLegendre,
    "jacobi" | "exact-jacobi" => Method::ExactJacobi,
    "asymptotic" => Method::Asymptotic,
    "corrected" => Method::Corrected,
});

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DistributionQuery {
    pub params: EnsembleParams,
    pub model: Model,
    pub edge: Edge,
    pub method: Method,
}

impl Model {
    /// Maps a model-coordinate point to `W` coordinates.
    pub fn to_w(self, t: f64) -> Result<f64> {
        let bad = |range: &str| Error::Domain(format!("point {t} outside {range}"));
        match self {
            Model::W if (0.0..=1.0).contains(&t) => Ok(t),
            Model::W => Err(bad("[0, 1]")),
            Model::Jue if (-1.0..=1.0).contains(&t) => Ok((1.0 + t) / 2.0),
            Model::Jue => Err(bad("[-1, 1]")),
            Model::F if t == f64::INFINITY => Ok(1.0),
            Model::F if t >= 0.0 => Ok(t / (1.0 + t)),
            Model::F => Err(bad("[0, inf)")),
        }
    }

    pub fn domain(self) -> (f64, f64) {
        match self {
            Model::W => (0.0, 1.0),
            Model::Jue => (-1.0, 1.0),
            Model::F => (0.0, f64::INFINITY),
        }
    }
}

/// ξ at or above this is treated as 1 by the smallest-eigenvalue routes.
pub const XI_ONE: f64 = 1.0 - 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Route {
    Legendre,
    Jacobi,
}

fn route_eval(route: Route, alpha: u32, beta: u32, n: u32, xi: f64, precision: Precision) -> Result<Eval> {
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::Domain(format!("xi = {xi} outside [0, 1)")));
    }
    if xi == 0.0 {
        return Ok(Eval::exact(0.0));
    }
    if xi >= XI_ONE {
        return Ok(Eval::exact(1.0));
    }
    match route {
        Route::Legendre => dispatch(
            precision,
            n,
            || legendre_route::g_eval::<f64>(alpha, beta, n, xi),
            || legendre_route::g_eval::<DoubleDouble>(alpha, beta, n, xi),
        ),
        Route::Jacobi => dispatch(
            precision,
            n,
            || jacobi_route::h_eval::<f64>(alpha, beta, n, xi),
            || jacobi_route::h_eval::<DoubleDouble>(alpha, beta, n, xi),
        ),
    }
}

fn edge_eval(params: EnsembleParams, edge: Edge, route: Route, xi: f64, precision: Precision) -> Result<Eval> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!("xi = {xi} outside [0, 1]")));
    }
    let EnsembleParams { n, alpha1, alpha2 } = params;
    match edge {
        Edge::Smallest => {
            if xi == 1.0 {
                return Ok(Eval::exact(1.0));
            }
            route_eval(route, alpha1, alpha2, n, xi, precision)
        }
        Edge::Largest => {
            if xi == 1.0 {
                return Ok(Eval::exact(1.0));
            }
            if xi == 0.0 {
                return Ok(Eval::exact(0.0));
            }
            let e = route_eval(route, alpha2, alpha1, n, 1.0 - xi, precision)?;
            Ok(Eval { cdf: e.survival, survival: e.cdf, conditioning: e.conditioning })
        }
    }
}

/// `E_γ(y)`: the `(α₁+α₂) × γ` matrix of `d^{j−1}P_{n+i−1}(y)`; `y = ±1` use
/// the exact Pochhammer forms.
pub fn e_matrix(params: EnsembleParams, gamma: u32, y: f64) -> ScaledMatrix {
    let rows = (params.alpha1 + params.alpha2) as usize;
    let point = if y == 1.0 {
        EPoint::One
    } else if y == -1.0 {
        EPoint::MinusOne
    } else {
        EPoint::At(y)
    };
    legendre_route::e_block::<f64>(params.n, rows, gamma as usize, point)
}

/// `g_{α,β}(ξ)` via the Legendre determinant, precision from the environment.
pub fn g_cdf(alpha: u32, beta: u32, n: u32, xi: f64) -> Result<f64> {
    g_cdf_with(alpha, beta, n, xi, Precision::from_env()?)
}

pub fn g_cdf_with(alpha: u32, beta: u32, n: u32, xi: f64, precision: Precision) -> Result<f64> {
    check_n(n)?;
    Ok(route_eval(Route::Legendre, alpha, beta, n, xi, precision)?.cdf)
}

/// `h_{α,β}(ξ)` via the Jacobi determinant.
pub fn h_cdf(alpha: u32, beta: u32, n: u32, xi: f64) -> Result<f64> {
    h_cdf_with(alpha, beta, n, xi, Precision::from_env()?)
}

pub fn h_cdf_with(alpha: u32, beta: u32, n: u32, xi: f64, precision: Precision) -> Result<f64> {
    check_n(n)?;
    Ok(route_eval(Route::Jacobi, alpha, beta, n, xi, precision)?.cdf)
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidInput("n must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// `P(φₙ ≤ ξ)` for the smallest eigenvalue of `W`.
pub fn smallest_cdf(params: EnsembleParams, xi: f64) -> Result<f64> {
    Ok(edge_eval(params, Edge::Smallest, Route::Legendre, xi, Precision::from_env()?)?.cdf)
}

/// `P(φ₁ ≤ ξ)` for the largest eigenvalue of `W`.
pub fn largest_cdf(params: EnsembleParams, xi: f64) -> Result<f64> {
    Ok(edge_eval(params, Edge::Largest, Route::Legendre, xi, Precision::from_env()?)?.cdf)
}

/// Exact CDF of either edge in `W` coordinates, by the chosen exact route.
pub fn edge_cdf(params: EnsembleParams, edge: Edge, method: Method, xi: f64, precision: Precision) -> Result<f64> {
    let route = match method {
        Method::ExactLegendre => Route::Legendre,
        Method::ExactJacobi => Route::Jacobi,
        other => return Err(Error::UnsupportedBranch(format!("{other:?} is not an exact method"))),
    };
    Ok(edge_eval(params, edge, route, xi, precision)?.cdf)
}

/// Complement `1 − F` of [`edge_cdf`], accurate where `F` is close to one.
pub fn edge_survival(params: EnsembleParams, edge: Edge, xi: f64, precision: Precision) -> Result<f64> {
    Ok(edge_eval(params, edge, Route::Legendre, xi, precision)?.survival)
}

/// The one-sided closed forms, available when `α₁ = 0` or `α₂ = 0`.
pub fn corollary_cdf(params: EnsembleParams, xi: f64, edge: Edge) -> Result<f64> {
    corollary_cdf_with(params, xi, edge, Precision::from_env()?)
}

pub fn corollary_cdf_with(params: EnsembleParams, xi: f64, edge: Edge, precision: Precision) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!("xi = {xi} outside [0, 1]")));
    }
    let EnsembleParams { n, alpha1, alpha2 } = params;
    if alpha1 != 0 && alpha2 != 0 {
        return Err(Error::UnsupportedBranch(format!(
            "closed forms need alpha1 = 0 or alpha2 = 0 (got {alpha1}, {alpha2})"
        )));
    }
    if xi == 1.0 {
        return Ok(1.0);
    }
    let e = match edge {
        Edge::Smallest if xi == 0.0 => return Ok(0.0),
        Edge::Smallest if alpha1 == 0 => dispatch(
            precision,
            n,
            || legendre_route::g_eval::<f64>(0, alpha2, n, xi),
            || legendre_route::g_eval::<DoubleDouble>(0, alpha2, n, xi),
        )?,
        Edge::Smallest => dispatch(
            precision,
            n,
            || legendre_route::smallest_one_sided::<f64>(n, alpha1, xi),
            || legendre_route::smallest_one_sided::<DoubleDouble>(n, alpha1, xi),
        )?,
        Edge::Largest if alpha2 == 0 => dispatch(
            precision,
            n,
            || legendre_route::largest_power::<f64>(n, alpha1, xi),
            || legendre_route::largest_power::<DoubleDouble>(n, alpha1, xi),
        )?,
        Edge::Largest => dispatch(
            precision,
            n,
            || legendre_route::largest_one_sided::<f64>(n, alpha2, xi),
            || legendre_route::largest_one_sided::<DoubleDouble>(n, alpha2, xi),
        )?,
    };
    Ok(e.cdf)
}

/// CDF of the requested edge in the requested model's coordinates.
pub fn model_cdf(q: &DistributionQuery, point: f64) -> Result<f64> {
    model_cdf_with(q, point, Precision::from_env()?)
}

pub fn model_cdf_with(q: &DistributionQuery, point: f64, precision: Precision) -> Result<f64> {
    let xi = q.model.to_w(point)?;
    let p = q.params;
    let n2 = (p.n as f64) * (p.n as f64);
    match q.method {
        Method::ExactLegendre | Method::ExactJacobi => edge_cdf(p, q.edge, q.method, xi, precision),
        Method::Asymptotic => match q.edge {
            Edge::Smallest => asympt::f_infinity_cdf(p.alpha1, n2 * xi),
            Edge::Largest => Ok(asympt::f_infinity_survival(p.alpha2, n2 * (1.0 - xi))?.clamp(0.0, 1.0)),
        },
        Method::Corrected => {
            let x = match q.edge {
                Edge::Smallest => n2 * xi,
                Edge::Largest => n2 * (1.0 - xi),
            };
            let c = asympt::corrected_cdf(&asympt::CorrectionQuery { params: p, x, edge: q.edge })?;
            Ok(match q.edge {
                Edge::Smallest => c.value,
                Edge::Largest => 1.0 - c.value,
            })
        }
    }
}

/// Density by a Richardson-extrapolated central difference of [`model_cdf`].
pub fn pdf(q: &DistributionQuery, point: f64) -> Result<f64> {
    pdf_with(q, point, Precision::from_env()?)
}

pub fn pdf_with(q: &DistributionQuery, point: f64, precision: Precision) -> Result<f64> {
    let h = 1e-7f64.max(1e-7 * point.abs());
    let (lo, hi) = q.model.domain();
    if !(point - h > lo && point + h < hi) {
        return Err(Error::Domain(format!("density needs an interior point, got {point}")));
    }
    let f = |t: f64| model_cdf_with(q, t, precision);
    let d1 = (f(point + h)? - f(point - h)?) / (2.0 * h);
    let d2 = (f(point + h / 2.0)? - f(point - h / 2.0)?) / h;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Closed-form mean and standard deviation of `φₙ` when `α₁ = 0`.
pub fn moments_alpha1_zero(params: EnsembleParams) -> Result<(f64, f64)> {
    if params.alpha1 != 0 {
        return Err(Error::UnsupportedBranch(format!("moments need alpha1 = 0, got {}", params.alpha1)));
    }
    let (n, a2) = (params.n as f64, params.alpha2 as f64);
    let q = n * (n + a2);
    let mean = 1.0 / (q + 1.0);
    let std = (q / ((1.0 + q) * (1.0 + q) * (2.0 + q))).sqrt();
    Ok((mean, std))
}

/// Mean and standard deviation of the chosen edge eigenvalue from the exact
/// CDF: `E[φ] = ∫(1−F)`, `E[φ²] = ∫2ξ(1−F)`.
pub fn moments_by_quadrature(params: EnsembleParams, edge: Edge, precision: Precision) -> Result<(f64, f64)> {
    let mut err = None;
    let mut survival = |xi: f64| match edge_survival(params, edge, xi, precision) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    };
    let (m1, _) = integrate(&mut survival, 0.0, 1.0, 1e-15, 1e-13);
    let (m2, _) = integrate(|xi| 2.0 * xi * survival(xi), 0.0, 1.0, 1e-16, 1e-13);
    if let Some(e) = err {
        return Err(e);
    }
    Ok((m1, (m2 - m1 * m1).max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(n: u32, a1: u32, a2: u32) -> EnsembleParams {
        EnsembleParams::new(n, a1, a2).unwrap()
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_cdf(2, 3, 4, 0.0).unwrap(), 0.0);
        for &xi in &[0.1, 0.5, 0.9] {
            assert_relative_eq!(g_cdf(0, 0, 1, xi).unwrap(), xi, max_relative = 1e-15);
            assert_relative_eq!(g_cdf(0, 3, 5, xi).unwrap(), 1.0 - (1.0 - xi).powi(40), max_relative = 1e-14);
        }
        assert!(g_cdf(1, 1, 2, 1.0).is_err());
        assert!(g_cdf(1, 1, 2, -0.1).is_err());
        assert_eq!(g_cdf(1, 1, 2, 1.0 - 1e-15).unwrap(), 1.0);
    }

    #[test]
    fn h_matches_reference_values() {
        // 40-digit reference values of the same CDF
        assert_relative_eq!(h_cdf(2, 3, 4, 0.2).unwrap(), 0.889259479574507, max_relative = 1e-13);
        assert_relative_eq!(g_cdf(2, 3, 4, 0.2).unwrap(), 0.889259479574507, max_relative = 1e-13);
        assert_relative_eq!(h_cdf(1, 1, 2, 0.3).unwrap(), 0.63881757, max_relative = 1e-8);
        assert_eq!(h_cdf(3, 1, 5, 0.0).unwrap(), 0.0);
        for &xi in &[0.05, 0.4] {
            assert_relative_eq!(h_cdf(0, 2, 3, xi).unwrap(), 1.0 - (1.0 - xi).powi(15), max_relative = 1e-14);
        }
    }

    #[test]
    fn one_sided_closed_form_examples() {
        let p = params(3, 0, 2);
        assert_relative_eq!(corollary_cdf(p, 0.1, Edge::Smallest).unwrap(), 0.794108867905351, max_relative = 1e-14);
        assert_relative_eq!(smallest_cdf(p, 0.1).unwrap(), 0.794108867905351, max_relative = 1e-14);
        let q = params(3, 2, 0);
        let c = corollary_cdf(q, 0.1, Edge::Smallest).unwrap();
        assert_relative_eq!(c, g_cdf(2, 0, 3, 0.1).unwrap(), max_relative = 1e-10);
        assert_relative_eq!(corollary_cdf(q, 0.7, Edge::Largest).unwrap(), 0.7f64.powi(15), max_relative = 1e-13);
        assert_relative_eq!(largest_cdf(q, 0.7).unwrap(), 0.7f64.powi(15), max_relative = 1e-12);
        assert!(matches!(corollary_cdf(params(3, 1, 1), 0.2, Edge::Smallest), Err(Error::UnsupportedBranch(_))));
    }

    #[test]
    fn duality_by_construction() {
        let p = params(5, 2, 1);
        for &xi in &[0.02, 0.1, 0.3, 0.7] {
            let s = smallest_cdf(p, xi).unwrap();
            let l = largest_cdf(p.swapped(), 1.0 - xi).unwrap();
            assert!((l - (1.0 - s)).abs() < 1e-12);
        }
        for edge in [Edge::Smallest, Edge::Largest] {
            assert_eq!(edge_cdf(p, edge, Method::ExactJacobi, 0.0, Precision::Auto).unwrap(), 0.0);
            assert_eq!(edge_cdf(p, edge, Method::ExactJacobi, 1.0, Precision::Auto).unwrap(), 1.0);
        }
    }

    #[test]
    fn model_transforms() {
        let p = params(5, 1, 1);
        let jue = DistributionQuery { params: p, model: Model::Jue, edge: Edge::Smallest, method: Method::ExactLegendre };
        assert_eq!(model_cdf(&jue, -1.0).unwrap(), 0.0);
        assert_relative_eq!(model_cdf(&jue, -0.9).unwrap(), smallest_cdf(p, 0.05).unwrap(), max_relative = 1e-14);
        let f = DistributionQuery { params: p, model: Model::F, edge: Edge::Largest, method: Method::ExactLegendre };
        assert!((model_cdf(&f, 1e12).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(model_cdf(&f, f64::INFINITY).unwrap(), 1.0);
        assert!(model_cdf(&f, -0.5).is_err());
        assert!(model_cdf(&jue, 1.5).is_err());
    }

    #[test]
    fn density_matches_analytic_derivative() {
        let p = params(4, 0, 3);
        let q = DistributionQuery { params: p, model: Model::W, edge: Edge::Smallest, method: Method::ExactLegendre };
        let e = 28.0;
        for &xi in &[0.01, 0.05, 0.2] {
            let want = e * (1.0f64 - xi).powf(e - 1.0);
            assert_relative_eq!(pdf(&q, xi).unwrap(), want, max_relative = 1e-5);
        }
    }

    #[test]
    fn moments() {
        assert_eq!(moments_alpha1_zero(params(1, 0, 0)).unwrap().0, 0.5);
        assert_relative_eq!(moments_alpha1_zero(params(10, 0, 0)).unwrap().0, 1.0 / 101.0);
        assert!(moments_alpha1_zero(params(3, 1, 0)).is_err());
        let (m, s) = moments_by_quadrature(params(6, 0, 2), Edge::Smallest, Precision::Auto).unwrap();
        let (mc, sc) = moments_alpha1_zero(params(6, 0, 2)).unwrap();
        assert!((m - mc).abs() < 1e-8 && (s - sc).abs() < 1e-8, "{m} {s} vs {mc} {sc}");
    }

    #[test]
    fn parsing() {
        assert_eq!("jue".parse::<Model>().unwrap(), Model::Jue);
        assert_eq!("max".parse::<Edge>().unwrap(), Edge::Largest);
        assert_eq!("jacobi".parse::<Method>().unwrap(), Method::ExactJacobi);
        assert!("bogus".parse::<Method>().is_err());
        for m in [Method::ExactLegendre, Method::ExactJacobi, Method::Asymptotic, Method::Corrected] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert_eq!(Edge::Largest.to_string(), "max");
    }
}
