//! Univariate orthonormal families and their Gauss rules.
//!
//! Hermite, Laguerre and Jacobi polynomials are evaluated by the three-term
//! recurrence of the orthonormal family (positive leading coefficients).
//! Their roots are found by Newton's method bracketed by the interlacing
//! roots of the previous degree; the Christoffel weights use the classical
//! closed forms. The Bernstein-Szegő family works in `ξ` with `x = cos ξ`
//! and delegates to [`crate::bernstein_szego`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bernstein_szego::BsParams;
use crate::error::{invalid, Error, Result};
use crate::json::f17_vec;
use statrs::function::gamma::{gamma, ln_gamma};

/// Largest supported Laguerre `α`.
pub const MAX_LAGUERRE_ALPHA: f64 = 50.0;
/// Largest supported Gauss rule degree.
pub const MAX_DEGREE: usize = 64;

const NEWTON_MAX_ITER: usize = 100;

/// Working variable of a family: `x` itself, or `ξ` with `x = cos ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    X,
    Xi,
}

/// A univariate orthonormal family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrthoFamily {
    /// Weight `e^{-x²}/√π` on the real line.
    Hermite,
    /// Weight `x^α e^{-x}` on `(0, ∞)`.
    Laguerre { alpha: f64 },
    /// Weight `(1-x)^α (1+x)^β` on `(-1, 1)`.
    Jacobi { alpha: f64, beta: f64 },
    /// Bernstein-Szegő weight on `(0, π)` in `ξ`.
    BernsteinSzego(BsParams),
}

impl OrthoFamily {
    pub fn hermite() -> Self {
        OrthoFamily::Hermite
    }

    pub fn laguerre(alpha: f64) -> Result<Self> {
        let f = OrthoFamily::Laguerre { alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        let f = OrthoFamily::Jacobi { alpha, beta };
        f.validate()?;
        Ok(f)
    }

    pub fn bernstein_szego(params: BsParams) -> Self {
        OrthoFamily::BernsteinSzego(params)
    }

    /// Checks parameter ranges; needed after deserialization.
    pub fn validate(&self) -> Result<()> {
        match *self {
            OrthoFamily::Laguerre { alpha } => {
                if !(alpha > -1.0 && alpha <= MAX_LAGUERRE_ALPHA) {
                    return Err(invalid(format!(
                        "Laguerre alpha = {alpha} outside (-1, {MAX_LAGUERRE_ALPHA}]"
                    )));
                }
            }
            OrthoFamily::Jacobi { alpha, beta } => {
                if !(alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite()) {
                    return Err(invalid(format!(
                        "Jacobi parameters ({alpha}, {beta}) must exceed -1"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        match self {
            OrthoFamily::Hermite => "hermite".into(),
            OrthoFamily::Laguerre { alpha } => format!("laguerre(alpha={alpha})"),
            OrthoFamily::Jacobi { alpha, beta } => format!("jacobi(alpha={alpha},beta={beta})"),
            OrthoFamily::BernsteinSzego(p) => format!(
                "bernstein_szego(eps=({},{}),d={})",
                p.eps_plus(),
                p.eps_minus(),
                p.d()
            ),
        }
    }

    pub fn variable(&self) -> Variable {
        match self {
            OrthoFamily::BernsteinSzego(_) => Variable::Xi,
            _ => Variable::X,
        }
    }

    /// Support in the working variable.
    pub fn support(&self) -> (f64, f64) {
        match self {
            OrthoFamily::Hermite => (f64::NEG_INFINITY, f64::INFINITY),
            OrthoFamily::Laguerre { .. } => (0.0, f64::INFINITY),
            OrthoFamily::Jacobi { .. } => (-1.0, 1.0),
            OrthoFamily::BernsteinSzego(_) => (0.0, PI),
        }
    }

    /// Maps the working variable to `x`.
    pub fn to_x(&self, t: f64) -> f64 {
        match self {
            OrthoFamily::BernsteinSzego(_) => t.cos(),
            _ => t,
        }
    }

    pub fn bs_params(&self) -> Option<&BsParams> {
        match self {
            OrthoFamily::BernsteinSzego(p) => Some(p),
            _ => None,
        }
    }

    /// Lowest degree that can be evaluated.
    pub fn min_degree(&self) -> usize {
        match self {
            OrthoFamily::BernsteinSzego(p) => p.min_degree(),
            _ => 0,
        }
    }

    /// Weight density in the working variable.
    pub fn weight(&self, t: f64) -> f64 {
        match *self {
            OrthoFamily::Hermite => (-t * t).exp() / PI.sqrt(),
            OrthoFamily::Laguerre { alpha } => t.powf(alpha) * (-t).exp(),
            OrthoFamily::Jacobi { alpha, beta } => (1.0 - t).powf(alpha) * (1.0 + t).powf(beta),
            OrthoFamily::BernsteinSzego(ref p) => p.weight(t),
        }
    }

    /// `∫ w` over the support.
    pub fn total_mass(&self) -> f64 {
        match *self {
            OrthoFamily::Hermite => 1.0,
            OrthoFamily::Laguerre { alpha } => gamma(alpha + 1.0),
            OrthoFamily::Jacobi { alpha, beta } => {
                ((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0)
                    + ln_gamma(beta + 1.0)
                    - ln_gamma(alpha + beta + 2.0))
                .exp()
            }
            OrthoFamily::BernsteinSzego(ref p) => p.total_mass(),
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (a, b) = self.support();
        if !t.is_finite() || t < a || t > b {
            return Err(Error::Domain(format!(
                "{t} outside the support [{a}, {b}] of {}",
                self.name()
            )));
        }
        Ok(())
    }

    /// Orthonormal recurrence `x p_l = b_{l+1} p_{l+1} + a_l p_l + b_l p_{l-1}`:
    /// returns `(a_l, b_l)`.
    fn recurrence(&self, l: usize) -> (f64, f64) {
        let lf = l as f64;
        match *self {
            OrthoFamily::Hermite => (0.0, (lf / 2.0).sqrt()),
            OrthoFamily::Laguerre { alpha } => {
                (2.0 * lf + 1.0 + alpha, (lf * (lf + alpha)).max(0.0).sqrt())
            }
            OrthoFamily::Jacobi { alpha, beta } => {
                let s = alpha + beta;
                let a = if l == 0 {
                    (beta - alpha) / (s + 2.0)
                } else {
                    (beta * beta - alpha * alpha) / ((2.0 * lf + s) * (2.0 * lf + s + 2.0))
                };
                let b2 = match l {
                    0 => 0.0,
                    1 => 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s).powi(2) * (3.0 + s)),
                    _ => {
                        let t = 2.0 * lf + s;
                        4.0 * lf * (lf + alpha) * (lf + beta) * (lf + s)
                            / (t * t * (t + 1.0) * (t - 1.0))
                    }
                };
                (a, b2.sqrt())
            }
            OrthoFamily::BernsteinSzego(_) => unreachable!("no recurrence table"),
        }
    }

    /// `(p_l(x), p'_l(x))` for the classical families.
    fn classical_eval(&self, l: usize, x: f64) -> (f64, f64) {
        let mut prev = 0.0;
        let mut prev_d = 0.0;
        let mut cur = 1.0 / self.total_mass().sqrt();
        let mut cur_d = 0.0;
        for k in 0..l {
            let (a, b) = self.recurrence(k);
            let (_, b_next) = self.recurrence(k + 1);
            let next = ((x - a) * cur - b * prev) / b_next;
            let next_d = ((x - a) * cur_d + cur - b * prev_d) / b_next;
            prev = cur;
            prev_d = cur_d;
            cur = next;
            cur_d = next_d;
        }
        (cur, cur_d)
    }

    /// Orthonormal `p_l` at the working-variable point `t`.
    pub fn eval(&self, l: usize, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        match self {
            OrthoFamily::BernsteinSzego(p) => p.eval(l, t),
            _ => Ok(self.classical_eval(l, t).0),
        }
    }

    /// `[p_0(t), ..., p_max(t)]`. For Bernstein-Szegő the entries below the
    /// minimal explicit degree are NaN.
    pub fn eval_table(&self, max: usize, t: f64) -> Result<Vec<f64>> {
        self.check_domain(t)?;
        match self {
            OrthoFamily::BernsteinSzego(p) => (0..=max)
                .map(|l| {
                    if l < p.min_degree() {
                        Ok(f64::NAN)
                    } else {
                        p.eval(l, t)
                    }
                })
                .collect(),
            _ => {
                let mut out = Vec::with_capacity(max + 1);
                let mut prev = 0.0;
                let mut cur = 1.0 / self.total_mass().sqrt();
                out.push(cur);
                for k in 0..max {
                    let (a, b) = self.recurrence(k);
                    let next = ((t - a) * cur - b * prev) / self.recurrence(k + 1).1;
                    prev = cur;
                    cur = next;
                    out.push(cur);
                }
                Ok(out)
            }
        }
    }

    /// Leading coefficient of `p_l` in `x`.
    pub fn leading_coefficient(&self, l: usize) -> Result<f64> {
        match self {
            OrthoFamily::BernsteinSzego(p) => p.leading_coefficient(l),
            _ => {
                let mut lead = 1.0 / self.total_mass().sqrt();
                for k in 1..=l {
                    lead /= self.recurrence(k).1;
                }
                Ok(lead)
            }
        }
    }

    /// Gauss rule with `degree` nodes: the roots of `p_degree` with their
    /// Christoffel weights.
    pub fn gauss_rule(&self, degree: usize) -> Result<QuadratureRule1D> {
        if degree < 1 {
            return Err(invalid("Gauss rule needs degree >= 1"));
        }
        if degree > MAX_DEGREE {
            return Err(invalid(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        self.validate()?;
        let (nodes, weights) = match self {
            OrthoFamily::BernsteinSzego(p) => {
                let rule = p.christoffel(degree)?;
                (rule.nodes, rule.weights)
            }
            _ => {
                let nodes = self.classical_roots(degree)?;
                let weights = nodes
                    .iter()
                    .map(|&x| self.closed_form_weight(degree, x))
                    .collect();
                (nodes, weights)
            }
        };
        for (i, (&x, &w)) in nodes.iter().zip(&weights).enumerate() {
            if !x.is_finite() || !(w.is_finite() && w > 0.0) {
                return Err(Error::NumericFailure {
                    index: i,
                    reason: format!("node {x} has weight {w}"),
                });
            }
        }
        Ok(QuadratureRule1D {
            family: self.clone(),
            degree,
            variable: self.variable(),
            nodes,
            weights,
        })
    }

    /// Christoffel weight of the `degree`-point rule at its node `x`.
    fn closed_form_weight(&self, degree: usize, x: f64) -> f64 {
        let m = (degree - 1) as f64;
        match *self {
            OrthoFamily::Hermite => {
                let h = self.classical_eval(degree - 1, x).0;
                1.0 / ((m + 1.0) * h * h)
            }
            OrthoFamily::Laguerre { alpha } => {
                let shifted = OrthoFamily::Laguerre { alpha: alpha + 1.0 };
                let l = shifted.classical_eval(degree - 1, x).0;
                1.0 / ((m + 1.0) * x * l * l)
            }
            OrthoFamily::Jacobi { alpha, beta } => {
                let shifted = OrthoFamily::Jacobi {
                    alpha: alpha + 1.0,
                    beta: beta + 1.0,
                };
                let p = shifted.classical_eval(degree - 1, x).0;
                let s = alpha + beta;
                (2.0 * m + 3.0 + s) / ((m + 1.0) * (m + 2.0 + s) * (1.0 - x * x) * p * p)
            }
            OrthoFamily::BernsteinSzego(_) => unreachable!(),
        }
    }

    /// Gershgorin interval of the Jacobi matrix of size `size`, clipped to
    /// the support; contains every root of `p_size`.
    fn root_bounds(&self, size: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for l in 0..size {
            let (a, b) = self.recurrence(l);
            let b_next = if l + 1 < size { self.recurrence(l + 1).1 } else { 0.0 };
            lo = lo.min(a - b - b_next);
            hi = hi.max(a + b + b_next);
        }
        let (sa, sb) = self.support();
        let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        ((lo - pad).max(sa), (hi + pad).min(sb))
    }

    /// Roots of `p_degree`, built up from degree 1 by interlacing.
    fn classical_roots(&self, degree: usize) -> Result<Vec<f64>> {
        let mut roots: Vec<f64> = Vec::new();
        for size in 1..=degree {
            let (lo, hi) = self.root_bounds(size);
            let mut edges = Vec::with_capacity(size + 1);
            edges.push(lo);
            edges.extend_from_slice(&roots);
            edges.push(hi);
            let next = edges
                .windows(2)
                .enumerate()
                .map(|(i, w)| self.bracketed_newton(size, w[0], w[1], i))
                .collect::<Result<Vec<_>>>()?;
            roots = next;
        }
        Ok(roots)
    }

    fn bracketed_newton(&self, l: usize, mut lo: f64, mut hi: f64, index: usize) -> Result<f64> {
        let f_lo = self.classical_eval(l, lo).0;
        let f_hi = self.classical_eval(l, hi).0;
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::NumericFailure {
                index,
                reason: format!("no sign change of p_{l} on [{lo}, {hi}]"),
            });
        }
        let lo_negative = f_lo < 0.0;
        let mut x = 0.5 * (lo + hi);
        for _ in 0..NEWTON_MAX_ITER {
            let (f, df) = self.classical_eval(l, x);
            if f == 0.0 {
                return Ok(x);
            }
            if (f < 0.0) == lo_negative {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - f / df;
            let next = if newton >= lo && newton <= hi && newton.is_finite() {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let step = (next - x).abs();
            x = next;
            if step <= 1e-14 * x.abs().max(1.0) {
                return Ok(x);
            }
        }
        Err(Error::NumericFailure {
            index,
            reason: format!("Newton iteration for p_{l} did not converge"),
        })
    }
}

/// Gauss rule in the family's working variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule1D {
    pub family: OrthoFamily,
    pub degree: usize,
    pub variable: Variable,
    #[serde(serialize_with = "f17_vec::serialize")]
    pub nodes: Vec<f64>,
    #[serde(serialize_with = "f17_vec::serialize")]
    pub weights: Vec<f64>,
}

impl QuadratureRule1D {
    /// `Σ f(node) weight`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        quadrature_apply(self, f)
    }

    /// Christoffel weights from the definition `1 / Σ_{l<degree} p_l(x̂)²`.
    pub fn christoffel_by_definition(&self) -> Result<Vec<f64>> {
        self.nodes
            .iter()
            .map(|&x| {
                let mut s = 0.0;
                for l in 0..self.degree {
                    let p = self.family.eval(l, x)?;
                    s += p * p;
                }
                Ok(1.0 / s)
            })
            .collect()
    }
}

/// `Σ_l f(x_l) w_l`.
pub fn quadrature_apply(rule: &QuadratureRule1D, f: impl Fn(f64) -> f64) -> f64 {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| f(x) * w)
        .sum()
}
