//! Bernstein-Szegő polynomials on `(0, π)` in the variable `x = cos ξ`.
//!
//! The weight is a Chebyshev weight (selected by `ε±`) divided by the
//! positive trigonometric polynomial `∏ (1 + 2 a_r cos ξ + a_r²)`. For degrees
//! `l ≥ d_ε = (d - ε+ - ε-)/2` the orthonormal polynomials have the explicit
//! form `Δ_l^{1/2} (c(ξ) e^{ilξ} + c(-ξ) e^{-ilξ})`, their roots solve a
//! monotone transcendental equation with explicit brackets, and the
//! Christoffel weights have the closed form `1 / (|c(ξ)|² h(ξ))`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance for matching a pole with its complex conjugate.
pub const CONJUGATE_TOL: f64 = 1e-12;
/// Residual tolerance `|g(ξ)|` for the root equation.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;
/// Total iteration cap (Newton plus bisection) per root.
pub const ROOT_MAX_ITER: usize = 200;

/// One real factor of the weight denominator: a real pole or a conjugate
/// pair (stored by its member with positive imaginary part).
#[derive(Debug, Clone, Copy, PartialEq)]
enum PoleFactor {
    Real(f64),
    Pair(Complex64),
}

/// Parameters `ε+`, `ε-` and poles `a_1..a_d` of a Bernstein-Szegő weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BsParamsRepr", into = "BsParamsRepr")]
pub struct BsParams {
    eps_plus: u8,
    eps_minus: u8,
    poles: Vec<Complex64>,
    allow_zero_poles: bool,
    factors: Vec<PoleFactor>,
}

#[derive(Serialize, Deserialize)]
struct BsParamsRepr {
    eps_plus: u8,
    eps_minus: u8,
    poles: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    allow_zero_poles: bool,
}

impl TryFrom<BsParamsRepr> for BsParams {
    type Error = Error;

    fn try_from(r: BsParamsRepr) -> Result<Self> {
        let poles = r.poles.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        BsParams::build(r.eps_plus, r.eps_minus, poles, r.allow_zero_poles)
    }
}

impl From<BsParams> for BsParamsRepr {
    fn from(p: BsParams) -> Self {
        BsParamsRepr {
            eps_plus: p.eps_plus,
            eps_minus: p.eps_minus,
            poles: p.poles.iter().map(|a| [a.re, a.im]).collect(),
            allow_zero_poles: p.allow_zero_poles,
        }
    }
}

impl BsParams {
    /// Validated parameters; every pole must satisfy `0 < |a| < 1`.
    pub fn new(eps_plus: u8, eps_minus: u8, poles: Vec<Complex64>) -> Result<Self> {
        Self::build(eps_plus, eps_minus, poles, false)
    }

    /// Like [`BsParams::new`] but admits `a = 0` (a unit factor), used to
    /// reach the Chebyshev limits with the general machinery.
    pub fn with_zero_poles(eps_plus: u8, eps_minus: u8, poles: Vec<Complex64>) -> Result<Self> {
        Self::build(eps_plus, eps_minus, poles, true)
    }

    /// Real poles only.
    pub fn real(eps_plus: u8, eps_minus: u8, poles: &[f64]) -> Result<Self> {
        Self::new(
            eps_plus,
            eps_minus,
            poles.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        )
    }

    /// The Chebyshev weight (`d = 0`) of the given kind.
    pub fn chebyshev(eps_plus: u8, eps_minus: u8) -> Result<Self> {
        Self::new(eps_plus, eps_minus, Vec::new())
    }

    fn build(
        eps_plus: u8,
        eps_minus: u8,
        mut poles: Vec<Complex64>,
        allow_zero_poles: bool,
    ) -> Result<Self> {
        if eps_plus > 1 || eps_minus > 1 {
            return Err(invalid("eps_plus and eps_minus must be 0 or 1"));
        }
        for a in &poles {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(invalid(format!("pole {a} is not finite")));
            }
            let r = a.norm();
            if r >= 1.0 {
                return Err(invalid(format!("pole {a} must lie inside the unit disc")));
            }
            if r == 0.0 && !allow_zero_poles {
                return Err(invalid("pole a = 0 requires the zero-pole opt-in"));
            }
        }
        for a in poles.iter_mut() {
            if a.im.abs() <= CONJUGATE_TOL {
                a.im = 0.0;
            }
        }
        let factors = pair_poles(&poles)?;
        Ok(BsParams {
            eps_plus,
            eps_minus,
            poles,
            allow_zero_poles,
            factors,
        })
    }

    pub fn eps_plus(&self) -> u8 {
        self.eps_plus
    }

    pub fn eps_minus(&self) -> u8 {
        self.eps_minus
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// Number of poles `d`.
    pub fn d(&self) -> usize {
        self.poles.len()
    }

    /// `2 d_ε = d - ε+ - ε-`, always an integer.
    pub fn two_d_eps(&self) -> i64 {
        self.d() as i64 - self.eps_plus as i64 - self.eps_minus as i64
    }

    pub fn d_eps(&self) -> f64 {
        self.two_d_eps() as f64 / 2.0
    }

    /// Smallest integer degree covered by the explicit formula.
    pub fn min_degree(&self) -> usize {
        let t = self.two_d_eps();
        if t <= 0 {
            0
        } else {
            ((t + 1) / 2) as usize
        }
    }

    /// `κ+ = ½ Σ (1-|a|)/(1+|a|)`.
    pub fn kappa_plus(&self) -> f64 {
        0.5 * self
            .poles
            .iter()
            .map(|a| (1.0 - a.norm()) / (1.0 + a.norm()))
            .sum::<f64>()
    }

    /// `κ- = ½ Σ (1+|a|)/(1-|a|)`.
    pub fn kappa_minus(&self) -> f64 {
        0.5 * self
            .poles
            .iter()
            .map(|a| (1.0 + a.norm()) / (1.0 - a.norm()))
            .sum::<f64>()
    }

    /// Largest `d` the cubature of size `(m, n)` admits: `2(m+n) + ε+ + ε-`.
    pub fn admits_cubature(&self, m: usize, n: usize) -> bool {
        self.d() <= 2 * (m + n) + self.eps_plus as usize + self.eps_minus as usize
    }

    fn check_degree(&self, l: usize) -> Result<()> {
        if l < self.min_degree() {
            return Err(Error::UnsupportedDegree {
                degree: l,
                min: self.min_degree(),
            });
        }
        Ok(())
    }

    /// `Δ_l`: differs from 1 only at the boundary degree `l = d_ε`.
    pub fn delta(&self, l: usize) -> f64 {
        if 2 * l as i64 == self.two_d_eps() {
            let prod: Complex64 = self.poles.iter().product();
            let sign = if self.eps_minus == 1 { -1.0 } else { 1.0 };
            1.0 / (1.0 + sign * prod.re)
        } else {
            1.0
        }
    }

    /// Leading coefficient `α_l = 2^l Δ_l^{-1/2}` of `p_l` in `x = cos ξ`.
    pub fn leading_coefficient(&self, l: usize) -> Result<f64> {
        self.check_degree(l)?;
        Ok(2f64.powi(l as i32) / self.delta(l).sqrt())
    }

    /// Chebyshev factor `2^{ε+ + ε-} (1 + ε+ cos ξ)(1 - ε- cos ξ)`.
    pub fn rho1(&self, xi: f64) -> f64 {
        let c = xi.cos();
        let ep = self.eps_plus as f64;
        let em = self.eps_minus as f64;
        2f64.powi((self.eps_plus + self.eps_minus) as i32) * (1.0 + ep * c) * (1.0 - em * c)
    }

    /// Denominator `∏_r (1 + 2 a_r cos ξ + a_r²)`, real and positive.
    pub fn denominator(&self, xi: f64) -> f64 {
        let c = xi.cos();
        self.factors
            .iter()
            .map(|f| match *f {
                PoleFactor::Real(a) => 1.0 + 2.0 * a * c + a * a,
                PoleFactor::Pair(a) => {
                    let q = Complex64::new(1.0, 0.0) + 2.0 * a * c + a * a;
                    q.norm_sqr()
                }
            })
            .product()
    }

    /// Weight `w(ξ) = ρ1(ξ) / (2π ∏ (1 + 2 a_r cos ξ + a_r²))`.
    pub fn weight(&self, xi: f64) -> f64 {
        self.rho1(xi) / (TAU * self.denominator(xi))
    }

    /// `c(ξ)`; errors at a singular endpoint.
    pub fn c_func(&self, xi: f64) -> Result<Complex64> {
        if !xi.is_finite() {
            return Err(Error::Domain(format!("xi = {xi} is not finite")));
        }
        let s = xi.rem_euclid(TAU);
        if self.eps_minus == 1 && s == 0.0 {
            return Err(Error::Domain(format!("c(xi) is singular at xi = {xi}")));
        }
        if self.eps_plus == 1 && s == PI {
            return Err(Error::Domain(format!("c(xi) is singular at xi = {xi}")));
        }
        let z = Complex64::from_polar(1.0, -xi);
        let one = Complex64::new(1.0, 0.0);
        let num: Complex64 = self.poles.iter().map(|&a| one + a * z).product();
        let ep = self.eps_plus as f64;
        let em = self.eps_minus as f64;
        Ok(num / ((one + ep * z) * (one - em * z)))
    }

    /// `|c(ξ)|²`.
    pub fn c_abs_sq(&self, xi: f64) -> Result<f64> {
        Ok(self.c_func(xi)?.norm_sqr())
    }

    /// `Σ_r v_{a_r}(ξ)`, real for conjugation-closed pole sets.
    pub fn v_sum(&self, xi: f64) -> f64 {
        self.factors
            .iter()
            .map(|f| match *f {
                PoleFactor::Real(a) => v_real(a, xi),
                PoleFactor::Pair(a) => v_pair_unchecked(a, xi),
            })
            .sum()
    }

    /// `Σ_r v'_{a_r}(ξ)`.
    pub fn v_prime_sum(&self, xi: f64) -> f64 {
        self.factors
            .iter()
            .map(|f| match *f {
                PoleFactor::Real(a) => v_prime_real(a, xi),
                PoleFactor::Pair(a) => v_pair_prime_unchecked(a, xi),
            })
            .sum()
    }

    /// `h^{(deg)}(ξ) = 2(deg - d_ε) + Σ v'_{a_r}(ξ)`.
    pub fn h_func(&self, degree: usize, xi: f64) -> Result<f64> {
        self.check_degree(degree)?;
        Ok(self.h_unchecked(degree, xi))
    }

    fn h_unchecked(&self, degree: usize, xi: f64) -> f64 {
        (2 * degree as i64 - self.two_d_eps()) as f64 + self.v_prime_sum(xi)
    }

    /// Orthonormal `p_l(cos ξ)` from the explicit formula.
    pub fn eval(&self, l: usize, xi: f64) -> Result<f64> {
        self.check_degree(l)?;
        if !(0.0..=PI).contains(&xi) {
            return Err(Error::Domain(format!("xi = {xi} outside [0, pi]")));
        }
        let plus = self.c_func(xi)? * Complex64::from_polar(1.0, l as f64 * xi);
        let minus = self.c_func(-xi)? * Complex64::from_polar(1.0, -(l as f64) * xi);
        let value = (plus + minus) * self.delta(l).sqrt();
        if value.im.abs() > 1e-12 * (1.0 + value.re.abs()) {
            return Err(Error::NumericFailure {
                index: l,
                reason: format!("imaginary residue {} at xi = {xi}", value.im),
            });
        }
        Ok(value.re)
    }

    /// Left-hand side minus right-hand side of the root equation for the
    /// root with index `k` of `p_degree`.
    pub fn root_equation(&self, degree: usize, k: usize, xi: f64) -> f64 {
        let slope = (2 * degree as i64 - self.two_d_eps()) as f64;
        slope * xi + self.v_sum(xi) - PI * (2 * k + 1 + self.eps_minus as usize) as f64
    }

    /// Proven bracket `[lo, hi]` for root `k` of `p_degree`.
    pub fn root_bracket(&self, degree: usize, k: usize) -> (f64, f64) {
        let base = degree as f64 - self.d_eps();
        let num = PI * (k as f64 + 0.5 + self.eps_minus as f64 / 2.0);
        (num / (base + self.kappa_minus()), num / (base + self.kappa_plus()))
    }

    /// Bounds on the gap `ξ_k - ξ_l` for `k > l`.
    pub fn gap_bounds(&self, degree: usize, steps: usize) -> (f64, f64) {
        let base = degree as f64 - self.d_eps();
        let num = PI * steps as f64;
        (num / (base + self.kappa_minus()), num / (base + self.kappa_plus()))
    }

    /// The Chebyshev root used to start the iteration for root `k`.
    pub fn chebyshev_guess(&self, degree: usize, k: usize) -> f64 {
        PI * (k as f64 + 0.5 + self.eps_minus as f64 / 2.0)
            / (degree as f64 + (self.eps_plus + self.eps_minus) as f64 / 2.0)
    }

    /// All roots `0 < ξ_0 < ... < ξ_{deg-1} < π` of `p_degree(cos ξ)`.
    pub fn roots(&self, degree: usize) -> Result<BsRootSet> {
        if degree == 0 {
            return Err(invalid("root set needs degree >= 1"));
        }
        self.check_degree(degree)?;
        let xi = (0..degree)
            .map(|k| self.solve_root(degree, k))
            .collect::<Result<Vec<_>>>()?;
        if xi.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NumericFailure {
                index: 0,
                reason: "roots are not strictly increasing".into(),
            });
        }
        Ok(BsRootSet { degree, xi })
    }

    /// Newton on the root equation inside the bracket (clipped to `(0, π)`).
    /// The bracket shrinks with every sign evaluation; a step that leaves it,
    /// or three consecutive steps that fail to halve it, fall back to bisection.
    fn solve_root(&self, degree: usize, k: usize) -> Result<f64> {
        let (lo, hi) = self.root_bracket(degree, k);
        let (mut a, mut b) = (lo.max(0.0), hi.min(PI));
        let slope = (2 * degree as i64 - self.two_d_eps()) as f64;
        let mut x = self.chebyshev_guess(degree, k).clamp(a, b);
        let mut stalls = 0;
        for _ in 0..ROOT_MAX_ITER {
            let g = self.root_equation(degree, k, x);
            if g.abs() <= ROOT_RESIDUAL_TOL {
                let polished = x - g / (slope + self.v_prime_sum(x));
                let better = polished.is_finite()
                    && self.root_equation(degree, k, polished).abs() <= g.abs();
                return Ok(if better { polished.clamp(lo, hi) } else { x });
            }
            let width = b - a;
            if g < 0.0 {
                a = x;
            } else {
                b = x;
            }
            if b - a > 0.5 * width {
                stalls += 1;
            } else {
                stalls = 0;
            }
            let next = x - g / (slope + self.v_prime_sum(x));
            x = if next.is_finite() && next > a && next < b && stalls < 3 {
                next
            } else {
                stalls = 0;
                0.5 * (a + b)
            };
            if b - a <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
                return Ok(x);
            }
        }
        Err(Error::NumericFailure {
            index: k,
            reason: format!("root search did not converge within {ROOT_MAX_ITER} iterations"),
        })
    }

    /// Modulus error of `e^{2i(deg-d_ε)ξ} = (-1)^{ε-+1} ∏ (1 + a e^{iξ})/(e^{iξ} + a)`.
    pub fn bethe_residual(&self, degree: usize, xi: f64) -> f64 {
        let z = Complex64::from_polar(1.0, xi);
        let one = Complex64::new(1.0, 0.0);
        let exponent = (2 * degree as i64 - self.two_d_eps()) as f64;
        let lhs = Complex64::from_polar(1.0, exponent * xi);
        let sign = if self.eps_minus == 1 { 1.0 } else { -1.0 };
        let rhs: Complex64 = self.poles.iter().map(|&a| (one + a * z) / (z + a)).product();
        (lhs - sign * rhs).norm()
    }

    /// Gauss rule in the `ξ` variable with weights `1 / (|c|² h)`.
    pub fn christoffel(&self, degree: usize) -> Result<BsRule> {
        let roots = self.roots(degree)?;
        let weights = roots
            .xi
            .iter()
            .map(|&x| Ok(1.0 / (self.c_abs_sq(x)? * self.h_unchecked(degree, x))))
            .collect::<Result<Vec<_>>>()?;
        Ok(BsRule {
            nodes: roots.xi,
            weights,
        })
    }

    /// Christoffel weights from the Christoffel-Darboux form
    /// `−(α_{deg+1}/α_deg) / (p_{deg+1}(x̂) p′_deg(x̂))`, with `p′` taken by
    /// central differences in `x = cos ξ`. Same node order as [`Self::christoffel`].
    pub fn christoffel_darboux(&self, degree: usize) -> Result<BsRule> {
        const STEP: f64 = 1e-6;
        let roots = self.roots(degree)?;
        let ratio = self.leading_coefficient(degree + 1)? / self.leading_coefficient(degree)?;
        let weights = roots
            .xi
            .iter()
            .enumerate()
            .map(|(k, &xi)| {
                let x = xi.cos();
                if x + STEP >= 1.0 || x - STEP <= -1.0 {
                    return Err(Error::NumericFailure {
                        index: k,
                        reason: "node too close to the boundary for differencing".into(),
                    });
                }
                let slope = (self.eval(degree, (x + STEP).acos())?
                    - self.eval(degree, (x - STEP).acos())?)
                    / (2.0 * STEP);
                Ok(-ratio / (self.eval(degree + 1, xi)? * slope))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BsRule {
            nodes: roots.xi,
            weights,
        })
    }

    /// `∫_0^π w(ξ) dξ`, from the constant Fourier coefficient of the weight.
    pub fn total_mass(&self) -> f64 {
        // 1/∏(1 + 2a cos ξ + a²) = F(z) F(1/z) with F(z) = ∏ 1/(1 + a z).
        let r = self.poles.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let d = self.d();
        let mut len = 1;
        if d > 0 && r > 0.0 {
            // Stop once binomial(k+d-1, d-1) r^k drops below 1e-20.
            let mut k = 1usize;
            loop {
                let log_bound = ln_binomial(k + d - 1, d - 1) + k as f64 * r.ln();
                if log_bound < -46.0 || k > 1_000_000 {
                    break;
                }
                k += 1;
            }
            len = k + 3;
        }
        let mut f = vec![Complex64::new(0.0, 0.0); len];
        f[0] = Complex64::new(1.0, 0.0);
        for &a in &self.poles {
            // Multiply by 1/(1 + a z): g_k = f_k - a g_{k-1}.
            for k in 1..len {
                let prev = f[k - 1];
                f[k] -= a * prev;
            }
        }
        let corr = |j: usize| -> f64 {
            (0..len.saturating_sub(j))
                .map(|k| f[k + j] * f[k])
                .sum::<Complex64>()
                .re
        };
        // Laurent coefficients of ρ1 in z, indices -2..=2.
        let rho = match (self.eps_plus, self.eps_minus) {
            (0, 0) => [0.0, 0.0, 1.0, 0.0, 0.0],
            (1, 0) => [0.0, 1.0, 2.0, 1.0, 0.0],
            (0, 1) => [0.0, -1.0, 2.0, -1.0, 0.0],
            _ => [-1.0, 0.0, 2.0, 0.0, -1.0],
        };
        let constant: f64 = rho
            .iter()
            .enumerate()
            .map(|(i, &c)| c * corr((i as i64 - 2).unsigned_abs() as usize))
            .sum();
        0.5 * constant
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

fn pair_poles(poles: &[Complex64]) -> Result<Vec<PoleFactor>> {
    let mut used = vec![false; poles.len()];
    let mut factors = Vec::new();
    for i in 0..poles.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let a = poles[i];
        if a.im == 0.0 {
            factors.push(PoleFactor::Real(a.re));
            continue;
        }
        let partner = (0..poles.len())
            .find(|&j| !used[j] && (poles[j] - a.conj()).norm() <= CONJUGATE_TOL)
            .ok_or_else(|| invalid(format!("pole {a} has no complex-conjugate partner")))?;
        used[partner] = true;
        let rep = if a.im > 0.0 { a } else { a.conj() };
        factors.push(PoleFactor::Pair(rep));
    }
    Ok(factors)
}

fn check_pole(a: f64) -> Result<()> {
    if !(a.abs() < 1.0) {
        return Err(invalid(format!("|a| = {} must be < 1", a.abs())));
    }
    Ok(())
}

/// `v_a(ξ) = ∫_0^ξ (1-a²)/(1+2a cos θ+a²) dθ` for real `|a| < 1`, continued
/// to all real `ξ` by `v_a(ξ + 2π) = v_a(ξ) + 2π`.
pub fn v_a(a: f64, xi: f64) -> Result<f64> {
    check_pole(a)?;
    Ok(v_real(a, xi))
}

/// `v'_a(ξ) = (1-a²)/(1+2a cos ξ+a²)`.
pub fn v_a_prime(a: f64, xi: f64) -> Result<f64> {
    check_pole(a)?;
    Ok(v_prime_real(a, xi))
}

/// `v_a(ξ) + v_ā(ξ)` for a complex pole `a`.
pub fn v_pair(a: Complex64, xi: f64) -> Result<f64> {
    if !(a.norm() < 1.0) {
        return Err(invalid(format!("|a| = {} must be < 1", a.norm())));
    }
    Ok(v_pair_unchecked(a, xi))
}

/// `v'_a(ξ) + v'_ā(ξ)` for a complex pole `a`.
pub fn v_pair_prime(a: Complex64, xi: f64) -> Result<f64> {
    if !(a.norm() < 1.0) {
        return Err(invalid(format!("|a| = {} must be < 1", a.norm())));
    }
    Ok(v_pair_prime_unchecked(a, xi))
}

fn v_real(a: f64, xi: f64) -> f64 {
    let k = (xi / TAU).round();
    let t = xi - k * TAU;
    let half = 0.5 * t;
    2.0 * ((1.0 - a) * half.sin()).atan2((1.0 + a) * half.cos()) + k * TAU
}

fn v_prime_real(a: f64, xi: f64) -> f64 {
    (1.0 - a * a) / (1.0 + 2.0 * a * xi.cos() + a * a)
}

// Re v'_a(ξ) = ½ (v'_{|a|}(ξ + Arg a) + v'_{|a|}(ξ - Arg a)); integrating
// from 0 and using that v_{|a|} is odd gives the pair sum below.
fn v_pair_unchecked(a: Complex64, xi: f64) -> f64 {
    let (r, phi) = a.to_polar();
    v_real(r, xi + phi) + v_real(r, xi - phi)
}

fn v_pair_prime_unchecked(a: Complex64, xi: f64) -> f64 {
    let (r, phi) = a.to_polar();
    v_prime_real(r, xi + phi) + v_prime_real(r, xi - phi)
}

/// Roots of `p_degree(cos ξ)` in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct BsRootSet {
    pub degree: usize,
    pub xi: Vec<f64>,
}

/// Nodes and Christoffel weights in the `ξ` variable.
#[derive(Debug, Clone, PartialEq)]
pub struct BsRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}
