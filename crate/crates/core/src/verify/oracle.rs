//! Reference integrators that share no code with the cubature builder:
//! tensor-product Gauss-Legendre on a mapped box, adaptive Gauss-Kronrod in
//! one variable, and a Monte-Carlo sampler.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::bernstein_szego::BsParams;
use crate::error::{invalid, Error, Result};
use crate::integrand::IntegrandSpec;
use crate::orthopoly::OrthoFamily;
use crate::partitions::Partition;

/// Half-width of the truncation box for the Hermite weight.
pub const HERMITE_BOX: f64 = 12.0;
/// Largest tolerated fraction of the weighted mass outside the box.
pub const TAIL_BUDGET: f64 = 1e-12;
/// Smallest resolution accepted for verification runs.
pub const MIN_POINTS_PER_AXIS: usize = 50;
/// Largest relative change allowed when the resolution is doubled.
pub const SELF_CONSISTENCY_TOL: f64 = 1e-10;

/// Upper end of the Laguerre truncation box, `60 + 10α`.
pub fn laguerre_box(alpha: f64) -> f64 {
    60.0 + 10.0 * alpha
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    TensorGaussLegendre,
    AdaptiveUnivariate,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub points_per_axis: usize,
    pub reference_kind: ReferenceKind,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            points_per_axis: 200,
            reference_kind: ReferenceKind::TensorGaussLegendre,
            mc_samples: 200_000,
            seed: 0,
        }
    }
}

impl OracleConfig {
    /// Rejects resolutions too coarse to certify anything.
    pub fn check(&self) -> Result<()> {
        if self.points_per_axis < MIN_POINTS_PER_AXIS {
            return Err(Error::OracleImprecise(format!(
                "points_per_axis = {} is below {MIN_POINTS_PER_AXIS}",
                self.points_per_axis
            )));
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes (increasing) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - z * z) * pp * pp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    (x, w)
}

/// One coordinate axis: a box in a smoothing variable `u`, the map `u ↦ x`
/// and the weight density (including the Jacobian) in `u`.
#[derive(Debug, Clone)]
struct Axis {
    family: OrthoFamily,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(family: &OrthoFamily) -> Result<Self> {
        family.validate()?;
        let (lo, hi) = match *family {
            OrthoFamily::Hermite => (-HERMITE_BOX, HERMITE_BOX),
            OrthoFamily::Laguerre { alpha } => (0.0, laguerre_box(alpha).sqrt()),
            _ => (0.0, PI),
        };
        Ok(Axis {
            family: family.clone(),
            lo,
            hi,
        })
    }

    /// `(x(u), density(u))`.
    fn map(&self, u: f64) -> (f64, f64) {
        match self.family {
            OrthoFamily::Hermite => (u, (-u * u).exp() / PI.sqrt()),
            // x = u², dx = 2u du.
            OrthoFamily::Laguerre { alpha } => {
                let x = u * u;
                (x, 2.0 * u.powf(2.0 * alpha + 1.0) * (-x).exp())
            }
            // x = cos u, (1-x)^α (1+x)^β dx = 2^{α+β+1} sin^{2α+1}(u/2) cos^{2β+1}(u/2) du.
            OrthoFamily::Jacobi { alpha, beta } => {
                let (s, c) = (0.5 * u).sin_cos();
                (
                    u.cos(),
                    2f64.powf(alpha + beta + 1.0) * s.powf(2.0 * alpha + 1.0) * c.powf(2.0 * beta + 1.0),
                )
            }
            OrthoFamily::BernsteinSzego(ref p) => (u.cos(), p.weight(u)),
        }
    }

    /// Fraction of `∫ |x|^s w` lying outside the box.
    fn tail_fraction(&self, s: usize) -> f64 {
        match self.family {
            OrthoFamily::Hermite => gamma_ur((s as f64 + 1.0) / 2.0, HERMITE_BOX * HERMITE_BOX),
            OrthoFamily::Laguerre { alpha } => gamma_ur(alpha + s as f64 + 1.0, laguerre_box(alpha)),
            _ => 0.0,
        }
    }

    fn grid(&self, points: usize) -> Grid {
        let (u, gw) = gauss_legendre(points);
        let half = 0.5 * (self.hi - self.lo);
        let mid = 0.5 * (self.hi + self.lo);
        let mut x = Vec::with_capacity(points);
        let mut w = Vec::with_capacity(points);
        for (&ui, &wi) in u.iter().zip(&gw) {
            let (xi, dens) = self.map(mid + half * ui);
            x.push(xi);
            w.push(half * wi * dens);
        }
        Grid { x, w }
    }
}

#[derive(Debug, Clone)]
struct Grid {
    x: Vec<f64>,
    w: Vec<f64>,
}

/// `(1/n!) ∫ x^a V(x)² ∏ w(x_j) dx` for every exponent vector `a` with
/// entries up to `max_deg`, together with the same integrals of `|x^a|`.
#[derive(Debug, Clone)]
pub struct MomentTensor {
    n: usize,
    dim: usize,
    values: Vec<f64>,
    abs: Vec<f64>,
}

impl MomentTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.dim - 1
    }

    fn index(&self, exps: &[usize]) -> usize {
        exps.iter().fold(0, |acc, &e| acc * self.dim + e)
    }

    /// Reference value of `M_λ` and its absolute scale `Σ_orbit ∫|x^μ| W / n!`.
    pub fn monomial(&self, lambda: &Partition) -> Result<(f64, f64)> {
        if lambda.len() != self.n {
            return Err(invalid("partition length differs from the oracle dimension"));
        }
        if lambda.first() >= self.dim {
            return Err(invalid(format!(
                "part {} exceeds the oracle degree {}",
                lambda.first(),
                self.dim - 1
            )));
        }
        let mut v = 0.0;
        let mut a = 0.0;
        for mu in lambda.orbit() {
            let i = self.index(&mu);
            v += self.values[i];
            a += self.abs[i];
        }
        Ok((v, a))
    }

    /// Reference value and absolute scale of an integrand spec.
    pub fn spec(&self, spec: &IntegrandSpec) -> Result<(f64, f64)> {
        let mut v = 0.0;
        let mut a = 0.0;
        for t in &spec.terms {
            let (mv, ma) = self.monomial(&t.partition)?;
            v += t.coef * mv;
            a += t.coef.abs() * ma;
        }
        Ok((v, a))
    }

    /// Largest entrywise change relative to the entry's absolute scale.
    fn max_relative_change(&self, other: &MomentTensor) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(&self.abs)
            .map(|((a, b), s)| if *s > 0.0 { (a - b).abs() / s } else { (a - b).abs() })
            .fold(0.0, f64::max)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Tensor-product Gauss-Legendre oracle for one family and dimension.
#[derive(Debug, Clone)]
pub struct TensorOracle {
    axis: Axis,
    n: usize,
}

impl TensorOracle {
    pub fn new(family: &OrthoFamily, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("oracle needs n >= 1"));
        }
        Ok(TensorOracle {
            axis: Axis::new(family)?,
            n,
        })
    }

    fn check_tail(&self, max_deg: usize) -> Result<()> {
        let s = max_deg + 2 * (self.n - 1);
        let tail = self.axis.tail_fraction(s);
        if !(tail <= TAIL_BUDGET) {
            return Err(Error::OracleImprecise(format!(
                "truncated tail fraction {tail:e} exceeds {TAIL_BUDGET:e}"
            )));
        }
        Ok(())
    }

    /// Moment tensor at `points` nodes per axis.
    pub fn moments(&self, max_deg: usize, points: usize) -> Result<MomentTensor> {
        if points < MIN_POINTS_PER_AXIS {
            return Err(Error::OracleImprecise(format!(
                "points_per_axis = {points} is below {MIN_POINTS_PER_AXIS}"
            )));
        }
        self.check_tail(max_deg)?;
        let grid = self.axis.grid(points);
        let n = self.n;
        let dim = max_deg + 1;
        let size = dim.pow(n as u32);
        let pw: Vec<Vec<f64>> = grid
            .x
            .iter()
            .map(|&x| (0..dim).map(|c| x.powi(c as i32)).collect())
            .collect();
        let inner = |outer: &[usize], values: &mut [f64], abs: &mut [f64]| {
            let xs: Vec<f64> = outer.iter().map(|&i| grid.x[i]).collect();
            let mut prefix: f64 = outer.iter().map(|&i| grid.w[i]).product();
            for j in 0..xs.len() {
                for k in j + 1..xs.len() {
                    prefix *= (xs[j] - xs[k]).powi(2);
                }
            }
            if prefix == 0.0 {
                return;
            }
            let mut s = vec![0.0; dim];
            let mut sa = vec![0.0; dim];
            for (i, &xl) in grid.x.iter().enumerate() {
                let q: f64 = grid.w[i] * xs.iter().map(|&xo| (xo - xl).powi(2)).product::<f64>();
                for c in 0..dim {
                    let t = q * pw[i][c];
                    s[c] += t;
                    sa[c] += t.abs();
                }
            }
            // Walk the exponents of the outer coordinates.
            let outer_count = dim.pow(outer.len() as u32);
            for code in 0..outer_count {
                let mut rem = code;
                let mut coef = prefix;
                for k in (0..outer.len()).rev() {
                    coef *= pw[outer[k]][rem % dim];
                    rem /= dim;
                }
                let base = code * dim;
                let ca = coef.abs();
                for c in 0..dim {
                    values[base + c] += coef * s[c];
                    abs[base + c] += ca * sa[c];
                }
            }
        };
        let (values, abs) = if n == 1 {
            let mut values = vec![0.0; size];
            let mut abs = vec![0.0; size];
            inner(&[], &mut values, &mut abs);
            (values, abs)
        } else {
            let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..points)
                .into_par_iter()
                .map(|first| {
                    let mut values = vec![0.0; size];
                    let mut abs = vec![0.0; size];
                    let mut outer = vec![0usize; n - 1];
                    outer[0] = first;
                    loop {
                        inner(&outer, &mut values, &mut abs);
                        // Odometer over outer[1..].
                        let mut k = n - 2;
                        loop {
                            if k == 0 {
                                return (values, abs);
                            }
                            outer[k] += 1;
                            if outer[k] < points {
                                break;
                            }
                            outer[k] = 0;
                            k -= 1;
                        }
                    }
                })
                .collect();
            let mut values = vec![0.0; size];
            let mut abs = vec![0.0; size];
            for (v, a) in &partials {
                for i in 0..size {
                    values[i] += v[i];
                    abs[i] += a[i];
                }
            }
            (values, abs)
        };
        let scale = 1.0 / factorial(n);
        Ok(MomentTensor {
            n,
            dim,
            values: values.into_iter().map(|v| v * scale).collect(),
            abs: abs.into_iter().map(|v| v * scale).collect(),
        })
    }

    /// Moments at the configured resolution, certified by comparison with
    /// twice the resolution.
    pub fn certified_moments(&self, max_deg: usize, cfg: &OracleConfig) -> Result<MomentTensor> {
        cfg.check()?;
        let coarse = self.moments(max_deg, cfg.points_per_axis)?;
        let fine = self.moments(max_deg, 2 * cfg.points_per_axis)?;
        let change = coarse.max_relative_change(&fine);
        if !(change <= SELF_CONSISTENCY_TOL) {
            return Err(Error::OracleImprecise(format!(
                "doubling the resolution changed a reference value by {change:e}"
            )));
        }
        Ok(coarse)
    }

    /// `(1/n!) ∫ f(x) V(x)² ∏ w(x_j) dx` and the same integral of `|f|`, by
    /// summing over strictly ordered index tuples.
    pub fn integrate_fn<F>(&self, f: F, points: usize) -> Result<(f64, f64)>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        if points < MIN_POINTS_PER_AXIS {
            return Err(Error::OracleImprecise(format!(
                "points_per_axis = {points} is below {MIN_POINTS_PER_AXIS}"
            )));
        }
        self.check_tail(0)?;
        let grid = self.axis.grid(points);
        let n = self.n;
        let partials: Vec<(f64, f64)> = (0..points)
            .into_par_iter()
            .map(|first| {
                let mut idx = vec![0usize; n];
                idx[0] = first;
                let mut sum = 0.0;
                let mut sum_abs = 0.0;
                let mut x = vec![0.0; n];
                visit_decreasing(&mut idx, 1, &mut |idx| {
                    let mut wgt = 1.0;
                    for (k, &i) in idx.iter().enumerate() {
                        x[k] = grid.x[i];
                        wgt *= grid.w[i];
                    }
                    for j in 0..n {
                        for k in j + 1..n {
                            wgt *= (x[j] - x[k]).powi(2);
                        }
                    }
                    let v = f(&x) * wgt;
                    sum += v;
                    sum_abs += v.abs();
                });
                (sum, sum_abs)
            })
            .collect();
        Ok(partials
            .iter()
            .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1)))
    }
}

fn visit_decreasing(idx: &mut Vec<usize>, pos: usize, f: &mut impl FnMut(&[usize])) {
    if pos == idx.len() {
        f(idx);
        return;
    }
    for i in 0..idx[pos - 1] {
        idx[pos] = i;
        visit_decreasing(idx, pos + 1, f);
    }
}

/// Monte-Carlo estimate of `(1/n!) ∫ f V² ∏ w` with its standard error,
/// sampling uniformly in the oracle box.
pub fn monte_carlo<F>(family: &OrthoFamily, n: usize, f: F, samples: usize, seed: u64) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if n == 0 || samples < 2 {
        return Err(invalid("Monte Carlo needs n >= 1 and at least two samples"));
    }
    let axis = Axis::new(family)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let volume = (axis.hi - axis.lo).powi(n as i32);
    let mut x = vec![0.0; n];
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..samples {
        let mut dens = 1.0;
        for xj in x.iter_mut() {
            let u = rng.gen_range(axis.lo..axis.hi);
            let (xv, d) = axis.map(u);
            *xj = xv;
            dens *= d;
        }
        for j in 0..n {
            for l in j + 1..n {
                dens *= (x[j] - x[l]).powi(2);
            }
        }
        let g = f(&x) * dens * volume;
        let delta = g - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (g - mean);
    }
    let var = m2 / (samples - 1) as f64;
    let scale = 1.0 / factorial(n);
    Ok((mean * scale, (var / samples as f64).sqrt() * scale))
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let f1 = f(c - h * XGK[j]);
        let f2 = f(c + h * XGK[j]);
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs(), abs * h.abs())
}

/// Adaptive Gauss-Kronrod (7/15) integration on a finite interval; returns
/// `(∫ f, ∫ |f|)`.
pub fn adaptive_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid("adaptive integration needs a finite interval"));
    }
    let mut intervals = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..20_000 {
        let total: f64 = intervals.iter().map(|iv| iv.2 .0).sum();
        let total_abs: f64 = intervals.iter().map(|iv| iv.2 .2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.2 .1).sum();
        if err <= rel_tol * total_abs.max(f64::MIN_POSITIVE) {
            return Ok((total, total_abs));
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("nonempty");
        let (lo, hi, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        intervals.push((lo, mid, gk15(&f, lo, mid)));
        intervals.push((mid, hi, gk15(&f, mid, hi)));
    }
    Err(Error::OracleImprecise("adaptive integration did not converge".into()))
}

/// Adaptive reference for `∫ f(x) w(x) dx` over the family's (truncated)
/// support, working in the smoothing variable of the oracle box.
pub fn adaptive_weighted(family: &OrthoFamily, f: impl Fn(f64) -> f64, rel_tol: f64) -> Result<(f64, f64)> {
    let axis = Axis::new(family)?;
    let tail = axis.tail_fraction(0);
    if !(tail <= TAIL_BUDGET) {
        return Err(Error::OracleImprecise(format!("tail fraction {tail:e}")));
    }
    adaptive_integrate(
        |u| {
            let (x, d) = axis.map(u);
            f(x) * d
        },
        axis.lo,
        axis.hi,
        rel_tol,
    )
}

/// Draws uniform numbers in `[-1, 1]` from a seeded generator.
pub fn uniform_coefficients(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// Random Bernstein-Szegő parameters with `d ≤ max_d` poles of modulus in
/// `[0.1, max_modulus]`, mixing real poles and conjugate pairs.
pub fn random_bs_params(seed: u64, max_d: usize, max_modulus: f64) -> Result<BsParams> {
    if !(0.1..1.0).contains(&max_modulus) {
        return Err(invalid("max_modulus must lie in [0.1, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps_plus = rng.gen_range(0..=1u8);
    let eps_minus = rng.gen_range(0..=1u8);
    let d = rng.gen_range(0..=max_d);
    let mut poles = Vec::with_capacity(d);
    while poles.len() < d {
        let r = rng.gen_range(0.1..=max_modulus);
        if d - poles.len() >= 2 && rng.gen_bool(0.5) {
            let z = Complex64::from_polar(r, rng.gen_range(0.2..PI - 0.2));
            poles.push(z);
            poles.push(z.conj());
        } else {
            poles.push(Complex64::new(if rng.gen_bool(0.5) { r } else { -r }, 0.0));
        }
    }
    BsParams::new(eps_plus, eps_minus, poles)
}
