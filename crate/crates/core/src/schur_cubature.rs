//! Generalized Schur polynomials and the Gaussian cubature rules built on
//! the alcove `Λ^(m,n)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernstein_szego::BsParams;
use crate::error::{invalid, Error, Result};
use crate::json::{f17_mat, f17_vec};
use crate::orthopoly::{OrthoFamily, Variable};
use crate::partitions::{binomial, enumerate_alcove, next_permutation, Partition};

/// Largest number of variables supported by the determinant evaluator.
pub const MAX_VARIABLES: usize = 12;
/// Smallest coordinate gap accepted by [`SchurEvaluator`].
pub const MIN_GAP: f64 = 1e-8;

/// `det` of a row-major `n × n` matrix by partial-pivot elimination.
pub fn determinant(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor != 0.0 {
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    det
}

/// Vandermonde `V(x) = ∏_{j<k} (x_j - x_k)`.
pub fn vandermonde(x: &[f64]) -> f64 {
    let mut v = 1.0;
    for j in 0..x.len() {
        for k in j + 1..x.len() {
            v *= x[j] - x[k];
        }
    }
    v
}

/// `det[p_{λ_j+n-j}(x_k)] / V(x)` given `table[k][l] = p_l(x_k)`.
fn schur_from_table(lambda: &Partition, table: &[Vec<f64>], x: &[f64]) -> f64 {
    let n = x.len();
    let shifted = lambda.shifted();
    let mut mat = Vec::with_capacity(n * n);
    for &deg in &shifted {
        for row in table {
            mat.push(row[deg]);
        }
    }
    determinant(mat, n) / vandermonde(x)
}

/// Evaluates `P_λ` for a fixed family and number of variables.
#[derive(Debug, Clone)]
pub struct SchurEvaluator {
    family: OrthoFamily,
    n: usize,
}

impl SchurEvaluator {
    pub fn new(family: OrthoFamily, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VARIABLES {
            return Err(invalid(format!("n = {n} outside 1..={MAX_VARIABLES}")));
        }
        family.validate()?;
        Ok(SchurEvaluator { family, n })
    }

    pub fn family(&self) -> &OrthoFamily {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `P_λ` at a point given in the family's working variable.
    pub fn eval(&self, lambda: &Partition, t: &[f64]) -> Result<f64> {
        Ok(self.eval_many(std::slice::from_ref(lambda), t)?[0])
    }

    /// `P_λ` for several labels at one point, sharing the univariate values.
    pub fn eval_many(&self, lambdas: &[Partition], t: &[f64]) -> Result<Vec<f64>> {
        if t.len() != self.n {
            return Err(invalid(format!("expected {} coordinates, got {}", self.n, t.len())));
        }
        let mut top = 0;
        for lambda in lambdas {
            if lambda.len() != self.n {
                return Err(invalid(format!("partition {lambda} has {} parts, expected {}", lambda.len(), self.n)));
            }
            let min = self.family.min_degree();
            if lambda.last() < min {
                return Err(Error::UnsupportedDegree {
                    degree: lambda.last(),
                    min,
                });
            }
            top = top.max(lambda.first() + self.n - 1);
        }
        let x: Vec<f64> = t.iter().map(|&s| self.family.to_x(s)).collect();
        for j in 0..self.n {
            for k in j + 1..self.n {
                if (x[j] - x[k]).abs() < MIN_GAP {
                    return Err(Error::IllConditioned(format!(
                        "coordinates {} and {} are closer than {MIN_GAP}",
                        x[j], x[k]
                    )));
                }
            }
        }
        let table = t
            .iter()
            .map(|&s| self.family.eval_table(top, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(lambdas
            .iter()
            .map(|lambda| schur_from_table(lambda, &table, &x))
            .collect())
    }
}

/// Multivariate Bernstein-Szegő `C(ξ)`.
pub fn bs_c_function(params: &BsParams, xi: &[f64]) -> Result<Complex64> {
    let n = xi.len();
    let one = Complex64::new(1.0, 0.0);
    let mut c = Complex64::new(2f64.powi((n * (n.saturating_sub(1)) / 2) as i32), 0.0);
    for &s in xi {
        c *= params.c_func(s)?;
    }
    for j in 0..n {
        for k in j + 1..n {
            let plus = one - Complex64::from_polar(1.0, -(xi[j] + xi[k]));
            let minus = one - Complex64::from_polar(1.0, -(xi[j] - xi[k]));
            c /= plus * minus;
        }
    }
    Ok(c)
}

/// `P_λ(cos ξ)` from the signed-permutation expansion
/// `Δ_{λ_n}^{1/2} Σ_{ε,σ} C(εξ_σ) exp(i Σ ε_j λ_j ξ_{σ_j})`, valid for
/// `λ_n ≥ d_ε`.
pub fn bs_schur_expansion(params: &BsParams, lambda: &Partition, xi: &[f64]) -> Result<f64> {
    let n = xi.len();
    if lambda.len() != n {
        return Err(invalid("partition length differs from the number of coordinates"));
    }
    if n > MAX_VARIABLES {
        return Err(invalid(format!("n = {n} exceeds {MAX_VARIABLES}")));
    }
    if lambda.last() < params.min_degree() {
        return Err(Error::UnsupportedDegree {
            degree: lambda.last(),
            min: params.min_degree(),
        });
    }
    let parts = lambda.parts();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut eta = vec![0.0; n];
    loop {
        for signs in 0u32..(1 << n) {
            let mut phase = 0.0;
            for j in 0..n {
                let s = if signs >> j & 1 == 1 { -1.0 } else { 1.0 };
                eta[j] = s * xi[perm[j]];
                phase += parts[j] as f64 * eta[j];
            }
            total += bs_c_function(params, &eta)? * Complex64::from_polar(1.0, phase);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let value = params.delta(lambda.last()).sqrt() * total;
    if value.im.abs() > 1e-9 * (1.0 + value.re.abs()) {
        return Err(Error::NumericFailure {
            index: 0,
            reason: format!("expansion has imaginary part {}", value.im),
        });
    }
    Ok(value.re)
}

/// How the stored per-node weights are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightConvention {
    /// The complete weight `V(x)² ∏ ŵ`.
    Full,
    /// `1/H^(m,n)(ξ)`; the density `ρ` and the pole denominator are applied
    /// at integration time.
    #[serde(rename = "inverse_H")]
    InverseH,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleMetadata {
    pub library: String,
    pub version: String,
    pub univariate_degree: usize,
}

/// A Gaussian cubature rule for symmetric functions of `n` variables,
/// exact on polynomials of degree at most `2m+1` in each variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubatureRule {
    pub family: OrthoFamily,
    pub m: usize,
    pub n: usize,
    pub labels: Vec<Partition>,
    #[serde(serialize_with = "f17_mat::serialize")]
    pub nodes: Vec<Vec<f64>>,
    #[serde(serialize_with = "f17_vec::serialize")]
    pub weights: Vec<f64>,
    pub weight_convention: WeightConvention,
    pub variable: Variable,
    pub metadata: RuleMetadata,
}

impl CubatureRule {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Node in `x` coordinates.
    pub fn node_x(&self, i: usize) -> Vec<f64> {
        self.nodes[i].iter().map(|&t| self.family.to_x(t)).collect()
    }

    /// Complete weight of node `i`, i.e. the factor multiplying `f(x)`.
    pub fn full_weight(&self, i: usize) -> f64 {
        match (&self.family, self.weight_convention) {
            (OrthoFamily::BernsteinSzego(p), WeightConvention::InverseH) => {
                let xi = &self.nodes[i];
                bs_rho(p, xi) / xi.iter().map(|&s| p.denominator(s)).product::<f64>()
                    * self.weights[i]
            }
            _ => self.weights[i],
        }
    }

    /// Structural checks: sizes, labels, ordering and positivity.
    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        let expected = enumerate_alcove(self.m, self.n)?;
        if self.labels != expected {
            return Err(invalid("labels do not enumerate the alcove in canonical order"));
        }
        if self.nodes.len() != expected.len() || self.weights.len() != expected.len() {
            return Err(invalid(format!(
                "expected {} nodes and weights, found {} and {}",
                expected.len(),
                self.nodes.len(),
                self.weights.len()
            )));
        }
        if self.variable != self.family.variable() {
            return Err(invalid("variable does not match the family"));
        }
        let convention = default_convention(&self.family);
        if self.weight_convention != convention {
            return Err(invalid("weight convention does not match the family"));
        }
        let (lo, hi) = self.family.support();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.len() != self.n {
                return Err(invalid(format!("node {i} has {} coordinates", node.len())));
            }
            if node.iter().any(|&t| !t.is_finite() || t <= lo || t >= hi) {
                return Err(invalid(format!("node {i} leaves the support")));
            }
            if node.windows(2).any(|w| w[0] <= w[1]) {
                return Err(invalid(format!("node {i} is not strictly decreasing")));
            }
        }
        if let Some(i) = self.weights.iter().position(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(invalid(format!("weight {i} is not positive")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| invalid(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("malformed rule: {e}")))
    }
}

fn default_convention(family: &OrthoFamily) -> WeightConvention {
    match family {
        OrthoFamily::BernsteinSzego(_) => WeightConvention::InverseH,
        _ => WeightConvention::Full,
    }
}

/// `ρ(ξ) = ∏ ρ1(ξ_j) ∏_{j<k} (cos ξ_j - cos ξ_k)²`.
fn bs_rho(p: &BsParams, xi: &[f64]) -> f64 {
    let x: Vec<f64> = xi.iter().map(|s| s.cos()).collect();
    let v = vandermonde(&x);
    xi.iter().map(|&s| p.rho1(s)).product::<f64>() * v * v
}

/// Builds the cubature rule of size `binomial(m+n, n)` from the Gauss rule
/// of degree `m+n`.
pub fn build_rule(family: &OrthoFamily, m: usize, n: usize) -> Result<CubatureRule> {
    if n == 0 {
        return Err(invalid("cubature needs n >= 1"));
    }
    family.validate()?;
    if let OrthoFamily::BernsteinSzego(p) = family {
        if !p.admits_cubature(m, n) {
            return Err(invalid(format!(
                "d = {} exceeds 2(m+n) + eps_plus + eps_minus = {}",
                p.d(),
                2 * (m + n) + (p.eps_plus() + p.eps_minus()) as usize
            )));
        }
    }
    let labels = enumerate_alcove(m, n)?;
    let degree = m + n;
    let rule1d = family.gauss_rule(degree)?;
    let assembled: Vec<(Vec<f64>, f64)> = labels
        .par_iter()
        .map(|label| {
            let idx = label.shifted();
            let node: Vec<f64> = idx.iter().map(|&k| rule1d.nodes[k]).collect();
            let weight = match family {
                OrthoFamily::BernsteinSzego(p) => {
                    1.0 / node
                        .iter()
                        .map(|&s| p.h_func(degree, s))
                        .product::<Result<f64>>()?
                }
                _ => {
                    let v = vandermonde(&node);
                    v * v * idx.iter().map(|&k| rule1d.weights[k]).product::<f64>()
                }
            };
            Ok((node, weight))
        })
        .collect::<Result<Vec<_>>>()?;
    let (nodes, weights) = assembled.into_iter().unzip();
    let rule = CubatureRule {
        family: family.clone(),
        m,
        n,
        labels,
        nodes,
        weights,
        weight_convention: default_convention(family),
        variable: family.variable(),
        metadata: RuleMetadata {
            library: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            univariate_degree: degree,
        },
    };
    debug_assert_eq!(rule.len(), binomial(m + n, n));
    Ok(rule)
}

/// Multivariate density in the working variable: `V(x)² ∏ w(x_j)` for the
/// classical families and `ρ(ξ)` for Bernstein-Szegő (whose pole
/// denominator belongs to the integrand).
pub fn ensemble_density(family: &OrthoFamily, t: &[f64]) -> Result<f64> {
    let (lo, hi) = family.support();
    if let Some(&bad) = t.iter().find(|&&s| !(s.is_finite() && s >= lo && s <= hi)) {
        return Err(Error::Domain(format!("{bad} outside [{lo}, {hi}]")));
    }
    Ok(match family {
        OrthoFamily::BernsteinSzego(p) => bs_rho(p, t),
        _ => {
            let v = vandermonde(t);
            v * v * t.iter().map(|&s| family.weight(s)).product::<f64>()
        }
    })
}

/// `Σ f(x_λ̂) W_λ̂` with `f` taking `x` coordinates. For Bernstein-Szegő
/// rules the complete weight `ρ / (∏ den · H)` is used, so this equals
/// [`integrate_rational_bs`].
pub fn integrate_symmetric(rule: &CubatureRule, f: impl Fn(&[f64]) -> f64) -> f64 {
    (0..rule.len())
        .map(|i| f(&rule.node_x(i)) * rule.full_weight(i))
        .sum()
}

/// `Σ R(ξ) ρ(ξ) / H(ξ)` with `R = f(cos ξ) / ∏_{r,j} (1 + 2a_r cos ξ_j + a_r²)`.
pub fn integrate_rational_bs(rule: &CubatureRule, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    let p = match &rule.family {
        OrthoFamily::BernsteinSzego(p) => p,
        _ => return Err(invalid("rational integration needs a Bernstein-Szego rule")),
    };
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(xi, &inv_h)| {
            let x: Vec<f64> = xi.iter().map(|s| s.cos()).collect();
            let den: f64 = xi.iter().map(|&s| p.denominator(s)).product();
            f(&x) / den * bs_rho(p, xi) * inv_h
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::monomial_eval;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(vec![2.0], 1), 2.0);
        assert_eq!(determinant(vec![1.0, 2.0, 3.0, 4.0], 2), -2.0);
        assert_eq!(determinant(vec![0.0, 1.0, 1.0, 0.0], 2), -1.0);
        let a = vec![2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        assert_abs_diff_eq!(determinant(a, 3), 4.0, epsilon = 1e-14);
        assert_eq!(determinant(vec![1.0, 2.0, 2.0, 4.0], 2), 0.0);
    }

    #[test]
    fn monomial_basis_gives_classical_schur() {
        // p_l = x^l: P_(1,0) = x1 + x2, P_(1,1) = x1 x2, P_(2,1,0) via brute force.
        let x = [0.3f64, -0.7];
        let table: Vec<Vec<f64>> = x.iter().map(|&s| (0..4).map(|l| s.powi(l)).collect()).collect();
        assert_abs_diff_eq!(schur_from_table(&p(&[1, 0]), &table, &x), -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(schur_from_table(&p(&[1, 1]), &table, &x), -0.21, epsilon = 1e-15);
        assert_abs_diff_eq!(
            schur_from_table(&p(&[2, 0]), &table, &x),
            x[0] * x[0] + x[0] * x[1] + x[1] * x[1],
            epsilon = 1e-15
        );
        let y = [0.5f64, 1.5, -1.0];
        let table: Vec<Vec<f64>> = y.iter().map(|&s| (0..6).map(|l| s.powi(l)).collect()).collect();
        // s_(2,1,0) = M_(2,1,0) + 2 M_(1,1,1)
        let want = monomial_eval(&p(&[2, 1, 0]), &y).unwrap() + 2.0 * y[0] * y[1] * y[2];
        assert_abs_diff_eq!(schur_from_table(&p(&[2, 1, 0]), &table, &y), want, epsilon = 1e-13);
    }

    #[test]
    fn single_variable_is_the_univariate_polynomial() {
        let fam = OrthoFamily::jacobi(0.5, -0.25).unwrap();
        let ev = SchurEvaluator::new(fam.clone(), 1).unwrap();
        for l in 0..6 {
            assert_eq!(ev.eval(&p(&[l]), &[0.37]).unwrap(), fam.eval(l, 0.37).unwrap());
        }
    }

    #[test]
    fn evaluator_rejects_bad_input() {
        let ev = SchurEvaluator::new(OrthoFamily::hermite(), 2).unwrap();
        assert!(matches!(ev.eval(&p(&[1, 0]), &[0.5, 0.5 + 1e-9]), Err(Error::IllConditioned(_))));
        assert!(ev.eval(&p(&[1, 0, 0]), &[0.5, 0.1]).is_err());
        assert!(ev.eval(&p(&[1, 0]), &[0.5]).is_err());
        assert!(SchurEvaluator::new(OrthoFamily::hermite(), 13).is_err());
        let bs = OrthoFamily::bernstein_szego(BsParams::real(0, 0, &[0.5, 0.3, 0.2, 0.1]).unwrap());
        let ev = SchurEvaluator::new(bs, 2).unwrap();
        assert!(matches!(
            ev.eval(&p(&[3, 1]), &[2.0, 1.0]),
            Err(Error::UnsupportedDegree { degree: 1, min: 2 })
        ));
        assert!(ev.eval(&p(&[3, 2]), &[2.0, 1.0]).is_ok());
    }

    #[test]
    fn hermite_m1_n2_nodes() {
        let rule = build_rule(&OrthoFamily::hermite(), 1, 2).unwrap();
        assert_eq!(rule.labels, vec![p(&[1, 1]), p(&[1, 0]), p(&[0, 0])]);
        let r = 1.5f64.sqrt();
        let want = [[r, 0.0], [r, -r], [0.0, -r]];
        for (node, w) in rule.nodes.iter().zip(&want) {
            assert_abs_diff_eq!(node[0], w[0], epsilon = 1e-15);
            assert_abs_diff_eq!(node[1], w[1], epsilon = 1e-15);
        }
        // Weights: V² times products of the Gauss-Hermite weights 1/6, 2/3, 1/6.
        assert_abs_diff_eq!(rule.weights[0], 1.5 * (1.0 / 6.0) * (2.0 / 3.0), epsilon = 1e-14);
        assert_abs_diff_eq!(rule.weights[1], 6.0 / 36.0, epsilon = 1e-14);
    }

    #[test]
    fn single_node_carries_the_mass() {
        for fam in [
            OrthoFamily::hermite(),
            OrthoFamily::laguerre(1.0).unwrap(),
            OrthoFamily::jacobi(0.5, 0.5).unwrap(),
        ] {
            let rule = build_rule(&fam, 0, 1).unwrap();
            assert_eq!(rule.len(), 1);
            assert_abs_diff_eq!(rule.weights[0] / fam.total_mass(), 1.0, epsilon = 1e-14);
        }
        let bs = OrthoFamily::bernstein_szego(BsParams::chebyshev(0, 0).unwrap());
        let rule = build_rule(&bs, 0, 1).unwrap();
        assert_abs_diff_eq!(integrate_symmetric(&rule, |_| 1.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn chebyshev_reduction() {
        for (ep, em) in [(0u8, 0u8), (1, 0), (0, 1), (1, 1)] {
            let params = BsParams::chebyshev(ep, em).unwrap();
            let fam = OrthoFamily::bernstein_szego(params.clone());
            for (m, n) in [(2, 2), (1, 3), (3, 1)] {
                let rule = build_rule(&fam, m, n).unwrap();
                let denom = (2 * (m + n)) as f64 + (ep + em) as f64;
                for (i, node) in rule.nodes.iter().enumerate() {
                    assert_abs_diff_eq!(rule.weights[i] * denom.powi(n as i32), 1.0, epsilon = 1e-13);
                    for (j, &xi) in node.iter().enumerate() {
                        let k = rule.labels[i].parts()[j] + n - 1 - j;
                        let want = PI * (k as f64 + 0.5 + em as f64 / 2.0)
                            / ((m + n) as f64 + (ep + em) as f64 / 2.0);
                        assert_abs_diff_eq!(xi, want, epsilon = 1e-13);
                    }
                }
                let ones = integrate_symmetric(&rule, |_| 1.0);
                let rational = integrate_rational_bs(&rule, |_| 1.0).unwrap();
                assert_abs_diff_eq!(ones, rational, epsilon = 1e-15);
            }
        }
        let params = BsParams::chebyshev(0, 0).unwrap();
        let rule = build_rule(&OrthoFamily::bernstein_szego(params), 4, 1).unwrap();
        assert_abs_diff_eq!(integrate_rational_bs(&rule, |_| 1.0).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn densities() {
        let gue = ensemble_density(&OrthoFamily::hermite(), &[1.0, -1.0]).unwrap();
        assert_abs_diff_eq!(gue, 4.0 * (-2.0f64).exp() / PI, epsilon = 1e-15);
        let j = OrthoFamily::jacobi(0.5, 1.0).unwrap();
        assert_eq!(ensemble_density(&j, &[0.3]).unwrap(), j.weight(0.3));
        let bs = OrthoFamily::bernstein_szego(BsParams::real(0, 0, &[0.4]).unwrap());
        let rho = ensemble_density(&bs, &[0.4, 2.0]).unwrap();
        assert_abs_diff_eq!(rho, (0.4f64.cos() - 2.0f64.cos()).powi(2), epsilon = 1e-15);
        assert!(matches!(ensemble_density(&j, &[1.2, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn bs_rejects_too_many_poles() {
        let params = BsParams::real(0, 0, &[0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        let fam = OrthoFamily::bernstein_szego(params);
        assert!(build_rule(&fam, 0, 2).is_err());
        assert!(build_rule(&fam, 1, 1).is_err());
        assert!(build_rule(&fam, 2, 1).is_ok());
    }

    #[test]
    fn schur_symmetry() {
        let ev = SchurEvaluator::new(OrthoFamily::laguerre(0.5).unwrap(), 3).unwrap();
        let lam = p(&[3, 1, 0]);
        let a = ev.eval(&lam, &[0.4, 2.5, 1.1]).unwrap();
        let b = ev.eval(&lam, &[2.5, 1.1, 0.4]).unwrap();
        let c = ev.eval(&lam, &[1.1, 0.4, 2.5]).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12 * a.abs().max(1.0));
        assert_abs_diff_eq!(a, c, epsilon = 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn chebyshev_expansion_matches_determinant() {
        let params = BsParams::chebyshev(0, 0).unwrap();
        let ev = SchurEvaluator::new(OrthoFamily::bernstein_szego(params.clone()), 2).unwrap();
        let xi = [PI / 5.0, 2.0 * PI / 5.0];
        let det = ev.eval(&p(&[1, 1]), &xi).unwrap();
        let exp = bs_schur_expansion(&params, &p(&[1, 1]), &xi).unwrap();
        assert_abs_diff_eq!(det, exp, epsilon = 1e-12);
    }

    #[test]
    fn rule_json_round_trip() {
        let rule = build_rule(&OrthoFamily::jacobi(0.5, 0.5).unwrap(), 1, 2).unwrap();
        let text = rule.to_json().unwrap();
        assert!(text.contains("\"weight_convention\": \"full\""));
        let back = CubatureRule::from_json(&text).unwrap();
        assert_eq!(back, rule);
        back.validate().unwrap();
        let bs = BsParams::new(0, 1, vec![Complex64::new(0.3, 0.4), Complex64::new(0.3, -0.4)]).unwrap();
        let rule = build_rule(&OrthoFamily::bernstein_szego(bs), 2, 2).unwrap();
        let text = rule.to_json().unwrap();
        assert!(text.contains("\"weight_convention\": \"inverse_H\""));
        assert!(text.contains("\"variable\": \"xi\""));
        assert_eq!(CubatureRule::from_json(&text).unwrap(), rule);
    }
}
