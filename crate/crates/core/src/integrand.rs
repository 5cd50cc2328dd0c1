//! Symmetric integrands given as linear combinations of monomials, with an
//! optional pole list for Bernstein-Szegő rational integrands.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bernstein_szego::CONJUGATE_TOL;
use crate::error::{invalid, Result};
use crate::orthopoly::{OrthoFamily, Variable};
use crate::partitions::{monomial_eval, Partition};
use crate::schur_cubature::CubatureRule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub partition: Partition,
    pub coef: f64,
}

/// `f = Σ coef · M_partition`, evaluated at `x` (or `x = cos ξ`).
///
/// For Bernstein-Szegő rules the integrand is `f / ∏_{r,j}(1 + 2a_r x_j + a_r²)`
/// with the rule's own poles; `poles`, when given, must list exactly those.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrandSpec {
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poles: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<Variable>,
}

impl IntegrandSpec {
    pub fn from_terms(terms: Vec<(Partition, f64)>) -> Result<Self> {
        let spec = IntegrandSpec {
            terms: terms
                .into_iter()
                .map(|(partition, coef)| Term { partition, coef })
                .collect(),
            poles: None,
            variable: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: IntegrandSpec =
            serde_json::from_str(text).map_err(|e| invalid(format!("malformed integrand: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Number of variables, or `None` for an empty sum.
    pub fn n(&self) -> Option<usize> {
        self.terms.first().map(|t| t.partition.len())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(n) = self.n() {
            if self.terms.iter().any(|t| t.partition.len() != n) {
                return Err(invalid("all partitions must have the same length"));
            }
        }
        if self.terms.iter().any(|t| !t.coef.is_finite()) {
            return Err(invalid("coefficients must be finite"));
        }
        Ok(())
    }

    /// Largest part over all terms.
    pub fn max_part(&self) -> usize {
        self.terms.iter().map(|t| t.partition.first()).max().unwrap_or(0)
    }

    /// Value of the polynomial part at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.terms
            .iter()
            .map(|t| Ok(t.coef * monomial_eval(&t.partition, x)?))
            .sum()
    }

    /// Checks that the spec can be applied to `rule`.
    pub fn check_compatible(&self, rule: &CubatureRule) -> Result<()> {
        self.validate()?;
        if let Some(n) = self.n() {
            if n != rule.n {
                return Err(invalid(format!("integrand has n = {n}, rule has n = {}", rule.n)));
            }
        }
        if let Some(v) = self.variable {
            if v != rule.variable {
                return Err(invalid(format!(
                    "integrand variable {v:?} does not match rule variable {:?}",
                    rule.variable
                )));
            }
        }
        if let Some(poles) = &self.poles {
            let rule_poles: &[Complex64] = match &rule.family {
                OrthoFamily::BernsteinSzego(p) => p.poles(),
                _ => &[],
            };
            if !same_multiset(poles, rule_poles) {
                return Err(invalid("integrand poles differ from the rule's poles"));
            }
        }
        Ok(())
    }

    /// Cubature value of the integrand.
    pub fn integrate(&self, rule: &CubatureRule) -> Result<f64> {
        self.check_compatible(rule)?;
        (0..rule.len())
            .map(|i| Ok(self.eval(&rule.node_x(i))? * rule.full_weight(i)))
            .sum()
    }
}

fn same_multiset(a: &[[f64; 2]], b: &[Complex64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|&[re, im]| {
        let z = Complex64::new(re, im);
        match (0..b.len()).find(|&j| !used[j] && (b[j] - z).norm() <= CONJUGATE_TOL) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein_szego::BsParams;
    use crate::schur_cubature::build_rule;

    #[test]
    fn json_forms() {
        let spec = IntegrandSpec::from_json(r#"{"terms":[{"partition":[1,0],"coef":2.0}]}"#).unwrap();
        assert_eq!(spec.n(), Some(2));
        assert_eq!(spec.eval(&[1.0, 3.0]).unwrap(), 8.0);
        assert!(IntegrandSpec::from_json(
            r#"{"terms":[{"partition":[1,0],"coef":1},{"partition":[1],"coef":1}]}"#
        )
        .is_err());
        assert!(IntegrandSpec::from_json(r#"{"terms":[{"partition":[0,1],"coef":1}]}"#).is_err());
    }

    #[test]
    fn compatibility() {
        let rule = build_rule(&OrthoFamily::hermite(), 1, 2).unwrap();
        let mut spec = IntegrandSpec::from_json(r#"{"terms":[{"partition":[1,0],"coef":1}]}"#).unwrap();
        assert!(spec.integrate(&rule).unwrap().abs() < 1e-14);
        spec.poles = Some(vec![[0.5, 0.0]]);
        assert!(spec.integrate(&rule).is_err());
        spec.poles = None;
        spec.variable = Some(Variable::Xi);
        assert!(spec.integrate(&rule).is_err());
        let one_var = IntegrandSpec::from_json(r#"{"terms":[{"partition":[1],"coef":1}]}"#).unwrap();
        assert!(one_var.integrate(&rule).is_err());

        let params = BsParams::new(0, 0, vec![Complex64::new(0.3, 0.4), Complex64::new(0.3, -0.4)]).unwrap();
        let rule = build_rule(&OrthoFamily::bernstein_szego(params), 1, 1).unwrap();
        let mut spec = IntegrandSpec::from_json(r#"{"terms":[{"partition":[0],"coef":1}],"variable":"xi"}"#).unwrap();
        let plain = spec.integrate(&rule).unwrap();
        spec.poles = Some(vec![[0.3, -0.4], [0.3, 0.4]]);
        assert_eq!(spec.integrate(&rule).unwrap(), plain);
        spec.poles = Some(vec![[0.3, 0.4]]);
        assert!(spec.integrate(&rule).is_err());
    }
}
