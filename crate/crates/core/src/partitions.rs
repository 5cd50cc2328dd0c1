//! Partitions in the fundamental cone and alcove, the dominance order,
//! symmetric monomials and elementary symmetric polynomials.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest supported `m + n` for alcove enumeration.
pub const MAX_ALCOVE_SPAN: usize = 64;

/// A weakly decreasing vector of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("partition must have at least one part"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid(format!("parts {parts:?} are not weakly decreasing")));
        }
        Ok(Partition(parts))
    }

    pub fn zero(n: usize) -> Self {
        Partition(vec![0; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of parts, i.e. the number of variables.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|λ|`, the sum of the parts.
    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Largest part `λ_1`.
    pub fn first(&self) -> usize {
        self.0[0]
    }

    /// Smallest part `λ_n`.
    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    /// Componentwise sum; the result is again weakly decreasing.
    pub fn add(&self, other: &Partition) -> Result<Partition> {
        check_len(self.len(), other.len())?;
        Ok(Partition(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// The distinct rearrangements of the parts (the orbit under `S_n`),
    /// in lexicographically increasing order.
    pub fn orbit(&self) -> Vec<Vec<usize>> {
        let mut current: Vec<usize> = self.0.iter().rev().copied().collect();
        let mut out = vec![current.clone()];
        while next_permutation(&mut current) {
            out.push(current.clone());
        }
        out
    }

    /// Shifted indices `λ_j + n - j` (1-based `j`), strictly decreasing.
    pub fn shifted(&self) -> Vec<usize> {
        let n = self.len();
        self.0
            .iter()
            .enumerate()
            .map(|(j, &p)| p + n - 1 - j)
            .collect()
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(invalid(format!("length mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// Rearranges `v` into the next lexicographic permutation; returns false
/// (leaving `v` untouched) when `v` is already the last one.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `binomial(n, k)` in exact integer arithmetic.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All partitions with `n` parts bounded by `m`, in descending
/// lexicographic order.
pub fn enumerate_alcove(m: usize, n: usize) -> Result<Vec<Partition>> {
    if n < 1 {
        return Err(invalid("alcove needs n >= 1"));
    }
    if m + n > MAX_ALCOVE_SPAN {
        return Err(invalid(format!(
            "m + n = {} exceeds the supported maximum {MAX_ALCOVE_SPAN}",
            m + n
        )));
    }
    let mut out = Vec::with_capacity(binomial(m + n, n));
    let mut prefix = Vec::with_capacity(n);
    fill_alcove(m, n, &mut prefix, &mut out);
    Ok(out)
}

fn fill_alcove(cap: usize, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if prefix.len() == n {
        out.push(Partition(prefix.clone()));
        return;
    }
    for part in (0..=cap).rev() {
        prefix.push(part);
        fill_alcove(part, n, prefix, out);
        prefix.pop();
    }
}

/// Inhomogeneous dominance order: `μ ≤ λ` iff every prefix sum of `λ - μ`
/// is nonnegative.
pub fn dominance_leq(mu: &Partition, lambda: &Partition) -> Result<bool> {
    check_len(mu.len(), lambda.len())?;
    let mut acc: i64 = 0;
    for (l, m) in lambda.0.iter().zip(&mu.0) {
        acc += *l as i64 - *m as i64;
        if acc < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Symmetric monomial `M_λ(x)`: the sum of `x^μ` over the distinct
/// rearrangements `μ` of `λ`.
pub fn monomial_eval(lambda: &Partition, x: &[f64]) -> Result<f64> {
    check_len(lambda.len(), x.len())?;
    Ok(lambda
        .orbit()
        .iter()
        .map(|mu| {
            mu.iter()
                .zip(x)
                .map(|(&e, &xi)| xi.powi(e as i32))
                .product::<f64>()
        })
        .sum())
}

/// Elementary symmetric polynomials `(E_1, ..., E_n)` of `x`.
pub fn elementary_symmetric(x: &[f64]) -> Vec<f64> {
    // e[k] holds E_k of the prefix processed so far; E_0 = 1.
    let mut e = vec![0.0; x.len() + 1];
    e[0] = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += xi * e[k - 1];
        }
    }
    e.remove(0);
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn alcove_small_cases() {
        assert_eq!(enumerate_alcove(1, 1).unwrap(), vec![p(&[1]), p(&[0])]);
        assert_eq!(enumerate_alcove(0, 3).unwrap(), vec![p(&[0, 0, 0])]);
        let got = enumerate_alcove(2, 2).unwrap();
        let want = [[2, 2], [2, 1], [2, 0], [1, 1], [1, 0], [0, 0]];
        assert_eq!(got, want.iter().map(|w| p(w)).collect::<Vec<_>>());
    }

    #[test]
    fn alcove_matches_nested_loops() {
        // Brute force: every vector in [0, m]^n, keep the decreasing ones.
        for m in 0..=4 {
            for n in 1..=3 {
                let mut brute = Vec::new();
                let total = (m + 1usize).pow(n as u32);
                for code in 0..total {
                    let mut c = code;
                    let v: Vec<usize> = (0..n)
                        .map(|_| {
                            let d = c % (m + 1);
                            c /= m + 1;
                            d
                        })
                        .collect();
                    if v.windows(2).all(|w| w[0] >= w[1]) {
                        brute.push(p(&v));
                    }
                }
                brute.sort();
                brute.reverse();
                assert_eq!(enumerate_alcove(m, n).unwrap(), brute);
            }
        }
    }

    #[test]
    fn alcove_rejects_bad_arguments() {
        assert!(matches!(enumerate_alcove(3, 0), Err(Error::InvalidArgument(_))));
        assert!(enumerate_alcove(60, 5).is_err());
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![]).is_err());
        let json = serde_json::to_string(&p(&[2, 1, 0])).unwrap();
        assert_eq!(json, "[2,1,0]");
        let back: Partition = serde_json::from_str("[3,3,1]").unwrap();
        assert_eq!(back, p(&[3, 3, 1]));
        assert!(serde_json::from_str::<Partition>("[0,1]").is_err());
    }

    #[test]
    fn dominance_examples() {
        assert!(dominance_leq(&p(&[1, 1]), &p(&[2, 0])).unwrap());
        assert!(dominance_leq(&p(&[2, 1]), &p(&[2, 1])).unwrap());
        assert!(!dominance_leq(&p(&[2, 0]), &p(&[1, 1])).unwrap());
        assert!(dominance_leq(&p(&[1, 0]), &p(&[1, 0, 0])).is_err());
    }

    #[test]
    fn monomial_examples() {
        assert_eq!(monomial_eval(&p(&[1, 0]), &[2.0, 3.0]).unwrap(), 5.0);
        assert_eq!(monomial_eval(&p(&[1, 1]), &[2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(monomial_eval(&p(&[2, 1]), &[1.0, 2.0]).unwrap(), 6.0);
        assert!(monomial_eval(&p(&[1, 0]), &[1.0]).is_err());
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(p(&[2, 1, 0]).orbit().len(), 6);
        assert_eq!(p(&[1, 1, 0]).orbit().len(), 3);
        assert_eq!(p(&[0, 0, 0]).orbit().len(), 1);
    }

    #[test]
    fn elementary_examples() {
        assert_eq!(elementary_symmetric(&[2.0, 3.0]), vec![5.0, 6.0]);
        assert_eq!(elementary_symmetric(&[1.0, 1.0, 1.0]), vec![3.0, 3.0, 1.0]);
        assert_eq!(elementary_symmetric(&[1.0, -1.0, 2.0]), vec![2.0, -1.0, -2.0]);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binomial(3, 5), 0);
    }
}
