use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use symcubature::bernstein_szego::BsParams;
use symcubature::partitions::{binomial, dominance_leq, enumerate_alcove, monomial_eval, Partition};
use symcubature::schur_cubature::{bs_schur_expansion, build_rule, SchurEvaluator};
use symcubature::verify::oracle::{adaptive_weighted, random_bs_params, uniform_coefficients};
use symcubature::OrthoFamily;

type Poly = BTreeMap<Vec<usize>, i64>;

fn monomial_poly(lambda: &Partition) -> Poly {
    lambda.orbit().into_iter().map(|e| (e, 1)).collect()
}

fn multiply(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<usize> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

#[test]
fn alcove_sizes() {
    for m in 0..=6 {
        for n in 1..=4 {
            let alcove = enumerate_alcove(m, n).unwrap();
            assert_eq!(alcove.len(), binomial(m + n, n));
            assert!(alcove.windows(2).all(|w| w[0].parts() > w[1].parts()));
        }
    }
}

#[test]
fn dominance_is_a_partial_order() {
    let all = enumerate_alcove(4, 3).unwrap();
    for a in &all {
        assert!(dominance_leq(a, a).unwrap());
        for b in all.iter().filter(|b| b.size() == a.size()) {
            if dominance_leq(a, b).unwrap() && dominance_leq(b, a).unwrap() {
                assert_eq!(a, b);
            }
            for c in all.iter().filter(|c| c.size() == a.size()) {
                if dominance_leq(a, b).unwrap() && dominance_leq(b, c).unwrap() {
                    assert!(dominance_leq(a, c).unwrap());
                }
            }
        }
    }
}

#[test]
fn monomial_products_are_lower_triangular() {
    for n in 1..=3 {
        let alcove = enumerate_alcove(3, n).unwrap();
        for lambda in &alcove {
            for mu in &alcove {
                let product = multiply(&monomial_poly(lambda), &monomial_poly(mu));
                let top = lambda.add(mu).unwrap();
                for exponent in product.keys() {
                    let mut sorted = exponent.clone();
                    sorted.sort_unstable_by(|a, b| b.cmp(a));
                    let nu = Partition::new(sorted).unwrap();
                    assert!(dominance_leq(&nu, &top).unwrap(), "{nu} not below {top}");
                }
                let lead = product.get(top.parts()).copied().unwrap_or(0);
                assert!(lead >= 1, "coefficient of M_{top} in M_{lambda} M_{mu} is {lead}");
            }
        }
    }
}

#[test]
fn orbit_sizes() {
    for lambda in enumerate_alcove(3, 4).unwrap() {
        let mut counts = BTreeMap::new();
        for &p in lambda.parts() {
            *counts.entry(p).or_insert(0usize) += 1;
        }
        let expected = counts.values().fold(factorial(4), |acc, &c| acc / factorial(c));
        assert_eq!(lambda.orbit().len(), expected);
    }
}

fn partition_strategy(n: usize, m: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0..=m, n).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v).unwrap()
    })
}

fn family_strategy() -> impl Strategy<Value = OrthoFamily> {
    prop_oneof![
        Just(OrthoFamily::hermite()),
        (-0.9f64..5.0).prop_map(|a| OrthoFamily::laguerre(a).unwrap()),
        (-0.9f64..3.0, -0.9f64..3.0).prop_map(|(a, b)| OrthoFamily::jacobi(a, b).unwrap()),
        (0u64..1000).prop_map(|s| OrthoFamily::bernstein_szego(random_bs_params(s, 3, 0.75).unwrap())),
    ]
}

fn point_in(family: &OrthoFamily, u: &[f64]) -> Vec<f64> {
    let (lo, hi) = family.support();
    let (lo, hi) = (lo.max(-3.0), hi.min(8.0));
    u.iter().map(|&s| lo + (hi - lo) * (0.02 + 0.96 * s)).collect()
}

fn well_separated(family: &OrthoFamily, t: &[f64]) -> bool {
    t.iter().enumerate().all(|(i, &a)| {
        t[i + 1..]
            .iter()
            .all(|&b| (family.to_x(a) - family.to_x(b)).abs() > 1e-3)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monomials_are_symmetric(
        lambda in partition_strategy(4, 4),
        x in prop::collection::vec(-2.0f64..2.0, 4),
        shuffle in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
    ) {
        let permuted: Vec<f64> = shuffle.iter().map(|&i| x[i]).collect();
        let a = monomial_eval(&lambda, &x).unwrap();
        let b = monomial_eval(&lambda, &permuted).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn schur_is_symmetric(
        family in family_strategy(),
        lambda in partition_strategy(3, 4),
        u in prop::collection::vec(0.0f64..1.0, 3),
        swap in 0usize..3,
    ) {
        let t = point_in(&family, &u);
        prop_assume!(well_separated(&family, &t));
        let lambda = if lambda.last() < family.min_degree() {
            let parts: Vec<usize> = lambda.parts().iter().map(|p| p + family.min_degree()).collect();
            Partition::new(parts).unwrap()
        } else {
            lambda
        };
        let eval = SchurEvaluator::new(family.clone(), 3).unwrap();
        let mut swapped = t.clone();
        swapped.swap(swap, (swap + 1) % 3);
        let a = eval.eval(&lambda, &t).unwrap();
        let b = eval.eval(&lambda, &swapped).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn bs_expansion_matches_determinant(
        seed in 0u64..10_000,
        n in 1usize..=3,
        extra in prop::collection::vec(0usize..4, 3),
        u in prop::collection::vec(0.0f64..1.0, 3),
    ) {
        let params = random_bs_params(seed, 4, 0.75).unwrap();
        let base = params.min_degree();
        let mut parts: Vec<usize> = extra[..n].iter().map(|e| e + base).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let lambda = Partition::new(parts).unwrap();
        let xi: Vec<f64> = u[..n].iter().map(|s| PI * (0.02 + 0.96 * s)).collect();
        let family = OrthoFamily::bernstein_szego(params.clone());
        prop_assume!(well_separated(&family, &xi));
        let det = SchurEvaluator::new(family, n).unwrap().eval(&lambda, &xi).unwrap();
        let expansion = bs_schur_expansion(&params, &lambda, &xi).unwrap();
        prop_assert!((det - expansion).abs() <= 1e-9 * (1.0 + det.abs()), "{} vs {}", det, expansion);
    }
}

#[test]
fn bs_roots_respect_brackets() {
    for seed in 0..50u64 {
        let p = random_bs_params(seed, 4, 0.75).unwrap();
        for degree in p.min_degree().max(1)..=10 {
            let roots = p.roots(degree).unwrap();
            assert_eq!(roots.xi.len(), degree);
            for (k, &xi) in roots.xi.iter().enumerate() {
                let (lo, hi) = p.root_bracket(degree, k);
                assert!(lo <= xi && xi <= hi, "seed {seed} degree {degree} root {k}");
                assert!(p.bethe_residual(degree, xi) <= 1e-10);
                assert!(p.h_func(degree, xi).unwrap() > 0.0);
            }
            for k in 0..degree {
                for l in 0..k {
                    let (lo, hi) = p.gap_bounds(degree, k - l);
                    let gap = roots.xi[k] - roots.xi[l];
                    assert!(lo - 1e-12 <= gap && gap <= hi + 1e-12, "seed {seed} gap {l}->{k}");
                }
            }
        }
    }
}

#[test]
fn univariate_exactness_against_adaptive_reference() {
    let mut families = vec![
        OrthoFamily::hermite(),
        OrthoFamily::laguerre(0.0).unwrap(),
        OrthoFamily::laguerre(2.5).unwrap(),
        OrthoFamily::jacobi(0.5, 0.5).unwrap(),
        OrthoFamily::jacobi(-0.5, 1.5).unwrap(),
    ];
    families.extend((0..5).map(|s| OrthoFamily::bernstein_szego(random_bs_params(100 + s, 4, 0.75).unwrap())));
    for (i, family) in families.iter().enumerate() {
        for m in family.min_degree()..=6 {
            let rule = family.gauss_rule(m + 1).unwrap();
            let coef = uniform_coefficients(i as u64 * 100 + m as u64, 2 * m + 2);
            let poly = |x: f64| coef.iter().rev().fold(0.0, |acc, c| acc * x + c);
            let quad = rule.apply(|t| poly(family.to_x(t)));
            let (reference, scale) = adaptive_weighted(family, poly, 1e-13).unwrap();
            let err = (quad - reference).abs() / reference.abs().max(scale);
            assert!(err <= 1e-10, "{} m={m}: {quad} vs {reference}", family.name());
        }
    }
}

#[test]
fn rational_quadrature_against_adaptive_reference() {
    for seed in 0..25u64 {
        let p = random_bs_params(seed, 4, 0.75).unwrap();
        let family = OrthoFamily::bernstein_szego(p.clone());
        for m in p.min_degree()..=7 {
            let rule = p.christoffel(m + 1).unwrap();
            let coef = uniform_coefficients(seed * 31 + m as u64, 2 * m + 2);
            let num = |x: f64| coef.iter().rev().fold(0.0, |acc, c| acc * x + c);
            let quad: f64 = rule.nodes.iter().zip(&rule.weights).map(|(&xi, &w)| num(xi.cos()) * w).sum();
            let (reference, scale) = adaptive_weighted(&family, num, 1e-13).unwrap();
            let err = (quad - reference).abs() / reference.abs().max(scale);
            assert!(err <= 1e-9, "seed {seed} m={m}: {quad} vs {reference}");
        }
    }
}

#[test]
fn rule_sizes_are_minimal() {
    let p = BsParams::new(0, 1, vec![Complex64::new(-0.2, 0.5), Complex64::new(-0.2, -0.5)]).unwrap();
    let families = [
        OrthoFamily::hermite(),
        OrthoFamily::laguerre(1.0).unwrap(),
        OrthoFamily::jacobi(0.5, 0.5).unwrap(),
        OrthoFamily::bernstein_szego(p),
    ];
    for family in &families {
        for n in 1..=3 {
            for m in 0..=3 {
                let rule = build_rule(family, m, n).unwrap();
                assert_eq!(rule.len(), binomial(m + n, n));
                rule.validate().unwrap();
            }
        }
    }
}
