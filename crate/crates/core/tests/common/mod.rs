//! Test-only oracles, independent of the library's implementation paths.
#![allow(dead_code)]

use hk_exact::rational::{int, Rational};
use num_traits::{Signed, Zero};

/// HK update straight from the pairwise definition, no sorting assumptions.
pub fn naive_step(x: &[Rational]) -> Vec<Rational> {
    let one = int(1);
    x.iter()
        .map(|xi| {
            let nbrs: Vec<&Rational> = x.iter().filter(|xj| (*xj - xi).abs() <= one).collect();
            nbrs.iter().copied().sum::<Rational>() / int(nbrs.len() as i64)
        })
        .collect()
}

/// `a . x <= b`, or `a . x < b` when `strict`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ineq {
    pub a: Vec<Rational>,
    pub b: Rational,
    pub strict: bool,
}

impl Ineq {
    pub fn le(a: Vec<Rational>, b: Rational) -> Self {
        Self { a, b, strict: false }
    }

    pub fn ge(a: Vec<Rational>, b: Rational) -> Self {
        Self { a: a.iter().map(|v| -v).collect(), b: -b, strict: false }
    }

    pub fn gt(a: Vec<Rational>, b: Rational) -> Self {
        Self { a: a.iter().map(|v| -v).collect(), b: -b, strict: true }
    }

    fn normalized(mut self) -> Self {
        // Scale so the first nonzero coefficient has magnitude 1.
        if let Some(p) = self.a.iter().find(|v| !v.is_zero()).map(|v| v.abs()) {
            for v in &mut self.a {
                *v /= &p;
            }
            self.b /= &p;
        }
        self
    }
}

/// Fourier-Motzkin elimination: decides feasibility of a mixed strict /
/// non-strict system exactly.
pub fn fm_feasible(mut system: Vec<Ineq>, num_vars: usize) -> bool {
    for v in 0..num_vars {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for c in system {
            if c.a[v].is_positive() {
                pos.push(c);
            } else if c.a[v].is_negative() {
                neg.push(c);
            } else {
                rest.push(c);
            }
        }
        for p in &pos {
            for q in &neg {
                let sp = p.a[v].recip();
                let sq = (-&q.a[v]).recip();
                let a: Vec<Rational> = p.a.iter().zip(&q.a).map(|(x, y)| x * &sp + y * &sq).collect();
                let b = &p.b * &sp + &q.b * &sq;
                rest.push(Ineq { a, b, strict: p.strict || q.strict }.normalized());
            }
        }
        rest.sort_by(|x, y| x.a.cmp(&y.a).then(x.b.cmp(&y.b)).then(y.strict.cmp(&x.strict)));
        // Keep the tightest right-hand side per direction.
        rest.dedup_by(|later, kept| later.a == kept.a);
        system = rest;
    }
    system.iter().all(|c| if c.strict { c.b.is_positive() } else { !c.b.is_negative() })
}

/// Linear maps x^t = M_t x^0 for a graph sequence, built from explicit
/// window-averaging matrices (dense products, no prefix sums).
pub fn maps_for_sequence(n: usize, neighborhoods: &[Vec<(usize, usize)>]) -> Vec<Vec<Vec<Rational>>> {
    let mut m: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { int(1) } else { Rational::zero() }).collect()).collect();
    let mut out = vec![m.clone()];
    for nb in neighborhoods {
        let avg: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let (l, r) = nb[i];
                let w = Rational::new(1.into(), ((r + 1 - l) as i64).into());
                (0..n).map(|j| if (l..=r).contains(&j) { w.clone() } else { Rational::zero() }).collect()
            })
            .collect();
        m = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &avg[i][k] * &m[k][j]).sum()).collect()).collect();
        out.push(m.clone());
    }
    out
}
