mod common;

use common::{fm_feasible, Ineq};
use hk_exact::dynamics::{influence_graph, OpinionProfile};
use hk_exact::graphs::{connected_count, enumerate_connected, OrderedUIGraph};
use hk_exact::rational::{frac, int};
use num_bigint::BigUint;
use proptest::prelude::*;

fn catalan_by_recurrence(m: usize) -> Vec<BigUint> {
    let mut c = vec![BigUint::from(1u32)];
    for k in 1..=m {
        let next = (0..k).map(|i| &c[i] * &c[k - 1 - i]).sum();
        c.push(next);
    }
    c
}

#[test]
fn counts_follow_the_catalan_recurrence() {
    let c = catalan_by_recurrence(20);
    for n in 1..=21 {
        assert_eq!(connected_count(n), c[n - 1], "n={n}");
    }
    for n in 1..=9 {
        assert_eq!(BigUint::from(enumerate_connected(n).unwrap().len()), c[n - 1]);
    }
    assert_eq!(connected_count(5), BigUint::from(14u32));
}

#[test]
fn every_enumerated_graph_is_an_influence_graph() {
    // Exists sorted x with gap <= 1 on edges and gap > 1 on non-edges.
    for n in 2..=5 {
        for g in enumerate_connected(n).unwrap() {
            let mut sys = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let mut a = vec![int(0); n];
                    a[j] = int(1);
                    a[i] = int(-1);
                    if g.has_edge(i, j) {
                        sys.push(Ineq::le(a, int(1)));
                    } else {
                        sys.push(Ineq::gt(a, int(1)));
                    }
                }
            }
            for i in 0..n - 1 {
                let mut a = vec![int(0); n];
                a[i + 1] = int(1);
                a[i] = int(-1);
                sys.push(Ineq::ge(a, int(0)));
            }
            assert!(fm_feasible(sys, n), "{:?}", g.rightmost_one_based());
        }
    }
}

#[test]
fn enumeration_is_lexicographic_with_complete_last() {
    for n in 2..=7 {
        let all = enumerate_connected(n).unwrap();
        assert!(all.windows(2).all(|w| w[0].rightmost() < w[1].rightmost()));
        assert_eq!(all.last().unwrap(), &OrderedUIGraph::complete(n));
        assert_eq!(all.first().unwrap(), &OrderedUIGraph::path(n));
    }
}

#[test]
fn oversized_enumeration_is_refused() {
    assert!(enumerate_connected(15).is_err());
}

proptest! {
    #[test]
    fn connected_influence_graphs_are_enumerated(gaps in prop::collection::vec(0i64..=4, 1..7)) {
        let mut x = vec![int(0)];
        for g in gaps {
            let next = x.last().unwrap() + frac(g, 4);
            x.push(next);
        }
        let p = OpinionProfile::new(x).unwrap();
        let g = influence_graph(&p);
        prop_assert!(g.is_connected());
        prop_assert!(enumerate_connected(p.len()).unwrap().contains(&g));
        let r = g.rightmost_one_based();
        prop_assert_eq!(OrderedUIGraph::from_rightmost_one_based(&r).unwrap(), g);
    }
}
