mod common;

use hk_exact::configs::{equidistant, lower_bound_config, LowerBoundParams};
use hk_exact::dynamics::{
    self, convergence_time, f_of, influence_graph, simulate, step, OpinionProfile, TerminationStatus,
};
use hk_exact::rational::{frac, int, Rational};
use proptest::prelude::*;

fn profile_strategy() -> impl Strategy<Value = OpinionProfile> {
    // Values on a 1/q grid in [0, n].
    (1usize..=12, 1i64..=8).prop_flat_map(|(n, q)| {
        prop::collection::vec(0..=(n as i64 * q), n).prop_map(move |mut v| {
            v.sort();
            OpinionProfile::new(v.into_iter().map(|p| frac(p, q)).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn step_matches_pairwise_definition(p in profile_strategy()) {
        let ours = step(&p);
        let naive = common::naive_step(p.opinions());
        prop_assert_eq!(ours.opinions(), naive.as_slice());
    }

    #[test]
    fn order_is_preserved(p in profile_strategy()) {
        let traj = simulate(&p, 40).unwrap();
        for prof in &traj.profiles {
            prop_assert!(prof.opinions().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn splits_are_permanent(p in profile_strategy()) {
        let traj = simulate(&p, 40).unwrap();
        let one = int(1);
        for t in 0..traj.profiles.len() {
            for (i, g) in traj.profiles[t].gaps().enumerate() {
                if g > one {
                    for later in &traj.profiles[t..] {
                        prop_assert!(&later.opinions()[i + 1] - &later.opinions()[i] > one);
                    }
                }
            }
        }
    }

    #[test]
    fn fixed_points_are_idempotent(p in profile_strategy()) {
        let traj = simulate(&p, 200).unwrap();
        if traj.fixed_point.is_some() {
            let last = traj.final_profile();
            prop_assert_eq!(&step(last), last);
            prop_assert_eq!(&step(&step(last)), last);
        }
    }

    #[test]
    fn influence_graph_is_consistent_at_zero(p in profile_strategy()) {
        let g = influence_graph(&p);
        prop_assert!(g.consistent(p.opinions(), &int(0)).unwrap());
    }

    #[test]
    fn denominators_divide_factorial_powers(p in profile_strategy()) {
        let n = p.len() as i64;
        let q0 = p.opinions().iter().fold(num_bigint::BigInt::from(1), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
        let fact: num_bigint::BigInt = (1..=n).map(num_bigint::BigInt::from).product();
        let mut x = p.clone();
        let mut bound = q0.clone();
        for _ in 0..4 {
            x = step(&x);
            bound *= &fact;
            for v in x.opinions() {
                prop_assert!((&bound % v.denom()) == num_bigint::BigInt::from(0));
            }
        }
    }
}

#[test]
fn complete_graph_collapses_in_one_step() {
    let p = OpinionProfile::new(vec![int(0), frac(1, 3), frac(2, 3), int(1)]).unwrap();
    assert!(influence_graph(&p).is_complete());
    let next = step(&p);
    assert!(next.is_consensus());
    assert_eq!(next.opinions()[0], frac(1, 2));
}

#[test]
fn equidistant_goldens() {
    // Frozen from an independent Fraction-based re-implementation.
    let expected = [
        (2, TerminationStatus::Consensus(1), 1),
        (3, TerminationStatus::Consensus(2), 2),
        (4, TerminationStatus::Consensus(5), 5),
        (5, TerminationStatus::Consensus(6), 6),
        (6, TerminationStatus::Split(5), 6),
        (7, TerminationStatus::Split(5), 6),
        (10, TerminationStatus::Split(5), 10),
    ];
    for (n, status, conv) in expected {
        let p = equidistant(n).unwrap();
        let traj = simulate(&p, dynamics::default_cap(n)).unwrap();
        assert_eq!(traj.termination(), status, "n={n}");
        assert_eq!(convergence_time(&p, 1000).unwrap(), conv, "n={n}");
    }
    assert_eq!(f_of(&equidistant(4).unwrap(), 100).unwrap(), 5);
    let six = simulate(&equidistant(6).unwrap(), 100).unwrap();
    assert_eq!(six.final_profile().cluster_count(), 2);
}

#[test]
fn equidistant_n4_by_hand() {
    // t=1: agents 1 and 4 see one neighbor, agents 2 and 3 see two.
    let x1 = step(&equidistant(4).unwrap());
    assert_eq!(x1.opinions(), &[frac(3, 2), int(2), int(3), frac(7, 2)]);
    // t=2: 1: (3/2+2)/2, 2: (3/2+2+3)/3, symmetric on the right.
    let x2 = step(&x1);
    assert_eq!(x2.opinions(), &[frac(7, 4), frac(13, 6), frac(17, 6), frac(13, 4)]);
}

#[test]
fn lower_bound_run_stays_mirror_symmetric() {
    let p = lower_bound_config(LowerBoundParams::new(7).unwrap());
    let traj = simulate(&p, 500).unwrap();
    let n = p.len();
    for x in &traj.profiles {
        let xs: &[Rational] = x.opinions();
        for i in 0..n {
            assert_eq!(&xs[i] + &xs[n - 1 - i], int(1));
        }
    }
}
