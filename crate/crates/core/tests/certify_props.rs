use hk_exact::certify::{
    equidistant_csv, equidistant_formula, equidistant_report, formula_correction, lower_bound_state, verify_lemma,
    LemmaVariant,
};
use hk_exact::configs::{lower_bound_config, LowerBoundParams};
use hk_exact::dynamics::simulate;
use hk_exact::rational::{frac, int, Rational};
use num_traits::Zero;
use std::ops::{Add, Mul};

/// a + b sqrt(3).
#[derive(Clone, Debug, PartialEq)]
struct Q3(Rational, Rational);

impl Add for Q3 {
    type Output = Q3;
    fn add(self, o: Q3) -> Q3 {
        Q3(self.0 + o.0, self.1 + o.1)
    }
}

impl Mul for Q3 {
    type Output = Q3;
    fn mul(self, o: Q3) -> Q3 {
        Q3(&self.0 * &o.0 + int(3) * &self.1 * &o.1, &self.0 * &o.1 + &self.1 * &o.0)
    }
}

/// (re, im) of exp(i pi m / 3), by repeated multiplication.
fn sixth_root_power(m: usize) -> (Q3, Q3) {
    let (c, s) = (Q3(frac(1, 2), int(0)), Q3(int(0), frac(1, 2)));
    let mut re = Q3(int(1), int(0));
    let mut im = Q3(int(0), int(0));
    for _ in 0..m {
        let nre = re.clone() * c.clone() + Q3(-int(1), int(0)) * im.clone() * s.clone();
        let nim = re * s.clone() + im * c.clone();
        re = nre;
        im = nim;
    }
    (re, im)
}

fn correction_oracle(n: usize) -> Rational {
    let m = n - 1;
    let sin_2pi = sixth_root_power(2 * m).1;
    let cos_pi = sixth_root_power(m).0;
    let sign = if n.is_multiple_of(2) { int(1) } else { int(-1) };
    let total = Q3(int(0), int(1)) * sin_2pi + Q3(-cos_pi.0, -cos_pi.1) + Q3(-sign, int(0));
    assert!(total.1.is_zero(), "sqrt(3) part must cancel");
    total.0 / int(3)
}

#[test]
fn correction_lookup_matches_exact_trigonometry() {
    for n in 2..=200 {
        assert_eq!(int(formula_correction(n)), correction_oracle(n), "n={n}");
    }
    assert_eq!(equidistant_formula(2).unwrap(), 1);
    assert!(equidistant_formula(1).is_err());
}

#[test]
fn equidistant_report_goldens() {
    // Simulated values frozen from an independent Fraction-based run.
    let simulated =
        [1, 2, 5, 6, 6, 6, 6, 7, 10, 11, 11, 11, 11, 12, 15, 16, 16, 16, 16, 17, 20, 21, 21, 21, 21, 22, 25, 26];
    let formula =
        [1, 1, 6, 7, 5, 6, 6, 6, 11, 12, 10, 11, 11, 11, 16, 17, 15, 16, 16, 16, 21, 22, 20, 21, 21, 21, 26, 27];
    let rows = equidistant_report(2, 29).unwrap();
    assert_eq!(rows.len(), 28);
    for (row, (&s, &f)) in rows.iter().zip(simulated.iter().zip(&formula)) {
        assert_eq!(row.simulated, Some(s), "n={}", row.n);
        assert_eq!(row.formula, f, "n={}", row.n);
        assert_eq!(row.matches(), s == f);
    }
    let csv = equidistant_csv(&rows);
    assert_eq!(csv.lines().count(), 29);
    assert!(csv.starts_with("n,simulated,formula,match,ratio,outcome,clusters\n"));
}

#[test]
fn shifted_lemma_holds() {
    for k in 4..=20 {
        let report = verify_lemma(k, LemmaVariant::Shifted).unwrap();
        let bad: Vec<_> = report.failures().map(|c| format!("t={} {}", c.t, c.name)).collect();
        assert!(report.passed(), "k={k}: {bad:?}");
        assert_eq!(report.horizon(), k / 3);
    }
}

#[test]
fn printed_lemma_fails_its_base_case() {
    for k in 4..=12 {
        let report = verify_lemma(k, LemmaVariant::AsPrinted).unwrap();
        assert!(!report.passed());
        let base: Vec<_> = report.base_case_failures().iter().map(|c| c.name.clone()).collect();
        assert!(base.contains(&"i.lower".to_string()), "k={k}: {base:?}");
    }
}

#[test]
fn literal_fourth_chain_is_informational() {
    let report = verify_lemma(9, LemmaVariant::Shifted).unwrap();
    assert!(report.passed());
    assert!(report.informational_failures().count() > 0);
    assert!(report.informational_failures().all(|c| c.name.starts_with("iv-literal")));
}

#[test]
fn lemma_states_follow_the_dynamics() {
    for k in [4, 7, 12] {
        let traj = simulate(&lower_bound_config(LowerBoundParams::new(k).unwrap()), 20).unwrap();
        for t in 0..=k / 3 {
            assert_eq!(&lower_bound_state(k, t).unwrap(), &traj.profiles[t]);
        }
    }
}

#[test]
fn lemma_csv_has_one_row_per_check() {
    let report = verify_lemma(6, LemmaVariant::Shifted).unwrap();
    let csv = report.to_csv();
    assert_eq!(csv.lines().count(), report.checks.len() + 1);
    assert!(csv.starts_with("k,t,variant,check,relation,bound,value,result\n"));
}
