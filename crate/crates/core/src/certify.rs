//! Machine checks for two quantitative claims about HK dynamics:
//!
//! * the inequality chains bounding the four representative agents of the
//!   linear lower-bound construction during its first floor(k/3) steps, and
//! * the closed form for the convergence time of the equidistant profile.
//!
//! All comparisons are exact.

use std::fmt;

use rayon::prelude::*;

use crate::configs::{self, LowerBoundParams};
use crate::dynamics::{self, neighbor_interval, weight_at, OpinionProfile, TerminationStatus};
use crate::error::{HkError, Result};
use crate::rational::{self, frac, int, Rational};

/// Which indexing of the linear term a_t to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaVariant {
    /// a_t = t + 1, as stated.
    AsPrinted,
    /// a_t = t, the indexing under which the base case holds.
    Shifted,
}

impl LemmaVariant {
    pub fn a(&self, t: usize) -> i64 {
        match self {
            LemmaVariant::AsPrinted => t as i64 + 1,
            LemmaVariant::Shifted => t as i64,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LemmaVariant::AsPrinted => "as-printed",
            LemmaVariant::Shifted => "shifted",
        }
    }
}

impl std::str::FromStr for LemmaVariant {
    type Err = HkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-printed" | "printed" => Ok(LemmaVariant::AsPrinted),
            "shifted" => Ok(LemmaVariant::Shifted),
            other => Err(HkError::InvalidParameter(format!("unknown lemma variant {other:?}"))),
        }
    }
}

/// b_t = (t+1)(t+2)/2.
pub fn lemma_b(t: usize) -> i64 {
    let t = t as i64;
    (t + 1) * (t + 2) / 2
}

/// c_t = t.
pub fn lemma_c(t: usize) -> i64 {
    t as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// value <= bound
    AtMost,
    /// value >= bound
    AtLeast,
    /// value == bound
    Equals,
}

impl Relation {
    fn holds(&self, value: &Rational, bound: &Rational) -> bool {
        match self {
            Relation::AtMost => value <= bound,
            Relation::AtLeast => value >= bound,
            Relation::Equals => value == bound,
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Equals => "==",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckValue {
    Number {
        relation: Relation,
        bound: Rational,
        value: Rational,
    },
    /// 1-based closed index ranges.
    Interval {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    Count {
        expected: usize,
        actual: usize,
    },
}

impl fmt::Display for CheckValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckValue::Number { relation, bound, value } => write!(f, "{value} {} {bound}", relation.symbol()),
            CheckValue::Interval { expected, actual } => {
                write!(f, "{}..{} (expected {}..{})", actual.0, actual.1, expected.0, expected.1)
            }
            CheckValue::Count { expected, actual } => write!(f, "{actual} (expected {expected})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaCheck {
    pub t: usize,
    pub name: String,
    pub value: CheckValue,
    pub pass: bool,
    /// Evaluated and reported, but excluded from the verdict.
    pub informational: bool,
}

impl LemmaCheck {
    fn number(t: usize, name: &str, value: Rational, relation: Relation, bound: Rational) -> Self {
        let pass = relation.holds(&value, &bound);
        Self { t, name: name.into(), value: CheckValue::Number { relation, bound, value }, pass, informational: false }
    }

    fn csv_cells(&self) -> (String, String, String) {
        match &self.value {
            CheckValue::Number { relation, bound, value } => {
                (relation.symbol().into(), rational::format(bound), rational::format(value))
            }
            CheckValue::Interval { expected, actual } => {
                ("==".into(), format!("{}..{}", expected.0, expected.1), format!("{}..{}", actual.0, actual.1))
            }
            CheckValue::Count { expected, actual } => ("==".into(), expected.to_string(), actual.to_string()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub k: usize,
    pub variant: LemmaVariant,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    /// Last time step covered, floor(k/3).
    pub fn horizon(&self) -> usize {
        self.k / 3
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass || c.informational)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(|c| !c.pass && !c.informational)
    }

    pub fn informational_failures(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(|c| !c.pass && c.informational)
    }

    /// Verdict failures at t = 0.
    pub fn base_case_failures(&self) -> Vec<&LemmaCheck> {
        self.failures().filter(|c| c.t == 0).collect()
    }

    pub fn check(&self, t: usize, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.t == t && c.name == name)
    }

    /// `k,t,variant,check,relation,bound,value,result`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,t,variant,check,relation,bound,value,result\n");
        for c in &self.checks {
            let (rel, bound, value) = c.csv_cells();
            let result = match (c.pass, c.informational) {
                (true, _) => "pass",
                (false, false) => "FAIL",
                (false, true) => "fail-info",
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                self.k,
                c.t,
                self.variant.name(),
                c.name,
                rel,
                bound,
                value,
                result
            ));
        }
        out
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let total = self.checks.iter().filter(|c| !c.informational).count();
        let failed = self.failures().count();
        write!(
            f,
            "k={} variant={} t=0..={}: {} ({}/{} checks pass)",
            self.k,
            self.variant.name(),
            self.horizon(),
            if self.passed() { "PASS" } else { "FAIL" },
            total - failed,
            total
        )?;
        let base = self.base_case_failures();
        if !base.is_empty() {
            let names: Vec<&str> = base.iter().map(|c| c.name.as_str()).collect();
            write!(f, "; base case fails: {}", names.join(" "))?;
        }
        let info = self.informational_failures().count();
        if info > 0 {
            write!(f, "; literal chain iv fails {info} time(s) (informational)")?;
        }
        Ok(())
    }
}

/// Simulates the lower-bound configuration for floor(k/3) steps and checks,
/// at every step, the four inequality chains, the neighbor sets of the four
/// representative agents, the cluster weights and the mirror symmetry.
///
/// Chain iv is judged in its mirrored form
/// `0 <= x_j4 - 1 - 1/k + a_t/k^2 <= b_t/k^3`, which is chain i reflected
/// through x -> 1 - x. The literal form with `+1/k - a_t/k^2` is emitted as
/// `iv-literal.*` and marked informational.
pub fn verify_lemma(k: usize, variant: LemmaVariant) -> Result<LemmaReport> {
    let params = LowerBoundParams::new(k)?;
    let n = params.n();
    let [j1, j2, j3, j4] = params.representatives().map(|j| j - 1);
    let kk = k as i64;
    let k2 = kk * kk;
    let k3 = k2 * kk;
    let inv_k = frac(1, kk);
    let one = int(1);
    let zero = int(0);

    let mut checks = Vec::new();
    let mut x = configs::lower_bound_config(params);
    for t in 0..=k / 3 {
        let a = frac(variant.a(t), k2);
        let b = frac(lemma_b(t), k3);
        let c = frac(lemma_c(t), k2);
        let xs = x.opinions();

        let e1 = &xs[j1] + &inv_k - &a;
        checks.push(LemmaCheck::number(t, "i.lower", e1.clone(), Relation::AtLeast, -b.clone()));
        checks.push(LemmaCheck::number(t, "i.upper", e1, Relation::AtMost, zero.clone()));
        checks.push(LemmaCheck::number(t, "ii.lower", xs[j2].clone(), Relation::AtLeast, zero.clone()));
        checks.push(LemmaCheck::number(t, "ii.upper", xs[j2].clone(), Relation::AtMost, c.clone()));
        checks.push(LemmaCheck::number(t, "iii.lower", xs[j3].clone(), Relation::AtLeast, &one - &c));
        checks.push(LemmaCheck::number(t, "iii.upper", xs[j3].clone(), Relation::AtMost, one.clone()));
        let e4 = &xs[j4] - &one - &inv_k + &a;
        checks.push(LemmaCheck::number(t, "iv.lower", e4.clone(), Relation::AtLeast, zero.clone()));
        checks.push(LemmaCheck::number(t, "iv.upper", e4, Relation::AtMost, b.clone()));
        let literal = &xs[j4] - &one + &inv_k - &a;
        for mut check in [
            LemmaCheck::number(t, "iv-literal.lower", literal.clone(), Relation::AtLeast, zero.clone()),
            LemmaCheck::number(t, "iv-literal.upper", literal, Relation::AtMost, b.clone()),
        ] {
            check.informational = true;
            checks.push(check);
        }

        let expected =
            [("N_j1", j1, (0, j2)), ("N_j2", j2, (0, j3)), ("N_j3", j3, (j2, n - 1)), ("N_j4", j4, (j3, n - 1))];
        for (name, agent, (l, r)) in expected {
            let actual = neighbor_interval(&x, agent)?;
            checks.push(LemmaCheck {
                t,
                name: name.into(),
                value: CheckValue::Interval { expected: (l + 1, r + 1), actual: (actual.0 + 1, actual.1 + 1) },
                pass: actual == (l, r),
                informational: false,
            });
        }
        for (name, agent) in [("weight_j1", j1), ("weight_j4", j4)] {
            let actual = weight_at(&x, agent)?;
            checks.push(LemmaCheck {
                t,
                name: name.into(),
                value: CheckValue::Count { expected: k, actual },
                pass: actual == k,
                informational: false,
            });
        }

        checks.push(LemmaCheck::number(t, "sym.j2+j3", &xs[j2] + &xs[j3], Relation::Equals, one.clone()));
        let mirror = (0..n).all(|i| &xs[i] + &xs[n - 1 - i] == one);
        checks.push(LemmaCheck {
            t,
            name: "sym.mirror".into(),
            value: CheckValue::Count {
                expected: n,
                actual: (0..n).filter(|&i| &xs[i] + &xs[n - 1 - i] == one).count(),
            },
            pass: mirror,
            informational: false,
        });

        x = dynamics::step(&x);
    }
    Ok(LemmaReport { k, variant, checks })
}

/// Integer-valued trigonometric correction of the closed form, indexed by
/// (n - 1) mod 6: (sqrt(3) sin(2π(n-1)/3) - cos(π(n-1)/3) - (-1)^n) / 3.
const FORMULA_CORRECTION: [i64; 6] = [0, 0, 0, 0, 1, -1];

pub fn formula_correction(n: usize) -> i64 {
    FORMULA_CORRECTION[(n - 1) % 6]
}

/// Closed-form convergence time of the equidistant profile,
/// 1 + 5 floor((n+2)/6) + correction(n), evaluated without floating point.
pub fn equidistant_formula(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(HkError::InvalidParameter("formula defined for n >= 2".into()));
    }
    let v = 1 + 5 * ((n as i64 + 2) / 6) + formula_correction(n);
    Ok(v as usize)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquidistantRow {
    pub n: usize,
    /// `None` when the step cap was hit.
    pub simulated: Option<usize>,
    pub formula: usize,
    pub outcome: TerminationStatus,
    pub clusters: usize,
}

impl EquidistantRow {
    pub fn matches(&self) -> bool {
        self.simulated == Some(self.formula)
    }

    /// Simulated convergence time over n.
    pub fn ratio(&self) -> Option<Rational> {
        self.simulated.map(|t| frac(t as i64, self.n as i64))
    }
}

/// Simulated convergence time versus the closed form for n in `lo..=hi`.
pub fn equidistant_report(lo: usize, hi: usize) -> Result<Vec<EquidistantRow>> {
    if lo < 2 || lo > hi {
        return Err(HkError::InvalidParameter(format!("need 2 <= from <= to, got {lo}..{hi}")));
    }
    (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let p = configs::equidistant(n)?;
            let traj = dynamics::simulate(&p, dynamics::default_cap(n))?;
            Ok(EquidistantRow {
                n,
                simulated: traj.fixed_point,
                formula: equidistant_formula(n)?,
                outcome: traj.termination(),
                clusters: traj.final_profile().cluster_count(),
            })
        })
        .collect()
}

/// `n,simulated,formula,match,ratio,outcome,clusters`; a capped run shows
/// `cap` in the simulated column.
pub fn equidistant_csv(rows: &[EquidistantRow]) -> String {
    let mut out = String::from("n,simulated,formula,match,ratio,outcome,clusters\n");
    for r in rows {
        let sim = r.simulated.map_or("cap".to_string(), |t| t.to_string());
        let ratio = r.ratio().map_or(String::new(), |q| rational::format(&q));
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            sim,
            r.formula,
            if r.matches() { "match" } else { "mismatch" },
            ratio,
            r.outcome,
            r.clusters
        ));
    }
    out
}

/// Profile helper for reports: the state of the lower-bound run at time t.
pub fn lower_bound_state(k: usize, t: usize) -> Result<OpinionProfile> {
    let mut x = configs::lower_bound_config(LowerBoundParams::new(k)?);
    for _ in 0..t {
        x = dynamics::step(&x);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_case_k4() {
        let shifted = verify_lemma(4, LemmaVariant::Shifted).unwrap();
        for name in ["ii.lower", "ii.upper", "iii.lower", "iii.upper", "i.lower", "i.upper"] {
            assert!(shifted.check(0, name).unwrap().pass, "{name}");
        }
        let CheckValue::Number { bound, value, .. } = &shifted.check(0, "i.lower").unwrap().value else { panic!() };
        assert_eq!(value, &int(0));
        assert_eq!(bound, &frac(-1, 64));
    }

    #[test]
    fn printed_indexing_fails_base_case() {
        let printed = verify_lemma(4, LemmaVariant::AsPrinted).unwrap();
        let base: Vec<&str> = printed.base_case_failures().iter().map(|c| c.name.as_str()).collect();
        assert!(base.contains(&"i.lower"));
        assert!(!printed.passed());
        // -1/k^2 against -1/k^3
        let CheckValue::Number { value, .. } = &printed.check(0, "i.lower").unwrap().value else { panic!() };
        assert_eq!(value, &frac(-1, 16));
    }

    #[test]
    fn literal_chain_iv_is_informational() {
        let r = verify_lemma(5, LemmaVariant::Shifted).unwrap();
        assert!(r.passed());
        assert!(r.informational_failures().count() > 0);
        assert!(r.to_string().contains("informational"));
    }

    #[test]
    fn report_covers_all_steps() {
        for k in [4, 9, 12] {
            let r = verify_lemma(k, LemmaVariant::Shifted).unwrap();
            let ts: std::collections::BTreeSet<usize> = r.checks.iter().map(|c| c.t).collect();
            assert_eq!(ts, (0..=k / 3).collect());
        }
        assert!(verify_lemma(3, LemmaVariant::Shifted).is_err());
    }

    #[test]
    fn csv_shape() {
        let csv = verify_lemma(4, LemmaVariant::Shifted).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,t,variant,check,relation,bound,value,result"));
        assert!(csv.contains("4,0,shifted,i.lower,>=,-1/64,0,pass"));
        assert!(csv.contains("4,0,shifted,N_j2,==,1..6,1..6,pass"));
    }

    #[test]
    fn formula_values() {
        assert_eq!(equidistant_formula(2).unwrap(), 1);
        assert_eq!(equidistant_formula(8).unwrap(), 6);
        for n in 2..200 {
            assert_eq!(equidistant_formula(n + 6).unwrap(), equidistant_formula(n).unwrap() + 5);
        }
        assert!(equidistant_formula(1).is_err());
    }

    #[test]
    fn correction_is_periodic_and_small() {
        for n in 1..=60 {
            assert_eq!(formula_correction(n), formula_correction(n + 6));
            assert!((-1..=1).contains(&formula_correction(n)));
        }
    }

    #[test]
    fn report_rows() {
        let rows = equidistant_report(2, 8).unwrap();
        assert_eq!(rows.len(), 7);
        assert_eq!(rows[0].simulated, Some(1));
        assert!(rows[0].matches());
        assert!(matches!(rows[4].outcome, TerminationStatus::Split(_)));
        assert_eq!(rows[4].clusters, 2);
        let csv = equidistant_csv(&rows);
        assert!(csv.starts_with("n,simulated,formula,match,ratio,outcome,clusters\n2,1,1,match,1/2,Consensus(1),1\n"));
        assert!(equidistant_report(1, 3).is_err());
        assert!(equidistant_report(5, 4).is_err());
    }
}
