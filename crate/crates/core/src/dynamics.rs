//! Exact Hegselmann-Krause dynamics on the real line.
//!
//! Agent `i` moves to the mean of all opinions within distance 1 of its own
//! (itself included). Since profiles are sorted, every neighbor set is a
//! contiguous index range, so each step is a sliding-window average.

use std::fmt;

use log::warn;
use num_traits::Zero;

use crate::error::{HkError, Result};
use crate::graphs::OrderedUIGraph;
use crate::rational::{int, Rational};

/// A non-decreasing sequence of exact opinions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpinionProfile {
    opinions: Vec<Rational>,
}

impl OpinionProfile {
    /// Accepts sorted input only.
    pub fn new(opinions: Vec<Rational>) -> Result<Self> {
        if opinions.is_empty() {
            return Err(HkError::EmptyProfile);
        }
        if opinions.windows(2).any(|w| w[0] > w[1]) {
            return Err(HkError::InvalidParameter("opinions must be non-decreasing".into()));
        }
        Ok(Self { opinions })
    }

    /// Sorts unsorted input (with a warning) instead of rejecting it.
    pub fn from_unsorted(mut opinions: Vec<Rational>) -> Result<Self> {
        if opinions.is_empty() {
            return Err(HkError::EmptyProfile);
        }
        if opinions.windows(2).any(|w| w[0] > w[1]) {
            warn!("opinion profile was not sorted; relabeling agents in opinion order");
            opinions.sort();
        }
        Ok(Self { opinions })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| int(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.opinions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opinions.is_empty()
    }

    pub fn opinions(&self) -> &[Rational] {
        &self.opinions
    }

    pub fn into_opinions(self) -> Vec<Rational> {
        self.opinions
    }

    pub fn get(&self, i: usize) -> Result<&Rational> {
        self.opinions.get(i).ok_or(HkError::IndexOutOfRange { index: i, n: self.len() })
    }

    /// Gaps `x[i+1] - x[i]`.
    pub fn gaps(&self) -> impl Iterator<Item = Rational> + '_ {
        self.opinions.windows(2).map(|w| &w[1] - &w[0])
    }

    pub fn has_split(&self) -> bool {
        let one = int(1);
        self.gaps().any(|g| g > one)
    }

    pub fn is_consensus(&self) -> bool {
        self.opinions.first() == self.opinions.last()
    }

    /// Number of distinct opinion values.
    pub fn cluster_count(&self) -> usize {
        1 + self.opinions.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Translate every opinion by `delta`.
    pub fn shifted(&self, delta: &Rational) -> Self {
        Self { opinions: self.opinions.iter().map(|x| x + delta).collect() }
    }
}

impl fmt::Display for OpinionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.opinions.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Closed neighbor set of agent `i` (0-based) as an inclusive index range.
pub fn neighbor_interval(p: &OpinionProfile, i: usize) -> Result<(usize, usize)> {
    let xi = p.get(i)?;
    let one = int(1);
    let x = p.opinions();
    let l = x[..i].partition_point(|xj| xi - xj > one);
    let r = i + x[i..].partition_point(|xj| xj - xi <= one) - 1;
    Ok((l, r))
}

/// One synchronous HK update.
pub fn step(p: &OpinionProfile) -> OpinionProfile {
    let x = p.opinions();
    let n = x.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(Rational::zero());
    for v in x {
        let next = prefix.last().unwrap() + v;
        prefix.push(next);
    }
    let g = influence_graph(p);
    let opinions = (0..n)
        .map(|i| {
            let (l, r) = g.neighborhood(i);
            (&prefix[r + 1] - &prefix[l]) / int((r + 1 - l) as i64)
        })
        .collect();
    OpinionProfile { opinions }
}

/// Influence graph: edge {i, j} iff |x_i - x_j| <= 1. May be disconnected.
pub fn influence_graph(p: &OpinionProfile) -> OrderedUIGraph {
    let x = p.opinions();
    let one = int(1);
    let mut r = Vec::with_capacity(x.len());
    let mut j = 0;
    for (i, xi) in x.iter().enumerate() {
        j = j.max(i);
        while j + 1 < x.len() && &x[j + 1] - xi <= one {
            j += 1;
        }
        r.push(j);
    }
    OrderedUIGraph::from_rightmost_unchecked(r)
}

/// Number of agents sharing agent `i`'s opinion exactly.
pub fn weight_at(p: &OpinionProfile, i: usize) -> Result<usize> {
    let xi = p.get(i)?;
    Ok(p.opinions().iter().filter(|x| *x == xi).count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminationStatus {
    /// Agent 1 carries weight n at this time.
    Consensus(usize),
    /// Some consecutive gap exceeds 1 at this time (consensus is impossible).
    Split(usize),
    /// `step(profiles[T]) == profiles[T]`, reached without consensus or split.
    FixedPoint(usize),
    CapExceeded,
}

impl fmt::Display for TerminationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TerminationStatus::Consensus(t) => write!(f, "Consensus({t})"),
            TerminationStatus::Split(t) => write!(f, "Split({t})"),
            TerminationStatus::FixedPoint(t) => write!(f, "FixedPoint({t})"),
            TerminationStatus::CapExceeded => write!(f, "CapExceeded"),
        }
    }
}

/// Recorded run of the dynamics.
///
/// `profiles[t]` is the state at time `t` and `graphs[t]` its influence graph.
/// When `fixed_point` is `Some(T)`, the last profile is `profiles[T]` and one
/// more step reproduces it exactly.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub profiles: Vec<OpinionProfile>,
    pub graphs: Vec<OrderedUIGraph>,
    pub consensus_at: Option<usize>,
    pub split_at: Option<usize>,
    pub fixed_point: Option<usize>,
    pub cap: usize,
}

impl Trajectory {
    /// Headline outcome: consensus, else split, else fixed point or cap.
    pub fn termination(&self) -> TerminationStatus {
        if let Some(t) = self.consensus_at {
            TerminationStatus::Consensus(t)
        } else if let Some(t) = self.split_at {
            TerminationStatus::Split(t)
        } else if let Some(t) = self.fixed_point {
            TerminationStatus::FixedPoint(t)
        } else {
            TerminationStatus::CapExceeded
        }
    }

    /// All statuses that apply to this run.
    pub fn statuses(&self) -> Vec<TerminationStatus> {
        let mut out = Vec::new();
        if let Some(t) = self.fixed_point {
            out.push(TerminationStatus::FixedPoint(t));
        } else {
            out.push(TerminationStatus::CapExceeded);
        }
        if let Some(t) = self.consensus_at {
            out.push(TerminationStatus::Consensus(t));
        }
        if let Some(t) = self.split_at {
            out.push(TerminationStatus::Split(t));
        }
        out
    }

    pub fn final_profile(&self) -> &OpinionProfile {
        self.profiles.last().expect("trajectory holds the initial profile")
    }

    /// Earliest time of consensus or split.
    pub fn consensus_or_split(&self) -> Option<usize> {
        match (self.consensus_at, self.split_at) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

pub fn default_cap(n: usize) -> usize {
    n.pow(3) + 100
}

/// Iterates [`step`] until an exact fixed point or `cap` steps.
pub fn simulate(p: &OpinionProfile, cap: usize) -> Result<Trajectory> {
    if cap == 0 {
        return Err(HkError::InvalidParameter("step cap must be at least 1".into()));
    }
    let mut traj = Trajectory {
        profiles: vec![p.clone()],
        graphs: vec![influence_graph(p)],
        consensus_at: None,
        split_at: None,
        fixed_point: None,
        cap,
    };
    for t in 0..=cap {
        let cur = &traj.profiles[t];
        if traj.consensus_at.is_none() && cur.is_consensus() {
            traj.consensus_at = Some(t);
        }
        if traj.split_at.is_none() && cur.has_split() {
            traj.split_at = Some(t);
        }
        if t == cap {
            break;
        }
        let next = step(cur);
        if &next == cur {
            traj.fixed_point = Some(t);
            break;
        }
        traj.graphs.push(influence_graph(&next));
        traj.profiles.push(next);
    }
    Ok(traj)
}

/// Earliest time at which consensus holds or some consecutive gap exceeds 1.
pub fn f_of(p: &OpinionProfile, cap: usize) -> Result<usize> {
    let mut cur = p.clone();
    for t in 0..=cap {
        if cur.is_consensus() || cur.has_split() {
            return Ok(t);
        }
        let next = step(&cur);
        if next == cur {
            // Frozen without consensus or split: impossible for HK, where a
            // connected non-consensus profile always moves.
            break;
        }
        cur = next;
    }
    Err(HkError::CapReached { cap, what: "consensus or split" })
}

/// Smallest T with `x(t+1) = x(t)` for all t >= T.
pub fn convergence_time(p: &OpinionProfile, cap: usize) -> Result<usize> {
    let traj = simulate(p, cap)?;
    traj.fixed_point.ok_or(HkError::CapReached { cap, what: "a fixed point" })
}

/// Trajectory as CSV: `t,agent,numerator,denominator` (agent 1-based), then a
/// `# termination,...` footer listing the run end (fixed point or cap) followed
/// by the consensus and split times that occurred. `approx` appends a decimal
/// column for plotting.
pub fn trajectory_csv(traj: &Trajectory, approx: bool) -> String {
    let mut out = String::from("t,agent,numerator,denominator");
    if approx {
        out.push_str(",approx");
    }
    out.push('\n');
    for (t, p) in traj.profiles.iter().enumerate() {
        for (i, x) in p.opinions().iter().enumerate() {
            out.push_str(&format!("{t},{},{},{}", i + 1, x.numer(), x.denom()));
            if approx {
                out.push_str(&format!(",{}", crate::rational::approx(x)));
            }
            out.push('\n');
        }
    }
    let statuses: Vec<String> = traj.statuses().iter().map(|s| s.to_string()).collect();
    out.push_str(&format!("# termination,{}\n", statuses.join(",")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn prof(v: &[(i64, i64)]) -> OpinionProfile {
        OpinionProfile::new(v.iter().map(|&(p, q)| frac(p, q)).collect()).unwrap()
    }

    #[test]
    fn neighbor_intervals() {
        let p = OpinionProfile::from_integers(&[1, 2, 3]).unwrap();
        assert_eq!(neighbor_interval(&p, 1).unwrap(), (0, 2));
        let q = prof(&[(0, 1), (3, 2)]);
        assert_eq!(neighbor_interval(&q, 0).unwrap(), (0, 0));
        let lb = prof(&[(-1, 4), (-1, 4), (-1, 4), (-1, 4), (0, 1), (1, 1), (5, 4), (5, 4), (5, 4), (5, 4)]);
        assert_eq!(neighbor_interval(&lb, 4).unwrap(), (0, 5));
        assert!(neighbor_interval(&p, 3).is_err());
    }

    #[test]
    fn step_examples() {
        let p = OpinionProfile::from_integers(&[1, 2]).unwrap();
        assert_eq!(step(&p), prof(&[(3, 2), (3, 2)]));
        let p = OpinionProfile::from_integers(&[1, 2, 3]).unwrap();
        assert_eq!(step(&p), prof(&[(3, 2), (2, 1), (5, 2)]));
        let p = prof(&[(0, 1), (3, 2)]);
        assert_eq!(step(&p), p);
    }

    #[test]
    fn influence_graph_examples() {
        let r = |v: &[i64]| influence_graph(&OpinionProfile::from_integers(v).unwrap()).rightmost_one_based();
        assert_eq!(r(&[1, 2]), vec![2, 2]);
        assert_eq!(r(&[1, 2, 3]), vec![2, 3, 3]);
        assert_eq!(influence_graph(&prof(&[(0, 1), (3, 2)])).rightmost_one_based(), vec![1, 2]);
    }

    #[test]
    fn weights() {
        let p = prof(&[(3, 2), (3, 2)]);
        assert_eq!(weight_at(&p, 0).unwrap(), 2);
        let q = OpinionProfile::from_integers(&[1, 2, 3]).unwrap();
        assert_eq!(weight_at(&q, 1).unwrap(), 1);
        assert!(weight_at(&q, 5).is_err());
    }

    #[test]
    fn simulate_small_cases() {
        let t = simulate(&OpinionProfile::from_integers(&[1, 2]).unwrap(), 10).unwrap();
        assert_eq!(t.fixed_point, Some(1));
        assert_eq!(t.consensus_at, Some(1));
        assert_eq!(t.termination(), TerminationStatus::Consensus(1));

        let t = simulate(&prof(&[(0, 1), (3, 2)]), 10).unwrap();
        assert_eq!(t.fixed_point, Some(0));
        assert_eq!(t.split_at, Some(0));
        assert_eq!(t.termination(), TerminationStatus::Split(0));

        let t = simulate(&OpinionProfile::from_integers(&[1, 2, 3, 4]).unwrap(), 1).unwrap();
        assert_eq!(t.termination(), TerminationStatus::CapExceeded);
        assert!(simulate(&OpinionProfile::from_integers(&[1]).unwrap(), 0).is_err());
    }

    #[test]
    fn f_and_convergence() {
        let single = OpinionProfile::new(vec![frac(7, 3)]).unwrap();
        assert_eq!(f_of(&single, 10).unwrap(), 0);
        let pair = OpinionProfile::from_integers(&[1, 2]).unwrap();
        assert_eq!(f_of(&pair, 10).unwrap(), 1);
        assert_eq!(convergence_time(&pair, 10).unwrap(), 1);
        let apart = OpinionProfile::from_integers(&[0, 2, 4, 7]).unwrap();
        assert_eq!(convergence_time(&apart, 10).unwrap(), 0);
        let four = OpinionProfile::from_integers(&[1, 2, 3, 4]).unwrap();
        assert!(f_of(&four, 2).is_err());
    }

    #[test]
    fn unsorted_input_is_sorted() {
        let p = OpinionProfile::from_unsorted(vec![int(3), int(1), int(2)]).unwrap();
        assert_eq!(p, OpinionProfile::from_integers(&[1, 2, 3]).unwrap());
        assert!(OpinionProfile::new(vec![int(3), int(1)]).is_err());
        assert!(OpinionProfile::new(vec![]).is_err());
    }

    #[test]
    fn csv_footer() {
        let t = simulate(&OpinionProfile::from_integers(&[1, 2]).unwrap(), 10).unwrap();
        let csv = trajectory_csv(&t, false);
        assert!(csv.starts_with("t,agent,numerator,denominator\n0,1,1,1\n"));
        assert!(csv.contains("1,2,3,2\n"));
        assert!(csv.trim_end().ends_with("# termination,FixedPoint(1),Consensus(1)"));
    }
}
