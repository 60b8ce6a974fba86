//! Exact feasibility search for the consensus-time program.
//!
//! Fixing the influence graphs I_0, ..., I_{t-1} makes x^t a linear image of
//! the initial profile x^0 (a product of window-averaging matrices). The
//! search walks graph sequences depth first; choosing I_t adds the
//! ε-consistency rows of I_t evaluated on that image, and a prefix is pruned
//! as soon as the exact LP over x^0 becomes infeasible. Every LP lives in n
//! dimensions no matter how deep the search goes.
//!
//! Feasible at (T, ε < 0) certifies f(n) >= T + 1; infeasible at (T, ε = 0)
//! proves f(n) <= T.
//!
//! At ε = 0 the relaxed rules accept a gap of exactly 1 as an edge and as a
//! non-edge, so that program can be feasible through trajectories the
//! dynamics never follow (n = 3, T = 2 is the smallest case). [`EdgeRule::exact`]
//! makes non-edges strict instead; the search then maximizes a margin
//! variable δ on the non-edge rows and keeps a prefix only when δ > 0, which
//! keeps every LP non-strict. Exact-rule infeasibility is the upper bound used
//! by [`f_bounds`].

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::configs;
use crate::dynamics::{self, OpinionProfile};
use crate::error::{HkError, Result};
use crate::graphs::{self, OrderedUIGraph};
use crate::lp::Dictionary;
use crate::rational::{frac, int, serde_rational, serde_rational_vec, Rational};

pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const BUDGET_ENV: &str = "HK_EXACT_BUDGET";

/// Default ε for lower-bound (strict) runs.
pub fn default_strict_eps() -> Rational {
    frac(-1, 1000)
}

/// How a graph must match a profile: edges need `gap <= 1 + ε`, non-edges
/// `gap >= 1 - ε`, or `gap > 1 - ε` when `strict_non_edges` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRule {
    pub eps: Rational,
    pub strict_non_edges: bool,
}

impl EdgeRule {
    pub fn relaxed(eps: Rational) -> Self {
        Self { eps, strict_non_edges: false }
    }

    /// The dynamics' own rule: edge iff gap <= 1.
    pub fn exact() -> Self {
        Self { eps: Rational::zero(), strict_non_edges: true }
    }

    /// True when every profile satisfying the rule has exactly the given
    /// graph as its influence graph.
    pub fn pins_dynamics(&self) -> bool {
        self.eps.is_negative() || (self.strict_non_edges && self.eps.is_zero())
    }

    pub fn admits(&self, g: &OrderedUIGraph, p: &[Rational]) -> Result<bool> {
        g.admits(p, &self.eps, self.strict_non_edges)
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Maximum number of LP feasibility checks before giving up.
    pub budget: u64,
    /// Worker threads; 1 runs the plain sequential search.
    pub jobs: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, jobs: 1 }
    }
}

impl SearchConfig {
    /// Default config with the budget taken from `HK_EXACT_BUDGET` when set.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(b) = std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            cfg.budget = b;
        }
        cfg
    }
}

/// Initial profile plus the influence-graph sequence it realizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "serde_rational_vec")]
    pub witness: Vec<Rational>,
    /// Graphs as 1-based rightmost-neighbor sequences, one per t = 0..=T.
    #[serde(with = "graph_list")]
    pub graphs: Vec<OrderedUIGraph>,
    #[serde(with = "serde_rational")]
    pub eps: Rational,
    /// Non-edges were checked strictly (`gap > 1 - ε`).
    #[serde(default)]
    pub strict: bool,
    #[serde(rename = "T")]
    pub horizon: usize,
}

mod graph_list {
    use super::OrderedUIGraph;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(g: &[OrderedUIGraph], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(g.iter().map(|g| g.rightmost_one_based()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<OrderedUIGraph>, D::Error> {
        let raw = Vec::<Vec<usize>>::deserialize(d)?;
        raw.iter().map(|r| OrderedUIGraph::from_rightmost_one_based(r).map_err(serde::de::Error::custom)).collect()
    }
}

impl Certificate {
    pub fn n(&self) -> usize {
        self.witness.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Edge count of the final graph (the program's objective value).
    pub fn final_edge_count(&self) -> usize {
        self.graphs.last().map_or(0, |g| g.edge_count())
    }

    pub fn rule(&self) -> EdgeRule {
        EdgeRule { eps: self.eps.clone(), strict_non_edges: self.strict }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeasOutcome {
    Feasible(Certificate),
    Infeasible,
    /// Budget exhausted before the search completed.
    Undecided,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// LP feasibility checks, one per visited node of the search tree.
    pub lp_calls: u64,
    pub pivots: u64,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub outcome: FeasOutcome,
    pub stats: SearchStats,
}

/// Decides whether some profile in [0, n]^n realizes a sequence of T + 1
/// connected influence graphs, the first T of them non-complete, with the
/// ε-relaxed edge rules.
pub fn search_sequence(n: usize, horizon: usize, eps: &Rational, cfg: &SearchConfig) -> Result<SearchReport> {
    search_with_rule(n, horizon, &EdgeRule::relaxed(eps.clone()), cfg)
}

/// [`search_sequence`] under an arbitrary [`EdgeRule`].
pub fn search_with_rule(n: usize, horizon: usize, rule: &EdgeRule, cfg: &SearchConfig) -> Result<SearchReport> {
    if n < 2 {
        return Err(HkError::InvalidParameter("search needs n >= 2".into()));
    }
    if horizon < 1 {
        return Err(HkError::InvalidParameter("search needs T >= 1".into()));
    }
    let modes = graphs::enumerate_connected(n)?;
    let search = Search::new(n, horizon, rule, modes, cfg.budget);
    let root = search.root();
    let outcome = if cfg.jobs <= 1 {
        let mut seq = Vec::with_capacity(horizon + 1);
        search.dfs(0, &root, &mut seq, usize::MAX)
    } else {
        search.parallel(&root, cfg.jobs)
    };
    let outcome = match outcome {
        Step::Found(seq, witness) => FeasOutcome::Feasible(Certificate {
            witness,
            graphs: seq.iter().map(|&g| search.modes[g].clone()).collect(),
            eps: rule.eps.clone(),
            strict: rule.strict_non_edges,
            horizon,
        }),
        Step::Exhausted => FeasOutcome::Infeasible,
        Step::OutOfBudget | Step::Cancelled => FeasOutcome::Undecided,
    };
    Ok(SearchReport {
        outcome,
        stats: SearchStats {
            lp_calls: search.lp_calls.load(Ordering::Relaxed),
            pivots: search.pivots.load(Ordering::Relaxed),
        },
    })
}

enum Step {
    Found(Vec<usize>, Vec<Rational>),
    Exhausted,
    OutOfBudget,
    Cancelled,
}

#[derive(Clone)]
struct Node {
    dict: Dictionary,
    /// Row i expresses x_i^t as a linear form in x^0.
    map: Vec<Vec<Rational>>,
}

struct Search {
    n: usize,
    horizon: usize,
    upper: Rational,
    lower: Rational,
    /// Margin variable δ at structural index n when non-edges are strict.
    strict: bool,
    modes: Vec<OrderedUIGraph>,
    complete: usize,
    budget: u64,
    lp_calls: AtomicU64,
    pivots: AtomicU64,
    /// Index of the leftmost top-level subtree known to be feasible.
    best_subtree: AtomicUsize,
}

impl Search {
    fn new(n: usize, horizon: usize, rule: &EdgeRule, modes: Vec<OrderedUIGraph>, budget: u64) -> Self {
        let complete = modes.iter().position(|g| g.is_complete()).expect("K_n is a mode");
        Self {
            n,
            horizon,
            upper: int(1) + &rule.eps,
            lower: int(1) - &rule.eps,
            strict: rule.strict_non_edges,
            modes,
            complete,
            budget,
            lp_calls: AtomicU64::new(0),
            pivots: AtomicU64::new(0),
            best_subtree: AtomicUsize::new(usize::MAX),
        }
    }

    fn width(&self) -> usize {
        self.n + usize::from(self.strict)
    }

    /// x^0 in [0, n]^n and sorted (plus δ <= 1 for strict rules).
    fn root(&self) -> Node {
        let n = self.n;
        let mut dict = Dictionary::new(self.width());
        let mut row = vec![Rational::zero(); self.width()];
        row[n - 1] = int(1);
        dict.add_le_row(&row, &int(n as i64));
        for i in 0..n - 1 {
            row.iter_mut().for_each(|v| v.set_zero());
            row[i] = int(1);
            row[i + 1] = int(-1);
            dict.add_le_row(&row, &Rational::zero());
        }
        if self.strict {
            row.iter_mut().for_each(|v| v.set_zero());
            row[n] = int(1);
            dict.add_le_row(&row, &int(1));
        }
        let feasible = dict.restore_feasibility();
        debug_assert!(feasible);
        let map = (0..n).map(|i| (0..n).map(|j| if i == j { int(1) } else { Rational::zero() }).collect()).collect();
        Node { dict, map }
    }

    fn mode_choices(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        let last = t == self.horizon;
        (0..self.modes.len()).filter(move |&g| last || g != self.complete)
    }

    /// Adds the consistency rows of mode `g` at the node's time step. Rows
    /// implied by a neighbor's row (given sorted opinions) are skipped.
    fn constrain(&self, node: &mut Node, g: usize) -> bool {
        let r = self.modes[g].rightmost();
        let n = self.n;
        let width = self.width();
        let diff = |a: usize, b: usize| -> Vec<Rational> {
            let mut row: Vec<Rational> = node.map[a].iter().zip(&node.map[b]).map(|(x, y)| x - y).collect();
            row.resize(width, Rational::zero());
            row
        };
        let mut rows = Vec::new();
        for i in 0..n {
            // Edge {i, r_i}: x_{r_i} - x_i <= 1 + ε.
            if r[i] > i && (i == 0 || r[i - 1] < r[i]) {
                rows.push((diff(r[i], i), true));
            }
            // Non-edge {i, r_i + 1}: x_{r_i+1} - x_i >= 1 - ε.
            if r[i] + 1 < n && r[i + 1] > r[i] {
                rows.push((diff(r[i] + 1, i), false));
            }
        }
        for (mut row, is_edge) in rows {
            if is_edge {
                node.dict.add_le_row(&row, &self.upper);
            } else {
                if self.strict {
                    // gap - δ >= 1 - ε
                    row[n] = int(-1);
                }
                node.dict.add_ge_row(&row, &self.lower);
            }
        }
        let before = node.dict.pivots();
        let mut ok = node.dict.restore_feasibility();
        if ok && self.strict {
            let mut obj = vec![Rational::zero(); width];
            obj[n] = int(1);
            let zero = Rational::zero();
            let best = node.dict.maximize(&obj, Some(&zero)).expect("δ <= 1 bounds the margin");
            ok = best.is_positive();
        }
        self.pivots.fetch_add(node.dict.pivots() - before, Ordering::Relaxed);
        ok
    }

    fn witness(&self, node: &Node) -> Vec<Rational> {
        let mut p = node.dict.point();
        p.truncate(self.n);
        p
    }

    fn advance(&self, node: &mut Node, g: usize) {
        let graph = &self.modes[g];
        let n = self.n;
        let mut prefix: Vec<Vec<Rational>> = Vec::with_capacity(n + 1);
        prefix.push(vec![Rational::zero(); n]);
        for row in &node.map {
            let next = prefix.last().unwrap().iter().zip(row).map(|(a, b)| a + b).collect();
            prefix.push(next);
        }
        node.map = (0..n)
            .map(|i| {
                let (l, r) = graph.neighborhood(i);
                let size = int((r + 1 - l) as i64);
                prefix[r + 1].iter().zip(&prefix[l]).map(|(a, b)| (a - b) / &size).collect()
            })
            .collect();
    }

    fn dfs(&self, t: usize, parent: &Node, seq: &mut Vec<usize>, subtree: usize) -> Step {
        for g in self.mode_choices(t) {
            if self.best_subtree.load(Ordering::Relaxed) < subtree {
                return Step::Cancelled;
            }
            if self.lp_calls.fetch_add(1, Ordering::Relaxed) >= self.budget {
                return Step::OutOfBudget;
            }
            let mut child = parent.clone();
            if !self.constrain(&mut child, g) {
                continue;
            }
            seq.push(g);
            if t == self.horizon {
                return Step::Found(seq.clone(), self.witness(&child));
            }
            self.advance(&mut child, g);
            match self.dfs(t + 1, &child, seq, subtree) {
                Step::Exhausted => {}
                other => return other,
            }
            seq.pop();
        }
        Step::Exhausted
    }

    /// Splits on the first graph choice; the leftmost feasible subtree wins,
    /// so the certificate matches the sequential search.
    fn parallel(&self, root: &Node, jobs: usize) -> Step {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
        let firsts: Vec<usize> = self.mode_choices(0).collect();
        let results: Vec<Step> = pool.install(|| {
            firsts
                .par_iter()
                .enumerate()
                .map(|(idx, &g)| {
                    if self.best_subtree.load(Ordering::Relaxed) < idx {
                        return Step::Cancelled;
                    }
                    if self.lp_calls.fetch_add(1, Ordering::Relaxed) >= self.budget {
                        return Step::OutOfBudget;
                    }
                    let mut child = root.clone();
                    if !self.constrain(&mut child, g) {
                        return Step::Exhausted;
                    }
                    let mut seq = vec![g];
                    self.advance(&mut child, g);
                    let step = self.dfs(1, &child, &mut seq, idx);
                    if matches!(step, Step::Found(..)) {
                        self.best_subtree.fetch_min(idx, Ordering::Relaxed);
                    }
                    step
                })
                .collect()
        });
        for step in results {
            match step {
                Step::Found(..) | Step::OutOfBudget => return step,
                // Cancelled subtrees all lie right of a feasible one.
                Step::Exhausted | Step::Cancelled => {}
            }
        }
        Step::Exhausted
    }
}

/// Result of [`replay_certificate`]; `Err` names the first divergence.
pub type ReplayVerdict = std::result::Result<(), String>;

/// Re-checks a certificate independently of the search.
///
/// The witness must be sorted and lie in [0, n]; applying the certificate's
/// graphs step by step must keep every graph consistent with the current
/// profile under the certificate's rule, with no complete graph before T.
/// When the rule pins the dynamics (ε < 0, or strict at ε = 0) the profile
/// is also run through the plain dynamics, whose influence graphs must be
/// exactly the certificate's, and the consensus-or-split time must be at
/// least T + 1.
pub fn replay_certificate(c: &Certificate) -> ReplayVerdict {
    let n = c.n();
    if n < 2 {
        return Err("witness needs at least two agents".into());
    }
    if c.graphs.len() != c.horizon + 1 {
        return Err(format!("expected {} graphs, found {}", c.horizon + 1, c.graphs.len()));
    }
    let bound = int(n as i64);
    if c.witness.iter().any(|x| x.is_negative() || *x > bound) {
        return Err("witness leaves [0, n]".into());
    }
    let profile = OpinionProfile::new(c.witness.clone()).map_err(|e| e.to_string())?;
    let mut x = profile.clone();
    for (t, g) in c.graphs.iter().enumerate() {
        if g.n() != n {
            return Err(format!("graph at t={t} has {} vertices", g.n()));
        }
        if !g.is_connected() {
            return Err(format!("graph at t={t} is disconnected"));
        }
        if t < c.horizon && g.is_complete() {
            return Err(format!("complete graph at t={t} < T"));
        }
        if !c.rule().admits(g, x.opinions()).map_err(|e| e.to_string())? {
            return Err(format!("graph at t={t} is not ε-consistent with {x}"));
        }
        x = average_over(&x, g);
    }
    if c.rule().pins_dynamics() {
        let mut real = profile.clone();
        for (t, g) in c.graphs.iter().enumerate() {
            let realized = dynamics::influence_graph(&real);
            if &realized != g {
                return Err(format!(
                    "realized graph {:?} differs from certificate {:?} at t={t}",
                    realized.rightmost_one_based(),
                    g.rightmost_one_based()
                ));
            }
            real = dynamics::step(&real);
        }
        let f = dynamics::f_of(&profile, dynamics::default_cap(n)).map_err(|e| e.to_string())?;
        if f < c.horizon + 1 {
            return Err(format!("f(witness) = {f} < T + 1 = {}", c.horizon + 1));
        }
    }
    Ok(())
}

fn average_over(p: &OpinionProfile, g: &OrderedUIGraph) -> OpinionProfile {
    let x = p.opinions();
    let next = (0..x.len())
        .map(|i| {
            let (l, r) = g.neighborhood(i);
            x[l..=r].iter().sum::<Rational>() / int((r + 1 - l) as i64)
        })
        .collect();
    OpinionProfile::new(next).expect("window averages of a sorted profile stay sorted")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HorizonVerdict {
    /// Feasible with strict ε < 0: f(n) >= T + 1 with a robust certificate.
    StrictFeasible,
    /// Infeasible for ε < 0 but feasible under the exact rule: f(n) >= T + 1.
    ExactFeasible,
    /// Infeasible under the exact rule: f(n) <= T.
    Infeasible,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizonRecord {
    pub horizon: usize,
    pub verdict: HorizonVerdict,
    pub stats: SearchStats,
}

/// Bracket on f(n) produced by [`f_bounds`].
#[derive(Clone, Debug)]
pub struct FBounds {
    pub n: usize,
    pub lower: usize,
    pub upper: Option<usize>,
    /// Certificate behind the lower bound when it came from the search.
    pub certificate: Option<Certificate>,
    /// Profile attaining `lower` under the exact dynamics.
    pub lower_witness: OpinionProfile,
    pub log: Vec<HorizonRecord>,
}

impl FBounds {
    pub fn exact(&self) -> Option<usize> {
        (self.upper == Some(self.lower)).then_some(self.lower)
    }
}

/// Brackets f(n) by running the search for T = 1, 2, ... up to `t_max`.
///
/// The lower bound starts at f(equidistant(n)). At each T the strict-ε
/// search runs first; a certificate there raises the lower bound to T + 1.
/// Otherwise the exact-rule search decides: feasible also gives T + 1 (its
/// witness follows the dynamics exactly), infeasible gives the upper bound T.
/// Since any relaxed ε = 0 solution is looser than the exact rule, that
/// upper bound is at least as tight as an ε = 0 infeasibility proof.
pub fn f_bounds(n: usize, t_max: usize, strict_eps: &Rational, cfg: &SearchConfig) -> Result<FBounds> {
    if n == 0 {
        return Err(HkError::InvalidParameter("n must be at least 1".into()));
    }
    if !strict_eps.is_negative() {
        return Err(HkError::InvalidParameter("strict ε must be negative".into()));
    }
    let seed = configs::equidistant(n)?;
    let seed_f = dynamics::f_of(&seed, dynamics::default_cap(n))?;
    let mut out = FBounds { n, lower: seed_f, upper: None, certificate: None, lower_witness: seed, log: Vec::new() };
    if n == 1 {
        out.upper = Some(0);
        return Ok(out);
    }
    for horizon in 1..=t_max {
        let strict = search_sequence(n, horizon, strict_eps, cfg)?;
        let mut stats = strict.stats;
        let (verdict, cert) = match strict.outcome {
            FeasOutcome::Feasible(cert) => (HorizonVerdict::StrictFeasible, Some(cert)),
            FeasOutcome::Undecided => (HorizonVerdict::Undecided, None),
            FeasOutcome::Infeasible => {
                let exact = search_with_rule(n, horizon, &EdgeRule::exact(), cfg)?;
                stats.lp_calls += exact.stats.lp_calls;
                stats.pivots += exact.stats.pivots;
                match exact.outcome {
                    FeasOutcome::Feasible(cert) => (HorizonVerdict::ExactFeasible, Some(cert)),
                    FeasOutcome::Infeasible => (HorizonVerdict::Infeasible, None),
                    FeasOutcome::Undecided => (HorizonVerdict::Undecided, None),
                }
            }
        };
        if let Some(cert) = cert {
            // Prefer a search certificate over the equidistant seed on ties.
            if horizon + 1 > out.lower || (horizon + 1 == out.lower && out.certificate.is_none()) {
                out.lower = horizon + 1;
                out.lower_witness = OpinionProfile::new(cert.witness.clone())?;
                out.certificate = Some(cert);
            }
        }
        if verdict == HorizonVerdict::Infeasible {
            out.upper = Some(horizon);
        }
        log::info!("n={n} T={horizon}: {verdict:?} ({} LP calls)", stats.lp_calls);
        let stop = matches!(verdict, HorizonVerdict::Infeasible | HorizonVerdict::Undecided);
        out.log.push(HorizonRecord { horizon, verdict, stats });
        if stop {
            break;
        }
    }
    Ok(out)
}
