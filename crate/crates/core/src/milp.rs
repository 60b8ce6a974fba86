//! The binary linear program whose feasibility brackets f(n), and its export
//! as a CPLEX-style LP file.
//!
//! Variables: `x_t_i` (opinion of agent i at time t), `u_t_g` (graph g of
//! I_n^c is the influence graph at time t) and `z_t_i_g` (linearization of
//! the product u_t_g * x_t_i). Agent labels in names are 1-based, graph
//! indices refer to the lexicographic order of [`graphs::enumerate_connected`].

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{HkError, Result};
use crate::graphs::{self, OrderedUIGraph};
use crate::lp::{LinearConstraint, Sense};
use crate::rational::{self, int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    X,
    U,
    Z,
}

/// Identifies one program variable. `agent` and `graph` are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarKey {
    pub kind: VarKind,
    pub t: usize,
    pub agent: Option<usize>,
    pub graph: Option<usize>,
}

impl VarKey {
    pub fn x(t: usize, agent: usize) -> Self {
        Self { kind: VarKind::X, t, agent: Some(agent), graph: None }
    }

    pub fn u(t: usize, graph: usize) -> Self {
        Self { kind: VarKind::U, t, agent: None, graph: Some(graph) }
    }

    pub fn z(t: usize, agent: usize, graph: usize) -> Self {
        Self { kind: VarKind::Z, t, agent: Some(agent), graph: Some(graph) }
    }

    pub fn name(&self) -> String {
        match self.kind {
            VarKind::X => format!("x_{}_{}", self.t, self.agent.unwrap() + 1),
            VarKind::U => format!("u_{}_{}", self.t, self.graph.unwrap()),
            VarKind::Z => format!("z_{}_{}_{}", self.t, self.agent.unwrap() + 1, self.graph.unwrap()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub key: VarKey,
    pub lower: Rational,
    pub upper: Rational,
    pub binary: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Edge,
    NonEdge,
    Selection,
    CompleteExclusion,
    Dynamics,
    /// z <= n u
    McCormickSelect,
    /// z >= x - n (1 - u)
    McCormickLower,
    /// z <= x
    McCormickUpper,
    Ordering,
    Origin,
}

impl Family {
    pub fn prefix(&self) -> &'static str {
        match self {
            Family::Edge => "edge",
            Family::NonEdge => "nonedge",
            Family::Selection => "sel",
            Family::CompleteExclusion => "nokn",
            Family::Dynamics => "dyn",
            Family::McCormickSelect => "mcs",
            Family::McCormickLower => "mcl",
            Family::McCormickUpper => "mcu",
            Family::Ordering => "ord",
            Family::Origin => "origin",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub family: Family,
    pub name: String,
    pub constraint: LinearConstraint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlpOptions {
    /// x_i^t <= x_{i+1}^t for all t, i.
    pub ordering: bool,
    /// Literal coupling with x_i^{t-1} summed once per graph instead of z_{i,I}^{t-1}.
    pub printed_dynamics: bool,
    /// x_1^0 = 0.
    pub fix_origin: bool,
    pub enumeration_limit: usize,
}

impl Default for BlpOptions {
    fn default() -> Self {
        Self {
            ordering: true,
            printed_dynamics: false,
            fix_origin: false,
            enumeration_limit: graphs::DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BlpModel {
    pub n: usize,
    pub horizon: usize,
    pub eps: Rational,
    pub options: BlpOptions,
    pub graphs: Vec<OrderedUIGraph>,
    pub vars: Vec<Variable>,
    pub rows: Vec<Row>,
    /// Minimized.
    pub objective: Vec<(usize, Rational)>,
    index: HashMap<VarKey, usize>,
}

impl BlpModel {
    pub fn var(&self, key: &VarKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn complete_graph(&self) -> usize {
        self.graphs.len() - 1
    }

    /// Rows violated by `values` (indexed like `vars`), including bound and
    /// integrality violations reported as `None`.
    pub fn violations(&self, values: &[Rational]) -> Vec<Option<usize>> {
        let mut out = Vec::new();
        for (v, var) in self.vars.iter().enumerate() {
            let x = &values[v];
            let in_bounds = x >= &var.lower && x <= &var.upper;
            let integral = !var.binary || x.is_integer();
            if !in_bounds || !integral {
                out.push(None);
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.constraint.satisfied_by(values) {
                out.push(Some(r));
            }
        }
        out
    }

    pub fn objective_value(&self, values: &[Rational]) -> Rational {
        self.objective.iter().map(|(v, c)| c * &values[*v]).sum()
    }
}

struct Builder {
    vars: Vec<Variable>,
    index: HashMap<VarKey, usize>,
    rows: Vec<Row>,
}

impl Builder {
    fn var(&mut self, key: VarKey, upper: Rational, binary: bool) {
        self.index.insert(key, self.vars.len());
        self.vars.push(Variable { key, lower: Rational::zero(), upper, binary });
    }

    fn id(&self, key: VarKey) -> usize {
        self.index[&key]
    }

    fn row(&mut self, family: Family, tag: String, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        let name = format!("{}_{}", family.prefix(), tag);
        self.rows.push(Row { family, name, constraint: LinearConstraint::new(merge(coeffs), sense, rhs) });
    }
}

/// Sums duplicate variables and drops zeros, keeping first-appearance order.
fn merge(coeffs: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(coeffs.len());
    for (v, c) in coeffs {
        match out.iter_mut().find(|(w, _)| *w == v) {
            Some((_, acc)) => *acc += c,
            None => out.push((v, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

pub fn build_blp(n: usize, horizon: usize, eps: &Rational, options: &BlpOptions) -> Result<BlpModel> {
    if n < 2 {
        return Err(HkError::InvalidParameter("program needs n >= 2".into()));
    }
    if horizon < 1 {
        return Err(HkError::InvalidParameter("program needs T >= 1".into()));
    }
    let graphs = graphs::enumerate_connected_with_limit(n, options.enumeration_limit)?;
    let complete = graphs.len() - 1;
    let nn = int(n as i64);
    let one = int(1);
    let mut b = Builder { vars: Vec::new(), index: HashMap::new(), rows: Vec::new() };

    for t in 0..=horizon {
        for i in 0..n {
            b.var(VarKey::x(t, i), nn.clone(), false);
        }
    }
    for t in 0..=horizon {
        for g in 0..graphs.len() {
            b.var(VarKey::u(t, g), one.clone(), true);
        }
    }
    for t in 0..horizon {
        for i in 0..n {
            for g in 0..graphs.len() {
                b.var(VarKey::z(t, i, g), nn.clone(), false);
            }
        }
    }

    let edge_rhs = &one + eps + &nn;
    let non_edge_coef = -(&one - eps);
    for t in 0..=horizon {
        for (g, graph) in graphs.iter().enumerate() {
            let u = b.id(VarKey::u(t, g));
            for i in 0..n {
                for j in i + 1..n {
                    let xi = b.id(VarKey::x(t, i));
                    let xj = b.id(VarKey::x(t, j));
                    let tag = format!("{t}_{g}_{}_{}", i + 1, j + 1);
                    if graph.has_edge(i, j) {
                        // x_j - x_i <= 1 + ε + (1 - u) n
                        b.row(
                            Family::Edge,
                            tag,
                            vec![(xj, int(1)), (xi, int(-1)), (u, nn.clone())],
                            Sense::Le,
                            edge_rhs.clone(),
                        );
                    } else {
                        // x_j - x_i >= 1 - ε - (1 - u)(1 - ε)  <=>  x_j - x_i - (1 - ε) u >= 0
                        b.row(
                            Family::NonEdge,
                            tag,
                            vec![(xj, int(1)), (xi, int(-1)), (u, non_edge_coef.clone())],
                            Sense::Ge,
                            Rational::zero(),
                        );
                    }
                }
            }
        }
        let sel = (0..graphs.len()).map(|g| (b.id(VarKey::u(t, g)), int(1))).collect();
        b.row(Family::Selection, t.to_string(), sel, Sense::Eq, one.clone());
        if t < horizon {
            let u = b.id(VarKey::u(t, complete));
            b.row(Family::CompleteExclusion, t.to_string(), vec![(u, int(1))], Sense::Eq, Rational::zero());
        }
    }

    for t in 1..=horizon {
        for i in 0..n {
            let mut coeffs = vec![(b.id(VarKey::x(t, i)), int(1))];
            for (g, graph) in graphs.iter().enumerate() {
                let (l, r) = graph.neighborhood(i);
                let w = Rational::new(BigInt::one(), BigInt::from(r + 1 - l));
                for j in l..=r {
                    let id = if j == i && options.printed_dynamics {
                        b.id(VarKey::x(t - 1, i))
                    } else {
                        b.id(VarKey::z(t - 1, j, g))
                    };
                    coeffs.push((id, -w.clone()));
                }
            }
            b.row(Family::Dynamics, format!("{t}_{}", i + 1), coeffs, Sense::Eq, Rational::zero());
        }
    }

    for t in 0..horizon {
        for i in 0..n {
            let x = b.id(VarKey::x(t, i));
            for g in 0..graphs.len() {
                let z = b.id(VarKey::z(t, i, g));
                let u = b.id(VarKey::u(t, g));
                let tag = format!("{t}_{}_{g}", i + 1);
                b.row(
                    Family::McCormickSelect,
                    tag.clone(),
                    vec![(z, int(1)), (u, -nn.clone())],
                    Sense::Le,
                    Rational::zero(),
                );
                b.row(
                    Family::McCormickLower,
                    tag.clone(),
                    vec![(z, int(1)), (x, int(-1)), (u, -nn.clone())],
                    Sense::Ge,
                    -nn.clone(),
                );
                b.row(Family::McCormickUpper, tag, vec![(z, int(1)), (x, int(-1))], Sense::Le, Rational::zero());
            }
        }
    }

    if options.ordering {
        for t in 0..=horizon {
            for i in 0..n - 1 {
                let a = b.id(VarKey::x(t, i));
                let c = b.id(VarKey::x(t, i + 1));
                b.row(
                    Family::Ordering,
                    format!("{t}_{}", i + 1),
                    vec![(a, int(1)), (c, int(-1))],
                    Sense::Le,
                    Rational::zero(),
                );
            }
        }
    }
    if options.fix_origin {
        let x = b.id(VarKey::x(0, 0));
        b.row(Family::Origin, "0".into(), vec![(x, int(1))], Sense::Eq, Rational::zero());
    }

    let objective = graphs
        .iter()
        .enumerate()
        .map(|(g, graph)| (b.id(VarKey::u(horizon, g)), int(graph.edge_count() as i64)))
        .collect();

    Ok(BlpModel {
        n,
        horizon,
        eps: eps.clone(),
        options: options.clone(),
        graphs,
        vars: b.vars,
        rows: b.rows,
        objective,
        index: b.index,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelStats {
    pub x: usize,
    pub u: usize,
    pub z: usize,
    pub binaries: usize,
    pub rows: usize,
    pub by_family: BTreeMap<Family, usize>,
}

impl ModelStats {
    pub fn family(&self, f: Family) -> usize {
        self.by_family.get(&f).copied().unwrap_or(0)
    }

    pub fn mccormick(&self) -> usize {
        self.family(Family::McCormickSelect) + self.family(Family::McCormickLower) + self.family(Family::McCormickUpper)
    }
}

pub fn model_stats(model: &BlpModel) -> ModelStats {
    let count = |k: VarKind| model.vars.iter().filter(|v| v.key.kind == k).count();
    let mut by_family = BTreeMap::new();
    for row in &model.rows {
        *by_family.entry(row.family).or_insert(0) += 1;
    }
    ModelStats {
        x: count(VarKind::X),
        u: count(VarKind::U),
        z: count(VarKind::Z),
        binaries: model.vars.iter().filter(|v| v.binary).count(),
        rows: model.rows.len(),
        by_family,
    }
}

/// Scales a row by the least common denominator so every number is an integer.
fn integer_row(coeffs: &[(usize, Rational)], rhs: &Rational) -> (Vec<(usize, BigInt)>, BigInt) {
    let scale = Rational::from_integer(rational::lcm_of_denominators(coeffs.iter().map(|(_, c)| c).chain([rhs])));
    let coeffs = coeffs.iter().map(|(v, c)| (*v, (c * &scale).to_integer())).collect();
    (coeffs, (rhs * &scale).to_integer())
}

fn write_terms(out: &mut String, model: &BlpModel, terms: &[(usize, BigInt)]) {
    let mut line_len = 0;
    for (k, (v, c)) in terms.iter().enumerate() {
        let name = model.vars[*v].key.name();
        let mag = c.abs();
        let sign = if c.is_negative() {
            "-"
        } else if k == 0 {
            ""
        } else {
            "+"
        };
        let term = if mag.is_one() { format!("{sign} {name}") } else { format!("{sign} {mag} {name}") };
        if line_len + term.len() > 200 {
            out.push_str("\n  ");
            line_len = 0;
        }
        out.push(' ');
        out.push_str(term.trim_start());
        line_len += term.len() + 1;
    }
    if terms.is_empty() {
        out.push_str(" 0 ");
        out.push_str(&model.vars[0].key.name());
    }
}

/// Renders the model in LP format. Every row is scaled to integer
/// coefficients, so the file is exact.
pub fn to_lp_string(model: &BlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ HK consensus-time program: n={} T={} eps={} ordering={} printed_dynamics={} fix_origin={}",
        model.n,
        model.horizon,
        rational::format(&model.eps),
        model.options.ordering,
        model.options.printed_dynamics,
        model.options.fix_origin
    );
    out.push_str("Minimize\n obj:");
    let (obj, _) = integer_row(&model.objective, &Rational::zero());
    write_terms(&mut out, model, &obj);
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        let c = &row.constraint;
        let (terms, rhs) = integer_row(&c.coeffs, &c.rhs);
        let _ = write!(out, " {}:", row.name);
        write_terms(&mut out, model, &terms);
        let sense = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {sense} {rhs}");
    }
    out.push_str("Bounds\n");
    for v in model.vars.iter().filter(|v| !v.binary) {
        let _ = writeln!(out, " {} <= {} <= {}", rational::format(&v.lower), v.key.name(), rational::format(&v.upper));
    }
    out.push_str("Binaries\n");
    for chunk in model.vars.iter().filter(|v| v.binary).collect::<Vec<_>>().chunks(10) {
        let names: Vec<String> = chunk.iter().map(|v| v.key.name()).collect();
        let _ = writeln!(out, " {}", names.join(" "));
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidecarVar {
    pub name: String,
    pub kind: VarKind,
    pub t: usize,
    /// 1-based.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<usize>,
}

/// Companion metadata mapping LP variable names back to program variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub n: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(with = "rational::serde_rational")]
    pub eps: Rational,
    pub ordering: bool,
    pub printed_dynamics: bool,
    pub fix_origin: bool,
    pub graphs: Vec<OrderedUIGraph>,
    pub variables: Vec<SidecarVar>,
}

impl Sidecar {
    pub fn from_model(model: &BlpModel) -> Self {
        Self {
            n: model.n,
            horizon: model.horizon,
            eps: model.eps.clone(),
            ordering: model.options.ordering,
            printed_dynamics: model.options.printed_dynamics,
            fix_origin: model.options.fix_origin,
            graphs: model.graphs.clone(),
            variables: model
                .vars
                .iter()
                .map(|v| SidecarVar {
                    name: v.key.name(),
                    kind: v.key.kind,
                    t: v.key.t,
                    agent: v.key.agent.map(|a| a + 1),
                    graph: v.key.graph,
                })
                .collect(),
        }
    }

    /// Reads a solver's solution (variable name -> value) back into the
    /// initial profile and the selected graph per time step.
    pub fn decode(&self, values: &HashMap<String, Rational>) -> Result<(Vec<Rational>, Vec<OrderedUIGraph>)> {
        let get = |name: &str| values.get(name).cloned().unwrap_or_else(Rational::zero);
        let mut witness = vec![Rational::zero(); self.n];
        let mut chosen: Vec<Option<usize>> = vec![None; self.horizon + 1];
        let half = crate::rational::frac(1, 2);
        for v in &self.variables {
            match v.kind {
                VarKind::X if v.t == 0 => witness[v.agent.unwrap() - 1] = get(&v.name),
                VarKind::U if get(&v.name) > half && chosen[v.t].replace(v.graph.unwrap()).is_some() => {
                    return Err(HkError::Format(format!("two graphs selected at t={}", v.t)));
                }
                _ => {}
            }
        }
        let graphs = chosen
            .into_iter()
            .enumerate()
            .map(|(t, g)| {
                g.map(|g| self.graphs[g].clone()).ok_or_else(|| HkError::Format(format!("no graph selected at t={t}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((witness, graphs))
    }
}

/// Writes `path` (LP format) and `path` with extension `.json` (sidecar).
pub fn emit_lp(model: &BlpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_lp_string(model))?;
    let sidecar = serde_json::to_string_pretty(&Sidecar::from_model(model))?;
    fs::write(sidecar_path(path), sidecar + "\n")?;
    Ok(())
}

pub fn sidecar_path(lp_path: &Path) -> std::path::PathBuf {
    lp_path.with_extension("json")
}

/// Assignment of every program variable induced by an initial profile and a
/// graph per time step, propagated through the graphs' averaging maps. Used
/// to check that real trajectories satisfy the program.
pub fn assignment_from_sequence(model: &BlpModel, x0: &[Rational], seq: &[usize]) -> Vec<Rational> {
    let n = model.n;
    let mut values = vec![Rational::zero(); model.vars.len()];
    let mut x = x0.to_vec();
    for t in 0..=model.horizon {
        for i in 0..n {
            values[model.index[&VarKey::x(t, i)]] = x[i].clone();
        }
        for g in 0..model.graphs.len() {
            let on = g == seq[t];
            values[model.index[&VarKey::u(t, g)]] = if on { int(1) } else { Rational::zero() };
            if t < model.horizon {
                for i in 0..n {
                    values[model.index[&VarKey::z(t, i, g)]] = if on { x[i].clone() } else { Rational::zero() };
                }
            }
        }
        let graph = &model.graphs[seq[t]];
        x = (0..n)
            .map(|i| {
                let (l, r) = graph.neighborhood(i);
                x[l..=r].iter().sum::<Rational>() / int((r + 1 - l) as i64)
            })
            .collect();
    }
    values
}
