//! Exact rational feasibility via the simplex method.
//!
//! The engine keeps a dictionary (every basic variable written as an affine
//! function of the nonbasic ones, all variables non-negative). Rows can be
//! appended to a feasible dictionary at any time, and feasibility is restored
//! with a single-artificial phase 1 under Bland's rule, so the depth-first
//! search can warm-start each child from its parent's basis.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) -> Self {
        Self { coeffs, sense, rhs }
    }

    pub fn lhs(&self, point: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(v, c)| c * &point[*v]).sum()
    }

    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        let lhs = self.lhs(point);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarDomain {
    Free,
    NonNegative,
}

/// Conjunction of non-strict linear constraints over `num_vars` variables.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    domains: Vec<VarDomain>,
    constraints: Vec<LinearConstraint>,
}

impl LinearSystem {
    /// `num_vars` free variables.
    pub fn new(num_vars: usize) -> Self {
        Self { domains: vec![VarDomain::Free; num_vars], constraints: Vec::new() }
    }

    pub fn with_domains(domains: Vec<VarDomain>) -> Self {
        Self { domains, constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn set_domain(&mut self, var: usize, domain: VarDomain) {
        self.domains[var] = domain;
    }

    pub fn push(&mut self, c: LinearConstraint) {
        assert!(c.coeffs.iter().all(|(v, _)| *v < self.num_vars()), "variable out of range");
        self.constraints.push(c);
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        self.push(LinearConstraint::new(coeffs, sense, rhs));
    }

    /// True if `point` lies in the domain and satisfies every constraint.
    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        point.len() == self.num_vars()
            && self.domains.iter().zip(point).all(|(d, x)| *d == VarDomain::Free || !x.is_negative())
            && self.constraints.iter().all(|c| c.satisfied_by(point))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }
}

/// Decides feasibility exactly and returns a witness point when one exists.
pub fn lp_feasible(sys: &LinearSystem) -> LpOutcome {
    // Free variables are split as v = v+ - v-.
    let mut columns: Vec<(usize, Option<usize>)> = Vec::with_capacity(sys.num_vars());
    let mut internal = 0;
    for d in &sys.domains {
        match d {
            VarDomain::NonNegative => {
                columns.push((internal, None));
                internal += 1;
            }
            VarDomain::Free => {
                columns.push((internal, Some(internal + 1)));
                internal += 2;
            }
        }
    }
    let mut dict = Dictionary::new(internal);
    let mut dense = vec![Rational::zero(); internal];
    for c in &sys.constraints {
        dense.iter_mut().for_each(|v| v.set_zero());
        for (v, coef) in &c.coeffs {
            let (pos, neg) = columns[*v];
            dense[pos] += coef;
            if let Some(neg) = neg {
                dense[neg] -= coef;
            }
        }
        match c.sense {
            Sense::Le => dict.add_le_row(&dense, &c.rhs),
            Sense::Ge => dict.add_ge_row(&dense, &c.rhs),
            Sense::Eq => {
                dict.add_le_row(&dense, &c.rhs);
                dict.add_ge_row(&dense, &c.rhs);
            }
        }
    }
    if !dict.restore_feasibility() {
        return LpOutcome::Infeasible;
    }
    let raw = dict.point();
    let point: Vec<Rational> = columns
        .iter()
        .map(|(pos, neg)| match neg {
            Some(neg) => &raw[*pos] - &raw[*neg],
            None => raw[*pos].clone(),
        })
        .collect();
    debug_assert!(sys.satisfied_by(&point));
    LpOutcome::Feasible(point)
}

const ARTIFICIAL: usize = usize::MAX;
const OBJECTIVE: usize = usize::MAX - 1;

#[derive(Clone, Copy, Debug)]
enum Position {
    Basic(usize),
    Nonbasic(usize),
}

/// Simplex dictionary over non-negative variables.
///
/// Variables `0..num_structural` are the structural columns; every appended
/// row introduces one slack variable. Row `k` reads
/// `basic[k] = constant[k] + sum_j coef[k][j] * nonbasic[j]`.
#[derive(Clone, Debug)]
pub struct Dictionary {
    num_structural: usize,
    num_vars: usize,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    constant: Vec<Rational>,
    coef: Vec<Vec<Rational>>,
    position: Vec<Position>,
    pivots: u64,
}

impl Dictionary {
    pub fn new(num_structural: usize) -> Self {
        Self {
            num_structural,
            num_vars: num_structural,
            basic: Vec::new(),
            nonbasic: (0..num_structural).collect(),
            constant: Vec::new(),
            coef: Vec::new(),
            position: (0..num_structural).map(Position::Nonbasic).collect(),
            pivots: 0,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.basic.len()
    }

    /// Total pivots performed over the dictionary's lifetime (clones inherit it).
    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    /// Appends `a . x <= b` over the structural variables. The dictionary
    /// may become infeasible; call [`restore_feasibility`](Self::restore_feasibility).
    pub fn add_le_row(&mut self, a: &[Rational], b: &Rational) {
        assert_eq!(a.len(), self.num_structural);
        // slack = b - a.x, with basic structural variables substituted out.
        let mut constant = b.clone();
        let mut row = vec![Rational::zero(); self.nonbasic.len()];
        for (v, av) in a.iter().enumerate() {
            if av.is_zero() {
                continue;
            }
            match self.position[v] {
                Position::Nonbasic(j) => row[j] -= av,
                Position::Basic(k) => {
                    constant -= av * &self.constant[k];
                    for (rj, ckj) in row.iter_mut().zip(&self.coef[k]) {
                        if !ckj.is_zero() {
                            *rj -= av * ckj;
                        }
                    }
                }
            }
        }
        let slack = self.num_vars;
        self.num_vars += 1;
        self.position.push(Position::Basic(self.basic.len()));
        self.basic.push(slack);
        self.constant.push(constant);
        self.coef.push(row);
    }

    pub fn add_ge_row(&mut self, a: &[Rational], b: &Rational) {
        let neg: Vec<Rational> = a.iter().map(|v| -v).collect();
        self.add_le_row(&neg, &-b);
    }

    pub fn is_feasible(&self) -> bool {
        self.constant.iter().all(|c| !c.is_negative())
    }

    /// Current basic solution restricted to the structural variables.
    pub fn point(&self) -> Vec<Rational> {
        (0..self.num_structural)
            .map(|v| match self.position[v] {
                Position::Basic(k) => self.constant[k].clone(),
                Position::Nonbasic(_) => Rational::zero(),
            })
            .collect()
    }

    /// Phase 1: returns whether the system is feasible, leaving a feasible
    /// dictionary behind when it is.
    pub fn restore_feasibility(&mut self) -> bool {
        let Some(start) = self.most_negative_row() else {
            return true;
        };
        // Artificial column with +1 on every currently infeasible row. With the
        // artificial at 0 the dictionary is the original system again.
        let art_col = self.nonbasic.len();
        self.nonbasic.push(ARTIFICIAL);
        for k in 0..self.basic.len() {
            let v = if self.constant[k].is_negative() { Rational::one() } else { Rational::zero() };
            self.coef[k].push(v);
        }
        self.pivot(start, art_col);
        let feasible = loop {
            let art_row = match self.basic.iter().position(|&b| b == ARTIFICIAL) {
                Some(k) => k,
                None => break true,
            };
            // Maximize -artificial; its row gives the reduced costs with sign flipped.
            let entering = (0..self.nonbasic.len())
                .filter(|&j| self.coef[art_row][j].is_negative())
                .min_by_key(|&j| self.nonbasic[j]);
            let Some(e) = entering else {
                if self.constant[art_row].is_positive() {
                    break false;
                }
                // Degenerate at zero: swap the artificial out on any nonzero column.
                let j = (0..self.nonbasic.len())
                    .filter(|&j| !self.coef[art_row][j].is_zero())
                    .min_by_key(|&j| self.nonbasic[j]);
                if let Some(j) = j {
                    self.pivot(art_row, j);
                }
                break true;
            };
            let leaving = self.ratio_test(e).expect("phase 1 objective is bounded");
            self.pivot(leaving, e);
        };
        if feasible {
            self.drop_artificial();
        }
        feasible
    }

    /// Phase 2 on a feasible dictionary: maximizes `obj . x` over the
    /// structural variables with Bland's rule. Returns the objective value
    /// reached, or `None` if unbounded. With `stop_above`, pivoting stops as
    /// soon as the current vertex has a value strictly above it.
    pub fn maximize(&mut self, obj: &[Rational], stop_above: Option<&Rational>) -> Option<Rational> {
        assert_eq!(obj.len(), self.num_structural);
        debug_assert!(self.is_feasible());
        let mut constant = Rational::zero();
        let mut row = vec![Rational::zero(); self.nonbasic.len()];
        for (v, cv) in obj.iter().enumerate() {
            if cv.is_zero() {
                continue;
            }
            match self.position[v] {
                Position::Nonbasic(j) => row[j] += cv,
                Position::Basic(k) => {
                    constant += cv * &self.constant[k];
                    for (rj, ckj) in row.iter_mut().zip(&self.coef[k]) {
                        if !ckj.is_zero() {
                            *rj += cv * ckj;
                        }
                    }
                }
            }
        }
        let obj_row = self.basic.len();
        self.basic.push(OBJECTIVE);
        self.constant.push(constant);
        self.coef.push(row);
        let result = loop {
            let value = &self.constant[obj_row];
            if stop_above.is_some_and(|t| value > t) {
                break Some(value.clone());
            }
            let entering = (0..self.nonbasic.len())
                .filter(|&j| self.coef[obj_row][j].is_positive())
                .min_by_key(|&j| self.nonbasic[j]);
            let Some(e) = entering else {
                break Some(value.clone());
            };
            let Some(leaving) = self.ratio_test(e) else {
                break None;
            };
            self.pivot(leaving, e);
        };
        self.basic.pop();
        self.constant.pop();
        self.coef.pop();
        result
    }

    fn most_negative_row(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (k, c) in self.constant.iter().enumerate() {
            if !c.is_negative() {
                continue;
            }
            best = match best {
                None => Some(k),
                Some(b) if c < &self.constant[b] || (c == &self.constant[b] && self.basic[k] < self.basic[b]) => {
                    Some(k)
                }
                keep => keep,
            };
        }
        best
    }

    /// Minimum-ratio row for entering column `e`; ties go to the artificial,
    /// then to the smallest basic variable (Bland).
    fn ratio_test(&self, e: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for k in 0..self.basic.len() {
            if self.basic[k] == OBJECTIVE {
                continue;
            }
            let d = &self.coef[k][e];
            if !d.is_negative() {
                continue;
            }
            let ratio = &self.constant[k] / -d;
            let better = match &best {
                None => true,
                Some((b, r)) => {
                    ratio < *r
                        || (ratio == *r
                            && self.basic[*b] != ARTIFICIAL
                            && (self.basic[k] == ARTIFICIAL || self.basic[k] < self.basic[*b]))
                }
            };
            if better {
                best = Some((k, ratio));
            }
        }
        best.map(|(k, _)| k)
    }

    fn pivot(&mut self, k: usize, e: usize) {
        self.pivots += 1;
        let d = self.coef[k][e].clone();
        debug_assert!(!d.is_zero());
        let inv = d.recip();
        let leaving = self.basic[k];
        let entering = self.nonbasic[e];

        // Solve row k for the entering variable.
        let mut row = std::mem::take(&mut self.coef[k]);
        let neg_inv = -&inv;
        for (j, v) in row.iter_mut().enumerate() {
            if j == e {
                *v = inv.clone();
            } else if !v.is_zero() {
                *v *= &neg_inv;
            }
        }
        let constant_k = -&self.constant[k] * &inv;

        for i in 0..self.basic.len() {
            if i == k {
                continue;
            }
            let f = std::mem::take(&mut self.coef[i][e]);
            if f.is_zero() {
                continue;
            }
            self.constant[i] += &f * &constant_k;
            for (j, rj) in row.iter().enumerate() {
                if j == e {
                    self.coef[i][j] = &f * rj;
                } else if !rj.is_zero() {
                    self.coef[i][j] += &f * rj;
                }
            }
        }
        self.coef[k] = row;
        self.constant[k] = constant_k;
        self.basic[k] = entering;
        self.nonbasic[e] = leaving;
        if entering != ARTIFICIAL {
            self.position[entering] = Position::Basic(k);
        }
        debug_assert!(leaving != OBJECTIVE);
        if leaving != ARTIFICIAL {
            self.position[leaving] = Position::Nonbasic(e);
        }
    }

    fn drop_artificial(&mut self) {
        if let Some(k) = self.basic.iter().position(|&b| b == ARTIFICIAL) {
            // Identically zero row: the artificial never left the basis.
            self.basic.remove(k);
            self.constant.remove(k);
            self.coef.remove(k);
            for (i, &v) in self.basic.iter().enumerate().skip(k) {
                self.position[v] = Position::Basic(i);
            }
        }
        let Some(col) = self.nonbasic.iter().position(|&v| v == ARTIFICIAL) else {
            return;
        };
        self.nonbasic.remove(col);
        for row in &mut self.coef {
            row.remove(col);
        }
        for (j, &v) in self.nonbasic.iter().enumerate().skip(col) {
            self.position[v] = Position::Nonbasic(j);
        }
    }
}
