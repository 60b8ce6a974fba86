//! Ordered unit interval graphs in rightmost-neighbor encoding.
//!
//! A graph on vertices `0..n` is stored as `r`, where `r[i]` is the largest
//! neighbor of `i` (or `i` itself when `i` has no neighbor to the right).
//! For graphs coming from sorted opinion profiles `r` is non-decreasing and
//! every neighborhood is a contiguous index interval. Members of I_n^c are
//! exactly the non-decreasing sequences with `r[i] > i` for `i < n - 1`,
//! which is why their number is the Catalan number C(2n-2, n-1)/n.
//!
//! In memory indices are 0-based; the JSON form uses 1-based vertex labels.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HkError, Result};
use crate::rational::{int, Rational};

pub const DEFAULT_ENUMERATION_LIMIT: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedUIGraph {
    r: Vec<usize>,
}

impl OrderedUIGraph {
    /// Builds a graph from a 0-based rightmost-neighbor sequence.
    pub fn from_rightmost(r: Vec<usize>) -> Result<Self> {
        let n = r.len();
        if n == 0 {
            return Err(HkError::InvalidParameter("graph needs at least one vertex".into()));
        }
        for (i, &ri) in r.iter().enumerate() {
            if ri < i || ri >= n {
                return Err(HkError::InvalidParameter(format!("r[{i}] = {ri} outside {i}..{n}")));
            }
            if i > 0 && ri < r[i - 1] {
                return Err(HkError::InvalidParameter("r must be non-decreasing".into()));
            }
        }
        Ok(Self { r })
    }

    /// Same as [`from_rightmost`](Self::from_rightmost) with 1-based labels.
    pub fn from_rightmost_one_based(r: &[usize]) -> Result<Self> {
        if r.contains(&0) {
            return Err(HkError::InvalidParameter("1-based labels start at 1".into()));
        }
        Self::from_rightmost(r.iter().map(|v| v - 1).collect())
    }

    pub(crate) fn from_rightmost_unchecked(r: Vec<usize>) -> Self {
        Self { r }
    }

    pub fn complete(n: usize) -> Self {
        Self { r: vec![n - 1; n] }
    }

    pub fn path(n: usize) -> Self {
        Self { r: (0..n).map(|i| (i + 1).min(n - 1)).collect() }
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn rightmost(&self) -> &[usize] {
        &self.r
    }

    pub fn rightmost_one_based(&self) -> Vec<usize> {
        self.r.iter().map(|v| v + 1).collect()
    }

    /// Smallest neighbor of `i` (or `i` itself).
    pub fn leftmost(&self, i: usize) -> usize {
        self.r.partition_point(|&rj| rj < i)
    }

    /// Closed neighborhood of `i` as an inclusive index range.
    pub fn neighborhood(&self, i: usize) -> (usize, usize) {
        (self.leftmost(i), self.r[i])
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a != b && self.r[a] >= b
    }

    pub fn edge_count(&self) -> usize {
        self.r.iter().enumerate().map(|(i, &ri)| ri - i).sum()
    }

    pub fn degree(&self, i: usize) -> usize {
        let (l, r) = self.neighborhood(i);
        r - l
    }

    pub fn is_complete(&self) -> bool {
        self.r.iter().all(|&ri| ri == self.r.len() - 1)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.r.len();
        self.r.iter().take(n - 1).enumerate().all(|(i, &ri)| ri > i)
    }

    /// Edge pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.r.iter().enumerate().flat_map(|(i, &ri)| (i + 1..=ri).map(move |j| (i, j)))
    }

    /// Checks `p` against the ε-relaxed edge / non-edge constraints used by
    /// the binary program: edges need `p[j] - p[i] <= 1 + ε`, non-edges
    /// `p[j] - p[i] >= 1 - ε`. At ε = 0 a gap of exactly 1 satisfies both.
    pub fn consistent(&self, p: &[Rational], eps: &Rational) -> Result<bool> {
        self.admits(p, eps, false)
    }

    /// [`consistent`](Self::consistent), optionally with strict non-edges
    /// (`p[j] - p[i] > 1 - ε`). Strict at ε = 0 is exactly the dynamics' rule.
    pub fn admits(&self, p: &[Rational], eps: &Rational, strict_non_edges: bool) -> Result<bool> {
        let n = self.n();
        if p.len() != n {
            return Err(HkError::SizeMismatch { expected: n, got: p.len() });
        }
        let upper = int(1) + eps;
        let lower = int(1) - eps;
        for i in 0..n {
            for j in i + 1..n {
                let gap = &p[j] - &p[i];
                let ok = if self.has_edge(i, j) {
                    gap <= upper
                } else if strict_non_edges {
                    gap > lower
                } else {
                    gap >= lower
                };
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Number of members of I_n^c: the (n-1)-st Catalan number.
pub fn connected_count(n: usize) -> num_bigint::BigUint {
    use num_bigint::BigUint;
    if n == 0 {
        return BigUint::from(0u8);
    }
    let m = n - 1;
    let mut binom = BigUint::from(1u8);
    for k in 0..m {
        binom = binom * BigUint::from(2 * m - k) / BigUint::from(k + 1);
    }
    binom / BigUint::from(m + 1)
}

/// All of I_n^c in lexicographic r-order, refusing n above [`DEFAULT_ENUMERATION_LIMIT`].
pub fn enumerate_connected(n: usize) -> Result<Vec<OrderedUIGraph>> {
    enumerate_connected_with_limit(n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_connected_with_limit(n: usize, limit: usize) -> Result<Vec<OrderedUIGraph>> {
    if n == 0 {
        return Err(HkError::InvalidParameter("n must be at least 1".into()));
    }
    if n > limit {
        return Err(HkError::EnumerationLimit { n, limit });
    }
    let mut out = Vec::new();
    let mut r = vec![0usize; n];
    fill(&mut r, 0, &mut out);
    Ok(out)
}

fn fill(r: &mut Vec<usize>, i: usize, out: &mut Vec<OrderedUIGraph>) {
    let n = r.len();
    if i == n - 1 {
        r[i] = n - 1;
        out.push(OrderedUIGraph { r: r.clone() });
        return;
    }
    let lo = (i + 1).max(if i == 0 { 0 } else { r[i - 1] });
    for v in lo..n {
        r[i] = v;
        fill(r, i + 1, out);
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    r: Vec<usize>,
}

impl Serialize for OrderedUIGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson { n: self.n(), r: self.rightmost_one_based() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrderedUIGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        if raw.r.len() != raw.n {
            return Err(serde::de::Error::custom("length of r differs from n"));
        }
        OrderedUIGraph::from_rightmost_one_based(&raw.r).map_err(serde::de::Error::custom)
    }
}
