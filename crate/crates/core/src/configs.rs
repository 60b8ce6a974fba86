//! Named initial configurations and profile files.

use std::fs;
use std::path::Path;

use crate::dynamics::OpinionProfile;
use crate::error::{HkError, Result};
use crate::rational::{self, frac, int, Rational};

/// x_i(0) = i for i = 1..n.
pub fn equidistant(n: usize) -> Result<OpinionProfile> {
    if n < 1 {
        return Err(HkError::InvalidParameter("equidistant needs n >= 1".into()));
    }
    OpinionProfile::new((1..=n as i64).map(int).collect())
}

/// Parameters of the linear lower-bound construction with two heavy
/// clusters of weight k flanking two single agents at 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LowerBoundParams {
    k: usize,
}

impl LowerBoundParams {
    pub fn new(k: usize) -> Result<Self> {
        if k < 4 {
            return Err(HkError::InvalidParameter(format!("lower-bound construction needs k >= 4, got {k}")));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        2 * self.k + 2
    }

    /// 1-based representative agents (j1, j2, j3, j4).
    pub fn representatives(&self) -> [usize; 4] {
        [1, self.k + 1, self.k + 2, self.k + 3]
    }
}

/// Agents 1..k at -1/k, agent k+1 at 0, agent k+2 at 1, agents k+3..2k+2 at 1 + 1/k.
pub fn lower_bound_config(params: LowerBoundParams) -> OpinionProfile {
    let k = params.k() as i64;
    let mut x = Vec::with_capacity(params.n());
    x.extend(std::iter::repeat_n(frac(-1, k), params.k()));
    x.push(int(0));
    x.push(int(1));
    x.extend(std::iter::repeat_n(int(1) + frac(1, k), params.k()));
    OpinionProfile::new(x).expect("construction is sorted")
}

/// Translates a profile so its smallest opinion is 0. HK dynamics commute
/// with translation, and a connected profile of n agents then fits in [0, n].
pub fn shift_to_window(p: &OpinionProfile) -> OpinionProfile {
    let min = p.opinions()[0].clone();
    p.shifted(&-min)
}

pub fn profile_from_json(text: &str) -> Result<OpinionProfile> {
    let raw: Vec<serde_json::Value> = serde_json::from_str(text)?;
    let values = raw
        .iter()
        .map(|v| match v {
            serde_json::Value::String(s) => rational::parse(s),
            serde_json::Value::Number(num) if num.is_i64() || num.is_u64() => rational::parse(&num.to_string()),
            other => Err(HkError::BadRational {
                literal: other.to_string(),
                reason: "expected a \"p/q\" string or integer; decimals are not exact",
            }),
        })
        .collect::<Result<Vec<Rational>>>()?;
    OpinionProfile::from_unsorted(values)
}

pub fn profile_to_json(p: &OpinionProfile) -> String {
    let strings: Vec<String> = p.opinions().iter().map(rational::format).collect();
    serde_json::to_string(&strings).expect("strings serialize")
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<OpinionProfile> {
    profile_from_json(&fs::read_to_string(path)?)
}

pub fn save_profile(p: &OpinionProfile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, profile_to_json(p) + "\n")?;
    Ok(())
}
