//! Mixed strategies over detector positionings or attack plans, their marginal
//! probabilities, and the cyclic-window construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::path::Path;

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DetectionModel, IndexSet};

pub type Rational = num_rational::Ratio<i64>;

/// Sum-to-one tolerance for floating-point strategies.
pub const PROB_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Defender,
    Attacker,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Defender => "defender",
            Side::Attacker => "attacker",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scalar used for probabilities: `f64` at API boundaries, exact rationals
/// where guarantees must hold exactly.
pub trait Probability:
    Clone
    + fmt::Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether `total` counts as one.
    fn sums_to_one(total: &Self) -> bool;
}

impl Probability for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sums_to_one(total: &Self) -> bool {
        (total - 1.0).abs() <= PROB_TOL
    }
}

impl Probability for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num, den)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn sums_to_one(total: &Self) -> bool {
        total.is_one()
    }
}

/// Probability distribution over canonical action sets of one player.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedStrategy<P = f64> {
    side: Side,
    budget: usize,
    support: BTreeMap<IndexSet, P>,
}

impl<P: Probability> MixedStrategy<P> {
    /// Builds a strategy, merging repeated actions and dropping zero-probability
    /// entries.
    pub fn new(side: Side, budget: usize, entries: impl IntoIterator<Item = (IndexSet, P)>) -> Result<Self> {
        let mut support: BTreeMap<IndexSet, P> = BTreeMap::new();
        let mut total = P::zero();
        for (action, p) in entries {
            if p < P::zero() {
                return Err(Error::InvalidStrategy(format!("negative probability on {action}")));
            }
            if action.len() > budget {
                return Err(Error::InvalidStrategy(format!(
                    "action {action} has {} elements, budget is {budget}",
                    action.len()
                )));
            }
            total = total + p.clone();
            if p.is_zero() {
                continue;
            }
            let slot = support.entry(action).or_insert_with(P::zero);
            *slot = slot.clone() + p;
        }
        if support.is_empty() {
            return Err(Error::EmptyStrategy);
        }
        if !P::sums_to_one(&total) {
            return Err(Error::InvalidStrategy(format!(
                "probabilities sum to {}, not 1",
                total.to_f64()
            )));
        }
        Ok(MixedStrategy { side, budget, support })
    }

    pub fn pure(side: Side, budget: usize, action: IndexSet) -> Result<Self> {
        Self::new(side, budget, [(action, P::one())])
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn support(&self) -> &BTreeMap<IndexSet, P> {
        &self.support
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IndexSet, &P)> {
        self.support.iter()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `ρ(x)`: probability that element `x` belongs to the realized action.
    /// Only elements of the basis appear.
    pub fn marginals(&self) -> BTreeMap<usize, P> {
        let mut out: BTreeMap<usize, P> = BTreeMap::new();
        for (action, p) in &self.support {
            for x in action.iter() {
                let slot = out.entry(x).or_insert_with(P::zero);
                *slot = slot.clone() + p.clone();
            }
        }
        out
    }

    /// Marginals as a dense vector over `universe` elements.
    pub fn marginal_vector(&self, universe: usize) -> Vec<P> {
        let mut out = vec![P::zero(); universe];
        for (action, p) in &self.support {
            for x in action.iter() {
                out[x] = out[x].clone() + p.clone();
            }
        }
        out
    }

    pub fn support_sizes(&self) -> BTreeSet<usize> {
        self.support.keys().map(IndexSet::len).collect()
    }

    /// Node basis (defender) or component basis (attacker).
    pub fn basis(&self) -> IndexSet {
        self.support.keys().flat_map(|a| a.iter()).collect()
    }

    /// `E[|S|]` or `E[|T|]`.
    pub fn expected_size(&self) -> P {
        self.support.iter().fold(P::zero(), |acc, (a, p)| {
            acc + p.clone() * P::from_ratio(a.len() as i64, 1)
        })
    }

    pub fn to_f64(&self) -> MixedStrategy<f64> {
        MixedStrategy {
            side: self.side,
            budget: self.budget,
            support: self.support.iter().map(|(a, p)| (a.clone(), p.to_f64())).collect(),
        }
    }
}

impl MixedStrategy<f64> {
    /// Builds a strategy from solver output: clamps tiny negatives, drops
    /// entries below `drop_tol` and renormalizes.
    pub fn from_weights(
        side: Side,
        budget: usize,
        entries: impl IntoIterator<Item = (IndexSet, f64)>,
        drop_tol: f64,
    ) -> Result<Self> {
        let kept: Vec<(IndexSet, f64)> = entries.into_iter().filter(|(_, p)| *p > drop_tol).collect();
        let total: f64 = kept.iter().map(|(_, p)| p).sum();
        if kept.is_empty() || total <= 0.0 {
            return Err(Error::EmptyStrategy);
        }
        Self::new(side, budget, kept.into_iter().map(|(a, p)| (a, p / total)))
    }

    pub fn to_file(&self, model: &DetectionModel) -> StrategyFile {
        let support = self
            .support
            .iter()
            .map(|(a, &prob)| StrategyEntry {
                action: match self.side {
                    Side::Defender => model.node_ids(a),
                    Side::Attacker => model.component_ids(a),
                },
                prob,
            })
            .collect();
        StrategyFile {
            side: self.side,
            budget: self.budget,
            support,
        }
    }

    pub fn from_file(model: &DetectionModel, file: &StrategyFile) -> Result<Self> {
        let entries = file
            .support
            .iter()
            .map(|entry| {
                let action = match file.side {
                    Side::Defender => model.node_set(&entry.action)?,
                    Side::Attacker => model.component_set(&entry.action)?,
                };
                Ok((action, entry.prob))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.side, file.budget, entries)
    }
}

/// On-disk strategy format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyFile {
    pub side: Side,
    pub budget: usize,
    pub support: Vec<StrategyEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub action: Vec<String>,
    pub prob: f64,
}

impl StrategyFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Uniform mixture over the `n` wrap-around windows of length `budget` in
/// `base`, so every base element is chosen with probability exactly
/// `budget / n`.
///
/// Windows that coincide (only when `budget == n`) are merged.
pub fn cyclic_strategy(side: Side, base: &[usize], budget: usize) -> Result<MixedStrategy<Rational>> {
    let n = base.len();
    if budget == 0 || budget > n {
        return Err(Error::Budget(format!(
            "cyclic construction needs 1 <= budget <= {n}, got {budget}"
        )));
    }
    if IndexSet::new(base.iter().copied()).len() != n {
        return Err(Error::InvalidStrategy("cyclic base has repeated elements".into()));
    }
    let weight = Rational::new(1, n as i64);
    let windows = (0..n).map(|k| {
        let window: IndexSet = (0..budget).map(|t| base[(k + t) % n]).collect();
        (window, weight)
    });
    MixedStrategy::new(side, budget, windows)
}
