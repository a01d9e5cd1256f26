//! Payoffs, detection rate, best responses and equilibrium certificates for the
//! inspection game.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComponentSet, DetectionModel, IndexSet, NodeSet};
use crate::strategies::{MixedStrategy, Side};

/// Score tolerance for best-response comparisons.
pub const SCORE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameParams {
    pub b1: usize,
    pub b2: usize,
}

impl GameParams {
    pub fn new(b1: usize, b2: usize) -> Self {
        GameParams { b1, b2 }
    }

    pub fn validate(&self, model: &DetectionModel) -> Result<()> {
        if self.b1 > model.node_count() {
            return Err(Error::Budget(format!(
                "b1 = {} exceeds the {} nodes",
                self.b1,
                model.node_count()
            )));
        }
        if self.b2 == 0 || self.b2 > model.component_count() {
            return Err(Error::Budget(format!(
                "b2 must lie in [1, {}], got {}",
                model.component_count(),
                self.b2
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `b1 >= n*`: one positioning monitors everything.
    #[serde(rename = "b1_ge_n_star")]
    CompleteMonitoring,
    #[serde(rename = "b2_lt_m_star")]
    Interior,
    #[serde(rename = "b2_eq_m_star")]
    Boundary,
    #[serde(rename = "b2_gt_m_star")]
    Saturated,
}

pub fn regime(params: GameParams, n_star: usize, m_star: usize) -> Regime {
    if params.b1 >= n_star {
        Regime::CompleteMonitoring
    } else if params.b2 < m_star {
        Regime::Interior
    } else if params.b2 == m_star {
        Regime::Boundary
    } else {
        Regime::Saturated
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    fn new(lower: f64, upper: f64) -> Self {
        Interval { lower, upper }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lower - tol && x <= self.upper + tol
    }
}

/// Equilibrium payoff and detection-rate ranges implied by the cover sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumBounds {
    pub rate: Interval,
    pub u1: Interval,
    pub u2: Interval,
    pub regime: Regime,
}

/// For `b2 <= m*` and `b1 < n*` the sandwich
/// `b1/n* <= r <= min(b1/m*, 1)` holds at every equilibrium. In the other
/// regimes only the guarantees that survive are kept.
pub fn equilibrium_bounds(n_star: usize, m_star: usize, params: GameParams) -> Result<EquilibriumBounds> {
    if n_star == 0 || m_star == 0 {
        return Err(Error::CoverSize(format!("n* = {n_star}, m* = {m_star}")));
    }
    let (b1, b2) = (params.b1 as f64, params.b2 as f64);
    let (n, m) = (n_star as f64, m_star as f64);
    let regime = regime(params, n_star, m_star);
    let bounds = match regime {
        Regime::CompleteMonitoring => EquilibriumBounds {
            rate: Interval::new(1.0, 1.0),
            u1: Interval::new(0.0, b2),
            u2: Interval::new(0.0, 0.0),
            regime,
        },
        Regime::Interior | Regime::Boundary => EquilibriumBounds {
            rate: Interval::new(b1 / n, (b1 / m).min(1.0)),
            u1: Interval::new(b1 * b2 / n, (b1 * b2 / m).min(b2)),
            u2: Interval::new((b2 * (1.0 - b1 / m)).max(0.0), b2 * (1.0 - b1 / n)),
            regime,
        },
        Regime::Saturated => EquilibriumBounds {
            rate: Interval::new(b1 / n, 1.0),
            u1: Interval::new(0.0, b2),
            u2: Interval::new(0.0, b2 * (1.0 - b1 / n)),
            regime,
        },
    };
    Ok(bounds)
}

pub fn rate_bounds(n_star: usize, m_star: usize, params: GameParams) -> Result<(f64, f64)> {
    let b = equilibrium_bounds(n_star, m_star, params)?;
    Ok((b.rate.lower, b.rate.upper))
}

pub fn payoff_bounds(n_star: usize, m_star: usize, params: GameParams) -> Result<(Interval, Interval)> {
    let b = equilibrium_bounds(n_star, m_star, params)?;
    Ok((b.u1, b.u2))
}

fn expect_side<P: crate::strategies::Probability>(s: &MixedStrategy<P>, side: Side) -> Result<()> {
    if s.side() != side {
        return Err(Error::SideMismatch {
            expected: side.name(),
            found: s.side().name(),
        });
    }
    Ok(())
}

fn check_support(model: &DetectionModel, s: &MixedStrategy) -> Result<()> {
    for action in s.support().keys() {
        match s.side() {
            Side::Defender => model.check_nodes(action)?,
            Side::Attacker => model.check_components(action)?,
        }
    }
    Ok(())
}

/// `η(e)`: probability that component `e` is monitored under `sigma1`.
pub fn monitoring_probabilities(model: &DetectionModel, sigma1: &MixedStrategy) -> Result<Vec<f64>> {
    expect_side(sigma1, Side::Defender)?;
    check_support(model, sigma1)?;
    let mut eta = vec![0.0; model.component_count()];
    for (s, &p) in sigma1.iter() {
        for e in model.monitored_bits(s).ones() {
            eta[e] += p;
        }
    }
    Ok(eta)
}

/// `(u1, u2)` with `u1 = E[F(S,T)]` and `u2 = E[|T|] - u1`.
pub fn expected_payoffs(model: &DetectionModel, sigma1: &MixedStrategy, sigma2: &MixedStrategy) -> Result<(f64, f64)> {
    expect_side(sigma2, Side::Attacker)?;
    check_support(model, sigma2)?;
    let eta = monitoring_probabilities(model, sigma1)?;
    let mut u1 = 0.0;
    let mut size = 0.0;
    for (t, &q) in sigma2.iter() {
        u1 += q * t.iter().map(|e| eta[e]).sum::<f64>();
        size += q * t.len() as f64;
    }
    Ok((u1, size - u1))
}

/// `E[F(S,T) / |T|]`.
pub fn detection_rate(model: &DetectionModel, sigma1: &MixedStrategy, sigma2: &MixedStrategy) -> Result<f64> {
    expect_side(sigma2, Side::Attacker)?;
    check_support(model, sigma2)?;
    if sigma2.support().keys().any(IndexSet::is_empty) {
        return Err(Error::EmptyAttackPlan);
    }
    let eta = monitoring_probabilities(model, sigma1)?;
    Ok(sigma2
        .iter()
        .map(|(t, &q)| q * t.iter().map(|e| eta[e]).sum::<f64>() / t.len() as f64)
        .sum())
}

/// The `b2` least-monitored components (ties by index) and the attacker's
/// payoff `b2 - Σ η` against `sigma1`.
pub fn best_response_attacker(model: &DetectionModel, sigma1: &MixedStrategy, b2: usize) -> Result<(ComponentSet, f64)> {
    if b2 > model.component_count() {
        return Err(Error::Budget(format!(
            "b2 = {b2} exceeds the {} components",
            model.component_count()
        )));
    }
    let eta = monitoring_probabilities(model, sigma1)?;
    Ok(cheapest_components(&eta, b2))
}

pub(crate) fn cheapest_components(eta: &[f64], b2: usize) -> (ComponentSet, f64) {
    let mut order: Vec<usize> = (0..eta.len()).collect();
    order.sort_by(|&a, &b| eta[a].total_cmp(&eta[b]).then(a.cmp(&b)));
    order.truncate(b2);
    let payoff = order.iter().map(|&e| 1.0 - eta[e]).sum();
    (IndexSet::new(order), payoff)
}

/// Exact maximum-weight coverage by `b1` nodes against the attack marginals
/// of `sigma2`.
pub fn best_response_defender(model: &DetectionModel, sigma2: &MixedStrategy, b1: usize) -> Result<(NodeSet, f64)> {
    expect_side(sigma2, Side::Attacker)?;
    check_support(model, sigma2)?;
    let rho = sigma2.marginal_vector(model.component_count());
    max_weight_coverage(model, &rho, b1)
}

/// Chooses exactly `k` nodes maximizing the total weight of the components
/// they monitor. Among optima (to [`SCORE_TOL`]) the lexicographically
/// smallest node set is returned. Negative weights are treated as zero.
pub fn max_weight_coverage(model: &DetectionModel, weights: &[f64], k: usize) -> Result<(NodeSet, f64)> {
    let n = model.node_count();
    if k > n {
        return Err(Error::Budget(format!("cannot choose {k} of {n} nodes")));
    }
    if weights.len() != model.component_count() {
        return Err(Error::LpDimension(format!(
            "{} weights for {} components",
            weights.len(),
            model.component_count()
        )));
    }
    let w: Vec<f64> = weights.iter().map(|&x| x.max(0.0)).collect();
    let seed = greedy_coverage(model, &w, k);
    let mut search = Coverage {
        model,
        w: &w,
        k,
        best_value: seed - 1e-9,
        best: None,
        chosen: Vec::with_capacity(k),
        covered: FixedBitSet::with_capacity(model.component_count()),
    };
    search.dfs(0, 0.0);
    let best = search.best.expect("a k-subset reaching the greedy value exists");
    let value = covered_weight(model, &w, &best);
    Ok((IndexSet::from_sorted(best), value))
}

fn covered_weight(model: &DetectionModel, w: &[f64], nodes: &[usize]) -> f64 {
    let mut bits = FixedBitSet::with_capacity(model.component_count());
    for &i in nodes {
        bits.union_with(model.monitoring_bits(i));
    }
    bits.ones().map(|e| w[e]).sum()
}

fn greedy_coverage(model: &DetectionModel, w: &[f64], k: usize) -> f64 {
    let mut covered = FixedBitSet::with_capacity(model.component_count());
    let mut used = vec![false; model.node_count()];
    let mut total = 0.0;
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..model.node_count()).filter(|&i| !used[i]) {
            let gain: f64 = model.monitoring_bits(i).difference(&covered).map(|e| w[e]).sum();
            if best.is_none_or(|(_, g)| gain > g + SCORE_TOL) {
                best = Some((i, gain));
            }
        }
        let (i, gain) = best.expect("k <= node count");
        used[i] = true;
        covered.union_with(model.monitoring_bits(i));
        total += gain;
    }
    total
}

struct Coverage<'a> {
    model: &'a DetectionModel,
    w: &'a [f64],
    k: usize,
    best_value: f64,
    best: Option<Vec<usize>>,
    chosen: Vec<usize>,
    covered: FixedBitSet,
}

impl Coverage<'_> {
    fn gain(&self, i: usize) -> f64 {
        self.model.monitoring_bits(i).difference(&self.covered).map(|e| self.w[e]).sum()
    }

    /// Include-first DFS over node indices, so complete sets are met in
    /// lexicographic order.
    fn dfs(&mut self, next: usize, value: f64) {
        let n = self.model.node_count();
        let r = self.k - self.chosen.len();
        if r == 0 {
            if value > self.best_value + SCORE_TOL {
                self.best_value = value;
                self.best = Some(self.chosen.clone());
            }
            return;
        }
        if n - next < r {
            return;
        }
        let mut gains: Vec<f64> = (next..n).map(|i| self.gain(i)).collect();
        let first_gain = gains[0];
        gains.sort_by(|a, b| b.total_cmp(a));
        let bound: f64 = value + gains[..r].iter().sum::<f64>();
        if bound <= self.best_value + SCORE_TOL {
            return;
        }
        let added: Vec<usize> = self.model.monitoring_bits(next).difference(&self.covered).collect();
        added.iter().for_each(|&e| self.covered.insert(e));
        self.chosen.push(next);
        self.dfs(next + 1, value + first_gain);
        self.chosen.pop();
        added.iter().for_each(|&e| self.covered.set(e, false));
        self.dfs(next + 1, value);
    }
}

/// Deviation gains of both players against a profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCertificate {
    pub epsilon: f64,
    pub defender_gain: f64,
    pub attacker_gain: f64,
    pub u1: f64,
    pub u2: f64,
}

/// Smallest `ε` for which the profile is an `ε`-equilibrium of the game with
/// budgets `params`, found with exact best responses (pure deviations suffice).
pub fn verify_epsilon_ne(
    model: &DetectionModel,
    params: GameParams,
    sigma1: &MixedStrategy,
    sigma2: &MixedStrategy,
) -> Result<EpsilonCertificate> {
    params.validate(model)?;
    let (u1, u2) = expected_payoffs(model, sigma1, sigma2)?;
    let (_, best1) = best_response_defender(model, sigma2, params.b1)?;
    let (_, best2) = best_response_attacker(model, sigma1, params.b2)?;
    let defender_gain = best1 - u1;
    let attacker_gain = best2 - u2;
    Ok(EpsilonCertificate {
        epsilon: defender_gain.max(attacker_gain).max(0.0),
        defender_gain,
        attacker_gain,
        u1,
        u2,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub u1: f64,
    pub u2: f64,
    pub rate: f64,
    pub epsilon: f64,
    pub bounds: EquilibriumBounds,
    pub regime: Regime,
}

/// Evaluates a profile at the budgets carried by the strategies.
pub fn evaluate_profile(
    model: &DetectionModel,
    sigma1: &MixedStrategy,
    sigma2: &MixedStrategy,
    n_star: usize,
    m_star: usize,
) -> Result<EquilibriumReport> {
    let params = GameParams::new(sigma1.budget(), sigma2.budget());
    let cert = verify_epsilon_ne(model, params, sigma1, sigma2)?;
    let rate = detection_rate(model, sigma1, sigma2)?;
    let bounds = equilibrium_bounds(n_star, m_star, params)?;
    Ok(EquilibriumReport {
        u1: cert.u1,
        u2: cert.u2,
        rate,
        epsilon: cert.epsilon,
        regime: bounds.regime,
        bounds,
    })
}
