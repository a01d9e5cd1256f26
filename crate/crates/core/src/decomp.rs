//! Attack strategies with prescribed marginals.
//!
//! The single-attack equilibrium marginals are first capped at `1/m*` without
//! changing the defender's best-response value, then scaled by `b2` and split
//! into a distribution over size-`b2` attack plans by column generation on
//!
//! ```text
//! min Σ_e s_e   s.t.   Σ_{T ∋ e} σ_T + s_e = ρ_e  for every component e,   σ, s >= 0
//! ```

use std::collections::HashSet;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::max_weight_coverage;
use crate::lp::{solve_lp, LpProblem, RowSense, Sense};
use crate::model::{ComponentSet, DetectionModel, IndexSet};
use crate::strategies::{MixedStrategy, Side};

const CAP_TOL: f64 = 1e-12;
const TARGET_TOL: f64 = 1e-9;
const SLACK_TOL: f64 = 1e-7;

/// Per-component attack probabilities summing to the budget `b2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalTarget {
    pub rho: Vec<f64>,
    pub b2: usize,
}

impl MarginalTarget {
    pub fn new(rho: Vec<f64>, b2: usize) -> Result<Self> {
        let t = MarginalTarget { rho, b2 };
        t.validate()?;
        Ok(t)
    }

    /// `b2 · ρ` for single-attack marginals `ρ`.
    pub fn scaled(single: &[f64], b2: usize) -> Result<Self> {
        Self::new(single.iter().map(|&r| r * b2 as f64).collect(), b2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b2 == 0 || self.b2 > self.rho.len() {
            return Err(Error::InvalidTarget(format!(
                "budget {} must lie in [1, {}]",
                self.b2,
                self.rho.len()
            )));
        }
        if let Some((e, r)) = self
            .rho
            .iter()
            .enumerate()
            .find(|(_, r)| !r.is_finite() || **r < -TARGET_TOL || **r > 1.0 + TARGET_TOL)
        {
            return Err(Error::InvalidTarget(format!("entry {e} is {r}, outside [0, 1]")));
        }
        let total: f64 = self.rho.iter().sum();
        if (total - self.b2 as f64).abs() > TARGET_TOL {
            return Err(Error::InvalidTarget(format!("entries sum to {total}, expected {}", self.b2)));
        }
        Ok(())
    }
}

/// Moves attack probability off components above `1/m*` so that every entry
/// is at most `1/m*`, keeping the total.
///
/// Each round takes the lowest-index over-cap component `e'`, finds the
/// defender's best response `S*` with `b1` detectors, and hands the excess to
/// the under-cap components monitored by `S*` (ascending index, each filled
/// up to the cap). When `rho` is an optimal single-attack strategy this keeps
/// it optimal. For other inputs any remaining excess goes to the remaining
/// under-cap components in index order.
pub fn cap_marginals(model: &DetectionModel, rho: &[f64], b1: usize, m_star: usize) -> Result<Vec<f64>> {
    if rho.len() != model.component_count() {
        return Err(Error::InvalidTarget(format!(
            "{} entries for {} components",
            rho.len(),
            model.component_count()
        )));
    }
    if m_star == 0 {
        return Err(Error::CoverSize("m* = 0".into()));
    }
    let cap = 1.0 / m_star as f64;
    let total: f64 = rho.iter().sum();
    if total > cap * model.component_count() as f64 + CAP_TOL {
        return Err(Error::InvalidTarget(format!(
            "mass {total} cannot be spread over {} components at most {cap} each",
            model.component_count()
        )));
    }
    let mut out: Vec<f64> = rho.iter().map(|&r| r.max(0.0)).collect();
    while let Some(hot) = (0..out.len()).find(|&e| out[e] > cap + CAP_TOL) {
        let mut excess = out[hot] - cap;
        let (best, _) = max_weight_coverage(model, &out, b1.min(model.node_count()))?;
        let watched = model.monitored_bits(&best);
        for e in watched.ones().filter(|&e| e != hot) {
            if excess <= 0.0 {
                break;
            }
            let room = cap - out[e];
            if room > 0.0 {
                let moved = room.min(excess);
                out[e] += moved;
                excess -= moved;
            }
        }
        if excess > CAP_TOL {
            debug!("cap_marginals: best response absorbs too little, spilling {excess} from component {hot}");
            for e in (0..out.len()).filter(|&e| e != hot && !watched.contains(e)) {
                if excess <= 0.0 {
                    break;
                }
                let room = cap - out[e];
                if room > 0.0 {
                    let moved = room.min(excess);
                    out[e] += moved;
                    excess -= moved;
                }
            }
        }
        if excess > CAP_TOL {
            return Err(Error::Numerical(format!(
                "could not bring component {hot} under the 1/m* cap"
            )));
        }
        out[hot] = cap;
    }
    Ok(out)
}

/// Distribution over size-`b2` attack plans whose marginals equal `target`.
pub fn decompose(target: &MarginalTarget) -> Result<MixedStrategy> {
    target.validate()?;
    let m = target.rho.len();
    let b2 = target.b2;
    let rhs: Vec<f64> = target.rho.iter().map(|&r| r.clamp(0.0, 1.0)).collect();
    let mut columns: Vec<ComponentSet> = Vec::new();
    let mut seen: HashSet<ComponentSet> = HashSet::new();
    let cap = 50 * m + 1000;
    for iteration in 0.. {
        // variables: [σ_T for T in columns..., s_e for e in 0..m]
        let k = columns.len();
        let mut cost = vec![0.0; k + m];
        cost[k..].iter_mut().for_each(|c| *c = 1.0);
        let mut lp = LpProblem::new(Sense::Minimize, cost);
        for e in 0..m {
            let mut row = vec![0.0; k + m];
            for (j, t) in columns.iter().enumerate() {
                if t.contains(e) {
                    row[j] = 1.0;
                }
            }
            row[k + e] = 1.0;
            lp.add_row(row, RowSense::Eq, rhs[e]);
        }
        let sol = solve_lp(&lp)?.require_optimal()?;
        let beta = &sol.dual;
        let plan = top_components(beta, b2);
        let gain: f64 = plan.iter().map(|e| beta[e]).sum();
        debug!("decompose iter={iteration} slack={} gain={gain}", sol.objective);
        if gain <= CAP_TOL || seen.contains(&plan) || iteration >= cap {
            if sol.objective > SLACK_TOL {
                return Err(Error::Numerical(format!(
                    "marginal decomposition stopped with residual {}",
                    sol.objective
                )));
            }
            let weights = sol.primal[..k].iter().copied();
            return MixedStrategy::from_weights(Side::Attacker, b2, columns.into_iter().zip(weights), 1e-14);
        }
        seen.insert(plan.clone());
        columns.push(plan);
    }
    unreachable!()
}

/// The `b2` components with the largest `beta`, ties to the lowest index.
fn top_components(beta: &[f64], b2: usize) -> ComponentSet {
    let mut order: Vec<usize> = (0..beta.len()).collect();
    order.sort_by(|&a, &b| beta[b].total_cmp(&beta[a]).then(a.cmp(&b)));
    order.truncate(b2);
    IndexSet::new(order)
}

/// Equilibrium attack strategy for budget `b2 < m*` built from the
/// single-attack duals of the defender's problem.
pub fn equilibrium_attack(
    model: &DetectionModel,
    single_attack: &[f64],
    b1: usize,
    b2: usize,
    m_star: usize,
) -> Result<MixedStrategy> {
    let total: f64 = single_attack.iter().sum();
    let rho: Vec<f64> = if (total - 1.0).abs() <= TARGET_TOL {
        single_attack.to_vec()
    } else {
        // degenerate games (no detectors, or full coverage): any attack is optimal
        vec![1.0 / model.component_count() as f64; model.component_count()]
    };
    let capped = cap_marginals(model, &rho, b1, m_star)?;
    let sum: f64 = capped.iter().sum();
    let normalized: Vec<f64> = capped.iter().map(|&r| r / sum).collect();
    decompose(&MarginalTarget::scaled(&normalized, b2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colgen::{solve_colgen, ColgenOptions};
    use crate::covers::{CoverMode, CoverSummary};
    use crate::game::{verify_epsilon_ne, GameParams};
    use crate::model::fixtures::{arb_model, path3};
    use proptest::prelude::*;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v.iter().copied())
    }

    fn max_error(s: &MixedStrategy, target: &[f64]) -> f64 {
        s.marginal_vector(target.len()).iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn forced_pure_plan() {
        let s = decompose(&MarginalTarget::new(vec![1.0, 1.0, 0.0, 0.0], 2).unwrap()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.support().keys().next().unwrap(), &set(&[0, 1]));
    }

    #[test]
    fn uniform_pairs() {
        let s = decompose(&MarginalTarget::new(vec![0.5; 4], 2).unwrap()).unwrap();
        assert!(max_error(&s, &[0.5; 4]) <= 1e-12);
        assert_eq!(s.support_sizes(), [2].into_iter().collect());
    }

    #[test]
    fn invalid_targets() {
        assert!(matches!(MarginalTarget::new(vec![1.5, 0.5], 2), Err(Error::InvalidTarget(_))));
        assert!(matches!(MarginalTarget::new(vec![0.5, 0.4], 1), Err(Error::InvalidTarget(_))));
    }

    #[test]
    fn cap_examples() {
        let model = path3();
        let rho = [0.5, 0.0, 0.0, 0.5];
        assert_eq!(cap_marginals(&model, &rho, 1, 2).unwrap(), rho.to_vec());
        let out = cap_marginals(&model, &[0.7, 0.0, 0.1, 0.2], 1, 2).unwrap();
        assert!(out.iter().all(|&r| r <= 0.5 + 1e-12));
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    fn arb_target() -> impl Strategy<Value = MarginalTarget> {
        (1usize..12).prop_flat_map(|m| (prop::collection::vec(1u32..100, m), 1..=m)).prop_map(|(raw, b2)| {
            // water-fill b2 units of mass proportionally, capping at 1
            let mut rho = vec![0.0; raw.len()];
            let mut free: Vec<usize> = (0..raw.len()).collect();
            let mut left = b2 as f64;
            while left > 1e-15 && !free.is_empty() {
                let w: f64 = free.iter().map(|&e| raw[e] as f64).sum();
                let scale = left / w;
                let mut next = Vec::new();
                for &e in &free {
                    let want = rho[e] + raw[e] as f64 * scale;
                    if want >= 1.0 {
                        left -= 1.0 - rho[e];
                        rho[e] = 1.0;
                    } else {
                        next.push(e);
                    }
                }
                if next.len() == free.len() {
                    for &e in &free {
                        rho[e] += raw[e] as f64 * scale;
                    }
                    left = 0.0;
                }
                free = next;
            }
            let total: f64 = rho.iter().sum();
            let fix = b2 as f64 - total;
            if let Some(e) = (0..rho.len()).find(|&e| rho[e] + fix <= 1.0 && rho[e] + fix >= 0.0) {
                rho[e] += fix;
            }
            MarginalTarget { rho, b2 }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn reconstructs_marginals(target in arb_target()) {
            prop_assume!(target.validate().is_ok());
            let s = decompose(&target).unwrap();
            prop_assert!(max_error(&s, &target.rho) <= 1e-9);
            prop_assert_eq!(s.support_sizes(), [target.b2].into_iter().collect());
        }

        #[test]
        fn cap_preserves_mass(model in arb_model(6, 8), raw in prop::collection::vec(0u32..20, 8), m_seed in 0usize..8) {
            let m = model.component_count();
            let raw = &raw[..m];
            let total: u32 = raw.iter().sum();
            prop_assume!(total > 0);
            let rho: Vec<f64> = raw.iter().map(|&r| r as f64 / total as f64).collect();
            let m_star = 1 + m_seed % m;
            let out = cap_marginals(&model, &rho, 1, m_star).unwrap();
            prop_assert!(out.iter().all(|&r| r <= 1.0 / m_star as f64 + 1e-12 && r >= 0.0));
            prop_assert!((out.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn colgen_duals_give_equilibrium_attacks(model in arb_model(7, 8), b1s in 0usize..7) {
            let covers = CoverSummary::compute(&model, CoverMode::Exact).unwrap();
            prop_assume!(covers.m_star >= 2);
            let b1 = 1 + b1s % covers.n_star;
            prop_assume!(b1 < covers.n_star);
            let res = solve_colgen(&model, b1, &covers, ColgenOptions::default()).unwrap();
            let capped = cap_marginals(&model, &res.state.duals, b1, covers.m_star).unwrap();
            // capping keeps the defender's best-response value
            let (_, before) = max_weight_coverage(&model, &res.state.duals, b1).unwrap();
            let (_, after) = max_weight_coverage(&model, &capped, b1).unwrap();
            prop_assert!((before - after).abs() <= 1e-9, "{} vs {}", before, after);
            for b2 in 1..covers.m_star {
                let sigma2 = equilibrium_attack(&model, &res.state.duals, b1, b2, covers.m_star).unwrap();
                let cert = verify_epsilon_ne(&model, GameParams::new(b1, b2), &res.sigma1, &sigma2).unwrap();
                prop_assert!(cert.epsilon <= 1e-6, "b2={} epsilon={}", b2, cert.epsilon);
            }
        }
    }
}
