//! Column generation for the single-attack equilibrium LP, warm-started from
//! the cyclic strategy on a minimum set cover, and the refinement loop that
//! lowers the detector count while the equilibrium rate still meets `α`.
//!
//! Master problem over a column set `I` of size-`b1` positionings:
//!
//! ```text
//! max z   s.t.   z <= Σ_{S∈I} F(S,{e}) σ_S   for every component e
//!                Σ_{S∈I} σ_S = 1,  σ >= 0
//! ```
//!
//! A new column `S` has reduced cost `Σ_e F(S,{e}) ρ_e − z'` where `ρ` and
//! `z'` are the row duals; pricing is a maximum-weight coverage problem.

use std::collections::HashSet;

use log::debug;

use crate::covers::{CoverMode, CoverSummary};
use crate::error::{Error, Result};
use crate::game::max_weight_coverage;
use crate::lp::{solve_lp, LpProblem, RowSense, Sense};
use crate::model::{DetectionModel, IndexSet, NodeSet};
use crate::strategies::{cyclic_strategy, MixedStrategy, Side};
use crate::target::Alpha;

/// Columns with reduced cost at or below this are not added.
pub const REDUCED_COST_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default)]
pub struct ColgenOptions {
    /// Pricing rounds per solve; `None` means `10·|V|·b1`.
    pub max_iters: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub z: f64,
    pub support_size: usize,
    pub columns: usize,
    /// Reduced cost of the best column priced after this master solve.
    pub reduced_cost: f64,
}

#[derive(Clone, Debug)]
pub struct MasterState {
    pub b1: usize,
    pub columns: Vec<NodeSet>,
    pub weights: Vec<f64>,
    pub z: f64,
    /// `ρ*_e`, one per component.
    pub duals: Vec<f64>,
    /// `z'*`, dual of the convexity row.
    pub convexity_dual: f64,
    pub iteration: usize,
    pub history: Vec<IterationRecord>,
}

#[derive(Clone, Debug)]
pub struct ColgenResult {
    pub rate: f64,
    pub sigma1: MixedStrategy,
    pub state: MasterState,
}

/// `(S, reduced_cost)`: the size-`b1` positioning with the most dual weight
/// monitored, and that weight less `z'`.
pub fn price_column(model: &DetectionModel, duals: &[f64], convexity_dual: f64, b1: usize) -> Result<(NodeSet, f64)> {
    let (s, weight) = max_weight_coverage(model, duals, b1)?;
    Ok((s, weight - convexity_dual))
}

/// `(ε', ℓ')` for an interim master value `r'`:
/// `ε' = b1 b2 (1/max{b1,m*} − r'/b1)` and `ℓ' = 1 − (max{b1,m*}/b1) r'`,
/// both clamped at zero.
pub fn interim_guarantees(r_prime: f64, b1: usize, b2: usize, m_star: usize) -> (f64, f64) {
    if b1 == 0 {
        return (0.0, 0.0);
    }
    let top = b1.max(m_star) as f64;
    let b1f = b1 as f64;
    let eps = b1f * b2 as f64 * (1.0 / top - r_prime / b1f);
    let loss = 1.0 - top / b1f * r_prime;
    (eps.max(0.0), loss.max(0.0))
}

fn solve_master(model: &DetectionModel, columns: &[NodeSet]) -> Result<(f64, Vec<f64>, Vec<f64>, f64)> {
    let m = model.component_count();
    let k = columns.len();
    let covered: Vec<_> = columns.iter().map(|s| model.monitored_bits(s)).collect();
    let mut cost = vec![0.0; k + 1];
    cost[0] = 1.0;
    let mut lp = LpProblem::new(Sense::Maximize, cost);
    lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
    for e in 0..m {
        let mut row = Vec::with_capacity(k + 1);
        row.push(1.0);
        row.extend(covered.iter().map(|c| if c.contains(e) { -1.0 } else { 0.0 }));
        lp.add_row(row, RowSense::Le, 0.0);
    }
    let mut convexity = vec![1.0; k + 1];
    convexity[0] = 0.0;
    lp.add_row(convexity, RowSense::Eq, 1.0);
    let sol = solve_lp(&lp)?.require_optimal()?;
    let duals = sol.dual[..m].iter().map(|&y| y.max(0.0)).collect();
    Ok((sol.objective, sol.primal[1..].to_vec(), duals, sol.dual[m]))
}

/// Equilibrium rate `r*_{b1}` of the single-attack game and an equilibrium
/// inspection strategy.
pub fn solve_colgen(model: &DetectionModel, b1: usize, covers: &CoverSummary, opts: ColgenOptions) -> Result<ColgenResult> {
    if b1 > model.node_count() {
        return Err(Error::Budget(format!("b1 = {b1} exceeds the {} nodes", model.node_count())));
    }
    let empty_state = |columns: Vec<NodeSet>, z: f64| MasterState {
        b1,
        weights: vec![1.0; columns.len()],
        columns,
        z,
        duals: vec![0.0; model.component_count()],
        convexity_dual: z,
        iteration: 0,
        history: Vec::new(),
    };
    if b1 == 0 {
        return Ok(ColgenResult {
            rate: 0.0,
            sigma1: MixedStrategy::pure(Side::Defender, 0, IndexSet::empty())?,
            state: empty_state(vec![IndexSet::empty()], 0.0),
        });
    }
    if b1 >= covers.n_star {
        return Ok(ColgenResult {
            rate: 1.0,
            sigma1: MixedStrategy::pure(Side::Defender, b1, covers.cover.clone())?,
            state: empty_state(vec![covers.cover.clone()], 1.0),
        });
    }

    let warm = cyclic_strategy(Side::Defender, covers.cover.as_slice(), b1)?;
    let mut columns: Vec<NodeSet> = warm.support().keys().cloned().collect();
    let mut seen: HashSet<NodeSet> = columns.iter().cloned().collect();
    let cap = opts.max_iters.unwrap_or(10 * model.node_count() * b1);
    let mut history = Vec::new();
    let mut iteration = 0;
    loop {
        let (z, weights, duals, convexity_dual) = solve_master(model, &columns)?;
        let (candidate, reduced_cost) = price_column(model, &duals, convexity_dual, b1)?;
        let support_size = weights.iter().filter(|&&w| w > 1e-12).count();
        debug!("b1={b1} iter={iteration} z={z} reduced_cost={reduced_cost} columns={}", columns.len());
        history.push(IterationRecord {
            iteration,
            z,
            support_size,
            columns: columns.len(),
            reduced_cost,
        });
        let done = reduced_cost <= REDUCED_COST_TOL || seen.contains(&candidate);
        if done || iteration >= cap {
            let state = MasterState {
                b1,
                columns,
                weights,
                z,
                duals,
                convexity_dual,
                iteration,
                history,
            };
            if !done {
                let (_, loss) = interim_guarantees(z, b1, 1, covers.m_star);
                return Err(Error::IterationCap {
                    iterations: iteration,
                    best_rate: z,
                    loss_bound: loss,
                });
            }
            let sigma1 = MixedStrategy::from_weights(
                Side::Defender,
                b1,
                state.columns.iter().cloned().zip(state.weights.iter().copied()),
                1e-12,
            )?;
            return Ok(ColgenResult { rate: z, sigma1, state });
        }
        seen.insert(candidate.clone());
        columns.push(candidate);
        iteration += 1;
    }
}

#[derive(Clone, Debug)]
pub struct RefinementRecord {
    pub b1: usize,
    pub rate: f64,
    pub sigma1: MixedStrategy,
    pub iterations: usize,
    pub epsilon_prime: f64,
    pub loss_prime: f64,
    /// Single-attack equilibrium marginals read from the final master duals.
    pub duals: Vec<f64>,
    pub history: Vec<IterationRecord>,
}

#[derive(Clone, Debug)]
pub struct RefinementOutcome {
    pub alpha: Alpha,
    pub b2: usize,
    pub covers: CoverSummary,
    /// One record per `b1` tried, from `⌈α n*⌉` downwards.
    pub records: Vec<RefinementRecord>,
    pub selected_b1: usize,
}

impl RefinementOutcome {
    pub fn selected(&self) -> Option<&RefinementRecord> {
        self.records.iter().find(|r| r.b1 == self.selected_b1)
    }
}

/// Starts at `b1 = ⌈α n*⌉` and decrements while the equilibrium rate stays at
/// or above `α` (within `tol`). Exact covers are used.
pub fn refine(model: &DetectionModel, alpha: Alpha, b2: usize, tol: f64, opts: ColgenOptions) -> Result<RefinementOutcome> {
    let covers = CoverSummary::compute(model, CoverMode::Exact)?;
    refine_with(model, alpha, b2, tol, opts, covers)
}

pub fn refine_with(
    model: &DetectionModel,
    alpha: Alpha,
    b2: usize,
    tol: f64,
    opts: ColgenOptions,
    covers: CoverSummary,
) -> Result<RefinementOutcome> {
    if b2 == 0 || b2 > model.component_count() {
        return Err(Error::Budget(format!(
            "b2 must lie in [1, {}], got {b2}",
            model.component_count()
        )));
    }
    let start = alpha.ceil_times(covers.n_star);
    let mut records = Vec::new();
    let mut selected = start;
    let mut b1 = start;
    loop {
        let res = solve_colgen(model, b1, &covers, opts)?;
        let (epsilon_prime, loss_prime) = interim_guarantees(res.rate, b1, b2, covers.m_star);
        let meets = res.rate + tol >= alpha.value();
        records.push(RefinementRecord {
            b1,
            rate: res.rate,
            sigma1: res.sigma1,
            iterations: res.state.iteration,
            epsilon_prime,
            loss_prime,
            duals: res.state.duals,
            history: res.state.history,
        });
        if !meets {
            break;
        }
        selected = b1;
        if b1 == 0 {
            break;
        }
        b1 -= 1;
    }
    Ok(RefinementOutcome {
        alpha,
        b2,
        covers,
        records,
        selected_b1: selected,
    })
}
