//! Equilibrium oracle for small instances: both players' exact-budget action
//! sets are enumerated and the zero-sum matrix game is solved as one LP.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::covers::{solve_msc, CoverMode};
use crate::error::{Error, Result};
use crate::game::{cheapest_components, GameParams};
use crate::lp::{solve_lp, LpProblem, RowSense, Sense};
use crate::model::{DetectionModel, IndexSet};
use crate::strategies::{MixedStrategy, Side};

/// Upper limit on the number of enumerated actions per player.
pub const ENUMERATION_LIMIT: u64 = 50_000;
/// Dense LP size limits (matrix entries, rows).
const DENSE_ENTRY_LIMIT: u64 = 12_000_000;
const DENSE_ROW_LIMIT: u64 = 3_000;
const WEIGHT_DROP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// Defender LP: one row per attack plan.
    Defender,
    /// Attacker LP: one row per detector positioning.
    Attacker,
    /// No LP needed (`b1 = 0` or `b1 >= n*`).
    Trivial,
}

#[derive(Clone, Debug)]
pub struct ExactNE {
    pub params: GameParams,
    pub sigma1: MixedStrategy,
    pub sigma2: MixedStrategy,
    /// Defender's max-min `E[F(S,T)]`.
    pub value: f64,
    pub rate: f64,
    pub formulation: Formulation,
    pub lp_iterations: usize,
}

/// `C(n, k)`, or `None` once it exceeds `cap`.
pub fn binomial_capped(n: usize, k: usize, cap: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > cap as u128 {
            return None;
        }
    }
    Some(c as u64)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<IndexSet> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(IndexSet::new(idx.iter().copied()));
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return out;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn guard(what: &str, n: usize, k: usize) -> Result<u64> {
    binomial_capped(n, k, ENUMERATION_LIMIT).ok_or_else(|| {
        Error::InstanceTooLarge(format!(
            "C({n},{k}) {what} exceed {ENUMERATION_LIMIT}; use column generation instead"
        ))
    })
}

/// Equilibrium of the game with budgets `params`. The smaller of the two
/// equivalent LPs is solved and the other player's strategy is read off its
/// duals.
pub fn solve_exact_ne(model: &DetectionModel, params: GameParams) -> Result<ExactNE> {
    params.validate(model)?;
    if let Some(ne) = trivial(model, params)? {
        return Ok(ne);
    }
    let rows1 = guard("attack plans", model.component_count(), params.b2)? + 1;
    let rows2 = guard("detector positionings", model.node_count(), params.b1)? + 1;
    let formulation = if rows1 <= rows2 { Formulation::Defender } else { Formulation::Attacker };
    solve_with(model, params, formulation)
}

/// Equilibrium inspection strategy and rate `r*_{b1}` from the single-attack
/// game. The strategy stays in equilibrium for every `b2 < m*`.
pub fn solve_exact_ne_b2_one(model: &DetectionModel, b1: usize) -> Result<ExactNE> {
    let params = GameParams::new(b1, 1);
    params.validate(model)?;
    if let Some(ne) = trivial(model, params)? {
        return Ok(ne);
    }
    guard("detector positionings", model.node_count(), b1)?;
    solve_with(model, params, Formulation::Defender)
}

fn trivial(model: &DetectionModel, params: GameParams) -> Result<Option<ExactNE>> {
    let (b1, b2) = (params.b1, params.b2);
    let first_plan = || IndexSet::new(0..b2);
    if b1 == 0 {
        return Ok(Some(ExactNE {
            params,
            sigma1: MixedStrategy::pure(Side::Defender, 0, IndexSet::empty())?,
            sigma2: MixedStrategy::pure(Side::Attacker, b2, first_plan())?,
            value: 0.0,
            rate: 0.0,
            formulation: Formulation::Trivial,
            lp_iterations: 0,
        }));
    }
    let cover = solve_msc(model, CoverMode::Exact)?;
    if b1 < cover.size {
        return Ok(None);
    }
    // every component is monitored, so every plan is fully detected
    let eta = vec![1.0; model.component_count()];
    let (plan, _) = cheapest_components(&eta, b2);
    Ok(Some(ExactNE {
        params,
        sigma1: MixedStrategy::pure(Side::Defender, b1, cover.cover)?,
        sigma2: MixedStrategy::pure(Side::Attacker, b2, plan)?,
        value: b2 as f64,
        rate: 1.0,
        formulation: Formulation::Trivial,
        lp_iterations: 0,
    }))
}

fn check_dense(rows: usize, cols: usize) -> Result<()> {
    if rows as u64 > DENSE_ROW_LIMIT || (rows as u64) * (cols as u64) > DENSE_ENTRY_LIMIT {
        return Err(Error::InstanceTooLarge(format!(
            "equilibrium LP with {rows} rows and {cols} columns is too large for the dense solver; \
             use column generation instead"
        )));
    }
    Ok(())
}

fn solve_with(model: &DetectionModel, params: GameParams, formulation: Formulation) -> Result<ExactNE> {
    let positionings = k_subsets(model.node_count(), params.b1);
    let plans = k_subsets(model.component_count(), params.b2);
    let covered: Vec<FixedBitSet> = positionings.iter().map(|s| model.monitored_bits(s)).collect();
    let f = |s: usize, t: &IndexSet| t.iter().filter(|&e| covered[s].contains(e)).count() as f64;

    // variables: [value, weights...]; the value variable is free
    let (rows, cols) = match formulation {
        Formulation::Defender => (plans.len() + 1, positionings.len() + 1),
        _ => (positionings.len() + 1, plans.len() + 1),
    };
    check_dense(rows, cols)?;
    let mut cost = vec![0.0; cols];
    cost[0] = 1.0;
    let sense = if formulation == Formulation::Defender { Sense::Maximize } else { Sense::Minimize };
    let mut lp = LpProblem::new(sense, cost);
    lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
    match formulation {
        Formulation::Defender => {
            // value <= Σ_S σ_S F(S,T)  for every plan T
            for t in &plans {
                let mut row = Vec::with_capacity(cols);
                row.push(1.0);
                row.extend((0..positionings.len()).map(|s| -f(s, t)));
                lp.add_row(row, RowSense::Le, 0.0);
            }
        }
        _ => {
            // value >= Σ_T τ_T F(S,T)  for every positioning S
            for s in 0..positionings.len() {
                let mut row = Vec::with_capacity(cols);
                row.push(1.0);
                row.extend(plans.iter().map(|t| -f(s, t)));
                lp.add_row(row, RowSense::Ge, 0.0);
            }
        }
    }
    let mut simplex_row = vec![1.0; cols];
    simplex_row[0] = 0.0;
    lp.add_row(simplex_row, RowSense::Eq, 1.0);

    let sol = solve_lp(&lp)?.require_optimal()?;
    let n_game_rows = rows - 1;
    let primal = sol.primal[1..].iter().copied();
    let dual = sol.dual[..n_game_rows].iter().copied();
    let (w1, w2): (Vec<f64>, Vec<f64>) = match formulation {
        Formulation::Defender => (primal.collect(), dual.collect()),
        _ => (dual.collect(), primal.collect()),
    };
    let sigma1 = MixedStrategy::from_weights(Side::Defender, params.b1, positionings.into_iter().zip(w1), WEIGHT_DROP)?;
    let sigma2 = MixedStrategy::from_weights(Side::Attacker, params.b2, plans.into_iter().zip(w2), WEIGHT_DROP)?;
    Ok(ExactNE {
        params,
        sigma1,
        sigma2,
        value: sol.objective,
        rate: sol.objective / params.b2 as f64,
        formulation,
        lp_iterations: sol.iterations,
    })
}
