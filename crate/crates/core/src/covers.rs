//! Minimum set cover and maximum set packing over a detection model.
//!
//! The exact solvers run a depth-first branch-and-bound on the 0/1 programs
//!
//! ```text
//! MSC:  min Σ_i x_i   s.t.  Σ_{i : e ∈ C_i} x_i >= 1   for every component e
//! MSP:  max Σ_e y_e   s.t.  Σ_{e ∈ C_i} y_e <= 1       for every node i
//! ```
//!
//! bounding with the LP relaxation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpProblem, LpStatus, RowSense, Sense};
use crate::model::{ComponentSet, DetectionModel, IndexSet, NodeSet};

const INT_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMode {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverStatus {
    Exact,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    pub cover: NodeSet,
    pub size: usize,
    pub status: CoverStatus,
    pub node_count_explored: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingResult {
    pub packing: ComponentSet,
    pub size: usize,
    pub status: CoverStatus,
    pub node_count_explored: usize,
}

pub fn solve_msc(model: &DetectionModel, mode: CoverMode) -> Result<CoverResult> {
    let greedy = greedy_cover(model)?;
    if mode == CoverMode::Greedy {
        return Ok(CoverResult {
            size: greedy.len(),
            cover: greedy,
            status: CoverStatus::Heuristic,
            node_count_explored: 0,
        });
    }
    let n = model.node_count();
    let mut lp = LpProblem::new(Sense::Minimize, vec![1.0; n]);
    for e in 0..model.component_count() {
        let mut row = vec![0.0; n];
        for &i in model.watchers(e) {
            row[i] = 1.0;
        }
        lp.add_row(row, RowSense::Ge, 1.0);
    }
    let incumbent = indicator(&greedy, n);
    let (best, explored) = branch_and_bound(lp, incumbent, |x| model.is_cover(&to_set(x)))?;
    let cover = to_set(&best);
    Ok(CoverResult {
        size: cover.len(),
        cover,
        status: CoverStatus::Exact,
        node_count_explored: explored,
    })
}

pub fn solve_msp(model: &DetectionModel, mode: CoverMode) -> Result<PackingResult> {
    let greedy = greedy_packing(model);
    if mode == CoverMode::Greedy {
        return Ok(PackingResult {
            size: greedy.len(),
            packing: greedy,
            status: CoverStatus::Heuristic,
            node_count_explored: 0,
        });
    }
    let m = model.component_count();
    let mut lp = LpProblem::new(Sense::Maximize, vec![1.0; m]);
    for i in 0..model.node_count() {
        let bits = model.monitoring_bits(i);
        if bits.count_ones(..) < 2 {
            continue;
        }
        let row = (0..m).map(|e| if bits.contains(e) { 1.0 } else { 0.0 }).collect();
        lp.add_row(row, RowSense::Le, 1.0);
    }
    let incumbent = indicator(&greedy, m);
    let (best, explored) = branch_and_bound(lp, incumbent, |y| model.is_packing(&to_set(y)))?;
    let packing = to_set(&best);
    Ok(PackingResult {
        size: packing.len(),
        packing,
        status: CoverStatus::Exact,
        node_count_explored: explored,
    })
}

/// Cover and packing sizes with one representative of each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSummary {
    pub n_star: usize,
    pub m_star: usize,
    pub cover: NodeSet,
    pub packing: ComponentSet,
    pub status: CoverStatus,
}

impl CoverSummary {
    pub fn compute(model: &DetectionModel, mode: CoverMode) -> Result<Self> {
        let c = solve_msc(model, mode)?;
        let p = solve_msp(model, mode)?;
        Ok(CoverSummary {
            n_star: c.size,
            m_star: p.size,
            cover: c.cover,
            packing: p.packing,
            status: c.status,
        })
    }
}

/// Drops nodes in reverse declared order while the rest still covers every
/// component.
pub fn minimalize_cover(model: &DetectionModel, cover: &NodeSet) -> Result<NodeSet> {
    model.check_nodes(cover)?;
    let monitored = model.monitored_bits(cover);
    if let Some(e) = (0..model.component_count()).find(|&e| !monitored.contains(e)) {
        return Err(Error::NotACover(model.component_id(e).to_string()));
    }
    let mut keep: Vec<usize> = cover.iter().collect();
    for pos in (0..keep.len()).rev() {
        let candidate: NodeSet = keep.iter().enumerate().filter(|&(k, _)| k != pos).map(|(_, &i)| i).collect();
        if model.is_cover(&candidate) {
            keep.remove(pos);
        }
    }
    Ok(IndexSet::from_sorted(keep))
}

/// Max marginal coverage, ties to the lowest index, then made minimal.
fn greedy_cover(model: &DetectionModel) -> Result<NodeSet> {
    let m = model.component_count();
    let mut covered = fixedbitset::FixedBitSet::with_capacity(m);
    let mut chosen = Vec::new();
    while covered.count_ones(..) < m {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..model.node_count() {
            let gain = model.monitoring_bits(i).difference(&covered).count();
            if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        let Some((i, _)) = best else {
            return Err(Error::InvalidModel(vec!["some component is not monitored by any node".into()]));
        };
        covered.union_with(model.monitoring_bits(i));
        chosen.push(i);
    }
    minimalize_cover(model, &IndexSet::new(chosen))
}

/// Components with the fewest watchers first, skipping conflicts.
fn greedy_packing(model: &DetectionModel) -> ComponentSet {
    let mut order: Vec<usize> = (0..model.component_count()).collect();
    order.sort_by_key(|&e| (model.watchers(e).len(), e));
    let mut used = vec![false; model.node_count()];
    let mut chosen = Vec::new();
    for e in order {
        let w = model.watchers(e);
        if w.iter().any(|&i| used[i]) {
            continue;
        }
        w.iter().for_each(|&i| used[i] = true);
        chosen.push(e);
    }
    IndexSet::new(chosen)
}

fn indicator(set: &IndexSet, n: usize) -> Vec<bool> {
    let mut v = vec![false; n];
    set.iter().for_each(|x| v[x] = true);
    v
}

fn to_set(x: &[bool]) -> IndexSet {
    IndexSet::from_sorted((0..x.len()).filter(|&j| x[j]).collect())
}

/// Depth-first branch-and-bound for a 0/1 program whose objective counts the
/// ones. `incumbent` must be feasible; it is replaced only on strict
/// improvement. Returns the best solution and the number of search nodes.
fn branch_and_bound(
    mut lp: LpProblem,
    incumbent: Vec<bool>,
    feasible: impl Fn(&[bool]) -> bool,
) -> Result<(Vec<bool>, usize)> {
    let n = lp.num_vars();
    let maximize = lp.sense == Sense::Maximize;
    let mut best = incumbent;
    let mut best_value = best.iter().filter(|&&b| b).count();
    let mut explored = 0;
    // each entry: per-variable fixing (None = free)
    let mut stack: Vec<Vec<Option<bool>>> = vec![vec![None; n]];
    while let Some(fix) = stack.pop() {
        explored += 1;
        for (j, f) in fix.iter().enumerate() {
            let (lo, hi) = match f {
                None => (0.0, 1.0),
                Some(true) => (1.0, 1.0),
                Some(false) => (0.0, 0.0),
            };
            lp.set_bounds(j, lo, hi);
        }
        let sol = solve_lp(&lp)?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            other => return Err(Error::Lp(other)),
        }
        let prunes = if maximize {
            (sol.objective + INT_TOL).floor() as usize <= best_value
        } else {
            (sol.objective - INT_TOL).ceil() as usize >= best_value
        };
        if prunes {
            continue;
        }
        let mut branch: Option<(usize, f64)> = None;
        for (j, &x) in sol.primal.iter().enumerate() {
            let frac = (x - x.round()).abs();
            if frac > INT_TOL && branch.is_none_or(|(_, f)| frac > f + 1e-12) {
                branch = Some((j, frac));
            }
        }
        match branch {
            None => {
                let point: Vec<bool> = sol.primal.iter().map(|&x| x > 0.5).collect();
                let value = point.iter().filter(|&&b| b).count();
                let better = if maximize { value > best_value } else { value < best_value };
                if better && feasible(&point) {
                    best = point;
                    best_value = value;
                }
            }
            Some((j, _)) => {
                let mut zero = fix.clone();
                zero[j] = Some(false);
                let mut one = fix;
                one[j] = Some(true);
                stack.push(zero);
                stack.push(one);
            }
        }
    }
    Ok((best, explored))
}
