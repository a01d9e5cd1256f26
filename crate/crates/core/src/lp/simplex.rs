//! Two-phase revised simplex over an explicit dense basis inverse.
//!
//! The inverse is rebuilt from a fresh LU factorization every
//! `REFACTOR_INTERVAL` pivots and updated with product-form eta steps in
//! between. Entering variables are chosen by Dantzig's rule; after
//! `BLAND_AFTER` consecutive degenerate pivots the solver switches to Bland's
//! rule for the rest of the phase.

use super::lu::Lu;
use super::{LpProblem, LpSolution, LpStatus, RowSense, Sense};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const REFACTOR_INTERVAL: usize = 50;
const BLAND_AFTER: usize = 1000;

enum Column {
    Dense(Vec<f64>),
    /// `sign * e_row`
    Unit { row: usize, sign: f64 },
}

/// How an original variable maps onto nonnegative standard-form columns.
enum VarMap {
    /// `x = lo + s`
    Shift { col: usize, lo: f64 },
    /// `x = hi - s`
    Reflect { col: usize, hi: f64 },
    /// `x = p - q`
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    columns: Vec<Column>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    /// Columns that may never enter the basis (artificials in phase 2).
    artificial_start: usize,
    initial_basis: Vec<usize>,
    /// `-1` for rows that were negated to make the rhs nonnegative.
    row_sign: Vec<f64>,
    var_map: Vec<VarMap>,
}

fn standardize(p: &LpProblem) -> StandardForm {
    let n = p.num_vars();
    let mut var_map = Vec::with_capacity(n);
    let mut structural: Vec<Vec<f64>> = Vec::new();
    let mut cost = Vec::new();
    let mut offset = vec![0.0; n];
    let sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    // (column, upper bound) pairs that need an explicit row
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();

    let column_of = |j: usize, scale: f64| -> Vec<f64> { p.rows.iter().map(|r| scale * r[j]).collect() };

    for j in 0..n {
        let (lo, hi) = p.bounds[j];
        let c = sign * p.cost[j];
        if lo.is_finite() {
            let col = structural.len();
            structural.push(column_of(j, 1.0));
            cost.push(c);
            offset[j] = lo;
            if hi.is_finite() {
                upper_rows.push((col, hi - lo));
            }
            var_map.push(VarMap::Shift { col, lo });
        } else if hi.is_finite() {
            let col = structural.len();
            structural.push(column_of(j, -1.0));
            cost.push(-c);
            offset[j] = hi;
            var_map.push(VarMap::Reflect { col, hi });
        } else {
            let pos = structural.len();
            structural.push(column_of(j, 1.0));
            structural.push(column_of(j, -1.0));
            cost.push(c);
            cost.push(-c);
            var_map.push(VarMap::Split { pos, neg: pos + 1 });
        }
    }

    let m0 = p.num_rows();
    let m = m0 + upper_rows.len();
    for col in structural.iter_mut() {
        col.resize(m, 0.0);
    }
    let mut senses: Vec<RowSense> = p.row_senses.clone();
    let mut rhs: Vec<f64> = (0..m0)
        .map(|r| p.rhs[r] - (0..n).map(|j| p.rows[r][j] * offset[j]).sum::<f64>())
        .collect();
    for (k, &(col, ub)) in upper_rows.iter().enumerate() {
        structural[col][m0 + k] = 1.0;
        senses.push(RowSense::Le);
        rhs.push(ub);
    }

    let mut row_sign = vec![1.0; m];
    for r in 0..m {
        if rhs[r] < 0.0 {
            row_sign[r] = -1.0;
            rhs[r] = -rhs[r];
            for col in structural.iter_mut() {
                col[r] = -col[r];
            }
        }
    }

    let mut columns: Vec<Column> = structural.into_iter().map(Column::Dense).collect();
    let mut initial_basis = vec![usize::MAX; m];
    for r in 0..m {
        let slack_sign = match senses[r] {
            RowSense::Le => 1.0,
            RowSense::Ge => -1.0,
            RowSense::Eq => continue,
        } * row_sign[r];
        if slack_sign > 0.0 {
            initial_basis[r] = columns.len();
        }
        columns.push(Column::Unit { row: r, sign: slack_sign });
        cost.push(0.0);
    }
    let artificial_start = columns.len();
    for r in 0..m {
        if initial_basis[r] == usize::MAX {
            initial_basis[r] = columns.len();
            columns.push(Column::Unit { row: r, sign: 1.0 });
            cost.push(0.0);
        }
    }

    StandardForm {
        columns,
        cost,
        rhs,
        artificial_start,
        initial_basis,
        row_sign,
        var_map,
    }
}

struct Revised<'a> {
    sf: &'a StandardForm,
    m: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    x_b: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
    Singular,
}

impl<'a> Revised<'a> {
    fn new(sf: &'a StandardForm) -> Self {
        let m = sf.rhs.len();
        let mut in_basis = vec![false; sf.columns.len()];
        for &b in &sf.initial_basis {
            in_basis[b] = true;
        }
        let mut binv = vec![0.0; m * m];
        for r in 0..m {
            binv[r * m + r] = 1.0;
        }
        Revised {
            sf,
            m,
            basis: sf.initial_basis.clone(),
            in_basis,
            binv,
            x_b: sf.rhs.clone(),
            since_refactor: 0,
            iterations: 0,
        }
    }

    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            match &self.sf.columns[j] {
                Column::Dense(v) => {
                    for r in 0..m {
                        b[r * m + k] = v[r];
                    }
                }
                Column::Unit { row, sign } => b[row * m + k] = *sign,
            }
        }
        let Some(lu) = Lu::factorize(b, m) else {
            return false;
        };
        self.binv = lu.inverse();
        let mut x = self.sf.rhs.clone();
        lu.solve(&mut x);
        self.x_b = x;
        self.since_refactor = 0;
        true
    }

    /// `B^{-1} a_j`
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        match &self.sf.columns[j] {
            Column::Dense(v) => (0..m)
                .map(|i| {
                    let row = &self.binv[i * m..(i + 1) * m];
                    row.iter().zip(v).map(|(a, b)| a * b).sum()
                })
                .collect(),
            Column::Unit { row, sign } => (0..m).map(|i| sign * self.binv[i * m + row]).collect(),
        }
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &j) in self.basis.iter().enumerate() {
            let c = cost[j];
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, bk) in y.iter_mut().zip(row) {
                    *yk += c * bk;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[f64], y: &[f64]) -> f64 {
        match &self.sf.columns[j] {
            Column::Dense(v) => cost[j] - v.iter().zip(y).map(|(a, b)| a * b).sum::<f64>(),
            Column::Unit { row, sign } => cost[j] - sign * y[*row],
        }
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64]) {
        let m = self.m;
        let theta = self.x_b[r] / alpha[r];
        for i in 0..m {
            if i != r {
                self.x_b[i] -= theta * alpha[i];
            }
        }
        self.x_b[r] = theta;
        let piv = alpha[r];
        for k in 0..m {
            self.binv[r * m + k] /= piv;
        }
        for i in 0..m {
            if i == r || alpha[i] == 0.0 {
                continue;
            }
            let f = alpha[i];
            for k in 0..m {
                self.binv[i * m + k] -= f * self.binv[r * m + k];
            }
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[q] = true;
        self.basis[r] = q;
        self.since_refactor += 1;
        self.iterations += 1;
    }

    fn run_phase(&mut self, cost: &[f64], entering_limit: usize, max_iters: usize) -> PhaseEnd {
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let start = self.iterations;
        loop {
            if self.iterations - start >= max_iters {
                return PhaseEnd::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_INTERVAL && !self.refactor() {
                return PhaseEnd::Singular;
            }
            let y = self.duals(cost);
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..entering_limit {
                if self.in_basis[j] {
                    continue;
                }
                let d = self.reduced_cost(j, cost, &y);
                if d < -OPT_TOL {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d < best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, _)) = entering else {
                return PhaseEnd::Optimal;
            };
            let alpha = self.ftran(q);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if alpha[i] <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.x_b[i].max(0.0) / alpha[i];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best);
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                alpha[i] > alpha[r]
                            }
                        } else {
                            ratio < best
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((r, theta)) = leave else {
                return PhaseEnd::Unbounded;
            };
            if theta <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= BLAND_AFTER {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q, &alpha);
        }
    }

    /// Pivots basic artificials at zero level out of the basis where possible.
    fn evict_artificials(&mut self) {
        let m = self.m;
        let start = self.sf.artificial_start;
        for r in 0..m {
            if self.basis[r] < start {
                continue;
            }
            let row = self.binv[r * m..(r + 1) * m].to_vec();
            let candidate = (0..start).find(|&j| {
                if self.in_basis[j] {
                    return false;
                }
                let v: f64 = match &self.sf.columns[j] {
                    Column::Dense(col) => row.iter().zip(col).map(|(a, b)| a * b).sum(),
                    Column::Unit { row: k, sign } => sign * row[*k],
                };
                v.abs() > 1e-7
            });
            if let Some(q) = candidate {
                let alpha = self.ftran(q);
                self.pivot(r, q, &alpha);
            }
        }
    }
}

pub(super) fn solve(p: &LpProblem) -> LpSolution {
    let sf = standardize(p);
    let m = sf.rhs.len();
    let ncols = sf.columns.len();
    let max_iters = 50 * (m + ncols) + 10_000;
    let fail = |status: LpStatus, iterations: usize| LpSolution {
        status,
        objective: f64::NAN,
        primal: vec![f64::NAN; p.num_vars()],
        dual: vec![f64::NAN; p.num_rows()],
        iterations,
    };

    let mut rs = Revised::new(&sf);

    if sf.artificial_start < ncols {
        let mut phase1 = vec![0.0; ncols];
        for c in phase1.iter_mut().skip(sf.artificial_start) {
            *c = 1.0;
        }
        match rs.run_phase(&phase1, ncols, max_iters) {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded | PhaseEnd::Singular => return fail(LpStatus::Singular, rs.iterations),
            PhaseEnd::IterationLimit => return fail(LpStatus::IterationLimit, rs.iterations),
        }
        if !rs.refactor() {
            return fail(LpStatus::Singular, rs.iterations);
        }
        let infeas: f64 = rs
            .basis
            .iter()
            .zip(&rs.x_b)
            .filter(|(&j, _)| j >= sf.artificial_start)
            .map(|(_, &x)| x.max(0.0))
            .sum();
        let scale = 1.0 + sf.rhs.iter().fold(0.0f64, |a, &b| a.max(b));
        if infeas > FEAS_TOL * scale {
            return fail(LpStatus::Infeasible, rs.iterations);
        }
        rs.evict_artificials();
    }

    match rs.run_phase(&sf.cost, sf.artificial_start, max_iters) {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => return fail(LpStatus::Unbounded, rs.iterations),
        PhaseEnd::Singular => return fail(LpStatus::Singular, rs.iterations),
        PhaseEnd::IterationLimit => return fail(LpStatus::IterationLimit, rs.iterations),
    }
    if !rs.refactor() {
        return fail(LpStatus::Singular, rs.iterations);
    }
    // A fresh factorization can expose a slightly negative reduced cost; polish.
    if rs.run_phase(&sf.cost, sf.artificial_start, max_iters).is_not_optimal() || !rs.refactor() {
        return fail(LpStatus::Singular, rs.iterations);
    }

    let mut x_std = vec![0.0; ncols];
    for (&j, &x) in rs.basis.iter().zip(&rs.x_b) {
        x_std[j] = if x.abs() < 1e-13 { 0.0 } else { x };
    }
    let primal: Vec<f64> = sf
        .var_map
        .iter()
        .map(|vm| match *vm {
            VarMap::Shift { col, lo } => lo + x_std[col],
            VarMap::Reflect { col, hi } => hi - x_std[col],
            VarMap::Split { pos, neg } => x_std[pos] - x_std[neg],
        })
        .collect();
    let y = rs.duals(&sf.cost);
    let sense_sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let dual: Vec<f64> = (0..p.num_rows()).map(|r| sense_sign * sf.row_sign[r] * y[r]).collect();
    let objective = p.cost.iter().zip(&primal).map(|(c, x)| c * x).sum();
    LpSolution {
        status: LpStatus::Optimal,
        objective,
        primal,
        dual,
        iterations: rs.iterations,
    }
}

impl PhaseEnd {
    fn is_not_optimal(&self) -> bool {
        !matches!(self, PhaseEnd::Optimal)
    }
}
