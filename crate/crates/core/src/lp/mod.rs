//! Dense linear programming with primal and dual solutions.
//!
//! Problems are stated in a general form (mixed row senses, variable bounds)
//! and converted internally to `min c'x, Ax = b, x >= 0` for a two-phase
//! revised simplex.

#[allow(clippy::needless_range_loop)]
mod lu;
#[allow(clippy::needless_range_loop)]
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// The basis became numerically singular during refactorization.
    Singular,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub sense: Sense,
    pub cost: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub row_senses: Vec<RowSense>,
    pub rhs: Vec<f64>,
    /// `(lower, upper)` per variable; infinities allowed.
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    /// New problem over `cost.len()` variables, each bounded to `[0, inf)`.
    pub fn new(sense: Sense, cost: Vec<f64>) -> Self {
        let n = cost.len();
        LpProblem {
            sense,
            cost,
            rows: Vec::new(),
            row_senses: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: RowSense, rhs: f64) -> usize {
        self.rows.push(coeffs);
        self.row_senses.push(sense);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = (lower, upper);
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.cost.len();
        let bad = |msg: String| Err(Error::LpDimension(msg));
        if self.bounds.len() != n {
            return bad(format!("{} bounds for {} variables", self.bounds.len(), n));
        }
        if self.row_senses.len() != self.rows.len() || self.rhs.len() != self.rows.len() {
            return bad("row senses / right-hand sides do not match row count".into());
        }
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {r} has {} coefficients, expected {n}", row.len()));
            }
            if row.iter().any(|v| !v.is_finite()) || !self.rhs[r].is_finite() {
                return bad(format!("row {r} has a non-finite entry"));
            }
        }
        if self.cost.iter().any(|v| !v.is_finite()) {
            return bad("non-finite cost coefficient".into());
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return bad(format!("invalid bounds on variable {j}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    /// Shadow price of each row: the rate of change of the optimal objective
    /// with respect to the row's right-hand side.
    pub dual: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub(crate) fn require_optimal(self) -> Result<Self> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            s => Err(Error::Lp(s)),
        }
    }
}

/// Solves `problem`. Solver breakdowns are reported through [`LpStatus`];
/// only malformed input is an `Err`.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    problem.check()?;
    Ok(simplex::solve(problem))
}

#[cfg(test)]
mod tests;
