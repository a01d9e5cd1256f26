//! Dense LU factorization with partial pivoting, used to refactor the simplex basis.

pub(crate) struct Lu {
    m: usize,
    /// Row-major, L below the diagonal (unit diagonal implied), U on and above.
    lu: Vec<f64>,
    /// Row `k` of the factored matrix is row `perm[k]` of the input.
    perm: Vec<usize>,
}

const SINGULAR_TOL: f64 = 1e-11;

impl Lu {
    /// Factorizes the row-major `m x m` matrix `a`. Returns `None` when a pivot
    /// falls below the singularity tolerance.
    pub fn factorize(mut a: Vec<f64>, m: usize) -> Option<Lu> {
        debug_assert_eq!(a.len(), m * m);
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let (p, best) = (k..m)
                .map(|r| (r, a[r * m + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best < SINGULAR_TOL {
                return None;
            }
            if p != k {
                for c in 0..m {
                    a.swap(k * m + c, p * m + c);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * m + k];
            for r in (k + 1)..m {
                let f = a[r * m + k] / pivot;
                if f == 0.0 {
                    continue;
                }
                a[r * m + k] = f;
                for c in (k + 1)..m {
                    a[r * m + c] -= f * a[k * m + c];
                }
            }
        }
        Some(Lu { m, lu: a, perm })
    }

    /// Solves `A x = b`, overwriting `b` with `x`.
    pub fn solve(&self, b: &mut [f64]) {
        let m = self.m;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..m {
            let mut s = x[r];
            for c in 0..r {
                s -= self.lu[r * m + c] * x[c];
            }
            x[r] = s;
        }
        for r in (0..m).rev() {
            let mut s = x[r];
            for c in (r + 1)..m {
                s -= self.lu[r * m + c] * x[c];
            }
            x[r] = s / self.lu[r * m + r];
        }
        b.copy_from_slice(&x);
    }

    /// Explicit inverse, row-major.
    pub fn inverse(&self) -> Vec<f64> {
        let m = self.m;
        let mut inv = vec![0.0; m * m];
        let mut col = vec![0.0; m];
        for k in 0..m {
            col.iter_mut().for_each(|v| *v = 0.0);
            col[k] = 1.0;
            self.solve(&mut col);
            for r in 0..m {
                inv[r * m + k] = col[r];
            }
        }
        inv
    }
}
