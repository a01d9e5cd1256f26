use proptest::prelude::*;

use super::*;

fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b}");
}

#[test]
fn single_bound_row() {
    let mut p = LpProblem::new(Sense::Maximize, vec![1.0]);
    p.add_row(vec![1.0], RowSense::Le, 1.0);
    let s = solve_lp(&p).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert_close(s.objective, 1.0, 1e-12);
    assert_close(s.dual[0], 1.0, 1e-12);
}

#[test]
fn tied_vertices_pick_first_variable() {
    let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
    p.add_row(vec![1.0, 1.0], RowSense::Le, 1.0);
    let s = solve_lp(&p).unwrap();
    assert_close(s.objective, 1.0, 1e-12);
    assert_eq!(s.primal, vec![1.0, 0.0]);
}

#[test]
fn negative_equality_is_infeasible() {
    let mut p = LpProblem::new(Sense::Minimize, vec![0.0]);
    p.add_row(vec![1.0], RowSense::Eq, -1.0);
    assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
}

#[test]
fn unbounded_is_reported() {
    let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 0.0]);
    p.add_row(vec![1.0, -1.0], RowSense::Le, 1.0);
    assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn dimension_mismatch_is_an_error() {
    let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
    p.add_row(vec![1.0], RowSense::Le, 1.0);
    assert!(matches!(solve_lp(&p), Err(crate::Error::LpDimension(_))));
}

#[test]
fn general_bounds_and_free_variables() {
    // min x + y  s.t.  x - y = 3,  x in [-2, 5],  y free,  y >= -4
    let mut p = LpProblem::new(Sense::Minimize, vec![1.0, 1.0]);
    p.add_row(vec![1.0, -1.0], RowSense::Eq, 3.0);
    p.add_row(vec![0.0, 1.0], RowSense::Ge, -4.0);
    p.set_bounds(0, -2.0, 5.0);
    p.set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
    let s = solve_lp(&p).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    // x = y + 3 >= -2  =>  y >= -5, and y >= -4  =>  y = -4, x = -1
    assert_close(s.primal[0], -1.0, 1e-12);
    assert_close(s.primal[1], -4.0, 1e-12);
    assert_close(s.objective, -5.0, 1e-12);
}

#[test]
fn upper_bounded_variable() {
    let mut p = LpProblem::new(Sense::Maximize, vec![2.0, 1.0]);
    p.add_row(vec![1.0, 1.0], RowSense::Le, 4.0);
    p.set_bounds(0, 0.0, 1.5);
    let s = solve_lp(&p).unwrap();
    assert_close(s.objective, 5.5, 1e-12);
    assert_close(s.primal[0], 1.5, 1e-12);
}

#[test]
fn matching_pennies_value_and_duals() {
    // max v s.t. v <= x1 - x2, v <= -x1 + x2 (shifted by +1 to keep payoffs >= 0)
    let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 0.0, 0.0]);
    p.add_row(vec![1.0, -2.0, 0.0], RowSense::Le, 0.0);
    p.add_row(vec![1.0, 0.0, -2.0], RowSense::Le, 0.0);
    p.add_row(vec![0.0, 1.0, 1.0], RowSense::Eq, 1.0);
    let s = solve_lp(&p).unwrap();
    assert_close(s.objective, 1.0, 1e-12);
    assert_close(s.primal[1], 0.5, 1e-12);
    assert_close(s.dual[0], 0.5, 1e-12);
    assert_close(s.dual[1], 0.5, 1e-12);
    assert_close(s.dual[2], 1.0, 1e-12);
}

/// Random LP with a known feasible point and a bounding row, so it is
/// feasible and bounded by construction.
fn random_lp() -> impl Strategy<Value = LpProblem> {
    (1usize..=20, 1usize..=20, any::<bool>()).prop_flat_map(|(n, m, maximize)| {
        (
            prop::collection::vec(-5i32..=5, n),
            prop::collection::vec(prop::collection::vec(-4i32..=4, n), m),
            prop::collection::vec(0i32..=3, m),
            prop::collection::vec(0i32..=3, n),
            prop::collection::vec(0u8..3, m),
        )
            .prop_map(move |(c, a, slack, x0, senses)| {
                let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
                let mut p = LpProblem::new(sense, c.iter().map(|&v| v as f64).collect());
                for ((row, s), kind) in a.iter().zip(&slack).zip(&senses) {
                    let lhs: f64 = row.iter().zip(&x0).map(|(&r, &x)| (r * x) as f64).sum();
                    let coeffs: Vec<f64> = row.iter().map(|&v| v as f64).collect();
                    match kind {
                        0 => p.add_row(coeffs, RowSense::Le, lhs + *s as f64),
                        1 => p.add_row(coeffs, RowSense::Ge, lhs - *s as f64),
                        _ => p.add_row(coeffs, RowSense::Eq, lhs),
                    };
                }
                let bound = x0.iter().map(|&x| x as f64).sum::<f64>() + 10.0;
                p.add_row(vec![1.0; n], RowSense::Le, bound);
                p
            })
    })
}

fn check_certificate(p: &LpProblem, s: &LpSolution) {
    assert_eq!(s.status, LpStatus::Optimal);
    let n = p.num_vars();
    let scale = 1.0 + s.objective.abs();
    for (r, row) in p.rows.iter().enumerate() {
        let lhs: f64 = row.iter().zip(&s.primal).map(|(a, x)| a * x).sum();
        let y = s.dual[r];
        match p.row_senses[r] {
            RowSense::Le => assert!(lhs <= p.rhs[r] + 1e-9),
            RowSense::Ge => assert!(lhs >= p.rhs[r] - 1e-9),
            RowSense::Eq => assert_close(lhs, p.rhs[r], 1e-9),
        }
        // shadow-price sign convention
        let sign = if p.sense == Sense::Maximize { 1.0 } else { -1.0 };
        match p.row_senses[r] {
            RowSense::Le => assert!(sign * y >= -1e-9, "row {r} dual {y}"),
            RowSense::Ge => assert!(sign * y <= 1e-9, "row {r} dual {y}"),
            RowSense::Eq => {}
        }
        // complementary slackness
        assert!(((lhs - p.rhs[r]) * y).abs() <= 1e-7, "row {r} slack {} dual {y}", lhs - p.rhs[r]);
    }
    for j in 0..n {
        assert!(s.primal[j] >= -1e-9);
        let reduced: f64 = p.cost[j] - (0..p.num_rows()).map(|r| p.rows[r][j] * s.dual[r]).sum::<f64>();
        match p.sense {
            Sense::Maximize => assert!(reduced <= 1e-7, "var {j} reduced {reduced}"),
            Sense::Minimize => assert!(reduced >= -1e-7, "var {j} reduced {reduced}"),
        }
    }
    let dual_obj: f64 = p.rhs.iter().zip(&s.dual).map(|(b, y)| b * y).sum();
    assert!((dual_obj - s.objective).abs() <= 1e-7 * scale, "primal {} dual {dual_obj}", s.objective);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn strong_duality_on_random_lps(p in random_lp()) {
        let s = solve_lp(&p).unwrap();
        check_certificate(&p, &s);
    }

    #[test]
    fn row_permutation_keeps_value(p in random_lp(), seed in any::<u64>()) {
        let s = solve_lp(&p).unwrap();
        let m = p.num_rows();
        let mut order: Vec<usize> = (0..m).collect();
        // deterministic shuffle from the seed
        let mut state = seed | 1;
        for i in (1..m).rev() {
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            order.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let mut q = LpProblem::new(p.sense, p.cost.clone());
        for &r in &order {
            q.add_row(p.rows[r].clone(), p.row_senses[r], p.rhs[r]);
        }
        let t = solve_lp(&q).unwrap();
        prop_assert_eq!(t.status, LpStatus::Optimal);
        prop_assert!((s.objective - t.objective).abs() <= 1e-9 * (1.0 + s.objective.abs()));
    }
}
