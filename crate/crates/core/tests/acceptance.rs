//! Acceptance suite. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use inspectra_core::colgen::{solve_colgen, ColgenOptions};
use inspectra_core::covers::{CoverMode, CoverSummary};
use inspectra_core::decomp::{decompose, equilibrium_attack, MarginalTarget};
use inspectra_core::exact::{solve_exact_ne, solve_exact_ne_b2_one, ExactNE};
use inspectra_core::game::{best_response_attacker, expected_payoffs, verify_epsilon_ne, GameParams};
use inspectra_core::generate::{generate, Family, GenConfig};
use inspectra_core::model::{DetectionModel, IndexSet};
use inspectra_core::planner::{plan_approx, plan_certificates, plan_exact};
use inspectra_core::strategies::{cyclic_strategy, MixedStrategy, Rational, Side};
use inspectra_core::target::Alpha;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `F(S,T)` straight from the monitoring sets.
fn detected(model: &DetectionModel, s: &[usize], t: &[usize]) -> usize {
    t.iter().filter(|&&e| s.iter().any(|&i| model.monitors(i, e))).count()
}

/// Deviation gain of a profile, by enumerating every pure deviation.
fn brute_epsilon(model: &DetectionModel, b1: usize, b2: usize, s1: &MixedStrategy, s2: &MixedStrategy) -> f64 {
    let u1: f64 = s1
        .iter()
        .flat_map(|(s, p)| s2.iter().map(move |(t, q)| (s, t, p * q)))
        .map(|(s, t, w)| w * detected(model, s.as_slice(), t.as_slice()) as f64)
        .sum();
    let size2: f64 = s2.iter().map(|(t, q)| q * t.len() as f64).sum();
    let u2 = size2 - u1;
    let best1 = subsets(model.node_count(), b1)
        .iter()
        .map(|s| s2.iter().map(|(t, q)| q * detected(model, s, t.as_slice()) as f64).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let best2 = subsets(model.component_count(), b2)
        .iter()
        .map(|t| t.len() as f64 - s1.iter().map(|(s, p)| p * detected(model, s.as_slice(), t) as f64).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    (best1 - u1).max(best2 - u2).max(0.0)
}

fn cyclic_profile(covers: &CoverSummary, b1: usize, b2: usize) -> (MixedStrategy, MixedStrategy) {
    let s1 = cyclic_strategy(Side::Defender, covers.cover.as_slice(), b1).unwrap().to_f64();
    let s2 = cyclic_strategy(Side::Attacker, covers.packing.as_slice(), b2).unwrap().to_f64();
    (s1, s2)
}

fn random_suite() -> Vec<DetectionModel> {
    (0..50u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            generate(&GenConfig {
                node_count: rng.random_range(3..=10),
                component_count: rng.random_range(3..=10),
                mean_set_size: 2.5,
                seed,
                family: if seed % 3 == 0 { Family::Interval } else { Family::RandomBipartite },
            })
            .unwrap()
        })
        .collect()
}

struct Solved {
    model: DetectionModel,
    covers: CoverSummary,
    /// Oracle equilibria for every `b1 < n*`, `b2 < m*`.
    equilibria: Vec<ExactNE>,
}

fn solve_suite(models: Vec<DetectionModel>) -> Result<Vec<Solved>, String> {
    models
        .into_iter()
        .map(|model| {
            let covers = CoverSummary::compute(&model, CoverMode::Exact).map_err(err)?;
            let mut equilibria = Vec::new();
            for b1 in 1..covers.n_star {
                for b2 in 1..covers.m_star {
                    equilibria.push(solve_exact_ne(&model, GameParams::new(b1, b2)).map_err(err)?);
                }
            }
            Ok(Solved {
                model,
                covers,
                equilibria,
            })
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let alpha = Alpha::new(0.75).map_err(err)?;
    let start = Instant::now();
    let c = plan_certificates(4, 3, alpha, 2).map_err(err)?;
    let elapsed = start.elapsed();
    ensure(c.b1 == 3, || format!("b1' = {}", c.b1))?;
    ensure(c.gap == 0, || format!("gap = {}", c.gap))?;
    ensure(c.epsilon == Rational::new(1, 2), || format!("epsilon = {}", c.epsilon))?;
    ensure(c.relative_loss_bound == Rational::new(1, 4), || {
        format!("loss bound = {}", c.relative_loss_bound)
    })?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;

    // the eight-node example network reproduces the same certificates
    let model = DetectionModel::read(data("eight_node.json")).map_err(err)?;
    let report = plan_approx(&model, alpha, 2, CoverMode::Exact).map_err(err)?;
    ensure(report.covers.n_star == 4 && report.covers.m_star == 3, || {
        format!("n* = {}, m* = {}", report.covers.n_star, report.covers.m_star)
    })?;
    ensure(report.certificates == c, || format!("{:?}", report.certificates))?;
    let published = [0.0, 2.0 / 7.0, 4.0 / 7.0, 6.0 / 7.0, 1.0, 1.0];
    for (b1, &rate) in published.iter().enumerate() {
        let ne = solve_exact_ne(&model, GameParams::new(b1, 2)).map_err(err)?;
        ensure((ne.rate - rate).abs() <= 1e-9, || format!("b1 = {b1}: rate {} vs {rate}", ne.rate))?;
    }
    let ne = solve_exact_ne(&model, GameParams::new(3, 2)).map_err(err)?;
    let (u1, u2) = expected_payoffs(&model, &ne.sigma1, &ne.sigma2).map_err(err)?;
    ensure((u1 - 12.0 / 7.0).abs() <= 1e-9 && (u2 - 2.0 / 7.0).abs() <= 1e-9, || {
        format!("equilibrium payoffs {u1}, {u2}")
    })?;
    let cover = model.node_set(&["i3", "i4", "i6", "i8"]).map_err(err)?;
    let packing = model.component_set(&["e3", "e4", "e8"]).map_err(err)?;
    let s1 = cyclic_strategy(Side::Defender, cover.as_slice(), 3).map_err(err)?.to_f64();
    let s2 = cyclic_strategy(Side::Attacker, packing.as_slice(), 2).map_err(err)?.to_f64();
    let (u1, u2) = expected_payoffs(&model, &s1, &s2).map_err(err)?;
    ensure((u1 - 1.5).abs() <= 1e-12 && (u2 - 0.5).abs() <= 1e-12, || {
        format!("cyclic payoffs {u1}, {u2}")
    })?;
    let refined = plan_exact(&model, alpha, 2, 1e-9, ColgenOptions::default()).map_err(err)?;
    let r = refined.refined.as_ref().ok_or("no refinement")?;
    ensure(r.b1 == 3 && (r.rate - 6.0 / 7.0).abs() <= 1e-7, || {
        format!("refined b1 = {}, rate {}", r.b1, r.rate)
    })?;
    Ok(format!("b1'=3 gap=0 eps=1/2 loss=1/4 in {elapsed:?}; example network optimum b1=3"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut models = vec![DetectionModel::read(data("path3.json")).map_err(err)?];
    for seed in 0..20u64 {
        let node_count = 4 + (seed as usize % 5);
        let cells = (node_count / 2) * node_count.div_ceil(2);
        models.push(
            generate(&GenConfig {
                node_count,
                component_count: cells - (seed as usize % 3),
                mean_set_size: 1.0,
                seed,
                family: Family::GridHideAndSeek,
            })
            .map_err(err)?,
        );
    }
    let mut checks = 0;
    for (k, model) in models.iter().enumerate() {
        let covers = CoverSummary::compute(model, CoverMode::Exact).map_err(err)?;
        let n = covers.n_star;
        ensure(n == covers.m_star, || format!("instance {k}: n* {} != m* {}", n, covers.m_star))?;
        for b1 in 1..n {
            for b2 in 1..n {
                let ne = solve_exact_ne(model, GameParams::new(b1, b2)).map_err(err)?;
                let value = (b1 * b2) as f64 / n as f64;
                let rate = b1 as f64 / n as f64;
                ensure((ne.value - value).abs() <= 1e-7 && (ne.rate - rate).abs() <= 1e-7, || {
                    format!("instance {k}, ({b1},{b2}): value {} rate {}", ne.value, ne.rate)
                })?;
                let (s1, s2) = cyclic_profile(&covers, b1, b2);
                let eps = brute_epsilon(model, b1, b2, &s1, &s2);
                ensure(eps <= 1e-7, || format!("instance {k}, ({b1},{b2}): cyclic eps {eps}"))?;
                checks += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{} instances, {checks} budget pairs in {elapsed:?}", models.len()))
}

fn criterion_3(suite: &[Solved]) -> Outcome {
    let mut checks = 0;
    for (k, s) in suite.iter().enumerate() {
        let (n, m) = (s.covers.n_star as f64, s.covers.m_star as f64);
        for ne in &s.equilibria {
            let b1 = ne.params.b1 as f64;
            let (lo, hi) = (b1 / n, (b1 / m).min(1.0));
            ensure(ne.rate >= lo - 1e-9 && ne.rate <= hi + 1e-9, || {
                format!("instance {k}, {:?}: rate {} outside [{lo}, {hi}]", ne.params, ne.rate)
            })?;
            checks += 1;
        }
    }
    Ok(format!("{} instances, {checks} equilibria inside the sandwich", suite.len()))
}

fn criterion_4() -> Outcome {
    let mut found = 0;
    let mut seed = 1000u64;
    let mut checks = 0;
    let mut worst = 0.0f64;
    while found < 25 {
        seed += 1;
        ensure(seed < 5000, || format!("only {found} instances with m* >= 3"))?;
        let model = generate(&GenConfig {
            node_count: 6 + (seed as usize % 4),
            component_count: 8 + (seed as usize % 3),
            mean_set_size: 2.0,
            seed,
            family: Family::RandomBipartite,
        })
        .map_err(err)?;
        let covers = CoverSummary::compute(&model, CoverMode::Exact).map_err(err)?;
        if covers.m_star < 3 {
            continue;
        }
        found += 1;
        for b1 in 1..covers.n_star {
            let r1 = solve_exact_ne(&model, GameParams::new(b1, 1)).map_err(err)?.rate;
            let r2 = solve_exact_ne(&model, GameParams::new(b1, 2)).map_err(err)?.rate;
            ensure((r1 - r2).abs() <= 1e-7, || format!("seed {seed}, b1 {b1}: {r1} vs {r2}"))?;
            let cg = solve_colgen(&model, b1, &covers, ColgenOptions::default()).map_err(err)?;
            let s2 = equilibrium_attack(&model, &cg.state.duals, b1, 2, covers.m_star).map_err(err)?;
            let eps = brute_epsilon(&model, b1, 2, &cg.sigma1, &s2);
            worst = worst.max(eps);
            ensure(eps <= 1e-6, || format!("seed {seed}, b1 {b1}: eps {eps}"))?;
            checks += 1;
        }
    }
    Ok(format!("25 instances, {checks} detector counts, worst eps {worst:.1e}"))
}

fn criterion_5(suite: &[Solved]) -> Outcome {
    let mut checked = 0;
    let mut violations = Vec::new();
    for (k, s) in suite.iter().enumerate() {
        for ne in &s.equilibria {
            let GameParams { b1, b2 } = ne.params;
            let full1 = ne.sigma1.support_sizes().into_iter().all(|x| x == b1);
            let full2 = ne.sigma2.support_sizes().into_iter().all(|x| x == b2);
            let basis_covers = s.model.is_cover(&ne.sigma1.basis());
            if !(full1 && full2 && basis_covers) {
                violations.push(format!("instance {k}, ({b1},{b2})"));
            }
            checked += 1;
        }
    }
    ensure(violations.is_empty(), || format!("violations: {}", violations.join(", ")))?;
    Ok(format!("{checked} equilibria, zero violations"))
}

fn criterion_6(suite: &[Solved]) -> Outcome {
    let mut checks = 0;
    let mut slack = f64::INFINITY;
    for (k, s) in suite.iter().enumerate() {
        let (n, m) = (s.covers.n_star, s.covers.m_star);
        for b1 in 1..n {
            let worst_rate = {
                let s1 = cyclic_strategy(Side::Defender, s.covers.cover.as_slice(), b1).map_err(err)?.to_f64();
                let (t, undetected) = best_response_attacker(&s.model, &s1, 1).map_err(err)?;
                let witnessed = s1.iter().map(|(a, p)| p * detected(&s.model, a.as_slice(), t.as_slice()) as f64).sum::<f64>();
                ensure((witnessed - (1.0 - undetected)).abs() <= 1e-12, || format!("instance {k}: witness mismatch"))?;
                witnessed
            };
            ensure((worst_rate - b1 as f64 / n as f64).abs() <= 1e-9, || {
                format!("instance {k}, b1 {b1}: worst rate {worst_rate}")
            })?;
            for b2 in 1..m {
                let (s1, s2) = cyclic_profile(&s.covers, b1, b2);
                let gain = brute_epsilon(&s.model, b1, b2, &s1, &s2);
                let bound = (b1 * b2) as f64 * (1.0 / b1.max(m) as f64 - 1.0 / n as f64);
                ensure(gain <= bound + 1e-9, || format!("instance {k}, ({b1},{b2}): gain {gain} > {bound}"))?;
                let cert = verify_epsilon_ne(&s.model, GameParams::new(b1, b2), &s1, &s2).map_err(err)?;
                ensure((cert.epsilon - gain).abs() <= 1e-9, || format!("instance {k}: certificate {} vs {gain}", cert.epsilon))?;
                slack = slack.min(bound - gain);
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} profiles within the bound (min slack {slack:.1e})"))
}

fn criterion_7() -> Outcome {
    let mut checks = 0;
    for seed in 0..25u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let model = generate(&GenConfig {
            node_count: rng.random_range(6..=12),
            component_count: rng.random_range(6..=12),
            mean_set_size: 2.5,
            seed: 7000 + seed,
            family: if seed % 2 == 0 { Family::RandomBipartite } else { Family::Interval },
        })
        .map_err(err)?;
        let covers = CoverSummary::compute(&model, CoverMode::Exact).map_err(err)?;
        for b1 in 1..covers.n_star {
            let cg = solve_colgen(&model, b1, &covers, ColgenOptions::default()).map_err(err)?;
            let oracle = solve_exact_ne_b2_one(&model, b1).map_err(err)?;
            ensure((cg.rate - oracle.rate).abs() <= 1e-7, || {
                format!("seed {seed}, b1 {b1}: colgen {} vs oracle {}", cg.rate, oracle.rate)
            })?;
            let history = &cg.state.history;
            let first = history.first().ok_or("empty history")?.z;
            let warm = b1 as f64 / covers.n_star as f64;
            ensure((first - warm).abs() <= 1e-12, || format!("seed {seed}, b1 {b1}: first z {first} vs {warm}"))?;
            ensure(history.windows(2).all(|w| w[1].z >= w[0].z - 1e-12), || {
                format!("seed {seed}, b1 {b1}: z decreased")
            })?;
            checks += 1;
        }
    }
    Ok(format!("25 instances, {checks} colgen solves match the oracle"))
}

/// Random weights scaled to sum `b2`, with entries above one clamped.
fn random_target(rng: &mut ChaCha8Rng) -> MarginalTarget {
    let m = rng.random_range(2..=12);
    let b2 = rng.random_range(1..=m);
    let mut rho: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0f64).powi(2)).collect();
    if rng.random_bool(0.2) {
        rho[rng.random_range(0..m)] = 0.0;
    }
    if rho.iter().filter(|&&r| r > 0.0).count() < b2 {
        rho.iter_mut().for_each(|r| *r += 0.1);
    }
    let mut fixed = vec![false; m];
    loop {
        let free: f64 = rho.iter().zip(&fixed).filter(|(_, f)| !**f).map(|(r, _)| r).sum();
        let want = b2 as f64 - fixed.iter().filter(|f| **f).count() as f64;
        let scale = if free > 0.0 { want / free } else { 0.0 };
        let mut clamped = false;
        for e in 0..m {
            if !fixed[e] {
                rho[e] *= scale;
                if rho[e] >= 1.0 {
                    rho[e] = 1.0;
                    fixed[e] = true;
                    clamped = true;
                }
            }
        }
        if !clamped {
            break;
        }
    }
    MarginalTarget::new(rho.clone(), b2).unwrap_or_else(|e| panic!("{e}: {rho:?} b2={b2}"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let target = random_target(&mut rng);
        let s = decompose(&target).map_err(err)?;
        let sizes = s.support_sizes();
        ensure(sizes.len() == 1 && sizes.contains(&target.b2), || format!("target {k}: sizes {sizes:?}"))?;
        let marg = s.marginal_vector(target.rho.len());
        let error = marg.iter().zip(&target.rho).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(error);
        ensure(error <= 1e-9, || format!("target {k}: marginal error {error}"))?;
    }
    Ok(format!("100 targets, max marginal error {worst:.1e}"))
}

fn random_rational_strategy(rng: &mut ChaCha8Rng, side: Side) -> (MixedStrategy<Rational>, usize) {
    let universe = rng.random_range(1..=10);
    let k = rng.random_range(1..=6);
    let raw: Vec<(IndexSet, i64)> = (0..k)
        .map(|_| {
            let action: IndexSet = (0..universe).filter(|_| rng.random_bool(0.4)).collect();
            (action, rng.random_range(1..=12))
        })
        .collect();
    let total: i64 = raw.iter().map(|(_, w)| w).sum();
    let budget = raw.iter().map(|(a, _)| a.len()).max().unwrap_or(0);
    let s = MixedStrategy::new(side, budget, raw.into_iter().map(|(a, w)| (a, Rational::new(w, total)))).unwrap();
    // the ordered set may hold elements outside the basis
    (s, universe + rng.random_range(0..3))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    for k in 0..200 {
        let side = if k % 2 == 0 { Side::Defender } else { Side::Attacker };
        let (s, n) = random_rational_strategy(&mut rng, side);
        let mut rho: Vec<Rational> = s.marginal_vector(n);
        let expected = s.expected_size();
        match side {
            Side::Defender => rho.sort(),
            Side::Attacker => rho.sort_by(|a, b| b.cmp(a)),
        }
        let mut prefix = Rational::zero();
        for b in 1..=n {
            prefix += rho[b - 1];
            let share = Rational::new(b as i64, n as i64) * expected;
            let ok = match side {
                Side::Defender => prefix <= share,
                Side::Attacker => prefix >= share,
            };
            if !ok {
                violations += 1;
            }
        }
        if prefix != expected || rho.iter().any(|r| *r < Rational::zero() || *r > Rational::one()) {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("200 strategies, zero violations".into())
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(String, BTreeMap<String, Vec<u8>>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_inspectra"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(err)?;
    ensure(out.status.success(), || {
        format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    let mut payload: Value = serde_json::from_slice(&out.stdout).map_err(err)?;
    payload.as_object_mut().ok_or("payload is not an object")?.remove("millis");
    let mut files = BTreeMap::new();
    for entry in walk(dir) {
        let rel = entry.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
        files.insert(rel, std::fs::read(&entry).map_err(err)?);
    }
    Ok((payload.to_string(), files))
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap().flatten() {
        let p = entry.path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn criterion_10() -> Outcome {
    let eight = data("eight_node.json");
    let eight = eight.to_str().unwrap();
    let path3 = data("path3.json");
    let path3 = path3.to_str().unwrap();
    let marginals = r#"{"e1": 0.5, "e2": 0.25, "e3": 0.75, "e4": 0.5}"#;
    let commands: Vec<Vec<&str>> = vec![
        vec!["--seed", "17", "gen", "--family", "random-bipartite", "--nodes", "9", "--components", "11", "--out", "g.json"],
        vec!["--seed", "17", "gen", "--family", "interval", "--nodes", "6", "--components", "8"],
        vec!["--seed", "3", "gen", "--family", "grid-hide-and-seek", "--nodes", "6", "--components", "7"],
        vec!["covers", eight],
        vec!["covers", eight, "--greedy"],
        vec!["plan", eight, "--alpha", "0.75", "--b2", "2", "--out-dir", "plan"],
        vec!["plan", eight, "--alpha", "0.75", "--b2", "2", "--greedy-covers"],
        vec!["--json-pretty", "plan", eight, "--alpha", "0.6", "--b2", "2", "--exact", "--out-dir", "exact"],
        vec!["refine", eight, "--alpha", "0.8", "--b2", "1", "--trace", "trace.csv", "--out-dir", "refine"],
        vec!["solve-exact", eight, "--b1", "2", "--b2", "2", "--out-dir", "ne"],
        vec!["eval", path3, "--sigma1", "s1.json", "--sigma2", "s2.json"],
        vec!["decompose", "--marginals", "m.json", "--b2", "2", "--instance", path3, "--out-dir", "dec"],
    ];
    for args in &commands {
        let mut results = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().map_err(err)?;
            std::fs::write(dir.path().join("m.json"), marginals).map_err(err)?;
            std::fs::write(
                dir.path().join("s1.json"),
                r#"{"side":"defender","budget":1,"support":[{"action":["v1"],"prob":0.5},{"action":["v3"],"prob":0.5}]}"#,
            )
            .map_err(err)?;
            std::fs::write(
                dir.path().join("s2.json"),
                r#"{"side":"attacker","budget":1,"support":[{"action":["e1"],"prob":0.5},{"action":["e4"],"prob":0.5}]}"#,
            )
            .map_err(err)?;
            results.push(run_cli(dir.path(), args)?);
        }
        ensure(results[0] == results[1], || format!("{args:?} differs between runs"))?;
    }
    Ok(format!("{} commands reproduce byte-identical payloads and files", commands.len()))
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, outcome: Outcome, elapsed: Duration| {
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {detail}");
            }
        }
    };
    macro_rules! time {
        ($name:expr, $e:expr) => {{
            let start = Instant::now();
            let outcome = $e;
            report($name, outcome, start.elapsed());
        }};
    }
    time!("1 plan arithmetic", criterion_1());
    time!("2 equal cover and packing sizes", criterion_2());
    let start = Instant::now();
    let suite = solve_suite(random_suite());
    let solve_time = start.elapsed();
    match &suite {
        Ok(suite) => {
            time!("3 equilibrium rate sandwich", criterion_3(suite).map(|d| format!("{d}; oracle solves {solve_time:.2?}")));
            time!("4 attack budget independence", criterion_4());
            time!("5 equilibrium structure", criterion_5(suite));
            time!("6 cyclic profile certificates", criterion_6(suite));
        }
        Err(e) => {
            for name in ["3 equilibrium rate sandwich", "5 equilibrium structure", "6 cyclic profile certificates"] {
                report(name, Err(format!("oracle suite failed: {e}")), solve_time);
            }
            time!("4 attack budget independence", criterion_4());
        }
    }
    time!("7 column generation exactness", criterion_7());
    time!("8 decomposition fidelity", criterion_8());
    time!("9 sorted prefix inequality", criterion_9());
    time!("10 CLI determinism", criterion_10());
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
