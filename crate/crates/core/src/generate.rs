//! Seeded synthetic detection models.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DetectionModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Each node monitors each component independently.
    RandomBipartite,
    /// Components on a line, each node monitors a contiguous stretch.
    Interval,
    /// Nodes are the rows and columns of a grid, components are cells, and a
    /// cell is monitored by its row and its column. Always has `n* = m*`.
    GridHideAndSeek,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::RandomBipartite => "random-bipartite",
            Family::Interval => "interval",
            Family::GridHideAndSeek => "grid-hide-and-seek",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-bipartite" => Ok(Family::RandomBipartite),
            "interval" => Ok(Family::Interval),
            "grid-hide-and-seek" | "grid" => Ok(Family::GridHideAndSeek),
            _ => Err(Error::GenConfig(format!("unknown family `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub node_count: usize,
    /// For the grid family this caps the number of cells kept.
    pub component_count: usize,
    /// Expected monitoring-set size; unused by the grid family.
    pub mean_set_size: f64,
    pub seed: u64,
    pub family: Family,
}

impl GenConfig {
    fn check(&self) -> Result<()> {
        if self.component_count == 0 {
            return Err(Error::GenConfig("component_count must be at least 1".into()));
        }
        if self.node_count == 0 {
            return Err(Error::GenConfig("node_count must be at least 1".into()));
        }
        if self.family == Family::GridHideAndSeek && self.node_count < 2 {
            return Err(Error::GenConfig("grid needs at least one row and one column".into()));
        }
        if self.family != Family::GridHideAndSeek && !(self.mean_set_size.is_finite() && self.mean_set_size > 0.0) {
            return Err(Error::GenConfig(format!(
                "mean_set_size must be positive, got {}",
                self.mean_set_size
            )));
        }
        Ok(())
    }
}

/// Deterministic in `config`: the same config always yields the same model.
pub fn generate(config: &GenConfig) -> Result<DetectionModel> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match config.family {
        Family::RandomBipartite => random_bipartite(config, &mut rng),
        Family::Interval => interval(config, &mut rng),
        Family::GridHideAndSeek => grid(config, &mut rng),
    }
}

fn random_bipartite(c: &GenConfig, rng: &mut ChaCha8Rng) -> Result<DetectionModel> {
    let (n, m) = (c.node_count, c.component_count);
    let p = (c.mean_set_size / m as f64).min(1.0);
    let mut sets: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..m).filter(|_| rng.random_bool(p)).collect())
        .collect();
    for e in 0..m {
        if !sets.iter().any(|s| s.contains(&e)) {
            let i = rng.random_range(0..n);
            sets[i].push(e);
            sets[i].sort_unstable();
        }
    }
    DetectionModel::from_sets(m, &sets)
}

fn interval(c: &GenConfig, rng: &mut ChaCha8Rng) -> Result<DetectionModel> {
    let (n, m) = (c.node_count, c.component_count);
    let max_len = ((2.0 * c.mean_set_size).round() as usize).clamp(1, m);
    let mut spans: Vec<(usize, usize)> = (0..n)
        .map(|_| {
            let len = rng.random_range(1..=max_len);
            let start = rng.random_range(0..=m - len);
            (start, start + len - 1)
        })
        .collect();
    // stretch the nearest interval over any uncovered component
    for e in 0..m {
        if spans.iter().any(|&(a, b)| a <= e && e <= b) {
            continue;
        }
        let nearest = (0..n)
            .min_by_key(|&i| {
                let (a, b) = spans[i];
                if e < a { a - e } else { e - b }
            })
            .expect("node_count >= 1");
        let (a, b) = &mut spans[nearest];
        *a = (*a).min(e);
        *b = (*b).max(e);
    }
    let sets: Vec<Vec<usize>> = spans.iter().map(|&(a, b)| (a..=b).collect()).collect();
    DetectionModel::from_sets(m, &sets)
}

fn grid(c: &GenConfig, rng: &mut ChaCha8Rng) -> Result<DetectionModel> {
    let rows = c.node_count.div_ceil(2);
    let cols = c.node_count - rows;
    let cells = rows * cols;
    let mut kept = if c.component_count >= cells {
        (0..cells).collect::<Vec<_>>()
    } else {
        sample(rng, cells, c.component_count).into_vec()
    };
    kept.sort_unstable();
    let mut sets = vec![Vec::new(); c.node_count];
    for (e, &cell) in kept.iter().enumerate() {
        sets[cell / cols].push(e);
        sets[rows + cell % cols].push(e);
    }
    DetectionModel::from_sets(kept.len(), &sets)
}
