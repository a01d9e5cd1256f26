//! Detection model: nodes where detectors can be placed, components that can be
//! attacked, and the monitoring set of every node.
//!
//! Ids are opaque strings. Each node and component gets a dense index in
//! declaration order, and every downstream tie-break uses those indices.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use fixedbitset::FixedBitSet;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical sorted set of dense indices (nodes or components).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

/// Detector positioning `S`.
pub type NodeSet = IndexSet;
/// Attack plan `T`.
pub type ComponentSet = IndexSet;

impl IndexSet {
    pub fn new(items: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// Wraps a vector that is already strictly increasing.
    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        IndexSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IndexSet::new(iter)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// On-disk instance format. Field order and array order are significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub nodes: Vec<String>,
    pub components: Vec<String>,
    pub monitoring: IndexMap<String, Vec<String>>,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }
}

/// A single invariant violation found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateNode(String),
    DuplicateComponent(String),
    UnknownNode(String),
    UnknownComponent { node: String, component: String },
    UncoverableComponent(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode(id) => write!(f, "duplicate node {id}"),
            Violation::DuplicateComponent(id) => write!(f, "duplicate component {id}"),
            Violation::UnknownNode(id) => write!(f, "unknown node {id}"),
            Violation::UnknownComponent { node, component } => {
                write!(f, "unknown component {component} in monitoring set of {node}")
            }
            Violation::UncoverableComponent(id) => write!(f, "uncoverable component {id}"),
        }
    }
}

/// Lists every violated model invariant. An empty list means the instance is valid.
///
/// Nodes with empty (or missing) monitoring sets are allowed.
pub fn validate(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for n in &instance.nodes {
        if !seen.insert(n.as_str()) {
            out.push(Violation::DuplicateNode(n.clone()));
        }
    }
    let mut comps = HashSet::new();
    for c in &instance.components {
        if !comps.insert(c.as_str()) {
            out.push(Violation::DuplicateComponent(c.clone()));
        }
    }
    let mut covered = HashSet::new();
    for (node, set) in &instance.monitoring {
        if !seen.contains(node.as_str()) {
            out.push(Violation::UnknownNode(node.clone()));
            continue;
        }
        for c in set {
            if comps.contains(c.as_str()) {
                covered.insert(c.as_str());
            } else {
                out.push(Violation::UnknownComponent {
                    node: node.clone(),
                    component: c.clone(),
                });
            }
        }
    }
    let mut reported = HashSet::new();
    for c in &instance.components {
        if !covered.contains(c.as_str()) && reported.insert(c.as_str()) {
            out.push(Violation::UncoverableComponent(c.clone()));
        }
    }
    out
}

/// Validated detection model `G = (V, E, {C_i})`. Immutable once built.
#[derive(Clone, Debug)]
pub struct DetectionModel {
    nodes: Vec<String>,
    components: Vec<String>,
    node_index: HashMap<String, usize>,
    component_index: HashMap<String, usize>,
    /// node -> monitored components
    monitoring: Vec<FixedBitSet>,
    /// component -> nodes that monitor it
    watchers: Vec<Vec<usize>>,
}

impl DetectionModel {
    pub fn from_instance(instance: &Instance) -> Result<Self> {
        let violations = validate(instance);
        if !violations.is_empty() {
            return Err(Error::InvalidModel(
                violations.iter().map(ToString::to_string).collect(),
            ));
        }
        let node_index: HashMap<String, usize> = instance
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let component_index: HashMap<String, usize> = instance
            .components
            .iter()
            .enumerate()
            .map(|(e, c)| (c.clone(), e))
            .collect();
        let m = instance.components.len();
        let mut monitoring = vec![FixedBitSet::with_capacity(m); instance.nodes.len()];
        for (node, set) in &instance.monitoring {
            let i = node_index[node];
            for c in set {
                monitoring[i].insert(component_index[c]);
            }
        }
        let mut watchers = vec![Vec::new(); m];
        for (i, bits) in monitoring.iter().enumerate() {
            for e in bits.ones() {
                watchers[e].push(i);
            }
        }
        Ok(DetectionModel {
            nodes: instance.nodes.clone(),
            components: instance.components.clone(),
            node_index,
            component_index,
            monitoring,
            watchers,
        })
    }

    /// Builds a model from index-based monitoring sets with generated ids `v1..`, `e1..`.
    pub fn from_sets(component_count: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let nodes: Vec<String> = (1..=sets.len()).map(|i| format!("v{i}")).collect();
        let components: Vec<String> = (1..=component_count).map(|e| format!("e{e}")).collect();
        let mut monitoring = IndexMap::new();
        for (i, set) in sets.iter().enumerate() {
            let mut ids = Vec::with_capacity(set.len());
            for &e in set {
                let id = components.get(e).ok_or(Error::ComponentIndex(e))?;
                ids.push(id.clone());
            }
            monitoring.insert(nodes[i].clone(), ids);
        }
        Self::from_instance(&Instance {
            nodes,
            components,
            monitoring,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_instance(&Instance::read(path)?)
    }

    /// Canonical instance: every node listed in `monitoring`, components in declared order.
    pub fn to_instance(&self) -> Instance {
        let monitoring = self
            .nodes
            .iter()
            .zip(&self.monitoring)
            .map(|(n, bits)| (n.clone(), bits.ones().map(|e| self.components[e].clone()).collect()))
            .collect();
        Instance {
            nodes: self.nodes.clone(),
            components: self.components.clone(),
            monitoring,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn node_id(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn component_id(&self, e: usize) -> &str {
        &self.components[e]
    }

    pub fn node_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<NodeSet> {
        ids.iter()
            .map(|id| {
                let id = id.as_ref();
                self.node_index
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::UnknownNode(id.to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(IndexSet::new)
    }

    pub fn component_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<ComponentSet> {
        ids.iter()
            .map(|id| {
                let id = id.as_ref();
                self.component_index
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::UnknownComponent(id.to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(IndexSet::new)
    }

    pub fn node_ids(&self, s: &NodeSet) -> Vec<String> {
        s.iter().map(|i| self.nodes[i].clone()).collect()
    }

    pub fn component_ids(&self, t: &ComponentSet) -> Vec<String> {
        t.iter().map(|e| self.components[e].clone()).collect()
    }

    /// Monitoring set `C_i` as a bitset over components.
    pub fn monitoring_bits(&self, i: usize) -> &FixedBitSet {
        &self.monitoring[i]
    }

    /// Nodes whose monitoring set contains component `e`, ascending.
    pub fn watchers(&self, e: usize) -> &[usize] {
        &self.watchers[e]
    }

    /// `F({i}, {e})`.
    pub fn monitors(&self, i: usize, e: usize) -> bool {
        self.monitoring[i].contains(e)
    }

    pub(crate) fn check_nodes(&self, s: &NodeSet) -> Result<()> {
        match s.iter().find(|&i| i >= self.nodes.len()) {
            Some(i) => Err(Error::NodeIndex(i)),
            None => Ok(()),
        }
    }

    pub(crate) fn check_components(&self, t: &ComponentSet) -> Result<()> {
        match t.iter().find(|&e| e >= self.components.len()) {
            Some(e) => Err(Error::ComponentIndex(e)),
            None => Ok(()),
        }
    }

    pub(crate) fn monitored_bits(&self, s: &NodeSet) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.components.len());
        for i in s.iter() {
            bits.union_with(&self.monitoring[i]);
        }
        bits
    }

    /// `C_S`: components monitored by at least one detector in `s`.
    pub fn monitored_set(&self, s: &NodeSet) -> Result<ComponentSet> {
        self.check_nodes(s)?;
        Ok(IndexSet::from_sorted(self.monitored_bits(s).ones().collect()))
    }

    /// Detection function `F(S, T) = |C_S ∩ T|`.
    pub fn detect(&self, s: &NodeSet, t: &ComponentSet) -> Result<usize> {
        self.check_nodes(s)?;
        self.check_components(t)?;
        Ok(self.detect_unchecked(s, t))
    }

    pub(crate) fn detect_unchecked(&self, s: &NodeSet, t: &ComponentSet) -> usize {
        let bits = self.monitored_bits(s);
        t.iter().filter(|&e| bits.contains(e)).count()
    }

    /// Whether `s` monitors every component.
    pub fn is_cover(&self, s: &NodeSet) -> bool {
        s.iter().all(|i| i < self.nodes.len())
            && self.monitored_bits(s).count_ones(..) == self.components.len()
    }

    /// Whether no node monitors two components of `t`.
    pub fn is_packing(&self, t: &ComponentSet) -> bool {
        t.iter().all(|e| e < self.components.len())
            && self
                .monitoring
                .iter()
                .all(|bits| t.iter().filter(|&e| bits.contains(e)).count() <= 1)
    }
}
