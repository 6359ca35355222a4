//! The hybrid qualitative network: nodes that are probabilistic or
//! deterministic, signed influence edges, pairwise synergies and
//! univariate curvature annotations.
//!
//! A [`Qpn`] is a value. Transformations never mutate a network in place;
//! they clone it and return the result.

mod dot;
mod format;
mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sign::Sign;

pub use dot::to_dot;
pub use format::{load_network, serialize, Diagnostic, LoadError};
pub use validate::{validate, Rule, Violation};

/// Whether a node is a random variable or a function of its parents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    #[serde(rename = "prob")]
    Probabilistic,
    #[serde(rename = "det")]
    Deterministic,
}

impl NodeKind {
    pub fn is_deterministic(self) -> bool {
        self == NodeKind::Deterministic
    }

    /// Strictness given to an edge into a node of this kind when the
    /// declaration does not say otherwise.
    pub fn default_strictness(self) -> bool {
        self.is_deterministic()
    }

    pub fn keyword(self) -> &'static str {
        match self {
            NodeKind::Probabilistic => "prob",
            NodeKind::Deterministic => "det",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A signed influence. Absent edges are zero influences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub sign: Sign,
    pub strict: bool,
}

/// Key of a synergy entry: the unordered pair (stored sorted) and the child.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SynergyKey {
    pub first: String,
    pub second: String,
    pub child: String,
}

impl SynergyKey {
    pub fn new(a: &str, b: &str, child: &str) -> Self {
        let (first, second) = if a <= b { (a, b) } else { (b, a) };
        SynergyKey { first: first.to_string(), second: second.to_string(), child: child.to_string() }
    }

    pub fn involves(&self, node: &str) -> bool {
        self.first == node || self.second == node || self.child == node
    }
}

/// Qualitative probabilistic network.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Qpn {
    nodes: BTreeMap<String, NodeKind>,
    // parent -> child -> edge
    edges: BTreeMap<String, BTreeMap<String, Edge>>,
    synergies: BTreeMap<SynergyKey, Sign>,
    // (parent, child) -> sign of the second partial of child in parent
    curvatures: BTreeMap<(String, String), Sign>,
    // known domain widths: true when more than two values are possible
    widths: BTreeMap<String, bool>,
}

/// Serialized as the canonical text form.
impl Serialize for Qpn {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&serialize(self))
    }
}

impl<'de> Deserialize<'de> for Qpn {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        load_network(&text).map_err(serde::de::Error::custom)
    }
}

/// Error returned by [`QpnBuilder::build`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid network: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidNetwork(pub Vec<Violation>);

/// Lenient construction of a [`Qpn`]. Later declarations overwrite earlier
/// ones; [`QpnBuilder::build`] validates.
#[derive(Clone, Debug, Default)]
pub struct QpnBuilder {
    net: Qpn,
    edges: Vec<(String, String, Sign, Option<bool>)>,
}

impl QpnBuilder {
    pub fn node(mut self, name: &str, kind: NodeKind) -> Self {
        self.net.nodes.insert(name.to_string(), kind);
        self
    }

    pub fn prob(self, name: &str) -> Self {
        self.node(name, NodeKind::Probabilistic)
    }

    pub fn det(self, name: &str) -> Self {
        self.node(name, NodeKind::Deterministic)
    }

    /// Adds an edge with kind-based strictness (resolved at build time).
    pub fn edge(self, parent: &str, child: &str, sign: Sign) -> Self {
        self.edge_with(parent, child, sign, None)
    }

    pub fn edge_with(mut self, parent: &str, child: &str, sign: Sign, strict: Option<bool>) -> Self {
        self.edges.push((parent.to_string(), child.to_string(), sign, strict));
        self
    }

    pub fn synergy(mut self, a: &str, b: &str, child: &str, sign: Sign) -> Self {
        self.net.synergies.insert(SynergyKey::new(a, b, child), sign);
        self
    }

    /// Marks `name` as ranging over more than two values.
    pub fn multivalued(mut self, name: &str) -> Self {
        self.net.widths.insert(name.to_string(), true);
        self
    }

    pub fn curvature(mut self, parent: &str, child: &str, sign: Sign) -> Self {
        self.net.curvatures.insert((parent.to_string(), child.to_string()), sign);
        self
    }

    pub fn build(self) -> Result<Qpn, InvalidNetwork> {
        let net = self.build_unchecked();
        let violations = validate(&net);
        if violations.is_empty() {
            Ok(net)
        } else {
            Err(InvalidNetwork(violations))
        }
    }

    /// Returns the network without checking any invariant.
    pub fn build_unchecked(self) -> Qpn {
        let mut net = self.net;
        for (parent, child, sign, strict) in self.edges {
            let strict = strict.unwrap_or_else(|| net.nodes.get(&child).is_some_and(|k| k.default_strictness()));
            net.edges.entry(parent).or_default().insert(child, Edge { sign, strict });
        }
        // annotated nodes are probed on three-point domains
        let annotated: Vec<String> = net.annotated_nodes().map(str::to_string).collect();
        net.widths.extend(annotated.into_iter().map(|n| (n, true)));
        net
    }
}

impl Qpn {
    pub fn builder() -> QpnBuilder {
        QpnBuilder::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(|m| m.len()).sum()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.nodes.contains_key(name)
    }

    pub fn kind(&self, name: &str) -> Option<NodeKind> {
        self.nodes.get(name).copied()
    }

    pub fn is_deterministic(&self, name: &str) -> bool {
        self.kind(name).is_some_and(NodeKind::is_deterministic)
    }

    /// Node names in lexicographic order.
    pub fn node_names(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&str, NodeKind)> {
        self.nodes.iter().map(|(n, k)| (n.as_str(), *k))
    }

    /// All edges ordered by (parent, child).
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, Edge)> {
        self.edges.iter().flat_map(|(p, m)| m.iter().map(move |(c, e)| (p.as_str(), c.as_str(), *e)))
    }

    pub fn edge(&self, parent: &str, child: &str) -> Option<Edge> {
        self.edges.get(parent).and_then(|m| m.get(child)).copied()
    }

    /// Sign of the influence of `parent` on `child`; zero when unlinked.
    pub fn sign(&self, parent: &str, child: &str) -> Sign {
        self.edge(parent, child).map_or(Sign::Zero, |e| e.sign)
    }

    pub fn children(&self, name: &str) -> Vec<&str> {
        self.edges.get(name).map(|m| m.keys().map(String::as_str).collect()).unwrap_or_default()
    }

    pub fn parents(&self, name: &str) -> Vec<&str> {
        self.edges.iter().filter(|(_, m)| m.contains_key(name)).map(|(p, _)| p.as_str()).collect()
    }

    pub fn is_parent(&self, parent: &str, child: &str) -> bool {
        self.edge(parent, child).is_some()
    }

    pub fn is_barren(&self, name: &str) -> bool {
        self.edges.get(name).is_none_or(|m| m.is_empty())
    }

    pub fn synergies(&self) -> impl Iterator<Item = (&SynergyKey, Sign)> {
        self.synergies.iter().map(|(k, s)| (k, *s))
    }

    pub fn stored_synergy(&self, a: &str, b: &str, child: &str) -> Option<Sign> {
        self.synergies.get(&SynergyKey::new(a, b, child)).copied()
    }

    /// Synergy of `{a, b}` on `child`: zero unless both are parents of
    /// `child`, otherwise the stored sign or `?` when unspecified.
    pub fn synergy(&self, a: &str, b: &str, child: &str) -> Sign {
        if a == b || !self.is_parent(a, child) || !self.is_parent(b, child) {
            return Sign::Zero;
        }
        self.stored_synergy(a, b, child).unwrap_or(Sign::Ambig)
    }

    pub fn curvatures(&self) -> impl Iterator<Item = (&str, &str, Sign)> {
        self.curvatures.iter().map(|((p, c), s)| (p.as_str(), c.as_str(), *s))
    }

    pub fn stored_curvature(&self, parent: &str, child: &str) -> Option<Sign> {
        self.curvatures.get(&(parent.to_string(), child.to_string())).copied()
    }

    /// Curvature of deterministic `child` in `parent`: zero when `parent`
    /// is not a parent, `?` for probabilistic children or when unspecified.
    pub fn curvature(&self, parent: &str, child: &str) -> Sign {
        if !self.is_parent(parent, child) {
            return Sign::Zero;
        }
        if !self.is_deterministic(child) {
            return Sign::Ambig;
        }
        self.stored_curvature(parent, child).unwrap_or(Sign::Ambig)
    }

    /// Nodes in topological order, ties broken lexicographically.
    /// Returns `None` when the edge set has a cycle.
    pub fn topological_order(&self) -> Option<Vec<&str>> {
        let mut indegree: BTreeMap<&str, usize> = self.nodes.keys().map(|n| (n.as_str(), 0)).collect();
        for (_, c, _) in self.edges() {
            *indegree.entry(c).or_default() += 1;
        }
        let mut ready: BTreeSet<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        let mut order = Vec::with_capacity(indegree.len());
        while let Some(n) = ready.pop_first() {
            order.push(n);
            for c in self.children(n) {
                let d = indegree.get_mut(c).expect("child indexed");
                *d -= 1;
                if *d == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == indegree.len()).then_some(order)
    }

    /// Longest directed path from any root to each node.
    pub fn depths(&self) -> BTreeMap<&str, usize> {
        let mut depth = BTreeMap::new();
        if let Some(order) = self.topological_order() {
            for n in order {
                let d = self.parents(n).iter().map(|p| depth.get(p).copied().unwrap_or(0) + 1).max().unwrap_or(0);
                depth.insert(n, d);
            }
        }
        depth
    }

    /// A directed path from `from` to `to` that does not use the edge
    /// `skip`, if any.
    pub fn directed_path_avoiding(&self, from: &str, to: &str, skip: Option<(&str, &str)>) -> Option<Vec<String>> {
        let mut prev: BTreeMap<&str, &str> = BTreeMap::new();
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            for c in self.children(n) {
                if skip == Some((n, c)) || !seen.insert(c) {
                    continue;
                }
                prev.insert(c, n);
                if c == to {
                    let mut path = vec![to.to_string()];
                    let mut cur = to;
                    while let Some(p) = prev.get(cur) {
                        path.push(p.to_string());
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(c);
            }
        }
        None
    }

    pub fn has_directed_path(&self, from: &str, to: &str) -> bool {
        from == to || self.directed_path_avoiding(from, to, None).is_some()
    }

    pub fn descendants(&self, name: &str) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = self.children(name);
        while let Some(n) = stack.pop() {
            if out.insert(n) {
                stack.extend(self.children(n));
            }
        }
        out
    }

    pub fn ancestors(&self, name: &str) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = self.parents(name);
        while let Some(n) = stack.pop() {
            if out.insert(n) {
                stack.extend(self.parents(n));
            }
        }
        out
    }

    /// Copy of this network with every synergy and curvature annotation
    /// removed.
    pub fn without_annotations(&self) -> Qpn {
        let mut net = self.clone();
        net.synergies.clear();
        net.curvatures.clear();
        net
    }

    /// Copy of this network with `name`'s kind replaced. Strictness flags
    /// of existing edges are kept.
    pub fn with_kind(&self, name: &str, kind: NodeKind) -> Qpn {
        let mut net = self.clone();
        net.set_kind(name, kind);
        net.prune_annotations();
        net
    }

    fn annotated_nodes(&self) -> impl Iterator<Item = &str> {
        let pairs = self.synergies.keys().flat_map(|k| [k.first.as_str(), k.second.as_str(), k.child.as_str()]);
        let curved = self.curvatures.keys().flat_map(|(p, c)| [p.as_str(), c.as_str()]);
        pairs.chain(curved)
    }

    /// Whether `name` may take more than two values. Unless its width is
    /// recorded, a probabilistic node is two-valued and a deterministic one
    /// is multi-valued when it has several parents or a multi-valued
    /// parent, since its values are images of its parents' values.
    pub fn is_multivalued(&self, name: &str) -> bool {
        if let Some(&w) = self.widths.get(name) {
            return w;
        }
        if !self.is_deterministic(name) {
            return false;
        }
        let parents = self.parents(name);
        parents.len() > 1 || parents.iter().any(|p| self.is_multivalued(p))
    }

    /// Marked multi-valued nodes not implied by an annotation.
    pub fn declared_multivalued(&self) -> impl Iterator<Item = &str> {
        let annotated: BTreeSet<&str> = self.annotated_nodes().collect();
        self.widths.iter().filter(|(_, w)| **w).map(|(n, _)| n.as_str()).filter(move |n| !annotated.contains(n))
    }

    // ---- crate-internal mutation used by the transformations ----

    pub(crate) fn set_kind(&mut self, name: &str, kind: NodeKind) {
        if let Some(k) = self.nodes.get_mut(name) {
            *k = kind;
        }
    }

    /// Records the width of `name`, which a change of kind or parents does
    /// not alter.
    pub(crate) fn fix_width(&mut self, name: &str, multivalued: bool) {
        self.widths.insert(name.to_string(), multivalued);
    }

    /// Sets an influence; a zero sign removes the edge.
    pub(crate) fn set_edge(&mut self, parent: &str, child: &str, sign: Sign, strict: bool) {
        if sign == Sign::Zero {
            self.remove_edge(parent, child);
        } else {
            self.edges.entry(parent.to_string()).or_default().insert(child.to_string(), Edge { sign, strict });
        }
    }

    pub(crate) fn remove_edge(&mut self, parent: &str, child: &str) {
        if let Some(m) = self.edges.get_mut(parent) {
            m.remove(child);
            if m.is_empty() {
                self.edges.remove(parent);
            }
        }
    }

    pub(crate) fn remove_node(&mut self, name: &str) {
        self.nodes.remove(name);
        self.widths.remove(name);
        self.edges.remove(name);
        for m in self.edges.values_mut() {
            m.remove(name);
        }
        self.edges.retain(|_, m| !m.is_empty());
        self.synergies.retain(|k, _| !k.involves(name));
        self.curvatures.retain(|(p, c), _| p != name && c != name);
    }

    /// Stores a synergy; `?` is the default for parent pairs and is not
    /// stored.
    pub(crate) fn set_synergy(&mut self, a: &str, b: &str, child: &str, sign: Sign) {
        let key = SynergyKey::new(a, b, child);
        if sign == Sign::Ambig {
            self.synergies.remove(&key);
        } else {
            self.synergies.insert(key, sign);
        }
    }

    pub(crate) fn retain_synergies(&mut self, mut keep: impl FnMut(&SynergyKey) -> bool) {
        self.synergies.retain(|k, _| keep(k));
    }

    pub(crate) fn remove_curvature(&mut self, parent: &str, child: &str) {
        self.curvatures.remove(&(parent.to_string(), child.to_string()));
    }

    pub(crate) fn retain_curvatures(&mut self, mut keep: impl FnMut(&str, &str) -> bool) {
        self.curvatures.retain(|(p, c), _| keep(p, c));
    }

    /// Drops annotations that no longer satisfy the referential rules:
    /// synergy pairs must be parents of the child and curvature children
    /// must be deterministic.
    pub(crate) fn prune_annotations(&mut self) {
        let edges = &self.edges;
        let is_parent = |p: &str, c: &str| edges.get(p).is_some_and(|m| m.contains_key(c));
        self.synergies
            .retain(|k, _| k.first != k.second && is_parent(&k.first, &k.child) && is_parent(&k.second, &k.child));
        let nodes = &self.nodes;
        self.curvatures.retain(|(p, c), _| is_parent(p, c) && nodes.get(c).is_some_and(|k| k.is_deterministic()));
    }
}
