//! Graphical independence tests. `D_separated` is d-separation after
//! closing the evidence under functional determination.

use std::collections::{BTreeSet, VecDeque};

use crate::error::QueryError;
use crate::network::Qpn;
use crate::sign::Sign;

/// Is `x` independent of `y` given `given`?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationQuery {
    pub x: String,
    pub y: String,
    pub given: BTreeSet<String>,
}

impl SeparationQuery {
    pub fn new<I, S>(x: &str, y: &str, given: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SeparationQuery { x: x.to_string(), y: y.to_string(), given: given.into_iter().map(Into::into).collect() }
    }

    fn check(&self, net: &Qpn) -> Result<(), QueryError> {
        for n in std::iter::once(&self.x).chain(std::iter::once(&self.y)).chain(&self.given) {
            if !net.contains(n) {
                return Err(QueryError::UnknownNode(n.clone()));
            }
        }
        if self.x == self.y {
            return Err(QueryError::Malformed(format!("x and y are both `{}`", self.x)));
        }
        for n in [&self.x, &self.y] {
            if self.given.contains(n) {
                return Err(QueryError::Malformed(format!("`{n}` is both queried and given")));
            }
        }
        Ok(())
    }
}

/// Least superset of `given` containing every deterministic node whose
/// parents are all in the set. Parentless deterministic nodes are
/// constants and always belong to it.
pub fn functional_closure(net: &Qpn, given: &BTreeSet<String>) -> Result<BTreeSet<String>, QueryError> {
    if let Some(n) = given.iter().find(|n| !net.contains(n)) {
        return Err(QueryError::UnknownNode(n.clone()));
    }
    let mut closed = given.clone();
    let order = net.topological_order().ok_or(QueryError::Cyclic)?;
    // one pass in topological order reaches the fixpoint: a node's
    // parents are settled before the node is examined
    for n in order {
        if !closed.contains(n) && net.is_deterministic(n) && net.parents(n).iter().all(|p| closed.contains(*p)) {
            closed.insert(n.to_string());
        }
    }
    Ok(closed)
}

/// Extends [`functional_closure`] with inversion: a parent whose strict
/// monotone relation into a known deterministic child is the only unknown
/// input of that child is itself known.
pub fn determined_closure(net: &Qpn, given: &BTreeSet<String>) -> Result<BTreeSet<String>, QueryError> {
    let mut closed = functional_closure(net, given)?;
    loop {
        let mut inverted = None;
        'search: for d in closed.iter().filter(|d| net.is_deterministic(d)) {
            let open: Vec<&str> = net.parents(d).into_iter().filter(|p| !closed.contains(*p)).collect();
            if let [c] = open[..] {
                let edge = net.edge(c, d).expect("parent edge");
                if edge.strict && matches!(edge.sign, Sign::Plus | Sign::Minus) {
                    inverted = Some(c.to_string());
                    break 'search;
                }
            }
        }
        match inverted {
            Some(c) => {
                closed.insert(c);
                closed = functional_closure(net, &closed)?;
            }
            None => return Ok(closed),
        }
    }
}

/// Nodes reachable from `source` by an active trail given `observed`.
fn reachable(net: &Qpn, source: &str, observed: &BTreeSet<String>) -> BTreeSet<String> {
    // ancestors of the evidence, needed to decide whether colliders are open
    let mut evidence_anc: BTreeSet<&str> = BTreeSet::new();
    let mut stack: Vec<&str> = observed.iter().map(String::as_str).collect();
    while let Some(n) = stack.pop() {
        if evidence_anc.insert(n) {
            stack.extend(net.parents(n));
        }
    }

    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    enum Dir {
        // arrived from a child (moving against edge direction)
        Up,
        // arrived from a parent
        Down,
    }

    let mut visited: BTreeSet<(String, Dir)> = BTreeSet::new();
    let mut out = BTreeSet::new();
    let mut queue = VecDeque::from([(source.to_string(), Dir::Up)]);
    while let Some((n, dir)) = queue.pop_front() {
        if !visited.insert((n.clone(), dir)) {
            continue;
        }
        let is_observed = observed.contains(&n);
        if !is_observed {
            out.insert(n.clone());
        }
        match dir {
            Dir::Up if !is_observed => {
                for p in net.parents(&n) {
                    queue.push_back((p.to_string(), Dir::Up));
                }
                for c in net.children(&n) {
                    queue.push_back((c.to_string(), Dir::Down));
                }
            }
            Dir::Up => {}
            Dir::Down => {
                if !is_observed {
                    for c in net.children(&n) {
                        queue.push_back((c.to_string(), Dir::Down));
                    }
                }
                if evidence_anc.contains(n.as_str()) {
                    for p in net.parents(&n) {
                        queue.push_back((p.to_string(), Dir::Up));
                    }
                }
            }
        }
    }
    out
}

/// Standard d-separation.
pub fn d_separated(net: &Qpn, q: &SeparationQuery) -> Result<bool, QueryError> {
    q.check(net)?;
    Ok(!reachable(net, &q.x, &q.given).contains(&q.y))
}

/// d-separation with the evidence replaced by its functional closure. A
/// query node that is itself functionally determined by the evidence is
/// independent of everything.
#[allow(non_snake_case)]
pub fn D_separated(net: &Qpn, q: &SeparationQuery) -> Result<bool, QueryError> {
    q.check(net)?;
    let closed = functional_closure(net, &q.given)?;
    if closed.contains(&q.x) || closed.contains(&q.y) {
        return Ok(true);
    }
    Ok(!reachable(net, &q.x, &closed).contains(&q.y))
}
