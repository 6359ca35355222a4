use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Qpn;
use crate::sign::Sign;

/// The invariant a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    InvalidName,
    DanglingReference,
    SelfLoop,
    Cycle,
    ZeroEdge,
    SynergyPair,
    SynergyNotParents,
    CurvatureNotParent,
    CurvatureOnProbabilistic,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::InvalidName => "invalid-name",
            Rule::DanglingReference => "dangling-reference",
            Rule::SelfLoop => "self-loop",
            Rule::Cycle => "cycle",
            Rule::ZeroEdge => "zero-edge",
            Rule::SynergyPair => "synergy-pair",
            Rule::SynergyNotParents => "synergy-not-parents",
            Rule::CurvatureNotParent => "curvature-not-parent",
            Rule::CurvatureOnProbabilistic => "curvature-on-probabilistic",
        }
    }
}

/// A broken network invariant and the element that breaks it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    /// The offending element in file syntax, e.g. `edge a b`.
    pub element: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.rule.as_str(), self.element, self.message)
    }
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Checks every network invariant. Empty iff the network is valid.
pub fn validate(net: &Qpn) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |rule, element: String, message: String| out.push(Violation { rule, element, message });

    for name in net.node_names() {
        if !is_valid_name(name) {
            push(Rule::InvalidName, format!("node {name}"), "names must match [A-Za-z_][A-Za-z0-9_]*".into());
        }
    }

    for n in net.declared_multivalued().filter(|n| !net.contains(n)) {
        push(Rule::DanglingReference, format!("node {n} multi"), format!("unknown node `{n}`"));
    }

    let mut structural_ok = true;
    for (p, c, e) in net.edges() {
        let element = format!("edge {p} {c}");
        for n in [p, c] {
            if !net.contains(n) {
                structural_ok = false;
                push(Rule::DanglingReference, element.clone(), format!("unknown node `{n}`"));
            }
        }
        if p == c {
            structural_ok = false;
            push(Rule::SelfLoop, element.clone(), "a node cannot influence itself".into());
        }
        if e.sign == Sign::Zero {
            push(Rule::ZeroEdge, element, "zero influences are represented by omitting the edge".into());
        }
    }

    if structural_ok {
        if let Some(cycle) = find_cycle(net) {
            push(
                Rule::Cycle,
                format!("edge {} {}", cycle[0], cycle[1]),
                format!("directed cycle {}", cycle.join(" -> ")),
            );
        }
    }

    for (k, _) in net.synergies() {
        let element = format!("synergy {} {} {}", k.first, k.second, k.child);
        let mut dangling = false;
        for n in [&k.first, &k.second, &k.child] {
            if !net.contains(n) {
                dangling = true;
                push(Rule::DanglingReference, element.clone(), format!("unknown node `{n}`"));
            }
        }
        if k.first == k.second {
            push(Rule::SynergyPair, element.clone(), "pair members must be distinct".into());
        } else if !dangling {
            for n in [&k.first, &k.second] {
                if !net.is_parent(n, &k.child) {
                    push(Rule::SynergyNotParents, element.clone(), format!("`{n}` is not a parent of `{}`", k.child));
                }
            }
        }
    }

    for (p, c, _) in net.curvatures() {
        let element = format!("curvature {p} {c}");
        let mut dangling = false;
        for n in [p, c] {
            if !net.contains(n) {
                dangling = true;
                push(Rule::DanglingReference, element.clone(), format!("unknown node `{n}`"));
            }
        }
        if dangling {
            continue;
        }
        if !net.is_parent(p, c) {
            push(Rule::CurvatureNotParent, element.clone(), format!("`{p}` is not a parent of `{c}`"));
        }
        if !net.is_deterministic(c) {
            push(
                Rule::CurvatureOnProbabilistic,
                element,
                format!("curvature requires a deterministic child; `{c}` is probabilistic"),
            );
        }
    }

    out
}

/// A directed cycle as a closed node sequence (first == last).
fn find_cycle(net: &Qpn) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit<'a>(
        net: &'a Qpn,
        n: &'a str,
        marks: &mut std::collections::BTreeMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        marks.insert(n, Mark::Open);
        stack.push(n);
        for c in net.children(n) {
            match marks.get(c) {
                Some(Mark::Open) => {
                    let start = stack.iter().position(|s| *s == c).unwrap_or(0);
                    let mut cycle: Vec<String> = stack[start..].iter().map(|s| s.to_string()).collect();
                    cycle.push(c.to_string());
                    return Some(cycle);
                }
                Some(Mark::Done) => {}
                None => {
                    if let Some(cycle) = visit(net, c, marks, stack) {
                        return Some(cycle);
                    }
                }
            }
        }
        stack.pop();
        marks.insert(n, Mark::Done);
        None
    }

    let mut marks = std::collections::BTreeMap::new();
    let roots: BTreeSet<&str> = net.node_names().collect();
    for n in roots {
        if !marks.contains_key(n) {
            let mut stack = Vec::new();
            if let Some(cycle) = visit(net, n, &mut marks, &mut stack) {
                return Some(cycle);
            }
        }
    }
    None
}
