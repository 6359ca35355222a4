//! Influence queries: a greedy elimination planner over the transforms and
//! a readable account of the steps it took.
//!
//! Termination: every step either deletes a node or reverses an arc out of
//! the node currently being eliminated. A reversal `c -> d` never gives `c`
//! a new successor, so the successor count of that node strictly drops and
//! the loop ends after at most `nodes + edges` steps per node. The lowest
//! depth successor of a node can always be reversed, since any other
//! directed path into it would pass through a successor of lower depth.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::QueryError;
use crate::network::Qpn;
use crate::separation::{self, SeparationQuery};
use crate::sign::Sign;
use crate::transforms::{self, first_reversal_target, SynergyMode, Trace, TransformOp};

/// The qualitative relation of `source` on `target` given `given`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfluenceQuery {
    pub source: String,
    pub target: String,
    pub given: BTreeSet<String>,
}

impl InfluenceQuery {
    pub fn new<I, S>(source: &str, target: &str, given: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        InfluenceQuery {
            source: source.to_string(),
            target: target.to_string(),
            given: given.into_iter().map(Into::into).collect(),
        }
    }

    pub(crate) fn check(&self, net: &Qpn) -> Result<(), QueryError> {
        for n in [&self.source, &self.target].into_iter().chain(&self.given) {
            if !net.contains(n) {
                return Err(QueryError::UnknownNode(n.clone()));
            }
        }
        if self.source == self.target {
            return Err(QueryError::Malformed(format!("source and target are both `{}`", self.source)));
        }
        for n in [&self.source, &self.target] {
            if self.given.contains(n) {
                return Err(QueryError::Malformed(format!("`{n}` is both queried and given")));
            }
        }
        if net.topological_order().is_none() {
            return Err(QueryError::Cyclic);
        }
        Ok(())
    }

    fn protected(&self) -> BTreeSet<String> {
        let mut p = self.given.clone();
        p.insert(self.source.clone());
        p.insert(self.target.clone());
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryResult {
    pub query: InfluenceQuery,
    pub sign: Sign,
    pub trace: Trace,
    pub final_net: Qpn,
    /// Set when a different first operation gives a strictly more
    /// informative answer.
    pub lookahead: Option<String>,
    /// Source and target are independent given the given nodes, so the
    /// answer is `0` whatever the transformed network says.
    pub separated: bool,
}

fn step_cap(net: &Qpn) -> usize {
    let n = net.node_count() + net.edge_count() + 1;
    4 * n * n
}

struct Run {
    net: Qpn,
    trace: Trace,
    cap: usize,
}

impl Run {
    fn apply(&mut self, op: TransformOp) -> Result<(), QueryError> {
        if self.trace.len() >= self.cap {
            return Err(QueryError::Stalled(self.trace.len()));
        }
        let (next, step) = transforms::apply(&self.net, &op, SynergyMode::Invalidate)?;
        self.trace.push(step);
        self.net = next;
        Ok(())
    }

    fn eliminate_deterministic(&mut self, c: &str) -> Result<(), QueryError> {
        if !self.net.is_barren(c) {
            self.apply(TransformOp::dnp(c))?;
        }
        self.apply(TransformOp::remove_barren(c))
    }

    /// Takes `c` out of the network, reversing its arcs first when it is a
    /// probabilistic node with several successors.
    fn eliminate(&mut self, c: &str) -> Result<(), QueryError> {
        loop {
            if self.net.is_deterministic(c) || self.net.is_barren(c) {
                return self.eliminate_deterministic(c);
            }
            if self.net.children(c).len() == 1 {
                return self.apply(TransformOp::reduce(c));
            }
            let d = first_reversal_target(&self.net, c).expect("has successors").to_string();
            self.apply(TransformOp::reverse(c, &d))?;
        }
    }

    /// One greedy elimination; false once only protected nodes remain.
    fn greedy_step(&mut self, protected: &BTreeSet<String>) -> Result<bool, QueryError> {
        let free: Vec<String> = self
            .net
            .topological_order()
            .expect("acyclic")
            .into_iter()
            .filter(|n| !protected.contains(*n))
            .map(str::to_string)
            .collect();
        let net = &self.net;
        let pick = free
            .iter()
            .find(|n| net.is_barren(n))
            .or_else(|| free.iter().find(|n| net.is_deterministic(n)))
            .or_else(|| free.iter().find(|n| net.children(n).len() == 1))
            .or_else(|| free.last());
        match pick.cloned() {
            Some(c) => {
                self.eliminate(&c)?;
                Ok(true)
            }
            None => Ok(false),
        }
    }

    /// Cuts every arc out of the target so that its remaining parents
    /// carry the whole dependence on the protected set.
    fn isolate_target(&mut self, target: &str) -> Result<(), QueryError> {
        while !self.net.is_barren(target) {
            if self.net.is_deterministic(target) {
                self.apply(TransformOp::dnp(target))?;
            } else {
                let d = first_reversal_target(&self.net, target).expect("has successors").to_string();
                self.apply(TransformOp::reverse(target, &d))?;
            }
        }
        Ok(())
    }
}

fn execute(net: &Qpn, q: &InfluenceQuery, first: Option<&TransformOp>) -> Result<Run, QueryError> {
    let protected = q.protected();
    let mut run = Run { net: net.clone(), trace: Trace::default(), cap: step_cap(net) };
    if let Some(op) = first {
        run.apply(op.clone())?;
        match op {
            TransformOp::Reverse { c, .. } | TransformOp::Dnp { c, .. } if !protected.contains(c) => {
                run.eliminate(c)?
            }
            _ => {}
        }
    }
    while run.greedy_step(&protected)? {}
    run.isolate_target(&q.target)?;
    Ok(run)
}

/// Operations the planner would apply, in order.
pub fn plan(net: &Qpn, q: &InfluenceQuery) -> Result<Vec<TransformOp>, QueryError> {
    q.check(net)?;
    Ok(execute(net, q, None)?.trace.ops())
}

/// Alternative first operations for the lookahead.
fn first_moves(net: &Qpn, q: &InfluenceQuery) -> Vec<TransformOp> {
    let protected = q.protected();
    let mut out = Vec::new();
    for c in net.node_names().filter(|n| !protected.contains(*n)) {
        let children = net.children(c);
        if children.is_empty() {
            out.push(TransformOp::remove_barren(c));
        } else if net.is_deterministic(c) {
            out.push(TransformOp::dnp(c));
        } else if children.len() == 1 {
            out.push(TransformOp::reduce(c));
        } else {
            for d in children {
                if net.directed_path_avoiding(c, d, Some((c, d))).is_none() {
                    out.push(TransformOp::reverse(c, d));
                }
            }
        }
    }
    out
}

fn answer(run: &Run, q: &InfluenceQuery) -> Sign {
    run.net.sign(&q.source, &q.target)
}

/// Source and target are D-separated, or one of them is a function of the
/// given nodes and so carries no information about the other.
fn independent(net: &Qpn, q: &InfluenceQuery) -> Result<bool, QueryError> {
    let known = separation::determined_closure(net, &q.given)?;
    if known.contains(&q.source) || known.contains(&q.target) {
        return Ok(true);
    }
    separation::D_separated(net, &SeparationQuery::new(&q.source, &q.target, q.given.iter()))
}

/// Sign of the influence of `q.source` on `q.target` given `q.given`.
pub fn qualitative_influence(net: &Qpn, q: &InfluenceQuery) -> Result<QueryResult, QueryError> {
    q.check(net)?;
    let run = execute(net, q, None)?;
    let separated = independent(net, q)? || independent(&run.net, q)?;
    let sign = if separated { Sign::Zero } else { answer(&run, q) };
    let mut lookahead = None;
    if sign == Sign::Ambig {
        let heuristic_first = run.trace.steps.first().map(|s| s.op.clone());
        for op in first_moves(net, q) {
            if Some(&op) == heuristic_first.as_ref() {
                continue;
            }
            let Ok(alt) = execute(net, q, Some(&op)) else { continue };
            let alt_sign = answer(&alt, q);
            if alt_sign.strictly_refines(sign) {
                let msg = format!("starting with {op} gives {alt_sign} instead of {sign}; ordering mattered");
                log::info!("{}: {msg}", q.source);
                lookahead = Some(msg);
                break;
            }
        }
    }
    Ok(QueryResult { query: q.clone(), sign, trace: run.trace, final_net: run.net, lookahead, separated })
}

fn given_text(q: &InfluenceQuery) -> String {
    q.given.iter().cloned().collect::<Vec<_>>().join(", ")
}

/// Human-readable account of a query run, one line per step followed by
/// its sign updates.
pub fn explain(result: &QueryResult) -> String {
    let mut out = String::new();
    if result.trace.is_empty() {
        out.push_str("network already minimal\n");
    }
    for (i, step) in result.trace.steps.iter().enumerate() {
        let _ = write!(out, "step {}: {step}", i + 1);
    }
    let q = &result.query;
    if result.separated {
        let _ = writeln!(out, "{} and {} are independent given {{{}}}", q.source, q.target, given_text(q));
    }
    let _ = writeln!(out, "answer: δ({},{}) given {{{}}} = {}", q.source, q.target, given_text(q), result.sign);
    if let Some(note) = &result.lookahead {
        let _ = writeln!(out, "lookahead: {note}");
    }
    out
}
