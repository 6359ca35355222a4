//! Graph transformations: deterministic node propagation (DNP), arc
//! reversal, barren node removal and node reduction. Every operation takes
//! a network by reference and returns a new one together with a record of
//! the sign updates it made.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::TransformError;
use crate::network::{Edge, NodeKind, Qpn};
use crate::sign::Sign;
use crate::synergy;

/// Row of the arc reversal table that an operation used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
    V,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
            Case::V => "V",
        };
        f.write_str(s)
    }
}

/// A single transformation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum TransformOp {
    Reverse {
        c: String,
        d: String,
    },
    /// DNP out of `c`; `successor` restricts it to a single outgoing edge.
    Dnp {
        c: String,
        successor: Option<String>,
    },
    RemoveBarren {
        c: String,
    },
    /// Reduction of a probabilistic node with a single successor.
    Reduce {
        c: String,
    },
}

impl TransformOp {
    pub fn reverse(c: &str, d: &str) -> Self {
        TransformOp::Reverse { c: c.into(), d: d.into() }
    }
    pub fn dnp(c: &str) -> Self {
        TransformOp::Dnp { c: c.into(), successor: None }
    }
    pub fn dnp_into(c: &str, d: &str) -> Self {
        TransformOp::Dnp { c: c.into(), successor: Some(d.into()) }
    }
    pub fn remove_barren(c: &str) -> Self {
        TransformOp::RemoveBarren { c: c.into() }
    }
    pub fn reduce(c: &str) -> Self {
        TransformOp::Reduce { c: c.into() }
    }

    /// The node the operation is centred on.
    pub fn node(&self) -> &str {
        match self {
            TransformOp::Reverse { c, .. }
            | TransformOp::Dnp { c, .. }
            | TransformOp::RemoveBarren { c }
            | TransformOp::Reduce { c } => c,
        }
    }
}

impl fmt::Display for TransformOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformOp::Reverse { c, d } => write!(f, "REVERSE({c},{d})"),
            TransformOp::Dnp { c, successor: None } => write!(f, "DNP({c})"),
            TransformOp::Dnp { c, successor: Some(d) } => write!(f, "DNP({c}->{d})"),
            TransformOp::RemoveBarren { c } => write!(f, "REMOVE_BARREN({c})"),
            TransformOp::Reduce { c } => write!(f, "REDUCE({c})"),
        }
    }
}

/// Parses `reverse:c,d`, `dnp:c`, `dnp:c,d`, `reduce:c` and `barren:c`.
impl FromStr for TransformOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, args) = s.split_once(':').ok_or("expected <operation>:<nodes>")?;
        let nodes: Vec<&str> = args.split(',').map(str::trim).collect();
        if nodes.iter().any(|n| n.is_empty()) {
            return Err("empty node name".into());
        }
        match (name, nodes.as_slice()) {
            ("reverse", [c, d]) => Ok(TransformOp::reverse(c, d)),
            ("dnp", [c]) => Ok(TransformOp::dnp(c)),
            ("dnp", [c, d]) => Ok(TransformOp::dnp_into(c, d)),
            ("reduce", [c]) => Ok(TransformOp::reduce(c)),
            ("barren", [c]) => Ok(TransformOp::remove_barren(c)),
            ("reverse" | "dnp" | "reduce" | "barren", _) => Err(format!("wrong number of nodes for `{name}`")),
            _ => Err(format!("unknown operation `{name}`; use reverse, dnp, reduce or barren")),
        }
    }
}

/// How synergy annotations are treated by an operation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynergyMode {
    /// Affected synergies fall back to `?`.
    #[default]
    Invalidate,
    /// Affected synergies are recomputed by the reduction update rule.
    Propagate,
}

/// One influence sign written by an operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignUpdate {
    pub parent: String,
    pub child: String,
    pub before: Sign,
    pub after: Sign,
    /// Symbolic rule, e.g. `δ'(a,d) = δ(a,d) ⊕ (δ(a,c) ⊗ δ(c,d))`.
    pub rule: String,
    /// The rule with signs substituted.
    pub evaluation: String,
}

impl fmt::Display for SignUpdate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} = {}", self.rule, self.evaluation, self.after)
    }
}

/// One synergy written by an operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynergyUpdate {
    pub pair: (String, String),
    pub child: String,
    pub after: Sign,
    pub rule: String,
    pub evaluation: String,
}

impl fmt::Display for SynergyUpdate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} = {}", self.rule, self.evaluation, self.after)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindChange {
    pub node: String,
    pub from: NodeKind,
    pub to: NodeKind,
}

/// Node and edge counts before or after a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetSummary {
    pub nodes: usize,
    pub edges: usize,
}

impl NetSummary {
    pub fn of(net: &Qpn) -> Self {
        NetSummary { nodes: net.node_count(), edges: net.edge_count() }
    }
}

impl fmt::Display for NetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nodes, {} edges", self.nodes, self.edges)
    }
}

/// Record of one applied operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub op: TransformOp,
    pub case: Option<Case>,
    pub synergy_mode: SynergyMode,
    pub before: NetSummary,
    pub after: NetSummary,
    pub updates: Vec<SignUpdate>,
    pub synergy_updates: Vec<SynergyUpdate>,
    pub kind_changes: Vec<KindChange>,
    pub note: Option<String>,
}

/// The operation line followed by one indented line per update.
impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.op)?;
        if let Some(case) = self.case {
            write!(f, ", case {case}")?;
        }
        writeln!(f, " ({} -> {})", self.before, self.after)?;
        for u in &self.updates {
            writeln!(f, "  {u}")?;
        }
        for u in &self.synergy_updates {
            writeln!(f, "  {u}")?;
        }
        for k in &self.kind_changes {
            writeln!(f, "  {} becomes {}", k.node, k.to)?;
        }
        if let Some(note) = &self.note {
            writeln!(f, "  note: {note}")?;
        }
        Ok(())
    }
}

/// Ordered record of the operations applied to a network.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn push(&mut self, step: TraceStep) {
        self.steps.push(step);
    }

    pub fn extend(&mut self, other: Trace) {
        self.steps.extend(other.steps);
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn ops(&self) -> Vec<TransformOp> {
        self.steps.iter().map(|s| s.op.clone()).collect()
    }

    /// Re-applies every step to `initial`.
    pub fn replay(&self, initial: &Qpn) -> Result<Qpn, TransformError> {
        let mut net = initial.clone();
        for step in &self.steps {
            net = apply(&net, &step.op, step.synergy_mode)?.0;
        }
        Ok(net)
    }
}

/// Applies a single operation.
pub fn apply(net: &Qpn, op: &TransformOp, mode: SynergyMode) -> Result<(Qpn, TraceStep), TransformError> {
    match op {
        TransformOp::Reverse { c, d } => reverse_with(net, c, d, mode),
        TransformOp::Dnp { c, successor } => dnp(net, c, successor.as_deref(), mode, None),
        TransformOp::RemoveBarren { c } => remove_barren(net, c),
        TransformOp::Reduce { c } => reduce_single(net, c, mode),
    }
}

fn require(net: &Qpn, name: &str) -> Result<NodeKind, TransformError> {
    net.kind(name).ok_or_else(|| TransformError::UnknownNode(name.to_string()))
}

fn sign_of(e: Option<Edge>) -> Sign {
    e.map_or(Sign::Zero, |e| e.sign)
}

/// `δ(a,d) ⊕ (δ(a,c) ⊗ δ(c,d))` together with its strictness: strict only
/// when every nonzero term is strict.
fn chain(direct: Option<Edge>, to_mid: Option<Edge>, from_mid: Option<Edge>) -> (Sign, bool) {
    let path = sign_of(to_mid) * sign_of(from_mid);
    let sign = sign_of(direct) + path;
    let mut terms = Vec::new();
    if let Some(e) = direct {
        terms.push(e.strict);
    }
    if path != Sign::Zero {
        terms.push(to_mid.is_some_and(|e| e.strict) && from_mid.is_some_and(|e| e.strict));
    }
    let strict = sign != Sign::Zero && sign != Sign::Ambig && !terms.is_empty() && terms.iter().all(|s| *s);
    (sign, strict)
}

fn chain_update(net: &Qpn, a: &str, c: &str, d: &str) -> (SignUpdate, bool) {
    let (direct, to_mid, from_mid) = (net.edge(a, d), net.edge(a, c), net.edge(c, d));
    let (after, strict) = chain(direct, to_mid, from_mid);
    let update = SignUpdate {
        parent: a.to_string(),
        child: d.to_string(),
        before: sign_of(direct),
        after,
        rule: format!("δ'({a},{d}) = δ({a},{d}) ⊕ (δ({a},{c}) ⊗ δ({c},{d}))"),
        evaluation: format!("{} ⊕ ({} ⊗ {})", sign_of(direct), sign_of(to_mid), sign_of(from_mid)),
    };
    (update, strict)
}

fn step(op: TransformOp, case: Option<Case>, mode: SynergyMode, before: &Qpn, after: &Qpn) -> TraceStep {
    TraceStep {
        op,
        case,
        synergy_mode: mode,
        before: NetSummary::of(before),
        after: NetSummary::of(after),
        updates: Vec::new(),
        synergy_updates: Vec::new(),
        kind_changes: Vec::new(),
        note: None,
    }
}

/// Deterministic node propagation: removes every edge out of `c`, linking
/// `c`'s parents to its former successors.
pub fn propagate_deterministic(net: &Qpn, c: &str) -> Result<(Qpn, TraceStep), TransformError> {
    dnp(net, c, None, SynergyMode::Invalidate, None)
}

/// DNP restricted to the edge `c -> d`.
pub fn propagate_deterministic_into(net: &Qpn, c: &str, d: &str) -> Result<(Qpn, TraceStep), TransformError> {
    dnp(net, c, Some(d), SynergyMode::Invalidate, None)
}

fn dnp(
    net: &Qpn,
    c: &str,
    only: Option<&str>,
    mode: SynergyMode,
    as_reversal: Option<&str>,
) -> Result<(Qpn, TraceStep), TransformError> {
    if !require(net, c)?.is_deterministic() {
        return Err(TransformError::NotDeterministic(c.to_string()));
    }
    let successors: Vec<&str> = match only {
        Some(d) => {
            require(net, d)?;
            if !net.is_parent(c, d) {
                return Err(TransformError::MissingEdge { parent: c.into(), child: d.into() });
            }
            vec![d]
        }
        None => net.children(c),
    };
    if successors.is_empty() {
        return Err(TransformError::Barren(c.to_string()));
    }
    let parents = net.parents(c);
    let mut out = net.clone();
    let mut updates = Vec::new();
    let mut synergy_updates = Vec::new();
    for &d in &successors {
        for &a in &parents {
            let (update, strict) = chain_update(net, a, c, d);
            out.set_edge(a, d, update.after, strict);
            updates.push(update);
        }
        out.remove_edge(c, d);
        synergy_updates.extend(synergy::apply_reduction_update(net, &mut out, c, d, mode));
        for &a in &parents {
            out.remove_curvature(a, d);
        }
    }
    out.prune_annotations();
    let op = match as_reversal {
        Some(d) => TransformOp::reverse(c, d),
        None => TransformOp::Dnp { c: c.to_string(), successor: only.map(str::to_string) },
    };
    let case = as_reversal.map(|_| Case::III);
    let mut s = step(op, case, mode, net, &out);
    s.updates = updates;
    s.synergy_updates = synergy_updates;
    if as_reversal.is_some() {
        s.note = Some("case III: deterministic c into probabilistic d is handled by DNP".into());
    }
    Ok((out, s))
}

/// Reversal table case that reversing `c -> d` dispatches to.
pub fn reversal_case(net: &Qpn, c: &str, d: &str) -> Result<Case, TransformError> {
    let kc = require(net, c)?;
    let kd = require(net, d)?;
    let e = net.edge(c, d).ok_or_else(|| TransformError::MissingEdge { parent: c.into(), child: d.into() })?;
    let invertible = e.strict && matches!(e.sign, Sign::Plus | Sign::Minus);
    // a deterministic d without a strict monotone relation is read as probabilistic
    let d_det = kd.is_deterministic() && invertible;
    Ok(match (kc.is_deterministic(), d_det) {
        (true, true) if net.parents(c).is_empty() => Case::II,
        (true, true) => Case::I,
        (true, false) => Case::III,
        (false, true) => Case::IV,
        (false, false) => Case::V,
    })
}

/// Reverses the edge `c -> d` by the arc reversal table. Synergy entries
/// touching `c`, `d` or their parents fall back to `?`.
pub fn reverse_arc(net: &Qpn, c: &str, d: &str) -> Result<(Qpn, TraceStep), TransformError> {
    reverse_with(net, c, d, SynergyMode::Invalidate)
}

fn reverse_with(net: &Qpn, c: &str, d: &str, mode: SynergyMode) -> Result<(Qpn, TraceStep), TransformError> {
    let case = reversal_case(net, c, d)?;
    if let Some(path) = net.directed_path_avoiding(c, d, Some((c, d))) {
        return Err(TransformError::AlternatePath { c: c.into(), d: d.into(), path });
    }
    if case == Case::III {
        return dnp(net, c, Some(d), mode, Some(d));
    }

    let kd = net.kind(d).expect("checked");
    let cd = net.edge(c, d).expect("checked");
    let pc: BTreeSet<&str> = net.parents(c).into_iter().collect();
    let pd: BTreeSet<&str> = net.parents(d).into_iter().filter(|p| *p != c).collect();
    let others: BTreeSet<&str> = pc.union(&pd).copied().collect();

    // Bayes reversal keeps a stochastic ordering only when the variable
    // conditioned on is two-valued; otherwise the likelihood ratio can
    // change direction between neighbouring values
    let wide_c = case == Case::V && net.is_multivalued(c);
    let wide_d = case == Case::V && net.is_multivalued(d);

    let mut out = net.clone();
    let mut updates = Vec::new();
    out.remove_edge(c, d);
    let reversed_strict = matches!(case, Case::I | Case::II | Case::IV);
    let (dc, dc_rule, dc_eval) = if wide_d {
        (Sign::Ambig, format!("δ'({d},{c}) = ?"), format!("{d} is multi-valued"))
    } else {
        (cd.sign, format!("δ'({d},{c}) = δ({c},{d})"), cd.sign.to_string())
    };
    out.set_edge(d, c, dc, reversed_strict);
    updates.push(SignUpdate {
        parent: d.into(),
        child: c.into(),
        before: Sign::Zero,
        after: dc,
        rule: dc_rule,
        evaluation: dc_eval,
    });

    for &a in &others {
        let (ac, ad) = (net.edge(a, c), net.edge(a, d));
        let (new_ac, ac_strict, ac_rule, ac_eval) = match case {
            Case::V if wide_c => (Sign::Ambig, false, format!("δ'({a},{c}) = ?"), format!("{c} is multi-valued")),
            Case::V => {
                let s = sign_of(ac) + sign_of(ad) * Sign::Ambig;
                let strict = sign_of(ad) == Sign::Zero && ac.is_some_and(|e| e.strict);
                (
                    s,
                    strict,
                    format!("δ'({a},{c}) = δ({a},{c}) ⊕ (δ({a},{d}) ⊗ ?)"),
                    format!("{} ⊕ ({} ⊗ ?)", sign_of(ac), sign_of(ad)),
                )
            }
            _ => {
                let s = -(cd.sign * sign_of(ad));
                let strict = s != Sign::Zero && ad.is_some_and(|e| e.strict);
                (
                    s,
                    strict,
                    format!("δ'({a},{c}) = ⊖(δ({c},{d}) ⊗ δ({a},{d}))"),
                    format!("⊖({} ⊗ {})", cd.sign, sign_of(ad)),
                )
            }
        };
        out.set_edge(a, c, new_ac, ac_strict && new_ac != Sign::Ambig);
        updates.push(SignUpdate {
            parent: a.into(),
            child: c.into(),
            before: sign_of(ac),
            after: new_ac,
            rule: ac_rule,
            evaluation: ac_eval,
        });

        let (new_ad, ad_strict, ad_rule, ad_eval) = if case == Case::II {
            (Sign::Zero, false, format!("δ'({a},{d}) = 0"), "0".to_string())
        } else {
            let (s, strict) = chain(ad, ac, Some(cd));
            (
                s,
                strict,
                format!("δ'({a},{d}) = δ({a},{d}) ⊕ (δ({a},{c}) ⊗ δ({c},{d}))"),
                format!("{} ⊕ ({} ⊗ {})", sign_of(ad), sign_of(ac), cd.sign),
            )
        };
        out.set_edge(a, d, new_ad, ad_strict);
        updates.push(SignUpdate {
            parent: a.into(),
            child: d.into(),
            before: sign_of(ad),
            after: new_ad,
            rule: ad_rule,
            evaluation: ad_eval,
        });
    }

    let mut kind_changes = Vec::new();
    let mut set_kind = |out: &mut Qpn, node: &str, to: NodeKind| {
        let from = out.kind(node).expect("present");
        if from != to {
            out.fix_width(node, net.is_multivalued(node));
            out.set_kind(node, to);
            kind_changes.push(KindChange { node: node.into(), from, to });
        }
    };
    match case {
        Case::IV => {
            set_kind(&mut out, c, NodeKind::Deterministic);
            set_kind(&mut out, d, NodeKind::Probabilistic);
        }
        // a deterministic d whose relation cannot be inverted loses c as a
        // parent, so it is no longer a function of its parents
        Case::V if kd.is_deterministic() => set_kind(&mut out, d, NodeKind::Probabilistic),
        _ => {}
    }
    if out.kind(d) == Some(NodeKind::Probabilistic) && kd.is_deterministic() {
        for p in out.parents(d).into_iter().map(str::to_string).collect::<Vec<_>>() {
            let sign = out.sign(&p, d);
            out.set_edge(&p, d, sign, false);
        }
    }

    let touched: BTreeSet<String> = others.iter().copied().chain([c, d]).map(str::to_string).collect();
    out.retain_synergies(|k| {
        !(touched.contains(&k.first) || touched.contains(&k.second) || touched.contains(&k.child))
    });
    out.retain_curvatures(|_, child| child != c && child != d);
    out.prune_annotations();

    let mut s = step(TransformOp::reverse(c, d), Some(case), mode, net, &out);
    s.updates = updates;
    s.kind_changes = kind_changes;
    if kd.is_deterministic() && case == Case::V {
        s.note = Some(format!("{c} -> {d} is not strict and monotone; {d} treated as probabilistic"));
    }
    Ok((out, s))
}

/// Deletes a node without successors.
pub fn remove_barren(net: &Qpn, c: &str) -> Result<(Qpn, TraceStep), TransformError> {
    require(net, c)?;
    let successors = net.children(c);
    if !successors.is_empty() {
        return Err(TransformError::HasSuccessors {
            node: c.to_string(),
            successors: successors.into_iter().map(str::to_string).collect(),
        });
    }
    let mut out = net.clone();
    out.remove_node(c);
    Ok((out.clone(), step(TransformOp::remove_barren(c), None, SynergyMode::Invalidate, net, &out)))
}

/// Splices a probabilistic node with exactly one successor out of the
/// network.
fn reduce_single(net: &Qpn, c: &str, mode: SynergyMode) -> Result<(Qpn, TraceStep), TransformError> {
    let kc = require(net, c)?;
    let successors = net.children(c);
    let d = match successors.as_slice() {
        [] => return Err(TransformError::Barren(c.to_string())),
        [d] => *d,
        _ => {
            return Err(TransformError::HasSuccessors {
                node: c.to_string(),
                successors: successors.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    let parents = net.parents(c);
    let mut out = net.clone();
    let mut updates = Vec::new();
    for &a in &parents {
        let (update, strict) = chain_update(net, a, c, d);
        out.set_edge(a, d, update.after, strict);
        updates.push(update);
    }
    out.remove_edge(c, d);
    let synergy_updates = synergy::apply_reduction_update(net, &mut out, c, d, mode);
    out.remove_node(c);
    let mut kind_changes = Vec::new();
    let kd = net.kind(d).expect("child exists");
    let new_kd =
        if kc.is_deterministic() && kd.is_deterministic() { NodeKind::Deterministic } else { NodeKind::Probabilistic };
    if new_kd != kd {
        out.fix_width(d, net.is_multivalued(d));
        out.set_kind(d, new_kd);
        kind_changes.push(KindChange { node: d.into(), from: kd, to: new_kd });
    }
    for &a in &parents {
        out.remove_curvature(a, d);
    }
    out.prune_annotations();
    let mut s = step(TransformOp::reduce(c), None, mode, net, &out);
    s.updates = updates;
    s.synergy_updates = synergy_updates;
    s.kind_changes = kind_changes;
    Ok((out, s))
}

/// Successor of `c` whose arc is reversed first when `c` must be made
/// single-successor: lowest topological depth, ties broken by name. No
/// other directed path can reach it from `c`.
pub fn first_reversal_target<'a>(net: &'a Qpn, c: &str) -> Option<&'a str> {
    let depths = net.depths();
    net.children(c).into_iter().min_by_key(|d| (depths.get(d).copied().unwrap_or(0), *d))
}

/// Removes `c` from the network. Deterministic nodes are propagated then
/// removed; probabilistic nodes first have their successors cut down to
/// one by arc reversals.
pub fn reduce_node(net: &Qpn, c: &str) -> Result<(Qpn, Trace), TransformError> {
    reduce_with(net, c, SynergyMode::Invalidate)
}

pub(crate) fn reduce_with(net: &Qpn, c: &str, mode: SynergyMode) -> Result<(Qpn, Trace), TransformError> {
    require(net, c)?;
    let mut trace = Trace::default();
    let mut cur = net.clone();
    loop {
        let successors = cur.children(c);
        if successors.is_empty() {
            let (next, s) = remove_barren(&cur, c)?;
            trace.push(s);
            return Ok((next, trace));
        }
        if cur.is_deterministic(c) {
            let (next, s) = dnp(&cur, c, None, mode, None)?;
            trace.push(s);
            cur = next;
            continue;
        }
        if successors.len() == 1 {
            let (next, s) = reduce_single(&cur, c, mode)?;
            trace.push(s);
            return Ok((next, trace));
        }
        let d = first_reversal_target(&cur, c).expect("has successors").to_string();
        let (next, s) = reverse_with(&cur, c, &d, mode)?;
        trace.push(s);
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::validate;
    use Sign::*;

    fn fragment(kc: NodeKind, kd: NodeKind, cd: Sign, ac: Sign, ad: Sign) -> Qpn {
        let mut b = Qpn::builder().prob("a").node("c", kc).node("d", kd).edge("c", "d", cd);
        if ac != Zero {
            b = b.edge("a", "c", ac);
        }
        if ad != Zero {
            b = b.edge("a", "d", ad);
        }
        b.build().unwrap()
    }

    #[test]
    fn op_text_parses() {
        assert_eq!("reverse:c,d".parse(), Ok(TransformOp::reverse("c", "d")));
        assert_eq!("dnp:c, d".parse(), Ok(TransformOp::dnp_into("c", "d")));
        assert_eq!("barren:x".parse(), Ok(TransformOp::remove_barren("x")));
        assert!("reverse:c".parse::<TransformOp>().is_err());
        assert!("dnp:".parse::<TransformOp>().is_err());
        assert!("flip:c".parse::<TransformOp>().is_err());
    }

    #[test]
    fn dnp_single_chain() {
        let net = fragment(NodeKind::Deterministic, NodeKind::Probabilistic, Plus, Plus, Zero);
        let (out, s) = propagate_deterministic(&net, "c").unwrap();
        assert_eq!(out.sign("a", "d"), Plus);
        assert!(!out.is_parent("c", "d"));
        assert!(out.is_parent("a", "c"));
        assert_eq!(s.updates.len(), 1);
        assert!(validate(&out).is_empty());
    }

    #[test]
    fn dnp_over_opposed_paths_is_ambiguous() {
        let net = fragment(NodeKind::Deterministic, NodeKind::Deterministic, Minus, Plus, Plus);
        let (out, _) = propagate_deterministic(&net, "c").unwrap();
        assert_eq!(out.sign("a", "d"), Ambig);
        assert!(out.is_deterministic("d"));
    }

    #[test]
    fn dnp_errors() {
        let net = fragment(NodeKind::Probabilistic, NodeKind::Probabilistic, Plus, Plus, Zero);
        assert!(matches!(propagate_deterministic(&net, "c"), Err(TransformError::NotDeterministic(_))));
        let net = fragment(NodeKind::Deterministic, NodeKind::Probabilistic, Plus, Plus, Zero);
        assert!(matches!(propagate_deterministic(&net, "d"), Err(TransformError::NotDeterministic(_))));
        let barren = Qpn::builder().prob("a").det("c").edge("a", "c", Plus).build().unwrap();
        assert!(matches!(propagate_deterministic(&barren, "c"), Err(TransformError::Barren(_))));
    }

    #[test]
    fn table_rows() {
        // case I
        let net = fragment(NodeKind::Deterministic, NodeKind::Deterministic, Plus, Plus, Plus);
        let (out, s) = reverse_arc(&net, "c", "d").unwrap();
        assert_eq!(s.case, Some(Case::I));
        assert_eq!((out.sign("d", "c"), out.sign("a", "c"), out.sign("a", "d")), (Plus, Minus, Plus));
        // case II
        let net = fragment(NodeKind::Deterministic, NodeKind::Deterministic, Plus, Zero, Plus);
        let (out, s) = reverse_arc(&net, "c", "d").unwrap();
        assert_eq!(s.case, Some(Case::II));
        assert_eq!((out.sign("d", "c"), out.sign("a", "c"), out.sign("a", "d")), (Plus, Minus, Zero));
        // case V
        let net = fragment(NodeKind::Probabilistic, NodeKind::Probabilistic, Plus, Plus, Plus);
        let (out, s) = reverse_arc(&net, "c", "d").unwrap();
        assert_eq!(s.case, Some(Case::V));
        assert_eq!((out.sign("d", "c"), out.sign("a", "c"), out.sign("a", "d")), (Plus, Ambig, Plus));
        // case IV swaps kinds
        let net = fragment(NodeKind::Probabilistic, NodeKind::Deterministic, Minus, Plus, Plus);
        let (out, s) = reverse_arc(&net, "c", "d").unwrap();
        assert_eq!(s.case, Some(Case::IV));
        assert!(out.is_deterministic("c"));
        assert!(!out.is_deterministic("d"));
        assert_eq!((out.sign("d", "c"), out.sign("a", "c"), out.sign("a", "d")), (Minus, Plus, Ambig));
        assert!(validate(&out).is_empty());
    }

    #[test]
    fn case_three_delegates_to_dnp() {
        let net = fragment(NodeKind::Deterministic, NodeKind::Probabilistic, Plus, Minus, Plus);
        let (out, s) = reverse_arc(&net, "c", "d").unwrap();
        assert_eq!(s.case, Some(Case::III));
        assert!(!out.is_parent("d", "c"));
        assert!(!out.is_parent("c", "d"));
        assert_eq!(out.sign("a", "c"), Minus);
        assert_eq!(out.sign("a", "d"), Ambig);
    }

    #[test]
    fn nonstrict_deterministic_child_falls_back() {
        let net = Qpn::builder()
            .prob("a")
            .prob("c")
            .det("d")
            .edge("a", "c", Plus)
            .edge_with("c", "d", Plus, Some(false))
            .build()
            .unwrap();
        let (out, s) = reverse_arc(&net, "c", "d").unwrap();
        assert_eq!(s.case, Some(Case::V));
        assert!(!out.is_deterministic("d"));
        assert!(!out.is_deterministic("c"));
    }

    #[test]
    fn reversal_rejects_alternate_paths() {
        let net = Qpn::builder()
            .prob("c")
            .prob("m")
            .prob("d")
            .edge("c", "m", Plus)
            .edge("m", "d", Plus)
            .edge("c", "d", Plus)
            .build()
            .unwrap();
        match reverse_arc(&net, "c", "d") {
            Err(TransformError::AlternatePath { path, .. }) => assert_eq!(path, vec!["c", "m", "d"]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(reverse_arc(&net, "d", "c"), Err(TransformError::MissingEdge { .. })));
    }

    #[test]
    fn barren_removal() {
        let net = Qpn::builder()
            .prob("a")
            .prob("b")
            .det("c")
            .edge("a", "c", Plus)
            .edge("b", "c", Plus)
            .synergy("a", "b", "c", Plus)
            .build()
            .unwrap();
        let (out, _) = remove_barren(&net, "c").unwrap();
        assert!(!out.contains("c"));
        assert_eq!(out.synergies().count(), 0);
        assert!(matches!(remove_barren(&net, "a"), Err(TransformError::HasSuccessors { .. })));
        let (reduced, trace) = reduce_node(&net, "c").unwrap();
        assert_eq!(reduced, out);
        assert_eq!(trace.ops(), vec![TransformOp::remove_barren("c")]);
    }

    #[test]
    fn probabilistic_reduction_makes_successor_probabilistic() {
        let net =
            Qpn::builder().prob("a").prob("c").det("d").edge("a", "c", Minus).edge("c", "d", Minus).build().unwrap();
        let (out, trace) = reduce_node(&net, "c").unwrap();
        assert_eq!(out.sign("a", "d"), Plus);
        assert!(!out.is_deterministic("d"));
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.replay(&net).unwrap(), out);
    }
}
