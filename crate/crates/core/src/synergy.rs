//! Synergy bookkeeping under node reduction and qualitative synergy queries.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::QueryError;
use crate::network::Qpn;
use crate::sign::Sign;
use crate::transforms::{self, SynergyMode, SynergyUpdate, Trace, TransformOp};

/// Interaction of `pair` in their influence on `child`, given `given`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynergyQuery {
    pub pair: (String, String),
    pub child: String,
    pub given: BTreeSet<String>,
}

impl SynergyQuery {
    pub fn new<I, S>(a: &str, b: &str, child: &str, given: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SynergyQuery {
            pair: (a.to_string(), b.to_string()),
            child: child.to_string(),
            given: given.into_iter().map(Into::into).collect(),
        }
    }

    fn check(&self, net: &Qpn) -> Result<(), QueryError> {
        let (a, b) = (&self.pair.0, &self.pair.1);
        for n in [a, b, &self.child].into_iter().chain(&self.given) {
            if !net.contains(n) {
                return Err(QueryError::UnknownNode(n.clone()));
            }
        }
        if a == b {
            return Err(QueryError::Malformed(format!("pair members are both `{a}`")));
        }
        for n in [a, b, &self.child] {
            if self.given.contains(n) {
                return Err(QueryError::Malformed(format!("`{n}` is both queried and given")));
            }
        }
        if a == &self.child || b == &self.child {
            return Err(QueryError::Malformed("the child cannot be a pair member".into()));
        }
        for n in [a, b] {
            if !net.has_directed_path(n, &self.child) {
                return Err(QueryError::NoPath { from: n.clone(), to: self.child.clone() });
            }
        }
        Ok(())
    }
}

/// Answer to a synergy query with the reductions that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynergyResult {
    pub sign: Sign,
    pub trace: Trace,
    pub final_net: Qpn,
    /// Why the answer fell back to `?` before reading a stored synergy.
    pub blocked: Option<String>,
}

/// Updates the synergies on `d` after `c -> d` has been spliced out of
/// `out`. `before` is the network prior to the step. Only pairs with a
/// member among `c`'s parents change.
pub(crate) fn apply_reduction_update(
    before: &Qpn,
    out: &mut Qpn,
    c: &str,
    d: &str,
    mode: SynergyMode,
) -> Vec<SynergyUpdate> {
    let pc: BTreeSet<&str> = before.parents(c).into_iter().collect();
    let parents: Vec<String> = out.parents(d).into_iter().map(str::to_string).collect();
    let c_det = before.is_deterministic(c);
    let kappa = if c_det && before.is_deterministic(d) { before.curvature(c, d) } else { Sign::Ambig };
    let cd = before.sign(c, d);
    let mut updates = Vec::new();
    for (i, a) in parents.iter().enumerate() {
        for b in &parents[i + 1..] {
            if !pc.contains(a.as_str()) && !pc.contains(b.as_str()) {
                continue;
            }
            let ab_d = before.synergy(a, b, d);
            let ab_c = before.synergy(a, b, c);
            let (ac, bc) = (before.sign(a, c), before.sign(b, c));
            let (ac_d, bc_d) = (before.synergy(a, c, d), before.synergy(b, c, d));
            let mut after = ab_d + ab_c * cd + bc * ac_d + ac * bc_d;
            let mut rule = format!(
                "δ'({{{a},{b}}},{d}) = δ({{{a},{b}}},{d}) ⊕ (δ({{{a},{b}}},{c}) ⊗ δ({c},{d})) ⊕ (δ({b},{c}) ⊗ δ({{{a},{c}}},{d})) ⊕ (δ({a},{c}) ⊗ δ({{{b},{c}}},{d}))"
            );
            let mut evaluation = format!("{ab_d} ⊕ ({ab_c} ⊗ {cd}) ⊕ ({bc} ⊗ {ac_d}) ⊕ ({ac} ⊗ {bc_d})");
            if c_det {
                after = after + ac * bc * kappa;
                rule.push_str(&format!(" ⊕ (δ({a},{c}) ⊗ δ({b},{c}) ⊗ κ({c},{d}))"));
                evaluation.push_str(&format!(" ⊕ ({ac} ⊗ {bc} ⊗ {kappa})"));
            }
            if mode == SynergyMode::Invalidate {
                after = Sign::Ambig;
                rule = format!("δ'({{{a},{b}}},{d}) = ?");
                evaluation = "not propagated".into();
            }
            out.set_synergy(a, b, d, after);
            updates.push(SynergyUpdate { pair: (a.clone(), b.clone()), child: d.to_string(), after, rule, evaluation });
        }
    }
    updates
}

/// Node reduction that carries synergies through the update rule.
pub fn reduce_with_synergy(net: &Qpn, c: &str) -> Result<(Qpn, Trace), crate::error::TransformError> {
    transforms::reduce_with(net, c, SynergyMode::Propagate)
}

/// Sign of the synergy of `q.pair` on `q.child`.
pub fn qualitative_synergy(net: &Qpn, q: &SynergyQuery) -> Result<Sign, QueryError> {
    synergy_query(net, q).map(|r| r.sign)
}

/// Eliminates every node outside the pair, the child and the given set,
/// then reads the stored synergy. Any elimination that would need an arc
/// reversal yields `?`.
pub fn synergy_query(net: &Qpn, q: &SynergyQuery) -> Result<SynergyResult, QueryError> {
    if net.topological_order().is_none() {
        return Err(QueryError::Cyclic);
    }
    q.check(net)?;
    let protected: BTreeSet<&str> = [q.pair.0.as_str(), q.pair.1.as_str(), q.child.as_str()]
        .into_iter()
        .chain(q.given.iter().map(String::as_str))
        .collect();
    let mut cur = net.clone();
    let mut trace = Trace::default();
    let blocked = loop {
        let order: Vec<String> = cur
            .topological_order()
            .expect("transformations keep the network acyclic")
            .into_iter()
            .map(str::to_string)
            .collect();
        let free: Vec<&String> = order.iter().filter(|n| !protected.contains(n.as_str())).collect();
        if free.is_empty() {
            break None;
        }
        let pick = free
            .iter()
            .find(|n| cur.is_barren(n))
            .map(|n| (*n, TransformOp::remove_barren(n)))
            .or_else(|| free.iter().find(|n| cur.is_deterministic(n)).map(|n| (*n, TransformOp::dnp(n))))
            .or_else(|| free.iter().find(|n| cur.children(n).len() == 1).map(|n| (*n, TransformOp::reduce(n))));
        let Some((node, op)) = pick else {
            let stuck = free.iter().find(|n| cur.children(n).len() > 1).map_or_else(String::new, |n| n.to_string());
            break Some(format!("eliminating `{stuck}` needs an arc reversal"));
        };
        let (next, step) = transforms::apply(&cur, &op, SynergyMode::Propagate)?;
        trace.push(step);
        cur = next;
        if matches!(op, TransformOp::Dnp { .. }) {
            let (next, step) = transforms::remove_barren(&cur, node)?;
            trace.push(step);
            cur = next;
        }
    };
    let blocked = blocked.or_else(|| {
        let succ = cur.children(&q.child);
        (!succ.is_empty()).then(|| format!("`{}` has given successors: {}", q.child, succ.join(", ")))
    });
    let sign = if blocked.is_some() { Sign::Ambig } else { cur.synergy(&q.pair.0, &q.pair.1, &q.child) };
    Ok(SynergyResult { sign, trace, final_net: cur, blocked })
}

/// Human-readable account of a synergy query in the layout of
/// [`crate::query::explain`].
pub fn explain_synergy(q: &SynergyQuery, result: &SynergyResult) -> String {
    let mut out = String::new();
    if result.trace.is_empty() {
        out.push_str("network already minimal\n");
    }
    for (i, step) in result.trace.steps.iter().enumerate() {
        let _ = write!(out, "step {}: {step}", i + 1);
    }
    if let Some(why) = &result.blocked {
        let _ = writeln!(out, "blocked: {why}");
    }
    let given: Vec<&str> = q.given.iter().map(String::as_str).collect();
    let _ = writeln!(
        out,
        "answer: synergy({},{}; {}) given {{{}}} = {}",
        q.pair.0,
        q.pair.1,
        q.child,
        given.join(", "),
        result.sign
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::*;

    fn tax(curvature: Option<Sign>) -> Qpn {
        let mut b = Qpn::builder()
            .prob("salary")
            .prob("interest")
            .det("income")
            .det("taxes")
            .edge("salary", "income", Plus)
            .edge("interest", "income", Plus)
            .edge("income", "taxes", Plus)
            .synergy("salary", "interest", "income", Zero);
        if let Some(k) = curvature {
            b = b.curvature("income", "taxes", k);
        }
        b.build().unwrap()
    }

    fn query() -> SynergyQuery {
        SynergyQuery::new("salary", "interest", "taxes", Vec::<String>::new())
    }

    #[test]
    fn tax_example() {
        assert_eq!(qualitative_synergy(&tax(None), &query()).unwrap(), Ambig);
        assert_eq!(qualitative_synergy(&tax(Some(Plus)), &query()).unwrap(), Plus);
        assert_eq!(qualitative_synergy(&tax(Some(Minus)), &query()).unwrap(), Minus);
        assert_eq!(qualitative_synergy(&tax(Some(Zero)), &query()).unwrap(), Zero);
    }

    #[test]
    fn direct_parents_read_stored_entry() {
        let net = Qpn::builder()
            .prob("a")
            .prob("b")
            .prob("c")
            .edge("a", "c", Plus)
            .edge("b", "c", Minus)
            .synergy("a", "b", "c", Plus)
            .build()
            .unwrap();
        let r = synergy_query(&net, &SynergyQuery::new("a", "b", "c", Vec::<String>::new())).unwrap();
        assert_eq!(r.sign, Plus);
        assert!(r.trace.is_empty());
    }

    #[test]
    fn single_surviving_term() {
        // only δ(b,c) ⊗ δ({a,c},d) is nonzero
        let net = Qpn::builder()
            .prob("a")
            .prob("b")
            .prob("c")
            .prob("d")
            .edge("b", "c", Plus)
            .edge("a", "d", Plus)
            .edge("c", "d", Plus)
            .synergy("a", "c", "d", Plus)
            .build()
            .unwrap();
        let (out, trace) = reduce_with_synergy(&net, "c").unwrap();
        assert_eq!(out.synergy("a", "b", "d"), Plus);
        assert_eq!(trace.steps[0].synergy_updates.len(), 1);
    }

    #[test]
    fn invalidating_reduction_forgets() {
        let (out, _) = transforms::reduce_node(&tax(Some(Plus)), "income").unwrap();
        assert_eq!(out.synergy("salary", "interest", "taxes"), Ambig);
    }

    #[test]
    fn reversal_needed_is_ambiguous() {
        let net = Qpn::builder()
            .prob("a")
            .prob("b")
            .prob("m")
            .prob("c")
            .edge("a", "m", Plus)
            .edge("m", "c", Plus)
            .edge("m", "b", Plus)
            .edge("b", "c", Plus)
            .synergy("m", "b", "c", Plus)
            .build()
            .unwrap();
        let r = synergy_query(&net, &SynergyQuery::new("a", "b", "c", Vec::<String>::new())).unwrap();
        assert_eq!(r.sign, Ambig);
        assert!(r.blocked.is_some());
    }

    #[test]
    fn query_errors() {
        let net = tax(None);
        let q = SynergyQuery::new("salary", "taxes", "income", Vec::<String>::new());
        assert!(matches!(qualitative_synergy(&net, &q), Err(QueryError::NoPath { .. })));
        let q = SynergyQuery::new("salary", "salary", "taxes", Vec::<String>::new());
        assert!(matches!(qualitative_synergy(&net, &q), Err(QueryError::Malformed(_))));
        let q = SynergyQuery::new("salary", "nobody", "taxes", Vec::<String>::new());
        assert!(matches!(qualitative_synergy(&net, &q), Err(QueryError::UnknownNode(_))));
    }
}
