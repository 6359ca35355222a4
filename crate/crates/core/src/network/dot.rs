use std::fmt::Write as _;

use super::Qpn;

/// Graphviz rendering. Deterministic nodes get a doubled ellipse, edges are
/// labelled with their sign, and synergy entries appear as dashed
/// undirected links between the pair members.
pub fn to_dot(net: &Qpn) -> String {
    let mut out = String::from("digraph qpn {\n");
    out.push_str("  node [shape=ellipse];\n");
    for (name, kind) in net.nodes() {
        if kind.is_deterministic() {
            let _ = writeln!(out, "  \"{name}\" [peripheries=2];");
        } else {
            let _ = writeln!(out, "  \"{name}\";");
        }
    }
    for (p, c, e) in net.edges() {
        match net.stored_curvature(p, c) {
            Some(k) => {
                let _ = writeln!(out, "  \"{p}\" -> \"{c}\" [label=\"{}\", xlabel=\"curv {k}\"];", e.sign);
            }
            None => {
                let _ = writeln!(out, "  \"{p}\" -> \"{c}\" [label=\"{}\"];", e.sign);
            }
        }
    }
    for (k, s) in net.synergies() {
        let _ = writeln!(out, "  // synergy on {}", k.child);
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [dir=none, style=dashed, constraint=false, label=\"{s}\"];",
            k.first, k.second
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sign::Sign::*;

    #[test]
    fn deterministic_nodes_are_doubled() {
        let net = Qpn::builder().det("c").build().unwrap();
        assert!(to_dot(&net).contains("\"c\" [peripheries=2];"));
    }

    #[test]
    fn edges_carry_sign_labels() {
        let net = Qpn::builder().prob("a").prob("b").edge("a", "b", Minus).build().unwrap();
        assert!(to_dot(&net).contains("\"a\" -> \"b\" [label=\"-\""));
    }

    #[test]
    fn synergy_is_a_dashed_link() {
        let net = Qpn::builder()
            .prob("salary")
            .prob("interest")
            .det("income")
            .edge("salary", "income", Plus)
            .edge("interest", "income", Plus)
            .synergy("salary", "interest", "income", Zero)
            .build()
            .unwrap();
        let dot = to_dot(&net);
        assert!(dot.contains("\"interest\" -> \"salary\" [dir=none, style=dashed, constraint=false, label=\"0\"];"));
    }
}
