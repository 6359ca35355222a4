//! Line-oriented text format.
//!
//! ```text
//! # comment
//! node <name> prob|det [multi]
//! edge <parent> <child> <sign> [strict|nonstrict]
//! synergy <name1> <name2> <child> <sign>
//! curvature <parent> <child> <sign>
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::validate::{is_valid_name, Rule};
use super::{validate, NodeKind, Qpn, QpnBuilder, SynergyKey};
use crate::sign::Sign;

const HEADER: &str = "# qualitative probabilistic network";

/// One located problem in a network file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub hint: Option<String>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if let Some(hint) = &self.hint {
            write!(f, " (hint: {hint})")?;
        }
        Ok(())
    }
}

/// Failure to load a network file.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct LoadError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                f.write_char('\n')?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &content[s..i], column: content[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &content[s..], column: content[..s].chars().count() + 1 });
    }
    out
}

#[derive(Default)]
struct Parser {
    builder: QpnBuilder,
    diagnostics: Vec<Diagnostic>,
    node_lines: BTreeMap<String, usize>,
    edge_lines: BTreeMap<(String, String), usize>,
    synergy_lines: BTreeMap<SynergyKey, usize>,
    curvature_lines: BTreeMap<(String, String), usize>,
}

impl Parser {
    fn error(&mut self, line: usize, column: usize, message: impl Into<String>, hint: Option<&str>) {
        self.diagnostics.push(Diagnostic { line, column, message: message.into(), hint: hint.map(str::to_string) });
    }

    fn name<'a>(&mut self, line: usize, tok: &Token<'a>) -> Option<&'a str> {
        if is_valid_name(tok.text) {
            Some(tok.text)
        } else {
            self.error(
                line,
                tok.column,
                format!("invalid node name `{}`", tok.text),
                Some("names must match [A-Za-z_][A-Za-z0-9_]*"),
            );
            None
        }
    }

    fn sign(&mut self, line: usize, tok: &Token<'_>) -> Option<Sign> {
        match tok.text.parse::<Sign>() {
            Ok(s) => Some(s),
            Err(e) => {
                self.error(line, tok.column, e.to_string(), None);
                None
            }
        }
    }

    fn arity(&mut self, line: usize, toks: &[Token<'_>], expected: &[usize], usage: &str) -> bool {
        if expected.contains(&toks.len()) {
            return true;
        }
        let column = toks.get(expected[0]).map_or_else(|| toks[0].column, |t| t.column);
        self.error(
            line,
            column,
            format!("`{}` expects {} fields, found {}", toks[0].text, expected[0], toks.len()),
            Some(usage),
        );
        false
    }

    fn line(&mut self, line: usize, toks: Vec<Token<'_>>) {
        match toks[0].text {
            "node" => {
                if !self.arity(line, &toks, &[3, 4], "node <name> prob|det [multi]") {
                    return;
                }
                let Some(name) = self.name(line, &toks[1]) else { return };
                let kind = match toks[2].text {
                    "prob" => NodeKind::Probabilistic,
                    "det" => NodeKind::Deterministic,
                    other => {
                        self.error(
                            line,
                            toks[2].column,
                            format!("unknown node kind `{other}`"),
                            Some("use `prob` or `det`"),
                        );
                        return;
                    }
                };
                if let Some(first) = self.node_lines.get(name) {
                    let msg = format!("duplicate node `{name}` (first declared on line {first})");
                    self.error(line, toks[1].column, msg, None);
                    return;
                }
                if let Some(flag) = toks.get(3).filter(|t| t.text != "multi") {
                    let msg = format!("unknown node flag `{}`", flag.text);
                    self.error(line, flag.column, msg, Some("the only node flag is `multi`"));
                    return;
                }
                self.node_lines.insert(name.to_string(), line);
                self.builder = std::mem::take(&mut self.builder).node(name, kind);
                if toks.len() == 4 {
                    self.builder = std::mem::take(&mut self.builder).multivalued(name);
                }
            }
            "edge" => {
                if !self.arity(line, &toks, &[4, 5], "edge <parent> <child> <sign> [strict|nonstrict]") {
                    return;
                }
                let (Some(p), Some(c), Some(sign)) =
                    (self.name(line, &toks[1]), self.name(line, &toks[2]), self.sign(line, &toks[3]))
                else {
                    return;
                };
                if sign == Sign::Zero {
                    self.error(
                        line,
                        toks[3].column,
                        format!("edge {p} {c} has sign 0"),
                        Some("zero influences are implicit; omit the edge"),
                    );
                    return;
                }
                if p == c {
                    self.error(
                        line,
                        toks[2].column,
                        format!("self-loop on `{p}`"),
                        Some("a node cannot influence itself"),
                    );
                    return;
                }
                let strict = match toks.get(4).map(|t| t.text) {
                    None => None,
                    Some("strict") => Some(true),
                    Some("nonstrict") => Some(false),
                    Some(other) => {
                        self.error(
                            line,
                            toks[4].column,
                            format!("unknown strictness `{other}`"),
                            Some("use `strict` or `nonstrict`"),
                        );
                        return;
                    }
                };
                let key = (p.to_string(), c.to_string());
                if let Some(first) = self.edge_lines.get(&key) {
                    let msg = format!("duplicate edge {p} {c} (first declared on line {first})");
                    self.error(line, toks[1].column, msg, None);
                    return;
                }
                self.edge_lines.insert(key, line);
                self.builder = std::mem::take(&mut self.builder).edge_with(p, c, sign, strict);
            }
            "synergy" => {
                if !self.arity(line, &toks, &[5], "synergy <name1> <name2> <child> <sign>") {
                    return;
                }
                let (Some(a), Some(b), Some(c), Some(sign)) = (
                    self.name(line, &toks[1]),
                    self.name(line, &toks[2]),
                    self.name(line, &toks[3]),
                    self.sign(line, &toks[4]),
                ) else {
                    return;
                };
                let key = SynergyKey::new(a, b, c);
                if let Some(first) = self.synergy_lines.get(&key) {
                    let msg = format!("duplicate synergy {a} {b} {c} (first declared on line {first})");
                    self.error(line, toks[1].column, msg, None);
                    return;
                }
                self.synergy_lines.insert(key, line);
                self.builder = std::mem::take(&mut self.builder).synergy(a, b, c, sign);
            }
            "curvature" => {
                if !self.arity(line, &toks, &[4], "curvature <parent> <child> <sign>") {
                    return;
                }
                let (Some(p), Some(c), Some(sign)) =
                    (self.name(line, &toks[1]), self.name(line, &toks[2]), self.sign(line, &toks[3]))
                else {
                    return;
                };
                let key = (p.to_string(), c.to_string());
                if let Some(first) = self.curvature_lines.get(&key) {
                    let msg = format!("duplicate curvature {p} {c} (first declared on line {first})");
                    self.error(line, toks[1].column, msg, None);
                    return;
                }
                self.curvature_lines.insert(key, line);
                self.builder = std::mem::take(&mut self.builder).curvature(p, c, sign);
            }
            other => self.error(
                line,
                toks[0].column,
                format!("unknown directive `{other}`"),
                Some("expected node, edge, synergy or curvature"),
            ),
        }
    }

    /// Line of the declaration a violation's element refers to.
    fn locate(&self, element: &str) -> usize {
        let words: Vec<&str> = element.split_whitespace().collect();
        let owned = |i: usize| words.get(i).map(|s| s.to_string()).unwrap_or_default();
        let found = match words.first().copied() {
            Some("node") => self.node_lines.get(&owned(1)).copied(),
            Some("edge") => self.edge_lines.get(&(owned(1), owned(2))).copied(),
            Some("synergy") => self.synergy_lines.get(&SynergyKey::new(&owned(1), &owned(2), &owned(3))).copied(),
            Some("curvature") => self.curvature_lines.get(&(owned(1), owned(2))).copied(),
            _ => None,
        };
        found.unwrap_or(0)
    }
}

/// Parses and validates a network file.
pub fn load_network(text: &str) -> Result<Qpn, LoadError> {
    let mut parser = Parser::default();
    for (i, raw) in text.lines().enumerate() {
        let toks = tokenize(raw);
        if !toks.is_empty() {
            parser.line(i + 1, toks);
        }
    }
    if !parser.diagnostics.is_empty() {
        return Err(LoadError { diagnostics: parser.diagnostics });
    }
    let net = std::mem::take(&mut parser.builder).build_unchecked();
    let violations = validate(&net);
    if violations.is_empty() {
        return Ok(net);
    }
    let diagnostics = violations
        .into_iter()
        .map(|v| {
            let hint = match v.rule {
                Rule::DanglingReference => Some("declare the node with `node <name> prob|det`".to_string()),
                Rule::Cycle => Some("the edge set must be acyclic".to_string()),
                Rule::SynergyNotParents | Rule::CurvatureNotParent => {
                    Some("annotations must refer to direct parents of the child".to_string())
                }
                Rule::CurvatureOnProbabilistic => Some("declare the child `det` or drop the curvature".to_string()),
                _ => None,
            };
            Diagnostic { line: parser.locate(&v.element), column: 1, message: v.to_string(), hint }
        })
        .collect();
    Err(LoadError { diagnostics })
}

/// Canonical text form: header, then nodes, edges, synergies and
/// curvatures, each in lexicographic order. Strictness is written only when
/// it differs from the child's kind default, and `multi` only when no
/// annotation implies it.
pub fn serialize(net: &Qpn) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    let multi: Vec<&str> = net.declared_multivalued().collect();
    for (name, kind) in net.nodes() {
        let flag = if multi.contains(&name) { " multi" } else { "" };
        let _ = writeln!(out, "node {name} {kind}{flag}");
    }
    for (p, c, e) in net.edges() {
        let _ = write!(out, "edge {p} {c} {}", e.sign);
        let default = net.kind(c).is_some_and(|k| k.default_strictness());
        if e.strict != default {
            out.push_str(if e.strict { " strict" } else { " nonstrict" });
        }
        out.push('\n');
    }
    for (k, s) in net.synergies() {
        let _ = writeln!(out, "synergy {} {} {} {s}", k.first, k.second, k.child);
    }
    for (p, c, s) in net.curvatures() {
        let _ = writeln!(out, "curvature {p} {c} {s}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Sign::*;

    const CHAIN_DET: &str = "\
# chain through a deterministic w
node z prob
node w det
node x prob
node y prob
edge z w +
edge w x +
edge w y -
edge z x +
";

    #[test]
    fn loads_minimal_network() {
        let net = load_network("node a prob\nnode c det\nedge a c +").unwrap();
        assert_eq!(net.node_count(), 2);
        let e = net.edge("a", "c").unwrap();
        assert_eq!(e.sign, Plus);
        assert!(e.strict);
    }

    #[test]
    fn loads_chain_fixture() {
        let net = load_network(CHAIN_DET).unwrap();
        assert_eq!(net.node_count(), 4);
        assert_eq!(net.edge_count(), 4);
        assert!(net.is_deterministic("w"));
    }

    #[test]
    fn canonical_serialization_of_chain() {
        let net = load_network(CHAIN_DET).unwrap();
        let expected = "\
# qualitative probabilistic network
node w det
node x prob
node y prob
node z prob
edge w x +
edge w y -
edge z w +
edge z x +
";
        assert_eq!(serialize(&net), expected);
        assert_eq!(load_network(&serialize(&net)).unwrap(), net);
    }

    #[test]
    fn empty_network_is_just_the_header() {
        assert_eq!(serialize(&Qpn::default()), format!("{HEADER}\n"));
        assert_eq!(load_network(&serialize(&Qpn::default())).unwrap(), Qpn::default());
    }

    #[test]
    fn self_loop_is_rejected() {
        let err = load_network("node a prob\nedge a a +").unwrap_err();
        assert_eq!(err.diagnostics[0].line, 2);
        assert!(err.diagnostics[0].message.contains("self-loop"));
    }

    #[test]
    fn cycle_is_located() {
        let err = load_network("node a prob\nnode b prob\nedge a b +\nedge b a -\n").unwrap_err();
        assert_eq!(err.diagnostics.len(), 1);
        assert!(err.diagnostics[0].message.contains("cycle"));
        assert_eq!(err.diagnostics[0].line, 3);
    }

    #[test]
    fn zero_edge_gets_a_hint() {
        let err = load_network("node a prob\nnode b prob\nedge a b 0").unwrap_err();
        let d = &err.diagnostics[0];
        assert_eq!((d.line, d.column), (3, 10));
        assert!(d.hint.as_deref().unwrap().contains("omit"));
    }

    #[test]
    fn parse_errors_are_located() {
        let err = load_network("node a prob\nnode a det\nnode b maybe\nedge a b x\nfoo\nedge a\n").unwrap_err();
        let lines: Vec<usize> = err.diagnostics.iter().map(|d| d.line).collect();
        assert_eq!(lines, vec![2, 3, 4, 5, 6]);
        assert_eq!(err.diagnostics[2].column, 10);
    }

    #[test]
    fn annotation_errors() {
        let err = load_network("node a prob\nnode c prob\nedge a c +\ncurvature a c +\n").unwrap_err();
        assert_eq!(err.diagnostics[0].line, 4);
        let err = load_network("node a prob\nnode b prob\nnode c prob\nedge a c +\nsynergy a b c +\n").unwrap_err();
        assert!(err.diagnostics[0].message.contains("synergy-not-parents"));
        let err = load_network("node a prob\nedge a ghost +\n").unwrap_err();
        assert!(err.diagnostics[0].message.contains("dangling"));
    }

    #[test]
    fn strictness_override_round_trips() {
        let text = "node a prob\nnode b det\nnode c prob\nedge a b + nonstrict\nedge a c - strict\n";
        let net = load_network(text).unwrap();
        assert!(!net.edge("a", "b").unwrap().strict);
        assert!(net.edge("a", "c").unwrap().strict);
        let s = serialize(&net);
        assert!(s.contains("edge a b + nonstrict"));
        assert!(s.contains("edge a c - strict"));
        assert_eq!(load_network(&s).unwrap(), net);
    }

    #[test]
    fn comments_and_unicode_minus() {
        let net = load_network("node a prob # root\n  node b prob\nedge a b \u{2212}\n").unwrap();
        assert_eq!(net.sign("a", "b"), Minus);
    }

    fn arb_network() -> impl Strategy<Value = Qpn> {
        let n = 6usize;
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec((0..4u8, any::<bool>(), any::<bool>()), n * (n - 1) / 2),
            proptest::collection::vec(0..4u8, n),
        )
            .prop_map(move |(kinds, edges, annot)| {
                let sign = |i: u8| [Plus, Minus, Ambig, Zero][i as usize];
                let mut b = Qpn::builder();
                for (i, det) in kinds.iter().enumerate() {
                    b = b.node(&names[i], if *det { NodeKind::Deterministic } else { NodeKind::Probabilistic });
                }
                let mut k = 0;
                let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
                for j in 0..n {
                    for i in 0..j {
                        let (s, strict, explicit) = edges[k];
                        k += 1;
                        if s < 3 {
                            b = b.edge_with(&names[i], &names[j], sign(s), explicit.then_some(strict));
                            parents[j].push(i);
                        }
                    }
                }
                for (j, ps) in parents.iter().enumerate() {
                    if ps.len() >= 2 {
                        b = b.synergy(&names[ps[0]], &names[ps[1]], &names[j], sign(annot[j]));
                    }
                    if kinds[j] && !ps.is_empty() {
                        b = b.curvature(&names[ps[0]], &names[j], sign(annot[j]));
                    }
                }
                b.build().expect("generator yields valid networks")
            })
    }

    proptest! {
        #[test]
        fn load_inverts_serialize(net in arb_network()) {
            let text = serialize(&net);
            let back = load_network(&text).unwrap();
            prop_assert_eq!(&back, &net);
            prop_assert_eq!(serialize(&back), text);
        }
    }
}
