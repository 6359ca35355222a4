use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::numeric::{assignments, row_index, survival, within, NumericNet, NumericNode, Table};
use super::OracleError;
use crate::network::Qpn;
use crate::query::InfluenceQuery;
use crate::sign::Sign;
use crate::synergy::SynergyQuery;

/// Full joint distribution as a list of positive-probability states.
#[derive(Clone, Debug, PartialEq)]
pub struct Joint {
    /// Node names, parallel to each state vector.
    pub names: Vec<String>,
    pub states: Vec<(Vec<usize>, f64)>,
}

/// Enumerates every state with positive probability. Deterministic nodes
/// are computed rather than branched on.
pub fn enumerate(nn: &NumericNet) -> Joint {
    fn go(nn: &NumericNet, i: usize, state: &mut Vec<usize>, p: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if i == nn.nodes.len() {
            out.push((state.clone(), p));
            return;
        }
        let row = nn.row_of(i, state);
        match &nn.nodes[i].table {
            Table::Function(f) => {
                state.push(f[row]);
                go(nn, i + 1, state, p, out);
                state.pop();
            }
            Table::Cpt(rows) => {
                for (v, &q) in rows[row].iter().enumerate() {
                    if q > 0.0 {
                        state.push(v);
                        go(nn, i + 1, state, p * q, out);
                        state.pop();
                    }
                }
            }
        }
    }
    let mut states = Vec::new();
    go(nn, 0, &mut Vec::with_capacity(nn.len()), 1.0, &mut states);
    Joint { names: nn.nodes.iter().map(|n| n.name.clone()).collect(), states }
}

impl Joint {
    pub fn total(&self) -> f64 {
        self.states.iter().map(|(_, p)| p).sum()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Probability of every state keyed by values in name order, so that
    /// joints over differently ordered networks can be compared.
    pub fn by_name(&self) -> BTreeMap<Vec<(String, usize)>, f64> {
        let mut order: Vec<usize> = (0..self.names.len()).collect();
        order.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        let mut out = BTreeMap::new();
        for (s, p) in &self.states {
            let key = order.iter().map(|&i| (self.names[i].clone(), s[i])).collect();
            *out.entry(key).or_insert(0.0) += p;
        }
        out
    }

    /// Unnormalised distribution of `target` for every assignment of
    /// `keys` with positive mass.
    fn grouped(&self, keys: &[usize], target: usize, card: usize) -> BTreeMap<Vec<usize>, Vec<f64>> {
        let mut out: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
        for (s, p) in &self.states {
            let key = keys.iter().map(|&k| s[k]).collect();
            out.entry(key).or_insert_with(|| vec![0.0; card])[s[target]] += p;
        }
        out
    }
}

/// Largest difference between the two joints over the union of states.
pub fn joint_distance(a: &Joint, b: &Joint) -> f64 {
    let (ma, mb) = (a.by_name(), b.by_name());
    ma.keys()
        .chain(mb.keys())
        .map(|k| (ma.get(k).copied().unwrap_or(0.0) - mb.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

fn lookup(nn: &NumericNet, joint: &Joint, name: &str) -> Result<(usize, usize), OracleError> {
    let i = joint.index_of(name).ok_or_else(|| OracleError::UnknownNode(name.to_string()))?;
    Ok((i, nn.nodes[i].card()))
}

/// One failed comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextViolation {
    /// Values of the conditioning nodes.
    pub context: Vec<(String, usize)>,
    pub observed: String,
    pub margin: f64,
}

/// Outcome of checking one claimed sign on one numeric network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub consistent: bool,
    /// Smallest signed slack over all comparisons; negative when violated.
    pub worst_margin: f64,
    pub contexts_checked: usize,
    /// Contexts with zero probability, which are not judged.
    pub contexts_skipped: usize,
    pub violations: Vec<ContextViolation>,
}

impl CheckReport {
    fn new() -> Self {
        CheckReport {
            consistent: true,
            worst_margin: f64::INFINITY,
            contexts_checked: 0,
            contexts_skipped: 0,
            violations: Vec::new(),
        }
    }

    /// Records a comparison whose value should have sign `claimed`.
    fn record(&mut self, claimed: Sign, x: f64, tol: f64, context: impl FnOnce() -> (Vec<(String, usize)>, String)) {
        let margin = match claimed {
            Sign::Plus => x,
            Sign::Minus => -x,
            Sign::Zero => -x.abs(),
            Sign::Ambig => f64::INFINITY,
        };
        self.worst_margin = self.worst_margin.min(margin);
        if !within(claimed, x, tol) {
            self.consistent = false;
            if self.violations.len() < 8 {
                let (context, observed) = context();
                self.violations.push(ContextViolation { context, observed, margin });
            }
        }
    }
}

fn context_of(names: &[&str], values: &[usize]) -> Vec<(String, usize)> {
    names.iter().zip(values).map(|(n, v)| (n.to_string(), *v)).collect()
}

/// Checks by enumeration that `P(target >= t | source = v, given)` moves in
/// `v` as `claimed` says, for every threshold and every given assignment
/// of positive probability.
pub fn exact_influence_check(
    nn: &NumericNet,
    q: &InfluenceQuery,
    claimed: Sign,
    tol: f64,
) -> Result<CheckReport, OracleError> {
    let joint = enumerate(nn);
    influence_check_on(nn, &joint, q, claimed, tol)
}

pub(crate) fn influence_check_on(
    nn: &NumericNet,
    joint: &Joint,
    q: &InfluenceQuery,
    claimed: Sign,
    tol: f64,
) -> Result<CheckReport, OracleError> {
    let (src, src_card) = lookup(nn, joint, &q.source)?;
    let (tgt, tgt_card) = lookup(nn, joint, &q.target)?;
    let given: Vec<&str> = q.given.iter().map(String::as_str).collect();
    let mut keys = Vec::new();
    let mut given_sizes = Vec::new();
    for g in &given {
        let (i, k) = lookup(nn, joint, g)?;
        keys.push(i);
        given_sizes.push(k);
    }
    keys.push(src);
    let groups = joint.grouped(&keys, tgt, tgt_card);
    let mut report = CheckReport::new();
    for g in assignments(&given_sizes) {
        let mut surv: Vec<(usize, Vec<f64>)> = Vec::new();
        for v in 0..src_card {
            let mut key = g.clone();
            key.push(v);
            match groups.get(&key) {
                Some(mass) if mass.iter().sum::<f64>() > 0.0 => {
                    let total: f64 = mass.iter().sum();
                    let dist: Vec<f64> = mass.iter().map(|m| m / total).collect();
                    surv.push((v, survival(&dist)));
                }
                _ => {}
            }
        }
        if surv.len() < 2 {
            report.contexts_skipped += 1;
            continue;
        }
        report.contexts_checked += 1;
        for (i, (lo, s_lo)) in surv.iter().enumerate() {
            for (hi, s_hi) in &surv[i + 1..] {
                for t in 0..s_lo.len() {
                    let diff = s_hi[t] - s_lo[t];
                    report.record(claimed, diff, tol, || {
                        (
                            context_of(&given, &g),
                            format!(
                                "P({} >= {} | {}={hi}) - P({} >= {} | {}={lo}) = {diff:.3e}",
                                q.target,
                                t + 1,
                                q.source,
                                q.target,
                                t + 1,
                                q.source
                            ),
                        )
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Random increasing transforms of a domain of size `k`, after the
/// identity on the node's cardinal values.
pub fn monotone_transforms(rng: &mut impl Rng, values: &[f64], extra: usize) -> Vec<Vec<f64>> {
    let mut out = vec![values.to_vec()];
    for _ in 0..extra {
        let mut acc = 0.0;
        out.push(
            values
                .iter()
                .map(|_| {
                    acc += rng.gen_range(0.0..1.0);
                    acc
                })
                .collect(),
        );
    }
    out
}

/// Checks that `E[φ(child) | a, b, given]` has mixed differences of sign
/// `claimed` for every `φ` in `transforms`, over all pairs `a1 > a2`,
/// `b1 > b2` whose four contexts have positive probability.
pub fn synergy_check(
    nn: &NumericNet,
    q: &SynergyQuery,
    claimed: Sign,
    transforms: &[Vec<f64>],
    tol: f64,
) -> Result<CheckReport, OracleError> {
    let joint = enumerate(nn);
    synergy_check_on(nn, &joint, q, claimed, transforms, tol)
}

pub(crate) fn synergy_check_on(
    nn: &NumericNet,
    joint: &Joint,
    q: &SynergyQuery,
    claimed: Sign,
    transforms: &[Vec<f64>],
    tol: f64,
) -> Result<CheckReport, OracleError> {
    let (a, ka) = lookup(nn, joint, &q.pair.0)?;
    let (b, kb) = lookup(nn, joint, &q.pair.1)?;
    let (child, kc) = lookup(nn, joint, &q.child)?;
    let given: Vec<&str> = q.given.iter().map(String::as_str).collect();
    let mut keys = Vec::new();
    let mut given_sizes = Vec::new();
    for g in &given {
        let (i, k) = lookup(nn, joint, g)?;
        keys.push(i);
        given_sizes.push(k);
    }
    keys.push(a);
    keys.push(b);
    let groups = joint.grouped(&keys, child, kc);
    let mut report = CheckReport::new();
    for g in assignments(&given_sizes) {
        let dist = |va: usize, vb: usize| -> Option<Vec<f64>> {
            let mut key = g.clone();
            key.push(va);
            key.push(vb);
            let mass = groups.get(&key)?;
            let total: f64 = mass.iter().sum();
            (total > 0.0).then(|| mass.iter().map(|m| m / total).collect())
        };
        let mut judged = false;
        for a2 in 0..ka {
            for a1 in a2 + 1..ka {
                for b2 in 0..kb {
                    for b1 in b2 + 1..kb {
                        let (Some(d11), Some(d22), Some(d12), Some(d21)) =
                            (dist(a1, b1), dist(a2, b2), dist(a1, b2), dist(a2, b1))
                        else {
                            continue;
                        };
                        judged = true;
                        for phi in transforms {
                            let e = |d: &[f64]| d.iter().zip(phi).map(|(p, x)| p * x).sum::<f64>();
                            let mixed = e(&d11) + e(&d22) - e(&d12) - e(&d21);
                            report.record(claimed, mixed, tol, || {
                                (
                                    context_of(&given, &g),
                                    format!(
                                        "mixed difference at {}={a1}/{a2}, {}={b1}/{b2} is {mixed:.3e}",
                                        q.pair.0, q.pair.1
                                    ),
                                )
                            });
                        }
                    }
                }
            }
        }
        if judged {
            report.contexts_checked += 1;
        } else {
            report.contexts_skipped += 1;
        }
    }
    Ok(report)
}

/// Largest `|P(x, y | z) - P(x | z) P(y | z)|` over positive-probability
/// assignments `z` of `given`.
pub fn dependence(nn: &NumericNet, x: &str, y: &str, given: &[&str]) -> Result<f64, OracleError> {
    let joint = enumerate(nn);
    let (xi, kx) = lookup(nn, &joint, x)?;
    let (yi, ky) = lookup(nn, &joint, y)?;
    let mut keys = Vec::new();
    for g in given {
        keys.push(lookup(nn, &joint, g)?.0);
    }
    let mut table: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
    for (s, p) in &joint.states {
        let key = keys.iter().map(|&k| s[k]).collect();
        table.entry(key).or_insert_with(|| vec![0.0; kx * ky])[s[xi] * ky + s[yi]] += p;
    }
    let mut worst: f64 = 0.0;
    for cells in table.values() {
        let total: f64 = cells.iter().sum();
        if total <= 0.0 {
            continue;
        }
        for vx in 0..kx {
            let px: f64 = (0..ky).map(|vy| cells[vx * ky + vy]).sum::<f64>() / total;
            for vy in 0..ky {
                let py: f64 = (0..kx).map(|u| cells[u * ky + vy]).sum::<f64>() / total;
                worst = worst.max((cells[vx * ky + vy] / total - px * py).abs());
            }
        }
    }
    Ok(worst)
}

/// Bayes-rule reversal of the probabilistic arc `c -> d`. Both nodes end
/// up with the union of their parents; `c` also gains `d`.
pub fn reverse_numeric(nn: &NumericNet, c: &str, d: &str) -> Result<NumericNet, OracleError> {
    let ci = nn.index_of(c).ok_or_else(|| OracleError::UnknownNode(c.into()))?;
    let di = nn.index_of(d).ok_or_else(|| OracleError::UnknownNode(d.into()))?;
    let (Table::Cpt(c_rows), Table::Cpt(d_rows)) = (&nn.nodes[ci].table, &nn.nodes[di].table) else {
        return Err(OracleError::Unsupported(format!("{c} -> {d} is not between probabilistic nodes")));
    };
    if !nn.nodes[di].parents.contains(&ci) {
        return Err(OracleError::Unsupported(format!("no arc {c} -> {d}")));
    }
    let name_of = |i: usize| nn.nodes[i].name.as_str();
    let mut union: Vec<usize> =
        nn.nodes[ci].parents.iter().chain(&nn.nodes[di].parents).copied().filter(|&p| p != ci).collect();
    union.sort_by(|&a, &b| name_of(a).cmp(name_of(b)));
    union.dedup();
    let mut c_parents = union.clone();
    c_parents.push(di);
    c_parents.sort_by(|&a, &b| name_of(a).cmp(name_of(b)));

    let card = |i: usize| nn.nodes[i].card();
    let (kc, kd) = (card(ci), card(di));
    let union_sizes: Vec<usize> = union.iter().map(|&p| card(p)).collect();
    let c_sizes = nn.parent_sizes(ci);
    let d_sizes = nn.parent_sizes(di);
    let c_parent_sizes: Vec<usize> = c_parents.iter().map(|&p| card(p)).collect();

    let mut new_d = vec![Vec::new(); union_sizes.iter().product()];
    let mut new_c = vec![Vec::new(); c_parent_sizes.iter().product()];
    for u in assignments(&union_sizes) {
        let value = |node: usize, cv: usize, dv: usize| -> usize {
            if node == ci {
                cv
            } else if node == di {
                dv
            } else {
                u[union.iter().position(|&x| x == node).expect("parent in union")]
            }
        };
        let c_row = row_index(&c_sizes, nn.nodes[ci].parents.iter().map(|&p| value(p, 0, 0)));
        let prior = &c_rows[c_row];
        // joint over (c, d) given u
        let mut pcd = vec![vec![0.0; kd]; kc];
        for cv in 0..kc {
            let d_row = row_index(&d_sizes, nn.nodes[di].parents.iter().map(|&p| value(p, cv, 0)));
            for dv in 0..kd {
                pcd[cv][dv] = prior[cv] * d_rows[d_row][dv];
            }
        }
        let pd: Vec<f64> = (0..kd).map(|dv| (0..kc).map(|cv| pcd[cv][dv]).sum()).collect();
        new_d[row_index(&union_sizes, u.iter().copied())] = pd.clone();
        for dv in 0..kd {
            let row = row_index(&c_parent_sizes, c_parents.iter().map(|&p| value(p, 0, dv)));
            new_c[row] = if pd[dv] > 0.0 { (0..kc).map(|cv| pcd[cv][dv] / pd[dv]).collect() } else { prior.clone() };
        }
    }
    let mut nodes: Vec<NumericNode> = nn.nodes.clone();
    nodes[di].parents = union;
    nodes[di].table = Table::Cpt(new_d);
    nodes[ci].parents = c_parents;
    nodes[ci].table = Table::Cpt(new_c);
    Ok(NumericNet::reorder(nodes))
}

/// Edges of `qpn` whose sign the tables of `nn` fail to respect. Parent
/// rows of zero probability under the joint are not judged.
pub fn local_sign_violations(nn: &NumericNet, qpn: &Qpn, tol: f64) -> Vec<String> {
    let joint = enumerate(nn);
    let mut out = Vec::new();
    for (i, node) in nn.nodes.iter().enumerate() {
        let sizes = nn.parent_sizes(i);
        let mut row_mass = vec![0.0; sizes.iter().product()];
        for (s, p) in &joint.states {
            row_mass[nn.row_of(i, s)] += p;
        }
        for (axis, &p) in node.parents.iter().enumerate() {
            let parent = &nn.nodes[p].name;
            let Some(e) = qpn.edge(parent, &node.name) else { continue };
            if e.sign == Sign::Ambig {
                continue;
            }
            let mut bad = false;
            for base in assignments(&sizes).into_iter().filter(|a| a[axis] == 0) {
                let rows: Vec<usize> = (0..sizes[axis])
                    .map(|v| {
                        let mut a = base.clone();
                        a[axis] = v;
                        row_index(&sizes, a)
                    })
                    .filter(|&r| row_mass[r] > 0.0)
                    .collect();
                for (j, &lo) in rows.iter().enumerate() {
                    for &hi in &rows[j + 1..] {
                        let (s_lo, s_hi) = (survival(&nn.distribution(i, lo)), survival(&nn.distribution(i, hi)));
                        for t in 0..s_lo.len() {
                            let diff = s_hi[t] - s_lo[t];
                            let strict_fail = e.strict && e.sign != Sign::Zero && diff.abs() <= 0.0;
                            if !within(e.sign, diff, tol) || strict_fail {
                                bad = true;
                            }
                        }
                    }
                }
            }
            if bad {
                out.push(format!("{parent} -> {} ({}{})", node.name, e.sign, if e.strict { ", strict" } else { "" }));
            }
        }
    }
    out
}
