use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{OracleConfig, OracleError};
use crate::network::Qpn;
use crate::sign::Sign;

/// Conditional model of one node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Table {
    /// One distribution over the node's values per parent assignment.
    Cpt(Vec<Vec<f64>>),
    /// Value index per parent assignment.
    Function(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericNode {
    pub name: String,
    /// Indices into [`NumericNet::nodes`], sorted by name.
    pub parents: Vec<usize>,
    /// Cardinal value of each state, increasing, scaled to `[0, 1]`.
    pub values: Vec<f64>,
    pub table: Table,
}

impl NumericNode {
    pub fn card(&self) -> usize {
        self.values.len()
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.table, Table::Function(_))
    }
}

/// A discrete network with concrete tables, nodes in topological order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericNet {
    pub nodes: Vec<NumericNode>,
}

/// Mixed-radix position of `assignment` over domains `sizes`, first
/// coordinate most significant.
pub(crate) fn row_index(sizes: &[usize], assignment: impl IntoIterator<Item = usize>) -> usize {
    sizes.iter().zip(assignment).fold(0, |acc, (size, v)| acc * size + v)
}

/// Every assignment over domains `sizes`, in [`row_index`] order.
pub(crate) fn assignments(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &size in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..size).map(move |v| {
                    let mut a = prefix.clone();
                    a.push(v);
                    a
                })
            })
            .collect();
    }
    out
}

impl NumericNet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn node(&self, name: &str) -> Option<&NumericNode> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub(crate) fn parent_sizes(&self, i: usize) -> Vec<usize> {
        self.nodes[i].parents.iter().map(|&p| self.nodes[p].card()).collect()
    }

    /// Row of node `i`'s table for a full state vector.
    pub(crate) fn row_of(&self, i: usize, state: &[usize]) -> usize {
        let node = &self.nodes[i];
        row_index(&self.parent_sizes(i), node.parents.iter().map(|&p| state[p]))
    }

    /// Distribution of node `i` for one table row.
    pub fn distribution(&self, i: usize, row: usize) -> Vec<f64> {
        let node = &self.nodes[i];
        match &node.table {
            Table::Cpt(rows) => rows[row].clone(),
            Table::Function(f) => {
                let mut d = vec![0.0; node.card()];
                d[f[row]] = 1.0;
                d
            }
        }
    }

    /// Reorders nodes topologically (ties by name) after parent lists have
    /// been edited, remapping parent indices.
    pub(crate) fn reorder(nodes: Vec<NumericNode>) -> NumericNet {
        let n = nodes.len();
        let mut placed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let next = (0..n)
                .filter(|&i| !placed[i] && nodes[i].parents.iter().all(|&p| placed[p]))
                .min_by(|&a, &b| nodes[a].name.cmp(&nodes[b].name))
                .expect("parent lists are acyclic");
            placed[next] = true;
            order.push(next);
        }
        let mut new_index = vec![0; n];
        for (pos, &old) in order.iter().enumerate() {
            new_index[old] = pos;
        }
        let mut out: Vec<NumericNode> = order.iter().map(|&i| nodes[i].clone()).collect();
        for node in &mut out {
            for p in &mut node.parents {
                *p = new_index[*p];
            }
        }
        NumericNet { nodes: out }
    }
}

/// Survival function `P(X >= t)` for `t = 1..k`.
pub(crate) fn survival(dist: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; dist.len().saturating_sub(1)];
    let mut acc = 0.0;
    for t in (1..dist.len()).rev() {
        acc += dist[t];
        out[t - 1] = acc;
    }
    out
}

fn from_survival(s: &[f64]) -> Vec<f64> {
    let k = s.len() + 1;
    let mut d = vec![0.0; k];
    for t in 0..k {
        let upper = if t == 0 { 1.0 } else { s[t - 1] };
        let lower = if t + 1 < k { s[t] } else { 0.0 };
        d[t] = (upper - lower).max(0.0);
    }
    let total: f64 = d.iter().sum();
    d.iter().map(|p| p / total).collect()
}

/// Per-parent view used while sampling one node.
struct ParentAxis {
    name: String,
    size: usize,
    /// Coordinate of each parent state: cardinal value for deterministic
    /// children, rank for probabilistic ones.
    coords: Vec<f64>,
    sign: Sign,
    strict: bool,
}

fn signed_uniform(rng: &mut impl Rng, s: Sign, lo: f64, hi: f64) -> f64 {
    match s {
        Sign::Plus => rng.gen_range(lo..hi),
        Sign::Minus => -rng.gen_range(lo..hi),
        Sign::Zero => 0.0,
        Sign::Ambig => rng.gen_range(-hi..hi),
    }
}

/// Quadratic score `Σ α_i z_i + β_i z_i² + Σ γ_ij z_i z_j` whose partial
/// derivative in each signed axis keeps that sign on the unit cube.
struct Score {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<Vec<f64>>,
}

impl Score {
    fn sample(
        rng: &mut impl Rng,
        axes: &[ParentAxis],
        curvature: &[Sign],
        synergy: &dyn Fn(usize, usize) -> Sign,
        margin: f64,
    ) -> Score {
        let n = axes.len();
        let beta: Vec<f64> = curvature.iter().map(|&k| signed_uniform(rng, k, 0.1, 1.0)).collect();
        let mut gamma = vec![vec![0.0; n]; n];
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in i + 1..n {
                let g = signed_uniform(rng, synergy(i, j), 0.1, 1.0);
                gamma[i][j] = g;
                gamma[j][i] = g;
            }
        }
        let alpha = (0..n)
            .map(|i| {
                let s = match axes[i].sign {
                    Sign::Plus => 1.0,
                    Sign::Minus => -1.0,
                    _ => return rng.gen_range(-2.0..2.0),
                };
                let worst_quadratic = (-2.0 * s * beta[i]).max(0.0);
                let worst_cross: f64 = (0..n).filter(|&j| j != i).map(|j| (-s * gamma[i][j]).max(0.0)).sum();
                s * (margin + worst_quadratic + worst_cross + rng.gen_range(0.0..1.0))
            })
            .collect();
        Score { alpha, beta, gamma }
    }

    fn eval(&self, z: &[f64]) -> f64 {
        let mut v = 0.0;
        for i in 0..z.len() {
            v += self.alpha[i] * z[i] + self.beta[i] * z[i] * z[i];
            for j in i + 1..z.len() {
                v += self.gamma[i][j] * z[i] * z[j];
            }
        }
        v
    }
}

/// Scales `v` to `[0, 1]`; a constant vector maps to zeros.
fn normalize(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-12 {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| (x - lo) / (hi - lo)).collect()
}

fn coords(node: &NumericNode, cardinal: bool) -> Vec<f64> {
    let k = node.card();
    if cardinal {
        node.values.clone()
    } else if k == 1 {
        vec![0.0]
    } else {
        (0..k).map(|v| v as f64 / (k - 1) as f64).collect()
    }
}

/// Domain size of each probabilistic node.
pub(crate) fn cardinality(net: &Qpn, cfg: &OracleConfig, name: &str) -> usize {
    if let Some(&k) = cfg.cardinalities.get(name) {
        return k;
    }
    // annotated nodes are multi-valued in the network model
    if net.is_multivalued(name) {
        cfg.synergy_cardinality
    } else {
        cfg.default_cardinality
    }
}

fn check_size(net: &Qpn, cfg: &OracleConfig) -> Result<(), OracleError> {
    if net.node_count() > super::MAX_NODES {
        return Err(OracleError::TooLarge(format!(
            "{} nodes, at most {} are enumerated",
            net.node_count(),
            super::MAX_NODES
        )));
    }
    let mut space: u64 = 1;
    for (name, kind) in net.nodes() {
        if !kind.is_deterministic() {
            let k = cardinality(net, cfg, name);
            if k > 2 && !net.is_multivalued(name) {
                return Err(OracleError::InvalidConfig(format!(
                    "`{name}` would get {k} values but the network treats it as two-valued; declare it `node {name} prob multi`"
                )));
            }
            space = space.saturating_mul(k as u64);
        }
    }
    if space > super::MAX_ASSIGNMENTS {
        return Err(OracleError::TooLarge(format!(
            "{space} joint assignments, at most {} are enumerated",
            super::MAX_ASSIGNMENTS
        )));
    }
    Ok(())
}

fn sample_deterministic(rng: &mut impl Rng, net: &Qpn, name: &str, axes: &[ParentAxis]) -> (Vec<f64>, Vec<usize>) {
    if axes.is_empty() {
        return (vec![0.0], vec![0]);
    }
    let curvature: Vec<Sign> = axes.iter().map(|a| net.curvature(&a.name, name)).collect();
    let synergy = |i: usize, j: usize| net.synergy(&axes[i].name, &axes[j].name, name);
    let score = Score::sample(rng, axes, &curvature, &synergy, 0.2);
    let sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
    let raw: Vec<f64> = assignments(&sizes)
        .iter()
        .map(|a| {
            let z: Vec<f64> = a.iter().zip(axes).map(|(&v, ax)| ax.coords[v]).collect();
            score.eval(&z)
        })
        .collect();
    let mut distinct = raw.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    let table = raw
        .iter()
        .map(|x| distinct.iter().position(|d| (d - x).abs() <= 1e-9).expect("deduplicated from raw"))
        .collect();
    (normalize(&distinct), table)
}

fn random_distribution(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    // larger powers push mass towards single states
    let power = rng.gen_range(1.0..4.0);
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0f64..1.0).powf(power) + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// Sorts `s[row][t]` along every signed axis until nothing moves.
fn sort_survival(s: &mut [Vec<f64>], sizes: &[usize], axes: &[ParentAxis]) {
    let rows = assignments(sizes);
    for _ in 0..32 {
        let mut moved = false;
        for (i, ax) in axes.iter().enumerate() {
            let ascending = match ax.sign {
                Sign::Plus => true,
                Sign::Minus => false,
                _ => continue,
            };
            for base in rows.iter().filter(|a| a[i] == 0) {
                let line: Vec<usize> = (0..ax.size)
                    .map(|v| {
                        let mut a = base.clone();
                        a[i] = v;
                        row_index(sizes, a)
                    })
                    .collect();
                for t in 0..s[0].len() {
                    let mut vals: Vec<f64> = line.iter().map(|&r| s[r][t]).collect();
                    let before = vals.clone();
                    vals.sort_by(f64::total_cmp);
                    if !ascending {
                        vals.reverse();
                    }
                    if vals != before {
                        moved = true;
                        for (&r, v) in line.iter().zip(vals) {
                            s[r][t] = v;
                        }
                    }
                }
            }
        }
        if !moved {
            break;
        }
    }
}

fn sample_probabilistic(rng: &mut impl Rng, net: &Qpn, name: &str, k: usize, axes: &[ParentAxis]) -> Vec<Vec<f64>> {
    if axes.is_empty() {
        return vec![random_distribution(rng, k)];
    }
    let sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
    let rows = assignments(&sizes);

    let mut base: Vec<Vec<f64>> = rows.iter().map(|_| survival(&random_distribution(rng, k))).collect();
    sort_survival(&mut base, &sizes, axes);

    let curvature: Vec<Sign> = axes.iter().map(|_| Sign::Ambig).collect();
    let synergy = |i: usize, j: usize| net.synergy(&axes[i].name, &axes[j].name, name);
    let score = Score::sample(rng, axes, &curvature, &synergy, 0.5);
    let h = normalize(
        &rows
            .iter()
            .map(|a| {
                let z: Vec<f64> = a.iter().zip(axes).map(|(&v, ax)| ax.coords[v]).collect();
                score.eval(&z)
            })
            .collect::<Vec<_>>(),
    );
    // strict edges need a visible gap between the template's end points;
    // otherwise the relation may be arbitrarily weak
    let strict = axes.iter().any(|a| a.strict && matches!(a.sign, Sign::Plus | Sign::Minus));
    let mut high: Vec<f64> = (1..k).map(|_| rng.gen_range(0.5..1.0)).collect();
    high.sort_by(|a, b| b.total_cmp(a));
    let shrink = if strict { rng.gen_range(0.0..0.5) } else { rng.gen_range(0.0..1.0) };
    let low: Vec<f64> = high.iter().map(|s| s * shrink).collect();

    let has_synergy = net.synergies().any(|(key, s)| key.child == name && s != Sign::Ambig);
    let eta = if has_synergy {
        1.0
    } else if strict {
        rng.gen_range(0.5..1.0)
    } else {
        rng.gen_range(0.0..1.0)
    };
    rows.iter()
        .enumerate()
        .map(|(r, _)| {
            let s: Vec<f64> =
                (0..k - 1).map(|t| (1.0 - eta) * base[r][t] + eta * (low[t] + h[r] * (high[t] - low[t]))).collect();
            from_survival(&s)
        })
        .collect()
}

fn sample_once(net: &Qpn, cfg: &OracleConfig, rng: &mut ChaCha8Rng) -> NumericNet {
    let order: Vec<&str> = net.topological_order().expect("validated network");
    let mut nodes: Vec<NumericNode> = Vec::with_capacity(order.len());
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for &name in &order {
        let deterministic = net.is_deterministic(name);
        let parent_names = net.parents(name);
        let axes: Vec<ParentAxis> = parent_names
            .iter()
            .map(|&p| {
                let node = &nodes[index[p]];
                let e = net.edge(p, name).expect("parent edge");
                ParentAxis {
                    name: p.to_string(),
                    size: node.card(),
                    coords: coords(node, deterministic),
                    sign: e.sign,
                    strict: e.strict,
                }
            })
            .collect();
        let (values, table) = if deterministic {
            let (values, f) = sample_deterministic(rng, net, name, &axes);
            (values, Table::Function(f))
        } else {
            let k = cardinality(net, cfg, name);
            let values = if k == 1 { vec![0.0] } else { (0..k).map(|v| v as f64 / (k - 1) as f64).collect() };
            (values, Table::Cpt(sample_probabilistic(rng, net, name, k, &axes)))
        };
        index.insert(name, nodes.len());
        nodes.push(NumericNode {
            name: name.to_string(),
            parents: parent_names.iter().map(|p| index[p]).collect(),
            values,
            table,
        });
    }
    NumericNet { nodes }
}

/// Deterministic random source for one trial.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws a numeric network satisfying every sign, strictness, synergy and
/// curvature annotation of `net`. The result is audited before it is
/// returned; a sample that fails the audit is redrawn a bounded number of
/// times.
pub fn sample_numeric_net(net: &Qpn, cfg: &OracleConfig, trial: u64) -> Result<NumericNet, OracleError> {
    cfg.check()?;
    let violations = crate::network::validate(net);
    if !violations.is_empty() {
        return Err(OracleError::InvalidNetwork(violations.iter().map(|v| v.to_string()).collect()));
    }
    check_size(net, cfg)?;
    let mut rng = trial_rng(cfg.seed, trial);
    let mut last = None;
    for _ in 0..cfg.max_attempts {
        let nn = sample_once(net, cfg, &mut rng);
        match audit(net, &nn, cfg).into_iter().next() {
            None => return Ok(nn),
            Some(problem) => last = Some(problem),
        }
    }
    let (node, detail) = last.expect("at least one attempt");
    Err(OracleError::ConstraintConflict { node, detail })
}

/// Rows of `i` that differ from `row` only in parent position `axis`,
/// indexed by that parent's value.
fn axis_lines(sizes: &[usize], axis: usize) -> Vec<Vec<usize>> {
    assignments(sizes)
        .into_iter()
        .filter(|a| a[axis] == 0)
        .map(|base| {
            (0..sizes[axis])
                .map(|v| {
                    let mut a = base.clone();
                    a[axis] = v;
                    row_index(sizes, a)
                })
                .collect()
        })
        .collect()
}

/// Checks the sampled tables against `net`'s annotations. Returns the
/// offending node and a description for every failed condition.
pub fn audit(net: &Qpn, nn: &NumericNet, cfg: &OracleConfig) -> Vec<(String, String)> {
    let mut problems = Vec::new();
    for (i, node) in nn.nodes.iter().enumerate() {
        let name = node.name.as_str();
        let sizes = nn.parent_sizes(i);
        let rows = sizes.iter().product::<usize>();
        let dists: Vec<Vec<f64>> = (0..rows).map(|r| nn.distribution(i, r)).collect();
        for (r, d) in dists.iter().enumerate() {
            let total: f64 = d.iter().sum();
            if (total - 1.0).abs() > 1e-9 || d.iter().any(|p| *p < 0.0) {
                problems.push((name.to_string(), format!("row {r} is not a distribution")));
            }
        }
        let surv: Vec<Vec<f64>> = dists.iter().map(|d| survival(d)).collect();
        let parent_names: Vec<&str> = node.parents.iter().map(|&p| nn.nodes[p].name.as_str()).collect();
        for (axis, &p) in parent_names.iter().enumerate() {
            let Some(e) = net.edge(p, name) else {
                problems.push((name.to_string(), format!("unexpected parent {p}")));
                continue;
            };
            let s = match e.sign {
                Sign::Plus => 1.0,
                Sign::Minus => -1.0,
                _ => continue,
            };
            let need = if !e.strict {
                -1e-12
            } else if node.is_deterministic() {
                1e-12
            } else {
                cfg.epsilon - 1e-12
            };
            for line in axis_lines(&sizes, axis) {
                for w in line.windows(2) {
                    let ok = match &node.table {
                        Table::Function(f) => {
                            let diff = s * (node.values[f[w[1]]] - node.values[f[w[0]]]);
                            diff >= need
                        }
                        Table::Cpt(_) => (0..surv[0].len()).all(|t| s * (surv[w[1]][t] - surv[w[0]][t]) >= need),
                    };
                    if !ok {
                        problems.push((name.to_string(), format!("{p} -> {name} violates its {} sign", e.sign)));
                    }
                }
            }
        }
        if let Table::Function(f) = &node.table {
            for (axis, &p) in parent_names.iter().enumerate() {
                let k = net.curvature(p, name);
                if k == Sign::Ambig {
                    continue;
                }
                let z = &nn.nodes[node.parents[axis]].values;
                for line in axis_lines(&sizes, axis) {
                    for w in line.windows(3).zip(z.windows(3)) {
                        let (r, zz) = w;
                        let v = |j: usize| node.values[f[r[j]]];
                        let s1 = (v(1) - v(0)) / (zz[1] - zz[0]);
                        let s2 = (v(2) - v(1)) / (zz[2] - zz[1]);
                        if !within(k, s2 - s1, 1e-9) {
                            problems.push((name.to_string(), format!("curvature in {p} is not {k}")));
                        }
                    }
                }
            }
        }
        // synergies: mixed differences of the survival functions on
        // neighbouring grid cells
        for (a, &pa) in parent_names.iter().enumerate() {
            for (b, &pb) in parent_names.iter().enumerate().skip(a + 1) {
                let s = net.synergy(pa, pb, name);
                if s == Sign::Ambig {
                    continue;
                }
                for base in assignments(&sizes).into_iter().filter(|x| x[a] + 1 < sizes[a] && x[b] + 1 < sizes[b]) {
                    let at = |da: usize, db: usize| {
                        let mut x = base.clone();
                        x[a] += da;
                        x[b] += db;
                        row_index(&sizes, x)
                    };
                    let (r11, r00, r10, r01) = (at(1, 1), at(0, 0), at(1, 0), at(0, 1));
                    let mixed: Vec<f64> = match &node.table {
                        Table::Function(f) => {
                            let v = |r: usize| node.values[f[r]];
                            vec![v(r11) + v(r00) - v(r10) - v(r01)]
                        }
                        Table::Cpt(_) => (0..surv[0].len())
                            .map(|t| surv[r11][t] + surv[r00][t] - surv[r10][t] - surv[r01][t])
                            .collect(),
                    };
                    if mixed.iter().any(|m| !within(s, *m, 1e-9)) {
                        problems.push((name.to_string(), format!("synergy of {pa}, {pb} is not {s}")));
                    }
                }
            }
        }
    }
    problems
}

/// Does `x` have sign `s` up to `tol`?
pub(crate) fn within(s: Sign, x: f64, tol: f64) -> bool {
    match s {
        Sign::Plus => x >= -tol,
        Sign::Minus => x <= tol,
        Sign::Zero => x.abs() <= tol,
        Sign::Ambig => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NodeKind;
    use Sign::*;

    #[test]
    fn radix() {
        assert_eq!(assignments(&[2, 3]).len(), 6);
        assert_eq!(row_index(&[2, 3], [1, 2]), 5);
        assert_eq!(assignments(&[]), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn survival_round_trip() {
        let d = vec![0.2, 0.5, 0.3];
        let s = survival(&d);
        assert_eq!(s.len(), 2);
        assert!((s[0] - 0.8).abs() < 1e-12 && (s[1] - 0.3).abs() < 1e-12);
        let back = from_survival(&s);
        assert!(back.iter().zip(&d).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn single_node_is_bernoulli() {
        let net = Qpn::builder().prob("a").build().unwrap();
        let nn = sample_numeric_net(&net, &OracleConfig::default(), 0).unwrap();
        let Table::Cpt(rows) = &nn.nodes[0].table else { panic!() };
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].len(), 2);
        assert!((rows[0].iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn strict_binary_edge_has_margin() {
        let net = Qpn::builder().prob("a").prob("c").edge_with("a", "c", Plus, Some(true)).build().unwrap();
        let cfg = OracleConfig::default();
        for trial in 0..50 {
            let nn = sample_numeric_net(&net, &cfg, trial).unwrap();
            let c = nn.index_of("c").unwrap();
            let Table::Cpt(rows) = &nn.nodes[c].table else { panic!() };
            assert!(rows[1][1] >= rows[0][1] + cfg.epsilon - 1e-12);
        }
    }

    #[test]
    fn wide_cardinality_needs_declaration() {
        let net = Qpn::builder().prob("a").prob("b").edge("a", "b", Plus).build().unwrap();
        let mut cfg = OracleConfig::default();
        cfg.cardinalities.insert("a".into(), 3);
        assert!(matches!(sample_numeric_net(&net, &cfg, 0), Err(OracleError::InvalidConfig(_))));
        let wide = Qpn::builder().prob("a").prob("b").multivalued("a").edge("a", "b", Plus).build().unwrap();
        let nn = sample_numeric_net(&wide, &OracleConfig::default(), 0).unwrap();
        assert_eq!(nn.node("a").unwrap().card(), 3);
    }

    #[test]
    fn deterministic_grid_is_monotone() {
        let net = Qpn::builder()
            .prob("a")
            .prob("b")
            .det("c")
            .multivalued("a")
            .multivalued("b")
            .edge("a", "c", Plus)
            .edge_with("b", "c", Plus, Some(false))
            .build()
            .unwrap();
        let mut cfg = OracleConfig::default();
        cfg.cardinalities.insert("a".into(), 3);
        cfg.cardinalities.insert("b".into(), 3);
        for trial in 0..20 {
            let nn = sample_numeric_net(&net, &cfg, trial).unwrap();
            let c = nn.node("c").unwrap();
            let Table::Function(f) = &c.table else { panic!() };
            for a in 0..3 {
                for b in 0..3 {
                    let v = |a: usize, b: usize| c.values[f[row_index(&[3, 3], [a, b])]];
                    if a + 1 < 3 {
                        assert!(v(a + 1, b) > v(a, b));
                    }
                    if b + 1 < 3 {
                        assert!(v(a, b + 1) >= v(a, b));
                    }
                }
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let net = Qpn::builder()
            .prob("a")
            .node("c", NodeKind::Deterministic)
            .prob("d")
            .edge("a", "c", Minus)
            .edge("c", "d", Ambig)
            .build()
            .unwrap();
        let cfg = OracleConfig::default();
        assert_eq!(sample_numeric_net(&net, &cfg, 3).unwrap(), sample_numeric_net(&net, &cfg, 3).unwrap());
        assert_ne!(sample_numeric_net(&net, &cfg, 3).unwrap(), sample_numeric_net(&net, &cfg, 4).unwrap());
    }
}
