use rand::seq::SliceRandom;
use rand::Rng;

use crate::network::{NodeKind, Qpn};
use crate::query::InfluenceQuery;
use crate::sign::Sign;

/// Shape of randomly generated networks.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomNetConfig {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub max_edges: usize,
    pub deterministic: f64,
    /// Chance that an edge is `?`.
    pub ambiguous: f64,
    /// Chance that an edge departs from its child's default strictness.
    pub flip_strictness: f64,
    /// Chance that a parent pair carries an explicit synergy.
    pub synergy: f64,
    /// Chance that a deterministic edge carries a curvature.
    pub curvature: f64,
    /// Chance that a probabilistic node is declared multi-valued.
    pub multivalued: f64,
}

impl Default for RandomNetConfig {
    fn default() -> Self {
        RandomNetConfig {
            min_nodes: 3,
            max_nodes: 6,
            max_edges: 8,
            deterministic: 0.4,
            ambiguous: 0.1,
            flip_strictness: 0.2,
            synergy: 0.0,
            curvature: 0.0,
            multivalued: 0.0,
        }
    }
}

fn random_sign(rng: &mut impl Rng, ambiguous: f64) -> Sign {
    if rng.gen_bool(ambiguous) {
        Sign::Ambig
    } else if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// A random acyclic network with nodes `n0, n1, ...`.
pub fn random_qpn(rng: &mut impl Rng, cfg: &RandomNetConfig) -> Qpn {
    let n = rng.gen_range(cfg.min_nodes..=cfg.max_nodes);
    let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let kinds: Vec<NodeKind> = (0..n)
        .map(|_| if rng.gen_bool(cfg.deterministic) { NodeKind::Deterministic } else { NodeKind::Probabilistic })
        .collect();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs.shuffle(rng);
    let edge_count = rng.gen_range(1..=cfg.max_edges.min(pairs.len()));
    let mut builder = Qpn::builder();
    for i in 0..n {
        builder = builder.node(&names[i], kinds[i]);
        if !kinds[i].is_deterministic() && cfg.multivalued > 0.0 && rng.gen_bool(cfg.multivalued) {
            builder = builder.multivalued(&names[i]);
        }
    }
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in pairs.iter().take(edge_count) {
        let (p, c) = (order[i], order[j]);
        let sign = random_sign(rng, cfg.ambiguous);
        let default = kinds[c].default_strictness();
        let strict = if rng.gen_bool(cfg.flip_strictness) { !default } else { default };
        builder = builder.edge_with(&names[p], &names[c], sign, Some(strict));
        parents[c].push(p);
    }
    for c in 0..n {
        for (x, &a) in parents[c].iter().enumerate() {
            for &b in &parents[c][x + 1..] {
                if cfg.synergy > 0.0 && rng.gen_bool(cfg.synergy) {
                    builder = builder.synergy(&names[a], &names[b], &names[c], random_sign(rng, 0.2));
                }
            }
            if kinds[c].is_deterministic() && cfg.curvature > 0.0 && rng.gen_bool(cfg.curvature) {
                builder = builder.curvature(&names[a], &names[c], random_sign(rng, 0.2));
            }
        }
    }
    builder.build().expect("generated networks are valid")
}

/// A random query with up to two given nodes.
pub fn random_influence_query(rng: &mut impl Rng, net: &Qpn) -> InfluenceQuery {
    let mut names: Vec<&str> = net.node_names().collect();
    names.shuffle(rng);
    let given_count = rng.gen_range(0..=2.min(names.len() - 2));
    InfluenceQuery::new(names[0], names[1], names[2..2 + given_count].iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::validate;
    use crate::oracle::numeric::trial_rng;

    #[test]
    fn generated_networks_are_valid() {
        let mut rng = trial_rng(7, 0);
        let cfg = RandomNetConfig { synergy: 0.5, curvature: 0.5, multivalued: 0.5, ..RandomNetConfig::default() };
        for _ in 0..200 {
            let net = random_qpn(&mut rng, &cfg);
            assert!(validate(&net).is_empty());
            assert!(net.node_count() <= 6 && net.edge_count() <= 8);
            let q = random_influence_query(&mut rng, &net);
            assert_ne!(q.source, q.target);
            assert!(!q.given.contains(&q.source) && !q.given.contains(&q.target));
        }
    }
}
