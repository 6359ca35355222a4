//! Randomised checks of the engine's structural and semantic invariants.

use std::collections::BTreeSet;

use qpn_core::oracle::{
    dependence, random_influence_query, random_qpn, sample_numeric_net, soundness_report, OracleConfig, OracleError,
    OracleQuery, RandomNetConfig,
};
use qpn_core::transforms::{apply, propagate_deterministic, propagate_deterministic_into};
use qpn_core::{
    load_network, qualitative_influence, serialize, validate, D_separated, InfluenceQuery, Qpn, SeparationQuery, Sign,
    SynergyQuery,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn annotated() -> RandomNetConfig {
    RandomNetConfig { synergy: 0.3, curvature: 0.3, multivalued: 0.3, ..RandomNetConfig::default() }
}

fn queries(rng: &mut ChaCha8Rng, net: &Qpn, n: usize) -> Vec<InfluenceQuery> {
    (0..n).map(|_| random_influence_query(rng, net)).collect()
}

#[test]
fn influence_answers_are_sound_on_wide_domains() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let cfg = OracleConfig::default().with_trials(10);
    let (mut definite, mut skipped) = (0, 0);
    for i in 0..300 {
        let net = random_qpn(&mut rng, &annotated());
        for q in queries(&mut rng, &net, 2) {
            match soundness_report(&net, &OracleQuery::Influence(q), &cfg.clone().with_seed(i)) {
                Ok(v) if v.engine_sign != Sign::Ambig => {
                    definite += 1;
                    assert!(v.is_sound(), "{}{v}", serialize(&net));
                }
                Ok(_) => {}
                Err(OracleError::ConstraintConflict { .. }) => skipped += 1,
                Err(e) => panic!("{e}"),
            }
        }
    }
    assert!(definite > 200, "only {definite} definite answers ({skipped} skipped)");
}

#[test]
fn synergy_answers_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let shape = RandomNetConfig { synergy: 0.6, curvature: 0.6, ..RandomNetConfig::default() };
    let cfg = OracleConfig::default().with_trials(10);
    let mut definite = 0;
    for i in 0..300 {
        let net = random_qpn(&mut rng, &shape);
        let children: Vec<&str> = net.node_names().filter(|n| net.parents(n).len() >= 2).collect();
        let Some(child) = children.choose(&mut rng) else { continue };
        let parents = net.parents(child);
        let q = SynergyQuery::new(parents[0], parents[1], child, Vec::<String>::new());
        match soundness_report(&net, &OracleQuery::Synergy(q), &cfg.clone().with_seed(i)) {
            Ok(v) if v.engine_sign != Sign::Ambig => {
                definite += 1;
                assert!(v.is_sound(), "{}{v}", serialize(&net));
            }
            Ok(_) | Err(OracleError::ConstraintConflict { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(definite > 20, "only {definite} definite synergy answers");
}

#[test]
fn separated_pairs_answer_zero_and_are_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let cfg = OracleConfig::default();
    let mut separated = 0;
    for trial in 0..300 {
        let net = random_qpn(&mut rng, &RandomNetConfig::default());
        for q in queries(&mut rng, &net, 3) {
            let sq = SeparationQuery::new(&q.source, &q.target, q.given.iter());
            if !D_separated(&net, &sq).unwrap() {
                continue;
            }
            separated += 1;
            assert_eq!(qualitative_influence(&net, &q).unwrap().sign, Sign::Zero);
            let nn = sample_numeric_net(&net, &cfg, trial).unwrap();
            let given: Vec<&str> = q.given.iter().map(String::as_str).collect();
            let dep = dependence(&nn, &q.source, &q.target, &given).unwrap();
            assert!(dep < 1e-9, "{}{q:?}: dependence {dep:e}", serialize(&net));
        }
    }
    assert!(separated > 50);
}

#[test]
fn traces_replay_and_every_step_is_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..300 {
        let net = random_qpn(&mut rng, &annotated());
        for q in queries(&mut rng, &net, 2) {
            let r = qualitative_influence(&net, &q).unwrap();
            let mut cur = net.clone();
            for step in &r.trace.steps {
                cur = apply(&cur, &step.op, step.synergy_mode).unwrap().0;
                assert!(validate(&cur).is_empty(), "{} after {}", serialize(&net), step.op);
            }
            let replayed = r.trace.replay(&net).unwrap();
            assert_eq!(serialize(&replayed), serialize(&r.final_net));
            assert_eq!(serialize(&cur), serialize(&r.final_net));
        }
    }
}

#[test]
fn annotations_do_not_change_influence_answers() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..300 {
        let net = random_qpn(&mut rng, &annotated());
        let bare = net.without_annotations();
        for q in queries(&mut rng, &net, 3) {
            let a = qualitative_influence(&net, &q).unwrap().sign;
            let b = qualitative_influence(&bare, &q).unwrap().sign;
            assert_eq!(a, b, "{}{q:?}", serialize(&net));
        }
    }
}

#[test]
fn propagation_order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let shape = RandomNetConfig { deterministic: 0.6, ..RandomNetConfig::default() };
    let mut checked = 0;
    for _ in 0..300 {
        let net = random_qpn(&mut rng, &shape);
        for c in net.node_names().filter(|n| net.is_deterministic(n) && net.children(n).len() >= 2) {
            let (all_at_once, _) = propagate_deterministic(&net, c).unwrap();
            let mut order: Vec<&str> = net.children(c);
            for _ in 0..3 {
                order.shuffle(&mut rng);
                let mut cur = net.clone();
                for d in &order {
                    cur = propagate_deterministic_into(&cur, c, d).unwrap().0;
                }
                assert_eq!(serialize(&cur), serialize(&all_at_once), "{} order {order:?}", serialize(&net));
            }
            checked += 1;
        }
    }
    assert!(checked > 20);
}

#[test]
fn canonical_text_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..300 {
        let net = random_qpn(&mut rng, &annotated());
        let text = serialize(&net);
        let back = load_network(&text).unwrap();
        assert_eq!(serialize(&back), text);
        assert_eq!(back, net);
    }
}

#[test]
fn determined_source_answers_zero() {
    // b is a strict monotone image of a alone, so observing b fixes a
    let net = load_network("node a prob\nnode b det\nnode c prob\nedge a b +\nedge a c +\n").unwrap();
    let r = qualitative_influence(&net, &InfluenceQuery::new("a", "c", ["b"])).unwrap();
    assert_eq!(r.sign, Sign::Zero);
    assert!(r.separated);
}

#[test]
fn wide_children_block_symmetric_reversal() {
    let text = "node a prob\nnode b prob multi\nedge a b +\n";
    let net = load_network(text).unwrap();
    assert_eq!(
        qualitative_influence(&net, &InfluenceQuery::new("b", "a", BTreeSet::<String>::new())).unwrap().sign,
        Sign::Ambig
    );
    let narrow = load_network("node a prob\nnode b prob\nedge a b +\n").unwrap();
    assert_eq!(
        qualitative_influence(&narrow, &InfluenceQuery::new("b", "a", BTreeSet::<String>::new())).unwrap().sign,
        Sign::Plus
    );
}
