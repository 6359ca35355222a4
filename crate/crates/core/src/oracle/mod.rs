//! Brute-force numeric ground truth. Concrete discrete networks are drawn
//! to satisfy a network's annotations, solved exactly by enumeration and
//! compared with the qualitative answers.

mod infer;
mod numeric;
mod random;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use infer::{
    dependence, enumerate, exact_influence_check, joint_distance, local_sign_violations, monotone_transforms,
    reverse_numeric, synergy_check, CheckReport, ContextViolation, Joint,
};
pub use numeric::{audit, sample_numeric_net, NumericNet, NumericNode, Table};
pub use random::{random_influence_query, random_qpn, RandomNetConfig};

use crate::error::QueryError;
use crate::network::Qpn;
use crate::query::{qualitative_influence, InfluenceQuery};
use crate::sign::Sign;
use crate::synergy::{qualitative_synergy, SynergyQuery};

pub const MAX_NODES: usize = 12;
pub const MAX_ASSIGNMENTS: u64 = 1 << 20;

/// Random monotone transforms tried per synergy check on a probabilistic
/// child, besides the identity.
pub const EXTRA_TRANSFORMS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("network too large for enumeration: {0}")]
    TooLarge(String),
    #[error("cannot satisfy the constraints on `{node}`: {detail}")]
    ConstraintConflict { node: String, detail: String },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("invalid network: {}", .0.join("; "))]
    InvalidNetwork(Vec<String>),
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Query(#[from] QueryError),
}

impl OracleError {
    pub fn hint(&self) -> &'static str {
        match self {
            OracleError::TooLarge(_) => "query a smaller sub-network or lower --card values",
            OracleError::ConstraintConflict { .. } => "check strict edges and curvature entries on that node",
            OracleError::UnknownNode(_) => "check the node name against the network file",
            OracleError::InvalidNetwork(_) => "run `validate` on the network first",
            OracleError::InvalidConfig(_) => {
                "cardinalities must be at least 2, trials at least 1, and nodes given more than two values must be declared `multi`"
            }
            OracleError::Unsupported(_) => "only arcs between probabilistic nodes can be reversed numerically",
            OracleError::Query(e) => e.hint(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Per-node domain sizes for probabilistic nodes.
    pub cardinalities: BTreeMap<String, usize>,
    pub default_cardinality: usize,
    /// Domain size of nodes named in a synergy or curvature entry.
    pub synergy_cardinality: usize,
    pub trials: usize,
    pub seed: u64,
    /// Margin on strict probabilistic edges.
    pub epsilon: f64,
    /// Equality tolerance of the checks.
    pub tolerance: f64,
    /// Redraws allowed when a sample fails its audit.
    pub max_attempts: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cardinalities: BTreeMap::new(),
            default_cardinality: 2,
            synergy_cardinality: 3,
            trials: 100,
            seed: 0,
            epsilon: 1e-3,
            tolerance: 1e-9,
            max_attempts: 20,
        }
    }
}

impl OracleConfig {
    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn check(&self) -> Result<(), OracleError> {
        if self.trials == 0 {
            return Err(OracleError::InvalidConfig("trials must be at least 1".into()));
        }
        let small = [self.default_cardinality, self.synergy_cardinality]
            .into_iter()
            .chain(self.cardinalities.values().copied())
            .any(|k| k < 2);
        if small {
            return Err(OracleError::InvalidConfig("cardinalities must be at least 2".into()));
        }
        if self.max_attempts == 0 {
            return Err(OracleError::InvalidConfig("max_attempts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OracleQuery {
    Influence(InfluenceQuery),
    Synergy(SynergyQuery),
}

/// Result of one sampled network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub trial: u64,
    pub consistent: bool,
    /// Smallest slack over all comparisons; absent when nothing was
    /// compared.
    pub worst_margin: Option<f64>,
    pub contexts_skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleViolation {
    pub seed: u64,
    pub trial: u64,
    pub assignment: Vec<(String, usize)>,
    pub observed: String,
}

/// For a `?` answer: how many samples would have supported each definite
/// sign.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub query: OracleQuery,
    pub engine_sign: Sign,
    pub trials_run: usize,
    pub records: Vec<TrialRecord>,
    pub violations: Vec<OracleViolation>,
    pub support: Option<Support>,
}

impl OracleVerdict {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty() && self.records.iter().all(|r| r.consistent)
    }
}

impl fmt::Display for OracleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.query {
            OracleQuery::Influence(q) => write!(f, "influence {} -> {}", q.source, q.target)?,
            OracleQuery::Synergy(q) => write!(f, "synergy of {}, {} on {}", q.pair.0, q.pair.1, q.child)?,
        }
        writeln!(f, ": engine says {}", self.engine_sign)?;
        if let Some(s) = &self.support {
            return writeln!(
                f,
                "vacuously sound; of {} samples, {} would support +, {} would support -, {} would support 0",
                self.trials_run, s.plus, s.minus, s.zero
            );
        }
        let bad = self.records.iter().filter(|r| !r.consistent).count();
        writeln!(f, "{} trials, {} inconsistent", self.trials_run, bad)?;
        for v in &self.violations {
            let ctx: Vec<String> = v.assignment.iter().map(|(n, x)| format!("{n}={x}")).collect();
            writeln!(f, "  trial {} (seed {}), given [{}]: {}", v.trial, v.seed, ctx.join(", "), v.observed)?;
        }
        Ok(())
    }
}

fn check_query(
    nn: &NumericNet,
    query: &OracleQuery,
    claimed: Sign,
    cfg: &OracleConfig,
    trial: u64,
) -> Result<CheckReport, OracleError> {
    let joint = enumerate(nn);
    match query {
        OracleQuery::Influence(q) => infer::influence_check_on(nn, &joint, q, claimed, cfg.tolerance),
        OracleQuery::Synergy(q) => {
            let child = nn.node(&q.child).ok_or_else(|| OracleError::UnknownNode(q.child.clone()))?;
            let extra = if child.is_deterministic() { 0 } else { EXTRA_TRANSFORMS };
            let mut rng = numeric::trial_rng(cfg.seed ^ 0x9e37_79b9_7f4a_7c15, trial);
            let transforms = monotone_transforms(&mut rng, &child.values, extra);
            infer::synergy_check_on(nn, &joint, q, claimed, &transforms, cfg.tolerance)
        }
    }
}

/// Engine answer for `query`.
pub fn engine_sign(net: &Qpn, query: &OracleQuery) -> Result<Sign, OracleError> {
    Ok(match query {
        OracleQuery::Influence(q) => qualitative_influence(net, q)?.sign,
        OracleQuery::Synergy(q) => qualitative_synergy(net, q)?,
    })
}

/// Runs the engine on `query` and checks a definite answer against
/// `cfg.trials` sampled networks. A `?` answer is reported with the number
/// of samples that would have supported each stronger sign.
pub fn soundness_report(net: &Qpn, query: &OracleQuery, cfg: &OracleConfig) -> Result<OracleVerdict, OracleError> {
    cfg.check()?;
    let sign = engine_sign(net, query)?;
    verify_claim(net, query, sign, cfg)
}

/// Checks an arbitrary claimed sign, as [`soundness_report`] does for the
/// engine's answer.
pub fn verify_claim(
    net: &Qpn,
    query: &OracleQuery,
    claimed: Sign,
    cfg: &OracleConfig,
) -> Result<OracleVerdict, OracleError> {
    cfg.check()?;
    let per_trial: Vec<Result<Vec<CheckReport>, OracleError>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let nn = sample_numeric_net(net, cfg, trial)?;
            if claimed == Sign::Ambig {
                [Sign::Plus, Sign::Minus, Sign::Zero]
                    .into_iter()
                    .map(|s| check_query(&nn, query, s, cfg, trial))
                    .collect()
            } else {
                Ok(vec![check_query(&nn, query, claimed, cfg, trial)?])
            }
        })
        .collect();
    let mut records = Vec::new();
    let mut violations = Vec::new();
    let mut support = (claimed == Sign::Ambig).then(Support::default);
    for (trial, reports) in per_trial.into_iter().enumerate() {
        let reports = reports?;
        let trial = trial as u64;
        if let Some(s) = support.as_mut() {
            s.plus += reports[0].consistent as usize;
            s.minus += reports[1].consistent as usize;
            s.zero += reports[2].consistent as usize;
            records.push(TrialRecord {
                seed: cfg.seed,
                trial,
                consistent: true,
                worst_margin: None,
                contexts_skipped: reports[0].contexts_skipped,
            });
            continue;
        }
        let r = &reports[0];
        records.push(TrialRecord {
            seed: cfg.seed,
            trial,
            consistent: r.consistent,
            worst_margin: r.worst_margin.is_finite().then_some(r.worst_margin),
            contexts_skipped: r.contexts_skipped,
        });
        violations.extend(r.violations.iter().map(|v| OracleViolation {
            seed: cfg.seed,
            trial,
            assignment: v.context.clone(),
            observed: v.observed.clone(),
        }));
    }
    Ok(OracleVerdict {
        query: query.clone(),
        engine_sign: claimed,
        trials_run: cfg.trials,
        records,
        violations,
        support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NodeKind;
    use Sign::*;

    fn chain(w: NodeKind) -> Qpn {
        Qpn::builder()
            .prob("z")
            .node("w", w)
            .prob("x")
            .prob("y")
            .edge("z", "w", Plus)
            .edge("z", "x", Plus)
            .edge("w", "y", Plus)
            .edge("w", "x", Plus)
            .build()
            .unwrap()
    }

    #[test]
    fn deterministic_chain_is_sound() {
        let q = OracleQuery::Influence(InfluenceQuery::new("z", "y", ["x"]));
        let v =
            soundness_report(&chain(NodeKind::Deterministic), &q, &OracleConfig::default().with_trials(100)).unwrap();
        assert_eq!(v.engine_sign, Plus);
        assert!(v.is_sound(), "{v}");
        assert_eq!(v.records.len(), 100);
    }

    #[test]
    fn ambiguous_answer_is_vacuous() {
        let q = OracleQuery::Influence(InfluenceQuery::new("z", "y", ["x"]));
        let v =
            soundness_report(&chain(NodeKind::Probabilistic), &q, &OracleConfig::default().with_trials(100)).unwrap();
        assert_eq!(v.engine_sign, Ambig);
        let s = v.support.clone().unwrap();
        assert!(s.plus < 100 && s.minus < 100, "{v}");
        assert!(v.to_string().contains("vacuously sound"));
    }

    #[test]
    fn configuration_checks() {
        let mut cfg = OracleConfig::default();
        cfg.cardinalities.insert("a".into(), 1);
        assert!(matches!(cfg.check(), Err(OracleError::InvalidConfig(_))));
        assert!(OracleConfig::default().with_trials(0).check().is_err());
        let big = (0..13).fold(Qpn::builder(), |b, i| b.prob(&format!("n{i}"))).build().unwrap();
        assert!(matches!(sample_numeric_net(&big, &OracleConfig::default(), 0), Err(OracleError::TooLarge(_))));
    }
}
