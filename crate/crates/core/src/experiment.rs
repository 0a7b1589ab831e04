//! Seeded experiment driver: runs a protocol on random instances, compares
//! costs with the closed-form counts, measures acceptance under attacks and
//! prover scaling.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptor::{adaptor_run, composed_sumcheck, composed_sumcheck_early_stop, early_stop_rounds};
use crate::adversary::PlantedLie;
use crate::aurora::aurora_run;
use crate::constraint::Constraint;
use crate::dgm::{dgm_early_stop, dgm_sumcheck, shift_exponent};
use crate::direct::{direct_adaptor, direct_gemini, direct_kappa, KappaSchedule};
use crate::error::{Error, Result};
use crate::field::{Field, Goldilocks, F17};
use crate::gemini::gemini_run;
use crate::lfkn::{brute_force_sum, HypercubeInstance};
use crate::piop::{Metrics, Rejection, Session, Tamper, Verdict};
use crate::poly::{mlex_eval, mlin_eval, Polynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    /// Single-round sumcheck with a quotient and a remainder oracle.
    Aurora,
    LfknAdaptor,
    LfknAdaptorAurora,
    DgmGemini,
    DgmGeminiAurora,
    /// Direct rounds with the final claims read as coefficient evaluations.
    DirectGemini,
    DirectKappa,
    /// Direct rounds with the final claims read as value extensions.
    DirectAdaptor,
    /// Value-domain adaptor alone on one table.
    Adaptor,
    /// Coefficient folding alone on one polynomial.
    Gemini,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 10] = [
        ProtocolKind::Aurora,
        ProtocolKind::LfknAdaptor,
        ProtocolKind::LfknAdaptorAurora,
        ProtocolKind::DgmGemini,
        ProtocolKind::DgmGeminiAurora,
        ProtocolKind::DirectGemini,
        ProtocolKind::DirectKappa,
        ProtocolKind::DirectAdaptor,
        ProtocolKind::Adaptor,
        ProtocolKind::Gemini,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Aurora => "aurora",
            ProtocolKind::LfknAdaptor => "lfkn-adaptor",
            ProtocolKind::LfknAdaptorAurora => "lfkn-adaptor-aurora",
            ProtocolKind::DgmGemini => "dgm-gemini",
            ProtocolKind::DgmGeminiAurora => "dgm-gemini-aurora",
            ProtocolKind::DirectGemini => "direct-gemini",
            ProtocolKind::DirectKappa => "direct-kappa",
            ProtocolKind::DirectAdaptor => "direct-adaptor",
            ProtocolKind::Adaptor => "adaptor",
            ProtocolKind::Gemini => "gemini",
        }
    }

    /// Needs at least two variables.
    pub fn is_round_reduced(self) -> bool {
        matches!(self, ProtocolKind::LfknAdaptorAurora | ProtocolKind::DgmGeminiAurora)
    }

    /// Works on a single input and ignores the constraint.
    pub fn is_standalone(self) -> bool {
        matches!(self, ProtocolKind::Adaptor | ProtocolKind::Gemini)
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "direct" {
            return Ok(ProtocolKind::DirectKappa);
        }
        ProtocolKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown protocol {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    /// Claimed sum off by one, prover cheating as well as it can.
    TamperSum,
    /// Random nonzero perturbation of one sent oracle.
    TamperOracle,
    /// Random nonzero perturbation of one sent scalar.
    TamperMessage,
}

impl AttackKind {
    pub const ALL: [AttackKind; 3] = [AttackKind::TamperSum, AttackKind::TamperOracle, AttackKind::TamperMessage];

    pub fn name(self) -> &'static str {
        match self {
            AttackKind::TamperSum => "tamper-sum",
            AttackKind::TamperOracle => "tamper-oracle",
            AttackKind::TamperMessage => "tamper-message",
        }
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AttackKind::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown attack {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    F17,
    F64,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::F17 => F17::NAME,
            FieldKind::F64 => Goldilocks::NAME,
        }
    }

    pub fn two_adicity(self) -> u32 {
        match self {
            FieldKind::F17 => F17::TWO_ADICITY,
            FieldKind::F64 => Goldilocks::TWO_ADICITY,
        }
    }
}

impl FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f17" => Ok(FieldKind::F17),
            "f64" | "goldilocks" => Ok(FieldKind::F64),
            _ => Err(Error::InvalidConfig(format!("unknown field {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub protocol: ProtocolKind,
    pub m: u32,
    pub constraint: String,
    /// Number of inputs; only needed for `power-sum-D`.
    pub arity: Option<usize>,
    pub field: FieldKind,
    pub seed: u64,
    pub trials: usize,
    pub attack: Option<AttackKind>,
    /// `sqrt`, `binary` or a list such as `1,2,3`; used by `direct-kappa`.
    pub schedule: Option<String>,
    /// Adds wall-clock timings, which makes reports differ between runs.
    pub timings: bool,
}

impl RunConfig {
    pub fn new(protocol: ProtocolKind, m: u32, constraint: &str, field: FieldKind) -> Self {
        Self {
            protocol,
            m,
            constraint: constraint.to_string(),
            arity: None,
            field,
            seed: 0,
            trials: 1,
            attack: None,
            schedule: None,
            timings: false,
        }
    }

    pub fn kappa_schedule(&self) -> Result<KappaSchedule> {
        match &self.schedule {
            Some(s) => KappaSchedule::parse(s, self.m),
            None => Ok(KappaSchedule::binary(self.m)),
        }
    }

    fn validate<F: Field>(&self, g: &Constraint<F>) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if self.m > F::TWO_ADICITY {
            return Err(Error::UnsupportedDomain {
                log_size: self.m,
                two_adicity: F::TWO_ADICITY,
            });
        }
        if self.protocol.is_round_reduced() && self.m < 2 {
            return Err(Error::InvalidConfig(format!("{} needs m >= 2", self.protocol)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be positive".into()));
        }
        if self.protocol == ProtocolKind::DirectKappa {
            let steps = self.kappa_schedule()?.steps(self.m)?;
            let top = steps.iter().map(|&t| g.degree() * ((1usize << t) - 1)).max().unwrap_or(0);
            if top as u64 + 1 > F::MODULUS {
                return Err(Error::InvalidConfig(format!(
                    "schedule needs round polynomials of degree {top}, too many nodes for {}",
                    F::NAME
                )));
            }
        }
        Ok(())
    }
}

/// Closed-form costs for a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedCosts {
    pub rounds: u64,
    pub field_elements: u64,
    pub oracles: u64,
    /// Only given where the count is a fixed formula.
    pub queries: Option<u64>,
    pub formula: String,
}

/// Field elements sent by `steps` identity steps starting from `2^m` points.
pub fn dgm_field_elements(m: u32, steps: u32, d: usize) -> u64 {
    (0..steps)
        .map(|s| {
            let half = 1usize << (m - s - 1);
            (0..=d).map(|j| shift_exponent(j, half) as u64).sum::<u64>()
        })
        .sum()
}

pub fn expected_costs(protocol: ProtocolKind, m: u32, d: usize, q: usize, schedule: &KappaSchedule) -> Result<ExpectedCosts> {
    let (m64, d64, q64) = (m as u64, d as u64, q as u64);
    let k = early_stop_rounds(m) as u64;
    let e = |rounds, field_elements, oracles, queries, formula: &str| ExpectedCosts {
        rounds,
        field_elements,
        oracles,
        queries,
        formula: formula.to_string(),
    };
    Ok(match protocol {
        ProtocolKind::Aurora => e(1, 0, 2, None, "rounds 1, field elements 0, oracles 2"),
        ProtocolKind::LfknAdaptor => e(
            m64 + 1,
            (d64 + 1) * m64 + q64,
            2 * m64,
            None,
            "rounds m+1, field elements (d+1)m+q, oracles 2m",
        ),
        ProtocolKind::LfknAdaptorAurora => e(
            k + 1,
            (d64 + 1) * k,
            2 * k + q64 + 2,
            None,
            "rounds log(m)+1, field elements (d+1)log(m), oracles 2log(m)+q+2",
        ),
        ProtocolKind::DgmGemini => e(
            m64 + 1,
            dgm_field_elements(m, m, d) + q64,
            4 * m64 - 1,
            None,
            "rounds m+1, field elements O(d^2)m+q, oracles 4m-1",
        ),
        ProtocolKind::DgmGeminiAurora => e(
            k + 1,
            dgm_field_elements(m, k as u32, d),
            4 * k + q64 + 1,
            None,
            "rounds log(m)+1, field elements O(d^2)log(m), oracles 4log(m)+q+1",
        ),
        ProtocolKind::DirectGemini => e(
            m64 + 1,
            (d64 + 1) * m64 + q64,
            m64 - 1,
            None,
            "rounds m+1, field elements (d+1)m+q, oracles m-1",
        ),
        ProtocolKind::DirectKappa => {
            let steps = schedule.steps(m)?;
            let c = steps.len() as u64;
            let fe: u64 = steps.iter().map(|&t| d64 * ((1u64 << t) - 1) + 1).sum();
            e(
                c + 1,
                fe + q64,
                c,
                None,
                "rounds c+1, field elements sum_j (d(2^t_j - 1) + 1) + q, oracles c",
            )
        }
        ProtocolKind::DirectAdaptor => e(
            m64 + 1,
            (d64 + 1) * m64 + q64,
            2 * m64,
            None,
            "rounds m+1, field elements (d+1)m+q, oracles 2m",
        ),
        ProtocolKind::Adaptor => e(1, 0, 2 * m64, Some(3 * m64 + 1), "oracles 2m, field elements 0, queries 3m+1"),
        ProtocolKind::Gemini => e(1, 0, m64 - 1, Some(3 * m64 - 1), "oracles m-1, field elements 0, queries 3m-1"),
    })
}

/// Acceptance probability bound for a false claim, as a fraction capped at 1.
pub fn soundness_bound(protocol: ProtocolKind, m: u32, d: usize, q: usize, schedule: &KappaSchedule, modulus: u64) -> Result<f64> {
    let p = modulus as f64;
    let big = ((1u64 << m) - 1) as f64;
    let (mf, df) = (m as f64, d as f64);
    let k = early_stop_rounds(m);
    let batch = (q as f64 - 1.0) / p;
    let adaptor = big / p;
    let gemini = big / (p - 1.0);
    let aurora = |n: f64| (df * (n - 1.0)).max(n) / (p - 1.0);
    let dgm = |steps: f64| steps * (df + (2.0 * df + 3.0) * big) / (p - 1.0);
    let bound = match protocol {
        ProtocolKind::Aurora => aurora((1u64 << m) as f64),
        ProtocolKind::LfknAdaptor => df * mf / p + batch + adaptor,
        ProtocolKind::LfknAdaptorAurora => {
            df * k as f64 / p + batch + adaptor + big / (p - 1.0) + aurora((1u64 << (m - k)) as f64)
        }
        ProtocolKind::DgmGemini => dgm(mf) + batch + gemini,
        ProtocolKind::DgmGeminiAurora => dgm(k as f64) + batch + gemini + big / (p - 1.0) + aurora((1u64 << (m - k)) as f64),
        ProtocolKind::DirectGemini => df * mf / p + batch + gemini,
        ProtocolKind::DirectKappa => {
            let rounds: f64 = schedule.steps(m)?.iter().map(|&t| df * ((1u64 << t) - 1) as f64).sum();
            rounds / p + batch + big / p
        }
        ProtocolKind::DirectAdaptor => df * mf / p + batch + adaptor,
        ProtocolKind::Adaptor => adaptor,
        ProtocolKind::Gemini => gemini,
    };
    Ok(bound.min(1.0))
}

/// Random inputs of one trial.
#[derive(Clone, Debug)]
pub struct Instance<F: Field> {
    pub tables: Vec<Vec<F>>,
    /// Evaluation point for the standalone protocols.
    pub point: Vec<F>,
}

impl<F: Field> Instance<F> {
    pub fn random(seed: u64, m: u32, q: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tables = (0..q).map(|_| (0..1usize << m).map(|_| F::random(&mut rng)).collect()).collect();
        let point = (0..m).map(|_| F::random(&mut rng)).collect();
        Self { tables, point }
    }

    /// The true value of the starting claim.
    pub fn truth(&self, protocol: ProtocolKind, g: &Constraint<F>) -> Result<F> {
        match protocol {
            ProtocolKind::Adaptor => mlex_eval(&self.tables[0], &self.point),
            ProtocolKind::Gemini => mlin_eval(&Polynomial::new(self.tables[0].clone()), &self.point),
            _ => Ok(brute_force_sum(&self.tables, g)),
        }
    }
}

/// Runs one protocol execution inside `session`. A `liar` is used by the
/// protocols whose false-claim strategy lives in their round messages.
pub fn execute<F: Field>(
    protocol: ProtocolKind,
    session: &mut Session<F>,
    inst: &Instance<F>,
    g: &Constraint<F>,
    claim: F,
    schedule: &KappaSchedule,
    liar: Option<PlantedLie<F>>,
) -> Result<()> {
    let tables = &inst.tables;
    match protocol {
        ProtocolKind::Aurora => aurora_run(session, tables, g, claim),
        ProtocolKind::LfknAdaptor => {
            let hc = HypercubeInstance::new(tables.clone(), g.clone(), claim)?;
            composed_sumcheck(session, &hc, liar)
        }
        ProtocolKind::LfknAdaptorAurora => {
            let hc = HypercubeInstance::new(tables.clone(), g.clone(), claim)?;
            composed_sumcheck_early_stop(session, &hc, liar)
        }
        ProtocolKind::DgmGemini => dgm_sumcheck(session, tables, g, claim),
        ProtocolKind::DgmGeminiAurora => dgm_early_stop(session, tables, g, claim),
        ProtocolKind::DirectGemini => direct_gemini(session, tables, g, claim, liar),
        ProtocolKind::DirectKappa => direct_kappa(session, tables, g, claim, schedule, liar),
        ProtocolKind::DirectAdaptor => direct_adaptor(session, tables, g, claim, liar),
        ProtocolKind::Adaptor => adaptor_run(session, &tables[0], &inst.point, claim),
        ProtocolKind::Gemini => gemini_run(session, &Polynomial::new(tables[0].clone()), &inst.point, claim),
    }
}

/// Per-trial seed derived from the run seed.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Outcome of one trial.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub verdict: Verdict,
    pub metrics: Metrics,
    /// Whether an honest verifier should accept (true claim, nothing altered).
    pub should_accept: bool,
    pub prover_secs: f64,
    pub total_secs: f64,
}

/// One trial; `None` if the attack has nothing to act on.
pub fn run_trial<F: Field>(
    cfg: &RunConfig,
    g: &Constraint<F>,
    schedule: &KappaSchedule,
    trial: u64,
    attack: Option<AttackKind>,
) -> Result<Option<TrialOutcome>> {
    let seed = trial_seed(cfg.seed, trial);
    let q = if cfg.protocol.is_standalone() { 1 } else { g.arity() };
    let inst = Instance::<F>::random(seed, cfg.m, q);
    let truth = inst.truth(cfg.protocol, g)?;
    let attack_seed = seed ^ 0x5eed_a77a_c4ed_0001;
    let (tamper, claim, liar) = match attack {
        None => (Tamper::None, truth, None),
        Some(AttackKind::TamperSum) => (Tamper::None, truth + F::ONE, Some(PlantedLie::new(F::ONE, attack_seed))),
        Some(kind) => {
            let mut dry = Session::new(seed);
            execute(cfg.protocol, &mut dry, &inst, g, truth, schedule, None)?;
            let count = match kind {
                AttackKind::TamperOracle => dry.objects_sent(),
                _ => dry.scalars_sent(),
            };
            if count == 0 {
                return Ok(None);
            }
            let index = (attack_seed % count as u64) as usize;
            let tamper = match kind {
                AttackKind::TamperOracle => Tamper::Oracle { index, seed: attack_seed },
                _ => Tamper::Message { index, seed: attack_seed },
            };
            (tamper, truth, None)
        }
    };
    let mut session = Session::with_tamper(seed, tamper);
    execute(cfg.protocol, &mut session, &inst, g, claim, schedule, liar)?;
    let record = session.finish();
    Ok(Some(TrialOutcome {
        verdict: record.verdict,
        metrics: record.metrics,
        should_accept: claim == truth && !record.tampered,
        prover_secs: record.prover_time.as_secs_f64(),
        total_secs: record.total_time.as_secs_f64(),
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HonestSummary {
    pub trials: usize,
    pub accepted: usize,
    /// Metrics of the first trial.
    pub metrics: Metrics,
    pub expected: ExpectedCosts,
    pub metrics_match: bool,
    pub first_rejection: Option<Rejection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackSummary {
    pub attack: AttackKind,
    /// Trials in which the attack had something to act on.
    pub applicable: usize,
    pub accepted: usize,
    /// Trials whose verdict equals the ground truth.
    pub agreements: usize,
    pub acceptance_rate: f64,
    pub bound: f64,
    /// `5 * bound`
    pub envelope: f64,
    pub within_envelope: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub prover_secs: f64,
    pub verifier_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub protocol: ProtocolKind,
    pub field: FieldKind,
    pub m: u32,
    pub constraint: String,
    pub degree: usize,
    pub arity: usize,
    pub seed: u64,
    pub schedule: Option<Vec<u32>>,
    pub honest: HonestSummary,
    pub attack: Option<AttackSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
    pub passed: bool,
}

fn metrics_match(metrics: &Metrics, expected: &ExpectedCosts, exact_queries: bool) -> bool {
    metrics.rounds == expected.rounds
        && metrics.field_elements == expected.field_elements
        && metrics.oracles == expected.oracles
        && expected.queries.map_or(true, |q| {
            if exact_queries {
                metrics.queries == q
            } else {
                metrics.queries <= q
            }
        })
}

fn run_generic<F: Field>(cfg: &RunConfig) -> Result<Report> {
    let g = Constraint::<F>::named(&cfg.constraint, cfg.arity)?;
    cfg.validate(&g)?;
    let schedule = cfg.kappa_schedule()?;
    let q = if cfg.protocol.is_standalone() { 1 } else { g.arity() };
    let expected = expected_costs(cfg.protocol, cfg.m, g.degree(), q, &schedule)?;

    let honest_trials = if cfg.attack.is_some() { 1 } else { cfg.trials };
    let honest: Vec<TrialOutcome> = (0..honest_trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, &g, &schedule, t, None).map(|o| o.expect("honest runs always apply")))
        .collect::<Result<_>>()?;
    // challenge collisions in a small field merge queries to the same point
    let exact_queries = F::MODULUS > 1 << 32;
    let first = &honest[0];
    let honest_summary = HonestSummary {
        trials: honest.len(),
        accepted: honest.iter().filter(|o| o.verdict.is_accept()).count(),
        metrics: first.metrics,
        metrics_match: metrics_match(&first.metrics, &expected, exact_queries),
        expected,
        first_rejection: honest.iter().find_map(|o| match o.verdict {
            Verdict::Reject { reason } => Some(reason),
            Verdict::Accept => None,
        }),
    };

    let attack = match cfg.attack {
        None => None,
        Some(kind) => {
            let outcomes: Vec<Option<TrialOutcome>> = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| run_trial(cfg, &g, &schedule, t, Some(kind)))
                .collect::<Result<_>>()?;
            let applied: Vec<&TrialOutcome> = outcomes.iter().flatten().collect();
            let accepted = applied.iter().filter(|o| o.verdict.is_accept()).count();
            let agreements = applied.iter().filter(|o| o.verdict.is_accept() == o.should_accept).count();
            let rate = if applied.is_empty() {
                0.0
            } else {
                accepted as f64 / applied.len() as f64
            };
            let bound = soundness_bound(cfg.protocol, cfg.m, g.degree(), q, &schedule, F::MODULUS)?;
            Some(AttackSummary {
                attack: kind,
                applicable: applied.len(),
                accepted,
                agreements,
                acceptance_rate: rate,
                bound,
                envelope: 5.0 * bound,
                within_envelope: kind != AttackKind::TamperSum || rate <= 5.0 * bound,
            })
        }
    };

    let timings = cfg.timings.then(|| {
        let prover: f64 = honest.iter().map(|o| o.prover_secs).sum();
        let total: f64 = honest.iter().map(|o| o.total_secs).sum();
        Timings {
            prover_secs: prover,
            verifier_secs: (total - prover).max(0.0),
        }
    });
    let passed = honest_summary.accepted == honest_summary.trials
        && honest_summary.metrics_match
        && attack.as_ref().map_or(true, |a| a.within_envelope);
    Ok(Report {
        protocol: cfg.protocol,
        field: cfg.field,
        m: cfg.m,
        constraint: g.name().to_string(),
        degree: g.degree(),
        arity: q,
        seed: cfg.seed,
        schedule: (cfg.protocol == ProtocolKind::DirectKappa).then(|| schedule.steps(cfg.m)).transpose()?,
        honest: honest_summary,
        attack,
        timings,
        passed,
    })
}

/// Runs the configured honest trials and, if set, the attack trials.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.field {
        FieldKind::F17 => run_generic::<F17>(cfg),
        FieldKind::F64 => run_generic::<Goldilocks>(cfg),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub m: u32,
    pub prover_field_ops: u64,
    /// `ops(m) / ops(m - 1)`
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prover_secs: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub protocol: ProtocolKind,
    pub field: FieldKind,
    pub constraint: String,
    pub rows: Vec<BenchRow>,
    pub window: (f64, f64),
    pub all_in_window: bool,
    pub max_ratio: f64,
}

fn bench_generic<F: Field>(cfg: &RunConfig, ms: &[u32], window: (f64, f64)) -> Result<BenchReport> {
    let g = Constraint::<F>::named(&cfg.constraint, cfg.arity)?;
    let mut rows: Vec<BenchRow> = Vec::with_capacity(ms.len());
    for &m in ms {
        let mut c = cfg.clone();
        c.m = m;
        c.validate(&g)?;
        let schedule = c.kappa_schedule()?;
        let out = run_trial(&c, &g, &schedule, 0, None)?.expect("honest runs always apply");
        let ratio = rows.last().map(|r: &BenchRow| out.metrics.prover_field_ops as f64 / r.prover_field_ops as f64);
        rows.push(BenchRow {
            m,
            prover_field_ops: out.metrics.prover_field_ops,
            ratio,
            prover_secs: cfg.timings.then_some(out.prover_secs),
        });
    }
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    Ok(BenchReport {
        protocol: cfg.protocol,
        field: cfg.field,
        constraint: g.name().to_string(),
        all_in_window: ratios.iter().all(|r| (window.0..=window.1).contains(r)),
        max_ratio: ratios.iter().copied().fold(f64::NAN, f64::max),
        rows,
        window,
    })
}

/// One honest run per `m`; doubling ratios of the prover operation counts.
pub fn bench(cfg: &RunConfig, ms: &[u32], window: (f64, f64)) -> Result<BenchReport> {
    match cfg.field {
        FieldKind::F17 => bench_generic::<F17>(cfg, ms, window),
        FieldKind::F64 => bench_generic::<Goldilocks>(cfg, ms, window),
    }
}
