//! Simulation substrate shared by all protocols: oracles with query
//! accounting, the transcript and its seeded challenge source, cost metrics,
//! tampering hooks and verdicts.

mod oracle;
mod transcript;

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::field::Field;

pub use oracle::{Oracle, OracleData, OracleId};
pub use transcript::{challenge_at, ChallengeDomain, OracleHandle, ProverMessage, Transcript, TranscriptEntry};

/// Exact cost counters of one run.
///
/// A family of oracles sent together (one polynomial per `j`) counts as one
/// oracle; reverse-coefficient companions that only enforce a degree bound are
/// tallied separately in `degree_companions`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub rounds: u64,
    pub field_elements: u64,
    pub oracles: u64,
    pub queries: u64,
    pub prover_field_ops: u64,
    pub degree_companions: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DgmFamily {
    /// Degree companions `c_j` against the reversed `h_j`.
    Degree,
    /// Recombination of `h` from the shifted parts `h_j`.
    Recombine,
    /// Shift relation between `h'_j`, `h_j` and the clear coefficients.
    Shift,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuroraCheck {
    Sum,
    Degree,
}

/// Which verifier check failed first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Rejection {
    /// Round polynomial does not sum to the running claim.
    RoundSum { round: usize },
    /// `g` applied to the claimed evaluations misses the final running claim.
    FinalEvaluation,
    /// Square/non-square chain check; level `m` is the final scalar check.
    Adaptor { level: usize },
    /// Even/odd folding check; level `m` compares against the claimed constant.
    Gemini { level: usize },
    Dgm { step: usize, family: DgmFamily, j: usize },
    /// The remainder's constant term does not match the claimed sum.
    DgmConstant,
    Aurora { part: AuroraCheck },
    /// Residual domain identity `g(f) - h = quotient * (x^n - 1)`.
    IdentityTail,
    /// Quotient decomposition of a mixed-radix evaluation claim.
    Quotient,
    /// Batched partial evaluations disagree with the individual oracles.
    BatchLink,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::RoundSum { round } => write!(f, "round {round}: round polynomial sum mismatch"),
            Rejection::FinalEvaluation => write!(f, "final evaluation mismatch"),
            Rejection::Adaptor { level } => write!(f, "adaptor level {level} check failed"),
            Rejection::Gemini { level } => write!(f, "gemini level {level} check failed"),
            Rejection::Dgm { step, family, j } => write!(f, "identity step {step}: {family:?} check failed for j = {j}"),
            Rejection::DgmConstant => write!(f, "remainder constant does not match the sum"),
            Rejection::Aurora { part } => write!(f, "single-round sumcheck {part:?} check failed"),
            Rejection::IdentityTail => write!(f, "residual identity check failed"),
            Rejection::Quotient => write!(f, "quotient identity check failed"),
            Rejection::BatchLink => write!(f, "batched partial evaluation link failed"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Verdict {
    Accept,
    Reject { reason: Rejection },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Deviation injected on the prover side to exercise soundness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Tamper {
    #[default]
    None,
    /// Add a random nonzero polynomial to the `index`-th sent oracle object.
    Oracle { index: usize, seed: u64 },
    /// Add a random nonzero value to the `index`-th sent scalar.
    Message { index: usize, seed: u64 },
}

/// Counts field operations done by prover code.
#[derive(Debug, Default)]
pub struct OpCounter(pub u64);

impl OpCounter {
    #[inline]
    pub fn add(&mut self, n: u64) {
        self.0 += n;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OracleKind {
    Single,
    FamilyMember,
    Companion,
    Input,
}

#[derive(Clone, Debug)]
struct StoredOracle<F: Field> {
    data: OracleData<F>,
    degree_bound: usize,
    #[allow(dead_code)]
    kind: OracleKind,
}

/// Everything a finished run leaves behind.
#[derive(Clone, Debug)]
pub struct RunRecord<F: Field> {
    pub transcript: Transcript<F>,
    pub metrics: Metrics,
    pub verdict: Verdict,
    /// Whether a tampering hook actually changed a message.
    pub tampered: bool,
    pub objects_sent: usize,
    pub scalars_sent: usize,
    pub prover_time: Duration,
    pub total_time: Duration,
}

/// One interactive execution between a prover and the verifier.
///
/// Verifier checks never abort the run: the first failure is recorded and the
/// protocol completes, so that message counts are identical for accepting and
/// rejecting runs.
pub struct Session<F: Field> {
    transcript: Transcript<F>,
    store: Vec<StoredOracle<F>>,
    metrics: Metrics,
    failure: Option<Rejection>,
    queried: HashSet<(OracleId, F)>,
    tamper: Tamper,
    attack_rng: ChaCha8Rng,
    scalars_sent: usize,
    objects_sent: usize,
    tampered: bool,
    prover_time: Duration,
    started: Instant,
}

impl<F: Field> Session<F> {
    pub fn new(seed: u64) -> Self {
        Self::with_tamper(seed, Tamper::None)
    }

    pub fn with_tamper(seed: u64, tamper: Tamper) -> Self {
        let attack_seed = match tamper {
            Tamper::None => 0,
            Tamper::Oracle { seed, .. } | Tamper::Message { seed, .. } => seed,
        };
        Self {
            transcript: Transcript::new(seed),
            store: Vec::new(),
            metrics: Metrics::default(),
            failure: None,
            queried: HashSet::new(),
            tamper,
            attack_rng: ChaCha8Rng::seed_from_u64(attack_seed),
            scalars_sent: 0,
            objects_sent: 0,
            tampered: false,
            prover_time: Duration::ZERO,
            started: Instant::now(),
        }
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn transcript(&self) -> &Transcript<F> {
        &self.transcript
    }

    pub fn is_rejected(&self) -> bool {
        self.failure.is_some()
    }

    /// Oracle objects sent so far, companions and family members included.
    pub fn objects_sent(&self) -> usize {
        self.objects_sent
    }

    pub fn scalars_sent(&self) -> usize {
        self.scalars_sent
    }

    pub fn failure(&self) -> Option<Rejection> {
        self.failure
    }

    /// Runs prover-side computation, charging its operations and time.
    pub fn prover_work<T>(&mut self, work: impl FnOnce(&mut OpCounter) -> T) -> T {
        let start = Instant::now();
        let mut ops = OpCounter::default();
        let out = work(&mut ops);
        self.prover_time += start.elapsed();
        self.metrics.prover_field_ops += ops.0;
        out
    }

    pub fn count_round(&mut self) {
        self.metrics.rounds += 1;
    }

    /// Sends scalars in the clear; returns what the verifier receives.
    pub fn send_scalars(&mut self, values: &[F]) -> Vec<F> {
        let mut out = values.to_vec();
        if let Tamper::Message { index, .. } = self.tamper {
            if index >= self.scalars_sent && index < self.scalars_sent + values.len() {
                let delta = F::random_nonzero(&mut self.attack_rng);
                out[index - self.scalars_sent] += delta;
                self.tampered = true;
            }
        }
        self.scalars_sent += values.len();
        self.metrics.field_elements += values.len() as u64;
        self.transcript.push_scalars(&out);
        out
    }

    pub fn send_scalar(&mut self, value: F) -> F {
        self.send_scalars(&[value])[0]
    }

    fn store_oracle(&mut self, data: OracleData<F>, degree_bound: usize, kind: OracleKind) -> Oracle<F> {
        let mut data = data;
        if let Tamper::Oracle { index, .. } = self.tamper {
            if index == self.objects_sent {
                data = self.perturb(data, degree_bound);
                self.tampered = true;
            }
        }
        self.objects_sent += 1;
        let id = self.store.len();
        self.transcript.push_oracle(OracleHandle { id, degree_bound });
        self.store.push(StoredOracle {
            data,
            degree_bound,
            kind,
        });
        Oracle::Real(id)
    }

    fn perturb(&mut self, data: OracleData<F>, degree_bound: usize) -> OracleData<F> {
        let rng = &mut self.attack_rng;
        let mut noise = |len: usize| -> Vec<F> {
            let mut v: Vec<F> = (0..len).map(|_| F::random(rng)).collect();
            if v.iter().all(|x| x.is_zero()) {
                v[0] = F::ONE;
            }
            v
        };
        match data {
            OracleData::Table(t) => {
                let noise = noise(t.len());
                let g = t.generator();
                let values = t.into_values().into_iter().zip(noise).map(|(a, b)| a + b).collect();
                OracleData::Table(crate::poly::EvaluationTable::from_parts(values, g))
            }
            OracleData::Coeffs(p) => {
                let len = (degree_bound + 1).max(p.len()).min(1 << 20);
                let noise = crate::poly::Polynomial::new(noise(len));
                OracleData::Coeffs(&p + &noise)
            }
        }
    }

    pub fn send_oracle(&mut self, data: impl Into<OracleData<F>>, degree_bound: usize) -> Oracle<F> {
        self.metrics.oracles += 1;
        self.store_oracle(data.into(), degree_bound, OracleKind::Single)
    }

    /// Sends several polynomials that together count as one oracle.
    pub fn send_family(&mut self, members: Vec<(OracleData<F>, usize)>) -> Vec<Oracle<F>> {
        self.metrics.oracles += 1;
        members
            .into_iter()
            .map(|(d, b)| self.store_oracle(d, b, OracleKind::FamilyMember))
            .collect()
    }

    /// Registers an oracle the verifier holds before the protocol starts. It is
    /// neither counted nor subject to tampering.
    pub fn input_oracle(&mut self, data: impl Into<OracleData<F>>, degree_bound: usize) -> Oracle<F> {
        let id = self.store.len();
        self.store.push(StoredOracle {
            data: data.into(),
            degree_bound,
            kind: OracleKind::Input,
        });
        Oracle::Real(id)
    }

    /// Sends a reverse-coefficient companion that only enforces a degree bound.
    pub fn send_companion(&mut self, data: impl Into<OracleData<F>>, degree_bound: usize) -> Oracle<F> {
        self.metrics.degree_companions += 1;
        self.store_oracle(data.into(), degree_bound, OracleKind::Companion)
    }

    pub fn challenge(&mut self, domain: ChallengeDomain) -> F {
        self.transcript.challenge(domain)
    }

    /// Point query; each distinct (sent oracle, point) pair is charged once.
    pub fn query(&mut self, o: &Oracle<F>, x: F) -> F {
        match o {
            Oracle::Real(id) => {
                if self.queried.insert((*id, x)) {
                    self.metrics.queries += 1;
                }
                self.store[*id].data.evaluate(x)
            }
            Oracle::Linear(terms) => {
                let mut acc = F::ZERO;
                for (w, c) in terms.iter() {
                    acc += *w * self.query(c, x);
                }
                acc
            }
        }
    }

    pub fn degree_bound(&self, o: &Oracle<F>) -> usize {
        o.components()
            .into_iter()
            .map(|id| self.store[id].degree_bound)
            .max()
            .unwrap_or(0)
    }

    /// Records `reason` unless an earlier check already failed. Returns `ok`.
    pub fn check(&mut self, ok: bool, reason: Rejection) -> bool {
        if !ok && self.failure.is_none() {
            self.failure = Some(reason);
        }
        ok
    }

    pub fn finish(mut self) -> RunRecord<F> {
        self.transcript.finish();
        let verdict = match self.failure {
            None => Verdict::Accept,
            Some(reason) => Verdict::Reject { reason },
        };
        RunRecord {
            transcript: self.transcript,
            metrics: self.metrics,
            verdict,
            tampered: self.tampered,
            objects_sent: self.objects_sent,
            scalars_sent: self.scalars_sent,
            prover_time: self.prover_time,
            total_time: self.started.elapsed(),
        }
    }
}
