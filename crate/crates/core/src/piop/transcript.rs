use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::field::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChallengeDomain {
    Full,
    Nonzero,
}

/// The `index`-th verifier challenge for `seed`. Each index gets its own
/// ChaCha stream, so a challenge depends on nothing but `(seed, index)`.
pub fn challenge_at<F: Field>(seed: u64, index: u64, domain: ChallengeDomain) -> F {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    match domain {
        ChallengeDomain::Full => F::random(&mut rng),
        ChallengeDomain::Nonzero => F::random_nonzero(&mut rng),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleHandle {
    pub id: usize,
    pub degree_bound: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "F: Field")]
pub struct ProverMessage<F: Field> {
    pub scalars: Vec<F>,
    pub oracles: Vec<OracleHandle>,
}

impl<F: Field> ProverMessage<F> {
    pub fn is_empty(&self) -> bool {
        self.scalars.is_empty() && self.oracles.is_empty()
    }
}

/// One prover message followed by the verifier challenge it triggered
/// (absent for a trailing message that no challenge follows).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "F: Field")]
pub struct TranscriptEntry<F: Field> {
    pub prover: ProverMessage<F>,
    pub challenge: Option<F>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "F: Field")]
pub struct Transcript<F: Field> {
    seed: u64,
    entries: Vec<TranscriptEntry<F>>,
    #[serde(skip)]
    pending: ProverMessage<F>,
    #[serde(skip)]
    drawn: u64,
}

impl<F: Field> Transcript<F> {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            entries: Vec::new(),
            pending: ProverMessage::default(),
            drawn: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn entries(&self) -> &[TranscriptEntry<F>] {
        &self.entries
    }

    pub fn challenges(&self) -> impl Iterator<Item = F> + '_ {
        self.entries.iter().filter_map(|e| e.challenge)
    }

    pub(crate) fn push_scalars(&mut self, scalars: &[F]) {
        self.pending.scalars.extend_from_slice(scalars);
    }

    pub(crate) fn push_oracle(&mut self, handle: OracleHandle) {
        self.pending.oracles.push(handle);
    }

    /// Draws the next challenge and closes the pending prover message.
    pub fn challenge(&mut self, domain: ChallengeDomain) -> F {
        let c = challenge_at(self.seed, self.drawn, domain);
        self.drawn += 1;
        let prover = std::mem::take(&mut self.pending);
        self.entries.push(TranscriptEntry {
            prover,
            challenge: Some(c),
        });
        c
    }

    /// Flushes a trailing prover message that no challenge follows.
    pub(crate) fn finish(&mut self) {
        if !self.pending.is_empty() {
            let prover = std::mem::take(&mut self.pending);
            self.entries.push(TranscriptEntry {
                prover,
                challenge: None,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F17;

    #[test]
    fn challenges_are_reproducible() {
        let mut a = Transcript::<F17>::new(42);
        let mut b = Transcript::<F17>::new(42);
        assert_eq!(a.challenge(ChallengeDomain::Full), b.challenge(ChallengeDomain::Full));
        let xs: Vec<F17> = (0..20).map(|_| a.challenge(ChallengeDomain::Full)).collect();
        let ys: Vec<F17> = (0..20).map(|_| b.challenge(ChallengeDomain::Full)).collect();
        assert_eq!(xs, ys);
        let mut c = Transcript::<F17>::new(43);
        let zs: Vec<F17> = (0..21).map(|_| c.challenge(ChallengeDomain::Full)).collect();
        assert_ne!(zs[1..].to_vec(), xs);
    }

    #[test]
    fn nonzero_domain() {
        let mut t = Transcript::<F17>::new(7);
        for _ in 0..2000 {
            let c = t.challenge(ChallengeDomain::Nonzero);
            assert!((1..17).contains(&c.value()));
        }
    }

    #[test]
    fn challenges_uniform_on_f17() {
        // 10^4 draws, each bucket within 5 sigma of 10^4 / 17.
        let n = 10_000u64;
        let mut counts = [0u64; 17];
        for i in 0..n {
            let c: F17 = challenge_at(2024, i, ChallengeDomain::Full);
            counts[c.value() as usize] += 1;
        }
        let p = 1.0 / 17.0;
        let mean = n as f64 * p;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts {
            assert!((c as f64 - mean).abs() <= 5.0 * sigma, "{counts:?}");
        }
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - mean).powi(2) / mean).sum();
        // 16 degrees of freedom, 99.9% quantile is about 39.25.
        assert!(chi2 < 39.25, "chi2 = {chi2}");
    }

    #[test]
    fn entries_pair_messages_with_challenges() {
        let mut t = Transcript::<F17>::new(1);
        t.push_scalars(&[F17::from_u64(3)]);
        t.challenge(ChallengeDomain::Full);
        t.challenge(ChallengeDomain::Full);
        t.push_oracle(OracleHandle { id: 0, degree_bound: 3 });
        t.finish();
        let e = t.entries();
        assert_eq!(e.len(), 3);
        assert_eq!(e[0].prover.scalars, vec![F17::from_u64(3)]);
        assert!(e[1].prover.is_empty());
        assert_eq!(e[2].challenge, None);
    }
}
