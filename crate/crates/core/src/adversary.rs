//! Cheating prover strategy for round-by-round sum reductions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constraint::Constraint;
use crate::field::Field;
use crate::poly::interpolate_integer_nodes;

/// Carries a false running claim through the rounds.
///
/// Each round the honest round polynomial is shifted by an error polynomial
/// that makes the verifier's sum check pass and has as many random roots as
/// its degree allows; the lie disappears only if the challenge hits a root.
#[derive(Clone, Debug)]
pub struct PlantedLie<F: Field> {
    offset: F,
    rng: ChaCha8Rng,
}

impl<F: Field> PlantedLie<F> {
    pub fn new(offset: F, seed: u64) -> Self {
        Self {
            offset,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Claimed minus true value of the current running claim.
    pub fn offset(&self) -> F {
        self.offset
    }

    /// Shifts `evals` (values at `0, 1, ..., D`) so that the values at
    /// `checkpoints` sum to `offset` more than before.
    pub fn plant(&mut self, evals: &mut [F], checkpoints: &[F]) {
        if self.offset.is_zero() {
            return;
        }
        let degree = evals.len() - 1;
        for _ in 0..64 {
            let roots = self.distinct_roots(degree);
            let base = |y: F| roots.iter().map(|&a| y - a).product::<F>();
            let total: F = checkpoints.iter().map(|&c| base(c)).sum();
            if total.is_zero() {
                continue;
            }
            let scale = self.offset / total;
            for (t, e) in evals.iter_mut().enumerate() {
                *e += scale * base(F::from_u64(t as u64));
            }
            return;
        }
        // Fallback: a constant error spread over the checkpoints.
        let share = self.offset / F::from_u64(checkpoints.len() as u64);
        evals.iter_mut().for_each(|e| *e += share);
    }

    fn distinct_roots(&mut self, count: usize) -> Vec<F> {
        let mut out: Vec<F> = Vec::with_capacity(count);
        let limit = (F::MODULUS as usize).min(count);
        while out.len() < limit {
            let a = F::random(&mut self.rng);
            if !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }

    /// Updates the offset after challenge `r`, given the honest and sent evaluations.
    pub fn advance(&mut self, honest: &[F], sent: &[F], r: F) {
        self.offset = interpolate_integer_nodes(sent, r) - interpolate_integer_nodes(honest, r);
    }

    /// Adds an arbitrary offset (used when the lie is moved into another message).
    pub fn set_offset(&mut self, offset: F) {
        self.offset = offset;
    }
}

/// Claimed evaluations `c` close to `honest` with `g(c) = target`, found by
/// exhaustive search along one coordinate at a time. Only attempted on fields
/// small enough to enumerate; returns `None` otherwise or if no solution exists.
pub fn forge_claims<F: Field>(g: &Constraint<F>, honest: &[F], target: F) -> Option<Vec<F>> {
    if g.eval(honest).ok()? == target {
        return Some(honest.to_vec());
    }
    if F::MODULUS > 1 << 16 {
        return None;
    }
    let mut c = honest.to_vec();
    for k in 0..c.len() {
        for e in 1..F::MODULUS {
            c[k] = honest[k] + F::from_u64(e);
            if g.apply(&c) == target {
                return Some(c);
            }
        }
        c[k] = honest[k];
    }
    None
}
