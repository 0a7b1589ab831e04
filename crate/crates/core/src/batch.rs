//! Batching of several evaluation claims into one through a random linear
//! combination.

use crate::adversary::forge_claims;
use crate::constraint::Constraint;
use crate::field::Field;
use crate::piop::{ChallengeDomain, OpCounter, Rejection, Session};

/// Received per-input claims, the batching scalar `t` and `sum_i t^i c_i`.
#[derive(Clone, Debug)]
pub struct BatchedClaim<F: Field> {
    pub claims: Vec<F>,
    pub t: F,
    pub combined: F,
}

/// The prover sends `honest` evaluations (or, when `forge` is set, values
/// chosen to satisfy `g(c) = claim`); the verifier checks `g(c) = claim` and
/// draws `t`.
pub fn send_claims<F: Field>(
    session: &mut Session<F>,
    g: &Constraint<F>,
    honest: &[F],
    claim: F,
    forge: bool,
) -> BatchedClaim<F> {
    let sent = if forge {
        forge_claims(g, honest, claim).unwrap_or_else(|| honest.to_vec())
    } else {
        honest.to_vec()
    };
    let claims = session.send_scalars(&sent);
    session.check(g.apply(&claims) == claim, Rejection::FinalEvaluation);
    let t = session.challenge(ChallengeDomain::Full);
    let combined = combine(&claims, t);
    BatchedClaim { claims, t, combined }
}

/// `sum_i t^i c_i`
pub fn combine<F: Field>(values: &[F], t: F) -> F {
    values.iter().rev().fold(F::ZERO, |acc, &c| acc * t + c)
}

/// Pointwise `sum_i t^i v_i[x]`.
pub fn combine_tables<F: Field>(tables: &[Vec<F>], t: F, ops: &mut OpCounter) -> Vec<F> {
    let n = tables[0].len();
    let mut out = tables[tables.len() - 1].clone();
    for tab in tables.iter().rev().skip(1) {
        for (o, &v) in out.iter_mut().zip(tab) {
            *o = *o * t + v;
        }
    }
    ops.add(2 * n as u64 * (tables.len() as u64 - 1));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F17;

    #[test]
    fn combination_is_horner() {
        let v: Vec<F17> = [3u64, 5, 7].iter().map(|&x| F17::from_u64(x)).collect();
        let t = F17::from_u64(2);
        assert_eq!(combine(&v, t), F17::from_u64(3 + 10 + 28));
        let mut ops = OpCounter::default();
        let tabs = vec![vec![v[0], v[1]], vec![v[1], v[2]]];
        assert_eq!(combine_tables(&tabs, t, &mut ops), vec![F17::from_u64(13), F17::from_u64(19)]);
    }
}
