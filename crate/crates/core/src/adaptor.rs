//! Evaluation of a multilinear extension against an oracle for the univariate
//! extension of the same values, by square/non-square folding.
//!
//! With `f_0 = unex[v]` over the subgroup of size `2^m`, level `j` splits
//! `f_j` into the parts living on even and odd powers of the level generator
//! and folds them with `z_{j+1}`. All work is done on value tables.

use crate::adversary::PlantedLie;
use crate::aurora::{aurora_prove, aurora_send, aurora_verify, plant_quotient_shift};
use crate::batch::{combine, combine_tables, send_claims};
use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::lfkn::{brute_force_sum, lfkn_run, HypercubeInstance};
use crate::piop::{ChallengeDomain, OpCounter, Oracle, Rejection, Session};
use crate::poly::{mlex_eval, EvaluationTable};

/// Square and non-square parts of one folded polynomial, as tables over the
/// subgroup of half its size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptorLevel<F: Field> {
    pub sq: EvaluationTable<F>,
    pub no: EvaluationTable<F>,
}

#[derive(Clone, Debug)]
pub struct AdaptorOracles<F: Field> {
    pub sq: Vec<Oracle<F>>,
    pub no: Vec<Oracle<F>>,
}

/// Folds `z.len()` levels of `v` (which has `2^m >= 2^len(z)` entries).
pub fn adaptor_prove<F: Field>(v: &[F], z: &[F], ops: &mut OpCounter) -> Result<Vec<AdaptorLevel<F>>> {
    if !v.len().is_power_of_two() {
        return Err(Error::LengthMismatch {
            expected: v.len().next_power_of_two(),
            got: v.len(),
        });
    }
    let m = v.len().trailing_zeros();
    if z.len() > m as usize || m == 0 {
        return Err(Error::LengthMismatch {
            expected: m as usize,
            got: z.len(),
        });
    }
    let mut gen = F::primitive_root_of_unity(m)?;
    let mut cur = v.to_vec();
    let mut levels = Vec::with_capacity(z.len());
    for &zj in z {
        gen = gen.square();
        let sq: Vec<F> = cur.iter().step_by(2).copied().collect();
        let no: Vec<F> = cur.iter().skip(1).step_by(2).copied().collect();
        cur = sq.iter().zip(&no).map(|(&a, &b)| a + zj * (b - a)).collect();
        ops.add(3 * cur.len() as u64);
        levels.push(AdaptorLevel {
            sq: EvaluationTable::from_parts(sq, gen),
            no: EvaluationTable::from_parts(no, gen),
        });
    }
    Ok(levels)
}

/// Value of the last fold: `(1 - z) sq + z no` on the last level's table.
pub fn folded_values<F: Field>(level: &AdaptorLevel<F>, z: F) -> Vec<F> {
    level
        .sq
        .values()
        .iter()
        .zip(level.no.values())
        .map(|(&a, &b)| a + z * (b - a))
        .collect()
}

/// Makes the final check accept `s + offset` by shifting the last square part.
pub fn plant_final_shift<F: Field>(levels: &mut [AdaptorLevel<F>], z_last: F, offset: F) {
    if offset.is_zero() {
        return;
    }
    let last = levels.last_mut().expect("at least one level");
    let (part, weight) = if z_last != F::ONE {
        (&mut last.sq, F::ONE - z_last)
    } else {
        (&mut last.no, z_last)
    };
    let c = offset / weight;
    let gen = part.generator();
    let values = part.values().iter().map(|&x| x + c).collect();
    *part = EvaluationTable::from_parts(values, gen);
}

pub fn adaptor_send<F: Field>(session: &mut Session<F>, levels: &[AdaptorLevel<F>]) -> AdaptorOracles<F> {
    let mut out = AdaptorOracles {
        sq: Vec::with_capacity(levels.len()),
        no: Vec::with_capacity(levels.len()),
    };
    for l in levels {
        let bound = l.sq.len() - 1;
        out.sq.push(session.send_oracle(l.sq.clone(), bound));
        out.no.push(session.send_oracle(l.no.clone(), bound));
    }
    out
}

/// Runs the chain checks for every sent level at `r` and returns the virtual
/// oracle for the next folded polynomial.
fn check_chain<F: Field>(
    session: &mut Session<F>,
    f0: &Oracle<F>,
    m: u32,
    z: &[F],
    sent: &AdaptorOracles<F>,
    r: F,
) -> Result<Oracle<F>> {
    let w_inv = F::primitive_root_of_unity(m)?
        .inverse()
        .expect("root of unity is a unit");
    let half = F::half();
    let mut cur = f0.clone();
    let mut step_inv = w_inv;
    for (j, &zj) in z.iter().enumerate() {
        let lhs = session.query(&cur, r);
        let rh = r.pow(1u64 << (m as usize - j - 1));
        let sq = session.query(&sent.sq[j], r);
        let no = session.query(&sent.no[j], step_inv * r);
        let rhs = (F::ONE + rh) * half * sq + (F::ONE - rh) * half * no;
        session.check(lhs == rhs, Rejection::Adaptor { level: j });
        cur = Oracle::linear(vec![(F::ONE - zj, sent.sq[j].clone()), (zj, sent.no[j].clone())]);
        step_inv = step_inv.square();
    }
    Ok(cur)
}

/// Full verifier: `m` chain checks and the final scalar check against `s`.
pub fn adaptor_verify<F: Field>(
    session: &mut Session<F>,
    f0: &Oracle<F>,
    z: &[F],
    s: F,
    sent: &AdaptorOracles<F>,
) -> Result<bool> {
    let m = z.len() as u32;
    let r = session.challenge(ChallengeDomain::Full);
    let before = session.failure();
    let last = check_chain(session, f0, m, z, sent, r)?;
    let value = session.query(&last, r);
    session.check(value == s, Rejection::Adaptor { level: m as usize });
    Ok(before.is_none() && !session.is_rejected())
}

/// Verifies the first `z.len()` chain checks for an oracle of `2^m` values and
/// returns the authenticated virtual oracle for `unex` of the partially
/// evaluated extension over the subgroup of size `2^(m - len(z))`.
pub fn adaptor_early_authenticate<F: Field>(
    session: &mut Session<F>,
    f0: &Oracle<F>,
    m: u32,
    z: &[F],
    sent: &AdaptorOracles<F>,
) -> Result<Oracle<F>> {
    if z.is_empty() {
        return Ok(f0.clone());
    }
    let r = session.challenge(ChallengeDomain::Full);
    check_chain(session, f0, m, z, sent, r)
}

/// Standalone run proving `mlex[v](z) = claim`. A false claim makes the prover
/// shift the last level so that the final check passes.
pub fn adaptor_run<F: Field>(session: &mut Session<F>, v: &[F], z: &[F], claim: F) -> Result<()> {
    let levels_needed = v.len().trailing_zeros() as usize;
    if z.len() != levels_needed || z.is_empty() {
        return Err(Error::LengthMismatch {
            expected: levels_needed,
            got: z.len(),
        });
    }
    let f0 = session.input_oracle(EvaluationTable::over_subgroup(v.to_vec())?, v.len() - 1);
    let mut levels = session.prover_work(|ops| adaptor_prove(v, z, ops))?;
    let truth = mlex_eval(v, z)?;
    plant_final_shift(&mut levels, z[z.len() - 1], claim - truth);
    let sent = adaptor_send(session, &levels);
    session.count_round();
    adaptor_verify(session, &f0, z, claim, &sent)?;
    Ok(())
}

pub(crate) fn input_oracles<F: Field>(session: &mut Session<F>, tables: &[Vec<F>]) -> Result<Vec<Oracle<F>>> {
    tables
        .iter()
        .map(|t| Ok(session.input_oracle(EvaluationTable::over_subgroup(t.clone())?, t.len() - 1)))
        .collect()
}

/// `m` rounds of hypercube sumcheck, batched evaluation claims, and the
/// adaptor on the batched oracle. A `liar` carries a false claim through.
pub fn composed_sumcheck<F: Field>(
    session: &mut Session<F>,
    inst: &HypercubeInstance<F>,
    mut liar: Option<PlantedLie<F>>,
) -> Result<()> {
    let g = &inst.constraint;
    let m = inst.num_vars() as usize;
    if m == 0 {
        return Err(Error::InvalidConfig("need at least one variable".into()));
    }
    let inputs = input_oracles(session, &inst.tables)?;
    let out = lfkn_run(session, inst.tables.clone(), g, inst.claim, m, liar.as_mut());
    let honest: Vec<F> = out.tables.iter().map(|t| t[0]).collect();
    let lying = liar.as_ref().is_some_and(|l| !l.offset().is_zero());
    let batch = send_claims(session, g, &honest, out.claim, lying);
    let combined = session.prover_work(|ops| combine_tables(&inst.tables, batch.t, ops));
    let mut levels = session.prover_work(|ops| adaptor_prove(&combined, &out.challenges, ops))?;
    plant_final_shift(&mut levels, out.challenges[m - 1], batch.combined - combine(&honest, batch.t));
    let sent = adaptor_send(session, &levels);
    session.count_round();
    let f_star = Oracle::powers_combination(&inputs, batch.t);
    adaptor_verify(session, &f_star, &out.challenges, batch.combined, &sent)?;
    Ok(())
}

/// Number of hypercube rounds before the single-round tail: `ceil(log2 m)`.
pub fn early_stop_rounds(m: u32) -> u32 {
    if m <= 1 {
        0
    } else {
        (m - 1).ilog2() + 1
    }
}

/// `ceil(log2 m)` hypercube rounds, the adaptor stopped after as many levels on
/// the batched input, and the single-round sumcheck on the residual claim.
pub fn composed_sumcheck_early_stop<F: Field>(
    session: &mut Session<F>,
    inst: &HypercubeInstance<F>,
    mut liar: Option<PlantedLie<F>>,
) -> Result<()> {
    let g = &inst.constraint;
    let m = inst.num_vars();
    if m < 2 {
        return Err(Error::InvalidConfig("round reduction needs at least two variables".into()));
    }
    let k = early_stop_rounds(m) as usize;
    let inputs = input_oracles(session, &inst.tables)?;
    let out = lfkn_run(session, inst.tables.clone(), g, inst.claim, k, liar.as_mut());
    let n = out.tables[0].len();

    let partial: Vec<EvaluationTable<F>> = out
        .tables
        .iter()
        .map(|t| EvaluationTable::over_subgroup(t.clone()))
        .collect::<Result<_>>()?;
    let partial_oracles: Vec<Oracle<F>> = partial.iter().map(|t| session.send_oracle(t.clone(), n - 1)).collect();
    let t = session.challenge(ChallengeDomain::Full);

    let combined = session.prover_work(|ops| combine_tables(&inst.tables, t, ops));
    let levels = session.prover_work(|ops| adaptor_prove(&combined, &out.challenges, ops))?;
    let truth = brute_force_sum(&out.tables, g);
    let mut tail = session.prover_work(|ops| aurora_prove(&partial, g, truth, ops))?;
    plant_quotient_shift(&mut tail, n, out.claim - truth);
    let sent = adaptor_send(session, &levels);
    let tail_sent = aurora_send(session, &tail, n, g.degree())?;
    session.count_round();

    let f_star = Oracle::powers_combination(&inputs, t);
    let folded = adaptor_early_authenticate(session, &f_star, m, &out.challenges, &sent)?;
    let rho = session.challenge(ChallengeDomain::Nonzero);
    let lhs = session.query(&folded, rho);
    let rhs = session.query(&Oracle::powers_combination(&partial_oracles, t), rho);
    session.check(lhs == rhs, Rejection::BatchLink);
    aurora_verify(session, &partial_oracles, n, g, out.claim, &tail_sent, rho);
    Ok(())
}

/// Convenience: honest instance from tables, with the true sum as claim.
pub fn honest_instance<F: Field>(tables: Vec<Vec<F>>, g: Constraint<F>) -> Result<HypercubeInstance<F>> {
    let s = brute_force_sum(&tables, &g);
    HypercubeInstance::new(tables, g, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Goldilocks, F17};
    use crate::poly::{crt_recombine_poly, ntt_inverse};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f17(v: u64) -> F17 {
        F17::from_u64(v)
    }

    fn v4() -> Vec<F17> {
        vec![f17(1), f17(2), f17(3), f17(4)]
    }

    #[test]
    fn levels_of_small_example() {
        let mut ops = OpCounter::default();
        let levels = adaptor_prove(&v4(), &[f17(2), f17(3)], &mut ops).unwrap();
        assert_eq!(ntt_inverse(&levels[0].sq).coeffs(), &[f17(2), f17(16)]);
        assert_eq!(ntt_inverse(&levels[0].no).coeffs(), &[f17(3), f17(16)]);
        assert_eq!(levels[1].sq.values(), &[f17(3)]);
        assert_eq!(levels[1].no.values(), &[f17(5)]);
        // (1 - 3) * 3 + 3 * 5 = 9
        assert_eq!(folded_values(&levels[1], f17(3)), vec![f17(9)]);
    }

    #[test]
    fn zero_point_picks_first_entry() {
        let mut ops = OpCounter::default();
        let v: Vec<F17> = (1..=8).map(f17).collect();
        let levels = adaptor_prove(&v, &[F17::ZERO; 3], &mut ops).unwrap();
        assert_eq!(levels[1].sq.values(), &[f17(1), f17(5)]);
        assert_eq!(folded_values(&levels[2], F17::ZERO), vec![f17(1)]);
    }

    #[test]
    fn verifier_accepts_true_and_rejects_false_value() {
        for seed in 0..20 {
            let mut s = Session::new(seed);
            let f0 = s.input_oracle(EvaluationTable::over_subgroup(v4()).unwrap(), 3);
            let mut ops = OpCounter::default();
            let levels = adaptor_prove(&v4(), &[f17(2), f17(3)], &mut ops).unwrap();
            let sent = adaptor_send(&mut s, &levels);
            assert!(adaptor_verify(&mut s, &f0, &[f17(2), f17(3)], f17(9), &sent).unwrap());
            assert_eq!(s.metrics().oracles, 4);
            // distinct query points collapse when r = 0
            let r = s.transcript().challenges().next().unwrap();
            assert_eq!(s.metrics().queries, if r.is_zero() { 5 } else { 7 });
            assert_eq!(s.metrics().field_elements, 0);

            let mut s = Session::new(seed);
            let f0 = s.input_oracle(EvaluationTable::over_subgroup(v4()).unwrap(), 3);
            let sent = adaptor_send(&mut s, &levels);
            adaptor_verify(&mut s, &f0, &[f17(2), f17(3)], f17(8), &sent).unwrap();
            assert_eq!(s.failure(), Some(Rejection::Adaptor { level: 2 }));
        }
    }

    #[test]
    fn early_authentication_gives_partial_extension() {
        let mut s = Session::new(5);
        let f0 = s.input_oracle(EvaluationTable::over_subgroup(v4()).unwrap(), 3);
        let mut ops = OpCounter::default();
        let levels = adaptor_prove(&v4(), &[f17(2)], &mut ops).unwrap();
        let sent = adaptor_send(&mut s, &levels);
        let f1 = adaptor_early_authenticate(&mut s, &f0, 2, &[f17(2)], &sent).unwrap();
        assert!(!s.is_rejected());
        // f_1 = 4 + 16x
        for x in 0..17 {
            assert_eq!(s.query(&f1, f17(x)), f17(4) + f17(16) * f17(x));
        }
        let same = adaptor_early_authenticate(&mut s, &f0, 2, &[], &sent).unwrap();
        assert_eq!(same, f0);
    }

    #[test]
    fn recombination_is_coefficient_exact_per_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 1..=8u32 {
            let v: Vec<Goldilocks> = (0..1 << m).map(|_| Goldilocks::random(&mut rng)).collect();
            let z: Vec<Goldilocks> = (0..m).map(|_| Goldilocks::random(&mut rng)).collect();
            let mut ops = OpCounter::default();
            let levels = adaptor_prove(&v, &z, &mut ops).unwrap();
            let mut cur = EvaluationTable::over_subgroup(v.clone()).unwrap();
            for (j, l) in levels.iter().enumerate() {
                let f = ntt_inverse(&cur);
                let rebuilt = crt_recombine_poly(&ntt_inverse(&l.sq), &ntt_inverse(&l.no), m - j as u32, cur.generator());
                assert_eq!(rebuilt, f);
                cur = EvaluationTable::from_parts(folded_values(l, z[j]), l.sq.generator());
            }
            assert_eq!(cur.values()[0], mlex_eval(&v, &z).unwrap());
        }
    }

    #[test]
    fn linear_prover_work() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ops_at = |m: u32, rng: &mut ChaCha8Rng| {
            let v: Vec<Goldilocks> = (0..1 << m).map(|_| Goldilocks::random(rng)).collect();
            let z: Vec<Goldilocks> = (0..m).map(|_| Goldilocks::random(rng)).collect();
            let mut ops = OpCounter::default();
            adaptor_prove(&v, &z, &mut ops).unwrap();
            ops.0 as f64
        };
        for m in 8..12 {
            let r = ops_at(m + 1, &mut rng) / ops_at(m, &mut rng);
            assert!((1.8..=2.2).contains(&r), "{r}");
        }
    }

    #[test]
    fn compositions_accept_with_exact_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for m in 2..=7u32 {
            for name in ["identity", "square", "product2"] {
                let g = Constraint::<Goldilocks>::builtin(name).unwrap();
                let (d, q) = (g.degree() as u64, g.arity() as u64);
                let tables: Vec<Vec<Goldilocks>> = (0..q)
                    .map(|_| (0..1 << m).map(|_| Goldilocks::random(&mut rng)).collect())
                    .collect();
                let inst = honest_instance(tables, g).unwrap();
                let mut s = Session::new(m as u64);
                composed_sumcheck(&mut s, &inst, None).unwrap();
                assert!(!s.is_rejected(), "full {name} {m}: {:?}", s.failure());
                let me = s.metrics();
                assert_eq!((me.rounds, me.field_elements, me.oracles), (m as u64 + 1, (d + 1) * m as u64 + q, 2 * m as u64));

                let mut s = Session::new(m as u64);
                composed_sumcheck_early_stop(&mut s, &inst, None).unwrap();
                assert!(!s.is_rejected(), "early stop {name} {m}: {:?}", s.failure());
                let k = early_stop_rounds(m) as u64;
                assert_eq!((s.metrics().rounds, s.metrics().oracles), (k + 1, 2 * k + q + 2));
            }
        }
    }

    #[test]
    fn early_stop_counts() {
        assert_eq!(early_stop_rounds(8), 3);
        assert_eq!(early_stop_rounds(5), 3);
        assert_eq!(early_stop_rounds(2), 1);
        for m in [4u32, 8, 16, 32] {
            let l = early_stop_rounds(m);
            assert!(((m - l) as u128) << (m - l) < 1u128 << m);
        }
    }
}
