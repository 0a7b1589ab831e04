//! Single-round univariate sumcheck over a multiplicative subgroup and the
//! matching single-round domain-identity check.
//!
//! For `P = g(f_1, ..., f_q)` and a subgroup `H` of size `n`,
//! `sum_{a in H} P(a) = n * (P mod (x^n - 1))[0]`. The prover writes
//! `P = quot * (x^n - 1) + x * g' + s / n` and proves `deg g' <= n - 2`.

use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::piop::{AuroraCheck, ChallengeDomain, OpCounter, Oracle, Rejection, Session};
use crate::poly::{div_rem_cyclic, ntt_forward, ntt_inverse, ntt_op_count, reverse_coefficients, EvaluationTable, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuroraProof<F: Field> {
    pub quotient: Polynomial<F>,
    /// `g'` with `P mod (x^n - 1) = x g' + s/n`.
    pub remainder: Polynomial<F>,
}

#[derive(Clone, Debug)]
pub struct AuroraOracles<F: Field> {
    pub quotient: Oracle<F>,
    pub remainder: Oracle<F>,
    pub companion: Oracle<F>,
}

/// Degree bound of the quotient for inputs of degree `< n`.
pub fn quotient_bound(n: usize, d: usize) -> usize {
    (d * (n - 1)).max(n) - n
}

/// Coefficients of `g(f_1, ..., f_q)` from the tables of the `f_i`.
///
/// When the product degree does not fit into the largest subgroup and that
/// subgroup is all of `F*`, the result is reduced mod `x^(p-1) - 1`, which is
/// the same function on nonzero points.
pub fn compose_coefficients<F: Field>(
    tables: &[EvaluationTable<F>],
    g: &Constraint<F>,
    ops: &mut OpCounter,
) -> Result<Polynomial<F>> {
    let n = tables[0].len();
    let target = (g.degree() * (n - 1) + 1).next_power_of_two().max(n);
    let mut log_big = target.trailing_zeros();
    if log_big > F::TWO_ADICITY {
        if F::MODULUS - 1 == 1u64 << F::TWO_ADICITY {
            log_big = F::TWO_ADICITY;
        } else {
            return Err(Error::UnsupportedDomain {
                log_size: log_big,
                two_adicity: F::TWO_ADICITY,
            });
        }
    }
    let big = 1usize << log_big;
    let omega = F::primitive_root_of_unity(log_big)?;
    let mut evals = Vec::with_capacity(tables.len());
    for t in tables {
        let coeffs = ntt_inverse(t);
        evals.push(ntt_forward(&coeffs, log_big, omega)?.into_values());
        ops.add(ntt_op_count(n) + ntt_op_count(big));
    }
    let mut args = vec![F::ZERO; tables.len()];
    let values: Vec<F> = (0..big)
        .map(|i| {
            for (a, e) in args.iter_mut().zip(&evals) {
                *a = e[i];
            }
            g.apply(&args)
        })
        .collect();
    ops.add(big as u64 * g.eval_cost() + ntt_op_count(big));
    Ok(ntt_inverse(&EvaluationTable::new(values, omega)?))
}

pub fn aurora_prove<F: Field>(
    tables: &[EvaluationTable<F>],
    g: &Constraint<F>,
    s: F,
    ops: &mut OpCounter,
) -> Result<AuroraProof<F>> {
    let n = tables[0].len();
    if n < 2 {
        return Err(Error::InvalidConfig("single-round sumcheck needs a domain of size at least 2".into()));
    }
    let p = compose_coefficients(tables, g, ops)?;
    let (quotient, rem) = div_rem_cyclic(&p, n, F::ONE);
    ops.add(p.len() as u64);
    let n_inv = F::from_u64(n as u64).inverse().expect("n < p");
    if rem.coeff(0) != s * n_inv {
        return Err(Error::DishonestInput("claimed sum does not match the composed polynomial".into()));
    }
    let remainder = Polynomial::new(rem.coeffs().iter().skip(1).copied().collect());
    Ok(AuroraProof { quotient, remainder })
}

pub fn aurora_send<F: Field>(session: &mut Session<F>, proof: &AuroraProof<F>, n: usize, d: usize) -> Result<AuroraOracles<F>> {
    let companion = reverse_coefficients(&proof.remainder, n - 2)?;
    Ok(AuroraOracles {
        quotient: session.send_oracle(proof.quotient.clone(), quotient_bound(n, d)),
        remainder: session.send_oracle(proof.remainder.clone(), n - 2),
        companion: session.send_companion(companion, n - 2),
    })
}

/// Checks at the nonzero point `rho`.
pub fn aurora_verify<F: Field>(
    session: &mut Session<F>,
    inputs: &[Oracle<F>],
    n: usize,
    g: &Constraint<F>,
    s: F,
    proof: &AuroraOracles<F>,
    rho: F,
) -> bool {
    let args: Vec<F> = inputs.iter().map(|o| session.query(o, rho)).collect();
    let lhs = g.apply(&args);
    let n_inv = F::from_u64(n as u64).inverse().expect("n < p");
    let quot = session.query(&proof.quotient, rho);
    let rem = session.query(&proof.remainder, rho);
    let rhs = quot * (rho.pow(n as u64) - F::ONE) + rho * rem + s * n_inv;
    let sum_ok = session.check(lhs == rhs, Rejection::Aurora { part: AuroraCheck::Sum });
    let rho_inv = rho.inverse().expect("nonzero challenge");
    let c = session.query(&proof.companion, rho);
    let rev = session.query(&proof.remainder, rho_inv);
    let deg_ok = session.check(
        c == rho.pow(n as u64 - 2) * rev,
        Rejection::Aurora { part: AuroraCheck::Degree },
    );
    sum_ok && deg_ok
}

/// Shifts the quotient by a constant so that a false claim `s + delta` passes
/// whenever `rho^n` hits one chosen value.
pub fn plant_quotient_shift<F: Field>(proof: &mut AuroraProof<F>, n: usize, delta: F) {
    let n_inv = F::from_u64(n as u64).inverse().expect("n < p");
    proof.quotient = shift_for_gap(&proof.quotient, n, delta * n_inv);
}

/// `quot + c` such that `c (rho^n - 1) + gap = 0` holds on a whole coset of
/// the subgroup of size `n` (if such a coset exists).
pub fn shift_for_gap<F: Field>(quot: &Polynomial<F>, n: usize, gap: F) -> Polynomial<F> {
    if gap.is_zero() {
        return quot.clone();
    }
    let Some(an) = (2..F::MODULUS.min(1 << 16))
        .map(|a| F::from_u64(a).pow(n as u64))
        .find(|&an| an != F::ONE)
    else {
        return quot.clone();
    };
    let c = -gap / (an - F::ONE);
    quot + &Polynomial::constant(c)
}

/// Standalone single-round sumcheck on tables over the subgroup of their size.
/// A false `claim` makes the prover play [`plant_quotient_shift`].
pub fn aurora_run<F: Field>(session: &mut Session<F>, tables: &[Vec<F>], g: &Constraint<F>, claim: F) -> Result<()> {
    crate::lfkn::validate_tables(tables, g)?;
    let n = tables[0].len();
    let evals: Vec<EvaluationTable<F>> = tables
        .iter()
        .map(|t| EvaluationTable::over_subgroup(t.clone()))
        .collect::<Result<_>>()?;
    let inputs: Vec<Oracle<F>> = evals.iter().map(|t| session.input_oracle(t.clone(), n - 1)).collect();
    let truth = crate::lfkn::brute_force_sum(tables, g);
    let mut proof = session.prover_work(|ops| aurora_prove(&evals, g, truth, ops))?;
    plant_quotient_shift(&mut proof, n, claim - truth);
    let sent = aurora_send(session, &proof, n, g.degree())?;
    session.count_round();
    let rho = session.challenge(ChallengeDomain::Nonzero);
    aurora_verify(session, &inputs, n, g, claim, &sent, rho);
    Ok(())
}

/// Quotient `Q` with `g(f) - h = Q (x^n - 1)`, where `h` is given by its table.
pub fn identity_tail_prove<F: Field>(
    tables: &[EvaluationTable<F>],
    target: &EvaluationTable<F>,
    g: &Constraint<F>,
    ops: &mut OpCounter,
) -> Result<Polynomial<F>> {
    let n = tables[0].len();
    let p = compose_coefficients(tables, g, ops)?;
    let diff = &p - &ntt_inverse(target);
    ops.add(ntt_op_count(n) + diff.len() as u64);
    let (quot, rem) = div_rem_cyclic(&diff, n, F::ONE);
    if !rem.is_zero() {
        return Err(Error::DishonestInput("target is not the remainder of the composed polynomial".into()));
    }
    Ok(quot)
}

/// Checks `g(f(rho)) - h(rho) = Q(rho) (rho^n - 1)`.
pub fn identity_tail_verify<F: Field>(
    session: &mut Session<F>,
    inputs: &[Oracle<F>],
    target: &Oracle<F>,
    quotient: &Oracle<F>,
    n: usize,
    g: &Constraint<F>,
    rho: F,
) -> bool {
    let args: Vec<F> = inputs.iter().map(|o| session.query(o, rho)).collect();
    let lhs = g.apply(&args) - session.query(target, rho);
    let rhs = session.query(quotient, rho) * (rho.pow(n as u64) - F::ONE);
    session.check(lhs == rhs, Rejection::IdentityTail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Goldilocks, F17};
    use crate::lfkn::brute_force_sum;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f17(v: u64) -> F17 {
        F17::from_u64(v)
    }

    #[test]
    fn identity_example() {
        let g = Constraint::builtin("identity").unwrap();
        let t = EvaluationTable::over_subgroup(vec![f17(1), f17(2), f17(3), f17(4)]).unwrap();
        let mut ops = OpCounter::default();
        let proof = aurora_prove(&[t], &g, f17(10), &mut ops).unwrap();
        assert!(proof.quotient.is_zero());
        assert_eq!(proof.remainder, Polynomial::from_u64s(&[10, 8, 6]));
        // 10 / 4 = 11 = f[0]
        assert_eq!(f17(10) * f17(4).inverse().unwrap(), f17(11));
    }

    #[test]
    fn constant_input() {
        let g = Constraint::builtin("identity").unwrap();
        let t = EvaluationTable::over_subgroup(vec![f17(5); 8]).unwrap();
        let mut ops = OpCounter::default();
        let proof = aurora_prove(&[t], &g, f17(40), &mut ops).unwrap();
        assert!(proof.remainder.is_zero());
    }

    #[test]
    fn wrong_sum_is_a_prover_error() {
        let g = Constraint::builtin("identity").unwrap();
        let t = EvaluationTable::over_subgroup(vec![f17(1), f17(2), f17(3), f17(4)]).unwrap();
        let mut ops = OpCounter::default();
        assert!(matches!(aurora_prove(&[t], &g, f17(11), &mut ops), Err(Error::DishonestInput(_))));
    }

    #[test]
    fn subgroup_sum_is_n_times_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for log_n in 0..=8u32 {
            let n = 1usize << log_n;
            let f: Polynomial<Goldilocks> = Polynomial::random(&mut rng, n);
            let w = Goldilocks::primitive_root_of_unity(log_n).unwrap();
            let t = ntt_forward(&f, log_n, w).unwrap();
            let sum: Goldilocks = t.values().iter().copied().sum();
            assert_eq!(sum, Goldilocks::from_u64(n as u64) * f.coeff(0));
        }
    }

    #[test]
    fn honest_runs_accept_and_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (field_small, log_n) in [(true, 2u32), (true, 3), (false, 5), (false, 7)] {
            for name in ["identity", "square", "product2", "cube"] {
                if field_small {
                    let g = Constraint::<F17>::builtin(name).unwrap();
                    let tables: Vec<Vec<F17>> = (0..g.arity())
                        .map(|_| (0..1 << log_n).map(|_| F17::random(&mut rng)).collect())
                        .collect();
                    let s = brute_force_sum(&tables, &g);
                    let mut sess = Session::new(3);
                    aurora_run(&mut sess, &tables, &g, s).unwrap();
                    assert!(!sess.is_rejected(), "{name} {log_n}");
                    assert_eq!(sess.metrics().oracles, 2);
                    assert_eq!(sess.metrics().degree_companions, 1);
                } else {
                    let g = Constraint::<Goldilocks>::builtin(name).unwrap();
                    let tables: Vec<Vec<Goldilocks>> = (0..g.arity())
                        .map(|_| (0..1 << log_n).map(|_| Goldilocks::random(&mut rng)).collect())
                        .collect();
                    let s = brute_force_sum(&tables, &g);
                    let evals: Vec<_> = tables.iter().map(|t| EvaluationTable::over_subgroup(t.clone()).unwrap()).collect();
                    let mut ops = OpCounter::default();
                    let proof = aurora_prove(&evals, &g, s, &mut ops).unwrap();
                    let p = compose_coefficients(&evals, &g, &mut ops).unwrap();
                    let n = 1usize << log_n;
                    let n_inv = Goldilocks::from_u64(n as u64).inverse().unwrap();
                    let rebuilt = &(&(&proof.quotient * &(&Polynomial::monomial(Goldilocks::ONE, n) - &Polynomial::constant(Goldilocks::ONE)))
                        + &proof.remainder.shift(1))
                        + &Polynomial::constant(s * n_inv);
                    assert_eq!(rebuilt, p);
                    let mut sess = Session::new(4);
                    aurora_run(&mut sess, &tables, &g, s).unwrap();
                    assert!(!sess.is_rejected());
                }
            }
        }
    }

    #[test]
    fn false_sum_caught_mostly() {
        let g = Constraint::<F17>::builtin("identity").unwrap();
        let tables = vec![vec![f17(1), f17(2), f17(3), f17(4)]];
        let accepted = (0..2000u64)
            .filter(|&seed| {
                let mut sess = Session::new(seed);
                aurora_run(&mut sess, &tables, &g, f17(11)).unwrap();
                !sess.is_rejected()
            })
            .count();
        // the shifted quotient passes on exactly one coset of size 4 in F17*
        let rate = accepted as f64 / 2000.0;
        assert!(rate > 0.15 && rate < 0.35, "{rate}");
    }

    #[test]
    fn residual_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = Constraint::<Goldilocks>::builtin("square").unwrap();
        let f: Vec<Goldilocks> = (0..16).map(|_| Goldilocks::random(&mut rng)).collect();
        let h: Vec<Goldilocks> = f.iter().map(|x| x.square()).collect();
        let ft = EvaluationTable::over_subgroup(f).unwrap();
        let ht = EvaluationTable::over_subgroup(h).unwrap();
        let mut ops = OpCounter::default();
        let q = identity_tail_prove(&[ft.clone()], &ht, &g, &mut ops).unwrap();
        let mut sess = Session::new(1);
        let fi = sess.input_oracle(ft, 15);
        let hi = sess.input_oracle(ht.clone(), 15);
        let qo = sess.send_oracle(q, 15);
        let rho = sess.challenge(ChallengeDomain::Nonzero);
        assert!(identity_tail_verify(&mut sess, &[fi], &hi, &qo, 16, &g, rho));
        let mut bad = ht.into_values();
        bad[3] += Goldilocks::ONE;
        let bt = EvaluationTable::over_subgroup(bad).unwrap();
        let ft2 = EvaluationTable::over_subgroup(vec![Goldilocks::ONE; 16]).unwrap();
        assert!(identity_tail_prove(&[ft2], &bt, &g, &mut ops).is_err());
    }
}
