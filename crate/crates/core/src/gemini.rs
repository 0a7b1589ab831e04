//! Evaluation of the multilinear reading of a coefficient vector against a
//! univariate oracle, by repeated even/odd folding.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::piop::{ChallengeDomain, OpCounter, Oracle, Rejection, Session};
use crate::poly::{even_odd_split, log_len, EvaluationTable, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeminiProof<F: Field> {
    /// `f_1, ..., f_{m-1}`
    pub folded: Vec<Polynomial<F>>,
    pub constant: F,
}

/// `f_i = (f_{i-1})_ev + z_i (f_{i-1})_od` in coefficient form.
pub fn gemini_prove<F: Field>(f: &Polynomial<F>, z: &[F]) -> Result<GeminiProof<F>> {
    if log_len(f.len()) > z.len() as u32 {
        return Err(Error::DegreeTooLarge {
            degree: f.len() - 1,
            bound: (1usize << z.len()) - 1,
        });
    }
    let mut cur = f.clone();
    let mut folded = Vec::with_capacity(z.len().saturating_sub(1));
    for &zi in z {
        let (ev, od) = even_odd_split(&cur);
        cur = &ev + &od.scale(zi);
        folded.push(cur.clone());
    }
    let constant = folded.pop().map(|p| p.coeff(0)).unwrap_or_else(|| f.coeff(0));
    Ok(GeminiProof { folded, constant })
}

/// One fold on the value table over `<omega>`: the result lives on `<omega^2>`.
pub fn fold_table<F: Field>(t: &EvaluationTable<F>, z: F, ops: &mut OpCounter) -> EvaluationTable<F> {
    let n = t.len();
    let half = n / 2;
    let v = t.values();
    let h = F::half();
    let omega_inv = t.generator().inverse().expect("root of unity is a unit");
    let mut x_inv = F::ONE;
    let mut out = Vec::with_capacity(half);
    for i in 0..half {
        let (a, b) = (v[i], v[i + half]);
        out.push(((a + b) + z * (a - b) * x_inv) * h);
        x_inv *= omega_inv;
    }
    ops.add(7 * half as u64);
    EvaluationTable::from_parts(out, t.generator().square())
}

/// Tables of `f_1, ..., f_k` for `k = len(z)`.
pub fn gemini_fold_tables<F: Field>(t: &EvaluationTable<F>, z: &[F], ops: &mut OpCounter) -> Result<Vec<EvaluationTable<F>>> {
    if z.len() > t.log_size() as usize {
        return Err(Error::LengthMismatch {
            expected: t.log_size() as usize,
            got: z.len(),
        });
    }
    let mut out: Vec<EvaluationTable<F>> = Vec::with_capacity(z.len());
    for &zi in z {
        let next = fold_table(out.last().unwrap_or(t), zi, ops);
        out.push(next);
    }
    Ok(out)
}

fn check_folds<F: Field>(
    session: &mut Session<F>,
    f0: &Oracle<F>,
    z: &[F],
    folded: &[Oracle<F>],
    last: Option<F>,
    r: F,
) {
    let half = F::half();
    let r_inv = r.inverse().expect("nonzero challenge");
    let r2 = r.square();
    let mut prev = f0.clone();
    for (i, &zi) in z.iter().enumerate() {
        let a = session.query(&prev, r);
        let b = session.query(&prev, -r);
        let expected = (a + b) * half + zi * (a - b) * half * r_inv;
        let actual = match folded.get(i) {
            Some(o) => session.query(o, r2),
            None => last.expect("final value for the last level"),
        };
        session.check(expected == actual, Rejection::Gemini { level: i + 1 });
        if let Some(o) = folded.get(i) {
            prev = o.clone();
        }
    }
}

/// Full verifier: `len(z) - 1` folded oracles and the claimed constant `s`.
pub fn gemini_verify<F: Field>(session: &mut Session<F>, f0: &Oracle<F>, z: &[F], s: F, folded: &[Oracle<F>]) -> bool {
    debug_assert_eq!(folded.len() + 1, z.len().max(1));
    let before = session.is_rejected();
    let r = session.challenge(ChallengeDomain::Nonzero);
    check_folds(session, f0, z, folded, Some(s), r);
    !before && !session.is_rejected()
}

/// Early-stopped verifier: all `len(z)` folds were sent; returns the last one.
pub fn gemini_verify_partial<F: Field>(session: &mut Session<F>, f0: &Oracle<F>, z: &[F], folded: &[Oracle<F>]) -> Oracle<F> {
    debug_assert_eq!(folded.len(), z.len());
    if z.is_empty() {
        return f0.clone();
    }
    let r = session.challenge(ChallengeDomain::Nonzero);
    check_folds(session, f0, z, folded, None, r);
    folded[folded.len() - 1].clone()
}

/// Sends the folded tables `f_1, ..., f_{m-1}` (the last table, a constant, is
/// the claim itself) and returns their handles.
pub fn gemini_send<F: Field>(session: &mut Session<F>, tables: &[EvaluationTable<F>], full: bool) -> Vec<Oracle<F>> {
    let count = if full { tables.len().saturating_sub(1) } else { tables.len() };
    tables[..count]
        .iter()
        .map(|t| session.send_oracle(t.clone(), t.len() - 1))
        .collect()
}

/// `(alpha, beta)` such that adding `alpha + beta x` to `f_{m-1}` shifts the
/// final value by `eps` while the check one level up passes only at `r = +-a`.
fn lie_line<F: Field>(z_last: F, eps: F) -> Option<(F, F)> {
    if eps.is_zero() {
        return None;
    }
    let a2 = (2..F::MODULUS.min(1 << 16))
        .map(|a| F::from_u64(a).square())
        .find(|&a2| a2 != z_last)?;
    let beta = eps / (z_last - a2);
    Some((eps - z_last * beta, beta))
}

/// Perturbs `f_{m-1}` (the last sent fold, a table of size 2) so that the
/// final check accepts a claim off by `eps`.
pub fn plant_gemini_lie<F: Field>(tables: &mut [EvaluationTable<F>], z_last: F, eps: F) {
    if tables.len() < 2 {
        return;
    }
    let Some((alpha, beta)) = lie_line(z_last, eps) else {
        return;
    };
    let target = &mut tables[tables.len() - 2];
    debug_assert_eq!(target.len(), 2);
    let gen = target.generator();
    let v = target.values();
    let values = vec![v[0] + alpha + beta, v[1] + alpha - beta];
    *target = EvaluationTable::from_parts(values, gen);
}

/// Standalone run proving `mlin[f](z) = claim` for an input oracle `f`.
pub fn gemini_run<F: Field>(session: &mut Session<F>, f: &Polynomial<F>, z: &[F], claim: F) -> Result<()> {
    let mut proof = session.prover_work(|ops| {
        ops.add(f.len() as u64 * 2);
        gemini_prove(f, z)
    })?;
    if let (Some(last), Some((alpha, beta))) = (proof.folded.last_mut(), lie_line(z[z.len() - 1], claim - proof.constant)) {
        *last = &*last + &Polynomial::new(vec![alpha, beta]);
    }
    let bound = (1usize << z.len()) - 1;
    let f0 = session.input_oracle(f.clone(), bound);
    let folded: Vec<Oracle<F>> = proof
        .folded
        .iter()
        .enumerate()
        .map(|(i, p)| session.send_oracle(p.clone(), (1usize << (z.len() - i - 1)) - 1))
        .collect();
    session.count_round();
    gemini_verify(session, &f0, z, claim, &folded);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Goldilocks, F17};
    use crate::poly::{mlin_eval, ntt_forward, ntt_inverse};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f17(v: u64) -> F17 {
        F17::from_u64(v)
    }

    fn sample() -> Polynomial<F17> {
        Polynomial::from_u64s(&[11, 10, 8, 6])
    }

    #[test]
    fn small_example() {
        let proof = gemini_prove(&sample(), &[f17(2), f17(3)]).unwrap();
        assert_eq!(proof.folded, vec![Polynomial::from_u64s(&[14, 3])]);
        assert_eq!(proof.constant, f17(6));
        assert_eq!(mlin_eval(&sample(), &[f17(2), f17(3)]).unwrap(), f17(6));
    }

    #[test]
    fn zero_point_and_base_case() {
        let proof = gemini_prove(&sample(), &[F17::ZERO, F17::ZERO]).unwrap();
        assert_eq!(proof.folded, vec![Polynomial::from_u64s(&[11, 8])]);
        assert_eq!(proof.constant, f17(11));
        let lin = Polynomial::from_u64s(&[4, 5]);
        let proof = gemini_prove(&lin, &[f17(3)]).unwrap();
        assert!(proof.folded.is_empty());
        assert_eq!(proof.constant, f17(19 % 17));
    }

    #[test]
    fn verifier_on_small_example() {
        for seed in 0..20 {
            let mut s = Session::new(seed);
            gemini_run(&mut s, &sample(), &[f17(2), f17(3)], f17(6)).unwrap();
            assert!(!s.is_rejected());
            assert_eq!(s.metrics().oracles, 1);
            // a false claim survives only when r = +-2
            let mut s = Session::new(seed);
            gemini_run(&mut s, &sample(), &[f17(2), f17(3)], f17(7)).unwrap();
            let r = s.transcript().challenges().next().unwrap();
            if r.square() == f17(4) {
                assert!(!s.is_rejected());
            } else {
                assert_eq!(s.failure(), Some(Rejection::Gemini { level: 1 }));
            }
        }
    }

    #[test]
    fn query_count_and_final_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for m in 1..=10usize {
            for _ in 0..10 {
                let f: Polynomial<Goldilocks> = Polynomial::random(&mut rng, 1 << m);
                let z: Vec<Goldilocks> = (0..m).map(|_| Goldilocks::random(&mut rng)).collect();
                let proof = gemini_prove(&f, &z).unwrap();
                let s_true = mlin_eval(&f, &z).unwrap();
                assert_eq!(proof.constant, s_true);
                let mut s = Session::new(m as u64);
                gemini_run(&mut s, &f, &z, s_true).unwrap();
                assert!(!s.is_rejected());
                assert_eq!(s.metrics().queries, 3 * m as u64 - 1);
                assert_eq!(s.metrics().oracles, m as u64 - 1);
            }
        }
    }

    #[test]
    fn value_fold_matches_coefficient_fold() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..=8u32 {
            let f: Polynomial<Goldilocks> = Polynomial::random(&mut rng, 1 << m);
            let z: Vec<Goldilocks> = (0..m).map(|_| Goldilocks::random(&mut rng)).collect();
            let w = Goldilocks::primitive_root_of_unity(m).unwrap();
            let t = ntt_forward(&f, m, w).unwrap();
            let mut ops = OpCounter::default();
            let tables = gemini_fold_tables(&t, &z, &mut ops).unwrap();
            let proof = gemini_prove(&f, &z).unwrap();
            for (tab, p) in tables.iter().zip(&proof.folded) {
                assert_eq!(&ntt_inverse(tab), p);
            }
            assert_eq!(tables.last().unwrap().values(), &[proof.constant]);
        }
    }

    #[test]
    fn multilinear_reading_splits_on_first_variable() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for m in 1..=8usize {
            let f: Polynomial<Goldilocks> = Polynomial::random(&mut rng, 1 << m);
            let x: Vec<Goldilocks> = (0..m).map(|_| Goldilocks::random(&mut rng)).collect();
            let (ev, od) = even_odd_split(&f);
            let lhs = mlin_eval(&f, &x).unwrap();
            let rhs = mlin_eval(&ev, &x[1..]).unwrap() + x[0] * mlin_eval(&od, &x[1..]).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
