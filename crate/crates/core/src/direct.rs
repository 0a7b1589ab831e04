//! Sumcheck over a root-of-unity domain run directly on the value tables, one
//! radix-`2^t` digit of the evaluation index per round, and the adaptors that
//! discharge its final claim.

use crate::adaptor::{adaptor_prove, adaptor_send, adaptor_verify, input_oracles, plant_final_shift};
use crate::adversary::PlantedLie;
use crate::batch::{combine, combine_tables, send_claims};
use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::field::{powers, Field};
use crate::gemini::{gemini_fold_tables, gemini_send, gemini_verify, plant_gemini_lie};
use crate::lfkn::validate_tables;
use crate::piop::{ChallengeDomain, OpCounter, Oracle, Rejection, Session};
use crate::poly::{div_rem_cyclic, interpolate_integer_nodes, kappa_eval, mlin_eval, ntt_inverse, EvaluationTable, Polynomial};

/// Digit sizes `t_1, ..., t_c` of the mixed-radix index split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaSchedule {
    parts: Vec<u32>,
}

impl KappaSchedule {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidConfig("schedule entries must be positive".into()));
        }
        Ok(Self { parts })
    }

    /// All ones: the binary schedule.
    pub fn binary(m: u32) -> Self {
        Self {
            parts: vec![1; m.max(1) as usize],
        }
    }

    /// Parses `1,2,3` or `sqrt` / `binary` for `m` variables.
    pub fn parse(text: &str, m: u32) -> Result<Self> {
        match text.trim() {
            "sqrt" => Ok(sqrt_schedule(m)),
            "binary" => Ok(Self::binary(m)),
            list => {
                let parts = list
                    .split(',')
                    .map(|s| s.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::InvalidConfig(format!("bad schedule {list:?}: {e}")))?;
                Self::new(parts)
            }
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn covered(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// `b_1 = 1, b_(j+1) = b_j 2^(t_j)`.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.parts.len());
        let mut b = 1usize;
        for &t in &self.parts {
            out.push(b);
            b = b.checked_shl(t).unwrap_or(usize::MAX);
        }
        out
    }

    /// The digit sizes actually used for `m` variables: the last one may be
    /// cut short, and entries past the coverage are dropped.
    pub fn steps(&self, m: u32) -> Result<Vec<u32>> {
        if self.covered() < m {
            return Err(Error::ScheduleTooShort {
                covered: self.covered(),
                needed: m,
            });
        }
        let mut left = m;
        let mut out = Vec::new();
        for &t in &self.parts {
            if left == 0 {
                break;
            }
            out.push(t.min(left));
            left -= t.min(left);
        }
        Ok(out)
    }

    /// `sum_j 2^(t_j - (t_1 + ... + t_(j-1)))`: prover work relative to `2^m`.
    pub fn convergence_sum(&self) -> f64 {
        let mut before = 0i64;
        let mut total = 0.0;
        for &t in &self.parts {
            total += 2f64.powi((t as i64 - before) as i32);
            before += t as i64;
        }
        total
    }
}

/// `t_j = j` for `j = 1..=c` with the smallest `c` such that `c (c + 1) / 2 >= m`.
pub fn sqrt_schedule(m: u32) -> KappaSchedule {
    let m = m.max(1);
    let mut c = 1u32;
    while c * (c + 1) / 2 < m {
        c += 1;
    }
    KappaSchedule {
        parts: (1..=c).collect(),
    }
}

/// Prover state: value tables over the current domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectState<F: Field> {
    pub tables: Vec<Vec<F>>,
    pub challenges: Vec<F>,
    pub claim: F,
}

impl<F: Field> DirectState<F> {
    pub fn new(tables: Vec<Vec<F>>, g: &Constraint<F>, claim: F) -> Result<Self> {
        validate_tables(&tables, g)?;
        Ok(Self {
            tables,
            challenges: Vec::new(),
            claim,
        })
    }

    pub fn log_size(&self) -> u32 {
        self.tables[0].len().trailing_zeros()
    }
}

/// Values at `y = 0..=d` of `sum_i g(..., ((1 + y) a_i + (1 - y) b_i) / 2, ...)`
/// with `a_i, b_i` the values at `w^i` and `-w^i`.
pub fn direct_round_evaluations<F: Field>(tables: &[Vec<F>], g: &Constraint<F>, ops: &mut OpCounter) -> Vec<F> {
    let q = tables.len();
    let d = g.degree();
    let half = tables[0].len() / 2;
    let h = F::half();
    let mut acc = vec![F::ZERO; d + 1];
    let mut cur = vec![F::ZERO; q];
    let mut step = vec![F::ZERO; q];
    for i in 0..half {
        for k in 0..q {
            let (a, b) = (tables[k][i], tables[k][i + half]);
            cur[k] = (a + b) * h;
            step[k] = (a - b) * h;
        }
        for (y, s) in acc.iter_mut().enumerate() {
            if y > 0 {
                for k in 0..q {
                    cur[k] += step[k];
                }
            }
            *s += g.apply(&cur);
        }
    }
    ops.add(half as u64 * (5 * q as u64 + (d as u64 + 1) * (q as u64 + g.eval_cost() + 1)));
    acc
}

/// Lagrange basis on the `2^t`-th roots of unity, evaluated at `y`.
fn root_lagrange_weights<F: Field>(t: u32, y: F) -> Result<Vec<F>> {
    let size = 1usize << t;
    let nodes = powers(F::primitive_root_of_unity(t)?, size);
    if let Some(j) = nodes.iter().position(|&z| z == y) {
        let mut out = vec![F::ZERO; size];
        out[j] = F::ONE;
        return Ok(out);
    }
    // L_j(y) = z_j (y^T - 1) / (T (y - z_j))
    let vanish = y.pow(size as u64) - F::ONE;
    let scale = vanish * F::from_u64(size as u64).inverse().expect("size < p");
    Ok(nodes
        .iter()
        .map(|&z| z * scale * (y - z).inverse().expect("y is not a node"))
        .collect())
}

/// Values at `y = 0..=d (2^t - 1)` of the round polynomial for a digit of `t`
/// bits: the values at `y w^i` are interpolated from the `2^t` positions
/// `i + j n / 2^t` through precomputed Lagrange weights.
pub fn kappa_round_evaluations<F: Field>(tables: &[Vec<F>], g: &Constraint<F>, t: u32, ops: &mut OpCounter) -> Result<Vec<F>> {
    let q = tables.len();
    let n = tables[0].len();
    let size = 1usize << t;
    if size > n {
        return Err(Error::InvalidConfig(format!("digit of {t} bits exceeds a domain of size {n}")));
    }
    let degree = g.degree() * (size - 1);
    if degree as u64 + 1 > F::MODULUS {
        return Err(Error::InvalidConfig(format!(
            "round polynomial of degree {degree} needs more nodes than the field has"
        )));
    }
    let stride = n / size;
    let weights: Vec<Vec<F>> = (0..=degree)
        .map(|y| root_lagrange_weights(t, F::from_u64(y as u64)))
        .collect::<Result<_>>()?;
    let mut acc = vec![F::ZERO; degree + 1];
    let mut args = vec![F::ZERO; q];
    for i in 0..stride {
        for (s, wy) in acc.iter_mut().zip(&weights) {
            for k in 0..q {
                args[k] = (0..size).map(|j| wy[j] * tables[k][i + j * stride]).sum();
            }
            *s += g.apply(&args);
        }
    }
    ops.add((size * (degree + 1)) as u64 + stride as u64 * (degree as u64 + 1) * (2 * (q * size) as u64 + g.eval_cost() + 1));
    Ok(acc)
}

/// Binds the top digit of `t` bits to `r`.
pub fn kappa_fold<F: Field>(tables: &mut [Vec<F>], t: u32, r: F, ops: &mut OpCounter) -> Result<()> {
    let size = 1usize << t;
    let weights = root_lagrange_weights(t, r)?;
    for tab in tables.iter_mut() {
        let stride = tab.len() / size;
        let folded: Vec<F> = if t == 1 {
            let h = F::half();
            let (p, m) = ((F::ONE + r) * h, (F::ONE - r) * h);
            (0..stride).map(|i| p * tab[i] + m * tab[i + stride]).collect()
        } else {
            (0..stride)
                .map(|i| (0..size).map(|j| weights[j] * tab[i + j * stride]).sum())
                .collect()
        };
        *tab = folded;
        ops.add(2 * (size * stride) as u64);
    }
    Ok(())
}

/// One binary round outside any session: round polynomial values at `0..=d`
/// and the state bound at `r`.
pub fn direct_round<F: Field>(state: &DirectState<F>, g: &Constraint<F>, r: F) -> Result<(Vec<F>, DirectState<F>)> {
    if state.tables[0].len() < 2 {
        return Err(Error::InvalidConfig("no variables left".into()));
    }
    let mut ops = OpCounter::default();
    let evals = direct_round_evaluations(&state.tables, g, &mut ops);
    let mut tables = state.tables.clone();
    kappa_fold(&mut tables, 1, r, &mut ops)?;
    let mut challenges = state.challenges.clone();
    challenges.push(r);
    let claim = interpolate_integer_nodes(&evals, r);
    Ok((evals, DirectState { tables, challenges, claim }))
}

/// One round with a digit of `t` bits outside any session.
pub fn kappa_round<F: Field>(state: &DirectState<F>, g: &Constraint<F>, t: u32, r: F) -> Result<(Vec<F>, DirectState<F>)> {
    let mut ops = OpCounter::default();
    let evals = kappa_round_evaluations(&state.tables, g, t, &mut ops)?;
    let mut tables = state.tables.clone();
    kappa_fold(&mut tables, t, r, &mut ops)?;
    let mut challenges = state.challenges.clone();
    challenges.push(r);
    let claim = interpolate_integer_nodes(&evals, r);
    Ok((evals, DirectState { tables, challenges, claim }))
}

/// Verifier-side sum of the round polynomial over the `2^t`-th roots of unity.
fn roots_sum<F: Field>(evals: &[F], t: u32) -> Result<F> {
    let nodes = powers(F::primitive_root_of_unity(t)?, 1 << t);
    Ok(nodes.iter().map(|&z| interpolate_integer_nodes(evals, z)).sum())
}

/// Runs one round per digit in `steps`.
pub fn direct_rounds<F: Field>(
    session: &mut Session<F>,
    state: DirectState<F>,
    g: &Constraint<F>,
    steps: &[u32],
    mut liar: Option<&mut PlantedLie<F>>,
) -> Result<DirectState<F>> {
    let mut state = state;
    let covered: u32 = steps.iter().sum();
    if covered != state.log_size() {
        return Err(Error::ScheduleTooShort {
            covered,
            needed: state.log_size(),
        });
    }
    for (round, &t) in steps.iter().enumerate() {
        let tables = &state.tables;
        let honest = session.prover_work(|ops| {
            if t == 1 {
                Ok(direct_round_evaluations(tables, g, ops))
            } else {
                kappa_round_evaluations(tables, g, t, ops)
            }
        })?;
        let mut evals = honest.clone();
        if let Some(l) = liar.as_deref_mut() {
            let checkpoints = powers(F::primitive_root_of_unity(t)?, 1 << t);
            l.plant(&mut evals, &checkpoints);
        }
        let received = session.send_scalars(&evals);
        session.count_round();
        let sum = roots_sum(&received, t)?;
        session.check(sum == state.claim, Rejection::RoundSum { round });
        let r = session.challenge(ChallengeDomain::Full);
        if let Some(l) = liar.as_deref_mut() {
            l.advance(&honest, &evals, r);
        }
        state.claim = interpolate_integer_nodes(&received, r);
        state.challenges.push(r);
        session.prover_work(|ops| kappa_fold(&mut state.tables, t, r, ops))?;
    }
    Ok(state)
}

fn coefficient_forms<F: Field>(tables: &[Vec<F>]) -> Result<Vec<Polynomial<F>>> {
    tables
        .iter()
        .map(|t| Ok(ntt_inverse(&EvaluationTable::over_subgroup(t.clone())?)))
        .collect()
}

fn lie_offset<F: Field>(liar: &Option<PlantedLie<F>>) -> bool {
    liar.as_ref().is_some_and(|l| !l.offset().is_zero())
}

/// `m` binary rounds, then the claims `mlin[f_i](r)` batched and checked by
/// folding on the batched input.
pub fn direct_gemini<F: Field>(
    session: &mut Session<F>,
    tables: &[Vec<F>],
    g: &Constraint<F>,
    claim: F,
    mut liar: Option<PlantedLie<F>>,
) -> Result<()> {
    let state = DirectState::new(tables.to_vec(), g, claim)?;
    let m = state.log_size();
    if m == 0 {
        return Err(Error::InvalidConfig("need at least one variable".into()));
    }
    let inputs = input_oracles(session, tables)?;
    let steps = vec![1; m as usize];
    let out = direct_rounds(session, state, g, &steps, liar.as_mut())?;
    let coeffs = session.prover_work(|ops| {
        ops.add(tables.len() as u64 * crate::poly::ntt_op_count(tables[0].len()));
        coefficient_forms(tables)
    })?;
    let honest: Vec<F> = coeffs
        .iter()
        .map(|f| mlin_eval(f, &out.challenges))
        .collect::<Result<_>>()?;
    let batch = send_claims(session, g, &honest, out.claim, lie_offset(&liar));
    let combined = session.prover_work(|ops| combine_tables(tables, batch.t, ops));
    let combined = EvaluationTable::over_subgroup(combined)?;
    let mut folds = session.prover_work(|ops| gemini_fold_tables(&combined, &out.challenges, ops))?;
    plant_gemini_lie(&mut folds, out.challenges[m as usize - 1], batch.combined - combine(&honest, batch.t));
    let folded = gemini_send(session, &folds, true);
    session.count_round();
    let f_star = Oracle::powers_combination(&inputs, batch.t);
    gemini_verify(session, &f_star, &out.challenges, batch.combined, &folded);
    Ok(())
}

/// Point at which the folded value tables equal the multilinear extension of
/// the original values: `((1 - r_m) / 2, ..., (1 - r_1) / 2)`.
pub fn value_point<F: Field>(challenges: &[F]) -> Vec<F> {
    let h = F::half();
    challenges.iter().rev().map(|&r| (F::ONE - r) * h).collect()
}

/// `m` binary rounds whose final claims are discharged by the value-domain
/// adaptor at [`value_point`].
pub fn direct_adaptor<F: Field>(
    session: &mut Session<F>,
    tables: &[Vec<F>],
    g: &Constraint<F>,
    claim: F,
    mut liar: Option<PlantedLie<F>>,
) -> Result<()> {
    let state = DirectState::new(tables.to_vec(), g, claim)?;
    let m = state.log_size();
    if m == 0 {
        return Err(Error::InvalidConfig("need at least one variable".into()));
    }
    let inputs = input_oracles(session, tables)?;
    let steps = vec![1; m as usize];
    let out = direct_rounds(session, state, g, &steps, liar.as_mut())?;
    let honest: Vec<F> = out.tables.iter().map(|t| t[0]).collect();
    let batch = send_claims(session, g, &honest, out.claim, lie_offset(&liar));
    let z = value_point(&out.challenges);
    let combined = session.prover_work(|ops| combine_tables(tables, batch.t, ops));
    let mut levels = session.prover_work(|ops| adaptor_prove(&combined, &z, ops))?;
    plant_final_shift(&mut levels, z[m as usize - 1], batch.combined - combine(&honest, batch.t));
    let sent = adaptor_send(session, &levels);
    session.count_round();
    let f_star = Oracle::powers_combination(&inputs, batch.t);
    adaptor_verify(session, &f_star, &z, batch.combined, &sent)?;
    Ok(())
}

/// Quotients `q_1, ..., q_c` with `f = kappa[f](z) + sum_j q_j (x^(b_j) - z_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientProof<F: Field> {
    pub quotients: Vec<Polynomial<F>>,
    pub value: F,
}

/// Divides by `x^(b_c) - z_c` first and recurses on the remainder.
pub fn quotient_prove<F: Field>(f: &Polynomial<F>, steps: &[u32], z: &[F], ops: &mut OpCounter) -> Result<QuotientProof<F>> {
    if steps.len() != z.len() {
        return Err(Error::LengthMismatch {
            expected: steps.len(),
            got: z.len(),
        });
    }
    let offsets = KappaSchedule::new(steps.to_vec())?.offsets();
    let mut rem = f.clone();
    let mut quotients = vec![Polynomial::zero(); steps.len()];
    for j in (0..steps.len()).rev() {
        ops.add(rem.len() as u64 * 2);
        let (q, r) = div_rem_cyclic(&rem, offsets[j], z[j]);
        quotients[j] = q;
        rem = r;
    }
    if rem.len() > 1 {
        return Err(Error::ScheduleTooShort {
            covered: steps.iter().sum(),
            needed: crate::poly::log_len(f.len()),
        });
    }
    Ok(QuotientProof {
        quotients,
        value: rem.coeff(0),
    })
}

/// Degree bound of `q_j` for an input of size `n`.
pub fn quotient_degree_bound(steps: &[u32], j: usize, n: usize) -> usize {
    let offsets = KappaSchedule::new(steps.to_vec()).map(|s| s.offsets()).unwrap_or_default();
    let next = offsets.get(j + 1).copied().unwrap_or(n).min(n);
    (next - 1).saturating_sub(offsets[j])
}

/// Makes the identity hold at a single point when the claim is off by `delta`.
pub fn plant_quotient_lie<F: Field>(proof: &mut QuotientProof<F>, z_first: F, delta: F) {
    if delta.is_zero() {
        return;
    }
    let a = z_first + F::ONE;
    let c = -delta / (a - z_first);
    proof.quotients[0] = &proof.quotients[0] + &Polynomial::constant(c);
}

pub fn quotient_send<F: Field>(session: &mut Session<F>, proof: &QuotientProof<F>, steps: &[u32], n: usize) -> Vec<Oracle<F>> {
    proof
        .quotients
        .iter()
        .enumerate()
        .map(|(j, q)| session.send_oracle(q.clone(), quotient_degree_bound(steps, j, n)))
        .collect()
}

/// Checks the quotient identity at one fresh point: `c + 1` queries.
pub fn quotient_verify<F: Field>(
    session: &mut Session<F>,
    f: &Oracle<F>,
    steps: &[u32],
    z: &[F],
    s: F,
    quotients: &[Oracle<F>],
) -> Result<bool> {
    let offsets = KappaSchedule::new(steps.to_vec())?.offsets();
    let rho = session.challenge(ChallengeDomain::Full);
    let lhs = session.query(f, rho);
    let mut rhs = s;
    for ((q, &b), &zj) in quotients.iter().zip(&offsets).zip(z) {
        rhs += session.query(q, rho) * (rho.pow(b as u64) - zj);
    }
    Ok(session.check(lhs == rhs, Rejection::Quotient))
}

/// Standalone run proving `kappa[f](z) = claim` for an input oracle `f`.
pub fn quotient_adaptor<F: Field>(session: &mut Session<F>, f: &Polynomial<F>, steps: &[u32], z: &[F], claim: F) -> Result<()> {
    let n = f.len().max(1).next_power_of_two();
    let f0 = session.input_oracle(f.clone(), n - 1);
    let mut proof = session.prover_work(|ops| quotient_prove(f, steps, z, ops))?;
    let delta = claim - proof.value;
    plant_quotient_lie(&mut proof, z[0], delta);
    let sent = quotient_send(session, &proof, steps, n);
    session.count_round();
    quotient_verify(session, &f0, steps, z, claim, &sent)?;
    Ok(())
}

/// Rounds along `schedule`, then the claims `kappa[f_i](r)` batched and
/// checked by the quotient adaptor on the batched input.
pub fn direct_kappa<F: Field>(
    session: &mut Session<F>,
    tables: &[Vec<F>],
    g: &Constraint<F>,
    claim: F,
    schedule: &KappaSchedule,
    mut liar: Option<PlantedLie<F>>,
) -> Result<()> {
    let state = DirectState::new(tables.to_vec(), g, claim)?;
    let m = state.log_size();
    if m == 0 {
        return Err(Error::InvalidConfig("need at least one variable".into()));
    }
    let steps = schedule.steps(m)?;
    let inputs = input_oracles(session, tables)?;
    let out = direct_rounds(session, state, g, &steps, liar.as_mut())?;
    let coeffs = session.prover_work(|ops| {
        ops.add(tables.len() as u64 * crate::poly::ntt_op_count(tables[0].len()));
        coefficient_forms(tables)
    })?;
    let honest: Vec<F> = coeffs
        .iter()
        .map(|f| kappa_eval(f, &steps, &out.challenges))
        .collect::<Result<_>>()?;
    let batch = send_claims(session, g, &honest, out.claim, lie_offset(&liar));
    let combined = session.prover_work(|ops| combine_tables(tables, batch.t, ops));
    let combined = ntt_inverse(&EvaluationTable::over_subgroup(combined)?);
    let mut proof = session.prover_work(|ops| {
        ops.add(crate::poly::ntt_op_count(tables[0].len()));
        quotient_prove(&combined, &steps, &out.challenges, ops)
    })?;
    let delta = batch.combined - proof.value;
    plant_quotient_lie(&mut proof, out.challenges[0], delta);
    let sent = quotient_send(session, &proof, &steps, tables[0].len());
    session.count_round();
    let f_star = Oracle::powers_combination(&inputs, batch.t);
    quotient_verify(session, &f_star, &steps, &out.challenges, batch.combined, &sent)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Goldilocks, F17};
    use crate::lfkn::{brute_force_sum, lfkn_run};
    use crate::poly::{mlex_eval, ntt_forward};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f17(v: u64) -> F17 {
        F17::from_u64(v)
    }

    fn sample_values() -> Vec<F17> {
        let f = Polynomial::from_u64s(&[11, 10, 8, 6]);
        ntt_forward(&f, 2, f17(4)).unwrap().into_values()
    }

    fn random_tables<F: Field>(rng: &mut ChaCha8Rng, q: usize, m: u32) -> Vec<Vec<F>> {
        (0..q).map(|_| (0..1usize << m).map(|_| F::random(rng)).collect()).collect()
    }

    #[test]
    fn round_example() {
        let g = Constraint::builtin("identity").unwrap();
        let state = DirectState::new(vec![sample_values()], &g, f17(10)).unwrap();
        let (evals, _) = direct_round(&state, &g, f17(3)).unwrap();
        assert_eq!(evals, vec![f17(5), f17(20)]);
        assert_eq!(interpolate_integer_nodes(&evals, f17(1)) + interpolate_integer_nodes(&evals, -F17::ONE), f17(10));
    }

    #[test]
    fn round_example_rejects_tampered_sum() {
        let g = Constraint::builtin("identity").unwrap();
        let mut sess = Session::new(1);
        let state = DirectState::new(vec![sample_values()], &g, f17(11)).unwrap();
        direct_rounds(&mut sess, state, &g, &[1, 1], None).unwrap();
        assert_eq!(sess.failure(), Some(Rejection::RoundSum { round: 0 }));
    }

    #[test]
    fn first_round_tables_are_partial_evaluations() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let g = Constraint::<Goldilocks>::builtin("identity").unwrap();
        for m in 1..=8u32 {
            let n = 1usize << m;
            let f: Polynomial<Goldilocks> = Polynomial::random(&mut rng, n);
            let w = Goldilocks::primitive_root_of_unity(m).unwrap();
            let v = ntt_forward(&f, m, w).unwrap().into_values();
            let r = Goldilocks::random(&mut rng);
            let state = DirectState::new(vec![v.clone()], &g, Goldilocks::ZERO).unwrap();
            let (_, next) = direct_round(&state, &g, r).unwrap();
            for i in 0..n / 2 {
                let wi = w.pow(i as u64);
                let mut point = vec![r * wi];
                point.extend((1..m).map(|k| wi.pow(1 << k)));
                assert_eq!(next.tables[0][i], mlin_eval(&f, &point).unwrap());
            }
        }
    }

    #[test]
    fn values_are_coefficient_readings_at_root_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for m in 1..=10u32 {
            let n = 1usize << m;
            let f: Polynomial<Goldilocks> = Polynomial::random(&mut rng, n);
            let w = Goldilocks::primitive_root_of_unity(m).unwrap();
            for i in 0..n {
                let wi = w.pow(i as u64);
                let point: Vec<Goldilocks> = (0..m).map(|k| wi.pow(1 << k)).collect();
                assert_eq!(f.evaluate(wi), mlin_eval(&f, &point).unwrap());
            }
        }
    }

    #[test]
    fn kappa_identity_for_random_schedules() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        use rand::Rng;
        for m in 1..=8u32 {
            for _ in 0..5 {
                let mut parts = Vec::new();
                while parts.iter().sum::<u32>() < m {
                    parts.push(rng.gen_range(1..=3));
                }
                let sched = KappaSchedule::new(parts).unwrap();
                let n = 1usize << m;
                let f: Polynomial<Goldilocks> = Polynomial::random(&mut rng, n);
                let w = Goldilocks::primitive_root_of_unity(m).unwrap();
                for i in 0..n {
                    let wi = w.pow(i as u64);
                    let point: Vec<Goldilocks> = sched.offsets().iter().map(|&b| wi.pow(b as u64)).collect();
                    assert_eq!(f.evaluate(wi), kappa_eval(&f, sched.parts(), &point).unwrap());
                }
            }
        }
    }

    #[test]
    fn final_claim_is_value_extension_at_reversed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for m in 1..=8u32 {
            for name in ["identity", "square", "product2"] {
                let g = Constraint::<Goldilocks>::builtin(name).unwrap();
                let tables = random_tables::<Goldilocks>(&mut rng, g.arity(), m);
                let s = brute_force_sum(&tables, &g);
                let mut sess = Session::new(m as u64);
                let state = DirectState::new(tables.clone(), &g, s).unwrap();
                let out = direct_rounds(&mut sess, state, &g, &vec![1; m as usize], None).unwrap();
                assert!(!sess.is_rejected());
                let z = value_point(&out.challenges);
                let values: Vec<Goldilocks> = tables.iter().map(|t| mlex_eval(t, &z).unwrap()).collect();
                assert_eq!(out.claim, g.eval(&values).unwrap());
            }
        }
    }

    #[test]
    fn mirrors_hypercube_rounds_on_reindexed_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let g = Constraint::<Goldilocks>::builtin("identity").unwrap();
        for m in 1..=8u32 {
            let n = 1usize << m;
            let v: Vec<Goldilocks> = (0..n).map(|_| Goldilocks::random(&mut rng)).collect();
            let rev: Vec<Goldilocks> = (0..n).map(|i| v[i.reverse_bits() >> (usize::BITS - m)]).collect();
            let s = brute_force_sum(&[v.clone()], &g);
            let mut a = Session::new(7);
            let out = direct_rounds(&mut a, DirectState::new(vec![v.clone()], &g, s).unwrap(), &g, &vec![1; m as usize], None).unwrap();
            let mut b = Session::new(7);
            let cube = lfkn_run(&mut b, vec![rev.clone()], &g, s, m as usize, None);
            assert_eq!(a.is_rejected(), b.is_rejected());
            // same challenges r; the hypercube run binds x = r, the direct run y = r
            let x: Vec<Goldilocks> = out.challenges.iter().map(|&r| (Goldilocks::ONE - r) * Goldilocks::half()).collect();
            assert_eq!(out.claim, mlex_eval(&rev, &x).unwrap());
            assert_eq!(cube.claim, mlex_eval(&rev, &cube.challenges).unwrap());
        }
    }

    #[test]
    fn binary_kappa_matches_direct_round() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for name in ["identity", "square", "product2", "cube"] {
            let g = Constraint::<Goldilocks>::builtin(name).unwrap();
            let tables = random_tables::<Goldilocks>(&mut rng, g.arity(), 5);
            let mut ops = OpCounter::default();
            assert_eq!(
                kappa_round_evaluations(&tables, &g, 1, &mut ops).unwrap(),
                direct_round_evaluations(&tables, &g, &mut ops)
            );
            let s = brute_force_sum(&tables, &g);
            let run = |sched: &KappaSchedule| {
                let mut sess = Session::new(3);
                direct_kappa(&mut sess, &tables, &g, s, sched, None).unwrap();
                sess.transcript().clone()
            };
            let binary = run(&KappaSchedule::binary(5));
            let mut sess = Session::new(3);
            let state = DirectState::new(tables.clone(), &g, s).unwrap();
            direct_rounds(&mut sess, state, &g, &[1; 5], None).unwrap();
            let rounds = sess.transcript().entries().len();
            assert_eq!(&binary.entries()[..rounds], sess.transcript().entries());
        }
    }

    #[test]
    fn kappa_rounds_on_small_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let g = Constraint::<Goldilocks>::builtin("identity").unwrap();
        let tables = random_tables::<Goldilocks>(&mut rng, 1, 3);
        let s = brute_force_sum(&tables, &g);
        let mut sess = Session::new(9);
        let state = DirectState::new(tables.clone(), &g, s).unwrap();
        let out = direct_rounds(&mut sess, state, &g, &[1, 2], None).unwrap();
        assert!(!sess.is_rejected());
        assert_eq!(sess.metrics().rounds, 2);
        // the folded value is the interpolant of the values over the digit grid
        let w4 = Goldilocks::primitive_root_of_unity(2).unwrap();
        let l1 = root_lagrange_weights(1, out.challenges[0]).unwrap();
        let l2 = root_lagrange_weights(2, out.challenges[1]).unwrap();
        let mut expected = Goldilocks::ZERO;
        for j1 in 0..2 {
            for j2 in 0..4 {
                expected += tables[0][j2 + 4 * j1] * l1[j1] * l2[j2];
            }
        }
        assert_eq!(out.claim, expected);
        // the interpolant through the 4th roots reproduces a cubic
        let p = Polynomial::from_u64s(&[3, 1, 4, 1]);
        let y = Goldilocks::from_u64(12345);
        let w = root_lagrange_weights(2, y).unwrap();
        let got: Goldilocks = (0..4).map(|j| w[j] * p.evaluate(w4.pow(j as u64))).sum();
        assert_eq!(got, p.evaluate(y));
        // and it is not the coefficient reading the claim is checked against
        let f = ntt_inverse(&EvaluationTable::over_subgroup(tables[0].clone()).unwrap());
        assert_ne!(out.claim, kappa_eval(&f, &[1, 2], &out.challenges).unwrap());
    }

    #[test]
    fn schedules() {
        assert_eq!(sqrt_schedule(1).parts(), &[1]);
        assert_eq!(sqrt_schedule(3).parts(), &[1, 2]);
        assert_eq!(sqrt_schedule(10).len(), 4);
        for m in 1..=64u32 {
            let s = sqrt_schedule(m);
            let c = ((0.25 + 2.0 * m as f64).sqrt() - 0.5).ceil() as usize;
            assert_eq!(s.len(), c, "m = {m}");
            assert!(s.covered() >= m);
            assert!(s.convergence_sum() < 5.3);
        }
        assert_eq!(KappaSchedule::parse("1,2,3", 6).unwrap().offsets(), vec![1, 2, 8]);
        assert_eq!(KappaSchedule::parse("sqrt", 10).unwrap().parts(), &[1, 2, 3, 4]);
        assert!(KappaSchedule::parse("1,0", 1).is_err());
        assert_eq!(sqrt_schedule(4).steps(4).unwrap(), vec![1, 2, 1]);
        assert!(KappaSchedule::binary(2).steps(3).is_err());
    }

    #[test]
    fn quotient_examples() {
        let f = Polynomial::from_u64s(&[11, 10]);
        let mut ops = OpCounter::default();
        let proof = quotient_prove(&f, &[1], &[f17(2)], &mut ops).unwrap();
        assert_eq!(proof.value, f17(14));
        assert_eq!(proof.quotients, vec![Polynomial::from_u64s(&[10])]);
        for rho in 0..17 {
            let rho = f17(rho);
            assert_eq!(proof.value + proof.quotients[0].evaluate(rho) * (rho - f17(2)), f.evaluate(rho));
        }
        let c = Polynomial::from_u64s(&[5]);
        let proof = quotient_prove(&c, &[1, 1], &[f17(3), f17(4)], &mut ops).unwrap();
        assert_eq!(proof.value, f17(5));
        assert!(proof.quotients.iter().all(|q| q.is_zero()));
    }

    #[test]
    fn quotient_reconstruction_and_agreement_with_folding() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        use rand::Rng;
        for m in 1..=8u32 {
            for _ in 0..5 {
                let mut parts = Vec::new();
                while parts.iter().sum::<u32>() < m {
                    parts.push(rng.gen_range(1..=3));
                }
                let steps = KappaSchedule::new(parts).unwrap().steps(m).unwrap();
                let f: Polynomial<Goldilocks> = Polynomial::random(&mut rng, 1 << m);
                let z: Vec<Goldilocks> = (0..steps.len()).map(|_| Goldilocks::random(&mut rng)).collect();
                let mut ops = OpCounter::default();
                let proof = quotient_prove(&f, &steps, &z, &mut ops).unwrap();
                assert_eq!(proof.value, kappa_eval(&f, &steps, &z).unwrap());
                let offsets = KappaSchedule::new(steps.clone()).unwrap().offsets();
                let mut rebuilt = Polynomial::constant(proof.value);
                for (j, q) in proof.quotients.iter().enumerate() {
                    let factor = &Polynomial::monomial(Goldilocks::ONE, offsets[j]) - &Polynomial::constant(z[j]);
                    rebuilt = &rebuilt + &(q * &factor);
                    assert!(q.len() <= quotient_degree_bound(&steps, j, 1 << m) + 1);
                }
                assert_eq!(rebuilt, f);
            }
            // binary schedule: same value as folding, and both verifiers agree
            let f: Polynomial<Goldilocks> = Polynomial::random(&mut rng, 1 << m);
            let z: Vec<Goldilocks> = (0..m).map(|_| Goldilocks::random(&mut rng)).collect();
            let s = mlin_eval(&f, &z).unwrap();
            for claim in [s, s + Goldilocks::ONE] {
                let mut a = Session::new(1);
                quotient_adaptor(&mut a, &f, &vec![1; m as usize], &z, claim).unwrap();
                let mut b = Session::new(1);
                crate::gemini::gemini_run(&mut b, &f, &z, claim).unwrap();
                assert_eq!(a.is_rejected(), b.is_rejected());
                assert_eq!(a.is_rejected(), claim != s);
                assert_eq!(a.metrics().oracles, m as u64);
                assert_eq!(a.metrics().queries, m as u64 + 1);
            }
        }
    }

    #[test]
    fn corrected_pipeline_accepts_and_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        for m in 1..=8u32 {
            for name in ["identity", "square", "product2"] {
                let g = Constraint::<Goldilocks>::builtin(name).unwrap();
                let tables = random_tables::<Goldilocks>(&mut rng, g.arity(), m);
                let s = brute_force_sum(&tables, &g);
                let (d, q) = (g.degree() as u64, g.arity() as u64);
                let mut sess = Session::new(m as u64);
                direct_adaptor(&mut sess, &tables, &g, s, None).unwrap();
                assert!(!sess.is_rejected(), "{name} {m}: {:?}", sess.failure());
                assert_eq!(sess.metrics().oracles, 2 * m as u64);
                assert_eq!(sess.metrics().field_elements, (d + 1) * m as u64 + q);
                assert_eq!(sess.metrics().rounds, m as u64 + 1);
                let mut sess = Session::new(m as u64);
                direct_adaptor(&mut sess, &tables, &g, s + Goldilocks::ONE, Some(PlantedLie::new(Goldilocks::ONE, 5))).unwrap();
                assert!(sess.is_rejected());
            }
        }
    }

    #[test]
    fn coefficient_pipelines_count_and_single_variable_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for m in 1..=8u32 {
            let g = Constraint::<Goldilocks>::builtin("square").unwrap();
            let tables = random_tables::<Goldilocks>(&mut rng, 1, m);
            let s = brute_force_sum(&tables, &g);
            let mut sess = Session::new(m as u64);
            direct_gemini(&mut sess, &tables, &g, s, None).unwrap();
            assert_eq!(sess.metrics().oracles, m as u64 - 1);
            assert_eq!(sess.metrics().field_elements, 3 * m as u64 + 1);
            assert_eq!(sess.metrics().rounds, m as u64 + 1);
            // one variable: the folded value is the coefficient reading
            assert_eq!(sess.is_rejected(), m > 1);

            let sched = sqrt_schedule(m);
            let mut sess = Session::new(m as u64);
            direct_kappa(&mut sess, &tables, &g, s, &sched, None).unwrap();
            let c = sched.steps(m).unwrap().len() as u64;
            assert_eq!(sess.metrics().oracles, c);
            assert_eq!(sess.metrics().rounds, c + 1);
            assert_eq!(sess.is_rejected(), c > 1);
        }
    }

    #[test]
    fn prover_work_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let g = Constraint::<Goldilocks>::builtin("product2").unwrap();
        let mut last = 0u64;
        for m in 10..=14u32 {
            let tables = random_tables::<Goldilocks>(&mut rng, 2, m);
            let s = brute_force_sum(&tables, &g);
            let mut sess = Session::new(1);
            direct_adaptor(&mut sess, &tables, &g, s, None).unwrap();
            let ops = sess.metrics().prover_field_ops;
            if last > 0 {
                let ratio = ops as f64 / last as f64;
                assert!((1.8..=2.2).contains(&ratio), "{m}: {ratio}");
            }
            last = ops;
        }
    }
}
