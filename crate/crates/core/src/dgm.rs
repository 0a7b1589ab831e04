//! Reduction of a domain identity `g(f_1, ..., f_q) mod (x^n - 1) = h` to an
//! identity on the halved domain, with the degree-corrected recombination of
//! `h` from shifted parts.
//!
//! Per step the prover sends, for `j in 0..=d`, the parts
//! `h'_j = g_j(f_ev, f_od) mod (x^(n/2) - 1)`, their shifts
//! `h_j = x^(j/2) h'_j mod (x^(n/2) - 1)`, reverse-coefficient companions `c_j`
//! and the wrapped coefficients `q_j` in the clear.

use crate::aurora::{compose_coefficients, identity_tail_prove, identity_tail_verify, quotient_bound, shift_for_gap};
use crate::batch::{combine, combine_tables, send_claims};
use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::field::{powers, Field};
use crate::gemini::{gemini_fold_tables, gemini_send, gemini_verify, gemini_verify_partial, plant_gemini_lie};
use crate::piop::{ChallengeDomain, DgmFamily, OpCounter, Oracle, OracleData, Rejection, Session};
use crate::poly::{ntt_forward, ntt_inverse, EvaluationTable, Polynomial};

/// One step's prover message, as tables over the halved domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgmRoundMessage<F: Field> {
    pub h_prime: Vec<EvaluationTable<F>>,
    pub h: Vec<EvaluationTable<F>>,
    pub c: Vec<EvaluationTable<F>>,
    pub q: Vec<Vec<F>>,
}

/// Shift exponent of part `j` on a halved domain of size `half`.
pub fn shift_exponent(j: usize, half: usize) -> usize {
    (j / 2) % half
}

/// Even and odd parts of the inputs as tables over the halved domain.
pub fn even_odd_tables<F: Field>(
    tables: &[EvaluationTable<F>],
    ops: &mut OpCounter,
) -> (Vec<EvaluationTable<F>>, Vec<EvaluationTable<F>>) {
    let n = tables[0].len();
    let half = n / 2;
    let gen = tables[0].generator();
    let inv = gen.inverse().expect("root of unity is a unit");
    let two_inv = F::half();
    let mut evs = Vec::with_capacity(tables.len());
    let mut ods = Vec::with_capacity(tables.len());
    for t in tables {
        let v = t.values();
        let mut ev = Vec::with_capacity(half);
        let mut od = Vec::with_capacity(half);
        let mut x_inv = F::ONE;
        for i in 0..half {
            let (a, b) = (v[i], v[i + half]);
            ev.push((a + b) * two_inv);
            od.push((a - b) * two_inv * x_inv);
            x_inv *= inv;
        }
        ops.add(6 * half as u64);
        evs.push(EvaluationTable::from_parts(ev, gen.square()));
        ods.push(EvaluationTable::from_parts(od, gen.square()));
    }
    (evs, ods)
}

/// Builds the step message from the input tables over a domain of size `n >= 2`.
pub fn dgm_message<F: Field>(
    tables: &[EvaluationTable<F>],
    g: &Constraint<F>,
    ops: &mut OpCounter,
) -> Result<(DgmRoundMessage<F>, Vec<EvaluationTable<F>>, Vec<EvaluationTable<F>>)> {
    let n = tables[0].len();
    if n < 2 {
        return Err(Error::InvalidConfig("identity step needs a domain of size at least 2".into()));
    }
    let half = n / 2;
    let d = g.degree();
    let q = tables.len();
    let (evs, ods) = even_odd_tables(tables, ops);
    let u = evs[0].generator();

    let mut parts = vec![vec![F::ZERO; half]; d + 1];
    let mut a = vec![F::ZERO; q];
    let mut b = vec![F::ZERO; q];
    let mut scratch = vec![F::ZERO; q];
    let mut samples = vec![F::ZERO; d + 1];
    let mut out = vec![F::ZERO; d + 1];
    for i in 0..half {
        for k in 0..q {
            a[k] = evs[k].values()[i];
            b[k] = ods[k].values()[i];
        }
        g.line_components_into(&a, &b, &mut scratch, &mut samples, &mut out);
        for j in 0..=d {
            parts[j][i] = out[j];
        }
    }
    ops.add(half as u64 * g.line_cost());

    let points = powers(u, half);
    let half_inv = F::from_u64(half as u64).inverse().expect("half < p");
    let mut msg = DgmRoundMessage {
        h_prime: Vec::with_capacity(d + 1),
        h: Vec::with_capacity(d + 1),
        c: Vec::with_capacity(d + 1),
        q: Vec::with_capacity(d + 1),
    };
    for (j, hp) in parts.into_iter().enumerate() {
        let e = shift_exponent(j, half);
        let h: Vec<F> = if e == 0 {
            hp.clone()
        } else {
            (0..half).map(|i| points[(i * e) % half] * hp[i]).collect()
        };
        // c_j(u^i) = u^(-i) h_j(u^(-i))
        let c: Vec<F> = (0..half)
            .map(|i| {
                let k = (half - i) % half;
                points[k] * h[k]
            })
            .collect();
        // lowest e coefficients of h_j: h_j[l] = (1/half) sum_i u^(-il) h_j(u^i)
        let qj: Vec<F> = (0..e)
            .map(|l| {
                let acc: F = (0..half).map(|i| points[(half - (i * l) % half) % half] * h[i]).sum();
                acc * half_inv
            })
            .collect();
        ops.add(3 * half as u64 + 2 * (e * half) as u64);
        msg.h_prime.push(EvaluationTable::from_parts(hp, u));
        msg.h.push(EvaluationTable::from_parts(h, u));
        msg.c.push(EvaluationTable::from_parts(c, u));
        msg.q.push(qj);
    }
    Ok((msg, evs, ods))
}

/// Carries a constant offset `o` between the claimed and the true target: the
/// shift is absorbed into `h_0` and `h'_0`, which keeps every step check
/// satisfied and moves the lie into the final claim.
pub fn plant_constant_shift<F: Field>(msg: &mut DgmRoundMessage<F>, offset: F) {
    if offset.is_zero() {
        return;
    }
    let shift = |t: &EvaluationTable<F>, f: &dyn Fn(usize) -> F| {
        let values = t.values().iter().enumerate().map(|(i, &v)| v + f(i)).collect();
        EvaluationTable::from_parts(values, t.generator())
    };
    msg.h[0] = shift(&msg.h[0], &|_| offset);
    msg.h_prime[0] = shift(&msg.h_prime[0], &|_| offset);
    let half = msg.c[0].len();
    let pts = powers(msg.c[0].generator(), half);
    msg.c[0] = shift(&msg.c[0], &|i| offset * pts[(half - i) % half]);
}

/// Verifier handles for one step.
#[derive(Clone, Debug)]
pub struct DgmRoundOracles<F: Field> {
    pub h_prime: Vec<Oracle<F>>,
    pub h: Vec<Oracle<F>>,
    pub c: Vec<Oracle<F>>,
    pub q: Vec<Vec<F>>,
}

pub fn dgm_send<F: Field>(session: &mut Session<F>, msg: &DgmRoundMessage<F>) -> DgmRoundOracles<F> {
    let family = |ts: &[EvaluationTable<F>]| -> Vec<(OracleData<F>, usize)> {
        ts.iter().map(|t| (OracleData::Table(t.clone()), t.len() - 1)).collect()
    };
    let h_prime = session.send_family(family(&msg.h_prime));
    let h = session.send_family(family(&msg.h));
    let c = session.send_family(family(&msg.c));
    let flat: Vec<F> = msg.q.iter().flatten().copied().collect();
    let received = session.send_scalars(&flat);
    let mut q = Vec::with_capacity(msg.q.len());
    let mut pos = 0;
    for qj in &msg.q {
        q.push(received[pos..pos + qj.len()].to_vec());
        pos += qj.len();
    }
    DgmRoundOracles { h_prime, h, c, q }
}

/// What a step checks `h` against.
#[derive(Clone, Debug)]
pub enum DgmTarget<F: Field> {
    /// A (possibly virtual) oracle for `h`.
    Oracle(Oracle<F>),
    /// No oracle: `h` is the recombination of the sent parts, and its constant
    /// term must equal `sum / n`.
    Sum { sum: F, n: usize },
}

/// Step checks at the nonzero point `rho`.
pub fn dgm_step_verify<F: Field>(
    session: &mut Session<F>,
    step: usize,
    target: &DgmTarget<F>,
    sent: &DgmRoundOracles<F>,
    half: usize,
    rho: F,
) {
    let d1 = sent.h.len();
    let rho_inv = rho.inverse().expect("nonzero challenge");
    let rho_top = rho.pow(half as u64 - 1);
    for j in 0..d1 {
        let c = session.query(&sent.c[j], rho);
        let rev = session.query(&sent.h[j], rho_inv);
        session.check(
            c == rho_top * rev,
            Rejection::Dgm {
                step,
                family: DgmFamily::Degree,
                j,
            },
        );
    }
    match target {
        DgmTarget::Oracle(h) => {
            let lhs = session.query(h, rho);
            let rho2 = rho.square();
            let mut rhs = F::ZERO;
            for j in 0..d1 {
                let v = session.query(&sent.h[j], rho2);
                rhs += if j % 2 == 0 { v } else { rho * v };
            }
            session.check(
                lhs == rhs,
                Rejection::Dgm {
                    step,
                    family: DgmFamily::Recombine,
                    j: 0,
                },
            );
        }
        DgmTarget::Sum { sum, n } => {
            let n_inv = F::from_u64(*n as u64).inverse().expect("n < p");
            let mut constant = F::ZERO;
            for j in (0..d1).step_by(2) {
                constant += session.query(&sent.h[j], F::ZERO);
            }
            session.check(constant == *sum * n_inv, Rejection::DgmConstant);
        }
    }
    let wrap = rho.pow(half as u64) - F::ONE;
    for j in 0..d1 {
        let e = shift_exponent(j, half);
        let hp = session.query(&sent.h_prime[j], rho);
        let h = session.query(&sent.h[j], rho);
        let qv = sent.q[j].iter().rev().fold(F::ZERO, |acc, &c| acc * rho + c);
        session.check(
            rho.pow(e as u64) * hp == h + qv * wrap,
            Rejection::Dgm {
                step,
                family: DgmFamily::Shift,
                j,
            },
        );
    }
}

/// State after some steps.
#[derive(Clone, Debug)]
pub struct DgmOutcome<F: Field> {
    pub challenges: Vec<F>,
    /// Virtual oracle for the current target `h'`.
    pub target: Oracle<F>,
    /// Prover's folded inputs over the current domain.
    pub tables: Vec<EvaluationTable<F>>,
    /// Prover's table of the current target.
    pub target_values: Vec<F>,
    /// Last check point.
    pub last_point: F,
}

/// Runs `steps` reduction steps. `offset` is a constant the prover adds to
/// every target to carry a false claim.
pub fn dgm_run<F: Field>(
    session: &mut Session<F>,
    tables: Vec<EvaluationTable<F>>,
    g: &Constraint<F>,
    target: DgmTarget<F>,
    steps: usize,
    offset: F,
) -> Result<DgmOutcome<F>> {
    let mut tables = tables;
    let mut target = target;
    let mut challenges = Vec::with_capacity(steps);
    let mut target_values = Vec::new();
    let mut last_point = F::ZERO;
    for step in 0..steps {
        let half = tables[0].len() / 2;
        let (mut msg, evs, ods) = session.prover_work(|ops| dgm_message(&tables, g, ops))?;
        plant_constant_shift(&mut msg, offset);
        let sent = dgm_send(session, &msg);
        session.count_round();
        let rho = session.challenge(ChallengeDomain::Nonzero);
        let r = session.challenge(ChallengeDomain::Full);
        dgm_step_verify(session, step, &target, &sent, half, rho);
        last_point = rho;
        target = DgmTarget::Oracle(Oracle::powers_combination(&sent.h_prime, r));
        challenges.push(r);
        let (next, values) = session.prover_work(|ops| {
            let next: Vec<EvaluationTable<F>> = evs
                .iter()
                .zip(&ods)
                .map(|(e, o)| {
                    let v = e.values().iter().zip(o.values()).map(|(&a, &b)| a + r * b).collect();
                    EvaluationTable::from_parts(v, e.generator())
                })
                .collect();
            let parts: Vec<Vec<F>> = msg.h_prime.iter().map(|t| t.values().to_vec()).collect();
            let values = combine_tables(&parts, r, ops);
            ops.add(2 * (half * evs.len()) as u64);
            (next, values)
        });
        tables = next;
        target_values = values;
    }
    let target = match target {
        DgmTarget::Oracle(o) => o,
        DgmTarget::Sum { .. } => return Err(Error::InvalidConfig("at least one step is required".into())),
    };
    Ok(DgmOutcome {
        challenges,
        target,
        tables,
        target_values,
        last_point,
    })
}

fn input_tables<F: Field>(tables: &[Vec<F>]) -> Result<Vec<EvaluationTable<F>>> {
    tables.iter().map(|t| EvaluationTable::over_subgroup(t.clone())).collect()
}

/// Sum claim over the whole domain through `m` identity steps, batched claims
/// and folding on the batched input. `claim - true sum` is carried as a lie.
pub fn dgm_sumcheck<F: Field>(session: &mut Session<F>, tables: &[Vec<F>], g: &Constraint<F>, claim: F) -> Result<()> {
    crate::lfkn::validate_tables(tables, g)?;
    let n = tables[0].len();
    let m = n.trailing_zeros() as usize;
    if m == 0 {
        return Err(Error::InvalidConfig("need a domain of size at least 2".into()));
    }
    let evals = input_tables(tables)?;
    let inputs: Vec<Oracle<F>> = evals.iter().map(|t| session.input_oracle(t.clone(), n - 1)).collect();
    let truth = crate::lfkn::brute_force_sum(tables, g);
    let offset = (claim - truth) * F::from_u64(n as u64).inverse().expect("n < p");
    let out = dgm_run(session, evals.clone(), g, DgmTarget::Sum { sum: claim, n }, m, offset)?;

    let honest: Vec<F> = out.tables.iter().map(|t| t.values()[0]).collect();
    let final_value = session.query(&out.target, out.last_point);
    let batch = send_claims(session, g, &honest, final_value, !offset.is_zero());
    let combined = session.prover_work(|ops| combine_tables(tables, batch.t, ops));
    let combined = EvaluationTable::from_parts(combined, evals[0].generator());
    let mut folds = session.prover_work(|ops| gemini_fold_tables(&combined, &out.challenges, ops))?;
    plant_gemini_lie(&mut folds, out.challenges[m - 1], batch.combined - combine(&honest, batch.t));
    let folded = gemini_send(session, &folds, true);
    session.count_round();
    let f_star = Oracle::powers_combination(&inputs, batch.t);
    gemini_verify(session, &f_star, &out.challenges, batch.combined, &folded);
    Ok(())
}

/// `ceil(log2 m)` identity steps, then the folded inputs, partial folding of
/// the batched input and a single-round identity check on the residual claim.
pub fn dgm_early_stop<F: Field>(session: &mut Session<F>, tables: &[Vec<F>], g: &Constraint<F>, claim: F) -> Result<()> {
    crate::lfkn::validate_tables(tables, g)?;
    let n = tables[0].len();
    let m = n.trailing_zeros();
    if m < 2 {
        return Err(Error::InvalidConfig("round reduction needs at least two variables".into()));
    }
    let k = crate::adaptor::early_stop_rounds(m) as usize;
    let evals = input_tables(tables)?;
    let inputs: Vec<Oracle<F>> = evals.iter().map(|t| session.input_oracle(t.clone(), n - 1)).collect();
    let truth = crate::lfkn::brute_force_sum(tables, g);
    let offset = (claim - truth) * F::from_u64(n as u64).inverse().expect("n < p");
    let out = dgm_run(session, evals.clone(), g, DgmTarget::Sum { sum: claim, n }, k, offset)?;
    let size = out.tables[0].len();

    let partial: Vec<Oracle<F>> = out.tables.iter().map(|t| session.send_oracle(t.clone(), size - 1)).collect();
    let t = session.challenge(ChallengeDomain::Full);

    let combined = session.prover_work(|ops| combine_tables(tables, t, ops));
    let combined = EvaluationTable::from_parts(combined, evals[0].generator());
    let folds = session.prover_work(|ops| gemini_fold_tables(&combined, &out.challenges, ops))?;
    let honest_target: Vec<F> = out.target_values.iter().map(|&v| v - offset).collect();
    let target_table = EvaluationTable::from_parts(honest_target, out.tables[0].generator());
    let quot = session.prover_work(|ops| identity_tail_prove(&out.tables, &target_table, g, ops))?;
    let quot = shift_for_gap(&quot, size, offset);
    let folded = gemini_send(session, &folds, false);
    let q_oracle = session.send_oracle(quot, quotient_bound(size, g.degree()));
    session.count_round();

    let f_star = Oracle::powers_combination(&inputs, t);
    let last = gemini_verify_partial(session, &f_star, &out.challenges, &folded);
    let rho = session.challenge(ChallengeDomain::Nonzero);
    let lhs = session.query(&last, rho);
    let rhs = session.query(&Oracle::powers_combination(&partial, t), rho);
    session.check(lhs == rhs, Rejection::BatchLink);
    identity_tail_verify(session, &partial, &out.target, &q_oracle, size, g, rho);
    Ok(())
}

/// Result of comparing the uncorrected and corrected recombination checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlawReport<F: Field> {
    /// `sum_j x^j h'_j(x^2)`
    pub flawed: Polynomial<F>,
    /// `sum_l h_{2l}(x^2) + x h_{2l+1}(x^2)`
    pub corrected: Polynomial<F>,
    /// `g(f) mod (x^n - 1)`
    pub target: Polynomial<F>,
}

impl<F: Field> FlawReport<F> {
    /// Fraction of `points` where the uncorrected check fails.
    pub fn flawed_mismatch_rate(&self, points: &[F]) -> f64 {
        let bad = points
            .iter()
            .filter(|&&x| self.flawed.evaluate(x) != self.target.evaluate(x))
            .count();
        bad as f64 / points.len().max(1) as f64
    }

    pub fn corrected_mismatch_rate(&self, points: &[F]) -> f64 {
        let bad = points
            .iter()
            .filter(|&&x| self.corrected.evaluate(x) != self.target.evaluate(x))
            .count();
        bad as f64 / points.len().max(1) as f64
    }
}

/// Both recombinations for honest parts of `g(f_1, ..., f_q)` on the domain
/// of size `2^m`, in coefficient form.
pub fn dgm_flaw_demo<F: Field>(fs: &[Polynomial<F>], m: u32, g: &Constraint<F>) -> Result<FlawReport<F>> {
    let w = F::primitive_root_of_unity(m)?;
    let tables: Vec<EvaluationTable<F>> = fs.iter().map(|f| ntt_forward(f, m, w)).collect::<Result<_>>()?;
    let mut ops = OpCounter::default();
    let (msg, _, _) = dgm_message(&tables, g, &mut ops)?;
    let p = compose_coefficients(&tables, g, &mut ops)?;
    let target = crate::poly::rem_cyclic(&p, 1 << m, F::ONE);
    let mut flawed = Polynomial::zero();
    let mut corrected = Polynomial::zero();
    for (j, (hp, h)) in msg.h_prime.iter().zip(&msg.h).enumerate() {
        flawed = &flawed + &ntt_inverse(hp).compose_power(2).shift(j);
        corrected = &corrected + &ntt_inverse(h).compose_power(2).shift(j % 2);
    }
    Ok(FlawReport {
        flawed,
        corrected,
        target,
    })
}
