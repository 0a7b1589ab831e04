//! Multivariate sumcheck over the Boolean hypercube, with data given as the
//! value tables of multilinear extensions.

use rayon::prelude::*;

use crate::adversary::PlantedLie;
use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::piop::{ChallengeDomain, OpCounter, Rejection, Session};
use crate::poly::interpolate_integer_nodes;

const PAR_THRESHOLD: usize = 1 << 12;

/// Claim `sum_{b in {0,1}^m} g(v_1[b], ..., v_q[b]) = claim`.
#[derive(Clone, Debug)]
pub struct HypercubeInstance<F: Field> {
    pub tables: Vec<Vec<F>>,
    pub constraint: Constraint<F>,
    pub claim: F,
}

impl<F: Field> HypercubeInstance<F> {
    pub fn new(tables: Vec<Vec<F>>, constraint: Constraint<F>, claim: F) -> Result<Self> {
        validate_tables(&tables, &constraint)?;
        Ok(Self {
            tables,
            constraint,
            claim,
        })
    }

    pub fn num_vars(&self) -> u32 {
        self.tables[0].len().trailing_zeros()
    }

    /// Direct summation of `g` over the cube.
    pub fn brute_force_sum(&self) -> F {
        brute_force_sum(&self.tables, &self.constraint)
    }
}

pub(crate) fn validate_tables<F: Field>(tables: &[Vec<F>], g: &Constraint<F>) -> Result<()> {
    if tables.len() != g.arity() {
        return Err(Error::ArityMismatch {
            expected: g.arity(),
            got: tables.len(),
        });
    }
    let n = tables[0].len();
    if !n.is_power_of_two() {
        return Err(Error::LengthMismatch {
            expected: n.next_power_of_two(),
            got: n,
        });
    }
    for t in tables {
        if t.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: t.len(),
            });
        }
    }
    Ok(())
}

/// `sum_i g(tables[0][i], ..., tables[q-1][i])`
pub fn brute_force_sum<F: Field>(tables: &[Vec<F>], g: &Constraint<F>) -> F {
    let mut args = vec![F::ZERO; tables.len()];
    (0..tables[0].len())
        .map(|i| {
            for (a, t) in args.iter_mut().zip(tables) {
                *a = t[i];
            }
            g.apply(&args)
        })
        .sum()
}

/// Values at `y = 0..=d` of the round polynomial for the first remaining variable.
pub fn round_evaluations<F: Field>(tables: &[Vec<F>], g: &Constraint<F>, ops: &mut OpCounter) -> Vec<F> {
    let q = tables.len();
    let d = g.degree();
    let half = tables[0].len() / 2;
    let chunk = |range: std::ops::Range<usize>| -> Vec<F> {
        let mut acc = vec![F::ZERO; d + 1];
        let mut cur = vec![F::ZERO; q];
        let mut diff = vec![F::ZERO; q];
        for i in range {
            for k in 0..q {
                cur[k] = tables[k][2 * i];
                diff[k] = tables[k][2 * i + 1] - cur[k];
            }
            for (y, a) in acc.iter_mut().enumerate() {
                if y > 0 {
                    for k in 0..q {
                        cur[k] += diff[k];
                    }
                }
                *a += g.apply(&cur);
            }
        }
        acc
    };
    let out = if half >= PAR_THRESHOLD {
        let parts: Vec<Vec<F>> = (0..half)
            .into_par_iter()
            .chunks(PAR_THRESHOLD)
            .map(|idx| chunk(idx[0]..idx[idx.len() - 1] + 1))
            .collect();
        let mut acc = vec![F::ZERO; d + 1];
        for p in parts {
            for (a, b) in acc.iter_mut().zip(p) {
                *a += b;
            }
        }
        acc
    } else {
        chunk(0..half)
    };
    ops.add(half as u64 * (q as u64 * (d as u64 + 1) + (d as u64 + 1) * (g.eval_cost() + 1)));
    out
}

/// Binds the first variable to `r`: `v'[i] = (1 - r) v[2i] + r v[2i+1]`.
pub fn fold_tables<F: Field>(tables: &mut [Vec<F>], r: F, ops: &mut OpCounter) {
    for t in tables.iter_mut() {
        let half = t.len() / 2;
        let folded: Vec<F> = if half >= PAR_THRESHOLD {
            t.par_chunks(2).map(|c| c[0] + r * (c[1] - c[0])).collect()
        } else {
            t.chunks(2).map(|c| c[0] + r * (c[1] - c[0])).collect()
        };
        *t = folded;
        ops.add(3 * half as u64);
    }
}

/// One reduction step outside any session: the round polynomial (as values at
/// `0..=d`) and the instance reduced at challenge `r`.
pub fn lfkn_round<F: Field>(inst: &HypercubeInstance<F>, r: F) -> (Vec<F>, HypercubeInstance<F>) {
    let mut ops = OpCounter::default();
    let evals = round_evaluations(&inst.tables, &inst.constraint, &mut ops);
    let mut tables = inst.tables.clone();
    fold_tables(&mut tables, r, &mut ops);
    let claim = interpolate_integer_nodes(&evals, r);
    (
        evals,
        HypercubeInstance {
            tables,
            constraint: inst.constraint.clone(),
            claim,
        },
    )
}

/// State after some rounds of the interactive reduction.
#[derive(Clone, Debug)]
pub struct LfknOutcome<F: Field> {
    pub challenges: Vec<F>,
    /// Running claim as tracked by the verifier.
    pub claim: F,
    /// Prover's folded tables: `mlex[v_i](r_1..r_k, .)` over the remaining cube.
    pub tables: Vec<Vec<F>>,
}

/// Runs `rounds` rounds. With `liar` set, the prover carries the lie's offset
/// through the round polynomials instead of sending honest ones.
pub fn lfkn_run<F: Field>(
    session: &mut Session<F>,
    mut tables: Vec<Vec<F>>,
    g: &Constraint<F>,
    claim: F,
    rounds: usize,
    mut liar: Option<&mut PlantedLie<F>>,
) -> LfknOutcome<F> {
    assert!(rounds as u32 <= tables[0].len().trailing_zeros());
    let mut claim = claim;
    let mut challenges = Vec::with_capacity(rounds);
    let checkpoints = [F::ZERO, F::ONE];
    for round in 0..rounds {
        let honest = session.prover_work(|ops| round_evaluations(&tables, g, ops));
        let mut evals = honest.clone();
        if let Some(l) = liar.as_deref_mut() {
            l.plant(&mut evals, &checkpoints);
        }
        let received = session.send_scalars(&evals);
        session.count_round();
        let sum = received[0] + received[1];
        session.check(sum == claim, Rejection::RoundSum { round });
        let r = session.challenge(ChallengeDomain::Full);
        if let Some(l) = liar.as_deref_mut() {
            l.advance(&honest, &evals, r);
        }
        claim = interpolate_integer_nodes(&received, r);
        challenges.push(r);
        session.prover_work(|ops| fold_tables(&mut tables, r, ops));
    }
    LfknOutcome {
        challenges,
        claim,
        tables,
    }
}
