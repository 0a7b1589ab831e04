use std::sync::Arc;

use crate::field::Field;
use crate::poly::{EvaluationTable, Polynomial};

pub type OracleId = usize;

/// Explicit representation behind a sent oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleData<F: Field> {
    Coeffs(Polynomial<F>),
    Table(EvaluationTable<F>),
}

impl<F: Field> OracleData<F> {
    pub fn evaluate(&self, x: F) -> F {
        match self {
            OracleData::Coeffs(p) => p.evaluate(x),
            OracleData::Table(t) => t.evaluate(x),
        }
    }

    /// Number of free coefficients (table length, or stored coefficients).
    pub fn len(&self) -> usize {
        match self {
            OracleData::Coeffs(p) => p.len(),
            OracleData::Table(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<F: Field> From<Polynomial<F>> for OracleData<F> {
    fn from(p: Polynomial<F>) -> Self {
        OracleData::Coeffs(p)
    }
}

impl<F: Field> From<EvaluationTable<F>> for OracleData<F> {
    fn from(t: EvaluationTable<F>) -> Self {
        OracleData::Table(t)
    }
}

/// Verifier-side handle: either a sent oracle or a fixed linear combination
/// of other handles, answered through queries to the components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Oracle<F: Field> {
    Real(OracleId),
    Linear(Arc<[(F, Oracle<F>)]>),
}

impl<F: Field> Oracle<F> {
    pub fn linear(terms: Vec<(F, Oracle<F>)>) -> Self {
        Oracle::Linear(terms.into())
    }

    /// `sum_i t^i o_i`
    pub fn powers_combination(oracles: &[Oracle<F>], t: F) -> Self {
        if oracles.len() == 1 {
            return oracles[0].clone();
        }
        let mut w = F::ONE;
        let mut terms = Vec::with_capacity(oracles.len());
        for o in oracles {
            terms.push((w, o.clone()));
            w *= t;
        }
        Oracle::linear(terms)
    }

    /// Real oracles this handle reads from.
    pub fn components(&self) -> Vec<OracleId> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect(&self, out: &mut Vec<OracleId>) {
        match self {
            Oracle::Real(id) => out.push(*id),
            Oracle::Linear(terms) => terms.iter().for_each(|(_, o)| o.collect(out)),
        }
    }
}
