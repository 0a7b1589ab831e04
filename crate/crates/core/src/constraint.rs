//! Black-box constraint polynomials `g` and their restrictions to affine lines.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{batch_inverse, Field};

type Evaluator<F> = Arc<dyn Fn(&[F]) -> F + Send + Sync>;

/// A `q`-ary polynomial function of total degree at most `d`, known only through evaluation.
#[derive(Clone)]
pub struct Constraint<F: Field> {
    name: String,
    arity: usize,
    degree: usize,
    eval_cost: u64,
    evaluator: Evaluator<F>,
    // line_basis[j][t]: coefficient of t-th sample in the j-th line component.
    line_basis: Vec<Vec<F>>,
}

impl<F: Field> fmt::Debug for Constraint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Constraint")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("degree", &self.degree)
            .finish()
    }
}

/// Names accepted by [`Constraint::builtin`].
pub const BUILTIN_CONSTRAINTS: [&str; 5] = ["identity", "square", "cube", "product2", "r1cs-row"];

impl<F: Field> Constraint<F> {
    /// `eval_cost` is the number of field operations one evaluation takes; it
    /// only feeds the prover operation counters.
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        degree: usize,
        eval_cost: u64,
        evaluator: impl Fn(&[F]) -> F + Send + Sync + 'static,
    ) -> Result<Self> {
        if (F::MODULUS as u128) <= degree as u128 {
            return Err(Error::UnsupportedField {
                modulus: F::MODULUS,
                degree,
            });
        }
        Ok(Self {
            name: name.into(),
            arity,
            degree,
            eval_cost,
            evaluator: Arc::new(evaluator),
            line_basis: lagrange_coefficient_matrix(degree),
        })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "identity" => Self::new(name, 1, 1, 0, |a| a[0]),
            "square" => Self::new(name, 1, 2, 1, |a| a[0] * a[0]),
            "cube" => Self::new(name, 1, 3, 2, |a| a[0] * a[0] * a[0]),
            "product2" => Self::new(name, 2, 2, 1, |a| a[0] * a[1]),
            "r1cs-row" => Self::new(name, 3, 2, 2, |a| a[0] * a[1] - a[2]),
            _ => Err(Error::UnknownConstraint(name.to_string())),
        }
    }

    /// `a_1^d + ... + a_q^d`, for picking degree and arity independently.
    pub fn power_sum(degree: usize, arity: usize) -> Result<Self> {
        if degree == 0 || arity == 0 {
            return Err(Error::InvalidConfig("power sum needs positive degree and arity".into()));
        }
        let cost = (arity * degree - 1) as u64;
        Self::new(format!("power-sum-{degree}"), arity, degree, cost, move |a| {
            a.iter().map(|&x| x.pow(degree as u64)).sum()
        })
    }

    /// A builtin by name, or `power-sum-D` with `arity` inputs.
    pub fn named(name: &str, arity: Option<usize>) -> Result<Self> {
        if let Some(d) = name.strip_prefix("power-sum-") {
            let d = d
                .parse()
                .map_err(|_| Error::UnknownConstraint(name.to_string()))?;
            return Self::power_sum(d, arity.unwrap_or(1));
        }
        let g = Self::builtin(name)?;
        match arity {
            Some(q) if q != g.arity => Err(Error::ArityMismatch {
                expected: g.arity,
                got: q,
            }),
            _ => Ok(g),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval_cost(&self) -> u64 {
        self.eval_cost
    }

    pub fn eval(&self, args: &[F]) -> Result<F> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        Ok((self.evaluator)(args))
    }

    /// Unchecked evaluation for hot loops.
    #[inline]
    pub(crate) fn apply(&self, args: &[F]) -> F {
        debug_assert_eq!(args.len(), self.arity);
        (self.evaluator)(args)
    }

    /// `(g_0(a,b), ..., g_d(a,b))` with `g(a + t b) = sum_j t^j g_j(a,b)`.
    pub fn line_components(&self, a: &[F], b: &[F]) -> Result<Vec<F>> {
        if a.len() != self.arity || b.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: a.len().max(b.len()),
            });
        }
        let mut scratch = vec![F::ZERO; self.arity];
        let mut samples = vec![F::ZERO; self.degree + 1];
        let mut out = vec![F::ZERO; self.degree + 1];
        self.line_components_into(a, b, &mut scratch, &mut samples, &mut out);
        Ok(out)
    }

    pub(crate) fn line_components_into(
        &self,
        a: &[F],
        b: &[F],
        scratch: &mut [F],
        samples: &mut [F],
        out: &mut [F],
    ) {
        scratch.copy_from_slice(a);
        for s in samples.iter_mut() {
            *s = self.apply(scratch);
            for (x, &bk) in scratch.iter_mut().zip(b) {
                *x += bk;
            }
        }
        for (o, row) in out.iter_mut().zip(&self.line_basis) {
            *o = row.iter().zip(samples.iter()).map(|(&c, &s)| c * s).sum();
        }
    }

    /// Field operations for one `line_components` call.
    pub(crate) fn line_cost(&self) -> u64 {
        let d = self.degree as u64;
        (d + 1) * (self.eval_cost + self.arity as u64) + 2 * (d + 1) * (d + 1)
    }
}

/// `M[j][t]` = coefficient of `x^j` in the Lagrange basis polynomial for node
/// `t` over the nodes `0, 1, ..., d` (the inverse Vandermonde matrix).
fn lagrange_coefficient_matrix<F: Field>(d: usize) -> Vec<Vec<F>> {
    let nodes: Vec<F> = (0..=d as u64).map(F::from_u64).collect();
    let mut m = vec![vec![F::ZERO; d + 1]; d + 1];
    let denoms: Vec<F> = (0..=d)
        .map(|t| {
            (0..=d)
                .filter(|&s| s != t)
                .map(|s| nodes[t] - nodes[s])
                .product()
        })
        .collect();
    let inv = batch_inverse(&denoms).expect("nodes distinct when p > d");
    for t in 0..=d {
        let mut basis = vec![F::ONE];
        for s in (0..=d).filter(|&s| s != t) {
            // basis *= (x - s)
            let mut next = vec![F::ZERO; basis.len() + 1];
            for (i, &c) in basis.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * nodes[s];
            }
            basis = next;
        }
        for j in 0..=d {
            m[j][t] = basis[j] * inv[t];
        }
    }
    m
}
