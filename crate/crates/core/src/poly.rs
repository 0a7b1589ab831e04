//! Univariate polynomials in coefficient and subgroup-evaluation form, and the
//! extension operators that read a value or coefficient vector as a multilinear
//! (or mixed-radix) polynomial.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{batch_inverse, powers, Field};

/// Coefficient form, index `i` holds the coefficient of `x^i`. Trailing zeros
/// are always trimmed so equality is coefficient-exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<F>", into = "Vec<F>", bound = "F: Field")]
pub struct Polynomial<F: Field> {
    coeffs: Vec<F>,
}

impl<F: Field> From<Vec<F>> for Polynomial<F> {
    fn from(coeffs: Vec<F>) -> Self {
        Self::new(coeffs)
    }
}

impl<F: Field> From<Polynomial<F>> for Vec<F> {
    fn from(p: Polynomial<F>) -> Self {
        p.coeffs
    }
}

impl<F: Field> Polynomial<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| F::from_u64(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: F, k: usize) -> Self {
        let mut coeffs = vec![F::ZERO; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// Uniformly random polynomial with `len` coefficients (degree < len).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        Self::new((0..len).map(|_| F::random(rng)).collect())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    /// Coefficients zero-padded (or truncated) to `len`.
    pub fn padded(&self, len: usize) -> Vec<F> {
        let mut out = self.coeffs.clone();
        out.resize(len, F::ZERO);
        out
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).copied().unwrap_or(F::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored coefficients, i.e. degree + 1 (0 for the zero polynomial).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn evaluate(&self, x: F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::ZERO, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, c: F) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// `p(c x)`: coefficient `i` multiplied by `c^i`.
    pub fn scale_argument(&self, c: F) -> Self {
        let mut cur = F::ONE;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &a in &self.coeffs {
            out.push(a * cur);
            cur *= c;
        }
        Self::new(out)
    }

    /// `p(x^k)`
    pub fn compose_power(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![F::ZERO; (self.coeffs.len() - 1) * k + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i * k] = c;
        }
        Self::new(out)
    }

    /// `x^k p(x)`
    pub fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![F::ZERO; k];
        out.extend_from_slice(&self.coeffs);
        Self::new(out)
    }
}

impl<F: Field> Add for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn add(self, rhs: Self) -> Polynomial<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<F: Field> Sub for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn sub(self, rhs: Self) -> Polynomial<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<F: Field> Neg for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn neg(self) -> Polynomial<F> {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl<F: Field> Mul for &Polynomial<F> {
    type Output = Polynomial<F>;
    /// Schoolbook product.
    fn mul(self, rhs: Self) -> Polynomial<F> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![F::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// Values of a polynomial of degree `< 2^log_size` over the subgroup generated by `generator`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "F: Field")]
pub struct EvaluationTable<F: Field> {
    values: Vec<F>,
    generator: F,
    log_size: u32,
}

fn has_exact_order<F: Field>(g: F, log_size: u32) -> bool {
    let mut x = g;
    for _ in 0..log_size.saturating_sub(1) {
        x = x.square();
    }
    if log_size == 0 {
        return g == F::ONE;
    }
    x != F::ONE && x.square() == F::ONE
}

impl<F: Field> EvaluationTable<F> {
    pub fn new(values: Vec<F>, generator: F) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::LengthMismatch {
                expected: values.len().next_power_of_two(),
                got: values.len(),
            });
        }
        let log_size = values.len().trailing_zeros();
        if !has_exact_order(generator, log_size) {
            return Err(Error::GeneratorOrder {
                expected: values.len(),
            });
        }
        Ok(Self {
            values,
            generator,
            log_size,
        })
    }

    /// Table over the canonical subgroup of size `values.len()`.
    pub fn over_subgroup(values: Vec<F>) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::LengthMismatch {
                expected: values.len().next_power_of_two(),
                got: values.len(),
            });
        }
        let log_size = values.len().trailing_zeros();
        let generator = F::primitive_root_of_unity(log_size)?;
        Ok(Self {
            values,
            generator,
            log_size,
        })
    }

    pub(crate) fn from_parts(values: Vec<F>, generator: F) -> Self {
        debug_assert!(values.len().is_power_of_two());
        let log_size = values.len().trailing_zeros();
        Self {
            values,
            generator,
            log_size,
        }
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn into_values(self) -> Vec<F> {
        self.values
    }

    pub fn generator(&self) -> F {
        self.generator
    }

    pub fn log_size(&self) -> u32 {
        self.log_size
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of the interpolant at an arbitrary point (barycentric form over
    /// roots of unity, exact lookup on the domain itself).
    pub fn evaluate(&self, x: F) -> F {
        let n = self.values.len();
        if n == 1 {
            return self.values[0];
        }
        let xn = x.pow(n as u64);
        if xn == F::ONE {
            let mut pt = F::ONE;
            for &v in &self.values {
                if pt == x {
                    return v;
                }
                pt *= self.generator;
            }
            unreachable!("x^n = 1 but x is not in the subgroup");
        }
        let pts = powers(self.generator, n);
        let diffs: Vec<F> = pts.iter().map(|&p| x - p).collect();
        let inv = batch_inverse(&diffs).expect("x is off the domain");
        let acc: F = (0..n).map(|i| self.values[i] * pts[i] * inv[i]).sum();
        let n_inv = F::from_u64(n as u64).inverse().expect("n < p");
        acc * (xn - F::ONE) * n_inv
    }
}

fn bit_reverse_permute<T>(a: &mut [T]) {
    let n = a.len();
    if n <= 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            a.swap(i, j);
        }
    }
}

/// In-place radix-2 transform: `a[i] <- sum_j a[j] * omega^(ij)`.
fn ntt_in_place<F: Field>(a: &mut [F], omega: F) {
    let n = a.len();
    if n <= 1 {
        return;
    }
    bit_reverse_permute(a);
    let twiddles = powers(omega, n / 2);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let u = a[start + j];
                let v = a[start + j + half] * twiddles[j * step];
                a[start + j] = u + v;
                a[start + j + half] = u - v;
            }
        }
        len <<= 1;
    }
}

/// Field operations performed by one size-`n` transform (butterflies only).
pub fn ntt_op_count(n: usize) -> u64 {
    if n <= 1 {
        return 0;
    }
    3 * (n as u64 / 2) * n.trailing_zeros() as u64
}

pub fn ntt_forward<F: Field>(p: &Polynomial<F>, k: u32, generator: F) -> Result<EvaluationTable<F>> {
    let n = 1usize << k;
    if p.len() > n {
        return Err(Error::DegreeTooLarge {
            degree: p.len() - 1,
            bound: n - 1,
        });
    }
    if !has_exact_order(generator, k) {
        return Err(Error::GeneratorOrder { expected: n });
    }
    let mut values = p.padded(n);
    ntt_in_place(&mut values, generator);
    Ok(EvaluationTable::from_parts(values, generator))
}

pub fn ntt_inverse<F: Field>(t: &EvaluationTable<F>) -> Polynomial<F> {
    let n = t.len();
    let mut coeffs = t.values.clone();
    let g_inv = t.generator.inverse().expect("generator is a unit");
    ntt_in_place(&mut coeffs, g_inv);
    let n_inv = F::from_u64(n as u64).inverse().expect("n < p");
    for c in coeffs.iter_mut() {
        *c *= n_inv;
    }
    Polynomial::new(coeffs)
}

/// `(f_ev, f_od)` with `f(x) = f_ev(x^2) + x f_od(x^2)`.
pub fn even_odd_split<F: Field>(f: &Polynomial<F>) -> (Polynomial<F>, Polynomial<F>) {
    let ev = f.coeffs.iter().step_by(2).copied().collect();
    let od = f.coeffs.iter().skip(1).step_by(2).copied().collect();
    (Polynomial::new(ev), Polynomial::new(od))
}

/// Quotient and remainder of `f` modulo `x^n - c`.
pub fn div_rem_cyclic<F: Field>(f: &Polynomial<F>, n: usize, c: F) -> (Polynomial<F>, Polynomial<F>) {
    assert!(n >= 1);
    let mut rem = f.coeffs.clone();
    if rem.len() <= n {
        return (Polynomial::zero(), f.clone());
    }
    let mut quot = vec![F::ZERO; rem.len() - n];
    for i in (n..rem.len()).rev() {
        let top = rem[i];
        quot[i - n] = top;
        rem[i - n] += c * top;
        rem[i] = F::ZERO;
    }
    rem.truncate(n);
    (Polynomial::new(quot), Polynomial::new(rem))
}

/// Remainder of `f` modulo `x^n - c`; `c = 1` and `c = -1` give the two cyclic
/// remainders used by the square/non-square split.
pub fn rem_cyclic<F: Field>(f: &Polynomial<F>, n: usize, c: F) -> Polynomial<F> {
    assert!(n >= 1);
    let mut out = vec![F::ZERO; n.min(f.len())];
    let mut weight = F::ONE;
    for block in f.coeffs.chunks(n) {
        for (o, &a) in out.iter_mut().zip(block) {
            *o += weight * a;
        }
        weight *= c;
    }
    Polynomial::new(out)
}

/// `(f_sq, f_no)` with `f_sq(w^(2i)) = f(w^(2i))` and `f_no(w^(2i)) = f(w^(2i+1))`.
pub fn square_nonsquare_split<F: Field>(
    f: &Polynomial<F>,
    m: u32,
    w: F,
) -> Result<(Polynomial<F>, Polynomial<F>)> {
    let n = 1usize << m;
    if f.len() > n {
        return Err(Error::DegreeTooLarge {
            degree: f.len() - 1,
            bound: n - 1,
        });
    }
    let half = (n / 2).max(1);
    let sq = rem_cyclic(f, half, F::ONE);
    let no = rem_cyclic(f, half, -F::ONE).scale_argument(w);
    Ok((sq, no))
}

/// `((1 + x^h)/2) f_sq(x) + ((1 - x^h)/2) f_no(x / w)` with `h = 2^(m-1)`.
pub fn crt_recombine<F: Field>(f_sq: &Polynomial<F>, f_no: &Polynomial<F>, m: u32, w: F, x: F) -> F {
    let h = 1u64 << m.saturating_sub(1);
    let xh = x.pow(h);
    let half = F::half();
    let w_inv = w.inverse().expect("root of unity is a unit");
    (F::ONE + xh) * half * f_sq.evaluate(x) + (F::ONE - xh) * half * f_no.evaluate(w_inv * x)
}

/// The recombination above as a polynomial, for coefficient-exact comparisons.
pub fn crt_recombine_poly<F: Field>(
    f_sq: &Polynomial<F>,
    f_no: &Polynomial<F>,
    m: u32,
    w: F,
) -> Polynomial<F> {
    let h = 1usize << m.saturating_sub(1);
    let half = F::half();
    let plus = &Polynomial::constant(half) + &Polynomial::monomial(half, h);
    let minus = &Polynomial::constant(half) - &Polynomial::monomial(half, h);
    let w_inv = w.inverse().expect("root of unity is a unit");
    &(&plus * f_sq) + &(&minus * &f_no.scale_argument(w_inv))
}

/// Fold a length-`2k` vector into length `k` with `even + z * odd`.
pub(crate) fn fold_even_odd<F: Field>(v: &[F], z: F) -> Vec<F> {
    v.chunks(2)
        .map(|c| c[0] + z * c.get(1).copied().unwrap_or(F::ZERO))
        .collect()
}

/// Reads the coefficient vector of `f` as a multilinear polynomial in
/// `len(z)` variables (least significant index bit first) and evaluates it.
pub fn mlin_eval<F: Field>(f: &Polynomial<F>, z: &[F]) -> Result<F> {
    let n = 1usize
        .checked_shl(z.len() as u32)
        .filter(|_| z.len() < usize::BITS as usize)
        .unwrap_or(usize::MAX);
    if f.len() > n {
        return Err(Error::DegreeTooLarge {
            degree: f.len() - 1,
            bound: n - 1,
        });
    }
    let mut cur = f.coeffs.clone();
    for &zj in z {
        if cur.is_empty() {
            break;
        }
        cur = fold_even_odd(&cur, zj);
    }
    Ok(cur.first().copied().unwrap_or(F::ZERO))
}

/// Multilinear extension of `v` over the hypercube (least significant bit first) at `z`.
pub fn mlex_eval<F: Field>(v: &[F], z: &[F]) -> Result<F> {
    if z.len() >= usize::BITS as usize || v.len() != 1usize << z.len() {
        return Err(Error::LengthMismatch {
            expected: 1usize.checked_shl(z.len() as u32).unwrap_or(0),
            got: v.len(),
        });
    }
    let mut cur = v.to_vec();
    for &zj in z {
        cur = cur
            .chunks(2)
            .map(|c| c[0] + zj * (c[1] - c[0]))
            .collect();
    }
    Ok(cur[0])
}

/// `q[i] = p[bound - i]`, i.e. `x^bound p(1/x)`.
pub fn reverse_coefficients<F: Field>(p: &Polynomial<F>, bound: usize) -> Result<Polynomial<F>> {
    if p.len() > bound + 1 {
        return Err(Error::DegreeTooLarge {
            degree: p.len() - 1,
            bound,
        });
    }
    let mut c = p.padded(bound + 1);
    c.reverse();
    Ok(Polynomial::new(c))
}

/// Number of variables `m` needed so that `2^m > deg(f)`.
pub(crate) fn log_len(len: usize) -> u32 {
    if len <= 1 {
        0
    } else {
        (len - 1).ilog2() + 1
    }
}

/// Evaluates the mixed-radix multivariate reading of `f`'s coefficients:
/// variable `i` has degree `2^t_i - 1` and coefficient index `j_1 + b_2 j_2 + ...`.
pub fn kappa_eval<F: Field>(f: &Polynomial<F>, schedule: &[u32], point: &[F]) -> Result<F> {
    if schedule.len() != point.len() {
        return Err(Error::LengthMismatch {
            expected: schedule.len(),
            got: point.len(),
        });
    }
    let covered: u32 = schedule.iter().sum();
    let needed = log_len(f.len());
    if covered < needed {
        return Err(Error::ScheduleTooShort { covered, needed });
    }
    let mut cur = f.coeffs.clone();
    for (&t, &x) in schedule.iter().zip(point) {
        if cur.is_empty() {
            break;
        }
        let block = 1usize.checked_shl(t).filter(|_| t < usize::BITS).unwrap_or(usize::MAX);
        let block = block.min(cur.len());
        cur = cur
            .chunks(block)
            .map(|c| c.iter().rev().fold(F::ZERO, |acc, &a| acc * x + a))
            .collect();
    }
    Ok(cur.first().copied().unwrap_or(F::ZERO))
}

/// Evaluates at `x` the polynomial of degree `< evals.len()` that takes
/// `evals[t]` at `t = 0, 1, ...`. The nodes must be distinct in `F`.
pub fn interpolate_integer_nodes<F: Field>(evals: &[F], x: F) -> F {
    let n = evals.len();
    debug_assert!((n as u64) <= F::MODULUS);
    let nodes: Vec<F> = (0..n as u64).map(F::from_u64).collect();
    if let Some(t) = nodes.iter().position(|&a| a == x) {
        return evals[t];
    }
    // weight_t = 1 / prod_{s != t} (t - s)
    let mut denoms = Vec::with_capacity(n);
    for t in 0..n {
        let mut d = F::ONE;
        for s in 0..n {
            if s != t {
                d *= nodes[t] - nodes[s];
            }
        }
        denoms.push(d * (x - nodes[t]));
    }
    let inv = batch_inverse(&denoms).expect("distinct nodes");
    let l: F = nodes.iter().map(|&a| x - a).product();
    l * (0..n).map(|t| evals[t] * inv[t]).sum::<F>()
}
