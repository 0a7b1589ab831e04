//! Prime fields with large power-of-two multiplicative subgroups.

use std::fmt;
use std::hash::Hash;
use std::iter::{Product, Sum};
use std::marker::PhantomData;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Static description of a prime field.
pub trait FieldParams:
    'static + Copy + Clone + fmt::Debug + Default + PartialEq + Eq + Hash + PartialOrd + Ord + Send + Sync
{
    const MODULUS: u64;
    const TWO_ADICITY: u32;
    /// Element of multiplicative order exactly `2^TWO_ADICITY`.
    const TWO_ADIC_GENERATOR: u64;
    const NAME: &'static str;

    #[inline]
    fn reduce_wide(x: u128) -> u64 {
        (x % Self::MODULUS as u128) as u64
    }
}

/// Operations shared by every field used in the protocols.
pub trait Field:
    'static
    + Copy
    + Clone
    + fmt::Debug
    + fmt::Display
    + Default
    + PartialEq
    + Eq
    + Hash
    + PartialOrd
    + Ord
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Product
    + Serialize
    + for<'de> Deserialize<'de>
{
    const MODULUS: u64;
    const TWO_ADICITY: u32;
    const NAME: &'static str;
    const ZERO: Self;
    const ONE: Self;

    fn from_u64(v: u64) -> Self;
    fn value(&self) -> u64;
    fn two_adic_generator() -> Self;

    fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Self::from_u64(v as u64)
        } else {
            -Self::from_u64(v.unsigned_abs())
        }
    }

    fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    fn square(&self) -> Self {
        *self * *self
    }

    fn double(&self) -> Self {
        *self + *self
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    /// `None` for zero.
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.pow(Self::MODULUS - 2))
        }
    }

    fn half() -> Self {
        Self::from_u64(Self::MODULUS / 2 + 1)
    }

    /// Primitive `2^log_n`-th root of unity, derived from the 2-adic generator
    /// so that the roots for consecutive sizes square into each other.
    fn primitive_root_of_unity(log_n: u32) -> Result<Self> {
        if log_n > Self::TWO_ADICITY {
            return Err(Error::UnsupportedDomain {
                log_size: log_n,
                two_adicity: Self::TWO_ADICITY,
            });
        }
        let mut w = Self::two_adic_generator();
        for _ in log_n..Self::TWO_ADICITY {
            w = w.square();
        }
        Ok(w)
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_u64(rng.gen_range(0..Self::MODULUS))
    }

    fn random_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_u64(rng.gen_range(1..Self::MODULUS))
    }
}

/// Element of the prime field described by `P`, stored canonically in `[0, p)`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp<P: FieldParams> {
    value: u64,
    _params: PhantomData<P>,
}

impl<P: FieldParams> Fp<P> {
    #[inline]
    const fn new_unchecked(value: u64) -> Self {
        Self {
            value,
            _params: PhantomData,
        }
    }
}

impl<P: FieldParams> Field for Fp<P> {
    const MODULUS: u64 = P::MODULUS;
    const TWO_ADICITY: u32 = P::TWO_ADICITY;
    const NAME: &'static str = P::NAME;
    const ZERO: Self = Self::new_unchecked(0);
    const ONE: Self = Self::new_unchecked(1);

    #[inline]
    fn from_u64(v: u64) -> Self {
        Self::new_unchecked(v % P::MODULUS)
    }

    #[inline]
    fn value(&self) -> u64 {
        self.value
    }

    fn two_adic_generator() -> Self {
        Self::new_unchecked(P::TWO_ADIC_GENERATOR)
    }
}

impl<P: FieldParams> Add for Fp<P> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s, overflow) = self.value.overflowing_add(rhs.value);
        if overflow || s >= P::MODULUS {
            Self::new_unchecked(s.wrapping_sub(P::MODULUS))
        } else {
            Self::new_unchecked(s)
        }
    }
}

impl<P: FieldParams> Sub for Fp<P> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        if self.value >= rhs.value {
            Self::new_unchecked(self.value - rhs.value)
        } else {
            Self::new_unchecked(P::MODULUS - (rhs.value - self.value))
        }
    }
}

impl<P: FieldParams> Mul for Fp<P> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::new_unchecked(P::reduce_wide(self.value as u128 * rhs.value as u128))
    }
}

impl<P: FieldParams> Div for Fp<P> {
    type Output = Self;
    /// Panics on division by zero.
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse().expect("division by zero")
    }
}

impl<P: FieldParams> Neg for Fp<P> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        if self.value == 0 {
            self
        } else {
            Self::new_unchecked(P::MODULUS - self.value)
        }
    }
}

impl<P: FieldParams> AddAssign for Fp<P> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<P: FieldParams> SubAssign for Fp<P> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<P: FieldParams> MulAssign for Fp<P> {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<P: FieldParams> Sum for Fp<P> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl<P: FieldParams> Product for Fp<P> {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

impl<P: FieldParams> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl<P: FieldParams> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl<P: FieldParams> From<u64> for Fp<P> {
    fn from(v: u64) -> Self {
        Self::from_u64(v)
    }
}

// Decimal strings keep 64-bit values exact in JSON.
impl<P: FieldParams> Serialize for Fp<P> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.value.to_string())
    }
}

impl<'de, P: FieldParams> Deserialize<'de> for Fp<P> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let v: u64 = s.parse().map_err(serde::de::Error::custom)?;
        if v >= P::MODULUS {
            return Err(serde::de::Error::custom("field element out of range"));
        }
        Ok(Self::new_unchecked(v))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F17Params;

impl FieldParams for F17Params {
    const MODULUS: u64 = 17;
    const TWO_ADICITY: u32 = 4;
    // 6 has order 16 and 6^4 = 4, so the order-4 root is 4.
    const TWO_ADIC_GENERATOR: u64 = 6;
    const NAME: &'static str = "f17";
}

/// Tiny field where soundness errors are large enough to measure.
pub type F17 = Fp<F17Params>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoldilocksParams;

const GOLDILOCKS_EPSILON: u64 = 0xffff_ffff;

impl FieldParams for GoldilocksParams {
    const MODULUS: u64 = 0xffff_ffff_0000_0001;
    const TWO_ADICITY: u32 = 32;
    // 7^((p - 1) / 2^32)
    const TWO_ADIC_GENERATOR: u64 = 1_753_635_133_440_165_772;
    const NAME: &'static str = "f64";

    #[inline]
    fn reduce_wide(x: u128) -> u64 {
        let lo = x as u64;
        let hi = (x >> 64) as u64;
        let hi_hi = hi >> 32;
        let hi_lo = hi & GOLDILOCKS_EPSILON;
        let (mut t0, borrow) = lo.overflowing_sub(hi_hi);
        if borrow {
            t0 = t0.wrapping_sub(GOLDILOCKS_EPSILON);
        }
        let t1 = hi_lo * GOLDILOCKS_EPSILON;
        let (mut res, carry) = t0.overflowing_add(t1);
        if carry {
            res = res.wrapping_add(GOLDILOCKS_EPSILON);
        }
        if res >= Self::MODULUS {
            res -= Self::MODULUS;
        }
        res
    }
}

/// The 64-bit field `2^64 - 2^32 + 1`.
pub type Goldilocks = Fp<GoldilocksParams>;

/// Inverts every element with a single field inversion.
pub fn batch_inverse<F: Field>(xs: &[F]) -> Result<Vec<F>> {
    let mut prefix = Vec::with_capacity(xs.len());
    let mut acc = F::ONE;
    for (index, x) in xs.iter().enumerate() {
        if x.is_zero() {
            return Err(Error::ZeroInverse { index });
        }
        prefix.push(acc);
        acc *= *x;
    }
    let mut inv = acc.inverse().expect("product of nonzero elements");
    let mut out = vec![F::ZERO; xs.len()];
    for i in (0..xs.len()).rev() {
        out[i] = inv * prefix[i];
        inv *= xs[i];
    }
    Ok(out)
}

/// `[1, base, base^2, ..., base^(count-1)]`
pub fn powers<F: Field>(base: F, count: usize) -> Vec<F> {
    let mut out = Vec::with_capacity(count);
    let mut cur = F::ONE;
    for _ in 0..count {
        out.push(cur);
        cur *= base;
    }
    out
}
