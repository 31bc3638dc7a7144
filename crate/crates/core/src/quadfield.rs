//! Exact arithmetic in the ring of integers of a real quadratic field.
//!
//! Elements are stored in the integral basis `{1, ω}` where `ω = √D` when
//! `D ≡ 2, 3 (mod 4)` and `ω = (1 + √D)/2` when `D ≡ 1 (mod 4)`. The
//! `a + b√D` view is derived on demand and kept as the doubled pair
//! `(2a, 2b)` so that half-integers never leave the integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::residues;

/// Shape of the integral basis generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OmegaKind {
    SqrtD,
    HalfOnePlusSqrtD,
}

impl OmegaKind {
    pub fn of(d: i64) -> Self {
        if d.rem_euclid(4) == 1 {
            OmegaKind::HalfOnePlusSqrtD
        } else {
            OmegaKind::SqrtD
        }
    }
}

/// How the rational prime 2 decomposes in the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Dyadic {
    Ramified,
    Inert,
    Split,
}

/// The field `ℚ(√D)` together with the data every other module needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingContext {
    d: i64,
    d_mod4: u8,
    kappa: u8,
    omega: OmegaKind,
    isqrt_d: i64,
    floor_omega: i64,
    dyadic: Dyadic,
    square_classes: [bool; 4],
    nil_classes: [bool; 4],
}

impl RingContext {
    /// Validates `d` (squarefree, at least 2) and precomputes the context.
    pub fn new(d: i64) -> Result<Self> {
        if d < 2 {
            return Err(Error::TooSmall(d));
        }
        let mut p: i64 = 2;
        while p <= d / p {
            if d % (p * p) == 0 {
                return Err(Error::NotSquarefree(p));
            }
            p += 1;
        }
        let d_mod4 = d.rem_euclid(4) as u8;
        let omega = OmegaKind::of(d);
        let isqrt_d = d.sqrt();
        let floor_omega = match omega {
            OmegaKind::SqrtD => isqrt_d,
            // √D is irrational, so ⌊(1+√D)/2⌋ = ⌊(1+⌊√D⌋)/2⌋.
            OmegaKind::HalfOnePlusSqrtD => (1 + isqrt_d) / 2,
        };
        let dyadic = match d.rem_euclid(8) {
            1 => Dyadic::Split,
            5 => Dyadic::Inert,
            _ => Dyadic::Ramified,
        };
        let (square_classes, nil_classes) = residues::enumerate_class_tables(d);
        Ok(RingContext {
            d,
            d_mod4,
            kappa: if omega == OmegaKind::HalfOnePlusSqrtD { 1 } else { 2 },
            omega,
            isqrt_d,
            floor_omega,
            dyadic,
            square_classes,
            nil_classes,
        })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn d_mod4(&self) -> u8 {
        self.d_mod4
    }

    pub fn kappa(&self) -> u8 {
        self.kappa
    }

    pub fn omega_kind(&self) -> OmegaKind {
        self.omega
    }

    /// `⌊√D⌋`
    pub fn isqrt_d(&self) -> i64 {
        self.isqrt_d
    }

    /// `⌊ω⌋`
    pub fn floor_omega(&self) -> i64 {
        self.floor_omega
    }

    pub fn dyadic(&self) -> Dyadic {
        self.dyadic
    }

    pub fn is_ramified(&self) -> bool {
        self.dyadic == Dyadic::Ramified
    }

    pub(crate) fn square_class_table(&self) -> &[bool; 4] {
        &self.square_classes
    }

    pub(crate) fn nil_class_table(&self) -> &[bool; 4] {
        &self.nil_classes
    }

    /// `u + v·ω`
    pub fn elem(&self, u: impl Into<BigInt>, v: impl Into<BigInt>) -> QuadInt {
        QuadInt::new_unchecked(u.into(), v.into(), self.d)
    }

    pub fn int(&self, n: impl Into<BigInt>) -> QuadInt {
        self.elem(n, 0)
    }

    pub fn zero(&self) -> QuadInt {
        self.int(0)
    }

    pub fn one(&self) -> QuadInt {
        self.int(1)
    }

    pub fn omega(&self) -> QuadInt {
        self.elem(0, 1)
    }

    /// `a + b√D` with integer `a`, `b`; always an element of the ring.
    pub fn from_sqrt_form(&self, a: impl Into<BigInt>, b: impl Into<BigInt>) -> QuadInt {
        let (a, b) = (a.into(), b.into());
        match self.omega {
            OmegaKind::SqrtD => self.elem(a, b),
            // a + b√D = (a - b) + 2b·ω
            OmegaKind::HalfOnePlusSqrtD => {
                let u = &a - &b;
                self.elem(u, b * 2)
            }
        }
    }

    /// `(A + B√D)/2`, failing when that is not an algebraic integer.
    pub fn from_half_coords(&self, a2: &BigInt, b2: &BigInt) -> Result<QuadInt> {
        QuadInt::from_half_coords(self.d, a2, b2)
    }

    /// Sign of `p + q√D` for rational `p`, `q`, decided exactly.
    pub fn real_sign(&self, p: &BigRational, q: &BigRational) -> i8 {
        // Clearing the positive common denominator preserves the sign.
        let den = p.denom().lcm(q.denom());
        let pn = p.numer() * (&den / p.denom());
        let qn = q.numer() * (&den / q.denom());
        surd_sign(&pn, &qn, self.d)
    }

    pub fn is_totally_positive(&self, alpha: &QuadInt) -> bool {
        self.check(alpha);
        alpha.is_totally_positive()
    }

    fn check(&self, alpha: &QuadInt) {
        assert_eq!(alpha.d, self.d, "element of D = {} used with D = {}", alpha.d, self.d);
    }
}

/// Sign of `p + q√D` for integers `p`, `q` and non-square `D > 0`.
pub fn surd_sign(p: &BigInt, q: &BigInt, d: i64) -> i8 {
    let sp = sign_of(p);
    let sq = sign_of(q);
    if sq == 0 {
        return sp;
    }
    if sp == 0 || sp == sq {
        return sq;
    }
    // Opposite signs: compare p² with q²D.
    match (p * p).cmp(&(q * q * d)) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => unreachable!("p + q√D = 0 with q ≠ 0 needs D square"),
    }
}

fn sign_of(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// An element `u + v·ω` of the ring of integers of `ℚ(√D)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    u: BigInt,
    v: BigInt,
    d: i64,
}

impl QuadInt {
    fn new_unchecked(u: BigInt, v: BigInt, d: i64) -> Self {
        QuadInt { u, v, d }
    }

    /// Builds `u + v·ω` without a context; `d` must already be validated.
    pub(crate) fn from_parts(u: BigInt, v: BigInt, d: i64) -> Self {
        QuadInt::new_unchecked(u, v, d)
    }

    pub fn from_half_coords(d: i64, a2: &BigInt, b2: &BigInt) -> Result<QuadInt> {
        let not_integral = || Error::NotIntegral(format!("({a2} + {b2}·√{d})/2"));
        match OmegaKind::of(d) {
            OmegaKind::SqrtD => {
                if a2.is_odd() || b2.is_odd() {
                    return Err(not_integral());
                }
                Ok(QuadInt::new_unchecked(a2 / 2, b2 / 2, d))
            }
            OmegaKind::HalfOnePlusSqrtD => {
                if (a2 - b2).is_odd() {
                    return Err(not_integral());
                }
                Ok(QuadInt::new_unchecked((a2 - b2) / 2, b2.clone(), d))
            }
        }
    }

    pub fn u(&self) -> &BigInt {
        &self.u
    }

    pub fn v(&self) -> &BigInt {
        &self.v
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn omega_kind(&self) -> OmegaKind {
        OmegaKind::of(self.d)
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// `(2a, 2b)` where the element equals `a + b√D`.
    pub fn half_coords(&self) -> (BigInt, BigInt) {
        match self.omega_kind() {
            OmegaKind::SqrtD => (&self.u * 2, &self.v * 2),
            OmegaKind::HalfOnePlusSqrtD => (&self.u * 2 + &self.v, self.v.clone()),
        }
    }

    /// `(a, b)` as rationals where the element equals `a + b√D`.
    pub fn sqrt_form(&self) -> (BigRational, BigRational) {
        let (a2, b2) = self.half_coords();
        let two = BigInt::from(2);
        (BigRational::new(a2, two.clone()), BigRational::new(b2, two))
    }

    pub fn norm(&self) -> BigInt {
        match self.omega_kind() {
            OmegaKind::SqrtD => &self.u * &self.u - &self.v * &self.v * self.d,
            OmegaKind::HalfOnePlusSqrtD => {
                &self.u * &self.u + &self.u * &self.v + &self.v * &self.v * ((1 - self.d) / 4)
            }
        }
    }

    pub fn trace(&self) -> BigInt {
        match self.omega_kind() {
            OmegaKind::SqrtD => &self.u * 2,
            OmegaKind::HalfOnePlusSqrtD => &self.u * 2 + &self.v,
        }
    }

    pub fn conjugate(&self) -> QuadInt {
        match self.omega_kind() {
            OmegaKind::SqrtD => QuadInt::new_unchecked(self.u.clone(), -&self.v, self.d),
            OmegaKind::HalfOnePlusSqrtD => {
                QuadInt::new_unchecked(&self.u + &self.v, -&self.v, self.d)
            }
        }
    }

    /// Signs of the two real embeddings, `(σ₁, σ₂)` with `σ₁(√D) > 0`.
    pub fn embedding_signs(&self) -> (i8, i8) {
        let (a2, b2) = self.half_coords();
        (surd_sign(&a2, &b2, self.d), surd_sign(&a2, &-b2, self.d))
    }

    pub fn is_totally_positive(&self) -> bool {
        self.embedding_signs() == (1, 1)
    }

    pub fn is_totally_nonnegative(&self) -> bool {
        let (s1, s2) = self.embedding_signs();
        s1 >= 0 && s2 >= 0
    }

    fn same_ring(&self, other: &QuadInt) -> Result<()> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(Error::ContextMismatch { left: self.d, right: other.d })
        }
    }

    pub fn checked_add(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_ring(other)?;
        Ok(QuadInt::new_unchecked(&self.u + &other.u, &self.v + &other.v, self.d))
    }

    pub fn checked_sub(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_ring(other)?;
        Ok(QuadInt::new_unchecked(&self.u - &other.u, &self.v - &other.v, self.d))
    }

    pub fn checked_mul(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_ring(other)?;
        let (u1, v1, u2, v2) = (&self.u, &self.v, &other.u, &other.v);
        let vv = v1 * v2;
        Ok(match self.omega_kind() {
            OmegaKind::SqrtD => {
                QuadInt::new_unchecked(u1 * u2 + &vv * self.d, u1 * v2 + u2 * v1, self.d)
            }
            // ω² = (D-1)/4 + ω
            OmegaKind::HalfOnePlusSqrtD => QuadInt::new_unchecked(
                u1 * u2 + &vv * ((self.d - 1) / 4),
                u1 * v2 + u2 * v1 + vv,
                self.d,
            ),
        })
    }

    pub fn square(&self) -> QuadInt {
        self.checked_mul(self).expect("same ring")
    }

    pub fn scale(&self, k: &BigInt) -> QuadInt {
        QuadInt::new_unchecked(&self.u * k, &self.v * k, self.d)
    }

    pub fn scale_i64(&self, k: i64) -> QuadInt {
        self.scale(&BigInt::from(k))
    }

    /// Exact division by a rational integer, if it divides both coordinates.
    pub fn div_exact(&self, k: &BigInt) -> Option<QuadInt> {
        if k.is_zero() || !(&self.u % k).is_zero() || !(&self.v % k).is_zero() {
            return None;
        }
        Some(QuadInt::new_unchecked(&self.u / k, &self.v / k, self.d))
    }

    /// Representative of `±self` with `a > 0`, or `a = 0` and `b > 0`.
    pub fn canonical_sign(&self) -> QuadInt {
        let (a2, b2) = self.half_coords();
        if a2.is_negative() || (a2.is_zero() && b2.is_negative()) {
            -self
        } else {
            self.clone()
        }
    }

    /// Writes the element as `a+b·sqrtD`, or `(A+B·sqrtD)/2` for half-integers.
    pub fn to_sqrt_string(&self) -> String {
        let (a2, b2) = self.half_coords();
        if a2.is_even() && b2.is_even() {
            format_sqrt(&(a2 / 2), &(b2 / 2), self.d)
        } else {
            format!("({})/2", format_sqrt(&a2, &b2, self.d))
        }
    }
}

fn format_sqrt(a: &BigInt, b: &BigInt, d: i64) -> String {
    let mut s = a.to_string();
    if !b.is_zero() {
        s.push(if b.is_negative() { '-' } else { '+' });
        let mag = b.abs();
        if !mag.is_one() {
            s.push_str(&mag.to_string());
        }
        s.push_str("sqrt");
        s.push_str(&d.to_string());
    }
    s
}

/// Canonical ω-basis form: `u`, `u+w`, `u-3w`, ...
impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.u)?;
        if !self.v.is_zero() {
            f.write_str(if self.v.is_negative() { "-" } else { "+" })?;
            let mag = self.v.abs();
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            f.write_str("w")?;
        }
        Ok(())
    }
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [D={}]", self, self.d)
    }
}

impl Serialize for QuadInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::new_unchecked(-&self.u, -&self.v, self.d)
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        -&self
    }
}

// The operator forms panic on mixed rings; use the `checked_*` methods to get
// a `ContextMismatch` error instead.
macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&QuadInt> for &QuadInt {
            type Output = QuadInt;
            fn $method(self, rhs: &QuadInt) -> QuadInt {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<QuadInt> for QuadInt {
            type Output = QuadInt;
            fn $method(self, rhs: QuadInt) -> QuadInt {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&QuadInt> for QuadInt {
            type Output = QuadInt;
            fn $method(self, rhs: &QuadInt) -> QuadInt {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
