//! Arbitrary-precision ball arithmetic.
//!
//! A [`Dyadic`] is an exact number `man * 2^exp`. A [`Ball`] is a dyadic
//! midpoint with a dyadic radius; every operation returns a ball that
//! encloses the exact result for all inputs inside the operand balls.
//! Midpoints are rounded to the requested precision and the rounding error
//! is folded into the radius. Radii are kept to [`RAD_BITS`] bits, rounded up.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const RAD_BITS: u64 = 30;

#[derive(Clone, Debug)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        Self { man, exp }
    }

    pub fn zero() -> Self {
        Self::new(BigInt::zero(), 0)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::new(n, 0)
    }

    pub fn from_i64(n: i64) -> Self {
        Self::new(BigInt::from(n), 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Self::new(BigInt::one(), k)
    }

    /// Exact conversion. Panics on non-finite input.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite float {x}");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self::new(BigInt::from(m) * sign, e)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Self::new(self.man.abs(), self.exp)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.man, self.exp)
    }

    /// An exponent `e` with `|self| < 2^e`; `i64::MIN` for zero.
    pub fn mag_exp(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.man.bits() as i64
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Self::new(self.man.clone(), self.exp + k)
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &o.man << (o.exp - e) as usize;
        Self::new(a + b, e)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.man * &o.man, self.exp + o.exp)
    }

    pub fn cmp_value(&self, o: &Self) -> Ordering {
        self.sub(o).signum().cmp(&0)
    }

    pub fn max_value(a: &Self, b: &Self) -> Self {
        if a.cmp_value(b) == Ordering::Less {
            b.clone()
        } else {
            a.clone()
        }
    }

    /// Rounds the mantissa to at most `prec` bits (toward minus infinity).
    /// Returns the rounded value and an upper bound on the error.
    pub fn round(&self, prec: u64) -> (Self, Self) {
        let bits = self.man.bits();
        if bits <= prec {
            return (self.clone(), Self::zero());
        }
        let shift = bits - prec;
        let man = &self.man >> shift as usize;
        let exp = self.exp + shift as i64;
        (Self::new(man, exp), Self::pow2(exp))
    }

    /// Upper bound of `|self|` with a short mantissa.
    pub fn mag_up(&self) -> Self {
        let a = self.man.abs();
        let bits = a.bits();
        if bits <= RAD_BITS {
            return Self::new(a, self.exp);
        }
        let shift = bits - RAD_BITS;
        Self::new((a >> shift as usize) + 1u32, self.exp + shift as i64)
    }

    /// Lower bound of `|self|` with a short mantissa.
    pub fn mag_down(&self) -> Self {
        let a = self.man.abs();
        let bits = a.bits();
        if bits <= RAD_BITS {
            return Self::new(a, self.exp);
        }
        let shift = bits - RAD_BITS;
        Self::new(a >> shift as usize, self.exp + shift as i64)
    }

    fn quotient_parts(a: &Self, b: &Self, prec: u64) -> (BigInt, BigInt, i64) {
        let k = prec as i64 + b.man.bits() as i64 - a.man.bits() as i64 + 2;
        let (num, den) = if k >= 0 {
            (&a.man << k as usize, b.man.clone())
        } else {
            (a.man.clone(), &b.man << (-k) as usize)
        };
        (num, den, a.exp - b.exp - k)
    }

    /// Truncated quotient with about `prec` bits and an error bound.
    /// Panics if `b` is zero.
    pub fn div(a: &Self, b: &Self, prec: u64) -> (Self, Self) {
        assert!(!b.is_zero(), "dyadic division by zero");
        if a.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let (num, den, exp) = Self::quotient_parts(a, b, prec);
        (Self::new(num / den, exp), Self::pow2(exp))
    }

    /// Upper bound for `|a / b|`.
    pub fn div_up(a: &Self, b: &Self) -> Self {
        assert!(!b.is_zero(), "dyadic division by zero");
        if a.is_zero() {
            return Self::zero();
        }
        let (num, den, exp) = Self::quotient_parts(&a.abs(), &b.abs(), RAD_BITS);
        Self::new(num / den + 1u32, exp)
    }

    /// Lower bound for `|a / b|`.
    pub fn div_down(a: &Self, b: &Self) -> Self {
        assert!(!b.is_zero(), "dyadic division by zero");
        let (num, den, exp) = Self::quotient_parts(&a.abs(), &b.abs(), RAD_BITS);
        Self::new(num / den, exp)
    }

    fn sqrt_parts(&self) -> (BigInt, i64) {
        assert!(self.signum() >= 0, "square root of a negative dyadic");
        let mut shift = (2 * RAD_BITS + 4).saturating_sub(self.man.bits()) as i64;
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = &self.man << shift as usize;
        (m.sqrt(), (self.exp - shift) / 2)
    }

    pub fn sqrt_up(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (r, e) = self.sqrt_parts();
        Self::new(r + 1u32, e)
    }

    pub fn sqrt_down(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (r, e) = self.sqrt_parts();
        Self::new(r, e)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as usize
        } else {
            self.man.div_floor(&(BigInt::one() << (-self.exp) as usize))
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            ((&self.man >> s as usize), self.exp + s as i64)
        } else {
            (self.man.clone(), self.exp)
        };
        let m = m.to_f64().unwrap_or(f64::NAN);
        let e = e.clamp(-4000, 4000) as i32;
        m * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

/// Real ball `[mid - rad, mid + rad]`.
#[derive(Clone, Debug)]
pub struct Ball {
    mid: Dyadic,
    rad: Dyadic,
}

impl Ball {
    pub fn new(mid: Dyadic, rad: Dyadic) -> Self {
        Self {
            mid,
            rad: rad.mag_up(),
        }
    }

    pub fn exact(mid: Dyadic) -> Self {
        Self {
            mid,
            rad: Dyadic::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::exact(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::exact(Dyadic::from_i64(1))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::exact(Dyadic::from_bigint(n.clone()))
    }

    pub fn from_i64(n: i64) -> Self {
        Self::exact(Dyadic::from_i64(n))
    }

    pub fn from_rational(q: &BigRational, prec: u64) -> Self {
        let num = Dyadic::from_bigint(q.numer().clone());
        if q.denom().is_one() {
            return Self::exact(num);
        }
        let den = Dyadic::from_bigint(q.denom().clone());
        let (mid, err) = Dyadic::div(&num, &den, prec);
        Self::new(mid, err)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn lo(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn hi(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    /// Upper bound of `|x|` over the ball.
    pub fn abs_hi(&self) -> Dyadic {
        self.mid.abs().add(&self.rad)
    }

    /// Lower bound of `|x|` over the ball (zero if the ball straddles zero).
    pub fn abs_lo(&self) -> Dyadic {
        let d = self.mid.abs().sub(&self.rad);
        if d.signum() <= 0 {
            Dyadic::zero()
        } else {
            d
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs().cmp_value(&self.rad) != Ordering::Greater
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.mid.sub(x).abs().cmp_value(&self.rad) != Ordering::Greater
    }

    pub fn is_positive(&self) -> bool {
        self.lo().signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi().signum() < 0
    }

    /// The only integer in the ball, if there is exactly one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let lo = self.lo().ceil();
        let hi = self.hi().floor();
        (lo == hi).then_some(lo)
    }

    /// `true` when every point of `self` is `<=` every point of `o`.
    pub fn certainly_le(&self, o: &Self) -> bool {
        self.hi().cmp_value(&o.lo()) != Ordering::Greater
    }

    pub fn certainly_lt(&self, o: &Self) -> bool {
        self.hi().cmp_value(&o.lo()) == Ordering::Less
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        !self.certainly_lt(o) && !o.certainly_lt(self)
    }

    fn rounded(exact_mid: Dyadic, rad: Dyadic, prec: u64) -> Self {
        let (mid, err) = exact_mid.round(prec);
        Self::new(mid, rad.add(&err))
    }

    pub fn neg(&self) -> Self {
        Self {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
        }
    }

    pub fn add(&self, o: &Self, prec: u64) -> Self {
        Self::rounded(self.mid.add(&o.mid), self.rad.add(&o.rad), prec)
    }

    pub fn sub(&self, o: &Self, prec: u64) -> Self {
        Self::rounded(self.mid.sub(&o.mid), self.rad.add(&o.rad), prec)
    }

    pub fn mul(&self, o: &Self, prec: u64) -> Self {
        let rad = self
            .mid
            .abs()
            .mul(&o.rad)
            .add(&o.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&o.rad));
        Self::rounded(self.mid.mul(&o.mid), rad, prec)
    }

    pub fn sqr(&self, prec: u64) -> Self {
        self.mul(self, prec)
    }

    /// `None` when the divisor ball contains zero.
    pub fn div(&self, o: &Self, prec: u64) -> Option<Self> {
        let den_lo = o.abs_lo();
        if den_lo.is_zero() {
            return None;
        }
        let (q, err_q) = Dyadic::div(&self.mid, &o.mid, prec);
        let num = o
            .mid
            .abs()
            .mul(&err_q)
            .add(&self.rad)
            .add(&q.abs().mul(&o.rad));
        Some(Self::new(q, Dyadic::div_up(&num, &den_lo)))
    }

    pub fn pow(&self, k: u32, prec: u64) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr(prec);
            }
        }
        acc
    }

    /// Enclosure of the square root of the non-negative part of the ball.
    pub fn sqrt_nonneg(&self) -> Self {
        let hi = self.hi();
        let lo = self.lo();
        let up = if hi.signum() <= 0 {
            Dyadic::zero()
        } else {
            hi.sqrt_up()
        };
        let down = if lo.signum() <= 0 {
            Dyadic::zero()
        } else {
            lo.sqrt_down()
        };
        let mid = up.add(&down).mul_pow2(-1);
        let rad = up.sub(&down).mul_pow2(-1);
        Self::new(mid, rad)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64()
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} +/- {:.3e}]", self.mid, self.rad.to_f64())
    }
}

/// Complex rectangle `re + i*im`.
#[derive(Clone, Debug)]
pub struct CBall {
    pub re: Ball,
    pub im: Ball,
}

impl CBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        Self { re, im }
    }

    pub fn real(re: Ball) -> Self {
        Self::new(re, Ball::zero())
    }

    pub fn zero() -> Self {
        Self::real(Ball::zero())
    }

    pub fn one() -> Self {
        Self::real(Ball::one())
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::real(Ball::from_bigint(n))
    }

    pub fn from_rational(q: &BigRational, prec: u64) -> Self {
        Self::real(Ball::from_rational(q, prec))
    }

    pub fn add(&self, o: &Self, prec: u64) -> Self {
        Self::new(self.re.add(&o.re, prec), self.im.add(&o.im, prec))
    }

    pub fn sub(&self, o: &Self, prec: u64) -> Self {
        Self::new(self.re.sub(&o.re, prec), self.im.sub(&o.im, prec))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn mul(&self, o: &Self, prec: u64) -> Self {
        let re = self
            .re
            .mul(&o.re, prec)
            .sub(&self.im.mul(&o.im, prec), prec);
        let im = self
            .re
            .mul(&o.im, prec)
            .add(&self.im.mul(&o.re, prec), prec);
        Self::new(re, im)
    }

    pub fn scale(&self, k: &Ball, prec: u64) -> Self {
        Self::new(self.re.mul(k, prec), self.im.mul(k, prec))
    }

    /// `|z|^2`.
    pub fn norm_sq(&self, prec: u64) -> Ball {
        self.re.sqr(prec).add(&self.im.sqr(prec), prec)
    }

    pub fn abs(&self, prec: u64) -> Ball {
        self.norm_sq(prec).sqrt_nonneg()
    }

    pub fn div(&self, o: &Self, prec: u64) -> Option<Self> {
        let n = o.norm_sq(prec);
        let num = self.mul(&o.conj(), prec);
        Some(Self::new(num.re.div(&n, prec)?, num.im.div(&n, prec)?))
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Largest of the two component radii.
    pub fn rad(&self) -> Dyadic {
        Dyadic::max_value(self.re.rad(), self.im.rad())
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }

    /// The rational integer enclosed, if the real part holds exactly one
    /// integer and the imaginary part contains zero.
    pub fn unique_integer(&self) -> Option<BigInt> {
        if !self.im.contains_zero() {
            return None;
        }
        self.re.unique_integer()
    }
}

impl fmt::Display for CBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i{}", self.re, self.im)
    }
}
