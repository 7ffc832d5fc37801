//! Outward-rounded interval arithmetic over dyadic rationals.
//!
//! Every [`GuardedReal`] is a pair `lo <= x <= hi` of dyadic endpoints. All
//! operations round the lower endpoint toward `-inf` and the upper endpoint
//! toward `+inf`, so compositions keep enclosing the true value. The only
//! transcendental function needed is the natural logarithm, evaluated with
//! the `atanh` series in fixed point with interval bookkeeping.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 128;
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

/// `mant * 2^exp`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Round {
    Down,
    Up,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

fn shift_round(m: &BigInt, s: u64, dir: Round) -> BigInt {
    if s == 0 {
        return m.clone();
    }
    let d = pow2(s);
    match dir {
        Round::Down => m.div_floor(&d),
        Round::Up => -((-m).div_floor(&d)),
    }
}

fn div_round(a: &BigInt, b: &BigInt, dir: Round) -> BigInt {
    debug_assert!(b.is_positive());
    match dir {
        Round::Down => a.div_floor(b),
        Round::Up => -((-a).div_floor(b)),
    }
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic {
            mant: n.into(),
            exp: 0,
        }
    }

    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        Dyadic {
            mant: BigInt::from(m) * sign,
            exp: e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        Dyadic {
            mant: shift_round(&self.mant, s, dir),
            exp: self.exp + s as i64,
        }
    }

    fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = a.exp.min(b.exp);
        (
            &a.mant << (a.exp - e) as u64,
            &b.mant << (b.exp - e) as u64,
            e,
        )
    }

    fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = Dyadic::align(self, other);
        Dyadic { mant: a + b, exp: e }
    }

    fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    /// `self / other` rounded in direction `dir`; `other` must be positive.
    fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(other.mant.is_positive(), "division by a non-positive dyadic");
        let k = (prec as i64 + other.mant.bits() as i64 - self.mant.bits() as i64 + 2).max(0);
        let num = &self.mant << k as u64;
        Dyadic {
            mant: div_round(&num, &other.mant, dir),
            exp: self.exp - other.exp - k,
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shift_round(&self.mant, (-self.exp) as u64, Round::Down)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shift_round(&self.mant, (-self.exp) as u64, Round::Up)
        }
    }

    /// Nearest double (not rounded in any guaranteed direction).
    pub fn to_f64(&self) -> f64 {
        let bits = self.mant.bits() as i64;
        if bits == 0 {
            return 0.0;
        }
        let shift = (bits - 60).max(0);
        let m = (&self.mant >> shift as u64).to_f64().unwrap_or(f64::NAN);
        m * 2f64.powi((self.exp + shift).clamp(-2000, 2000) as i32)
    }

    /// Exact rational value.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), pow2((-self.exp) as u64))
        }
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Dyadic::align(self, other);
        a.cmp(&b)
    }
}

/// A certified enclosure `[lo, hi]` of a real number.
#[derive(Clone, Debug)]
pub struct GuardedReal {
    lo: Dyadic,
    hi: Dyadic,
    precision: u32,
}

impl GuardedReal {
    pub fn from_int(n: impl Into<BigInt>, precision: u32) -> Self {
        let d = Dyadic::from_int(n);
        GuardedReal {
            lo: d.clone(),
            hi: d,
            precision,
        }
    }

    pub fn zero(precision: u32) -> Self {
        GuardedReal::from_int(0, precision)
    }

    /// Encloses `num / den` (`den > 0`).
    pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>, precision: u32) -> Self {
        let num = Dyadic::from_int(num);
        let den = Dyadic::from_int(den);
        GuardedReal {
            lo: num.div(&den, precision, Round::Down),
            hi: num.div(&den, precision, Round::Up),
            precision,
        }
    }

    pub fn from_rational(q: &Rational, precision: u32) -> Self {
        GuardedReal::from_ratio(q.numer().clone(), q.denom().clone(), precision)
    }

    /// An enclosure from explicit endpoints; panics unless `lo <= hi`.
    pub fn from_bounds(lo: Dyadic, hi: Dyadic, precision: u32) -> Self {
        assert!(lo <= hi, "empty interval");
        GuardedReal { lo, hi, precision }
    }

    pub fn lower(&self) -> &Dyadic {
        &self.lo
    }

    pub fn upper(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    fn finish(lo: Dyadic, hi: Dyadic, precision: u32) -> Self {
        GuardedReal {
            lo: lo.round(precision, Round::Down),
            hi: hi.round(precision, Round::Up),
            precision,
        }
    }

    pub fn add(&self, other: &GuardedReal) -> GuardedReal {
        let p = self.precision.min(other.precision);
        GuardedReal::finish(self.lo.add(&other.lo), self.hi.add(&other.hi), p)
    }

    pub fn sub(&self, other: &GuardedReal) -> GuardedReal {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GuardedReal {
        GuardedReal {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            precision: self.precision,
        }
    }

    pub fn mul(&self, other: &GuardedReal) -> GuardedReal {
        let p = self.precision.min(other.precision);
        let c = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = c.iter().min().cloned().expect("four products");
        let hi = c.iter().max().cloned().expect("four products");
        GuardedReal::finish(lo, hi, p)
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> GuardedReal {
        self.mul(&GuardedReal::from_int(k, self.precision))
    }

    /// Division by an interval that lies strictly above zero.
    pub fn div(&self, other: &GuardedReal) -> GuardedReal {
        assert!(other.lo.signum() > 0, "divisor interval must be positive");
        let p = self.precision.min(other.precision);
        let lo = if self.lo.signum() >= 0 {
            self.lo.div(&other.hi, p, Round::Down)
        } else {
            self.lo.div(&other.lo, p, Round::Down)
        };
        let hi = if self.hi.signum() >= 0 {
            self.hi.div(&other.lo, p, Round::Up)
        } else {
            self.hi.div(&other.hi, p, Round::Up)
        };
        GuardedReal::finish(lo, hi, p)
    }

    pub fn div_int(&self, k: impl Into<BigInt>) -> GuardedReal {
        self.div(&GuardedReal::from_int(k, self.precision))
    }

    /// Natural logarithm; the interval must lie strictly above zero.
    pub fn ln(&self) -> GuardedReal {
        assert!(self.lo.signum() > 0, "ln of a non-positive interval");
        let lo = ln_dyadic(&self.lo, self.precision, Round::Down);
        let hi = ln_dyadic(&self.hi, self.precision, Round::Up);
        GuardedReal::finish(lo, hi, self.precision)
    }

    /// Enclosure of `min(self, other)`.
    pub fn min(&self, other: &GuardedReal) -> GuardedReal {
        GuardedReal {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
            precision: self.precision.min(other.precision),
        }
    }

    pub fn width(&self) -> Dyadic {
        self.hi.add(&self.lo.neg())
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64()
    }

    pub fn mid_f64(&self) -> f64 {
        (self.lo.to_f64() + self.hi.to_f64()) / 2.0
    }

    /// `floor(x)` if it is determined by the enclosure.
    pub fn floor_certain(&self) -> Option<BigInt> {
        let a = self.lo.floor();
        (a == self.hi.floor()).then_some(a)
    }

    /// `ceil(hi)`: an integer that is certainly `>= x`.
    pub fn ceil_upper(&self) -> BigInt {
        self.hi.ceil()
    }

    /// Does the enclosure contain the (exact) double `x`?
    pub fn contains_f64(&self, x: f64) -> bool {
        let d = Dyadic::from_f64(x);
        self.lo <= d && d <= self.hi
    }

    /// Does the enclosure contain the exact rational `q`?
    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lo.to_rational() <= *q && *q <= self.hi.to_rational()
    }

    /// Certified comparison with an integer; `None` if the enclosure
    /// contains `n`.
    pub fn cmp_int(&self, n: &BigInt) -> Option<Ordering> {
        let d = Dyadic::from_int(n.clone());
        if self.hi < d {
            Some(Ordering::Less)
        } else if self.lo > d {
            Some(Ordering::Greater)
        } else if self.lo == d && self.hi == d {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

impl fmt::Display for GuardedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

/// `sum z^(2k+1)/(2k+1)` for `z` in `[z_lo, z_hi]`, `0 <= z <= 1/2`, in
/// fixed point with `w` fractional bits. Returns integer bounds.
fn atanh_series(z_lo: &BigInt, z_hi: &BigInt, w: u64) -> (BigInt, BigInt) {
    let one = pow2(w);
    let z2_lo = (z_lo * z_lo).div_floor(&one);
    let z2_hi = div_round(&(z_hi * z_hi), &one, Round::Up);
    let (mut p_lo, mut p_hi) = (z_lo.clone(), z_hi.clone());
    let (mut s_lo, mut s_hi) = (BigInt::zero(), BigInt::zero());
    let mut k = 0u64;
    loop {
        let den = BigInt::from(2 * k + 1);
        s_lo += p_lo.div_floor(&den);
        s_hi += div_round(&p_hi, &den, Round::Up);
        k += 1;
        p_lo = (&p_lo * &z2_lo).div_floor(&one);
        p_hi = div_round(&(&p_hi * &z2_hi), &one, Round::Up);
        if p_hi <= BigInt::one() {
            break;
        }
    }
    // Remaining terms are bounded by a geometric tail with ratio z^2 <= 1/4.
    s_hi += (p_hi * 2u32) + 2u32;
    (s_lo, s_hi)
}

fn ln2_fixed(w: u64) -> (BigInt, BigInt) {
    let one = pow2(w);
    let z_lo = one.div_floor(&BigInt::from(3));
    let z_hi = div_round(&one, &BigInt::from(3), Round::Up);
    let (s_lo, s_hi) = atanh_series(&z_lo, &z_hi, w);
    (s_lo * 2u32, s_hi * 2u32)
}

/// `ln(x)` for a positive dyadic, rounded in direction `dir` to `prec` bits.
fn ln_dyadic(x: &Dyadic, prec: u32, dir: Round) -> Dyadic {
    let m = x.mant.clone();
    let k = m.bits();
    let e_total = x.exp + k as i64 - 1;
    let w = prec as u64 + 64 + 64 - (e_total.unsigned_abs().leading_zeros() as u64);
    let one = pow2(w);

    // f = m / 2^(k-1) in [1, 2), as a fixed-point interval.
    let (f_lo, f_hi) = if w >= k - 1 {
        let f = &m << (w - (k - 1));
        (f.clone(), f)
    } else {
        let s = (k - 1) - w;
        (
            shift_round(&m, s, Round::Down),
            shift_round(&m, s, Round::Up),
        )
    };
    // z = (f - 1) / (f + 1) is increasing in f.
    let z_lo = ((&f_lo - &one) * &one).div_floor(&(&f_lo + &one));
    let z_hi = div_round(&((&f_hi - &one) * &one), &(&f_hi + &one), Round::Up);
    let (s_lo, s_hi) = atanh_series(&z_lo.max(BigInt::zero()), &z_hi, w);
    let (lf_lo, lf_hi) = (s_lo * 2u32, s_hi * 2u32);

    let (l2_lo, l2_hi) = ln2_fixed(w);
    let e = BigInt::from(e_total);
    let (lo, hi) = if e_total >= 0 {
        (lf_lo + &e * l2_lo, lf_hi + &e * l2_hi)
    } else {
        (lf_lo + &e * l2_hi, lf_hi + &e * l2_lo)
    };
    let r = match dir {
        Round::Down => Dyadic::new(lo, -(w as i64)),
        Round::Up => Dyadic::new(hi, -(w as i64)),
    };
    r.round(prec, dir)
}

fn ln_cache() -> &'static RwLock<HashMap<(u64, u32), GuardedReal>> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u32), GuardedReal>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Enclosure of `ln n` for a positive integer `n`, memoized per precision.
pub fn ln_prime(n: u64, precision: u32) -> GuardedReal {
    assert!(n > 0, "ln(0)");
    if let Some(v) = ln_cache()
        .read()
        .expect("ln cache poisoned")
        .get(&(n, precision))
    {
        return v.clone();
    }
    let v = GuardedReal::from_int(n, precision).ln();
    ln_cache()
        .write()
        .expect("ln cache poisoned")
        .insert((n, precision), v.clone());
    v
}

/// Enclosure of the logarithmic Weil height `log max(|num|, den)`.
pub fn weil_height(x: &Rational, precision: u32) -> GuardedReal {
    if x.numer().is_zero() {
        return GuardedReal::zero(precision);
    }
    let h: BigUint = x.numer().magnitude().clone().max(x.denom().magnitude().clone());
    GuardedReal::from_int(BigInt::from(h), precision).ln()
}

/// Exact `floor(m / ln p)`, raising the precision from the default up to
/// [`DEFAULT_PRECISION_CAP`].
pub fn floor_div_log(m: u64, p: u64) -> Result<u64> {
    floor_div_log_with_cap(m, p, DEFAULT_PRECISION_CAP)
}

pub fn floor_div_log_with_cap(m: u64, p: u64, cap: u32) -> Result<u64> {
    assert!(p >= 2, "floor_div_log needs p >= 2");
    if m == 0 {
        return Ok(0);
    }
    let mut prec = DEFAULT_PRECISION.min(cap);
    loop {
        let q = GuardedReal::from_int(m, prec).div(&ln_prime(p, prec));
        if let Some(f) = q.floor_certain() {
            return Ok(f.to_u64().expect("quotient fits in u64"));
        }
        if prec >= cap {
            return Err(Error::PrecisionExhausted { cap });
        }
        prec = (prec * 2).min(cap);
    }
}
