//! Exact integer arithmetic, prime sets, S-smooth factoring and guarded
//! real enclosures.

mod guarded;
mod primes;

pub use guarded::{
    floor_div_log, floor_div_log_with_cap, ln_prime, weil_height, Dyadic, GuardedReal,
    DEFAULT_PRECISION, DEFAULT_PRECISION_CAP,
};
pub use primes::{factor_u64, first_primes, is_prime, primes_up_to, PrimeSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Integer exponents indexed by the primes of a [`PrimeSet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    primes: Vec<u64>,
    exps: Vec<i64>,
}

impl ExponentVector {
    pub fn zeros(set: &PrimeSet) -> Self {
        ExponentVector {
            primes: set.primes().to_vec(),
            exps: vec![0; set.len()],
        }
    }

    /// Builds a vector from exponents listed in the order of `set`.
    pub fn from_exponents(set: &PrimeSet, exps: Vec<i64>) -> Self {
        assert_eq!(set.len(), exps.len(), "one exponent per prime");
        ExponentVector {
            primes: set.primes().to_vec(),
            exps,
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exps
    }

    pub fn get(&self, p: u64) -> Option<i64> {
        self.primes.binary_search(&p).ok().map(|i| self.exps[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.primes.iter().copied().zip(self.exps.iter().copied())
    }

    /// Componentwise `self <= other`; both must share the index set.
    pub fn le(&self, other: &ExponentVector) -> bool {
        assert_eq!(self.primes, other.primes, "index sets differ");
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `prod p^e`; negative exponents are not allowed here.
    pub fn value(&self) -> BigUint {
        self.iter().fold(BigUint::one(), |acc, (p, e)| {
            assert!(e >= 0, "value() of a vector with negative entries");
            acc * BigUint::from(p).pow(e as u32)
        })
    }
}

/// `ord_p(n)` for nonzero `n`.
pub fn valuation(n: &BigUint, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let mut k = 0;
    let mut m = n.clone();
    let p = BigUint::from(p);
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

/// Divides all factors of `p` out of `n` in place, returning the exponent.
pub(crate) fn strip_prime(n: &mut BigUint, p: u64) -> u32 {
    let mut k = 0;
    if p == 2 {
        let tz = n.trailing_zeros().unwrap_or(0);
        *n >>= tz;
        return tz as u32;
    }
    loop {
        let (q, r) = n.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return k;
        }
        *n = q;
        k += 1;
    }
}

/// Exponent vector of `|n|` over `set` if `|n|` is S-smooth, else `None`.
pub fn factor_smooth(n: &BigInt, set: &PrimeSet) -> Option<ExponentVector> {
    assert!(!n.is_zero(), "factor_smooth(0)");
    let mut m = n.magnitude().clone();
    let mut exps = Vec::with_capacity(set.len());
    for &p in set.primes() {
        exps.push(strip_prime(&mut m, p) as i64);
    }
    m.is_one().then(|| ExponentVector::from_exponents(set, exps))
}

/// Radical of a nonzero integer whose prime support lies in `set`, or
/// `None` when it does not.
pub fn radical_over(n: &BigInt, set: &PrimeSet) -> Option<BigUint> {
    let e = factor_smooth(n, set)?;
    Some(
        e.iter()
            .filter(|&(_, k)| k > 0)
            .fold(BigUint::one(), |acc, (p, _)| acc * p),
    )
}
