use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};

/// Miller-Rabin witnesses that are deterministic for all n < 3.3 * 10^24.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Pollard rho iteration budget per factor.
const RHO_BUDGET: u64 = 1 << 22;

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= n`, by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// The `k` smallest primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut n = 2u64;
    while out.len() < k {
        if is_prime(n) {
            out.push(n);
        }
        n += 1;
    }
    out
}

fn rho(n: u64, seed: u64) -> Option<u64> {
    // Brent's variant with batched gcds.
    let f = |x: u64| (mul_mod(x, x, n) + seed) % n;
    let mut y = seed % n;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    let mut spent = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let m = (r - k).min(128);
            for _ in 0..m {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
            spent += m;
        }
        r *= 2;
        if spent > RHO_BUDGET {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_into(n: u64, out: &mut Vec<u64>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    for seed in 1..64 {
        if let Some(d) = rho(n, seed) {
            split_into(d, out)?;
            split_into(n / d, out)?;
            return Ok(());
        }
    }
    Err(Error::FactorizationBudget(n.to_string()))
}

/// Prime factorization as sorted `(prime, exponent)` pairs; trial division
/// followed by Pollard rho.
pub fn factor_u64(mut n: u64) -> Result<Vec<(u64, u32)>> {
    assert!(n > 0, "factor_u64(0)");
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
    }
    let mut p = 53u64;
    while p * p <= n && p < 10_000 {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
        p += 2;
    }
    split_into(n, &mut primes)?;
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// A finite set of rational primes, kept sorted, with its radical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrimeSet {
    primes: Vec<u64>,
    radical: BigUint,
}

impl PrimeSet {
    /// Builds a prime set; input order does not matter, duplicates and
    /// non-primes are rejected.
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut v: Vec<u64> = primes.into_iter().collect();
        for &p in &v {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
        }
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePrime(w[0]));
        }
        let radical = v.iter().fold(BigUint::one(), |acc, &p| acc * p);
        Ok(PrimeSet { primes: v, radical })
    }

    /// The set of the `k` smallest primes.
    pub fn first_n(k: usize) -> Self {
        PrimeSet::new(first_primes(k)).expect("first primes are prime")
    }

    pub fn empty() -> Self {
        PrimeSet {
            primes: Vec::new(),
            radical: BigUint::one(),
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn radical(&self) -> &BigUint {
        &self.radical
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok()
    }

    /// The subset selected by `keep`, in order.
    pub fn filter(&self, mut keep: impl FnMut(usize, u64) -> bool) -> PrimeSet {
        let primes: Vec<u64> = self
            .primes
            .iter()
            .enumerate()
            .filter(|&(i, &p)| keep(i, p))
            .map(|(_, &p)| p)
            .collect();
        PrimeSet::new(primes).expect("subset of a valid prime set")
    }

    pub fn is_subset_of(&self, other: &PrimeSet) -> bool {
        self.primes.iter().all(|&p| other.contains(p))
    }

    /// All nonempty sets with radical at most `n_max`, ordered by radical.
    pub fn all_with_radical_at_most(n_max: u64) -> Vec<PrimeSet> {
        fn rec(start: usize, prod: u64, cur: &mut Vec<u64>, primes: &[u64], n_max: u64, out: &mut Vec<(u64, Vec<u64>)>) {
            for (i, &p) in primes.iter().enumerate().skip(start) {
                let Some(next) = prod.checked_mul(p).filter(|&v| v <= n_max) else {
                    break;
                };
                cur.push(p);
                out.push((next, cur.clone()));
                rec(i + 1, next, cur, primes, n_max, out);
                cur.pop();
            }
        }
        let primes = primes_up_to(n_max);
        let mut out = Vec::new();
        rec(0, 1, &mut Vec::new(), &primes, n_max, &mut out);
        out.sort_unstable();
        out.into_iter()
            .map(|(_, ps)| PrimeSet::new(ps).expect("distinct primes"))
            .collect()
    }
}

impl fmt::Debug for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeSet{:?}", self.primes)
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.primes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}
