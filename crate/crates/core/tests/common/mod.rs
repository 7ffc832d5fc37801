//! Brute-force references shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use sunit_core::arith::PrimeSet;
use sunit_core::solution::PositiveTriple;

pub fn set(ps: &[u64]) -> PrimeSet {
    PrimeSet::new(ps.iter().copied()).unwrap()
}

/// Numbers whose prime support is exactly `primes`, each exponent in
/// `1..=max_exp`.
fn exact_support(primes: &[u64], max_exp: u32) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    for &p in primes {
        let mut next = Vec::new();
        for n in &out {
            let mut v = n.clone();
            for _ in 0..max_exp {
                v *= p;
                next.push(v.clone());
            }
        }
        out = next;
    }
    out
}

/// Strips `p` from `n`, returning the exponent.
fn strip(n: &mut BigUint, p: u64) -> u32 {
    let p = BigUint::from(p);
    let mut k = 0;
    while (&*n % &p).is_zero() {
        *n /= &p;
        k += 1;
    }
    k
}

/// All coprime `a <= b`, `c = a + b` with `a`, `b`, `c` smooth over
/// `primes` and every exponent at most `max_exp`, by trying every split of
/// `primes` into the supports of `a`, `b` and the rest.
pub fn oracle(primes: &[u64], max_exp: u32) -> BTreeSet<PositiveTriple> {
    let s = primes.len();
    let mut out = BTreeSet::new();
    let mut labels = vec![0u8; s];
    loop {
        let pick = |l: u8| -> Vec<u64> { (0..s).filter(|&i| labels[i] == l).map(|i| primes[i]).collect() };
        let (pa, pb, rest) = (pick(1), pick(2), pick(0));
        let (xs, ys) = (exact_support(&pa, max_exp), exact_support(&pb, max_exp));
        for a in &xs {
            for b in &ys {
                let mut c = a + b;
                if rest.iter().all(|&p| strip(&mut c, p) <= max_exp) && c.is_one() {
                    out.insert(PositiveTriple::new(a.clone(), b.clone()));
                }
            }
        }
        // Next labelling in base 3.
        let mut i = 0;
        while i < s && labels[i] == 2 {
            labels[i] = 0;
            i += 1;
        }
        if i == s {
            break;
        }
        labels[i] += 1;
    }
    out
}

/// `ord_p(abc)` for each prime.
pub fn m_vector(t: &PositiveTriple, primes: &[u64]) -> Vec<u32> {
    primes
        .iter()
        .map(|&p| [&t.a, &t.b, &t.c].iter().map(|n| strip(&mut (*n).clone(), p)).sum())
        .collect()
}

/// `mu_j(x, y) <= mu_j` for all `j`, in floating point: the `j`-th largest
/// `ord_p(n) log p` over each entry `n` of the triple.
pub fn mu_le(t: &PositiveTriple, primes: &[u64], mu: &[u64]) -> bool {
    [&t.a, &t.b, &t.c].iter().all(|n| {
        let mut v: Vec<f64> = primes
            .iter()
            .map(|&p| strip(&mut (*n).clone(), p) as f64 * (p as f64).ln())
            .collect();
        v.sort_by(|x, y| y.partial_cmp(x).unwrap());
        mu.iter().enumerate().all(|(j, &m)| v.get(j).is_none_or(|&x| x <= m as f64))
    })
}

pub fn tuple(t: &PositiveTriple) -> (u64, u64, u64) {
    (t.a.to_u64().unwrap(), t.b.to_u64().unwrap(), t.c.to_u64().unwrap())
}
