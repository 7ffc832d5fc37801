//! abc triples of solved sets: radicals, qualities and Baker's explicit
//! form of the abc conjecture, `c <= (6/5) N (log N)^omega / omega!`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{
    factor_u64, primes_up_to, strip_prime, GuardedReal, PrimeSet, Rational, DEFAULT_PRECISION, DEFAULT_PRECISION_CAP,
};
use crate::error::{Error, Result};
use crate::solution::{PositiveTriple, SUnitSolution};
use crate::solver::{solve_sunit, SolverConfig};

/// Trial division bound used before Pollard rho when factoring radicals.
const TRIAL_BOUND: u64 = 1 << 16;

/// Coprime positive `a <= b`, `c = a + b`, with `N = rad(abc)`, the number
/// `omega` of primes dividing `N`, and the quality `log c / log N`.
#[derive(Clone, Debug)]
pub struct ABCTriple {
    pub a: BigUint,
    pub b: BigUint,
    pub c: BigUint,
    pub radical: BigUint,
    /// Primes dividing `abc`, increasing.
    pub primes: Vec<u64>,
    pub quality: GuardedReal,
}

impl ABCTriple {
    /// The triple `(a, b, a + b)`; fails if `gcd(a, b) != 1`, an entry is
    /// zero, or a radical cannot be factored.
    pub fn new(a: BigUint, b: BigUint, precision_cap: u32) -> Result<Self> {
        let t = PositiveTriple::new(a, b);
        if t.a.is_zero() || !t.a.gcd(&t.b).is_one() {
            return Err(Error::InvalidInput(format!("({}, {}) is not a coprime pair", t.a, t.b)));
        }
        let mut primes: Vec<u64> = Vec::new();
        for n in [&t.a, &t.b, &t.c] {
            primes.extend(prime_divisors(n)?);
        }
        primes.sort_unstable();
        primes.dedup();
        ABCTriple::with_primes(t, primes, precision_cap)
    }

    /// The triple of a class over `set`, whose prime support is known.
    pub fn from_class(t: &PositiveTriple, set: &PrimeSet, precision_cap: u32) -> Result<Self> {
        let m = t
            .m_vector(set)
            .ok_or_else(|| Error::InvalidInput(format!("({}, {}, {}) is not smooth over the set", t.a, t.b, t.c)))?;
        let primes = set
            .primes()
            .iter()
            .zip(&m)
            .filter(|&(_, &e)| e > 0)
            .map(|(&p, _)| p)
            .collect();
        ABCTriple::with_primes(t.clone(), primes, precision_cap)
    }

    fn with_primes(t: PositiveTriple, primes: Vec<u64>, precision_cap: u32) -> Result<Self> {
        let radical = primes.iter().fold(BigUint::one(), |acc, &p| acc * p);
        let quality = quality_of(&t.c, &radical, precision_cap)?;
        Ok(ABCTriple {
            a: t.a,
            b: t.b,
            c: t.c,
            radical,
            primes,
            quality,
        })
    }

    pub fn omega(&self) -> usize {
        self.primes.len()
    }

    pub fn is_excluded(&self) -> bool {
        self.c == BigUint::from(2u32)
    }

    pub fn positive_triple(&self) -> PositiveTriple {
        PositiveTriple::new(self.a.clone(), self.b.clone())
    }
}

impl PartialEq for ABCTriple {
    fn eq(&self, other: &Self) -> bool {
        (&self.a, &self.c) == (&other.a, &other.c)
    }
}

impl Eq for ABCTriple {}

/// Distinct prime divisors of `n`: trial division, then rho on a 64-bit
/// cofactor.
fn prime_divisors(n: &BigUint) -> Result<Vec<u64>> {
    let mut rest = n.clone();
    let mut out = Vec::new();
    for p in primes_up_to(TRIAL_BOUND) {
        if rest.is_one() {
            return Ok(out);
        }
        if strip_prime(&mut rest, p) > 0 {
            out.push(p);
        }
        if BigUint::from(p) * p > rest {
            break;
        }
    }
    if rest.is_one() {
        return Ok(out);
    }
    let r = rest
        .to_u64()
        .ok_or_else(|| Error::FactorizationBudget(rest.to_string()))?;
    out.extend(factor_u64(r)?.into_iter().map(|(p, _)| p));
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The abc triple of a solution: `|a|, |b|, |c|` rearranged as `a <= b < c`.
pub fn to_abc(sol: &SUnitSolution) -> Result<ABCTriple> {
    let t = sol.positive_triple();
    ABCTriple::new(t.a, t.b, DEFAULT_PRECISION_CAP)
}

/// `log c / log N` with an enclosure of width at most `10^-6`; exactly `1`
/// when `c = N`.
pub fn quality(t: &ABCTriple) -> GuardedReal {
    t.quality.clone()
}

fn quality_of(c: &BigUint, n: &BigUint, cap: u32) -> Result<GuardedReal> {
    if c == n {
        return Ok(GuardedReal::from_int(1, DEFAULT_PRECISION));
    }
    if *n < BigUint::from(2u32) {
        return Err(Error::InvalidInput("quality needs rad(abc) >= 2".into()));
    }
    let tol = Rational::new(BigInt::one(), BigInt::from(1_000_000));
    let mut prec = DEFAULT_PRECISION.min(cap);
    loop {
        let lc = GuardedReal::from_int(BigInt::from(c.clone()), prec).ln();
        let ln = GuardedReal::from_int(BigInt::from(n.clone()), prec).ln();
        let q = lc.div(&ln);
        if q.width().to_rational() <= tol {
            return Ok(q);
        }
        if prec >= cap {
            return Err(Error::PrecisionExhausted { cap });
        }
        prec = (prec * 2).min(cap);
    }
}

/// Outcome of Baker's inequality for one triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BakerVerdict {
    Holds,
    Violated,
    /// `(1, 1, 2)`, for which the inequality is not claimed.
    Excluded,
}

/// Enclosure of `(6/5) N (log N)^omega / omega!`.
pub fn baker_bound(t: &ABCTriple, precision: u32) -> GuardedReal {
    let n = GuardedReal::from_int(BigInt::from(t.radical.clone()), precision);
    let ln = n.ln();
    let mut v = GuardedReal::from_ratio(6, 5, precision).mul(&n);
    for k in 1..=t.omega() {
        v = v.mul(&ln).div_int(k as u64);
    }
    v
}

/// Decides `c <= (6/5) N (log N)^omega / omega!` with certainty, raising the
/// working precision as needed.
pub fn baker_check(t: &ABCTriple) -> Result<BakerVerdict> {
    baker_check_with_cap(t, DEFAULT_PRECISION_CAP)
}

pub fn baker_check_with_cap(t: &ABCTriple, cap: u32) -> Result<BakerVerdict> {
    if t.is_excluded() {
        return Ok(BakerVerdict::Excluded);
    }
    let c = BigInt::from(t.c.clone());
    let mut prec = DEFAULT_PRECISION.min(cap);
    loop {
        // The bound is irrational, so equality never has to be decided.
        match baker_bound(t, prec).cmp_int(&c) {
            Some(Ordering::Less) => return Ok(BakerVerdict::Violated),
            Some(_) => return Ok(BakerVerdict::Holds),
            None if prec >= cap => return Err(Error::PrecisionExhausted { cap }),
            None => prec = (prec * 2).min(cap),
        }
    }
}

/// Result of checking Baker's inequality on all solved triples with
/// `rad(abc) <= n_max`.
#[derive(Clone, Debug)]
pub struct BakerReport {
    pub n_max: u64,
    /// Prime sets that were solved (the maximal ones containing 2).
    pub sets: Vec<PrimeSet>,
    /// All triples with `rad(abc) <= n_max`, ordered by `(c, a)`.
    pub triples: Vec<ABCTriple>,
    pub violations: Vec<ABCTriple>,
    pub excluded: Vec<ABCTriple>,
}

impl BakerReport {
    /// The `k` triples of highest quality, ties broken by `(c, a)`.
    pub fn top(&self, k: usize) -> Vec<&ABCTriple> {
        let mut v: Vec<&ABCTriple> = self.triples.iter().collect();
        v.sort_by(|x, y| cmp_quality(y, x).then_with(|| x.positive_triple().cmp(&y.positive_triple())));
        v.truncate(k);
        v
    }
}

fn cmp_quality(x: &ABCTriple, y: &ABCTriple) -> Ordering {
    let (xl, xh) = (x.quality.lower(), x.quality.upper());
    let (yl, yh) = (y.quality.lower(), y.quality.upper());
    if xh < yl {
        Ordering::Less
    } else if xl > yh {
        Ordering::Greater
    } else {
        // Overlapping enclosures are ordered by midpoint.
        (xl.to_rational() + xh.to_rational()).cmp(&(yl.to_rational() + yh.to_rational()))
    }
}

/// Squarefree even `N <= n_max` not extendable by another prime: every
/// abc triple with `rad(abc) <= n_max` is a solution over one of them.
pub fn maximal_sets(n_max: u64) -> Vec<PrimeSet> {
    let primes = primes_up_to(n_max / 2);
    let mut out = Vec::new();
    fn rec(start: usize, prod: u64, cur: &mut Vec<u64>, primes: &[u64], n_max: u64, out: &mut Vec<Vec<u64>>) {
        let mut extended = false;
        for (i, &p) in primes.iter().enumerate().skip(start) {
            let Some(next) = prod.checked_mul(p).filter(|&v| v <= n_max) else {
                break;
            };
            extended = true;
            cur.push(p);
            rec(i + 1, next, cur, primes, n_max, out);
            cur.pop();
        }
        // Maximal iff no prime outside the set fits, including smaller ones.
        let smallest_missing = primes.iter().find(|p| !cur.contains(p));
        if !extended && smallest_missing.is_none_or(|&p| prod.saturating_mul(p) > n_max) {
            out.push(cur.clone());
        }
    }
    if n_max < 2 {
        return Vec::new();
    }
    let mut cur = vec![2];
    rec(1, 2, &mut cur, &primes, n_max, &mut out);
    out.into_iter()
        .map(|ps| PrimeSet::new(ps).expect("distinct primes"))
        .collect()
}

/// Solves every maximal set with `N_S <= n_max` and checks Baker's
/// inequality on all triples with `rad(abc) <= n_max`.
pub fn verify_baker(n_max: u64, config: &SolverConfig) -> Result<BakerReport> {
    if n_max < 2 {
        return Err(Error::InvalidInput("radical bound must be at least 2".into()));
    }
    let run = || -> Result<BakerReport> {
        let sets = maximal_sets(n_max);
        let inner = SolverConfig {
            threads: None,
            ..*config
        };
        let solved: Vec<Result<Vec<ABCTriple>>> = sets
            .par_iter()
            .map(|set| {
                let sols = solve_sunit(set, &inner).map_err(|e| e.in_stage(format!("S = {:?}", set.primes())))?;
                let bound = BigUint::from(n_max);
                sols.triples()
                    .map(|t| ABCTriple::from_class(t, set, config.precision_cap))
                    .filter(|r| r.as_ref().map_or(true, |a| a.radical <= bound))
                    .collect()
            })
            .collect();
        let mut all: BTreeMap<PositiveTriple, ABCTriple> = BTreeMap::new();
        for r in solved {
            for t in r? {
                all.entry(t.positive_triple()).or_insert(t);
            }
        }
        let triples: Vec<ABCTriple> = all.into_values().collect();
        let verdicts: Vec<Result<BakerVerdict>> = triples
            .par_iter()
            .map(|t| baker_check_with_cap(t, config.precision_cap))
            .collect();
        let mut violations = Vec::new();
        let mut excluded = Vec::new();
        for (t, v) in triples.iter().zip(verdicts) {
            match v? {
                BakerVerdict::Holds => {}
                BakerVerdict::Violated => violations.push(t.clone()),
                BakerVerdict::Excluded => excluded.push(t.clone()),
            }
        }
        Ok(BakerReport {
            n_max,
            sets,
            triples,
            violations,
            excluded,
        })
    };
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}
