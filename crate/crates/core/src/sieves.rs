//! Lattice sieves for solutions in a band of heights.
//!
//! Both sieves use the same principle: if `q^e` divides `c` in `a + b = c`
//! then `(a/b)^2 == 1 (mod q^e)`, so the exponent vector of `a/b` lies in the
//! relation lattice of the squares of the remaining primes. Short vectors of
//! that lattice are enumerated inside an ellipsoid that contains every
//! admissible exponent vector, and each candidate is checked exactly.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{
    floor_div_log_with_cap, ln_prime, ExponentVector, GuardedReal, PrimeSet, DEFAULT_PRECISION,
    DEFAULT_PRECISION_CAP,
};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_ellipsoid_with_stats, IntegerEllipsoid, IntegerLattice};
use crate::relations::RelationCache;
use crate::solution::{PositiveTriple, SUnitSolution};

/// Exponent bounds `0 <= l <= u` indexed by a prime set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundPair {
    primes: Vec<u64>,
    l: Vec<u64>,
    u: Vec<u64>,
}

impl BoundPair {
    pub fn new(set: &PrimeSet, l: Vec<u64>, u: Vec<u64>) -> Result<Self> {
        if l.len() != set.len() || u.len() != set.len() {
            return Err(Error::InvalidInput("one bound per prime required".into()));
        }
        if l.iter().zip(&u).any(|(a, b)| a > b) {
            return Err(Error::InvalidInput("lower bound exceeds upper bound".into()));
        }
        Ok(BoundPair {
            primes: set.primes().to_vec(),
            l,
            u,
        })
    }

    /// `l_p = floor(m_lo / log p)`, `u_p = floor(m_hi / log p)`: the band
    /// `m_lo < M(x, y) <= m_hi`.
    pub fn from_heights(set: &PrimeSet, m_lo: u64, m_hi: u64) -> Result<Self> {
        BoundPair::from_heights_with_cap(set, m_lo, m_hi, DEFAULT_PRECISION_CAP)
    }

    pub fn from_heights_with_cap(set: &PrimeSet, m_lo: u64, m_hi: u64, cap: u32) -> Result<Self> {
        let l = set
            .primes()
            .iter()
            .map(|&p| floor_div_log_with_cap(m_lo, p, cap))
            .collect::<Result<Vec<_>>>()?;
        let u = set
            .primes()
            .iter()
            .map(|&p| floor_div_log_with_cap(m_hi, p, cap))
            .collect::<Result<Vec<_>>>()?;
        BoundPair::new(set, l, u)
    }

    pub fn lower(&self, set: &PrimeSet) -> ExponentVector {
        ExponentVector::from_exponents(set, self.l.iter().map(|&x| x as i64).collect())
    }

    pub fn upper(&self, set: &PrimeSet) -> ExponentVector {
        ExponentVector::from_exponents(set, self.u.iter().map(|&x| x as i64).collect())
    }

    pub fn l(&self) -> &[u64] {
        &self.l
    }

    pub fn u(&self) -> &[u64] {
        &self.u
    }

    /// `m <= u` and `m` not `<= l` (componentwise).
    pub fn admits(&self, m: &[u32]) -> bool {
        let le_u = m.iter().zip(&self.u).all(|(&a, &b)| a as u64 <= b);
        let le_l = m.iter().zip(&self.l).all(|(&a, &b)| a as u64 <= b);
        le_u && !le_l
    }
}

/// `t = max(1, floor(|S| / 3))`.
pub fn mu_length(s: usize) -> usize {
    (s / 3).max(1)
}

/// Nonincreasing integer bounds `mu_1 >= ... >= mu_t >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MuVector(Vec<u64>);

impl MuVector {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("mu vector must be nonempty".into()));
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("mu vector must be nonincreasing".into()));
        }
        Ok(MuVector(entries))
    }

    /// `floor((n - 1) * (1, 1/2, ..., 1/t))`.
    pub fn lower_schedule(n: u64, t: usize) -> Self {
        MuVector((1..=t as u64).map(|j| n.saturating_sub(1) / j).collect())
    }

    /// `(m, m, ..., m)`.
    pub fn constant(m: u64, t: usize) -> Self {
        MuVector(vec![m; t])
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn t(&self) -> usize {
        self.0.len()
    }

    pub fn le(&self, other: &MuVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// Exact test of `mu(.) <= mu` over a prime set: with
/// `k_{j,p} = floor(mu_j / log p)`, the `j`-th largest of `ord_p(n) log p` is
/// at most `mu_j` iff fewer than `j` primes have `ord_p(n) > k_{j,p}`.
#[derive(Clone, Debug)]
pub struct MuTest {
    k: Vec<Vec<u64>>,
}

impl MuTest {
    pub fn new(primes: &[u64], mu: &MuVector) -> Result<Self> {
        MuTest::with_cap(primes, mu, DEFAULT_PRECISION_CAP)
    }

    pub fn with_cap(primes: &[u64], mu: &MuVector, cap: u32) -> Result<Self> {
        let k = mu
            .entries()
            .iter()
            .map(|&m| primes.iter().map(|&p| floor_div_log_with_cap(m, p, cap)).collect())
            .collect::<Result<Vec<Vec<u64>>>>()?;
        Ok(MuTest { k })
    }

    /// Largest admissible exponent for prime index `i`: `floor(mu_1 / log p)`.
    pub fn max_exponent(&self, i: usize) -> u64 {
        self.k[0][i]
    }

    /// `mu_j(n) <= mu_j` for all `j`, for a single integer with the given
    /// exponents.
    pub fn holds_for(&self, exps: &[u32]) -> bool {
        self.k.iter().enumerate().all(|(j, kj)| {
            exps.iter()
                .zip(kj)
                .filter(|&(&e, &k)| e as u64 > k)
                .count()
                <= j
        })
    }

    /// `mu(x, y) <= mu` for a triple with per-prime valuations `(a, b, c)`.
    pub fn holds(&self, vals: &[[u32; 3]]) -> bool {
        (0..3).all(|w| {
            let e: Vec<u32> = vals.iter().map(|v| v[w]).collect();
            self.holds_for(&e)
        })
    }
}

/// Enclosures of `(mu_1, ..., mu_t)(x, y)`: the `j`-th largest of
/// `ord_p(n) log p`, maximized over `n` in the triple.
pub fn mu_of_solution(sol: &SUnitSolution, set: &PrimeSet, t: usize) -> Option<Vec<GuardedReal>> {
    let vals = sol.positive_triple().valuations(set)?;
    // Comparing p^e as integers orders the values e log p exactly.
    let mut best: Vec<BigUint> = vec![BigUint::one(); t];
    for w in 0..3 {
        let mut powers: Vec<BigUint> = set
            .primes()
            .iter()
            .zip(&vals)
            .map(|(&p, v)| BigUint::from(p).pow(v[w]))
            .collect();
        powers.sort_by(|a, b| b.cmp(a));
        for (j, slot) in best.iter_mut().enumerate() {
            if let Some(v) = powers.get(j) {
                if v > slot {
                    *slot = v.clone();
                }
            }
        }
    }
    Some(
        best.into_iter()
            .map(|v| GuardedReal::from_int(BigInt::from(v), DEFAULT_PRECISION).ln())
            .collect(),
    )
}

/// Work counters of a sieve run; all are deterministic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SieveStats {
    pub lattices: u64,
    pub fp_nodes: u64,
    pub fp_points: u64,
    pub candidates_checked: u64,
}

impl SieveStats {
    pub fn merge(&mut self, o: &SieveStats) {
        self.lattices += o.lattices;
        self.fp_nodes += o.fp_nodes;
        self.fp_points += o.fp_points;
        self.candidates_checked += o.candidates_checked;
    }
}

/// Symmetry classes found by a sieve or enumeration.
#[derive(Clone, Debug, Default)]
pub struct SieveOutput {
    pub classes: BTreeSet<PositiveTriple>,
    pub stats: SieveStats,
}

impl SieveOutput {
    /// All solutions of all classes, sorted by class then by `x`.
    pub fn solutions(&self) -> Vec<SUnitSolution> {
        self.classes.iter().flat_map(PositiveTriple::orbit).collect()
    }
}

/// Shared state for repeated sieve calls.
pub struct SieveContext {
    pub cache: RelationCache,
    /// Per-lattice cap on enumerated points.
    pub fp_cap: Option<usize>,
    pub precision_cap: u32,
}

impl Default for SieveContext {
    fn default() -> Self {
        SieveContext::with_cap(None)
    }
}

impl SieveContext {
    pub fn with_cap(fp_cap: Option<usize>) -> Self {
        SieveContext {
            cache: RelationCache::new(),
            fp_cap,
            precision_cap: DEFAULT_PRECISION_CAP,
        }
    }
}

/// One lattice job: `gamma` over `primes` with `prod p^{2 gamma_p} == 1`
/// modulo `modulus`.
struct Job {
    primes: Vec<u64>,
    modulus_factors: Vec<(u64, u32)>,
    modulus: BigUint,
}

fn squares(primes: &[u64]) -> Vec<BigUint> {
    primes.iter().map(|&p| BigUint::from(p * p)).collect()
}

fn run_job(
    job: &Job,
    ellipsoid: &IntegerEllipsoid,
    ctx: &SieveContext,
    cap: Option<usize>,
) -> Result<(Vec<Vec<BigInt>>, SieveStats)> {
    let rel = ctx.cache.get(&squares(&job.primes), &job.modulus_factors)?;
    let lattice = if rel.dim() == 0 {
        IntegerLattice::standard(0)
    } else {
        IntegerLattice::new(rel.basis().clone())?
    };
    let (points, st) = enumerate_ellipsoid_with_stats(&lattice, ellipsoid, cap)?;
    let stats = SieveStats {
        lattices: 1,
        fp_nodes: st.nodes,
        fp_points: st.points,
        candidates_checked: 0,
    };
    Ok((points, stats))
}

/// The two triples `a + b = c` encoded by `gamma` (with `a/b = -+prod p^gamma`)
/// whose `c` is divisible by `modulus`, as positive triples, provided every
/// `|gamma_p| <= cube_p`.
fn reconstruct(
    primes: &[u64],
    gamma: &[BigInt],
    cube: &[u64],
    modulus: &BigUint,
) -> Vec<(BigUint, BigUint, BigUint)> {
    let mut a = BigUint::one();
    let mut b = BigUint::one();
    for ((&p, g), &bound) in primes.iter().zip(gamma).zip(cube) {
        let e = match g.magnitude().to_u64() {
            Some(e) if e <= bound => e as u32,
            _ => return Vec::new(),
        };
        if e == 0 {
            continue;
        }
        if g.is_positive() {
            a *= BigUint::from(p).pow(e);
        } else {
            b *= BigUint::from(p).pow(e);
        }
    }
    let mut out = Vec::new();
    // b = -b': c = a - b'
    if a != b {
        let (hi, lo) = if a > b { (&a, &b) } else { (&b, &a) };
        let c = hi - lo;
        if (&c % modulus).is_zero() {
            out.push((lo.clone(), c, hi.clone()));
        }
    }
    // b = +b': c = a + b'
    let c = &a + &b;
    if (&c % modulus).is_zero() {
        out.push((a, b, c));
    }
    out
}

fn into_positive(t: (BigUint, BigUint, BigUint)) -> PositiveTriple {
    let (x, y, z) = t;
    debug_assert_eq!(&x + &y, z);
    PositiveTriple::new(x, y)
}

/// de Weger's sieve: every solution with `m(x,y) <= u` and `m(x,y)` not
/// `<= l`, closed under symmetry.
pub fn deweger_sieve(set: &PrimeSet, bounds: &BoundPair, ctx: &SieveContext) -> Result<SieveOutput> {
    let (shrunk, l, u) = shrink(set, bounds);
    let mut out = SieveOutput::default();
    if !shrunk.contains(2) {
        return Ok(out);
    }
    let jobs = deweger_jobs(&shrunk, &l, &u);
    let results: Vec<Result<(BTreeSet<PositiveTriple>, SieveStats)>> = jobs
        .par_iter()
        .map(|(qi, job)| {
            let cube: Vec<u64> = job.primes.iter().map(|p| u[shrunk.index_of(*p).unwrap()]).collect();
            let ellipsoid = cube_ellipsoid(&cube);
            let (points, mut stats) = run_job(job, &ellipsoid, ctx, ctx.fp_cap)
                .map_err(|e| e.in_stage(format!("de Weger sieve, q = {}", shrunk.primes()[*qi])))?;
            let mut found = BTreeSet::new();
            for gamma in &points {
                for t in reconstruct(&job.primes, gamma, &cube, &job.modulus) {
                    stats.candidates_checked += 1;
                    let t = into_positive(t);
                    if let Some(m) = t.m_vector(&shrunk) {
                        let full = lift(&shrunk, set, &m);
                        if bounds.admits(&full) {
                            found.insert(t);
                        }
                    }
                }
            }
            Ok((found, stats))
        })
        .collect();
    for r in results {
        let (found, stats) = r?;
        out.classes.extend(found);
        out.stats.merge(&stats);
    }
    Ok(out)
}

/// Does the lattice stage of de Weger's sieve return only `gamma = 0` for
/// every `q`? Uses a cap of one point per lattice.
pub fn deweger_trivial(set: &PrimeSet, bounds: &BoundPair, ctx: &SieveContext) -> Result<(bool, SieveStats)> {
    let (shrunk, l, u) = shrink(set, bounds);
    if !shrunk.contains(2) {
        return Ok((true, SieveStats::default()));
    }
    let jobs = deweger_jobs(&shrunk, &l, &u);
    let results: Vec<Result<(bool, SieveStats)>> = jobs
        .par_iter()
        .map(|(_, job)| {
            let cube: Vec<u64> = job.primes.iter().map(|p| u[shrunk.index_of(*p).unwrap()]).collect();
            match run_job(job, &cube_ellipsoid(&cube), ctx, Some(1)) {
                Ok((_, st)) => Ok((true, st)),
                Err(Error::CandidateOverflow { .. }) => Ok((
                    false,
                    SieveStats {
                        lattices: 1,
                        fp_points: 2,
                        ..Default::default()
                    },
                )),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut all = true;
    let mut stats = SieveStats::default();
    for r in results {
        let (ok, st) = r?;
        all &= ok;
        stats.merge(&st);
    }
    Ok((all, stats))
}

fn shrink(set: &PrimeSet, bounds: &BoundPair) -> (PrimeSet, Vec<u64>, Vec<u64>) {
    let keep: Vec<usize> = (0..set.len()).filter(|&i| bounds.u[i] >= 1).collect();
    let shrunk = set.filter(|i, _| bounds.u[i] >= 1);
    let l = keep.iter().map(|&i| bounds.l[i]).collect();
    let u = keep.iter().map(|&i| bounds.u[i]).collect();
    (shrunk, l, u)
}

/// Extends an m-vector over a subset to the full set with zeros.
fn lift(sub: &PrimeSet, full: &PrimeSet, m: &[u32]) -> Vec<u32> {
    full.primes()
        .iter()
        .map(|&p| sub.index_of(p).map_or(0, |i| m[i]))
        .collect()
}

fn deweger_jobs(shrunk: &PrimeSet, l: &[u64], u: &[u64]) -> Vec<(usize, Job)> {
    shrunk
        .primes()
        .iter()
        .enumerate()
        .filter(|&(i, _)| l[i] < u[i])
        .map(|(i, &q)| {
            let e = (l[i] + 1) as u32;
            let primes: Vec<u64> = shrunk.primes().iter().copied().filter(|&p| p != q).collect();
            (
                i,
                Job {
                    primes,
                    modulus_factors: vec![(q, e)],
                    modulus: BigUint::from(q).pow(e),
                },
            )
        })
        .collect()
}

/// `sum (x_p / u_p)^2 <= d` scaled to integers by `lcm(u_p^2)`.
fn cube_ellipsoid(u: &[u64]) -> IntegerEllipsoid {
    let sq: Vec<BigInt> = u.iter().map(|&x| BigInt::from(x) * x).collect();
    let lcm = sq.iter().fold(BigInt::one(), |acc, x| acc.lcm(x));
    let weights: Vec<BigInt> = sq.iter().map(|x| &lcm / x).collect();
    IntegerEllipsoid::diagonal(&weights, lcm * u.len())
}

/// Refined sieve: every solution with `mu(x,y) <= mu_hi` and `mu(x,y)` not
/// `<= mu_lo`, closed under symmetry.
pub fn refined_sieve(set: &PrimeSet, mu_lo: &MuVector, mu_hi: &MuVector, ctx: &SieveContext) -> Result<SieveOutput> {
    let t = mu_length(set.len());
    if mu_lo.t() != t || mu_hi.t() != t {
        return Err(Error::InvalidInput(format!("mu vectors must have length {t}")));
    }
    let mut out = SieveOutput::default();
    let test_hi = MuTest::with_cap(set.primes(), mu_hi, ctx.precision_cap)?;
    let test_lo = MuTest::with_cap(set.primes(), mu_lo, ctx.precision_cap)?;
    let shrunk = set.filter(|i, _| test_hi.max_exponent(i) >= 1);
    if !shrunk.contains(2) {
        return Ok(out);
    }
    let umax: Vec<u64> = shrunk
        .primes()
        .iter()
        .map(|&p| test_hi.max_exponent(set.index_of(p).unwrap()))
        .collect();
    let jobs = refined_jobs(&shrunk, &umax, mu_lo, mu_hi, t, ctx.precision_cap)?;
    let results: Vec<Result<(BTreeSet<PositiveTriple>, SieveStats)>> = jobs
        .par_iter()
        .map(|job| {
            let ellipsoid = log_ellipsoid(&job.primes, mu_hi, t)?;
            let cube: Vec<u64> = job
                .primes
                .iter()
                .map(|p| umax[shrunk.index_of(*p).unwrap()])
                .collect();
            let (points, mut stats) = run_job(job, &ellipsoid, ctx, ctx.fp_cap).map_err(|e| {
                let tset: Vec<u64> = job.modulus_factors.iter().map(|f| f.0).collect();
                e.in_stage(format!("refined sieve, T = {tset:?}"))
            })?;
            let mut found = BTreeSet::new();
            for gamma in &points {
                for t in reconstruct(&job.primes, gamma, &cube, &job.modulus) {
                    stats.candidates_checked += 1;
                    let t = into_positive(t);
                    if let Some(v) = t.valuations(set) {
                        if test_hi.holds(&v) && !test_lo.holds(&v) {
                            found.insert(t);
                        }
                    }
                }
            }
            Ok((found, stats))
        })
        .collect();
    for r in results {
        let (found, stats) = r?;
        out.classes.extend(found);
        out.stats.merge(&stats);
    }
    Ok(out)
}

fn refined_jobs(
    shrunk: &PrimeSet,
    umax: &[u64],
    mu_lo: &MuVector,
    mu_hi: &MuVector,
    t: usize,
    cap: u32,
) -> Result<Vec<Job>> {
    let s = shrunk.len();
    let mut jobs = Vec::new();
    for j in 1..=t.min(s) {
        let lo = mu_lo.entries()[j - 1];
        if lo >= mu_hi.entries()[j - 1] {
            continue;
        }
        for tset in subsets_of_size(s, j) {
            let mut factors = Vec::with_capacity(j);
            let mut feasible = true;
            for &i in &tset {
                let q = shrunk.primes()[i];
                let e = floor_div_log_with_cap(lo, q, cap)? + 1;
                if e > umax[i] {
                    feasible = false;
                    break;
                }
                factors.push((q, e as u32));
            }
            if !feasible {
                continue;
            }
            let primes: Vec<u64> = (0..s)
                .filter(|i| !tset.contains(i))
                .map(|i| shrunk.primes()[i])
                .collect();
            let modulus = factors
                .iter()
                .fold(BigUint::one(), |acc, &(q, e)| acc * BigUint::from(q).pow(e));
            jobs.push(Job {
                primes,
                modulus_factors: factors,
                modulus,
            });
        }
    }
    Ok(jobs)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Squared radius `sum_{i=1}^{k} (mu_{min(ceil(i/2), t)})^2`.
pub fn refined_radius(k: usize, mu_hi: &MuVector, t: usize) -> BigInt {
    (1..=k)
        .map(|i| {
            let m = mu_hi.entries()[i.div_ceil(2).min(t) - 1];
            BigInt::from(m) * m
        })
        .sum()
}

/// `sum (x_p log p)^2 <= R`, outer-rounded to an integer ellipsoid.
fn log_ellipsoid(primes: &[u64], mu_hi: &MuVector, t: usize) -> Result<IntegerEllipsoid> {
    if primes.is_empty() {
        return Ok(IntegerEllipsoid::diagonal(&[], BigInt::zero()));
    }
    let weights: Vec<GuardedReal> = primes
        .iter()
        .map(|&p| {
            let l = ln_prime(p, DEFAULT_PRECISION);
            l.mul(&l)
        })
        .collect();
    let r = GuardedReal::from_int(refined_radius(primes.len(), mu_hi, t), DEFAULT_PRECISION);
    IntegerEllipsoid::from_real_diagonal(&weights, &r)
}
