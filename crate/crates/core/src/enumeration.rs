//! Meet-in-the-middle enumeration of all solutions with `m(x, y) <= u`.
//!
//! Every coprime triple splits `S` into the supports of its three entries;
//! one of them, together with the primes dividing none, carries weight at
//! least `w(S)^(1/3)` where `w(T) = prod_{p in T} (1 + u_p)`. Call that part
//! `S_a`. For each such `S_a` the two other entries `b`, `c` are enumerated
//! with exact supports `S_b`, `S_c`, and `a = b + c` or `|b - c|` is tested
//! for being `S_a`-smooth: its `S_a2`-part is divided out and the rest is
//! looked up in a precomputed set `X` of `S_a1`-smooth numbers.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{floor_div_log_with_cap, strip_prime, PrimeSet, DEFAULT_PRECISION_CAP};
use crate::error::Result;
use crate::sieves::{mu_length, MuTest, MuVector};
use crate::solution::PositiveTriple;

/// Subsets up to this size are split exhaustively; larger ones greedily.
const EXHAUSTIVE_SPLIT_MAX: usize = 16;

/// Rough per-entry footprint of `X`, used against the memory budget.
pub const X_ENTRY_BYTES: usize = 64;

#[derive(Clone, Copy, Debug)]
pub struct EnumerationConfig {
    /// Memory budget for a single set `X` in bytes; above it, candidates are
    /// factored directly instead.
    pub mem_budget: usize,
    pub precision_cap: u32,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            mem_budget: 1 << 30,
            precision_cap: DEFAULT_PRECISION_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub subsets: u64,
    pub x_entries: u64,
    pub pairs: u64,
    /// Subsets for which `X` exceeded the memory budget.
    pub fallbacks: u64,
}

impl EnumerationStats {
    pub fn merge(&mut self, o: &EnumerationStats) {
        self.subsets += o.subsets;
        self.x_entries += o.x_entries;
        self.pairs += o.pairs;
        self.fallbacks += o.fallbacks;
    }

    /// Deterministic work measure.
    pub fn work(&self) -> u64 {
        self.x_entries + self.pairs
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnumerationOutput {
    pub classes: BTreeSet<PositiveTriple>,
    pub stats: EnumerationStats,
}

fn weight(u: &[u64], idx: &[usize]) -> BigUint {
    idx.iter().fold(BigUint::one(), |acc, &i| acc * (u[i] + 1))
}

/// Splits `sa` into `(sa1, sa2)` with `w(sa1)^2 <= w_total` and `w(sa1)`
/// as large as possible (exhaustively for small `sa`).
fn tight_split(sa: &[usize], u: &[u64], w_total: &BigUint) -> (Vec<usize>, Vec<usize>) {
    let n = sa.len();
    let fits = |idx: &[usize]| {
        let w = weight(u, idx);
        &w * &w <= *w_total
    };
    let chosen: Vec<usize> = if n <= EXHAUSTIVE_SPLIT_MAX {
        let mut best: (BigUint, u32) = (BigUint::zero(), 0);
        for mask in 0u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|&k| mask >> k & 1 == 1).map(|k| sa[k]).collect();
            if fits(&idx) {
                let w = weight(u, &idx);
                if w > best.0 {
                    best = (w, mask);
                }
            }
        }
        (0..n).filter(|&k| best.1 >> k & 1 == 1).map(|k| sa[k]).collect()
    } else {
        let mut order: Vec<usize> = sa.to_vec();
        order.sort_by_key(|&i| std::cmp::Reverse(u[i]));
        let mut inside: Vec<usize> = Vec::new();
        for &i in &order {
            inside.push(i);
            if !fits(&inside) {
                inside.pop();
            }
        }
        // Single swaps while they increase the weight.
        loop {
            let cur = weight(u, &inside);
            let mut improved = None;
            'search: for (pos, &i) in inside.iter().enumerate() {
                for &j in sa.iter().filter(|j| !inside.contains(j)) {
                    if u[j] <= u[i] {
                        continue;
                    }
                    let mut cand = inside.clone();
                    cand[pos] = j;
                    if fits(&cand) && weight(u, &cand) > cur {
                        improved = Some(cand);
                        break 'search;
                    }
                }
            }
            match improved {
                Some(c) => inside = c,
                None => break,
            }
        }
        inside.sort_unstable();
        inside
    };
    let rest = sa.iter().copied().filter(|i| !chosen.contains(i)).collect();
    (chosen, rest)
}

/// All products `prod_{i in idx} p_i^{e_i}` with `min_exp <= e_i <= u_i`,
/// optionally keeping only those passing the mu test (which is monotone, so
/// failing prefixes are pruned).
fn smooth_numbers(primes: &[u64], idx: &[usize], u: &[u64], min_exp: u32, mu: Option<&MuTest>) -> Vec<BigUint> {
    struct Walk<'a> {
        primes: &'a [u64],
        idx: &'a [usize],
        u: &'a [u64],
        min_exp: u32,
        mu: Option<&'a MuTest>,
        exps: Vec<u32>,
        out: Vec<BigUint>,
    }
    impl Walk<'_> {
        fn rec(&mut self, k: usize, value: BigUint) {
            if k == self.idx.len() {
                self.out.push(value);
                return;
            }
            let i = self.idx[k];
            let p = BigUint::from(self.primes[i]);
            let mut v = value * p.pow(self.min_exp);
            for e in self.min_exp..=self.u[i] as u32 {
                self.exps[i] = e;
                if self.mu.is_some_and(|t| !t.holds_for(&self.exps)) {
                    break;
                }
                self.rec(k + 1, v.clone());
                v *= &p;
            }
            self.exps[i] = 0;
        }
    }
    if idx.iter().any(|&i| (u[i] as u32) < min_exp) {
        return Vec::new();
    }
    let mut walk = Walk {
        primes,
        idx,
        u,
        min_exp,
        mu,
        exps: vec![0; primes.len()],
        out: Vec::new(),
    };
    walk.rec(0, BigUint::one());
    walk.out
}

struct Problem<'a> {
    set: &'a PrimeSet,
    u: Vec<u64>,
    mu: Option<MuTest>,
    w_total: BigUint,
    budget_entries: usize,
}

impl Problem<'_> {
    fn accept(&self, t: &PositiveTriple) -> bool {
        let Some(v) = t.valuations(self.set) else {
            return false;
        };
        let bounded = v
            .iter()
            .zip(&self.u)
            .all(|(e, &u)| (e[0] + e[1] + e[2]) as u64 <= u);
        bounded && self.mu.as_ref().is_none_or(|m| m.holds(&v))
    }

    /// Is `n` of the form `a1 * a2` with `a2` the full `S_a2`-part within
    /// bounds and `a1` in `X` (or factoring over `S_a1` within bounds)?
    fn splits(&self, n: &BigUint, sa1: &[usize], sa2: &[usize], x: Option<&HashSet<BigUint>>) -> bool {
        let primes = self.set.primes();
        let mut rest = n.clone();
        for &i in sa2 {
            if strip_prime(&mut rest, primes[i]) as u64 > self.u[i] {
                return false;
            }
        }
        match x {
            Some(x) => x.contains(&rest),
            None => {
                for &i in sa1 {
                    if strip_prime(&mut rest, primes[i]) as u64 > self.u[i] {
                        return false;
                    }
                }
                rest.is_one()
            }
        }
    }

    fn run_subset(&self, sa: &[usize]) -> (BTreeSet<PositiveTriple>, EnumerationStats) {
        let s = self.set.len();
        let primes = self.set.primes();
        let mut stats = EnumerationStats {
            subsets: 1,
            ..Default::default()
        };
        let mut found = BTreeSet::new();
        let (sa1, sa2) = tight_split(sa, &self.u, &self.w_total);
        let x_size = weight(&self.u, &sa1);
        let within_budget = x_size <= BigUint::from(self.budget_entries);
        let x: Option<HashSet<BigUint>> = within_budget.then(|| {
            smooth_numbers(primes, &sa1, &self.u, 0, self.mu.as_ref())
                .into_iter()
                .collect()
        });
        match &x {
            Some(x) => stats.x_entries = x.len() as u64,
            None => stats.fallbacks = 1,
        }
        let rest: Vec<usize> = (0..s).filter(|i| !sa.contains(i)).collect();
        let r = rest.len();
        for mask in 0u64..(1 << r) {
            let sb: Vec<usize> = (0..r).filter(|&k| mask >> k & 1 == 1).map(|k| rest[k]).collect();
            let sc: Vec<usize> = (0..r).filter(|&k| mask >> k & 1 == 0).map(|k| rest[k]).collect();
            if !pair_is_canonical(&sb, &sc, &self.u) {
                continue;
            }
            let bs = smooth_numbers(primes, &sb, &self.u, 1, self.mu.as_ref());
            if bs.is_empty() {
                continue;
            }
            let cs = smooth_numbers(primes, &sc, &self.u, 1, self.mu.as_ref());
            for b in &bs {
                for c in &cs {
                    stats.pairs += 1;
                    let sum = b + c;
                    if self.splits(&sum, &sa1, &sa2, x.as_ref()) {
                        let t = PositiveTriple::new(b.clone(), c.clone());
                        if self.accept(&t) {
                            found.insert(t);
                        }
                    }
                    if b != c {
                        let diff = if b > c { b - c } else { c - b };
                        if self.splits(&diff, &sa1, &sa2, x.as_ref()) {
                            let t = PositiveTriple::new(diff, b.min(c).clone());
                            if self.accept(&t) {
                                found.insert(t);
                            }
                        }
                    }
                }
            }
        }
        (found, stats)
    }
}

/// Each unordered pair `{S_b, S_c}` is visited once: `S_b` must come first
/// under `(w, min)` with `min {} = 0`; the pair of two empty sets is kept.
fn pair_is_canonical(sb: &[usize], sc: &[usize], u: &[u64]) -> bool {
    if sb.is_empty() && sc.is_empty() {
        return true;
    }
    let key = |t: &[usize]| (weight(u, t), t.first().map_or(0, |&i| i + 1));
    key(sb) < key(sc)
}

fn enumerate(set: &PrimeSet, u: Vec<u64>, mu: Option<MuTest>, cfg: &EnumerationConfig) -> EnumerationOutput {
    let s = set.len();
    let w_total = weight(&u, &(0..s).collect::<Vec<_>>());
    let problem = Problem {
        set,
        u,
        mu,
        w_total,
        budget_entries: cfg.mem_budget / X_ENTRY_BYTES,
    };
    let w3 = &problem.w_total;
    let subsets: Vec<Vec<usize>> = (0u64..(1 << s))
        .map(|mask| (0..s).filter(|&k| mask >> k & 1 == 1).collect::<Vec<usize>>())
        .filter(|sa| {
            let w = weight(&problem.u, sa);
            &w * &w * &w >= *w3
        })
        .collect();
    let parts: Vec<(BTreeSet<PositiveTriple>, EnumerationStats)> =
        subsets.par_iter().map(|sa| problem.run_subset(sa)).collect();
    let mut out = EnumerationOutput::default();
    for (found, st) in parts {
        out.classes.extend(found);
        out.stats.merge(&st);
    }
    out
}

/// Every solution with `m(x, y) <= u`, closed under symmetry.
pub fn refined_enumeration(set: &PrimeSet, u: &[u64], cfg: &EnumerationConfig) -> EnumerationOutput {
    assert_eq!(u.len(), set.len(), "one bound per prime");
    let keep = set.filter(|i, _| u[i] >= 1);
    let u: Vec<u64> = (0..set.len()).filter(|&i| u[i] >= 1).map(|i| u[i]).collect();
    enumerate(&keep, u, None, cfg)
}

/// Every solution with `mu(x, y) <= mu`, closed under symmetry.
pub fn refined_enumeration_mu(set: &PrimeSet, mu: &MuVector, cfg: &EnumerationConfig) -> Result<EnumerationOutput> {
    let t = mu_length(set.len());
    if mu.t() != t {
        return Err(crate::error::Error::InvalidInput(format!(
            "mu vector must have length {t}"
        )));
    }
    let u: Vec<u64> = set
        .primes()
        .iter()
        .map(|&p| floor_div_log_with_cap(mu.entries()[0], p, cfg.precision_cap))
        .collect::<Result<_>>()?;
    let keep = set.filter(|i, _| u[i] >= 1);
    let u: Vec<u64> = (0..set.len()).filter(|&i| u[i] >= 1).map(|i| u[i]).collect();
    // Thresholds are recomputed over the kept primes so that indices agree.
    let test = MuTest::with_cap(keep.primes(), mu, cfg.precision_cap)?;
    Ok(enumerate(&keep, u, Some(test), cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn set(ps: &[u64]) -> PrimeSet {
        PrimeSet::new(ps.iter().copied()).unwrap()
    }

    fn triples(out: &EnumerationOutput) -> Vec<(u64, u64, u64)> {
        out.classes
            .iter()
            .map(|t| (t.a.to_u64().unwrap(), t.b.to_u64().unwrap(), t.c.to_u64().unwrap()))
            .collect()
    }

    #[test]
    fn examples() {
        let cfg = EnumerationConfig::default();
        let out = refined_enumeration(&set(&[2, 3]), &[3, 2], &cfg);
        assert_eq!(triples(&out), vec![(1, 1, 2), (1, 2, 3), (1, 3, 4), (1, 8, 9)]);
        assert!(refined_enumeration(&set(&[2, 3]), &[0, 0], &cfg).classes.is_empty());
        let out = refined_enumeration(&set(&[2]), &[1], &cfg);
        assert_eq!(triples(&out), vec![(1, 1, 2)]);
    }

    #[test]
    fn mu_examples() {
        let cfg = EnumerationConfig::default();
        let mu = |v: u64| MuVector::new(vec![v]).unwrap();
        let out = refined_enumeration_mu(&set(&[2, 3]), &mu(3), &cfg).unwrap();
        assert_eq!(out.classes.len(), 4);
        assert!(refined_enumeration_mu(&set(&[2, 3]), &mu(0), &cfg).unwrap().classes.is_empty());
        let out = refined_enumeration_mu(&set(&[2, 3, 5]), &mu(2), &cfg).unwrap();
        // All entries of each triple are built from p^e with e log p <= 2:
        // 2, 4, 3, 5 and products of distinct such prime powers.
        assert!(triples(&out).contains(&(1, 5, 6)));
        assert!(!triples(&out).contains(&(1, 8, 9)));
    }

    #[test]
    fn fallback_matches_hash_lookup() {
        let s = set(&[2, 3, 5, 7]);
        let u = [6, 4, 3, 2];
        let a = refined_enumeration(&s, &u, &EnumerationConfig::default());
        let b = refined_enumeration(&s, &u, &EnumerationConfig {
                mem_budget: 0,
                ..Default::default()
            });
        assert_eq!(a.classes, b.classes);
        assert!(b.stats.fallbacks > 0);
    }

    #[test]
    fn split_is_tight() {
        let u = [3, 3, 3, 3];
        let w_total = BigUint::from(256u32);
        let (a1, a2) = tight_split(&[0, 1, 2, 3], &u, &w_total);
        assert_eq!(weight(&u, &a1), BigUint::from(16u32));
        assert_eq!(a1.len() + a2.len(), 4);
    }
}
