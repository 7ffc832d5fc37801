//! Acceptance criteria; prints one PASS/FAIL line per criterion.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{m_vector, oracle, set};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Signed;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use rayon::prelude::*;
use sunit_core::abc::{verify_baker, ABCTriple};
use sunit_core::arith::{PrimeSet, Rational, DEFAULT_PRECISION_CAP};
use sunit_core::enumeration::{refined_enumeration, EnumerationConfig};
use sunit_core::lattice::{enumerate_ellipsoid, IntegerEllipsoid, IntegerLattice};
use sunit_core::relations::relation_basis;
use sunit_core::sieves::{deweger_sieve, mu_length, refined_radius, BoundPair, MuVector, SieveContext};
use sunit_core::solution::{symmetry_orbit, PositiveTriple};
use sunit_core::solver::{solve_sunit, SolutionSet, SolverConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn solve(s: &PrimeSet) -> Result<SolutionSet, String> {
    solve_sunit(s, &SolverConfig::default()).map_err(|e| format!("S = {:?}: {e}", s.primes()))
}

fn class_counts(ns: std::ops::RangeInclusive<usize>, want: &[usize]) -> Outcome {
    let mut got = Vec::new();
    for (n, &w) in ns.zip(want) {
        let clock = Instant::now();
        let c = solve(&PrimeSet::first_n(n))?.class_count();
        got.push(format!("n={n}: {c} ({:.1?})", clock.elapsed()));
        check(c == w, format!("n = {n}: {c} classes, expected {w}"))?;
    }
    Ok(got.join(", "))
}

fn showcase() -> Outcome {
    let cases: [(&[u64], u128, u128, f64); 2] = [
        (&[2, 3, 23, 109], 2, 3u128.pow(10) * 109, 1.6299),
        (&[2, 3, 5, 7, 11, 23], 11 * 11, 9 * 5u128.pow(6) * 343, 1.6260),
    ];
    let mut notes = Vec::new();
    for (ps, a, b, q) in cases {
        let s = set(ps);
        let sols = solve(&s)?;
        let t = PositiveTriple::new(BigUint::from(a), BigUint::from(b));
        check(sols.triples().any(|x| *x == t), format!("({}, {}, {}) not found over {ps:?}", t.a, t.b, t.c))?;
        let abc = ABCTriple::from_class(&t, &s, DEFAULT_PRECISION_CAP).map_err(|e| e.to_string())?;
        let lo = abc.quality.lower().to_f64();
        let hi = abc.quality.upper().to_f64();
        check(
            lo >= q - 1e-4 && hi <= q + 1e-4,
            format!("quality [{lo}, {hi}] outside {q} +- 1e-4"),
        )?;
        notes.push(format!("({}, {}, {}) q in [{lo:.7}, {hi:.7}]", t.a, t.b, t.c));
    }
    Ok(notes.join("; "))
}

fn baker() -> Outcome {
    let r = verify_baker(10_000, &SolverConfig::default()).map_err(|e| e.to_string())?;
    if let Some(v) = r.violations.first() {
        return Err(format!("{} violations, first ({}, {}, {})", r.violations.len(), v.a, v.b, v.c));
    }
    Ok(format!(
        "{} sets, {} triples, 0 violations, {} excluded",
        r.sets.len(),
        r.triples.len(),
        r.excluded.len()
    ))
}

fn subsets_of(primes: &[u64]) -> Vec<Vec<u64>> {
    (0u32..1 << primes.len())
        .map(|mask| (0..primes.len()).filter(|i| mask >> i & 1 == 1).map(|i| primes[i]).collect())
        .collect()
}

/// All vectors with entries `0..=max` of length `n`.
fn boxes(n: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn oracle_equivalence() -> Outcome {
    let mut bands = 0usize;
    for ps in subsets_of(&[2, 3, 5, 7]) {
        let s = set(&ps);
        let want = oracle(&ps, 12);
        let got: BTreeSet<PositiveTriple> = solve(&s)?.triples().cloned().collect();
        check(got == want, format!("solver differs from oracle for S = {ps:?}"))?;
        let ms: Vec<(PositiveTriple, Vec<u32>)> = want.iter().map(|t| (t.clone(), m_vector(t, &ps))).collect();
        let le = |m: &[u32], b: &[u64]| m.iter().zip(b).all(|(&x, &y)| x as u64 <= y);
        let vectors = boxes(ps.len(), 5);
        let ctx = SieveContext::default();
        let failures: Vec<String> = vectors
            .par_iter()
            .flat_map_iter(|u| {
                let mut bad = Vec::new();
                let band: BTreeSet<_> = ms.iter().filter(|(_, m)| le(m, u)).map(|(t, _)| t.clone()).collect();
                if refined_enumeration(&s, u, &EnumerationConfig::default()).classes != band {
                    bad.push(format!("enumeration S = {ps:?}, u = {u:?}"));
                }
                for l in vectors.iter().filter(|l| l.iter().zip(u).all(|(a, b)| a <= b)) {
                    let want: BTreeSet<_> = band
                        .iter()
                        .filter(|t| !le(&ms.iter().find(|(x, _)| x == *t).unwrap().1, l))
                        .cloned()
                        .collect();
                    let b = BoundPair::new(&s, l.clone(), u.clone()).unwrap();
                    match deweger_sieve(&s, &b, &ctx) {
                        Ok(out) if out.classes == want => {}
                        _ => bad.push(format!("sieve S = {ps:?}, l = {l:?}, u = {u:?}")),
                    }
                }
                bad
            })
            .collect();
        check(failures.is_empty(), failures.first().cloned().unwrap_or_default())?;
        bands += vectors.len() + vectors.iter().map(|u| u.iter().map(|x| x + 1).product::<u64>() as usize).sum::<usize>();
    }
    Ok(format!("16 sets, solver and all bound vectors with entries <= 5 ({bands} band checks) agree with brute force"))
}

fn subgroup_order(gens: &[u64], m: u64) -> u64 {
    let mut seen = HashSet::from([1 % m]);
    let mut frontier = vec![1 % m];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = x * g % m;
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen.len() as u64
}

fn structural() -> Outcome {
    // Solution-set invariants on the subset lattice of {2, 3, 5, 7, 11}.
    let solved: BTreeMap<Vec<u64>, SolutionSet> = subsets_of(&[2, 3, 5, 7, 11])
        .into_iter()
        .map(|ps| solve(&set(&ps)).map(|s| (ps, s)))
        .collect::<Result<_, _>>()?;
    for (ps, sols) in &solved {
        let n = sols.solution_count();
        let c = sols.class_count();
        check(n == if c == 0 { 0 } else { 6 * c - 3 }, format!("count identity fails for {ps:?}"))?;
        check(ps.contains(&2) || c == 0, format!("{ps:?} lacks 2 but has solutions"))?;
        let xs: HashSet<Rational> = sols.solutions().map(|s| s.x().clone()).collect();
        for sol in sols.solutions() {
            for o in symmetry_orbit(sol) {
                check(xs.contains(o.x()), format!("{ps:?} not closed under symmetry"))?;
            }
        }
        for (sub, sub_sols) in &solved {
            if sub.iter().all(|p| ps.contains(p)) {
                let big: BTreeSet<_> = sols.triples().collect();
                check(
                    sub_sols.triples().all(|t| big.contains(t)),
                    format!("monotonicity fails for {sub:?} in {ps:?}"),
                )?;
            }
        }
    }

    // Relation lattices for every modulus up to 500.
    let pool = [2u64, 3, 5, 7, 11, 13];
    for m in 2u64..=500 {
        let units: Vec<u64> = pool.iter().copied().filter(|&p| m.gcd(&p) == 1).collect();
        for k in 1..=units.len() {
            let gens = &units[..k];
            let big: Vec<BigUint> = gens.iter().map(|&g| BigUint::from(g)).collect();
            let rel = relation_basis(&big, &BigUint::from(m)).map_err(|e| e.to_string())?;
            let det = IntegerLattice::new(rel.basis().clone()).map_err(|e| e.to_string())?.covolume();
            check(
                det.abs() == BigInt::from(subgroup_order(gens, m)),
                format!("determinant mismatch for {gens:?} mod {m}"),
            )?;
        }
    }

    // Fincke-Pohst against box search in dimensions 1..=4.
    let mut runner = TestRunner::deterministic();
    let strategy = (1usize..=4).prop_flat_map(|d| {
        (
            proptest::collection::vec(proptest::collection::vec(-4i64..=4, d), d),
            proptest::collection::vec(1i64..=6, d),
            0i64..=60,
        )
    });
    let mut lattices = 0;
    for _ in 0..500 {
        let (basis, w, bound) = strategy.new_tree(&mut runner).unwrap().current();
        let m: Vec<Vec<BigInt>> = basis.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let Ok(lat) = IntegerLattice::new(m) else {
            continue;
        };
        lattices += 1;
        let weights: Vec<BigInt> = w.iter().map(|&x| BigInt::from(x)).collect();
        let e = IntegerEllipsoid::diagonal(&weights, BigInt::from(bound));
        let got = enumerate_ellipsoid(&lat, &e, None).map_err(|e| e.to_string())?;
        let r: Vec<u64> = w.iter().map(|&wi| ((bound / wi) as f64).sqrt() as u64 + 1).collect();
        let mut want: Vec<Vec<BigInt>> = Vec::new();
        for v in boxes(w.len(), 2 * r.iter().max().unwrap()) {
            let v: Vec<BigInt> = v.iter().zip(&r).map(|(&x, &ri)| BigInt::from(x as i64 - ri as i64)).collect();
            if v.iter().zip(&r).any(|(x, &ri)| x.abs() > BigInt::from(ri)) {
                continue;
            }
            if e.contains(&v) && lat.contains(&v) {
                want.push(v);
            }
        }
        want.sort();
        check(got == want, format!("enumeration differs from box search for {basis:?}, {w:?}, {bound}"))?;
    }

    // Squared radius of the refined sieve.
    for s in 6..=24usize {
        let t = mu_length(s);
        for n in 1..=300u64 {
            let r = refined_radius(s - 1, &MuVector::lower_schedule(n + 1, t), t);
            check(r <= BigInt::from(7 * n * n), format!("radius above 7 n^2 for |S| = {s}, n = {n}"))?;
        }
    }
    Ok(format!(
        "32 sets, relation lattices mod <= 500, {lattices} random lattices, radius for |S| <= 24"
    ))
}

fn determinism() -> Outcome {
    let s = PrimeSet::first_n(4);
    let render = |threads| -> Result<String, String> {
        let cfg = SolverConfig {
            threads: Some(threads),
            ..Default::default()
        };
        let sols = solve_sunit(&s, &cfg).map_err(|e| e.to_string())?;
        Ok(sols
            .classes
            .iter()
            .zip(&sols.provenance)
            .map(|(c, p)| format!("{} {:?} {p}\n", c.representative, c.orbit))
            .collect())
    };
    let base = render(1)?;
    for threads in [4, 8] {
        check(render(threads)? == base, format!("output with {threads} threads differs"))?;
    }
    Ok(format!("{} bytes identical for 1, 4, 8 threads", base.len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 class counts n = 1..6", Box::new(|| class_counts(1..=6, &[1, 4, 17, 63, 190, 545]))),
        ("2 class counts n = 7, 8", Box::new(|| class_counts(7..=8, &[1433, 3649]))),
        ("3 abc showcase", Box::new(showcase)),
        ("4 Baker check, radical <= 10000", Box::new(baker)),
        ("5 oracle equivalence", Box::new(oracle_equivalence)),
        ("6 structural invariants", Box::new(structural)),
        ("7 determinism across threads", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let clock = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = clock.elapsed();
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{elapsed:.1?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{elapsed:.1?}]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
