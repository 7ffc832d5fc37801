//! Solver, sieves and enumeration against brute force.

mod common;

use std::collections::BTreeSet;

use common::{m_vector, mu_le, oracle, set};
use proptest::prelude::*;
use sunit_core::enumeration::{refined_enumeration, refined_enumeration_mu, EnumerationConfig};
use sunit_core::sieves::{deweger_sieve, mu_length, refined_sieve, BoundPair, MuVector, SieveContext};
use sunit_core::solution::PositiveTriple;
use sunit_core::solver::{solve_sunit, SolverConfig};

const SMALL: [u64; 4] = [2, 3, 5, 7];

fn subset(mask: u32) -> Vec<u64> {
    (0..4).filter(|i| mask >> i & 1 == 1).map(|i| SMALL[i]).collect()
}

#[test]
fn solver_matches_oracle_on_all_subsets() {
    for mask in 0..16 {
        let ps = subset(mask);
        let got: BTreeSet<PositiveTriple> = solve_sunit(&set(&ps), &SolverConfig::default())
            .unwrap()
            .triples()
            .cloned()
            .collect();
        assert_eq!(got, oracle(&ps, 12), "S = {ps:?}");
    }
}

fn within(u: &[u64]) -> impl Fn(&PositiveTriple, &[u64]) -> bool + '_ {
    move |t, ps| m_vector(t, ps).iter().zip(u).all(|(&m, &b)| m as u64 <= b)
}

fn bounds_strategy() -> impl Strategy<Value = (Vec<u64>, Vec<u64>, Vec<u64>)> {
    (1u32..16).prop_flat_map(|mask| {
        let ps = subset(mask);
        let n = ps.len();
        (
            Just(ps),
            proptest::collection::vec(0u64..=5, n),
            proptest::collection::vec(0u64..=5, n),
        )
            .prop_map(|(ps, x, y)| {
                let (l, u): (Vec<u64>, Vec<u64>) = x.iter().zip(&y).map(|(&a, &b)| (a.min(b), a.max(b))).unzip();
                (ps, l, u)
            })
    })
}

fn mu_strategy() -> impl Strategy<Value = (Vec<u64>, Vec<u64>, Vec<u64>)> {
    // |S| <= 4 gives t = 1.
    (1u32..16, 0u64..=5, 0u64..=5).prop_map(|(mask, x, y)| (subset(mask), vec![x.min(y)], vec![x.max(y)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_band_matches_oracle((ps, _l, u) in bounds_strategy()) {
        let s = set(&ps);
        let got = refined_enumeration(&s, &u, &EnumerationConfig::default()).classes;
        let want: BTreeSet<_> = oracle(&ps, 12).into_iter().filter(|t| within(&u)(t, &ps)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn deweger_band_matches_oracle((ps, l, u) in bounds_strategy()) {
        let s = set(&ps);
        let b = BoundPair::new(&s, l.clone(), u.clone()).unwrap();
        let got = deweger_sieve(&s, &b, &SieveContext::default()).unwrap().classes;
        let want: BTreeSet<_> = oracle(&ps, 12)
            .into_iter()
            .filter(|t| within(&u)(t, &ps) && !within(&l)(t, &ps))
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn refined_band_matches_oracle((ps, lo, hi) in mu_strategy()) {
        let s = set(&ps);
        prop_assert_eq!(mu_length(ps.len()), 1);
        let (mlo, mhi) = (MuVector::new(lo.clone()).unwrap(), MuVector::new(hi.clone()).unwrap());
        let all = oracle(&ps, 12);
        let got = refined_sieve(&s, &mlo, &mhi, &SieveContext::default()).unwrap().classes;
        let want: BTreeSet<_> = all
            .iter()
            .filter(|t| mu_le(t, &ps, &hi) && !mu_le(t, &ps, &lo))
            .cloned()
            .collect();
        prop_assert_eq!(got, want);
        let got = refined_enumeration_mu(&s, &mhi, &EnumerationConfig::default()).unwrap().classes;
        let want: BTreeSet<_> = all.into_iter().filter(|t| mu_le(t, &ps, &hi)).collect();
        prop_assert_eq!(got, want);
    }
}

#[test]
fn refined_band_with_two_mu_entries() {
    // |S| = 6 gives t = 2.
    let ps = [2, 3, 5, 7, 11, 13];
    let s = set(&ps);
    // mu_1 <= 7 forces every exponent below 7 / log 2 < 11.
    let all = oracle(&ps, 11);
    for (lo, hi) in [(vec![4, 2], vec![6, 3]), (vec![0, 0], vec![5, 2]), (vec![6, 3], vec![7, 3])] {
        let got = refined_sieve(
            &s,
            &MuVector::new(lo.clone()).unwrap(),
            &MuVector::new(hi.clone()).unwrap(),
            &SieveContext::default(),
        )
        .unwrap()
        .classes;
        let want: BTreeSet<_> = all
            .iter()
            .filter(|t| mu_le(t, &ps, &hi) && !mu_le(t, &ps, &lo))
            .cloned()
            .collect();
        assert_eq!(got, want, "lo = {lo:?}, hi = {hi:?}");
    }
}
