//! Certified initial height bound `M0` for solutions of `x + y = 1`.
//!
//! Three explicit bounds are evaluated with interval arithmetic: the two
//! closed-form bounds in `N_S`, and `(6/5) * alpha_bar(16 N_S) + 28` where
//! `alpha_bar = min(beta_bar, beta_bar*)` is the fast upper bound for the
//! congruence-number bound `alpha`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::{factor_u64, GuardedReal, PrimeSet, DEFAULT_PRECISION};
use crate::error::Result;

const PREC: u32 = DEFAULT_PRECISION;

fn gr(n: impl Into<BigInt>) -> GuardedReal {
    GuardedReal::from_int(n, PREC)
}

fn ratio(num: i64, den: i64) -> GuardedReal {
    GuardedReal::from_ratio(num, den, PREC)
}

/// `(5/2) N ln N + 9 N` and
/// `(12/5) N ln N + (9/10) N lnlnln(16 N) + 8.26 N + 28` for `N = N_S`.
pub fn simplified_bounds(set: &PrimeSet) -> (GuardedReal, GuardedReal) {
    let n = gr(BigInt::from(set.radical().clone()));
    let ln_n = n.ln();
    let n_ln_n = n.mul(&ln_n);
    let a = ratio(5, 2).mul(&n_ln_n).add(&n.mul_int(9));
    let lll = n.mul_int(16).ln().ln().ln();
    let b = ratio(12, 5)
        .mul(&n_ln_n)
        .add(&ratio(9, 10).mul(&n).mul(&lll))
        .add(&ratio(826, 100).mul(&n))
        .add(&gr(28));
    (a, b)
}

/// The integer data entering `beta_bar` and `beta_bar*` for level `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaBarInputs {
    pub n: u64,
    /// `N * nu*(N)` with `nu*(p) = 1`, `nu*(p^k) = 1 - 1/p^2` for `k >= 2`.
    pub nu: u128,
    /// `floor((nu + 1) / 12)`, an upper bound for the newform dimension.
    pub m_upper: u128,
    pub genus: u128,
    /// `floor(N/6 * prod_{p | N} (p + 1))`.
    pub l: u128,
    /// `floor(N/6 * prod_{p | N} (1 + 1/p))`.
    pub l_star: u128,
}

impl AlphaBarInputs {
    pub fn new(n: u64) -> Result<Self> {
        assert!(n >= 1, "level must be positive");
        let f = factor_u64(n)?;
        let mut nu: u128 = 1;
        let mut lp: u128 = n as u128;
        let mut ls: u128 = 1;
        for &(p, e) in &f {
            let p = p as u128;
            nu *= if e == 1 { p } else { p.pow(e - 2) * (p * p - 1) };
            lp *= p + 1;
            ls *= p.pow(e - 1) * (p + 1);
        }
        Ok(AlphaBarInputs {
            n,
            nu,
            m_upper: (nu + 1) / 12,
            genus: genus_from_factors(n, &f),
            l: lp / 6,
            l_star: ls / 6,
        })
    }
}

fn genus_from_factors(n: u64, f: &[(u64, u32)]) -> u128 {
    let n = n as i128;
    // psi(N) = N prod (1 + 1/p)
    let psi: i128 = f
        .iter()
        .fold(n, |acc, &(p, _)| acc / p as i128 * (p as i128 + 1));
    let nu2: i128 = if n % 4 == 0 {
        0
    } else {
        f.iter()
            .map(|&(p, _)| match p {
                2 => 1,
                _ if p % 4 == 1 => 2,
                _ => 0,
            })
            .product()
    };
    let nu3: i128 = if n % 9 == 0 {
        0
    } else {
        f.iter()
            .map(|&(p, _)| match p {
                3 => 1,
                _ if p % 3 == 1 => 2,
                _ => 0,
            })
            .product()
    };
    // Cusps: prod over p^e of sum_{k=0}^{e} phi(p^{min(k, e-k)}).
    let cusps: i128 = f
        .iter()
        .map(|&(p, e)| {
            let p = p as i128;
            (0..=e)
                .map(|k| {
                    let j = k.min(e - k);
                    if j == 0 {
                        1
                    } else {
                        p.pow(j - 1) * (p - 1)
                    }
                })
                .sum::<i128>()
        })
        .product();
    let twelve_g = 12 + psi - 3 * nu2 - 4 * nu3 - 6 * cusps;
    debug_assert!(twelve_g >= 0 && twelve_g % 12 == 0);
    (twelve_g / 12) as u128
}

/// Genus of the modular curve `X_0(N)`.
pub fn genus_x0(n: u64) -> Result<u128> {
    assert!(n >= 1, "level must be positive");
    Ok(genus_from_factors(n, &factor_u64(n)?))
}

fn x_ln_x(x: u128) -> GuardedReal {
    if x <= 1 {
        return gr(0);
    }
    let g = gr(x);
    g.mul(&g.ln())
}

/// `beta_bar = m/2 ln m + 5/8 m (18 + ln l)`.
pub fn beta_bar(inp: &AlphaBarInputs) -> GuardedReal {
    let m = inp.m_upper;
    let ln_l = gr(inp.l.max(1)).ln();
    x_ln_x(m)
        .mul(&ratio(1, 2))
        .add(&ratio(5, 8).mul(&gr(m)).mul(&gr(18).add(&ln_l)))
}

/// `beta_bar* = g/2 ln(g l*) + l*/2 ln(4 + 4 ln l*)`, defined for `g >= 1`.
pub fn beta_bar_star(inp: &AlphaBarInputs) -> Option<GuardedReal> {
    if inp.genus == 0 || inp.l_star == 0 {
        return None;
    }
    let g = gr(inp.genus);
    let ls = gr(inp.l_star);
    let first = g.mul(&g.mul(&ls).ln()).mul(&ratio(1, 2));
    let second = ls
        .mul(&gr(4).add(&ls.ln().mul_int(4)).ln())
        .mul(&ratio(1, 2));
    Some(first.add(&second))
}

/// Enclosure of `min(beta_bar, beta_bar*)`; the starred term is only used
/// when the genus is positive. Levels below 11 have `alpha = 0`.
pub fn alpha_bar(n: u64) -> Result<GuardedReal> {
    if n < 11 {
        return Ok(gr(0));
    }
    let inp = AlphaBarInputs::new(n)?;
    let b = beta_bar(&inp);
    Ok(match beta_bar_star(&inp) {
        Some(bs) => b.min(&bs),
        None => b,
    })
}

/// Which of the three bounds produced `M0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSource {
    SimplifiedA,
    SimplifiedB,
    Optimized,
}

#[derive(Clone, Debug)]
pub struct HeightBoundReport {
    pub simplified_a: GuardedReal,
    pub simplified_b: GuardedReal,
    /// `(6/5) alpha_bar(16 N_S) + 28`; absent if `16 N_S` does not fit in 64 bits.
    pub optimized: Option<GuardedReal>,
    pub m0: u64,
    pub source: BoundSource,
}

/// Certified `M0 = ceil(min(...))` using upper interval ends.
pub fn initial_bound(set: &PrimeSet) -> Result<HeightBoundReport> {
    let (a, b) = simplified_bounds(set);
    let optimized = match set.radical().to_u64().and_then(|n| n.checked_mul(16)) {
        Some(level) => Some(ratio(6, 5).mul(&alpha_bar(level)?).add(&gr(28))),
        None => None,
    };
    let mut best = (a.ceil_upper(), BoundSource::SimplifiedA);
    let cb = b.ceil_upper();
    if cb < best.0 {
        best = (cb, BoundSource::SimplifiedB);
    }
    if let Some(o) = &optimized {
        let co = o.ceil_upper();
        if co < best.0 {
            best = (co, BoundSource::Optimized);
        }
    }
    let m0 = best.0.to_u64().unwrap_or(u64::MAX).max(1);
    Ok(HeightBoundReport {
        simplified_a: a,
        simplified_b: b,
        optimized,
        m0,
        source: best.1,
    })
}
