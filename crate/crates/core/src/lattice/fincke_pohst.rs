//! Exact enumeration of `{x : x^T G x <= C}` from the integral LLL data.
//!
//! With `L_j = sum_{i>j} lambda_ij x_i` the quadratic form splits as
//! `sum_j (x_j d_j + L_j)^2 / (d_j d_{j-1})`. Multiplying through by the lcm
//! of the denominators keeps every comparison in the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::lll::ReducedGram;
use crate::error::{Error, Result};

/// Search-tree statistics of one enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    pub nodes: u64,
    pub points: u64,
}

/// Calls `visit` on the coefficient vector (w.r.t. the reduced basis) of every
/// point with `x^T G x <= bound`, including the origin. Fails once more than
/// `cap` points have been found.
pub fn enumerate(
    red: &ReducedGram,
    bound: &BigInt,
    cap: Option<usize>,
    mut visit: impl FnMut(&[BigInt]),
) -> Result<EnumStats> {
    let n = red.dim();
    let mut stats = EnumStats::default();
    if bound.is_negative() {
        return Ok(stats);
    }
    if n == 0 {
        stats.points = 1;
        stats.nodes = 1;
        check_cap(1, cap)?;
        visit(&[]);
        return Ok(stats);
    }
    let d = &red.d;
    let lam = &red.lambda;
    // Denominators D_j = d_j d_{j-1}; weights w_j = Lambda / D_j.
    let dens: Vec<BigInt> = (1..=n).map(|j| &d[j] * &d[j - 1]).collect();
    let lcm = dens.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x));
    let w: Vec<BigInt> = dens.iter().map(|x| &lcm / x).collect();

    // 1-based level arrays; level j ranges n..=1.
    let mut x = vec![BigInt::zero(); n + 1];
    let mut hi = vec![BigInt::zero(); n + 1];
    let mut lsum = vec![BigInt::zero(); n + 1];
    let mut rem = vec![BigInt::zero(); n + 2];
    rem[n] = bound * &lcm;

    let open = |j: usize, x: &[BigInt], rem: &[BigInt], lsum: &mut [BigInt]| -> (BigInt, BigInt) {
        let mut l = BigInt::zero();
        for i in (j + 1)..=n {
            l += &lam[i][j] * &x[i];
        }
        let r = (&rem[j] / &w[j - 1]).sqrt();
        // ceil((-r - L)/d) == -floor((r + L)/d)
        let lo = -(&r + &l).div_floor(&d[j]);
        let hi = (&r - &l).div_floor(&d[j]);
        lsum[j] = l;
        (lo, hi)
    };

    let mut j = n;
    (x[j], hi[j]) = open(j, &x, &rem, &mut lsum);
    loop {
        if x[j] > hi[j] {
            if j == n {
                break;
            }
            j += 1;
            x[j] += 1;
            continue;
        }
        stats.nodes += 1;
        let t = &x[j] * &d[j] + &lsum[j];
        let used = &t * &t * &w[j - 1];
        if used > rem[j] {
            // Only possible through rounding at the interval ends.
            x[j] += 1;
            continue;
        }
        if j == 1 {
            stats.points += 1;
            check_cap(stats.points, cap)?;
            visit(&x[1..]);
            x[j] += 1;
            continue;
        }
        rem[j - 1] = &rem[j] - used;
        j -= 1;
        (x[j], hi[j]) = open(j, &x, &rem, &mut lsum);
    }
    Ok(stats)
}

fn check_cap(points: u64, cap: Option<usize>) -> Result<()> {
    match cap {
        Some(c) if points > c as u64 => Err(Error::CandidateOverflow { cap: c }),
        _ => Ok(()),
    }
}
