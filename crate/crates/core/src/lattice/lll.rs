//! Integral LLL (all-integer Gram–Schmidt bookkeeping, delta = 3/4).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::hnf::Matrix;
use crate::error::{Error, Result};

/// Output of the integral LLL on a Gram matrix.
///
/// Indices of `d` and `lambda` are 1-based as in the textbook recurrences:
/// `d[0] = 1`, `d[i]` is the Gram determinant of the first `i` vectors and
/// `lambda[i][j] = d[j] * mu_ij` for `j < i`.
#[derive(Clone, Debug)]
pub struct ReducedGram {
    pub gram: Matrix,
    pub transform: Matrix,
    pub d: Vec<BigInt>,
    pub lambda: Matrix,
}

impl ReducedGram {
    pub fn dim(&self) -> usize {
        self.gram.len()
    }
}

struct State {
    n: usize,
    g: Matrix,
    h: Matrix,
    d: Vec<BigInt>,
    lam: Matrix,
}

impl State {
    // All indices below are 1-based.
    fn g(&self, i: usize, j: usize) -> &BigInt {
        &self.g[i - 1][j - 1]
    }

    fn red(&mut self, k: usize, l: usize) {
        let two_lam: BigInt = &self.lam[k][l] * 2;
        if two_lam.abs() <= self.d[l] {
            return;
        }
        // q = round(lam / d), ties toward +inf.
        let q = (&two_lam + &self.d[l]).div_floor(&(&self.d[l] * 2));
        let n = self.n;
        let hl = self.h[l - 1].clone();
        for (x, y) in self.h[k - 1].iter_mut().zip(hl.iter()) {
            *x -= &q * y;
        }
        let gkk = self.g(k, k) - &q * self.g(k, l) * 2 + &q * &q * self.g(l, l);
        for j in 1..=n {
            if j == k {
                continue;
            }
            let v = self.g(k, j) - &q * self.g(l, j);
            self.g[k - 1][j - 1] = v.clone();
            self.g[j - 1][k - 1] = v;
        }
        self.g[k - 1][k - 1] = gkk;
        let dl = self.d[l].clone();
        self.lam[k][l] -= &q * dl;
        for i in 1..l {
            let v = &q * &self.lam[l][i];
            self.lam[k][i] -= v;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.h.swap(k - 1, k - 2);
        self.g.swap(k - 1, k - 2);
        for row in self.g.iter_mut() {
            row.swap(k - 1, k - 2);
        }
        for j in 1..=k.saturating_sub(2) {
            let a = std::mem::take(&mut self.lam[k][j]);
            let b = std::mem::replace(&mut self.lam[k - 1][j], a);
            self.lam[k][j] = b;
        }
        let lam = self.lam[k][k - 1].clone();
        let b = (&self.d[k - 2] * &self.d[k] + &lam * &lam) / &self.d[k - 1];
        for i in (k + 1)..=kmax {
            let t = self.lam[i][k].clone();
            let new_ik = (&self.d[k] * &self.lam[i][k - 1] - &lam * &t) / &self.d[k - 1];
            let new_ik1 = (&b * &t + &lam * &new_ik) / &self.d[k];
            self.lam[i][k] = new_ik;
            self.lam[i][k - 1] = new_ik1;
        }
        self.d[k - 1] = b;
    }
}

/// Reduces the (positive definite) Gram matrix `gram`. The returned
/// `transform` expresses the reduced basis in terms of the input basis.
pub fn lll_gram(gram: &Matrix) -> Result<ReducedGram> {
    let n = gram.len();
    let identity: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    if n == 0 {
        return Ok(ReducedGram {
            gram: Vec::new(),
            transform: Vec::new(),
            d: vec![BigInt::one()],
            lambda: vec![Vec::new()],
        });
    }
    let mut st = State {
        n,
        g: gram.clone(),
        h: identity,
        d: vec![BigInt::zero(); n + 1],
        lam: vec![vec![BigInt::zero(); n + 1]; n + 1],
    };
    st.d[0] = BigInt::one();
    st.d[1] = gram[0][0].clone();
    if !st.d[1].is_positive() {
        return Err(Error::RankDeficient);
    }
    let mut k = 2;
    let mut kmax = 1;
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = st.g(k, j).clone();
                for i in 1..j {
                    u = (&st.d[i] * &u - &st.lam[k][i] * &st.lam[j][i]) / &st.d[i - 1];
                }
                if j < k {
                    st.lam[k][j] = u;
                } else {
                    if !u.is_positive() {
                        return Err(Error::RankDeficient);
                    }
                    st.d[k] = u;
                }
            }
        }
        loop {
            st.red(k, k - 1);
            let lhs = &st.d[k] * &st.d[k - 2] * 4;
            let rhs = &st.d[k - 1] * &st.d[k - 1] * 3 - &st.lam[k][k - 1] * &st.lam[k][k - 1] * 4;
            if lhs < rhs {
                st.swap(k, kmax);
                k = (k - 1).max(2);
            } else {
                break;
            }
        }
        for l in (1..=k.saturating_sub(2)).rev() {
            st.red(k, l);
        }
        k += 1;
    }
    Ok(ReducedGram {
        gram: st.g,
        transform: st.h,
        d: st.d,
        lambda: st.lam,
    })
}

pub(crate) fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .fold(BigInt::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

pub(crate) fn gram_of(basis: &Matrix) -> Matrix {
    let n = basis.len();
    let mut g = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v: BigInt = basis[i].iter().zip(&basis[j]).map(|(x, y)| x * y).sum();
            g[i][j] = v.clone();
            g[j][i] = v;
        }
    }
    g
}
