//! Integer lattices, LLL reduction and exact ellipsoid enumeration.

mod fincke_pohst;
mod hnf;
mod lll;

pub use fincke_pohst::EnumStats;
pub use hnf::{determinant, echelon_prefix, hermite_normal_form, hnf_coordinates, Matrix};
pub use lll::{lll_gram, ReducedGram};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::GuardedReal;
use crate::error::{Error, Result};

/// Full-rank lattice in `Z^n`, given by the rows of a square basis matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    basis: Matrix,
}

impl IntegerLattice {
    pub fn new(basis: Matrix) -> Result<Self> {
        let n = basis.len();
        if basis.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("lattice basis must be square".into()));
        }
        if determinant(&basis).is_zero() {
            return Err(Error::RankDeficient);
        }
        Ok(IntegerLattice { basis })
    }

    /// The standard lattice `Z^n`.
    pub fn standard(n: usize) -> Self {
        IntegerLattice { basis: identity(n) }
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Index of the lattice in `Z^n`.
    pub fn covolume(&self) -> BigInt {
        determinant(&self.basis).abs()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        hnf_coordinates(&hermite_normal_form(&self.basis), v).is_some()
    }

    pub fn gram(&self, q: &IntegerEllipsoid) -> Matrix {
        let bq: Matrix = self
            .basis
            .iter()
            .map(|row| {
                (0..row.len())
                    .map(|j| row.iter().zip(&q.form).map(|(x, qrow)| x * &qrow[j]).sum())
                    .collect()
            })
            .collect();
        let n = self.dim();
        let mut g = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v: BigInt = bq[i].iter().zip(&self.basis[j]).map(|(a, b)| a * b).sum();
                g[i][j] = v.clone();
                g[j][i] = v;
            }
        }
        g
    }
}

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// The region `x^T Q x <= c` with `Q` a positive definite integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerEllipsoid {
    form: Matrix,
    bound: BigInt,
}

/// Minimal scaled weight: real weights are scaled so that the smallest one
/// is at least `2^40`, which bounds the relative rounding error by `2^-40`.
const SCALE_BITS: i64 = 40;

impl IntegerEllipsoid {
    pub fn new(form: Matrix, bound: BigInt) -> Self {
        IntegerEllipsoid { form, bound }
    }

    pub fn diagonal(weights: &[BigInt], bound: BigInt) -> Self {
        let n = weights.len();
        let mut form = vec![vec![BigInt::zero(); n]; n];
        for (i, w) in weights.iter().enumerate() {
            form[i][i] = w.clone();
        }
        IntegerEllipsoid { form, bound }
    }

    /// Integer ellipsoid containing `sum w_i x_i^2 <= r` for real enclosed
    /// weights `w_i > 0` and radius `r`: scale by `2^k`, round weights down
    /// and the radius up.
    pub fn from_real_diagonal(weights: &[GuardedReal], radius: &GuardedReal) -> Result<Self> {
        let mut lows = Vec::with_capacity(weights.len());
        for w in weights {
            let lo = w.lower().to_rational();
            if !lo.is_positive() {
                return Err(Error::InvalidInput("ellipsoid weights must be positive".into()));
            }
            lows.push(lo);
        }
        let mut k: i64 = 0;
        for lo in &lows {
            // floor(log2(lo)) >= bits(num) - bits(den) - 1
            let lg = lo.numer().bits() as i64 - lo.denom().bits() as i64 - 1;
            k = k.max(SCALE_BITS - lg);
        }
        let scale = BigRational::from_integer(BigInt::one() << k as u64);
        let form_diag: Vec<BigInt> = lows.iter().map(|lo| (lo * &scale).floor().to_integer()).collect();
        let bound = (radius.upper().to_rational() * &scale).ceil().to_integer();
        Ok(IntegerEllipsoid::diagonal(&form_diag, bound.max(BigInt::zero())))
    }

    pub fn form(&self) -> &Matrix {
        &self.form
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    pub fn value(&self, x: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, xj) in x.iter().enumerate() {
                acc += xi * &self.form[i][j] * xj;
            }
        }
        acc
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.value(x) <= self.bound
    }
}

/// LLL-reduced basis of `lattice` with respect to the Euclidean norm.
pub fn lll_reduce(lattice: &IntegerLattice) -> Result<IntegerLattice> {
    let red = lll_gram(&lll::gram_of(&lattice.basis))?;
    Ok(IntegerLattice {
        basis: lll::mat_mul(&red.transform, &lattice.basis),
    })
}

/// All lattice points inside the ellipsoid, sorted lexicographically. Fails
/// with [`Error::CandidateOverflow`] once more than `cap` points exist.
pub fn enumerate_ellipsoid(
    lattice: &IntegerLattice,
    ellipsoid: &IntegerEllipsoid,
    cap: Option<usize>,
) -> Result<Vec<Vec<BigInt>>> {
    enumerate_ellipsoid_with_stats(lattice, ellipsoid, cap).map(|(v, _)| v)
}

pub fn enumerate_ellipsoid_with_stats(
    lattice: &IntegerLattice,
    ellipsoid: &IntegerEllipsoid,
    cap: Option<usize>,
) -> Result<(Vec<Vec<BigInt>>, EnumStats)> {
    let red = lll_gram(&lattice.gram(ellipsoid))?;
    let reduced = lll::mat_mul(&red.transform, &lattice.basis);
    let n = lattice.dim();
    let mut out = Vec::new();
    let stats = fincke_pohst::enumerate(&red, &ellipsoid.bound, cap, |x| {
        let mut v = vec![BigInt::zero(); n];
        for (xi, row) in x.iter().zip(&reduced) {
            if xi.is_zero() {
                continue;
            }
            for (vj, bj) in v.iter_mut().zip(row) {
                *vj += xi * bj;
            }
        }
        out.push(v);
    })?;
    out.sort();
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Brute force over a box for small lattices given as congruence
    /// conditions.
    fn brute(q: &IntegerEllipsoid, range: i64, member: impl Fn(&[i64]) -> bool) -> Vec<Vec<BigInt>> {
        let mut out = Vec::new();
        for a in -range..=range {
            for b in -range..=range {
                if member(&[a, b]) && q.contains(&v(&[a, b])) {
                    out.push(v(&[a, b]));
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumerate_matches_brute_force() {
        // {(a, b) : a + 3b == 0 mod 7}
        let l = IntegerLattice::new(m(&[&[7, 0], &[-3, 1]])).unwrap();
        let q = IntegerEllipsoid::diagonal(&v(&[3, 5]), BigInt::from(200));
        let got = enumerate_ellipsoid(&l, &q, None).unwrap();
        let want = brute(&q, 20, |x| (x[0] + 3 * x[1]).rem_euclid(7) == 0);
        assert_eq!(got, want);
    }

    #[test]
    fn origin_only_and_cap() {
        let l = IntegerLattice::new(m(&[&[100, 0], &[37, 1]])).unwrap();
        let q = IntegerEllipsoid::diagonal(&v(&[1, 1]), BigInt::from(0));
        assert_eq!(enumerate_ellipsoid(&l, &q, Some(1)).unwrap(), vec![v(&[0, 0])]);
        let q = IntegerEllipsoid::diagonal(&v(&[1, 1]), BigInt::from(10_000));
        let err = enumerate_ellipsoid(&l, &q, Some(5)).unwrap_err();
        assert_eq!(err, Error::CandidateOverflow { cap: 5 });
    }

    #[test]
    fn zero_dimensional() {
        let l = IntegerLattice::standard(0);
        let q = IntegerEllipsoid::diagonal(&[], BigInt::from(3));
        assert_eq!(enumerate_ellipsoid(&l, &q, None).unwrap(), vec![Vec::<BigInt>::new()]);
    }

    #[test]
    fn real_ellipsoid_contains_original() {
        let prec = 128;
        let ln2 = GuardedReal::from_int(2, prec).ln();
        let ln3 = GuardedReal::from_int(3, prec).ln();
        let w = [ln2.mul(&ln2), ln3.mul(&ln3)];
        let r = GuardedReal::from_int(50, prec);
        let e = IntegerEllipsoid::from_real_diagonal(&w, &r).unwrap();
        // Every integer point in the real ellipsoid must be inside.
        for a in -12i64..=12 {
            for b in -8i64..=8 {
                let real = (a as f64 * 2f64.ln()).powi(2) + (b as f64 * 3f64.ln()).powi(2);
                if real <= 50.0 - 1e-9 {
                    assert!(e.contains(&v(&[a, b])), "{a},{b}");
                }
            }
        }
        assert!(e.form()[0][0] >= BigInt::one() << 40u32);
    }

    #[test]
    fn lll_reduce_keeps_lattice() {
        let l = IntegerLattice::new(m(&[&[1, 0], &[1000, 1]])).unwrap();
        let r = lll_reduce(&l).unwrap();
        assert_eq!(r.covolume(), l.covolume());
        assert_eq!(hermite_normal_form(r.basis()), hermite_normal_form(l.basis()));
    }
}
