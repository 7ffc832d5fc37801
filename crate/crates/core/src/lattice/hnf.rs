use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

/// Row operation `rows[i] <- a*rows[i] + b*rows[j]`, `rows[j] <- c*rows[i] + d*rows[j]`.
fn combine(rows: &mut [Vec<BigInt>], i: usize, j: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
    let n = rows[i].len();
    for k in 0..n {
        let x = &rows[i][k];
        let y = &rows[j][k];
        let nx = a * x + b * y;
        let ny = c * x + d * y;
        rows[i][k] = nx;
        rows[j][k] = ny;
    }
}

/// Brings the first `cols` columns of `rows` into row echelon form using
/// unimodular row operations. Returns the number of pivot rows; those come
/// first, and every later row is zero in the first `cols` columns.
pub fn echelon_prefix(rows: &mut Matrix, cols: usize) -> usize {
    let mut r = 0;
    for col in 0..cols {
        if r >= rows.len() {
            break;
        }
        for i in (r + 1)..rows.len() {
            if rows[i][col].is_zero() {
                continue;
            }
            if rows[r][col].is_zero() {
                rows.swap(r, i);
                continue;
            }
            let x = rows[r][col].clone();
            let y = rows[i][col].clone();
            let eg = x.extended_gcd(&y);
            // [s t; -y/g x/g] has determinant 1.
            let g = eg.gcd;
            let (s, t) = (eg.x, eg.y);
            let c = -(&y / &g);
            let d = &x / &g;
            combine(rows, r, i, &s, &t, &c, &d);
        }
        if !rows[r][col].is_zero() {
            if rows[r][col].is_negative() {
                for v in rows[r].iter_mut() {
                    *v = -&*v;
                }
            }
            r += 1;
        }
    }
    r
}

/// Row Hermite normal form of a full-rank square or tall integer matrix:
/// upper triangular, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`. Zero rows are dropped.
pub fn hermite_normal_form(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut rows = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r >= rows.len() {
            break;
        }
        // Eliminate below r in this column.
        for i in (r + 1)..rows.len() {
            if rows[i][col].is_zero() {
                continue;
            }
            if rows[r][col].is_zero() {
                rows.swap(r, i);
                continue;
            }
            let x = rows[r][col].clone();
            let y = rows[i][col].clone();
            let eg = x.extended_gcd(&y);
            let g = eg.gcd;
            let c = -(&y / &g);
            let d = &x / &g;
            combine(&mut rows, r, i, &eg.x, &eg.y, &c, &d);
        }
        if rows[r][col].is_zero() {
            continue;
        }
        if rows[r][col].is_negative() {
            for v in rows[r].iter_mut() {
                *v = -&*v;
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    rows.truncate(r);
    // Reduce entries above pivots.
    for &(pr, pc) in &pivots {
        let p = rows[pr][pc].clone();
        for i in 0..pr {
            let q = rows[i][pc].div_floor(&p);
            if !q.is_zero() {
                let pivot_row = rows[pr].clone();
                for (v, w) in rows[i].iter_mut().zip(pivot_row.iter()) {
                    *v -= &q * w;
                }
            }
        }
    }
    rows
}

/// Determinant of a square integer matrix (Bareiss fraction-free elimination).
pub fn determinant(m: &Matrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a = m.clone();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    &a[n - 1][n - 1] * sign
}

/// Solves `x * basis = v` over the integers when `basis` is in row Hermite
/// normal form; returns `None` when `v` is not in the row lattice.
pub fn hnf_coordinates(hnf: &Matrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest: Vec<BigInt> = v.to_vec();
    let mut coords = Vec::with_capacity(hnf.len());
    for row in hnf {
        let pc = row.iter().position(|x| !x.is_zero())?;
        let (q, r) = rest[pc].div_rem(&row[pc]);
        if !r.is_zero() {
            return None;
        }
        for (x, w) in rest.iter_mut().zip(row.iter()) {
            *x -= &q * w;
        }
        coords.push(q);
    }
    rest.iter().all(Zero::is_zero).then_some(coords)
}
