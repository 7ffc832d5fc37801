//! Lattices of multiplicative relations modulo `n`.
//!
//! `(Z/nZ)^x` is split into cyclic components (one per odd prime power, two
//! for `2^e` with `e >= 3`); discrete logarithms in each component are taken
//! by Pohlig–Hellman with baby-step/giant-step on the prime-order layers. The
//! relation lattice is then the kernel of the log map, obtained by integer
//! echelon form and returned in Hermite normal form.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::factor_u64;
use crate::error::{Error, Result};
use crate::lattice::{echelon_prefix, hermite_normal_form, Matrix};

/// Basis (rows, Hermite normal form) of `{v : prod g_i^v_i == 1 mod n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationLattice {
    generators: Vec<BigUint>,
    modulus: BigUint,
    basis: Matrix,
}

impl RelationLattice {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[BigUint] {
        &self.generators
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Does `prod g_i^v_i == 1 (mod n)` hold? Negative exponents use inverses.
    pub fn is_relation(&self, v: &[BigInt]) -> bool {
        let n = &self.modulus;
        let mut num = BigUint::one() % n;
        let mut den = BigUint::one() % n;
        for (g, e) in self.generators.iter().zip(v) {
            let pw = g.modpow(e.magnitude(), n);
            if e.sign() == num_bigint::Sign::Minus {
                den = den * pw % n;
            } else {
                num = num * pw % n;
            }
        }
        num == den
    }
}

/// One cyclic factor of `(Z/q^e)^x`.
struct Cyclic {
    modulus: BigUint,
    generator: BigUint,
    order: BigUint,
    order_factors: Vec<(u64, u32)>,
}

/// The group `(Z/q^e)^x` as a product of cyclic factors.
struct LocalGroup {
    q: u64,
    modulus: BigUint,
    /// For `q = 2, e >= 2`: the sign component `{+-1}` comes first.
    has_sign: bool,
    cyclic: Option<Cyclic>,
}

fn merge_factors(a: &[(u64, u32)], b: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = a.to_vec();
    for &(p, e) in b {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some((_, k)) => *k += e,
            None => out.push((p, e)),
        }
    }
    out.sort_unstable();
    out
}

fn primitive_root(q: u64, factors: &[(u64, u32)]) -> u64 {
    let qb = BigUint::from(q);
    (2..q)
        .find(|&g| {
            factors
                .iter()
                .all(|&(r, _)| !BigUint::from(g).modpow(&BigUint::from((q - 1) / r), &qb).is_one())
        })
        .unwrap_or(1)
}

impl LocalGroup {
    fn new(q: u64, e: u32) -> Result<Self> {
        let modulus = BigUint::from(q).pow(e);
        if q == 2 {
            let cyclic = (e >= 3).then(|| Cyclic {
                modulus: modulus.clone(),
                generator: BigUint::from(5u32),
                order: BigUint::one() << (e - 2),
                order_factors: vec![(2, e - 2)],
            });
            return Ok(LocalGroup {
                q,
                modulus,
                has_sign: e >= 2,
                cyclic,
            });
        }
        let qm1 = factor_u64(q - 1)?;
        let g0 = primitive_root(q, &qm1);
        let mut g = BigUint::from(g0);
        if e >= 2 {
            let q2 = BigUint::from(q).pow(2);
            if g.modpow(&BigUint::from(q - 1), &q2).is_one() {
                g += q;
            }
        }
        let order = BigUint::from(q).pow(e - 1) * (q - 1);
        let order_factors = if e >= 2 {
            merge_factors(&qm1, &[(q, e - 1)])
        } else {
            qm1
        };
        Ok(LocalGroup {
            q,
            modulus: modulus.clone(),
            has_sign: false,
            cyclic: Some(Cyclic {
                modulus,
                generator: g,
                order,
                order_factors,
            }),
        })
    }

    fn orders(&self) -> Vec<BigUint> {
        let mut out = Vec::new();
        if self.has_sign {
            out.push(BigUint::from(2u32));
        }
        if let Some(c) = &self.cyclic {
            out.push(c.order.clone());
        }
        out
    }

    fn logs(&self, h: &BigUint) -> Vec<BigUint> {
        let h = h % &self.modulus;
        let mut out = Vec::new();
        let mut h = h;
        if self.has_sign {
            debug_assert_eq!(self.q, 2);
            let neg = (&h % 4u32) == BigUint::from(3u32);
            out.push(BigUint::from(neg as u32));
            if neg {
                h = &self.modulus - h;
            }
        }
        if let Some(c) = &self.cyclic {
            out.push(discrete_log(&h, c));
        }
        out
    }
}

fn modinv(a: &BigUint, n: &BigUint) -> BigUint {
    let a = BigInt::from(a.clone());
    let n = BigInt::from(n.clone());
    let e = a.extended_gcd(&n);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(&n).to_biguint().expect("nonnegative")
}

/// Solve `gamma^d == target` with `gamma` of prime order `r`.
fn bsgs(gamma: &BigUint, target: &BigUint, r: u64, n: &BigUint) -> u64 {
    if target.is_one() {
        return 0;
    }
    let m = (r as f64).sqrt().ceil() as u64 + 1;
    let mut baby = HashMap::with_capacity(m as usize);
    let mut cur = BigUint::one();
    for j in 0..m {
        baby.entry(cur.clone()).or_insert(j);
        cur = cur * gamma % n;
    }
    // gamma^{-m}
    let step = modinv(&gamma.modpow(&BigUint::from(m), n), n);
    let mut t = target.clone();
    for i in 0..=m {
        if let Some(&j) = baby.get(&t) {
            return (i * m + j) % r;
        }
        t = t * &step % n;
    }
    unreachable!("element outside the cyclic subgroup")
}

/// Pohlig–Hellman in the cyclic group generated by `c.generator`.
fn discrete_log(h: &BigUint, c: &Cyclic) -> BigUint {
    let n = &c.modulus;
    let mut acc = BigInt::zero();
    let mut acc_mod = BigInt::one();
    for &(r, k) in &c.order_factors {
        let rk = BigUint::from(r).pow(k);
        let cof = &c.order / &rk;
        let g_r = c.generator.modpow(&cof, n);
        let h_r = h.modpow(&cof, n);
        let gamma = g_r.modpow(&BigUint::from(r).pow(k - 1), n);
        let g_inv = modinv(&g_r, n);
        let mut x = BigUint::zero();
        let mut rpow = BigUint::one();
        for i in 0..k {
            let shifted = h_r.clone() * g_inv.modpow(&x, n) % n;
            let t = shifted.modpow(&BigUint::from(r).pow(k - 1 - i), n);
            let d = bsgs(&gamma, &t, r, n);
            x += &rpow * d;
            rpow *= r;
        }
        // CRT: combine acc mod acc_mod with x mod r^k.
        let rk = BigInt::from(rk);
        let x = BigInt::from(x);
        let e = acc_mod.extended_gcd(&rk);
        let t = ((&x - &acc) * e.x).mod_floor(&rk);
        acc += &acc_mod * t;
        acc_mod *= &rk;
        acc = acc.mod_floor(&acc_mod);
    }
    acc.to_biguint().expect("nonnegative")
}

/// Kernel of `v -> sum v_i L_i` into `prod Z/m_j`, as an HNF basis.
fn kernel_basis(logs: &[Vec<BigUint>], orders: &[BigUint]) -> Matrix {
    let d = logs.len();
    let c = orders.len();
    let mut rows: Matrix = Vec::with_capacity(d + c);
    for (i, l) in logs.iter().enumerate() {
        let mut row: Vec<BigInt> = l.iter().map(|x| BigInt::from(x.clone())).collect();
        row.extend((0..d).map(|j| BigInt::from((i == j) as u32)));
        rows.push(row);
    }
    for (j, m) in orders.iter().enumerate() {
        let mut row = vec![BigInt::zero(); c + d];
        row[j] = BigInt::from(m.clone());
        rows.push(row);
    }
    let r = echelon_prefix(&mut rows, c);
    let kernel: Matrix = rows[r..].iter().map(|row| row[c..].to_vec()).collect();
    hermite_normal_form(&kernel)
}

/// Relation lattice for `n = prod q^e` given in factored form.
pub fn relation_basis_factored(gens: &[BigUint], factors: &[(u64, u32)]) -> Result<RelationLattice> {
    let modulus = factors
        .iter()
        .fold(BigUint::one(), |acc, &(q, e)| acc * BigUint::from(q).pow(e));
    for g in gens {
        if !g.gcd(&modulus).is_one() {
            return Err(Error::NotAUnit {
                generator: g.to_string(),
                modulus: modulus.to_string(),
            });
        }
    }
    let d = gens.len();
    if d == 0 {
        return Ok(RelationLattice {
            generators: Vec::new(),
            modulus,
            basis: Vec::new(),
        });
    }
    let groups: Vec<LocalGroup> = factors
        .iter()
        .filter(|&&(_, e)| e > 0)
        .map(|&(q, e)| LocalGroup::new(q, e))
        .collect::<Result<_>>()?;
    let orders: Vec<BigUint> = groups.iter().flat_map(LocalGroup::orders).collect();
    let logs: Vec<Vec<BigUint>> = gens
        .iter()
        .map(|g| groups.iter().flat_map(|grp| grp.logs(g)).collect())
        .collect();
    let basis = if orders.is_empty() {
        identity(d)
    } else {
        kernel_basis(&logs, &orders)
    };
    if basis.len() != d {
        return Err(Error::Internal("relation kernel is not of full rank".into()));
    }
    Ok(RelationLattice {
        generators: gens.to_vec(),
        modulus,
        basis,
    })
}

fn identity(d: usize) -> Matrix {
    (0..d)
        .map(|i| (0..d).map(|j| BigInt::from((i == j) as u32)).collect())
        .collect()
}

/// Relation lattice of `gens` modulo `n >= 2`. `n` is factored by trial
/// division and Pollard rho.
pub fn relation_basis(gens: &[BigUint], n: &BigUint) -> Result<RelationLattice> {
    if n < &BigUint::from(2u32) {
        return Err(Error::InvalidInput("modulus must be at least 2".into()));
    }
    let mut rest = n.clone();
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p < 10_000 && !rest.is_one() {
        let mut e = 0;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
        p += 1 + (p > 2) as u64;
    }
    if !rest.is_one() {
        let small = rest
            .to_u64()
            .ok_or_else(|| Error::FactorizationBudget(rest.to_string()))?;
        factors = merge_factors(&factors, &factor_u64(small)?);
    }
    relation_basis_factored(gens, &factors)
}

type CacheKey = (Vec<BigUint>, Vec<(u64, u32)>);

/// Thread-safe memo of relation lattices keyed by generators and modulus.
#[derive(Default)]
pub struct RelationCache {
    map: Mutex<HashMap<CacheKey, Arc<RelationLattice>>>,
}

impl RelationCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, gens: &[BigUint], factors: &[(u64, u32)]) -> Result<Arc<RelationLattice>> {
        let key = (gens.to_vec(), factors.to_vec());
        if let Some(v) = self.map.lock().expect("relation cache poisoned").get(&key) {
            return Ok(Arc::clone(v));
        }
        let lat = Arc::new(relation_basis_factored(gens, factors)?);
        self.map
            .lock()
            .expect("relation cache poisoned")
            .entry(key)
            .or_insert_with(|| Arc::clone(&lat));
        Ok(lat)
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("relation cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::determinant;

    fn big(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn documented_examples() {
        let r = relation_basis(&big(&[9]), &BigUint::from(8u32)).unwrap();
        assert_eq!(r.basis(), &m(&[&[1]]));
        let r = relation_basis(&big(&[4]), &BigUint::from(25u32)).unwrap();
        assert_eq!(r.basis(), &m(&[&[10]]));
        let r = relation_basis(&[], &BigUint::from(7u32)).unwrap();
        assert!(r.basis().is_empty());
    }

    #[test]
    fn non_unit_rejected() {
        let e = relation_basis(&big(&[6]), &BigUint::from(9u32)).unwrap_err();
        assert!(matches!(e, Error::NotAUnit { .. }));
    }

    #[test]
    fn large_power_of_two() {
        let n = BigUint::one() << 200u32;
        let r = relation_basis(&big(&[9, 25, 49]), &n).unwrap();
        for row in r.basis() {
            assert!(r.is_relation(row));
        }
        // 9, 25, 49 are all 1 mod 8, so they live in the cyclic part of
        // order 2^198.
        assert_eq!(determinant(r.basis()).magnitude(), &(BigUint::one() << 197u32));
    }

    #[test]
    fn mixed_modulus_relations() {
        let r = relation_basis_factored(&big(&[4, 9, 25]), &[(7, 3), (11, 2)]).unwrap();
        for row in r.basis() {
            assert!(r.is_relation(row));
        }
    }
}
