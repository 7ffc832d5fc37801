//! Solutions of `x + y = 1`, their coprime triples and symmetry classes.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::{strip_prime, PrimeSet, Rational};

/// A solution `x + y = 1` with its triple `a + b = c`, `x = a/c`, `y = b/c`,
/// `gcd(a, b, c) = 1`, `c > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SUnitSolution {
    x: Rational,
    y: Rational,
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl SUnitSolution {
    /// The solution `(x, 1 - x)`; `None` for `x = 0` or `x = 1`.
    pub fn from_x(x: Rational) -> Option<Self> {
        if x.is_zero() || x.is_one() {
            return None;
        }
        let y = Rational::one() - &x;
        let c = x.denom().clone();
        let a = x.numer().clone();
        let b = &c - &a;
        Some(SUnitSolution { x, y, a, b, c })
    }

    /// From any nonzero triple with `a + b = c`; signs and common factors are
    /// normalized away.
    pub fn from_triple(a: BigInt, b: BigInt, c: BigInt) -> Option<Self> {
        if a.is_zero() || b.is_zero() || c.is_zero() || &a + &b != c {
            return None;
        }
        SUnitSolution::from_x(Rational::new(a, c))
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    /// `(a, b, c)` with `x = a/c`, `y = b/c`, `c > 0`.
    pub fn triple(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    /// The positive triple `a <= b < c` (or `(1, 1, 2)`) obtained by
    /// rearranging `|a|, |b|, |c|`.
    pub fn positive_triple(&self) -> PositiveTriple {
        let mut v = [
            self.a.magnitude().clone(),
            self.b.magnitude().clone(),
            self.c.magnitude().clone(),
        ];
        v.sort();
        let [a, b, c] = v;
        PositiveTriple { a, b, c }
    }

    /// Are `x` and `y` both S-units?
    pub fn is_s_unit(&self, set: &PrimeSet) -> bool {
        [&self.a, &self.b, &self.c].into_iter().all(|n| {
            let mut m = n.magnitude().clone();
            for &p in set.primes() {
                strip_prime(&mut m, p);
            }
            m.is_one()
        })
    }
}

impl fmt::Debug for SUnitSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for SUnitSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Positive coprime `a <= b`, `c = a + b`. This is the invariant of a
/// symmetry class; classes are ordered by `(c, a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PositiveTriple {
    pub a: BigUint,
    pub b: BigUint,
    pub c: BigUint,
}

impl PositiveTriple {
    pub fn new(a: BigUint, b: BigUint) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let c = &a + &b;
        PositiveTriple { a, b, c }
    }

    pub fn is_special(&self) -> bool {
        self.c == BigUint::from(2u32)
    }

    /// Valuations `(ord_p a, ord_p b, ord_p c)` for each prime of `set`, or
    /// `None` if the triple is not S-smooth.
    pub fn valuations(&self, set: &PrimeSet) -> Option<Vec<[u32; 3]>> {
        let mut rest = [self.a.clone(), self.b.clone(), self.c.clone()];
        let mut out = Vec::with_capacity(set.len());
        for &p in set.primes() {
            let mut v = [0u32; 3];
            for (k, r) in rest.iter_mut().enumerate() {
                v[k] = strip_prime(r, p);
            }
            out.push(v);
        }
        rest.iter().all(One::is_one).then_some(out)
    }

    /// `m_p = ord_p(abc)` for each `p` in `set`, or `None` if not S-smooth.
    pub fn m_vector(&self, set: &PrimeSet) -> Option<Vec<u32>> {
        self.valuations(set)
            .map(|v| v.iter().map(|e| e[0] + e[1] + e[2]).collect())
    }

    /// The six solutions `a/c, b/c, c/a, c/b, -a/b, -b/a` (three when
    /// `a = b = 1`), sorted by `x`.
    pub fn orbit(&self) -> Vec<SUnitSolution> {
        let (a, b, c) = (
            BigInt::from(self.a.clone()),
            BigInt::from(self.b.clone()),
            BigInt::from(self.c.clone()),
        );
        let xs = [
            Rational::new(a.clone(), c.clone()),
            Rational::new(b.clone(), c.clone()),
            Rational::new(c.clone(), a.clone()),
            Rational::new(c, b.clone()),
            Rational::new(-a.clone(), b.clone()),
            Rational::new(-b, a),
        ];
        let mut xs = xs.to_vec();
        xs.sort();
        xs.dedup();
        xs.into_iter()
            .map(|x| SUnitSolution::from_x(x).expect("orbit elements are solutions"))
            .collect()
    }

    /// The class representative `x = a/c`, `y = b/c`.
    pub fn representative(&self) -> SUnitSolution {
        SUnitSolution::from_x(Rational::new(
            BigInt::from(self.a.clone()),
            BigInt::from(self.c.clone()),
        ))
        .expect("representative is a solution")
    }
}

impl Ord for PositiveTriple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c.cmp(&other.c).then_with(|| self.a.cmp(&other.a))
    }
}

impl PartialOrd for PositiveTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A symmetry class: representative and full orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryClass {
    pub triple: PositiveTriple,
    pub representative: SUnitSolution,
    pub orbit: Vec<SUnitSolution>,
}

impl SymmetryClass {
    pub fn from_triple(triple: PositiveTriple) -> Self {
        SymmetryClass {
            representative: triple.representative(),
            orbit: triple.orbit(),
            triple,
        }
    }
}

/// All solutions symmetric to `sol`, including `sol`, sorted by `x`.
pub fn symmetry_orbit(sol: &SUnitSolution) -> Vec<SUnitSolution> {
    sol.positive_triple().orbit()
}

/// The class of `sol`, represented by `x = a/c` for its positive triple.
pub fn canonical_class(sol: &SUnitSolution) -> SymmetryClass {
    SymmetryClass::from_triple(sol.positive_triple())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn xs(v: &[SUnitSolution]) -> Vec<Rational> {
        v.iter().map(|s| s.x().clone()).collect()
    }

    #[test]
    fn orbit_examples() {
        let s = SUnitSolution::from_x(q(2, 1)).unwrap();
        let o = symmetry_orbit(&s);
        assert_eq!(xs(&o), vec![q(-1, 1), q(1, 2), q(2, 1)]);

        let s = SUnitSolution::from_x(q(1, 3)).unwrap();
        let mut want = vec![q(1, 3), q(2, 3), q(3, 1), q(3, 2), q(-1, 2), q(-2, 1)];
        want.sort();
        assert_eq!(xs(&symmetry_orbit(&s)), want);

        let s = SUnitSolution::from_x(q(1, 9)).unwrap();
        let mut want = vec![q(1, 9), q(8, 9), q(9, 1), q(9, 8), q(-1, 8), q(-8, 1)];
        want.sort();
        assert_eq!(xs(&symmetry_orbit(&s)), want);
    }

    #[test]
    fn canonical_examples() {
        let c = canonical_class(&SUnitSolution::from_x(q(9, 1)).unwrap());
        assert_eq!(c.representative.x(), &q(1, 9));
        assert_eq!(c.representative.y(), &q(8, 9));
        let c = canonical_class(&SUnitSolution::from_x(q(1, 2)).unwrap());
        assert_eq!(c.representative.x(), &q(1, 2));
        assert_eq!(c.orbit.len(), 3);
        let c = canonical_class(&SUnitSolution::from_x(q(-2, 1)).unwrap());
        assert_eq!(c.representative.x(), &q(1, 3));
    }

    #[test]
    fn triple_normalization() {
        let s = SUnitSolution::from_triple((-2).into(), 6.into(), 4.into()).unwrap();
        assert_eq!(s.x(), &q(-1, 2));
        let (a, b, c) = s.triple();
        assert_eq!((a.clone(), b.clone(), c.clone()), ((-1).into(), 3.into(), 2.into()));
        assert!(SUnitSolution::from_triple(1.into(), 1.into(), 3.into()).is_none());
        assert!(SUnitSolution::from_x(q(1, 1)).is_none());
    }

    #[test]
    fn s_unit_and_valuations() {
        let set = PrimeSet::new([2, 3]).unwrap();
        let s = SUnitSolution::from_x(q(-1, 8)).unwrap();
        assert!(s.is_s_unit(&set));
        let t = s.positive_triple();
        assert_eq!((t.a.clone(), t.b.clone(), t.c.clone()), (1u32.into(), 8u32.into(), 9u32.into()));
        assert_eq!(t.m_vector(&set), Some(vec![3, 2]));
        assert!(!SUnitSolution::from_x(q(1, 5)).unwrap().is_s_unit(&set));
    }
}
