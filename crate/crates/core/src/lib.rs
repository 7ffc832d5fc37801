//! Complete solution of the S-unit equation `x + y = 1` over the rationals.
//!
//! Given a finite set `S` of primes, [`solve_sunit`] returns every pair of
//! S-units `x + y = 1`, grouped into symmetry classes. The search combines
//! certified height bounds ([`bounds`]), de Weger's lattice sieve and its
//! refinement ([`sieves`]), and a meet-in-the-middle enumeration of small
//! solutions ([`enumeration`]). The [`abc`] module turns solutions into abc
//! triples and checks Baker's explicit abc inequality.
//!
//! ```
//! use sunit_core::{solve_sunit, PrimeSet, SolverConfig};
//!
//! let set = PrimeSet::new([2, 3]).unwrap();
//! let sols = solve_sunit(&set, &SolverConfig::default()).unwrap();
//! assert_eq!(sols.class_count(), 4);
//! assert_eq!(sols.solution_count(), 21);
//! ```

pub mod abc;
pub mod arith;
pub mod bounds;
pub mod enumeration;
pub mod error;
pub mod lattice;
pub mod relations;
pub mod sieves;
pub mod solution;
pub mod solver;

pub use abc::{baker_check, quality, to_abc, verify_baker, ABCTriple, BakerReport, BakerVerdict};
pub use arith::{GuardedReal, PrimeSet, Rational};
pub use error::{Error, Result};
pub use solution::{canonical_class, symmetry_orbit, PositiveTriple, SUnitSolution, SymmetryClass};
pub use solver::{solve_sunit, solve_sunit_partial, SolutionSet, SolverConfig};
