//! Line-delimited JSON records. Integers are decimal strings, rationals
//! `num/den`.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use serde::Serialize;
use sunit_core::abc::ABCTriple;
use sunit_core::arith::{GuardedReal, Rational};
use sunit_core::bounds::BoundSource;
use sunit_core::solution::{SUnitSolution, SymmetryClass};
use sunit_core::solver::{Provenance, SolutionSet};

pub fn rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// `q` rounded to `digits` decimals, down or up.
fn decimal(q: &Rational, digits: u32, up: bool) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = q * Rational::from_integer(scale.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let sign = if n < BigInt::from(0) { "-" } else { "" };
    let m = n.magnitude();
    let (int, frac) = (m / scale.magnitude(), m % scale.magnitude());
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits as usize)
}

#[derive(Serialize)]
pub struct Enclosure {
    pub lo: String,
    pub hi: String,
}

impl Enclosure {
    /// Outward-rounded decimal endpoints.
    pub fn new(x: &GuardedReal) -> Self {
        Enclosure {
            lo: decimal(&x.lower().to_rational(), 9, false),
            hi: decimal(&x.upper().to_rational(), 9, true),
        }
    }
}

#[derive(Serialize, Default)]
pub struct Timings {
    pub total_ms: String,
    pub bounds_ms: String,
    pub start_ms: String,
    pub descent_ms: String,
    pub refined_sieve_ms: String,
    pub enumeration_ms: String,
}

#[derive(Serialize)]
pub struct Summary {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub n: String,
    pub primes: Vec<String>,
    pub radical: String,
    pub m0: String,
    pub bound_source: Option<&'static str>,
    pub classes: String,
    pub solutions: String,
    pub complete: bool,
    pub provenance: BTreeMap<&'static str, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn ms(d: std::time::Duration) -> String {
    d.as_millis().to_string()
}

impl Summary {
    pub fn new(sols: &SolutionSet, total: Option<std::time::Duration>, error: Option<String>) -> Self {
        let s = &sols.set;
        let timings = total.map(|total| {
            let t = &sols.report.timings;
            Timings {
                total_ms: ms(total),
                bounds_ms: ms(t.bounds),
                start_ms: ms(t.start),
                descent_ms: ms(t.descent),
                refined_sieve_ms: ms(t.refined_sieve),
                enumeration_ms: ms(t.enumeration),
            }
        });
        Summary {
            kind: "summary",
            n: s.len().to_string(),
            primes: s.primes().iter().map(u64::to_string).collect(),
            radical: s.radical().to_string(),
            m0: sols.m0.to_string(),
            bound_source: sols.bound.as_ref().map(|b| match b.source {
                BoundSource::SimplifiedA => "simplified_a",
                BoundSource::SimplifiedB => "simplified_b",
                BoundSource::Optimized => "optimized",
            }),
            classes: sols.class_count().to_string(),
            solutions: sols.solution_count().to_string(),
            complete: sols.complete,
            provenance: sols
                .provenance_histogram()
                .into_iter()
                .map(|(k, v)| (k, v.to_string()))
                .collect(),
            timings,
            error,
        }
    }
}

#[derive(Serialize)]
pub struct Solution {
    pub x: String,
    pub y: String,
}

impl Solution {
    pub fn new(s: &SUnitSolution) -> Self {
        Solution {
            x: rational(s.x()),
            y: rational(s.y()),
        }
    }
}

#[derive(Serialize)]
pub struct Class {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub primes: Vec<String>,
    pub representative: Solution,
    pub triple: [String; 3],
    pub orbit_size: String,
    pub provenance: String,
}

impl Class {
    pub fn new(sols: &SolutionSet, class: &SymmetryClass, provenance: &Provenance) -> Self {
        let (a, b, c) = class.representative.triple();
        Class {
            kind: "class",
            primes: sols.set.primes().iter().map(u64::to_string).collect(),
            representative: Solution::new(&class.representative),
            triple: [a.to_string(), b.to_string(), c.to_string()],
            orbit_size: class.orbit.len().to_string(),
            provenance: provenance.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct Triple {
    #[serde(rename = "type")]
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<String>,
    pub triple: [String; 3],
    pub radical: String,
    pub omega: String,
    pub quality: Enclosure,
}

impl Triple {
    pub fn new(kind: &'static str, rank: Option<usize>, t: &ABCTriple) -> Self {
        Triple {
            kind,
            rank: rank.map(|r| r.to_string()),
            triple: [t.a.to_string(), t.b.to_string(), t.c.to_string()],
            radical: t.radical.to_string(),
            omega: t.omega().to_string(),
            quality: Enclosure::new(&t.quality),
        }
    }
}

#[derive(Serialize)]
pub struct Baker {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub radical_max: String,
    pub sets: String,
    pub triples: String,
    pub violations: String,
    pub excluded: Vec<[String; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct Failure {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub primes: Vec<String>,
    pub message: String,
    pub budget: bool,
}

/// Writes one record per line.
pub fn emit(out: &mut impl Write, record: &impl Serialize) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rounding() {
        let q = Rational::new(BigInt::from(2), BigInt::from(3));
        assert_eq!(decimal(&q, 3, false), "0.666");
        assert_eq!(decimal(&q, 3, true), "0.667");
        let q = Rational::new(BigInt::from(-5), BigInt::from(4));
        assert_eq!(decimal(&q, 2, false), "-1.25");
        assert_eq!(decimal(&Rational::from_integer(BigInt::from(1)), 2, true), "1.00");
    }

    #[test]
    fn rationals_always_have_denominator() {
        assert_eq!(rational(&Rational::from_integer(BigInt::from(-2))), "-2/1");
    }
}
