//! End-to-end solver: initial height bound, de Weger bands, then refined
//! sieve and enumeration meeting in the middle.
//!
//! Writing `M = M(x, y) = max_p ord_p(abc) log p`, the pipeline is
//!
//! 1. `M <= m0` from the explicit height bounds;
//! 2. (a) the smallest `M1` on the schedule `10, floor(1.3 * 10), ...` for
//!    which the lattice stage of de Weger's sieve on `(M1, m0]` is trivial;
//!    (b) descending bands `(floor(M / 1.3), M]` while the sieve stays cheap;
//! 3. the remaining box `M <= M_k` is covered by refined sieves on the bands
//!    `mu'(n) < mu <= mu''(n)` from the top and refined enumerations of
//!    `mu <= mu'(n')` from the bottom until both meet.
//!
//! Every covered region is recorded and the ledger is checked against
//! `[0, m0]` before returning.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use crate::arith::{floor_div_log_with_cap, PrimeSet, DEFAULT_PRECISION_CAP};
use crate::bounds::{initial_bound, HeightBoundReport};
use crate::enumeration::{refined_enumeration_mu, EnumerationConfig, EnumerationStats};
use crate::error::{Error, Result};
use crate::sieves::{
    deweger_sieve, deweger_trivial, mu_length, refined_sieve, BoundPair, MuVector, SieveContext, SieveStats,
};
use crate::solution::{PositiveTriple, SUnitSolution, SymmetryClass};

/// How step 3 decides between the sieve and the enumeration side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Alternation {
    /// Accumulated deterministic work counters (lattice nodes and candidates
    /// versus table entries and pairs).
    #[default]
    WorkUnits,
    /// Accumulated wall-clock time.
    WallTime,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Candidate cap of a descending de Weger band.
    pub fp_cap: usize,
    /// Memory budget for the enumeration table, in bytes.
    pub mem_budget: usize,
    /// Maximal working precision of interval arithmetic, in bits.
    pub precision_cap: u32,
    /// Try `ceil((s - 1)(log m0 + log(2 pi e) / 2))` before the `M1` schedule.
    pub informed_start: bool,
    pub alternation: Alternation,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            threads: None,
            fp_cap: 1000,
            mem_budget: EnumerationConfig::default().mem_budget,
            precision_cap: DEFAULT_PRECISION_CAP,
            informed_start: false,
            alternation: Alternation::WorkUnits,
        }
    }
}

/// The stage that first found a class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    /// de Weger's sieve on the band `(lo, hi]` of `M`.
    DeWeger { lo: u64, hi: u64 },
    /// Refined sieve on `mu'(n) < mu <= mu''(n)`.
    RefinedSieve { n: u64 },
    /// Refined enumeration of `mu <= mu'(n)`.
    Enumeration { n: u64 },
}

impl Provenance {
    pub fn kind(&self) -> &'static str {
        match self {
            Provenance::DeWeger { .. } => "deweger",
            Provenance::RefinedSieve { .. } => "refined_sieve",
            Provenance::Enumeration { .. } => "enumeration",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::DeWeger { lo, hi } => write!(f, "deweger({lo},{hi}]"),
            Provenance::RefinedSieve { n } => write!(f, "refined_sieve(n={n})"),
            Provenance::Enumeration { n } => write!(f, "enumeration(n={n})"),
        }
    }
}

/// Regions of the search space already covered.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoverageLedger {
    /// Bands `(lo, hi]` of `M` covered by de Weger's sieve, in order.
    pub m_bands: Vec<(u64, u64)>,
    /// The box `M <= m_box` handed to the refined stages.
    pub m_box: u64,
    /// `n` of each refined sieve band, in order.
    pub sieve_ns: Vec<u64>,
    /// `n'` of each enumeration, in order.
    pub enumeration_ns: Vec<u64>,
}

impl CoverageLedger {
    /// Checks that the recorded regions cover `M <= m0`.
    pub fn check(&self, m0: u64) -> Result<()> {
        let fail = |msg: String| Err(Error::Internal(format!("coverage: {msg}")));
        let mut top = m0;
        for &(lo, hi) in &self.m_bands {
            if hi != top || lo > hi {
                return fail(format!("band ({lo}, {hi}] does not continue below {top}"));
            }
            top = lo;
        }
        if top != self.m_box {
            return fail(format!("bands end at {top}, box is {}", self.m_box));
        }
        if self.m_box == 0 {
            // No solution has M = 0.
            return if self.sieve_ns.is_empty() && self.enumeration_ns.is_empty() {
                Ok(())
            } else {
                fail("refined stages run on an empty box".into())
            };
        }
        // Sieve bands n = m_box + 1, m_box, ..., s chain mu''(n) = mu'(n + 1)
        // down from the box; enumerations reach mu'(e) with e = s.
        let mut expect = self.m_box + 1;
        for &n in &self.sieve_ns {
            if n != expect {
                return fail(format!("sieve band n = {n}, expected {expect}"));
            }
            expect -= 1;
        }
        let s = expect + 1;
        for (k, &n) in self.enumeration_ns.iter().enumerate() {
            if n != k as u64 + 1 {
                return fail(format!("enumeration n' = {n} out of order"));
            }
        }
        let e = self.enumeration_ns.last().copied().unwrap_or(0);
        if e != s {
            return fail(format!("sieve stops at {s}, enumeration at {e}"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageTimings {
    pub bounds: Duration,
    pub start: Duration,
    pub descent: Duration,
    pub refined_sieve: Duration,
    pub enumeration: Duration,
}

/// What the solver did; everything except `timings` is deterministic.
#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    /// Start value `M1` of the descent.
    pub m1: u64,
    /// `M` at the end of the descent.
    pub m_box: u64,
    /// Bands abandoned because they exceeded the candidate cap.
    pub overflowed_bands: Vec<(u64, u64)>,
    pub ledger: CoverageLedger,
    pub start_stats: SieveStats,
    pub descent_stats: SieveStats,
    pub refined_stats: SieveStats,
    pub enumeration_stats: EnumerationStats,
    pub timings: StageTimings,
}

#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub set: PrimeSet,
    /// Symmetry classes ordered by `(c, a)` of their positive triple.
    pub classes: Vec<SymmetryClass>,
    /// First stage that found each class, aligned with `classes`.
    pub provenance: Vec<Provenance>,
    /// Certified height bound; `0` when the set trivially has no solutions.
    pub m0: u64,
    pub bound: Option<HeightBoundReport>,
    pub report: SolveReport,
    /// False if a stage failed and `classes` is only a lower bound.
    pub complete: bool,
}

impl SolutionSet {
    fn empty(set: &PrimeSet) -> Self {
        SolutionSet {
            set: set.clone(),
            classes: Vec::new(),
            provenance: Vec::new(),
            m0: 0,
            bound: None,
            report: SolveReport::default(),
            complete: true,
        }
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn solution_count(&self) -> usize {
        self.classes.iter().map(|c| c.orbit.len()).sum()
    }

    /// All solutions, class by class, each orbit sorted by `x`.
    pub fn solutions(&self) -> impl Iterator<Item = &SUnitSolution> {
        self.classes.iter().flat_map(|c| c.orbit.iter())
    }

    pub fn triples(&self) -> impl Iterator<Item = &PositiveTriple> {
        self.classes.iter().map(|c| &c.triple)
    }

    pub fn contains(&self, sol: &SUnitSolution) -> bool {
        let t = sol.positive_triple();
        self.classes.binary_search_by(|c| c.triple.cmp(&t)).is_ok()
    }

    /// Number of classes found by each kind of stage.
    pub fn provenance_histogram(&self) -> BTreeMap<&'static str, usize> {
        let mut h = BTreeMap::new();
        for p in &self.provenance {
            *h.entry(p.kind()).or_insert(0) += 1;
        }
        h
    }
}

/// A failed run together with everything found before the failure.
#[derive(Debug)]
pub struct PartialSolve {
    pub partial: SolutionSet,
    pub error: Error,
}

/// The complete set of solutions of `x + y = 1` in S-units.
pub fn solve_sunit(set: &PrimeSet, config: &SolverConfig) -> Result<SolutionSet> {
    solve_sunit_partial(set, config).map_err(|p| p.error)
}

/// Like [`solve_sunit`], but keeps the classes found before a failure.
pub fn solve_sunit_partial(set: &PrimeSet, config: &SolverConfig) -> Result<SolutionSet, Box<PartialSolve>> {
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| {
                    Box::new(PartialSolve {
                        partial: SolutionSet::empty(set),
                        error: Error::InvalidInput(format!("thread pool: {e}")),
                    })
                })?;
            pool.install(|| Solver::new(set, config).run())
        }
        None => Solver::new(set, config).run(),
    }
}

struct Solver<'a> {
    set: &'a PrimeSet,
    config: &'a SolverConfig,
    ctx: SieveContext,
    found: BTreeMap<PositiveTriple, Provenance>,
    out: SolutionSet,
}

impl<'a> Solver<'a> {
    fn new(set: &'a PrimeSet, config: &'a SolverConfig) -> Self {
        let mut ctx = SieveContext::with_cap(None);
        ctx.precision_cap = config.precision_cap;
        Solver {
            set,
            config,
            ctx,
            found: BTreeMap::new(),
            out: SolutionSet::empty(set),
        }
    }

    fn run(mut self) -> Result<SolutionSet, Box<PartialSolve>> {
        match self.stages() {
            Ok(()) => Ok(self.finish(true)),
            Err(error) => Err(Box::new(PartialSolve {
                partial: self.finish(false),
                error,
            })),
        }
    }

    fn finish(mut self, complete: bool) -> SolutionSet {
        let (classes, provenance) = std::mem::take(&mut self.found)
            .into_iter()
            .map(|(t, p)| (SymmetryClass::from_triple(t), p))
            .unzip();
        self.out.classes = classes;
        self.out.provenance = provenance;
        self.out.complete = complete;
        self.out
    }

    fn record(&mut self, classes: impl IntoIterator<Item = PositiveTriple>, tag: Provenance) {
        for t in classes {
            self.found.entry(t).or_insert(tag);
        }
    }

    fn stages(&mut self) -> Result<()> {
        // Every solution has one of a, b, c even.
        if !self.set.contains(2) {
            return Ok(());
        }
        let clock = Instant::now();
        let bound = initial_bound(self.set).map_err(|e| e.in_stage("initial bound"))?;
        let m0 = bound.m0;
        self.out.m0 = m0;
        self.out.bound = Some(bound);
        self.out.report.timings.bounds = clock.elapsed();

        let clock = Instant::now();
        let m1 = self.start_value(m0)?;
        self.out.report.m1 = m1;
        if m1 < m0 {
            let band = self.bounds(m1, m0)?;
            let out = deweger_sieve(self.set, &band, &self.ctx).map_err(|e| e.in_stage(format!("band ({m1}, {m0}]")))?;
            self.out.report.start_stats.merge(&out.stats);
            self.record(out.classes, Provenance::DeWeger { lo: m1, hi: m0 });
        }
        self.out.report.ledger.m_bands.push((m1, m0));
        self.out.report.timings.start = clock.elapsed();

        let clock = Instant::now();
        let m = self.descend(m1)?;
        self.out.report.m_box = m;
        self.out.report.ledger.m_box = m;
        self.out.report.timings.descent = clock.elapsed();

        if m > 0 {
            self.refine(m)?;
        }
        self.out.report.ledger.check(m0)?;
        self.check_soundness(m0)
    }

    fn bounds(&self, lo: u64, hi: u64) -> Result<BoundPair> {
        BoundPair::from_heights_with_cap(self.set, lo, hi, self.config.precision_cap)
            .map_err(|e| e.in_stage(format!("exponent bounds for band ({lo}, {hi}]")))
    }

    /// Smallest `M1` on the schedule whose band `(M1, m0]` is trivial, or `m0`.
    fn start_value(&mut self, m0: u64) -> Result<u64> {
        let mut tried_below = 0;
        if self.config.informed_start {
            let m = informed_start(self.set.len(), m0);
            if m >= m0 {
                return Ok(m0);
            }
            if self.trivial(m, m0)? {
                return Ok(m);
            }
            tried_below = m;
        }
        let mut m1: u64 = 10;
        loop {
            if m1 >= m0 {
                return Ok(m0);
            }
            if m1 > tried_below && self.trivial(m1, m0)? {
                return Ok(m1);
            }
            m1 = m1.saturating_mul(13) / 10;
        }
    }

    fn trivial(&mut self, lo: u64, hi: u64) -> Result<bool> {
        let band = self.bounds(lo, hi)?;
        let (ok, stats) =
            deweger_trivial(self.set, &band, &self.ctx).map_err(|e| e.in_stage(format!("start test ({lo}, {hi}]")))?;
        self.out.report.start_stats.merge(&stats);
        Ok(ok)
    }

    /// Descends `M_{k+1} = floor(M_k / 1.3)` until `0` or a band gets too
    /// expensive; returns the final `M`.
    fn descend(&mut self, mut m: u64) -> Result<u64> {
        let cap = self.config.fp_cap;
        let ctx = SieveContext {
            cache: std::mem::take(&mut self.ctx.cache),
            fp_cap: Some(cap),
            precision_cap: self.config.precision_cap,
        };
        let result = (|| {
            while m > 0 {
                let next = m * 10 / 13;
                let band = self.bounds(next, m)?;
                match deweger_sieve(self.set, &band, &ctx) {
                    Ok(out) if out.stats.fp_points as usize <= cap => {
                        self.out.report.descent_stats.merge(&out.stats);
                        self.record(out.classes, Provenance::DeWeger { lo: next, hi: m });
                        self.out.report.ledger.m_bands.push((next, m));
                        m = next;
                    }
                    Ok(out) => {
                        self.out.report.descent_stats.merge(&out.stats);
                        self.out.report.overflowed_bands.push((next, m));
                        break;
                    }
                    Err(e) if matches!(e.root(), Error::CandidateOverflow { .. }) => {
                        self.out.report.overflowed_bands.push((next, m));
                        break;
                    }
                    Err(e) => return Err(e.in_stage(format!("band ({next}, {m}]"))),
                }
            }
            Ok(m)
        })();
        self.ctx.cache = ctx.cache;
        result
    }

    /// Covers `M <= m` with refined sieves from above and enumerations from
    /// below.
    fn refine(&mut self, m: u64) -> Result<()> {
        let t = mu_length(self.set.len());
        let ecfg = EnumerationConfig {
            mem_budget: self.config.mem_budget,
            precision_cap: self.config.precision_cap,
        };
        let (mut s, mut e) = (m + 2, 0u64);
        let (mut sieve_work, mut enum_work) = (0u64, 0u64);
        let (mut sieve_time, mut enum_time) = (Duration::ZERO, Duration::ZERO);
        while s != e {
            let sieve_ok = s > e.max(1);
            let enum_ok = e < s.min(m + 1);
            let sieve_next = match (sieve_ok, enum_ok) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => match self.config.alternation {
                    Alternation::WorkUnits => sieve_work < enum_work,
                    Alternation::WallTime => sieve_time < enum_time,
                },
                (false, false) => return Err(Error::Internal(format!("refined stages stuck at s = {s}, e = {e}"))),
            };
            let clock = Instant::now();
            if sieve_next {
                let n = s - 1;
                let lo = MuVector::lower_schedule(n, t);
                let hi = if n == m + 1 {
                    MuVector::constant(m, t)
                } else {
                    MuVector::lower_schedule(n + 1, t)
                };
                let out = refined_sieve(self.set, &lo, &hi, &self.ctx)
                    .map_err(|err| err.in_stage(format!("refined sieve n = {n}")))?;
                sieve_work += out.stats.fp_nodes + out.stats.candidates_checked;
                self.out.report.refined_stats.merge(&out.stats);
                self.record(out.classes, Provenance::RefinedSieve { n });
                self.out.report.ledger.sieve_ns.push(n);
                s = n;
                sieve_time += clock.elapsed();
            } else {
                let n = e + 1;
                let mu = MuVector::lower_schedule(n, t);
                let out = refined_enumeration_mu(self.set, &mu, &ecfg)
                    .map_err(|err| err.in_stage(format!("enumeration n' = {n}")))?;
                enum_work += out.stats.work();
                self.out.report.enumeration_stats.merge(&out.stats);
                self.record(out.classes, Provenance::Enumeration { n });
                self.out.report.ledger.enumeration_ns.push(n);
                e = n;
                enum_time += clock.elapsed();
            }
        }
        self.out.report.timings.refined_sieve = sieve_time;
        self.out.report.timings.enumeration = enum_time;
        Ok(())
    }

    /// Every class found must satisfy `M <= m0`.
    fn check_soundness(&self, m0: u64) -> Result<()> {
        let caps: Vec<u64> = self
            .set
            .primes()
            .iter()
            .map(|&p| floor_div_log_with_cap(m0, p, self.config.precision_cap))
            .collect::<Result<_>>()?;
        for t in self.found.keys() {
            let ok = t
                .m_vector(self.set)
                .is_some_and(|m| m.iter().zip(&caps).all(|(&e, &c)| e as u64 <= c));
            if !ok {
                return Err(Error::Internal(format!(
                    "class ({}, {}, {}) exceeds the height bound {m0}",
                    t.a, t.b, t.c
                )));
            }
        }
        Ok(())
    }
}

/// `ceil((s - 1)(log m0 + log(2 pi e) / 2))`, a heuristic for the smallest
/// trivial band start.
fn informed_start(s: usize, m0: u64) -> u64 {
    let v = (s.saturating_sub(1)) as f64 * ((m0.max(1) as f64).ln() + 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln());
    v.ceil().max(1.0) as u64
}
