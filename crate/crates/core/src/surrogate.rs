//! A finite largeness oracle standing in for an ultrafilter, quotient sets
//! `A/2^n`, the set `Â`, and the two extraction procedures with full
//! verification of every membership they rely on.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exp_value::{ExpValue, DEFAULT_EXPANSION_BITS};
use crate::search::SearchBudget;
use crate::set::{IntegerSet, SetError, WindowSet};
use crate::witness_search::{dagger_in, star_in};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("threshold must be at least 1")]
    ZeroThreshold,
    #[error("window must be at least 1")]
    EmptyWindow,
}

/// `S` is large iff `|S ∩ [1, W]| >= τ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LargenessOracle {
    window: u64,
    threshold: u64,
}

impl LargenessOracle {
    pub fn new(window: u64, threshold: u64) -> Result<Self, OracleError> {
        if window == 0 {
            return Err(OracleError::EmptyWindow);
        }
        if threshold == 0 {
            return Err(OracleError::ZeroThreshold);
        }
        Ok(LargenessOracle { window, threshold })
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn count(&self, s: &IntegerSet) -> Result<u64, SetError> {
        Ok(s.materialize(1, self.window)?.count())
    }

    pub fn is_large(&self, s: &IntegerSet) -> Result<bool, SetError> {
        Ok(self.count(s)? >= self.threshold)
    }

}

/// `A/2^n = {m : 2^n * m ∈ A}`.
pub fn quotient_set(a: &IntegerSet, n: &BigUint) -> Result<IntegerSet, SetError> {
    match a {
        IntegerSet::Predicate(e) => Ok(IntegerSet::Predicate(e.quotient_pow2(n))),
        IntegerSet::Explicit(w) => {
            let shift = n.to_u32().filter(|&s| s < 64);
            let outside = || SetError::OutsideWindow { n: format!("2^{n}*m"), lo: w.lo(), hi: w.hi() };
            let shift = shift.ok_or_else(outside)?;
            let lo = w.lo().div_ceil(1 << shift).max(1);
            let hi = w.hi() >> shift;
            if hi < lo {
                return Err(outside());
            }
            let members = (lo..=hi).filter(|m| w.has(m << shift));
            Ok(IntegerSet::explicit(lo, hi, members))
        }
    }
}

/// `Â = {n <= n_max : A/2^n is large}`, as a window over `[1, n_max]`.
pub fn a_hat(a: &IntegerSet, oracle: &LargenessOracle, n_max: u64) -> Result<WindowSet, SetError> {
    let mut out = WindowSet::empty(1, n_max);
    for n in 1..=n_max {
        if oracle.is_large(&quotient_set(a, &BigUint::from(n))?)? {
            out.insert(n);
        }
    }
    Ok(out)
}

/// One oracle query made during an extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub set: String,
    pub count: u64,
    pub large: bool,
}

/// One membership asserted by the construction and re-checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipCheck {
    pub value: ExpValue,
    pub set: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportStep {
    pub description: String,
    pub chosen: String,
    pub verdicts: Vec<OracleVerdict>,
    pub checks: Vec<MembershipCheck>,
}

/// Audit trail of an extraction or a sequence verification.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractionReport {
    pub steps: Vec<ReportStep>,
    pub success: bool,
}

impl ExtractionReport {
    pub fn checks(&self) -> impl Iterator<Item = &MembershipCheck> {
        self.steps.iter().flat_map(|s| s.checks.iter())
    }

    pub fn passed(&self) -> usize {
        self.checks().filter(|c| c.passed).count()
    }

    pub fn total(&self) -> usize {
        self.checks().count()
    }

    pub fn first_failure(&self) -> Option<&MembershipCheck> {
        self.checks().find(|c| !c.passed)
    }

    fn step(&mut self, description: impl Into<String>, chosen: impl Into<String>) -> &mut ReportStep {
        self.steps.push(ReportStep {
            description: description.into(),
            chosen: chosen.into(),
            verdicts: Vec::new(),
            checks: Vec::new(),
        });
        self.steps.last_mut().expect("just pushed")
    }

    fn finish(&mut self) {
        let ok = self.checks().all(|c| c.passed);
        self.success = ok;
    }
}

impl fmt::Display for ExtractionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.steps.iter().enumerate() {
            writeln!(f, "STEP {}: {} chose {}", k + 1, s.description, s.chosen)?;
            for v in &s.verdicts {
                writeln!(f, "ORACLE {} count={} large={}", v.set, v.count, v.large)?;
            }
            for c in &s.checks {
                writeln!(f, "CHECK {} in {}: {}", c.value, c.set, if c.passed { "PASS" } else { "FAIL" })?;
            }
        }
        writeln!(f, "RESULT success={} checks={}/{}", self.success, self.passed(), self.total())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    EmptyAHat,
    StarWitnessFailed,
    IntersectionEmpty,
    ConstituentNotLarge,
    DaggerWitnessFailed,
    VerificationFailed,
    MalformedSequence,
    Set,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A named failure together with the report up to the failing step.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{kind}: {detail}")]
pub struct ExtractError {
    pub kind: FailureKind,
    pub detail: String,
    pub report: Box<ExtractionReport>,
}

fn fail(kind: FailureKind, detail: impl Into<String>, mut report: ExtractionReport) -> ExtractError {
    report.finish();
    report.success = false;
    ExtractError { kind, detail: detail.into(), report: Box::new(report) }
}

/// Shared state of one extraction run.
struct Run<'a> {
    a: &'a IntegerSet,
    oracle: &'a LargenessOracle,
    budget: &'a SearchBudget,
    report: ExtractionReport,
}

impl<'a> Run<'a> {
    fn new(a: &'a IntegerSet, oracle: &'a LargenessOracle, budget: &'a SearchBudget) -> Self {
        Run { a, oracle, budget, report: ExtractionReport::default() }
    }

    fn fail(&mut self, kind: FailureKind, detail: impl Into<String>) -> ExtractError {
        fail(kind, detail, std::mem::take(&mut self.report))
    }

    fn set_err(&mut self, e: SetError) -> ExtractError {
        self.fail(FailureKind::Set, e.to_string())
    }

    fn quotient(&mut self, n: &BigUint) -> Result<IntegerSet, ExtractError> {
        quotient_set(self.a, n).map_err(|e| self.set_err(e))
    }

    /// Oracle verdict on `A/2^n`.
    fn verdict(&mut self, n: &BigUint) -> Result<OracleVerdict, ExtractError> {
        let q = self.quotient(n)?;
        let count = self.oracle.count(&q).map_err(|e| self.set_err(e))?;
        Ok(OracleVerdict { set: format!("A/2^{n}"), count, large: count >= self.oracle.threshold() })
    }

    /// `v ∈ A`, evaluated on the exact value.
    fn check_in_a(&mut self, v: ExpValue) -> Result<MembershipCheck, ExtractError> {
        let passed = self.a.contains_normal(&v.normal_form()).map_err(|e| self.set_err(e))?;
        Ok(MembershipCheck { value: v, set: "A".into(), passed })
    }

    /// `n ∈ Â`, i.e. `A/2^n` is large.
    fn check_in_ahat(&mut self, n: &BigUint) -> Result<MembershipCheck, ExtractError> {
        let passed = self.verdict(n)?.large;
        Ok(MembershipCheck { value: ExpValue::Num(n.clone()), set: "Â".into(), passed })
    }

    fn a_hat(&mut self) -> Result<WindowSet, ExtractError> {
        a_hat(self.a, self.oracle, self.budget.max_value).map_err(|e| self.set_err(e))
    }

    /// `A/2^n ∩ [1, max_value]` as a window.
    fn quotient_window(&mut self, n: &BigUint) -> Result<WindowSet, ExtractError> {
        let q = self.quotient(n)?;
        q.materialize(1, self.budget.max_value).map_err(|e| self.set_err(e))
    }
}

fn describe_start(run: &Run, ahat: &WindowSet) -> String {
    format!(
        "least element of Â for A = {} (W={}, tau={}, n_max={}, |Â|={})",
        run.a,
        run.oracle.window(),
        run.oracle.threshold(),
        run.budget.max_value,
        ahat.count()
    )
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

/// `2^e` if it fits below `cap`.
fn pow2_within(e: u64, cap: u64) -> Option<u64> {
    (e < 64).then(|| 1u64 << e).filter(|&v| v <= cap)
}

/// Output of the triple extraction: `x = 2^a c`, `y = 2^b d`, `z = 2^x y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exp2Triple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub x: ExpValue,
    pub y: ExpValue,
    pub z: ExpValue,
    pub report: ExtractionReport,
}

/// Finds `x, y` with `x, y, 2^x y ∈ A`: `a = min Â`; `(b, c)` with
/// `b, c, b + 2^a c ∈ A/2^a ∩ Â`; `d = min A/2^b ∩ A/2^(b + 2^a c)`;
/// `x = 2^a c`, `y = 2^b d`. Values are searched up to `budget.max_value`.
pub fn extract_exp2_triple(
    a: &IntegerSet,
    oracle: &LargenessOracle,
    budget: &SearchBudget,
) -> Result<Exp2Triple, ExtractError> {
    let mut run = Run::new(a, oracle, budget);

    let ahat = run.a_hat()?;
    let Some(a0) = ahat.first() else {
        return Err(run.fail(FailureKind::EmptyAHat, format!("no n <= {} has A/2^n large", budget.max_value)));
    };
    let v = run.verdict(&big(a0))?;
    let s = run.report.step(describe_start(&run, &ahat), format!("a={a0}"));
    s.verdicts.push(v);

    let ell = match pow2_within(a0, budget.max_value) {
        Some(l) => l,
        None => return Err(run.fail(FailureKind::StarWitnessFailed, format!("2^{a0} exceeds the value cap"))),
    };
    let mut target = run.quotient_window(&big(a0))?;
    target.intersect_with(&ahat);
    if target.first().is_none() {
        return Err(run.fail(FailureKind::IntersectionEmpty, format!("A/2^{a0} ∩ Â is empty")));
    }
    let (b, c) = match star_in(&target, ell, budget) {
        Ok(bc) => bc,
        Err(e) => return Err(run.fail(FailureKind::StarWitnessFailed, e.to_string())),
    };
    let top = b + ell * c;
    let mut checks = Vec::new();
    for v in [b, c, top] {
        checks.push(run.check_in_a(ExpValue::scaled(a0, v))?);
        checks.push(run.check_in_ahat(&big(v))?);
    }
    let s = run.report.step(format!("star witness in A/2^{a0} ∩ Â with l=2^{a0}"), format!("b={b} c={c}"));
    s.checks = checks;

    let vb = run.verdict(&big(b))?;
    let vt = run.verdict(&big(top))?;
    let mut inter = run.quotient_window(&big(b))?;
    inter.intersect_with(&run.quotient_window(&big(top))?);
    let Some(d) = inter.first() else {
        return Err(run.fail(FailureKind::IntersectionEmpty, format!("A/2^{b} ∩ A/2^{top} has no element up to {}", budget.max_value)));
    };
    let s = run.report.step(format!("least element of A/2^{b} ∩ A/2^{top}"), format!("d={d}"));
    s.verdicts = vec![vb, vt];

    let x = ExpValue::num(ell * c);
    let y = ExpValue::scaled(b, d);
    let z = ExpValue::Pow2(big(ell * c)).mul(&y);
    let mut checks = Vec::new();
    for v in [x.clone(), y.clone(), z.clone()] {
        checks.push(run.check_in_a(v)?);
    }
    let identity = z == ExpValue::scaled(top, d);
    checks.push(MembershipCheck {
        value: z.clone(),
        set: format!("{{2^{top}*{d}}}"),
        passed: identity,
    });
    let s = run.report.step("x = 2^a*c, y = 2^b*d", format!("x={x} y={y} 2^x*y={z}"));
    s.checks = checks;

    run.report.finish();
    if !run.report.success {
        return Err(run.fail(FailureKind::VerificationFailed, "a membership check failed"));
    }
    Ok(Exp2Triple { a: a0, b, c, d, x, y, z, report: run.report })
}

/// Output of the sequence extraction; `seq[0]` is `a_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpSequence {
    pub seq: Vec<u64>,
    pub report: ExtractionReport,
}

/// `a_{2j+1} + 2^{a_i} a_{2j}` with 1-based indices.
fn cross(seq: &[u64], i: usize, j: usize) -> BigUint {
    big(seq[2 * j]) + (big(seq[2 * j - 1]) << seq[i - 1])
}

/// Builds `a_1, ..., a_{2n+1}`. Step `s` intersects `Â`, every `A/2^{a_i}`
/// with `i <= 2s-1` and every `A/2^(a_{2j+1} + 2^{a_i} a_{2j})` with
/// `i < 2j < 2s-1`, then takes the least `(b, c)` with `b + l c` inside for
/// all `l <= max 2^{a_i}`, setting `a_{2s} = c`, `a_{2s+1} = b`. The finished
/// sequence is checked against all four condition families.
pub fn extract_exp_sequence(
    a: &IntegerSet,
    oracle: &LargenessOracle,
    n: usize,
    budget: &SearchBudget,
) -> Result<ExpSequence, ExtractError> {
    let mut run = Run::new(a, oracle, budget);
    if n == 0 {
        return Err(run.fail(FailureKind::MalformedSequence, "n must be at least 1"));
    }

    let ahat = run.a_hat()?;
    let Some(a1) = ahat.first() else {
        return Err(run.fail(FailureKind::EmptyAHat, format!("no n <= {} has A/2^n large", budget.max_value)));
    };
    let v = run.verdict(&big(a1))?;
    let s = run.report.step(describe_start(&run, &ahat), format!("a_1={a1}"));
    s.verdicts.push(v);

    let mut seq = vec![a1];
    for step in 1..=n {
        let m = 2 * step - 1;
        let mut exponents: Vec<BigUint> = seq.iter().map(|&v| big(v)).collect();
        for j in 1..=(m - 1) / 2 {
            for i in 1..2 * j {
                exponents.push(cross(&seq, i, j));
            }
        }
        exponents.sort();
        exponents.dedup();
        let mut verdicts = Vec::new();
        let mut target = ahat.clone();
        for e in &exponents {
            let v = run.verdict(e)?;
            let large = v.large;
            let name = v.set.clone();
            verdicts.push(v);
            if !large {
                run.report.step(format!("build A_{step}"), "nothing").verdicts = verdicts;
                return Err(run.fail(FailureKind::ConstituentNotLarge, format!("{name} is not large")));
            }
            target.intersect_with(&run.quotient_window(e)?);
        }
        if target.first().is_none() {
            run.report.step(format!("build A_{step}"), "nothing").verdicts = verdicts;
            return Err(run.fail(FailureKind::IntersectionEmpty, format!("A_{step} has no element up to {}", budget.max_value)));
        }
        let max_a = *seq.iter().max().expect("nonempty");
        let Some(big_l) = pow2_within(max_a, budget.max_value) else {
            return Err(run.fail(FailureKind::DaggerWitnessFailed, format!("L = 2^{max_a} exceeds the value cap")));
        };
        let (b, c) = match dagger_in(&target, big_l, budget) {
            Ok(bc) => bc,
            Err(e) => {
                run.report.step(format!("build A_{step}"), "nothing").verdicts = verdicts;
                return Err(run.fail(FailureKind::DaggerWitnessFailed, format!("step {step}: {e}")));
            }
        };
        seq.push(c);
        seq.push(b);
        let s = run.report.step(
            format!("dagger witness in A_{step} ({} constituents, |A_{step}| = {}) with L={big_l}", exponents.len() + 1, target.count()),
            format!("a_{}={c} a_{}={b}", 2 * step, 2 * step + 1),
        );
        s.verdicts = verdicts;
    }

    let checks = condition_checks(&mut run, &seq)?;
    let s = run.report.step("verify conditions (1)-(4)", format!("a={}", join(&seq)));
    s.checks = checks;
    run.report.finish();
    if !run.report.success {
        return Err(run.fail(FailureKind::VerificationFailed, "a condition check failed"));
    }
    Ok(ExpSequence { seq, report: run.report })
}

fn join(seq: &[u64]) -> String {
    seq.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// All instances of the four condition families for `a_1..a_m` (1-based).
fn condition_checks(run: &mut Run, seq: &[u64]) -> Result<Vec<MembershipCheck>, ExtractError> {
    let m = seq.len();
    let mut checks = Vec::new();
    for &v in seq {
        checks.push(run.check_in_ahat(&big(v))?);
    }
    for j in 1..=(m - 1) / 2 {
        for i in 1..2 * j {
            checks.push(run.check_in_ahat(&cross(seq, i, j))?);
        }
    }
    for k in 2..=m {
        for i in 1..k {
            if k == i + 1 && k % 2 == 1 {
                continue;
            }
            checks.push(run.check_in_a(ExpValue::scaled(seq[i - 1], seq[k - 1]))?);
        }
    }
    for j in 1..=(m - 1) / 2 {
        for i in 1..2 * j {
            for k in 2 * j + 2..=m {
                checks.push(run.check_in_a(ExpValue::scaled(cross(seq, i, j), seq[k - 1]))?);
            }
        }
    }
    Ok(checks)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternMode {
    /// `b_n = 2^{a_{2n-1}} a_{2n}`; checks `b_n` and `2^{b_n} b_{n+1}` in `A`.
    Exp2,
    /// `b_n = 2^(2^{a_{2n-1}} a_{2n})`; checks `b_n` and `b_{n+1}^{b_n}` in
    /// `2^A = {2^e : e ∈ A}`.
    Tower,
}

impl std::str::FromStr for PatternMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exp2" => Ok(PatternMode::Exp2),
            "tower" => Ok(PatternMode::Tower),
            _ => Err(format!("unknown mode `{s}` (expected exp2 or tower)")),
        }
    }
}

/// Checks the infinite-pattern consequences on a finite prefix `a_1..a_m`.
pub fn verify_infinite_pattern(
    seq: &[u64],
    a: &IntegerSet,
    mode: PatternMode,
) -> Result<ExtractionReport, ExtractError> {
    let mut report = ExtractionReport::default();
    if seq.len() < 4 || seq.contains(&0) {
        return Err(fail(FailureKind::MalformedSequence, "need at least four positive terms", report));
    }
    // exponent-level sequence b'_n = 2^{a_{2n-1}} a_{2n}
    let exps: Vec<BigUint> = (1..=seq.len() / 2).map(|n| big(seq[2 * n - 1]) << seq[2 * n - 2]).collect();
    let set = match mode {
        PatternMode::Exp2 => "A",
        PatternMode::Tower => "2^A",
    };
    for (idx, b) in exps.iter().enumerate() {
        let n = idx + 1;
        let mut checks = Vec::new();
        let passed = match a.contains_big(b) {
            Ok(p) => p,
            Err(e) => return Err(fail(FailureKind::Set, e.to_string(), report)),
        };
        let value = match mode {
            PatternMode::Exp2 => ExpValue::Num(b.clone()),
            PatternMode::Tower => ExpValue::Pow2(b.clone()),
        };
        let mut chosen = format!("b_{n}={value}");
        checks.push(MembershipCheck { value, set: set.into(), passed });
        if let Some(next) = exps.get(idx + 1) {
            let Some(shift) = b.to_u64().filter(|&s| s <= DEFAULT_EXPANSION_BITS) else {
                return Err(fail(FailureKind::MalformedSequence, format!("b_{n} is too large"), report));
            };
            let exponent_level = ExpValue::scaled(shift, next.clone());
            let passed = match a.contains_normal(&exponent_level.normal_form()) {
                Ok(p) => p,
                Err(e) => return Err(fail(FailureKind::Set, e.to_string(), report)),
            };
            let value = match mode {
                PatternMode::Exp2 => exponent_level,
                PatternMode::Tower => {
                    let base = ExpValue::Pow2(next.clone());
                    match base.pow(&ExpValue::Pow2(b.clone()), DEFAULT_EXPANSION_BITS) {
                        Ok(v) => v,
                        Err(e) => return Err(fail(FailureKind::MalformedSequence, e.to_string(), report)),
                    }
                }
            };
            chosen.push_str(&format!(" next={value}"));
            checks.push(MembershipCheck { value, set: set.into(), passed });
        }
        let label = match mode {
            PatternMode::Exp2 => format!("b_{n} = 2^a_{} * a_{}", 2 * n - 1, 2 * n),
            PatternMode::Tower => format!("b_{n} = 2^(2^a_{} * a_{})", 2 * n - 1, 2 * n),
        };
        report.step(label, chosen).checks = checks;
    }
    report.finish();
    Ok(report)
}
