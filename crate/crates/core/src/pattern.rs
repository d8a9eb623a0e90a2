//! Pattern families and their instances inside a finite window.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use thiserror::Error;

use crate::coloring::Coloring;
use crate::exp_value::{ExpValue, ExpValueError, DEFAULT_EXPANSION_BITS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("unknown pattern `{0}` (expected schur, ap:K, brauer:L, genschur:L, exp2 or exp)")]
    Unknown(String),
    #[error("bad pattern parameter in `{0}`")]
    BadParameter(String),
    #[error("pattern {kind} takes {expected} slots, got {got}")]
    SlotCount { kind: String, expected: usize, got: usize },
    #[error(transparent)]
    Value(#[from] ExpValueError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness values do not match the values recomputed from its slots")]
    ValuesMismatch,
    #[error("value {value} is outside the coloring window")]
    OutsideWindow { value: String },
    #[error("value {value} has color {found}, witness claims {claimed}")]
    WrongColor { value: String, found: usize, claimed: usize },
    #[error("witness values repeat but the pattern requires distinct members")]
    NotDistinct,
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// The shape of a pattern; parameters are stored inline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternKind {
    /// `{a, b, a+b}`
    Schur,
    /// `{a, a+d, ..., a+(len-1)d}`
    Ap { len: u32 },
    /// `{b, c, b+c, ..., b+ell*c}`
    Brauer { ell: u32 },
    /// `{b, c, b+ell*c}`
    GenSchur { ell: u32 },
    /// `{x, y, 2^x * y}`
    ExpTwoTriple,
    /// `{a, b, b^a}`
    ExpTriple,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PatternSpec {
    pub kind: PatternKind,
    pub min_element: u64,
    pub require_distinct: bool,
}

impl PatternSpec {
    pub fn new(kind: PatternKind) -> Self {
        let min_element = if kind == PatternKind::ExpTriple { 2 } else { 1 };
        PatternSpec { kind, min_element, require_distinct: false }
    }

    pub fn schur() -> Self {
        Self::new(PatternKind::Schur)
    }

    pub fn ap(len: u32) -> Self {
        Self::new(PatternKind::Ap { len })
    }

    pub fn brauer(ell: u32) -> Self {
        Self::new(PatternKind::Brauer { ell })
    }

    pub fn gen_schur(ell: u32) -> Self {
        Self::new(PatternKind::GenSchur { ell })
    }

    pub fn exp_two_triple() -> Self {
        Self::new(PatternKind::ExpTwoTriple)
    }

    pub fn exp_triple() -> Self {
        Self::new(PatternKind::ExpTriple)
    }

    pub fn with_min_element(mut self, min: u64) -> Self {
        self.min_element = min.max(1);
        self
    }

    pub fn with_distinct(mut self, distinct: bool) -> Self {
        self.require_distinct = distinct;
        self
    }

    pub fn validate(&self) -> Result<(), PatternError> {
        let bad = match self.kind {
            PatternKind::Ap { len } => len < 2,
            PatternKind::Brauer { ell } | PatternKind::GenSchur { ell } => ell < 1,
            _ => false,
        };
        if bad || self.min_element < 1 {
            return Err(PatternError::BadParameter(self.kind.to_string()));
        }
        Ok(())
    }

    pub fn num_slots(&self) -> usize {
        2
    }

    /// All members of the instance with the given slots, computed exactly.
    pub fn members(&self, slots: &[ExpValue]) -> Result<Vec<ExpValue>, PatternError> {
        if slots.len() != self.num_slots() {
            return Err(PatternError::SlotCount {
                kind: self.kind.to_string(),
                expected: self.num_slots(),
                got: slots.len(),
            });
        }
        let big = |v: &ExpValue| v.to_biguint(DEFAULT_EXPANSION_BITS);
        let (s, t) = (&slots[0], &slots[1]);
        let out = match self.kind {
            PatternKind::Schur => {
                let (a, b) = (big(s)?, big(t)?);
                vec![s.clone(), t.clone(), ExpValue::Num(a + b)]
            }
            PatternKind::Ap { len } => {
                let (a, d) = (big(s)?, big(t)?);
                (0..len).map(|i| ExpValue::Num(&a + &d * i)).collect()
            }
            PatternKind::Brauer { ell } => {
                let (b, c) = (big(s)?, big(t)?);
                let mut v = vec![s.clone(), t.clone()];
                v.extend((1..=ell).map(|i| ExpValue::Num(&b + &c * i)));
                v
            }
            PatternKind::GenSchur { ell } => {
                let (b, c) = (big(s)?, big(t)?);
                vec![s.clone(), t.clone(), ExpValue::Num(b + c * ell)]
            }
            PatternKind::ExpTwoTriple => {
                let x = big(s)?;
                vec![s.clone(), t.clone(), ExpValue::Pow2(x).mul(t)]
            }
            PatternKind::ExpTriple => {
                vec![s.clone(), t.clone(), t.pow(s, DEFAULT_EXPANSION_BITS)?]
            }
        };
        Ok(out)
    }

    /// Visits every instance whose members all lie in
    /// `[max(lo, min_element), hi]`, in lexicographic slot order.
    ///
    /// The callback receives `(slots, members)`.
    pub fn for_each_instance<F>(&self, lo: u64, hi: u64, mut f: F)
    where
        F: FnMut(&[u64], &[u64]) -> ControlFlow<()>,
    {
        let lo = lo.max(self.min_element).max(1);
        if hi < lo {
            return;
        }
        let mut members: Vec<u64> = Vec::with_capacity(8);
        let mut emit = |slots: [u64; 2], members: &[u64]| -> ControlFlow<()> {
            if self.require_distinct && !all_distinct(members) {
                return ControlFlow::Continue(());
            }
            f(&slots, members)
        };
        match self.kind {
            PatternKind::Schur => {
                for a in lo..=hi / 2 {
                    for b in a..=hi - a {
                        if emit([a, b], &[a, b, a + b]).is_break() {
                            return;
                        }
                    }
                }
            }
            PatternKind::Ap { len } => {
                let steps = u64::from(len) - 1;
                for a in lo..=hi {
                    let mut d = 1;
                    while a + steps * d <= hi {
                        members.clear();
                        members.extend((0..=steps).map(|i| a + i * d));
                        if emit([a, d], &members).is_break() {
                            return;
                        }
                        d += 1;
                    }
                }
            }
            PatternKind::Brauer { ell } | PatternKind::GenSchur { ell } => {
                let ell = u64::from(ell);
                let brauer = matches!(self.kind, PatternKind::Brauer { .. });
                for b in lo..=hi {
                    let mut c = lo;
                    while b.checked_add(ell.saturating_mul(c)).is_some_and(|top| top <= hi) {
                        members.clear();
                        members.push(b);
                        members.push(c);
                        if brauer {
                            members.extend((1..=ell).map(|i| b + i * c));
                        } else {
                            members.push(b + ell * c);
                        }
                        if emit([b, c], &members).is_break() {
                            return;
                        }
                        c += 1;
                    }
                }
            }
            PatternKind::ExpTwoTriple => {
                for x in lo..=hi {
                    let Some(scale) = pow2_capped(x, hi) else { break };
                    if scale.saturating_mul(lo) > hi {
                        break;
                    }
                    for y in lo..=hi {
                        let z = scale.saturating_mul(y);
                        if z > hi {
                            break;
                        }
                        if emit([x, y], &[x, y, z]).is_break() {
                            return;
                        }
                    }
                }
            }
            PatternKind::ExpTriple => {
                for a in lo..=hi {
                    if pow_capped(lo, a, hi).is_none() {
                        break;
                    }
                    for b in lo..=hi {
                        let Some(z) = pow_capped(b, a, hi) else { break };
                        if emit([a, b], &[a, b, z]).is_break() {
                            return;
                        }
                    }
                }
            }
        }
    }

    /// A witness for the instance with the given `u64` slots.
    pub fn witness(&self, slots: &[u64], color: Option<usize>) -> Result<Witness, PatternError> {
        let slots: Vec<ExpValue> = slots.iter().map(|&s| ExpValue::num(s)).collect();
        let values = self.members(&slots)?;
        Ok(Witness { pattern: *self, slots, values, color })
    }
}

/// `2^e` if it is at most `cap`.
fn pow2_capped(e: u64, cap: u64) -> Option<u64> {
    if e >= 64 {
        return None;
    }
    let v = 1u64 << e;
    (v <= cap).then_some(v)
}

/// `base^e` by repeated multiplication, aborting once it exceeds `cap`.
fn pow_capped(base: u64, e: u64, cap: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(base).filter(|&v| v <= cap)?;
        if base == 1 {
            break;
        }
    }
    (acc <= cap).then_some(acc)
}

fn all_distinct(values: &[u64]) -> bool {
    values.iter().enumerate().all(|(i, v)| !values[..i].contains(v))
}

/// One instance: slots and members, both as plain integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance {
    pub slots: Vec<u64>,
    pub values: Vec<u64>,
}

/// Every instance of `p` with members in `[1, n]`, in lexicographic slot order.
pub fn enumerate_instances(p: &PatternSpec, n: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    p.for_each_instance(1, n, |slots, values| {
        out.push(Instance { slots: slots.to_vec(), values: values.to_vec() });
        ControlFlow::Continue(())
    });
    out
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternKind::Schur => write!(f, "schur"),
            PatternKind::Ap { len } => write!(f, "ap:{len}"),
            PatternKind::Brauer { ell } => write!(f, "brauer:{ell}"),
            PatternKind::GenSchur { ell } => write!(f, "genschur:{ell}"),
            PatternKind::ExpTwoTriple => write!(f, "exp2"),
            PatternKind::ExpTriple => write!(f, "exp"),
        }
    }
}

impl FromStr for PatternKind {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s.as_str(), None),
        };
        let num = |p: Option<&str>, min: u32| -> Result<u32, PatternError> {
            let v: u32 = p
                .ok_or_else(|| PatternError::BadParameter(s.clone()))?
                .parse()
                .map_err(|_| PatternError::BadParameter(s.clone()))?;
            if v < min {
                return Err(PatternError::BadParameter(s.clone()));
            }
            Ok(v)
        };
        let kind = match name {
            "schur" if param.is_none() => PatternKind::Schur,
            "ap" => PatternKind::Ap { len: num(param, 2)? },
            "brauer" => PatternKind::Brauer { ell: num(param, 1)? },
            "genschur" => PatternKind::GenSchur { ell: num(param, 1)? },
            "exp2" if param.is_none() => PatternKind::ExpTwoTriple,
            "exp" if param.is_none() => PatternKind::ExpTriple,
            _ => return Err(PatternError::Unknown(s.clone())),
        };
        Ok(kind)
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

/// A checkable certificate: the slots determine the values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub pattern: PatternSpec,
    pub slots: Vec<ExpValue>,
    pub values: Vec<ExpValue>,
    pub color: Option<usize>,
}

impl Witness {
    /// Recomputes the values from the slots and, when a color is claimed,
    /// checks every value against `coloring`.
    pub fn check(&self, coloring: Option<&Coloring>) -> Result<(), WitnessError> {
        let recomputed = self.pattern.members(&self.slots)?;
        if recomputed != self.values {
            return Err(WitnessError::ValuesMismatch);
        }
        if self.pattern.require_distinct {
            let nfs: Vec<_> = self.values.iter().map(ExpValue::normal_form).collect();
            if nfs.iter().enumerate().any(|(i, v)| nfs[..i].contains(v)) {
                return Err(WitnessError::NotDistinct);
            }
        }
        if let (Some(claimed), Some(c)) = (self.color, coloring) {
            for v in &self.values {
                match c.color_of_value(v) {
                    None => return Err(WitnessError::OutsideWindow { value: v.to_string() }),
                    Some(found) if found != claimed => {
                        return Err(WitnessError::WrongColor { value: v.to_string(), found, claimed })
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    pub fn values_u64(&self) -> Option<Vec<u64>> {
        self.values.iter().map(ExpValue::to_u64).collect()
    }

    pub fn slots_u64(&self) -> Option<Vec<u64>> {
        self.slots.iter().map(ExpValue::to_u64).collect()
    }
}

fn join(values: &[ExpValue]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} slots=({}) values=({})", self.pattern, join(&self.slots), join(&self.values))?;
        if let Some(c) = self.color {
            write!(f, " color={c}")?;
        }
        Ok(())
    }
}

impl Witness {
    /// Parses the line format produced by `Display`.
    pub fn parse(line: &str, pattern: PatternSpec) -> Result<Witness, PatternError> {
        let bad = || PatternError::BadParameter(line.to_string());
        let mut parts = line.split_whitespace();
        let kind: PatternKind = parts.next().ok_or_else(bad)?.parse()?;
        if kind != pattern.kind {
            return Err(bad());
        }
        let tuple = |field: &str, key: &str| -> Result<Vec<ExpValue>, PatternError> {
            let inner = field
                .strip_prefix(key)
                .and_then(|s| s.strip_prefix('('))
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(bad)?;
            inner.split(',').map(|t| t.parse::<ExpValue>().map_err(PatternError::from)).collect()
        };
        let slots = tuple(parts.next().ok_or_else(bad)?, "slots=")?;
        let values = tuple(parts.next().ok_or_else(bad)?, "values=")?;
        let color = match parts.next() {
            None => None,
            Some(c) => Some(
                c.strip_prefix("color=").and_then(|c| c.parse().ok()).ok_or_else(bad)?,
            ),
        };
        Ok(Witness { pattern, slots, values, color })
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn triples(p: PatternSpec, n: u64) -> Vec<Vec<u64>> {
        enumerate_instances(&p, n).into_iter().map(|i| i.values).collect()
    }

    #[test]
    fn schur_instances() {
        assert_eq!(
            triples(PatternSpec::schur(), 4),
            vec![vec![1, 1, 2], vec![1, 2, 3], vec![1, 3, 4], vec![2, 2, 4]]
        );
    }

    #[test]
    fn exp_two_instances() {
        assert_eq!(
            triples(PatternSpec::exp_two_triple(), 8),
            vec![
                vec![1, 1, 2],
                vec![1, 2, 4],
                vec![1, 3, 6],
                vec![1, 4, 8],
                vec![2, 1, 4],
                vec![2, 2, 8],
                vec![3, 1, 8]
            ]
        );
    }

    #[test]
    fn exp_triple_instances() {
        assert_eq!(
            triples(PatternSpec::exp_triple(), 16),
            vec![vec![2, 2, 4], vec![2, 3, 9], vec![2, 4, 16], vec![3, 2, 8], vec![4, 2, 16]]
        );
        // min_element = 1 admits the degenerate {1, b, b} and {a, 1, 1}
        let all = triples(PatternSpec::exp_triple().with_min_element(1), 3);
        assert!(all.contains(&vec![1, 3, 3]));
        assert!(all.contains(&vec![3, 1, 1]));
    }

    #[test]
    fn ap_and_brauer_instances() {
        assert_eq!(triples(PatternSpec::ap(3), 5), vec![
            vec![1, 2, 3],
            vec![1, 3, 5],
            vec![2, 3, 4],
            vec![3, 4, 5]
        ]);
        assert_eq!(triples(PatternSpec::brauer(2), 5), vec![vec![1, 1, 2, 3], vec![1, 2, 3, 5], vec![2, 1, 3, 4], vec![3, 1, 4, 5]]);
        assert_eq!(triples(PatternSpec::gen_schur(3), 7), vec![vec![1, 1, 4], vec![1, 2, 7], vec![2, 1, 5], vec![3, 1, 6], vec![4, 1, 7]]);
    }

    #[test]
    fn distinct_filter() {
        assert_eq!(
            triples(PatternSpec::schur().with_distinct(true), 4),
            vec![vec![1, 2, 3], vec![1, 3, 4]]
        );
    }

    #[test]
    fn parse_pattern_kinds() {
        for s in ["schur", "ap:3", "brauer:1", "genschur:4", "exp2", "exp"] {
            assert_eq!(s.parse::<PatternKind>().unwrap().to_string(), s);
        }
        assert!("ap:1".parse::<PatternKind>().is_err());
        assert!("brauer".parse::<PatternKind>().is_err());
        assert!("cubes".parse::<PatternKind>().is_err());
    }

    #[test]
    fn witness_display_and_check() {
        let p = PatternSpec::exp_two_triple();
        let c = Coloring::from_fn(1, 8, 2, |n| (n % 2) as usize).unwrap();
        let w = p.witness(&[2, 2], Some(0)).unwrap();
        assert_eq!(w.to_string(), "exp2 slots=(2,2) values=(2,2,8) color=0");
        w.check(Some(&c)).unwrap();
        let parsed = Witness::parse(&w.to_string(), p).unwrap();
        assert_eq!(parsed, w);

        let mut bad = w.clone();
        bad.values[2] = ExpValue::num(6);
        assert_eq!(bad.check(None), Err(WitnessError::ValuesMismatch));
        let wrong = p.witness(&[1, 2], Some(0)).unwrap();
        assert!(matches!(wrong.check(Some(&c)), Err(WitnessError::WrongColor { .. })));
    }

    #[test]
    fn symbolic_members_for_large_slots() {
        let p = PatternSpec::exp_two_triple();
        let v = p.members(&[ExpValue::num(100), ExpValue::num(3)]).unwrap();
        assert_eq!(v[2], ExpValue::scaled(100u32, 3u32));
        assert_eq!(v[2].to_string(), "2^100*3");
    }
}
