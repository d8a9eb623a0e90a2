//! Sets of naturals: packed windows and symbolic membership rules.
//!
//! Rules are written as `mod a m` (the class `n = a (mod m)`), `set {1,2,3}`,
//! `interval [a,b]`, and the combinators `union(..)`, `inter(..)`, `compl(..)`.
//! Complements are taken in the naturals `{1, 2, ...}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::exp_value::NormalForm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("{n} is outside the window [{lo}, {hi}] of an explicit set")]
    OutsideWindow { n: String, lo: u64, hi: u64 },
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("modulus must be at least 1")]
    ZeroModulus,
}

/// A packed membership bitmap over `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WindowSet {
    lo: u64,
    hi: u64,
    words: Vec<u64>,
}

impl WindowSet {
    /// An empty set over `[lo, hi]`. An empty window (`hi < lo`) is allowed.
    pub fn empty(lo: u64, hi: u64) -> Self {
        let len = if hi >= lo { hi - lo + 1 } else { 0 };
        WindowSet { lo, hi, words: vec![0; len.div_ceil(64) as usize] }
    }

    pub fn full(lo: u64, hi: u64) -> Self {
        let mut s = WindowSet::empty(lo, hi);
        s.words.iter_mut().for_each(|w| *w = !0);
        s.trim();
        s
    }

    pub fn from_members(lo: u64, hi: u64, members: impl IntoIterator<Item = u64>) -> Self {
        let mut s = WindowSet::empty(lo, hi);
        for m in members {
            s.insert(m);
        }
        s
    }

    pub fn from_fn(lo: u64, hi: u64, f: impl Fn(u64) -> bool) -> Self {
        WindowSet::from_members(lo, hi, (lo..=hi).filter(|&n| f(n)))
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn window_len(&self) -> u64 {
        if self.hi >= self.lo {
            self.hi - self.lo + 1
        } else {
            0
        }
    }

    fn trim(&mut self) {
        let rem = self.window_len() % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Inserts `n` if it lies in the window; returns whether it did.
    pub fn insert(&mut self, n: u64) -> bool {
        if n < self.lo || n > self.hi {
            return false;
        }
        let k = n - self.lo;
        self.words[(k / 64) as usize] |= 1 << (k % 64);
        true
    }

    /// `None` outside the window.
    pub fn get(&self, n: u64) -> Option<bool> {
        if n < self.lo || n > self.hi {
            return None;
        }
        let k = n - self.lo;
        Some(self.words[(k / 64) as usize] >> (k % 64) & 1 == 1)
    }

    /// Membership, treating the outside of the window as absent.
    #[inline]
    pub fn has(&self, n: u64) -> bool {
        self.get(n).unwrap_or(false)
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let lo = self.lo;
        self.words.iter().enumerate().flat_map(move |(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(lo + i as u64 * 64 + b)
            })
        })
    }

    pub fn first(&self) -> Option<u64> {
        self.iter().next()
    }

    pub fn complement(&self) -> WindowSet {
        let mut s = self.clone();
        s.words.iter_mut().for_each(|w| *w = !*w);
        s.trim();
        s
    }

    fn zip_with(&mut self, other: &WindowSet, f: impl Fn(u64, u64) -> u64) {
        assert_eq!((self.lo, self.hi), (other.lo, other.hi), "window mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a = f(*a, *b);
        }
    }

    pub fn union_with(&mut self, other: &WindowSet) {
        self.zip_with(other, |a, b| a | b);
    }

    pub fn intersect_with(&mut self, other: &WindowSet) {
        self.zip_with(other, |a, b| a & b);
    }

    /// Sets every bit in `[a, b]` (clipped to the window).
    pub fn insert_range(&mut self, a: u64, b: u64) {
        let a = a.max(self.lo);
        let b = b.min(self.hi);
        if a > b {
            return;
        }
        let (s, e) = (a - self.lo, b - self.lo);
        let (ws, we) = ((s / 64) as usize, (e / 64) as usize);
        for w in ws..=we {
            let lo_bit = if w == ws { s % 64 } else { 0 };
            let hi_bit = if w == we { e % 64 } else { 63 };
            let mask = (!0u64 >> (63 - hi_bit)) & (!0u64 << lo_bit);
            self.words[w] |= mask;
        }
    }
}

/// A symbolic membership rule, evaluable on naturals of any size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SetExpr {
    /// `{n : n = residue (mod modulus)}`
    Congruence { residue: u64, modulus: u64 },
    /// Sorted, deduplicated members.
    Finite(Vec<u64>),
    Interval { lo: u64, hi: u64 },
    Union(Vec<SetExpr>),
    Inter(Vec<SetExpr>),
    Compl(Box<SetExpr>),
}

impl SetExpr {
    pub fn congruence(residue: u64, modulus: u64) -> Result<Self, SetError> {
        if modulus == 0 {
            return Err(SetError::ZeroModulus);
        }
        Ok(SetExpr::Congruence { residue: residue % modulus, modulus })
    }

    /// Multiples of `m`.
    pub fn multiples(m: u64) -> Self {
        SetExpr::congruence(0, m).expect("m >= 1")
    }

    pub fn naturals() -> Self {
        SetExpr::Congruence { residue: 0, modulus: 1 }
    }

    pub fn evens() -> Self {
        SetExpr::multiples(2)
    }

    pub fn odds() -> Self {
        SetExpr::Congruence { residue: 1, modulus: 2 }
    }

    pub fn empty() -> Self {
        SetExpr::Finite(Vec::new())
    }

    pub fn finite(members: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = members.into_iter().filter(|&n| n >= 1).collect();
        v.sort_unstable();
        v.dedup();
        SetExpr::Finite(v)
    }

    pub fn interval(lo: u64, hi: u64) -> Self {
        SetExpr::Interval { lo, hi }
    }

    pub fn inter(parts: Vec<SetExpr>) -> Self {
        SetExpr::Inter(parts)
    }

    pub fn union(parts: Vec<SetExpr>) -> Self {
        SetExpr::Union(parts)
    }

    pub fn compl(e: SetExpr) -> Self {
        SetExpr::Compl(Box::new(e))
    }

    /// Membership of a natural `n >= 1`; zero is never a member.
    pub fn contains(&self, n: u64) -> bool {
        n >= 1 && self.eval_u64(n)
    }

    fn eval_u64(&self, n: u64) -> bool {
        match self {
            SetExpr::Congruence { residue, modulus } => n % modulus == *residue,
            SetExpr::Finite(v) => v.binary_search(&n).is_ok(),
            SetExpr::Interval { lo, hi } => *lo <= n && n <= *hi,
            SetExpr::Union(parts) => parts.iter().any(|p| p.eval_u64(n)),
            SetExpr::Inter(parts) => parts.iter().all(|p| p.eval_u64(n)),
            SetExpr::Compl(e) => !e.eval_u64(n),
        }
    }

    pub fn contains_big(&self, n: &BigUint) -> bool {
        !n.is_zero() && self.eval_big(n)
    }

    fn eval_big(&self, n: &BigUint) -> bool {
        if let Some(small) = n.to_u64() {
            return self.eval_u64(small);
        }
        match self {
            SetExpr::Congruence { residue, modulus } => {
                (n % modulus).to_u64() == Some(*residue)
            }
            SetExpr::Finite(_) | SetExpr::Interval { .. } => false,
            SetExpr::Union(parts) => parts.iter().any(|p| p.eval_big(n)),
            SetExpr::Inter(parts) => parts.iter().all(|p| p.eval_big(n)),
            SetExpr::Compl(e) => !e.eval_big(n),
        }
    }

    /// Membership of `2^exponent * odd`, evaluated without expanding it.
    pub fn contains_normal(&self, v: &NormalForm) -> bool {
        !v.is_zero() && self.eval_normal(v)
    }

    fn eval_normal(&self, v: &NormalForm) -> bool {
        if let Some(small) = v.to_u64() {
            return self.eval_u64(small);
        }
        match self {
            SetExpr::Congruence { residue, modulus } => {
                let m = BigUint::from(*modulus);
                let p = BigUint::from(2u32).modpow(&v.exponent, &m);
                ((p * (&v.odd % &m)) % &m).to_u64() == Some(*residue)
            }
            // a value that does not fit in a u64 exceeds every finite bound
            SetExpr::Finite(_) | SetExpr::Interval { .. } => false,
            SetExpr::Union(parts) => parts.iter().any(|p| p.eval_normal(v)),
            SetExpr::Inter(parts) => parts.iter().all(|p| p.eval_normal(v)),
            SetExpr::Compl(e) => !e.eval_normal(v),
        }
    }

    /// The rule for `{m : 2^n * m in self}`, rewritten structurally.
    pub fn quotient_pow2(&self, n: &BigUint) -> SetExpr {
        match self {
            SetExpr::Congruence { residue, modulus } => {
                let m = *modulus;
                let t = BigUint::from(2u32).modpow(n, &BigUint::from(m)).to_u64().unwrap_or(0);
                solve_linear_congruence(t, *residue, m)
                    .map(|(k, m2)| SetExpr::Congruence { residue: k, modulus: m2 })
                    .unwrap_or_else(SetExpr::empty)
            }
            SetExpr::Finite(v) => match n.to_u32().filter(|&s| s < 64) {
                Some(s) => SetExpr::finite(
                    v.iter().filter(|&&x| x.trailing_zeros() >= s).map(|&x| x >> s),
                ),
                None => SetExpr::empty(),
            },
            SetExpr::Interval { lo, hi } => match n.to_u32().filter(|&s| s < 64) {
                Some(s) => {
                    let step = 1u64 << s;
                    let new_lo = u64::div_ceil(*lo, step).max(1);
                    let new_hi = hi / step;
                    if new_lo > new_hi {
                        SetExpr::empty()
                    } else {
                        SetExpr::Interval { lo: new_lo, hi: new_hi }
                    }
                }
                None => SetExpr::empty(),
            },
            SetExpr::Union(parts) => {
                SetExpr::Union(parts.iter().map(|p| p.quotient_pow2(n)).collect())
            }
            SetExpr::Inter(parts) => {
                SetExpr::Inter(parts.iter().map(|p| p.quotient_pow2(n)).collect())
            }
            SetExpr::Compl(e) => SetExpr::Compl(Box::new(e.quotient_pow2(n))),
        }
    }

    /// Members in `[lo, hi]` as a packed window.
    pub fn materialize(&self, lo: u64, hi: u64) -> WindowSet {
        let lo = lo.max(1);
        let mut out = WindowSet::empty(lo, hi);
        if hi < lo {
            return out;
        }
        match self {
            SetExpr::Congruence { residue, modulus } => {
                let m = *modulus;
                let r = *residue;
                let first = lo + ((r as u128 + m as u128 - (lo % m) as u128) % m as u128) as u64;
                let mut k = first;
                while k <= hi {
                    out.insert(k);
                    match k.checked_add(m) {
                        Some(next) => k = next,
                        None => break,
                    }
                }
            }
            SetExpr::Finite(v) => {
                for &x in v {
                    out.insert(x);
                }
            }
            SetExpr::Interval { lo: a, hi: b } => out.insert_range(*a, *b),
            SetExpr::Union(parts) => {
                for p in parts {
                    out.union_with(&p.materialize(lo, hi));
                }
            }
            SetExpr::Inter(parts) => {
                out = WindowSet::full(lo, hi);
                for p in parts {
                    out.intersect_with(&p.materialize(lo, hi));
                }
            }
            SetExpr::Compl(e) => out = e.materialize(lo, hi).complement(),
        }
        out
    }
}

/// Solutions of `t * k = r (mod m)` as a single class `k0 (mod m')`.
fn solve_linear_congruence(t: u64, r: u64, m: u64) -> Option<(u64, u64)> {
    let t = t % m;
    let g = t.gcd(&m);
    if !r.is_multiple_of(g) {
        return None;
    }
    let m2 = m / g;
    if m2 == 1 {
        return Some((0, 1));
    }
    let t2 = (t / g) as i128;
    let ext = t2.extended_gcd(&(m2 as i128));
    debug_assert_eq!(ext.gcd, 1);
    let inv = ext.x.rem_euclid(m2 as i128) as u128;
    let k = ((r / g) as u128 % m2 as u128) * inv % m2 as u128;
    Some((k as u64, m2))
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, parts: &[SetExpr]| {
            write!(f, "{name}(")?;
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")
        };
        match self {
            SetExpr::Congruence { residue, modulus } => write!(f, "mod {residue} {modulus}"),
            SetExpr::Finite(v) => {
                let items: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "set {{{}}}", items.join(","))
            }
            SetExpr::Interval { lo, hi } => write!(f, "interval [{lo},{hi}]"),
            SetExpr::Union(parts) => list(f, "union", parts),
            SetExpr::Inter(parts) => list(f, "inter", parts),
            SetExpr::Compl(e) => write!(f, "compl({e})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, SetError> {
        Err(SetError::Parse { pos: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), SetError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii")
    }

    fn number(&mut self) -> Result<u64, SetError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match text.parse() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos = start;
                self.err(format!("number `{text}` does not fit in 64 bits"))
            }
        }
    }

    fn expr(&mut self) -> Result<SetExpr, SetError> {
        let start = self.pos;
        let word = self.word();
        match word {
            "mod" => {
                let residue = self.number()?;
                let modulus = self.number()?;
                if modulus == 0 {
                    self.pos = start;
                    return self.err("modulus must be at least 1");
                }
                Ok(SetExpr::Congruence { residue: residue % modulus, modulus })
            }
            "set" => {
                self.expect(b'{')?;
                let mut items = Vec::new();
                if !self.eat(b'}') {
                    loop {
                        items.push(self.number()?);
                        if self.eat(b'}') {
                            break;
                        }
                        self.expect(b',')?;
                    }
                }
                if items.contains(&0) {
                    self.pos = start;
                    return self.err("0 is not a natural number here");
                }
                Ok(SetExpr::finite(items))
            }
            "interval" => {
                self.expect(b'[')?;
                let lo = self.number()?;
                self.expect(b',')?;
                let hi = self.number()?;
                self.expect(b']')?;
                Ok(SetExpr::Interval { lo, hi })
            }
            "union" | "inter" => {
                self.expect(b'(')?;
                let mut parts = vec![self.expr()?];
                while self.eat(b',') {
                    parts.push(self.expr()?);
                }
                self.expect(b')')?;
                Ok(if word == "union" { SetExpr::Union(parts) } else { SetExpr::Inter(parts) })
            }
            "compl" => {
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(SetExpr::Compl(Box::new(e)))
            }
            "" => self.err("expected a set expression"),
            other => {
                self.pos = start;
                self.err(format!("unknown set form `{other}`"))
            }
        }
    }
}

impl FromStr for SetExpr {
    type Err = SetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != s.len() {
            return p.err("trailing input");
        }
        Ok(e)
    }
}

/// A set of naturals: either a packed window or a symbolic rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegerSet {
    Explicit(WindowSet),
    Predicate(SetExpr),
}

impl From<SetExpr> for IntegerSet {
    fn from(e: SetExpr) -> Self {
        IntegerSet::Predicate(e)
    }
}

impl From<WindowSet> for IntegerSet {
    fn from(w: WindowSet) -> Self {
        IntegerSet::Explicit(w)
    }
}

impl IntegerSet {
    pub fn explicit(lo: u64, hi: u64, members: impl IntoIterator<Item = u64>) -> Self {
        IntegerSet::Explicit(WindowSet::from_members(lo, hi, members))
    }

    fn outside(w: &WindowSet, n: impl ToString) -> SetError {
        SetError::OutsideWindow { n: n.to_string(), lo: w.lo(), hi: w.hi() }
    }

    pub fn contains(&self, n: u64) -> Result<bool, SetError> {
        match self {
            IntegerSet::Predicate(e) => Ok(e.contains(n)),
            IntegerSet::Explicit(w) => w.get(n).ok_or_else(|| Self::outside(w, n)),
        }
    }

    pub fn contains_big(&self, n: &BigUint) -> Result<bool, SetError> {
        match self {
            IntegerSet::Predicate(e) => Ok(e.contains_big(n)),
            IntegerSet::Explicit(w) => match n.to_u64() {
                Some(k) => self.contains(k),
                None => Err(Self::outside(w, n)),
            },
        }
    }

    pub fn contains_normal(&self, v: &NormalForm) -> Result<bool, SetError> {
        match self {
            IntegerSet::Predicate(e) => Ok(e.contains_normal(v)),
            IntegerSet::Explicit(w) => match v.to_u64() {
                Some(k) => self.contains(k),
                None => Err(Self::outside(w, v)),
            },
        }
    }

    /// Members in `[lo, hi]`. Explicit sets must cover the whole range.
    pub fn materialize(&self, lo: u64, hi: u64) -> Result<WindowSet, SetError> {
        let lo = lo.max(1);
        match self {
            IntegerSet::Predicate(e) => Ok(e.materialize(lo, hi)),
            IntegerSet::Explicit(w) => {
                if hi < lo {
                    return Ok(WindowSet::empty(lo, hi));
                }
                if lo < w.lo() {
                    return Err(Self::outside(w, lo));
                }
                if hi > w.hi() {
                    return Err(Self::outside(w, hi));
                }
                if (lo, hi) == (w.lo(), w.hi()) {
                    return Ok(w.clone());
                }
                Ok(WindowSet::from_members(lo, hi, w.iter().filter(|&n| n >= lo && n <= hi)))
            }
        }
    }

    /// Complement in the naturals, or within the window for explicit sets.
    pub fn complement(&self) -> IntegerSet {
        match self {
            IntegerSet::Predicate(e) => IntegerSet::Predicate(SetExpr::compl(e.clone())),
            IntegerSet::Explicit(w) => IntegerSet::Explicit(w.complement()),
        }
    }

    pub fn as_expr(&self) -> Option<&SetExpr> {
        match self {
            IntegerSet::Predicate(e) => Some(e),
            IntegerSet::Explicit(_) => None,
        }
    }
}

impl fmt::Display for IntegerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegerSet::Predicate(e) => write!(f, "{e}"),
            IntegerSet::Explicit(w) => {
                write!(f, "window [{},{}] with {} members", w.lo(), w.hi(), w.count())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display() {
        let cases = [
            ("mod 0 3", "mod 0 3"),
            ("mod 4 3", "mod 1 3"),
            ("set {3, 1,2,2}", "set {1,2,3}"),
            ("set {}", "set {}"),
            ("interval [2, 9]", "interval [2,9]"),
            ("union(mod 0 2, set {1})", "union(mod 0 2, set {1})"),
            ("inter( compl(mod 0 3) ,interval[1,10])", "inter(compl(mod 0 3), interval [1,10])"),
        ];
        for (src, shown) in cases {
            let e: SetExpr = src.parse().unwrap();
            assert_eq!(e.to_string(), shown);
            assert_eq!(shown.parse::<SetExpr>().unwrap(), e);
        }
        for bad in ["", "mod 1", "mod 1 0", "set {1,", "union()", "interval [1 2]", "foo 1", "mod 0 2 x", "set {0}"] {
            assert!(bad.parse::<SetExpr>().is_err(), "{bad}");
        }
    }

    #[test]
    fn quotient_examples() {
        let q = SetExpr::multiples(3).quotient_pow2(&2u32.into());
        assert_eq!(q, SetExpr::multiples(3));
        let q = SetExpr::evens().quotient_pow2(&1u32.into());
        assert_eq!(q, SetExpr::naturals());
        let q = SetExpr::finite([8]).quotient_pow2(&2u32.into());
        assert_eq!(q, SetExpr::finite([2]));
        let q = SetExpr::odds().quotient_pow2(&1u32.into());
        assert!((1..100).all(|n| !q.contains(n)));
        let q = SetExpr::multiples(12).quotient_pow2(&1u32.into());
        assert_eq!(q, SetExpr::multiples(6));
        let q = SetExpr::interval(5, 40).quotient_pow2(&3u32.into());
        assert_eq!(q, SetExpr::interval(1, 5));
        let big = BigUint::from(1u32) << 200u32;
        assert_eq!(SetExpr::multiples(5).quotient_pow2(&big), SetExpr::multiples(5));
        assert_eq!(SetExpr::interval(1, 1000).quotient_pow2(&big), SetExpr::empty());
    }

    #[test]
    fn window_set_basics() {
        let mut w = WindowSet::empty(3, 200);
        w.insert_range(10, 140);
        assert_eq!(w.count(), 131);
        assert_eq!(w.first(), Some(10));
        assert_eq!(w.get(2), None);
        assert_eq!(w.complement().count(), 198 - 131);
        let c = SetExpr::multiples(7).materialize(1, 100);
        assert_eq!(c.iter().collect::<Vec<_>>(), (1..=14).map(|k| 7 * k).collect::<Vec<_>>());
    }

    #[test]
    fn explicit_sets_reject_outside_queries() {
        let s = IntegerSet::explicit(1, 10, [2, 4]);
        assert_eq!(s.contains(4), Ok(true));
        assert_eq!(s.contains(5), Ok(false));
        assert!(matches!(s.contains(11), Err(SetError::OutsideWindow { .. })));
        assert!(s.materialize(1, 20).is_err());
    }

    fn arb_expr() -> impl Strategy<Value = SetExpr> {
        let leaf = prop_oneof![
            (0u64..12, 1u64..12).prop_map(|(r, m)| SetExpr::Congruence { residue: r % m, modulus: m }),
            proptest::collection::vec(1u64..300, 0..6).prop_map(SetExpr::finite),
            (1u64..200, 0u64..200).prop_map(|(a, l)| SetExpr::interval(a, a + l)),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 1..3).prop_map(SetExpr::Union),
                proptest::collection::vec(inner.clone(), 1..3).prop_map(SetExpr::Inter),
                inner.prop_map(SetExpr::compl),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(e in arb_expr()) {
            let back: SetExpr = e.to_string().parse().unwrap();
            prop_assert_eq!(back, e);
        }

        #[test]
        fn materialize_matches_pointwise(e in arb_expr()) {
            let w = e.materialize(1, 300);
            for n in 1..=300 {
                prop_assert_eq!(w.has(n), e.contains(n));
            }
        }

        #[test]
        fn quotient_agrees_with_direct_evaluation(e in arb_expr(), n in 0u32..80, m in 1u64..400) {
            let q = e.quotient_pow2(&n.into());
            let nf = NormalForm::from_biguint(&(BigUint::from(m) << n));
            prop_assert_eq!(q.contains(m), e.contains_normal(&nf));
            prop_assert_eq!(q.contains(m), e.contains_big(&(BigUint::from(m) << n)));
        }
    }
}
