//! Finite colorings of a window `[lo, hi]` of the naturals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::exp_value::ExpValue;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("bad window [{lo}, {hi}]: need 1 <= lo <= hi")]
    BadWindow { lo: u64, hi: u64 },
    #[error("a coloring needs at least one color")]
    NoColors,
    #[error("{n} has no color")]
    IncompleteColoring { n: u64 },
    #[error("{n} has color {color}, but only {r} colors exist")]
    ColorOutOfRange { n: u64, color: usize, r: usize },
    #[error("window [1, {hi}] contains no power of two 2^n with n >= 1")]
    WindowTooSmall { hi: u64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A partition of `[lo, hi]` into `r` color classes `0..r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    lo: u64,
    hi: u64,
    r: usize,
    colors: Vec<u32>,
}

/// Checks a raw assignment and builds the coloring it describes.
pub fn validate_coloring(
    lo: u64,
    hi: u64,
    r: usize,
    assign: &BTreeMap<u64, usize>,
) -> Result<Coloring, ColoringError> {
    check_window(lo, hi, r)?;
    if let Some((&n, &color)) = assign.iter().find(|(_, &c)| c >= r) {
        return Err(ColoringError::ColorOutOfRange { n, color, r });
    }
    let mut colors = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        match assign.get(&n) {
            Some(&c) => colors.push(c as u32),
            None => return Err(ColoringError::IncompleteColoring { n }),
        }
    }
    Ok(Coloring { lo, hi, r, colors })
}

fn check_window(lo: u64, hi: u64, r: usize) -> Result<(), ColoringError> {
    if lo < 1 || hi < lo {
        return Err(ColoringError::BadWindow { lo, hi });
    }
    if r == 0 {
        return Err(ColoringError::NoColors);
    }
    Ok(())
}

impl Coloring {
    /// `colors[k]` is the color of `lo + k`.
    pub fn new(lo: u64, hi: u64, r: usize, colors: Vec<usize>) -> Result<Self, ColoringError> {
        check_window(lo, hi, r)?;
        let len = (hi - lo + 1) as usize;
        if colors.len() < len {
            return Err(ColoringError::IncompleteColoring { n: lo + colors.len() as u64 });
        }
        if colors.len() > len {
            return Err(ColoringError::BadWindow { lo, hi: lo + colors.len() as u64 - 1 });
        }
        let mut packed = Vec::with_capacity(len);
        for (k, &c) in colors.iter().enumerate() {
            if c >= r {
                return Err(ColoringError::ColorOutOfRange { n: lo + k as u64, color: c, r });
            }
            packed.push(c as u32);
        }
        Ok(Coloring { lo, hi, r, colors: packed })
    }

    pub fn from_fn(
        lo: u64,
        hi: u64,
        r: usize,
        f: impl Fn(u64) -> usize,
    ) -> Result<Self, ColoringError> {
        check_window(lo, hi, r)?;
        Coloring::new(lo, hi, r, (lo..=hi).map(f).collect())
    }

    /// Builds a coloring of `[1, n]` from explicit color classes.
    pub fn from_classes(n: u64, classes: &[&[u64]]) -> Result<Self, ColoringError> {
        let mut assign = BTreeMap::new();
        for (i, class) in classes.iter().enumerate() {
            for &m in class.iter() {
                assign.insert(m, i);
            }
        }
        validate_coloring(1, n, classes.len(), &assign)
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn num_colors(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.lo..=self.hi).contains(&n)
    }

    pub fn color(&self, n: u64) -> Option<usize> {
        if self.contains(n) {
            Some(self.colors[(n - self.lo) as usize] as usize)
        } else {
            None
        }
    }

    pub fn color_of_value(&self, v: &ExpValue) -> Option<usize> {
        self.color(v.to_u64()?)
    }

    /// Colors in window order.
    pub fn colors(&self) -> impl Iterator<Item = usize> + '_ {
        self.colors.iter().map(|&c| c as usize)
    }

    pub fn class(&self, color: usize) -> Vec<u64> {
        (self.lo..=self.hi).filter(|&n| self.color(n) == Some(color)).collect()
    }

    pub fn class_size(&self, color: usize) -> usize {
        self.colors.iter().filter(|&&c| c as usize == color).count()
    }

    /// Re-checks the partition invariants.
    pub fn validate(&self) -> Result<(), ColoringError> {
        check_window(self.lo, self.hi, self.r)?;
        if self.colors.len() as u64 != self.hi - self.lo + 1 {
            return Err(ColoringError::IncompleteColoring { n: self.lo + self.colors.len() as u64 });
        }
        for n in self.lo..=self.hi {
            let c = self.color(n).expect("in window");
            if c >= self.r {
                return Err(ColoringError::ColorOutOfRange { n, color: c, r: self.r });
            }
        }
        Ok(())
    }

    /// Renders the two-line text format `N r` / colors of `1..=N`.
    pub fn to_text(&self) -> Result<String, ColoringError> {
        if self.lo != 1 {
            return Err(ColoringError::BadWindow { lo: self.lo, hi: self.hi });
        }
        let colors: Vec<String> = self.colors.iter().map(u32::to_string).collect();
        Ok(format!("{} {}\n{}\n", self.hi, self.r, colors.join(" ")))
    }

    pub fn parse(text: &str) -> Result<Self, ColoringError> {
        let perr = |line: usize, message: String| ColoringError::Parse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        let (hline, header) = lines.next().ok_or_else(|| perr(1, "missing header `N r`".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(perr(hline, format!("expected `N r`, found `{}`", header.trim())));
        }
        let n: u64 = fields[0]
            .parse()
            .map_err(|_| perr(hline, format!("bad window size `{}`", fields[0])))?;
        let r: usize = fields[1]
            .parse()
            .map_err(|_| perr(hline, format!("bad color count `{}`", fields[1])))?;
        if n == 0 {
            return Err(perr(hline, "window size must be at least 1".into()));
        }
        if r == 0 {
            return Err(perr(hline, "color count must be at least 1".into()));
        }

        let (cline, body) =
            lines.next().ok_or_else(|| perr(hline + 1, format!("missing {n} color indices")))?;
        let mut colors = Vec::with_capacity(n as usize);
        for (pos, tok) in body.split_whitespace().enumerate() {
            let c: usize = tok
                .parse()
                .map_err(|_| perr(cline, format!("bad color index `{tok}` at position {}", pos + 1)))?;
            if c >= r {
                return Err(perr(
                    cline,
                    format!("color {c} at position {} is out of range for r={r}", pos + 1),
                ));
            }
            colors.push(c);
        }
        if colors.len() as u64 != n {
            return Err(perr(
                cline,
                format!("expected {n} color indices, found {}", colors.len()),
            ));
        }
        if let Some((line, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(perr(line, format!("unexpected trailing content `{}`", extra.trim())));
        }
        Coloring::new(1, n, r, colors)
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.colors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The coloring `D(n) = c(2^n)` on `[1, floor(log2 N)]`.
pub fn induced_exp_coloring(c: &Coloring) -> Result<Coloring, ColoringError> {
    if c.lo() != 1 {
        return Err(ColoringError::BadWindow { lo: c.lo(), hi: c.hi() });
    }
    if c.hi() < 2 {
        return Err(ColoringError::WindowTooSmall { hi: c.hi() });
    }
    let top = 63 - c.hi().leading_zeros() as u64;
    Coloring::from_fn(1, top, c.num_colors(), |n| c.color(1 << n).expect("2^n <= N"))
}

/// The exponential triple `(2^x, 2^y, 2^(y * 2^x))`, satisfying `b^a = c`.
pub fn lift_exp_witness(x: u64, y: u64) -> (ExpValue, ExpValue, ExpValue) {
    let a = ExpValue::pow2(x);
    let b = ExpValue::pow2(y);
    let c = ExpValue::Pow2(BigUint::from(y) << x);
    (a, b, c)
}
