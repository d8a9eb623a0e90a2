//! Finite-window versions of the density and difference-set constructions:
//! density profiles, thick intervals, difference sets, greedy Δ-witnesses,
//! the shifted-set pigeonhole, greedy Ramsey extraction for pair colorings,
//! partition regularity of Δ-sets and rich-color selection.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_rational::Ratio;
use thiserror::Error;

use crate::coloring::Coloring;
use crate::set::{IntegerSet, SetError, SetExpr, WindowSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeltaError {
    #[error("explicit set does not cover the requested window: {0}")]
    WindowExceeded(SetError),
    #[error("set is not thick enough in the window: built {built} of {wanted} elements")]
    NotThickEnough { built: usize, wanted: usize },
    #[error(
        "no common difference in the window (window density {density}; the pigeonhole needs |X| > {bound}, have {size})"
    )]
    NoWitnessInWindow { density: Ratio<u64>, bound: String, size: usize },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no color can be certified in the window")]
    NoRichColor,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pair {{{i},{j}}} has color {color}, but only {r} colors exist")]
    ColorOutOfRange { i: usize, j: usize, color: usize, r: usize },
}

impl From<SetError> for DeltaError {
    fn from(e: SetError) -> Self {
        DeltaError::WindowExceeded(e)
    }
}

/// Exact counts `|A ∩ [1, n]|` and the extreme ratios over a tail range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityProfile {
    pub n_min: u64,
    pub n_max: u64,
    /// `counts[n - 1] = |A ∩ [1, n]|`
    pub counts: Vec<u64>,
    pub min_ratio: Ratio<u64>,
    pub max_ratio: Ratio<u64>,
}

impl DensityProfile {
    pub fn count(&self, n: u64) -> u64 {
        if n == 0 {
            0
        } else {
            self.counts[(n - 1) as usize]
        }
    }

    pub fn ratio(&self, n: u64) -> Ratio<u64> {
        Ratio::new(self.count(n), n)
    }
}

pub fn density_profile(a: &IntegerSet, n_min: u64, n_max: u64) -> Result<DensityProfile, DeltaError> {
    if n_min < 1 || n_max < n_min {
        return Err(DeltaError::InvalidArgument(format!("need 1 <= n_min <= n_max, got [{n_min}, {n_max}]")));
    }
    let bits = a.materialize(1, n_max)?;
    let mut counts = Vec::with_capacity(n_max as usize);
    let mut running = 0;
    for n in 1..=n_max {
        running += bits.has(n) as u64;
        counts.push(running);
    }
    let ratio = |n: u64| Ratio::new(counts[(n - 1) as usize], n);
    let mut min_ratio = ratio(n_min);
    let mut max_ratio = min_ratio;
    for n in n_min..=n_max {
        let r = ratio(n);
        min_ratio = min_ratio.min(r);
        max_ratio = max_ratio.max(r);
    }
    Ok(DensityProfile { n_min, n_max, counts, min_ratio, max_ratio })
}

/// Leftmost `[s, s + k - 1] ⊆ A` inside `window`.
pub fn find_thick_interval(
    a: &IntegerSet,
    k: u64,
    window: RangeInclusive<u64>,
) -> Result<Option<(u64, u64)>, DeltaError> {
    if k == 0 {
        return Err(DeltaError::InvalidArgument("interval length must be at least 1".into()));
    }
    let bits = a.materialize(*window.start(), *window.end())?;
    Ok(leftmost_run(&bits, bits.lo(), k))
}

/// Leftmost run of `k` consecutive members starting at or after `from`.
fn leftmost_run(bits: &WindowSet, from: u64, k: u64) -> Option<(u64, u64)> {
    let mut run_start = None;
    let mut n = from.max(bits.lo());
    while n <= bits.hi() {
        if bits.has(n) {
            let s = *run_start.get_or_insert(n);
            if n - s + 1 == k {
                return Some((s, n));
            }
        } else {
            run_start = None;
        }
        n += 1;
    }
    None
}

/// `Δ(X) = {x' - x : x < x' in X}`.
pub fn difference_set(x: &[u64]) -> IntegerSet {
    IntegerSet::Predicate(SetExpr::finite(differences(x)))
}

fn differences(x: &[u64]) -> BTreeSet<u64> {
    let sorted = sorted_distinct(x);
    let mut out = BTreeSet::new();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            out.insert(b - a);
        }
    }
    out
}

fn sorted_distinct(x: &[u64]) -> Vec<u64> {
    let mut v = x.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Checks `Δ(X) ⊆ A` pair by pair.
pub fn delta_contained(x: &[u64], a: &IntegerSet) -> Result<bool, DeltaError> {
    for d in differences(x) {
        if !a.contains(d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds `m_1 < ... < m_m` with `Δ(X) ⊆ A`: `m_1` is the least element of
/// `A`, and each next element is the right end of the leftmost interval of
/// `A` past the previous element whose length exceeds the running sum.
pub fn thick_to_delta(a: &IntegerSet, m: usize, window: RangeInclusive<u64>) -> Result<Vec<u64>, DeltaError> {
    if m == 0 {
        return Err(DeltaError::InvalidArgument("need at least one element".into()));
    }
    let bits = a.materialize(*window.start(), *window.end())?;
    let Some(first) = bits.first() else {
        return Err(DeltaError::NotThickEnough { built: 0, wanted: m });
    };
    let mut xs = vec![first];
    let mut sum = first;
    while xs.len() < m {
        let last = *xs.last().expect("nonempty");
        let Some(len) = sum.checked_add(1) else { break };
        match leftmost_run(&bits, last + 1, len) {
            Some((_, end)) => {
                xs.push(end);
                sum = match sum.checked_add(end) {
                    Some(s) => s,
                    None => break,
                };
            }
            None => break,
        }
    }
    if xs.len() < m {
        return Err(DeltaError::NotThickEnough { built: xs.len(), wanted: m });
    }
    if !delta_contained(&xs, a)? {
        return Err(DeltaError::PreconditionFailed(format!("greedy output {xs:?} has Δ(X) ⊄ A")));
    }
    Ok(xs)
}

/// A common difference `d = a' - a = x' - x` of `A` and `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaWitness {
    pub d: u64,
    pub a: u64,
    pub a_prime: u64,
    pub x: u64,
    pub x_prime: u64,
}

/// Finds `d ∈ Δ(A) ∩ Δ(X)`. Scans `a ∈ A` in increasing order, then pairs
/// `x_i < x_j` of `X` in lexicographic order, looking for `a + x_j - x_i ∈ A`;
/// this is the pigeonhole on the shifted copies `A - x_i` read off in the
/// coordinate `a = n + x_i`.
pub fn delta_intersection_witness(
    a: &IntegerSet,
    x: &[u64],
    window: RangeInclusive<u64>,
) -> Result<DeltaWitness, DeltaError> {
    let xs = sorted_distinct(x);
    if xs.len() < 2 {
        return Err(DeltaError::InvalidArgument("X needs at least two elements".into()));
    }
    let bits = a.materialize(*window.start(), *window.end())?;
    for base in bits.iter() {
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                let d = xs[j] - xs[i];
                let Some(top) = base.checked_add(d) else { continue };
                if bits.has(top) {
                    return Ok(DeltaWitness { d, a: base, a_prime: top, x: xs[i], x_prime: xs[j] });
                }
            }
        }
    }
    let len = bits.window_len().max(1);
    let density = Ratio::new(bits.count(), len);
    let bound = if bits.count() == 0 { "∞".to_string() } else { (density.recip()).to_string() };
    Err(DeltaError::NoWitnessInWindow { density, bound, size: xs.len() })
}

/// A coloring of the pairs `{i < j}` of `[1, n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairColoring {
    n: usize,
    r: usize,
    colors: Vec<u32>,
}

impl PairColoring {
    pub fn from_fn(n: usize, r: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self, DeltaError> {
        if r == 0 {
            return Err(DeltaError::InvalidArgument("need at least one color".into()));
        }
        let mut colors = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 1..=n {
            for j in i + 1..=n {
                let color = f(i, j);
                if color >= r {
                    return Err(DeltaError::ColorOutOfRange { i, j, color, r });
                }
                colors.push(color as u32);
            }
        }
        Ok(PairColoring { n, r, colors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_colors(&self) -> usize {
        self.r
    }

    /// Color of `{i, j}`, `1 <= i, j <= n`, `i != j`.
    pub fn color(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        assert!(1 <= i && j <= self.n && i != j, "pair {{{i},{j}}} out of range");
        // pairs (i, *) come after all pairs with a smaller first element
        let before = (i - 1) * self.n - (i - 1) * i / 2;
        self.colors[before + (j - i - 1)] as usize
    }

    pub fn is_homogeneous(&self, h: &[usize], color: usize) -> bool {
        h.iter().enumerate().all(|(k, &i)| h[k + 1..].iter().all(|&j| self.color(i, j) == color))
    }
}

/// Greedy homogeneous set: repeatedly take the least remaining vertex and
/// keep only the largest class of its neighbours (ties to the smaller color),
/// then keep the picks of the most frequent color plus the final pick.
pub fn ramsey_homogeneous_pairs(pc: &PairColoring) -> Result<(Vec<usize>, usize), DeltaError> {
    if pc.n < 2 {
        return Err(DeltaError::InvalidArgument("need n >= 2".into()));
    }
    let mut candidates: Vec<usize> = (1..=pc.n).collect();
    let mut picks: Vec<(usize, Option<usize>)> = Vec::new();
    while let Some((&v, rest)) = candidates.split_first() {
        if rest.is_empty() {
            picks.push((v, None));
            break;
        }
        let mut classes = vec![Vec::new(); pc.r];
        for &u in rest {
            classes[pc.color(v, u)].push(u);
        }
        let (color, _) = classes
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.len().cmp(&b.len()).then(j.cmp(i)))
            .expect("r >= 1");
        picks.push((v, Some(color)));
        candidates = std::mem::take(&mut classes[color]);
    }
    let mut freq = vec![0usize; pc.r];
    for (_, c) in &picks {
        if let Some(c) = c {
            freq[*c] += 1;
        }
    }
    let best = freq
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
        .map(|(c, _)| c)
        .expect("r >= 1");
    let h: Vec<usize> = picks
        .iter()
        .filter(|(_, c)| c.is_none() || *c == Some(best))
        .map(|(v, _)| *v)
        .collect();
    debug_assert!(pc.is_homogeneous(&h, best));
    Ok((h, best))
}

/// Size guaranteed by the greedy extraction for two colors.
pub fn ramsey_two_color_bound(n: usize) -> usize {
    let log = if n == 0 { 0 } else { (usize::BITS - 1 - n.leading_zeros()) as usize };
    (log / 2).max(2)
}

/// Given a coloring of `Δ(X)`, finds a color `i` and `Y ⊆ X` with
/// `Δ(Y) ⊆ C_i`, via the pair coloring `{n < m} ↦ color(x_m - x_n)`.
pub fn delta_partition_regular(
    x: &[u64],
    r: usize,
    color: impl Fn(u64) -> usize,
) -> Result<(usize, Vec<u64>), DeltaError> {
    let xs = sorted_distinct(x);
    if xs.len() < 2 {
        return Err(DeltaError::InvalidArgument("X needs at least two elements".into()));
    }
    let pc = PairColoring::from_fn(xs.len(), r, |i, j| color(xs[j - 1] - xs[i - 1]))?;
    let (h, c) = ramsey_homogeneous_pairs(&pc)?;
    let y: Vec<u64> = h.iter().map(|&i| xs[i - 1]).collect();
    Ok((c, y))
}

/// `b, c` with `{b, c, b + ell*c} ⊆ A`, given `Δ(X) ⊆ A`: take a common
/// difference of `A` and `ell*X`, so `a' - a = ell*(x' - x)`.
pub fn gen_schur_from_delta(
    a: &IntegerSet,
    x: &[u64],
    ell: u64,
    window: RangeInclusive<u64>,
) -> Result<(u64, u64), DeltaError> {
    if ell == 0 {
        return Err(DeltaError::InvalidArgument("ell must be at least 1".into()));
    }
    if !delta_contained(x, a)? {
        return Err(DeltaError::PreconditionFailed("Δ(X) is not contained in A".into()));
    }
    let scaled: Vec<u64> = x
        .iter()
        .map(|&v| v.checked_mul(ell).ok_or_else(|| DeltaError::InvalidArgument("ell*X overflows".into())))
        .collect::<Result<_, _>>()?;
    let w = delta_intersection_witness(a, &scaled, window)?;
    let b = w.a;
    let c = (w.x_prime - w.x) / ell;
    let top = w.a_prime;
    debug_assert_eq!(b + ell * c, top);
    for v in [b, c, top] {
        if !a.contains(v)? {
            return Err(DeltaError::PreconditionFailed(format!("{v} is not in A")));
        }
    }
    Ok((b, c))
}

/// Picks a color that is dense in the window and contains `Δ(X)` for some
/// `|X| = m`: the union of the dense colors yields a Δ-witness by greedy
/// thickness, which is then split by partition regularity. The search grows
/// the greedy witness until the homogeneous part has `m` elements.
pub fn select_rich_color(
    c: &Coloring,
    m: usize,
    density_floor: Ratio<u64>,
) -> Result<(usize, Vec<u64>), DeltaError> {
    if m < 2 {
        return Err(DeltaError::InvalidArgument("m must be at least 2".into()));
    }
    let (lo, hi) = (c.lo(), c.hi());
    if lo != 1 {
        return Err(DeltaError::InvalidArgument("coloring window must start at 1".into()));
    }
    let len = c.len() as u64;
    let dense: Vec<usize> = (0..c.num_colors())
        .filter(|&i| Ratio::new(c.class_size(i) as u64, len) >= density_floor)
        .collect();
    if dense.is_empty() {
        return Err(DeltaError::NoRichColor);
    }
    let union = WindowSet::from_fn(lo, hi, |n| c.color(n).is_some_and(|k| dense.contains(&k)));
    let union = IntegerSet::Explicit(union);
    let mut size = m;
    loop {
        let x = match thick_to_delta(&union, size, lo..=hi) {
            Ok(x) => x,
            Err(DeltaError::NotThickEnough { .. }) => return Err(DeltaError::NoRichColor),
            Err(e) => return Err(e),
        };
        // differences stay below hi, so they are colored
        let (color, y) = delta_partition_regular(&x, c.num_colors(), |d| c.color(d).expect("in window"))?;
        if y.len() >= m {
            let y: Vec<u64> = y.into_iter().take(m).collect();
            debug_assert!(differences(&y).iter().all(|&d| c.color(d) == Some(color)));
            return Ok((color, y));
        }
        size += 1;
    }
}
