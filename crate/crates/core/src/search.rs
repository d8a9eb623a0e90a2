//! Monochromatic-witness search, backtracking search for pattern-avoiding
//! colorings, and finite pattern-Ramsey numbers.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::Duration;

use rayon::prelude::*;

use crate::coloring::Coloring;
use crate::pattern::{PatternSpec, Witness};

/// Limits shared by every search in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Color assignments (avoider search) or candidate checks (witness search).
    pub max_nodes: u64,
    /// Cap on pattern member values for unbounded witness searches.
    pub max_value: u64,
    /// Advisory only; no search is interrupted by wall-clock time.
    pub time_hint: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 200_000_000, max_value: 1 << 20, time_hint: None }
    }
}

impl SearchBudget {
    pub fn with_nodes(mut self, max_nodes: u64) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    pub fn with_max_value(mut self, max_value: u64) -> Self {
        self.max_value = max_value;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    /// The whole space was enumerated without a budget cut.
    Exhausted,
    BudgetExceeded,
}

impl<T> SearchOutcome<T> {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Force color 0 on 1 and introduce colors in order.
    pub symmetry_breaking: bool,
    /// Worker threads; 1 runs the plain sequential search.
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { symmetry_breaking: true, jobs: 1 }
    }
}

/// The lexicographically least monochromatic instance of `p` in `c`.
pub fn find_monochromatic(c: &Coloring, p: &PatternSpec) -> Option<Witness> {
    let mut hit = None;
    p.for_each_instance(c.lo(), c.hi(), |slots, values| {
        let first = c.color(values[0]).expect("member inside window");
        if values[1..].iter().all(|&v| c.color(v) == Some(first)) {
            hit = Some((slots.to_vec(), first));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    hit.map(|(slots, color)| p.witness(&slots, Some(color)).expect("in-window slots expand"))
}

/// Instances of a pattern on `[1, n]`, grouped by largest member. Each entry
/// stores the remaining distinct members as `[k, m_1, ..., m_k]`.
struct Problem {
    n: usize,
    r: usize,
    offsets: Vec<usize>,
    data: Vec<u32>,
}

impl Problem {
    fn new(n: u64, r: usize, p: &PatternSpec) -> Self {
        assert!(n < u32::MAX as u64, "window too large for the avoider search");
        let mut grouped: Vec<Vec<u32>> = vec![Vec::new(); n as usize + 1];
        let mut members = Vec::new();
        p.for_each_instance(1, n, |_, values| {
            members.clear();
            members.extend(values.iter().map(|&v| v as u32));
            members.sort_unstable();
            members.dedup();
            let top = members.pop().expect("nonempty instance");
            let bucket = &mut grouped[top as usize];
            bucket.push(members.len() as u32);
            bucket.extend_from_slice(&members);
            ControlFlow::Continue(())
        });
        let mut offsets = Vec::with_capacity(grouped.len() + 1);
        let mut data = Vec::new();
        for g in &grouped {
            offsets.push(data.len());
            data.extend_from_slice(g);
        }
        offsets.push(data.len());
        Problem { n: n as usize, r, offsets, data }
    }

    /// Does coloring `pos` with `color` complete a monochromatic instance?
    #[inline]
    fn conflicts(&self, pos: usize, color: u8, colors: &[u8]) -> bool {
        let mut i = self.offsets[pos];
        let end = self.offsets[pos + 1];
        while i < end {
            let k = self.data[i] as usize;
            let others = &self.data[i + 1..i + 1 + k];
            if others.iter().all(|&m| colors[m as usize] == color) {
                return true;
            }
            i += 1 + k;
        }
        false
    }

    fn color_limit(&self, used: usize, symmetry: bool) -> usize {
        if symmetry {
            self.r.min(used + 1)
        } else {
            self.r
        }
    }

    fn coloring(&self, colors: &[u8]) -> Coloring {
        let v = colors[1..=self.n].iter().map(|&c| c as usize).collect();
        Coloring::new(1, self.n as u64, self.r, v).expect("valid by construction")
    }
}

/// Node accounting shared between workers.
struct Meter<'a> {
    local: u64,
    /// Shared total as of the last flush.
    seen: u64,
    shared: &'a AtomicU64,
    limit: u64,
    cancel: &'a dyn Fn() -> bool,
}

const FLUSH: u64 = 1024;

impl<'a> Meter<'a> {
    fn new(shared: &'a AtomicU64, limit: u64, cancel: &'a dyn Fn() -> bool) -> Self {
        Meter { local: 0, seen: 0, shared, limit, cancel }
    }

    /// Counts one node; fails once the budget is spent or the work is cancelled.
    #[inline]
    fn tick(&mut self) -> Result<(), Stop> {
        self.local += 1;
        if self.seen + self.local > self.limit {
            return Err(Stop::Budget);
        }
        if self.local == FLUSH {
            self.flush();
            if (self.cancel)() {
                return Err(Stop::Cancelled);
            }
        }
        Ok(())
    }

    fn flush(&mut self) {
        self.seen = self.shared.fetch_add(self.local, Ordering::Relaxed) + self.local;
        self.local = 0;
    }
}

enum Stop {
    Budget,
    Cancelled,
}

enum Dfs {
    Found,
    Exhausted,
    Stopped(Stop),
}

/// Depth-first search over positions `start..=n`; `colors[1..start]` is a
/// consistent prefix using `used` colors.
fn dfs(problem: &Problem, colors: &mut [u8], start: usize, used: usize, symmetry: bool, meter: &mut Meter) -> Dfs {
    let n = problem.n;
    if start > n {
        return Dfs::Found;
    }
    let mut next = vec![0u8; n + 2];
    let mut used_at = vec![0usize; n + 2];
    used_at[start - 1] = used;
    let mut pos = start;
    loop {
        let limit = problem.color_limit(used_at[pos - 1], symmetry);
        let mut placed = false;
        while (next[pos] as usize) < limit {
            let c = next[pos];
            next[pos] += 1;
            if let Err(stop) = meter.tick() {
                return Dfs::Stopped(stop);
            }
            if !problem.conflicts(pos, c, colors) {
                colors[pos] = c;
                used_at[pos] = used_at[pos - 1].max(c as usize + 1);
                placed = true;
                break;
            }
        }
        if placed {
            if pos == n {
                return Dfs::Found;
            }
            pos += 1;
            next[pos] = 0;
        } else {
            pos -= 1;
            if pos < start {
                return Dfs::Exhausted;
            }
        }
    }
}

/// Statistics of one avoider search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: SearchOutcome<Coloring>,
    pub nodes: u64,
}

/// Looks for an `r`-coloring of `[1, n]` with no monochromatic instance of `p`.
pub fn search_avoiding(n: u64, r: usize, p: &PatternSpec, budget: &SearchBudget) -> SearchOutcome<Coloring> {
    search_avoiding_with(n, r, p, budget, &SearchOptions::default()).outcome
}

pub fn search_avoiding_with(
    n: u64,
    r: usize,
    p: &PatternSpec,
    budget: &SearchBudget,
    opts: &SearchOptions,
) -> SearchReport {
    assert!(n >= 1 && r >= 1, "need n, r >= 1");
    assert!(r <= u8::MAX as usize, "at most 255 colors");
    let problem = Problem::new(n, r, p);
    let report = if opts.jobs <= 1 {
        run_sequential(&problem, budget, opts.symmetry_breaking)
    } else {
        run_parallel(&problem, budget, opts)
    };
    if let SearchOutcome::Found(c) = &report.outcome {
        assert!(find_monochromatic(c, p).is_none(), "search produced a non-avoiding coloring");
    }
    report
}

fn run_sequential(problem: &Problem, budget: &SearchBudget, symmetry: bool) -> SearchReport {
    let shared = AtomicU64::new(0);
    let never = || false;
    let mut meter = Meter::new(&shared, budget.max_nodes, &never);
    let mut colors = vec![u8::MAX; problem.n + 1];
    let result = dfs(problem, &mut colors, 1, 0, symmetry, &mut meter);
    meter.flush();
    let outcome = match result {
        Dfs::Found => SearchOutcome::Found(problem.coloring(&colors)),
        Dfs::Exhausted => SearchOutcome::Exhausted,
        Dfs::Stopped(_) => SearchOutcome::BudgetExceeded,
    };
    SearchReport { outcome, nodes: shared.into_inner() }
}

/// All consistent prefixes of length `depth`, in lexicographic order.
fn prefixes(problem: &Problem, depth: usize, symmetry: bool) -> Vec<(Vec<u8>, usize)> {
    let mut level: Vec<(Vec<u8>, usize)> = vec![(vec![u8::MAX], 0)];
    for pos in 1..=depth {
        let mut next = Vec::new();
        for (prefix, used) in &level {
            let mut colors = prefix.clone();
            colors.resize(problem.n + 1, u8::MAX);
            for c in 0..problem.color_limit(*used, symmetry) as u8 {
                if !problem.conflicts(pos, c, &colors) {
                    let mut p = prefix.clone();
                    p.push(c);
                    next.push((p, (*used).max(c as usize + 1)));
                }
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    level
}

fn run_parallel(problem: &Problem, budget: &SearchBudget, opts: &SearchOptions) -> SearchReport {
    let want = opts.jobs * 8;
    let mut depth = 1;
    let mut roots = prefixes(problem, depth, opts.symmetry_breaking);
    while depth < problem.n && roots.len() < want && !roots.is_empty() {
        depth += 1;
        roots = prefixes(problem, depth, opts.symmetry_breaking);
    }
    if roots.is_empty() {
        return SearchReport { outcome: SearchOutcome::Exhausted, nodes: 0 };
    }
    let shared = AtomicU64::new(0);
    let best = AtomicUsize::new(usize::MAX);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().expect("thread pool");
    let results: Vec<(Dfs, Vec<u8>)> = pool.install(|| {
        roots
            .par_iter()
            .enumerate()
            .map(|(i, (prefix, used))| {
                let cancel = || best.load(Ordering::Relaxed) < i;
                if cancel() {
                    return (Dfs::Stopped(Stop::Cancelled), Vec::new());
                }
                let mut meter = Meter::new(&shared, budget.max_nodes, &cancel);
                let mut colors = prefix.clone();
                colors.resize(problem.n + 1, u8::MAX);
                let r = dfs(problem, &mut colors, prefix.len(), *used, opts.symmetry_breaking, &mut meter);
                meter.flush();
                if matches!(r, Dfs::Found) {
                    best.fetch_min(i, Ordering::Relaxed);
                }
                (r, colors)
            })
            .collect()
    });
    let mut budget_hit = false;
    for (r, colors) in &results {
        match r {
            Dfs::Found => {
                return SearchReport {
                    outcome: SearchOutcome::Found(problem.coloring(colors)),
                    nodes: shared.load(Ordering::Relaxed),
                }
            }
            Dfs::Stopped(Stop::Budget) => budget_hit = true,
            Dfs::Stopped(Stop::Cancelled) | Dfs::Exhausted => {}
        }
    }
    // cancellation only happens behind a Found, so reaching here means none was cancelled
    let outcome = if budget_hit { SearchOutcome::BudgetExceeded } else { SearchOutcome::Exhausted };
    SearchReport { outcome, nodes: shared.load(Ordering::Relaxed) }
}

/// Result of a pattern-Ramsey number computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternNumber {
    /// Every `r`-coloring of `[1, n]` contains the pattern; `avoider` is an
    /// avoiding coloring of `[1, n - 1]` when `n > 1`.
    Exact { n: u64, avoider: Option<Coloring> },
    /// No exhausted window up to `searched_to`.
    Unknown { searched_to: u64, budget_hit: bool },
}

impl PatternNumber {
    pub fn value(&self) -> Option<u64> {
        match self {
            PatternNumber::Exact { n, .. } => Some(*n),
            PatternNumber::Unknown { .. } => None,
        }
    }
}

/// Least `n <= n_max` whose avoider search is exhausted. An avoider found at
/// `n` is first tried as a one-step extension at `n + 1` before searching.
pub fn pattern_number(r: usize, p: &PatternSpec, n_max: u64, budget: &SearchBudget) -> PatternNumber {
    pattern_number_with(r, p, n_max, budget, &SearchOptions::default())
}

pub fn pattern_number_with(
    r: usize,
    p: &PatternSpec,
    n_max: u64,
    budget: &SearchBudget,
    opts: &SearchOptions,
) -> PatternNumber {
    let mut avoider: Option<Coloring> = None;
    for n in 1..=n_max {
        if let Some(prev) = &avoider {
            if let Some(ext) = extend_avoider(prev, p) {
                avoider = Some(ext);
                continue;
            }
        }
        match search_avoiding_with(n, r, p, budget, opts).outcome {
            SearchOutcome::Found(c) => avoider = Some(c),
            SearchOutcome::Exhausted => return PatternNumber::Exact { n, avoider },
            SearchOutcome::BudgetExceeded => return PatternNumber::Unknown { searched_to: n, budget_hit: true },
        }
    }
    PatternNumber::Unknown { searched_to: n_max, budget_hit: false }
}

/// Colors `hi + 1` with the least color that keeps `c` avoiding `p`.
pub fn extend_avoider(c: &Coloring, p: &PatternSpec) -> Option<Coloring> {
    let n = c.hi() + 1;
    let problem = Problem::new(n, c.num_colors(), p);
    let mut colors: Vec<u8> = std::iter::once(u8::MAX).chain(c.colors().map(|k| k as u8)).collect();
    colors.push(u8::MAX);
    let color = (0..c.num_colors() as u8).find(|&k| !problem.conflicts(n as usize, k, &colors))?;
    colors[n as usize] = color;
    Some(problem.coloring(&colors))
}
