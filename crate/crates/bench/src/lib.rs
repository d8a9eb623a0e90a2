//! Fixed workloads shared by the criterion benches.

use expramsey::{
    extract_exp2_triple, pattern_number_with, search_avoiding_with, Coloring, IntegerSet, LargenessOracle,
    PatternNumber, PatternSpec, SearchBudget, SearchOptions, SearchOutcome, SetExpr,
};

/// An avoider search at a fixed size.
#[derive(Clone, Debug)]
pub struct SearchCase {
    pub name: &'static str,
    pub n: u64,
    pub r: usize,
    pub pattern: PatternSpec,
}

pub fn search_cases() -> Vec<SearchCase> {
    vec![
        SearchCase { name: "schur_r3_n13", n: 13, r: 3, pattern: PatternSpec::schur() },
        SearchCase { name: "schur_r3_n14", n: 14, r: 3, pattern: PatternSpec::schur() },
        SearchCase { name: "ap3_r2_n9", n: 9, r: 2, pattern: PatternSpec::ap(3) },
        SearchCase { name: "ap4_r2_n34", n: 34, r: 2, pattern: PatternSpec::ap(4) },
        SearchCase { name: "exp2_r2_n16", n: 16, r: 2, pattern: PatternSpec::exp_two_triple() },
    ]
}

pub fn run_search(case: &SearchCase, jobs: usize) -> SearchOutcome<Coloring> {
    let opts = SearchOptions { symmetry_breaking: true, jobs };
    search_avoiding_with(case.n, case.r, &case.pattern, &SearchBudget::default(), &opts).outcome
}

pub fn run_pattern_number(r: usize, p: &PatternSpec, n_max: u64) -> PatternNumber {
    pattern_number_with(r, p, n_max, &SearchBudget::default(), &SearchOptions::default())
}

/// The triple extraction on the multiples of `m` with `W = 10^4`, `τ = W/(2m)`.
pub fn run_triple(m: u64) -> bool {
    let w = 10_000;
    let oracle = LargenessOracle::new(w, w / (2 * m)).expect("positive threshold");
    let a = IntegerSet::Predicate(SetExpr::multiples(m));
    extract_exp2_triple(&a, &oracle, &SearchBudget::default().with_max_value(1024)).is_ok()
}
