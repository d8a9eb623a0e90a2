mod common;

use expramsey::{
    decode_model, enumerate_instances, export_dimacs, find_monochromatic, parse_model, pattern_number, search_avoiding,
    search_avoiding_with, Coloring, PatternNumber, PatternSpec, SearchBudget, SearchOptions, SearchOutcome,
};

use common::{brute_force_avoider, has_mono, naive_instances};

fn budget() -> SearchBudget {
    SearchBudget::default()
}

fn status(o: &SearchOutcome<Coloring>) -> &'static str {
    match o {
        SearchOutcome::Found(_) => "found",
        SearchOutcome::Exhausted => "exhausted",
        SearchOutcome::BudgetExceeded => "budget",
    }
}

fn sat_model(cnf: &str) -> Option<Vec<i64>> {
    let mut solver = varisat::Solver::new();
    solver.add_dimacs_cnf(cnf.as_bytes()).unwrap();
    if !solver.solve().unwrap() {
        return None;
    }
    let lits: Vec<String> = solver.model().unwrap().iter().map(|l| l.to_dimacs().to_string()).collect();
    Some(parse_model(&format!("s SATISFIABLE\nv {} 0\n", lits.join(" "))).unwrap())
}

#[test]
fn symmetry_breaking_does_not_change_status() {
    for p in [PatternSpec::schur(), PatternSpec::ap(3)] {
        for r in 1..=3 {
            for n in 1..=12 {
                let on = search_avoiding_with(n, r, &p, &budget(), &SearchOptions { symmetry_breaking: true, jobs: 1 });
                let off =
                    search_avoiding_with(n, r, &p, &budget(), &SearchOptions { symmetry_breaking: false, jobs: 1 });
                assert_eq!(status(&on.outcome), status(&off.outcome), "{p} r={r} N={n}");
                assert!(on.nodes <= off.nodes, "{p} r={r} N={n}");
            }
        }
    }
}

#[test]
fn parallel_matches_sequential() {
    for p in [PatternSpec::schur(), PatternSpec::ap(3), PatternSpec::brauer(1), PatternSpec::exp_two_triple()] {
        for n in [4, 8, 9, 13, 14, 15, 16] {
            let seq = search_avoiding_with(n, 2, &p, &budget(), &SearchOptions { symmetry_breaking: true, jobs: 1 });
            for jobs in [2, 4] {
                let par =
                    search_avoiding_with(n, 2, &p, &budget(), &SearchOptions { symmetry_breaking: true, jobs });
                assert_eq!(par.outcome, seq.outcome, "{p} N={n} jobs={jobs}");
            }
        }
    }
}

#[test]
fn exhausted_is_monotone() {
    for p in [PatternSpec::schur(), PatternSpec::ap(3), PatternSpec::brauer(1), PatternSpec::gen_schur(2)] {
        for r in 1..=2 {
            for n in 1..=14 {
                if search_avoiding(n, r, &p, &budget()) == SearchOutcome::Exhausted {
                    assert_eq!(search_avoiding(n + 1, r, &p, &budget()), SearchOutcome::Exhausted, "{p} r={r} N={n}");
                }
            }
        }
    }
}

#[test]
fn search_agrees_with_brute_force() {
    let patterns = [
        PatternSpec::schur(),
        PatternSpec::schur().with_distinct(true),
        PatternSpec::ap(3),
        PatternSpec::brauer(1),
        PatternSpec::gen_schur(2),
        PatternSpec::exp_two_triple(),
        PatternSpec::exp_triple().with_min_element(1),
    ];
    for p in &patterns {
        for n in 1..=11 {
            let brute = brute_force_avoider(n, 2, p);
            let found = search_avoiding(n, 2, p, &budget());
            assert_eq!(brute.is_some(), found.is_found(), "{p} N={n}");
            if let SearchOutcome::Found(c) = found {
                let colors: Vec<usize> = c.colors().collect();
                assert!(!has_mono(&colors, &naive_instances(p, n)), "{p} N={n}");
            }
        }
    }
}

#[test]
fn exhausted_is_unsat_and_found_is_sat() {
    for p in [PatternSpec::schur(), PatternSpec::ap(3), PatternSpec::brauer(1), PatternSpec::gen_schur(2)] {
        for r in 1..=2 {
            for n in 1..=18 {
                let ours = search_avoiding(n, r, &p, &budget());
                let model = sat_model(&export_dimacs(n, r, &p).to_dimacs());
                assert_eq!(ours.is_found(), model.is_some(), "{p} r={r} N={n}");
                if let Some(lits) = model {
                    let c = decode_model(n, r, &lits).unwrap();
                    assert!(find_monochromatic(&c, &p).is_none(), "{p} r={r} N={n}");
                }
            }
        }
    }
}

#[test]
fn schur_three_colors_matches_solver() {
    let p = PatternSpec::schur();
    assert_eq!(pattern_number(3, &p, 20, &budget()).value(), Some(14));
    assert!(sat_model(&export_dimacs(14, 3, &p).to_dimacs()).is_none());
    let lits = sat_model(&export_dimacs(13, 3, &p).to_dimacs()).unwrap();
    assert!(find_monochromatic(&decode_model(13, 3, &lits).unwrap(), &p).is_none());
}

#[test]
fn pattern_number_reports_budget() {
    let tight = SearchBudget::default().with_nodes(50);
    match pattern_number(2, &PatternSpec::ap(3), 20, &tight) {
        PatternNumber::Unknown { budget_hit: true, .. } => {}
        other => panic!("expected a budget stop, got {other:?}"),
    }
    match pattern_number(2, &PatternSpec::ap(3), 6, &budget()) {
        PatternNumber::Unknown { searched_to: 6, budget_hit: false } => {}
        other => panic!("expected Unknown at 6, got {other:?}"),
    }
}

#[test]
fn every_found_witness_checks() {
    let c = Coloring::from_fn(1, 40, 2, |n| (n.count_ones() % 2) as usize).unwrap();
    let patterns = [
        PatternSpec::schur(),
        PatternSpec::ap(4),
        PatternSpec::brauer(2),
        PatternSpec::gen_schur(3),
        PatternSpec::exp_two_triple(),
        PatternSpec::exp_triple(),
    ];
    for p in &patterns {
        if let Some(w) = find_monochromatic(&c, p) {
            w.check(Some(&c)).unwrap();
        }
    }
}

#[test]
fn enumeration_matches_naive_up_to_64() {
    let patterns = [
        PatternSpec::schur(),
        PatternSpec::ap(3),
        PatternSpec::ap(6).with_distinct(true),
        PatternSpec::brauer(2),
        PatternSpec::gen_schur(4),
        PatternSpec::exp_two_triple(),
        PatternSpec::exp_triple(),
        PatternSpec::exp_triple().with_min_element(1).with_distinct(true),
    ];
    for p in &patterns {
        for n in [41, 50, 63, 64] {
            let got: std::collections::BTreeSet<_> =
                enumerate_instances(p, n).into_iter().map(|i| (i.slots, i.values)).collect();
            assert_eq!(got, naive_instances(p, n), "{p} N={n}");
        }
    }
}
