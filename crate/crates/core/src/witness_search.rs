//! Searches for pairs `(b, c)` with `b, c, b + l*c` in a set, for one `l`,
//! for every `l <= L`, and simultaneously across several sets.

use thiserror::Error;

use crate::search::SearchBudget;
use crate::set::{IntegerSet, SetError, WindowSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessSearchError {
    #[error("no witness with values up to {max_value} within {max_nodes} candidates")]
    NoWitnessInBudget { max_value: u64, max_nodes: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Least `(b, c)` in lexicographic order accepted by `accept`, over pairs
/// with `b + max_l*c <= cap`.
fn least_pair(
    cap: u64,
    max_l: u64,
    budget: &SearchBudget,
    mut accept: impl FnMut(u64, u64) -> bool,
) -> Result<(u64, u64), WitnessSearchError> {
    let mut nodes = 0u64;
    let mut b = 1;
    while b < cap {
        let mut c = 1;
        while b + max_l.saturating_mul(c) <= cap {
            nodes += 1;
            if nodes > budget.max_nodes {
                return Err(no_witness(budget));
            }
            if accept(b, c) {
                return Ok((b, c));
            }
            c += 1;
        }
        b += 1;
    }
    Err(no_witness(budget))
}

fn no_witness(budget: &SearchBudget) -> WitnessSearchError {
    WitnessSearchError::NoWitnessInBudget { max_value: budget.max_value, max_nodes: budget.max_nodes }
}

fn window(a: &IntegerSet, budget: &SearchBudget) -> Result<WindowSet, WitnessSearchError> {
    if budget.max_value < 1 {
        return Err(WitnessSearchError::InvalidArgument("max_value must be positive".into()));
    }
    Ok(a.materialize(1, budget.max_value)?)
}

/// Least `(b, c)` with `b, c, b + ell*c ∈ A`.
pub fn star_witness(a: &IntegerSet, ell: u64, budget: &SearchBudget) -> Result<(u64, u64), WitnessSearchError> {
    if ell == 0 {
        return Err(WitnessSearchError::InvalidArgument("ell must be at least 1".into()));
    }
    let bits = window(a, budget)?;
    star_in(&bits, ell, budget)
}

pub(crate) fn star_in(bits: &WindowSet, ell: u64, budget: &SearchBudget) -> Result<(u64, u64), WitnessSearchError> {
    let cap = bits.hi();
    least_pair(cap, ell, budget, |b, c| bits.has(b) && bits.has(c) && bits.has(b + ell * c))
}

/// Least `(b, c)` with `b, c ∈ A` and `b + l*c ∈ A` for every `l = 1..=big_l`.
pub fn dagger_witness(a: &IntegerSet, big_l: u64, budget: &SearchBudget) -> Result<(u64, u64), WitnessSearchError> {
    if big_l == 0 {
        return Err(WitnessSearchError::InvalidArgument("L must be at least 1".into()));
    }
    let bits = window(a, budget)?;
    dagger_in(&bits, big_l, budget)
}

pub(crate) fn dagger_in(bits: &WindowSet, big_l: u64, budget: &SearchBudget) -> Result<(u64, u64), WitnessSearchError> {
    least_pair(bits.hi(), big_l, budget, |b, c| {
        bits.has(b) && bits.has(c) && (1..=big_l).all(|l| bits.has(b + l * c))
    })
}

/// `(b, c)` such that for each `(A_j, l_j)` the triple `b, c, b + l_j*c` lies
/// entirely inside or entirely outside `A_j`. Found as a Brauer pattern
/// `b, c, b + c, ..., b + L*c` (with `L = max l_j`) inside one atom of the
/// partition generated by the `A_j`.
pub fn gamma_witness(sets: &[(IntegerSet, u64)], budget: &SearchBudget) -> Result<(u64, u64), WitnessSearchError> {
    if sets.is_empty() {
        return Err(WitnessSearchError::InvalidArgument("need at least one set".into()));
    }
    if sets.len() > 64 {
        return Err(WitnessSearchError::InvalidArgument("at most 64 sets".into()));
    }
    if sets.iter().any(|(_, l)| *l == 0) {
        return Err(WitnessSearchError::InvalidArgument("every ell must be at least 1".into()));
    }
    let big_l = sets.iter().map(|(_, l)| *l).max().expect("nonempty");
    let materialized: Vec<WindowSet> = sets.iter().map(|(a, _)| window(a, budget)).collect::<Result<_, _>>()?;
    let cap = budget.max_value;
    let atom: Vec<u64> = (0..=cap)
        .map(|n| {
            if n == 0 {
                return u64::MAX;
            }
            materialized.iter().enumerate().fold(0u64, |acc, (j, s)| acc | (u64::from(s.has(n)) << j))
        })
        .collect();
    let (b, c) = least_pair(cap, big_l, budget, |b, c| {
        let t = atom[b as usize];
        atom[c as usize] == t && (1..=big_l).all(|l| atom[(b + l * c) as usize] == t)
    })?;
    for ((_, l), s) in sets.iter().zip(&materialized) {
        let inside = [b, c, b + l * c].map(|v| s.has(v));
        debug_assert!(inside.iter().all(|&x| x == inside[0]));
    }
    Ok((b, c))
}

/// Does `(b, c)` satisfy the defining condition of `gamma_witness` for `(A, ell)`?
pub fn in_gamma(a: &IntegerSet, ell: u64, b: u64, c: u64) -> Result<bool, SetError> {
    let v = [a.contains(b)?, a.contains(c)?, a.contains(b + ell * c)?];
    Ok(v.iter().all(|&x| x == v[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::SetExpr;

    fn pred(e: SetExpr) -> IntegerSet {
        IntegerSet::Predicate(e)
    }

    fn budget() -> SearchBudget {
        SearchBudget::default().with_max_value(1 << 12)
    }

    #[test]
    fn star_examples() {
        assert_eq!(star_witness(&pred(SetExpr::naturals()), 7, &budget()), Ok((1, 1)));
        assert_eq!(star_witness(&pred(SetExpr::evens()), 3, &budget()), Ok((2, 2)));
        assert!(matches!(
            star_witness(&pred(SetExpr::finite([1])), 1, &budget()),
            Err(WitnessSearchError::NoWitnessInBudget { .. })
        ));
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(dagger_witness(&pred(SetExpr::naturals()), 5, &budget()), Ok((1, 1)));
        assert_eq!(dagger_witness(&pred(SetExpr::multiples(4)), 3, &budget()), Ok((4, 4)));
        assert!(matches!(
            dagger_witness(&pred(SetExpr::odds()), 2, &budget()),
            Err(WitnessSearchError::NoWitnessInBudget { .. })
        ));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_witness(&[(pred(SetExpr::evens()), 1)], &budget()), Ok((2, 2)));
        assert_eq!(gamma_witness(&[(pred(SetExpr::odds()), 1)], &budget()), Ok((2, 2)));
        let sets = [(pred(SetExpr::evens()), 1), (pred(SetExpr::multiples(3)), 2)];
        let (b, c) = gamma_witness(&sets, &budget()).unwrap();
        assert_eq!((b, c), (6, 6));
        for (a, l) in &sets {
            assert!(in_gamma(a, *l, b, c).unwrap());
        }
    }

    #[test]
    fn explicit_set_outside_window_is_an_error() {
        let a = IntegerSet::explicit(1, 10, [2, 4]);
        assert!(matches!(star_witness(&a, 1, &budget()), Err(WitnessSearchError::Set(_))));
    }
}
