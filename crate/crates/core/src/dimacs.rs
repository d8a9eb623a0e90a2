//! CNF encoding of the avoider problem and decoding of external models.

use std::fmt::{self, Write as _};
use std::ops::ControlFlow;

use thiserror::Error;

use crate::coloring::Coloring;
use crate::pattern::PatternSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("model leaves {n} without a color")]
    Uncolored { n: u64 },
    #[error("model gives {n} more than one color")]
    MultiColored { n: u64 },
}

/// A formula in conjunctive normal form over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Cnf {
    pub fn to_dimacs(&self) -> String {
        self.to_string()
    }

    /// Does `assignment[v - 1]` satisfy every clause?
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|cl| {
            cl.iter().any(|&lit| {
                let v = lit.unsigned_abs() as usize;
                assignment.get(v - 1).copied().unwrap_or(false) == (lit > 0)
            })
        })
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        let mut line = String::new();
        for cl in &self.clauses {
            line.clear();
            for lit in cl {
                write!(line, "{lit} ")?;
            }
            line.push('0');
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Variable meaning "`n` has color `i`".
pub fn var(n: u64, i: usize, r: usize) -> i64 {
    ((n - 1) * r as u64 + i as u64 + 1) as i64
}

/// Clauses: at least one color per `n`, pairwise at most one, then for every
/// instance and color one clause forbidding the instance in that color.
pub fn export_dimacs(n: u64, r: usize, p: &PatternSpec) -> Cnf {
    assert!(n >= 1 && r >= 1, "need n, r >= 1");
    let mut clauses = Vec::new();
    for m in 1..=n {
        clauses.push((0..r).map(|i| var(m, i, r)).collect());
    }
    for m in 1..=n {
        for i in 0..r {
            for j in i + 1..r {
                clauses.push(vec![-var(m, i, r), -var(m, j, r)]);
            }
        }
    }
    let mut members = Vec::new();
    p.for_each_instance(1, n, |_, values| {
        members.clear();
        members.extend_from_slice(values);
        members.sort_unstable();
        members.dedup();
        for i in 0..r {
            clauses.push(members.iter().map(|&m| -var(m, i, r)).collect());
        }
        ControlFlow::Continue(())
    });
    Cnf { num_vars: n as usize * r, clauses }
}

/// Signed literals from `v` lines; other lines (`s`, `c`) are skipped.
pub fn parse_model(text: &str) -> Result<Vec<i64>, DimacsError> {
    let mut lits = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("v") {
            continue;
        }
        for t in tokens {
            let lit: i64 = t.parse().map_err(|_| DimacsError::Parse {
                line: idx + 1,
                message: format!("bad literal `{t}`"),
            })?;
            if lit != 0 {
                lits.push(lit);
            }
        }
    }
    Ok(lits)
}

/// Reads the coloring of `[1, n]` off a model.
pub fn decode_model(n: u64, r: usize, lits: &[i64]) -> Result<Coloring, DimacsError> {
    let total = n as usize * r;
    let mut truth = vec![false; total];
    for &lit in lits {
        let v = lit.unsigned_abs() as usize;
        if lit > 0 && v <= total {
            truth[v - 1] = true;
        }
    }
    let mut colors = Vec::with_capacity(n as usize);
    for m in 1..=n {
        let on: Vec<usize> = (0..r).filter(|&i| truth[var(m, i, r) as usize - 1]).collect();
        match on.as_slice() {
            [] => return Err(DimacsError::Uncolored { n: m }),
            [i] => colors.push(*i),
            _ => return Err(DimacsError::MultiColored { n: m }),
        }
    }
    Ok(Coloring::new(1, n, r, colors).expect("colors below r"))
}
