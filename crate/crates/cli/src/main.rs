use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use expramsey::density::{self, DeltaError};
use expramsey::dimacs::{decode_model, export_dimacs, parse_model};
use expramsey::search::{
    find_monochromatic, pattern_number_with, search_avoiding_with, PatternNumber, SearchBudget, SearchOptions,
    SearchOutcome,
};
use expramsey::surrogate::{
    extract_exp2_triple, extract_exp_sequence, verify_infinite_pattern, LargenessOracle, PatternMode,
};
use expramsey::witness_search::{dagger_witness, gamma_witness, in_gamma, star_witness};
use expramsey::{Coloring, IntegerSet, PatternKind, PatternSpec, SetExpr};

/// Search and certification for monochromatic exponential patterns.
#[derive(Parser, Debug)]
#[command(name = "expramsey", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the first monochromatic instance in a coloring file
    Verify {
        coloring: PathBuf,
        #[command(flatten)]
        pattern: PatternArgs,
        /// Re-check every printed certificate
        #[arg(long)]
        recheck: bool,
    },
    /// Search for an r-coloring of [1, N] avoiding a pattern
    Search {
        n: u64,
        r: usize,
        #[command(flatten)]
        pattern: PatternArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Also write the CNF encoding to this path
        #[arg(long)]
        dimacs: Option<PathBuf>,
        #[arg(long)]
        recheck: bool,
    },
    /// Least N such that every r-coloring of [1, N] contains the pattern
    PatternNumber {
        r: usize,
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(long, default_value_t = 100)]
        n_max: u64,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        recheck: bool,
    },
    /// Run the triple or sequence extraction against a largeness oracle
    Extract {
        #[arg(long)]
        set: String,
        #[arg(long, value_enum, default_value_t = ExtractMode::Triple)]
        mode: ExtractMode,
        #[arg(long, default_value_t = 10_000)]
        oracle_w: u64,
        #[arg(long, default_value_t = 2_500)]
        oracle_tau: u64,
        /// Number of induction steps for the sequence mode
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        recheck: bool,
    },
    /// Exact density ratios of a set over a range of prefixes
    Density {
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 1)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
    },
    /// Difference-set constructions
    Delta {
        #[command(subcommand)]
        op: DeltaOp,
    },
    /// Witness pairs (b, c) for one set or several sets at once
    Gamma {
        /// A set, followed by its `--ell`; may be repeated
        #[arg(long = "set", required = true)]
        sets: Vec<String>,
        #[arg(long = "ell", required = true)]
        ells: Vec<u64>,
        #[arg(long, value_enum, default_value_t = GammaKind::Gamma)]
        kind: GammaKind,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print the CNF whose models are the avoiding colorings
    ExportDimacs {
        n: u64,
        r: usize,
        #[command(flatten)]
        pattern: PatternArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decode a solver model and check that it avoids the pattern
    CheckModel {
        n: u64,
        r: usize,
        model: PathBuf,
        #[command(flatten)]
        pattern: PatternArgs,
    },
}

#[derive(Subcommand, Debug)]
enum DeltaOp {
    /// Positive pairwise differences of a finite set
    Difference {
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
    },
    /// Leftmost run of k consecutive members
    ThickInterval {
        #[arg(long)]
        set: String,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        hi: u64,
    },
    /// Greedy X with Δ(X) inside a thick set
    ThickToDelta {
        #[arg(long)]
        set: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        hi: u64,
    },
    /// A common difference of a set and a finite X
    Intersect {
        #[arg(long)]
        set: String,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
        #[arg(long)]
        hi: u64,
    },
    /// (b, c) with b, c, b + ell*c in the set, given Δ(X) inside it
    GenSchur {
        #[arg(long)]
        set: String,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        hi: u64,
    },
    /// A dense color class that contains some Δ(X) with |X| = m
    RichColor {
        coloring: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "1/4")]
        floor: Ratio<u64>,
    },
}

#[derive(Args, Debug, Clone)]
struct PatternArgs {
    /// schur, ap:K, brauer:L, genschur:L, exp2 or exp
    #[arg(long)]
    pattern: PatternKind,
    #[arg(long)]
    min_element: Option<u64>,
    /// Require all pattern members to be distinct
    #[arg(long)]
    distinct: bool,
}

impl PatternArgs {
    fn spec(&self) -> Result<PatternSpec, String> {
        let mut p = PatternSpec::new(self.pattern).with_distinct(self.distinct);
        if let Some(m) = self.min_element {
            p = p.with_min_element(m);
        }
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }
}

#[derive(Args, Debug, Clone)]
struct BudgetArgs {
    #[arg(long, env = "EXPRAMSEY_MAX_NODES", default_value_t = SearchBudget::default().max_nodes)]
    max_nodes: u64,
    #[arg(long, env = "EXPRAMSEY_MAX_VALUE", default_value_t = 4096)]
    max_value: u64,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget::default().with_nodes(self.max_nodes).with_max_value(self.max_value)
    }
}

#[derive(Args, Debug, Clone)]
struct SearchArgs {
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Disable the color-symmetry reduction
    #[arg(long)]
    no_symmetry: bool,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        SearchOptions { symmetry_breaking: !self.no_symmetry, jobs: self.jobs.max(1) }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExtractMode {
    Triple,
    Sequence,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GammaKind {
    Gamma,
    Star,
    Dagger,
}

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const ERROR: u8 = 2;
const BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(ERROR)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_coloring(path: &Path) -> Result<Coloring, String> {
    Coloring::parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_set(text: &str) -> Result<IntegerSet, String> {
    text.parse::<SetExpr>().map(IntegerSet::Predicate).map_err(|e| format!("set `{text}`: {e}"))
}

fn recheck_failed(what: &str) -> Result<u8, String> {
    Err(format!("recheck failed: {what}"))
}

fn run(cmd: Command) -> Result<u8, String> {
    match cmd {
        Command::Verify { coloring, pattern, recheck } => {
            let p = pattern.spec()?;
            let c = read_coloring(&coloring)?;
            match find_monochromatic(&c, &p) {
                Some(w) => {
                    if recheck && w.check(Some(&c)).is_err() {
                        return recheck_failed("witness does not re-validate");
                    }
                    println!("{w}");
                    Ok(OK)
                }
                None => {
                    println!("NONE");
                    Ok(NEGATIVE)
                }
            }
        }
        Command::Search { n, r, pattern, budget, search, dimacs, recheck } => {
            let p = pattern.spec()?;
            check_nr(n, r)?;
            if let Some(path) = &dimacs {
                fs::write(path, export_dimacs(n, r, &p).to_dimacs()).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let report = search_avoiding_with(n, r, &p, &budget.budget(), &search.options());
            match report.outcome {
                SearchOutcome::Found(c) => {
                    if recheck && find_monochromatic(&c, &p).is_some() {
                        return recheck_failed("coloring contains the pattern");
                    }
                    print!("{}", c.to_text().map_err(|e| e.to_string())?);
                    Ok(OK)
                }
                SearchOutcome::Exhausted => {
                    println!("EXHAUSTED");
                    Ok(NEGATIVE)
                }
                SearchOutcome::BudgetExceeded => {
                    println!("BUDGET");
                    Ok(BUDGET)
                }
            }
        }
        Command::PatternNumber { r, pattern, n_max, budget, search, recheck } => {
            let p = pattern.spec()?;
            check_nr(1, r)?;
            match pattern_number_with(r, &p, n_max, &budget.budget(), &search.options()) {
                PatternNumber::Exact { n, avoider } => {
                    println!("PATTERN_NUMBER {n}");
                    if let Some(c) = avoider {
                        if recheck && find_monochromatic(&c, &p).is_some() {
                            return recheck_failed("avoider contains the pattern");
                        }
                        println!("AVOIDER {}", c.hi());
                        print!("{}", c.to_text().map_err(|e| e.to_string())?);
                    }
                    Ok(OK)
                }
                PatternNumber::Unknown { searched_to, budget_hit } => {
                    println!("UNKNOWN searched_to={searched_to} budget_hit={budget_hit}");
                    Ok(if budget_hit { BUDGET } else { NEGATIVE })
                }
            }
        }
        Command::Extract { set, mode, oracle_w, oracle_tau, n, budget, recheck } => {
            let a = parse_set(&set)?;
            let oracle = LargenessOracle::new(oracle_w, oracle_tau).map_err(|e| e.to_string())?;
            let budget = budget.budget();
            let result = match mode {
                ExtractMode::Triple => extract_exp2_triple(&a, &oracle, &budget).map(|t| {
                    let ok = !recheck
                        || [&t.x, &t.y, &t.z].iter().all(|v| a.contains_normal(&v.normal_form()) == Ok(true))
                            && extract_exp2_triple(&a, &oracle, &budget).as_ref() == Ok(&t);
                    (t.report, ok)
                }),
                ExtractMode::Sequence => extract_exp_sequence(&a, &oracle, n, &budget).map(|s| {
                    let ok = !recheck
                        || verify_infinite_pattern(&s.seq, &a, PatternMode::Exp2).is_ok_and(|r| r.success)
                            && extract_exp_sequence(&a, &oracle, n, &budget).as_ref() == Ok(&s);
                    (s.report, ok)
                }),
            };
            match result {
                Ok((report, ok)) => {
                    print!("{report}");
                    if !ok {
                        return recheck_failed("extraction does not replay");
                    }
                    Ok(if report.success { OK } else { NEGATIVE })
                }
                Err(e) => {
                    print!("{}", e.report);
                    println!("{e}");
                    Ok(NEGATIVE)
                }
            }
        }
        Command::Density { set, n_min, n_max } => {
            let a = parse_set(&set)?;
            let p = density::density_profile(&a, n_min, n_max).map_err(|e| e.to_string())?;
            println!("count({n_max})={}", p.count(n_max));
            println!("min_ratio={} max_ratio={}", p.min_ratio, p.max_ratio);
            Ok(OK)
        }
        Command::Delta { op } => run_delta(op),
        Command::Gamma { sets, ells, kind, budget } => {
            if sets.len() != ells.len() {
                return Err("every --set needs a matching --ell".into());
            }
            let parsed: Vec<(IntegerSet, u64)> =
                sets.iter().map(|s| parse_set(s)).collect::<Result<Vec<_>, _>>()?.into_iter().zip(ells).collect();
            let budget = budget.budget();
            let single = |what: &str| -> Result<&(IntegerSet, u64), String> {
                match parsed.as_slice() {
                    [one] => Ok(one),
                    _ => Err(format!("{what} takes exactly one set")),
                }
            };
            let found = match kind {
                GammaKind::Gamma => gamma_witness(&parsed, &budget),
                GammaKind::Star => {
                    let (a, l) = single("star")?;
                    star_witness(a, *l, &budget)
                }
                GammaKind::Dagger => {
                    let (a, l) = single("dagger")?;
                    dagger_witness(a, *l, &budget)
                }
            };
            match found {
                Ok((b, c)) => {
                    println!("b={b} c={c}");
                    if let GammaKind::Gamma = kind {
                        for (a, l) in &parsed {
                            let inside = a.contains(b).map_err(|e| e.to_string())?;
                            let ok = in_gamma(a, *l, b, c).map_err(|e| e.to_string())?;
                            println!("{a} ell={l}: {} {}", if inside { "inside" } else { "outside" }, pass(ok));
                        }
                    }
                    Ok(OK)
                }
                Err(e) => {
                    println!("{e}");
                    Ok(NEGATIVE)
                }
            }
        }
        Command::ExportDimacs { n, r, pattern, output } => {
            let p = pattern.spec()?;
            check_nr(n, r)?;
            let text = export_dimacs(n, r, &p).to_dimacs();
            match output {
                Some(path) => fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(OK)
        }
        Command::CheckModel { n, r, model, pattern } => {
            let p = pattern.spec()?;
            check_nr(n, r)?;
            let lits = parse_model(&read(&model)?).map_err(|e| format!("{}: {e}", model.display()))?;
            let c = decode_model(n, r, &lits).map_err(|e| e.to_string())?;
            print!("{}", c.to_text().map_err(|e| e.to_string())?);
            match find_monochromatic(&c, &p) {
                None => {
                    println!("AVOIDING");
                    Ok(OK)
                }
                Some(w) => {
                    println!("{w}");
                    Ok(NEGATIVE)
                }
            }
        }
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn check_nr(n: u64, r: usize) -> Result<(), String> {
    if n == 0 || r == 0 {
        return Err("N and r must be at least 1".into());
    }
    if r > 255 {
        return Err("at most 255 colors".into());
    }
    Ok(())
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn delta_outcome<T>(r: Result<T, DeltaError>, show: impl FnOnce(T)) -> Result<u8, String> {
    match r {
        Ok(v) => {
            show(v);
            Ok(OK)
        }
        Err(e @ DeltaError::WindowExceeded(_)) | Err(e @ DeltaError::InvalidArgument(_)) => Err(e.to_string()),
        Err(e) => {
            println!("{e}");
            Ok(NEGATIVE)
        }
    }
}

fn run_delta(op: DeltaOp) -> Result<u8, String> {
    match op {
        DeltaOp::Difference { x } => {
            let d = density::difference_set(&x);
            println!("{}", d.as_expr().expect("finite set"));
            Ok(OK)
        }
        DeltaOp::ThickInterval { set, k, hi } => {
            let a = parse_set(&set)?;
            delta_outcome(density::find_thick_interval(&a, k, 1..=hi), |iv| match iv {
                Some((s, e)) => println!("interval [{s},{e}]"),
                None => println!("NONE"),
            })
        }
        DeltaOp::ThickToDelta { set, m, hi } => {
            let a = parse_set(&set)?;
            delta_outcome(density::thick_to_delta(&a, m, 1..=hi), |x| {
                println!("X={}", join(&x));
                println!("delta={}", density::difference_set(&x).as_expr().expect("finite set"));
            })
        }
        DeltaOp::Intersect { set, x, hi } => {
            let a = parse_set(&set)?;
            delta_outcome(density::delta_intersection_witness(&a, &x, 1..=hi), |w| {
                println!("d={} a={} a'={} x={} x'={}", w.d, w.a, w.a_prime, w.x, w.x_prime)
            })
        }
        DeltaOp::GenSchur { set, x, ell, hi } => {
            let a = parse_set(&set)?;
            delta_outcome(density::gen_schur_from_delta(&a, &x, ell, 1..=hi), |(b, c)| {
                println!("b={b} c={c} b+ell*c={}", b + ell * c)
            })
        }
        DeltaOp::RichColor { coloring, m, floor } => {
            let c = read_coloring(&coloring)?;
            delta_outcome(density::select_rich_color(&c, m, floor), |(i, x)| {
                println!("color={i} X={}", join(&x))
            })
        }
    }
}
