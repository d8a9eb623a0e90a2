//! Search and certification for monochromatic exponential patterns in
//! finite colorings of the naturals.
//!
//! The crate covers four areas:
//!
//! * colorings, patterns and checkable witnesses ([`coloring`], [`pattern`]),
//! * density, thickness and difference-set constructions ([`density`]),
//! * avoider search, pattern-Ramsey numbers and CNF export ([`search`],
//!   [`dimacs`], [`witness_search`]),
//! * a finite largeness oracle with the triple and sequence extractions
//!   ([`surrogate`]).

pub mod coloring;
pub mod density;
pub mod dimacs;
pub mod exp_value;
pub mod pattern;
pub mod search;
pub mod set;
pub mod surrogate;
pub mod witness_search;

pub use coloring::{induced_exp_coloring, lift_exp_witness, validate_coloring, Coloring, ColoringError};
pub use density::{
    delta_intersection_witness, delta_partition_regular, density_profile, difference_set, find_thick_interval,
    gen_schur_from_delta, ramsey_homogeneous_pairs, select_rich_color, thick_to_delta, DeltaError, DeltaWitness,
    DensityProfile, PairColoring,
};
pub use dimacs::{decode_model, export_dimacs, parse_model, Cnf, DimacsError};
pub use exp_value::{ExpValue, ExpValueError, NormalForm};
pub use pattern::{enumerate_instances, Instance, PatternError, PatternKind, PatternSpec, Witness, WitnessError};
pub use search::{
    find_monochromatic, pattern_number, pattern_number_with, search_avoiding, search_avoiding_with, PatternNumber,
    SearchBudget, SearchOptions, SearchOutcome, SearchReport,
};
pub use set::{IntegerSet, SetError, SetExpr, WindowSet};
pub use surrogate::{
    a_hat, extract_exp2_triple, extract_exp_sequence, quotient_set, verify_infinite_pattern, Exp2Triple,
    ExpSequence, ExtractError, ExtractionReport, FailureKind, LargenessOracle, PatternMode,
};
pub use witness_search::{dagger_witness, gamma_witness, star_witness, WitnessSearchError};
