//! A deterministic artificial-chemistry engine with causal analysis and
//! self-reproduction detection at the molecule level and at the level of
//! sets of molecules.
//!
//! Chemistries are multiset-rewriting systems written in a small text
//! format (see [`parse_chemistry`]). A [`Trace`] records one sequential run;
//! the analysis functions search it for causal paths, cycles and
//! self-reproducing entities. Every verdict is relative to the trace
//! horizon and the search caps it was computed with.

pub mod causal;
pub mod cli;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod hierarchy;
pub mod io;
pub mod multiset;
pub mod reaction;
pub mod selfrep;

pub use causal::{
    causal_edges, causal_paths, count_pairwise_paths, reaction_graph, CausalEdge, CausalPath, PathQuery,
    PathScope, ReactionGraph, DEFAULT_PATH_BUDGET,
};
pub use dsl::parse_chemistry;
pub use engine::{
    apply, detect_cycle, detect_cycle_in, is_feasible, is_feasible_seq, schedule, simulate, CycleWitness,
    FeasibilityMode, SchedulerPolicy, Simulator, StopReason, Trace,
};
pub use error::{Error, ParseError, ParseErrorKind, Result, TraceError};
pub use hierarchy::{
    detect_selfrep1, enumerate_level1, is_nontrivial, level1_causal, level1_equivalent, level_of, perfect_matching,
    takes_part, temporally_precedes, Entity, HierEntity, Level1Caps, Level1Failure, Level1Verdict, MetaReaction,
    Nontriviality,
};
pub use io::{export_dot, read_trace, write_trace, ReportDocument};
pub use multiset::{Multiset, Symbol};
pub use reaction::{seq_input, seq_output, ChemistrySpec, EquivClass, Reaction, ReactionSeq, Step};
pub use selfrep::{
    check_material_basis, detect_selfrep, detect_selfrep_over_policies, sweep_molecules, verify_theorem1,
    EquivalenceSpec, Level0Failure, Level0Verdict, SelfRepQuery, Status,
};
