//! SPSA tuning of the protocol parameters.

pub mod selection;
pub mod solve;
pub mod spsa;

pub use selection::{select_varied_operators, SelectionStrategy};
pub use solve::{
    decode_report, params_hash, solve_instance, EvalInfo, Evaluator, Hyper, InitMode, OptimizationTrace,
    SolveOutcome, TraceRecord,
};
pub use spsa::{spsa_minimize, Best, Evaluation, SpsaConfig, SpsaResult, SpsaStep};
