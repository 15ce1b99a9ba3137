//! Gate networks: construction, lowering onto a single two-qubit gate,
//! evaluation, and convergence measurements.

mod build;
mod compile;
mod lower;
mod network;
mod study;

pub use build::{
    approx_rz, approx_vperp, build_d, build_d_exact, build_p, build_q, build_t, lower_v,
    lower_vbar, perp_phi, t_generator, t_leading_order, vperp_target,
};
pub use compile::{
    compile_d, compile_d_network, expand_replicas, CompileReport, CompiledNetwork, StageReport,
};
pub use lower::Lowering;
pub use network::{eval_network, eval_on_state, EvalMode, GateKind, NetOp, Network, OpParams};
pub use study::{convergence_study, Construction, ConvergenceSample, StudyParams};
