//! End-to-end lowering of `D(θ)` onto powers of one fixed gate.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::approx::{find_power, inverse_params, ApproxQuery, ApproxResult, DEFAULT_N_MAX};
use crate::error::{Error, Result};
use crate::gates::{d_matrix, rz_matrix, v_matrix, GateParams};

use super::build::{approx_rz, approx_vperp, build_d_stages, perp_phi, vperp_target};
use super::lower::Lowering;
use super::network::{eval_network, EvalMode, GateKind, NetOp, Network};

/// Truncations for the two limits are picked from `1, 4, 16, …` up to this.
const MAX_TRUNCATION: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    /// Replicas of the fixed gate spent in this stage.
    pub gate_count: u64,
    /// Phase-invariant distance of the compiled stage to its exact matrix.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    pub fixed: GateParams,
    pub theta: f64,
    pub stage_eps: f64,
    /// Commutator cells per `R_z` approximant.
    pub rz_n: usize,
    /// `T` repetitions per `V(φ − π/2, ·, ·)` approximant.
    pub vperp_n: usize,
    /// `A`/`A⁻¹` ops after lowering, before each is replaced by a power.
    pub lowered_ops: usize,
    /// Distinct `A(φ, α₁, θ₁)` targets handed to the power search.
    pub distinct_targets: usize,
    /// Largest torus error among the power approximations.
    pub max_power_err: f64,
    /// Distance of the lowered network with exact `A` factors.
    pub lowered_distance: f64,
    pub per_stage: Vec<StageReport>,
    pub total_a_count: u64,
    pub final_distance: f64,
}

/// Compiled network plus the replica count behind each op.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledNetwork {
    /// Every op is an `A` whose parameters are the achieved power of the
    /// fixed gate.
    pub network: Network,
    pub replicas: Vec<u64>,
}

/// Lowers `D(θ)` all the way down to powers of `fixed` and reports the
/// replica counts and distances. See [`compile_d_network`].
pub fn compile_d(fixed: GateParams, theta: f64, stage_eps: f64) -> Result<CompileReport> {
    compile_d_network(fixed, theta, stage_eps).map(|(report, _)| report)
}

/// Lowers `D(θ)` all the way down to powers of `fixed`.
///
/// The `R_z` and `V(φ − π/2)` limits are truncated at the first `n` in
/// `1, 4, 16, …` whose idealized approximant is within `stage_eps` of its
/// target. Every remaining `A(φ, α₁, θ₁)` is then replaced by the smallest
/// power of `fixed` within `stage_eps` of `(α₁, θ₁)` on both angles. Errors
/// from the separate stages compose; the report records what comes out.
pub fn compile_d_network(
    fixed: GateParams,
    theta: f64,
    stage_eps: f64,
) -> Result<(CompileReport, CompiledNetwork)> {
    if !(stage_eps > 0.0 && stage_eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "stage_eps must be positive and finite, got {stage_eps}"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "theta must be finite, got {theta}"
        )));
    }
    let phi = fixed.phi;
    let rz_beta = phi / 2.0;
    let rz_n = smallest_truncation(stage_eps, |n| {
        eval_network(&approx_rz(phi, rz_beta, n)?, EvalMode::Idealized)?
            .phase_dist(&rz_matrix(rz_beta))
    })?;
    let s = (rz_beta / (2.0 * rz_n as f64)).sqrt();
    let vperp_n = smallest_truncation(stage_eps, |n| {
        eval_network(&approx_vperp(phi, s, n)?, EvalMode::Idealized)?
            .phase_dist(&v_matrix(vperp_target(phi, s)))
    })?;
    debug_assert_eq!(perp_phi(phi), vperp_target(phi, s).phi);

    let lowering = Lowering::new(phi, vperp_n, rz_n);
    let stages = build_d_stages(phi, theta, rz_n)?;
    let lowered: Vec<Network> = stages
        .iter()
        .map(|s| lowering.lower(s))
        .collect::<Result<_>>()?;

    let mut cache: HashMap<(u64, u64), ApproxResult> = HashMap::new();
    let mut compiled_stages = Vec::with_capacity(3);
    for net in &lowered {
        compiled_stages.push(replace_with_powers(net, fixed, stage_eps, &mut cache)?);
    }

    let targets = [
        rz_matrix(-rz_beta),
        v_matrix(GateParams::new(phi, std::f64::consts::FRAC_PI_2, theta)),
        rz_matrix(rz_beta),
    ];
    let names = ["rz(-phi/2)", "v(phi,pi/2,theta)", "rz(phi/2)"];
    let mut per_stage = Vec::with_capacity(3);
    for ((name, target), stage) in names.iter().zip(&targets).zip(&compiled_stages) {
        per_stage.push(StageReport {
            name: name.to_string(),
            gate_count: stage.replicas.iter().sum(),
            distance: eval_network(&stage.network, EvalMode::Lowered)?.phase_dist(target)?,
        });
    }

    let mut whole = CompiledNetwork {
        network: Network::new(3),
        replicas: Vec::new(),
    };
    for stage in compiled_stages {
        whole.network.extend(&stage.network);
        whole.replicas.extend(stage.replicas);
    }
    let mut lowered_all = Network::new(3);
    lowered.iter().for_each(|n| lowered_all.extend(n));

    let target = d_matrix(theta);
    let report = CompileReport {
        fixed,
        theta,
        stage_eps,
        rz_n,
        vperp_n,
        lowered_ops: lowered_all.len(),
        distinct_targets: cache.len(),
        max_power_err: cache.values().map(|r| r.err).fold(0.0, f64::max),
        lowered_distance: eval_network(&lowered_all, EvalMode::Lowered)?.phase_dist(&target)?,
        total_a_count: per_stage.iter().map(|s| s.gate_count).sum(),
        per_stage,
        final_distance: eval_network(&whole.network, EvalMode::Lowered)?.phase_dist(&target)?,
    };
    Ok((report, whole))
}

fn smallest_truncation(eps: f64, dist: impl Fn(usize) -> Result<f64>) -> Result<usize> {
    let mut n = 1;
    while n <= MAX_TRUNCATION {
        if dist(n)? <= eps {
            return Ok(n);
        }
        n *= 4;
    }
    Err(Error::InvalidArgument(format!(
        "stage_eps {eps} needs more than {MAX_TRUNCATION} repetitions"
    )))
}

fn replace_with_powers(
    net: &Network,
    fixed: GateParams,
    eps: f64,
    cache: &mut HashMap<(u64, u64), ApproxResult>,
) -> Result<CompiledNetwork> {
    let mut out = CompiledNetwork {
        network: Network::new(net.width),
        replicas: Vec::with_capacity(net.len()),
    };
    for op in &net.ops {
        let p = op.gate_params().expect("lowered op carries gate params");
        let wanted = match op.kind {
            GateKind::A => p,
            GateKind::AInv => inverse_params(p),
            other => unreachable!("lowering left a {other} op"),
        };
        let key = (wanted.alpha.to_bits(), wanted.theta.to_bits());
        let hit = match cache.get(&key) {
            Some(r) => *r,
            None => {
                let q = ApproxQuery::new(fixed, wanted.alpha, wanted.theta, eps)
                    .with_n_max(DEFAULT_N_MAX);
                let r = find_power(&q)?;
                if !r.met {
                    return Err(Error::Unreachable {
                        target_alpha: wanted.alpha,
                        target_theta: wanted.theta,
                        eps,
                        n_max: q.n_max,
                        best_n: r.n,
                        best_err: r.err,
                    });
                }
                cache.insert(key, r);
                r
            }
        };
        let c = op.placement.controls[0];
        out.network.push(NetOp::a(
            c,
            op.placement.target,
            net.width,
            hit.achieved(fixed.phi),
        ));
        out.replicas.push(hit.n);
    }
    Ok(out)
}

/// `A^n` for each compiled op, literally repeated. Only practical for small
/// counts; used to cross-check the closed-form powers.
pub fn expand_replicas(compiled: &CompiledNetwork, fixed: GateParams) -> Network {
    let mut net = Network::new(compiled.network.width);
    for (op, &n) in compiled.network.ops.iter().zip(&compiled.replicas) {
        for _ in 0..n {
            net.push(NetOp::a(
                op.placement.controls[0],
                op.placement.target,
                net.width,
                fixed,
            ));
        }
    }
    net
}
