//! Seeded randomized self-check of every exact identity in the
//! construction, summarized as a [`VerifyReport`].

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::approx::{inverse_params, power_params};
use crate::gates::{a_matrix, bloch_decompose, d_matrix, p_matrix, q_matrix, v_matrix, GateParams};
use crate::matcore::{CMat, Complex};
use crate::synth::{
    build_d_exact, build_p, build_q, build_t, eval_network, lower_v, t_leading_order, EvalMode,
};

pub const EXACT_TOL: f64 = 1e-12;
pub const POWER_TOL: f64 = 1e-8;
pub const BLOCH_TOL: f64 = 1e-10;
/// Bound on `‖T(β) − (I − iβ²G)‖_F / β³` over `β ≤ 0.1`.
pub const T_REMAINDER_BOUND: f64 = 1.5;
pub const T_BETAS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
pub const POWER_EXPONENTS: [u64; 4] = [1, 10, 100, 10_000];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub parameter_names: Vec<String>,
    /// One entry per randomized draw.
    pub parameters: Vec<Vec<f64>>,
    /// Worst measured distance over all draws.
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

struct Check {
    name: &'static str,
    names: &'static [&'static str],
    tolerance: f64,
    draw: fn(&mut ChaCha8Rng) -> Vec<f64>,
    measure: fn(&[f64]) -> f64,
}

fn angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.0..TAU)
}

fn triple(rng: &mut ChaCha8Rng) -> Vec<f64> {
    vec![angle(rng), angle(rng), angle(rng)]
}

fn params(x: &[f64]) -> GateParams {
    GateParams::new(x[0], x[1], x[2])
}

fn eval(net: &crate::synth::Network) -> CMat {
    eval_network(net, EvalMode::Idealized).expect("builder networks are valid")
}

fn checks() -> Vec<Check> {
    vec![
        Check {
            name: "inverse_law",
            names: &["phi", "alpha", "theta"],
            tolerance: EXACT_TOL,
            draw: triple,
            measure: |x| {
                let p = params(x);
                a_matrix(inverse_params(p))
                    .mul(&a_matrix(p))
                    .and_then(|m| m.frobenius_dist(&CMat::identity(4)))
                    .unwrap_or(f64::INFINITY)
            },
        },
        Check {
            name: "power_law",
            names: &["phi", "alpha", "theta"],
            tolerance: POWER_TOL,
            draw: triple,
            measure: |x| {
                let p = params(x);
                let a = a_matrix(p);
                POWER_EXPONENTS
                    .iter()
                    .map(|&n| {
                        a_matrix(power_params(p, n))
                            .phase_dist(&a.pow(n))
                            .unwrap_or(f64::INFINITY)
                    })
                    .fold(0.0, f64::max)
            },
        },
        Check {
            name: "v_from_five_a",
            names: &["phi", "alpha", "theta"],
            tolerance: EXACT_TOL,
            draw: triple,
            measure: |x| {
                let p = params(x);
                eval(&lower_v(p))
                    .phase_dist(&v_matrix(p))
                    .unwrap_or(f64::INFINITY)
            },
        },
        Check {
            name: "p_construction",
            names: &["phi"],
            tolerance: EXACT_TOL,
            draw: |rng| vec![angle(rng)],
            measure: |x| {
                eval(&build_p(x[0]))
                    .phase_dist(&p_matrix(x[0]))
                    .unwrap_or(f64::INFINITY)
            },
        },
        Check {
            name: "q_construction",
            names: &["phi"],
            tolerance: EXACT_TOL,
            draw: |rng| vec![angle(rng)],
            measure: |x| {
                let q = eval(&build_q(x[0]));
                // also independent of φ: compare against φ = 0
                let d = q.phase_dist(&q_matrix()).unwrap_or(f64::INFINITY);
                d.max(
                    q.frobenius_dist(&eval(&build_q(0.0)))
                        .unwrap_or(f64::INFINITY),
                )
            },
        },
        Check {
            name: "t_expansion_remainder",
            names: &["phi"],
            tolerance: T_REMAINDER_BOUND,
            draw: |rng| vec![angle(rng)],
            measure: |x| {
                T_BETAS
                    .iter()
                    .map(|&b| {
                        eval(&build_t(x[0], b))
                            .frobenius_dist(&t_leading_order(x[0], b))
                            .unwrap_or(f64::INFINITY)
                            / (b * b * b)
                    })
                    .fold(0.0, f64::max)
            },
        },
        Check {
            name: "d_assembly",
            names: &["phi", "theta"],
            tolerance: EXACT_TOL,
            draw: |rng| vec![angle(rng), angle(rng)],
            measure: |x| {
                eval(&build_d_exact(x[0], x[1]))
                    .phase_dist(&d_matrix(x[1]))
                    .unwrap_or(f64::INFINITY)
            },
        },
        Check {
            name: "v_p_q_reference_identities",
            names: &["phi"],
            tolerance: EXACT_TOL,
            draw: |rng| vec![angle(rng)],
            measure: |x| {
                let vbar = crate::gates::vbar_matrix(GateParams::new(x[0], FRAC_PI_2, FRAC_PI_2));
                let m = GateParams::new(x[0], FRAC_PI_2, -FRAC_PI_2);
                let q = crate::gates::vbar_matrix(m)
                    .mul(&v_matrix(m))
                    .and_then(|t| t.mul(&crate::gates::vbar_matrix(m)))
                    .expect("8x8");
                vbar.frobenius_dist(&p_matrix(x[0]))
                    .unwrap_or(f64::INFINITY)
                    .max(q.frobenius_dist(&q_matrix()).unwrap_or(f64::INFINITY))
            },
        },
        Check {
            name: "bloch_round_trip",
            names: &["phase", "q0", "q1", "q2", "q3"],
            tolerance: BLOCH_TOL,
            draw: |rng| {
                let mut q: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
                q.iter_mut().for_each(|v| *v /= norm);
                let mut out = vec![angle(rng)];
                out.extend(q);
                out
            },
            measure: |x| {
                let u = random_unitary(x);
                match bloch_decompose(&u) {
                    Ok(d) => d.reconstruct().frobenius_dist(&u).unwrap_or(f64::INFINITY),
                    Err(_) => f64::INFINITY,
                }
            },
        },
    ]
}

/// `e^{iγ}·(q₀ I − i(q₁X + q₂Y + q₃Z))` for a unit quaternion `q`.
pub fn random_unitary(x: &[f64]) -> CMat {
    let (g, a, b, c, d) = (x[0], x[1], x[2], x[3], x[4]);
    CMat::from_rows([
        [Complex::new(a, -d), Complex::new(-c, -b)],
        [Complex::new(c, -b), Complex::new(a, d)],
    ])
    .scale(Complex::from_polar(1.0, g))
}

/// Runs every check `trials` times. Each check draws from its own stream
/// derived from `seed`, so results do not depend on check order.
pub fn run_verify(seed: u64, trials: usize) -> VerifyReport {
    let trials = trials.max(1);
    let records: Vec<CheckRecord> = checks()
        .into_iter()
        .enumerate()
        .map(|(i, check)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            let parameters: Vec<Vec<f64>> = (0..trials).map(|_| (check.draw)(&mut rng)).collect();
            let measured =
                parameters
                    .iter()
                    .map(|x| (check.measure)(x))
                    .fold(0.0, |acc: f64, d| {
                        if d.is_nan() {
                            f64::INFINITY
                        } else {
                            acc.max(d)
                        }
                    });
            CheckRecord {
                name: check.name.to_string(),
                parameter_names: check.names.iter().map(|s| s.to_string()).collect(),
                parameters,
                measured,
                tolerance: check.tolerance,
                pass: measured <= check.tolerance,
            }
        })
        .collect();
    VerifyReport {
        tool: "unigate".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        trials,
        pass: records.iter().all(|r| r.pass),
        checks: records,
        timestamp: None,
    }
}
