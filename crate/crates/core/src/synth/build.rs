//! Builders for the gate networks of the construction, all on three qubits.
//!
//! Operator products such as `V = A₂₃ A₁₃ A₁₂ A₂₃⁻¹ A₁₂` are written
//! right to left; the networks here store the same factors in chronological
//! order, so the rightmost factor is `ops[0]`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::gates::{canonical_angle, GateParams};
use crate::matcore::{CMat, Complex};

use super::network::{NetOp, Network};

pub(crate) const WIDTH: usize = 3;
const QUBITS: [usize; 3] = [1, 2, 3];

fn flip_params(phi: f64) -> GateParams {
    GateParams::new(phi, FRAC_PI_2, FRAC_PI_2)
}

/// Five-replica network of `A` realizing `V(p)`.
pub fn lower_v(p: GateParams) -> Network {
    let half = GateParams::new(p.phi, p.alpha / 2.0, p.theta / 2.0);
    let flip = flip_params(p.phi);
    Network {
        width: WIDTH,
        ops: vec![
            NetOp::a(1, 2, WIDTH, flip),
            NetOp::a_inv(2, 3, WIDTH, half),
            NetOp::a(1, 2, WIDTH, flip),
            NetOp::a(1, 3, WIDTH, half),
            NetOp::a(2, 3, WIDTH, half),
        ],
    }
}

/// [`lower_v`] with qubits 2 and 3 exchanged; realizes `V̄(p)`.
pub fn lower_vbar(p: GateParams) -> Network {
    lower_v(p)
        .remap(&[1, 3, 2], WIDTH)
        .expect("permutation of a valid network")
}

/// `P = V̄(φ, π/2, π/2)` as A-replicas.
pub fn build_p(phi: f64) -> Network {
    lower_vbar(flip_params(phi))
}

/// `Q = V̄ · V · V̄` at `(φ, π/2, −π/2)` as A-replicas. The result does not
/// depend on `φ`.
pub fn build_q(phi: f64) -> Network {
    let p = GateParams::new(phi, FRAC_PI_2, -FRAC_PI_2);
    let vbar = lower_vbar(p);
    vbar.clone().concat(&lower_v(p)).concat(&vbar)
}

/// `T(β) = Q [V(φ,0,β) P]² [V(φ,0,−β) P]² Q` with `V`, `P`, `Q` as single
/// ops. For small `β` this is a rotation by `2β²` about `u⊥`.
pub fn build_t(phi: f64, beta: f64) -> Network {
    let plus = GateParams::new(phi, 0.0, beta);
    let minus = GateParams::new(phi, 0.0, -beta);
    let mut ops = vec![NetOp::q(QUBITS, WIDTH)];
    for p in [minus, minus, plus, plus] {
        ops.push(NetOp::p(QUBITS, WIDTH, phi));
        ops.push(NetOp::v(QUBITS, WIDTH, p));
    }
    ops.push(NetOp::q(QUBITS, WIDTH));
    Network { width: WIDTH, ops }
}

/// The generator `G` of the leading term `T(β) ≈ I − iβ²G`: `u⊥·σ` on the
/// target when both controls read 1.
pub fn t_generator(phi: f64) -> CMat {
    let mut g = CMat::zeros(8);
    g.set(
        6,
        7,
        Complex::new(0.0, 1.0) * Complex::from_polar(1.0, -phi),
    );
    g.set(
        7,
        6,
        Complex::new(0.0, -1.0) * Complex::from_polar(1.0, phi),
    );
    g
}

/// `I − iβ²G`.
pub fn t_leading_order(phi: f64, beta: f64) -> CMat {
    let scaled = t_generator(phi).scale(Complex::new(0.0, beta * beta));
    CMat::identity(8).sub(&scaled).expect("same dimension")
}

/// The axis angle `φ − π/2` of the gates that [`approx_vperp`] produces.
pub fn perp_phi(phi: f64) -> f64 {
    canonical_angle(phi - FRAC_PI_2)
}

/// `n` repetitions of `T(√(β/n))`, approaching `V(φ − π/2, 0, β)`.
pub fn approx_vperp(phi: f64, beta: f64, n: usize) -> Result<Network> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "beta must be finite and nonnegative, got {beta}; invert the network for negative angles"
        )));
    }
    Ok(build_t(phi, (beta / n as f64).sqrt()).repeat(n))
}

/// Exact target of [`approx_vperp`].
pub fn vperp_target(phi: f64, beta: f64) -> GateParams {
    GateParams::new(perp_phi(phi), 0.0, beta)
}

/// `n` repetitions of the commutator cell
/// `V(φ,0,s) V(φ−π/2,0,s) V(φ,0,−s) V(φ−π/2,0,−s)` with `s = √(β/2n)`,
/// approaching `R_z(β)`. Negative `β` gives the inverse network of `−β`.
pub fn approx_rz(phi: f64, beta: f64, n: usize) -> Result<Network> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beta must be finite, got {beta}"
        )));
    }
    if beta < 0.0 {
        return Ok(approx_rz(phi, -beta, n)?.inverse());
    }
    let s = (beta / (2.0 * n as f64)).sqrt();
    let perp = perp_phi(phi);
    let cell = Network {
        width: WIDTH,
        ops: vec![
            NetOp::v(QUBITS, WIDTH, GateParams::new(perp, 0.0, -s)),
            NetOp::v(QUBITS, WIDTH, GateParams::new(phi, 0.0, -s)),
            NetOp::v(QUBITS, WIDTH, GateParams::new(perp, 0.0, s)),
            NetOp::v(QUBITS, WIDTH, GateParams::new(phi, 0.0, s)),
        ],
    };
    Ok(cell.repeat(n))
}

/// `D(θ) = R_z(φ/2) · V(φ, π/2, θ) · R_z(−φ/2)` with both rotations
/// approximated by [`approx_rz`] at `n` cells.
pub fn build_d(phi: f64, theta: f64, n: usize) -> Result<Network> {
    let [pre, core, post] = build_d_stages(phi, theta, n)?;
    Ok(pre.concat(&core).concat(&post))
}

/// The three chronological pieces of [`build_d`].
pub(crate) fn build_d_stages(phi: f64, theta: f64, n: usize) -> Result<[Network; 3]> {
    let phi = canonical_angle(phi);
    Ok([
        approx_rz(phi, -phi / 2.0, n)?,
        Network {
            width: WIDTH,
            ops: vec![NetOp::v(
                QUBITS,
                WIDTH,
                GateParams::new(phi, FRAC_PI_2, theta),
            )],
        },
        approx_rz(phi, phi / 2.0, n)?,
    ])
}

/// [`build_d`] with exact `R_z` ops instead of their approximants.
pub fn build_d_exact(phi: f64, theta: f64) -> Network {
    let phi = canonical_angle(phi);
    Network {
        width: WIDTH,
        ops: vec![
            NetOp::rz(QUBITS, WIDTH, -phi / 2.0),
            NetOp::v(QUBITS, WIDTH, GateParams::new(phi, FRAC_PI_2, theta)),
            NetOp::rz(QUBITS, WIDTH, phi / 2.0),
        ],
    }
}

/// Angle range check used by lowering: `x` on the circle, as a signed value
/// in `(−π, π]`.
pub(crate) fn signed_angle(x: f64) -> f64 {
    let c = canonical_angle(x);
    if c > PI {
        c - 2.0 * PI
    } else {
        c
    }
}
