//! Rewriting composite ops into replicas of a single `A(φ, ·, ·)` family.

use serde::{Deserialize, Serialize};

use crate::approx::torus_dist;
use crate::error::{Error, Result};
use crate::gates::GateParams;

use super::build::{approx_rz, approx_vperp, build_q, lower_v, perp_phi, signed_angle};
use super::network::{GateKind, NetOp, Network};

const PHI_TOL: f64 = 1e-12;

/// Lowering rules for one base axis angle `φ`.
///
/// * `A`, `A⁻¹` with axis `φ` are kept.
/// * `V`, `V̄` with axis `φ` expand into five replicas.
/// * `V(φ − π/2, 0, β)` is approximated by `vperp_n` repetitions of `T`,
///   each of which is lowered in turn; negative `β` uses the inverse network.
/// * `P`, `Q` expand exactly.
/// * `R_z(β)` is approximated by `rz_n` commutator cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lowering {
    pub phi: f64,
    pub vperp_n: usize,
    pub rz_n: usize,
}

impl Lowering {
    pub fn new(phi: f64, vperp_n: usize, rz_n: usize) -> Self {
        Lowering {
            phi: crate::gates::canonical_angle(phi),
            vperp_n,
            rz_n,
        }
    }

    /// A network containing only `A` and `A⁻¹` ops with axis `self.phi`.
    pub fn lower(&self, net: &Network) -> Result<Network> {
        net.validate()?;
        let mut out = Network::new(net.width);
        for op in &net.ops {
            self.lower_op(op, net.width, &mut out)?;
        }
        Ok(out)
    }

    fn lower_op(&self, op: &NetOp, width: usize, out: &mut Network) -> Result<()> {
        let q = op.placement.qubits();
        let not_lowerable = || Error::NotLowerable(format!("{op:?}"));
        let on_axis = |phi: f64| torus_dist(phi, self.phi) <= PHI_TOL;

        match op.kind {
            GateKind::A | GateKind::AInv => {
                let p = op.gate_params().ok_or_else(not_lowerable)?;
                if !on_axis(p.phi) {
                    return Err(not_lowerable());
                }
                out.push(op.clone());
            }
            GateKind::V | GateKind::VBar => {
                let p = op.gate_params().ok_or_else(not_lowerable)?;
                // V̄ on (c1, c2, t) is V on (c1, t, c2)
                let map = match op.kind {
                    GateKind::V => [q[0], q[1], q[2]],
                    _ => [q[0], q[2], q[1]],
                };
                if on_axis(p.phi) {
                    out.extend(&lower_v(p).remap(&map, width)?);
                } else if torus_dist(p.phi, perp_phi(self.phi)) <= PHI_TOL
                    && p.alpha.abs() <= PHI_TOL
                {
                    let beta = signed_angle(p.theta);
                    let approx = approx_vperp(self.phi, beta.abs(), self.vperp_n)?;
                    let approx = if beta < 0.0 { approx.inverse() } else { approx };
                    out.extend(&self.lower(&approx.remap(&map, width)?)?);
                } else {
                    return Err(not_lowerable());
                }
            }
            GateKind::P => {
                let phi = op.angle().ok_or_else(not_lowerable)?;
                if !on_axis(phi) {
                    return Err(not_lowerable());
                }
                let flip = GateParams::new(
                    self.phi,
                    std::f64::consts::FRAC_PI_2,
                    std::f64::consts::FRAC_PI_2,
                );
                out.extend(&lower_v(flip).remap(&[q[0], q[2], q[1]], width)?);
            }
            GateKind::Q => out.extend(&build_q(self.phi).remap(&q, width)?),
            GateKind::Rz => {
                let beta = op.angle().ok_or_else(not_lowerable)?;
                let approx = approx_rz(self.phi, beta, self.rz_n)?;
                out.extend(&self.lower(&approx.remap(&q, width)?)?);
            }
        }
        Ok(())
    }
}
