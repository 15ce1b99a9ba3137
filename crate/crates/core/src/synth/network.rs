use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::approx::inverse_params;
use crate::error::{Error, Result};
use crate::gates::{
    a_matrix, check_qubits, p_matrix, q_matrix, rz_matrix, v_matrix, vbar_matrix, GateParams,
    Placement,
};
use crate::matcore::{CMat, Complex, StateVec, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    A,
    AInv,
    V,
    VBar,
    P,
    Q,
    Rz,
}

impl GateKind {
    /// Keyword used by the netlist format.
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::A => "a",
            GateKind::AInv => "ainv",
            GateKind::V => "v",
            GateKind::VBar => "vbar",
            GateKind::P => "p",
            GateKind::Q => "q",
            GateKind::Rz => "rz",
        }
    }

    /// Only `A` and its inverse survive lowering.
    pub fn is_primitive(self) -> bool {
        matches!(self, GateKind::A | GateKind::AInv)
    }

    pub fn n_controls(self) -> usize {
        match self {
            GateKind::A | GateKind::AInv => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "a" => GateKind::A,
            "ainv" => GateKind::AInv,
            "v" => GateKind::V,
            "vbar" => GateKind::VBar,
            "p" => GateKind::P,
            "q" => GateKind::Q,
            "rz" => GateKind::Rz,
            _ => return Err(format!("unknown gate `{s}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OpParams {
    Gate(GateParams),
    Angle(f64),
    None,
}

/// One gate application.
///
/// The placement lists the qubits in the order the gate's local matrix reads
/// them: controls first, then the target. For the three-qubit kinds the
/// local matrix is the displayed 8×8 one on `(c1, c2, t)`, so `VBar`, `P`
/// and `Q` placed at `(1, 2, 3)` act exactly as `V̄`, `P` and `Q`; in
/// particular `VBar` really controls on `c1` and `t` and targets `c2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetOp {
    pub kind: GateKind,
    pub placement: Placement,
    pub params: OpParams,
}

impl NetOp {
    pub fn new(kind: GateKind, placement: Placement, params: OpParams) -> Result<Self> {
        let op = NetOp {
            kind,
            placement,
            params,
        };
        op.validate()?;
        Ok(op)
    }

    pub fn a(control: usize, target: usize, width: usize, p: GateParams) -> Self {
        Self::two(GateKind::A, control, target, width, OpParams::Gate(p))
    }

    pub fn a_inv(control: usize, target: usize, width: usize, p: GateParams) -> Self {
        Self::two(GateKind::AInv, control, target, width, OpParams::Gate(p))
    }

    pub fn v(qubits: [usize; 3], width: usize, p: GateParams) -> Self {
        Self::three(GateKind::V, qubits, width, OpParams::Gate(p))
    }

    pub fn vbar(qubits: [usize; 3], width: usize, p: GateParams) -> Self {
        Self::three(GateKind::VBar, qubits, width, OpParams::Gate(p))
    }

    pub fn p(qubits: [usize; 3], width: usize, phi: f64) -> Self {
        Self::three(GateKind::P, qubits, width, OpParams::Angle(phi))
    }

    pub fn q(qubits: [usize; 3], width: usize) -> Self {
        Self::three(GateKind::Q, qubits, width, OpParams::None)
    }

    pub fn rz(qubits: [usize; 3], width: usize, beta: f64) -> Self {
        Self::three(GateKind::Rz, qubits, width, OpParams::Angle(beta))
    }

    fn two(kind: GateKind, c: usize, t: usize, width: usize, params: OpParams) -> Self {
        let placement = Placement::new(vec![c], t, width).expect("valid two-qubit placement");
        NetOp {
            kind,
            placement,
            params,
        }
    }

    fn three(kind: GateKind, q: [usize; 3], width: usize, params: OpParams) -> Self {
        let placement =
            Placement::new(vec![q[0], q[1]], q[2], width).expect("valid three-qubit placement");
        NetOp {
            kind,
            placement,
            params,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.placement.validate()?;
        if self.placement.controls.len() != self.kind.n_controls() {
            return Err(Error::InvalidPlacement(format!(
                "{} takes {} control(s), got {}",
                self.kind,
                self.kind.n_controls(),
                self.placement.controls.len()
            )));
        }
        let arity_ok = match (self.kind, self.params) {
            (GateKind::A | GateKind::AInv | GateKind::V | GateKind::VBar, OpParams::Gate(_)) => {
                true
            }
            (GateKind::P | GateKind::Rz, OpParams::Angle(x)) => x.is_finite(),
            (GateKind::Q, OpParams::None) => true,
            _ => false,
        };
        if !arity_ok {
            return Err(Error::InvalidArgument(format!(
                "parameters {:?} do not fit gate {}",
                self.params, self.kind
            )));
        }
        Ok(())
    }

    pub fn gate_params(&self) -> Option<GateParams> {
        match self.params {
            OpParams::Gate(p) => Some(p),
            _ => None,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self.params {
            OpParams::Angle(x) => Some(x),
            _ => None,
        }
    }

    /// The op's matrix on its own qubits, in placement order.
    pub fn local_matrix(&self) -> CMat {
        let gate = || self.gate_params().expect("validated op");
        let angle = || self.angle().expect("validated op");
        match self.kind {
            GateKind::A => a_matrix(gate()),
            GateKind::AInv => a_matrix(inverse_params(gate())),
            GateKind::V => v_matrix(gate()),
            GateKind::VBar => vbar_matrix(gate()),
            GateKind::P => p_matrix(angle()),
            GateKind::Q => q_matrix(),
            GateKind::Rz => rz_matrix(angle()),
        }
    }

    pub fn inverse(&self) -> NetOp {
        let (kind, params) = match (self.kind, self.params) {
            (GateKind::A, p) => (GateKind::AInv, p),
            (GateKind::AInv, p) => (GateKind::A, p),
            (k @ (GateKind::V | GateKind::VBar), OpParams::Gate(p)) => {
                (k, OpParams::Gate(inverse_params(p)))
            }
            (GateKind::Rz, OpParams::Angle(b)) => (GateKind::Rz, OpParams::Angle(-b)),
            // P and Q are Hermitian involutions
            (k, p) => (k, p),
        };
        NetOp {
            kind,
            placement: self.placement.clone(),
            params,
        }
    }

    /// Relabels qubits through `map` (`map[q - 1]` is the new label of `q`)
    /// onto a register of `width` qubits.
    pub fn remap(&self, map: &[usize], width: usize) -> Result<NetOp> {
        let placement = Placement::new(
            self.placement
                .controls
                .iter()
                .map(|&q| map[q - 1])
                .collect(),
            map[self.placement.target - 1],
            width,
        )?;
        Ok(NetOp {
            kind: self.kind,
            placement,
            params: self.params,
        })
    }
}

/// Gate applications in chronological order: `ops[0]` acts first, so the
/// network's operator is `M_k ··· M_2 · M_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub width: usize,
    pub ops: Vec<NetOp>,
}

impl Network {
    pub fn new(width: usize) -> Self {
        Network {
            width,
            ops: Vec::new(),
        }
    }

    pub fn with_ops(width: usize, ops: Vec<NetOp>) -> Result<Self> {
        let net = Network { width, ops };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        check_qubits(&[], self.width)?;
        for op in &self.ops {
            op.validate()?;
            if op.placement.width != self.width {
                return Err(Error::InvalidPlacement(format!(
                    "op placed on width {} inside a width-{} network",
                    op.placement.width, self.width
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: NetOp) {
        self.ops.push(op);
    }

    /// Appends `other`'s ops after this network's (they act later).
    pub fn extend(&mut self, other: &Network) {
        self.ops.extend(other.ops.iter().cloned());
    }

    pub fn concat(mut self, other: &Network) -> Network {
        self.extend(other);
        self
    }

    pub fn repeat(&self, times: usize) -> Network {
        let mut ops = Vec::with_capacity(self.ops.len() * times);
        for _ in 0..times {
            ops.extend(self.ops.iter().cloned());
        }
        Network {
            width: self.width,
            ops,
        }
    }

    /// Reversed network of inverted ops.
    pub fn inverse(&self) -> Network {
        Network {
            width: self.width,
            ops: self.ops.iter().rev().map(NetOp::inverse).collect(),
        }
    }

    pub fn remap(&self, map: &[usize], width: usize) -> Result<Network> {
        Ok(Network {
            width,
            ops: self
                .ops
                .iter()
                .map(|op| op.remap(map, width))
                .collect::<Result<_>>()?,
        })
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.ops.iter().filter(|op| op.kind == kind).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalMode {
    /// Every gate kind is evaluated from its exact matrix.
    Idealized,
    /// Only `A` and `A⁻¹` are accepted.
    Lowered,
}

/// Operator of a network: `M_k ··· M_1` for ops `1..=k` in chronological
/// order. The empty network evaluates to the identity.
pub fn eval_network(net: &Network, mode: EvalMode) -> Result<CMat> {
    net.validate()?;
    let dim = 1usize << net.width;
    let mut acc = CMat::identity(dim);
    for op in &net.ops {
        check_mode(op, mode)?;
        apply_left(
            acc.data_mut(),
            dim,
            &op.local_matrix(),
            &op.placement.qubits(),
            net.width,
        );
    }
    Ok(acc)
}

/// Runs a network on a state vector.
pub fn eval_on_state(net: &Network, mode: EvalMode, state: &StateVec) -> Result<StateVec> {
    net.validate()?;
    let dim = 1usize << net.width;
    if state.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: state.dim(),
        });
    }
    let mut amps = state.amplitudes().to_vec();
    for op in &net.ops {
        check_mode(op, mode)?;
        apply_left(
            &mut amps,
            1,
            &op.local_matrix(),
            &op.placement.qubits(),
            net.width,
        );
    }
    StateVec::new(amps)
}

fn check_mode(op: &NetOp, mode: EvalMode) -> Result<()> {
    if mode == EvalMode::Lowered && !op.kind.is_primitive() {
        return Err(Error::CompositeInLowered(op.kind.to_string()));
    }
    Ok(())
}

/// Left-multiplies a row-major `2^width × ncols` block by `local` acting on
/// `qubits`. Rows sharing the bits outside `qubits` form independent groups.
fn apply_left(data: &mut [Complex], ncols: usize, local: &CMat, qubits: &[usize], width: usize) {
    let k = qubits.len();
    let sub = 1usize << k;
    let masks: Vec<usize> = qubits.iter().map(|&q| 1 << (width - q)).collect();
    let support = masks.iter().fold(0, |a, m| a | m);
    let offsets: Vec<usize> = (0..sub)
        .map(|s| {
            (0..k)
                .filter(|&i| s & (1 << (k - 1 - i)) != 0)
                .fold(0, |acc, i| acc | masks[i])
        })
        .collect();
    let entries: Vec<(usize, usize, Complex)> = (0..sub)
        .flat_map(|r| (0..sub).map(move |c| (r, c)))
        .map(|(r, c)| (r, c, local.get(r, c)))
        .filter(|&(_, _, z)| z != ZERO)
        .collect();

    let mut gathered = vec![ZERO; sub * ncols];
    for rest in (0..1usize << width).filter(|i| i & support == 0) {
        for (s, &off) in offsets.iter().enumerate() {
            let row = (rest | off) * ncols;
            gathered[s * ncols..(s + 1) * ncols].copy_from_slice(&data[row..row + ncols]);
        }
        for &off in &offsets {
            let row = (rest | off) * ncols;
            data[row..row + ncols].fill(ZERO);
        }
        for &(r, c, z) in &entries {
            let row = (rest | offsets[r]) * ncols;
            let src = &gathered[c * ncols..(c + 1) * ncols];
            for (d, s) in data[row..row + ncols].iter_mut().zip(src) {
                *d += z * s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{embed_local, GateParams};
    use std::f64::consts::FRAC_PI_2;

    fn sample_ops() -> Vec<NetOp> {
        let p = GateParams::new(0.3, 1.1, 2.3);
        vec![
            NetOp::a(1, 2, 3, p),
            NetOp::a_inv(3, 1, 3, p),
            NetOp::v([2, 3, 1], 3, p),
            NetOp::vbar([1, 2, 3], 3, p),
            NetOp::p([3, 1, 2], 3, 0.9),
            NetOp::q([1, 2, 3], 3),
            NetOp::rz([2, 1, 3], 3, -0.4),
        ]
    }

    #[test]
    fn empty_network_is_identity() {
        assert_eq!(
            eval_network(&Network::new(3), EvalMode::Lowered).unwrap(),
            CMat::identity(8)
        );
    }

    #[test]
    fn single_a_op_is_a_matrix() {
        let p = GateParams::new(0.8, 0.2, 1.9);
        let net = Network::with_ops(2, vec![NetOp::a(1, 2, 2, p)]).unwrap();
        let m = eval_network(&net, EvalMode::Lowered).unwrap();
        assert!(m.frobenius_dist(&a_matrix(p)).unwrap() < 1e-15);
    }

    #[test]
    fn eval_matches_dense_embedding_product() {
        let ops = sample_ops();
        let net = Network::with_ops(3, ops.clone()).unwrap();
        let mut dense = CMat::identity(8);
        for op in &ops {
            let m = embed_local(&op.local_matrix(), &op.placement.qubits(), 3).unwrap();
            dense = m.mul(&dense).unwrap();
        }
        let got = eval_network(&net, EvalMode::Idealized).unwrap();
        assert!(got.frobenius_dist(&dense).unwrap() < 1e-14);
    }

    #[test]
    fn eval_on_state_matches_matrix() {
        let net = Network::with_ops(3, sample_ops()).unwrap();
        let m = eval_network(&net, EvalMode::Idealized).unwrap();
        let s = StateVec::from_bits("110").unwrap();
        let direct = eval_on_state(&net, EvalMode::Idealized, &s).unwrap();
        assert!(direct.dist(&m.apply(&s).unwrap()).unwrap() < 1e-15);
        assert!(eval_on_state(&net, EvalMode::Idealized, &StateVec::basis(4, 0)).is_err());
    }

    #[test]
    fn lowered_mode_rejects_composites() {
        let net = Network::with_ops(3, vec![NetOp::q([1, 2, 3], 3)]).unwrap();
        assert_eq!(
            eval_network(&net, EvalMode::Lowered),
            Err(Error::CompositeInLowered("q".into()))
        );
    }

    #[test]
    fn inverse_network_undoes_network() {
        let net = Network::with_ops(3, sample_ops()).unwrap();
        let round = net.clone().concat(&net.inverse());
        let m = eval_network(&round, EvalMode::Idealized).unwrap();
        assert!(m.frobenius_dist(&CMat::identity(8)).unwrap() < 1e-13);
    }

    #[test]
    fn vbar_op_is_v_with_target_and_second_control_swapped() {
        let p = GateParams::new(1.4, FRAC_PI_2, 0.6);
        let a = Network::with_ops(3, vec![NetOp::vbar([1, 2, 3], 3, p)]).unwrap();
        let b = Network::with_ops(3, vec![NetOp::v([1, 3, 2], 3, p)]).unwrap();
        let ma = eval_network(&a, EvalMode::Idealized).unwrap();
        let mb = eval_network(&b, EvalMode::Idealized).unwrap();
        assert!(ma.frobenius_dist(&mb).unwrap() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        let p = GateParams::new(0.0, 0.0, 0.0);
        let bad_arity = NetOp {
            kind: GateKind::Q,
            placement: Placement::new(vec![1, 2], 3, 3).unwrap(),
            params: OpParams::Gate(p),
        };
        assert!(bad_arity.validate().is_err());
        let bad_controls = NetOp {
            kind: GateKind::A,
            placement: Placement::new(vec![1, 2], 3, 3).unwrap(),
            params: OpParams::Gate(p),
        };
        assert!(bad_controls.validate().is_err());
        let wide = NetOp::a(1, 4, 4, p);
        assert!(Network::with_ops(3, vec![wide]).is_err());
    }
}
