//! Exact gate matrices, controlled embeddings and the Bloch-rotation form of
//! single-qubit unitaries.
//!
//! Qubits are numbered from 1, and qubit 1 is the most significant bit of a
//! basis index. With that ordering the nontrivial 2×2 block of a
//! doubly-controlled gate on three qubits sits at indices 6 and 7.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{CMat, Complex, ONE, ZERO};

/// Largest register handled by the dense embeddings (2^10 amplitudes).
pub const MAX_WIDTH: usize = 10;

/// Reduces an angle into `[0, 2π)`.
pub fn canonical_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly 2π
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Parameters `(φ, α, θ)` of the two-qubit gate `A`, each reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    pub phi: f64,
    pub alpha: f64,
    pub theta: f64,
}

impl GateParams {
    /// # Panics
    /// If any angle is NaN or infinite; use [`GateParams::try_new`] for
    /// untrusted input.
    pub fn new(phi: f64, alpha: f64, theta: f64) -> Self {
        Self::try_new(phi, alpha, theta).expect("gate angles must be finite")
    }

    pub fn try_new(phi: f64, alpha: f64, theta: f64) -> Result<Self> {
        if !(phi.is_finite() && alpha.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite gate angle in ({phi}, {alpha}, {theta})"
            )));
        }
        Ok(GateParams {
            phi: canonical_angle(phi),
            alpha: canonical_angle(alpha),
            theta: canonical_angle(theta),
        })
    }
}

/// The lower 2×2 block of `A(φ, α, θ)`: what the target undergoes when the
/// control reads 1.
pub fn a_block(p: GateParams) -> CMat {
    let (s, c) = p.theta.sin_cos();
    let minus_i = Complex::new(0.0, -1.0);
    let diag = Complex::from_polar(c, p.alpha);
    CMat::from_rows([
        [diag, minus_i * Complex::from_polar(s, p.alpha - p.phi)],
        [minus_i * Complex::from_polar(s, p.alpha + p.phi), diag],
    ])
}

/// The two-qubit gate `A(φ, α, θ)`: identity on `|00⟩, |01⟩` and
/// [`a_block`] on `|10⟩, |11⟩`.
pub fn a_matrix(p: GateParams) -> CMat {
    lower_block_matrix(4, &a_block(p))
}

/// Deutsch's three-qubit gate: identity on the first six basis states and
/// `[[i cosθ, sinθ], [sinθ, i cosθ]]` on `|110⟩, |111⟩`.
pub fn d_matrix(theta: f64) -> CMat {
    let (s, c) = theta.sin_cos();
    let block = CMat::from_rows([
        [Complex::new(0.0, c), Complex::new(s, 0.0)],
        [Complex::new(s, 0.0), Complex::new(0.0, c)],
    ]);
    lower_block_matrix(8, &block)
}

/// Doubly-controlled version of `A`'s block: qubits 1 and 2 control,
/// qubit 3 is the target.
pub fn v_matrix(p: GateParams) -> CMat {
    lower_block_matrix(8, &a_block(p))
}

/// `V` with qubits 2 and 3 exchanged.
pub fn vbar_matrix(p: GateParams) -> CMat {
    let swap = swap_23();
    swap.mul_unchecked(&v_matrix(p)).mul_unchecked(&swap)
}

/// Swaps `|101⟩ ↔ |111⟩` with phases `e^{∓iφ}`; equals `V̄(φ, π/2, π/2)`.
pub fn p_matrix(phi: f64) -> CMat {
    let mut m = CMat::identity(8);
    m.set(5, 5, ZERO);
    m.set(7, 7, ZERO);
    m.set(5, 7, Complex::from_polar(1.0, -phi));
    m.set(7, 5, Complex::from_polar(1.0, phi));
    m
}

/// Swaps `|101⟩ ↔ |110⟩`: a swap of qubits 2 and 3 controlled by qubit 1.
pub fn q_matrix() -> CMat {
    let mut m = CMat::identity(8);
    m.set(5, 5, ZERO);
    m.set(6, 6, ZERO);
    m.set(5, 6, ONE);
    m.set(6, 5, ONE);
    m
}

/// Conditional z rotation `diag(1, …, 1, e^{iβ}, e^{−iβ})`.
pub fn rz_matrix(beta: f64) -> CMat {
    let mut m = CMat::identity(8);
    m.set(6, 6, Complex::from_polar(1.0, beta));
    m.set(7, 7, Complex::from_polar(1.0, -beta));
    m
}

fn lower_block_matrix(dim: usize, block: &CMat) -> CMat {
    let mut m = CMat::identity(dim);
    let base = dim - 2;
    for r in 0..2 {
        for c in 0..2 {
            m.set(base + r, base + c, block.get(r, c));
        }
    }
    m
}

fn swap_23() -> CMat {
    qubit_perm(&[1, 3, 2]).expect("static permutation")
}

/// Control and target qubits of a gate on a `width`-qubit register.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub controls: Vec<usize>,
    pub target: usize,
    pub width: usize,
}

impl Placement {
    pub fn new(controls: Vec<usize>, target: usize, width: usize) -> Result<Self> {
        let pl = Placement {
            controls,
            target,
            width,
        };
        pl.validate()?;
        Ok(pl)
    }

    pub fn validate(&self) -> Result<()> {
        let mut all = self.controls.clone();
        all.push(self.target);
        check_qubits(&all, self.width)
    }

    /// Controls followed by the target.
    pub fn qubits(&self) -> Vec<usize> {
        let mut q = self.controls.clone();
        q.push(self.target);
        q
    }
}

pub(crate) fn check_qubits(qubits: &[usize], width: usize) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::InvalidPlacement(format!(
            "register width {width} outside 1..={MAX_WIDTH}"
        )));
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q == 0 || q > width {
            return Err(Error::InvalidPlacement(format!(
                "qubit {q} outside 1..={width}"
            )));
        }
        if qubits[..i].contains(&q) {
            return Err(Error::InvalidPlacement(format!("qubit {q} used twice")));
        }
    }
    Ok(())
}

#[inline]
fn shift(qubit: usize, width: usize) -> usize {
    width - qubit
}

/// Embeds a 2×2 block so that it acts on the target whenever every control
/// reads 1, and as the identity otherwise.
pub fn controlled_embed(block: &CMat, pl: &Placement) -> Result<CMat> {
    if block.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: block.dim(),
            right: 2,
        });
    }
    pl.validate()?;
    let dim = 1usize << pl.width;
    let control_mask = pl
        .controls
        .iter()
        .fold(0usize, |m, &q| m | (1 << shift(q, pl.width)));
    let tbit = 1usize << shift(pl.target, pl.width);

    let mut m = CMat::zeros(dim);
    for col in 0..dim {
        if col & control_mask != control_mask {
            m.set(col, col, ONE);
            continue;
        }
        let in_bit = usize::from(col & tbit != 0);
        let base = col & !tbit;
        m.set(base, col, block.get(0, in_bit));
        m.set(base | tbit, col, block.get(1, in_bit));
    }
    Ok(m)
}

/// Embeds a `2^k × 2^k` matrix acting on `qubits` (listed most significant
/// first, as the local matrix reads them) into a `width`-qubit register.
pub fn embed_local(local: &CMat, qubits: &[usize], width: usize) -> Result<CMat> {
    check_qubits(qubits, width)?;
    if local.dim() != 1 << qubits.len() {
        return Err(Error::DimensionMismatch {
            left: local.dim(),
            right: 1 << qubits.len(),
        });
    }
    let dim = 1usize << width;
    let k = qubits.len();
    let masks: Vec<usize> = qubits.iter().map(|&q| 1 << shift(q, width)).collect();
    let support = masks.iter().fold(0, |a, m| a | m);
    let scatter = |sub: usize| -> usize {
        (0..k)
            .filter(|&i| sub & (1 << (k - 1 - i)) != 0)
            .fold(0, |acc, i| acc | masks[i])
    };
    let gather = |idx: usize| -> usize {
        (0..k).fold(0, |acc, i| (acc << 1) | usize::from(idx & masks[i] != 0))
    };

    let mut m = CMat::zeros(dim);
    for col in 0..dim {
        let rest = col & !support;
        let sc = gather(col);
        for sr in 0..local.dim() {
            let v = local.get(sr, sc);
            if v != ZERO {
                m.set(rest | scatter(sr), col, v);
            }
        }
    }
    Ok(m)
}

/// Permutation matrix on `perm.len()` qubits. `perm[i - 1]` is the position
/// that qubit `i` moves to, so the ket `|q₁…q_w⟩` is sent to the ket whose
/// bit at position `perm[i - 1]` equals `qᵢ`.
pub fn qubit_perm(perm: &[usize]) -> Result<CMat> {
    let width = perm.len();
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::InvalidPermutation(format!(
            "length {width} outside 1..={MAX_WIDTH}"
        )));
    }
    let mut seen = vec![false; width];
    for &p in perm {
        if p == 0 || p > width || seen[p - 1] {
            return Err(Error::InvalidPermutation(format!(
                "{perm:?} is not a bijection of 1..={width}"
            )));
        }
        seen[p - 1] = true;
    }
    let dim = 1usize << width;
    let mut m = CMat::zeros(dim);
    for col in 0..dim {
        let row = (1..=width)
            .filter(|&q| col & (1 << shift(q, width)) != 0)
            .fold(0, |acc, q| acc | (1 << shift(perm[q - 1], width)));
        m.set(row, col, ONE);
    }
    Ok(m)
}

/// A single-qubit unitary written as `e^{iδ}(cos(Θ/2)·I − i·sin(Θ/2)·n·σ)`.
///
/// Canonical form: `Θ ∈ [0, π]` (the global phase absorbs the other half of
/// the range), so `cos(Θ/2) ≥ 0`. At `Θ = π` the axis sign is fixed by making
/// its first nonzero component positive. The identity maps to axis
/// `(0, 0, 1)` and angle 0. `δ` is reported in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochDecomp {
    pub global_phase: f64,
    pub axis: [f64; 3],
    pub angle: f64,
}

impl BlochDecomp {
    pub fn reconstruct(&self) -> CMat {
        let (s, c) = (self.angle / 2.0).sin_cos();
        let [nx, ny, nz] = self.axis;
        let w = CMat::from_rows([
            [Complex::new(c, -s * nz), Complex::new(-s * ny, -s * nx)],
            [Complex::new(s * ny, -s * nx), Complex::new(c, s * nz)],
        ]);
        w.scale(Complex::from_polar(1.0, self.global_phase))
    }
}

const AXIS_EPS: f64 = 1e-15;

pub fn bloch_decompose(u: &CMat) -> Result<BlochDecomp> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: 2,
        });
    }
    let defect = u.unitarity_defect();
    if defect > 1e-8 {
        return Err(Error::NotUnitary { defect });
    }

    let det = u.get(0, 0) * u.get(1, 1) - u.get(0, 1) * u.get(1, 0);
    let mut delta = det.arg() / 2.0;
    let w = u.scale(Complex::from_polar(1.0, -delta));
    let (w00, w01, w10, w11) = (w.get(0, 0), w.get(0, 1), w.get(1, 0), w.get(1, 1));

    let mut c = (w00.re + w11.re) / 2.0;
    let mut v = [
        -(w01.im + w10.im) / 2.0,
        (w10.re - w01.re) / 2.0,
        (w11.im - w00.im) / 2.0,
    ];
    let flip = |c: &mut f64, v: &mut [f64; 3], delta: &mut f64| {
        *c = -*c;
        v.iter_mut().for_each(|x| *x = -*x);
        *delta += PI;
    };
    if c < 0.0 {
        flip(&mut c, &mut v, &mut delta);
    }
    let sv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if sv <= AXIS_EPS {
        return Ok(BlochDecomp {
            global_phase: canonical_angle(delta),
            axis: [0.0, 0.0, 1.0],
            angle: 0.0,
        });
    }
    if c.abs() <= AXIS_EPS {
        if let Some(first) = v.iter().copied().find(|x| x.abs() > AXIS_EPS) {
            if first < 0.0 {
                flip(&mut c, &mut v, &mut delta);
            }
        }
    }
    Ok(BlochDecomp {
        global_phase: canonical_angle(delta),
        axis: [v[0] / sv, v[1] / sv, v[2] / sv],
        angle: 2.0 * sv.atan2(c),
    })
}

/// Axis `u⊥` obtained by rotating an xy-plane axis by `−π/2`.
pub fn perpendicular_axis(axis: [f64; 3]) -> [f64; 3] {
    let (s, c) = (-FRAC_PI_2).sin_cos();
    [
        c * axis[0] - s * axis[1],
        s * axis[0] + c * axis[1],
        axis[2],
    ]
}
