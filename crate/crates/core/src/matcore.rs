//! Dense complex matrices and state vectors.
//!
//! Every gate in this crate lives on at most three qubits, so matrices are
//! tiny (dimension 8 at most in normal use) and stored densely in row-major
//! order. Qubit 1 is the most significant bit of a basis index.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMat {
    dim: usize,
    data: Vec<Complex>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails if the length is not a
    /// nonzero perfect square or an entry is not finite.
    pub fn from_vec(data: Vec<Complex>) -> Result<Self> {
        let len = data.len();
        let dim = (len as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != len {
            return Err(Error::NotSquare { len });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMat { dim, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex; N]; N]) -> Self {
        CMat {
            dim: N,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn diag(entries: &[Complex]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex] {
        &mut self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex]> {
        self.data.chunks(self.dim)
    }

    /// Top-left-anchored square sub-block `[start, start + size)`.
    pub fn block(&self, start: usize, size: usize) -> CMat {
        let mut b = CMat::zeros(size);
        for r in 0..size {
            for c in 0..size {
                b.set(r, c, self.get(start + r, start + c));
            }
        }
        b
    }

    pub fn scale(&self, k: Complex) -> CMat {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> Result<CMat> {
        self.check_dim(other)?;
        Ok(CMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    fn check_dim(&self, other: &CMat) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// Standard matrix product `self · other`.
    pub fn mul(&self, other: &CMat) -> Result<CMat> {
        self.check_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &CMat) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    /// Kronecker product. The left factor occupies the more significant
    /// qubits of the result.
    pub fn kron(&self, other: &CMat) -> CMat {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = CMat::zeros(dim);
        for ar in 0..n {
            for ac in 0..n {
                let a = self.get(ar, ac);
                for br in 0..m {
                    for bc in 0..m {
                        out.data[(ar * m + br) * dim + ac * m + bc] = a * other.get(br, bc);
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Plain Frobenius distance `‖self − other‖_F`.
    pub fn frobenius_dist(&self, other: &CMat) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `min_γ ‖self − e^{iγ}·other‖_F`.
    ///
    /// The minimizer is `γ* = arg tr(other† · self)`. When that trace vanishes
    /// the phase is undetermined and the plain Frobenius distance is returned.
    pub fn phase_dist(&self, other: &CMat) -> Result<f64> {
        self.check_dim(other)?;
        let overlap: Complex = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| b.conj() * a)
            .sum();
        let phase = if overlap.norm() == 0.0 {
            ONE
        } else {
            overlap / overlap.norm()
        };
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `‖self†·self − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint().mul_unchecked(self);
        let n = self.dim;
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { ONE } else { ZERO };
                acc += (g.get(r, c) - target).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `self^n` by binary exponentiation.
    ///
    /// The running square is multiplied into the accumulator from the least
    /// significant exponent bit upward, so the accumulator is always
    /// `acc · base` (accumulator on the left).
    pub fn pow(&self, mut n: u64) -> CMat {
        let mut acc = CMat::identity(self.dim);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Matrix-vector product.
    pub fn apply(&self, state: &StateVec) -> Result<StateVec> {
        if self.dim != state.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: state.dim(),
            });
        }
        let amps = self
            .rows()
            .map(|row| row.iter().zip(&state.amps).map(|(a, x)| a * x).sum())
            .collect();
        Ok(StateVec { amps })
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat({}x{}) [", self.dim, self.dim)?;
        for row in self.rows() {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pure state amplitudes in the computation basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVec {
    amps: Vec<Complex>,
}

impl StateVec {
    pub fn new(amps: Vec<Complex>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidArgument("empty state vector".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(StateVec { amps })
    }

    /// Computation basis ket `|index⟩` in a space of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        StateVec { amps }
    }

    /// Parses a bit-string label such as `"110"`; the first character is
    /// qubit 1 (most significant).
    pub fn from_bits(bits: &str) -> Result<Self> {
        if bits.is_empty() || bits.len() > 16 {
            return Err(Error::InvalidArgument(format!("bad basis label `{bits}`")));
        }
        let mut index = 0usize;
        for ch in bits.chars() {
            index = match ch {
                '0' => index << 1,
                '1' => (index << 1) | 1,
                _ => return Err(Error::InvalidArgument(format!("bad basis label `{bits}`"))),
            };
        }
        Ok(Self::basis(1 << bits.len(), index))
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Complex {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn dist(&self, other: &StateVec) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}
