use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{d_matrix, rz_matrix, v_matrix};

use super::build::{approx_rz, approx_vperp, build_d, build_t, t_leading_order, vperp_target};
use super::network::{eval_network, EvalMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Construction {
    /// Remainder of `T(β/n)` against its leading order `I − i(β/n)²G`.
    TOrder,
    /// `T(√(β/n))ⁿ` against `V(φ − π/2, 0, β)`.
    VPerp,
    /// `n` commutator cells against `R_z(β)`.
    Rz,
    /// `D` assembled from `n`-cell `R_z` approximants against `D(θ)`.
    D,
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t" | "t_order" => Ok(Construction::TOrder),
            "vperp" => Ok(Construction::VPerp),
            "rz" => Ok(Construction::Rz),
            "d" => Ok(Construction::D),
            _ => Err(Error::UnknownConstruction(s.to_string())),
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::TOrder => "t",
            Construction::VPerp => "vperp",
            Construction::Rz => "rz",
            Construction::D => "d",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyParams {
    pub phi: f64,
    pub beta: f64,
    pub theta: f64,
}

impl Default for StudyParams {
    fn default() -> Self {
        StudyParams {
            phi: 1.0,
            beta: 0.5,
            theta: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSample {
    pub n: usize,
    pub distance: f64,
}

/// Distance to the exact target for each `n` of `n_list`.
///
/// All constructions are evaluated in idealized mode. `TOrder` reports the
/// plain Frobenius remainder (its reference `I − iβ²G` is not unitary); the
/// others report the phase-invariant distance. Entries are computed in
/// parallel and returned in input order; each is independent of the others.
pub fn convergence_study(
    construction: Construction,
    params: StudyParams,
    n_list: &[usize],
) -> Result<Vec<ConvergenceSample>> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("n_list is empty".into()));
    }
    if n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "n_list must be strictly ascending positive integers".into(),
        ));
    }
    let StudyParams { phi, beta, theta } = params;
    n_list
        .par_iter()
        .map(|&n| {
            let distance = match construction {
                Construction::TOrder => {
                    let b = beta / n as f64;
                    eval_network(&build_t(phi, b), EvalMode::Idealized)?
                        .frobenius_dist(&t_leading_order(phi, b))?
                }
                Construction::VPerp => {
                    eval_network(&approx_vperp(phi, beta, n)?, EvalMode::Idealized)?
                        .phase_dist(&v_matrix(vperp_target(phi, beta)))?
                }
                Construction::Rz => eval_network(&approx_rz(phi, beta, n)?, EvalMode::Idealized)?
                    .phase_dist(&rz_matrix(beta))?,
                Construction::D => eval_network(&build_d(phi, theta, n)?, EvalMode::Idealized)?
                    .phase_dist(&d_matrix(theta))?,
            };
            Ok(ConvergenceSample { n, distance })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_construction_ids() {
        assert_eq!(
            "VPERP".parse::<Construction>().unwrap(),
            Construction::VPerp
        );
        assert_eq!("t".parse::<Construction>().unwrap(), Construction::TOrder);
        assert_eq!(
            "sk".parse::<Construction>(),
            Err(Error::UnknownConstruction("sk".into()))
        );
    }

    #[test]
    fn rz_at_zero_angle_is_exact() {
        let params = StudyParams {
            beta: 0.0,
            ..Default::default()
        };
        let samples = convergence_study(Construction::Rz, params, &[1, 4, 16]).unwrap();
        assert!(samples.iter().all(|s| s.distance < 1e-15));
    }

    #[test]
    fn vperp_decreases_over_two_decades() {
        let s =
            convergence_study(Construction::VPerp, StudyParams::default(), &[4, 64, 512]).unwrap();
        assert!(s.last().unwrap().distance < s[0].distance);
    }

    #[test]
    fn rejects_bad_n_lists() {
        let p = StudyParams::default();
        assert!(convergence_study(Construction::Rz, p, &[]).is_err());
        assert!(convergence_study(Construction::Rz, p, &[4, 4]).is_err());
        assert!(convergence_study(Construction::Rz, p, &[0, 4]).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let p = StudyParams::default();
        let n_list = [1, 2, 8, 32];
        let batch = convergence_study(Construction::D, p, &n_list).unwrap();
        for (sample, &n) in batch.iter().zip(&n_list) {
            let single = convergence_study(Construction::D, p, &[n]).unwrap();
            assert_eq!(sample.distance.to_bits(), single[0].distance.to_bits());
        }
    }
}
