//! Powers of `A` and the search for the power that lands `(nα, nθ)` near a
//! target point of the 2-torus.
//!
//! `Aⁿ(φ, α, θ) = A(φ, nα mod 2π, nθ mod 2π)`, so repeating one fixed gate
//! walks the angle pair along the orbit `n·(α, θ)`. When `α/2π`, `θ/2π` and 1
//! are rationally independent the orbit is dense and every target is reached
//! to any tolerance for some finite `n`, typically `n ∝ 1/ε²`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{canonical_angle, GateParams};

/// `2π − fl(2π)`: the part of 2π that does not fit in an f64.
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// The plastic number, the real root of `x³ = x + 1`. Its reciprocal powers
/// `(1/ρ, 1/ρ²)` are the two-dimensional analogue of the golden-ratio
/// conjugate and give the most uniformly spread orbit on the 2-torus.
pub const PLASTIC: f64 = 1.324_717_957_244_746;

/// Default base angles `(α, θ) = 2π·(1/ρ, 1/ρ²)`.
pub const DEFAULT_ALPHA: f64 = TAU / PLASTIC;
pub const DEFAULT_THETA: f64 = TAU / (PLASTIC * PLASTIC);

/// `2π·(g, g²)` with `g` the golden-ratio conjugate. Since `g + g² = 1` the
/// orbit of this pair stays on the anti-diagonal `α + θ ≡ 0`, so it only
/// reaches targets on that line.
pub const GOLDEN_ALPHA: f64 = TAU * 0.618_033_988_7;
pub const GOLDEN_THETA: f64 = TAU * 0.381_966_011_3;

pub const DEFAULT_N_MAX: u64 = 1_000_000;

pub fn default_base(phi: f64) -> GateParams {
    GateParams::new(phi, DEFAULT_ALPHA, DEFAULT_THETA)
}

/// `n·x mod 2π` for `x ∈ [0, 2π)` without the drift that plain
/// multiplication picks up at large `n`. The product error and the
/// unrepresentable tail of 2π are both carried separately (Cody–Waite).
pub fn mul_angle(n: u64, x: f64) -> f64 {
    let nf = n as f64;
    let p = nf * x;
    let p_err = nf.mul_add(x, -p);
    let k = (p / TAU).floor();
    let r = (-k).mul_add(TAU, p);
    canonical_angle(r + p_err - k * TAU_LO)
}

/// Closed-form parameters of the `n`-th power of `A(p)`.
pub fn power_params(p: GateParams, n: u64) -> GateParams {
    GateParams {
        phi: p.phi,
        alpha: mul_angle(n, p.alpha),
        theta: mul_angle(n, p.theta),
    }
}

/// Parameters of `A(p)⁻¹ = A(φ, 2π − α, 2π − θ)`.
pub fn inverse_params(p: GateParams) -> GateParams {
    GateParams {
        phi: p.phi,
        alpha: canonical_angle(-p.alpha),
        theta: canonical_angle(-p.theta),
    }
}

/// Shortest angular distance on the circle, in `[0, π]`.
pub fn torus_dist(x: f64, y: f64) -> f64 {
    let d = (x - y).abs().rem_euclid(TAU);
    d.min(TAU - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxQuery {
    pub base: GateParams,
    pub target_alpha: f64,
    pub target_theta: f64,
    pub eps: f64,
    pub n_max: u64,
}

impl ApproxQuery {
    pub fn new(base: GateParams, target_alpha: f64, target_theta: f64, eps: f64) -> Self {
        ApproxQuery {
            base,
            target_alpha,
            target_theta,
            eps,
            n_max: DEFAULT_N_MAX,
        }
    }

    pub fn with_n_max(mut self, n_max: u64) -> Self {
        self.n_max = n_max;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "eps must be positive and finite, got {}",
                self.eps
            )));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        if !(self.target_alpha.is_finite() && self.target_theta.is_finite()) {
            return Err(Error::InvalidArgument(
                "target angles must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Torus error of the `n`-th power against the target.
    pub fn err_at(&self, n: u64) -> f64 {
        let p = power_params(self.base, n);
        torus_dist(p.alpha, self.target_alpha).max(torus_dist(p.theta, self.target_theta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub n: u64,
    pub achieved_alpha: f64,
    pub achieved_theta: f64,
    pub err: f64,
    pub met: bool,
}

impl ApproxResult {
    /// The gate actually realized by `n` replicas of the base gate.
    pub fn achieved(&self, phi: f64) -> GateParams {
        GateParams::new(phi, self.achieved_alpha, self.achieved_theta)
    }
}

const FIRST_CHUNK: u64 = 1 << 10;
const MAX_CHUNK: u64 = 1 << 16;

/// Smallest `n ∈ [1, n_max]` whose power lands within `eps` of the target on
/// both angles. If none does, the best `n` (smallest error, ties to the
/// smaller `n`) is returned with `met = false`.
///
/// The scan runs over ascending chunks; each chunk is searched in parallel
/// with an order-preserving reduction, so the answer equals the sequential
/// scan.
pub fn find_power(q: &ApproxQuery) -> Result<ApproxResult> {
    q.validate()?;
    let mut best: Option<(u64, f64)> = None;
    let mut lo = 1u64;
    let mut chunk = FIRST_CHUNK;
    while lo <= q.n_max {
        let hi = q.n_max.min(lo.saturating_add(chunk - 1));
        if let Some(n) = (lo..=hi)
            .into_par_iter()
            .find_first(|&n| q.err_at(n) <= q.eps)
        {
            return Ok(result_at(q, n));
        }
        let chunk_best = (lo..=hi)
            .into_par_iter()
            .map(|n| (n, q.err_at(n)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("nonempty chunk");
        if best.is_none_or(|(_, e)| chunk_best.1 < e) {
            best = Some(chunk_best);
        }
        if hi == q.n_max {
            break;
        }
        lo = hi + 1;
        chunk = (chunk * 2).min(MAX_CHUNK);
    }
    let (n, _) = best.expect("n_max >= 1");
    Ok(result_at(q, n))
}

fn result_at(q: &ApproxQuery, n: u64) -> ApproxResult {
    let p = power_params(q.base, n);
    let err = torus_dist(p.alpha, q.target_alpha).max(torus_dist(p.theta, q.target_theta));
    ApproxResult {
        n,
        achieved_alpha: p.alpha,
        achieved_theta: p.theta,
        err,
        met: err <= q.eps,
    }
}

/// One row of [`scaling_study`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub eps: f64,
    pub median_n: f64,
    pub max_n: u64,
    /// Largest achieved error among the trials.
    pub worst_err: f64,
    /// Trials that exhausted `n_max` without meeting `eps`.
    pub unmet: usize,
}

/// Uniform targets on `[0, 2π)²`, reproducible from `seed`.
pub fn random_targets(trials: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)))
        .collect()
}

/// For each tolerance, the median and maximum smallest-`n` over `trials`
/// random targets. The same target set is reused for every tolerance.
/// Unmet trials contribute `n_max` to the statistics and are counted in
/// `unmet`.
pub fn scaling_study(
    base: GateParams,
    eps_list: &[f64],
    trials: usize,
    seed: u64,
    n_max: u64,
) -> Result<Vec<ScalingRow>> {
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument("eps_list is empty".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let targets = random_targets(trials, seed);
    eps_list
        .iter()
        .map(|&eps| {
            let results = targets
                .iter()
                .map(|&(a, t)| find_power(&ApproxQuery::new(base, a, t, eps).with_n_max(n_max)))
                .collect::<Result<Vec<_>>>()?;
            let mut ns: Vec<u64> = results
                .iter()
                .map(|r| if r.met { r.n } else { n_max })
                .collect();
            ns.sort_unstable();
            Ok(ScalingRow {
                eps,
                median_n: median(&ns),
                max_n: *ns.last().expect("trials >= 1"),
                worst_err: results.iter().map(|r| r.err).fold(0.0, f64::max),
                unmet: results.iter().filter(|r| !r.met).count(),
            })
        })
        .collect()
}

fn median(sorted: &[u64]) -> f64 {
    let m = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[m] as f64
    } else {
        (sorted[m - 1] as f64 + sorted[m] as f64) / 2.0
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::a_matrix;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn power_params_arithmetic() {
        let p = GateParams::new(0.4, 2.0, 3.0);
        assert_eq!(power_params(p, 1), p);
        let q = power_params(GateParams::new(1.0, 5.0, 4.0), 2);
        assert_eq!(q.phi, 1.0);
        assert!((q.alpha - (10.0 - TAU)).abs() < 1e-15);
        assert!((q.theta - (8.0 - TAU)).abs() < 1e-15);
        assert!((q.alpha - 3.716_814_692_8).abs() < 1e-10);
    }

    #[test]
    fn mul_angle_agrees_with_stepwise_reduction() {
        // stepwise oracle: add one angle at a time, reducing each step in
        // compensated (two-term) arithmetic
        let x = DEFAULT_ALPHA;
        let (mut hi, mut lo) = (0.0f64, 0.0f64);
        for n in 1..=200_000u64 {
            let s = hi + x;
            let bp = s - hi;
            lo += (hi - (s - bp)) + (x - bp);
            hi = s;
            if hi >= TAU {
                hi -= TAU;
                lo -= TAU_LO;
            }
            if n % 10_007 == 0 || n == 200_000 {
                assert!(torus_dist(mul_angle(n, x), hi + lo) < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn inverse_params_cases() {
        let id = GateParams::new(0.3, 0.0, 0.0);
        assert_eq!(inverse_params(id), id);
        let p = GateParams::new(0.3, 1.7, 4.4);
        let back = inverse_params(inverse_params(p));
        assert!((back.alpha - p.alpha).abs() <= 1e-15);
        assert!((back.theta - p.theta).abs() <= 1e-15);
        let prod = a_matrix(inverse_params(p)).mul(&a_matrix(p)).unwrap();
        assert!(prod.frobenius_dist(&crate::CMat::identity(4)).unwrap() < 1e-12);
    }

    #[test]
    fn torus_dist_cases() {
        assert!((torus_dist(0.1, TAU - 0.1) - 0.2).abs() < 1e-15);
        assert_eq!(torus_dist(1.234, 1.234), 0.0);
        assert!((torus_dist(0.0, PI) - PI).abs() < 1e-15);
        assert!((torus_dist(-3.0 * TAU + 0.5, 0.4) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn find_power_hits_own_angles() {
        let base = default_base(0.5);
        let r = find_power(&ApproxQuery::new(base, base.alpha, base.theta, 1e-9)).unwrap();
        assert_eq!(r.n, 1);
        assert!(r.err < 1e-15 && r.met);
    }

    #[test]
    fn find_power_rejects_bad_queries() {
        let base = default_base(0.5);
        assert!(find_power(&ApproxQuery::new(base, 0.0, 0.0, 0.1).with_n_max(0)).is_err());
        assert!(find_power(&ApproxQuery::new(base, 0.0, 0.0, 0.0)).is_err());
        assert!(find_power(&ApproxQuery::new(base, 0.0, 0.0, -1.0)).is_err());
        assert!(find_power(&ApproxQuery::new(base, f64::NAN, 0.0, 0.1)).is_err());
    }

    fn naive_first_hit(
        alpha: f64,
        theta: f64,
        ta: f64,
        tt: f64,
        eps: f64,
        n_max: u64,
    ) -> Option<u64> {
        (1..=n_max).find(|&n| {
            let a = (n as f64 * alpha).rem_euclid(TAU);
            let t = (n as f64 * theta).rem_euclid(TAU);
            torus_dist(a, ta).max(torus_dist(t, tt)) <= eps
        })
    }

    #[test]
    fn golden_pair_returns_to_origin_at_fibonacci_power() {
        let base = GateParams::new(1.0, GOLDEN_ALPHA, GOLDEN_THETA);
        let oracle = naive_first_hit(base.alpha, base.theta, 0.0, 0.0, 0.05, 1_000_000).unwrap();
        assert_eq!(oracle, 89);
        let r = find_power(&ApproxQuery::new(base, 0.0, 0.0, 0.05)).unwrap();
        assert!(r.met);
        assert_eq!(r.n, oracle);
    }

    #[test]
    fn diagonal_orbit_cannot_leave_the_diagonal() {
        let a = TAU * 0.381_966_011_3;
        let base = GateParams::new(0.2, a, a);
        let eps = 0.05;
        let r = find_power(&ApproxQuery::new(base, 1.0, 2.0, eps).with_n_max(200_000)).unwrap();
        assert!(!r.met);
        // any point of the diagonal is at least half the gap away
        assert!(r.err >= torus_dist(1.0, 2.0) / 2.0 - 1e-12);
        assert!(naive_first_hit(a, a, 1.0, 2.0, eps, 200_000).is_none());
    }

    #[test]
    fn find_power_matches_sequential_scan() {
        let base = default_base(0.0);
        for (ta, tt) in random_targets(20, 9) {
            let eps = 0.08;
            let r = find_power(&ApproxQuery::new(base, ta, tt, eps)).unwrap();
            let seq = (1..=DEFAULT_N_MAX).find(|&n| {
                let p = power_params(base, n);
                torus_dist(p.alpha, ta).max(torus_dist(p.theta, tt)) <= eps
            });
            assert_eq!(Some(r.n), seq);
        }
    }

    #[test]
    fn unmet_result_reports_best_n() {
        let base = default_base(0.0);
        let q = ApproxQuery::new(base, 3.0, 1.0, 1e-6).with_n_max(5_000);
        let r = find_power(&q).unwrap();
        assert!(!r.met);
        let oracle = (1..=5_000u64)
            .map(|n| (n, q.err_at(n)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .unwrap();
        assert_eq!(r.n, oracle.0);
        assert_eq!(r.err, oracle.1);
    }

    #[test]
    fn scaling_study_large_eps_is_immediate() {
        let rows = scaling_study(default_base(0.0), &[PI], 10, 3, 1000).unwrap();
        assert_eq!(rows[0].median_n, 1.0);
        assert_eq!(rows[0].max_n, 1);
        assert!(scaling_study(default_base(0.0), &[], 10, 3, 1000).is_err());
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-2.0)).collect();
        assert!((loglog_slope(&xs, &ys) + 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn power_params_is_additive(
            alpha in 0.0..TAU, theta in 0.0..TAU, m in 0u64..100_000, n in 0u64..100_000
        ) {
            let p = GateParams::new(0.1, alpha, theta);
            let sum = power_params(p, m + n);
            let (pm, pn) = (power_params(p, m), power_params(p, n));
            prop_assert!(torus_dist(sum.alpha, pm.alpha + pn.alpha) < 1e-12);
            prop_assert!(torus_dist(sum.theta, pm.theta + pn.theta) < 1e-12);
        }

        #[test]
        fn larger_eps_never_needs_more_replicas(
            ta in 0.0..TAU, tt in 0.0..TAU, eps in 0.05f64..0.5, grow in 1.0f64..3.0
        ) {
            let base = default_base(0.0);
            let tight = find_power(&ApproxQuery::new(base, ta, tt, eps)).unwrap();
            let loose = find_power(&ApproxQuery::new(base, ta, tt, eps * grow)).unwrap();
            prop_assert!(tight.met);
            prop_assert!(loose.met && loose.n <= tight.n);
        }

        #[test]
        fn reported_err_matches_independent_recomputation(
            ta in 0.0..TAU, tt in 0.0..TAU, eps in 0.02f64..1.0
        ) {
            let base = default_base(0.3);
            let r = find_power(&ApproxQuery::new(base, ta, tt, eps)).unwrap();
            let a = (r.n as f64 * base.alpha).rem_euclid(TAU);
            let t = (r.n as f64 * base.theta).rem_euclid(TAU);
            let recomputed = torus_dist(a, ta).max(torus_dist(t, tt));
            prop_assert!((recomputed - r.err).abs() < 1e-9);
            prop_assert_eq!(r.met, r.err <= eps);
        }
    }
}
