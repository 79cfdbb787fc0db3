//! Comparison profiles on `[0, 1]`.
//!
//! * `IPhi` — the exact isoperimetric profile of the symmetric one-dimensional
//!   measure with density `exp(-phi(|x|)) / Z_phi` (half-lines are extremal,
//!   so it equals density-at-quantile).
//! * `LPhi` — the target shape `a log(1/a) / phi^-1(log(1/a))`.
//! * `LAlpha` — its power specialization `a (log 1/a)^(1-1/alpha)`.
//! * `GaussianIsoperimetric` — `pdf(inv_cdf(a))` of the standard normal.
//! * `CheegerLinear` — `min(a, 1-a)`.
//!
//! All profiles are symmetric in `a <-> 1-a` and return 0 at the endpoints.

use crate::error::{Error, Result};
use crate::gauss;
use crate::potential::Potential;
use crate::quad::{integrate_exp_shifted, QuadraturePlan};
use crate::rootfind;

#[derive(Clone, Debug)]
pub enum ProfileKind {
    IPhi(Potential),
    LPhi(Potential),
    LAlpha(f64),
    GaussianIsoperimetric,
    CheegerLinear,
}

#[derive(Clone, Debug)]
pub struct ProfileFn {
    kind: ProfileKind,
    /// For `IPhi`: log of `Z_phi / 2 = int_0^inf exp(-phi)`.
    log_half_z: f64,
    /// For `IPhi`: truncation for the upper-tail integral.
    x_cut: f64,
    plan: QuadraturePlan,
}

impl ProfileFn {
    pub fn new(kind: ProfileKind, plan: QuadraturePlan) -> Result<Self> {
        let (log_half_z, x_cut) = match &kind {
            ProfileKind::IPhi(p) => {
                // peak of exp(-phi) is at 0; truncate where phi > 80
                let x_cut = p.inverse(80.0)?;
                let seeds = [p.inverse(1.0)?, p.inverse(4.0)?, p.inverse(16.0)?];
                let half_z = integrate_exp_shifted(
                    |x| -p.eval_unchecked(x),
                    0.0,
                    x_cut,
                    0.0,
                    &seeds,
                    &plan,
                )?;
                (half_z.ln(), x_cut)
            }
            ProfileKind::LAlpha(alpha) => {
                if *alpha < 1.0 {
                    return Err(Error::Domain(format!("alpha must be >= 1, got {alpha}")));
                }
                (f64::NAN, f64::NAN)
            }
            _ => (f64::NAN, f64::NAN),
        };
        Ok(ProfileFn {
            kind,
            log_half_z,
            x_cut,
            plan,
        })
    }

    /// `Z_phi = 2 int_0^inf exp(-phi)` for the `IPhi` kind.
    pub fn z_phi(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::IPhi(_) => Some(2.0 * self.log_half_z.exp()),
            _ => None,
        }
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// Evaluate the profile at `a in [0, 1]`; endpoints return 0 by convention.
    pub fn eval(&self, a: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Domain(format!("profile argument a={a} not in [0,1]")));
        }
        let a_sym = a.min(1.0 - a);
        if a_sym == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            ProfileKind::IPhi(p) => {
                let x = self.upper_quantile(p, a_sym)?;
                Ok((-p.eval_unchecked(x) - std::f64::consts::LN_2 - self.log_half_z).exp())
            }
            ProfileKind::LPhi(p) => {
                let l = (1.0 / a_sym).ln();
                if l == 0.0 {
                    // a = 1/2 exactly: log 2 in the numerator, no singularity
                    unreachable!("a_sym <= 1/2 gives l >= log 2");
                }
                Ok(a_sym * l / p.inverse(l)?)
            }
            ProfileKind::LAlpha(alpha) => {
                let l = (1.0 / a_sym).ln();
                Ok(a_sym * l.powf(1.0 - 1.0 / alpha))
            }
            ProfileKind::GaussianIsoperimetric => {
                Ok(gauss::std_normal_pdf(gauss::std_normal_inv_cdf(a_sym)))
            }
            ProfileKind::CheegerLinear => Ok(a_sym),
        }
    }

    /// Upper-tail mass of the symmetric 1-D measure:
    /// `G(x) = int_x^inf exp(-phi) / Z_phi` for `x >= 0`.
    pub fn upper_tail(&self, p: &Potential, x: f64) -> Result<f64> {
        let peak = -p.eval_unchecked(x);
        let hi = self.x_cut.max(x + (p.inverse(p.eval_unchecked(x) + 80.0)? - x).max(1.0));
        let integral = integrate_exp_shifted(
            |u| -p.eval_unchecked(u),
            x,
            hi,
            peak,
            &[],
            &self.plan,
        )?;
        Ok((peak + integral.ln() - std::f64::consts::LN_2 - self.log_half_z).exp())
    }

    /// `x >= 0` with `G(x) = a`, for `a <= 1/2`. Solved on `log G` for
    /// relative accuracy down to `a ~ 1e-12`.
    fn upper_quantile(&self, p: &Potential, a: f64) -> Result<f64> {
        debug_assert!(a > 0.0 && a <= 0.5);
        let log_a = a.ln();
        let f = |x: f64| match self.upper_tail(p, x) {
            Ok(g) if g > 0.0 => g.ln() - log_a,
            _ => f64::NAN,
        };
        if a == 0.5 {
            return Ok(0.0);
        }
        // G(0) = 1/2 > a, G decreasing; expand until below.
        let mut hi = p.inverse((1.0 / a).ln())?.max(1.0);
        for _ in 0..200 {
            let v = f(hi);
            if v.is_nan() {
                return Err(Error::Bracket(format!(
                    "upper-tail quantile bracket failed at x={hi}"
                )));
            }
            if v < 0.0 {
                break;
            }
            hi *= 2.0;
        }
        rootfind::solve_bracketed(f, 0.0, hi, 1e-12, 1e-300)
    }
}

/// `L_phi(a) = a log(1/a) / phi^-1(log(1/a))` (symmetrized).
pub fn l_phi(p: &Potential, a: f64) -> Result<f64> {
    ProfileFn::new(ProfileKind::LPhi(p.clone()), QuadraturePlan::default())?.eval(a)
}

/// Exact profile of the symmetric 1-D measure built on `phi` (symmetrized).
pub fn i_phi(p: &Potential, a: f64) -> Result<f64> {
    ProfileFn::new(ProfileKind::IPhi(p.clone()), QuadraturePlan::default())?.eval(a)
}

/// The Gaussian isoperimetric function `pdf(inv_cdf(a))`.
pub fn gaussian_profile(a: f64) -> Result<f64> {
    ProfileFn::new(ProfileKind::GaussianIsoperimetric, QuadraturePlan::default())?.eval(a)
}

#[derive(Clone, Debug)]
pub struct ProfileRatioEstimate {
    pub d1_hat: f64,
    pub d2_hat: f64,
    /// Whether the potential passed the concavity-of-sqrt hypothesis the
    /// comparison is stated under.
    pub h1_prime_ok: bool,
}

/// Estimate the equivalence constants between `L_phi` and `I_phi`:
/// min and max of `L_phi(a) / I_phi(a)` over the grid, after rescaling the
/// potential so `phi(1) = 1` (profiles are homogeneous in the scaling, so the
/// ratio is scale-free anyway).
pub fn estimate_d1_d2(p: &Potential, a_grid: &[f64]) -> Result<ProfileRatioEstimate> {
    let p_unit = p.unit_normalized()?;
    let h1_prime_ok = p_unit.check_hypotheses(64, 16.0)?.h1_prime.holds();
    let plan = QuadraturePlan::default();
    let iphi = ProfileFn::new(ProfileKind::IPhi(p_unit.clone()), plan)?;
    let lphi = ProfileFn::new(ProfileKind::LPhi(p_unit), plan)?;
    let mut d1 = f64::INFINITY;
    let mut d2 = 0.0f64;
    for &a in a_grid {
        if !(a > 0.0 && a <= 0.5) {
            return Err(Error::Domain(format!("d1/d2 grid point a={a} not in (0, 1/2]")));
        }
        let ratio = lphi.eval(a)? / iphi.eval(a)?;
        d1 = d1.min(ratio);
        d2 = d2.max(ratio);
    }
    if !(d1.is_finite() && d1 > 0.0 && d2.is_finite()) {
        return Err(Error::Fit(format!("degenerate profile ratio: d1={d1}, d2={d2}")));
    }
    Ok(ProfileRatioEstimate {
        d1_hat: d1,
        d2_hat: d2,
        h1_prime_ok,
    })
}

/// The default geometric grid `{2^-1, ..., 2^-40}` for d1/d2 estimation.
pub fn default_d1_d2_grid() -> Vec<f64> {
    (1..=40).map(|k| 2.0f64.powi(-k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_phi_closed_forms() {
        let p2 = Potential::power(2.0);
        // a = e^-4: L = e^-4 * 4 / 2
        let a = (-4.0f64).exp();
        assert!((l_phi(&p2, a).unwrap() - 2.0 * a).abs() < 1e-14);
        // alpha = 1: L(a) = a
        let p1 = Potential::power(1.0);
        for &a in &[0.01, 0.2, 0.4] {
            assert!((l_phi(&p1, a).unwrap() - a).abs() < 1e-14);
        }
        // a = 1/2: log2/sqrt(log2)/2
        let want = 2.0f64.ln().sqrt() / 2.0;
        assert!((l_phi(&p2, 0.5).unwrap() - want).abs() < 1e-14);
        // endpoints return 0
        assert_eq!(l_phi(&p2, 0.0).unwrap(), 0.0);
        assert_eq!(l_phi(&p2, 1.0).unwrap(), 0.0);
        assert!(l_phi(&p2, 1.5).is_err());
    }

    #[test]
    fn i_phi_two_sided_exponential_is_linear() {
        let p1 = Potential::power(1.0);
        for &a in &[1e-6f64, 0.01, 0.25, 0.5, 0.75] {
            let want = a.min(1.0 - a);
            let got = i_phi(&p1, a).unwrap();
            assert!((got - want).abs() < 1e-10, "a={a}: got {got}, want {want}");
        }
    }

    #[test]
    fn i_phi_gaussian_midpoint() {
        // Z = sqrt(pi), I(1/2) = 1/sqrt(pi)
        let got = i_phi(&Potential::power(2.0), 0.5).unwrap();
        let want = 1.0 / std::f64::consts::PI.sqrt();
        assert!((got - want).abs() < 1e-10, "got {got}");
    }

    #[test]
    fn i_phi_symmetry() {
        let p = Potential::power(1.5);
        let lo = i_phi(&p, 0.3).unwrap();
        let hi = i_phi(&p, 0.7).unwrap();
        assert!((lo - hi).abs() < 1e-10);
    }

    #[test]
    fn gaussian_profile_values() {
        let got = gaussian_profile(0.5).unwrap();
        assert!((got - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        // a = Phi(-1) -> pdf(1)
        let a = gauss::std_normal_cdf(-1.0);
        assert!((gaussian_profile(a).unwrap() - gauss::std_normal_pdf(1.0)).abs() < 1e-12);
        // symmetry
        assert!((gaussian_profile(0.2).unwrap() - gaussian_profile(0.8).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn d1_d2_exponential_ratio_is_one() {
        let est = estimate_d1_d2(&Potential::power(1.0), &default_d1_d2_grid()).unwrap();
        assert!((est.d1_hat - 1.0).abs() < 1e-8, "d1={}", est.d1_hat);
        assert!((est.d2_hat - 1.0).abs() < 1e-8, "d2={}", est.d2_hat);
        assert!(est.h1_prime_ok);
    }

    #[test]
    fn d1_d2_gaussian_bounded() {
        let est = estimate_d1_d2(&Potential::power(2.0), &default_d1_d2_grid()).unwrap();
        assert!(est.d1_hat >= 0.5 && est.d2_hat <= 3.0, "{est:?}");
        assert!(est.d1_hat <= est.d2_hat);
    }

    #[test]
    fn profile_shape_invariants() {
        let plan = QuadraturePlan::default();
        for &alpha in &[1.0, 1.5, 2.0] {
            let j = ProfileFn::new(ProfileKind::IPhi(Potential::power(alpha)), plan).unwrap();
            let grid: Vec<f64> = (1..40).map(|i| i as f64 / 40.0).collect();
            let vals: Vec<f64> = grid.iter().map(|&a| j.eval(a).unwrap()).collect();
            for (i, &v) in vals.iter().enumerate() {
                assert!(v > 0.0, "alpha={alpha}, a={}", grid[i]);
            }
            // symmetry
            for i in 0..grid.len() {
                let k = grid.len() - 1 - i;
                assert!((vals[i] - vals[k]).abs() < 1e-10);
            }
            // midpoint concavity
            for i in 1..vals.len() - 1 {
                let mid = 0.5 * (vals[i - 1] + vals[i + 1]);
                assert!(vals[i] >= mid - 1e-9, "alpha={alpha}, i={i}");
            }
        }
    }

    #[test]
    fn z_phi_bounds_unit_normalized() {
        // 2(1 - 1/e) <= Z_phi <= 2(1 + 1/e) when phi(1) = 1
        for &alpha in &[1.0, 1.3, 1.7, 2.0] {
            let p = Potential::power(alpha).unit_normalized().unwrap();
            let j = ProfileFn::new(ProfileKind::IPhi(p), QuadraturePlan::default()).unwrap();
            let z = j.z_phi().unwrap();
            let e_inv = (-1.0f64).exp();
            assert!(z >= 2.0 * (1.0 - e_inv) - 1e-9, "alpha={alpha}: z={z}");
            assert!(z <= 2.0 * (1.0 + e_inv) + 1e-9, "alpha={alpha}: z={z}");
        }
    }

    #[test]
    fn l_phi_nondecreasing_on_lower_half() {
        for &alpha in &[1.0, 1.5, 2.0, 3.0] {
            let p = Potential::power(alpha).unit_normalized().unwrap();
            let j = ProfileFn::new(ProfileKind::LPhi(p), QuadraturePlan::default()).unwrap();
            let mut prev = 0.0;
            for i in 1..=100 {
                let a = 0.5 * i as f64 / 100.0;
                let v = j.eval(a).unwrap();
                assert!(v >= prev - 1e-12, "alpha={alpha}, a={a}");
                prev = v;
            }
        }
    }
}
