//! Achievable boundary measures: upper bounds on the isoperimetric profile
//! from the two natural candidate families, centered balls and half-spaces,
//! plus a seeded Monte Carlo sampler for empirical cross-checks.

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::profile::{ProfileFn, ProfileKind};
use crate::quad::{integrate_exp_shifted, QuadraturePlan};
use crate::radial::RadialMeasure;
use crate::rootfind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessFamily {
    Halfspace,
    Ball,
}

impl std::fmt::Display for WitnessFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WitnessFamily::Halfspace => "halfspace",
            WitnessFamily::Ball => "ball",
        })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WitnessResult {
    pub a: f64,
    pub family: WitnessFamily,
    /// Threshold `t` for half-spaces, radius `r` for balls.
    pub parameter: f64,
    pub perimeter: f64,
}

/// Boundary measure of the centered ball of mass `a`. The full measure gives
/// mass to `{|x| <= r}` through the radial law, so the perimeter is the
/// radial density at the quantile.
pub fn ball_witness(m: &RadialMeasure, a: f64) -> Result<WitnessResult> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("ball witness needs a in (0,1), got {a}")));
    }
    let r = m.quantile(a)?;
    Ok(WitnessResult {
        a,
        family: WitnessFamily::Ball,
        parameter: r,
        perimeter: m.log_density(r)?.exp(),
    })
}

/// The 1-D marginal of the full measure, with unnormalized density
/// `g~(t) = int_0^inf s^(n-2) exp(-phi(sqrt(t^2+s^2))) ds` for `n >= 2`.
/// All evaluation happens in log space with a per-`t` peak shift.
pub struct Marginal {
    n: u32,
    potential: Potential,
    /// log of `2 int_0^inf g~(t) dt`.
    log_norm: f64,
    plan: QuadraturePlan,
}

impl Marginal {
    pub fn new(n: u32, potential: Potential, plan: QuadraturePlan) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("Marginal requires n >= 2; use the exact profile for n = 1".into()));
        }
        let mut m = Marginal {
            n,
            potential,
            log_norm: 0.0,
            plan,
        };
        // normalizer: peak of g~ is at t = 0 and g~ decreases in |t|
        let g0 = m.log_unnorm(0.0)?;
        let mut t_hi = 1.0;
        for _ in 0..200 {
            if m.log_unnorm(t_hi)? < g0 - 80.0 {
                break;
            }
            t_hi *= 2.0;
        }
        let seeds: Vec<f64> = (1..8).map(|k| t_hi * k as f64 / 8.0).collect();
        let half = integrate_exp_shifted(
            |t| m.log_unnorm(t).unwrap_or(f64::NEG_INFINITY),
            0.0,
            t_hi,
            g0,
            &seeds,
            &m.outer_plan(),
        )?;
        m.log_norm = g0 + half.ln() + std::f64::consts::LN_2;
        Ok(m)
    }

    /// Plan for integrals whose integrand is itself a quadrature result.
    /// Each evaluation carries relative noise near the inner tolerance, so an
    /// outer tolerance below that level only burns the subdivision budget.
    fn outer_plan(&self) -> QuadraturePlan {
        QuadraturePlan {
            rel_tol: (self.plan.rel_tol * 1e3).min(1e-4),
            ..self.plan
        }
    }

    /// `log g~(t)`, the unnormalized marginal log-density.
    fn log_unnorm(&self, t: f64) -> Result<f64> {
        let p = &self.potential;
        let nm2 = (self.n - 2) as f64;
        let tt = t.abs();
        let h = |s: f64| {
            if s <= 0.0 {
                if nm2 == 0.0 {
                    -p.eval_unchecked(tt)
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                nm2 * s.ln() - p.eval_unchecked((tt * tt + s * s).sqrt())
            }
        };
        // peak of h: s^2 phi'(rho)/rho = n-2, with rho = sqrt(t^2+s^2)
        let s_peak = if nm2 == 0.0 {
            0.0
        } else {
            let g = |s: f64| {
                let rho = (tt * tt + s * s).sqrt();
                s * s * p.deriv(rho).unwrap_or(f64::NAN) / rho - nm2
            };
            let (lo, hi) = rootfind::expand_upward(g, 1e-6, 1e12)?;
            rootfind::solve_bracketed(g, lo, hi, 1e-10, 1e-300)?
        };
        let shift = h(s_peak.max(1e-300)).max(h(s_peak.max(1.0)));
        let mut s_hi = s_peak.max(1.0) * 2.0;
        for _ in 0..200 {
            if h(s_hi) < shift - 80.0 {
                break;
            }
            s_hi *= 2.0;
        }
        let seeds = [0.5 * s_peak, s_peak, 2.0 * s_peak];
        let v = integrate_exp_shifted(h, 0.0, s_hi, shift, &seeds, &self.plan)?;
        Ok(shift + v.ln())
    }

    /// Normalized marginal density at `t`.
    pub fn density(&self, t: f64) -> Result<f64> {
        Ok((self.log_unnorm(t)? - self.log_norm).exp())
    }

    /// Upper-tail mass `int_t^inf g / N` for `t >= 0`.
    pub fn upper_tail(&self, t: f64) -> Result<f64> {
        debug_assert!(t >= 0.0);
        let peak = self.log_unnorm(t)?;
        let mut hi = t.max(1.0) * 2.0;
        for _ in 0..200 {
            if self.log_unnorm(hi)? < peak - 80.0 {
                break;
            }
            hi *= 2.0;
        }
        let seeds = [t + 0.25 * (hi - t), t + 0.5 * (hi - t)];
        let v = integrate_exp_shifted(
            |u| self.log_unnorm(u).unwrap_or(f64::NEG_INFINITY),
            t,
            hi,
            peak,
            &seeds,
            &self.outer_plan(),
        )?;
        Ok((peak + v.ln() - self.log_norm).exp())
    }

    /// `t >= 0` with upper-tail mass `a <= 1/2`, solved on the log scale.
    pub fn upper_quantile(&self, a: f64) -> Result<f64> {
        if !(a > 0.0 && a <= 0.5) {
            return Err(Error::Domain(format!("upper quantile needs a in (0, 1/2], got {a}")));
        }
        if a == 0.5 {
            return Ok(0.0);
        }
        let log_a = a.ln();
        let f = |t: f64| match self.upper_tail(t) {
            Ok(g) if g > 0.0 => g.ln() - log_a,
            _ => f64::NAN,
        };
        let mut hi = 1.0;
        for _ in 0..200 {
            let v = f(hi);
            if v.is_nan() {
                return Err(Error::Bracket(format!("marginal quantile bracket failed at t={hi}")));
            }
            if v < 0.0 {
                break;
            }
            hi *= 2.0;
        }
        rootfind::solve_bracketed(f, 0.0, hi, 1e-10, 1e-300)
    }
}

/// Boundary measure of the half-space `{x_1 <= t}` of mass `a`: the marginal
/// density at the marginal quantile. For `n = 1` this is the exact profile of
/// the two-sided measure.
pub fn halfspace_witness(n: u32, p: &Potential, a: f64, plan: QuadraturePlan) -> Result<WitnessResult> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("halfspace witness needs a in (0,1), got {a}")));
    }
    let a_sym = a.min(1.0 - a);
    if n == 1 {
        let prof = ProfileFn::new(ProfileKind::IPhi(p.clone()), plan)?;
        // threshold via the one-sided tail: G(|t|) = a_sym
        let log_a = a_sym.ln();
        let f = |x: f64| match prof.upper_tail(p, x) {
            Ok(g) if g > 0.0 => g.ln() - log_a,
            _ => f64::NAN,
        };
        let t_abs = if a_sym == 0.5 {
            0.0
        } else {
            let mut hi = 1.0;
            for _ in 0..200 {
                if f(hi) < 0.0 {
                    break;
                }
                hi *= 2.0;
            }
            rootfind::solve_bracketed(f, 0.0, hi, 1e-12, 1e-300)?
        };
        let t = if a <= 0.5 { -t_abs } else { t_abs };
        return Ok(WitnessResult {
            a,
            family: WitnessFamily::Halfspace,
            parameter: t,
            perimeter: prof.eval(a)?,
        });
    }
    let marginal = Marginal::new(n, p.clone(), plan)?;
    let t_abs = marginal.upper_quantile(a_sym)?;
    let t = if a <= 0.5 { -t_abs } else { t_abs };
    Ok(WitnessResult {
        a,
        family: WitnessFamily::Halfspace,
        parameter: t,
        perimeter: marginal.density(t_abs)?,
    })
}

/// `min` of the two witness perimeters: an upper bound on the isoperimetric
/// profile of the full measure at `a`.
pub fn upper_bound(n: u32, p: &Potential, a: f64, plan: QuadraturePlan) -> Result<f64> {
    let m = RadialMeasure::normalize(n, p.clone(), plan)?;
    let ball = ball_witness(&m, a)?;
    let half = halfspace_witness(n, p, a, plan)?;
    Ok(ball.perimeter.min(half.perimeter))
}

/// Draw `count` points of the full measure: `X = r theta` with `r` from the
/// radial law and `theta` uniform on the sphere. Deterministic given the
/// seed. The radial quantile is interpolated from a precomputed table, with
/// exact quantile calls reserved for the tails.
pub fn sample(m: &RadialMeasure, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count < 1 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    const TABLE: usize = 1024;
    let mut quantiles = Vec::with_capacity(TABLE - 1);
    for k in 1..TABLE {
        quantiles.push(m.quantile(k as f64 / TABLE as f64)?);
    }
    let n = m.n() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let pos = u * TABLE as f64;
        let k = pos.floor() as usize;
        let r = if k == 0 || k >= TABLE - 1 {
            m.quantile(u)?
        } else {
            let frac = pos - k as f64;
            quantiles[k - 1] * (1.0 - frac) + quantiles[k] * frac
        };
        let mut theta: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            theta[0] = 1.0;
        } else {
            for x in &mut theta {
                *x /= norm;
            }
        }
        out.push(theta.iter().map(|&x| x * r).collect());
    }
    Ok(out)
}
