//! The radial law with density proportional to `r^(n-1) exp(-phi(r))` on
//! `[0, inf)`.
//!
//! Everything is computed through the log-density with a peak shift at the
//! mode, so dimensions in the hundreds stay in floating-point range. The
//! truncation radius comes from the closed-form tail bound
//! `F(r) = (e r / phi^-1(n))^n exp(-phi(r))`, which quantifies the mass left
//! out (below `e^-50`).

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quad::{integrate_exp_shifted, QuadraturePlan};
use crate::rootfind;

#[derive(Clone, Debug)]
pub struct RadialMeasure {
    n: u32,
    potential: Potential,
    log_z_rad: f64,
    r_max: f64,
    r_mode: f64,
    inv_n: f64,
    inv_2n: f64,
    plan: QuadraturePlan,
}

/// Envelope fit of the concentration inequality
/// `p(delta) <= C1 exp(-c1 n delta^2)`.
#[derive(Clone, Debug)]
pub struct TailFit {
    pub c1_hat: f64,
    pub c1_big_hat: f64,
    /// `log p(delta_i) - (log C1 - c1 n delta_i^2)`, all `<= 0` by construction.
    pub residuals: Vec<f64>,
}

impl RadialMeasure {
    /// Normalize the measure: locate the mode, pick the truncation radius from
    /// the tail bound, and compute the log-normalizer by adaptive quadrature
    /// in shifted log-space.
    pub fn normalize(n: u32, potential: Potential, plan: QuadraturePlan) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("dimension n must be >= 1".into()));
        }
        let nf = n as f64;
        let inv_n = potential.inverse(nf)?;
        let inv_2n = potential.inverse(2.0 * nf)?;

        let r_mode = solve_density_peak(&potential, nf - 1.0)?;

        // Truncation: smallest power-of-two multiple past phi^-1(2n) where the
        // closed-form tail bound drops below e^-55.
        let mut r_max = inv_2n.max(2.0 * r_mode).max(inv_n);
        for _ in 0..200 {
            let lf = log_tail_bound_formula(&potential, nf, inv_n, r_max)?;
            if lf < -55.0 {
                break;
            }
            r_max *= 2.0;
        }

        let log_f = |r: f64| log_radial_weight(&potential, nf, r);
        let peak = if n == 1 { 0.0 } else { log_f(r_mode) };
        let seeds = [0.5 * r_mode, r_mode, 2.0 * r_mode, inv_n, inv_2n];
        let integral = integrate_exp_shifted(log_f, 0.0, r_max, peak, &seeds, &plan)?;
        let log_z_rad = peak + integral.ln();

        Ok(RadialMeasure {
            n,
            potential,
            log_z_rad,
            r_max,
            r_mode,
            inv_n,
            inv_2n,
            plan,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn log_z_rad(&self) -> f64 {
        self.log_z_rad
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// `phi^-1(n)`, cached.
    pub fn inv_n(&self) -> f64 {
        self.inv_n
    }

    /// `phi^-1(2n)`, cached.
    pub fn inv_2n(&self) -> f64 {
        self.inv_2n
    }

    /// Maximizer of the density: the root of `r phi'(r) = n - 1` for `n >= 2`,
    /// and 0 for `n = 1`.
    pub fn mode(&self) -> f64 {
        self.r_mode
    }

    /// `(n-1) log r - phi(r) - log Z`.
    pub fn log_density(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::Domain(format!("density argument r={r} <= 0")));
        }
        Ok(log_radial_weight(&self.potential, self.n as f64, r) - self.log_z_rad)
    }

    pub fn cdf(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::Domain(format!("cdf argument r={r} < 0")));
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        if r >= self.r_max {
            return Ok(1.0);
        }
        let nf = self.n as f64;
        let log_f = |x: f64| log_radial_weight(&self.potential, nf, x);
        let peak = if self.n == 1 { 0.0 } else { log_f(self.r_mode) };
        let seeds = [0.5 * self.r_mode, self.r_mode, 2.0 * self.r_mode, self.inv_n];
        let integral = integrate_exp_shifted(log_f, 0.0, r, peak, &seeds, &self.plan)?;
        Ok((peak + integral.ln() - self.log_z_rad).exp().min(1.0))
    }

    /// Upper-tail mass. Evaluated by direct quadrature on `[r, ..)` past the
    /// mode for relative accuracy in the deep tail, `1 - cdf` otherwise.
    pub fn tail(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::Domain(format!("tail argument r={r} < 0")));
        }
        if r <= self.r_mode || r == 0.0 {
            return Ok((1.0 - self.cdf(r)?).max(0.0));
        }
        let nf = self.n as f64;
        let log_f = |x: f64| log_radial_weight(&self.potential, nf, x);
        let peak = log_f(r);
        // log-weight is decreasing past the mode; stop once 80 nats down.
        let mut hi = self.r_max.max(2.0 * r);
        for _ in 0..200 {
            if log_f(hi) < peak - 80.0 {
                break;
            }
            hi *= 2.0;
        }
        let integral = integrate_exp_shifted(log_f, r, hi, peak, &[1.5 * r, 2.0 * r], &self.plan)?;
        Ok((peak + integral.ln() - self.log_z_rad).exp().min(1.0))
    }

    /// Inverse of the CDF on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile argument u={u} not in (0,1)")));
        }
        rootfind::solve_bracketed(
            |r| self.cdf(r).unwrap_or(f64::NAN) - u,
            0.0,
            self.r_max,
            1e-12,
            1e-300,
        )
    }

    /// Closed-form tail bound `(e r / phi^-1(n))^n exp(-phi(r))`, valid for
    /// `r >= phi^-1(2n)`.
    pub fn tail_bound(&self, r: f64) -> Result<f64> {
        if r < self.inv_2n * (1.0 - 1e-12) {
            return Err(Error::Domain(format!(
                "tail bound requires r >= phi^-1(2n) = {:.6e}, got {r:.6e}",
                self.inv_2n
            )));
        }
        Ok(self.log_tail_bound(r)?.exp())
    }

    pub fn log_tail_bound(&self, r: f64) -> Result<f64> {
        log_tail_bound_formula(&self.potential, self.n as f64, self.inv_n, r)
    }

    /// `E[r^k]` by quadrature.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k < 1 {
            return Err(Error::Domain("moment order k must be >= 1".into()));
        }
        let nf = self.n as f64;
        let kf = k as f64;
        let log_f = |r: f64| {
            if r <= 0.0 {
                f64::NEG_INFINITY
            } else {
                (kf + nf - 1.0) * r.ln() - self.potential.eval_unchecked(r)
            }
        };
        let r_peak = solve_density_peak(&self.potential, nf + kf - 1.0)?.max(1e-300);
        let peak = log_f(r_peak);
        let mut hi = self.r_max.max(2.0 * r_peak);
        for _ in 0..200 {
            if log_f(hi) < peak - 80.0 {
                break;
            }
            hi *= 2.0;
        }
        let seeds = [0.5 * r_peak, r_peak, 2.0 * r_peak, self.inv_n];
        let integral = integrate_exp_shifted(log_f, 0.0, hi, peak, &seeds, &self.plan)?;
        Ok((peak + integral.ln() - self.log_z_rad).exp())
    }

    /// Total mass by quadrature over the truncated support; equals 1 up to the
    /// quadrature tolerance. Exposed for invariant checks.
    pub fn total_mass(&self) -> Result<f64> {
        self.cdf(self.r_max * (1.0 - 1e-15))
    }

    /// Envelope fit of two-sided concentration around the mode:
    /// `p(delta) = nu{ |r - r0| >= delta r0 }` against `C1 exp(-c1 n delta^2)`.
    pub fn concentration_fit(&self, deltas: &[f64]) -> Result<TailFit> {
        if self.n < 2 {
            return Err(Error::Fit("concentration fit requires n >= 2".into()));
        }
        if deltas.is_empty() {
            return Err(Error::Fit("empty delta grid".into()));
        }
        let nf = self.n as f64;
        let c1_big: f64 = 1.0 + 1e-9;
        let log_c1_big = c1_big.ln();
        let mut c1 = f64::INFINITY;
        let mut log_ps = Vec::with_capacity(deltas.len());
        for &d in deltas {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::Fit(format!("delta={d} outside (0,1]")));
            }
            let p = self.outside_mass(d)?;
            if p <= 0.0 {
                return Err(Error::Fit(format!("p(delta) underflowed at delta={d}")));
            }
            let lp = p.ln();
            log_ps.push(lp);
            c1 = c1.min((log_c1_big - lp) / (nf * d * d));
        }
        if !c1.is_finite() {
            return Err(Error::Fit("degenerate concentration fit".into()));
        }
        // The slope fit only pins the envelope at the grid points; p(delta)
        // can bulge above the line between them. Sweep a dense grid and lift
        // the intercept by the worst excess so the pair is a true envelope.
        let mut log_c1_big = log_c1_big;
        let d_max = deltas.iter().cloned().fold(0.0f64, f64::max);
        for i in 1..=160 {
            let d = d_max * i as f64 / 160.0;
            let p = self.outside_mass(d)?;
            if p > 0.0 {
                let excess = p.ln() - (log_c1_big - c1 * nf * d * d);
                if excess > 0.0 {
                    log_c1_big += excess;
                }
            }
        }
        let c1_big = log_c1_big.exp();
        let residuals = deltas
            .iter()
            .zip(&log_ps)
            .map(|(&d, &lp)| lp - (log_c1_big - c1 * nf * d * d))
            .collect();
        Ok(TailFit {
            c1_hat: c1,
            c1_big_hat: c1_big,
            residuals,
        })
    }

    /// `nu{ |r - r0| >= delta r0 }` by quadrature.
    pub fn outside_mass(&self, delta: f64) -> Result<f64> {
        let r0 = self.r_mode;
        let below = self.cdf((r0 * (1.0 - delta)).max(0.0))?;
        let above = self.tail(r0 * (1.0 + delta))?;
        Ok((below + above).min(1.0))
    }

    /// The scaling `lambda*` making the spherical measure built on this radial
    /// law isotropic: second moment equal to `n`.
    pub fn isotropic_lambda(n: u32, potential: &Potential, plan: QuadraturePlan) -> Result<f64> {
        let nf = n as f64;
        let base = RadialMeasure::normalize(n, potential.clone(), plan)?;
        let m2 = base.moment(2)?;
        // Exact scaling m2 ~ lambda^-2 gives the answer directly; the root
        // finder below confirms it for potentials where eval is not an exact
        // homothety in floating point.
        let guess = potential.lambda() * (m2 / nf).sqrt();
        let f = |log_l: f64| -> f64 {
            let p = potential.with_lambda(log_l.exp());
            match RadialMeasure::normalize(n, p, plan).and_then(|m| m.moment(2)) {
                Ok(v) => v.ln() - nf.ln(),
                Err(_) => f64::NAN,
            }
        };
        let t = guess.ln();
        let (mut lo, mut hi) = (t - 0.05, t + 0.05);
        // f is decreasing in log lambda; widen if the guess was off.
        for _ in 0..60 {
            if f(lo) > 0.0 {
                break;
            }
            lo -= 0.5;
        }
        for _ in 0..60 {
            if f(hi) < 0.0 {
                break;
            }
            hi += 0.5;
        }
        let root = rootfind::solve_bracketed(f, lo, hi, 1e-10, 1e-12)?;
        Ok(root.exp())
    }
}

fn log_radial_weight(p: &Potential, nf: f64, r: f64) -> f64 {
    if r < 0.0 {
        return f64::NEG_INFINITY;
    }
    if r == 0.0 {
        return if nf == 1.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    (nf - 1.0) * r.ln() - p.eval_unchecked(r)
}

fn log_tail_bound_formula(p: &Potential, nf: f64, inv_n: f64, r: f64) -> Result<f64> {
    Ok(nf * (1.0 + r.ln() - inv_n.ln()) - p.eval(r)?)
}

/// Root of `r phi'(r) = target` (the density peak equation); 0 when
/// `target <= 0`.
fn solve_density_peak(p: &Potential, target: f64) -> Result<f64> {
    if target <= 0.0 {
        return Ok(0.0);
    }
    let f = |r: f64| match p.deriv(r) {
        Ok(d) => r * d - target,
        Err(_) => f64::NAN,
    };
    let start = p.inverse(target)?.max(1e-12) * 1e-6;
    let (lo, hi) = rootfind::expand_upward(&f, start, 1e300)?;
    rootfind::solve_bracketed(&f, lo, hi, 1e-12, 1e-300)
}
