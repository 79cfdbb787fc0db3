//! The radial potential `phi` and its hypothesis classes.
//!
//! `phi` is a non-decreasing convex function on `[0, inf)` with `phi(0) = 0`.
//! A scaling factor `lambda` is carried alongside so that the scaled
//! potential evaluates as `phi_lambda(x) = phi_base(lambda * x)`. Hypothesis
//! membership (H0, H1, H1', H2, H2') is decided numerically on a grid; the
//! verdicts are semi-decisions, not proofs.

use crate::error::{Error, Result};
use crate::rootfind;
use std::fmt;
use std::sync::Arc;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum PotentialKind {
    /// `phi(x) = x^alpha`, `alpha >= 1`.
    Power { alpha: f64 },
    /// Caller-supplied `phi` on `[0, inf)`, optionally with derivatives.
    Custom {
        eval: ScalarFn,
        deriv: Option<ScalarFn>,
        deriv2: Option<ScalarFn>,
    },
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialKind::Power { alpha } => write!(f, "Power {{ alpha: {alpha} }}"),
            PotentialKind::Custom { .. } => write!(f, "Custom {{ .. }}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Potential {
    kind: PotentialKind,
    lambda: f64,
}

const INV_RTOL: f64 = 1e-12;
const BRACKET_CAP: f64 = 1e300;

impl Potential {
    pub fn power(alpha: f64) -> Self {
        Self::power_scaled(alpha, 1.0)
    }

    pub fn power_scaled(alpha: f64, lambda: f64) -> Self {
        assert!(alpha >= 1.0, "alpha must be >= 1, got {alpha}");
        assert!(lambda > 0.0, "lambda must be positive, got {lambda}");
        Potential {
            kind: PotentialKind::Power { alpha },
            lambda,
        }
    }

    /// A custom potential; `eval` must satisfy `eval(0) = 0` (checked to 1e-12)
    /// and be finite on all of `[0, inf)`.
    pub fn custom(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: Option<ScalarFn>,
        deriv2: Option<ScalarFn>,
    ) -> Result<Self> {
        let at0 = eval(0.0);
        if at0.abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "custom potential must satisfy phi(0)=0, got {at0:e}"
            )));
        }
        Ok(Potential {
            kind: PotentialKind::Custom {
                eval: Arc::new(eval),
                deriv,
                deriv2,
            },
            lambda: 1.0,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            PotentialKind::Power { alpha } => Some(alpha),
            PotentialKind::Custom { .. } => None,
        }
    }

    /// Same base potential with a different scaling factor.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0, "lambda must be positive, got {lambda}");
        Potential {
            kind: self.kind.clone(),
            lambda,
        }
    }

    /// Rescaled so that `phi(1) = 1`, i.e. `lambda = phi_base^-1(1)`.
    pub fn unit_normalized(&self) -> Result<Self> {
        let base = self.with_lambda(1.0);
        let l = base.inverse(1.0)?;
        Ok(self.with_lambda(l))
    }

    /// `phi(lambda * x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain(format!("potential argument x={x} < 0")));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        let sx = self.lambda * x;
        match &self.kind {
            PotentialKind::Power { alpha } => {
                if sx == 0.0 {
                    0.0
                } else {
                    // powf computes via log-space internally; no premature overflow
                    sx.powf(*alpha)
                }
            }
            PotentialKind::Custom { eval, .. } => eval(sx),
        }
    }

    /// `phi^-1(y)`: the `x >= 0` with `phi(x) = y`. Small negative `y` from
    /// roundoff clamps to 0.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y < -1e-12 {
            return Err(Error::Domain(format!("inverse argument y={y} < 0")));
        }
        let y = y.max(0.0);
        if y == 0.0 {
            return Ok(0.0);
        }
        match self.kind {
            PotentialKind::Power { alpha } => Ok((y.ln() / alpha).exp() / self.lambda),
            PotentialKind::Custom { .. } => {
                let f = |x: f64| self.eval_unchecked(x) - y;
                let (lo, hi) = rootfind::expand_upward(&f, 0.0, BRACKET_CAP)
                    .map_err(|_| Error::UnboundedInverse(y))?;
                let x = rootfind::solve_bracketed(&f, lo, hi, INV_RTOL, 1e-300)?;
                Ok(x)
            }
        }
    }

    /// `phi'` at `x > 0` (with respect to `x`, chain rule over `lambda`).
    pub fn deriv(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Err(Error::Domain(format!("derivative argument x={x} <= 0")));
        }
        let sx = self.lambda * x;
        match &self.kind {
            PotentialKind::Power { alpha } => Ok(self.lambda * alpha * sx.powf(alpha - 1.0)),
            PotentialKind::Custom { deriv, eval, .. } => match deriv {
                Some(d) => Ok(self.lambda * d(sx)),
                None => {
                    let h = sx.abs().max(1.0) * f64::EPSILON.powf(1.0 / 3.0);
                    let lo = (sx - h).max(0.0);
                    Ok(self.lambda * (eval(sx + h) - eval(lo)) / (sx + h - lo))
                }
            },
        }
    }

    /// `phi''` at `x > 0`.
    pub fn deriv2(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Err(Error::Domain(format!("derivative argument x={x} <= 0")));
        }
        let sx = self.lambda * x;
        let l2 = self.lambda * self.lambda;
        match &self.kind {
            PotentialKind::Power { alpha } => {
                if *alpha == 1.0 {
                    return Ok(0.0);
                }
                Ok(l2 * alpha * (alpha - 1.0) * sx.powf(alpha - 2.0))
            }
            PotentialKind::Custom { deriv2, eval, .. } => match deriv2 {
                Some(d2) => Ok(l2 * d2(sx)),
                None => {
                    let h = sx.abs().max(1.0) * f64::EPSILON.powf(0.25);
                    if sx - h < 0.0 {
                        let (f0, f1, f2) = (eval(sx), eval(sx + h), eval(sx + 2.0 * h));
                        return Ok(l2 * (f2 - 2.0 * f1 + f0) / (h * h));
                    }
                    let (fm, f0, fp) = (eval(sx - h), eval(sx), eval(sx + h));
                    Ok(l2 * (fp - 2.0 * f0 + fm) / (h * h))
                }
            },
        }
    }
}

/// Verdict of a grid-based hypothesis check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict {
    Holds,
    Fails { witness_x: f64 },
    Undetermined,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Clone, Debug)]
pub struct HypothesisReport {
    pub h0: Verdict,
    pub h1: Verdict,
    pub h1_prime: Verdict,
    pub h2: Verdict,
    pub h2_prime: Verdict,
    /// The exponent found for H2', when H2' holds.
    pub alpha_h2prime: Option<f64>,
    /// Abscissae the verdicts were evaluated on.
    pub grid: Vec<f64>,
    pub rel_tol: f64,
}

const HYP_TOL: f64 = 1e-9;

/// Monotonicity of a sequence up to relative tolerance. Returns
/// (non_increasing, non_decreasing, first violating index for each).
fn monotonicity(vals: &[f64], tol: f64) -> (bool, Option<usize>, bool, Option<usize>) {
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut non_inc = true;
    let mut non_dec = true;
    let (mut inc_w, mut dec_w) = (None, None);
    for i in 1..vals.len() {
        let d = vals[i] - vals[i - 1];
        if d > tol * scale && non_inc {
            non_inc = false;
            inc_w = Some(i);
        }
        if d < -tol * scale && non_dec {
            non_dec = false;
            dec_w = Some(i);
        }
    }
    (non_inc, inc_w, non_dec, dec_w)
}

impl Potential {
    /// Decide hypothesis membership on a geometric grid in `(0, x_max]`.
    pub fn check_hypotheses(&self, grid_size: usize, x_max: f64) -> Result<HypothesisReport> {
        if grid_size < 16 {
            return Err(Error::Domain(format!(
                "grid_size must be >= 16, got {grid_size}"
            )));
        }
        if !(x_max > 0.0) {
            return Err(Error::Domain(format!("x_max must be positive, got {x_max}")));
        }
        // Four decades below x_max.
        let x_min = x_max * 1e-4;
        let grid: Vec<f64> = (0..grid_size)
            .map(|i| {
                let t = i as f64 / (grid_size - 1) as f64;
                x_min * (x_max / x_min).powf(t)
            })
            .collect();

        let phi: Vec<f64> = grid.iter().map(|&x| self.eval_unchecked(x)).collect();
        if phi.iter().any(|v| !v.is_finite()) {
            return Ok(HypothesisReport {
                h0: Verdict::Undetermined,
                h1: Verdict::Undetermined,
                h1_prime: Verdict::Undetermined,
                h2: Verdict::Undetermined,
                h2_prime: Verdict::Undetermined,
                alpha_h2prime: None,
                grid,
                rel_tol: HYP_TOL,
            });
        }

        // H0: phi non-decreasing and divided-difference slopes non-decreasing.
        let h0 = {
            let (_, _, phi_nondec, phi_w) = monotonicity(&phi, HYP_TOL);
            let slopes: Vec<f64> = (1..grid.len())
                .map(|i| (phi[i] - phi[i - 1]) / (grid[i] - grid[i - 1]))
                .collect();
            let (_, _, slopes_nondec, slope_w) = monotonicity(&slopes, HYP_TOL);
            if !phi_nondec {
                Verdict::Fails {
                    witness_x: grid[phi_w.unwrap()],
                }
            } else if !slopes_nondec {
                Verdict::Fails {
                    witness_x: grid[slope_w.unwrap() + 1],
                }
            } else {
                Verdict::Holds
            }
        };

        // H1 / H2: monotonicity of sqrt(phi)/x.
        let g: Vec<f64> = grid
            .iter()
            .zip(&phi)
            .map(|(&x, &p)| p.max(0.0).sqrt() / x)
            .collect();
        let (g_noninc, g_inc_w, g_nondec, g_dec_w) = monotonicity(&g, HYP_TOL);
        let h1 = if g_noninc {
            Verdict::Holds
        } else {
            Verdict::Fails {
                witness_x: grid[g_inc_w.unwrap()],
            }
        };
        let h2 = if g_nondec {
            Verdict::Holds
        } else {
            Verdict::Fails {
                witness_x: grid[g_dec_w.unwrap()],
            }
        };

        // H1': concavity of sqrt(phi), via slopes of the chord sequence
        // anchored at 0 and between grid points.
        let h1_prime = {
            let sq: Vec<f64> = phi.iter().map(|&p| p.max(0.0).sqrt()).collect();
            let slopes: Vec<f64> = (1..grid.len())
                .map(|i| (sq[i] - sq[i - 1]) / (grid[i] - grid[i - 1]))
                .collect();
            let (slopes_noninc, w, _, _) = monotonicity(&slopes, HYP_TOL);
            if slopes_noninc {
                Verdict::Holds
            } else {
                Verdict::Fails {
                    witness_x: grid[w.unwrap() + 1],
                }
            }
        };

        // H2': H2 plus some alpha in {2, 2.5, ..., 8} with phi(x)/x^alpha
        // non-increasing.
        let mut alpha_h2prime = None;
        let h2_prime = if !h2.holds() {
            match h2 {
                Verdict::Fails { witness_x } => Verdict::Fails { witness_x },
                v => v,
            }
        } else {
            let mut found = None;
            let mut alpha = 2.0;
            while alpha <= 8.0 + 1e-12 {
                let ratio: Vec<f64> = grid
                    .iter()
                    .zip(&phi)
                    .map(|(&x, &p)| (p.max(1e-300).ln() - alpha * x.ln()).exp())
                    .collect();
                let (noninc, _, _, _) = monotonicity(&ratio, HYP_TOL);
                if noninc {
                    found = Some(alpha);
                    break;
                }
                alpha += 0.5;
            }
            match found {
                Some(a) => {
                    alpha_h2prime = Some(a);
                    Verdict::Holds
                }
                // H2 holds but no exponent in the finite search set worked;
                // existence is not disproved.
                None => Verdict::Undetermined,
            }
        };

        Ok(HypothesisReport {
            h0,
            h1,
            h1_prime,
            h2,
            h2_prime,
            alpha_h2prime,
            grid,
            rel_tol: HYP_TOL,
        })
    }
}

/// One inequality of the scaling lemma, with its evaluated slack.
#[derive(Clone, Debug)]
pub struct InequalityCheck {
    pub name: &'static str,
    /// `(lhs - rhs) / max(1, |rhs|)` signed so that `slack >= 0` means the
    /// inequality holds.
    pub slack: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct ScalingLemmaReport {
    pub checks: Vec<InequalityCheck>,
    pub h1_applied: bool,
    pub h2_applied: bool,
}

impl ScalingLemmaReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check_ge(name: &'static str, lhs: f64, rhs: f64) -> InequalityCheck {
    let slack = (lhs - rhs) / rhs.abs().max(1.0);
    InequalityCheck {
        name,
        slack,
        pass: slack >= -1e-9,
    }
}

impl Potential {
    /// Evaluate the scaling inequalities (`phi(tx) >= t phi(x)` and friends)
    /// applicable to the detected hypothesis class, at a single `(t, x)`.
    pub fn scaling_lemma_check(&self, t: f64, x: f64) -> Result<ScalingLemmaReport> {
        if t < 1.0 {
            return Err(Error::Domain(format!("t must be >= 1, got {t}")));
        }
        if x <= 0.0 {
            return Err(Error::Domain(format!("x must be positive, got {x}")));
        }
        let report = self.check_hypotheses(64, (4.0 * t * x).max(10.0))?;
        let phi_x = self.eval(x)?;
        let phi_tx = self.eval(t * x)?;
        let dphi_x = self.deriv(x)?;
        let y = phi_x;
        let inv_y = self.inverse(y)?;
        let inv_ty = self.inverse(t * y)?;

        let mut checks = Vec::new();
        // H0 chain.
        checks.push(check_ge("h0: phi(tx) >= t*phi(x)", phi_tx, t * phi_x));
        checks.push(check_ge("h0: t*inv(y) >= inv(t*y)", t * inv_y, inv_ty));
        checks.push(check_ge("h0: x*phi'(x) >= phi(x)", x * dphi_x, phi_x));

        let h1_applied = report.h1.holds();
        if h1_applied {
            let dphi_tx = self.deriv(t * x)?;
            checks.push(check_ge("h1: phi(tx) >= t*phi(x)", phi_tx, t * phi_x));
            checks.push(check_ge("h1: t^2*phi(x) >= phi(tx)", t * t * phi_x, phi_tx));
            checks.push(check_ge(
                "h1: inv(t*y) >= sqrt(t)*inv(y)",
                inv_ty,
                t.sqrt() * inv_y,
            ));
            checks.push(check_ge("h1: t*inv(y) >= inv(t*y)", t * inv_y, inv_ty));
            checks.push(check_ge("h1: x*phi'(x) >= phi(x)", x * dphi_x, phi_x));
            checks.push(check_ge("h1: 2*phi(x) >= x*phi'(x)", 2.0 * phi_x, x * dphi_x));
            checks.push(check_ge("h1: 2t*phi'(x) >= phi'(tx)", 2.0 * t * dphi_x, dphi_tx));
        }
        let h2_applied = report.h2.holds();
        if h2_applied {
            checks.push(check_ge("h2: phi(tx) >= t^2*phi(x)", phi_tx, t * t * phi_x));
            checks.push(check_ge(
                "h2: sqrt(t)*inv(y) >= inv(t*y)",
                t.sqrt() * inv_y,
                inv_ty,
            ));
            checks.push(check_ge("h2: x*phi'(x) >= 2*phi(x)", x * dphi_x, 2.0 * phi_x));
        }
        Ok(ScalingLemmaReport {
            checks,
            h1_applied,
            h2_applied,
        })
    }
}
