//! Adaptive Simpson quadrature for log-space integrands.
//!
//! All densities in this crate are handled as `exp(g(r) - shift)` where `g`
//! is the log-integrand and `shift` its maximum over the domain, so that the
//! exponentiated values stay in range even for `r^(n-1) e^{-phi(r)}` with
//! large `n`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadraturePlan {
    /// Relative tolerance of each panel integral.
    pub rel_tol: f64,
    /// Contributions below `exp(abs_tol_log)` (after peak shift) are treated as zero.
    pub abs_tol_log: f64,
    /// Total subdivision budget across all panels.
    pub max_subdivisions: u32,
}

impl Default for QuadraturePlan {
    fn default() -> Self {
        QuadraturePlan {
            rel_tol: 1e-10,
            abs_tol_log: -60.0,
            max_subdivisions: 2000,
        }
    }
}

struct Adapt<'a> {
    f: &'a dyn Fn(f64) -> f64,
    rel_tol: f64,
    abs_floor_per_unit: f64,
    budget: i64,
}

impl Adapt<'_> {
    fn simpson(&self, a: f64, fa: f64, fm: f64, fb: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    fn run(&mut self, a: f64, fa: f64, fm: f64, fb: f64, b: f64, whole: f64, depth: u32) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = self.simpson(a, fa, flm, fm, m);
        let right = self.simpson(m, fm, frm, fb, b);
        let err = (left + right - whole) / 15.0;
        let tol = self.rel_tol * (left + right).abs() + self.abs_floor_per_unit * (b - a);
        if err.abs() <= tol || depth >= 48 {
            return Ok(left + right + err);
        }
        self.budget -= 1;
        if self.budget < 0 {
            return Err(Error::Quadrature {
                achieved: err.abs(),
                requested: tol,
            });
        }
        Ok(self.run(a, fa, flm, fm, m, left, depth + 1)?
            + self.run(m, fm, frm, fb, b, right, depth + 1)?)
    }
}

/// Integrate `exp(log_f(x) - shift)` over `[a, b]`, subdividing first at the
/// given interior seed points. The caller supplies `shift` as (an upper bound
/// close to) the maximum of `log_f` on `[a, b]`.
pub fn integrate_exp_shifted(
    log_f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    shift: f64,
    seeds: &[f64],
    plan: &QuadraturePlan,
) -> Result<f64> {
    if !(b > a) {
        return Ok(0.0);
    }
    let f = |x: f64| {
        let v = log_f(x) - shift;
        if v < -745.0 {
            0.0
        } else {
            v.exp()
        }
    };
    let mut knots: Vec<f64> = Vec::with_capacity(seeds.len() + 2);
    knots.push(a);
    for &s in seeds {
        if s > a && s < b {
            knots.push(s);
        }
    }
    knots.push(b);
    knots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    knots.dedup();

    // First pass: crude Simpson estimates per panel, used to set an absolute
    // tolerance proportional to the global integral. Otherwise near-zero tail
    // panels are refined far past any useful precision.
    struct Panel {
        lo: f64,
        hi: f64,
        flo: f64,
        fmid: f64,
        fhi: f64,
        whole: f64,
    }
    let eff_rel = plan.rel_tol / 4.0;
    let mut panels = Vec::with_capacity(knots.len() - 1);
    let mut crude_total = 0.0;
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        crude_total += whole.abs();
        panels.push(Panel {
            lo,
            hi,
            flo,
            fmid,
            fhi,
            whole,
        });
    }
    let mut adapt = Adapt {
        f: &f,
        rel_tol: eff_rel,
        abs_floor_per_unit: (eff_rel * crude_total / (b - a)).max(plan.abs_tol_log.exp()),
        budget: plan.max_subdivisions as i64,
    };
    let mut total = 0.0;
    for p in &panels {
        total += adapt.run(p.lo, p.flo, p.fmid, p.fhi, p.hi, p.whole, 0)?;
    }
    Ok(total)
}
