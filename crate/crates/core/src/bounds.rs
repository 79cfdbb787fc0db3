//! Certified lower bounds on the isoperimetric profiles of the radial measure
//! `nu_{n,phi}` and of the full measure `mu_{n,phi}`.
//!
//! Every bound is returned as a [`BoundCertificate`]: the value, the route
//! that produced it, the constants it consumed (with provenance), and its
//! preconditions with pass/fail status. A failed precondition yields value 0,
//! a vacuously true bound, never an abort; batch sweeps rely on this.

use crate::error::{Error, Result};
use crate::ledger::{ConstantsLedger, Provenance};
use crate::potential::Potential;
use crate::profile::{self, ProfileFn, ProfileKind};
use crate::quad::QuadraturePlan;
use crate::radial::RadialMeasure;
use crate::rootfind;
use serde::Serialize;
use std::f64::consts::LN_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    BobkovDirect,
    PropNuBig,
    PropSmallH0,
    PropSmallH2,
    Tensorized,
    TheoremMuphi,
    TheoremMualpha,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Route::BobkovDirect => "bobkov_direct",
            Route::PropNuBig => "prop_nu_big",
            Route::PropSmallH0 => "prop_small_h0",
            Route::PropSmallH2 => "prop_small_h2",
            Route::Tensorized => "tensorized",
            Route::TheoremMuphi => "theorem_muphi",
            Route::TheoremMualpha => "theorem_mualpha",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantUse {
    pub name: String,
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidityCheck {
    pub condition: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCertificate {
    pub a: f64,
    pub value: f64,
    pub route: Route,
    pub constants_used: Vec<ConstantUse>,
    pub validity: Vec<ValidityCheck>,
}

impl BoundCertificate {
    fn new(a: f64, route: Route) -> Self {
        BoundCertificate {
            a,
            value: 0.0,
            route,
            constants_used: Vec::new(),
            validity: Vec::new(),
        }
    }

    fn constant(&mut self, name: &str, value: f64, provenance: Provenance) {
        self.constants_used.push(ConstantUse {
            name: name.to_string(),
            value,
            provenance,
        });
    }

    fn check(&mut self, condition: String, pass: bool) {
        self.validity.push(ValidityCheck { condition, pass });
    }

    pub fn valid(&self) -> bool {
        self.validity.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

/// The raw ball inequality: for log-concave `mu` and a set of mass `a`,
/// `2 r mu+(dA) >= a log(1/a) + (1-a) log(1/(1-a)) + log mu{|x-x0| <= r}`.
/// The caller supplies `log_ball = log mu{|x-x0| <= r}`. Clamped at 0 when
/// the bracket is negative: the bound then holds vacuously.
pub fn bobkov_bound(a: f64, r: f64, log_ball: f64) -> f64 {
    assert!(a > 0.0 && a < 1.0 && r > 0.0);
    let entropy = a * (1.0 / a).ln() + (1.0 - a) * (1.0 / (1.0 - a)).ln();
    ((entropy + log_ball) / (2.0 * r)).max(0.0)
}

/// Optimize the ball inequality over the ball radius (40-point log grid plus
/// golden-section refinement) and center `x0` in `{0, r_mode}`.
pub fn bobkov_optimize(nu: &RadialMeasure, a: f64) -> Result<BoundCertificate> {
    if !(a > 0.0 && a <= 0.5) {
        return Err(Error::Domain(format!("bobkov_optimize needs a in (0, 1/2], got {a}")));
    }
    let n = nu.n() as f64;
    let r0 = nu.mode();
    let mut lo = r0 / n;
    if !(lo > 0.0) {
        lo = nu.inv_n() * 1e-3;
    }
    let hi = 4.0 * nu.inv_2n();
    let centers = [0.0, r0];

    let log_ball = |x0: f64, r: f64| -> Result<f64> {
        let upper = nu.cdf(x0 + r)?;
        let lower = if x0 - r > 0.0 { nu.cdf(x0 - r)? } else { 0.0 };
        let mass = (upper - lower).max(0.0);
        Ok(if mass > 0.0 { mass.ln() } else { f64::NEG_INFINITY })
    };
    let objective = |x0: f64, r: f64| -> Result<f64> {
        let lb = log_ball(x0, r)?;
        Ok(if lb.is_finite() { bobkov_bound(a, r, lb) } else { 0.0 })
    };

    let mut best = (0.0f64, centers[0], lo);
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    for &x0 in &centers {
        for i in 0..40 {
            let r = (ln_lo + (ln_hi - ln_lo) * i as f64 / 39.0).exp();
            let v = objective(x0, r)?;
            if v > best.0 {
                best = (v, x0, r);
            }
        }
    }
    // golden-section refinement on ln r around the best grid point
    if best.0 > 0.0 {
        let (_, x0, r_star) = best;
        let step = (ln_hi - ln_lo) / 39.0;
        let (mut a_ln, mut b_ln) = (r_star.ln() - step, r_star.ln() + step);
        let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let mut c = b_ln - inv_phi * (b_ln - a_ln);
        let mut d = a_ln + inv_phi * (b_ln - a_ln);
        let mut fc = objective(x0, c.exp())?;
        let mut fd = objective(x0, d.exp())?;
        for _ in 0..40 {
            if fc > fd {
                b_ln = d;
                d = c;
                fd = fc;
                c = b_ln - inv_phi * (b_ln - a_ln);
                fc = objective(x0, c.exp())?;
            } else {
                a_ln = c;
                c = d;
                fc = fd;
                d = a_ln + inv_phi * (b_ln - a_ln);
                fd = objective(x0, d.exp())?;
            }
        }
        let v = fc.max(fd);
        if v > best.0 {
            best.0 = v;
            best.2 = if fc > fd { c.exp() } else { d.exp() };
        }
    }

    let mut cert = BoundCertificate::new(a, Route::BobkovDirect);
    cert.value = best.0;
    cert.constant("ball_center", best.1, Provenance::Derived);
    cert.constant("ball_radius", best.2, Provenance::Derived);
    cert.check("a in (0, 1/2]".into(), true);
    Ok(cert)
}

/// Smallest K making the concavity step of the large-set radial bound work:
/// `K = max(1, log2(C1), K*)` where `K*` solves
/// `(1/2) log 2 + log(1 - C1 2^-K) = 0`.
pub fn select_k_nu_big(c1_big: f64) -> f64 {
    assert!(c1_big >= 1.0);
    let k_star = (c1_big / (1.0 - 0.5f64.sqrt())).log2();
    1.0f64.max(c1_big.log2()).max(k_star)
}

/// Smallest K with `K c >= 2`, `K - 1 >= 1/c`, and `e K c e^{-(K-1)c} <= 1/2`.
pub fn select_k_small_h0(c: f64) -> Result<f64> {
    assert!(c > 0.0);
    let floor = (2.0 / c).max(1.0 + 1.0 / c);
    let g = |k: f64| std::f64::consts::E * k * c * (-(k - 1.0) * c).exp() - 0.5;
    if g(floor) <= 0.0 {
        return Ok(floor);
    }
    // g is decreasing past Kc >= 1, which the floor guarantees
    let (lo, hi) = rootfind::expand_upward(g, floor, 1e6)?;
    rootfind::solve_bracketed(g, lo, hi, 1e-12, 0.0)
}

/// Smallest K with `K c >= 2`, `K - 1 >= 1/(2c)`, and
/// `e sqrt(K c) e^{-(K-1)c} <= 1/2`.
pub fn select_k_small_h2(c: f64) -> Result<f64> {
    assert!(c > 0.0);
    let floor = (2.0 / c).max(1.0 + 0.5 / c);
    let g = |k: f64| std::f64::consts::E * (k * c).sqrt() * (-(k - 1.0) * c).exp() - 0.5;
    if g(floor) <= 0.0 {
        return Ok(floor);
    }
    let (lo, hi) = rootfind::expand_upward(g, floor, 1e6)?;
    rootfind::solve_bracketed(g, lo, hi, 1e-12, 0.0)
}

const FIT_DELTAS: [f64; 20] = [
    0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85,
    0.9, 0.95, 1.0,
];

fn klartag_constants(nu: &RadialMeasure, ledger: &ConstantsLedger) -> Result<(f64, f64)> {
    if ledger.contains("c1_klartag") && ledger.contains("C1_klartag") {
        return Ok((ledger.value("c1_klartag")?, ledger.value("C1_klartag")?));
    }
    let fit = nu.concentration_fit(&FIT_DELTAS)?;
    Ok((fit.c1_hat, fit.c1_big_hat))
}

/// Large-set lower bound on the radial profile:
/// `Is_nu(a) >= (1/2) sqrt(c1 n / K) / phi^-1(n) * a sqrt(log 1/a)` on
/// `[e^{-c n}, 1/2]` with `c = c1/K`.
pub fn prop_nu_big(nu: &RadialMeasure, a: f64, ledger: &ConstantsLedger) -> Result<BoundCertificate> {
    let mut cert = BoundCertificate::new(a, Route::PropNuBig);
    let n = nu.n() as f64;
    let (c1, c1_big) = klartag_constants(nu, ledger)?;
    let k = select_k_nu_big(c1_big);
    let c = c1 / k;
    cert.constant("c1", c1, Provenance::Estimated);
    cert.constant("C1", c1_big, Provenance::Estimated);
    cert.constant("K", k, Provenance::Derived);
    cert.constant("c", c, Provenance::Derived);
    // minimality: K satisfies the concavity constraint, K - 1 does not
    let concave = |k: f64| 0.5 * LN_2 + (1.0 - c1_big * 2.0f64.powf(-k)).ln();
    cert.check("K concavity constraint".into(), concave(k) >= -1e-12);
    cert.check(
        "K minimal (K-1 fails a constraint)".into(),
        k - 1.0 < 1.0 || concave(k - 1.0) < 0.0,
    );
    let in_range = a >= (-c * n).exp() && a <= 0.5;
    cert.check(format!("a in [e^(-{c:.6}*{n}), 1/2]"), in_range);
    if cert.valid() {
        cert.value =
            0.5 * (c1 * n / k).sqrt() / nu.inv_n() * a * (1.0 / a).ln().sqrt();
    }
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmallRegime {
    H0,
    H2,
}

/// Small-set lower bound, valid on `a in (0, min(e^{-cn}, 1/2)]`.
///
/// * `H0` regime: `a log(1/a) / (2 K phi^-1(log 1/a))`, needs convexity only.
/// * `H2` regime: `a sqrt(log 1/a) sqrt(n) / (2 sqrt(K) phi^-1(n))`, needs
///   `sqrt(phi)/x` nondecreasing.
pub fn prop_small(
    n: u32,
    p: &Potential,
    a: f64,
    c: f64,
    regime: SmallRegime,
    _ledger: &ConstantsLedger,
) -> Result<BoundCertificate> {
    let route = match regime {
        SmallRegime::H0 => Route::PropSmallH0,
        SmallRegime::H2 => Route::PropSmallH2,
    };
    let mut cert = BoundCertificate::new(a, route);
    let nf = n as f64;
    let hyp = p.check_hypotheses(64, 16.0)?;
    let (k, hyp_ok) = match regime {
        SmallRegime::H0 => (select_k_small_h0(c)?, hyp.h0.holds()),
        SmallRegime::H2 => (select_k_small_h2(c)?, hyp.h2.holds()),
    };
    cert.constant("c", c, Provenance::Assumed);
    cert.constant("K", k, Provenance::Derived);
    let (slacks, slacks_prev): (Vec<f64>, Vec<f64>) = match regime {
        SmallRegime::H0 => {
            let s = |k: f64| {
                vec![
                    k * c - 2.0,
                    (k - 1.0) - 1.0 / c,
                    0.5 - std::f64::consts::E * k * c * (-(k - 1.0) * c).exp(),
                ]
            };
            (s(k), s(k - 1.0))
        }
        SmallRegime::H2 => {
            let s = |k: f64| {
                vec![
                    k * c - 2.0,
                    (k - 1.0) - 0.5 / c,
                    0.5 - std::f64::consts::E * (k * c).sqrt() * (-(k - 1.0) * c).exp(),
                ]
            };
            (s(k), s(k - 1.0))
        }
    };
    cert.check(
        "K satisfies all constraints".into(),
        slacks.iter().all(|&s| s >= -1e-9),
    );
    cert.check(
        "K minimal (K-1 fails a constraint)".into(),
        slacks_prev.iter().any(|&s| s < 0.0),
    );
    cert.check("hypothesis class matches regime".into(), hyp_ok);
    let in_range = a > 0.0 && a <= (-c * nf).exp().min(0.5);
    cert.check(format!("a in (0, min(e^(-{c:.6}*{nf}), 1/2)]"), in_range);
    if cert.valid() {
        let l = (1.0 / a).ln();
        cert.value = match regime {
            SmallRegime::H0 => a * l / (2.0 * k * p.inverse(l)?),
            SmallRegime::H2 => a * l.sqrt() * nf.sqrt() / (2.0 * k.sqrt() * p.inverse(nf)?),
        };
    }
    Ok(cert)
}

/// Lift radial and spherical lower bounds `Is_nu >= C_nu J`,
/// `Is_sigma >= C_sigma J` to the full measure:
/// `Is_mu(a) >= kappa2 min(C_nu, C_sigma/r2) J(a)` subject to the radius and
/// mass conditions.
pub fn tensorize(
    c_nu: f64,
    c_sigma: f64,
    j: &ProfileFn,
    nu: &RadialMeasure,
    a: f64,
    ledger: &ConstantsLedger,
) -> Result<BoundCertificate> {
    let mut cert = BoundCertificate::new(a, Route::Tensorized);
    let n = nu.n() as f64;
    let kappa = ledger.value("kappa")?;
    let kappa1 = ledger.value("kappa1")?;
    let kappa2 = ledger.value("kappa2")?;
    let c = ledger.value("split_c")?;
    cert.constant("kappa", kappa, ledger.get("kappa")?.provenance);
    cert.constant("kappa1", kappa1, Provenance::Derived);
    cert.constant("kappa2", kappa2, Provenance::Derived);
    cert.constant("C_nu", c_nu, Provenance::Derived);
    cert.constant("C_sigma", c_sigma, Provenance::Derived);

    // smallest c1' >= 2 with max(kappa1, 1) e c1' e^{-c1'} <= e^{-c}
    let target = (-c).exp();
    let g = |x: f64| kappa1.max(1.0) * std::f64::consts::E * x * (-x).exp() - target;
    let c1p = if g(2.0) <= 0.0 {
        2.0
    } else {
        let (lo, hi) = rootfind::expand_upward(g, 2.0, 1e6)?;
        rootfind::solve_bracketed(g, lo, hi, 1e-12, 0.0)?
    };
    cert.constant("c1_prime", c1p, Provenance::Derived);
    let r1 = nu.potential().inverse(c1p * n)?;
    let j_half = j.eval(0.5)?;
    if !(c_nu > 0.0 && j_half > 0.0) {
        cert.check("C_nu > 0 and J(1/2) > 0".into(), false);
        return Ok(cert);
    }
    let r2 = r1 + 1.0 / (c_nu * j_half);
    cert.constant("r1", r1, Provenance::Derived);
    cert.constant("r2", r2, Provenance::Derived);
    cert.check("r2 - r1 >= 1/(C_nu J(1/2))".into(), r2 - r1 >= 1.0 / (c_nu * j_half) - 1e-12);
    let tail = nu.tail_bound(r1)?;
    let cond_a = kappa1 * tail <= a && a <= 0.5;
    cert.check(format!("kappa1 * nu[r1,inf) = {:.3e} <= a <= 1/2", kappa1 * tail), cond_a);
    if cert.valid() {
        cert.value = kappa2 * c_nu.min(c_sigma / r2) * j.eval(a)?;
    }
    Ok(cert)
}

/// Min and max of the Gaussian isoperimetric function against the shape
/// `a sqrt(log 1/a)` over `(0, 1/2]`.
pub fn gaussian_ratio_extrema() -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for k in 2..=80 {
        let a = 2.0f64.powf(-(k as f64) / 2.0);
        let ratio = profile::gaussian_profile(a).expect("gaussian profile on (0,1/2)")
            / (a * (1.0 / a).ln().sqrt());
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo, hi)
}

/// The large-set branch on a `phi(1) = 1` potential: assemble `C_nu`,
/// `C_sigma`, and the comparison profile `J`, then tensorize.
fn large_route_inner(
    n: u32,
    p_unit: &Potential,
    a_sym: f64,
    use_h2: bool,
    c: f64,
    ledger: &ConstantsLedger,
    plan: QuadraturePlan,
) -> Result<BoundCertificate> {
    let nf = n as f64;
    let nu = RadialMeasure::normalize(n, p_unit.clone(), plan)?;
    let (c1, c1_big) = klartag_constants(&nu, ledger)?;
    let k_big = select_k_nu_big(c1_big);
    let c_big = 0.5 * (c1 * nf / k_big).sqrt() / p_unit.inverse(nf)?;
    let sphere_coeff = ledger.value("sphere_coeff")?;
    let (g_lo, g_hi) = gaussian_ratio_extrema();
    let (j, c_nu, c_sigma) = if use_h2 {
        let k_h2 = select_k_small_h2(c)?;
        let c_small = nf.sqrt() / (2.0 * k_h2.sqrt() * p_unit.inverse(nf)?);
        (
            ProfileFn::new(ProfileKind::GaussianIsoperimetric, plan)?,
            c_big.min(c_small) / g_hi,
            sphere_coeff * (nf - 1.0).sqrt(),
        )
    } else {
        let est = profile::estimate_d1_d2(p_unit, &profile::default_d1_d2_grid())?;
        let k_h0 = select_k_small_h0(c)?;
        let c_nu = est.d1_hat * (c_big * LN_2.sqrt()).min(0.5 / k_h0);
        let c_sigma = sphere_coeff * (nf - 1.0).sqrt() * g_lo * LN_2.sqrt() * est.d1_hat;
        (
            ProfileFn::new(ProfileKind::IPhi(p_unit.clone()), plan)?,
            c_nu,
            c_sigma,
        )
    };
    tensorize(c_nu, c_sigma, &j, &nu, a_sym, ledger)
}

/// The tensorized route on its own, without the small-set dispatch: rescale
/// to `phi(1) = 1`, assemble the constants, tensorize, convert back.
pub fn tensor_route(
    n: u32,
    p: &Potential,
    a: f64,
    ledger: &ConstantsLedger,
    plan: QuadraturePlan,
) -> Result<BoundCertificate> {
    let a_sym = a.min(1.0 - a);
    if !(a > 0.0 && a < 1.0) || a_sym == 0.0 {
        let mut cert = BoundCertificate::new(a, Route::Tensorized);
        cert.check("a in (0, 1)".into(), false);
        return Ok(cert);
    }
    if n < 2 {
        return Err(Error::Domain("tensorized route requires n >= 2".into()));
    }
    let p_unit = p.unit_normalized()?;
    let scale = p.lambda() / p_unit.lambda();
    let hyp = p_unit.check_hypotheses(64, 16.0)?;
    let use_h2 = hyp.h2.holds();
    if !use_h2 && !hyp.h1_prime.holds() {
        return Err(Error::Domain(
            "potential satisfies neither the concave-sqrt nor the strong-convexity hypothesis"
                .into(),
        ));
    }
    let c = ledger.value("split_c")?;
    let mut cert = large_route_inner(n, &p_unit, a_sym, use_h2, c, ledger, plan)?;
    cert.a = a;
    cert.value *= scale;
    cert.constant("scale", scale, Provenance::Derived);
    Ok(cert)
}

/// Assembled lower bound on `Is_{mu_{n,phi}}(a)` for a potential in the
/// concave-sqrt or strong-convexity class. Dispatches between the tensorized
/// large-set route and the small-set route at `a = e^{-cn}`, after rescaling
/// to `phi(1) = 1` and converting back by profile homogeneity.
pub fn theorem_muphi(
    n: u32,
    p: &Potential,
    a: f64,
    ledger: &ConstantsLedger,
    plan: QuadraturePlan,
) -> Result<BoundCertificate> {
    let mut cert = BoundCertificate::new(a, Route::TheoremMuphi);
    let a_sym = a.min(1.0 - a);
    if !(a > 0.0 && a < 1.0) || a_sym == 0.0 {
        cert.check("a in (0, 1)".into(), false);
        return Ok(cert);
    }
    let p_unit = p.unit_normalized()?;
    let scale = p.lambda() / p_unit.lambda();
    let hyp = p_unit.check_hypotheses(64, 16.0)?;
    let use_h2 = hyp.h2.holds();
    if !use_h2 && !hyp.h1_prime.holds() {
        return Err(Error::Domain(
            "potential satisfies neither the concave-sqrt nor the strong-convexity hypothesis"
                .into(),
        ));
    }
    let c = ledger.value("split_c")?;
    let nf = n as f64;

    if n == 1 {
        let est = profile::estimate_d1_d2(&p_unit, &profile::default_d1_d2_grid())?;
        cert.constant("d2", est.d2_hat, Provenance::Estimated);
        cert.constant("scale", scale, Provenance::Derived);
        cert.check("n = 1 exact profile route".into(), true);
        cert.value = scale * profile::l_phi(&p_unit, a_sym)? / est.d2_hat;
        return Ok(cert);
    }

    let mut inner = if a_sym < (-c * nf).exp() {
        let regime = if use_h2 { SmallRegime::H2 } else { SmallRegime::H0 };
        prop_small(n, &p_unit, a_sym, c, regime, ledger)?
    } else {
        large_route_inner(n, &p_unit, a_sym, use_h2, c, ledger, plan)?
    };

    inner.constant("scale", scale, Provenance::Derived);
    inner.constant(
        "inner_route",
        match inner.route {
            Route::Tensorized => 1.0,
            _ => 0.0,
        },
        Provenance::Derived,
    );
    Ok(BoundCertificate {
        a,
        value: scale * inner.value,
        route: Route::TheoremMuphi,
        constants_used: inner.constants_used,
        validity: inner.validity,
    })
}

/// The power-potential specialization: records the dimension prefactor
/// exponent `1/2 - 1/alpha` and the log exponent `1 - 1/min(alpha, 2)` of the
/// closed-form statement next to the assembled bound.
pub fn theorem_mualpha(
    n: u32,
    alpha: f64,
    a: f64,
    ledger: &ConstantsLedger,
    plan: QuadraturePlan,
) -> Result<BoundCertificate> {
    let p = Potential::power(alpha);
    let inner = theorem_muphi(n, &p, a, ledger, plan)?;
    let mut cert = BoundCertificate {
        a,
        value: inner.value,
        route: Route::TheoremMualpha,
        constants_used: inner.constants_used,
        validity: inner.validity,
    };
    cert.constants_used.push(ConstantUse {
        name: "prefactor_exponent".into(),
        value: 0.5 - 1.0 / alpha,
        provenance: Provenance::Derived,
    });
    cert.constants_used.push(ConstantUse {
        name: "log_exponent".into(),
        value: 1.0 - 1.0 / alpha.min(2.0),
        provenance: Provenance::Derived,
    });
    Ok(cert)
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionFreeRow {
    pub n: u32,
    pub lambda_star: f64,
    pub coeff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionFreeTable {
    pub rows: Vec<DimensionFreeRow>,
    pub max_min_ratio: f64,
}

/// Evaluate the n-dependent coefficient of the assembled bound after
/// isotropic rescaling, for each n in the list. A flat table certifies a
/// dimension-free inequality for the isotropic family.
pub fn dimension_free_check(
    p: &Potential,
    n_list: &[u32],
    plan: QuadraturePlan,
) -> Result<DimensionFreeTable> {
    let hyp = p.check_hypotheses(64, 16.0)?;
    let strong = hyp.h2_prime.holds() || hyp.h2.holds();
    if !strong && !hyp.h1_prime.holds() {
        return Err(Error::Domain(
            "dimension-free check needs the concave-sqrt or power-like hypothesis".into(),
        ));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nf = n as f64;
        let lambda_star = RadialMeasure::isotropic_lambda(n, p, plan)?;
        let p_iso = p.with_lambda(lambda_star);
        let mut coeff = nf.sqrt() / p_iso.inverse(nf)?;
        if !strong {
            coeff *= p_iso.inverse(1.0)?;
        }
        rows.push(DimensionFreeRow {
            n,
            lambda_star,
            coeff,
        });
    }
    let max = rows.iter().map(|r| r.coeff).fold(0.0f64, f64::max);
    let min = rows.iter().map(|r| r.coeff).fold(f64::INFINITY, f64::min);
    Ok(DimensionFreeTable {
        rows,
        max_min_ratio: max / min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_ledger() -> ConstantsLedger {
        ConstantsLedger::default()
    }

    #[test]
    fn bobkov_bound_closed_forms() {
        // full ball mass: entropy / (2r)
        let a = 0.3f64;
        let entropy = a * (1.0 / a).ln() + 0.7 * (1.0 / 0.7f64).ln();
        assert!((bobkov_bound(a, 2.0, 0.0) - entropy / 4.0).abs() < 1e-15);
        // vanishing ball mass: vacuous
        assert_eq!(bobkov_bound(a, 2.0, -1e9), 0.0);
    }

    #[test]
    fn bobkov_bound_monotone() {
        let a = 0.2;
        let lb = -0.1;
        let mut prev = f64::INFINITY;
        for i in 1..20 {
            let r = 0.5 * i as f64;
            let v = bobkov_bound(a, r, lb);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        assert!(bobkov_bound(a, 1.0, -0.05) >= bobkov_bound(a, 1.0, -0.1));
    }

    #[test]
    fn bobkov_optimize_beats_manual_probe() {
        let plan = QuadraturePlan::default();
        let nu = RadialMeasure::normalize(10, Potential::power(2.0), plan).unwrap();
        let cert = bobkov_optimize(&nu, 0.3).unwrap();
        assert!(cert.value > 0.0);
        // any manual probe is dominated
        let r = nu.mode();
        let mass = nu.cdf(2.0 * r).unwrap() - nu.cdf(0.5 * r).unwrap();
        let manual = bobkov_bound(0.3, 1.5 * r, mass.ln());
        assert!(cert.value >= manual - 1e-12, "{} vs {manual}", cert.value);
    }

    #[test]
    fn bobkov_optimize_exponential_respects_exact_profile() {
        // n=1, alpha=1: the two-sided exponential has Is(a) = min(a, 1-a)
        // restricted to the half-line it is still at most that
        let plan = QuadraturePlan::default();
        let nu = RadialMeasure::normalize(1, Potential::power(1.0), plan).unwrap();
        let cert = bobkov_optimize(&nu, 0.25).unwrap();
        assert!(cert.value > 0.0);
        assert!(cert.value <= 0.25 + 1e-9, "value {}", cert.value);
    }

    #[test]
    fn k_selection_nu_big() {
        // C1 = 2: log2(C1) = 1, K* = log2(2/(1-1/sqrt2)) finite and larger
        let k = select_k_nu_big(2.0);
        let expect = (2.0 / (1.0 - 0.5f64.sqrt())).log2();
        assert!((k - expect).abs() < 1e-12);
        assert!(k > 1.0);
        // concavity holds at K, fails at K-1
        let concave = |k: f64| 0.5 * LN_2 + (1.0 - 2.0 * 2.0f64.powf(-k)).ln();
        assert!(concave(k) >= -1e-12);
        assert!(concave(k - 1.0) < 0.0);
    }

    #[test]
    fn k_selection_small_h0() {
        let k1 = select_k_small_h0(1.0).unwrap();
        // floors give max(2, 2) = 2; the exponential constraint pushes higher
        assert!(k1 > 2.0 && k1 < 10.0, "k = {k1}");
        let g = |k: f64| std::f64::consts::E * k * (-(k - 1.0)).exp();
        assert!(g(k1) <= 0.5 + 1e-9);
        assert!(g(k1 - 1.0) > 0.5);
        // monotone in 1/c
        let k_half = select_k_small_h0(0.5).unwrap();
        assert!(k_half > k1);
    }

    #[test]
    fn k_selection_small_h2() {
        let k = select_k_small_h2(1.0).unwrap();
        assert!(k >= 2.0);
        let g =
            |k: f64| std::f64::consts::E * k.sqrt() * (-(k - 1.0)).exp();
        assert!(g(k) <= 0.5 + 1e-9);
        // h2 constraints are weaker than h0's at the same c
        assert!(k <= select_k_small_h0(1.0).unwrap() + 1e-9);
    }

    #[test]
    fn prop_nu_big_gates_and_positivity() {
        let plan = QuadraturePlan::default();
        let nu = RadialMeasure::normalize(100, Potential::power(2.0), plan).unwrap();
        let ledger = default_ledger();
        let cert = prop_nu_big(&nu, 0.25, &ledger).unwrap();
        assert!(cert.valid(), "{:?}", cert.validity);
        assert!(cert.value > 0.0);
        // far below the range gate: vacuous
        let tiny = prop_nu_big(&nu, 1e-200, &ledger).unwrap();
        assert!(!tiny.valid());
        assert_eq!(tiny.value, 0.0);
    }

    #[test]
    fn prop_small_routes() {
        let ledger = default_ledger();
        let p3 = Potential::power(3.0);
        let a = (-25.0f64).exp();
        let cert = prop_small(20, &p3, a, 1.0, SmallRegime::H2, &ledger).unwrap();
        assert!(cert.valid(), "{:?}", cert.validity);
        assert!(cert.value > 0.0);
        // h2 regime on a potential without the hypothesis: vacuous
        let bad = prop_small(20, &Potential::power(1.0), a, 1.0, SmallRegime::H2, &ledger).unwrap();
        assert!(!bad.valid());
        assert_eq!(bad.value, 0.0);
        // just above the range gate: vacuous
        let gate = prop_small(20, &p3, (-19.0f64).exp(), 1.0, SmallRegime::H2, &ledger).unwrap();
        assert!(!gate.valid());
        // h0 regime works for merely convex potentials
        let h0 = prop_small(20, &Potential::power(1.0), a, 1.0, SmallRegime::H0, &ledger).unwrap();
        assert!(h0.valid(), "{:?}", h0.validity);
        assert!(h0.value > 0.0);
    }

    #[test]
    fn tensorize_construction() {
        let plan = QuadraturePlan::default();
        let p = Potential::power(2.0).unit_normalized().unwrap();
        let nu = RadialMeasure::normalize(50, p.clone(), plan).unwrap();
        let ledger = default_ledger();
        let j = ProfileFn::new(ProfileKind::GaussianIsoperimetric, plan).unwrap();
        let cert = tensorize(0.5, 5.0, &j, &nu, 0.1, &ledger).unwrap();
        let r1 = cert
            .constants_used
            .iter()
            .find(|c| c.name == "r1")
            .unwrap()
            .value;
        let r2 = cert
            .constants_used
            .iter()
            .find(|c| c.name == "r2")
            .unwrap()
            .value;
        assert!(r2 > r1);
        assert!(cert.valid(), "{:?}", cert.validity);
        assert!(cert.value > 0.0);
        // far-too-small a violates the mass condition
        let small = tensorize(0.5, 5.0, &j, &nu, 1e-300, &ledger).unwrap();
        assert!(!small.valid());
        assert_eq!(small.value, 0.0);
    }

    #[test]
    fn gaussian_ratio_extrema_brackets() {
        let (lo, hi) = gaussian_ratio_extrema();
        assert!(lo > 0.9 && lo < 1.0, "lo = {lo}");
        // ratio tends to sqrt(2) in the deep tail
        assert!(hi > 1.3 && hi < 2.0f64.sqrt() + 1e-6, "hi = {hi}");
    }

    #[test]
    fn theorem_lambda_homogeneity() {
        // the bound for lambda=2 is exactly twice the bound for lambda=1
        let plan = QuadraturePlan::default();
        let ledger = default_ledger();
        for &a in &[0.1, 0.3] {
            let b1 = theorem_muphi(10, &Potential::power(2.0), a, &ledger, plan)
                .unwrap()
                .value;
            let b2 = theorem_muphi(10, &Potential::power_scaled(2.0, 2.0), a, &ledger, plan)
                .unwrap()
                .value;
            assert!(b1 > 0.0);
            assert!((b2 - 2.0 * b1).abs() <= 1e-9 * b1.max(1.0), "{b2} vs {}", 2.0 * b1);
        }
    }

    #[test]
    fn theorem_small_route_engages() {
        let plan = QuadraturePlan::default();
        let ledger = default_ledger();
        let a = (-30.0f64).exp();
        let cert = theorem_muphi(20, &Potential::power(2.0), a, &ledger, plan).unwrap();
        assert!(cert.valid(), "{:?}", cert.validity);
        assert!(cert.value > 0.0);
    }

    #[test]
    fn theorem_n1_uses_exact_profile() {
        let plan = QuadraturePlan::default();
        let ledger = default_ledger();
        let cert = theorem_muphi(1, &Potential::power(1.0), 0.25, &ledger, plan).unwrap();
        assert!(cert.value > 0.0 && cert.value <= 0.25 + 1e-9);
    }

    #[test]
    fn theorem_endpoints_vacuous() {
        let plan = QuadraturePlan::default();
        let ledger = default_ledger();
        let cert = theorem_muphi(10, &Potential::power(2.0), 1.0, &ledger, plan).unwrap();
        assert_eq!(cert.value, 0.0);
        assert!(!cert.valid());
    }

    #[test]
    fn mualpha_exponent_arithmetic() {
        let plan = QuadraturePlan::default();
        let ledger = default_ledger();
        let c2 = theorem_mualpha(10, 2.0, 0.2, &ledger, plan).unwrap();
        let get = |cert: &BoundCertificate, name: &str| {
            cert.constants_used
                .iter()
                .find(|c| c.name == name)
                .unwrap()
                .value
        };
        assert_eq!(get(&c2, "prefactor_exponent"), 0.0);
        assert_eq!(get(&c2, "log_exponent"), 0.5);
        let c1 = theorem_mualpha(4, 1.0, 0.2, &ledger, plan).unwrap();
        assert_eq!(get(&c1, "prefactor_exponent"), -0.5);
        assert_eq!(get(&c1, "log_exponent"), 0.0);
        assert!(c2.value > 0.0);
    }

    #[test]
    fn dimension_free_power2_flat() {
        let plan = QuadraturePlan::default();
        let table = dimension_free_check(&Potential::power(2.0), &[5, 20, 80], plan).unwrap();
        // coefficient reduces to lambda_star = 1/sqrt(2), independent of n
        for row in &table.rows {
            assert!((row.coeff - 0.5f64.sqrt()).abs() < 1e-8, "{row:?}");
        }
        assert!(table.max_min_ratio < 1.0 + 1e-8);
    }

    #[test]
    fn dimension_free_power3_bounded_ratio() {
        let plan = QuadraturePlan::default();
        let table =
            dimension_free_check(&Potential::power(3.0), &[10, 50, 100, 200], plan).unwrap();
        assert!(table.max_min_ratio <= 2.0, "ratio {}", table.max_min_ratio);
    }

    #[test]
    fn dimension_free_power1_h1prime_route() {
        let plan = QuadraturePlan::default();
        let table = dimension_free_check(&Potential::power(1.0), &[10, 50, 100], plan).unwrap();
        for row in &table.rows {
            assert!(row.coeff > 0.0);
        }
    }

    #[test]
    fn route_consistency_at_split() {
        // near a = e^{-cn} both routes produce positive values within a
        // generous factor of each other. The large-set route carries the
        // lifting factor kappa2 = kappa^2/(2 sqrt 2), so the comparison is run
        // at a kappa large enough that a factor-10 window is achievable at
        // all; at kappa = 0.5 the routes differ by 1/kappa2 > 11 by
        // construction.
        let plan = QuadraturePlan::default();
        let mut ledger = default_ledger();
        ledger.set("kappa", 0.75, Provenance::Assumed);
        let n = 10u32;
        let c = ledger.value("split_c").unwrap();
        let a0 = (-c * n as f64).exp();
        let below = theorem_muphi(n, &Potential::power(2.0), a0 * 0.99, &ledger, plan)
            .unwrap()
            .value;
        let above = theorem_muphi(n, &Potential::power(2.0), a0 * 1.01, &ledger, plan)
            .unwrap()
            .value;
        assert!(below > 0.0 && above > 0.0, "below {below}, above {above}");
        let ratio = (below / above).max(above / below);
        assert!(ratio <= 10.0, "ratio {ratio}");
    }
}
