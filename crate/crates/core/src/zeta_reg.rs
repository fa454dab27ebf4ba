//! Generic numerical zeta regularization through the Mellin transform.
//!
//! From samples of a heat curve theta(t) the engine fits a small-time
//! exponent ladder sum c_e t^e, then evaluates
//!   zeta(s) Gamma(s) = int_0^L t^{s-1}(theta - model) dt
//!                    + sum_e c_e L^{s+e}/(s+e) + int_L^oo t^{s-1} theta dt,
//! which gives zeta(0) = c_0 and
//!   zeta'(0) = gamma c_0 + c_0 ln L + sum_{e!=0} c_e L^e / e
//!            + int_0^L (theta - model) dt/t + int_L^oo theta dt/t
//! using 1/Gamma(s) = s + gamma s^2 + O(s^3).
//!
//! The extrapolation of the fitted model below the fit window is the only
//! uncontrolled step, so the lower integration edge sits at the window edge
//! and the leftover piece is charged to the error estimate. Coefficient
//! errors at exponent e <= 0 are amplified by t_lo^e, which is why callers
//! choose ladders matching the true exponent content of their curves.

use crate::error::{Error, Result};
use crate::heat_trace::{Decay, HeatCurve};
use crate::kahan::KahanSum;
use crate::quadrature;
use crate::specfun::{log_gamma, EULER_GAMMA};
use rayon::prelude::*;

/// Fitted small-time expansion sum_i c_i t^{e_i}.
#[derive(Debug, Clone)]
pub struct SmallTExpansion {
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// Per-coefficient uncertainty from the least-squares covariance.
    pub sigmas: Vec<f64>,
    /// Max relative deviation of the model from the curve on the fit window.
    pub fit_residual: f64,
    pub window: (f64, f64),
}

impl SmallTExpansion {
    pub fn model(&self, t: f64) -> f64 {
        let mut acc = KahanSum::new();
        for (e, c) in self.exponents.iter().zip(&self.coefficients) {
            acc.add(c * t.powf(*e));
        }
        acc.value()
    }

    pub fn coeff_at(&self, e: f64) -> f64 {
        for (ei, c) in self.exponents.iter().zip(&self.coefficients) {
            if (ei - e).abs() < 1e-12 {
                return *c;
            }
        }
        0.0
    }
}

/// Result of a zeta regularization run.
#[derive(Debug, Clone)]
pub struct ZetaResult {
    pub value_at_0: f64,
    pub deriv_at_0: f64,
    /// (location, residue) of detected simple poles.
    pub poles: Vec<(f64, f64)>,
    pub error_estimate: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    MellinEngine,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::MellinEngine => "mellin_engine",
        }
    }
}

/// Default exponent ladder for curves of one-dimensional type.
pub fn default_ladder_dim1() -> Vec<f64> {
    vec![-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5]
}

/// Default exponent ladder for curves of three-dimensional type.
pub fn default_ladder_dim3() -> Vec<f64> {
    vec![-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]
}

/// Integer ladder, for localized (single-representation) curves whose
/// small-time expansions carry integer powers only.
pub fn integer_ladder(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| e as f64).collect()
}

/// Householder QR least squares; returns coefficients, a condition estimate
/// from the diagonal of R, the weighted residual norm, and the diagonal of
/// (R^T R)^{-1} for coefficient uncertainties.
fn lstsq(a: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64, f64, Vec<f64>)> {
    let m = a.len();
    let n = a[0].len();
    if m < n {
        return Err(Error::Fit(format!("underdetermined system {m} x {n}")));
    }
    let mut q = a.to_vec();
    let mut b = y.to_vec();
    let mut rdiag = vec![0.0; n];
    for k in 0..n {
        let mut norm = 0.0f64;
        for row in q.iter().skip(k) {
            norm += row[k] * row[k];
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            return Err(Error::Fit("rank-deficient design matrix".into()));
        }
        let alpha = if q[k][k] >= 0.0 { -norm } else { norm };
        rdiag[k] = alpha.abs();
        let mut v = vec![0.0; m];
        v[k] = q[k][k] - alpha;
        for i in (k + 1)..m {
            v[i] = q[i][k];
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i] * q[i][j];
            }
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                q[i][j] -= f * v[i];
            }
        }
        let mut dot = 0.0;
        for i in k..m {
            dot += v[i] * b[i];
        }
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            b[i] -= f * v[i];
        }
        q[k][k] = alpha;
    }
    let cond = rdiag.iter().cloned().fold(0.0f64, f64::max)
        / rdiag.iter().cloned().fold(f64::INFINITY, f64::min);
    // back substitution
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in (k + 1)..n {
            acc -= q[k][j] * x[j];
        }
        x[k] = acc / q[k][k];
    }
    // weighted residual norm from the projected tail of b
    let mut rn2 = 0.0;
    for bi in b.iter().skip(n) {
        rn2 += bi * bi;
    }
    let dof = (m - n).max(1) as f64;
    let resid_norm = (rn2 / dof).sqrt();
    // diag of (R^T R)^{-1}: squared row norms of R^{-1}, rows solved from
    // R^T x = e_j (forward substitution on the lower triangle R^T)
    let mut covd = vec![0.0; n];
    for j in 0..n {
        let mut xr = vec![0.0; n];
        for i in j..n {
            let mut acc = if i == j { 1.0 } else { 0.0 };
            for (l, xl) in xr.iter().enumerate().take(i).skip(j) {
                acc -= q[l][i] * xl;
            }
            xr[i] = acc / q[i][i];
        }
        covd[j] = xr.iter().map(|v| v * v).sum();
    }
    Ok((x, cond, resid_norm, covd))
}

/// Weighted least squares of sum c_i t^{e_i} against curve samples on a
/// log-spaced grid, with relative weights 1/|theta|.
pub fn fit_small_t(
    curve: &dyn HeatCurve,
    ladder: &[f64],
    window: (f64, f64),
    n_points: usize,
) -> Result<SmallTExpansion> {
    let (t_lo, t_hi) = window;
    if !(t_lo > 0.0 && t_lo < t_hi) {
        return Err(Error::Domain(format!("bad fit window ({t_lo}, {t_hi})")));
    }
    if n_points < 2 * ladder.len() {
        return Err(Error::Domain(format!(
            "need at least {} sample points for a {}-exponent ladder",
            2 * ladder.len(),
            ladder.len()
        )));
    }
    let mut exps = ladder.to_vec();
    exps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    exps.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let lr = (t_hi / t_lo).ln();
    let ts: Vec<f64> = (0..n_points)
        .map(|i| t_lo * (lr * i as f64 / (n_points - 1) as f64).exp())
        .collect();
    let samples: Vec<Result<f64>> = ts
        .par_iter()
        .map(|&t| curve.eval(t, 1e-13).map(|s| s.value))
        .collect();
    let mut vals = Vec::with_capacity(n_points);
    let mut scale = 0.0f64;
    for s in samples {
        let v = s?;
        scale = scale.max(v.abs());
        vals.push(v);
    }
    if scale == 0.0 {
        // identically zero curve: zero expansion
        return Ok(SmallTExpansion {
            coefficients: vec![0.0; exps.len()],
            sigmas: vec![0.0; exps.len()],
            exponents: exps,
            fit_residual: 0.0,
            window,
        });
    }
    let floor = scale * 1e-9;
    let weights: Vec<f64> = vals.iter().map(|v| 1.0 / v.abs().max(floor)).collect();
    // design matrix with column equilibration
    let mut cols = vec![0.0f64; exps.len()];
    let mut a = vec![vec![0.0; exps.len()]; n_points];
    for (i, (&t, &w)) in ts.iter().zip(&weights).enumerate() {
        for (j, &e) in exps.iter().enumerate() {
            let v = w * t.powf(e);
            a[i][j] = v;
            cols[j] = cols[j].max(v.abs());
        }
    }
    for row in a.iter_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v /= cols[j];
        }
    }
    let y: Vec<f64> = vals.iter().zip(&weights).map(|(v, w)| v * w).collect();
    let (raw, cond, resid_norm, covd) = lstsq(&a, &y)?;
    if cond > 1e10 {
        return Err(Error::Fit(format!(
            "design matrix condition estimate {cond:.2e} too large; use a shorter ladder"
        )));
    }
    let coefficients: Vec<f64> = raw.iter().zip(&cols).map(|(c, s)| c / s).collect();
    let sigmas: Vec<f64> = covd
        .iter()
        .zip(&cols)
        .map(|(d, s)| resid_norm * d.sqrt() / s)
        .collect();
    let exp = SmallTExpansion {
        exponents: exps,
        coefficients,
        sigmas,
        fit_residual: 0.0,
        window,
    };
    let mut resid = 0.0f64;
    for (&t, &v) in ts.iter().zip(&vals) {
        let r = (exp.model(t) - v).abs() / v.abs().max(floor);
        resid = resid.max(r);
    }
    Ok(SmallTExpansion {
        fit_residual: resid,
        ..exp
    })
}

/// Fit, then drop ladder exponents whose coefficients are statistically
/// indistinguishable from zero and refit. Exponent 0 is always kept. This
/// matters for curves evaluated deep below the window: an absent negative
/// exponent that picks up fit noise is amplified by t_lo^e in the
/// continuation.
pub fn fit_small_t_pruned(
    curve: &dyn HeatCurve,
    ladder: &[f64],
    window: (f64, f64),
    n_points: usize,
) -> Result<SmallTExpansion> {
    let mut active: Vec<f64> = ladder.to_vec();
    let mut exp = fit_small_t(curve, &active, window, n_points)?;
    for _ in 0..3 {
        let keep: Vec<f64> = exp
            .exponents
            .iter()
            .zip(exp.coefficients.iter().zip(&exp.sigmas))
            .filter(|(e, (c, s))| **e == 0.0 || c.abs() > 10.0 * **s)
            .map(|(e, _)| *e)
            .collect();
        if keep.len() == exp.exponents.len() || keep.len() < 2 {
            break;
        }
        active = keep;
        exp = fit_small_t(curve, &active, window, n_points)?;
    }
    Ok(exp)
}

fn integrate_residual_log(
    curve: &dyn HeatCurve,
    exp: &SmallTExpansion,
    lo: f64,
    hi: f64,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    // integrate (theta - model)/t dt = (theta - model) d(ln t)
    let f = |u: f64| {
        let t = u.exp();
        match curve.eval(t, abs_tol * 1e-2) {
            Ok(s) => s.value - exp.model(t),
            Err(_) => f64::NAN,
        }
    };
    let (v, e) = quadrature::adaptive(&f, lo.ln(), hi.ln(), abs_tol, 1e-12, 20_000)?;
    if !v.is_finite() {
        return Err(Error::Resource {
            context: "residual integral".into(),
            best_value: v,
            best_bound: f64::INFINITY,
        });
    }
    Ok((v, e))
}

/// Integral over (split, oo) of t^{s-1} theta(t) dt, handling both decay
/// classes. Returns (value, error estimate).
fn integrate_tail(
    curve: &dyn HeatCurve,
    split: f64,
    s_minus_1: f64,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    let g = |u: f64| {
        let t = u.exp();
        match curve.eval(t, abs_tol * 1e-2) {
            Ok(smp) => t.powf(s_minus_1 + 1.0) * smp.value, // extra t from d(ln t)
            Err(_) => f64::NAN,
        }
    };
    match curve.decay() {
        Decay::Exponential { rate } => {
            if !(rate > 0.0) {
                return Err(Error::Domain(
                    "curve reports non-positive exponential decay rate".into(),
                ));
            }
            // cut where the bound amp e^{-rate t} t^{s-1} integrates below tol
            let mut cut = split.max(1.0) * 2.0;
            loop {
                let amp = curve.eval(cut, abs_tol)?.value.abs() + abs_tol;
                let tail = amp * cut.powf(s_minus_1) / (rate * cut).max(1.0) * 2.0;
                if tail < abs_tol / 2.0 || cut > 1e8 {
                    let (v, e) = quadrature::adaptive(&g, split.ln(), cut.ln(), abs_tol / 2.0, 1e-12, 20_000)?;
                    if !v.is_finite() {
                        return Err(Error::Resource {
                            context: "tail integral".into(),
                            best_value: v,
                            best_bound: f64::INFINITY,
                        });
                    }
                    return Ok((v, e + tail));
                }
                cut *= 2.0;
            }
        }
        Decay::Algebraic => {
            // extend the range until a two-point power-law model of the tail
            // contributes below tolerance
            let mut cut = split.max(1.0) * 8.0;
            loop {
                let th1 = curve.eval(cut, abs_tol)?.value;
                let th2 = curve.eval(2.0 * cut, abs_tol)?.value;
                // model theta ~ A t^{-p}
                let p = if th1 != 0.0 && th2 != 0.0 && th1.signum() == th2.signum() {
                    ((th1 / th2).abs().ln() / 2.0f64.ln()).max(1.01)
                } else {
                    1.01
                };
                let a_coef = th1.abs() * cut.powf(p);
                // int_cut^oo t^{s-1} A t^{-p} dt
                let expo = s_minus_1 - p + 1.0;
                let tail_mag = if expo < 0.0 {
                    a_coef * cut.powf(expo) / (-expo)
                } else {
                    f64::INFINITY
                };
                if tail_mag < abs_tol / 2.0 || cut > 1e12 {
                    let (v, e) =
                        quadrature::adaptive(&g, split.ln(), cut.ln(), abs_tol / 2.0, 1e-12, 40_000)?;
                    // add the modeled tail and charge half of it to the error
                    let tail_val = th1.signum() * tail_mag.min(f64::MAX);
                    return Ok((v + tail_val, e + tail_mag));
                }
                cut *= 4.0;
            }
        }
    }
}

/// zeta(0) and zeta'(0) from the Mellin split at `split`.
pub fn mellin_zeta_at0(
    curve: &dyn HeatCurve,
    exp: &SmallTExpansion,
    split: f64,
) -> Result<ZetaResult> {
    mellin_zeta_at0_tol(curve, exp, split, 1e-11)
}

/// Same as `mellin_zeta_at0` with an explicit quadrature tolerance, for
/// curves whose evaluations are themselves expensive quadratures.
pub fn mellin_zeta_at0_tol(
    curve: &dyn HeatCurve,
    exp: &SmallTExpansion,
    split: f64,
    inner_tol: f64,
) -> Result<ZetaResult> {
    if !(split > 0.0) {
        return Err(Error::Domain("split must be positive".into()));
    }
    let t_lo = exp.window.0.min(split);
    let c0 = exp.coeff_at(0.0);
    let mut acc = KahanSum::new();
    acc.add(EULER_GAMMA * c0);
    acc.add(c0 * split.ln());
    for (e, c) in exp.exponents.iter().zip(&exp.coefficients) {
        if *e != 0.0 {
            acc.add(c * split.powf(*e) / e);
        }
    }
    let (i1, e1) = integrate_residual_log(curve, exp, t_lo, split, inner_tol)?;
    acc.add(i1);
    let (i2, e2) = integrate_tail(curve, split, -1.0, inner_tol)?;
    acc.add(i2);

    // unresolved below-window piece: extrapolation gap charged to the error
    let probe = |t: f64| -> f64 {
        match curve.eval(t, 1e-13) {
            Ok(s) => (s.value - exp.model(t)).abs(),
            Err(_) => 0.0,
        }
    };
    let below = 2.0 * probe(t_lo) + 4.0 * probe(t_lo / 4.0);

    // amplification of fitted-coefficient uncertainty: a coefficient error
    // delta at exponent e shifts zeta'(0) by delta t_lo^e / e (the split-side
    // dependence cancels between the sum and the residual integral), and by
    // delta (gamma + |ln t_lo|) at e = 0
    let mut amp = 0.0;
    for (e, sg) in exp.exponents.iter().zip(&exp.sigmas) {
        let sens = if *e == 0.0 {
            EULER_GAMMA + t_lo.ln().abs()
        } else {
            t_lo.powf(*e) / e.abs()
        };
        amp += sg * sens;
    }

    let poles = detect_poles(exp);
    Ok(ZetaResult {
        value_at_0: c0,
        deriv_at_0: acc.value(),
        poles,
        error_estimate: e1 + e2 + below + amp,
        method: Method::MellinEngine,
    })
}

/// The Mellin-regularized small-time piece
/// d/ds [ 1/Gamma(s) int_0^eps t^{s-1} theta dt ] at s = 0,
/// which is zeta'(0) without the large-time integral.
pub fn mellin_smallt_piece(
    curve: &dyn HeatCurve,
    exp: &SmallTExpansion,
    eps: f64,
) -> Result<(f64, f64)> {
    let t_lo = exp.window.0.min(eps);
    let c0 = exp.coeff_at(0.0);
    let mut acc = KahanSum::new();
    acc.add(EULER_GAMMA * c0);
    acc.add(c0 * eps.ln());
    for (e, c) in exp.exponents.iter().zip(&exp.coefficients) {
        if *e != 0.0 {
            acc.add(c * eps.powf(*e) / e);
        }
    }
    let (i1, e1) = integrate_residual_log(curve, exp, t_lo, eps, 1e-11)?;
    acc.add(i1);
    Ok((acc.value(), e1 + exp.fit_residual * (1.0 + c0.abs())))
}

fn detect_poles(exp: &SmallTExpansion) -> Vec<(f64, f64)> {
    let mut poles = Vec::new();
    let scale: f64 = exp
        .coefficients
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs()));
    for (e, c) in exp.exponents.iter().zip(&exp.coefficients) {
        if *e < -1e-9 {
            let loc = -e;
            // residue of zeta at s = -e is c_e / Gamma(-e)
            let res = c / log_gamma(loc).map(f64::exp).unwrap_or(f64::INFINITY);
            if c.abs() > (1e3 * exp.fit_residual * scale).max(1e-9) {
                poles.push((loc, res));
            }
        }
    }
    poles
}

/// zeta(s) away from s = 0 and the ladder poles.
pub fn zeta_at(
    curve: &dyn HeatCurve,
    exp: &SmallTExpansion,
    s: f64,
    split: f64,
) -> Result<(f64, f64)> {
    for (e, c) in exp.exponents.iter().zip(&exp.coefficients) {
        if (s + e).abs() < 1e-6 && c.abs() > 1e-9 {
            return Err(Error::Pole {
                location: -e,
                residue: c / log_gamma(-e).map(f64::exp).unwrap_or(f64::INFINITY),
                context: format!("zeta_at near ladder pole s = {}", -e),
            });
        }
    }
    let t_lo = exp.window.0.min(split);
    let mut acc = KahanSum::new();
    for (e, c) in exp.exponents.iter().zip(&exp.coefficients) {
        acc.add(c * split.powf(s + e) / (s + e));
    }
    let f = |u: f64| {
        let t = u.exp();
        match curve.eval(t, 1e-13) {
            Ok(smp) => t.powf(s) * (smp.value - exp.model(t)),
            Err(_) => f64::NAN,
        }
    };
    let (i1, e1) = quadrature::adaptive(&f, t_lo.ln(), split.ln(), 1e-11, 1e-12, 20_000)?;
    acc.add(i1);
    let (i2, e2) = integrate_tail(curve, split, s - 1.0, 1e-11)?;
    acc.add(i2);
    // below-window remainder: |theta - model| t^s / s at the edge
    let below = {
        let r = curve.eval(t_lo, 1e-13)?.value - exp.model(t_lo);
        (r.abs() * t_lo.powf(s) / s.abs().max(0.5)) * 2.0
    };
    let gamma_s = gamma_fn(s)?;
    Ok((acc.value() / gamma_s, (e1 + e2 + below) / gamma_s.abs()))
}

fn gamma_fn(s: f64) -> Result<f64> {
    if s > 0.0 {
        Ok(log_gamma(s)?.exp())
    } else if s == s.floor() {
        Err(Error::Pole {
            location: s,
            residue: 0.0,
            context: "Gamma at a non-positive integer".into(),
        })
    } else {
        // reflection: Gamma(s) = pi / (sin(pi s) Gamma(1 - s))
        let pi = std::f64::consts::PI;
        Ok(pi / ((pi * s).sin() * log_gamma(1.0 - s)?.exp()))
    }
}

/// Richardson-extrapolated central difference of an evaluator at s = 0,
/// steps 1e-3 and 5e-4. Returns (derivative, uncertainty estimate).
pub fn deriv_at0_fd<F: Fn(f64) -> Result<f64>>(f: F) -> Result<(f64, f64)> {
    let h1 = 1e-3;
    let h2 = 5e-4;
    let d1 = (f(h1)? - f(-h1)?) / (2.0 * h1);
    let d2 = (f(h2)? - f(-h2)?) / (2.0 * h2);
    let extrap = (4.0 * d2 - d1) / 3.0;
    // third level as a stability probe
    let h3 = 2.5e-4;
    let d3 = (f(h3)? - f(-h3)?) / (2.0 * h3);
    let extrap2 = (4.0 * d3 - d2) / 3.0;
    let spread = (extrap - extrap2).abs();
    let expected = (d1 - d2).abs() / 3.0 + 1e-12;
    if spread > 10.0 * expected.max(1e-9) {
        return Err(Error::OracleUnstable {
            context: "deriv_at0_fd".into(),
            spread,
        });
    }
    Ok((extrap2, spread + (d2 - d3).abs() * 1e-2))
}
