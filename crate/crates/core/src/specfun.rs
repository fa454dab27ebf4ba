//! Special functions: log-Gamma, digamma, the Hurwitz zeta function with its
//! analytic continuation, and generalized binomial coefficients.
//!
//! Hurwitz zeta is evaluated by direct summation to a cutoff plus
//! Euler-Maclaurin correction terms through the B12 Bernoulli term; the
//! remainder is bounded by the first omitted term times an explicit factor,
//! and the bound is returned alongside the value.

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use num_complex::Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const LN_2PI: f64 = 1.837_877_066_409_345_6;

/// B_{2j} / (2j (2j-1)) for j = 1..8, the Stirling series coefficients of
/// log-Gamma.
const LGAMMA_STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// B_{2j} / (2j) for j = 1..6, the asymptotic series of digamma through the
/// x^{-12} term.
const DIGAMMA_ASYMP: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
];

/// B_{2j} / (2j)! for j = 1..7. The j = 7 entry only feeds the remainder
/// bound of the Euler-Maclaurin tail.
const HURWITZ_EM: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    7.0 / 74_724_249_600.0,
];

/// Natural logarithm of Gamma(x) for x > 0.
///
/// Recurrence lift to x >= 10, then the Stirling series. Absolute error is at
/// the 1e-14 level for moderate arguments; for very large x the result is
/// accurate to a few ulps.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    let mut shift = KahanSum::new();
    let mut y = x;
    while y < 10.0 {
        shift.add(y.ln());
        y += 1.0;
    }
    // Stirling: (y - 1/2) ln y - y + ln(2 pi)/2 + sum B_{2j}/(2j(2j-1) y^{2j-1})
    let mut series = KahanSum::new();
    let inv2 = 1.0 / (y * y);
    let mut p = 1.0 / y;
    for c in LGAMMA_STIRLING {
        series.add(c * p);
        p *= inv2;
    }
    let lg = (y - 0.5) * y.ln() - y + 0.5 * LN_2PI + series.value();
    Ok(lg - shift.value())
}

/// Digamma function for x > 0. Recurrence lift to x >= 8, asymptotic series
/// through the x^{-12} term. Absolute error below 1e-12.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut acc = KahanSum::new();
    let mut y = x;
    while y < 8.0 {
        acc.add(-1.0 / y);
        y += 1.0;
    }
    acc.add(y.ln());
    acc.add(-0.5 / y);
    let inv2 = 1.0 / (y * y);
    let mut p = inv2;
    for c in DIGAMMA_ASYMP {
        acc.add(-c * p);
        p *= inv2;
    }
    Ok(acc.value())
}

/// One evaluation of the Hurwitz zeta function.
#[derive(Debug, Clone, Copy)]
pub struct HurwitzEval {
    pub s: Complex64,
    pub a: f64,
    pub value: Complex64,
    /// Rigorous bound on the Euler-Maclaurin truncation remainder.
    pub abs_error: f64,
}

fn cpowc(x: f64, e: Complex64) -> Complex64 {
    // x^e for real x > 0
    (e * x.ln()).exp()
}

/// Analytic continuation of sum_{n>=0} (n+a)^{-s}.
///
/// Supported region: a > 0, s away from 1, Re(s) > -6, |Im(s)| <= 55. The
/// cutoff N is chosen so that n + a >= 10 (1 + |s|), which keeps the returned
/// `abs_error` below 1e-11 throughout the supported region.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<HurwitzEval> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("hurwitz_zeta requires a > 0, got {a}")));
    }
    if (s - Complex64::new(1.0, 0.0)).norm() < 1e-10 {
        return Err(Error::Pole {
            location: 1.0,
            residue: 1.0,
            context: "hurwitz_zeta at s = 1".into(),
        });
    }
    if s.re <= -6.0 || s.im.abs() > 55.0 {
        return Err(Error::Domain(format!(
            "hurwitz_zeta outside supported region at s = {s}"
        )));
    }
    let target = 10.0 * (1.0 + s.norm());
    let n0 = if a >= target { 0 } else { (target - a).ceil() as usize };

    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for n in 0..n0 {
        let term = cpowc(n as f64 + a, -s);
        re.add(term.re);
        im.add(term.im);
    }
    let x = n0 as f64 + a;
    // integral term + half contribution of the edge
    let ix = cpowc(x, Complex64::new(1.0, 0.0) - s) / (s - 1.0);
    let hx = 0.5 * cpowc(x, -s);
    re.add(ix.re);
    im.add(ix.im);
    re.add(hx.re);
    im.add(hx.im);

    // Euler-Maclaurin terms B_{2j}/(2j)! (s)_{2j-1} x^{-s-2j+1}
    let mut rising = s; // (s)_1
    let mut xp = cpowc(x, -s - Complex64::new(1.0, 0.0)); // x^{-s-2j+1} at j = 1
    let inv_x2 = 1.0 / (x * x);
    let mut first_omitted = 0.0;
    for (j, c) in HURWITZ_EM.iter().enumerate() {
        let term = *c * rising * xp;
        if j < 6 {
            re.add(term.re);
            im.add(term.im);
        } else {
            first_omitted = term.norm();
        }
        // advance rising factorial by two and the power by x^{-2}
        let j2 = 2.0 * (j as f64);
        rising = rising * (s + Complex64::new(j2 + 1.0, 0.0)) * (s + Complex64::new(j2 + 2.0, 0.0));
        xp *= Complex64::new(inv_x2, 0.0);
    }
    // remainder of the alternating Euler-Maclaurin tail: first omitted term
    // times |s + 2p + 1| / (Re(s) + 2p + 1)
    let p2 = 13.0;
    let factor = ((s + Complex64::new(p2, 0.0)).norm() / (s.re + p2)).max(1.0);
    let abs_error = first_omitted * factor + 8.0 * f64::EPSILON * (re.value().abs() + x.powf(-s.re + 1.0).abs());

    Ok(HurwitzEval {
        s,
        a,
        value: Complex64::new(re.value(), im.value()),
        abs_error,
    })
}

/// Real-argument convenience wrapper: value and error bound.
pub fn hurwitz_zeta_real(s: f64, a: f64) -> Result<(f64, f64)> {
    let ev = hurwitz_zeta(Complex64::new(s, 0.0), a)?;
    Ok((ev.value.re, ev.abs_error))
}

/// d/ds zeta_H(s, a) at s = 0, which equals log Gamma(a) - log(2 pi)/2.
pub fn hurwitz_zeta_ds0(a: f64) -> Result<f64> {
    Ok(log_gamma(a)? - 0.5 * LN_2PI)
}

/// Laurent data of zeta_H at s = 1: residue (exactly 1) and constant term
/// -psi(a).
pub fn hurwitz_zeta_near1(a: f64) -> Result<(f64, f64)> {
    Ok((1.0, -digamma(a)?))
}

/// Generalized binomial coefficient binom(-2s, 2j) as a product.
pub fn gen_binomial(s: Complex64, j: u32) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for i in 0..(2 * j) {
        p *= -2.0 * s - Complex64::new(i as f64, 0.0);
    }
    let mut fact = 1.0;
    for i in 1..=(2 * j) {
        fact *= i as f64;
    }
    p / fact
}

/// d/ds binom(-2s, 2j) at s = 0, equal to 1/j for j >= 1.
pub fn gen_binomial_ds0(j: u32) -> Result<f64> {
    if j == 0 {
        return Err(Error::Domain("gen_binomial_ds0 requires j >= 1".into()));
    }
    Ok(1.0 / j as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn log_gamma_trivials() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-13);
        assert!((log_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-13);
        assert!((log_gamma(4.0).unwrap() - 6.0f64.ln()).abs() < 1e-13);
        assert!(log_gamma(-1.0).is_err());
        assert!(log_gamma(0.0).is_err());
    }

    #[test]
    fn log_gamma_small_and_large() {
        // Gamma(1e-3) ~ 1/x - gamma + ...: reference from Gamma(x) = Gamma(x+1)/x
        let x = 1e-3;
        let ref_val = log_gamma(1.0 + x).unwrap() - x.ln();
        assert!((log_gamma(x).unwrap() - ref_val).abs() < 1e-13);
        // large argument: relative accuracy
        let big = log_gamma(1e6).unwrap();
        let stirling = (1e6 - 0.5) * (1e6f64).ln() - 1e6 + 0.5 * LN_2PI + 1.0 / 12e6;
        assert!((big - stirling).abs() / big.abs() < 1e-14);
    }

    #[test]
    fn digamma_trivials() {
        // psi(1) = -gamma: standard sign convention
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-12);
        assert!((digamma(0.5).unwrap() + EULER_GAMMA + 2.0 * 2.0f64.ln()).abs() < 1e-12);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-12);
        assert!(digamma(0.0).is_err());
    }

    #[test]
    fn digamma_matches_recurrence() {
        for &x in &[0.1, 0.37, 1.9, 5.5] {
            let lhs = digamma(x + 1.0).unwrap();
            let rhs = digamma(x).unwrap() + 1.0 / x;
            assert!((lhs - rhs).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn hurwitz_at_zero_is_half_minus_a() {
        for &a in &[0.05, 0.3, 1.0, 2.7, 10.0, 123.4] {
            let (v, err) = hurwitz_zeta_real(0.0, a).unwrap();
            assert!(err <= 1e-11, "a={a} err={err}");
            assert!((v - (0.5 - a)).abs() < 1e-11, "a={a} v={v}");
        }
    }

    #[test]
    fn hurwitz_riemann_value() {
        let (v, _) = hurwitz_zeta_real(2.0, 1.0).unwrap();
        assert!((v - PI * PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn hurwitz_vs_brute_force() {
        // direct summation of 1e6 terms plus integral tail bound
        let (s, a) = (2.5, 1.7);
        let n = 1_000_000usize;
        let mut acc = KahanSum::new();
        for i in 0..n {
            acc.add((i as f64 + a).powf(-s));
        }
        let x = n as f64 + a;
        // tail: x^{1-s}/(s-1) + x^{-s}/2 + EM correction
        acc.add(x.powf(1.0 - s) / (s - 1.0));
        acc.add(0.5 * x.powf(-s));
        acc.add(s * x.powf(-s - 1.0) / 12.0);
        let oracle = acc.value();
        let (v, _) = hurwitz_zeta_real(s, a).unwrap();
        assert!((v - oracle).abs() < 1e-10, "v={v} oracle={oracle}");
    }

    #[test]
    fn hurwitz_recurrence_grid() {
        // zeta(s, a) = zeta(s, a+1) + a^{-s}
        for &s in &[-1.5, 0.25, 2.0, 3.5] {
            for &a in &[0.1, 0.7, 1.3, 5.0] {
                let (lhs, _) = hurwitz_zeta_real(s, a).unwrap();
                let (up, _) = hurwitz_zeta_real(s, a + 1.0).unwrap();
                let rhs = up + a.powf(-s);
                assert!((lhs - rhs).abs() < 1e-11, "s={s} a={a}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn hurwitz_complex_argument() {
        // conjugate symmetry zeta(conj s, a) = conj zeta(s, a)
        let s = Complex64::new(1.7, 8.3);
        let a = 0.9;
        let v1 = hurwitz_zeta(s, a).unwrap().value;
        let v2 = hurwitz_zeta(s.conj(), a).unwrap().value;
        assert!((v1.conj() - v2).norm() < 1e-11);
    }

    #[test]
    fn hurwitz_pole_and_domain_errors() {
        assert!(matches!(
            hurwitz_zeta(c(1.0), 0.5),
            Err(Error::Pole { .. })
        ));
        assert!(hurwitz_zeta(c(2.0), 0.0).is_err());
        assert!(hurwitz_zeta(c(2.0), -1.0).is_err());
    }

    #[test]
    fn hurwitz_laurent_limit_at_one() {
        // (s-1) zeta(s, a) -> 1 with shrinking error along s = 1 + 10^{-m}
        let a = 0.8;
        let mut prev = f64::INFINITY;
        for m in 2..=6 {
            let eps = 10f64.powi(-m);
            let (v, _) = hurwitz_zeta_real(1.0 + eps, a).unwrap();
            let gap = (eps * v - 1.0).abs();
            assert!(gap < prev, "m={m}: {gap} !< {prev}");
            prev = gap;
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn hurwitz_ds0_matches_finite_difference() {
        // Richardson-extrapolated central difference at s = 0, step 1e-5
        for &a in &[0.3, 1.0, 2.3, 2.7] {
            let f = |s: f64| hurwitz_zeta_real(s, a).unwrap().0;
            let h = 1e-5;
            let d1 = (f(h) - f(-h)) / (2.0 * h);
            let d2 = (f(h / 2.0) - f(-h / 2.0)) / h;
            let extrap = (4.0 * d2 - d1) / 3.0;
            let v = hurwitz_zeta_ds0(a).unwrap();
            assert!((v - extrap).abs() < 1e-8, "a={a}: {v} vs {extrap}");
        }
    }

    #[test]
    fn near1_values() {
        let (r, fp) = hurwitz_zeta_near1(1.0).unwrap();
        assert_eq!(r, 1.0);
        assert!((fp - EULER_GAMMA).abs() < 1e-12);
        let (_, fp_half) = hurwitz_zeta_near1(0.5).unwrap();
        assert!((fp_half - (EULER_GAMMA + 2.0 * 2.0f64.ln())).abs() < 1e-12);
        let (_, fp125) = hurwitz_zeta_near1(1.25).unwrap();
        assert!((fp125 + digamma(1.25).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn gen_binomial_cases() {
        // binom(-2, 2) = 3
        assert!((gen_binomial(c(1.0), 1).re - 3.0).abs() < 1e-14);
        // factor -2s makes it vanish at s = 0 for j >= 1
        assert_eq!(gen_binomial(c(0.0), 3).norm(), 0.0);
        assert!((gen_binomial_ds0(2).unwrap() - 0.5).abs() < 1e-15);
        // derivative formula vs finite difference
        for j in 1..=4u32 {
            let h = 1e-6;
            let fd = (gen_binomial(c(h), j).re - gen_binomial(c(-h), j).re) / (2.0 * h);
            assert!((fd - 1.0 / j as f64).abs() < 1e-8, "j={j}");
        }
    }
}
