//! Truncated heat traces with certified tail bounds, graded (torsion-weighted)
//! traces, and the Plancherel-integrated traces of the two groups.
//!
//! Family sums are evaluated three ways depending on shape and regime:
//! explicit closed forms for arithmetic families, term-by-term summation with
//! a geometric tail bound, and a moment-series fast path for a plus/minus
//! pair of square-root families at small t. The pair representation
//!   sum_m e^{-t(a_m +- 1/2)^2} = 2 e^{-t/4} sum_i t^{2i}/(2i)! M_i(t)
//! with M_i the i-th moment of the underlying arithmetic sequence keeps the
//! cost independent of 1/(a t), which is what makes the lattice sums and the
//! Plancherel integrals affordable at small times.

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::quadrature;
use crate::spectra::{Branch, BranchKind, GradedSpectrum};
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy)]
pub struct HeatSample {
    pub value: f64,
    pub trunc_error: f64,
}

impl HeatSample {
    fn exact(value: f64) -> Self {
        HeatSample {
            value,
            trunc_error: 4.0 * f64::EPSILON * value.abs(),
        }
    }
}

/// Large-t behaviour of a heat curve, used when the Mellin engine needs to
/// bound integrals over (split, oo).
#[derive(Debug, Clone, Copy)]
pub enum Decay {
    /// |theta(t)| decays at least like e^{-rate t}.
    Exponential { rate: f64 },
    /// Power-law decay; tails are extrapolated from samples.
    Algebraic,
}

/// A map t -> (value, truncation error), pure and thread-safe.
pub trait HeatCurve: Sync {
    fn eval(&self, t: f64, tol: f64) -> Result<HeatSample>;
    fn descriptor(&self) -> String;
    fn decay(&self) -> Decay;
}

const MAX_TERMS: u64 = 50_000_000;

/// Heat sum of one arithmetic family. The terms form an exact geometric
/// series, so the sum carries no truncation error beyond rounding:
/// sum_m e^{-t(a(2m+1)+c)} = e^{-t(a+c)} / (1 - e^{-2at}).
fn arithmetic_heat(a: f64, c: f64, t: f64) -> HeatSample {
    let denom = -(-2.0 * a * t).exp_m1(); // 1 - e^{-2at}, stable for small at
    let first = (-t * (a + c)).exp();
    HeatSample::exact(first / denom)
}

/// Generic term-by-term family sum with a geometric tail bound
/// term(M+1) / (1 - e^{-t gap}), where gap lower-bounds the eigenvalue
/// increments beyond the truncation point.
fn direct_family_heat(branch: &Branch, t: f64, tol: f64) -> Result<HeatSample> {
    let mut acc = KahanSum::new();
    let mut m = 0u64;
    loop {
        let term = (-t * branch.eigenvalue(m)).exp();
        acc.add(term);
        let next = (-t * branch.eigenvalue(m + 1)).exp();
        let gap = branch.eigenvalue(m + 2) - branch.eigenvalue(m + 1);
        let tail = next / (-(-t * gap).exp_m1());
        if tail <= tol {
            return Ok(HeatSample {
                value: acc.value(),
                trunc_error: tail + 4.0 * f64::EPSILON * acc.value().abs(),
            });
        }
        m += 1;
        if m > MAX_TERMS {
            return Err(Error::Resource {
                context: format!("heat sum for branch {}", branch.label),
                best_value: acc.value(),
                best_bound: tail,
            });
        }
    }
}

const STIRLING_MAX: usize = 84;

fn stirling2() -> &'static Vec<Vec<f64>> {
    static T: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    T.get_or_init(|| {
        let n = STIRLING_MAX + 1;
        let mut s = vec![vec![0.0; n]; n];
        s[0][0] = 1.0;
        for i in 1..n {
            for j in 1..=i {
                s[i][j] = j as f64 * s[i - 1][j] + s[i - 1][j - 1];
            }
        }
        s
    })
}

fn factorials() -> &'static Vec<f64> {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let mut f = vec![1.0; 2 * STIRLING_MAX + 2];
        for i in 1..f.len() {
            f[i] = f[i - 1] * i as f64;
        }
        f
    })
}

/// Lazily grown moment table for M_i(t) = sum_m (w + g m)^i e^{-t (w + g m)},
/// through sum_m m^j x^m = sum_r S2(j,r) r! x^r / (1-x)^{r+1}.
/// Entries are extended only as far as the series actually needs them, which
/// keeps intermediates finite in the small-gt regime where few terms suffice.
struct MomentTable {
    x: f64,
    omx: f64,
    w: f64,
    g: f64,
    scale: f64,
    xr_omx: Vec<f64>, // r! x^r / (1-x)^{r+1}
    pj: Vec<f64>,     // sum_m m^j x^m
}

impl MomentTable {
    fn new(t: f64, w: f64, g: f64) -> Self {
        let x = (-g * t).exp();
        let omx = -(-g * t).exp_m1();
        MomentTable {
            x,
            omx,
            w,
            g,
            scale: (-t * w).exp(),
            xr_omx: vec![1.0 / omx],
            pj: vec![1.0 / omx],
        }
    }

    fn grow_to(&mut self, j: usize) -> bool {
        if j > STIRLING_MAX {
            return false;
        }
        let s2 = stirling2();
        while self.xr_omx.len() <= j {
            let r = self.xr_omx.len();
            let next = self.xr_omx[r - 1] * r as f64 * self.x / self.omx;
            if !next.is_finite() {
                return false;
            }
            self.xr_omx.push(next);
            let jj = self.pj.len();
            let mut acc = 0.0;
            for r in 0..=jj {
                let s = s2[jj][r];
                if s != 0.0 {
                    acc += s * self.xr_omx[r];
                }
            }
            self.pj.push(acc);
        }
        true
    }

    /// M_i, or None when the expansion tables overflow.
    fn moment(&mut self, i: usize) -> Option<f64> {
        if !self.grow_to(i) {
            return None;
        }
        let mut acc = 0.0;
        let mut binom = 1.0;
        let mut gp = 1.0;
        // (w + g m)^i = sum_j C(i,j) w^{i-j} g^j m^j
        let wp_full = self.w.powi(i as i32);
        let mut wp = wp_full;
        for j in 0..=i {
            acc += binom * wp * gp * self.pj[j];
            binom *= (i - j) as f64 / (j as f64 + 1.0);
            wp /= self.w;
            gp *= self.g;
            if !acc.is_finite() {
                return None;
            }
        }
        Some(acc * self.scale)
    }
}

/// Joint heat sum of the square-root pair lambda(m) = (sqrt(a(2m+1)+c+1/4) +- 1/2)^2.
///
/// Writing u_m = a(2m+1) + c + 1/4, the two exponentials combine into
/// 2 e^{-t(u_m + 1/4)} cosh(t sqrt(u_m)), whose even expansion involves only
/// integer moments of u_m. The remainder after I terms is bounded by
/// t^{2I+2}/(2I+2)! e^{t/2} M_{I+1}(t/2).
pub fn sqrt_pair_heat(a: f64, c: f64, t: f64, tol: f64) -> Result<HeatSample> {
    let w = a + c + 0.25;
    let g = 2.0 * a;
    // moment series converges like (e t / 4)^i; use it below t = 0.9
    if t <= 0.9 {
        let fact = factorials();
        let mut table = MomentTable::new(t, w, g);
        let mut acc = KahanSum::new();
        let mut i = 0usize;
        let mut t2i = 1.0;
        // a tolerance below the rounding floor of the sum itself is not
        // reachable; clamp against the leading moment
        let scale = table.moment(0).unwrap_or(0.0);
        let tol = tol.max(64.0 * f64::EPSILON * scale);
        while i <= STIRLING_MAX {
            let Some(mi) = table.moment(i) else { break };
            let inc = t2i / fact[2 * i] * mi;
            acc.add(inc);
            if i >= 4 && 2.0 * inc.abs() <= 0.25 * tol {
                let mut half = MomentTable::new(t / 2.0, w, g);
                if let Some(m2) = half.moment(i + 1) {
                    let rem =
                        t.powi(2 * (i as i32 + 1)) / fact[2 * i + 2] * (t / 2.0).exp() * m2;
                    if rem.is_finite() && 2.0 * rem <= tol {
                        let v = 2.0 * (-t / 4.0).exp() * acc.value();
                        return Ok(HeatSample {
                            value: v,
                            trunc_error: 2.0 * rem + 8.0 * f64::EPSILON * v.abs(),
                        });
                    }
                }
            }
            t2i *= t * t;
            i += 1;
        }
    }
    // fallback: direct sums of the two families
    let plus = Branch::new(BranchKind::SqrtPlus, a, c, 1, "sqrt+")?;
    let minus = Branch::new(BranchKind::SqrtMinus, a, c, 1, "sqrt-")?;
    let p = direct_family_heat(&plus, t, tol / 2.0)?;
    let q = direct_family_heat(&minus, t, tol / 2.0)?;
    Ok(HeatSample {
        value: p.value + q.value,
        trunc_error: p.trunc_error + q.trunc_error,
    })
}

/// Heat trace of one spectrum family: sum over branches of multiplicity times
/// the branch sum, truncated so the combined tail bound stays within `tol`.
pub fn local_heat_trace(fam: &crate::spectra::SpectrumFamily, t: f64, tol: f64) -> Result<HeatSample> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("heat trace requires t > 0, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let nb = fam.branches.len().max(1) as f64;
    let mut acc = KahanSum::new();
    let mut err = 0.0;
    let mut skip = vec![false; fam.branches.len()];
    for (i, b) in fam.branches.iter().enumerate() {
        if skip[i] {
            continue;
        }
        let mult = b.multiplicity as f64;
        let tol_b = tol / (nb * mult.max(1.0));
        // pair a sqrt+ with the matching sqrt- for the joint fast path
        if b.kind == BranchKind::SqrtPlus {
            if let Some(j) = fam.branches.iter().enumerate().position(|(j, o)| {
                j > i
                    && !skip[j]
                    && o.kind == BranchKind::SqrtMinus
                    && o.a == b.a
                    && o.c == b.c
                    && o.multiplicity == b.multiplicity
            }) {
                skip[j] = true;
                let s = sqrt_pair_heat(b.a, b.c, t, tol_b)?;
                acc.add(mult * s.value);
                err += mult * s.trunc_error;
                continue;
            }
        }
        let s = match b.kind {
            BranchKind::Isolated => HeatSample::exact((-t * b.a).exp()),
            BranchKind::Arithmetic => arithmetic_heat(b.a, b.c, t),
            _ => direct_family_heat(b, t, tol_b)?,
        };
        acc.add(mult * s.value);
        err += mult * s.trunc_error;
    }
    Ok(HeatSample {
        value: acc.value(),
        trunc_error: err,
    })
}

/// Degree-weighted heat trace of a graded spectrum, evaluated through the
/// reduced weighted family list.
pub fn graded_heat_trace(gs: &GradedSpectrum, t: f64, tol: f64) -> Result<HeatSample> {
    let wsum: f64 = gs.net.iter().map(|(w, _)| w.abs()).sum();
    let mut acc = KahanSum::new();
    let mut err = 0.0;
    for (w, fam) in &gs.net {
        let s = local_heat_trace(fam, t, tol / wsum.max(1.0))?;
        acc.add(w * s.value);
        err += w.abs() * s.trunc_error;
    }
    Ok(HeatSample {
        value: acc.value(),
        trunc_error: err,
    })
}

/// Graded heat trace of the localized Heisenberg family at spectral
/// parameter k, computed without building the catalog structs. This is the
/// inner loop of every lattice sum and Plancherel integral.
pub fn h_graded_heat_from_k(k: f64, t: f64, tol: f64) -> Result<HeatSample> {
    if !(k > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!(
            "h_graded_heat_from_k requires k, t > 0 (k={k}, t={t})"
        )));
    }
    // net weights: +1 on the degree-1 family, -3 on the degree-0 family;
    // the shared arithmetic branch enters with 1 - 3 = -2.
    let iso = (-t * k * k).exp() + (-t * (k + 1.0) * (k + 1.0)).exp();
    let arith = arithmetic_heat(k, k * k, t);
    let pair = sqrt_pair_heat(k, k * k, t, tol / 2.0)?;
    Ok(HeatSample {
        value: iso - 2.0 * arith.value + pair.value,
        trunc_error: 2.0 * arith.trunc_error + pair.trunc_error + 4.0 * f64::EPSILON * iso,
    })
}

/// Prefactor C(t, k) of the envelope bound
/// |graded H trace at parameter k| <= e^{-t k^2} C(t, k),
/// explicit and decreasing in k. Used for Gaussian tail bounds in n and h.
pub fn h_envelope_prefactor(k: f64, t: f64) -> f64 {
    let gap0 = 4.0 * k * k / (2.0 * k + 1.0);
    1.0 + (-t * (2.0 * k + 1.0)).exp()
        + 2.0 * (-t * k).exp() / (-(-2.0 * k * t).exp_m1())
        + 2.0 / (-(-t * gap0).exp_m1())
}

pub fn h_graded_envelope(k: f64, t: f64) -> f64 {
    (-t * k * k).exp() * h_envelope_prefactor(k, t)
}

/// Gamma trace of the graded heat operator on the line: the Plancherel
/// integral 2 int_0^oo e^{-4 pi^2 h^2 t} dh evaluated by adaptive quadrature
/// and cross-checked against the closed form 1/(2 sqrt(pi t)).
pub fn gamma_heat_trace_r(t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::Domain("t must be positive".into()));
    }
    let f = |h: f64| 2.0 * (-4.0 * PI * PI * h * h * t).exp();
    let tail = |cut: f64| 2.0 * (-4.0 * PI * PI * cut * cut * t).exp() / (8.0 * PI * PI * cut * t);
    let (v, e) = quadrature::semi_infinite(&f, 0.0, &tail, 1e-13, 1e-13, 20_000)?;
    let closed = 0.5 / (PI * t).sqrt();
    if (v - closed).abs() > 1e-10 {
        return Err(Error::Resource {
            context: format!("gamma_heat_trace_r cross-check at t={t}"),
            best_value: v,
            best_bound: (v - closed).abs(),
        });
    }
    Ok((v, e))
}

/// Gamma trace of the graded heat operator on the Heisenberg group:
/// 2 int_0^oo theta_H(t; k = 2 pi h) h dh with the Plancherel weight |h|.
pub fn gamma_heat_trace_h(
    t: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::Domain("t must be positive".into()));
    }
    let inner_tol = (abs_tol * 1e-3).max(1e-15);
    let f = move |h: f64| {
        if h <= 0.0 {
            return 0.0;
        }
        let k = TAU * h;
        match h_graded_heat_from_k(k, t, inner_tol) {
            Ok(s) => s.value * h,
            Err(_) => f64::NAN,
        }
    };
    let tail = |cut: f64| {
        let k = TAU * cut;
        h_envelope_prefactor(k, t) * (-4.0 * PI * PI * cut * cut * t).exp() / (8.0 * PI * PI * t)
    };
    let (v, e) = quadrature::semi_infinite(&f, 0.0, &tail, abs_tol, rel_tol, max_panels)?;
    if !v.is_finite() {
        return Err(Error::Resource {
            context: format!("gamma_heat_trace_h at t={t}"),
            best_value: v,
            best_bound: f64::INFINITY,
        });
    }
    Ok((v, e))
}

/// Heat curve backed by a graded spectrum from the catalog.
pub struct SpectrumCurve {
    pub graded: GradedSpectrum,
}

impl SpectrumCurve {
    /// Smallest eigenvalue across the weighted families, for tail bounds.
    pub fn lambda_min(&self) -> f64 {
        let mut lo = f64::INFINITY;
        for (_, fam) in &self.graded.net {
            for b in &fam.branches {
                lo = lo.min(b.eigenvalue(0));
            }
        }
        lo
    }
}

impl HeatCurve for SpectrumCurve {
    fn eval(&self, t: f64, tol: f64) -> Result<HeatSample> {
        graded_heat_trace(&self.graded, t, tol)
    }

    fn descriptor(&self) -> String {
        format!(
            "graded spectrum {} at parameter {}",
            self.graded.tag.name(),
            self.graded.parameter
        )
    }

    fn decay(&self) -> Decay {
        Decay::Exponential {
            rate: self.lambda_min(),
        }
    }
}

/// Heat curve given by an exact closed-form expression.
pub struct FnCurve<F: Fn(f64) -> f64 + Sync> {
    pub f: F,
    pub desc: String,
    pub decay: Decay,
}

impl<F: Fn(f64) -> f64 + Sync> HeatCurve for FnCurve<F> {
    fn eval(&self, t: f64, _tol: f64) -> Result<HeatSample> {
        let v = (self.f)(t);
        Ok(HeatSample {
            value: v,
            trunc_error: 4.0 * f64::EPSILON * v.abs(),
        })
    }

    fn descriptor(&self) -> String {
        self.desc.clone()
    }

    fn decay(&self) -> Decay {
        self.decay
    }
}

/// The Plancherel-integrated graded curve of the Heisenberg group. Every
/// evaluation is itself an adaptive quadrature, so requested tolerances are
/// floored at `floor_tol`.
pub struct GammaCurveH {
    pub rel_tol: f64,
    pub max_panels: usize,
    pub floor_tol: f64,
}

impl Default for GammaCurveH {
    fn default() -> Self {
        GammaCurveH {
            rel_tol: 1e-10,
            max_panels: 20_000,
            floor_tol: 1e-11,
        }
    }
}

impl HeatCurve for GammaCurveH {
    fn eval(&self, t: f64, tol: f64) -> Result<HeatSample> {
        let (v, e) = gamma_heat_trace_h(t, tol.max(self.floor_tol), self.rel_tol, self.max_panels)?;
        Ok(HeatSample {
            value: v,
            trunc_error: e,
        })
    }

    fn descriptor(&self) -> String {
        "Plancherel-integrated graded Heisenberg heat trace".into()
    }

    fn decay(&self) -> Decay {
        Decay::Algebraic
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{self, GroupTag, KConvention};

    #[test]
    fn arithmetic_matches_geometric_closed_form() {
        // H degree-0 family at k: e^{-t(k+k^2)} / (1 - e^{-2kt})
        for &k in &[0.5, 1.0, 7.0] {
            for &t in &[0.05, 1.0] {
                let s = arithmetic_heat(k, k * k, t);
                let closed = (-t * (k + k * k)).exp() / (1.0 - (-2.0 * k * t).exp());
                assert!(
                    (s.value - closed).abs() < 1e-12 * closed.max(1.0),
                    "k={k} t={t}"
                );
            }
        }
    }

    #[test]
    fn arithmetic_matches_truncated_partial_sum() {
        let (a, c, t) = (0.7, 0.3, 0.2);
        let mut acc = 0.0;
        for m in 0..2000u64 {
            acc += (-t * (a * (2.0 * m as f64 + 1.0) + c)).exp();
        }
        let s = arithmetic_heat(a, c, t);
        assert!((s.value - acc).abs() < 1e-13);
    }

    #[test]
    fn sqrt_pair_fast_path_matches_direct() {
        for &k in &[0.05, 0.5, 1.0, 4.0] {
            for &t in &[1e-4, 1e-3, 0.02, 0.3, 0.8] {
                let fast = sqrt_pair_heat(k, k * k, t, 1e-12).unwrap();
                let plus = Branch::new(BranchKind::SqrtPlus, k, k * k, 1, "p").unwrap();
                let minus = Branch::new(BranchKind::SqrtMinus, k, k * k, 1, "m").unwrap();
                let d = direct_family_heat(&plus, t, 1e-13).unwrap().value
                    + direct_family_heat(&minus, t, 1e-13).unwrap().value;
                let rel = (fast.value - d).abs() / d.abs().max(1.0);
                assert!(rel < 1e-10, "k={k} t={t}: fast={} direct={d}", fast.value);
            }
        }
    }

    #[test]
    fn r_local_trace_value() {
        let g = spectra::graded(GroupTag::RLocal, 0.7, KConvention::TwoPi).unwrap();
        let s = graded_heat_trace(&g, 0.3, 1e-12).unwrap();
        let expect = -(-4.0 * PI * PI * 0.49 * 0.3f64).exp();
        assert!((s.value - expect).abs() < 1e-13);
    }

    #[test]
    fn circle_graded_trace_is_minus_theta_sum() {
        let alpha = 0.5;
        let t = 0.07;
        let g = spectra::graded(GroupTag::Circle, alpha, KConvention::TwoPi).unwrap();
        let s = graded_heat_trace(&g, t, 1e-12).unwrap();
        let mut direct = 0.0;
        for n in -300i64..300 {
            direct -= (-4.0 * PI * PI * (n as f64 + alpha).powi(2) * t).exp();
        }
        assert!((s.value - direct).abs() < 1e-12, "{} vs {direct}", s.value);
    }

    #[test]
    fn graded_h_curve_small_t_approaches_two() {
        // the graded trace tends to t(0) = 2 as t -> 0
        let k = 1.0;
        let v1 = h_graded_heat_from_k(k, 1e-3, 1e-12).unwrap().value;
        let v2 = h_graded_heat_from_k(k, 1e-5, 1e-12).unwrap().value;
        assert!((v1 - 2.0).abs() < 0.01, "{v1}");
        assert!((v2 - 2.0).abs() < 1e-4, "{v2}");
    }

    #[test]
    fn graded_h_matches_catalog_route() {
        for &h in &[0.2, 1.0 / TAU, 0.9] {
            for &t in &[0.01, 0.4, 2.0] {
                let g = spectra::graded(GroupTag::HLocal, h, KConvention::TwoPi).unwrap();
                let a = graded_heat_trace(&g, t, 1e-12).unwrap().value;
                let b = h_graded_heat_from_k(TAU * h, t, 1e-12).unwrap().value;
                assert!((a - b).abs() < 1e-11, "h={h} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn large_t_dominated_by_smallest_eigenvalue() {
        let fam = spectra::h_local_spectrum(1.0 / TAU, 0).unwrap();
        let t = 30.0;
        let s = local_heat_trace(&fam, t, 1e-14).unwrap();
        let lead = (-t * fam.branches[0].eigenvalue(0)).exp();
        assert!((s.value - lead).abs() < lead * 1e-10);
    }

    #[test]
    fn truncation_budget_consistency() {
        // refining the tolerance moves the value by less than the reported bound
        let fam = spectra::h_local_spectrum(0.3, 1).unwrap();
        for &t in &[0.01, 0.1, 1.0, 10.0] {
            let coarse = local_heat_trace(&fam, t, 1e-6).unwrap();
            let fine = local_heat_trace(&fam, t, 1e-13).unwrap();
            assert!(
                (coarse.value - fine.value).abs() <= coarse.trunc_error + 1e-12,
                "t={t}"
            );
        }
    }

    #[test]
    fn gamma_trace_r_closed_form() {
        for &t in &[0.01, 0.1, 1.0, 10.0] {
            let (v, _) = gamma_heat_trace_r(t).unwrap();
            let closed = 0.5 / (PI * t).sqrt();
            assert!((v * t.sqrt() - 0.5 / PI.sqrt()).abs() < 1e-10, "t={t}");
            assert!((v - closed).abs() < 1e-10);
        }
        // spot value from the kernel diagonal: t = 1/(4 pi) gives exactly 1
        let (v, _) = gamma_heat_trace_r(0.25 / PI).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_trace_h_two_rule_agreement() {
        // doubled-node refinement: tighter tolerance acts as the second rule
        let t = 1.0;
        let (a, _) = gamma_heat_trace_h(t, 1e-8, 1e-8, 4000).unwrap();
        let (b, _) = gamma_heat_trace_h(t, 1e-11, 1e-11, 20_000).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn gamma_trace_h_vanishes_at_large_t() {
        let (v, _) = gamma_heat_trace_h(300.0, 1e-10, 1e-8, 8000).unwrap();
        assert!(v.abs() < 1e-3, "{v}");
    }

    #[test]
    fn envelope_really_bounds() {
        for &k in &[0.1, 0.7, 3.0] {
            for &t in &[0.01, 0.3, 2.0] {
                let s = h_graded_heat_from_k(k, t, 1e-13).unwrap();
                assert!(
                    s.value.abs() <= h_graded_envelope(k, t) * (1.0 + 1e-9),
                    "k={k} t={t}"
                );
            }
        }
    }
}
