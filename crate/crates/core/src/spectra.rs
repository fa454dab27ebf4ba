//! Closed-form spectra with multiplicities for every operator family the
//! library works with, plus the degree-weighted (graded) assembly.

use crate::error::{Error, Result};
use std::f64::consts::{PI, TAU};

/// Eigenvalue branch shapes. Families are indexed by m = 0, 1, 2, ...
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchKind {
    /// Single eigenvalue `a`.
    Isolated,
    /// lambda(m) = a (2m+1) + c.
    Arithmetic,
    /// lambda(m) = (a m + c)^2.
    Quadratic,
    /// lambda(m) = (sqrt(a (2m+1) + c + 1/4) + 1/2)^2.
    SqrtPlus,
    /// lambda(m) = (sqrt(a (2m+1) + c + 1/4) - 1/2)^2.
    SqrtMinus,
}

impl BranchKind {
    pub fn name(&self) -> &'static str {
        match self {
            BranchKind::Isolated => "isolated",
            BranchKind::Arithmetic => "arithmetic",
            BranchKind::Quadratic => "quadratic",
            BranchKind::SqrtPlus => "sqrt+",
            BranchKind::SqrtMinus => "sqrt-",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub kind: BranchKind,
    pub a: f64,
    pub c: f64,
    pub multiplicity: u32,
    pub label: String,
}

impl Branch {
    pub fn new(kind: BranchKind, a: f64, c: f64, multiplicity: u32, label: &str) -> Result<Self> {
        let b = Branch {
            kind,
            a,
            c,
            multiplicity,
            label: label.to_string(),
        };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            BranchKind::Isolated => self.a > 0.0,
            BranchKind::Arithmetic => self.a > 0.0 && self.c >= 0.0 && self.a + self.c > 0.0,
            BranchKind::Quadratic => self.a > 0.0 && self.c > 0.0,
            // SqrtMinus needs a + c + 1/4 > 1/4 so that lambda(0) > 0
            BranchKind::SqrtPlus | BranchKind::SqrtMinus => {
                self.a > 0.0 && self.c >= 0.0 && self.a + self.c > 0.0
            }
        };
        if ok && self.multiplicity > 0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "invalid branch parameters: {:?} a={} c={} mult={}",
                self.kind, self.a, self.c, self.multiplicity
            )))
        }
    }

    /// m-th eigenvalue of the branch. For `Isolated` only m = 0 exists.
    pub fn eigenvalue(&self, m: u64) -> f64 {
        let mf = m as f64;
        match self.kind {
            BranchKind::Isolated => self.a,
            BranchKind::Arithmetic => self.a * (2.0 * mf + 1.0) + self.c,
            BranchKind::Quadratic => {
                let r = self.a * mf + self.c;
                r * r
            }
            BranchKind::SqrtPlus => {
                let r = (self.a * (2.0 * mf + 1.0) + self.c + 0.25).sqrt() + 0.5;
                r * r
            }
            BranchKind::SqrtMinus => {
                let r = (self.a * (2.0 * mf + 1.0) + self.c + 0.25).sqrt() - 0.5;
                r * r
            }
        }
    }

    pub fn is_family(&self) -> bool {
        !matches!(self.kind, BranchKind::Isolated)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupTag {
    RLocal,
    Circle,
    HLocal,
    Hred,
    NQuotient,
}

impl GroupTag {
    pub fn dim(&self) -> u8 {
        match self {
            GroupTag::RLocal | GroupTag::Circle => 1,
            _ => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GroupTag::RLocal => "r-local",
            GroupTag::Circle => "circle",
            GroupTag::HLocal => "h-local",
            GroupTag::Hred => "hred",
            GroupTag::NQuotient => "n-quotient",
        }
    }
}

/// Convention for the spectral parameter of the lattice quotients: the
/// localized families are fed k = 2 pi |n + alpha| by default, or the bare
/// |n + alpha| when requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KConvention {
    #[default]
    TwoPi,
    Bare,
}

impl KConvention {
    pub fn k_of(&self, x: f64) -> f64 {
        match self {
            KConvention::TwoPi => TAU * x.abs(),
            KConvention::Bare => x.abs(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KConvention::TwoPi => "2pi",
            KConvention::Bare => "bare",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFamily {
    pub tag: GroupTag,
    pub degree: u8,
    pub parameter: f64,
    pub branches: Vec<Branch>,
}

impl SpectrumFamily {
    /// First `count` eigenvalues of every branch, flattened and sorted,
    /// multiplicity expanded. Intended for inspection and tests.
    pub fn smallest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let mut all = Vec::new();
        for b in &self.branches {
            let per = if b.is_family() { count as u64 } else { 1 };
            for m in 0..per {
                for _ in 0..b.multiplicity {
                    all.push(b.eigenvalue(m));
                }
            }
        }
        all.sort_by(|x, y| x.partial_cmp(y).unwrap());
        all.truncate(count);
        all
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "twist parameter must lie in (0,1); alpha = {alpha} has a zero mode"
        )))
    }
}

fn check_degree(q: u8, dim: u8) -> Result<()> {
    if q <= dim {
        Ok(())
    } else {
        Err(Error::Domain(format!("degree {q} exceeds dimension {dim}")))
    }
}

/// Twisted circle spectrum 4 pi^2 (n + alpha)^2, n in Z, multiplicity one.
/// The two half-lines n >= 0 and n <= -1 are stored as quadratic branches
/// with offsets alpha and 1 - alpha.
pub fn circle_spectrum(alpha: f64, q: u8) -> Result<SpectrumFamily> {
    check_alpha(alpha)?;
    check_degree(q, 1)?;
    let branches = vec![
        Branch::new(BranchKind::Quadratic, TAU, TAU * alpha, 1, "n>=0")?,
        Branch::new(BranchKind::Quadratic, TAU, TAU * (1.0 - alpha), 1, "n<=-1")?,
    ];
    Ok(SpectrumFamily {
        tag: GroupTag::Circle,
        degree: q,
        parameter: alpha,
        branches,
    })
}

/// Localized spectrum of the line: the single eigenvalue 4 pi^2 h^2 in both
/// degrees. The representation at h = 0 is excluded.
pub fn r_local_spectrum(h: f64, q: u8) -> Result<SpectrumFamily> {
    if h == 0.0 {
        return Err(Error::Domain(
            "h = 0 carries the constant representation and is ignored".into(),
        ));
    }
    check_degree(q, 1)?;
    let lambda = 4.0 * PI * PI * h * h;
    Ok(SpectrumFamily {
        tag: GroupTag::RLocal,
        degree: q,
        parameter: h,
        branches: vec![Branch::new(BranchKind::Isolated, lambda, 0.0, 1, "point")?],
    })
}

/// Branch set of the localized Heisenberg Laplacian at spectral parameter k,
/// in degree q. Degrees 2 and 3 repeat degrees 1 and 0.
pub fn h_branches_for_k(k: f64, q: u8, mult: u32, label_prefix: &str) -> Result<Vec<Branch>> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("spectral parameter k must be positive, got {k}")));
    }
    let p = label_prefix;
    let mk = |kind, a, c, label: String| Branch::new(kind, a, c, mult, &label);
    match q {
        0 | 3 => Ok(vec![mk(
            BranchKind::Arithmetic,
            k,
            k * k,
            format!("{p}arith"),
        )?]),
        1 | 2 => Ok(vec![
            mk(BranchKind::Isolated, k * k, 0.0, format!("{p}iso:k^2"))?,
            mk(BranchKind::Isolated, (k + 1.0) * (k + 1.0), 0.0, format!("{p}iso:(k+1)^2"))?,
            mk(BranchKind::Arithmetic, k, k * k, format!("{p}arith"))?,
            mk(BranchKind::SqrtPlus, k, k * k, format!("{p}sqrt+"))?,
            mk(BranchKind::SqrtMinus, k, k * k, format!("{p}sqrt-"))?,
        ]),
        _ => Err(Error::Domain(format!("degree {q} exceeds dimension 3"))),
    }
}

/// Localized Heisenberg spectrum at the representation parameter h, with
/// k = 2 pi |h|. Every eigenvalue has multiplicity one.
pub fn h_local_spectrum(h: f64, q: u8) -> Result<SpectrumFamily> {
    if h == 0.0 {
        return Err(Error::Domain(
            "h = 0 determines a measure-zero set of representations and is ignored".into(),
        ));
    }
    let k = TAU * h.abs();
    Ok(SpectrumFamily {
        tag: GroupTag::HLocal,
        degree: q,
        parameter: h,
        branches: h_branches_for_k(k, q, 1, "")?,
    })
}

/// Default window of Fourier indices materialized for the lattice quotients.
pub const DEFAULT_N_WINDOW: i64 = 8;

/// Twisted spectrum of the reduced Heisenberg quotient: the union over n of
/// the localized branch sets at k(n + alpha), multiplicity one. Branches are
/// materialized for |n| <= window.
pub fn hred_spectrum_window(
    alpha: f64,
    q: u8,
    conv: KConvention,
    window: i64,
) -> Result<SpectrumFamily> {
    check_alpha(alpha)?;
    check_degree(q, 3)?;
    let mut branches = Vec::new();
    for n in -window..=window {
        let k = conv.k_of(n as f64 + alpha);
        branches.extend(h_branches_for_k(k, q, 1, &format!("n={n}:"))?);
    }
    Ok(SpectrumFamily {
        tag: GroupTag::Hred,
        degree: q,
        parameter: alpha,
        branches,
    })
}

pub fn hred_spectrum(alpha: f64, q: u8, conv: KConvention) -> Result<SpectrumFamily> {
    hred_spectrum_window(alpha, q, conv, DEFAULT_N_WINDOW)
}

/// Twisted spectrum of the three-torus quotient: the same branches as the
/// reduced quotient, with multiplicity |n| on the branch indexed by n. The
/// n = 0 branch carries weight zero and is dropped.
pub fn n_quotient_spectrum_window(
    alpha: f64,
    q: u8,
    conv: KConvention,
    window: i64,
) -> Result<SpectrumFamily> {
    check_alpha(alpha)?;
    check_degree(q, 3)?;
    let mut branches = Vec::new();
    for n in -window..=window {
        if n == 0 {
            continue;
        }
        let k = conv.k_of(n as f64 + alpha);
        branches.extend(h_branches_for_k(k, q, n.unsigned_abs() as u32, &format!("n={n}:"))?);
    }
    Ok(SpectrumFamily {
        tag: GroupTag::NQuotient,
        degree: q,
        parameter: alpha,
        branches,
    })
}

pub fn n_quotient_spectrum(alpha: f64, q: u8, conv: KConvention) -> Result<SpectrumFamily> {
    n_quotient_spectrum_window(alpha, q, conv, DEFAULT_N_WINDOW)
}

/// Per-degree torsion weights (-1)^q q.
pub fn torsion_weight(q: u8) -> f64 {
    let w = q as f64;
    if q % 2 == 0 {
        w
    } else {
        -w
    }
}

/// A full degree map together with the reduced weighted family list obtained
/// from the degree dualities.
#[derive(Debug, Clone)]
pub struct GradedSpectrum {
    pub tag: GroupTag,
    pub parameter: f64,
    pub degrees: Vec<SpectrumFamily>,
    /// Weighted families after cancellation: in dimension 3 the weighted sum
    /// reduces to (+1) x (degree-1 family) + (-3) x (degree-0 family); in
    /// dimension 1 to (-1) x (degree-1 family).
    pub net: Vec<(f64, SpectrumFamily)>,
}

/// Assemble all degrees of a catalog family with torsion weights.
pub fn graded(tag: GroupTag, parameter: f64, conv: KConvention) -> Result<GradedSpectrum> {
    let dim = tag.dim();
    let fam = |q: u8| -> Result<SpectrumFamily> {
        match tag {
            GroupTag::RLocal => r_local_spectrum(parameter, q),
            GroupTag::Circle => circle_spectrum(parameter, q),
            GroupTag::HLocal => h_local_spectrum(parameter, q),
            GroupTag::Hred => hred_spectrum(parameter, q, conv),
            GroupTag::NQuotient => n_quotient_spectrum(parameter, q, conv),
        }
    };
    let degrees: Vec<SpectrumFamily> = (0..=dim).map(fam).collect::<Result<_>>()?;
    // duality checks are structural: identical branch lists
    let net = if dim == 3 {
        if degrees[2].branches != degrees[1].branches || degrees[3].branches != degrees[0].branches
        {
            return Err(Error::IdentityGate {
                context: format!("degree duality for {}", tag.name()),
                left: 0.0,
                right: 1.0,
                tol: 0.0,
            });
        }
        vec![(1.0, degrees[1].clone()), (-3.0, degrees[0].clone())]
    } else {
        if degrees[1].branches != degrees[0].branches {
            return Err(Error::IdentityGate {
                context: format!("degree duality for {}", tag.name()),
                left: 0.0,
                right: 1.0,
                tol: 0.0,
            });
        }
        vec![(-1.0, degrees[1].clone())]
    };
    Ok(GradedSpectrum {
        tag,
        parameter,
        degrees,
        net,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_smallest_eigenvalue_at_half() {
        let f = circle_spectrum(0.5, 0).unwrap();
        let evs = f.smallest_eigenvalues(4);
        assert!((evs[0] - PI * PI).abs() < 1e-12);
        // n and -1-n coincide at alpha = 1/2: doubled eigenvalues
        assert!((evs[0] - evs[1]).abs() < 1e-12);
    }

    #[test]
    fn circle_degree_duality_and_symmetry() {
        let f0 = circle_spectrum(0.25, 0).unwrap();
        let f1 = circle_spectrum(0.25, 1).unwrap();
        assert_eq!(f0.branches, f1.branches);
        // spectrum as a multiset is invariant under n -> -1-n
        let a = circle_spectrum(0.25, 0).unwrap().smallest_eigenvalues(12);
        let b = circle_spectrum(0.75, 0).unwrap().smallest_eigenvalues(12);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!(circle_spectrum(0.0, 0).is_err());
        assert!(circle_spectrum(1.0, 0).is_err());
    }

    #[test]
    fn r_local_values() {
        for &h in &[1.0, -1.0] {
            let f = r_local_spectrum(h, 0).unwrap();
            assert_eq!(f.branches.len(), 1);
            assert!((f.branches[0].eigenvalue(0) - 4.0 * PI * PI).abs() < 1e-12);
        }
        let f = r_local_spectrum(1.0 / TAU, 1).unwrap();
        assert!((f.branches[0].eigenvalue(0) - 1.0).abs() < 1e-14);
        assert!(r_local_spectrum(0.0, 0).is_err());
    }

    #[test]
    fn h_local_k1_catalog() {
        let h = 1.0 / TAU; // k = 1
        let f0 = h_local_spectrum(h, 0).unwrap();
        let evs: Vec<f64> = (0..4).map(|m| f0.branches[0].eigenvalue(m)).collect();
        for (i, e) in evs.iter().enumerate() {
            assert!((e - (2.0 * i as f64 + 2.0)).abs() < 1e-12, "{evs:?}");
        }
        let f1 = h_local_spectrum(h, 1).unwrap();
        let iso: Vec<f64> = f1
            .branches
            .iter()
            .filter(|b| b.kind == BranchKind::Isolated)
            .map(|b| b.eigenvalue(0))
            .collect();
        assert!((iso[0] - 1.0).abs() < 1e-12 && (iso[1] - 4.0).abs() < 1e-12);
        // negative h gives the same spectrum
        let g1 = h_local_spectrum(-h, 1).unwrap();
        assert_eq!(f1.branches, g1.branches);
    }

    #[test]
    fn h_degree_duality() {
        let h = 0.37;
        assert_eq!(
            h_local_spectrum(h, 1).unwrap().branches,
            h_local_spectrum(h, 2).unwrap().branches
        );
        assert_eq!(
            h_local_spectrum(h, 0).unwrap().branches,
            h_local_spectrum(h, 3).unwrap().branches
        );
    }

    #[test]
    fn branches_positive_and_increasing() {
        let ks = [0.05, 0.5, 1.0, 7.0];
        for &k in &ks {
            for br in h_branches_for_k(k, 1, 1, "").unwrap() {
                let mut prev = 0.0;
                let upto = if br.is_family() { 40 } else { 1 };
                for m in 0..upto {
                    let e = br.eigenvalue(m);
                    assert!(e > 0.0, "k={k} {:?} m={m}", br.kind);
                    assert!(e > prev, "k={k} {:?} m={m}: {e} <= {prev}", br.kind);
                    prev = e;
                }
            }
        }
    }

    #[test]
    fn sqrt_branches_satisfy_characteristic_equation() {
        // y (y^2 - y - (2l+1)k - k^2) = 0 with y = x - (2l+1)k - k^2
        for &k in &[0.5, 1.0, 2.0] {
            for kind in [BranchKind::SqrtPlus, BranchKind::SqrtMinus] {
                let b = Branch::new(kind, k, k * k, 1, "t").unwrap();
                for l in 0..20u64 {
                    let x = b.eigenvalue(l);
                    let shift = (2.0 * l as f64 + 1.0) * k + k * k;
                    let y = x - shift;
                    let resid = y * (y * y - y - shift);
                    assert!(
                        resid.abs() < 1e-12 * (1.0 + x * x * x),
                        "k={k} l={l} resid={resid}"
                    );
                }
            }
        }
    }

    #[test]
    fn hred_conventions_and_duality() {
        let f = hred_spectrum(0.25, 0, KConvention::TwoPi).unwrap();
        // the n = 0 branch matches the localized spectrum at h = 0.25
        let local = h_local_spectrum(0.25, 0).unwrap();
        let n0: Vec<&Branch> = f.branches.iter().filter(|b| b.label.starts_with("n=0:")).collect();
        assert_eq!(n0.len(), 1);
        assert!((n0[0].a - local.branches[0].a).abs() < 1e-12);
        let f3 = hred_spectrum(0.25, 3, KConvention::TwoPi).unwrap();
        let f0 = hred_spectrum(0.25, 0, KConvention::TwoPi).unwrap();
        assert_eq!(f0.branches, f3.branches);
        // alpha = 1/2: branches for n and -1-n coincide parameter-wise
        let g = hred_spectrum(0.5, 0, KConvention::TwoPi).unwrap();
        let a1: Vec<f64> = g.branches.iter().filter(|b| b.label.starts_with("n=1:")).map(|b| b.a).collect();
        let a2: Vec<f64> = g.branches.iter().filter(|b| b.label.starts_with("n=-2:")).map(|b| b.a).collect();
        assert_eq!(a1, a2);
    }

    #[test]
    fn n_quotient_multiplicities() {
        let f = n_quotient_spectrum(0.3, 0, KConvention::TwoPi).unwrap();
        assert!(f.branches.iter().all(|b| !b.label.starts_with("n=0:")));
        let m3 = f.branches.iter().find(|b| b.label.starts_with("n=3:")).unwrap();
        assert_eq!(m3.multiplicity, 3);
        let mm2 = f.branches.iter().find(|b| b.label.starts_with("n=-2:")).unwrap();
        assert_eq!(mm2.multiplicity, 2);
    }

    #[test]
    fn graded_weights_and_reduction() {
        assert_eq!(torsion_weight(0), 0.0);
        assert_eq!(torsion_weight(1), -1.0);
        assert_eq!(torsion_weight(2), 2.0);
        assert_eq!(torsion_weight(3), -3.0);
        let g = graded(GroupTag::HLocal, 0.4, KConvention::TwoPi).unwrap();
        assert_eq!(g.net.len(), 2);
        assert_eq!(g.net[0].0, 1.0);
        assert_eq!(g.net[1].0, -3.0);
        let c = graded(GroupTag::Circle, 0.4, KConvention::TwoPi).unwrap();
        assert_eq!(c.net.len(), 1);
        assert_eq!(c.net[0].0, -1.0);
    }
}
