//! Gauss-Legendre quadrature: fixed rules, adaptive panel subdivision, and a
//! semi-infinite driver that maps (a, oo) onto a finite interval and bounds
//! the remaining tail explicitly.

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use rayon::prelude::*;
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    // ascending nodes, deterministic order, exact +- symmetry
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for i in 0..n / 2 {
        let (x, w) = out[n - 1 - i];
        out[i] = (-x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl8() -> &'static [(f64, f64)] {
    static T: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    T.get_or_init(|| gauss_legendre_nodes(8))
}

fn gl16() -> &'static [(f64, f64)] {
    static T: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    T.get_or_init(|| gauss_legendre_nodes(16))
}

/// Fixed n-point rule on [a, b].
pub fn fixed_gl<F: Fn(f64) -> f64 + Sync>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let nodes = match n {
        8 => gl8().to_vec(),
        16 => gl16().to_vec(),
        _ => gauss_legendre_nodes(n),
    };
    let mid = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let mut acc = KahanSum::new();
    for &(x, w) in &nodes {
        acc.add(w * f(mid + hl * x));
    }
    hl * acc.value()
}

/// Gauss-Legendre nodes and weights mapped to (0, 1), for fixed grids such as
/// the alpha integration lattice.
pub fn gl_nodes_unit(n: usize) -> Vec<(f64, f64)> {
    gauss_legendre_nodes(n)
        .into_iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn eval_panel<F: Fn(f64) -> f64 + Sync>(f: &F, a: f64, b: f64) -> Panel {
    let mid = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    // all 24 node evaluations in parallel, reduced in fixed order
    let vals: Vec<f64> = gl16()
        .iter()
        .map(|&(x, _)| mid + hl * x)
        .chain(gl8().iter().map(|&(x, _)| mid + hl * x))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(f)
        .collect();
    let mut hi = KahanSum::new();
    for (i, &(_, w)) in gl16().iter().enumerate() {
        hi.add(w * vals[i]);
    }
    let mut lo = KahanSum::new();
    for (i, &(_, w)) in gl8().iter().enumerate() {
        lo.add(w * vals[16 + i]);
    }
    let v_hi = hl * hi.value();
    let v_lo = hl * lo.value();
    Panel {
        a,
        b,
        value: v_hi,
        error: (v_hi - v_lo).abs(),
    }
}

/// Adaptive bisection with an embedded 8/16 point error estimate.
/// The worst panel is split until the summed estimate meets the tolerance.
/// The final reduction runs over panels sorted by left endpoint, so the
/// result is independent of refinement history details.
pub fn adaptive<F: Fn(f64) -> f64 + Sync>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<(f64, f64)> {
    if !(a < b) {
        if a == b {
            return Ok((0.0, 0.0));
        }
        return Err(Error::Domain(format!("bad interval [{a}, {b}]")));
    }
    // deterministic initial subdivision, evaluated in parallel
    let init = 8.min(max_panels.max(1));
    let edges: Vec<f64> = (0..=init)
        .map(|i| a + (b - a) * i as f64 / init as f64)
        .collect();
    let mut panels: Vec<Panel> = edges
        .windows(2)
        .map(|w| (w[0], w[1]))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(lo, hi)| eval_panel(f, lo, hi))
        .collect();
    loop {
        let total: f64 = KahanSum::sum_iter(panels.iter().map(|p| p.value));
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let tol = abs_tol.max(rel_tol * total.abs());
        if err <= tol {
            let mut sorted = panels.clone();
            sorted.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
            let v = KahanSum::sum_iter(sorted.iter().map(|p| p.value));
            return Ok((v, err));
        }
        if panels.len() >= max_panels {
            return Err(Error::Resource {
                context: format!("adaptive quadrature on [{a}, {b}]"),
                best_value: total,
                best_bound: err,
            });
        }
        // split the panel with the largest error; ties resolved by position
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error
                || (p.error == panels[worst].error && p.a < panels[worst].a)
            {
                worst = i;
            }
        }
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval can no longer be split in f64; accept its estimate
            let mut done = p;
            done.error = 0.0;
            panels.push(done);
            continue;
        }
        let (left, right) = rayon::join(|| eval_panel(f, p.a, mid), || eval_panel(f, mid, p.b));
        panels.push(left);
        panels.push(right);
    }
}

/// Integral over (a, oo) through the substitution h = u/(1-u), with the far
/// tail cut where `tail_bound(T) <= abs_tol / 4`. `tail_bound(T)` must bound
/// the absolute value of the integral of `f` over (T, oo).
pub fn semi_infinite<F, G>(
    f: &F,
    a: f64,
    tail_bound: &G,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64,
{
    let mut cut = (a.abs().max(1.0)) * 2.0;
    let mut tail = tail_bound(cut);
    let mut grow = 0;
    while tail > abs_tol / 4.0 {
        cut *= 2.0;
        tail = tail_bound(cut);
        grow += 1;
        if grow > 200 {
            return Err(Error::Resource {
                context: "semi-infinite quadrature: tail bound does not decay".into(),
                best_value: 0.0,
                best_bound: tail,
            });
        }
    }
    let map = |u: f64| u / (1.0 - u);
    let g = |u: f64| {
        let h = map(u);
        let d = 1.0 - u;
        f(h) / (d * d)
    };
    let ua = a / (1.0 + a);
    let ub = cut / (1.0 + cut);
    let (v, e) = adaptive(&g, ua, ub, abs_tol / 2.0, rel_tol, max_panels)?;
    Ok((v, e + tail))
}
