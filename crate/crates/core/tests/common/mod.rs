//! Independent reference solvers used by the integration tests.
#![allow(dead_code)]

/// ħ²/(2 m0) in meV nm².
pub const E0_MEV: f64 = 38.1;

/// Propagates (ψ, a ψ') across a region of constant `a` and constant
/// q² = (U − ε)/(E0 a).
fn step(psi: f64, flux: f64, a: f64, q2: f64, len: f64) -> (f64, f64) {
    let d = flux / a;
    if q2 < 0.0 {
        let k = (-q2).sqrt();
        let (s, c) = (k * len).sin_cos();
        (psi * c + d * s / k, a * (-psi * k * s + d * c))
    } else if q2 > 0.0 {
        let k = q2.sqrt();
        let (s, c) = ((k * len).sinh(), (k * len).cosh());
        (psi * c + d * s / k, a * (psi * k * s + d * c))
    } else {
        (psi + d * len, flux)
    }
}

/// ψ at the right wall for energy `eps`, starting from ψ = 0, aψ' = 1 at
/// the left wall. Regions are (length, a, U). ħ²/2m = e0·a.
fn shoot(regions: &[(f64, f64, f64)], e0: f64, eps: f64) -> f64 {
    let (mut psi, mut flux) = (0.0, 1.0);
    for &(len, a, u) in regions {
        (psi, flux) = step(psi, flux, a, (u - eps) / (e0 * a), len);
        // keep the pair O(1) through long evanescent stretches
        let s = psi.abs().max(flux.abs());
        if s > 1e100 {
            psi /= s;
            flux /= s;
        }
    }
    psi
}

/// Lowest `n` eigenvalues of −e0 d/dz(a dψ/dz) + U ψ = ε ψ between hard
/// walls, with ψ and aψ' continuous at each region boundary.
pub fn bdd_levels(regions: &[(f64, f64, f64)], e0: f64, n: usize, e_lo: f64, e_hi: f64) -> Vec<f64> {
    let steps = 200_000;
    let f = |e: f64| shoot(regions, e0, e);
    let mut out = Vec::new();
    let mut prev_e = e_lo;
    let mut prev = f(prev_e);
    for i in 1..=steps {
        let e = e_lo + (e_hi - e_lo) * i as f64 / steps as f64;
        let v = f(e);
        if prev.signum() != v.signum() {
            let (mut a, mut b, mut fa) = (prev_e, e, prev);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
            if out.len() == n {
                break;
            }
        }
        prev_e = e;
        prev = v;
    }
    out
}

/// Transfer-matrix levels (meV) of a piecewise-constant 1-D potential with
/// hard walls at both ends. `segments` are (length nm, V meV).
pub fn transfer_matrix_levels(segments: &[(f64, f64)], m_star: f64, n: usize, e_hi: f64) -> Vec<f64> {
    let regions: Vec<(f64, f64, f64)> = segments.iter().map(|&(l, v)| (l, 1.0, v)).collect();
    let v_min = segments.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    bdd_levels(&regions, E0_MEV / m_star, n, v_min + 1e-9, e_hi)
}

/// Infinite-well level n (1-based), meV, for ħ²/2m = e0 a.
pub fn box_level(n: usize, width: f64, e0: f64, a: f64) -> f64 {
    let k = n as f64 * std::f64::consts::PI / width;
    e0 * a * k * k
}

/// Samples piecewise-constant `segments` at grid points `x0 + i dx`,
/// i = 0..n. Segment boundaries should sit halfway between grid points.
pub fn sample_segments(segments: &[(f64, f64)], x0: f64, dx: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let x = x0 + i as f64 * dx;
            let mut edge = x0 - dx;
            for &(len, v) in segments {
                edge += len;
                if x < edge {
                    return v;
                }
            }
            segments.last().unwrap().1
        })
        .collect()
}
