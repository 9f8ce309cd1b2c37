//! Quadrature rules: Gauss–Legendre nodes, composite panel integration, and
//! geometrically graded panels for endpoint log singularities.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

static RULE_CACHE: Lazy<Mutex<HashMap<usize, GaussRule>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Nodes by Newton iteration on the Legendre recurrence.
fn compute_rule(n: usize) -> GaussRule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

pub fn gauss_rule(n: usize) -> GaussRule {
    let mut cache = RULE_CACHE.lock().unwrap();
    cache.entry(n).or_insert_with(|| compute_rule(n)).clone()
}

/// Integrate f over [a, b] with a single n-point Gauss rule.
pub fn gauss<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_rule(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Composite Gauss rule: `panels` equal panels of `order` points each.
pub fn composite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let rule = gauss_rule(order);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let pa = a + p as f64 * h;
        let mid = pa + 0.5 * h;
        let half = 0.5 * h;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            sum += w * f(mid + half * x);
        }
    }
    sum * 0.5 * h
}

/// Composite Gauss rule on panels geometrically graded toward `a`.
///
/// Resolves integrable endpoint singularities (ln r, ln^2 r): each panel sees
/// an analytic integrand, and panel sizes shrink by `ratio` toward the end.
pub fn graded_toward_start<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    levels: usize,
    order: usize,
) -> f64 {
    let rule = gauss_rule(order);
    let len = b - a;
    let mut total = 0.0;
    let mut hi = b;
    for lev in 1..=levels {
        let lo = if lev == levels {
            a
        } else {
            a + len * 0.5f64.powi(lev as i32)
        };
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut s = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            s += w * f(mid + half * x);
        }
        total += s * half;
        hi = lo;
    }
    total
}

/// 2D integral over the annulus r in [r0, r1] around `center`, in polar
/// coordinates: trapezoid in the angle (spectrally accurate for periodic
/// integrands), composite Gauss in radius. The integrand receives (x, y).
pub fn polar_annulus<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    center: [f64; 2],
    r0: f64,
    r1: f64,
    n_theta: usize,
    r_panels: usize,
    r_order: usize,
) -> f64 {
    let rule = gauss_rule(r_order);
    let dh = (r1 - r0) / r_panels as f64;
    let dth = 2.0 * std::f64::consts::PI / n_theta as f64;
    let mut sum = 0.0;
    for p in 0..r_panels {
        let pa = r0 + p as f64 * dh;
        let mid = pa + 0.5 * dh;
        let half = 0.5 * dh;
        for (&xr, &wr) in rule.nodes.iter().zip(&rule.weights) {
            let r = mid + half * xr;
            let mut ang = 0.0;
            for it in 0..n_theta {
                let th = it as f64 * dth;
                ang += f(center[0] + r * th.cos(), center[1] + r * th.sin());
            }
            sum += wr * half * ang * dth * r;
        }
    }
    sum
}

/// Polar integral over the disc r < r1 with geometric grading toward the
/// center, for integrands with a log singularity at the center.
pub fn polar_disc_graded<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    center: [f64; 2],
    r1: f64,
    levels: usize,
    n_theta: usize,
    r_order: usize,
) -> f64 {
    let mut total = 0.0;
    let mut hi = r1;
    for lev in 1..=levels {
        let lo = if lev == levels {
            0.0
        } else {
            r1 * 0.5f64.powi(lev as i32)
        };
        total += polar_annulus(&mut f, center, lo, hi, n_theta, 1, r_order);
        hi = lo;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exactness() {
        // degree 2n-1 exact
        let v = gauss(|x| x.powi(7) + 3.0 * x * x, -1.0, 1.0, 4);
        assert!((v - 2.0).abs() < 1e-14);
        let v = composite(|x| x.exp(), 0.0, 1.0, 8, 8);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn graded_handles_log() {
        // int_0^1 ln(x) dx = -1
        let v = graded_toward_start(|x| x.ln(), 0.0, 1.0, 40, 12);
        assert!((v + 1.0).abs() < 1e-12, "got {v}");
        // int_0^1 ln(x)^2 dx = 2
        let v = graded_toward_start(|x| x.ln() * x.ln(), 0.0, 1.0, 40, 12);
        assert!((v - 2.0).abs() < 1e-11, "got {v}");
    }

    #[test]
    fn polar_area_and_log() {
        let a = polar_annulus(|_, _| 1.0, [0.3, -0.2], 0.5, 1.0, 32, 4, 8);
        let expect = std::f64::consts::PI * (1.0 - 0.25);
        assert!((a - expect).abs() < 1e-12);
        // int_{r<1} ln r dA = 2 pi int_0^1 r ln r dr = -pi/2
        let v = polar_disc_graded(|x, y| (x * x + y * y).sqrt().ln(), [0.0, 0.0], 1.0, 40, 16, 10);
        assert!((v + std::f64::consts::PI / 2.0).abs() < 1e-10, "got {v}");
    }
}
