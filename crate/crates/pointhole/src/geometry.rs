//! Hole shapes, the constant SPD coefficient matrix, the boundary Robin
//! profile, and the coupling constants of the limit point interaction.
//!
//! The boundary coefficient is the conormal density of the logarithmic
//! singular model: `alpha0(s) = nu(s) . xi(s) / |A^{-1/2} xi(s)|^2`, with
//! `nu` the unit normal pointing into the hole. Its integral over the
//! boundary equals `-2 pi sqrt(det A)` for every admissible shape (the flux
//! of the model's conormal gradient), which reduces to `-pi tr A` exactly
//! when `A` is a scalar multiple of the identity.

use crate::error::{Error, Result};
use crate::quad::gauss_rule;
use std::sync::Arc;

/// Tolerance below which `beta` and `a` are considered equal (the limit
/// operator divides by `beta - a`).
pub const BETA_EQ_A_TOL: f64 = 1e-9;

/// Symmetric positive definite 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpdMatrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SpdMatrix2 {
    pub fn new(a11: f64, a12: f64, a22: f64) -> Result<Self> {
        let m = SpdMatrix2 { a11, a12, a22 };
        if !(a11 > 0.0) || !(m.det() > 0.0) {
            return Err(Error::geometry(format!(
                "matrix [[{a11}, {a12}], [{a12}, {a22}]] is not positive definite \
                 (need a11 > 0 and a11*a22 - a12^2 > 0)"
            )));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        SpdMatrix2 { a11: 1.0, a12: 0.0, a22: 1.0 }
    }

    pub fn diag(a11: f64, a22: f64) -> Result<Self> {
        SpdMatrix2::new(a11, 0.0, a22)
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    /// Smallest eigenvalue (the ellipticity constant).
    pub fn min_eigenvalue(&self) -> f64 {
        let half_tr = 0.5 * self.trace();
        let disc = (0.5 * (self.a11 - self.a22)).hypot(self.a12);
        half_tr - disc
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a12 * v[0] + self.a22 * v[1],
        ]
    }

    pub fn inverse(&self) -> SpdMatrix2 {
        let d = self.det();
        SpdMatrix2 {
            a11: self.a22 / d,
            a12: -self.a12 / d,
            a22: self.a11 / d,
        }
    }

    /// Principal square root: B SPD with B * B = A.
    pub fn sqrt(&self) -> SpdMatrix2 {
        // closed form for 2x2 SPD: (A + sqrt(det) E) / sqrt(tr + 2 sqrt(det))
        let s = self.det().sqrt();
        let t = (self.trace() + 2.0 * s).sqrt();
        SpdMatrix2 {
            a11: (self.a11 + s) / t,
            a12: self.a12 / t,
            a22: (self.a22 + s) / t,
        }
    }

    pub fn inv_sqrt(&self) -> SpdMatrix2 {
        self.sqrt().inverse()
    }

    /// |A^{-1/2} v|^2 = v . A^{-1} v.
    pub fn inv_quadratic_form(&self, v: [f64; 2]) -> f64 {
        let iv = self.inverse().apply(v);
        v[0] * iv[0] + v[1] * iv[1]
    }

    /// Conjugate by a rotation: R A R^T.
    pub fn rotated(&self, angle: f64) -> SpdMatrix2 {
        let (s, c) = angle.sin_cos();
        let a11 = c * c * self.a11 - 2.0 * s * c * self.a12 + s * s * self.a22;
        let a22 = s * s * self.a11 + 2.0 * s * c * self.a12 + c * c * self.a22;
        let a12 = s * c * (self.a11 - self.a22) + (c * c - s * s) * self.a12;
        SpdMatrix2 { a11, a12, a22 }
    }
}

/// Validated principal square root (spec operation surface).
pub fn sqrt_spd(a: &SpdMatrix2) -> Result<SpdMatrix2> {
    if !(a.a11 > 0.0) || !(a.det() > 0.0) {
        return Err(Error::geometry(
            "sqrt_spd: input is not positive definite".to_string(),
        ));
    }
    Ok(a.sqrt())
}

fn rot90(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

#[derive(Debug, Clone)]
enum ShapeKind {
    Disc { radius: f64 },
    Ellipse { p: f64, q: f64 },
    Sampled { spline: PeriodicSpline },
}

/// A closed C^1 hole boundary containing the origin, parametrized by arc
/// length. The inward unit normal points into the hole.
#[derive(Debug, Clone)]
pub struct HoleShape {
    kind: ShapeKind,
    perimeter: f64,
    /// cumulative arc length at uniform parameter nodes, for s <-> t lookup
    arc_table: Vec<f64>,
    t_period: f64,
}

const ARC_TABLE_LEN: usize = 2048;

impl HoleShape {
    pub fn disc(radius: f64) -> Result<HoleShape> {
        if !(radius > 0.0) {
            return Err(Error::geometry(format!("disc radius must be > 0, got {radius}")));
        }
        let perimeter = 2.0 * std::f64::consts::PI * radius;
        Ok(HoleShape {
            kind: ShapeKind::Disc { radius },
            perimeter,
            arc_table: Vec::new(),
            t_period: 2.0 * std::f64::consts::PI,
        })
    }

    pub fn ellipse(p: f64, q: f64) -> Result<HoleShape> {
        if !(p > 0.0 && q > 0.0) {
            return Err(Error::geometry(format!("ellipse semi-axes must be > 0, got ({p}, {q})")));
        }
        let mut shape = HoleShape {
            kind: ShapeKind::Ellipse { p, q },
            perimeter: 0.0,
            arc_table: Vec::new(),
            t_period: 2.0 * std::f64::consts::PI,
        };
        shape.build_arc_table();
        Ok(shape)
    }

    /// Closed curve through the given points (counterclockwise), interpolated
    /// by a periodic cubic spline in the cumulative chord-length parameter
    /// and re-parametrized to arc length.
    pub fn from_points(points: &[[f64; 2]]) -> Result<HoleShape> {
        if points.len() < 8 {
            return Err(Error::geometry(format!(
                "sampled shape needs at least 8 points, got {}",
                points.len()
            )));
        }
        let spline = PeriodicSpline::fit(points)?;
        let t_period = spline.period;
        let mut shape = HoleShape {
            kind: ShapeKind::Sampled { spline },
            perimeter: 0.0,
            arc_table: Vec::new(),
            t_period,
        };
        shape.build_arc_table();
        shape.validate()?;
        Ok(shape)
    }

    fn validate(&self) -> Result<()> {
        let n = 256;
        let mut signed_area = 0.0;
        for i in 0..n {
            let t0 = self.t_period * i as f64 / n as f64;
            let t1 = self.t_period * (i + 1) as f64 / n as f64;
            let a = self.point_t(t0);
            let b = self.point_t(t1);
            signed_area += 0.5 * (a[0] * b[1] - a[1] * b[0]);
            if norm(a) < 1e-12 {
                return Err(Error::geometry("boundary passes through the origin".to_string()));
            }
        }
        if signed_area <= 0.0 {
            return Err(Error::geometry(
                "boundary points must be ordered counterclockwise".to_string(),
            ));
        }
        if !self.contains([0.0, 0.0]) {
            return Err(Error::geometry("hole must contain the origin".to_string()));
        }
        Ok(())
    }

    fn point_t(&self, t: f64) -> [f64; 2] {
        match &self.kind {
            ShapeKind::Disc { radius } => [radius * t.cos(), radius * t.sin()],
            ShapeKind::Ellipse { p, q } => [p * t.cos(), q * t.sin()],
            ShapeKind::Sampled { spline } => spline.eval(t),
        }
    }

    fn deriv_t(&self, t: f64) -> [f64; 2] {
        match &self.kind {
            ShapeKind::Disc { radius } => [-radius * t.sin(), radius * t.cos()],
            ShapeKind::Ellipse { p, q } => [-p * t.sin(), q * t.cos()],
            ShapeKind::Sampled { spline } => spline.eval_deriv(t),
        }
    }

    fn build_arc_table(&mut self) {
        let rule = gauss_rule(12);
        let n = ARC_TABLE_LEN;
        let mut table = Vec::with_capacity(n + 1);
        table.push(0.0);
        let dt = self.t_period / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let a = i as f64 * dt;
            let mid = a + 0.5 * dt;
            let half = 0.5 * dt;
            let mut seg = 0.0;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                seg += w * norm(self.deriv_t(mid + half * x));
            }
            acc += seg * half;
            table.push(acc);
        }
        self.perimeter = acc;
        self.arc_table = table;
    }

    /// Parameter t corresponding to arc length s (Newton on the cumulative
    /// arc length, started from the table).
    fn t_of_s(&self, s: f64) -> f64 {
        match &self.kind {
            ShapeKind::Disc { radius } => s / radius,
            _ => {
                let l = self.perimeter;
                let mut s = s % l;
                if s < 0.0 {
                    s += l;
                }
                // table lookup
                let idx = self
                    .arc_table
                    .partition_point(|&v| v <= s)
                    .saturating_sub(1)
                    .min(ARC_TABLE_LEN - 1);
                let dt = self.t_period / ARC_TABLE_LEN as f64;
                let s0 = self.arc_table[idx];
                let s1 = self.arc_table[idx + 1];
                let mut t = dt * (idx as f64 + (s - s0) / (s1 - s0).max(1e-300));
                // Newton refinement on s(t) - s = 0 with s'(t) = |xi'(t)|
                for _ in 0..8 {
                    let ds = self.arc_from(idx, dt * idx as f64, t) + s0 - s;
                    let sp = norm(self.deriv_t(t));
                    let step = ds / sp;
                    t -= step;
                    if step.abs() < 1e-15 * self.t_period {
                        break;
                    }
                }
                t
            }
        }
    }

    /// Arc length from parameter t0 (with known cumulative value) to t.
    fn arc_from(&self, _idx: usize, t0: f64, t: f64) -> f64 {
        let rule = gauss_rule(8);
        let mid = 0.5 * (t0 + t);
        let half = 0.5 * (t - t0);
        let mut seg = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            seg += w * norm(self.deriv_t(mid + half * x));
        }
        seg * half
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Boundary point at arc length s.
    pub fn point(&self, s: f64) -> [f64; 2] {
        self.point_t(self.t_of_s(s))
    }

    /// Unit tangent at arc length s (counterclockwise orientation).
    pub fn unit_tangent(&self, s: f64) -> [f64; 2] {
        let d = self.deriv_t(self.t_of_s(s));
        let n = norm(d);
        [d[0] / n, d[1] / n]
    }

    /// Unit normal at arc length s pointing into the hole.
    pub fn inward_normal(&self, s: f64) -> [f64; 2] {
        rot90(self.unit_tangent(s))
    }

    /// max_s |xi(s)|, the R1 of the containment chain.
    pub fn max_radius(&self) -> f64 {
        (0..512)
            .map(|i| norm(self.point_t(self.t_period * i as f64 / 512.0)))
            .fold(0.0, f64::max)
    }

    pub fn min_radius(&self) -> f64 {
        (0..512)
            .map(|i| norm(self.point_t(self.t_period * i as f64 / 512.0)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Point-in-hole test by ray casting on a dense polygonal sampling.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match &self.kind {
            ShapeKind::Disc { radius } => norm(p) < *radius,
            ShapeKind::Ellipse { p: a, q: b } => {
                (p[0] / a).powi(2) + (p[1] / b).powi(2) < 1.0
            }
            ShapeKind::Sampled { .. } => {
                let n = 720;
                let mut inside = false;
                let mut prev = self.point_t(self.t_period * (n - 1) as f64 / n as f64);
                for i in 0..n {
                    let cur = self.point_t(self.t_period * i as f64 / n as f64);
                    if (cur[1] > p[1]) != (prev[1] > p[1]) {
                        let x_cross = cur[0]
                            + (p[1] - cur[1]) / (prev[1] - cur[1]) * (prev[0] - cur[0]);
                        if p[0] < x_cross {
                            inside = !inside;
                        }
                    }
                    prev = cur;
                }
                inside
            }
        }
    }

    /// Arc-length position of the boundary point at a given polar angle
    /// (valid for curves star-shaped with respect to the origin).
    pub fn arc_at_angle(&self, theta: f64) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut th = theta % two_pi;
        if th < 0.0 {
            th += two_pi;
        }
        match &self.kind {
            ShapeKind::Disc { radius } => radius * th,
            _ => {
                // dense monotone angle table over the parameter period
                let n = 720;
                let mut best_s = 0.0;
                let mut best_d = f64::INFINITY;
                for i in 0..n {
                    let t = self.t_period * i as f64 / n as f64;
                    let p = self.point_t(t);
                    let mut a = p[1].atan2(p[0]);
                    if a < 0.0 {
                        a += two_pi;
                    }
                    let mut d = (a - th).abs();
                    d = d.min(two_pi - d);
                    if d < best_d {
                        best_d = d;
                        // refine within the table cell via local search
                        let t_lo = t - self.t_period / n as f64;
                        let t_hi = t + self.t_period / n as f64;
                        let mut lo = t_lo;
                        let mut hi = t_hi;
                        for _ in 0..40 {
                            let mid = 0.5 * (lo + hi);
                            let pm = self.point_t(mid);
                            let mut am = pm[1].atan2(pm[0]);
                            if am < 0.0 {
                                am += two_pi;
                            }
                            // unwrap across the 0/2pi seam relative to th
                            let mut diff = am - th;
                            if diff > std::f64::consts::PI {
                                diff -= two_pi;
                            }
                            if diff < -std::f64::consts::PI {
                                diff += two_pi;
                            }
                            if diff > 0.0 {
                                hi = mid;
                            } else {
                                lo = mid;
                            }
                        }
                        let t_ref = 0.5 * (lo + hi);
                        let idx = ((t_ref / self.t_period * ARC_TABLE_LEN as f64).floor()
                            as usize)
                            .min(ARC_TABLE_LEN - 1);
                        let dt = self.t_period / ARC_TABLE_LEN as f64;
                        best_s = self.arc_table[idx]
                            + self.arc_from(idx, dt * idx as f64, t_ref);
                    }
                }
                best_s
            }
        }
    }

    /// Composite Gauss-Legendre quadrature nodes on arc-length panels.
    pub fn boundary_quadrature(&self, panels: usize, order: usize) -> Vec<BoundaryNode> {
        let rule = gauss_rule(order);
        let h = self.perimeter / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let s = mid + 0.5 * h * x;
                nodes.push(BoundaryNode {
                    s,
                    weight: w * 0.5 * h,
                    point: self.point(s),
                    inward_normal: self.inward_normal(s),
                });
            }
        }
        nodes
    }
}

/// One quadrature node on the hole boundary.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryNode {
    pub s: f64,
    pub weight: f64,
    pub point: [f64; 2],
    pub inward_normal: [f64; 2],
}

/// Periodic cubic spline through points, parametrized by cumulative chord
/// length.
#[derive(Debug, Clone)]
struct PeriodicSpline {
    knots: Vec<f64>,
    pts: Vec<[f64; 2]>,
    /// second derivatives at knots, per component
    m2: Vec<[f64; 2]>,
    period: f64,
}

impl PeriodicSpline {
    fn fit(points: &[[f64; 2]]) -> Result<PeriodicSpline> {
        let n = points.len();
        let mut pts: Vec<[f64; 2]> = points.to_vec();
        // drop an explicitly repeated closing point
        if norm([pts[0][0] - pts[n - 1][0], pts[0][1] - pts[n - 1][1]]) < 1e-14 {
            pts.pop();
        }
        let n = pts.len();
        let mut knots = Vec::with_capacity(n + 1);
        knots.push(0.0);
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            let d = norm([b[0] - a[0], b[1] - a[1]]);
            if d < 1e-14 {
                return Err(Error::geometry("repeated points in sampled shape".to_string()));
            }
            knots.push(knots[i] + d);
        }
        let period = knots[n];
        let mut m2 = vec![[0.0; 2]; n];
        for comp in 0..2 {
            let vals: Vec<f64> = pts.iter().map(|p| p[comp]).collect();
            let sol = periodic_spline_second_derivs(&knots, &vals);
            for (i, v) in sol.iter().enumerate() {
                m2[i][comp] = *v;
            }
        }
        Ok(PeriodicSpline { knots, pts, m2, period })
    }

    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let n = self.pts.len();
        let mut t = t % self.period;
        if t < 0.0 {
            t += self.period;
        }
        let i = self.knots.partition_point(|&k| k <= t).saturating_sub(1).min(n - 1);
        (i, t - self.knots[i], self.knots[i + 1] - self.knots[i])
    }

    fn eval(&self, t: f64) -> [f64; 2] {
        let n = self.pts.len();
        let (i, dx, h) = self.locate(t);
        let j = (i + 1) % n;
        let mut out = [0.0; 2];
        for c in 0..2 {
            let a = self.pts[i][c];
            let b = self.pts[j][c];
            let m0 = self.m2[i][c];
            let m1 = self.m2[j][c];
            let u = dx / h;
            out[c] = a * (1.0 - u) + b * u
                + h * h / 6.0
                    * (m0 * ((1.0 - u).powi(3) - (1.0 - u)) + m1 * (u.powi(3) - u));
        }
        out
    }

    fn eval_deriv(&self, t: f64) -> [f64; 2] {
        let n = self.pts.len();
        let (i, dx, h) = self.locate(t);
        let j = (i + 1) % n;
        let mut out = [0.0; 2];
        for c in 0..2 {
            let a = self.pts[i][c];
            let b = self.pts[j][c];
            let m0 = self.m2[i][c];
            let m1 = self.m2[j][c];
            let u = dx / h;
            out[c] = (b - a) / h
                + h / 6.0 * (m0 * (-3.0 * (1.0 - u).powi(2) + 1.0) + m1 * (3.0 * u * u - 1.0));
        }
        out
    }
}

/// Second derivatives of a periodic natural cubic spline (cyclic tridiagonal
/// system solved by Thomas + Sherman-Morrison).
fn periodic_spline_second_derivs(knots: &[f64], vals: &[f64]) -> Vec<f64> {
    let n = vals.len();
    let h = |i: usize| knots[i + 1] - knots[i];
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let hm = h((i + n - 1) % n);
        let hi = h(i);
        sub[i] = hm / 6.0;
        sup[i] = hi / 6.0;
        diag[i] = (hm + hi) / 3.0;
        let prev = vals[(i + n - 1) % n];
        let next = vals[(i + 1) % n];
        rhs[i] = (next - vals[i]) / hi - (vals[i] - prev) / hm;
    }
    // cyclic system: A x = rhs with corner entries sub[0] (to x_{n-1}) and
    // sup[n-1] (to x_0). Sherman-Morrison with u = e_0*g + e_{n-1}*sup[n-1]...
    let gamma = -diag[0];
    let mut dmod = diag.clone();
    dmod[0] -= gamma;
    dmod[n - 1] -= sub[0] * sup[n - 1] / gamma;
    let solve_tri = |d: &[f64], rhs: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut beta = d[0];
        x[0] = rhs[0] / beta;
        for i in 1..n {
            c[i] = sup[i - 1] / beta;
            beta = d[i] - sub[i] * c[i];
            x[i] = (rhs[i] - sub[i] * x[i - 1]) / beta;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i + 1] * x[i + 1];
        }
        x
    };
    let x1 = solve_tri(&dmod, &rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = sup[n - 1];
    let x2 = solve_tri(&dmod, &u);
    let vx1 = x1[0] + sub[0] / gamma * x1[n - 1];
    let vx2 = 1.0 + x2[0] + sub[0] / gamma * x2[n - 1];
    let factor = vx1 / vx2;
    (0..n).map(|i| x1[i] - factor * x2[i]).collect()
}

/// Robin profile alpha(s, mu) = alpha0(s) + mu alpha1(s) on the hole
/// boundary, with alpha0 computed from the shape and the matrix A.
#[derive(Debug, Clone)]
pub struct RobinCoefficient {
    pub shape: Arc<HoleShape>,
    pub matrix: SpdMatrix2,
    pub alpha1: Alpha1Spec,
}

/// User-supplied alpha1 profile.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Alpha1Spec {
    Constant { value: f64 },
    /// c0 + c1 cos(2 pi k s / |boundary|)
    Cosine { c0: f64, c1: f64, k: u32 },
}

impl Alpha1Spec {
    pub fn eval(&self, s: f64, perimeter: f64) -> f64 {
        match self {
            Alpha1Spec::Constant { value } => *value,
            Alpha1Spec::Cosine { c0, c1, k } => {
                c0 + c1 * (2.0 * std::f64::consts::PI * *k as f64 * s / perimeter).cos()
            }
        }
    }
}

impl RobinCoefficient {
    /// alpha0(s): conormal density of the log singular model at xi(s).
    pub fn alpha0(&self, s: f64) -> f64 {
        let xi = self.shape.point(s);
        let nu = self.shape.inward_normal(s);
        alpha0_at(&self.matrix, xi, nu)
    }

    pub fn alpha1(&self, s: f64) -> f64 {
        self.alpha1.eval(s, self.shape.perimeter())
    }

    /// alpha(s, mu) = alpha0(s) + mu alpha1(s), with mu = 1/ln(eps).
    pub fn eval(&self, s: f64, mu: f64) -> f64 {
        self.alpha0(s) + mu * self.alpha1(s)
    }
}

fn alpha0_at(a: &SpdMatrix2, xi: [f64; 2], nu: [f64; 2]) -> f64 {
    (nu[0] * xi[0] + nu[1] * xi[1]) / a.inv_quadratic_form(xi)
}

/// Build the computed alpha0 part of the Robin coefficient, validating the
/// shape against the matrix.
pub fn alpha0(shape: &Arc<HoleShape>, a: SpdMatrix2) -> Result<RobinCoefficient> {
    alpha0_with(shape, a, Alpha1Spec::Constant { value: 0.0 })
}

pub fn alpha0_with(
    shape: &Arc<HoleShape>,
    a: SpdMatrix2,
    alpha1: Alpha1Spec,
) -> Result<RobinCoefficient> {
    if shape.min_radius() < 1e-12 {
        return Err(Error::geometry(
            "alpha0: boundary touches the origin (xi(s) = 0)".to_string(),
        ));
    }
    if !shape.contains([0.0, 0.0]) {
        return Err(Error::geometry("alpha0: hole does not contain the origin".to_string()));
    }
    Ok(RobinCoefficient { shape: Arc::clone(shape), matrix: a, alpha1 })
}

/// Default boundary quadrature resolution: 64 panels x 8 Gauss points.
pub const DEFAULT_PANELS: usize = 64;
pub const DEFAULT_ORDER: usize = 8;

/// The universal boundary-integral constant: integral of alpha0 over the
/// boundary equals -theta(A) with theta = 2 pi sqrt(det A).
pub fn boundary_flux_constant(a: &SpdMatrix2) -> f64 {
    2.0 * std::f64::consts::PI * a.det().sqrt()
}

/// | integral of alpha0 ds + 2 pi sqrt(det A) |, the residual of the
/// boundary-integral identity. Zero (to quadrature accuracy) for every valid
/// shape and SPD matrix.
pub fn trace_identity_residual(shape: &Arc<HoleShape>, a: SpdMatrix2) -> Result<f64> {
    trace_identity_residual_with(shape, a, DEFAULT_PANELS, DEFAULT_ORDER)
}

pub fn trace_identity_residual_with(
    shape: &Arc<HoleShape>,
    a: SpdMatrix2,
    panels: usize,
    order: usize,
) -> Result<f64> {
    alpha0(shape, a)?; // validates the shape/matrix pair
    let integral: f64 = shape
        .boundary_quadrature(panels, order)
        .iter()
        .map(|n| n.weight * alpha0_at(&a, n.point, n.inward_normal))
        .sum();
    Ok((integral + boundary_flux_constant(&a)).abs())
}

/// Coupling data of the limit point interaction.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CouplingData {
    /// K = -int (alpha0 ln|A^{-1/2} xi| + alpha1) ds
    pub k: f64,
    /// beta = -K / theta(A), theta = 2 pi sqrt(det A)
    pub beta: f64,
    /// constant term of the defect function at the interaction point
    pub a: f64,
    /// ||G||^2 over the working domain
    pub norm_g2: f64,
    /// form-coercivity surrogate used in the admissibility inequality
    pub c2: f64,
    /// K > -c2 ||G||^2 - a theta(A)  and  |beta - a| > tolerance
    pub admissible: bool,
}

/// Compute K, beta and the admissibility flag. `a` and `norm_g2` come from
/// the defect-function construction; `c2` defaults to the smallest eigenvalue
/// of A when the caller has nothing better.
pub fn coupling_constants(
    robin: &RobinCoefficient,
    a_const: f64,
    norm_g2: f64,
    c2: f64,
) -> Result<CouplingData> {
    coupling_constants_with(robin, a_const, norm_g2, c2, DEFAULT_PANELS, DEFAULT_ORDER)
}

pub fn coupling_constants_with(
    robin: &RobinCoefficient,
    a_const: f64,
    norm_g2: f64,
    c2: f64,
    panels: usize,
    order: usize,
) -> Result<CouplingData> {
    let shape = &robin.shape;
    let a = robin.matrix;
    let inv_sqrt = a.inv_sqrt();
    let perim = shape.perimeter();
    let mut k = 0.0;
    for n in shape.boundary_quadrature(panels, order) {
        let y = inv_sqrt.apply(n.point);
        let logterm = norm(y).ln();
        let a0 = alpha0_at(&a, n.point, n.inward_normal);
        let a1 = robin.alpha1.eval(n.s, perim);
        k -= n.weight * (a0 * logterm + a1);
    }
    let theta = boundary_flux_constant(&a);
    let beta = -k / theta;
    let admissible = k > -c2 * norm_g2 - a_const * theta && (beta - a_const).abs() > BETA_EQ_A_TOL;
    Ok(CouplingData { k, beta, a: a_const, norm_g2, c2, admissible })
}

/// Boundary nodes of the scaled hole.
#[derive(Debug, Clone)]
pub struct ScaledHole {
    pub nodes: Vec<[f64; 2]>,
    /// arc positions on the scaled boundary, s_eps = eps * s
    pub arc_positions: Vec<f64>,
    pub perimeter: f64,
    pub eps: f64,
    pub center: [f64; 2],
}

/// Scaled boundary sampling of the hole: nodes x0 + eps * xi(s_i).
pub fn scale_hole(shape: &HoleShape, eps: f64, x0: [f64; 2], n_nodes: usize) -> Result<ScaledHole> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("scale_hole requires 0 < eps < 1, got {eps}")));
    }
    let l = shape.perimeter();
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut arc = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let s = l * i as f64 / n_nodes as f64;
        let xi = shape.point(s);
        nodes.push([x0[0] + eps * xi[0], x0[1] + eps * xi[1]]);
        arc.push(eps * s);
    }
    Ok(ScaledHole { nodes, arc_positions: arc, perimeter: eps * l, eps, center: x0 })
}
