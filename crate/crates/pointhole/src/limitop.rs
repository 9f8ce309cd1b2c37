//! The limit point-interaction operator: domain functions carry a prescribed
//! logarithmic singularity at x0 with strength-to-value ratio pinned by beta.
//! The resolvent reduces to the base resolvent plus a rank-one correction
//! along the defect function (a scalar Krein-type equation); eigenvalues on
//! the centered disc come from a secular equation in the m = 0 sector while
//! every m >= 1 sector keeps the unperturbed Dirichlet values.

use crate::error::{Error, Result};
use crate::geometry::BETA_EQ_A_TOL;
use crate::green::{defect_disc, defect_plane, DefectFunction};
use crate::quad::{composite, graded_toward_start};
use crate::specfun::{bessel_zero, i0, i1, j0, k0, k1, y0, EULER_GAMMA};
use std::sync::Arc;

/// Base domain of the unperturbed operator (A = E, A0 = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseDomain {
    Plane,
    /// centered disc with Dirichlet outer boundary
    Disc { radius: f64 },
}

/// The limit operator data: base domain, defect function, its constant a,
/// and the interaction strength beta.
#[derive(Debug, Clone)]
pub struct PointInteractionOperator {
    pub base: BaseDomain,
    pub c1: f64,
    pub g: DefectFunction,
    pub a: f64,
    pub beta: f64,
    pub x0: [f64; 2],
    /// recorded metadata: the standard coupling constant 2 pi zeta = -b when
    /// the operator arises from the disc-hole benchmark
    pub aghh_zeta: Option<f64>,
}

impl PointInteractionOperator {
    pub fn new(base: BaseDomain, c1: f64, beta: f64) -> Result<Self> {
        let g = match base {
            BaseDomain::Plane => defect_plane(c1)?,
            BaseDomain::Disc { radius } => defect_disc(c1, radius)?,
        };
        let a = g.a;
        if (beta - a).abs() <= BETA_EQ_A_TOL {
            return Err(Error::domain(format!(
                "beta = {beta} is too close to a = {a}; the domain decomposition divides by beta - a"
            )));
        }
        Ok(PointInteractionOperator { base, c1, g, a, beta, x0: [0.0, 0.0], aghh_zeta: None })
    }

    /// Benchmark constructor: disc hole of radius b with constant alpha1
    /// gives beta = b alpha1 - ln b and the coupling constant 2 pi zeta = -b.
    pub fn from_disc_hole(base: BaseDomain, c1: f64, b: f64, alpha1: f64) -> Result<Self> {
        let beta = b * alpha1 - b.ln();
        let mut op = Self::new(base, c1, beta)?;
        op.aghh_zeta = Some(-b / (2.0 * std::f64::consts::PI));
        Ok(op)
    }

    fn defect_at_shift(&self, lambda: f64) -> Result<DefectFunction> {
        if !(lambda < 0.0) {
            return Err(Error::domain(format!(
                "resolvent shift requires lambda < 0, got {lambda}"
            )));
        }
        match self.base {
            BaseDomain::Plane => defect_plane(-lambda),
            BaseDomain::Disc { radius } => defect_disc(-lambda, radius),
        }
    }
}

/// A radial profile with bounded support (or effective decay radius).
#[derive(Clone)]
pub struct RadialFn {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub support: f64,
}

impl RadialFn {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F, support: f64) -> Self {
        RadialFn { f: Arc::new(f), support }
    }

    pub fn zero() -> Self {
        RadialFn { f: Arc::new(|_| 0.0), support: 1.0 }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r > self.support {
            0.0
        } else {
            (self.f)(r)
        }
    }
}

impl std::fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RadialFn(support = {})", self.support)
    }
}

/// The free resolvent (Op_base - lambda)^{-1} applied to a radial profile,
/// evaluated by the modified-Bessel kernel I0(k r<) K0(k r>), with the
/// Dirichlet reflection term on the disc.
#[derive(Debug, Clone)]
pub struct FreeResolvent {
    pub base: BaseDomain,
    pub lambda: f64,
    pub f: RadialFn,
    kappa: f64,
    /// K0(kR)/I0(kR) for the disc base
    reflect: f64,
}

const QUAD_LEVELS: usize = 40;
const QUAD_ORDER: usize = 12;

/// Construct the free resolvent field for lambda below the spectrum
/// (negative real axis).
pub fn free_resolvent_radial(
    base: BaseDomain,
    lambda: f64,
    f: RadialFn,
) -> Result<FreeResolvent> {
    if !(lambda < 0.0) {
        return Err(Error::domain(format!(
            "free_resolvent_radial supports real lambda < 0 (below the spectrum); got {lambda}"
        )));
    }
    let kappa = (-lambda).sqrt();
    let reflect = match base {
        BaseDomain::Plane => 0.0,
        BaseDomain::Disc { radius } => {
            if f.support > radius {
                return Err(Error::domain(
                    "profile support exceeds the disc radius".to_string(),
                ));
            }
            k0(kappa * radius) / i0(kappa * radius)
        }
    };
    if kappa * f.support > 280.0 {
        return Err(Error::numerical(
            "kappa * support too large for the unscaled Bessel kernel".to_string(),
        ));
    }
    Ok(FreeResolvent { base, lambda, f, kappa, reflect })
}

impl FreeResolvent {
    /// Kernel second factor: K0(k r) - reflect * I0(k r).
    fn outer(&self, r: f64) -> f64 {
        k0(self.kappa * r) - self.reflect * i0(self.kappa * r)
    }

    /// Field value at radius r.
    pub fn eval(&self, r: f64) -> f64 {
        let k = self.kappa;
        if r < 1e-14 {
            return self.at_center();
        }
        let s = self.f.support;
        let inner = graded_toward_start(
            |rho| i0(k * rho) * self.f.eval(rho) * rho,
            0.0,
            r.min(s),
            QUAD_LEVELS,
            QUAD_ORDER,
        );
        let outer = if r < s {
            composite(
                |rho| self.outer(rho) * self.f.eval(rho) * rho,
                r,
                s,
                QUAD_LEVELS,
                QUAD_ORDER,
            )
        } else {
            0.0
        };
        self.outer(r) * inner + i0(k * r) * outer
    }

    /// Value at the center: integral of the outer kernel against the profile.
    pub fn at_center(&self) -> f64 {
        graded_toward_start(
            |rho| self.outer(rho) * self.f.eval(rho) * rho,
            0.0,
            self.f.support,
            QUAD_LEVELS,
            QUAD_ORDER,
        )
    }

    /// Radial derivative of the field (the kernel boundary terms cancel).
    pub fn eval_deriv(&self, r: f64) -> f64 {
        let k = self.kappa;
        let s = self.f.support;
        let outer_d = |rr: f64| -k * k1(k * rr) - self.reflect * k * i1(k * rr);
        let inner = graded_toward_start(
            |rho| i0(k * rho) * self.f.eval(rho) * rho,
            0.0,
            r.min(s),
            QUAD_LEVELS,
            QUAD_ORDER,
        );
        let outer = if r < s {
            composite(
                |rho| self.outer(rho) * self.f.eval(rho) * rho,
                r,
                s,
                QUAD_LEVELS,
                QUAD_ORDER,
            )
        } else {
            0.0
        };
        outer_d(r) * inner + k * i1(k * r) * outer
    }
}

/// (R_lambda G)(x0) and the associated field: on the plane and disc, the
/// resolvent identity gives R_lambda G = (G_lambda - G) / (c1 + lambda)
/// where G_lambda is the defect function at shift -lambda.
#[derive(Debug, Clone)]
pub struct ResolventOfG {
    pub at_center: f64,
    g: DefectFunction,
    g_lambda: DefectFunction,
    denom: f64,
}

impl ResolventOfG {
    pub fn eval(&self, r: f64) -> f64 {
        (self.g_lambda.eval_radial(r) - self.g.eval_radial(r)) / self.denom
    }
}

pub fn resolvent_of_g(op: &PointInteractionOperator, lambda: f64) -> Result<ResolventOfG> {
    let denom = op.c1 + lambda;
    if denom.abs() < 1e-12 {
        return Err(Error::domain(format!(
            "lambda = {lambda} coincides with -c1; the closed form has a removable singularity there"
        )));
    }
    let g_lambda = op.defect_at_shift(lambda)?;
    let at_center = (g_lambda.a - op.a) / denom;
    Ok(ResolventOfG { at_center, g: op.g.clone(), g_lambda, denom })
}

/// Solution of (Op_{0,beta} - lambda) u0 = f: regular part v0, scalar charge
/// q = (beta - a)^{-1} v0(x0), and u0 = v0 + q G.
#[derive(Debug, Clone)]
pub struct LimitSolution {
    pub v0_at_x0: f64,
    pub charge: f64,
    pub lambda: f64,
    rf: FreeResolvent,
    rg: ResolventOfG,
    g: DefectFunction,
    coef_rg: f64,
}

impl LimitSolution {
    /// Regular part v0 at radius r.
    pub fn v0(&self, r: f64) -> f64 {
        self.rf.eval(r) + self.coef_rg * self.rg.eval(r)
    }

    /// Full solution u0 = v0 + q G at radius r.
    pub fn u0(&self, r: f64) -> f64 {
        self.v0(r) + self.charge * self.g.eval_radial(r)
    }
}

/// Solve the limit-operator resolvent equation via the scalar Krein-type
/// reduction: v0(x0) = (R_lambda f)(x0) / (1 - (beta-a)^{-1}(c1+lambda)(R_lambda G)(x0)).
pub fn limit_resolvent(
    op: &PointInteractionOperator,
    f: RadialFn,
    lambda: f64,
) -> Result<LimitSolution> {
    let rf = free_resolvent_radial(op.base, lambda, f)?;
    let rg = resolvent_of_g(op, lambda)?;
    let beta_a = op.beta - op.a;
    let denom = 1.0 - (op.c1 + lambda) * rg.at_center / beta_a;
    if denom.abs() < 1e-10 {
        return Err(Error::numerical(format!(
            "lambda = {lambda} is an eigenvalue of the limit operator (Krein denominator {denom:.2e})"
        )));
    }
    let v0_at_x0 = rf.at_center() / denom;
    let charge = v0_at_x0 / beta_a;
    Ok(LimitSolution {
        v0_at_x0,
        charge,
        lambda,
        rf,
        rg,
        g: op.g.clone(),
        coef_rg: (op.c1 + lambda) * charge,
    })
}

/// Secular function for the m = 0 sector on the disc of radius R: its roots
/// are the m = 0 eigenvalues of the limit operator. Written in the
/// pole-free form, multiplied through by J0 (lambda > 0) or I0 (lambda < 0).
pub fn secular_m0(beta: f64, radius: f64, lambda: f64) -> f64 {
    if lambda > 0.0 {
        let k = lambda.sqrt();
        ((k / 2.0).ln() + EULER_GAMMA - beta) * j0(k * radius)
            - std::f64::consts::FRAC_PI_2 * y0(k * radius)
    } else if lambda < 0.0 {
        let kap = (-lambda).sqrt();
        (EULER_GAMMA - std::f64::consts::LN_2 + 0.5 * (-lambda).ln() - beta) * i0(kap * radius)
            + k0(kap * radius)
    } else {
        // continuous limit at 0: both branches give -(beta + ln R)
        -(beta + radius.ln())
    }
}

/// The constant-term-to-log ratio N(lambda) of the radial profile (the
/// quantity that equals beta exactly at eigenvalues). Diverges at Dirichlet
/// m = 0 eigenvalues.
pub fn secular_ratio(radius: f64, lambda: f64) -> f64 {
    if lambda > 0.0 {
        let k = lambda.sqrt();
        (k / 2.0).ln() + EULER_GAMMA
            - std::f64::consts::FRAC_PI_2 * y0(k * radius) / j0(k * radius)
    } else if lambda < 0.0 {
        let kap = (-lambda).sqrt();
        EULER_GAMMA - std::f64::consts::LN_2 + 0.5 * (-lambda).ln()
            + k0(kap * radius) / i0(kap * radius)
    } else {
        -radius.ln()
    }
}

/// One eigenvalue of the limit operator on the disc, labelled by the angular
/// order m and the index within that sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscEigenvalue {
    pub m: u32,
    pub index: u32,
    pub lambda: f64,
}

/// Eigenvalues of the limit operator on the disc inside the window
/// [lo, hi]: secular roots in the m = 0 sector, unperturbed Dirichlet values
/// j_{m,k}^2 / R^2 for m in {1, 2}.
pub fn limit_eigenvalues_disc(
    op: &PointInteractionOperator,
    lo: f64,
    hi: f64,
) -> Result<Vec<DiscEigenvalue>> {
    let radius = match op.base {
        BaseDomain::Disc { radius } => radius,
        BaseDomain::Plane => {
            return Err(Error::domain(
                "limit_eigenvalues_disc requires the disc base".to_string(),
            ))
        }
    };
    if !(lo < hi) {
        return Err(Error::domain(format!("empty window [{lo}, {hi}]")));
    }
    let mut out = Vec::new();
    // m = 0: scan + bisection on the pole-free secular function
    let steps = 2000;
    let fsec = |l: f64| secular_m0(op.beta, radius, l);
    let mut prev_l = lo;
    let mut prev_v = fsec(prev_l);
    let mut index = 0u32;
    for i in 1..=steps {
        let l = lo + (hi - lo) * i as f64 / steps as f64;
        let v = fsec(l);
        if prev_v == 0.0 {
            // grid point exactly on a root
            out.push(DiscEigenvalue { m: 0, index, lambda: prev_l });
            index += 1;
        } else if prev_v * v < 0.0 {
            // reject sign changes caused by the J0 factor itself (poles of
            // the ratio, not eigenvalues): at a true root the ratio matches
            // beta; at a J0 zero the pole-free form changes sign too
            let root = bisect(&fsec, prev_l, l);
            let k = root.abs().sqrt();
            let is_j0_zero = root > 0.0 && j0(k * radius).abs() < 1e-9;
            if !is_j0_zero {
                out.push(DiscEigenvalue { m: 0, index, lambda: root });
                index += 1;
            }
        }
        prev_l = l;
        prev_v = v;
    }
    if out.is_empty() && hi > 0.0 {
        // fall through: m >= 1 may still contribute below
    }
    // m = 1, 2: Dirichlet disc values, independent of beta
    for m in 1..=2u32 {
        let mut k = 1u32;
        loop {
            let z = bessel_zero(m, k)?;
            let lambda = (z / radius).powi(2);
            if lambda > hi {
                break;
            }
            if lambda >= lo {
                out.push(DiscEigenvalue { m, index: k - 1, lambda });
            }
            k += 1;
            if k > 200 {
                break;
            }
        }
    }
    out.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    if out.is_empty() {
        return Err(Error::numerical(format!(
            "no eigenvalues found in [{lo}, {hi}] (no sign change of the secular function)"
        )));
    }
    Ok(out)
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-12 * (1.0 + mid.abs()) {
            return mid;
        }
        let fm = f(mid);
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}
