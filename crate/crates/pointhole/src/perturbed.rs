//! Solvers for the perturbed operators: the exact radial benchmark on the
//! plane exterior of a shrinking disc hole, a radial eigenvalue solver on the
//! annulus, and finite-element assembly of the singularly scaled Robin form.
//!
//! The Robin coefficient on the scaled hole boundary is
//! alpha(s, 1/ln eps) / (eps ln eps) with alpha = alpha0 + alpha1 / ln eps,
//! and the normal points into the hole (out of the domain).

use crate::error::{Error, Result};
use crate::femcore::{
    assemble_stiffness, assemble_weighted_mass, boundary_mass, gen_eigs, BoundaryTag, EigenPair,
    Mesh, SymmetricCsr,
};
use crate::geometry::{RobinCoefficient, SpdMatrix2};
use crate::limitop::{BaseDomain, PointInteractionOperator};
use crate::specfun::{i0, i1, jm, k0, k1, ym};

/// Radial profile of the regular part in the benchmark.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct RadialGaussian {
    pub amp: f64,
    pub width: f64,
}

impl RadialGaussian {
    pub fn eval(&self, r: f64) -> f64 {
        self.amp * (-(r * r) / (self.width * self.width)).exp()
    }
    pub fn deriv(&self, r: f64) -> f64 {
        -2.0 * r / (self.width * self.width) * self.eval(r)
    }
    pub fn support(&self) -> f64 {
        8.0 * self.width + 1.0
    }
}

/// The explicit benchmark: whole plane, disc hole of radius b, constant
/// alpha1, c1 = 1, spectral parameter lambda < 0, radial Gaussian v0.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct RadialBenchmark {
    pub b: f64,
    pub alpha1: f64,
    pub lambda: f64,
    pub v0: RadialGaussian,
}

impl RadialBenchmark {
    pub fn beta(&self) -> f64 {
        self.b * self.alpha1 - self.b.ln()
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.b > 0.0) {
            bad.push(format!("hole radius b must be > 0, got {}", self.b));
        }
        if !(self.lambda < 0.0) {
            bad.push(format!("lambda must be < 0 on the plane, got {}", self.lambda));
        }
        if !(self.v0.width > 0.0) {
            bad.push("v0 width must be > 0".to_string());
        }
        if self.alpha1 == 0.0 {
            // allowed, but the leading term of the quotient degenerates
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }
}

/// Exact solution data of the perturbed radial problem at one eps.
#[derive(Debug, Clone)]
pub struct RadialPerturbedSolution {
    pub eps: f64,
    /// h_eps / c_eps: coefficient of K0(kappa r) in v_eps
    pub quotient: f64,
    pub h_eps: f64,
    pub c_eps: f64,
    pub kappa: f64,
    /// the full singular-Robin coefficient at the hole (constant for a disc)
    pub robin_coef: f64,
    pub benchmark: RadialBenchmark,
    op: PointInteractionOperator,
    charge: f64,
}

impl RadialPerturbedSolution {
    /// v_eps(r) = (h/c) K0(kappa r) for r >= b eps.
    pub fn v_eps(&self, r: f64) -> f64 {
        self.quotient * k0(self.kappa * r)
    }

    /// u0(r) = v0(r) + q G(r).
    pub fn u0(&self, r: f64) -> f64 {
        self.benchmark.v0.eval(r) + self.charge * self.op.g.eval_radial(r)
    }

    /// u_eps = u0 + v_eps.
    pub fn u_eps(&self, r: f64) -> f64 {
        self.u0(r) + self.v_eps(r)
    }

    /// Residual of the Robin condition at r = b eps, relative to h_eps:
    /// |[-d/dr + coef] v_eps - h_eps| / |h_eps|.
    pub fn robin_residual(&self) -> f64 {
        let rho = self.benchmark.b * self.eps;
        let dv = -self.quotient * self.kappa * k1(self.kappa * rho);
        let bc = -dv + self.robin_coef * self.v_eps(rho);
        (bc - self.h_eps).abs() / self.h_eps.abs().max(1e-300)
    }

    /// Leading term of the quotient from the explicit asymptotics (real
    /// reduction of the Hankel-basis formula).
    pub fn leading_term(&self) -> f64 {
        let bench = &self.benchmark;
        let beta = bench.beta();
        let a = self.op.a;
        let denominator = 1.0 - self.kappa.ln() / (beta - a);
        bench.v0.eval(0.0) * bench.alpha1 * bench.alpha1 * bench.b * bench.b
            / ((beta - a) * (beta - a) * denominator * self.eps.ln())
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }
}

/// Solve the benchmark at one eps: compute u0 from the limit operator data,
/// evaluate h_eps and c_eps in the K0 basis, and return the exact v_eps.
pub fn radial_defect_solve(bench: &RadialBenchmark, eps: f64) -> Result<RadialPerturbedSolution> {
    bench.validate()?;
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::domain(format!(
            "radial_defect_solve requires eps in (0, 0.5], got {eps}"
        )));
    }
    let op = PointInteractionOperator::from_disc_hole(BaseDomain::Plane, 1.0, bench.b, bench.alpha1)?;
    let beta = op.beta;
    let a = op.a;
    let charge = bench.v0.eval(0.0) / (beta - a);
    let kappa = (-bench.lambda).sqrt();
    let l = eps.ln();
    let coef = (1.0 / (eps * l)) * (1.0 / bench.b - bench.alpha1 / l);
    let rho = bench.b * eps;
    // u0 = v0 + q G, G = -K0(r) for c1 = 1
    let u0 = bench.v0.eval(rho) + charge * (-k0(rho));
    let du0 = bench.v0.deriv(rho) + charge * k1(rho);
    let h_eps = du0 - coef * u0;
    let c_eps = kappa * k1(kappa * rho) + coef * k0(kappa * rho);
    if c_eps.abs() < 1e-12 * (kappa * k1(kappa * rho)).abs() {
        return Err(Error::numerical(format!(
            "c_eps vanishes at eps = {eps} (spectral collision)"
        )));
    }
    Ok(RadialPerturbedSolution {
        eps,
        quotient: h_eps / c_eps,
        h_eps,
        c_eps,
        kappa,
        robin_coef: coef,
        benchmark: *bench,
        op,
        charge,
    })
}

/// Norms of v_eps = (h/c) K0(kappa r) over the exterior r > b eps, in closed
/// form via the K0/K1 antiderivatives.
#[derive(Debug, Clone, Copy)]
pub struct ExteriorNorms {
    pub l2: f64,
    pub grad_l2: f64,
}

pub fn exterior_norms(sol: &RadialPerturbedSolution) -> ExteriorNorms {
    let z = sol.kappa * sol.benchmark.b * sol.eps;
    let q = sol.quotient.abs();
    let k0z = k0(z);
    let k1z = k1(z);
    // int_z^inf K0^2 t dt = z^2 (K1^2 - K0^2) / 2
    let l2 = q * (std::f64::consts::PI * z * z * (k1z * k1z - k0z * k0z)).sqrt() / sol.kappa;
    // int_z^inf K1^2 t dt = z^2 (K0^2 - K1^2) / 2 + z K0 K1
    let grad_int = z * z * (k0z * k0z - k1z * k1z) / 2.0 + z * k0z * k1z;
    let grad_l2 = q * (2.0 * std::f64::consts::PI * grad_int).sqrt();
    ExteriorNorms { l2, grad_l2 }
}

/// H1 norm of the cutoff error chi v_eps where chi ramps from 0 to 1 over
/// [r_lo, r_hi] (the localized resolvent estimate).
pub fn localized_h1_norm(sol: &RadialPerturbedSolution, r_lo: f64, r_hi: f64) -> f64 {
    let kappa = sol.kappa;
    let q = sol.quotient;
    let chi = |r: f64| 1.0 - crate::green::cutoff(r, r_lo, r_hi);
    let integrand = |r: f64| {
        let c = chi(r);
        if c == 0.0 {
            return 0.0;
        }
        let v = q * k0(kappa * r);
        let dv = -q * kappa * k1(kappa * r);
        let dchi = -(crate::green::cutoff(r + 1e-6, r_lo, r_hi)
            - crate::green::cutoff(r - 1e-6, r_lo, r_hi))
            / 2e-6;
        let w = c * v;
        let dw = dchi * v + c * dv;
        (w * w + dw * dw) * r
    };
    let upper = (40.0 / kappa).max(r_hi * 2.0);
    let val = crate::quad::composite(integrand, r_lo, upper, 200, 10);
    (2.0 * std::f64::consts::PI * val).sqrt()
}

/// Deviation of the scaled defect-profile from its limit:
/// max_s | eps ln(eps) (dG/dn - W G)(x0 + eps xi(s)) - Phi1(s) | with
/// W the full Robin coefficient and
/// Phi1(s) = -alpha0(s)(ln|A^{-1/2} xi(s)| + a) - alpha1(s).
pub fn defect_profile_residual(robin: &RobinCoefficient, c1: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must be in (0,1), got {eps}")));
    }
    if !(c1 > 0.0) {
        return Err(Error::domain("c1 must be positive".to_string()));
    }
    let a_mat = robin.matrix;
    let a_inv = a_mat.inverse();
    let kappa = c1.sqrt();
    let a_const = crate::specfun::EULER_GAMMA - std::f64::consts::LN_2 + 0.5 * c1.ln();
    let l = eps.ln();
    let mu = 1.0 / l;
    let mut worst = 0.0f64;
    for node in robin.shape.boundary_quadrature(64, 4) {
        let xi = node.point;
        let nu = node.inward_normal;
        // x = x0 + eps xi; G(x) = -K0(kappa |A^{-1/2} x~|)
        let x_t = [eps * xi[0], eps * xi[1]];
        let ai_x = a_inv.apply(x_t);
        let ry = (x_t[0] * ai_x[0] + x_t[1] * ai_x[1]).sqrt();
        let g = -k0(kappa * ry);
        // conormal: nu . A grad G = kappa K1(kappa ry) (nu . x~)/ry
        let dgdn = kappa * k1(kappa * ry) * (nu[0] * x_t[0] + nu[1] * x_t[1]) / ry;
        let w = robin.eval(node.s, mu) / (eps * l);
        let d = dgdn - w * g;
        let ry_xi = a_mat.inv_quadratic_form(xi).sqrt();
        let phi1 = -robin.alpha0(node.s) * (ry_xi.ln() + a_const) - robin.alpha1(node.s);
        worst = worst.max((eps * l * d - phi1).abs());
    }
    Ok(worst)
}

/// Determinant of the 2x2 system (Dirichlet at R, singular Robin at rho) for
/// the angular sector m at spectral parameter lambda. Roots are the annulus
/// eigenvalues. coef is the full Robin coefficient value (disc hole).
pub fn annulus_determinant(m: u32, lambda: f64, rho: f64, r_outer: f64, coef: f64) -> f64 {
    if lambda > 0.0 {
        let k = lambda.sqrt();
        // J'_m = J_{m-1} - (m/x) J_m (with J_{-1} = -J_1), same for Y
        let jp = |x: f64| {
            if m == 0 {
                -jm(1, x)
            } else {
                jm(m - 1, x) - (m as f64 / x) * jm(m, x)
            }
        };
        let yp = |x: f64| {
            if m == 0 {
                -ym(1, x)
            } else {
                ym(m - 1, x) - (m as f64 / x) * ym(m, x)
            }
        };
        let row_j = -k * jp(k * rho) + coef * jm(m, k * rho);
        let row_y = -k * yp(k * rho) + coef * ym(m, k * rho);
        jm(m, k * r_outer) * row_y - ym(m, k * r_outer) * row_j
    } else {
        let kap = (-lambda).max(1e-300).sqrt();
        let iv = |mm: u32, x: f64| match mm {
            0 => i0(x),
            1 => i1(x),
            2 => i0(x) - 2.0 * i1(x) / x,
            _ => unreachable!(),
        };
        let kv = |mm: u32, x: f64| match mm {
            0 => k0(x),
            1 => k1(x),
            2 => k0(x) + 2.0 * k1(x) / x,
            _ => unreachable!(),
        };
        let ip = |x: f64| {
            if m == 0 {
                i1(x)
            } else {
                iv(m - 1, x) - (m as f64 / x) * iv(m, x)
            }
        };
        let kp = |x: f64| {
            if m == 0 {
                -k1(x)
            } else {
                -kv(m - 1, x) - (m as f64 / x) * kv(m, x)
            }
        };
        let row_i = -kap * ip(kap * rho) + coef * iv(m, kap * rho);
        let row_k = -kap * kp(kap * rho) + coef * kv(m, kap * rho);
        iv(m, kap * r_outer) * row_k - kv(m, kap * r_outer) * row_i
    }
}

/// Annulus configuration for the eigenvalue path: disc hole of radius b
/// scaled by eps, Dirichlet at r_outer, constant alpha1.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct AnnulusConfig {
    pub b: f64,
    pub r_outer: f64,
    pub alpha1: f64,
}

impl AnnulusConfig {
    pub fn beta(&self) -> f64 {
        self.b * self.alpha1 - self.b.ln()
    }

    pub fn robin_coef(&self, eps: f64) -> f64 {
        let l = eps.ln();
        (1.0 / (eps * l)) * (1.0 / self.b - self.alpha1 / l)
    }
}

/// Eigenvalues of the perturbed annulus operator in the window, for one
/// angular sector, by scan + bisection on the determinant.
pub fn perturbed_eigs_annulus(
    cfg: &AnnulusConfig,
    eps: f64,
    m: u32,
    lo: f64,
    hi: f64,
    count: usize,
) -> Result<Vec<f64>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must be in (0,1), got {eps}")));
    }
    if !(lo < hi) {
        return Err(Error::domain(format!("empty window [{lo}, {hi}]")));
    }
    if cfg.b * eps >= cfg.r_outer {
        return Err(Error::geometry("scaled hole reaches the outer boundary".to_string()));
    }
    let rho = cfg.b * eps;
    let coef = cfg.robin_coef(eps);
    let f = |l: f64| annulus_determinant(m, l, rho, cfg.r_outer, coef);
    let steps = 2000;
    let mut roots = Vec::new();
    let mut prev_l = lo;
    let mut prev_v = f(prev_l);
    for i in 1..=steps {
        let l = lo + (hi - lo) * i as f64 / steps as f64;
        let v = f(l);
        // the two basis branches (J/Y vs I/K) are normalized differently, so
        // the determinant jumps across lambda = 0; never bracket the seam
        if prev_l < 0.0 && l >= 0.0 {
            prev_l = l.max(1e-12);
            prev_v = f(prev_l);
            continue;
        }
        if prev_v * v < 0.0 {
            let mut a = prev_l;
            let mut b = l;
            let mut fa = prev_v;
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if b - a < 1e-12 * (1.0 + mid.abs()) {
                    break;
                }
                let fm = f(mid);
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
            if roots.len() >= count {
                break;
            }
        }
        prev_l = l;
        prev_v = v;
    }
    if roots.is_empty() {
        return Err(Error::numerical(format!(
            "no sign change of the m = {m} determinant in [{lo}, {hi}] at eps = {eps}"
        )));
    }
    Ok(roots)
}

/// Exact radial solution of (H_eps - lambda) u = f on the annulus
/// b eps < r < R with Dirichlet at R and the singular Robin condition at the
/// hole: u = w + c Z where w is the Dirichlet-disc resolvent field (regular
/// at 0) and Z the singular homogeneous solution vanishing at R.
#[derive(Debug)]
pub struct AnnulusRadialSolution {
    pub lambda: f64,
    pub kappa: f64,
    pub coef: f64,
    pub correction: f64,
    free: crate::limitop::FreeResolvent,
    reflect: f64,
    r_outer: f64,
}

impl AnnulusRadialSolution {
    fn z_hom(&self, r: f64) -> f64 {
        k0(self.kappa * r) - self.reflect * i0(self.kappa * r)
    }

    fn z_hom_deriv(&self, r: f64) -> f64 {
        -self.kappa * (k1(self.kappa * r) + self.reflect * i1(self.kappa * r))
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.r_outer {
            return 0.0;
        }
        self.free.eval(r) + self.correction * self.z_hom(r)
    }

    pub fn eval_deriv(&self, r: f64) -> f64 {
        self.free.eval_deriv(r) + self.correction * self.z_hom_deriv(r)
    }
}

/// Solve the annulus problem exactly for a radial profile and lambda < 0.
pub fn annulus_radial_solve(
    cfg: &AnnulusConfig,
    eps: f64,
    lambda: f64,
    f: crate::limitop::RadialFn,
) -> Result<AnnulusRadialSolution> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must be in (0,1), got {eps}")));
    }
    let free = crate::limitop::free_resolvent_radial(
        crate::limitop::BaseDomain::Disc { radius: cfg.r_outer },
        lambda,
        f,
    )?;
    let kappa = (-lambda).sqrt();
    let reflect = k0(kappa * cfg.r_outer) / i0(kappa * cfg.r_outer);
    let rho = cfg.b * eps;
    let coef = cfg.robin_coef(eps);
    // Robin operator B[u] = -u'(rho) + coef u(rho); choose the correction so
    // B[w + c Z] = 0
    let bw = -free.eval_deriv(rho) + coef * free.eval(rho);
    let z = k0(kappa * rho) - reflect * i0(kappa * rho);
    let dz = -kappa * (k1(kappa * rho) + reflect * i1(kappa * rho));
    let bz = -dz + coef * z;
    if bz.abs() < 1e-14 * (kappa * k1(kappa * rho)).abs() {
        return Err(Error::numerical(format!(
            "annulus Robin operator degenerate at eps = {eps} (spectral collision)"
        )));
    }
    Ok(AnnulusRadialSolution {
        lambda,
        kappa,
        coef,
        correction: -bw / bz,
        free,
        reflect,
        r_outer: cfg.r_outer,
    })
}

/// Assembled discrete form of the perturbed operator on a meshed domain:
/// stiffness (constant A) + A0 mass - singular Robin boundary mass.
#[derive(Debug, Clone)]
pub struct PerturbedSystem {
    pub mesh: Mesh,
    pub k_total: SymmetricCsr,
    pub mass: SymmetricCsr,
    pub dirichlet: Vec<usize>,
    pub eps: f64,
}

/// Assemble the singular-Robin form: the hole-boundary mass carries the
/// weight alpha(s/eps-arc, 1/ln eps)/(eps ln eps) evaluated at the unscaled
/// arc position of each boundary point.
pub fn assemble_perturbed_form<F: Fn([f64; 2]) -> f64>(
    mesh: Mesh,
    a: &SpdMatrix2,
    a0: F,
    robin: &RobinCoefficient,
    eps: f64,
) -> Result<PerturbedSystem> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must be in (0,1), got {eps}")));
    }
    let hole_edges = mesh
        .boundary_edges
        .iter()
        .filter(|e| e.2 == BoundaryTag::Hole)
        .count();
    if hole_edges < 64 {
        return Err(Error::geometry(format!(
            "hole boundary under-resolved: {hole_edges} segments (need >= 64)"
        )));
    }
    let l = eps.ln();
    let mu = 1.0 / l;
    let shape = robin.shape.clone();
    let weight = move |x: [f64; 2]| -> f64 {
        // unscale: xi = x / eps, then locate the arc position by angle
        let xi = [x[0] / eps, x[1] / eps];
        let s = shape.arc_at_angle(xi[1].atan2(xi[0]));
        robin.eval(s, mu) / (eps * l)
    };
    let stiff = assemble_stiffness(&mesh, a);
    let react = assemble_weighted_mass(&mesh, &a0);
    let bdry = boundary_mass(&mesh, BoundaryTag::Hole, weight);
    let volume = stiff.linear_combination(1.0, &react, 1.0);
    let k_total = volume.linear_combination(1.0, &bdry, -1.0);
    let mass = crate::femcore::assemble_mass(&mesh);
    let dirichlet = mesh.boundary_vertices(BoundaryTag::Outer);
    Ok(PerturbedSystem { mesh, k_total, mass, dirichlet, eps })
}

/// Solve (H_eps - lambda) u = f on the mesh.
pub fn solve_perturbed<F: Fn([f64; 2]) -> f64>(
    sys: &PerturbedSystem,
    f: F,
    lambda: f64,
) -> Result<Vec<f64>> {
    let n = sys.mesh.n_vertices();
    let fv: Vec<f64> = sys.mesh.vertices.iter().map(|v| f(*v)).collect();
    let mut rhs = vec![0.0; n];
    sys.mass.matvec(&fv, &mut rhs);
    let shifted = sys.k_total.linear_combination(1.0, &sys.mass, -lambda);
    let system = crate::femcore::SparseSystem {
        matrix: shifted,
        rhs,
        dirichlet: sys.dirichlet.clone(),
    };
    system.solve().map_err(|e| {
        // report the nearest Ritz value to help diagnose a near-spectrum solve
        let nearest = gen_eigs(&sys.k_total, &sys.mass, 1, lambda, &sys.dirichlet)
            .map(|p| p[0].value)
            .unwrap_or(f64::NAN);
        Error::numerical(format!(
            "perturbed solve failed near lambda = {lambda} (nearest Ritz value {nearest}): {e}"
        ))
    })
}

/// Lowest-count eigenpairs of the discrete perturbed operator nearest the
/// shift.
pub fn eigs_perturbed(sys: &PerturbedSystem, count: usize, shift: f64) -> Result<Vec<EigenPair>> {
    gen_eigs(&sys.k_total, &sys.mass, count, shift, &sys.dirichlet)
}
