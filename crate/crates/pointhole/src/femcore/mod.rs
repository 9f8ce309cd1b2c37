//! Shared finite-element infrastructure: P1 triangles, boundary mass with a
//! variable weight, sparse symmetric solves and generalized eigenpairs.

pub mod mesh;
pub mod sparse;

pub use mesh::{annulus_mesh, disc_mesh, disc_mesh_capped, BoundaryTag, GradingInfo, Mesh};
pub use sparse::{cg_solve, gen_eigs, BandFactor, EigenPair, SparseSystem, SymmetricCsr, Triplets};

use crate::geometry::SpdMatrix2;
use crate::quad::gauss_rule;

/// P1 stiffness matrix for the constant-coefficient operator -div(A grad u).
/// Exact for piecewise linears.
pub fn assemble_stiffness(mesh: &Mesh, a: &SpdMatrix2) -> SymmetricCsr {
    let mut t = Triplets::new(mesh.n_vertices());
    for tri in &mesh.triangles {
        let p = [mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]];
        let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
            - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
        let area = 0.5 * det;
        // gradients of barycentric coordinates
        let grads = [
            [(p[1][1] - p[2][1]) / det, (p[2][0] - p[1][0]) / det],
            [(p[2][1] - p[0][1]) / det, (p[0][0] - p[2][0]) / det],
            [(p[0][1] - p[1][1]) / det, (p[1][0] - p[0][0]) / det],
        ];
        for i in 0..3 {
            let agi = a.apply(grads[i]);
            for j in 0..3 {
                let v = area * (agi[0] * grads[j][0] + agi[1] * grads[j][1]);
                t.add(tri[i], tri[j], v);
            }
        }
    }
    t.to_csr()
}

/// Consistent P1 mass matrix.
pub fn assemble_mass(mesh: &Mesh) -> SymmetricCsr {
    let mut t = Triplets::new(mesh.n_vertices());
    for tri in &mesh.triangles {
        let p = [mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]];
        let area = 0.5
            * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
        for i in 0..3 {
            for j in 0..3 {
                let v = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                t.add(tri[i], tri[j], v);
            }
        }
    }
    t.to_csr()
}

/// Mass matrix weighted by a spatially varying coefficient, integrated with
/// the mid-edge rule (exact for quadratics, hence exact for P1 x P1 with a
/// constant weight).
pub fn assemble_weighted_mass<F: Fn([f64; 2]) -> f64>(mesh: &Mesh, weight: F) -> SymmetricCsr {
    let mut t = Triplets::new(mesh.n_vertices());
    for tri in &mesh.triangles {
        let p = [mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]];
        let area = 0.5
            * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
        // midpoints of edges opposite each vertex
        let mids = [
            [(p[1][0] + p[2][0]) / 2.0, (p[1][1] + p[2][1]) / 2.0],
            [(p[0][0] + p[2][0]) / 2.0, (p[0][1] + p[2][1]) / 2.0],
            [(p[0][0] + p[1][0]) / 2.0, (p[0][1] + p[1][1]) / 2.0],
        ];
        let w = [weight(mids[0]), weight(mids[1]), weight(mids[2])];
        // P1 basis at midpoint m: phi_i(mids[k]) = 0.5 * (1 - delta_{ik})
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 0.0;
                for k in 0..3 {
                    let phi_i = if k == i { 0.0 } else { 0.5 };
                    let phi_j = if k == j { 0.0 } else { 0.5 };
                    v += w[k] * phi_i * phi_j;
                }
                t.add(tri[i], tri[j], v * area / 3.0);
            }
        }
    }
    t.to_csr()
}

/// Boundary mass matrix on edges with the given tag, weighted by a function
/// of position. 3-point Gauss per edge.
pub fn boundary_mass<F: Fn([f64; 2]) -> f64>(
    mesh: &Mesh,
    tag: BoundaryTag,
    weight: F,
) -> SymmetricCsr {
    let rule = gauss_rule(3);
    let mut t = Triplets::new(mesh.n_vertices());
    for e in &mesh.boundary_edges {
        if e.2 != tag {
            continue;
        }
        let a = mesh.vertices[e.0];
        let b = mesh.vertices[e.1];
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let mut m = [[0.0f64; 2]; 2];
        for (&xq, &wq) in rule.nodes.iter().zip(&rule.weights) {
            let u = 0.5 * (1.0 + xq); // in [0,1]
            let point = [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])];
            let w = weight(point) * wq * 0.5 * len;
            let phi = [1.0 - u, u];
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] += w * phi[i] * phi[j];
                }
            }
        }
        let idx = [e.0, e.1];
        for i in 0..2 {
            for j in 0..2 {
                t.add(idx[i], idx[j], m[i][j]);
            }
        }
    }
    t.to_csr()
}

/// 7-point degree-5 quadrature on a triangle: returns the integral of f.
pub fn tri_quad7<F: FnMut([f64; 2]) -> f64>(p: &[[f64; 2]; 3], f: &mut F) -> f64 {
    const A: f64 = 0.470_142_064_105_115;
    const B: f64 = 0.059_715_871_789_77;
    const WA: f64 = 0.132_394_152_788_506;
    const WB: f64 = 0.125_939_180_544_827;
    const PTS: [([f64; 3], f64); 7] = [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
        ([A, A, 1.0 - 2.0 * A], WA),
        ([A, 1.0 - 2.0 * A, A], WA),
        ([1.0 - 2.0 * A, A, A], WA),
        ([B, B, 1.0 - 2.0 * B], WB),
        ([B, 1.0 - 2.0 * B, B], WB),
        ([1.0 - 2.0 * B, B, B], WB),
    ];
    let area = 0.5
        * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
            - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
    let mut sum = 0.0;
    for (l, w) in PTS {
        let x = [
            l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
            l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
        ];
        sum += w * f(x);
    }
    sum * area
}

/// Same rule with the P1 basis attached: adds the element load
/// int f phi_i to out[tri[i]], optionally subdividing `levels` times.
pub fn tri_load_p1<F: FnMut([f64; 2]) -> f64>(
    p: &[[f64; 2]; 3],
    levels: u32,
    f: &mut F,
    out: &mut [f64; 3],
) {
    const A: f64 = 0.470_142_064_105_115;
    const B: f64 = 0.059_715_871_789_77;
    const WA: f64 = 0.132_394_152_788_506;
    const WB: f64 = 0.125_939_180_544_827;
    const PTS: [([f64; 3], f64); 7] = [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
        ([A, A, 1.0 - 2.0 * A], WA),
        ([A, 1.0 - 2.0 * A, A], WA),
        ([1.0 - 2.0 * A, A, A], WA),
        ([B, B, 1.0 - 2.0 * B], WB),
        ([B, 1.0 - 2.0 * B, B], WB),
        ([1.0 - 2.0 * B, B, B], WB),
    ];
    // sub-triangles in barycentric coordinates of the parent
    fn recurse<F: FnMut([f64; 2]) -> f64>(
        p: &[[f64; 2]; 3],
        bary: &[[f64; 3]; 3],
        levels: u32,
        area: f64,
        f: &mut F,
        out: &mut [f64; 3],
    ) {
        if levels == 0 {
            for (l, w) in PTS {
                // barycentric of the quad point w.r.t. the parent triangle
                let lp = [
                    l[0] * bary[0][0] + l[1] * bary[1][0] + l[2] * bary[2][0],
                    l[0] * bary[0][1] + l[1] * bary[1][1] + l[2] * bary[2][1],
                    l[0] * bary[0][2] + l[1] * bary[1][2] + l[2] * bary[2][2],
                ];
                let x = [
                    lp[0] * p[0][0] + lp[1] * p[1][0] + lp[2] * p[2][0],
                    lp[0] * p[0][1] + lp[1] * p[1][1] + lp[2] * p[2][1],
                ];
                let fv = w * f(x) * area;
                out[0] += fv * lp[0];
                out[1] += fv * lp[1];
                out[2] += fv * lp[2];
            }
            return;
        }
        let mid = |a: &[f64; 3], b: &[f64; 3]| {
            [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0]
        };
        let m01 = mid(&bary[0], &bary[1]);
        let m12 = mid(&bary[1], &bary[2]);
        let m02 = mid(&bary[0], &bary[2]);
        let children = [
            [bary[0], m01, m02],
            [m01, bary[1], m12],
            [m02, m12, bary[2]],
            [m01, m12, m02],
        ];
        for c in &children {
            recurse(p, c, levels - 1, area / 4.0, f, out);
        }
    }
    let area = 0.5
        * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
            - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
    let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    recurse(p, &id, levels, area, f, out);
}

/// L2 norm of a P1 field over the mesh (consistent mass quadrature).
pub fn l2_norm(mesh: &Mesh, values: &[f64]) -> f64 {
    let m = assemble_mass(mesh);
    let mut tmp = vec![0.0; values.len()];
    m.matvec(values, &mut tmp);
    values
        .iter()
        .zip(&tmp)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_zero;

    #[test]
    fn patch_test_linear_exact() {
        let mesh = disc_mesh(1.0, 10).unwrap();
        let a = SpdMatrix2::diag(3.0, 1.5).unwrap();
        let k = assemble_stiffness(&mesh, &a);
        let u: Vec<f64> = mesh.vertices.iter().map(|v| 0.7 + 2.0 * v[0] - 1.3 * v[1]).collect();
        let mut ku = vec![0.0; u.len()];
        k.matvec(&u, &mut ku);
        let boundary: std::collections::HashSet<usize> =
            mesh.boundary_vertices(BoundaryTag::Outer).into_iter().collect();
        for i in 0..u.len() {
            if !boundary.contains(&i) {
                assert!(ku[i].abs() < 1e-12, "interior residual {} at {i}", ku[i]);
            }
        }
    }

    #[test]
    fn mass_total_equals_area() {
        let mesh = annulus_mesh(0.1, 1.0, 96).unwrap();
        let m = assemble_mass(&mesh);
        let ones = vec![1.0; mesh.n_vertices()];
        let mut tmp = vec![0.0; mesh.n_vertices()];
        m.matvec(&ones, &mut tmp);
        let total: f64 = tmp.iter().sum();
        assert!((total - mesh.area()).abs() < 1e-12 * mesh.area());
    }

    #[test]
    fn assembled_matrices_symmetric() {
        let mesh = annulus_mesh(0.05, 1.0, 64).unwrap();
        let k = assemble_stiffness(&mesh, &SpdMatrix2::diag(2.0, 1.0).unwrap());
        assert!(k.max_asymmetry() < 1e-12);
        let b = boundary_mass(&mesh, BoundaryTag::Hole, |p| 1.0 + p[0]);
        assert!(b.max_asymmetry() < 1e-14);
    }

    #[test]
    fn boundary_mass_row_sum_is_weighted_length() {
        let mesh = annulus_mesh(0.1, 1.0, 128).unwrap();
        let b = boundary_mass(&mesh, BoundaryTag::Hole, |_| 2.5);
        let ones = vec![1.0; mesh.n_vertices()];
        let mut tmp = vec![0.0; mesh.n_vertices()];
        b.matvec(&ones, &mut tmp);
        let total: f64 = tmp.iter().sum();
        // polygonal perimeter of the inner ring times the weight
        let nseg = 128u32;
        let poly_len = 2.0 * nseg as f64 * 0.1 * (std::f64::consts::PI / nseg as f64).sin();
        assert!((total - 2.5 * poly_len).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_disc_lowest_eigenvalue() {
        // modest mesh here; the ~30k-triangle version runs in the acceptance suite
        let mesh = disc_mesh(1.0, 40).unwrap();
        let k = assemble_stiffness(&mesh, &SpdMatrix2::identity());
        let m = assemble_mass(&mesh);
        let dir = mesh.boundary_vertices(BoundaryTag::Outer);
        let pairs = gen_eigs(&k, &m, 1, 0.0, &dir).unwrap();
        let exact = bessel_zero(0, 1).unwrap().powi(2);
        assert!(
            (pairs[0].value - exact).abs() < 5e-3 * exact,
            "lambda_h = {}, exact = {exact}",
            pairs[0].value
        );
    }

    #[test]
    fn manufactured_solution_second_order() {
        // u = (1 - r^2)/4 solves -lap u = 1, u = 0 on r = 1
        let mut errs = Vec::new();
        for rings in [16usize, 32, 64] {
            let mesh = disc_mesh(1.0, rings).unwrap();
            let k = assemble_stiffness(&mesh, &SpdMatrix2::identity());
            let m = assemble_mass(&mesh);
            let ones = vec![1.0; mesh.n_vertices()];
            let mut rhs = vec![0.0; mesh.n_vertices()];
            m.matvec(&ones, &mut rhs);
            let sys = SparseSystem {
                matrix: k,
                rhs,
                dirichlet: mesh.boundary_vertices(BoundaryTag::Outer),
            };
            let u = sys.solve().unwrap();
            let diff: Vec<f64> = mesh
                .vertices
                .iter()
                .zip(&u)
                .map(|(v, ui)| ui - (1.0 - v[0] * v[0] - v[1] * v[1]) / 4.0)
                .collect();
            errs.push(l2_norm(&mesh, &diff));
        }
        // least-squares slope of ln(err) vs ln(h) over the three levels
        let hs = [1.0f64 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
        let xm: f64 = hs.iter().map(|h| h.ln()).sum::<f64>() / 3.0;
        let ym: f64 = errs.iter().map(|e: &f64| e.ln()).sum::<f64>() / 3.0;
        let num: f64 = hs.iter().zip(&errs).map(|(h, e)| (h.ln() - xm) * (e.ln() - ym)).sum();
        let den: f64 = hs.iter().map(|h| (h.ln() - xm).powi(2)).sum();
        let order = num / den;
        assert!(order > 1.8 && order < 2.2, "observed order {order}, errors {errs:?}");
    }
}
