//! Triangular meshes: structured disc and annulus generators with geometric
//! grading, affine mapping, validation, and P1 point location.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    Outer,
    Hole,
}

#[derive(Debug, Clone, Copy)]
pub struct GradingInfo {
    pub h_min: f64,
    pub h_max: f64,
    pub rings: usize,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<(usize, usize, BoundaryTag)>,
    pub grading: GradingInfo,
}

fn tri_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| tri_area(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]))
            .sum()
    }

    pub fn min_angle_deg(&self) -> f64 {
        let mut worst = 180.0f64;
        for t in &self.triangles {
            let p = [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]];
            for i in 0..3 {
                let a = p[i];
                let b = p[(i + 1) % 3];
                let c = p[(i + 2) % 3];
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let dot = u[0] * v[0] + u[1] * v[1];
                let nu = u[0].hypot(u[1]);
                let nv = v[0].hypot(v[1]);
                let ang = (dot / (nu * nv)).clamp(-1.0, 1.0).acos().to_degrees();
                worst = worst.min(ang);
            }
        }
        worst
    }

    /// Conformity, orientation, quality and boundary-loop checks.
    pub fn validate(&self) -> Result<()> {
        use std::collections::HashMap;
        for (i, t) in self.triangles.iter().enumerate() {
            let a = tri_area(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]);
            if a <= 0.0 {
                return Err(Error::geometry(format!("triangle {i} has non-positive area {a}")));
            }
        }
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                let key = (u.min(v), u.max(v));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        if edge_count.values().any(|&c| c > 2) {
            return Err(Error::geometry("non-conforming mesh: edge shared by > 2 triangles".to_string()));
        }
        let boundary_from_tris: usize = edge_count.values().filter(|&&c| c == 1).count();
        if boundary_from_tris != self.boundary_edges.len() {
            return Err(Error::geometry(format!(
                "boundary edge bookkeeping mismatch: {} tagged vs {} geometric",
                self.boundary_edges.len(),
                boundary_from_tris
            )));
        }
        let min_angle = self.min_angle_deg();
        if min_angle < 20.0 {
            return Err(Error::geometry(format!("mesh quality too low: min angle {min_angle:.2} deg")));
        }
        // hole edges must form a single closed loop
        let hole: Vec<_> = self
            .boundary_edges
            .iter()
            .filter(|e| e.2 == BoundaryTag::Hole)
            .collect();
        if !hole.is_empty() {
            let mut next: HashMap<usize, usize> = HashMap::new();
            for e in &hole {
                if next.insert(e.0, e.1).is_some() {
                    return Err(Error::geometry("hole boundary is not a simple loop".to_string()));
                }
            }
            let start = hole[0].0;
            let mut cur = start;
            let mut steps = 0;
            loop {
                cur = *next
                    .get(&cur)
                    .ok_or_else(|| Error::geometry("hole boundary loop is broken".to_string()))?;
                steps += 1;
                if cur == start {
                    break;
                }
                if steps > hole.len() {
                    return Err(Error::geometry("hole boundary does not close".to_string()));
                }
            }
            if steps != hole.len() {
                return Err(Error::geometry("hole boundary has more than one loop".to_string()));
            }
        }
        Ok(())
    }

    /// Number of unique edges.
    pub fn n_edges(&self) -> usize {
        use std::collections::HashSet;
        let mut edges = HashSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                edges.insert((u.min(v), u.max(v)));
            }
        }
        edges.len()
    }

    /// Vertex indices lying on edges with the given tag.
    pub fn boundary_vertices(&self, tag: BoundaryTag) -> Vec<usize> {
        use std::collections::BTreeSet;
        let mut set = BTreeSet::new();
        for e in &self.boundary_edges {
            if e.2 == tag {
                set.insert(e.0);
                set.insert(e.1);
            }
        }
        set.into_iter().collect()
    }

    /// Locate the triangle containing the point; returns barycentric weights.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for (i, t) in self.triangles.iter().enumerate() {
            let a = self.vertices[t[0]];
            let b = self.vertices[t[1]];
            let c = self.vertices[t[2]];
            let area = tri_area(a, b, c);
            let l0 = tri_area(p, b, c) / area;
            let l1 = tri_area(a, p, c) / area;
            let l2 = 1.0 - l0 - l1;
            let worst = l0.min(l1).min(l2);
            if worst >= -1e-12 {
                return Some((i, [l0, l1, l2]));
            }
            if best.map_or(true, |(_, _, w)| worst > w) {
                best = Some((i, [l0, l1, l2], worst));
            }
        }
        // fall back to nearest triangle when the point is marginally outside
        best.and_then(|(i, l, w)| if w > -1e-6 { Some((i, l)) } else { None })
    }

    /// P1 interpolation of nodal values at a point.
    pub fn interpolate(&self, values: &[f64], p: [f64; 2]) -> Option<f64> {
        self.locate(p).map(|(i, l)| {
            let t = self.triangles[i];
            l[0] * values[t[0]] + l[1] * values[t[1]] + l[2] * values[t[2]]
        })
    }

    /// Apply an affine map x -> M x to every vertex.
    pub fn mapped(&self, m: [[f64; 2]; 2]) -> Mesh {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                [
                    m[0][0] * v[0] + m[0][1] * v[1],
                    m[1][0] * v[0] + m[1][1] * v[1],
                ]
            })
            .collect();
        Mesh {
            vertices,
            triangles: self.triangles.clone(),
            boundary_edges: self.boundary_edges.clone(),
            grading: self.grading,
        }
    }

    /// Plain-text dump: header "vertices N / triangles M / boundary K", then
    /// one row per entity.
    pub fn write_text<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "vertices {} / triangles {} / boundary {}",
            self.vertices.len(),
            self.triangles.len(),
            self.boundary_edges.len()
        )?;
        for v in &self.vertices {
            writeln!(w, "v {} {}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(w, "t {} {} {}", t[0], t[1], t[2])?;
        }
        for e in &self.boundary_edges {
            let tag = match e.2 {
                BoundaryTag::Outer => "outer",
                BoundaryTag::Hole => "hole",
            };
            writeln!(w, "b {} {} {}", e.0, e.1, tag)?;
        }
        Ok(())
    }
}

/// Triangulate the strip between two concentric vertex rings (arbitrary
/// counts) by a two-pointer angular merge.
fn bridge_rings(
    vertices: &[[f64; 2]],
    inner: &[usize],
    outer: &[usize],
    triangles: &mut Vec<[usize; 3]>,
) {
    let ang = |i: usize| {
        let v = vertices[i];
        let mut a = v[1].atan2(v[0]);
        if a < 0.0 {
            a += 2.0 * std::f64::consts::PI;
        }
        a
    };
    let ni = inner.len();
    let no = outer.len();
    let mut i = 0usize; // steps taken on inner
    let mut o = 0usize; // steps taken on outer
    // both rings are sorted by angle starting near 0
    while i < ni || o < no {
        let ii = inner[i % ni];
        let oo = outer[o % no];
        let advance_outer = if o >= no {
            false
        } else if i >= ni {
            true
        } else {
            // advance the ring whose next vertex has the smaller angle
            let next_i = ang(inner[(i + 1) % ni]) + if i + 1 >= ni { 2.0 * std::f64::consts::PI } else { 0.0 };
            let next_o = ang(outer[(o + 1) % no]) + if o + 1 >= no { 2.0 * std::f64::consts::PI } else { 0.0 };
            next_o <= next_i
        };
        if advance_outer {
            let on = outer[(o + 1) % no];
            triangles.push([ii, oo, on]);
            o += 1;
        } else {
            let inx = inner[(i + 1) % ni];
            triangles.push([ii, oo, inx]);
            i += 1;
        }
    }
}

/// Structured disc mesh: hexagonal core, ring i at radius R i / rings with
/// 6 i vertices (capped), CCW triangles. The center is vertex 0.
pub fn disc_mesh(radius: f64, rings: usize) -> Result<Mesh> {
    disc_mesh_capped(radius, rings, usize::MAX)
}

pub fn disc_mesh_capped(radius: f64, rings: usize, angular_cap: usize) -> Result<Mesh> {
    if rings < 2 {
        return Err(Error::geometry("disc mesh needs at least 2 rings".to_string()));
    }
    let mut vertices = vec![[0.0, 0.0]];
    let mut ring_idx: Vec<Vec<usize>> = Vec::with_capacity(rings + 1);
    ring_idx.push(vec![0]);
    for i in 1..=rings {
        let n = (6 * i).min(angular_cap);
        let r = radius * i as f64 / rings as f64;
        let mut idx = Vec::with_capacity(n);
        for k in 0..n {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            idx.push(vertices.len());
            vertices.push([r * th.cos(), r * th.sin()]);
        }
        ring_idx.push(idx);
    }
    let mut triangles = Vec::new();
    // center fan
    let first = &ring_idx[1];
    for k in 0..first.len() {
        triangles.push([0, first[k], first[(k + 1) % first.len()]]);
    }
    for i in 1..rings {
        bridge_rings(&vertices, &ring_idx[i], &ring_idx[i + 1], &mut triangles);
    }
    let outer = &ring_idx[rings];
    let boundary_edges = (0..outer.len())
        .map(|k| (outer[k], outer[(k + 1) % outer.len()], BoundaryTag::Outer))
        .collect();
    let h = radius / rings as f64;
    let mesh = Mesh {
        vertices,
        triangles,
        boundary_edges,
        grading: GradingInfo { h_min: h, h_max: h, rings },
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Annulus mesh r_inner < r < r_outer with n_theta vertices per ring and
/// radial spacing growing geometrically outward (self-similar cells,
/// geometric refinement toward the hole). The inner ring is tagged Hole.
pub fn annulus_mesh(r_inner: f64, r_outer: f64, n_theta: usize) -> Result<Mesh> {
    if !(r_inner > 0.0 && r_outer > r_inner) {
        return Err(Error::geometry(format!(
            "annulus radii invalid: inner {r_inner}, outer {r_outer}"
        )));
    }
    if n_theta < 64 {
        return Err(Error::geometry(format!(
            "hole boundary resolution must be >= 64 segments, got {n_theta}"
        )));
    }
    let mu = 2.0 * std::f64::consts::PI / n_theta as f64;
    // ring radii: geometric with ratio (1 + mu), snapped so the last is exact
    let n_rings_f = ((r_outer / r_inner).ln() / (1.0 + mu).ln()).ceil();
    let n_rings = (n_rings_f as usize).max(2);
    let ratio = (r_outer / r_inner).powf(1.0 / n_rings as f64);
    let mut vertices = Vec::with_capacity((n_rings + 1) * n_theta);
    for j in 0..=n_rings {
        let r = r_inner * ratio.powi(j as i32);
        for k in 0..n_theta {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64;
            vertices.push([r * th.cos(), r * th.sin()]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n_rings * n_theta);
    for j in 0..n_rings {
        let base0 = j * n_theta;
        let base1 = (j + 1) * n_theta;
        for k in 0..n_theta {
            let k1 = (k + 1) % n_theta;
            // split each quad along the diagonal, CCW
            triangles.push([base0 + k, base1 + k, base1 + k1]);
            triangles.push([base0 + k, base1 + k1, base0 + k1]);
        }
    }
    let mut boundary_edges = Vec::with_capacity(2 * n_theta);
    for k in 0..n_theta {
        let k1 = (k + 1) % n_theta;
        // inner ring loop oriented so edges run CCW along the hole
        boundary_edges.push((k, k1, BoundaryTag::Hole));
        let base = n_rings * n_theta;
        boundary_edges.push((base + k, base + k1, BoundaryTag::Outer));
    }
    let mesh = Mesh {
        vertices,
        triangles,
        boundary_edges,
        grading: GradingInfo {
            h_min: r_inner * mu,
            h_max: r_outer * mu.max(ratio - 1.0),
            rings: n_rings,
        },
    };
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_mesh_euler_and_area() {
        let m = disc_mesh(1.0, 20).unwrap();
        let v = m.n_vertices() as i64;
        let e = m.n_edges() as i64;
        let f = m.triangles.len() as i64;
        assert_eq!(v - e + f, 1, "disc topology");
        let deficit = std::f64::consts::PI - m.area();
        assert!(deficit > 0.0 && deficit < 1e-2, "area deficit {deficit}");
        assert!(m.min_angle_deg() >= 25.0);
    }

    #[test]
    fn annulus_mesh_euler_and_area() {
        let m = annulus_mesh(0.05, 1.0, 96).unwrap();
        let v = m.n_vertices() as i64;
        let e = m.n_edges() as i64;
        let f = m.triangles.len() as i64;
        assert_eq!(v - e + f, 0, "annulus topology");
        let exact = std::f64::consts::PI * (1.0 - 0.05 * 0.05);
        assert!((m.area() - exact).abs() < 5e-3);
        // refinement toward hole: inner cells much smaller than outer
        assert!(m.grading.h_min < 0.1 * m.grading.h_max);
    }

    #[test]
    fn annulus_area_high_resolution() {
        let m = annulus_mesh(0.05, 1.0, 600).unwrap();
        let exact = std::f64::consts::PI * (1.0 - 0.05 * 0.05);
        assert!((m.area() - exact).abs() < 1e-4, "area {}", m.area());
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(annulus_mesh(0.0, 1.0, 96).is_err());
        assert!(annulus_mesh(0.5, 0.4, 96).is_err());
        assert!(annulus_mesh(0.1, 1.0, 32).is_err(), "under-resolved hole must be rejected");
    }

    #[test]
    fn locate_and_interpolate() {
        let m = disc_mesh(1.0, 12).unwrap();
        let vals: Vec<f64> = m.vertices.iter().map(|v| 1.0 + 2.0 * v[0] - 0.5 * v[1]).collect();
        for p in [[0.0, 0.0], [0.3, 0.2], [-0.5, 0.1], [0.0, 0.9]] {
            let got = m.interpolate(&vals, p).unwrap();
            let expect = 1.0 + 2.0 * p[0] - 0.5 * p[1];
            assert!((got - expect).abs() < 1e-12, "P1 interpolation is exact on linears");
        }
    }

    #[test]
    fn refinement_halves_h() {
        let m1 = annulus_mesh(0.05, 1.0, 96).unwrap();
        let m2 = annulus_mesh(0.05, 1.0, 192).unwrap();
        let ratio = m2.grading.h_min / m1.grading.h_min;
        assert!((ratio - 0.5).abs() < 0.05);
    }
}
