//! Symmetric sparse matrices in CSR form, banded LDL^T factorization with a
//! conjugate-gradient fallback, and shift-invert subspace iteration for the
//! generalized symmetric eigenvalue problem.

use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Symmetric sparse matrix, full pattern stored (both triangles).
#[derive(Debug, Clone)]
pub struct SymmetricCsr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub vals: Vec<f64>,
}

/// Triplet accumulator for assembly.
#[derive(Debug, Clone)]
pub struct Triplets {
    pub n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(n: usize) -> Self {
        Triplets { n, entries: Vec::new() }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    pub fn to_csr(&self) -> SymmetricCsr {
        let n = self.n;
        let mut sorted = self.entries.clone();
        sorted.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SymmetricCsr { n, row_ptr, col_idx, vals }
    }
}

impl SymmetricCsr {
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.vals[k];
            }
        }
        0.0
    }

    /// Maximum asymmetry |K_ij - K_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if j > i {
                    worst = worst.max((self.vals[k] - self.get(j, i)).abs());
                }
            }
        }
        worst
    }

    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                bw = bw.max(self.col_idx[k].abs_diff(i));
            }
        }
        bw
    }

    /// y = alpha * A + beta * B pattern-merged (used for K - sigma M).
    pub fn linear_combination(&self, alpha: f64, other: &SymmetricCsr, beta: f64) -> SymmetricCsr {
        let mut t = Triplets::new(self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                t.add(i, self.col_idx[k], alpha * self.vals[k]);
            }
            for k in other.row_ptr[i]..other.row_ptr[i + 1] {
                t.add(i, other.col_idx[k], beta * other.vals[k]);
            }
        }
        t.to_csr()
    }
}

/// Banded LDL^T factorization (lower band, no pivoting).
pub struct BandFactor {
    n: usize,
    bw: usize,
    /// band[i][j] = L[i, i - bw + j] scaled storage; diag d separate
    band: Vec<f64>,
    d: Vec<f64>,
}

impl BandFactor {
    /// Factor a symmetric matrix given by CSR. Fails on tiny pivots.
    pub fn factor(a: &SymmetricCsr) -> Result<BandFactor> {
        let n = a.n;
        let bw = a.bandwidth();
        let stride = bw + 1;
        // dense band: row i stores columns [i-bw, i]
        let mut band = vec![0.0f64; n * stride];
        for i in 0..n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.col_idx[k];
                if j <= i && i - j <= bw {
                    band[i * stride + (bw - (i - j))] = a.vals[k];
                }
            }
        }
        let mut d = vec![0.0f64; n];
        let mut scale = 0.0f64;
        for i in 0..n {
            scale = scale.max(band[i * stride + bw].abs());
        }
        let tiny = 1e-14 * scale.max(1e-300);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            // L[i,j] for j in [j0, i)
            for j in j0..i {
                let mut sum = band[i * stride + (bw - (i - j))];
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    sum -= band[i * stride + (bw - (i - k))]
                        * band[j * stride + (bw - (j - k))]
                        * d[k];
                }
                band[i * stride + (bw - (i - j))] = sum / d[j];
            }
            let mut sum = band[i * stride + bw];
            for k in j0..i {
                let l = band[i * stride + (bw - (i - k))];
                sum -= l * l * d[k];
            }
            if sum.abs() < tiny {
                return Err(Error::numerical(format!(
                    "LDL^T pivot breakdown at row {i}: pivot {sum:.3e} (shift may \
                     coincide with an eigenvalue)"
                )));
            }
            d[i] = sum;
            band[i * stride + bw] = 1.0;
        }
        Ok(BandFactor { n, bw, band, d })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let bw = self.bw;
        let stride = bw + 1;
        let mut x = b.to_vec();
        // forward: L y = b
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            let mut sum = x[i];
            for j in j0..i {
                sum -= self.band[i * stride + (bw - (i - j))] * x[j];
            }
            x[i] = sum;
        }
        // diagonal
        for i in 0..n {
            x[i] /= self.d[i];
        }
        // backward: L^T x = y
        for i in (0..n).rev() {
            let jmax = (i + bw).min(n - 1);
            let mut sum = x[i];
            for j in i + 1..=jmax {
                sum -= self.band[j * stride + (bw - (j - i))] * x[j];
            }
            x[i] = sum;
        }
        x
    }
}

/// Jacobi-preconditioned conjugate gradients for SPD systems.
pub fn cg_solve(a: &SymmetricCsr, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.n;
    let mut diag = vec![0.0; n];
    for i in 0..n {
        let d = a.get(i, i);
        diag[i] = if d.abs() > 0.0 { 1.0 / d } else { 1.0 };
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        a.matvec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::numerical("CG: matrix not positive definite".to_string()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm < tol * bnorm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::numerical("CG did not converge".to_string()))
}

/// A linear system with symmetric matrix, right-hand side and Dirichlet
/// constraints (eliminated symmetrically with zero boundary values).
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: SymmetricCsr,
    pub rhs: Vec<f64>,
    pub dirichlet: Vec<usize>,
}

impl SparseSystem {
    /// Symmetric elimination of the Dirichlet rows/columns (homogeneous).
    pub fn constrained_matrix(&self) -> SymmetricCsr {
        let mut is_dir = vec![false; self.matrix.n];
        for &i in &self.dirichlet {
            is_dir[i] = true;
        }
        let mut t = Triplets::new(self.matrix.n);
        for i in 0..self.matrix.n {
            if is_dir[i] {
                t.add(i, i, 1.0);
                continue;
            }
            for k in self.matrix.row_ptr[i]..self.matrix.row_ptr[i + 1] {
                let j = self.matrix.col_idx[k];
                if !is_dir[j] {
                    t.add(i, j, self.matrix.vals[k]);
                }
            }
        }
        t.to_csr()
    }

    pub fn constrained_rhs(&self) -> Vec<f64> {
        let mut rhs = self.rhs.clone();
        for &i in &self.dirichlet {
            rhs[i] = 0.0;
        }
        rhs
    }

    /// Direct banded solve with CG fallback.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let a = self.constrained_matrix();
        let b = self.constrained_rhs();
        match BandFactor::factor(&a) {
            Ok(f) => Ok(f.solve(&b)),
            Err(_) => cg_solve(&a, &b, 1e-12, 20 * a.n),
        }
    }
}

/// One generalized eigenpair.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Shift-invert subspace iteration for K x = lambda M x, returning `count`
/// eigenpairs nearest the shift. Dirichlet constraints are eliminated
/// symmetrically; constrained entries of the eigenvectors are zero.
pub fn gen_eigs(
    k: &SymmetricCsr,
    m: &SymmetricCsr,
    count: usize,
    shift: f64,
    dirichlet: &[usize],
) -> Result<Vec<EigenPair>> {
    let n = k.n;
    let mut is_dir = vec![false; n];
    for &i in dirichlet {
        is_dir[i] = true;
    }
    let constrain = |a: &SymmetricCsr, diag: f64| -> SymmetricCsr {
        let mut t = Triplets::new(n);
        for i in 0..n {
            if is_dir[i] {
                t.add(i, i, diag);
                continue;
            }
            for kk in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.col_idx[kk];
                if !is_dir[j] {
                    t.add(i, j, a.vals[kk]);
                }
            }
        }
        t.to_csr()
    };
    // Dirichlet rows get diag 1 in K and 0 in M so they sit at infinity.
    let kc = constrain(k, 1.0);
    let mc = constrain(m, 0.0);
    let shifted = kc.linear_combination(1.0, &mc, -shift);
    let factor = match BandFactor::factor(&shifted) {
        Ok(f) => f,
        Err(e) => {
            // retry once with a perturbed shift
            let bump = 1e-3 * (1.0 + shift.abs());
            let shifted2 = kc.linear_combination(1.0, &mc, -(shift + bump));
            BandFactor::factor(&shifted2).map_err(|_| e)?
        }
    };

    let block = (count + 4).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let mut xs: Vec<Vec<f64>> = (0..block)
        .map(|_| {
            (0..n)
                .map(|i| if is_dir[i] { 0.0 } else { rng.gen_range(-1.0..1.0) })
                .collect()
        })
        .collect();

    let m_dot = |a: &[f64], b: &[f64], tmp: &mut Vec<f64>| -> f64 {
        mc.matvec(b, tmp);
        a.iter().zip(tmp.iter()).map(|(x, y)| x * y).sum()
    };

    let mut tmp = vec![0.0; n];
    let mut pairs: Vec<EigenPair> = Vec::new();
    for iter in 0..100 {
        // X <- (K - sigma M)^{-1} M X
        for x in xs.iter_mut() {
            mc.matvec(x, &mut tmp);
            *x = factor.solve(&tmp);
        }
        // M-orthonormalize (modified Gram-Schmidt)
        for i in 0..block {
            for j in 0..i {
                let c = {
                    let (head, tail) = xs.split_at_mut(i);
                    m_dot(&head[j], &tail[0], &mut tmp)
                };
                let (head, tail) = xs.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(head[j].iter()) {
                    *a -= c * b;
                }
            }
            let nrm = m_dot(&xs[i], &xs[i], &mut tmp).max(1e-300).sqrt();
            xs[i].iter_mut().for_each(|v| *v /= nrm);
        }
        // Rayleigh-Ritz on the block
        let mut kh = nalgebra::DMatrix::zeros(block, block);
        let mut mh = nalgebra::DMatrix::zeros(block, block);
        for i in 0..block {
            kc.matvec(&xs[i], &mut tmp);
            for j in 0..block {
                let v: f64 = xs[j].iter().zip(tmp.iter()).map(|(a, b)| a * b).sum();
                kh[(j, i)] = v;
            }
            mc.matvec(&xs[i], &mut tmp);
            for j in 0..block {
                let v: f64 = xs[j].iter().zip(tmp.iter()).map(|(a, b)| a * b).sum();
                mh[(j, i)] = v;
            }
        }
        // symmetrize and solve the small generalized problem via Cholesky of mh
        let kh = (kh.clone() + kh.transpose()) * 0.5;
        let mh = (mh.clone() + mh.transpose()) * 0.5;
        let chol = nalgebra::Cholesky::new(mh)
            .ok_or_else(|| Error::numerical("Rayleigh-Ritz mass block not SPD".to_string()))?;
        let l_inv = chol.l().try_inverse().unwrap();
        let std_mat = &l_inv * kh * l_inv.transpose();
        let eig = nalgebra::SymmetricEigen::new(std_mat);
        // sort Ritz values by distance to the shift
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&a, &b| {
            (eig.eigenvalues[a] - shift)
                .abs()
                .partial_cmp(&(eig.eigenvalues[b] - shift).abs())
                .unwrap()
        });
        // rotate the basis to Ritz vectors
        let coef = l_inv.transpose() * eig.eigenvectors.clone();
        let mut new_xs: Vec<Vec<f64>> = Vec::with_capacity(block);
        for &col in &order {
            let mut v = vec![0.0; n];
            for (bi, x) in xs.iter().enumerate() {
                let c = coef[(bi, col)];
                for (vi, xi) in v.iter_mut().zip(x.iter()) {
                    *vi += c * xi;
                }
            }
            new_xs.push(v);
        }
        xs = new_xs;
        // convergence of the leading `count` pairs
        pairs.clear();
        let mut all_ok = true;
        let mut tmp2 = vec![0.0; n];
        for (rank, &col) in order.iter().enumerate().take(count) {
            let lam = eig.eigenvalues[col];
            let x = &xs[rank];
            kc.matvec(x, &mut tmp);
            mc.matvec(x, &mut tmp2);
            let mut res = 0.0;
            let mut xn = 0.0;
            for i in 0..n {
                let r = tmp[i] - lam * tmp2[i];
                res += r * r;
                xn += x[i] * x[i];
            }
            let res = res.sqrt() / xn.sqrt().max(1e-300);
            if res > 1e-8 * (1.0 + lam.abs()) {
                all_ok = false;
            }
            pairs.push(EigenPair { value: lam, vector: x.clone(), residual: res });
        }
        if all_ok && iter >= 3 {
            pairs.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
            return Ok(pairs);
        }
    }
    Err(Error::numerical(format!(
        "subspace iteration did not converge; nearest Ritz value: {}",
        pairs.first().map(|p| p.value).unwrap_or(f64::NAN)
    )))
}
