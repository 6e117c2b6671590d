//! Internal numerical kernels: rank decisions, spans, null spaces.
//!
//! Every degeneracy decision in the crate funnels through [`rank_threshold`]:
//! singular values at or below `tol * max(1, sigma_max)` are treated as zero.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default tolerance for all rank and degeneracy decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Threshold below which a singular value counts as zero.
pub fn rank_threshold(sigma_max: f64, tol: f64) -> f64 {
    tol * sigma_max.max(1.0)
}

/// Numerical rank of `a`.
pub fn rank(a: &DMatrix<f64>, tol: f64) -> usize {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0;
    }
    let sv = a.clone().singular_values();
    let thresh = rank_threshold(sv.max(), tol);
    sv.iter().filter(|&&s| s > thresh).count()
}

/// Euclidean-orthonormal basis of the column space of `a` (dim x r).
///
/// The rank comes from the singular values; the basis comes from the
/// decomposition's dominant vectors sharpened by two subspace-iteration
/// steps. The sharpening matters: on badly scaled inputs the raw singular
/// vectors can be several orders of magnitude less accurate than the
/// values.
pub fn col_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let sv = &svd.singular_values;
    let thresh = rank_threshold(sv.max(), tol);
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let r = sv.iter().filter(|&&s| s > thresh).count();
    if r == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let u = svd.u.unwrap();
    let mut basis = DMatrix::zeros(a.nrows(), r);
    for (k, &idx) in order.iter().take(r).enumerate() {
        basis.set_column(k, &u.column(idx));
    }
    for _ in 0..2 {
        let amplified = a * (a.transpose() * &basis);
        let q = amplified.qr().q();
        if q.ncols() == r {
            basis = q;
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of the column space of an
/// orthonormal `basis` (n x r), from the full Householder factor.
fn orthonormal_complement(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.nrows();
    let r = basis.ncols();
    if r == 0 {
        return DMatrix::identity(n, n);
    }
    let qr = basis.clone().qr();
    let mut q_tr = DMatrix::<f64>::identity(n, n);
    qr.q_tr_mul(&mut q_tr);
    q_tr.rows(r, n - r).transpose()
}

/// Euclidean-orthonormal basis of the null space of `a` (ncols x k),
/// computed as the orthogonal complement of the refined row space.
pub fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let (m, n) = a.shape();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m == 0 {
        return DMatrix::identity(n, n);
    }
    let row_space = col_space(&a.transpose(), tol);
    orthonormal_complement(&row_space)
}

/// Eigenvalues and eigenvectors of a symmetric matrix, sorted ascending.
pub fn sym_eigen_sorted(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Flip the sign of `v` so its first nonzero coordinate is positive.
pub fn sign_normalize(v: &DVector<f64>, tol: f64) -> DVector<f64> {
    for x in v.iter() {
        if x.abs() > tol {
            return if *x < 0.0 { -v } else { v.clone() };
        }
    }
    v.clone()
}

/// Deterministic pick among candidate directions: sign-normalize each, then
/// prefer the lowest index of the first nonzero coordinate, the largest value
/// at it, and finally lexicographic order.
pub fn pick_canonical(candidates: &[DVector<f64>], tol: f64) -> Option<DVector<f64>> {
    let mut best: Option<DVector<f64>> = None;
    for c in candidates {
        let norm = c.norm();
        if norm <= tol {
            continue;
        }
        let cand = sign_normalize(&(c / norm), tol);
        best = match best {
            None => Some(cand),
            Some(cur) => {
                let fi = |v: &DVector<f64>| v.iter().position(|x| x.abs() > tol);
                let better = match (fi(&cand), fi(&cur)) {
                    (Some(a), Some(b)) if a != b => a < b,
                    (Some(a), Some(_b)) => {
                        if (cand[a] - cur[a]).abs() > tol {
                            cand[a] > cur[a]
                        } else {
                            lex_gt(&cand, &cur, tol)
                        }
                    }
                    (Some(_), None) => true,
                    _ => false,
                };
                Some(if better { cand } else { cur })
            }
        };
    }
    best
}

fn lex_gt(a: &DVector<f64>, b: &DVector<f64>, tol: f64) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if (x - y).abs() > tol {
            return x > y;
        }
    }
    false
}

/// Seeded stream of Euclidean unit vectors of the given dimension.
pub struct UnitVectors {
    rng: ChaCha8Rng,
    dim: usize,
}

impl UnitVectors {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), dim }
    }

    /// Standard-normal components via Box-Muller, then normalized.
    pub fn next_unit(&mut self) -> DVector<f64> {
        loop {
            let v = DVector::from_fn(self.dim, |_, _| {
                let u1: f64 = self.rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = self.rng.gen_range(0.0..1.0);
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            });
            let n = v.norm();
            if n > 1e-6 {
                return v / n;
            }
        }
    }

    pub fn next_in_span(&mut self, basis: &DMatrix<f64>) -> DVector<f64> {
        let k = basis.ncols();
        let mut c = UnitVectors { rng: self.rng.clone(), dim: k };
        let coeff = c.next_unit();
        self.rng = c.rng;
        let v = basis * coeff;
        let n = v.norm();
        if n > 1e-12 {
            v / n
        } else {
            v
        }
    }
}
