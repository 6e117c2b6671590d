//! Subspace calculus in finite-dimensional real spaces with indefinite
//! inner products.
//!
//! A [`QuadSpace`] fixes a symmetric, possibly indefinite Gram matrix on
//! coordinate space; [`Subspace`] values carry Euclidean-orthonormal
//! coordinate bases so that downstream numerics stay well conditioned and
//! the indefinite metric is applied only where a pairing is actually taken.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, DEFAULT_TOL};

/// A real coordinate space with a fixed symmetric nondegenerate inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadSpace {
    dim: usize,
    gram: DMatrix<f64>,
    signature: (usize, usize),
}

impl QuadSpace {
    /// Builds a space from its Gram matrix, validating symmetry and
    /// nondegeneracy and computing the signature from the eigenvalues.
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        Self::with_tol(gram, DEFAULT_TOL)
    }

    pub fn with_tol(gram: DMatrix<f64>, tol: f64) -> Result<Self> {
        let dim = gram.nrows();
        if gram.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: gram.ncols() });
        }
        let sym_defect = (&gram - gram.transpose()).norm();
        let scale = gram.norm().max(1.0);
        if sym_defect > tol * scale {
            return Err(Error::NotSymmetric { defect: sym_defect });
        }
        let (values, _) = linalg::sym_eigen_sorted(&gram);
        let eig_scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let mut n_plus = 0;
        let mut n_minus = 0;
        for v in &values {
            if v.abs() <= tol * eig_scale {
                return Err(Error::DegenerateMetric { value: *v });
            }
            if *v > 0.0 {
                n_plus += 1;
            } else {
                n_minus += 1;
            }
        }
        Ok(Self { dim, gram, signature: (n_plus, n_minus) })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self { dim, gram: DMatrix::identity(dim, dim), signature: (dim, 0) }
    }

    /// Diagonal Gram matrix; entries must be nonzero.
    pub fn from_diag(entries: &[f64]) -> Self {
        let dim = entries.len();
        let gram = DMatrix::from_diagonal(&DVector::from_row_slice(entries));
        let n_minus = entries.iter().filter(|&&e| e < 0.0).count();
        Self { dim, gram, signature: (dim - n_minus, n_minus) }
    }

    /// Lorentzian space with the time-like direction first: diag(-1, 1, .., 1).
    pub fn minkowski_time_first(dim: usize) -> Self {
        let mut d = vec![1.0; dim];
        d[0] = -1.0;
        Self::from_diag(&d)
    }

    /// Lorentzian space with the time-like direction last: diag(1, .., 1, -1).
    pub fn minkowski_time_last(dim: usize) -> Self {
        let mut d = vec![1.0; dim];
        d[dim - 1] = -1.0;
        Self::from_diag(&d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    /// The indefinite inner product x' G y.
    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        assert_eq!(x.len(), self.dim, "inner: x has wrong dimension");
        assert_eq!(y.len(), self.dim, "inner: y has wrong dimension");
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    /// Doubled space with Gram block-diag(G, -G); signature (d, d).
    pub fn doubled(&self) -> QuadSpace {
        let d = self.dim;
        let mut gram = DMatrix::zeros(2 * d, 2 * d);
        gram.view_mut((0, 0), (d, d)).copy_from(&self.gram);
        gram.view_mut((d, d), (d, d)).copy_from(&(-&self.gram));
        let (p, m) = self.signature;
        QuadSpace { dim: 2 * d, gram, signature: (p + m, p + m) }
    }
}

/// A subspace stored by a Euclidean-orthonormal coordinate basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Span of the given vectors; near-dependent directions are dropped at
    /// the rank threshold.
    pub fn span(ambient_dim: usize, vectors: &[DVector<f64>], tol: f64) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient_dim);
        }
        let a = DMatrix::from_columns(vectors);
        assert_eq!(a.nrows(), ambient_dim, "span: vector dimension mismatch");
        Self { ambient_dim, basis: linalg::col_space(&a, tol) }
    }

    pub fn from_matrix(a: &DMatrix<f64>, tol: f64) -> Self {
        Self { ambient_dim: a.nrows(), basis: linalg::col_space(a, tol) }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: DMatrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: DMatrix::identity(ambient_dim, ambient_dim) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.ncols() == 0
    }

    /// Orthonormal basis matrix (ambient_dim x rank).
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<DVector<f64>> {
        (0..self.rank()).map(|k| self.basis.column(k).into_owned()).collect()
    }

    /// Euclidean projection of `v` onto the subspace.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Distance from `v` to the subspace relative to |v|.
    pub fn containment_defect(&self, v: &DVector<f64>) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        (v - self.project(v)).norm() / n
    }

    pub fn contains_vector(&self, v: &DVector<f64>, tol: f64) -> bool {
        self.containment_defect(v) <= tol
    }

    /// Containment of spans tested through the rank of concatenated bases.
    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        if other.is_zero() {
            return true;
        }
        let joint = join(&self.basis, &other.basis);
        linalg::rank(&joint, tol) == self.rank()
    }

    /// Span equality by mutual containment.
    pub fn equals(&self, other: &Subspace, tol: f64) -> bool {
        self.rank() == other.rank() && self.contains(other, tol)
    }

    pub fn sum(&self, other: &Subspace, tol: f64) -> Subspace {
        let joint = join(&self.basis, &other.basis);
        Subspace::from_matrix(&joint, tol)
    }

    /// Intersection via the null space of [A | -B].
    pub fn intersect(&self, other: &Subspace, tol: f64) -> Subspace {
        let (a, b) = (&self.basis, &other.basis);
        if a.ncols() == 0 || b.ncols() == 0 {
            return Subspace::zero(self.ambient_dim);
        }
        let mut sys = DMatrix::zeros(self.ambient_dim, a.ncols() + b.ncols());
        sys.columns_mut(0, a.ncols()).copy_from(a);
        sys.columns_mut(a.ncols(), b.ncols()).copy_from(&(-b));
        let ns = linalg::null_space(&sys, tol);
        if ns.ncols() == 0 {
            return Subspace::zero(self.ambient_dim);
        }
        let reps = a * ns.rows(0, a.ncols());
        Subspace::from_matrix(&reps, tol)
    }

    /// Image of the subspace under a linear map.
    pub fn map(&self, m: &DMatrix<f64>, tol: f64) -> Subspace {
        Subspace::from_matrix(&(m * &self.basis), tol)
    }

    /// Principal angles against another subspace of equal rank, ascending.
    pub fn principal_angles(&self, other: &Subspace) -> Vec<f64> {
        let prod = self.basis.transpose() * &other.basis;
        let mut sv: Vec<f64> = prod.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv.iter().map(|s| s.clamp(-1.0, 1.0).acos()).collect()
    }

    /// Gram matrix of the stored basis under the ambient inner product.
    pub fn restricted_gram(&self, space: &QuadSpace) -> DMatrix<f64> {
        self.basis.transpose() * space.gram() * &self.basis
    }
}

fn join(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut joint = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    joint.columns_mut(0, a.ncols()).copy_from(a);
    joint.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    joint
}

/// Output of the radical splitting of a possibly degenerate subspace:
/// ambient = radical ⊕ isotropic complement ⊕ nondegenerate part.
#[derive(Debug, Clone)]
pub struct RadicalDecomposition {
    pub radical: Subspace,
    pub isotropic_complement: Subspace,
    pub nondeg_part: Subspace,
    /// Pairing matrix between radical and complement bases (delta by construction).
    pub pairing: DMatrix<f64>,
}

/// Orthogonal complement of `l` in `space`: all y with <x, y> = 0 for x in l.
pub fn orthogonal_complement(space: &QuadSpace, l: &Subspace, tol: f64) -> Subspace {
    assert_eq!(l.ambient_dim(), space.dim(), "orthogonal_complement: ambient mismatch");
    if l.is_zero() {
        return Subspace::full(space.dim());
    }
    let sys = l.basis().transpose() * space.gram();
    let ns = linalg::null_space(&sys, tol);
    Subspace { ambient_dim: space.dim(), basis: ns }
}

/// Radical of `l`: the intersection of `l` with its orthogonal complement.
pub fn radical(space: &QuadSpace, l: &Subspace, tol: f64) -> Subspace {
    let perp = orthogonal_complement(space, l, tol);
    l.intersect(&perp, tol)
}

/// Splits the ambient space along a possibly degenerate subspace `l`.
///
/// Returns `U = l ∩ l⊥`, an isotropic complement paired to `U` by
/// `<u_i, û_j> = δ_ij`, and the nondegenerate part `V = (U ⊕ Û)⊥` with
/// `l ⊆ U ⊕ V`. Fails when the defining identities cannot be met at the
/// tolerance.
pub fn decompose_degenerate(space: &QuadSpace, l: &Subspace, tol: f64) -> Result<RadicalDecomposition> {
    let dim = space.dim();
    let g = space.gram();
    let u = radical(space, l, tol);
    let k = u.rank();

    if k == 0 {
        let v = Subspace::full(dim);
        return Ok(RadicalDecomposition {
            radical: u,
            isotropic_complement: Subspace::zero(dim),
            nondeg_part: v,
            pairing: DMatrix::zeros(0, 0),
        });
    }

    // Complement of U inside l (Euclidean within l); it is nondegenerate.
    let l1_raw = l.basis() - u.basis() * (u.basis().transpose() * l.basis());
    let l1 = Subspace::from_matrix(&l1_raw, tol);

    // T with <u_i, t_j> = δ_ij, then corrected to be orthogonal to l1 and isotropic.
    let gu = g * u.basis();
    let gram_gu = gu.transpose() * &gu;
    let inv = gram_gu
        .clone()
        .try_inverse()
        .ok_or(Error::IllConditioned { defect: f64::INFINITY })?;
    let mut t = &gu * inv;

    if l1.rank() > 0 {
        let b1 = l1.basis();
        let small = b1.transpose() * g * b1;
        let small_inv = small
            .try_inverse()
            .ok_or(Error::IllConditioned { defect: f64::INFINITY })?;
        let proj = b1 * small_inv * (b1.transpose() * g);
        t = &t - &proj * &t;
    }

    // û_j = t_j - (1/2) Σ_l <t_j, t_l> u_l
    let t_gram = t.transpose() * g * &t;
    let uhat_raw = &t - u.basis() * (t_gram.transpose() * 0.5);
    let uhat = Subspace { ambient_dim: dim, basis: linalg::col_space(&uhat_raw, tol) };

    let u_plus_uhat = u.sum(&uhat, tol);
    let v = orthogonal_complement(space, &u_plus_uhat, tol);

    let pairing = u.basis().transpose() * g * &uhat_raw;

    let deco = RadicalDecomposition { radical: u, isotropic_complement: uhat, nondeg_part: v, pairing };
    let defect = decomposition_defect(space, l, &deco, tol);
    if defect > tol * 100.0 {
        return Err(Error::IllConditioned { defect });
    }
    Ok(deco)
}

/// Worst residual over the defining identities of a radical decomposition.
pub fn decomposition_defect(
    space: &QuadSpace,
    l: &Subspace,
    deco: &RadicalDecomposition,
    tol: f64,
) -> f64 {
    let g = space.gram();
    let dim = space.dim();
    let u = &deco.radical;
    let uhat = &deco.isotropic_complement;
    let v = &deco.nondeg_part;
    let mut worst: f64 = 0.0;

    // dim Û = dim U, parts independent and spanning.
    if uhat.rank() != u.rank() || u.rank() + uhat.rank() + v.rank() != dim {
        return f64::INFINITY;
    }

    // Û isotropic.
    if uhat.rank() > 0 {
        worst = worst.max(uhat.restricted_gram(space).norm());
    }
    // Cross-Grams U-V and Û-V vanish.
    if v.rank() > 0 {
        worst = worst.max((u.basis().transpose() * g * v.basis()).norm());
        worst = worst.max((uhat.basis().transpose() * g * v.basis()).norm());
    }
    // Gram of V invertible: smallest singular value above threshold.
    if v.rank() > 0 {
        let gv = v.restricted_gram(space);
        let sv = gv.singular_values();
        let thresh = linalg::rank_threshold(sv.max(), tol);
        if sv.min() <= thresh {
            return f64::INFINITY;
        }
    }
    // Pairing C = <u_i, û_j> invertible.
    if u.rank() > 0 {
        let c = u.basis().transpose() * g * uhat.basis();
        let sv = c.singular_values();
        let thresh = linalg::rank_threshold(sv.max(), tol);
        if sv.min() <= thresh {
            return f64::INFINITY;
        }
    }
    // l ⊆ U ⊕ V.
    let uv = u.sum(v, tol);
    for b in l.basis_vectors() {
        worst = worst.max(uv.containment_defect(&b));
    }
    worst
}

/// A null direction of the induced form on `s`, coordinate-normalized with a
/// deterministic sign and candidate choice.
pub fn find_lightlike(space: &QuadSpace, s: &Subspace, tol: f64) -> Result<DVector<f64>> {
    if s.is_zero() {
        return Err(Error::NoNullVector);
    }
    let restricted = s.restricted_gram(space);
    let (values, vectors) = linalg::sym_eigen_sorted(&restricted);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let thresh = tol * scale;

    let mut candidates: Vec<DVector<f64>> = Vec::new();
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for (idx, &lambda) in values.iter().enumerate() {
        if lambda.abs() <= thresh {
            candidates.push(s.basis() * vectors.column(idx).into_owned());
        } else if lambda > 0.0 {
            positives.push(idx);
        } else {
            negatives.push(idx);
        }
    }
    for &i in &positives {
        for &j in &negatives {
            let (lp, ln) = (values[i], values[j]);
            let qp = vectors.column(i).into_owned();
            let qn = vectors.column(j).into_owned();
            let a = (-ln).sqrt();
            let b = lp.sqrt();
            candidates.push(s.basis() * (&qp * a + &qn * b));
            candidates.push(s.basis() * (&qp * a - &qn * b));
        }
    }

    match linalg::pick_canonical(&candidates, tol) {
        Some(v) => Ok(v),
        None => Err(Error::NoNullVector),
    }
}
