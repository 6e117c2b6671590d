//! General bilinear-form machinery: spans, kernels, regular elements,
//! flatness and the inclusion satisfied by flat forms at regular elements.
//!
//! A form φ: V × V → W is stored as its coordinate tensor φ(e_i, e_j);
//! multilinearity makes basis values sufficient for every check here.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, UnitVectors};
use crate::space::{orthogonal_complement, QuadSpace, Subspace};

/// Bilinear map V x V -> W held as per-slot slices: `slice(i)` has
/// column j equal to φ(e_i, e_j).
#[derive(Debug, Clone)]
pub struct BilinearMap {
    domain_dim: usize,
    target: QuadSpace,
    slices: Vec<DMatrix<f64>>,
}

/// Flatness diagnostic: the worst defect
/// `<φ(X,Y),φ(Z,T)> - <φ(X,T),φ(Z,Y)>` over basis 4-tuples.
#[derive(Debug, Clone)]
pub struct FlatnessReport {
    pub max_defect: f64,
    /// Basis vectors (X, Y, Z, T) attaining the worst defect.
    pub worst_tuple: [DVector<f64>; 4],
    pub is_flat: bool,
}

impl BilinearMap {
    pub fn new(domain_dim: usize, target: QuadSpace, slices: Vec<DMatrix<f64>>) -> Self {
        assert_eq!(slices.len(), domain_dim, "one slice per domain basis vector");
        for s in &slices {
            assert_eq!(s.nrows(), target.dim(), "slice rows must match target dim");
            assert_eq!(s.ncols(), domain_dim, "slice cols must match domain dim");
        }
        Self { domain_dim, target, slices }
    }

    pub fn zero(domain_dim: usize, target: QuadSpace) -> Self {
        let slices = (0..domain_dim).map(|_| DMatrix::zeros(target.dim(), domain_dim)).collect();
        Self { domain_dim, target, slices }
    }

    pub fn from_fn<F>(domain_dim: usize, target: QuadSpace, f: F) -> Self
    where
        F: Fn(usize, usize) -> DVector<f64>,
    {
        let mut slices = Vec::with_capacity(domain_dim);
        for i in 0..domain_dim {
            let mut s = DMatrix::zeros(target.dim(), domain_dim);
            for j in 0..domain_dim {
                let v = f(i, j);
                assert_eq!(v.len(), target.dim(), "from_fn: value dimension mismatch");
                s.set_column(j, &v);
            }
            slices.push(s);
        }
        Self { domain_dim, target, slices }
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn target(&self) -> &QuadSpace {
        &self.target
    }

    /// φ(e_i, e_j).
    pub fn value(&self, i: usize, j: usize) -> DVector<f64> {
        self.slices[i].column(j).into_owned()
    }

    pub fn slice(&self, i: usize) -> &DMatrix<f64> {
        &self.slices[i]
    }

    /// All basis values as the columns of a target_dim x domain_dim^2 matrix,
    /// column (i, j) at index i * domain_dim + j.
    pub fn value_matrix(&self) -> DMatrix<f64> {
        let d = self.domain_dim;
        let mut m = DMatrix::zeros(self.target.dim(), d * d);
        for i in 0..d {
            m.columns_mut(i * d, d).copy_from(&self.slices[i]);
        }
        m
    }

    /// Largest Euclidean norm among basis values; scale for relative tolerances.
    pub fn max_value_norm(&self) -> f64 {
        let mut m: f64 = 0.0;
        for s in &self.slices {
            for j in 0..s.ncols() {
                m = m.max(s.column(j).norm());
            }
        }
        m
    }

    pub fn evaluate(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.domain_dim, "evaluate: x dimension mismatch");
        assert_eq!(y.len(), self.domain_dim, "evaluate: y dimension mismatch");
        let mut out = DVector::zeros(self.target.dim());
        for (i, s) in self.slices.iter().enumerate() {
            if x[i] != 0.0 {
                out += s * y * x[i];
            }
        }
        out
    }

    /// Matrix of the left map φ_X: V -> W, Y ↦ φ(X, Y).
    pub fn left_map(&self, x: &DVector<f64>) -> DMatrix<f64> {
        assert_eq!(x.len(), self.domain_dim, "left_map: dimension mismatch");
        let mut m = DMatrix::zeros(self.target.dim(), self.domain_dim);
        for (i, s) in self.slices.iter().enumerate() {
            if x[i] != 0.0 {
                m += s * x[i];
            }
        }
        m
    }

    /// Span of all values of the form.
    pub fn image_span(&self, tol: f64) -> Subspace {
        Subspace::from_matrix(&self.value_matrix(), tol)
    }

    /// Right kernel: all Y with φ(X, Y) = 0 for every X, via the null space
    /// of the vertically stacked left-map slices.
    pub fn right_kernel(&self, tol: f64) -> Subspace {
        let d = self.domain_dim;
        let w = self.target.dim();
        let mut stacked = DMatrix::zeros(d * w, d);
        for (i, s) in self.slices.iter().enumerate() {
            stacked.rows_mut(i * w, w).copy_from(s);
        }
        Subspace::from_matrix(&linalg::null_space(&stacked, tol), tol)
    }

    /// Pairing table <φ(e_i,e_j), ψ(e_k,e_l)> as a d^2 x d^2 matrix.
    fn pairing_table(&self, other: &BilinearMap) -> DMatrix<f64> {
        let t1 = self.value_matrix();
        let t2 = other.value_matrix();
        t1.transpose() * self.target.gram() * t2
    }

    /// Worst flatness defect over basis 4-tuples, with relative `is_flat`
    /// decision at `tol * (1 + max value norm)^2`.
    pub fn flatness_report(&self, tol: f64) -> FlatnessReport {
        let d = self.domain_dim;
        let table = self.pairing_table(self);
        let mut max_defect = 0.0f64;
        let mut worst = (0usize, 0usize, 0usize, 0usize);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let defect = (table[(i * d + j, k * d + l)] - table[(i * d + l, k * d + j)]).abs();
                        if defect > max_defect {
                            max_defect = defect;
                            worst = (i, j, k, l);
                        }
                    }
                }
            }
        }
        let basis = |idx: usize| {
            let mut v = DVector::zeros(d);
            v[idx] = 1.0;
            v
        };
        let scale = (1.0 + self.max_value_norm()).powi(2);
        FlatnessReport {
            max_defect,
            worst_tuple: [basis(worst.0), basis(worst.1), basis(worst.2), basis(worst.3)],
            is_flat: max_defect <= tol * scale,
        }
    }

    pub fn is_flat(&self, tol: f64) -> bool {
        self.flatness_report(tol).is_flat
    }

    /// Compatibility defect against a second form:
    /// max |<φ(X,Y),ψ(Z,T)> - <φ(X,T),ψ(Z,Y)>| over basis 4-tuples.
    pub fn exchange_defect(&self, other: &BilinearMap) -> f64 {
        assert_eq!(self.domain_dim, other.domain_dim);
        assert_eq!(self.target.dim(), other.target.dim());
        let d = self.domain_dim;
        let table = self.pairing_table(other);
        let mut max_defect = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let defect = (table[(i * d + j, k * d + l)] - table[(i * d + l, k * d + j)]).abs();
                        max_defect = max_defect.max(defect);
                    }
                }
            }
        }
        max_defect
    }

    /// A regular element: the vector of maximal left-map rank over all basis
    /// vectors plus `samples` seeded unit vectors, together with that rank.
    pub fn find_regular_element(&self, seed: u64, samples: usize, tol: f64) -> (DVector<f64>, usize) {
        let d = self.domain_dim;
        let mut best_rank = 0usize;
        let mut best = DVector::zeros(d);
        if d == 0 {
            return (best, 0);
        }
        best[0] = 1.0;
        let consider = |x: DVector<f64>, best: &mut DVector<f64>, best_rank: &mut usize| {
            let r = linalg::rank(&self.left_map(&x), tol);
            if r > *best_rank {
                *best_rank = r;
                *best = x;
            }
        };
        for i in 0..d {
            let mut e = DVector::zeros(d);
            e[i] = 1.0;
            consider(e, &mut best, &mut best_rank);
        }
        let mut stream = UnitVectors::new(d, seed);
        for _ in 0..samples {
            consider(stream.next_unit(), &mut best, &mut best_rank);
        }
        (best, best_rank)
    }

    /// Defect of the inclusion S(φ|_{V x ker φ_X}) ⊆ φ_X(V) ∩ (φ_X(V))⊥ for
    /// a flat form and a regular element: zero means the inclusion holds.
    pub fn moore_defect(&self, x: &DVector<f64>, tol: f64) -> Result<f64> {
        let report = self.flatness_report(tol);
        if !report.is_flat {
            return Err(Error::NotFlat { defect: report.max_defect, tol });
        }
        let lx = self.left_map(x);
        let kernel = linalg::null_space(&lx, tol);
        if kernel.ncols() == 0 {
            return Ok(0.0);
        }
        let image = Subspace::from_matrix(&lx, tol);
        // span of φ(e_i, k_b) over all slots i and kernel directions b
        let d = self.domain_dim;
        let mut values = DMatrix::zeros(self.target.dim(), d * kernel.ncols());
        for i in 0..d {
            values
                .columns_mut(i * kernel.ncols(), kernel.ncols())
                .copy_from(&(&self.slices[i] * &kernel));
        }
        let restricted_span = Subspace::from_matrix(&values, tol);
        if restricted_span.is_zero() {
            return Ok(0.0);
        }

        let scale = 1.0 + self.max_value_norm();
        let mut defect = 0.0f64;
        for s in restricted_span.basis_vectors() {
            defect = defect.max(image.containment_defect(&s) * scale);
        }
        let cross = restricted_span.basis().transpose() * self.target.gram() * image.basis();
        defect = defect.max(cross.norm());
        Ok(defect)
    }

    /// The form (x, y) ↦ φ(M x, N y).
    pub fn compose(&self, m: &DMatrix<f64>, n: &DMatrix<f64>) -> BilinearMap {
        let d = self.domain_dim;
        assert_eq!(m.nrows(), d);
        assert_eq!(n.nrows(), d);
        assert_eq!(m.ncols(), n.ncols());
        let new_d = m.ncols();
        let mut slices = Vec::with_capacity(new_d);
        for a in 0..new_d {
            let ma = m.column(a);
            let mut s = DMatrix::zeros(self.target.dim(), new_d);
            for i in 0..d {
                if ma[i] != 0.0 {
                    s += &self.slices[i] * n * ma[i];
                }
            }
            slices.push(s);
        }
        BilinearMap { domain_dim: new_d, target: self.target.clone(), slices }
    }

    /// The form with values mapped by a matrix into a new target space.
    pub fn map_target(&self, m: &DMatrix<f64>, new_target: QuadSpace) -> BilinearMap {
        assert_eq!(m.ncols(), self.target.dim());
        assert_eq!(m.nrows(), new_target.dim());
        let slices = self.slices.iter().map(|s| m * s).collect();
        BilinearMap { domain_dim: self.domain_dim, target: new_target, slices }
    }

    /// Entry-wise linear combination with another form over the same spaces.
    pub fn add_scaled(&self, other: &BilinearMap, factor: f64) -> BilinearMap {
        assert_eq!(self.domain_dim, other.domain_dim);
        assert_eq!(self.target.dim(), other.target.dim());
        let slices = self
            .slices
            .iter()
            .zip(other.slices.iter())
            .map(|(a, b)| a + b * factor)
            .collect();
        BilinearMap { domain_dim: self.domain_dim, target: self.target.clone(), slices }
    }

    /// Copy with the single basis value φ(e_i, e_j) replaced.
    pub fn with_value(&self, i: usize, j: usize, value: DVector<f64>) -> BilinearMap {
        assert_eq!(value.len(), self.target.dim());
        let mut out = self.clone();
        out.slices[i].set_column(j, &value);
        out
    }

    /// Largest symmetry defect |φ(e_i,e_j) - φ(e_j,e_i)|.
    pub fn symmetry_defect(&self) -> f64 {
        let d = self.domain_dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                worst = worst.max((self.value(i, j) - self.value(j, i)).norm());
            }
        }
        worst
    }
}

/// Orthogonal complement of the image span inside the target space.
pub fn image_perp(form: &BilinearMap, tol: f64) -> Subspace {
    orthogonal_complement(form.target(), &form.image_span(tol), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOL;

    /// φ(X, Y) = (x1 y1, x2 y2) on R^2 -> R^2.
    fn diagonal_form() -> BilinearMap {
        BilinearMap::from_fn(2, QuadSpace::euclidean(2), |i, j| {
            let mut v = DVector::zeros(2);
            if i == j {
                v[i] = 1.0;
            }
            v
        })
    }

    /// φ(X, Y) = <X, Y> into R^1.
    fn inner_product_form() -> BilinearMap {
        BilinearMap::from_fn(2, QuadSpace::euclidean(1), |i, j| {
            DVector::from_vec(vec![if i == j { 1.0 } else { 0.0 }])
        })
    }

    #[test]
    fn evaluate_is_bilinear() {
        let phi = diagonal_form();
        let zero = DVector::zeros(2);
        let y = DVector::from_vec(vec![0.3, -0.7]);
        assert_eq!(phi.evaluate(&zero, &y).norm(), 0.0);

        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(phi.evaluate(&e1, &e1), DVector::from_vec(vec![1.0, 0.0]));

        let ones = DVector::from_vec(vec![1.0, 1.0]);
        assert_eq!(phi.evaluate(&ones, &ones), DVector::from_vec(vec![1.0, 1.0]));
    }

    #[test]
    fn image_span_of_zero_and_diagonal_forms() {
        let zero = BilinearMap::zero(3, QuadSpace::euclidean(2));
        assert!(zero.image_span(DEFAULT_TOL).is_zero());
        assert_eq!(diagonal_form().image_span(DEFAULT_TOL).rank(), 2);
    }

    #[test]
    fn image_span_matches_random_evaluations() {
        let phi = diagonal_form();
        let span = phi.image_span(DEFAULT_TOL);
        let mut stream = UnitVectors::new(2, 7);
        let mut vals = Vec::new();
        for _ in 0..200 {
            let x = stream.next_unit();
            let y = stream.next_unit();
            vals.push(phi.evaluate(&x, &y));
        }
        let sampled = Subspace::span(2, &vals, DEFAULT_TOL);
        assert!(span.equals(&sampled, DEFAULT_TOL));
    }

    #[test]
    fn right_kernel_cases() {
        let zero = BilinearMap::zero(3, QuadSpace::euclidean(2));
        assert_eq!(zero.right_kernel(DEFAULT_TOL).rank(), 3);

        // φ(X,Y) = (x1 y1) on R^2 -> R^1: kernel is the second axis.
        let phi = BilinearMap::from_fn(2, QuadSpace::euclidean(1), |i, j| {
            DVector::from_vec(vec![if i == 0 && j == 0 { 1.0 } else { 0.0 }])
        });
        let kernel = phi.right_kernel(DEFAULT_TOL);
        let e2 = Subspace::span(2, &[DVector::from_vec(vec![0.0, 1.0])], DEFAULT_TOL);
        assert!(kernel.equals(&e2, DEFAULT_TOL));
    }

    #[test]
    fn left_map_ranks() {
        let phi = diagonal_form();
        let zero = DVector::zeros(2);
        assert_eq!(phi.left_map(&zero).norm(), 0.0);

        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let m = phi.left_map(&e1);
        assert_eq!(linalg::rank(&m, DEFAULT_TOL), 1);
        let kernel = linalg::null_space(&m, DEFAULT_TOL);
        assert_eq!(kernel.ncols(), 1);
        assert!(kernel[(0, 0)].abs() < 1e-12);

        let ones = DVector::from_vec(vec![1.0, 1.0]);
        assert_eq!(linalg::rank(&phi.left_map(&ones), DEFAULT_TOL), 2);
    }

    #[test]
    fn flatness_of_diagonal_form() {
        let report = diagonal_form().flatness_report(DEFAULT_TOL);
        assert!(report.is_flat);
        assert_eq!(report.max_defect, 0.0);
    }

    #[test]
    fn inner_product_form_is_not_flat() {
        let report = inner_product_form().flatness_report(DEFAULT_TOL);
        assert!(!report.is_flat);
        assert!((report.max_defect - 1.0).abs() < 1e-12);
        // worst tuple is (e1, e1, e2, e2) up to symmetry of the defect
        let t = &report.worst_tuple;
        assert!((&t[0] - &t[1]).norm() < 1e-12);
        assert!((&t[2] - &t[3]).norm() < 1e-12);
    }

    #[test]
    fn regular_element_of_diagonal_form_has_rank_two() {
        let (x, r) = diagonal_form().find_regular_element(3, 64, DEFAULT_TOL);
        assert_eq!(r, 2);
        assert!(x[0].abs() > 1e-9 && x[1].abs() > 1e-9);

        let zero = BilinearMap::zero(2, QuadSpace::euclidean(2));
        let (_, r) = zero.find_regular_element(3, 8, DEFAULT_TOL);
        assert_eq!(r, 0);
    }

    #[test]
    fn moore_defect_of_zero_form_vanishes() {
        let zero = BilinearMap::zero(2, QuadSpace::euclidean(2));
        let x = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(zero.moore_defect(&x, DEFAULT_TOL).unwrap(), 0.0);
    }

    #[test]
    fn moore_rejects_non_flat_forms() {
        let phi = inner_product_form();
        let x = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(phi.moore_defect(&x, DEFAULT_TOL), Err(Error::NotFlat { .. })));
    }

    #[test]
    fn image_of_left_map_sits_in_image_span() {
        let phi = diagonal_form();
        let span = phi.image_span(DEFAULT_TOL);
        let mut stream = UnitVectors::new(2, 11);
        for _ in 0..20 {
            let x = stream.next_unit();
            let im = Subspace::from_matrix(&phi.left_map(&x), DEFAULT_TOL);
            assert!(span.contains(&im, DEFAULT_TOL));
        }
    }
}
