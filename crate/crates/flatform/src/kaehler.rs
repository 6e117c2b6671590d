//! The special bilinear forms attached to Kaehler data.
//!
//! From a symmetric form α: V × V → L (L Lorentzian) and a complex
//! structure J on V, two forms with values in the doubled space
//! W = L ⊕ L (Gram block-diag(G, -G)) are derived:
//!
//!   β(X,Y) = (α(X,Y) + α(JX,JY), α(X,JY) - α(JX,Y))
//!   γ(X,Y) = (α(X,Y), α(X,JY))
//!
//! This module builds them, checks their symmetry and span structure,
//! splits degenerate spans along a null direction, and evaluates the
//! curvature-type functionals on the resulting kernels.

use nalgebra::{DMatrix, DVector};

use crate::bilinear::BilinearMap;
use crate::error::{Error, Result};
use crate::linalg::{self, UnitVectors};
use crate::space::{orthogonal_complement, radical, QuadSpace, Subspace};

/// An orthogonal complex structure: J² = -I and J'GJ = G for the domain Gram G.
#[derive(Debug, Clone)]
pub struct ComplexStructure {
    matrix: DMatrix<f64>,
}

impl ComplexStructure {
    pub fn new(matrix: DMatrix<f64>, domain_gram: &DMatrix<f64>, tol: f64) -> Result<Self> {
        let dim = matrix.nrows();
        if dim % 2 != 0 || matrix.ncols() != dim {
            return Err(Error::BadComplexStructure { reason: "matrix must be square of even size", defect: 0.0 });
        }
        let square_defect = (&matrix * &matrix + DMatrix::<f64>::identity(dim, dim)).norm();
        if square_defect > tol * (dim as f64) {
            return Err(Error::BadComplexStructure { reason: "J^2 != -I", defect: square_defect });
        }
        let iso_defect = (matrix.transpose() * domain_gram * &matrix - domain_gram).norm();
        if iso_defect > tol * (dim as f64) * domain_gram.norm().max(1.0) {
            return Err(Error::BadComplexStructure { reason: "J is not an isometry", defect: iso_defect });
        }
        Ok(Self { matrix })
    }

    /// Block rotation on consecutive pairs: J e_{2k} = e_{2k+1}, J e_{2k+1} = -e_{2k}.
    pub fn standard(half_dim: usize) -> Self {
        let dim = 2 * half_dim;
        let mut m = DMatrix::zeros(dim, dim);
        for k in 0..half_dim {
            m[(2 * k + 1, 2 * k)] = 1.0;
            m[(2 * k, 2 * k + 1)] = -1.0;
        }
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// Worst of the two defining defects against a domain Gram.
    pub fn defect(&self, domain_gram: &DMatrix<f64>) -> f64 {
        let dim = self.matrix.nrows();
        let sq = (&self.matrix * &self.matrix + DMatrix::<f64>::identity(dim, dim)).norm();
        let iso = (self.matrix.transpose() * domain_gram * &self.matrix - domain_gram).norm();
        sq.max(iso)
    }
}

/// A Lorentzian base space together with its doubling L ⊕ L of signature (p, p).
#[derive(Debug, Clone)]
pub struct DoubledSpace {
    base: QuadSpace,
    whole: QuadSpace,
}

impl DoubledSpace {
    pub fn new(base: QuadSpace) -> Self {
        let whole = base.doubled();
        Self { base, whole }
    }

    pub fn base(&self) -> &QuadSpace {
        &self.base
    }

    pub fn whole(&self) -> &QuadSpace {
        &self.whole
    }

    /// Embed (ξ, η) into the doubled coordinates.
    pub fn pair(&self, xi: &DVector<f64>, eta: &DVector<f64>) -> DVector<f64> {
        let p = self.base.dim();
        let mut v = DVector::zeros(2 * p);
        v.rows_mut(0, p).copy_from(xi);
        v.rows_mut(p, p).copy_from(eta);
        v
    }

    pub fn first(&self, v: &DVector<f64>) -> DVector<f64> {
        v.rows(0, self.base.dim()).into_owned()
    }

    pub fn second(&self, v: &DVector<f64>) -> DVector<f64> {
        v.rows(self.base.dim(), self.base.dim()).into_owned()
    }
}

/// A symmetric Lorentzian-valued form with a complex structure and the two
/// derived doubled-space forms, plus an optional distinguished time-like `w`
/// against which `<α(X,Y), w> = -(X,Y)` holds.
#[derive(Debug, Clone)]
pub struct KaehlerPair {
    alpha: BilinearMap,
    j: ComplexStructure,
    domain_inner: DMatrix<f64>,
    w: Option<DVector<f64>>,
    doubled: DoubledSpace,
    beta: BilinearMap,
    gamma: BilinearMap,
}

/// Builds the derived forms and validates every input invariant.
pub fn build_pair(
    alpha: BilinearMap,
    j: ComplexStructure,
    domain_inner: DMatrix<f64>,
    w: Option<DVector<f64>>,
    tol: f64,
) -> Result<KaehlerPair> {
    let d = alpha.domain_dim();
    if j.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: j.dim() });
    }
    if domain_inner.nrows() != d || domain_inner.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: domain_inner.nrows() });
    }
    let scale = 1.0 + alpha.max_value_norm();
    let sym = alpha.symmetry_defect();
    if sym > tol * scale {
        return Err(Error::NotSymmetric { defect: sym });
    }
    let j_defect = j.defect(&domain_inner);
    if j_defect > tol * (d as f64).max(1.0) {
        return Err(Error::BadComplexStructure { reason: "invalid for this domain", defect: j_defect });
    }

    let base = alpha.target().clone();
    if let Some(ref w_vec) = w {
        if w_vec.len() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), got: w_vec.len() });
        }
        let norm = base.inner(w_vec, w_vec);
        if (norm + 1.0).abs() > tol * 10.0 {
            return Err(Error::ShapeIdViolation { defect: (norm + 1.0).abs() });
        }
        let defect = shape_identity_defect(&alpha, &domain_inner, w_vec);
        if defect > tol * scale * 10.0 {
            return Err(Error::ShapeIdViolation { defect });
        }
    }

    let doubled = DoubledSpace::new(base);
    let (beta, gamma) = derived_forms(&alpha, &j, &doubled);
    Ok(KaehlerPair { alpha, j, domain_inner, w, doubled, beta, gamma })
}

/// Worst residual of `<α(e_i, e_j), w> + (e_i, e_j)` over basis pairs.
pub fn shape_identity_defect(alpha: &BilinearMap, domain_inner: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    let d = alpha.domain_dim();
    let base = alpha.target();
    let mut worst = 0.0f64;
    for i in 0..d {
        for jdx in 0..d {
            let val = base.inner(&alpha.value(i, jdx), w) + domain_inner[(i, jdx)];
            worst = worst.max(val.abs());
        }
    }
    worst
}

fn derived_forms(alpha: &BilinearMap, j: &ComplexStructure, doubled: &DoubledSpace) -> (BilinearMap, BilinearMap) {
    let d = alpha.domain_dim();
    let id = DMatrix::<f64>::identity(d, d);
    let jm = j.matrix();
    let a_jj = alpha.compose(jm, jm); // α(JX, JY)
    let a_ij = alpha.compose(&id, jm); // α(X, JY)
    let a_ji = alpha.compose(jm, &id); // α(JX, Y)

    let p = doubled.base().dim();
    let make = |top: &BilinearMap, bottom: &BilinearMap| {
        let mut slices = Vec::with_capacity(d);
        for i in 0..d {
            let mut s = DMatrix::zeros(2 * p, d);
            s.rows_mut(0, p).copy_from(top.slice(i));
            s.rows_mut(p, p).copy_from(bottom.slice(i));
            slices.push(s);
        }
        BilinearMap::new(d, doubled.whole().clone(), slices)
    };

    let beta = make(&alpha.add_scaled(&a_jj, 1.0), &a_ij.add_scaled(&a_ji, -1.0));
    let gamma = make(alpha, &a_ij);
    (beta, gamma)
}

impl KaehlerPair {
    /// Construction bypass used for restrictions; inputs must already be valid.
    pub(crate) fn from_parts(
        alpha: BilinearMap,
        j: ComplexStructure,
        domain_inner: DMatrix<f64>,
        w: Option<DVector<f64>>,
    ) -> Self {
        let doubled = DoubledSpace::new(alpha.target().clone());
        let (beta, gamma) = derived_forms(&alpha, &j, &doubled);
        Self { alpha, j, domain_inner, w, doubled, beta, gamma }
    }

    pub fn alpha(&self) -> &BilinearMap {
        &self.alpha
    }

    pub fn beta(&self) -> &BilinearMap {
        &self.beta
    }

    pub fn gamma(&self) -> &BilinearMap {
        &self.gamma
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn domain_inner(&self) -> &DMatrix<f64> {
        &self.domain_inner
    }

    pub fn w(&self) -> Option<&DVector<f64>> {
        self.w.as_ref()
    }

    pub fn doubled(&self) -> &DoubledSpace {
        &self.doubled
    }

    /// Dimension of the domain V = 2n.
    pub fn domain_dim(&self) -> usize {
        self.alpha.domain_dim()
    }

    pub fn half_dim(&self) -> usize {
        self.domain_dim() / 2
    }

    /// Dimension p of the Lorentzian target of α.
    pub fn lorentz_dim(&self) -> usize {
        self.doubled.base().dim()
    }

    pub fn domain_pairing(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.domain_inner * y)[(0, 0)]
    }

    /// Orthonormal basis of the domain with respect to its inner product.
    pub fn orthonormal_domain_basis(&self) -> DMatrix<f64> {
        let d = self.domain_dim();
        let chol = self
            .domain_inner
            .clone()
            .cholesky()
            .expect("domain inner product must be positive definite");
        chol.l()
            .transpose()
            .try_inverse()
            .unwrap_or_else(|| DMatrix::identity(d, d))
    }

    /// Worst residual over the four derived symmetry identities:
    /// with β(X,Y) = (ξ,η): β(X,JY) = -β(JX,Y) = (η,-ξ), β(Y,X) = (ξ,-η),
    /// β(JY,X) = (η,ξ).
    pub fn symmetry_report(&self) -> f64 {
        symmetry_defect(&self.beta, &self.j, &self.doubled)
    }

    /// Defect of the exchange identity <<β(X,Y), γ(Z,T)>> = <<β(X,T), γ(Z,Y)>>.
    pub fn compatibility_defect(&self) -> f64 {
        self.beta.exchange_defect(&self.gamma)
    }

    /// Projection structure of the span of β: the base-space span U0 with
    /// S(β) = U0 ⊕ U0, its dimension s, and the null radical direction when
    /// the span is degenerate.
    pub fn span_analysis(&self, tol: f64) -> SpanAnalysis {
        let p = self.lorentz_dim();
        let d = self.domain_dim();
        let whole_span = self.beta.image_span(tol);

        // U0 = span of the first components of all basis values.
        let mut firsts = DMatrix::zeros(p, d * d);
        for i in 0..d {
            for k in 0..d {
                firsts.set_column(i * d + k, &self.doubled.first(&self.beta.value(i, k)));
            }
        }
        let u0 = Subspace::from_matrix(&firsts, tol);
        let s = u0.rank();

        // Embedded U0 ⊕ U0 inside the doubled space.
        let mut embedded = DMatrix::zeros(2 * p, 2 * s);
        embedded.view_mut((0, 0), (p, s)).copy_from(u0.basis());
        embedded.view_mut((p, s), (p, s)).copy_from(u0.basis());
        let doubled_u0 = Subspace::from_matrix(&embedded, tol);

        let mut split_defect = 0.0f64;
        for v in whole_span.basis_vectors() {
            split_defect = split_defect.max(doubled_u0.containment_defect(&v));
        }
        for v in doubled_u0.basis_vectors() {
            split_defect = split_defect.max(whole_span.containment_defect(&v));
        }

        let rad = radical(self.doubled.whole(), &whole_span, tol);
        let degenerate = !rad.is_zero();
        let mut v_out = None;
        let mut radical_defect = 0.0;
        if degenerate {
            // radical = span{(v,0), (0,v)} for a single null direction v
            let mut pieces = Vec::new();
            for b in rad.basis_vectors() {
                pieces.push(self.doubled.first(&b));
                pieces.push(self.doubled.second(&b));
            }
            let u1 = Subspace::span(p, &pieces, tol);
            if u1.rank() == 1 && rad.rank() == 2 {
                if let Some(v) = linalg::pick_canonical(&u1.basis_vectors(), tol) {
                    radical_defect = self.doubled.base().inner(&v, &v).abs();
                    let lifted = Subspace::span(
                        2 * p,
                        &[self.doubled.pair(&v, &DVector::zeros(p)), self.doubled.pair(&DVector::zeros(p), &v)],
                        tol,
                    );
                    if lifted.equals(&rad, tol * 100.0) {
                        v_out = Some(v);
                    }
                }
            }
        }

        SpanAnalysis { u0, s, degenerate, v: v_out, split_defect, radical_defect }
    }

    /// Splits β along the null radical direction of its degenerate span:
    /// β = β₁ + 2((X,Y)v, (X,JY)v) with β₁ valued in L⊥ ⊕ L⊥ for the
    /// Lorentzian plane L = span{v, w} and v scaled so that <v, w> = -1.
    pub fn degenerate_split(&self, tol: f64) -> Result<DegenerateSplit> {
        let w = self
            .w
            .as_ref()
            .ok_or_else(|| Error::HypothesisViolated("degenerate_split requires the distinguished vector w".into()))?
            .clone();
        let analysis = self.span_analysis(tol);
        if !analysis.degenerate {
            return Err(Error::NotDegenerate);
        }
        let v_raw = analysis.v.clone().ok_or(Error::IllConditioned { defect: analysis.radical_defect })?;

        let base = self.doubled.base().clone();
        let plane = Subspace::span(base.dim(), &[v_raw.clone(), w.clone()], tol);
        if plane.rank() != 2 {
            return Err(Error::PlaneNotLorentzian);
        }
        let plane_gram = plane.restricted_gram(&base);
        let det = plane_gram[(0, 0)] * plane_gram[(1, 1)] - plane_gram[(0, 1)] * plane_gram[(1, 0)];
        if det >= -tol {
            return Err(Error::PlaneNotLorentzian);
        }

        let pairing = base.inner(&v_raw, &w);
        if pairing.abs() <= tol {
            return Err(Error::PlaneNotLorentzian);
        }
        let v = &v_raw * (-1.0 / pairing);

        // Metric projector onto L and orthonormal basis of L⊥.
        let pb = plane.basis();
        let small = pb.transpose() * base.gram() * pb;
        let small_inv = small.try_inverse().ok_or(Error::PlaneNotLorentzian)?;
        let proj_l = pb * small_inv * (pb.transpose() * base.gram());
        let lperp = orthogonal_complement(&base, &plane, tol);
        let q = lperp.basis().clone();

        let p = base.dim();
        let pm = p - 2;
        let restricted_gram = q.transpose() * base.gram() * &q;
        let base_perp = QuadSpace::with_tol(restricted_gram, tol)?;
        let target1 = base_perp.doubled();

        // β₁ slices: both components metrically projected to L⊥, in Q coordinates.
        let d = self.domain_dim();
        let id = DMatrix::<f64>::identity(p, p);
        let to_perp = q.transpose() * (&id - &proj_l);
        let mut big = DMatrix::zeros(2 * pm, 2 * p);
        big.view_mut((0, 0), (pm, p)).copy_from(&to_perp);
        big.view_mut((pm, p), (pm, p)).copy_from(&to_perp);
        let beta1 = self.beta.map_target(&big, target1);

        // Reconstruction residual of the decomposition over basis pairs.
        let mut lift = DMatrix::zeros(2 * p, 2 * pm);
        lift.view_mut((0, 0), (p, pm)).copy_from(&q);
        lift.view_mut((p, pm), (p, pm)).copy_from(&q);
        let gj = &self.domain_inner * self.j.matrix();
        let mut residual = 0.0f64;
        for i in 0..d {
            for k in 0..d {
                let recon = &lift * beta1.value(i, k)
                    + self.doubled.pair(&(&v * (2.0 * self.domain_inner[(i, k)])), &(&v * (2.0 * gj[(i, k)])));
                residual = residual.max((self.beta.value(i, k) - recon).norm());
            }
        }

        let kernel1 = beta1.right_kernel(tol);
        Ok(DegenerateSplit {
            v,
            plane,
            beta1,
            s: analysis.s,
            kernel1,
            lperp_basis: q,
            decomp_residual: residual,
        })
    }

    /// Evaluates the umbilical conclusions on a degenerate split: the span
    /// direction annihilates α, α restricted to L⊥ differs from α by the
    /// metric multiple of v, and both curvature-type functionals are
    /// nonpositive on the kernel of β₁.
    pub fn umbilical_analysis(
        &self,
        split: &DegenerateSplit,
        samples: usize,
        seed: u64,
        tol: f64,
    ) -> Result<UmbilicalAnalysis> {
        let n = self.half_dim();
        if split.s > n - 1 {
            return Err(Error::HypothesisViolated(format!(
                "span dimension s = {} exceeds n - 1 = {}",
                split.s,
                n - 1
            )));
        }
        let scale = (1.0 + self.beta.max_value_norm()) * (1.0 + self.gamma.max_value_norm());
        let compat = self.compatibility_defect();
        if compat > tol * scale {
            return Err(Error::HypothesisViolated(format!(
                "exchange identity fails with defect {compat:.3e}"
            )));
        }
        let w = self
            .w
            .as_ref()
            .ok_or_else(|| Error::HypothesisViolated("umbilical analysis requires w".into()))?;

        let base = self.doubled.base();
        let eta = &split.v - w;
        let eta_defect = (base.inner(&eta, &eta) - 1.0).abs().max(base.inner(&eta, w).abs());

        let d = self.domain_dim();
        let mut umbilic_defect = 0.0f64;
        for i in 0..d {
            for k in 0..d {
                umbilic_defect = umbilic_defect.max(base.inner(&self.alpha.value(i, k), &split.v).abs());
            }
        }

        // α = α_{L⊥} + (X,Y) v: residual of the plane component.
        let pb = split.plane.basis();
        let small = pb.transpose() * base.gram() * pb;
        let small_inv = small.try_inverse().ok_or(Error::PlaneNotLorentzian)?;
        let proj_l = pb * small_inv * (pb.transpose() * base.gram());
        let mut alphapar_residual = 0.0f64;
        for i in 0..d {
            for k in 0..d {
                let res = &proj_l * self.alpha.value(i, k) - &split.v * self.domain_inner[(i, k)];
                alphapar_residual = alphapar_residual.max(res.norm());
            }
        }

        let p_subspace = split.kernel1.clone();
        let j_invariance_defect = j_invariance_defect(&p_subspace, &self.j, tol);

        let basis_on = self.orthonormal_domain_basis();
        let mut stream = UnitVectors::new(p_subspace.rank(), seed);
        let mut k_values = Vec::with_capacity(samples);
        let mut ric_values = Vec::with_capacity(samples);
        for _ in 0..samples {
            let coeff = stream.next_unit();
            let s_vec = p_subspace.basis() * coeff;
            k_values.push(self.holomorphic_functional(&s_vec));
            ric_values.push(self.ricci_functional(&s_vec, &basis_on));
        }

        Ok(UmbilicalAnalysis {
            v: split.v.clone(),
            eta,
            p_subspace,
            k_values,
            ric_values,
            umbilic_defect,
            alphapar_residual,
            eta_defect,
            j_invariance_defect,
        })
    }

    /// K(S) = <α(S,S), α(JS,JS)> - ||α(S,JS)||² in the Lorentzian target.
    pub fn holomorphic_functional(&self, s: &DVector<f64>) -> f64 {
        let base = self.doubled.base();
        let js = self.j.apply(s);
        let a_ss = self.alpha.evaluate(s, s);
        let a_jj = self.alpha.evaluate(&js, &js);
        let a_sj = self.alpha.evaluate(s, &js);
        base.inner(&a_ss, &a_jj) - base.inner(&a_sj, &a_sj)
    }

    /// R(S) = Σ_i (<α(X_i,X_i), α(S,S)> - ||α(X_i,S)||²) over an orthonormal
    /// basis of the domain.
    pub fn ricci_functional(&self, s: &DVector<f64>, orthonormal_basis: &DMatrix<f64>) -> f64 {
        let base = self.doubled.base();
        let a_ss = self.alpha.evaluate(s, s);
        let mut total = 0.0;
        for i in 0..orthonormal_basis.ncols() {
            let x = orthonormal_basis.column(i).into_owned();
            let a_xx = self.alpha.evaluate(&x, &x);
            let a_xs = self.alpha.evaluate(&x, s);
            total += base.inner(&a_xx, &a_ss) - base.inner(&a_xs, &a_xs);
        }
        total
    }

    /// The null direction squeezed between the restricted span and the image
    /// of the left map at a regular element X with β|_{V × N(X)} ≠ 0.
    pub fn kernel_lightlike(&self, x: &DVector<f64>, seed: u64, samples: usize, tol: f64) -> Result<DVector<f64>> {
        let report = self.beta.flatness_report(tol);
        if !report.is_flat {
            return Err(Error::NotFlat { defect: report.max_defect, tol });
        }
        let lx = self.beta.left_map(x);
        let kernel = linalg::null_space(&lx, tol);
        let scale = 1.0 + self.beta.max_value_norm();
        if kernel.ncols() == 0 {
            return Err(Error::HypothesisViolated("left map has trivial kernel".into()));
        }
        let d = self.domain_dim();
        let wdim = 2 * self.lorentz_dim();
        let mut values = DMatrix::zeros(wdim, d * kernel.ncols());
        for i in 0..d {
            values
                .columns_mut(i * kernel.ncols(), kernel.ncols())
                .copy_from(&(self.beta.slice(i) * &kernel));
        }
        if values.norm() <= tol * scale {
            return Err(Error::HypothesisViolated(
                "β vanishes on V × N(X); N(X) equals the kernel of β".into(),
            ));
        }
        let restricted_span = Subspace::from_matrix(&values, tol);
        let image = Subspace::from_matrix(&lx, tol);
        let image_perp = orthogonal_complement(self.doubled.whole(), &image, tol);

        // candidate null direction from the base components of the span
        let p = self.lorentz_dim();
        let mut pieces = Vec::new();
        for b in restricted_span.basis_vectors() {
            pieces.push(self.doubled.first(&b));
            pieces.push(self.doubled.second(&b));
        }
        let u1 = Subspace::span(p, &pieces, tol);
        if u1.rank() != 1 {
            return Err(Error::IllConditioned { defect: u1.rank() as f64 });
        }
        let v = linalg::pick_canonical(&u1.basis_vectors(), tol).ok_or(Error::NoNullVector)?;
        let base = self.doubled.base();
        if base.inner(&v, &v).abs() > tol * scale * scale {
            return Err(Error::IllConditioned { defect: base.inner(&v, &v).abs() });
        }

        // span{v} ⊕ span{v} ⊆ S(β|_{V×N(X)}) ⊆ B_X(V) ∩ (B_X(V))⊥
        let zero = DVector::zeros(p);
        let lifted = [self.doubled.pair(&v, &zero), self.doubled.pair(&zero, &v)];
        let mut defect = 0.0f64;
        for lv in &lifted {
            defect = defect.max(restricted_span.containment_defect(lv));
        }
        for s in restricted_span.basis_vectors() {
            defect = defect.max(image.containment_defect(&s));
            defect = defect.max(image_perp.containment_defect(&s));
        }
        if defect > tol * 1e3 {
            return Err(Error::IllConditioned { defect });
        }

        // sampled check: pairs in B_X(V) with both components null lie on span{v}
        let v_line = Subspace::span(p, &[v.clone()], tol);
        let mut stream = UnitVectors::new(d, seed);
        let mut candidates: Vec<DVector<f64>> = restricted_span.basis_vectors();
        for _ in 0..samples {
            candidates.push(&lx * stream.next_unit());
        }
        for z in candidates {
            let a = self.doubled.first(&z);
            let b = self.doubled.second(&z);
            let null_a = base.inner(&a, &a).abs() <= tol * scale * scale && a.norm() > tol;
            let null_b = base.inner(&b, &b).abs() <= tol * scale * scale && b.norm() > tol;
            if null_a && null_b {
                let da = v_line.containment_defect(&a);
                let db = v_line.containment_defect(&b);
                if da.max(db) > tol * 1e3 {
                    return Err(Error::IllConditioned { defect: da.max(db) });
                }
            }
        }
        Ok(v)
    }

    /// Kernel estimate for surjective flat β: dim N(β) ≥ 2n - 2p, and when
    /// the kernel vanishes the left map at a regular element is an
    /// isomorphism onto the doubled space.
    pub fn kernel_bound_check(&self, seed: u64, tol: f64) -> Result<bool> {
        let report = self.beta.flatness_report(tol);
        if !report.is_flat {
            return Err(Error::NotFlat { defect: report.max_defect, tol });
        }
        let p = self.lorentz_dim();
        let n = self.half_dim();
        if p > n {
            return Err(Error::HypothesisViolated(format!("p = {p} exceeds n = {n}")));
        }
        let span = self.beta.image_span(tol);
        if span.rank() != 2 * p {
            return Err(Error::HypothesisViolated(format!(
                "β is not surjective: span rank {} < {}",
                span.rank(),
                2 * p
            )));
        }
        let kernel = self.beta.right_kernel(tol);
        let bound = kernel.rank() + 2 * p >= 2 * n;
        if kernel.rank() == 0 {
            let (x, r) = self.beta.find_regular_element(seed, 64, tol);
            let iso = r == 2 * n && linalg::rank(&self.beta.left_map(&x), tol) == 2 * n;
            return Ok(bound && iso);
        }
        Ok(bound)
    }
}

/// Result of analyzing the span of β.
#[derive(Debug, Clone)]
pub struct SpanAnalysis {
    /// Base-space projection U0 of the span of β.
    pub u0: Subspace,
    /// dim U0.
    pub s: usize,
    /// Whether S(β) is degenerate in the doubled metric.
    pub degenerate: bool,
    /// The null direction spanning the radical, when degenerate and clean.
    pub v: Option<DVector<f64>>,
    /// Span-equality defect of S(β) against U0 ⊕ U0.
    pub split_defect: f64,
    /// |<v,v>| for the extracted direction.
    pub radical_defect: f64,
}

/// The decomposition of β along the null direction of its degenerate span.
#[derive(Debug, Clone)]
pub struct DegenerateSplit {
    /// Null direction scaled so <v, w> = -1.
    pub v: DVector<f64>,
    /// The Lorentzian plane span{v, w}.
    pub plane: Subspace,
    /// β₁ valued in L⊥ ⊕ L⊥, expressed in an orthonormal basis of L⊥.
    pub beta1: BilinearMap,
    /// dim U0.
    pub s: usize,
    /// Right kernel of β₁ inside the domain.
    pub kernel1: Subspace,
    /// Basis of L⊥ used for β₁ coordinates (p x (p-2)).
    pub lperp_basis: DMatrix<f64>,
    /// Worst reconstruction residual of β from β₁ and the v-part.
    pub decomp_residual: f64,
}

/// Umbilical conclusions evaluated on a degenerate split.
#[derive(Debug, Clone)]
pub struct UmbilicalAnalysis {
    pub v: DVector<f64>,
    /// Unit space-like η with v = η + w.
    pub eta: DVector<f64>,
    /// The J-invariant kernel of β₁.
    pub p_subspace: Subspace,
    pub k_values: Vec<f64>,
    pub ric_values: Vec<f64>,
    /// max |<α(X,Y), v>| over basis pairs.
    pub umbilic_defect: f64,
    /// Residual of α = α_{L⊥} + (X,Y) v.
    pub alphapar_residual: f64,
    /// Defect of η being unit space-like orthogonal to w.
    pub eta_defect: f64,
    /// Span defect of J P = P.
    pub j_invariance_defect: f64,
}

/// Worst residual of the four derived symmetry identities for a form with
/// values in a doubled space. Zero for any form built from a symmetric α.
pub fn symmetry_defect(beta: &BilinearMap, j: &ComplexStructure, doubled: &DoubledSpace) -> f64 {
    let d = beta.domain_dim();
    let id = DMatrix::<f64>::identity(d, d);
    let jm = j.matrix();
    let b_ij = beta.compose(&id, jm); // β(X, JY)
    let b_ji = beta.compose(jm, &id); // β(JX, Y)
    let mut worst = 0.0f64;
    for i in 0..d {
        for k in 0..d {
            let b = beta.value(i, k);
            let xi = doubled.first(&b);
            let eta = doubled.second(&b);
            // antiholomorphic exchange
            worst = worst.max((b_ij.value(i, k) + b_ji.value(i, k)).norm());
            // β(X, JY) = (η, -ξ)
            worst = worst.max((b_ij.value(i, k) - doubled.pair(&eta, &(-&xi))).norm());
            // β(Y, X) = (ξ, -η)
            worst = worst.max((beta.value(k, i) - doubled.pair(&xi, &(-&eta))).norm());
            // β(JY, X) = (η, ξ)
            worst = worst.max((b_ji.value(k, i) - doubled.pair(&eta, &xi)).norm());
        }
    }
    worst
}

/// Span defect of J S = S.
pub fn j_invariance_defect(s: &Subspace, j: &ComplexStructure, tol: f64) -> f64 {
    if s.is_zero() {
        return 0.0;
    }
    let mapped = s.map(j.matrix(), tol);
    let mut defect = 0.0f64;
    for b in mapped.basis_vectors() {
        defect = defect.max(s.containment_defect(&b));
    }
    for b in s.basis_vectors() {
        defect = defect.max(mapped.containment_defect(&b));
    }
    defect
}
