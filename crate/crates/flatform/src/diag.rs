//! Constructive diagonalization of the derived form β.
//!
//! For a flat β with nondegenerate span, trivial kernel and the exchange
//! identity, an orthogonal basis {X_i, JX_i} is produced on which β is
//! block-diagonal: β(Y_i, Y_j) = 0 for i ≠ j, and the normalized values
//! {β(X_j, X_j), β(X_j, JX_j)} form an orthonormal basis of the span.
//!
//! The search follows the constructive proof: an eigenpair of the transfer
//! matrix between two regular left maps yields a zero-product pair, a
//! recursive descent on left-map kernels yields a corank-2 element, and the
//! corank-2 splitting peels off one factor per step.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kaehler::{j_invariance_defect, ComplexStructure, KaehlerPair};
use crate::linalg::{self, UnitVectors};
use crate::space::{radical, QuadSpace, Subspace};

/// Paired tangent vectors and span directions produced by diagonalization.
///
/// `pairs[i]` is X_i (with JX_i implied through the pair's complex
/// structure), `xis[i]` the base-space direction with β(X_i, X_i) =
/// (ξ_i, 0), scaled to |<ξ_i, ξ_i>| = 1, and `norms[i]` the sign of
/// <ξ_i, ξ_i>. Time-like directions are listed first.
#[derive(Debug, Clone)]
pub struct DiagonalizingBasis {
    pub pairs: Vec<DVector<f64>>,
    pub xis: Vec<DVector<f64>>,
    pub norms: Vec<f64>,
}

/// Residuals of the two diagonalization properties for a produced basis.
#[derive(Debug, Clone)]
pub struct DiagonalizationReport {
    /// max over i != j and the four generator choices of ||β(Y_i, Y_j)||.
    pub offdiag_max: f64,
    /// max off-diagonal entry of the normalized span Gram.
    pub gram_offdiag: f64,
    /// max deviation of the diagonal Gram entries from ±1.
    pub gram_diag_defect: f64,
    /// Signs on the diagonal, in basis order (ξ slot then Jξ slot per pair).
    pub gram_signs: Vec<f64>,
}

fn next_seed(seed: u64) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// A nontrivial pair with β(X, Y) = 0, for n ≥ 2 under the diagonalization
/// hypotheses.
pub fn zero_product_pair(pair: &KaehlerPair, seed: u64, tol: f64) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = pair.half_dim();
    let d = pair.domain_dim();
    if n < 2 {
        return Err(Error::HypothesisViolated("zero-product pairs require n >= 2".into()));
    }
    let beta = pair.beta();
    let report = beta.flatness_report(tol);
    if !report.is_flat {
        return Err(Error::NotFlat { defect: report.max_defect, tol });
    }
    let span = beta.image_span(tol);
    if !radical(pair.doubled().whole(), &span, tol).is_zero() {
        return Err(Error::DegenerateSpan);
    }
    if !beta.right_kernel(tol).is_zero() {
        return Err(Error::HypothesisViolated("β has nontrivial kernel".into()));
    }

    let (z1, r1) = beta.find_regular_element(seed, 64, tol);
    if r1 != d {
        return Err(Error::HypothesisViolated(format!(
            "left map rank {r1} at a regular element is below the domain dimension {d}"
        )));
    }
    let jm = pair.complex_structure().matrix();
    let jz1 = jm * &z1;
    let plane = Subspace::span(d, &[z1.clone(), jz1], tol);

    // second regular element outside span{Z1, JZ1}
    let mut stream = UnitVectors::new(d, next_seed(seed));
    let mut z2 = None;
    for _ in 0..256 {
        let cand = stream.next_unit();
        if plane.containment_defect(&cand) < 0.3 {
            continue;
        }
        if linalg::rank(&beta.left_map(&cand), tol) == d {
            z2 = Some(cand);
            break;
        }
    }
    let z2 = z2.ok_or(Error::SearchFailed { best: f64::INFINITY })?;

    // complete {Z1, Z2} to a basis with coordinate vectors, greedily
    let mut basis = DMatrix::zeros(d, d);
    basis.set_column(0, &z1);
    basis.set_column(1, &z2);
    let mut cols = 2;
    for k in 0..d {
        if cols == d {
            break;
        }
        let mut e = DVector::zeros(d);
        e[k] = 1.0;
        basis.set_column(cols, &e);
        if linalg::rank(&basis.columns(0, cols + 1).into_owned(), tol) == cols + 1 {
            cols += 1;
        }
    }
    if cols != d {
        return Err(Error::SearchFailed { best: f64::INFINITY });
    }

    // transfer matrix A with β(Z2, Z_j) = Σ_r a_rj β(Z1, Z_r)
    let span_basis = span.basis();
    let m1 = span_basis.transpose() * beta.left_map(&z1) * &basis;
    let m2 = span_basis.transpose() * beta.left_map(&z2) * &basis;
    let lu = m1.lu();
    let a = lu.solve(&m2).ok_or(Error::SearchFailed { best: f64::INFINITY })?;

    let mut eigenvalues: Vec<Complex<f64>> = a.complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|x, y| {
        (x.im.abs(), x.re, x.im)
            .partial_cmp(&(y.im.abs(), y.re, y.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let scale = 1.0 + beta.max_value_norm();
    let mut best_residual = f64::INFINITY;
    for lambda in eigenvalues {
        let v = complex_eigenvector(&a, lambda);
        let (t1, t2) = {
            let re = DVector::from_iterator(d, v.iter().map(|c| c.re));
            let im = DVector::from_iterator(d, v.iter().map(|c| c.im));
            (&basis * re, &basis * im)
        };
        let s1 = &z2 - &z1 * lambda.re;
        let s2 = -&z1 * lambda.im;

        let mut candidates = Vec::new();
        candidates.push((&s1 - jm * &s2, &t1 + jm * &t2));
        candidates.push((&s1 + jm * &s2, &t1 - jm * &t2));

        let mut level_best: Option<(f64, DVector<f64>, DVector<f64>)> = None;
        for (x, y) in candidates {
            let (nx, ny) = (x.norm(), y.norm());
            if nx <= tol || ny <= tol {
                continue;
            }
            let xu = x / nx;
            let yu = y / ny;
            let residual = beta.evaluate(&xu, &yu).norm() / scale;
            best_residual = best_residual.min(residual);
            if residual <= tol * 100.0 {
                match &level_best {
                    Some((r, _, _)) if *r <= residual => {}
                    _ => level_best = Some((residual, xu, yu)),
                }
            }
        }
        if let Some((_, x, y)) = level_best {
            return Ok((x, y));
        }
    }
    Err(Error::SearchFailed { best: best_residual })
}

fn complex_eigenvector(a: &DMatrix<f64>, lambda: Complex<f64>) -> DVector<Complex<f64>> {
    let d = a.nrows();
    let mut m = DMatrix::<Complex<f64>>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = Complex::new(a[(i, j)], 0.0);
        }
        m[(i, i)] -= lambda;
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.unwrap();
    // row of V^H for the smallest singular value, conjugated back
    let row = v_t.row(d - 1);
    DVector::from_iterator(d, row.iter().map(|c| c.conj()))
}

/// Internal restriction of a pair to a J-invariant subspace of the domain,
/// with lift matrices back to the enclosing coordinates.
struct Restriction {
    pair: KaehlerPair,
    domain_lift: DMatrix<f64>,
    target_lift: DMatrix<f64>,
}

fn restrict_to_subspace(pair: &KaehlerPair, sub: &Subspace, tol: f64) -> Result<Restriction> {
    let j = pair.complex_structure();
    let inv_defect = j_invariance_defect(sub, j, tol);
    if inv_defect > tol * 1e3 {
        return Err(Error::RecursionFailed(format!(
            "kernel is not J-invariant (defect {inv_defect:.3e})"
        )));
    }

    // basis orthonormal for the domain inner product
    let raw = sub.basis();
    let m = raw.transpose() * pair.domain_inner() * raw;
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::RecursionFailed("restricted domain inner product not positive".into()))?;
    let correction = chol
        .l()
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::RecursionFailed("basis correction is singular".into()))?;
    let lift = raw * correction;

    // restricted complex structure, re-orthonormalized when drifted
    let mut j_r = lift.transpose() * pair.domain_inner() * j.matrix() * &lift;
    let dim_r = j_r.nrows();
    let sq_defect = (&j_r * &j_r + DMatrix::<f64>::identity(dim_r, dim_r)).norm();
    if sq_defect > tol / 10.0 {
        let skew = (&j_r - j_r.transpose()) * 0.5;
        let svd = skew.svd(true, true);
        j_r = svd.u.unwrap() * svd.v_t.unwrap();
    }
    let j_restricted = ComplexStructure::new(j_r, &DMatrix::identity(dim_r, dim_r), tol * 1e3)
        .map_err(|e| Error::RecursionFailed(format!("restricted complex structure invalid: {e}")))?;

    // base directions actually hit by the restricted form
    let beta_res = pair.beta().compose(&lift, &lift);
    let p = pair.lorentz_dim();
    let d_r = lift.ncols();
    let mut firsts = DMatrix::zeros(p, d_r * d_r);
    for i in 0..d_r {
        for k in 0..d_r {
            firsts.set_column(i * d_r + k, &pair.doubled().first(&beta_res.value(i, k)));
        }
    }
    let u2 = linalg::col_space(&firsts, tol);
    if u2.ncols() == 0 {
        return Err(Error::RecursionFailed("restricted form vanishes".into()));
    }
    let restricted_gram = u2.transpose() * pair.doubled().base().gram() * &u2;
    let new_base = QuadSpace::with_tol(restricted_gram, tol)
        .map_err(|_| Error::RecursionFailed("restricted span is degenerate".into()))?;

    let alpha_res = pair
        .alpha()
        .compose(&lift, &lift)
        .map_target(&u2.transpose(), new_base);
    let restricted = KaehlerPair::from_parts(
        alpha_res,
        j_restricted,
        DMatrix::identity(dim_r, dim_r),
        None,
    );

    // derived restriction must agree with the direct one
    let mut drift = 0.0f64;
    for i in 0..d_r {
        for k in 0..d_r {
            let direct = beta_res.value(i, k);
            let derived = restricted.beta().value(i, k);
            let lifted = {
                let mut v = DVector::zeros(2 * p);
                v.rows_mut(0, p).copy_from(&(&u2 * derived.rows(0, u2.ncols())));
                v.rows_mut(p, p)
                    .copy_from(&(&u2 * derived.rows(u2.ncols(), u2.ncols())));
                v
            };
            drift = drift.max((direct - lifted).norm());
        }
    }
    let scale = 1.0 + pair.beta().max_value_norm();
    if drift > tol * scale * 1e3 {
        return Err(Error::RecursionFailed(format!(
            "restricted form drifts from the direct restriction ({drift:.3e})"
        )));
    }

    Ok(Restriction { pair: restricted, domain_lift: lift, target_lift: u2 })
}

/// A vector whose left map has kernel of dimension 2n - 2, found by the
/// recursive descent on left-map kernels.
pub fn corank2_element(pair: &KaehlerPair, seed: u64, tol: f64) -> Result<DVector<f64>> {
    let n = pair.half_dim();
    let d = pair.domain_dim();
    let beta = pair.beta();
    if n == 1 {
        // any unit vector works: β(X,X) and β(X,JX) are independent
        let mut x = DVector::zeros(d);
        x[0] = 1.0;
        let lx = beta.left_map(&x);
        if linalg::rank(&lx, tol) != 2 {
            return Err(Error::RecursionFailed("rank-2 left map expected for n = 1".into()));
        }
        return Ok(x);
    }

    let (x, _) = zero_product_pair(pair, seed, tol)?;
    let lx = beta.left_map(&x);
    let kernel = Subspace::from_matrix(&linalg::null_space(&lx, tol), tol);
    if kernel.rank() == 0 {
        return Err(Error::RecursionFailed("zero-product pair produced no kernel".into()));
    }
    if kernel.rank() == d - 2 {
        return Ok(x);
    }

    let restriction = restrict_to_subspace(pair, &kernel, tol)?;
    if !restriction.pair.beta().right_kernel(tol).is_zero() {
        return Err(Error::RecursionFailed("restricted form has nontrivial kernel".into()));
    }
    let inner = corank2_element(&restriction.pair, next_seed(seed), tol)?;
    let z0 = &restriction.domain_lift * inner;
    let z0 = &z0 / z0.norm();
    let rank_z0 = linalg::rank(&beta.left_map(&z0), tol);
    if rank_z0 != 2 {
        return Err(Error::RecursionFailed(format!(
            "lifted element has left-map rank {rank_z0}, expected 2"
        )));
    }
    Ok(z0)
}

/// The orthogonal splitting of the span at a corank-2 element Z:
/// S(β) = B_Z(V) ⊕ S(β|_{N(Z) × N(Z)}), with B_Z(V) spanned by the
/// nondegenerate pair (ξ, 0), (0, ξ).
pub struct KernelCorankSplit {
    pub image: Subspace,
    pub rest: Subspace,
    pub xi: DVector<f64>,
    pub cross_defect: f64,
}

pub fn kercod2_split(pair: &KaehlerPair, z: &DVector<f64>, tol: f64) -> Result<KernelCorankSplit> {
    let d = pair.domain_dim();
    let beta = pair.beta();
    let lz = beta.left_map(z);
    let kernel = linalg::null_space(&lz, tol);
    if kernel.ncols() != d - 2 {
        return Err(Error::BadCorank { got: kernel.ncols(), expected: d - 2 });
    }
    let image = Subspace::from_matrix(&lz, tol);

    let b_zz = beta.evaluate(z, z);
    let xi = pair.doubled().first(&b_zz);
    let second = pair.doubled().second(&b_zz);
    let scale = 1.0 + beta.max_value_norm();
    if second.norm() > tol * scale * 1e3 || xi.norm() <= tol * scale {
        return Err(Error::IllConditioned { defect: second.norm().max(xi.norm()) });
    }
    let base = pair.doubled().base();
    if base.inner(&xi, &xi).abs() <= tol * scale * scale {
        return Err(Error::IllConditioned { defect: base.inner(&xi, &xi).abs() });
    }
    let p = base.dim();
    let zero = DVector::zeros(p);
    let xi_span = Subspace::span(
        2 * p,
        &[pair.doubled().pair(&xi, &zero), pair.doubled().pair(&zero, &xi)],
        tol,
    );
    if !image.equals(&xi_span, tol * 1e3) {
        return Err(Error::IllConditioned { defect: 1.0 });
    }

    let restricted = beta.compose(&kernel, &kernel);
    let rest = restricted.image_span(tol);
    let cross = image.basis().transpose() * pair.doubled().whole().gram() * rest.basis();
    let cross_defect = cross.norm();

    let total = image.sum(&rest, tol);
    let span = beta.image_span(tol);
    if !total.equals(&span, tol * 1e3) || image.rank() + rest.rank() != span.rank() {
        return Err(Error::IllConditioned { defect: cross_defect });
    }
    Ok(KernelCorankSplit { image, rest, xi, cross_defect })
}

/// Runs the full recursive construction, returning the diagonalizing basis
/// with base directions normalized and time-like slots listed first.
pub fn diagonalize(pair: &KaehlerPair, seed: u64, tol: f64) -> Result<DiagonalizingBasis> {
    let n = pair.half_dim();
    let beta = pair.beta();
    let report = beta.flatness_report(tol);
    if !report.is_flat {
        return Err(Error::NotFlat { defect: report.max_defect, tol });
    }
    let span = beta.image_span(tol);
    if !radical(pair.doubled().whole(), &span, tol).is_zero() {
        return Err(Error::DegenerateSpan);
    }
    let scale = (1.0 + beta.max_value_norm()) * (1.0 + pair.gamma().max_value_norm());
    let compat = pair.compatibility_defect();
    if compat > tol * scale {
        return Err(Error::HypothesisViolated(format!(
            "exchange identity fails with defect {compat:.3e}"
        )));
    }
    if !beta.right_kernel(tol).is_zero() {
        return Err(Error::HypothesisViolated("β has nontrivial kernel".into()));
    }
    let analysis = pair.span_analysis(tol);
    if analysis.s != n {
        return Err(Error::HypothesisViolated(format!(
            "span projection has dimension {} but n = {}",
            analysis.s, n
        )));
    }
    if pair.lorentz_dim() >= 4 {
        degenerate_subspace_scan(pair, seed, 200, tol)?;
    }

    let mut current = pair.clone();
    let mut domain_lift = DMatrix::<f64>::identity(pair.domain_dim(), pair.domain_dim());
    let mut target_lift = DMatrix::<f64>::identity(pair.lorentz_dim(), pair.lorentz_dim());
    let mut level_seed = seed;

    let mut raw_pairs: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut raw_xis: Vec<DVector<f64>> = Vec::with_capacity(n);
    for level in 0..n {
        let x = corank2_element(&current, level_seed, tol)?;
        let value = current.beta().evaluate(&x, &x);
        let xi = current.doubled().first(&value);
        raw_pairs.push(&domain_lift * &x);
        raw_xis.push(&target_lift * xi);

        if level + 1 == n {
            break;
        }
        let lx = current.beta().left_map(&x);
        let kernel = Subspace::from_matrix(&linalg::null_space(&lx, tol), tol);
        if kernel.rank() != current.domain_dim() - 2 {
            return Err(Error::BadCorank { got: kernel.rank(), expected: current.domain_dim() - 2 });
        }
        let restriction = restrict_to_subspace(&current, &kernel, tol)?;
        domain_lift = &domain_lift * &restriction.domain_lift;
        target_lift = &target_lift * &restriction.target_lift;
        current = restriction.pair;
        level_seed = next_seed(level_seed);
    }

    // normalize: X scaled by |<ξ,ξ>|^{-1/4}, ξ by |<ξ,ξ>|^{-1/2}; record sign
    let base = pair.doubled().base();
    let mut entries: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(n);
    for (x, xi) in raw_pairs.into_iter().zip(raw_xis.into_iter()) {
        let norm2 = base.inner(&xi, &xi);
        if norm2.abs() <= tol {
            return Err(Error::IllConditioned { defect: norm2.abs() });
        }
        let sign = norm2.signum();
        let x_scaled = &x / norm2.abs().powf(0.25);
        let xi_scaled = &xi / norm2.abs().sqrt();
        entries.push((sign, x_scaled, xi_scaled));
    }
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut basis = DiagonalizingBasis { pairs: Vec::new(), xis: Vec::new(), norms: Vec::new() };
    for (sign, x, xi) in entries {
        basis.norms.push(sign);
        basis.pairs.push(x);
        basis.xis.push(xi);
    }
    Ok(basis)
}

/// Sampled necessary check of the extra hypothesis for p ≥ 4: no random
/// J-invariant subspace may have a degenerate restricted span of dimension
/// at most dim V₁ - 2. A sampled check cannot certify the universal
/// statement; it can only refute it.
fn degenerate_subspace_scan(pair: &KaehlerPair, seed: u64, samples: usize, tol: f64) -> Result<()> {
    let d = pair.domain_dim();
    let n = pair.half_dim();
    let jm = pair.complex_structure().matrix();
    let whole = pair.doubled().whole();
    let mut stream = UnitVectors::new(d, next_seed(seed ^ 0xD15C));
    for half in 1..n {
        for _ in 0..samples / (n - 1).max(1) {
            let mut vecs = Vec::with_capacity(2 * half);
            for _ in 0..half {
                let v = stream.next_unit();
                vecs.push(jm * &v);
                vecs.push(v);
            }
            let v1 = Subspace::span(d, &vecs, tol);
            if v1.rank() != 2 * half {
                continue;
            }
            let restricted = pair.beta().compose(v1.basis(), v1.basis());
            let span = restricted.image_span(tol);
            if span.rank() + 2 <= v1.rank() && !radical(whole, &span, tol).is_zero() {
                return Err(Error::HypothesisViolated(
                    "a sampled J-invariant subspace has a small degenerate restricted span".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Residuals of the two diagonalization properties for a basis.
pub fn diagonalization_report(pair: &KaehlerPair, basis: &DiagonalizingBasis, tol: f64) -> DiagonalizationReport {
    let n = basis.pairs.len();
    let beta = pair.beta();
    let jm = pair.complex_structure().matrix();

    let mut offdiag_max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let xi = &basis.pairs[i];
            let xj = &basis.pairs[j];
            let gens_i = [xi.clone(), jm * xi];
            let gens_j = [xj.clone(), jm * xj];
            for a in &gens_i {
                for b in &gens_j {
                    offdiag_max = offdiag_max.max(beta.evaluate(a, b).norm());
                }
            }
        }
    }

    // Gram of the normalized 2n span generators
    let whole = pair.doubled().whole();
    let mut gens: Vec<DVector<f64>> = Vec::with_capacity(2 * n);
    for x in &basis.pairs {
        gens.push(beta.evaluate(x, x));
        gens.push(beta.evaluate(x, &(jm * x)));
    }
    let mut gram_offdiag = 0.0f64;
    let mut gram_diag_defect = 0.0f64;
    let mut gram_signs = Vec::with_capacity(2 * n);
    for (r, gr) in gens.iter().enumerate() {
        for (c, gc) in gens.iter().enumerate() {
            let val = whole.inner(gr, gc);
            if r == c {
                gram_diag_defect = gram_diag_defect.max((val.abs() - 1.0).abs());
                gram_signs.push(val.signum());
            } else {
                gram_offdiag = gram_offdiag.max(val.abs());
            }
        }
    }

    let _ = tol;
    DiagonalizationReport { offdiag_max, gram_offdiag, gram_diag_defect, gram_signs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::BilinearMap;
    use crate::kaehler::{build_pair, tests::example_like_pair};
    use crate::linalg::DEFAULT_TOL;

    #[test]
    fn zero_product_pair_on_block_diagonal_form() {
        let pair = example_like_pair();
        let (x, y) = zero_product_pair(&pair, 1, DEFAULT_TOL).unwrap();
        let scale = 1.0 + pair.beta().max_value_norm();
        assert!(pair.beta().evaluate(&x, &y).norm() <= 1e-8 * scale);
        assert!(x.norm() > 0.9 && y.norm() > 0.9);
    }

    #[test]
    fn zero_product_pair_rejects_n_one() {
        let target = QuadSpace::from_diag(&[1.0, -1.0]);
        let alpha = BilinearMap::from_fn(2, target, |i, j| {
            let mut v = DVector::zeros(2);
            if i == j {
                v[0] = 1.0;
                v[1] = 1.0;
            }
            v
        });
        let j = ComplexStructure::standard(1);
        let pair = build_pair(alpha, j, DMatrix::identity(2, 2), None, DEFAULT_TOL).unwrap();
        assert!(matches!(
            zero_product_pair(&pair, 0, DEFAULT_TOL),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn corank2_element_on_product_form() {
        let pair = example_like_pair();
        let z = corank2_element(&pair, 3, DEFAULT_TOL).unwrap();
        let kernel = linalg::null_space(&pair.beta().left_map(&z), DEFAULT_TOL);
        assert_eq!(kernel.ncols(), pair.domain_dim() - 2);
    }

    #[test]
    fn kercod2_split_on_factor_vector() {
        let pair = example_like_pair();
        // a single-factor direction has corank 2 by the block structure
        let mut z = DVector::zeros(pair.domain_dim());
        z[0] = 1.0;
        let split = kercod2_split(&pair, &z, DEFAULT_TOL).unwrap();
        assert_eq!(split.image.rank(), 2);
        assert_eq!(split.rest.rank(), pair.domain_dim() - 2);
        assert!(split.cross_defect <= 1e-10);
    }

    #[test]
    fn kercod2_split_rejects_full_rank_elements() {
        let pair = example_like_pair();
        // a generic combination across factors has full-rank left map
        let mut z = DVector::zeros(pair.domain_dim());
        z[0] = 1.0;
        z[2] = 1.0;
        z[4] = 1.0;
        let z = &z / z.norm();
        assert!(matches!(kercod2_split(&pair, &z, DEFAULT_TOL), Err(Error::BadCorank { .. })));
    }

    #[test]
    fn diagonalize_recovers_block_structure() {
        let pair = example_like_pair();
        let basis = diagonalize(&pair, 11, DEFAULT_TOL).unwrap();
        assert_eq!(basis.pairs.len(), 3);
        let report = diagonalization_report(&pair, &basis, DEFAULT_TOL);
        assert!(report.offdiag_max <= 1e-8, "offdiag {}", report.offdiag_max);
        assert!(report.gram_offdiag <= 1e-8, "gram offdiag {}", report.gram_offdiag);
        assert!(report.gram_diag_defect <= 1e-8);
        // one time-like factor listed first
        assert_eq!(basis.norms[0], -1.0);
        assert_eq!(basis.norms[1], 1.0);
        assert_eq!(basis.norms[2], 1.0);

        // each recovered pair plane aligns with a coordinate factor plane
        let d = pair.domain_dim();
        let jm = pair.complex_structure().matrix();
        for x in &basis.pairs {
            let plane = Subspace::span(d, &[x.clone(), jm * x], DEFAULT_TOL);
            let mut best = f64::INFINITY;
            for f in 0..3 {
                let mut e1 = DVector::zeros(d);
                let mut e2 = DVector::zeros(d);
                e1[2 * f] = 1.0;
                e2[2 * f + 1] = 1.0;
                let factor = Subspace::span(d, &[e1, e2], DEFAULT_TOL);
                let angles = plane.principal_angles(&factor);
                let worst = angles.iter().fold(0.0f64, |m, a| m.max(*a));
                best = best.min(worst);
            }
            assert!(best <= 1e-7, "plane misaligned by {best}");
        }
    }

    #[test]
    fn diagonalize_rejects_degenerate_span() {
        // synthetic umbilic form: the span is a doubled null line
        let n = 2;
        let d = 2 * n;
        let p = 3;
        let target = QuadSpace::minkowski_time_last(p);
        let alpha = BilinearMap::from_fn(d, target, move |i, j| {
            let mut v = DVector::zeros(p);
            if i == j {
                v[0] = 1.0;
                v[p - 1] = 1.0;
            }
            v
        });
        let j = ComplexStructure::standard(n);
        let mut w = DVector::zeros(p);
        w[p - 1] = 1.0;
        let pair = build_pair(alpha, j, DMatrix::identity(d, d), Some(w), DEFAULT_TOL).unwrap();
        assert!(matches!(diagonalize(&pair, 0, DEFAULT_TOL), Err(Error::DegenerateSpan)));
    }

    #[test]
    fn diagonalize_matches_direct_two_by_two_computation() {
        // n = 1, p = 1: β is determined by a single value (ξ, 0)
        let target = QuadSpace::from_diag(&[-1.0]);
        let alpha = BilinearMap::from_fn(2, target, |i, j| {
            DVector::from_vec(vec![if i == j { 1.0 } else { 0.0 }])
        });
        let j = ComplexStructure::standard(1);
        let w = DVector::from_vec(vec![1.0]);
        let pair = build_pair(alpha, j, DMatrix::identity(2, 2), Some(w), DEFAULT_TOL).unwrap();
        let basis = diagonalize(&pair, 5, DEFAULT_TOL).unwrap();
        assert_eq!(basis.pairs.len(), 1);

        // direct computation from the unit vector e1: β(e1,e1) = (2, 0),
        // <ξ,ξ> = -4, so X = e1 / sqrt(2) and ξ = (1,0) up to sign
        assert_eq!(basis.norms[0], -1.0);
        assert!((basis.xis[0].norm() - 1.0).abs() <= 1e-12);
        let x = &basis.pairs[0];
        let value = pair.beta().evaluate(x, x);
        let whole = pair.doubled().whole();
        assert!((whole.inner(&value, &value).abs() - 1.0).abs() <= 1e-10);
    }
}
