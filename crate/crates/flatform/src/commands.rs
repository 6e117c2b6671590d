//! The verification suites behind the command-line interface.
//!
//! Every command returns a [`Report`]; input and parse problems surface as
//! errors (exit code 2), failed checks leave the report with a false flag
//! (exit code 1).

use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::bilinear::BilinearMap;
use crate::diag::{diagonalize, diagonalization_report};
use crate::error::{Error, Result};
use crate::formfile::{BasisFile, FormFile};
use crate::geometry::{
    eigen_split, flat_subspace_witness, hessian_check, make_example1, make_horosphere_composition,
    parallel_normal_check, umbilical_normal, ProductImmersion, SurfaceImmersion,
};
use crate::kaehler::{build_pair, symmetry_defect, DoubledSpace};
use crate::linalg::UnitVectors;
use crate::random::{random_flat_degenerate_pair, random_shapeid_pair, random_subspace};
use crate::report::Report;
use crate::space::{decompose_degenerate, decomposition_defect, QuadSpace, Subspace};

fn finish(mut report: Report, started: Instant) -> Report {
    report.runtime_ms = started.elapsed().as_millis();
    report
}

/// Flatness check of a serialized form.
pub fn cmd_check_flat(path: &Path, tol: f64) -> Result<Report> {
    let started = Instant::now();
    let file = FormFile::load(path)?;
    let (form, _) = file.to_form(tol)?;
    let mut report = Report::new("check-flat", 0);
    let flatness = form.flatness_report(tol);
    let scale = (1.0 + form.max_value_norm()).powi(2);
    report.push("flatness", flatness.max_defect, tol * scale);
    Ok(finish(report, started))
}

/// Diagonalization of a serialized symmetric form with complex structure.
/// The stored tensor is interpreted as α over its Lorentzian target; the
/// derived β is diagonalized and the basis written to `out` when given.
pub fn cmd_diagonalize(path: &Path, tol: f64, seed: u64, out: Option<&Path>) -> Result<Report> {
    let started = Instant::now();
    let file = FormFile::load(path)?;
    let (alpha, j) = file.to_form(tol)?;
    let j = j.ok_or_else(|| Error::InvalidInput("diagonalization requires a complex structure J".into()))?;
    if alpha.target().signature().1 != 1 {
        return Err(Error::InvalidInput("the target of α must be Lorentzian".into()));
    }
    let w = file.w_index.map(|idx| {
        let mut w = DVector::zeros(alpha.target().dim());
        w[idx] = 1.0;
        w
    });
    let d = alpha.domain_dim();
    let mut report = Report::new("diagonalize", seed);

    let pair = match build_pair(alpha, j, DMatrix::identity(d, d), w, tol) {
        Ok(p) => p,
        Err(e) => {
            report.reason = Some(e.reason().to_string());
            return Ok(finish(report, started));
        }
    };
    match diagonalize(&pair, seed, tol) {
        Ok(basis) => {
            let diag = diagonalization_report(&pair, &basis, tol);
            report.push("pairwise_products", diag.offdiag_max, 1e-8);
            report.push("span_gram_offdiagonal", diag.gram_offdiag, 1e-8);
            report.push("span_gram_unit_norms", diag.gram_diag_defect, 1e-8);
            if let Some(out_path) = out {
                BasisFile::from_basis(&basis).save(out_path)?;
            }
        }
        Err(e) => {
            report.reason = Some(e.reason().to_string());
        }
    }
    Ok(finish(report, started))
}

/// Full battery on the extrinsic product of umbilical surfaces.
pub fn cmd_example_suite(radii: &[f64], points: usize, tol: f64, seed: u64) -> Result<Report> {
    let started = Instant::now();
    let imm = make_example1(radii)?;
    let curvatures = imm.factor_curvatures();
    let n = imm.half_dim();
    let d = 2 * n;
    let mut report = Report::new("example-suite", seed);

    let mut position_norm = 0.0f64;
    let mut flatness = 0.0f64;
    let mut product_identity = 0.0f64;
    let mut k_errors = vec![0.0f64; n];
    let mut ric_errors = vec![0.0f64; n];
    let mut mixed = 0.0f64;

    let params_list = imm.sample_params(seed, points.max(1));
    for params in &params_list {
        let pos = imm.position(params)?;
        position_norm = position_norm.max((imm.ambient().inner(&pos, &pos) + 1.0).abs());
        let frame = imm.frame_at(params)?;
        let pair = imm.kaehler_pair_at(&frame)?;
        flatness = flatness.max(pair.beta().flatness_report(tol).max_defect);
        product_identity = product_identity.max(pair.compatibility_defect());

        let data = imm.second_fundamental_form(&frame)?;
        for f in 0..n {
            let mut x = DVector::zeros(d);
            x[2 * f] = 1.0;
            k_errors[f] = k_errors[f].max((data.holomorphic(&x) - curvatures[f]).abs());
            ric_errors[f] = ric_errors[f].max((data.ricci(&x) - curvatures[f]).abs());
            for other in 0..n {
                if other != f {
                    let mut y = DVector::zeros(d);
                    y[2 * other] = 1.0;
                    mixed = mixed.max(data.sectional(&x, &y).abs());
                }
            }
        }
    }
    report.push("position_norm", position_norm, 1e-12);
    report.push("flatness", flatness, tol);
    report.push("exchange_identity", product_identity, tol);
    for f in 0..n {
        report.push(format!("K_factor_{}", f + 1), k_errors[f], tol);
        report.push(format!("Ric_factor_{}", f + 1), ric_errors[f], tol);
    }
    report.push("mixed_sectional", mixed, 1e-10);

    // diagonalization and eigensplit structure at the first sampled point
    let frame = imm.frame_at(&params_list[0])?;
    let pair = imm.kaehler_pair_at(&frame)?;
    match diagonalize(&pair, seed, tol) {
        Ok(basis) => {
            let diag = diagonalization_report(&pair, &basis, tol);
            report.push("diag_pairwise_products", diag.offdiag_max, 1e-8);
            report.push("diag_span_gram_offdiagonal", diag.gram_offdiag, 1e-8);
            report.push("diag_span_gram_unit_norms", diag.gram_diag_defect, 1e-8);
            report.push("diag_factor_alignment", factor_alignment(&imm, &pair, &basis), 1e-7);
        }
        Err(e) => {
            report.reason = Some(e.reason().to_string());
        }
    }
    match eigen_split(&imm, &frame, tol) {
        Ok(splits) => {
            report.push_flag("eigen_split_count", splits.len() == n);
            let data = imm.second_fundamental_form(&frame)?;
            let target = data.alpha_g.target();
            let mut ortho = 0.0f64;
            for (i, (_, ei)) in splits.iter().enumerate() {
                for (jdx, (_, ej)) in splits.iter().enumerate() {
                    if i != jdx {
                        ortho = ortho.max(target.inner(ei, ej).abs());
                    }
                }
            }
            report.push("eigen_split_normals_orthogonal", ortho, 1e-10);
        }
        Err(e) => {
            report.reason = Some(e.reason().to_string());
        }
    }
    Ok(finish(report, started))
}

fn factor_alignment(imm: &ProductImmersion, pair: &crate::kaehler::KaehlerPair, basis: &crate::diag::DiagonalizingBasis) -> f64 {
    let d = 2 * imm.half_dim();
    let jm = pair.complex_structure().matrix();
    let mut worst_overall = 0.0f64;
    for x in &basis.pairs {
        let plane = Subspace::span(d, &[x.clone(), jm * x], 1e-12);
        let mut best = f64::INFINITY;
        for f in 0..imm.half_dim() {
            let mut e1 = DVector::zeros(d);
            e1[2 * f] = 1.0;
            let mut e2 = DVector::zeros(d);
            e2[2 * f + 1] = 1.0;
            let factor = Subspace::span(d, &[e1, e2], 1e-12);
            let worst = plane.principal_angles(&factor).iter().fold(0.0f64, |m, a| m.max(*a));
            best = best.min(worst);
        }
        worst_overall = worst_overall.max(best);
    }
    worst_overall
}

/// Degenerate-span pipeline on the horosphere composition.
pub fn cmd_horosphere_suite(n: usize, points: usize, tol: f64, seed: u64) -> Result<Report> {
    let started = Instant::now();
    let imm = make_horosphere_composition(n, SurfaceImmersion::sphere(1.0))?;
    let mut report = Report::new("horosphere-suite", seed);

    let mut position_norm = 0.0f64;
    let mut pullback = 0.0f64;
    let d = 2 * n;
    let params_list = imm.sample_params(seed, points.max(1));
    for params in &params_list {
        let pos = imm.position(params)?;
        position_norm = position_norm.max((imm.ambient().inner(&pos, &pos) + 1.0).abs());
        let frame = imm.frame_at(params)?;
        let gram = frame.tangent.transpose() * imm.ambient().gram() * &frame.tangent;
        pullback = pullback.max((gram - DMatrix::<f64>::identity(d, d)).norm());
    }
    report.push("position_norm", position_norm, 1e-12);
    report.push("pullback_gram", pullback, 1e-12);

    let frame = imm.frame_at(&params_list[0])?;
    let pair = imm.kaehler_pair_at(&frame)?;
    let analysis = pair.span_analysis(tol);
    report.push_flag("span_degenerate", analysis.degenerate);
    report.push("span_doubling", analysis.split_defect, tol);

    let split = pair.degenerate_split(tol)?;
    report.push("beta_decomposition", split.decomp_residual, tol);
    report.push_flag(
        "beta1_kernel_bound",
        split.kernel1.rank() + 2 * split.s >= d + 2,
    );

    let umbilical = pair.umbilical_analysis(&split, 1000, seed, tol)?;
    report.push("umbilic_pairing", umbilical.umbilic_defect, tol);
    report.push("alpha_plane_split", umbilical.alphapar_residual, tol);
    let k_max = umbilical.k_values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let ric_max = umbilical.ric_values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    report.push("kernel_holomorphic_functional", k_max.max(0.0), 1e-10);
    report.push("kernel_ricci_functional", ric_max.max(0.0), 1e-10);

    // the witness subspace needs codimension at most n - 2
    if imm.codim() + 2 <= n {
        let witness = flat_subspace_witness(&imm, &frame, 1000, seed, tol)?;
        report.push_flag("witness_dimension", witness.ell + imm.codim() >= n + 1);
        report.push("witness_holomorphic_curvature", witness.k_max.max(0.0), 1e-10);
        report.push("witness_ricci_curvature", witness.ric_max.max(0.0), 1e-10);
    }

    let (_, a_eta_residual) = umbilical_normal(&imm, &frame, tol)?;
    report.push("identity_shape_operator", a_eta_residual, tol);
    let parallel = parallel_normal_check(&imm, 3, seed, 1e-4, tol)?;
    report.push("parallel_normal", parallel, 1e-6);

    // Hessian of the distance function against central differences
    let other = imm.frame_at(&params_list[params_list.len() - 1])?;
    let reference = if (other.position.clone() - &frame.position).norm() < 1e-6 {
        let shifted = imm.sample_params(seed.wrapping_add(1), 1).remove(0);
        imm.frame_at(&shifted)?.position
    } else {
        other.position
    };
    let mut stream = UnitVectors::new(d, seed);
    let mut hessian_rel = 0.0f64;
    for _ in 0..20 {
        let x = stream.next_unit();
        let (analytic, numeric) = hessian_check(&imm, &frame, &x, &reference, 1e-4)?;
        hessian_rel = hessian_rel.max((analytic - numeric).abs() / analytic.abs().max(1.0));
    }
    report.push("hessian_agreement", hessian_rel, 1e-4);
    Ok(finish(report, started))
}

/// Algebraic identity sweep over seeded random instances.
pub fn cmd_random_suite(trials: usize, seed: u64, dims: (usize, usize), corrupt: bool) -> Result<Report> {
    let started = Instant::now();
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial is required".into()));
    }
    let (n, p) = dims;
    if n < 2 || p < 2 {
        return Err(Error::InvalidInput("dims must satisfy n >= 2 and p >= 2".into()));
    }
    let mut report = Report::new("random-suite", seed);

    let mut symmetry = 0.0f64;
    let mut span_doubling = 0.0f64;
    let mut pairing_residual = 0.0f64;
    let mut kernel_trivial = true;
    let mut radical_defect = 0.0f64;
    let mut moore = 0.0f64;

    for t in 0..trials {
        let trial_seed = seed.wrapping_add(t as u64);
        let pair = random_shapeid_pair(n, p, trial_seed);
        symmetry = symmetry.max(pair.symmetry_report());
        let analysis = pair.span_analysis(1e-9);
        span_doubling = span_doubling.max(analysis.split_defect);
        kernel_trivial &= pair.beta().right_kernel(1e-9).is_zero();

        // <<β(X,Y), (w,0)>> = -2 (X,Y) over sampled vectors
        let w = pair.w().expect("random pair carries w").clone();
        let w_pair = pair.doubled().pair(&w, &DVector::zeros(p));
        let mut stream = UnitVectors::new(2 * n, trial_seed ^ 0xAB);
        for _ in 0..10 {
            let x = stream.next_unit();
            let y = stream.next_unit();
            let lhs = pair.doubled().whole().inner(&pair.beta().evaluate(&x, &y), &w_pair);
            pairing_residual = pairing_residual.max((lhs + 2.0 * pair.domain_pairing(&x, &y)).abs());
        }

        // radical splitting of a random subspace of a random indefinite space
        let space = QuadSpace::minkowski_time_first(p + 1);
        let sub = random_subspace(p + 1, 1 + (t % p), trial_seed ^ 0xCD);
        let deco = decompose_degenerate(&space, &sub, 1e-9)?;
        radical_defect = radical_defect.max(decomposition_defect(&space, &sub, &deco, 1e-9));

        // inclusion at a regular element of a synthetic flat degenerate form
        let factors = 1 + t % (p - 1).min(n);
        if factors + 2 <= p {
            let flat_pair = random_flat_degenerate_pair(n, p, factors, trial_seed);
            let (x, _) = flat_pair.beta().find_regular_element(trial_seed, 32, 1e-9);
            moore = moore.max(flat_pair.beta().moore_defect(&x, 1e-9)?);
        }
    }

    if corrupt {
        // negative control: one flipped tensor entry must break the identities
        let pair = random_shapeid_pair(n, p, seed);
        let bad_value = pair.beta().value(0, 1) + DVector::from_element(2 * p, 1.0);
        let corrupted = pair.beta().with_value(0, 1, bad_value);
        let doubled = DoubledSpace::new(pair.alpha().target().clone());
        symmetry = symmetry.max(symmetry_defect(&corrupted, pair.complex_structure(), &doubled));
    }

    report.push("derived_symmetries", symmetry, 1e-9);
    report.push("span_doubling", span_doubling, 1e-9);
    report.push("shape_pairing", pairing_residual, 1e-9);
    report.push_flag("kernel_trivial", kernel_trivial);
    report.push("radical_decomposition", radical_defect, 1e-9);
    report.push("regular_element_inclusion", moore, 1e-9);
    Ok(finish(report, started))
}

/// Exports the point data of the product immersion as form files: the
/// derived flat form β over the doubled space, and α with J and the
/// position index for diagonalization input.
pub fn export_example1_forms(radii: &[f64], seed: u64) -> Result<(FormFile, FormFile)> {
    let imm = make_example1(radii)?;
    let params = imm.sample_params(seed, 1).remove(0);
    let frame = imm.frame_at(&params)?;
    let pair = imm.kaehler_pair_at(&frame)?;
    let beta_file = FormFile::from_form(pair.beta(), None, None);
    let alpha_file = FormFile::from_form(pair.alpha(), Some(pair.complex_structure()), Some(imm.codim()));
    Ok((beta_file, alpha_file))
}

/// Exports α with J for the horosphere composition, whose derived form has
/// a degenerate span.
pub fn export_horosphere_form(n: usize, seed: u64) -> Result<FormFile> {
    let imm = make_horosphere_composition(n, SurfaceImmersion::sphere(1.0))?;
    let params = imm.sample_params(seed, 1).remove(0);
    let frame = imm.frame_at(&params)?;
    let pair = imm.kaehler_pair_at(&frame)?;
    Ok(FormFile::from_form(pair.alpha(), Some(pair.complex_structure()), Some(imm.codim())))
}

/// Non-flat reference input: the Euclidean inner product as a form into R.
pub fn export_inner_product_form(dim: usize) -> FormFile {
    let form = BilinearMap::from_fn(dim, QuadSpace::euclidean(1), |i, j| {
        DVector::from_vec(vec![if i == j { 1.0 } else { 0.0 }])
    });
    FormFile::from_form(&form, None, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_suite_passes_with_reference_radii() {
        let radii = vec![2.0, 1.0, 2.0f64.sqrt()];
        let report = cmd_example_suite(&radii, 5, 1e-9, 7).unwrap();
        assert!(report.all_pass(), "{}", report.to_json().unwrap());
    }

    #[test]
    fn example_suite_rejects_bad_radii() {
        assert!(matches!(
            cmd_example_suite(&[1.0, 1.0, 1.0], 5, 1e-9, 7),
            Err(Error::CurvatureConstraintViolated { .. })
        ));
    }

    #[test]
    fn horosphere_suite_passes() {
        let report = cmd_horosphere_suite(4, 5, 1e-9, 3).unwrap();
        assert!(report.all_pass(), "{}", report.to_json().unwrap());
    }

    #[test]
    fn random_suite_passes_and_corruption_fails() {
        let report = cmd_random_suite(20, 11, (3, 3), false).unwrap();
        assert!(report.all_pass(), "{}", report.to_json().unwrap());

        let corrupted = cmd_random_suite(5, 11, (3, 3), true).unwrap();
        assert!(!corrupted.all_pass());
        assert_eq!(corrupted.exit_code(), 1);
    }

    #[test]
    fn random_suite_is_deterministic_modulo_runtime() {
        let a = cmd_random_suite(10, 5, (2, 3), false).unwrap();
        let b = cmd_random_suite(10, 5, (2, 3), false).unwrap();
        assert_eq!(
            serde_json::to_string(&a.without_runtime()).unwrap(),
            serde_json::to_string(&b.without_runtime()).unwrap()
        );
    }

    #[test]
    fn check_flat_and_diagonalize_on_exported_files() {
        let dir = std::env::temp_dir().join("flatform-commands-test");
        std::fs::create_dir_all(&dir).unwrap();
        let radii = vec![2.0, 1.0, 2.0f64.sqrt()];
        let (beta_file, alpha_file) = export_example1_forms(&radii, 3).unwrap();

        let beta_path = dir.join("beta.json");
        beta_file.save(&beta_path).unwrap();
        let report = cmd_check_flat(&beta_path, 1e-9).unwrap();
        assert!(report.all_pass());

        let alpha_path = dir.join("alpha.json");
        alpha_file.save(&alpha_path).unwrap();
        let out_path = dir.join("basis.json");
        let report = cmd_diagonalize(&alpha_path, 1e-9, 5, Some(&out_path)).unwrap();
        assert!(report.all_pass(), "{}", report.to_json().unwrap());
        let basis = BasisFile::load(&out_path).unwrap();
        assert_eq!(basis.pairs.len(), 3);

        // rerun with the same seed: byte-identical basis file
        let bytes_first = std::fs::read(&out_path).unwrap();
        cmd_diagonalize(&alpha_path, 1e-9, 5, Some(&out_path)).unwrap();
        let bytes_second = std::fs::read(&out_path).unwrap();
        assert_eq!(bytes_first, bytes_second);

        // the non-flat reference input fails check-flat
        let inner_path = dir.join("inner.json");
        export_inner_product_form(3).save(&inner_path).unwrap();
        let report = cmd_check_flat(&inner_path, 1e-9).unwrap();
        assert_eq!(report.exit_code(), 1);

        // the degenerate-span export aborts diagonalization with a reason
        let horo_path = dir.join("horosphere.json");
        export_horosphere_form(4, 3).unwrap().save(&horo_path).unwrap();
        let report = cmd_diagonalize(&horo_path, 1e-9, 5, None).unwrap();
        assert_eq!(report.exit_code(), 1);
        assert_eq!(report.reason.as_deref(), Some("DegenerateSpan"));

        std::fs::remove_dir_all(&dir).unwrap();
    }
}
