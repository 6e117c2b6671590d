//! Acceptance suite: every criterion below prints one pass/fail line and
//! asserts at its stated tolerance (run with --nocapture to see the lines).
//!
//! Oracles in this file are deliberately independent of the library's
//! numerical kernels: null spaces are computed by Gauss-Jordan elimination,
//! the one-pair diagonalization fixes its output by a direct formula.

use nalgebra::{DMatrix, DVector};

use flatform::bilinear::BilinearMap;
use flatform::commands::{
    cmd_check_flat, cmd_diagonalize, cmd_example_suite, cmd_horosphere_suite, cmd_random_suite,
    export_example1_forms,
};
use flatform::diag::{diagonalization_report, diagonalize};
use flatform::formfile::BasisFile;
use flatform::geometry::{
    flat_subspace_witness, hessian_check, make_example1, make_horosphere_composition,
    parallel_normal_check, umbilical_normal, SurfaceImmersion,
};
use flatform::kaehler::{build_pair, ComplexStructure};
use flatform::linalg::UnitVectors;
use flatform::random::{random_flat_degenerate_pair, random_shapeid_pair};
use flatform::space::{radical, QuadSpace, Subspace};

const TOL: f64 = 1e-9;

fn radii() -> Vec<f64> {
    vec![2.0, 1.0, 2.0f64.sqrt()]
}

fn verdict(criterion: &str, pass: bool, detail: &str) -> bool {
    println!("{}: {} — {}", criterion, if pass { "PASS" } else { "FAIL" }, detail);
    pass
}

#[test]
fn criterion_1_product_construction() {
    let imm = make_example1(&radii()).expect("radii satisfy the constraint");
    let mut worst = 0.0f64;
    for params in imm.sample_params(1, 100) {
        let pos = imm.position(&params).expect("position");
        worst = worst.max((imm.ambient().inner(&pos, &pos) + 1.0).abs());
    }
    let curvature_sum: f64 = imm.factor_curvatures().iter().map(|c| 1.0 / c).sum();
    let pass = worst <= 1e-12 && (curvature_sum + 1.0).abs() <= 1e-12;
    assert!(verdict(
        "criterion 1 (product construction)",
        pass,
        &format!("position defect {worst:.2e}, curvature sum {curvature_sum:+.15}")
    ));
}

#[test]
fn criterion_2_flatness_and_exchange() {
    let imm = make_example1(&radii()).expect("radii");
    let mut flat = 0.0f64;
    let mut exchange = 0.0f64;
    let mut regular_rank_ok = true;
    for (k, params) in imm.sample_params(2, 50).iter().enumerate() {
        let frame = imm.frame_at(params).expect("frame");
        let pair = imm.kaehler_pair_at(&frame).expect("pair");
        flat = flat.max(pair.beta().flatness_report(TOL).max_defect);
        exchange = exchange.max(pair.compatibility_defect());
        if k == 0 {
            // the left map at a regular element is an isomorphism here
            let (x, rank) = pair.beta().find_regular_element(2, 64, TOL);
            regular_rank_ok = rank == pair.domain_dim();
            let moore = pair.beta().moore_defect(&x, TOL).expect("flat");
            regular_rank_ok &= moore == 0.0;
        }
    }
    let pass = flat <= 1e-9 && exchange <= 1e-9 && regular_rank_ok;
    assert!(verdict(
        "criterion 2 (flatness and exchange identity)",
        pass,
        &format!("flatness {flat:.2e}, exchange {exchange:.2e}")
    ));
}

#[test]
fn criterion_3_diagonalization() {
    let imm = make_example1(&radii()).expect("radii");
    let frame = imm.frame_at(&imm.sample_params(3, 1)[0]).expect("frame");
    let pair = imm.kaehler_pair_at(&frame).expect("pair");
    let basis = diagonalize(&pair, 3, TOL).expect("diagonalization succeeds");
    let report = diagonalization_report(&pair, &basis, TOL);

    // every recovered plane matches a distinct factor plane
    let d = pair.domain_dim();
    let jm = pair.complex_structure().matrix();
    let mut matched = vec![false; imm.half_dim()];
    let mut worst_angle = 0.0f64;
    for x in &basis.pairs {
        let plane = Subspace::span(d, &[x.clone(), jm * x], TOL);
        let mut best = (usize::MAX, f64::INFINITY);
        for f in 0..imm.half_dim() {
            let mut e1 = DVector::zeros(d);
            e1[2 * f] = 1.0;
            let mut e2 = DVector::zeros(d);
            e2[2 * f + 1] = 1.0;
            let factor = Subspace::span(d, &[e1, e2], TOL);
            let angle = plane.principal_angles(&factor).iter().fold(0.0f64, |m, a| m.max(*a));
            if angle < best.1 {
                best = (f, angle);
            }
        }
        worst_angle = worst_angle.max(best.1);
        matched[best.0] = true;
    }
    let pass = report.offdiag_max <= 1e-8
        && report.gram_offdiag <= 1e-8
        && report.gram_diag_defect <= 1e-8
        && worst_angle <= 1e-7
        && matched.iter().all(|m| *m);
    assert!(verdict(
        "criterion 3 (diagonalization)",
        pass,
        &format!(
            "pairwise {:.2e}, gram offdiag {:.2e}, unit norms {:.2e}, factor angles {:.2e}",
            report.offdiag_max, report.gram_offdiag, report.gram_diag_defect, worst_angle
        )
    ));
}

#[test]
fn criterion_4_witness_subspace() {
    let n = 4;
    let imm = make_horosphere_composition(n, SurfaceImmersion::sphere(1.0)).expect("n >= 3");
    let frame = imm.frame_at(&imm.sample_params(4, 1)[0]).expect("frame");
    let witness = flat_subspace_witness(&imm, &frame, 1000, 4, TOL).expect("witness");
    let dim_bound = 2 * (n - imm.codim() + 1);
    let pass = witness.subspace.rank() >= dim_bound
        && witness.k_max <= 1e-10
        && witness.ric_max <= 1e-10;
    assert!(verdict(
        "criterion 4 (witness subspace)",
        pass,
        &format!(
            "dim {} >= {}, K max {:.2e}, Ric max {:.2e} over 1000 samples",
            witness.subspace.rank(),
            dim_bound,
            witness.k_max,
            witness.ric_max
        )
    ));
}

#[test]
fn criterion_5_umbilical_machinery() {
    let imm = make_horosphere_composition(4, SurfaceImmersion::sphere(1.0)).expect("n >= 3");
    let frame = imm.frame_at(&imm.sample_params(5, 1)[0]).expect("frame");
    let pair = imm.kaehler_pair_at(&frame).expect("pair");
    let split = pair.degenerate_split(TOL).expect("degenerate span");
    let umbilical = pair.umbilical_analysis(&split, 1000, 5, TOL).expect("umbilical");
    let (_, a_eta) = umbilical_normal(&imm, &frame, TOL).expect("identity shape operator");
    let parallel = parallel_normal_check(&imm, 3, 5, 1e-4, TOL).expect("parallel normal");
    let pass = umbilical.umbilic_defect <= 1e-9 && a_eta <= 1e-9 && parallel <= 1e-6;
    assert!(verdict(
        "criterion 5 (umbilical machinery)",
        pass,
        &format!("umbilic {:.2e}, |A - I| {a_eta:.2e}, parallel {parallel:.2e}", umbilical.umbilic_defect)
    ));
}

#[test]
fn criterion_6_hessian_identity() {
    let imm = make_example1(&radii()).expect("radii");
    let reference = {
        let frame = imm.frame_at(&imm.sample_params(600, 1)[0]).expect("frame");
        frame.position
    };
    let mut stream = UnitVectors::new(6, 6);
    let mut worst = 0.0f64;
    for params in imm.sample_params(6, 20) {
        let frame = imm.frame_at(&params).expect("frame");
        let x = stream.next_unit();
        let (analytic, numeric) = hessian_check(&imm, &frame, &x, &reference, 1e-4).expect("hessian");
        worst = worst.max((analytic - numeric).abs() / analytic.abs().max(1.0));
    }
    let pass = worst <= 1e-4;
    assert!(verdict(
        "criterion 6 (distance-function Hessian)",
        pass,
        &format!("relative disagreement {worst:.2e} over 20 point-direction pairs")
    ));
}

#[test]
fn criterion_7_curvature_ground_truth() {
    let imm = make_example1(&radii()).expect("radii");
    let frame = imm.frame_at(&imm.sample_params(7, 1)[0]).expect("frame");
    let data = imm.second_fundamental_form(&frame).expect("forms");
    let expected = [-0.25, 1.0, 0.5];
    let mut k_err = 0.0f64;
    let mut ric_err = 0.0f64;
    let mut mixed = 0.0f64;
    for f in 0..3 {
        let mut x = DVector::zeros(6);
        x[2 * f] = 1.0;
        k_err = k_err.max((data.holomorphic(&x) - expected[f]).abs());
        ric_err = ric_err.max((data.ricci(&x) - expected[f]).abs());
        for g in 0..3 {
            if g != f {
                let mut y = DVector::zeros(6);
                y[2 * g] = 1.0;
                mixed = mixed.max(data.sectional(&x, &y).abs());
            }
        }
    }
    let pass = k_err <= 1e-9 && ric_err <= 1e-9 && mixed <= 1e-10;
    assert!(verdict(
        "criterion 7 (curvature ground truth)",
        pass,
        &format!("K error {k_err:.2e}, Ric error {ric_err:.2e}, mixed planes {mixed:.2e}")
    ));
}

// --- criterion 8: algebraic sweeps plus brute-force oracles ---

/// Gauss-Jordan null space, independent of the library's decompositions.
fn elimination_null_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let mut best = r;
        for rr in (r + 1)..rows {
            if a[(rr, c)].abs() > a[(best, c)].abs() {
                best = rr;
            }
        }
        if a[(best, c)].abs() <= tol {
            continue;
        }
        a.swap_rows(r, best);
        let piv = a[(r, c)];
        for cc in 0..cols {
            a[(r, cc)] /= piv;
        }
        for rr in 0..rows {
            if rr != r {
                let factor = a[(rr, c)];
                if factor != 0.0 {
                    for cc in 0..cols {
                        a[(rr, cc)] -= factor * a[(r, cc)];
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = DVector::zeros(cols);
        v[free] = 1.0;
        for (ri, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[(ri, free)];
        }
        basis.push(v);
    }
    basis
}

fn spans_agree(a: &Subspace, vectors: &[DVector<f64>], tol: f64) -> bool {
    let b = Subspace::span(a.ambient_dim(), vectors, 1e-12);
    if a.rank() != b.rank() {
        return false;
    }
    a.basis_vectors().iter().all(|v| b.containment_defect(v) <= tol)
        && b.basis_vectors().iter().all(|v| a.containment_defect(v) <= tol)
}

#[test]
fn criterion_8_algebraic_sweeps_and_oracles() {
    // identity sweeps over 100 seeded instances each
    let mut symmetry = 0.0f64;
    let mut doubling = 0.0f64;
    let dims = [(2usize, 3usize), (3, 3), (3, 4), (2, 4)];
    for seed in 0..100u64 {
        let (n, p) = dims[(seed % 4) as usize];
        let pair = random_shapeid_pair(n, p, seed);
        symmetry = symmetry.max(pair.symmetry_report());
        let analysis = pair.span_analysis(TOL);
        doubling = doubling.max(analysis.split_defect);
        assert_eq!(pair.beta().image_span(TOL).rank(), 2 * analysis.s);
    }

    // radical splittings over 100 seeded subspaces, half of them degenerate
    let mut radical_residual = 0.0f64;
    for seed in 0..100u64 {
        let dim = 3 + (seed % 4) as usize;
        let space = QuadSpace::minkowski_time_first(dim);
        let sub = if seed % 2 == 0 {
            // span of the null vector e0 + e1 and directions orthogonal to it
            let mut null = DVector::zeros(dim);
            null[0] = 1.0;
            null[1] = 1.0;
            let mut stream = UnitVectors::new(dim - 2, seed);
            let mut vecs = vec![null];
            for _ in 0..(1 + (seed as usize % (dim - 2))) {
                let extra = stream.next_unit();
                let mut lifted = DVector::zeros(dim);
                for k in 2..dim {
                    lifted[k] = extra[k - 2];
                }
                vecs.push(lifted);
            }
            Subspace::span(dim, &vecs, TOL)
        } else {
            flatform::random::random_subspace(dim, 1 + (seed as usize % (dim - 1)), seed)
        };
        let deco = flatform::space::decompose_degenerate(&space, &sub, TOL).expect("splitting");
        radical_residual =
            radical_residual.max(flatform::space::decomposition_defect(&space, &sub, &deco, TOL));
    }

    // inclusion at regular elements over 100 seeded flat instances
    let mut moore = 0.0f64;
    for seed in 0..100u64 {
        let factors = 1 + (seed % 2) as usize;
        let pair = random_flat_degenerate_pair(3, 4, factors, seed);
        let (x, _) = pair.beta().find_regular_element(seed, 32, TOL);
        moore = moore.max(pair.beta().moore_defect(&x, TOL).expect("flat"));
    }

    // oracle: radical of dim <= 4 subspaces by eliminating the restricted Gram
    let mut radical_oracle_ok = true;
    for seed in 0..40u64 {
        let dim = 3 + (seed % 2) as usize;
        let space = QuadSpace::minkowski_time_first(dim);
        let mut null = DVector::zeros(dim);
        null[0] = 1.0;
        null[1] = 1.0;
        let mut extra = DVector::zeros(dim);
        extra[2] = 1.0;
        extra[0] = (seed % 5) as f64 / 5.0;
        extra[1] = extra[0];
        let sub = Subspace::span(dim, &[null, extra], TOL);
        let general = radical(&space, &sub, TOL);
        let restricted = sub.basis().transpose() * space.gram() * sub.basis();
        let oracle: Vec<DVector<f64>> = elimination_null_space(&restricted, 1e-10)
            .iter()
            .map(|c| sub.basis() * c)
            .collect();
        radical_oracle_ok &= spans_agree(&general, &oracle, 1e-10);
    }

    // oracle: right kernel of small forms by eliminating the stacked system
    let mut kernel_oracle_ok = true;
    for seed in 0..40u64 {
        let d = 2 + (seed % 2) as usize;
        let w = 1 + (seed % 2) as usize;
        let mut stream = UnitVectors::new(w, seed ^ 0x77);
        let values: Vec<Vec<DVector<f64>>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        // half the slots are zero so kernels are nontrivial
                        if (i + j + seed as usize) % 2 == 0 {
                            DVector::zeros(w)
                        } else {
                            stream.next_unit()
                        }
                    })
                    .collect()
            })
            .collect();
        let form = BilinearMap::from_fn(d, QuadSpace::euclidean(w), |i, j| values[i][j].clone());
        let general = form.right_kernel(TOL);
        let mut stacked = DMatrix::zeros(d * w, d);
        for i in 0..d {
            stacked.rows_mut(i * w, w).copy_from(form.slice(i));
        }
        let oracle = elimination_null_space(&stacked, 1e-10);
        kernel_oracle_ok &= general.rank() == oracle.len()
            && (oracle.is_empty() || spans_agree(&general, &oracle, 1e-10));
    }

    // oracle: one-pair diagonalization against the direct formula
    let one_pair_ok = {
        let target = QuadSpace::from_diag(&[-1.0]);
        let alpha = BilinearMap::from_fn(2, target, |i, j| {
            DVector::from_vec(vec![if i == j { 1.0 } else { 0.0 }])
        });
        let j = ComplexStructure::standard(1);
        let w = DVector::from_vec(vec![1.0]);
        let pair =
            build_pair(alpha, j, DMatrix::identity(2, 2), Some(w), TOL).expect("valid pair");
        let basis = diagonalize(&pair, 8, TOL).expect("diagonalize");
        // direct computation from the unit vector e1: β(e1, e1) = (2, 0),
        // <ξ,ξ> = -4, so the normalized ξ is ±e_1 with sign -1 and the
        // normalized value has unit pairing norm
        let value = pair.beta().evaluate(&basis.pairs[0], &basis.pairs[0]);
        let whole = pair.doubled().whole();
        basis.norms[0] == -1.0
            && (basis.xis[0].norm() - 1.0).abs() <= 1e-10
            && (whole.inner(&value, &value).abs() - 1.0).abs() <= 1e-10
    };

    let pass = symmetry <= 1e-9
        && doubling <= 1e-9
        && radical_residual <= 1e-9
        && moore <= 1e-9
        && radical_oracle_ok
        && kernel_oracle_ok
        && one_pair_ok;
    assert!(verdict(
        "criterion 8 (algebraic sweeps and oracles)",
        pass,
        &format!(
            "symmetries {symmetry:.2e}, span doubling {doubling:.2e}, radical {radical_residual:.2e}, \
             inclusion {moore:.2e}, oracles {}",
            radical_oracle_ok && kernel_oracle_ok && one_pair_ok
        )
    ));
}

#[test]
fn criterion_9_kernel_bounds() {
    // padded flat surjective forms with constructed kernels of every size
    let imm = make_example1(&radii()).expect("radii");
    let frame = imm.frame_at(&imm.sample_params(9, 1)[0]).expect("frame");
    let base_pair = imm.kaehler_pair_at(&frame).expect("pair");
    let base_alpha = base_pair.alpha().clone();
    let p = base_alpha.target().dim();
    let mut padded_ok = true;
    for extra in 1..=2usize {
        let d_old = base_alpha.domain_dim();
        let d_new = d_old + 2 * extra;
        let alpha = BilinearMap::from_fn(d_new, base_alpha.target().clone(), |i, j| {
            if i < d_old && j < d_old {
                base_alpha.value(i, j)
            } else {
                DVector::zeros(p)
            }
        });
        let j = ComplexStructure::standard(d_new / 2);
        let pair = build_pair(alpha, j, DMatrix::identity(d_new, d_new), None, TOL).expect("padded pair");
        let kernel = pair.beta().right_kernel(TOL);
        padded_ok &= pair.beta().is_flat(TOL);
        padded_ok &= pair.kernel_bound_check(9, TOL).expect("surjective");
        // constructed equality: dim kernel = 2n - 2p exactly
        padded_ok &= kernel.rank() == d_new - 2 * p;
    }

    // degenerate splits: reduced-kernel estimate and reconstruction residual
    let imm = make_horosphere_composition(4, SurfaceImmersion::sphere(1.0)).expect("n >= 3");
    let frame = imm.frame_at(&imm.sample_params(9, 1)[0]).expect("frame");
    let pair = imm.kaehler_pair_at(&frame).expect("pair");
    let split = pair.degenerate_split(TOL).expect("split");
    let d = pair.domain_dim();
    let mut split_ok =
        split.decomp_residual <= 1e-9 && split.kernel1.rank() + 2 * split.s >= d + 2;
    for seed in 0..20u64 {
        let synthetic = random_flat_degenerate_pair(3, 5, 1 + (seed % 2) as usize, seed);
        let s = synthetic.degenerate_split(TOL).expect("split");
        split_ok &= s.decomp_residual <= 1e-9;
        split_ok &= s.kernel1.rank() + 2 * s.s >= synthetic.domain_dim() + 2;
    }

    let pass = padded_ok && split_ok;
    assert!(verdict(
        "criterion 9 (kernel bounds)",
        pass,
        &format!("padded equality {padded_ok}, split bounds {split_ok}")
    ));
}

#[test]
fn criterion_10_determinism() {
    let dir = std::env::temp_dir().join("flatform-acceptance-determinism");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let (beta_file, alpha_file) = export_example1_forms(&radii(), 10).expect("export");
    let beta_path = dir.join("beta.json");
    let alpha_path = dir.join("alpha.json");
    beta_file.save(&beta_path).expect("save");
    alpha_file.save(&alpha_path).expect("save");

    let strip = |r: flatform::report::Report| serde_json::to_string(&r.without_runtime()).unwrap();

    let mut pass = true;
    pass &= strip(cmd_check_flat(&beta_path, TOL).unwrap())
        == strip(cmd_check_flat(&beta_path, TOL).unwrap());

    let out_a = dir.join("basis_a.json");
    let out_b = dir.join("basis_b.json");
    let ra = cmd_diagonalize(&alpha_path, TOL, 10, Some(&out_a)).unwrap();
    let rb = cmd_diagonalize(&alpha_path, TOL, 10, Some(&out_b)).unwrap();
    pass &= strip(ra) == strip(rb);
    pass &= std::fs::read(&out_a).unwrap() == std::fs::read(&out_b).unwrap();
    let basis = BasisFile::load(&out_a).unwrap();
    pass &= basis.pairs.len() == 3;

    pass &= strip(cmd_example_suite(&radii(), 5, TOL, 10).unwrap())
        == strip(cmd_example_suite(&radii(), 5, TOL, 10).unwrap());
    pass &= strip(cmd_horosphere_suite(3, 3, TOL, 10).unwrap())
        == strip(cmd_horosphere_suite(3, 3, TOL, 10).unwrap());
    pass &= strip(cmd_random_suite(10, 10, (2, 3), false).unwrap())
        == strip(cmd_random_suite(10, 10, (2, 3), false).unwrap());

    std::fs::remove_dir_all(&dir).ok();
    assert!(verdict(
        "criterion 10 (determinism)",
        pass,
        "all five commands reproduce identical numeric output under equal seeds"
    ));
}
