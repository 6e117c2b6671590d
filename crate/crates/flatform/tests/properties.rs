//! Property tests for the subspace calculus and the bilinear machinery.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use flatform::bilinear::BilinearMap;
use flatform::space::{orthogonal_complement, radical, QuadSpace, Subspace};

const TOL: f64 = 1e-9;

fn diag_space(signs: &[i8]) -> QuadSpace {
    let entries: Vec<f64> = signs.iter().map(|s| *s as f64).collect();
    QuadSpace::from_diag(&entries)
}

prop_compose! {
    /// A nondegenerate diagonal space of dimension 2..=5 with mixed signs.
    fn arb_space()(dim in 2usize..=5, mask in 0u8..32) -> QuadSpace {
        let signs: Vec<i8> = (0..dim).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect();
        diag_space(&signs)
    }
}

prop_compose! {
    fn arb_space_and_subspace()(space in arb_space())(
        space in Just(space.clone()),
        rank in 1usize..space.dim(),
        entries in prop::collection::vec(-1.0f64..1.0, space.dim() * (space.dim() - 1)),
    ) -> (QuadSpace, Subspace) {
        let dim = space.dim();
        let vectors: Vec<DVector<f64>> = (0..rank)
            .map(|k| DVector::from_fn(dim, |i, _| entries[k * dim + i]))
            .collect();
        (space.clone(), Subspace::span(dim, &vectors, TOL))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// dim radical(L) = dim L + dim L-perp - dim(L + L-perp).
    #[test]
    fn radical_dimension_formula((space, l) in arb_space_and_subspace()) {
        let perp = orthogonal_complement(&space, &l, TOL);
        let rad = radical(&space, &l, TOL);
        let sum = l.sum(&perp, TOL);
        prop_assert_eq!(rad.rank() + sum.rank(), l.rank() + perp.rank());
        // complements always pair up to the ambient dimension
        prop_assert_eq!(l.rank() + perp.rank(), space.dim());
    }

    /// The complement is an involution on nondegenerate subspaces.
    #[test]
    fn complement_involution((space, l) in arb_space_and_subspace()) {
        let rad = radical(&space, &l, TOL);
        if rad.is_zero() {
            let perp = orthogonal_complement(&space, &l, TOL);
            let back = orthogonal_complement(&space, &perp, TOL);
            prop_assert!(back.equals(&l, 1e-7));
        }
    }

    /// Defects at arbitrary arguments obey the multilinear bound from the
    /// basis defect table.
    #[test]
    fn flatness_defect_is_multilinear(
        entries in prop::collection::vec(-1.0f64..1.0, 2 * 2 * 2),
        args in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let form = BilinearMap::from_fn(2, QuadSpace::euclidean(2), |i, j| {
            DVector::from_vec(vec![entries[4 * i + 2 * j], entries[4 * i + 2 * j + 1]])
        });
        let report = form.flatness_report(TOL);
        let unit = |a: f64, b: f64| {
            let v = DVector::from_vec(vec![a, b]);
            let n = v.norm();
            if n > 1e-3 { Some(v / n) } else { None }
        };
        let (x, y, z, t) = match (unit(args[0], args[1]), unit(args[2], args[3]), unit(args[4], args[5]), unit(args[6], args[7])) {
            (Some(x), Some(y), Some(z), Some(t)) => (x, y, z, t),
            _ => return Ok(()),
        };
        let target = form.target();
        let defect = (target.inner(&form.evaluate(&x, &y), &form.evaluate(&z, &t))
            - target.inner(&form.evaluate(&x, &t), &form.evaluate(&z, &y)))
        .abs();
        // each slot expands over 2 basis vectors with coefficients <= 1
        let bound = 16.0 * report.max_defect + 1e-12;
        prop_assert!(defect <= bound, "defect {} exceeds bound {}", defect, bound);
    }

    /// The left-map image sits inside the value span and the right kernel
    /// inside every left-map kernel.
    #[test]
    fn kernel_and_image_nesting(
        entries in prop::collection::vec(-1.0f64..1.0, 3 * 3 * 2),
        coeffs in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let form = BilinearMap::from_fn(3, QuadSpace::euclidean(2), |i, j| {
            DVector::from_vec(vec![entries[6 * i + 2 * j], entries[6 * i + 2 * j + 1]])
        });
        let x = DVector::from_vec(coeffs.clone());
        let image = Subspace::from_matrix(&form.left_map(&x), TOL);
        prop_assert!(form.image_span(TOL).contains(&image, 1e-7));

        let kernel = form.right_kernel(TOL);
        for k in 0..kernel.rank() {
            let v = kernel.basis().column(k).into_owned();
            prop_assert!(form.evaluate(&x, &v).norm() <= 1e-7);
        }
    }

    /// Saving and loading a form file preserves every number.
    #[test]
    fn form_file_round_trip(entries in prop::collection::vec(-1.0e3f64..1.0e3, 2 * 2 * 2)) {
        let form = BilinearMap::from_fn(2, QuadSpace::from_diag(&[1.0, -1.0]), |i, j| {
            DVector::from_vec(vec![entries[4 * i + 2 * j], entries[4 * i + 2 * j + 1]])
        });
        let file = flatform::formfile::FormFile::from_form(&form, None, None);
        let json = flatform::formfile::to_json_17(&file).unwrap();
        let back: flatform::formfile::FormFile = serde_json::from_slice(&json).unwrap();
        prop_assert_eq!(&file.tensor, &back.tensor);
        let (reloaded, _) = back.to_form(TOL).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert_eq!(reloaded.value(i, j), form.value(i, j));
            }
        }
    }
}

/// The Gram structure of a radical decomposition, checked on a fixed family
/// that mixes degenerate and nondegenerate inputs.
#[test]
fn decomposition_gram_block_structure() {
    for seed in 0..30u64 {
        let dim = 3 + (seed % 3) as usize;
        let space = QuadSpace::minkowski_time_first(dim);
        let sub = if seed % 2 == 0 {
            let mut null = DVector::zeros(dim);
            null[0] = 1.0;
            null[1] = 1.0;
            let mut other = DVector::zeros(dim);
            other[dim - 1] = 1.0;
            Subspace::span(dim, &[null, other], TOL)
        } else {
            flatform::random::random_subspace(dim, 1 + (seed as usize % (dim - 1)), seed)
        };
        let deco = flatform::space::decompose_degenerate(&space, &sub, TOL).expect("split");
        let defect = flatform::space::decomposition_defect(&space, &sub, &deco, TOL);
        assert!(defect <= 1e-9, "seed {seed}: defect {defect}");
        // pairing block is the identity by the chosen normalization
        if deco.radical.rank() > 0 {
            let k = deco.radical.rank();
            let err = (&deco.pairing - DMatrix::<f64>::identity(k, k)).norm();
            assert!(err <= 1e-9, "seed {seed}: pairing {err}");
        }
    }
}
