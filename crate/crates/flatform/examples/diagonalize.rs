//! Constructive diagonalization of the derived form of the product
//! immersion, with the recovered planes checked against the factor planes.

use nalgebra::DVector;

use flatform::diag::{diagonalization_report, diagonalize};
use flatform::geometry::make_example1;
use flatform::space::Subspace;
use flatform::DEFAULT_TOL;

fn main() {
    let imm = make_example1(&[2.0, 1.0, 2.0f64.sqrt()]).expect("valid radii");
    let params = imm.sample_params(42, 1).remove(0);
    let frame = imm.frame_at(&params).expect("frame");
    let pair = imm.kaehler_pair_at(&frame).expect("pair");

    let basis = diagonalize(&pair, 42, DEFAULT_TOL).expect("diagonalization");
    let report = diagonalization_report(&pair, &basis, DEFAULT_TOL);
    println!("pairwise products (i != j): {:.3e}", report.offdiag_max);
    println!("span Gram off-diagonal:     {:.3e}", report.gram_offdiag);
    println!("span Gram diagonal signs:   {:?}", report.gram_signs);

    let d = pair.domain_dim();
    let jm = pair.complex_structure().matrix();
    for (k, x) in basis.pairs.iter().enumerate() {
        let plane = Subspace::span(d, &[x.clone(), jm * x], DEFAULT_TOL);
        let mut best = (0usize, f64::INFINITY);
        for f in 0..imm.half_dim() {
            let mut e1 = DVector::zeros(d);
            e1[2 * f] = 1.0;
            let mut e2 = DVector::zeros(d);
            e2[2 * f + 1] = 1.0;
            let factor = Subspace::span(d, &[e1, e2], DEFAULT_TOL);
            let worst = plane.principal_angles(&factor).iter().fold(0.0f64, |m, a| m.max(*a));
            if worst < best.1 {
                best = (f, worst);
            }
        }
        println!(
            "pair {}: sign {:+}, aligned with factor {} (principal angle {:.3e})",
            k + 1,
            basis.norms[k],
            best.0 + 1,
            best.1
        );
    }
}
