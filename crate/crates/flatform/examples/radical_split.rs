//! Splitting a degenerate subspace of an indefinite inner-product space:
//! radical, paired isotropic complement, and nondegenerate part.

use nalgebra::DVector;

use flatform::space::{decompose_degenerate, orthogonal_complement, radical, QuadSpace, Subspace};
use flatform::DEFAULT_TOL;

fn main() {
    // L^3 with the time-like direction first
    let space = QuadSpace::minkowski_time_first(3);
    let l = Subspace::span(
        3,
        &[
            DVector::from_vec(vec![1.0, 1.0, 0.0]), // null direction
            DVector::from_vec(vec![0.0, 0.0, 1.0]),
        ],
        DEFAULT_TOL,
    );

    let perp = orthogonal_complement(&space, &l, DEFAULT_TOL);
    let rad = radical(&space, &l, DEFAULT_TOL);
    println!("dim L = {}, dim L-perp = {}, dim radical = {}", l.rank(), perp.rank(), rad.rank());

    let deco = decompose_degenerate(&space, &l, DEFAULT_TOL).expect("decomposition");
    println!("radical basis:        {:?}", column(&deco.radical, 0));
    println!("isotropic complement: {:?}", column(&deco.isotropic_complement, 0));
    println!("nondegenerate part:   {:?}", column(&deco.nondeg_part, 0));
    println!("pairing <u_i, u-hat_j>:\n{}", deco.pairing);

    let uhat_gram = deco.isotropic_complement.restricted_gram(&space);
    println!("isotropy defect of the complement: {:.3e}", uhat_gram.norm());
}

fn column(s: &Subspace, k: usize) -> Vec<f64> {
    s.basis().column(k).iter().copied().collect()
}
