//! The extrinsic product of umbilical surfaces: curvature ground truth,
//! flatness of the derived form, and the eigensplitting of the shape
//! operators.

use nalgebra::DVector;

use flatform::geometry::{eigen_split, make_example1};
use flatform::DEFAULT_TOL;

fn main() {
    let radii = [2.0, 1.0, 2.0f64.sqrt()];
    let imm = make_example1(&radii).expect("reciprocal curvatures sum to -1");
    println!("factor curvatures: {:?}", imm.factor_curvatures());

    let params = imm.sample_params(0, 1).remove(0);
    let frame = imm.frame_at(&params).expect("frame");
    let pos_norm = imm.ambient().inner(&frame.position, &frame.position);
    println!("<g, g> = {pos_norm:+.12}");

    let data = imm.second_fundamental_form(&frame).expect("second fundamental form");
    for f in 0..imm.half_dim() {
        let mut x = DVector::zeros(2 * imm.half_dim());
        x[2 * f] = 1.0;
        println!(
            "factor {}: K(X, JX) = {:+.6}, Ric(X) = {:+.6}",
            f + 1,
            data.holomorphic(&x),
            data.ricci(&x)
        );
    }

    let pair = imm.kaehler_pair_at(&frame).expect("pair");
    let flatness = pair.beta().flatness_report(DEFAULT_TOL);
    println!("derived-form flatness defect: {:.3e}", flatness.max_defect);
    println!("exchange-identity defect:     {:.3e}", pair.compatibility_defect());

    let splits = eigen_split(&imm, &frame, DEFAULT_TOL).expect("commuting shape operators");
    for (k, (sub, eta)) in splits.iter().enumerate() {
        println!(
            "eigendistribution {}: dim {}, curvature normal norm^2 = {:+.6}",
            k + 1,
            sub.rank(),
            data.alpha_g.target().inner(eta, eta)
        );
    }
}
