//! The horosphere composition: degenerate span, null-direction split,
//! umbilical structure, and the curvature-nonpositive witness subspace.

use flatform::geometry::{
    flat_subspace_witness, make_horosphere_composition, parallel_normal_check, umbilical_normal,
    SurfaceImmersion,
};
use flatform::DEFAULT_TOL;

fn main() {
    let n = 4;
    let imm = make_horosphere_composition(n, SurfaceImmersion::sphere(1.0)).expect("n >= 3");
    let params = imm.sample_params(0, 1).remove(0);
    let frame = imm.frame_at(&params).expect("frame");
    let pair = imm.kaehler_pair_at(&frame).expect("pair");

    let analysis = pair.span_analysis(DEFAULT_TOL);
    println!("span dimension s = {}, degenerate = {}", analysis.s, analysis.degenerate);
    if let Some(v) = &analysis.v {
        println!("null radical direction: {:?}", v.as_slice());
    }

    let split = pair.degenerate_split(DEFAULT_TOL).expect("degenerate split");
    println!("decomposition residual: {:.3e}", split.decomp_residual);
    println!("dim kernel of the reduced form: {}", split.kernel1.rank());

    let umbilical = pair.umbilical_analysis(&split, 200, 0, DEFAULT_TOL).expect("umbilical analysis");
    println!("umbilic pairing defect:  {:.3e}", umbilical.umbilic_defect);
    println!("plane-split residual:    {:.3e}", umbilical.alphapar_residual);

    let witness = flat_subspace_witness(&imm, &frame, 1000, 0, DEFAULT_TOL).expect("witness");
    println!(
        "witness subspace: dim {} (ell = {}), K max {:.3e}, Ric max {:.3e}",
        witness.subspace.rank(),
        witness.ell,
        witness.k_max,
        witness.ric_max
    );

    let (eta, residual) = umbilical_normal(&imm, &frame, DEFAULT_TOL).expect("identity shape operator");
    println!("distinguished normal {:?}, |A - I| = {:.3e}", eta.as_slice(), residual);

    let parallel = parallel_normal_check(&imm, 3, 0, 1e-4, DEFAULT_TOL).expect("parallel normal");
    println!("normal-connection derivative defect: {parallel:.3e}");
}
