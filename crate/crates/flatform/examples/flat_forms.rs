//! Flatness reports, regular elements, and the kernel-span inclusion on
//! small bilinear forms.

use nalgebra::DVector;

use flatform::bilinear::BilinearMap;
use flatform::space::QuadSpace;
use flatform::DEFAULT_TOL;

fn main() {
    // φ(X, Y) = (x1 y1, x2 y2): flat
    let diagonal = BilinearMap::from_fn(2, QuadSpace::euclidean(2), |i, j| {
        let mut v = DVector::zeros(2);
        if i == j {
            v[i] = 1.0;
        }
        v
    });
    let report = diagonal.flatness_report(DEFAULT_TOL);
    println!("diagonal form: defect {:.3e}, flat = {}", report.max_defect, report.is_flat);

    // φ(X, Y) = <X, Y> into R: the defect is attained at (e1, e1, e2, e2)
    let inner = BilinearMap::from_fn(2, QuadSpace::euclidean(1), |i, j| {
        DVector::from_vec(vec![if i == j { 1.0 } else { 0.0 }])
    });
    let report = inner.flatness_report(DEFAULT_TOL);
    println!("inner-product form: defect {:.3e}, flat = {}", report.max_defect, report.is_flat);

    let (x, rank) = diagonal.find_regular_element(0, 64, DEFAULT_TOL);
    println!("regular element {:?} with left-map rank {rank}", x.as_slice());

    let moore = diagonal.moore_defect(&x, DEFAULT_TOL).expect("flat form");
    println!("kernel-span inclusion defect at the regular element: {moore:.3e}");
}
