//! Seeded generators for property sweeps: random shape-compatible forms,
//! random complex structures, random subspaces, and synthetic flat forms
//! with a known degenerate span.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bilinear::BilinearMap;
use crate::kaehler::{build_pair, ComplexStructure, KaehlerPair};
use crate::linalg::DEFAULT_TOL;
use crate::space::{QuadSpace, Subspace};

pub fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}

/// Complex structure orthogonal for the identity Gram, conjugated from the
/// standard block rotation by a random rotation.
pub fn random_complex_structure(half_dim: usize, seed: u64) -> ComplexStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(2 * half_dim, &mut rng);
    let j0 = ComplexStructure::standard(half_dim);
    let m = &q * j0.matrix() * q.transpose();
    ComplexStructure::new(m, &DMatrix::identity(2 * half_dim, 2 * half_dim), DEFAULT_TOL)
        .expect("conjugated standard structure is valid")
}

/// Random symmetric α into L^p (time-like direction last) whose last
/// coordinate slice is the identity, so <α(X,Y), w> = -(X,Y) holds with
/// w the final coordinate vector.
pub fn random_shapeid_alpha(n: usize, p: usize, seed: u64) -> BilinearMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let d = 2 * n;
    let target = QuadSpace::minkowski_time_last(p);
    let mut sym = Vec::new();
    for _ in 0..(p - 1) {
        let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        sym.push((&a + a.transpose()) * 0.5);
    }
    BilinearMap::from_fn(d, target, move |i, j| {
        let mut v = DVector::zeros(p);
        for (k, m) in sym.iter().enumerate() {
            v[k] = m[(i, j)];
        }
        v[p - 1] = if i == j { 1.0 } else { 0.0 };
        v
    })
}

/// Random pair with the shape identity enforced and w the last coordinate.
pub fn random_shapeid_pair(n: usize, p: usize, seed: u64) -> KaehlerPair {
    let alpha = random_shapeid_alpha(n, p, seed);
    let j = random_complex_structure(n, seed.wrapping_add(17));
    let d = 2 * n;
    let mut w = DVector::zeros(p);
    w[p - 1] = 1.0;
    build_pair(alpha, j, DMatrix::identity(d, d), Some(w), DEFAULT_TOL)
        .expect("shape-enforced random input is valid")
}

/// Random subspace of the given rank, spanned by seeded unit vectors.
pub fn random_subspace(ambient_dim: usize, rank: usize, seed: u64) -> Subspace {
    let mut stream = crate::linalg::UnitVectors::new(ambient_dim, seed);
    let vectors: Vec<DVector<f64>> = (0..rank).map(|_| stream.next_unit()).collect();
    Subspace::span(ambient_dim, &vectors, DEFAULT_TOL)
}

/// Synthetic flat pair with a degenerate span built from a known null
/// direction: α(X,Y) = (X,Y)(u + w) + Σ_f <X,Y>_f η_f with u a random unit
/// space-like direction, w the last coordinate, and the η_f orthonormal
/// space-like directions orthogonal to both. The derived β decomposes as
/// β₁ + 2((X,Y)v, (X,JY)v) with β₁ the block-diagonal factor form.
pub fn random_flat_degenerate_pair(n: usize, p: usize, factors: usize, seed: u64) -> KaehlerPair {
    assert!(p >= 2, "need at least a Lorentzian plane");
    assert!(factors + 2 <= p, "factor normals must fit in the orthogonal of the null plane");
    assert!(factors <= n, "at most one factor per complex pair");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF1A7);
    let d = 2 * n;
    let target = QuadSpace::minkowski_time_last(p);

    // random rotation of the space-like part fixing w
    let mut rot = DMatrix::identity(p, p);
    rot.view_mut((0, 0), (p - 1, p - 1)).copy_from(&random_orthogonal(p - 1, &mut rng));
    let u = rot.column(0).into_owned();
    let mut w = DVector::zeros(p);
    w[p - 1] = 1.0;
    let v = &u + &w;
    let etas: Vec<DVector<f64>> = (0..factors).map(|f| rot.column(1 + f).into_owned()).collect();

    let alpha = BilinearMap::from_fn(d, target, move |i, j| {
        let mut val = DVector::zeros(p);
        if i == j {
            val += &v;
            if i / 2 < etas.len() {
                val += &etas[i / 2];
            }
        }
        val
    });
    let j = ComplexStructure::standard(n);
    build_pair(alpha, j, DMatrix::identity(d, d), Some(w), DEFAULT_TOL)
        .expect("synthetic degenerate input is valid")
}
