//! Model immersions and their pointwise data: extrinsic products of
//! umbilical surfaces inside Lorentzian space, horosphere compositions,
//! orthonormal frames, second fundamental forms, Gauss-equation curvature
//! and the distance-function Hessian.
//!
//! Conventions. Factor charts are
//!   sphere   g(u, v) = r (sin u cos v, sin u sin v, cos u)           in R³,
//!   pseudo   g(u, v) = r (cosh u, sinh u cos v, sinh u sin v)        in L³,
//! with the Lorentzian factor carrying its time-like coordinate first. The
//! normal frame of the full immersion lists the position direction last, so
//! the normal Gram is diag(1, .., 1, -1) and the curvature convention
//! <R(X,Y)Z,T> = <α(X,T),α(Y,Z)> - <α(X,Z),α(Y,T)> gives the unit sphere
//! curvature +1.

use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bilinear::BilinearMap;
use crate::error::{Error, Result};
use crate::kaehler::{build_pair, ComplexStructure, KaehlerPair};
use crate::linalg::{self, UnitVectors};
use crate::space::{QuadSpace, Subspace};

/// Ambient of a two-dimensional umbilical factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbientKind {
    Euclidean,
    Lorentzian,
}

/// A round sphere in R³ or a hyperbolic plane in L³, by radius.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceImmersion {
    pub curvature: f64,
    pub radius: f64,
    pub ambient: AmbientKind,
    pub orientation: f64,
}

const CHART_MARGIN: f64 = 0.1;
const HYPERBOLIC_RANGE: f64 = 3.0;

impl SurfaceImmersion {
    pub fn sphere(radius: f64) -> Self {
        assert!(radius > 0.0, "sphere radius must be positive");
        Self { curvature: 1.0 / (radius * radius), radius, ambient: AmbientKind::Euclidean, orientation: 1.0 }
    }

    pub fn hyperbolic(radius: f64) -> Self {
        assert!(radius > 0.0, "hyperbolic radius must be positive");
        Self { curvature: -1.0 / (radius * radius), radius, ambient: AmbientKind::Lorentzian, orientation: 1.0 }
    }

    fn check_domain(&self, u: f64, v: f64) -> Result<()> {
        let ok = match self.ambient {
            AmbientKind::Euclidean => u > CHART_MARGIN && u < std::f64::consts::PI - CHART_MARGIN,
            AmbientKind::Lorentzian => u.abs() < HYPERBOLIC_RANGE && u.abs() > 1e-6,
        };
        if ok && v.is_finite() {
            Ok(())
        } else {
            Err(Error::ChartDomainError(format!("factor parameters ({u}, {v}) outside chart")))
        }
    }

    fn chart_point(&self, u: f64, v: f64) -> Vector3<f64> {
        let r = self.radius;
        match self.ambient {
            AmbientKind::Euclidean => Vector3::new(r * u.sin() * v.cos(), r * u.sin() * v.sin(), r * u.cos()),
            AmbientKind::Lorentzian => Vector3::new(r * u.cosh(), r * u.sinh() * v.cos(), r * u.sinh() * v.sin()),
        }
    }

    /// Unit chart tangents (∂_u, ∂_v normalized); the charts are orthogonal.
    fn unit_tangents(&self, u: f64, v: f64) -> Result<(Vector3<f64>, Vector3<f64>)> {
        self.check_domain(u, v)?;
        match self.ambient {
            AmbientKind::Euclidean => {
                let du = Vector3::new(u.cos() * v.cos(), u.cos() * v.sin(), -u.sin());
                let dv = Vector3::new(-v.sin(), v.cos(), 0.0);
                Ok((du, dv))
            }
            AmbientKind::Lorentzian => {
                let du = Vector3::new(u.sinh(), u.cosh() * v.cos(), u.cosh() * v.sin());
                let sign = u.sinh().signum();
                let dv = Vector3::new(0.0, -sign * v.sin(), sign * v.cos());
                Ok((du, dv))
            }
        }
    }

    /// Geodesic through the chart point with the given ambient velocity.
    fn geodesic(&self, u: f64, v: f64, velocity: &Vector3<f64>, t: f64) -> Vector3<f64> {
        let p = self.chart_point(u, v);
        let speed = match self.ambient {
            AmbientKind::Euclidean => velocity.norm(),
            AmbientKind::Lorentzian => {
                (-velocity[0] * velocity[0] + velocity[1] * velocity[1] + velocity[2] * velocity[2])
                    .max(0.0)
                    .sqrt()
            }
        };
        if speed < 1e-300 {
            return p;
        }
        let theta = speed * t / self.radius;
        let dir = velocity * (self.radius / speed);
        match self.ambient {
            AmbientKind::Euclidean => p * theta.cos() + dir * theta.sin(),
            AmbientKind::Lorentzian => p * theta.cosh() + dir * theta.sinh(),
        }
    }
}

#[derive(Debug, Clone)]
enum ProductKind {
    /// Extrinsic product of umbilical surfaces, the first one hyperbolic.
    Product(Vec<SurfaceImmersion>),
    /// Horosphere composition over S² x R^{2n-2} ⊂ R^{2n+1}.
    Horosphere { surface: SurfaceImmersion },
}

/// A model immersion of a Kaehler manifold M^{2n} into hyperbolic space,
/// presented through its flat Lorentzian ambient.
#[derive(Debug, Clone)]
pub struct ProductImmersion {
    kind: ProductKind,
    ambient: QuadSpace,
    n: usize,
}

/// Frames at a point: position, ordered tangent frame (X₁, JX₁, X₂, ...),
/// the normal frame of the hyperbolic-space immersion, and the complex
/// structure in frame coordinates.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub params: Vec<f64>,
    pub position: DVector<f64>,
    pub tangent: DMatrix<f64>,
    pub normal_f: DMatrix<f64>,
    pub j: ComplexStructure,
}

/// Second fundamental forms at a point, in frame coordinates: the form of
/// the hyperbolic-space immersion (p columns of normals) and the form of
/// the flat-ambient composition (position direction appended last).
#[derive(Debug, Clone)]
pub struct SecondFundamentalData {
    pub alpha_f: BilinearMap,
    pub alpha_g: BilinearMap,
    /// Umbilical curvature normals of the factors, in alpha_g coordinates.
    pub etas: Vec<DVector<f64>>,
    j: ComplexStructure,
}

/// Builds the extrinsic product over the given radii; the first factor is
/// hyperbolic and the reciprocal curvatures must sum to -1.
pub fn make_example1(radii: &[f64]) -> Result<ProductImmersion> {
    let n = radii.len();
    if n < 2 {
        return Err(Error::InvalidInput("at least two factors are required".into()));
    }
    for r in radii {
        if !(*r > 0.0) {
            return Err(Error::InvalidInput("radii must be positive".into()));
        }
    }
    let sum: f64 = -radii[0] * radii[0] + radii[1..].iter().map(|r| r * r).sum::<f64>();
    if (sum + 1.0).abs() > 1e-9 {
        return Err(Error::CurvatureConstraintViolated { sum });
    }
    let mut factors = vec![SurfaceImmersion::hyperbolic(radii[0])];
    for r in &radii[1..] {
        factors.push(SurfaceImmersion::sphere(*r));
    }
    let mut diag = vec![1.0; 3 * n];
    diag[0] = -1.0;
    Ok(ProductImmersion { kind: ProductKind::Product(factors), ambient: QuadSpace::from_diag(&diag), n })
}

/// Builds the horosphere composition over S²_c x R^{2n-2} ⊂ R^{2n+1},
/// immersed through the chart ψ(x) = (1 + |x|²/2, x, |x|²/2) into L^{2n+3}.
pub fn make_horosphere_composition(n: usize, surface: SurfaceImmersion) -> Result<ProductImmersion> {
    if n < 3 {
        return Err(Error::InvalidInput("horosphere compositions require n >= 3".into()));
    }
    if surface.ambient != AmbientKind::Euclidean {
        return Err(Error::InvalidInput("the curved factor must be a round sphere".into()));
    }
    let mut diag = vec![1.0; 2 * n + 3];
    diag[0] = -1.0;
    Ok(ProductImmersion { kind: ProductKind::Horosphere { surface }, ambient: QuadSpace::from_diag(&diag), n })
}

impl ProductImmersion {
    pub fn ambient(&self) -> &QuadSpace {
        &self.ambient
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    /// Codimension p of the immersion into hyperbolic space.
    pub fn codim(&self) -> usize {
        match &self.kind {
            ProductKind::Product(_) => self.n - 1,
            ProductKind::Horosphere { .. } => 2,
        }
    }

    pub fn factor_curvatures(&self) -> Vec<f64> {
        match &self.kind {
            ProductKind::Product(factors) => factors.iter().map(|f| f.curvature).collect(),
            ProductKind::Horosphere { surface } => vec![surface.curvature, 0.0],
        }
    }

    fn expect_params(&self) -> usize {
        2 * self.n
    }

    /// Ambient position of the point with the given chart parameters.
    pub fn position(&self, params: &[f64]) -> Result<DVector<f64>> {
        if params.len() != self.expect_params() {
            return Err(Error::DimensionMismatch { expected: self.expect_params(), got: params.len() });
        }
        match &self.kind {
            ProductKind::Product(factors) => {
                let mut pos = DVector::zeros(3 * self.n);
                for (i, f) in factors.iter().enumerate() {
                    f.check_domain(params[2 * i], params[2 * i + 1])?;
                    let pt = f.chart_point(params[2 * i], params[2 * i + 1]);
                    pos.rows_mut(3 * i, 3).copy_from(&pt);
                }
                Ok(pos)
            }
            ProductKind::Horosphere { surface } => {
                surface.check_domain(params[0], params[1])?;
                Ok(horosphere_chart(&self.pre_position(surface, params)))
            }
        }
    }

    /// The point of S² x R^{2n-2} inside R^{2n+1}, before the horosphere chart.
    fn pre_position(&self, surface: &SurfaceImmersion, params: &[f64]) -> DVector<f64> {
        let m = 2 * self.n + 1;
        let mut y = DVector::zeros(m);
        let pt = surface.chart_point(params[0], params[1]);
        y.rows_mut(0, 3).copy_from(&pt);
        for k in 0..(2 * self.n - 2) {
            y[3 + k] = params[2 + k];
        }
        y
    }

    /// Orthonormal frames at a point. Tangents come in oriented factor pairs
    /// so the frame complex structure is the standard block rotation.
    pub fn frame_at(&self, params: &[f64]) -> Result<PointFrame> {
        if params.len() != self.expect_params() {
            return Err(Error::DimensionMismatch { expected: self.expect_params(), got: params.len() });
        }
        let dim = self.ambient.dim();
        let position = self.position(params)?;
        let mut tangent = DMatrix::zeros(dim, 2 * self.n);

        let normal_f = match &self.kind {
            ProductKind::Product(factors) => {
                for (i, f) in factors.iter().enumerate() {
                    let (du, dv) = f.unit_tangents(params[2 * i], params[2 * i + 1])?;
                    tangent.view_mut((3 * i, 2 * i), (3, 1)).copy_from(&du);
                    tangent.view_mut((3 * i, 2 * i + 1), (3, 1)).copy_from(&dv);
                }
                // project the factor position directions g_i / r_i onto the
                // orthogonal of the position and orthonormalize
                let mut candidates = Vec::with_capacity(self.n);
                for (i, f) in factors.iter().enumerate() {
                    let mut u = DVector::zeros(dim);
                    let pt = f.chart_point(params[2 * i], params[2 * i + 1]);
                    u.rows_mut(3 * i, 3).copy_from(&(pt / f.radius));
                    let along = self.ambient.inner(&u, &position);
                    u += &position * along; // <position, position> = -1
                    candidates.push(u);
                }
                metric_gram_schmidt(&self.ambient, &candidates, self.n - 1)?
            }
            ProductKind::Horosphere { surface } => {
                let y = self.pre_position(surface, params);
                let (du, dv) = surface.unit_tangents(params[0], params[1])?;
                let m = 2 * self.n + 1;
                let mut pre_tangents = Vec::with_capacity(2 * self.n);
                let mut t0 = DVector::zeros(m);
                t0.rows_mut(0, 3).copy_from(&du);
                let mut t1 = DVector::zeros(m);
                t1.rows_mut(0, 3).copy_from(&dv);
                pre_tangents.push(t0);
                pre_tangents.push(t1);
                for k in 0..(2 * self.n - 2) {
                    let mut e = DVector::zeros(m);
                    e[3 + k] = 1.0;
                    pre_tangents.push(e);
                }
                for (col, v) in pre_tangents.iter().enumerate() {
                    tangent.set_column(col, &horosphere_differential(&y, v));
                }
                // normals: the pushed surface normal and the horosphere
                // direction u0 - ψ(y), with u0 = e_0 + e_last null
                let mut normal = DMatrix::zeros(dim, 2);
                let mut n_h = DVector::zeros(m);
                n_h.rows_mut(0, 3)
                    .copy_from(&(surface.chart_point(params[0], params[1]) / surface.radius));
                normal.set_column(0, &horosphere_differential(&y, &n_h));
                let mut u0 = DVector::zeros(dim);
                u0[0] = 1.0;
                u0[dim - 1] = 1.0;
                normal.set_column(1, &(&u0 - &position));
                normal
            }
        };

        Ok(PointFrame {
            params: params.to_vec(),
            position,
            tangent,
            normal_f,
            j: ComplexStructure::standard(self.n),
        })
    }

    /// Second fundamental forms from factor umbilicity: within a factor
    /// α^g(X, Y) = <X, Y> η_i with η_i the factor curvature normal, and all
    /// cross-factor values vanish.
    pub fn second_fundamental_form(&self, frame: &PointFrame) -> Result<SecondFundamentalData> {
        let p = self.codim();
        let d = 2 * self.n;
        let target_g = QuadSpace::minkowski_time_last(p + 1);
        let target_f = QuadSpace::euclidean(p);

        // factor curvature normals in ambient coordinates
        let etas_ambient: Vec<DVector<f64>> = match &self.kind {
            ProductKind::Product(factors) => {
                let dim = self.ambient.dim();
                factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let mut eta = DVector::zeros(dim);
                        let pt = f.chart_point(frame.params[2 * i], frame.params[2 * i + 1]);
                        eta.rows_mut(3 * i, 3).copy_from(&(pt * (-f.curvature)));
                        eta
                    })
                    .collect()
            }
            ProductKind::Horosphere { surface } => {
                // sphere factor: -c g_s pushed through the chart plus the
                // null direction; flat factor: the null direction alone
                let dim = self.ambient.dim();
                let mut u0 = DVector::zeros(dim);
                u0[0] = 1.0;
                u0[dim - 1] = 1.0;
                let sphere_normal = frame.normal_f.column(0).into_owned();
                vec![&u0 - &sphere_normal * (surface.curvature * surface.radius), u0.clone()]
            }
        };

        let etas: Vec<DVector<f64>> =
            etas_ambient.iter().map(|e| normal_coordinates(&self.ambient, frame, e)).collect();

        // factor index of each tangent slot
        let factor_of = |slot: usize| -> usize {
            match &self.kind {
                ProductKind::Product(_) => slot / 2,
                ProductKind::Horosphere { .. } => {
                    if slot < 2 {
                        0
                    } else {
                        1
                    }
                }
            }
        };

        let etas_for_alpha = etas.clone();
        let alpha_g = BilinearMap::from_fn(d, target_g, move |a, b| {
            if a == b {
                etas_for_alpha[factor_of(a)].clone()
            } else {
                DVector::zeros(p + 1)
            }
        });
        let drop_position = DMatrix::<f64>::identity(p, p + 1);
        let alpha_f = alpha_g.map_target(&drop_position, target_f);

        Ok(SecondFundamentalData { alpha_f, alpha_g, etas, j: frame.j.clone() })
    }

    /// The Kaehler pair of the point: α = α^g in frame coordinates with
    /// w the position direction (last normal coordinate).
    pub fn kaehler_pair_at(&self, frame: &PointFrame) -> Result<KaehlerPair> {
        let data = self.second_fundamental_form(frame)?;
        let p = self.codim();
        let mut w = DVector::zeros(p + 1);
        w[p] = 1.0;
        let d = 2 * self.n;
        build_pair(data.alpha_g, frame.j.clone(), DMatrix::identity(d, d), Some(w), linalg::DEFAULT_TOL)
    }

    /// Geodesic of the product metric with the given frame-coordinate
    /// initial velocity, evaluated at parameter t, in ambient coordinates.
    pub fn geodesic_position(&self, params: &[f64], direction: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        if direction.len() != 2 * self.n {
            return Err(Error::DimensionMismatch { expected: 2 * self.n, got: direction.len() });
        }
        match &self.kind {
            ProductKind::Product(factors) => {
                let mut pos = DVector::zeros(3 * self.n);
                for (i, f) in factors.iter().enumerate() {
                    let (du, dv) = f.unit_tangents(params[2 * i], params[2 * i + 1])?;
                    let velocity = du * direction[2 * i] + dv * direction[2 * i + 1];
                    let pt = f.geodesic(params[2 * i], params[2 * i + 1], &velocity, t);
                    pos.rows_mut(3 * i, 3).copy_from(&pt);
                }
                Ok(pos)
            }
            ProductKind::Horosphere { surface } => {
                let (du, dv) = surface.unit_tangents(params[0], params[1])?;
                let velocity = du * direction[0] + dv * direction[1];
                let sphere_pt = surface.geodesic(params[0], params[1], &velocity, t);
                let m = 2 * self.n + 1;
                let mut y = DVector::zeros(m);
                y.rows_mut(0, 3).copy_from(&sphere_pt);
                for k in 0..(2 * self.n - 2) {
                    y[3 + k] = params[2 + k] + t * direction[2 + k];
                }
                Ok(horosphere_chart(&y))
            }
        }
    }

    /// Seeded chart parameters away from chart boundaries.
    pub fn sample_params(&self, seed: u64, count: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut params = Vec::with_capacity(2 * self.n);
            match &self.kind {
                ProductKind::Product(factors) => {
                    for f in factors {
                        match f.ambient {
                            AmbientKind::Euclidean => {
                                params.push(rng.gen_range((CHART_MARGIN + 0.05)..(std::f64::consts::PI - CHART_MARGIN - 0.05)));
                                params.push(rng.gen_range(0.0..std::f64::consts::TAU));
                            }
                            AmbientKind::Lorentzian => {
                                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                                params.push(sign * rng.gen_range(0.1..(HYPERBOLIC_RANGE - 0.1)));
                                params.push(rng.gen_range(0.0..std::f64::consts::TAU));
                            }
                        }
                    }
                }
                ProductKind::Horosphere { .. } => {
                    params.push(rng.gen_range((CHART_MARGIN + 0.05)..(std::f64::consts::PI - CHART_MARGIN - 0.05)));
                    params.push(rng.gen_range(0.0..std::f64::consts::TAU));
                    for _ in 0..(2 * self.n - 2) {
                        params.push(rng.gen_range(-1.0..1.0));
                    }
                }
            }
            out.push(params);
        }
        out
    }
}

/// ψ(x) = (1 + |x|²/2, x, |x|²/2).
fn horosphere_chart(y: &DVector<f64>) -> DVector<f64> {
    let q = y.norm_squared();
    let m = y.len();
    let mut out = DVector::zeros(m + 2);
    out[0] = 1.0 + q / 2.0;
    out.rows_mut(1, m).copy_from(y);
    out[m + 1] = q / 2.0;
    out
}

/// dψ_y(v) = (<y,v>, v, <y,v>).
fn horosphere_differential(y: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let s = y.dot(v);
    let m = y.len();
    let mut out = DVector::zeros(m + 2);
    out[0] = s;
    out.rows_mut(1, m).copy_from(v);
    out[m + 1] = s;
    out
}

/// Gram-Schmidt with the ambient metric on a positive definite collection,
/// dropping dependent directions, keeping exactly `expected` vectors.
fn metric_gram_schmidt(space: &QuadSpace, vectors: &[DVector<f64>], expected: usize) -> Result<DMatrix<f64>> {
    let dim = space.dim();
    let mut kept: Vec<DVector<f64>> = Vec::with_capacity(expected);
    for v in vectors {
        let mut w = v.clone();
        for b in &kept {
            let coeff = space.inner(&w, b);
            w -= b * coeff;
        }
        let norm2 = space.inner(&w, &w);
        if norm2 > 1e-18 {
            kept.push(&w / norm2.sqrt());
        }
    }
    if kept.len() != expected {
        return Err(Error::IllConditioned { defect: kept.len() as f64 });
    }
    let mut out = DMatrix::zeros(dim, expected);
    for (i, b) in kept.iter().enumerate() {
        out.set_column(i, b);
    }
    Ok(out)
}

/// Coordinates of an ambient normal vector in the frame (normal_f.., position):
/// space-like slots by pairing, the time-like last slot with flipped sign.
fn normal_coordinates(ambient: &QuadSpace, frame: &PointFrame, v: &DVector<f64>) -> DVector<f64> {
    let p = frame.normal_f.ncols();
    let mut coords = DVector::zeros(p + 1);
    for k in 0..p {
        coords[k] = ambient.inner(v, &frame.normal_f.column(k).into_owned());
    }
    coords[p] = -ambient.inner(v, &frame.position);
    coords
}

/// Ambient vector from normal-frame coordinates.
fn normal_from_coordinates(frame: &PointFrame, coords: &DVector<f64>) -> DVector<f64> {
    let p = frame.normal_f.ncols();
    let mut v = &frame.position * coords[p];
    for k in 0..p {
        v += frame.normal_f.column(k) * coords[k];
    }
    v
}

impl SecondFundamentalData {
    /// <R(X,Y)Z,T> by the Gauss equation in the flat Lorentzian ambient;
    /// the position slot of α^g carries the ambient -1.
    pub fn curvature(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, t: &DVector<f64>) -> f64 {
        let g = self.alpha_g.target();
        g.inner(&self.alpha_g.evaluate(x, t), &self.alpha_g.evaluate(y, z))
            - g.inner(&self.alpha_g.evaluate(x, z), &self.alpha_g.evaluate(y, t))
    }

    /// Sectional curvature of the plane spanned by x, y (frame coordinates).
    pub fn sectional(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let denom = x.norm_squared() * y.norm_squared() - x.dot(y).powi(2);
        self.curvature(x, y, y, x) / denom
    }

    /// Holomorphic sectional curvature K(S, JS).
    pub fn holomorphic(&self, s: &DVector<f64>) -> f64 {
        let js = self.j.apply(s);
        self.sectional(s, &js)
    }

    /// Ricci curvature of a direction, traced over the coordinate frame.
    pub fn ricci(&self, s: &DVector<f64>) -> f64 {
        let d = self.alpha_g.domain_dim();
        let mut total = 0.0;
        for a in 0..d {
            let mut e = DVector::zeros(d);
            e[a] = 1.0;
            total += self.curvature(s, &e, &e, s);
        }
        total / s.norm_squared()
    }

    /// Shape operator of a normal coordinate vector of alpha_f.
    pub fn shape_operator(&self, xi: &DVector<f64>) -> DMatrix<f64> {
        let d = self.alpha_f.domain_dim();
        let target = self.alpha_f.target();
        DMatrix::from_fn(d, d, |a, b| {
            let mut ea = DVector::zeros(d);
            ea[a] = 1.0;
            let mut eb = DVector::zeros(d);
            eb[b] = 1.0;
            target.inner(&self.alpha_f.evaluate(&ea, &eb), xi)
        })
    }

    /// Shape operator for a full normal-frame coordinate vector of alpha_g.
    pub fn shape_operator_g(&self, xi: &DVector<f64>) -> DMatrix<f64> {
        let d = self.alpha_g.domain_dim();
        let target = self.alpha_g.target();
        DMatrix::from_fn(d, d, |a, b| {
            let mut ea = DVector::zeros(d);
            ea[a] = 1.0;
            let mut eb = DVector::zeros(d);
            eb[b] = 1.0;
            target.inner(&self.alpha_g.evaluate(&ea, &eb), xi)
        })
    }
}

/// Report of the kernel-subspace witness found through the degenerate-span
/// pipeline.
#[derive(Debug)]
pub struct WitnessReport {
    /// J-invariant subspace of the tangent space, in frame coordinates.
    pub subspace: Subspace,
    /// Half the dimension of the subspace.
    pub ell: usize,
    pub k_max: f64,
    pub ric_max: f64,
    pub j_invariance_defect: f64,
}

/// Finds the J-invariant subspace along which the holomorphic sectional and
/// Ricci curvatures are nonpositive, via the degenerate-span pipeline.
pub fn flat_subspace_witness(
    imm: &ProductImmersion,
    frame: &PointFrame,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<WitnessReport> {
    let n = imm.half_dim();
    let p = imm.codim();
    if p + 2 > n {
        return Err(Error::HypothesisViolated(format!("codimension {p} exceeds n - 2 = {}", n as i64 - 2)));
    }
    let pair = imm.kaehler_pair_at(frame)?;
    let split = pair.degenerate_split(tol)?;
    let umbilical = pair.umbilical_analysis(&split, samples, seed, tol)?;
    let subspace = umbilical.p_subspace.clone();
    let ell = subspace.rank() / 2;
    if ell + p < n + 1 {
        return Err(Error::HypothesisViolated(format!("witness dimension {ell} below n - p + 1")));
    }

    let data = imm.second_fundamental_form(frame)?;
    let mut stream = UnitVectors::new(subspace.rank(), seed);
    let mut k_max = f64::NEG_INFINITY;
    let mut ric_max = f64::NEG_INFINITY;
    for _ in 0..samples {
        let s = subspace.basis() * stream.next_unit();
        k_max = k_max.max(data.holomorphic(&s));
        ric_max = ric_max.max(data.ricci(&s));
    }
    Ok(WitnessReport {
        subspace,
        ell,
        k_max,
        ric_max,
        j_invariance_defect: umbilical.j_invariance_defect,
    })
}

/// Simultaneous eigensplitting of the commuting shape-operator family of the
/// flat-ambient immersion: common eigendistributions with their curvature
/// normals, so that A_ξ = ⊕ <ξ, η_i> I on them.
pub fn eigen_split(
    imm: &ProductImmersion,
    frame: &PointFrame,
    tol: f64,
) -> Result<Vec<(Subspace, DVector<f64>)>> {
    let data = imm.second_fundamental_form(frame)?;
    let p = imm.codim();
    let d = 2 * imm.half_dim();
    let target = data.alpha_g.target().clone();

    let mut operators = Vec::with_capacity(p + 1);
    for k in 0..=p {
        let mut e = DVector::zeros(p + 1);
        e[k] = 1.0;
        operators.push(data.shape_operator_g(&e));
    }
    let scale = operators.iter().map(|a| a.norm()).fold(1.0f64, f64::max);
    for i in 0..operators.len() {
        for j in (i + 1)..operators.len() {
            let comm = (&operators[i] * &operators[j] - &operators[j] * &operators[i]).norm();
            if comm > tol * scale * scale {
                return Err(Error::NotFlatNormalBundle { defect: comm });
            }
        }
    }

    // generic deterministic combination separates the eigendistributions
    let mut weights = UnitVectors::new(p + 1, 0xE16E);
    let wv = weights.next_unit();
    let mut combined = DMatrix::zeros(d, d);
    for (k, op) in operators.iter().enumerate() {
        combined += op * wv[k];
    }
    let (values, vectors) = linalg::sym_eigen_sorted(&combined);
    let spread = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let cluster_tol = 1e-6 * spread;

    let mut splits = Vec::new();
    let mut start = 0usize;
    while start < d {
        let mut end = start + 1;
        while end < d && (values[end] - values[end - 1]).abs() <= cluster_tol {
            end += 1;
        }
        let block = vectors.columns(start, end - start).into_owned();
        let subspace = Subspace::from_matrix(&block, tol);

        // eigenvalue of every operator on the block, with residual check
        let mut eta = DVector::zeros(p + 1);
        for (k, op) in operators.iter().enumerate() {
            let small = block.transpose() * op * &block;
            let lambda = small.trace() / (end - start) as f64;
            let residual = (&small - DMatrix::<f64>::identity(end - start, end - start) * lambda).norm();
            if residual > tol * scale * 1e3 {
                return Err(Error::IllConditioned { defect: residual });
            }
            // raise the index against diag(1,..,1,-1)
            eta[k] = if k == p { -lambda } else { lambda };
        }
        let _ = &target;
        splits.push((subspace, eta));
        start = end;
    }
    Ok(splits)
}

/// Distinguished unit normal with identity shape operator, in alpha_f
/// coordinates, together with the reconstruction residual ||A_eta - I||.
pub fn umbilical_normal(imm: &ProductImmersion, frame: &PointFrame, tol: f64) -> Result<(DVector<f64>, f64)> {
    let data = imm.second_fundamental_form(frame)?;
    let p = imm.codim();
    let d = 2 * imm.half_dim();

    // least squares for A_eta = I over the normal coordinates
    let mut system = DMatrix::zeros(d * d, p);
    let mut rhs = DVector::zeros(d * d);
    for k in 0..p {
        let mut e = DVector::zeros(p);
        e[k] = 1.0;
        let a = data.shape_operator(&e);
        for r in 0..d {
            for c in 0..d {
                system[(r * d + c, k)] = a[(r, c)];
            }
        }
    }
    for r in 0..d {
        rhs[r * d + r] = 1.0;
    }
    let svd = system.svd(true, true);
    let coeffs = svd.solve(&rhs, linalg::rank_threshold(1.0, tol)).map_err(|_| Error::NoUmbilicalNormal { residual: f64::INFINITY })?;
    let a_eta = data.shape_operator(&coeffs);
    let residual = (&a_eta - DMatrix::<f64>::identity(d, d)).norm();
    if residual > tol * 1e3 {
        return Err(Error::NoUmbilicalNormal { residual });
    }
    Ok((coeffs, residual))
}

/// Finite-difference defect of the normal-connection derivative of the
/// distinguished normal along chart coordinate directions, maximized over
/// sampled points.
pub fn parallel_normal_check(
    imm: &ProductImmersion,
    points: usize,
    seed: u64,
    step: f64,
    tol: f64,
) -> Result<f64> {
    let ambient = imm.ambient().clone();
    let mut worst = 0.0f64;
    for params in imm.sample_params(seed, points) {
        let frame = imm.frame_at(&params)?;
        let (coords, _) = umbilical_normal(imm, &frame, tol)?;
        let eta_at = |q: &[f64]| -> Result<DVector<f64>> {
            let f = imm.frame_at(q)?;
            let (c, _) = umbilical_normal(imm, &f, tol)?;
            let mut full = DVector::zeros(c.len() + 1);
            full.rows_mut(0, c.len()).copy_from(&c);
            Ok(normal_from_coordinates(&f, &full))
        };
        let _ = coords;
        for k in 0..params.len() {
            let mut fwd = params.clone();
            fwd[k] += step;
            let mut bwd = params.clone();
            bwd[k] -= step;
            let derivative = (eta_at(&fwd)? - eta_at(&bwd)?) / (2.0 * step);
            // normal-connection component at the base point
            let mut proj = DVector::zeros(ambient.dim());
            for a in 0..frame.normal_f.ncols() {
                let nf = frame.normal_f.column(a).into_owned();
                proj += &nf * ambient.inner(&derivative, &nf);
            }
            worst = worst.max(proj.norm());
        }
    }
    Ok(worst)
}

/// Analytic and central-difference values of the Hessian of
/// h = cosh(dist to the reference point) along the direction X.
pub fn hessian_check(
    imm: &ProductImmersion,
    frame: &PointFrame,
    direction: &DVector<f64>,
    reference: &DVector<f64>,
    step: f64,
) -> Result<(f64, f64)> {
    let ambient = imm.ambient();
    if reference.len() != ambient.dim() {
        return Err(Error::DimensionMismatch { expected: ambient.dim(), got: reference.len() });
    }
    if (ambient.inner(reference, reference) + 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput("reference point must lie on the unit hyperboloid".into()));
    }
    let y = &frame.position;
    let cosh_r = -ambient.inner(y, reference);
    if cosh_r <= 1.0 + 1e-12 {
        return Err(Error::ReferencePointCoincides);
    }
    let r = cosh_r.acosh();
    let sinh_r = r.sinh();
    let grad = (y * cosh_r - reference) / sinh_r;

    // α^f(X, X) in ambient coordinates
    let data = imm.second_fundamental_form(frame)?;
    let alpha_coords = data.alpha_f.evaluate(direction, direction);
    let mut alpha_ambient = DVector::zeros(ambient.dim());
    for k in 0..alpha_coords.len() {
        alpha_ambient += frame.normal_f.column(k) * alpha_coords[k];
    }
    let analytic = cosh_r * direction.norm_squared() + sinh_r * ambient.inner(&grad, &alpha_ambient);

    let h = |t: f64| -> Result<f64> {
        let pos = imm.geodesic_position(&frame.params, direction, t)?;
        Ok(-ambient.inner(&pos, reference))
    };
    let numeric = (h(step)? - 2.0 * h(0.0)? + h(-step)?) / (step * step);
    Ok((analytic, numeric))
}
