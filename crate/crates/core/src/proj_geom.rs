//! Primitives of the complex projective plane CP² and its dual.
//!
//! Points and lines are homogeneous complex triples normalized so that the
//! largest-modulus component equals one. The complexified Euclidean form
//! `dz₁² + dz₂²` singles out the isotropic points `I₁ = (1:i:0)` and
//! `I₂ = (1:-i:0)`; a line through either of them (or the infinity line) is
//! isotropic and has no symmetry.

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

pub type C64 = Complex64;

/// Default incidence / isotropy tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Threshold on 2×2 minors below which two triples are projectively equal.
pub const EQ_TOL: f64 = 1e-10;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn normalize3(v: [C64; 3]) -> Result<[C64; 3]> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(GeomError::ZeroVector);
    }
    let (k, m) = v
        .iter()
        .enumerate()
        .map(|(k, z)| (k, z.norm()))
        .fold((0, 0.0), |acc, (k, m)| if m > acc.1 { (k, m) } else { acc });
    if m < 1e-300 {
        return Err(GeomError::ZeroVector);
    }
    let s = v[k];
    let mut out = [v[0] / s, v[1] / s, v[2] / s];
    out[k] = ONE;
    Ok(out)
}

fn cross(a: &[C64; 3], b: &[C64; 3]) -> [C64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: &[C64; 3], b: &[C64; 3]) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Largest 2×2 minor of two normalized triples.
fn minor_distance(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    cross(a, b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A point of CP² with normalized homogeneous coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint {
    coords: [C64; 3],
}

impl ProjPoint {
    pub fn new(x: C64, y: C64, z: C64) -> Result<Self> {
        Ok(Self {
            coords: normalize3([x, y, z])?,
        })
    }

    pub fn from_array(v: [C64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn from_vector(v: &Vector3<C64>) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// Finite point `(x, y)` of the affine chart `z = 1`.
    pub fn finite(x: C64, y: C64) -> Self {
        Self::new(x, y, ONE).expect("finite point has a unit component")
    }

    pub fn real(x: f64, y: f64) -> Self {
        Self::finite(r(x), r(y))
    }

    /// Isotropic point at infinity `I₁ = (1:i:0)`.
    pub fn i1() -> Self {
        Self {
            coords: [ONE, I, ZERO],
        }
    }

    /// Isotropic point at infinity `I₂ = (1:-i:0)`.
    pub fn i2() -> Self {
        Self {
            coords: [ONE, -I, ZERO],
        }
    }

    pub fn coords(&self) -> [C64; 3] {
        self.coords
    }

    pub fn to_vector(&self) -> Vector3<C64> {
        Vector3::new(self.coords[0], self.coords[1], self.coords[2])
    }

    /// Affine coordinates, or `None` for a point on the infinity line.
    pub fn affine(&self) -> Option<(C64, C64)> {
        let [x, y, z] = self.coords;
        if z.norm() < 1e-14 {
            None
        } else {
            Some((x / z, y / z))
        }
    }

    /// Affine coordinates, panicking on infinite points.
    pub fn xy(&self) -> (C64, C64) {
        self.affine().expect("point at infinity has no affine coordinates")
    }

    pub fn is_finite(&self, tol: f64) -> bool {
        self.coords[2].norm() > tol
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coords.iter().all(|z| z.im.abs() <= tol)
    }

    /// Projective distance: largest 2×2 minor of the normalized triples.
    pub fn dist(&self, other: &ProjPoint) -> f64 {
        minor_distance(&self.coords, &other.coords)
    }

    pub fn approx_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        self.dist(other) <= tol
    }

    pub fn conj(&self) -> ProjPoint {
        ProjPoint {
            coords: self.coords.map(|z| z.conj()),
        }
    }
}

/// 17 significant digits per part; negative zero prints as zero.
pub fn fmt_c(z: C64) -> String {
    let clean = |x: f64| if x == 0.0 { 0.0 } else { x };
    format!("{:.16e}{:+.16e}i", clean(z.re), clean(z.im))
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.coords.map(fmt_c);
        write!(f, "({x} : {y} : {z})")
    }
}

/// A line `{ux + vy + wz = 0}` of CP², stored as a point of the dual plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjLine {
    coeffs: [C64; 3],
}

impl ProjLine {
    pub fn new(u: C64, v: C64, w: C64) -> Result<Self> {
        Ok(Self {
            coeffs: normalize3([u, v, w])?,
        })
    }

    pub fn from_array(v: [C64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn from_vector(v: &Vector3<C64>) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn real(u: f64, v: f64, w: f64) -> Result<Self> {
        Self::new(r(u), r(v), r(w))
    }

    /// The affine line `y = slope·x + intercept`.
    pub fn slope_intercept(slope: C64, intercept: C64) -> Self {
        Self::new(slope, -ONE, intercept).expect("coefficient of y is nonzero")
    }

    /// The infinity line `(0:0:1)`.
    pub fn infinity() -> Self {
        Self {
            coeffs: [ZERO, ZERO, ONE],
        }
    }

    pub fn coeffs(&self) -> [C64; 3] {
        self.coeffs
    }

    pub fn to_vector(&self) -> Vector3<C64> {
        Vector3::new(self.coeffs[0], self.coeffs[1], self.coeffs[2])
    }

    /// Value of the linear form at the point (both normalized).
    pub fn eval(&self, p: &ProjPoint) -> C64 {
        dot(&self.coeffs, &p.coords)
    }

    pub fn contains(&self, p: &ProjPoint, tol: f64) -> bool {
        self.eval(p).norm() <= tol
    }

    pub fn dist(&self, other: &ProjLine) -> f64 {
        minor_distance(&self.coeffs, &other.coeffs)
    }

    pub fn approx_eq(&self, other: &ProjLine, tol: f64) -> bool {
        self.dist(other) <= tol
    }

    pub fn is_infinity(&self, tol: f64) -> bool {
        self.coeffs[0].norm() <= tol && self.coeffs[1].norm() <= tol
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|z| z.im.abs() <= tol)
    }

    /// Intersection with the infinity line, i.e. the direction of the line.
    pub fn point_at_infinity(&self) -> Result<ProjPoint> {
        meet(self, &ProjLine::infinity())
    }

    /// `u² + v²`, the value of the dual form; zero exactly for isotropic lines.
    pub fn isotropy_defect(&self) -> C64 {
        let [u, v, _] = self.coeffs;
        u * u + v * v
    }
}

impl fmt::Display for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [u, v, w] = self.coeffs.map(fmt_c);
        write!(f, "[{u} : {v} : {w}]")
    }
}

/// Line through two points.
pub fn join(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine> {
    if p.dist(q) <= EQ_TOL {
        return Err(GeomError::CoincidentPoints);
    }
    ProjLine::from_array(cross(&p.coords, &q.coords)).map_err(|_| GeomError::CoincidentPoints)
}

/// Intersection point of two lines.
pub fn meet(l: &ProjLine, m: &ProjLine) -> Result<ProjPoint> {
    if l.dist(m) <= EQ_TOL {
        return Err(GeomError::CoincidentLines);
    }
    ProjPoint::from_array(cross(&l.coeffs, &m.coeffs)).map_err(|_| GeomError::CoincidentLines)
}

/// A line is isotropic when it passes through `I₁` or `I₂`, or is the
/// infinity line.
pub fn is_isotropic(l: &ProjLine, tol: f64) -> bool {
    let [u, v, _] = l.coeffs;
    (u + I * v).norm() <= tol || (u - I * v).norm() <= tol
}

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtComplex {
    Finite(C64),
    Infinity,
}

impl ExtComplex {
    pub fn finite(&self) -> Option<C64> {
        match self {
            ExtComplex::Finite(z) => Some(*z),
            ExtComplex::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    /// Chordal distance on the Riemann sphere.
    pub fn chordal(&self, other: &ExtComplex) -> f64 {
        match (self, other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
            (ExtComplex::Finite(a), ExtComplex::Infinity)
            | (ExtComplex::Infinity, ExtComplex::Finite(a)) => 2.0 / (1.0 + a.norm_sqr()).sqrt(),
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
            }
        }
    }
}

/// An affine chart of CP², given by a projective frame: the columns of
/// `frame` are the world coordinates of the chart's `X`-infinite point,
/// `Y`-infinite point and origin. The chart's infinity line is `W = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineChart {
    frame: Matrix3<C64>,
}

impl AffineChart {
    /// The finite plane `z = 1` with the standard coordinates.
    pub fn finite() -> Self {
        Self {
            frame: Matrix3::identity(),
        }
    }

    /// Chart whose homogeneous coordinates `(X:Y:W)` map to world points by
    /// `frame · (X, Y, W)ᵀ`.
    pub fn from_frame(frame: Matrix3<C64>) -> Result<Self> {
        if frame.determinant().norm() < 1e-14 {
            return Err(GeomError::ZeroVector);
        }
        Ok(Self { frame })
    }

    pub fn frame(&self) -> &Matrix3<C64> {
        &self.frame
    }

    /// Chart coordinates `(X, Y)` of a world point; `None` on the chart's
    /// infinity line.
    pub fn coords(&self, p: &ProjPoint) -> Option<(C64, C64)> {
        let inv = self.frame.try_inverse()?;
        let v = inv * p.to_vector();
        if v[2].norm() < 1e-300 {
            None
        } else {
            Some((v[0] / v[2], v[1] / v[2]))
        }
    }

    /// World point with chart coordinates `(X, Y)`.
    pub fn point(&self, x: C64, y: C64) -> Result<ProjPoint> {
        ProjPoint::from_vector(&(self.frame * Vector3::new(x, y, ONE)))
    }

    /// Line coefficients expressed in chart coordinates.
    pub fn line_coeffs(&self, l: &ProjLine) -> [C64; 3] {
        let v = self.frame.transpose() * l.to_vector();
        [v[0], v[1], v[2]]
    }
}

/// Complex azimuth of a line in a chart: its slope `dY/dX`.
pub fn azimuth(l: &ProjLine, chart: &AffineChart) -> Result<ExtComplex> {
    let [u, v, w] = chart.line_coeffs(l);
    let scale = u.norm().max(v.norm()).max(w.norm());
    if u.norm().max(v.norm()) <= 1e-14 * scale {
        return Err(GeomError::LineAtInfinity);
    }
    if v.norm() <= 1e-14 * scale {
        Ok(ExtComplex::Infinity)
    } else {
        Ok(ExtComplex::Finite(-u / v))
    }
}

/// Coordinate on the infinity line in which `I₁ = 0` and `I₂ = ∞`, as a
/// function of the slope of a finite line: `z = (m - i)/(m + i)`.
pub fn isotropic_coordinate(slope: ExtComplex) -> ExtComplex {
    match slope {
        ExtComplex::Infinity => ExtComplex::Finite(ONE),
        ExtComplex::Finite(m) => {
            let den = m + I;
            if den.norm() < 1e-300 {
                ExtComplex::Infinity
            } else {
                ExtComplex::Finite((m - I) / den)
            }
        }
    }
}

/// Isotropic coordinate of a point `(x : y : 0)` of the infinity line.
pub fn isotropic_coordinate_of_point(p: &ProjPoint) -> ExtComplex {
    let [x, y, _] = p.coords;
    let den = y + I * x;
    if den.norm() < 1e-300 {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite((y - I * x) / den)
    }
}

/// Action of the symmetry about a finite non-isotropic line through the
/// infinite point `eps` on the infinity line: `z ↦ eps² / z`.
pub fn reflect_infinity_coordinate(z: ExtComplex, eps: ExtComplex) -> Result<ExtComplex> {
    let e = match eps {
        ExtComplex::Finite(e) if e.norm() > 1e-300 => e,
        _ => return Err(GeomError::IsotropicEps),
    };
    Ok(match z {
        ExtComplex::Infinity => ExtComplex::Finite(ZERO),
        ExtComplex::Finite(z) if z.norm() < 1e-300 => ExtComplex::Infinity,
        ExtComplex::Finite(z) => ExtComplex::Finite(e * e / z),
    })
}

/// A projective transformation acting on homogeneous point coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjMap {
    matrix: Matrix3<C64>,
    is_involution: bool,
}

impl ProjMap {
    pub fn new(matrix: Matrix3<C64>) -> Result<Self> {
        if matrix.determinant().norm() < 1e-14 {
            return Err(GeomError::ZeroVector);
        }
        let sq = matrix * matrix;
        let s = sq[(0, 0)];
        let id = Matrix3::identity() * s;
        let is_involution = s.norm() > 1e-14 && (sq - id).norm() <= 1e-10 * s.norm();
        Ok(Self {
            matrix,
            is_involution,
        })
    }

    pub fn identity() -> Self {
        Self {
            matrix: Matrix3::identity(),
            is_involution: true,
        }
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.matrix
    }

    pub fn is_involution(&self) -> bool {
        self.is_involution
    }

    pub fn apply_point(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint::from_vector(&(self.matrix * p.to_vector())).expect("nonsingular map")
    }

    /// Image of a line: coefficients transform by the inverse transpose.
    pub fn apply_line(&self, l: &ProjLine) -> ProjLine {
        // involutions are their own inverse up to scale; skip the inversion,
        // which is badly conditioned for near-isotropic symmetries
        let inv_t = if self.is_involution {
            self.matrix.transpose()
        } else {
            self.matrix
                .try_inverse()
                .expect("nonsingular map")
                .transpose()
        };
        ProjLine::from_vector(&(inv_t * l.to_vector())).expect("nonsingular map")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjMap) -> ProjMap {
        ProjMap::new(self.matrix * other.matrix).expect("product of nonsingular maps")
    }

    /// Projective distance to another map, after scaling both to unit
    /// largest entry.
    pub fn dist(&self, other: &ProjMap) -> f64 {
        let scale = |m: &Matrix3<C64>| {
            let k = m.iter().copied().fold(ZERO, |acc, z| if z.norm() > acc.norm() { z } else { acc });
            m / k
        };
        (scale(&self.matrix) - scale(&other.matrix))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// The complex-isometric involution fixing a non-isotropic line pointwise.
pub fn line_symmetry(l: &ProjLine) -> Result<ProjMap> {
    if is_isotropic(l, DEFAULT_TOL) {
        return Err(GeomError::IsotropicMirror);
    }
    let [u, v, w] = l.coeffs;
    let q = u * u + v * v;
    let n = Vector3::new(u, v, ZERO);
    let row = Vector3::new(u, v, w).transpose();
    let m = Matrix3::identity() - n * row * (r(2.0) / q);
    Ok(ProjMap {
        matrix: m,
        is_involution: true,
    })
}

/// Result of reflecting a line about a mirror line at a common point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reflected {
    pub line: ProjLine,
    /// Set when the mirror is isotropic and the image is the mirror itself.
    pub degenerate: bool,
}

/// Reflect `l` about `mirror` at their common point `at`.
pub fn reflect_line(l: &ProjLine, mirror: &ProjLine, at: &ProjPoint) -> Result<Reflected> {
    reflect_line_tol(l, mirror, at, DEFAULT_TOL)
}

pub fn reflect_line_tol(
    l: &ProjLine,
    mirror: &ProjLine,
    at: &ProjPoint,
    tol: f64,
) -> Result<Reflected> {
    if !l.contains(at, tol) || !mirror.contains(at, tol) {
        return Err(GeomError::PointNotIncident);
    }
    if mirror.is_infinity(tol) {
        return Err(GeomError::InfinityMirror);
    }
    if is_isotropic(mirror, tol) {
        return Ok(Reflected {
            line: *mirror,
            degenerate: true,
        });
    }
    let s = line_symmetry(mirror)?;
    Ok(Reflected {
        line: s.apply_line(l),
        degenerate: false,
    })
}

/// Round (Fubini–Study) distance between two lines of the pencil through
/// `at`, measured in the standard chart where `at` has bounded coordinates.
pub fn pencil_distance(l1: &ProjLine, l2: &ProjLine, at: &ProjPoint) -> f64 {
    let p = at.coords();
    let k = (0..3)
        .max_by(|&a, &b| p[a].norm().total_cmp(&p[b].norm()))
        .unwrap_or(2);
    let idx: Vec<usize> = (0..3).filter(|&j| j != k).collect();
    let a = [l1.coeffs[idx[0]], l1.coeffs[idx[1]]];
    let b = [l2.coeffs[idx[0]], l2.coeffs[idx[1]]];
    let det = (a[0] * b[1] - a[1] * b[0]).norm();
    let herm = (a[0].conj() * b[0] + a[1].conj() * b[1]).norm();
    det.atan2(herm)
}

/// The complexified Euclidean bilinear form on affine vectors.
pub fn euclid_form(v: (C64, C64), w: (C64, C64)) -> C64 {
    v.0 * w.0 + v.1 * w.1
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn lp(u: C64, v: C64, w: C64) -> ProjLine {
        ProjLine::new(u, v, w).unwrap()
    }

    #[test]
    fn join_two_points() {
        let l = join(&ProjPoint::real(1.0, 0.0), &ProjPoint::real(0.0, 1.0)).unwrap();
        assert!(l.approx_eq(&ProjLine::real(1.0, 1.0, -1.0).unwrap(), TOL));
    }

    #[test]
    fn join_isotropic_point_with_origin() {
        let p = ProjPoint::new(r(1.0), I, r(0.0)).unwrap();
        let l = join(&p, &ProjPoint::real(0.0, 0.0)).unwrap();
        assert!(l.approx_eq(&lp(-I, r(1.0), r(0.0)), TOL));
        assert!(is_isotropic(&l, 1e-9));
    }

    #[test]
    fn join_coincident_points() {
        let p = ProjPoint::real(1.0, 0.0);
        assert_eq!(join(&p, &p), Err(GeomError::CoincidentPoints));
    }

    #[test]
    fn meet_axes() {
        let p = meet(
            &ProjLine::real(1.0, 0.0, 0.0).unwrap(),
            &ProjLine::real(0.0, 1.0, 0.0).unwrap(),
        )
        .unwrap();
        assert!(p.approx_eq(&ProjPoint::real(0.0, 0.0), TOL));
    }

    #[test]
    fn meet_isotropic_focus_lines() {
        let s3 = 3f64.sqrt();
        let l1 = ProjLine::slope_intercept(I, I * s3);
        let l2 = ProjLine::slope_intercept(-I, -I * s3);
        let p = meet(&l1, &l2).unwrap();
        assert!(p.approx_eq(&ProjPoint::real(-s3, 0.0), TOL));
    }

    #[test]
    fn meet_parallel_lines_at_infinity() {
        let p = meet(
            &ProjLine::slope_intercept(r(1.0), r(0.0)),
            &ProjLine::slope_intercept(r(1.0), r(1.0)),
        )
        .unwrap();
        assert!(p.approx_eq(&ProjPoint::new(r(1.0), r(1.0), r(0.0)).unwrap(), TOL));
        let l = ProjLine::real(0.0, 1.0, 2.0).unwrap();
        assert_eq!(meet(&l, &l), Err(GeomError::CoincidentLines));
    }

    #[test]
    fn isotropy_examples() {
        assert!(is_isotropic(&lp(r(1.0), I, r(0.0)), 1e-9));
        assert!(!is_isotropic(&ProjLine::real(0.0, 1.0, 0.0).unwrap(), 1e-9));
        assert!(is_isotropic(&ProjLine::infinity(), 1e-9));
    }

    #[test]
    fn azimuth_is_slope() {
        let chart = AffineChart::finite();
        let az = azimuth(&ProjLine::slope_intercept(r(2.0), r(5.0)), &chart).unwrap();
        assert!((az.finite().unwrap() - r(2.0)).norm() < TOL);
        let az = azimuth(&ProjLine::slope_intercept(r(0.0), r(3.0)), &chart).unwrap();
        assert!(az.finite().unwrap().norm() < TOL);
        let az = azimuth(&ProjLine::real(1.0, 0.0, -4.0).unwrap(), &chart).unwrap();
        assert!(az.is_infinity());
        assert_eq!(
            azimuth(&ProjLine::infinity(), &chart),
            Err(GeomError::LineAtInfinity)
        );
    }

    fn affine_image(s: &ProjMap, x: f64, y: f64) -> (C64, C64) {
        s.apply_point(&ProjPoint::real(x, y)).xy()
    }

    #[test]
    fn symmetry_examples() {
        let s = line_symmetry(&ProjLine::real(0.0, 1.0, 0.0).unwrap()).unwrap();
        let (x, y) = affine_image(&s, 2.0, 3.0);
        assert!((x - r(2.0)).norm() < TOL && (y + r(3.0)).norm() < TOL);

        let s = line_symmetry(&ProjLine::slope_intercept(r(1.0), r(0.0))).unwrap();
        let (x, y) = affine_image(&s, 2.0, 3.0);
        assert!((x - r(3.0)).norm() < TOL && (y - r(2.0)).norm() < TOL);

        // y = x + 1: (x, y) ↦ (y - 1, x + 1)
        let s = line_symmetry(&ProjLine::slope_intercept(r(1.0), r(1.0))).unwrap();
        let (x, y) = affine_image(&s, 2.0, 7.0);
        assert!((x - r(6.0)).norm() < TOL && (y - r(3.0)).norm() < TOL);
        assert!(s.is_involution());

        assert_eq!(
            line_symmetry(&lp(r(1.0), I, r(2.0))),
            Err(GeomError::IsotropicMirror)
        );
    }

    #[test]
    fn reflect_line_examples() {
        let o = ProjPoint::real(0.0, 0.0);
        let xaxis = ProjLine::real(0.0, 1.0, 0.0).unwrap();
        let out = reflect_line(&ProjLine::slope_intercept(r(1.0), r(0.0)), &xaxis, &o).unwrap();
        assert!(!out.degenerate);
        assert!(out
            .line
            .approx_eq(&ProjLine::slope_intercept(r(-1.0), r(0.0)), TOL));

        let iso = ProjLine::slope_intercept(I, r(0.0));
        let out = reflect_line(&ProjLine::slope_intercept(r(3.0), r(0.0)), &iso, &o).unwrap();
        assert!(out.degenerate);
        assert!(out.line.approx_eq(&iso, TOL));

        let inf_pt = ProjPoint::new(r(1.0), r(3.0), r(0.0)).unwrap();
        let l = ProjLine::slope_intercept(r(3.0), r(1.0));
        assert_eq!(
            reflect_line(&l, &ProjLine::infinity(), &inf_pt),
            Err(GeomError::InfinityMirror)
        );
        assert_eq!(
            reflect_line(&l, &xaxis, &o),
            Err(GeomError::PointNotIncident)
        );
    }

    #[test]
    fn infinity_coordinate_examples() {
        let out = reflect_infinity_coordinate(ExtComplex::Finite(r(2.0)), ExtComplex::Finite(r(1.0)))
            .unwrap();
        assert!((out.finite().unwrap() - r(0.5)).norm() < TOL);

        let eps = ExtComplex::Finite(c(0.3, -1.2));
        let out = reflect_infinity_coordinate(eps, eps).unwrap();
        assert!(out.chordal(&eps) < TOL);

        assert_eq!(
            reflect_infinity_coordinate(ExtComplex::Finite(r(2.0)), ExtComplex::Finite(r(0.0))),
            Err(GeomError::IsotropicEps)
        );
        assert_eq!(
            reflect_infinity_coordinate(ExtComplex::Finite(r(0.0)), ExtComplex::Finite(r(1.0)))
                .unwrap(),
            ExtComplex::Infinity
        );
    }

    #[test]
    fn infinity_coordinate_of_real_slopes() {
        // mirror slope 0 ↦ eps = -1; slopes ±1 ↦ ∓i with product eps² = 1
        let z = |m: f64| isotropic_coordinate(ExtComplex::Finite(r(m))).finite().unwrap();
        assert!((z(0.0) - r(-1.0)).norm() < TOL);
        assert!((z(1.0) + I).norm() < TOL);
        assert!((z(-1.0) - I).norm() < TOL);
        assert!((z(1.0) * z(-1.0) - z(0.0) * z(0.0)).norm() < TOL);
    }

    #[test]
    fn pencil_distance_of_orthogonal_slopes() {
        let o = ProjPoint::real(0.0, 0.0);
        let d = pencil_distance(
            &ProjLine::slope_intercept(r(1.0), r(0.0)),
            &ProjLine::slope_intercept(r(-1.0), r(0.0)),
            &o,
        );
        assert!((d - std::f64::consts::FRAC_PI_2).abs() < TOL);
    }

    #[test]
    fn normalization_is_idempotent() {
        let p = ProjPoint::new(c(3.0, 1.0), c(-2.0, 0.5), c(0.1, 7.0)).unwrap();
        let q = ProjPoint::from_array(p.coords()).unwrap();
        assert_eq!(p, q);
        assert_eq!(
            ProjPoint::new(r(0.0), r(0.0), r(0.0)),
            Err(GeomError::ZeroVector)
        );
    }
}
