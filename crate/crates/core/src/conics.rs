//! Conic algebra over C: tangents, isotropic tangent lines, complex foci,
//! intersections and the confocality / tangency classifiers.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::poly::Poly;
use crate::proj_geom::{
    is_isotropic, join, r, ExtComplex, ProjLine, ProjMap, ProjPoint, C64, DEFAULT_TOL, I,
};

/// Roots of a binary quadratic closer than this are merged into a double root.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Smooth iff `|det|` of the normalized matrix exceeds this.
const SMOOTH_TOL: f64 = 1e-10;

/// A conic `{Pᵀ M P = 0}` with symmetric complex matrix `M`, scaled so its
/// largest entry has modulus one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conic {
    matrix: Matrix3<C64>,
    smooth: bool,
}

fn largest_entry(m: &Matrix3<C64>) -> C64 {
    m.iter()
        .copied()
        .fold(r(0.0), |acc, z| if z.norm() > acc.norm() { z } else { acc })
}

fn adjugate(m: &Matrix3<C64>) -> Matrix3<C64> {
    let c = |i: usize, j: usize| {
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
        m[(i1, j1)] * m[(i2, j2)] - m[(i1, j2)] * m[(i2, j1)]
    };
    // adj = transpose of the cofactor matrix
    Matrix3::from_fn(|i, j| c(j, i))
}

fn quad_form(m: &Matrix3<C64>, a: &Vector3<C64>, b: &Vector3<C64>) -> C64 {
    (a.transpose() * m * b)[(0, 0)]
}

impl Conic {
    pub fn new(matrix: Matrix3<C64>) -> Result<Self> {
        let sym = (matrix + matrix.transpose()) * r(0.5);
        let k = largest_entry(&sym);
        if k.norm() < 1e-300 || sym.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(GeomError::ZeroVector);
        }
        let m = sym / k;
        let smooth = m.determinant().norm() > SMOOTH_TOL;
        Ok(Self { matrix: m, smooth })
    }

    /// `a x² + b xy + c y² + d x + e y + f = 0`.
    pub fn from_coeffs(a: C64, b: C64, c: C64, d: C64, e: C64, f: C64) -> Result<Self> {
        let h = r(0.5);
        Self::new(Matrix3::new(
            a,
            b * h,
            d * h,
            b * h,
            c,
            e * h,
            d * h,
            e * h,
            f,
        ))
    }

    pub fn from_real_coeffs(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<Self> {
        Self::from_coeffs(r(a), r(b), r(c), r(d), r(e), r(f))
    }

    /// Upper-triangular entries `(m00, m01, m02, m11, m12, m22)`.
    pub fn from_upper(u: [C64; 6]) -> Result<Self> {
        Self::new(Matrix3::new(
            u[0], u[1], u[2], u[1], u[3], u[4], u[2], u[4], u[5],
        ))
    }

    pub fn upper(&self) -> [C64; 6] {
        let m = &self.matrix;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 2)],
        ]
    }

    /// Axis-aligned ellipse / hyperbola `x²/p + y²/q = 1` (signs in `p`, `q`).
    pub fn central(p: f64, q: f64) -> Result<Self> {
        Self::from_real_coeffs(1.0 / p, 0.0, 1.0 / q, 0.0, 0.0, -1.0)
    }

    pub fn circle(cx: f64, cy: f64, radius: f64) -> Result<Self> {
        Self::from_real_coeffs(
            1.0,
            0.0,
            1.0,
            -2.0 * cx,
            -2.0 * cy,
            cx * cx + cy * cy - radius * radius,
        )
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.matrix
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    fn require_smooth(&self) -> Result<()> {
        if self.smooth {
            Ok(())
        } else {
            Err(GeomError::DegenerateConic)
        }
    }

    /// Dual conic (adjugate matrix), acting on line coordinates.
    pub fn dual_matrix(&self) -> Matrix3<C64> {
        adjugate(&self.matrix)
    }

    pub fn eval(&self, p: &ProjPoint) -> C64 {
        let v = p.to_vector();
        quad_form(&self.matrix, &v, &v)
    }

    pub fn contains(&self, p: &ProjPoint, tol: f64) -> bool {
        self.eval(p).norm() <= tol
    }

    /// Value of the dual form on a line; zero iff the line is tangent.
    pub fn dual_eval(&self, l: &ProjLine) -> C64 {
        let v = l.to_vector();
        quad_form(&self.dual_matrix(), &v, &v)
    }

    pub fn is_tangent_line(&self, l: &ProjLine, tol: f64) -> bool {
        let d = self.dual_matrix();
        let scale = largest_entry(&d).norm().max(1e-300);
        let v = l.to_vector();
        quad_form(&d, &v, &v).norm() <= tol * scale
    }

    pub fn polar(&self, p: &ProjPoint) -> Result<ProjLine> {
        ProjLine::from_vector(&(self.matrix * p.to_vector()))
    }

    /// Pole of a line; for a tangent line this is the tangency point.
    pub fn pole(&self, l: &ProjLine) -> Result<ProjPoint> {
        ProjPoint::from_vector(&(self.dual_matrix() * l.to_vector()))
    }

    pub fn approx_eq(&self, other: &Conic, tol: f64) -> bool {
        let (a, b) = (self.upper(), other.upper());
        // both are scaled to unit largest entry; align the phase
        let k = (0..6).max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm())).unwrap();
        if b[k].norm() < 1e-14 {
            return false;
        }
        let s = a[k] / b[k];
        (0..6).all(|i| (a[i] - b[i] * s).norm() <= tol)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.matrix.iter().all(|z| z.im.abs() <= tol)
    }

    /// Image of the conic under a projective map of points.
    pub fn transformed(&self, map: &ProjMap) -> Result<Conic> {
        let inv = map.matrix().try_inverse().ok_or(GeomError::ZeroVector)?;
        Conic::new(inv.transpose() * self.matrix * inv)
    }

    /// Image under the affine translation by `t`.
    pub fn translated(&self, t: (C64, C64)) -> Result<Conic> {
        let m = Matrix3::new(
            r(1.0),
            r(0.0),
            t.0,
            r(0.0),
            r(1.0),
            t.1,
            r(0.0),
            r(0.0),
            r(1.0),
        );
        self.transformed(&ProjMap::new(m)?)
    }

    /// Whether the infinity line is tangent to the conic.
    pub fn is_tangent_to_infinity(&self, tol: f64) -> bool {
        self.is_tangent_line(&ProjLine::infinity(), tol)
    }

    /// A point on the conic used as the base of [`Conic::point_at`].
    pub fn base_point(&self) -> Result<ProjPoint> {
        if let Some(shape) = self.real_shape() {
            return Ok(shape.point_at(0.3, 0));
        }
        for probe in [
            ProjLine::slope_intercept(r(0.37), r(0.11)),
            ProjLine::slope_intercept(r(-1.3), r(0.7)),
            ProjLine::real(1.0, 0.2, -0.45)?,
        ] {
            if let Some((p, _)) = intersect_line(self, &probe)?.first() {
                return Ok(*p);
            }
        }
        Err(GeomError::DegenerateConic)
    }

    /// Rational parametrization by slopes of lines through the base point:
    /// `P(t) = (dᵀMd)·B − 2(BᵀMd)·d` with `d = (1, t, 0)`.
    pub fn point_at(&self, base: &ProjPoint, t: C64) -> Result<ProjPoint> {
        let b = base.to_vector();
        let d = Vector3::new(r(1.0), t, r(0.0));
        let v = b * quad_form(&self.matrix, &d, &d) - d * (quad_form(&self.matrix, &b, &d) * 2.0);
        ProjPoint::from_vector(&v)
    }

    /// Real affine type and parametrization, if the conic is a real smooth
    /// ellipse, hyperbola or parabola with real points.
    pub fn real_shape(&self) -> Option<RealConicShape> {
        if !self.smooth || !self.is_real(1e-12) {
            return None;
        }
        let m = self.matrix.map(|z| z.re);
        let a = Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let b = nalgebra::Vector2::new(m[(0, 2)], m[(1, 2)]);
        let c = m[(2, 2)];
        let eig = SymmetricEigen::new(a);
        let (l1, l2) = (eig.eigenvalues[0], eig.eigenvalues[1]);
        let e1 = eig.eigenvectors.column(0).into_owned();
        let e2 = eig.eigenvectors.column(1).into_owned();
        let scale = l1.abs().max(l2.abs());
        if l1.abs().min(l2.abs()) > 1e-10 * scale {
            let center = -a.try_inverse()? * b;
            let k = -(c + b.dot(&center));
            let (p1, p2) = (k / l1, k / l2);
            let center = (center[0], center[1]);
            if p1 > 0.0 && p2 > 0.0 {
                Some(RealConicShape::Ellipse {
                    center,
                    axes: (p1.sqrt(), p2.sqrt()),
                    dir: (e1[0], e1[1]),
                })
            } else if p1 > 0.0 && p2 < 0.0 {
                Some(RealConicShape::Hyperbola {
                    center,
                    axes: (p1.sqrt(), (-p2).sqrt()),
                    dir: (e1[0], e1[1]),
                })
            } else if p1 < 0.0 && p2 > 0.0 {
                Some(RealConicShape::Hyperbola {
                    center,
                    axes: (p2.sqrt(), (-p1).sqrt()),
                    dir: (e2[0], e2[1]),
                })
            } else {
                None
            }
        } else {
            let (lam, n, e) = if l1.abs() > l2.abs() {
                (l1, e1, e2)
            } else {
                (l2, e2, e1)
            };
            let bn = b.dot(&n);
            let be = b.dot(&e);
            if be.abs() < 1e-14 {
                return None;
            }
            let s0 = -bn / lam;
            let h0 = -(c - bn * bn / lam) / (2.0 * be);
            let k = -2.0 * be / lam;
            let vertex = n * s0 + e * h0;
            let e = if k < 0.0 { -e } else { e };
            Some(RealConicShape::Parabola {
                vertex: (vertex[0], vertex[1]),
                axis: (e[0], e[1]),
                p: k.abs() / 2.0,
            })
        }
    }
}

/// Real affine normal form of a real conic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RealConicShape {
    /// `ξ²/a² + η²/b² = 1` in the frame at `center` with `ξ` along `dir`.
    Ellipse {
        center: (f64, f64),
        axes: (f64, f64),
        dir: (f64, f64),
    },
    /// `ξ²/a² − η²/b² = 1`; branches `ξ > 0` and `ξ < 0`.
    Hyperbola {
        center: (f64, f64),
        axes: (f64, f64),
        dir: (f64, f64),
    },
    /// `s² = 2p·h` around `vertex`, opening along `axis`.
    Parabola {
        vertex: (f64, f64),
        axis: (f64, f64),
        p: f64,
    },
}

impl RealConicShape {
    /// Number of real affine branches.
    pub fn branch_count(&self) -> usize {
        match self {
            RealConicShape::Hyperbola { .. } => 2,
            _ => 1,
        }
    }

    /// Real affine point: angle for ellipses, `sinh`-parameter per branch for
    /// hyperbolas, transverse coordinate for parabolas.
    pub fn affine_point(&self, t: f64, branch: usize) -> (f64, f64) {
        let frame = |o: (f64, f64), d: (f64, f64), xi: f64, eta: f64| {
            (o.0 + xi * d.0 - eta * d.1, o.1 + xi * d.1 + eta * d.0)
        };
        match *self {
            RealConicShape::Ellipse { center, axes, dir } => {
                frame(center, dir, axes.0 * t.cos(), axes.1 * t.sin())
            }
            RealConicShape::Hyperbola { center, axes, dir } => {
                let sgn = if branch == 0 { 1.0 } else { -1.0 };
                frame(center, dir, sgn * axes.0 * t.cosh(), axes.1 * t.sinh())
            }
            RealConicShape::Parabola { vertex, axis, p } => {
                // ξ along the axis, η transverse
                frame(vertex, axis, t * t / (2.0 * p), t)
            }
        }
    }

    pub fn point_at(&self, t: f64, branch: usize) -> ProjPoint {
        let (x, y) = self.affine_point(t, branch);
        ProjPoint::real(x, y)
    }

    /// Real foci.
    pub fn foci(&self) -> Vec<(f64, f64)> {
        match *self {
            RealConicShape::Ellipse { center, axes, dir } => {
                let (a, b) = axes;
                let (c, d) = if a >= b {
                    ((a * a - b * b).sqrt(), dir)
                } else {
                    ((b * b - a * a).sqrt(), (-dir.1, dir.0))
                };
                vec![
                    (center.0 + c * d.0, center.1 + c * d.1),
                    (center.0 - c * d.0, center.1 - c * d.1),
                ]
            }
            RealConicShape::Hyperbola { center, axes, dir } => {
                let c = (axes.0 * axes.0 + axes.1 * axes.1).sqrt();
                vec![
                    (center.0 + c * dir.0, center.1 + c * dir.1),
                    (center.0 - c * dir.0, center.1 - c * dir.1),
                ]
            }
            RealConicShape::Parabola { vertex, axis, p } => {
                vec![(vertex.0 + p / 2.0 * axis.0, vertex.1 + p / 2.0 * axis.1)]
            }
        }
    }
}

/// Roots `(α : β)` of `a α² + 2b αβ + c β² = 0` with multiplicities.
fn binary_quadratic(a: C64, b: C64, c: C64) -> Vec<([C64; 2], usize)> {
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale < 1e-300 {
        return Vec::new();
    }
    let (a, b, c) = (a / scale, b / scale, c / scale);
    let disc = (b * b - a * c).sqrt();
    let swap = c.norm() > a.norm();
    let (a, c) = if swap { (c, a) } else { (a, c) };
    // stable pair: q = -(b + sgn·√D)
    let q = if (b + disc).norm() >= (b - disc).norm() {
        -(b + disc)
    } else {
        -(b - disc)
    };
    let first = [q, a];
    let second = if q.norm() < 1e-300 { [-b, a] } else { [c, q] };
    let fix = |v: [C64; 2]| if swap { [v[1], v[0]] } else { v };
    let (p1, p2) = (fix(first), fix(second));
    let n1 = p1[0].norm().max(p1[1].norm());
    let n2 = p2[0].norm().max(p2[1].norm());
    let p1 = [p1[0] / n1, p1[1] / n1];
    let p2 = [p2[0] / n2, p2[1] / n2];
    let gap = (p1[0] * p2[1] - p1[1] * p2[0]).norm();
    if gap <= CLUSTER_TOL {
        let d = if swap { [a, -b] } else { [-b, a] };
        vec![(d, 2)]
    } else {
        vec![(p1, 1), (p2, 1)]
    }
}

/// Two independent lines through a point, or two points on a line.
fn pencil_basis(v: &[C64; 3]) -> (Vector3<C64>, Vector3<C64>) {
    let k = (0..3)
        .max_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm()))
        .unwrap();
    let pv = Vector3::new(v[0], v[1], v[2]);
    let mut basis = (0..3).filter(|&j| j != k).map(|j| {
        let mut e = Vector3::zeros();
        e[j] = r(1.0);
        pv.cross(&e)
    });
    (basis.next().unwrap(), basis.next().unwrap())
}

/// Tangent line at a point of the conic (its polar).
pub fn tangent_line_at(c: &Conic, p: &ProjPoint) -> Result<ProjLine> {
    c.require_smooth()?;
    if !c.contains(p, 1e-8) {
        return Err(GeomError::PointNotOnConic);
    }
    c.polar(p)
}

/// Tangent lines through `p`, counted with multiplicity: a single double
/// line when `p` lies on the conic.
pub fn tangents_from_point(c: &Conic, p: &ProjPoint) -> Result<Vec<(ProjLine, usize)>> {
    c.require_smooth()?;
    if c.contains(p, 1e-10) {
        return Ok(vec![(c.polar(p)?, 2)]);
    }
    let d = c.dual_matrix();
    let (l1, l2) = pencil_basis(&p.coords());
    let roots = binary_quadratic(
        quad_form(&d, &l1, &l1),
        quad_form(&d, &l1, &l2),
        quad_form(&d, &l2, &l2),
    );
    roots
        .into_iter()
        .map(|([a, b], m)| Ok((ProjLine::from_vector(&(l1 * a + l2 * b))?, m)))
        .collect()
}

/// Points of `c ∩ l` with multiplicity (always 2 in total).
pub fn intersect_line(c: &Conic, l: &ProjLine) -> Result<Vec<(ProjPoint, usize)>> {
    c.require_smooth()?;
    let (p1, p2) = pencil_basis(&l.coeffs());
    let m = &c.matrix;
    let roots = binary_quadratic(
        quad_form(m, &p1, &p1),
        quad_form(m, &p1, &p2),
        quad_form(m, &p2, &p2),
    );
    roots
        .into_iter()
        .map(|([a, b], k)| Ok((ProjPoint::from_vector(&(p1 * a + p2 * b))?, k)))
        .collect()
}

/// Isotropic tangent lines: tangents through `I₁` and through `I₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropicTangents {
    pub through_i1: Vec<(ProjLine, usize)>,
    pub through_i2: Vec<(ProjLine, usize)>,
}

impl IsotropicTangents {
    /// All lines with multiplicity; the infinity line may appear in both
    /// pencils.
    pub fn all(&self) -> Vec<(ProjLine, usize)> {
        self.through_i1
            .iter()
            .chain(self.through_i2.iter())
            .copied()
            .collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.all().iter().map(|(_, m)| m).sum()
    }

    /// Finite lines of both pencils.
    pub fn finite(&self) -> Vec<(ProjLine, usize)> {
        self.all()
            .into_iter()
            .filter(|(l, _)| !l.is_infinity(1e-9))
            .collect()
    }

    pub fn same_as(&self, other: &IsotropicTangents, tol: f64) -> bool {
        same_multiset(&self.through_i1, &other.through_i1, tol)
            && same_multiset(&self.through_i2, &other.through_i2, tol)
    }
}

fn same_multiset(a: &[(ProjLine, usize)], b: &[(ProjLine, usize)], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|(l, m)| {
        match b
            .iter()
            .enumerate()
            .find(|(j, (l2, m2))| !used[*j] && m == m2 && l.dist(l2) <= tol)
        {
            Some((j, _)) => {
                used[j] = true;
                true
            }
            None => false,
        }
    })
}

pub fn isotropic_tangents(c: &Conic) -> Result<IsotropicTangents> {
    Ok(IsotropicTangents {
        through_i1: tangents_from_point(c, &ProjPoint::i1())?,
        through_i2: tangents_from_point(c, &ProjPoint::i2())?,
    })
}

/// A complex focus with the pair of isotropic tangents meeting there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Focus {
    pub point: ProjPoint,
    pub line_i1: ProjLine,
    pub line_i2: ProjLine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocusSet {
    pub points: Vec<Focus>,
}

impl FocusSet {
    pub fn finite(&self) -> Vec<ProjPoint> {
        self.points
            .iter()
            .map(|f| f.point)
            .filter(|p| p.is_finite(1e-9))
            .collect()
    }

    /// Finite foci with vanishing imaginary parts.
    pub fn real(&self) -> Vec<ProjPoint> {
        self.finite()
            .into_iter()
            .filter(|p| p.is_real(1e-9))
            .collect()
    }
}

/// Intersections of a tangent through `I₁` with a distinct tangent through `I₂`.
pub fn foci(c: &Conic) -> Result<FocusSet> {
    let t = isotropic_tangents(c)?;
    let mut points = Vec::new();
    for (l1, _) in &t.through_i1 {
        for (l2, _) in &t.through_i2 {
            if l1.dist(l2) <= 1e-9 {
                continue;
            }
            points.push(Focus {
                point: crate::proj_geom::meet(l1, l2)?,
                line_i1: *l1,
                line_i2: *l2,
            });
        }
    }
    Ok(FocusSet { points })
}

/// Split a rank ≤ 2 symmetric matrix into its two lines.
fn split_degenerate(d: &Matrix3<C64>) -> Result<Vec<(ProjLine, usize)>> {
    let adj = adjugate(d);
    let dn = largest_entry(d).norm();
    let an = largest_entry(&adj).norm();
    if an <= 1e-9 * dn * dn {
        // double line: every row is a multiple of it
        let k = (0..3)
            .max_by(|&i, &j| d.row(i).norm().total_cmp(&d.row(j).norm()))
            .unwrap();
        let row = d.row(k);
        return Ok(vec![(ProjLine::new(row[0], row[1], row[2])?, 2)]);
    }
    let i = (0..3)
        .max_by(|&a, &b| adj[(a, a)].norm().total_cmp(&adj[(b, b)].norm()))
        .unwrap();
    let pi = (-adj[(i, i)]).sqrt();
    let p = -adj.column(i) / pi;
    let skew = Matrix3::new(
        r(0.0),
        p[2],
        -p[1],
        -p[2],
        r(0.0),
        p[0],
        p[1],
        -p[0],
        r(0.0),
    );
    let rank1 = d + skew;
    let (mut br, mut bc, mut best) = (0, 0, 0.0);
    for a in 0..3 {
        for b in 0..3 {
            if rank1[(a, b)].norm() > best {
                best = rank1[(a, b)].norm();
                br = a;
                bc = b;
            }
        }
    }
    let row = rank1.row(br);
    let col = rank1.column(bc);
    let l = ProjLine::new(row[0], row[1], row[2])?;
    let m = ProjLine::new(col[0], col[1], col[2])?;
    if l.dist(&m) <= CLUSTER_TOL {
        Ok(vec![(l, 2)])
    } else {
        Ok(vec![(l, 1), (m, 1)])
    }
}

fn merge_points(points: Vec<(ProjPoint, usize)>) -> Vec<(ProjPoint, usize)> {
    let mut out: Vec<(ProjPoint, usize)> = Vec::new();
    for (p, m) in points {
        if let Some(g) = out.iter_mut().find(|(q, _)| q.dist(&p) <= CLUSTER_TOL) {
            g.1 += m;
        } else {
            out.push((p, m));
        }
    }
    out
}

/// `det(A + λB)` as a cubic in `λ`.
fn pencil_cubic(a: &Matrix3<C64>, b: &Matrix3<C64>) -> Poly {
    Poly::new(vec![
        a.determinant(),
        (adjugate(a) * b).trace(),
        (a * adjugate(b)).trace(),
        b.determinant(),
    ])
}

/// Points of `c1 ∩ c2` with multiplicities summing to 4.
pub fn intersect_conic(c1: &Conic, c2: &Conic) -> Result<Vec<(ProjPoint, usize)>> {
    c1.require_smooth()?;
    c2.require_smooth()?;
    if c1.approx_eq(c2, 1e-10) {
        return Err(GeomError::IdenticalConics);
    }
    let (a, b) = (c1.matrix, c2.matrix);
    // a multiple root is only found to √eps; the cluster mean is accurate
    let lambdas: Vec<C64> = pencil_cubic(&a, &b)
        .roots_with_multiplicity(1e-4)
        .into_iter()
        .map(|(l, _)| l)
        .collect();
    // prefer the member farthest from a double line
    let d = lambdas
        .iter()
        .map(|&l| {
            let d = a + b * l;
            let dn = largest_entry(&d).norm().max(1e-300);
            (largest_entry(&adjugate(&d)).norm() / (dn * dn), d)
        })
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, d)| d)
        .ok_or(GeomError::IdenticalConics)?;
    let mut pts = Vec::new();
    for (line, lm) in split_degenerate(&d)? {
        for (p, pm) in intersect_line(c1, &line)? {
            pts.push((p, pm * lm));
        }
    }
    Ok(merge_points(pts))
}

/// Which case of the confocality criterion holds, with witnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConfocalClass {
    /// Transverse to the infinity line with common isotropic tangents.
    TransverseHyperbolas { shared: IsotropicTangents },
    /// Tangent to the infinity line at a common non-isotropic point, with
    /// coinciding finite isotropic tangents.
    NonIsotropicParabolas {
        tangency: ProjPoint,
        finite_lines: Vec<ProjLine>,
    },
    /// Tangent to the infinity line at a common isotropic point, with a
    /// common finite isotropic tangent and related by a translation along it.
    IsotropicParabolas {
        tangency: ProjPoint,
        finite_line: ProjLine,
        translation: (C64, C64),
    },
    NotConfocal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfocalTag {
    TransverseHyperbolas,
    NonIsotropicParabolas,
    IsotropicParabolas,
    NotConfocal,
}

impl ConfocalClass {
    pub fn tag(&self) -> ConfocalTag {
        match self {
            ConfocalClass::TransverseHyperbolas { .. } => ConfocalTag::TransverseHyperbolas,
            ConfocalClass::NonIsotropicParabolas { .. } => ConfocalTag::NonIsotropicParabolas,
            ConfocalClass::IsotropicParabolas { .. } => ConfocalTag::IsotropicParabolas,
            ConfocalClass::NotConfocal => ConfocalTag::NotConfocal,
        }
    }

    pub fn is_confocal(&self) -> bool {
        self.tag() != ConfocalTag::NotConfocal
    }
}

/// Finite point of the conic whose tangent has the given (non-isotropic)
/// direction; defined for conics tangent to the infinity line.
fn point_with_tangent_direction(c: &Conic, dir: &ProjPoint) -> Result<Option<ProjPoint>> {
    for (l, _) in tangents_from_point(c, dir)? {
        if !l.is_infinity(1e-9) {
            let p = c.pole(&l)?;
            if p.is_finite(1e-9) {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

/// Translation vector carrying `c1` onto `c2`, if any.
pub fn translation_between(c1: &Conic, c2: &Conic, tol: f64) -> Result<Option<(C64, C64)>> {
    let dir = ProjPoint::new(r(1.0), C64::new(0.613, 0.271), r(0.0))?;
    let (Some(p1), Some(p2)) = (
        point_with_tangent_direction(c1, &dir)?,
        point_with_tangent_direction(c2, &dir)?,
    ) else {
        return Ok(None);
    };
    let ((x1, y1), (x2, y2)) = (p1.xy(), p2.xy());
    let t = (x2 - x1, y2 - y1);
    Ok(c1
        .translated(t)?
        .approx_eq(c2, tol.max(1e-9))
        .then_some(t))
}

/// Decide the confocality case of two distinct smooth conics.
pub fn confocality_class(c1: &Conic, c2: &Conic, tol: f64) -> Result<ConfocalClass> {
    c1.require_smooth()?;
    c2.require_smooth()?;
    if c1.approx_eq(c2, 1e-10) {
        return Err(GeomError::IdenticalConics);
    }
    let t1 = isotropic_tangents(c1)?;
    let t2 = isotropic_tangents(c2)?;
    let tan1 = c1.is_tangent_to_infinity(DEFAULT_TOL);
    let tan2 = c2.is_tangent_to_infinity(DEFAULT_TOL);
    if !tan1 && !tan2 {
        return Ok(if t1.same_as(&t2, tol) {
            ConfocalClass::TransverseHyperbolas { shared: t1 }
        } else {
            ConfocalClass::NotConfocal
        });
    }
    if tan1 != tan2 {
        return Ok(ConfocalClass::NotConfocal);
    }
    let inf = ProjLine::infinity();
    let o1 = c1.pole(&inf)?;
    let o2 = c2.pole(&inf)?;
    if o1.dist(&o2) > tol.max(1e-9) {
        return Ok(ConfocalClass::NotConfocal);
    }
    let f1 = t1.finite();
    let f2 = t2.finite();
    let isotropic_point = o1.dist(&ProjPoint::i1()) <= 1e-9 || o1.dist(&ProjPoint::i2()) <= 1e-9;
    if !isotropic_point {
        return Ok(if same_multiset(&f1, &f2, tol) {
            ConfocalClass::NonIsotropicParabolas {
                tangency: o1,
                finite_lines: f1.iter().map(|(l, _)| *l).collect(),
            }
        } else {
            ConfocalClass::NotConfocal
        });
    }
    let common = f1
        .iter()
        .find(|(l, _)| f2.iter().any(|(m, _)| l.dist(m) <= tol))
        .map(|(l, _)| *l);
    let Some(line) = common else {
        return Ok(ConfocalClass::NotConfocal);
    };
    let Some(t) = translation_between(c1, c2, tol)? else {
        return Ok(ConfocalClass::NotConfocal);
    };
    // the translation must be parallel to the common finite isotropic line
    let [u, v, _] = line.coeffs();
    let along = (u * t.0 + v * t.1).norm();
    let size = (t.0.norm() + t.1.norm()).max(1e-300);
    if along > 1e-7 * size {
        return Ok(ConfocalClass::NotConfocal);
    }
    Ok(ConfocalClass::IsotropicParabolas {
        tangency: o1,
        finite_line: line,
        translation: t,
    })
}

/// Contact pattern of two confocal conics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TangencyClass {
    NotTangent,
    SingleQuadratic { point: ProjPoint, line: ProjLine },
    TwoIsotropicPoints { points: [ProjPoint; 2], lines: [ProjLine; 2] },
    TripleContact { point: ProjPoint, line: ProjLine },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TangencyTag {
    NotTangent,
    SingleQuadratic,
    TwoIsotropicPoints,
    TripleContact,
}

impl TangencyClass {
    pub fn tag(&self) -> TangencyTag {
        match self {
            TangencyClass::NotTangent => TangencyTag::NotTangent,
            TangencyClass::SingleQuadratic { .. } => TangencyTag::SingleQuadratic,
            TangencyClass::TwoIsotropicPoints { .. } => TangencyTag::TwoIsotropicPoints,
            TangencyClass::TripleContact { .. } => TangencyTag::TripleContact,
        }
    }

    /// Common tangent lines at the contact points.
    pub fn lines(&self) -> Vec<ProjLine> {
        match self {
            TangencyClass::NotTangent => Vec::new(),
            TangencyClass::SingleQuadratic { line, .. }
            | TangencyClass::TripleContact { line, .. } => vec![*line],
            TangencyClass::TwoIsotropicPoints { lines, .. } => lines.to_vec(),
        }
    }
}

pub fn tangency_class(c1: &Conic, c2: &Conic) -> Result<TangencyClass> {
    if !confocality_class(c1, c2, 1e-8)?.is_confocal() {
        return Err(GeomError::NotConfocal);
    }
    let pts = intersect_conic(c1, c2)?;
    let mut multiple: Vec<(ProjPoint, usize)> = pts.into_iter().filter(|(_, m)| *m > 1).collect();
    multiple.sort_by_key(|(_, m)| std::cmp::Reverse(*m));
    Ok(match multiple.as_slice() {
        [] => TangencyClass::NotTangent,
        [(p, m)] if *m >= 3 => TangencyClass::TripleContact {
            point: *p,
            line: c1.polar(p)?,
        },
        [(p, _)] => TangencyClass::SingleQuadratic {
            point: *p,
            line: c1.polar(p)?,
        },
        [(p, _), (q, _), ..] => TangencyClass::TwoIsotropicPoints {
            points: [*p, *q],
            lines: [c1.polar(p)?, c1.polar(q)?],
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RealConicKind {
    Ellipse,
    Hyperbola,
    Parabola,
}

/// A classical real confocal family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RealFamily {
    /// Foci `center ± focus`; member `ξ²/(c²+1+λ) + η²/(1+λ) = 1` in the
    /// frame aligned with the focal axis, `c = |focus|`.
    Central {
        center: (f64, f64),
        focus: (f64, f64),
    },
    /// Common focus and axis; member `s² = 2λ(h + λ/2)` with `h` along
    /// `axis` and `s` transverse, both measured from the focus.
    Parabolic {
        focus: (f64, f64),
        axis: (f64, f64),
    },
}

impl RealFamily {
    /// Kind of the member at `lambda`, or `None` if degenerate there.
    pub fn kind_at(&self, lambda: f64) -> Option<RealConicKind> {
        match *self {
            RealFamily::Central { focus, .. } => {
                let c2 = focus.0 * focus.0 + focus.1 * focus.1;
                if lambda > -1.0 {
                    Some(RealConicKind::Ellipse)
                } else if lambda < -1.0 && lambda > -1.0 - c2 {
                    Some(RealConicKind::Hyperbola)
                } else {
                    None
                }
            }
            RealFamily::Parabolic { .. } => {
                (lambda != 0.0 && lambda.is_finite()).then_some(RealConicKind::Parabola)
            }
        }
    }

    /// Member at `lambda`, whatever its kind.
    pub fn member(&self, lambda: f64) -> Result<Conic> {
        let kind = self
            .kind_at(lambda)
            .ok_or(GeomError::LambdaOutOfRange(lambda))?;
        confocal_family_real(kind, self, lambda)
    }
}

/// Member of a real confocal family of the requested kind.
pub fn confocal_family_real(kind: RealConicKind, family: &RealFamily, lambda: f64) -> Result<Conic> {
    if family.kind_at(lambda) != Some(kind) {
        return Err(GeomError::LambdaOutOfRange(lambda));
    }
    // linear forms as coefficient vectors (x, y, 1)
    let quad = |forms: &[(Vector3<f64>, f64)], constant: f64, linear: Vector3<f64>| {
        let mut m = Matrix3::<f64>::zeros();
        for (f, w) in forms {
            m += f * f.transpose() * *w;
        }
        let e3 = Vector3::new(0.0, 0.0, 1.0);
        m += (linear * e3.transpose() + e3 * linear.transpose()) * 0.5;
        m[(2, 2)] += constant;
        Conic::new(m.map(r))
    };
    match *family {
        RealFamily::Central { center, focus } => {
            let c2 = focus.0 * focus.0 + focus.1 * focus.1;
            let e1 = if c2 > 0.0 {
                let c = c2.sqrt();
                (focus.0 / c, focus.1 / c)
            } else {
                (1.0, 0.0)
            };
            let e2 = (-e1.1, e1.0);
            let xi = Vector3::new(e1.0, e1.1, -(e1.0 * center.0 + e1.1 * center.1));
            let eta = Vector3::new(e2.0, e2.1, -(e2.0 * center.0 + e2.1 * center.1));
            quad(
                &[(xi, 1.0 / (c2 + 1.0 + lambda)), (eta, 1.0 / (1.0 + lambda))],
                -1.0,
                Vector3::zeros(),
            )
        }
        RealFamily::Parabolic { focus, axis } => {
            let n = (axis.0 * axis.0 + axis.1 * axis.1).sqrt();
            if n == 0.0 {
                return Err(GeomError::InvalidSpec("zero parabola axis".into()));
            }
            let e = (axis.0 / n, axis.1 / n);
            let t = (-e.1, e.0);
            let s = Vector3::new(t.0, t.1, -(t.0 * focus.0 + t.1 * focus.1));
            let h = Vector3::new(e.0, e.1, -(e.0 * focus.0 + e.1 * focus.1));
            // s² − 2λh − λ² = 0
            let mut linear = h * (-2.0 * lambda);
            linear[2] = 0.0;
            quad(&[(s, 1.0)], -2.0 * lambda * h[2] - lambda * lambda, linear)
        }
    }
}

/// Isotropic-coordinate convenience: the point with `u = x + iy`, `v = x − iy`.
pub fn from_isotropic(u: C64, v: C64) -> ProjPoint {
    ProjPoint::finite((u + v) * 0.5, (u - v) / (I * 2.0))
}

/// Conic `Σ a_jk u^j v^k` (total degree ≤ 2) in isotropic coordinates,
/// coefficients `(uu, uv, vv, u, v, 1)`.
pub fn conic_in_isotropic_coords(coeffs: [C64; 6]) -> Result<Conic> {
    // u = x + iy, v = x − iy as linear forms on (x, y, 1)
    let uf = Vector3::new(r(1.0), I, r(0.0));
    let vf = Vector3::new(r(1.0), -I, r(0.0));
    let one = Vector3::new(r(0.0), r(0.0), r(1.0));
    let sym = |a: &Vector3<C64>, b: &Vector3<C64>| (a * b.transpose() + b * a.transpose()) * r(0.5);
    let [uu, uv, vv, u, v, k] = coeffs;
    Conic::new(
        sym(&uf, &uf) * uu
            + sym(&uf, &vf) * uv
            + sym(&vf, &vf) * vv
            + sym(&uf, &one) * u
            + sym(&vf, &one) * v
            + sym(&one, &one) * k,
    )
}

/// Direction coordinate of the tangency point at infinity, for reports.
pub fn infinity_tangency(c: &Conic) -> Result<Option<ExtComplex>> {
    if !c.is_tangent_to_infinity(DEFAULT_TOL) {
        return Ok(None);
    }
    let p = c.pole(&ProjLine::infinity())?;
    Ok(Some(crate::proj_geom::isotropic_coordinate_of_point(&p)))
}

/// Whether a line is an isotropic tangent line of the conic.
pub fn is_isotropic_tangent(c: &Conic, l: &ProjLine, tol: f64) -> bool {
    is_isotropic(l, tol) && c.is_tangent_line(l, tol)
}

/// Least-squares conic through at least five points. Returns the conic and
/// the relative algebraic residual.
pub fn fit_conic(points: &[ProjPoint]) -> Result<(Conic, f64)> {
    if points.len() < 5 {
        return Err(GeomError::InsufficientSamples {
            needed: 5,
            got: points.len(),
        });
    }
    let rows: Vec<C64> = points
        .iter()
        .flat_map(|p| {
            let [x, y, w] = p.coords();
            [x * x, x * y, y * y, x * w, y * w, w * w]
        })
        .collect();
    let a = nalgebra::DMatrix::from_row_slice(points.len(), 6, &rows);
    // right singular vectors of A are eigenvectors of A*A
    let gram = a.adjoint() * &a;
    let svd = gram.svd(false, true);
    let vt = svd.v_t.ok_or(GeomError::DegenerateInput)?;
    let (k, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, s)| (k, *s))
        .ok_or(GeomError::DegenerateInput)?;
    let smax = svd.singular_values.max();
    let v: Vec<C64> = vt.row(k).iter().map(|z| z.conj()).collect();
    let conic = Conic::from_coeffs(v[0], v[1], v[2], v[3], v[4], v[5])?;
    Ok((conic, (smin / smax.max(f64::MIN_POSITIVE)).sqrt()))
}

/// Line through two points, re-exported for witness checks.
pub fn chord(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine> {
    join(p, q)
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn cpx() -> impl Strategy<Value = C64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
    }

    fn smooth_conic() -> impl Strategy<Value = Conic> {
        proptest::array::uniform6(cpx())
            .prop_map(|u| Conic::from_upper(u).unwrap())
            .prop_filter("smooth", |c| c.matrix().determinant().norm() > 1e-2)
    }

    fn real_pair() -> impl Strategy<Value = (Conic, Conic)> {
        let central = (
            -3.0..3.0f64,
            -3.0..3.0f64,
            0.3..3.0f64,
            0.0..std::f64::consts::PI,
            0.0..1.0f64,
            0.0..1.0f64,
        )
            .prop_map(|(cx, cy, c, ang, s1, s2)| {
                let fam = RealFamily::Central {
                    center: (cx, cy),
                    focus: (c * ang.cos(), c * ang.sin()),
                };
                // one ellipse, one hyperbola, away from the degenerate members
                let l1 = -1.0 + 0.2 + 3.0 * s1;
                let l2 = -1.0 - c * c * (0.1 + 0.8 * s2);
                (fam.member(l1).unwrap(), fam.member(l2).unwrap())
            });
        let parabolic = (
            -3.0..3.0f64,
            -3.0..3.0f64,
            0.0..std::f64::consts::TAU,
            0.2..2.0f64,
            0.2..2.0f64,
            any::<bool>(),
        )
            .prop_map(|(fx, fy, ang, p1, p2, flip)| {
                let fam = RealFamily::Parabolic {
                    focus: (fx, fy),
                    axis: (ang.cos(), ang.sin()),
                };
                let p2 = if flip { -p2 } else { p2 + 0.1 + p1 };
                (fam.member(p1).unwrap(), fam.member(p2).unwrap())
            });
        prop_oneof![central, parabolic]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn tangents_lie_on_dual_conic(c in smooth_conic(), x in cpx(), y in cpx()) {
            let p = ProjPoint::finite(x, y);
            for (l, _) in tangents_from_point(&c, &p).unwrap() {
                prop_assert!(l.contains(&p, 1e-9));
                prop_assert!(c.is_tangent_line(&l, 1e-9));
            }
        }

        #[test]
        fn confocal_pairs_share_isotropic_tangents((a, b) in real_pair()) {
            let ta = isotropic_tangents(&a).unwrap();
            let tb = isotropic_tangents(&b).unwrap();
            prop_assert!(ta.same_as(&tb, 1e-8));
            prop_assert!(confocality_class(&a, &b, 1e-8).unwrap().is_confocal());
        }

        #[test]
        fn common_tangents_are_isotropic((a, b) in real_pair()) {
            let t = tangency_class(&a, &b).unwrap();
            for l in t.lines() {
                prop_assert!(is_isotropic(&l, 1e-7));
            }
        }

        #[test]
        fn real_foci_closed_under_conjugation((a, _b) in real_pair()) {
            let f = foci(&a).unwrap();
            for p in f.points.iter().map(|f| f.point) {
                let q = p.conj();
                prop_assert!(f.points.iter().any(|g| g.point.dist(&q) < 1e-8));
            }
        }

        #[test]
        fn bezout_count(a in smooth_conic(), b in smooth_conic()) {
            let pts = intersect_conic(&a, &b).unwrap();
            prop_assert_eq!(pts.iter().map(|(_, m)| m).sum::<usize>(), 4);
            for (p, _) in pts {
                prop_assert!(a.contains(&p, 1e-7) && b.contains(&p, 1e-7));
            }
        }

        #[test]
        fn isotropic_tangents_touch_once(c in smooth_conic()) {
            let t = isotropic_tangents(&c).unwrap();
            prop_assert_eq!(t.total_multiplicity(), 4);
            for (l, _) in t.all() {
                let pts = intersect_line(&c, &l).unwrap();
                prop_assert_eq!(pts.len(), 1);
                prop_assert_eq!(pts[0].1, 2);
            }
        }
    }
}
