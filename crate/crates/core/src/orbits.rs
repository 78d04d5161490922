//! The complex reflection correspondence: orbit extension, quadrilateral
//! closure, reflectivity scans and the explicit orbit families.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conics::{self, confocality_class, Conic};
use crate::error::{GeomError, Result};
use crate::poly::Poly;
use crate::proj_geom::{
    is_isotropic, join, line_symmetry, meet, pencil_distance, r, reflect_line_tol, ProjLine,
    ProjMap, ProjPoint, C64, DEFAULT_TOL, I,
};

/// Default closure threshold on the maximal vertex residual.
pub const CLOSURE_TOL: f64 = 1e-8;

/// Incidence slack used when evaluating residuals of computed orbits.
const INCIDENCE_TOL: f64 = 1e-7;

/// Lines closer than this are treated as equal when flagging degeneracies.
const LINE_EQ_TOL: f64 = 1e-9;

/// Coordinates in which a [`ParamCurve`] is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveFrame {
    Euclidean,
    /// `X = x + iy`, `Y = x − iy`.
    Isotropic,
}

/// Polynomial planar curve `t ↦ (x(t), y(t))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamCurve {
    pub x: Poly,
    pub y: Poly,
    pub frame: CurveFrame,
}

impl ParamCurve {
    pub fn new(x: Poly, y: Poly, frame: CurveFrame) -> Result<Self> {
        if x.effective_degree(1e-14) == 0 && y.effective_degree(1e-14) == 0 {
            return Err(GeomError::NonAlgebraicInput);
        }
        Ok(Self { x, y, frame })
    }

    pub fn euclidean(x: Poly, y: Poly) -> Result<Self> {
        Self::new(x, y, CurveFrame::Euclidean)
    }

    /// The graph `y = p(x)`.
    pub fn graph(p: Poly) -> Result<Self> {
        Self::euclidean(Poly::t(), p)
    }

    /// Euclidean coordinate polynomials.
    pub fn euclidean_polys(&self) -> (Poly, Poly) {
        match self.frame {
            CurveFrame::Euclidean => (self.x.clone(), self.y.clone()),
            CurveFrame::Isotropic => {
                let sum = &self.x + &self.y;
                let diff = &self.x - &self.y;
                (sum.scale(r(0.5)), diff.scale(r(1.0) / (I * 2.0)))
            }
        }
    }

    pub fn to_euclidean(&self) -> ParamCurve {
        let (x, y) = self.euclidean_polys();
        ParamCurve {
            x,
            y,
            frame: CurveFrame::Euclidean,
        }
    }

    /// Degree of intersection with a generic line.
    pub fn degree(&self) -> usize {
        let (x, y) = self.euclidean_polys();
        x.effective_degree(1e-14).max(y.effective_degree(1e-14))
    }

    pub fn point(&self, t: C64) -> ProjPoint {
        let (x, y) = self.euclidean_polys();
        ProjPoint::finite(x.eval(t), y.eval(t))
    }

    /// Tangent line at parameter `t`, using the first non-vanishing
    /// derivative at singular parameters.
    pub fn tangent(&self, t: C64) -> Result<ProjLine> {
        let (mut x, mut y) = self.euclidean_polys();
        let (px, py) = (x.eval(t), y.eval(t));
        for _ in 0..=self.degree() {
            x = x.derivative();
            y = y.derivative();
            let (dx, dy) = (x.eval(t), y.eval(t));
            if dx.norm().max(dy.norm()) > 1e-12 {
                return ProjLine::new(dy, -dx, dx * py - dy * px);
            }
        }
        Err(GeomError::NonAlgebraicInput)
    }

    /// Parameters where the curve meets `l`.
    pub fn line_params(&self, l: &ProjLine) -> Vec<C64> {
        let (x, y) = self.euclidean_polys();
        let [u, v, w] = l.coeffs();
        let g = &(&x.scale(u) + &y.scale(v)) + &Poly::constant(w);
        if g.is_zero(1e-14) {
            return Vec::new();
        }
        g.roots()
    }

    /// Parameter of a point of the curve, if it lies on it.
    pub fn locate(&self, p: &ProjPoint, tol: f64) -> Option<C64> {
        let (px, py) = p.affine()?;
        let (x, y) = self.euclidean_polys();
        let (main, other, target, check) = if x.effective_degree(1e-14) > 0 {
            (&x, &y, px, py)
        } else {
            (&y, &x, py, px)
        };
        let g = main - &Poly::constant(target);
        g.roots()
            .into_iter()
            .map(|t| (t, (other.eval(t) - check).norm() + (main.eval(t) - target).norm()))
            .filter(|(_, e)| *e <= tol * (1.0 + px.norm() + py.norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(t, _)| t)
    }

    /// Image under an affine map given by the top two rows of `m`.
    pub fn mapped(&self, m: &ProjMap) -> ParamCurve {
        let (x, y) = self.euclidean_polys();
        let a = m.matrix();
        let row = |i: usize| {
            &(&x.scale(a[(i, 0)]) + &y.scale(a[(i, 1)])) + &Poly::constant(a[(i, 2)])
        };
        let k = a[(2, 2)];
        ParamCurve {
            x: row(0).scale(r(1.0) / k),
            y: row(1).scale(r(1.0) / k),
            frame: CurveFrame::Euclidean,
        }
    }

    fn approx_eq(&self, other: &ParamCurve, tol: f64) -> bool {
        let (a, b) = (self.euclidean_polys(), other.euclidean_polys());
        let close = |p: &Poly, q: &Poly| {
            let n = p.coeffs().len().max(q.coeffs().len());
            (0..n).all(|k| {
                let u = p.coeffs().get(k).copied().unwrap_or_default();
                let v = q.coeffs().get(k).copied().unwrap_or_default();
                (u - v).norm() <= tol
            })
        };
        close(&a.0, &b.0) && close(&a.1, &b.1)
    }
}

/// A mirror: a non-isotropic line, a smooth conic or a polynomial curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Mirror {
    Line(ProjLine),
    Conic(Conic),
    Param(ParamCurve),
}

/// A point of a mirror together with its tangent line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MirrorPoint {
    pub point: ProjPoint,
    pub tangent: ProjLine,
}

impl Mirror {
    pub fn line(l: ProjLine) -> Result<Mirror> {
        if l.is_infinity(DEFAULT_TOL) {
            return Err(GeomError::InfinityMirror);
        }
        if is_isotropic(&l, DEFAULT_TOL) {
            return Err(GeomError::IsotropicMirror);
        }
        Ok(Mirror::Line(l))
    }

    pub fn conic(c: Conic) -> Result<Mirror> {
        if !c.is_smooth() {
            return Err(GeomError::DegenerateConic);
        }
        Ok(Mirror::Conic(c))
    }

    pub fn as_line(&self) -> Option<&ProjLine> {
        match self {
            Mirror::Line(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_conic(&self) -> Option<&Conic> {
        match self {
            Mirror::Conic(c) => Some(c),
            _ => None,
        }
    }

    pub fn contains(&self, p: &ProjPoint, tol: f64) -> bool {
        match self {
            Mirror::Line(l) => l.contains(p, tol),
            Mirror::Conic(c) => c.contains(p, tol),
            Mirror::Param(curve) => curve.locate(p, tol).is_some(),
        }
    }

    /// Tangent line at a point of the mirror.
    pub fn tangent_at(&self, p: &ProjPoint) -> Result<ProjLine> {
        match self {
            Mirror::Line(l) => {
                if l.contains(p, INCIDENCE_TOL) {
                    Ok(*l)
                } else {
                    Err(GeomError::PointNotIncident)
                }
            }
            Mirror::Conic(c) => {
                if c.contains(p, INCIDENCE_TOL) {
                    c.polar(p)
                } else {
                    Err(GeomError::PointNotOnConic)
                }
            }
            Mirror::Param(curve) => {
                let t = curve
                    .locate(p, INCIDENCE_TOL)
                    .ok_or(GeomError::PointNotIncident)?;
                curve.tangent(t)
            }
        }
    }

    /// Points of the mirror on the line `l` with their tangents. Empty when
    /// `l` is the mirror line itself.
    pub fn intersect_line(&self, l: &ProjLine) -> Result<Vec<MirrorPoint>> {
        match self {
            Mirror::Line(m) => {
                if m.dist(l) <= LINE_EQ_TOL {
                    return Ok(Vec::new());
                }
                Ok(vec![MirrorPoint {
                    point: meet(m, l)?,
                    tangent: *m,
                }])
            }
            Mirror::Conic(c) => conics::intersect_line(c, l)?
                .into_iter()
                .map(|(p, _)| {
                    Ok(MirrorPoint {
                        point: p,
                        tangent: c.polar(&p)?,
                    })
                })
                .collect(),
            Mirror::Param(curve) => curve
                .line_params(l)
                .into_iter()
                .map(|t| {
                    Ok(MirrorPoint {
                        point: curve.point(t),
                        tangent: curve.tangent(t)?,
                    })
                })
                .collect(),
        }
    }

    /// Point of the mirror at a (complex) parameter.
    pub fn point_at(&self, t: C64) -> Result<ProjPoint> {
        match self {
            Mirror::Line(l) => {
                let [u, v, w] = l.coeffs();
                let q = u * u + v * v;
                let foot = (-u * w / q, -v * w / q);
                let s = u.norm().max(v.norm());
                Ok(ProjPoint::finite(foot.0 - v / s * t, foot.1 + u / s * t))
            }
            Mirror::Conic(c) => c.point_at(&c.base_point()?, t),
            Mirror::Param(curve) => Ok(curve.point(t)),
        }
    }

    /// Image under the symmetry about a non-isotropic finite line.
    pub fn mirror_image(&self, axis: &ProjLine) -> Result<Mirror> {
        let s = line_symmetry(axis)?;
        Ok(match self {
            Mirror::Line(l) => Mirror::Line(s.apply_line(l)),
            Mirror::Conic(c) => Mirror::Conic(c.transformed(&s)?),
            Mirror::Param(curve) => Mirror::Param(curve.mapped(&s)),
        })
    }

    pub fn approx_eq(&self, other: &Mirror, tol: f64) -> bool {
        match (self, other) {
            (Mirror::Line(a), Mirror::Line(b)) => a.dist(b) <= tol,
            (Mirror::Conic(a), Mirror::Conic(b)) => a.approx_eq(b, tol),
            (Mirror::Param(a), Mirror::Param(b)) => a.approx_eq(b, tol),
            _ => false,
        }
    }

    /// Points where the tangent line is isotropic.
    pub fn isotropic_tangency_points(&self) -> Vec<ProjPoint> {
        match self {
            Mirror::Line(_) => Vec::new(),
            Mirror::Conic(c) => conics::isotropic_tangents(c)
                .map(|t| t.all().iter().filter_map(|(l, _)| c.pole(l).ok()).collect())
                .unwrap_or_default(),
            Mirror::Param(curve) => {
                let (x, y) = curve.euclidean_polys();
                let (dx, dy) = (x.derivative(), y.derivative());
                let mut out = Vec::new();
                for sign in [I, -I] {
                    let g = &dx + &dy.scale(sign);
                    if !g.is_zero(1e-14) {
                        out.extend(g.roots().into_iter().map(|t| curve.point(t)));
                    }
                }
                out
            }
        }
    }
}

/// Ordered mirrors `(a, b, c, d)`, indices taken cyclically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilliardScene {
    pub mirrors: [Mirror; 4],
}

impl BilliardScene {
    pub fn new(mirrors: [Mirror; 4]) -> Result<Self> {
        for m in &mirrors {
            match m {
                Mirror::Line(l) => {
                    Mirror::line(*l)?;
                }
                Mirror::Conic(c) => {
                    Mirror::conic(*c)?;
                }
                Mirror::Param(_) => {}
            }
        }
        Ok(Self { mirrors })
    }

    pub fn mirror(&self, j: usize) -> &Mirror {
        &self.mirrors[j % 4]
    }

    /// Relabel `(a, b, c, d) → (b, c, d, a)` applied `k` times.
    pub fn rotated(&self, k: usize) -> BilliardScene {
        let m = &self.mirrors;
        BilliardScene {
            mirrors: std::array::from_fn(|j| m[(j + k) % 4].clone()),
        }
    }

    /// Marked points of mirror `j`: isotropic tangencies and intersections
    /// with the neighbouring mirrors.
    pub fn marked_points(&self, j: usize) -> Vec<ProjPoint> {
        let m = self.mirror(j);
        let mut out = m.isotropic_tangency_points();
        for k in [j + 1, j + 3] {
            let other = self.mirror(k);
            let pts: Vec<ProjPoint> = match (m, other) {
                (Mirror::Line(a), Mirror::Line(b)) => meet(a, b).into_iter().collect(),
                (Mirror::Line(l), o) | (o, Mirror::Line(l)) => o
                    .intersect_line(l)
                    .map(|v| v.into_iter().map(|mp| mp.point).collect())
                    .unwrap_or_default(),
                (Mirror::Conic(a), Mirror::Conic(b)) => conics::intersect_conic(a, b)
                    .map(|v| v.into_iter().map(|(p, _)| p).collect())
                    .unwrap_or_default(),
                _ => Vec::new(),
            };
            out.extend(pts);
        }
        out
    }
}

/// Degeneracy markers of one vertex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexFlags {
    pub collision: bool,
    pub edge_tangency: bool,
    pub isotropic_tangency: bool,
}

impl VertexFlags {
    pub fn any(&self) -> bool {
        self.collision || self.edge_tangency || self.isotropic_tangency
    }
}

/// A quadrilateral `ABCD` with per-vertex residuals of the reflection law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadOrbit {
    pub vertices: [ProjPoint; 4],
    pub tangents: [ProjLine; 4],
    pub residuals: [f64; 4],
    pub flags: [VertexFlags; 4],
}

impl QuadOrbit {
    /// Evaluate the reflection law at given vertices with given tangents.
    pub fn from_parts(vertices: [ProjPoint; 4], tangents: [ProjLine; 4]) -> QuadOrbit {
        let mut flags = [VertexFlags::default(); 4];
        let edges: [Option<ProjLine>; 4] =
            std::array::from_fn(|j| join(&vertices[j], &vertices[(j + 1) % 4]).ok());
        for j in 0..4 {
            let (prev, next) = ((j + 3) % 4, (j + 1) % 4);
            let f = &mut flags[j];
            f.collision = vertices[j].dist(&vertices[prev]) <= LINE_EQ_TOL
                || vertices[j].dist(&vertices[next]) <= LINE_EQ_TOL;
            f.isotropic_tangency = is_isotropic(&tangents[j], DEFAULT_TOL);
            f.edge_tangency = [edges[prev], edges[j]]
                .iter()
                .flatten()
                .any(|e| e.dist(&tangents[j]) <= LINE_EQ_TOL);
        }
        let residuals = std::array::from_fn(|j| match (edges[(j + 3) % 4], edges[j]) {
            (Some(inc), Some(out)) => {
                reflection_residual(&inc, &out, &tangents[j], &vertices[j])
                    .unwrap_or(std::f64::consts::FRAC_PI_2)
            }
            _ => std::f64::consts::FRAC_PI_2,
        });
        QuadOrbit {
            vertices,
            tangents,
            residuals,
            flags,
        }
    }

    /// Evaluate a quadrilateral against the mirrors of a scene.
    pub fn evaluate(scene: &BilliardScene, vertices: [ProjPoint; 4]) -> Result<QuadOrbit> {
        let mut tangents = [ProjLine::infinity(); 4];
        for j in 0..4 {
            tangents[j] = scene.mirror(j).tangent_at(&vertices[j])?;
        }
        Ok(Self::from_parts(vertices, tangents))
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_flagged(&self) -> bool {
        self.flags.iter().any(VertexFlags::any)
    }

    /// A genuine periodic orbit: all residuals below `tol`, no degeneracy.
    pub fn is_periodic(&self, tol: f64) -> bool {
        !self.is_flagged() && self.max_residual() < tol
    }

    /// Relabel `(A, B, C, D) → (B, C, D, A)`.
    pub fn rotated(&self, k: usize) -> QuadOrbit {
        let rot = |j: usize| (j + k) % 4;
        QuadOrbit {
            vertices: std::array::from_fn(|j| self.vertices[rot(j)]),
            tangents: std::array::from_fn(|j| self.tangents[rot(j)]),
            residuals: std::array::from_fn(|j| self.residuals[rot(j)]),
            flags: std::array::from_fn(|j| self.flags[rot(j)]),
        }
    }
}

/// Distance on the pencil at `at` between the reflection of `incoming` and
/// `outgoing`; for an isotropic tangent, the distance of the nearer edge to it.
pub fn reflection_residual(
    incoming: &ProjLine,
    outgoing: &ProjLine,
    mirror_tangent: &ProjLine,
    at: &ProjPoint,
) -> Result<f64> {
    for l in [incoming, outgoing, mirror_tangent] {
        if !l.contains(at, INCIDENCE_TOL) {
            return Err(GeomError::PointNotIncident);
        }
    }
    if mirror_tangent.is_infinity(DEFAULT_TOL) || is_isotropic(mirror_tangent, DEFAULT_TOL) {
        return Ok(pencil_distance(incoming, mirror_tangent, at)
            .min(pencil_distance(outgoing, mirror_tangent, at)));
    }
    let refl = reflect_line_tol(incoming, mirror_tangent, at, INCIDENCE_TOL)?;
    Ok(pencil_distance(&refl.line, outgoing, at))
}

/// All branch combinations of the unfolded correspondence from the seed
/// `(A, B)`, unfiltered.
pub fn orbit_candidates(scene: &BilliardScene, a: &ProjPoint, b: &ProjPoint) -> Result<Vec<QuadOrbit>> {
    if a.dist(b) <= LINE_EQ_TOL {
        return Err(GeomError::DegenerateSeed("A = B"));
    }
    let ta = scene.mirror(0).tangent_at(a)?;
    let tb = scene.mirror(1).tangent_at(b)?;
    if is_isotropic(&tb, DEFAULT_TOL) {
        return Err(GeomError::DegenerateSeed("isotropic tangent at B"));
    }
    let l1 = join(a, b)?;
    if l1.dist(&tb) <= LINE_EQ_TOL {
        return Err(GeomError::DegenerateSeed("edge AB is tangent to b at B"));
    }
    let l2 = reflect_line_tol(&l1, &tb, b, INCIDENCE_TOL)?.line;
    let mut out = Vec::new();
    for c in scene.mirror(2).intersect_line(&l2)? {
        if c.point.dist(b) <= LINE_EQ_TOL || is_isotropic(&c.tangent, DEFAULT_TOL) {
            continue;
        }
        if l2.dist(&c.tangent) <= LINE_EQ_TOL {
            continue;
        }
        let Ok(l3) = reflect_line_tol(&l2, &c.tangent, &c.point, INCIDENCE_TOL) else {
            continue;
        };
        for d in scene.mirror(3).intersect_line(&l3.line)? {
            if d.point.dist(&c.point) <= LINE_EQ_TOL {
                continue;
            }
            out.push(QuadOrbit::from_parts(
                [*a, *b, c.point, d.point],
                [ta, tb, c.tangent, d.tangent],
            ));
        }
    }
    out.sort_by(|x, y| x.max_residual().total_cmp(&y.max_residual()));
    Ok(out)
}

/// Closing periodic orbits through the seed `(A, B)`, best first.
pub fn extend_orbit(
    scene: &BilliardScene,
    a: &ProjPoint,
    b: &ProjPoint,
    tol: f64,
) -> Result<Vec<QuadOrbit>> {
    Ok(orbit_candidates(scene, a, b)?
        .into_iter()
        .filter(|o| o.is_periodic(tol))
        .collect())
}

/// Deterministic `n × n` grid of complex parameters on mirrors `a` and `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedGrid {
    pub n: usize,
    pub range: (f64, f64),
    /// Imaginary offset keeping seeds off real special loci.
    pub imag: f64,
    /// Seeds closer than this to a marked point count as degenerate.
    pub margin: f64,
}

impl SeedGrid {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            range: (-1.7, 1.9),
            imag: 0.13,
            margin: 1e-4,
        }
    }

    pub fn real(n: usize) -> Self {
        Self {
            imag: 0.0,
            ..Self::new(n)
        }
    }

    pub fn params(&self) -> Vec<(C64, C64)> {
        let (lo, hi) = self.range;
        let step = (hi - lo) / self.n as f64;
        let at = |k: usize| lo + step * (k as f64 + 0.5);
        (0..self.n)
            .flat_map(|i| {
                (0..self.n).map(move |j| {
                    (
                        C64::new(at(i), self.imag),
                        C64::new(at(j) + 0.5 * step * 0.37, self.imag * 0.61),
                    )
                })
            })
            .collect()
    }
}

/// One seed of a reflectivity scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub ta: C64,
    pub tb: C64,
    /// Best maximal residual over branch combinations (`NaN` if degenerate).
    pub residual: f64,
    pub closed: bool,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// Closing fraction among non-degenerate seeds.
    pub fraction_closing: f64,
    pub median_residual: f64,
    pub degenerate_count: usize,
}

impl ScanReport {
    fn from_rows(rows: Vec<ScanRow>) -> Self {
        let good: Vec<&ScanRow> = rows.iter().filter(|r| !r.degenerate).collect();
        let closed = good.iter().filter(|r| r.closed).count();
        let fraction_closing = if good.is_empty() {
            0.0
        } else {
            closed as f64 / good.len() as f64
        };
        let mut res: Vec<f64> = good.iter().map(|r| r.residual).collect();
        res.sort_by(f64::total_cmp);
        let median_residual = match res.len() {
            0 => f64::NAN,
            n if n % 2 == 1 => res[n / 2],
            n => 0.5 * (res[n / 2 - 1] + res[n / 2]),
        };
        let degenerate_count = rows.len() - good.len();
        Self {
            rows,
            fraction_closing,
            median_residual,
            degenerate_count,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("ta_re,ta_im,tb_re,tb_im,residual,closed,degenerate\n");
        for row in &self.rows {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                row.ta.re,
                row.ta.im,
                row.tb.re,
                row.tb.im,
                row.residual,
                row.closed as u8,
                row.degenerate as u8
            );
        }
        s
    }
}

fn scan_seed(scene: &BilliardScene, marked: &[Vec<ProjPoint>; 2], grid: &SeedGrid, ta: C64, tb: C64, tol: f64) -> ScanRow {
    let degenerate = ScanRow {
        ta,
        tb,
        residual: f64::NAN,
        closed: false,
        degenerate: true,
    };
    let (Ok(a), Ok(b)) = (scene.mirror(0).point_at(ta), scene.mirror(1).point_at(tb)) else {
        return degenerate;
    };
    let near = |p: &ProjPoint, m: &[ProjPoint]| m.iter().any(|q| q.dist(p) < grid.margin);
    if near(&a, &marked[0]) || near(&b, &marked[1]) {
        return degenerate;
    }
    match orbit_candidates(scene, &a, &b) {
        Ok(cands) => {
            let residual = cands
                .iter()
                .map(QuadOrbit::max_residual)
                .fold(std::f64::consts::FRAC_PI_2, f64::min);
            ScanRow {
                ta,
                tb,
                residual,
                closed: cands.iter().any(|o| o.is_periodic(tol)),
                degenerate: false,
            }
        }
        Err(_) => degenerate,
    }
}

/// Run [`extend_orbit`] over a seed grid; rows are in grid order.
pub fn reflectivity_scan(scene: &BilliardScene, grid: &SeedGrid, tol: f64) -> ScanReport {
    let marked = [scene.marked_points(0), scene.marked_points(1)];
    let rows: Vec<ScanRow> = grid
        .params()
        .into_par_iter()
        .map(|(ta, tb)| scan_seed(scene, &marked, grid, ta, tb, tol))
        .collect();
    ScanReport::from_rows(rows)
}

/// Named constructions of 4-reflective scenes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SceneSpec {
    /// `(axis, b, axis, image of b)`.
    Type1 { axis: ProjLine, curve_b: Mirror },
    /// Lines through `center` at angles `(θa, θb, θb+θrot, θa+θrot)`, radians.
    Type2 {
        center: (f64, f64),
        theta_a: f64,
        theta_b: f64,
        theta_rot: f64,
    },
    /// `(C1, C2, C1, C2)` for a confocal pair.
    Type3 { a: Conic, b: Conic },
}

/// Real line through `center` with direction angle `theta`.
pub fn line_at_angle(center: (f64, f64), theta: f64) -> Result<ProjLine> {
    let (s, c) = theta.sin_cos();
    ProjLine::real(s, -c, c * center.1 - s * center.0)
}

pub fn build_scene(spec: &SceneSpec) -> Result<BilliardScene> {
    let invalid = |m: &str| GeomError::InvalidSpec(m.to_string());
    match spec {
        SceneSpec::Type1 { axis, curve_b } => {
            let a = Mirror::line(*axis).map_err(|e| invalid(&format!("axis: {e}")))?;
            if curve_b.approx_eq(&a, 1e-12) {
                return Err(invalid("curve b coincides with the axis"));
            }
            let d = curve_b.mirror_image(axis)?;
            BilliardScene::new([a.clone(), curve_b.clone(), a, d])
        }
        SceneSpec::Type2 {
            center,
            theta_a,
            theta_b,
            theta_rot,
        } => {
            let angles = [*theta_a, *theta_b, theta_b + theta_rot, theta_a + theta_rot];
            let pi = std::f64::consts::PI;
            for i in 0..4 {
                for j in i + 1..4 {
                    let d = (angles[i] - angles[j]).rem_euclid(pi);
                    if d < 1e-9 || pi - d < 1e-9 {
                        return Err(invalid("type-2 line directions must be distinct"));
                    }
                }
            }
            let lines = angles.map(|t| line_at_angle(*center, t).and_then(Mirror::line));
            let [a, b, c, d] = lines;
            BilliardScene::new([a?, b?, c?, d?])
        }
        SceneSpec::Type3 { a, b } => {
            let class = confocality_class(a, b, 1e-8).map_err(|e| invalid(&e.to_string()))?;
            if !class.is_confocal() {
                return Err(invalid("type-3 conics are not confocal"));
            }
            let (ma, mb) = (Mirror::conic(*a)?, Mirror::conic(*b)?);
            BilliardScene::new([ma.clone(), mb.clone(), ma, mb])
        }
    }
}

/// Composition `σa∘σb∘σc∘σd` of the line symmetries of an all-line scene.
pub fn composed_symmetry(scene: &BilliardScene) -> Result<ProjMap> {
    let mut acc = ProjMap::identity();
    for m in &scene.mirrors {
        let l = m.as_line().ok_or_else(|| GeomError::InvalidSpec("mirror is not a line".into()))?;
        acc = acc.compose(&line_symmetry(l)?);
    }
    Ok(acc)
}

/// Scene of two concentric circles centred at the origin: `(small, big,
/// small, big)`.
pub fn concentric_scene(r_small: f64, r_big: f64) -> Result<BilliardScene> {
    let small = Mirror::conic(Conic::circle(0.0, 0.0, r_small)?)?;
    let big = Mirror::conic(Conic::circle(0.0, 0.0, r_big)?)?;
    BilliardScene::new([small.clone(), big.clone(), small, big])
}

/// The explicit quadrilateral on concentric circles: `A` on the small
/// circle, `B` on the big one, skew reflection at `A` and `C`.
pub fn concentric_circle_orbit(r_small: f64, r_big: f64, theta_a: f64, theta_b: f64) -> Result<QuadOrbit> {
    if !(r_small > 0.0 && r_small < r_big) {
        return Err(GeomError::InvalidSpec("need 0 < r_small < r_big".into()));
    }
    let a = (r_small * theta_a.cos(), r_small * theta_a.sin());
    let b = (r_big * theta_b.cos(), r_big * theta_b.sin());
    // AB stays outside the small disk iff it leaves A outward
    if (b.0 - a.0) * a.0 + (b.1 - a.1) * a.1 <= 1e-12 * r_small * r_big {
        return Err(GeomError::SegmentCrossesSmallDisk);
    }
    // ray R from B: direction B→A reflected about the diameter through B
    let n = (b.0 / r_big, b.1 / r_big);
    let v = (a.0 - b.0, a.1 - b.1);
    let dot = v.0 * n.0 + v.1 * n.1;
    let w = (2.0 * dot * n.0 - v.0, 2.0 * dot * n.1 - v.1);
    // far intersection of B + s·w with the small circle
    let qa = w.0 * w.0 + w.1 * w.1;
    let qb = 2.0 * (b.0 * w.0 + b.1 * w.1);
    let qc = b.0 * b.0 + b.1 * b.1 - r_small * r_small;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(GeomError::SegmentCrossesSmallDisk);
    }
    let s = (-qb + disc.sqrt()) / (2.0 * qa);
    let c = (b.0 + s * w.0, b.1 + s * w.1);
    // D: B reflected about the diameter orthogonal to AC
    let ac = (c.0 - a.0, c.1 - a.1);
    let len = (ac.0 * ac.0 + ac.1 * ac.1).sqrt();
    if len < 1e-12 {
        return Err(GeomError::DegenerateSeed("A = C"));
    }
    let u = (ac.0 / len, ac.1 / len);
    let k = b.0 * u.0 + b.1 * u.1;
    let d = (b.0 - 2.0 * k * u.0, b.1 - 2.0 * k * u.1);
    let scene = concentric_scene(r_small, r_big)?;
    QuadOrbit::evaluate(
        &scene,
        [a, b, c, d].map(|(x, y)| ProjPoint::real(x, y)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conics::RealFamily;
    use crate::proj_geom::c;

    const DEG: f64 = std::f64::consts::PI / 180.0;

    fn ellipse_pair() -> BilliardScene {
        build_scene(&SceneSpec::Type3 {
            a: Conic::central(4.0, 1.0).unwrap(),
            b: Conic::central(9.0, 6.0).unwrap(),
        })
        .unwrap()
    }

    #[test]
    fn residual_examples() {
        let o = ProjPoint::real(0.0, 0.0);
        let up = ProjLine::slope_intercept(r(1.0), r(0.0));
        let down = ProjLine::slope_intercept(r(-1.0), r(0.0));
        let axis = ProjLine::real(0.0, 1.0, 0.0).unwrap();
        assert!(reflection_residual(&up, &down, &axis, &o).unwrap() < 1e-15);
        let d = reflection_residual(&up, &up, &axis, &o).unwrap();
        assert!((d - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let iso = ProjLine::slope_intercept(I, r(0.0));
        assert!(reflection_residual(&up, &iso, &iso, &o).unwrap() < 1e-15);
        assert_eq!(
            reflection_residual(&up, &down, &axis, &ProjPoint::real(1.0, 0.0)),
            Err(GeomError::PointNotIncident)
        );
    }

    #[test]
    fn type3_seed_closes_uniquely() {
        let scene = ellipse_pair();
        let a = scene.mirror(0).point_at(c(0.4, 0.1)).unwrap();
        let b = scene.mirror(1).point_at(c(-0.7, 0.05)).unwrap();
        let orbits = extend_orbit(&scene, &a, &b, 1e-8).unwrap();
        assert_eq!(orbits.len(), 1);
        assert!(orbits[0].max_residual() < 1e-9);
    }

    #[test]
    fn tangent_edge_is_degenerate_seed() {
        let scene = ellipse_pair();
        let b = ProjPoint::real(3.0, 0.0);
        // the tangent x = 3 at B meets the inner ellipse at complex points
        let t = ProjLine::real(1.0, 0.0, -3.0).unwrap();
        let a = conics::intersect_line(scene.mirror(0).as_conic().unwrap(), &t).unwrap()[0].0;
        assert_eq!(
            extend_orbit(&scene, &a, &b, 1e-8),
            Err(GeomError::DegenerateSeed("edge AB is tangent to b at B"))
        );
    }

    #[test]
    fn perturbed_scene_does_not_close() {
        let scene = BilliardScene::new([
            Mirror::Conic(Conic::central(4.0, 1.0).unwrap()),
            Mirror::Conic(Conic::central(9.2, 6.0).unwrap()),
            Mirror::Conic(Conic::central(4.0, 1.0).unwrap()),
            Mirror::Conic(Conic::central(9.2, 6.0).unwrap()),
        ])
        .unwrap();
        let a = scene.mirror(0).point_at(c(0.4, 0.1)).unwrap();
        let b = scene.mirror(1).point_at(c(-0.7, 0.05)).unwrap();
        assert!(extend_orbit(&scene, &a, &b, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn type2_scene_composes_to_identity() {
        let scene = build_scene(&SceneSpec::Type2 {
            center: (0.0, 0.0),
            theta_a: 0.0,
            theta_b: 10.0 * DEG,
            theta_rot: 30.0 * DEG,
        })
        .unwrap();
        let expect = [0.0, 10.0, 40.0, 30.0].map(|a: f64| line_at_angle((0.0, 0.0), a * DEG).unwrap());
        for (m, l) in scene.mirrors.iter().zip(expect) {
            assert!(m.as_line().unwrap().dist(&l) < 1e-15);
        }
        let s = composed_symmetry(&scene).unwrap();
        assert!(s.dist(&ProjMap::identity()) < 1e-12);
        assert!(matches!(
            build_scene(&SceneSpec::Type2 {
                center: (0.0, 0.0),
                theta_a: 0.0,
                theta_b: 0.0,
                theta_rot: 0.5,
            }),
            Err(GeomError::InvalidSpec(_))
        ));
    }

    #[test]
    fn type1_mirror_image() {
        let b = Conic::from_real_coeffs(1.0, 0.0, 0.0, 0.0, -1.0, 1.0).unwrap();
        let scene = build_scene(&SceneSpec::Type1 {
            axis: ProjLine::real(0.0, 1.0, 0.0).unwrap(),
            curve_b: Mirror::Conic(b),
        })
        .unwrap();
        let d = Conic::from_real_coeffs(1.0, 0.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(scene.mirror(3).approx_eq(&Mirror::Conic(d), 1e-12));
        let a = scene.mirror(0).point_at(c(0.3, 0.2)).unwrap();
        let bp = scene.mirror(1).point_at(c(-0.5, 0.1)).unwrap();
        let orbits = extend_orbit(&scene, &a, &bp, 1e-8).unwrap();
        assert!(!orbits.is_empty());
        let (x, y) = bp.xy();
        let image = ProjPoint::finite(x, -y);
        assert!(orbits[0].vertices[3].dist(&image) < 1e-8);
    }

    #[test]
    fn type3_from_family() {
        let fam = RealFamily::Central {
            center: (0.0, 0.0),
            focus: (3f64.sqrt(), 0.0),
        };
        let scene = build_scene(&SceneSpec::Type3 {
            a: fam.member(0.0).unwrap(),
            b: fam.member(-2.0).unwrap(),
        })
        .unwrap();
        assert!(scene.mirror(0).approx_eq(&scene.mirror(2).clone(), 0.0));
        assert!(matches!(
            build_scene(&SceneSpec::Type3 {
                a: Conic::central(4.0, 1.0).unwrap(),
                b: Conic::central(9.2, 6.0).unwrap(),
            }),
            Err(GeomError::InvalidSpec(_))
        ));
    }

    #[test]
    fn scans() {
        let rep = reflectivity_scan(&ellipse_pair(), &SeedGrid::new(20), 1e-8);
        assert!(rep.fraction_closing >= 0.95, "{}", rep.fraction_closing);

        let scene = build_scene(&SceneSpec::Type2 {
            center: (0.0, 0.0),
            theta_a: 0.0,
            theta_b: 10.0 * DEG,
            theta_rot: 30.0 * DEG,
        })
        .unwrap();
        let rep = reflectivity_scan(&scene, &SeedGrid::new(10), 1e-8);
        assert!(rep.fraction_closing >= 0.95, "{}", rep.fraction_closing);

        let e = Mirror::Conic(Conic::central(4.0, 1.0).unwrap());
        let h = Mirror::Conic(Conic::central(9.2, 6.0).unwrap());
        let scene = BilliardScene::new([e.clone(), h.clone(), e, h]).unwrap();
        let rep = reflectivity_scan(&scene, &SeedGrid::new(10), 1e-6);
        assert!(rep.fraction_closing <= 0.05, "{}", rep.fraction_closing);
        assert!(rep.median_residual > 1e-3, "{}", rep.median_residual);
    }

    #[test]
    fn concentric_examples() {
        let o = concentric_circle_orbit(1.0, 2.0, 30.0 * DEG, 0.0).unwrap();
        assert!(o.max_residual() < 1e-10, "{:?}", o.residuals);
        assert!(!o.is_flagged());

        let o = concentric_circle_orbit(1.0, 2.0, 90.0 * DEG, 0.0);
        // A at 90°, B at 0°: AB enters the unit disk
        assert_eq!(o, Err(GeomError::SegmentCrossesSmallDisk));

        let o = concentric_circle_orbit(1.0, 3.0, 90.0 * DEG, 90.0 * DEG - 40.0 * DEG).unwrap();
        assert!(o.max_residual() < 1e-10);

        assert_eq!(
            concentric_circle_orbit(1.0, 2.0, 80.0 * DEG, 0.0),
            Err(GeomError::SegmentCrossesSmallDisk)
        );
    }

    #[test]
    fn construction_commutes_with_the_y_axis_symmetry() {
        let (ta, tb) = (70.0 * DEG, 20.0 * DEG);
        let o = concentric_circle_orbit(1.0, 2.0, ta, tb).unwrap();
        let m = concentric_circle_orbit(1.0, 2.0, 180.0 * DEG - ta, 180.0 * DEG - tb).unwrap();
        for (p, q) in o.vertices.iter().zip(m.vertices.iter()) {
            let ((x, y), (u, v)) = (p.xy(), q.xy());
            assert!((x + u).norm() < 1e-12 && (y - v).norm() < 1e-12);
        }
    }
}
