//! Real pseudo-billiards: usual and skew reflection, real orbit search and
//! the census of reflection-law signatures.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify_structure, BilliardType, STRUCT_TOL};
use crate::conics::{Conic, RealConicShape};
use crate::error::{GeomError, Result};
use crate::orbits::{extend_orbit, BilliardScene, Mirror, QuadOrbit};
use crate::proj_geom::{join, pencil_distance, reflect_line, ProjLine, ProjPoint};

/// Below this normalized distance a vertex counts as lying on the mirror line.
pub const SIDE_TOL: f64 = 1e-10;
/// Pencil distance allowed between the reflected and the outgoing edge.
pub const LAW_TOL: f64 = 1e-7;
/// Vertices beyond this coordinate magnitude are treated as infinite.
pub const FAR: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReflectionLaw {
    Usual,
    Skew,
    NotReflective,
}

impl ReflectionLaw {
    pub fn letter(self) -> char {
        match self {
            ReflectionLaw::Usual => 'U',
            ReflectionLaw::Skew => 'S',
            ReflectionLaw::NotReflective => 'N',
        }
    }
}

/// Classify the reflection of `A → B → C` at the real line `l` through `B`.
pub fn classify_reflection_law(
    a: (f64, f64),
    b: (f64, f64),
    c: (f64, f64),
    l: &ProjLine,
) -> Result<ReflectionLaw> {
    let [u, v, w] = l.coeffs().map(|z| z.re);
    let n = u.hypot(v);
    if n == 0.0 {
        return Err(GeomError::LineAtInfinity);
    }
    let side = |p: (f64, f64)| (u * p.0 + v * p.1 + w) / n;
    let (sa, sc) = (side(a), side(c));
    if sa.abs() < SIDE_TOL || sc.abs() < SIDE_TOL {
        return Err(GeomError::VertexOnMirrorLine);
    }
    let (pa, pb, pc) = (ProjPoint::real(a.0, a.1), ProjPoint::real(b.0, b.1), ProjPoint::real(c.0, c.1));
    let refl = reflect_line(&join(&pa, &pb)?, l, &pb)?;
    if pencil_distance(&refl.line, &join(&pb, &pc)?, &pb) > LAW_TOL {
        return Ok(ReflectionLaw::NotReflective);
    }
    Ok(if sa.signum() == sc.signum() {
        ReflectionLaw::Usual
    } else {
        ReflectionLaw::Skew
    })
}

/// Laws at the vertices `A, B, C, D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LawSignature(pub [ReflectionLaw; 4]);

impl LawSignature {
    pub fn opposite_equal(&self) -> bool {
        self.0[0] == self.0[2] && self.0[1] == self.0[3]
    }

    pub fn has_skew_pair(&self) -> bool {
        let s = ReflectionLaw::Skew;
        (self.0[0] == s && self.0[2] == s) || (self.0[1] == s && self.0[3] == s)
    }

    /// The pair (law on `a, c`, law on `b, d`); `None` if opposite laws differ.
    pub fn class(&self) -> Option<SignatureClass> {
        self.opposite_equal().then_some(SignatureClass {
            at_a: self.0[0],
            at_b: self.0[1],
        })
    }
}

impl fmt::Display for LawSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.letter()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignatureClass {
    pub at_a: ReflectionLaw,
    pub at_b: ReflectionLaw,
}

impl SignatureClass {
    pub const fn new(at_a: ReflectionLaw, at_b: ReflectionLaw) -> Self {
        Self { at_a, at_b }
    }
}

impl fmt::Display for SignatureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.at_a.letter(), self.at_b.letter())
    }
}

const S: ReflectionLaw = ReflectionLaw::Skew;
const U: ReflectionLaw = ReflectionLaw::Usual;

/// The real form a reflective scene takes, as far as reflection laws care.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RealSceneKind {
    ConfocalEllipses { inner_is_a: bool },
    ConfocalHyperbolas,
    EllipseHyperbola { ellipse_is_a: bool },
    CodirectedParabolas { inner_is_a: bool },
    OppositeParabolas,
    /// Type 1 with the axis at `mirror(offset)`.
    SymmetricLine { offset: usize, subcase: SymmetricSubcase },
    ParallelLines { bd_between_ac: bool },
    ConcurrentLines,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetricSubcase {
    ParallelLines,
    OrthogonalLine,
    General,
}

/// Signature classes the theory allows for a scene kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub classes: Vec<SignatureClass>,
    /// When false, only containment of the found classes is asserted.
    pub exhaustive: bool,
}

impl RealSceneKind {
    pub fn prediction(&self) -> Prediction {
        let sc = SignatureClass::new;
        // skew on the first curve, usual on the other one
        let inner = |a_inner: bool| if a_inner { sc(S, U) } else { sc(U, S) };
        let (classes, exhaustive) = match *self {
            RealSceneKind::ConfocalEllipses { inner_is_a } => (vec![inner(inner_is_a)], true),
            RealSceneKind::ConfocalHyperbolas => (vec![sc(S, S), sc(S, U), sc(U, S)], true),
            // the hyperbola stays skew; the ellipse takes either law
            RealSceneKind::EllipseHyperbola { ellipse_is_a } => {
                (vec![sc(S, S), inner(!ellipse_is_a)], true)
            }
            RealSceneKind::CodirectedParabolas { inner_is_a } => (vec![inner(inner_is_a)], true),
            RealSceneKind::OppositeParabolas => (vec![sc(S, S)], true),
            RealSceneKind::SymmetricLine { offset, subcase } => {
                let axis_a = offset % 2 == 0;
                let flip = |c: SignatureClass| {
                    if axis_a {
                        c
                    } else {
                        sc(c.at_b, c.at_a)
                    }
                };
                match subcase {
                    SymmetricSubcase::ParallelLines => (vec![flip(sc(S, U))], true),
                    SymmetricSubcase::OrthogonalLine => (vec![sc(S, S)], true),
                    SymmetricSubcase::General => (vec![flip(sc(S, S)), flip(sc(S, U))], false),
                }
            }
            RealSceneKind::ParallelLines { bd_between_ac: true } => (vec![sc(U, S)], true),
            RealSceneKind::ParallelLines { .. } | RealSceneKind::ConcurrentLines => {
                (vec![sc(S, S), sc(S, U), sc(U, S)], false)
            }
        };
        let mut classes = classes;
        classes.sort();
        Prediction { classes, exhaustive }
    }
}

/// Four real mirrors, none of them the infinity line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealScene {
    scene: BilliardScene,
    shapes: [Option<RealConicShape>; 4],
}

impl RealScene {
    pub fn new(mirrors: [Mirror; 4]) -> Result<Self> {
        let mut shapes = [None; 4];
        for (j, m) in mirrors.iter().enumerate() {
            match m {
                Mirror::Line(l) if l.is_real(1e-12) => {}
                Mirror::Conic(c) => shapes[j] = Some(c.real_shape().ok_or(GeomError::NotReal)?),
                _ => return Err(GeomError::NotReal),
            }
        }
        Ok(Self {
            scene: BilliardScene::new(mirrors)?,
            shapes,
        })
    }

    /// The scene `a, b, a, b`.
    pub fn confocal(a: Conic, b: Conic) -> Result<Self> {
        Self::new([
            Mirror::conic(a)?,
            Mirror::conic(b)?,
            Mirror::conic(a)?,
            Mirror::conic(b)?,
        ])
    }

    /// `a = c` the x-axis, `b = d` the y-axis.
    pub fn orthogonal_lines() -> Result<Self> {
        let x = Mirror::line(ProjLine::real(0.0, 1.0, 0.0)?)?;
        let y = Mirror::line(ProjLine::real(1.0, 0.0, 0.0)?)?;
        Self::new([x.clone(), y.clone(), x, y])
    }

    /// Horizontal lines at the given heights for `a, b, c, d`.
    pub fn horizontal_lines(heights: [f64; 4]) -> Result<Self> {
        let mut ms = Vec::with_capacity(4);
        for h in heights {
            ms.push(Mirror::line(ProjLine::real(0.0, 1.0, -h)?)?);
        }
        let ms: [Mirror; 4] = ms.try_into().map_err(|_| GeomError::DegenerateInput)?;
        Self::new(ms)
    }

    pub fn scene(&self) -> &BilliardScene {
        &self.scene
    }

    pub fn shape(&self, j: usize) -> Option<&RealConicShape> {
        self.shapes[j % 4].as_ref()
    }

    /// Which real form this is; `SceneNotReflective` outside types 1 to 3.
    pub fn kind(&self) -> Result<RealSceneKind> {
        let t = classify_structure(&self.scene, STRUCT_TOL)?;
        match t {
            BilliardType::NotFourReflective => Err(GeomError::SceneNotReflective),
            BilliardType::Type3ConfocalConics { .. } => self.conic_kind(),
            BilliardType::Type1SymmetricLine { axis, offset } => {
                let others = [self.scene.mirror(offset + 1), self.scene.mirror(offset + 3)];
                let dir = |l: &ProjLine| {
                    let [u, v, _] = l.coeffs().map(|z| z.re);
                    (u, v)
                };
                let (au, av) = dir(&axis);
                let lines: Vec<(f64, f64)> = others.iter().filter_map(|m| m.as_line().map(dir)).collect();
                let subcase = if lines.len() == 2
                    && lines.iter().all(|&(u, v)| (u * av - v * au).abs() < 1e-9 * u.hypot(v) * au.hypot(av))
                {
                    SymmetricSubcase::ParallelLines
                } else if lines.len() == 2
                    && others[0].approx_eq(others[1], STRUCT_TOL)
                    && (lines[0].0 * au + lines[0].1 * av).abs() < 1e-9 * lines[0].0.hypot(lines[0].1) * au.hypot(av)
                {
                    SymmetricSubcase::OrthogonalLine
                } else {
                    SymmetricSubcase::General
                };
                Ok(RealSceneKind::SymmetricLine { offset, subcase })
            }
            BilliardType::Type2ConcurrentLines { center, .. } => {
                if center.is_finite(1e-12) {
                    return Ok(RealSceneKind::ConcurrentLines);
                }
                // signed offsets along a common unit normal
                let [u0, v0, _] = self.line(0)?.coeffs().map(|z| z.re);
                let n0 = u0.hypot(v0);
                let mut h = [0.0; 4];
                for (j, hj) in h.iter_mut().enumerate() {
                    let [u, v, w] = self.line(j)?.coeffs().map(|z| z.re);
                    let k = (u * u0 + v * v0) / n0;
                    *hj = -w / k;
                }
                let (lo, hi) = (h[0].min(h[2]), h[0].max(h[2]));
                let inside = |x: f64| x > lo && x < hi;
                Ok(RealSceneKind::ParallelLines {
                    bd_between_ac: inside(h[1]) && inside(h[3]),
                })
            }
        }
    }

    fn line(&self, j: usize) -> Result<ProjLine> {
        self.scene.mirror(j).as_line().copied().ok_or(GeomError::DegenerateInput)
    }

    fn conic_kind(&self) -> Result<RealSceneKind> {
        let (Some(sa), Some(sb)) = (self.shape(0), self.shape(1)) else {
            return Err(GeomError::SceneNotReflective);
        };
        let cb = self.scene.mirror(1).as_conic().ok_or(GeomError::DegenerateInput)?;
        use RealConicShape::*;
        Ok(match (sa, sb) {
            (Ellipse { .. }, Ellipse { .. }) => RealSceneKind::ConfocalEllipses {
                inner_is_a: inside(cb, sb, sa.affine_point(0.0, 0)),
            },
            (Hyperbola { .. }, Hyperbola { .. }) => RealSceneKind::ConfocalHyperbolas,
            (Ellipse { .. }, Hyperbola { .. }) => RealSceneKind::EllipseHyperbola { ellipse_is_a: true },
            (Hyperbola { .. }, Ellipse { .. }) => RealSceneKind::EllipseHyperbola { ellipse_is_a: false },
            (Parabola { axis: xa, p: pa, .. }, Parabola { axis: xb, p: pb, .. }) => {
                let da = (xa.0 * pa.signum(), xa.1 * pa.signum());
                let db = (xb.0 * pb.signum(), xb.1 * pb.signum());
                if da.0 * db.0 + da.1 * db.1 > 0.0 {
                    RealSceneKind::CodirectedParabolas {
                        inner_is_a: inside(cb, sb, sa.affine_point(0.0, 0)),
                    }
                } else {
                    RealSceneKind::OppositeParabolas
                }
            }
            _ => return Err(GeomError::SceneNotReflective),
        })
    }
}

/// Whether `p` lies in the convex domain of an ellipse or parabola, which
/// is the side of its foci.
fn inside(c: &Conic, shape: &RealConicShape, p: (f64, f64)) -> bool {
    let f = shape.foci()[0];
    let val = |q: (f64, f64)| c.eval(&ProjPoint::real(q.0, q.1)).re;
    val(p).signum() == val(f).signum()
}

/// A parameter arc on one real branch of a mirror.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Arc {
    branch: usize,
    lo: f64,
    hi: f64,
}

fn arcs(m: &Mirror, shape: Option<&RealConicShape>) -> Vec<Arc> {
    let arc = |branch, lo, hi| Arc { branch, lo, hi };
    match shape {
        Some(RealConicShape::Ellipse { .. }) => vec![arc(0, 0.0, std::f64::consts::TAU)],
        Some(RealConicShape::Hyperbola { .. }) => vec![arc(0, -2.0, 2.0), arc(1, -2.0, 2.0)],
        Some(RealConicShape::Parabola { p, .. }) => {
            let r = 4.0 * p.abs().max(0.25);
            vec![arc(0, -r, -0.02 * r), arc(0, 0.02 * r, r)]
        }
        None => {
            let _ = m;
            vec![arc(0, -3.0, 3.0)]
        }
    }
}

fn arc_point(m: &Mirror, shape: Option<&RealConicShape>, a: &Arc, s: f64) -> Result<ProjPoint> {
    let t = a.lo + (a.hi - a.lo) * s;
    match shape {
        Some(sh) => Ok(sh.point_at(t, a.branch)),
        None => m.point_at(crate::proj_geom::r(t)),
    }
}

/// Stratified seeds: `per_pair` quasi-random points on every pair of real
/// branch arcs of mirrors `a` and `b`.
pub fn stratified_seeds(scene: &RealScene, per_pair: usize) -> Result<Vec<(ProjPoint, ProjPoint)>> {
    // additive recurrence with the plastic-number constants
    const G1: f64 = 0.754_877_666_246_692_7;
    const G2: f64 = 0.569_840_290_998_053_3;
    let (ma, mb) = (scene.scene.mirror(0), scene.scene.mirror(1));
    let (sa, sb) = (scene.shape(0), scene.shape(1));
    let mut out = Vec::new();
    for arc_a in arcs(ma, sa) {
        for arc_b in arcs(mb, sb) {
            for k in 0..per_pair {
                let k = k as f64 + 1.0;
                let (u, v) = ((0.5 + G1 * k).fract(), (0.5 + G2 * k).fract());
                out.push((arc_point(ma, sa, &arc_a, u)?, arc_point(mb, sb, &arc_b, v)?));
            }
        }
    }
    Ok(out)
}

/// A real periodic orbit with its law at each vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealOrbit {
    pub orbit: QuadOrbit,
    pub points: [(f64, f64); 4],
    pub signature: LawSignature,
}

fn real_xy(p: &ProjPoint) -> Option<(f64, f64)> {
    let (x, y) = p.affine()?;
    let ok = |z: num_complex::Complex64| z.im.abs() <= 1e-9 * (1.0 + z.re.abs()) && z.re.abs() <= FAR;
    (ok(x) && ok(y)).then_some((x.re, y.re))
}

fn realize(orbit: QuadOrbit) -> Option<RealOrbit> {
    let pts: Vec<(f64, f64)> = orbit.vertices.iter().map(real_xy).collect::<Option<_>>()?;
    let points: [(f64, f64); 4] = pts.try_into().ok()?;
    let mut laws = [ReflectionLaw::NotReflective; 4];
    for (j, law) in laws.iter_mut().enumerate() {
        let t = &orbit.tangents[j];
        if !t.is_real(1e-9) {
            return None;
        }
        *law = classify_reflection_law(points[(j + 3) % 4], points[j], points[(j + 1) % 4], t).ok()?;
    }
    if laws.contains(&ReflectionLaw::NotReflective) {
        return None;
    }
    Some(RealOrbit {
        orbit,
        points,
        signature: LawSignature(laws),
    })
}

/// Real closing orbits from the given real seeds, in seed order.
pub fn find_real_orbits(scene: &RealScene, seeds: &[(ProjPoint, ProjPoint)], tol: f64) -> Vec<RealOrbit> {
    seeds
        .par_iter()
        .map(|(a, b)| {
            extend_orbit(&scene.scene, a, b, tol)
                .unwrap_or_default()
                .into_iter()
                .filter_map(realize)
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub class: SignatureClass,
    pub count: usize,
    pub representative: [(f64, f64); 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub kind: RealSceneKind,
    pub seeds: usize,
    pub orbits: usize,
    pub entries: Vec<CensusEntry>,
    /// Orbits whose opposite laws differ or that have no skew pair.
    pub anomalies: usize,
    pub prediction: Prediction,
}

impl Census {
    pub fn classes(&self) -> Vec<SignatureClass> {
        self.entries.iter().map(|e| e.class).collect()
    }

    /// Found classes against the prediction: equal sets when the prediction is
    /// exhaustive, containment otherwise.
    pub fn matches_prediction(&self) -> bool {
        let found = self.classes();
        let contained = found.iter().all(|c| self.prediction.classes.contains(c));
        self.anomalies == 0
            && contained
            && (!self.prediction.exhaustive || found.len() == self.prediction.classes.len())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("signature,count,ax,ay,bx,by,cx,cy,dx,dy\n");
        for e in &self.entries {
            let _ = write!(s, "{},{}", e.class, e.count);
            for (x, y) in e.representative {
                let _ = write!(s, ",{x:.16e},{y:.16e}");
            }
            s.push('\n');
        }
        s
    }
}

/// Default seeds per pair of branch arcs when a census is given a total.
pub fn seeds_per_pair(scene: &RealScene, n: usize) -> usize {
    let pairs = arcs(scene.scene.mirror(0), scene.shape(0)).len() * arcs(scene.scene.mirror(1), scene.shape(1)).len();
    n.div_ceil(pairs.max(1))
}

/// Distinct signature classes over about `n` stratified seeds.
pub fn law_signature_census(scene: &RealScene, n: usize) -> Result<Census> {
    let kind = scene.kind()?;
    let seeds = stratified_seeds(scene, seeds_per_pair(scene, n))?;
    let orbits = find_real_orbits(scene, &seeds, crate::orbits::CLOSURE_TOL);
    let mut by_class: BTreeMap<SignatureClass, CensusEntry> = BTreeMap::new();
    let mut anomalies = 0;
    for o in &orbits {
        match o.signature.class().filter(|_| o.signature.has_skew_pair()) {
            Some(class) => {
                by_class
                    .entry(class)
                    .or_insert(CensusEntry {
                        class,
                        count: 0,
                        representative: o.points,
                    })
                    .count += 1;
            }
            None => anomalies += 1,
        }
    }
    Ok(Census {
        kind,
        seeds: seeds.len(),
        orbits: orbits.len(),
        entries: by_class.into_values().collect(),
        anomalies,
        prediction: kind.prediction(),
    })
}
