//! Structural classification of 4-reflective billiards and the catalogue of
//! degenerate quadrilaterals of type-3 billiards.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conics::{
    confocality_class, isotropic_tangents, tangency_class, tangents_from_point, ConfocalClass,
    Conic, TangencyTag,
};
use crate::error::{GeomError, Result};
use crate::orbits::{reflectivity_scan, BilliardScene, Mirror, QuadOrbit, SeedGrid};
use crate::proj_geom::{
    is_isotropic, isotropic_coordinate, join, meet, r, reflect_line, ExtComplex, ProjLine,
    ProjPoint, C64, DEFAULT_TOL,
};

/// Tolerance of the structural predicates.
pub const STRUCT_TOL: f64 = 1e-8;

/// Grid used to cross-check a structural verdict.
const CHECK_GRID: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BilliardType {
    /// `axis = mirror(offset) = mirror(offset+2)`, and the other two mirrors
    /// are symmetric about it.
    Type1SymmetricLine { axis: ProjLine, offset: usize },
    /// Four lines through `center`; `(a, b)` goes to `(d, c)` under the
    /// complex rotation by `rotation` (radians), or under a translation when
    /// `center` is at infinity.
    Type2ConcurrentLines { center: ProjPoint, rotation: C64 },
    /// `a = c`, `b = d` distinct confocal conics.
    Type3ConfocalConics { class: ConfocalClass },
    NotFourReflective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeTag {
    Type1SymmetricLine,
    Type2ConcurrentLines,
    Type3ConfocalConics,
    NotFourReflective,
}

impl BilliardType {
    pub fn tag(&self) -> TypeTag {
        match self {
            BilliardType::Type1SymmetricLine { .. } => TypeTag::Type1SymmetricLine,
            BilliardType::Type2ConcurrentLines { .. } => TypeTag::Type2ConcurrentLines,
            BilliardType::Type3ConfocalConics { .. } => TypeTag::Type3ConfocalConics,
            BilliardType::NotFourReflective => TypeTag::NotFourReflective,
        }
    }

    pub fn is_reflective(&self) -> bool {
        self.tag() != TypeTag::NotFourReflective
    }

    /// One-line human readable summary.
    pub fn summary(&self) -> String {
        match self {
            BilliardType::Type1SymmetricLine { axis, .. } => {
                format!("Type1SymmetricLine, axis {axis}")
            }
            BilliardType::Type2ConcurrentLines { center, rotation } => {
                if center.is_finite(DEFAULT_TOL) {
                    let deg = rotation.re.to_degrees();
                    if rotation.im.abs() < 1e-12 {
                        format!("Type2ConcurrentLines, rotation {}°", fmt_deg(deg))
                    } else {
                        format!(
                            "Type2ConcurrentLines, rotation {}{:+}i°",
                            fmt_deg(deg),
                            rotation.im.to_degrees()
                        )
                    }
                } else {
                    "Type2ConcurrentLines, translation".to_string()
                }
            }
            BilliardType::Type3ConfocalConics { class } => {
                format!("Type3ConfocalConics, {:?}", class.tag())
            }
            BilliardType::NotFourReflective => "NotFourReflective".to_string(),
        }
    }
}

fn fmt_deg(d: f64) -> String {
    let rounded = (d * 1e9).round() / 1e9;
    format!("{rounded}")
}

fn type1(scene: &BilliardScene, tol: f64) -> Result<Option<BilliardType>> {
    for offset in 0..2 {
        let s = scene.rotated(offset);
        let Some(axis) = s.mirror(0).as_line() else {
            continue;
        };
        if !s.mirror(2).approx_eq(s.mirror(0), tol) || s.mirror(1).approx_eq(s.mirror(0), tol) {
            continue;
        }
        if s.mirror(1).mirror_image(axis)?.approx_eq(s.mirror(3), tol) {
            return Ok(Some(BilliardType::Type1SymmetricLine {
                axis: *axis,
                offset,
            }));
        }
    }
    Ok(None)
}

fn direction_coordinate(l: &ProjLine) -> Option<C64> {
    let [u, v, _] = l.coeffs();
    let slope = if v.norm() < 1e-300 {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite(-u / v)
    };
    isotropic_coordinate(slope).finite()
}

fn type2(scene: &BilliardScene, tol: f64) -> Result<Option<BilliardType>> {
    let lines: Option<Vec<ProjLine>> = scene.mirrors.iter().map(|m| m.as_line().copied()).collect();
    let Some(l) = lines else {
        return Ok(None);
    };
    for i in 0..4 {
        for j in i + 1..4 {
            if l[i].dist(&l[j]) <= tol {
                return Ok(None);
            }
        }
    }
    let o = meet(&l[0], &l[1])?;
    if !l[2].contains(&o, tol) || !l[3].contains(&o, tol) {
        return Ok(None);
    }
    if !o.is_finite(tol) {
        // parallel lines: a translation must carry (a, b) onto (d, c)
        let [u, v, _] = l[0].coeffs();
        let k = if u.norm() > v.norm() { 0 } else { 1 };
        let w = |m: &ProjLine| m.coeffs()[2] / m.coeffs()[k];
        let defect = (w(&l[3]) - w(&l[0]) - w(&l[2]) + w(&l[1])).norm();
        let scale = 1.0 + l.iter().map(|m| w(m).norm()).fold(0.0, f64::max);
        return Ok((defect <= tol * scale).then_some(BilliardType::Type2ConcurrentLines {
            center: o,
            rotation: r(0.0),
        }));
    }
    let z: Option<Vec<C64>> = l.iter().map(direction_coordinate).collect();
    let Some(z) = z else {
        return Ok(None);
    };
    if z.iter().any(|v| v.norm() < 1e-12) {
        return Ok(None);
    }
    let (q1, q2) = (z[3] / z[0], z[2] / z[1]);
    if (q1 - q2).norm() > tol * (1.0 + q1.norm()) {
        return Ok(None);
    }
    // e^{2iθ} = q; θ taken in (−π/2, π/2]
    let theta = -C64::new(0.0, 1.0) * q1.ln() * 0.5;
    Ok(Some(BilliardType::Type2ConcurrentLines {
        center: o,
        rotation: theta,
    }))
}

/// The conic pair `(a, b)` of a structurally type-3 scene.
pub fn type3_pair(scene: &BilliardScene, tol: f64) -> Option<(Conic, Conic)> {
    let (a, b) = (scene.mirror(0).as_conic()?, scene.mirror(1).as_conic()?);
    if !scene.mirror(2).approx_eq(scene.mirror(0), tol)
        || !scene.mirror(3).approx_eq(scene.mirror(1), tol)
        || a.approx_eq(b, tol)
    {
        return None;
    }
    Some((*a, *b))
}

fn type3(scene: &BilliardScene, tol: f64) -> Result<Option<BilliardType>> {
    let Some((a, b)) = type3_pair(scene, tol) else {
        return Ok(None);
    };
    let class = confocality_class(&a, &b, tol)?;
    Ok(class
        .is_confocal()
        .then_some(BilliardType::Type3ConfocalConics { class }))
}

/// Structural verdict only, without the scan cross-check.
pub fn classify_structure(scene: &BilliardScene, tol: f64) -> Result<BilliardType> {
    if let Some(t) = type1(scene, tol)? {
        return Ok(t);
    }
    if let Some(t) = type2(scene, tol)? {
        return Ok(t);
    }
    if let Some(t) = type3(scene, tol)? {
        return Ok(t);
    }
    Ok(BilliardType::NotFourReflective)
}

/// Classify a scene and confirm the verdict with a reflectivity scan.
pub fn classify_scene(scene: &BilliardScene, tol: f64) -> Result<BilliardType> {
    let verdict = classify_structure(scene, STRUCT_TOL.max(tol))?;
    let scan = reflectivity_scan(scene, &SeedGrid::new(CHECK_GRID), tol);
    let f = scan.fraction_closing;
    let agrees = if verdict.is_reflective() {
        f >= 0.95
    } else {
        f <= 0.05
    };
    if !agrees {
        return Err(GeomError::Inconsistent(format!(
            "structural verdict {:?} but closing fraction {f:.3}",
            verdict.tag()
        )));
    }
    Ok(verdict)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GenusType {
    Elliptic,
    RationalOneNode,
    RationalDegree2Cusp,
    TwoSmoothRational,
}

impl GenusType {
    pub fn from_tangency(t: TangencyTag) -> Self {
        match t {
            TangencyTag::NotTangent => GenusType::Elliptic,
            TangencyTag::SingleQuadratic => GenusType::RationalOneNode,
            TangencyTag::TripleContact => GenusType::RationalDegree2Cusp,
            TangencyTag::TwoIsotropicPoints => GenusType::TwoSmoothRational,
        }
    }
}

/// One component of the degenerate set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DegenerateCurve {
    /// Quadrilaterals `ABCB` with `AB`, `CB` tangent to `a`.
    Ta,
    /// Quadrilaterals `BADA`-type with edges tangent to `b`.
    Tb,
    /// Quadrilaterals pinned at the tangency points of the isotropic line
    /// `line` on the mirror pair named by `pair`.
    Gamma {
        pair: String,
        line: ProjLine,
        a0: ProjPoint,
        b0: ProjPoint,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerateCatalogue {
    pub tangency: TangencyTag,
    pub genus_ta: GenusType,
    pub genus_tb: GenusType,
    pub curves: Vec<DegenerateCurve>,
}

impl DegenerateCatalogue {
    pub fn to_report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tangency: {:?}", self.tangency);
        let _ = writeln!(s, "T_a: {:?}", self.genus_ta);
        let _ = writeln!(s, "T_b: {:?}", self.genus_tb);
        for c in &self.curves {
            if let DegenerateCurve::Gamma { pair, line, a0, b0 } = c {
                let _ = writeln!(s, "Gamma_{pair}: L = {line}; A0 = {a0}; B0 = {b0}");
            }
        }
        s
    }
}

/// Shared isotropic tangent lines of a confocal pair.
fn shared_isotropic_lines(a: &Conic, b: &Conic) -> Result<Vec<ProjLine>> {
    let ta = isotropic_tangents(a)?;
    let mut out: Vec<ProjLine> = Vec::new();
    for (l, _) in ta.all() {
        if b.is_tangent_line(&l, 1e-8) && !out.iter().any(|m| m.dist(&l) <= 1e-9) {
            out.push(l);
        }
    }
    Ok(out)
}

pub fn degenerate_catalogue(scene: &BilliardScene) -> Result<DegenerateCatalogue> {
    let (a, b) = type3_pair(scene, STRUCT_TOL).ok_or(GeomError::NotType3)?;
    if !confocality_class(&a, &b, STRUCT_TOL)?.is_confocal() {
        return Err(GeomError::NotType3);
    }
    let tangency = tangency_class(&a, &b)?.tag();
    let genus = GenusType::from_tangency(tangency);
    let mut curves = vec![DegenerateCurve::Ta, DegenerateCurve::Tb];
    for line in shared_isotropic_lines(&a, &b)? {
        let (a0, b0) = (a.pole(&line)?, b.pole(&line)?);
        for pair in ["ab", "bc", "cd", "da"] {
            curves.push(DegenerateCurve::Gamma {
                pair: pair.to_string(),
                line,
                a0,
                b0,
            });
        }
    }
    Ok(DegenerateCatalogue {
        tangency,
        genus_ta: genus,
        genus_tb: genus,
        curves,
    })
}

/// The quadrilateral `ABCB` for a given `B ∈ b`, with `A`, `C` the
/// tangency points of the tangents from `B` to `a`. `None` at marked points.
pub fn t_a_quadrilateral(scene: &BilliardScene, b_pt: &ProjPoint) -> Result<Option<QuadOrbit>> {
    let (a, b) = type3_pair(scene, STRUCT_TOL).ok_or(GeomError::NotType3)?;
    if !b.contains(b_pt, 1e-8) {
        return Err(GeomError::PointNotOnConic);
    }
    let tb = b.polar(b_pt)?;
    if is_isotropic(&tb, DEFAULT_TOL) {
        return Ok(None);
    }
    let tangents = tangents_from_point(&a, b_pt)?;
    if tangents.len() != 2 {
        return Ok(None);
    }
    let mut touch: Vec<ProjPoint> = tangents
        .iter()
        .map(|(l, _)| a.pole(l))
        .collect::<Result<_>>()?;
    // deterministic order: smaller imaginary-free y first
    touch.sort_by(|p, q| {
        let key = |p: &ProjPoint| p.affine().map(|(_, y)| (y.re, y.im)).unwrap_or((f64::MAX, 0.0));
        key(p).partial_cmp(&key(q)).unwrap_or(std::cmp::Ordering::Equal)
    });
    let (ap, cp) = (touch[0], touch[1]);
    if tangents.iter().any(|(l, _)| is_isotropic(l, DEFAULT_TOL)) {
        return Ok(None);
    }
    Ok(Some(QuadOrbit::from_parts(
        [ap, *b_pt, cp, *b_pt],
        [a.polar(&ap)?, tb, a.polar(&cp)?, tb],
    )))
}

/// Real slope parameters spread evenly in angle.
fn sample_params(n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let phi = std::f64::consts::PI * ((k as f64 + 0.5) / n as f64 - 0.5);
            r(phi.tan())
        })
        .collect()
}

/// Sample the curve `T_a` at `n` points `B` of `b`; marked points skipped.
#[allow(non_snake_case)]
pub fn sample_T_a(scene: &BilliardScene, n: usize) -> Result<Vec<QuadOrbit>> {
    let b = scene.mirror(1).clone();
    let marked = b.isotropic_tangency_points();
    let pts: Vec<ProjPoint> = sample_params(n)
        .into_iter()
        .filter_map(|t| b.point_at(t).ok())
        .filter(|p| marked.iter().all(|q| q.dist(p) > 1e-4))
        .collect();
    let quads: Vec<Result<Option<QuadOrbit>>> =
        pts.par_iter().map(|p| t_a_quadrilateral(scene, p)).collect();
    let mut out = Vec::new();
    for q in quads {
        if let Some(q) = q? {
            out.push(q);
        }
    }
    Ok(out)
}

/// Quadrilaterals `A₀B₀AB` along a Γ-curve with bijectivity diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaCurve {
    pub line: ProjLine,
    pub a0: ProjPoint,
    pub b0: ProjPoint,
    pub quads: Vec<QuadOrbit>,
    /// Samples discarded because `B` fell onto `B₀` or the law failed.
    pub excluded: usize,
    pub injective_a: bool,
    pub injective_b: bool,
}

fn pairwise_distinct(pts: &[ProjPoint], tol: f64) -> bool {
    pts.iter()
        .enumerate()
        .all(|(i, p)| pts[i + 1..].iter().all(|q| p.dist(q) > tol))
}

/// Residual tolerance for accepting a Γ-curve sample.
const GAMMA_TOL: f64 = 1e-8;

fn gamma_sample(a: &Conic, b: &Conic, line: &ProjLine, a0: &ProjPoint, b0: &ProjPoint, ap: &ProjPoint) -> Result<Option<QuadOrbit>> {
    let ta = a.polar(ap)?;
    if is_isotropic(&ta, DEFAULT_TOL) || ap.dist(a0) <= 1e-6 || ap.dist(b0) <= 1e-9 {
        return Ok(None);
    }
    // edge B₀A reflected at A gives the line carrying B
    let inc = join(b0, ap)?;
    if inc.dist(&ta) <= 1e-9 {
        return Ok(None);
    }
    let l = reflect_line(&inc, &ta, ap)?.line;
    let mut best: Option<QuadOrbit> = None;
    for (bp, _) in crate::conics::intersect_line(b, &l)? {
        if bp.dist(b0) <= 1e-6 || bp.dist(ap) <= 1e-9 {
            continue;
        }
        let q = QuadOrbit::from_parts([*a0, *b0, *ap, bp], [*line, *line, ta, b.polar(&bp)?]);
        let better = best
            .as_ref()
            .is_none_or(|o| q.max_residual() < o.max_residual());
        if better {
            best = Some(q);
        }
    }
    Ok(best.filter(|q| q.max_residual() < GAMMA_TOL))
}

/// Sample the Γ-curve of a shared isotropic tangent line `line`.
pub fn gamma_curve(scene: &BilliardScene, line: &ProjLine, n: usize) -> Result<GammaCurve> {
    let (a, b) = type3_pair(scene, STRUCT_TOL).ok_or(GeomError::NotType3)?;
    if !is_isotropic(line, DEFAULT_TOL) || !a.is_tangent_line(line, 1e-8) || !b.is_tangent_line(line, 1e-8) {
        return Err(GeomError::LineNotSharedTangent);
    }
    let (a0, b0) = (a.pole(line)?, b.pole(line)?);
    let mirror_a = Mirror::Conic(a);
    let samples: Vec<ProjPoint> = sample_params(n)
        .into_iter()
        .filter_map(|t| mirror_a.point_at(t).ok())
        .collect();
    let results: Vec<Result<Option<QuadOrbit>>> = samples
        .par_iter()
        .map(|ap| gamma_sample(&a, &b, line, &a0, &b0, ap))
        .collect();
    let mut quads = Vec::new();
    let mut excluded = 0;
    for q in results {
        match q? {
            Some(q) => quads.push(q),
            None => excluded += 1,
        }
    }
    let pa: Vec<ProjPoint> = quads.iter().map(|q| q.vertices[2]).collect();
    let pb: Vec<ProjPoint> = quads.iter().map(|q| q.vertices[3]).collect();
    Ok(GammaCurve {
        line: *line,
        a0,
        b0,
        injective_a: pairwise_distinct(&pa, 1e-8),
        injective_b: pairwise_distinct(&pb, 1e-8),
        quads,
        excluded,
    })
}
