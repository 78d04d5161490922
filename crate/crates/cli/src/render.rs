//! SVG figures of real scenes and their orbits.

use std::fmt::Write as _;

use billiards_core::conics::RealConicShape;
use billiards_core::orbits::Mirror;
use billiards_core::real_billiards::{RealOrbit, RealScene, ReflectionLaw};

use crate::error::{CliError, Result};
use crate::report::num;

/// Largest allowed distance, in pixels, between a sampled chord and the curve.
const MAX_DEVIATION_PX: f64 = 0.5;
const MAX_DEPTH: u32 = 18;
const MARKER_PX: f64 = 6.0;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderSpec {
    /// `[x0, y0, x1, y1]` in world coordinates.
    pub viewport: [f64; 4],
    pub width: u32,
    pub height: u32,
    pub mirror_strokes: [String; 4],
}

impl RenderSpec {
    /// Height follows the viewport aspect ratio.
    pub fn new(viewport: [f64; 4], width: u32) -> Result<Self> {
        let [x0, y0, x1, y1] = viewport;
        if !(x1 > x0 && y1 > y0) || width == 0 || viewport.iter().any(|v| !v.is_finite()) {
            return Err(CliError::EmptyViewport);
        }
        let height = ((width as f64) * (y1 - y0) / (x1 - x0)).round().max(1.0) as u32;
        Ok(Self {
            viewport,
            width,
            height,
            mirror_strokes: ["#1f4e9c", "#b0401a", "#1f4e9c", "#b0401a"].map(String::from),
        })
    }

    fn to_px(&self, p: (f64, f64)) -> (f64, f64) {
        let [x0, y0, x1, y1] = self.viewport;
        (
            (p.0 - x0) / (x1 - x0) * self.width as f64,
            (y1 - p.1) / (y1 - y0) * self.height as f64,
        )
    }

    /// Viewport grown by a quarter on each side: points beyond are clipped.
    fn inside_margin(&self, p: (f64, f64)) -> bool {
        let [x0, y0, x1, y1] = self.viewport;
        let (mx, my) = ((x1 - x0) * 0.25, (y1 - y0) * 0.25);
        p.0 >= x0 - mx && p.0 <= x1 + mx && p.1 >= y0 - my && p.1 <= y1 + my
    }

    fn diagonal(&self) -> f64 {
        let [x0, y0, x1, y1] = self.viewport;
        (x1 - x0).hypot(y1 - y0)
    }

    fn center(&self) -> (f64, f64) {
        let [x0, y0, x1, y1] = self.viewport;
        ((x0 + x1) / 2.0, (y0 + y1) / 2.0)
    }
}

/// A bounding box around the finite parts of the scene and the orbits.
pub fn auto_viewport(scene: &RealScene, orbits: &[RealOrbit]) -> [f64; 4] {
    let mut pts: Vec<(f64, f64)> = orbits.iter().flat_map(|o| o.points).collect();
    for j in 0..4 {
        match scene.shape(j) {
            Some(RealConicShape::Ellipse { center, axes, .. }) => {
                let r = axes.0.max(axes.1);
                pts.extend([(center.0 - r, center.1 - r), (center.0 + r, center.1 + r)]);
            }
            Some(RealConicShape::Hyperbola { center, axes, .. }) => {
                let r = 3.0 * axes.0.max(axes.1);
                pts.extend([(center.0 - r, center.1 - r), (center.0 + r, center.1 + r)]);
            }
            Some(RealConicShape::Parabola { vertex, p, .. }) => {
                let r = 6.0 * p.abs();
                pts.extend([(vertex.0 - r, vertex.1 - r), (vertex.0 + r, vertex.1 + r)]);
            }
            None => {}
        }
    }
    if pts.is_empty() {
        return [-5.0, -5.0, 5.0, 5.0];
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| pts.iter().map(sel).fold(init, f);
    let (x0, x1) = (fold(f64::min, f64::INFINITY, |p| p.0), fold(f64::max, f64::NEG_INFINITY, |p| p.0));
    let (y0, y1) = (fold(f64::min, f64::INFINITY, |p| p.1), fold(f64::max, f64::NEG_INFINITY, |p| p.1));
    let pad = 0.08 * (x1 - x0).max(y1 - y0).max(1.0);
    [x0 - pad, y0 - pad, x1 + pad, y1 + pad]
}

/// Adaptive sampling of `f` on `[lo, hi]` in pixel space.
fn sample(spec: &RenderSpec, f: &dyn Fn(f64) -> (f64, f64), lo: f64, hi: f64) -> Vec<(f64, (f64, f64))> {
    fn rec(
        spec: &RenderSpec,
        f: &dyn Fn(f64) -> (f64, f64),
        a: (f64, (f64, f64)),
        b: (f64, (f64, f64)),
        depth: u32,
        out: &mut Vec<(f64, (f64, f64))>,
    ) {
        let tm = (a.0 + b.0) / 2.0;
        let m = f(tm);
        let (pa, pb, pm) = (spec.to_px(a.1), spec.to_px(b.1), spec.to_px(m));
        let chord = ((pa.0 + pb.0) / 2.0 - pm.0).hypot((pa.1 + pb.1) / 2.0 - pm.1);
        let both_out = !spec.inside_margin(a.1) && !spec.inside_margin(b.1) && !spec.inside_margin(m);
        if depth < MAX_DEPTH && !both_out && chord > MAX_DEVIATION_PX {
            rec(spec, f, a, (tm, m), depth + 1, out);
            rec(spec, f, (tm, m), b, depth + 1, out);
        } else {
            out.push(b);
        }
    }
    // a coarse pass first so that features narrower than the interval are seen
    let n = 16;
    let mut out = vec![(lo, f(lo))];
    for k in 0..n {
        let a = lo + (hi - lo) * k as f64 / n as f64;
        let b = lo + (hi - lo) * (k + 1) as f64 / n as f64;
        rec(spec, f, (a, f(a)), (b, f(b)), 0, &mut out);
    }
    out
}

/// Path data for sampled points, split where the curve leaves the viewport.
fn path_data(spec: &RenderSpec, pts: &[(f64, (f64, f64))], closed: bool) -> String {
    let mut d = String::new();
    let mut pen_down = false;
    for (_, p) in pts {
        if !spec.inside_margin(*p) {
            pen_down = false;
            continue;
        }
        let (x, y) = spec.to_px(*p);
        let _ = write!(d, "{}{} {} ", if pen_down { "L" } else { "M" }, num(x), num(y));
        pen_down = true;
    }
    if closed && !d.is_empty() {
        d.push('Z');
    }
    d.trim_end().to_string()
}

/// One `d` attribute per real branch of a mirror, plus whether the mirror is
/// a circle `(cx, cy, r)`.
enum Drawn {
    Circle((f64, f64), f64),
    Paths(Vec<String>),
}

fn draw_mirror(spec: &RenderSpec, m: &Mirror, shape: Option<&RealConicShape>) -> Drawn {
    let reach = spec.diagonal() + {
        let c = spec.center();
        c.0.hypot(c.1)
    };
    match shape {
        Some(RealConicShape::Ellipse { center, axes, .. }) if (axes.0 - axes.1).abs() <= 1e-12 * axes.0 => {
            Drawn::Circle(*center, axes.0)
        }
        Some(sh @ RealConicShape::Ellipse { .. }) => {
            let pts = sample(spec, &|t| sh.affine_point(t, 0), 0.0, std::f64::consts::TAU);
            Drawn::Paths(vec![path_data(spec, &pts, true)])
        }
        Some(sh @ RealConicShape::Hyperbola { center, axes, .. }) => {
            let far = reach + center.0.hypot(center.1);
            let t = (far / axes.0.min(axes.1)).max(1.0).acosh() + 0.5;
            Drawn::Paths(
                (0..2)
                    .map(|branch| {
                        let pts = sample(spec, &|s| sh.affine_point(s, branch), -t, t);
                        path_data(spec, &pts, false)
                    })
                    .collect(),
            )
        }
        Some(sh @ RealConicShape::Parabola { vertex, p, .. }) => {
            let far = reach + vertex.0.hypot(vertex.1);
            let t = (2.0 * p.abs() * far).sqrt().max(far);
            let pts = sample(spec, &|s| sh.affine_point(s, 0), -t, t);
            Drawn::Paths(vec![path_data(spec, &pts, false)])
        }
        None => {
            let at = |t: f64| {
                m.point_at(billiards_core::proj_geom::C64::new(t, 0.0))
                    .ok()
                    .and_then(|p| p.affine())
                    .map(|(x, y)| (x.re, y.re))
                    .unwrap_or((f64::NAN, f64::NAN))
            };
            // lines need no refinement; clip with a dense enough straight run
            let n = 64;
            let pts: Vec<(f64, (f64, f64))> = (0..=n)
                .map(|k| {
                    let t = -reach * 2.0 + 4.0 * reach * k as f64 / n as f64;
                    (t, at(t))
                })
                .collect();
            Drawn::Paths(vec![path_data(spec, &pts, false)])
        }
    }
}

/// Render distinct mirrors, orbit quadrilaterals and law markers (solid for
/// usual reflection, hollow for skew).
pub fn render_svg(scene: &RealScene, orbits: &[RealOrbit], spec: &RenderSpec) -> Result<String> {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = spec.width,
        h = spec.height
    );
    let _ = writeln!(s, r#"<rect class="background" x="0" y="0" width="{}" height="{}" fill="white"/>"#, spec.width, spec.height);
    let mut drawn: Vec<&Mirror> = Vec::new();
    for j in 0..4 {
        let m = scene.scene().mirror(j);
        if drawn.iter().any(|d| d.approx_eq(m, 1e-12)) {
            continue;
        }
        drawn.push(m);
        let stroke = &spec.mirror_strokes[j];
        match draw_mirror(spec, m, scene.shape(j)) {
            Drawn::Circle(c, r) => {
                let (cx, cy) = spec.to_px(c);
                let rpx = r / (spec.viewport[2] - spec.viewport[0]) * spec.width as f64;
                let _ = writeln!(
                    s,
                    r#"<circle class="mirror" cx="{}" cy="{}" r="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
                    num(cx),
                    num(cy),
                    num(rpx)
                );
            }
            Drawn::Paths(ds) => {
                for d in ds.into_iter().filter(|d| !d.is_empty()) {
                    let _ = writeln!(
                        s,
                        r#"<path class="mirror" d="{d}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#
                    );
                }
            }
        }
    }
    for o in orbits {
        let pts: Vec<String> = o
            .points
            .iter()
            .map(|&p| {
                let (x, y) = spec.to_px(p);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon class="orbit" points="{}" fill="none" stroke="black" stroke-width="1"/>"#,
            pts.join(" ")
        );
        for (p, law) in o.points.iter().zip(o.signature.0) {
            let (x, y) = spec.to_px(*p);
            let fill = if law == ReflectionLaw::Usual { "black" } else { "none" };
            let class = if law == ReflectionLaw::Usual { "usual" } else { "skew" };
            let _ = writeln!(
                s,
                r#"<rect class="marker {class}" x="{}" y="{}" width="{m}" height="{m}" fill="{fill}" stroke="black"/>"#,
                num(x - MARKER_PX / 2.0),
                num(y - MARKER_PX / 2.0),
                m = num(MARKER_PX)
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
