//! Leading-order asymptotics of curve germs: Newton diagrams of the tangency
//! correspondence, reflected azimuths near isotropic tangency, the tangent
//! foot coefficient and property (I) of polynomial curves.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::orbits::ParamCurve;
use crate::poly::Poly;
use crate::proj_geom::{
    is_isotropic, r, AffineChart, ProjLine, C64, I,
};

/// Where the germ sits relative to the isotropic geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BaseClass {
    /// Finite base point (the tangent is a finite isotropic line).
    Finite,
    /// Infinite, non-isotropic base point; the tangent is the infinity line.
    InfiniteNonIsotropic,
    /// Base point `I₁` or `I₂` with a finite tangent line.
    IsotropicFiniteTangent,
    /// Base point `I₁` or `I₂` tangent to the infinity line.
    IsotropicInfiniteTangent,
}

/// `y = σ xʳ (1 + o(1))` in a chart centred at the base point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Germ {
    pub class: BaseClass,
    pub r: Rational64,
    pub sigma: C64,
}

impl Germ {
    pub fn new(class: BaseClass, r: Rational64, sigma: C64) -> Result<Self> {
        if r <= Rational64::one() {
            return Err(GeomError::InvalidExponent(r.to_string()));
        }
        if sigma.norm() == 0.0 {
            return Err(GeomError::DegenerateInput);
        }
        Ok(Self { class, r, sigma })
    }
}

fn ratio(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn to_f64(q: Rational64) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub type Pt = (Rational64, Rational64);

/// A compact edge of a Newton diagram, from its right end to its left end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: Pt,
    pub to: Pt,
    /// Input points lying on the edge, including the ends.
    pub points: Vec<Pt>,
}

impl Edge {
    pub fn slope(&self) -> Rational64 {
        (self.to.1 - self.from.1) / (self.to.0 - self.from.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonDiagram {
    pub points: Vec<Pt>,
    /// Ordered by increasing slope magnitude.
    pub edges: Vec<Edge>,
}

fn cross(o: Pt, a: Pt, b: Pt) -> Rational64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Compact lower-hull edges of a set of exponent points.
pub fn newton_edges(points: &[Pt]) -> Result<NewtonDiagram> {
    if points.iter().any(|p| p.0.is_negative() || p.1.is_negative()) {
        return Err(GeomError::DegenerateInput);
    }
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 2 {
        return Err(GeomError::DegenerateInput);
    }
    let mut hull: Vec<Pt> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= Rational64::zero() {
            hull.pop();
        }
        hull.push(p);
    }
    let mut edges: Vec<Edge> = hull
        .windows(2)
        .filter(|w| w[1].1 < w[0].1)
        .map(|w| Edge {
            from: w[1],
            to: w[0],
            points: pts
                .iter()
                .copied()
                .filter(|&q| {
                    cross(w[0], w[1], q).is_zero() && q.0 >= w[0].0 && q.0 <= w[1].0
                })
                .collect(),
        })
        .collect();
    edges.reverse();
    Ok(NewtonDiagram {
        points: points.to_vec(),
        edges,
    })
}

/// Which of the three exponent regimes applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsymptoticCase {
    /// `r_a > r_b`: two edges.
    SteeperA,
    /// `r_a = r_b`: one edge through the middle monomial.
    Equal,
    /// `r_a < r_b`: one edge, middle monomial above it.
    SteeperB,
}

/// One asymptotic family `u ≈ c · v^e` of tangency points, with the tangent
/// slope `α ≈ k · v^f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub u_exponent: Rational64,
    /// Auxiliary roots `s` of the defining equation of this branch.
    pub s_values: Vec<C64>,
    /// Leading coefficients `c`, one per `s`.
    pub u_coefficients: Vec<C64>,
    pub alpha_exponent: Rational64,
    pub alpha_coefficients: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyAsymptotics {
    pub case: AsymptoticCase,
    /// `σ` after normalizing germ `b` to `y = x^{r_b}`.
    pub sigma: C64,
    pub diagram: NewtonDiagram,
    pub branches: Vec<Branch>,
}

impl TangencyAsymptotics {
    pub fn to_report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "case: {:?}", self.case);
        let _ = writeln!(s, "sigma: {:.16e} {:+.16e}i", self.sigma.re, self.sigma.im);
        for e in &self.diagram.edges {
            let _ = writeln!(
                s,
                "edge: ({}, {}) - ({}, {})",
                e.from.0, e.from.1, e.to.0, e.to.1
            );
        }
        for (k, b) in self.branches.iter().enumerate() {
            let _ = writeln!(
                s,
                "branch {k}: u ~ c v^{}, alpha ~ k v^{}",
                b.u_exponent, b.alpha_exponent
            );
            for (c, a) in b.u_coefficients.iter().zip(&b.alpha_coefficients) {
                let _ = writeln!(
                    s,
                    "  c = {:.16e} {:+.16e}i, k = {:.16e} {:+.16e}i",
                    c.re, c.im, a.re, a.im
                );
            }
        }
        s
    }
}

/// All solutions of `u^e = w` for rational `e = a/b`, i.e. the `a` roots of
/// `u^a = w^b`.
fn all_powers(w: C64, e: Rational64) -> Vec<C64> {
    let base = w.powf(to_f64(e.recip()));
    let a = (*e.numer()).unsigned_abs().max(1);
    (0..a)
        .map(|k| base * C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / a as f64))
        .collect()
}

/// Roots of `z^n = w`.
fn nth_roots(w: C64, n: i64) -> Vec<C64> {
    let base = w.powf(1.0 / n as f64);
    (0..n)
        .map(|k| base * C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
        .collect()
}

/// Leading asymptotics of the tangency correspondence between two germs
/// tangent at a common point: `v` is the abscissa of a point of `a`, `u` that
/// of a tangency point on `b` of a tangent through it.
pub fn tangency_asymptotics(germ_a: &Germ, germ_b: &Germ) -> Result<TangencyAsymptotics> {
    if germ_a.class != germ_b.class {
        return Err(GeomError::NonTangentGerms);
    }
    let (ra, rb) = (germ_a.r, germ_b.r);
    let sigma = germ_a.sigma / germ_b.sigma;
    let one = Rational64::one();
    let diagram = newton_edges(&[(rb, Rational64::zero()), (rb - one, one), (Rational64::zero(), ra)])?;
    let rbf = to_f64(rb);
    let (case, branches) = if ra > rb {
        // tangent-point balance u^{r_b} ~ u^{r_b−1} v
        let s1 = r(rbf / (rbf - 1.0));
        let b1 = Branch {
            u_exponent: one,
            s_values: vec![s1],
            u_coefficients: vec![s1],
            alpha_exponent: rb - one,
            alpha_coefficients: vec![s1.powf(rbf - 1.0) * rbf],
        };
        // balance u^{r_b−1} v ~ v^{r_a}
        let s2 = all_powers(sigma / rbf, rb - one);
        let b2 = Branch {
            u_exponent: (ra - one) / (rb - one),
            u_coefficients: s2.clone(),
            alpha_coefficients: vec![sigma; s2.len()],
            s_values: s2,
            alpha_exponent: ra - one,
        };
        (AsymptoticCase::SteeperA, vec![b1, b2])
    } else if ra == rb {
        let (p, q) = (*rb.numer(), *rb.denom());
        // s^p (r−1) − r s^{p−q} + σ = 0
        let mut coeffs = vec![r(0.0); p as usize + 1];
        coeffs[p as usize] += r(rbf - 1.0);
        coeffs[(p - q) as usize] += r(-rbf);
        coeffs[0] += sigma;
        let s = Poly::new(coeffs).roots();
        let b = Branch {
            u_exponent: one,
            u_coefficients: s.iter().map(|s| s.powi(q as i32)).collect(),
            alpha_coefficients: s.iter().map(|s| s.powi((p - q) as i32) * rbf).collect(),
            s_values: s,
            alpha_exponent: rb - one,
        };
        (AsymptoticCase::Equal, vec![b])
    } else {
        let (pb, qb) = (*rb.numer(), *rb.denom());
        let s = nth_roots(sigma / (1.0 - rbf), pb);
        let b = Branch {
            u_exponent: ra / rb,
            u_coefficients: s.iter().map(|s| s.powi(qb as i32)).collect(),
            alpha_coefficients: s.iter().map(|s| s.powi((pb - qb) as i32) * rbf).collect(),
            s_values: s,
            alpha_exponent: ra * (rb - one) / rb,
        };
        (AsymptoticCase::SteeperB, vec![b])
    };
    Ok(TangencyAsymptotics {
        case,
        sigma,
        diagram,
        branches,
    })
}

/// Residual of the defining equation of a branch coefficient `s`.
pub fn coefficient_residual(asy: &TangencyAsymptotics, ra: Rational64, rb: Rational64, branch: usize, s: C64) -> f64 {
    let sigma = asy.sigma;
    let rbf = to_f64(rb);
    match (asy.case, branch) {
        (AsymptoticCase::SteeperA, 0) => (s * (rbf - 1.0) - rbf).norm(),
        (AsymptoticCase::SteeperA, _) => {
            // s^{a/b} = σ/r_b on some branch, i.e. s^a = (σ/r_b)^b
            let e = rb - Rational64::one();
            (s.powi(*e.numer() as i32) - (sigma / rbf).powi(*e.denom() as i32)).norm()
        }
        (AsymptoticCase::Equal, _) => {
            let (p, q) = (*rb.numer(), *rb.denom());
            (s.powi(p as i32) * (rbf - 1.0) - s.powi((p - q) as i32) * rbf + sigma).norm()
        }
        (AsymptoticCase::SteeperB, _) => {
            let _ = ra;
            (s.powi(*rb.numer() as i32) - sigma / (1.0 - rbf)).norm()
        }
    }
}

/// Exact tangency equation `(r_b−1) u^{r_b} − r_b u^{r_b−1} v + σ v^{r_a} = 0`
/// solved for `u`; requires an integer `r_b`.
pub fn tangency_equation_roots(ra: Rational64, rb: Rational64, sigma: C64, v: C64) -> Result<Vec<C64>> {
    if !rb.is_integer() || rb <= Rational64::one() {
        return Err(GeomError::InvalidExponent(rb.to_string()));
    }
    let n = rb.to_integer() as usize;
    let mut coeffs = vec![r(0.0); n + 1];
    coeffs[n] = r(n as f64 - 1.0);
    coeffs[n - 1] = -v * n as f64;
    coeffs[0] = sigma * v.powf(to_f64(ra));
    Ok(Poly::new(coeffs).roots())
}

/// Geometric sampling ladder `v = 10⁻²·2⁻ᵏ`, `k = 0..=12`.
pub fn sampling_ladder() -> Vec<f64> {
    sampling_ladder_from(1e-2)
}

/// `v = v0·2⁻ᵏ`, `k = 0..=12`. Fractional branches need a smaller `v0`: their
/// first correction is relative `v^{1/q}`, which biases a fit started at 10⁻².
pub fn sampling_ladder_from(v0: f64) -> Vec<f64> {
    (0..=12).map(|k| v0 * 0.5f64.powi(k)).collect()
}

/// Azimuth asymptotics of lines reflected near an isotropic tangency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AzimuthAsymptotics {
    pub exponent: Rational64,
    /// `az ≈ p σ x^{r−1}`; `None` when only an order bound is known.
    pub p: Option<Rational64>,
}

pub fn reflected_azimuth_asymptotics(germ: &Germ) -> AzimuthAsymptotics {
    let rr = germ.r;
    let one = Rational64::one();
    let two = ratio(2, 1);
    match germ.class {
        BaseClass::Finite => AzimuthAsymptotics {
            exponent: two * (rr - one),
            p: None,
        },
        BaseClass::InfiniteNonIsotropic => AzimuthAsymptotics {
            exponent: rr - one,
            p: Some(rr / two),
        },
        BaseClass::IsotropicFiniteTangent => AzimuthAsymptotics {
            exponent: rr - one,
            p: Some(one),
        },
        BaseClass::IsotropicInfiniteTangent => AzimuthAsymptotics {
            exponent: rr - one,
            p: Some(rr * rr / (two * rr - one)),
        },
    }
}

/// Chart centred at the base point with the tangent line as `X`-axis.
pub fn germ_chart(class: BaseClass) -> AffineChart {
    let z = r(0.0);
    let o = r(1.0);
    let h = r(0.5);
    let hi = r(1.0) / (I * 2.0);
    // columns: X-infinite point, Y-infinite point, origin
    let m = match class {
        BaseClass::Finite => Matrix3::new(o, o, z, I, -I, z, z, z, o),
        BaseClass::InfiniteNonIsotropic => Matrix3::new(o, z, z, z, z, o, z, o, z),
        BaseClass::IsotropicFiniteTangent => Matrix3::new(z, h, h, z, hi, -hi, o, z, z),
        BaseClass::IsotropicInfiniteTangent => Matrix3::new(h, z, h, hi, z, -hi, z, o, z),
    };
    AffineChart::from_frame(m).expect("germ charts are non-degenerate")
}

/// Exact Gaussian rationals for the azimuth oracle.
type Gq = num_complex::Complex<BigRational>;

fn exact(z: C64) -> Gq {
    let f = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::zero);
    Gq::new(f(z.re), f(z.im))
}

fn inexact(z: &Gq) -> C64 {
    C64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

fn gpow(z: &Gq, n: i64) -> Gq {
    (0..n).fold(Gq::one(), |acc, _| acc * z)
}

fn gcross(a: &[Gq; 3], b: &[Gq; 3]) -> [Gq; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn gmul(m: &[[Gq; 3]; 3], v: &[Gq; 3]) -> [Gq; 3] {
    std::array::from_fn(|i| &m[i][0] * &v[0] + &m[i][1] * &v[1] + &m[i][2] * &v[2])
}

/// Reflect the lines through a germ point and a fixed point `q` (chart
/// coordinates) about the tangent at the germ point, for germ abscissae near
/// `xs`; returns `(x, az)` pairs in the germ chart.
///
/// The germ is sampled as `(τ^q, σ τ^p)` with `r = p/q`, and everything after
/// that is exact arithmetic: the reflected azimuth decays like `x^{2(r−1)}`,
/// far below double roundoff of the intermediate lines.
pub fn reflected_azimuth_samples(germ: &Germ, q: (C64, C64), xs: &[f64]) -> Result<Vec<(C64, C64)>> {
    let chart = germ_chart(germ.class);
    let f = chart.frame();
    let fm: [[Gq; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| exact(f[(i, j)])));
    let ft: [[Gq; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| fm[j][i].clone()));
    let (pn, qd) = (*germ.r.numer(), *germ.r.denom());
    let sigma = exact(germ.sigma);
    let two = Gq::from(BigRational::from_integer(2.into()));
    let fixed = gmul(&fm, &[exact(q.0), exact(q.1), Gq::one()]);
    xs.iter()
        .map(|&x| {
            let tau = exact(r(x.powf(1.0 / qd as f64)));
            let cx = gpow(&tau, qd);
            let cy = &sigma * gpow(&tau, pn);
            let p = gmul(&fm, &[cx.clone(), cy, Gq::one()]);
            let slope = &sigma * Gq::from(BigRational::from_integer(pn.into()))
                / Gq::from(BigRational::from_integer(qd.into()))
                * gpow(&tau, pn - qd);
            let dir = gmul(&fm, &[Gq::one(), slope, Gq::zero()]);
            let t = gcross(&p, &dir);
            let l = gcross(&p, &fixed);
            let norm = &t[0] * &t[0] + &t[1] * &t[1];
            if norm.is_zero() {
                return Err(GeomError::IsotropicMirror);
            }
            // symmetry acts on lines by its transpose: l ↦ |n|² l − 2 (n·l) t
            let nl = &t[0] * &l[0] + &t[1] * &l[1];
            let refl: [Gq; 3] = std::array::from_fn(|i| &norm * &l[i] - &two * &nl * &t[i]);
            let c = gmul(&ft, &refl);
            if c[1].is_zero() {
                return Err(GeomError::LineAtInfinity);
            }
            let az = -(&c[0] / &c[1]);
            Ok((inexact(&cx), inexact(&az)))
        })
        .collect()
}

/// Result of a log-log power-law fit `|u| ≈ |c| |v|^e`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub coefficient: C64,
    pub rms: f64,
    pub reliable: bool,
}

/// Fits with a log residual rms above this are flagged unreliable.
const FIT_RMS_LIMIT: f64 = 0.05;

pub fn fit_exponent(samples: &[(C64, C64)]) -> Result<ExponentFit> {
    let good: Vec<(C64, C64)> = samples
        .iter()
        .copied()
        .filter(|(v, u)| v.norm() > 0.0 && u.norm() > 0.0)
        .collect();
    if good.len() < 4 {
        return Err(GeomError::InsufficientSamples {
            needed: 4,
            got: good.len(),
        });
    }
    let xs: Vec<f64> = good.iter().map(|(v, _)| v.norm().ln()).collect();
    let ys: Vec<f64> = good.iter().map(|(_, u)| u.norm().ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(GeomError::DegenerateInput);
    }
    let e = sxy / sxx;
    let b = my - e * mx;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (e * x + b)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let (v, u) = good
        .iter()
        .min_by(|a, b| a.0.norm().total_cmp(&b.0.norm()))
        .copied()
        .unwrap();
    Ok(ExponentFit {
        exponent: e,
        coefficient: u / v.powf(e),
        rms,
        reliable: rms <= FIT_RMS_LIMIT,
    })
}

/// `x(P_t)/x(t)` in the limit, `P_t` the foot of the tangent on the tangent
/// line at the base point.
pub fn tangent_foot_coefficient(rr: Rational64) -> Result<Rational64> {
    if rr <= Rational64::one() {
        return Err(GeomError::InvalidExponent(rr.to_string()));
    }
    Ok((rr - Rational64::one()) / rr)
}

/// `r_b (2 − r_a) < r_a`.
pub fn lemgerm_condition_iv(ra: Rational64, rb: Rational64) -> bool {
    rb * (ratio(2, 1) - ra) < ra
}

/// One isotropic tangent line found by [`property_i_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentReport {
    /// Parameter of the tangency; `None` for the point at `t = ∞`.
    pub param: Option<C64>,
    pub line: ProjLine,
    pub multiplicity: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyIReport {
    pub holds: bool,
    pub tangents: Vec<TangentReport>,
}

/// Homogeneous coordinates of the curve in the parameter `s = 1/t`, as
/// polynomials in `s`.
fn at_infinity(curve: &ParamCurve, degree: usize) -> [Poly; 3] {
    let (x, y) = curve.euclidean_polys();
    let flip = |p: &Poly| {
        let mut c = vec![r(0.0); degree + 1];
        for (k, &a) in p.coeffs().iter().enumerate() {
            if k <= degree {
                c[degree - k] = a;
            }
        }
        Poly::new(c)
    };
    let mut w = vec![r(0.0); degree + 1];
    w[degree] = r(1.0);
    [flip(&x), flip(&y), Poly::new(w)]
}

fn nth_derivative(p: &Poly, k: usize) -> Poly {
    (0..k).fold(p.clone(), |acc, _| acc.derivative())
}

/// Tangent line from homogeneous polynomial coordinates at parameter `s0`.
fn tangent_of_homogeneous(h: &[Poly; 3], s0: C64, degree: usize) -> Option<ProjLine> {
    let p0 = Vector3::new(h[0].eval(s0), h[1].eval(s0), h[2].eval(s0));
    for k in 1..=degree {
        let d = Vector3::new(
            nth_derivative(&h[0], k).eval(s0),
            nth_derivative(&h[1], k).eval(s0),
            nth_derivative(&h[2], k).eval(s0),
        );
        let l = p0.cross(&d);
        if l.norm() > 1e-10 * (1.0 + p0.norm() * d.norm()) {
            return ProjLine::from_vector(&l).ok();
        }
    }
    None
}

/// Check property (I): every isotropic tangent line meets the curve only at
/// its tangency parameter, with multiplicity `degree`.
pub fn property_i_check(curve: &ParamCurve, degree: usize, tol: f64) -> Result<PropertyIReport> {
    let (x, y) = curve.euclidean_polys();
    if curve.degree() < 2 || degree < 2 {
        return Err(GeomError::NonAlgebraicInput);
    }
    let (dx, dy) = (x.derivative(), y.derivative());
    let mut params: Vec<C64> = Vec::new();
    for sign in [I, -I] {
        let g = &dx + &dy.scale(sign);
        if g.is_zero(1e-14) {
            continue;
        }
        for t in g.roots() {
            if !params.iter().any(|s| (s - t).norm() < 1e-5 * (1.0 + t.norm())) {
                params.push(t);
            }
        }
    }
    let mut tangents = Vec::new();
    for t in params {
        let line = curve.tangent(t)?;
        if !is_isotropic(&line, 1e-7) {
            continue;
        }
        let [u, v, w] = line.coeffs();
        let g = &(&x.scale(u) + &y.scale(v)) + &Poly::constant(w);
        let multiplicity = g.multiplicity_at(t, tol);
        tangents.push(TangentReport {
            param: Some(t),
            line,
            multiplicity,
            holds: multiplicity == degree,
        });
    }
    let h = at_infinity(curve, degree);
    if let Some(line) = tangent_of_homogeneous(&h, r(0.0), degree) {
        if is_isotropic(&line, 1e-9) {
            let [u, v, w] = line.coeffs();
            let g = &(&h[0].scale(u) + &h[1].scale(v)) + &h[2].scale(w);
            let multiplicity = g.multiplicity_at(r(0.0), tol);
            tangents.push(TangentReport {
                param: None,
                line,
                multiplicity,
                holds: multiplicity == degree,
            });
        }
    }
    Ok(PropertyIReport {
        holds: tangents.iter().all(|t| t.holds),
        tangents,
    })
}
