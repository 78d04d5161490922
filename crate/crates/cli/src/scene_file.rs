//! Versioned JSON scene files.

use std::path::Path;

use billiards_core::conics::{confocal_family_real, Conic, RealConicKind, RealFamily};
use billiards_core::orbits::{build_scene, line_at_angle, BilliardScene, CurveFrame, Mirror, ParamCurve, SceneSpec};
use billiards_core::poly::Poly;
use billiards_core::proj_geom::{ProjLine, C64};
use billiards_core::puiseaux::{BaseClass, Germ};
use billiards_core::real_billiards::RealScene;
use billiards_core::GeomError;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const VERSION: u32 = 1;

/// A complex number as `[re, im]`.
pub type Cx = [f64; 2];

fn cx(z: Cx) -> C64 {
    C64::new(z[0], z[1])
}

fn from_c(z: C64) -> Cx {
    [z.re, z.im]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MirrorSpec {
    /// `u x + v y + w = 0`.
    Line { coeffs: [Cx; 3] },
    /// Upper-triangular matrix entries `m00, m01, m02, m11, m12, m22`.
    Conic { upper: [Cx; 6] },
    /// Polynomial curve, ascending coefficients.
    Param {
        x: Vec<Cx>,
        y: Vec<Cx>,
        #[serde(default)]
        isotropic: bool,
    },
}

impl MirrorSpec {
    pub fn to_mirror(&self) -> Result<Mirror> {
        let m = match self {
            MirrorSpec::Line { coeffs } => {
                let l = ProjLine::new(cx(coeffs[0]), cx(coeffs[1]), cx(coeffs[2]))?;
                Mirror::line(l).map_err(|e| match e {
                    GeomError::IsotropicMirror => CliError::Validation("a line mirror is isotropic".into()),
                    GeomError::InfinityMirror => CliError::Validation("a line mirror is the infinity line".into()),
                    e => e.into(),
                })?
            }
            MirrorSpec::Conic { upper } => {
                let c = Conic::from_upper(upper.map(cx))?;
                Mirror::conic(c).map_err(|e| CliError::Validation(format!("conic mirror: {e}")))?
            }
            MirrorSpec::Param { x, y, isotropic } => {
                let poly = |c: &[Cx]| Poly::new(c.iter().copied().map(cx).collect());
                let frame = if *isotropic {
                    CurveFrame::Isotropic
                } else {
                    CurveFrame::Euclidean
                };
                Mirror::Param(ParamCurve::new(poly(x), poly(y), frame)?)
            }
        };
        Ok(m)
    }

    pub fn from_mirror(m: &Mirror) -> Self {
        match m {
            Mirror::Line(l) => MirrorSpec::Line {
                coeffs: l.coeffs().map(from_c),
            },
            Mirror::Conic(c) => MirrorSpec::Conic {
                upper: c.upper().map(from_c),
            },
            Mirror::Param(p) => MirrorSpec::Param {
                x: p.x.coeffs().iter().copied().map(from_c).collect(),
                y: p.y.coeffs().iter().copied().map(from_c).collect(),
                isotropic: p.frame == CurveFrame::Isotropic,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Type1Spec {
    /// Real axis `[u, v, w]`.
    pub axis: [f64; 3],
    pub curve_b: MirrorSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Type2Spec {
    #[serde(default)]
    pub center: [f64; 2],
    pub angles_deg: [f64; 2],
    pub rot_deg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Type3Spec {
    Central(CentralSpec),
    Parabolic(ParabolicSpec),
}

/// Confocal central conics with foci `center ± foci`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralSpec {
    pub foci: [f64; 2],
    #[serde(default)]
    pub center: [f64; 2],
    pub lambdas: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParabolicSpec {
    pub focus: [f64; 2],
    pub axis: [f64; 2],
    pub lambdas: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GermSpec {
    pub class: BaseClass,
    /// Exponent as `"p/q"` or `"p"`.
    pub r: String,
    pub sigma: Cx,
}

impl GermSpec {
    pub fn to_germ(&self) -> Result<Germ> {
        let r: Rational64 = self
            .r
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("exponent `{}` is not a rational", self.r)))?;
        Ok(Germ::new(self.class, r, cx(self.sigma))?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuiseauxSpec {
    pub germ_a: GermSpec,
    pub germ_b: GermSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_census")]
    pub census_n: usize,
    #[serde(default = "default_orbits")]
    pub orbits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viewport: Option<[f64; 4]>,
    #[serde(default = "default_width")]
    pub width: u32,
}

fn default_tol() -> f64 {
    1e-8
}
fn default_grid() -> usize {
    20
}
fn default_census() -> usize {
    400
}
fn default_orbits() -> usize {
    1
}
fn default_width() -> u32 {
    800
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            grid: default_grid(),
            seed: 0,
            census_n: default_census(),
            orbits: default_orbits(),
            viewport: None,
            width: default_width(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirrors: Option<Vec<MirrorSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type1: Option<Type1Spec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type2: Option<Type2Spec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type3: Option<Type3Spec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub puiseaux: Option<PuiseauxSpec>,
    #[serde(default)]
    pub options: Options,
}

/// A validated scene file.
#[derive(Clone, Debug)]
pub struct LoadedScene {
    pub scene: Option<BilliardScene>,
    /// Present when every mirror is real.
    pub real: Option<RealScene>,
    pub puiseaux: Option<(Germ, Germ)>,
    pub options: Options,
}

impl SceneFile {
    /// Explicit mirror list for a scene.
    pub fn from_scene(scene: &BilliardScene) -> Self {
        Self {
            version: VERSION,
            mirrors: Some((0..4).map(|j| MirrorSpec::from_mirror(scene.mirror(j))).collect()),
            type1: None,
            type2: None,
            type3: None,
            puiseaux: None,
            options: Options::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene files serialize")
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn build(&self) -> Result<Option<BilliardScene>> {
        let given = [
            self.mirrors.is_some(),
            self.type1.is_some(),
            self.type2.is_some(),
            self.type3.is_some(),
        ];
        match given.iter().filter(|g| **g).count() {
            0 => return Ok(None),
            1 => {}
            _ => {
                return Err(CliError::Validation(
                    "give exactly one of mirrors, type1, type2, type3".into(),
                ))
            }
        }
        let invalid = |e: GeomError| match e {
            GeomError::InvalidSpec(m) => CliError::Validation(m),
            e => CliError::Validation(e.to_string()),
        };
        if let Some(ms) = &self.mirrors {
            let ms: Vec<Mirror> = ms.iter().map(MirrorSpec::to_mirror).collect::<Result<_>>()?;
            let ms: [Mirror; 4] = ms
                .try_into()
                .map_err(|v: Vec<Mirror>| CliError::Validation(format!("expected 4 mirrors, found {}", v.len())))?;
            return Ok(Some(BilliardScene::new(ms).map_err(invalid)?));
        }
        let spec = if let Some(t) = &self.type1 {
            let [u, v, w] = t.axis;
            let axis = ProjLine::real(u, v, w).map_err(invalid)?;
            SceneSpec::Type1 {
                axis,
                curve_b: t.curve_b.to_mirror()?,
            }
        } else if let Some(t) = &self.type2 {
            // validates the center early
            line_at_angle((t.center[0], t.center[1]), 0.0).map_err(invalid)?;
            SceneSpec::Type2 {
                center: (t.center[0], t.center[1]),
                theta_a: t.angles_deg[0].to_radians(),
                theta_b: t.angles_deg[1].to_radians(),
                theta_rot: t.rot_deg.to_radians(),
            }
        } else if let Some(t) = &self.type3 {
            let (family, lambdas) = match t {
                Type3Spec::Central(c) => (
                    RealFamily::Central {
                        center: (c.center[0], c.center[1]),
                        focus: (c.foci[0], c.foci[1]),
                    },
                    c.lambdas,
                ),
                Type3Spec::Parabolic(p) => (
                    RealFamily::Parabolic {
                        focus: (p.focus[0], p.focus[1]),
                        axis: (p.axis[0], p.axis[1]),
                    },
                    p.lambdas,
                ),
            };
            let member = |l: f64| -> Result<Conic> {
                let kind: RealConicKind = family
                    .kind_at(l)
                    .ok_or_else(|| CliError::Validation(format!("lambda {l} gives no real conic")))?;
                confocal_family_real(kind, &family, l).map_err(invalid)
            };
            SceneSpec::Type3 {
                a: member(lambdas[0])?,
                b: member(lambdas[1])?,
            }
        } else {
            unreachable!("one construction is present")
        };
        Ok(Some(build_scene(&spec).map_err(invalid)?))
    }

    pub fn load(&self) -> Result<LoadedScene> {
        if self.version != VERSION {
            return Err(CliError::Validation(format!(
                "unsupported version {} (expected {VERSION})",
                self.version
            )));
        }
        let o = &self.options;
        if o.tol.is_nan() || o.tol <= 0.0 || o.grid == 0 || o.width == 0 {
            return Err(CliError::Validation("options: tol, grid and width must be positive".into()));
        }
        let scene = self.build()?;
        let puiseaux = match &self.puiseaux {
            Some(p) => Some((p.germ_a.to_germ()?, p.germ_b.to_germ()?)),
            None => None,
        };
        if scene.is_none() && puiseaux.is_none() {
            return Err(CliError::Validation("the file describes neither mirrors nor germs".into()));
        }
        let real = scene.as_ref().and_then(|s| {
            let ms: [Mirror; 4] = std::array::from_fn(|j| s.mirror(j).clone());
            RealScene::new(ms).ok()
        });
        Ok(LoadedScene {
            scene,
            real,
            puiseaux,
            options: self.options.clone(),
        })
    }
}

pub fn load_scene(path: &Path) -> Result<LoadedScene> {
    let text = std::fs::read_to_string(path)?;
    SceneFile::parse(&text)?.load()
}
