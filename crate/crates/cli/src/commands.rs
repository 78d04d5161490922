//! Command dispatch: every command turns a loaded scene into report files.

use std::fmt::Write as _;

use billiards_core::classify::{classify_scene, degenerate_catalogue};
use billiards_core::orbits::{extend_orbit, reflectivity_scan, BilliardScene, QuadOrbit, SeedGrid};
use billiards_core::proj_geom::{fmt_c, C64};
use billiards_core::puiseaux::{
    fit_exponent, lemgerm_condition_iv, reflected_azimuth_asymptotics, reflected_azimuth_samples,
    sampling_ladder, tangency_asymptotics, tangent_foot_coefficient, Germ,
};
use billiards_core::real_billiards::{find_real_orbits, law_signature_census, stratified_seeds, RealScene};
use billiards_core::GeomError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};
use crate::render::{auto_viewport, render_svg, RenderSpec};
use crate::report::{num, Report};
use crate::scene_file::{LoadedScene, Options};

/// Seed attempts per requested orbit before `orbit` gives up.
const ORBIT_TRIES: usize = 2000;
/// Seeds per pair of branch arcs when collecting orbits to draw.
const RENDER_SEEDS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Classify,
    Scan,
    Orbit,
    Degenerate,
    Puiseaux,
    Census,
    Render,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Scan => "scan",
            Command::Orbit => "orbit",
            Command::Degenerate => "degenerate",
            Command::Puiseaux => "puiseaux",
            Command::Census => "census",
            Command::Render => "render",
        }
    }
}

/// Command-line values that take precedence over the scene file options.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub viewport: Option<[f64; 4]>,
}

impl Overrides {
    fn apply(&self, o: &Options) -> Result<Options> {
        let out = Options {
            tol: self.tol.unwrap_or(o.tol),
            grid: self.grid.unwrap_or(o.grid),
            seed: self.seed.unwrap_or(o.seed),
            viewport: self.viewport.or(o.viewport),
            ..o.clone()
        };
        if out.tol.is_nan() || out.tol <= 0.0 || out.grid == 0 {
            return Err(CliError::Validation("tol and grid must be positive".into()));
        }
        Ok(out)
    }
}

fn mismatch(cmd: Command, reason: &str) -> CliError {
    CliError::CommandSceneMismatch {
        command: cmd.name().to_string(),
        reason: reason.to_string(),
    }
}

fn need_scene(cmd: Command, loaded: &LoadedScene) -> Result<&BilliardScene> {
    loaded.scene.as_ref().ok_or_else(|| mismatch(cmd, "the file has no mirrors"))
}

fn need_real(cmd: Command, loaded: &LoadedScene) -> Result<&RealScene> {
    loaded
        .real
        .as_ref()
        .ok_or_else(|| mismatch(cmd, "the scene is not a real 4-reflective scene"))
}

/// Run one command; outputs are deterministic for fixed inputs and seed.
pub fn run(cmd: Command, loaded: &LoadedScene, overrides: &Overrides) -> Result<Vec<Report>> {
    let opts = overrides.apply(&loaded.options)?;
    match cmd {
        Command::Classify => {
            let t = classify_scene(need_scene(cmd, loaded)?, opts.tol)?;
            Ok(vec![Report::new("classify.txt", format!("{}\n", t.summary()))])
        }
        Command::Scan => {
            let scan = reflectivity_scan(need_scene(cmd, loaded)?, &SeedGrid::new(opts.grid), opts.tol);
            let summary = format!(
                "fraction_closing,median_residual,degenerate\n{},{},{}\n",
                num(scan.fraction_closing),
                num(scan.median_residual),
                scan.degenerate_count
            );
            Ok(vec![
                Report::new("scan.csv", scan.to_csv()),
                Report::new("scan_summary.csv", summary),
            ])
        }
        Command::Orbit => {
            let scene = need_scene(cmd, loaded)?;
            let orbits = random_orbits(scene, loaded.real.is_some(), &opts);
            Ok(vec![Report::new("orbit.csv", orbit_csv(&orbits))])
        }
        Command::Degenerate => {
            let cat = degenerate_catalogue(need_scene(cmd, loaded)?).map_err(|e| match e {
                GeomError::NotType3 => mismatch(cmd, "the scene is not a confocal conic pair"),
                e => e.into(),
            })?;
            Ok(vec![Report::new("degenerate.txt", cat.to_report())])
        }
        Command::Puiseaux => {
            let (a, b) = loaded.puiseaux.as_ref().ok_or_else(|| mismatch(cmd, "the file has no germs"))?;
            Ok(vec![Report::new("puiseaux.txt", puiseaux_report(a, b, opts.seed)?)])
        }
        Command::Census => {
            let census = law_signature_census(need_real(cmd, loaded)?, opts.census_n)?;
            Ok(vec![Report::new("census.csv", census.to_csv())])
        }
        Command::Render => {
            let real = need_real(cmd, loaded)?;
            let seeds = stratified_seeds(real, RENDER_SEEDS)?;
            let mut orbits = find_real_orbits(real, &seeds, opts.tol);
            orbits.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
            orbits.truncate(opts.orbits);
            let viewport = opts.viewport.unwrap_or_else(|| auto_viewport(real, &orbits));
            let spec = RenderSpec::new(viewport, opts.width)?;
            Ok(vec![Report::new("render.svg", render_svg(real, &orbits, &spec)?)])
        }
    }
}

/// Closing orbits from random seeds on mirrors `a` and `b`; real seeds for
/// real scenes, slightly complex ones otherwise.
fn random_orbits(scene: &BilliardScene, real: bool, opts: &Options) -> Vec<QuadOrbit> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    for _ in 0..ORBIT_TRIES * opts.orbits {
        if out.len() == opts.orbits {
            break;
        }
        let param = |rng: &mut ChaCha8Rng| {
            let im = if real { 0.0 } else { rng.gen_range(0.05..0.3) };
            C64::new(rng.gen_range(-1.7..1.9), im)
        };
        let (ta, tb) = (param(&mut rng), param(&mut rng));
        let (Ok(a), Ok(b)) = (scene.mirror(0).point_at(ta), scene.mirror(1).point_at(tb)) else {
            continue;
        };
        if let Some(o) = extend_orbit(scene, &a, &b, opts.tol).ok().and_then(|v| v.into_iter().next()) {
            out.push(o);
        }
    }
    out
}

fn orbit_csv(orbits: &[QuadOrbit]) -> String {
    let mut s = String::from("orbit,vertex,x_re,x_im,y_re,y_im,z_re,z_im,residual\n");
    for (k, o) in orbits.iter().enumerate() {
        for (j, v) in o.vertices.iter().enumerate() {
            let [x, y, z] = v.coords();
            let _ = writeln!(
                s,
                "{k},{},{},{},{},{},{},{},{}",
                ['A', 'B', 'C', 'D'][j],
                num(x.re),
                num(x.im),
                num(y.re),
                num(y.im),
                num(z.re),
                num(z.im),
                num(o.residuals[j])
            );
        }
    }
    s
}

fn puiseaux_report(a: &Germ, b: &Germ, seed: u64) -> Result<String> {
    let mut s = tangency_asymptotics(a, b)?.to_report();
    let _ = writeln!(s, "condition (iv): {}", lemgerm_condition_iv(a.r, b.r));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ladder = sampling_ladder();
    for (name, g) in [("a", a), ("b", b)] {
        let expect = reflected_azimuth_asymptotics(g);
        let _ = writeln!(
            s,
            "germ {name}: r = {}, tangent foot ratio {}",
            g.r,
            tangent_foot_coefficient(g.r)?
        );
        let _ = match expect.p {
            Some(p) => writeln!(s, "  azimuth ~ {p} sigma x^{}", expect.exponent),
            None => writeln!(s, "  azimuth = O(x^{})", expect.exponent),
        };
        let q = (
            C64::new(rng.gen_range(0.2..1.0), rng.gen_range(-0.3..0.3)),
            C64::new(rng.gen_range(0.2..1.0), rng.gen_range(-0.3..0.3)),
        );
        let fit = fit_exponent(&reflected_azimuth_samples(g, q, &ladder)?)?;
        let _ = writeln!(
            s,
            "  fitted exponent {}, coefficient {}, rms {}",
            num(fit.exponent),
            fmt_c(fit.coefficient),
            num(fit.rms)
        );
    }
    Ok(s)
}
