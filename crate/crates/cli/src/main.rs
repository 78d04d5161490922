use std::path::PathBuf;
use std::process::ExitCode;

use billiards_cli::{load_scene, run, Command, Overrides};
use clap::Parser;

/// Verify and explore 4-reflective complex billiard scenes.
#[derive(Debug, Parser)]
#[command(name = "billiards", version)]
struct Args {
    command: Command,
    /// Scene file (JSON).
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report files; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Path of the SVG figure (render only).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// World bounding box `x0,y0,x1,y1`.
    #[arg(long, value_parser = parse_viewport, allow_hyphen_values = true)]
    viewport: Option<[f64; 4]>,
}

fn parse_viewport(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "expected four comma-separated numbers".to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(args: &Args) -> billiards_cli::Result<()> {
    let loaded = load_scene(&args.scene)?;
    let overrides = Overrides {
        tol: args.tol,
        grid: args.grid,
        seed: args.seed,
        viewport: args.viewport,
    };
    let reports = run(args.command, &loaded, &overrides)?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
    }
    for r in reports {
        let is_svg = r.name.ends_with(".svg");
        match (&args.svg, &args.out) {
            (Some(path), _) if is_svg => std::fs::write(path, &r.contents)?,
            (_, Some(dir)) => std::fs::write(dir.join(&r.name), &r.contents)?,
            _ => print!("{}", r.contents),
        }
    }
    Ok(())
}
