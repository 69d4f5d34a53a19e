//! Command-line surface: tessellation pipelines, oracle verification,
//! orbit experiments, fixtures, and SVG rendering.

pub mod files;
pub mod render;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::delaunay::delaunay_tessellation;
use crate::hull::HullOptions;
use crate::orbit;
use crate::scalar::rat;
use crate::voronoi::geometric_dual;
use files::*;
use render::{render_svg, Overlay, RenderModel};

#[derive(Parser, Debug)]
#[command(name = "hypertess", version, about = "Delaunay and Voronoi tessellations of hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ModeFlag {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum RenderModelFlag {
    Poincare,
    Halfplane,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    /// Input point-set file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Arithmetic mode: exact rationals or floating point.
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeFlag,
    /// Shorthand for `--mode exact`.
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Shorthand for `--mode float`.
    #[arg(long)]
    float: bool,
    /// Float-mode comparison epsilon override.
    #[arg(long)]
    eps: Option<f64>,
    /// Hull insertion-order seed.
    #[arg(long, default_value = "0")]
    seed: u64,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
}

impl PipelineArgs {
    fn exact_mode(&self) -> bool {
        if self.float {
            false
        } else if self.exact {
            true
        } else {
            self.mode == ModeFlag::Exact
        }
    }

    fn hull_options(&self) -> HullOptions {
        let mut o = HullOptions { seed: self.seed, ..HullOptions::default() };
        if let Some(e) = self.eps {
            o.eps_visible = e;
            o.eps_merge = e;
        }
        o
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the Delaunay tessellation of a point set.
    Delaunay(PipelineArgs),
    /// Compute the Voronoi tessellation (as duals of the Delaunay cells).
    Voronoi(PipelineArgs),
    /// Compute the geometric-dual subcomplex.
    Dual(PipelineArgs),
    /// Run the brute-force oracle corpus; exits nonzero on any mismatch.
    Verify {
        #[arg(long, default_value = "500")]
        instances: usize,
        #[arg(long, default_value = "4")]
        min_sites: usize,
        #[arg(long, default_value = "12")]
        max_sites: usize,
        #[arg(long, default_value = "2024")]
        seed: u64,
        /// Membership-oracle samples per instance (0 disables).
        #[arg(long, default_value = "0")]
        samples: usize,
    },
    /// Truncated-orbit experiment with invariance and cusp diagnostics.
    Orbit {
        #[arg(long)]
        group: PathBuf,
        /// Override the group file's word-length bound.
        #[arg(long)]
        max_word_length: Option<usize>,
        #[arg(long, default_value = "0")]
        seed: u64,
        /// Report output path.
        #[arg(long)]
        out: PathBuf,
        /// Optional tessellation output path.
        #[arg(long)]
        tess_out: Option<PathBuf>,
    },
    /// Generate fixture point sets.
    Fixture {
        #[command(subcommand)]
        which: FixtureCommand,
    },
    /// Render a 2-dimensional tessellation file to SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "poincare")]
        render_model: RenderModelFlag,
        /// Optional dual file for a Voronoi overlay.
        #[arg(long)]
        overlay: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum FixtureCommand {
    /// The pathological sequence on shrinking circles through i.
    BadExample {
        #[arg(long, default_value = "1.25")]
        r_inf: f64,
        #[arg(long, default_value = "8")]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// The three-point sweep: metric, horospherical or equidistant.
    ThreePoint {
        #[arg(long, value_parser = ["left", "middle", "right"])]
        config: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Entry point: returns the process exit code (0 success, 1 verification
/// mismatch, 2 parse/usage failure).
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with success-style errors
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let data = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&data).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let mut data = serde_json::to_string_pretty(value)
        .map_err(|e| format!("serialization failed: {e}"))?;
    data.push('\n');
    std::fs::write(path, data).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Delaunay(args) => {
            let points: PointSetFile = read_json(&args.input)?;
            let file = if args.exact_mode() {
                let sites = load_sites(&points, parse_scalar_exact)?;
                let tess = delaunay_tessellation(&sites, &args.hull_options())
                    .map_err(|e| e.to_string())?;
                tessellation_to_file(&tess, args.seed)
            } else {
                let sites = load_sites(&points, parse_scalar_float)?;
                let tess = delaunay_tessellation(&sites, &args.hull_options())
                    .map_err(|e| e.to_string())?;
                tessellation_to_file(&tess, args.seed)
            };
            write_json(&args.out, &file)?;
            println!("wrote {} ({} cells)", args.out.display(), file.cells.len());
            Ok(0)
        }
        Command::Voronoi(args) | Command::Dual(args) => {
            if !args.exact_mode() {
                return Err("voronoi/dual computation requires exact mode".into());
            }
            let points: PointSetFile = read_json(&args.input)?;
            let sites = load_sites(&points, parse_scalar_exact)?;
            let tess = delaunay_tessellation(&sites, &args.hull_options())
                .map_err(|e| e.to_string())?;
            let dual = geometric_dual(&tess);
            let file = dual_to_file(&dual, args.seed);
            write_json(&args.out, &file)?;
            println!(
                "wrote {} ({} voronoi cells, {} dual pairs)",
                args.out.display(),
                file.cells.len(),
                file.pairs.len()
            );
            Ok(0)
        }
        Command::Verify { instances, min_sites, max_sites, seed, samples } => {
            let report =
                crate::verify::run_corpus(instances, (min_sites, max_sites), seed, samples);
            println!(
                "verify: {} instances | delaunay mismatches: {} | dual mismatches: {} | \
                 contravariance violations: {} | membership mismatches: {}",
                report.instances,
                report.delaunay_mismatches,
                report.dual_mismatches,
                report.contravariance_violations,
                report.membership_mismatches
            );
            for d in report.details.iter().take(20) {
                println!("  {d}");
            }
            Ok(if report.ok() { 0 } else { 1 })
        }
        Command::Orbit { group, max_word_length, seed, out, tess_out } => {
            let gf: GroupFile = read_json(&group)?;
            let (gens, bases) = load_group(&gf)?;
            let l = max_word_length.unwrap_or(gf.max_word_length);
            let opts = HullOptions { seed, ..HullOptions::default() };

            let run_at = |len: usize| -> Result<
                (orbit::OrbitSet, crate::delaunay::Tessellation<crate::scalar::Rat>),
                String,
            > {
                let ob = orbit::orbit_ball(&gens, &bases, len);
                let tess =
                    delaunay_tessellation(&ob.points, &opts).map_err(|e| e.to_string())?;
                Ok((ob, tess))
            };

            let (ob, tess) = run_at(l)?;
            let report = orbit::invariance_report(&tess, &ob, &gens);
            let stabilized = if l >= 1 {
                let (ob_prev, tess_prev) = run_at(l - 1)?;
                let prev = orbit::invariance_report(&tess_prev, &ob_prev, &gens);
                Some(prev.orbit_counts == report.orbit_counts)
            } else {
                None
            };
            // cusp trend across the last three lengths
            let mut cusp_reports = Vec::new();
            let mut cusp_norms = Vec::new();
            for len in l.saturating_sub(2)..=l {
                let (ob_k, tess_k) = run_at(len)?;
                let cr = orbit::cusp_cell_diagnostic(&tess_k, &ob_k);
                if let Some((m, _)) = cr.min_nonzero_norm() {
                    cusp_norms.push((len, m));
                }
                cusp_reports.push(cr);
            }
            let (_, monotone) = orbit::cusp_trend(&cusp_reports);
            // the approached light-like direction: an exactly horospherical
            // cell's normal when one exists, else the tightest ring cell's
            let direction = cusp_reports.last().and_then(|r| {
                r.horospherical_cells()
                    .next()
                    .map(|c| c.direction.clone())
                    .or_else(|| r.min_nonzero_norm().map(|(_, d)| d))
            });

            let file = orbit_report_file(&ob, &report, stabilized, cusp_norms, monotone, direction);
            write_json(&out, &file)?;
            println!(
                "orbit: {} points, {} interior cells, orbit counts {:?}, \
                 equivariance violations {}, cusp monotone: {}",
                file.point_count,
                file.interior_cells,
                file.orbit_counts,
                file.equivariance_violations,
                file.cusp_monotone_decreasing
            );
            if let Some(path) = tess_out {
                write_json(&path, &tessellation_to_file(&tess, seed))?;
            }
            Ok(0)
        }
        Command::Fixture { which } => match which {
            FixtureCommand::BadExample { r_inf, n, out } => {
                let pts = orbit::bad_example_points(r_inf, n).map_err(|e| e.to_string())?;
                // emit the upper half-plane coordinates directly
                let mut coords = Vec::with_capacity(pts.len());
                coords.push(vec!["0".to_string(), "1".to_string()]);
                for k in 1..=n {
                    let r = r_inf + 1.0 / k as f64;
                    let c = 1.0 - r;
                    let y = 1.0 / (k as f64 + 1.0);
                    let x = (r * r - (y - c) * (y - c)).sqrt();
                    coords.push(vec![format!("{x:.17}"), format!("{y:.17}")]);
                    coords.push(vec![format!("{:.17}", -x), format!("{y:.17}")]);
                }
                let file = PointSetFile { model: "halfplane".into(), dim: 2, points: coords };
                write_json(&out, &file)?;
                println!("wrote {} ({} points)", out.display(), file.points.len());
                Ok(0)
            }
            FixtureCommand::ThreePoint { config, out } => {
                let (a, b) = match config.as_str() {
                    "left" => (rat(1, 1), rat(1, 2)),
                    "middle" => (rat(1, 2), rat(1, 1)),
                    _ => (rat(1, 5), rat(11, 10)),
                };
                let pts = vec![
                    vec!["1".into(), "0".into(), "0".into()],
                    vec!["3/2".into(), a.to_string(), b.to_string()],
                    vec!["3/2".into(), a.to_string(), (-b).to_string()],
                ];
                let file = PointSetFile { model: "hyperboloid".into(), dim: 2, points: pts };
                write_json(&out, &file)?;
                println!("wrote {} ({} points)", out.display(), file.points.len());
                Ok(0)
            }
        },
        Command::Render { input, render_model, overlay, out } => {
            let tess: TessellationFile = read_json(&input)?;
            let model = match render_model {
                RenderModelFlag::Poincare => RenderModel::Poincare,
                RenderModelFlag::Halfplane => RenderModel::Halfplane,
            };
            let ov = match overlay {
                None => None,
                Some(path) => {
                    let dual: DualFile = read_json(&path)?;
                    Some(overlay_from_dual(&dual)?)
                }
            };
            let svg = render_svg(&tess, model, ov.as_ref()).map_err(|e| e.to_string())?;
            std::fs::write(&out, svg).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(0)
        }
    }
}

fn overlay_from_dual(dual: &DualFile) -> Result<Overlay, String> {
    let mut ov = Overlay::default();
    for c in &dual.cells {
        if c.site_ids.len() == 2 {
            ov.bisector_pairs.push((c.site_ids[0], c.site_ids[1]));
        }
        if c.dim == 0 {
            let w: Result<Vec<f64>, String> =
                c.witness.iter().map(|s| parse_scalar_float(s)).collect();
            let w = w?;
            let q = (-(-w[0] * w[0] + w[1] * w[1] + w[2] * w[2])).sqrt();
            ov.vertices.push(w.into_iter().map(|v| v / q).collect());
        }
    }
    Ok(ov)
}
