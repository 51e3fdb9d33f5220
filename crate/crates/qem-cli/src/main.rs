//! Scenario-driven command-line front end for magnetic-noise simulations.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qem::greens::{magnetic_green_tensor, Scene};
use qem::layered::LayeredStack;
use qem::mesh::{load_mesh, Material, MeshFormat};
use qem::Vec3;

use config::ScenarioConfig;

const EXIT_VALIDATION: u8 = 1;
const EXIT_COMPUTE: u8 = 2;

#[derive(Parser)]
#[command(name = "qem", version, about = "Magnetic-noise simulations near nanostructured conductors")]
struct Cli {
    /// Worker threads (1 gives byte-reproducible outputs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write CSV/JSON outputs.
    Run {
        config: PathBuf,
        /// Output directory (default: alongside the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a mesh file and report all invariant violations.
    ValidateMesh {
        file: PathBuf,
        #[arg(long, value_parser = parse_format, default_value = "qem-ascii")]
        format: MeshFormat,
    },
    /// Print one reflected magnetic Green tensor as JSON (SI units).
    Greens {
        /// Backend: vie or layered.
        #[arg(long)]
        backend: String,
        /// Mesh file for the vie backend.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long, value_parser = parse_format, default_value = "qem-ascii")]
        mesh_format: MeshFormat,
        /// Conductivity (S/m) applied to every mesh region, or to the film.
        #[arg(long)]
        conductivity: Option<f64>,
        /// Relative permittivity for the material (default 1).
        #[arg(long, default_value_t = 1.0)]
        eps_r: f64,
        /// Film thickness in meters for the layered backend.
        #[arg(long)]
        film_thickness: Option<f64>,
        /// Observation point, meters: x,y,z
        #[arg(long)]
        ri: String,
        /// Source point, meters: x,y,z
        #[arg(long)]
        rj: String,
        /// Frequency in Hz.
        #[arg(long)]
        freq_hz: f64,
    },
}

fn parse_format(s: &str) -> Result<MeshFormat, String> {
    match s {
        "qem-ascii" => Ok(MeshFormat::QemAscii),
        "msh22" => Ok(MeshFormat::Msh22),
        other => Err(format!("unknown format `{other}` (want qem-ascii or msh22)")),
    }
}

fn parse_point(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("point `{s}` must be x,y,z"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.trim().parse().map_err(|e| format!("bad coordinate `{p}`: {e}"))?;
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    }
    match cli.command {
        Command::Run { config, out } => cmd_run(&config, out.as_deref()),
        Command::ValidateMesh { file, format } => cmd_validate_mesh(&file, format),
        Command::Greens {
            backend,
            mesh,
            mesh_format,
            conductivity,
            eps_r,
            film_thickness,
            ri,
            rj,
            freq_hz,
        } => cmd_greens(
            &backend,
            mesh.as_deref(),
            mesh_format,
            conductivity,
            eps_r,
            film_thickness,
            &ri,
            &rj,
            freq_hz,
        ),
    }
}

fn cmd_run(config_path: &std::path::Path, out: Option<&std::path::Path>) -> ExitCode {
    let config = match ScenarioConfig::from_path(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let scenario = match config.build() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let out_dir = out
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| config_path.parent().unwrap_or(std::path::Path::new(".")).to_path_buf());
    match run::run_scenario(&scenario, &out_dir) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", out_dir.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_COMPUTE)
        }
    }
}

fn cmd_validate_mesh(file: &std::path::Path, format: MeshFormat) -> ExitCode {
    match load_mesh(file, format) {
        Ok(mesh) => {
            let (lo, hi) = mesh.bounding_box();
            println!("mesh ok: {} nodes, {} tets", mesh.node_count(), mesh.tet_count());
            println!("total volume {:.6e} m^3", mesh.total_volume());
            println!(
                "bounding box [{:.3e}, {:.3e}] x [{:.3e}, {:.3e}] x [{:.3e}, {:.3e}] m",
                lo.x, hi.x, lo.y, hi.y, lo.z, hi.z
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("invalid mesh: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_greens(
    backend: &str,
    mesh: Option<&std::path::Path>,
    mesh_format: MeshFormat,
    conductivity: Option<f64>,
    eps_r: f64,
    film_thickness: Option<f64>,
    ri: &str,
    rj: &str,
    freq_hz: f64,
) -> ExitCode {
    let (ri, rj) = match (parse_point(ri), parse_point(rj)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    if freq_hz <= 0.0 {
        eprintln!("error: --freq-hz must be positive");
        return ExitCode::from(EXIT_VALIDATION);
    }
    let omega = 2.0 * std::f64::consts::PI * freq_hz;
    let material = || -> Result<Material, String> {
        Material::new("cli", conductivity.unwrap_or(0.0), eps_r).map_err(|e| e.to_string())
    };
    let scene = match backend {
        "layered" => {
            let t = match film_thickness {
                Some(t) => t,
                None => {
                    eprintln!("error: layered backend requires --film-thickness (meters)");
                    return ExitCode::from(EXIT_VALIDATION);
                }
            };
            let mat = match material() {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_VALIDATION);
                }
            };
            match LayeredStack::new(t, mat) {
                Ok(stack) => Scene::layered(stack),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_VALIDATION);
                }
            }
        }
        "vie" => {
            let path = match mesh {
                Some(p) => p,
                None => {
                    eprintln!("error: vie backend requires --mesh FILE");
                    return ExitCode::from(EXIT_VALIDATION);
                }
            };
            let loaded = match load_mesh(path, mesh_format) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_VALIDATION);
                }
            };
            let loaded = if let Some(_sigma) = conductivity {
                let mat = match material() {
                    Ok(m) => m,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_VALIDATION);
                    }
                };
                let table = loaded
                    .materials()
                    .keys()
                    .map(|&r| (r, mat.clone()))
                    .collect::<std::collections::BTreeMap<_, _>>();
                match loaded.with_materials(table) {
                    Ok(m) => m,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_VALIDATION);
                    }
                }
            } else {
                loaded
            };
            Scene::vie(loaded)
        }
        other => {
            eprintln!("error: unknown backend `{other}` (want vie or layered)");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match magnetic_green_tensor(&scene, ri, rj, omega) {
        Ok(sample) => {
            let tensor: Vec<Vec<[f64; 2]>> = (0..3)
                .map(|r| (0..3).map(|c| [sample.tensor[(r, c)].re, sample.tensor[(r, c)].im]).collect())
                .collect();
            let coincident = ri == rj;
            let im_psd = coincident.then(|| {
                let im = sample.tensor.map(|z| qem::Complex::from(z.im));
                let eigs = qem::linalg::hermitian_eigenvalues_3x3(&im);
                let max = eigs.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
                eigs.iter().all(|&e| e >= -1e-8 * max)
            });
            let json = serde_json::json!({
                "ri": [ri.x, ri.y, ri.z],
                "rj": [rj.x, rj.y, rj.z],
                "omegaRadPerS": omega,
                "convention": "physics",
                "provenance": match sample.provenance {
                    qem::greens::Provenance::Vie => "vie",
                    qem::greens::Provenance::Layered => "layered",
                    qem::greens::Provenance::FreeSpace => "free-space",
                },
                "tensorPerM": tensor,
                "imPsd": im_psd,
            });
            println!("{}", serde_json::to_string_pretty(&json).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_COMPUTE)
        }
    }
}
