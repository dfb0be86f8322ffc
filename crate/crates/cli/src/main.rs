use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isosine::bodies::{self, VolumeMethod};
use isosine::measures::SphericalMeasure;
use isosine::numerics::{self, build_sphere_quadrature};
use isosine::report::Tolerances;
use isosine::suites::{self, SuiteConfig};
use isosine::tomography::{self, Polytope};
use isosine::transforms::{self, KernelKind};
use isosine::Error;

/// Sine and cosine transforms of isotropic measures and checks of their
/// volume inequalities.
#[derive(Parser)]
#[command(name = "isosine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print κ_n, γ_n and α_n.
    Constants {
        /// Dimensions (comma separated).
        #[arg(long = "n", value_delimiter = ',', default_value = "3")]
        dims: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and write its JSON report.
    Verify {
        /// constants, thm1, thm2, thm4-2, thm4-4, bl, tomography, identities or all
        suite: String,
        #[command(flatten)]
        opts: SuiteOpts,
    },
    /// Volume of the sine or cosine body of a measure, and of its polar.
    Volume {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_enum, default_value = "sine")]
        kernel: Kernel,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a transform of a measure at the given points (or at the
    /// nodes of a sphere rule).
    Transform {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_enum, default_value = "sine")]
        kernel: Kernel,
        /// A point as comma-separated coordinates; repeatable.
        #[arg(long = "at", value_delimiter = ',', num_args = 1)]
        at: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Move a polytope into surface isotropic position.
    Position {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Where to write the positioned polytope (CSV).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SuiteOpts {
    /// Dimensions (comma separated).
    #[arg(long = "n", value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    /// Monte Carlo samples for the Brascamp–Lieb integrals.
    #[arg(long)]
    samples: Option<usize>,
    /// Monte Carlo samples for volume cross-checks.
    #[arg(long)]
    volume_samples: Option<usize>,
    /// Random measures per dimension.
    #[arg(long)]
    measures: Option<usize>,
    /// Random hulls in the tomography corpus.
    #[arg(long)]
    corpus: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    measure: Option<PathBuf>,
    #[arg(long)]
    polytope: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol_scale: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    Sine,
    Cosine,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Radial,
    Mc,
    Both,
}

impl From<Kernel> for KernelKind {
    fn from(k: Kernel) -> Self {
        match k {
            Kernel::Sine => KernelKind::Sine,
            Kernel::Cosine => KernelKind::Cosine,
        }
    }
}

/// Input and configuration problems, reported with exit code 2.
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_measure(path: &Path) -> Result<SphericalMeasure, InputError> {
    SphericalMeasure::from_csv(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_polytope(path: &Path) -> Result<Polytope, InputError> {
    Polytope::from_csv(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), InputError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| InputError(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn config(opts: &SuiteOpts) -> Result<SuiteConfig, InputError> {
    let mut cfg = SuiteConfig::default();
    if let Some(d) = &opts.dims {
        cfg.dims = d.clone();
    }
    if let Some(v) = opts.nmax {
        cfg.nmax = v;
    }
    cfg.resolution = opts.resolution;
    if let Some(v) = opts.samples {
        cfg.samples = v;
    }
    if let Some(v) = opts.volume_samples {
        cfg.volume_samples = v;
    }
    if let Some(v) = opts.measures {
        cfg.measures = v;
    }
    if let Some(v) = opts.corpus {
        cfg.corpus = v;
    }
    if let Some(v) = opts.seed {
        cfg.seed = v;
    }
    if let Some(p) = &opts.measure {
        cfg.measure = Some(load_measure(p)?);
        cfg.measure_file = Some(p.display().to_string());
    }
    if let Some(p) = &opts.polytope {
        cfg.polytope = Some(load_polytope(p)?);
        cfg.polytope_file = Some(p.display().to_string());
    }
    if let Some(s) = opts.tol_scale {
        cfg.tolerances = Tolerances { scale: s, ..Tolerances::default() };
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, InputError> {
    match cli.command {
        Command::Constants { dims, out } => {
            let rows: Vec<_> = dims.iter().map(|&n| numerics::constants(n)).collect::<Result<_, _>>()?;
            if let Some(p) = out {
                emit(Some(&p), &serde_json::to_string_pretty(&rows).expect("serializable"))?;
            }
            for c in rows {
                println!("n={} kappa={:.15e} gamma={:.15e} alpha={:.15e}", c.n, c.kappa, c.gamma, c.alpha);
            }
            Ok(true)
        }
        Command::Verify { suite, opts } => {
            let cfg = config(&opts)?;
            let report = suites::run_suite(&suite, &cfg)?;
            emit(opts.out.as_deref(), &report.to_json())?;
            let failed: Vec<_> = report.failures().collect();
            eprintln!(
                "{}: {} checks, {} failed, {} ms",
                report.suite_name,
                report.checks.len(),
                failed.len(),
                report.timing.elapsed_ms
            );
            for c in &failed {
                eprintln!("  FAIL {} = {:e} (bounds {:?}..{:?})", c.name, c.computed_value, c.lower_bound, c.upper_bound);
            }
            Ok(report.pass)
        }
        Command::Volume { measure, kernel, method, resolution, samples, seed, out } => {
            let mu = load_measure(&measure)?;
            let n = mu.dim();
            let body = match kernel {
                Kernel::Sine => bodies::sine_body_any(&mu)?,
                Kernel::Cosine => bodies::cosine_body(&mu)?,
            };
            let quad = build_sphere_quadrature(n, resolution.unwrap_or(if n == 3 { 24 } else { 40 }))?;
            let mut result = serde_json::Map::new();
            if method != Method::Mc {
                let v = bodies::volume(&body, VolumeMethod::ExpIntegral, &quad, 0, 0)?;
                result.insert("volumeRadial".into(), serde_json::to_value(v).expect("serializable"));
            }
            if method != Method::Radial {
                let v = bodies::mc_volume(&body, samples, seed)?;
                result.insert("volumeMonteCarlo".into(), serde_json::to_value(v).expect("serializable"));
            }
            let pv = bodies::polar_volume(&body, &quad)?;
            result.insert("polarVolume".into(), serde_json::to_value(pv).expect("serializable"));
            result.insert("dim".into(), n.into());
            result.insert("isotropyDefect".into(), mu.isotropy_defect().into());
            emit(out.as_deref(), &serde_json::to_string_pretty(&result).expect("serializable"))?;
            Ok(true)
        }
        Command::Transform { measure, kernel, at, resolution, out } => {
            let mu = load_measure(&measure)?;
            let n = mu.dim();
            let points: Vec<Vec<f64>> = if at.is_empty() {
                build_sphere_quadrature(n, resolution)?.iter().map(|(u, _)| u.to_vec()).collect()
            } else if at.len() % n != 0 {
                return Err(InputError(format!("--at coordinates must come in groups of {n}")));
            } else {
                at.chunks(n).map(<[f64]>::to_vec).collect()
            };
            let mut text = String::new();
            for x in points {
                let v = transforms::transform(kernel.into(), &mu, &x);
                let coords: Vec<String> = x.iter().map(|c| format!("{c:.17e}")).collect();
                text.push_str(&format!("{},{v:.17e}\n", coords.join(",")));
            }
            emit(out.as_deref(), text.trim_end())?;
            Ok(true)
        }
        Command::Position { polytope, max_iters, tol, out } => {
            let p = load_polytope(&polytope)?;
            let r = tomography::minimal_surface_position(&p, max_iters, tol)?;
            eprintln!(
                "defect {:e} after {} iterations, surface area {:.15e} -> {:.15e}",
                r.defect,
                r.iterations,
                r.objective[0],
                r.objective.last().expect("initial area recorded")
            );
            let phi: Vec<String> = r.phi.row_iter().map(|row| format!("{:?}", row.iter().collect::<Vec<_>>())).collect();
            eprintln!("vertex map rows {}", phi.join(" "));
            if let Some(o) = out {
                emit(Some(&o), &r.positioned.to_csv())?;
            }
            Ok(r.converged)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
