//! `superspin`: spectra, dissipation sweeps, magnetization dynamics, and
//! sector densities of dissipative collective-spin models, as CSV/JSON data
//! and self-contained SVG figures.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 numerical failure.

mod output;
mod svg;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use superspin_core::analysis::{sector_distance_and_density, sweep_gamma};
use superspin_core::dynamics::{
    analytic_jz, integrate_master_equation, prepare_state, InitialState, TimeSeries,
};
use superspin_core::eigensolve::eigenvalues;
use superspin_core::models::{assemble, ModelId, ModelSpec};
use superspin_core::perturbation::first_order_spectrum_generic;
use superspin_core::Error as CoreError;

use output::{
    fmt_g, write_density_csv, write_dynamics_csv, write_ep_events_csv, write_spectrum_csv,
    write_sweep_csv, DensityJson, DensityRowJson, DynamicsJson, DynamicsPointJson, EpEventJson,
    RunHeader, SpectrumJson, SpectrumRow, SweepJson, SweepPointJson,
};
use svg::{Marker, Plot, Series};

#[derive(Parser)]
#[command(
    name = "superspin",
    about = "Liouvillian spectra and dynamics of dissipative collective-spin models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and/or perturbative Liouvillian spectrum at one parameter point.
    Spectrum(SpectrumArgs),
    /// Exact spectra over a dissipation grid, optionally locating
    /// exceptional points.
    Sweep(SweepArgs),
    /// Magnetization expectation values over time.
    Dynamics(DynamicsArgs),
    /// Distances and densities of the closed-form spectral sectors.
    Density(DensityArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Btc,
    A,
    B,
    C,
}

impl ModelArg {
    fn id(self) -> ModelId {
        match self {
            ModelArg::Btc => ModelId::Btc,
            ModelArg::A => ModelId::A,
            ModelArg::B => ModelId::B,
            ModelArg::C => ModelId::C,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Perturbative,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    PolarizedZ,
    PolarizedX,
    CoherentMix,
}

impl InitArg {
    fn state(self) -> InitialState {
        match self {
            InitArg::PolarizedZ => InitialState::PolarizedZ,
            InitArg::PolarizedX => InitialState::PolarizedX,
            InitArg::CoherentMix => InitialState::CoherentMix,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON output path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// SVG figure path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Number of spins N.
    #[arg(long)]
    n: usize,
    /// Drive strength Omega.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Dissipation strength Gamma (the jump rate is N*Gamma).
    #[arg(long)]
    gamma: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long)]
    gamma_min: f64,
    #[arg(long)]
    gamma_max: f64,
    /// Number of grid points.
    #[arg(long)]
    steps: usize,
    /// Locate exceptional points and write ep_events.csv.
    #[arg(long)]
    detect_ep: bool,
    /// |Im| threshold below which a pair counts as merged.
    #[arg(long, default_value_t = 1e-6)]
    ep_threshold: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DynamicsArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    t_max: f64,
    /// Integrator step.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, value_enum, default_value_t = InitArg::PolarizedZ)]
    init: InitArg,
    /// Also emit the closed-form series (models b and c).
    #[arg(long)]
    analytic: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long)]
    gamma: f64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Dynamics(args) => cmd_dynamics(args),
        Command::Density(args) => cmd_density(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("superspin: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[derive(Debug)]
enum CliError {
    Core(CoreError),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::NumericalFailure(_)) => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn write_csv<F>(out: &Option<PathBuf>, write: F) -> Result<(), CliError>
where
    F: Fn(&mut dyn Write) -> std::io::Result<()>,
{
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
        }
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Option<PathBuf>, value: &T) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::other)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}

fn write_svg(path: &Option<PathBuf>, plot: &Plot) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(plot.render().as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

fn sweep_threads() -> usize {
    match std::env::var("SUPERSPIN_THREADS") {
        Ok(v) => v.parse().unwrap_or(1).max(1),
        Err(_) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<(), CliError> {
    let spec = ModelSpec::<f64>::new(args.model.id(), args.n, args.omega, args.gamma)?;
    let mut rows: Vec<SpectrumRow> = Vec::new();
    if matches!(args.method, MethodArg::Exact | MethodArg::Both) {
        let liou = assemble(&spec)?;
        for v in eigenvalues(&liou.total)? {
            rows.push(SpectrumRow::exact(v));
        }
    }
    if matches!(args.method, MethodArg::Perturbative | MethodArg::Both) {
        let liou = assemble(&spec)?;
        for ev in first_order_spectrum_generic(&liou, spec.omega)? {
            rows.push(SpectrumRow::perturbative(&ev));
        }
    }

    write_csv(&args.output.out, |w| write_spectrum_csv(w, &rows))?;
    write_json(
        &args.output.json,
        &SpectrumJson {
            header: RunHeader {
                command: "spectrum",
                model: spec.model_id.name(),
                n: spec.n_spins,
                omega: spec.omega,
            },
            gamma: spec.gamma,
            rows: rows.clone(),
        },
    )?;

    let mut series = Vec::new();
    let exact_pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.method == "exact")
        .map(|r| (r.re, r.im))
        .collect();
    if !exact_pts.is_empty() {
        series.push(Series {
            name: "exact".into(),
            points: exact_pts,
            marker: Marker::Circle,
            color: "#d62728",
        });
    }
    let pert_pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.method == "perturbative")
        .map(|r| (r.re, r.im))
        .collect();
    if !pert_pts.is_empty() {
        series.push(Series {
            name: "perturbative".into(),
            points: pert_pts,
            marker: Marker::Cross,
            color: "#000000",
        });
    }
    write_svg(
        &args.output.svg,
        &Plot {
            title: format!(
                "model {} spectrum, N={}, Omega={}, Gamma={}",
                spec.model_id.name(),
                spec.n_spins,
                fmt_g(spec.omega),
                fmt_g(spec.gamma)
            ),
            x_label: "Re lambda".into(),
            y_label: "Im lambda".into(),
            series,
        },
    )?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let template = ModelSpec::<f64>::new(args.model.id(), args.n, args.omega, 0.0)?;
    let sweep = sweep_gamma(
        &template,
        args.gamma_min,
        args.gamma_max,
        args.steps,
        args.detect_ep,
        args.ep_threshold,
        sweep_threads(),
    )?;

    write_csv(&args.output.out, |w| write_sweep_csv(w, &sweep))?;
    if args.detect_ep {
        let events_path = match &args.output.out {
            Some(path) => path
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .join("ep_events.csv"),
            None => PathBuf::from("ep_events.csv"),
        };
        let mut w = BufWriter::new(File::create(&events_path)?);
        write_ep_events_csv(&mut w, &sweep.ep_events)?;
        w.flush()?;
        eprintln!(
            "superspin: {} exceptional point(s) -> {}",
            sweep.ep_events.len(),
            events_path.display()
        );
    }
    write_json(
        &args.output.json,
        &SweepJson {
            header: RunHeader {
                command: "sweep",
                model: template.model_id.name(),
                n: template.n_spins,
                omega: template.omega,
            },
            gamma_min: args.gamma_min,
            gamma_max: args.gamma_max,
            steps: args.steps,
            rows: sweep
                .gammas
                .iter()
                .zip(sweep.spectra.iter())
                .flat_map(|(g, spectrum)| {
                    spectrum.iter().map(|v| SweepPointJson {
                        gamma: *g,
                        re: v.re,
                        im: v.im,
                    })
                })
                .collect(),
            ep_events: sweep
                .ep_events
                .iter()
                .map(|e| EpEventJson {
                    pair_id: e.pair_id,
                    gamma_star: e.gamma_star,
                    confidence: if e.low_confidence { "low" } else { "high" },
                })
                .collect(),
        },
    )?;

    // one scatter series per grid point, shaded from weak to strong dissipation
    let mut series = Vec::new();
    let shades = [
        "#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#08519c", "#08306b",
    ];
    for (i, (g, spectrum)) in sweep.gammas.iter().zip(sweep.spectra.iter()).enumerate() {
        let shade = shades[(i * shades.len()) / sweep.gammas.len().max(1)];
        let label = if i == 0 || i + 1 == sweep.gammas.len() {
            format!("Gamma = {}", fmt_g(*g))
        } else {
            String::new()
        };
        series.push(Series {
            name: label,
            points: spectrum.iter().map(|v| (v.re, v.im)).collect(),
            marker: Marker::Circle,
            color: shade,
        });
    }
    series.retain(|s| !s.points.is_empty());
    let mut labeled: Vec<Series> = Vec::new();
    for s in series {
        if s.name.is_empty() {
            // merge unlabeled shades into their neighbors to keep the legend small
            if let Some(last) = labeled.last_mut() {
                if last.color == s.color && last.name.is_empty() {
                    last.points.extend(s.points);
                    continue;
                }
            }
        }
        labeled.push(s);
    }
    write_svg(
        &args.output.svg,
        &Plot {
            title: format!(
                "model {} spectra, N={}, Gamma in [{}, {}]",
                template.model_id.name(),
                template.n_spins,
                fmt_g(args.gamma_min),
                fmt_g(args.gamma_max)
            ),
            x_label: "Re lambda".into(),
            y_label: "Im lambda".into(),
            series: labeled,
        },
    )?;
    Ok(())
}

fn cmd_dynamics(args: DynamicsArgs) -> Result<(), CliError> {
    let spec = ModelSpec::<f64>::new(args.model.id(), args.n, args.omega, args.gamma)?;
    let rho0 = prepare_state::<f64>(args.init.state(), args.n)?;
    let integrated = integrate_master_equation(&spec, &rho0, args.t_max, args.dt)?;
    let analytic: Option<TimeSeries<f64>> = if args.analytic {
        Some(analytic_jz::<f64>(
            spec.model_id,
            spec.n_spins,
            spec.omega,
            spec.gamma,
            args.init.state(),
            &integrated.times,
        )?)
    } else {
        None
    };

    let mut all: Vec<&TimeSeries<f64>> = vec![&integrated];
    if let Some(ts) = &analytic {
        all.push(ts);
    }
    write_csv(&args.output.out, |w| write_dynamics_csv(w, &all))?;

    let mut rows = Vec::new();
    for ts in &all {
        for i in 0..ts.len() {
            rows.push(DynamicsPointJson {
                t: ts.times[i],
                jx: ts.jx[i],
                jy: ts.jy[i],
                jz: ts.jz[i],
                provenance: ts.provenance.name(),
            });
        }
    }
    write_json(
        &args.output.json,
        &DynamicsJson {
            header: RunHeader {
                command: "dynamics",
                model: spec.model_id.name(),
                n: spec.n_spins,
                omega: spec.omega,
            },
            gamma: spec.gamma,
            t_max: args.t_max,
            dt: args.dt,
            rows,
        },
    )?;

    // figure: <J_z(t)>, integrated as thinned circles over the analytic line
    let mut series = Vec::new();
    if let Some(ts) = &analytic {
        series.push(Series {
            name: "analytic".into(),
            points: ts
                .times
                .iter()
                .copied()
                .zip(ts.jz.iter().copied())
                .collect(),
            marker: Marker::Line,
            color: "#1f77b4",
        });
        let stride = (integrated.len() / 160).max(1);
        series.push(Series {
            name: "integrated".into(),
            points: integrated
                .times
                .iter()
                .copied()
                .zip(integrated.jz.iter().copied())
                .step_by(stride)
                .collect(),
            marker: Marker::Circle,
            color: "#d62728",
        });
    } else {
        series.push(Series {
            name: "integrated".into(),
            points: integrated
                .times
                .iter()
                .copied()
                .zip(integrated.jz.iter().copied())
                .collect(),
            marker: Marker::Line,
            color: "#d62728",
        });
    }
    write_svg(
        &args.output.svg,
        &Plot {
            title: format!(
                "model {} <J_z(t)>, N={}, Omega={}, Gamma={}",
                spec.model_id.name(),
                spec.n_spins,
                fmt_g(spec.omega),
                fmt_g(spec.gamma)
            ),
            x_label: "t".into(),
            y_label: "<J_z>".into(),
            series,
        },
    )?;
    Ok(())
}

fn cmd_density(args: DensityArgs) -> Result<(), CliError> {
    let rows = sector_distance_and_density::<f64>(args.model.id(), args.n, args.gamma)?;
    write_csv(&args.output.out, |w| write_density_csv(w, &rows))?;
    write_json(
        &args.output.json,
        &DensityJson {
            header: RunHeader {
                command: "density",
                model: args.model.id().name(),
                n: args.n,
                omega: 1.0,
            },
            gamma: args.gamma,
            rows: rows
                .iter()
                .map(|r| DensityRowJson {
                    s_or_sx: r.s_bar,
                    d: r.distance,
                    g: r.density,
                })
                .collect(),
        },
    )?;
    write_svg(
        &args.output.svg,
        &Plot {
            title: format!(
                "model {} sector density, N={}, Gamma={}",
                args.model.id().name(),
                args.n,
                fmt_g(args.gamma)
            ),
            x_label: "s_bar".into(),
            y_label: "g".into(),
            series: vec![Series {
                name: "g(s_bar)".into(),
                points: rows.iter().map(|r| (r.s_bar, r.density)).collect(),
                marker: Marker::Circle,
                color: "#2ca02c",
            }],
        },
    )?;
    Ok(())
}
