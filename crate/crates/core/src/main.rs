//! `dqform` experiment runner. Writes CSV artifacts; exit code 2 on argument
//! errors and 3 on numerical precondition failures.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dqform::control::{error_curve, simulate, SimConfig, Trajectory};
use dqform::feasibility::nearest_feasible;
use dqform::format_float;
use dqform::graph::{underlying_laplacian, DiGraph, Topology};
use dqform::spectral::{gain_scaled, lambda2r, theory_rate};
use dqform::udqdg::{build_dq_laplacian, desired_formation, perturb_scheme, relative_scheme, Formation, Scheme};
use dqform::Error;

const RATE_TIMES: [f64; 4] = [10.0, 30.0, 50.0, 70.0];

#[derive(Parser)]
#[command(name = "dqform", version, about = "Dual-quaternion formation control experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// λ₂ᵣ of the underlying Laplacian and exp(-λ₂ᵣ t) for t = 10, 30, 50, 70.
    Spectrum {
        #[command(flatten)]
        topo: TopologyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the projected iteration and write the error curve.
    Simulate {
        #[command(flatten)]
        topo: TopologyArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Also dump every recorded state here.
        #[arg(long)]
        states: Option<PathBuf>,
        /// Load the scheme from a file written by `gen --scheme`.
        #[arg(long)]
        scheme: Option<PathBuf>,
        /// Load the desired formation from a file written by `gen --formation`.
        #[arg(long)]
        formation: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a noisy scheme against its nearest feasible repair.
    Noise {
        #[command(flatten)]
        topo: TopologyArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.02)]
        sigma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the topology edge list, and optionally the scheme and formation.
    Gen {
        #[command(flatten)]
        topo: TopologyArgs,
        /// Perturb the dumped scheme with this noise level.
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, env = "DQFORM_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        scheme: Option<PathBuf>,
        #[arg(long)]
        formation: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyKind {
    Cycle,
    Star,
    Grid,
}

impl From<TopologyKind> for Topology {
    fn from(k: TopologyKind) -> Self {
        match k {
            TopologyKind::Cycle => Topology::Cycle,
            TopologyKind::Star => Topology::Star,
            TopologyKind::Grid => Topology::Grid,
        }
    }
}

#[derive(Args)]
struct TopologyArgs {
    #[arg(long, value_enum)]
    topology: TopologyKind,
    /// Total number of agents.
    #[arg(long)]
    n: usize,
    #[arg(long, conflicts_with = "undirected")]
    directed: bool,
    #[arg(long)]
    undirected: bool,
}

impl TopologyArgs {
    fn kind(&self) -> Topology {
        self.topology.into()
    }

    fn directed(&self) -> bool {
        !self.undirected
    }

    fn graph(&self) -> Result<DiGraph, Failure> {
        self.kind()
            .generate(self.n, self.directed())
            .map_err(Failure::Usage)
    }

    fn formation(&self) -> Result<Formation, Failure> {
        desired_formation(self.kind(), self.n).map_err(Failure::Usage)
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 350)]
    kmax: usize,
    #[arg(long, env = "DQFORM_SEED", default_value_t = 1)]
    seed: u64,
    /// Run all kmax iterations, ignoring the successive-iterate tolerance.
    #[arg(long)]
    no_stop: bool,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
}

impl RunArgs {
    fn config(&self, scheme: Scheme, formation: Formation) -> SimConfig {
        let mut cfg = SimConfig::new(scheme).with_formation(formation);
        cfg.alpha = self.alpha;
        cfg.k_max = self.kmax;
        cfg.seed = self.seed;
        cfg.stop_on_tol = !self.no_stop;
        cfg.record_every = self.record_every;
        cfg
    }
}

enum Failure {
    Usage(Error),
    Numerical(Error),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Sorts library errors into argument errors and numerical failures.
fn classify(e: Error) -> Failure {
    match e {
        Error::InvalidConfig(_)
        | Error::NegativeSigma(_)
        | Error::TooSmall { .. }
        | Error::SizeMismatch { .. }
        | Error::InvalidGraph(_) => Failure::Usage(e),
        _ => Failure::Numerical(e),
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, body),
        None => io::stdout().lock().write_all(body.as_bytes()),
    }
}

/// Summary lines go to stdout unless the CSV already does.
fn report(out: &Option<PathBuf>, line: &str) {
    let _ = if out.is_some() {
        writeln!(io::stdout(), "{line}")
    } else {
        writeln!(io::stderr(), "{line}")
    };
}

fn cmd_spectrum(topo: &TopologyArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let g = topo.graph()?;
    let l = underlying_laplacian(&g);
    let kl = gain_scaled(&vec![1.0; g.n()], &l);
    let lam = lambda2r(&kl).map_err(Failure::Numerical)?;
    let mut csv = String::from("topology,n,directed,lambda2r");
    for t in RATE_TIMES {
        write!(csv, ",rate_t{t}").unwrap();
    }
    csv.push('\n');
    write!(csv, "{},{},{},{}", topo.kind(), g.n(), topo.directed(), format_float(lam)).unwrap();
    for t in RATE_TIMES {
        write!(csv, ",{}", format_float(theory_rate(lam, t))).unwrap();
    }
    csv.push('\n');
    emit(out, &csv)?;
    Ok(())
}

fn error_csv(traj: &Trajectory) -> Result<String, Failure> {
    let curve = error_curve(traj).map_err(Failure::Numerical)?;
    let mut csv = String::from("k,t,err\n");
    for (k, (t, e)) in traj.steps.iter().zip(curve) {
        writeln!(csv, "{k},{},{}", format_float(t), format_float(e)).unwrap();
    }
    Ok(csv)
}

fn states_csv(traj: &Trajectory) -> String {
    let mut csv = String::from("k,agent,qs_w,qs_x,qs_y,qs_z,qd_w,qd_x,qd_y,qd_z\n");
    for (k, state) in traj.steps.iter().zip(&traj.states) {
        for (i, q) in state.iter().enumerate() {
            let fields: Vec<String> = q.value().to_array().iter().map(|&v| format_float(v)).collect();
            writeln!(csv, "{k},{},{}", i + 1, fields.join(",")).unwrap();
        }
    }
    csv
}

fn read_text(p: &PathBuf) -> Result<String, Failure> {
    Ok(fs::read_to_string(p)?)
}

fn cmd_simulate(
    topo: &TopologyArgs,
    run: &RunArgs,
    files: [&Option<PathBuf>; 2],
    states: &Option<PathBuf>,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    let [scheme_file, formation_file] = files;
    let f = match formation_file {
        Some(p) => Formation::parse(&read_text(p)?).map_err(Failure::Usage)?,
        None => topo.formation()?,
    };
    let scheme = match scheme_file {
        Some(p) => Scheme::parse(&read_text(p)?).map_err(Failure::Usage)?,
        None => relative_scheme(&f, &topo.graph()?).map_err(classify)?,
    };
    if scheme.n() != f.len() {
        return Err(Failure::Usage(Error::SizeMismatch {
            expected: scheme.n(),
            got: f.len(),
        }));
    }
    let traj = simulate(&run.config(scheme, f)).map_err(classify)?;
    emit(out, &error_csv(&traj)?)?;
    if let Some(p) = states {
        fs::write(p, states_csv(&traj))?;
    }
    report(
        out,
        &format!(
            "stopped_at {} status {:?} final_err {}",
            traj.stopped_at,
            traj.status,
            format_float(traj.final_error().unwrap_or(f64::NAN))
        ),
    );
    Ok(())
}

fn cmd_noise(topo: &TopologyArgs, run: &RunArgs, sigma: f64, out: &Option<PathBuf>) -> Result<(), Failure> {
    let g = topo.graph()?;
    let f = topo.formation()?;
    let clean = relative_scheme(&f, &g).map_err(classify)?;
    let noisy = perturb_scheme(&clean, sigma, run.seed).map_err(classify)?;
    let repair = nearest_feasible(&build_dq_laplacian(&noisy)).map_err(Failure::Numerical)?;
    let repaired = repair.repaired_scheme(&g).map_err(Failure::Numerical)?;

    let raw = simulate(&run.config(noisy, f)).map_err(classify)?;
    let fixed = simulate(&run.config(repaired, repair.formation())).map_err(classify)?;
    let raw_curve = error_curve(&raw).map_err(Failure::Numerical)?;
    let fixed_curve = error_curve(&fixed).map_err(Failure::Numerical)?;

    let mut csv = String::from("k,t,err_raw,err_repaired\n");
    let rows = raw.steps.len().max(fixed.steps.len());
    for r in 0..rows {
        let (k, t) = if r < raw.steps.len() {
            (raw.steps[r], raw_curve[r].0)
        } else {
            (fixed.steps[r], fixed_curve[r].0)
        };
        let cell = |c: &[(f64, f64)]| c.get(r).map(|p| format_float(p.1)).unwrap_or_default();
        writeln!(csv, "{k},{},{},{}", format_float(t), cell(&raw_curve), cell(&fixed_curve)).unwrap();
    }
    emit(out, &csv)?;
    report(
        out,
        &format!(
            "residual {} residual_after {}",
            format_float(repair.residual),
            format_float(repair.residual_after)
        ),
    );
    report(
        out,
        &format!(
            "final_err_raw {} final_err_repaired {}",
            format_float(raw.final_error().unwrap_or(f64::NAN)),
            format_float(fixed.final_error().unwrap_or(f64::NAN))
        ),
    );
    Ok(())
}

fn cmd_gen(
    topo: &TopologyArgs,
    sigma: f64,
    seed: u64,
    scheme: &Option<PathBuf>,
    formation: &Option<PathBuf>,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    let g = topo.graph()?;
    emit(out, &g.to_edge_list())?;
    if scheme.is_some() || formation.is_some() {
        let f = topo.formation()?;
        if let Some(p) = scheme {
            let s = relative_scheme(&f, &g).map_err(classify)?;
            let s = perturb_scheme(&s, sigma, seed).map_err(classify)?;
            fs::write(p, s.to_text())?;
        }
        if let Some(p) = formation {
            fs::write(p, f.to_text())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum { topo, out } => cmd_spectrum(topo, out),
        Command::Simulate {
            topo,
            run,
            states,
            scheme,
            formation,
            out,
        } => cmd_simulate(topo, run, [scheme, formation], states, out),
        Command::Noise { topo, run, sigma, out } => cmd_noise(topo, run, *sigma, out),
        Command::Gen {
            topo,
            sigma,
            seed,
            scheme,
            formation,
            out,
        } => cmd_gen(topo, *sigma, *seed, scheme, formation, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
