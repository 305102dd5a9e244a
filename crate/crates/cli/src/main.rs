//! `ion-cavity`: GHZ checks, (θ, T) sweeps, convergence studies and plots.
//!
//! Exit status: 0 success, 2 usage error, 3 numeric gate failure, 4 I/O error.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ion_cavity::io::config::{OutputFormat, RunConfig};
use ion_cavity::io::svg::{heatmap, line_plot, FieldGrid};
use ion_cavity::io::{read_csv, write_csv, write_json};
use ion_cavity::sweep::{convergence_study, ghz_check, run_sweep, GHZ_GATE};
use ion_cavity::{DMode, Error, Family, GhzCheckConfig, Grid, Tier};

const EXIT_USAGE: u8 = 2;
const EXIT_GATE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ion-cavity",
    version,
    about = "Tripartite entanglement dynamics of a trapped ion in a cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve family (i) to μt = pπ and compare with the GHZ target.
    GhzCheck(GhzArgs),
    /// Tabulate negativities and linear entropies over a (θ, T) grid.
    Sweep(SweepArgs),
    /// Compare sweeps over a ladder of cutoffs.
    Converge(ConvergeArgs),
    /// Render a sweep CSV as an SVG heatmap or line plot.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Gate {
    On,
    Off,
}

#[derive(Args)]
struct GhzArgs {
    #[arg(long, default_value = "block", value_parser = parse_tier)]
    tier: Tier,
    #[arg(long, default_value_t = 4.0)]
    mu_over_a: f64,
    #[arg(long, default_value_t = 0.1)]
    eta_l: f64,
    #[arg(long, default_value_t = 0.1)]
    eta_c: f64,
    #[arg(long, default_value_t = 0.0)]
    theta_deg: f64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    q: u8,
    #[arg(long, default_value_t = 1)]
    p: u32,
    /// Defaults to 2 for the block tier and 6 otherwise.
    #[arg(long)]
    cutoff_m: Option<usize>,
    #[arg(long)]
    cutoff_n: Option<usize>,
    #[arg(long, value_enum, default_value = "on")]
    gate: Gate,
}

/// Sweep settings; unset flags fall back to the run-config file, then to
/// the built-in defaults.
#[derive(Args, Clone)]
struct SweepFlags {
    /// Flat key=value run-config file using the flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_tier)]
    tier: Option<Tier>,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    mu_over_a: Option<f64>,
    #[arg(long)]
    eta_l: Option<f64>,
    #[arg(long)]
    eta_c: Option<f64>,
    #[arg(long)]
    beta_re: Option<f64>,
    #[arg(long)]
    beta_im: Option<f64>,
    #[arg(long, conflicts_with = "theta_grid")]
    theta_deg: Option<f64>,
    /// start:stop:count in degrees.
    #[arg(long, value_parser = parse_grid)]
    theta_grid: Option<Grid>,
    /// start:stop:count in degrees.
    #[arg(long, value_parser = parse_grid)]
    t_grid: Option<Grid>,
    #[arg(long)]
    cutoff_m: Option<usize>,
    #[arg(long)]
    cutoff_n: Option<usize>,
    /// auto or fixed:<D>.
    #[arg(long, value_parser = parse_d_mode)]
    d_mode: Option<DMode>,
    #[arg(long)]
    truncation_tol: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    flags: SweepFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    flags: SweepFlags,
    /// Comma-separated, strictly increasing cutoffs applied to both modes.
    #[arg(long, value_delimiter = ',', required = true)]
    ladder: Vec<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Sweep CSV.
    input: PathBuf,
    /// Field to plot; comma-separated list in line mode.
    #[arg(long, default_value = "N_B")]
    field: String,
    /// Line traces versus T at a fixed θ instead of a heatmap.
    #[arg(long, requires = "theta_deg")]
    line: bool,
    #[arg(long)]
    theta_deg: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_tier(s: &str) -> Result<Tier, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_d_mode(s: &str) -> Result<DMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::Csv(c) if c.is_io_error() => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GhzCheck(args) => cmd_ghz_check(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Converge(args) => cmd_converge(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_ghz_check(args: GhzArgs) -> CmdResult {
    let default_cutoff = if args.tier == Tier::Block { 2 } else { 6 };
    let cfg = GhzCheckConfig {
        tier: args.tier,
        mu_over_a: args.mu_over_a,
        eta_l: args.eta_l,
        eta_c: args.eta_c,
        theta_deg: args.theta_deg,
        q: args.q,
        p: args.p,
        cutoff_m: args.cutoff_m.unwrap_or(default_cutoff),
        cutoff_n: args.cutoff_n.unwrap_or(default_cutoff),
    };
    let r = ghz_check(&cfg)?;
    println!(
        "tier {}  mu/a {}  theta {} deg  q {}  p {}  cutoffs {}x{}",
        cfg.tier, cfg.mu_over_a, cfg.theta_deg, cfg.q, cfg.p, cfg.cutoff_m, cfg.cutoff_n
    );
    println!("T = {:.6} deg", r.t_deg);
    println!("fidelity  {:.6}", r.fidelity);
    println!(
        "N         A {:.6}  B {:.6}  C {:.6}",
        r.negativity[0], r.negativity[1], r.negativity[2]
    );
    println!(
        "S_l       A {:.6}  B {:.6}  C {:.6}  (d = {}, {}, {})",
        r.linear_entropy[0],
        r.linear_entropy[1],
        r.linear_entropy[2],
        r.effective_d[0],
        r.effective_d[1],
        r.effective_d[2]
    );
    println!("leakage   {:.3e}", r.leakage);
    println!("norm err  {:.3e}", r.norm_error);

    if args.gate == Gate::On && (r.fidelity.is_nan() || r.fidelity < GHZ_GATE) {
        return Err(Failure {
            code: EXIT_GATE,
            message: format!(
                "GHZ fidelity {:.12} below gate {:.12}",
                r.fidelity, GHZ_GATE
            ),
        });
    }
    Ok(())
}

fn run_config(flags: &SweepFlags) -> Result<RunConfig, Failure> {
    let from_file = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    let from_flags = RunConfig {
        tier: flags.tier,
        family: flags.family,
        mu_over_a: flags.mu_over_a,
        eta_l: flags.eta_l,
        eta_c: flags.eta_c,
        beta_re: flags.beta_re,
        beta_im: flags.beta_im,
        theta_deg: flags.theta_deg,
        theta_grid: flags.theta_grid,
        t_grid: flags.t_grid,
        cutoff_m: flags.cutoff_m,
        cutoff_n: flags.cutoff_n,
        d_mode: flags.d_mode,
        truncation_tol: flags.truncation_tol,
        out: None,
        format: None,
    };
    // A theta point on the command line replaces a theta grid from the file
    // and vice versa.
    let mut base = from_file;
    if from_flags.theta_deg.is_some() {
        base.theta_grid = None;
    }
    if from_flags.theta_grid.is_some() {
        base.theta_deg = None;
    }
    Ok(base.overlay(from_flags))
}

fn cmd_sweep(args: SweepArgs) -> CmdResult {
    let rc = run_config(&args.flags)?.overlay(RunConfig {
        out: args.out,
        format: args.format,
        ..RunConfig::default()
    });
    let cfg = rc.to_sweep_config()?;
    let format = rc.format.unwrap_or(OutputFormat::Csv);
    let output = run_sweep(&cfg)?;
    for note in &output.notes {
        eprintln!("note: {note}");
    }

    match &rc.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_failure(path, e))?;
            let w = BufWriter::new(file);
            match format {
                OutputFormat::Csv => write_csv(w, &output.records),
                OutputFormat::Json => write_json(w, &cfg, &output),
            }
            .map_err(|e| match e {
                Error::Io(io) => io_failure(path, io),
                other => other.into(),
            })?;
            eprintln!(
                "wrote {} records to {} (d = {:?})",
                output.records.len(),
                path.display(),
                output.effective_d
            );
        }
        None => {
            let stdout = std::io::stdout().lock();
            match format {
                OutputFormat::Csv => write_csv(stdout, &output.records),
                OutputFormat::Json => write_json(stdout, &cfg, &output),
            }?;
        }
    }
    Ok(())
}

fn cmd_converge(args: ConvergeArgs) -> CmdResult {
    let cfg = run_config(&args.flags)?.to_sweep_config()?;
    let rungs = convergence_study(&cfg, &args.ladder)?;
    println!("from_cutoff,to_cutoff,max_abs_diff");
    for r in rungs {
        println!(
            "{},{},{}",
            r.from_cutoff,
            r.to_cutoff,
            ion_cavity::io::format_float(r.max_abs_diff)
        );
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> CmdResult {
    let file = File::open(&args.input).map_err(|e| io_failure(&args.input, e))?;
    let records = read_csv(file)?;
    let svg = if args.line {
        let fields: Vec<&str> = args.field.split(',').map(str::trim).collect();
        line_plot(&records, args.theta_deg.expect("clap enforces"), &fields)?
    } else {
        let grid = FieldGrid::from_records(&records, args.field.trim())?;
        heatmap(&grid)
    };
    fs::write(&args.out, svg).map_err(|e| io_failure(&args.out, e))?;
    Ok(())
}
