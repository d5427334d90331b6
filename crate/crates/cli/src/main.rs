use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rrm_cli::output::{read_table, write_file};
use rrm_cli::render::svg;
use rrm_cli::run::{output_dir, run_single};
use rrm_cli::{CliError, ExperimentConfig, Mode, Overrides};
use rrm_core::simulator::{assign_receptors, build_mesh};

#[derive(Parser)]
#[command(name = "rrm", version, about = "Reactive receiver: analytic curves, particle simulation and comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Experiment file (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    realizations: Option<u64>,
    #[arg(long)]
    na: Option<u64>,
    #[arg(long = "dt-prime")]
    dt_prime: Option<f64>,
    /// Worker threads; default uses all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Expected received signal from the closed form.
    Analytic(RunArgs),
    /// Particle ensemble mean and standard error.
    Simulate(RunArgs),
    /// Both, plus a per-bin comparison report.
    Compare(RunArgs),
    /// One run per sweep point, plus an index file.
    Sweep(RunArgs),
    /// Correction factor and effective forward rate.
    Homogenize(RunArgs),
    /// Icosphere statistics.
    MeshInfo {
        #[arg(long, default_value_t = 4)]
        level: u8,
        #[arg(long)]
        receptors: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// SVG line chart of one or more CSVs.
    Render {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "")]
        title: String,
    },
}

fn run_mode(mode: Mode, a: &RunArgs) -> Result<Vec<String>, CliError> {
    if let Some(n) = a.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let mut cfg = ExperimentConfig::load(&a.config)?;
    cfg.apply(&Overrides {
        seed: a.seed,
        realizations: a.realizations,
        na: a.na,
        dt: a.dt_prime,
        output: a.out.clone(),
    });
    let dir = output_dir(&cfg);
    let name = cfg.name().to_string();
    let art = run_single(mode, &cfg, &dir, &name)?;
    let mut lines = art.lines;
    lines.extend(art.files.iter().map(|f| format!("wrote {}", f.display())));
    Ok(lines)
}

fn mesh_info(level: u8, receptors: Option<usize>, seed: u64) -> Result<Vec<String>, CliError> {
    let mesh = build_mesh(level)?;
    let m = receptors.unwrap_or(mesh.triangle_count());
    let mesh = assign_receptors(mesh, m, seed)?;
    let s = mesh.stats;
    Ok(vec![
        format!("level = {level}"),
        format!("triangles = {}", s.triangles),
        format!("receptors = {}", mesh.receptor_ids().len()),
        format!("total_area = {}", s.total_area),
        format!("mean_area = {}", mesh.triangle_area),
        format!("min_area = {}", s.min_area),
        format!("max_area = {}", s.max_area),
        format!("area_ratio = {}", s.area_ratio),
        format!("max_radius_error = {:e}", s.max_radius_error),
    ])
}

fn render(inputs: &[PathBuf], out: &PathBuf, title: &str) -> Result<Vec<String>, CliError> {
    if inputs.is_empty() {
        return Err(CliError::Config("render needs at least one CSV".into()));
    }
    let series = inputs
        .iter()
        .map(|p| {
            let t = read_table(p)?;
            if t.columns.len() < 2 || t.rows.is_empty() {
                return Err(CliError::Config(format!("{}: nothing to plot", p.display())));
            }
            Ok((p.file_stem().unwrap_or_default().to_string_lossy().into_owned(), t))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let path = write_file(out, &svg(&series, title))?;
    Ok(vec![format!("wrote {}", path.display())])
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::Config(first).line());
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Analytic(a) => run_mode(Mode::Analytic, a),
        Command::Simulate(a) => run_mode(Mode::Simulate, a),
        Command::Compare(a) => run_mode(Mode::Compare, a),
        Command::Sweep(a) => run_mode(Mode::Sweep, a),
        Command::Homogenize(a) => run_mode(Mode::Homogenize, a),
        Command::MeshInfo { level, receptors, seed } => mesh_info(*level, *receptors, *seed),
        Command::Render { inputs, out, title } => render(inputs, out, title),
    };
    match result {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
