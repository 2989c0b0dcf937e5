//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 when any
//! optimized point failed to converge.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::ansatz::{complexity_report, counted_complexity, AnsatzSpec, MEASUREMENT_DEPTH};
use crate::config::{config_hash, LogBase, RunConfig};
use crate::error::{Error, Result};
use crate::fermion_ed::solve_point;
use crate::jw::build_qubit_hamiltonian;
use crate::rng::derive_seed;
use crate::vqe::{params_from_text, params_to_text, sweep_flux, Problem, SweepOptions};

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "SUNVQE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sunvqe",
    version,
    about = "VQE and exact diagonalization for SU(N) Hubbard rings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Replaces the seed list of the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores, or $SUNVQE_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Replaces `output.directory`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the qubit Hamiltonian at `model.phi`.
    Map {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact energy, current and entropy along the flux grid.
    Ed { config: PathBuf },
    /// Optimize along the flux grid for every seed.
    Vqe { config: PathBuf },
    /// Re-evaluate saved parameters with finite shots.
    Sample {
        config: PathBuf,
        /// Directory of parameter files (default: `<output>/params`).
        #[arg(long)]
        params: Option<PathBuf>,
        /// Shot budgets per group; default `vqe.shots`.
        #[arg(long, value_delimiter = ',')]
        shots: Vec<u64>,
    },
    /// Gate counts and depth of the ansatz.
    Counts { config: PathBuf },
    /// Print the default configuration.
    Defaults,
}

struct Loaded {
    config: RunConfig,
    hash: String,
    dir: PathBuf,
}

fn load(path: &Path, cli: &Cli) -> Result<Loaded> {
    let (mut config, text) = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.vqe.seeds = vec![seed];
    }
    let dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.directory));
    Ok(Loaded {
        config,
        hash: config_hash(&text),
        dir,
    })
}

fn float(v: f64) -> String {
    format!("{:.16e}", v)
}

fn header(l: &Loaded, command: &str) -> String {
    let seeds: Vec<String> = l.config.vqe.seeds.iter().map(|s| s.to_string()).collect();
    format!(
        "# command {}\n# config_sha256 {}\n# seed {}\n",
        command,
        l.hash,
        seeds.join(" ")
    )
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, body)?;
    Ok(())
}

fn entropy_scale(c: &RunConfig) -> f64 {
    match c.output.log_base {
        LogBase::Natural => 1.0,
        LogBase::Bits => std::f64::consts::LN_2.recip(),
    }
}

fn cmd_map(l: &Loaded, output: Option<PathBuf>, out: &mut dyn Write) -> Result<i32> {
    let h = build_qubit_hamiltonian(&l.config.model(), &l.config.sector())?;
    let path = output.unwrap_or_else(|| l.dir.join("hamiltonian.txt"));
    write_file(&path, &h.to_text())?;
    writeln!(
        out,
        "wrote {} ({} terms)",
        path.display(),
        h.to_text().lines().count() - 1
    )?;
    Ok(EXIT_OK)
}

fn cmd_ed(l: &Loaded, out: &mut dyn Write) -> Result<i32> {
    let c = &l.config;
    let scale = entropy_scale(c);
    let mut csv = header(l, "ed");
    csv.push_str("phi,energy_ed,current_ed,entropy_ed,at_crossing\n");
    for phi in c.grid() {
        let p = solve_point(&c.model().with_flux(phi), &c.sector(), &c.cut())?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            float(phi),
            float(p.energy),
            float(p.current),
            float(p.entropy * scale),
            p.at_crossing
        );
    }
    let path = l.dir.join("ed.csv");
    write_file(&path, &csv)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(EXIT_OK)
}

fn params_path(dir: &Path, seed: u64, k: usize) -> PathBuf {
    dir.join("params").join(format!("seed{}_phi{:03}.txt", seed, k))
}

fn cmd_vqe(l: &Loaded, out: &mut dyn Write) -> Result<i32> {
    let c = &l.config;
    let scale = entropy_scale(c);
    let grid = c.grid();
    let mut csv = header(l, "vqe");
    csv.push_str(
        "phi,energy_vqe,energy_ed,current_vqe,current_ed,entropy_vqe,entropy_ed,layers,seed,evals,converged\n",
    );
    let mut all_converged = true;
    let options = SweepOptions {
        mirror: c.sweep.mirror,
        cut: Some(c.cut()),
    };
    for &seed in &c.vqe.seeds {
        let r = sweep_flux(&c.model(), &c.sector(), &grid, &c.vqe_config(seed), &options)?;
        for (k, p) in r.points.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{},{}",
                float(p.flux),
                float(p.energy_vqe),
                float(p.energy_ed),
                float(p.current_vqe),
                float(p.current_ed),
                float(p.entropy_vqe * scale),
                float(p.entropy_ed * scale),
                r.layers,
                seed,
                p.evaluations,
                p.converged
            );
            let body = format!(
                "# phi {}\n# layers {}\n{}",
                float(p.flux),
                r.layers,
                params_to_text(&p.params)
            );
            write_file(&params_path(&l.dir, seed, k), &body)?;
        }
        all_converged &= r.all_converged();
        writeln!(
            out,
            "seed {}: max relative energy error {:.3e}",
            seed,
            r.max_relative_error()
        )?;
    }
    let path = l.dir.join("vqe.csv");
    write_file(&path, &csv)?;
    writeln!(out, "wrote {}", path.display())?;
    if all_converged {
        Ok(EXIT_OK)
    } else {
        writeln!(out, "some points did not converge")?;
        Ok(EXIT_NOT_CONVERGED)
    }
}

fn cmd_sample(l: &Loaded, params: Option<PathBuf>, shots: &[u64], out: &mut dyn Write) -> Result<i32> {
    let c = &l.config;
    let shots: Vec<u64> = if shots.is_empty() {
        vec![c.vqe.shots]
    } else {
        shots.to_vec()
    };
    if shots.contains(&0) {
        return Err(Error::range("shots", "must be >= 1"));
    }
    let pdir = params.unwrap_or_else(|| l.dir.join("params"));
    let master = c.vqe.seeds[0];
    let mut csv = header(l, "sample");
    csv.push_str("phi,seed,shots,mean,stderr,energy_exact\n");
    for (k, &phi) in c.grid().iter().enumerate() {
        let problem = Problem::with_ansatz(
            &c.model().with_flux(phi),
            &c.sector(),
            &AnsatzSpec::new(&c.model(), &c.sector(), c.vqe.layers).with_occupation(c.occupation()),
        )?;
        for &seed in &c.vqe.seeds {
            let file = pdir.join(format!("seed{}_phi{:03}.txt", seed, k));
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::Config(format!("cannot read {}: {}", file.display(), e)))?;
            let x = params_from_text(&text)?;
            let exact = problem.energy(&x)?;
            for &n in &shots {
                let est = problem.sampled_energy(&x, n, derive_seed(master, &[seed, k as u64, n]))?;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    float(phi),
                    seed,
                    n,
                    float(est.mean),
                    float(est.stderr),
                    float(exact)
                );
            }
        }
    }
    let path = l.dir.join("sample.csv");
    write_file(&path, &csv)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(EXIT_OK)
}

fn cmd_counts(l: &Loaded, out: &mut dyn Write) -> Result<i32> {
    let c = &l.config;
    let spec = AnsatzSpec::new(&c.model(), &c.sector(), c.vqe.layers).with_occupation(c.occupation());
    let counted = counted_complexity(&spec)?;
    let formula = complexity_report(c.model.colors, c.model.sites, c.vqe.layers, c.sector().particles());
    writeln!(
        out,
        "N = {}, L = {}, layers = {}",
        c.model.colors, c.model.sites, c.vqe.layers
    )?;
    writeln!(out, "{:<22}{:>10}{:>10}", "", "counted", "formula")?;
    writeln!(
        out,
        "{:<22}{:>10}{:>10}",
        "CNOT gates", counted.cnot_count, formula.cnot_count
    )?;
    writeln!(out, "{:<22}{:>10}{:>10}", "CNOT depth", counted.depth, formula.depth)?;
    writeln!(
        out,
        "{:<22}{:>10}{:>10}",
        "parameters", counted.parameter_count, formula.parameter_count
    )?;
    writeln!(
        out,
        "{:<22}{:>10}{:>10}",
        "parameters per layer", counted.parameters_per_layer, formula.parameters_per_layer
    )?;
    writeln!(
        out,
        "{:<22}{:>10}{:>10}",
        "measurement depth", MEASUREMENT_DEPTH, MEASUREMENT_DEPTH
    )?;
    writeln!(out, "N,L,layers,cnot,depth,parameters,measurement_depth")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        c.model.colors,
        c.model.sites,
        c.vqe.layers,
        counted.cnot_count,
        counted.depth,
        counted.parameter_count,
        MEASUREMENT_DEPTH
    )?;
    Ok(EXIT_OK)
}

fn configure_threads(cli: &Cli) {
    let n = cli
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    if let Some(n) = n {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    configure_threads(cli);
    match &cli.command {
        Command::Defaults => {
            write!(out, "{}", RunConfig::default().to_toml())?;
            Ok(EXIT_OK)
        }
        Command::Map { config, output } => cmd_map(&load(config, cli)?, output.clone(), out),
        Command::Ed { config } => cmd_ed(&load(config, cli)?, out),
        Command::Vqe { config } => cmd_vqe(&load(config, cli)?, out),
        Command::Sample { config, params, shots } => cmd_sample(&load(config, cli)?, params.clone(), shots, out),
        Command::Counts { config } => cmd_counts(&load(config, cli)?, out),
    }
}

/// Runs the command line `args` (program name first), writing reports to
/// `out` and errors to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{}", e);
            } else {
                let _ = write!(err, "{}", e);
            }
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            EXIT_CONFIG
        }
    }
}
