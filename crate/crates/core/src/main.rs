use std::fs::File;
use std::io::{BufWriter, ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qst_sim::io::{parse_config, write_csv, write_svg};
use qst_sim::{
    generate_state_sample, preset, reconstruct, run_sweep, run_sweep_with_threads, sic_povm,
    transmittance, ChannelParams, CountVector, EstimatorOptions, ScenarioConfig, SourceParams,
    StateSample, SweepResult,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qst-sim",
    version,
    about = "Qubit tomography over noisy fiber links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a configuration file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_svg: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides seed.master from the file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one of the built-in experiment families.
    Preset {
        #[arg(long, value_parser = ["fig1", "fig2", "fig3"])]
        name: String,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_svg: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Reconstruct a state from four measured counts.
    Reconstruct {
        /// Comma-separated counts m1,m2,m3,m4.
        #[arg(long)]
        counts: String,
        #[arg(long)]
        mean_photons: f64,
        #[arg(long)]
        length_km: f64,
        /// Attenuation in dB/km.
        #[arg(long, default_value_t = 0.2)]
        gamma: f64,
    },
    /// Parse and validate a configuration file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn exit(self) -> ExitCode {
        match self {
            Failure::Config(msg) => {
                eprintln!("config error: {msg}");
                ExitCode::from(EXIT_CONFIG)
            }
            Failure::Runtime(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(EXIT_RUNTIME)
            }
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

fn load_config(path: &Path) -> Result<qst_sim::io::RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn sweep_all(
    scenarios: &[ScenarioConfig],
    sample: &StateSample,
    threads: Option<usize>,
) -> Result<Vec<SweepResult>, Failure> {
    scenarios
        .iter()
        .map(|scenario| match threads {
            Some(n) => run_sweep_with_threads(scenario, sample, n),
            None => run_sweep(scenario, sample),
        })
        .collect::<Result<_, _>>()
        .map_err(runtime)
}

fn emit(results: &[SweepResult], csv: &Path, svg: Option<&Path>) -> Result<(), Failure> {
    let create = |p: &Path| {
        File::create(p)
            .map(BufWriter::new)
            .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", p.display())))
    };
    write_csv(results, create(csv)?).map_err(runtime)?;
    if let Some(svg) = svg {
        write_svg(results, create(svg)?).map_err(runtime)?;
    }
    Ok(())
}

fn parse_counts(text: &str) -> Result<CountVector, Failure> {
    let values: Vec<u64> = text
        .split(',')
        .map(|v| v.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Config(format!("--counts: {e}")))?;
    let counts: [u64; 4] = values.try_into().map_err(|v: Vec<u64>| {
        Failure::Config(format!("--counts needs 4 values, got {}", v.len()))
    })?;
    Ok(CountVector(counts))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            config,
            out_csv,
            out_svg,
            threads,
            seed,
        } => {
            let mut run = load_config(&config)?;
            if let Some(seed) = seed {
                run.scenario.master_seed = seed;
            }
            let sample = generate_state_sample(run.n_theta, run.n_phi).map_err(runtime)?;
            let results = sweep_all(std::slice::from_ref(&run.scenario), &sample, threads)?;
            emit(&results, &out_csv, out_svg.as_deref())
        }
        Command::Preset {
            name,
            out_csv,
            out_svg,
            seed,
            threads,
        } => {
            let scenarios = preset(&name, seed).map_err(|e| Failure::Config(e.to_string()))?;
            let sample = generate_state_sample(10, 20).map_err(runtime)?;
            let results = sweep_all(&scenarios, &sample, threads)?;
            emit(&results, &out_csv, out_svg.as_deref())
        }
        Command::Reconstruct {
            counts,
            mean_photons,
            length_km,
            gamma,
        } => {
            let counts = parse_counts(&counts)?;
            let source =
                SourceParams::new(mean_photons).map_err(|e| Failure::Config(e.to_string()))?;
            let channel = ChannelParams {
                gamma_db_per_km: gamma,
                length_km,
                ..ChannelParams::default()
            };
            channel
                .validate()
                .map_err(|e| Failure::Config(e.to_string()))?;
            let eta = transmittance(&channel);
            let fit = reconstruct(
                &counts,
                &source,
                eta,
                &sic_povm(),
                &EstimatorOptions::default(),
            )
            .map_err(runtime)?;
            let m = fit.rho_hat.matrix();
            let mut text = String::new();
            for row in 0..2 {
                let cells: Vec<String> = (0..2)
                    .map(|col| {
                        let z = m.get(row, col);
                        format!("{:+.9} {:+.9}i", z.re, z.im)
                    })
                    .collect();
                text += &format!("rho[{row}] = {}\n", cells.join("  "));
            }
            let [x, y, z] = fit.rho_hat.bloch_vector();
            text += &format!("bloch = ({x:.9}, {y:.9}, {z:.9})\n");
            text += &format!("purity = {:.9}\n", fit.rho_hat.purity());
            text += &format!("transmittance = {eta:.9e}\n");
            text += &format!("objective = {:.9e}\n", fit.objective_value);
            text += &format!("converged = {}\n", fit.converged);
            text += &format!("restarts = {}\n", fit.restarts_used);
            print_out(&text)
        }
        Command::Validate { config } => {
            let run = load_config(&config)?;
            print_out(&format!(
                "ok: scenario '{}' with {} lengths and {} states\n",
                run.scenario.label,
                run.scenario.lengths_km.len(),
                run.n_theta * run.n_phi
            ))
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn print_out(text: &str) -> Result<(), Failure> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(runtime(e)),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => failure.exit(),
    }
}
