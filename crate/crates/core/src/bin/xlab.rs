use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use xlab_core::densities::{density, HomMeasure};
use xlab_core::experiments::{list_experiments, run_experiment, write_result, ExperimentConfig};
use xlab_core::graphs::{parse_graph, Bigraph};
use xlab_core::scalar::format_rational;
use xlab_core::seqmeasure::{k22_order_experiment, order_independence_report, write_k22_csv};
use xlab_core::spaces::AnySpace;
use xlab_core::spectral::{convolution_report, spectrum, write_convolution_csv};
use xlab_core::{Graph, Result};

/// Homomorphism densities, measures and spectra on finite Markov spaces.
#[derive(Parser)]
#[command(name = "xlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered experiments.
    List,
    /// Run an experiment from a JSON config.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overwrite a nonempty output directory.
        #[arg(long)]
        force: bool,
        /// Recompute derived expectations and write them next to the results.
        #[arg(long)]
        oracle: bool,
    },
    /// Homomorphism density of a pattern in a space.
    Density {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        normalized: bool,
        /// Read the pattern as bigraph JSON.
        #[arg(long)]
        bigraph: bool,
        #[arg(long)]
        json: bool,
    },
    /// Sequential star construction along several vertex orders.
    Seq {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        space: PathBuf,
        #[arg(long, default_value_t = 20)]
        orders: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Orthogonal sampling of K_2,2 on the sphere under two vertex orders.
    #[command(name = "sphere-k22")]
    SphereK22 {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Eigenvalues of the adjacency operator, sorted descending.
    Spectrum {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Eigenvalues of the logarithmic convolution graphon.
    Convolution {
        #[arg(long, default_value_t = 4096)]
        kmax: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        powers: Vec<u32>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_space(path: &Path) -> Result<AnySpace> {
    AnySpace::from_json_str(&fs::read_to_string(path)?)
}

fn read_pattern(path: &Path, bigraph: bool) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    if bigraph {
        Ok(Bigraph::from_json(&text)?.to_graph())
    } else {
        parse_graph(&text)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::List => {
            for e in list_experiments() {
                writeln!(stdout, "{:<22}{}", e.name, e.description)?;
            }
        }
        Command::Run { config, out, force, oracle } => {
            let cfg = ExperimentConfig::from_json_str(&fs::read_to_string(&config)?)?;
            let result = run_experiment(&cfg, oracle)?;
            write_result(&result, &out, force)?;
            for a in &result.assertions {
                writeln!(
                    stdout,
                    "{} {}: measured {} expected {}",
                    if a.pass { "PASS" } else { "FAIL" },
                    a.name,
                    a.measured,
                    a.expected
                )?;
            }
            if !result.all_pass() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Density { graph, space, normalized, bigraph, json } => {
            let g = read_pattern(&graph, bigraph)?;
            let s = read_space(&space)?;
            let (t, width) = match &s {
                AnySpace::F64(s) => {
                    (json!(density(&g, s, normalized)?), HomMeasure::new(&g, s).factor_graph().width(&[]))
                }
                AnySpace::Rational(s) => (
                    json!(format_rational(&density(&g, s, normalized)?)),
                    HomMeasure::new(&g, s).factor_graph().width(&[]),
                ),
            };
            if json {
                writeln!(stdout, "{}", json!({"t": t, "width": width, "mode": s.mode().to_string()}))?;
            } else {
                match t {
                    serde_json::Value::String(r) => writeln!(stdout, "{r}")?,
                    other => writeln!(stdout, "{other}")?,
                }
            }
        }
        Command::Seq { graph, space, orders, seed, report } => {
            let g = read_pattern(&graph, false)?;
            let r = match read_space(&space)? {
                AnySpace::F64(s) => order_independence_report(&g, &s, orders, seed)?,
                AnySpace::Rational(s) => order_independence_report(&g, &s, orders, seed)?,
            };
            writeln!(stdout, "orders_tested {}", r.orders_tested)?;
            writeln!(stdout, "max_deviation {}", r.max_deviation)?;
            writeln!(stdout, "max_deviation_from_hom {}", r.max_deviation_from_hom)?;
            if let Some(path) = report {
                let mut w = BufWriter::new(fs::File::create(path)?);
                writeln!(w, "order_index,order,total_mass")?;
                for (i, (o, m)) in r.orders.iter().zip(&r.total_masses).enumerate() {
                    let o: Vec<String> = o.iter().map(|v| v.to_string()).collect();
                    writeln!(w, "{i},{},{m}", o.join(" "))?;
                }
                w.flush()?;
            }
        }
        Command::SphereK22 { d, samples, seed, out } => {
            let r = k22_order_experiment(d, samples, seed)?;
            let mut w = BufWriter::new(fs::File::create(out)?);
            write_k22_csv(&r, &mut w)?;
            w.flush()?;
            writeln!(stdout, "mass_at_one {}", r.mass_at_one)?;
            writeln!(stdout, "ks_vs_uniform {}", r.ks_vs_uniform)?;
        }
        Command::Spectrum { space, json } => {
            let spec = match read_space(&space)? {
                AnySpace::F64(s) => spectrum(&s)?,
                AnySpace::Rational(s) => spectrum(&s)?,
            };
            if json {
                writeln!(stdout, "{}", json!({"eigenvalues": spec.values(), "residual": spec.residual()}))?;
            } else {
                for v in spec.values() {
                    writeln!(stdout, "{v}")?;
                }
            }
        }
        Command::Convolution { kmax, powers, out } => {
            let r = convolution_report(kmax, &powers)?;
            let mut w = BufWriter::new(fs::File::create(out)?);
            write_convolution_csv(&r, &mut w)?;
            w.flush()?;
            for p in &r.partial_sums {
                let sums: Vec<String> = p.checkpoints.iter().zip(&p.sums).map(|(k, s)| format!("{k}:{s}")).collect();
                writeln!(stdout, "power {} partial sums {}", p.power, sums.join(" "))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
