use clap::{Parser, Subcommand};
use escg::certify::{build_1d_operators, certify, inflow_penalty};
use escg::config::SchemeConfig;
use escg::mesh::Mesh;
use escg::scenario::run_scenario;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "escg",
    about = "Entropy-stable continuous Galerkin solver for scalar conservation laws",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a plain-text config file.
    Run { config: PathBuf },
    /// 1D SBP-SAT stability certificate for an inflow penalty tau E00.
    Certify {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        elements: usize,
        #[arg(long, allow_hyphen_values = true)]
        speed: f64,
        #[arg(long, allow_hyphen_values = true)]
        tau: f64,
    },
    /// Generate a mesh file in the ASCII vertex/triangle format.
    MeshGen {
        /// Subdivisions per side (square) or number of rings (disk).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "square")]
        shape: String,
    },
    /// Print the version string.
    Version,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage and parse problems exit 1; --help/--version exit 0
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> escg::Result<ExitCode> {
    match cli.command {
        Command::Run { config } => {
            let cfg = SchemeConfig::from_file(&config.display().to_string())?;
            let outcome = run_scenario(&cfg)?;
            let last = outcome.report.records.last();
            println!(
                "scenario {}: {} steps to t = {:.6}",
                cfg.scenario, outcome.steps_completed, outcome.time
            );
            if let Some(r) = last {
                println!(
                    "entropy = {:.16e}  change = {:.16e}  u in [{:.6}, {:.6}]",
                    r.entropy, r.entropy_change, r.min_u, r.max_u
                );
            }
            if let Some(dir) = &cfg.out_dir {
                println!("wrote entropy.csv and field snapshots to {dir}");
            }
            if let Some(msg) = &outcome.abort {
                eprintln!("numerical abort at {msg}");
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify {
            degree,
            elements,
            speed,
            tau,
        } => {
            let ops = build_1d_operators(degree, elements)?;
            let n = ops.derivative.nrows();
            let cert = certify(&ops.mass, &ops.derivative, speed, &inflow_penalty(n, tau))?;
            let eigs: Vec<String> = cert
                .eigenvalues
                .iter()
                .map(|e| format!("{e:.6}"))
                .collect();
            println!("test-matrix eigenvalues: [{}]", eigs.join(", "));
            println!("max eigenvalue: {:.16e}", cert.max_eigenvalue);
            println!("{}", if cert.stable { "STABLE" } else { "UNSTABLE" });
            Ok(ExitCode::SUCCESS)
        }
        Command::MeshGen { n, out, shape } => {
            let mesh = match shape.to_ascii_lowercase().as_str() {
                "square" => Mesh::generate_square(n, 1)?,
                "disk" => Mesh::generate_disk(n, 1)?,
                other => {
                    return Err(escg::Error::Config(format!(
                        "unknown mesh shape '{other}' (square or disk)"
                    )))
                }
            };
            std::fs::write(&out, mesh.export_ascii()).map_err(|source| escg::Error::Io {
                path: out.display().to_string(),
                source,
            })?;
            println!(
                "wrote {} vertices, {} triangles to {}",
                mesh.n_vertices,
                mesh.elements.len(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Version => {
            println!("escg {}", env!("CARGO_PKG_VERSION"));
            Ok(ExitCode::SUCCESS)
        }
    }
}
