use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ebfvm::cli::{load_case, run_case, write_fields, CaseConfig};
use ebfvm::mesh::{generate_bearing_mesh, parse_mesh_file, write_mesh};

#[derive(Parser)]
#[command(name = "ebfvm", version, about = "Thermo-hydrodynamic journal bearing solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        action: MeshAction,
    },
    /// Run a case and write its fields.
    Run {
        case: PathBuf,
        /// Use this surface mesh instead of generating one.
        #[arg(long)]
        mesh: Option<PathBuf>,
        /// Skip the energy equation.
        #[arg(long)]
        isothermal: bool,
        /// Keep the journal at its starting position.
        #[arg(long)]
        no_equilibrium: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Parse a case, build its mesh and report problems.
    Validate { case: PathBuf },
}

#[derive(Subcommand)]
enum MeshAction {
    /// Generate the surface mesh of a case.
    Gen {
        case: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

const CONFIG_ERROR: u8 = 3;

fn load(path: &PathBuf) -> Result<CaseConfig, ExitCode> {
    load_case(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(CONFIG_ERROR)
    })
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Mesh {
            action: MeshAction::Gen { case, output },
        } => {
            let cfg = load(&case)?;
            let mesh = generate_bearing_mesh(&cfg.domain(), &cfg.texture_spec()).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(CONFIG_ERROR)
            })?;
            std::fs::write(&output, write_mesh(&mesh)).map_err(|e| {
                eprintln!("error: cannot write {}: {e}", output.display());
                ExitCode::FAILURE
            })?;
            println!(
                "wrote {} nodes, {} elements to {}",
                mesh.nodes.len(),
                mesh.elements.len(),
                output.display()
            );
        }
        Command::Run {
            case,
            mesh,
            isothermal,
            no_equilibrium,
            output,
        } => {
            let mut cfg = load(&case)?;
            cfg.coupling.isothermal |= isothermal;
            cfg.coupling.equilibrium &= !no_equilibrium;
            let mesh = match mesh {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        eprintln!("error: cannot read {}: {e}", path.display());
                        ExitCode::from(CONFIG_ERROR)
                    })?;
                    Some(parse_mesh_file(&text).map_err(|e| {
                        eprintln!("error: {}: {e}", path.display());
                        ExitCode::from(CONFIG_ERROR)
                    })?)
                }
                None => None,
            };
            let results = run_case(&cfg, mesh).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            })?;
            write_fields(&results, &output, &cfg.output).map_err(|e| {
                eprintln!("error: cannot write results: {e}");
                ExitCode::FAILURE
            })?;
            let [wx, wy, mx, my] = results.loads;
            println!(
                "outer iterations {}, loads W = ({wx:.6e}, {wy:.6e}) N, M = ({mx:.6e}, {my:.6e}) N·m",
                results.outer_iterations
            );
            println!("journal position q = {:?}", results.q);
            if !results.converged {
                eprintln!("warning: outer loop did not converge");
                return Err(ExitCode::from(2));
            }
        }
        Command::Validate { case } => {
            let cfg = load(&case)?;
            let mesh = generate_bearing_mesh(&cfg.domain(), &cfg.texture_spec()).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(CONFIG_ERROR)
            })?;
            println!(
                "case is valid: {} surface nodes, {} elements, {} layers",
                mesh.nodes.len(),
                mesh.elements.len(),
                cfg.mesh.n_layers
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
