use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use edt::cli::{self, Caps};

/// Even-dicycle toolkit: evenness analysis, structure generators, and
/// packing-versus-transversal extraction at desk scale.
#[derive(Parser)]
#[command(name = "edt", version)]
struct Args {
    /// Hard cap on enumerated dicycles; exceeding it is an error, never a
    /// silent truncation.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    dicycle_cap: usize,
    /// Size gate for exhaustive searches.
    #[arg(long, default_value_t = 12, global = true)]
    size_gate: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evenness report: even dicycle, non-even verdict, strong components.
    Analyze { file: String },
    /// Emit a generated structure with its parametrisation sidecar.
    Generate {
        /// grid | wall | seggrid | oddbicycle | counterexample
        kind: String,
        /// Order parameter.
        k: usize,
        #[arg(long, default_value = "edgelist")]
        format: String,
        /// Write the graph here (sidecar goes to <out>.json); stdout if absent.
        #[arg(long)]
        out: Option<String>,
    },
    /// Maximum 1/n-integral packing of even dicycles.
    Pack {
        file: String,
        #[arg(long, default_value_t = 1)]
        denominator: usize,
    },
    /// Minimum even-dicycle transversal.
    Transversal { file: String },
    /// Run the main extraction against a strong odd tree-decomposition.
    Extract {
        file: String,
        decomposition: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Global decomposition with the desk-scale local oracle.
    Global {
        file: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Root set Z as vertex names.
        #[arg(long, value_delimiter = ',')]
        z: Vec<String>,
    },
    /// t pairwise internally disjoint paths, t <= 4.
    Ddpp {
        file: String,
        /// Pairs as s1:t1,s2:t2,...
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<String>,
    },
    /// Count perfect matchings of a matched bipartite graph two ways.
    Countpm { file: String },
}

fn read_input(path: &str) -> std::io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn run(args: Args) -> edt::Result<()> {
    let caps = Caps {
        dicycle_cap: args.dicycle_cap,
        size_gate: args.size_gate,
    };
    match args.command {
        Command::Analyze { file } => {
            let input = read_input(&file)?;
            let rep = cli::cmd_analyze(&input, &caps)?;
            println!("{}", serde_json::to_string_pretty(&rep.to_json()).unwrap());
        }
        Command::Generate {
            kind,
            k,
            format,
            out,
        } => {
            let g = cli::cmd_generate(&kind, k, &format, &caps)?;
            match out {
                None => {
                    println!("{}", g.body);
                    eprintln!("{}", serde_json::to_string_pretty(&g.sidecar).unwrap());
                }
                Some(path) => {
                    std::fs::write(&path, &g.body)?;
                    std::fs::write(
                        format!("{path}.json"),
                        serde_json::to_string_pretty(&g.sidecar).unwrap(),
                    )?;
                }
            }
        }
        Command::Pack { file, denominator } => {
            let input = read_input(&file)?;
            let rep = cli::cmd_pack(&input, denominator, &caps)?;
            println!("{}", serde_json::to_string_pretty(&rep.to_json()).unwrap());
        }
        Command::Transversal { file } => {
            let input = read_input(&file)?;
            let rep = cli::cmd_transversal(&input, &caps)?;
            println!("{}", serde_json::to_string_pretty(&rep.to_json()).unwrap());
        }
        Command::Extract {
            file,
            decomposition,
            k,
        } => {
            let input = read_input(&file)?;
            let dec = read_input(&decomposition)?;
            let rep = cli::cmd_extract(&input, &dec, k, &caps)?;
            println!("{}", serde_json::to_string_pretty(&rep.to_json()).unwrap());
        }
        Command::Global { file, k, z } => {
            let input = read_input(&file)?;
            let rep = cli::cmd_global(&input, k, &z, &caps)?;
            println!("{}", serde_json::to_string_pretty(&rep.to_json()).unwrap());
        }
        Command::Ddpp { file, pairs } => {
            let input = read_input(&file)?;
            let mut parsed = Vec::new();
            for p in &pairs {
                let (s, t) = p
                    .split_once(':')
                    .ok_or_else(|| edt::EdtError::pre(format!("pair `{p}` is not s:t")))?;
                parsed.push((s.to_string(), t.to_string()));
            }
            let rep = cli::cmd_ddpp(&input, &parsed, &caps)?;
            println!("{}", serde_json::to_string_pretty(&rep.to_json()).unwrap());
        }
        Command::Countpm { file } => {
            let input = read_input(&file)?;
            let rep = cli::cmd_countpm(&input, &caps)?;
            println!("{}", serde_json::to_string_pretty(&rep.to_json()).unwrap());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
