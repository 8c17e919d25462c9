//! `qbp` — simulate, convert and analyze branching programs and query
//! circuits stored as JSON documents.
//!
//! Exit codes: `0` success (valid / equivalent), `1` negative finding
//! (invariant violations, inequivalence), `2` usage, parse or precondition
//! errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};

use qbp_cli::docs::{self, Document, Model};
use qbp_core::analysis::{equivalent, exact_degree, length_bound_from_degree};
use qbp_core::circuit::{accept_prob_circuit, OracleModel};
use qbp_core::sim::{
    accept_prob_gqbp, format_input, parse_input, run_aqbp, run_nqbp, run_probabilistic,
    truth_table, TableKind,
};
use qbp_core::transpile::{
    aqbp_to_gqbp, aqbp_to_oracle_circuit, aqbp_to_qram_circuit, fuse_to_alternating,
    gqbp_to_nqbp, gqbp_to_oracle_circuit, nqbp_to_gqbp, phase_circuit_to_gqbp,
    qram_circuit_to_aqbp, remove_dummy_levels, TranspileCertificate,
};
use qbp_core::{degree_tol, zoo, Table};

#[derive(Parser)]
#[command(
    name = "qbp",
    version,
    about = "Simulate, convert and analyze branching programs and query circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every structural and algebraic invariant of a document
    ///
    /// Prints "ok" and exits 0, or prints one violation per line and
    /// exits 1. Unreadable or unparsable documents exit 2.
    Validate {
        /// Document to check
        path: PathBuf,
    },
    /// Print the acceptance probability on one input
    ///
    /// Non-uniform programs print a second line with the rejection and
    /// residual (never-measured) probability mass.
    Run {
        /// Program or circuit document
        path: PathBuf,
        /// Input bits, e.g. "0110"; character i is variable i
        #[arg(long)]
        input: String,
    },
    /// Print the acceptance probability for every input
    ///
    /// One "bitstring probability" row per input, in mask order.
    Table {
        /// Program or circuit document
        path: PathBuf,
        /// Emit a table document instead of text rows
        #[arg(long)]
        json: bool,
    },
    /// Convert a document into another model family
    ///
    /// Writes the converted document and prints one resource certificate
    /// per conversion stage. Unsupported directions exit 2 with an
    /// explanation.
    Transpile {
        /// Source document
        path: PathBuf,
        /// Target family
        #[arg(long, value_enum)]
        to: Target,
        /// Also strip input-independent levels (only with --to gqbp)
        #[arg(long)]
        remove_dummies: bool,
        /// Write the converted document here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit a library program or a reproducible random instance
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Print the polynomial degree and the length lower bound it implies
    Degree {
        /// Program or circuit document to tabulate exactly
        #[arg(required_unless_present = "table", conflicts_with = "table")]
        path: Option<PathBuf>,
        /// Use an existing table document as-is
        #[arg(long, value_name = "PATH")]
        table: Option<PathBuf>,
    },
    /// Decide whether two documents accept with equal probabilities
    ///
    /// Exits 0 when equivalent, 1 with a witness input when not.
    Equiv {
        /// First document
        path_a: PathBuf,
        /// Second document
        path_b: PathBuf,
        /// Largest acceptable per-input deviation
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

/// Families a document can be converted into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    /// Level-structured quantum program
    Gqbp,
    /// Non-uniform quantum program
    Nqbp,
    /// Register-style quantum program
    Aqbp,
    /// Circuit with input-conditioned gates
    CircuitQram,
    /// Circuit with black-box oracle calls
    CircuitOracle,
}

#[derive(Subcommand)]
enum Family {
    /// Width-2 exact parity program; n must be even
    Parity {
        /// Number of input bits
        #[arg(long)]
        n: usize,
        /// Write the document here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Majority of three bits
    Maj3 {
        /// Write the document here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Single-query constant-vs-balanced distinguisher; n must be a power of two
    Dj {
        /// Number of input bits
        #[arg(long)]
        n: usize,
        /// Write the document here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random well-behaved level-structured program
    RandomGqbp {
        /// Width of every level
        #[arg(long)]
        w: usize,
        /// Number of steps
        #[arg(long)]
        l: usize,
        /// Number of input bits
        #[arg(long)]
        n: usize,
        /// Random seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the document here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random register-style program
    RandomAqbp {
        /// Register dimension
        #[arg(long)]
        d: usize,
        /// Number of steps
        #[arg(long)]
        l: usize,
        /// Number of input bits
        #[arg(long)]
        n: usize,
        /// Random seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the document here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Run { path, input } => cmd_run(&path, &input),
        Command::Table { path, json } => cmd_table(&path, json),
        Command::Transpile { path, to, remove_dummies, output } => {
            cmd_transpile(&path, to, remove_dummies, output.as_deref())
        }
        Command::Gen { family } => cmd_gen(family),
        Command::Degree { path, table } => cmd_degree(path.as_deref(), table.as_deref()),
        Command::Equiv { path_a, path_b, tol } => cmd_equiv(&path_a, &path_b, tol),
    }
}

fn cmd_validate(path: &Path) -> Result<ExitCode> {
    let doc = Document::load(path)?;
    if let Document::Table(t) = &doc {
        return Ok(match docs::decode_table(t) {
            Ok(_) => {
                println!("ok");
                ExitCode::SUCCESS
            }
            Err(e) => {
                println!("{e:#}");
                ExitCode::from(1)
            }
        });
    }
    // Name-resolution and shape problems found while building the model
    // are reported as findings, like the validator's own violations.
    match doc.to_model() {
        Err(e) => {
            println!("{e:#}");
            Ok(ExitCode::from(1))
        }
        Ok(model) => {
            let report = model.validate();
            println!("{report}");
            Ok(if report.ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn cmd_run(path: &Path, input: &str) -> Result<ExitCode> {
    let model = Document::load(path)?.to_model()?;
    let x = parse_input(input, model.input_bits())?;
    match &model {
        Model::Gqbp(g) => println!("{:.12}", accept_prob_gqbp(g, x)?),
        Model::Aqbp(a) => println!("{:.12}", run_aqbp(a, x)?),
        Model::Classical(b) => println!("{:.12}", run_probabilistic(b, x)?),
        Model::Circuit(c) => println!("{:.12}", accept_prob_circuit(c, x)?),
        Model::Nqbp(p) => {
            let out = run_nqbp(p, x)?;
            println!("{:.12}", out.p_acc);
            println!("p_rej={:.12} p_residual={:.12}", out.p_rej, out.p_residual);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table(path: &Path, json: bool) -> Result<ExitCode> {
    let doc = Document::load(path)?;
    let table: Table = match &doc {
        Document::Table(t) => docs::decode_table(t)?,
        _ => truth_table(doc.to_model()?.as_acceptance(), TableKind::Probability)?,
    };
    if json {
        print!("{}", Document::from(&table).to_json_string()?);
    } else {
        for x in 0..(1u64 << table.n) {
            println!("{} {:.12}", format_input(x, table.n), table.value(x));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_transpile(
    path: &Path,
    to: Target,
    remove_dummies: bool,
    output: Option<&Path>,
) -> Result<ExitCode> {
    if remove_dummies && to != Target::Gqbp {
        bail!("--remove-dummies only applies to --to gqbp");
    }
    let model = Document::load(path)?.to_model()?;
    let mut certs: Vec<TranspileCertificate> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let identity = |kind: &str, notes: &mut Vec<String>| {
        notes.push(format!("already a {kind} document; no conversion applied"));
    };

    let result: Model = match to {
        Target::Gqbp => {
            let mut g = match &model {
                Model::Gqbp(g) => {
                    identity("gqbp", &mut notes);
                    g.clone()
                }
                Model::Aqbp(a) => {
                    let (g, c) = aqbp_to_gqbp(a)?;
                    certs.push(c);
                    g
                }
                Model::Nqbp(p) => {
                    let (g, c) = nqbp_to_gqbp(p)?;
                    certs.push(c);
                    g
                }
                Model::Circuit(c) => {
                    if c.oracle_model != OracleModel::Phase {
                        bail!(
                            "only phase-oracle circuits convert to gqbp; convert a {} circuit \
                             to aqbp instead",
                            c.oracle_model
                        );
                    }
                    let fused = fuse_to_alternating(c)?;
                    let (g, cert) = phase_circuit_to_gqbp(&fused)?;
                    certs.push(cert);
                    g
                }
                Model::Classical(_) => {
                    bail!("no conversion from classical programs to gqbp is available")
                }
            };
            if remove_dummies {
                let (clean, cert) = remove_dummy_levels(&g)?;
                certs.push(cert);
                g = clean;
            }
            Model::Gqbp(g)
        }
        Target::Nqbp => match &model {
            Model::Nqbp(p) => {
                identity("nqbp", &mut notes);
                Model::Nqbp(p.clone())
            }
            Model::Gqbp(g) => {
                let (p, c) = gqbp_to_nqbp(g)?;
                certs.push(c);
                Model::Nqbp(p)
            }
            m => bail!(
                "no conversion from {} to nqbp is available; convert to gqbp first",
                m.kind_name()
            ),
        },
        Target::Aqbp => match &model {
            Model::Aqbp(a) => {
                identity("aqbp", &mut notes);
                Model::Aqbp(a.clone())
            }
            Model::Circuit(c) => {
                let (a, cert) = qram_circuit_to_aqbp(c)?;
                certs.push(cert);
                Model::Aqbp(a)
            }
            m => bail!("no conversion from {} to aqbp is available", m.kind_name()),
        },
        Target::CircuitQram => match &model {
            Model::Aqbp(a) => {
                let (c, cert) = aqbp_to_qram_circuit(a)?;
                certs.push(cert);
                Model::Circuit(c)
            }
            m => bail!(
                "no conversion from {} to circuit-qram is available; only aqbp programs \
                 compile to input-conditioned circuits",
                m.kind_name()
            ),
        },
        Target::CircuitOracle => match &model {
            Model::Gqbp(g) => {
                let (c, cert) = gqbp_to_oracle_circuit(g)?;
                certs.push(cert);
                Model::Circuit(c)
            }
            Model::Aqbp(a) => {
                let (c, cert) = aqbp_to_oracle_circuit(a)?;
                certs.push(cert);
                Model::Circuit(c)
            }
            m => bail!("no conversion from {} to circuit-oracle is available", m.kind_name()),
        },
    };

    let doc = Document::from(&result);
    match output {
        Some(p) => {
            doc.save(p)?;
            for note in &notes {
                println!("{note}");
            }
            for c in &certs {
                println!("{c}");
            }
        }
        None => {
            print!("{}", doc.to_json_string()?);
            for note in &notes {
                eprintln!("{note}");
            }
            for c in &certs {
                eprintln!("{c}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(family: Family) -> Result<ExitCode> {
    let (doc, output) = match family {
        Family::Parity { n, output } => (Document::from(&zoo::build_parity::<f64>(n)?), output),
        Family::Maj3 { output } => (Document::from(&zoo::build_maj3::<f64>()), output),
        Family::Dj { n, output } => (Document::from(&zoo::build_dj::<f64>(n)?), output),
        Family::RandomGqbp { w, l, n, seed, output } => {
            if w == 0 || l == 0 || n == 0 {
                bail!("random-gqbp requires --w, --l and --n to be at least 1");
            }
            (Document::from(&zoo::random_phase_gqbp::<f64>(w, l, n, seed)), output)
        }
        Family::RandomAqbp { d, l, n, seed, output } => {
            if d == 0 || n == 0 {
                bail!("random-aqbp requires --d and --n to be at least 1");
            }
            (Document::from(&zoo::random_aqbp::<f64>(d, l, n, seed)), output)
        }
    };
    match output {
        Some(p) => doc.save(&p)?,
        None => print!("{}", doc.to_json_string()?),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_degree(path: Option<&Path>, table_path: Option<&Path>) -> Result<ExitCode> {
    let table: Table = match (path, table_path) {
        (Some(p), None) => {
            let doc = Document::load(p)?;
            match &doc {
                Document::Table(t) => docs::decode_table(t)?,
                _ => truth_table(doc.to_model()?.as_acceptance(), TableKind::Boolean)?,
            }
        }
        (None, Some(p)) => match Document::load(p)? {
            Document::Table(t) => docs::decode_table(&t)?,
            d => bail!("--table expects a table document, found kind {}", d.kind_name()),
        },
        _ => bail!("give either a document path or --table PATH"),
    };
    let deg = exact_degree(&table, degree_tol::<f64>());
    println!("degree={deg} length_lower_bound={}", length_bound_from_degree(deg));
    Ok(ExitCode::SUCCESS)
}

fn cmd_equiv(path_a: &Path, path_b: &Path, tol: f64) -> Result<ExitCode> {
    let a = Document::load(path_a)?.to_model()?;
    let b = Document::load(path_b)?.to_model()?;
    let eq = equivalent(a.as_acceptance(), b.as_acceptance(), tol)?;
    println!("{eq}");
    if !eq.equivalent {
        if let Some(w) = eq.witness {
            println!("witness={}", format_input(w, a.input_bits()));
        }
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
