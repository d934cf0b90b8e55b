//! `specnet`: generate benchmark graphs, compute Laplacian spectral
//! moments, and run the decentralized spectral design loop.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use specnet_cli::config::{load_run_setup, resolve_seed};
use specnet_cli::formats;
use specnet_core::{
    aggregate_moments, laplacian, moments_from_spectrum, moments_via_trace, node_contribution,
    run_design, sym_eig, GenSpec, Graph, GraphView, MomentVector,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "specnet", version, about = "Spectral network design via local edits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a benchmark topology and write it as an edge list.
    Generate {
        /// star | two_star | chain | ring | watts_strogatz | barabasi_albert | erdos_renyi
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Ring-distance for watts_strogatz chords.
        #[arg(long)]
        k: Option<usize>,
        /// Edge probability (watts_strogatz, erdos_renyi).
        #[arg(long)]
        p: Option<f64>,
        /// Attachments per node (barabasi_albert).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print Laplacian spectral moments m_1..m_K as one CSV row.
    Moments {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// eig | trace | local:`<r>`
        #[arg(long, default_value = "trace")]
        mode: String,
    },
    /// Run the design loop from a JSON config; writes trace.csv,
    /// final.edges, and summary.json into the configured out_dir.
    Run {
        config: PathBuf,
        /// Also dump protocol transcripts as JSON lines.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Sorted eigenvalues with their empirical CDF as `lambda,cdf` CSV.
    Spectrum {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree sequence in descending order, one value per line.
    Degrees {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems exit 1; code 2 is reserved for runs that hit
            // the iteration cap.
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Generate { family, n, k, p, m, seed, out } => {
            let seed = resolve_seed(seed)?;
            let spec = gen_spec(&family, n, k, p, m, seed)?;
            let g = spec.build()?;
            write_text(&out, &formats::edge_list_string(&g))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Moments { graph, k, mode } => {
            let g = read_graph(&graph)?;
            let m = compute_moments(&g, k, &mode)?;
            println!("{}", formats::moments_csv_row(&m));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Run { config, transcript } => cmd_run(&config, transcript.as_deref()),
        Cmd::Spectrum { graph, out } => {
            let g = read_graph(&graph)?;
            let s = sym_eig(&laplacian(&g))?;
            emit(out.as_deref(), &formats::spectrum_cdf_string(&s))
        }
        Cmd::Degrees { graph, out } => {
            let g = read_graph(&graph)?;
            emit(out.as_deref(), &formats::degrees_string(&g))
        }
    }
}

fn gen_spec(
    family: &str,
    n: usize,
    k: Option<usize>,
    p: Option<f64>,
    m: Option<usize>,
    seed: u64,
) -> Result<GenSpec> {
    let need = |opt: Option<f64>, what: &str| {
        opt.with_context(|| format!("family `{family}` requires --{what}"))
    };
    Ok(match family {
        "star" => GenSpec::Star { n },
        "two_star" => GenSpec::TwoStar { n },
        "chain" => GenSpec::Chain { n },
        "ring" => GenSpec::Ring { n },
        "watts_strogatz" => GenSpec::WattsStrogatz {
            n,
            k: k.context("family `watts_strogatz` requires --k")?,
            p: need(p, "p")?,
            seed,
        },
        "barabasi_albert" => GenSpec::BarabasiAlbert {
            n,
            m: m.context("family `barabasi_albert` requires --m")?,
            seed,
        },
        "erdos_renyi" => GenSpec::ErdosRenyi { n, p: need(p, "p")?, seed },
        other => bail!("unknown family `{other}`"),
    })
}

fn compute_moments(g: &Graph, k: usize, mode: &str) -> Result<MomentVector> {
    if k < 1 {
        bail!("--k must be at least 1");
    }
    match mode {
        "trace" => Ok(moments_via_trace(&laplacian(g), k)),
        "eig" => Ok(moments_from_spectrum(&sym_eig(&laplacian(g))?, k)),
        local if local.starts_with("local:") => {
            let r: usize = local["local:".len()..]
                .parse()
                .context("mode local:<r> needs an integer radius")?;
            if r < 1 {
                bail!("local mode needs r >= 1");
            }
            let bound = 2 * r + 1;
            if k > bound {
                bail!("K = {k} exceeds the local view bound 2r+1 = {bound} for r = {r}");
            }
            let contribs: Result<Vec<_>, _> =
                g.node_ids().map(|i| node_contribution(g, i, r)).collect();
            let m = aggregate_moments(&contribs?)?;
            Ok(m.truncated(k))
        }
        other => bail!("unknown mode `{other}` (expected eig, trace, or local:<r>)"),
    }
}

fn cmd_run(config_path: &Path, transcript: Option<&Path>) -> Result<ExitCode> {
    let mut setup = load_run_setup(config_path)?;
    setup.config.record_transcript = transcript.is_some();
    let order = setup.config.moment_order();
    let n = setup.g0.node_count();

    let outcome = run_design(setup.g0, setup.config)?;

    std::fs::create_dir_all(&setup.out_dir)
        .with_context(|| format!("creating {}", setup.out_dir.display()))?;
    write_text(&setup.out_dir.join("trace.csv"), &formats::trace_csv_string(&outcome.trace, order))?;
    write_text(&setup.out_dir.join("final.edges"), &formats::edge_list_string(&outcome.graph))?;
    let summary = serde_json::json!({
        "n": n,
        "k": order,
        "initial_d_k": outcome.initial_sd,
        "final_d_k": outcome.final_sd,
        "iterations": outcome.trace.len(),
        "converged": outcome.converged,
    });
    write_text(&setup.out_dir.join("summary.json"), &format!("{summary:#}\n"))?;
    if let Some(path) = transcript {
        write_text(path, &formats::transcript_jsonl_string(&outcome.transcripts))?;
    }

    println!(
        "{} after {} iterations, final d_K = {}",
        if outcome.converged { "converged" } else { "iteration cap reached" },
        outcome.trace.len(),
        formats::fmt_sig17(outcome.final_sd),
    );
    Ok(if outcome.converged { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading graph {}", path.display()))?;
    Ok(formats::parse_edge_list(&text)?)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<ExitCode> {
    match out {
        Some(path) => write_text(path, text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
