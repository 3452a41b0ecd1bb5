use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use attk2::cli::{self, GenConfig};
use attk2::dyngraph::DynAttK2Graph;
use attk2::io;
use attk2::{AttK2Graph, Result};

#[derive(Parser)]
#[command(name = "attk2", version, about = "Compressed attributed multigraph store")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a store file from a bundle directory. Also writes ids.tsv next to it.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Run a query script against a store file.
    Query {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        script: PathBuf,
        /// Answer from a dynamic store built by inserting the file's contents.
        #[arg(long)]
        dynamic: bool,
    },
    /// Write a synthetic bundle plus query sets under <output>/queries.
    Gen {
        #[arg(long)]
        nodes: u64,
        #[arg(long)]
        edges: u64,
        #[arg(long)]
        node_types: u32,
        #[arg(long)]
        edge_types: u32,
        #[arg(long)]
        attrs: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Time every query script in a directory.
    Bench {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        scripts: PathBuf,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Print the size report of a store file.
    Stats {
        #[arg(long)]
        db: PathBuf,
    },
}

const QUERIES_PER_SET: usize = 1000;

fn ids_path(output: &Path) -> PathBuf {
    output.parent().unwrap_or(Path::new("")).join("ids.tsv")
}

fn run(cmd: Cmd) -> Result<String> {
    match cmd {
        Cmd::Build { input, output, k } => {
            let bundle = io::load_input(&input)?;
            let g = AttK2Graph::build(&bundle, k)?;
            if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            io::save_db(&g, &output)?;
            io::write_ids(&ids_path(&output), &g)?;
            let s = g.layer_sizes();
            Ok(format!(
                "schema_bytes\t{}\ndata_bytes\t{}\nrelations_bytes\t{}\n",
                s.schema, s.data, s.relations
            ))
        }
        Cmd::Query { db, script, dynamic } => {
            let g = io::load_db(&db)?;
            let name = script.display().to_string();
            let queries = cli::parse_script(&name, &fs::read_to_string(&script)?)?;
            if dynamic {
                let d = DynAttK2Graph::from_bundle(&g.export_bundle()?, g.relations().base().k())?;
                Ok(cli::run_script(&d, &queries))
            } else {
                Ok(cli::run_script(&g, &queries))
            }
        }
        Cmd::Gen {
            nodes,
            edges,
            node_types,
            edge_types,
            attrs,
            seed,
            output,
        } => {
            let cfg = GenConfig {
                nodes,
                edges,
                node_types,
                edge_types,
                attrs,
                seed,
            };
            let bundle = cli::generate(&cfg)?;
            io::write_bundle(&output, &bundle)?;
            let qdir = output.join("queries");
            fs::create_dir_all(&qdir)?;
            for (stem, text) in cli::query_scripts(&bundle, seed, QUERIES_PER_SET) {
                io::write_atomic(&qdir.join(format!("{stem}.tsv")), text.as_bytes())?;
            }
            Ok(String::new())
        }
        Cmd::Bench { db, scripts, repeat } => {
            let g = io::load_db(&db)?;
            Ok(cli::render_bench(&cli::bench_dir(&g, &scripts, repeat)?))
        }
        Cmd::Stats { db } => {
            let g = io::load_db(&db)?;
            let len = fs::metadata(&db)?.len();
            Ok(cli::render_stats(&g, len))
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args.cmd) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("attk2: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
