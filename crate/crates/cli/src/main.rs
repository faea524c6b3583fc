use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use raag_cli::report::Report;
use raag_cli::{DemoParams, DEMOS};
use raag_core::fixpoint::Scope;
use raag_core::morphism::DEFAULT_SEARCH_DEPTH;

#[derive(Parser)]
#[command(name = "raag", version, about = "Fixed points of graph group endomorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Endo,
    Auto,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide from the graph whether every fixed subgroup is finitely generated.
    Classify {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = ScopeArg::Endo)]
        scope: ScopeArg,
    },
    /// Run one of the built-in scenarios end to end.
    Demo {
        #[arg(value_parser = DEMOS)]
        name: String,
        #[arg(long, value_parser = positive)]
        radius: Option<usize>,
        /// Number of chain levels.
        #[arg(long, value_parser = positive)]
        depth: Option<usize>,
        #[arg(long, value_parser = positive)]
        kmax: Option<usize>,
        #[arg(long, value_parser = positive)]
        search_depth: Option<usize>,
    },
    /// Normal form of a word such as "a b^-1 c".
    Nf { graph: PathBuf, word: String },
    /// Image of a word under a morphism.
    Apply {
        graph: PathBuf,
        morphism: PathBuf,
        word: String,
    },
    /// Fixed points of length at most the radius.
    Fix {
        graph: PathBuf,
        morphism: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = positive)]
        radius: usize,
    },
    /// Periodic points of length at most the radius with period at most kmax.
    Per {
        graph: PathBuf,
        morphism: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = positive)]
        radius: usize,
        #[arg(long, default_value_t = 4, value_parser = positive)]
        kmax: usize,
    },
    /// Ascending chain of folded subgroups over an independent tuple.
    Chain {
        graph: PathBuf,
        morphism: PathBuf,
        /// Comma-separated pairwise non-commuting generators, e.g. "a,c".
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = 6, value_parser = positive)]
        depth: usize,
    },
    /// Try to certify that a morphism is an automorphism.
    AutoCheck {
        graph: PathBuf,
        morphism: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEARCH_DEPTH, value_parser = positive)]
        search_depth: usize,
    },
    /// Fixed and periodic lattices of the abelianized morphism.
    AbelianFix {
        graph: PathBuf,
        morphism: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = positive)]
        kmax: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(graph: &Path, morphism: &Path) -> Result<raag_core::Morphism> {
    let group = raag_cli::load_graph(&read(graph)?).with_context(|| format!("in {}", graph.display()))?;
    raag_cli::load_morphism(&group, &read(morphism)?).with_context(|| format!("in {}", morphism.display()))
}

fn run(command: Command) -> Result<Report> {
    Ok(match command {
        Command::Classify { graph, scope } => {
            let group = raag_cli::load_graph(&read(&graph)?)?;
            let scope = match scope {
                ScopeArg::Endo => Scope::Endomorphisms,
                ScopeArg::Auto => Scope::Automorphisms,
            };
            Report::Classify(raag_cli::classify(&group, scope))
        }
        Command::Demo {
            name,
            radius,
            depth,
            kmax,
            search_depth,
        } => Report::Demo(raag_cli::demo(
            &name,
            DemoParams {
                radius,
                depth,
                kmax,
                search_depth,
            },
        )?),
        Command::Nf { graph, word } => {
            let group = raag_cli::load_graph(&read(&graph)?)?;
            Report::Nf(raag_cli::nf(&group, &word)?)
        }
        Command::Apply { graph, morphism, word } => Report::Apply(raag_cli::apply(&load(&graph, &morphism)?, &word)?),
        Command::Fix { graph, morphism, radius } => Report::Fix(raag_cli::fix(&load(&graph, &morphism)?, radius)?),
        Command::Per {
            graph,
            morphism,
            radius,
            kmax,
        } => Report::Per(raag_cli::per(&load(&graph, &morphism)?, radius, kmax)?),
        Command::Chain {
            graph,
            morphism,
            tuple,
            depth,
        } => {
            let phi = load(&graph, &morphism)?;
            let tuple = raag_cli::parse_tuple(phi.group(), &tuple)?;
            Report::Chain(raag_cli::chain(&phi, &tuple, depth)?)
        }
        Command::AutoCheck {
            graph,
            morphism,
            search_depth,
        } => Report::AutoCheck(raag_cli::auto_check(&load(&graph, &morphism)?, search_depth)),
        Command::AbelianFix { graph, morphism, kmax } => {
            Report::AbelianFix(raag_cli::abelian_fix(&load(&graph, &morphism)?, kmax)?)
        }
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let report = run(cli.command)?;
    let rendered = match cli.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    match cli.output {
        Some(path) => fs::write(&path, rendered).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(())
}
