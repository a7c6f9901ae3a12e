mod canonical;
mod commands;
mod format;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mapgraded::hochschild::Convention;
use serde_json::json;

use commands::{CmdError, Report, Settings};
use workspace::Workspace;

/// Fixtures compiled into the binary, used when no workspace is given.
const FIXTURES: &[(&str, &str)] = &[
    ("a2.json", include_str!("../examples/a2.json")),
    ("lambda.json", include_str!("../examples/lambda.json")),
    ("q.json", include_str!("../examples/q.json")),
    ("vposet.json", include_str!("../examples/vposet.json")),
    ("opens.json", include_str!("../examples/opens.json")),
];

#[derive(Parser, Debug)]
#[command(name = "mapgraded", version, about = "Checks on finite map-graded categories and their Hochschild cohomology")]
struct Cli {
    /// Workspace file (repeatable). Without one the bundled fixtures are loaded.
    #[arg(short, long = "workspace", global = true)]
    workspace: Vec<PathBuf>,
    /// Load the bundled fixtures in addition to the given workspaces.
    #[arg(long, global = true)]
    fixtures: bool,
    /// Truncation degree of every complex.
    #[arg(long, default_value_t = 3, global = true)]
    max_degree: usize,
    /// Search depth for infinite covers (default: twice the number of morphisms).
    #[arg(long, global = true)]
    cover_depth: Option<usize>,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Sign convention for the Hochschild differential: standard or flipped.
    #[arg(long, default_value = "standard", global = true)]
    convention: Convention,
    /// Emit JSON lines, one verdict per checked degree, instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load and validate the workspace, optionally writing its canonical form.
    Validate {
        /// Path for the canonical dump, or - for stdout.
        #[arg(long)]
        canonical: Option<String>,
    },
    /// Count or list the simplices of the nerve up to the truncation degree.
    Nerve {
        #[arg(long)]
        cat: String,
        #[arg(long)]
        list: bool,
    },
    /// Decide whether a cover is an n-cover (infinite when --degree is absent).
    Cover {
        #[arg(long)]
        cover: String,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Restriction along a functor, checking injectivity against the cochain maps.
    Restrict {
        #[arg(long = "graded", alias = "cat")]
        graded: String,
        #[arg(long)]
        along: Option<String>,
        /// Number of random subcartesian functors when --along is absent.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Glue the restrictions along a cover and compare with the original.
    Glue {
        #[arg(long)]
        cover: String,
    },
    /// Tensor product of two bimodules over their shared middle category.
    Tensor {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Hom bimodule between two bimodules with the same left category.
    Hom {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Arrow category of a bimodule.
    Arrow {
        #[arg(long)]
        bimodule: String,
    },
    /// Recognize a category as an arrow category along an ideal.
    RecognizeArrow {
        #[arg(long)]
        cat: String,
        #[arg(long, value_delimiter = ',', required = true)]
        ideal: Vec<String>,
    },
    /// Hochschild cohomology with coefficients (the diagonal bimodule by default).
    Hh {
        #[arg(long)]
        cat: String,
        #[arg(long)]
        bimodule: Option<String>,
    },
    /// Exactness of the Čech sequence of Hochschild complexes of a cover.
    SheafCheck {
        #[arg(long)]
        cover: String,
    },
    /// Mayer-Vietoris sequence of a two-leg cover.
    Mv {
        #[arg(long, alias = "diagram")]
        cover: String,
    },
    /// Hochschild cohomology supported along a functor, with its long exact sequence.
    Support {
        #[arg(long)]
        functor: String,
        #[arg(long)]
        bimodule: Option<String>,
    },
    /// Localization sequence for an ideal of base morphisms.
    Localize {
        #[arg(long)]
        cat: String,
        #[arg(long, value_delimiter = ',', required = true)]
        ideal: Vec<String>,
        #[arg(long)]
        bimodule: Option<String>,
    },
    /// Connecting maps of the triangle of an arrow category.
    Triangle {
        #[arg(long)]
        bimodule: String,
    },
    /// Check that a base functor censors the category and restriction is bijective.
    Censor {
        #[arg(long)]
        cat: String,
        #[arg(long)]
        along: String,
        #[arg(long)]
        bimodule: Option<String>,
    },
    /// Grothendieck construction of a pseudofunctor.
    Groth {
        #[arg(long)]
        pseudo: String,
    },
    /// Base change of a pseudofunctor along a functor into its base.
    BaseChange {
        #[arg(long)]
        pseudo: String,
        #[arg(long)]
        along: String,
    },
    /// Cover of the total category by the slices over the anchors, with its sheaf check.
    Cstar {
        #[arg(long)]
        pseudo: String,
        #[arg(long, value_delimiter = ',', required = true)]
        anchors: Vec<String>,
    },
    /// Chain cover of the total category and its Mayer-Vietoris sequence.
    ChainMv {
        #[arg(long)]
        pseudo: String,
    },
    /// Compare local and global Hochschild cohomology of a functorial diagram.
    Compare {
        #[arg(long)]
        diagram: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Nerve { .. } => "nerve",
            Command::Cover { .. } => "cover",
            Command::Restrict { .. } => "restrict",
            Command::Glue { .. } => "glue",
            Command::Tensor { .. } => "tensor",
            Command::Hom { .. } => "hom",
            Command::Arrow { .. } => "arrow",
            Command::RecognizeArrow { .. } => "recognize-arrow",
            Command::Hh { .. } => "hh",
            Command::SheafCheck { .. } => "sheaf-check",
            Command::Mv { .. } => "mv",
            Command::Support { .. } => "support",
            Command::Localize { .. } => "localize",
            Command::Triangle { .. } => "triangle",
            Command::Censor { .. } => "censor",
            Command::Groth { .. } => "groth",
            Command::BaseChange { .. } => "base-change",
            Command::Cstar { .. } => "cstar",
            Command::ChainMv { .. } => "chain-mv",
            Command::Compare { .. } => "compare",
        }
    }
}

fn load(cli: &Cli) -> Result<Workspace, CmdError> {
    let mut sources = Vec::new();
    if cli.workspace.is_empty() || cli.fixtures {
        sources.extend(FIXTURES.iter().map(|(l, t)| (format!("<bundled>/{l}"), t.to_string())));
    }
    sources.extend(Workspace::read_sources(&cli.workspace)?);
    Ok(Workspace::from_sources(&sources)?)
}

fn run(cli: &Cli, s: &Settings) -> Result<Report, CmdError> {
    use commands::*;
    let ws = load(cli)?;
    let ws = &ws;
    match &cli.command {
        Command::Validate { canonical } => validate(ws, canonical.as_deref()),
        Command::Nerve { cat, list } => nerve_cmd(ws, s, cat, *list),
        Command::Cover { cover, degree } => cover_cmd(ws, s, cover, *degree),
        Command::Restrict { graded, along, samples } => restrict_cmd(ws, s, graded, along.as_deref(), *samples),
        Command::Glue { cover } => glue_cmd(ws, cover),
        Command::Tensor { left, right } => tensor_cmd(ws, left, right),
        Command::Hom { left, right } => hom_cmd(ws, left, right),
        Command::Arrow { bimodule } => arrow_cmd(ws, bimodule),
        Command::RecognizeArrow { cat, ideal } => recognize_arrow_cmd(ws, cat, ideal),
        Command::Hh { cat, bimodule } => hh_cmd(ws, s, cat, bimodule.as_deref()),
        Command::SheafCheck { cover } => sheaf_cmd(ws, s, cover),
        Command::Mv { cover } => mv_cmd(ws, s, cover),
        Command::Support { functor, bimodule } => support_cmd(ws, s, functor, bimodule.as_deref()),
        Command::Localize { cat, ideal, bimodule } => localize_cmd(ws, s, cat, ideal, bimodule.as_deref()),
        Command::Triangle { bimodule } => triangle_cmd(ws, s, bimodule),
        Command::Censor { cat, along, bimodule } => censor_cmd(ws, s, cat, along, bimodule.as_deref()),
        Command::Groth { pseudo } => groth_cmd(ws, pseudo),
        Command::BaseChange { pseudo, along } => base_change_cmd(ws, pseudo, along),
        Command::Cstar { pseudo, anchors } => cstar_cmd(ws, s, pseudo, anchors),
        Command::ChainMv { pseudo } => chain_mv_cmd(ws, s, pseudo),
        Command::Compare { diagram } => compare_cmd(ws, s, diagram),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.max_degree == 0 {
        eprintln!("error: --max-degree must be at least 1");
        return ExitCode::from(2);
    }
    let s = Settings {
        max_degree: cli.max_degree,
        cover_depth: cli.cover_depth,
        seed: cli.seed,
        convention: cli.convention,
    };
    let depth = s.cover_depth.map_or_else(|| "2|Mor|".to_string(), |d| d.to_string());
    let cmd = cli.command.name();
    let report = match run(&cli, &s) {
        Ok(r) => r,
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "command": cmd, "error": e.to_string(), "exit": 2 }));
            } else {
                eprintln!("error: {e}");
            }
            return ExitCode::from(2);
        }
    };
    if let Some(raw) = &report.raw {
        print!("{raw}");
    } else if cli.json {
        let ctx = json!({
            "command": cmd,
            "convention": s.convention.name(),
            "max_degree": s.max_degree,
            "cover_depth": s.cover_depth.map_or(json!(depth), |d| json!(d)),
        });
        for r in &report.records {
            let mut r = r.clone();
            for (k, v) in ctx.as_object().unwrap() {
                r[k] = v.clone();
            }
            println!("{r}");
        }
        let mut summary = ctx;
        summary["verified"] = json!(report.verified);
        println!("{summary}");
    } else {
        println!(
            "# {cmd}: convention {}, truncated at degree {}, cover depth {depth}",
            s.convention, s.max_degree
        );
        for l in &report.lines {
            println!("{l}");
        }
        println!("verified: {}", if report.verified { "yes" } else { "no" });
    }
    if report.verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
