use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lpdecay::runner::{self, RunOptions, EXIT_ERROR};

#[derive(Parser)]
#[command(name = "lpdecay", version, about = "Energy-decay experiments for divergence-free data")]
struct Cli {
    /// Worker threads for independent analyses (0 picks the core count).
    #[arg(long, global = true, env = "LPDECAY_THREADS", default_value_t = 0)]
    threads: usize,

    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Directory holding the bundled `*.cfg` recipes.
    #[arg(long, global = true, env = "LPDECAY_RECIPES")]
    recipe_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file, or a bundled recipe by name.
    Run {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Print the bundled recipes and what each one checks.
    ListRecipes,
}

fn default_recipe_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("recipes")
}

/// `config` itself if it exists, else `<recipes>/<config>` or
/// `<recipes>/<config>.cfg`.
fn resolve(config: &Path, recipes: &Path) -> PathBuf {
    if config.exists() {
        return config.to_path_buf();
    }
    let named = recipes.join(config);
    if named.exists() {
        return named;
    }
    let with_ext = recipes.join(config).with_extension("cfg");
    if with_ext.exists() {
        return with_ext;
    }
    config.to_path_buf()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    let recipes = cli.recipe_dir.clone().unwrap_or_else(default_recipe_dir);
    let code = match cli.command {
        Command::ListRecipes => match runner::list_recipes(&recipes) {
            Ok(entries) => {
                if cli.json {
                    println!("{}", serde_json::to_string_pretty(&entries).expect("serializable"));
                } else {
                    print!("{}", runner::recipes_table(&entries));
                }
                0
            }
            Err(e) => {
                eprintln!("error: cannot list recipes in {}: {e}", recipes.display());
                EXIT_ERROR
            }
        },
        Command::Run { config, output_dir } => {
            let path = resolve(&config, &recipes);
            let outcome = runner::run(&path, &RunOptions { output_dir });
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&outcome.manifest).expect("serializable"));
            } else {
                for a in &outcome.manifest.analyses {
                    for c in &a.checks {
                        let mark = if c.passed { "PASS" } else { "FAIL" };
                        println!("{mark} {}/{}: {}", a.analysis.name(), c.name, c.detail);
                    }
                    if let Some(e) = &a.error {
                        println!("ERROR {e}");
                    }
                }
                if let Some(e) = &outcome.manifest.error {
                    eprintln!("error: {e}");
                }
                if let Some(dir) = &outcome.output_dir {
                    println!("artifacts in {}", dir.display());
                }
            }
            outcome.exit_code
        }
    };
    ExitCode::from(code as u8)
}
