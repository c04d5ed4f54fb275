//! The `kmod` command line.
//!
//! Exit codes: 0 success, 1 a structural law was falsified (a bundle file
//! is written and its path printed), 2 usage or input error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generators::{fixture_example4, random_regular, GenSpec};
use crate::homology::ar_sequence;
use crate::linalg::DEFAULT_PRIME;
use crate::module::TreeModule;
use crate::orbit::{middle_term_check, orbit_report, to_dot};
use crate::suites::{run_suite, Suite, SuiteConfig};

/// Environment variable overriding the default seeds.
pub const SEED_ENV: &str = "KMOD_SEED";

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub code: i32,
    pub text: String,
    pub json: Option<Value>,
}

impl CommandResult {
    fn ok(text: String, json: Option<Value>) -> Self {
        CommandResult {
            code: 0,
            text,
            json,
        }
    }

    fn usage(text: String) -> Self {
        CommandResult {
            code: 2,
            text,
            json: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "kmod",
    version,
    about = "Shift orbits of regular modules over the Kronecker universal cover"
)]
struct Cli {
    /// Directory for counterexample bundles.
    #[arg(long, global = true, default_value = ".")]
    bundle_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orbit report of a regular indecomposable module.
    Orbit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        back: usize,
        /// Forward horizon; `auto` means b + 4.
        #[arg(long, default_value = "auto")]
        fwd: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Almost split sequence ending in the input, with the middle-term check.
    Ar {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Seeded property suites.
    Check {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        p: u64,
        #[arg(long, default_value_t = 24)]
        max_dim: usize,
        /// First seed; defaults to $KMOD_SEED or 0.
        #[arg(long)]
        base_seed: Option<u64>,
    },
    /// Random regular indecomposable module.
    Gen {
        /// Defaults to $KMOD_SEED or 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        p: u64,
        #[arg(long, default_value_t = 24)]
        max_dim: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Graphviz rendering of the support tree.
    ExportDot {
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        highlight_center: bool,
    },
    /// The three-vertex sink module with scalars λ₁, λ₃.
    Example4 {
        #[arg(long, default_value_t = 1)]
        l1: u64,
        #[arg(long, default_value_t = 1)]
        l3: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV).ok()?.trim().parse().ok()
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return CommandResult {
                code,
                text: e.render().to_string(),
                json: None,
            };
        }
    };
    let dir = cli.bundle_dir.clone();
    match dispatch(cli) {
        Ok(r) => r,
        Err(Error::Falsified { claim, bundle }) => falsifier(&dir, "falsifier", &claim, bundle),
        Err(e) => CommandResult::usage(format!("error: {e}")),
    }
}

fn falsifier(dir: &Path, stem: &str, claim: &str, bundle: Value) -> CommandResult {
    let path = dir.join(format!("{stem}.json"));
    let body = json!({ "claim": claim, "bundle": bundle });
    let written = std::fs::create_dir_all(dir).and_then(|_| {
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&body).unwrap_or_default(),
        )
    });
    let text = match written {
        Ok(()) => format!("FALSIFIED: {claim}\nbundle: {}", path.display()),
        Err(e) => format!(
            "FALSIFIED: {claim}\nbundle could not be written to {}: {e}",
            path.display()
        ),
    };
    CommandResult {
        code: 1,
        text,
        json: Some(body),
    }
}

fn emit(text: String, output: Option<&Path>, what: &str) -> Result<CommandResult> {
    match output {
        Some(p) => {
            std::fs::write(p, &text)?;
            Ok(CommandResult::ok(
                format!("wrote {what} to {}", p.display()),
                None,
            ))
        }
        None => Ok(CommandResult::ok(text, None)),
    }
}

fn render(format: Format, table: String, value: Value) -> CommandResult {
    let text = match format {
        Format::Table => table,
        Format::Json => serde_json::to_string_pretty(&value).expect("values serialize"),
    };
    CommandResult::ok(text, Some(value))
}

fn dispatch(cli: Cli) -> Result<CommandResult> {
    match cli.command {
        Command::Orbit {
            input,
            back,
            fwd,
            format,
        } => {
            let fwd = match fwd.as_str() {
                "auto" => None,
                s => Some(s.parse::<usize>().map_err(|_| {
                    Error::Parse(format!("--fwd expects a count or `auto`, got `{s}`"))
                })?),
            };
            let m = TreeModule::load(&input)?;
            let report = orbit_report(&m, back, fwd)?;
            let value = serde_json::to_value(&report)?;
            Ok(render(format, report.table(), value))
        }
        Command::Ar { input, format } => {
            let z = TreeModule::load(&input)?;
            let ar = ar_sequence(&z)?;
            let mt = middle_term_check(&z)?;
            let r = &ar.report;
            let ys: Vec<String> = r
                .y_summands
                .iter()
                .map(|s| format!("{}, r={}, C={}", s.kind, s.r, s.center))
                .collect();
            let table = format!(
                "X = σ²Z: {}, r={}, C={}\nY: {}\nZ: {}, r={}, C={}\nσZ: {}, r={}, C={}\ndim Ext¹(Z, X) = {}\nmiddle term check: ok (summands {}, disjoint supports {})",
                r.x.kind, r.x.r, r.x.center,
                ys.join(" ⊕ "),
                r.z.kind, r.z.r, r.z.center,
                r.sigma_z.kind, r.sigma_z.r, r.sigma_z.center,
                ar.ext_dim,
                mt.summands, mt.disjoint_supports,
            );
            let value = json!({ "ar": ar.to_json_value(), "middle_term": mt });
            Ok(render(format, table, value))
        }
        Command::Check {
            suite,
            seeds,
            n,
            p,
            max_dim,
            base_seed,
        } => {
            let cfg = SuiteConfig {
                seeds,
                base_seed: base_seed.or_else(env_seed).unwrap_or(0),
                gen: GenSpec {
                    n,
                    p,
                    max_total_dim: max_dim,
                    ..GenSpec::default()
                },
            };
            let outcomes = run_suite(suite, &cfg)?;
            let mut text = String::new();
            for o in &outcomes {
                text.push_str(&o.summary());
            }
            let value = serde_json::to_value(&outcomes)?;
            let falsifiers: Vec<_> = outcomes
                .iter()
                .flat_map(|o| &o.failures)
                .filter(|f| f.falsifier)
                .collect();
            if let Some(f) = falsifiers.first() {
                let stem = format!("falsifier-{}-{}", f.check, f.seed);
                let mut r = falsifier(&cli.bundle_dir, &stem, &f.claim, f.bundle.clone());
                r.text = format!("{text}{}", r.text);
                return Ok(r);
            }
            let errors: Vec<String> = outcomes
                .iter()
                .flat_map(|o| &o.failures)
                .map(|f| format!("{} seed {}: {}", f.check, f.seed, f.claim))
                .collect();
            if !errors.is_empty() {
                return Ok(CommandResult {
                    code: 2,
                    text: format!("{text}errors:\n{}", errors.join("\n")),
                    json: Some(value),
                });
            }
            Ok(CommandResult::ok(text + "all checks passed", Some(value)))
        }
        Command::Gen {
            seed,
            n,
            p,
            max_dim,
            output,
        } => {
            let spec = GenSpec {
                n,
                p,
                seed: seed.or_else(env_seed).unwrap_or(0),
                max_total_dim: max_dim,
                ..GenSpec::default()
            };
            let m = random_regular(&spec)?;
            emit(m.to_json() + "\n", output.as_deref(), "module")
        }
        Command::ExportDot {
            input,
            output,
            highlight_center,
        } => {
            let m = TreeModule::load(&input)?;
            emit(to_dot(&m, highlight_center)?, output.as_deref(), "graph")
        }
        Command::Example4 { l1, l3, output } => {
            let z = fixture_example4(l1, l3)?;
            emit(z.to_json() + "\n", output.as_deref(), "module")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_usage_exits_two() {
        assert_eq!(run(["kmod", "frobnicate"]).code, 2);
        assert_eq!(run(["kmod", "orbit"]).code, 2);
        assert_eq!(run(["kmod", "--help"]).code, 0);
    }

    #[test]
    fn missing_file_exits_two() {
        let r = run(["kmod", "orbit", "--input", "/nonexistent/m.json"]);
        assert_eq!(r.code, 2);
    }

    #[test]
    fn bad_fwd_exits_two() {
        let dir = tempfile::tempdir().unwrap();
        let z = dir.path().join("z.json");
        assert_eq!(run(["kmod", "example4", "-o", z.to_str().unwrap()]).code, 0);
        let r = run([
            "kmod",
            "orbit",
            "--input",
            z.to_str().unwrap(),
            "--fwd",
            "soon",
        ]);
        assert_eq!(r.code, 2);
        assert!(r.text.contains("--fwd"));
    }

    #[test]
    fn falsifier_writes_a_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let r = falsifier(dir.path(), "falsifier-x-3", "a claim", json!({ "k": 1 }));
        assert_eq!(r.code, 1);
        let path = dir.path().join("falsifier-x-3.json");
        assert!(r.text.contains(&path.display().to_string()));
        let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(v["claim"], "a claim");
        assert_eq!(v["bundle"]["k"], 1);
    }
}
