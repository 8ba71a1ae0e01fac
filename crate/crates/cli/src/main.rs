//! `arcauto`: check, simulate, refine and generate `.maa` models.
//!
//! Exit codes: 0 success or Holds, 1 diagnostics or Violated, 2 usage
//! error, 3 internal limit exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arcauto::check::{check, Limits, Profile, ProfileKind};
use arcauto::codegen::{write_artifacts, CodegenError, Generator, Ws1sOptions};
use arcauto::diag::{has_errors, Diagnostic, SourceMap};
use arcauto::model::{ComponentId, Model};
use arcauto::refinement::{refines, RefinementError, RefinementOptions, Verdict};
use arcauto::semantics::{simulate, CompletionMode, Policy, StreamBundle};
use arcauto::Frontend;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "arcauto", version, about = "Component & connector models with embedded I/O automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Inputs {
    /// Model files, resolved together as one model.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Format of diagnostics on standard error.
    #[arg(long, value_enum, default_value_t = DiagFormat::Text)]
    diagnostics_format: DiagFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Strict,
    Seeded,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Epsilon,
    Chaos,
    Reject,
}

impl From<ModeArg> for CompletionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Epsilon => CompletionMode::EpsilonSelfLoop,
            ModeArg::Chaos => CompletionMode::Chaos,
            ModeArg::Reject => CompletionMode::Reject,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exec,
    Mona,
    Graph,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Core,
    Executable,
    Analysis,
}

#[derive(Subcommand)]
enum Command {
    /// Report context-condition diagnostics for a language profile.
    Check {
        #[command(flatten)]
        inputs: Inputs,
        /// Rule set to check against.
        #[arg(long, value_enum, default_value_t = ProfileArg::Core)]
        profile: ProfileArg,
        /// Components the profile-specific rules apply to (default: all).
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        /// Analysis bound on states times variable valuations.
        #[arg(long)]
        max_configs: Option<u64>,
        /// Analysis bound on the input and output alphabet.
        #[arg(long)]
        max_letters: Option<u64>,
    },
    /// Run a component on an input stream bundle.
    Sim {
        #[command(flatten)]
        inputs: Inputs,
        /// Component to run.
        #[arg(long)]
        root: String,
        /// Input stream bundle (JSON).
        #[arg(long = "inputs")]
        bundle: PathBuf,
        /// Number of ticks; at most the bundle's length.
        #[arg(long)]
        ticks: usize,
        /// What to do when several transitions are enabled.
        #[arg(long, value_enum, default_value_t = PolicyArg::Strict)]
        policy: PolicyArg,
        /// Seed for `--policy seeded`.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the output bundle here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every instance port stream to this file.
        #[arg(long)]
        trace_internals: Option<PathBuf>,
    },
    /// Check that every behavior of one automaton is allowed by another.
    Refine {
        #[command(flatten)]
        inputs: Inputs,
        /// Refining automaton.
        #[arg(long = "impl")]
        implementation: String,
        /// Refined automaton.
        #[arg(long)]
        spec: String,
        /// How the implementation treats unhandled inputs.
        #[arg(long, value_enum, default_value_t = ModeArg::Epsilon)]
        impl_mode: ModeArg,
        /// How the specification treats unhandled inputs.
        #[arg(long, value_enum, default_value_t = ModeArg::Chaos)]
        spec_mode: ModeArg,
        /// Counterexample files are `<prefix>.inputs.json` and `<prefix>.outputs.json`.
        #[arg(long, default_value = "counterexample")]
        counterexample: PathBuf,
        /// Give up (exit 3) after exploring this many product nodes.
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: usize,
    },
    /// Generate code, WS1S formulas or graphs.
    Gen {
        #[command(flatten)]
        inputs: Inputs,
        /// Target to generate.
        #[arg(long, value_enum)]
        backend: BackendArg,
        /// Output directory.
        #[arg(long, default_value = "generated")]
        out: PathBuf,
        /// Directory overriding bundled templates (`<backend>/<name>.tpl`).
        #[arg(long)]
        templates: Option<PathBuf>,
        /// mona only: the implementation to encode (default: every atomic component).
        #[arg(long = "impl")]
        implementation: Option<String>,
        /// mona only: also encode this specification and the refinement formula.
        #[arg(long)]
        spec: Option<String>,
        /// mona only: completion of the implementation.
        #[arg(long, value_enum, default_value_t = ModeArg::Epsilon)]
        impl_mode: ModeArg,
        /// mona only: completion of the specification.
        #[arg(long, value_enum, default_value_t = ModeArg::Chaos)]
        spec_mode: ModeArg,
    },
}

/// A failed command: message(s) for standard error and the exit code.
struct Failure {
    code: u8,
    lines: Vec<String>,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, lines: vec![format!("error: {}", msg.into())] }
    }

    fn user(msg: impl Into<String>) -> Self {
        Failure { code: 1, lines: vec![format!("error: {}", msg.into())] }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            for l in f.lines {
                eprintln!("{l}");
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Check { inputs, profile, targets, max_configs, max_letters } => {
            let (fe, fmt) = load(&inputs)?;
            let kind = match profile {
                ProfileArg::Core => ProfileKind::Core,
                ProfileArg::Executable => ProfileKind::Executable,
                ProfileArg::Analysis => ProfileKind::Analysis,
            };
            let defaults = Limits::default();
            let mut p = Profile::new(kind).with_limits(Limits {
                max_configs: max_configs.unwrap_or(defaults.max_configs),
                max_letters: max_letters.unwrap_or(defaults.max_letters),
            });
            if !targets.is_empty() {
                p = p.with_targets(targets.iter().map(|t| component(&fe.model, t)).collect::<Result<Vec<_>, _>>()?);
            }
            let mut diags = fe.warnings.clone();
            diags.extend(check(&fe.model, &p));
            report(&diags, &fe.sources, fmt);
            Ok(if has_errors(&diags) { 1 } else { 0 })
        }
        Command::Sim { inputs, root, bundle, ticks, policy, seed, out, trace_internals } => {
            let (fe, fmt) = load(&inputs)?;
            report(&fe.warnings, &fe.sources, fmt);
            let root = component(&fe.model, &root)?;
            let text = read(&bundle)?;
            let bundle = StreamBundle::from_json(&text).map_err(|e| Failure::user(format!("{}: {e}", bundle.display())))?;
            let mut policy = match (policy, seed) {
                (PolicyArg::Strict, None) => Policy::Strict,
                (PolicyArg::Strict, Some(_)) => return Err(Failure::usage("--seed requires --policy seeded")),
                (PolicyArg::Seeded, Some(s)) => Policy::seeded(s),
                (PolicyArg::Seeded, None) => return Err(Failure::usage("--policy seeded requires --seed")),
            };
            let sim = simulate(&fe.model, root, &bundle, ticks, &mut policy, trace_internals.is_some())
                .map_err(|e| Failure::user(e.to_string()))?;
            if let Some(path) = trace_internals {
                let text = serde_json::to_string_pretty(&sim.internals).expect("bundles serialize") + "\n";
                write(&path, &text)?;
            }
            match out {
                Some(path) => write(&path, &sim.outputs.to_json())?,
                None => print!("{}", sim.outputs.to_json()),
            }
            Ok(0)
        }
        Command::Refine { inputs, implementation, spec, impl_mode, spec_mode, counterexample, max_nodes } => {
            let (fe, fmt) = load(&inputs)?;
            report(&fe.warnings, &fe.sources, fmt);
            let (i, s) = (component(&fe.model, &implementation)?, component(&fe.model, &spec)?);
            let options = RefinementOptions {
                impl_mode: impl_mode.into(),
                spec_mode: spec_mode.into(),
                max_product_nodes: max_nodes,
            };
            match refines(&fe.model, i, s, &options) {
                Ok(Verdict::Holds { explored }) => {
                    println!("Holds: {implementation} refines {spec} ({explored} product nodes)");
                    Ok(0)
                }
                Ok(Verdict::Violated(cex)) => {
                    let (ins, outs) = cex.trace.to_bundles();
                    let prefix = counterexample.display().to_string();
                    let (in_path, out_path) = (format!("{prefix}.inputs.json"), format!("{prefix}.outputs.json"));
                    write(Path::new(&in_path), &ins.to_json())?;
                    write(Path::new(&out_path), &outs.to_json())?;
                    println!(
                        "Violated: {implementation} does not refine {spec}; counterexample of length {} in {in_path} and {out_path}",
                        cex.trace.len()
                    );
                    Ok(1)
                }
                Err(e @ RefinementError::StateSpaceLimitExceeded { .. }) => {
                    Err(Failure { code: 3, lines: vec![format!("error: {e}")] })
                }
                Err(e) => Err(Failure::user(e.to_string())),
            }
        }
        Command::Gen { inputs, backend, out, templates, implementation, spec, impl_mode, spec_mode } => {
            let (fe, fmt) = load(&inputs)?;
            report(&fe.warnings, &fe.sources, fmt);
            let mut generator = Generator::bundled();
            if let Some(dir) = templates {
                generator = generator.with_template_dir(&dir).map_err(|e| Failure::usage(e.to_string()))?;
            }
            if !matches!(backend, BackendArg::Mona) && (implementation.is_some() || spec.is_some()) {
                return Err(Failure::usage("--impl and --spec apply to the mona backend only"));
            }
            let m = &fe.model;
            let artifacts = match backend {
                BackendArg::Exec => generator.emit_exec(m),
                BackendArg::Graph => generator.emit_graph(m),
                BackendArg::Mona => {
                    let options = Ws1sOptions { impl_mode: impl_mode.into(), spec_mode: spec_mode.into() };
                    let spec = spec.map(|s| component(m, &s)).transpose()?;
                    match implementation {
                        Some(i) => generator.emit_ws1s(m, component(m, &i)?, spec, &options).map(|a| vec![a]),
                        None if spec.is_some() => return Err(Failure::usage("--spec requires --impl")),
                        None => (0..m.components.len())
                            .map(ComponentId)
                            .filter(|&id| m.component(id).is_atomic())
                            .map(|id| generator.emit_ws1s(m, id, None, &options))
                            .collect(),
                    }
                }
            };
            let artifacts = artifacts.map_err(|e| codegen_failure(e, &fe.sources, fmt))?;
            fs::create_dir_all(&out).map_err(|e| Failure::user(format!("{}: {e}", out.display())))?;
            write_artifacts(&out, &artifacts).map_err(|e| Failure::user(e.to_string()))?;
            Ok(0)
        }
    }
}

fn codegen_failure(e: CodegenError, sources: &SourceMap, fmt: DiagFormat) -> Failure {
    match e {
        CodegenError::ProfileViolation { profile, diagnostics } => {
            let mut lines = render(&diagnostics, sources, fmt);
            lines.push(format!("error: generation refused: the model violates the {profile} profile"));
            Failure { code: 1, lines }
        }
        other => Failure::user(other.to_string()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::user(format!("{}: {e}", path.display())))
}

fn load(inputs: &Inputs) -> Result<(Frontend, DiagFormat), Failure> {
    let texts = inputs.files.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>()?;
    let files: Vec<(&PathBuf, &str)> = inputs.files.iter().zip(texts.iter().map(String::as_str)).collect();
    let fmt = inputs.diagnostics_format;
    Frontend::from_sources(&files)
        .map(|fe| (fe, fmt))
        .map_err(|e| Failure { code: 1, lines: render(&e.diagnostics, &e.sources, fmt) })
}

fn component(model: &Model, name: &str) -> Result<ComponentId, Failure> {
    model.component_id(name).ok_or_else(|| Failure::usage(format!("no component named `{name}`")))
}

fn render(diags: &[Diagnostic], sources: &SourceMap, fmt: DiagFormat) -> Vec<String> {
    diags
        .iter()
        .map(|d| match fmt {
            DiagFormat::Text => d.render(sources),
            DiagFormat::Json => d.render_json(sources),
        })
        .collect()
}

fn report(diags: &[Diagnostic], sources: &SourceMap, fmt: DiagFormat) {
    for line in render(diags, sources, fmt) {
        eprintln!("{line}");
    }
}
