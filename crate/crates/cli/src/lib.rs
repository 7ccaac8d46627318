//! The `eocos` command line: parse a scenario, run montage, print or draw it.
//!
//! [`run_cli`] is the whole program as a pure function of its arguments, its
//! standard input and the `EOCOS_CONFIG` file, which keeps it testable
//! without spawning processes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use eocos_core::montage::ConfigOverrides;
use eocos_core::nl2::{codes, parse_with_diagnostics, Diagnostic};
use eocos_core::{
    emit_dot, emit_trace_json, run_eos, Coefficient, EngineError, EoSReport, Intensity,
    MontageConfig, RankDir, RenderOptions, ScenarioDoc,
};

/// Stable process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Validation = 1,
    Parse = 2,
    Io = 3,
    Internal = 4,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub exit: ExitCode,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

/// Process environment the CLI depends on.
#[derive(Debug, Clone, Default)]
pub struct Env {
    /// Value of `EOCOS_CONFIG`: a file of `key = value` lines.
    pub config_path: Option<PathBuf>,
}

impl Env {
    pub fn from_process() -> Self {
        Env {
            config_path: std::env::var_os("EOCOS_CONFIG")
                .filter(|v| !v.is_empty())
                .map(PathBuf::from),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "eocos",
    version,
    about = "Run montage over contradictory-structure scenarios",
    after_help = "Exit codes: 0 success, 1 validation error, 2 parse or usage error, 3 I/O failure, 4 internal error.\n\
                  EOCOS_CONFIG may name a file of `key = value` defaults; the scenario's config block and then flags override it."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a scenario; print diagnostics and a summary
    Check(CommonArgs),
    /// Run montage and print the report
    Montage {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run montage and print the structure as a DOT graph
    Render {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        render: RenderArgs,
    },
    /// Run montage and print every intensity delta as JSON
    Trace(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Scenario file, or `-` for standard input
    input: String,
    /// Write the payload here instead of standard output
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Debug, Default, Args)]
struct ConfigArgs {
    /// Resemblance (strengthen) coefficient
    #[arg(long, value_parser = coefficient, allow_hyphen_values = true)]
    alpha: Option<Coefficient>,
    #[arg(long, value_parser = coefficient, allow_hyphen_values = true)]
    beta_enabling: Option<Coefficient>,
    #[arg(long, value_parser = coefficient, allow_hyphen_values = true)]
    beta_preventing: Option<Coefficient>,
    #[arg(long, value_parser = coefficient, allow_hyphen_values = true)]
    beta_triggering: Option<Coefficient>,
    /// Contiguity coefficient
    #[arg(long, value_parser = coefficient, allow_hyphen_values = true)]
    contiguity: Option<Coefficient>,
    /// Opposition coefficient
    #[arg(long, value_parser = coefficient, allow_hyphen_values = true)]
    gamma: Option<Coefficient>,
    /// Intensity cap
    #[arg(long, value_parser = intensity)]
    i_max: Option<Intensity>,
    /// Execute the pseudo-will of contradictory units that reach `rho`
    #[arg(long)]
    resolve: bool,
    /// Crossing gate for resolution
    #[arg(long, value_parser = intensity)]
    rho: Option<Intensity>,
    #[arg(long)]
    rounds: Option<u32>,
    /// Resemblance overlap threshold in [0, 1]
    #[arg(long, value_parser = coefficient)]
    sigma: Option<Coefficient>,
    /// Scope-of-effect threshold
    #[arg(long, value_parser = intensity)]
    tau: Option<Intensity>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Leave delta annotations off the edges
    #[arg(long)]
    no_deltas: bool,
    /// Draw plates after montage and resolution
    #[arg(long)]
    after_montage: bool,
    #[arg(long, value_enum, default_value_t = RankArg::LR)]
    rankdir: RankArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RankArg {
    #[value(name = "LR")]
    LR,
    #[value(name = "TB")]
    TB,
}

fn coefficient(s: &str) -> Result<Coefficient, String> {
    s.parse::<Coefficient>().map_err(|e| e.to_string())
}

fn intensity(s: &str) -> Result<Intensity, String> {
    s.parse::<Intensity>().map_err(|e| e.to_string())
}

impl ConfigArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            alpha: self.alpha,
            beta_enabling: self.beta_enabling,
            beta_preventing: self.beta_preventing,
            beta_triggering: self.beta_triggering,
            contiguity: self.contiguity,
            gamma: self.gamma,
            i_max: self.i_max,
            resolve: self.resolve.then_some(true),
            rho: self.rho,
            rounds: self.rounds,
            sigma: self.sigma,
            tau: self.tau,
        }
    }
}

/// Collects output and the eventual exit code.
struct Session<'a> {
    env: &'a Env,
    stdin: &'a [u8],
    stdout: Vec<u8>,
    stderr: String,
}

/// A failure that ends the run with `ExitCode`.
struct Fail(ExitCode);

impl<'a> Session<'a> {
    fn error(&mut self, exit: ExitCode, message: impl std::fmt::Display) -> Fail {
        let _ = writeln!(self.stderr, "error: {message}");
        Fail(exit)
    }

    fn read_input(&mut self, input: &str) -> Result<(String, String), Fail> {
        let (label, bytes) = if input == "-" {
            ("<stdin>".to_owned(), self.stdin.to_vec())
        } else {
            match std::fs::read(input) {
                Ok(bytes) => (input.to_owned(), bytes),
                Err(e) => {
                    return Err(self.error(ExitCode::Io, format!("cannot read `{input}`: {e}")))
                }
            }
        };
        match String::from_utf8(bytes) {
            Ok(text) => Ok((label, text)),
            Err(_) => Err(self.error(ExitCode::Io, format!("`{label}` is not valid UTF-8"))),
        }
    }

    fn report_diagnostics(&mut self, label: &str, diagnostics: &[Diagnostic]) {
        for d in diagnostics {
            let _ = writeln!(self.stderr, "{label}:{d}");
        }
    }

    /// Parses the input, printing every diagnostic. Fails with `Parse` on
    /// syntax errors and `Validation` on any other error.
    fn load(&mut self, input: &str) -> Result<ScenarioDoc, Fail> {
        let (label, text) = self.read_input(input)?;
        let outcome = parse_with_diagnostics(&text);
        self.report_diagnostics(&label, &outcome.diagnostics);
        match outcome.doc {
            Some(doc) => Ok(doc),
            None if outcome.has_syntax_errors() => Err(Fail(ExitCode::Parse)),
            None => Err(Fail(ExitCode::Validation)),
        }
    }

    fn env_overrides(&mut self) -> Result<ConfigOverrides, Fail> {
        let Some(path) = self.env.config_path.clone() else {
            return Ok(ConfigOverrides::default());
        };
        let text = std::fs::read_to_string(&path).map_err(|e| {
            self.error(
                ExitCode::Io,
                format!("cannot read EOCOS_CONFIG `{}`: {e}", path.display()),
            )
        })?;
        ConfigOverrides::parse_key_values(&text).map_err(|(line, e)| {
            self.error(
                ExitCode::Validation,
                format!("{}:{line}: {e}", path.display()),
            )
        })
    }

    /// defaults < EOCOS_CONFIG < scenario config block < flags
    fn effective_config(
        &mut self,
        doc: &ScenarioDoc,
        flags: &ConfigArgs,
    ) -> Result<MontageConfig, Fail> {
        let cfg = self
            .env_overrides()?
            .merged_with(&doc.config_overrides)
            .merged_with(&flags.overrides())
            .resolve_config();
        cfg.validate()
            .map_err(|e| self.error(ExitCode::Validation, format!("invalid configuration: {e}")))?;
        Ok(cfg)
    }

    fn run_montage(&mut self, doc: &ScenarioDoc, cfg: &MontageConfig) -> Result<EoSReport, Fail> {
        run_eos(&doc.structure, cfg).map_err(|e| {
            let exit = match e {
                EngineError::Config(_) | EngineError::IntensityAboveCap { .. } => {
                    ExitCode::Validation
                }
                EngineError::Model(_) => ExitCode::Internal,
            };
            self.error(exit, e)
        })
    }

    fn emit(&mut self, output: Option<&Path>, payload: String) -> Result<(), Fail> {
        match output {
            Some(path) => std::fs::write(path, payload).map_err(|e| {
                self.error(
                    ExitCode::Io,
                    format!("cannot write `{}`: {e}", path.display()),
                )
            }),
            None => {
                self.stdout.extend_from_slice(payload.as_bytes());
                Ok(())
            }
        }
    }

    fn check(&mut self, args: &CommonArgs) -> Result<(), Fail> {
        let (label, text) = self.read_input(&args.input)?;
        let outcome = parse_with_diagnostics(&text);
        self.report_diagnostics(&label, &outcome.diagnostics);
        let errors = outcome.errors().count();
        let warnings = outcome.diagnostics.len() - errors;
        let summary = format!(
            "{errors} error{}, {warnings} warning{}\n",
            if errors == 1 { "" } else { "s" },
            if warnings == 1 { "" } else { "s" },
        );
        self.emit(args.output.as_deref(), summary)?;
        if outcome.diagnostics.iter().any(|d| d.code == codes::SYNTAX) {
            return Err(Fail(ExitCode::Parse));
        }
        let Some(doc) = outcome.doc else {
            return Err(Fail(ExitCode::Validation));
        };
        // the flags and EOCOS_CONFIG can still make the run invalid
        let cfg = self.effective_config(&doc, &args.config)?;
        if let Some(unit) = doc
            .structure
            .units()
            .values()
            .find(|u| u.intensity() > cfg.i_max)
        {
            return Err(self.error(
                ExitCode::Validation,
                format!(
                    "unit `{}` has intensity {} above the cap {}",
                    unit.id(),
                    unit.intensity(),
                    cfg.i_max
                ),
            ));
        }
        Ok(())
    }

    fn dispatch(&mut self, command: Command) -> Result<(), Fail> {
        match command {
            Command::Check(args) => self.check(&args),
            Command::Montage { common, format } => {
                let doc = self.load(&common.input)?;
                let cfg = self.effective_config(&doc, &common.config)?;
                let report = self.run_montage(&doc, &cfg)?;
                let payload = match format {
                    Format::Text => report.to_text(),
                    Format::Json => report.to_json(),
                };
                self.emit(common.output.as_deref(), payload)
            }
            Command::Render { common, render } => {
                let doc = self.load(&common.input)?;
                let cfg = self.effective_config(&doc, &common.config)?;
                let report = self.run_montage(&doc, &cfg)?;
                let opts = RenderOptions {
                    show_deltas: !render.no_deltas,
                    after_montage: render.after_montage,
                    rankdir: match render.rankdir {
                        RankArg::LR => RankDir::LR,
                        RankArg::TB => RankDir::TB,
                    },
                };
                let dot = emit_dot(&doc.structure, Some(&report), &opts)
                    .map_err(|e| self.error(ExitCode::Internal, e))?;
                self.emit(common.output.as_deref(), dot)
            }
            Command::Trace(common) => {
                let doc = self.load(&common.input)?;
                let cfg = self.effective_config(&doc, &common.config)?;
                let report = self.run_montage(&doc, &cfg)?;
                self.emit(common.output.as_deref(), emit_trace_json(&report))
            }
        }
    }
}

/// Runs the CLI with `argv` (program name first) against `stdin`, reading
/// `EOCOS_CONFIG` from the process environment.
pub fn run_cli<I, T>(argv: I, stdin: &[u8]) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli_with(argv, stdin, &Env::from_process())
}

/// [`run_cli`] with an explicit environment.
pub fn run_cli_with<I, T>(argv: I, stdin: &[u8], env: &Env) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput {
                    exit: ExitCode::Parse,
                    stdout: Vec::new(),
                    stderr: text.into_bytes(),
                }
            } else {
                // --help and --version
                CliOutput {
                    exit: ExitCode::Success,
                    stdout: text.into_bytes(),
                    stderr: Vec::new(),
                }
            };
        }
    };
    let mut session = Session {
        env,
        stdin,
        stdout: Vec::new(),
        stderr: String::new(),
    };
    let exit = match session.dispatch(cli.command) {
        Ok(()) => ExitCode::Success,
        Err(Fail(code)) => code,
    };
    CliOutput {
        exit,
        stdout: session.stdout,
        stderr: session.stderr.into_bytes(),
    }
}
