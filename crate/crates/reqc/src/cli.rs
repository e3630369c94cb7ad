//! The `reqc` command line.
//!
//! Exit codes: 0 success, 1 findings (requirement errors, failing traces,
//! partial coverage), 2 usage or IO errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use reqc_core::block_ir::{build_graph, simulate, violations_of};
use reqc_core::exporters::{export, sanitize, ExportConfig, ExportError, Format};
use reqc_core::semantics::{evaluate, normalize, Form, StepConfig, Status, Trace, Verdict};
use reqc_core::syntax::{check, Requirement, Severity};
use reqc_core::testgen::{annotate, generate, AnnotateOptions, CalibrationMode, CoverageReport, GenConfig, TestgenError};
use reqc_core::VariableDictionary;

use crate::config::{FileConfig, Overrides, RunConfig, SEED_ENV};
use crate::dict_io::{load_dictionary, serialize_dictionary, DictFormat};
use crate::reqfile::{self, FileDiagnostic, Paragraph};
use crate::trace_io::{load_trace, write_trace, TraceFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "reqc", version, about = "Check, evaluate, export and test pattern-based requirements")]
struct Cli {
    /// Configuration file (default: ./reqc.toml if present).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and check requirements against a dictionary.
    Check(CheckArgs),
    /// Write one file per requirement in the chosen format.
    Export(ExportArgs),
    /// Evaluate requirements on a trace.
    Eval(EvalArgs),
    /// Generate test vectors and a coverage report.
    Testgen(TestgenArgs),
    /// Validate or convert dictionary files.
    #[command(subcommand)]
    Dict(DictCmd),
}

#[derive(Args, Debug)]
struct Common {
    /// Requirements file.
    requirements: PathBuf,
    /// Dictionary file (.json or .csv).
    #[arg(long)]
    dict: Option<PathBuf>,
    /// Controller step in milliseconds.
    #[arg(long)]
    step_ms: Option<u64>,
    /// Only these requirement ids (repeatable).
    #[arg(long = "id")]
    ids: Vec<String>,
    /// Every requirement (the default when no --id is given).
    #[arg(long, conflicts_with = "ids")]
    all: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// Treat warnings as findings.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Matlab,
    SpecXml,
    C,
    BlockJson,
}

impl FormatArg {
    fn format(self) -> Format {
        match self {
            FormatArg::Text => Format::Text,
            FormatArg::Matlab => Format::MatlabScript,
            FormatArg::SpecXml => Format::SpecXml,
            FormatArg::C => Format::CHarness,
            FormatArg::BlockJson => Format::BlockJson,
        }
    }
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    format: FormatArg,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Skipped requirements and warnings count as findings.
    #[arg(long)]
    strict: bool,
    /// C integer width: 8, 16, 32 or 64.
    #[arg(long)]
    int_bits: Option<u8>,
    /// C floating type: float or double.
    #[arg(long)]
    float: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Future,
    Past,
    Both,
    Blocks,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    /// Trace file (.csv or .json).
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, value_enum, default_value = "future")]
    form: FormArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CalibrationArg {
    Fixed,
    Search,
}

#[derive(Args, Debug)]
struct TestgenArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Search attempts per requirement.
    #[arg(long)]
    budget: Option<usize>,
    /// Output directory; each requirement gets a subdirectory.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Count timing objectives in the percentage.
    #[arg(long)]
    include_timing: bool,
    /// Also demand every input combination of two-input logic blocks.
    #[arg(long)]
    combinations: bool,
    #[arg(long, value_enum, default_value = "fixed")]
    calibration: CalibrationArg,
    /// Exit 0 even when coverage is below 100%.
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DictFormatArg {
    Json,
    Csv,
}

impl DictFormatArg {
    fn format(self) -> DictFormat {
        match self {
            DictFormatArg::Json => DictFormat::Json,
            DictFormatArg::Csv => DictFormat::Csv,
        }
    }
}

#[derive(Subcommand, Debug)]
enum DictCmd {
    /// Load a dictionary and report problems.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Option<DictFormatArg>,
    },
    /// Rewrite a dictionary in another format.
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: DictFormatArg,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

/// Ends a command early with an exit code; the message is already printed.
struct Exit(i32);

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn out(&mut self, s: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{s}");
    }

    fn err(&mut self, s: impl std::fmt::Display) {
        let _ = writeln!(self.err, "{s}");
    }

    fn fail(&mut self, code: i32, s: impl std::fmt::Display) -> Exit {
        self.err(format!("reqc: {s}"));
        Exit(code)
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut io = Io { out, err };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(io.out, "{text}");
                EXIT_OK
            } else {
                let _ = write!(io.err, "{text}");
                EXIT_USAGE
            };
        }
    };
    match dispatch(cli, &mut io) {
        Ok(code) | Err(Exit(code)) => code,
    }
}

fn dispatch(cli: Cli, io: &mut Io) -> Result<i32, Exit> {
    let file = FileConfig::discover(cli.config.as_deref()).map_err(|e| io.fail(EXIT_USAGE, e))?;
    let env_seed = std::env::var(SEED_ENV).ok();
    let merge = |io: &mut Io, o: Overrides| RunConfig::merge(&file, &o, env_seed.as_deref()).map_err(|e| io.fail(EXIT_USAGE, e));
    match cli.cmd {
        Cmd::Check(a) => {
            let cfg = merge(io, Overrides { step_ms: a.common.step_ms, ..Default::default() })?;
            cmd_check(&a, &file, &cfg, io)
        }
        Cmd::Export(a) => {
            let o = Overrides {
                step_ms: a.common.step_ms,
                output: a.out.clone(),
                int_bits: a.int_bits,
                float: a.float.clone(),
                ..Default::default()
            };
            let cfg = merge(io, o)?;
            cmd_export(&a, &file, &cfg, io)
        }
        Cmd::Eval(a) => {
            let cfg = merge(io, Overrides { step_ms: a.common.step_ms, ..Default::default() })?;
            cmd_eval(&a, &file, &cfg, io)
        }
        Cmd::Testgen(a) => {
            let o = Overrides {
                step_ms: a.common.step_ms,
                horizon: a.horizon,
                seed: a.seed,
                budget: a.budget,
                output: a.out.clone(),
                ..Default::default()
            };
            let cfg = merge(io, o)?;
            cmd_testgen(&a, &file, &cfg, io)
        }
        Cmd::Dict(d) => cmd_dict(d, io),
    }
}

fn read(path: &Path, io: &mut Io) -> Result<String, Exit> {
    std::fs::read_to_string(path).map_err(|e| io.fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str, io: &mut Io) -> Result<(), Exit> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io.fail(EXIT_USAGE, format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| io.fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn read_dictionary(path: &Path, format: Option<DictFormat>, io: &mut Io) -> Result<VariableDictionary, Exit> {
    let src = read(path, io)?;
    let format = format.unwrap_or_else(|| DictFormat::from_path(path));
    load_dictionary(&src, format).map_err(|e| {
        io.err(FileDiagnostic::new(&path.display().to_string(), e.line.max(1), 1, Severity::Error, &e.message));
        Exit(EXIT_USAGE)
    })
}

/// The requirements file, its dictionary and the selected paragraphs.
struct Inputs {
    file: String,
    dict: VariableDictionary,
    selected: Vec<Paragraph>,
}

fn load_inputs(c: &Common, file_cfg: &FileConfig, io: &mut Io) -> Result<Inputs, Exit> {
    let dict_path = c.dict.clone().or_else(|| file_cfg.dictionary.clone());
    let Some(dict_path) = dict_path else {
        return Err(io.fail(EXIT_USAGE, "no dictionary: pass --dict or set `dictionary` in reqc.toml"));
    };
    let dict = read_dictionary(&dict_path, None, io)?;
    let file = c.requirements.display().to_string();
    let src = read(&c.requirements, io)?;
    let paragraphs = match reqfile::split(&file, &src) {
        Ok(p) => p,
        Err(ds) => {
            for d in ds {
                io.err(d);
            }
            return Err(Exit(EXIT_FINDINGS));
        }
    };
    for id in &c.ids {
        if !paragraphs.iter().any(|p| &p.id == id) {
            return Err(io.fail(EXIT_USAGE, format!("{file}: no requirement with id '{id}'")));
        }
    }
    let selected = paragraphs.into_iter().filter(|p| c.ids.is_empty() || c.ids.contains(&p.id)).collect();
    Ok(Inputs { file, dict, selected })
}

/// Parses, checks and normalizes one paragraph. Returns the requirement
/// when there are no errors, plus every diagnostic.
fn prepare(file: &str, p: &Paragraph, dict: &VariableDictionary, step: StepConfig) -> (Option<Requirement>, Vec<FileDiagnostic>) {
    let req = match reqfile::parse(file, p) {
        Ok(r) => r,
        Err(ds) => return (None, ds),
    };
    let mut diags: Vec<FileDiagnostic> = check(&req, dict).iter().map(|d| FileDiagnostic::from_paragraph(file, p, d)).collect();
    if diags.iter().any(FileDiagnostic::is_error) {
        return (None, diags);
    }
    if let Err(e) = normalize(&req, step) {
        diags.push(FileDiagnostic::new(file, p.line, 1, Severity::Error, format!("requirement '{}': {e}", p.id)));
        return (None, diags);
    }
    (Some(req), diags)
}

fn findings(diags: &[FileDiagnostic], strict: bool) -> bool {
    diags.iter().any(|d| d.is_error() || (strict && d.severity == Severity::Warning))
}

fn cmd_check(a: &CheckArgs, file_cfg: &FileConfig, cfg: &RunConfig, io: &mut Io) -> Result<i32, Exit> {
    let inp = load_inputs(&a.common, file_cfg, io)?;
    let step = StepConfig { step_ms: cfg.step_ms };
    let results: Vec<_> = inp.selected.par_iter().map(|p| prepare(&inp.file, p, &inp.dict, step).1).collect();
    let mut code = EXIT_OK;
    for diags in results {
        if findings(&diags, a.strict) {
            code = EXIT_FINDINGS;
        }
        for d in diags {
            io.err(d);
        }
    }
    Ok(code)
}

enum Exported {
    Written(PathBuf, String),
    Skipped(FileDiagnostic),
    Failed(FileDiagnostic),
}

fn cmd_export(a: &ExportArgs, file_cfg: &FileConfig, cfg: &RunConfig, io: &mut Io) -> Result<i32, Exit> {
    let inp = load_inputs(&a.common, file_cfg, io)?;
    let format = a.format.format();
    let ecfg = ExportConfig { step: StepConfig { step_ms: cfg.step_ms }, widths: cfg.widths };
    let results: Vec<_> = inp
        .selected
        .par_iter()
        .map(|p| {
            let (req, diags) = prepare(&inp.file, p, &inp.dict, ecfg.step);
            let outcome = req.map(|r| match export(&r, &inp.dict, &ecfg, format) {
                Ok(b) => Exported::Written(cfg.output.join(format!("{}{}", sanitize(&r.id), format.extension())), b.payload),
                Err(ExportError::InitiallyNotSupported(_)) => Exported::Skipped(FileDiagnostic::new(
                    &inp.file,
                    p.line,
                    1,
                    Severity::Warning,
                    format!("requirement '{}' skipped: spec-xml export does not support the initially scope", p.id),
                )),
                Err(e) => Exported::Failed(FileDiagnostic::new(&inp.file, p.line, 1, Severity::Error, format!("requirement '{}': {e}", p.id))),
            });
            (diags, outcome)
        })
        .collect();
    let mut code = EXIT_OK;
    for (diags, outcome) in results {
        if findings(&diags, a.strict) {
            code = EXIT_FINDINGS;
        }
        for d in diags {
            io.err(d);
        }
        match outcome {
            Some(Exported::Written(path, payload)) => {
                write(&path, &payload, io)?;
                io.out(path.display());
            }
            Some(Exported::Skipped(d)) => {
                if a.strict {
                    code = EXIT_FINDINGS;
                }
                io.err(d);
            }
            Some(Exported::Failed(d)) => {
                code = EXIT_FINDINGS;
                io.err(d);
            }
            None => {}
        }
    }
    Ok(code)
}

fn steps(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
}

fn verdict_lines(id: &str, v: &Verdict) -> Vec<String> {
    let mut lines = vec![match v.status {
        Status::Pass => format!("{id}: pass"),
        Status::PassWithPending => format!("{id}: pass ({} pending at steps {})", v.pending, steps(&v.pending_anchors)),
        Status::Fail => format!("{id}: fail at steps {}", steps(&v.violation_anchors())),
    }];
    for x in &v.violations {
        lines.push(format!("  step {} (checked at {}): {}", x.anchor_step, x.check_step, x.explanation));
    }
    lines
}

/// Status, printed lines and whether the forms diverged.
fn eval_one(req: &Requirement, trace: &Trace, dict: &VariableDictionary, form: FormArg) -> Result<(bool, Vec<String>, bool), String> {
    let step = StepConfig { step_ms: trace.step_ms };
    let ev = |f| evaluate(req, trace, dict, step, f).map_err(|e| e.to_string());
    match form {
        FormArg::Future | FormArg::Past => {
            let v = ev(if form == FormArg::Future { Form::Future } else { Form::Past })?;
            Ok((v.status == Status::Fail, verdict_lines(&req.id, &v), false))
        }
        FormArg::Both => {
            let f = ev(Form::Future)?;
            let p = ev(Form::Past)?;
            let agree = f.status == p.status
                && f.violation_anchors() == p.violation_anchors()
                && f.pending_anchors == p.pending_anchors;
            let mut lines = verdict_lines(&req.id, &f);
            if !agree {
                lines.push(format!(
                    "{}: error: future and past forms disagree (future: {} at [{}], past: {} at [{}])",
                    req.id,
                    f.status.as_str(),
                    steps(&f.violation_anchors()),
                    p.status.as_str(),
                    steps(&p.violation_anchors())
                ));
            }
            Ok((f.status == Status::Fail, lines, !agree))
        }
        FormArg::Blocks => {
            let g = build_graph(req, dict, step).map_err(|e| e.to_string())?;
            let sim = simulate(&g, trace, dict).map_err(|e| e.to_string())?;
            let bad = violations_of(&g, &sim);
            let line = if bad.is_empty() {
                format!("{}: pass", req.id)
            } else {
                format!("{}: fail, proof objective false at steps {}", req.id, steps(&bad))
            };
            Ok((!bad.is_empty(), vec![line], false))
        }
    }
}

fn cmd_eval(a: &EvalArgs, file_cfg: &FileConfig, cfg: &RunConfig, io: &mut Io) -> Result<i32, Exit> {
    let inp = load_inputs(&a.common, file_cfg, io)?;
    let src = read(&a.trace, io)?;
    let tname = a.trace.display().to_string();
    let trace = load_trace(&src, TraceFormat::from_path(&a.trace), Some(cfg.step_ms))
        .map_err(|e| io.fail(EXIT_USAGE, format!("{tname}:{}: {}", e.line, e.message)))?;
    let trace = trace.conform(&inp.dict).map_err(|e| io.fail(EXIT_USAGE, format!("{tname}: {e}")))?;
    let step = StepConfig { step_ms: trace.step_ms };
    let results: Vec<_> = inp
        .selected
        .par_iter()
        .map(|p| {
            let (req, diags) = prepare(&inp.file, p, &inp.dict, step);
            (diags, req.map(|r| eval_one(&r, &trace, &inp.dict, a.form).map_err(|e| format!("{}: error: {e}", p.id))))
        })
        .collect();
    let mut code = EXIT_OK;
    for (diags, res) in results {
        if findings(&diags, false) {
            code = EXIT_FINDINGS;
        }
        for d in diags {
            io.err(d);
        }
        match res {
            Some(Ok((failed, lines, diverged))) => {
                if failed || diverged {
                    code = EXIT_FINDINGS;
                }
                for l in lines {
                    io.out(l);
                }
            }
            Some(Err(e)) => {
                code = EXIT_FINDINGS;
                io.err(e);
            }
            None => {}
        }
    }
    Ok(code)
}

type Generated = Result<(Vec<(String, String)>, CoverageReport), String>;

fn testgen_one(req: &Requirement, dict: &VariableDictionary, opts: AnnotateOptions, gen: &GenConfig) -> Result<Generated, TestgenError> {
    let g = match build_graph(req, dict, StepConfig { step_ms: gen.step_ms }) {
        Ok(g) => g,
        Err(e) => return Ok(Err(e.to_string())),
    };
    let ag = annotate(&g, opts);
    let (vectors, mut report) = generate(&ag, dict, gen)?;
    report.requirement = req.id.clone();
    let files = vectors
        .iter()
        .map(|v| {
            let t = v.simulation_trace().expect("vector columns have equal length");
            (format!("vector_{}.csv", v.id), write_trace(&t, TraceFormat::Csv))
        })
        .collect();
    Ok(Ok((files, report)))
}

fn cmd_testgen(a: &TestgenArgs, file_cfg: &FileConfig, cfg: &RunConfig, io: &mut Io) -> Result<i32, Exit> {
    let inp = load_inputs(&a.common, file_cfg, io)?;
    let step = StepConfig { step_ms: cfg.step_ms };
    let mut gen = GenConfig::new(cfg.horizon, cfg.step_ms);
    gen.seed = cfg.seed;
    gen.budget = cfg.budget;
    gen.include_timing = a.include_timing;
    gen.calibration = match a.calibration {
        CalibrationArg::Fixed => CalibrationMode::Fixed,
        CalibrationArg::Search => CalibrationMode::Search,
    };
    let opts = AnnotateOptions { combinations: a.combinations };
    let results: Vec<_> = inp
        .selected
        .par_iter()
        .map(|p| {
            let (req, diags) = prepare(&inp.file, p, &inp.dict, step);
            (p, diags, req.map(|r| testgen_one(&r, &inp.dict, opts, &gen)))
        })
        .collect();
    let mut code = EXIT_OK;
    let mut usage = false;
    for (p, diags, res) in results {
        if findings(&diags, false) {
            code = EXIT_FINDINGS;
        }
        for d in diags {
            io.err(d);
        }
        match res {
            None => {}
            Some(Err(e)) => {
                usage = true;
                io.err(format!("{}: error: {e}", p.id));
            }
            Some(Ok(Err(e))) => {
                code = EXIT_FINDINGS;
                io.err(format!("{}: error: {e}", p.id));
            }
            Some(Ok(Ok((files, report)))) => {
                let dir = cfg.output.join(sanitize(&p.id));
                clear_vectors(&dir);
                for (name, body) in &files {
                    write(&dir.join(name), body, io)?;
                }
                let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
                json.push('\n');
                write(&dir.join("coverage.json"), &json, io)?;
                io.out(format!(
                    "{}: {:.1}% coverage ({}/{} targets), {} vectors in {}",
                    p.id,
                    report.percentage,
                    report.satisfied,
                    report.total,
                    report.vectors,
                    dir.display()
                ));
                for u in &report.unsatisfied {
                    let o = &report.objectives[u.objective];
                    let port = o.port.map(|k| format!(" input {k}")).unwrap_or_default();
                    io.out(format!(
                        "  objective {} ({} on {} {}{port}) never {}: {}",
                        o.id,
                        o.kind.as_str(),
                        o.block_kind,
                        o.block,
                        u.value,
                        u.reason.as_str()
                    ));
                }
                if !report.is_complete() && !a.allow_partial {
                    code = EXIT_FINDINGS;
                }
            }
        }
    }
    Ok(if usage { EXIT_USAGE } else { code })
}

/// Removes vectors left over from an earlier run.
fn clear_vectors(dir: &Path) {
    let Ok(entries) = std::fs::read_dir(dir) else { return };
    for e in entries.flatten() {
        let name = e.file_name();
        let name = name.to_string_lossy();
        if name.starts_with("vector_") && name.ends_with(".csv") {
            let _ = std::fs::remove_file(e.path());
        }
    }
}

fn cmd_dict(d: DictCmd, io: &mut Io) -> Result<i32, Exit> {
    match d {
        DictCmd::Validate { file, format } => {
            let src = read(&file, io)?;
            let format = format.map(DictFormatArg::format).unwrap_or_else(|| DictFormat::from_path(&file));
            match load_dictionary(&src, format) {
                Ok(dict) => {
                    io.out(format!("{}: {} variables", file.display(), dict.len()));
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    io.err(FileDiagnostic::new(&file.display().to_string(), e.line.max(1), 1, Severity::Error, e.to_string()));
                    Ok(EXIT_FINDINGS)
                }
            }
        }
        DictCmd::Convert { file, to, out } => {
            let dict = read_dictionary(&file, None, io)?;
            let text = serialize_dictionary(&dict, to.format());
            match out {
                Some(path) => write(&path, &text, io)?,
                None => {
                    let _ = io.out.write_all(text.as_bytes());
                }
            }
            Ok(EXIT_OK)
        }
    }
}
