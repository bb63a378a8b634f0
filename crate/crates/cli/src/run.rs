//! The four commands, as library calls that return exit status and output
//! instead of touching the process.

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use imds::lang::load_system;
use imds::verify::report::Report;
use imds::verify::{
    check_deadlock_free_ctl, check_partial_deadlock, check_termination, check_total_deadlock, Property,
    TerminationPredicate, VerifyError,
};
use imds::{build_lts, LtsError, SystemSpec, DEFAULT_NODE_LIMIT};
use imds_swarm::{
    compile_to_imds, generate_all_behaviors, generate_identical_fleet, generate_many_behaviors,
    generate_similar_behavior, load_env_graph, parse_plan, parse_plans, CompileError, EnvGraph, RouteError, RoutePlan,
    TopologyError,
};
use thiserror::Error;

use crate::diagram::render_sequence_diagram;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Spec(String),
    #[error("{0}")]
    Lts(#[from] LtsError),
    #[error("{0}")]
    Verify(#[from] VerifyError),
    #[error("{path}: {source}")]
    Topology { path: PathBuf, source: TopologyError },
    #[error("{path}: {source}")]
    Route { path: PathBuf, source: RouteError },
    #[error("{0}")]
    Generate(RouteError),
    #[error("{0}")]
    Compile(#[from] CompileError),
    #[error("{path}: not a JSON report: {source}")]
    Report { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    pub spec: PathBuf,
    pub limit: usize,
    /// Agents whose joint termination is checked; `None` skips the check.
    pub terminate: Option<Vec<String>>,
    pub report: Option<PathBuf>,
    pub format: ReportFormat,
}

impl CheckConfig {
    pub fn new(spec: impl Into<PathBuf>) -> Self {
        CheckConfig {
            spec: spec.into(),
            limit: DEFAULT_NODE_LIMIT,
            terminate: None,
            report: None,
            format: ReportFormat::Text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileConfig {
    pub topology: PathBuf,
    pub plans: Vec<PathBuf>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerateMode {
    /// Every simple path from the start to a side chamber.
    All,
    /// The plan rotated to start at `to`, or at the start chamber if absent.
    Similar {
        plan: PathBuf,
        to: Option<String>,
    },
    Fleet {
        plan: PathBuf,
        count: usize,
    },
    /// One branching plan over every route to the targets.
    Many {
        targets: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerateConfig {
    pub topology: PathBuf,
    pub start: Option<String>,
    pub mode: GenerateMode,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderConfig {
    /// A JSON report written by `check`.
    pub witnesses: PathBuf,
    pub spec: PathBuf,
    pub limit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunConfig {
    Check(CheckConfig),
    Compile(CompileConfig),
    Generate(GenerateConfig),
    Render(RenderConfig),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(e: CliError, mut stderr: String) -> Self {
        match e {
            CliError::Spec(diags) => writeln!(stderr, "{diags}").unwrap(),
            e => writeln!(stderr, "error: {e}").unwrap(),
        }
        Outcome { status: EXIT_ERROR, stdout: String::new(), stderr }
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg {
        RunConfig::Check(c) => run_check(c),
        RunConfig::Compile(c) => run_compile(c),
        RunConfig::Generate(c) => run_generate(c),
        RunConfig::Render(c) => run_render(c),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Loads a system, appending any warnings to `stderr`.
pub fn load_spec(path: &Path, stderr: &mut String) -> Result<SystemSpec, CliError> {
    let text = read(path)?;
    let name = path.display().to_string();
    match load_system(&text) {
        Ok((sys, diags)) => {
            stderr.push_str(&diags.render(&name));
            Ok(sys)
        }
        Err(diags) => Err(CliError::Spec(diags.render(&name).trim_end().to_string())),
    }
}

/// Every verdict of a check run. The exit status ignores the CTL verdict,
/// which also fails on systems that terminate.
pub fn check_system(sys: &SystemSpec, limit: usize, terminate: Option<&[String]>) -> Result<(Report, i32), CliError> {
    let pred = terminate.map(|names| TerminationPredicate::from_names(sys, names)).transpose()?;
    let lts = build_lts(sys, limit)?;
    let mut report = Report::new(&lts);
    report.push(sys, &check_total_deadlock(&lts)?, None);
    report.push(sys, &check_partial_deadlock(&lts)?, None);
    report.push(sys, &check_deadlock_free_ctl(&lts)?, None);
    if let Some(pred) = &pred {
        report.push(sys, &check_termination(&lts, pred)?, Some(pred.subset().names(sys)));
    }
    let ctl = Property::DeadlockFreeCtl.key();
    let violated = report.verdicts.iter().any(|v| !v.holds && v.property != ctl);
    Ok((report, if violated { EXIT_VIOLATED } else { EXIT_HOLDS }))
}

fn summary(report: &Report) -> String {
    let mut out = format!("lts nodes={} edges={}\n", report.lts.nodes, report.lts.edges);
    for v in &report.verdicts {
        let verdict = if v.holds { "holds".to_string() } else { format!("violated ({} witnesses)", v.witnesses.len()) };
        match &v.subset {
            Some(s) => writeln!(out, "{} [{}]: {verdict}", v.property, s.join(",")).unwrap(),
            None => writeln!(out, "{}: {verdict}", v.property).unwrap(),
        }
    }
    out
}

pub fn run_check(cfg: &CheckConfig) -> Outcome {
    let mut stderr = String::new();
    let result = (|| {
        let sys = load_spec(&cfg.spec, &mut stderr)?;
        let (report, status) = check_system(&sys, cfg.limit, cfg.terminate.as_deref())?;
        let body = match cfg.format {
            ReportFormat::Text => report.to_text(),
            ReportFormat::Json => report.to_json(),
        };
        let stdout = match &cfg.report {
            Some(path) => {
                write(path, &body)?;
                summary(&report)
            }
            None => body,
        };
        Ok((status, stdout))
    })();
    match result {
        Ok((status, stdout)) => Outcome { status, stdout, stderr },
        Err(e) => Outcome::error(e, stderr),
    }
}

fn load_topology(path: &Path) -> Result<EnvGraph, CliError> {
    load_env_graph(&read(path)?).map_err(|source| CliError::Topology { path: path.to_path_buf(), source })
}

fn load_plans(path: &Path) -> Result<Vec<RoutePlan>, CliError> {
    parse_plans(&read(path)?).map_err(|source| CliError::Route { path: path.to_path_buf(), source })
}

fn load_plan(path: &Path) -> Result<RoutePlan, CliError> {
    parse_plan(&read(path)?).map_err(|source| CliError::Route { path: path.to_path_buf(), source })
}

pub fn run_compile(cfg: &CompileConfig) -> Outcome {
    let result = (|| {
        let g = load_topology(&cfg.topology)?;
        let mut plans = Vec::new();
        for p in &cfg.plans {
            plans.extend(load_plans(p)?);
        }
        let text = compile_to_imds(&g, &plans)?;
        write(&cfg.output, &text)?;
        Ok(format!("{} robots compiled to {}\n", plans.len(), cfg.output.display()))
    })();
    match result {
        Ok(stdout) => Outcome { status: EXIT_HOLDS, stdout, stderr: String::new() },
        Err(e) => Outcome::error(e, String::new()),
    }
}

/// Plans produced by `generate`, as plan-file text.
pub fn generate_plans(cfg: &GenerateConfig) -> Result<String, CliError> {
    let g = load_topology(&cfg.topology)?;
    let start = || cfg.start.clone().ok_or_else(|| CliError::Usage("--start is required for this mode".into()));
    let plans = match &cfg.mode {
        GenerateMode::All => {
            let all = generate_all_behaviors(&g, &start()?).map_err(CliError::Generate)?;
            all.into_iter()
                .enumerate()
                .map(|(i, p)| {
                    let name = format!("{}{}", p.robot, i + 1);
                    p.with_robot(name)
                })
                .collect()
        }
        GenerateMode::Similar { plan, to } => {
            let target = to.clone().map_or_else(start, Ok)?;
            vec![generate_similar_behavior(&g, &load_plan(plan)?, &target).map_err(CliError::Generate)?]
        }
        GenerateMode::Fleet { plan, count } => {
            let plan = load_plan(plan)?;
            plan.validate(&g).map_err(CliError::Generate)?;
            generate_identical_fleet(&plan, *count)
        }
        GenerateMode::Many { targets } => {
            let targets = targets.iter().cloned().collect();
            vec![generate_many_behaviors(&g, &start()?, &targets, &Default::default()).map_err(CliError::Generate)?]
        }
    };
    Ok(plans.iter().map(RoutePlan::to_text).collect())
}

pub fn run_generate(cfg: &GenerateConfig) -> Outcome {
    let result = generate_plans(cfg).and_then(|text| match &cfg.output {
        Some(path) => write(path, &text).map(|_| String::new()),
        None => Ok(text),
    });
    match result {
        Ok(stdout) => Outcome { status: EXIT_HOLDS, stdout, stderr: String::new() },
        Err(e) => Outcome::error(e, String::new()),
    }
}

/// Diagrams of every witness in a JSON report, each under a heading line.
pub fn render_report(report: &Report, sys: &SystemSpec, limit: usize) -> Result<String, CliError> {
    let lts = build_lts(sys, limit)?;
    let mut out = String::new();
    for v in &report.verdicts {
        for (i, w) in v.witnesses.iter().enumerate() {
            let cx = w.resolve(&lts)?;
            let d = render_sequence_diagram(&lts, &cx)?;
            if !out.is_empty() {
                out.push('\n');
            }
            writeln!(out, "== {} witness {} ({}) ==", v.property, i + 1, w.kind).unwrap();
            out.push_str(&d.to_text());
        }
    }
    Ok(out)
}

pub fn run_render(cfg: &RenderConfig) -> Outcome {
    let mut stderr = String::new();
    let result = (|| {
        let text = read(&cfg.witnesses)?;
        let report =
            Report::from_json(&text).map_err(|source| CliError::Report { path: cfg.witnesses.clone(), source })?;
        let sys = load_spec(&cfg.spec, &mut stderr)?;
        render_report(&report, &sys, cfg.limit)
    })();
    match result {
        Ok(stdout) => Outcome { status: EXIT_HOLDS, stdout, stderr },
        Err(e) => Outcome::error(e, stderr),
    }
}
