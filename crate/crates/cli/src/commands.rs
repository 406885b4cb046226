use std::path::{Path, PathBuf};

use netpassivity::analysis::{passivity_report, PassivityReport, TheoremCondition};
use netpassivity::graph::{build_incidence, graph_report, Digraph, GraphReport};
use netpassivity::simulate::SimError;
use netpassivity::spectral::{
    analyze_sym_lo, proposition1_from, proposition23_from, Proposition1Verdict, Proposition23Verdict, SpectralReport,
};
use netpassivity::suite::{run_proposition_suite, SuiteReport};
use netpassivity::{CouplingMode, NetworkSystem, SimConfig, Trajectory};
use serde::Serialize;
use serde_json::Value;

use crate::output::{outputs_svg, to_json, trajectory_csv, write_file};
use crate::scenario::{GraphSpec, Scenario};
use crate::{CliError, ExitStatus, TOOL_VERSION};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: ExitStatus,
    pub report: Value,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn new<T: Serialize>(status: ExitStatus, report: &T, files: Vec<PathBuf>) -> Self {
        Self {
            status,
            report: serde_json::to_value(report).expect("report serializes"),
            files,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub svg: bool,
}

impl RunOptions {
    fn apply(&self, scenario: &mut Scenario) {
        if let Some(dt) = self.dt {
            scenario.sim.dt = dt;
        }
        if let Some(t_end) = self.t_end {
            scenario.sim.t_end = t_end;
        }
    }

    fn out_path(&self, given: Option<&str>, default: String) -> PathBuf {
        let name = PathBuf::from(given.map_or(default, str::to_string));
        if name.is_absolute() {
            name
        } else {
            self.out_dir.as_deref().unwrap_or(Path::new(".")).join(name)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphAnalysis {
    pub graph_report: GraphReport,
    pub spectral: SpectralReport,
    pub proposition1: Proposition1Verdict,
    pub proposition2_3: Proposition23Verdict,
}

pub fn graph_analysis(g: &Digraph) -> Result<GraphAnalysis, CliError> {
    let inc = build_incidence(g);
    let a = analyze_sym_lo(&inc).map_err(|e| CliError::Input(format!("spectral analysis failed: {e}")))?;
    Ok(GraphAnalysis {
        graph_report: graph_report(g),
        spectral: a.report(),
        proposition1: proposition1_from(g, &a),
        proposition2_3: proposition23_from(g, &inc, &a),
    })
}

pub enum GraphSource<'a> {
    Scenario(&'a Path),
    GraphFile(&'a Path),
}

#[derive(Serialize)]
struct AnalyzeReport {
    tool_version: &'static str,
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario_hash: Option<String>,
    #[serde(flatten)]
    analysis: GraphAnalysis,
}

pub fn analyze_graph(source: GraphSource<'_>) -> Result<Outcome, CliError> {
    let (g, hash, path) = match source {
        GraphSource::Scenario(p) => {
            let s = Scenario::load(p)?;
            (s.graph.build()?, Some(s.hash()), p)
        }
        GraphSource::GraphFile(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            (GraphSpec::from_json(&text, &p.display().to_string())?.build()?, None, p)
        }
    };
    let report = AnalyzeReport {
        tool_version: TOOL_VERSION,
        source: path.display().to_string(),
        scenario_hash: hash,
        analysis: graph_analysis(&g)?,
    };
    Ok(Outcome::new(ExitStatus::Success, &report, Vec::new()))
}

#[derive(Serialize)]
struct Divergence {
    last_finite_time: f64,
    last_finite_state: Vec<f64>,
    cause: String,
}

#[derive(Serialize)]
struct Summary {
    scenario_name: String,
    scenario_hash: String,
    tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    mode: CouplingMode,
    config: SimConfig,
    /// `converged`, `not_converged` or `diverged`.
    status: &'static str,
    graph_report: GraphReport,
    spectral: GraphAnalysis,
    #[serde(skip_serializing_if = "Option::is_none")]
    divergence: Option<Divergence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    settling_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_disagreement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_output_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_output_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_state: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theorem_condition: Option<TheoremCondition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    audits: Option<PassivityReport>,
    files: Vec<String>,
}

struct Prepared {
    scenario: Scenario,
    sys: NetworkSystem,
    hash: String,
    analysis: GraphAnalysis,
}

fn prepare(path: &Path, opts: &RunOptions, mode: Option<CouplingMode>) -> Result<Prepared, CliError> {
    let mut scenario = Scenario::load(path)?;
    opts.apply(&mut scenario);
    if let Some(mode) = mode {
        scenario.mode = mode;
    }
    let sys = scenario.build()?;
    let analysis = graph_analysis(sys.graph())?;
    Ok(Prepared {
        hash: scenario.hash(),
        scenario,
        sys,
        analysis,
    })
}

fn run(p: &Prepared, seed: Option<u64>) -> Result<Trajectory, SimError> {
    let mut traj = netpassivity::simulate(&p.sys, &p.scenario.x0, &p.scenario.sim)?;
    traj.metadata.scenario_hash = Some(p.hash.clone());
    traj.metadata.seed = seed;
    Ok(traj)
}

fn summary_skeleton(p: &Prepared, seed: Option<u64>, status: &'static str) -> Summary {
    Summary {
        scenario_name: p.scenario.name.clone(),
        scenario_hash: p.hash.clone(),
        tool_version: TOOL_VERSION,
        seed,
        mode: p.sys.mode(),
        config: p.scenario.sim,
        status,
        graph_report: p.analysis.graph_report.clone(),
        spectral: p.analysis.clone(),
        divergence: None,
        settling_time: None,
        final_time: None,
        final_disagreement: None,
        final_output_norm: None,
        final_output_mean: None,
        final_state: None,
        theorem_condition: None,
        audits: None,
        files: Vec::new(),
    }
}

fn diverged(mut summary: Summary, err: SimError) -> Result<Summary, CliError> {
    match err {
        SimError::Diverged {
            last_finite_time,
            last_finite_state,
            cause,
        } => {
            summary.divergence = Some(Divergence {
                last_finite_time,
                last_finite_state,
                cause,
            });
            Ok(summary)
        }
        other => Err(CliError::Input(other.to_string())),
    }
}

/// Runs a scenario and writes the trajectory CSV, the JSON summary and,
/// when asked for, an SVG plot of the outputs.
pub fn simulate(path: &Path, opts: &RunOptions) -> Result<Outcome, CliError> {
    let p = prepare(path, opts, None)?;
    let name = p.scenario.name.clone();
    let summary_path = opts.out_path(p.scenario.outputs.summary_path.as_deref(), format!("{name}.summary.json"));

    let traj = match run(&p, opts.seed) {
        Ok(t) => t,
        Err(e) => {
            let mut summary = diverged(summary_skeleton(&p, opts.seed, "diverged"), e)?;
            summary.files.push(summary_path.display().to_string());
            write_file(&summary_path, &to_json(&summary))?;
            return Ok(Outcome::new(ExitStatus::Diverged, &summary, vec![summary_path]));
        }
    };

    let settling_time = traj.settling_time();
    let mut summary = summary_skeleton(&p, opts.seed, if settling_time.is_some() { "converged" } else { "not_converged" });
    let report = passivity_report(&p.sys, &traj);
    let y = &traj.final_signals.y;
    summary.settling_time = settling_time;
    summary.final_time = Some(traj.final_time);
    summary.final_disagreement = Some(traj.final_disagreement());
    summary.final_output_norm = Some(traj.final_output_norm());
    summary.final_output_mean = Some(y.iter().sum::<f64>() / y.len() as f64);
    summary.final_state = Some(traj.final_state.clone());
    summary.theorem_condition = Some(report.theorem_condition.clone());
    summary.audits = Some(report);

    let csv_path = opts.out_path(p.scenario.outputs.csv_path.as_deref(), format!("{name}.csv"));
    let mut files = vec![csv_path.clone(), summary_path.clone()];
    let svg_path = (opts.svg || p.scenario.outputs.svg_path.is_some())
        .then(|| opts.out_path(p.scenario.outputs.svg_path.as_deref(), format!("{name}.svg")));
    files.extend(svg_path.clone());
    summary.files = files.iter().map(|f| f.display().to_string()).collect();

    write_file(&csv_path, &trajectory_csv(&p.sys, &traj, &p.hash))?;
    if let Some(svg) = &svg_path {
        write_file(svg, &outputs_svg(&traj, &name, &p.hash))?;
    }
    write_file(&summary_path, &to_json(&summary))?;
    Ok(Outcome::new(ExitStatus::Success, &summary, files))
}

#[derive(Serialize)]
struct AuditReport {
    scenario_name: String,
    scenario_hash: String,
    tool_version: &'static str,
    mode: CouplingMode,
    config: SimConfig,
    graph_analysis: GraphAnalysis,
    #[serde(skip_serializing_if = "Option::is_none")]
    divergence: Option<Divergence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theorem_condition: Option<TheoremCondition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    audits: Option<PassivityReport>,
    /// Inequalities with a sample outside tolerance.
    violations: Vec<String>,
}

/// Simulates in decomposed mode and runs every dissipation audit.
pub fn audit(path: &Path, opts: &RunOptions) -> Result<Outcome, CliError> {
    let p = prepare(path, opts, Some(CouplingMode::DecomposedDirected))?;
    let mut report = AuditReport {
        scenario_name: p.scenario.name.clone(),
        scenario_hash: p.hash.clone(),
        tool_version: TOOL_VERSION,
        mode: CouplingMode::DecomposedDirected,
        config: p.scenario.sim,
        graph_analysis: p.analysis.clone(),
        divergence: None,
        theorem_condition: None,
        audits: None,
        violations: Vec::new(),
    };
    let status = match run(&p, opts.seed) {
        Err(SimError::Diverged {
            last_finite_time,
            last_finite_state,
            cause,
        }) => {
            report.divergence = Some(Divergence {
                last_finite_time,
                last_finite_state,
                cause,
            });
            ExitStatus::Diverged
        }
        Err(e) => return Err(CliError::Input(e.to_string())),
        Ok(traj) => {
            let r = passivity_report(&p.sys, &traj);
            report.violations = r.violations().iter().map(|m| m.inequality.clone()).collect();
            report.theorem_condition = Some(r.theorem_condition.clone());
            report.audits = Some(r);
            if report.violations.is_empty() {
                ExitStatus::Success
            } else {
                ExitStatus::AuditViolation
            }
        }
    };
    let mut files = Vec::new();
    if opts.out_dir.is_some() {
        let path = opts.out_path(None, format!("{}.audit.json", p.scenario.name));
        write_file(&path, &to_json(&report))?;
        files.push(path);
    }
    Ok(Outcome::new(status, &report, files))
}

#[derive(Serialize)]
struct SuiteOutput<'a> {
    tool_version: &'static str,
    #[serde(flatten)]
    report: &'a SuiteReport,
}

/// Randomized Proposition 1–3 suites. Any counterexample gives exit status 3.
pub fn prop_suite(seed: u64, count: usize, n_max: usize, out_dir: Option<&Path>) -> Result<Outcome, CliError> {
    let report = run_proposition_suite(seed, count, n_max).map_err(|e| CliError::Input(e.to_string()))?;
    let out = SuiteOutput {
        tool_version: TOOL_VERSION,
        report: &report,
    };
    let mut files = Vec::new();
    if let Some(dir) = out_dir {
        let path = dir.join(format!("prop_suite_seed{seed}.json"));
        write_file(&path, &to_json(&out))?;
        files.push(path);
    }
    let status = if report.all_passed() {
        ExitStatus::Success
    } else {
        ExitStatus::Counterexample
    };
    Ok(Outcome::new(status, &out, files))
}
