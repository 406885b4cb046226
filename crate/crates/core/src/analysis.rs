//! Projections onto the agreement space, passivity-index estimation and
//! dissipation-inequality audits along simulated trajectories.
//!
//! Output agreement means `proj_{S⊥}(y) → 0` where `S = span(𝟙)`. The audits
//! evaluate, sample by sample, three pointwise inequalities for a network over
//! a balanced digraph, with `p = proj_{S⊥}(y)`:
//!
//! | audit | inequality |
//! |-------|------------|
//! | agents | `uᵀp ≥ ΣQ̇ᵢ − ‖u‖‖y‖ + ε‖p‖²` |
//! | controllers | `zᵀp ≥ ΣẆₖ + α‖μ‖²`, `z = Eμ` |
//! | decomposed loop | `wᵀp ≥ ΣẆₖ + ε‖p‖²`, `w = B_iμ` |
//!
//! Each sample yields `margin = lhs − rhs` and a scale equal to the sum of
//! the absolute values of every term. A sample passes when
//! `margin ≥ −AUDIT_RTOL · scale`.
//!
//! The first two inequalities follow from summing the agents' (controllers')
//! own dissipation inequalities. The third is a consequence of the first two
//! only under extra conditions; its audit is how a trajectory is checked
//! against it.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{has_globally_reachable_node, is_balanced, Digraph};
use crate::network::{CouplingMode, NetworkSystem};
use crate::simulate::Trajectory;
use crate::systems::{AgentModel, ControllerModel};

/// Relative tolerance of every pointwise audit.
pub const AUDIT_RTOL: f64 = 1e-8;
/// Relative floor on `|output|` when estimating an index: `1e-6 · max |output|`.
pub const DEFAULT_Y_FLOOR_RTOL: f64 = 1e-6;
/// Step of the finite-difference cross-check of storage rates.
pub const FD_STEP: f64 = 1e-3;
/// Largest accepted relative gap between analytic and finite-difference storage rates.
pub const FD_RTOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("{block} has no storage function")]
    MissingStorage { block: String },
    #[error("the digraph is not balanced, so Eᵀy ≠ Eᵀ proj_S⊥(y) in general")]
    Unbalanced,
    #[error("w is only recorded in decomposed_directed mode, trajectory is {0:?}")]
    UnsupportedMode(CouplingMode),
    #[error("trajectory does not match the system: {0}")]
    Mismatch(String),
}

/// Orthogonal projections onto `S = span(𝟙)` and `S⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Projections {
    pub n: usize,
}

impl Projections {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    /// `P_S = (1/n) 𝟙𝟙ᵀ`.
    pub fn p_s(&self) -> DMatrix<f64> {
        DMatrix::from_element(self.n, self.n, 1.0 / self.n as f64)
    }

    /// `P_S⊥ = I − (1/n) 𝟙𝟙ᵀ`.
    pub fn p_s_perp(&self) -> DMatrix<f64> {
        DMatrix::identity(self.n, self.n) - self.p_s()
    }
}

fn mean(y: &[f64]) -> f64 {
    y.iter().sum::<f64>() / y.len() as f64
}

/// `(I − (1/n)𝟙𝟙ᵀ) y`.
///
/// ```
/// use netpassivity::analysis::project_disagreement;
///
/// assert_eq!(project_disagreement(&[2.0, 0.0, 1.0]), vec![1.0, -1.0, 0.0]);
/// ```
pub fn project_disagreement(y: &[f64]) -> Vec<f64> {
    if y.is_empty() {
        return Vec::new();
    }
    let m = mean(y);
    y.iter().map(|v| v - m).collect()
}

/// `(1/n)𝟙𝟙ᵀ y`.
pub fn project_agreement(y: &[f64]) -> Vec<f64> {
    if y.is_empty() {
        return Vec::new();
    }
    vec![mean(y); y.len()]
}

/// `‖proj_{S⊥}(y)‖`.
pub fn disagreement_norm(y: &[f64]) -> f64 {
    norm(&project_disagreement(y))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Trapezoid rule over the first `len` samples.
fn trapezoid(times: &[f64], values: &[f64], len: usize) -> f64 {
    (1..len)
        .map(|j| 0.5 * (times[j] - times[j - 1]) * (values[j] + values[j - 1]))
        .sum()
}

/// A block whose passivity index can be estimated.
#[derive(Debug, Clone, Copy)]
pub enum Block<'a> {
    Agent(&'a AgentModel),
    Controller(&'a ControllerModel),
}

impl Block<'_> {
    fn storage_rate(&self, state: &[f64], input: f64) -> Option<f64> {
        match self {
            Block::Agent(a) => a.storage_rate(state, input),
            Block::Controller(c) => c.storage_rate(state, input),
        }
    }

    fn storage_rate_fd(&self, state: &[f64], input: f64) -> Option<f64> {
        match self {
            Block::Agent(a) => a.storage_rate_fd(state, input, FD_STEP),
            Block::Controller(c) => c.storage_rate_fd(state, input, FD_STEP),
        }
    }

    fn name(&self) -> &str {
        match self {
            Block::Agent(a) => a.name(),
            Block::Controller(c) => c.name(),
        }
    }
}

/// One recorded `(state, input, output)` triple of a block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSample<'a> {
    pub state: &'a [f64],
    pub input: f64,
    pub output: f64,
}

/// Samples of agent `i` (0-based) along `traj`.
pub fn agent_samples<'a>(sys: &NetworkSystem, traj: &'a Trajectory, i: usize) -> Vec<BlockSample<'a>> {
    traj.states
        .iter()
        .zip(&traj.signals)
        .map(|(x, s)| BlockSample {
            state: sys.agent_state(x, i),
            input: s.u[i],
            output: s.y[i],
        })
        .collect()
}

/// Samples of controller `k` (0-based) along `traj`.
pub fn controller_samples<'a>(sys: &NetworkSystem, traj: &'a Trajectory, k: usize) -> Vec<BlockSample<'a>> {
    traj.states
        .iter()
        .zip(&traj.signals)
        .map(|(x, s)| BlockSample {
            state: sys.controller_state(x, k),
            input: s.zeta[k],
            output: s.mu[k],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexEstimate {
    /// `inf (input·output − V̇) / output²` over samples with `|output| ≥ y_floor`.
    pub estimate: Option<f64>,
    pub samples_used: usize,
    pub y_floor: f64,
    /// Largest relative gap between the chain-rule `V̇` and a central difference.
    pub fd_max_rel_error: f64,
    pub fd_consistent: bool,
    pub diagnostic: Option<String>,
}

/// Empirical output-strict passivity index of a block along recorded samples.
///
/// `y_floor` defaults to `DEFAULT_Y_FLOOR_RTOL · max |output|`.
pub fn estimate_op_index(
    block: Block<'_>,
    samples: &[BlockSample<'_>],
    y_floor: Option<f64>,
) -> Result<IndexEstimate, AnalysisError> {
    let max_out = samples.iter().fold(0.0_f64, |acc, s| acc.max(s.output.abs()));
    let y_floor = y_floor.unwrap_or(DEFAULT_Y_FLOOR_RTOL * max_out);
    let mut estimate: Option<f64> = None;
    let mut used = 0;
    let mut fd_max_rel_error = 0.0_f64;
    for s in samples {
        let rate = block
            .storage_rate(s.state, s.input)
            .ok_or_else(|| AnalysisError::MissingStorage {
                block: block.name().to_string(),
            })?;
        let fd = block.storage_rate_fd(s.state, s.input).unwrap_or(rate);
        let denom = rate.abs().max(fd.abs()).max(1e-9);
        fd_max_rel_error = fd_max_rel_error.max((rate - fd).abs() / denom);

        if s.output.abs() >= y_floor && s.output != 0.0 {
            used += 1;
            let ratio = (s.input * s.output - rate) / (s.output * s.output);
            estimate = Some(estimate.map_or(ratio, |e: f64| e.min(ratio)));
        }
    }
    let diagnostic = estimate.is_none().then(|| {
        format!(
            "no sample of {} has |output| ≥ {y_floor:e} (max |output| = {max_out:e})",
            block.name()
        )
    });
    Ok(IndexEstimate {
        estimate,
        samples_used: used,
        y_floor,
        fd_max_rel_error,
        fd_consistent: fd_max_rel_error <= FD_RTOL,
        diagnostic,
    })
}

/// Value of an integral relation at one horizon, both sides by trapezoid rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralCheck {
    pub tau: f64,
    pub lhs: f64,
    /// Right-hand side of the integrated pointwise inequality, with storage
    /// at the start of the run in place of the infinite-past limit.
    pub rhs: f64,
    pub slack: f64,
    /// Agents only: the bound in terms of `‖μ‖` with the initial storage kept explicit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs_mu_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack_mu_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginRecord {
    pub inequality: String,
    /// The `ε` or `α` plugged into the inequality.
    pub index: f64,
    pub samples: usize,
    pub min_margin: f64,
    pub min_margin_time: f64,
    /// `min(margin / scale)` over samples with non-zero scale.
    pub min_normalized_margin: f64,
    pub rtol: f64,
    pub passed: bool,
    pub integrals: Vec<IntegralCheck>,
}

struct MarginAccumulator {
    min_margin: f64,
    min_margin_time: f64,
    min_normalized: f64,
    passed: bool,
}

impl MarginAccumulator {
    fn new() -> Self {
        Self {
            min_margin: f64::INFINITY,
            min_margin_time: 0.0,
            min_normalized: f64::INFINITY,
            passed: true,
        }
    }

    fn push(&mut self, t: f64, lhs: f64, rhs_terms: &[f64]) {
        let margin = lhs - rhs_terms.iter().sum::<f64>();
        let scale = lhs.abs() + rhs_terms.iter().map(|v| v.abs()).sum::<f64>();
        if margin < self.min_margin {
            self.min_margin = margin;
            self.min_margin_time = t;
        }
        if scale > 0.0 {
            self.min_normalized = self.min_normalized.min(margin / scale);
        }
        if !(margin >= -AUDIT_RTOL * scale) {
            self.passed = false;
        }
    }

    fn finish(self, inequality: &str, index: f64, samples: usize, integrals: Vec<IntegralCheck>) -> MarginRecord {
        MarginRecord {
            inequality: inequality.to_string(),
            index,
            samples,
            min_margin: if samples == 0 { 0.0 } else { self.min_margin },
            min_margin_time: self.min_margin_time,
            min_normalized_margin: if self.min_normalized.is_finite() { self.min_normalized } else { 0.0 },
            rtol: AUDIT_RTOL,
            passed: self.passed,
            integrals,
        }
    }
}

/// Sample counts covering `[0, τ]` for `τ ∈ {T/4, T/2, T}`.
fn horizons(times: &[f64]) -> Vec<usize> {
    let Some(&t_last) = times.last() else {
        return Vec::new();
    };
    [0.25, 0.5, 1.0]
        .iter()
        .map(|frac| {
            let tau = frac * t_last;
            times.partition_point(|&t| t <= tau + 1e-12 * t_last.max(1.0))
        })
        .collect()
}

fn check_shape(sys: &NetworkSystem, traj: &Trajectory) -> Result<(), AnalysisError> {
    if let Some(s) = traj.signals.first() {
        if s.y.len() != sys.n_agents() || s.mu.len() != sys.n_controllers() {
            return Err(AnalysisError::Mismatch(format!(
                "{} outputs and {} controller outputs recorded, system has {} agents and {} controllers",
                s.y.len(),
                s.mu.len(),
                sys.n_agents(),
                sys.n_controllers()
            )));
        }
    }
    if let Some(x) = traj.states.first() {
        if x.len() != sys.state_dim() {
            return Err(AnalysisError::Mismatch(format!(
                "state length {} vs {}",
                x.len(),
                sys.state_dim()
            )));
        }
    }
    Ok(())
}

fn require_agent_storage(sys: &NetworkSystem) -> Result<(), AnalysisError> {
    match sys.agents().iter().position(|a| a.storage().is_none()) {
        Some(i) => Err(AnalysisError::MissingStorage {
            block: format!("agent {} ({})", i + 1, sys.agents()[i].name()),
        }),
        None => Ok(()),
    }
}

fn require_controller_storage(sys: &NetworkSystem) -> Result<(), AnalysisError> {
    match sys.controllers().iter().position(|c| c.storage().is_none()) {
        Some(k) => Err(AnalysisError::MissingStorage {
            block: format!("controller {} ({})", k + 1, sys.controllers()[k].name()),
        }),
        None => Ok(()),
    }
}

fn require_balanced(sys: &NetworkSystem) -> Result<(), AnalysisError> {
    if is_balanced(sys.incidence()) {
        Ok(())
    } else {
        Err(AnalysisError::Unbalanced)
    }
}

fn total_agent_storage(sys: &NetworkSystem, x: &[f64]) -> f64 {
    (0..sys.n_agents())
        .map(|i| sys.agents()[i].storage_value(sys.agent_state(x, i)).unwrap_or(0.0))
        .sum()
}

fn total_controller_storage(sys: &NetworkSystem, x: &[f64]) -> f64 {
    (0..sys.n_controllers())
        .map(|k| sys.controllers()[k].storage_value(sys.controller_state(x, k)).unwrap_or(0.0))
        .sum()
}

fn total_agent_rate(sys: &NetworkSystem, x: &[f64], u: &[f64]) -> f64 {
    (0..sys.n_agents())
        .map(|i| sys.agents()[i].storage_rate(sys.agent_state(x, i), u[i]).unwrap_or(0.0))
        .sum()
}

fn total_controller_rate(sys: &NetworkSystem, x: &[f64], zeta: &[f64]) -> f64 {
    (0..sys.n_controllers())
        .map(|k| {
            sys.controllers()[k]
                .storage_rate(sys.controller_state(x, k), zeta[k])
                .unwrap_or(0.0)
        })
        .sum()
}

/// `z = E μ`.
fn incidence_times(sys: &NetworkSystem, mu: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; sys.n_agents()];
    for (k, e) in sys.graph().edges().iter().enumerate() {
        z[e.source] += mu[k];
        z[e.target] -= mu[k];
    }
    z
}

/// Audits `uᵀp ≥ ΣQ̇ᵢ − ‖u‖‖y‖ + ε‖p‖²` and its integral over `[0, τ]`.
pub fn audit_agent_inequality(
    sys: &NetworkSystem,
    traj: &Trajectory,
    epsilon: f64,
) -> Result<MarginRecord, AnalysisError> {
    check_shape(sys, traj)?;
    require_agent_storage(sys)?;
    require_balanced(sys)?;

    let len = traj.len();
    let mut acc = MarginAccumulator::new();
    let (mut up, mut uy, mut pp, mut mumu) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    for (j, (x, s)) in traj.states.iter().zip(&traj.signals).enumerate() {
        let p = project_disagreement(&s.y);
        up[j] = dot(&s.u, &p);
        uy[j] = norm(&s.u) * norm(&s.y);
        pp[j] = dot(&p, &p);
        mumu[j] = dot(&s.mu, &s.mu);
        let rate = total_agent_rate(sys, x, &s.u);
        acc.push(traj.times[j], up[j], &[rate, -uy[j], epsilon * pp[j]]);
    }

    let max_do = sys.incidence().max_out_degree() as f64;
    let q0 = traj.states.first().map_or(0.0, |x| total_agent_storage(sys, x));
    let integrals = horizons(&traj.times)
        .into_iter()
        .filter(|&k| k > 0)
        .map(|k| {
            let lhs = trapezoid(&traj.times, &up, k);
            let qt = total_agent_storage(sys, &traj.states[k - 1]);
            let int_pp = trapezoid(&traj.times, &pp, k);
            let rhs = qt - q0 - trapezoid(&traj.times, &uy, k) + epsilon * int_pp;
            let (rhs_mu_bound, slack_mu_bound) = if epsilon > 0.0 {
                let u_sq = max_do * trapezoid(&traj.times, &mumu, k);
                let cross = u_sq.sqrt() * (u_sq / (epsilon * epsilon) + 2.0 * q0 / epsilon).sqrt();
                let bound = -q0 - cross + epsilon * int_pp;
                (Some(bound), Some(lhs - bound))
            } else {
                (None, None)
            };
            IntegralCheck {
                tau: traj.times[k - 1],
                lhs,
                rhs,
                slack: lhs - rhs,
                rhs_mu_bound,
                slack_mu_bound,
            }
        })
        .collect();
    Ok(acc.finish("u'p >= sum dQ - |u||y| + eps |p|^2", epsilon, len, integrals))
}

/// Audits `zᵀp ≥ ΣẆₖ + α‖μ‖²` with `z = Eμ`, and its integral over `[0, τ]`.
pub fn audit_controller_inequality(
    sys: &NetworkSystem,
    traj: &Trajectory,
    alpha: f64,
) -> Result<MarginRecord, AnalysisError> {
    check_shape(sys, traj)?;
    require_controller_storage(sys)?;
    require_balanced(sys)?;

    let len = traj.len();
    let mut acc = MarginAccumulator::new();
    let (mut zp, mut mumu) = (vec![0.0; len], vec![0.0; len]);
    for (j, (x, s)) in traj.states.iter().zip(&traj.signals).enumerate() {
        let p = project_disagreement(&s.y);
        let z = incidence_times(sys, &s.mu);
        zp[j] = dot(&z, &p);
        mumu[j] = dot(&s.mu, &s.mu);
        let rate = total_controller_rate(sys, x, &s.zeta);
        acc.push(traj.times[j], zp[j], &[rate, alpha * mumu[j]]);
    }
    let w0 = traj.states.first().map_or(0.0, |x| total_controller_storage(sys, x));
    let integrals = horizons(&traj.times)
        .into_iter()
        .filter(|&k| k > 0)
        .map(|k| {
            let lhs = trapezoid(&traj.times, &zp, k);
            let wt = total_controller_storage(sys, &traj.states[k - 1]);
            let rhs = wt - w0 + alpha * trapezoid(&traj.times, &mumu, k);
            IntegralCheck {
                tau: traj.times[k - 1],
                lhs,
                rhs,
                slack: lhs - rhs,
                rhs_mu_bound: None,
                slack_mu_bound: None,
            }
        })
        .collect();
    Ok(acc.finish("z'p >= sum dW + alpha |mu|^2", alpha, len, integrals))
}

/// Audits `wᵀp ≥ ΣẆₖ + ε‖p‖²` on a decomposed-mode trajectory.
pub fn audit_theorem_dissipation(
    sys: &NetworkSystem,
    traj: &Trajectory,
    epsilon: f64,
) -> Result<MarginRecord, AnalysisError> {
    check_shape(sys, traj)?;
    if traj.signals.iter().any(|s| s.w.is_none()) {
        return Err(AnalysisError::UnsupportedMode(sys.mode()));
    }
    require_controller_storage(sys)?;
    require_balanced(sys)?;

    let len = traj.len();
    let mut acc = MarginAccumulator::new();
    let (mut wp, mut pp) = (vec![0.0; len], vec![0.0; len]);
    for (j, (x, s)) in traj.states.iter().zip(&traj.signals).enumerate() {
        let p = project_disagreement(&s.y);
        let w = s.w.as_deref().unwrap_or_default();
        wp[j] = dot(w, &p);
        pp[j] = dot(&p, &p);
        let rate = total_controller_rate(sys, x, &s.zeta);
        acc.push(traj.times[j], wp[j], &[rate, epsilon * pp[j]]);
    }
    let w0 = traj.states.first().map_or(0.0, |x| total_controller_storage(sys, x));
    let integrals = horizons(&traj.times)
        .into_iter()
        .filter(|&k| k > 0)
        .map(|k| {
            let lhs = trapezoid(&traj.times, &wp, k);
            let wt = total_controller_storage(sys, &traj.states[k - 1]);
            let rhs = wt - w0 + epsilon * trapezoid(&traj.times, &pp, k);
            IntegralCheck {
                tau: traj.times[k - 1],
                lhs,
                rhs,
                slack: lhs - rhs,
                rhs_mu_bound: None,
                slack_mu_bound: None,
            }
        })
        .collect();
    Ok(acc.finish("w'p >= sum dW + eps |p|^2", epsilon, len, integrals))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCondition {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub epsilon_min: f64,
    pub alpha_min: f64,
    pub max_out_degree: usize,
    /// `max(D_o) / ε`.
    pub threshold: f64,
    /// `α ≥ threshold`, and only when applicable.
    pub satisfied: bool,
}

/// Stabilization condition `α ≥ max(D_o)/ε` for a balanced digraph with a
/// globally reachable node.
///
/// ```
/// use netpassivity::analysis::check_theorem_condition;
/// use netpassivity::graph::case_study_graph;
///
/// let eps = [1.66, 3.22, 4.62, 1.5, 2.56];
/// let c = check_theorem_condition(&eps, &[4.0 / 3.0; 7], &case_study_graph());
/// assert_eq!(c.threshold, 4.0 / 3.0);
/// assert!(c.satisfied);
/// ```
pub fn check_theorem_condition(epsilons: &[f64], alphas: &[f64], g: &Digraph) -> TheoremCondition {
    let fmin = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let epsilon_min = fmin(epsilons);
    let alpha_min = fmin(alphas);
    let max_out_degree = g.out_degrees().into_iter().max().unwrap_or(0);
    let threshold = max_out_degree as f64 / epsilon_min;

    let balanced = g.is_degree_balanced();
    let reason = if epsilons.len() != g.n_vertices() || alphas.len() != g.n_edges() {
        Some(format!(
            "need one index per agent ({}) and per controller ({}), got {} and {}",
            g.n_vertices(),
            g.n_edges(),
            epsilons.len(),
            alphas.len()
        ))
    } else if alphas.is_empty() {
        Some("the digraph has no edges".to_string())
    } else if !epsilons.iter().chain(alphas).all(|v| *v > 0.0 && v.is_finite()) {
        Some("every passivity index must be positive".to_string())
    } else if !balanced {
        Some("the digraph is not balanced".to_string())
    } else if !has_globally_reachable_node(g) {
        Some("the digraph has no globally reachable node".to_string())
    } else {
        None
    };
    let applicable = reason.is_none();
    TheoremCondition {
        applicable,
        reason,
        epsilon_min,
        alpha_min,
        max_out_degree,
        threshold,
        satisfied: applicable && alpha_min >= threshold,
    }
}

/// Declared and estimated index of one block; `used` prefers the declared value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockIndex {
    pub block: String,
    pub declared: Option<f64>,
    pub estimate: IndexEstimate,
    pub used: Option<f64>,
    /// Coupling gain of built-in gain controllers, the value some authors quote as the index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AuditOutcome {
    Completed(MarginRecord),
    Unsupported { reason: String },
}

impl AuditOutcome {
    fn from_result(r: Result<MarginRecord, AnalysisError>) -> Self {
        match r {
            Ok(m) => AuditOutcome::Completed(m),
            Err(e) => AuditOutcome::Unsupported { reason: e.to_string() },
        }
    }

    pub fn record(&self) -> Option<&MarginRecord> {
        match self {
            AuditOutcome::Completed(m) => Some(m),
            AuditOutcome::Unsupported { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassivityReport {
    pub agents: Vec<BlockIndex>,
    pub controllers: Vec<BlockIndex>,
    pub agent_audit: AuditOutcome,
    pub controller_audit: AuditOutcome,
    pub theorem_audit: AuditOutcome,
    /// Uses the declared index of each block when present, otherwise the estimate.
    pub theorem_condition: TheoremCondition,
    /// Same check with each gain controller's index taken to be its gain `b`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem_condition_gain_as_index: Option<TheoremCondition>,
}

impl PassivityReport {
    /// Audits that ran and found a sample outside tolerance.
    pub fn violations(&self) -> Vec<&MarginRecord> {
        [&self.agent_audit, &self.controller_audit, &self.theorem_audit]
            .into_iter()
            .filter_map(AuditOutcome::record)
            .filter(|m| !m.passed)
            .collect()
    }
}

fn block_index(block: Block<'_>, label: String, declared: Option<f64>, gain: Option<f64>, samples: &[BlockSample<'_>]) -> BlockIndex {
    let estimate = estimate_op_index(block, samples, None).unwrap_or_else(|e| IndexEstimate {
        estimate: None,
        samples_used: 0,
        y_floor: 0.0,
        fd_max_rel_error: 0.0,
        fd_consistent: false,
        diagnostic: Some(e.to_string()),
    });
    BlockIndex {
        block: label,
        declared,
        used: declared.or(estimate.estimate),
        estimate,
        gain,
    }
}

/// Index estimates, the three audits and the stabilization condition for one run.
///
/// The theorem audit needs `w`, so `traj` should come from a
/// [`CouplingMode::DecomposedDirected`] run; otherwise it is reported unsupported.
pub fn passivity_report(sys: &NetworkSystem, traj: &Trajectory) -> PassivityReport {
    let agents: Vec<BlockIndex> = sys
        .agents()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            block_index(
                Block::Agent(a),
                format!("agent {} ({})", i + 1, a.name()),
                a.declared_op_index(),
                None,
                &agent_samples(sys, traj, i),
            )
        })
        .collect();
    let controllers: Vec<BlockIndex> = sys
        .controllers()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            block_index(
                Block::Controller(c),
                format!("controller {} ({})", k + 1, c.name()),
                c.declared_op_index(),
                c.gain(),
                &controller_samples(sys, traj, k),
            )
        })
        .collect();

    let used = |v: &[BlockIndex]| -> Vec<f64> { v.iter().map(|b| b.used.unwrap_or(f64::NAN)).collect() };
    let epsilons = used(&agents);
    let alphas = used(&controllers);
    let fmin = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let eps = fmin(&epsilons);
    let alpha = fmin(&alphas);

    let audit_index = |v: f64, what: &str| -> Result<f64, AnalysisError> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(AnalysisError::Mismatch(format!("no usable {what} index")))
        }
    };

    let agent_audit = AuditOutcome::from_result(
        audit_index(eps, "agent").and_then(|e| audit_agent_inequality(sys, traj, e)),
    );
    let controller_audit = AuditOutcome::from_result(
        audit_index(alpha, "controller").and_then(|a| audit_controller_inequality(sys, traj, a)),
    );
    let theorem_audit = AuditOutcome::from_result(
        audit_index(eps, "agent").and_then(|e| audit_theorem_dissipation(sys, traj, e)),
    );

    let theorem_condition = check_theorem_condition(&epsilons, &alphas, sys.graph());
    let theorem_condition_gain_as_index = controllers
        .iter()
        .map(|c| c.gain)
        .collect::<Option<Vec<f64>>>()
        .filter(|g| !g.is_empty())
        .map(|gains| check_theorem_condition(&epsilons, &gains, sys.graph()));

    PassivityReport {
        agents,
        controllers,
        agent_audit,
        controller_audit,
        theorem_audit,
        theorem_condition,
        theorem_condition_gain_as_index,
    }
}
