//! Fixed-step classical Runge–Kutta integration with signal recording.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::disagreement_norm;
use crate::network::{NetworkError, NetworkSystem, Signals};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub convergence_tol: f64,
    pub dwell_time: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 30.0,
            record_stride: 10,
            convergence_tol: 1e-3,
            dwell_time: 1.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |what: &str| Err(SimError::InvalidConfig(what.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive and finite");
        }
        if !(self.t_end.is_finite() && self.t_end > self.dt) {
            return bad("t_end must be finite and larger than dt");
        }
        if self.record_stride == 0 {
            return bad("record_stride must be at least 1");
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol.is_finite()) {
            return bad("convergence_tol must be positive and finite");
        }
        if !(self.dwell_time > 0.0 && self.dwell_time.is_finite()) {
            return bad("dwell_time must be positive and finite");
        }
        Ok(())
    }

    /// Number of steps; the integrated horizon is `n_steps() · dt`.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("initial state has length {got}, system needs {expected}")]
    InitialState { expected: usize, got: usize },
    #[error("initial state contains non-finite entries")]
    NonFiniteInitialState,
    #[error("state diverged after t = {last_finite_time}: {cause}")]
    Diverged {
        last_finite_time: f64,
        last_finite_state: Vec<f64>,
        cause: String,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub scenario_hash: Option<String>,
    pub seed: Option<u64>,
}

/// Signals recorded every `record_stride` steps, starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub signals: Vec<Signals>,
    /// `‖proj_{S⊥}(y)‖` per sample.
    pub disagreement: Vec<f64>,
    pub final_time: f64,
    pub final_state: Vec<f64>,
    pub final_signals: Signals,
    pub config: SimConfig,
    pub metadata: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_disagreement(&self) -> f64 {
        disagreement_norm(&self.final_signals.y)
    }

    pub fn final_output_norm(&self) -> f64 {
        self.final_signals.y.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest disagreement norm over samples with `t ≥ from`.
    pub fn max_disagreement_after(&self, from: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.disagreement)
            .filter(|(t, _)| **t >= from)
            .fold(0.0, |acc, (_, d)| acc.max(*d))
    }

    pub fn settling_time(&self) -> Option<f64> {
        detect_convergence(self, self.config.convergence_tol, self.config.dwell_time)
    }
}

fn axpy(out: &mut [f64], x: &[f64], a: f64, k: &[f64]) {
    for ((o, xi), ki) in out.iter_mut().zip(x).zip(k) {
        *o = xi + a * ki;
    }
}

/// Integrates `sys` from `x0` with classical fourth-order Runge–Kutta.
///
/// ```
/// use netpassivity::graph::Digraph;
/// use netpassivity::network::{CouplingMode, NetworkSystem};
/// use netpassivity::simulate::{simulate, SimConfig};
/// use netpassivity::systems::AgentModel;
///
/// let g = Digraph::new(1, &[]).unwrap();
/// let sys = NetworkSystem::assemble(g, vec![AgentModel::leaky_tanh(2.0).unwrap()], vec![], CouplingMode::DirectedOut).unwrap();
/// let cfg = SimConfig { t_end: 1.0, ..SimConfig::default() };
/// let traj = simulate(&sys, &[1.0], &cfg).unwrap();
/// assert!((traj.final_state[0] - (-2.0f64).exp()).abs() < 1e-6);
/// ```
pub fn simulate(sys: &NetworkSystem, x0: &[f64], cfg: &SimConfig) -> Result<Trajectory, SimError> {
    cfg.validate()?;
    let n = sys.state_dim();
    if x0.len() != n {
        return Err(SimError::InitialState {
            expected: n,
            got: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(SimError::NonFiniteInitialState);
    }

    let dt = cfg.dt;
    let n_steps = cfg.n_steps();
    let capacity = n_steps / cfg.record_stride + 1;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    let mut signals = Vec::with_capacity(capacity);
    let mut disagreement = Vec::with_capacity(capacity);

    let mut ws = sys.workspace();
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);

    let diverged = |t: f64, x: &[f64], cause: String| SimError::Diverged {
        last_finite_time: t,
        last_finite_state: x.to_vec(),
        cause,
    };

    for step in 0..=n_steps {
        let t = step as f64 * dt;
        if step % cfg.record_stride == 0 {
            let s = sys.signal_map(&x).map_err(|e| diverged(t, &x, e.to_string()))?;
            times.push(t);
            disagreement.push(disagreement_norm(&s.y));
            states.push(x.clone());
            signals.push(s);
        }
        if step == n_steps {
            break;
        }
        let mut stage = |input: &[f64], out: &mut [f64]| {
            sys.vector_field_with(input, out, &mut ws)
                .map_err(|e| diverged(t, &x, e.to_string()))
        };
        stage(&x, &mut k1)?;
        axpy(&mut tmp, &x, 0.5 * dt, &k1);
        stage(&tmp, &mut k2)?;
        axpy(&mut tmp, &x, 0.5 * dt, &k2);
        stage(&tmp, &mut k3)?;
        axpy(&mut tmp, &x, dt, &k3);
        stage(&tmp, &mut k4)?;
        for i in 0..n {
            tmp[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if tmp.iter().any(|v| !v.is_finite()) {
            return Err(diverged(t, &x, "non-finite state after step".into()));
        }
        std::mem::swap(&mut x, &mut tmp);
    }

    let final_time = n_steps as f64 * dt;
    let final_signals = sys.signal_map(&x).map_err(|e| diverged(final_time, &x, e.to_string()))?;
    Ok(Trajectory {
        times,
        states,
        signals,
        disagreement,
        final_time,
        final_state: x,
        final_signals,
        config: *cfg,
        metadata: TrajectoryMeta::default(),
    })
}

/// Earliest sample time `t*` with disagreement `≤ tol` on all samples in
/// `[t*, t* + dwell]`. The window must lie inside the recorded horizon.
pub fn detect_convergence(traj: &Trajectory, tol: f64, dwell: f64) -> Option<f64> {
    let slack = 1e-9 * traj.config.dt;
    let mut run_start: Option<f64> = None;
    for (&t, &d) in traj.times.iter().zip(&traj.disagreement) {
        if d <= tol {
            let start = *run_start.get_or_insert(t);
            if t - start >= dwell - slack {
                return Some(start);
            }
        } else {
            run_start = None;
        }
    }
    None
}
