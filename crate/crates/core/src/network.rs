//! Closed-loop interconnection of agents and edge controllers.
//!
//! Every mode uses `ζ = Eᵀ y`. The agent input is `u = −E μ` for
//! [`CouplingMode::Undirected`] (diffusive coupling) and `u = −B_o μ` for the
//! two directed modes. [`CouplingMode::DecomposedDirected`] runs the same
//! dynamics as [`CouplingMode::DirectedOut`] but also records the split
//! `u = w − z` with `w = B_i μ` and `z = E μ`.
//!
//! The combined state stacks agent states in vertex order, then controller
//! states in edge order. The exogenous input is always zero.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{build_incidence, Digraph, IncidenceSet};
use crate::systems::{AgentModel, ControllerModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    Undirected,
    DirectedOut,
    DecomposedDirected,
}

impl CouplingMode {
    pub fn is_directed(self) -> bool {
        !matches!(self, CouplingMode::Undirected)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("expected one agent per vertex ({expected}), got {got}")]
    AgentCount { expected: usize, got: usize },
    #[error("expected one controller per edge ({expected}), got {got}")]
    ControllerCount { expected: usize, got: usize },
    #[error("combined state has length {got}, layout needs {expected}")]
    StateDimension { expected: usize, got: usize },
    #[error("non-finite value in {block}")]
    NonFinite { block: String },
}

/// Interconnection signals at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Signals {
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub zeta: Vec<f64>,
    pub mu: Vec<f64>,
    /// `B_i μ`, only in decomposed mode.
    pub w: Option<Vec<f64>>,
    /// `E μ`, only in decomposed mode.
    pub z: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct NetworkSystem {
    graph: Digraph,
    incidence: IncidenceSet,
    agents: Vec<AgentModel>,
    controllers: Vec<ControllerModel>,
    mode: CouplingMode,
    agent_offsets: Vec<usize>,
    controller_offsets: Vec<usize>,
    state_dim: usize,
}

/// Scratch buffers for allocation-free vector field evaluation.
#[derive(Debug, Clone)]
pub struct Workspace {
    y: Vec<f64>,
    zeta: Vec<f64>,
    mu: Vec<f64>,
    u: Vec<f64>,
}

fn finite(v: f64, block: impl FnOnce() -> String) -> Result<f64, NetworkError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NetworkError::NonFinite { block: block() })
    }
}

impl NetworkSystem {
    pub fn assemble(
        graph: Digraph,
        agents: Vec<AgentModel>,
        controllers: Vec<ControllerModel>,
        mode: CouplingMode,
    ) -> Result<Self, NetworkError> {
        if agents.len() != graph.n_vertices() {
            return Err(NetworkError::AgentCount {
                expected: graph.n_vertices(),
                got: agents.len(),
            });
        }
        if controllers.len() != graph.n_edges() {
            return Err(NetworkError::ControllerCount {
                expected: graph.n_edges(),
                got: controllers.len(),
            });
        }
        let mut offset = 0;
        let mut agent_offsets = Vec::with_capacity(agents.len() + 1);
        for a in &agents {
            agent_offsets.push(offset);
            offset += a.state_dim();
        }
        agent_offsets.push(offset);
        let mut controller_offsets = Vec::with_capacity(controllers.len() + 1);
        for c in &controllers {
            controller_offsets.push(offset);
            offset += c.state_dim();
        }
        controller_offsets.push(offset);
        let incidence = build_incidence(&graph);
        Ok(Self {
            graph,
            incidence,
            agents,
            controllers,
            mode,
            agent_offsets,
            controller_offsets,
            state_dim: offset,
        })
    }

    /// Same agents, controllers and graph under a different coupling mode.
    pub fn with_mode(&self, mode: CouplingMode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn incidence(&self) -> &IncidenceSet {
        &self.incidence
    }

    pub fn agents(&self) -> &[AgentModel] {
        &self.agents
    }

    pub fn controllers(&self) -> &[ControllerModel] {
        &self.controllers
    }

    pub fn mode(&self) -> CouplingMode {
        self.mode
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn n_controllers(&self) -> usize {
        self.controllers.len()
    }

    /// Length of the combined state.
    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn agent_state<'a>(&self, state: &'a [f64], i: usize) -> &'a [f64] {
        &state[self.agent_offsets[i]..self.agent_offsets[i + 1]]
    }

    pub fn controller_state<'a>(&self, state: &'a [f64], k: usize) -> &'a [f64] {
        &state[self.controller_offsets[k]..self.controller_offsets[k + 1]]
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            y: vec![0.0; self.n_agents()],
            zeta: vec![0.0; self.n_controllers()],
            mu: vec![0.0; self.n_controllers()],
            u: vec![0.0; self.n_agents()],
        }
    }

    fn check_dim(&self, state: &[f64]) -> Result<(), NetworkError> {
        if state.len() == self.state_dim {
            Ok(())
        } else {
            Err(NetworkError::StateDimension {
                expected: self.state_dim,
                got: state.len(),
            })
        }
    }

    /// Evaluates `y → ζ → μ → u` into the workspace.
    fn evaluate(&self, state: &[f64], ws: &mut Workspace) -> Result<(), NetworkError> {
        for (i, agent) in self.agents.iter().enumerate() {
            ws.y[i] = finite(agent.h(self.agent_state(state, i)), || {
                format!("output of agent {} ({})", i + 1, agent.name())
            })?;
        }
        let edges = self.graph.edges();
        for (k, e) in edges.iter().enumerate() {
            ws.zeta[k] = ws.y[e.source] - ws.y[e.target];
        }
        for (k, c) in self.controllers.iter().enumerate() {
            ws.mu[k] = finite(c.psi(self.controller_state(state, k), ws.zeta[k]), || {
                format!("output of controller {} ({})", k + 1, c.name())
            })?;
        }
        ws.u.fill(0.0);
        for (k, e) in edges.iter().enumerate() {
            ws.u[e.source] -= ws.mu[k];
            if self.mode == CouplingMode::Undirected {
                ws.u[e.target] += ws.mu[k];
            }
        }
        Ok(())
    }

    /// All interconnection signals at `state`.
    ///
    /// ```
    /// use netpassivity::graph::Digraph;
    /// use netpassivity::network::{CouplingMode, NetworkSystem};
    /// use netpassivity::systems::{AgentModel, ControllerModel};
    ///
    /// let g = Digraph::new(2, &[(1, 2)]).unwrap();
    /// let sys = NetworkSystem::assemble(
    ///     g,
    ///     vec![AgentModel::integrator(), AgentModel::integrator()],
    ///     vec![ControllerModel::static_gain(1.0).unwrap()],
    ///     CouplingMode::DirectedOut,
    /// )
    /// .unwrap();
    /// let s = sys.signal_map(&[1.0, 0.0]).unwrap();
    /// assert_eq!(s.zeta, vec![1.0]);
    /// assert_eq!(s.u, vec![-1.0, 0.0]);
    /// ```
    pub fn signal_map(&self, state: &[f64]) -> Result<Signals, NetworkError> {
        self.check_dim(state)?;
        let mut ws = self.workspace();
        self.evaluate(state, &mut ws)?;
        let (w, z) = if self.mode == CouplingMode::DecomposedDirected {
            let n = self.n_agents();
            let mut w = vec![0.0; n];
            let mut z = vec![0.0; n];
            for (k, e) in self.graph.edges().iter().enumerate() {
                w[e.target] -= ws.mu[k];
                z[e.source] += ws.mu[k];
                z[e.target] -= ws.mu[k];
            }
            (Some(w), Some(z))
        } else {
            (None, None)
        };
        Ok(Signals {
            u: ws.u,
            y: ws.y,
            zeta: ws.zeta,
            mu: ws.mu,
            w,
            z,
        })
    }

    /// Writes the combined derivative at `state` into `out`.
    pub fn vector_field(&self, state: &[f64], out: &mut [f64]) -> Result<(), NetworkError> {
        self.check_dim(state)?;
        self.check_dim(out)?;
        let mut ws = self.workspace();
        self.vector_field_with(state, out, &mut ws)
    }

    /// [`NetworkSystem::vector_field`] reusing caller-owned scratch buffers.
    pub fn vector_field_with(&self, state: &[f64], out: &mut [f64], ws: &mut Workspace) -> Result<(), NetworkError> {
        self.evaluate(state, ws)?;
        for (i, agent) in self.agents.iter().enumerate() {
            let (lo, hi) = (self.agent_offsets[i], self.agent_offsets[i + 1]);
            agent.f(&state[lo..hi], ws.u[i], &mut out[lo..hi]);
        }
        for (k, c) in self.controllers.iter().enumerate() {
            let (lo, hi) = (self.controller_offsets[k], self.controller_offsets[k + 1]);
            c.phi(&state[lo..hi], ws.zeta[k], &mut out[lo..hi]);
        }
        if let Some(pos) = out.iter().position(|v| !v.is_finite()) {
            return Err(NetworkError::NonFinite {
                block: self.describe_state_index(pos),
            });
        }
        Ok(())
    }

    fn describe_state_index(&self, pos: usize) -> String {
        if pos < self.agent_offsets[self.n_agents()] {
            let i = self.agent_offsets.partition_point(|&o| o <= pos) - 1;
            format!("derivative of agent {} ({})", i + 1, self.agents[i].name())
        } else {
            let k = self.controller_offsets.partition_point(|&o| o <= pos) - 1;
            format!("derivative of controller {} ({})", k + 1, self.controllers[k].name())
        }
    }
}
