//! Scenario documents: one JSON file describing a graph, its blocks, the
//! coupling mode, the initial state, the integrator settings and output paths.

use std::collections::BTreeMap;
use std::path::Path;

use netpassivity::graph::{Digraph, GraphError};
use netpassivity::{AgentModel, ControllerModel, CouplingMode, NetworkSystem, SimConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub n_vertices: usize,
    /// 1-based `[source, target]` pairs.
    pub edges: Vec<[usize; 2]>,
}

impl GraphSpec {
    pub fn build(&self) -> Result<Digraph, CliError> {
        let pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Digraph::new(self.n_vertices, &pairs).map_err(|e| {
            let field = match &e {
                GraphError::NoVertices => "graph.n_vertices".to_string(),
                GraphError::VertexOutOfRange { index, .. }
                | GraphError::SelfLoop { index, .. }
                | GraphError::DuplicateEdge { index, .. } => format!("graph.edges[{index}]"),
            };
            CliError::Input(format!("{field}: {e}"))
        })
    }

    /// Reads a bare `{n_vertices, edges}` document.
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("{origin}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    /// Overrides the model's own OP index claim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_index: Option<f64>,
}

/// One spec for every edge, or one per edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Blocks {
    Uniform(BlockSpec),
    PerBlock(Vec<BlockSpec>),
}

impl Blocks {
    fn expand(&self, count: usize, field: &str) -> Result<Vec<BlockSpec>, CliError> {
        match self {
            Blocks::Uniform(b) => Ok(vec![b.clone(); count]),
            Blocks::PerBlock(list) if list.len() == count => Ok(list.clone()),
            Blocks::PerBlock(list) => Err(CliError::Input(format!(
                "{field}: expected {count} entries, found {}",
                list.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub graph: GraphSpec,
    pub agents: Blocks,
    pub controllers: Blocks,
    pub mode: CouplingMode,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub outputs: OutputSpec,
}

fn param(spec: &BlockSpec, field: &str, name: &str) -> Result<f64, CliError> {
    spec.params
        .get(name)
        .copied()
        .ok_or_else(|| CliError::Input(format!("{field}.params: missing `{name}` for {}", spec.kind)))
}

fn only_params(spec: &BlockSpec, field: &str, allowed: &[&str]) -> Result<(), CliError> {
    match spec.params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::Input(format!(
            "{field}.params: unknown parameter `{k}` for {} (expected {allowed:?})",
            spec.kind
        ))),
        None => Ok(()),
    }
}

fn build_agent(spec: &BlockSpec, field: &str) -> Result<AgentModel, CliError> {
    let model = match spec.kind.as_str() {
        "integrator" => {
            only_params(spec, field, &[])?;
            AgentModel::integrator()
        }
        "leaky_tanh" => {
            only_params(spec, field, &["a"])?;
            AgentModel::leaky_tanh(param(spec, field, "a")?).map_err(|e| CliError::Input(format!("{field}: {e}")))?
        }
        other => {
            return Err(CliError::Input(format!(
                "{field}.type: unknown agent type `{other}` (expected integrator or leaky_tanh)"
            )))
        }
    };
    match spec.declared_index {
        Some(v) => model
            .with_declared_op_index(v)
            .map_err(|e| CliError::Input(format!("{field}.declared_index: {e}"))),
        None => Ok(model),
    }
}

fn build_controller(spec: &BlockSpec, field: &str) -> Result<ControllerModel, CliError> {
    let make = match spec.kind.as_str() {
        "static_gain" => ControllerModel::static_gain,
        "rectified_gain" => ControllerModel::rectified_gain,
        other => {
            return Err(CliError::Input(format!(
                "{field}.type: unknown controller type `{other}` (expected static_gain or rectified_gain)"
            )))
        }
    };
    only_params(spec, field, &["b"])?;
    let model = make(param(spec, field, "b")?).map_err(|e| CliError::Input(format!("{field}: {e}")))?;
    match spec.declared_index {
        Some(v) => model
            .with_declared_op_index(v)
            .map_err(|e| CliError::Input(format!("{field}.declared_index: {e}"))),
        None => Ok(model),
    }
}

impl Scenario {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// SHA-256 of the compact JSON rendering with sorted keys.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("scenario serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Builds the network and checks `x0` and the integrator settings.
    pub fn build(&self) -> Result<NetworkSystem, CliError> {
        let graph = self.graph.build()?;
        let agents = self
            .agents
            .expand(graph.n_vertices(), "agents")?
            .iter()
            .enumerate()
            .map(|(i, s)| build_agent(s, &format!("agents[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let controllers = self
            .controllers
            .expand(graph.n_edges(), "controllers")?
            .iter()
            .enumerate()
            .map(|(k, s)| build_controller(s, &format!("controllers[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let sys = NetworkSystem::assemble(graph, agents, controllers, self.mode)
            .map_err(|e| CliError::Input(format!("scenario: {e}")))?;
        if self.x0.len() != sys.state_dim() {
            return Err(CliError::Input(format!(
                "x0: expected {} entries, found {}",
                sys.state_dim(),
                self.x0.len()
            )));
        }
        if let Some(i) = self.x0.iter().position(|v| !v.is_finite()) {
            return Err(CliError::Input(format!("x0[{i}]: not finite")));
        }
        self.sim
            .validate()
            .map_err(|e| CliError::Input(format!("sim: {e}")))?;
        Ok(sys)
    }
}
