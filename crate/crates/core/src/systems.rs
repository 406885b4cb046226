//! SISO agent and edge-controller models.
//!
//! Agents follow `ẋ = f(x, u)`, `y = h(x)`: the output never depends on the
//! input directly. Controllers follow `η̇ = φ(η, ζ)`, `μ = ψ(η, ζ)` and may
//! have feedthrough. Either kind can carry a storage function (value and
//! gradient) and a declared output-strict passivity index: the largest `ε`
//! with `V̇ ≤ u y − ε y²`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

type Dynamics = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;
type StateOutput = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type FeedthroughOutput = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
type Gradient = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Storage values tolerated below zero, and at the origin, when validating.
const STORAGE_ATOL: f64 = 1e-12;
/// Grid size used by `with_storage` validation.
const STORAGE_CHECK_POINTS: usize = 1001;
const GRID_RADIUS: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("parameter `{name}` must be positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("agent `{model}` has direct feedthrough: h(x, u) changes with u at x = {state:?}")]
    Feedthrough { model: String, state: Vec<f64> },
    #[error("storage of `{model}` is {value} at the origin, expected 0")]
    StorageNotZeroAtOrigin { model: String, value: f64 },
    #[error("storage of `{model}` is negative ({value}) at x = {state:?}")]
    NegativeStorage {
        model: String,
        state: Vec<f64>,
        value: f64,
    },
    #[error("declared passivity index of `{model}` must be finite and non-negative, got {value}")]
    InvalidIndex { model: String, value: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<f64, SystemError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(SystemError::NonPositiveParameter { name, value })
    }
}

/// A storage function `V(x) ≥ 0` with `V(0) = 0` and its gradient.
#[derive(Clone)]
pub struct Storage {
    value: StateOutput,
    gradient: Gradient,
}

impl Storage {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    /// `V ≡ 0`, the storage of every memoryless block.
    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_, g| g.fill(0.0))
    }

    /// `V(x) = ½‖x‖²`.
    pub fn quadratic() -> Self {
        Self::new(
            |x| 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
            |x, g| g.copy_from_slice(x),
        )
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        (self.gradient)(x, out)
    }
}

impl fmt::Debug for Storage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Storage")
    }
}

/// `ln(cosh(x))`, accurate to a few ulps near zero and without overflow for large `|x|`.
pub fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        // cosh x − 1 = 2 sinh²(x/2)
        let s = (0.5 * a).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
    }
}

/// Deterministic sample of `[-radius, radius]^dim` with at least `points` entries
/// (a single empty state when `dim == 0`).
pub fn sample_state_grid(dim: usize, points: usize, radius: f64) -> Vec<Vec<f64>> {
    if dim == 0 {
        return vec![Vec::new()];
    }
    let per_axis = ((points.max(2) as f64).powf(1.0 / dim as f64).ceil() as usize).max(2);
    let axis: Vec<f64> = (0..per_axis)
        .map(|i| -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64)
        .collect();
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            (0..dim)
                .map(|_| {
                    let v = axis[idx % per_axis];
                    idx /= per_axis;
                    v
                })
                .collect()
        })
        .collect()
}

/// Checks `V(0) = 0` and `V ≥ 0` on a grid of at least `points` states.
pub fn validate_storage(model: &str, storage: &Storage, dim: usize, points: usize) -> Result<(), SystemError> {
    let origin = vec![0.0; dim];
    let v0 = storage.value(&origin);
    if !(v0.abs() <= STORAGE_ATOL) {
        return Err(SystemError::StorageNotZeroAtOrigin {
            model: model.to_string(),
            value: v0,
        });
    }
    for x in sample_state_grid(dim, points, GRID_RADIUS) {
        let v = storage.value(&x);
        if !(v >= -STORAGE_ATOL) {
            return Err(SystemError::NegativeStorage {
                model: model.to_string(),
                state: x,
                value: v,
            });
        }
    }
    Ok(())
}

fn validate_index(model: &str, value: f64) -> Result<f64, SystemError> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(SystemError::InvalidIndex {
            model: model.to_string(),
            value,
        })
    }
}

/// Rate of change of `storage` along `ẋ = dx`.
fn storage_rate(storage: &Storage, x: &[f64], dx: &[f64]) -> f64 {
    let mut g = vec![0.0; x.len()];
    storage.gradient(x, &mut g);
    g.iter().zip(dx).map(|(a, b)| a * b).sum()
}

/// Fourth-order central difference of `storage` along the flow direction `dx`, step `h`.
fn storage_rate_fd(storage: &Storage, x: &[f64], dx: &[f64], h: f64) -> f64 {
    let at = |s: f64| -> f64 {
        let p: Vec<f64> = x.iter().zip(dx).map(|(a, b)| a + s * h * b).collect();
        storage.value(&p)
    };
    (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h)
}

/// An agent `ẋ = f(x, u)`, `y = h(x)`.
#[derive(Clone)]
pub struct AgentModel {
    name: String,
    state_dim: usize,
    dynamics: Dynamics,
    output: StateOutput,
    storage: Option<Storage>,
    declared_op_index: Option<f64>,
}

impl fmt::Debug for AgentModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AgentModel")
            .field("name", &self.name)
            .field("state_dim", &self.state_dim)
            .field("has_storage", &self.storage.is_some())
            .field("declared_op_index", &self.declared_op_index)
            .finish()
    }
}

impl AgentModel {
    /// `ẋ = u`, `y = x`, `Q(x) = x²/2`. Passive but not strictly (`ε = 0`).
    pub fn integrator() -> Self {
        Self {
            name: "integrator".into(),
            state_dim: 1,
            dynamics: Arc::new(|_, u, dx| dx[0] = u),
            output: Arc::new(|x| x[0]),
            storage: Some(Storage::quadratic()),
            declared_op_index: Some(0.0),
        }
    }

    /// `ẋ = −a x + u`, `y = tanh(x)`, `Q(x) = ln cosh(x)`, OP-`a`.
    ///
    /// With this storage `Q̇ = y ẋ`, so `u y − Q̇ = a x tanh(x) ≥ a tanh²(x)`.
    pub fn leaky_tanh(a: f64) -> Result<Self, SystemError> {
        let a = positive("a", a)?;
        Ok(Self {
            name: "leaky_tanh".into(),
            state_dim: 1,
            dynamics: Arc::new(move |x, u, dx| dx[0] = -a * x[0] + u),
            output: Arc::new(|x| x[0].tanh()),
            storage: Some(Storage::new(|x| log_cosh(x[0]), |x, g| g[0] = x[0].tanh())),
            declared_op_index: Some(a),
        })
    }

    /// Wraps user dynamics. `h` receives the input so that feedthrough can be
    /// detected; an output that moves with `u` is rejected.
    pub fn custom(
        name: impl Into<String>,
        state_dim: usize,
        f: impl Fn(&[f64], f64, &mut [f64]) + Send + Sync + 'static,
        h: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, SystemError> {
        let name = name.into();
        let h: FeedthroughOutput = Arc::new(h);
        const PROBE_INPUTS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];
        for x in sample_state_grid(state_dim, 625, 2.0) {
            let base = h(&x, 0.0);
            if PROBE_INPUTS.iter().any(|&u| h(&x, u).to_bits() != base.to_bits()) {
                return Err(SystemError::Feedthrough { model: name, state: x });
            }
        }
        Ok(Self {
            name,
            state_dim,
            dynamics: Arc::new(f),
            output: Arc::new(move |x| h(x, 0.0)),
            storage: None,
            declared_op_index: None,
        })
    }

    /// Attaches a storage function after checking `Q(0) = 0` and `Q ≥ 0` on a grid.
    pub fn with_storage(mut self, storage: Storage) -> Result<Self, SystemError> {
        validate_storage(&self.name, &storage, self.state_dim, STORAGE_CHECK_POINTS)?;
        self.storage = Some(storage);
        Ok(self)
    }

    /// Overrides the declared OP index. The value is a claim; nothing checks it here.
    pub fn with_declared_op_index(mut self, eps: f64) -> Result<Self, SystemError> {
        self.declared_op_index = Some(validate_index(&self.name, eps)?);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn storage(&self) -> Option<&Storage> {
        self.storage.as_ref()
    }

    pub fn declared_op_index(&self) -> Option<f64> {
        self.declared_op_index
    }

    pub fn f(&self, x: &[f64], u: f64, dx: &mut [f64]) {
        (self.dynamics)(x, u, dx)
    }

    pub fn h(&self, x: &[f64]) -> f64 {
        (self.output)(x)
    }

    pub fn storage_value(&self, x: &[f64]) -> Option<f64> {
        self.storage.as_ref().map(|s| s.value(x))
    }

    /// `Q̇ = ∇Q(x) · f(x, u)`.
    pub fn storage_rate(&self, x: &[f64], u: f64) -> Option<f64> {
        let s = self.storage.as_ref()?;
        let mut dx = vec![0.0; self.state_dim];
        self.f(x, u, &mut dx);
        Some(storage_rate(s, x, &dx))
    }

    /// Finite-difference counterpart of [`AgentModel::storage_rate`].
    pub fn storage_rate_fd(&self, x: &[f64], u: f64, h: f64) -> Option<f64> {
        let s = self.storage.as_ref()?;
        let mut dx = vec![0.0; self.state_dim];
        self.f(x, u, &mut dx);
        Some(storage_rate_fd(s, x, &dx, h))
    }
}

/// An edge controller `η̇ = φ(η, ζ)`, `μ = ψ(η, ζ)`.
#[derive(Clone)]
pub struct ControllerModel {
    name: String,
    state_dim: usize,
    dynamics: Dynamics,
    output: FeedthroughOutput,
    storage: Option<Storage>,
    declared_op_index: Option<f64>,
    gain: Option<f64>,
}

impl fmt::Debug for ControllerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControllerModel")
            .field("name", &self.name)
            .field("state_dim", &self.state_dim)
            .field("has_storage", &self.storage.is_some())
            .field("declared_op_index", &self.declared_op_index)
            .field("gain", &self.gain)
            .finish()
    }
}

impl ControllerModel {
    /// `μ = b ζ`. Since `ζ μ = (1/b) μ²`, the declared OP index is `1/b`.
    pub fn static_gain(b: f64) -> Result<Self, SystemError> {
        let b = positive("b", b)?;
        Ok(Self::memoryless("static_gain", b, move |z| b * z))
    }

    /// `μ = b max(ζ, 0)`, OP index `1/b`.
    pub fn rectified_gain(b: f64) -> Result<Self, SystemError> {
        let b = positive("b", b)?;
        Ok(Self::memoryless("rectified_gain", b, move |z| b * z.max(0.0)))
    }

    fn memoryless(name: &str, b: f64, psi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            state_dim: 0,
            dynamics: Arc::new(|_, _, _| {}),
            output: Arc::new(move |_, z| psi(z)),
            storage: Some(Storage::zero()),
            declared_op_index: Some(1.0 / b),
            gain: Some(b),
        }
    }

    pub fn custom(
        name: impl Into<String>,
        state_dim: usize,
        phi: impl Fn(&[f64], f64, &mut [f64]) + Send + Sync + 'static,
        psi: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            state_dim,
            dynamics: Arc::new(phi),
            output: Arc::new(psi),
            storage: None,
            declared_op_index: None,
            gain: None,
        }
    }

    pub fn with_storage(mut self, storage: Storage) -> Result<Self, SystemError> {
        validate_storage(&self.name, &storage, self.state_dim, STORAGE_CHECK_POINTS)?;
        self.storage = Some(storage);
        Ok(self)
    }

    pub fn with_declared_op_index(mut self, alpha: f64) -> Result<Self, SystemError> {
        self.declared_op_index = Some(validate_index(&self.name, alpha)?);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn storage(&self) -> Option<&Storage> {
        self.storage.as_ref()
    }

    pub fn declared_op_index(&self) -> Option<f64> {
        self.declared_op_index
    }

    /// The coupling gain `b` of the built-in gain controllers.
    pub fn gain(&self) -> Option<f64> {
        self.gain
    }

    pub fn phi(&self, eta: &[f64], zeta: f64, d_eta: &mut [f64]) {
        (self.dynamics)(eta, zeta, d_eta)
    }

    pub fn psi(&self, eta: &[f64], zeta: f64) -> f64 {
        (self.output)(eta, zeta)
    }

    pub fn storage_value(&self, eta: &[f64]) -> Option<f64> {
        self.storage.as_ref().map(|s| s.value(eta))
    }

    pub fn storage_rate(&self, eta: &[f64], zeta: f64) -> Option<f64> {
        let s = self.storage.as_ref()?;
        let mut d = vec![0.0; self.state_dim];
        self.phi(eta, zeta, &mut d);
        Some(storage_rate(s, eta, &d))
    }

    pub fn storage_rate_fd(&self, eta: &[f64], zeta: f64, h: f64) -> Option<f64> {
        let s = self.storage.as_ref()?;
        let mut d = vec![0.0; self.state_dim];
        self.phi(eta, zeta, &mut d);
        Some(storage_rate_fd(s, eta, &d, h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
    }

    #[test]
    fn integrator_basics() {
        let m = AgentModel::integrator();
        let mut dx = [0.0];
        m.f(&[3.0], 2.0, &mut dx);
        assert_eq!(dx[0], 2.0);
        assert_eq!(m.h(&[5.0]), 5.0);
        assert_eq!(m.storage_value(&[2.0]), Some(2.0));
        assert_eq!(m.declared_op_index(), Some(0.0));
        assert_eq!(m.state_dim(), 1);
    }

    #[test]
    fn leaky_tanh_basics() {
        let m = AgentModel::leaky_tanh(1.5).unwrap();
        let mut dx = [0.0];
        m.f(&[0.0], 1.0, &mut dx);
        assert_eq!(dx[0], 1.0);
        assert_eq!(m.h(&[0.0]), 0.0);
        assert_eq!(m.storage_value(&[0.0]), Some(0.0));
        assert_eq!(m.declared_op_index(), Some(1.5));
        assert!(AgentModel::leaky_tanh(0.0).is_err());
        assert!(AgentModel::leaky_tanh(-1.0).is_err());
        assert!(AgentModel::leaky_tanh(f64::NAN).is_err());
    }

    #[test]
    fn leaky_tanh_dissipation_at_one() {
        // a = 2, x = 1, u = 0: u y − Q̇ = 2 tanh(1) ≥ 2 tanh²(1)
        let m = AgentModel::leaky_tanh(2.0).unwrap();
        let y = m.h(&[1.0]);
        let supply_minus_rate = 0.0 * y - m.storage_rate(&[1.0], 0.0).unwrap();
        assert!((supply_minus_rate - 1.5231883119115297).abs() < 1e-12);
        assert!((2.0 * y * y - 1.1600513167719477).abs() < 1e-12);
        assert!(supply_minus_rate >= 2.0 * y * y);
    }

    #[test]
    fn leaky_tanh_certificate_on_grid() {
        let a = 1.66;
        let m = AgentModel::leaky_tanh(a).unwrap();
        for x in linspace(-20.0, 20.0, 401) {
            for u in linspace(-5.0, 5.0, 41) {
                let y = m.h(&[x]);
                let margin = u * y - m.storage_rate(&[x], u).unwrap() - a * y * y;
                assert!(margin >= -1e-9, "x={x} u={u} margin={margin}");
            }
        }
    }

    #[test]
    fn analytic_storage_rate_matches_finite_differences() {
        let m = AgentModel::leaky_tanh(2.56).unwrap();
        for x in linspace(-6.0, 6.0, 121) {
            for u in [-2.0, -0.3, 0.0, 0.7, 3.0] {
                let exact = m.storage_rate(&[x], u).unwrap();
                let fd = m.storage_rate_fd(&[x], u, 1e-3).unwrap();
                assert!(
                    (exact - fd).abs() <= 1e-4 * exact.abs().max(fd.abs()) + 1e-12,
                    "x={x} u={u}: {exact} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn log_cosh_is_stable() {
        assert_eq!(log_cosh(0.0), 0.0);
        assert!((log_cosh(1.0) - 1f64.cosh().ln()).abs() < 1e-15);
        assert!((log_cosh(-3.0) - 3f64.cosh().ln()).abs() < 1e-14);
        assert!((log_cosh(1000.0) - (1000.0 - std::f64::consts::LN_2)).abs() < 1e-9);
        // 50-digit reference values
        #[allow(clippy::excessive_precision)]
        for (x, want) in [
            (1e-8, 5.0000000000000001259e-17),
            (1e-3, 4.999999166666889097e-7),
            (0.5, 0.12011450695827752463),
            (0.999, 0.43301944642088479211),
            (1.5, 0.85544017101379674934),
        ] {
            assert!((log_cosh(x) - want).abs() <= 4.0 * f64::EPSILON * want, "{x}");
        }
    }

    #[test]
    fn static_gain_index_is_reciprocal() {
        let c = ControllerModel::static_gain(4.0 / 3.0).unwrap();
        assert!((c.psi(&[], 3.0) - 4.0).abs() < 1e-15);
        assert_eq!(ControllerModel::static_gain(1.0).unwrap().psi(&[], 0.0), 0.0);
        assert_eq!(c.declared_op_index(), Some(0.75));
        assert_eq!(c.gain(), Some(4.0 / 3.0));

        let c = ControllerModel::static_gain(2.0).unwrap();
        for z in linspace(-10.0, 10.0, 1001) {
            let mu = c.psi(&[], z);
            assert!((z * mu - 0.5 * mu * mu).abs() <= 4.0 * f64::EPSILON * z * mu);
        }
        assert!(ControllerModel::static_gain(0.0).is_err());
    }

    #[test]
    fn rectified_gain_behaviour() {
        let c = ControllerModel::rectified_gain(4.0 / 3.0).unwrap();
        assert_eq!(c.psi(&[], -2.0), 0.0);
        assert!((c.psi(&[], 3.0) - 4.0).abs() < 1e-15);
        for b in [0.1, 1.0, 4.0 / 3.0, 7.5] {
            let c = ControllerModel::rectified_gain(b).unwrap();
            for z in linspace(-10.0, 10.0, 1001) {
                let mu = c.psi(&[], z);
                assert!(z * mu >= 0.0);
                if z < 0.0 {
                    assert_eq!(z * mu, 0.0);
                } else {
                    assert!((z * mu - mu * mu / b).abs() <= 4.0 * f64::EPSILON * z * mu);
                }
            }
        }
        assert!(ControllerModel::rectified_gain(-1.0).is_err());
    }

    #[test]
    fn custom_integrator_matches_builtin() {
        let custom = AgentModel::custom("my_integrator", 1, |_, u, dx| dx[0] = u, |x, _| x[0])
            .unwrap()
            .with_storage(Storage::quadratic())
            .unwrap();
        let builtin = AgentModel::integrator();
        for x in linspace(-4.0, 4.0, 33) {
            for u in linspace(-2.0, 2.0, 9) {
                let (mut a, mut b) = ([0.0], [0.0]);
                custom.f(&[x], u, &mut a);
                builtin.f(&[x], u, &mut b);
                assert_eq!(a, b);
                assert_eq!(custom.h(&[x]), builtin.h(&[x]));
                assert_eq!(custom.storage_rate(&[x], u), builtin.storage_rate(&[x], u));
            }
        }
    }

    #[test]
    fn feedthrough_agent_is_rejected() {
        let err = AgentModel::custom("bad", 1, |_, u, dx| dx[0] = u, |_, u| u).unwrap_err();
        assert!(matches!(err, SystemError::Feedthrough { .. }));
    }

    #[test]
    fn first_order_lag_controller() {
        let c = ControllerModel::custom("lag", 1, |eta, z, d| d[0] = -eta[0] + z, |eta, _| eta[0])
            .with_storage(Storage::quadratic())
            .unwrap();
        assert_eq!(c.state_dim(), 1);
        let mut d = [0.0];
        c.phi(&[2.0], 1.0, &mut d);
        assert_eq!(d[0], -1.0);
        assert_eq!(c.psi(&[2.0], 1.0), 2.0);
    }

    #[test]
    fn bad_storage_is_rejected() {
        let shifted = Storage::new(|x| 0.5 * x[0] * x[0] + 1.0, |x, g| g[0] = x[0]);
        assert!(matches!(
            AgentModel::integrator().with_storage(shifted),
            Err(SystemError::StorageNotZeroAtOrigin { .. })
        ));
        let indefinite = Storage::new(|x| x[0], |_, g| g[0] = 1.0);
        assert!(matches!(
            AgentModel::integrator().with_storage(indefinite),
            Err(SystemError::NegativeStorage { .. })
        ));
    }

    #[test]
    fn builtin_storage_is_nonnegative_on_dense_grid() {
        let agents = [
            AgentModel::integrator(),
            AgentModel::leaky_tanh(1.5).unwrap(),
            AgentModel::leaky_tanh(4.62).unwrap(),
        ];
        for m in &agents {
            validate_storage(m.name(), m.storage().unwrap(), m.state_dim(), 10_000).unwrap();
        }
        for c in [
            ControllerModel::static_gain(4.0 / 3.0).unwrap(),
            ControllerModel::rectified_gain(2.0).unwrap(),
        ] {
            validate_storage(c.name(), c.storage().unwrap(), c.state_dim(), 10_000).unwrap();
        }
        assert!(sample_state_grid(1, 10_000, 5.0).len() >= 10_000);
        assert!(sample_state_grid(3, 10_000, 5.0).len() >= 10_000);
    }

    #[test]
    fn declared_index_override() {
        let m = AgentModel::leaky_tanh(1.5).unwrap().with_declared_op_index(3.0).unwrap();
        assert_eq!(m.declared_op_index(), Some(3.0));
        assert!(AgentModel::integrator().with_declared_op_index(-1.0).is_err());
    }
}
