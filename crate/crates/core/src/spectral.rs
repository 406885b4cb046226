//! Spectrum and kernels of the symmetric part of the out-Laplacian.
//!
//! With integrator agents and unit static gains over `(Σ, Π, G)_{B_o}`, the
//! feedback path `y ↦ g = B_o Eᵀ y = L_o y` is passive iff `yᵀ L_o y ≥ 0` for
//! every `y`, i.e. iff the smallest eigenvalue of `sym(L_o) = (L_o + L_oᵀ)/2`
//! is non-negative. This module computes that spectrum and the three
//! numerical verdicts that go with it:
//!
//! * with a globally reachable node, `λ_min(sym(L_o)) ≤ 0`;
//! * `ker L_o = ker L_oᵀ` iff `sym(L_o)` has a zero eigenvalue;
//! * and both hold iff the digraph is balanced.
//!
//! Every spectral boolean uses one tolerance: `1e-10 · max(1, ρ)` where `ρ`
//! is the spectral radius of `sym(L_o)`, unless the caller supplies one.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{build_incidence, has_globally_reachable_node, is_balanced, Digraph, IncidenceSet};

/// Relative factor for the default eigenvalue tolerance.
pub const DEFAULT_EIG_RTOL: f64 = 1e-10;
/// Singular values at or below this fraction of the largest one span the kernel.
pub const KERNEL_SV_RTOL: f64 = 1e-10;
/// Largest Frobenius distance at which two orthonormal kernel bases count as one subspace.
pub const SUBSPACE_TOL: f64 = 1e-8;
/// Slack for the eigenvalue/singular-value interlacing spot check.
pub const FAN_HOFFMAN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("eigen-tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("{routine} did not converge on a {n}x{n} matrix (Frobenius norm {frobenius_norm:.3e}, max |entry| {max_abs:.3e})")]
    NoConvergence {
        routine: &'static str,
        n: usize,
        frobenius_norm: f64,
        max_abs: f64,
    },
}

fn failure(routine: &'static str, m: &DMatrix<f64>) -> SpectralError {
    SpectralError::NoConvergence {
        routine,
        n: m.nrows(),
        frobenius_norm: m.norm(),
        max_abs: m.amax(),
    }
}

#[derive(Debug, Clone)]
pub struct SymLoAnalysis {
    pub sym_lo: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    /// Unit-norm eigenvector for `min_eigenvalue`.
    pub min_eigenvector: DVector<f64>,
    /// Singular values of `L_o`, descending.
    pub singular_values: Vec<f64>,
    /// Orthonormal basis of `ker L_o`, one column per basis vector.
    pub kernel_lo: DMatrix<f64>,
    /// Orthonormal basis of `ker L_oᵀ`.
    pub kernel_lo_t: DMatrix<f64>,
    pub kernels_equal: bool,
    pub has_zero_eigenvalue: bool,
    pub feedback_passive: bool,
    pub tol_eig: f64,
}

impl SymLoAnalysis {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn report(&self) -> SpectralReport {
        let columns = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            m.column_iter().map(|c| c.iter().copied().collect()).collect()
        };
        SpectralReport {
            eigenvalues: self.eigenvalues.clone(),
            min_eigenvalue: self.min_eigenvalue,
            min_eigenvector: self.min_eigenvector.iter().copied().collect(),
            singular_values: self.singular_values.clone(),
            kernel_lo: columns(&self.kernel_lo),
            kernel_lo_t: columns(&self.kernel_lo_t),
            kernels_equal: self.kernels_equal,
            has_zero_eigenvalue: self.has_zero_eigenvalue,
            feedback_passive: self.feedback_passive,
            tol_eig: self.tol_eig,
        }
    }
}

/// Serializable view of [`SymLoAnalysis`]; kernel bases are listed as vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub min_eigenvector: Vec<f64>,
    pub singular_values: Vec<f64>,
    pub kernel_lo: Vec<Vec<f64>>,
    pub kernel_lo_t: Vec<Vec<f64>>,
    pub kernels_equal: bool,
    pub has_zero_eigenvalue: bool,
    pub feedback_passive: bool,
    pub tol_eig: f64,
}

pub fn sym_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Analyses `sym(L_o)` with the default relative tolerance.
pub fn analyze_sym_lo(inc: &IncidenceSet) -> Result<SymLoAnalysis, SpectralError> {
    analyze(inc, None)
}

/// Analyses `sym(L_o)` with an absolute eigenvalue tolerance.
pub fn analyze_sym_lo_with_tol(inc: &IncidenceSet, tol_eig: f64) -> Result<SymLoAnalysis, SpectralError> {
    if !(tol_eig > 0.0 && tol_eig.is_finite()) {
        return Err(SpectralError::InvalidTolerance(tol_eig));
    }
    analyze(inc, Some(tol_eig))
}

fn analyze(inc: &IncidenceSet, tol_eig: Option<f64>) -> Result<SymLoAnalysis, SpectralError> {
    let l_o = inc.l_o.map(|v| v as f64);
    let sym_lo = sym_part(&l_o);

    let eig = SymmetricEigen::try_new(sym_lo.clone(), f64::EPSILON, 0)
        .ok_or_else(|| failure("symmetric eigensolver", &sym_lo))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let min_eigenvalue = eigenvalues[0];
    let v = eig.eigenvectors.column(order[0]);
    let min_eigenvector = v.clone_owned() / v.norm();

    let spectral_radius = eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let tol_eig = tol_eig.unwrap_or(DEFAULT_EIG_RTOL * spectral_radius.max(1.0));

    let (singular_values, kernel_lo, kernel_lo_t) = kernels(&l_o)?;
    let kernels_equal = same_subspace(&kernel_lo, &kernel_lo_t);

    Ok(SymLoAnalysis {
        sym_lo,
        min_eigenvalue,
        min_eigenvector,
        has_zero_eigenvalue: eigenvalues.iter().any(|v| v.abs() <= tol_eig),
        feedback_passive: min_eigenvalue >= -tol_eig,
        eigenvalues,
        singular_values,
        kernel_lo,
        kernel_lo_t,
        kernels_equal,
        tol_eig,
    })
}

/// Descending singular values, `ker M` and `ker Mᵀ` by relative thresholding.
///
/// Both kernels come from right singular vectors (of `M` and of `Mᵀ`). The left
/// singular vectors nalgebra returns for zero singular values are not reliable
/// (the directed 4-cycle is an example).
#[allow(clippy::type_complexity)]
fn kernels(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>, DMatrix<f64>), SpectralError> {
    let (descending, ker) = right_kernel(m, None)?;
    let threshold = KERNEL_SV_RTOL * descending.first().copied().unwrap_or(0.0);
    let (_, ker_t) = right_kernel(&m.transpose(), Some(threshold))?;
    Ok((descending, ker, ker_t))
}

/// Descending singular values and an orthonormal basis of `ker m`.
fn right_kernel(m: &DMatrix<f64>, threshold: Option<f64>) -> Result<(Vec<f64>, DMatrix<f64>), SpectralError> {
    let n = m.ncols();
    let svd = SVD::try_new(m.clone(), false, true, f64::EPSILON, 0)
        .ok_or_else(|| failure("singular value decomposition", m))?;
    let v_t = svd.v_t.ok_or_else(|| failure("singular value decomposition", m))?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let descending: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
    let threshold = threshold.unwrap_or(KERNEL_SV_RTOL * descending.first().copied().unwrap_or(0.0));

    let null: Vec<usize> = order.iter().copied().filter(|&i| sv[i] <= threshold).collect();
    let mut ker = DMatrix::zeros(n, null.len());
    for (c, &i) in null.iter().enumerate() {
        ker.set_column(c, &v_t.row(i).transpose());
    }
    Ok((descending, ker))
}

/// Both bases orthonormal: equal span iff equal dimension and `A` survives
/// projection onto `span(B)`.
fn same_subspace(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    if a.ncols() != b.ncols() {
        return false;
    }
    if a.ncols() == 0 {
        return true;
    }
    let residual = a - b * (b.transpose() * a);
    residual.norm() <= SUBSPACE_TOL
}

/// Checks that the `j`-th largest eigenvalue of `sym(L_o)` never exceeds the
/// `j`-th largest singular value of `L_o`.
pub fn fan_hoffman_holds(analysis: &SymLoAnalysis) -> bool {
    analysis
        .eigenvalues
        .iter()
        .rev()
        .zip(&analysis.singular_values)
        .all(|(lambda, s)| *lambda <= s + FAN_HOFFMAN_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Proposition1Verdict {
    /// False when the digraph has no globally reachable node.
    pub applicable: bool,
    /// `min_eigenvalue ≤ tol_eig`; vacuously true when not applicable.
    pub holds: bool,
    pub min_eigenvalue: f64,
    pub tol_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Proposition23Verdict {
    pub applicable: bool,
    pub kernels_equal: bool,
    pub zero_eigenvalue: bool,
    pub balanced: bool,
    /// All three booleans agree; vacuously true when not applicable.
    pub consistent: bool,
}

/// Smallest eigenvalue of `sym(L_o)` is non-positive when a globally
/// reachable node exists.
///
/// ```
/// use netpassivity::graph::Digraph;
/// use netpassivity::spectral::check_proposition1;
///
/// let path = Digraph::new(2, &[(1, 2)]).unwrap();
/// let verdict = check_proposition1(&path).unwrap();
/// assert!(verdict.applicable && verdict.holds);
/// assert!((verdict.min_eigenvalue - (1.0 - 2f64.sqrt()) / 2.0).abs() < 1e-12);
/// ```
pub fn check_proposition1(g: &Digraph) -> Result<Proposition1Verdict, SpectralError> {
    let analysis = analyze_sym_lo(&build_incidence(g))?;
    Ok(proposition1_from(g, &analysis))
}

pub fn proposition1_from(g: &Digraph, analysis: &SymLoAnalysis) -> Proposition1Verdict {
    let applicable = has_globally_reachable_node(g);
    Proposition1Verdict {
        applicable,
        holds: !applicable || analysis.min_eigenvalue <= analysis.tol_eig,
        min_eigenvalue: analysis.min_eigenvalue,
        tol_eig: analysis.tol_eig,
    }
}

/// Kernel equality, a zero eigenvalue of `sym(L_o)`, and balancedness must
/// agree when a globally reachable node exists.
pub fn check_proposition2_3(g: &Digraph) -> Result<Proposition23Verdict, SpectralError> {
    let inc = build_incidence(g);
    let analysis = analyze_sym_lo(&inc)?;
    Ok(proposition23_from(g, &inc, &analysis))
}

pub fn proposition23_from(g: &Digraph, inc: &IncidenceSet, analysis: &SymLoAnalysis) -> Proposition23Verdict {
    let applicable = has_globally_reachable_node(g);
    let balanced = is_balanced(inc);
    let kernels_equal = analysis.kernels_equal;
    let zero_eigenvalue = analysis.has_zero_eigenvalue;
    Proposition23Verdict {
        applicable,
        kernels_equal,
        zero_eigenvalue,
        balanced,
        consistent: !applicable || (kernels_equal == zero_eigenvalue && zero_eigenvalue == balanced),
    }
}
