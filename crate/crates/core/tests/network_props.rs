mod common;

use common::{balanced_digraph, digraph, norm};
use nalgebra::DVector;
use netpassivity::analysis::project_disagreement;
use netpassivity::graph::{build_incidence, Digraph};
use netpassivity::{AgentModel, ControllerModel, CouplingMode, NetworkSystem};
use proptest::prelude::*;

fn linear_system(g: &Digraph, b: f64, mode: CouplingMode) -> NetworkSystem {
    let n = g.n_vertices();
    let m = g.n_edges();
    NetworkSystem::assemble(
        g.clone(),
        vec![AgentModel::integrator(); n],
        vec![ControllerModel::static_gain(b).unwrap(); m],
        mode,
    )
    .unwrap()
}

fn nonlinear_system(g: &Digraph, mode: CouplingMode) -> NetworkSystem {
    let agents = (0..g.n_vertices())
        .map(|i| AgentModel::leaky_tanh(0.5 + i as f64).unwrap())
        .collect();
    let controllers = (0..g.n_edges())
        .map(|k| ControllerModel::rectified_gain(0.5 + 0.25 * k as f64).unwrap())
        .collect();
    NetworkSystem::assemble(g.clone(), agents, controllers, mode).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn decomposition_identity(g in digraph(8), mu in proptest::collection::vec(-100.0f64..100.0, 56)) {
        let inc = build_incidence(&g).to_f64();
        let mu = DVector::from_column_slice(&mu[..g.n_edges()]);
        let w = &inc.b_i * &mu;
        let z = &inc.e * &mu;
        let bo = &inc.b_o * &mu;
        prop_assert!(((w - z) + bo).norm() <= 1e-12 * (1.0 + mu.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn out_degree_bounds_out_incidence(g in digraph(8), mu in proptest::collection::vec(-10.0f64..10.0, 56)) {
        let inc = build_incidence(&g);
        let bo = inc.to_f64().b_o;
        let mu = DVector::from_column_slice(&mu[..g.n_edges()]);
        let max_do = inc.max_out_degree() as f64;
        prop_assert!((&bo * &mu).norm_squared() <= max_do * mu.norm_squared() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn decomposed_mode_matches_directed_out(g in digraph(7), x in proptest::collection::vec(-3.0f64..3.0, 7)) {
        let directed = nonlinear_system(&g, CouplingMode::DirectedOut);
        let decomposed = directed.with_mode(CouplingMode::DecomposedDirected);
        let x = &x[..g.n_vertices()];
        let (mut f1, mut f2) = (vec![0.0; x.len()], vec![0.0; x.len()]);
        directed.vector_field(x, &mut f1).unwrap();
        decomposed.vector_field(x, &mut f2).unwrap();
        prop_assert_eq!(&f1, &f2);

        let s = decomposed.signal_map(x).unwrap();
        let (w, z) = (s.w.unwrap(), s.z.unwrap());
        for i in 0..x.len() {
            prop_assert!((s.u[i] - (w[i] - z[i])).abs() <= 1e-12 * (1.0 + w[i].abs() + z[i].abs()));
        }
    }

    #[test]
    fn linear_networks_reduce_to_laplacian_flows(
        g in digraph(8),
        x in proptest::collection::vec(-10.0f64..10.0, 8),
        b in 0.1f64..5.0,
    ) {
        let n = g.n_vertices();
        let inc = build_incidence(&g).to_f64();
        let xv = DVector::from_column_slice(&x[..n]);
        for (mode, lap) in [
            (CouplingMode::DirectedOut, &inc.l_o),
            (CouplingMode::Undirected, &inc.l),
        ] {
            let sys = linear_system(&g, b, mode);
            let mut f = vec![0.0; n];
            sys.vector_field(&x[..n], &mut f).unwrap();
            let want = -(lap * &xv) * b;
            let scale = 1.0 + b * lap.abs().row_sum().max() * xv.amax();
            for i in 0..n {
                prop_assert!((f[i] - want[i]).abs() <= 1e-14 * scale, "{mode:?} {} vs {}", f[i], want[i]);
            }
        }
    }

    #[test]
    fn controllers_only_see_disagreement_on_balanced_graphs(
        g in balanced_digraph(8),
        y in proptest::collection::vec(-10.0f64..10.0, 8),
    ) {
        let n = g.n_vertices();
        let et = build_incidence(&g).to_f64().e.transpose();
        let y = &y[..n];
        let zeta = &et * DVector::from_column_slice(y);
        let zeta_p = &et * DVector::from_column_slice(&project_disagreement(y));
        prop_assert!((zeta - zeta_p).norm() <= 1e-12 * (1.0 + norm(y)));
        // 𝟙ᵀ E = 0 and E 𝟙 = 0 on balanced graphs
        let e = build_incidence(&g).to_f64().e;
        let ones_n = DVector::from_element(n, 1.0);
        let ones_m = DVector::from_element(g.n_edges(), 1.0);
        prop_assert!((e.transpose() * ones_n).norm() == 0.0);
        prop_assert!((&e * ones_m).norm() == 0.0);
    }
}
