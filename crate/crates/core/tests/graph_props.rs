mod common;

use common::{digraph, reachability};
use netpassivity::graph::{build_incidence, globally_reachable_nodes, is_balanced};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn balancedness_characterizations_agree(g in digraph(8)) {
        let inc = build_incidence(&g);
        let n = g.n_vertices();
        let e_rows_zero = (0..n).all(|i| inc.e.row(i).sum() == 0);
        let e_cols_zero = (0..g.n_edges()).all(|k| inc.e.column(k).sum() == 0);
        let lo_rows_zero = (0..n).all(|i| inc.l_o.row(i).sum() == 0);
        let lo_cols_zero = (0..n).all(|j| inc.l_o.column(j).sum() == 0);
        let degrees = g.out_degrees() == g.in_degrees();

        prop_assert!(e_cols_zero);
        prop_assert!(lo_rows_zero);
        prop_assert_eq!(e_rows_zero && e_cols_zero, lo_rows_zero && lo_cols_zero);
        prop_assert_eq!(lo_rows_zero && lo_cols_zero, degrees);
        prop_assert_eq!(is_balanced(&inc), degrees);
    }

    #[test]
    fn incidence_decomposes(g in digraph(8)) {
        let inc = build_incidence(&g);
        prop_assert_eq!(&inc.b_o + &inc.b_i, inc.e.clone());
        prop_assert!(inc.b_o.iter().all(|v| *v == 0 || *v == 1));
        prop_assert!(inc.b_i.iter().all(|v| *v == 0 || *v == -1));
        for k in 0..g.n_edges() {
            prop_assert_eq!(inc.b_o.column(k).sum(), 1);
            prop_assert_eq!(inc.b_i.column(k).sum(), -1);
        }
        prop_assert_eq!(&inc.l_o - &inc.l_i, inc.l.clone());
    }

    #[test]
    fn laplacians_annihilate_ones(g in digraph(8)) {
        let inc = build_incidence(&g);
        let n = g.n_vertices();
        for i in 0..n {
            prop_assert_eq!(inc.l.row(i).sum(), 0);
            prop_assert_eq!(inc.l_o.row(i).sum(), 0);
        }
        prop_assert_eq!(inc.l.transpose(), inc.l.clone());
        let d_out = g.out_degrees();
        for (i, d) in d_out.iter().enumerate() {
            prop_assert_eq!(inc.l_o[(i, i)], *d as i64);
        }
    }

    #[test]
    fn reachable_set_matches_closure(g in digraph(8)) {
        let r = reachability(&g);
        let n = g.n_vertices();
        let expected: Vec<usize> = (0..n).filter(|&j| (0..n).all(|i| r[i][j])).map(|j| j + 1).collect();
        prop_assert_eq!(globally_reachable_nodes(&g), expected);
    }
}
