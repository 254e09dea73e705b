use proptest::prelude::*;

use rankwidth::expansion::{
    certified_rw_lower_bound, cheeger_alternative, cheeger_exact, degree_tail_sum, degree_tail_threshold,
    high_degree_filter,
};
use rankwidth::experiments::{read_records_from, run_experiment, write_records_to, Regime, RegimeConfig};
use rankwidth::graph::{is_connected_subset, parse_edge_list, to_edge_list, two_core};
use rankwidth::matrix_stats::{check_membership_bound, random_subspace, BiasedVectorModel};
use rankwidth::width::{balanced_separation, rank_width, tree_width, width_of_decomposition};
use rankwidth::{Adjacency, BitMatrix, Graph};

fn matrix() -> impl Strategy<Value = BitMatrix> {
    (0usize..20, 0usize..20, 0.0f64..1.0, any::<u64>()).prop_map(|(r, c, p, seed)| {
        rankwidth::matrix_stats::sample_random_matrix(r, c, p, seed).unwrap()
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::new(n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    graph(max_n).prop_filter("connected, two or more vertices", |g| {
        g.n() >= 2 && is_connected_subset(g, &(0..g.n()).collect::<Vec<_>>())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_is_transpose_invariant(m in matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= m.n_rows().min(m.n_cols()));
    }

    #[test]
    fn rows_lie_in_their_echelon_span(m in matrix()) {
        let basis = m.echelonize();
        prop_assert_eq!(basis.dimension(), m.rank());
        for row in m.rows() {
            prop_assert!(basis.contains(&row).unwrap());
        }
        prop_assert!(basis.pivots().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sparse_bound_is_certified(m in matrix()) {
        let s = m.sparse_rank_lower_bound();
        let witness: Vec<_> = s.witness_rows.iter().map(|&i| m.row_vector(i)).collect();
        prop_assert_eq!(BitMatrix::from_rows(m.n_cols(), &witness).unwrap().rank(), s.bound);
        if s.nnz > 0 {
            prop_assert!(s.bound >= s.nnz.div_ceil(s.max_line_weight.pow(2)));
        } else {
            prop_assert_eq!(s.bound, 0);
        }
    }

    #[test]
    fn cutrank_is_symmetric(g in graph(12), mask in any::<u16>()) {
        let n = g.n();
        let a: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let b: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 0).collect();
        prop_assert_eq!(g.cutrank(&a, &b).unwrap(), g.cutrank(&b, &a).unwrap());
        // Complementing flips the cut matrix to J - N, which moves the rank by at most one.
        let r = g.cutrank(&a, &b).unwrap();
        prop_assert!(r.abs_diff(g.complement().cutrank(&a, &b).unwrap()) <= 1);
    }

    #[test]
    fn width_inequalities(g in graph(11)) {
        let n = g.n();
        let rw = rank_width(&g, true).unwrap();
        let rwc = rank_width(&g.complement(), false).unwrap().width;
        let tw = tree_width(&g).unwrap();
        prop_assert!(rw.width <= n.div_ceil(3));
        prop_assert!(rw.width.abs_diff(rwc) <= 1);
        prop_assert!(rw.width <= tw + 1);
        if let Some(d) = &rw.decomposition {
            prop_assert_eq!(width_of_decomposition(&g, d).unwrap(), rw.width);
            let parsed: rankwidth::width::RankDecomposition = d.to_text().parse().unwrap();
            prop_assert_eq!(&parsed, d);
        }
    }

    #[test]
    fn induced_subgraphs_do_not_increase_width(g in graph(11), mask in any::<u16>()) {
        let keep: Vec<usize> = (0..g.n()).filter(|&v| mask >> v & 1 == 1).collect();
        let h = g.induced_subgraph(&keep);
        prop_assert!(rank_width(&h, false).unwrap().width <= rank_width(&g, false).unwrap().width);
    }

    #[test]
    fn separation_sizes(g in graph(12)) {
        prop_assume!(g.n() >= 2);
        let rw = rank_width(&g, true).unwrap();
        let s = balanced_separation(&g, rw.decomposition.as_ref().unwrap()).unwrap();
        let n = g.n();
        prop_assert_eq!(s.v1.len(), n.div_ceil(2));
        prop_assert_eq!(s.v2.len(), n.div_ceil(3));
        prop_assert!(s.v1.iter().all(|v| !s.v2.contains(v)));
        prop_assert!(s.rho <= rw.width);
    }

    #[test]
    fn edge_list_round_trip(g in graph(15)) {
        let text = to_edge_list(&g);
        prop_assert_eq!(parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn two_core_has_min_degree_two(g in graph(15)) {
        let core = two_core(&g);
        for &v in &core {
            let inside = g.neighbors(v).filter(|u| core.binary_search(u).is_ok()).count();
            prop_assert!(inside >= 2);
        }
    }

    #[test]
    fn cheeger_definitions_agree(g in connected_graph(8)) {
        let rep = cheeger_exact(&g).unwrap();
        prop_assert_eq!(rep.phi, cheeger_alternative(&g).unwrap());
        prop_assert!(rep.phi <= num_rational::Ratio::from_integer(1));
        prop_assert!(rep.witness[0] == 0 && rep.witness.len() < g.n());
    }

    #[test]
    fn filter_counts_are_definitional(g in graph(15), m in 1usize..8) {
        let (x, incident) = high_degree_filter(&g, m);
        prop_assert!(x.iter().all(|&v| g.degree(v) >= m));
        prop_assert_eq!(x.len(), (0..g.n()).filter(|&v| g.degree(v) >= m).count());
        prop_assert!(incident <= x.iter().map(|&v| g.degree(v)).sum::<usize>());
        let direct = g.edges().filter(|&(u, v)| g.degree(u) >= m || g.degree(v) >= m).count();
        prop_assert_eq!(incident, direct);
    }

    #[test]
    fn certificates_are_sound(g in connected_graph(10), m in 1usize..10) {
        let all: Vec<usize> = (0..g.n()).collect();
        let cert = certified_rw_lower_bound(&g, &all, m).unwrap();
        prop_assert!(cert.bound <= rank_width(&g, false).unwrap().width);
        if !cert.applicable() {
            prop_assert_eq!(cert.bound, 0);
        }
    }

    #[test]
    fn membership_bound_holds(n in 1usize..11, k_frac in 0.0f64..=1.0, p in 0.05f64..0.95, seed in any::<u64>()) {
        let k = ((n as f64) * k_frac) as usize;
        let basis = random_subspace(n, k, seed).unwrap();
        let c = check_membership_bound(&BiasedVectorModel::new(n, p).unwrap(), &basis).unwrap();
        prop_assert!(c.holds, "{:?}", c);
    }

    #[test]
    fn tail_threshold_is_minimal(c in 1.01f64..5.0, log_eps in -8.0f64..3.0) {
        let eps = 10f64.powf(log_eps);
        let t = degree_tail_threshold(c, eps).unwrap();
        prop_assert!(degree_tail_sum(c, t.m).1 < eps / 2.0);
        if t.m > 1 {
            prop_assert!(degree_tail_sum(c, t.m - 1).0 >= eps / 2.0);
        }
        prop_assert!(degree_tail_threshold(c, eps * 2.0).unwrap().m <= t.m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn records_round_trip_through_csv(seed in any::<u64>(), regime in 0usize..3) {
        let cfg = match regime {
            0 => RegimeConfig::new(Regime::Dense, 8, 0.4, 3, seed),
            1 => RegimeConfig::with_c(Regime::Subcritical, 2000, 0.7, 3, seed),
            _ => RegimeConfig::with_c(Regime::Supercritical, 200, 2.5, 2, seed),
        }
        .unwrap();
        let recs = run_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        write_records_to(&recs, &mut buf).unwrap();
        prop_assert_eq!(read_records_from(&buf[..]).unwrap(), recs);
    }
}
