use cellfree::channel::{best_bs, channel_gains, sinr_approx, sum_rate, RadioParams};
use cellfree::clustering::{
    kmeans_rows, symmetric_eigen, temporal_smoothed_partition, trace_objective, KMeansParams, Partition,
    SpectralConfig,
};
use cellfree::graph::{build_graph, cut_value, sum_cut};
use cellfree::metrics::handover_count;
use cellfree::oracle::{enumerate_partitions, EnumerationBudget};
use cellfree::topology::{generate_layout, step_waypoint, Layout, MobilityParams};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn labels_strategy(l: usize, m: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..m, l).prop_filter("every label used", move |v| (0..m).all(|g| v.contains(&g)))
}

fn anchored(layout: &Layout, labels: Vec<usize>, m: usize) -> (cellfree::channel::ChannelGains, Partition) {
    let g = channel_gains(layout, &RadioParams::default(), None);
    let anchors = (0..layout.num_users()).map(|k| best_bs(&g, k)).collect();
    (g, Partition::new(labels, m, anchors).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn waypoint_step_contract(users in 1usize..20, bss in 1usize..6, seed in any::<u64>(), max in 0.0f64..1.0) {
        let layout = generate_layout(users, bss, seed).unwrap();
        let params = MobilityParams { max_transition: max, ..Default::default() };
        let next = step_waypoint(&layout, &params, seed ^ 1).unwrap();
        next.validate().unwrap();
        prop_assert_eq!(&next.bs_positions, &layout.bs_positions);
        for (a, b) in layout.user_positions.iter().zip(&next.user_positions) {
            prop_assert!(a.distance(b) <= max + 1e-12);
        }
        prop_assert_eq!(next, step_waypoint(&layout, &params, seed ^ 1).unwrap());
    }

    #[test]
    fn sum_rate_ignores_label_names(seed in any::<u64>(), labels in labels_strategy(6, 3), perm in Just([2usize, 0, 1])) {
        let layout = generate_layout(5, 6, seed).unwrap();
        let (g, p) = anchored(&layout, labels.clone(), 3);
        let renamed = Partition::new(labels.iter().map(|&l| perm[l]).collect(), 3, p.anchors().to_vec()).unwrap();
        let a = sum_rate(&g, &p, &RadioParams::default()).unwrap();
        let b = sum_rate(&g, &renamed, &RadioParams::default()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn absorbing_an_interferer_never_hurts(seed in any::<u64>(), labels in labels_strategy(6, 3), mover in 0usize..6) {
        let layout = generate_layout(8, 6, seed).unwrap();
        let params = RadioParams::default();
        let (g, p) = anchored(&layout, labels.clone(), 3);
        // Move `mover` into subnetwork 0 when that leaves its old group nonempty.
        let old = labels[mover];
        prop_assume!(old != 0 && labels.iter().filter(|&&l| l == old).count() > 1);
        let mut moved = labels.clone();
        moved[mover] = 0;
        let q = Partition::new(moved, 3, p.anchors().to_vec()).unwrap();
        for k in p.users_in(0) {
            prop_assert!(sinr_approx(&g, &q, k, &params).unwrap() >= sinr_approx(&g, &p, k, &params).unwrap());
        }
    }

    #[test]
    fn doubling_power_raises_interfered_sinr(seed in any::<u64>()) {
        let layout = generate_layout(4, 5, seed).unwrap();
        let (g, p) = anchored(&layout, vec![0, 1, 0, 1, 1], 2);
        let lo = RadioParams::default();
        let hi = RadioParams { pt_over_sigma2: 2.0, ..lo };
        for k in 0..4 {
            prop_assert!(sinr_approx(&g, &p, k, &hi).unwrap() > sinr_approx(&g, &p, k, &lo).unwrap());
        }
    }

    #[test]
    fn trace_identity_and_cut_symmetry(seed in any::<u64>(), users in 0usize..15, labels in labels_strategy(7, 3)) {
        let layout = generate_layout(users.max(1), 7, seed).unwrap();
        let graph = build_graph(&channel_gains(&layout, &RadioParams::default(), None));
        let p = Partition::new(labels.clone(), 3, graph.anchors().to_vec()).unwrap();
        let cut = sum_cut(&graph, &p);
        let tr = trace_objective(graph.laplacian(), &labels, 3);
        prop_assert!((cut - tr).abs() <= 1e-9 * cut.max(1e-300));
        let subset = p.bs_in(1);
        let complement: Vec<usize> = (0..7).filter(|i| !subset.contains(i)).collect();
        let (a, b) = (cut_value(&graph, &subset), cut_value(&graph, &complement));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn laplacian_is_psd(seed in any::<u64>(), users in 1usize..40, bss in 2usize..30) {
        let layout = generate_layout(users, bss, seed).unwrap();
        let graph = build_graph(&channel_gains(&layout, &RadioParams::default(), None));
        let e = symmetric_eigen(graph.laplacian()).unwrap();
        prop_assert!(e.values[0] >= -1e-8 * graph.laplacian().amax().max(1.0));
        for i in 0..bss {
            prop_assert!(graph.laplacian().row(i).sum().abs() < 1e-9 * graph.laplacian().amax().max(1.0));
        }
    }

    #[test]
    fn spectral_partitions_are_valid(seed in any::<u64>(), alpha in 0.0f64..=1.0, m in 1usize..8) {
        let layout = generate_layout(12, 10, seed).unwrap();
        let next = step_waypoint(&layout, &MobilityParams::default(), seed.wrapping_add(1)).unwrap();
        let params = RadioParams::default();
        let g0 = build_graph(&channel_gains(&layout, &params, None));
        let g1 = build_graph(&channel_gains(&next, &params, None));
        let p = temporal_smoothed_partition(&g0, &g1, &SpectralConfig::new(alpha, m, seed)).unwrap();
        p.validate().unwrap();
        prop_assert_eq!(p.anchors(), g1.anchors());
        prop_assert_eq!(handover_count(&p, &p).unwrap(), 0);
    }

    #[test]
    fn kmeans_fills_every_cluster(seed in any::<u64>(), n in 1usize..30, k in 1usize..10) {
        prop_assume!(k <= n);
        let mut rng = cellfree::rng::rng_from_seed(seed);
        use rand::Rng;
        let y = DMatrix::from_fn(n, 3, |_, _| (rng.random::<f64>() * 4.0).floor());
        let r = kmeans_rows(&y, k, &KMeansParams::default(), seed).unwrap();
        let mut distinct = r.labels.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(distinct, (0..k).collect::<Vec<_>>());
    }
}

#[test]
fn whole_network_maximizes_sum_rate() {
    let params = RadioParams::default();
    let budget = EnumerationBudget { max_vertices: 6, max_subnetworks: 6 };
    for seed in 0..20 {
        let layout = generate_layout(5, 6, seed).unwrap();
        let g = channel_gains(&layout, &params, None);
        let anchors: Vec<usize> = (0..5).map(|k| best_bs(&g, k)).collect();
        let whole = sum_rate(&g, &Partition::new(vec![0; 6], 1, anchors.clone()).unwrap(), &params).unwrap();
        for m in 1..=6 {
            for labels in enumerate_partitions(6, m, &budget).unwrap() {
                let p = Partition::new(labels, m, anchors.clone()).unwrap();
                assert!(sum_rate(&g, &p, &params).unwrap() <= whole + 1e-12);
            }
        }
    }
}
