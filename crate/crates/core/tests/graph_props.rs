use proptest::prelude::*;

use cclab::graph::{components, is_t_component_set, sample_gnp, Graph, RngSeed, VertexSet};

fn graph_and_subset() -> impl Strategy<Value = (Graph, VertexSet)> {
    (1usize..16).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (prop::collection::vec(any::<bool>(), pairs), prop::collection::vec(any::<bool>(), n)).prop_map(
            move |(edges, members)| {
                let mut it = edges.into_iter();
                let g = Graph::from_fn(n, |_, _| it.next().unwrap());
                let s: VertexSet = (0..n).filter(|&v| members[v]).collect();
                (g, s)
            },
        )
    })
}

proptest! {
    #[test]
    fn components_partition_the_subset((g, s) in graph_and_subset()) {
        let prof = components(&g, &s).unwrap();
        let mut seen: Vec<usize> = prof.components.iter().flat_map(|c| c.members().to_vec()).collect();
        let total = seen.len();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), total);
        prop_assert_eq!(seen, s.members().to_vec());
        prop_assert_eq!(prof.max_order, prof.components.iter().map(|c| c.len()).max().unwrap_or(0));
        // no edge joins two different components
        for (i, a) in prof.components.iter().enumerate() {
            for b in &prof.components[i + 1..] {
                for &u in a.members() {
                    prop_assert!(b.members().iter().all(|&v| !g.has_edge(u, v)));
                }
            }
        }
    }

    #[test]
    fn t_component_sets_are_monotone((g, s) in graph_and_subset(), t in 1usize..6, drop in any::<prop::sample::Index>()) {
        if is_t_component_set(&g, &s, t).unwrap() {
            prop_assert!(is_t_component_set(&g, &s, t + 1).unwrap());
            if !s.is_empty() {
                let gone = s.members()[drop.index(s.len())];
                let sub: VertexSet = s.members().iter().copied().filter(|&v| v != gone).collect();
                prop_assert!(is_t_component_set(&g, &sub, t).unwrap());
            }
        }
    }

    #[test]
    fn sampler_is_reproducible(n in 0usize..40, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let a = sample_gnp(n, p, RngSeed(seed)).unwrap();
        let b = sample_gnp(n, p, RngSeed(seed)).unwrap();
        prop_assert_eq!(a.to_edge_list(), b.to_edge_list());
        prop_assert_eq!(sample_gnp(n, 0.0, RngSeed(seed)).unwrap(), Graph::empty(n));
        prop_assert_eq!(sample_gnp(n, 1.0, RngSeed(seed)).unwrap(), Graph::complete(n));
    }

    #[test]
    fn edge_list_round_trips((g, _) in graph_and_subset()) {
        prop_assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }
}
