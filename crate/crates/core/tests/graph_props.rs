mod common;

use common::{arb_graph, floyd_warshall_diameter};
use hamcover::graph::{Diameter, Graph, VertexSet};
use proptest::prelude::*;

proptest! {
    #[test]
    fn set_neighborhood_is_external_and_attached(g in arb_graph(24), mask in any::<u32>()) {
        let set = VertexSet::from_vertices(g.n(), (0..g.n()).filter(|&v| mask & (1 << v) != 0));
        let nb = g.neighborhood_of_set(&set);
        prop_assert!(nb.is_disjoint(&set));
        for w in nb.iter() {
            prop_assert!(g.neighbors(w).iter().any(|&a| set.contains(a)));
        }
        // every outside neighbor is reported
        for a in set.iter() {
            for &w in g.neighbors(a) {
                prop_assert!(set.contains(w) || nb.contains(w));
            }
        }
        prop_assert_eq!(g.neighborhood_size(&set), nb.len());
    }

    #[test]
    fn diameter_ignores_relabeling(
        (g, perm) in arb_graph(18).prop_flat_map(|g| {
            let n = g.n();
            (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let h = g.permuted(&perm);
        prop_assert_eq!(g.diameter(), h.diameter());
        prop_assert_eq!(g.m(), h.m());
        prop_assert_eq!(g.diameter().finite(), floyd_warshall_diameter(&g));
    }

    #[test]
    fn induced_subgraph_keeps_exactly_internal_edges(g in arb_graph(20), mask in any::<u32>()) {
        let keep = VertexSet::from_vertices(g.n(), (0..g.n()).filter(|&v| mask & (1 << v) != 0));
        let sub = g.induced_subgraph(&keep);
        prop_assert_eq!(sub.graph.n(), keep.len());
        for e in sub.graph.edges() {
            prop_assert!(g.has_edge(sub.to_parent[e.0], sub.to_parent[e.1]));
        }
        let internal = g.edges().filter(|e| keep.contains(e.0) && keep.contains(e.1)).count();
        prop_assert_eq!(sub.graph.m(), internal);
        let all = g.induced_subgraph(&VertexSet::full(g.n()));
        prop_assert_eq!(all.graph, g);
    }

    #[test]
    fn edge_list_roundtrip(g in arb_graph(30)) {
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = Graph::read_edge_list(buf.as_slice()).unwrap();
        let mut again = Vec::new();
        back.write_edge_list(&mut again).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn degree_sum_is_twice_edge_count(g in arb_graph(30)) {
        let total: usize = (0..g.n()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(total, 2 * g.m());
    }
}

#[test]
fn complete_graphs_have_diameter_one() {
    for n in 2..40 {
        assert_eq!(Graph::complete(n).diameter(), Diameter::Finite(1));
    }
}
