mod common;

use atc_core::eval::{gen_queries, generate_graph, plant_attributes, GenConfig, PlantConfig};
use atc_core::graph::{AttrId, Graph, Subgraph, VertexId};
use atc_core::local::{autocomplete_attrs, classify_query, BadReason, QueryClass};
use atc_core::score::attribute_score;
use atc_core::truss::{compute_supports, truss_decompose};
use atc_core::{QuerySpec, Rational};

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn f(g: &Graph, members: &[VertexId], attrs: &[AttrId]) -> Rational {
    attribute_score(&Subgraph::induced(g, members).unwrap(), attrs)
        .unwrap()
        .score()
}

#[test]
fn community_scores_from_the_text() {
    // five members: DB on all, DM on two
    let g = Graph::from_edges(8, &[]).with_attributes(
        (0..5)
            .map(|v| (v, "DB"))
            .chain([(0, "DM"), (1, "DM")])
            .chain((5..8).flat_map(|v| [(v, "DB"), (v, "DM")])),
    );
    let w = [g.attr_id("DB").unwrap(), g.attr_id("DM").unwrap()];
    assert_eq!(f(&g, &[0, 1, 2, 3, 4], &w), r(29, 5));
    // eight members: DB and DM on five each
    let g8 = Graph::from_edges(8, &[])
        .with_attributes((0..5).map(|v| (v, "DB")).chain((3..8).map(|v| (v, "DM"))));
    let w8 = [g8.attr_id("DB").unwrap(), g8.attr_id("DM").unwrap()];
    assert_eq!(f(&g8, &(0..8).collect::<Vec<_>>(), &w8), r(25, 4));
}

#[test]
fn score_is_neither_submodular_nor_supermodular() {
    let (q1, q2, v4, v5, v6) = (0, 1, 2, 3, 4);
    let g = Graph::from_edges(5, &[]).with_attributes([
        (q1, "DB"),
        (q1, "DM"),
        (q2, "DB"),
        (q2, "DM"),
        (v4, "DB"),
        (v5, "DB"),
        (v6, "DB"),
    ]);
    let w = [g.attr_id("DB").unwrap(), g.attr_id("DM").unwrap()];
    let g1 = vec![q1, v4];
    let g2 = vec![q1, v4, v5];
    let gain = |base: &[VertexId], v: VertexId| {
        let mut grown = base.to_vec();
        grown.push(v);
        f(&g, &grown, &w) - f(&g, base, &w)
    };
    assert_eq!(f(&g, &g1, &w), r(5, 2));
    assert_eq!(f(&g, &g2, &w), r(10, 3));
    let (a1, a2) = (gain(&g1, v6), gain(&g2, v6));
    assert_eq!((a1, a2), (r(5, 6), r(11, 12)));
    // a larger base gains more: not submodular
    assert!(a1 < a2);
    let (b1, b2) = (gain(&g1, q2), gain(&g2, q2));
    assert_eq!((b1, b2), (r(11, 6), r(5, 3)));
    // a larger base gains less: not supermodular
    assert!(b1 > b2);
}

#[test]
fn running_example_fragment() {
    let (q1, q2, v1, v2, v3) = (0, 1, 2, 3, 4);
    let mut edges = Vec::new();
    for u in 0..5 {
        for v in u + 1..5 {
            if (u, v) != (q1, q2) && (u, v) != (q2, v3) {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::from_edges(5, &edges);
    let h = Subgraph::full(&g);
    let sup = compute_supports(&h);
    assert_eq!(sup.get(g.edge_id(v1, v2).unwrap()), 3);
    let t = truss_decompose(&h);
    assert_eq!(t.edge[g.edge_id(q1, v1).unwrap() as usize], 4);
    assert_eq!(t.max(), 4);
    assert_eq!(t.vertex[q1 as usize], 4);
    assert_eq!(t.vertex[q2 as usize], 3);
}

#[test]
fn empty_attribute_set_takes_the_union() {
    let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).with_attributes([
        (0, "DB"),
        (0, "DM"),
        (0, "ML"),
        (1, "DB"),
        (1, "DM"),
        (2, "IR"),
    ]);
    let labels: Vec<&str> = autocomplete_attrs(&g, &[0, 1])
        .into_iter()
        .map(|w| g.attr_label(w))
        .collect();
    let mut sorted = labels.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, ["DB", "DM", "ML"]);
}

#[test]
fn nodes_from_separate_communities_get_one_suggestion_each() {
    // two K5s joined through a path 4 - 10 - 5
    let mut edges = Vec::new();
    for block in [0u32, 5] {
        for u in block..block + 5 {
            for v in u + 1..block + 5 {
                edges.push((u, v));
            }
        }
    }
    edges.extend([(4, 10), (10, 5)]);
    let g = Graph::from_edges(11, &edges)
        .with_attributes((0..5).map(|v| (v, "x")).chain((5..10).map(|v| (v, "y"))));
    let q = QuerySpec::new(&[0, 9], &[]).with_kd(4, 2);
    match classify_query(&g, &q).unwrap() {
        QueryClass::Bad {
            reason,
            suggestions,
        } => {
            assert!(matches!(reason, BadReason::Infeasible(_)));
            let nodes: Vec<Vec<VertexId>> = suggestions.iter().map(|s| s.nodes.clone()).collect();
            assert_eq!(nodes, [vec![0], vec![9]]);
            assert_eq!(suggestions[0].attrs, [g.attr_id("x").unwrap()]);
            assert_eq!(suggestions[1].attrs, [g.attr_id("y").unwrap()]);
        }
        QueryClass::Good => panic!("query spans two separate cliques"),
    }
    let good = QuerySpec::new(&[0, 1], &[]).with_kd(4, 2);
    assert_eq!(classify_query(&g, &good).unwrap(), QueryClass::Good);
}

#[test]
fn generated_query_attributes_come_from_the_community() {
    let (g, mut gt) = generate_graph(&GenConfig::default()).unwrap();
    let g = plant_attributes(g, &mut gt, &PlantConfig::default()).unwrap();
    let queries = gen_queries(&g, &gt, 50, (1, 3), 2, 7).unwrap();
    assert_eq!(queries.len(), 50);
    for lq in &queries {
        let c = &gt.communities[lq.community];
        assert!(lq.query.nodes.iter().all(|v| c.members.contains(v)));
        assert!(!lq.query.attrs.is_empty());
        assert!(lq.query.attrs.iter().all(|w| c.attrs.contains(w)));
    }
}
