//! Hand-worked five- and six-node scenarios with scripted test outcomes.

mod common;

use common::*;
use stablepc::learner::SkeletonMethod;
use stablepc::orientation::{
    apply_rules_list, apply_rules_sequential, classify_triples, orient_vstructures_list,
    orient_vstructures_sequential, TripleLabel, VStructureDecisions, VStructureRule,
};
use stablepc::{learn, pc_skeleton, pc_stable_skeleton, CiTester, MixedGraph, UnshieldedTriple, Variant};

fn skeleton_fig_b() -> MixedGraph {
    graph(5, &[(1, 4), (1, 5), (1, 3), (2, 5), (2, 3), (4, 5), (3, 5)], &[], &[])
}

#[test]
fn original_skeleton_depends_on_order() {
    let ci = CiTester::new(skeleton_example_oracle());
    let r1 = pc_skeleton(&ci, 5, &order(&[1, 4, 2, 3, 5])).unwrap();
    assert_eq!(r1.graph, skeleton_fig_b());
    let r2 = pc_skeleton(&CiTester::new(skeleton_example_oracle()), 5, &order(&[1, 3, 4, 2, 5])).unwrap();
    let mut with_extra = skeleton_fig_b();
    with_extra.add_undirected(1, 3).unwrap();
    assert_eq!(r2.graph, with_extra);
    // the spurious independence removed X3 - X4 in both runs
    assert!(!r1.graph.is_adjacent(2, 3) && !r2.graph.is_adjacent(2, 3));
}

#[test]
fn stable_skeleton_is_the_same_for_both_orders() {
    for o in [[1, 4, 2, 3, 5], [1, 3, 4, 2, 5]] {
        let r = pc_stable_skeleton(&CiTester::new(skeleton_example_oracle()), 5, &order(&o)).unwrap();
        assert_eq!(r.graph, skeleton_fig_b(), "order {o:?}");
        assert_eq!(r.sepsets.get(0, 1), Some(&[][..]));
        assert_eq!(r.sepsets.get(1, 3), Some(&[0, 2][..]));
        assert_eq!(r.sepsets.get(2, 3), Some(&[0, 4][..]));
        assert_eq!(r.levels.iter().map(|l| l.deletions).collect::<Vec<_>>(), vec![1, 0, 2, 0]);
    }
}

#[test]
fn oracle_sepsets_vary_but_vstructure_does_not() {
    let oracle = || CiTester::new(stablepc::DSepOracle::new(five_node_dag_b()));
    let r3 = pc_skeleton(&oracle(), 5, &order(&[1, 4, 2, 3, 5])).unwrap();
    let r4 = pc_skeleton(&oracle(), 5, &order(&[1, 4, 3, 2, 5])).unwrap();
    assert_eq!(r3.sepsets.get(0, 3), Some(&[1][..]));
    assert_eq!(r4.sepsets.get(0, 3), Some(&[2][..]));
    let cpdag = graph(5, &[(1, 2), (2, 3), (3, 4)], &[(1, 5), (4, 5)], &[]);
    for (o, r) in [([1, 4, 2, 3, 5], r3), ([1, 4, 3, 2, 5], r4)] {
        assert_eq!(r.graph, cpdag.skeleton());
        let d = VStructureDecisions::from_sepsets(&r.graph, &r.sepsets).unwrap();
        let g = orient_vstructures_sequential(&r.graph, &d, &order(&o));
        assert_eq!(apply_rules_sequential(&g, &order(&o), None), cpdag);
    }
}

#[test]
fn spurious_sepset_gives_order_dependent_vstructure() {
    let cfg = Variant::Pc.config(0.05);
    let run = |o: &[usize]| {
        learn(&CiTester::new(sepset_example_oracle()), 5, &cfg.clone().with_order(order(o)))
            .unwrap()
            .graph
    };
    let wrong = graph(5, &[(3, 4)], &[(1, 2), (3, 2), (1, 5), (4, 5)], &[]);
    let right = graph(5, &[(1, 2), (2, 3), (3, 4)], &[(1, 5), (4, 5)], &[]);
    assert_eq!(run(&[1, 3, 4, 2, 5]), wrong);
    assert_eq!(run(&[3, 1, 2, 4, 5]), right);
}

#[test]
fn conservative_and_majority_rules_on_the_sepset_example() {
    let ci = CiTester::new(sepset_example_oracle());
    let skel = pc_stable_skeleton(&ci, 5, &order(&[1, 2, 3, 4, 5])).unwrap().graph;
    let t = UnshieldedTriple::new(0, 1, 2);
    for (rule, label) in [
        (VStructureRule::Conservative, TripleLabel::Ambiguous),
        (VStructureRule::Majority, TripleLabel::UnambiguousNonVStructure),
    ] {
        let cls = classify_triples(&skel, &ci, rule).unwrap();
        let c = cls.iter().find(|c| c.triple == t).unwrap();
        // separating sets {X2}, {X4}, {X2, X4}
        assert_eq!((c.sepset_hits, c.sepset_total), (2, 3));
        assert_eq!(c.label, label);
    }

    let expected = graph(5, &[(1, 2), (2, 3), (3, 4)], &[(1, 5), (4, 5)], &[]);
    for v in [Variant::CpcStable, Variant::MpcStable, Variant::LcpcStable, Variant::LmpcStable] {
        for o in [[1, 3, 4, 2, 5], [3, 1, 2, 4, 5], [5, 4, 3, 2, 1]] {
            let cfg = v.config(0.05).with_order(order(&o));
            let r = learn(&CiTester::new(sepset_example_oracle()), 5, &cfg).unwrap();
            assert_eq!(r.graph, expected, "{v} with order {o:?}");
            assert_eq!(v.skeleton(), SkeletonMethod::Stable);
        }
    }
}

#[test]
fn conflicting_vstructures_overwrite_or_become_bidirected() {
    let skel = graph(4, &[(1, 2), (2, 3), (3, 4)], &[], &[]);
    let mut sep = stablepc::SepsetMap::new();
    for (a, b) in [(0, 2), (1, 3), (0, 3)] {
        sep.insert(a, b, &[]);
    }
    let d = VStructureDecisions::from_sepsets(&skel, &sep).unwrap();
    assert_eq!(d.vstructures.len(), 2);

    // (X2, X3, X4) handled last
    let natural = orient_vstructures_sequential(&skel, &d, &order(&[1, 2, 3, 4]));
    assert_eq!(natural, graph(4, &[], &[(1, 2), (2, 3), (4, 3)], &[]));
    // (X1, X2, X3) handled last
    let reversed = orient_vstructures_sequential(&skel, &d, &order(&[4, 3, 2, 1]));
    assert_eq!(reversed, graph(4, &[], &[(1, 2), (3, 2), (4, 3)], &[]));

    let listed = graph(4, &[], &[(1, 2), (4, 3)], &[(2, 3)]);
    assert_eq!(orient_vstructures_list(&skel, &d), listed);
    assert_eq!(apply_rules_list(&listed, None), listed);
}

#[test]
fn rule_one_overwrite_or_bidirected() {
    let after_step2 = graph(6, &[(2, 5)], &[(1, 2), (3, 2), (4, 5), (6, 5)], &[]);
    let natural = apply_rules_sequential(&after_step2, &order(&[1, 2, 3, 4, 5, 6]), None);
    assert_eq!(natural, graph(6, &[], &[(1, 2), (3, 2), (4, 5), (6, 5), (2, 5)], &[]));
    let four_first = apply_rules_sequential(&after_step2, &order(&[4, 5, 6, 1, 2, 3]), None);
    assert_eq!(four_first, graph(6, &[], &[(1, 2), (3, 2), (4, 5), (6, 5), (5, 2)], &[]));

    let listed = apply_rules_list(&after_step2, None);
    assert_eq!(listed, graph(6, &[], &[(1, 2), (3, 2), (4, 5), (6, 5)], &[(2, 5)]));
}

#[test]
fn list_variants_give_bidirected_conflicts_end_to_end() {
    // scripted so that Step 1 returns the path X1 - X2 - X3 - X4 with empty sepsets
    let mut m = stablepc::MockOracle::new(4);
    for (a, b) in [(0, 2), (1, 3), (0, 3)] {
        m = m.independent(a, b, &[]).unwrap();
    }
    let expected = graph(4, &[], &[(1, 2), (4, 3)], &[(2, 3)]);
    for o in [[1, 2, 3, 4], [4, 3, 2, 1], [2, 4, 1, 3]] {
        let cfg = Variant::LpcStable.config(0.05).with_order(order(&o));
        let r = learn(&CiTester::new(m.clone()), 4, &cfg).unwrap();
        assert_eq!(r.graph, expected);
        assert_eq!(r.stats.bidirected_edges, 1);
    }
}
