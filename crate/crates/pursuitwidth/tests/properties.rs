use std::collections::{HashMap, VecDeque};

use proptest::prelude::*;
use pursuitwidth::arena::{solve_search, width, Measure, SearchConfig, Winner, DEFAULT_BUDGET};
use pursuitwidth::corpus::{random_parity_game, strongly_connected_up_to_iso};
use pursuitwidth::families::{clique, lex_product};
use pursuitwidth::multiply::{multiplier_from_solver, verify_multiplier};
use pursuitwidth::parity::{verify_solution, winners_by_enumeration, zielonka_solve, ParityGame};
use pursuitwidth::{Digraph, VertexSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let edges: Vec<_> = (0..n * n).filter(|&i| bits[i] && i / n != i % n).map(|i| (i / n, i % n)).collect();
            Digraph::from_edges(n, &edges).unwrap()
        })
    })
}

fn strongly_connected(max_n: usize) -> impl Strategy<Value = Digraph> {
    graph(max_n).prop_filter("strongly connected", Digraph::is_strongly_connected)
}

fn subset(n: usize) -> impl Strategy<Value = VertexSet> {
    any::<u64>().prop_map(move |b| VertexSet::from_bits(b & VertexSet::full(n).bits()))
}

/// Breadth-first reachability over an adjacency list, avoiding `blocked`.
fn bfs(g: &Digraph, blocked: u64, from: u64) -> u64 {
    let adj: Vec<Vec<usize>> = (0..g.n()).map(|u| (0..g.n()).filter(|&v| g.has_edge(u, v)).collect()).collect();
    let mut seen = from & !blocked;
    let mut queue: VecDeque<usize> = (0..g.n()).filter(|&v| seen >> v & 1 == 1).collect();
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if blocked >> v & 1 == 0 && seen >> v & 1 == 0 {
                seen |= 1 << v;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Plain least-fixpoint solution of the monotone game: cops win at
/// `(u, r)` if they can announce a monotone move after which every robber
/// answer is again a win (an empty answer is a capture).
fn cops_win_oracle(g: &Digraph, k: usize, r: usize) -> bool {
    let n = g.n();
    let masks: Vec<u64> = (0..1u64 << n).collect();
    let cop_sets: Vec<u64> = masks.iter().copied().filter(|m| m.count_ones() as usize <= k).collect();
    let robber_sets: Vec<u64> = masks.iter().copied().filter(|m| *m != 0 && m.count_ones() as usize <= r).collect();
    let mut win: HashMap<(u64, u64), bool> = HashMap::new();
    for &u in &cop_sets {
        for &rs in &robber_sets {
            if rs & u == 0 {
                win.insert((u, rs), false);
            }
        }
    }
    loop {
        let mut changed = false;
        let keys: Vec<(u64, u64)> = win.iter().filter(|(_, &w)| !w).map(|(&k, _)| k).collect();
        for (u, rs) in keys {
            let good = cop_sets.iter().any(|&u2| {
                let region = bfs(g, u & u2, rs) & !u2;
                let monotone = (u & !u2) & bfs(g, u & u2, rs) == 0;
                monotone
                    && robber_sets
                        .iter()
                        .filter(|&&r2| r2 & !region == 0)
                        .all(|&r2| win.get(&(u2, r2)).copied().unwrap_or(false))
            });
            if good {
                win.insert((u, rs), true);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    robber_sets.iter().all(|&rs| win[&(0, rs)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reach_matches_bfs(g in graph(8), x in any::<u64>(), y in any::<u64>()) {
        let full = VertexSet::full(g.n()).bits();
        let (x, y) = (x & full, y & full);
        prop_assert_eq!(g.reach_excluding(VertexSet::EMPTY, VertexSet::from_bits(y)).bits(), bfs(&g, 0, y));
        prop_assert_eq!(g.reach_excluding(VertexSet::from_bits(x), VertexSet::from_bits(y)).bits(), bfs(&g, x, y));
    }

    #[test]
    fn reach_monotone_in_targets_antitone_in_blockers(g in graph(8), x in subset(8), y in subset(8), extra in subset(8)) {
        let full = VertexSet::full(g.n());
        let (x, y, extra) = (x.intersection(full), y.intersection(full), extra.intersection(full));
        let base = g.reach_excluding(x, y);
        prop_assert!(base.is_subset(g.reach_excluding(x, y.union(extra))));
        prop_assert!(g.reach_excluding(x.union(extra), y).is_subset(base));
        prop_assert!(y.difference(x).is_subset(base));
    }

    #[test]
    fn scc_blocks_are_topologically_ordered(g in graph(8), x in subset(8)) {
        let x = x.intersection(VertexSet::full(g.n()));
        let sccs = pursuitwidth::digraph::Sccs::excluding(&g, x);
        let blocks = sccs.blocks();
        for (i, &a) in blocks.iter().enumerate() {
            let v = a.min().unwrap();
            prop_assert_eq!(g.reach_excluding(x, VertexSet::singleton(v)).intersection(g.coreach_excluding(x, VertexSet::singleton(v))), a);
            for &b in &blocks[i + 1..] {
                let w = b.min().unwrap();
                prop_assert!(!g.reach_excluding(x, VertexSet::singleton(w)).contains(v), "later block reaches earlier one");
            }
        }
        let covered = blocks.iter().fold(VertexSet::EMPTY, |acc, &b| acc.union(b));
        prop_assert_eq!(covered, VertexSet::full(g.n()).difference(x));
    }

    #[test]
    fn symmetric_closure_is_idempotent(g in graph(8)) {
        let s = g.symmetric_closure();
        prop_assert!(s.is_symmetric());
        prop_assert_eq!(s.symmetric_closure().edges(), s.edges());
        for (u, v) in g.edges() {
            prop_assert!(s.has_edge(u, v) && s.has_edge(v, u));
        }
    }

    #[test]
    fn edge_list_round_trip(g in graph(8)) {
        let text = g.emit_edge_list();
        let h = Digraph::parse_edge_list(&text).unwrap();
        prop_assert_eq!(h.edges(), g.edges());
        prop_assert_eq!(h.emit_edge_list(), text);
    }

    #[test]
    fn lex_product_edge_count(a in graph(4), b in graph(4)) {
        let p = lex_product(&a, &b).unwrap();
        let expected = a.edge_count() * b.n() * b.n() + a.n() * b.edge_count()
            - (0..a.n()).filter(|&v| a.has_edge(v, v)).count() * b.edge_count();
        prop_assert_eq!(p.edge_count(), expected);
        prop_assert_eq!(p.n(), a.n() * b.n());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn solver_agrees_with_fixpoint_oracle(g in graph(4), k in 1usize..=2, r in 1usize..=2) {
        let res = solve_search(&g, &SearchConfig::visible(k, r)).unwrap();
        prop_assert_eq!(res.winner == Winner::Cops, cops_win_oracle(&g, k, r));
    }

    #[test]
    fn multiplied_strategy_wins(g in strongly_connected(5), r in 2usize..=3) {
        let k = width(&g, Measure::Dw, 1, DEFAULT_BUDGET).unwrap();
        let m = multiplier_from_solver(&g, k, r, DEFAULT_BUDGET).unwrap().unwrap();
        let v = verify_multiplier(&g, &m, DEFAULT_BUDGET).unwrap();
        prop_assert!(v.passed, "{:?}", v.failure);
        prop_assert!(v.max_cops <= r * k);
    }

    #[test]
    fn zielonka_matches_enumeration(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pg, _) = random_parity_game(n, 4, 2, &mut rng);
        let (sol, arena, z) = zielonka_solve(&pg).unwrap();
        prop_assert!(verify_solution(&arena, &z).is_ok());
        prop_assert_eq!(winners_by_enumeration(&pg), sol.winner);
    }

    #[test]
    fn parity_file_round_trip(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pg, _) = random_parity_game(n, 3, 2, &mut rng);
        prop_assert_eq!(ParityGame::parse(&pg.emit()).unwrap(), pg);
    }
}

#[test]
fn strongly_connected_counts_up_to_isomorphism() {
    let counts: Vec<usize> = (1..=4).map(|n| strongly_connected_up_to_iso(n).len()).collect();
    assert_eq!(counts, vec![1, 1, 5, 83]);
}

#[test]
fn widths_of_small_named_graphs() {
    let c3 = Digraph::cycle(3).unwrap();
    assert_eq!(width(&c3, Measure::Dw, 1, DEFAULT_BUDGET).unwrap(), 2);
    assert_eq!(width(&Digraph::new(1).unwrap(), Measure::Dw, 1, DEFAULT_BUDGET).unwrap(), 1);
    // A clique needs every vertex in both games; tree-width of K_4 is 3.
    let k4 = clique(4).unwrap();
    assert_eq!(width(&k4, Measure::Dw, 1, DEFAULT_BUDGET).unwrap(), 4);
    assert_eq!(width(&k4, Measure::Dpw, 1, DEFAULT_BUDGET).unwrap(), 4);
    assert_eq!(width(&k4, Measure::Tw, 1, DEFAULT_BUDGET).unwrap(), 3);
}
