//! Test corpora: small strongly connected digraphs up to isomorphism,
//! seeded random digraphs and seeded random imperfect-information parity
//! games.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::Digraph;
use crate::parity::{ObservationEquiv, ParityGame};

pub const DEFAULT_SEED: u64 = 2009;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn adjacency_code(n: usize, edges: &[(usize, usize)], perm: &[usize]) -> u64 {
    edges.iter().fold(0u64, |acc, &(u, v)| acc | 1 << (perm[u] * n + perm[v]))
}

/// Smallest adjacency code over all relabelings; small `n` only.
pub fn canonical_code(g: &Digraph) -> u64 {
    let edges = g.edges();
    permutations(g.n()).iter().map(|p| adjacency_code(g.n(), &edges, p)).min().unwrap_or(0)
}

/// Every strongly connected digraph without self-loops on `n` vertices,
/// one per isomorphism class, in increasing canonical code.
pub fn strongly_connected_up_to_iso(n: usize) -> Vec<Digraph> {
    assert!(n <= 5, "exhaustive enumeration is limited to 5 vertices");
    if n == 0 {
        return Vec::new();
    }
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = std::collections::BTreeMap::new();
    for mask in 0u64..(1 << slots.len()) {
        let edges: Vec<_> = slots.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let code = perms.iter().map(|p| adjacency_code(n, &edges, p)).min().unwrap_or(0);
        if seen.contains_key(&code) {
            continue;
        }
        let g = Digraph::from_edges(n, &edges).expect("in range");
        if g.is_strongly_connected() {
            seen.insert(code, g);
        } else {
            seen.insert(code, Digraph::new(0).expect("empty"));
        }
    }
    seen.into_values().filter(|g| g.n() == n).collect()
}

/// Random digraph: each ordered pair of distinct vertices is an edge with
/// probability `p`.
pub fn random_digraph(n: usize, p: f64, rng: &mut impl Rng) -> Digraph {
    let mut g = Digraph::new(n).expect("caller bounds n");
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                g.add_edge(u, v).expect("in range");
            }
        }
    }
    g
}

/// `count` strongly connected random digraphs on `n` vertices, by rejection.
pub fn random_strongly_connected(n: usize, count: usize, p: f64, seed: u64) -> Vec<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = random_digraph(n, p, &mut rng);
        if g.is_strongly_connected() {
            out.push(g);
        }
    }
    out
}

/// The graph corpus: all strongly connected digraphs with at most `nmax`
/// vertices (`nmax <= 4`) up to isomorphism, then `random` seeded strongly
/// connected digraphs on 5 vertices.
pub fn graph_corpus(nmax: usize, random: usize, seed: u64) -> Vec<Digraph> {
    let mut out: Vec<Digraph> = (1..=nmax.min(4)).flat_map(strongly_connected_up_to_iso).collect();
    out.extend(random_strongly_connected(5, random, 0.4, seed));
    out
}

/// Symmetric graphs among the exhaustive part of the corpus.
pub fn symmetric_corpus(nmax: usize) -> Vec<Digraph> {
    (1..=nmax.min(4)).flat_map(strongly_connected_up_to_iso).filter(|g| g.is_symmetric()).collect()
}

/// A random parity game with observable colors and owner-homogeneous
/// classes of size at most `class_max`. Player 0 chooses among actions,
/// player 1 among all moves; every position has a move.
pub fn random_parity_game(n: usize, colors: u32, class_max: usize, rng: &mut impl Rng) -> (ParityGame, ObservationEquiv) {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < n {
        let size = rng.gen_range(1..=class_max.max(1)).min(n - i);
        let mut c = order[i..i + size].to_vec();
        c.sort_unstable();
        classes.push(c);
        i += size;
    }
    let mut color = vec![0u32; n];
    let mut owner = vec![0u8; n];
    for c in &classes {
        let col = rng.gen_range(0..colors.max(1));
        let own = rng.gen_range(0..2u8);
        for &v in c {
            color[v] = col;
            owner[v] = own;
        }
    }
    let actions = vec!["a".to_string(), "b".to_string()];
    let mut moves = Vec::new();
    for c in &classes {
        // Actions available to player 0 are the same across a class.
        let available: Vec<usize> = if owner[c[0]] == 0 {
            let both = rng.gen_bool(0.6);
            if both { vec![0, 1] } else { vec![rng.gen_range(0..2)] }
        } else {
            vec![0]
        };
        for &v in c {
            for &a in &available {
                let targets = rng.gen_range(1..=2);
                for _ in 0..targets {
                    moves.push((v, a, rng.gen_range(0..n)));
                }
            }
        }
    }
    moves.sort_unstable();
    moves.dedup();
    let init = rng.gen_range(0..n);
    let pg = ParityGame::new(n, actions, owner, color, moves, init).expect("generator respects bounds");
    let eq = ObservationEquiv::from_classes(n, &classes).expect("generator builds a partition");
    (pg, eq)
}

/// `count` seeded parity games with 2..=`nmax` positions.
pub fn parity_corpus(count: usize, nmax: usize, seed: u64) -> Vec<(ParityGame, ObservationEquiv)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=nmax.max(2));
            random_parity_game(n, 3, 2, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_code_is_invariant() {
        let g = Digraph::from_edges(3, &[(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap();
        let h = g.permuted(&[2, 0, 1]);
        assert_eq!(canonical_code(&g), canonical_code(&h));
    }

    #[test]
    fn random_is_seeded() {
        let a = random_strongly_connected(5, 3, 0.4, 7);
        let b = random_strongly_connected(5, 3, 0.4, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(Digraph::is_strongly_connected));
    }

    #[test]
    fn parity_generator_respects_bounds() {
        for (pg, eq) in parity_corpus(20, 8, 1) {
            assert!(pg.n() <= 8);
            assert!(eq.max_class_size() <= 2);
            assert!(crate::parity::validate(&pg, &eq).is_empty());
        }
    }
}
