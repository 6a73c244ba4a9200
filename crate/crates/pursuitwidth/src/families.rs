//! Graph families with known width gaps and their explicit strategies:
//! full trees, the lexicographic product, the two-tree graph where cops
//! confined to the robber's component need many more cops, and trees
//! blown up by cliques.

use std::collections::HashMap;

use crate::arena::robber_region;
use crate::digraph::{Digraph, VertexSet};
use crate::error::{Error, Result};
use crate::strategy::{CopPolicy, RobberPolicy};

/// Names of tree vertices: words over `1..=branching` (the root is the
/// empty word), optionally in the primed copy. Ids are dense, unprimed
/// words first, each copy in level order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeCoords {
    pub branching: usize,
    pub height: usize,
    words: Vec<Vec<u8>>,
    primed: Vec<bool>,
    index: HashMap<(Vec<u8>, bool), usize>,
}

impl TreeCoords {
    fn new(branching: usize, height: usize, copies: usize) -> Self {
        let mut level = vec![Vec::new()];
        let mut all = Vec::new();
        for _ in 0..height {
            all.extend(level.iter().cloned());
            level = level
                .iter()
                .flat_map(|w: &Vec<u8>| {
                    (1..=branching as u8).map(move |j| {
                        let mut c = w.clone();
                        c.push(j);
                        c
                    })
                })
                .collect();
        }
        let mut words = Vec::new();
        let mut primed = Vec::new();
        for copy in 0..copies {
            words.extend(all.iter().cloned());
            primed.extend(std::iter::repeat_n(copy == 1, all.len()));
        }
        let index = words.iter().cloned().zip(primed.iter().copied()).enumerate().map(|(i, k)| (k, i)).collect();
        TreeCoords { branching, height, words, primed, index }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &[u8], primed: bool) -> Option<usize> {
        self.index.get(&(word.to_vec(), primed)).copied()
    }

    pub fn word(&self, v: usize) -> &[u8] {
        &self.words[v]
    }

    pub fn is_primed(&self, v: usize) -> bool {
        self.primed[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.words[v].len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        let w = &self.words[v];
        if w.is_empty() {
            return None;
        }
        self.id(&w[..w.len() - 1], self.primed[v])
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (1..=self.branching as u8)
            .filter_map(|j| {
                let mut c = self.words[v].clone();
                c.push(j);
                self.id(&c, self.primed[v])
            })
            .collect()
    }

    /// The same word in the other copy.
    pub fn twin(&self, v: usize) -> Option<usize> {
        self.id(&self.words[v], !self.primed[v])
    }

    /// Non-strict ancestor order within one copy.
    pub fn is_ancestor(&self, a: usize, v: usize) -> bool {
        self.primed[a] == self.primed[v] && self.words[v].starts_with(&self.words[a])
    }

    pub fn label(&self, v: usize) -> String {
        let mark = if self.primed[v] { "'" } else { "" };
        if self.words[v].is_empty() {
            return format!("ε{mark}");
        }
        self.words[v].iter().map(|j| format!("{j}{mark}")).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|v| self.label(v)).collect()
    }
}

fn vertex_count(branching: usize, height: usize) -> usize {
    (0..height).map(|i| branching.pow(i as u32)).sum()
}

fn check_size(n: usize) -> Result<()> {
    if n > crate::digraph::MAX_VERTICES {
        return Err(Error::TooLarge(n));
    }
    Ok(())
}

/// Full tree with symmetric parent-child edges; a single vertex has height 1.
pub fn full_tree(branching: usize, height: usize) -> Result<(Digraph, TreeCoords)> {
    if branching == 0 || height == 0 {
        return Err(Error::Config("tree branching and height must be at least 1".into()));
    }
    check_size(vertex_count(branching, height))?;
    let coords = TreeCoords::new(branching, height, 1);
    let mut g = Digraph::new(coords.len())?;
    for v in 0..coords.len() {
        if let Some(p) = coords.parent(v) {
            g.add_edge(p, v)?;
            g.add_edge(v, p)?;
        }
    }
    g.set_labels(coords.labels());
    Ok((g, coords))
}

/// Symmetric clique without self-loops.
pub fn clique(k: usize) -> Result<Digraph> {
    let mut g = Digraph::new(k)?;
    for u in 0..k {
        for v in 0..k {
            if u != v {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Vertex `(v, w)` gets id `v * |V2| + w`.
pub fn lex_product(g1: &Digraph, g2: &Digraph) -> Result<Digraph> {
    let (n1, n2) = (g1.n(), g2.n());
    check_size(n1 * n2)?;
    let mut g = Digraph::new(n1 * n2)?;
    for v1 in 0..n1 {
        for w1 in 0..n2 {
            for v2 in 0..n1 {
                for w2 in 0..n2 {
                    if g1.has_edge(v1, v2) || (v1 == v2 && g2.has_edge(w1, w2)) {
                        g.add_edge(v1 * n2 + w1, v2 * n2 + w2)?;
                    }
                }
            }
        }
    }
    Ok(g)
}

/// Two copies of the full tree with `n` children per node and words up to
/// length `n + 1`: the first with edges both ways, the second directed to
/// its root, plus edges from each word to its primed twin and from each
/// primed nonroot word to the unprimed parent. The primed root is a sink,
/// so the graph is not strongly connected; every vertex reaches that sink.
pub fn gen_two_trees(n: usize) -> Result<(Digraph, TreeCoords)> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    check_size(2 * vertex_count(n, n + 2))?;
    let coords = TreeCoords::new(n, n + 2, 2);
    let mut g = Digraph::new(coords.len())?;
    for v in 0..coords.len() {
        let parent = coords.parent(v);
        if coords.is_primed(v) {
            if let Some(p) = parent {
                g.add_edge(v, p)?;
                g.add_edge(v, coords.twin(p).expect("both copies"))?;
            }
        } else {
            if let Some(p) = parent {
                g.add_edge(v, p)?;
                g.add_edge(p, v)?;
            }
            g.add_edge(v, coords.twin(v).expect("both copies"))?;
        }
    }
    g.set_labels(coords.labels());
    let sink = coords.id(&[], true).expect("primed root");
    debug_assert!(g.succ(sink).is_empty());
    debug_assert_eq!(g.coreach_excluding(VertexSet::EMPTY, VertexSet::singleton(sink)), g.vertices());
    Ok((g, coords))
}

pub fn grk_tree_shape(r: usize) -> (usize, usize) {
    (r.div_ceil(2) + 2, r + 1)
}

/// The tree for `r` robbers blown up by `K_k`; tree vertex `t` becomes the
/// block `t*k .. t*k + k`.
pub fn gen_grk(r: usize, k: usize) -> Result<Digraph> {
    if r == 0 || k == 0 {
        return Err(Error::Config("r and k must be at least 1".into()));
    }
    let (b, h) = grk_tree_shape(r);
    let (t, _) = full_tree(b, h)?;
    lex_product(&t, &clique(k)?)
}

/// Four cops sweeping both trees top-down: they hold a word and its twin,
/// add the child word (and twin) on the robber's side, then release the
/// parent pair.
pub struct TopDownCops {
    pub coords: TreeCoords,
}

pub fn cops_topdown(n: usize) -> Result<(Digraph, TopDownCops)> {
    let (g, coords) = gen_two_trees(n)?;
    Ok((g, TopDownCops { coords }))
}

impl TopDownCops {
    fn pair(&self, word: &[u8]) -> VertexSet {
        let c = &self.coords;
        [c.id(word, false), c.id(word, true)].into_iter().flatten().collect()
    }
}

impl CopPolicy for TopDownCops {
    type Memory = ();

    fn init(&self, _: &Digraph, _: VertexSet) -> Result<()> {
        Ok(())
    }

    fn announce(&self, _: &Digraph, _: &(), u: VertexSet, r: VertexSet) -> Result<(VertexSet, ())> {
        let c = &self.coords;
        if u.is_empty() {
            return Ok((self.pair(&[]), ()));
        }
        // Deepest held word: everything above it is released next.
        let deepest = u.iter().max_by_key(|&v| c.depth(v)).expect("nonempty");
        let held = c.word(deepest).to_vec();
        if u.len() > 2 {
            return Ok((self.pair(&held), ()));
        }
        let b = r.min().ok_or_else(|| Error::StrategyHole(format!("no robber against {u}")))?;
        let rw = c.word(b);
        if rw.len() <= held.len() || !rw.starts_with(&held) {
            return Err(Error::StrategyHole(format!("robber on {} outside the subtree of {}", c.label(b), c.label(deepest))));
        }
        Ok((u.union(self.pair(&rw[..held.len() + 1])), ()))
    }

    fn observe(&self, _: &Digraph, _: &(), _: VertexSet, _: VertexSet, _: VertexSet, _: VertexSet) -> Result<()> {
        Ok(())
    }
}

/// The robber against cops confined to its component: it sits in the
/// unprimed tree with every strict ancestor occupied and the primed
/// ancestors of its twin free, and restores both conditions after every
/// cop move.
pub struct TwoTreeRobber {
    pub coords: TreeCoords,
    pub n: usize,
}

pub fn two_tree_robber(n: usize) -> Result<(Digraph, TwoTreeRobber)> {
    let (g, coords) = gen_two_trees(n)?;
    Ok((g, TwoTreeRobber { coords, n }))
}

impl TwoTreeRobber {
    fn strict_ancestors(&self, v: usize) -> VertexSet {
        let w = self.coords.word(v);
        (0..w.len()).filter_map(|i| self.coords.id(&w[..i], false)).collect()
    }

    fn primed_ancestors(&self, v: usize) -> VertexSet {
        let w = self.coords.word(v);
        (0..=w.len()).filter_map(|i| self.coords.id(&w[..i], true)).collect()
    }

    /// Both invariants for a robber on `v` against cops on `u`.
    pub fn invariant_violation(&self, v: usize, u: VertexSet) -> Option<String> {
        let c = &self.coords;
        if c.is_primed(v) {
            return Some(format!("robber on primed vertex {}", c.label(v)));
        }
        if let Some(w) = self.strict_ancestors(v).difference(u).min() {
            return Some(format!("(1): ancestor {} of {} is free", c.label(w), c.label(v)));
        }
        if let Some(w) = self.primed_ancestors(v).intersection(u).min() {
            return Some(format!("(2): {} above the twin of {} is occupied", c.label(w), c.label(v)));
        }
        None
    }

    /// Whole subtree below `v`, in both copies.
    fn subtree(&self, v: usize) -> VertexSet {
        let w = self.coords.word(v);
        (0..self.coords.len()).filter(|&x| self.coords.word(x).starts_with(w)).collect()
    }
}

impl RobberPolicy for TwoTreeRobber {
    type Memory = ();

    fn start(&self, _: &Digraph) -> Result<(VertexSet, ())> {
        Ok((VertexSet::singleton(self.coords.id(&[], false).expect("root")), ()))
    }

    fn respond(&self, g: &Digraph, _: &(), u: VertexSet, u_next: VertexSet, r: VertexSet) -> Result<(VertexSet, ())> {
        let c = &self.coords;
        let v = r.min().ok_or_else(|| Error::StrategyHole("no robber".into()))?;
        if u_next.len() > self.n {
            return Err(Error::Precondition(format!("{} cops against a robber built for {}", u_next.len(), self.n)));
        }
        let free_above = self.strict_ancestors(v).difference(u_next);
        let target = if let Some(w) = free_above.iter().min_by_key(|&w| c.depth(w)) {
            w
        } else if !u_next.contains(v) {
            v
        } else {
            c.children(v)
                .into_iter()
                .find(|&x| self.subtree(x).is_disjoint(u_next))
                .ok_or_else(|| Error::invariant("pigeonhole", format!("every subtree below {} holds a cop", c.label(v))))?
        };
        if !robber_region(g, u, u_next, r).contains(target) {
            return Err(Error::invariant("escape path", format!("{} cannot reach {}", c.label(v), c.label(target))));
        }
        if let Some(why) = self.invariant_violation(target, u_next) {
            return Err(Error::invariant("robber invariant", why));
        }
        Ok((VertexSet::singleton(target), ()))
    }
}

/// Monotone clearing schedule for the blown-up tree: occupy a node's block,
/// clear each child subtree recursively, and release blocks on the way up.
/// Uses `k` cops per tree level.
pub fn cops_dpw_tree(r: usize, k: usize) -> Result<(Digraph, Vec<VertexSet>)> {
    let g = gen_grk(r, k)?;
    let (b, h) = grk_tree_shape(r);
    let (_, coords) = full_tree(b, h)?;
    let block = |t: usize| -> VertexSet { (t * k..t * k + k).collect() };
    fn sweep(coords: &TreeCoords, t: usize, held: VertexSet, block: &dyn Fn(usize) -> VertexSet, out: &mut Vec<VertexSet>) {
        let here = held.union(block(t));
        out.push(here);
        for c in coords.children(t) {
            sweep(coords, c, here, block, out);
            out.push(here);
        }
    }
    let mut schedule = Vec::new();
    sweep(&coords, 0, VertexSet::EMPTY, &block, &mut schedule);
    schedule.dedup();
    Ok((g, schedule))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{check_schedule, solve_search, SearchConfig, Winner, DEFAULT_BUDGET};
    use crate::strategy::{verify_cop_policy, verify_robber_policy, Adversary, StepChecks};

    #[test]
    fn tree_counts() {
        let (g, _) = full_tree(3, 2).unwrap();
        assert_eq!((g.n(), g.edge_count()), (4, 6));
        assert_eq!(full_tree(5, 1).unwrap().0.edge_count(), 0);
        assert_eq!(full_tree(3, 3).unwrap().0.n(), 13);
        assert!(full_tree(0, 2).is_err());
    }

    #[test]
    fn product_identities() {
        let (t, _) = full_tree(2, 2).unwrap();
        assert_eq!(lex_product(&t, &clique(1).unwrap()).unwrap().edges(), t.edges());
        assert_eq!(lex_product(&Digraph::new(1).unwrap(), &clique(2).unwrap()).unwrap(), clique(2).unwrap());
    }

    #[test]
    fn two_tree_sizes_and_labels() {
        let (g1, c1) = gen_two_trees(1).unwrap();
        assert_eq!(g1.n(), 6);
        assert_eq!(c1.label(0), "ε");
        let (g2, c2) = gen_two_trees(2).unwrap();
        assert_eq!(g2.n(), 30);
        let v = c2.id(&[1, 2], true).unwrap();
        assert_eq!(c2.label(v), "1'2'");
        // primed word to the unprimed parent of its word
        assert!(g2.has_edge(v, c2.id(&[1], false).unwrap()));
        assert!(!g2.has_edge(c2.id(&[1], true).unwrap(), v));
        let sccs = g2.sccs();
        assert_eq!(sccs.count(), 2);
        assert_eq!(sccs.component(c2.id(&[], true).unwrap()).len(), 1);
    }

    #[test]
    fn grk_sizes() {
        assert_eq!(gen_grk(1, 2).unwrap().n(), 8);
        assert_eq!(gen_grk(2, 1).unwrap().n(), 13);
    }

    #[test]
    fn topdown_cops_win_small() {
        for n in 1..=2 {
            let (g, cops) = cops_topdown(n).unwrap();
            let v = verify_cop_policy(&g, 4, 1, &cops, Adversary::Any, DEFAULT_BUDGET).unwrap();
            assert!(v.passed, "n={n}: {:?}", v.failure);
            assert!(v.max_cops <= 4);
        }
    }

    #[test]
    fn robber_beats_one_confined_cop() {
        let (g, robber) = two_tree_robber(1).unwrap();
        let cfg = SearchConfig::restricted(1);
        assert_eq!(solve_search(&g, &cfg).unwrap().winner, Winner::Robbers);
        let v = verify_robber_policy(&g, &cfg, &robber, StepChecks::default(), DEFAULT_BUDGET).unwrap();
        assert!(v.passed, "{:?}", v.failure);
    }

    #[test]
    fn dpw_schedules() {
        for (r, k) in [(1, 1), (2, 1), (1, 2)] {
            let (g, s) = cops_dpw_tree(r, k).unwrap();
            assert_eq!(check_schedule(&g, &s), Ok(k * (r + 1)), "r={r} k={k}");
        }
    }
}
