//! Dense directed graphs over at most 64 vertices, bitset vertex sets,
//! reachability avoiding a blocked set, strongly connected components and
//! the edge-list text format.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 64;

/// A set of vertex ids below 64, stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: usize) -> Self {
        debug_assert!(v < MAX_VERTICES);
        VertexSet(1u64 << v)
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, v: usize) -> bool {
        v < MAX_VERTICES && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1u64 << v)
    }

    pub fn without(self, v: usize) -> Self {
        VertexSet(self.0 & !(1u64 << v))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        VertexSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        VertexSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        VertexSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: Self) -> bool {
        self.0 & o.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn pop_min(&mut self) -> Option<usize> {
        let v = VertexSet::min(*self)?;
        self.0 &= self.0 - 1;
        Some(v)
    }

    pub fn iter(self) -> VertexIter {
        VertexIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = VertexSet> {
        let full = self.0;
        let mut cur = Some(0u64);
        std::iter::from_fn(move || {
            let out = cur?;
            cur = if out == full { None } else { Some((out.wrapping_sub(full)) & full) };
            Some(VertexSet(out))
        })
    }

    /// Subsets of `self` with at most `k` elements.
    pub fn subsets_up_to(self, k: usize) -> impl Iterator<Item = VertexSet> {
        subsets_of_size_at_most(self, k)
    }

    /// Comma-separated sorted members, e.g. `0,2,5`; empty for the empty set.
    pub fn to_list(self) -> String {
        self.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_list(text: &str) -> std::result::Result<Self, String> {
        let mut s = VertexSet::EMPTY;
        for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v: usize = tok.parse().map_err(|_| format!("bad vertex '{tok}'"))?;
            if v >= MAX_VERTICES {
                return Err(format!("vertex {v} exceeds the 64-vertex limit"));
            }
            s.insert(v);
        }
        Ok(s)
    }
}

fn subsets_of_size_at_most(base: VertexSet, k: usize) -> Box<dyn Iterator<Item = VertexSet>> {
    let elems = base.to_vec();
    let k = k.min(elems.len());
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u64, usize)> = vec![(0, 0, 0)];
    while let Some((start, bits, size)) = stack.pop() {
        out.push(VertexSet(bits));
        if size == k {
            continue;
        }
        for i in (start..elems.len()).rev() {
            stack.push((i + 1, bits | 1u64 << elems[i], size + 1));
        }
    }
    out.sort_unstable_by_key(|s| (s.len(), s.0));
    Box::new(out.into_iter())
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in it {
            s.insert(v);
        }
        s
    }
}

pub struct VertexIter(u64);

impl Iterator for VertexIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_list())
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_list())
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Digraph {
    n: usize,
    succ: Vec<VertexSet>,
    pred: Vec<VertexSet>,
    labels: Option<Vec<String>>,
}

impl Digraph {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::TooLarge(n));
        }
        Ok(Digraph { n, succ: vec![VertexSet::EMPTY; n], pred: vec![VertexSet::EMPTY; n], labels: None })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Digraph::new(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Directed cycle `0 -> 1 -> .. -> n-1 -> 0`.
    pub fn cycle(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Digraph::from_edges(n, &edges)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexRange { vertex: w, n: self.n });
            }
        }
        self.succ[u].insert(v);
        self.pred[v].insert(u);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn succ(&self, v: usize) -> VertexSet {
        self.succ[v]
    }

    pub fn pred(&self, v: usize) -> VertexSet {
        self.pred[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.succ[u].contains(v)
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(|s| s.len()).sum()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|u| self.succ[u].iter().map(move |v| (u, v))).collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn check_set(&self, s: VertexSet) -> Result<()> {
        match s.difference(self.vertices()).min() {
            Some(v) => Err(Error::VertexRange { vertex: v, n: self.n }),
            None => Ok(()),
        }
    }

    /// Vertices reachable from `y` by paths avoiding `x`; includes `y \ x`.
    pub fn reach_excluding(&self, x: VertexSet, y: VertexSet) -> VertexSet {
        let mut seen = y.difference(x);
        let mut todo = seen;
        while let Some(v) = todo.pop_min() {
            let fresh = self.succ[v].difference(x).difference(seen);
            seen = seen.union(fresh);
            todo = todo.union(fresh);
        }
        seen
    }

    /// Checked variant of [`Digraph::reach_excluding`] for external input.
    pub fn try_reach_excluding(&self, x: VertexSet, y: VertexSet) -> Result<VertexSet> {
        self.check_set(x)?;
        self.check_set(y)?;
        Ok(self.reach_excluding(x, y))
    }

    /// Vertices from which `y` is reachable avoiding `x`; includes `y \ x`.
    pub fn coreach_excluding(&self, x: VertexSet, y: VertexSet) -> VertexSet {
        let mut seen = y.difference(x);
        let mut todo = seen;
        while let Some(v) = todo.pop_min() {
            let fresh = self.pred[v].difference(x).difference(seen);
            seen = seen.union(fresh);
            todo = todo.union(fresh);
        }
        seen
    }

    /// The strongly connected component of `v` in `G - x` (empty if `v` is in `x`).
    pub fn component_excluding(&self, x: VertexSet, v: usize) -> VertexSet {
        let s = VertexSet::singleton(v);
        self.reach_excluding(x, s).intersection(self.coreach_excluding(x, s))
    }

    pub fn sccs(&self) -> Sccs {
        Sccs::excluding(self, VertexSet::EMPTY)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.n == 0 || self.reach_excluding(VertexSet::EMPTY, VertexSet::singleton(0)) == self.vertices()
            && self.coreach_excluding(VertexSet::EMPTY, VertexSet::singleton(0)) == self.vertices()
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges().iter().all(|&(u, v)| self.has_edge(v, u))
    }

    pub fn symmetric_closure(&self) -> Digraph {
        let mut g = self.clone();
        for (u, v) in self.edges() {
            g.succ[v].insert(u);
            g.pred[u].insert(v);
        }
        g
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Digraph {
        let mut g = Digraph::new(self.n).expect("same size");
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]).expect("permutation in range");
        }
        g
    }

    pub fn parse_edge_list(text: &str) -> Result<Digraph> {
        let mut g: Option<Digraph> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let parse = |t: &str| {
                t.parse::<usize>().map_err(|_| Error::Parse { line: line_no, msg: format!("expected a vertex index, found '{t}'") })
            };
            match &mut g {
                None => {
                    if toks.len() != 1 {
                        return Err(Error::Parse { line: line_no, msg: "expected the vertex count".into() });
                    }
                    let n = parse(toks[0])?;
                    if n > MAX_VERTICES {
                        return Err(Error::Parse { line: line_no, msg: format!("{n} vertices exceed the 64-vertex limit") });
                    }
                    g = Some(Digraph::new(n)?);
                }
                Some(g) => {
                    if toks.len() != 2 {
                        return Err(Error::Parse { line: line_no, msg: "expected an edge 'u v'".into() });
                    }
                    let (u, v) = (parse(toks[0])?, parse(toks[1])?);
                    g.add_edge(u, v).map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
                }
            }
        }
        g.ok_or(Error::Parse { line: 0, msg: "missing vertex count".into() })
    }

    /// Canonical edge list: the count, then edges in lexicographic order.
    pub fn emit_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn emit_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for v in 0..self.n {
            out.push_str(&format!("  {v} [label=\"{}\"];\n", self.label(v).replace('"', "\\\"")));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("  {u} -> {v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Strongly connected components of `G - removed`, in topological order of
/// the condensation (a block never reaches an earlier block).
#[derive(Clone, Debug)]
pub struct Sccs {
    blocks: Vec<VertexSet>,
    comp: Vec<Option<usize>>,
}

impl Sccs {
    pub fn excluding(g: &Digraph, removed: VertexSet) -> Sccs {
        let mut left = g.vertices().difference(removed);
        let mut raw = Vec::new();
        while let Some(v) = left.min() {
            let c = g.component_excluding(removed, v);
            left = left.difference(c);
            raw.push(c);
        }
        // Kahn over the condensation; ties by smallest member.
        let m = raw.len();
        let mut indeg = vec![0usize; m];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (i, &bi) in raw.iter().enumerate() {
            let mut nb = VertexSet::EMPTY;
            for v in bi.iter() {
                nb = nb.union(g.succ(v));
            }
            nb = nb.difference(removed).difference(bi);
            for (j, &bj) in raw.iter().enumerate() {
                if i != j && !nb.is_disjoint(bj) {
                    out[i].push(j);
                    indeg[j] += 1;
                }
            }
        }
        let mut ready: Vec<usize> = (0..m).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(m);
        while !ready.is_empty() {
            ready.sort_by_key(|&i| std::cmp::Reverse(raw[i].min()));
            let i = ready.pop().expect("nonempty");
            order.push(i);
            for &j in &out[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(j);
                }
            }
        }
        let blocks: Vec<VertexSet> = order.iter().map(|&i| raw[i]).collect();
        let mut comp = vec![None; g.n()];
        for (i, b) in blocks.iter().enumerate() {
            for v in b.iter() {
                comp[v] = Some(i);
            }
        }
        Sccs { blocks, comp }
    }

    pub fn blocks(&self) -> &[VertexSet] {
        &self.blocks
    }

    pub fn count(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block holding `v`, in topological order.
    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.comp.get(v).copied().flatten()
    }

    /// The block `C(v)`, empty for removed vertices.
    pub fn component(&self, v: usize) -> VertexSet {
        self.index_of(v).map(|i| self.blocks[i]).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn cycle_reach() {
        let c3 = Digraph::cycle(3).unwrap();
        assert_eq!(c3.reach_excluding(VertexSet::EMPTY, set(&[0])), set(&[0, 1, 2]));
        assert_eq!(c3.reach_excluding(set(&[1]), set(&[0])), set(&[0]));
        assert_eq!(c3.reach_excluding(set(&[0]), set(&[0])), VertexSet::EMPTY);
    }

    #[test]
    fn out_of_range_is_input_error() {
        let c3 = Digraph::cycle(3).unwrap();
        let err = c3.try_reach_excluding(set(&[7]), set(&[0])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn sccs_small() {
        let c3 = Digraph::cycle(3).unwrap();
        assert_eq!(c3.sccs().blocks(), &[set(&[0, 1, 2])]);
        let dag = Digraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(dag.sccs().blocks(), &[set(&[0]), set(&[1])]);
        let rev = Digraph::from_edges(2, &[(1, 0)]).unwrap();
        assert_eq!(rev.sccs().blocks(), &[set(&[1]), set(&[0])]);
        assert_eq!(rev.sccs().component(0), set(&[0]));
    }

    #[test]
    fn closure_small() {
        let g = Digraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(g.symmetric_closure().edges(), vec![(0, 1), (1, 0)]);
        assert_eq!(Digraph::cycle(3).unwrap().symmetric_closure().edge_count(), 6);
    }

    #[test]
    fn parse_and_emit() {
        let g = Digraph::parse_edge_list("3\n0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(g, Digraph::cycle(3).unwrap());
        let messy = "# header\n\n3  # count\n2 0\n0 1\n1 2\n0 1\n";
        assert_eq!(g.emit_edge_list(), Digraph::parse_edge_list(messy).unwrap().emit_edge_list());
        let err = Digraph::parse_edge_list("3\n2 5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(matches!(Digraph::parse_edge_list("3\n0 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Digraph::parse_edge_list("# only\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn dot_lists_every_edge() {
        let dot = Digraph::cycle(3).unwrap().emit_dot();
        assert!(dot.contains("2 -> 0;"));
        assert_eq!(dot.matches("->").count(), 3);
    }

    #[test]
    fn subset_enumeration() {
        let base = set(&[1, 3, 4, 6]);
        assert_eq!(base.subsets().count(), 16);
        assert_eq!(base.subsets_up_to(2).count(), 1 + 4 + 6);
        assert!(base.subsets_up_to(2).all(|s| s.is_subset(base) && s.len() <= 2));
        assert_eq!(VertexSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn list_round_trip() {
        let s = set(&[0, 2, 5]);
        assert_eq!(s.to_list(), "0,2,5");
        assert_eq!(VertexSet::parse_list(" 5, 0,2 ").unwrap(), s);
        assert_eq!(VertexSet::parse_list("").unwrap(), VertexSet::EMPTY);
    }
}
