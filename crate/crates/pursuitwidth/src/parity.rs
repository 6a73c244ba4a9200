//! Parity games with actions and imperfect information for player 0, the
//! knowledge-set (powerset) construction, a Zielonka solver with strategy
//! verification, and the lift of multi-robber cop strategies to the
//! knowledge graph.
//!
//! Semantics: at a player-0 position, player 0 picks an action and player 1
//! resolves which successor under that action is taken; at a player-1
//! position, player 1 picks any move. The least color seen infinitely
//! often decides: even for player 0, odd for player 1.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::digraph::{Digraph, VertexSet, MAX_VERTICES};
use crate::error::{Error, Result};
use crate::strategy::{CopPolicy, Verification};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    n: usize,
    actions: Vec<String>,
    owner: Vec<u8>,
    color: Vec<u32>,
    /// `(from, action, to)`, sorted and deduplicated.
    moves: Vec<(usize, usize, usize)>,
    init: usize,
}

impl ParityGame {
    pub fn new(
        n: usize,
        actions: Vec<String>,
        owner: Vec<u8>,
        color: Vec<u32>,
        mut moves: Vec<(usize, usize, usize)>,
        init: usize,
    ) -> Result<Self> {
        if owner.len() != n || color.len() != n {
            return Err(Error::Config(format!("{n} positions need {n} owners and colors")));
        }
        if let Some(&o) = owner.iter().find(|&&o| o > 1) {
            return Err(Error::Config(format!("owner {o} is not 0 or 1")));
        }
        for &(u, a, v) in &moves {
            if u >= n || v >= n {
                return Err(Error::VertexRange { vertex: u.max(v), n });
            }
            if a >= actions.len() {
                return Err(Error::Config(format!("action index {a} out of range")));
            }
        }
        if init >= n {
            return Err(Error::VertexRange { vertex: init, n });
        }
        moves.sort_unstable();
        moves.dedup();
        Ok(ParityGame { n, actions, owner, color, moves, init })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn actions(&self) -> &[String] {
        &self.actions
    }
    pub fn owner(&self, v: usize) -> u8 {
        self.owner[v]
    }
    pub fn color(&self, v: usize) -> u32 {
        self.color[v]
    }
    pub fn init(&self) -> usize {
        self.init
    }
    pub fn moves(&self) -> &[(usize, usize, usize)] {
        &self.moves
    }

    /// Successors of `v` under action `a`.
    pub fn post(&self, v: usize, a: usize) -> Vec<usize> {
        self.moves.iter().filter(|&&(u, b, _)| u == v && b == a).map(|&(_, _, w)| w).collect()
    }

    pub fn successors(&self, v: usize) -> Vec<usize> {
        let s: BTreeSet<usize> = self.moves.iter().filter(|&&(u, _, _)| u == v).map(|&(_, _, w)| w).collect();
        s.into_iter().collect()
    }

    pub fn available(&self, v: usize) -> Vec<usize> {
        let s: BTreeSet<usize> = self.moves.iter().filter(|&&(u, _, _)| u == v).map(|&(_, a, _)| a).collect();
        s.into_iter().collect()
    }

    /// The move graph.
    pub fn graph(&self) -> Result<Digraph> {
        let edges: Vec<_> = self.moves.iter().map(|&(u, _, v)| (u, v)).collect();
        Digraph::from_edges(self.n, &edges)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, Vec<String>)> = None;
        let mut owner = Vec::new();
        let mut color = Vec::new();
        let mut seen = Vec::new();
        let mut moves = Vec::new();
        let mut init = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let bad = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |t: &str| t.parse::<usize>().map_err(|_| bad(format!("expected a number, got '{t}'")));
            match toks[0] {
                "positions" => {
                    if toks.len() < 3 || toks[2] != "actions" {
                        return Err(bad("expected 'positions <n> actions <labels...>'".into()));
                    }
                    let n = num(toks[1])?;
                    let labels: Vec<String> = toks[3..].iter().map(|s| s.to_string()).collect();
                    owner = vec![0; n];
                    color = vec![0; n];
                    seen = vec![false; n];
                    header = Some((n, labels));
                }
                "move" => {
                    let (n, labels) = header.as_ref().ok_or_else(|| bad("move before header".into()))?;
                    if toks.len() != 4 {
                        return Err(bad("expected 'move <u> <action> <v>'".into()));
                    }
                    let (u, v) = (num(toks[1])?, num(toks[3])?);
                    if u >= *n || v >= *n {
                        return Err(bad(format!("position {} out of range for {n} positions", u.max(v))));
                    }
                    let a = labels.iter().position(|l| l == toks[2]).ok_or_else(|| bad(format!("unknown action '{}'", toks[2])))?;
                    moves.push((u, a, v));
                }
                "init" => {
                    if toks.len() != 2 {
                        return Err(bad("expected 'init <id>'".into()));
                    }
                    init = Some(num(toks[1])?);
                }
                _ => {
                    let (n, _) = header.as_ref().ok_or_else(|| bad("position line before header".into()))?;
                    if toks.len() != 3 {
                        return Err(bad("expected '<id> <color> <owner>'".into()));
                    }
                    let v = num(toks[0])?;
                    if v >= *n {
                        return Err(bad(format!("position {v} out of range for {n} positions")));
                    }
                    color[v] = toks[1].parse().map_err(|_| bad(format!("bad color '{}'", toks[1])))?;
                    owner[v] = match toks[2] {
                        "0" => 0,
                        "1" => 1,
                        o => return Err(bad(format!("owner must be 0 or 1, got '{o}'"))),
                    };
                    seen[v] = true;
                }
            }
        }
        let (n, labels) = header.ok_or(Error::Parse { line: 1, msg: "missing 'positions' header".into() })?;
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::Parse { line: text.lines().count(), msg: format!("position {v} has no color/owner line") });
        }
        let init = init.ok_or(Error::Parse { line: text.lines().count(), msg: "missing 'init' line".into() })?;
        ParityGame::new(n, labels, owner, color, moves, init)
    }

    pub fn emit(&self) -> String {
        let mut out = format!("positions {} actions {}\n", self.n, self.actions.join(" "));
        for v in 0..self.n {
            out.push_str(&format!("{v} {} {}\n", self.color[v], self.owner[v]));
        }
        for &(u, a, v) in &self.moves {
            out.push_str(&format!("move {u} {} {v}\n", self.actions[a]));
        }
        out.push_str(&format!("init {}\n", self.init));
        out
    }
}

/// Partition of the positions into observation classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationEquiv {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl ObservationEquiv {
    pub fn identity(n: usize) -> Self {
        ObservationEquiv { class_of: (0..n).collect(), classes: (0..n).map(|v| vec![v]).collect() }
    }

    /// Listed classes; unlisted positions are singletons.
    pub fn from_classes(n: usize, listed: &[Vec<usize>]) -> Result<Self> {
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for c in listed.iter().filter(|c| !c.is_empty()) {
            for &v in c {
                if v >= n {
                    return Err(Error::VertexRange { vertex: v, n });
                }
                if class_of[v] != usize::MAX {
                    return Err(Error::Config(format!("position {v} listed in two classes")));
                }
                class_of[v] = classes.len();
            }
            let mut c = c.clone();
            c.sort_unstable();
            classes.push(c);
        }
        for (v, c) in class_of.iter_mut().enumerate() {
            if *c == usize::MAX {
                *c = classes.len();
                classes.push(vec![v]);
            }
        }
        Ok(ObservationEquiv { class_of, classes })
    }

    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut listed = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let class: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
            let class = class.map_err(|_| Error::Parse { line: i + 1, msg: "expected space-separated position ids".into() })?;
            if let Some(&v) = class.iter().find(|&&v| v >= n) {
                return Err(Error::Parse { line: i + 1, msg: format!("position {v} out of range for {n} positions") });
            }
            listed.push(class);
        }
        ObservationEquiv::from_classes(n, &listed)
    }

    pub fn emit(&self) -> String {
        self.classes.iter().filter(|c| c.len() > 1).map(|c| c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") + "\n").collect()
    }

    pub fn class_index(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn class(&self, v: usize) -> &[usize] {
        &self.classes[self.class_of[v]]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn max_class_size(&self) -> usize {
        self.classes.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Problems with a game and observation pair; empty if usable.
pub fn validate(pg: &ParityGame, eq: &ObservationEquiv) -> Vec<String> {
    let mut out = Vec::new();
    if eq.class_of.len() != pg.n {
        out.push(format!("observation covers {} positions, game has {}", eq.class_of.len(), pg.n));
        return out;
    }
    for v in 0..pg.n {
        if pg.successors(v).is_empty() {
            out.push(format!("position {v} is a dead end (add a self-loop of a losing color)"));
        }
    }
    for c in &eq.classes {
        let v = c[0];
        for &w in &c[1..] {
            if pg.color[w] != pg.color[v] {
                out.push(format!("positions {v} and {w} are indistinguishable but have colors {} and {}", pg.color[v], pg.color[w]));
            }
            if pg.owner[w] != pg.owner[v] {
                out.push(format!("positions {v} and {w} are indistinguishable but have different owners"));
            }
            if pg.owner[v] == 0 && pg.available(w) != pg.available(v) {
                out.push(format!("positions {v} and {w} are indistinguishable but offer different actions"));
            }
        }
    }
    out
}

/// The knowledge game: positions are sets of original positions that
/// player 0 cannot tell apart.
#[derive(Clone, Debug)]
pub struct KnowledgeGame {
    pub game: ParityGame,
    pub sets: Vec<VertexSet>,
}

impl KnowledgeGame {
    pub fn index_of(&self, k: VertexSet) -> Option<usize> {
        self.sets.iter().position(|&s| s == k)
    }

    pub fn max_set_size(&self) -> usize {
        self.sets.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    /// The knowledge graph as a digraph (at most 64 knowledge sets).
    pub fn graph(&self) -> Result<Digraph> {
        self.game.graph()
    }
}

fn split_by_class(eq: &ObservationEquiv, targets: VertexSet) -> Vec<VertexSet> {
    let mut parts: Vec<(usize, VertexSet)> = Vec::new();
    for w in targets.iter() {
        let c = eq.class_index(w);
        match parts.iter_mut().find(|(d, _)| *d == c) {
            Some((_, s)) => s.insert(w),
            None => parts.push((c, VertexSet::singleton(w))),
        }
    }
    parts.sort_by_key(|&(_, s)| s.bits());
    parts.into_iter().map(|(_, s)| s).collect()
}

pub fn powerset_construct(pg: &ParityGame, eq: &ObservationEquiv) -> Result<KnowledgeGame> {
    let problems = validate(pg, eq);
    if !problems.is_empty() {
        return Err(Error::Precondition(problems.join("; ")));
    }
    if pg.n > MAX_VERTICES {
        return Err(Error::TooLarge(pg.n));
    }
    let post_set = |k: VertexSet, a: Option<usize>| -> VertexSet {
        pg.moves
            .iter()
            .filter(|&&(u, b, _)| k.contains(u) && a.is_none_or(|a| a == b))
            .map(|&(_, _, w)| w)
            .collect()
    };
    let start = VertexSet::singleton(pg.init);
    let mut sets = vec![start];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut moves = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let k = sets[i];
        let v = k.min().expect("knowledge sets are nonempty");
        let branches: Vec<(usize, VertexSet)> = if pg.owner[v] == 0 {
            pg.available(v).into_iter().map(|a| (a, post_set(k, Some(a)))).collect()
        } else {
            vec![(0, post_set(k, None))]
        };
        for (a, targets) in branches {
            for part in split_by_class(eq, targets) {
                let j = *index.entry(part).or_insert_with(|| {
                    sets.push(part);
                    queue.push_back(sets.len() - 1);
                    sets.len() - 1
                });
                moves.push((i, a, j));
            }
        }
    }
    let owner = sets.iter().map(|k| pg.owner[VertexSet::min(*k).expect("nonempty")]).collect();
    let color = sets.iter().map(|k| pg.color[VertexSet::min(*k).expect("nonempty")]).collect();
    let actions = if pg.actions.is_empty() { vec!["_".to_string()] } else { pg.actions.clone() };
    let game = ParityGame::new(sets.len(), actions, owner, color, moves, 0)?;
    Ok(KnowledgeGame { game, sets })
}

/// Checks that every knowledge history of at most `max_len` positions, and
/// every position in its last knowledge set, comes from a play of the
/// original game through the same knowledge sets. Returns the number of
/// histories checked, or the first history that cannot be lifted.
pub fn check_history_lifting(pg: &ParityGame, kg: &KnowledgeGame, max_len: usize) -> std::result::Result<usize, Vec<usize>> {
    let mut checked = 0;
    let mut stack: Vec<Vec<(usize, Option<usize>)>> = vec![vec![(0, None)]];
    while let Some(hist) = stack.pop() {
        checked += 1;
        let &(last, _) = hist.last().expect("nonempty");
        for v in kg.sets[last].iter() {
            // Backward: positions of each knowledge set that lead to `v`.
            let mut alive = VertexSet::singleton(v);
            for w in (0..hist.len() - 1).rev() {
                let (k, _) = hist[w];
                let action = hist[w + 1].1;
                alive = kg.sets[k]
                    .iter()
                    .filter(|&u| {
                        pg.moves.iter().any(|&(x, a, y)| x == u && alive.contains(y) && (pg.owner[u] == 1 || Some(a) == action))
                    })
                    .collect();
            }
            if !alive.contains(pg.init) {
                return Err(hist.iter().map(|&(k, _)| k).collect());
            }
        }
        if hist.len() < max_len {
            for &(i, a, j) in &kg.game.moves {
                if i == last {
                    let mut next = hist.clone();
                    next.push((j, (kg.game.owner[i] == 0).then_some(a)));
                    stack.push(next);
                }
            }
        }
    }
    Ok(checked)
}

/// Arena with explicit intermediate nodes: a player-0 position `v` moves to
/// `(v, a)`, owned by player 1 with `v`'s color, which moves to the
/// `a`-successors.
#[derive(Clone, Debug)]
pub struct Arena {
    pub owner: Vec<u8>,
    pub color: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
    /// For intermediate nodes: the position and action they stand for.
    pub choice_of: Vec<Option<(usize, usize)>>,
}

impl Arena {
    pub fn from_game(pg: &ParityGame) -> Arena {
        let n = pg.n;
        let mut a = Arena { owner: pg.owner.clone(), color: pg.color.clone(), succ: vec![Vec::new(); n], choice_of: vec![None; n] };
        for v in 0..n {
            if pg.owner[v] == 0 {
                for act in pg.available(v) {
                    let mid = a.owner.len();
                    a.owner.push(1);
                    a.color.push(pg.color[v]);
                    a.succ.push(pg.post(v, act));
                    a.choice_of.push(Some((v, act)));
                    a.succ[v].push(mid);
                }
            } else {
                a.succ[v] = pg.successors(v);
            }
        }
        a
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }
}

fn attractor(a: &Arena, alive: &[bool], target: &[bool], player: u8) -> (Vec<bool>, Vec<Option<usize>>) {
    let n = a.len();
    let mut inside = target.to_vec();
    let mut strat = vec![None; n];
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if !alive[v] || inside[v] {
                continue;
            }
            let succ: Vec<usize> = a.succ[v].iter().copied().filter(|&w| alive[w]).collect();
            if a.owner[v] == player {
                if let Some(&w) = succ.iter().find(|&&w| inside[w]) {
                    inside[v] = true;
                    strat[v] = Some(w);
                    changed = true;
                }
            } else if !succ.is_empty() && succ.iter().all(|&w| inside[w]) {
                inside[v] = true;
                changed = true;
            }
        }
    }
    (inside, strat)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZielonkaResult {
    /// `winner[v]` for every arena node.
    pub winner: Vec<u8>,
    /// The winner's chosen successor at each node it owns.
    pub strategy: Vec<Option<usize>>,
}

fn zielonka_rec(a: &Arena, alive: &[bool]) -> (Vec<u8>, Vec<Option<usize>>) {
    let n = a.len();
    let mut win = vec![u8::MAX; n];
    let mut strat = vec![None; n];
    let Some(p) = (0..n).filter(|&v| alive[v]).map(|v| a.color[v]).min() else {
        return (win, strat);
    };
    let i = (p % 2) as u8;
    let top: Vec<bool> = (0..n).map(|v| alive[v] && a.color[v] == p).collect();
    let (attr, attr_strat) = attractor(a, alive, &top, i);
    let rest: Vec<bool> = (0..n).map(|v| alive[v] && !attr[v]).collect();
    let (w1, s1) = zielonka_rec(a, &rest);
    if (0..n).all(|v| !rest[v] || w1[v] == i) {
        for v in (0..n).filter(|&v| alive[v]) {
            win[v] = i;
            strat[v] = if rest[v] {
                s1[v]
            } else if a.owner[v] == i {
                attr_strat[v].or_else(|| a.succ[v].iter().copied().find(|&w| alive[w]))
            } else {
                None
            };
        }
        return (win, strat);
    }
    let o = 1 - i;
    let lost: Vec<bool> = (0..n).map(|v| rest[v] && w1[v] == o).collect();
    let (battr, battr_strat) = attractor(a, alive, &lost, o);
    let remaining: Vec<bool> = (0..n).map(|v| alive[v] && !battr[v]).collect();
    let (w2, s2) = zielonka_rec(a, &remaining);
    for v in (0..n).filter(|&v| alive[v]) {
        if battr[v] {
            win[v] = o;
            strat[v] = if lost[v] { s1[v] } else if a.owner[v] == o { battr_strat[v] } else { None };
        } else {
            win[v] = w2[v];
            strat[v] = s2[v];
        }
    }
    (win, strat)
}

pub fn zielonka(a: &Arena) -> ZielonkaResult {
    let (winner, strategy) = zielonka_rec(a, &vec![true; a.len()]);
    ZielonkaResult { winner, strategy }
}

/// Nodes of `alive` (under the edge relation `succ`) lying on a cycle whose
/// least color has the given parity.
fn has_cycle_with_min_parity(color: &[u32], succ: &[Vec<usize>], alive: &[bool], parity: u32) -> bool {
    let n = color.len();
    let mut bad_colors: Vec<u32> = (0..n).filter(|&v| alive[v] && color[v] % 2 == parity).map(|v| color[v]).collect();
    bad_colors.sort_unstable();
    bad_colors.dedup();
    for c in bad_colors {
        let sub: Vec<bool> = (0..n).map(|v| alive[v] && color[v] >= c).collect();
        let comp = scc_ids(succ, &sub);
        for v in (0..n).filter(|&v| sub[v] && color[v] == c) {
            let cyclic = succ[v].iter().any(|&w| sub[w] && comp[w] == comp[v]);
            if cyclic {
                return true;
            }
        }
    }
    false
}

/// SCC ids on the induced subgraph (Kosaraju); `usize::MAX` outside.
fn scc_ids(succ: &[Vec<usize>], alive: &[bool]) -> Vec<usize> {
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for v in 0..n {
        for &w in &succ[v] {
            if alive[v] && alive[w] {
                pred[w].push(v);
            }
        }
    }
    let mut order = Vec::new();
    let mut seen = vec![false; n];
    for s in 0..n {
        if !alive[s] || seen[s] {
            continue;
        }
        let mut stack = vec![(s, 0usize)];
        seen[s] = true;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            let next = succ[v].iter().skip(*i).position(|&w| alive[w] && !seen[w]);
            match next {
                Some(off) => {
                    let w = succ[v][*i + off];
                    *i += off + 1;
                    seen[w] = true;
                    stack.push((w, 0));
                }
                None => {
                    order.push(v);
                    stack.pop();
                }
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = c;
        while let Some(v) = stack.pop() {
            for &w in &pred[v] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    comp
}

/// Fixing `strategy` for `player` on `region`: the opponent cannot leave
/// the region and cannot force a cycle whose least color favors them.
pub fn verify_strategy(a: &Arena, region: &[bool], strategy: &[Option<usize>], player: u8) -> std::result::Result<(), String> {
    let n = a.len();
    let mut succ = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| region[v]) {
        if a.owner[v] == player {
            match strategy[v] {
                Some(w) if a.succ[v].contains(&w) && region[w] => succ[v].push(w),
                other => return Err(format!("node {v}: strategy move {other:?} is missing or leaves the region")),
            }
        } else {
            if let Some(&w) = a.succ[v].iter().find(|&&w| !region[w]) {
                return Err(format!("node {v}: the opponent escapes to {w}"));
            }
            succ[v] = a.succ[v].clone();
        }
    }
    if has_cycle_with_min_parity(&a.color, &succ, region, 1 - player as u32) {
        return Err("the opponent can force a losing cycle".into());
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ParitySolution {
    /// Winner per original position.
    pub winner: Vec<u8>,
    /// Player 0's action per player-0 position it wins.
    pub actions: Vec<Option<usize>>,
    /// Player 1's successor per player-1 position it wins.
    pub moves: Vec<Option<usize>>,
}

pub fn zielonka_solve(pg: &ParityGame) -> Result<(ParitySolution, Arena, ZielonkaResult)> {
    if let Some(v) = (0..pg.n).find(|&v| pg.successors(v).is_empty()) {
        return Err(Error::Precondition(format!("position {v} is a dead end")));
    }
    let a = Arena::from_game(pg);
    let z = zielonka(&a);
    let winner = z.winner[..pg.n].to_vec();
    let actions = (0..pg.n)
        .map(|v| (pg.owner[v] == 0 && winner[v] == 0).then(|| z.strategy[v].and_then(|m| a.choice_of[m]).map(|(_, act)| act)).flatten())
        .collect();
    let moves = (0..pg.n).map(|v| (pg.owner[v] == 1 && winner[v] == 1).then(|| z.strategy[v]).flatten()).collect();
    Ok((ParitySolution { winner, actions, moves }, a, z))
}

/// Both players' strategies pass the residual check on their regions.
pub fn verify_solution(a: &Arena, z: &ZielonkaResult) -> std::result::Result<(), String> {
    for p in 0..2u8 {
        let region: Vec<bool> = z.winner.iter().map(|&w| w == p).collect();
        verify_strategy(a, &region, &z.strategy, p).map_err(|e| format!("player {p}: {e}"))?;
    }
    Ok(())
}

/// Oracle: player 0 wins from `v` iff some positional choice of actions
/// leaves player 1 no reachable cycle with odd least color.
pub fn winners_by_enumeration(pg: &ParityGame) -> Vec<u8> {
    let a = Arena::from_game(pg);
    let p0: Vec<usize> = (0..pg.n).filter(|&v| pg.owner[v] == 0).collect();
    let mut wins = vec![1u8; pg.n];
    let mut choice = vec![0usize; p0.len()];
    loop {
        let mut succ = a.succ.clone();
        for (idx, &v) in p0.iter().enumerate() {
            succ[v] = vec![a.succ[v][choice[idx]]];
        }
        for v in 0..pg.n {
            if wins[v] == 0 {
                continue;
            }
            let mut reach = vec![false; a.len()];
            let mut stack = vec![v];
            reach[v] = true;
            while let Some(x) = stack.pop() {
                for &y in &succ[x] {
                    if !reach[y] {
                        reach[y] = true;
                        stack.push(y);
                    }
                }
            }
            if !has_cycle_with_min_parity(&a.color, &succ, &reach, 1) {
                wins[v] = 0;
            }
        }
        let mut idx = 0;
        loop {
            if idx == p0.len() {
                return wins;
            }
            choice[idx] += 1;
            if choice[idx] < a.succ[p0[idx]].len() {
                break;
            }
            choice[idx] = 0;
            idx += 1;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ImperfectResult {
    pub winner: u8,
    pub knowledge_positions: usize,
    /// Player 0's action per knowledge set, when player 0 wins.
    pub strategy: Vec<(Vec<usize>, String)>,
    /// Result of checking the strategy in the original game.
    pub verified: Option<std::result::Result<usize, String>>,
}

/// Plays a knowledge-based player-0 strategy in the original game: the
/// product of positions with knowledge sets, where player 1 resolves
/// everything. Returns the product size, or why player 1 beats it.
pub fn verify_knowledge_strategy(
    pg: &ParityGame,
    eq: &ObservationEquiv,
    choose: &HashMap<VertexSet, usize>,
) -> std::result::Result<usize, String> {
    let start = (pg.init, VertexSet::singleton(pg.init));
    let mut ids = HashMap::from([(start, 0usize)]);
    let mut nodes = vec![start];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (v, k) = nodes[i];
        let (targets, knowledge): (Vec<usize>, VertexSet) = if pg.owner[v] == 0 {
            let a = *choose.get(&k).ok_or_else(|| format!("no action for knowledge {k}"))?;
            let post: VertexSet = k.iter().flat_map(|u| pg.post(u, a)).collect();
            (pg.post(v, a), post)
        } else {
            (pg.successors(v), k.iter().flat_map(|u| pg.successors(u)).collect())
        };
        if targets.is_empty() {
            return Err(format!("position {v} has no move under the chosen action"));
        }
        for w in targets {
            let k2: VertexSet = eq.class(w).iter().copied().filter(|&x| knowledge.contains(x)).collect();
            let j = *ids.entry((w, k2)).or_insert_with(|| {
                nodes.push((w, k2));
                succ.push(Vec::new());
                queue.push_back(nodes.len() - 1);
                nodes.len() - 1
            });
            succ[i].push(j);
        }
    }
    let color: Vec<u32> = nodes.iter().map(|&(v, _)| pg.color[v]).collect();
    if has_cycle_with_min_parity(&color, &succ, &vec![true; nodes.len()], 1) {
        return Err("player 1 can force a cycle with odd least color".into());
    }
    Ok(nodes.len())
}

pub fn solve_imperfect(pg: &ParityGame, eq: &ObservationEquiv) -> Result<ImperfectResult> {
    let kg = powerset_construct(pg, eq)?;
    let (sol, _, _) = zielonka_solve(&kg.game)?;
    let winner = sol.winner[0];
    let mut result = ImperfectResult { winner, knowledge_positions: kg.sets.len(), strategy: Vec::new(), verified: None };
    if winner == 0 {
        let choose: HashMap<VertexSet, usize> =
            (0..kg.sets.len()).filter_map(|i| sol.actions[i].map(|a| (kg.sets[i], a))).collect();
        let mut listed: Vec<_> = choose.iter().map(|(k, &a)| (k.to_vec(), kg.game.actions[a].clone())).collect();
        listed.sort();
        result.strategy = listed;
        result.verified = Some(verify_knowledge_strategy(pg, eq, &choose));
    }
    Ok(result)
}

/// A cop strategy for `r` robbers on the original move graph, played on
/// the knowledge graph: a knowledge set is occupied as soon as one of its
/// members is. The robber on a knowledge set stands for robbers on all of
/// its members.
pub struct LiftedCops<'a, C> {
    pub base: &'a C,
    pub original: &'a Digraph,
    pub sets: &'a [VertexSet],
}

impl<C: CopPolicy> LiftedCops<'_, C> {
    fn lift(&self, u: VertexSet) -> VertexSet {
        (0..self.sets.len()).filter(|&i| !self.sets[i].is_disjoint(u)).collect()
    }

    fn robbers_of(&self, r: VertexSet) -> VertexSet {
        r.iter().fold(VertexSet::EMPTY, |acc, i| acc.union(self.sets[i]))
    }
}

impl<C: CopPolicy> CopPolicy for LiftedCops<'_, C> {
    /// Cops on the original graph, the pending announcement there, and the
    /// base strategy's memory.
    type Memory = (VertexSet, VertexSet, C::Memory);

    fn init(&self, _: &Digraph, r: VertexSet) -> Result<Self::Memory> {
        Ok((VertexSet::EMPTY, VertexSet::EMPTY, self.base.init(self.original, self.robbers_of(r))?))
    }

    fn announce(&self, _: &Digraph, mem: &Self::Memory, _: VertexSet, r: VertexSet) -> Result<(VertexSet, Self::Memory)> {
        let (u, _, base) = mem;
        let (u_next, base_next) = self.base.announce(self.original, base, *u, self.robbers_of(r))?;
        Ok((self.lift(u_next), (*u, u_next, base_next)))
    }

    fn observe(&self, _: &Digraph, mem: &Self::Memory, _: VertexSet, _: VertexSet, r: VertexSet, r_next: VertexSet) -> Result<Self::Memory> {
        let (u, u_next, base) = mem;
        let (from, to) = (self.robbers_of(r), self.robbers_of(r_next));
        let region = crate::arena::robber_region(self.original, *u, *u_next, from);
        if !to.is_subset(region) {
            return Err(Error::invariant("knowledge-move", format!("{from} -> {to} is not a legal robber move against {u} -> {u_next}")));
        }
        Ok((*u_next, *u_next, self.base.observe(self.original, base, *u, *u_next, from, to)?))
    }
}

/// Lifts `base` (winning for `k` cops against `r` robbers on `original`)
/// to the knowledge graph and verifies it exhaustively against one robber
/// with `k · 2^(r-1)` cops.
pub fn lift_and_verify<C: CopPolicy>(
    original: &Digraph,
    base: &C,
    k: usize,
    r: usize,
    kg: &KnowledgeGame,
    budget: usize,
) -> Result<Verification> {
    let g = kg.graph()?;
    let lifted = LiftedCops { base, original, sets: &kg.sets };
    let bound = k << (r.max(1) - 1);
    crate::strategy::verify_cop_policy(&g, bound, 1, &lifted, crate::strategy::Adversary::Any, budget)
}

/// Four positions: player 1 at 0 moves to 1 or 2, which player 0 cannot
/// tell apart; from 1 only `a` returns to 0, from 2 only `b` does; the
/// other action leads to the losing sink 3.
pub fn uncertainty_example() -> (ParityGame, ObservationEquiv) {
    let pg = ParityGame::new(
        4,
        vec!["a".into(), "b".into()],
        vec![1, 0, 0, 1],
        vec![2, 2, 2, 1],
        vec![(0, 0, 1), (0, 0, 2), (1, 0, 0), (1, 1, 3), (2, 0, 3), (2, 1, 0), (3, 0, 3)],
        0,
    )
    .expect("well-formed");
    let eq = ObservationEquiv::from_classes(4, &[vec![1, 2]]).expect("partition");
    (pg, eq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(color: u32, owner: u8) -> ParityGame {
        ParityGame::new(1, vec!["a".into()], vec![owner], vec![color], vec![(0, 0, 0)], 0).unwrap()
    }

    #[test]
    fn self_loop_winner_is_color_parity() {
        for owner in 0..2 {
            assert_eq!(zielonka_solve(&single(0, owner)).unwrap().0.winner, vec![0]);
            assert_eq!(zielonka_solve(&single(1, owner)).unwrap().0.winner, vec![1]);
        }
    }

    #[test]
    fn validation_reports_color_clash() {
        let pg = ParityGame::new(2, vec!["a".into()], vec![0, 0], vec![0, 1], vec![(0, 0, 1), (1, 0, 0)], 0).unwrap();
        assert!(validate(&pg, &ObservationEquiv::identity(2)).is_empty());
        let eq = ObservationEquiv::from_classes(2, &[vec![0, 1]]).unwrap();
        let v = validate(&pg, &eq);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("0 and 1"));
        let dead = ParityGame::new(1, vec!["a".into()], vec![0], vec![0], vec![], 0).unwrap();
        assert!(validate(&dead, &ObservationEquiv::identity(1))[0].contains("self-loop"));
    }

    #[test]
    fn file_round_trip() {
        let (pg, eq) = uncertainty_example();
        let text = pg.emit();
        assert_eq!(ParityGame::parse(&text).unwrap(), pg);
        assert_eq!(ObservationEquiv::parse(4, &eq.emit()).unwrap(), eq);
        let err = ParityGame::parse("positions 2 actions a\n0 0 0\n1 0 1\nmove 0 a 5\ninit 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn identity_knowledge_is_the_reachable_game() {
        let (pg, _) = uncertainty_example();
        let kg = powerset_construct(&pg, &ObservationEquiv::identity(4)).unwrap();
        assert_eq!(kg.sets.len(), 4);
        assert_eq!(kg.max_set_size(), 1);
    }

    #[test]
    fn uncertainty_changes_the_winner() {
        let (pg, eq) = uncertainty_example();
        let id = solve_imperfect(&pg, &ObservationEquiv::identity(4)).unwrap();
        assert_eq!(id.winner, 0);
        assert_eq!(id.verified, Some(Ok(3)));
        assert_eq!(solve_imperfect(&pg, &eq).unwrap().winner, 1);
        assert_eq!(zielonka_solve(&pg).unwrap().0.winner[0], 0);
    }

    #[test]
    fn lifting_holds_on_example() {
        let (pg, eq) = uncertainty_example();
        let kg = powerset_construct(&pg, &eq).unwrap();
        assert!(check_history_lifting(&pg, &kg, 6).unwrap() > 1);
    }
}
