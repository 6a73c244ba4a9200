//! The strategy multiplier: turns a positional monotone winning strategy
//! `f` for `k` cops against one robber into a memory strategy for `r·k`
//! cops against `r` prudent isolating robbers.
//!
//! The memory keeps a chain of single-robber histories of `f`, each a
//! strict prefix of the next, together with the robbers still attributed
//! to each history and the vertices where that history's placements were
//! omitted. Only the longest history is actively played; shorter ones hold
//! their cops until their robbers leave.

use std::collections::HashMap;

use serde::Serialize;

use crate::arena::{is_monotone_move, robber_region, SearchConfig, SearchPosition};
use crate::digraph::{Digraph, VertexSet};
use crate::error::{Error, Result};
use crate::strategy::{cleanup_strategy, is_isolating, is_prudent, Adversary, CopPolicy, PositionalCopStrategy};

/// A position of the single-robber game inside a stored history.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "turn")]
pub enum HPos {
    Bot,
    Cop { w: VertexSet, b: usize },
    Rob { w_prev: VertexSet, w: VertexSet, b: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Entry {
    pub rho: Vec<HPos>,
    pub robbers: VertexSet,
    pub omitted: VertexSet,
}

/// `entries` are the histories with attached robbers and omitted sets;
/// `last` is the longest history.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Zeta {
    pub entries: Vec<Entry>,
    pub last: Vec<HPos>,
}

impl Zeta {
    /// Number of histories.
    pub fn len(&self) -> usize {
        self.entries.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn history(&self, i: usize) -> &[HPos] {
        if i < self.entries.len() {
            &self.entries[i].rho
        } else {
            &self.last
        }
    }
}

/// Sets derived from a memory state; index `i` is the `(i+1)`-th history.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedSets {
    pub w: Vec<VertexSet>,
    pub w_prev: Vec<Option<VertexSet>>,
    pub b: Vec<usize>,
    /// Team sets: `W_i` minus the omitted sets of shorter histories.
    pub teams: Vec<VertexSet>,
    /// `omitted_below[i]` is the union of the omitted sets of histories before `i`.
    pub omitted_below: Vec<VertexSet>,
    /// Robbers per history; the longest one holds `{b_s}` if that robber is on the board.
    pub robbers: Vec<VertexSet>,
}

impl DerivedSets {
    pub fn compute(zeta: &Zeta, r: VertexSet) -> Result<DerivedSets> {
        let s = zeta.len();
        let mut d = DerivedSets {
            w: Vec::with_capacity(s),
            w_prev: Vec::with_capacity(s),
            b: Vec::with_capacity(s),
            teams: Vec::with_capacity(s),
            omitted_below: Vec::with_capacity(s),
            robbers: Vec::with_capacity(s),
        };
        let mut below = VertexSet::EMPTY;
        for i in 0..s {
            let (w_prev, w, b) = match zeta.history(i).last() {
                Some(&HPos::Rob { w_prev, w, b }) => (Some(w_prev), w, b),
                Some(&HPos::Cop { w, b }) if i + 1 == s => (None, w, b),
                other => {
                    return Err(Error::invariant("history shape", format!("history {} ends in {other:?}", i + 1)));
                }
            };
            d.w.push(w);
            d.w_prev.push(w_prev);
            d.b.push(b);
            d.teams.push(w.difference(below));
            d.omitted_below.push(below);
            if i + 1 < s {
                d.robbers.push(zeta.entries[i].robbers);
                below = below.union(zeta.entries[i].omitted);
            } else {
                d.robbers.push(if r.contains(b) { VertexSet::singleton(b) } else { VertexSet::EMPTY });
            }
        }
        Ok(d)
    }

    pub fn s(&self) -> usize {
        self.w.len()
    }

    /// Union of the teams of the first `i` histories.
    pub fn teams_upto(&self, i: usize) -> VertexSet {
        self.teams[..i].iter().fold(VertexSet::EMPTY, |a, &t| a.union(t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CaseTag {
    #[serde(rename = "I-empty")]
    IEmpty,
    #[serde(rename = "I-nonempty")]
    INonempty,
    #[serde(rename = "II.1a")]
    II1a,
    #[serde(rename = "II.1b")]
    II1b,
    #[serde(rename = "II.1c")]
    II1c,
    #[serde(rename = "II.2")]
    II2,
    Won,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RobberCase {
    Unchanged,
    /// A new longest history splits off for one of the robbers.
    Split,
    /// Robbers are re-attributed; no history is added.
    Reattributed,
}

pub fn init_memory(g: &Digraph, first: VertexSet) -> Result<Zeta> {
    if !g.is_strongly_connected() {
        return Err(Error::Precondition("the multiplier needs a strongly connected graph".into()));
    }
    if first.len() != 1 {
        return Err(Error::Precondition(format!("robbers must start on a single vertex, got {first}")));
    }
    let b = first.min().expect("one robber");
    Ok(Zeta { entries: Vec::new(), last: vec![HPos::Bot, HPos::Cop { w: VertexSet::EMPTY, b }] })
}

fn extended(rho: &[HPos], more: &[HPos]) -> Vec<HPos> {
    let mut v = rho.to_vec();
    v.extend_from_slice(more);
    v
}

/// The cops' move from `(u, r)` with memory `zeta`.
pub fn cop_move_multiply(
    g: &Digraph,
    f: &PositionalCopStrategy,
    u: VertexSet,
    r: VertexSet,
    zeta: &Zeta,
) -> Result<(VertexSet, Zeta, CaseTag)> {
    let d = DerivedSets::compute(zeta, r)?;
    let s = d.s();
    let top = s - 1;
    if !r.contains(d.b[top]) {
        if s == 1 {
            return Ok((u, zeta.clone(), CaseTag::Won));
        }
        let u_next = d.teams_upto(s - 1);
        let mut z = zeta.clone();
        let prev = z.entries.pop().expect("s > 1");
        let w = d.w[top - 1];
        if prev.robbers.is_empty() {
            z.last = extended(&prev.rho, &[HPos::Cop { w, b: d.b[top] }]);
            return Ok((u_next, z, CaseTag::IEmpty));
        }
        let b = prev.robbers.min().expect("nonempty");
        let rest = prev.robbers.without(b);
        let omitted = g.reach_excluding(w, rest);
        z.last = extended(&prev.rho, &[HPos::Cop { w, b }]);
        z.entries.push(Entry { rho: prev.rho, robbers: rest, omitted });
        return Ok((u_next, z, CaseTag::INonempty));
    }

    if let Some(i) = zeta.entries.iter().position(|e| e.robbers.is_empty()) {
        let rho_i = &zeta.entries[i].rho;
        let rho_next = zeta.history(i + 1);
        if rho_next.len() <= rho_i.len() || !rho_next.starts_with(rho_i) {
            return Err(Error::invariant("Lin", format!("history {} does not extend history {}", i + 2, i + 1)));
        }
        let b_t = match rho_next[rho_i.len()] {
            HPos::Cop { w, b } if w == d.w[i] => b,
            other => return Err(Error::invariant("Lin", format!("history {} continues with {other:?}", i + 2))),
        };
        let eta = &rho_next[rho_i.len() + 1..];
        if eta.is_empty() {
            if i + 1 != top {
                return Err(Error::invariant(
                    "Lin",
                    format!("history {} ends right after history {} but is not the longest", i + 2, i + 1),
                ));
            }
            let mut z = zeta.clone();
            z.entries.remove(i);
            return Ok((u, z, CaseTag::II1a));
        }
        let w_t = f.get(d.w[i], VertexSet::singleton(b_t))?;
        let mut u_next = w_t.difference(d.omitted_below[i]);
        for (j, &t) in d.teams.iter().enumerate() {
            if j != i {
                u_next = u_next.union(t);
            }
        }
        let omitted = zeta.entries[i].omitted.intersection(g.reach_excluding(d.w[i], VertexSet::singleton(b_t))).difference(w_t);
        let rho_t = extended(rho_i, &[HPos::Cop { w: d.w[i], b: b_t }, HPos::Rob { w_prev: d.w[i], w: w_t, b: b_t }]);
        let mut z = zeta.clone();
        if rho_t.as_slice() != rho_next {
            z.entries[i] = Entry { rho: rho_t, robbers: VertexSet::EMPTY, omitted };
            return Ok((u_next, z, CaseTag::II1b));
        }
        if i + 1 == top {
            return Err(Error::invariant("Cops", "the longest history ends in a robber position at a cop turn"));
        }
        z.entries[i + 1].omitted = z.entries[i + 1].omitted.union(omitted);
        z.entries.remove(i);
        return Ok((u_next, z, CaseTag::II1c));
    }

    if !matches!(zeta.last.last(), Some(HPos::Cop { .. })) {
        return Err(Error::invariant("Cops", "the pursued robber's history ends in a robber position at a cop turn"));
    }
    let w_t = f.get(d.w[top], VertexSet::singleton(d.b[top]))?;
    let u_next = d.teams_upto(top).union(w_t.difference(d.omitted_below[top]));
    let mut z = zeta.clone();
    z.last.push(HPos::Rob { w_prev: d.w[top], w: w_t, b: d.b[top] });
    Ok((u_next, z, CaseTag::II2))
}

/// The memory update after the robbers move from `r` to `r_next` while the
/// cops stand on `u` (already moved). `before` is the memory before the
/// cops' move, used only for assertions.
pub fn robber_update_multiply(
    g: &Digraph,
    r: VertexSet,
    r_next: VertexSet,
    zeta: &Zeta,
    before: Option<&Zeta>,
) -> Result<(Zeta, RobberCase)> {
    let ends_in_cop = matches!(zeta.last.last(), Some(HPos::Cop { .. }));
    // After a move that placed no cop against the pursued robber, prudent
    // robbers can only stay or drop out; vanished robbers are forgotten.
    if ends_in_cop && r_next.is_subset(r) {
        if r_next == r {
            return Ok((zeta.clone(), RobberCase::Unchanged));
        }
        let mut z = zeta.clone();
        for e in &mut z.entries {
            e.robbers = e.robbers.intersection(r_next);
        }
        return Ok((z, RobberCase::Reattributed));
    }
    let d = DerivedSets::compute(zeta, r)?;
    let s = d.s();
    let top = s - 1;
    let mut assigned = vec![VertexSet::EMPTY; s];
    for b in r_next.iter() {
        let i = zeta.entries.iter().position(|e| e.omitted.contains(b)).unwrap_or(top);
        assigned[i].insert(b);
    }
    if ends_in_cop && !assigned[top].is_subset(VertexSet::singleton(d.b[top])) {
        return Err(Error::invariant(
            "cop-ending attribution",
            format!("robbers {} attributed to a history ending in a cop position at {}", assigned[top], d.b[top]),
        ));
    }
    if let Some(bar) = before {
        let bd = DerivedSets::compute(bar, r)?;
        let bt = bd.s() - 1;
        let reach = g.reach_excluding(bd.w[bt], VertexSet::singleton(bd.b[bt]));
        if !assigned[top].is_subset(reach) {
            return Err(Error::invariant(
                "pursued reach",
                format!("robbers {} escape the pursued robber's reach {reach}", assigned[top].difference(reach)),
            ));
        }
    }
    let mut z = zeta.clone();
    for (e, &a) in z.entries.iter_mut().zip(&assigned) {
        e.robbers = a;
    }
    if !ends_in_cop && !assigned[top].is_empty() {
        let b = assigned[top].min().expect("nonempty");
        let rest = assigned[top].without(b);
        let omitted = g.reach_excluding(d.w[top], rest);
        let rho = std::mem::take(&mut z.last);
        z.last = extended(&rho, &[HPos::Cop { w: d.w[top], b }]);
        z.entries.push(Entry { rho, robbers: rest, omitted });
        return Ok((z, RobberCase::Split));
    }
    Ok((z, RobberCase::Reattributed))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub name: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub violations: Vec<Violation>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, name: &str, detail: String) {
        self.violations.push(Violation { name: name.into(), detail });
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::Invariant { name: v.name, detail: v.detail }),
        }
    }
}

/// `None` if `rho` is a history consistent with `f`, else the offending step.
pub fn inconsistency(g: &Digraph, f: &PositionalCopStrategy, rho: &[HPos]) -> Option<String> {
    if rho.first() != Some(&HPos::Bot) {
        return Some("history does not start at the initial position".into());
    }
    for (step, pair) in rho.windows(2).enumerate() {
        let ok = match (pair[0], pair[1]) {
            (HPos::Bot, HPos::Cop { w, b }) => w.is_empty() && b < g.n(),
            (HPos::Cop { w, b }, HPos::Rob { w_prev, w: w2, b: b2 }) => {
                w_prev == w && b == b2 && f.get(w, VertexSet::singleton(b)).ok() == Some(w2)
            }
            (HPos::Rob { w_prev, w, b }, HPos::Cop { w: w2, b: b2 }) => {
                w == w2 && robber_region(g, w_prev, w, VertexSet::singleton(b)).contains(b2)
            }
            _ => false,
        };
        if !ok {
            return Some(format!("step {step}: {:?} -> {:?}", pair[0], pair[1]));
        }
    }
    None
}

/// Re-derives every memory invariant and the derived lemmas from scratch.
/// `cop_turn` selects the extra condition that holds at cop positions.
pub fn check_invariants(
    g: &Digraph,
    f: &PositionalCopStrategy,
    u: VertexSet,
    r: VertexSet,
    zeta: &Zeta,
    cop_turn: bool,
) -> InvariantReport {
    let mut rep = InvariantReport::default();
    let s = zeta.len();
    let hist: Vec<&[HPos]> = (0..s).map(|i| zeta.history(i)).collect();
    let mut w = Vec::new();
    let mut w_prev = Vec::new();
    let mut b = Vec::new();
    for (i, h) in hist.iter().enumerate() {
        match h.last() {
            Some(&HPos::Rob { w_prev: p, w: x, b: y }) => {
                w_prev.push(Some(p));
                w.push(x);
                b.push(y);
            }
            Some(&HPos::Cop { w: x, b: y }) if i + 1 == s => {
                w_prev.push(None);
                w.push(x);
                b.push(y);
            }
            other => {
                rep.fail("Lin", format!("history {} ends in {other:?}", i + 1));
                return rep;
            }
        }
    }
    let top = s - 1;
    let mut rob: Vec<VertexSet> = zeta.entries.iter().map(|e| e.robbers).collect();
    rob.push(if r.contains(b[top]) { VertexSet::singleton(b[top]) } else { VertexSet::EMPTY });
    let om: Vec<VertexSet> = zeta.entries.iter().map(|e| e.omitted).collect();
    let om_upto = |i: usize| om[..i].iter().fold(VertexSet::EMPTY, |a, &o| a.union(o));
    let team = |i: usize| w[i].difference(om_upto(i));
    let teams_upto = |i: usize| (0..i).fold(VertexSet::EMPTY, |a, j| a.union(team(j)));
    let w_upto = |i: usize| w[..i].iter().fold(VertexSet::EMPTY, |a, &x| a.union(x));
    let reach = |x: VertexSet, y: VertexSet| g.reach_excluding(x, y);
    let one = VertexSet::singleton;

    for i in 0..top {
        if !(hist[i].len() < hist[i + 1].len() && hist[i + 1].starts_with(hist[i])) {
            rep.fail("Lin", format!("history {} is not a strict prefix of history {}", i + 1, i + 2));
        }
    }
    for (i, h) in hist.iter().enumerate() {
        if let Some(step) = inconsistency(g, f, h) {
            rep.fail("Cons", format!("history {}: {step}", i + 1));
        }
    }
    let mut union = VertexSet::EMPTY;
    for (i, &x) in rob.iter().enumerate() {
        if !union.is_disjoint(x) {
            rep.fail("Robs", format!("robbers {} attributed twice (history {})", union.intersection(x), i + 1));
        }
        union = union.union(x);
    }
    if union != r {
        rep.fail("Robs", format!("attributed robbers {union} differ from the board {r}"));
    }
    let all_teams = teams_upto(s);
    if all_teams != u {
        rep.fail("Cops", format!("teams cover {all_teams}, the board has cops on {u}"));
    }
    if cop_turn && r.contains(b[top]) && w_prev[top].is_some() {
        rep.fail("Cops", format!("pursued robber {} is on the board but its history ends in a robber position", b[top]));
    }
    for i in 0..top {
        if !rob[i].is_subset(om[i]) {
            rep.fail("Omit", format!("history {}: robbers {} outside the omitted set", i + 1, rob[i].difference(om[i])));
        }
        let closure = reach(w[i], om[i]);
        if closure != om[i] {
            rep.fail("Omit", format!("history {}: omitted set not closed, reaches {}", i + 1, closure.difference(om[i])));
        }
        let ext = reach(w_prev[i].unwrap_or_default(), one(b[i]));
        if !om[i].is_subset(ext) {
            rep.fail("Ext", format!("history {}: omitted vertices {} beyond the robber's reach", i + 1, om[i].difference(ext)));
        }
        if i >= 1 && !rob[i].is_disjoint(om_upto(i)) {
            rep.fail("Progress", format!("history {}: robbers {} inside shorter omitted sets", i + 1, rob[i].intersection(om_upto(i))));
        }
    }
    if om_upto(top).contains(b[top]) {
        rep.fail("Progress", format!("pursued robber {} lies in an omitted set", b[top]));
    }
    for i in 0..top {
        let wp = w_prev[i].unwrap_or_default();
        for x in rob[i].iter() {
            if !robber_region(g, wp, w[i], one(b[i])).contains(x) {
                rep.fail("extendable", format!("history {} cannot be extended to robber {x}", i + 1));
            }
            if reach(w[i], one(x)) != reach(w_upto(i + 1), one(x)) {
                rep.fail("shorter cops", format!("history {}: robber {x} is cut off by shorter histories' cops", i + 1));
            }
            if reach(u, one(x)) != reach(teams_upto(i + 1), one(x)) {
                rep.fail("longer cops", format!("history {}: robber {x} is cut off by longer histories' cops", i + 1));
            }
        }
        let area = reach(teams_upto(i + 1), rob[i]);
        if !area.is_subset(om_upto(i + 1)) {
            rep.fail("robber area", format!("history {}: robbers reach {} outside the omitted sets", i + 1, area.difference(om_upto(i + 1))));
        }
    }
    if reach(w[top], one(b[top])) != reach(w_upto(s), one(b[top])) {
        rep.fail("shorter cops", format!("pursued robber {} is cut off by shorter histories' cops", b[top]));
    }
    rep
}

/// Memory of the multiplier: the state proper, plus the pre-move state and
/// cop set kept between an announcement and the robbers' answer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MultiplyMemory {
    pub zeta: Zeta,
    #[serde(skip)]
    pub before: Option<(Zeta, VertexSet)>,
}

/// The multiplied strategy for `r·k` cops.
#[derive(Clone, Debug)]
pub struct Multiplier {
    pub f: PositionalCopStrategy,
    pub r: usize,
    /// Assert every invariant after each half-move.
    pub checked: bool,
}

impl Multiplier {
    pub fn k(&self) -> usize {
        self.f.k
    }

    pub fn cop_bound(&self) -> usize {
        self.r * self.f.k
    }

    fn assert_bounds(&self, zeta: &Zeta) -> Result<()> {
        let s = zeta.len();
        if s > self.r + 1 {
            return Err(Error::invariant("history count", format!("{s} histories for {} robbers", self.r)));
        }
        if s == self.r + 1 {
            let d = DerivedSets::compute(zeta, VertexSet::EMPTY)?;
            if d.w[s - 1] != d.w[s - 2] {
                return Err(Error::invariant("history count", "r+1 histories whose two longest place different cops"));
            }
        }
        Ok(())
    }

    /// The cops' half-move with all assertions; returns the case taken.
    pub fn step_cops(&self, g: &Digraph, mem: &MultiplyMemory, u: VertexSet, r: VertexSet) -> Result<(VertexSet, MultiplyMemory, CaseTag)> {
        let (u_next, zeta, tag) = cop_move_multiply(g, &self.f, u, r, &mem.zeta)?;
        if !is_monotone_move(g, u, u_next, r) {
            return Err(Error::invariant("monotone", format!("move {u} -> {u_next} is not monotone against {r} ({tag:?})")));
        }
        if u_next.len() > self.cop_bound() {
            return Err(Error::invariant("cop bound", format!("{} cops exceed {}", u_next.len(), self.cop_bound())));
        }
        if self.checked && tag != CaseTag::Won {
            self.assert_bounds(&zeta)?;
            check_invariants(g, &self.f, u_next, r, &zeta, false).into_result()?;
        }
        Ok((u_next, MultiplyMemory { zeta, before: Some((mem.zeta.clone(), u)) }, tag))
    }

    /// The memory update for the robbers' half-move.
    pub fn step_robbers(
        &self,
        g: &Digraph,
        mem: &MultiplyMemory,
        u_next: VertexSet,
        r: VertexSet,
        r_next: VertexSet,
    ) -> Result<(MultiplyMemory, RobberCase)> {
        if !is_prudent(g, u_next, r, r_next) || !is_isolating(g, u_next, r_next) {
            return Err(Error::Precondition(format!("robber move {r} -> {r_next} is not prudent and isolating")));
        }
        let before = mem.before.as_ref().map(|(z, _)| z);
        let (zeta, case) = robber_update_multiply(g, r, r_next, &mem.zeta, before)?;
        if self.checked {
            self.assert_bounds(&zeta)?;
            check_invariants(g, &self.f, u_next, r_next, &zeta, true).into_result()?;
        }
        Ok((MultiplyMemory { zeta, before: None }, case))
    }
}

impl CopPolicy for Multiplier {
    type Memory = MultiplyMemory;

    fn init(&self, g: &Digraph, r: VertexSet) -> Result<MultiplyMemory> {
        let zeta = init_memory(g, r)?;
        if self.checked {
            check_invariants(g, &self.f, VertexSet::EMPTY, r, &zeta, true).into_result()?;
        }
        Ok(MultiplyMemory { zeta, before: None })
    }

    fn announce(&self, g: &Digraph, mem: &MultiplyMemory, u: VertexSet, r: VertexSet) -> Result<(VertexSet, MultiplyMemory)> {
        self.step_cops(g, mem, u, r).map(|(u2, m, _)| (u2, m))
    }

    fn observe(
        &self,
        g: &Digraph,
        mem: &MultiplyMemory,
        _u: VertexSet,
        u_next: VertexSet,
        r: VertexSet,
        r_next: VertexSet,
    ) -> Result<MultiplyMemory> {
        self.step_robbers(g, mem, u_next, r, r_next).map(|(m, _)| m)
    }
}

/// Builds the multiplied strategy from a winning single-robber strategy,
/// normalizing it first.
pub fn multiply_strategy(g: &Digraph, f: &PositionalCopStrategy, r: usize, budget: usize) -> Result<Multiplier> {
    if r == 0 {
        return Err(Error::Config("at least one robber is required".into()));
    }
    if !g.is_strongly_connected() {
        return Err(Error::Precondition("the multiplier needs a strongly connected graph".into()));
    }
    let f = cleanup_strategy(g, f, budget)?;
    Ok(Multiplier { f, r, checked: true })
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub mover: &'static str,
    #[serde(rename = "U")]
    pub u: VertexSet,
    #[serde(rename = "U'")]
    pub u_next: VertexSet,
    #[serde(rename = "R")]
    pub r: VertexSet,
    pub case_tag: String,
    pub zeta: Zeta,
    pub invariant_report: InvariantReport,
}

/// The play against the prudent isolating adversary that lasts longest,
/// recorded half-move by half-move. The multiplier must already be known
/// to win (the search assumes finite plays).
pub fn longest_trace(g: &Digraph, m: &Multiplier, budget: usize) -> Result<Vec<TraceRecord>> {
    type Key = (VertexSet, VertexSet, Zeta);
    struct Search<'a> {
        g: &'a Digraph,
        m: &'a Multiplier,
        memo: HashMap<Key, (usize, Option<VertexSet>)>,
        budget: usize,
    }
    impl Search<'_> {
        fn depth(&mut self, u: VertexSet, r: VertexSet, mem: &MultiplyMemory) -> Result<usize> {
            let key = (u, r, mem.zeta.clone());
            if let Some(&(d, _)) = self.memo.get(&key) {
                return Ok(d);
            }
            if self.memo.len() > self.budget {
                return Err(Error::Budget { budget: self.budget, k: Some(self.m.cop_bound()) });
            }
            let (u2, mem2, _) = self.m.step_cops(self.g, mem, u, r)?;
            let region = robber_region(self.g, u, u2, r);
            let mut best = (1, None);
            for r2 in region.subsets_up_to(self.m.r).filter(|s| !s.is_empty()) {
                if !(is_prudent(self.g, u2, r, r2) && is_isolating(self.g, u2, r2)) {
                    continue;
                }
                let (mem3, _) = self.m.step_robbers(self.g, &mem2, u2, r, r2)?;
                let d = 1 + self.depth(u2, r2, &mem3)?;
                if d > best.0 {
                    best = (d, Some(r2));
                }
            }
            self.memo.insert(key, best);
            Ok(best.0)
        }
    }
    let mut search = Search { g, m, memo: HashMap::new(), budget };
    let mut best_start = None;
    let mut best_len = 0;
    for v in g.vertices().iter() {
        let r0 = VertexSet::singleton(v);
        let mem = MultiplyMemory { zeta: init_memory(g, r0)?, before: None };
        let d = search.depth(VertexSet::EMPTY, r0, &mem)?;
        if d > best_len {
            best_len = d;
            best_start = Some(r0);
        }
    }
    let r0 = best_start.ok_or_else(|| Error::Precondition("empty graph".into()))?;
    let mut out = Vec::new();
    let (mut u, mut r) = (VertexSet::EMPTY, r0);
    let mut mem = MultiplyMemory { zeta: init_memory(g, r0)?, before: None };
    loop {
        let (u2, mem2, tag) = m.step_cops(g, &mem, u, r)?;
        out.push(TraceRecord {
            step: out.len(),
            mover: "cops",
            u,
            u_next: u2,
            r,
            case_tag: serde_json::to_value(tag).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            zeta: mem2.zeta.clone(),
            invariant_report: check_invariants(g, &m.f, u2, r, &mem2.zeta, false),
        });
        let Some(&(_, Some(r2))) = search.memo.get(&(u, r, mem.zeta.clone())) else { break };
        let (mem3, case) = m.step_robbers(g, &mem2, u2, r, r2)?;
        out.push(TraceRecord {
            step: out.len(),
            mover: "robbers",
            u,
            u_next: u2,
            r: r2,
            case_tag: format!("{case:?}"),
            zeta: mem3.zeta.clone(),
            invariant_report: check_invariants(g, &m.f, u2, r2, &mem3.zeta, true),
        });
        (u, r, mem) = (u2, r2, mem3);
    }
    Ok(out)
}

/// Plays the multiplier against every prudent isolating robber strategy.
pub fn verify_multiplier(g: &Digraph, m: &Multiplier, budget: usize) -> Result<crate::strategy::Verification> {
    crate::strategy::verify_cop_policy(g, m.cop_bound(), m.r, m, Adversary::PrudentIsolating, budget)
}

/// The single-robber trace as positions of the searching game.
pub fn as_positions(rho: &[HPos]) -> Vec<SearchPosition> {
    rho.iter()
        .map(|p| match *p {
            HPos::Bot => SearchPosition::Initial,
            HPos::Cop { w, b } => SearchPosition::CopTurn { u: w, r: VertexSet::singleton(b) },
            HPos::Rob { w_prev, w, b } => SearchPosition::RobberTurn { u: w_prev, u_next: w, r: VertexSet::singleton(b) },
        })
        .collect()
}

/// Convenience: solver-derived `f` for `k` cops, then multiplied by `r`.
pub fn multiplier_from_solver(g: &Digraph, k: usize, r: usize, budget: usize) -> Result<Option<Multiplier>> {
    let res = crate::arena::solve_search(g, &SearchConfig::visible(k, 1).with_budget(budget))?;
    match res.cop_strategy() {
        Some(f) => multiply_strategy(g, &f, r, budget).map(Some),
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::DEFAULT_BUDGET;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    fn c3_f() -> PositionalCopStrategy {
        let c3 = Digraph::cycle(3).unwrap();
        let f = crate::arena::solve_search(&c3, &SearchConfig::visible(2, 1)).unwrap().cop_strategy().unwrap();
        cleanup_strategy(&c3, &f, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn init_examples() {
        let c3 = Digraph::cycle(3).unwrap();
        let z = init_memory(&c3, set(&[0])).unwrap();
        assert_eq!(z.last, vec![HPos::Bot, HPos::Cop { w: VertexSet::EMPTY, b: 0 }]);
        assert!(check_invariants(&c3, &c3_f(), VertexSet::EMPTY, set(&[0]), &z, true).passed());
        assert!(matches!(init_memory(&c3, set(&[0, 2])), Err(Error::Precondition(_))));
        let path = Digraph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(matches!(init_memory(&path, set(&[0])), Err(Error::Precondition(_))));
    }

    #[test]
    fn first_move_follows_f() {
        let c3 = Digraph::cycle(3).unwrap();
        let f = c3_f();
        let z = init_memory(&c3, set(&[0])).unwrap();
        let (u2, z2, tag) = cop_move_multiply(&c3, &f, VertexSet::EMPTY, set(&[0]), &z).unwrap();
        assert_eq!(tag, CaseTag::II2);
        assert_eq!(u2, f.get(VertexSet::EMPTY, set(&[0])).unwrap());
        assert_eq!(z2.len(), 1);
        let (_, _, tag) = cop_move_multiply(&c3, &f, VertexSet::EMPTY, VertexSet::EMPTY, &z).unwrap();
        assert_eq!(tag, CaseTag::Won);
    }

    #[test]
    fn unchanged_robbers_keep_memory() {
        let c3 = Digraph::cycle(3).unwrap();
        let z = Zeta { entries: Vec::new(), last: vec![HPos::Bot, HPos::Cop { w: VertexSet::EMPTY, b: 0 }] };
        let (z2, case) = robber_update_multiply(&c3, set(&[0]), set(&[0]), &z, None).unwrap();
        assert_eq!(case, RobberCase::Unchanged);
        assert_eq!(z2, z);
    }

    #[test]
    fn omit_violation_is_reported() {
        let c3 = Digraph::cycle(3).unwrap();
        let f = c3_f();
        let w = f.get(VertexSet::EMPTY, set(&[0])).unwrap();
        let rho = vec![HPos::Bot, HPos::Cop { w: VertexSet::EMPTY, b: 0 }, HPos::Rob { w_prev: VertexSet::EMPTY, w, b: 0 }];
        let free = VertexSet::full(3).difference(w);
        let z = Zeta {
            entries: vec![Entry { rho: rho.clone(), robbers: VertexSet::EMPTY, omitted: free.union(w) }],
            last: extended(&rho, &[HPos::Cop { w, b: free.min().unwrap() }]),
        };
        let rep = check_invariants(&c3, &f, w, VertexSet::EMPTY, &z, true);
        assert!(rep.violations.iter().any(|v| v.name == "Omit"), "{rep:?}");
    }

    #[test]
    fn single_robber_replays_f() {
        let c3 = Digraph::cycle(3).unwrap();
        let m = multiply_strategy(&c3, &c3_f(), 1, DEFAULT_BUDGET).unwrap();
        let v = verify_multiplier(&c3, &m, DEFAULT_BUDGET).unwrap();
        assert!(v.passed, "{:?}", v.failure);
        assert!(v.max_cops <= 2);
    }

    #[test]
    fn two_robbers_on_c3() {
        let c3 = Digraph::cycle(3).unwrap();
        let m = multiply_strategy(&c3, &c3_f(), 2, DEFAULT_BUDGET).unwrap();
        let v = verify_multiplier(&c3, &m, DEFAULT_BUDGET).unwrap();
        assert!(v.passed, "{:?}", v.failure);
        assert!(v.max_cops <= 4);
        let trace = longest_trace(&c3, &m, DEFAULT_BUDGET).unwrap();
        assert!(trace.iter().all(|t| t.invariant_report.passed()));
        assert_eq!(trace.last().unwrap().mover, "cops");
    }
}
