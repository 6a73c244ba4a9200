//! The k-cops / r-robbers searching game (visible robbers), its exact
//! solution by backward induction, the invisible-robber clearing game, and
//! the width measures derived from both.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::{Digraph, VertexSet};
use crate::error::{Error, Result};
use crate::strategy::{PositionalCopStrategy, RobberPolicy};

pub const DEFAULT_BUDGET: usize = 10_000_000;
pub const BUDGET_ENV: &str = "PURSUITWIDTH_BUDGET";

/// The position budget: `PURSUITWIDTH_BUDGET` if set and valid, else the default.
pub fn budget_from_env() -> usize {
    std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub k: usize,
    pub r: usize,
    pub visible: bool,
    pub restrict_to_scc: bool,
    pub budget: usize,
}

impl SearchConfig {
    pub fn visible(k: usize, r: usize) -> Self {
        SearchConfig { k, r, visible: true, restrict_to_scc: false, budget: DEFAULT_BUDGET }
    }

    /// Single robber, cops confined to the robber's component of `G - U`.
    pub fn restricted(k: usize) -> Self {
        SearchConfig { restrict_to_scc: true, ..SearchConfig::visible(k, 1) }
    }

    pub fn with_budget(self, budget: usize) -> Self {
        SearchConfig { budget, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::Config("at least one robber is required".into()));
        }
        if self.restrict_to_scc && self.r > 1 {
            return Err(Error::Config("the component restriction is defined for a single robber only".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "turn")]
pub enum SearchPosition {
    Initial,
    CopTurn { u: VertexSet, r: VertexSet },
    RobberTurn { u: VertexSet, u_next: VertexSet, r: VertexSet },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Winner {
    Cops,
    Robbers,
}

/// Where the robbers may stand after `u -> u_next`: reachable avoiding the
/// cops that stay, minus the landing cops.
pub fn robber_region(g: &Digraph, u: VertexSet, u_next: VertexSet, r: VertexSet) -> VertexSet {
    g.reach_excluding(u.intersection(u_next), r).difference(u_next)
}

pub fn is_monotone_move(g: &Digraph, u: VertexSet, u_next: VertexSet, r: VertexSet) -> bool {
    u.difference(u_next).is_disjoint(g.reach_excluding(u.intersection(u_next), r))
}

/// Announcements available at cop position `(u, r)`.
pub fn announcements(g: &Digraph, cfg: &SearchConfig, u: VertexSet, r: VertexSet) -> Result<Vec<VertexSet>> {
    cfg.validate()?;
    let pool = if cfg.restrict_to_scc {
        let v = r.min().ok_or_else(|| Error::Precondition("no robber on the graph".into()))?;
        g.component_excluding(u, v)
    } else {
        g.vertices()
    };
    Ok(pool.subsets_up_to(cfg.k).collect())
}

pub fn cop_moves(g: &Digraph, cfg: &SearchConfig, pos: &SearchPosition) -> Result<Vec<SearchPosition>> {
    match *pos {
        SearchPosition::CopTurn { u, r } => Ok(announcements(g, cfg, u, r)?
            .into_iter()
            .map(|u_next| SearchPosition::RobberTurn { u, u_next, r })
            .collect()),
        _ => Err(Error::Precondition("cop moves requested at a non-cop position".into())),
    }
}

/// Robber replies from `pos`: from `Initial` every nonempty set of at most
/// `r` vertices; otherwise every `R'` of at most `r` vertices inside the
/// robber region, the empty set included.
pub fn robber_moves(g: &Digraph, cfg: &SearchConfig, pos: &SearchPosition) -> Result<Vec<SearchPosition>> {
    match *pos {
        SearchPosition::Initial => Ok(g
            .vertices()
            .subsets_up_to(cfg.r)
            .filter(|s| !s.is_empty())
            .map(|r| SearchPosition::CopTurn { u: VertexSet::EMPTY, r })
            .collect()),
        SearchPosition::RobberTurn { u, u_next, r } => Ok(robber_region(g, u, u_next, r)
            .subsets_up_to(cfg.r)
            .map(|r_next| SearchPosition::CopTurn { u: u_next, r: r_next })
            .collect()),
        SearchPosition::CopTurn { .. } => Err(Error::Precondition("robber moves requested at a cop position".into())),
    }
}

/// Calls `f` on every `r`-element subset of `x`, stopping when it returns false.
fn all_combinations(x: VertexSet, r: usize, f: &mut impl FnMut(VertexSet) -> bool) -> bool {
    fn go(rest: VertexSet, need: usize, acc: VertexSet, f: &mut impl FnMut(VertexSet) -> bool) -> bool {
        if need == 0 {
            return f(acc);
        }
        if rest.len() < need {
            return true;
        }
        let mut rest = rest;
        while rest.len() >= need {
            let v = rest.pop_min().expect("nonempty");
            if !go(rest, need - 1, acc.with(v), f) {
                return false;
            }
        }
        true
    }
    go(x, r, VertexSet::EMPTY, f)
}

/// Robber replies that dominate all others: the whole region if it fits,
/// else every `r`-subset of it. A cop win against these is a cop win
/// against every subset, so the solver only inspects them.
pub fn maximal_replies(region: VertexSet, r: usize) -> Vec<VertexSet> {
    if region.len() <= r {
        return vec![region];
    }
    let mut out = Vec::new();
    all_combinations(region, r, &mut |s| {
        out.push(s);
        true
    });
    out
}

const UNWON: u32 = u32::MAX;

/// The solved arena: cop positions with their attractor level.
#[derive(Debug)]
pub struct SolvedArena {
    cfg: SearchConfig,
    nodes: Vec<(VertexSet, VertexSet)>,
    index: HashMap<(VertexSet, VertexSet), u32>,
    level: Vec<u32>,
    choice: Vec<VertexSet>,
}

impl SolvedArena {
    fn lookup(&self, u: VertexSet, r: VertexSet) -> Option<usize> {
        self.index.get(&(u, r)).map(|&i| i as usize)
    }

    /// Attractor level of cop position `(u, r)`; `None` if the robbers win there.
    pub fn level(&self, u: VertexSet, r: VertexSet) -> Option<u32> {
        if r.is_empty() {
            return Some(0);
        }
        self.lookup(u, r).map(|i| self.level[i]).filter(|&l| l != UNWON)
    }

    pub fn cops_win_at(&self, u: VertexSet, r: VertexSet) -> bool {
        self.level(u, r).is_some()
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub winner: Winner,
    pub arena_size: usize,
    solved: Arc<SolvedArena>,
}

impl SolveResult {
    pub fn arena(&self) -> &SolvedArena {
        &self.solved
    }

    /// The cops' positional strategy on every cop-winning position.
    pub fn cop_strategy(&self) -> Option<PositionalCopStrategy> {
        if self.winner != Winner::Cops {
            return None;
        }
        let s = &self.solved;
        let moves = s
            .nodes
            .iter()
            .enumerate()
            .filter(|&(i, _)| s.level[i] != UNWON)
            .map(|(i, &key)| (key, s.choice[i]))
            .collect();
        Some(PositionalCopStrategy::new(s.cfg.k, moves))
    }

    pub fn robber_strategy(&self) -> Option<SolvedRobberStrategy> {
        (self.winner == Winner::Robbers).then(|| SolvedRobberStrategy { solved: self.solved.clone() })
    }
}

/// The robbers' positional strategy read off a solved arena: always move
/// to a maximal reply outside the cops' attractor.
#[derive(Debug, Clone)]
pub struct SolvedRobberStrategy {
    solved: Arc<SolvedArena>,
}

impl RobberPolicy for SolvedRobberStrategy {
    type Memory = ();

    fn start(&self, g: &Digraph) -> Result<(VertexSet, ())> {
        maximal_replies(g.vertices(), self.solved.cfg.r)
            .into_iter()
            .find(|&r| !self.solved.cops_win_at(VertexSet::EMPTY, r))
            .map(|r| (r, ()))
            .ok_or_else(|| Error::StrategyHole("initial position (cops win everywhere)".into()))
    }

    fn respond(&self, g: &Digraph, _: &(), u: VertexSet, u_next: VertexSet, r: VertexSet) -> Result<(VertexSet, ())> {
        let region = robber_region(g, u, u_next, r);
        maximal_replies(region, self.solved.cfg.r)
            .into_iter()
            .find(|&r2| !r2.is_empty() && !self.solved.cops_win_at(u_next, r2))
            .map(|r2| (r2, ()))
            .ok_or_else(|| Error::StrategyHole(format!("robber position ({u}, {u_next}, {r})")))
    }
}

/// Solves the visible game exactly. Non-monotone announcements are never
/// chosen by the cops; the cops try to reach a position where the robbers
/// have no nonempty reply.
pub fn solve_search(g: &Digraph, cfg: &SearchConfig) -> Result<SolveResult> {
    cfg.validate()?;
    if !cfg.visible {
        return Err(Error::Config("solve_search needs the visible-robber game; use solve_invisible".into()));
    }
    let all = g.vertices();
    let cop_sets: Vec<VertexSet> = all.subsets_up_to(cfg.k).collect();
    let mut nodes = Vec::new();
    let mut robber_positions = 0usize;
    for &u in &cop_sets {
        for r in all.difference(u).subsets_up_to(cfg.r) {
            if r.is_empty() {
                continue;
            }
            nodes.push((u, r));
            robber_positions += if cfg.restrict_to_scc {
                g.component_excluding(u, r.min().expect("nonempty")).subsets_up_to(cfg.k).count()
            } else {
                cop_sets.len()
            };
            if nodes.len() + robber_positions > cfg.budget {
                return Err(Error::Budget { budget: cfg.budget, k: Some(cfg.k) });
            }
        }
    }
    let index: HashMap<_, _> = nodes.iter().enumerate().map(|(i, &key)| (key, i as u32)).collect();
    let mut level = vec![UNWON; nodes.len()];
    let mut choice = vec![VertexSet::EMPTY; nodes.len()];

    let wins_before = |level: &[u32], t: u32, u2: VertexSet, r2: VertexSet| -> bool {
        r2.is_empty() || index.get(&(u2, r2)).is_some_and(|&j| level[j as usize] < t)
    };

    let mut t = 1u32;
    loop {
        let found: Vec<(usize, VertexSet)> = (0..nodes.len())
            .into_par_iter()
            .filter(|&i| level[i] == UNWON)
            .filter_map(|i| {
                let (u, r) = nodes[i];
                let pool = if cfg.restrict_to_scc {
                    g.component_excluding(u, r.min().expect("nonempty"))
                } else {
                    all
                };
                cop_sets.iter().copied().filter(|u2| u2.is_subset(pool)).find_map(|u2| {
                    if !is_monotone_move(g, u, u2, r) {
                        return None;
                    }
                    let region = robber_region(g, u, u2, r);
                    let ok = if region.len() <= cfg.r {
                        wins_before(&level, t, u2, region)
                    } else {
                        all_combinations(region, cfg.r, &mut |r2| wins_before(&level, t, u2, r2))
                    };
                    ok.then_some((i, u2))
                })
            })
            .collect();
        if found.is_empty() {
            break;
        }
        for (i, u2) in found {
            level[i] = t;
            choice[i] = u2;
        }
        t += 1;
    }

    let solved = SolvedArena { cfg: *cfg, nodes, index, level, choice };
    let cops_win = all
        .subsets_up_to(cfg.r)
        .filter(|r| !r.is_empty())
        .all(|r| solved.cops_win_at(VertexSet::EMPTY, r));
    let arena_size = solved.nodes.len() + robber_positions + 1;
    Ok(SolveResult {
        winner: if cops_win { Winner::Cops } else { Winner::Robbers },
        arena_size,
        solved: Arc::new(solved),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvisibleResult {
    pub cops_win: bool,
    /// Cop placements from the first announcement to the clearing one.
    pub schedule: Vec<VertexSet>,
    pub states: usize,
}

/// One clearing step: `Ok(contaminated')`, or `Err` if the move recontaminates.
pub fn clearing_step(g: &Digraph, u: VertexSet, u_next: VertexSet, contaminated: VertexSet) -> std::result::Result<VertexSet, VertexSet> {
    let spread = g.reach_excluding(u.intersection(u_next), contaminated);
    let lost = u.difference(u_next).intersection(spread);
    if lost.is_empty() {
        Ok(spread.difference(u_next))
    } else {
        Err(lost)
    }
}

/// Monotone clearing against an invisible robber with `k` cops: a search
/// over (cops, contaminated set) from `(∅, V)` for a state with nothing
/// contaminated.
pub fn solve_invisible(g: &Digraph, k: usize, budget: usize) -> Result<InvisibleResult> {
    let all = g.vertices();
    if all.is_empty() {
        return Ok(InvisibleResult { cops_win: true, schedule: Vec::new(), states: 1 });
    }
    let cop_sets: Vec<VertexSet> = all.subsets_up_to(k).collect();
    let start = (VertexSet::EMPTY, all);
    let mut parent: HashMap<(VertexSet, VertexSet), Option<(VertexSet, VertexSet)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some((u, s)) = queue.pop_front() {
        for &u2 in &cop_sets {
            let Ok(s2) = clearing_step(g, u, u2, s) else { continue };
            let next = (u2, s2);
            if parent.contains_key(&next) {
                continue;
            }
            parent.insert(next, Some((u, s)));
            if parent.len() > budget {
                return Err(Error::Budget { budget, k: Some(k) });
            }
            if s2.is_empty() {
                let mut schedule = vec![u2];
                let mut cur = (u, s);
                while let Some(Some(prev)) = parent.get(&cur) {
                    schedule.push(cur.0);
                    cur = *prev;
                }
                schedule.reverse();
                return Ok(InvisibleResult { cops_win: true, schedule, states: parent.len() });
            }
            queue.push_back(next);
        }
    }
    Ok(InvisibleResult { cops_win: false, schedule: Vec::new(), states: parent.len() })
}

/// Replays a placement schedule from `(∅, V)`. Returns the peak cop count,
/// or a description of the first recontamination or of leftover contamination.
pub fn check_schedule(g: &Digraph, schedule: &[VertexSet]) -> std::result::Result<usize, String> {
    let mut u = VertexSet::EMPTY;
    let mut s = g.vertices();
    let mut peak = 0;
    for (step, &u2) in schedule.iter().enumerate() {
        g.check_set(u2).map_err(|e| e.to_string())?;
        peak = peak.max(u2.len());
        s = clearing_step(g, u, u2, s).map_err(|lost| format!("step {step}: recontaminates {lost}"))?;
        u = u2;
    }
    if s.is_empty() {
        Ok(peak)
    } else {
        Err(format!("contaminated at the end: {s}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Cops against `r` visible robbers.
    DwR,
    /// `DwR` on the symmetric closure.
    TwR,
    /// Cops against an invisible robber (cop-count convention).
    Dpw,
    /// `DwR` with a single robber.
    Dw,
    /// Tree-width: `TwR` with one robber, minus one.
    Tw,
}

impl std::str::FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dw_r" => Ok(Measure::DwR),
            "tw_r" => Ok(Measure::TwR),
            "dpw" => Ok(Measure::Dpw),
            "dw" => Ok(Measure::Dw),
            "tw" => Ok(Measure::Tw),
            _ => Err(format!("unknown measure '{s}' (expected dw_r, tw_r, dpw, dw or tw)")),
        }
    }
}

/// Least `k >= 1` with `wins(k)`; `k = n` always wins on a nonempty graph.
fn ascending(n: usize, mut wins: impl FnMut(usize) -> Result<bool>) -> Result<usize> {
    if n == 0 {
        return Ok(0);
    }
    for k in 1..=n {
        if wins(k).map_err(|e| e.with_k(k))? {
            return Ok(k);
        }
    }
    Err(Error::invariant("width", format!("{n} cops failed on a {n}-vertex graph")))
}

pub fn width(g: &Digraph, measure: Measure, r: usize, budget: usize) -> Result<usize> {
    match measure {
        Measure::DwR => ascending(g.n(), |k| {
            Ok(solve_search(g, &SearchConfig::visible(k, r).with_budget(budget))?.winner == Winner::Cops)
        }),
        Measure::TwR => width(&g.symmetric_closure(), Measure::DwR, r, budget),
        Measure::Dw => width(g, Measure::DwR, 1, budget),
        Measure::Tw => Ok(width(g, Measure::TwR, 1, budget)?.saturating_sub(1)),
        Measure::Dpw => ascending(g.n(), |k| Ok(solve_invisible(g, k, budget)?.cops_win)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn cop_move_counts() {
        let one = Digraph::new(1).unwrap();
        let pos = SearchPosition::CopTurn { u: VertexSet::EMPTY, r: set(&[0]) };
        let moves = cop_moves(&one, &SearchConfig::visible(1, 1), &pos).unwrap();
        assert_eq!(moves.len(), 2);
        let c3 = Digraph::cycle(3).unwrap();
        assert_eq!(cop_moves(&c3, &SearchConfig::visible(2, 1), &pos).unwrap().len(), 7);
    }

    #[test]
    fn restriction_needs_one_robber() {
        let c3 = Digraph::cycle(3).unwrap();
        let cfg = SearchConfig { r: 2, ..SearchConfig::restricted(1) };
        let pos = SearchPosition::CopTurn { u: VertexSet::EMPTY, r: set(&[0]) };
        assert!(matches!(cop_moves(&c3, &cfg, &pos), Err(Error::Config(_))));
        assert!(matches!(solve_search(&c3, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn robber_move_examples() {
        let c3 = Digraph::cycle(3).unwrap();
        let cfg = SearchConfig::visible(1, 1);
        let pos = SearchPosition::RobberTurn { u: set(&[1]), u_next: set(&[1]), r: set(&[0]) };
        let got: Vec<_> = robber_moves(&c3, &cfg, &pos).unwrap();
        assert_eq!(
            got,
            vec![
                SearchPosition::CopTurn { u: set(&[1]), r: VertexSet::EMPTY },
                SearchPosition::CopTurn { u: set(&[1]), r: set(&[0]) }
            ]
        );
        let path = Digraph::from_edges(2, &[(0, 1)]).unwrap();
        let pos = SearchPosition::RobberTurn { u: VertexSet::EMPTY, u_next: set(&[0]), r: set(&[0]) };
        assert_eq!(robber_moves(&path, &cfg, &pos).unwrap().len(), 2);
        let init = robber_moves(&c3, &SearchConfig::visible(1, 2), &SearchPosition::Initial).unwrap();
        assert_eq!(init.len(), 3 + 3);
    }

    #[test]
    fn monotonicity_examples() {
        let c3 = Digraph::cycle(3).unwrap();
        assert!(is_monotone_move(&c3, set(&[1]), set(&[1, 2]), set(&[0])));
        assert!(!is_monotone_move(&c3, set(&[1]), VertexSet::EMPTY, set(&[0])));
        let g = Digraph::from_edges(3, &[(0, 2)]).unwrap();
        assert!(is_monotone_move(&g, set(&[1]), set(&[2]), set(&[0])));
    }

    #[test]
    fn small_solves() {
        let one = Digraph::new(1).unwrap();
        assert_eq!(solve_search(&one, &SearchConfig::visible(1, 1)).unwrap().winner, Winner::Cops);
        let c3 = Digraph::cycle(3).unwrap();
        assert_eq!(solve_search(&c3, &SearchConfig::visible(1, 1)).unwrap().winner, Winner::Robbers);
        assert_eq!(solve_search(&c3, &SearchConfig::visible(2, 1)).unwrap().winner, Winner::Cops);
        assert_eq!(width(&c3, Measure::Dw, 1, DEFAULT_BUDGET).unwrap(), 2);
    }

    #[test]
    fn budget_is_enforced() {
        let c3 = Digraph::cycle(3).unwrap();
        let err = solve_search(&c3, &SearchConfig::visible(2, 1).with_budget(5)).unwrap_err();
        assert!(matches!(err, Error::Budget { budget: 5, k: Some(2) }));
        assert_eq!(err.exit_code(), 3);
        let err = width(&c3, Measure::Dpw, 1, 2).unwrap_err();
        assert!(matches!(err, Error::Budget { k: Some(1), .. }));
    }

    #[test]
    fn invisible_small() {
        let one = Digraph::new(1).unwrap();
        assert!(solve_invisible(&one, 1, DEFAULT_BUDGET).unwrap().cops_win);
        let c3 = Digraph::cycle(3).unwrap();
        let res = solve_invisible(&c3, 2, DEFAULT_BUDGET).unwrap();
        assert!(res.cops_win);
        assert_eq!(check_schedule(&c3, &res.schedule), Ok(2));
        assert!(!solve_invisible(&c3, 1, DEFAULT_BUDGET).unwrap().cops_win);
    }

    #[test]
    fn schedule_checker_flags_recontamination() {
        let c3 = Digraph::cycle(3).unwrap();
        let bad = [set(&[0]), set(&[1])];
        assert!(check_schedule(&c3, &bad).unwrap_err().contains("recontaminates"));
    }

    #[test]
    fn maximal_replies_cover() {
        assert_eq!(maximal_replies(set(&[1, 2]), 3), vec![set(&[1, 2])]);
        assert_eq!(maximal_replies(set(&[1, 2, 4]), 2).len(), 3);
        assert_eq!(maximal_replies(VertexSet::EMPTY, 1), vec![VertexSet::EMPTY]);
    }
}
