//! Cop and robber strategies, playouts, exhaustive verification against an
//! adversary, and the normal-form transformations: isolating and prudent
//! robbers, and the cleanup of positional cop strategies.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use crate::arena::{announcements, is_monotone_move, robber_region, SearchConfig, SearchPosition};
use crate::digraph::{Digraph, Sccs, VertexSet};
use crate::error::{Error, Result};

/// A play prefix, starting at `Initial`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct History(pub Vec<SearchPosition>);

impl History {
    pub fn new() -> Self {
        History(vec![SearchPosition::Initial])
    }

    pub fn last(&self) -> SearchPosition {
        *self.0.last().unwrap_or(&SearchPosition::Initial)
    }

    pub fn push(&mut self, p: SearchPosition) {
        self.0.push(p);
    }

    pub fn is_strict_prefix_of(&self, other: &History) -> bool {
        self.0.len() < other.0.len() && other.0.starts_with(&self.0)
    }
}

/// A cop strategy with memory. `announce` fixes the cops' next placement,
/// `observe` folds in the robbers' answer.
pub trait CopPolicy: Sync {
    type Memory: Clone + Eq + Hash + Debug + Send + Sync;

    fn init(&self, g: &Digraph, r: VertexSet) -> Result<Self::Memory>;

    fn announce(&self, g: &Digraph, mem: &Self::Memory, u: VertexSet, r: VertexSet) -> Result<(VertexSet, Self::Memory)>;

    fn observe(
        &self,
        g: &Digraph,
        mem: &Self::Memory,
        u: VertexSet,
        u_next: VertexSet,
        r: VertexSet,
        r_next: VertexSet,
    ) -> Result<Self::Memory>;
}

pub trait RobberPolicy: Sync {
    type Memory: Clone + Eq + Hash + Debug + Send + Sync;

    fn start(&self, g: &Digraph) -> Result<(VertexSet, Self::Memory)>;

    fn respond(
        &self,
        g: &Digraph,
        mem: &Self::Memory,
        u: VertexSet,
        u_next: VertexSet,
        r: VertexSet,
    ) -> Result<(VertexSet, Self::Memory)>;
}

/// Positional cop strategy `(U, R) -> U'`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PositionalCopStrategy {
    pub k: usize,
    moves: HashMap<(VertexSet, VertexSet), VertexSet>,
}

impl PositionalCopStrategy {
    pub fn new(k: usize, moves: HashMap<(VertexSet, VertexSet), VertexSet>) -> Self {
        PositionalCopStrategy { k, moves }
    }

    pub fn get(&self, u: VertexSet, r: VertexSet) -> Result<VertexSet> {
        self.moves.get(&(u, r)).copied().ok_or_else(|| Error::StrategyHole(format!("cop position ({u}, {r})")))
    }

    pub fn insert(&mut self, u: VertexSet, r: VertexSet, u_next: VertexSet) {
        self.moves.insert((u, r), u_next);
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Entries sorted by `(U, R)` bit patterns.
    pub fn entries(&self) -> Vec<((VertexSet, VertexSet), VertexSet)> {
        let mut v: Vec<_> = self.moves.iter().map(|(&k, &u)| (k, u)).collect();
        v.sort_by_key(|&((u, r), _)| (u.bits(), r.bits()));
        v
    }

    /// One line per entry: `U ; R -> U'` with sorted comma lists.
    pub fn to_text(&self) -> String {
        let mut out = format!("# cops {}\n", self.k);
        for ((u, r), u2) in self.entries() {
            out.push_str(&format!("{} ; {} -> {}\n", u.to_list(), r.to_list(), u2.to_list()));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut s = PositionalCopStrategy::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            if let Some(k) = raw.trim().strip_prefix("# cops ") {
                s.k = k.trim().parse().map_err(|_| Error::Parse { line: line_no, msg: "bad cop count".into() })?;
                continue;
            }
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: line_no, msg };
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| bad("expected 'U ; R -> U''".into()))?;
            let (u, r) = lhs.split_once(';').ok_or_else(|| bad("expected ';' between U and R".into()))?;
            let u = VertexSet::parse_list(u).map_err(bad)?;
            let r = VertexSet::parse_list(r).map_err(bad)?;
            let u2 = VertexSet::parse_list(rhs).map_err(bad)?;
            s.k = s.k.max(u2.len());
            s.moves.insert((u, r), u2);
        }
        Ok(s)
    }
}

impl CopPolicy for PositionalCopStrategy {
    type Memory = ();

    fn init(&self, _: &Digraph, _: VertexSet) -> Result<()> {
        Ok(())
    }

    fn announce(&self, _: &Digraph, _: &(), u: VertexSet, r: VertexSet) -> Result<(VertexSet, ())> {
        Ok((self.get(u, r)?, ()))
    }

    fn observe(&self, _: &Digraph, _: &(), _: VertexSet, _: VertexSet, _: VertexSet, _: VertexSet) -> Result<()> {
        Ok(())
    }
}

/// Positional robber strategy `(U, U', R) -> R'` with a fixed start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionalRobberStrategy {
    pub start: VertexSet,
    pub moves: HashMap<(VertexSet, VertexSet, VertexSet), VertexSet>,
}

impl RobberPolicy for PositionalRobberStrategy {
    type Memory = ();

    fn start(&self, _: &Digraph) -> Result<(VertexSet, ())> {
        Ok((self.start, ()))
    }

    fn respond(&self, _: &Digraph, _: &(), u: VertexSet, u_next: VertexSet, r: VertexSet) -> Result<(VertexSet, ())> {
        self.moves
            .get(&(u, u_next, r))
            .map(|&r2| (r2, ()))
            .ok_or_else(|| Error::StrategyHole(format!("robber position ({u}, {u_next}, {r})")))
    }
}

/// No robber can reach another in `G - U`.
pub fn is_isolating(g: &Digraph, u: VertexSet, r: VertexSet) -> bool {
    r.iter().all(|v| g.reach_excluding(u, VertexSet::singleton(v)).intersection(r) == VertexSet::singleton(v))
}

/// Robbers only move to vertices the landing cops cut off from `R`.
pub fn is_prudent(g: &Digraph, u_next: VertexSet, r: VertexSet, r_next: VertexSet) -> bool {
    r_next.difference(r).is_disjoint(g.reach_excluding(u_next, r))
}

/// One vertex per topologically minimal class of `x` in the SCC order of
/// `G - removed`; the smallest index represents its class. Every vertex of
/// `x` is reachable from the result.
pub fn representatives(g: &Digraph, removed: VertexSet, x: VertexSet) -> VertexSet {
    let sccs = Sccs::excluding(g, removed);
    let mut out = VertexSet::EMPTY;
    for v in x.difference(removed).iter() {
        let own = sccs.component(v);
        let dominated = x
            .difference(own)
            .difference(removed)
            .iter()
            .any(|w| g.reach_excluding(removed, VertexSet::singleton(w)).contains(v));
        if !dominated && own.intersection(out).is_empty() {
            out.insert(own.intersection(x).min().expect("v is in its own class"));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    CopsWin,
    RobbersWin,
    NonMonotone,
    BudgetExceeded,
}

#[derive(Clone, Debug, Serialize)]
pub struct Playout {
    pub trace: Vec<SearchPosition>,
    pub verdict: Verdict,
}

fn check_robber_reply(
    g: &Digraph,
    cfg: &SearchConfig,
    u: VertexSet,
    u_next: VertexSet,
    r: VertexSet,
    r_next: VertexSet,
) -> std::result::Result<(), String> {
    let region = robber_region(g, u, u_next, r);
    if !r_next.is_subset(region) {
        return Err(format!("robbers moved to {r_next} outside their region {region}"));
    }
    if r_next.len() > cfg.r {
        return Err(format!("{} robbers exceed the bound {}", r_next.len(), cfg.r));
    }
    Ok(())
}

/// Plays the two strategies against each other. A repeated state is an
/// infinite play and so a robber win.
pub fn playout<C: CopPolicy, R: RobberPolicy>(
    g: &Digraph,
    cfg: &SearchConfig,
    cops: &C,
    robbers: &R,
    step_budget: usize,
) -> Result<Playout> {
    let mut trace = vec![SearchPosition::Initial];
    let (mut r, mut rm) = robbers.start(g)?;
    g.check_set(r)?;
    if r.is_empty() || r.len() > cfg.r {
        return Err(Error::invariant("robber start", format!("{r} is not a legal first move")));
    }
    let mut u = VertexSet::EMPTY;
    let mut cm = cops.init(g, r)?;
    let mut seen = HashSet::new();
    for _ in 0..step_budget {
        trace.push(SearchPosition::CopTurn { u, r });
        if !seen.insert((u, r, cm.clone(), rm.clone())) {
            return Ok(Playout { trace, verdict: Verdict::RobbersWin });
        }
        let (u_next, cm1) = cops.announce(g, &cm, u, r)?;
        g.check_set(u_next)?;
        if u_next.len() > cfg.k {
            return Err(Error::invariant("cop bound", format!("{u_next} has more than {} cops", cfg.k)));
        }
        trace.push(SearchPosition::RobberTurn { u, u_next, r });
        if !is_monotone_move(g, u, u_next, r) {
            return Ok(Playout { trace, verdict: Verdict::NonMonotone });
        }
        if robber_region(g, u, u_next, r).is_empty() {
            return Ok(Playout { trace, verdict: Verdict::CopsWin });
        }
        let (r_next, rm1) = robbers.respond(g, &rm, u, u_next, r)?;
        check_robber_reply(g, cfg, u, u_next, r, r_next).map_err(|d| Error::invariant("legal robber move", d))?;
        cm = cops.observe(g, &cm1, u, u_next, r, r_next)?;
        rm = rm1;
        (u, r) = (u_next, r_next);
        if r.is_empty() {
            trace.push(SearchPosition::CopTurn { u, r });
            return Ok(Playout { trace, verdict: Verdict::CopsWin });
        }
    }
    Ok(Playout { trace, verdict: Verdict::BudgetExceeded })
}

/// Which robber replies an exhaustive cop verification explores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Adversary {
    Any,
    PrudentIsolating,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepChecks {
    pub isolating: bool,
    pub prudent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub reason: String,
    pub play: Vec<SearchPosition>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub passed: bool,
    pub states: usize,
    pub max_cops: usize,
    pub failure: Option<Failure>,
}

impl Verification {
    fn fail(states: usize, max_cops: usize, reason: impl Into<String>, play: Vec<SearchPosition>) -> Self {
        Verification { passed: false, states, max_cops, failure: Some(Failure { reason: reason.into(), play }) }
    }
}

fn replies(g: &Digraph, r_bound: usize, adversary: Adversary, u_next: VertexSet, r: VertexSet, region: VertexSet) -> Vec<VertexSet> {
    region
        .subsets_up_to(r_bound)
        .filter(|s| !s.is_empty())
        .filter(|&s| adversary == Adversary::Any || (is_prudent(g, u_next, r, s) && is_isolating(g, u_next, s)))
        .collect()
}

fn strategy_failure(e: Error) -> Result<String> {
    match e {
        Error::Budget { .. } | Error::Io(_) => Err(e),
        other => Ok(other.to_string()),
    }
}

struct Frame {
    id: usize,
    u_next: VertexSet,
    children: Vec<usize>,
    next: usize,
}

/// Exhaustively checks that `cops` wins every play against the chosen
/// adversary with at most `k` cops, monotonously and in finitely many moves.
pub fn verify_cop_policy<C: CopPolicy>(
    g: &Digraph,
    k: usize,
    r_bound: usize,
    cops: &C,
    adversary: Adversary,
    budget: usize,
) -> Result<Verification> {
    type State<M> = (VertexSet, VertexSet, M);
    let mut ids: HashMap<State<C::Memory>, usize> = HashMap::new();
    let mut states: Vec<State<C::Memory>> = Vec::new();
    // 0 unvisited, 1 on the stack, 2 done
    let mut color: Vec<u8> = Vec::new();
    let mut max_cops = 0usize;

    // Witness play along the DFS stack; every frame below the top has announced.
    let play_of = |stack: &[Frame], states: &[State<C::Memory>]| -> Vec<SearchPosition> {
        let mut play = vec![SearchPosition::Initial];
        for (i, f) in stack.iter().enumerate() {
            let (u, r, _) = states[f.id];
            play.push(SearchPosition::CopTurn { u, r });
            if i + 1 < stack.len() {
                play.push(SearchPosition::RobberTurn { u, u_next: f.u_next, r });
            }
        }
        play
    };

    let starts: Vec<VertexSet> = g
        .vertices()
        .subsets_up_to(r_bound)
        .filter(|s| !s.is_empty())
        .filter(|&s| adversary == Adversary::Any || is_isolating(g, VertexSet::EMPTY, s))
        .collect();

    for r0 in starts {
        let m0 = match cops.init(g, r0) {
            Ok(m) => m,
            Err(e) => {
                let play = vec![SearchPosition::Initial, SearchPosition::CopTurn { u: VertexSet::EMPTY, r: r0 }];
                return Ok(Verification::fail(states.len(), max_cops, strategy_failure(e)?, play));
            }
        };
        let s0 = (VertexSet::EMPTY, r0, m0);
        let root = *ids.entry(s0.clone()).or_insert_with(|| {
            states.push(s0);
            color.push(0);
            states.len() - 1
        });
        if color[root] == 2 {
            continue;
        }
        let mut stack: Vec<Frame> = Vec::new();
        color[root] = 1;
        stack.push(Frame { id: root, u_next: VertexSet::EMPTY, children: Vec::new(), next: 0 });
        let mut expanded_top = false;
        while let Some(top) = stack.last_mut() {
            if !expanded_top {
                expanded_top = true;
                let (u, r, mem) = states[top.id].clone();
                let (u_next, mem1) = match cops.announce(g, &mem, u, r) {
                    Ok(x) => x,
                    Err(e) => {
                        let reason = strategy_failure(e)?;
                        return Ok(Verification::fail(states.len(), max_cops, reason, play_of(&stack, &states)));
                    }
                };
                top.u_next = u_next;
                max_cops = max_cops.max(u_next.len());
                let mut reason = None;
                if g.check_set(u_next).is_err() {
                    reason = Some(format!("announced {u_next} is not a vertex set of the graph"));
                } else if u_next.len() > k {
                    reason = Some(format!("announced {} cops, bound is {k}", u_next.len()));
                } else if !is_monotone_move(g, u, u_next, r) {
                    reason = Some(format!("non-monotone announcement {u_next} from ({u}, {r})"));
                }
                if let Some(reason) = reason {
                    let mut play = play_of(&stack, &states);
                    play.push(SearchPosition::RobberTurn { u, u_next, r });
                    return Ok(Verification::fail(states.len(), max_cops, reason, play));
                }
                let region = robber_region(g, u, u_next, r);
                let mut children = Vec::new();
                for r_next in replies(g, r_bound, adversary, u_next, r, region) {
                    let mem2 = match cops.observe(g, &mem1, u, u_next, r, r_next) {
                        Ok(m) => m,
                        Err(e) => {
                            let reason = strategy_failure(e)?;
                            let mut play = play_of(&stack, &states);
                            play.push(SearchPosition::RobberTurn { u, u_next, r });
                            play.push(SearchPosition::CopTurn { u: u_next, r: r_next });
                            return Ok(Verification::fail(states.len(), max_cops, reason, play));
                        }
                    };
                    let child = (u_next, r_next, mem2);
                    let id = match ids.get(&child) {
                        Some(&id) => id,
                        None => {
                            states.push(child.clone());
                            color.push(0);
                            ids.insert(child, states.len() - 1);
                            states.len() - 1
                        }
                    };
                    children.push(id);
                }
                if states.len() > budget {
                    return Err(Error::Budget { budget, k: Some(k) });
                }
                let top = stack.last_mut().expect("top frame");
                top.children = children;
            }
            let top = stack.last_mut().expect("top frame");
            if top.next < top.children.len() {
                let child = top.children[top.next];
                top.next += 1;
                match color[child] {
                    0 => {
                        color[child] = 1;
                        stack.push(Frame { id: child, u_next: VertexSet::EMPTY, children: Vec::new(), next: 0 });
                        expanded_top = false;
                    }
                    1 => {
                        let (top_id, top_next) = (top.id, top.u_next);
                        let mut play = play_of(&stack, &states);
                        let (u, r, _) = states[top_id];
                        play.push(SearchPosition::RobberTurn { u, u_next: top_next, r });
                        let (u, r, _) = states[child];
                        play.push(SearchPosition::CopTurn { u, r });
                        return Ok(Verification::fail(states.len(), max_cops, "the robbers can force an infinite play", play));
                    }
                    _ => {}
                }
            } else {
                color[top.id] = 2;
                stack.pop();
                expanded_top = true;
            }
        }
    }
    Ok(Verification { passed: true, states: states.len(), max_cops, failure: None })
}

/// Exhaustively checks that `robbers` survives every monotone cop play
/// allowed by `cfg`, optionally asserting the isolating and prudent step
/// conditions on each reply.
pub fn verify_robber_policy<R: RobberPolicy>(
    g: &Digraph,
    cfg: &SearchConfig,
    robbers: &R,
    checks: StepChecks,
    budget: usize,
) -> Result<Verification> {
    cfg.validate()?;
    type State<M> = (VertexSet, VertexSet, M);
    let mut ids: HashMap<State<R::Memory>, usize> = HashMap::new();
    let mut states: Vec<State<R::Memory>> = Vec::new();
    let mut parent: Vec<Option<(usize, VertexSet)>> = Vec::new();

    let play_to = |id: usize, states: &[State<R::Memory>], parent: &[Option<(usize, VertexSet)>]| {
        let mut rev = Vec::new();
        let mut cur = id;
        loop {
            let (u, r, _) = states[cur];
            rev.push(SearchPosition::CopTurn { u, r });
            match parent[cur] {
                Some((p, u_next)) => {
                    let (pu, pr, _) = states[p];
                    debug_assert_eq!(u_next, u);
                    rev.push(SearchPosition::RobberTurn { u: pu, u_next, r: pr });
                    cur = p;
                }
                None => break,
            }
        }
        rev.push(SearchPosition::Initial);
        rev.reverse();
        rev
    };

    let (r0, m0) = match robbers.start(g) {
        Ok(x) => x,
        Err(e) => return Ok(Verification::fail(0, 0, strategy_failure(e)?, vec![SearchPosition::Initial])),
    };
    let start_play = vec![SearchPosition::Initial, SearchPosition::CopTurn { u: VertexSet::EMPTY, r: r0 }];
    if g.check_set(r0).is_err() || r0.is_empty() || r0.len() > cfg.r {
        return Ok(Verification::fail(0, 0, format!("illegal first move {r0}"), start_play));
    }
    if checks.isolating && !is_isolating(g, VertexSet::EMPTY, r0) {
        return Ok(Verification::fail(0, 0, format!("first move {r0} is not isolating"), start_play));
    }
    states.push((VertexSet::EMPTY, r0, m0.clone()));
    parent.push(None);
    ids.insert((VertexSet::EMPTY, r0, m0), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut max_cops = 0;
    while let Some(id) = queue.pop_front() {
        let (u, r, mem) = states[id].clone();
        for u_next in announcements(g, cfg, u, r)? {
            if !is_monotone_move(g, u, u_next, r) {
                continue;
            }
            max_cops = max_cops.max(u_next.len());
            let witness = |extra: Option<VertexSet>| {
                let mut play = play_to(id, &states, &parent);
                play.push(SearchPosition::RobberTurn { u, u_next, r });
                if let Some(r_next) = extra {
                    play.push(SearchPosition::CopTurn { u: u_next, r: r_next });
                }
                play
            };
            let (r_next, mem2) = match robbers.respond(g, &mem, u, u_next, r) {
                Ok(x) => x,
                Err(e) => {
                    let reason = strategy_failure(e)?;
                    return Ok(Verification::fail(states.len(), max_cops, reason, witness(None)));
                }
            };
            let mut reason = check_robber_reply(g, cfg, u, u_next, r, r_next).err();
            if reason.is_none() && r_next.is_empty() {
                reason = Some("the robbers were caught".to_string());
            }
            if reason.is_none() && checks.isolating && !is_isolating(g, u_next, r_next) {
                reason = Some(format!("reply {r_next} is not isolating against {u_next}"));
            }
            if reason.is_none() && checks.prudent && !is_prudent(g, u_next, r, r_next) {
                reason = Some(format!("reply {r_next} from {r} is not prudent against {u_next}"));
            }
            if let Some(reason) = reason {
                return Ok(Verification::fail(states.len(), max_cops, reason, witness(Some(r_next))));
            }
            let child = (u_next, r_next, mem2);
            if !ids.contains_key(&child) {
                states.push(child.clone());
                parent.push(Some((id, u_next)));
                ids.insert(child, states.len() - 1);
                queue.push_back(states.len() - 1);
                if states.len() > budget {
                    return Err(Error::Budget { budget, k: Some(cfg.k) });
                }
            }
        }
    }
    Ok(Verification { passed: true, states: states.len(), max_cops, failure: None })
}

/// Robber strategy that plays `base` on a virtual set of robbers and keeps
/// only class representatives on the board. With `prudent`, new vertices
/// still reachable from a current robber are replaced by that robber.
#[derive(Clone, Debug)]
pub struct NormalizedRobber<P> {
    pub base: P,
    pub prudent: bool,
}

impl<P: RobberPolicy> RobberPolicy for NormalizedRobber<P> {
    /// The virtual robbers and the base strategy's memory.
    type Memory = (VertexSet, P::Memory);

    fn start(&self, g: &Digraph) -> Result<(VertexSet, Self::Memory)> {
        let (r0, m0) = self.base.start(g)?;
        Ok((representatives(g, VertexSet::EMPTY, r0), (r0, m0)))
    }

    fn respond(
        &self,
        g: &Digraph,
        mem: &Self::Memory,
        u: VertexSet,
        u_next: VertexSet,
        r: VertexSet,
    ) -> Result<(VertexSet, Self::Memory)> {
        let (virt, base_mem) = mem;
        let (virt_next, base_next) = self.base.respond(g, base_mem, u, u_next, *virt)?;
        let candidates = if self.prudent {
            let staying: Vec<(usize, VertexSet)> = r
                .difference(u_next)
                .iter()
                .map(|s| (s, g.reach_excluding(u_next, VertexSet::singleton(s))))
                .collect();
            virt_next
                .iter()
                .map(|y| staying.iter().find(|(_, reach)| reach.contains(y)).map_or(y, |&(s, _)| s))
                .collect()
        } else {
            virt_next
        };
        let out = representatives(g, u_next, candidates);
        let covered = g.reach_excluding(u_next, virt_next);
        let reached = g.reach_excluding(u_next, out);
        let holds = if self.prudent { covered.is_subset(reached) } else { covered == reached };
        if !holds {
            return Err(Error::invariant(
                "representative reach",
                format!("virtual robbers {virt_next} reach {covered}, representatives {out} reach {reached}"),
            ));
        }
        Ok((out, (virt_next, base_next)))
    }
}

fn require_winning<R: RobberPolicy>(g: &Digraph, cfg: &SearchConfig, robbers: &R, budget: usize) -> Result<()> {
    let v = verify_robber_policy(g, cfg, robbers, StepChecks::default(), budget)?;
    match v.failure {
        None => Ok(()),
        Some(f) => Err(Error::Precondition(format!(
            "robber strategy does not win against {} cops: {} (play {:?})",
            cfg.k, f.reason, f.play
        ))),
    }
}

/// Isolating version of a winning robber strategy.
pub fn isolating_transform<P: RobberPolicy>(g: &Digraph, cfg: &SearchConfig, robbers: P, budget: usize) -> Result<NormalizedRobber<P>> {
    require_winning(g, cfg, &robbers, budget)?;
    Ok(NormalizedRobber { base: robbers, prudent: false })
}

/// Prudent and isolating version of a winning robber strategy.
pub fn prudent_transform<P: RobberPolicy>(g: &Digraph, cfg: &SearchConfig, robbers: P, budget: usize) -> Result<NormalizedRobber<P>> {
    require_winning(g, cfg, &robbers, budget)?;
    Ok(NormalizedRobber { base: robbers, prudent: true })
}

/// First reachable position violating the cleanup normal form: each move
/// places a new cop, and only on vertices the robber can still reach.
pub fn normal_form_violation(g: &Digraph, f: &PositionalCopStrategy) -> Option<String> {
    for ((u, r), u_next) in f.entries() {
        let placed = u_next.difference(u);
        let reach = g.reach_excluding(u, r);
        if placed.is_empty() {
            return Some(format!("({u}, {r}) -> {u_next} places no new cop"));
        }
        if !placed.is_subset(reach) {
            return Some(format!("({u}, {r}) -> {u_next} places {} out of the robber's reach", placed.difference(reach)));
        }
    }
    None
}

/// Rewrites a winning single-robber positional strategy into one that
/// only places cops the robber can still reach and never idles. Each real
/// position `(Û, v)` is simulated by a position `(U, v)` of `f` with
/// `Û ⊆ U` and the same robber reach.
pub fn cleanup_strategy(g: &Digraph, f: &PositionalCopStrategy, budget: usize) -> Result<PositionalCopStrategy> {
    let pre = verify_cop_policy(g, f.k, 1, f, Adversary::Any, budget)?;
    if let Some(fail) = pre.failure {
        return Err(Error::Precondition(format!("input strategy is not winning: {} (play {:?})", fail.reason, fail.play)));
    }
    let mut out = PositionalCopStrategy { k: f.k, moves: HashMap::new() };
    let mut queue: VecDeque<(VertexSet, usize, VertexSet)> = g.vertices().iter().map(|v| (VertexSet::EMPTY, v, VertexSet::EMPTY)).collect();
    while let Some((start_hat, v, start_virtual)) = queue.pop_front() {
        let robber = VertexSet::singleton(v);
        if out.moves.contains_key(&(start_hat, robber)) {
            continue;
        }
        // Follow f while it only re-places cops inside the start set; the
        // robber waits at v meanwhile.
        let (mut hat, mut virt) = (start_hat, start_virtual);
        let mut idle = HashSet::new();
        let (placed, placed_virtual) = loop {
            let reach = g.reach_excluding(hat, robber);
            if reach != g.reach_excluding(virt, robber) {
                return Err(Error::invariant("cleanup simulation", format!("({hat}, {v}) simulated by ({virt}, {v}) with a different reach")));
            }
            let u_next = f.get(virt, robber)?;
            let hat_next = u_next.intersection(hat.union(reach));
            if !hat_next.is_subset(start_hat) {
                break (hat_next, u_next);
            }
            if !idle.insert((hat_next, u_next)) {
                return Err(Error::Precondition(format!("input strategy idles forever at robber vertex {v}")));
            }
            (hat, virt) = (hat_next, u_next);
        };
        out.moves.insert((start_hat, robber), placed);
        for w in robber_region(g, start_hat, placed, robber).iter() {
            if !out.moves.contains_key(&(placed, VertexSet::singleton(w))) {
                queue.push_back((placed, w, placed_virtual));
            }
        }
        if out.moves.len() > budget {
            return Err(Error::Budget { budget, k: Some(f.k) });
        }
    }
    if let Some(v) = normal_form_violation(g, &out) {
        return Err(Error::invariant("cleanup normal form", v));
    }
    let post = verify_cop_policy(g, f.k, 1, &out, Adversary::Any, budget)?;
    if let Some(fail) = post.failure {
        return Err(Error::invariant("cleanup keeps winning", format!("{} (play {:?})", fail.reason, fail.play)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{solve_search, DEFAULT_BUDGET};

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn single_vertex_playout() {
        let g = Digraph::new(1).unwrap();
        let mut f = PositionalCopStrategy::default();
        f.k = 1;
        f.insert(VertexSet::EMPTY, set(&[0]), set(&[0]));
        let robbers = PositionalRobberStrategy { start: set(&[0]), moves: HashMap::new() };
        let p = playout(&g, &SearchConfig::visible(1, 1), &f, &robbers, 10).unwrap();
        assert_eq!(p.verdict, Verdict::CopsWin);
        assert_eq!(p.trace.len(), 3);
    }

    #[test]
    fn abandoning_a_reachable_cop_is_non_monotone() {
        let c3 = Digraph::cycle(3).unwrap();
        let mut f = PositionalCopStrategy::default();
        f.k = 1;
        f.insert(VertexSet::EMPTY, set(&[0]), set(&[1]));
        f.insert(set(&[1]), set(&[0]), set(&[2]));
        let robbers = PositionalRobberStrategy {
            start: set(&[0]),
            moves: HashMap::from([((VertexSet::EMPTY, set(&[1]), set(&[0])), set(&[0]))]),
        };
        let p = playout(&c3, &SearchConfig::visible(1, 1), &f, &robbers, 10).unwrap();
        assert_eq!(p.verdict, Verdict::NonMonotone);
    }

    #[test]
    fn missing_entry_is_a_hole() {
        let c3 = Digraph::cycle(3).unwrap();
        let f = PositionalCopStrategy::default();
        let robbers = PositionalRobberStrategy { start: set(&[0]), moves: HashMap::new() };
        let err = playout(&c3, &SearchConfig::visible(1, 1), &f, &robbers, 10).unwrap_err();
        assert!(matches!(err, Error::StrategyHole(_)));
    }

    #[test]
    fn strategy_text_round_trip() {
        let mut f = PositionalCopStrategy::default();
        f.k = 2;
        f.insert(VertexSet::EMPTY, set(&[0]), set(&[1, 2]));
        f.insert(set(&[1]), set(&[0, 3]), set(&[1]));
        let text = f.to_text();
        assert!(text.contains(" ; 0 -> 1,2"));
        assert_eq!(PositionalCopStrategy::from_text(&text).unwrap(), f);
        assert!(matches!(PositionalCopStrategy::from_text("1 ; 2 3"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn representatives_examples() {
        let c3 = Digraph::cycle(3).unwrap();
        assert_eq!(representatives(&c3, VertexSet::EMPTY, set(&[1, 2])), set(&[1]));
        let path = Digraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(representatives(&path, VertexSet::EMPTY, set(&[1, 2])), set(&[1]));
        assert_eq!(representatives(&path, set(&[1]), set(&[0, 2])), set(&[0, 2]));
    }

    #[test]
    fn step_condition_examples() {
        let c3 = Digraph::cycle(3).unwrap();
        assert!(is_prudent(&c3, set(&[1]), set(&[0]), set(&[0])));
        assert!(!is_prudent(&c3, VertexSet::EMPTY, set(&[0]), set(&[2])));
        assert!(!is_isolating(&c3, set(&[1]), set(&[0, 2])));
        assert!(is_isolating(&c3, set(&[0, 1]), set(&[2])));
    }

    #[test]
    fn solver_strategies_verify_on_c3() {
        let c3 = Digraph::cycle(3).unwrap();
        let won = solve_search(&c3, &SearchConfig::visible(2, 1)).unwrap();
        let f = won.cop_strategy().unwrap();
        assert!(verify_cop_policy(&c3, 2, 1, &f, Adversary::Any, DEFAULT_BUDGET).unwrap().passed);
        let lost = solve_search(&c3, &SearchConfig::visible(1, 1)).unwrap();
        let rob = lost.robber_strategy().unwrap();
        let v = verify_robber_policy(&c3, &SearchConfig::visible(1, 1), &rob, StepChecks::default(), DEFAULT_BUDGET).unwrap();
        assert!(v.passed, "{:?}", v.failure);
    }

    #[test]
    fn cleanup_on_c3() {
        let c3 = Digraph::cycle(3).unwrap();
        let f = solve_search(&c3, &SearchConfig::visible(2, 1)).unwrap().cop_strategy().unwrap();
        let clean = cleanup_strategy(&c3, &f, DEFAULT_BUDGET).unwrap();
        assert_eq!(normal_form_violation(&c3, &clean), None);
    }

    #[test]
    fn cleanup_drops_parked_cop() {
        // 0 <-> 1, and 2 unreachable from both: a first cop parked on 2 is dropped.
        let g = Digraph::from_edges(3, &[(0, 1), (1, 0)]).unwrap();
        let mut f = PositionalCopStrategy::default();
        f.k = 3;
        for v in [0, 1] {
            f.insert(VertexSet::EMPTY, set(&[v]), set(&[2]));
            f.insert(set(&[2]), set(&[v]), set(&[0, 1, 2]));
        }
        f.insert(VertexSet::EMPTY, set(&[2]), set(&[2]));
        let clean = cleanup_strategy(&g, &f, DEFAULT_BUDGET).unwrap();
        assert_eq!(clean.get(VertexSet::EMPTY, set(&[0])).unwrap(), set(&[0, 1]));
        assert_eq!(normal_form_violation(&g, &clean), None);
    }

    #[test]
    fn cleanup_rejects_losing_input() {
        let c3 = Digraph::cycle(3).unwrap();
        let mut f = PositionalCopStrategy::default();
        f.k = 1;
        for v in 0..3 {
            f.insert(VertexSet::EMPTY, set(&[v]), VertexSet::EMPTY);
        }
        assert!(matches!(cleanup_strategy(&c3, &f, DEFAULT_BUDGET), Err(Error::Precondition(_))));
    }

    #[test]
    fn history_prefixes() {
        let mut a = History::new();
        let mut b = a.clone();
        b.push(SearchPosition::CopTurn { u: VertexSet::EMPTY, r: set(&[0]) });
        assert!(a.is_strict_prefix_of(&b));
        assert!(!b.is_strict_prefix_of(&a));
        a.push(SearchPosition::CopTurn { u: VertexSet::EMPTY, r: set(&[1]) });
        assert!(!a.is_strict_prefix_of(&b));
        assert_eq!(b.last(), SearchPosition::CopTurn { u: VertexSet::EMPTY, r: set(&[0]) });
    }
}
