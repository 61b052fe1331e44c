//! Targeted depth-first search for programs computing a given integer or
//! one of its multiples.
//!
//! Stage-1 frontiers supply every class of programs up to the handoff
//! length; deeper programs are explored by extending the handoff
//! representatives one step at a time. Three rules keep the tree small:
//!
//! 1. a program that computes the target is recorded and not extended;
//! 2. extensions that repeat a value or produce zero are dropped;
//! 3. from length 2 on, a program whose maximum `x` satisfies
//!    `x^(2^(K-k)) < N` is dropped, since no value reachable within the
//!    remaining steps can be as large as `N`.
//!
//! Depths are searched in increasing order, so a search that finds nothing
//! up to depth `D` certifies that no program of length `<= D` hits the
//! target.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use hashbrown::HashMap;
use log::debug;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::enumerate::Frontier;
use crate::eval::{apply, evaluate, evaluate_packed_into, hits_target, Digest, EvalError, Evaluation, TargetMode};
use crate::numtheory::{factorial, primorial};
use crate::program::{Op, Program};
use crate::scalar::{max_value_bits, ScalarWidth, SlpInt};
use crate::store::ResultRecord;

/// Hit classes kept per search unless configured otherwise.
pub const DEFAULT_HIT_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TargetKind {
    Factorial,
    Primorial,
    Integer,
}

impl TargetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetKind::Factorial => "factorial",
            TargetKind::Primorial => "primorial",
            TargetKind::Integer => "integer",
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TargetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "factorial" => Ok(TargetKind::Factorial),
            "primorial" => Ok(TargetKind::Primorial),
            "integer" => Ok(TargetKind::Integer),
            other => Err(format!("unknown target kind '{other}'")),
        }
    }
}

/// The integer `n` to compute exactly, or any positive multiple of.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TargetSpec {
    pub n: BigUint,
    pub mode: TargetMode,
    /// `factorial 5`, `primorial 13`, `integer 2`, ...
    pub description: String,
}

impl TargetSpec {
    pub fn new(kind: TargetKind, param: u64, mode: TargetMode) -> Result<TargetSpec, SearchError> {
        let n = match kind {
            TargetKind::Factorial => factorial(param),
            TargetKind::Primorial => primorial(param).map_err(|e| SearchError::InvalidTarget(e.to_string()))?,
            TargetKind::Integer => BigUint::from(param),
        };
        if n.is_zero() {
            return Err(SearchError::InvalidTarget("the target must be at least 1".into()));
        }
        Ok(TargetSpec {
            n,
            mode,
            description: format!("{kind} {param}"),
        })
    }

    pub fn factorial(n: u64, mode: TargetMode) -> TargetSpec {
        TargetSpec::new(TargetKind::Factorial, n, mode).expect("factorials are positive")
    }

    pub fn primorial(p: u64, mode: TargetMode) -> Result<TargetSpec, SearchError> {
        TargetSpec::new(TargetKind::Primorial, p, mode)
    }

    pub fn integer(n: u64, mode: TargetMode) -> Result<TargetSpec, SearchError> {
        TargetSpec::new(TargetKind::Integer, n, mode)
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}, N={})", self.description, self.mode, self.n)
    }
}

/// Result of a search; `lower_bound` is a certified lower bound on the
/// minimal length and `optimal` means it meets `best_length`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub target: TargetSpec,
    pub max_depth: usize,
    pub handoff: usize,
    /// Minimal-length hits, one per class, ascending by packed encoding.
    pub found: Vec<(Program, usize)>,
    pub best_length: Option<usize>,
    pub lower_bound: usize,
    pub optimal: bool,
    /// False when the node budget cut the search short.
    pub complete: bool,
}

impl SearchOutcome {
    pub fn exemplar(&self) -> Option<&Program> {
        self.found.first().map(|(p, _)| p)
    }

    /// `f=5, Opt`, `f=9, lower bound 8` or `no hit up to 8, lower bound 9`.
    pub fn verdict(&self) -> String {
        match self.best_length {
            Some(f) if self.optimal => format!("f={f}, Opt"),
            Some(f) => format!("f={f}, lower bound {}", self.lower_bound),
            None => format!("no hit up to {}, lower bound {}", self.max_depth, self.lower_bound),
        }
    }

    pub fn to_record(&self, timestamp: impl Into<String>) -> ResultRecord {
        ResultRecord {
            description: self.target.description.clone(),
            n: self.target.n.clone(),
            mode: self.target.mode,
            best_length: self.best_length,
            lower_bound: self.lower_bound,
            optimal: self.optimal,
            exemplar: self.exemplar().cloned(),
            timestamp: timestamp.into(),
            max_len: self.max_depth,
            handoff: self.handoff,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("search budget exhausted for {}; lower bound {} only", .0.target, .0.lower_bound)]
    Incomplete(Box<SearchOutcome>),
    #[error("hit failed re-verification: {0}")]
    Verification(String),
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Prune programs whose largest value cannot grow to N in time.
    pub value_bound: bool,
    /// Abort after visiting this many nodes.
    pub node_budget: Option<u64>,
    /// Hit classes kept; the least programs win.
    pub hit_cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            value_bound: true,
            node_budget: None,
            hit_cap: DEFAULT_HIT_CAP,
        }
    }
}

/// Value-bound pruning: `true` when `max^(2^(K-k)) < N`, so no extension of the program
/// within `K` steps can reach `N`. Never prunes below length 2.
pub fn prune_value_bound<T: SlpInt>(evaluation: &Evaluation<T>, k: usize, max_len: usize, n: &T) -> bool {
    if k < 2 {
        return false;
    }
    let mut x = evaluation.max().clone();
    for _ in k..max_len {
        if &x >= n {
            return false;
        }
        x = match x.checked_mul(&x) {
            Some(sq) => sq,
            None => return false,
        };
    }
    &x < n
}

/// Least `x` with `x^(2^d) >= n`.
fn root_threshold(n: &BigUint, d: usize) -> BigUint {
    if n <= &BigUint::one() {
        return n.clone();
    }
    if d >= 32 || (1u64 << d) >= n.bits() {
        return BigUint::from(2u8).min(n.clone());
    }
    let e = 1u32 << d;
    let r = n.nth_root(e);
    if r.pow(e) < *n {
        r + 1u32
    } else {
        r
    }
}

const FILTER_PRIME: u64 = (1 << 61) - 1;

/// Everything about the target a worker needs, in the working width.
struct Goal<T> {
    n: T,
    n_big: BigUint,
    mode: TargetMode,
    /// Residues of all values are tracked modulo this number. In multiple
    /// mode it is `N` itself; in exact mode a fixed prime used as a filter.
    modulus: Option<u64>,
    target_residue: u64,
    /// `thresholds[d]`: values below it cannot reach `N` in `d` squarings.
    thresholds: Vec<T>,
    value_bound: bool,
}

impl<T: SlpInt> Goal<T> {
    fn new(target: &TargetSpec, max_len: usize, value_bound: bool) -> Goal<T> {
        let n = T::from_biguint(&target.n).expect("width chosen to hold the target");
        let (modulus, target_residue) = match (target.mode, target.n.to_u64()) {
            (TargetMode::Multiple, Some(m)) if m < (1 << 62) => (Some(m), 0),
            (TargetMode::Multiple, _) => (None, 0),
            (TargetMode::Exact, _) => {
                let r = (&target.n % FILTER_PRIME).to_u64().expect("residue below the modulus");
                (Some(FILTER_PRIME), r)
            }
        };
        let thresholds = (0..=max_len)
            .map(|d| T::from_biguint(&root_threshold(&target.n, d)).expect("threshold at most N"))
            .collect();
        Goal {
            n,
            n_big: target.n.clone(),
            mode: target.mode,
            modulus,
            target_residue,
            thresholds,
            value_bound,
        }
    }

    #[inline]
    fn hits(&self, v: &T) -> bool {
        hits_target(v, &self.n, self.mode)
    }

    #[inline]
    fn prunes(&self, max: &T, k: usize, bound: usize) -> bool {
        self.value_bound && k >= 2 && max < &self.thresholds[bound - k]
    }

    fn residue(&self, v: &T) -> u64 {
        match self.modulus {
            Some(m) => v.rem_ref(&T::from_u64(m)).as_u64().expect("residue below the modulus"),
            None => 0,
        }
    }
}

struct Shared {
    bound: AtomicUsize,
    nodes: AtomicU64,
    budget: Option<u64>,
    flush_every: u64,
    aborted: AtomicBool,
}

impl Shared {
    fn new(bound: usize, budget: Option<u64>) -> Shared {
        Shared {
            bound: AtomicUsize::new(bound),
            nodes: AtomicU64::new(0),
            budget,
            flush_every: budget.map_or(4096, |b| (b / 64).clamp(1, 4096)),
            aborted: AtomicBool::new(false),
        }
    }
}

/// Minimal-length hits, least packed program per class, capped
/// deterministically: the result keeps the classes whose least programs are
/// smallest, whatever order the hits arrive in.
#[derive(Debug, Clone)]
struct HitSet {
    length: usize,
    classes: HashMap<Digest, Vec<u8>>,
    cap: usize,
}

impl HitSet {
    fn new(cap: usize) -> HitSet {
        HitSet {
            length: usize::MAX,
            classes: HashMap::new(),
            cap: cap.max(1),
        }
    }

    fn insert(&mut self, length: usize, digest: Digest, packed: Vec<u8>) {
        if length > self.length {
            return;
        }
        if length < self.length {
            self.length = length;
            self.classes.clear();
        }
        self.classes
            .entry(digest)
            .and_modify(|p| {
                if packed < *p {
                    *p = packed.clone();
                }
            })
            .or_insert(packed);
        if self.classes.len() > 2 * self.cap {
            self.truncate();
        }
    }

    fn truncate(&mut self) {
        if self.classes.len() <= self.cap {
            return;
        }
        let mut all: Vec<(Vec<u8>, Digest)> = self.classes.drain().map(|(d, p)| (p, d)).collect();
        all.sort_unstable();
        all.truncate(self.cap);
        self.classes = all.into_iter().map(|(p, d)| (d, p)).collect();
    }

    fn merge(mut self, other: HitSet) -> HitSet {
        if other.length < self.length {
            return other.merge(self);
        }
        if other.length == self.length {
            for (d, p) in other.classes {
                self.insert(other.length, d, p);
            }
        }
        self
    }

    fn into_programs(mut self) -> Vec<(Program, usize)> {
        self.truncate();
        let mut all: Vec<Vec<u8>> = self.classes.into_values().collect();
        all.sort_unstable();
        all.into_iter()
            .map(|p| (Program::decode(&p).expect("hits are valid programs"), self.length))
            .collect()
    }
}

struct Worker<'a, T> {
    goal: &'a Goal<T>,
    shared: &'a Shared,
    hits: HitSet,
    error: Option<String>,
    pending_nodes: u64,
    vals: Vec<T>,
    res: Vec<u64>,
    packed: Vec<u8>,
}

impl<'a, T: SlpInt> Worker<'a, T> {
    fn new(goal: &'a Goal<T>, shared: &'a Shared, cap: usize) -> Self {
        Worker {
            goal,
            shared,
            hits: HitSet::new(cap),
            error: None,
            pending_nodes: 0,
            vals: Vec::new(),
            res: Vec::new(),
            packed: Vec::new(),
        }
    }

    /// Runs the subtree below one seed, given as packed bytes.
    fn run_seed(&mut self, packed: &[u8]) {
        if self.shared.aborted.load(Ordering::Relaxed) {
            return;
        }
        if let Err(e) = evaluate_packed_into(packed, &mut self.vals) {
            self.error = Some(e.to_string());
            return;
        }
        self.packed.clear();
        self.packed.extend_from_slice(packed);
        self.res = self.vals.iter().map(|v| self.goal.residue(v)).collect();
        let max = self.vals.iter().max().expect("nonempty").clone();
        self.visit(&max);
    }

    fn flush_nodes(&mut self) {
        if self.pending_nodes == 0 {
            return;
        }
        let total = self.shared.nodes.fetch_add(self.pending_nodes, Ordering::Relaxed) + self.pending_nodes;
        self.pending_nodes = 0;
        if let Some(budget) = self.shared.budget {
            if total > budget {
                self.shared.aborted.store(true, Ordering::Relaxed);
            }
        }
    }

    fn visit(&mut self, max: &T) {
        let k = self.vals.len() - 1;
        let bound = self.shared.bound.load(Ordering::Relaxed);
        if k >= bound || self.goal.prunes(max, k, bound) {
            return;
        }
        self.pending_nodes += 1;
        if self.pending_nodes >= self.shared.flush_every {
            self.flush_nodes();
        }
        if self.shared.aborted.load(Ordering::Relaxed) {
            return;
        }
        if k + 1 == bound {
            self.final_level();
            return;
        }
        let n = self.vals.len();
        for i in 0..n {
            for j in i..n {
                for op in Op::ALL {
                    if op == Op::Sub && i == j {
                        continue;
                    }
                    let v = apply(op, &self.vals[i], &self.vals[j])
                        .expect("working width holds every value below the final level");
                    if v.is_zero() || self.vals.contains(&v) {
                        continue;
                    }
                    let step = [i as u8 + 1, j as u8 + 1, op.code()];
                    if self.goal.hits(&v) {
                        self.record(step);
                        continue;
                    }
                    if self.shared.bound.load(Ordering::Relaxed) <= k + 1 {
                        continue;
                    }
                    let r = self.child_residue(op, i, j);
                    let child_max = if &v > max { v.clone() } else { max.clone() };
                    self.vals.push(v);
                    self.res.push(r);
                    self.packed.extend_from_slice(&step);
                    self.visit(&child_max);
                    self.packed.truncate(self.packed.len() - 3);
                    self.res.pop();
                    self.vals.pop();
                }
            }
        }
    }

    #[inline]
    fn child_residue(&self, op: Op, i: usize, j: usize) -> u64 {
        let Some(m) = self.goal.modulus else { return 0 };
        let (ri, rj) = (self.res[i], self.res[j]);
        match op {
            Op::Add => (ri + rj) % m,
            Op::Sub => {
                if self.vals[i] >= self.vals[j] {
                    (ri + m - rj) % m
                } else {
                    (rj + m - ri) % m
                }
            }
            Op::Mul => ((u128::from(ri) * u128::from(rj)) % u128::from(m)) as u64,
        }
    }

    /// One step below the bound: only hits matter, and a hit is always
    /// normalized because no existing value hits.
    fn final_level(&mut self) {
        let n = self.vals.len();
        for i in 0..n {
            for j in i..n {
                for op in Op::ALL {
                    if op == Op::Sub && i == j {
                        continue;
                    }
                    let hit = match self.goal.modulus {
                        Some(_) => {
                            self.child_residue(op, i, j) == self.goal.target_residue
                                && (self.goal.mode == TargetMode::Multiple || self.exact_hit(op, i, j))
                        }
                        None => self.wide_multiple_hit(op, i, j),
                    };
                    if hit {
                        self.record([i as u8 + 1, j as u8 + 1, op.code()]);
                    }
                }
            }
        }
    }

    fn exact_hit(&self, op: Op, i: usize, j: usize) -> bool {
        apply(op, &self.vals[i], &self.vals[j]).is_some_and(|v| v == self.goal.n)
    }

    fn wide_multiple_hit(&self, op: Op, i: usize, j: usize) -> bool {
        match apply(op, &self.vals[i], &self.vals[j]) {
            Some(v) => !v.is_zero() && v.rem_ref(&self.goal.n).is_zero(),
            None => {
                let a = self.vals[i].to_biguint();
                let b = self.vals[j].to_biguint();
                let v = apply(op, &a, &b).expect("arbitrary precision");
                !v.is_zero() && (v % &self.goal.n_big).is_zero()
            }
        }
    }

    fn record(&mut self, step: [u8; 3]) {
        let mut packed = self.packed.clone();
        packed.extend_from_slice(&step);
        let length = packed.len() / 3;
        let program = match Program::decode(&packed) {
            Ok(p) => p,
            Err(e) => {
                self.error = Some(e.to_string());
                return;
            }
        };
        let verified = evaluate::<BigUint>(&program).ok().and_then(|e| {
            (e.is_normalized() && e.computes_target(&self.goal.n_big, self.goal.mode))
                .then(|| e.canonical_key().ok())
                .flatten()
        });
        match verified {
            Some(key) => {
                self.shared.bound.fetch_min(length, Ordering::Relaxed);
                self.hits.insert(length, key.digest, packed);
            }
            None => self.error = Some(format!("{program} does not verify against {}", self.goal.n_big)),
        }
    }
}

/// Runs one depth-limited pass from `seeds`, returning the hits.
fn run_pass<T: SlpInt>(
    goal: &Goal<T>,
    seeds: &[&[u8]],
    bound: usize,
    opts: &SearchOptions,
    nodes_so_far: u64,
) -> Result<(HitSet, u64, bool), SearchError> {
    let shared = Shared::new(bound, opts.node_budget);
    shared.nodes.store(nodes_so_far, Ordering::Relaxed);
    let (hits, error) = seeds
        .par_iter()
        .with_min_len(16)
        .fold(
            || Worker::new(goal, &shared, opts.hit_cap),
            |mut w, seed| {
                w.run_seed(seed);
                w
            },
        )
        .map(|mut w| {
            w.flush_nodes();
            (w.hits, w.error)
        })
        .reduce(
            || (HitSet::new(opts.hit_cap), None),
            |(a, ea), (b, eb)| (a.merge(b), ea.or(eb)),
        );
    if let Some(e) = error {
        return Err(SearchError::Verification(e));
    }
    Ok((
        hits,
        shared.nodes.load(Ordering::Relaxed),
        shared.aborted.load(Ordering::Relaxed),
    ))
}

fn check_frontiers(frontiers: &[Frontier]) -> Result<(), SearchError> {
    if frontiers.is_empty() {
        return Err(SearchError::Config("at least the level-0 frontier is required".into()));
    }
    for (k, f) in frontiers.iter().enumerate() {
        if f.program_len() != k {
            return Err(SearchError::Config(format!(
                "frontier {k} holds programs of length {}",
                f.program_len()
            )));
        }
    }
    Ok(())
}

/// Finds the shortest programs of length at most `max_len` hitting
/// `target`, using `frontiers[0..=h]` as complete class lists up to the
/// handoff length `h` and depth-first extension beyond it.
pub fn search_target(
    target: &TargetSpec,
    max_len: usize,
    frontiers: &[Frontier],
    opts: &SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    check_frontiers(frontiers)?;
    if target.n.is_zero() {
        return Err(SearchError::InvalidTarget("the target must be at least 1".into()));
    }
    if max_len > crate::enumerate::MAX_FRONTIER_LEN {
        return Err(SearchError::Config(format!("maximum length {max_len} is too large")));
    }
    let handoff = (frontiers.len() - 1).min(max_len);
    let bits = max_value_bits(handoff)
        .max(max_value_bits(max_len.saturating_sub(1)))
        .max(target.n.bits() + 1);
    crate::dispatch_width!(ScalarWidth::for_bits(bits), T => search_target_with::<T>(target, max_len, &frontiers[..=handoff], opts))
}

fn search_target_with<T: SlpInt>(
    target: &TargetSpec,
    max_len: usize,
    frontiers: &[Frontier],
    opts: &SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    let handoff = frontiers.len() - 1;
    let goal = Goal::<T>::new(target, max_len, opts.value_bound);
    let mut outcome = SearchOutcome {
        target: target.clone(),
        max_depth: max_len,
        handoff,
        found: Vec::new(),
        best_length: None,
        lower_bound: 0,
        optimal: false,
        complete: true,
    };

    for (k, frontier) in frontiers.iter().enumerate() {
        let hits = scan_frontier(&goal, frontier)?;
        if !hits.is_empty() {
            debug!("{}: {} class(es) hit at level {k}", target.description, hits.len());
            outcome.found = hits.into_iter().take(opts.hit_cap.max(1)).map(|p| (p, k)).collect();
            outcome.best_length = Some(k);
            outcome.lower_bound = k;
            outcome.optimal = true;
            return Ok(outcome);
        }
        outcome.lower_bound = k + 1;
    }

    let seeds: Vec<&[u8]> = (0..frontiers[handoff].len()).map(|i| frontiers[handoff].packed(i)).collect();
    let mut nodes = 0;
    for depth in handoff + 1..=max_len {
        let (hits, total, aborted) = run_pass(&goal, &seeds, depth, opts, nodes)?;
        nodes = total;
        if aborted {
            outcome.complete = false;
            let found = hits.into_programs();
            if let Some((_, len)) = found.first() {
                outcome.best_length = Some(*len);
            }
            outcome.found = found;
            return Err(SearchError::Incomplete(Box::new(outcome)));
        }
        debug!("{}: depth {depth} done, {nodes} nodes", target.description);
        if hits.length == depth {
            outcome.found = hits.into_programs();
            outcome.best_length = Some(depth);
            outcome.lower_bound = depth;
            outcome.optimal = true;
            return Ok(outcome);
        }
        outcome.lower_bound = depth + 1;
    }
    Ok(outcome)
}

/// Frontier representatives computing the target, in frontier order.
fn scan_frontier<T: SlpInt>(goal: &Goal<T>, frontier: &Frontier) -> Result<Vec<Program>, SearchError> {
    let hits: Result<Vec<Option<usize>>, EvalError> = (0..frontier.len())
        .into_par_iter()
        .with_min_len(256)
        .map_init(Vec::new, |vals, i| {
            evaluate_packed_into::<T>(frontier.packed(i), vals)?;
            Ok(vals.iter().any(|v| goal.hits(v)).then_some(i))
        })
        .collect();
    Ok(hits?.into_iter().flatten().map(|i| frontier.program(i)).collect())
}

/// Extends the given seeds up to `max_len` steps and returns the shortest
/// hits found among their extensions. Seeds that already hit are returned
/// as they are. Results are upper bounds only: nothing outside the seeds'
/// subtrees is searched.
pub fn heuristic_extend(
    seeds: &[Program],
    target: &TargetSpec,
    max_len: usize,
    opts: &SearchOptions,
) -> Result<Vec<(Program, usize)>, SearchError> {
    if seeds.is_empty() {
        return Ok(Vec::new());
    }
    if target.n.is_zero() {
        return Err(SearchError::InvalidTarget("the target must be at least 1".into()));
    }
    let mut seed_bits = 1u64;
    let mut hitting = HitSet::new(opts.hit_cap);
    let mut open = Vec::new();
    for seed in seeds {
        let e = evaluate::<BigUint>(seed)?;
        if !e.is_normalized() {
            return Err(SearchError::InvalidTarget(format!("seed {seed} is not normalized")));
        }
        let packed = seed.encode().ok_or_else(|| {
            SearchError::Config(format!("seed {seed} uses indices above 255"))
        })?;
        if e.computes_target(&target.n, target.mode) {
            hitting.insert(seed.len(), e.canonical_key()?.digest, packed);
            continue;
        }
        if seed.len() >= max_len {
            continue;
        }
        // Squaring at most doubles the bit length.
        let grow = max_len - 1 - seed.len();
        let bits = if grow >= 63 {
            u64::MAX
        } else {
            e.max().bits().saturating_mul(1 << grow)
        };
        seed_bits = seed_bits.max(bits.min(max_value_bits(max_len - 1)));
        open.push(packed);
    }
    let bound = hitting.length.min(max_len);
    if open.is_empty() || open.iter().all(|p| p.len() / 3 >= bound) {
        return Ok(hitting.into_programs());
    }
    let bits = seed_bits.max(target.n.bits() + 1);
    let found = crate::dispatch_width!(ScalarWidth::for_bits(bits), T => extend_open::<T>(&open, target, bound, opts))?;
    let mut merged = hitting;
    for (p, len) in found {
        let e = evaluate::<BigUint>(&p)?;
        merged.insert(len, e.canonical_key()?.digest, p.encode().expect("short program"));
    }
    Ok(merged.into_programs())
}

fn extend_open<T: SlpInt>(
    open: &[Vec<u8>],
    target: &TargetSpec,
    bound: usize,
    opts: &SearchOptions,
) -> Result<Vec<(Program, usize)>, SearchError> {
    let goal = Goal::<T>::new(target, bound, opts.value_bound);
    let shortest = open.iter().map(|p| p.len() / 3).min().expect("nonempty");
    let mut nodes = 0;
    for depth in shortest + 1..=bound {
        let seeds: Vec<&[u8]> = open.iter().filter(|p| p.len() / 3 < depth).map(Vec::as_slice).collect();
        let (hits, total, aborted) = run_pass(&goal, &seeds, depth, opts, nodes)?;
        nodes = total;
        if hits.length == depth || aborted {
            return Ok(hits.into_programs());
        }
    }
    Ok(Vec::new())
}

/// Depth-first extension of a single seed; see [`heuristic_extend`].
pub fn dfs_extend(
    seed: &Program,
    target: &TargetSpec,
    max_len: usize,
    opts: &SearchOptions,
) -> Result<Vec<(Program, usize)>, SearchError> {
    if seed.len() > max_len {
        return Err(SearchError::Config(format!(
            "seed has {} steps, more than the maximum {max_len}",
            seed.len()
        )));
    }
    heuristic_extend(std::slice::from_ref(seed), target, max_len, opts)
}

/// Searches every parameter in `params`, reusing the same frontiers. Errors
/// are reported per target.
pub fn batch_targets(
    kind: TargetKind,
    params: &[u64],
    mode: TargetMode,
    max_len: usize,
    frontiers: &[Frontier],
    opts: &SearchOptions,
) -> Vec<Result<SearchOutcome, SearchError>> {
    params
        .iter()
        .map(|&p| TargetSpec::new(kind, p, mode).and_then(|t| search_target(&t, max_len, frontiers, opts)))
        .collect()
}
