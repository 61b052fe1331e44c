//! Breadth-first enumeration of range-isomorphism classes.
//!
//! Level `k` holds one representative program per distinct value set computed
//! by a normalized program of `k` steps. Level `k` is produced by extending
//! every representative of level `k - 1` by one step in every possible way,
//! dropping non-normalized results and keeping the lexicographically least
//! program (by packed step bytes) of each class. Range-isomorphic programs
//! compute the same values, so the representatives determine everything that
//! is reachable; see [`reached_set`] and [`covered_set`].

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use hashbrown::HashMap;
use log::{info, warn};
use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::eval::{apply, encode_value, evaluate_packed_into, Digest, EvalError, KeyEncoder};
use crate::numtheory::{divisors, factorize, FactorBudget};
use crate::program::{Op, Program, ProgramError};
use crate::scalar::{ScalarWidth, SlpInt};
use crate::store::{RunDir, StoreError};

/// Longest program a frontier can hold: indices are stored in one byte.
pub const MAX_FRONTIER_LEN: usize = 254;

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("invalid frontier: {0}")]
    InvalidFrontier(String),
    #[error("digest collision between distinct value sets at level {level}")]
    DigestCollision { level: usize },
    #[error("{} value(s) could not be factored within budget", .0.unfactored.len())]
    FactorizationIncomplete(Box<IncompleteCover>),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Partial covered set left by budget-limited factorizations.
#[derive(Debug, Clone)]
pub struct IncompleteCover {
    /// Divisors derivable from the partial factorizations; a subset of the
    /// true covered set.
    pub partial: BTreeSet<BigUint>,
    pub unfactored: Vec<BigUint>,
}

/// One representative per class, all of the same length, in ascending order
/// of their packed encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier {
    program_len: usize,
    count: usize,
    packed: Vec<u8>,
}

impl Frontier {
    /// Level 0: the empty program computing `{1}`.
    pub fn seed() -> Frontier {
        Frontier {
            program_len: 0,
            count: 1,
            packed: Vec::new(),
        }
    }

    /// Builds a frontier from packed programs, checking indices, operand
    /// order and strictly ascending order.
    pub fn from_packed(program_len: usize, count: usize, packed: Vec<u8>) -> Result<Frontier, EnumerateError> {
        if program_len > MAX_FRONTIER_LEN {
            return Err(EnumerateError::InvalidFrontier(format!(
                "program length {program_len} exceeds {MAX_FRONTIER_LEN}"
            )));
        }
        if packed.len() != program_len * 3 * count {
            return Err(EnumerateError::InvalidFrontier(format!(
                "{} bytes do not hold {count} programs of length {program_len}",
                packed.len()
            )));
        }
        if program_len == 0 && count > 1 {
            return Err(EnumerateError::InvalidFrontier(
                "level 0 holds a single empty program".into(),
            ));
        }
        let f = Frontier {
            program_len,
            count,
            packed,
        };
        let mut prev: Option<&[u8]> = None;
        for i in 0..f.count {
            let bytes = f.packed(i);
            let program = Program::decode(bytes).map_err(|e| EnumerateError::InvalidFrontier(e.to_string()))?;
            if program.encode().as_deref() != Some(bytes) {
                return Err(EnumerateError::InvalidFrontier(format!(
                    "program {i} is not in canonical operand order"
                )));
            }
            if let Some(p) = prev {
                if p >= bytes {
                    return Err(EnumerateError::InvalidFrontier(format!(
                        "programs {} and {i} are not in ascending order",
                        i - 1
                    )));
                }
            }
            prev = Some(bytes);
        }
        Ok(f)
    }

    /// Sorts, deduplicates by class and packs the given programs.
    pub fn from_programs<T: SlpInt>(program_len: usize, programs: &[Program]) -> Result<Frontier, EnumerateError> {
        let mut best: HashMap<Digest, Vec<u8>> = HashMap::new();
        for p in programs {
            if p.len() != program_len {
                return Err(EnumerateError::InvalidFrontier(format!(
                    "program {p} does not have {program_len} steps"
                )));
            }
            let key = crate::eval::evaluate::<T>(p)?.canonical_key()?;
            let bytes = p.encode().ok_or_else(|| {
                EnumerateError::InvalidFrontier(format!("program {p} has indices above 255"))
            })?;
            best.entry(key.digest)
                .and_modify(|b| {
                    if bytes < *b {
                        *b = bytes.clone();
                    }
                })
                .or_insert(bytes);
        }
        let mut all: Vec<Vec<u8>> = best.into_values().collect();
        all.sort();
        let count = if program_len == 0 { all.len().min(1) } else { all.len() };
        Frontier::from_packed(program_len, count, all.concat())
    }

    /// Steps per program.
    pub fn program_len(&self) -> usize {
        self.program_len
    }

    /// Number of representatives.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Packed bytes of representative `i`.
    pub fn packed(&self, i: usize) -> &[u8] {
        let w = self.program_len * 3;
        &self.packed[i * w..(i + 1) * w]
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.packed
    }

    pub fn program(&self, i: usize) -> Program {
        Program::decode(self.packed(i)).expect("frontier programs are validated")
    }

    pub fn programs(&self) -> impl Iterator<Item = Program> + '_ {
        (0..self.count).map(|i| self.program(i))
    }

    /// Checks that every representative is normalized and that no two share
    /// a value set.
    pub fn validate_classes<T: SlpInt>(&self) -> Result<(), EnumerateError> {
        let mut seen = HashSet::new();
        let mut vals = Vec::new();
        for i in 0..self.count {
            evaluate_packed_into::<T>(self.packed(i), &mut vals)?;
            let mut sorted = vals.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) || sorted[0].is_zero() {
                return Err(EnumerateError::InvalidFrontier(format!(
                    "program {} is not normalized",
                    self.program(i)
                )));
            }
            if !seen.insert(sorted) {
                return Err(EnumerateError::InvalidFrontier(format!(
                    "program {} duplicates an earlier class",
                    self.program(i)
                )));
            }
        }
        Ok(())
    }

    /// Evaluates every representative.
    pub fn evaluations<T: SlpInt>(&self) -> impl Iterator<Item = Result<Vec<T>, EvalError>> + '_ {
        (0..self.count).map(move |i| {
            let mut vals = Vec::with_capacity(self.program_len + 1);
            evaluate_packed_into::<T>(self.packed(i), &mut vals).map(|_| vals)
        })
    }
}

/// How class identity is decided during expansion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DedupMode {
    /// Equal digests mean equal classes.
    #[default]
    Digest,
    /// Equal digests are re-checked by comparing the full sorted value sets;
    /// a mismatch is reported as [`EnumerateError::DigestCollision`].
    Verified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    parent: u32,
    step: [u8; 3],
}

struct ClassMap<'f, T> {
    parents: &'f Frontier,
    mode: DedupMode,
    classes: HashMap<Digest, Candidate>,
    vals: Vec<T>,
    sorted: Vec<T>,
    encoded: Vec<u8>,
    offsets: Vec<usize>,
    encoder: KeyEncoder,
}

impl<'f, T: SlpInt> ClassMap<'f, T> {
    fn new(parents: &'f Frontier, mode: DedupMode) -> Self {
        ClassMap {
            parents,
            mode,
            classes: HashMap::new(),
            vals: Vec::new(),
            sorted: Vec::new(),
            encoded: Vec::new(),
            offsets: Vec::new(),
            encoder: KeyEncoder::default(),
        }
    }

    fn add_parent(&mut self, index: usize) -> Result<(), EnumerateError> {
        evaluate_packed_into(self.parents.packed(index), &mut self.vals)?;
        self.sorted.clone_from(&self.vals);
        self.sorted.sort_unstable();
        self.encoded.clear();
        self.offsets.clear();
        for v in &self.sorted {
            self.offsets.push(self.encoded.len());
            encode_value(v, &mut self.encoded);
        }
        self.offsets.push(self.encoded.len());

        let n = self.vals.len();
        for i in 0..n {
            for j in i..n {
                for op in Op::ALL {
                    let v = apply(op, &self.vals[i], &self.vals[j]).ok_or(EvalError::Overflow {
                        step: self.parents.program_len() + 1,
                        bits: T::BITS.unwrap_or(0),
                    })?;
                    if v.is_zero() {
                        continue;
                    }
                    let pos = match self.sorted.binary_search(&v) {
                        Ok(_) => continue,
                        Err(pos) => pos,
                    };
                    self.encoder.begin(n + 1);
                    self.encoder.push_encoded(&self.encoded[..self.offsets[pos]]);
                    self.encoder.push_value(&v);
                    self.encoder.push_encoded(&self.encoded[self.offsets[pos]..]);
                    let digest = self.encoder.finish();
                    let cand = Candidate {
                        parent: index as u32,
                        step: [i as u8 + 1, j as u8 + 1, op.code()],
                    };
                    self.insert(digest, cand)?;
                }
            }
        }
        Ok(())
    }

    fn insert(&mut self, digest: Digest, cand: Candidate) -> Result<(), EnumerateError> {
        match self.classes.entry(digest) {
            hashbrown::hash_map::Entry::Vacant(e) => {
                e.insert(cand);
            }
            hashbrown::hash_map::Entry::Occupied(mut e) => {
                let existing = *e.get();
                if self.mode == DedupMode::Verified && existing != cand {
                    let a = class_values::<T>(self.parents, existing)?;
                    let b = class_values::<T>(self.parents, cand)?;
                    if a != b {
                        return Err(EnumerateError::DigestCollision {
                            level: self.parents.program_len() + 1,
                        });
                    }
                }
                if cand < existing {
                    e.insert(cand);
                }
            }
        }
        Ok(())
    }

    fn merge(self, other: Self) -> Result<Self, EnumerateError> {
        let (mut big, small) = if self.classes.len() >= other.classes.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (d, c) in small.classes {
            big.insert(d, c)?;
        }
        Ok(big)
    }
}

fn class_values<T: SlpInt>(parents: &Frontier, cand: Candidate) -> Result<Vec<T>, EnumerateError> {
    let mut bytes = parents.packed(cand.parent as usize).to_vec();
    bytes.extend_from_slice(&cand.step);
    let mut vals = Vec::new();
    evaluate_packed_into::<T>(&bytes, &mut vals)?;
    vals.sort_unstable();
    Ok(vals)
}

/// Extends every representative by one step and keeps one program per class.
///
/// The result is independent of how rayon schedules the work: each class
/// keeps its least `(parent, step)` pair, and parents are in ascending order,
/// so that pair is the least extension program overall.
pub fn expand<T: SlpInt>(frontier: &Frontier, mode: DedupMode) -> Result<Frontier, EnumerateError> {
    let next_len = frontier.program_len() + 1;
    if next_len > MAX_FRONTIER_LEN {
        return Err(EnumerateError::InvalidFrontier(format!(
            "cannot extend beyond {MAX_FRONTIER_LEN} steps"
        )));
    }
    let merged = (0..frontier.len())
        .into_par_iter()
        .with_min_len(64)
        .try_fold(
            || ClassMap::<T>::new(frontier, mode),
            |mut acc, i| {
                acc.add_parent(i)?;
                Ok::<_, EnumerateError>(acc)
            },
        )
        .try_reduce(|| ClassMap::<T>::new(frontier, mode), ClassMap::merge)?;

    let mut chosen: Vec<Candidate> = merged.classes.into_values().collect();
    chosen.par_sort_unstable();
    let mut packed = Vec::with_capacity(chosen.len() * next_len * 3);
    for c in &chosen {
        packed.extend_from_slice(frontier.packed(c.parent as usize));
        packed.extend_from_slice(&c.step);
    }
    Ok(Frontier {
        program_len: next_len,
        count: chosen.len(),
        packed,
    })
}

/// Union of all values computed by the given frontiers' representatives.
pub fn reached_set<T: SlpInt>(frontiers: &[Frontier]) -> Result<BTreeSet<T>, EnumerateError> {
    let mut out = BTreeSet::new();
    for f in frontiers {
        for vals in f.evaluations::<T>() {
            out.extend(vals?);
        }
    }
    Ok(out)
}

/// Largest `x` such that `1..=x` all lie in `set`; 0 when 1 is missing.
pub fn initial_interval<T: SlpInt>(set: &BTreeSet<T>) -> u64 {
    let mut expect = 1u64;
    for v in set {
        match v.as_u64() {
            Some(x) if x == expect => expect += 1,
            Some(x) if x < expect => continue,
            _ => break,
        }
    }
    expect - 1
}

/// All divisors of all reached values.
pub fn covered_set<'a>(
    reached: impl IntoIterator<Item = &'a BigUint>,
    budget: &FactorBudget,
) -> Result<BTreeSet<BigUint>, EnumerateError> {
    let values: Vec<&BigUint> = reached.into_iter().collect();
    let factored: Vec<_> = values.par_iter().map(|v| factorize(v, budget)).collect();
    let mut covered = BTreeSet::new();
    let mut unfactored = Vec::new();
    for f in &factored {
        if !f.complete {
            unfactored.push(f.value.clone());
        }
        covered.extend(divisors(f));
    }
    if unfactored.is_empty() {
        Ok(covered)
    } else {
        Err(EnumerateError::FactorizationIncomplete(Box::new(IncompleteCover {
            partial: covered,
            unfactored,
        })))
    }
}

/// Bound on the divisors tracked for the covered interval.
pub const SMALL_DIVISOR_LIMIT: u64 = 1 << 16;

/// Divisors of `v` that do not exceed `limit`, by trial division with
/// `primes`, which must hold every prime up to `limit`. Any such divisor
/// is built from primes at most `limit`, so no factorization is needed.
pub fn small_divisors(v: &BigUint, limit: u64, primes: &[u64]) -> Vec<u64> {
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut w = v.clone();
    let mut digits = w.to_u64_digits();
    for &p in primes.iter().take_while(|p| **p <= limit) {
        if crate::numtheory::rem_digits(&digits, p) != 0 {
            continue;
        }
        let mut e = 0;
        let mut pe = p;
        loop {
            w /= p;
            e += 1;
            if pe > limit / p || crate::numtheory::rem_digits(&w.to_u64_digits(), p) != 0 {
                break;
            }
            pe *= p;
        }
        factors.push((p, e));
        digits = w.to_u64_digits();
    }
    let mut out = vec![1u64];
    for (p, e) in factors {
        let base = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(base.iter().filter_map(|d| d.checked_mul(pk)).filter(|d| *d <= limit));
        }
    }
    out.sort_unstable();
    out
}

/// One row of the level statistics table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStats {
    pub k: usize,
    /// Integers computed by some program of at most `k` steps.
    pub reached: u64,
    pub initial_interval: u64,
    pub covered_interval: Option<u64>,
    /// Integers dividing some reached integer; `None` when not computed.
    pub covered: Option<u64>,
    /// Number of unfactored values; nonzero makes `covered` a lower bound.
    pub unfactored: usize,
    /// The covered interval reached the small-divisor limit and is only a
    /// lower bound.
    pub interval_capped: bool,
    /// Range-isomorphism classes at length `k`, if materialized.
    pub classes: Option<u64>,
}

impl LevelStats {
    pub const HEADER: &'static str =
        "k\treached\tinitial_interval\tcovered_interval\tcovered\tclasses\tcovered_status";

    pub fn covered_status(&self) -> String {
        let capped = if self.interval_capped { ":interval-capped" } else { "" };
        match (self.covered, self.unfactored) {
            (None, _) => format!("interval-only{capped}"),
            (Some(_), 0) => format!("complete{capped}"),
            (Some(_), n) => format!("lower-bound:{n}-unfactored{capped}"),
        }
    }
}

fn opt(v: Option<u64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

impl fmt::Display for LevelStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.k,
            self.reached,
            self.initial_interval,
            opt(self.covered_interval),
            opt(self.covered),
            opt(self.classes),
            self.covered_status()
        )
    }
}

/// Parameters of a level-by-level run.
#[derive(Debug, Clone)]
pub struct LevelOptions {
    pub max_len: usize,
    /// Frontiers are built up to this length; one more level can still be
    /// counted without storing it.
    pub materialize_up_to: usize,
    /// Covered statistics are computed up to this length.
    pub covered_up_to: usize,
    pub dedup: DedupMode,
    pub budget: FactorBudget,
}

impl LevelOptions {
    pub fn new(max_len: usize) -> Self {
        LevelOptions {
            max_len,
            materialize_up_to: 8,
            covered_up_to: 8,
            dedup: DedupMode::Digest,
            budget: FactorBudget::default(),
        }
    }
}

/// Everything a level run produces.
#[derive(Debug, Clone)]
pub struct LevelRun {
    pub stats: Vec<LevelStats>,
    /// Materialized frontiers, index = program length.
    pub frontiers: Vec<Frontier>,
    /// Each reached integer with the least length reaching it, ascending.
    pub first_reached: Vec<(BigUint, usize)>,
}

impl LevelRun {
    /// Least program length computing `n`, if reached.
    pub fn min_length(&self, n: &BigUint) -> Option<usize> {
        self.first_reached
            .binary_search_by(|(v, _)| v.cmp(n))
            .ok()
            .map(|i| self.first_reached[i].1)
    }
}

/// Enumerates levels `1..=max_len`, checkpointing frontiers and statistics
/// into `store` when given and resuming from frontiers already there.
pub fn run_levels(opts: &LevelOptions, store: Option<&RunDir>) -> Result<LevelRun, EnumerateError> {
    if opts.max_len == 0 {
        return Err(EnumerateError::Config("maximum length must be at least 1".into()));
    }
    if opts.max_len > opts.materialize_up_to + 1 {
        return Err(EnumerateError::Config(format!(
            "length {} needs frontiers up to {}, above the materialization limit {}",
            opts.max_len,
            opts.max_len - 1,
            opts.materialize_up_to
        )));
    }
    crate::dispatch_width!(ScalarWidth::for_program_len(opts.max_len), T => run_levels_with::<T>(opts, store))
}

/// [`run_levels`] with an explicit scalar type wide enough for `max_len`.
pub fn run_levels_with<T: SlpInt>(opts: &LevelOptions, store: Option<&RunDir>) -> Result<LevelRun, EnumerateError> {
    let mut frontiers = vec![Frontier::seed()];
    let mut first: std::collections::HashMap<T, usize> = std::collections::HashMap::new();
    first.insert(T::one(), 0);
    let mut covered: HashSet<BigUint> = HashSet::new();
    covered.insert(BigUint::one());
    let mut unfactored = 0usize;
    let mut stats = Vec::new();
    let small_primes = crate::numtheory::primes_up_to(SMALL_DIVISOR_LIMIT);
    let mut small_covered: HashSet<u64> = HashSet::from([1]);

    for k in 1..=opts.max_len {
        let materialize = k <= opts.materialize_up_to;
        let mut new_values: Vec<T> = Vec::new();
        let mut classes = None;
        if materialize {
            let loaded = match store {
                Some(dir) => dir.load_frontier(k)?,
                None => None,
            };
            let frontier = match loaded {
                Some(f) => {
                    info!("level {k}: resumed {} classes from checkpoint", f.len());
                    f
                }
                None => {
                    let f = expand::<T>(&frontiers[k - 1], opts.dedup)?;
                    if let Some(dir) = store {
                        dir.save_frontier(&f)?;
                    }
                    info!("level {k}: {} classes", f.len());
                    f
                }
            };
            classes = Some(frontier.len() as u64);
            for vals in frontier.evaluations::<T>() {
                for v in vals? {
                    if !first.contains_key(&v) {
                        first.insert(v.clone(), k);
                        new_values.push(v);
                    }
                }
            }
            frontiers.push(frontier);
        } else {
            let swept = sweep_values::<T>(&frontiers[k - 1], &first)?;
            info!("level {k}: counted without materializing");
            for v in swept {
                first.insert(v.clone(), k);
                new_values.push(v);
            }
        }

        let mut reached: BTreeSet<T> = first.keys().cloned().collect();
        let reached_count = reached.len() as u64;
        let initial = initial_interval(&reached);
        reached.clear();

        let big: Vec<BigUint> = new_values.iter().map(SlpInt::to_biguint).collect();
        let smalls: Vec<Vec<u64>> = big
            .par_iter()
            .map(|v| small_divisors(v, SMALL_DIVISOR_LIMIT, &small_primes))
            .collect();
        small_covered.extend(smalls.into_iter().flatten());
        let mut covered_interval = 1u64;
        while covered_interval < SMALL_DIVISOR_LIMIT && small_covered.contains(&(covered_interval + 1)) {
            covered_interval += 1;
        }
        let mut interval_capped = covered_interval == SMALL_DIVISOR_LIMIT;

        let covered_count = if k <= opts.covered_up_to {
            match covered_set(big.iter(), &opts.budget) {
                Ok(set) => covered.extend(set),
                Err(EnumerateError::FactorizationIncomplete(inc)) => {
                    warn!(
                        "level {k}: {} value(s) not fully factored; covered counts are lower bounds",
                        inc.unfactored.len()
                    );
                    unfactored += inc.unfactored.len();
                    covered.extend(inc.partial);
                }
                Err(e) => return Err(e),
            }
            if interval_capped && unfactored == 0 {
                while covered.contains(&BigUint::from(covered_interval + 1)) {
                    covered_interval += 1;
                }
                interval_capped = false;
            }
            Some(covered.len() as u64)
        } else {
            None
        };

        stats.push(LevelStats {
            k,
            reached: reached_count,
            initial_interval: initial,
            covered_interval: Some(covered_interval),
            covered: covered_count,
            unfactored: if covered_count.is_some() { unfactored } else { 0 },
            interval_capped,
            classes,
        });
        if let Some(dir) = store {
            dir.save_stats(&stats)?;
        }
    }

    let mut first_reached: Vec<(BigUint, usize)> = first.into_iter().map(|(v, k)| (v.to_biguint(), k)).collect();
    first_reached.sort_unstable();
    Ok(LevelRun {
        stats,
        frontiers,
        first_reached,
    })
}

/// Frontiers of lengths `0..=max_len`, loading checkpoints from `store`
/// where present and saving the ones it computes.
pub fn build_frontiers(
    max_len: usize,
    store: Option<&RunDir>,
    dedup: DedupMode,
) -> Result<Vec<Frontier>, EnumerateError> {
    let mut out = vec![Frontier::seed()];
    for k in 1..=max_len {
        if let Some(f) = store.map(|d| d.load_frontier(k)).transpose()?.flatten() {
            out.push(f);
            continue;
        }
        let prev = &out[k - 1];
        let f = crate::dispatch_width!(ScalarWidth::for_program_len(k), T => expand::<T>(prev, dedup))?;
        info!("level {k}: {} classes", f.len());
        if let Some(dir) = store {
            dir.save_frontier(&f)?;
        }
        out.push(f);
    }
    Ok(out)
}

/// Values first reached one step beyond `parents`, without building the
/// next frontier.
fn sweep_values<T: SlpInt>(
    parents: &Frontier,
    known: &std::collections::HashMap<T, usize>,
) -> Result<Vec<T>, EnumerateError> {
    let found = (0..parents.len())
        .into_par_iter()
        .with_min_len(64)
        .try_fold(
            || (HashSet::<T>::new(), Vec::<T>::new()),
            |(mut set, mut vals), i| {
                evaluate_packed_into(parents.packed(i), &mut vals)?;
                let n = vals.len();
                for a in 0..n {
                    for b in a..n {
                        for op in Op::ALL {
                            let v = apply(op, &vals[a], &vals[b]).ok_or(EvalError::Overflow {
                                step: parents.program_len() + 1,
                                bits: T::BITS.unwrap_or(0),
                            })?;
                            if v.is_zero() || vals.contains(&v) || known.contains_key(&v) {
                                continue;
                            }
                            set.insert(v);
                        }
                    }
                }
                Ok::<_, EnumerateError>((set, vals))
            },
        )
        .map(|r| r.map(|(set, _)| set))
        .try_reduce(HashSet::new, |mut a, b| {
            if a.len() < b.len() {
                return Ok(b.into_iter().chain(a).collect());
            }
            a.extend(b);
            Ok(a)
        })?;
    let mut out: Vec<T> = found.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

impl From<ProgramError> for EnumerateError {
    fn from(e: ProgramError) -> Self {
        EnumerateError::InvalidFrontier(e.to_string())
    }
}
