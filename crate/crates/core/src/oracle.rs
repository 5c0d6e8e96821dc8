//! Exact computation of the extremal quantities at micro scale and
//! randomized/adversarial counterexample search for the structural lemmas.
//!
//! Every value comes with a witness that can be checked independently of the
//! search that produced it. Searches run under a [`SearchBudget`]; running out
//! of budget is reported through `exact = false` (or a `budget_exhausted`
//! flag), never as a definitive answer.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{j2_expand, phi, random_ds_sequence, smt, AltTracker};
use crate::domain::{combinations, factorial, lex_rank, BlockedSequence, FormationMode, FunctionMatrix, Matrix01, PermFamily, Permutation};
use crate::error::{Error, Result};
use crate::format::serialize_matrix;
use crate::patterns::{contains_pattern, ds_matrix, find_formation, find_sequence_formation, is_ds_sequence, mst, split_formation};
use crate::vcdim::vc_dimension;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchBudget {
    pub node_limit: u64,
    #[serde(serialize_with = "serialize_secs")]
    pub time_limit: Duration,
    pub workers: usize,
}

fn serialize_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_secs())
}

impl SearchBudget {
    pub fn new(node_limit: u64, time_limit_secs: u64, workers: usize) -> Result<Self> {
        if node_limit == 0 || time_limit_secs == 0 || workers == 0 {
            return Err(Error::domain("search budget limits must be positive"));
        }
        Ok(SearchBudget {
            node_limit,
            time_limit: Duration::from_secs(time_limit_secs),
            workers,
        })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::domain(format!("cannot start {} workers: {e}", self.workers)))
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            node_limit: 4_000_000_000,
            time_limit: Duration::from_secs(600),
            workers: 1,
        }
    }
}

/// Shared node/time accounting for one search.
struct Meter {
    nodes: AtomicU64,
    limit: u64,
    deadline: Instant,
    stopped: AtomicBool,
}

impl Meter {
    fn new(budget: &SearchBudget) -> Self {
        Meter {
            nodes: AtomicU64::new(0),
            limit: budget.node_limit,
            deadline: Instant::now() + budget.time_limit,
            stopped: AtomicBool::new(false),
        }
    }

    /// Counts a node; false once the budget is spent.
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.limit || (n % 4096 == 0 && Instant::now() > self.deadline) {
            self.stopped.store(true, Ordering::Relaxed);
        }
        !self.stopped.load(Ordering::Relaxed)
    }

    fn exhausted(&self) -> bool {
        self.stopped.load(Ordering::Relaxed)
    }

    fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }
}

/// An extremal value with its witness.
#[derive(Debug, Clone)]
pub struct Extremal<W> {
    pub value: usize,
    pub witness: W,
    /// False when the budget ran out; `value` is then only a lower bound.
    pub exact: bool,
    pub nodes: u64,
}

pub const MAX_ONES_CAP: usize = 7;

/// Forbidden configuration on column tuples of a fixed width: a tuple
/// violates it when it contains every listed pattern. Patterns are given as
/// per-row masks over the pattern's columns.
struct Forbidden {
    width: usize,
    patterns: Vec<Vec<u32>>,
    /// Some pattern has an empty column, so tuples reaching into still-empty
    /// columns must be checked as well.
    loose: bool,
}

impl Forbidden {
    fn from_patterns(patterns: &[Matrix01]) -> Self {
        let width = patterns[0].cols();
        let rows = patterns
            .iter()
            .map(|p| {
                (1..=p.rows())
                    .map(|r| p.row_ones(r).iter().fold(0u32, |m, &c| m | 1 << (c - 1)))
                    .collect()
            })
            .collect();
        let loose = patterns.iter().any(|p| p.column_counts().contains(&0));
        Forbidden { width, patterns: rows, loose }
    }

    /// Greedy earliest rows embed a pattern with a fixed column map.
    fn tuple_contains(cols: &[u32], tuple: &[usize], pattern: &[u32], all_rows: u32) -> bool {
        let mut floor = all_rows;
        for &req in pattern {
            let mut cand = floor;
            let mut bits = req;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                cand &= cols[tuple[j]];
                bits &= bits - 1;
            }
            if cand == 0 {
                return false;
            }
            let row = cand.trailing_zeros();
            floor = all_rows & !((2u32 << row) - 1);
        }
        true
    }

    fn violated(&self, cols: &[u32], tuples: &[Vec<usize>], all_rows: u32) -> bool {
        tuples
            .iter()
            .any(|t| self.patterns.iter().all(|p| Self::tuple_contains(cols, t, p, all_rows)))
    }
}

/// Column-major include-first branch and bound over `n×n` matrices.
struct MaxOnesSearch<'a> {
    n: usize,
    rule: &'a Forbidden,
    /// Tuples to check after adding a cell in column `c`.
    tuples: Vec<Vec<Vec<usize>>>,
    all_rows: u32,
    meter: &'a Meter,
}

impl MaxOnesSearch<'_> {
    fn cells(&self) -> usize {
        self.n * self.n
    }

    /// Best completion of `cols` from cell `t`, if it beats `floor`. With
    /// `first` the search stops at the first leaf reaching `floor + 1`.
    fn run(&self, t: usize, ones: usize, cols: &mut Vec<u32>, best: &AtomicUsize, first: bool) -> Option<(usize, Vec<u32>)> {
        if !self.meter.tick() {
            return None;
        }
        let floor = best.load(Ordering::Relaxed);
        if ones + (self.cells() - t) <= floor {
            return None;
        }
        if t == self.cells() {
            best.fetch_max(ones, Ordering::Relaxed);
            return Some((ones, cols.clone()));
        }
        let (r, c) = (t % self.n, t / self.n);
        let mut found = None;
        cols[c] |= 1 << r;
        if !self.rule.violated(cols, &self.tuples[c], self.all_rows) {
            found = self.run(t + 1, ones + 1, cols, best, first);
        }
        cols[c] &= !(1 << r);
        if first && found.is_some() {
            return found;
        }
        if let Some(other) = self.run(t + 1, ones, cols, best, first) {
            if found.as_ref().map_or(true, |(v, _)| other.0 > *v) {
                found = Some(other);
            }
        }
        found
    }
}

fn to_matrix(n: usize, cols: &[u32]) -> Matrix01 {
    let mut m = Matrix01::zeros(n, n);
    for (c, &mask) in cols.iter().enumerate() {
        for r in 0..n {
            if mask >> r & 1 == 1 {
                m.set(r + 1, c + 1, true);
            }
        }
    }
    m
}

fn max_ones(rule: &Forbidden, n: usize, budget: &SearchBudget) -> Result<Extremal<Matrix01>> {
    if n > MAX_ONES_CAP {
        return Err(Error::CapExceeded(format!("n = {n} exceeds the branch-and-bound cap {MAX_ONES_CAP}")));
    }
    let tuples: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|c| {
            combinations(n, rule.width)
                .into_iter()
                .map(|t| t.into_iter().map(|x| x - 1).collect::<Vec<_>>())
                .filter(|t| t.contains(&c) && (rule.loose || t.iter().all(|&x| x <= c)))
                .collect()
        })
        .collect();
    let meter = Meter::new(budget);
    let search = MaxOnesSearch {
        n,
        rule,
        tuples,
        all_rows: if n == 0 { 0 } else { (1u32 << n) - 1 },
        meter: &meter,
    };
    if n == 0 {
        return Ok(Extremal { value: 0, witness: Matrix01::zeros(0, 0), exact: true, nodes: 0 });
    }
    let best = AtomicUsize::new(0);
    // A value of 0 is always achievable; seed the search so that it is reported.
    let mut result = (0usize, vec![0u32; n]);
    if budget.workers <= 1 {
        let floor = AtomicUsize::new(0);
        if let Some(found) = search.run(0, 0, &mut vec![0; n], &floor, false) {
            result = found;
        }
    } else {
        // Split on the first cells, then restore the sequential witness by a
        // first-hit search for the optimum.
        let depth = (search.cells()).min(10);
        let mut prefixes = Vec::new();
        enumerate_prefixes(&search, 0, depth, 0, &mut vec![0; n], &mut prefixes);
        let pool = budget.pool()?;
        let found: Vec<(usize, Vec<u32>)> = pool.install(|| {
            prefixes
                .par_iter()
                .filter_map(|(ones, cols)| search.run(depth, *ones, &mut cols.clone(), &best, false))
                .collect()
        });
        let top = found.iter().map(|f| f.0).max().unwrap_or(0);
        result.0 = top;
        if top > 0 {
            let target = AtomicUsize::new(top - 1);
            match search.run(0, 0, &mut vec![0; n], &target, true) {
                Some(w) => result = w,
                None => {
                    result = found.into_iter().find(|f| f.0 == top).expect("maximum is attained");
                }
            }
        }
    }
    let witness = to_matrix(n, &result.1);
    Ok(Extremal {
        value: result.0,
        witness,
        exact: !meter.exhausted(),
        nodes: meter.nodes(),
    })
}

fn enumerate_prefixes(
    search: &MaxOnesSearch,
    t: usize,
    depth: usize,
    ones: usize,
    cols: &mut Vec<u32>,
    out: &mut Vec<(usize, Vec<u32>)>,
) {
    if t == depth {
        out.push((ones, cols.clone()));
        return;
    }
    let (r, c) = (t % search.n, t / search.n);
    cols[c] |= 1 << r;
    if !search.rule.violated(cols, &search.tuples[c], search.all_rows) {
        enumerate_prefixes(search, t + 1, depth, ones + 1, cols, out);
    }
    cols[c] &= !(1 << r);
    enumerate_prefixes(search, t + 1, depth, ones, cols, out);
}

/// `mex_S(n)`: most 1-entries in an `n×n` matrix avoiding `pattern`.
pub fn brute_mex(pattern: &Matrix01, n: usize, budget: &SearchBudget) -> Result<Extremal<Matrix01>> {
    if pattern.ones() == 0 {
        return Err(Error::domain("pattern has no 1-entry"));
    }
    if pattern.rows() > n || pattern.cols() > n {
        let w = Matrix01::ones_matrix(n, n);
        return Ok(Extremal { value: n * n, witness: w, exact: true, nodes: 0 });
    }
    if pattern.rows() > 32 || pattern.cols() > 32 {
        return Err(Error::CapExceeded("pattern wider than 32".into()));
    }
    max_ones(&Forbidden::from_patterns(std::slice::from_ref(pattern)), n, budget)
}

/// `p_k(n)`: most 1-entries in an `n×n` matrix none of whose `(k+1)`-tuples of
/// columns contains every `(k+1)`-permutation matrix.
pub fn brute_p(k: usize, n: usize, budget: &SearchBudget) -> Result<Extremal<Matrix01>> {
    if k == 0 {
        return Err(Error::domain("p_k needs k >= 1"));
    }
    if k + 1 > n {
        return Ok(Extremal { value: n * n, witness: Matrix01::ones_matrix(n, n), exact: true, nodes: 0 });
    }
    let perms: Vec<Matrix01> = Permutation::all(k + 1).map(|p| p.to_matrix().into_matrix()).collect();
    max_ones(&Forbidden::from_patterns(&perms), n, budget)
}

/// `r_k(n)` under both readings of "VC-dimension k".
#[derive(Debug, Clone)]
pub struct RValue {
    /// Largest family with VC-dimension at most `k`.
    pub value: usize,
    pub witness: PermFamily,
    /// Largest family with VC-dimension exactly `k` (0 when none exists).
    pub exactly_k: usize,
    pub exactly_k_witness: Option<PermFamily>,
}

pub const R_CAP: usize = 4;

/// Every family of VC-dimension at most `k` misses some pattern on each
/// `(k+1)`-tuple, so it lies inside the family cut out by one missing pattern
/// per tuple; the search ranges over those choices.
pub fn brute_r(k: usize, n: usize) -> Result<RValue> {
    if k == 0 {
        return Err(Error::domain("r_k needs k >= 1"));
    }
    if n > R_CAP {
        return Err(Error::CapExceeded(format!("n = {n} exceeds the r_k cap {R_CAP}")));
    }
    let perms: Vec<Permutation> = Permutation::all(n).collect();
    let family_of = |mask: u32| {
        PermFamily::new(n, perms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone()))
            .expect("members have length n")
    };
    let full = if perms.len() == 32 { u32::MAX } else { (1u32 << perms.len()) - 1 };
    if k + 1 > n {
        let all = family_of(full);
        let exact = (k == n).then(|| all.clone());
        return Ok(RValue {
            value: perms.len(),
            witness: all,
            exactly_k: if k == n { perms.len() } else { 0 },
            exactly_k_witness: exact,
        });
    }
    let tuples = combinations(n, k + 1);
    let patterns = factorial(k + 1);
    // avoid[t][σ]: members whose restriction to tuple t is not pattern σ.
    let avoid: Vec<Vec<u32>> = tuples
        .iter()
        .map(|t| {
            (0..patterns)
                .map(|sigma| {
                    perms.iter().enumerate().fold(0u32, |m, (i, p)| {
                        let picked: Vec<usize> = t.iter().map(|&j| p.apply(j)).collect();
                        if lex_rank(&picked) == sigma { m } else { m | 1 << i }
                    })
                })
                .collect()
        })
        .collect();
    let mut digits = vec![0usize; tuples.len()];
    let mut best: Option<u32> = None;
    let mut vc_cache: HashMap<u32, usize> = HashMap::new();
    let mut best_exact: Option<u32> = None;
    loop {
        let mask = digits.iter().enumerate().fold(full, |m, (t, &d)| m & avoid[t][d]);
        if best.map_or(true, |b| mask.count_ones() > b.count_ones()) {
            best = Some(mask);
        }
        if mask != 0 && best_exact.map_or(true, |b| mask.count_ones() > b.count_ones()) {
            let vc = *vc_cache
                .entry(mask)
                .or_insert_with(|| vc_dimension(&family_of(mask)).expect("nonempty"));
            if vc == k {
                best_exact = Some(mask);
            }
        }
        let mut j = digits.len();
        loop {
            if j == 0 {
                let best = best.expect("at least one assignment");
                return Ok(RValue {
                    value: best.count_ones() as usize,
                    witness: family_of(best),
                    exactly_k: best_exact.map_or(0, |m| m.count_ones() as usize),
                    exactly_k_witness: best_exact.map(family_of),
                });
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < patterns {
                break;
            }
            digits[j] = 0;
        }
    }
}

pub const SEQUENCE_LENGTH_CAP: usize = 20;

/// `λ_s(n)`: longest DS(s)-sequence over `n` symbols.
pub fn brute_lambda(s: usize, n: usize, budget: &SearchBudget) -> Result<Extremal<Vec<usize>>> {
    if s == 0 {
        return Err(Error::domain("λ_s needs s >= 1"));
    }
    let meter = Meter::new(budget);
    let mut tracker = AltTracker::new(n);
    let mut best = Vec::new();
    let capped = lambda_dfs(&mut tracker, s, 0, n, &meter, &mut best);
    if capped {
        return Err(Error::CapExceeded(format!(
            "λ_{s}({n}) reaches the length cap {SEQUENCE_LENGTH_CAP}"
        )));
    }
    Ok(Extremal {
        value: best.len(),
        witness: best,
        exact: !meter.exhausted(),
        nodes: meter.nodes(),
    })
}

/// True when the length cap was reached.
fn lambda_dfs(t: &mut AltTracker, s: usize, introduced: usize, n: usize, meter: &Meter, best: &mut Vec<usize>) -> bool {
    if t.seq().len() > best.len() {
        *best = t.seq().to_vec();
    }
    if t.seq().len() >= SEQUENCE_LENGTH_CAP {
        return true;
    }
    if !meter.tick() {
        return false;
    }
    for x in 1..=(introduced + 1).min(n) {
        if t.can_push(x, s) {
            t.push(x);
            let capped = lambda_dfs(t, s, introduced.max(x), n, meter, best);
            t.pop();
            if capped {
                return true;
            }
        }
    }
    false
}

pub const SEQ_EXTREMAL_CAP: usize = 4;
/// Largest symbol count tried for `Π′` before reporting the cap.
pub const PI_PRIME_SYMBOL_CAP: usize = 6;
pub const F_LENGTH_CAP: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqExtremal {
    /// `F_{r,s}(n)`: longest r-sparse `(r,s)`-formation-free sequence over `n` symbols.
    F { r: usize, s: usize },
    /// `Π′_{r,s,k}(m)`: most symbols in a formation-free sequence of at most
    /// `m` blocks where every symbol occurs at least `k` times.
    PiPrime { r: usize, s: usize, k: usize },
}

pub fn brute_seq_extremal(kind: SeqExtremal, size: usize, budget: &SearchBudget) -> Result<Extremal<BlockedSequence<usize>>> {
    match kind {
        SeqExtremal::F { r, s } => {
            let e = brute_f(r, s, size, budget)?;
            Ok(Extremal {
                value: e.value,
                witness: BlockedSequence::greedy(e.witness),
                exact: e.exact,
                nodes: e.nodes,
            })
        }
        SeqExtremal::PiPrime { r, s, k } => brute_pi_prime(r, s, k, size, budget),
    }
}

fn check_small(r: usize, s: usize, size: usize) -> Result<()> {
    if r == 0 || s == 0 {
        return Err(Error::domain("r and s must be positive"));
    }
    if r > 3 || s > 3 || size > SEQ_EXTREMAL_CAP {
        return Err(Error::CapExceeded(format!(
            "sequence extremal search supports r, s <= 3 and size <= {SEQ_EXTREMAL_CAP}"
        )));
    }
    Ok(())
}

pub fn brute_f(r: usize, s: usize, n: usize, budget: &SearchBudget) -> Result<Extremal<Vec<usize>>> {
    check_small(r, s, n)?;
    let meter = Meter::new(budget);
    let mut seq = Vec::new();
    let mut best = Vec::new();
    if f_dfs(&mut seq, r, s, 0, n, &meter, &mut best) {
        return Err(Error::CapExceeded(format!("F_{{{r},{s}}}({n}) reaches the length cap {F_LENGTH_CAP}")));
    }
    Ok(Extremal { value: best.len(), witness: best, exact: !meter.exhausted(), nodes: meter.nodes() })
}

fn f_dfs(seq: &mut Vec<usize>, r: usize, s: usize, introduced: usize, n: usize, meter: &Meter, best: &mut Vec<usize>) -> bool {
    if seq.len() > best.len() {
        *best = seq.clone();
    }
    if seq.len() >= F_LENGTH_CAP {
        return true;
    }
    if !meter.tick() {
        return false;
    }
    for x in 1..=(introduced + 1).min(n) {
        let recent = &seq[seq.len().saturating_sub(r - 1)..];
        if recent.contains(&x) {
            continue;
        }
        seq.push(x);
        if find_sequence_formation(seq, r, s).is_none() && f_dfs(seq, r, s, introduced.max(x), n, meter, best) {
            seq.pop();
            return true;
        }
        seq.pop();
    }
    false
}

pub fn brute_pi_prime(r: usize, s: usize, k: usize, m: usize, budget: &SearchBudget) -> Result<Extremal<BlockedSequence<usize>>> {
    check_small(r, s, m)?;
    if k == 0 {
        return Err(Error::domain("Π′ needs k >= 1"));
    }
    let empty = BlockedSequence::greedy(Vec::new());
    if k > m {
        return Ok(Extremal { value: 0, witness: empty, exact: true, nodes: 0 });
    }
    let meter = Meter::new(budget);
    let mut best = (0, empty);
    // Dropping a symbol keeps a sequence valid, so feasibility is downward closed.
    for symbols in 1..=PI_PRIME_SYMBOL_CAP + 1 {
        let mut state = PiState {
            blocks: vec![Vec::new()],
            left: vec![k; symbols + 1],
            symbols,
        };
        match pi_dfs(&mut state, r, s, m, 0, &meter) {
            Some(true) => {
                if symbols > PI_PRIME_SYMBOL_CAP {
                    return Err(Error::CapExceeded(format!(
                        "Π′ exceeds the symbol cap {PI_PRIME_SYMBOL_CAP}"
                    )));
                }
                let blocks: Vec<Vec<usize>> = state.blocks.into_iter().filter(|b| !b.is_empty()).collect();
                best = (symbols, BlockedSequence::from_blocks(blocks)?);
            }
            Some(false) => break,
            None => {
                return Ok(Extremal { value: best.0, witness: best.1, exact: false, nodes: meter.nodes() });
            }
        }
    }
    Ok(Extremal { value: best.0, witness: best.1, exact: true, nodes: meter.nodes() })
}

struct PiState {
    blocks: Vec<Vec<usize>>,
    left: Vec<usize>,
    symbols: usize,
}

impl PiState {
    fn flat(&self) -> Vec<usize> {
        self.blocks.concat()
    }
}

fn pi_dfs(st: &mut PiState, r: usize, s: usize, m: usize, introduced: usize, meter: &Meter) -> Option<bool> {
    if st.left[1..].iter().all(|&l| l == 0) {
        return Some(true);
    }
    if !meter.tick() {
        return None;
    }
    let open = m - st.blocks.len();
    let cur = st.blocks.last().expect("one open block");
    for x in 1..=st.symbols {
        let slots = open + usize::from(!cur.contains(&x));
        if st.left[x] > slots {
            return Some(false);
        }
    }
    let mut exhausted = false;
    for x in 1..=(introduced + 1).min(st.symbols) {
        if st.left[x] == 0 || st.blocks.last().expect("open block").contains(&x) {
            continue;
        }
        st.blocks.last_mut().expect("open block").push(x);
        st.left[x] -= 1;
        let ok = find_sequence_formation(&st.flat(), r, s).is_none();
        let res = if ok { pi_dfs(st, r, s, m, introduced.max(x), meter) } else { Some(false) };
        if res == Some(true) {
            return res;
        }
        st.left[x] += 1;
        st.blocks.last_mut().expect("open block").pop();
        exhausted |= res.is_none();
    }
    if !st.blocks.last().expect("open block").is_empty() && st.blocks.len() < m {
        st.blocks.push(Vec::new());
        let res = pi_dfs(st, r, s, m, introduced, meter);
        if res == Some(true) {
            return res;
        }
        st.blocks.pop();
        exhausted |= res.is_none();
    }
    if exhausted {
        None
    } else {
        Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaValue {
    Finite { value: usize, witness: Matrix01 },
    /// Columns with fewer than `2s-2` ones never carry a doubled formation.
    Infinite,
}

pub const DELTA_ROW_CAP: usize = 6;

/// `Δ_{r,s,k}(m)`: most columns in an `m`-row doubled-`(r,s)`-formation-free
/// matrix with at least `k` ones per column.
///
/// Trimming a column to `k` ones keeps the matrix free, and formations ignore
/// column order, so the search is over multiplicities of `k`-subsets of rows:
/// for every `s`-partition fewer than `r` chosen columns may fit it.
pub fn brute_delta(r: usize, s: usize, k: usize, m: usize) -> Result<DeltaValue> {
    if r == 0 || s < 2 {
        return Err(Error::domain("Δ needs r >= 1 and s >= 2"));
    }
    if m > DELTA_ROW_CAP || r > 4 {
        return Err(Error::CapExceeded(format!("Δ search supports m <= {DELTA_ROW_CAP} and r <= 4")));
    }
    if m < k {
        return Ok(DeltaValue::Finite { value: 0, witness: Matrix01::zeros(m, 0) });
    }
    if k < 2 * s - 2 {
        return Ok(DeltaValue::Infinite);
    }
    let sets = combinations(m, k);
    let partitions: Vec<Vec<usize>> = combinations(m - 1, s - 1)
        .into_iter()
        .map(|cuts| {
            // Interval index of every row.
            let mut idx = vec![0; m + 1];
            for row in 1..=m {
                idx[row] = cuts.iter().filter(|&&c| c < row).count();
            }
            idx
        })
        .collect();
    // fits[p]: sets fitting partition p.
    let fits: Vec<Vec<bool>> = partitions
        .iter()
        .map(|idx| {
            sets.iter()
                .map(|set| {
                    let mut count = vec![0; s];
                    for &row in set {
                        count[idx[row]] += 1;
                    }
                    (0..s).all(|i| count[i] >= if i == 0 || i + 1 == s { 1 } else { 2 })
                })
                .collect()
        })
        .collect();
    let mut mult = vec![0; sets.len()];
    let mut load = vec![0; partitions.len()];
    let mut best = (0, mult.clone());
    delta_dfs(0, 0, r, &fits, &mut mult, &mut load, &mut best);
    let cols: Vec<usize> = best
        .1
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat(i).take(c))
        .collect();
    let mut witness = Matrix01::zeros(m, cols.len());
    for (j, &i) in cols.iter().enumerate() {
        for &row in &sets[i] {
            witness.set(row, j + 1, true);
        }
    }
    Ok(DeltaValue::Finite { value: best.0, witness })
}

fn delta_dfs(
    i: usize,
    total: usize,
    r: usize,
    fits: &[Vec<bool>],
    mult: &mut Vec<usize>,
    load: &mut Vec<usize>,
    best: &mut (usize, Vec<usize>),
) {
    if total > best.0 {
        *best = (total, mult.clone());
    }
    if i == mult.len() || total + (mult.len() - i) * (r - 1) <= best.0 {
        return;
    }
    let room = fits
        .iter()
        .zip(load.iter())
        .filter(|(f, _)| f[i])
        .map(|(_, &l)| r - 1 - l)
        .min()
        .unwrap_or(r - 1);
    for c in (0..=room).rev() {
        for (p, f) in fits.iter().enumerate() {
            if f[i] {
                load[p] += c;
            }
        }
        mult[i] = c;
        delta_dfs(i + 1, total + c, r, fits, mult, load, best);
        mult[i] = 0;
        for (p, f) in fits.iter().enumerate() {
            if f[i] {
                load[p] -= c;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "lemma")]
pub enum Lemma {
    /// Hosts with `2l` columns containing a member of every set of `Φ(l)`
    /// contain `DS_{2l}` on some pair of columns `{2i-1, 2i}`.
    TodsLargeEven { l: usize },
    /// Hosts with `2l+1` columns containing a member of every set of `Φ(l, i)`
    /// for all `i` contain `DS_{2l+1}`.
    TodsLargeOdd { l: usize },
    /// If the MST of a matrix contains an `(sr, s)`-formation, the matrix
    /// contains an `(r, s)`-formation.
    Form2Spl { r: usize, s: usize },
    /// The SMT of a DS(s)-sequence avoids `DS_{s+1}`.
    OneLongerSeq { s: usize },
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HuntConfig {
    pub random: usize,
    pub adversarial: usize,
    /// Largest host dimension (rows, and columns where free).
    pub max_size: usize,
    pub seed: u64,
    pub budget: SearchBudget,
}

impl HuntConfig {
    pub fn new(random: usize, adversarial: usize, seed: u64) -> Self {
        HuntConfig {
            random,
            adversarial,
            max_size: 10,
            seed,
            budget: SearchBudget::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    pub candidate: usize,
    /// Offending host in the matrix file format (or the sequence for sequence lemmas).
    pub host: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HuntReport {
    pub lemma: Lemma,
    pub candidates: usize,
    pub random_candidates: usize,
    pub adversarial_candidates: usize,
    /// Candidates satisfying the hypothesis, so the conclusion was tested.
    pub hypothesis_held: usize,
    pub violations: Vec<Violation>,
    pub budget_exhausted: bool,
    pub elapsed_ms: u128,
}

enum Outcome {
    Vacuous,
    Holds,
    Violated(String, String),
}

struct Hunt {
    lemma: Lemma,
    /// Sets of which the host must contain at least one member each.
    sets: Vec<Vec<Matrix01>>,
    width: usize,
    ds: Matrix01,
}

impl Hunt {
    fn new(lemma: Lemma) -> Result<Self> {
        let (sets, width, ds) = match lemma {
            Lemma::TodsLargeEven { l } => {
                check_l(l)?;
                let sets = phi(l, None)?.into_iter().map(to_matrices).collect();
                (sets, 2 * l, ds_matrix(2 * l)?)
            }
            Lemma::TodsLargeOdd { l } => {
                check_l(l)?;
                let mut sets = Vec::new();
                for i in 1..=2 * l + 1 {
                    sets.extend(phi(l, Some(i))?.into_iter().map(to_matrices));
                }
                (sets, 2 * l + 1, ds_matrix(2 * l + 1)?)
            }
            Lemma::Form2Spl { r, s } => {
                if r == 0 || s == 0 || r > 3 || s > 3 {
                    return Err(Error::domain("form2spl hunt supports 1 <= r, s <= 3"));
                }
                (Vec::new(), 0, Matrix01::zeros(0, 0))
            }
            Lemma::OneLongerSeq { s } => {
                if !(1..=6).contains(&s) {
                    return Err(Error::domain("onelongerseq hunt supports 1 <= s <= 6"));
                }
                (Vec::new(), 0, ds_matrix(s + 1)?)
            }
        };
        Ok(Hunt { lemma, sets, width, ds })
    }

    fn hypothesis(&self, host: &Matrix01) -> bool {
        self.sets.iter().all(|set| set.iter().any(|f| contains_pattern(host, f).is_some()))
    }

    fn conclusion(&self, host: &Matrix01) -> bool {
        match self.lemma {
            Lemma::TodsLargeEven { l } => {
                (1..=l).any(|i| contains_pattern(&host.select_columns(&[2 * i - 1, 2 * i]), &self.ds).is_some())
            }
            _ => contains_pattern(host, &self.ds).is_some(),
        }
    }

    fn check_matrix(&self, host: Matrix01) -> Outcome {
        if !self.hypothesis(&host) {
            return Outcome::Vacuous;
        }
        if self.conclusion(&host) {
            Outcome::Holds
        } else {
            Outcome::Violated(serialize_matrix(&host), "hypothesis holds but the DS matrix is absent".into())
        }
    }

    fn random_rows<R: Rng>(&self, rng: &mut R, max: usize) -> usize {
        let low = self.sets.iter().flatten().map(|f| f.rows()).min().unwrap_or(1).max(1);
        rng.gen_range(low..=max.max(low))
    }

    fn random_host<R: Rng>(&self, rng: &mut R, max: usize) -> Matrix01 {
        let rows = self.random_rows(rng, max);
        random_matrix(rng, rows, self.width)
    }

    /// Union of one random embedding of a random member of every set,
    /// optionally thinned to a minimal host still meeting the hypothesis.
    fn adversarial_host<R: Rng>(&self, rng: &mut R, max: usize) -> Matrix01 {
        let need = self.sets.iter().flatten().map(|f| f.rows()).max().unwrap_or(1);
        let rows = rng.gen_range(need..=max.max(need));
        let mut host = Matrix01::zeros(rows, self.width);
        for set in &self.sets {
            let f = &set[rng.gen_range(0..set.len())];
            let mut picked: Vec<usize> = (1..=rows).collect::<Vec<_>>().choose_multiple(rng, f.rows()).copied().collect();
            picked.sort_unstable();
            for (r, c) in f.cells() {
                host.set(picked[r - 1], c, true);
            }
        }
        if rng.gen_bool(0.5) {
            let mut cells = host.cells();
            cells.shuffle(rng);
            for (r, c) in cells {
                host.set(r, c, false);
                if !self.hypothesis(&host) {
                    host.set(r, c, true);
                }
            }
        } else {
            let noise = rng.gen_range(0.0..0.3);
            for r in 1..=rows {
                for c in 1..=self.width {
                    if rng.gen_bool(noise) {
                        host.set(r, c, true);
                    }
                }
            }
        }
        host
    }

    fn candidate(&self, idx: usize, adversarial: bool, cfg: &HuntConfig) -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(idx as u64);
        let max = cfg.max_size.max(1);
        match self.lemma {
            Lemma::TodsLargeEven { .. } | Lemma::TodsLargeOdd { .. } => {
                let host = if adversarial { self.adversarial_host(&mut rng, max) } else { self.random_host(&mut rng, max) };
                self.check_matrix(host)
            }
            Lemma::Form2Spl { r, s } => {
                let host = if adversarial {
                    planted_formation(&mut rng, r, s, max)
                } else {
                    let (m, n) = (rng.gen_range(1..=max), rng.gen_range(1..=max));
                    random_matrix(&mut rng, m, n)
                };
                let seq = mst(&host);
                if find_sequence_formation(seq.symbols(), s * r, s).is_none() {
                    return Outcome::Vacuous;
                }
                match split_formation(&host, r, s) {
                    Ok(Some(w)) if w.validate(&host).is_ok() => Outcome::Holds,
                    other => Outcome::Violated(serialize_matrix(&host), format!("split_formation returned {other:?}")),
                }
            }
            Lemma::OneLongerSeq { s } => {
                let alphabet = rng.gen_range(1..=12);
                let seq = if adversarial {
                    let raw = random_ds_sequence(&mut rng, s, alphabet, 400);
                    BlockedSequence::greedy(raw.symbols().to_vec())
                } else {
                    random_ds_sequence(&mut rng, s, alphabet, 40)
                };
                if !is_ds_sequence(seq.symbols(), s) {
                    return Outcome::Vacuous;
                }
                let m = smt(&seq);
                if contains_pattern(&m, &self.ds).is_none() {
                    Outcome::Holds
                } else {
                    Outcome::Violated(crate::format::serialize_sequence(&seq), "SMT contains the DS matrix".into())
                }
            }
        }
    }
}

fn check_l(l: usize) -> Result<()> {
    if !(1..=2).contains(&l) {
        return Err(Error::domain(format!("lemma hunts support l in 1..=2 (got {l})")));
    }
    Ok(())
}

fn to_matrices(set: BTreeSet<FunctionMatrix>) -> Vec<Matrix01> {
    set.into_iter().map(FunctionMatrix::into_matrix).collect()
}

fn random_matrix<R: Rng>(rng: &mut R, m: usize, n: usize) -> Matrix01 {
    let p = rng.gen_range(0.15..0.85);
    let mut out = Matrix01::zeros(m, n);
    for r in 1..=m {
        for c in 1..=n {
            if rng.gen_bool(p) {
                out.set(r, c, true);
            }
        }
    }
    out
}

/// A matrix whose MST contains an `(sr, s)`-formation with troops that share
/// rows: the formation sequence is cut into increasing runs, one per row.
fn planted_formation<R: Rng>(rng: &mut R, r: usize, s: usize, max: usize) -> Matrix01 {
    let size = s * r;
    let n = rng.gen_range(size..=max.max(size));
    let mut cols: Vec<usize> = (1..=n).collect::<Vec<_>>().choose_multiple(rng, size).copied().collect();
    cols.sort_unstable();
    let mut seq = Vec::with_capacity(size * s);
    for _ in 0..s {
        let mut troop = cols.clone();
        troop.shuffle(rng);
        seq.extend(troop);
    }
    let mut rows: Vec<Vec<usize>> = vec![Vec::new()];
    for x in seq {
        let last = rows.last().expect("nonempty");
        if last.last().is_some_and(|&y| y >= x) || (!last.is_empty() && rng.gen_bool(0.2)) {
            rows.push(Vec::new());
        }
        rows.last_mut().expect("nonempty").push(x);
    }
    let mut out = Matrix01::zeros(rows.len(), n);
    for (i, row) in rows.iter().enumerate() {
        for &c in row {
            out.set(i + 1, c, true);
        }
    }
    let noise = rng.gen_range(0.0..0.2);
    for i in 1..=rows.len() {
        for c in 1..=n {
            if rng.gen_bool(noise) {
                out.set(i, c, true);
            }
        }
    }
    out
}

/// Generates `random + adversarial` candidates satisfying (or tested against)
/// the lemma's hypothesis and checks its conclusion on each.
pub fn counterexample_search(lemma: Lemma, cfg: &HuntConfig) -> Result<HuntReport> {
    let hunt = Hunt::new(lemma)?;
    let start = Instant::now();
    let deadline = start + cfg.budget.time_limit;
    let stop = AtomicBool::new(false);
    let held = AtomicUsize::new(0);
    let done = AtomicUsize::new(0);
    let total = cfg.random + cfg.adversarial;
    let pool = cfg.budget.pool()?;
    let mut violations: Vec<Violation> = pool.install(|| {
        (0..total)
            .into_par_iter()
            .filter_map(|idx| {
                if stop.load(Ordering::Relaxed) {
                    return None;
                }
                if done.load(Ordering::Relaxed) as u64 >= cfg.budget.node_limit || Instant::now() > deadline {
                    stop.store(true, Ordering::Relaxed);
                    return None;
                }
                let outcome = hunt.candidate(idx, idx >= cfg.random, cfg);
                done.fetch_add(1, Ordering::Relaxed);
                match outcome {
                    Outcome::Vacuous => None,
                    Outcome::Holds => {
                        held.fetch_add(1, Ordering::Relaxed);
                        None
                    }
                    Outcome::Violated(host, detail) => {
                        held.fetch_add(1, Ordering::Relaxed);
                        Some(Violation { candidate: idx, host, detail })
                    }
                }
            })
            .collect()
    });
    violations.sort_by_key(|v| v.candidate);
    let candidates = done.load(Ordering::Relaxed);
    let exhausted = stop.load(Ordering::Relaxed);
    Ok(HuntReport {
        lemma,
        candidates,
        random_candidates: cfg.random.min(candidates),
        adversarial_candidates: candidates.saturating_sub(cfg.random),
        hypothesis_held: held.load(Ordering::Relaxed),
        violations,
        budget_exhausted: exhausted,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Convenience: the permutation matrices of `F(P^{J₂}, i)` always include a
/// `(2l+1)`-permutation matrix, namely the uncontracted expansion.
pub fn drop_expansion_is_member(p: &Permutation, i: usize) -> Result<bool> {
    let expansion = j2_expand(p, Some(i))?.into_matrix();
    Ok(crate::constructions::flattenings(p, Some(i))?
        .iter()
        .any(|f| f.as_matrix() == &expansion))
}

/// Witness check for the matrix-valued oracles: no `(k+1)`-tuple is full.
pub fn validates_p_witness(k: usize, witness: &Matrix01) -> bool {
    crate::vcdim::is_k_full(witness, k + 1).is_none()
}

/// Witness check for `Δ`: doubled-formation-free with at least `k` ones per column.
pub fn validates_delta_witness(r: usize, s: usize, k: usize, witness: &Matrix01) -> Result<bool> {
    if witness.column_counts().iter().any(|&c| c < k) {
        return Ok(false);
    }
    if witness.cols() < r {
        return Ok(true);
    }
    Ok(find_formation(witness, r, s, FormationMode::Doubled)?.is_none())
}
