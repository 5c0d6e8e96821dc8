//! Restrictions, shattering and VC-dimension of permutation and function
//! families, matrix fullness, the union matrix of a family and its density,
//! and the iterative compression procedure that trims a family of bounded
//! VC-dimension while its union matrix is dense.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::ackfun::{self, serialize_ratio, HierarchyParams};
use crate::domain::{combinations, factorial, lex_rank, FormationMode, FormationWitness, FunctionMatrix, Matrix01, PermFamily, Permutation};
use crate::error::{Error, Result};
use crate::patterns::{contains_on_columns, find_formation};

fn check_positions(n: usize, positions: &[usize]) -> Result<()> {
    if positions.is_empty() {
        return Err(Error::domain("position tuple is empty"));
    }
    if positions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!("positions {positions:?} are not strictly increasing")));
    }
    if positions[0] == 0 || positions[positions.len() - 1] > n {
        return Err(Error::domain(format!("positions {positions:?} outside 1..={n}")));
    }
    Ok(())
}

/// Lex rank of the pattern formed by `values` at `positions`, or `None` on ties.
fn pattern_code(values: &[usize], positions: &[usize]) -> Option<usize> {
    let picked: Vec<usize> = positions.iter().map(|&p| values[p - 1]).collect();
    for i in 0..picked.len() {
        if picked[i + 1..].contains(&picked[i]) {
            return None;
        }
    }
    Some(lex_rank(&picked))
}

/// The `k`-permutation order-isomorphic to `p` on `positions`.
pub fn restriction(p: &Permutation, positions: &[usize]) -> Result<Permutation> {
    check_positions(p.len(), positions)?;
    let picked: Vec<usize> = positions.iter().map(|&j| p.apply(j)).collect();
    let image = picked
        .iter()
        .map(|v| 1 + picked.iter().filter(|w| *w < v).count())
        .collect();
    Permutation::new(image)
}

fn shattered_by(rows: &[Vec<usize>], positions: &[usize]) -> bool {
    let total = factorial(positions.len());
    if rows.len() < total {
        return false;
    }
    let mut seen = vec![false; total];
    let mut count = 0;
    for values in rows {
        if let Some(code) = pattern_code(values, positions) {
            if !seen[code] {
                seen[code] = true;
                count += 1;
                if count == total {
                    return true;
                }
            }
        }
    }
    false
}

fn family_rows(family: &PermFamily) -> Vec<Vec<usize>> {
    family.iter().map(|p| p.image().to_vec()).collect()
}

/// True iff every `k`-permutation appears as a restriction of some member on `positions`.
pub fn is_shattered(family: &PermFamily, positions: &[usize]) -> Result<bool> {
    check_positions(family.n(), positions)?;
    Ok(shattered_by(&family_rows(family), positions))
}

/// Least shattered `k`-tuple of positions, if any.
fn shattered_tuple(rows: &[Vec<usize>], n: usize, k: usize) -> Option<Vec<usize>> {
    if rows.len() < factorial(k) {
        return None;
    }
    combinations(n, k)
        .into_par_iter()
        .find_first(|t| shattered_by(rows, t))
}

fn vc_of(rows: &[Vec<usize>], n: usize) -> usize {
    let mut best = 0;
    for k in 1..=n {
        // Shattering is inherited by sub-tuples, so the first failing k ends the search.
        if shattered_tuple(rows, n, k).is_none() {
            break;
        }
        best = k;
    }
    best
}

/// VC-dimension of a family of permutations.
pub fn vc_dimension(family: &PermFamily) -> Result<usize> {
    if family.is_empty() {
        return Err(Error::domain("VC-dimension of an empty family"));
    }
    Ok(vc_of(&family_rows(family), family.n()))
}

/// VC-dimension with respect to permutations of a family of function
/// matrices: columns play the role of positions, the row of each column's
/// single 1 is its value, and tied values never realize a pattern.
pub fn vc_dimension_functions(family: &[FunctionMatrix]) -> Result<usize> {
    let Some(first) = family.first() else {
        return Err(Error::domain("VC-dimension of an empty family"));
    };
    let n = first.as_matrix().cols();
    if family.iter().any(|f| f.as_matrix().cols() != n) {
        return Err(Error::invalid("function family", "members differ in column count"));
    }
    let rows: Vec<Vec<usize>> = family.iter().map(|f| f.function()).collect();
    Ok(vc_of(&rows, n))
}

/// Least `k`-tuple of columns containing every `k`-permutation matrix.
pub fn is_k_full(matrix: &Matrix01, k: usize) -> Option<Vec<usize>> {
    if k == 0 {
        return Some(Vec::new());
    }
    if k > matrix.cols() || k > matrix.rows() {
        return None;
    }
    let perms: Vec<Matrix01> = Permutation::all(k).map(|p| p.to_matrix().into_matrix()).collect();
    combinations(matrix.cols(), k)
        .into_par_iter()
        .find_first(|cols| perms.iter().all(|p| contains_on_columns(matrix, p, cols).is_some()))
}

/// Largest `k` such that the matrix is `k`-full; 0 when it has no 1-entry.
pub fn fullness(matrix: &Matrix01) -> usize {
    let mut k = 0;
    // A k-full tuple has (k-1)-full sub-tuples, so stop at the first failure.
    while is_k_full(matrix, k + 1).is_some() {
        k += 1;
    }
    k
}

/// Union matrix `M_P` of the permutation matrices of a family and its density `|M_P| / n`.
pub fn union_and_density(family: &PermFamily) -> Result<(Matrix01, BigRational)> {
    if family.is_empty() {
        return Err(Error::domain("union of an empty family"));
    }
    let n = family.n();
    let mut union = Matrix01::zeros(n, n);
    for p in family.iter() {
        for j in 1..=n {
            union.set(p.apply(j), j, true);
        }
    }
    let v = BigRational::new(BigInt::from(union.ones()), BigInt::from(n));
    Ok((union, v))
}

/// Product of the column 1-counts: an upper bound on the number of
/// permutation matrices contained in `matrix`.
pub fn perm_count_upper(matrix: &Matrix01) -> BigUint {
    matrix
        .column_counts()
        .into_iter()
        .map(BigUint::from)
        .product()
}

/// One application of the compression step.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompressionRecord {
    #[serde(serialize_with = "serialize_ratio")]
    pub density_before: BigRational,
    #[serde(serialize_with = "serialize_ratio")]
    pub density_after: BigRational,
    pub size_before: usize,
    pub size_after: usize,
    pub ones_before: usize,
    pub ones_after: usize,
    /// Fatness used for the formation search.
    pub fat_b: usize,
    pub formation: FormationWitness,
    /// Largest criss-crossed column tuple.
    pub criss_crossed: Vec<usize>,
    /// Majority assignment: (column of `criss_crossed`, 1-based interval).
    pub assignment: Vec<(usize, usize)>,
    /// Columns trimmed by the majority assignment with their excluded interval.
    pub trimmed_columns: Vec<(usize, usize)>,
    pub removed_cells: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PhaseRecord {
    #[serde(serialize_with = "serialize_ratio")]
    pub start_density: BigRational,
    #[serde(serialize_with = "serialize_ratio")]
    pub end_density: BigRational,
    pub iterations: usize,
    /// `⌈2γ²n / v⌉` for the density `v` at the start of the phase.
    #[serde(serialize_with = "serialize_biguint")]
    pub iteration_bound: BigUint,
    pub within_bound: bool,
    /// The phase reached its halving point (false when the run stopped mid-phase).
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind", content = "detail")]
pub enum StopReason {
    ThresholdReached,
    DensityBelowGamma,
    HypothesisUnmet(String),
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompressionTrace {
    pub n: usize,
    pub k: usize,
    pub params: HierarchyParams,
    #[serde(serialize_with = "serialize_ratio")]
    pub gamma: BigRational,
    /// `T = γ² log₂ γ`.
    pub threshold: f64,
    pub records: Vec<CompressionRecord>,
    pub phases: Vec<PhaseRecord>,
    #[serde(serialize_with = "serialize_ratio")]
    pub final_density: BigRational,
    pub final_size: usize,
    /// `(2T)^n`, the bound on the family size once the density is at most `2T`.
    pub final_bound: f64,
    pub stop: StopReason,
}

fn serialize_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ceil_ratio(v: &BigRational) -> BigInt {
    v.numer().div_ceil(v.denom())
}

fn ratio_pow(v: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * v)
}

fn ratio_int(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Injective maps from `t` columns into `intervals` intervals, as interval
/// tuples in lexicographic order.
fn injective_maps(t: usize, intervals: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    fn go(t: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !cur.contains(&i) {
                cur.push(i);
                go(t, k, cur, out);
                cur.pop();
            }
        }
    }
    go(t, intervals, &mut cur, &mut out);
    out
}

struct Obeying<'a> {
    perms: Vec<&'a Permutation>,
    intervals: Vec<(usize, usize)>,
}

impl Obeying<'_> {
    /// Members whose 1 in each column `cols[i]` lies in interval `assign[i]`.
    fn count(&self, cols: &[usize], assign: &[usize]) -> usize {
        self.perms
            .iter()
            .filter(|p| {
                cols.iter().zip(assign).all(|(&c, &i)| {
                    let (lo, hi) = self.intervals[i];
                    (lo..=hi).contains(&p.apply(c))
                })
            })
            .count()
    }

    fn criss_crossed(&self, cols: &[usize], size: usize, v: &BigRational) -> bool {
        let need = ratio_int(size) / ratio_pow(v, 2 * cols.len());
        injective_maps(cols.len(), self.intervals.len())
            .iter()
            .all(|a| ratio_int(self.count(cols, a)) >= need)
    }
}

/// Largest `k` accepted by the reduction step; the criss-cross test enumerates
/// every injective interval assignment.
pub const MAX_REDUCTION_K: usize = 4;

/// One compression step on a family whose VC-dimension should be at most `k`.
///
/// Requires `v(P) ≥ 2γ_k(n)`. Finds a `B`-fat `(r, k+1)`-formation in the
/// union matrix with the largest available `r`, takes a largest criss-crossed
/// column tuple `Q` of it, assigns every other formation column a witnessing
/// assignment, keeps the majority assignment `I`, and deletes the union-matrix
/// cells outside `I` on `Q` and inside the witnessing intervals on
/// `⌈v/γ⌉` columns assigned `I`. The members avoiding every deleted cell
/// survive. Both guarantees
/// `|M_P'| ≤ |M_P| − v²/γ²` and `|P'| ≥ |P| / (2 v^{2k})` are checked.
pub fn reduction_step(
    family: &PermFamily,
    k: usize,
    params: &HierarchyParams,
) -> Result<(PermFamily, CompressionRecord)> {
    if !(2..=MAX_REDUCTION_K).contains(&k) {
        return Err(Error::domain(format!("reduction step supports 2 <= k <= {MAX_REDUCTION_K} (got {k})")));
    }
    let n = family.n();
    let (union, v) = union_and_density(family)?;
    let gamma = ackfun::gamma(k as u32, n as u64, params)?;
    let two_gamma = &gamma * ratio_int(2);
    if v < two_gamma {
        return Err(Error::DensityBelowThreshold {
            density: v.to_string(),
            threshold: two_gamma.to_string(),
        });
    }

    let beta = BigInt::from(ackfun::beta(k as u32 + 1, n as u64)?);
    let b_raw = (&v / BigRational::from_integer(2 * (beta + 2))).floor().to_integer();
    let fat_b = b_raw.to_usize().unwrap_or(usize::MAX).max(1);

    let mut formation: Option<FormationWitness> = None;
    for r in 1..=n {
        match find_formation(&union, r, k + 1, FormationMode::Fat(fat_b))? {
            Some(w) => formation = Some(w),
            None => break,
        }
    }
    let formation = formation.ok_or_else(|| {
        Error::HypothesisUnmet(format!("no {fat_b}-fat ({}-interval) formation in the union matrix", k + 1))
    })?;
    let columns = formation.columns.clone();
    let obey = Obeying {
        perms: family.iter().collect(),
        intervals: formation.partition.intervals().to_vec(),
    };
    let size = family.len();

    let mut crossed: Option<Vec<usize>> = None;
    for t in (0..=(k + 1).min(columns.len())).rev() {
        let found = combinations(columns.len(), t).into_iter().find_map(|idx| {
            let q: Vec<usize> = idx.iter().map(|&i| columns[i - 1]).collect();
            obey.criss_crossed(&q, size, &v).then_some(q)
        });
        if let Some(q) = found {
            crossed = Some(q);
            break;
        }
    }
    let q = crossed.expect("the empty tuple is always criss-crossed");
    if q.len() == k + 1 {
        return Err(Error::VcExceedsK { columns: q });
    }
    let t = q.len();

    // Every column u outside Q gets the least assignment J on Q ∪ {u} with few obeying members.
    let sparse = ratio_int(size) / ratio_pow(&v, 2 * t + 2);
    let mut by_assignment: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
    for &u in columns.iter().filter(|c| !q.contains(c)) {
        let mut cols = q.clone();
        cols.push(u);
        let j = injective_maps(t + 1, obey.intervals.len())
            .into_iter()
            .find(|a| ratio_int(obey.count(&cols, a)) < sparse)
            .ok_or_else(|| Error::PostconditionViolated(format!("criss-crossed tuple {q:?} extends by column {u}")))?;
        by_assignment
            .entry(j[..t].to_vec())
            .or_default()
            .push((u, j[t]));
    }
    let (assignment, assigned) = by_assignment
        .into_iter()
        .fold(None::<(Vec<usize>, Vec<(usize, usize)>)>, |best, (a, cols)| match best {
            Some((ba, bc)) if bc.len() >= cols.len() => Some((ba, bc)),
            _ => Some((a, cols)),
        })
        .ok_or_else(|| Error::HypothesisUnmet("formation has no columns outside the criss-crossed tuple".into()))?;

    let need = ceil_ratio(&(&v / &gamma)).to_usize().unwrap_or(usize::MAX);
    if assigned.len() < need {
        return Err(Error::HypothesisUnmet(format!(
            "majority assignment covers {} columns, {need} required",
            assigned.len()
        )));
    }
    let trimmed: Vec<(usize, usize)> = assigned[..need].to_vec();

    let mut removed = Vec::new();
    for (&col, &iv) in q.iter().zip(&assignment) {
        let (lo, hi) = obey.intervals[iv];
        removed.extend(union.col_ones(col).into_iter().filter(|r| !(lo..=hi).contains(r)).map(|r| (r, col)));
    }
    for &(col, iv) in &trimmed {
        let (lo, hi) = obey.intervals[iv];
        removed.extend(union.col_ones(col).into_iter().filter(|r| (lo..=hi).contains(r)).map(|r| (r, col)));
    }
    removed.sort_unstable();
    let mut banned = Matrix01::zeros(n, n);
    for &(r, c) in &removed {
        banned.set(r, c, true);
    }
    let survivors = family.filter(|p| (1..=n).all(|j| !banned.get(p.apply(j), j)));

    let (ones_after, v_after) = if survivors.is_empty() {
        (0, BigRational::zero())
    } else {
        let (u, va) = union_and_density(&survivors)?;
        (u.ones(), va)
    };
    let drop_needed = &v * &v / (&gamma * &gamma);
    if ratio_int(ones_after) > ratio_int(union.ones()) - &drop_needed {
        return Err(Error::PostconditionViolated(format!(
            "|M_P'| = {ones_after} exceeds |M_P| - v²/γ² = {}",
            ratio_int(union.ones()) - drop_needed
        )));
    }
    let size_floor = ratio_int(size) / (ratio_int(2) * ratio_pow(&v, 2 * k));
    if ratio_int(survivors.len()) < size_floor {
        return Err(Error::PostconditionViolated(format!(
            "|P'| = {} is below |P|/(2v^(2k)) = {size_floor}",
            survivors.len()
        )));
    }

    let record = CompressionRecord {
        density_before: v,
        density_after: v_after,
        size_before: size,
        size_after: survivors.len(),
        ones_before: union.ones(),
        ones_after,
        fat_b,
        formation,
        assignment: q.iter().zip(&assignment).map(|(&c, &i)| (c, i + 1)).collect(),
        criss_crossed: q,
        trimmed_columns: trimmed.into_iter().map(|(c, i)| (c, i + 1)).collect(),
        removed_cells: removed,
    };
    Ok((survivors, record))
}

/// Repeats [`reduction_step`] in phases, a phase ending once the density has
/// halved, until a phase ends at density at most `2T` with `T = γ² log₂ γ`.
/// Runs that cannot continue under the configured constants stop with the
/// reason recorded in the trace.
pub fn compress_family(
    family: &PermFamily,
    k: usize,
    params: &HierarchyParams,
) -> Result<CompressionTrace> {
    let n = family.n();
    let gamma = ackfun::gamma(k as u32, n as u64, params)?;
    let g = gamma.to_f64().unwrap_or(f64::INFINITY);
    let threshold = g * g * g.log2();
    let gamma_sq_n = &gamma * &gamma * ratio_int(n);

    let (_, mut v) = union_and_density(family)?;
    let mut current = family.clone();
    let mut records = Vec::new();
    let mut phases = Vec::new();
    let below = |v: &BigRational| v.to_f64().unwrap_or(f64::INFINITY) <= 2.0 * threshold;

    let mut stop = StopReason::ThresholdReached;
    'phases: while !below(&v) {
        let start = v.clone();
        let half = &start / ratio_int(2);
        let bound = ceil_ratio(&(&gamma_sq_n * ratio_int(2) / &start));
        let bound = bound.to_biguint().unwrap_or_default();
        let mut iterations = 0usize;
        let mut completed = false;
        let mut halted = None;
        while !completed {
            match reduction_step(&current, k, params) {
                Ok((next, record)) => {
                    iterations += 1;
                    v = record.density_after.clone();
                    records.push(record);
                    current = next;
                    completed = v <= half;
                }
                Err(Error::DensityBelowThreshold { .. }) => {
                    halted = Some(StopReason::DensityBelowGamma);
                    break;
                }
                Err(Error::HypothesisUnmet(msg)) => {
                    halted = Some(StopReason::HypothesisUnmet(msg));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        phases.push(PhaseRecord {
            start_density: start,
            end_density: v.clone(),
            iterations,
            within_bound: BigUint::from(iterations) <= bound,
            iteration_bound: bound,
            completed,
        });
        if let Some(reason) = halted {
            stop = reason;
            break 'phases;
        }
    }

    Ok(CompressionTrace {
        n,
        k,
        params: params.clone(),
        gamma,
        threshold,
        records,
        phases,
        final_density: v,
        final_size: current.len(),
        final_bound: (2.0 * threshold).powi(n as i32),
        stop,
    })
}
