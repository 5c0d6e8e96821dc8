//! Shared value types: permutations, (0,1)-matrices, blocked sequences, row
//! partitions, formation witnesses and permutation families.
//!
//! Every index exposed by these types is 1-based and row 1 is the top row.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `{1..n}` stored as its image vector, `image[j-1] = π(j)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        validate_bijection(&image)?;
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// `π(j)` for a 1-based position `j`.
    pub fn apply(&self, j: usize) -> usize {
        self.image[j - 1]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (j, &v) in self.image.iter().enumerate() {
            inv[v - 1] = j + 1;
        }
        Permutation { image: inv }
    }

    /// The permutation matrix `A_π` with a 1 at `(i, j)` iff `π(j) = i`.
    pub fn to_matrix(&self) -> PermutationMatrix {
        let n = self.len();
        let mut m = Matrix01::zeros(n, n);
        for (j, &i) in self.image.iter().enumerate() {
            m.set(i, j + 1, true);
        }
        PermutationMatrix(m)
    }

    /// All permutations of `{1..n}` in lexicographic order.
    pub fn all(n: usize) -> AllPermutations {
        AllPermutations {
            next: Some((1..=n).collect()),
        }
    }

    /// Rank of the pattern among all permutations of the same size in
    /// lexicographic order (Lehmer code).
    pub fn lex_rank(&self) -> usize {
        lex_rank(&self.image)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.image.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub(crate) fn validate_bijection(image: &[usize]) -> Result<()> {
    let n = image.len();
    let mut seen = vec![false; n];
    for (j, &v) in image.iter().enumerate() {
        if v == 0 || v > n {
            return Err(Error::invalid(
                "permutation",
                format!("value {v} at position {} is outside 1..={n}", j + 1),
            ));
        }
        if seen[v - 1] {
            return Err(Error::invalid(
                "permutation",
                format!("value {v} occurs more than once"),
            ));
        }
        seen[v - 1] = true;
    }
    Ok(())
}

/// Lehmer-code rank of a sequence of distinct comparable values.
pub(crate) fn lex_rank<T: Ord>(values: &[T]) -> usize {
    let k = values.len();
    let mut rank = 0;
    for i in 0..k {
        let smaller = values[i + 1..].iter().filter(|v| **v < values[i]).count();
        rank = rank * (k - i) + smaller;
    }
    rank
}

pub(crate) fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// All `k`-subsets of `{1..n}` as increasing vectors, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            if n - x + 1 < k - cur.len() {
                break;
            }
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(1, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Iterator over all permutations of `{1..n}` in lexicographic order.
pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { image: current })
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// A rectangular (0,1)-matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix01 {
    m: usize,
    n: usize,
    bits: Vec<bool>,
}

impl Matrix01 {
    pub fn zeros(m: usize, n: usize) -> Self {
        Matrix01 {
            m,
            n,
            bits: vec![false; m * n],
        }
    }

    pub fn ones_matrix(m: usize, n: usize) -> Self {
        Matrix01 {
            m,
            n,
            bits: vec![true; m * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Permutation::identity(n).to_matrix().into_matrix()
    }

    /// Builds a matrix from 1-based cells; rejects out-of-range and duplicate cells.
    pub fn from_cells(
        m: usize,
        n: usize,
        cells: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut out = Matrix01::zeros(m, n);
        for (r, c) in cells {
            if r == 0 || r > m || c == 0 || c > n {
                return Err(Error::invalid(
                    "matrix",
                    format!("cell ({r},{c}) outside {m}x{n}"),
                ));
            }
            if out.get(r, c) {
                return Err(Error::invalid("matrix", format!("duplicate cell ({r},{c})")));
            }
            out.set(r, c, true);
        }
        Ok(out)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[(r - 1) * self.n + (c - 1)]
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(
            (1..=self.m).contains(&r) && (1..=self.n).contains(&c),
            "cell ({r},{c}) outside {}x{}",
            self.m,
            self.n
        );
        self.bits[(r - 1) * self.n + (c - 1)] = value;
    }

    /// Number of 1-entries.
    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// 1-cells in row-major order.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 1..=self.m {
            for c in 1..=self.n {
                if self.get(r, c) {
                    out.push((r, c));
                }
            }
        }
        out
    }

    pub fn row_ones(&self, r: usize) -> Vec<usize> {
        (1..=self.n).filter(|&c| self.get(r, c)).collect()
    }

    pub fn col_ones(&self, c: usize) -> Vec<usize> {
        (1..=self.m).filter(|&r| self.get(r, c)).collect()
    }

    pub fn column_counts(&self) -> Vec<usize> {
        (1..=self.n).map(|c| self.col_ones(c).len()).collect()
    }

    /// Submatrix on the given 1-based rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix01 {
        let mut out = Matrix01::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(i + 1, j + 1, true);
                }
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix01 {
        let rows: Vec<usize> = (1..=self.m).collect();
        self.submatrix(&rows, cols)
    }

    /// Drops every row without a 1-entry.
    pub fn without_empty_rows(&self) -> Matrix01 {
        let rows: Vec<usize> = (1..=self.m)
            .filter(|&r| (1..=self.n).any(|c| self.get(r, c)))
            .collect();
        let cols: Vec<usize> = (1..=self.n).collect();
        self.submatrix(&rows, &cols)
    }

    /// True if every 1-cell of `self` is a 1-cell of `other` (same shape).
    pub fn is_subset_of(&self, other: &Matrix01) -> bool {
        self.m == other.m
            && self.n == other.n
            && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits.len() != self.m * self.n {
            return Err(Error::invalid("matrix", "storage does not match shape"));
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix01({}x{}, {:?})", self.m, self.n, self.cells())
    }
}

impl fmt::Display for Matrix01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::serialize_matrix(self))
    }
}

/// A square matrix with exactly one 1-entry in every row and every column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermutationMatrix(Matrix01);

impl PermutationMatrix {
    pub fn new(matrix: Matrix01) -> Result<Self> {
        validate_permutation_matrix(&matrix)?;
        Ok(PermutationMatrix(matrix))
    }

    pub fn as_matrix(&self) -> &Matrix01 {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix01 {
        self.0
    }

    /// Inverse of [`Permutation::to_matrix`].
    pub fn to_permutation(&self) -> Permutation {
        let n = self.0.cols();
        let image = (1..=n).map(|c| self.0.col_ones(c)[0]).collect();
        Permutation { image }
    }
}

pub fn validate_permutation_matrix(matrix: &Matrix01) -> Result<()> {
    if matrix.rows() != matrix.cols() {
        return Err(Error::invalid("permutation matrix", "matrix is not square"));
    }
    validate_function_matrix(matrix).map_err(|_| {
        Error::invalid("permutation matrix", "a column does not hold exactly one 1")
    })?;
    for r in 1..=matrix.rows() {
        if matrix.row_ones(r).len() != 1 {
            return Err(Error::invalid(
                "permutation matrix",
                format!("row {r} does not hold exactly one 1"),
            ));
        }
    }
    Ok(())
}

/// A (0,1)-matrix with exactly one 1-entry in every column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionMatrix(Matrix01);

impl FunctionMatrix {
    pub fn new(matrix: Matrix01) -> Result<Self> {
        validate_function_matrix(&matrix)?;
        Ok(FunctionMatrix(matrix))
    }

    /// The matrix `G_f` with a 1 at `(f(j), j)`.
    pub fn from_function(m: usize, f: &[usize]) -> Result<Self> {
        let cells = f.iter().enumerate().map(|(j, &r)| (r, j + 1));
        FunctionMatrix::new(Matrix01::from_cells(m, f.len(), cells)?)
    }

    pub fn as_matrix(&self) -> &Matrix01 {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix01 {
        self.0
    }

    /// Row of the single 1-entry of each column.
    pub fn function(&self) -> Vec<usize> {
        (1..=self.0.cols()).map(|c| self.0.col_ones(c)[0]).collect()
    }
}

pub fn validate_function_matrix(matrix: &Matrix01) -> Result<()> {
    for c in 1..=matrix.cols() {
        let k = matrix.col_ones(c).len();
        if k != 1 {
            return Err(Error::invalid(
                "function matrix",
                format!("column {c} holds {k} ones"),
            ));
        }
    }
    Ok(())
}

/// A sequence partitioned into contiguous blocks of pairwise-distinct symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockedSequence<T> {
    symbols: Vec<T>,
    /// Exclusive end offset of every block.
    bounds: Vec<usize>,
}

impl<T: Clone + Eq + Hash> BlockedSequence<T> {
    pub fn from_blocks(blocks: Vec<Vec<T>>) -> Result<Self> {
        let mut symbols = Vec::new();
        let mut bounds = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(Error::invalid(
                    "blocked sequence",
                    format!("block {} is empty", b + 1),
                ));
            }
            let mut seen = HashSet::new();
            for s in &block {
                if !seen.insert(s) {
                    return Err(Error::invalid(
                        "blocked sequence",
                        format!("block {} repeats a symbol", b + 1),
                    ));
                }
            }
            symbols.extend(block);
            bounds.push(symbols.len());
        }
        Ok(BlockedSequence { symbols, bounds })
    }

    /// Splits a flat sequence into maximal blocks, opening a new block only
    /// when the next symbol already occurs in the current one.
    pub fn greedy(symbols: Vec<T>) -> Self {
        let mut bounds = Vec::new();
        let mut current: HashSet<&T> = HashSet::new();
        for (i, s) in symbols.iter().enumerate() {
            if !current.insert(s) {
                bounds.push(i);
                current.clear();
                current.insert(s);
            }
        }
        if !symbols.is_empty() {
            bounds.push(symbols.len());
        }
        BlockedSequence { symbols, bounds }
    }

    pub fn symbols(&self) -> &[T] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.bounds.len()
    }

    pub fn block_bounds(&self) -> &[usize] {
        &self.bounds
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[T]> + '_ {
        let mut start = 0;
        self.bounds.iter().map(move |&end| {
            let block = &self.symbols[start..end];
            start = end;
            block
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.symbols.iter().collect::<HashSet<_>>().len()
    }

    /// Index of the block containing position `pos` (both 0-based).
    pub fn block_of(&self, pos: usize) -> usize {
        self.bounds.partition_point(|&end| end <= pos)
    }

    pub fn validate(&self) -> Result<()> {
        let blocks: Vec<Vec<T>> = self.blocks().map(|b| b.to_vec()).collect();
        if self.bounds.last().copied().unwrap_or(0) != self.symbols.len() {
            return Err(Error::invalid("blocked sequence", "bounds do not cover symbols"));
        }
        BlockedSequence::from_blocks(blocks).map(|_| ())
    }
}

/// A partition of rows `{1..m}` into consecutive nonempty intervals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RowPartition {
    intervals: Vec<(usize, usize)>,
}

impl RowPartition {
    pub fn new(m: usize, intervals: Vec<(usize, usize)>) -> Result<Self> {
        let mut expected = 1;
        for &(lo, hi) in &intervals {
            if lo != expected || hi < lo {
                return Err(Error::invalid(
                    "row partition",
                    format!("interval [{lo},{hi}] does not continue at row {expected}"),
                ));
            }
            expected = hi + 1;
        }
        if expected != m + 1 || intervals.is_empty() {
            return Err(Error::invalid(
                "row partition",
                format!("intervals do not cover rows 1..={m}"),
            ));
        }
        Ok(RowPartition { intervals })
    }

    /// Partition whose intervals start at the given rows; `starts[0]` must be 1.
    pub fn from_starts(m: usize, starts: &[usize]) -> Result<Self> {
        let mut intervals = Vec::with_capacity(starts.len());
        for (i, &lo) in starts.iter().enumerate() {
            let hi = starts.get(i + 1).map_or(m, |next| next.saturating_sub(1));
            intervals.push((lo, hi));
        }
        RowPartition::new(m, intervals)
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// 0-based index of the interval holding `row`.
    pub fn interval_of(&self, row: usize) -> Option<usize> {
        self.intervals
            .iter()
            .position(|&(lo, hi)| (lo..=hi).contains(&row))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormationMode {
    Plain,
    Doubled,
    Fat(usize),
}

impl FormationMode {
    /// Witness cells each column needs in interval `idx` (0-based) of an `s`-partition.
    pub fn required(&self, idx: usize, s: usize) -> usize {
        match *self {
            FormationMode::Plain => 1,
            FormationMode::Fat(b) => b,
            FormationMode::Doubled => {
                if idx == 0 || idx + 1 == s {
                    1
                } else {
                    2
                }
            }
        }
    }
}

/// Columns, row partition and selected host cells certifying a formation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormationWitness {
    pub columns: Vec<usize>,
    pub partition: RowPartition,
    pub cells: Vec<(usize, usize)>,
    pub mode: FormationMode,
}

impl FormationWitness {
    /// Checks the witness against `host` according to its mode.
    pub fn validate(&self, host: &Matrix01) -> Result<()> {
        let what = "formation witness";
        if self.columns.is_empty() || self.columns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(what, "columns not strictly increasing"));
        }
        if self.columns.last().is_some_and(|&c| c > host.cols()) {
            return Err(Error::invalid(what, "column outside host"));
        }
        RowPartition::new(host.rows(), self.partition.intervals.clone())?;
        let s = self.partition.len();
        if self.mode == FormationMode::Doubled && s < 2 {
            return Err(Error::invalid(what, "doubled formation needs s >= 2"));
        }
        let mut seen = BTreeSet::new();
        for &(r, c) in &self.cells {
            if r == 0 || r > host.rows() || c == 0 || c > host.cols() || !host.get(r, c) {
                return Err(Error::invalid(what, format!("cell ({r},{c}) is not a host 1-entry")));
            }
            if !seen.insert((r, c)) {
                return Err(Error::invalid(what, format!("cell ({r},{c}) repeated")));
            }
        }
        for &col in &self.columns {
            let mut counts = vec![0usize; s];
            for &(r, c) in &self.cells {
                if c == col {
                    let idx = self.partition.interval_of(r).expect("partition covers rows");
                    counts[idx] += 1;
                }
            }
            for (idx, &k) in counts.iter().enumerate() {
                let need = self.mode.required(idx, s);
                if k < need {
                    return Err(Error::invalid(
                        what,
                        format!("column {col} has {k} cells in interval {}, needs {need}", idx + 1),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A deduplicated set of permutations of one size.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PermFamily {
    n: usize,
    members: BTreeSet<Permutation>,
}

impl PermFamily {
    pub fn new(n: usize, members: impl IntoIterator<Item = Permutation>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for p in members {
            if p.len() != n {
                return Err(Error::invalid(
                    "permutation family",
                    format!("member {p} has size {} instead of {n}", p.len()),
                ));
            }
            set.insert(p);
        }
        Ok(PermFamily { n, members: set })
    }

    pub fn all(n: usize) -> Self {
        PermFamily {
            n,
            members: Permutation::all(n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &BTreeSet<Permutation> {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = &Permutation> {
        self.members.iter()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.members.contains(p)
    }

    pub fn insert(&mut self, p: Permutation) -> Result<bool> {
        if p.len() != self.n {
            return Err(Error::invalid("permutation family", "member size mismatch"));
        }
        Ok(self.members.insert(p))
    }

    pub fn filter(&self, keep: impl Fn(&Permutation) -> bool) -> PermFamily {
        PermFamily {
            n: self.n,
            members: self.members.iter().filter(|p| keep(p)).cloned().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_matrix_examples() {
        let cells = Permutation::identity(3).to_matrix().into_matrix().cells();
        assert_eq!(cells, vec![(1, 1), (2, 2), (3, 3)]);

        let j2 = Permutation::new(vec![2, 1]).unwrap().to_matrix();
        assert_eq!(j2.as_matrix().cells(), vec![(1, 2), (2, 1)]);

        // π(j) = i puts a 1 at (i, j): (3,1),(1,2),(4,3),(2,4).
        let p = Permutation::new(vec![3, 1, 4, 2]).unwrap();
        let mut cells = p.to_matrix().as_matrix().cells();
        cells.sort_by_key(|&(r, c)| (c, r));
        assert_eq!(cells, vec![(3, 1), (1, 2), (4, 3), (2, 4)]);
        assert_eq!(p.to_matrix().to_permutation(), p);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
    }

    #[test]
    fn all_permutations_are_lex_ordered() {
        let all: Vec<_> = Permutation::all(3).map(|p| p.image().to_vec()).collect();
        assert_eq!(
            all,
            vec![
                vec![1, 2, 3],
                vec![1, 3, 2],
                vec![2, 1, 3],
                vec![2, 3, 1],
                vec![3, 1, 2],
                vec![3, 2, 1]
            ]
        );
        for (i, p) in Permutation::all(4).enumerate() {
            assert_eq!(p.lex_rank(), i);
        }
    }

    #[test]
    fn combinations_in_lex_order() {
        assert_eq!(combinations(4, 2), vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn matrix_cell_validation() {
        assert!(Matrix01::from_cells(2, 2, [(3, 1)]).is_err());
        assert!(Matrix01::from_cells(2, 2, [(1, 1), (1, 1)]).is_err());
        assert!(PermutationMatrix::new(Matrix01::ones_matrix(2, 2)).is_err());
        assert!(FunctionMatrix::new(Matrix01::from_cells(3, 2, [(1, 1), (1, 2)]).unwrap()).is_ok());
        assert!(FunctionMatrix::new(Matrix01::zeros(3, 1)).is_err());
    }

    #[test]
    fn blocked_sequence_rules() {
        assert!(BlockedSequence::from_blocks(vec![vec![1, 2], vec![]]).is_err());
        assert!(BlockedSequence::from_blocks(vec![vec![1, 1]]).is_err());
        let seq = BlockedSequence::greedy(vec![1, 2, 1, 3, 3]);
        let blocks: Vec<Vec<i32>> = seq.blocks().map(|b| b.to_vec()).collect();
        assert_eq!(blocks, vec![vec![1, 2], vec![1, 3], vec![3]]);
        assert_eq!(seq.block_of(2), 1);
        assert_eq!(seq.alphabet_size(), 3);
    }

    #[test]
    fn row_partition_rules() {
        assert!(RowPartition::new(4, vec![(1, 2), (3, 4)]).is_ok());
        assert!(RowPartition::new(4, vec![(1, 2), (4, 4)]).is_err());
        assert!(RowPartition::new(4, vec![(1, 2)]).is_err());
        let p = RowPartition::from_starts(5, &[1, 3, 4]).unwrap();
        assert_eq!(p.intervals(), &[(1, 2), (3, 3), (4, 5)]);
        assert_eq!(p.interval_of(5), Some(2));
    }

    #[test]
    fn family_rejects_mixed_sizes() {
        let fam = PermFamily::new(2, [Permutation::identity(2), Permutation::identity(3)]);
        assert!(fam.is_err());
        let fam = PermFamily::new(2, [Permutation::identity(2), Permutation::identity(2)]).unwrap();
        assert_eq!(fam.len(), 1);
    }
}
