//! Matrices and families built from sequences and permutations: the
//! sequence→matrix transformation, J₂-expansions and their flattenings, the
//! Φ families, block-diagonal tiling, DS(3) sequence generation and the
//! permutation-family builder that inflates function matrices.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{BlockedSequence, FunctionMatrix, Matrix01, PermFamily, Permutation, PermutationMatrix};
use crate::error::{Error, Result};

/// Block-by-symbol incidence matrix, symbols numbered by first appearance.
pub fn smt<T: Clone + Eq + Hash>(seq: &BlockedSequence<T>) -> Matrix01 {
    let mut number: HashMap<&T, usize> = HashMap::new();
    for s in seq.symbols() {
        let next = number.len() + 1;
        number.entry(s).or_insert(next);
    }
    let mut out = Matrix01::zeros(seq.block_count(), number.len());
    for (i, block) in seq.blocks().enumerate() {
        for s in block {
            out.set(i + 1, number[s], true);
        }
    }
    out
}

/// `P^{J₂}`, or with `drop = Some(i)` the `(2l+1)`-permutation matrix whose
/// bottom row has its 1 in column `i` and which becomes `P^{J₂}` once that row
/// and column are removed.
pub fn j2_expand(p: &Permutation, drop: Option<usize>) -> Result<PermutationMatrix> {
    let l = p.len();
    let size = 2 * l + usize::from(drop.is_some());
    if let Some(i) = drop {
        if !(1..=size).contains(&i) {
            return Err(Error::domain(format!("drop column {i} outside 1..={size}")));
        }
    }
    let shift = |c: usize| match drop {
        Some(i) if c >= i => c + 1,
        _ => c,
    };
    let mut m = Matrix01::zeros(size, size);
    for b in 1..=l {
        let a = p.apply(b);
        m.set(2 * a - 1, shift(2 * b), true);
        m.set(2 * a, shift(2 * b - 1), true);
    }
    if let Some(i) = drop {
        m.set(size, i, true);
    }
    PermutationMatrix::new(m)
}

/// Row pairs `(2i, 2i+1)` of the expansion whose upper 1 lies left of the lower 1.
fn contractible_pairs(expansion: &Matrix01) -> Vec<usize> {
    let col_of = |r: usize| expansion.row_ones(r)[0];
    (1..)
        .map(|i| 2 * i)
        .take_while(|&r| r < expansion.rows())
        .filter(|&r| col_of(r) < col_of(r + 1))
        .collect()
}

/// Replaces each listed row pair `(r, r+1)` by one row holding the union of both.
fn contract(matrix: &Matrix01, pairs: &[usize]) -> Matrix01 {
    let mut target = Vec::with_capacity(matrix.rows());
    let mut row = 0;
    for r in 1..=matrix.rows() {
        if !pairs.contains(&(r - 1)) {
            row += 1;
        }
        target.push(row);
    }
    let mut out = Matrix01::zeros(row, matrix.cols());
    for (r, c) in matrix.cells() {
        out.set(target[r - 1], c, true);
    }
    out
}

/// All function matrices obtained from the (drop-variant) J₂-expansion by
/// contracting any subset of its contractible row pairs.
pub fn flattenings(p: &Permutation, drop: Option<usize>) -> Result<BTreeSet<FunctionMatrix>> {
    let expansion = j2_expand(p, drop)?.into_matrix();
    let pairs = contractible_pairs(&expansion);
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << pairs.len()) {
        let chosen: Vec<usize> = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &r)| r)
            .collect();
        out.insert(FunctionMatrix::new(contract(&expansion, &chosen))?);
    }
    Ok(out)
}

pub const PHI_DEFAULT_CAP: usize = 4;

/// `Φ(l)` or `Φ(l, i)` with the default cap on `l`.
pub fn phi(l: usize, drop: Option<usize>) -> Result<BTreeSet<BTreeSet<FunctionMatrix>>> {
    phi_capped(l, drop, PHI_DEFAULT_CAP)
}

pub fn phi_capped(l: usize, drop: Option<usize>, cap: usize) -> Result<BTreeSet<BTreeSet<FunctionMatrix>>> {
    if l == 0 {
        return Err(Error::domain("phi needs l >= 1"));
    }
    if l > cap {
        return Err(Error::CapExceeded(format!("phi with l = {l} exceeds cap {cap}")));
    }
    Permutation::all(l).map(|p| flattenings(&p, drop)).collect()
}

/// Places `⌈n/N⌉` copies of an `M×N` block along the diagonal, removes
/// surplus columns on the right and pads empty rows at the bottom. When the
/// copies need more than `n` rows, rows left empty by the column removal are
/// deleted first, so every kept column keeps its 1-count.
pub fn tile_and_pad(block: &Matrix01, n: usize) -> Result<Matrix01> {
    let (bm, bn) = (block.rows(), block.cols());
    if bn == 0 || bn > n {
        return Err(Error::domain(format!("block with {bn} columns cannot tile width {n}")));
    }
    let copies = n.div_ceil(bn);
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for t in 0..copies {
        for (r, c) in block.cells() {
            let col = t * bn + c;
            if col <= n {
                cells.push((t * bm + r, col));
            }
        }
    }
    let mut rows = copies * bm;
    if rows > n {
        let used: BTreeSet<usize> = cells.iter().map(|&(r, _)| r).collect();
        let rank: BTreeMap<usize, usize> = used.iter().enumerate().map(|(i, &r)| (r, i + 1)).collect();
        for cell in &mut cells {
            cell.0 = rank[&cell.0];
        }
        rows = used.len();
        if rows > n {
            return Err(Error::domain(format!("tiled block needs {rows} nonempty rows, more than {n}")));
        }
    }
    Matrix01::from_cells(n, n, cells)
}

/// Incremental pairwise alternation lengths of a sequence over `1..=n`.
pub(crate) struct AltTracker {
    n: usize,
    len: Vec<u8>,
    last: Vec<usize>,
    seq: Vec<usize>,
    undo: Vec<Vec<(usize, u8, usize)>>,
}

impl AltTracker {
    pub(crate) fn new(n: usize) -> Self {
        AltTracker {
            n,
            len: vec![0; (n + 1) * (n + 1)],
            last: vec![0; (n + 1) * (n + 1)],
            seq: Vec::new(),
            undo: Vec::new(),
        }
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        a * (self.n + 1) + b
    }

    pub(crate) fn seq(&self) -> &[usize] {
        &self.seq
    }

    /// True iff appending `x` keeps the sequence a DS(s)-sequence.
    pub(crate) fn can_push(&self, x: usize, s: usize) -> bool {
        if self.seq.last() == Some(&x) {
            return false;
        }
        (1..=self.n).filter(|&y| y != x).all(|y| {
            let i = self.idx(x, y);
            self.last[i] == x || (self.len[i] as usize) < s + 1
        })
    }

    pub(crate) fn push(&mut self, x: usize) {
        let mut changes = Vec::new();
        for y in (1..=self.n).filter(|&y| y != x) {
            let i = self.idx(x, y);
            if self.last[i] != x {
                changes.push((i, self.len[i], self.last[i]));
                self.len[i] += 1;
                self.last[i] = x;
            }
        }
        self.seq.push(x);
        self.undo.push(changes);
    }

    pub(crate) fn pop(&mut self) {
        self.seq.pop();
        for (i, len, last) in self.undo.pop().unwrap_or_default() {
            self.len[i] = len;
            self.last[i] = last;
        }
    }
}

pub const GEN_DS3_NODE_BUDGET: u64 = 5_000_000;

/// An ababa-free sequence over `1..=symbols` in which every symbol occurs
/// exactly `multiplicity` times, split greedily into blocks.
pub fn gen_ds3(symbols: usize, multiplicity: usize) -> Result<BlockedSequence<usize>> {
    if multiplicity == 0 {
        return Err(Error::domain("multiplicity must be at least 1"));
    }
    if symbols == 0 {
        return Ok(BlockedSequence::greedy(Vec::new()));
    }
    let mut tracker = AltTracker::new(symbols);
    let mut left = vec![multiplicity; symbols + 1];
    let mut nodes = 0u64;
    match ds3_dfs(&mut tracker, &mut left, 0, symbols * multiplicity, &mut nodes) {
        Some(true) => Ok(BlockedSequence::greedy(tracker.seq().to_vec())),
        Some(false) => Err(Error::domain(format!(
            "no ababa-free sequence has {symbols} symbols each occurring {multiplicity} times"
        ))),
        None => Err(Error::CapExceeded(format!(
            "gen_ds3({symbols}, {multiplicity}) exhausted {GEN_DS3_NODE_BUDGET} search nodes"
        ))),
    }
}

/// `Some(found)` or `None` when the node budget ran out.
fn ds3_dfs(t: &mut AltTracker, left: &mut [usize], introduced: usize, total: usize, nodes: &mut u64) -> Option<bool> {
    if t.seq().len() == total {
        return Some(true);
    }
    *nodes += 1;
    if *nodes > GEN_DS3_NODE_BUDGET {
        return None;
    }
    // Most recently used symbols first, then the next fresh symbol.
    let mut order: Vec<usize> = (1..=introduced).filter(|&x| left[x] > 0).collect();
    let recency = |x: usize| t.seq().iter().rposition(|&y| y == x);
    order.sort_by_key(|&x| std::cmp::Reverse(recency(x)));
    if introduced < left.len() - 1 {
        order.push(introduced + 1);
    }
    for x in order {
        if !t.can_push(x, 3) {
            continue;
        }
        t.push(x);
        left[x] -= 1;
        let next = introduced.max(x);
        let r = ds3_dfs(t, left, next, total, nodes);
        if r == Some(true) {
            return r;
        }
        left[x] += 1;
        t.pop();
        r?;
    }
    Some(false)
}

/// A random DS(s)-sequence over at most `alphabet` symbols (labelled in a
/// random order) of length at most `max_len`, cut into random blocks.
pub fn random_ds_sequence<R: Rng>(rng: &mut R, s: usize, alphabet: usize, max_len: usize) -> BlockedSequence<usize> {
    let target = if max_len == 0 { 0 } else { rng.gen_range(1..=max_len) };
    let mut tracker = AltTracker::new(alphabet);
    while tracker.seq().len() < target {
        let options: Vec<usize> = (1..=alphabet).filter(|&x| tracker.can_push(x, s)).collect();
        if options.is_empty() {
            break;
        }
        tracker.push(options[rng.gen_range(0..options.len())]);
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &x in tracker.seq() {
        let fresh = blocks.last().map_or(true, |b| b.contains(&x) || rng.gen_bool(0.5));
        if fresh {
            blocks.push(vec![x]);
        } else {
            blocks.last_mut().expect("nonempty").push(x);
        }
    }
    BlockedSequence::from_blocks(blocks).expect("blocks hold distinct symbols")
}

/// Function matrix of a per-column choice of 1-entries, with empty rows removed.
pub fn compress_choice(source: &Matrix01, rows: &[usize]) -> Result<FunctionMatrix> {
    if rows.len() != source.cols() {
        return Err(Error::domain(format!("{} choices for {} columns", rows.len(), source.cols())));
    }
    for (j, &r) in rows.iter().enumerate() {
        if r == 0 || r > source.rows() || !source.get(r, j + 1) {
            return Err(Error::domain(format!("choice ({r}, {}) is not a 1-entry", j + 1)));
        }
    }
    let used: BTreeSet<usize> = rows.iter().copied().collect();
    let rank: BTreeMap<usize, usize> = used.iter().enumerate().map(|(i, &r)| (r, i + 1)).collect();
    let f: Vec<usize> = rows.iter().map(|r| rank[r]).collect();
    FunctionMatrix::from_function(used.len(), &f)
}

/// Inflates every row of a function matrix into a diagonal: the `i`-th
/// 1-entry in row-then-column order becomes the 1 in row `i`.
pub fn inflate(h: &FunctionMatrix) -> Permutation {
    let m = h.as_matrix();
    let mut image = vec![0; m.cols()];
    for (i, (_, c)) in m.cells().into_iter().enumerate() {
        image[c - 1] = i + 1;
    }
    Permutation::new(image).expect("a function matrix has one 1 per column")
}

/// Contracts consecutive row intervals of the given sizes of a permutation matrix.
pub fn contract_rows(q: &Permutation, sizes: &[usize]) -> Result<FunctionMatrix> {
    if sizes.iter().sum::<usize>() != q.len() || sizes.contains(&0) {
        return Err(Error::domain(format!("interval sizes {sizes:?} do not partition {} rows", q.len())));
    }
    let mut interval = Vec::with_capacity(q.len());
    for (i, &s) in sizes.iter().enumerate() {
        interval.extend(std::iter::repeat(i + 1).take(s));
    }
    let f: Vec<usize> = (1..=q.len()).map(|j| interval[q.apply(j) - 1]).collect();
    FunctionMatrix::from_function(sizes.len(), &f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    Exhaustive,
    Random { seed: u64, samples: usize },
}

#[derive(Debug, Clone)]
pub struct FamilyBuild {
    pub family: PermFamily,
    /// Compressed function matrices each permutation was inflated from.
    pub preimages: BTreeMap<Permutation, BTreeSet<FunctionMatrix>>,
    pub choices_examined: u64,
    /// The budget stopped the enumeration early.
    pub truncated: bool,
}

/// Chooses one 1-entry per column, compresses, inflates and collects the
/// resulting permutations, examining at most `budget` choices.
pub fn build_family(source: &Matrix01, sampler: Sampler, budget: u64) -> Result<FamilyBuild> {
    let n = source.cols();
    let options: Vec<Vec<usize>> = (1..=n).map(|c| source.col_ones(c)).collect();
    if let Some(c) = options.iter().position(|o| o.is_empty()) {
        return Err(Error::domain(format!("source column {} is empty", c + 1)));
    }
    let mut build = FamilyBuild {
        family: PermFamily::new(n, [])?,
        preimages: BTreeMap::new(),
        choices_examined: 0,
        truncated: false,
    };
    let record = |rows: &[usize], build: &mut FamilyBuild| -> Result<()> {
        let h = compress_choice(source, rows)?;
        let q = inflate(&h);
        build.family.insert(q.clone())?;
        build.preimages.entry(q).or_default().insert(h);
        build.choices_examined += 1;
        Ok(())
    };
    match sampler {
        Sampler::Exhaustive => {
            let mut digits = vec![0usize; n];
            loop {
                if build.choices_examined >= budget {
                    build.truncated = true;
                    break;
                }
                let rows: Vec<usize> = digits.iter().zip(&options).map(|(&d, o)| o[d]).collect();
                record(&rows, &mut build)?;
                let mut j = n;
                loop {
                    if j == 0 {
                        return Ok(build);
                    }
                    j -= 1;
                    digits[j] += 1;
                    if digits[j] < options[j].len() {
                        break;
                    }
                    digits[j] = 0;
                }
            }
        }
        Sampler::Random { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                if build.choices_examined >= budget {
                    build.truncated = true;
                    break;
                }
                let rows: Vec<usize> = options.iter().map(|o| o[rng.gen_range(0..o.len())]).collect();
                record(&rows, &mut build)?;
            }
        }
    }
    Ok(build)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{contains_pattern, ds_matrix, is_ds_sequence};
    use crate::vcdim::vc_dimension;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, prop_assume, proptest};

    fn cells(m: &Matrix01) -> Vec<(usize, usize)> {
        m.cells()
    }

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn fm(rows: usize, cols: usize, c: &[(usize, usize)]) -> FunctionMatrix {
        FunctionMatrix::new(Matrix01::from_cells(rows, cols, c.iter().copied()).unwrap()).unwrap()
    }

    fn seq(blocks: &[&[&str]]) -> BlockedSequence<String> {
        BlockedSequence::from_blocks(blocks.iter().map(|b| b.iter().map(|s| s.to_string()).collect()).collect()).unwrap()
    }

    #[test]
    fn smt_examples() {
        assert_eq!(smt(&seq(&[&["a", "b"], &["b", "a"]])), Matrix01::ones_matrix(2, 2));
        assert_eq!(cells(&smt(&seq(&[&["a"], &["b"], &["a"]]))), vec![(1, 1), (2, 2), (3, 1)]);
        assert_eq!(cells(&smt(&seq(&[&["c", "a"], &["c"]]))), vec![(1, 1), (1, 2), (2, 1)]);
    }

    #[test]
    fn j2_examples() {
        let m = |p: &[usize], d| cells(j2_expand(&perm(p), d).unwrap().as_matrix());
        assert_eq!(m(&[2, 1], None), vec![(1, 4), (2, 3), (3, 2), (4, 1)]);
        assert_eq!(m(&[1, 2], None), vec![(1, 2), (2, 1), (3, 4), (4, 3)]);
        assert_eq!(m(&[1, 2], Some(4)), vec![(1, 2), (2, 1), (3, 5), (4, 3), (5, 4)]);
        assert!(j2_expand(&perm(&[1, 2]), Some(6)).is_err());
        assert!(j2_expand(&perm(&[1, 2]), Some(0)).is_err());
    }

    #[test]
    fn flattening_examples() {
        let f = flattenings(&perm(&[2, 1]), None).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.iter().next().unwrap().as_matrix(), j2_expand(&perm(&[2, 1]), None).unwrap().as_matrix());

        let f = flattenings(&perm(&[1, 2]), None).unwrap();
        let expect: BTreeSet<_> = [
            fm(4, 4, &[(1, 2), (2, 1), (3, 4), (4, 3)]),
            fm(3, 4, &[(1, 2), (2, 1), (2, 4), (3, 3)]),
        ]
        .into();
        assert_eq!(f, expect);
    }

    #[test]
    fn phi_one_is_j2() {
        let p = phi(1, None).unwrap();
        let j2 = fm(2, 2, &[(1, 2), (2, 1)]);
        assert_eq!(p, [[j2].into()].into());
        assert!(phi(5, None).is_err());
        assert!(phi_capped(5, None, 5).is_ok());
        assert!(phi(0, None).is_err());
    }

    #[test]
    fn flattening_counts_and_expansion() {
        for l in 1..=4 {
            for p in Permutation::all(l) {
                for drop in std::iter::once(None).chain((1..=2 * l + 1).map(Some)) {
                    let expansion = j2_expand(&p, drop).unwrap().into_matrix();
                    let pairs = contractible_pairs(&expansion);
                    let f = flattenings(&p, drop).unwrap();
                    assert_eq!(f.len(), 1 << pairs.len());
                    for h in &f {
                        // Re-expanding: every contracted row splits back into the expansion.
                        let q = expansion.to_owned();
                        let sizes: Vec<usize> = (1..=h.as_matrix().rows()).map(|r| h.as_matrix().row_ones(r).len()).collect();
                        let back = contract_rows(&PermutationMatrix::new(q).unwrap().to_permutation(), &sizes).unwrap();
                        assert_eq!(&back, h);
                    }
                }
            }
        }
    }

    #[test]
    fn tile_examples() {
        let j2 = Matrix01::from_cells(2, 2, [(1, 2), (2, 1)]).unwrap();
        assert_eq!(tile_and_pad(&j2, 2).unwrap(), j2);
        assert_eq!(cells(&tile_and_pad(&j2, 4).unwrap()), vec![(1, 2), (2, 1), (3, 4), (4, 3)]);
        let t = tile_and_pad(&j2, 3).unwrap();
        assert_eq!((t.rows(), t.cols()), (3, 3));
        assert_eq!(cells(&t), vec![(1, 2), (2, 1), (3, 3)]);
        assert!(contains_pattern(&t, &ds_matrix(3).unwrap()).is_none());
        assert!(tile_and_pad(&Matrix01::ones_matrix(1, 3), 2).is_err());
        assert!(tile_and_pad(&Matrix01::ones_matrix(4, 1), 2).is_err());
    }

    #[test]
    fn gen_ds3_examples() {
        for n in 1..=6 {
            let s = gen_ds3(n, 1).unwrap();
            assert_eq!(s.symbols(), (1..=n).collect::<Vec<_>>());
            assert_eq!(s.block_count(), 1);
        }
        let s = gen_ds3(2, 2).unwrap();
        assert!(is_ds_sequence(s.symbols(), 3));
        assert_eq!(s.len(), 4);
        assert!(gen_ds3(2, 3).is_err());
        assert!(gen_ds3(3, 0).is_err());
    }

    #[test]
    fn gen_ds3_respects_multiplicity() {
        for n in 1..=7 {
            for mult in 1..=3 {
                let Ok(s) = gen_ds3(n, mult) else { continue };
                assert!(is_ds_sequence(s.symbols(), 3), "{n} {mult}");
                for x in 1..=n {
                    assert_eq!(s.symbols().iter().filter(|&&y| y == x).count(), mult);
                }
                assert!(contains_pattern(&smt(&s), &ds_matrix(4).unwrap()).is_none());
            }
        }
        assert!(gen_ds3(5, 3).is_ok());
    }

    #[test]
    fn family_examples() {
        let b = build_family(&Matrix01::identity(2), Sampler::Exhaustive, 100).unwrap();
        assert_eq!(b.family.members().iter().cloned().collect::<Vec<_>>(), vec![Permutation::identity(2)]);
        let ones = Matrix01::ones_matrix(2, 2);
        assert_eq!(inflate(&compress_choice(&ones, &[2, 1]).unwrap()), perm(&[2, 1]));
        assert_eq!(inflate(&compress_choice(&ones, &[1, 1]).unwrap()), perm(&[1, 2]));
        assert!(compress_choice(&Matrix01::identity(2), &[2, 2]).is_err());
        assert!(build_family(&Matrix01::zeros(2, 2), Sampler::Exhaustive, 10).is_err());
        let t = build_family(&Matrix01::ones_matrix(3, 3), Sampler::Exhaustive, 5).unwrap();
        assert!(t.truncated);
        assert_eq!(t.choices_examined, 5);
    }

    #[test]
    fn family_round_trip_and_size_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(1..=4);
            let rho = rng.gen_range(1..=n);
            let mut m = Matrix01::zeros(n, n);
            for c in 1..=n {
                let mut rows: Vec<usize> = (1..=n).collect();
                for _ in 0..rho {
                    let r = rows.swap_remove(rng.gen_range(0..rows.len()));
                    m.set(r, c, true);
                }
            }
            let b = build_family(&m, Sampler::Exhaustive, u64::MAX).unwrap();
            assert!(!b.truncated);
            assert!((b.family.len() as f64) >= (rho as f64 / 4.0).powi(n as i32));
            for (q, hs) in &b.preimages {
                assert!(hs.len() <= 1 << n);
                for h in hs {
                    let sizes: Vec<usize> = (1..=h.as_matrix().rows()).map(|r| h.as_matrix().row_ones(r).len()).collect();
                    assert_eq!(&contract_rows(q, &sizes).unwrap(), h);
                    assert_eq!(&inflate(h), q);
                }
            }
        }
    }

    #[test]
    fn family_from_ds4_avoider_has_small_vc_dimension() {
        let mut checked = 0;
        for (symbols, mult, n) in [(5, 3, 7), (6, 3, 7), (4, 2, 6), (3, 2, 5)] {
            let block = smt(&gen_ds3(symbols, mult).unwrap());
            let Ok(source) = tile_and_pad(&block, n) else { continue };
            assert!(contains_pattern(&source, &ds_matrix(4).unwrap()).is_none());
            let b = build_family(&source, Sampler::Random { seed: 3, samples: 500 }, 10_000).unwrap();
            assert!(vc_dimension(&b.family).unwrap() <= 4);
            checked += 1;
        }
        assert!(checked >= 2);
    }

    proptest! {
        #[test]
        fn smt_avoids_one_longer_ds(seed in any::<u64>(), s in 2usize..5, alphabet in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seq = random_ds_sequence(&mut rng, s, alphabet, 30);
            prop_assert!(is_ds_sequence(seq.symbols(), s));
            prop_assert!(contains_pattern(&smt(&seq), &ds_matrix(s + 1).unwrap()).is_none());
        }

        #[test]
        fn tiling_keeps_column_counts(m in 1usize..4, w in 1usize..4, n in 1usize..9, bits in any::<u16>()) {
            prop_assume!(w <= n);
            let mut block = Matrix01::zeros(m, w);
            for r in 1..=m {
                for c in 1..=w {
                    block.set(r, c, bits >> ((r - 1) * w + c - 1) & 1 == 1);
                }
            }
            if let Ok(t) = tile_and_pad(&block, n) {
                prop_assert_eq!((t.rows(), t.cols()), (n, n));
                let counts = block.column_counts();
                for (j, &c) in t.column_counts().iter().enumerate() {
                    prop_assert_eq!(c, counts[j % w]);
                }
            }
        }
    }
}
