//! Pattern containment in (0,1)-matrices, formations in matrices and
//! sequences, the matrix-to-sequence transform, sparsification and
//! alternation (Davenport–Schinzel) checks.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::domain::{BlockedSequence, FormationMode, FormationWitness, Matrix01, RowPartition};
use crate::error::{Error, Result};

/// The `s × 2` matrix with a 1 at `(i, j)` exactly when `i + j` is odd.
pub fn ds_matrix(s: usize) -> Result<Matrix01> {
    if s < 1 {
        return Err(Error::domain("ds_matrix needs s >= 1"));
    }
    let cells = (1..=s).map(|i| (i, if i % 2 == 1 { 2 } else { 1 }));
    Matrix01::from_cells(s, 2, cells)
}

/// Strictly increasing host rows and columns onto which a pattern maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Greedy row placement for a fixed column map; `pattern_rows[i]` lists the
/// pattern columns (0-based) holding a 1 in pattern row `i`, restricted to
/// columns already mapped.
fn place_rows(host: &Matrix01, pattern_rows: &[Vec<usize>], col_map: &[usize]) -> Option<Vec<usize>> {
    let mut rows = Vec::with_capacity(pattern_rows.len());
    let mut next = 1;
    for needed in pattern_rows {
        let found = (next..=host.rows()).find(|&r| {
            needed
                .iter()
                .filter(|&&c| c < col_map.len())
                .all(|&c| host.get(r, col_map[c]))
        })?;
        rows.push(found);
        next = found + 1;
    }
    Some(rows)
}

/// Finds the lexicographically least (columns, then rows) occurrence of
/// `pattern` in `host`, where a 1 of the pattern must land on a 1 of the host.
pub fn contains_pattern(host: &Matrix01, pattern: &Matrix01) -> Option<Embedding> {
    if pattern.rows() > host.rows() || pattern.cols() > host.cols() {
        return None;
    }
    let pattern_rows: Vec<Vec<usize>> = (1..=pattern.rows())
        .map(|r| pattern.row_ones(r).into_iter().map(|c| c - 1).collect())
        .collect();
    let mut col_map = Vec::with_capacity(pattern.cols());
    search_columns(host, pattern.cols(), &pattern_rows, &mut col_map)
}

fn search_columns(
    host: &Matrix01,
    width: usize,
    pattern_rows: &[Vec<usize>],
    col_map: &mut Vec<usize>,
) -> Option<Embedding> {
    if col_map.len() == width {
        let rows = place_rows(host, pattern_rows, col_map)?;
        return Some(Embedding {
            rows,
            cols: col_map.clone(),
        });
    }
    let first = col_map.last().map_or(1, |c| c + 1);
    let last = host.cols() + col_map.len() + 1 - width;
    for c in first..=last {
        col_map.push(c);
        if place_rows(host, pattern_rows, col_map).is_some() {
            if let Some(found) = search_columns(host, width, pattern_rows, col_map) {
                return Some(found);
            }
        }
        col_map.pop();
    }
    None
}

/// Occurrence of `pattern` using exactly the host columns `cols` (one per pattern column).
pub fn contains_on_columns(host: &Matrix01, pattern: &Matrix01, cols: &[usize]) -> Option<Vec<usize>> {
    assert_eq!(pattern.cols(), cols.len(), "column map must cover the pattern");
    let pattern_rows: Vec<Vec<usize>> = (1..=pattern.rows())
        .map(|r| pattern.row_ones(r).into_iter().map(|c| c - 1).collect())
        .collect();
    place_rows(host, &pattern_rows, cols)
}

fn check_formation_params(r: usize, s: usize, mode: FormationMode) -> Result<()> {
    if r < 1 || s < 1 {
        return Err(Error::domain("formations need r >= 1 and s >= 1"));
    }
    match mode {
        FormationMode::Doubled if s < 2 => Err(Error::domain("doubled formations need s >= 2")),
        FormationMode::Fat(0) => Err(Error::domain("fat formations need B >= 1")),
        _ => Ok(()),
    }
}

/// Earliest-possible interval starts for `cols`, with the witness cells, or
/// `None` if no `s`-partition serves every column.
fn greedy_partition(
    col_rows: &[Vec<usize>],
    m: usize,
    cols: &[usize],
    needs: &[usize],
) -> Option<(Vec<usize>, Vec<(usize, usize)>)> {
    let mut starts = Vec::with_capacity(needs.len());
    let mut cells = Vec::new();
    let mut start = 1;
    for (idx, &need) in needs.iter().enumerate() {
        if start > m {
            return None;
        }
        starts.push(start);
        let mut end = start;
        for &c in cols {
            let rows = &col_rows[c - 1];
            let from = rows.partition_point(|&r| r < start);
            let picked = rows.get(from..from + need)?;
            end = end.max(*picked.last().expect("need >= 1"));
            cells.extend(picked.iter().map(|&r| (r, c)));
        }
        if idx + 1 < needs.len() {
            start = end + 1;
        }
    }
    Some((starts, cells))
}

/// Searches for a plain, doubled or `B`-fat `(r, s)`-formation.
///
/// Returns the lexicographically least witness: least column tuple first,
/// then least interval starts. Interval boundaries are placed greedily as
/// early as possible, which is optimal for a fixed column set; the column
/// search prunes on partial sets since feasibility is inherited by subsets.
pub fn find_formation(
    host: &Matrix01,
    r: usize,
    s: usize,
    mode: FormationMode,
) -> Result<Option<FormationWitness>> {
    check_formation_params(r, s, mode)?;
    let m = host.rows();
    if r > host.cols() || s > m {
        return Ok(None);
    }
    let needs: Vec<usize> = (0..s).map(|i| mode.required(i, s)).collect();
    let total: usize = needs.iter().sum();
    let col_rows: Vec<Vec<usize>> = (1..=host.cols()).map(|c| host.col_ones(c)).collect();
    let candidates: Vec<usize> = (1..=host.cols())
        .filter(|&c| col_rows[c - 1].len() >= total)
        .collect();

    let mut chosen = Vec::with_capacity(r);
    let found = formation_dfs(&col_rows, m, &needs, &candidates, 0, r, &mut chosen);
    Ok(found.map(|(columns, starts, mut cells)| {
        cells.sort_unstable();
        FormationWitness {
            columns,
            partition: RowPartition::from_starts(m, &starts).expect("greedy starts are valid"),
            cells,
            mode,
        }
    }))
}

type Found = (Vec<usize>, Vec<usize>, Vec<(usize, usize)>);

fn formation_dfs(
    col_rows: &[Vec<usize>],
    m: usize,
    needs: &[usize],
    candidates: &[usize],
    from: usize,
    r: usize,
    chosen: &mut Vec<usize>,
) -> Option<Found> {
    if chosen.len() == r {
        let (starts, cells) = greedy_partition(col_rows, m, chosen, needs)?;
        return Some((chosen.clone(), starts, cells));
    }
    let remaining = r - chosen.len();
    for i in from..candidates.len() {
        if candidates.len() - i < remaining {
            break;
        }
        chosen.push(candidates[i]);
        if greedy_partition(col_rows, m, chosen, needs).is_some() {
            if let Some(found) = formation_dfs(col_rows, m, needs, candidates, i + 1, r, chosen) {
                return Some(found);
            }
        }
        chosen.pop();
    }
    None
}

/// Matrix→sequence transform: rows top to bottom, each nonempty row a block
/// of its 1-columns in ascending order.
pub fn mst(matrix: &Matrix01) -> BlockedSequence<usize> {
    let blocks: Vec<Vec<usize>> = (1..=matrix.rows())
        .map(|r| matrix.row_ones(r))
        .filter(|b| !b.is_empty())
        .collect();
    BlockedSequence::from_blocks(blocks).expect("matrix rows have distinct columns")
}

/// Makes `seq` `r`-sparse by repeatedly taking the leftmost pair of equal
/// symbols at distance below `r` and deleting the symbols from the first of
/// the pair up to just before the second. Returns the result and the number
/// of deleted symbols.
pub fn sparsify<T: Clone + Eq>(seq: &[T], r: usize) -> Result<(Vec<T>, usize)> {
    if r < 2 {
        return Err(Error::domain("sparsify needs r >= 2"));
    }
    let mut out = seq.to_vec();
    let mut removed = 0;
    let mut j = 1;
    while j < out.len() {
        let lo = j.saturating_sub(r - 1);
        match (lo..j).find(|&i| out[i] == out[j]) {
            Some(i) => {
                out.drain(i..j);
                removed += j - i;
                j = i.max(1);
            }
            None => j += 1,
        }
    }
    Ok((out, removed))
}

pub fn is_r_sparse<T: Eq>(seq: &[T], r: usize) -> bool {
    (0..seq.len()).all(|j| (j.saturating_sub(r.saturating_sub(1))..j).all(|i| seq[i] != seq[j]))
}

fn positions<T: Eq + Hash + Clone>(seq: &[T]) -> (Vec<T>, Vec<Vec<usize>>) {
    let mut index: HashMap<&T, usize> = HashMap::new();
    let mut symbols = Vec::new();
    let mut pos: Vec<Vec<usize>> = Vec::new();
    for (i, s) in seq.iter().enumerate() {
        let k = *index.entry(s).or_insert_with(|| {
            symbols.push(s.clone());
            pos.push(Vec::new());
            pos.len() - 1
        });
        pos[k].push(i);
    }
    (symbols, pos)
}

/// Length of the longest alternation of two symbols given their sorted
/// position lists, stopping once `cap` is reached.
fn alternation_of(a: &[usize], b: &[usize], cap: usize) -> usize {
    let (mut i, mut j) = (0, 0);
    let mut runs = 0;
    let mut last_a = None;
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i] < b[j]);
        if take_a {
            i += 1;
        } else {
            j += 1;
        }
        if last_a != Some(take_a) {
            runs += 1;
            if runs >= cap {
                return runs;
            }
            last_a = Some(take_a);
        }
    }
    runs
}

/// Length of the longest subsequence of `seq` alternating between `a` and `b`.
pub fn alternation_length<T: Eq>(seq: &[T], a: &T, b: &T) -> usize {
    let pa: Vec<usize> = (0..seq.len()).filter(|&i| &seq[i] == a).collect();
    let pb: Vec<usize> = (0..seq.len()).filter(|&i| &seq[i] == b).collect();
    alternation_of(&pa, &pb, usize::MAX)
}

/// True iff `seq` has no immediate repetition and no two distinct symbols
/// alternate for `s + 2` terms.
pub fn is_ds_sequence<T: Eq + Hash + Clone>(seq: &[T], s: usize) -> bool {
    if seq.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    let limit = s + 2;
    let (_, pos) = positions(seq);
    for x in 0..pos.len() {
        for y in x + 1..pos.len() {
            let (a, b) = (&pos[x], &pos[y]);
            if a.len() + b.len() < limit {
                continue;
            }
            // Disjoint occurrence windows alternate at most twice.
            if a[a.len() - 1] < b[0] || b[b.len() - 1] < a[0] {
                continue;
            }
            if alternation_of(a, b, limit) >= limit {
                return false;
            }
        }
    }
    true
}

/// An `(r, s)`-formation found as a subsequence: the symbol set and, for
/// each troop, the positions (0-based) used by each symbol in `symbols` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceFormation<T> {
    pub symbols: Vec<T>,
    pub troops: Vec<Vec<usize>>,
}

fn greedy_troops(pos: &[&Vec<usize>], s: usize) -> Option<Vec<Vec<usize>>> {
    let mut troops = Vec::with_capacity(s);
    let mut start = 0;
    for _ in 0..s {
        let mut troop = Vec::with_capacity(pos.len());
        for p in pos {
            let k = p.partition_point(|&i| i < start);
            troop.push(*p.get(k)?);
        }
        start = troop.iter().max().map_or(start, |m| m + 1);
        troops.push(troop);
    }
    Some(troops)
}

/// Finds an `(r, s)`-formation (s consecutive permutations of one r-set of
/// symbols) as a subsequence; the least symbol set in sorted order wins.
pub fn find_sequence_formation<T: Ord + Hash + Clone>(
    seq: &[T],
    r: usize,
    s: usize,
) -> Option<SequenceFormation<T>> {
    if r == 0 || s == 0 {
        return None;
    }
    let (symbols, pos) = positions(seq);
    let mut order: Vec<usize> = (0..symbols.len()).filter(|&k| pos[k].len() >= s).collect();
    order.sort_by(|&x, &y| symbols[x].cmp(&symbols[y]));
    let mut chosen = Vec::with_capacity(r);
    let found = seq_formation_dfs(&pos, &order, 0, r, s, &mut chosen)?;
    Some(SequenceFormation {
        symbols: found.0.iter().map(|&k| symbols[k].clone()).collect(),
        troops: found.1,
    })
}

fn seq_formation_dfs(
    pos: &[Vec<usize>],
    order: &[usize],
    from: usize,
    r: usize,
    s: usize,
    chosen: &mut Vec<usize>,
) -> Option<(Vec<usize>, Vec<Vec<usize>>)> {
    let lists = |chosen: &[usize]| chosen.iter().map(|&k| &pos[k]).collect::<Vec<_>>();
    if chosen.len() == r {
        let troops = greedy_troops(&lists(chosen), s)?;
        return Some((chosen.clone(), troops));
    }
    for i in from..order.len() {
        if order.len() - i < r - chosen.len() {
            break;
        }
        chosen.push(order[i]);
        if greedy_troops(&lists(chosen), s).is_some() {
            if let Some(found) = seq_formation_dfs(pos, order, i + 1, r, s, chosen) {
                return Some(found);
            }
        }
        chosen.pop();
    }
    None
}

/// If `mst(host)` contains an `(s·r, s)`-formation, converts it into a plain
/// `(r, s)`-formation of `host`.
///
/// The last symbol of each troop but the final one is "bad"; the sorted bad
/// symbols cut the column range into `s` slices, one of which carries at
/// least `r` formation symbols. Within that slice every troop boundary falls
/// cleanly before or after the row where the troop ends, which yields the
/// row partition.
pub fn split_formation(host: &Matrix01, r: usize, s: usize) -> Result<Option<FormationWitness>> {
    check_formation_params(r, s, FormationMode::Plain)?;
    let seq = mst(host);
    let Some(formation) = find_sequence_formation(seq.symbols(), s * r, s) else {
        return Ok(None);
    };
    let row_of_block: Vec<usize> = (1..=host.rows())
        .filter(|&row| (1..=host.cols()).any(|c| host.get(row, c)))
        .collect();
    let row_of = |p: usize| row_of_block[seq.block_of(p)];

    // (bad symbol, row where its troop ends) for every troop but the last.
    let troop_ends: Vec<(usize, usize)> = formation.troops[..s - 1]
        .iter()
        .map(|troop| {
            let last = *troop.iter().max().expect("troops are nonempty");
            (seq.symbols()[last], row_of(last))
        })
        .collect();
    let mut cuts: Vec<usize> = troop_ends.iter().map(|&(c, _)| c).collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(host.cols());

    let slice = (1..=s).find_map(|i| {
        let (lo, hi) = (cuts[i - 1], cuts[i]);
        let mut cols: Vec<usize> = formation
            .symbols
            .iter()
            .copied()
            .filter(|&x| x > lo && x <= hi)
            .collect();
        cols.sort_unstable();
        (cols.len() >= r).then(|| (hi, cols[..r].to_vec()))
    });
    let Some((upper, columns)) = slice else {
        return Err(Error::PostconditionViolated(
            "no column slice carries r formation symbols".into(),
        ));
    };

    let mut starts = vec![1];
    for &(bad, row) in &troop_ends {
        starts.push(if bad >= upper { row + 1 } else { row });
    }
    let partition = RowPartition::from_starts(host.rows(), &starts)?;
    let mut cells = Vec::with_capacity(r * s);
    for troop in &formation.troops {
        for (k, &sym) in formation.symbols.iter().enumerate() {
            if columns.contains(&sym) {
                cells.push((row_of(troop[k]), sym));
            }
        }
    }
    cells.sort_unstable();
    let witness = FormationWitness {
        columns,
        partition,
        cells,
        mode: FormationMode::Plain,
    };
    witness.validate(host)?;
    Ok(Some(witness))
}
