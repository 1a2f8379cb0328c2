//! Set partitions of `{0, .., n-1}` in canonical form.
//!
//! A partition is stored as a restricted growth string (RGS): item 0 carries
//! label 0, and every later item carries a label at most one larger than the
//! maximum label seen before it. Blocks are therefore numbered by first
//! occurrence, which gives each set partition exactly one representation and
//! makes equality, hashing, and enumeration order well defined.
//!
//! Enumeration is lexicographic in the RGS and guarded by a limit because the
//! number of partitions grows like the Bell numbers (`bell(13)` is already
//! 27,644,437). Counting functions return arbitrary-precision integers.

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Largest `n` that [`enumerate_partitions`] accepts without an explicit
/// override. `bell(13)` is about 2.8e7, which a full scan still handles in
/// seconds; every further item multiplies the cost by roughly `n`.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 13;

/// A set partition of `{0, .., n-1}` in canonical (first-occurrence) labeling.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    rgs: Vec<usize>,
}

/// Describes one way of splitting a block in two; paired with the resulting
/// partition by [`Partition::extensions`] and [`Partition::indexed_splits`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    /// Index of the block that was split.
    pub block: usize,
    /// Items moved out of the block to form the new one, in ascending order.
    pub moved: Vec<usize>,
    /// Sizes `(kept, moved)` of the two parts.
    pub sizes: (usize, usize),
}

impl Partition {
    /// Builds a partition from a restricted growth string.
    pub fn from_rgs(rgs: Vec<usize>) -> Result<Self> {
        if rgs.is_empty() {
            return Err(Error::invalid_partition("no items"));
        }
        if rgs[0] != 0 {
            return Err(Error::invalid_partition("first label must be 0"));
        }
        let mut max = 0usize;
        for (i, &l) in rgs.iter().enumerate().skip(1) {
            if l > max + 1 {
                return Err(Error::invalid_partition(format!(
                    "label {l} at position {i} skips over {}",
                    max + 1
                )));
            }
            max = max.max(l);
        }
        Ok(Partition { rgs })
    }

    /// Builds the canonical partition induced by arbitrary labels:
    /// two items share a block exactly when their labels are equal.
    pub fn from_labels<T: PartialEq>(labels: &[T]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid_partition("no items"));
        }
        let mut seen: Vec<&T> = Vec::new();
        let mut rgs = Vec::with_capacity(labels.len());
        for l in labels {
            let id = match seen.iter().position(|&s| s == l) {
                Some(p) => p,
                None => {
                    seen.push(l);
                    seen.len() - 1
                }
            };
            rgs.push(id);
        }
        Ok(Partition { rgs })
    }

    /// Canonicalizes an explicit block list. The blocks must be nonempty,
    /// disjoint, and cover `0..n` exactly, where `n` is the total item count.
    pub fn from_blocks(blocks: &[Vec<usize>]) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        if n == 0 {
            return Err(Error::invalid_partition("no items"));
        }
        let mut label_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::invalid_partition(format!("block {b} is empty")));
            }
            for &item in block {
                if item >= n {
                    return Err(Error::invalid_partition(format!(
                        "item {item} out of range for {n} items"
                    )));
                }
                if label_of[item] != usize::MAX {
                    return Err(Error::invalid_partition(format!("item {item} appears twice")));
                }
                label_of[item] = b;
            }
        }
        // Coverage follows from the counts: n slots, n placements, no repeats.
        Self::from_labels(&label_of)
    }

    /// Number of items.
    pub fn n(&self) -> usize {
        self.rgs.len()
    }

    /// Number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.rgs.iter().copied().max().unwrap_or(0) + 1
    }

    /// The restricted growth string. `rgs()[i]` is the block index of item `i`.
    pub fn rgs(&self) -> &[usize] {
        &self.rgs
    }

    /// Block index of one item.
    pub fn block_of(&self, item: usize) -> usize {
        self.rgs[item]
    }

    /// Materializes the blocks; items within a block ascend, and blocks are
    /// ordered by their smallest item (the canonical block order).
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (item, &b) in self.rgs.iter().enumerate() {
            blocks[b].push(item);
        }
        blocks
    }

    /// Sizes of the blocks in canonical block order.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_blocks()];
        for &b in &self.rgs {
            sizes[b] += 1;
        }
        sizes
    }

    /// All partitions reachable by merging one pair of blocks.
    ///
    /// The result has exactly `s * (s - 1) / 2` entries, one per unordered
    /// pair, in lexicographic pair order. Merging distinct pairs always
    /// yields distinct partitions. A single-block partition has nothing to
    /// merge and is a domain error.
    pub fn contraction_set(&self) -> Result<Vec<Partition>> {
        let s = self.num_blocks();
        if s < 2 {
            return Err(Error::invalid_parameter(
                "contraction of a single-block partition",
            ));
        }
        let mut out = Vec::with_capacity(s * (s - 1) / 2);
        for i in 0..s {
            for j in (i + 1)..s {
                let labels: Vec<usize> = self
                    .rgs
                    .iter()
                    .map(|&l| if l == j { i } else { l })
                    .collect();
                out.push(Partition::from_labels(&labels).expect("nonempty"));
            }
        }
        Ok(out)
    }

    /// Streams every partition reachable by splitting one block in two,
    /// each unordered split exactly once, with its [`Split`] descriptor.
    ///
    /// The split of a block is anchored on the block's smallest item: the
    /// moved part ranges over the nonempty subsets of the remaining items,
    /// which counts `2^(b-1) - 1` splits for a block of size `b`.
    pub fn extensions(&self) -> impl Iterator<Item = (Partition, Split)> + '_ {
        let blocks = self.blocks();
        let s = self.num_blocks();
        blocks
            .into_iter()
            .enumerate()
            .flat_map(move |(bi, items)| {
                let free = items.len() - 1;
                (1u64..(1u64 << free)).map(move |mask| {
                    let moved: Vec<usize> = (0..free)
                        .filter(|k| mask >> k & 1 == 1)
                        .map(|k| items[k + 1])
                        .collect();
                    let mut labels = self.rgs.clone();
                    for &item in &moved {
                        labels[item] = s;
                    }
                    let sizes = (items.len() - moved.len(), moved.len());
                    let p = Partition::from_labels(&labels).expect("nonempty");
                    (p, Split { block: bi, moved, sizes })
                })
            })
    }

    /// Materialized form of [`Partition::extensions`], partitions only.
    pub fn extension_set(&self) -> Vec<Partition> {
        self.extensions().map(|(p, _)| p).collect()
    }

    /// All splits of block `block` in which the moved part has exactly
    /// `size` items.
    ///
    /// Every subset of the block of that size is listed, so over
    /// `size = 1..b` each unordered split appears twice, once from each
    /// side; a block of size 2 with `size = 1` lists the same split twice.
    /// This matches the binomial bookkeeping used when summing ratio terms
    /// per part size, and is exactly double the count of
    /// [`Partition::extensions`] restricted to the block.
    pub fn indexed_splits(&self, block: usize, size: usize) -> Result<Vec<(Partition, Split)>> {
        let blocks = self.blocks();
        if block >= blocks.len() {
            return Err(Error::InvalidSplit { block, size });
        }
        let items = &blocks[block];
        let b = items.len();
        if size == 0 || size >= b {
            return Err(Error::InvalidSplit { block, size });
        }
        let s = self.num_blocks();
        let mut out = Vec::new();
        // Lexicographic combinations of `size` positions out of `b`.
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let moved: Vec<usize> = idx.iter().map(|&k| items[k]).collect();
            let mut labels = self.rgs.clone();
            for &item in &moved {
                labels[item] = s;
            }
            out.push((
                Partition::from_labels(&labels).expect("nonempty"),
                Split { block, moved, sizes: (b - size, size) },
            ));
            // Advance the combination.
            let mut i = size;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if idx[i] != i + b - size {
                    break;
                }
            }
            idx[i] += 1;
            for j in (i + 1)..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

impl std::fmt::Debug for Partition {
    /// Prints the RGS as a digit string, e.g. `0010`; labels past 9 use
    /// letters (base 36), which covers every enumerable size.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &l in &self.rgs {
            match char::from_digit(l as u32, 36) {
                Some(c) => write!(f, "{c}")?,
                None => write!(f, "({l})")?,
            }
        }
        Ok(())
    }
}

/// Stirling number of the second kind: partitions of `n` items into exactly
/// `s` nonempty blocks.
pub fn stirling2(n: usize, s: usize) -> BigUint {
    if s > n {
        return BigUint::ZERO;
    }
    if n == 0 {
        return BigUint::from(1u32); // s == 0 here
    }
    if s == 0 {
        return BigUint::ZERO;
    }
    // Row-by-row recurrence S(n, k) = k S(n-1, k) + S(n-1, k-1).
    let mut row = vec![BigUint::ZERO; s + 1];
    row[0] = BigUint::from(1u32);
    for i in 1..=n {
        let hi = s.min(i);
        for k in (1..=hi).rev() {
            row[k] = &row[k] * BigUint::from(k as u32) + &row[k - 1];
        }
        row[0] = BigUint::ZERO;
    }
    row[s].clone()
}

/// Bell number: all partitions of `n` items.
pub fn bell(n: usize) -> BigUint {
    (0..=n).map(|s| stirling2(n, s)).sum()
}

/// Completion counts for restricted growth strings, used to jump to an
/// arbitrary rank of the lexicographic enumeration.
///
/// `count(i, m)` is the number of ways to extend a prefix of length `i`
/// that uses `m` distinct labels to a full string of length `n`.
pub struct CompletionCounts {
    n: usize,
    // d[i][m] for i in 0..=n, m in 0..=n.
    d: Vec<Vec<u128>>,
}

impl CompletionCounts {
    pub fn new(n: usize) -> Self {
        // d[i][m]: completions from position i with m labels in use.
        // d[n][.] = 1, d[i][m] = m d[i+1][m] + d[i+1][m+1].
        let mut d = vec![vec![0u128; n + 2]; n + 1];
        for m in 0..=n + 1 {
            d[n][m] = 1;
        }
        for i in (0..n).rev() {
            for m in 0..=n {
                d[i][m] = (m as u128) * d[i + 1][m] + d[i + 1][m + 1];
            }
        }
        CompletionCounts { n, d }
    }

    /// Total strings of length `n`, i.e. the Bell number.
    pub fn total(&self) -> u128 {
        if self.n == 0 {
            return 0;
        }
        self.d[1][1]
    }
}

/// Low-level cursor over restricted growth strings in lexicographic order.
///
/// [`Partitions`] wraps this for iteration; scan loops that maintain
/// incremental block state use it directly because [`RgsCursor::step`]
/// reports the leftmost changed position.
pub struct RgsCursor {
    rgs: Vec<usize>,
    // maxes[i] = max(rgs[0..=i]); kept in lockstep with rgs.
    maxes: Vec<usize>,
}

impl RgsCursor {
    /// Cursor at the first string, all items in one block.
    pub fn first(n: usize) -> Self {
        assert!(n >= 1, "partitions need at least one item");
        RgsCursor { rgs: vec![0; n], maxes: vec![0; n] }
    }

    /// Cursor positioned at `rank` (0-based) of the lexicographic order.
    pub fn seek(rank: u128, counts: &CompletionCounts) -> Self {
        let n = counts.n;
        assert!(n >= 1 && rank < counts.total(), "rank out of range");
        let mut rgs = vec![0usize; n];
        let mut maxes = vec![0usize; n];
        let mut m = 1usize; // labels used by the prefix
        let mut r = rank;
        for i in 1..n {
            let mut chosen = m; // fallback: the fresh label
            for l in 0..=m {
                let next_m = if l == m { m + 1 } else { m };
                let c = counts.d[i + 1][next_m];
                if r < c {
                    chosen = l;
                    break;
                }
                r -= c;
            }
            rgs[i] = chosen;
            m = m.max(chosen + 1);
            maxes[i] = m - 1;
        }
        RgsCursor { rgs, maxes }
    }

    pub fn rgs(&self) -> &[usize] {
        &self.rgs
    }

    /// Number of blocks of the current string.
    pub fn num_blocks(&self) -> usize {
        self.maxes[self.rgs.len() - 1] + 1
    }

    /// Advances to the lexicographic successor and returns the leftmost
    /// position that changed; positions right of it reset to label 0.
    /// Returns `None` after the all-singletons string.
    pub fn step(&mut self) -> Option<usize> {
        let n = self.rgs.len();
        let mut i = n;
        loop {
            if i <= 1 {
                return None;
            }
            i -= 1;
            // rgs[i] may rise to maxes[i-1] + 1 at most.
            if self.rgs[i] <= self.maxes[i - 1] {
                break;
            }
        }
        self.rgs[i] += 1;
        self.maxes[i] = self.maxes[i - 1].max(self.rgs[i]);
        for k in (i + 1)..n {
            self.rgs[k] = 0;
            self.maxes[k] = self.maxes[k - 1];
        }
        Some(i)
    }
}

/// Iterator over all partitions of `n` items, optionally restricted to a
/// given number of blocks, in lexicographic RGS order.
pub struct Partitions {
    cursor: Option<RgsCursor>,
    blocks: Option<usize>,
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let cursor = self.cursor.as_mut()?;
        loop {
            let hit = match self.blocks {
                Some(s) => cursor.num_blocks() == s,
                None => true,
            };
            if hit {
                let out = Partition { rgs: cursor.rgs().to_vec() };
                if cursor.step().is_none() {
                    self.cursor = None;
                }
                return Some(out);
            }
            if cursor.step().is_none() {
                self.cursor = None;
                return None;
            }
        }
    }
}

/// Enumerates partitions of `n` items, all of them or only those with
/// exactly `blocks` blocks, under [`DEFAULT_ENUMERATION_LIMIT`].
pub fn enumerate_partitions(n: usize, blocks: Option<usize>) -> Result<Partitions> {
    enumerate_partitions_with_limit(n, blocks, DEFAULT_ENUMERATION_LIMIT)
}

/// Same as [`enumerate_partitions`] with an explicit ceiling. Raising the
/// ceiling is a deliberate act: each extra item multiplies the partition
/// count by roughly `n`.
pub fn enumerate_partitions_with_limit(
    n: usize,
    blocks: Option<usize>,
    limit: usize,
) -> Result<Partitions> {
    if n == 0 {
        return Err(Error::invalid_partition("no items"));
    }
    if n > limit {
        return Err(Error::EnumerationLimit { n, limit });
    }
    if let Some(s) = blocks {
        if s == 0 || s > n {
            return Err(Error::invalid_parameter(format!(
                "cannot split {n} items into {s} blocks"
            )));
        }
    }
    Ok(Partitions { cursor: Some(RgsCursor::first(n)), blocks })
}
