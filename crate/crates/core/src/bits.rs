//! Bit-packed GF(2) vectors and matrices with word-parallel elimination.

use serde::{Deserialize, Serialize};

/// A GF(2) row vector packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let w = &mut self.words[i / 64];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the AND of two vectors (GF(2) inner product).
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    /// Number of positions set in both vectors.
    pub fn and_count(&self, other: &BitVec) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BitVec::zeros(len);
        for i in idx {
            v.set(i, true);
        }
        v
    }

    /// Concatenate two vectors (used to form symplectic 2n-bit rows).
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }
}

/// A dense GF(2) matrix stored as bit-packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        BitMatrix { rows: Vec::new(), cols }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols);
        }
        BitMatrix { rows, cols }
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }
}

/// GF(2) row rank via word-parallel Gaussian elimination.
pub fn rank_f2(m: &BitMatrix) -> usize {
    Rref::from_matrix(m).rank()
}

/// Incremental row-echelon form, reusable for many membership queries
/// against the same row space.
#[derive(Clone, Debug)]
pub struct Rref {
    cols: usize,
    /// (pivot column, reduced row) pairs, sorted by pivot column.
    pivots: Vec<(usize, BitVec)>,
}

impl Rref {
    pub fn new(cols: usize) -> Self {
        Rref { cols, pivots: Vec::new() }
    }

    pub fn from_matrix(m: &BitMatrix) -> Self {
        let mut r = Rref::new(m.num_cols());
        for row in m.rows() {
            r.insert(row.clone());
        }
        r
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Insert a row; returns `true` if it was independent of the span so far.
    pub fn insert(&mut self, row: BitVec) -> bool {
        let v = self.reduce(&row);
        if v.is_zero() {
            return false;
        }
        let pivot = v.iter_ones().next().unwrap();
        let pos = self.pivots.partition_point(|(c, _)| *c < pivot);
        self.pivots.insert(pos, (pivot, v));
        true
    }

    /// Reduce `v` against the span; returns the residual.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (pc, prow) in &self.pivots {
            if v.get(*pc) {
                v.xor_assign(prow);
            }
        }
        v
    }

    /// True iff `v` lies in the row span.
    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

/// True iff `v` is an GF(2) combination of the rows of `m`; when it is and
/// `witness` is requested, also returns one row combination producing it.
pub fn in_rowspan(m: &BitMatrix, v: &BitVec, witness: bool) -> (bool, Option<BitVec>) {
    assert_eq!(v.len(), m.num_cols(), "vector length must equal column count");
    // forward elimination tracking combinations
    let mut reduced: Vec<(usize, BitVec, BitVec)> = Vec::new(); // (pivot, row, combo)
    let nr = m.num_rows();
    for (i, row) in m.rows().iter().enumerate() {
        let mut r = row.clone();
        let mut c = BitVec::zeros(nr);
        c.set(i, true);
        for (pc, prow, pcombo) in &reduced {
            if r.get(*pc) {
                r.xor_assign(prow);
                c.xor_assign(pcombo);
            }
        }
        if !r.is_zero() {
            let p = r.iter_ones().next().unwrap();
            reduced.push((p, r, c));
            reduced.sort_by_key(|(p, _, _)| *p);
        }
    }
    let mut r = v.clone();
    let mut c = BitVec::zeros(nr);
    for (pc, prow, pcombo) in &reduced {
        if r.get(*pc) {
            r.xor_assign(prow);
            c.xor_assign(pcombo);
        }
    }
    if r.is_zero() {
        (true, if witness { Some(c) } else { None })
    } else {
        (false, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> BitMatrix {
        let mut m = BitMatrix::new(c);
        for _ in 0..r {
            let mut row = BitVec::zeros(c);
            for j in 0..c {
                if rng.gen_bool(0.5) {
                    row.set(j, true);
                }
            }
            m.push_row(row);
        }
        m
    }

    /// Naive elimination on Vec<Vec<bool>> as an independent oracle.
    fn naive_rank(m: &BitMatrix) -> usize {
        let mut rows: Vec<Vec<bool>> = m
            .rows()
            .iter()
            .map(|r| (0..m.num_cols()).map(|j| r.get(j)).collect())
            .collect();
        let mut rank = 0;
        for col in 0..m.num_cols() {
            if let Some(p) = (rank..rows.len()).find(|&i| rows[i][col]) {
                rows.swap(rank, p);
                for i in 0..rows.len() {
                    if i != rank && rows[i][col] {
                        let (a, b) = if i < rank {
                            let (lo, hi) = rows.split_at_mut(rank);
                            (&mut lo[i], &hi[0])
                        } else {
                            let (lo, hi) = rows.split_at_mut(i);
                            (&mut hi[0], &lo[rank])
                        };
                        for j in 0..a.len() {
                            a[j] ^= b[j];
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn rank_identity_and_zero() {
        let mut id = BitMatrix::new(4);
        for i in 0..4 {
            id.push_row(BitVec::from_indices(4, [i]));
        }
        assert_eq!(rank_f2(&id), 4);

        let mut z = BitMatrix::new(5);
        for _ in 0..3 {
            z.push_row(BitVec::zeros(5));
        }
        assert_eq!(rank_f2(&z), 0);
    }

    #[test]
    fn rank_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 20, 40);
            assert_eq!(rank_f2(&m), naive_rank(&m));
        }
    }

    #[test]
    fn rowspan_trivial_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(&mut rng, 6, 12);
        let (yes, w) = in_rowspan(&m, m.row(0), true);
        assert!(yes);
        let w = w.unwrap();
        // witness reproduces the vector
        let mut acc = BitVec::zeros(12);
        for i in w.iter_ones() {
            acc.xor_assign(m.row(i));
        }
        assert_eq!(&acc, m.row(0));
        let (yes0, _) = in_rowspan(&m, &BitVec::zeros(12), false);
        assert!(yes0);
    }

    #[test]
    fn rowspan_matches_exhaustive_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 8, 10);
            // enumerate all 2^8 combinations
            let mut span = std::collections::HashSet::new();
            for mask in 0u32..(1 << m.num_rows()) {
                let mut acc = BitVec::zeros(10);
                for i in 0..m.num_rows() {
                    if (mask >> i) & 1 == 1 {
                        acc.xor_assign(m.row(i));
                    }
                }
                span.insert(acc);
            }
            for _ in 0..20 {
                let mut v = BitVec::zeros(10);
                for j in 0..10 {
                    if rng.gen_bool(0.5) {
                        v.set(j, true);
                    }
                }
                let (got, _) = in_rowspan(&m, &v, false);
                assert_eq!(got, span.contains(&v));
            }
        }
    }
}
