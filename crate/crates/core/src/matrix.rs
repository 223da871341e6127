//! Dense GF(2) matrices, row-major with each row padded to whole words.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::bits::{words_for, xor_words, BitVec, WORD};
use crate::error::{check_dim, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatF2 {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl MatF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.set(i, i, true);
        }
        m
    }

    /// Stacks rows. An empty slice gives a `0 x cols` matrix.
    pub fn from_rows(rows: &[BitVec], cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            check_dim("from_rows", cols, r.len())?;
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Parses whitespace-separated rows of `0`/`1` characters.
    pub fn parse_rows(rows: &[&str]) -> Option<Self> {
        let vs: Option<Vec<BitVec>> = rows.iter().map(|r| BitVec::parse01(r)).collect();
        let vs = vs?;
        let cols = vs.first().map_or(0, BitVec::len);
        Self::from_rows(&vs, cols).ok()
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            let r = BitVec::random(cols, rng);
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Uniform nonsingular `k x k` matrix by rejection sampling.
    pub fn random_nonsingular<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        assert!(k >= 1, "random_nonsingular needs k >= 1");
        loop {
            let m = Self::random(k, k, rng);
            if m.rank() == k {
                return m;
            }
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub(crate) fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec::from_words(self.row_words(r).to_vec(), self.cols)
    }

    pub fn set_row(&mut self, r: usize, v: &BitVec) -> Result<()> {
        check_dim("set_row", self.cols, v.len())?;
        self.row_words_mut(r).copy_from_slice(v.words());
        Ok(())
    }

    pub fn column(&self, c: usize) -> BitVec {
        BitVec::from_bools((0..self.rows).map(|r| self.get(r, c)))
    }

    pub fn row_iter(&self) -> impl Iterator<Item = BitVec> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        if src == dst {
            return;
        }
        let (s, d) = (src * self.stride, dst * self.stride);
        if src < dst {
            let (lo, hi) = self.data.split_at_mut(d);
            xor_words(&mut hi[..self.stride], &lo[s..s + self.stride]);
        } else {
            let (lo, hi) = self.data.split_at_mut(s);
            xor_words(&mut lo[d..d + self.stride], &hi[..self.stride]);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// Row-vector product `v * M`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        check_dim("mat_vec_mul", self.rows, v.len())?;
        let mut acc = vec![0u64; self.stride];
        for r in v.ones_iter() {
            xor_words(&mut acc, self.row_words(r));
        }
        Ok(BitVec::from_words(acc, self.cols))
    }

    pub fn add(&self, other: &MatF2) -> Result<MatF2> {
        check_dim("mat_add rows", self.rows, other.rows)?;
        check_dim("mat_add cols", self.cols, other.cols)?;
        let mut out = self.clone();
        xor_words(&mut out.data, &other.data);
        Ok(out)
    }

    /// GF(2) product `self * other`.
    pub fn mul(&self, other: &MatF2) -> Result<MatF2> {
        check_dim("mat_mul", self.cols, other.rows)?;
        let mut out = MatF2::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let mut acc = vec![0u64; other.stride];
            for (wi, &w) in self.row_words(r).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let k = wi * WORD + w.trailing_zeros() as usize;
                    w &= w - 1;
                    xor_words(&mut acc, other.row_words(k));
                }
            }
            out.row_words_mut(r).copy_from_slice(&acc);
        }
        Ok(out)
    }

    pub fn transpose(&self) -> MatF2 {
        let mut out = MatF2::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in BitVec::from_words(self.row_words(r).to_vec(), self.cols).ones_iter() {
                out.set(c, r, true);
            }
        }
        out
    }

    /// Reduces to reduced row echelon form in place and returns the pivot
    /// columns. Pivot row is the lowest-indexed row with a one in the pivot
    /// column; columns are never swapped.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let (wi, bit) = (c / WORD, 1u64 << (c % WORD));
            let Some(p) = (next..self.rows).find(|&r| self.data[r * self.stride + wi] & bit != 0) else {
                continue;
            };
            self.swap_rows(p, next);
            for r in 0..self.rows {
                if r != next && self.data[r * self.stride + wi] & bit != 0 {
                    self.xor_row_into(next, r);
                }
            }
            pivots.push(c);
            next += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Rank of a square matrix and its inverse when it has full rank.
    pub fn rank_invert(&self) -> Result<(usize, Option<MatF2>)> {
        check_dim("rank_invert", self.rows, self.cols)?;
        let k = self.rows;
        let mut aug = MatF2::zeros(k, 2 * k);
        for r in 0..k {
            for c in self.row(r).ones_iter() {
                aug.set(r, c, true);
            }
            aug.set(r, k + r, true);
        }
        let pivots = aug.rref();
        let rank = pivots.iter().take_while(|&&c| c < k).count();
        if rank < k {
            return Ok((rank, None));
        }
        let mut inv = MatF2::zeros(k, k);
        for r in 0..k {
            inv.set_row(r, &aug.row(r).slice(k, k))?;
        }
        Ok((k, Some(inv)))
    }

    /// Basis of `{h : self * h^T = 0}`, one basis vector per row.
    pub fn nullspace(&self) -> MatF2 {
        let mut red = self.clone();
        let pivots = red.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut out = MatF2::zeros(free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            out.set(i, f, true);
            for (r, &pc) in pivots.iter().enumerate() {
                if red.get(r, f) {
                    out.set(i, pc, true);
                }
            }
        }
        out
    }

    /// Coefficients `x` with `x * self = target`, if the target is in the row space.
    pub fn solve_row_space(&self, target: &BitVec) -> Option<BitVec> {
        if target.len() != self.cols {
            return None;
        }
        // Solve self^T x^T = target^T via an augmented column.
        let t = self.transpose();
        let mut aug = MatF2::zeros(t.rows, t.cols + 1);
        for r in 0..t.rows {
            for c in t.row(r).ones_iter() {
                aug.set(r, c, true);
            }
            if target.get(r) {
                aug.set(r, t.cols, true);
            }
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&t.cols) {
            return None;
        }
        let mut x = BitVec::zeros(self.rows);
        for (r, &c) in pivots.iter().enumerate() {
            if aug.get(r, t.cols) {
                x.set(c, true);
            }
        }
        Some(x)
    }

    /// Column weights.
    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0usize; self.cols];
        for r in 0..self.rows {
            for c in BitVec::from_words(self.row_words(r).to_vec(), self.cols).ones_iter() {
                w[c] += 1;
            }
        }
        w
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Column `j` of the result is column `map[j]` of `self`.
    pub(crate) fn gather_columns(&self, map: &[u32]) -> Result<MatF2> {
        check_dim("permute columns", self.cols, map.len())?;
        let mut out = MatF2::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let row = self.row_words(r);
            for (j, &src) in map.iter().enumerate() {
                let src = src as usize;
                if (row[src / WORD] >> (src % WORD)) & 1 == 1 {
                    out.set(r, j, true);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for MatF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatF2 {}x{}", self.rows, self.cols)?;
        for r in self.row_iter() {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&str]) -> MatF2 {
        MatF2::parse_rows(rows).unwrap()
    }

    #[test]
    fn identity_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = MatF2::random(5, 9, &mut rng);
        assert_eq!(MatF2::identity(5).mul(&b).unwrap(), b);
        let v = BitVec::random(5, &mut rng);
        assert_eq!(MatF2::identity(5).mul_vec(&v).unwrap(), v);
        assert!(MatF2::identity(5).mul_vec(&BitVec::zeros(5)).unwrap().is_zero());
    }

    #[test]
    fn add_is_self_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = MatF2::random(4, 70, &mut rng);
        assert!(a.add(&a).unwrap().is_zero());
        assert_eq!(a.add(&MatF2::zeros(4, 70)).unwrap(), a);
        assert!(a.add(&MatF2::zeros(4, 71)).is_err());
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = m(&["101", "101", "011"]);
        let (rank, inv) = a.rank_invert().unwrap();
        assert_eq!(rank, 2);
        assert!(inv.is_none());
        let (rank, inv) = MatF2::identity(7).rank_invert().unwrap();
        assert_eq!(rank, 7);
        assert_eq!(inv.unwrap(), MatF2::identity(7));
        assert!(MatF2::zeros(2, 3).rank_invert().is_err());
    }

    #[test]
    fn nullspace_of_systematic_form() {
        // G = [I | A]  =>  H = [A^T | I]
        let g = m(&["100110", "010011", "001101"]);
        let h = g.nullspace();
        assert_eq!(h.rows(), 3);
        assert!(g.mul(&h.transpose()).unwrap().is_zero());
        let expected = m(&["101100", "110010", "011001"]);
        assert_eq!(h.rank(), 3);
        // Same row space.
        let stacked: Vec<BitVec> = h.row_iter().chain(expected.row_iter()).collect();
        assert_eq!(MatF2::from_rows(&stacked, 6).unwrap().rank(), 3);
        assert_eq!(MatF2::identity(4).nullspace().rows(), 0);
    }

    #[test]
    fn solve_row_space_membership() {
        let g = m(&["1100", "0110"]);
        let x = g.solve_row_space(&BitVec::parse01("1010").unwrap()).unwrap();
        assert_eq!(x.to_string(), "11");
        assert!(g.solve_row_space(&BitVec::parse01("0001").unwrap()).is_none());
    }

    #[test]
    fn nonsingular_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(MatF2::random_nonsingular(1, &mut rng), MatF2::identity(1));
        let s = MatF2::random_nonsingular(64, &mut rng);
        assert_eq!(s.rank(), 64);
        let a = MatF2::random_nonsingular(20, &mut ChaCha8Rng::seed_from_u64(5));
        let b = MatF2::random_nonsingular(20, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }
}
