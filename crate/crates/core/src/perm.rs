//! Coordinate permutations stored as index maps.
//!
//! The forward map realizes right-multiplication by the permutation matrix
//! `R`: `(v R)[j] = v[map[j]]`. The inverse mode realizes `R^T`.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitVec;
use crate::error::{check_dim, Error, Result};
use crate::matrix::MatF2;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<u32>,
}

impl Permutation {
    pub fn new(map: Vec<u32>) -> Result<Self> {
        let n = map.len();
        let mut seen = alloc::vec![false; n];
        for &i in &map {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation);
            }
            seen[i] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n as u32).collect(),
        }
    }

    /// Uniform shuffle (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<u32> = (0..n as u32).collect();
        map.shuffle(rng);
        Self { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = alloc::vec![0u32; self.map.len()];
        for (j, &i) in self.map.iter().enumerate() {
            inv[i as usize] = j as u32;
        }
        Permutation { map: inv }
    }

    /// `v R` in forward mode, `v R^T` with `inverse` set.
    pub fn apply(&self, v: &BitVec, inverse: bool) -> Result<BitVec> {
        check_dim("permute", self.map.len(), v.len())?;
        let mut out = BitVec::zeros(v.len());
        for (j, &i) in self.map.iter().enumerate() {
            let i = i as usize;
            if inverse {
                if v.get(j) {
                    out.set(i, true);
                }
            } else if v.get(i) {
                out.set(j, true);
            }
        }
        Ok(out)
    }

    /// `M R`.
    pub fn apply_columns(&self, m: &MatF2) -> Result<MatF2> {
        m.gather_columns(&self.map)
    }
}
