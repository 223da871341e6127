//! Key generation.
//!
//! The public matrix is `G = S (G_PQ + M) R`: `G_PQ` is the scalar expansion
//! of the composed code `p_j(x) q_j(x)`, `M` is a masking matrix whose rows
//! lie in the span of a secret rank-`l` basis, `S` scrambles rows and `R`
//! permutes columns.

use alloc::vec::Vec;

use rand::Rng;

use crate::bits::BitVec;
use crate::conv::{expand_scalar, CodeParams, PolyGenMatrix, MAX_MASK_RANK};
use crate::error::{check_dim, Error, Result};
use crate::matrix::MatF2;
use crate::perm::Permutation;

/// Attempts at drawing a masking matrix before giving up.
pub const MASK_RETRIES: usize = 64;

/// `l` linearly independent length-`N` vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MaskBasis {
    vectors: Vec<BitVec>,
    len: usize,
}

impl MaskBasis {
    pub fn new(vectors: Vec<BitVec>, len: usize) -> Result<Self> {
        if vectors.len() > MAX_MASK_RANK {
            return Err(Error::Param("mask rank l above cap 20"));
        }
        for v in &vectors {
            check_dim("mask basis vector", len, v.len())?;
        }
        let basis = Self { vectors, len };
        if basis.matrix().rank() != basis.rank() {
            return Err(Error::Param("mask basis vectors are linearly dependent"));
        }
        Ok(basis)
    }

    /// Uniform vectors, redrawn until independent.
    pub fn generate<R: Rng + ?Sized>(len: usize, l: usize, rng: &mut R) -> Result<Self> {
        if l > MAX_MASK_RANK {
            return Err(Error::Param("mask rank l above cap 20"));
        }
        if l > len {
            return Err(Error::Param("mask rank exceeds vector length"));
        }
        loop {
            let vectors: Vec<BitVec> = (0..l).map(|_| BitVec::random(len, rng)).collect();
            if let Ok(b) = Self::new(vectors, len) {
                return Ok(b);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector_len(&self) -> usize {
        self.len
    }

    pub fn vectors(&self) -> &[BitVec] {
        &self.vectors
    }

    /// Basis vectors as the rows of an `l x N` matrix.
    pub fn matrix(&self) -> MatF2 {
        MatF2::from_rows(&self.vectors, self.len).expect("lengths checked on construction")
    }

    /// Sum of the basis vectors selected by the bits of `mask`.
    pub fn combination(&self, mask: u32) -> BitVec {
        let mut acc = BitVec::zeros(self.len);
        for (i, v) in self.vectors.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                acc.xor_assign(v).expect("equal lengths");
            }
        }
        acc
    }

    /// Coefficients expressing `v` over the basis, if `v` is in the span.
    pub fn coordinates(&self, v: &BitVec) -> Option<u32> {
        if self.vectors.is_empty() {
            return v.is_zero().then_some(0);
        }
        let x = self.matrix().solve_row_space(v)?;
        Some(x.ones_iter().fold(0u32, |acc, i| acc | 1 << i))
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        v.len() == self.len && self.coordinates(v).is_some()
    }
}

/// Draws a `K x N` matrix with rows uniform over the span of `basis`, redrawn
/// until `g_pq + M` has full row rank.
pub fn gen_mask_matrix<R: Rng + ?Sized>(basis: &MaskBasis, k: usize, g_pq: &MatF2, rng: &mut R) -> Result<MatF2> {
    check_dim("mask rows", k, g_pq.rows())?;
    check_dim("mask columns", basis.vector_len(), g_pq.cols())?;
    let span = 1u32 << basis.rank();
    for _ in 0..MASK_RETRIES {
        let mut m = MatF2::zeros(k, basis.vector_len());
        for r in 0..k {
            let c = rng.gen_range(0..span);
            m.set_row(r, &basis.combination(c))?;
        }
        if g_pq.add(&m)?.rank() == k {
            return Ok(m);
        }
    }
    Err(Error::MaskRetries(MASK_RETRIES))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub params: CodeParams,
    pub g: MatF2,
}

impl PublicKey {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        check_dim("public rows", self.params.k, self.g.rows())?;
        check_dim("public columns", self.params.big_n(), self.g.cols())?;
        if self.g.rank() != self.params.k {
            return Err(Error::Invariant("public matrix is not full rank"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivateKey {
    pub params: CodeParams,
    pub g_p: PolyGenMatrix,
    pub g_q: PolyGenMatrix,
    pub s: MatF2,
    pub s_inv: MatF2,
    pub perm: Permutation,
    pub mask_basis: MaskBasis,
    pub mask_matrix: MatF2,
}

impl PrivateKey {
    /// Builds a private key from explicit components, computing `S^-1` and
    /// checking every invariant.
    pub fn from_parts(
        params: CodeParams,
        g_p: PolyGenMatrix,
        g_q: PolyGenMatrix,
        s: MatF2,
        perm: Permutation,
        mask_basis: MaskBasis,
        mask_matrix: MatF2,
    ) -> Result<Self> {
        let (_, inv) = s.rank_invert()?;
        let s_inv = inv.ok_or(Error::Param("scrambler S is singular"))?;
        let key = Self {
            params,
            g_p,
            g_q,
            s,
            s_inv,
            perm,
            mask_basis,
            mask_matrix,
        };
        key.validate()?;
        Ok(key)
    }

    /// `G_PQ`, the scalar expansion of the composed code.
    pub fn g_pq(&self) -> Result<MatF2> {
        let composed = self.g_p.compose(&self.g_q)?;
        expand_scalar(&composed, self.params.k, self.params.p + self.params.q)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        p.validate()?;
        p.check_code(&self.g_p, &self.g_q)?;
        let (k, big_n) = (p.k, p.big_n());
        check_dim("S rows", k, self.s.rows())?;
        check_dim("S columns", k, self.s.cols())?;
        check_dim("S^-1 rows", k, self.s_inv.rows())?;
        check_dim("S^-1 columns", k, self.s_inv.cols())?;
        check_dim("permutation length", big_n, self.perm.len())?;
        check_dim("mask basis rank", p.l, self.mask_basis.rank())?;
        check_dim("mask basis length", big_n, self.mask_basis.vector_len())?;
        check_dim("mask rows", k, self.mask_matrix.rows())?;
        check_dim("mask columns", big_n, self.mask_matrix.cols())?;
        if self.s.mul(&self.s_inv)? != MatF2::identity(k) {
            return Err(Error::Invariant("S * S^-1 is not the identity"));
        }
        if !self.mask_matrix.row_iter().all(|r| self.mask_basis.contains(&r)) {
            return Err(Error::Invariant("mask row outside the span of the basis"));
        }
        if self.g_pq()?.add(&self.mask_matrix)?.rank() != k {
            return Err(Error::Invariant("masked generator matrix is not full rank"));
        }
        Ok(())
    }

    /// Recomputes `S (G_PQ + M) R`.
    pub fn rebuild_public(&self) -> Result<MatF2> {
        let masked = self.g_pq()?.add(&self.mask_matrix)?;
        self.perm.apply_columns(&self.s.mul(&masked)?)
    }

    pub fn public_key(&self) -> Result<PublicKey> {
        Ok(PublicKey {
            params: self.params.clone(),
            g: self.rebuild_public()?,
        })
    }
}

/// Fresh key pair. Draws, in order: mask basis, masking matrix, `S`, `R`.
pub fn keygen<R: Rng + ?Sized>(
    params: &CodeParams,
    g_p: &PolyGenMatrix,
    g_q: &PolyGenMatrix,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey)> {
    params.validate()?;
    params.check_code(g_p, g_q)?;
    let big_n = params.big_n();
    let g_pq = expand_scalar(&g_p.compose(g_q)?, params.k, params.p + params.q)?;
    let basis = MaskBasis::generate(big_n, params.l, rng)?;
    let mask = gen_mask_matrix(&basis, params.k, &g_pq, rng)?;
    let s = MatF2::random_nonsingular(params.k, rng);
    let perm = Permutation::random(big_n, rng);
    let (_, s_inv) = s.rank_invert()?;
    let s_inv = s_inv.ok_or(Error::Invariant("sampled S is singular"))?;
    let private = PrivateKey {
        params: params.clone(),
        g_p: g_p.clone(),
        g_q: g_q.clone(),
        s,
        s_inv,
        perm,
        mask_basis: basis,
        mask_matrix: mask,
    };
    let masked = g_pq.add(&private.mask_matrix)?;
    let g = private.perm.apply_columns(&private.s.mul(&masked)?)?;
    Ok((
        PublicKey {
            params: params.clone(),
            g,
        },
        private,
    ))
}
