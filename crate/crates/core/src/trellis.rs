//! Zero-terminated trellis of a rate-1/n feedforward code and hard-decision
//! Viterbi decoding over it.
//!
//! A state holds the last `p` input bits, most recent in bit 0. Feeding bit
//! `u` into state `s` forms the register `(s << 1) | u`; output `j` is the
//! parity of that register masked by the taps of `p_j(x)`.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::bits::{words_for, BitVec, WORD};
use crate::conv::{PolyGenMatrix, MAX_MEMORY};
use crate::error::{check_dim, Error, Result};

/// Memory cap for [`free_distance`].
pub const FREE_DISTANCE_MAX_MEMORY: usize = 16;
/// Weight at which [`free_distance`] gives up.
pub const FREE_DISTANCE_BUDGET: usize = 40;

const INF: u32 = u32::MAX / 2;

#[derive(Clone, Debug)]
pub struct Trellis {
    n: usize,
    memory: usize,
    info_len: usize,
    /// Output bits for each register value `(state << 1) | input`.
    outputs: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    /// Decoded information bits, tail removed.
    pub info: BitVec,
    pub codeword: BitVec,
    pub error_vector: BitVec,
    pub error_weight: usize,
}

fn hamming_metric(_: usize, r: u8, bm: &mut [u32]) {
    for (o, b) in bm.iter_mut().enumerate() {
        *b = (o as u8 ^ r).count_ones();
    }
}

fn output_table(polys: &PolyGenMatrix, memory: usize) -> Vec<u8> {
    let taps: Vec<u32> = polys
        .polys()
        .iter()
        .map(|p| p.exponents().iter().fold(0u32, |acc, &k| acc | 1 << k))
        .collect();
    (0..1u32 << (memory + 1))
        .map(|reg| {
            taps.iter()
                .enumerate()
                .fold(0u8, |acc, (j, &t)| acc | (((reg & t).count_ones() & 1) as u8) << j)
        })
        .collect()
}

impl Trellis {
    /// Trellis for `K` information bits followed by `p` forced zeros.
    pub fn build(polys: &PolyGenMatrix, info_len: usize) -> Result<Self> {
        let memory = polys.memory();
        if memory > MAX_MEMORY {
            return Err(Error::MemoryCap {
                memory,
                cap: MAX_MEMORY,
            });
        }
        if polys.n() > 8 {
            return Err(Error::Param("trellis supports at most 8 output streams"));
        }
        Ok(Self {
            n: polys.n(),
            memory,
            info_len,
            outputs: output_table(polys, memory),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn num_states(&self) -> usize {
        1 << self.memory
    }

    pub fn info_len(&self) -> usize {
        self.info_len
    }

    /// `K + p`.
    pub fn segments(&self) -> usize {
        self.info_len + self.memory
    }

    /// Tail segments accept only input 0.
    pub fn is_tail(&self, segment: usize) -> bool {
        segment >= self.info_len
    }

    /// Next state and the `n` output bits (bit `j` = stream `j`).
    pub fn transition(&self, state: usize, input: bool) -> (usize, u8) {
        let reg = (state << 1) | usize::from(input);
        (reg & (self.num_states() - 1), self.outputs[reg])
    }

    /// Runs the message and its zero tail through the shift register.
    pub fn encode(&self, info: &BitVec) -> Result<BitVec> {
        check_dim("trellis encode", self.info_len, info.len())?;
        let mut out = BitVec::zeros(self.n * self.segments());
        let mut state = 0;
        for t in 0..self.segments() {
            let u = t < self.info_len && info.get(t);
            let (next, bits) = self.transition(state, u);
            for j in 0..self.n {
                if (bits >> j) & 1 == 1 {
                    out.set(t * self.n + j, true);
                }
            }
            state = next;
        }
        Ok(out)
    }

    fn received_symbols(&self, received: &BitVec) -> Result<Vec<u8>> {
        check_dim("viterbi received length", self.n * self.segments(), received.len())?;
        let mut sym = vec![0u8; self.segments()];
        for i in received.ones_iter() {
            sym[i / self.n] |= 1 << (i % self.n);
        }
        Ok(sym)
    }

    /// Minimum-distance zero-tail path. Ties keep the predecessor with the
    /// lower state index.
    pub fn decode(&self, received: &BitVec) -> Result<DecodeResult> {
        let symbols = self.received_symbols(received)?;
        let info = if self.memory == 0 {
            self.decode_memoryless(&symbols)
        } else {
            self.decode_acs(&symbols, None, hamming_metric)
        };
        self.finish(info, received)
    }

    /// Minimum weighted-distance path, where a mismatch at received position
    /// `i` costs `weights[i]`. `error_weight` in the result is still the
    /// Hamming distance to the chosen codeword.
    pub fn decode_weighted(&self, received: &BitVec, weights: &[u32]) -> Result<DecodeResult> {
        let symbols = self.received_symbols(received)?;
        check_dim("viterbi weights", received.len(), weights.len())?;
        let n = self.n;
        let info = self.decode_acs(&symbols, None, |t, r, bm: &mut [u32]| {
            let w = &weights[t * n..(t + 1) * n];
            for (o, b) in bm.iter_mut().enumerate() {
                let diff = o as u8 ^ r;
                *b = (0..n).filter(|j| (diff >> j) & 1 == 1).map(|j| w[j]).sum();
            }
        });
        self.finish(info, received)
    }

    /// As [`Trellis::decode`], also returning the accumulated metric of the
    /// surviving path after each segment. Stores every state's metric, so
    /// meant for small trellises.
    pub fn decode_traced(&self, received: &BitVec) -> Result<(DecodeResult, Vec<u32>)> {
        let symbols = self.received_symbols(received)?;
        if self.memory == 0 {
            let info = self.decode_memoryless(&symbols);
            let res = self.finish(info, received)?;
            let mut acc = 0;
            let metrics = (0..self.segments())
                .map(|t| {
                    acc += res.error_vector.slice(t * self.n, self.n).weight() as u32;
                    acc
                })
                .collect();
            return Ok((res, metrics));
        }
        let mut history = Vec::with_capacity(self.segments());
        let info = self.decode_acs(&symbols, Some(&mut history), hamming_metric);
        // Walk the survivor forwards to read its metric at each step.
        let mut state = 0;
        let mut path = Vec::with_capacity(self.segments());
        for (t, h) in history.iter().enumerate() {
            let u = t < self.info_len && info.get(t);
            state = self.transition(state, u).0;
            path.push(h[state]);
        }
        Ok((self.finish(info, received)?, path))
    }

    /// Scores a given information word against `received`.
    pub fn evaluate(&self, info: BitVec, received: &BitVec) -> Result<DecodeResult> {
        check_dim("viterbi received length", self.n * self.segments(), received.len())?;
        self.finish(info, received)
    }

    fn finish(&self, info: BitVec, received: &BitVec) -> Result<DecodeResult> {
        let codeword = self.encode(&info)?;
        let error_vector = received.xor(&codeword)?;
        let error_weight = error_vector.weight();
        Ok(DecodeResult {
            info,
            codeword,
            error_vector,
            error_weight,
        })
    }

    fn decode_memoryless(&self, symbols: &[u8]) -> BitVec {
        let mut info = BitVec::zeros(self.info_len);
        for (t, &r) in symbols.iter().enumerate().take(self.info_len) {
            let d0 = (self.outputs[0] ^ r).count_ones();
            let d1 = (self.outputs[1] ^ r).count_ones();
            if d1 < d0 {
                info.set(t, true);
            }
        }
        info
    }

    fn decode_acs<F>(&self, symbols: &[u8], mut history: Option<&mut Vec<Vec<u32>>>, branch: F) -> BitVec
    where
        F: Fn(usize, u8, &mut [u32]),
    {
        let states = self.num_states();
        let half = states / 2;
        let stride = words_for(states);
        let segments = self.segments();
        let mut decisions = vec![0u64; stride * segments];
        let mut metric = vec![INF; states];
        let mut next = vec![0u32; states];
        metric[0] = 0;
        let mut bm = [0u32; 256];
        let outs = &self.outputs;

        for (t, &r) in symbols.iter().enumerate() {
            branch(t, r, &mut bm[..1 << self.n]);
            let row = &mut decisions[t * stride..(t + 1) * stride];
            let tail = self.is_tail(t);
            for i in 0..half {
                let a = metric[i];
                let b = metric[i + half];
                let mut bits = 0u64;
                for u in 0..2 {
                    let ns = 2 * i + u;
                    if tail && u == 1 {
                        next[ns] = INF;
                        continue;
                    }
                    let m0 = a + bm[outs[ns] as usize];
                    let m1 = b + bm[outs[ns | states] as usize];
                    if m1 < m0 {
                        next[ns] = m1;
                        bits |= 1 << u;
                    } else {
                        next[ns] = m0;
                    }
                }
                if bits != 0 {
                    let ns = 2 * i;
                    row[ns / WORD] |= bits << (ns % WORD);
                }
            }
            core::mem::swap(&mut metric, &mut next);
            if let Some(h) = history.as_deref_mut() {
                h.push(metric.clone());
            }
        }

        let mut info = BitVec::zeros(self.info_len);
        let mut state = 0usize;
        for t in (0..segments).rev() {
            let u = state & 1;
            if t < self.info_len && u == 1 {
                info.set(t, true);
            }
            let d = (decisions[t * stride + state / WORD] >> (state % WORD)) & 1;
            state = (state >> 1) | ((d as usize) << (self.memory - 1));
        }
        debug_assert_eq!(state, 0);
        info
    }
}

/// Minimum weight of a nonzero path that leaves the zero state and returns
/// to it. By linearity this is the minimum distance between any two paths
/// that diverge and remerge.
pub fn free_distance(polys: &PolyGenMatrix) -> Result<usize> {
    let memory = polys.memory();
    if memory > FREE_DISTANCE_MAX_MEMORY {
        return Err(Error::MemoryCap {
            memory,
            cap: FREE_DISTANCE_MAX_MEMORY,
        });
    }
    let outputs = output_table(polys, memory);
    let mask = (1usize << memory) - 1;
    let w = |reg: usize| outputs[reg].count_ones() as usize;

    // The first branch must carry input 1.
    let start = 1 & mask;
    let w0 = w(1);
    if memory == 0 {
        return if w0 <= FREE_DISTANCE_BUDGET {
            Ok(w0)
        } else {
            Err(Error::SearchBudget(FREE_DISTANCE_BUDGET))
        };
    }
    let mut dist = vec![usize::MAX; mask + 1];
    let mut heap = BinaryHeap::new();
    dist[start] = w0;
    heap.push(Reverse((w0, start)));
    let mut best = usize::MAX;
    while let Some(Reverse((d, s))) = heap.pop() {
        if d >= best || d > FREE_DISTANCE_BUDGET {
            break;
        }
        if d > dist[s] {
            continue;
        }
        for u in 0..2 {
            let reg = (s << 1) | u;
            let ns = reg & mask;
            let nd = d + w(reg);
            if ns == 0 {
                best = best.min(nd);
            } else if nd < dist[ns] {
                dist[ns] = nd;
                heap.push(Reverse((nd, ns)));
            }
        }
    }
    if best <= FREE_DISTANCE_BUDGET {
        Ok(best)
    } else {
        Err(Error::SearchBudget(FREE_DISTANCE_BUDGET))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conv::encode_streams;
    use alloc::string::ToString;

    fn example_code() -> PolyGenMatrix {
        PolyGenMatrix::from_exponents(&[&[0, 2], &[0, 1, 2]]).unwrap()
    }

    #[test]
    fn four_state_trellis() {
        let t = Trellis::build(&example_code(), 6).unwrap();
        assert_eq!(t.num_states(), 4);
        assert_eq!(t.segments(), 8);
        let m = BitVec::parse01("111001").unwrap();
        assert_eq!(t.encode(&m).unwrap(), encode_streams(&m, &example_code(), 2).unwrap());
    }

    #[test]
    fn memoryless_repetition() {
        let g = PolyGenMatrix::from_exponents(&[&[0], &[0]]).unwrap();
        let t = Trellis::build(&g, 4).unwrap();
        assert_eq!(t.num_states(), 1);
        let r = BitVec::parse01("11 10 00 11").unwrap();
        let d = t.decode(&r).unwrap();
        assert_eq!(d.info.to_string(), "1001");
        assert_eq!(d.error_weight, 1);
        assert_eq!(free_distance(&g).unwrap(), 2);
    }

    #[test]
    fn clean_codeword_decodes_exactly() {
        let t = Trellis::build(&example_code(), 6).unwrap();
        let m = BitVec::parse01("101101").unwrap();
        let d = t.decode(&t.encode(&m).unwrap()).unwrap();
        assert_eq!(d.info, m);
        assert_eq!(d.error_weight, 0);
    }

    #[test]
    fn length_and_cap_errors() {
        let t = Trellis::build(&example_code(), 6).unwrap();
        assert!(t.decode(&BitVec::zeros(15)).is_err());
        let big = PolyGenMatrix::from_exponents(&[&[0, 17], &[0]]).unwrap();
        assert!(matches!(Trellis::build(&big, 4), Err(Error::MemoryCap { .. })));
        let p17 = PolyGenMatrix::from_exponents(&[&[0, 17], &[0, 1, 17]]).unwrap();
        assert!(matches!(free_distance(&p17), Err(Error::MemoryCap { .. })));
    }

    #[test]
    fn free_distance_small_codes() {
        assert_eq!(free_distance(&example_code()).unwrap(), 5);
        let k7 = PolyGenMatrix::from_octal(&["133", "171"]).unwrap();
        assert_eq!(free_distance(&k7).unwrap(), 10);
    }
}
