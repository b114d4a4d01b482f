//! Polar encoder and successive-cancellation decoder.
//!
//! Bits are `u8` values in `{0, 1}`. LLRs follow the convention
//! `ln(P(bit = 0) / P(bit = 1))`, so a positive LLR favours 0.

use crate::construction::FrozenMask;
use crate::error::{Error, Result};

/// Applies `x = u·F^{⊗n}` over GF(2) in place.
///
/// Only the length is checked (power of two); entries are assumed binary.
pub fn polar_transform_in_place(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in bits.chunks_exact_mut(2 * half) {
            let (left, right) = block.split_at_mut(half);
            for (l, r) in left.iter_mut().zip(right.iter()) {
                *l ^= *r;
            }
        }
        half *= 2;
    }
}

fn check_binary(what: &'static str, bits: &[u8]) -> Result<()> {
    match bits.iter().find(|&&b| b > 1) {
        Some(&b) => Err(Error::domain(what, b as f64)),
        None => Ok(()),
    }
}

/// Places `msg` on the information positions and zeros on the frozen ones.
pub fn assemble_input(msg: &[u8], mask: &FrozenMask) -> Result<Vec<u8>> {
    assemble_input_with_frozen(msg, mask, &vec![0; mask.frozen().len()])
}

/// Like [`assemble_input`], with explicit frozen values (in ascending
/// frozen-index order).
pub fn assemble_input_with_frozen(
    msg: &[u8],
    mask: &FrozenMask,
    frozen_values: &[u8],
) -> Result<Vec<u8>> {
    if msg.len() != mask.k() {
        return Err(Error::SizeMismatch {
            what: "message length",
            expected: mask.k(),
            actual: msg.len(),
        });
    }
    if frozen_values.len() != mask.frozen().len() {
        return Err(Error::SizeMismatch {
            what: "frozen value count",
            expected: mask.frozen().len(),
            actual: frozen_values.len(),
        });
    }
    check_binary("message bit", msg)?;
    check_binary("frozen bit", frozen_values)?;
    let mut u = vec![0u8; mask.n()];
    for (&i, &b) in mask.info().iter().zip(msg) {
        u[i] = b;
    }
    for (&i, &b) in mask.frozen().iter().zip(frozen_values) {
        u[i] = b;
    }
    Ok(u)
}

/// Encodes `msg` with zero frozen bits.
pub fn encode(msg: &[u8], mask: &FrozenMask) -> Result<Vec<u8>> {
    let mut x = assemble_input(msg, mask)?;
    polar_transform_in_place(&mut x);
    Ok(x)
}

/// Check-node update in the LLR domain: `2·atanh(tanh(a/2)·tanh(b/2))`.
///
/// Evaluated as `sign(a)·sign(b)·min(|a|,|b|) + ln(1+e^{−|a+b|}) − ln(1+e^{−|a−b|})`,
/// which is exact and does not overflow.
#[inline]
pub fn f_llr(a: f64, b: f64) -> f64 {
    if a.is_infinite() && b.is_infinite() {
        return if (a > 0.0) == (b > 0.0) {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
    }
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let min = a.abs().min(b.abs());
    let correction = (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p();
    sign * min + correction
}

/// Variable-node update in the LLR domain: `b + (1 − 2u)·a`.
#[inline]
pub fn g_llr(a: f64, b: f64, u: u8) -> f64 {
    if u == 0 {
        b + a
    } else {
        b - a
    }
}

/// Hard decision; an LLR of exactly zero decides 0.
#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    (llr < 0.0) as u8
}

/// Reusable successive-cancellation decoder workspace for one block length.
///
/// The node of size `s` reads its input LLRs from `llr[s..2s]` and leaves its
/// re-encoded partial sums in `bits[s..2s]`, so both buffers have length `2N`.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    n: usize,
    llr: Vec<f64>,
    bits: Vec<u8>,
    u_hat: Vec<u8>,
}

impl ScDecoder {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::InvalidSpec(format!(
                "N must be a power of two (got {n})"
            )));
        }
        Ok(ScDecoder {
            n,
            llr: vec![0.0; 2 * n],
            bits: vec![0; 2 * n],
            u_hat: vec![0; n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Decodes with zero frozen bits and returns the estimated `u`.
    pub fn decode(&mut self, llrs: &[f64], mask: &FrozenMask) -> Result<&[u8]> {
        self.decode_with_frozen(llrs, mask, None)
    }

    /// Decodes with the given frozen values (ascending frozen-index order);
    /// `None` means all zeros.
    pub fn decode_with_frozen(
        &mut self,
        llrs: &[f64],
        mask: &FrozenMask,
        frozen_values: Option<&[u8]>,
    ) -> Result<&[u8]> {
        if llrs.len() != self.n {
            return Err(Error::SizeMismatch {
                what: "LLR vector length",
                expected: self.n,
                actual: llrs.len(),
            });
        }
        if mask.n() != self.n {
            return Err(Error::SizeMismatch {
                what: "frozen mask length",
                expected: self.n,
                actual: mask.n(),
            });
        }
        // Frozen value by index: zero unless overridden.
        self.u_hat.fill(0);
        if let Some(values) = frozen_values {
            if values.len() != mask.frozen().len() {
                return Err(Error::SizeMismatch {
                    what: "frozen value count",
                    expected: mask.frozen().len(),
                    actual: values.len(),
                });
            }
            check_binary("frozen bit", values)?;
            for (&i, &v) in mask.frozen().iter().zip(values) {
                self.u_hat[i] = v;
            }
        }
        self.llr[self.n..].copy_from_slice(llrs);
        self.node(self.n, 0, mask.frozen_flags());
        Ok(&self.u_hat)
    }

    fn node(&mut self, size: usize, first: usize, frozen: &[bool]) {
        if size == 1 {
            let bit = if frozen[first] {
                self.u_hat[first]
            } else {
                hard_decision(self.llr[1])
            };
            self.u_hat[first] = bit;
            self.bits[1] = bit;
            return;
        }
        let h = size / 2;
        {
            let (low, high) = self.llr.split_at_mut(size);
            let input = &high[..size];
            for (i, out) in low[h..].iter_mut().enumerate() {
                *out = f_llr(input[i], input[h + i]);
            }
        }
        self.node(h, first, frozen);
        self.bits.copy_within(h..size, size);
        {
            let (low, high) = self.llr.split_at_mut(size);
            let input = &high[..size];
            let left = &self.bits[size..size + h];
            for (i, out) in low[h..].iter_mut().enumerate() {
                *out = g_llr(input[i], input[h + i], left[i]);
            }
        }
        self.node(h, first + h, frozen);
        let (low, high) = self.bits.split_at_mut(size);
        let right = &low[h..size];
        for i in 0..h {
            high[i] ^= right[i];
            high[h + i] = right[i];
        }
    }
}

/// Decodes one block and returns `(message, u_hat)`.
pub fn sc_decode(llrs: &[f64], mask: &FrozenMask) -> Result<(Vec<u8>, Vec<u8>)> {
    let mut decoder = ScDecoder::new(mask.n())?;
    let u_hat = decoder.decode(llrs, mask)?.to_vec();
    let msg = mask.info().iter().map(|&i| u_hat[i]).collect();
    Ok((msg, u_hat))
}
