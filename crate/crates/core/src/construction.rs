//! Code construction: mean-LLR evolution, reliability ranking and frozen sets.
//!
//! Subchannels are indexed in the order of the encoder's input `u` for
//! `G_N = F^{⊗n}` (no bit-reversal in the encoder). The most significant index
//! bit selects the first split of the physical channel: `i < N/2` lives on
//! the check-node ("minus") channel and `i ≥ N/2` on the variable-node
//! ("plus") channel.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamath::{BisectionSpec, Phi, PhiKind};

/// Code parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    /// Block length N, a power of two.
    pub n_bits: usize,
    /// Information length K, `0 < K ≤ N`.
    pub k_bits: usize,
    /// Design SNR `E_dB = 10·log10(R·Eb/N0)` in dB.
    pub design_snr_db: f64,
    pub method: PhiKind,
}

impl CodeSpec {
    pub fn new(n_bits: usize, k_bits: usize, design_snr_db: f64, method: PhiKind) -> Result<Self> {
        let spec = CodeSpec {
            n_bits,
            k_bits,
            design_snr_db,
            method,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a spec whose design point is given as Eb/N0 in dB; the stored
    /// design SNR is `ebn0_db + 10·log10(K/N)`.
    pub fn with_design_ebn0(
        n_bits: usize,
        k_bits: usize,
        ebn0_db: f64,
        method: PhiKind,
    ) -> Result<Self> {
        if n_bits == 0 || k_bits == 0 {
            return Self::new(n_bits, k_bits, ebn0_db, method);
        }
        let rate = k_bits as f64 / n_bits as f64;
        Self::new(n_bits, k_bits, ebn0_db + 10.0 * rate.log10(), method)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n_bits.is_power_of_two() {
            return Err(Error::InvalidSpec(format!(
                "N must be a power of two (got {})",
                self.n_bits
            )));
        }
        if self.k_bits == 0 || self.k_bits > self.n_bits {
            return Err(Error::InvalidSpec(format!(
                "K must satisfy 0 < K <= N (got K = {}, N = {})",
                self.k_bits, self.n_bits
            )));
        }
        if !self.design_snr_db.is_finite() {
            return Err(Error::InvalidSpec("design SNR must be finite".into()));
        }
        Ok(())
    }

    pub fn rate(&self) -> f64 {
        self.k_bits as f64 / self.n_bits as f64
    }

    /// `n = log2 N`.
    pub fn stages(&self) -> u32 {
        self.n_bits.trailing_zeros()
    }

    /// Mean LLR of the physical channel, `4·10^(E_dB/10)` (= 2/σ²).
    pub fn channel_mean_llr(&self) -> f64 {
        4.0 * 10f64.powf(self.design_snr_db / 10.0)
    }
}

/// Per-subchannel mean LLRs and their ascending reliability order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityProfile {
    mean_llrs: Vec<f64>,
    order: Vec<usize>,
}

impl ReliabilityProfile {
    /// Wraps a mean-LLR vector, sorting indices by ascending mean with ties
    /// broken by ascending index.
    pub fn from_mean_llrs(mean_llrs: Vec<f64>) -> Result<Self> {
        if !mean_llrs.len().is_power_of_two() {
            return Err(Error::InvalidSpec(format!(
                "profile length must be a power of two (got {})",
                mean_llrs.len()
            )));
        }
        if let Some(&bad) = mean_llrs.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain("mean LLR", bad));
        }
        let mut order: Vec<usize> = (0..mean_llrs.len()).collect();
        // sort_by is stable, so equal means keep ascending index order.
        order.sort_by(|&a, &b| mean_llrs[a].total_cmp(&mean_llrs[b]));
        Ok(ReliabilityProfile { mean_llrs, order })
    }

    pub fn len(&self) -> usize {
        self.mean_llrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_llrs.is_empty()
    }

    pub fn mean_llrs(&self) -> &[f64] {
        &self.mean_llrs
    }

    /// Indices from least to most reliable.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `ranks()[i]` is the position of subchannel `i` in [`order`](Self::order).
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.len()];
        for (rank, &idx) in self.order.iter().enumerate() {
            ranks[idx] = rank;
        }
        ranks
    }

    /// Writes `index,mean_llr,rank` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,mean_llr,rank")?;
        for (i, (m, r)) in self.mean_llrs.iter().zip(self.ranks()).enumerate() {
            writeln!(out, "{i},{m},{r}")?;
        }
        Ok(())
    }

    /// Reads the CSV written by [`write_csv`](Self::write_csv). Lines starting
    /// with `#` are skipped. The rank column is recomputed, not trusted.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut rows = Vec::new();
        let mut saw_header = false;
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != "index,mean_llr,rank" {
                    return Err(Error::Parse(format!("unexpected profile header '{line}'")));
                }
                saw_header = true;
                continue;
            }
            let mut fields = line.split(',');
            let (Some(i), Some(m)) = (fields.next(), fields.next()) else {
                return Err(Error::Parse(format!("short profile row '{line}'")));
            };
            let i: usize = i
                .parse()
                .map_err(|_| Error::Parse(format!("bad index '{i}'")))?;
            let m: f64 = m
                .parse()
                .map_err(|_| Error::Parse(format!("bad mean_llr '{m}'")))?;
            if i != rows.len() {
                return Err(Error::Parse(format!(
                    "profile rows out of order at index {i}"
                )));
            }
            rows.push(m);
        }
        Self::from_mean_llrs(rows)
    }
}

/// Frozen set `A^c` and information set `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrozenMask {
    frozen: Vec<usize>,
    info: Vec<usize>,
    is_frozen: Vec<bool>,
}

impl FrozenMask {
    /// Builds a mask of length `n` from any collection of frozen indices.
    pub fn from_frozen(n: usize, frozen: impl IntoIterator<Item = usize>) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::InvalidSpec(format!(
                "N must be a power of two (got {n})"
            )));
        }
        let mut is_frozen = vec![false; n];
        for i in frozen {
            if i >= n {
                return Err(Error::InvalidSpec(format!(
                    "frozen index {i} out of range for N = {n}"
                )));
            }
            if is_frozen[i] {
                return Err(Error::InvalidSpec(format!("duplicate frozen index {i}")));
            }
            is_frozen[i] = true;
        }
        let frozen = (0..n).filter(|&i| is_frozen[i]).collect();
        let info = (0..n).filter(|&i| !is_frozen[i]).collect();
        Ok(FrozenMask {
            frozen,
            info,
            is_frozen,
        })
    }

    pub fn n(&self) -> usize {
        self.is_frozen.len()
    }

    pub fn k(&self) -> usize {
        self.info.len()
    }

    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    pub fn info(&self) -> &[usize] {
        &self.info
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.is_frozen[i]
    }

    pub(crate) fn frozen_flags(&self) -> &[bool] {
        &self.is_frozen
    }

    /// Number of information positions of `self` that `other` freezes,
    /// i.e. `|A_self \ A_other|`.
    pub fn swapped_count(&self, other: &FrozenMask) -> Result<usize> {
        self.check_comparable(other)?;
        Ok(self.info.iter().filter(|&&i| other.is_frozen[i]).count())
    }

    /// Information positions only in `self` and only in `other`.
    pub fn info_difference(&self, other: &FrozenMask) -> Result<(Vec<usize>, Vec<usize>)> {
        self.check_comparable(other)?;
        let only_self = self
            .info
            .iter()
            .copied()
            .filter(|&i| other.is_frozen[i])
            .collect();
        let only_other = other
            .info
            .iter()
            .copied()
            .filter(|&i| self.is_frozen[i])
            .collect();
        Ok((only_self, only_other))
    }

    fn check_comparable(&self, other: &FrozenMask) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch {
                what: "code length N",
                expected: self.n(),
                actual: other.n(),
            });
        }
        if self.k() != other.k() {
            return Err(Error::SizeMismatch {
                what: "information length K",
                expected: self.k(),
                actual: other.k(),
            });
        }
        Ok(())
    }

    /// Writes the frozen indices, one per line, ascending.
    pub fn write_frozen<W: Write>(&self, mut out: W) -> Result<()> {
        for i in &self.frozen {
            writeln!(out, "{i}")?;
        }
        Ok(())
    }

    /// Reads a newline-delimited frozen set. Blank lines and `#` comments are
    /// ignored; indices must be ascending.
    pub fn read_frozen<R: BufRead>(n: usize, input: R) -> Result<Self> {
        Self::from_frozen(n, read_frozen_indices(input)?)
    }
}

/// Parses a frozen-set file without knowing N.
pub fn read_frozen_indices<R: BufRead>(input: R) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let i: usize = line
            .parse()
            .map_err(|_| Error::Parse(format!("bad frozen index '{line}'")))?;
        if out.last().is_some_and(|&prev| prev >= i) {
            return Err(Error::Parse(format!(
                "frozen indices must be strictly ascending ({i} after {})",
                out[out.len() - 1]
            )));
        }
        out.push(i);
    }
    Ok(out)
}

/// `|A_a \ A_b|` for two frozen index sets of equal size, without needing N.
pub fn swapped_count_of_frozen_sets(a: &[usize], b: &[usize]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            what: "frozen set size",
            expected: a.len(),
            actual: b.len(),
        });
    }
    let b: BTreeSet<usize> = b.iter().copied().collect();
    Ok(a.iter().filter(|i| !b.contains(i)).count())
}

/// One polarization step of the mean LLR `w`: the check-node ("odd") child
/// `φ⁻¹(1 − (1 − φ(w))²)` and the variable-node ("even") child `2w`.
pub fn evolve_pair(w: f64, phi: &Phi, bisection: &BisectionSpec) -> Result<(f64, f64)> {
    let p = phi.eval(w)?;
    // 1 − (1 − p)² rearranged; the literal form rounds to zero once p < 1e-16.
    let target = (p * (2.0 - p)).clamp(0.0, 1.0);
    let odd = phi.inverse(target, bisection)?;
    Ok((odd, 2.0 * w))
}

/// Runs the mean-LLR recursion for `spec` with default φ settings.
pub fn construct(spec: &CodeSpec) -> Result<ReliabilityProfile> {
    construct_with(spec, &Phi::new(spec.method), &BisectionSpec::default())
}

/// Runs the mean-LLR recursion with an explicit φ and bisection setup.
///
/// `spec.method` is ignored in favour of `phi`.
pub fn construct_with(
    spec: &CodeSpec,
    phi: &Phi,
    bisection: &BisectionSpec,
) -> Result<ReliabilityProfile> {
    spec.validate()?;
    bisection.validate()?;
    let n = spec.n_bits;
    let mut w = vec![0.0; n];
    w[0] = spec.channel_mean_llr();
    let mut half = 1;
    while half < n {
        for j in 0..half {
            let (odd, even) = evolve_pair(w[j], phi, bisection)?;
            w[j] = odd;
            w[half + j] = even;
        }
        half *= 2;
    }
    // The in-place schedule puts the first split on the least significant
    // bit of the array position; the encoder has it on the most significant.
    let bits = spec.stages();
    let natural = (0..n).map(|i| w[bit_reverse(i, bits)]).collect();
    ReliabilityProfile::from_mean_llrs(natural)
}

/// Reverses the low `bits` bits of `i`.
pub fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Freezes the `N − K` least reliable subchannels.
pub fn frozen_mask(profile: &ReliabilityProfile, k_bits: usize) -> Result<FrozenMask> {
    let n = profile.len();
    if k_bits > n {
        return Err(Error::InvalidSpec(format!("K = {k_bits} exceeds N = {n}")));
    }
    FrozenMask::from_frozen(n, profile.order()[..n - k_bits].iter().copied())
}

/// Constructs the frozen mask for a spec.
pub fn build_mask(spec: &CodeSpec) -> Result<FrozenMask> {
    frozen_mask(&construct(spec)?, spec.k_bits)
}

/// Number of subchannels chosen for information by `a` but frozen by `b`.
pub fn compare_constructions(a: &CodeSpec, b: &CodeSpec) -> Result<usize> {
    if a.n_bits != b.n_bits || a.k_bits != b.k_bits {
        return Err(Error::InvalidSpec(format!(
            "cannot compare codes ({}, {}) and ({}, {})",
            a.n_bits, a.k_bits, b.n_bits, b.k_bits
        )));
    }
    build_mask(a)?.swapped_count(&build_mask(b)?)
}
