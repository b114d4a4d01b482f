//! BPSK over AWGN.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real AWGN with variance `sigma2` per dimension, unit-energy symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    sigma2: f64,
}

impl NoiseModel {
    pub fn new(sigma2: f64) -> Result<Self> {
        if sigma2 > 0.0 && sigma2.is_finite() {
            Ok(NoiseModel { sigma2 })
        } else {
            Err(Error::domain("noise variance", sigma2))
        }
    }

    /// From a design SNR `E_dB`: `σ² = 1 / (2·10^(E_dB/10))`.
    pub fn from_design_snr_db(snr_db: f64) -> Result<Self> {
        Self::new(1.0 / (2.0 * 10f64.powf(snr_db / 10.0)))
    }

    /// From Eb/N0 in dB at code rate `rate`: `σ² = 1 / (2·R·10^(Eb/N0/10))`.
    pub fn from_ebn0_db(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::domain("code rate", rate));
        }
        Self::new(1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0)))
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// Mean of the demapped LLR for a transmitted 0, `2/σ²`.
    pub fn mean_llr(&self) -> f64 {
        2.0 / self.sigma2
    }
}

/// BPSK: 0 → +1, 1 → −1.
pub fn modulate(bits: &[u8]) -> Vec<f64> {
    let mut out = vec![0.0; bits.len()];
    modulate_into(bits, &mut out);
    out
}

pub fn modulate_into(bits: &[u8], out: &mut [f64]) {
    debug_assert_eq!(bits.len(), out.len());
    for (s, &b) in out.iter_mut().zip(bits) {
        *s = 1.0 - 2.0 * f64::from(b);
    }
}

/// Adds i.i.d. `N(0, σ²)` noise to a copy of `symbols`.
pub fn transmit<R: Rng + ?Sized>(symbols: &[f64], noise: &NoiseModel, rng: &mut R) -> Vec<f64> {
    let mut y = symbols.to_vec();
    add_noise(&mut y, noise, rng);
    y
}

pub fn add_noise<R: Rng + ?Sized>(symbols: &mut [f64], noise: &NoiseModel, rng: &mut R) {
    let sigma = noise.sigma();
    for s in symbols {
        let z: f64 = StandardNormal.sample(rng);
        *s += sigma * z;
    }
}

/// Channel LLRs `2y/σ²`.
pub fn demap(y: &[f64], noise: &NoiseModel) -> Vec<f64> {
    let mut out = y.to_vec();
    demap_in_place(&mut out, noise);
    out
}

pub fn demap_in_place(y: &mut [f64], noise: &NoiseModel) {
    let scale = 2.0 / noise.sigma2;
    for v in y {
        *v *= scale;
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random stream for one trial.
///
/// The ChaCha key is derived from `(master_seed, stream_key)` and the trial
/// index selects the ChaCha stream, so the draws of a trial depend only on
/// those three values, never on which worker runs it.
pub fn trial_rng(master_seed: u64, stream_key: u64, trial_index: u64) -> ChaCha8Rng {
    let mut key = stream_key;
    let mut state = master_seed ^ splitmix64(&mut key);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(trial_index);
    rng
}
