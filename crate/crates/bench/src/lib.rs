//! Fixtures shared by the benchmarks.

use pgapolar::{
    build_mask, demap, encode, modulate, transmit, trial_rng, CodeSpec, FrozenMask, NoiseModel,
    PhiKind,
};

pub const DESIGN_EBN0_DB: f64 = 1.0;

pub fn half_rate(n: usize, method: PhiKind) -> CodeSpec {
    CodeSpec::with_design_ebn0(n, n / 2, DESIGN_EBN0_DB, method).expect("valid code")
}

pub fn half_rate_mask(n: usize) -> FrozenMask {
    build_mask(&half_rate(n, PhiKind::PgaClosedForm)).expect("valid code")
}

/// A message of alternating bits for `mask`.
pub fn message(mask: &FrozenMask) -> Vec<u8> {
    (0..mask.k()).map(|i| (i % 2) as u8).collect()
}

/// Channel LLRs for one noisy transmission of `message(mask)`.
pub fn noisy_llrs(mask: &FrozenMask, ebn0_db: f64, seed: u64) -> Vec<f64> {
    let x = encode(&message(mask), mask).expect("message fits mask");
    let rate = mask.k() as f64 / mask.n() as f64;
    let noise = NoiseModel::from_ebn0_db(ebn0_db, rate).expect("finite Eb/N0");
    let y = transmit(&modulate(&x), &noise, &mut trial_rng(seed, 0, 0));
    demap(&y, &noise)
}
