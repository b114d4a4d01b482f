//! Polar code construction by Gaussian approximation, with a piecewise
//! variant of the GA nonlinearity, plus the encode / SC-decode / AWGN chain
//! needed to compare constructions by simulation.
//!
//! ```
//! use pgapolar::{build_mask, encode, sc_decode, CodeSpec, PhiKind};
//!
//! let spec = CodeSpec::with_design_ebn0(64, 32, 1.0, PhiKind::PgaClosedForm).unwrap();
//! let mask = build_mask(&spec).unwrap();
//! let msg = vec![1u8; 32];
//! let x = encode(&msg, &mask).unwrap();
//! let llrs: Vec<f64> = x.iter().map(|&b| if b == 0 { 10.0 } else { -10.0 }).collect();
//! assert_eq!(sc_decode(&llrs, &mask).unwrap().0, msg);
//! ```

pub mod channel;
pub mod codec;
pub mod construction;
pub mod error;
pub mod gamath;
pub mod simulation;

pub use channel::{demap, modulate, transmit, trial_rng, NoiseModel};
pub use codec::{encode, f_llr, g_llr, polar_transform_in_place, sc_decode, ScDecoder};
pub use construction::{
    build_mask, compare_constructions, construct, construct_with, evolve_pair, frozen_mask,
    CodeSpec, FrozenMask, ReliabilityProfile,
};
pub use error::{Error, Result};
pub use gamath::{
    phi_exact, phi_ga_closed, phi_inverse, phi_p_closed, phi_p_exact, BisectionSpec, PgaConstants,
    Phi, PhiKind, QuadratureSpec,
};
pub use simulation::{
    run_campaign, run_campaign_with, run_point, run_trial, CampaignResult, CampaignSpec,
    CodeContext, FerStats,
};
