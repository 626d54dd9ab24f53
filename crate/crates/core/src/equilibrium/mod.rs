//! Equilibrium predictions: the closed-form Strategic Claim profile and a
//! logit-QRE fixed-point solver for finite stage games.

pub mod qre;
pub mod sc_profile;

pub use qre::{logit, qre_fixed_point, Bimatrix, QreProfile, QreSettings, ScAgentForm, StageGame};
pub use sc_profile::{
    equilibrium_claim_profile, indifference_posterior, receiver_utilities, sc_bluff_prob,
    sc_conditional_bluff_rate, sc_expected_utilities, sc_posterior_bluff, threshold_challenge_freq,
    ClaimProfile,
    BLUFF_CLAIM, EQUILIBRIUM_THRESHOLD,
};
