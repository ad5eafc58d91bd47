//! Lifshitz energy and torque between two conducting sheets.
//!
//! ```text
//! E = k_BT Σ'_n ∫ d²k⊥/(2π)² ln det(1 - e^{-2Dq} R₀ R_φ)
//! 𝒯 = k_BT Σ'_n ∫ d²k⊥/(2π)² tr[(e^{2Dq} - R₀R_φ)^{-1} R₀ dR_φ/dφ]
//! ```
//!
//! with `q = √(κ_n² + k⊥²)`, so that `𝒯 = -∂E/∂φ`. Both reflection
//! matrices are written in film-1 axes; film 2 is rotated by `φ` and sees
//! the momentum `|k⊥ sin(θ + φ)|` along its tubes.

mod evaluator;
mod fresnel;

pub use evaluator::{
    casimir_energy, casimir_torque, CasimirPoint, CasimirResult, Evaluation, FilmPair,
    FresnelFrame, LifshitzOptions, Mode, ZeroFrequencyBranch, ZeroFrequencyReport,
};
pub use fresnel::{
    energy_integrand, fresnel_matrix, fresnel_n0_limit, lambda, reflection_derivative, Mat2,
    ReflectionMatrix, WaveVector,
};
