//! Pseudo-differential operators on `ℤ_N`: quantizations, the calculus
//! transform between them, Wigner distributions, and the Gabor matrix of a
//! symbol.
//!
//! A symbol `a` on `ℤ_N × ℤ_N` is quantized by
//! `Op₀(a) f(x) = N^{-1} Σ_{y,ξ} a(x,ξ) f(y) e^{2πi (x-y)ξ/N}`, and general
//! `t` by `Op_t(a) = Op₀(e^{it⟨D_x,D_ξ⟩} a)`. Sampling a smooth continuum
//! symbol at `Δ = √(2π/N)` approximates the continuum operator.

mod checks;
mod gmatrix;
mod quant;
mod symbol;
mod wigner;

pub use checks::{
    check_op_continuity, check_op_schatten, check_wigner_convolution, check_wigner_modulation_bound, modulation_gram,
    op_weight_constant, weighted_schatten_norm, wigner_weight_constant, ConvolutionReport, OpContinuityReport,
    OpSchattenReport, WignerBoundReport, WignerExponents, CONVOLUTION_TOL,
};
pub use gmatrix::{
    check_factorization_identity, check_unorm_modnorm_equiv, gabor_matrix, symbol_modulation_norm, symbol_window,
    EquivalenceReport, FactorizationIdentityReport, PhaseSpaceSystem, EQUIVALENCE_SPREAD, FACTORIZATION_TOL,
};
pub use quant::{apply_operator, calculus_transform, op0, op_t};
pub use symbol::{
    read_symbol, read_symbol_binary, read_symbol_csv, write_symbol, write_symbol_binary, write_symbol_csv, Symbol,
};
pub use wigner::{rihaczek, rihaczek_window, symplectic_ft, wigner_t};
