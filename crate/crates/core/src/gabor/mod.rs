//! Gabor analysis on the cyclic group `ℤ_N` (and `ℤ_N × ℤ_N` for symbols).
//!
//! Conventions: the unitary DFT `f̂(ξ) = N^{-1/2} Σ_x f(x) e^{-2πi xξ/N}`,
//! the STFT `V_φ f(m,n) = N^{-1/2} Σ_y f(y) conj φ(y-m) e^{-2πi yn/N}`, and
//! time-frequency shifts `π(j,ι) φ(x) = e^{2πi ιx/N} φ(x-j)`. With these,
//! `⟨D_φ c, f⟩ = √N ⟨c, C_φ f⟩`, the finite analogue of the `(2π)^{d/2}`
//! between synthesis and the adjoint of analysis.

pub(crate) mod fft;
mod grid;
mod modnorm;
mod system;

pub use grid::{
    centered, delta, gaussian, gaussian_atom, grid_spacing, hann, read_grid, read_grid_binary, read_grid_csv, tensor,
    write_grid, write_grid_binary, write_grid_csv, CyclicGridFunction, WindowSpec,
};
pub use modnorm::{
    check_stft_window_bound, lattice_coefficients, modulation_equivalence, modulation_norm, modulation_norm_lattice,
    modulation_norm_sampled, stft, EmpiricalConstant, Sampling, WindowBoundReport,
};
pub use system::{
    analysis, analysis_with, canonical_dual, canonical_dual_cg, frame_bounds, frame_operator, frame_operator_with,
    reconstruct, synthesis, synthesis_with, walnut_blocks, FrameBounds, GaborSystem, Reconstruction, WalnutBlocks,
    FRAME_FLOOR,
};
