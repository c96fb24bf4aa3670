//! Simulation of entanglement transfer from a two-mode continuous-variable
//! field to a pair of localized qubits.
//!
//! Each field mode couples to one two-level atom through an off-resonance
//! Jaynes-Cummings interaction. The field starts in a state that is Schmidt
//! diagonal in the joint Fock basis (a Bell-like two-state superposition, a
//! twin-beam state, or a pair-coherent state); after the interaction the
//! field is traced out and the entanglement left on the qubit pair is
//! quantified by the Peres-Horodecki criterion, Wootters concurrence and the
//! entanglement of formation.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`] — self-contained numerical substrate (modified Bessel
//!   functions, a small Hermitian eigensolver, PSD matrix square root,
//!   monotone bisection),
//! * [`cv_states`] — the field state families and their Fock expansions,
//! * [`jc`] — the exact off-resonance Jaynes-Cummings propagator,
//! * [`density`] — joint evolution, partial trace, and an independent
//!   closed-form route to the reduced two-qubit density matrix,
//! * [`entanglement`] — PPT eigenvalues, concurrence, entanglement of
//!   formation,
//! * [`experiments`] — scenario sweeps, peak refinement and CSV output,
//! * [`cli`] — the command-line front end.
//!
//! The `examples/` directory contains one runnable program per capability;
//! start with `cargo run --example bell_transfer`.

pub mod cli;
pub mod cv_states;
pub mod density;
pub mod entanglement;
pub mod experiments;
pub mod jc;
pub mod numerics;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("bracket [{lo}, {hi}] does not enclose target {target} (f(lo)={f_lo}, f(hi)={f_hi})")]
    Bracket {
        target: f64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("Fock truncation overflow: {required} levels needed, cap is {cap}")]
    TruncationOverflow { required: usize, cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
