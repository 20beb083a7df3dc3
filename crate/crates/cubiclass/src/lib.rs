//! Classification engine for totally real cubic number fields.
//!
//! The crate enumerates all totally real cubic fields with discriminant in a
//! range, groups them into multiplets governed by 3-ring class fields over
//! their real quadratic resolvents, predicts multiplicities independently from
//! 3-Selmer / ring-space data, and assigns each non-Galois field one of nine
//! differential principal factorization (DPF) types
//! α₁, α₂, α₃, β₁, β₂, γ, δ₁, δ₂, ε.
//!
//! Module map:
//!
//! * [`arith`] — exact integer primitives (factorization, Kronecker symbols,
//!   fundamental discriminants).
//! * [`quadfield`] — real quadratic resolvents: fundamental unit, narrow and
//!   wide class groups, 3-rank, 3-virtual units.
//! * [`admissibility`] — 3-admissible conductors and the splitting
//!   `d_L = f²·d` of cubic discriminants.
//! * [`ringspace`] — 3-ring spaces, defects δ(f), ring class ranks ρ_f, and
//!   multiplicity prediction.
//! * [`cubicenum`] — enumeration of reduced binary cubic forms with the
//!   Davenport–Heilbronn maximality sieve; multiplet grouping.
//! * [`cubicinv`] — per-field invariants: maximal order, units, class group,
//!   absolute principal factors.
//! * [`sextic`] — the normal closure N = L·K: subfield-unit index 3^E, unit
//!   norm index 3^U, capitulation, and the final DPF type.
//! * [`report`] — range reports, table verification against the embedded
//!   expected dataset, statistics, CLI plumbing.

pub mod arith;
pub mod bigfloat;
pub mod lattice;
pub mod quadfield;
pub mod admissibility;
pub mod ringspace;
pub mod cubicenum;
pub mod order;
pub mod cubicinv;
pub mod sextic;
pub mod report;

mod parallel;

pub use parallel::Parallelism;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("magnitude overflow: {0}")]
    Overflow(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("precision ceiling reached: {0}")]
    PrecisionExhausted(String),
    #[error("internal consistency alarm: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
