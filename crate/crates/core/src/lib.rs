//! Counting and uniform sampling of representations `x'Qx ≡ t (mod p^k)`.
//!
//! The crate is `no_std` and only needs `alloc`. Everything operates on
//! arbitrary-precision integers from `num-bigint`:
//!
//! * [`modring`] – valuations, signs, Legendre symbols, digits and inverses
//!   over `Z/p^k`, plus the seedable [`RandomSource`].
//! * [`sqroots`] – square roots modulo `p`, `p^k` and `2^k`.
//! * [`blockdiag`] – `SL_n(Z/p^k)` reduction of a form to Type I / Type II blocks.
//! * [`symbols`] – `p^k`-symbols, class sizes and split sizes.
//! * [`counting`] – total / primitive / non-primitive counts, local densities,
//!   composite moduli.
//! * [`sampling`] – Las Vegas uniform samplers for every count above.
//! * [`oracle`] – brute-force enumeration and chi-square uniformity checks.
#![no_std]

extern crate alloc;

pub mod blockdiag;
pub mod counting;
mod error;
pub mod modring;
pub mod oracle;
pub mod sampling;
pub mod sqroots;
pub mod symbols;

pub use blockdiag::{Block, BlockDiagForm, Matrix, QuadraticForm};
pub use counting::{LocalDensity, RepCounts};
pub use error::{Error, Result};
pub use modring::{Order, PrimePower, RandomSource, RingElem, Valuation};
pub use sampling::{RepKind, SampleOutcome};
pub use symbols::PkSymbol;
