//! Absolute separability of quantum states and absolutely separating maps.
//!
//! State criteria work on spectra alone ([`state`]). Map criteria
//! ([`classify`]) bound the worst-case output spectrum of a channel family
//! ([`channel`]). When a map is not absolutely separating, [`witness`]
//! constructs an explicit input and unitary whose output has a negative
//! partial transpose.

pub mod channel;
pub mod classify;
pub mod error;
pub mod linalg;
pub mod mub;
pub mod partition;
pub mod spectrum;
pub mod state;
pub mod verdict;
pub mod witness;

pub use channel::{ChannelSpec, EntropyEstimate, Method, NormEstimate};
pub use classify::classify_channel;
pub use error::{Error, Result};
pub use linalg::{Matrix, Unitary, C64};
pub use mub::{mub_basis, weyl_operators, MubBasis};
pub use partition::{Bipartition, MultiPartition, Partition};
pub use spectrum::{majorizes, Spectrum};
pub use verdict::{Evidence, MapStatus, MapVerdict, Status, Verdict, BOUNDARY_TOL};
