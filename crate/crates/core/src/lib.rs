//! Exact, desk-scale simulation of the quantum double of S3.
//!
//! * [`algebra`]: the group S3, the eight anyons `A..H`, fusion rules.
//! * [`category`]: F and R symbols, consistency checks, interferometry
//!   amplitudes and an independent gauge-invariant oracle.
//! * [`fusion_sim`]: fusion-tree states and the remote measurements
//!   `M_A`, `M_U`, plus qutrit merge/split.
//! * [`lattice`]: the Kitaev lattice, ground state, ribbon operators and
//!   the all-site charge measurement `M_K`.
//! * [`protocols`]: pair creation, pair fusion and adaptive anyon movement.
//! * [`qec`]: syndrome patterns of edge errors and error-correction cycles.
//! * [`circuits`]: qutrit–qubit circuits for ribbons and `K` measurements,
//!   checked against operator-level channels.
//! * [`concat_code`]: CSS codes over F2/F3 and the fault-tolerant logical
//!   `CĈ` between a concatenated qubit code and a qutrit code.

pub mod algebra;
pub mod category;
pub mod circuits;
pub mod concat_code;
pub mod fusion_sim;
pub mod lattice;
pub mod protocols;
pub mod qec;
