pub mod combinatorics;
pub mod error;
pub mod linalg;
pub mod sparse;
pub mod hilbert;
pub mod moments;
pub mod io;
pub mod witness;
pub mod flat;
pub mod recover;
