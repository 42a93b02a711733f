//! The reversible black-box group gate, the concrete groups behind it, and
//! brute-force classical group algorithms that run through the gate.

mod group;
mod label;
mod oracle;
mod slp;

pub use group::{min_width, ConcreteGroup, GroupKind, Labeling, Permutation};
pub use label::{Label, MAX_WIDTH};
pub use oracle::{GateIO, GroupOracle, QueryLog, QueryRecord, DEFAULT_CLOSURE_CAP};
pub use slp::{Instruction, Slp};
