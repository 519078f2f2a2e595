//! Random-binning simulator for the cascade scheme at finite blocklength.
//!
//! Node 0 covers `(x, y)` with a codeword `u(L)` and sends the bin of `L` in
//! a first partition together with an `X1` index. Node 1 decodes `L` inside
//! the bin using `y`, reconstructs, and forwards the bin of its estimate in a
//! second partition. Node 2 decodes inside that bin using `z` and applies
//! `g2` symbolwise.

pub mod code;
pub mod nodes;
pub mod run;
pub mod typical;

pub use code::{build_cascade_code, scheme_rates, CascadeCode, CodeSizes, SchemeRates, MAX_CODEWORDS};
pub use nodes::{decode_node2, encode_node0, relay_node1, Node0Output, Node1Output, Node2Output};
pub use run::{run_simulation, run_trial, Estimate, SimResult, TrialOutcome, EVENT_NAMES};
pub use typical::{TypicalSet, TypicalityParams};
