//! Finite probability tables and information measures.

pub mod info;
pub mod kaspi;
pub mod pmf;
pub mod text;

pub use info::{check_markov_chain, conditional_mutual_information, entropy, mutual_information};
pub use kaspi::{kaspi_leaky_reply_check, kaspi_lemma_check, KaspiReport};
pub use pmf::{CondPmf, DeterministicMap, JointPmf, MAX_ENTRIES, NORMALIZATION_TOL};
pub use text::{parse_sections, Section};
