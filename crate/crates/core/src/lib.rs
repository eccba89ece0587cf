//! Multiply segmented constraint satisfaction.
//!
//! A [`MuseInstance`] packs many CSPs that share variables into one DAG:
//! every start-to-end path is a segment. The crate provides MUSE arc and
//! path consistency, merging of separate CSPs into a DAG, support-guided
//! solution extraction, and a constraint dependency grammar front end that
//! parses word lattices.

pub mod ac;
pub mod cdg;
pub mod combine;
pub mod csp;
pub mod error;
pub mod harness;
pub mod io;
pub mod oracle;
pub mod pc;
pub mod search;
mod sets;
pub mod muse;
pub mod worklist;

pub use ac::{muse_ac1, muse_ac1_with, propagate_from, Ac1Event, Ac1Options, Ac1Stats, SupportState};
pub use csp::{ac4, ac4_with, enforce_node_consistency, oracle_arc_fixpoint, CspInstance, Domain, Label, Node};
pub use error::{Error, Result};
pub use muse::{build_muse, enumerate_segments, Endpoint, MuseInstance, Segment};
pub use oracle::{oracle_muse_arc_fixpoint, oracle_muse_pair_fixpoint, oracle_muse_path_fixpoint};
pub use pc::{muse_ac_pc_fixpoint, muse_pc1, muse_pc1_with, muse_pc_ac_fixpoint, PathSupportState, Pc1Event, Pc1Options, Pc1Stats};
pub use search::{extract_all, extract_one, verify_solution, Assignment};
pub use worklist::Discipline;
