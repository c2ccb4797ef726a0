//! Bell inequalities built from sets of orthogonal product vectors.
//!
//! A set of product vectors ([`pvset`]) determines a Bell inequality
//! ([`bellgen`]) whose classical bound is the largest weight. The remaining
//! modules compute no-signalling maxima and facet certificates ([`nspoly`]),
//! quantum realizations and witness boxes ([`quantum`]), the
//! guess-your-neighbour's-input family ([`gyni`]) and extensions to more
//! parties ([`extend`]).

pub mod bellgen;
mod bits;
pub mod catalog;
#[cfg(feature = "cli")]
pub mod cli;
pub mod extend;
pub mod formats;
pub mod gyni;
pub mod nspoly;
pub mod pvset;
pub mod quantum;
pub mod rational;
