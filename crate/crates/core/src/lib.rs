//! Quantitative analysis of FRAM (Functional Resonance Analysis Method) models.
//!
//! A FRAM model is a set of functions coupled by qualified relationships. This
//! crate encodes such a model as a bipartite weighted digraph and ranks nodes
//! by degree prestige ([`graph`]), measures how performance variability
//! propagates between coupled functions ([`variability`]), aggregates expert
//! valuations through a fuzzy notion of majority ([`fuzzy`]) and compares
//! deployment scenarios built on those aggregates ([`scenario`]).
//!
//! File formats, report rendering and the chord diagram export live in [`io`],
//! [`report`] and [`chord`]; the `fram` binary wires them into a CLI.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chord;
pub mod cli;
pub mod fuzzy;
pub mod graph;
pub mod io;
pub mod model;
pub mod report;
pub mod sample;
pub mod scenario;
pub mod variability;

mod ids;

pub use ids::compare_ids;
pub use model::{Aspect, FramFunction, FramModel, ModelError, Relationship, ValidationReport};
