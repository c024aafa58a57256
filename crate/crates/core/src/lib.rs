//! An EL++ subsumption reasoner.
//!
//! A query `C ⊑ D` runs through four stages: [`pipeline::transform`]
//! replaces the query by fresh names, [`pipeline::normalize`] rewrites the
//! knowledge base into normal form, [`pipeline::a_extend`] forces the
//! subsumee to be nonempty, and [`classify`] saturates the S and R maps.
//! [`reasoner`] ties the stages together, and [`oracle`] evaluates the same
//! semantics on explicit finite models for differential testing.

pub mod cdomains;
pub mod classify;
pub mod differential;
pub mod generate;
pub mod kb;
pub mod oracle;
pub mod pipeline;
pub mod reasoner;
pub mod text;
