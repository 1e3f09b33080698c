//! Combinatorial group theory toolkit: word problems, coset enumeration,
//! Cayley diagrams, torus-knot normal forms, knot-group presentations from
//! PD codes, and van Kampen area / Dehn function estimates.

pub mod abelian;
pub mod area;
pub mod cayley;
pub mod cli;
pub mod coset;
pub mod dehn;
pub mod knot;
pub mod oracle;
pub mod presentation;
mod syntax;
pub mod torus;
pub mod words;

pub use syntax::ParseError;
