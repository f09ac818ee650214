//! Point counting and determinant-method covers for plane curves over `F_q((t))`.
//!
//! The crate is organised bottom-up: exact arithmetic ([`arith`], [`bivar`]),
//! counting combinatorics ([`combinat`]), Hilbert functions of plane curves
//! ([`hilbert`]), ground-truth enumeration ([`enumerate`]), the determinant
//! engine ([`detcover`]), a `T_r`-approximation verifier ([`trcheck`]) and the
//! batch front-end ([`cli`]).

pub mod arith;
pub mod bivar;
pub mod cli;
pub mod combinat;
pub mod detcover;
pub mod enumerate;
pub mod hilbert;
pub mod text;
pub mod trcheck;
