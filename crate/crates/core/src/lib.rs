//! Three-weight p-ary linear codes built from a non-degenerate quadratic
//! form `f` over `F_q`: the defining set `{(x, y) != (0, 0) : f(x) + Tr(alpha y) = 0}`
//! in `F_q^2`, its weight distribution and weight hierarchy by closed form and
//! by exhaustive enumeration, and the character-sum identities behind them
//! checked in exact cyclotomic arithmetic.

pub mod field;
pub mod linalg;
pub mod qform;
pub mod subspaces;
pub mod cyclotomic;
pub mod code;
pub mod ghw;
pub mod config;
pub mod report;
pub mod suite;
pub mod cli;
