//! Exact scalar expressions.

mod monomial;
mod parse;
mod poly;
mod scalar;
mod symbol;

pub use parse::{parse, Parser, DEFAULT_PARAMETERS};
pub use scalar::{Bindings, Point, Scalar};
pub use symbol::{Symbol, SymbolKind};
