//! Exact exterior calculus for Monge normal forms of (2,3,5)-distributions.

pub mod cartan;
pub mod distribution;
pub mod error;
pub mod expr;
pub mod forms;
pub mod linalg;
pub mod models;
pub mod sampling;

pub use cartan::{nurowski_metric, solve_connection, AdaptedCoframe, ConnectionSolution, Metric};
pub use distribution::{derived_flag, ideal_equivalent, Certificate, GrowthVector, PfaffianSystem};
pub use error::{Error, Result};
pub use expr::{parse, Bindings, Parser, Point, Scalar, Symbol, SymbolKind};
pub use forms::{kernel, Chart, CoordMap, Form, Guard, VectorField};

// Book chapters run as doctests.
macro_rules! book {
    ($($name:ident => $file:literal),* $(,)?) => {
        $(
            #[cfg(doctest)]
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            mod $name {}
        )*
    };
}

book! {
    book_introduction => "introduction.md",
    book_expressions => "expressions.md",
    book_forms => "forms.md",
    book_distributions => "distributions.md",
    book_structure_equations => "structure-equations.md",
    book_curvature => "curvature.md",
    book_models => "models.md",
    book_verify => "verify.md",
}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}
