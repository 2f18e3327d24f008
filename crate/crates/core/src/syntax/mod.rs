//! Expression grammar, canonical rendering and the JSON/CSV formats used by
//! the command-line front end.

pub mod parse;
pub mod render;

pub use parse::{parse_classical, parse_operator, ExprAlgebra};
pub use render::{
    classical_from_json, classical_to_json, operator_from_json, operator_to_json, render_classical, render_operator,
    report_to_json, report_to_text, series_to_csv, trajectory_to_csv, PolynomialJson, TermJson,
};
