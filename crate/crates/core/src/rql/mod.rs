//! The recommendation query language: AST, concrete syntax, and
//! structural validation.
//!
//! ```text
//! select x where x.type="hotel" & (x.attribute="spa" | x.attribute="pool")
//!     & x.location NEAR "Salzburg" & x PREF NOT in {"Red Hoods","Royals"}
//! ```

mod ast;
mod parse;
mod render;
mod validate;

pub use ast::{Clause, Connective, Operator, PhraseTerm, RqlQuery, SemanticLabel};
pub use parse::{parse_rql, SyntaxError};
pub use render::{render_clause, render_rql};
pub use validate::{validate_query, Violation, MAX_CHAIN};
