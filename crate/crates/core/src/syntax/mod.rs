//! Concrete syntax: lexer, parser and pretty-printer for `.maa` files.

pub mod ast;
mod lexer;
mod parser;
mod pretty;

pub use ast::SyntaxTree;
pub use lexer::{is_keyword, KEYWORDS};
pub use parser::parse;
pub use pretty::{expr as print_expr, literal as print_literal, pretty_print, transition as print_transition};
