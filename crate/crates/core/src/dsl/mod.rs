//! A small declarative language for towers, operators, kernels and
//! construction plans. Documents parse to an [`ast::Document`], print back
//! canonically, and build into exact objects through [`build::Model`].

pub mod ast;
pub mod build;
mod lexer;
mod parser;
mod printer;

pub use build::{BuildError, Model};
pub use parser::{parse_document, parse_expr};
pub use printer::{print_document, print_expr, print_item};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct DslError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl DslError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> DslError {
        DslError { line, col, message: message.into() }
    }
}
