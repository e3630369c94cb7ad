//! The requirement language: AST, tokenizer, parser, renderer and checker.

mod ast;
mod check;
mod diag;
mod lexer;
mod parser;
mod render;

pub use ast::*;
pub use check::{check, check_event, infer_type};
pub use diag::{line_col, Diagnostic, Severity};
pub use lexer::{is_identifier, tokenize, LexError, Tok, Token};
pub use parser::{parse_event, parse_requirement};
pub use render::{render_duration, render_event, render_textual};
