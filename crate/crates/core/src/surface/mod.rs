//! Lexing, parsing and printing of surface syntax.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod print;

pub use ast::{alpha_eq, module_alpha_eq, Expr, ExprKind, SourceModule};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_expr, parse_module, parse_source};
pub use print::{print_expr, print_module};
