use std::fmt;

use crate::diagnostic::{Code, Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident(String),
    Universe(u32),

    Def,
    Postulate,
    Import,
    Variable,

    Lambda,
    Pi,
    Sigma,
    Interval,
    CubeKw,
    TopeKw,
    UnitCube,
    Star,
    CubeZero,
    CubeOne,
    Top,
    Bot,
    Fst,
    Snd,
    Refl,
    J,
    RecOr,
    RecBot,

    LParen,
    RParen,
    LBrace,
    RBrace,
    LAngle,
    RAngle,
    Comma,
    Colon,
    Semi,
    Dot,
    DefEq,
    Arrow,
    Times,
    Bar,
    MapsTo,
    /// `_{`, opening an explicit subscript (`refl_{x}`, `x =_{A} y`).
    SubOpen,
    TopeLeq,
    TopeEq,
    And,
    Or,
    PathEq,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("identifier `{name}`"),
            TokenKind::Universe(0) => "`U`".to_owned(),
            TokenKind::Universe(l) => format!("`U{l}`"),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            TokenKind::Ident(_) => "identifier",
            TokenKind::Universe(_) => "U",
            TokenKind::Def => "def",
            TokenKind::Postulate => "postulate",
            TokenKind::Import => "import",
            TokenKind::Variable => "variable",
            TokenKind::Lambda => "λ",
            TokenKind::Pi => "Π",
            TokenKind::Sigma => "Σ",
            TokenKind::Interval => "I",
            TokenKind::CubeKw => "CUBE",
            TokenKind::TopeKw => "TOPE",
            TokenKind::UnitCube => "UNIT",
            TokenKind::Star => "⋆",
            TokenKind::CubeZero => "0",
            TokenKind::CubeOne => "1",
            TokenKind::Top => "⊤",
            TokenKind::Bot => "⊥",
            TokenKind::Fst => "fst",
            TokenKind::Snd => "snd",
            TokenKind::Refl => "refl",
            TokenKind::J => "J",
            TokenKind::RecOr => "recOR",
            TokenKind::RecBot => "recBOT",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LAngle => "⟨",
            TokenKind::RAngle => "⟩",
            TokenKind::Comma => ",",
            TokenKind::Colon => ":",
            TokenKind::Semi => ";",
            TokenKind::Dot => ".",
            TokenKind::DefEq => ":=",
            TokenKind::Arrow => "→",
            TokenKind::Times => "×",
            TokenKind::Bar => "|",
            TokenKind::MapsTo => "↦",
            TokenKind::SubOpen => "_{",
            TokenKind::TopeLeq => "≤",
            TokenKind::TopeEq => "≡",
            TokenKind::And => "∧",
            TokenKind::Or => "∨",
            TokenKind::PathEq => "=",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

fn keyword(word: &str) -> Option<TokenKind> {
    let kind = match word {
        "def" => TokenKind::Def,
        "postulate" => TokenKind::Postulate,
        "import" => TokenKind::Import,
        "variable" => TokenKind::Variable,
        "Pi" | "Π" => TokenKind::Pi,
        "Sigma" | "Σ" => TokenKind::Sigma,
        "I" | "𝕀" => TokenKind::Interval,
        "CUBE" => TokenKind::CubeKw,
        "TOPE" => TokenKind::TopeKw,
        "UNIT" => TokenKind::UnitCube,
        "star" => TokenKind::Star,
        "TOP" => TokenKind::Top,
        "BOT" => TokenKind::Bot,
        "fst" | "π₁" => TokenKind::Fst,
        "snd" | "π₂" => TokenKind::Snd,
        "refl" => TokenKind::Refl,
        "J" => TokenKind::J,
        "recOR" => TokenKind::RecOr,
        "recBOT" => TokenKind::RecBot,
        "U" | "𝒰" => TokenKind::Universe(0),
        _ => return universe_level(word).map(TokenKind::Universe),
    };
    Some(kind)
}

fn universe_level(word: &str) -> Option<u32> {
    let rest = word.strip_prefix('U').or_else(|| word.strip_prefix('𝒰'))?;
    if rest.is_empty() {
        return None;
    }
    let mut level: u32 = 0;
    for c in rest.chars() {
        let digit = match c {
            '0'..='9' => c as u32 - '0' as u32,
            '₀'..='₉' => c as u32 - '₀' as u32,
            _ => return None,
        };
        level = level.checked_mul(10)?.checked_add(digit)?;
    }
    Some(level)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '∂'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '′' | '″' | '‴' | '∂')
}

/// Tokenize a whole source file. Comments and whitespace are dropped; lexical
/// errors are reported and the offending input skipped.
pub fn tokenize(source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    Lexer {
        src: source,
        pos: 0,
        tokens: Vec::new(),
        diagnostics: Vec::new(),
    }
    .run()
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    tokens: Vec<Token>,
    diagnostics: Vec<Diagnostic>,
}

const SYMBOLS: &[(&str, TokenKind)] = &[
    ("|->", TokenKind::MapsTo),
    ("\\/", TokenKind::Or),
    ("/\\", TokenKind::And),
    ("->", TokenKind::Arrow),
    (":=", TokenKind::DefEq),
    ("<=", TokenKind::TopeLeq),
    ("==", TokenKind::TopeEq),
    ("_{", TokenKind::SubOpen),
    ("≔", TokenKind::DefEq),
    ("λ", TokenKind::Lambda),
    ("\\", TokenKind::Lambda),
    ("→", TokenKind::Arrow),
    ("↦", TokenKind::MapsTo),
    ("×", TokenKind::Times),
    ("*", TokenKind::Times),
    ("≤", TokenKind::TopeLeq),
    ("≡", TokenKind::TopeEq),
    ("∧", TokenKind::And),
    ("∨", TokenKind::Or),
    ("⊤", TokenKind::Top),
    ("⊥", TokenKind::Bot),
    ("⋆", TokenKind::Star),
    ("𝟙", TokenKind::UnitCube),
    ("⟨", TokenKind::LAngle),
    ("⟩", TokenKind::RAngle),
    ("<", TokenKind::LAngle),
    (">", TokenKind::RAngle),
    ("(", TokenKind::LParen),
    (")", TokenKind::RParen),
    ("{", TokenKind::LBrace),
    ("}", TokenKind::RBrace),
    (",", TokenKind::Comma),
    (":", TokenKind::Colon),
    (";", TokenKind::Semi),
    (".", TokenKind::Dot),
    ("|", TokenKind::Bar),
    ("=", TokenKind::PathEq),
];

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn run(mut self) -> (Vec<Token>, Vec<Diagnostic>) {
        while let Some(c) = self.rest().chars().next() {
            let start = self.pos;
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else if self.rest().starts_with("--") {
                let len = self.rest().find('\n').unwrap_or(self.rest().len());
                self.pos += len;
            } else if self.rest().starts_with("{-") {
                self.block_comment();
            } else if c.is_ascii_digit() {
                let len = self
                    .rest()
                    .find(|c: char| !c.is_ascii_digit())
                    .unwrap_or(self.rest().len());
                let text = &self.rest()[..len];
                self.pos += len;
                let span = Span::new(start, self.pos);
                match text {
                    "0" => self.push(TokenKind::CubeZero, span),
                    "1" => self.push(TokenKind::CubeOne, span),
                    _ => self.diagnostics.push(Diagnostic::error(
                        Code::Lex,
                        span,
                        format!("numeric literal `{text}` is not a cube constant (only 0 and 1)"),
                    )),
                }
            } else if self.rest().starts_with("_{") {
                self.pos += 2;
                self.push(TokenKind::SubOpen, Span::new(start, self.pos));
            } else if c == 'λ' {
                self.pos += c.len_utf8();
                self.push(TokenKind::Lambda, Span::new(start, self.pos));
            } else if is_ident_start(c) {
                self.ident();
            } else if let Some((text, kind)) =
                SYMBOLS.iter().find(|(text, _)| self.rest().starts_with(text))
            {
                self.pos += text.len();
                self.push(kind.clone(), Span::new(start, self.pos));
            } else {
                self.pos += c.len_utf8();
                self.diagnostics.push(Diagnostic::error(
                    Code::Lex,
                    Span::new(start, self.pos),
                    format!("illegal character `{c}`"),
                ));
            }
        }
        (self.tokens, self.diagnostics)
    }

    fn push(&mut self, kind: TokenKind, span: Span) {
        self.tokens.push(Token { kind, span });
    }

    fn ident(&mut self) {
        let start = self.pos;
        let mut chars = self.rest().char_indices().peekable();
        let mut end = 0;
        while let Some((i, c)) = chars.next() {
            let ok = if i == 0 {
                is_ident_start(c)
            } else {
                is_ident_continue(c)
            };
            if !ok {
                break;
            }
            // `x_{` starts a subscript, it does not extend the identifier.
            if c == '_' && matches!(chars.peek(), Some((_, '{'))) && i > 0 {
                break;
            }
            end = i + c.len_utf8();
        }
        let word = &self.rest()[..end];
        self.pos += end;
        let span = Span::new(start, self.pos);
        let kind = keyword(word).unwrap_or_else(|| TokenKind::Ident(word.to_owned()));
        self.push(kind, span);
    }

    fn block_comment(&mut self) {
        let start = self.pos;
        let mut depth = 0usize;
        while !self.rest().is_empty() {
            if self.rest().starts_with("{-") {
                depth += 1;
                self.pos += 2;
            } else if self.rest().starts_with("-}") {
                depth -= 1;
                self.pos += 2;
                if depth == 0 {
                    return;
                }
            } else {
                self.pos += self.rest().chars().next().map_or(1, char::len_utf8);
            }
        }
        self.diagnostics.push(Diagnostic::error(
            Code::Lex,
            Span::new(start, start + 2),
            "unterminated block comment",
        ));
    }
}
