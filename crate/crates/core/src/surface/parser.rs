use std::path::Path;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use crate::diagnostic::{Code, Diagnostic, Span};

type PResult<T> = Result<T, Diagnostic>;

/// Parse a token stream into a module. On failure the module holds every
/// declaration that parsed, and one diagnostic per failed declaration.
pub fn parse_module(path: &Path, tokens: Vec<Token>) -> (SourceModule, Vec<Diagnostic>) {
    let end = tokens.last().map_or(0, |t| t.span.end);
    let mut p = Parser::new(tokens, end);
    let mut module = SourceModule {
        path: path.to_owned(),
        name: module_name(path),
        ..SourceModule::default()
    };
    let mut diagnostics = Vec::new();

    while p.at(&TokenKind::Import) {
        match p.import() {
            Ok(import) => module.imports.push(import),
            Err(d) => {
                diagnostics.push(d);
                p.recover();
            }
        }
    }
    while !p.is_eof() {
        match p.declaration() {
            Ok(decls) => module.declarations.extend(decls),
            Err(d) => {
                diagnostics.push(d);
                p.recover();
            }
        }
    }
    module.span_table = p.spans.table;
    (module, diagnostics)
}

/// Tokenize and parse a source file.
pub fn parse_source(path: &Path, source: &str) -> (SourceModule, Vec<Diagnostic>) {
    let (tokens, mut diagnostics) = tokenize(source);
    let (module, parse_diags) = parse_module(path, tokens);
    diagnostics.extend(parse_diags);
    (module, diagnostics)
}

/// Parse a standalone expression.
pub fn parse_expr(source: &str) -> Result<(Expr, Spans), Vec<Diagnostic>> {
    let (tokens, diagnostics) = tokenize(source);
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    let end = source.len();
    let mut p = Parser::new(tokens, end);
    let expr = p.expr().map_err(|d| vec![d])?;
    if !p.is_eof() {
        return Err(vec![p.unexpected(&["end of input"])]);
    }
    Ok((expr, p.spans))
}

pub fn module_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: usize,
    spans: Spans,
}

impl Parser {
    fn new(tokens: Vec<Token>, eof: usize) -> Parser {
        Parser {
            tokens,
            pos: 0,
            eof,
            spans: Spans::default(),
        }
    }

    fn is_eof(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn span_here(&self) -> Span {
        self.tokens
            .get(self.pos)
            .map_or(Span::new(self.eof, self.eof), |t| t.span)
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].span.end
        }
    }

    fn since(&self, start: usize) -> Span {
        Span::new(start, self.prev_end().max(start))
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        let found = self
            .peek()
            .map_or_else(|| "end of input".to_owned(), TokenKind::describe);
        let expected = match expected {
            [one] => one.to_string(),
            many => format!("one of {}", many.join(", ")),
        };
        Diagnostic::error(
            Code::Parse,
            self.span_here(),
            format!("expected {expected}, found {found}"),
        )
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.at(&kind) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[&kind.describe()]))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(TokenKind::Ident(_)) => {
                let t = self.bump();
                let TokenKind::Ident(name) = t.kind else {
                    unreachable!()
                };
                Ok((name, t.span))
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    /// Skip to the next declaration keyword.
    fn recover(&mut self) {
        if !self.is_eof() {
            self.pos += 1;
        }
        while let Some(k) = self.peek() {
            if matches!(
                k,
                TokenKind::Def | TokenKind::Postulate | TokenKind::Variable | TokenKind::Import
            ) {
                break;
            }
            self.pos += 1;
        }
    }

    fn node(&mut self, start: usize, kind: ExprKind) -> Expr {
        let span = self.since(start);
        self.spans.node(span, kind)
    }

    fn import(&mut self) -> PResult<Import> {
        let start = self.expect(TokenKind::Import)?.span.start;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::Semi)?;
        Ok(Import {
            name,
            span: self.since(start),
        })
    }

    fn declaration(&mut self) -> PResult<Vec<Declaration>> {
        let start = self.span_here().start;
        let kind = match self.peek() {
            Some(TokenKind::Def) => DeclKind::Definition,
            Some(TokenKind::Postulate) => DeclKind::Postulate,
            Some(TokenKind::Variable) => return self.variables(),
            _ => return Err(self.unexpected(&["`def`", "`postulate`", "`variable`"])),
        };
        self.bump();
        let (name, name_span) = self.ident()?;
        let mut telescope = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::LParen) => telescope.push(TeleEntry::Binder(self.binder()?)),
                Some(TokenKind::LBrace) => {
                    self.bump();
                    let tope = self.expr()?;
                    self.expect(TokenKind::RBrace)?;
                    telescope.push(TeleEntry::Constraint(tope));
                }
                _ => break,
            }
        }
        if !self.at(&TokenKind::Colon) {
            return Err(self.unexpected(&["`(`", "`{`", "`:`"]));
        }
        self.bump();
        let stated_type = self.expr()?;
        let body = if self.eat(&TokenKind::DefEq) {
            Some(self.expr()?)
        } else {
            None
        };
        self.expect(TokenKind::Semi)?;
        match (kind, &body) {
            (DeclKind::Definition, None) => {
                return Err(Diagnostic::error(
                    Code::Parse,
                    name_span,
                    format!("definition `{name}` has no body (expected `:=`)"),
                ))
            }
            (DeclKind::Postulate, Some(b)) => {
                return Err(Diagnostic::error(
                    Code::Parse,
                    self.spans.get(b.id),
                    format!("postulate `{name}` cannot have a body"),
                ))
            }
            _ => {}
        }
        Ok(vec![Declaration {
            name,
            name_span,
            kind,
            telescope,
            stated_type,
            body,
            span: self.since(start),
        }])
    }

    /// `variable (x y : A) (z : B);`
    fn variables(&mut self) -> PResult<Vec<Declaration>> {
        let start = self.expect(TokenKind::Variable)?.span.start;
        let mut out = Vec::new();
        if !self.at(&TokenKind::LParen) {
            return Err(self.unexpected(&["`(`"]));
        }
        while self.at(&TokenKind::LParen) {
            let group_start = self.span_here().start;
            let binder = self.binder()?;
            let span = self.since(group_start);
            for pattern in binder.patterns {
                let Pattern::Var(name) = pattern else {
                    return Err(Diagnostic::error(
                        Code::Parse,
                        span,
                        "section variables must be plain names",
                    ));
                };
                out.push(Declaration {
                    name,
                    name_span: span,
                    kind: DeclKind::SectionVariable,
                    telescope: Vec::new(),
                    stated_type: binder.ty.clone(),
                    body: None,
                    span: self.since(start),
                });
            }
        }
        self.expect(TokenKind::Semi)?;
        Ok(out)
    }

    /// `( p₁ … pₙ : A )`
    fn binder(&mut self) -> PResult<Binder> {
        self.expect(TokenKind::LParen)?;
        let mut patterns = vec![self.pattern()?];
        while !self.at(&TokenKind::Colon) {
            patterns.push(self.pattern()?);
        }
        self.bump();
        let ty = self.expr()?;
        self.expect(TokenKind::RParen)?;
        Ok(Binder { patterns, ty })
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        match self.peek() {
            Some(TokenKind::Ident(_)) => {
                let (name, _) = self.ident()?;
                Ok(if name == "_" {
                    Pattern::Wildcard
                } else {
                    Pattern::Var(name)
                })
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let first = self.pattern()?;
                self.expect(TokenKind::Comma)?;
                let rest = self.pattern_tuple_rest()?;
                Ok(Pattern::Pair(Box::new(first), Box::new(rest)))
            }
            _ => Err(self.unexpected(&["pattern"])),
        }
    }

    fn pattern_tuple_rest(&mut self) -> PResult<Pattern> {
        let p = self.pattern()?;
        if self.eat(&TokenKind::Comma) {
            let rest = self.pattern_tuple_rest()?;
            Ok(Pattern::Pair(Box::new(p), Box::new(rest)))
        } else {
            self.expect(TokenKind::RParen)?;
            Ok(p)
        }
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let start = self.span_here().start;
        match self.peek() {
            Some(TokenKind::Lambda) => {
                self.bump();
                let mut binders = Vec::new();
                while !self.at(&TokenKind::Dot) {
                    binders.extend(self.lam_binder()?);
                }
                if binders.is_empty() {
                    return Err(self.unexpected(&["binder"]));
                }
                self.bump();
                let body = self.expr()?;
                Ok(self.node(start, ExprKind::Lambda(binders, Box::new(body))))
            }
            Some(TokenKind::Sigma) => {
                self.bump();
                let binders = self.binder_groups()?;
                self.expect(TokenKind::Comma)?;
                let body = self.expr()?;
                Ok(self.node(start, ExprKind::Sigma(binders, Box::new(body))))
            }
            Some(TokenKind::Pi) => {
                self.bump();
                let binders = self.binder_groups()?;
                self.expect(TokenKind::Arrow)?;
                let body = self.expr()?;
                Ok(self.node(start, ExprKind::Pi(binders, Box::new(body))))
            }
            Some(TokenKind::LParen) => {
                if let Some(binders) = self.try_pi_binders() {
                    let body = self.expr()?;
                    Ok(self.node(start, ExprKind::Pi(binders, Box::new(body))))
                } else {
                    self.arrow()
                }
            }
            _ => self.arrow(),
        }
    }

    fn binder_groups(&mut self) -> PResult<Vec<Binder>> {
        let mut binders = vec![self.binder()?];
        while self.at(&TokenKind::LParen) {
            binders.push(self.binder()?);
        }
        Ok(binders)
    }

    /// Speculatively parse `(p : A) … →`, restoring the position on failure.
    fn try_pi_binders(&mut self) -> Option<Vec<Binder>> {
        let saved_pos = self.pos;
        let saved_nodes = self.spans.table.len();
        let result = (|| {
            let binders = self.binder_groups().ok()?;
            self.eat(&TokenKind::Arrow).then_some(binders)
        })();
        if result.is_none() {
            self.pos = saved_pos;
            self.spans.table.truncate(saved_nodes);
        }
        result
    }

    fn lam_binder(&mut self) -> PResult<Vec<LamBinder>> {
        if !self.at(&TokenKind::LParen) {
            let pattern = self.pattern()?;
            return Ok(vec![LamBinder { pattern, ty: None }]);
        }
        self.bump();
        let first = self.pattern()?;
        if self.eat(&TokenKind::Comma) {
            let rest = self.pattern_tuple_rest()?;
            return Ok(vec![LamBinder {
                pattern: Pattern::Pair(Box::new(first), Box::new(rest)),
                ty: None,
            }]);
        }
        let mut patterns = vec![first];
        while !self.at(&TokenKind::Colon) {
            if self.at(&TokenKind::RParen) {
                self.bump();
                return match patterns.as_slice() {
                    [p] => Ok(vec![LamBinder {
                        pattern: p.clone(),
                        ty: None,
                    }]),
                    _ => Err(self.unexpected(&["`:`"])),
                };
            }
            patterns.push(self.pattern()?);
        }
        self.bump();
        let ty = self.expr()?;
        self.expect(TokenKind::RParen)?;
        Ok(patterns
            .into_iter()
            .map(|pattern| LamBinder {
                pattern,
                ty: Some(ty.clone()),
            })
            .collect())
    }

    fn arrow(&mut self) -> PResult<Expr> {
        let start = self.span_here().start;
        let lhs = self.product()?;
        if self.eat(&TokenKind::Arrow) {
            let rhs = self.expr()?;
            Ok(self.node(start, ExprKind::Arrow(Box::new(lhs), Box::new(rhs))))
        } else {
            Ok(lhs)
        }
    }

    fn product(&mut self) -> PResult<Expr> {
        let start = self.span_here().start;
        let lhs = self.or()?;
        if self.eat(&TokenKind::Times) {
            let rhs = self.product()?;
            Ok(self.node(start, ExprKind::Product(Box::new(lhs), Box::new(rhs))))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> PResult<Expr> {
        let start = self.span_here().start;
        let mut lhs = self.and()?;
        while self.eat(&TokenKind::Or) {
            let rhs = self.and()?;
            lhs = self.node(start, ExprKind::Or(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Expr> {
        let start = self.span_here().start;
        let mut lhs = self.comparison()?;
        while self.eat(&TokenKind::And) {
            let rhs = self.comparison()?;
            lhs = self.node(start, ExprKind::And(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let start = self.span_here().start;
        let lhs = self.application()?;
        let kind = match self.peek() {
            Some(TokenKind::TopeEq) => {
                self.bump();
                let rhs = self.application()?;
                ExprKind::TopeEq(Box::new(lhs), Box::new(rhs))
            }
            Some(TokenKind::TopeLeq) => {
                self.bump();
                let rhs = self.application()?;
                ExprKind::Leq(Box::new(lhs), Box::new(rhs))
            }
            Some(TokenKind::PathEq) => {
                self.bump();
                let ty = if self.eat(&TokenKind::SubOpen) {
                    let ty = self.expr()?;
                    self.expect(TokenKind::RBrace)?;
                    Some(Box::new(ty))
                } else {
                    None
                };
                let rhs = self.application()?;
                ExprKind::PathType(ty, Box::new(lhs), Box::new(rhs))
            }
            _ => return Ok(lhs),
        };
        Ok(self.node(start, kind))
    }

    fn application(&mut self) -> PResult<Expr> {
        let start = self.span_here().start;
        let mut head = match self.peek() {
            Some(TokenKind::Fst) => {
                self.bump();
                let arg = self.atom()?;
                self.node(start, ExprKind::Fst(Box::new(arg)))
            }
            Some(TokenKind::Snd) => {
                self.bump();
                let arg = self.atom()?;
                self.node(start, ExprKind::Snd(Box::new(arg)))
            }
            _ => self.atom()?,
        };
        while self.starts_atom() {
            let arg = self.atom()?;
            head = self.node(start, ExprKind::App(Box::new(head), Box::new(arg)));
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(
                TokenKind::Ident(_)
                    | TokenKind::Universe(_)
                    | TokenKind::Interval
                    | TokenKind::CubeKw
                    | TokenKind::TopeKw
                    | TokenKind::UnitCube
                    | TokenKind::Star
                    | TokenKind::CubeZero
                    | TokenKind::CubeOne
                    | TokenKind::Top
                    | TokenKind::Bot
                    | TokenKind::RecBot
                    | TokenKind::Refl
                    | TokenKind::J
                    | TokenKind::RecOr
                    | TokenKind::LParen
                    | TokenKind::LAngle
                    | TokenKind::LBrace
            )
        )
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.span_here().start;
        let Some(kind) = self.peek().cloned() else {
            return Err(self.unexpected(&["expression"]));
        };
        let simple = match &kind {
            TokenKind::Ident(name) => Some(ExprKind::Var(name.clone())),
            TokenKind::Universe(l) => Some(ExprKind::Universe(*l)),
            TokenKind::Interval => Some(ExprKind::Interval),
            TokenKind::CubeKw => Some(ExprKind::CubeKw),
            TokenKind::TopeKw => Some(ExprKind::TopeKw),
            TokenKind::UnitCube => Some(ExprKind::UnitCube),
            TokenKind::Star => Some(ExprKind::Star),
            TokenKind::CubeZero => Some(ExprKind::Zero),
            TokenKind::CubeOne => Some(ExprKind::One),
            TokenKind::Top => Some(ExprKind::Top),
            TokenKind::Bot => Some(ExprKind::Bot),
            TokenKind::RecBot => Some(ExprKind::RecBot),
            _ => None,
        };
        if let Some(simple) = simple {
            self.bump();
            return Ok(self.node(start, simple));
        }
        match kind {
            TokenKind::Refl => {
                self.bump();
                let arg = if self.eat(&TokenKind::SubOpen) {
                    let e = self.expr()?;
                    self.expect(TokenKind::RBrace)?;
                    Some(Box::new(e))
                } else {
                    None
                };
                Ok(self.node(start, ExprKind::Refl(arg)))
            }
            TokenKind::J => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let motive = self.expr()?;
                self.expect(TokenKind::Comma)?;
                let base = self.expr()?;
                self.expect(TokenKind::Comma)?;
                let path = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(self.node(
                    start,
                    ExprKind::J(Box::new(motive), Box::new(base), Box::new(path)),
                ))
            }
            TokenKind::RecOr => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let mut branches = Vec::new();
                loop {
                    let tope = self.expr()?;
                    self.expect(TokenKind::MapsTo)?;
                    let value = self.expr()?;
                    branches.push((tope, value));
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(TokenKind::RParen)?;
                if branches.len() < 2 {
                    return Err(Diagnostic::error(
                        Code::Parse,
                        self.since(start),
                        "recOR needs at least two branches",
                    ));
                }
                Ok(self.node(start, ExprKind::RecOr(branches)))
            }
            TokenKind::LParen => {
                self.bump();
                let first = self.expr()?;
                if self.eat(&TokenKind::Colon) {
                    let ty = self.expr()?;
                    self.expect(TokenKind::RParen)?;
                    return Ok(self.node(start, ExprKind::Ann(Box::new(first), Box::new(ty))));
                }
                if self.eat(&TokenKind::Comma) {
                    let rest = self.tuple_rest()?;
                    return Ok(self.node(start, ExprKind::Pair(Box::new(first), Box::new(rest))));
                }
                if !self.at(&TokenKind::RParen) {
                    return Err(self.unexpected(&["`)`", "`,`", "`:`"]));
                }
                self.bump();
                Ok(first)
            }
            TokenKind::LAngle => {
                self.bump();
                self.expect(TokenKind::Pi)?;
                let binder = self.binder()?;
                if binder.patterns.len() != 1 {
                    return Err(Diagnostic::error(
                        Code::Parse,
                        self.since(start),
                        "an extension type binds exactly one pattern",
                    ));
                }
                self.expect(TokenKind::Arrow)?;
                let family = self.expr()?;
                self.expect(TokenKind::Bar)?;
                let subtope = self.expr()?;
                self.expect(TokenKind::MapsTo)?;
                let partial = self.expr()?;
                self.expect(TokenKind::RAngle)?;
                Ok(self.node(
                    start,
                    ExprKind::Extension {
                        binder: Box::new(binder),
                        family: Box::new(family),
                        subtope: Box::new(subtope),
                        partial: Box::new(partial),
                    },
                ))
            }
            TokenKind::LBrace => {
                self.bump();
                let pattern = self.pattern()?;
                self.expect(TokenKind::Colon)?;
                let cube = self.expr()?;
                self.expect(TokenKind::Bar)?;
                let tope = self.expr()?;
                self.expect(TokenKind::RBrace)?;
                Ok(self.node(
                    start,
                    ExprKind::Shape {
                        pattern,
                        cube: Box::new(cube),
                        tope: Box::new(tope),
                    },
                ))
            }
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    fn tuple_rest(&mut self) -> PResult<Expr> {
        let start = self.span_here().start;
        let e = self.expr()?;
        if self.eat(&TokenKind::Comma) {
            let rest = self.tuple_rest()?;
            Ok(self.node(start, ExprKind::Pair(Box::new(e), Box::new(rest))))
        } else {
            self.expect(TokenKind::RParen)?;
            Ok(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> (SourceModule, Vec<Diagnostic>) {
        parse_source(Path::new("test.stt"), src)
    }

    #[test]
    fn single_definition() {
        let (m, d) = parse("def idfun (A : U) : A → A := λ x . x;");
        assert!(d.is_empty(), "{d:?}");
        assert_eq!(m.declarations.len(), 1);
        assert_eq!(m.declarations[0].name, "idfun");
        assert!(matches!(m.declarations[0].body.as_ref().unwrap().kind, ExprKind::Lambda(..)));
    }

    #[test]
    fn hom_body_is_extension() {
        let src = "def hom (B : U) (b b′ : B) : U := ⟨Π (t : I) → B | t ≡ 0 ∨ t ≡ 1 ↦ recOR(t ≡ 0 ↦ b, t ≡ 1 ↦ b′)⟩;";
        let (m, d) = parse(src);
        assert!(d.is_empty(), "{d:?}");
        assert!(matches!(
            m.declarations[0].body.as_ref().unwrap().kind,
            ExprKind::Extension { .. }
        ));
    }

    #[test]
    fn recovery_resumes_at_next_def() {
        let (m, d) = parse("def broken : := ;\ndef ok : U := U;\npostulate p : U;");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::Parse);
        assert!(d[0].message.contains("expected"));
        let names: Vec<_> = m.declarations.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["ok", "p"]);
    }

    #[test]
    fn precedence_of_topes_and_connections() {
        let (e, _) = parse_expr("s ≡ 0 ∨ t ≡ 1 ∧ (t ∧ s) ≤ s").unwrap();
        let ExprKind::Or(_, rhs) = e.kind else { panic!() };
        let ExprKind::And(_, leq) = rhs.kind else { panic!() };
        let ExprKind::Leq(lhs, _) = leq.kind else { panic!() };
        assert!(matches!(lhs.kind, ExprKind::And(..)));
    }

    #[test]
    fn pi_binders_versus_annotation() {
        let (e, _) = parse_expr("(x y : A) ((t, s) : Δ²) → B x").unwrap();
        let ExprKind::Pi(binders, _) = e.kind else { panic!() };
        assert_eq!(binders.len(), 2);
        assert_eq!(binders[0].patterns.len(), 2);
        let (e, _) = parse_expr("(x : A)").unwrap();
        assert!(matches!(e.kind, ExprKind::Ann(..)));
        let (e, _) = parse_expr("(a, b, c)").unwrap();
        let ExprKind::Pair(_, rest) = e.kind else { panic!() };
        assert!(matches!(rest.kind, ExprKind::Pair(..)));
    }

    #[test]
    fn declaration_telescope_with_constraint() {
        let (m, d) = parse("def f (t s : I) {s ≤ t} (x : A) : A := x;");
        assert!(d.is_empty(), "{d:?}");
        assert_eq!(m.declarations[0].telescope.len(), 3);
        assert!(matches!(m.declarations[0].telescope[1], TeleEntry::Constraint(_)));
    }

    #[test]
    fn section_variables() {
        let (m, d) = parse("variable (A : U) (x y : A);\ndef f : A := x;");
        assert!(d.is_empty(), "{d:?}");
        assert_eq!(m.declarations.len(), 4);
        assert_eq!(m.declarations[2].kind, DeclKind::SectionVariable);
    }

    #[test]
    fn every_node_has_a_span() {
        let src = "def f (A : U) : A → A := λ x . (x : A);";
        let (m, _) = parse(src);
        assert!(!m.span_table.is_empty());
        for s in &m.span_table {
            assert!(s.end <= src.len() && s.start <= s.end);
        }
    }

    #[test]
    fn definition_without_body_is_rejected() {
        let (_, d) = parse("def f : U;");
        assert_eq!(d.len(), 1);
        let (_, d) = parse("postulate f : U := U;");
        assert_eq!(d.len(), 1);
    }
}
