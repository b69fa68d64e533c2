//! Pretty printer producing Unicode surface syntax with minimal parentheses.
//! Printing then parsing yields an alpha-equivalent tree.

use std::fmt::Write;

use super::ast::*;

const BINDER: u8 = 0;
const ARROW: u8 = 1;
const PRODUCT: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const COMPARE: u8 = 5;
const APP: u8 = 6;
const ATOM: u8 = 7;

fn level(e: &Expr) -> u8 {
    use ExprKind as K;
    match &e.kind {
        K::Lambda(..) | K::Pi(..) | K::Sigma(..) => BINDER,
        K::Arrow(..) => ARROW,
        K::Product(..) => PRODUCT,
        K::Or(..) => OR,
        K::And(..) => AND,
        K::TopeEq(..) | K::Leq(..) | K::PathType(..) => COMPARE,
        K::App(..) | K::Fst(..) | K::Snd(..) => APP,
        _ => ATOM,
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, BINDER);
    out
}

pub fn print_pattern(p: &Pattern) -> String {
    let mut out = String::new();
    write_pattern(&mut out, p);
    out
}

pub fn print_declaration(d: &Declaration) -> String {
    let mut out = String::new();
    match d.kind {
        DeclKind::SectionVariable => {
            let _ = write!(out, "variable ({} : ", d.name);
            write_expr(&mut out, &d.stated_type, BINDER);
            out.push_str(");");
            return out;
        }
        DeclKind::Definition => out.push_str("def "),
        DeclKind::Postulate => out.push_str("postulate "),
    }
    out.push_str(&d.name);
    for entry in &d.telescope {
        out.push(' ');
        match entry {
            TeleEntry::Binder(b) => write_binder(&mut out, b),
            TeleEntry::Constraint(t) => {
                out.push('{');
                write_expr(&mut out, t, BINDER);
                out.push('}');
            }
        }
    }
    out.push_str(" : ");
    write_expr(&mut out, &d.stated_type, BINDER);
    if let Some(body) = &d.body {
        out.push_str(" :=\n  ");
        write_expr(&mut out, body, BINDER);
    }
    out.push(';');
    out
}

pub fn print_module(m: &SourceModule) -> String {
    let mut out = String::new();
    for i in &m.imports {
        let _ = writeln!(out, "import {};", i.name);
    }
    if !m.imports.is_empty() {
        out.push('\n');
    }
    for d in &m.declarations {
        out.push_str(&print_declaration(d));
        out.push_str("\n\n");
    }
    out
}

fn write_pattern(out: &mut String, p: &Pattern) {
    match p {
        Pattern::Var(n) => out.push_str(n),
        Pattern::Wildcard => out.push('_'),
        Pattern::Pair(a, b) => {
            out.push('(');
            write_pattern(out, a);
            let mut rest = &**b;
            while let Pattern::Pair(x, y) = rest {
                out.push_str(", ");
                write_pattern(out, x);
                rest = y;
            }
            out.push_str(", ");
            write_pattern(out, rest);
            out.push(')');
        }
    }
}

fn write_binder(out: &mut String, b: &Binder) {
    out.push('(');
    for (i, p) in b.patterns.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_pattern(out, p);
    }
    out.push_str(" : ");
    write_expr(out, &b.ty, BINDER);
    out.push(')');
}

/// Whether the printed form begins with a type ascription, which at the
/// head of an arrow would be read back as a binder group.
fn leftmost_is_ann(e: &Expr) -> bool {
    use ExprKind as K;
    match &e.kind {
        K::Ann(..) => true,
        K::App(f, _) => leftmost_is_ann(f),
        K::Product(a, _)
        | K::Or(a, _)
        | K::And(a, _)
        | K::TopeEq(a, _)
        | K::Leq(a, _)
        | K::PathType(_, a, _) => leftmost_is_ann(a),
        _ => false,
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    if level(e) < min {
        out.push('(');
        write_expr(out, e, BINDER);
        out.push(')');
        return;
    }
    use ExprKind as K;
    match &e.kind {
        K::Var(n) => out.push_str(n),
        K::Universe(0) => out.push('U'),
        K::Universe(l) => {
            let _ = write!(out, "U{l}");
        }
        K::Interval => out.push('I'),
        K::CubeKw => out.push_str("CUBE"),
        K::TopeKw => out.push_str("TOPE"),
        K::UnitCube => out.push_str("UNIT"),
        K::Star => out.push('⋆'),
        K::Zero => out.push('0'),
        K::One => out.push('1'),
        K::Top => out.push('⊤'),
        K::Bot => out.push('⊥'),
        K::RecBot => out.push_str("recBOT"),
        K::Lambda(binders, body) => {
            out.push('λ');
            for b in binders {
                out.push(' ');
                match &b.ty {
                    None => write_pattern(out, &b.pattern),
                    Some(ty) => {
                        out.push('(');
                        write_pattern(out, &b.pattern);
                        out.push_str(" : ");
                        write_expr(out, ty, BINDER);
                        out.push(')');
                    }
                }
            }
            out.push_str(" . ");
            write_expr(out, body, BINDER);
        }
        K::Pi(binders, body) => {
            for b in binders {
                write_binder(out, b);
                out.push(' ');
            }
            out.push_str("→ ");
            write_expr(out, body, BINDER);
        }
        K::Sigma(binders, body) => {
            out.push('Σ');
            for b in binders {
                out.push(' ');
                write_binder(out, b);
            }
            out.push_str(", ");
            write_expr(out, body, BINDER);
        }
        K::Arrow(a, b) => {
            if leftmost_is_ann(a) {
                out.push('(');
                write_expr(out, a, BINDER);
                out.push(')');
            } else {
                write_expr(out, a, PRODUCT);
            }
            out.push_str(" → ");
            write_expr(out, b, BINDER);
        }
        K::Product(a, b) => binary(out, a, " × ", b, OR, PRODUCT),
        K::Or(a, b) => binary(out, a, " ∨ ", b, OR, AND),
        K::And(a, b) => binary(out, a, " ∧ ", b, AND, COMPARE),
        K::TopeEq(a, b) => binary(out, a, " ≡ ", b, APP, APP),
        K::Leq(a, b) => binary(out, a, " ≤ ", b, APP, APP),
        K::PathType(ty, a, b) => {
            write_expr(out, a, APP);
            match ty {
                None => out.push_str(" = "),
                Some(ty) => {
                    out.push_str(" =_{");
                    write_expr(out, ty, BINDER);
                    out.push_str("} ");
                }
            }
            write_expr(out, b, APP);
        }
        K::App(f, x) => binary(out, f, " ", x, APP, ATOM),
        K::Fst(x) => {
            out.push_str("fst ");
            write_expr(out, x, ATOM);
        }
        K::Snd(x) => {
            out.push_str("snd ");
            write_expr(out, x, ATOM);
        }
        K::Pair(a, b) => {
            out.push('(');
            write_expr(out, a, BINDER);
            let mut rest = &**b;
            while let K::Pair(x, y) = &rest.kind {
                out.push_str(", ");
                write_expr(out, x, BINDER);
                rest = y;
            }
            out.push_str(", ");
            write_expr(out, rest, BINDER);
            out.push(')');
        }
        K::Refl(None) => out.push_str("refl"),
        K::Refl(Some(x)) => {
            out.push_str("refl_{");
            write_expr(out, x, BINDER);
            out.push('}');
        }
        K::J(c, d, p) => {
            out.push_str("J(");
            write_expr(out, c, BINDER);
            out.push_str(", ");
            write_expr(out, d, BINDER);
            out.push_str(", ");
            write_expr(out, p, BINDER);
            out.push(')');
        }
        K::Extension {
            binder,
            family,
            subtope,
            partial,
        } => {
            out.push_str("⟨Π ");
            write_binder(out, binder);
            out.push_str(" → ");
            write_expr(out, family, BINDER);
            out.push_str(" | ");
            write_expr(out, subtope, BINDER);
            out.push_str(" ↦ ");
            write_expr(out, partial, BINDER);
            out.push('⟩');
        }
        K::Shape {
            pattern,
            cube,
            tope,
        } => {
            out.push('{');
            write_pattern(out, pattern);
            out.push_str(" : ");
            write_expr(out, cube, BINDER);
            out.push_str(" | ");
            write_expr(out, tope, BINDER);
            out.push('}');
        }
        K::RecOr(branches) => {
            out.push_str("recOR(");
            for (i, (t, v)) in branches.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, t, BINDER);
                out.push_str(" ↦ ");
                write_expr(out, v, BINDER);
            }
            out.push(')');
        }
        K::Ann(x, ty) => {
            out.push('(');
            write_expr(out, x, BINDER);
            out.push_str(" : ");
            write_expr(out, ty, BINDER);
            out.push(')');
        }
    }
}

fn binary(out: &mut String, a: &Expr, op: &str, b: &Expr, left: u8, right: u8) {
    write_expr(out, a, left);
    out.push_str(op);
    write_expr(out, b, right);
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_expr;
    use super::*;

    fn round_trip(src: &str) -> String {
        let (e, _) = parse_expr(src).unwrap();
        let printed = print_expr(&e);
        let (again, _) = parse_expr(&printed).unwrap_or_else(|d| panic!("{printed}: {d:?}"));
        assert!(alpha_eq(&e, &again), "{src} ~> {printed}");
        printed
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(round_trip("((A → B) → C)"), "(A → B) → C");
        assert_eq!(round_trip("A -> (B -> C)"), "A → B → C");
        assert_eq!(round_trip("f (g x) y"), "f (g x) y");
        assert_eq!(round_trip("(t /\\ s) <= s"), "(t ∧ s) ≤ s");
        assert_eq!(round_trip("a \\/ (b \\/ c)"), "a ∨ (b ∨ c)");
        assert_eq!(round_trip("(a, (b, c))"), "(a, b, c)");
    }

    #[test]
    fn binder_forms() {
        round_trip("\\ (t, s) (x : A) y . x");
        round_trip("(x y : A) -> Sigma (z : B), x = z");
        round_trip("<Pi (t : I) -> A | t == 0 |-> a>");
        round_trip("{(t, s) : I * I | s <= t}");
        round_trip("recOR(t == 0 |-> a, t == 1 |-> b, TOP |-> c)");
        round_trip("J(C, refl_{x}, p) =_{A x} y");
    }

    #[test]
    fn ascription_at_arrow_head_stays_an_ascription() {
        let printed = round_trip("((x : A)) -> B");
        assert_eq!(printed, "((x : A)) → B");
    }
}
