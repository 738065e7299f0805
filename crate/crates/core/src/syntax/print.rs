use super::term::{Action, Sentence};

/// Renders a sentence in the surface grammar; the output re-parses to the same term.
pub fn print_sentence(s: &Sentence) -> String {
    let mut out = String::new();
    conj(s, &mut out);
    out
}

pub fn print_action(a: &Action) -> String {
    let mut out = String::new();
    action(a, 0, &mut out);
    out
}

fn conj(s: &Sentence, out: &mut String) {
    match s {
        Sentence::And(xs) if !xs.is_empty() => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                prefix(x, out);
            }
        }
        _ => prefix(s, out),
    }
}

fn prefix(s: &Sentence, out: &mut String) {
    match s {
        Sentence::Prop(n) | Sentence::Nom(n) => out.push_str(n),
        Sentence::And(xs) if xs.is_empty() => out.push_str("true"),
        Sentence::And(_) => {
            out.push('(');
            conj(s, out);
            out.push(')');
        }
        Sentence::Neg(inner) if matches!(&**inner, Sentence::And(xs) if xs.is_empty()) => out.push_str("false"),
        Sentence::Neg(inner) => {
            out.push('~');
            prefix(inner, out);
        }
        Sentence::Dia(a, inner) => {
            out.push('<');
            action(a, 0, out);
            out.push('>');
            prefix(inner, out);
        }
        Sentence::At(k, inner) => {
            out.push('@');
            out.push_str(k);
            out.push(' ');
            prefix(inner, out);
        }
        Sentence::Store(x, inner) => {
            out.push_str("down ");
            out.push_str(x);
            out.push_str(" . ");
            prefix(inner, out);
        }
        Sentence::Exists(x, inner) => {
            out.push_str("exists ");
            out.push_str(x);
            out.push_str(" . ");
            prefix(inner, out);
        }
    }
}

fn action(a: &Action, level: u8, out: &mut String) {
    let (own, open) = match a {
        Action::Union(..) => (0, level > 0),
        Action::Comp(..) => (1, level > 1),
        _ => (2, false),
    };
    if open {
        out.push('(');
    }
    match a {
        Action::Rel(r) => out.push_str(r),
        Action::Union(x, y) => {
            action(x, own, out);
            out.push_str(" + ");
            action(y, own + 1, out);
        }
        Action::Comp(x, y) => {
            action(x, own, out);
            out.push(';');
            action(y, own + 1, out);
        }
        Action::Star(x) => {
            action(x, 2, out);
            out.push('*');
        }
    }
    if open {
        out.push(')');
    }
}
