use super::{Ctor, FragmentConfig, Op, Signature, SymbolKind};
use super::term::{Action, Sentence};
use crate::error::{Error, Result};

const KEYWORDS: [&str; 5] = ["true", "false", "down", "exists", "forall"];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(char),
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    lex_with(text, false)
}

/// With `prefix`, lexing ends quietly at the first foreign character, which
/// lets an embedded action stop where the surrounding format resumes.
fn lex_with(text: &str, prefix: bool) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "~&|<>[]@.()+;*".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else if prefix {
            out.push((Tok::Eof, i));
            return Ok(out);
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(Error::parse(i, format!("unexpected character `{ch}`")));
        }
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    frag: &'a FragmentConfig,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::parse(self.pos(), format!("expected `{c}`, found {}", self.describe())))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(Error::parse(self.pos(), format!("expected identifier, found {}", self.describe()))),
        }
    }

    fn gate(&self, op: Op) -> Result<()> {
        if self.frag.has(op) {
            Ok(())
        } else {
            Err(Error::Fragment { ctor: op.name() })
        }
    }

    fn gate_ctor(&self, c: Ctor) -> Result<()> {
        if self.frag.has_ctor(c) {
            Ok(())
        } else {
            Err(Error::Fragment { ctor: c.name() })
        }
    }

    fn or_expr(&mut self, sig: &Signature) -> Result<Sentence> {
        let first = self.and_expr(sig)?;
        if *self.peek() != Tok::Sym('|') {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat('|') {
            parts.push(self.and_expr(sig)?);
        }
        Ok(Sentence::or(parts))
    }

    fn and_expr(&mut self, sig: &Signature) -> Result<Sentence> {
        let first = self.prefix(sig)?;
        if *self.peek() != Tok::Sym('&') {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat('&') {
            parts.push(self.prefix(sig)?);
        }
        Ok(Sentence::and(parts))
    }

    fn binder(&mut self, sig: &Signature) -> Result<(String, Signature)> {
        let pos = self.pos();
        let var = self.ident()?;
        let inner = sig
            .with_var(&var)
            .map_err(|_| Error::parse(pos, format!("binder `{var}` shadows a symbol already in scope")))?;
        self.expect('.')?;
        Ok((var, inner))
    }

    fn prefix(&mut self, sig: &Signature) -> Result<Sentence> {
        let pos = self.pos();
        match self.bump() {
            Tok::Sym('~') => Ok(Sentence::neg(self.prefix(sig)?)),
            Tok::Sym('(') => {
                let s = self.or_expr(sig)?;
                self.expect(')')?;
                Ok(s)
            }
            Tok::Sym('<') => {
                self.gate(Op::Diamond)?;
                let a = self.action(sig)?;
                self.expect('>')?;
                Ok(Sentence::dia(a, self.prefix(sig)?))
            }
            Tok::Sym('[') => {
                self.gate(Op::Diamond)?;
                let a = self.action(sig)?;
                self.expect(']')?;
                Ok(Sentence::boxed(a, self.prefix(sig)?))
            }
            Tok::Sym('@') => {
                self.gate(Op::At)?;
                let npos = self.pos();
                let k = self.ident()?;
                match sig.kind_of(&k) {
                    Some(SymbolKind::Nominal | SymbolKind::Var) => {}
                    Some(other) => {
                        return Err(Error::parse(npos, format!("`{k}` is a {}, not a nominal", other.describe())))
                    }
                    None => return Err(Error::Undeclared { kind: "nominal", name: k }),
                }
                Ok(Sentence::at(k, self.prefix(sig)?))
            }
            Tok::Ident(kw) if kw == "true" => Ok(Sentence::tt()),
            Tok::Ident(kw) if kw == "false" => Ok(Sentence::ff()),
            Tok::Ident(kw) if kw == "down" => {
                self.gate(Op::Store)?;
                let (x, inner) = self.binder(sig)?;
                Ok(Sentence::store(x, self.prefix(&inner)?))
            }
            Tok::Ident(kw) if kw == "exists" || kw == "forall" => {
                self.gate(Op::Exists)?;
                let (x, inner) = self.binder(sig)?;
                let body = self.prefix(&inner)?;
                Ok(if kw == "exists" { Sentence::exists(x, body) } else { Sentence::forall(x, body) })
            }
            Tok::Ident(name) => match sig.kind_of(&name) {
                Some(SymbolKind::Prop) => Ok(Sentence::Prop(name)),
                Some(SymbolKind::Nominal | SymbolKind::Var) => Ok(Sentence::Nom(name)),
                Some(SymbolKind::Relation) => {
                    Err(Error::parse(pos, format!("relation `{name}` used as a sentence")))
                }
                None => Err(Error::Undeclared { kind: "symbol", name }),
            },
            Tok::Sym(c) => Err(Error::parse(pos, format!("unexpected `{c}`"))),
            Tok::Eof => Err(Error::parse(pos, "unexpected end of input")),
        }
    }

    fn action(&mut self, sig: &Signature) -> Result<Action> {
        let mut a = self.action_comp(sig)?;
        while *self.peek() == Tok::Sym('+') {
            self.gate_ctor(Ctor::Union)?;
            self.bump();
            a = Action::union(a, self.action_comp(sig)?);
        }
        Ok(a)
    }

    fn action_comp(&mut self, sig: &Signature) -> Result<Action> {
        let mut a = self.action_star(sig)?;
        while *self.peek() == Tok::Sym(';') {
            self.gate_ctor(Ctor::Comp)?;
            self.bump();
            a = Action::comp(a, self.action_star(sig)?);
        }
        Ok(a)
    }

    fn action_star(&mut self, sig: &Signature) -> Result<Action> {
        let mut a = self.action_atom(sig)?;
        while *self.peek() == Tok::Sym('*') {
            self.gate_ctor(Ctor::Star)?;
            self.bump();
            a = Action::star(a);
        }
        Ok(a)
    }

    fn action_atom(&mut self, sig: &Signature) -> Result<Action> {
        if self.eat('(') {
            let a = self.action(sig)?;
            self.expect(')')?;
            return Ok(a);
        }
        let pos = self.pos();
        let r = self.ident()?;
        match sig.kind_of(&r) {
            Some(SymbolKind::Relation) => Ok(Action::Rel(r)),
            Some(other) => Err(Error::parse(pos, format!("`{r}` is a {}, not a relation", other.describe()))),
            None => Err(Error::Undeclared { kind: "relation", name: r }),
        }
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(Error::parse(self.pos(), format!("unexpected trailing {}", self.describe())))
        }
    }
}

/// Parses a sentence over `sig`, rejecting constructors outside `frag`.
pub fn parse_sentence(text: &str, sig: &Signature, frag: &FragmentConfig) -> Result<Sentence> {
    let mut p = Parser { toks: lex(text)?, at: 0, frag };
    let s = p.or_expr(sig)?;
    p.finish()?;
    Ok(s)
}

/// Parses the longest action starting at byte `offset`; returns it with the
/// byte offset just past it. Constructors are not gated here.
pub(crate) fn parse_action_at(text: &str, offset: usize, sig: &Signature) -> Result<(Action, usize)> {
    let full = FragmentConfig::full();
    let toks = lex_with(&text[offset..], true)?
        .into_iter()
        .map(|(t, p)| (t, p + offset))
        .collect();
    let mut p = Parser { toks, at: 0, frag: &full };
    let a = p.action(sig)?;
    Ok((a, p.pos()))
}

/// Parses an action over `sig`'s relations.
pub fn parse_action(text: &str, sig: &Signature, frag: &FragmentConfig) -> Result<Action> {
    let mut p = Parser { toks: lex(text)?, at: 0, frag };
    let a = p.action(sig)?;
    p.finish()?;
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["k"], ["l", "m"], ["p", "q"]).unwrap()
    }

    fn full(text: &str) -> Result<Sentence> {
        parse_sentence(text, &sig(), &FragmentConfig::full())
    }

    #[test]
    fn diamond_over_conjunction() {
        let s = full("<l>(p & ~k)").unwrap();
        let expected = Sentence::dia(
            Action::rel("l"),
            Sentence::and([Sentence::prop("p"), Sentence::neg(Sentence::nom("k"))]),
        );
        assert_eq!(s, expected);
    }

    #[test]
    fn constants() {
        assert_eq!(full("true").unwrap(), Sentence::And(vec![]));
        assert_eq!(full("false").unwrap(), Sentence::ff());
    }

    #[test]
    fn fragment_violation_names_the_operator() {
        let frag = FragmentConfig::ops_only([Op::Diamond]);
        let err = parse_sentence("exists x . p", &sig(), &frag).unwrap_err();
        assert_eq!(err, Error::Fragment { ctor: "exists" });
        let err = parse_sentence("<l*>p", &sig(), &frag).unwrap_err();
        assert_eq!(err, Error::Fragment { ctor: "star" });
    }

    #[test]
    fn derived_forms_expand() {
        assert_eq!(full("[l]p").unwrap(), full("~<l>~p").unwrap());
        assert_eq!(full("p | q").unwrap(), full("~(~p & ~q)").unwrap());
        assert_eq!(full("forall y . y").unwrap(), full("~exists y . ~y").unwrap());
    }

    #[test]
    fn prefix_binds_tighter_than_conjunction() {
        let s = full("down x . p & q").unwrap();
        assert_eq!(s, Sentence::and([Sentence::store("x", Sentence::prop("p")), Sentence::prop("q")]));
    }

    #[test]
    fn action_precedence() {
        let a = parse_action("l + m ; l*", &sig(), &FragmentConfig::full()).unwrap();
        let expected = Action::union(
            Action::rel("l"),
            Action::comp(Action::rel("m"), Action::star(Action::rel("l"))),
        );
        assert_eq!(a, expected);
    }

    #[test]
    fn errors_carry_positions_and_names() {
        match full("p & (q").unwrap_err() {
            Error::Parse { pos, .. } => assert_eq!(pos, 6),
            e => panic!("unexpected {e:?}"),
        }
        assert_eq!(full("r").unwrap_err(), Error::Undeclared { kind: "symbol", name: "r".into() });
        assert!(matches!(full("l"), Err(Error::Parse { .. })));
        assert!(matches!(full("<p>q"), Err(Error::Parse { .. })));
        assert!(matches!(full("p $"), Err(Error::Parse { pos: 2, .. })));
    }

    #[test]
    fn binders_scope_their_variable() {
        assert!(full("down x . @x p").is_ok());
        assert!(matches!(full("(down x . p) & x"), Err(Error::Undeclared { .. })));
        assert!(matches!(full("down p . p"), Err(Error::Parse { .. })));
        assert!(matches!(full("down x . down x . p"), Err(Error::Parse { .. })));
    }
}
