use std::collections::{BTreeMap, BTreeSet};

use super::{Action, Term};
use crate::error::{Error, Result};
use crate::event::{Chan, Pol};
use crate::semiring::SemiringDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Scalar(String),
    Num(u32),
    Sym(char),
    New,
    In,
    End,
}

fn err(p: Pos, msg: impl Into<String>) -> Error {
    Error::Parse { line: p.line, col: p.col, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let step = |i: &mut usize, col: &mut usize| {
            *i += 1;
            *col += 1;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => step(&mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '}' && chars[j] != '\n' {
                    j += 1;
                }
                if j == chars.len() || chars[j] != '}' {
                    return Err(err(pos, "unterminated scalar, expected `}`"));
                }
                out.push((Tok::Scalar(chars[start..j].iter().collect::<String>().trim().to_string()), pos));
                col += j + 1 - i;
                i = j + 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    step(&mut i, &mut col);
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| err(pos, format!("location `{s}` out of range")))?;
                out.push((Tok::Num(n), pos));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    step(&mut i, &mut col);
                }
                let s: String = chars[start..i].iter().collect();
                out.push((
                    match s.as_str() {
                        "new" => Tok::New,
                        "in" => Tok::In,
                        _ => Tok::Ident(s),
                    },
                    pos,
                ));
            }
            '?' | '!' | '@' | '(' | ')' | '.' | '+' | '|' => {
                out.push((Tok::Sym(c), pos));
                step(&mut i, &mut col);
            }
            _ => return Err(err(pos, format!("unexpected character `{c}`"))),
        }
    }
    out.push((Tok::End, Pos { line, col }));
    Ok(out)
}

#[derive(Debug, Clone)]
struct RawAct {
    subj: String,
    pol: Pol,
    loc: Option<(u32, Pos)>,
    obj: String,
    obj_pos: Pos,
    cont: Box<Raw>,
}

#[derive(Debug, Clone)]
enum Raw {
    Scalar(String, Pos),
    Choice(Vec<RawAct>),
    Par(Box<Raw>, Box<Raw>),
    New(String, Pos, Box<Raw>),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<Pos> {
        match self.bump() {
            (Tok::Sym(d), p) if d == c => Ok(p),
            (t, p) => Err(err(p, format!("expected `{c}`, found {}", describe(&t)))),
        }
    }

    fn ident(&mut self) -> Result<(String, Pos)> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(err(p, format!("expected a name, found {}", describe(&t)))),
        }
    }

    fn expr(&mut self) -> Result<Raw> {
        let mut acc = self.choice()?;
        while *self.peek() == Tok::Sym('|') {
            self.bump();
            let rhs = self.choice()?;
            acc = Raw::Par(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn choice(&mut self) -> Result<Raw> {
        let first = self.prefix()?;
        if *self.peek() != Tok::Sym('+') {
            return Ok(first);
        }
        let mut branches = Vec::new();
        let mut part = first;
        let mut at = self.pos();
        loop {
            match part {
                Raw::Choice(bs) => branches.extend(bs),
                _ => return Err(err(at, "both sides of `+` must be action branchings")),
            }
            if *self.peek() != Tok::Sym('+') {
                break;
            }
            at = self.pos();
            self.bump();
            part = self.prefix()?;
        }
        Ok(Raw::Choice(branches))
    }

    fn prefix(&mut self) -> Result<Raw> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Scalar(s) => {
                self.bump();
                Ok(Raw::Scalar(s, pos))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::New => {
                self.bump();
                let (x, xp) = self.ident()?;
                match self.bump() {
                    (Tok::In, _) => {}
                    (t, p) => return Err(err(p, format!("expected `in`, found {}", describe(&t)))),
                }
                let body = self.expr()?;
                Ok(Raw::New(x, xp, Box::new(body)))
            }
            Tok::Ident(_) => {
                let (subj, _) = self.ident()?;
                let pol = match self.bump() {
                    (Tok::Sym('?'), _) => Pol::Pos,
                    (Tok::Sym('!'), _) => Pol::Neg,
                    (t, p) => return Err(err(p, format!("expected `?` or `!`, found {}", describe(&t)))),
                };
                let loc = if *self.peek() == Tok::Sym('@') {
                    self.bump();
                    match self.bump() {
                        (Tok::Num(n), p) => Some((n, p)),
                        (t, p) => return Err(err(p, format!("expected a location, found {}", describe(&t)))),
                    }
                } else {
                    None
                };
                self.expect('(')?;
                let (obj, obj_pos) = self.ident()?;
                self.expect(')')?;
                self.expect('.')?;
                let cont = self.prefix()?;
                Ok(Raw::Choice(vec![RawAct { subj, pol, loc, obj, obj_pos, cont: Box::new(cont) }]))
            }
            t => Err(err(pos, format!("expected a term, found {}", describe(&t)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("name `{s}`"),
        Tok::Scalar(s) => format!("scalar `{{{s}}}`"),
        Tok::Num(n) => format!("number `{n}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::New => "`new`".into(),
        Tok::In => "`in`".into(),
        Tok::End => "end of input".into(),
    }
}

fn visit_acts<'a>(r: &'a Raw, f: &mut impl FnMut(&'a RawAct)) {
    match r {
        Raw::Scalar(..) => {}
        Raw::Choice(bs) => {
            for a in bs {
                f(a);
                visit_acts(&a.cont, f);
            }
        }
        Raw::Par(a, b) => {
            visit_acts(a, f);
            visit_acts(b, f);
        }
        Raw::New(_, _, p) => visit_acts(p, f),
    }
}

/// Identifiers used free, and binders of `new` in source order.
fn scan(r: &Raw, bound: &mut Vec<String>, free: &mut BTreeSet<String>, news: &mut Vec<String>, all: &mut BTreeSet<String>) {
    match r {
        Raw::Scalar(..) => {}
        Raw::Choice(bs) => {
            for a in bs {
                all.insert(a.subj.clone());
                all.insert(a.obj.clone());
                if !bound.contains(&a.subj) {
                    free.insert(a.subj.clone());
                }
                bound.push(a.obj.clone());
                scan(&a.cont, bound, free, news, all);
                bound.pop();
            }
        }
        Raw::Par(a, b) => {
            scan(a, bound, free, news, all);
            scan(b, bound, free, news, all);
        }
        Raw::New(x, _, p) => {
            all.insert(x.clone());
            news.push(x.clone());
            bound.push(x.clone());
            scan(p, bound, free, news, all);
            bound.pop();
        }
    }
}

struct Resolver {
    semiring: SemiringDescriptor,
    locs: BTreeMap<*const RawAct, u32>,
    /// New binders in source order and the root each one receives.
    new_roots: Vec<String>,
    next_new: usize,
}

impl Resolver {
    fn resolve(&mut self, r: &Raw, env: &mut Vec<(String, Chan)>) -> Result<Term> {
        match r {
            Raw::Scalar(s, p) => {
                let v = self.semiring.parse_literal(s).map_err(|e| err(*p, e.to_string()))?;
                Ok(Term::Scalar(v))
            }
            Raw::Choice(bs) => {
                let mut out = Vec::with_capacity(bs.len());
                for a in bs {
                    let loc = self.locs[&(a as *const RawAct)];
                    let subj = match env.iter().rev().find(|(n, _)| *n == a.subj) {
                        Some((_, c)) => c.clone(),
                        None => Chan::root(&a.subj),
                    };
                    if env.iter().any(|(n, _)| *n == a.obj) {
                        return Err(err(a.obj_pos, format!("name `{}` shadows an enclosing binder", a.obj)));
                    }
                    let object = subj.child(a.pol, loc);
                    env.push((a.obj.clone(), object));
                    let cont = self.resolve(&a.cont, env);
                    env.pop();
                    out.push(Action { loc, subj, pol: a.pol, cont: Box::new(cont?) });
                }
                Ok(Term::Choice(out))
            }
            Raw::Par(a, b) => Ok(Term::par(self.resolve(a, env)?, self.resolve(b, env)?)),
            Raw::New(x, p, body) => {
                if env.iter().any(|(n, _)| n == x) {
                    return Err(err(*p, format!("name `{x}` shadows an enclosing binder")));
                }
                let root = self.new_roots[self.next_new].clone();
                self.next_new += 1;
                let c = Chan::root(&root);
                env.push((x.clone(), c.clone()));
                let t = self.resolve(body, env);
                env.pop();
                Ok(Term::New(c, Box::new(t?)))
            }
        }
    }
}

/// Parses the concrete term syntax. Locations left implicit are assigned
/// left to right, skipping explicit ones; hidden names clashing with any
/// other name get a primed variant `x'k`.
pub fn parse_term(text: &str, semiring: SemiringDescriptor) -> Result<Term> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let raw = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(err(p.pos(), format!("unexpected {}", describe(p.peek()))));
    }

    let mut explicit: BTreeSet<u32> = BTreeSet::new();
    let mut dup = None;
    visit_acts(&raw, &mut |a| {
        if let Some((n, pos)) = a.loc {
            if !explicit.insert(n) && dup.is_none() {
                dup = Some((n, pos));
            }
        }
    });
    if let Some((n, pos)) = dup {
        return Err(err(pos, format!("location {n} used twice")));
    }
    let mut locs = BTreeMap::new();
    let mut next = 1u32;
    visit_acts(&raw, &mut |a| {
        let l = match a.loc {
            Some((n, _)) => n,
            None => {
                while explicit.contains(&next) {
                    next += 1;
                }
                next += 1;
                next - 1
            }
        };
        locs.insert(a as *const RawAct, l);
    });

    let (mut free, mut news, mut all) = (BTreeSet::new(), Vec::new(), BTreeSet::new());
    scan(&raw, &mut Vec::new(), &mut free, &mut news, &mut all);
    let mut taken: BTreeSet<String> = free.clone();
    let mut new_roots = Vec::with_capacity(news.len());
    for x in &news {
        let root = if taken.contains(x) {
            (1..).map(|k| format!("{x}'{k}")).find(|c| !taken.contains(c) && !all.contains(c)).expect("unbounded")
        } else {
            x.clone()
        };
        taken.insert(root.clone());
        new_roots.push(root);
    }
    let mut r = Resolver { semiring, locs, new_roots, next_new: 0 };
    r.resolve(&raw, &mut Vec::new())
}
