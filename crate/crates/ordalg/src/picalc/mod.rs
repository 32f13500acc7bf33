//! Finite located piI terms with outcomes, their interactions, and their
//! translation into plays over the piI arena.
//!
//! Names are abstract channels throughout: the object bound by the action
//! at location `n` with subject `x` and polarity `e` is `x.en`, so no
//! renaming is ever needed to tell bound names apart. Hidden names
//! introduced by users are plain roots kept distinct from every other name.

mod build;
mod lts;
mod parse;
mod simple;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::event::{sym, Chan, Pol, Sym};
use crate::semiring::Scalar;

pub use build::{linear_action, new, oplus, par, scalar_mult};
pub use lts::{dependency_order, outcome_by_runs, outcome_term, runs, state, transitions, Label, PreTrace};
pub use parse::parse_term;
pub use simple::{
    bar, cross_check, exhaustive_pretraces, induced_trace, is_simple, term_equiv, to_simple, translate,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Scalar(Scalar),
    /// External choice; never empty.
    Choice(Vec<Action>),
    Par(Box<Term>, Box<Term>),
    New(Chan, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub loc: u32,
    pub subj: Chan,
    pub pol: Pol,
    pub cont: Box<Term>,
}

impl Action {
    pub fn object(&self) -> Chan {
        self.subj.child(self.pol, self.loc)
    }

    /// `a.0`: firing it annihilates every run.
    pub fn is_inaction(&self) -> bool {
        matches!(&*self.cont, Term::Scalar(s) if s.is_zero())
    }
}

impl Term {
    pub fn action(loc: u32, subj: Chan, pol: Pol, cont: Term) -> Term {
        Term::Choice(vec![Action { loc, subj, pol, cont: Box::new(cont) }])
    }

    pub fn par(a: Term, b: Term) -> Term {
        Term::Par(Box::new(a), Box::new(b))
    }

    pub fn locations(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.visit_actions(&mut |a| {
            out.insert(a.loc);
        });
        out
    }

    pub(crate) fn visit_actions(&self, f: &mut impl FnMut(&Action)) {
        match self {
            Term::Scalar(_) => {}
            Term::Choice(bs) => {
                for a in bs {
                    f(a);
                    a.cont.visit_actions(f);
                }
            }
            Term::Par(a, b) => {
                a.visit_actions(f);
                b.visit_actions(f);
            }
            Term::New(_, p) => p.visit_actions(f),
        }
    }

    /// Free names, as abstract channels.
    pub fn free_names(&self) -> BTreeSet<Chan> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Chan>, out: &mut BTreeSet<Chan>) {
        match self {
            Term::Scalar(_) => {}
            Term::Choice(bs) => {
                for a in bs {
                    if !bound.iter().any(|b| a.subj.has_prefix(b)) {
                        out.insert(a.subj.clone());
                    }
                    bound.push(a.object());
                    a.cont.collect_free(bound, out);
                    bound.pop();
                }
            }
            Term::Par(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Term::New(x, p) => {
                bound.push(x.clone());
                p.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Roots of the free names: the alphabet a term needs.
    pub fn free_roots(&self) -> BTreeSet<Sym> {
        self.free_names().into_iter().map(|c| c.root).collect()
    }

    /// Every root mentioned anywhere, bound or free.
    pub fn all_roots(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_roots(&mut out);
        out
    }

    fn collect_roots(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Term::Scalar(_) => {}
            Term::Choice(bs) => {
                for a in bs {
                    out.insert(a.subj.root.clone());
                    a.cont.collect_roots(out);
                }
            }
            Term::Par(a, b) => {
                a.collect_roots(out);
                b.collect_roots(out);
            }
            Term::New(x, p) => {
                out.insert(x.root.clone());
                p.collect_roots(out);
            }
        }
    }

    /// Renames every channel through `f`.
    pub(crate) fn map_chans(&self, f: &impl Fn(&Chan) -> Chan) -> Term {
        match self {
            Term::Scalar(s) => Term::Scalar(s.clone()),
            Term::Choice(bs) => Term::Choice(
                bs.iter()
                    .map(|a| Action { loc: a.loc, subj: f(&a.subj), pol: a.pol, cont: Box::new(a.cont.map_chans(f)) })
                    .collect(),
            ),
            Term::Par(a, b) => Term::par(a.map_chans(f), b.map_chans(f)),
            Term::New(x, p) => Term::New(f(x), Box::new(p.map_chans(f))),
        }
    }

    /// Replaces the prefix `from` by `to` in every channel.
    pub(crate) fn rename_prefix(&self, from: &Chan, to: &Chan) -> Term {
        self.map_chans(&|c| c.replace_prefix(from, to).unwrap_or_else(|| c.clone()))
    }

    /// Moves locations through `m`, in actions and in channel paths alike.
    pub(crate) fn relocate(&self, m: &BTreeMap<u32, u32>) -> Term {
        let mv = |l: u32| m.get(&l).copied().unwrap_or(l);
        let chan = |c: &Chan| Chan { root: c.root.clone(), path: c.path.iter().map(|&(p, l)| (p, mv(l))).collect() };
        match self {
            Term::Scalar(s) => Term::Scalar(s.clone()),
            Term::Choice(bs) => Term::Choice(
                bs.iter()
                    .map(|a| Action { loc: mv(a.loc), subj: chan(&a.subj), pol: a.pol, cont: Box::new(a.cont.relocate(m)) })
                    .collect(),
            ),
            Term::Par(a, b) => Term::par(a.relocate(m), b.relocate(m)),
            Term::New(x, p) => Term::New(chan(x), Box::new(p.relocate(m))),
        }
    }

    /// Chains of restrictions sorted, so that terms equal up to commuting
    /// restrictions compare equal.
    pub fn normalized(&self) -> Term {
        match self {
            Term::Scalar(_) => self.clone(),
            Term::Choice(bs) => Term::Choice(
                bs.iter()
                    .map(|a| Action { loc: a.loc, subj: a.subj.clone(), pol: a.pol, cont: Box::new(a.cont.normalized()) })
                    .collect(),
            ),
            Term::Par(a, b) => Term::par(a.normalized(), b.normalized()),
            Term::New(..) => {
                let mut names = Vec::new();
                let mut t = self;
                while let Term::New(x, p) = t {
                    names.push(x.clone());
                    t = p;
                }
                names.sort();
                let mut out = t.normalized();
                for x in names.into_iter().rev() {
                    out = Term::New(x, Box::new(out));
                }
                out
            }
        }
    }
}

/// A root not among `avoid`, in the reserved `%` namespace.
pub(crate) fn fresh_root(prefix: &str, avoid: &BTreeSet<Sym>) -> Sym {
    (0u32..).map(|k| sym(&format!("%{prefix}{k}"))).find(|s| !avoid.contains(s)).expect("unbounded")
}

fn fmt_action(f: &mut fmt::Formatter<'_>, a: &Action) -> fmt::Result {
    let mark = match a.pol {
        Pol::Pos => '?',
        Pol::Neg => '!',
    };
    write!(f, "{}{}@{}({}).", a.subj, mark, a.loc, a.object())?;
    match &*a.cont {
        t @ (Term::Scalar(_) | Term::Choice(_)) if !matches!(t, Term::Choice(bs) if bs.len() > 1) => write!(f, "{t}"),
        t => write!(f, "({t})"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Scalar(s) => write!(f, "{{{s}}}"),
            Term::Choice(bs) => {
                for (i, a) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    fmt_action(f, a)?;
                }
                Ok(())
            }
            Term::Par(a, b) => {
                let side = |f: &mut fmt::Formatter<'_>, t: &Term| match t {
                    Term::New(..) => write!(f, "({t})"),
                    _ => write!(f, "{t}"),
                };
                side(f, a)?;
                f.write_str(" | ")?;
                side(f, b)
            }
            Term::New(x, p) => write!(f, "new {x} in {p}"),
        }
    }
}
