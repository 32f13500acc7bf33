//! Derived constructions: disjoint parallel composition, the sum encoding,
//! scalar multiplication and linear actions.

use std::collections::{BTreeMap, BTreeSet};

use super::{fresh_root, Term};
use crate::event::{Chan, Pol, Sym};
use crate::semiring::{Scalar, SemiringDescriptor};

/// Supply of locations and reserved roots unused by a set of terms.
pub(crate) struct Fresh {
    next_loc: u32,
    roots: BTreeSet<Sym>,
}

impl Fresh {
    pub(crate) fn avoiding(terms: &[&Term]) -> Fresh {
        let mut roots = BTreeSet::new();
        let mut top = 0;
        for t in terms {
            roots.extend(t.all_roots());
            top = top.max(max_location(t));
        }
        Fresh { next_loc: top + 1, roots }
    }

    pub(crate) fn loc(&mut self) -> u32 {
        self.next_loc += 1;
        self.next_loc - 1
    }

    pub(crate) fn root(&mut self, prefix: &str) -> Chan {
        let r = fresh_root(prefix, &self.roots);
        self.roots.insert(r.clone());
        Chan { root: r, path: Vec::new() }
    }
}

/// Largest location in actions or channel paths.
fn max_location(t: &Term) -> u32 {
    let mut top = 0;
    let chan = |top: &mut u32, c: &Chan| {
        for &(_, l) in &c.path {
            *top = (*top).max(l);
        }
    };
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match t {
            Term::Scalar(_) => {}
            Term::Choice(bs) => {
                for a in bs {
                    chan(&mut top, &a.subj);
                    top = top.max(a.loc);
                    stack.push(&a.cont);
                }
            }
            Term::Par(a, b) => {
                stack.push(a);
                stack.push(b);
            }
            Term::New(x, p) => {
                chan(&mut top, x);
                stack.push(p);
            }
        }
    }
    top
}

fn bound_roots(t: &Term, out: &mut BTreeSet<Sym>) {
    match t {
        Term::Scalar(_) => {}
        Term::Choice(bs) => bs.iter().for_each(|a| bound_roots(&a.cont, out)),
        Term::Par(a, b) => {
            bound_roots(a, out);
            bound_roots(b, out);
        }
        Term::New(x, p) => {
            if x.path.is_empty() {
                out.insert(x.root.clone());
            }
            bound_roots(p, out);
        }
    }
}

/// Renames the root bound by `new old` to `new`, inside those scopes only.
fn rename_bound(t: &Term, old: &Sym, new: &Sym) -> Term {
    match t {
        Term::New(x, p) if x.path.is_empty() && x.root == *old => {
            let (from, to) = (Chan { root: old.clone(), path: vec![] }, Chan { root: new.clone(), path: vec![] });
            Term::New(to.clone(), Box::new(p.rename_prefix(&from, &to)))
        }
        Term::Scalar(_) => t.clone(),
        Term::Choice(bs) => Term::Choice(
            bs.iter()
                .map(|a| super::Action { loc: a.loc, subj: a.subj.clone(), pol: a.pol, cont: Box::new(rename_bound(&a.cont, old, new)) })
                .collect(),
        ),
        Term::Par(a, b) => Term::par(rename_bound(a, old, new), rename_bound(b, old, new)),
        Term::New(x, p) => Term::New(x.clone(), Box::new(rename_bound(p, old, new))),
    }
}

/// `q` relocated and with hidden roots renamed so that it shares no
/// location and no hidden name with `p`.
pub(crate) fn disjoin(p: &Term, q: &Term) -> Term {
    let taken = p.locations();
    let shift = if q.locations().is_disjoint(&taken) { 0 } else { max_location(p) };
    let mut q = if shift == 0 {
        q.clone()
    } else {
        let m: BTreeMap<u32, u32> = q.locations().into_iter().map(|l| (l, l + shift)).collect();
        q.relocate(&m)
    };
    let p_roots = p.all_roots();
    let mut avoid: BTreeSet<Sym> = p_roots.union(&q.all_roots()).cloned().collect();
    let mut qb = BTreeSet::new();
    bound_roots(&q, &mut qb);
    for r in qb.into_iter().filter(|r| p_roots.contains(r)) {
        let fresh = (1..).map(|k| crate::event::sym(&format!("{r}'{k}"))).find(|c| !avoid.contains(c)).expect("unbounded");
        avoid.insert(fresh.clone());
        q = rename_bound(&q, &r, &fresh);
    }
    q
}

/// Parallel composition with locations and hidden names kept apart.
pub fn par(p: &Term, q: &Term) -> Term {
    let q = disjoin(p, q);
    // hidden names of p must not capture free names of q
    let q_roots = q.all_roots();
    let mut pb = BTreeSet::new();
    bound_roots(p, &mut pb);
    let mut p = p.clone();
    let mut avoid: BTreeSet<Sym> = p.all_roots().union(&q_roots).cloned().collect();
    for r in pb.into_iter().filter(|r| q_roots.contains(r)) {
        let fresh = (1..).map(|k| crate::event::sym(&format!("{r}'{k}"))).find(|c| !avoid.contains(c)).expect("unbounded");
        avoid.insert(fresh.clone());
        p = rename_bound(&p, &r, &fresh);
    }
    Term::par(p, q)
}

pub fn new(x: &str, p: Term) -> Term {
    Term::New(Chan::root(x), Box::new(p))
}

/// `new u in ((u.P | u.Q) | ~u.1)` with `u` fresh.
pub fn oplus(semiring: SemiringDescriptor, p: &Term, q: &Term) -> Term {
    let q = disjoin(p, q);
    let mut fresh = Fresh::avoiding(&[p, &q]);
    let u = fresh.root("o");
    let (l1, l2, l3) = (fresh.loc(), fresh.loc(), fresh.loc());
    let left = Term::action(l1, u.clone(), Pol::Pos, p.clone());
    let right = Term::action(l2, u.clone(), Pol::Pos, q);
    let trigger = Term::action(l3, u.clone(), Pol::Neg, Term::Scalar(semiring.one()));
    Term::New(u, Box::new(Term::par(Term::par(left, right), trigger)))
}

/// `lambda | P`.
pub fn scalar_mult(lambda: Scalar, p: &Term) -> Term {
    Term::par(Term::Scalar(lambda), p.clone())
}

/// The linear action on `subj` with polarity `pol` whose object is the
/// free root `x` of `p`.
pub fn linear_action(semiring: SemiringDescriptor, subj: &Chan, pol: Pol, x: &str, p: &Term) -> Term {
    let mut fresh = Fresh::avoiding(&[p]);
    fresh.roots.insert(subj.root.clone());
    let loc = fresh.loc();
    let body = p.rename_prefix(&Chan::root(x), &subj.child(pol, loc));
    linear_at(semiring, &mut fresh, loc, subj, pol, body)
}

/// `new w in (a.(P | w.1) | w.0 | ~w.1)`, `a` at location `loc`.
pub(crate) fn linear_at(semiring: SemiringDescriptor, fresh: &mut Fresh, loc: u32, subj: &Chan, pol: Pol, body: Term) -> Term {
    let w = fresh.root("w");
    let (l1, l2, l3) = (fresh.loc(), fresh.loc(), fresh.loc());
    let one = || Term::Scalar(semiring.one());
    let fire = Term::action(loc, subj.clone(), pol, Term::par(body, Term::action(l1, w.clone(), Pol::Pos, one())));
    let skip = Term::action(l2, w.clone(), Pol::Pos, Term::Scalar(semiring.zero()));
    let witness = Term::action(l3, w.clone(), Pol::Neg, one());
    Term::New(w, Box::new(Term::par(Term::par(fire, skip), witness)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picalc::parse_term;

    fn nat() -> SemiringDescriptor {
        SemiringDescriptor::nat()
    }

    #[test]
    fn par_keeps_things_apart() {
        let p = parse_term("new a in a?(x).{1} | b!(y).{1}", nat()).unwrap();
        let q = parse_term("a!(x).{1} | new b in b?(z).{1}", nat()).unwrap();
        let t = par(&p, &q);
        let locs = t.locations();
        assert_eq!(locs.len(), 4);
        let Term::Par(l, r) = &t else { panic!() };
        assert!(l.all_roots().iter().all(|s| s.as_ref() != "a") || r.free_roots().iter().all(|s| s.as_ref() != "a"));
        assert_eq!(t.free_roots().into_iter().map(|s| s.to_string()).collect::<Vec<_>>(), vec!["a", "b"]);
    }

    #[test]
    fn relocation_moves_paths() {
        let p = parse_term("u?(x).x!(y).{1}", nat()).unwrap();
        let t = par(&p, &p);
        let mut subjects = Vec::new();
        t.visit_actions(&mut |a| subjects.push(a.subj.to_string()));
        assert_eq!(subjects, vec!["u", "u.+1", "u", "u.+3"]);
    }

    #[test]
    fn encodings_are_fresh() {
        let p = parse_term("u?(x).{1}", nat()).unwrap();
        let s = oplus(nat(), &p, &p);
        assert_eq!(s.locations().len(), 5);
        let l = linear_action(nat(), &Chan::root("u"), Pol::Pos, "x", &parse_term("x!(y).{1}", nat()).unwrap());
        assert_eq!(l.locations().len(), 5);
        assert_eq!(l.free_roots().into_iter().map(|s| s.to_string()).collect::<Vec<_>>(), vec!["u"]);
    }
}
