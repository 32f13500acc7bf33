//! Simple terms, exhaustive pre-traces and the translation into the
//! algebra over the piI arena.

use std::collections::{BTreeMap, BTreeSet};

use super::build::{disjoin, linear_at, par, Fresh};
use super::lts::{explore, outcome_term, Label, PreTrace};
use super::{Action, Term};
use crate::algebra::{obs_equiv, outcome, psync, Vector};
use crate::arenas::ArenaKind;
use crate::error::{usage, Result};
use crate::event::{Chan, Event, Loc, PiPoint, Pol, Sym};
use crate::plays::Play;
use crate::semiring::{Scalar, SemiringDescriptor};

/// Marker locations (`w.1` of each linear action) when `t` is simple.
fn markers(t: &Term, out: &mut Vec<u32>) -> bool {
    match t {
        Term::Scalar(s) => *s == s.descriptor().one(),
        Term::Choice(bs) => bs.iter().all(Action::is_inaction),
        Term::Par(a, b) => markers(a, out) && markers(b, out),
        Term::New(w, body) => match linear_parts(w, body) {
            Some((inner, marker)) => {
                out.push(marker);
                markers(inner, out)
            }
            None => markers(body, out),
        },
    }
}

fn single(t: &Term) -> Option<&Action> {
    match t {
        Term::Choice(bs) if bs.len() == 1 => Some(&bs[0]),
        _ => None,
    }
}

fn is_scalar(t: &Term, one: bool) -> bool {
    matches!(t, Term::Scalar(s) if if one { *s == s.descriptor().one() } else { s.is_zero() })
}

/// Matches `new w in (a.(P | w.1) | w.0 | ~w.1)`, giving `P` and the
/// location of `w.1`.
fn linear_parts<'a>(w: &Chan, body: &'a Term) -> Option<(&'a Term, u32)> {
    let Term::Par(left, witness) = body else { return None };
    let Term::Par(_, skip) = &**left else { return None };
    let (fire, skip, witness) = (linear_fire(body)?, single(skip)?, single(witness)?);
    let wpos = |a: &Action, pol: Pol, one: bool| a.subj == *w && a.pol == pol && is_scalar(&a.cont, one);
    if !wpos(skip, Pol::Pos, false) || !wpos(witness, Pol::Neg, true) || fire.subj.has_prefix(w) {
        return None;
    }
    let Term::Par(inner, mark) = &*fire.cont else { return None };
    let mark = single(mark)?;
    wpos(mark, Pol::Pos, true).then_some((&**inner, mark.loc))
}

/// The guarded action `a` of a linear-action body.
fn linear_fire(body: &Term) -> Option<&Action> {
    let Term::Par(left, _) = body else { return None };
    let Term::Par(fire, _) = &**left else { return None };
    single(fire)
}

pub fn is_simple(t: &Term) -> bool {
    markers(t, &mut Vec::new())
}

/// A combination `sum c_i . T_i` of simple terms equivalent to `t`.
pub fn to_simple(semiring: SemiringDescriptor, t: &Term) -> Vec<(Scalar, Term)> {
    let mut fresh = Fresh::avoiding(&[t]);
    decompose(semiring, t, &mut fresh)
}

fn decompose(semiring: SemiringDescriptor, t: &Term, fresh: &mut Fresh) -> Vec<(Scalar, Term)> {
    if is_simple(t) {
        return vec![(semiring.one(), t.clone())];
    }
    match t {
        Term::Scalar(s) if s.is_zero() => Vec::new(),
        Term::Scalar(s) => vec![(s.clone(), Term::Scalar(semiring.one()))],
        Term::Par(a, b) => {
            let (xs, ys) = (decompose(semiring, a, fresh), decompose(semiring, b, fresh));
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for (c, x) in &xs {
                for (d, y) in &ys {
                    out.push((c.times(d), Term::par(x.clone(), y.clone())));
                }
            }
            out
        }
        Term::New(x, p) => decompose(semiring, p, fresh).into_iter().map(|(c, q)| (c, Term::New(x.clone(), Box::new(q)))).collect(),
        Term::Choice(bs) => {
            let mut out = Vec::new();
            for a in bs {
                for (c, q) in decompose(semiring, &a.cont, fresh) {
                    out.push((c, linear_at(semiring, fresh, a.loc, &a.subj, a.pol, q)));
                }
            }
            let idle = bs
                .iter()
                .map(|a| Action { loc: a.loc, subj: a.subj.clone(), pol: a.pol, cont: Box::new(Term::Scalar(semiring.zero())) })
                .collect();
            out.push((semiring.one(), Term::Choice(idle)));
            out
        }
    }
}

/// Active inactions not hidden inside `t`, as (subject, polarity).
fn open_inactions(t: &Term) -> BTreeSet<(Chan, Pol)> {
    fn go(t: &Term, bound: &mut Vec<Chan>, out: &mut BTreeSet<(Chan, Pol)>) {
        match t {
            Term::Scalar(_) => {}
            Term::Choice(bs) => {
                for a in bs.iter().filter(|a| a.is_inaction()) {
                    if !bound.iter().any(|b| a.subj.has_prefix(b)) {
                        out.insert((a.subj.clone(), a.pol));
                    }
                }
            }
            Term::Par(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            Term::New(x, p) => {
                bound.push(x.clone());
                go(p, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Whether some parallel composition in `t` faces dual inactions.
fn facing_inactions(t: &Term) -> bool {
    match t {
        Term::Scalar(_) | Term::Choice(_) => false,
        Term::New(_, p) => facing_inactions(p),
        Term::Par(a, b) => {
            let right = open_inactions(b);
            open_inactions(a).iter().any(|(x, e)| right.contains(&(x.clone(), e.flip()))) || facing_inactions(a) || facing_inactions(b)
        }
    }
}

fn inaction_locations(t: &Term) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    t.visit_actions(&mut |a| {
        if a.is_inaction() {
            out.insert(a.loc);
        }
    });
    out
}

fn is_exhaustive(pt: &PreTrace, marks: &[u32]) -> bool {
    let fired: BTreeSet<u32> = pt.labels.iter().flat_map(Label::locations).collect();
    marks.iter().all(|m| fired.contains(m)) && !facing_inactions(&pt.residual)
}

/// Whether some hidden channel carries more linear actions of one polarity
/// than non-inaction actions of the other; each must fire against a
/// distinct partner, so such a term has no exhaustive pre-trace. Only
/// subjects equal to a hiding binder count: communication fuses derived
/// names, but never renames into or out of a binder.
fn starved(t: &Term) -> bool {
    let mut live: BTreeMap<(Chan, Pol), usize> = BTreeMap::new();
    t.visit_actions(&mut |a| {
        if !a.is_inaction() {
            *live.entry((a.subj.clone(), a.pol)).or_default() += 1;
        }
    });
    fn go(t: &Term, hidden: &mut Vec<Chan>, need: &mut BTreeMap<(Chan, Pol), usize>) {
        match t {
            Term::Scalar(_) | Term::Choice(_) => {}
            Term::Par(a, b) => {
                go(a, hidden, need);
                go(b, hidden, need);
            }
            Term::New(w, body) => match linear_parts(w, body) {
                Some((inner, _)) => {
                    let fire = linear_fire(body).expect("matched by linear_parts");
                    if hidden.contains(&fire.subj) {
                        *need.entry((fire.subj.clone(), fire.pol.flip())).or_default() += 1;
                    }
                    go(inner, hidden, need);
                }
                None => {
                    hidden.push(w.clone());
                    go(body, hidden, need);
                    hidden.pop();
                }
            },
        }
    }
    let mut need = BTreeMap::new();
    go(t, &mut Vec::new(), &mut need);
    need.iter().any(|(k, n)| live.get(k).copied().unwrap_or(0) < *n)
}

/// Pre-traces triggering every linear action and no inaction, with no
/// dual inactions left facing each other.
pub fn exhaustive_pretraces(t: &Term) -> Result<Vec<PreTrace>> {
    let mut marks = Vec::new();
    if !markers(t, &mut marks) {
        return usage(format!("not a simple term: {t}"));
    }
    if starved(t) {
        return Ok(Vec::new());
    }
    Ok(search_exhaustive(t, &marks))
}

fn search_exhaustive(t: &Term, marks: &[u32]) -> Vec<PreTrace> {
    let idle = inaction_locations(t);
    let all = explore(t, |l, _| l.locations().iter().all(|x| !idle.contains(x)));
    all.into_iter().map(|(pt, _)| pt).filter(|pt| is_exhaustive(pt, marks)).collect()
}

fn point(subj: &Chan, pol: Pol, loc: Loc) -> Event {
    Event::Pi(PiPoint { chan: subj.clone(), pol, loc })
}

fn visible_point(l: &Label) -> Option<Event> {
    match l {
        Label::Visible { subj, pol, loc } => Some(point(subj, *pol, Loc::N(*loc))),
        Label::Internal(..) => None,
    }
}

/// The trace of an exhaustive pre-trace of the simple term `t`.
pub fn induced_trace(t: &Term, pt: &PreTrace, alphabet: &BTreeSet<Sym>) -> Result<Play> {
    let mut marks = Vec::new();
    if !markers(t, &mut marks) {
        return usage(format!("not a simple term: {t}"));
    }
    if !is_exhaustive(pt, &marks) {
        return usage("the pre-trace is not exhaustive");
    }
    let mut names: BTreeSet<Chan> = alphabet.iter().map(|r| Chan { root: r.clone(), path: Vec::new() }).collect();
    let mut support = Vec::new();
    for l in &pt.labels {
        if let Label::Visible { subj, pol, loc } = l {
            names.insert(subj.child(*pol, *loc));
            support.push(point(subj, *pol, Loc::N(*loc)));
        }
    }
    for x in &names {
        for pol in [Pol::Pos, Pol::Neg] {
            support.push(point(x, pol, Loc::Bot));
            support.push(point(x, pol, Loc::Top));
        }
    }
    let mut pairs: Vec<(Event, Event)> = pt
        .order
        .iter()
        .filter_map(|(a, b)| Some((visible_point(a)?, visible_point(b)?)))
        .collect();
    for (x, pol) in open_inactions(&pt.residual) {
        if names.contains(&x) {
            pairs.push((point(&x, pol, Loc::Bot), point(&x, pol, Loc::Top)));
        }
    }
    Play::new(support, &pairs)
}

/// `t` with hidden roots renamed away from `alphabet`.
fn apart_from(t: &Term, alphabet: &BTreeSet<Sym>) -> Term {
    let probe = Term::Choice(
        alphabet
            .iter()
            .enumerate()
            .map(|(i, r)| Action {
                loc: i as u32 + 1,
                subj: Chan { root: r.clone(), path: Vec::new() },
                pol: Pol::Pos,
                cont: Box::new(Term::Scalar(SemiringDescriptor::nat().one())),
            })
            .collect(),
    );
    if alphabet.is_empty() {
        return t.clone();
    }
    // disjoin renames the hidden roots of its second argument; locations
    // shift uniformly, which no translation can observe
    disjoin(&probe, t)
}

/// The translation over `Pi(alphabet)`: pre-trace counts per induced trace,
/// recombined along the simple decomposition.
pub fn translate(semiring: SemiringDescriptor, t: &Term, alphabet: &BTreeSet<Sym>) -> Result<Vector> {
    let missing: Vec<String> = t.free_roots().difference(alphabet).map(|s| s.to_string()).collect();
    if !missing.is_empty() {
        return usage(format!("free names outside the alphabet: {}", missing.join(", ")));
    }
    let t = apart_from(t, alphabet);
    let mut out = Vector::zero(semiring, ArenaKind::Pi(alphabet.clone()));
    for (c, s) in to_simple(semiring, &t) {
        let mut counts: BTreeMap<Play, u64> = BTreeMap::new();
        for pt in exhaustive_pretraces(&s)? {
            *counts.entry(induced_trace(&s, &pt, alphabet)?).or_default() += 1;
        }
        for (p, k) in counts {
            out.add_term(p, c.times(&semiring.from_count(k)));
        }
    }
    Ok(out)
}

fn bar_event(e: &Event) -> Event {
    match e {
        Event::Pi(p) => Event::Pi(PiPoint {
            chan: p.chan.flip(),
            pol: p.pol.flip(),
            loc: match p.loc {
                Loc::Bot => Loc::Top,
                Loc::Top => Loc::Bot,
                n => n,
            },
        }),
        e => e.clone(),
    }
}

/// Polarities inverted and inaction slots exchanged, pointwise.
pub fn bar(u: &Vector) -> Result<Vector> {
    u.map_events(u.arena().clone(), bar_event)
}

fn joint_alphabet(p: &Term, q: &Term) -> BTreeSet<Sym> {
    p.free_roots().union(&q.free_roots()).cloned().collect()
}

/// Equivalence of terms through their translations.
pub fn term_equiv(semiring: SemiringDescriptor, p: &Term, q: &Term) -> Result<bool> {
    let alphabet = joint_alphabet(p, q);
    obs_equiv(&translate(semiring, p, &alphabet)?, &translate(semiring, q, &alphabet)?)
}

/// The operational outcome of `p | q` against the pairing of translations.
pub fn cross_check(semiring: SemiringDescriptor, p: &Term, q: &Term) -> Result<(Scalar, Scalar)> {
    let alphabet = joint_alphabet(p, q);
    let operational = outcome_term(semiring, &par(p, q));
    let tp = translate(semiring, p, &alphabet)?;
    let tq = translate(semiring, q, &alphabet)?;
    Ok((operational, outcome(&psync(&tp, &bar(&tq)?)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arenas::representant;
    use crate::picalc::{linear_action, oplus, parse_term};

    fn nat() -> SemiringDescriptor {
        SemiringDescriptor::nat()
    }

    fn p(s: &str) -> Term {
        parse_term(s, nat()).unwrap()
    }

    fn names(xs: &[&str]) -> BTreeSet<Sym> {
        xs.iter().map(|x| crate::event::sym(x)).collect()
    }

    fn lin(subj: &str, pol: Pol, body: &str) -> Term {
        linear_action(nat(), &Chan::root(subj), pol, "x", &p(body))
    }

    #[test]
    fn recognizer() {
        assert!(is_simple(&p("{1}")));
        assert!(is_simple(&p("a?(x).{0} + b!(y).{0}")));
        assert!(!is_simple(&p("{2}")));
        assert!(!is_simple(&p("a?(x).{1}")));
        let l = lin("a", Pol::Pos, "x!(y).{0}");
        assert!(is_simple(&l));
        assert!(is_simple(&Term::par(l.clone(), p("new q in q?(z).{0}"))));
        let mut m = Vec::new();
        assert!(markers(&l, &mut m));
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn decomposition_is_simple_and_counted() {
        let t = p("a?(x).b!(y).{1} + c!(z).{3} | {2}");
        let parts = to_simple(nat(), &t);
        assert!(parts.iter().all(|(_, s)| is_simple(s)));
        // (a^.(b^ + b.0) + c^ + idle) * 2
        assert_eq!(parts.len(), 4);
        let coeffs: Vec<Scalar> = parts.iter().map(|(c, _)| c.clone()).collect();
        assert!(coeffs.contains(&nat().from_count(6)));
        assert_eq!(to_simple(nat(), &p("{1}")), vec![(nat().one(), p("{1}"))]);
        assert!(to_simple(nat(), &p("{0}")).is_empty());
    }

    #[test]
    fn starved_parts_have_no_pretraces() {
        let (a, b) = (lin("a", Pol::Pos, "x!(y).{1}"), lin("a", Pol::Neg, "{1}"));
        let sums = [oplus(nat(), &a, &b), crate::picalc::par(&oplus(nat(), &a, &p("a!(z).{1}")), &b), new_in("a", &oplus(nat(), &a, &b)), p("new u in (u?(x).x!(y).{1} | u!(x).x?(z).{1})")];
        let (mut pruned, mut kept) = (0, 0);
        for t in &sums {
            for (_, part) in to_simple(nat(), t) {
                let mut marks = Vec::new();
                assert!(markers(&part, &mut marks));
                if starved(&part) {
                    pruned += 1;
                    assert!(search_exhaustive(&part, &marks).is_empty(), "{part}");
                } else {
                    kept += usize::from(!search_exhaustive(&part, &marks).is_empty());
                }
            }
        }
        assert!(pruned > 0 && kept > 0);
    }

    fn new_in(x: &str, t: &Term) -> Term {
        crate::picalc::new(x, t.clone())
    }

    #[test]
    fn exhaustive_examples() {
        let one = exhaustive_pretraces(&p("{1}")).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].labels.is_empty());
        let l = lin("u", Pol::Pos, "{1}");
        let ex = exhaustive_pretraces(&l).unwrap();
        assert!(!ex.is_empty());
        assert!(ex.iter().all(|pt| pt.labels.iter().any(|x| matches!(x, Label::Visible { subj, .. } if *subj == Chan::root("u")))));
        let idle = exhaustive_pretraces(&p("u?(x).{0}")).unwrap();
        assert_eq!(idle.len(), 1);
        assert!(idle[0].labels.is_empty());
        assert!(exhaustive_pretraces(&p("u?(x).{0} | u!(y).{0}")).unwrap().is_empty());
        assert!(exhaustive_pretraces(&p("u?(x).{1}")).is_err());
    }

    #[test]
    fn induced_trace_examples() {
        let a = names(&["u"]);
        let pt = &exhaustive_pretraces(&p("{1}")).unwrap()[0];
        let t = induced_trace(&p("{1}"), pt, &a).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.strict_pairs().is_empty());
        let l = lin("u", Pol::Pos, "{1}");
        let pts = exhaustive_pretraces(&l).unwrap();
        let t = induced_trace(&l, &pts[0], &a).unwrap();
        assert_eq!(t.len(), 9);
        let act = t.support().iter().find(|e| matches!(e, Event::Pi(x) if matches!(x.loc, Loc::N(_)))).unwrap().clone();
        let Event::Pi(ap) = &act else { unreachable!() };
        let revealed = ap.revealed().unwrap();
        for pol in [Pol::Pos, Pol::Neg] {
            assert!(t.index_of(&point(&revealed, pol, Loc::Bot)).is_some());
        }
        let s = p("u!(x).{0}");
        let pt = &exhaustive_pretraces(&s).unwrap()[0];
        let t = induced_trace(&s, pt, &a).unwrap();
        let u = Chan::root("u");
        assert!(t.leq(&point(&u, Pol::Neg, Loc::Bot), &point(&u, Pol::Neg, Loc::Top)));
        assert!(!t.leq(&point(&u, Pol::Pos, Loc::Bot), &point(&u, Pol::Pos, Loc::Top)));
        let partial = PreTrace { labels: BTreeSet::new(), order: BTreeSet::new(), residual: l.clone() };
        assert!(induced_trace(&l, &partial, &a).is_err());
    }

    #[test]
    fn translation_examples() {
        let a = names(&["u"]);
        let v = translate(nat(), &p("{5}"), &a).unwrap();
        assert_eq!(v.len(), 1);
        let (r, c) = v.terms().iter().next().unwrap();
        assert_eq!(*c, nat().from_count(5));
        assert_eq!(r.len(), 4);
        // two distinct pre-traces with one trace class
        let a = names(&["a"]);
        let v = translate(nat(), &p("a?(x).{1} + a?(y).{1}"), &a).unwrap();
        let mut per_class: BTreeMap<Play, Scalar> = BTreeMap::new();
        for (r, c) in v.terms() {
            let e = per_class.entry(representant(v.arena(), r).unwrap()).or_insert_with(|| nat().zero());
            *e = e.plus(c);
        }
        assert!(per_class.values().any(|c| *c == nat().from_count(2)));
        let (x, y) = (p("a?(x).{1}"), p("a!(y).{2}"));
        let sum = translate(nat(), &oplus(nat(), &x, &y), &a).unwrap();
        let parts = translate(nat(), &x, &a).unwrap().add(&translate(nat(), &y, &a).unwrap()).unwrap();
        assert!(obs_equiv(&sum, &parts).unwrap());
        assert!(translate(nat(), &x, &names(&["b"])).is_err());
    }

    #[test]
    fn bar_is_an_involution() {
        let a = names(&["u"]);
        let v = translate(nat(), &p("u?(x).x!(y).{1} + u!(z).{0}"), &a).unwrap();
        assert_eq!(bar(&bar(&v).unwrap()).unwrap(), v);
        let e = point(&Chan::root("u").child(Pol::Pos, 3), Pol::Neg, Loc::Bot);
        assert_eq!(bar_event(&e), point(&Chan::root("u").child(Pol::Neg, 3), Pol::Pos, Loc::Top));
    }

    #[test]
    fn equivalence_examples() {
        let t = |a: &str, b: &str| term_equiv(nat(), &p(a), &p(b)).unwrap();
        assert!(t("a?(x).{1} | b!(y).{1}", "b!(y).{1} | a?(x).{1}"));
        assert!(t("new u in (u?(x).{1} | u!(y).{3})", "{3}"));
        assert!(t("new u in u?(x).{1}", "{1}"));
        assert!(!t("a?(x).b?(y).{1}", "b?(y).a?(x).{1}"));
        assert!(!t("a?(x).{1}", "a?(x).{2}"));
    }

    #[test]
    fn cross_check_examples() {
        let one = p("{1}");
        let (x, y) = cross_check(nat(), &one, &one).unwrap();
        assert_eq!((x.clone(), y), (nat().one(), nat().one()));
        let (l, r) = (lin("u", Pol::Pos, "{1}"), lin("u", Pol::Neg, "{1}"));
        let (x, y) = cross_check(nat(), &l, &r).unwrap();
        assert_eq!(x, y);
        assert_eq!(x, nat().one());
        let (s, q) = (p("u?(x).x!(y).{0} | u!(z).{0}"), p("u!(w).{0}"));
        let parts: Vec<Term> = to_simple(nat(), &s).into_iter().map(|(_, t)| t).collect();
        for a in &parts {
            for b in to_simple(nat(), &q).into_iter().map(|(_, t)| t) {
                let (x, y) = cross_check(nat(), a, &b).unwrap();
                assert_eq!(x, y, "{a} against {b}");
            }
        }
    }
}
