//! The decorated transition system, pre-traces, runs and outcomes.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::{Action, Term};
use crate::event::{Chan, Pol};
use crate::semiring::{Scalar, SemiringDescriptor};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Visible { subj: Chan, pol: Pol, loc: u32 },
    /// Communication between two locations, smaller first.
    Internal(u32, u32),
}

impl Label {
    fn internal(a: u32, b: u32) -> Label {
        Label::Internal(a.min(b), a.max(b))
    }

    pub fn locations(&self) -> Vec<u32> {
        match self {
            Label::Visible { loc, .. } => vec![*loc],
            Label::Internal(a, b) => vec![*a, *b],
        }
    }

    pub fn is_visible(&self) -> bool {
        matches!(self, Label::Visible { .. })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Visible { subj, pol: Pol::Pos, loc } => write!(f, "{subj}?@{loc}"),
            Label::Visible { subj, pol: Pol::Neg, loc } => write!(f, "{subj}!@{loc}"),
            Label::Internal(a, b) => write!(f, "{{{a},{b}}}"),
        }
    }
}

/// A homotopy class of interactions, identified with its label set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreTrace {
    pub labels: BTreeSet<Label>,
    /// Strict causal pairs: `a` before `b` in every member interaction.
    pub order: BTreeSet<(Label, Label)>,
    pub residual: Term,
}

/// Every one-step transition, in a deterministic order.
pub fn transitions(t: &Term) -> Vec<(Label, Term)> {
    match t {
        Term::Scalar(_) => Vec::new(),
        Term::Choice(bs) => bs
            .iter()
            .map(|a| (Label::Visible { subj: a.subj.clone(), pol: a.pol, loc: a.loc }, (*a.cont).clone()))
            .collect(),
        Term::Par(p, q) => {
            let (tp, tq) = (transitions(p), transitions(q));
            let mut out = Vec::with_capacity(tp.len() + tq.len());
            for (l, p2) in &tp {
                if let Label::Visible { subj: u, pol, loc: i } = l {
                    for (m, q2) in &tq {
                        if let Label::Visible { subj: v, pol: qpol, loc: k } = m {
                            if u == v && *qpol == pol.flip() {
                                let x = u.child(*pol, *i);
                                let y = u.child(*qpol, *k);
                                let fused = Term::par(p2.clone(), q2.rename_prefix(&y, &x));
                                out.push((Label::internal(*i, *k), Term::New(x, Box::new(fused))));
                            }
                        }
                    }
                }
            }
            out.extend(tp.into_iter().map(|(l, p2)| (l, Term::par(p2, (**q).clone()))));
            out.extend(tq.into_iter().map(|(l, q2)| (l, Term::par((**p).clone(), q2))));
            out
        }
        Term::New(x, p) => transitions(p)
            .into_iter()
            .filter(|(l, _)| !matches!(l, Label::Visible { subj, .. } if subj.has_prefix(x)))
            .map(|(l, p2)| (l, Term::New(x.clone(), Box::new(p2))))
            .collect(),
    }
}

pub fn state(semiring: SemiringDescriptor, t: &Term) -> Scalar {
    match t {
        Term::Scalar(s) => s.clone(),
        Term::Choice(_) => semiring.one(),
        Term::Par(a, b) => state(semiring, a).times(&state(semiring, b)),
        Term::New(_, p) => state(semiring, p),
    }
}

struct Node {
    term: Term,
    normal: Term,
    order: BTreeSet<(Label, Label)>,
    maximal: bool,
}

/// All pre-traces reachable through transitions accepted by `keep`,
/// explored layer by layer so that causal orders intersect every
/// interaction reaching a label set.
pub(crate) fn explore(t: &Term, keep: impl Fn(&Label, &Term) -> bool) -> Vec<(PreTrace, bool)> {
    let mut out = Vec::new();
    let mut layer: BTreeMap<BTreeSet<Label>, Node> = BTreeMap::new();
    layer.insert(BTreeSet::new(), Node { term: t.clone(), normal: t.normalized(), order: BTreeSet::new(), maximal: true });
    while !layer.is_empty() {
        let mut next: BTreeMap<BTreeSet<Label>, Node> = BTreeMap::new();
        for (labels, node) in layer.iter_mut() {
            for (l, t2) in transitions(&node.term) {
                if !keep(&l, &t2) {
                    continue;
                }
                node.maximal = false;
                let mut key = labels.clone();
                key.insert(l.clone());
                let mut order = node.order.clone();
                order.extend(labels.iter().map(|x| (x.clone(), l.clone())));
                match next.get_mut(&key) {
                    Some(existing) => {
                        assert_eq!(existing.normal, t2.normalized(), "reorderings must reach the same term");
                        existing.order = existing.order.intersection(&order).cloned().collect();
                    }
                    None => {
                        let normal = t2.normalized();
                        next.insert(key, Node { term: t2, normal, order, maximal: true });
                    }
                }
            }
        }
        for (labels, node) in std::mem::take(&mut layer) {
            out.push((PreTrace { labels, order: node.order, residual: node.term }, node.maximal));
        }
        layer = next;
    }
    out
}

/// Runs: classes of maximal internal paths, by exhaustive exploration.
pub fn runs(t: &Term) -> Vec<PreTrace> {
    explore(t, |l, _| !l.is_visible()).into_iter().filter(|(_, m)| *m).map(|(p, _)| p).collect()
}

fn has_active_zero(t: &Term) -> bool {
    match t {
        Term::Scalar(s) => s.is_zero(),
        Term::Choice(_) => false,
        Term::Par(a, b) => has_active_zero(a) || has_active_zero(b),
        Term::New(_, p) => has_active_zero(p),
    }
}

fn active_choices<'a>(t: &'a Term, out: &mut Vec<&'a [Action]>) {
    match t {
        Term::Scalar(_) => {}
        Term::Choice(bs) => out.push(bs),
        Term::Par(a, b) => {
            active_choices(a, out);
            active_choices(b, out);
        }
        Term::New(_, p) => active_choices(p, out),
    }
}

/// A communication that every nonzero maximal run must contain: both
/// sides only compete with inactions, and no other non-inaction action
/// anywhere uses the channel.
fn is_forced(t: &Term, i: u32, k: u32) -> bool {
    let mut choices = Vec::new();
    active_choices(t, &mut choices);
    let mut subj = None;
    for bs in choices {
        if let Some(a) = bs.iter().find(|a| a.loc == i || a.loc == k) {
            if bs.iter().any(|b| b.loc != a.loc && !b.is_inaction()) {
                return false;
            }
            subj = Some(a.subj.clone());
        }
    }
    let Some(s) = subj else { return false };
    let mut others = false;
    t.visit_actions(&mut |a| {
        if a.subj == s && a.loc != i && a.loc != k && !a.is_inaction() {
            others = true;
        }
    });
    !others
}

/// The sum of final states over all runs. Runs through an active zero are
/// skipped and forced communications are fired without branching; both
/// only drop runs whose state is zero.
pub fn outcome_term(semiring: SemiringDescriptor, t: &Term) -> Scalar {
    let mut total = semiring.zero();
    let mut seen: HashSet<BTreeSet<Label>> = HashSet::new();
    let mut stack = vec![(BTreeSet::new(), t.clone())];
    while let Some((labels, term)) = stack.pop() {
        if has_active_zero(&term) {
            continue;
        }
        let steps: Vec<(Label, Term)> = transitions(&term).into_iter().filter(|(l, _)| !l.is_visible()).collect();
        if steps.is_empty() {
            total = total.plus(&state(semiring, &term));
            continue;
        }
        let forced = steps.iter().position(|(l, _)| match l {
            Label::Internal(i, k) => is_forced(&term, *i, *k),
            Label::Visible { .. } => false,
        });
        let chosen: Vec<(Label, Term)> = match forced {
            Some(ix) => vec![steps.into_iter().nth(ix).expect("index in range")],
            None => steps,
        };
        for (l, t2) in chosen {
            let mut key = labels.clone();
            key.insert(l);
            if seen.insert(key.clone()) {
                stack.push((key, t2));
            }
        }
    }
    total
}

/// The outcome as a plain sum over exhaustively enumerated runs.
pub fn outcome_by_runs(semiring: SemiringDescriptor, t: &Term) -> Scalar {
    runs(t).iter().fold(semiring.zero(), |acc, r| acc.plus(&state(semiring, &r.residual)))
}

/// Causal order predicted by prefixing alone: labels ordered when a
/// location of one is below a location of the other, closed transitively.
pub fn dependency_order(t: &Term, labels: &BTreeSet<Label>) -> BTreeSet<(Label, Label)> {
    fn ancestors(t: &Term, above: &mut Vec<u32>, out: &mut BTreeMap<u32, Vec<u32>>) {
        match t {
            Term::Scalar(_) => {}
            Term::Choice(bs) => {
                for a in bs {
                    out.insert(a.loc, above.clone());
                    above.push(a.loc);
                    ancestors(&a.cont, above, out);
                    above.pop();
                }
            }
            Term::Par(a, b) => {
                ancestors(a, above, out);
                ancestors(b, above, out);
            }
            Term::New(_, p) => ancestors(p, above, out),
        }
    }
    let mut anc = BTreeMap::new();
    ancestors(t, &mut Vec::new(), &mut anc);
    let ls: Vec<&Label> = labels.iter().collect();
    let n = ls.len();
    let mut rel = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let below = ls[j].locations().iter().any(|l| {
                    anc.get(l).is_some_and(|up| ls[i].locations().iter().any(|m| up.contains(m)))
                });
                rel[i][j] = below;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][k] && rel[k][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if rel[i][j] {
                out.insert((ls[i].clone(), ls[j].clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picalc::{oplus, par, parse_term};

    fn nat() -> SemiringDescriptor {
        SemiringDescriptor::nat()
    }

    fn p(s: &str) -> Term {
        parse_term(s, nat()).unwrap()
    }

    #[test]
    fn transition_examples() {
        assert_eq!(transitions(&p("u?@1(x).{1}")).len(), 1);
        let ts = transitions(&p("u?@1(x).{1} | u!@2(y).{1}"));
        assert_eq!(ts.iter().filter(|(l, _)| l.is_visible()).count(), 2);
        assert_eq!(ts.iter().filter(|(l, _)| *l == Label::Internal(1, 2)).count(), 1);
        assert!(transitions(&p("new u in u?@1(x).{1}")).is_empty());
    }

    #[test]
    fn communication_fuses_names() {
        let t = p("u?@1(x).x!@3(z).{1} | u!@2(y).y?@4(w).{1}");
        let (_, after) = transitions(&t).into_iter().find(|(l, _)| !l.is_visible()).unwrap();
        let inner = transitions(&after);
        assert_eq!(inner.len(), 1);
        assert_eq!(inner[0].0, Label::Internal(3, 4));
    }

    #[test]
    fn run_examples() {
        let r = runs(&p("{3}"));
        assert_eq!(r.len(), 1);
        assert!(r[0].labels.is_empty());
        let t = p("new a in ((a?@1(x).{1} + a?@2(x).{1}) | a!@3(y).{1})");
        let labels: Vec<Vec<Label>> = runs(&t).into_iter().map(|r| r.labels.into_iter().collect()).collect();
        assert_eq!(labels, vec![vec![Label::Internal(1, 3)], vec![Label::Internal(2, 3)]]);
        let t = p("new a in new b in (a?(x).{1} | a!(y).{1} | b?(x).{1} | b!(y).{1})");
        let r = runs(&t);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].labels.len(), 2);
        assert!(r[0].order.is_empty());
    }

    #[test]
    fn states_and_outcomes() {
        assert_eq!(state(nat(), &p("{0} | {1}")), nat().zero());
        assert_eq!(state(nat(), &p("a?(x).{0}")), nat().one());
        assert_eq!(state(nat(), &p("{2} | {3}")), nat().from_count(6));
        assert_eq!(outcome_term(nat(), &p("{5}")), nat().from_count(5));
        let one = p("{1}");
        assert_eq!(outcome_term(nat(), &oplus(nat(), &one, &one)), nat().from_count(2));
        let t = p("new u in (u?(x).{1} | u!(y).{7})");
        assert_eq!(outcome_term(nat(), &t), nat().from_count(7));
    }

    #[test]
    fn reduced_outcome_matches_runs() {
        let corpus = [
            "new a in ((a?(x).{2} + a?(x).{3}) | a!(y).{1} | a!(z).{5})",
            "new a in (a?(x).x!(z).{1} | a!(y).y?(w).{2} | a!(q).{0})",
            "new a in new b in (a?(x).b!(y).{1} | a!(z).{2} | b?(w).{3} | b?(v).{1})",
            "(a?(x).{1} + b?(x).{0}) | a!(y).{1} | b!(y).{4}",
        ];
        for s in corpus {
            let t = p(s);
            assert_eq!(outcome_term(nat(), &t), outcome_by_runs(nat(), &t), "{s}");
        }
        let l = crate::picalc::linear_action(nat(), &Chan::root("a"), Pol::Pos, "x", &p("{3}"));
        let t = par(&l, &p("a!(y).{1}"));
        assert_eq!(outcome_term(nat(), &t), nat().from_count(3));
        assert_eq!(outcome_by_runs(nat(), &t), nat().from_count(3));
        assert_eq!(outcome_term(nat(), &l), nat().zero());
    }

    #[test]
    fn causal_order_matches_prefixing() {
        let corpus = [
            "a?(x).x!(y).{1} | b?(z).{1}",
            "new a in (a?(x).b!(y).{1} | a!(z).c?(w).{1}) | b?(q).{1}",
            "(a?(x).{1} + b?(y).{1}) | c!(z).a!(u).{1}",
        ];
        for s in corpus {
            let t = p(s);
            for (pt, _) in explore(&t, |_, _| true) {
                assert_eq!(pt.order, dependency_order(&t, &pt.labels), "{s}: {:?}", pt.labels);
            }
        }
    }
}
