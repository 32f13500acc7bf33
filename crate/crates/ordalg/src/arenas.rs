//! Arena kinds and their permutation groups.
//!
//! Every group shipped here acts hereditarily on token paths: an event is
//! encoded as a path whose steps are either fixed labels or natural-number
//! slots, and the group is exactly the set of path-tree automorphisms that
//! keep fixed labels and permute the slots below each node independently.
//! Groups are never materialized; only their restrictions to finite event
//! sets are enumerated, as isomorphisms between two finite path trees.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{usage, Result};
use crate::event::{sym, Chan, Event, Loc, PiPoint, Pol, Sym};
use crate::plays::Play;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArenaKind {
    /// Finite web, trivial group.
    Static(BTreeSet<Event>),
    /// The web of the inner arena with the trivial group.
    Web(Box<ArenaKind>),
    /// `labels x N`; indices permuted within each label.
    Labeled(BTreeSet<Sym>),
    /// The piI arena over a finite set of free names.
    Pi(BTreeSet<Sym>),
    /// `N` with all its permutations.
    Nat,
    Sum(Vec<ArenaKind>),
    Indexing(Box<ArenaKind>, Box<ArenaKind>),
    /// `n` fixed copies of the body.
    FinIndex(u32, Box<ArenaKind>),
}

impl ArenaKind {
    pub fn empty() -> ArenaKind {
        ArenaKind::Static(BTreeSet::new())
    }

    pub fn static_atoms<'a>(names: impl IntoIterator<Item = &'a str>) -> ArenaKind {
        ArenaKind::Static(names.into_iter().map(Event::atom).collect())
    }

    pub fn labeled<'a>(labels: impl IntoIterator<Item = &'a str>) -> ArenaKind {
        ArenaKind::Labeled(labels.into_iter().map(sym).collect())
    }

    pub fn pi<'a>(names: impl IntoIterator<Item = &'a str>) -> ArenaKind {
        ArenaKind::Pi(names.into_iter().map(sym).collect())
    }

    pub fn sharp(body: ArenaKind) -> ArenaKind {
        ArenaKind::Indexing(Box::new(ArenaKind::Nat), Box::new(body))
    }

    pub fn fin_index(n: u32, body: ArenaKind) -> ArenaKind {
        ArenaKind::FinIndex(n, Box::new(body))
    }

    pub fn sum(parts: Vec<ArenaKind>) -> ArenaKind {
        ArenaKind::Sum(parts)
    }

    /// Whether the group is trivial, so that every play is its own orbit.
    pub fn is_rigid(&self) -> bool {
        match self {
            ArenaKind::Static(_) | ArenaKind::Web(_) => true,
            ArenaKind::Labeled(_) | ArenaKind::Pi(_) | ArenaKind::Nat => false,
            ArenaKind::Sum(xs) => xs.iter().all(ArenaKind::is_rigid),
            ArenaKind::Indexing(x, y) => x.is_rigid() && y.is_rigid(),
            ArenaKind::FinIndex(_, y) => y.is_rigid(),
        }
    }

    /// Whether the web is finite.
    pub fn is_finite(&self) -> bool {
        match self {
            ArenaKind::Static(_) => true,
            ArenaKind::Web(x) => x.is_finite(),
            ArenaKind::Labeled(ls) => ls.is_empty(),
            ArenaKind::Pi(_) | ArenaKind::Nat => false,
            ArenaKind::Sum(xs) => xs.iter().all(ArenaKind::is_finite),
            ArenaKind::Indexing(x, y) => x.is_finite() && y.is_finite(),
            ArenaKind::FinIndex(_, y) => y.is_finite(),
        }
    }

    /// The whole web, when finite.
    pub fn web(&self) -> Option<Vec<Event>> {
        Some(match self {
            ArenaKind::Static(w) => w.iter().cloned().collect(),
            ArenaKind::Web(x) => x.web()?,
            ArenaKind::Labeled(ls) if ls.is_empty() => Vec::new(),
            ArenaKind::Sum(xs) => {
                let mut out = Vec::new();
                for (i, x) in xs.iter().enumerate() {
                    out.extend(x.web()?.into_iter().map(|e| Event::inj(i as u16, e)));
                }
                out
            }
            ArenaKind::Indexing(x, y) => {
                let (xs, ys) = (x.web()?, y.web()?);
                xs.iter().flat_map(|a| ys.iter().map(move |b| Event::at(a.clone(), b.clone()))).collect()
            }
            ArenaKind::FinIndex(n, y) => {
                let ys = y.web()?;
                (0..*n).flat_map(|i| ys.iter().map(move |b| Event::at(Event::Copy(i), b.clone()))).collect()
            }
            _ => return None,
        })
    }

    pub fn contains(&self, e: &Event) -> bool {
        self.encode(e).is_ok()
    }

    pub(crate) fn encode(&self, e: &Event) -> Result<Vec<Tok>> {
        let mut out = Vec::new();
        if self.encode_into(e, &mut out) {
            Ok(out)
        } else {
            usage(format!("event `{e}` is not in the web of {self}"))
        }
    }

    fn encode_into(&self, e: &Event, out: &mut Vec<Tok>) -> bool {
        match (self, e) {
            (ArenaKind::Static(w), e) if w.contains(e) => out.push(Tok::F(Label::Whole(e.clone()))),
            (ArenaKind::Web(x), e) if x.contains(e) => out.push(Tok::F(Label::Whole(e.clone()))),
            (ArenaKind::Labeled(ls), Event::Occ(l, n)) if ls.contains(l) => {
                out.push(Tok::F(Label::Sym(l.clone())));
                out.push(Tok::P(*n));
            }
            (ArenaKind::Pi(names), Event::Pi(p)) if names.contains(&p.chan.root) => {
                out.push(Tok::F(Label::Sym(p.chan.root.clone())));
                for &(pol, n) in &p.chan.path {
                    out.push(Tok::F(Label::Pol(pol)));
                    out.push(Tok::P(n));
                }
                out.push(Tok::F(Label::Pol(p.pol)));
                out.push(match p.loc {
                    Loc::N(n) => Tok::P(n),
                    Loc::Bot => Tok::F(Label::Bot),
                    Loc::Top => Tok::F(Label::Top),
                });
            }
            (ArenaKind::Nat, Event::Copy(k)) => out.push(Tok::P(*k)),
            (ArenaKind::Sum(xs), Event::Inj(i, inner)) if (*i as usize) < xs.len() => {
                out.push(Tok::F(Label::Tag(*i)));
                return xs[*i as usize].encode_into(inner, out);
            }
            (ArenaKind::Indexing(x, y), Event::At(a, b)) => {
                out.push(Tok::F(Label::Open));
                if !x.encode_into(a, out) {
                    return false;
                }
                out.push(Tok::F(Label::Sep));
                return y.encode_into(b, out);
            }
            (ArenaKind::FinIndex(n, y), Event::At(a, b)) if matches!(**a, Event::Copy(i) if i < *n) => {
                out.push(Tok::F(Label::Open));
                out.push(Tok::F(Label::Whole((**a).clone())));
                out.push(Tok::F(Label::Sep));
                return y.encode_into(b, out);
            }
            _ => return false,
        }
        true
    }

    pub(crate) fn decode(&self, toks: &[Tok]) -> Event {
        match self {
            ArenaKind::Static(_) | ArenaKind::Web(_) => match toks {
                [Tok::F(Label::Whole(e))] => e.clone(),
                _ => unreachable!("malformed static path"),
            },
            ArenaKind::Labeled(_) => match toks {
                [Tok::F(Label::Sym(l)), Tok::P(n)] => Event::Occ(l.clone(), *n),
                _ => unreachable!("malformed labeled path"),
            },
            ArenaKind::Pi(_) => {
                let Tok::F(Label::Sym(root)) = &toks[0] else { unreachable!("malformed pi path") };
                let pairs: Vec<(Pol, &Tok)> = toks[1..]
                    .chunks(2)
                    .map(|c| match c {
                        [Tok::F(Label::Pol(p)), t] => (*p, t),
                        _ => unreachable!("malformed pi path"),
                    })
                    .collect();
                let (last, steps) = pairs.split_last().expect("pi path has a final pair");
                let path = steps
                    .iter()
                    .map(|(p, t)| match t {
                        Tok::P(n) => (*p, *n),
                        _ => unreachable!("malformed pi path"),
                    })
                    .collect();
                let loc = match last.1 {
                    Tok::P(n) => Loc::N(*n),
                    Tok::F(Label::Bot) => Loc::Bot,
                    Tok::F(Label::Top) => Loc::Top,
                    _ => unreachable!("malformed pi path"),
                };
                Event::Pi(PiPoint { chan: Chan { root: root.clone(), path }, pol: last.0, loc })
            }
            ArenaKind::Nat => match toks {
                [Tok::P(k)] => Event::Copy(*k),
                _ => unreachable!("malformed copy path"),
            },
            ArenaKind::Sum(xs) => match toks.split_first() {
                Some((Tok::F(Label::Tag(i)), rest)) => Event::inj(*i, xs[*i as usize].decode(rest)),
                _ => unreachable!("malformed sum path"),
            },
            ArenaKind::Indexing(x, y) => {
                let split = split_index(toks);
                Event::at(x.decode(&toks[1..split]), y.decode(&toks[split + 1..]))
            }
            ArenaKind::FinIndex(_, y) => match toks {
                [Tok::F(Label::Open), Tok::F(Label::Whole(a)), Tok::F(Label::Sep), rest @ ..] => {
                    Event::at(a.clone(), y.decode(rest))
                }
                _ => unreachable!("malformed indexed path"),
            },
        }
    }

    /// A finite event set is orbit-closed iff none of its events can move.
    pub fn is_orbit_closed(&self, y: &BTreeSet<Event>) -> Result<bool> {
        for e in y {
            if self.encode(e)?.iter().any(|t| matches!(t, Tok::P(_))) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The event with every slot erased: equal labels for events in one orbit
    /// (up to the hereditary structure above them).
    pub fn orbit_label(&self, e: &Event) -> Result<String> {
        let toks = self.encode(e)?;
        Ok(toks
            .iter()
            .map(|t| match t {
                Tok::P(_) => "*".to_string(),
                Tok::F(l) => format!("{l:?}"),
            })
            .collect::<Vec<_>>()
            .join("|"))
    }
}

/// Index of the separator closing the outermost indexing prefix.
fn split_index(toks: &[Tok]) -> usize {
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate().skip(1) {
        match t {
            Tok::F(Label::Open) => depth += 1,
            Tok::F(Label::Sep) if depth == 0 => return i,
            Tok::F(Label::Sep) => depth -= 1,
            _ => {}
        }
    }
    unreachable!("indexing path without separator")
}

impl fmt::Display for ArenaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, xs: Vec<String>| f.write_str(&xs.join(","));
        match self {
            ArenaKind::Static(w) => {
                f.write_str("Static{")?;
                list(f, w.iter().map(|e| e.to_string()).collect())?;
                f.write_str("}")
            }
            ArenaKind::Web(x) => write!(f, "Web({x})"),
            ArenaKind::Labeled(ls) => {
                f.write_str("Labeled{")?;
                list(f, ls.iter().map(|e| e.to_string()).collect())?;
                f.write_str("}")
            }
            ArenaKind::Pi(ns) => {
                f.write_str("Pi{")?;
                list(f, ns.iter().map(|e| e.to_string()).collect())?;
                f.write_str("}")
            }
            ArenaKind::Nat => f.write_str("N"),
            ArenaKind::Sum(xs) => {
                f.write_str("(")?;
                f.write_str(&xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" + "))?;
                f.write_str(")")
            }
            ArenaKind::Indexing(x, y) if **x == ArenaKind::Nat => write!(f, "#{y}"),
            ArenaKind::Indexing(x, y) => write!(f, "({x} < {y})"),
            ArenaKind::FinIndex(n, y) => write!(f, "({n} < {y})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Label {
    Whole(Event),
    Sym(Sym),
    Pol(Pol),
    Bot,
    Top,
    Tag(u16),
    Open,
    Sep,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Tok {
    F(Label),
    P(u32),
}

#[derive(Debug, Default)]
struct Node {
    point: Option<usize>,
    fixed: BTreeMap<Label, Node>,
    slots: BTreeMap<u32, Node>,
    sig: u32,
    // structural key, independent of slot numbers and of interning order
    key: String,
}

impl Node {
    fn insert(&mut self, toks: &[Tok], idx: usize) {
        match toks.split_first() {
            None => self.point = Some(idx),
            Some((Tok::F(l), rest)) => self.fixed.entry(l.clone()).or_default().insert(rest, idx),
            Some((Tok::P(n), rest)) => self.slots.entry(*n).or_default().insert(rest, idx),
        }
    }
}

/// Interns subtree shapes so that isomorphic subtrees share a signature.
#[derive(Default)]
struct Signatures {
    table: HashMap<String, u32>,
}

impl Signatures {
    fn assign(&mut self, node: &mut Node) -> u32 {
        let mut key = String::from(if node.point.is_some() { "(." } else { "(" });
        for (l, c) in node.fixed.iter_mut() {
            self.assign(c);
            key.push_str(&format!("{l:?}={}", c.key));
        }
        let mut slots: Vec<&str> = Vec::new();
        for c in node.slots.values_mut() {
            self.assign(c);
        }
        slots.extend(node.slots.values().map(|c| c.key.as_str()));
        slots.sort_unstable();
        key.push('[');
        key.push_str(&slots.join(","));
        key.push_str("])");
        let next = self.table.len() as u32;
        node.sig = *self.table.entry(key.clone()).or_insert(next);
        node.key = key;
        node.sig
    }
}

fn build(arena: &ArenaKind, events: &[Event], sigs: &mut Signatures) -> Result<(Node, Vec<Vec<Tok>>)> {
    let mut root = Node::default();
    let mut paths = Vec::with_capacity(events.len());
    for (i, e) in events.iter().enumerate() {
        let toks = arena.encode(e)?;
        root.insert(&toks, i);
        paths.push(toks);
    }
    sigs.assign(&mut root);
    Ok((root, paths))
}

/// All isomorphisms between two trees of equal signature, as lists of
/// matched point indices.
fn isos(a: &Node, b: &Node) -> Vec<Vec<(usize, usize)>> {
    debug_assert_eq!(a.sig, b.sig);
    let mut acc: Vec<Vec<(usize, usize)>> = vec![match (a.point, b.point) {
        (Some(i), Some(j)) => vec![(i, j)],
        _ => vec![],
    }];
    for (l, ca) in &a.fixed {
        let sub = isos(ca, &b.fixed[l]);
        acc = product(acc, &sub);
    }
    if !a.slots.is_empty() {
        let left: Vec<&Node> = a.slots.values().collect();
        let right: Vec<&Node> = b.slots.values().collect();
        let mut choices = Vec::new();
        slot_matchings(&left, &right, &mut vec![false; right.len()], &mut Vec::new(), &mut choices);
        let mut combined = Vec::new();
        for choice in choices {
            let mut part = vec![Vec::new()];
            for (i, &j) in choice.iter().enumerate() {
                part = product(part, &isos(left[i], right[j]));
            }
            combined.extend(product(acc.clone(), &part));
        }
        acc = combined;
    }
    acc
}

fn slot_matchings(left: &[&Node], right: &[&Node], used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let i = cur.len();
    if i == left.len() {
        out.push(cur.clone());
        return;
    }
    for j in 0..right.len() {
        if !used[j] && right[j].sig == left[i].sig {
            used[j] = true;
            cur.push(j);
            slot_matchings(left, right, used, cur, out);
            cur.pop();
            used[j] = false;
        }
    }
}

fn product(acc: Vec<Vec<(usize, usize)>>, sub: &[Vec<(usize, usize)>]) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(acc.len() * sub.len());
    for a in &acc {
        for s in sub {
            let mut v = a.clone();
            v.extend_from_slice(s);
            out.push(v);
        }
    }
    out
}

/// A finite restriction of a group element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InducedBijection {
    pub pairs: Vec<(Event, Event)>,
}

impl InducedBijection {
    pub fn apply(&self, e: &Event) -> Option<&Event> {
        self.pairs.iter().find(|(a, _)| a == e).map(|(_, b)| b)
    }
}

/// Bijections `a[i] -> b[map[i]]` induced by the group; `a` and `b` are
/// sorted, duplicate-free event lists.
pub(crate) fn index_bijections(arena: &ArenaKind, a: &[Event], b: &[Event]) -> Result<Vec<Vec<usize>>> {
    if a.len() != b.len() {
        for e in a.iter().chain(b) {
            arena.encode(e)?;
        }
        return Ok(Vec::new());
    }
    if arena.is_rigid() {
        for e in a.iter().chain(b) {
            arena.encode(e)?;
        }
        return Ok(if a == b { vec![(0..a.len()).collect()] } else { Vec::new() });
    }
    let mut sigs = Signatures::default();
    let (ta, _) = build(arena, a, &mut sigs)?;
    let (tb, _) = build(arena, b, &mut sigs)?;
    if ta.sig != tb.sig {
        return Ok(Vec::new());
    }
    Ok(isos(&ta, &tb)
        .into_iter()
        .map(|pairs| {
            let mut map = vec![0; a.len()];
            for (i, j) in pairs {
                map[i] = j;
            }
            map
        })
        .collect())
}

pub fn induced_bijections(arena: &ArenaKind, a: &BTreeSet<Event>, b: &BTreeSet<Event>) -> Result<Vec<InducedBijection>> {
    let av: Vec<Event> = a.iter().cloned().collect();
    let bv: Vec<Event> = b.iter().cloned().collect();
    Ok(index_bijections(arena, &av, &bv)?
        .into_iter()
        .map(|m| InducedBijection { pairs: m.iter().enumerate().map(|(i, &j)| (av[i].clone(), bv[j].clone())).collect() })
        .collect())
}

/// Transports `r` along `map` onto the event list `target`.
pub(crate) fn transport(r: &Play, map: &[usize], target: &[Event]) -> Play {
    let mut pairs = Vec::new();
    for i in 0..r.len() {
        for j in 0..r.len() {
            if r.lt_idx(i, j) {
                pairs.push((map[i], map[j]));
            }
        }
    }
    Play::from_index_pairs(target.to_vec(), &pairs)
}

pub fn multiplicity(arena: &ArenaKind, r: &Play) -> Result<u64> {
    let maps = index_bijections(arena, r.support(), r.support())?;
    Ok(maps.iter().filter(|m| transport(r, m, r.support()) == *r).count() as u64)
}

/// Distinct images of `s` with support exactly `a`.
pub fn orbit_with_support(arena: &ArenaKind, s: &Play, a: &BTreeSet<Event>) -> Result<Vec<Play>> {
    let target: Vec<Event> = a.iter().cloned().collect();
    let images: BTreeSet<Play> = index_bijections(arena, s.support(), &target)?
        .iter()
        .map(|m| transport(s, m, &target))
        .collect();
    Ok(images.into_iter().collect())
}

/// The canonical member of the orbit of a finite event set: below each
/// node, slots are renumbered from 1 in the order of their subtree shapes.
pub fn canonical_support(arena: &ArenaKind, a: &[Event]) -> Result<Vec<Event>> {
    if arena.is_rigid() {
        for e in a {
            arena.encode(e)?;
        }
        return Ok(a.to_vec());
    }
    let mut sigs = Signatures::default();
    let (tree, paths) = build(arena, a, &mut sigs)?;
    let mut renamed = paths.clone();
    relabel(&tree, 0, &mut renamed);
    let mut out: Vec<Event> = renamed.iter().map(|t| arena.decode(t)).collect();
    out.sort();
    out.dedup();
    debug_assert_eq!(out.len(), a.len());
    Ok(out)
}

/// Rewrites the slot at `depth` of every path under `node`.
fn relabel(node: &Node, depth: usize, paths: &mut [Vec<Tok>]) {
    for child in node.fixed.values() {
        relabel(child, depth + 1, paths);
    }
    let mut order: Vec<(&u32, &Node)> = node.slots.iter().collect();
    order.sort_by(|(_, x), (_, y)| x.key.cmp(&y.key));
    for (k, (_, child)) in order.into_iter().enumerate() {
        let mut pts = Vec::new();
        points(child, &mut pts);
        for p in pts {
            paths[p][depth] = Tok::P(k as u32 + 1);
        }
        relabel(child, depth + 1, paths);
    }
}

fn points(node: &Node, out: &mut Vec<usize>) {
    out.extend(node.point);
    for c in node.fixed.values().chain(node.slots.values()) {
        points(c, out);
    }
}

pub fn representant(arena: &ArenaKind, r: &Play) -> Result<Play> {
    if arena.is_rigid() {
        return Ok(r.clone());
    }
    let canon: BTreeSet<Event> = canonical_support(arena, r.support())?.into_iter().collect();
    Ok(orbit_with_support(arena, r, &canon)?.into_iter().next().expect("canonical support lies in the orbit"))
}

/// Distinct images of `r` under the setwise stabilizer of its support,
/// each carrying the multiplicity of `r`.
pub fn saturate(arena: &ArenaKind, r: &Play) -> Result<Vec<(Play, u64)>> {
    let maps = index_bijections(arena, r.support(), r.support())?;
    let mut counts: BTreeMap<Play, u64> = BTreeMap::new();
    for m in &maps {
        *counts.entry(transport(r, m, r.support())).or_default() += 1;
    }
    Ok(counts.into_iter().collect())
}
