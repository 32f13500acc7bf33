//! The free semimodule of plays and its operations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;

use crate::arenas::{self, index_bijections, transport, ArenaKind};
use crate::basis;
use crate::error::{usage, Error, Result};
use crate::event::Event;
use crate::plays::Play;
use crate::semiring::{Scalar, SemiringDescriptor};

/// A finite linear combination of plays; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vector {
    semiring: SemiringDescriptor,
    arena: ArenaKind,
    terms: BTreeMap<Play, Scalar>,
}

impl Vector {
    pub fn zero(semiring: SemiringDescriptor, arena: ArenaKind) -> Vector {
        Vector { semiring, arena, terms: BTreeMap::new() }
    }

    pub fn from_play(semiring: SemiringDescriptor, arena: ArenaKind, r: Play) -> Result<Vector> {
        let one = semiring.one();
        Vector::from_terms(semiring, arena, [(r, one)])
    }

    pub fn from_terms(
        semiring: SemiringDescriptor,
        arena: ArenaKind,
        terms: impl IntoIterator<Item = (Play, Scalar)>,
    ) -> Result<Vector> {
        let mut v = Vector::zero(semiring, arena);
        for (r, c) in terms {
            for e in r.support() {
                v.arena.encode(e)?;
            }
            if c.name() != semiring.name {
                return usage(format!("coefficient {c} is not in {semiring}"));
            }
            v.add_term(r, c);
        }
        Ok(v)
    }

    pub fn semiring(&self) -> SemiringDescriptor {
        self.semiring
    }

    pub fn arena(&self) -> &ArenaKind {
        &self.arena
    }

    pub fn terms(&self) -> &BTreeMap<Play, Scalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coefficient(&self, r: &Play) -> Scalar {
        self.terms.get(r).cloned().unwrap_or_else(|| self.semiring.zero())
    }

    /// Adds `c * r`; the caller guarantees `r` lies over the arena.
    pub(crate) fn add_term(&mut self, r: Play, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(r) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().plus(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn same_space(&self, other: &Vector) -> Result<()> {
        if self.semiring != other.semiring {
            return usage(format!("semiring mismatch: {} vs {}", self.semiring, other.semiring));
        }
        if self.arena != other.arena {
            return usage(format!("arena mismatch: {} vs {}", self.arena, other.arena));
        }
        Ok(())
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (r, c) in &other.terms {
            out.add_term(r.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Result<Vector> {
        let mut out = Vector::zero(self.semiring, self.arena.clone());
        for (r, a) in &self.terms {
            out.add_term(r.clone(), c.mul(a)?);
        }
        Ok(out)
    }

    /// Coefficients mapped into RAT; defined for NAT and INT.
    pub fn embed_to_rat(&self) -> Result<Vector> {
        let mut out = Vector::zero(SemiringDescriptor::rat(), self.arena.clone());
        for (r, c) in &self.terms {
            out.add_term(r.clone(), c.embed_to_rat()?);
        }
        Ok(out)
    }

    /// Same terms over another arena whose web contains every support.
    pub fn with_arena(&self, arena: ArenaKind) -> Result<Vector> {
        Vector::from_terms(self.semiring, arena, self.terms.clone())
    }

    /// Relabels every event; `f` must be injective on each support.
    pub fn map_events(&self, arena: ArenaKind, f: impl Fn(&Event) -> Event) -> Result<Vector> {
        Vector::from_terms(self.semiring, arena, self.terms.iter().map(|(r, c)| (r.map_events(&f), c.clone())))
    }

    /// Line-oriented text: `coef ; e1,e2,... ; (ei<ej),...` per play.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (r, c) in &self.terms {
            s.push_str(&play_line(c, r));
            s.push('\n');
        }
        s
    }
}

pub fn play_line(c: &Scalar, r: &Play) -> String {
    let events: Vec<String> = r.support().iter().map(|e| e.to_string()).collect();
    let pairs: Vec<String> = r
        .strict_pairs()
        .into_iter()
        .map(|(i, j)| format!("({}<{})", r.support()[i], r.support()[j]))
        .collect();
    format!("{c} ; {} ; {}", events.join(","), pairs.join(","))
}

/// Parses the text format over a static arena of atoms.
pub fn parse_vector_text(text: &str, semiring: SemiringDescriptor) -> Result<Vector> {
    let mut terms = Vec::new();
    let mut atoms = BTreeSet::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse { line: ln + 1, col: 1, msg: msg.to_string() };
        let parts: Vec<&str> = line.split(';').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(err("expected `coef ; events ; pairs`"));
        }
        let c = semiring.parse_literal(parts[0]).map_err(|e| err(&e.to_string()))?;
        let events: Vec<Event> =
            parts[1].split(',').map(str::trim).filter(|s| !s.is_empty()).map(Event::atom).collect();
        let mut covers = Vec::new();
        for p in parts[2].split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let inner = p.strip_prefix('(').and_then(|p| p.strip_suffix(')')).ok_or_else(|| err("pair must be `(a<b)`"))?;
            let (a, b) = inner.split_once('<').ok_or_else(|| err("pair must be `(a<b)`"))?;
            covers.push((Event::atom(a.trim()), Event::atom(b.trim())));
        }
        atoms.extend(events.iter().cloned());
        let r = Play::new(events, &covers).map_err(|e| err(&e.to_string()))?;
        terms.push((r, c));
    }
    Vector::from_terms(semiring, ArenaKind::Static(atoms), terms)
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(r, c)| format!("{c}*{r}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

pub fn outcome(u: &Vector) -> Scalar {
    u.terms
        .iter()
        .filter(|(r, _)| r.is_consistent())
        .fold(u.semiring.zero(), |acc, (_, c)| acc.plus(c))
}

/// Permuted synchronisation, summed over every induced bijection from
/// the support of the right play onto the support of the left one; this
/// equals the multiplicity of the right play times the sum over its
/// distinct images.
pub fn psync(u: &Vector, v: &Vector) -> Result<Vector> {
    u.same_space(v)?;
    let mut out = Vector::zero(u.semiring, u.arena.clone());
    for (r, a) in &u.terms {
        for (s, b) in &v.terms {
            if r.len() != s.len() {
                continue;
            }
            let ab = a.times(b);
            for m in index_bijections(&u.arena, s.support(), r.support())? {
                let moved = transport(s, &m, r.support());
                out.add_term(r.sync(&moved).expect("same support"), ab.clone());
            }
        }
    }
    Ok(out)
}

/// `<u >< t>` for a single play `t`, without building the product.
pub fn pairing_with_play(u: &Vector, t: &Play) -> Result<Scalar> {
    let mut acc = u.semiring.zero();
    for (r, a) in &u.terms {
        if r.len() != t.len() {
            continue;
        }
        for m in index_bijections(&u.arena, t.support(), r.support())? {
            if r.sync(&transport(t, &m, r.support())).expect("same support").is_consistent() {
                acc = acc.plus(a);
            }
        }
    }
    Ok(acc)
}

fn sum_parts(arena: &ArenaKind, n: usize) -> Result<&[ArenaKind]> {
    match arena {
        ArenaKind::Sum(xs) if xs.len() == n => Ok(xs),
        _ => usage(format!("expected a sum of {n} arenas, got {arena}")),
    }
}

fn retag(e: &Event, map: &[u16]) -> Event {
    match e {
        Event::Inj(i, inner) => Event::Inj(map[*i as usize], inner.clone()),
        _ => unreachable!("sum events are tagged"),
    }
}

fn untag(e: &Event) -> (u16, &Event) {
    match e {
        Event::Inj(i, inner) => (*i, inner),
        _ => unreachable!("sum events are tagged"),
    }
}

/// Partial synchronisation along `X`: `u` over `X+Y`, `v` over `X+Z`,
/// result over `X+Y+Z`. Summed over induced bijections of the `X` parts.
pub fn partial_psync(u: &Vector, v: &Vector) -> Result<Vector> {
    if u.semiring != v.semiring {
        return usage("semiring mismatch");
    }
    let xy = sum_parts(&u.arena, 2)?;
    let xz = sum_parts(&v.arena, 2)?;
    if xy[0] != xz[0] {
        return usage(format!("shared components differ: {} vs {}", xy[0], xz[0]));
    }
    let x = &xy[0];
    let arena = ArenaKind::Sum(vec![x.clone(), xy[1].clone(), xz[1].clone()]);
    let mut out = Vector::zero(u.semiring, arena);
    let x_part = |p: &Play| -> Vec<Event> {
        p.support().iter().map(untag).filter(|(i, _)| *i == 0).map(|(_, e)| e.clone()).collect()
    };
    for (r, a) in &u.terms {
        let rx = x_part(r);
        for (s, b) in &v.terms {
            let sx = x_part(s);
            if rx.len() != sx.len() {
                continue;
            }
            let ab = a.times(b);
            for m in index_bijections(x, &sx, &rx)? {
                let moved = s.map_events(|e| match untag(e) {
                    (0, inner) => Event::inj(0, rx[m[sx.binary_search(inner).unwrap()]].clone()),
                    (_, inner) => Event::inj(2, inner.clone()),
                });
                out.add_term(r.join(&moved)?, ab.clone());
            }
        }
    }
    Ok(out)
}

/// Disjoint juxtaposition into `X+Y`.
pub fn tensor(u: &Vector, v: &Vector) -> Result<Vector> {
    if u.semiring != v.semiring {
        return usage("semiring mismatch");
    }
    let arena = ArenaKind::Sum(vec![u.arena.clone(), v.arena.clone()]);
    let mut out = Vector::zero(u.semiring, arena);
    for (r, a) in &u.terms {
        let left = r.map_events(|e| Event::inj(0, e.clone()));
        for (s, b) in &v.terms {
            let right = s.map_events(|e| Event::inj(1, e.clone()));
            out.add_term(left.join(&right)?, a.times(b));
        }
    }
    Ok(out)
}

/// What a restriction keeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Keep {
    /// Whole components of a sum arena, in the given order; one component
    /// unwraps to that arena.
    Components(Vec<usize>),
    /// A finite event set, which must be orbit-closed.
    Events(BTreeSet<Event>),
}

pub fn restrict(u: &Vector, keep: &Keep) -> Result<Vector> {
    match keep {
        Keep::Events(y) => {
            if !u.arena.is_orbit_closed(y)? {
                return usage("restriction set is not closed under the arena group");
            }
            let mut out = Vector::zero(u.semiring, u.arena.clone());
            for (r, c) in &u.terms {
                if let Some(p) = r.restrict_to(y) {
                    out.add_term(p, c.clone());
                }
            }
            Ok(out)
        }
        Keep::Components(ks) => {
            let parts = match &u.arena {
                ArenaKind::Sum(xs) => xs,
                other => return usage(format!("component restriction needs a sum arena, got {other}")),
            };
            if ks.iter().any(|&k| k >= parts.len()) || ks.iter().collect::<BTreeSet<_>>().len() != ks.len() {
                return usage("invalid component list");
            }
            let mut map = vec![u16::MAX; parts.len()];
            for (new, &old) in ks.iter().enumerate() {
                map[old] = new as u16;
            }
            let single = ks.len() == 1;
            let arena = if single {
                parts[ks[0]].clone()
            } else {
                ArenaKind::Sum(ks.iter().map(|&k| parts[k].clone()).collect())
            };
            let mut out = Vector::zero(u.semiring, arena);
            for (r, c) in &u.terms {
                if let Some(p) = r.restrict(|e| map[untag(e).0 as usize] != u16::MAX) {
                    let p = p.map_events(|e| {
                        let (i, inner) = untag(e);
                        if single {
                            inner.clone()
                        } else {
                            Event::inj(map[i as usize], inner.clone())
                        }
                    });
                    out.add_term(p, c.clone());
                }
            }
            Ok(out)
        }
    }
}

/// Composition of `u` over `X+Y` with `v` over `Y+Z`, landing in `X+Z`.
pub fn compose_through(u: &Vector, v: &Vector) -> Result<Vector> {
    let xy = sum_parts(&u.arena, 2)?;
    // present u over Y+X so that Y is the shared component
    let yx = ArenaKind::Sum(vec![xy[1].clone(), xy[0].clone()]);
    let swapped = u.map_events(yx, |e| retag(e, &[1, 0]))?;
    let joined = partial_psync(&swapped, v)?;
    restrict(&joined, &Keep::Components(vec![1, 2]))
}

/// Lifts a vector over `X` into component `k` of a sum arena.
pub fn inject(u: &Vector, sum: ArenaKind, k: u16) -> Result<Vector> {
    u.map_events(sum, |e| Event::inj(k, e.clone()))
}

/// The representation into the static algebra of the web: saturation of
/// representants. Rigid arenas are returned unchanged.
pub fn psplit(u: &Vector) -> Result<Vector> {
    if u.arena.is_rigid() {
        return Ok(u.clone());
    }
    let mut out = Vector::zero(u.semiring, ArenaKind::Web(Box::new(u.arena.clone())));
    for (r, c) in &u.terms {
        let rep = arenas::representant(&u.arena, r)?;
        for (p, k) in arenas::saturate(&u.arena, &rep)? {
            out.add_term(p, c.times(&u.semiring.from_count(k)));
        }
    }
    Ok(out)
}

/// A vector `e` and integer `n` with `u >< e = n u` for every member `u`.
pub fn partial_neutral(family: &[Vector]) -> Result<(Option<Vector>, u64)> {
    let Some(first) = family.first() else {
        return Ok((None, 1));
    };
    let mut supports = BTreeSet::new();
    for u in family {
        u.same_space(first)?;
        for r in u.terms.keys() {
            supports.insert(arenas::canonical_support(&u.arena, r.support())?);
        }
    }
    let mut mus = Vec::new();
    for a in &supports {
        mus.push(arenas::multiplicity(&first.arena, &Play::neutral(a.iter().cloned()))?);
    }
    let n = mus.iter().fold(1u64, |acc, m| acc.lcm(m));
    let mut e = Vector::zero(first.semiring, first.arena.clone());
    for (a, mu) in supports.iter().zip(&mus) {
        e.add_term(Play::neutral(a.iter().cloned()), first.semiring.from_count(n / mu));
    }
    Ok((Some(e), n))
}

/// Exact observational equivalence through the basis route of the semiring.
pub fn obs_equiv(u: &Vector, v: &Vector) -> Result<bool> {
    u.same_space(v)?;
    let (su, sv) = (psplit(u)?, psplit(v)?);
    let route = basis::Route::for_semiring(u.semiring)?;
    let (su, sv) = match route {
        basis::Route::Weak if !u.semiring.is_rational => (su.embed_to_rat()?, sv.embed_to_rat()?),
        _ => (su, sv),
    };
    let coords = basis::factored_coords(&[&su, &sv], route)?;
    Ok(coords[0] == coords[1])
}

/// Every preorder on the given support, in a fixed order.
pub fn all_preorders(support: &[Event]) -> Vec<Play> {
    let n = support.len();
    let off: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1u64 << off.len()) {
        let pairs: Vec<(usize, usize)> = (0..off.len()).filter(|k| mask >> k & 1 == 1).map(|k| off[k]).collect();
        let p = Play::from_index_pairs(support.to_vec(), &pairs);
        // keep only relations that were already closed, so each preorder
        // is produced from exactly one mask
        if p.strict_pairs().len() == pairs.len() {
            out.insert(p);
        }
    }
    out.into_iter().collect()
}

/// The probe supports of the oracle: canonical supports occurring in `u`, `v`.
pub fn probe_supports(u: &Vector, v: &Vector) -> Result<BTreeSet<Vec<Event>>> {
    u.same_space(v)?;
    let mut out = BTreeSet::new();
    for r in u.terms.keys().chain(v.terms.keys()) {
        out.insert(arenas::canonical_support(&u.arena, r.support())?);
    }
    Ok(out)
}

/// Whether the oracle sees every occurring support at this bound.
pub fn oracle_applicable(u: &Vector, v: &Vector, max_support: usize) -> Result<bool> {
    Ok(probe_supports(u, v)?.iter().all(|a| a.len() <= max_support))
}

/// A probe play with different outcomes against `u` and `v`, searched over
/// all preorders on each occurring representant support up to the bound.
pub fn oracle_separating_probe(u: &Vector, v: &Vector, max_support: usize) -> Result<Option<(Play, Scalar, Scalar)>> {
    for a in probe_supports(u, v)? {
        if a.len() > max_support {
            continue;
        }
        for t in all_preorders(&a) {
            let (x, y) = (pairing_with_play(u, &t)?, pairing_with_play(v, &t)?);
            if x != y {
                return Ok(Some((t, x, y)));
            }
        }
    }
    Ok(None)
}

/// Brute-force equivalence: compares outcomes against every probe play.
pub fn probe_oracle_equiv(u: &Vector, v: &Vector, max_support: usize) -> Result<bool> {
    Ok(oracle_separating_probe(u, v, max_support)?.is_none())
}

/// A separating probe found through the basis route; its support is a
/// representant support and it is paired after the static representation.
pub fn basis_separating_probe(u: &Vector, v: &Vector) -> Result<Option<(Play, Scalar, Scalar)>> {
    u.same_space(v)?;
    let route = basis::Route::for_semiring(u.semiring)?;
    let (su, sv) = (psplit(u)?, psplit(v)?);
    for t in basis::candidate_probes(&[&su, &sv], route)? {
        let (x, y) = (pairing_with_play(&su, &t)?, pairing_with_play(&sv, &t)?);
        if x != y {
            return Ok(Some((t, x, y)));
        }
    }
    Ok(None)
}
