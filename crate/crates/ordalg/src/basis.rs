//! Bases of the static algebra and finitely generated types.
//!
//! Over an idempotent semiring every consistent play is equivalent to the
//! sum of its linear extensions and total orders are self-dual. Over a
//! ring, weak total orders form a basis reached by the split rewriting.
//!
//! Equivalence checks work blockwise: plays on one support whose relations
//! never cross a common partition of that support are decomposed block by
//! block, and the coordinates are the products of the block coordinates.
//! Products of bases are independent because products of dual families
//! pair to products of Kronecker deltas.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{self, compose_through, inject, psplit, restrict, Keep, Vector};
use crate::arenas::ArenaKind;
use crate::error::{unsupported, usage, Result};
use crate::event::Event;
use crate::plays::Play;
use crate::semiring::{Scalar, SemiringDescriptor, SemiringName, Tri};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Totals,
    Weak,
}

impl Route {
    pub fn for_semiring(sr: SemiringDescriptor) -> Result<Route> {
        if sr.is_idempotent {
            Ok(Route::Totals)
        } else if matches!(sr.name, SemiringName::Nat | SemiringName::Int | SemiringName::Rat) {
            Ok(Route::Weak)
        } else {
            unsupported(format!("{sr} is neither idempotent nor embeddable in RAT"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub base: Route,
    pub coords: BTreeMap<Play, Scalar>,
}

pub fn is_weak_total(r: &Play) -> bool {
    if !r.is_consistent() {
        return false;
    }
    let n = r.len();
    (0..n).all(|i| (0..n).all(|j| !r.lt_idx(i, j) || (0..n).all(|k| r.lt_idx(i, k) || r.lt_idx(k, j))))
}

/// The least triple `(a, b, c)` with `a < b` and `c` incomparable to both.
fn least_violation(r: &Play) -> Option<(usize, usize, usize)> {
    let n = r.len();
    let incomparable = |x: usize, y: usize| !r.leq_idx(x, y) && !r.leq_idx(y, x);
    for a in 0..n {
        for b in 0..n {
            if !r.lt_idx(a, b) {
                continue;
            }
            for c in 0..n {
                if c != a && c != b && incomparable(a, c) && incomparable(b, c) {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

fn with_pairs(r: &Play, extra: &[(usize, usize)]) -> Play {
    let mut pairs = r.strict_pairs();
    pairs.extend_from_slice(extra);
    Play::from_index_pairs(r.support().to_vec(), &pairs)
}

type Coords = BTreeMap<Play, BigRational>;

#[derive(Default)]
pub(crate) struct WeakMemo {
    table: HashMap<Play, Coords>,
}

impl WeakMemo {
    /// Split rewriting `r = r+[a<c] + r+[c<b] - r+[a<c<b]` until weak.
    fn decompose(&mut self, r: &Play) -> Coords {
        if let Some(c) = self.table.get(r) {
            return c.clone();
        }
        let out = if !r.is_consistent() {
            Coords::new()
        } else {
            match least_violation(r) {
                None => [(r.clone(), BigRational::one())].into_iter().collect(),
                Some((a, b, c)) => {
                    let mut acc = self.decompose(&with_pairs(r, &[(a, c)]));
                    for (p, k) in self.decompose(&with_pairs(r, &[(c, b)])) {
                        *acc.entry(p).or_insert_with(BigRational::zero) += k;
                    }
                    for (p, k) in self.decompose(&with_pairs(r, &[(a, c), (c, b)])) {
                        *acc.entry(p).or_insert_with(BigRational::zero) -= k;
                    }
                    acc.retain(|_, k| !k.is_zero());
                    acc
                }
            }
        };
        self.table.insert(r.clone(), out.clone());
        out
    }
}

fn require_static(u: &Vector) -> Result<()> {
    if u.arena().is_rigid() {
        Ok(())
    } else {
        usage(format!("decomposition needs a static arena, got {}", u.arena()))
    }
}

pub fn decompose_totals(u: &Vector) -> Result<Decomposition> {
    if !u.semiring().is_idempotent {
        return unsupported(format!("total-order basis needs idempotent addition, {} is not", u.semiring()));
    }
    require_static(u)?;
    let mut coords: BTreeMap<Play, Scalar> = BTreeMap::new();
    for (r, c) in u.terms() {
        for t in r.linear_extensions() {
            let e = coords.entry(t).or_insert_with(|| u.semiring().zero());
            *e = e.plus(c);
        }
    }
    coords.retain(|_, c| !c.is_zero());
    Ok(Decomposition { base: Route::Totals, coords })
}

fn rat_coefficients(u: &Vector) -> Result<Vector> {
    match u.semiring().name {
        SemiringName::Rat => Ok(u.clone()),
        SemiringName::Nat | SemiringName::Int => u.embed_to_rat(),
        _ => unsupported(format!("weak-total basis needs a ring embedding, {} has none", u.semiring())),
    }
}

pub fn decompose_weak(u: &Vector) -> Result<Decomposition> {
    require_static(u)?;
    let u = rat_coefficients(u)?;
    let mut memo = WeakMemo::default();
    let mut coords: Coords = BTreeMap::new();
    for (r, c) in u.terms() {
        let c = c.as_rat().expect("RAT coefficients");
        for (p, k) in memo.decompose(r) {
            *coords.entry(p).or_insert_with(BigRational::zero) += c * k;
        }
    }
    Ok(Decomposition {
        base: Route::Weak,
        coords: coords.into_iter().filter(|(_, k)| !k.is_zero()).map(|(p, k)| (p, Scalar::Rat(k))).collect(),
    })
}

/// Blocks of the finest partition of `support` that no relation of any
/// play in `plays` crosses.
fn common_blocks(n: usize, plays: &[&Play]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for r in plays {
        for (i, j) in r.strict_pairs() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().push(i);
    }
    blocks.into_values().collect()
}

fn block_play(r: &Play, block: &[usize]) -> Play {
    let keep: BTreeSet<&Event> = block.iter().map(|&i| &r.support()[i]).collect();
    r.induced(|e| keep.contains(e))
}

pub(crate) type FactoredCoords = BTreeMap<Vec<Play>, Scalar>;

/// Consistent plays of all vectors grouped by support.
fn by_support<'a>(vs: &[&'a Vector]) -> BTreeMap<Vec<Event>, Vec<(usize, &'a Play, &'a Scalar)>> {
    let mut groups: BTreeMap<Vec<Event>, Vec<(usize, &Play, &Scalar)>> = BTreeMap::new();
    for (k, v) in vs.iter().enumerate() {
        for (r, c) in v.terms() {
            if r.is_consistent() {
                groups.entry(r.support().to_vec()).or_default().push((k, r, c));
            }
        }
    }
    groups
}

/// Blockwise coordinates of static vectors sharing one semiring, on a
/// block structure common to all of them. Weak-route vectors must carry
/// RAT coefficients.
pub(crate) fn factored_coords(vs: &[&Vector], route: Route) -> Result<Vec<FactoredCoords>> {
    for v in vs {
        require_static(v)?;
        if route == Route::Weak && v.semiring().name != SemiringName::Rat {
            return usage("weak route expects RAT coefficients");
        }
    }
    let mut out = vec![FactoredCoords::new(); vs.len()];
    let mut memo = WeakMemo::default();
    for (support, members) in by_support(vs) {
        let plays: Vec<&Play> = members.iter().map(|(_, r, _)| *r).collect();
        let blocks = common_blocks(support.len(), &plays);
        for (k, r, c) in members {
            let mut partial: Vec<(Vec<Play>, Scalar)> = vec![(Vec::new(), c.clone())];
            for block in &blocks {
                let sub = block_play(r, block);
                let parts: Vec<(Play, Scalar)> = match route {
                    Route::Totals => sub.linear_extensions().into_iter().map(|t| (t, vs[k].semiring().one())).collect(),
                    Route::Weak => memo.decompose(&sub).into_iter().map(|(p, q)| (p, Scalar::Rat(q))).collect(),
                };
                let mut next = Vec::with_capacity(partial.len() * parts.len());
                for (key, coef) in &partial {
                    for (p, q) in &parts {
                        let mut key = key.clone();
                        key.push(p.clone());
                        next.push((key, coef.times(q)));
                    }
                }
                partial = next;
            }
            let target = &mut out[k];
            for (key, coef) in partial {
                let e = target.entry(key).or_insert_with(|| coef.descriptor().zero());
                *e = e.plus(&coef);
            }
        }
    }
    for m in &mut out {
        m.retain(|_, c| !c.is_zero());
    }
    Ok(out)
}

fn join_all(parts: &[Play]) -> Play {
    parts.iter().fold(Play::empty(), |acc, p| acc.join(p).expect("within size bound"))
}

/// All weak total orders on `events`: ordered set partitions.
pub fn weak_orders(events: &[Event]) -> Vec<Play> {
    fn go(rest: &[usize], layers: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if rest.is_empty() {
            out.push(layers.clone());
            return;
        }
        let n = rest.len();
        for mask in 1u32..(1 << n) {
            let (layer, left): (Vec<usize>, Vec<usize>) = {
                let mut l = Vec::new();
                let mut r = Vec::new();
                for (k, &x) in rest.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        l.push(x)
                    } else {
                        r.push(x)
                    }
                }
                (l, r)
            };
            layers.push(layer);
            go(&left, layers, out);
            layers.pop();
        }
    }
    let mut all = Vec::new();
    go(&(0..events.len()).collect::<Vec<_>>(), &mut Vec::new(), &mut all);
    let mut plays: Vec<Play> = all
        .into_iter()
        .map(|layers| {
            let mut pairs = Vec::new();
            for (i, lo) in layers.iter().enumerate() {
                for hi in &layers[i + 1..] {
                    for &a in lo {
                        for &b in hi {
                            pairs.push((a, b));
                        }
                    }
                }
            }
            Play::from_index_pairs(events.to_vec(), &pairs)
        })
        .collect();
    plays.sort();
    plays
}

/// Probe plays on the supports where the coordinates of the given static
/// vectors differ: the differing keys on the totals route, all products
/// of blockwise weak orders on the weak route.
pub(crate) fn candidate_probes(vs: &[&Vector], route: Route) -> Result<Vec<Play>> {
    let owned: Vec<Vector> = match route {
        Route::Weak => vs.iter().map(|v| rat_coefficients(v)).collect::<Result<_>>()?,
        Route::Totals => vs.iter().map(|v| (*v).clone()).collect(),
    };
    let refs: Vec<&Vector> = owned.iter().collect();
    let coords = factored_coords(&refs, route)?;
    let keys: BTreeSet<&Vec<Play>> = coords.iter().flat_map(|m| m.keys()).collect();
    let differing: Vec<&Vec<Play>> =
        keys.into_iter().filter(|k| coords.iter().any(|m| m.get(*k) != coords[0].get(*k))).collect();
    let mut out = BTreeSet::new();
    for key in differing {
        match route {
            Route::Totals => {
                out.insert(join_all(key));
            }
            Route::Weak => {
                let mut partial = vec![Vec::new()];
                for block in key {
                    let mut next = Vec::new();
                    for w in weak_orders(block.support()) {
                        for p in &partial {
                            let mut p: Vec<Play> = p.clone();
                            p.push(w.clone());
                            next.push(p);
                        }
                    }
                    partial = next;
                }
                out.extend(partial.iter().map(|p| join_all(p)));
            }
        }
    }
    Ok(out.into_iter().collect())
}

pub fn gram_matrix(sr: SemiringDescriptor, plays: &[Play]) -> Vec<Vec<Scalar>> {
    plays
        .iter()
        .map(|p| {
            plays
                .iter()
                .map(|q| match p.sync(q) {
                    Some(s) if s.is_consistent() => sr.one(),
                    _ => sr.zero(),
                })
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse over the rationals.
#[allow(clippy::needless_range_loop)]
pub fn invert(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let d = &a[col][c] * &f;
                    a[r][c] -= d;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Row rank over the rationals.
#[allow(clippy::needless_range_loop)]
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for k in c..cols {
                    let d = &a[r][k] * &f;
                    a[i][k] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Duals `b*_i = sum_j (G^-1)_ij b_j` of base plays on one support.
pub fn dual_family(base: &[Play]) -> Result<Vec<Vector>> {
    let rat = SemiringDescriptor::rat();
    let events: BTreeSet<Event> = base.iter().flat_map(|p| p.support().iter().cloned()).collect();
    let arena = ArenaKind::Static(events);
    let g: Vec<Vec<BigRational>> = gram_matrix(rat, base)
        .into_iter()
        .map(|row| row.into_iter().map(|s| s.as_rat().cloned().expect("RAT")).collect())
        .collect();
    let Some(inv) = invert(&g) else {
        return usage("singular Gram matrix: the family is not a basis");
    };
    let mut out = Vec::with_capacity(base.len());
    for row in inv {
        let terms = base.iter().cloned().zip(row.into_iter().map(Scalar::Rat));
        out.push(Vector::from_terms(rat, arena.clone(), terms)?);
    }
    Ok(out)
}

/// All weak total orders and all total orders on a finite event set.
pub fn weak_totals_and_totals(events: &[Event]) -> (Vec<Play>, Vec<Play>) {
    let weak = weak_orders(events);
    let totals = weak.iter().filter(|p| p.is_total()).cloned().collect();
    (weak, totals)
}

/// The submodule generated by finitely many plays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSpace {
    pub arena: ArenaKind,
    pub generators: Vec<Play>,
}

impl TypeSpace {
    pub fn new(arena: ArenaKind, generators: Vec<Play>) -> Result<TypeSpace> {
        for g in &generators {
            for e in g.support() {
                arena.encode(e)?;
            }
        }
        Ok(TypeSpace { arena, generators })
    }

    /// Strict when no generator is the empty play.
    pub fn is_strict(&self) -> bool {
        self.generators.iter().all(|g| !g.is_empty())
    }

    pub fn tensor(&self, other: &TypeSpace) -> TypeSpace {
        let arena = ArenaKind::Sum(vec![self.arena.clone(), other.arena.clone()]);
        let mut gens = Vec::new();
        for g in &self.generators {
            let l = g.map_events(|e| Event::inj(0, e.clone()));
            for h in &other.generators {
                let r = h.map_events(|e| Event::inj(1, e.clone()));
                gens.push(l.join(&r).expect("within size bound"));
            }
        }
        TypeSpace { arena, generators: gens }
    }
}

fn finite_carrier(sr: SemiringDescriptor) -> Option<Vec<Scalar>> {
    match sr.name {
        SemiringName::Bool => Some(vec![Scalar::Bool(false), Scalar::Bool(true)]),
        SemiringName::MayMust(m) => Some(vec![Scalar::MayMust(m, Tri::Zero), Scalar::MayMust(m, Tri::One), Scalar::MayMust(m, Tri::Omega)]),
        _ => None,
    }
}

/// Natural order of an idempotent semiring.
fn below(x: &Scalar, y: &Scalar) -> bool {
    x.plus(y) == *y
}

pub fn type_membership(t: &TypeSpace, u: &Vector) -> Result<bool> {
    if *u.arena() != t.arena {
        return usage(format!("vector over {} tested against a type over {}", u.arena(), t.arena));
    }
    let sr = u.semiring();
    let route = match sr.name {
        SemiringName::Rat => Route::Weak,
        _ if sr.is_idempotent => Route::Totals,
        _ => return unsupported(format!("type membership over {sr} needs RAT or an idempotent semiring")),
    };
    let mut vs = vec![psplit(u)?];
    for g in &t.generators {
        vs.push(psplit(&Vector::from_play(sr, t.arena.clone(), g.clone())?)?);
    }
    let refs: Vec<&Vector> = vs.iter().collect();
    let coords = factored_coords(&refs, route)?;
    let keys: Vec<&Vec<Play>> = coords.iter().flat_map(|m| m.keys()).collect::<BTreeSet<_>>().into_iter().collect();
    let column = |m: &FactoredCoords, k: &Vec<Play>| m.get(k).cloned().unwrap_or_else(|| sr.zero());
    match route {
        Route::Weak => {
            let rows = |ms: &[FactoredCoords]| -> Vec<Vec<BigRational>> {
                ms.iter()
                    .map(|m| keys.iter().map(|k| column(m, k).as_rat().cloned().expect("RAT")).collect())
                    .collect()
            };
            let gens = rows(&coords[1..]);
            let all = rows(&coords);
            Ok(rank(&gens) == rank(&all))
        }
        Route::Totals => {
            // greatest sub-solution: each generator gets the largest scalar
            // keeping it below u everywhere; u is reachable iff that sum is u
            let carrier = finite_carrier(sr).expect("idempotent semirings here are finite");
            let mut sum: BTreeMap<&Vec<Play>, Scalar> = BTreeMap::new();
            for g in &coords[1..] {
                let lambda = carrier
                    .iter()
                    .filter(|l| keys.iter().all(|k| below(&l.times(&column(g, k)), &column(&coords[0], k))))
                    .fold(sr.zero(), |acc, l| acc.plus(l));
                for k in &keys {
                    let e = sum.entry(k).or_insert_with(|| sr.zero());
                    *e = e.plus(&lambda.times(&column(g, k)));
                }
            }
            Ok(keys.iter().all(|k| sum.get(k).cloned().unwrap_or_else(|| sr.zero()) == column(&coords[0], k)))
        }
    }
}

/// Whether composing `r` (over `X+Y`) with every generator of `a` lands in `b`.
pub fn lolli_generator_check(sr: SemiringDescriptor, r: &Play, a: &TypeSpace, b: &TypeSpace) -> Result<bool> {
    let xy = ArenaKind::Sum(vec![a.arena.clone(), b.arena.clone()]);
    let v = Vector::from_play(sr, xy, r.clone())?;
    let lifted = ArenaKind::Sum(vec![ArenaKind::empty(), a.arena.clone()]);
    for g in &a.generators {
        let u = inject(&Vector::from_play(sr, a.arena.clone(), g.clone())?, lifted.clone(), 1)?;
        let w = restrict(&compose_through(&u, &v)?, &Keep::Components(vec![1]))?;
        if !type_membership(b, &w)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coordinates of `u` in the dual family of `base`, by pairing.
pub fn pair_with_duals(u: &Vector, duals: &[Vector]) -> Result<Vec<Scalar>> {
    duals.iter().map(|d| Ok(algebra::outcome(&algebra::psync(u, &d.with_arena(u.arena().clone())?)?))).collect()
}

pub fn int_scalar(n: i64) -> Scalar {
    Scalar::Rat(BigRational::from_integer(BigInt::from(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{obs_equiv, probe_oracle_equiv};
    use proptest::prelude::*;

    fn ev(s: &str) -> Event {
        Event::atom(s)
    }

    fn xyz() -> (ArenaKind, Vec<Event>) {
        (ArenaKind::static_atoms(["x", "y", "z"]), vec![ev("x"), ev("y"), ev("z")])
    }

    fn play(es: &[Event], pairs: &[(usize, usize)]) -> Play {
        Play::from_index_pairs(es.to_vec(), pairs)
    }

    #[test]
    fn weak_total_predicate() {
        let (_, es) = xyz();
        assert!(is_weak_total(&play(&es, &[(0, 1), (1, 2)])));
        assert!(is_weak_total(&play(&es, &[])));
        assert!(!is_weak_total(&play(&es, &[(0, 1)])));
        assert!(!is_weak_total(&play(&es[..2], &[(0, 1), (1, 0)])));
        // condition 2: incomparability-or-equality is transitive
        for p in crate::algebra::all_preorders(&es).into_iter().filter(Play::is_consistent) {
            let inc = |a: usize, b: usize| a == b || (!p.leq_idx(a, b) && !p.leq_idx(b, a));
            let transitive = (0..3).all(|a| (0..3).all(|b| (0..3).all(|c| !(inc(a, b) && inc(b, c)) || inc(a, c))));
            assert_eq!(is_weak_total(&p), transitive);
        }
    }

    /// Brute force over all preorders on three points.
    #[test]
    fn counts_on_three_points() {
        let (_, es) = xyz();
        let all = crate::algebra::all_preorders(&es);
        let weak = all.iter().filter(|p| is_weak_total(p)).count();
        let totals = all.iter().filter(|p| p.is_total()).count();
        assert_eq!((weak, totals), (13, 6));
        let (w, t) = weak_totals_and_totals(&es);
        assert_eq!((w.len(), t.len()), (13, 6));
    }

    #[test]
    fn gram_examples() {
        let es = [ev("a"), ev("b")];
        let q = SemiringDescriptor::rat();
        let g = gram_matrix(q, &[play(&es, &[]), play(&es, &[(0, 1)]), play(&es, &[(1, 0)])]);
        let expect: Vec<Vec<Scalar>> =
            [[1, 1, 1], [1, 1, 0], [1, 0, 1]].iter().map(|r| r.iter().map(|&x| int_scalar(x)).collect()).collect();
        assert_eq!(g, expect);
        let (_, es) = xyz();
        let (_, totals) = weak_totals_and_totals(&es);
        let gt = gram_matrix(q, &totals);
        for (i, row) in gt.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, int_scalar((i == j) as i64));
            }
        }
    }

    #[test]
    fn duals_are_biorthogonal() {
        let es = [ev("a"), ev("b")];
        let base = weak_orders(&es);
        assert_eq!(base.len(), 3);
        let duals = dual_family(&base).unwrap();
        let arena = duals[0].arena().clone();
        for (i, b) in base.iter().enumerate() {
            let bv = Vector::from_play(SemiringDescriptor::rat(), arena.clone(), b.clone()).unwrap();
            let got = pair_with_duals(&bv, &duals).unwrap();
            for (j, x) in got.iter().enumerate() {
                assert_eq!(*x, int_scalar((i == j) as i64));
            }
        }
        let one = dual_family(&[Play::neutral([ev("a")])]).unwrap();
        assert_eq!(one[0].terms().values().collect::<Vec<_>>(), vec![&int_scalar(1)]);
        assert!(dual_family(&[play(&es, &[(0, 1)]), play(&es, &[(0, 1)])]).is_err());
    }

    #[test]
    fn decompositions() {
        let (x, es) = xyz();
        let q = SemiringDescriptor::rat();
        let r = play(&es, &[(0, 1)]);
        let d = decompose_weak(&Vector::from_play(q, x.clone(), r).unwrap()).unwrap();
        let expect: BTreeMap<Play, Scalar> = [
            (play(&es, &[(0, 1), (0, 2)]), int_scalar(1)),
            (play(&es, &[(0, 1), (2, 1)]), int_scalar(1)),
            (play(&es, &[(0, 2), (2, 1)]), int_scalar(-1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(d.coords, expect);
        let w = play(&es, &[(0, 1), (0, 2)]);
        assert_eq!(decompose_weak(&Vector::from_play(q, x.clone(), w.clone()).unwrap()).unwrap().coords.len(), 1);
        let b = SemiringDescriptor::boolean();
        let anti = play(&es[..2], &[]);
        let dt = decompose_totals(&Vector::from_play(b, ArenaKind::static_atoms(["x", "y"]), anti).unwrap()).unwrap();
        assert_eq!(dt.coords.len(), 2);
        let t = play(&es, &[(0, 1), (1, 2)]);
        assert_eq!(decompose_totals(&Vector::from_play(b, x.clone(), t).unwrap()).unwrap().coords.len(), 1);
        let cyc = play(&es[..2], &[(0, 1), (1, 0)]);
        assert!(decompose_totals(&Vector::from_play(b, x.clone(), cyc).unwrap()).unwrap().coords.is_empty());
        assert!(decompose_totals(&Vector::from_play(q, x.clone(), w.clone()).unwrap()).is_err());
        assert!(decompose_weak(&Vector::from_play(b, x, w).unwrap()).is_err());
    }

    #[test]
    fn types() {
        let q = SemiringDescriptor::rat();
        let x = ArenaKind::static_atoms(["a", "b"]);
        let es = [ev("a"), ev("b")];
        let indep = TypeSpace::new(x.clone(), vec![play(&es, &[])]).unwrap();
        let ab = Vector::from_play(q, x.clone(), play(&es, &[(0, 1)])).unwrap();
        let ba = Vector::from_play(q, x.clone(), play(&es, &[(1, 0)])).unwrap();
        assert!(!type_membership(&indep, &ab).unwrap());
        // over a ring the two interleavings differ from the antichain
        assert!(!type_membership(&indep, &ab.add(&ba).unwrap()).unwrap());
        let g = Vector::from_play(q, x.clone(), play(&es, &[])).unwrap();
        assert!(type_membership(&indep, &g.scale(&int_scalar(-3)).unwrap()).unwrap());
        let lone = Vector::from_play(q, x.clone(), Play::neutral([ev("a")])).unwrap();
        assert!(!type_membership(&indep, &lone).unwrap());
        // same over BOOL
        let b = SemiringDescriptor::boolean();
        let sum = Vector::from_terms(b, x.clone(), [(play(&es, &[(0, 1)]), b.one()), (play(&es, &[(1, 0)]), b.one())]).unwrap();
        assert!(type_membership(&indep, &sum).unwrap());
        assert!(!type_membership(&indep, &Vector::from_play(b, x.clone(), play(&es, &[(0, 1)])).unwrap()).unwrap());
        assert!(type_membership(&indep, &Vector::from_play(SemiringDescriptor::nat(), x, play(&es, &[])).unwrap()).is_err());
    }

    #[test]
    fn lolli_checks() {
        let q = SemiringDescriptor::rat();
        let xa = ArenaKind::static_atoms(["p"]);
        let yb = ArenaKind::static_atoms(["q"]);
        let a = TypeSpace::new(xa.clone(), vec![Play::neutral([ev("p")])]).unwrap();
        let b = TypeSpace::new(yb.clone(), vec![Play::neutral([ev("q")])]).unwrap();
        let pq = [Event::inj(0, ev("p")), Event::inj(1, ev("q"))];
        let copycat = Play::from_index_pairs(pq.to_vec(), &[(0, 1)]);
        assert!(lolli_generator_check(q, &copycat, &a, &b).unwrap());
        let empty_a = TypeSpace::new(xa.clone(), vec![]).unwrap();
        assert!(lolli_generator_check(q, &copycat, &empty_a, &b).unwrap());
        // a play touching only p maps the generator to the empty play
        let forget = Play::neutral([Event::inj(0, ev("p"))]);
        assert!(!lolli_generator_check(q, &forget, &a, &b).unwrap());
    }

    #[test]
    fn tensor_duals_pair_to_deltas() {
        let q = SemiringDescriptor::rat();
        let (b1, b2) = (weak_orders(&[ev("a"), ev("b")]), weak_orders(&[ev("c"), ev("d")]));
        let (d1, d2) = (dual_family(&b1).unwrap(), dual_family(&b2).unwrap());
        let xa = ArenaKind::static_atoms(["a", "b"]);
        let xc = ArenaKind::static_atoms(["c", "d"]);
        for (i, p) in b1.iter().enumerate() {
            for (j, r) in b2.iter().enumerate() {
                let bp = algebra::tensor(&Vector::from_play(q, xa.clone(), p.clone()).unwrap(), &Vector::from_play(q, xc.clone(), r.clone()).unwrap()).unwrap();
                for (m, dm) in d1.iter().enumerate() {
                    for (n, dn) in d2.iter().enumerate() {
                        let dd = algebra::tensor(&dm.with_arena(xa.clone()).unwrap(), &dn.with_arena(xc.clone()).unwrap()).unwrap();
                        let got = algebra::outcome(&algebra::psync(&bp, &dd).unwrap());
                        assert_eq!(got, int_scalar((i == m && j == n) as i64));
                    }
                }
            }
        }
    }

    fn random_vector(sr: SemiringDescriptor) -> impl Strategy<Value = Vector> {
        let es = [ev("w"), ev("x"), ev("y"), ev("z")];
        proptest::collection::vec((proptest::collection::vec(any::<bool>(), 4), proptest::collection::vec(0u8..4, 16), -2i64..3), 1..4).prop_map(
            move |plays| {
                let arena = ArenaKind::Static(es.iter().cloned().collect());
                let mut v = Vector::zero(sr, arena);
                for (mask, bits, c) in plays {
                    let sup: Vec<Event> = es.iter().zip(&mask).filter(|(_, m)| **m).map(|(e, _)| e.clone()).collect();
                    let n = sup.len();
                    let pairs: Vec<_> = (0..n * n).filter(|&k| bits[k] == 0 && k / n != k % n).map(|k| (k / n, k % n)).collect();
                    let coef = match sr.name {
                        SemiringName::Rat => int_scalar(c),
                        _ => sr.from_count(c.unsigned_abs()),
                    };
                    v.add_term(Play::from_index_pairs(sup, &pairs), coef);
                }
                v
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn weak_recomposition_is_equivalent(u in random_vector(SemiringDescriptor::rat())) {
            let d = decompose_weak(&u).unwrap();
            let back = Vector::from_terms(u.semiring(), u.arena().clone(), d.coords.clone()).unwrap();
            prop_assert!(probe_oracle_equiv(&u, &back, 4).unwrap());
            prop_assert!(d.coords.keys().all(is_weak_total));
        }

        #[test]
        fn totals_recomposition_is_equivalent(u in random_vector(SemiringDescriptor::boolean())) {
            let d = decompose_totals(&u).unwrap();
            let back = Vector::from_terms(u.semiring(), u.arena().clone(), d.coords.clone()).unwrap();
            prop_assert!(probe_oracle_equiv(&u, &back, 4).unwrap());
        }

        #[test]
        fn basis_route_matches_oracle(u in random_vector(SemiringDescriptor::rat()), v in random_vector(SemiringDescriptor::rat())) {
            prop_assert_eq!(obs_equiv(&u, &v).unwrap(), probe_oracle_equiv(&u, &v, 4).unwrap());
        }

        #[test]
        fn decompositions_respect_supports(u in random_vector(SemiringDescriptor::rat())) {
            let d = decompose_weak(&u).unwrap();
            let supports: BTreeSet<Vec<Event>> = u.terms().keys().map(|r| r.support().to_vec()).collect();
            prop_assert!(d.coords.keys().all(|p| supports.contains(p.support())));
        }
    }
}
