//! Copies of plays: merging and splitting copy indices, and the graded
//! generators of the exponential type.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::Vector;
use crate::arenas::{self, ArenaKind};
use crate::basis::TypeSpace;
use crate::error::{usage, Result};
use crate::event::Event;
use crate::plays::Play;

/// A bijection `n x N -> N`, known on finitely many pairs or given by a
/// formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CopyBijection {
    /// `(i, k) -> k * n + i`.
    Interleave(u32),
    /// A finite injective table; extends to a full bijection.
    Table(BTreeMap<(u32, u32), u32>),
}

impl CopyBijection {
    pub fn table(pairs: impl IntoIterator<Item = ((u32, u32), u32)>) -> Result<CopyBijection> {
        let map: BTreeMap<(u32, u32), u32> = pairs.into_iter().collect();
        let images: BTreeSet<u32> = map.values().copied().collect();
        if images.len() != map.len() {
            return usage("copy bijection is not injective");
        }
        Ok(CopyBijection::Table(map))
    }

    pub fn apply(&self, i: u32, k: u32) -> Option<u32> {
        match self {
            CopyBijection::Interleave(n) => k.checked_mul(*n)?.checked_add(i),
            CopyBijection::Table(m) => m.get(&(i, k)).copied(),
        }
    }
}

fn sharp_body(arena: &ArenaKind) -> Option<&ArenaKind> {
    match arena {
        ArenaKind::Indexing(x, y) if **x == ArenaKind::Nat => Some(y),
        _ => None,
    }
}

fn split_copy(e: &Event) -> Option<(u32, &Event)> {
    match e {
        Event::At(c, x) => match **c {
            Event::Copy(k) => Some((k, x)),
            _ => None,
        },
        _ => None,
    }
}

/// Merges `n` copies of `#X` into one through `phi`.
pub fn gamma(n: u32, phi: &CopyBijection, u: &Vector) -> Result<Vector> {
    let body = match u.arena() {
        ArenaKind::FinIndex(m, y) if *m == n && sharp_body(y).is_some() => (**y).clone(),
        other => return usage(format!("gamma over {n} copies expects {n} copies of #X, got {other}")),
    };
    let mut terms = Vec::with_capacity(u.len());
    for (r, c) in u.terms() {
        for e in r.support() {
            let (i, inner) = split_copy(e).expect("encoded by the arena");
            let (k, _) = split_copy(inner).expect("encoded by the arena");
            if phi.apply(i, k).is_none() {
                return usage(format!("copy bijection undefined on ({i}, {k})"));
            }
        }
        let merged = r.map_events(|e| {
            let (i, inner) = split_copy(e).expect("checked above");
            let (k, x) = split_copy(inner).expect("checked above");
            Event::at(Event::Copy(phi.apply(i, k).expect("checked above")), x.clone())
        });
        terms.push((merged, c.clone()));
    }
    Vector::from_terms(u.semiring(), body, terms)
}

/// Sum over every assignment of the occupied copies of `#X` to `n` targets.
pub fn delta(n: u32, u: &Vector) -> Result<Vector> {
    if sharp_body(u.arena()).is_none() {
        return usage(format!("delta expects a vector over #X, got {}", u.arena()));
    }
    let target = ArenaKind::fin_index(n, u.arena().clone());
    let mut out = Vector::zero(u.semiring(), target.clone());
    for (r, c) in u.terms() {
        let occupied: Vec<u32> =
            r.support().iter().map(|e| split_copy(e).expect("encoded by the arena").0).collect::<BTreeSet<_>>().into_iter().collect();
        let mut assignment = vec![0u32; occupied.len()];
        if n == 0 && !occupied.is_empty() {
            continue;
        }
        loop {
            let slot: BTreeMap<u32, u32> = occupied.iter().copied().zip(assignment.iter().copied()).collect();
            let moved = r.map_events(|e| {
                let (k, _) = split_copy(e).expect("encoded by the arena");
                Event::at(Event::Copy(slot[&k]), e.clone())
            });
            out.add_term(moved, c.clone());
            // odometer over assignments occupied -> n
            let mut pos = 0;
            loop {
                if pos == assignment.len() {
                    break;
                }
                assignment[pos] += 1;
                if assignment[pos] < n {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
            if pos == assignment.len() {
                break;
            }
        }
    }
    Ok(out)
}

/// Places every event of `u` into copy `k` of `#X`.
pub fn embed_copy(k: u32, u: &Vector) -> Result<Vector> {
    u.map_events(ArenaKind::sharp(u.arena().clone()), |e| Event::at(Event::Copy(k), e.clone()))
}

/// `u_0 (x) ... (x) u_{n-1}` with `u_i` over `#X` placed in copy `i`.
pub fn copies(us: &[&Vector]) -> Result<Vector> {
    let Some(first) = us.first() else {
        return usage("copies needs at least one vector");
    };
    let arena = ArenaKind::fin_index(us.len() as u32, first.arena().clone());
    let mut acc = Vector::from_play(first.semiring(), arena.clone(), Play::empty())?;
    for (i, u) in us.iter().enumerate() {
        if u.arena() != first.arena() {
            return usage("copies need a common arena");
        }
        let placed = u.map_events(arena.clone(), |e| Event::at(Event::Copy(i as u32), e.clone()))?;
        let mut next = Vector::zero(first.semiring(), arena.clone());
        for (p, a) in acc.terms() {
            for (q, b) in placed.terms() {
                let joined = p.join(q)?;
                next.add_term(joined, a.mul(b)?);
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Generators of the exponential truncated at a degree, with the degree
/// (number of occupied copies) of each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BangType {
    pub space: TypeSpace,
    pub degrees: Vec<usize>,
}

pub fn bang_generators(a: &TypeSpace, max_degree: usize) -> Result<BangType> {
    let arena = ArenaKind::sharp(a.arena.clone());
    let gens = &a.generators;
    let mut seen: BTreeSet<Play> = BTreeSet::new();
    let mut out = BangType { space: TypeSpace { arena: arena.clone(), generators: Vec::new() }, degrees: Vec::new() };
    // multisets as nondecreasing index sequences
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for degree in 0..=max_degree {
        let mut next = Vec::new();
        for ms in &frontier {
            let mut play = Play::empty();
            for (copy, &g) in ms.iter().enumerate() {
                let placed = gens[g].map_events(|e| Event::at(Event::Copy(copy as u32), e.clone()));
                play = play.join(&placed)?;
            }
            let rep = arenas::representant(&arena, &play)?;
            if seen.insert(rep.clone()) {
                let occupied: BTreeSet<u32> = rep.support().iter().filter_map(|e| split_copy(e).map(|(k, _)| k)).collect();
                out.space.generators.push(rep);
                out.degrees.push(occupied.len());
            }
            if degree < max_degree {
                let start = ms.last().copied().unwrap_or(0);
                for g in start..gens.len() {
                    let mut m = ms.clone();
                    m.push(g);
                    next.push(m);
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{obs_equiv, outcome, psync};
    use crate::semiring::SemiringDescriptor;
    use proptest::prelude::*;

    fn ab() -> ArenaKind {
        ArenaKind::static_atoms(["a", "b"])
    }

    fn at(k: u32, x: &str) -> Event {
        Event::at(Event::Copy(k), Event::atom(x))
    }

    fn nat() -> SemiringDescriptor {
        SemiringDescriptor::nat()
    }

    fn sharp_play(events: &[Event], pairs: &[(usize, usize)]) -> Vector {
        let r = Play::from_index_pairs(events.to_vec(), pairs);
        Vector::from_play(nat(), ArenaKind::sharp(ab()), r).unwrap()
    }

    #[test]
    fn gamma_relabels() {
        let empty = Vector::from_play(nat(), ArenaKind::fin_index(2, ArenaKind::sharp(ab())), Play::empty()).unwrap();
        let merged = gamma(2, &CopyBijection::Interleave(2), &empty).unwrap();
        assert_eq!(merged.terms().keys().next().unwrap(), &Play::empty());
        let (u, v) = (sharp_play(&[at(0, "a")], &[]), sharp_play(&[at(0, "b")], &[]));
        let both = copies(&[&u, &v]).unwrap();
        let merged = gamma(2, &CopyBijection::Interleave(2), &both).unwrap();
        let r = merged.terms().keys().next().unwrap();
        assert_eq!(r.support(), &[at(0, "a"), at(1, "b")]);
        let other = CopyBijection::table([((0, 0), 7), ((1, 0), 3)]).unwrap();
        assert!(obs_equiv(&merged, &gamma(2, &other, &both).unwrap()).unwrap());
        let partial = CopyBijection::table([((0, 0), 7)]).unwrap();
        assert!(gamma(2, &partial, &both).is_err());
        assert!(CopyBijection::table([((0, 0), 1), ((1, 0), 1)]).is_err());
    }

    #[test]
    fn delta_counts() {
        let empty = sharp_play(&[], &[]);
        assert_eq!(delta(2, &empty).unwrap().len(), 1);
        assert_eq!(delta(0, &empty).unwrap().len(), 1);
        let one = sharp_play(&[at(3, "a"), at(3, "b")], &[(0, 1)]);
        assert_eq!(delta(2, &one).unwrap().len(), 2);
        assert!(delta(0, &one).unwrap().is_zero());
        let two = sharp_play(&[at(0, "a"), at(1, "a")], &[]);
        assert_eq!(delta(2, &two).unwrap().len(), 4);
        assert_eq!(delta(3, &two).unwrap().len(), 9);
    }

    #[test]
    fn embeddings_agree() {
        let r = Vector::from_play(nat(), ab(), Play::chain(&[Event::atom("a"), Event::atom("b")]).unwrap()).unwrap();
        let (e0, e5) = (embed_copy(0, &r).unwrap(), embed_copy(5, &r).unwrap());
        assert!(obs_equiv(&e0, &e5).unwrap());
        assert_eq!(outcome(&e5), outcome(&r));
        let empty = Vector::from_play(nat(), ab(), Play::empty()).unwrap();
        assert_eq!(embed_copy(2, &empty).unwrap().terms().keys().next().unwrap(), &Play::empty());
    }

    #[test]
    fn bang_of_singleton_is_polynomial() {
        let x = ArenaKind::static_atoms(["a"]);
        let a = TypeSpace::new(x, vec![Play::neutral([Event::atom("a")])]).unwrap();
        for d in 0..5 {
            let bang = bang_generators(&a, d).unwrap();
            assert_eq!(bang.space.generators.len(), d + 1);
            assert_eq!(bang.degrees, (0..=d).collect::<Vec<_>>());
        }
        let bang = bang_generators(&a, 0).unwrap();
        assert_eq!(bang.space.generators, vec![Play::empty()]);
        let bang = bang_generators(&a, 1).unwrap();
        assert_eq!(bang.space.generators[1].support(), &[at(1, "a")]);
    }

    /// `!(A + B)` against pairs of generators of `!A` and `!B`.
    #[test]
    fn bang_of_sum_matches_tensor_counts() {
        let (x, y) = (ArenaKind::static_atoms(["a"]), ArenaKind::static_atoms(["b"]));
        let a = TypeSpace::new(x.clone(), vec![Play::neutral([Event::atom("a")])]).unwrap();
        let b = TypeSpace::new(y.clone(), vec![Play::neutral([Event::atom("b")])]).unwrap();
        let sum = TypeSpace::new(
            ArenaKind::sum(vec![x, y]),
            vec![Play::neutral([Event::inj(0, Event::atom("a"))]), Play::neutral([Event::inj(1, Event::atom("b"))])],
        )
        .unwrap();
        let lhs = bang_generators(&sum, 2).unwrap();
        let (ba, bb) = (bang_generators(&a, 2).unwrap(), bang_generators(&b, 2).unwrap());
        let pairs = ba.degrees.iter().flat_map(|i| bb.degrees.iter().map(move |j| i + j)).filter(|&d| d <= 2).count();
        assert_eq!(lhs.space.generators.len(), pairs);
    }

    #[test]
    fn indexing_distributes_over_sums() {
        let (x, y, z) = (ab(), ArenaKind::static_atoms(["c"]), ArenaKind::labeled(["l"]));
        let lhs = ArenaKind::Indexing(Box::new(ArenaKind::sum(vec![x.clone(), y.clone()])), Box::new(z.clone()));
        let rhs = ArenaKind::sum(vec![
            ArenaKind::Indexing(Box::new(x), Box::new(z.clone())),
            ArenaKind::Indexing(Box::new(y), Box::new(z)),
        ]);
        let to_rhs = |e: &Event| match e {
            Event::At(i, z) => match &**i {
                Event::Inj(t, x) => Event::inj(*t, Event::at((**x).clone(), (**z).clone())),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        };
        let to_lhs = |e: &Event| match e {
            Event::Inj(t, inner) => match &**inner {
                Event::At(x, z) => Event::at(Event::inj(*t, (**x).clone()), (**z).clone()),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        };
        for (t, name) in [(0, "a"), (0, "b"), (1, "c")] {
            for n in 0..3 {
                let e = Event::at(Event::inj(t, Event::atom(name)), Event::occ("l", n));
                assert!(lhs.contains(&e));
                let f = to_rhs(&e);
                assert!(rhs.contains(&f));
                assert_eq!(to_lhs(&f), e);
            }
        }
    }

    fn arb_sharp(max_copies: u32) -> impl Strategy<Value = Vector> {
        let pool: Vec<Event> = (0..max_copies).flat_map(|k| [at(k, "a"), at(k, "b")]).collect();
        proptest::collection::vec((proptest::collection::vec(any::<bool>(), pool.len()), proptest::collection::vec(any::<bool>(), 16), 1u64..3), 1..3)
            .prop_map(move |plays| {
                let mut v = Vector::zero(nat(), ArenaKind::sharp(ab()));
                for (mask, bits, c) in plays {
                    let sup: Vec<Event> = pool.iter().zip(&mask).filter(|(_, m)| **m).map(|(e, _)| e.clone()).take(3).collect();
                    let n = sup.len();
                    let pairs: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| i != j && bits[i * 4 + j]).collect();
                    let r = Play::from_index_pairs(sup, &pairs);
                    v = v.add(&Vector::from_terms(nat(), ArenaKind::sharp(ab()), [(r, nat().from_count(c))]).unwrap()).unwrap();
                }
                v
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn merge_and_split_are_adjoint(u in arb_sharp(2), w in arb_sharp(2), v in arb_sharp(3)) {
            let one = copies(&[&u]).unwrap();
            prop_assert_eq!(
                outcome(&psync(&gamma(1, &CopyBijection::Interleave(1), &one).unwrap(), &v).unwrap()),
                outcome(&psync(&one, &delta(1, &v).unwrap()).unwrap())
            );
            let two = copies(&[&u, &w]).unwrap();
            prop_assert_eq!(
                outcome(&psync(&gamma(2, &CopyBijection::Interleave(2), &two).unwrap(), &v).unwrap()),
                outcome(&psync(&two, &delta(2, &v).unwrap()).unwrap())
            );
        }

        #[test]
        fn merge_is_commutative_with_unit(u in arb_sharp(2), w in arb_sharp(2)) {
            let phi = CopyBijection::Interleave(2);
            let uw = gamma(2, &phi, &copies(&[&u, &w]).unwrap()).unwrap();
            let wu = gamma(2, &phi, &copies(&[&w, &u]).unwrap()).unwrap();
            prop_assert!(obs_equiv(&uw, &wu).unwrap());
            let unit = Vector::from_play(nat(), ArenaKind::sharp(ab()), Play::empty()).unwrap();
            prop_assert!(obs_equiv(&gamma(2, &phi, &copies(&[&unit, &u]).unwrap()).unwrap(), &u).unwrap());
        }

        #[test]
        fn merge_is_associative(u in arb_sharp(1), w in arb_sharp(1), v in arb_sharp(1)) {
            let phi = CopyBijection::Interleave(2);
            let m = |x: &Vector, y: &Vector| gamma(2, &phi, &copies(&[x, y]).unwrap()).unwrap();
            prop_assert!(obs_equiv(&m(&m(&u, &w), &v), &m(&u, &m(&w, &v))).unwrap());
        }

        #[test]
        fn split_is_cocommutative(u in arb_sharp(3)) {
            let d = delta(2, &u).unwrap();
            let swapped = d.map_events(d.arena().clone(), |e| match e {
                Event::At(c, x) => match **c {
                    Event::Copy(i) => Event::at(Event::Copy(1 - i), (**x).clone()),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            }).unwrap();
            prop_assert!(obs_equiv(&d, &swapped).unwrap());
        }
    }
}
