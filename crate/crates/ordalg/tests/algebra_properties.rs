use ordalg::algebra::{obs_equiv, outcome, probe_oracle_equiv, psync, Vector};
use ordalg::arenas::ArenaKind;
use ordalg::event::Event;
use ordalg::plays::Play;
use ordalg::semiring::SemiringDescriptor;
use proptest::prelude::*;

const POINTS: [&str; 3] = ["x", "y", "z"];

fn arena() -> ArenaKind {
    ArenaKind::static_atoms(POINTS)
}

/// A play on a subset of the points, from a support mask and pair bits.
fn play(mask: u8, bits: u16) -> Play {
    let sup: Vec<Event> = POINTS.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| Event::atom(p)).collect();
    let mut covers = Vec::new();
    for (i, a) in sup.iter().enumerate() {
        for (j, b) in sup.iter().enumerate() {
            if i != j && bits >> (3 * i + j) & 1 == 1 {
                covers.push((a.clone(), b.clone()));
            }
        }
    }
    Play::new(sup, &covers).unwrap()
}

fn vector(sr: SemiringDescriptor) -> impl Strategy<Value = Vector> {
    proptest::collection::vec((0u8..8, any::<u16>(), 1u64..3), 1..4).prop_map(move |terms| {
        let terms = terms.into_iter().map(|(m, b, c)| (play(m, b), sr.from_count(c)));
        let mut out = Vector::zero(sr, arena());
        for t in terms {
            out = out.add(&Vector::from_terms(sr, arena(), [t]).unwrap()).unwrap();
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_symmetric(u in vector(SemiringDescriptor::nat()), v in vector(SemiringDescriptor::nat())) {
        prop_assert_eq!(outcome(&psync(&u, &v).unwrap()), outcome(&psync(&v, &u).unwrap()));
    }

    #[test]
    fn pairing_is_bilinear(u in vector(SemiringDescriptor::nat()), v in vector(SemiringDescriptor::nat()), w in vector(SemiringDescriptor::nat())) {
        let left = outcome(&psync(&u.add(&v).unwrap(), &w).unwrap());
        let right = outcome(&psync(&u, &w).unwrap()).add(&outcome(&psync(&v, &w).unwrap())).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn basis_route_matches_oracle_over_rat(u in vector(SemiringDescriptor::rat()), v in vector(SemiringDescriptor::rat())) {
        prop_assert_eq!(obs_equiv(&u, &v).unwrap(), probe_oracle_equiv(&u, &v, 3).unwrap());
    }

    #[test]
    fn basis_route_matches_oracle_over_bool(u in vector(SemiringDescriptor::boolean()), v in vector(SemiringDescriptor::boolean())) {
        prop_assert_eq!(obs_equiv(&u, &v).unwrap(), probe_oracle_equiv(&u, &v, 3).unwrap());
    }

    #[test]
    fn equivalence_is_compatible_with_sums(u in vector(SemiringDescriptor::rat()), w in vector(SemiringDescriptor::rat())) {
        let extended = u.add(&w).unwrap();
        prop_assert!(obs_equiv(&extended, &w.add(&u).unwrap()).unwrap());
        prop_assert!(obs_equiv(&u, &u.scale(&SemiringDescriptor::rat().one()).unwrap()).unwrap());
    }
}
