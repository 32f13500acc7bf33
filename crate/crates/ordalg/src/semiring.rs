//! Commutative semirings of outcomes.
//!
//! A [`Scalar`] carries its semiring tag, so mixing values from two
//! semirings is caught at the operation rather than silently coerced.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{unsupported, usage, Error, Result};

/// Which addition table a may/must scalar uses. Multiplication is shared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    May,
    Must,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemiringName {
    Nat,
    Int,
    Rat,
    Bool,
    MayMust(Mode),
}

/// The three-valued carrier `{0, 1, w}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tri {
    Zero,
    One,
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SemiringDescriptor {
    pub name: SemiringName,
    pub is_idempotent: bool,
    pub is_ring: bool,
    pub is_regular: bool,
    pub is_rational: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Nat(BigInt),
    Int(BigInt),
    Rat(BigRational),
    Bool(bool),
    MayMust(Mode, Tri),
}

impl SemiringDescriptor {
    pub fn new(name: SemiringName) -> Result<Self> {
        let (is_idempotent, is_ring, is_regular, is_rational) = match name {
            SemiringName::Nat => (false, false, true, false),
            SemiringName::Int => (false, true, true, false),
            SemiringName::Rat => (false, true, true, true),
            SemiringName::Bool | SemiringName::MayMust(_) => (true, false, true, true),
        };
        let d = SemiringDescriptor { name, is_idempotent, is_ring, is_regular, is_rational };
        if d.zero() == d.one() {
            return usage("degenerate semiring with 0 = 1");
        }
        Ok(d)
    }

    pub fn nat() -> Self {
        Self::new(SemiringName::Nat).unwrap()
    }
    pub fn int() -> Self {
        Self::new(SemiringName::Int).unwrap()
    }
    pub fn rat() -> Self {
        Self::new(SemiringName::Rat).unwrap()
    }
    pub fn boolean() -> Self {
        Self::new(SemiringName::Bool).unwrap()
    }
    pub fn may() -> Self {
        Self::new(SemiringName::MayMust(Mode::May)).unwrap()
    }
    pub fn must() -> Self {
        Self::new(SemiringName::MayMust(Mode::Must)).unwrap()
    }

    /// Flag names accepted on the command line.
    pub fn from_flag(flag: &str) -> Result<Self> {
        match flag {
            "nat" => Ok(Self::nat()),
            "int" => Ok(Self::int()),
            "rat" => Ok(Self::rat()),
            "bool" => Ok(Self::boolean()),
            "maymust-may" => Ok(Self::may()),
            "maymust-must" => Ok(Self::must()),
            _ => usage(format!("unknown semiring `{flag}`")),
        }
    }

    pub fn zero(&self) -> Scalar {
        match self.name {
            SemiringName::Nat => Scalar::Nat(BigInt::zero()),
            SemiringName::Int => Scalar::Int(BigInt::zero()),
            SemiringName::Rat => Scalar::Rat(BigRational::zero()),
            SemiringName::Bool => Scalar::Bool(false),
            SemiringName::MayMust(m) => Scalar::MayMust(m, Tri::Zero),
        }
    }

    pub fn one(&self) -> Scalar {
        match self.name {
            SemiringName::Nat => Scalar::Nat(BigInt::one()),
            SemiringName::Int => Scalar::Int(BigInt::one()),
            SemiringName::Rat => Scalar::Rat(BigRational::one()),
            SemiringName::Bool => Scalar::Bool(true),
            SemiringName::MayMust(m) => Scalar::MayMust(m, Tri::One),
        }
    }

    /// The image of `n` under the unique map from the naturals: `1 + ... + 1`.
    pub fn from_count(&self, n: u64) -> Scalar {
        match self.name {
            SemiringName::Nat => Scalar::Nat(BigInt::from(n)),
            SemiringName::Int => Scalar::Int(BigInt::from(n)),
            SemiringName::Rat => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            _ if n == 0 => self.zero(),
            _ => self.one(),
        }
    }

    /// Parse a literal: NAT/INT `-?[0-9]+`, RAT `-?[0-9]+(/[0-9]+)?`,
    /// BOOL `0|1`, MAYMUST `0|1|w`.
    pub fn parse_literal(&self, text: &str) -> Result<Scalar> {
        let bad = || Error::Usage(format!("`{text}` is not a {} literal", self.flag()));
        let int = |s: &str| -> Result<BigInt> {
            let digits = s.strip_prefix('-').unwrap_or(s);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            s.parse::<BigInt>().map_err(|_| bad())
        };
        match self.name {
            SemiringName::Nat => {
                let v = int(text)?;
                if v.is_negative() {
                    return usage(format!("NAT literal `{text}` is negative"));
                }
                Ok(Scalar::Nat(v))
            }
            SemiringName::Int => Ok(Scalar::Int(int(text)?)),
            SemiringName::Rat => {
                let (num, den) = match text.split_once('/') {
                    Some((n, d)) => {
                        if !d.bytes().all(|b| b.is_ascii_digit()) {
                            return Err(bad());
                        }
                        (int(n)?, int(d)?)
                    }
                    None => (int(text)?, BigInt::one()),
                };
                if den.is_zero() {
                    return usage(format!("RAT literal `{text}` has zero denominator"));
                }
                Ok(Scalar::Rat(BigRational::new(num, den)))
            }
            SemiringName::Bool => match text {
                "0" => Ok(Scalar::Bool(false)),
                "1" => Ok(Scalar::Bool(true)),
                _ => Err(bad()),
            },
            SemiringName::MayMust(m) => match text {
                "0" => Ok(Scalar::MayMust(m, Tri::Zero)),
                "1" => Ok(Scalar::MayMust(m, Tri::One)),
                "w" => Ok(Scalar::MayMust(m, Tri::Omega)),
                _ => Err(bad()),
            },
        }
    }

    pub fn flag(&self) -> &'static str {
        match self.name {
            SemiringName::Nat => "nat",
            SemiringName::Int => "int",
            SemiringName::Rat => "rat",
            SemiringName::Bool => "bool",
            SemiringName::MayMust(Mode::May) => "maymust-may",
            SemiringName::MayMust(Mode::Must) => "maymust-must",
        }
    }
}

impl fmt::Display for SemiringDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

fn tri_mul(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Tri::Zero, _) | (_, Tri::Zero) => Tri::Zero,
        (Tri::One, Tri::One) => Tri::One,
        _ => Tri::Omega,
    }
}

fn tri_add(mode: Mode, a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Tri::Zero, x) | (x, Tri::Zero) => x,
        (Tri::One, Tri::One) => Tri::One,
        (Tri::Omega, Tri::Omega) => Tri::Omega,
        // the remaining case mixes 1 and w
        _ => match mode {
            Mode::May => Tri::Omega,
            Mode::Must => Tri::One,
        },
    }
}

impl Scalar {
    pub fn name(&self) -> SemiringName {
        match self {
            Scalar::Nat(_) => SemiringName::Nat,
            Scalar::Int(_) => SemiringName::Int,
            Scalar::Rat(_) => SemiringName::Rat,
            Scalar::Bool(_) => SemiringName::Bool,
            Scalar::MayMust(m, _) => SemiringName::MayMust(*m),
        }
    }

    pub fn descriptor(&self) -> SemiringDescriptor {
        SemiringDescriptor::new(self.name()).expect("shipped semirings are non-degenerate")
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Nat(v) | Scalar::Int(v) => v.is_zero(),
            Scalar::Rat(v) => v.is_zero(),
            Scalar::Bool(b) => !b,
            Scalar::MayMust(_, t) => *t == Tri::Zero,
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        Ok(match (self, other) {
            (Scalar::Nat(a), Scalar::Nat(b)) => Scalar::Nat(a + b),
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a + b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Bool(a), Scalar::Bool(b)) => Scalar::Bool(*a || *b),
            (Scalar::MayMust(m, a), Scalar::MayMust(n, b)) if m == n => {
                Scalar::MayMust(*m, tri_add(*m, *a, *b))
            }
            _ => return mixed(self, other),
        })
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        Ok(match (self, other) {
            (Scalar::Nat(a), Scalar::Nat(b)) => Scalar::Nat(a * b),
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a * b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Bool(a), Scalar::Bool(b)) => Scalar::Bool(*a && *b),
            (Scalar::MayMust(m, a), Scalar::MayMust(n, b)) if m == n => {
                Scalar::MayMust(*m, tri_mul(*a, *b))
            }
            _ => return mixed(self, other),
        })
    }

    /// Addition for operands already known to share a semiring.
    pub(crate) fn plus(&self, other: &Scalar) -> Scalar {
        self.add(other).expect("operands share a semiring")
    }

    pub(crate) fn times(&self, other: &Scalar) -> Scalar {
        self.mul(other).expect("operands share a semiring")
    }

    /// Ring negation; only INT and RAT have one.
    pub fn neg(&self) -> Result<Scalar> {
        match self {
            Scalar::Int(a) => Ok(Scalar::Int(-a)),
            Scalar::Rat(a) => Ok(Scalar::Rat(-a)),
            _ => unsupported(format!("{} has no additive inverses", self.descriptor())),
        }
    }

    pub fn embed_to_rat(&self) -> Result<Scalar> {
        match self {
            Scalar::Nat(v) | Scalar::Int(v) => Ok(Scalar::Rat(BigRational::from_integer(v.clone()))),
            _ => unsupported(format!("{} has no ring embedding into RAT", self.descriptor())),
        }
    }

    pub fn as_rat(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            _ => None,
        }
    }
}

fn mixed<T>(a: &Scalar, b: &Scalar) -> Result<T> {
    usage(format!("mixed semirings: {} and {}", a.descriptor(), b.descriptor()))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Nat(v) | Scalar::Int(v) => write!(f, "{v}"),
            Scalar::Rat(v) if v.denom().is_one() => write!(f, "{}", v.numer()),
            Scalar::Rat(v) => write!(f, "{}/{}", v.numer(), v.denom()),
            Scalar::Bool(b) => f.write_str(if *b { "1" } else { "0" }),
            Scalar::MayMust(_, Tri::Zero) => f.write_str("0"),
            Scalar::MayMust(_, Tri::One) => f.write_str("1"),
            Scalar::MayMust(_, Tri::Omega) => f.write_str("w"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lit(d: SemiringDescriptor, s: &str) -> Scalar {
        d.parse_literal(s).unwrap()
    }

    #[test]
    fn maymust_tables() {
        let (may, must) = (SemiringDescriptor::may(), SemiringDescriptor::must());
        assert_eq!(lit(may, "w").add(&lit(may, "1")).unwrap(), lit(may, "w"));
        assert_eq!(lit(must, "w").add(&lit(must, "1")).unwrap(), lit(must, "1"));
        for d in [may, must] {
            assert_eq!(lit(d, "w").mul(&lit(d, "1")).unwrap(), lit(d, "w"));
            assert_eq!(lit(d, "w").mul(&lit(d, "0")).unwrap(), lit(d, "0"));
            assert_eq!(lit(d, "w").mul(&lit(d, "w")).unwrap(), lit(d, "w"));
            assert_eq!(lit(d, "1").add(&lit(d, "1")).unwrap(), lit(d, "1"));
            assert_eq!(lit(d, "w").add(&lit(d, "w")).unwrap(), lit(d, "w"));
        }
    }

    #[test]
    fn fractions_reduce() {
        let q = SemiringDescriptor::rat();
        assert_eq!(lit(q, "2/3").mul(&lit(q, "3/4")).unwrap(), lit(q, "1/2"));
        assert_eq!(lit(q, "4/2").to_string(), "2");
        assert_eq!(lit(q, "-6/4").to_string(), "-3/2");
        assert!(q.parse_literal("1/0").is_err());
    }

    #[test]
    fn mixed_operands_rejected() {
        let a = SemiringDescriptor::nat().one();
        let b = SemiringDescriptor::int().one();
        assert!(matches!(a.add(&b), Err(Error::Usage(_))));
        let may = SemiringDescriptor::may().one();
        let must = SemiringDescriptor::must().one();
        assert!(matches!(may.mul(&must), Err(Error::Usage(_))));
    }

    #[test]
    fn embedding() {
        let n = SemiringDescriptor::nat();
        let i = SemiringDescriptor::int();
        let q = SemiringDescriptor::rat();
        assert_eq!(lit(n, "3").embed_to_rat().unwrap(), lit(q, "3/1"));
        assert_eq!(lit(i, "-2").embed_to_rat().unwrap(), lit(q, "-2"));
        assert_eq!(lit(n, "0").embed_to_rat().unwrap(), q.zero());
        assert!(matches!(SemiringDescriptor::boolean().one().embed_to_rat(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn literal_grammar() {
        assert!(SemiringDescriptor::nat().parse_literal("-1").is_err());
        assert!(SemiringDescriptor::int().parse_literal("-1").is_ok());
        assert!(SemiringDescriptor::boolean().parse_literal("2").is_err());
        assert!(SemiringDescriptor::may().parse_literal("w").is_ok());
        assert!(SemiringDescriptor::int().parse_literal("1/2").is_err());
        assert!(SemiringDescriptor::int().parse_literal("+1").is_err());
    }

    #[test]
    fn flags() {
        for d in [
            SemiringDescriptor::nat(),
            SemiringDescriptor::int(),
            SemiringDescriptor::rat(),
            SemiringDescriptor::boolean(),
            SemiringDescriptor::may(),
            SemiringDescriptor::must(),
        ] {
            assert!(!d.is_rational || d.is_regular);
            assert_eq!(SemiringDescriptor::from_flag(d.flag()).unwrap(), d);
        }
        assert!(SemiringDescriptor::rat().is_ring && SemiringDescriptor::rat().is_rational);
        assert!(!SemiringDescriptor::nat().is_rational && !SemiringDescriptor::nat().is_ring);
        assert!(SemiringDescriptor::int().is_ring && !SemiringDescriptor::int().is_rational);
        assert!(SemiringDescriptor::must().is_idempotent && SemiringDescriptor::must().is_rational);
    }

    fn scalar_in(d: SemiringDescriptor) -> BoxedStrategy<Scalar> {
        match d.name {
            SemiringName::Nat => (0i64..20).prop_map(|v| Scalar::Nat(v.into())).boxed(),
            SemiringName::Int => (-20i64..20).prop_map(|v| Scalar::Int(v.into())).boxed(),
            SemiringName::Rat => (-9i64..9, 1i64..9)
                .prop_map(|(a, b)| Scalar::Rat(BigRational::new(a.into(), b.into())))
                .boxed(),
            SemiringName::Bool => any::<bool>().prop_map(Scalar::Bool).boxed(),
            SemiringName::MayMust(m) => prop_oneof![Just(Tri::Zero), Just(Tri::One), Just(Tri::Omega)]
                .prop_map(move |t| Scalar::MayMust(m, t))
                .boxed(),
        }
    }

    fn triples() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
        prop_oneof![
            Just(SemiringDescriptor::nat()),
            Just(SemiringDescriptor::int()),
            Just(SemiringDescriptor::rat()),
            Just(SemiringDescriptor::boolean()),
            Just(SemiringDescriptor::may()),
            Just(SemiringDescriptor::must()),
        ]
        .prop_flat_map(|d| (scalar_in(d), scalar_in(d), scalar_in(d)))
    }

    proptest! {
        #[test]
        fn semiring_axioms((x, y, z) in triples()) {
            let d = x.descriptor();
            prop_assert_eq!(x.plus(&y), y.plus(&x));
            prop_assert_eq!(x.times(&y), y.times(&x));
            prop_assert_eq!(x.plus(&y).plus(&z), x.plus(&y.plus(&z)));
            prop_assert_eq!(x.times(&y).times(&z), x.times(&y.times(&z)));
            prop_assert_eq!(x.times(&y.plus(&z)), x.times(&y).plus(&x.times(&z)));
            prop_assert_eq!(x.plus(&d.zero()), x.clone());
            prop_assert_eq!(x.times(&d.one()), x.clone());
            prop_assert!(x.times(&d.zero()).is_zero());
            if d.is_idempotent {
                prop_assert_eq!(x.plus(&x), x.clone());
            }
        }

        #[test]
        fn embedding_is_a_morphism(a in -50i64..50, b in -50i64..50) {
            let (x, y) = (Scalar::Int(a.into()), Scalar::Int(b.into()));
            let e = |s: &Scalar| s.embed_to_rat().unwrap();
            prop_assert_eq!(e(&x.plus(&y)), e(&x).plus(&e(&y)));
            prop_assert_eq!(e(&x.times(&y)), e(&x).times(&e(&y)));
            prop_assert_eq!(a == b, e(&x) == e(&y));
        }
    }
}
