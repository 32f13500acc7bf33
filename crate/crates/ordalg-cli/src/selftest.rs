//! The acceptance suite: one check per criterion, each with a pinned
//! time limit.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use ordalg::algebra::{all_preorders, obs_equiv, outcome, partial_neutral, probe_oracle_equiv, psync, Vector};
use ordalg::arenas::{multiplicity, saturate, ArenaKind};
use ordalg::basis::{dual_family, gram_matrix, int_scalar, pair_with_duals, weak_orders, weak_totals_and_totals};
use ordalg::event::{Chan, Event, Pol};
use ordalg::exponential::{copies, delta, gamma, CopyBijection};
use ordalg::picalc::{
    cross_check, linear_action, new, oplus, outcome_term, par, parse_term, scalar_mult, term_equiv, translate, Term,
};
use ordalg::plays::Play;
use ordalg::semiring::{Scalar, SemiringDescriptor};
use ordalg::Result;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::{atoms, random_play, random_poset, random_vector, rng, Seeded, TermGen};

/// Criterion number, short name and wall-clock limit.
pub const CRITERIA: [(u8, &str, Duration); 10] = [
    (1, "worked examples", Duration::from_secs(1)),
    (2, "split identity over all preorders", Duration::from_secs(5)),
    (3, "basis route against probe oracle", Duration::from_secs(60)),
    (4, "idempotent collapse to linear extensions", Duration::from_secs(30)),
    (5, "basis counts and dual families", Duration::from_secs(5)),
    (6, "law suites over nat and must", Duration::from_secs(120)),
    (7, "operational against denotational outcomes", Duration::from_secs(300)),
    (8, "merge and split of copies", Duration::from_secs(60)),
    (9, "interleaving degeneracy", Duration::from_secs(10)),
    (10, "unit existence boundary", Duration::from_secs(5)),
];

#[derive(Debug, Clone)]
pub struct Report {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {}: {} ({}; {:.2}s of {}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )
    }
}

/// Outcome of a check body: pass flag and a one-line summary.
type Verdict = Result<(bool, String)>;

pub fn run_criterion(id: u8, seed: u64) -> Report {
    let (_, name, limit) = CRITERIA[usize::from(id) - 1];
    let start = Instant::now();
    let verdict = match id {
        1 => worked_examples(),
        2 => split_identity(),
        3 => basis_against_oracle(seed),
        4 => idempotent_collapse(),
        5 => counts_and_duals(),
        6 => law_suites(),
        7 => full_abstraction(seed),
        8 => merge_and_split(seed),
        9 => interleaving(),
        10 => units(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let (ok, detail) = verdict.unwrap_or_else(|e| (false, format!("error: {e}")));
    let passed = ok && elapsed <= limit;
    let detail = if ok && !passed { format!("{detail}; over time") } else { detail };
    Report { id, name, passed, detail, elapsed, limit }
}

pub fn run_all(seed: u64) -> Vec<Report> {
    CRITERIA.iter().map(|(id, _, _)| run_criterion(*id, seed)).collect()
}

fn nat() -> SemiringDescriptor {
    SemiringDescriptor::nat()
}

fn single(sr: SemiringDescriptor, arena: &ArenaKind, r: Play) -> Result<Vector> {
    Vector::from_play(sr, arena.clone(), r)
}

fn sum_of(sr: SemiringDescriptor, arena: &ArenaKind, plays: &[Play]) -> Result<Vector> {
    let mut out = Vector::zero(sr, arena.clone());
    for r in plays {
        out = out.add(&single(sr, arena, r.clone())?)?;
    }
    Ok(out)
}

fn failures(bad: &[String]) -> String {
    bad.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
}

fn worked_examples() -> Verdict {
    let mut bad = Vec::new();
    let occ = Event::occ;
    let x = ArenaKind::labeled(["a", "b"]);
    let (a1, a2, b) = (occ("a", 1), occ("a", 2), occ("b", 1));
    let sup = [a1.clone(), a2.clone(), b.clone()];
    let r = Play::new(sup.clone(), &[(a1.clone(), b.clone()), (a1.clone(), a2.clone())])?;
    let s1 = Play::new(sup.clone(), &[(b.clone(), a2.clone())])?;
    let s2 = Play::new(sup.clone(), &[(b.clone(), a1.clone())])?;
    let chain = Play::chain(&[a1.clone(), b.clone(), a2.clone()])?;
    let cyclic = Play::new(sup.clone(), &[(a1.clone(), b.clone()), (b.clone(), a1.clone()), (b.clone(), a2.clone())])?;
    if r.sync(&s1) != Some(chain.clone()) {
        bad.push("first synchronisation is not the chain".to_string());
    }
    match r.sync(&s2) {
        Some(p) if p == cyclic && !p.is_consistent() => {}
        _ => bad.push("second synchronisation is not the cyclic play".to_string()),
    }
    let w = psync(&single(nat(), &x, r.clone())?, &single(nat(), &x, s2.clone())?)?;
    let expect: BTreeMap<Play, Scalar> = [(chain, nat().one()), (cyclic, nat().one())].into_iter().collect();
    if *w.terms() != expect {
        bad.push(format!("permuted synchronisation gave {w}"));
    }
    if multiplicity(&x, &r)? != 1 || multiplicity(&x, &s2)? != 1 {
        bad.push("synchronised plays should have multiplicity 1".to_string());
    }

    let y = ArenaKind::labeled(["a", "b", "c"]);
    let five = [occ("a", 1), occ("b", 1), occ("b", 2), occ("c", 1), occ("c", 2)];
    let e = |i: usize, j: usize| (five[i].clone(), five[j].clone());
    let apart = Play::new(five.clone(), &[e(0, 1), e(0, 2), e(1, 3), e(2, 4)])?;
    let joined = Play::new(five.clone(), &[e(0, 1), e(0, 2), e(1, 3), e(2, 4), e(3, 4)])?;
    let (m1, m2) = (multiplicity(&y, &apart)?, multiplicity(&y, &joined)?);
    if (m1, m2) != (2, 1) {
        bad.push(format!("multiplicities {m1} and {m2}"));
    }

    let cs = [occ("a", 1), occ("b", 1), occ("c", 1), occ("c", 2), occ("c", 3)];
    let ce = |i: usize, j: usize| (cs[i].clone(), cs[j].clone());
    let tree = |k: usize| {
        let others: Vec<usize> = (2..5).filter(|&i| i != k).collect();
        Play::new(cs.clone(), &[ce(0, 1), ce(1, k), ce(0, others[0]), ce(0, others[1])])
    };
    let sat: BTreeMap<Play, u64> = saturate(&y, &tree(2)?)?.into_iter().collect();
    let expect: BTreeMap<Play, u64> = [(tree(2)?, 2), (tree(3)?, 2), (tree(4)?, 2)].into_iter().collect();
    if sat != expect {
        bad.push(format!("saturation gave {} terms", sat.len()));
    }

    let ab = [Event::atom("a"), Event::atom("b")];
    let orders = [
        Play::neutral(ab.clone()),
        Play::chain(&ab)?,
        Play::chain(&[ab[1].clone(), ab[0].clone()])?,
    ];
    let g = gram_matrix(SemiringDescriptor::rat(), &orders);
    let want: Vec<Vec<Scalar>> = [[1, 1, 1], [1, 1, 0], [1, 0, 1]].iter().map(|r| r.iter().map(|&v| int_scalar(v)).collect()).collect();
    if g != want {
        bad.push("gram matrix differs".to_string());
    }
    Ok((bad.is_empty(), if bad.is_empty() { "sync, psync, multiplicities, saturation, gram all exact".into() } else { failures(&bad) }))
}

/// `[x<y] + [x<z<y]` against `[x<y, x<z] + [x<y, z<y]`, with extra
/// points left incomparable.
fn split_sides(events: &[Event]) -> Result<(Vec<Play>, Vec<Play>)> {
    let (x, y, z) = (&events[0], &events[1], &events[2]);
    let p = |pairs: &[(&Event, &Event)]| {
        let cs: Vec<(Event, Event)> = pairs.iter().map(|(a, b)| ((*a).clone(), (*b).clone())).collect();
        Play::new(events.iter().cloned(), &cs)
    };
    let a = p(&[(x, y)])?;
    let b = p(&[(x, z), (z, y)])?;
    let c = p(&[(x, y), (x, z)])?;
    let d = p(&[(x, y), (z, y)])?;
    Ok((vec![a, b], vec![c, d]))
}

fn split_identity() -> Verdict {
    let mut counts = Vec::new();
    let mut bad = Vec::new();
    for n in [3, 4] {
        let es = atoms(n);
        let arena = ArenaKind::Static(es.iter().cloned().collect());
        let (lhs, rhs) = split_sides(&es)?;
        let (l, r) = (sum_of(nat(), &arena, &lhs)?, sum_of(nat(), &arena, &rhs)?);
        let probes = all_preorders(&es);
        counts.push(probes.len());
        for s in &probes {
            let t = single(nat(), &arena, s.clone())?;
            let (x, y) = (outcome(&psync(&l, &t)?), outcome(&psync(&r, &t)?));
            if x != y {
                bad.push(format!("{s}: {x} vs {y}"));
            }
        }
    }
    let ok = bad.is_empty() && counts == [29, 355];
    let detail = format!("{} preorders on 3 points, {} on 4 points, {} mismatches", counts[0], counts[1], bad.len());
    Ok((ok, if bad.is_empty() { detail } else { format!("{detail}: {}", failures(&bad)) }))
}

fn basis_against_oracle(seed: u64) -> Verdict {
    let semirings = [SemiringDescriptor::rat(), SemiringDescriptor::boolean()];
    let mut pairs = Vec::new();
    let es = atoms(3);
    let arena = ArenaKind::Static(es.iter().cloned().collect());
    let posets: Vec<Play> = all_preorders(&es).into_iter().filter(Play::is_consistent).collect();
    for sr in semirings {
        for r in &posets {
            for s in &posets {
                pairs.push((single(sr, &arena, r.clone())?, single(sr, &arena, s.clone())?));
            }
        }
    }
    let exhaustive = pairs.len();
    let mut g = rng(seed);
    let es = atoms(4);
    let arena = ArenaKind::Static(es.iter().cloned().collect());
    for k in 0..500 {
        let sr = semirings[k % 2];
        let u = random_vector(&mut g, sr, &es, 3);
        pairs.push(if k % 4 < 2 { (u, random_vector(&mut g, sr, &es, 3)) } else { equivalent_pair(&mut g, sr, &arena, &es, &u)? });
    }
    let mut equal = 0usize;
    let mut bad = Vec::new();
    for (u, v) in &pairs {
        let (b, o) = (obs_equiv(u, v)?, probe_oracle_equiv(u, v, 4)?);
        equal += usize::from(o);
        if b != o {
            bad.push(format!("{u} vs {v}: basis {b}, oracle {o}"));
        }
    }
    let detail = format!("{exhaustive} exhaustive and {} random pairs, {equal} equivalent, {} disagreements", pairs.len() - exhaustive, bad.len());
    Ok((bad.is_empty(), if bad.is_empty() { detail } else { format!("{detail}: {}", failures(&bad)) }))
}

/// `u` extended on both sides by an identity valid in the semiring: the
/// split identity in general, linear extensions when addition is idempotent.
fn equivalent_pair(g: &mut Seeded, sr: SemiringDescriptor, arena: &ArenaKind, es: &[Event], u: &Vector) -> Result<(Vector, Vector)> {
    if sr.is_idempotent {
        let r = random_poset(g, es, 0.3);
        let exts = sum_of(sr, arena, &r.linear_extensions())?;
        return Ok((u.add(&single(sr, arena, r)?)?, u.add(&exts)?));
    }
    let mut shuffled = es.to_vec();
    shuffled.shuffle(g);
    let (lhs, rhs) = split_sides(&shuffled)?;
    Ok((u.add(&sum_of(sr, arena, &lhs)?)?, u.add(&sum_of(sr, arena, &rhs)?)?))
}

fn idempotent_collapse() -> Verdict {
    let sr = SemiringDescriptor::boolean();
    let mut counts = Vec::new();
    let mut bad = Vec::new();
    for n in 1..=4 {
        let es = atoms(n);
        let arena = ArenaKind::Static(es.iter().cloned().collect());
        let posets: Vec<Play> = all_preorders(&es).into_iter().filter(Play::is_consistent).collect();
        counts.push(posets.len());
        for r in posets {
            let exts = sum_of(sr, &arena, &r.linear_extensions())?;
            if !obs_equiv(&single(sr, &arena, r.clone())?, &exts)? {
                bad.push(r.to_string());
            }
        }
    }
    let detail = format!("posets per size {counts:?}, {} failures", bad.len());
    Ok((bad.is_empty() && counts == [1, 3, 19, 219], if bad.is_empty() { detail } else { format!("{detail}: {}", failures(&bad)) }))
}

fn counts_and_duals() -> Verdict {
    let es = atoms(3);
    let (weak, totals) = weak_totals_and_totals(&es);
    let mut bad = Vec::new();
    if (weak.len(), totals.len()) != (13, 6) {
        bad.push(format!("{} weak totals and {} totals", weak.len(), totals.len()));
    }
    let mut slices = 0;
    for mask in 1u32..8 {
        let slice: Vec<Event> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| es[i].clone()).collect();
        let base = weak_orders(&slice);
        let duals = dual_family(&base)?;
        let arena = duals[0].arena().clone();
        for (i, b) in base.iter().enumerate() {
            let got = pair_with_duals(&single(SemiringDescriptor::rat(), &arena, b.clone())?, &duals)?;
            for (j, c) in got.iter().enumerate() {
                if *c != int_scalar(i64::from(i == j)) {
                    bad.push(format!("slice {mask}: <b{i} >< b*{j}> = {c}"));
                }
            }
        }
        slices += 1;
    }
    let g = gram_matrix(SemiringDescriptor::rat(), &totals);
    for (i, row) in g.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if *c != int_scalar(i64::from(i == j)) {
                bad.push(format!("totals gram ({i},{j}) = {c}"));
            }
        }
    }
    let detail = format!("13 weak totals, 6 totals, duals exact on {slices} slices");
    Ok((bad.is_empty(), if bad.is_empty() { detail } else { failures(&bad) }))
}

/// A law instance as two terms over one semiring.
struct Law {
    name: &'static str,
    lhs: Term,
    rhs: Term,
}

fn t(sr: SemiringDescriptor, s: &str) -> Result<Term> {
    parse_term(s, sr)
}

/// Components for three instantiations: processes, branchings, and two
/// scalars of the semiring.
struct Parts {
    p: &'static str,
    q: &'static str,
    r: &'static str,
    /// Branchings for the choice laws.
    s: &'static str,
    u: &'static str,
    v: &'static str,
    /// Bodies using the bound name `x`.
    px: &'static str,
    qx: &'static str,
}

const PARTS: [Parts; 3] = [
    Parts {
        p: "a?(x).{1}",
        q: "b!(y).{1}",
        r: "a!(z).{1}",
        s: "a?(x).{1}",
        u: "b!(y).{1}",
        v: "a!(z).{1}",
        px: "x!(y).{1}",
        qx: "x?(z).{1}",
    },
    Parts {
        p: "a?(x).x!(y).{1}",
        q: "a!(z).z?(w).{1} + b?(w).{1}",
        r: "b!(v).{1} | a!(u).{1}",
        s: "a?(x).x!(y).{1}",
        u: "a!(z).{1}",
        v: "b?(w).{1}",
        px: "x?(y).{1} | b!(w).{1}",
        qx: "x!(z).{1}",
    },
    Parts {
        p: "a!(x).{1} | b?(y).{1}",
        q: "a?(z).z?(w).{1}",
        r: "{1}",
        s: "b?(x).{1}",
        u: "b?(y).y!(z).{1}",
        v: "a?(w).{1}",
        px: "x!(y).y?(z).{1}",
        qx: "x?(w).w!(v).{1}",
    },
];

fn laws(sr: SemiringDescriptor, k: usize) -> Result<Vec<Law>> {
    let c = &PARTS[k];
    let (l1, l2) = if sr.is_idempotent { ("w", "1") } else { (["2", "3", "1"][k], ["3", "1", "4"][k]) };
    let sc = |s: &str| sr.parse_literal(s);
    let (p, q, r) = (t(sr, c.p)?, t(sr, c.q)?, t(sr, c.r)?);
    let lam1 = sc(l1)?;
    let lam2 = sc(l2)?;
    let zero = Term::Scalar(sr.zero());
    let lin = |subj: &str, pol: Pol, body: &Term| linear_action(sr, &Chan::root(subj), pol, "x", body);
    let law = |name, lhs, rhs| Law { name, lhs, rhs };
    let mut out = vec![
        law("par commutativity", t(sr, &format!("({}) | ({})", c.p, c.q))?, t(sr, &format!("({}) | ({})", c.q, c.p))?),
        law("choice commutativity", t(sr, &format!("{} + {}", c.s, c.u))?, t(sr, &format!("{} + {}", c.u, c.s))?),
        law(
            "par associativity",
            t(sr, &format!("(({}) | ({})) | ({})", c.p, c.q, c.r))?,
            t(sr, &format!("({}) | (({}) | ({}))", c.p, c.q, c.r))?,
        ),
        law(
            "choice associativity",
            t(sr, &format!("({} + {}) + {}", c.s, c.u, c.v))?,
            t(sr, &format!("{} + ({} + {})", c.s, c.u, c.v))?,
        ),
        law("par neutrality", t(sr, &format!("({}) | {{1}}", c.p))?, p.clone()),
        law("scope commutation", new("a", new("b", par(&p, &q))), new("b", new("a", par(&p, &q)))),
        law(
            "scope extrusion",
            t(sr, &format!("new c in (({}) | ({}))", c.p, c.qx.replace('x', "c")))?,
            t(sr, &format!("({}) | new c in ({})", c.p, c.qx.replace('x', "c")))?,
        ),
        law("scope neutrality", t(sr, &format!("new c in {{{l1}}}"))?, t(sr, &format!("{{{l1}}}"))?),
        law("inaction", t(sr, &format!("new a in a?(x).({})", c.px))?, t(sr, "{1}")?),
        law(
            "non-interference",
            t(sr, &format!("new u in (u?(x).({}) | u!(x).({}))", c.px, c.qx))?,
            t(sr, &format!("new u in new x in (({}) | ({}))", c.px, c.qx))?,
        ),
        law("sum commutativity", oplus(sr, &p, &q), oplus(sr, &q, &p)),
        law("sum associativity", oplus(sr, &oplus(sr, &p, &q), &r), oplus(sr, &p, &oplus(sr, &q, &r))),
        law("sum neutrality", oplus(sr, &p, &zero), p.clone()),
        law("zero scaling", scalar_mult(sr.zero(), &p), zero.clone()),
        law("unit scaling", scalar_mult(sr.one(), &p), p.clone()),
        law("scaling composition", scalar_mult(lam1.mul(&lam2)?, &p), scalar_mult(lam1.clone(), &scalar_mult(lam2.clone(), &p))),
        law(
            "scalar distributivity",
            scalar_mult(lam1.add(&lam2)?, &p),
            oplus(sr, &scalar_mult(lam1.clone(), &p), &scalar_mult(lam2.clone(), &p)),
        ),
        law(
            "vector distributivity",
            scalar_mult(lam1.clone(), &oplus(sr, &p, &q)),
            oplus(sr, &scalar_mult(lam1.clone(), &p), &scalar_mult(lam1.clone(), &q)),
        ),
        law("par distributes over sums", par(&p, &oplus(sr, &q, &r)), oplus(sr, &par(&p, &q), &par(&p, &r))),
        law("par commutes with scaling", par(&p, &scalar_mult(lam1.clone(), &q)), scalar_mult(lam1.clone(), &par(&p, &q))),
        law("hiding distributes over sums", new("a", oplus(sr, &p, &q)), oplus(sr, &new("a", p.clone()), &new("a", q.clone()))),
        law("hiding commutes with scaling", new("a", scalar_mult(lam1.clone(), &p)), scalar_mult(lam1.clone(), &new("a", p.clone()))),
    ];
    let (px, qx) = (t(sr, c.px)?, t(sr, c.qx)?);
    let pols = [Pol::Pos, Pol::Neg, Pol::Pos];
    out.extend([
        law("linear action over sums", lin("a", pols[k], &oplus(sr, &px, &qx)), oplus(sr, &lin("a", pols[k], &px), &lin("a", pols[k], &qx))),
        law(
            "linear action over scaling",
            lin("b", pols[k], &scalar_mult(lam1.clone(), &px)),
            scalar_mult(lam1.clone(), &lin("b", pols[k], &px)),
        ),
        law("hidden linear action", new("a", lin("a", pols[k], &px)), zero.clone()),
        law(
            "asynchrony of inactions",
            lin("a", pols[k], &par(&t(sr, "b!(y).{0}")?, &px)),
            par(&t(sr, "b!(y).{0}")?, &lin("a", pols[k], &px)),
        ),
        law(
            "dual inactions annihilate",
            t(sr, ["a?(x).{0} + b!(y).{0} | a!(z).{0}", "a!(x).{0} | b?(y).{0} + a?(z).{0}", "b?(x).{0} | b!(y).{0} + a!(z).{0}"][k])?,
            zero.clone(),
        ),
        law(
            "inactions merge",
            t(sr, ["a?(x).{0} + b!(y).{0} | a?(z).{0}", "a!(x).{0} | b?(y).{0}", "b?(x).{0} | a?(y).{0} + b?(z).{0}"][k])?,
            t(sr, ["a?(x).{0} + b!(y).{0} + a?(z).{0}", "a!(x).{0} + b?(y).{0}", "b?(x).{0} + a?(y).{0}"][k])?,
        ),
        law("repeated inaction", t(sr, &format!("{} + {}", ["a?(x).{0}", "b!(y).{0}", "a!(z).{0}"][k], ["a?(w).{0}", "b!(v).{0}", "a!(u).{0}"][k]))?, t(sr, ["a?(x).{0}", "b!(y).{0}", "a!(z).{0}"][k])?),
    ]);
    Ok(out)
}

fn law_suites() -> Verdict {
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut names = std::collections::BTreeSet::new();
    for sr in [nat(), SemiringDescriptor::must()] {
        for k in 0..PARTS.len() {
            for l in laws(sr, k)? {
                names.insert(l.name);
                checked += 1;
                if !term_equiv(sr, &l.lhs, &l.rhs)? {
                    bad.push(format!("{} #{k} over {sr}", l.name));
                }
            }
        }
    }
    let detail = format!("{} laws x 3 instantiations x 2 semirings = {checked} checks, {} failures", names.len(), bad.len());
    Ok((bad.is_empty(), if bad.is_empty() { detail } else { format!("{detail}: {}", failures(&bad)) }))
}

/// Pairs equivalent by a law rewrite, for the tester half of criterion 7.
fn rewritten(sr: SemiringDescriptor, p: &Term, k: usize) -> (Term, Term) {
    let two = sr.from_count(2);
    match k % 5 {
        0 => (p.clone(), par(p, &Term::Scalar(sr.one()))),
        1 => match p {
            Term::Par(a, b) => (p.clone(), par(b, a)),
            _ => (p.clone(), new("c", p.clone())),
        },
        2 => (oplus(sr, p, &Term::Scalar(sr.zero())), p.clone()),
        3 => (oplus(sr, p, p), scalar_mult(two, p)),
        _ => (p.clone(), oplus(sr, p, &new("a", linear_action(sr, &Chan::root("a"), Pol::Pos, "x", p)))),
    }
}

fn full_abstraction(seed: u64) -> Verdict {
    let sr = nat();
    let mut g = rng(seed.wrapping_add(7));
    let one: [&str; 1] = ["a"];
    let two: [&str; 2] = ["a", "b"];
    let mut pairs = Vec::new();
    let (mut nonzero, mut drawn) = (0usize, 0usize);
    while pairs.len() < 200 && drawn < 20_000 {
        drawn += 1;
        let names: &[&str] = if drawn % 2 == 0 { &one } else { &two };
        let mut gen = TermGen::new(sr, names);
        let (p, q) = (gen.simple(&mut g, 6), gen.simple(&mut g, 6));
        let (x, y) = cross_check(sr, &p, &q)?;
        if x.is_zero() && pairs.len() - nonzero >= 100 {
            continue;
        }
        nonzero += usize::from(!x.is_zero());
        pairs.push((p, q, x, y));
    }
    let mut bad: Vec<String> = pairs.iter().filter(|(_, _, x, y)| x != y).map(|(p, q, x, y)| format!("{p} against {q}: {x} vs {y}")).collect();

    let mut testers_run = 0;
    let mut gen = TermGen::new(sr, &two);
    for k in 0..20 {
        let p = gen.simple(&mut g, 4);
        let (l, r) = rewritten(sr, &p, k);
        if !term_equiv(sr, &l, &r)? {
            bad.push(format!("rewrite {k} not equivalent: {l} vs {r}"));
            continue;
        }
        for _ in 0..50 {
            let tester = gen.simple(&mut g, 4);
            testers_run += 1;
            let (x, y) = (outcome_term(sr, &par(&l, &tester)), outcome_term(sr, &par(&r, &tester)));
            if x != y {
                bad.push(format!("tester {tester} separates {l} and {r}: {x} vs {y}"));
            }
        }
    }
    let detail = format!("{} pairs ({nonzero} with nonzero outcome), 20 equivalent pairs x {} testers, {} failures", pairs.len(), testers_run / 20, bad.len());
    Ok((bad.is_empty() && pairs.len() == 200, if bad.is_empty() { detail } else { format!("{detail}: {}", failures(&bad)) }))
}

/// A vector over `#{a,b}` whose plays have at most `events` events, drawn
/// from copies `0` and `1`.
fn random_sharp(g: &mut Seeded, events: usize) -> Result<Vector> {
    let arena = ArenaKind::sharp(ArenaKind::static_atoms(["a", "b"]));
    let pool: Vec<Event> = (0..2).flat_map(|k| ["a", "b"].map(|x| Event::at(Event::Copy(k), Event::atom(x)))).collect();
    let mut out = Vector::zero(nat(), arena.clone());
    for _ in 0..g.gen_range(1..=2) {
        let n = g.gen_range(0..=events);
        let sup: Vec<Event> = pool.choose_multiple(g, n).cloned().collect();
        let r = random_play(g, &sup, 0.3);
        out = out.add(&Vector::from_terms(nat(), arena.clone(), [(r, nat().from_count(g.gen_range(1..=2)))])?)?;
    }
    Ok(out)
}

/// Instances keep at most three events in total across the merged sides.
fn merge_and_split(seed: u64) -> Verdict {
    let mut g = rng(seed.wrapping_add(8));
    let phi = CopyBijection::Interleave(2);
    let merge = |x: &Vector, y: &Vector| -> Result<Vector> { gamma(2, &phi, &copies(&[x, y])?) };
    let mut bad = Vec::new();
    for k in 0..100 {
        let (u1, u2, v) = (random_sharp(&mut g, 2)?, random_sharp(&mut g, 1)?, random_sharp(&mut g, 3)?);
        let u = copies(&[&u1, &u2])?;
        let left = psync(&gamma(2, &phi, &u)?, &v)?;
        let right = psync(&u, &delta(2, &v)?)?;
        if outcome(&left) != outcome(&right) || !obs_equiv(&left, &gamma(2, &phi, &right)?)? {
            bad.push(format!("adjunction #{k}"));
        }
        if !obs_equiv(&merge(&u1, &u2)?, &merge(&u2, &u1)?)? {
            bad.push(format!("commutativity #{k}"));
        }
        let (w1, w2, w3) = (random_sharp(&mut g, 1)?, random_sharp(&mut g, 1)?, random_sharp(&mut g, 1)?);
        if !obs_equiv(&merge(&merge(&w1, &w2)?, &w3)?, &merge(&w1, &merge(&w2, &w3)?)?)? {
            bad.push(format!("associativity #{k}"));
        }
    }
    let detail = format!("100 instances each of adjunction, commutativity and associativity; {} failures", bad.len());
    Ok((bad.is_empty(), if bad.is_empty() { detail } else { format!("{detail}: {}", failures(&bad)) }))
}

fn interleaving() -> Verdict {
    let alphabet = ["a", "b"].iter().map(|s| ordalg::event::sym(s)).collect();
    let (conc, seq) = ("a?(x).{1} | b?(y).{1}", "a?(x).b?(y).{1} + b?(y).a?(x).{1}");
    let verdict = |sr: SemiringDescriptor| -> Result<bool> {
        obs_equiv(&translate(sr, &t(sr, conc)?, &alphabet)?, &translate(sr, &t(sr, seq)?, &alphabet)?)
    };
    let (b, n) = (verdict(SemiringDescriptor::boolean())?, verdict(nat())?);
    Ok((b && !n, format!("bool identifies the pair: {b}; nat separates it: {}", !n)))
}

fn units() -> Verdict {
    let rat = SemiringDescriptor::rat();
    let es = [Event::atom("a"), Event::atom("b")];
    let arena = ArenaKind::Static(es.iter().cloned().collect());
    let mut plays = all_preorders(&[]);
    for e in &es {
        plays.extend(all_preorders(std::slice::from_ref(e)));
    }
    plays.extend(all_preorders(&es));
    let family: Vec<Vector> = plays.iter().map(|r| single(rat, &arena, r.clone())).collect::<Result<_>>()?;
    let (e, n) = partial_neutral(&family)?;
    let e = e.expect("non-empty family").scale(&rat.parse_literal(&format!("1/{n}"))?)?;
    let mut bad = Vec::new();
    for s in &family {
        if psync(&e, s)? != *s {
            bad.push(format!("not neutral on {s}"));
        }
    }
    let lab = ArenaKind::labeled(["a"]);
    let mut refuted = 0;
    for k in 1..=3u32 {
        let sized: Vec<Vector> = (0..=k)
            .map(|m| single(rat, &lab, Play::neutral((1..=m).map(|i| Event::occ("a", i)))))
            .collect::<Result<_>>()?;
        let (cand, _) = partial_neutral(&sized)?;
        let cand = cand.expect("non-empty family");
        let probe = single(rat, &lab, Play::neutral((1..=k + 1).map(|i| Event::occ("a", i))))?;
        if psync(&cand, &probe)?.is_zero() && !probe.is_zero() {
            refuted += 1;
        } else {
            bad.push(format!("candidate of size {k} survives its probe"));
        }
    }
    let detail = format!("e/{n} neutral on all {} plays; {refuted} labeled candidates refuted", family.len());
    Ok((bad.is_empty(), if bad.is_empty() { detail } else { failures(&bad) }))
}
