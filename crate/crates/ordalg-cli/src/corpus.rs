//! Seeded random corpora: plays, vectors and simple terms.

use ordalg::algebra::Vector;
use ordalg::arenas::ArenaKind;
use ordalg::event::{Chan, Event, Pol};
use ordalg::picalc::{linear_action, new, par, Action, Term};
use ordalg::plays::Play;
use ordalg::semiring::SemiringDescriptor;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Seeded = ChaCha8Rng;

pub fn rng(seed: u64) -> Seeded {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `ORDALG_SEED` when set and numeric, else `default`.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var("ORDALG_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(default)
}

pub fn atoms(n: usize) -> Vec<Event> {
    (0..n).map(|i| Event::atom(&format!("e{i}"))).collect()
}

/// A preorder on `support`: each ordered pair present with probability `p`.
pub fn random_play(rng: &mut Seeded, support: &[Event], p: f64) -> Play {
    let n = support.len();
    let mut covers = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                covers.push((support[i].clone(), support[j].clone()));
            }
        }
    }
    Play::new(support.iter().cloned(), &covers).expect("covers lie in the support")
}

/// A partial order on `support`, from a random ordering and random covers.
pub fn random_poset(rng: &mut Seeded, support: &[Event], p: f64) -> Play {
    let mut order: Vec<&Event> = support.iter().collect();
    order.shuffle(rng);
    let mut covers = Vec::new();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if rng.gen_bool(p) {
                covers.push((order[i].clone(), order[j].clone()));
            }
        }
    }
    Play::new(support.iter().cloned(), &covers).expect("covers lie in the support")
}

/// A combination of up to `terms` plays on subsets of `support`, with
/// coefficients in `1..=3`.
pub fn random_vector(rng: &mut Seeded, semiring: SemiringDescriptor, support: &[Event], terms: usize) -> Vector {
    let arena = ArenaKind::Static(support.iter().cloned().collect());
    let mut out = Vector::zero(semiring, arena.clone());
    for _ in 0..rng.gen_range(1..=terms) {
        let sub: Vec<Event> = support.iter().filter(|_| rng.gen_bool(0.8)).cloned().collect();
        let r = random_play(rng, &sub, 0.3);
        let c = semiring.from_count(rng.gen_range(1..=3));
        let one = Vector::from_terms(semiring, arena.clone(), [(r, c)]).expect("play over the arena");
        out = out.add(&one).expect("same space");
    }
    out
}

/// Random simple terms over a fixed set of free names.
pub struct TermGen<'a> {
    pub semiring: SemiringDescriptor,
    pub names: &'a [&'a str],
    hidden: usize,
}

impl<'a> TermGen<'a> {
    pub fn new(semiring: SemiringDescriptor, names: &'a [&'a str]) -> TermGen<'a> {
        TermGen { semiring, names, hidden: 0 }
    }

    /// A simple term with at most `actions` source-level prefixes; each
    /// linear action and each inaction counts once.
    pub fn simple(&mut self, rng: &mut Seeded, actions: usize) -> Term {
        let mut budget = actions;
        let mut scope: Vec<String> = self.names.iter().map(|s| s.to_string()).collect();
        self.gen(rng, &mut budget, 0, &mut scope)
    }

    fn gen(&mut self, rng: &mut Seeded, budget: &mut usize, depth: usize, scope: &mut Vec<String>) -> Term {
        let one = || Term::Scalar(self.semiring.one());
        if *budget == 0 {
            return one();
        }
        let pick = rng.gen_range(0..100);
        let pol = if rng.gen_bool(0.5) { Pol::Pos } else { Pol::Neg };
        let subj = Chan::root(scope.choose(rng).expect("non-empty scope"));
        match pick {
            0..=44 => {
                *budget -= 1;
                let var = format!("x{depth}");
                scope.push(var.clone());
                let body = if rng.gen_bool(0.6) { self.gen(rng, budget, depth + 1, scope) } else { one() };
                scope.pop();
                linear_action(self.semiring, &subj, pol, &var, &body)
            }
            45..=64 => {
                let k = rng.gen_range(1..=2.min(*budget));
                *budget -= k;
                let mut branches = vec![Action { loc: 1, subj, pol, cont: Box::new(Term::Scalar(self.semiring.zero())) }];
                if k == 2 {
                    let pol = if rng.gen_bool(0.5) { Pol::Pos } else { Pol::Neg };
                    let subj = Chan::root(scope.choose(rng).expect("non-empty scope"));
                    branches.push(Action { loc: 2, subj, pol, cont: Box::new(Term::Scalar(self.semiring.zero())) });
                }
                Term::Choice(branches)
            }
            65..=89 => {
                let left = self.gen(rng, budget, depth, scope);
                let right = self.gen(rng, budget, depth, scope);
                par(&left, &right)
            }
            _ => {
                self.hidden += 1;
                let h = format!("h{}", self.hidden);
                scope.push(h.clone());
                let body = self.gen(rng, budget, depth, scope);
                scope.pop();
                new(&h, body)
            }
        }
    }
}
