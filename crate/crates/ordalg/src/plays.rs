//! Plays: finite preordered sets of events.
//!
//! A play stores its support sorted in the canonical event order and its
//! relation as a closed bit-matrix: bit `j` of `rows[i]` is set iff
//! `support[i] <= support[j]`. Equality of plays is therefore structural.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

pub use crate::event::{Chan, Event, Loc, PiPoint, Pol, Sym};
use crate::error::{usage, Result};

pub const MAX_SUPPORT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Play {
    support: Vec<Event>,
    rows: Vec<u64>,
}

fn close(rows: &mut [u64]) {
    for k in 0..rows.len() {
        let rk = rows[k];
        for row in rows.iter_mut() {
            if *row >> k & 1 == 1 {
                *row |= rk;
            }
        }
    }
}

impl Play {
    /// Builds the reflexive-transitive closure of `covers` on `support`.
    pub fn new<I>(support: I, covers: &[(Event, Event)]) -> Result<Play>
    where
        I: IntoIterator<Item = Event>,
    {
        let support: Vec<Event> = support.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if support.len() > MAX_SUPPORT {
            return usage(format!("support of {} events exceeds {MAX_SUPPORT}", support.len()));
        }
        let mut pairs = Vec::with_capacity(covers.len());
        for (a, b) in covers {
            match (support.binary_search(a), support.binary_search(b)) {
                (Ok(i), Ok(j)) => pairs.push((i, j)),
                _ => return usage(format!("pair ({a}, {b}) leaves the support")),
            }
        }
        Ok(Play::from_index_pairs(support, &pairs))
    }

    /// `support` must be sorted and duplicate-free.
    pub(crate) fn from_index_pairs(support: Vec<Event>, pairs: &[(usize, usize)]) -> Play {
        let mut rows: Vec<u64> = (0..support.len()).map(|i| 1u64 << i).collect();
        for &(i, j) in pairs {
            rows[i] |= 1 << j;
        }
        close(&mut rows);
        Play { support, rows }
    }

    pub fn neutral<I: IntoIterator<Item = Event>>(support: I) -> Play {
        Play::new(support, &[]).expect("neutral play within size bound")
    }

    pub fn empty() -> Play {
        Play { support: Vec::new(), rows: Vec::new() }
    }

    /// The total order listing `events` from least to greatest.
    pub fn chain(events: &[Event]) -> Result<Play> {
        let covers: Vec<_> = events.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        let p = Play::new(events.iter().cloned(), &covers)?;
        if p.len() != events.len() {
            return usage("chain lists an event twice");
        }
        Ok(p)
    }

    pub fn support(&self) -> &[Event] {
        &self.support
    }

    pub fn support_set(&self) -> BTreeSet<Event> {
        self.support.iter().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn index_of(&self, e: &Event) -> Option<usize> {
        self.support.binary_search(e).ok()
    }

    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn leq(&self, a: &Event, b: &Event) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.leq_idx(i, j),
            _ => false,
        }
    }

    pub fn lt_idx(&self, i: usize, j: usize) -> bool {
        i != j && self.leq_idx(i, j)
    }

    pub fn is_consistent(&self) -> bool {
        (0..self.len()).all(|i| (0..i).all(|j| !(self.leq_idx(i, j) && self.leq_idx(j, i))))
    }

    pub fn is_total(&self) -> bool {
        self.is_consistent()
            && (0..self.len()).all(|i| (0..i).all(|j| self.leq_idx(i, j) || self.leq_idx(j, i)))
    }

    /// Static synchronisation; `None` when the supports differ.
    pub fn sync(&self, other: &Play) -> Option<Play> {
        if self.support != other.support {
            return None;
        }
        let mut rows: Vec<u64> = self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect();
        close(&mut rows);
        Some(Play { support: self.support.clone(), rows })
    }

    /// Union of supports with the closure of the union of relations.
    pub fn join(&self, other: &Play) -> Result<Play> {
        let support: Vec<Event> = self.support.iter().chain(&other.support).cloned().collect::<BTreeSet<_>>().into_iter().collect();
        if support.len() > MAX_SUPPORT {
            return usage(format!("support of {} events exceeds {MAX_SUPPORT}", support.len()));
        }
        let mut pairs = Vec::new();
        for p in [self, other] {
            let idx: Vec<usize> = p.support.iter().map(|e| support.binary_search(e).unwrap()).collect();
            for i in 0..p.len() {
                for j in 0..p.len() {
                    if i != j && p.leq_idx(i, j) {
                        pairs.push((idx[i], idx[j]));
                    }
                }
            }
        }
        Ok(Play::from_index_pairs(support, &pairs))
    }

    /// The induced preorder on the events satisfying `keep`.
    pub fn induced(&self, keep: impl Fn(&Event) -> bool) -> Play {
        let kept: Vec<usize> = (0..self.len()).filter(|&i| keep(&self.support[i])).collect();
        let support = kept.iter().map(|&i| self.support[i].clone()).collect();
        let rows = kept
            .iter()
            .map(|&i| {
                kept.iter().enumerate().fold(0u64, |acc, (nj, &j)| {
                    if self.leq_idx(i, j) {
                        acc | 1 << nj
                    } else {
                        acc
                    }
                })
            })
            .collect();
        Play { support, rows }
    }

    /// Restriction with the consistency factor: `None` stands for zero.
    pub fn restrict(&self, keep: impl Fn(&Event) -> bool) -> Option<Play> {
        if !self.is_consistent() {
            return None;
        }
        let p = self.induced(keep);
        debug_assert!({
            let mut r = p.rows.clone();
            close(&mut r);
            r == p.rows
        });
        Some(p)
    }

    pub fn restrict_to(&self, y: &BTreeSet<Event>) -> Option<Play> {
        self.restrict(|e| y.contains(e))
    }

    /// Transports the play along an injective relabeling of its events.
    pub fn map_events(&self, f: impl Fn(&Event) -> Event) -> Play {
        let image: Vec<Event> = self.support.iter().map(f).collect();
        let mut order: Vec<usize> = (0..image.len()).collect();
        order.sort_by(|&a, &b| image[a].cmp(&image[b]));
        debug_assert!(order.windows(2).all(|w| image[w[0]] != image[w[1]]), "relabeling must be injective");
        // pos[old] = new index
        let mut pos = vec![0usize; image.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut rows = vec![0u64; image.len()];
        for i in 0..image.len() {
            for j in 0..image.len() {
                if self.leq_idx(i, j) {
                    rows[pos[i]] |= 1 << pos[j];
                }
            }
        }
        let support = order.into_iter().map(|i| image[i].clone()).collect();
        Play { support, rows }
    }

    /// All total orders extending the play, in lexicographic order of
    /// their event sequences; empty when inconsistent.
    pub fn linear_extensions(&self) -> Vec<Play> {
        if !self.is_consistent() {
            return Vec::new();
        }
        let n = self.len();
        let mut out = Vec::new();
        let mut seq = Vec::with_capacity(n);
        self.extend_from(0, &mut seq, &mut out);
        debug_assert!(out.len() <= (1..=n).product::<usize>());
        out
    }

    fn extend_from(&self, placed: u64, seq: &mut Vec<usize>, out: &mut Vec<Play>) {
        let n = self.len();
        if seq.len() == n {
            let pairs: Vec<_> = seq.windows(2).map(|w| (w[0], w[1])).collect();
            out.push(Play::from_index_pairs(self.support.clone(), &pairs));
            return;
        }
        for i in 0..n {
            if placed >> i & 1 == 1 {
                continue;
            }
            let below = (0..n).all(|j| j == i || !self.leq_idx(j, i) || placed >> j & 1 == 1);
            if below {
                seq.push(i);
                self.extend_from(placed | 1 << i, seq, out);
                seq.pop();
            }
        }
    }

    /// Covering pairs of a consistent play; all strict pairs otherwise.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let consistent = self.is_consistent();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !self.lt_idx(i, j) {
                    continue;
                }
                let covered = !consistent
                    || !(0..n).any(|k| k != i && k != j && self.leq_idx(i, k) && self.leq_idx(k, j));
                if covered {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// All strict pairs `i <= j`, `i != j`, in index order.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| self.lt_idx(i, j)).collect()
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph play {\n  rankdir=BT;\n");
        for (i, e) in self.support.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", e.to_string().replace('"', "\\\""));
        }
        for (i, j) in self.covers() {
            let _ = writeln!(s, "  n{i} -> n{j};");
        }
        s.push_str("}\n");
        s
    }
}

impl fmt::Display for Play {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers = self.covers();
        let mut mentioned = vec![false; self.len()];
        let mut parts = Vec::new();
        for &(i, j) in &covers {
            mentioned[i] = true;
            mentioned[j] = true;
            parts.push(format!("{}<{}", self.support[i], self.support[j]));
        }
        for (i, e) in self.support.iter().enumerate() {
            if !mentioned[i] {
                parts.push(e.to_string());
            }
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub fn ev(s: &str) -> Event {
        Event::atom(s)
    }

    pub fn play(support: &[&str], covers: &[(&str, &str)]) -> Play {
        let cs: Vec<_> = covers.iter().map(|(a, b)| (ev(a), ev(b))).collect();
        Play::new(support.iter().map(|s| ev(s)), &cs).unwrap()
    }

    #[test]
    fn closure_and_consistency() {
        let p = play(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        assert!(p.leq(&ev("a"), &ev("c")));
        assert!(!p.leq(&ev("c"), &ev("a")));
        assert!(p.is_consistent());
        let q = Play::new(p.support().to_vec(), &[(ev("a"), ev("b")), (ev("b"), ev("c")), (ev("a"), ev("c"))]).unwrap();
        assert_eq!(p, q);
        let cyc = play(&["a", "b"], &[("a", "b"), ("b", "a")]);
        assert!(!cyc.is_consistent());
        assert!(Play::empty().is_consistent());
        let single = play(&["a"], &[]);
        assert!(single.leq(&ev("a"), &ev("a")));
        assert!(Play::new([ev("a")], &[(ev("a"), ev("z"))]).is_err());
    }

    #[test]
    fn sync_examples() {
        let r = play(&["a1", "b", "a2"], &[("a1", "b"), ("a1", "a2")]);
        let s1 = play(&["a1", "b", "a2"], &[("b", "a2")]);
        let s2 = play(&["a1", "b", "a2"], &[("b", "a1")]);
        assert_eq!(r.sync(&s1).unwrap(), Play::chain(&[ev("a1"), ev("b"), ev("a2")]).unwrap());
        let bad = r.sync(&s2).unwrap();
        assert!(!bad.is_consistent());
        assert!(bad.leq(&ev("a1"), &ev("b")) && bad.leq(&ev("b"), &ev("a1")));
        assert_eq!(r.sync(&Play::neutral(r.support().to_vec())).unwrap(), r);
        assert!(r.sync(&play(&["a1"], &[])).is_none());
    }

    #[test]
    fn restriction() {
        let cyc = play(&["a", "b"], &[("a", "b"), ("b", "a")]);
        assert!(cyc.restrict(|e| *e == ev("a")).is_none());
        let ch = play(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        assert_eq!(ch.restrict(|e| *e != ev("b")).unwrap(), play(&["a", "c"], &[("a", "c")]));
        assert_eq!(ch.restrict(|_| true).unwrap(), ch);
    }

    #[test]
    fn extensions_and_display() {
        let p = play(&["a", "b", "c"], &[("a", "b")]);
        let exts = p.linear_extensions();
        assert_eq!(exts.len(), 3);
        assert!(exts.iter().all(Play::is_total));
        let ch = Play::chain(&[ev("a"), ev("b")]).unwrap();
        assert_eq!(ch.linear_extensions(), vec![ch.clone()]);
        assert_eq!(play(&["a", "b"], &[]).linear_extensions().len(), 2);
        assert_eq!(p.to_string(), "{a<b, c}");
        assert_eq!(play(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).to_string(), "{a<b, b<c}");
        assert!(ch.to_dot().contains("n0 -> n1"));
    }

    /// Brute force: every permutation of the support, kept when it respects `p`.
    fn brute_extension_count(p: &Play) -> usize {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for q in perms(n - 1) {
                for k in 0..=q.len() {
                    let mut r = q.clone();
                    r.insert(k, n - 1);
                    out.push(r);
                }
            }
            out
        }
        perms(p.len())
            .into_iter()
            .filter(|seq| {
                (0..seq.len()).all(|a| (a + 1..seq.len()).all(|b| !p.lt_idx(seq[b], seq[a])))
            })
            .count()
    }

    pub fn arb_play(n: usize) -> impl Strategy<Value = Play> {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let support: Vec<Event> = (0..n).map(|i| ev(&format!("e{i}"))).collect();
            let pairs: Vec<_> = (0..n * n).filter(|&k| bits[k] && k / n != k % n).map(|k| (k / n, k % n)).collect();
            Play::from_index_pairs(support, &pairs)
        })
    }

    fn sparse_play(n: usize) -> impl Strategy<Value = Play> {
        proptest::collection::vec(0u8..5, n * n).prop_map(move |bits| {
            let support: Vec<Event> = (0..n).map(|i| ev(&format!("e{i}"))).collect();
            let pairs: Vec<_> = (0..n * n).filter(|&k| bits[k] == 0 && k / n != k % n).map(|k| (k / n, k % n)).collect();
            Play::from_index_pairs(support, &pairs)
        })
    }

    proptest! {
        #[test]
        fn sync_is_associative_and_commutative(
            (r, s, t) in (1usize..=4).prop_flat_map(|n| (sparse_play(n), sparse_play(n), sparse_play(n)))
        ) {
            prop_assert_eq!(r.sync(&s), s.sync(&r));
            let left = r.sync(&s).unwrap().sync(&t).unwrap();
            let right = r.sync(&s.sync(&t).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            if r.sync(&s).unwrap().is_consistent() {
                prop_assert!(r.is_consistent() && s.is_consistent());
            }
        }

        #[test]
        fn closure_is_idempotent(p in (0usize..=5).prop_flat_map(arb_play)) {
            let mut rows = p.rows().to_vec();
            close(&mut rows);
            prop_assert_eq!(rows, p.rows().to_vec());
        }

        #[test]
        fn restrict_composes(p in (0usize..=5).prop_flat_map(sparse_play), y in any::<u8>(), z in any::<u8>()) {
            let inside = |mask: u8| move |e: &Event| {
                let Event::Atom(a) = e else { unreachable!() };
                let i: u32 = a[1..].parse().unwrap();
                mask >> i & 1 == 1
            };
            if p.is_consistent() {
                let twice = p.restrict(inside(y)).unwrap().restrict(inside(z)).unwrap();
                prop_assert_eq!(twice, p.restrict(inside(y & z)).unwrap());
            }
        }

        #[test]
        fn extension_count_matches_brute_force(p in (0usize..=5).prop_flat_map(sparse_play)) {
            let exts = p.linear_extensions();
            if p.is_consistent() {
                prop_assert_eq!(exts.len(), brute_extension_count(&p));
                for t in &exts {
                    prop_assert!(t.is_total());
                    prop_assert_eq!(t.sync(&p), Some(t.clone()));
                }
            } else {
                prop_assert!(exts.is_empty());
            }
        }
    }
}
