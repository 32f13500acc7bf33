use std::fmt;
use std::sync::Arc;

pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pol {
    Pos,
    Neg,
}

impl Pol {
    pub fn flip(self) -> Pol {
        match self {
            Pol::Pos => Pol::Neg,
            Pol::Neg => Pol::Pos,
        }
    }
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pol::Pos => "+",
            Pol::Neg => "-",
        })
    }
}

/// Abstract channel `root.e1n1.....ekNk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chan {
    pub root: Sym,
    pub path: Vec<(Pol, u32)>,
}

impl Chan {
    pub fn root(name: &str) -> Chan {
        Chan { root: sym(name), path: Vec::new() }
    }

    pub fn child(&self, pol: Pol, loc: u32) -> Chan {
        let mut path = self.path.clone();
        path.push((pol, loc));
        Chan { root: self.root.clone(), path }
    }

    pub fn parent(&self) -> Option<(Chan, Pol, u32)> {
        let mut path = self.path.clone();
        let (p, l) = path.pop()?;
        Some((Chan { root: self.root.clone(), path }, p, l))
    }

    pub fn has_prefix(&self, other: &Chan) -> bool {
        self.root == other.root && self.path.starts_with(&other.path)
    }

    /// Replace the prefix `from` by `to`; `None` when `from` is not a prefix.
    pub fn replace_prefix(&self, from: &Chan, to: &Chan) -> Option<Chan> {
        if !self.has_prefix(from) {
            return None;
        }
        let mut path = to.path.clone();
        path.extend_from_slice(&self.path[from.path.len()..]);
        Some(Chan { root: to.root.clone(), path })
    }

    pub fn flip(&self) -> Chan {
        Chan {
            root: self.root.clone(),
            path: self.path.iter().map(|&(p, l)| (p.flip(), l)).collect(),
        }
    }
}

impl fmt::Display for Chan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root)?;
        for (p, l) in &self.path {
            write!(f, ".{p}{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Loc {
    N(u32),
    Bot,
    Top,
}

/// A point of the piI arena: `chan.pol loc`, an action point when `loc`
/// is a location, an inaction point otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiPoint {
    pub chan: Chan,
    pub pol: Pol,
    pub loc: Loc,
}

impl PiPoint {
    /// The name revealed by an action point.
    pub fn revealed(&self) -> Option<Chan> {
        match self.loc {
            Loc::N(n) => Some(self.chan.child(self.pol, n)),
            _ => None,
        }
    }
}

impl fmt::Display for PiPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.loc {
            Loc::N(n) => write!(f, "{}.{}{}", self.chan, self.pol, n),
            Loc::Bot => write!(f, "{}.{}bot", self.chan, self.pol),
            Loc::Top => write!(f, "{}.{}top", self.chan, self.pol),
        }
    }
}

/// Points of arena webs. The derived order is the canonical event order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Atom(Sym),
    Occ(Sym, u32),
    Copy(u32),
    Pi(PiPoint),
    Inj(u16, Box<Event>),
    At(Box<Event>, Box<Event>),
}

impl Event {
    pub fn atom(name: &str) -> Event {
        Event::Atom(sym(name))
    }
    pub fn occ(label: &str, n: u32) -> Event {
        Event::Occ(sym(label), n)
    }
    pub fn inj(tag: u16, e: Event) -> Event {
        Event::Inj(tag, Box::new(e))
    }
    pub fn at(index: Event, body: Event) -> Event {
        Event::At(Box::new(index), Box::new(body))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Atom(a) => f.write_str(a),
            Event::Occ(l, n) => write!(f, "{l}#{n}"),
            Event::Copy(k) => write!(f, "{k}"),
            Event::Pi(p) => write!(f, "{p}"),
            Event::Inj(i, e) => write!(f, "{i}:{e}"),
            Event::At(x, y) => write!(f, "{x}/{y}"),
        }
    }
}
