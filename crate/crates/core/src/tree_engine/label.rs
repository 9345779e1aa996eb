//! Six-symbol neighbourhood labels.

use std::fmt;

use serde::{Serialize, Serializer};

/// Per-port symbol. The derived order is the comparison order:
/// `P > C > D > DActive > E > N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// Occupied, not parent, child or dark-blue neighbour.
    N,
    /// Unoccupied.
    E,
    /// Dark-blue edge hosting a comparison this round.
    DActive,
    /// Dark-blue edge.
    D,
    C,
    P,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::N => 'N',
            Symbol::E => 'E',
            Symbol::DActive => 'd',
            Symbol::D => 'D',
            Symbol::C => 'C',
            Symbol::P => 'P',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'N' => Symbol::N,
            'E' => Symbol::E,
            'd' => Symbol::DActive,
            'D' => Symbol::D,
            'C' => Symbol::C,
            'P' => Symbol::P,
            _ => return None,
        })
    }

    pub const ALL: [Symbol; 6] = [Symbol::N, Symbol::E, Symbol::DActive, Symbol::D, Symbol::C, Symbol::P];
}

/// Symbols indexed by local port; compares lexicographically from port 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NeighborLabel(pub [Symbol; 6]);

impl NeighborLabel {
    pub fn parse(text: &str) -> Option<Self> {
        let syms: Vec<Symbol> = text.chars().map(Symbol::from_char).collect::<Option<_>>()?;
        Some(Self(syms.try_into().ok()?))
    }

    pub fn count(&self, s: Symbol) -> usize {
        self.0.iter().filter(|x| **x == s).count()
    }
}

impl fmt::Display for NeighborLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl Serialize for NeighborLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
