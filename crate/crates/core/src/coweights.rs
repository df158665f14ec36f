//! The coweight lattice `P = Z λ₁ ⊕ Z λ₂` that indexes the filtration.
//!
//! Coweights are stored in the fundamental-coweight basis, so every pairing
//! with a positive root is an integer read: `⟨λ, α₁⟩ = i`, `⟨λ, α₂⟩ = j` and
//! the level `⟨λ, α₀⟩ = i + j`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coweight {
    pub i: i64,
    pub j: i64,
}

/// The positive roots of `A₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Root {
    Alpha0,
    Alpha1,
    Alpha2,
}

pub const ZERO: Coweight = Coweight { i: 0, j: 0 };
pub const LAMBDA1: Coweight = Coweight { i: 1, j: 0 };
pub const LAMBDA2: Coweight = Coweight { i: 0, j: 1 };

impl Coweight {
    pub const fn new(i: i64, j: i64) -> Self {
        Coweight { i, j }
    }

    pub fn pairing(self, root: Root) -> i64 {
        match root {
            Root::Alpha0 => self.i + self.j,
            Root::Alpha1 => self.i,
            Root::Alpha2 => self.j,
        }
    }

    /// Vertical level `⟨λ, α₀⟩`.
    pub fn level(self) -> i64 {
        self.pairing(Root::Alpha0)
    }

    /// The partial order `λ ⪯ μ`: `μ` lies in the upward sector from `λ`.
    pub fn leq(self, other: Coweight) -> bool {
        self.i <= other.i && self.j <= other.j
    }

    /// Max-norm distance in the `(λ₁, λ₂)` coordinates.
    pub fn dist(self, other: Coweight) -> u64 {
        (self.i - other.i)
            .unsigned_abs()
            .max((self.j - other.j).unsigned_abs())
    }

    /// Componentwise maximum, the least upper bound for `⪯`.
    pub fn join(self, other: Coweight) -> Coweight {
        Coweight::new(self.i.max(other.i), self.j.max(other.j))
    }
}

pub fn pairing(lambda: Coweight, root: Root) -> i64 {
    lambda.pairing(root)
}

pub fn leq(lambda: Coweight, mu: Coweight) -> bool {
    lambda.leq(mu)
}

pub fn dist(lambda: Coweight, mu: Coweight) -> u64 {
    lambda.dist(mu)
}

impl Add for Coweight {
    type Output = Coweight;
    fn add(self, rhs: Coweight) -> Coweight {
        Coweight::new(self.i + rhs.i, self.j + rhs.j)
    }
}

impl Sub for Coweight {
    type Output = Coweight;
    fn sub(self, rhs: Coweight) -> Coweight {
        Coweight::new(self.i - rhs.i, self.j - rhs.j)
    }
}

impl Neg for Coweight {
    type Output = Coweight;
    fn neg(self) -> Coweight {
        Coweight::new(-self.i, -self.j)
    }
}

impl Mul<Coweight> for i64 {
    type Output = Coweight;
    fn mul(self, rhs: Coweight) -> Coweight {
        Coweight::new(self * rhs.i, self * rhs.j)
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.i, self.j)
    }
}

impl FromStr for Coweight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `i,j`, got `{s}`")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("bad coweight coordinate `{t}`: {e}")))
        };
        Ok(Coweight::new(parse(a)?, parse(b)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(r: i64) -> Vec<Coweight> {
        let mut v = Vec::new();
        for i in -r..=r {
            for j in -r..=r {
                v.push(Coweight::new(i, j));
            }
        }
        v
    }

    #[test]
    fn pairings() {
        assert_eq!(pairing(Coweight::new(2, 3), Root::Alpha0), 5);
        assert_eq!(pairing(ZERO, Root::Alpha1), 0);
        assert_eq!(pairing(LAMBDA1, Root::Alpha2), 0);
        assert_eq!(pairing(LAMBDA1, Root::Alpha0), 1);
        assert_eq!(pairing(LAMBDA2, Root::Alpha0), 1);
    }

    #[test]
    fn order_examples() {
        assert!(leq(Coweight::new(0, 0), Coweight::new(1, 2)));
        assert!(!leq(Coweight::new(1, 0), Coweight::new(0, 1)));
        assert!(!leq(Coweight::new(0, 1), Coweight::new(1, 0)));
        assert!(leq(Coweight::new(2, 2), Coweight::new(2, 2)));
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist(ZERO, Coweight::new(2, -3)), 3);
        let l = Coweight::new(4, -1);
        assert_eq!(dist(l, l), 0);
        assert_eq!(dist(Coweight::new(1, 1), Coweight::new(2, 1)), 1);
    }

    #[test]
    fn order_is_partial_order_on_grid() {
        let g = grid(2);
        for &a in &g {
            assert!(a.leq(a));
            for &b in &g {
                if a.leq(b) && b.leq(a) {
                    assert_eq!(a, b);
                }
                if a.leq(b) {
                    assert!(a.level() <= b.level());
                }
                for &c in &g {
                    if a.leq(b) && b.leq(c) {
                        assert!(a.leq(c));
                    }
                }
            }
        }
    }

    #[test]
    fn dist_is_metric_on_grid() {
        let g = grid(2);
        for &a in &g {
            for &b in &g {
                assert_eq!(a.dist(b), b.dist(a));
                assert_eq!(a.dist(b) == 0, a == b);
                for &c in &g {
                    assert!(a.dist(c) <= a.dist(b) + b.dist(c));
                }
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        let l: Coweight = "3,-2".parse().unwrap();
        assert_eq!(l, Coweight::new(3, -2));
        assert_eq!(l.to_string().parse::<Coweight>().unwrap(), l);
        assert!("3".parse::<Coweight>().is_err());
        assert!("a,b".parse::<Coweight>().is_err());
    }
}
