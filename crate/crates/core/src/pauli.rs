//! Signed X/Z tensor products over a fixed set of two-level sites.
//!
//! An operator is stored as `phase · Π_j X_j^{x_j} Z_j^{z_j}`, with the X factor to the
//! left of the Z factor on every site.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GadgetError, Result};

/// Powers of `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(k: u8) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    /// `Some(±1.0)` for real phases.
    pub fn real(self) -> Option<f64> {
        match self {
            Phase::PlusOne => Some(1.0),
            Phase::MinusOne => Some(-1.0),
            _ => None,
        }
    }

    pub fn negate(self) -> Self {
        Phase::from_exponent(self.exponent() + 2)
    }

    fn symbol(self) -> &'static str {
        match self {
            Phase::PlusOne => "+",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_exponent(self.exponent() + rhs.exponent())
    }
}

/// Packed bit vector of fixed length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMask {
    len: usize,
    words: Vec<u64>,
}

impl BitMask {
    pub fn zeros(len: usize) -> Self {
        BitMask {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self> {
        let mut m = BitMask::zeros(len);
        for &i in indices {
            if i >= len {
                return Err(GadgetError::IndexOutOfRange {
                    kind: "qubit",
                    index: i,
                    limit: len,
                });
            }
            m.flip(i);
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if self.get(i) != v {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &BitMask) -> BitMask {
        BitMask {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// Popcount of the intersection.
    pub fn overlap(&self, other: &BitMask) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    x: BitMask,
    z: BitMask,
    phase: Phase,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator {
            x: BitMask::zeros(n),
            z: BitMask::zeros(n),
            phase: Phase::PlusOne,
        }
    }

    pub fn new(x: BitMask, z: BitMask, phase: Phase) -> Result<Self> {
        if x.len() != z.len() {
            return Err(GadgetError::SiteCountMismatch {
                left: x.len(),
                right: z.len(),
            });
        }
        Ok(PauliOperator { x, z, phase })
    }

    /// Product of X over `sites`.
    pub fn x_on(n: usize, sites: &[usize]) -> Result<Self> {
        Ok(PauliOperator {
            x: BitMask::from_indices(n, sites)?,
            z: BitMask::zeros(n),
            phase: Phase::PlusOne,
        })
    }

    /// Product of Z over `sites`.
    pub fn z_on(n: usize, sites: &[usize]) -> Result<Self> {
        Ok(PauliOperator {
            x: BitMask::zeros(n),
            z: BitMask::from_indices(n, sites)?,
            phase: Phase::PlusOne,
        })
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn n_sites(&self) -> usize {
        self.x.len()
    }

    pub fn x_mask(&self) -> &BitMask {
        &self.x
    }

    pub fn z_mask(&self) -> &BitMask {
        &self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero() && self.phase == Phase::PlusOne
    }

    /// Identity up to phase.
    pub fn is_scalar(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn weight(&self) -> usize {
        (0..self.n_sites())
            .filter(|&i| self.x.get(i) || self.z.get(i))
            .count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n_sites())
            .filter(|&i| self.x.get(i) || self.z.get(i))
            .collect()
    }

    fn check_len(&self, other: &PauliOperator) -> Result<()> {
        if self.n_sites() != other.n_sites() {
            return Err(GadgetError::SiteCountMismatch {
                left: self.n_sites(),
                right: other.n_sites(),
            });
        }
        Ok(())
    }

    /// `self · other`.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        self.check_len(other)?;
        // Z^{z_p} X^{x_q} = (-1)^{|z_p ∧ x_q|} X^{x_q} Z^{z_p}
        let mut phase = self.phase * other.phase;
        if self.z.overlap(&other.x) % 2 == 1 {
            phase = phase.negate();
        }
        Ok(PauliOperator {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            phase,
        })
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        self.check_len(other)?;
        Ok((self.x.overlap(&other.z) + self.z.overlap(&other.x)).is_multiple_of(2))
    }

    /// Image of the computational basis state `c`: `(c ⊕ x, phase · (-1)^{|z ∧ c|})`.
    pub fn apply_to_config(&self, c: &BitMask) -> Result<(BitMask, Phase)> {
        if c.len() != self.n_sites() {
            return Err(GadgetError::SiteCountMismatch {
                left: self.n_sites(),
                right: c.len(),
            });
        }
        let mut phase = self.phase;
        if self.z.overlap(c) % 2 == 1 {
            phase = phase.negate();
        }
        Ok((c.xor(&self.x), phase))
    }

    pub fn adjoint(&self) -> PauliOperator {
        // (X^x Z^z)† = Z^z X^x = (-1)^{|x ∧ z|} X^x Z^z
        let mut phase = Phase::from_exponent((4 - self.phase.exponent()) % 4);
        if self.x.overlap(&self.z) % 2 == 1 {
            phase = phase.negate();
        }
        PauliOperator {
            x: self.x.clone(),
            z: self.z.clone(),
            phase,
        }
    }

    /// Product of a sequence, left to right.
    pub fn product<'a, I>(n: usize, ops: I) -> Result<PauliOperator>
    where
        I: IntoIterator<Item = &'a PauliOperator>,
    {
        ops.into_iter()
            .try_fold(PauliOperator::identity(n), |acc, p| acc.multiply(p))
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |m: &BitMask| {
            m.ones()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "{} X{{{}}} Z{{{}}}",
            self.phase.symbol(),
            join(&self.x),
            join(&self.z)
        )
    }
}

impl PauliOperator {
    /// Parses the canonical rendering for an operator on `n` sites.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let bad = || GadgetError::Config(format!("malformed Pauli string {s:?}"));
        let mut parts = s.split_whitespace();
        let phase = match parts.next().ok_or_else(bad)? {
            "+" => Phase::PlusOne,
            "+i" => Phase::PlusI,
            "-" => Phase::MinusOne,
            "-i" => Phase::MinusI,
            _ => return Err(bad()),
        };
        let mut field = |prefix: char| -> Result<Vec<usize>> {
            let tok = parts.next().ok_or_else(bad)?;
            let inner = tok
                .strip_prefix(prefix)
                .and_then(|t| t.strip_prefix('{'))
                .and_then(|t| t.strip_suffix('}'))
                .ok_or_else(bad)?;
            if inner.is_empty() {
                return Ok(Vec::new());
            }
            inner
                .split(',')
                .map(|v| v.parse::<usize>().map_err(|_| bad()))
                .collect()
        };
        let xs = field('X')?;
        let zs = field('Z')?;
        PauliOperator::new(
            BitMask::from_indices(n, &xs)?,
            BitMask::from_indices(n, &zs)?,
            phase,
        )
    }
}

/// Parses with the site count taken from the largest index mentioned (minimum 1).
impl FromStr for PauliOperator {
    type Err = GadgetError;
    fn from_str(s: &str) -> Result<Self> {
        let max = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .map_or(1, |m| m + 1);
        PauliOperator::parse(s, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_squared_is_identity() {
        let x = PauliOperator::x_on(1, &[0]).unwrap();
        assert!(x.multiply(&x).unwrap().is_identity());
    }

    #[test]
    fn x_and_z_anticommute() {
        let x = PauliOperator::x_on(1, &[0]).unwrap();
        let z = PauliOperator::z_on(1, &[0]).unwrap();
        assert!(!x.commutes(&z).unwrap());
        // XZ = -ZX
        let xz = x.multiply(&z).unwrap();
        let zx = z.multiply(&x).unwrap();
        assert_eq!(xz.phase().negate(), zx.phase());
    }

    #[test]
    fn z_on_flipped_qubit() {
        let z = PauliOperator::z_on(2, &[1]).unwrap();
        let c = BitMask::from_indices(2, &[1]).unwrap();
        let (out, ph) = z.apply_to_config(&c).unwrap();
        assert_eq!(out, c);
        assert_eq!(ph, Phase::MinusOne);
    }

    #[test]
    fn mismatched_sizes() {
        let a = PauliOperator::identity(2);
        let b = PauliOperator::identity(3);
        assert!(a.multiply(&b).is_err());
        assert!(a.commutes(&b).is_err());
    }

    #[test]
    fn render_and_parse() {
        let p = PauliOperator::x_on(6, &[0, 3])
            .unwrap()
            .multiply(&PauliOperator::z_on(6, &[5]).unwrap())
            .unwrap()
            .with_phase(Phase::MinusI);
        let s = p.to_string();
        assert_eq!(s, "-i X{0,3} Z{5}");
        assert_eq!(PauliOperator::parse(&s, 6).unwrap(), p);
    }

    #[test]
    fn adjoint_of_y_like() {
        // X Z on one site is -iY; its adjoint is iY = Z X = -X Z.
        let xz = PauliOperator::new(
            BitMask::from_indices(1, &[0]).unwrap(),
            BitMask::from_indices(1, &[0]).unwrap(),
            Phase::PlusOne,
        )
        .unwrap();
        let adj = xz.adjoint();
        assert_eq!(adj.phase(), Phase::MinusOne);
        assert!(xz.multiply(&adj).unwrap().is_identity());
    }
}
