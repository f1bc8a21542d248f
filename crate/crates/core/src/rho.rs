//! Symbolic supercuspidal representations, signs, and segments.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Mul, MulAssign, Neg};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::HalfInt;
use crate::multiset::MultiSet;

/// Self-duality type of an irreducible representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    #[serde(rename = "O")]
    Orthogonal,
    #[serde(rename = "S")]
    Symplectic,
    #[serde(rename = "N")]
    NonSelfDual,
}

impl Parity {
    pub fn letter(self) -> char {
        match self {
            Parity::Orthogonal => 'O',
            Parity::Symplectic => 'S',
            Parity::NonSelfDual => 'N',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'O' => Some(Parity::Orthogonal),
            'S' => Some(Parity::Symplectic),
            'N' => Some(Parity::NonSelfDual),
            _ => None,
        }
    }

    /// `+1` for orthogonal, `-1` for symplectic.
    fn as_sign(self) -> Option<Sign> {
        match self {
            Parity::Orthogonal => Some(Sign::Plus),
            Parity::Symplectic => Some(Sign::Minus),
            Parity::NonSelfDual => None,
        }
    }

    fn from_sign(s: Sign) -> Parity {
        match s {
            Sign::Plus => Parity::Orthogonal,
            Sign::Minus => Parity::Symplectic,
        }
    }
}

/// A sign `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^k`.
    pub fn pow_neg_one(k: i64) -> Sign {
        if k.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn pow(self, k: i64) -> Sign {
        match self {
            Sign::Plus => Sign::Plus,
            Sign::Minus => Sign::pow_neg_one(k),
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_symbol(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl MulAssign for Sign {
    fn mul_assign(&mut self, rhs: Sign) {
        *self = *self * rhs;
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl std::iter::Product for Sign {
    fn product<I: Iterator<Item = Sign>>(iter: I) -> Sign {
        iter.fold(Sign::Plus, Mul::mul)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_char(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let c = char::deserialize(d)?;
        Sign::from_symbol(c).ok_or_else(|| serde::de::Error::custom(format!("bad sign `{c}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RhoError {
    #[error("rho `{0}`: dimension must be positive")]
    ZeroDimension(String),
    #[error("rho `{0}`: an unramified character has dimension 1")]
    UnramifiedDimension(String),
    #[error("rho `{0}`: a self-dual symbol is its own dual")]
    SelfDualLink(String),
    #[error("rho `{0}`: a non-self-dual symbol needs a distinct dual label")]
    MissingDualLink(String),
}

/// An irreducible unitary supercuspidal representation of some `GL_d`, kept
/// symbolic. Two symbols are equal iff their labels are.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhoSymbol {
    label: String,
    dim: u32,
    parity: Parity,
    dual_label: String,
    unramified: bool,
}

impl RhoSymbol {
    pub fn new(
        label: impl Into<String>,
        dim: u32,
        parity: Parity,
        dual_label: Option<String>,
        unramified: bool,
    ) -> Result<Self, RhoError> {
        let label = label.into();
        if dim == 0 {
            return Err(RhoError::ZeroDimension(label));
        }
        if unramified && dim != 1 {
            return Err(RhoError::UnramifiedDimension(label));
        }
        let dual_label = match (parity, dual_label) {
            (Parity::NonSelfDual, Some(d)) if d != label => d,
            (Parity::NonSelfDual, _) => return Err(RhoError::MissingDualLink(label)),
            (_, Some(d)) if d != label => return Err(RhoError::SelfDualLink(label)),
            _ => label.clone(),
        };
        Ok(RhoSymbol { label, dim, parity, dual_label, unramified })
    }

    /// Self-dual symbol of the given type.
    pub fn self_dual(label: impl Into<String>, dim: u32, parity: Parity) -> Self {
        assert!(parity != Parity::NonSelfDual);
        Self::new(label, dim, parity, None, false).expect("valid self-dual symbol")
    }

    /// An unramified quadratic character (dimension 1, orthogonal).
    pub fn unramified_character(label: impl Into<String>) -> Self {
        Self::new(label, 1, Parity::Orthogonal, None, true).expect("valid unramified character")
    }

    /// The trivial representation of `W_F`.
    pub fn trivial() -> Self {
        Self::unramified_character("triv")
    }

    /// A pair `(σ, σ^∨)` of mutually dual non-self-dual symbols.
    pub fn non_self_dual_pair(label: &str, dual: &str, dim: u32) -> (Self, Self) {
        let a = Self::new(label, dim, Parity::NonSelfDual, Some(dual.to_string()), false)
            .expect("valid non-self-dual symbol");
        let b = a.contragredient();
        (a, b)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn dual_label(&self) -> &str {
        &self.dual_label
    }

    pub fn is_unramified(&self) -> bool {
        self.unramified
    }

    pub fn is_self_dual(&self) -> bool {
        self.parity != Parity::NonSelfDual
    }

    pub fn contragredient(&self) -> RhoSymbol {
        if self.is_self_dual() {
            return self.clone();
        }
        RhoSymbol {
            label: self.dual_label.clone(),
            dim: self.dim,
            parity: self.parity,
            dual_label: self.label.clone(),
            unramified: self.unramified,
        }
    }

    /// Type of `ρ ⊗ S_a ⊗ S_b`, or `NonSelfDual` when `ρ` is not self-dual.
    pub fn tensor_type(&self, a: u32, b: u32) -> Parity {
        match self.parity.as_sign() {
            None => Parity::NonSelfDual,
            Some(s) => Parity::from_sign(s * Sign::pow_neg_one(i64::from(a) + i64::from(b))),
        }
    }
}

impl PartialEq for RhoSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

impl Eq for RhoSymbol {}

impl Hash for RhoSymbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.label.hash(state);
    }
}

impl PartialOrd for RhoSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RhoSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.label.cmp(&other.label)
    }
}

impl fmt::Display for RhoSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `ρ|·|^x` as a (symbol, exponent) pair.
pub type Exponent = (RhoSymbol, HalfInt);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("segment [{top},{bottom}] has negative or non-integral length")]
pub struct SegmentError {
    pub top: HalfInt,
    pub bottom: HalfInt,
}

/// The segment `[A,B]_ρ = {ρ|·|^A, ρ|·|^{A-1}, ..., ρ|·|^B}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub rho: RhoSymbol,
    pub top: HalfInt,
    pub bottom: HalfInt,
}

impl Segment {
    pub fn new(rho: RhoSymbol, top: HalfInt, bottom: HalfInt) -> Result<Self, SegmentError> {
        let d = top - bottom;
        if !d.is_integer() || d < HalfInt::ZERO {
            return Err(SegmentError { top, bottom });
        }
        Ok(Segment { rho, top, bottom })
    }

    /// `A - B + 1`.
    pub fn length(&self) -> u32 {
        ((self.top - self.bottom).twice() / 2 + 1) as u32
    }

    pub fn exponents(&self) -> impl Iterator<Item = HalfInt> {
        self.top.down_to(self.bottom)
    }

    pub fn elements(&self) -> MultiSet<Exponent> {
        self.exponents().map(|x| (self.rho.clone(), x)).collect()
    }
}
