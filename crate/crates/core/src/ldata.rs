//! Langlands data `L(Δ_1, ..., Δ_f; π(φ, ε))` and the GL pieces they are built from.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{rational_serde, HalfInt};
use crate::multiset::MultiSet;
use crate::params::{GroupTag, LPiece, LParameter, Summand};
use crate::rho::{Exponent, Parity, RhoSymbol, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GlKind {
    /// `Δ_ρ[x,y]`, exponents `x, x-1, ..., y`.
    Steinberg,
    /// `Z_ρ[y,x]`, exponents `y, y+1, ..., x`.
    Zelevinsky,
}

/// A segment representation of `GL`. `x = y - 1` is the trivial
/// representation of `GL_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GlSegment {
    pub kind: GlKind,
    pub rho: RhoSymbol,
    pub x: HalfInt,
    pub y: HalfInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl GlSegment {
    pub fn new(kind: GlKind, rho: RhoSymbol, x: HalfInt, y: HalfInt) -> Result<Self, LDataError> {
        let d = x - y;
        if !d.is_integer() || d < -HalfInt::ONE {
            return Err(LDataError::BadSegment { x, y });
        }
        Ok(GlSegment { kind, rho, x, y })
    }

    pub fn steinberg(rho: RhoSymbol, x: HalfInt, y: HalfInt) -> Result<Self, LDataError> {
        Self::new(GlKind::Steinberg, rho, x, y)
    }

    pub fn zelevinsky(rho: RhoSymbol, x: HalfInt, y: HalfInt) -> Result<Self, LDataError> {
        Self::new(GlKind::Zelevinsky, rho, x, y)
    }

    /// `x - y + 1`; zero for the `GL_0` marker.
    pub fn length(&self) -> u32 {
        ((self.x - self.y).twice() / 2 + 1) as u32
    }

    pub fn is_trivial(&self) -> bool {
        self.length() == 0
    }

    /// `x + y`, the quantity that orders Langlands data.
    pub fn center_twice(&self) -> HalfInt {
        self.x + self.y
    }

    /// Derivative (left or right) with respect to `ρ|·|^at`; `None` is zero.
    pub fn derivative(&self, at: &Exponent, side: Side) -> Option<GlSegment> {
        if self.is_trivial() || at.0 != self.rho {
            return None;
        }
        let (matches, x, y) = match (self.kind, side) {
            (GlKind::Steinberg, Side::Left) => (at.1 == self.x, self.x - 1, self.y),
            (GlKind::Steinberg, Side::Right) => (at.1 == self.y, self.x, self.y + 1),
            (GlKind::Zelevinsky, Side::Left) => (at.1 == self.y, self.x, self.y + 1),
            (GlKind::Zelevinsky, Side::Right) => (at.1 == self.x, self.x - 1, self.y),
        };
        matches.then(|| GlSegment { kind: self.kind, rho: self.rho.clone(), x, y })
    }
}

impl fmt::Display for GlSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GlKind::Steinberg => write!(f, "D({},{},{})", self.rho, self.x, self.y),
            GlKind::Zelevinsky => write!(f, "Z({},{},{})", self.rho, self.y, self.x),
        }
    }
}

/// The (shifted) Speh representation with entries `x_{i,j} = x_{1,1} - i + j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpehBlock {
    pub rho: RhoSymbol,
    #[serde(with = "rational_serde")]
    pub top_left: Rational64,
    pub rows: u32,
    pub cols: u32,
}

impl SpehBlock {
    pub fn entry(&self, i: u32, j: u32) -> Rational64 {
        self.top_left - i64::from(i) + i64::from(j)
    }

    pub fn entries(&self) -> Vec<Vec<Rational64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

/// The Speh block of a summand `ρ|·|^x ⊗ S_a ⊗ S_b`: `a` rows, `b` columns,
/// top-left entry `(a-b)/2 + x`. `shifted` requires `x > 0`, otherwise `x = 0`.
pub fn speh_of_summand(s: &Summand, shifted: bool) -> Result<SpehBlock, LDataError> {
    let ok = if shifted { s.twist > Rational64::zero() } else { s.twist.is_zero() };
    if !ok {
        return Err(LDataError::SpehTwist(s.to_string()));
    }
    Ok(SpehBlock {
        rho: s.rho.clone(),
        top_left: Rational64::new(i64::from(s.a) - i64::from(s.b), 2) + s.twist,
        rows: s.a,
        cols: s.b,
    })
}

/// A tempered piece `ρ ⊗ S_a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TemperedPiece {
    pub rho: RhoSymbol,
    pub a: u32,
}

impl TemperedPiece {
    pub fn new(rho: RhoSymbol, a: u32) -> Self {
        TemperedPiece { rho, a }
    }

    /// `z` with `a = 2z + 1`.
    pub fn exponent(&self) -> HalfInt {
        HalfInt::from_twice(i64::from(self.a) - 1)
    }

    pub fn is_good_parity_for(&self, group: GroupTag) -> bool {
        self.rho.tensor_type(self.a, 1) == group.dual_type()
    }
}

impl fmt::Display for TemperedPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*S{}", self.rho, self.a)
    }
}

/// `π(φ, ε)`: `ε` is defined on the distinct good-parity pieces of `φ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TemperedData {
    pub group: GroupTag,
    pub phi: MultiSet<TemperedPiece>,
    #[serde(with = "crate::multiset::pairs")]
    pub eps: BTreeMap<TemperedPiece, Sign>,
}

impl TemperedData {
    pub fn new(
        group: GroupTag,
        phi: MultiSet<TemperedPiece>,
        eps: BTreeMap<TemperedPiece, Sign>,
    ) -> Result<Self, LDataError> {
        let t = TemperedData { group, phi, eps };
        t.check()?;
        Ok(t)
    }

    /// `π(φ, 1)`.
    pub fn trivial(group: GroupTag, phi: MultiSet<TemperedPiece>) -> Self {
        let eps = phi
            .iter()
            .filter(|(p, _)| p.is_good_parity_for(group))
            .map(|(p, _)| (p.clone(), Sign::Plus))
            .collect();
        TemperedData { group, phi, eps }
    }

    pub fn empty(group: GroupTag) -> Self {
        Self::trivial(group, MultiSet::new())
    }

    fn check(&self) -> Result<(), LDataError> {
        if self.dim() != self.group.big_n() {
            return Err(LDataError::Dimension { expected: self.group.big_n(), found: self.dim() });
        }
        for (p, _) in self.phi.iter() {
            if p.a == 0 {
                return Err(LDataError::Character(format!("{p} has a = 0")));
            }
            if p.is_good_parity_for(self.group) != self.eps.contains_key(p) {
                return Err(LDataError::Character(format!("eps must be given exactly on good-parity pieces ({p})")));
            }
        }
        if let Some(p) = self.eps.keys().find(|p| self.phi.multiplicity(p) == 0) {
            return Err(LDataError::Character(format!("eps names {p}, which is not in phi")));
        }
        let product: Sign = self.eps.iter().map(|(p, s)| s.pow(self.phi.multiplicity(p) as i64)).product();
        if product != Sign::Plus {
            return Err(LDataError::Character("product of eps over phi is not 1".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> u32 {
        self.phi.iter().map(|(p, m)| p.rho.dim() * p.a * m as u32).sum()
    }

    pub fn is_good_parity(&self) -> bool {
        self.phi.iter().all(|(p, _)| p.is_good_parity_for(self.group))
    }

    pub fn eps_is_trivial(&self) -> bool {
        self.eps.values().all(|&s| s == Sign::Plus)
    }

    pub fn l_parameter(&self) -> LParameter {
        LParameter {
            group: self.group,
            pieces: self.phi.map(|p| LPiece { rho: p.rho.clone(), twist: Rational64::zero(), a: p.a }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LDataError {
    #[error("segment [{x},{y}] has non-integral or negative length")]
    BadSegment { x: HalfInt, y: HalfInt },
    #[error("segment {0} must be of Steinberg kind with x + y < 0")]
    NotNegative(String),
    #[error("dimension {found} does not match N = {expected}")]
    Dimension { expected: u32, found: u32 },
    #[error("invalid character: {0}")]
    Character(String),
    #[error("summand {0} has the wrong twist for this Speh block")]
    SpehTwist(String),
}

/// Langlands data: Steinberg segments with `x + y < 0`, sorted, plus a tempered part.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LData {
    pub group: GroupTag,
    pub segments: Vec<GlSegment>,
    pub tempered: TemperedData,
}

fn segment_key(s: &GlSegment) -> (HalfInt, String, HalfInt, HalfInt) {
    (s.center_twice(), s.rho.label().to_string(), s.x, s.y)
}

/// Builds Langlands data, sorting segments by `x + y` (ties by label, then `x`).
pub fn make_ldata(group: GroupTag, mut segments: Vec<GlSegment>, tempered: TemperedData) -> Result<LData, LDataError> {
    for s in &segments {
        if s.kind != GlKind::Steinberg || s.is_trivial() || s.center_twice() >= HalfInt::ZERO {
            return Err(LDataError::NotNegative(s.to_string()));
        }
    }
    tempered.check()?;
    segments.sort_by_key(segment_key);
    let l = LData { group, segments, tempered };
    if l.dim() != group.big_n() {
        return Err(LDataError::Dimension { expected: group.big_n(), found: l.dim() });
    }
    Ok(l)
}

impl LData {
    /// Tempered data with no segments.
    pub fn tempered(t: TemperedData) -> LData {
        LData { group: t.group, segments: Vec::new(), tempered: t }
    }

    /// `2 Σ dim ρ · len(Δ) + dim φ`.
    pub fn dim(&self) -> u32 {
        2 * self.segments.iter().map(|s| s.rho.dim() * s.length()).sum::<u32>() + self.tempered.dim()
    }

    /// The L-parameter `φ_π`: each `Δ_ρ[x,y]` contributes `ρ|·|^{(x+y)/2} ⊗ S_{x-y+1}` and its dual.
    pub fn l_parameter(&self) -> LParameter {
        let mut out = self.tempered.l_parameter();
        out.group = self.group;
        for s in &self.segments {
            let c = s.center_twice().to_rational() / 2;
            out.pieces.insert(LPiece { rho: s.rho.clone(), twist: c, a: s.length() });
            out.pieces.insert(LPiece { rho: s.rho.contragredient(), twist: -c, a: s.length() });
        }
        out
    }

    /// `Ω(π)`: writing each segment as `Δ_ρ[x,-y]`, contributes `x` and `y`;
    /// each tempered `ρ ⊗ S_{2z+1}` contributes `z`.
    pub fn omega(&self) -> MultiSet<Exponent> {
        let mut out = MultiSet::new();
        for s in &self.segments {
            out.insert((s.rho.clone(), s.x));
            out.insert((s.rho.clone(), -s.y));
        }
        for (p, m) in self.tempered.phi.iter() {
            out.insert_many((p.rho.clone(), p.exponent()), m);
        }
        out
    }

    /// Exponent test: every segment and tempered piece `ρ ⊗ S_{2|x|+1}` is of
    /// the dual group's type.
    pub fn is_good_parity(&self) -> bool {
        let target = self.group.dual_type();
        self.tempered.is_good_parity()
            && self.segments.iter().all(|s| {
                let a = (s.x.abs().twice() + 1) as u32;
                s.rho.parity() != Parity::NonSelfDual && s.rho.tensor_type(a, 1) == target
            })
    }

    pub fn rhos(&self) -> Vec<RhoSymbol> {
        let mut v: Vec<RhoSymbol> = self
            .segments
            .iter()
            .map(|s| s.rho.clone())
            .chain(self.tempered.phi.iter().map(|(p, _)| p.rho.clone()))
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

impl fmt::Display for LData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let segs: String = self.segments.iter().map(|s| format!(" {s}")).collect();
        let phi: Vec<String> = self.tempered.phi.iter_expanded().map(|p| format!(" {p}")).collect();
        let eps: Vec<String> = self.tempered.eps.iter().map(|(p, s)| format!(" {p}:{s}")).collect();
        write!(f, "L({segs} ; phi ={} ; eps ={} )", phi.join(" +"), eps.join(","))
    }
}

/// `m_{ρ,x}`: segments `Δ_ρ[-x,-x]` for `x > 0`, tempered `ρ ⊗ S_1` at `x = 0`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiplicityProfile {
    #[serde(with = "crate::multiset::pairs")]
    pub counts: BTreeMap<RhoSymbol, BTreeMap<HalfInt, u32>>,
}

impl MultiplicityProfile {
    pub fn get(&self, rho: &RhoSymbol, x: HalfInt) -> u32 {
        self.counts.get(rho).and_then(|m| m.get(&x)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, rho: &RhoSymbol, x: HalfInt, m: u32) {
        let row = self.counts.entry(rho.clone()).or_default();
        if m == 0 {
            row.remove(&x);
        } else {
            row.insert(x, m);
        }
        if row.is_empty() {
            self.counts.remove(rho);
        }
    }

    /// Largest `x` with a nonzero count for `rho`.
    pub fn top(&self, rho: &RhoSymbol) -> Option<HalfInt> {
        self.counts.get(rho).and_then(|m| m.keys().next_back().copied())
    }

    /// First `(ρ, x)` with `m_{ρ,x+1} > m_{ρ,x}`.
    pub fn first_increase(&self) -> Option<(RhoSymbol, HalfInt)> {
        for (rho, row) in &self.counts {
            for &y in row.keys() {
                let x = y - 1;
                if x >= HalfInt::ZERO && self.get(rho, y) > self.get(rho, x) {
                    return Some((rho.clone(), x));
                }
            }
        }
        None
    }

    /// Builds `L(Δ_ρ[-x,-x]^{m_{ρ,x}}; π(⊕ (ρ ⊗ S_1)^{m_{ρ,0}}, 1))`.
    pub fn to_ldata(&self, group: GroupTag) -> Result<LData, LDataError> {
        let mut segments = Vec::new();
        let mut phi = MultiSet::new();
        for (rho, row) in &self.counts {
            for (&x, &m) in row {
                if x.is_zero() {
                    phi.insert_many(TemperedPiece::new(rho.clone(), 1), m as usize);
                } else {
                    for _ in 0..m {
                        segments.push(GlSegment::steinberg(rho.clone(), -x, -x)?);
                    }
                }
            }
        }
        let seg_dim: u32 = segments.iter().map(|s| 2 * s.rho.dim()).sum();
        let tgroup = group
            .with_big_n(group.big_n().checked_sub(seg_dim).ok_or(LDataError::Dimension {
                expected: group.big_n(),
                found: seg_dim,
            })?)
            .ok_or(LDataError::Dimension { expected: group.big_n(), found: seg_dim })?;
        make_ldata(group, segments, TemperedData::trivial(tgroup, phi))
    }
}
