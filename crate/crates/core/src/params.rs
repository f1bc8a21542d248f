//! Local Arthur parameters `ψ = ⊕ ρ|·|^x ⊗ S_a ⊗ S_b` for `Sp(2n)` and split `SO(2n+1)`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{format_rational, rational_serde, HalfInt};
use crate::multiset::MultiSet;
use crate::rho::{Parity, RhoSymbol, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `Sp(2n)`, dual group `SO(2n+1, C)`.
    Sp,
    /// Split `SO(2n+1)`, dual group `Sp(2n, C)`.
    #[serde(rename = "SO")]
    SOodd,
}

/// The group `G_n`. `n = 0` is allowed for the trivial group reached by
/// splitting off non-good-parity summands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupTag {
    pub family: Family,
    pub n: u32,
}

impl GroupTag {
    pub fn sp(n: u32) -> Self {
        GroupTag { family: Family::Sp, n }
    }

    pub fn so_odd(n: u32) -> Self {
        GroupTag { family: Family::SOodd, n }
    }

    /// Dimension `N` of the standard representation of the dual group.
    pub fn big_n(self) -> u32 {
        match self.family {
            Family::Sp => 2 * self.n + 1,
            Family::SOodd => 2 * self.n,
        }
    }

    /// Self-duality type of the dual group's standard representation.
    pub fn dual_type(self) -> Parity {
        match self.family {
            Family::Sp => Parity::Orthogonal,
            Family::SOodd => Parity::Symplectic,
        }
    }

    /// The group of the same family whose dual has dimension `big_n`.
    pub fn with_big_n(self, big_n: u32) -> Option<GroupTag> {
        match self.family {
            Family::Sp if big_n % 2 == 1 => Some(GroupTag::sp(big_n / 2)),
            Family::SOodd if big_n.is_multiple_of(2) => Some(GroupTag::so_odd(big_n / 2)),
            _ => None,
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Sp => write!(f, "Sp {}", self.n),
            Family::SOodd => write!(f, "SO {}", self.n),
        }
    }
}

/// One irreducible summand `ρ|·|^x ⊗ S_a ⊗ S_b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Summand {
    pub rho: RhoSymbol,
    #[serde(with = "rational_serde")]
    pub twist: Rational64,
    pub a: u32,
    pub b: u32,
}

impl Summand {
    pub fn new(rho: RhoSymbol, twist: Rational64, a: u32, b: u32) -> Self {
        Summand { rho, twist, a, b }
    }

    /// Untwisted summand `ρ ⊗ S_a ⊗ S_b`.
    pub fn untwisted(rho: RhoSymbol, a: u32, b: u32) -> Self {
        Summand { rho, twist: Rational64::zero(), a, b }
    }

    /// `A = (a+b)/2 - 1`.
    pub fn upper(&self) -> HalfInt {
        HalfInt::from_twice(i64::from(self.a) + i64::from(self.b) - 2)
    }

    /// `B = (a-b)/2`.
    pub fn lower(&self) -> HalfInt {
        HalfInt::from_twice(i64::from(self.a) - i64::from(self.b))
    }

    pub fn dim(&self) -> u32 {
        self.rho.dim() * self.a * self.b
    }

    pub fn contragredient(&self) -> Summand {
        Summand { rho: self.rho.contragredient(), twist: -self.twist, a: self.a, b: self.b }
    }

    pub fn swapped(&self) -> Summand {
        Summand { rho: self.rho.clone(), twist: self.twist, a: self.b, b: self.a }
    }

    pub fn is_good_parity_for(&self, group: GroupTag) -> bool {
        self.twist.is_zero() && self.rho.tensor_type(self.a, self.b) == group.dual_type()
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rho)?;
        if !self.twist.is_zero() {
            write!(f, "@{}", format_rational(&self.twist))?;
        }
        write!(f, "*S{}*S{}", self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("summand {0} has a zero-dimensional SL2 factor")]
    ZeroSize(Summand),
    #[error("summand {0}: twist must satisfy |x| < 1/2")]
    TwistOutOfRange(Summand),
    #[error("dimension {found} does not match N = {expected}")]
    Dimension { expected: u32, found: u32 },
    #[error("not closed under contragredient: {0} appears {1} times but its dual {2} times")]
    NotClosed(Summand, usize, usize),
    #[error("summand {0} is self-dual of the wrong type and has odd multiplicity")]
    OddWrongType(Summand),
    #[error("parameter is not of good parity: {0}")]
    NotGoodParity(String),
}

/// A local Arthur parameter: a multi-set of summands for a fixed group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArthurParameter {
    pub group: GroupTag,
    pub summands: MultiSet<Summand>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Predicates {
    pub is_tempered: bool,
    pub is_generic: bool,
    pub is_anti_generic: bool,
    pub is_anti_tempered: bool,
}

impl ArthurParameter {
    pub fn new(group: GroupTag, summands: impl IntoIterator<Item = Summand>) -> Self {
        ArthurParameter { group, summands: summands.into_iter().collect() }
    }

    pub fn dim(&self) -> u32 {
        self.summands.iter().map(|(s, m)| s.dim() * m as u32).sum()
    }

    /// Checks, in order: SL2 sizes, the twist bound, the dimension, and
    /// closure under the contragredient.
    pub fn validate(&self) -> Result<(), ParamError> {
        for (s, _) in self.summands.iter() {
            if s.a == 0 || s.b == 0 {
                return Err(ParamError::ZeroSize(s.clone()));
            }
            if s.twist.abs() >= Rational64::new(1, 2) {
                return Err(ParamError::TwistOutOfRange(s.clone()));
            }
        }
        let found = self.dim();
        let expected = self.group.big_n();
        if found != expected {
            return Err(ParamError::Dimension { expected, found });
        }
        for (s, m) in self.summands.iter() {
            let dual = s.contragredient();
            let md = self.summands.multiplicity(&dual);
            if md != m {
                return Err(ParamError::NotClosed(s.clone(), m, md));
            }
            let wrong_type = dual == *s && s.rho.tensor_type(s.a, s.b) != self.group.dual_type();
            if wrong_type && m % 2 == 1 {
                return Err(ParamError::OddWrongType(s.clone()));
            }
        }
        Ok(())
    }

    pub fn is_good_parity(&self) -> bool {
        self.summands.iter().all(|(s, _)| s.is_good_parity_for(self.group))
    }

    pub fn require_good_parity(&self) -> Result<(), ParamError> {
        match self.summands.iter().find(|(s, _)| !s.is_good_parity_for(self.group)) {
            None => Ok(()),
            Some((s, _)) => Err(ParamError::NotGoodParity(s.to_string())),
        }
    }

    pub fn predicates(&self) -> Predicates {
        let all = |f: &dyn Fn(&Summand) -> bool| self.summands.iter().all(|(s, _)| f(s));
        let untwisted = all(&|s| s.twist.is_zero());
        let generic = all(&|s| s.b == 1);
        let anti_generic = all(&|s| s.a == 1);
        Predicates {
            is_tempered: generic && untwisted,
            is_generic: generic,
            is_anti_generic: anti_generic,
            is_anti_tempered: anti_generic && untwisted,
        }
    }

    /// `ψ̂`: swap the two `SL_2` factors of every summand.
    pub fn dual_parameter(&self) -> ArthurParameter {
        ArthurParameter { group: self.group, summands: self.summands.map(Summand::swapped) }
    }

    /// The associated L-parameter `φ_ψ(w, x) = ψ(w, x, diag(|w|^{1/2}, |w|^{-1/2}))`.
    pub fn l_parameter(&self) -> LParameter {
        let mut pieces = MultiSet::new();
        for (s, m) in self.summands.iter() {
            for j in 0..s.b {
                let shift = Rational64::new(i64::from(s.b) - 1, 2) - i64::from(j);
                pieces.insert_many(LPiece { rho: s.rho.clone(), twist: s.twist + shift, a: s.a }, m);
            }
        }
        LParameter { group: self.group, pieces }
    }

    /// Split `ψ = ψ_{nu,>0} + ψ_np + ψ_gp + ψ_np^∨ + ψ_{nu,>0}^∨`.
    ///
    /// From each contragredient pair outside good parity, the member with the
    /// smaller label goes to `np`; a self-dual summand of the wrong type
    /// contributes half its multiplicity.
    pub fn decompose(&self) -> Decomposition {
        let mut nu_pos = Vec::new();
        let mut np = Vec::new();
        let mut gp = MultiSet::new();
        for (s, m) in self.summands.iter() {
            if s.twist > Rational64::zero() {
                nu_pos.extend(std::iter::repeat_n(s.clone(), m));
            } else if s.twist.is_zero() {
                if s.is_good_parity_for(self.group) {
                    gp.insert_many(s.clone(), m);
                } else if s.rho.is_self_dual() {
                    np.extend(std::iter::repeat_n(s.clone(), m / 2));
                } else if s.rho.label() < s.rho.dual_label() {
                    np.extend(std::iter::repeat_n(s.clone(), m));
                }
            }
        }
        let removed: u32 = nu_pos.iter().chain(np.iter()).map(Summand::dim).sum();
        let group = self
            .group
            .with_big_n(self.group.big_n() - 2 * removed)
            .expect("removing dual pairs preserves the parity of N");
        Decomposition { nu_pos, np, gp: ArthurParameter { group, summands: gp } }
    }

    /// Characters of the component group; requires good parity.
    pub fn characters(&self) -> Result<CharacterTable, ParamError> {
        self.require_good_parity()?;
        Ok(CharacterTable::new(self.summands.iter().map(|(s, m)| (s.clone(), m)).collect()))
    }
}

impl fmt::Display for ArthurParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .summands
            .iter()
            .map(|(s, m)| if m == 1 { s.to_string() } else { format!("({s})^{m}") })
            .collect();
        write!(f, "{}: {}", self.group, if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
    }
}

/// Result of [`ArthurParameter::decompose`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub nu_pos: Vec<Summand>,
    pub np: Vec<Summand>,
    pub gp: ArthurParameter,
}

impl Decomposition {
    pub fn reassemble(&self, group: GroupTag) -> ArthurParameter {
        let mut summands = self.gp.summands.clone();
        for s in self.nu_pos.iter().chain(self.np.iter()) {
            summands.insert(s.clone());
            summands.insert(s.contragredient());
        }
        ArthurParameter { group, summands }
    }
}

/// One piece `ρ|·|^x ⊗ S_a` of an L-parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LPiece {
    pub rho: RhoSymbol,
    #[serde(with = "rational_serde")]
    pub twist: Rational64,
    pub a: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LParameter {
    pub group: GroupTag,
    pub pieces: MultiSet<LPiece>,
}

impl LParameter {
    pub fn dim(&self) -> u32 {
        self.pieces.iter().map(|(p, m)| p.rho.dim() * p.a * m as u32).sum()
    }

    pub fn is_tempered(&self) -> bool {
        self.pieces.iter().all(|(p, _)| p.twist.is_zero())
    }

    /// `φ ⊗ S_1` as an Arthur parameter.
    pub fn as_arthur_parameter(&self) -> ArthurParameter {
        ArthurParameter {
            group: self.group,
            summands: self.pieces.map(|p| Summand::new(p.rho.clone(), p.twist, p.a, 1)),
        }
    }
}

/// The characters `ε` of `Ŝ_ψ`: sign functions on the distinct summands whose
/// product over all summands (with multiplicity) is `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterTable {
    pub distinct: Vec<(Summand, usize)>,
    pub characters: Vec<Vec<Sign>>,
}

impl CharacterTable {
    pub fn new(distinct: Vec<(Summand, usize)>) -> Self {
        let multiplicities: Vec<usize> = distinct.iter().map(|(_, m)| *m).collect();
        let characters = CharacterIter::new(multiplicities).collect();
        CharacterTable { distinct, characters }
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    pub fn as_map(&self, index: usize) -> BTreeMap<Summand, Sign> {
        self.distinct
            .iter()
            .zip(&self.characters[index])
            .map(|((s, _), &e)| (s.clone(), e))
            .collect()
    }

    pub fn trivial_index(&self) -> usize {
        0
    }
}

/// Lazily enumerates the valid sign vectors for the given multiplicities, in
/// binary counting order (the trivial character first).
#[derive(Debug, Clone)]
pub struct CharacterIter {
    multiplicities: Vec<usize>,
    next: u64,
    end: u64,
}

impl CharacterIter {
    pub fn new(multiplicities: Vec<usize>) -> Self {
        assert!(multiplicities.len() < 63, "too many distinct summands");
        let end = 1u64 << multiplicities.len();
        CharacterIter { multiplicities, next: 0, end }
    }
}

impl Iterator for CharacterIter {
    type Item = Vec<Sign>;

    fn next(&mut self) -> Option<Vec<Sign>> {
        while self.next < self.end {
            let mask = self.next;
            self.next += 1;
            let signs: Vec<Sign> = (0..self.multiplicities.len())
                .map(|i| if mask >> i & 1 == 1 { Sign::Minus } else { Sign::Plus })
                .collect();
            let product: Sign = signs
                .iter()
                .zip(&self.multiplicities)
                .map(|(s, &m)| s.pow(m as i64))
                .product();
            if product == Sign::Plus {
                return Some(signs);
            }
        }
        None
    }
}

/// `1 ⊗ S_N ⊗ S_1`, the parameter of the Steinberg representation.
pub fn steinberg_parameter(group: GroupTag) -> ArthurParameter {
    ArthurParameter::new(group, [Summand::untwisted(RhoSymbol::trivial(), group.big_n(), 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r() -> RhoSymbol {
        RhoSymbol::trivial()
    }

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn validate_examples() {
        let p = ArthurParameter::new(GroupTag::sp(2), [Summand::untwisted(r(), 5, 1)]);
        assert_eq!(p.validate(), Ok(()));
        let p = ArthurParameter::new(GroupTag::sp(2), [Summand::untwisted(r(), 3, 1)]);
        assert_eq!(p.validate(), Err(ParamError::Dimension { expected: 5, found: 3 }));
        let p = ArthurParameter::new(GroupTag::so_odd(1), [Summand::new(r(), q(1, 4), 2, 1)]);
        assert!(matches!(p.validate(), Err(ParamError::NotClosed(..))));
        let p = ArthurParameter::new(GroupTag::so_odd(1), [Summand::new(r(), q(1, 2), 1, 1), Summand::new(r(), q(-1, 2), 1, 1)]);
        assert!(matches!(p.validate(), Err(ParamError::TwistOutOfRange(_))));
    }

    #[test]
    fn wrong_type_needs_even_multiplicity() {
        // ρ⊗S1⊗S1 is orthogonal, wrong type for SO(2n+1).
        let once = ArthurParameter::new(GroupTag::so_odd(1), [Summand::untwisted(r(), 1, 1), Summand::untwisted(RhoSymbol::unramified_character("u"), 1, 1)]);
        assert!(matches!(once.validate(), Err(ParamError::OddWrongType(_))));
        let twice = ArthurParameter::new(GroupTag::so_odd(1), [Summand::untwisted(r(), 1, 1), Summand::untwisted(r(), 1, 1)]);
        assert_eq!(twice.validate(), Ok(()));
        let d = twice.decompose();
        assert_eq!(d.np, vec![Summand::untwisted(r(), 1, 1)]);
        assert!(d.gp.summands.is_empty());
        assert_eq!(d.gp.group, GroupTag::so_odd(0));
    }

    #[test]
    fn good_parity_examples() {
        let sp = |a, b| ArthurParameter::new(GroupTag::sp(2), [Summand::untwisted(r(), a, b)]).is_good_parity();
        assert!(sp(5, 1));
        assert!(!sp(2, 1));
        let so = ArthurParameter::new(GroupTag::so_odd(1), [Summand::untwisted(r(), 2, 1)]);
        assert!(so.is_good_parity());
        let (s, t) = RhoSymbol::non_self_dual_pair("s", "t", 1);
        let p = ArthurParameter::new(GroupTag::sp(1), [Summand::untwisted(s, 1, 1), Summand::untwisted(t, 1, 1), Summand::untwisted(r(), 1, 1)]);
        assert!(!p.is_good_parity());
    }

    #[test]
    fn decompose_examples() {
        let g = GroupTag::sp(3);
        let p = ArthurParameter::new(
            g,
            [Summand::new(r(), q(1, 4), 2, 1), Summand::new(r(), q(-1, 4), 2, 1), Summand::untwisted(r(), 1, 3)],
        );
        assert_eq!(p.validate(), Ok(()));
        let d = p.decompose();
        assert_eq!(d.nu_pos, vec![Summand::new(r(), q(1, 4), 2, 1)]);
        assert!(d.np.is_empty());
        assert_eq!(d.gp, ArthurParameter::new(GroupTag::sp(1), [Summand::untwisted(r(), 1, 3)]));
        assert_eq!(d.reassemble(g), p);

        let (s, t) = RhoSymbol::non_self_dual_pair("s", "t", 1);
        let g = GroupTag::sp(3);
        let p = ArthurParameter::new(g, [Summand::untwisted(t, 1, 1), Summand::untwisted(s.clone(), 1, 1), Summand::untwisted(r(), 5, 1)]);
        assert_eq!(p.validate(), Ok(()));
        let d = p.decompose();
        assert_eq!(d.np, vec![Summand::untwisted(s, 1, 1)]);
        assert_eq!(d.gp.summands, [Summand::untwisted(r(), 5, 1)].into_iter().collect());
        assert_eq!(d.reassemble(g), p);

        let temp = steinberg_parameter(GroupTag::sp(2));
        let d = temp.decompose();
        assert!(d.nu_pos.is_empty() && d.np.is_empty());
        assert_eq!(d.gp, temp);
    }

    #[test]
    fn l_parameter_examples() {
        let g = GroupTag::sp(3);
        let lp = ArthurParameter::new(g, [Summand::untwisted(r(), 2, 3)]).l_parameter();
        let expect: MultiSet<_> = [1, 0, -1]
            .iter()
            .map(|&x| LPiece { rho: r(), twist: q(x, 1), a: 2 })
            .collect();
        assert_eq!(lp.pieces, expect);
        assert_eq!(lp.dim(), 6);

        let lp = ArthurParameter::new(g, [Summand::untwisted(r(), 4, 1)]).l_parameter();
        assert_eq!(lp.pieces, [LPiece { rho: r(), twist: q(0, 1), a: 4 }].into_iter().collect());

        let lp = ArthurParameter::new(g, [Summand::new(r(), q(1, 4), 1, 2)]).l_parameter();
        let expect: MultiSet<_> = [q(3, 4), q(-1, 4)]
            .into_iter()
            .map(|x| LPiece { rho: r(), twist: x, a: 1 })
            .collect();
        assert_eq!(lp.pieces, expect);
    }

    #[test]
    fn dual_parameter_swaps() {
        let g = GroupTag::sp(3);
        let p = ArthurParameter::new(g, [Summand::untwisted(r(), 2, 3), Summand::untwisted(r(), 1, 1)]);
        let d = p.dual_parameter();
        assert_eq!(d, ArthurParameter::new(g, [Summand::untwisted(r(), 3, 2), Summand::untwisted(r(), 1, 1)]));
        assert_eq!(d.dual_parameter(), p);
        let st = steinberg_parameter(GroupTag::sp(2)).dual_parameter();
        assert_eq!(st, ArthurParameter::new(GroupTag::sp(2), [Summand::untwisted(r(), 1, 5)]));
    }

    #[test]
    fn predicate_examples() {
        let g = GroupTag::sp(2);
        let p = ArthurParameter::new(g, [Summand::untwisted(r(), 5, 1)]).predicates();
        assert!(p.is_tempered && p.is_generic && !p.is_anti_generic);
        let p = ArthurParameter::new(GroupTag::sp(1), [Summand::untwisted(r(), 1, 3)]).predicates();
        assert!(p.is_anti_tempered && p.is_anti_generic && !p.is_generic);
        let p = ArthurParameter::new(
            GroupTag::sp(2),
            [Summand::new(r(), q(1, 4), 2, 1), Summand::new(r(), q(-1, 4), 2, 1), Summand::untwisted(r(), 1, 1)],
        )
        .predicates();
        assert!(p.is_generic && !p.is_tempered);
    }

    #[test]
    fn character_examples() {
        let g = GroupTag::sp(4);
        let p = ArthurParameter::new(g, [1, 3, 5].map(|a| Summand::untwisted(r(), a, 1)));
        let t = p.characters().unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.characters[t.trivial_index()], vec![Sign::Plus; 3]);

        let p = ArthurParameter::new(GroupTag::sp(3), [Summand::untwisted(r(), 3, 1), Summand::untwisted(r(), 3, 1), Summand::untwisted(r(), 1, 1)]);
        assert_eq!(p.characters().unwrap().len(), 2);

        let p = ArthurParameter::new(GroupTag::so_odd(1), [Summand::untwisted(r(), 2, 1)]);
        let t = p.characters().unwrap();
        assert_eq!(t.characters, vec![vec![Sign::Plus]]);

        let bad = ArthurParameter::new(GroupTag::sp(1), [Summand::untwisted(r(), 2, 1)]);
        assert!(bad.characters().is_err());
    }

    #[test]
    fn steinberg_examples() {
        let p = steinberg_parameter(GroupTag::sp(2));
        assert_eq!(p.summands.iter().next().unwrap().0.a, 5);
        assert!(p.is_good_parity());
        let p = steinberg_parameter(GroupTag::so_odd(2));
        assert_eq!(p.summands.iter().next().unwrap().0.a, 4);
        assert!(p.is_good_parity());
        assert_eq!(p.validate(), Ok(()));
    }
}
