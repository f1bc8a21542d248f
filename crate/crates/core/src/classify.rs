//! Decision procedures: tempered singletons, tempered packets, generic
//! members, and unramified representations of Arthur type.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arith::HalfInt;
use crate::ems::{EmsError, ExtendedMultiSegment, ExtendedSegment};
use crate::ldata::{LData, LDataError, MultiplicityProfile, TemperedData, TemperedPiece};
use crate::multiset::MultiSet;
use crate::params::{ArthurParameter, CharacterIter, GroupTag, LParameter, ParamError};
use crate::rho::{RhoSymbol, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("input is not of good parity")]
    NotGoodParity,
    #[error("L-parameter is not tempered")]
    NotTempered,
    #[error("rho `{0}` is not an unramified character")]
    NotUnramified(String),
    #[error(transparent)]
    Ems(#[from] EmsError),
    #[error(transparent)]
    LData(#[from] LDataError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Whether `π(φ, ε)` lies in exactly one local Arthur packet: no
/// `ρ⊗S_a, ρ⊗S_{a+2}` with `ε` product `-1`, and no `ρ⊗S_2` with `ε = -1`.
pub fn tempered_singleton(t: &TemperedData) -> Result<bool, ClassifyError> {
    if !t.is_good_parity() {
        return Err(ClassifyError::NotGoodParity);
    }
    let eps = |p: &TemperedPiece| t.eps[p];
    for (p, _) in t.phi.iter() {
        let next = TemperedPiece::new(p.rho.clone(), p.a + 2);
        if t.phi.multiplicity(&next) > 0 && eps(p) * eps(&next) == Sign::Minus {
            return Ok(false);
        }
        if p.a == 2 && eps(p) == Sign::Minus {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PacketMember {
    pub data: TemperedData,
    pub generic: bool,
}

/// One member per character of the component group; the trivial character
/// is the generic member.
pub fn tempered_packet(phi: &LParameter) -> Result<Vec<PacketMember>, ClassifyError> {
    if !phi.is_tempered() {
        return Err(ClassifyError::NotTempered);
    }
    let pieces: MultiSet<TemperedPiece> = phi.pieces.map(|p| TemperedPiece::new(p.rho.clone(), p.a));
    if !pieces.iter().all(|(p, _)| p.is_good_parity_for(phi.group)) {
        return Err(ClassifyError::NotGoodParity);
    }
    let distinct: Vec<(TemperedPiece, usize)> = pieces.iter().map(|(p, m)| (p.clone(), m)).collect();
    let mults = distinct.iter().map(|(_, m)| *m).collect();
    let mut out = Vec::new();
    for signs in CharacterIter::new(mults) {
        let eps: BTreeMap<_, _> = distinct.iter().map(|(p, _)| p.clone()).zip(signs).collect();
        let generic = eps.values().all(|&s| s == Sign::Plus);
        let data = TemperedData::new(phi.group, pieces.clone(), eps)?;
        out.push(PacketMember { data, generic });
    }
    Ok(out)
}

/// Whether the packet of `ψ` contains a generic member: exactly when `ψ` is generic.
pub fn has_generic_member(psi: &ArthurParameter) -> bool {
    psi.predicates().is_generic
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnramifiedCondition {
    /// Segment shape, tempered `S_1` pieces, unramified `ρ`.
    #[serde(rename = "(i)")]
    Shape,
    /// `m_{ρ,x+1} <= m_{ρ,x}`.
    #[serde(rename = "(ii)")]
    Monotone,
    /// `ε` trivial.
    #[serde(rename = "(iii)")]
    TrivialCharacter,
}

impl fmt::Display for UnramifiedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnramifiedCondition::Shape => "(i)",
            UnramifiedCondition::Monotone => "(ii)",
            UnramifiedCondition::TrivialCharacter => "(iii)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub condition: UnramifiedCondition,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum UnramifiedVerdict {
    Accepted(ExtendedMultiSegment),
    Rejected(Rejection),
}

/// `m_{ρ,x}` of data satisfying the shape condition, or the offending item.
pub fn profile_of(pi: &LData) -> Result<MultiplicityProfile, String> {
    let mut profile = MultiplicityProfile::default();
    for s in &pi.segments {
        if s.x != s.y || !s.rho.is_unramified() {
            return Err(s.to_string());
        }
        let x = -s.x;
        profile.set(&s.rho, x, profile.get(&s.rho, x) + 1);
    }
    for (p, m) in pi.tempered.phi.iter() {
        if p.a != 1 || !p.rho.is_unramified() {
            return Err(p.to_string());
        }
        profile.set(&p.rho, HalfInt::ZERO, profile.get(&p.rho, HalfInt::ZERO) + m as u32);
    }
    Ok(profile)
}

/// Rows `([x,-x]_ρ, ⌊x+1/2⌋, +1)` with multiplicity `m_{ρ,x} - m_{ρ,x+1}`,
/// in canonical order (largest `x` first).
pub fn unramified_ems(group: GroupTag, profile: &MultiplicityProfile) -> Result<ExtendedMultiSegment, ClassifyError> {
    let mut rows = Vec::new();
    for (rho, counts) in &profile.counts {
        for (&x, &m) in counts.iter().rev() {
            let next = profile.get(rho, x + 1);
            for _ in next..m {
                let l = (x + HalfInt::HALF).floor() as u32;
                rows.push(ExtendedSegment::new(rho.clone(), x, -x, l, Sign::Plus)?);
            }
        }
    }
    Ok(ExtendedMultiSegment::from_rows(group, rows))
}

/// Decides whether `π` is unramified and of Arthur type.
pub fn classify_unramified(pi: &LData) -> Result<UnramifiedVerdict, ClassifyError> {
    if !pi.is_good_parity() {
        return Err(ClassifyError::NotGoodParity);
    }
    let reject = |condition, witness: String| Ok(UnramifiedVerdict::Rejected(Rejection { condition, witness }));
    let profile = match profile_of(pi) {
        Ok(p) => p,
        Err(w) => return reject(UnramifiedCondition::Shape, w),
    };
    if let Some((rho, x)) = profile.first_increase() {
        let w = format!("m({rho},{}) = {} > m({rho},{x}) = {}", x + 1, profile.get(&rho, x + 1), profile.get(&rho, x));
        return reject(UnramifiedCondition::Monotone, w);
    }
    if let Some((p, s)) = pi.tempered.eps.iter().find(|(_, &s)| s == Sign::Minus) {
        return reject(UnramifiedCondition::TrivialCharacter, format!("eps({p}) = {s}"));
    }
    Ok(UnramifiedVerdict::Accepted(unramified_ems(pi.group, &profile)?))
}

/// The singleton `Ψ(π) = {ψ}` of an accepted unramified `π`, with the
/// evidence that `ψ` is anti-generic and the dual is a tempered singleton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnramifiedCertificate {
    pub psi: ArthurParameter,
    pub ems: ExtendedMultiSegment,
    pub dual_ems: ExtendedMultiSegment,
    pub dual_tempered: TemperedData,
    pub dual_is_tempered_shape: bool,
    pub singleton: bool,
    pub anti_generic: bool,
    /// `+1` when `ρ ⊗ S_2` has the dual group's type, `-1` otherwise.
    #[serde(with = "crate::multiset::pairs")]
    pub literal_rule_eps: BTreeMap<RhoSymbol, Sign>,
}

impl UnramifiedCertificate {
    pub fn passes(&self) -> bool {
        self.dual_is_tempered_shape && self.singleton && self.anti_generic
    }
}

pub fn unramified_parameter_set(pi: &LData) -> Result<Option<UnramifiedCertificate>, ClassifyError> {
    let UnramifiedVerdict::Accepted(ems) = classify_unramified(pi)? else {
        return Ok(None);
    };
    let psi = ems.parameter()?;
    let dual_ems = ems.dual()?;
    let dual_is_tempered_shape = dual_ems.all_rows().all(|r| r.upper() == r.lower());
    let dual_tempered = dual_ems.pi_of_l()?.tempered;
    let singleton = tempered_singleton(&dual_tempered)?;
    let anti_generic = psi.predicates().is_anti_generic;
    let literal_rule_eps = ems
        .rows
        .keys()
        .map(|rho| {
            let s = if rho.tensor_type(2, 1) == pi.group.dual_type() { Sign::Plus } else { Sign::Minus };
            (rho.clone(), s)
        })
        .collect();
    Ok(Some(UnramifiedCertificate {
        psi,
        ems,
        dual_ems,
        dual_tempered,
        dual_is_tempered_shape,
        singleton,
        anti_generic,
        literal_rule_eps,
    }))
}

/// The unramified member of the packet of `ψ`, if any. It exists exactly
/// when `ψ` is anti-tempered.
pub fn unramified_member(psi: &ArthurParameter) -> Result<Option<LData>, ClassifyError> {
    psi.require_good_parity().map_err(|_| ClassifyError::NotGoodParity)?;
    if let Some((s, _)) = psi.summands.iter().find(|(s, _)| !s.rho.is_unramified()) {
        return Err(ClassifyError::NotUnramified(s.rho.to_string()));
    }
    if !psi.predicates().is_anti_generic {
        return Ok(None);
    }
    let mut profile = MultiplicityProfile::default();
    for (s, m) in psi.summands.iter() {
        let top = s.lower().abs();
        for x in top.down_to(HalfInt::from_twice(top.twice() % 2)) {
            profile.set(&s.rho, x, profile.get(&s.rho, x) + m as u32);
        }
    }
    let ems = unramified_ems(psi.group, &profile)?;
    debug_assert_eq!(ems.parameter_unchecked(), *psi);
    Ok(Some(ems.pi_of_l()?))
}
