//! Deciding whether a good-parity representation is of Arthur type, driven
//! by a pluggable highest-derivative oracle.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::arith::HalfInt;
use crate::classify::profile_of;
use crate::ems::{l_class, ExtendedMultiSegment};
use crate::ldata::{make_ldata, LData, TemperedData, TemperedPiece};
use crate::multiset::{Combine, MultiSet};
use crate::params::{ArthurParameter, Summand};
use crate::rho::{Exponent, RhoSymbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported input: {0}")]
pub struct UnsupportedInput(pub String);

/// Highest derivatives `D^{(k)}_{ρ|·|^x}(π)` and socles `S^{(k)}_{ρ|·|^x}(π)`
/// on some family of representations.
pub trait DerivativeOracle {
    fn name(&self) -> &'static str;

    /// Order `k` of the highest derivative and the derivative itself.
    fn highest_derivative(&self, pi: &LData, rho: &RhoSymbol, x: HalfInt) -> Result<(u32, LData), UnsupportedInput>;

    fn socle(&self, pi: &LData, rho: &RhoSymbol, x: HalfInt, k: u32) -> Result<LData, UnsupportedInput> {
        if k == 0 {
            return Ok(pi.clone());
        }
        Err(UnsupportedInput(format!("{} oracle has no socle at {rho}|.|^{x}", self.name())))
    }
}

fn regroup(pi: &LData, segments: Vec<crate::ldata::GlSegment>, phi: MultiSet<TemperedPiece>) -> Result<LData, UnsupportedInput> {
    let fail = |e: &dyn std::fmt::Display| UnsupportedInput(format!("derivative left the family: {e}"));
    let tdim: u32 = phi.iter().map(|(p, m)| p.rho.dim() * p.a * m as u32).sum();
    let sdim: u32 = segments.iter().map(|s| 2 * s.rho.dim() * s.length()).sum();
    let group = pi.group.with_big_n(tdim + sdim).ok_or_else(|| fail(&"dimension parity"))?;
    let tgroup = pi.group.with_big_n(tdim).ok_or_else(|| fail(&"dimension parity"))?;
    make_ldata(group, segments, TemperedData::trivial(tgroup, phi)).map_err(|e| fail(&e))
}

/// `π(φ, 1)` with `φ` of good parity: the order at `ρ|·|^z`, `z > 1/2`, is the
/// number of `ρ ⊗ S_{2z+1}` in `φ`, each of which becomes `ρ ⊗ S_{2z-1}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TemperedOracle;

impl TemperedOracle {
    fn check(pi: &LData) -> Result<(), UnsupportedInput> {
        if !pi.segments.is_empty() || !pi.tempered.eps_is_trivial() || !pi.tempered.is_good_parity() {
            return Err(UnsupportedInput("tempered oracle needs π(φ,1) with φ of good parity".into()));
        }
        Ok(())
    }
}

impl DerivativeOracle for TemperedOracle {
    fn name(&self) -> &'static str {
        "tempered"
    }

    fn highest_derivative(&self, pi: &LData, rho: &RhoSymbol, z: HalfInt) -> Result<(u32, LData), UnsupportedInput> {
        Self::check(pi)?;
        if z < HalfInt::ZERO {
            return Ok((0, pi.clone()));
        }
        if z <= HalfInt::HALF {
            return Err(UnsupportedInput(format!("tempered oracle needs z > 1/2, got {z}")));
        }
        let a = (2 * z.twice() / 2 + 1) as u32;
        let from = TemperedPiece::new(rho.clone(), a);
        let mut phi = pi.tempered.phi.clone();
        let k = phi.remove_many(&from, usize::MAX);
        if k == 0 {
            return Ok((0, pi.clone()));
        }
        phi.insert_many(TemperedPiece::new(rho.clone(), a - 2), k);
        Ok((k as u32, regroup(pi, Vec::new(), phi)?))
    }

    /// Defined when `φ` has at least `k` copies of `ρ ⊗ S_{2x-1}`; they become
    /// `ρ ⊗ S_{2x+1}`.
    fn socle(&self, pi: &LData, rho: &RhoSymbol, x: HalfInt, k: u32) -> Result<LData, UnsupportedInput> {
        Self::check(pi)?;
        if k == 0 {
            return Ok(pi.clone());
        }
        if x <= HalfInt::HALF {
            return Err(UnsupportedInput(format!("tempered socle needs x > 1/2, got {x}")));
        }
        let a = (x.twice() + 1) as u32;
        let (lower, upper) = (TemperedPiece::new(rho.clone(), a - 2), TemperedPiece::new(rho.clone(), a));
        let mut phi = pi.tempered.phi.clone();
        if phi.multiplicity(&lower) < k as usize {
            return Err(UnsupportedInput(format!("tempered socle at {rho}|.|^{x} is outside the closed form")));
        }
        phi.remove_many(&lower, k as usize);
        phi.insert_many(upper, k as usize);
        regroup(pi, Vec::new(), phi)
    }
}

/// Unramified-shaped data `L(Δ_ρ[-x,-x], ...; π(⊕ρ⊗S_1, ε))`: no positive
/// derivatives, and at `ρ|·|^{-x}` the order is `max(m_{ρ,x} - m_{ρ,x+1}, 0)`,
/// removing that many `Δ_ρ[-x,-x]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnramifiedOracle;

impl DerivativeOracle for UnramifiedOracle {
    fn name(&self) -> &'static str {
        "unramified"
    }

    fn highest_derivative(&self, pi: &LData, rho: &RhoSymbol, x: HalfInt) -> Result<(u32, LData), UnsupportedInput> {
        let profile = profile_of(pi).map_err(|w| UnsupportedInput(format!("unramified oracle: {w} has the wrong shape")))?;
        if x > HalfInt::ZERO {
            return Ok((0, pi.clone()));
        }
        if x.is_zero() {
            return Err(UnsupportedInput("unramified oracle is not defined at exponent 0".into()));
        }
        let y = -x;
        let k = profile.get(rho, y).saturating_sub(profile.get(rho, y + 1));
        if k == 0 {
            return Ok((0, pi.clone()));
        }
        let mut left = k;
        let segments = pi
            .segments
            .iter()
            .filter(|s| {
                let hit = left > 0 && s.rho == *rho && s.x == x;
                if hit {
                    left -= 1;
                }
                !hit
            })
            .cloned()
            .collect();
        Ok((k, regroup(pi, segments, pi.tempered.phi.clone())?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    NotArthurType { step: u8, witness: String },
    /// `ψ` produced by the bookkeeping, with membership left unverified.
    Candidate { psi: ArthurParameter, verified: bool },
    ArthurVia { psi: ArthurParameter, ems: ExtendedMultiSegment },
}

impl Verdict {
    pub fn is_arthur(&self) -> bool {
        matches!(self, Verdict::ArthurVia { .. })
    }
}

/// Tables keyed by `(ρ, i, t)`, plus the accumulators.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AlgoState {
    pub psi_acc: MultiSet<Summand>,
    pub omega_plus: MultiSet<Exponent>,
    pub omega_minus: MultiSet<Exponent>,
    #[serde(with = "crate::multiset::pairs")]
    pub k_table: BTreeMap<(String, usize, HalfInt), i64>,
    #[serde(with = "crate::multiset::pairs")]
    pub big_k_table: BTreeMap<(String, usize, HalfInt), i64>,
    #[serde(with = "crate::multiset::pairs")]
    pub k_bar_table: BTreeMap<(String, usize, HalfInt), i64>,
    #[serde(with = "crate::multiset::pairs")]
    pub big_k_bar_table: BTreeMap<(String, usize, HalfInt), i64>,
    #[serde(with = "crate::multiset::pairs")]
    pub m_table: BTreeMap<(String, HalfInt), i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgoReport {
    pub verdict: Verdict,
    pub state: AlgoState,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgoError {
    #[error("input is not of good parity")]
    NotGoodParity,
    #[error(transparent)]
    Unsupported(#[from] UnsupportedInput),
}

fn segment_exponents(top: HalfInt, bottom: HalfInt) -> impl Iterator<Item = HalfInt> {
    top.down_to(bottom)
}

fn summand(rho: &RhoSymbol, a2: HalfInt, b2: HalfInt) -> Summand {
    Summand::untwisted(rho.clone(), (a2.twice() / 2) as u32, (b2.twice() / 2) as u32)
}

fn stop(step: u8, witness: String, state: AlgoState) -> Result<AlgoReport, AlgoError> {
    Ok(AlgoReport { verdict: Verdict::NotArthurType { step, witness }, state })
}

/// Runs the Arthur-type test on `π` with the given oracle.
pub fn arthur_type_check(pi: &LData, oracle: &dyn DerivativeOracle) -> Result<AlgoReport, AlgoError> {
    if !pi.is_good_parity() {
        return Err(AlgoError::NotGoodParity);
    }
    let mut st = AlgoState::default();
    let omega_pi = pi.omega();
    for rho in pi.rhos() {
        let key = rho.label().to_string();
        let omega_rho = omega_pi.filter(|(r, _)| *r == rho);
        let Some(upper) = omega_rho.iter().map(|((_, x), _)| *x).max() else {
            continue;
        };
        let eps = if upper.is_integer() { HalfInt::ZERO } else { HalfInt::HALF };
        let mut omega_plus: MultiSet<Exponent> = MultiSet::new();
        let mut omega_minus: MultiSet<Exponent> = MultiSet::new();

        // Positive side.
        let mut starts = Vec::new();
        for b in (upper + 1).down_to(HalfInt::ONE - eps) {
            if b > HalfInt::HALF && oracle.highest_derivative(pi, &rho, b)?.0 > 0 {
                starts.push(b);
            }
        }
        let mut prev: BTreeMap<HalfInt, i64> = BTreeMap::new();
        for (i, &b) in starts.iter().enumerate() {
            let mut k: BTreeMap<HalfInt, i64> = BTreeMap::new();
            let mut cur = pi.clone();
            for t in (upper + 1).down_to(b).collect::<Vec<_>>().into_iter().rev() {
                let (order, next) = oracle.highest_derivative(&cur, &rho, t)?;
                k.insert(t, i64::from(order));
                st.k_table.insert((key.clone(), i + 1, t), i64::from(order));
                cur = next;
            }
            if k[&(upper + 1)] != 0 {
                return stop(2, format!("k({},{}) != 0 for {rho}", i + 1, upper + 1), st);
            }
            let big_k = |t: HalfInt| k.get(&t).copied().unwrap_or(0) - prev.get(&t).copied().unwrap_or(0);
            for t in (upper + 1).down_to(b) {
                st.big_k_table.insert((key.clone(), i + 1, t), big_k(t));
            }
            for t in (upper + 1).down_to(b + 1).collect::<Vec<_>>().into_iter().rev() {
                let (now, before) = (big_k(t), big_k(t - 1));
                if now > before {
                    return stop(2, format!("K({},{t}) = {now} > K({},{}) = {before} for {rho}", i + 1, i + 1, t - 1), st);
                }
                let copies = (before - now) as usize;
                if copies > 0 {
                    st.psi_acc.insert_many(summand(&rho, t - 1 + b + 1, t - 1 - b + 1), copies);
                    for x in segment_exponents(t - 1, b) {
                        omega_plus.insert_many((rho.clone(), x), copies);
                    }
                }
            }
            for (t, v) in k {
                *prev.entry(t).or_insert(0) = v;
            }
            prev.retain(|t, _| *t >= b);
        }

        // Socle shift, then the negative side.
        let mut shifted = pi.clone();
        let plus_sorted: Vec<HalfInt> = omega_plus.iter_expanded().map(|(_, x)| *x).collect();
        for t in 1..=(upper + eps).floor() {
            for &x in plus_sorted.iter().rev() {
                shifted = oracle.socle(&shifted, &rho, x + t, 1)?;
            }
        }
        let mut starts = Vec::new();
        for b in (-eps).down_to(-upper - 1) {
            if b < HalfInt::ZERO && oracle.highest_derivative(&shifted, &rho, b)?.0 > 0 {
                starts.push(b);
            }
        }
        starts.sort();
        let mut prev: BTreeMap<HalfInt, i64> = BTreeMap::new();
        for (i, &b) in starts.iter().enumerate() {
            let mut k: BTreeMap<HalfInt, i64> = BTreeMap::new();
            let mut cur = shifted.clone();
            for t in b.down_to(-upper - 1) {
                let (order, next) = oracle.highest_derivative(&cur, &rho, t)?;
                k.insert(t, i64::from(order));
                st.k_bar_table.insert((key.clone(), i + 1, t), i64::from(order));
                cur = next;
            }
            if k[&(-upper - 1)] != 0 {
                return stop(3, format!("k̄({},{}) != 0 for {rho}", i + 1, -upper - 1), st);
            }
            let big_k = |t: HalfInt| k.get(&t).copied().unwrap_or(0) - prev.get(&t).copied().unwrap_or(0);
            for t in b.down_to(-upper - 1) {
                st.big_k_bar_table.insert((key.clone(), i + 1, t), big_k(t));
            }
            for t in (b - 1).down_to(-upper - 1) {
                let (now, before) = (big_k(t), big_k(t + 1));
                if now > before {
                    return stop(3, format!("K̄({},{t}) = {now} > K̄({},{}) = {before} for {rho}", i + 1, i + 1, t + 1), st);
                }
                let copies = (before - now) as usize;
                if copies > 0 {
                    let top = -(t + 1);
                    st.psi_acc.insert_many(summand(&rho, top + b + 1, top - b + 1), copies);
                    for x in segment_exponents(top, b) {
                        omega_minus.insert_many((rho.clone(), x), copies);
                    }
                }
            }
            for (t, v) in k {
                *prev.entry(t).or_insert(0) = v;
            }
            prev.retain(|t, _| *t <= b);
        }

        // Balance what the segments found so far do not account for.
        let omega = omega_plus.combine(Combine::Sum, &omega_minus);
        let extra = omega.combine(Combine::Diff, &omega_rho);
        let missing = omega_rho.combine(Combine::Diff, &omega);
        let m1 = |t: HalfInt| extra.multiplicity(&(rho.clone(), t)) as i64;
        let m2 = |t: HalfInt| missing.multiplicity(&(rho.clone(), t)) as i64;
        let big_m = |t: HalfInt| (m1(-t - 1) - m1(t)) + m2(t);
        for t in (upper + 1).down_to(eps) {
            st.m_table.insert((key.clone(), t), big_m(t));
        }
        for t in (upper + 1).down_to(eps + 1) {
            let (now, before) = (big_m(t), big_m(t - 1));
            if now > before {
                return stop(4, format!("M({t}) = {now} > M({}) = {before} for {rho}", t - 1), st);
            }
            let copies = (before - now) as usize;
            if copies > 0 {
                st.psi_acc.insert_many(summand(&rho, t - 1 + eps + 1, t - 1 - eps + 1), copies);
            }
        }
        st.omega_plus = st.omega_plus.combine(Combine::Sum, &omega_plus);
        st.omega_minus = st.omega_minus.combine(Combine::Sum, &omega_minus);
    }

    // Membership.
    let psi = ArthurParameter { group: pi.group, summands: st.psi_acc.clone() };
    if let Err(e) = psi.validate().and_then(|_| psi.require_good_parity()) {
        return stop(5, format!("accumulated parameter is invalid: {e}"), st);
    }
    let classes = l_class(&psi).map_err(|e| UnsupportedInput(e.to_string()))?;
    for e in classes {
        if e.pi_of_l().is_ok_and(|l| l == *pi) {
            return Ok(AlgoReport { verdict: Verdict::ArthurVia { psi, ems: e }, state: st });
        }
    }
    if psi.predicates().is_tempered {
        return stop(5, format!("not in the tempered packet of {psi}"), st);
    }
    Ok(AlgoReport { verdict: Verdict::Candidate { psi, verified: false }, state: st })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_unramified, UnramifiedVerdict};
    use crate::ldata::GlSegment;
    use crate::params::GroupTag;
    use crate::rho::Sign;

    fn r() -> RhoSymbol {
        RhoSymbol::trivial()
    }

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn tempered(group: GroupTag, a: &[u32]) -> LData {
        let phi = a.iter().map(|&a| TemperedPiece::new(r(), a)).collect();
        LData::tempered(TemperedData::trivial(group, phi))
    }

    fn unram(group: GroupTag, segs: &[i64], tgroup: GroupTag, ones: usize) -> LData {
        let segs = segs.iter().map(|&t| GlSegment::steinberg(r(), h(t), h(t)).unwrap()).collect();
        let mut phi = MultiSet::new();
        phi.insert_many(TemperedPiece::new(r(), 1), ones);
        make_ldata(group, segs, TemperedData::trivial(tgroup, phi)).unwrap()
    }

    #[test]
    fn tempered_oracle_examples() {
        let pi = tempered(GroupTag::sp(6), &[5, 5, 3]);
        let (k, out) = TemperedOracle.highest_derivative(&pi, &r(), h(4)).unwrap();
        assert_eq!(k, 2);
        assert_eq!(out.tempered.phi, [3, 3, 3].iter().map(|&a| TemperedPiece::new(r(), a)).collect());
        assert_eq!(out.group, GroupTag::sp(4));

        let (k, out) = TemperedOracle.highest_derivative(&pi, &r(), h(6)).unwrap();
        assert_eq!((k, out), (0, pi));

        let pi = tempered(GroupTag::sp(1), &[3]);
        let (k, out) = TemperedOracle.highest_derivative(&pi, &r(), h(2)).unwrap();
        assert_eq!(k, 1);
        assert_eq!(out, tempered(GroupTag::sp(0), &[1]));
        assert_eq!(TemperedOracle.socle(&out, &r(), h(2), 1).unwrap(), pi);
    }

    #[test]
    fn unramified_oracle_examples() {
        let pi = unram(GroupTag::sp(1), &[-2], GroupTag::sp(0), 1);
        let (k, out) = UnramifiedOracle.highest_derivative(&pi, &r(), h(-2)).unwrap();
        assert_eq!(k, 1);
        assert_eq!(out, unram(GroupTag::sp(0), &[], GroupTag::sp(0), 1));
        assert_eq!(UnramifiedOracle.highest_derivative(&pi, &r(), h(2)).unwrap().0, 0);

        let pi = unram(GroupTag::sp(1), &[-4], GroupTag::sp(0), 1);
        assert_eq!(UnramifiedOracle.highest_derivative(&pi, &r(), h(-4)).unwrap().0, 1);
        assert!(UnramifiedOracle.socle(&pi, &r(), h(2), 1).is_err());
    }

    #[test]
    fn unramified_accepted() {
        let pi = unram(GroupTag::sp(1), &[-2], GroupTag::sp(0), 1);
        let report = arthur_type_check(&pi, &UnramifiedOracle).unwrap();
        let Verdict::ArthurVia { psi, ems } = report.verdict else { panic!("{:?}", report.verdict) };
        assert_eq!(psi.summands, [Summand::untwisted(r(), 1, 3)].into_iter().collect());
        let UnramifiedVerdict::Accepted(expected) = classify_unramified(&pi).unwrap() else { panic!() };
        assert!(ems.weak_equivalent(&expected));
    }

    #[test]
    fn unramified_rejected_at_balance_step() {
        let pi = unram(GroupTag::sp(1), &[-4], GroupTag::sp(0), 1);
        let report = arthur_type_check(&pi, &UnramifiedOracle).unwrap();
        assert!(matches!(report.verdict, Verdict::NotArthurType { step: 4, .. }), "{:?}", report.verdict);
    }

    #[test]
    fn trivial_of_so3() {
        let pi = unram(GroupTag::so_odd(1), &[-1], GroupTag::so_odd(0), 0);
        let report = arthur_type_check(&pi, &UnramifiedOracle).unwrap();
        let Verdict::ArthurVia { psi, .. } = report.verdict else { panic!("{:?}", report.verdict) };
        assert_eq!(psi.summands, [Summand::untwisted(r(), 1, 2)].into_iter().collect());
    }

    #[test]
    fn tempered_inputs() {
        for (g, a) in [(GroupTag::sp(2), vec![5]), (GroupTag::sp(4), vec![1, 3, 5]), (GroupTag::so_odd(3), vec![2, 4])] {
            let pi = tempered(g, &a);
            let report = arthur_type_check(&pi, &TemperedOracle).unwrap();
            let Verdict::ArthurVia { psi, .. } = report.verdict else { panic!("{:?}", report.verdict) };
            let expect: MultiSet<_> = a.iter().map(|&a| Summand::untwisted(r(), a, 1)).collect();
            assert_eq!(psi.summands, expect);
        }
    }

    #[test]
    fn nontrivial_character_is_unsupported_for_tempered_oracle() {
        let phi: MultiSet<_> = [1, 3, 5].iter().map(|&a| TemperedPiece::new(r(), a)).collect();
        let eps = [(1, Sign::Plus), (3, Sign::Minus), (5, Sign::Minus)]
            .iter()
            .map(|&(a, s)| (TemperedPiece::new(r(), a), s))
            .collect();
        let pi = LData::tempered(TemperedData::new(GroupTag::sp(4), phi, eps).unwrap());
        assert!(matches!(arthur_type_check(&pi, &TemperedOracle), Err(AlgoError::Unsupported(_))));
    }
}
