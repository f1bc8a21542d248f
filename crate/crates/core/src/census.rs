//! Exhaustive small-rank enumeration of good-parity parameters, extended
//! multi-segments and unramified profiles.

use crate::arith::HalfInt;
use crate::ems::{ExtendedMultiSegment, ExtendedSegment};
use crate::ldata::{LData, MultiplicityProfile};
use crate::params::{ArthurParameter, Family, GroupTag, Summand};
use crate::rho::{Parity, RhoSymbol, Sign};

/// Rank caps for the census. `ARTHURKIT_MAX_N` overrides the single-`ρ` cap,
/// and the two-`ρ` cap follows two below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusConfig {
    pub max_n_one: u32,
    pub max_n_two: u32,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig { max_n_one: 9, max_n_two: 7 }
    }
}

impl CensusConfig {
    pub fn from_env() -> Self {
        match std::env::var("ARTHURKIT_MAX_N").ok().and_then(|v| v.trim().parse::<u32>().ok()) {
            Some(n) => CensusConfig { max_n_one: n, max_n_two: n.saturating_sub(2) },
            None => CensusConfig::default(),
        }
    }
}

fn candidates(group: GroupTag, rhos: &[RhoSymbol]) -> Vec<Summand> {
    let big_n = group.big_n();
    let mut out = Vec::new();
    for rho in rhos.iter().filter(|r| r.is_self_dual()) {
        for a in 1..=big_n {
            for b in 1..=big_n {
                let s = Summand::untwisted(rho.clone(), a, b);
                if s.dim() <= big_n && s.is_good_parity_for(group) {
                    out.push(s);
                }
            }
        }
    }
    out
}

/// All multi-sets of at most `max_rows` good-parity summands on the given
/// `ρ` whose dimensions add up to `N`.
pub fn enumerate_good_parity(group: GroupTag, rhos: &[RhoSymbol], max_rows: usize) -> Vec<ArthurParameter> {
    let cands = candidates(group, rhos);
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fill(&cands, 0, group.big_n(), max_rows, &mut chosen, &mut |picked| {
        let psi = ArthurParameter::new(group, picked.iter().map(|&i| cands[i].clone()));
        if psi.validate().is_ok() {
            out.push(psi);
        }
    });
    out
}

fn fill(cands: &[Summand], start: usize, left: u32, rows: usize, chosen: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if left == 0 {
        if !chosen.is_empty() {
            emit(chosen);
        }
        return;
    }
    if rows == 0 {
        return;
    }
    for i in start..cands.len() {
        let d = cands[i].dim();
        if d <= left {
            chosen.push(i);
            fill(cands, i, left - d, rows - 1, chosen, emit);
            chosen.pop();
        }
    }
}

/// All extended multi-segments with support `supp(ψ)`, rows in `(B, A)`
/// order, `0 <= l <= b/2`, and `η` varied only where it matters, that
/// satisfy the sign condition.
pub fn enumerate_ems(psi: &ArthurParameter) -> Vec<ExtendedMultiSegment> {
    let mut base: Vec<(RhoSymbol, HalfInt, HalfInt)> =
        psi.summands.iter_expanded().map(|s| (s.rho.clone(), s.lower(), s.upper())).collect();
    base.sort();
    let mut out = Vec::new();
    let mut rows = Vec::with_capacity(base.len());
    extend_rows(psi.group, &base, &mut rows, &mut out);
    out
}

fn extend_rows(
    group: GroupTag,
    base: &[(RhoSymbol, HalfInt, HalfInt)],
    rows: &mut Vec<ExtendedSegment>,
    out: &mut Vec<ExtendedMultiSegment>,
) {
    let Some((rho, lower, upper)) = base.get(rows.len()) else {
        let e = ExtendedMultiSegment::from_rows(group, rows.iter().cloned());
        if e.sign_condition() {
            out.push(e);
        }
        return;
    };
    let b = ((*upper - *lower).twice() / 2 + 1) as u32;
    for l in 0..=b / 2 {
        let etas: &[Sign] = if 2 * l < b { &[Sign::Plus, Sign::Minus] } else { &[Sign::Plus] };
        for &eta in etas {
            let row = ExtendedSegment::new(rho.clone(), *upper, *lower, l, eta).expect("support row");
            rows.push(row);
            extend_rows(group, base, rows, out);
            rows.pop();
        }
    }
}

/// Total dual-group dimension, computed from the raw data of each kind.
pub trait DimensionAudit {
    fn dimension_audit(&self) -> u32;
}

impl DimensionAudit for ArthurParameter {
    fn dimension_audit(&self) -> u32 {
        self.summands.iter().map(|(s, m)| s.rho.dim() * s.a * s.b * m as u32).sum()
    }
}

impl DimensionAudit for LData {
    fn dimension_audit(&self) -> u32 {
        let segs: u32 = self.segments.iter().map(|s| 2 * s.rho.dim() * s.length()).sum();
        let temp: u32 = self.tempered.phi.iter().map(|(p, m)| p.rho.dim() * p.a * m as u32).sum();
        segs + temp
    }
}

/// Counts `l` segments of length `a` twice each, plus a tempered block of
/// dimension `a` when `b` is odd.
impl DimensionAudit for ExtendedMultiSegment {
    fn dimension_audit(&self) -> u32 {
        self.all_rows().map(|r| r.rho().dim() * r.a() * (2 * r.l + r.b() % 2)).sum()
    }
}

/// The `ρ` used by the census.
pub fn census_rhos() -> (RhoSymbol, RhoSymbol, RhoSymbol) {
    (
        RhoSymbol::trivial(),
        RhoSymbol::unramified_character("u"),
        RhoSymbol::self_dual("s", 2, Parity::Symplectic),
    )
}

/// Groups with `N <= max_n` of both families.
pub fn census_groups(max_n: u32) -> Vec<GroupTag> {
    let mut out = Vec::new();
    for n in 1.. {
        let (sp, so) = (GroupTag::sp(n), GroupTag::so_odd(n));
        if so.big_n() > max_n {
            break;
        }
        out.push(so);
        if sp.big_n() <= max_n {
            out.push(sp);
        }
    }
    out
}

/// The good-parity census: one `ρ` up to `max_n_one`, and two `ρ` (each
/// actually occurring) up to `max_n_two`.
pub fn census_parameters(config: CensusConfig) -> Vec<ArthurParameter> {
    let (t, u, s) = census_rhos();
    let mut out = Vec::new();
    for single in [&t, &s] {
        for g in census_groups(config.max_n_one) {
            out.extend(enumerate_good_parity(g, std::slice::from_ref(single), usize::MAX));
        }
    }
    for pair in [[t.clone(), u.clone()], [t.clone(), s.clone()]] {
        for g in census_groups(config.max_n_two) {
            out.extend(
                enumerate_good_parity(g, &pair, usize::MAX)
                    .into_iter()
                    .filter(|p| pair.iter().all(|r| p.summands.iter().any(|(x, _)| x.rho == *r))),
            );
        }
    }
    out
}

/// The exponents `0, 1, 2, ...` (`Sp`) or `1/2, 3/2, ...` (`SO_{2n+1}`).
fn profile_points(family: Family, count: u32) -> Vec<HalfInt> {
    let start = match family {
        Family::Sp => 0,
        Family::SOodd => 1,
    };
    (0..count as i64).map(|i| HalfInt::from_twice(start + 2 * i)).collect()
}

fn profile_group(family: Family, profile: &MultiplicityProfile) -> Option<GroupTag> {
    let big_n: u32 = profile
        .counts
        .iter()
        .flat_map(|(rho, row)| row.iter().map(move |(x, m)| rho.dim() * m * if x.is_zero() { 1 } else { 2 }))
        .sum();
    let probe = match family {
        Family::Sp => GroupTag::sp(0),
        Family::SOodd => GroupTag::so_odd(0),
    };
    probe.with_big_n(big_n).filter(|g| g.n > 0)
}

fn profile_from(rho: &RhoSymbol, points: &[HalfInt], values: &[u32]) -> MultiplicityProfile {
    let mut p = MultiplicityProfile::default();
    for (&x, &m) in points.iter().zip(values) {
        p.set(rho, x, m);
    }
    p
}

fn all_value_vectors(len: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| (0..=max).map(move |m| {
                let mut w = v.clone();
                w.push(m);
                w
            }))
            .collect();
    }
    out
}

/// Nonincreasing single-`ρ` profiles on four points with values at most 3,
/// each with the group its dimension lands in. Profiles whose dimension fits
/// no group of the family are skipped.
pub fn unramified_profiles(family: Family) -> Vec<(GroupTag, MultiplicityProfile)> {
    let rho = RhoSymbol::trivial();
    let points = profile_points(family, 4);
    all_value_vectors(points.len(), 3)
        .into_iter()
        .filter(|v| v.windows(2).all(|w| w[0] >= w[1]))
        .filter_map(|v| {
            let p = profile_from(&rho, &points, &v);
            profile_group(family, &p).map(|g| (g, p))
        })
        .collect()
}

/// Profiles from [`unramified_profiles`] with one unit added at `x+1` where
/// `m_x = m_{x+1}`, so that exactly one increase appears.
pub fn perturbed_profiles(family: Family) -> Vec<(GroupTag, MultiplicityProfile, (RhoSymbol, HalfInt))> {
    let rho = RhoSymbol::trivial();
    let points = profile_points(family, 5);
    let mut out = Vec::new();
    for (_, base) in unramified_profiles(family) {
        for w in points.windows(2) {
            let (x, y) = (w[0], w[1]);
            if base.get(&rho, x) != base.get(&rho, y) {
                continue;
            }
            let mut p = base.clone();
            p.set(&rho, y, base.get(&rho, y) + 1);
            if let Some(g) = profile_group(family, &p) {
                out.push((g, p, (rho.clone(), x)));
            }
        }
    }
    out
}
