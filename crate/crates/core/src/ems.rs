//! Extended multi-segments `E = ∪_ρ {([A_i,B_i]_ρ, l_i, η_i)}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::HalfInt;
use crate::ldata::{make_ldata, GlSegment, LData, LDataError, TemperedData, TemperedPiece};
use crate::multiset::MultiSet;
use crate::params::{ArthurParameter, GroupTag, ParamError, Summand};
use crate::rho::{RhoSymbol, Segment, SegmentError, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmsError {
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error("row {0}: A + B must be non-negative")]
    NegativeSum(String),
    #[error("row {0}: l must satisfy 0 <= l <= b/2")]
    LOutOfRange(String),
    #[error("row {row} is filed under rho `{key}`")]
    RhoMismatch { row: String, key: String },
    #[error("rows for `{0}` are not in an admissible order ({1})")]
    Order(String, OrderMode),
    #[error("sign condition fails")]
    SignCondition,
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    LData(#[from] LDataError),
    #[error("extended multi-segment does not satisfy (L)")]
    NotL,
    #[error("dual of row {0} leaves the range 0 <= l <= b/2")]
    DualOutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderMode {
    /// `A_i > A_j` and `B_i > B_j` imply `i > j`.
    P,
    /// `B_i > B_j` implies `i > j`.
    Pprime,
}

impl fmt::Display for OrderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderMode::P => "P",
            OrderMode::Pprime => "P'",
        })
    }
}

/// One row `([A,B]_ρ, l, η)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtendedSegment {
    pub seg: Segment,
    pub l: u32,
    pub eta: Sign,
}

impl ExtendedSegment {
    pub fn new(rho: RhoSymbol, upper: HalfInt, lower: HalfInt, l: u32, eta: Sign) -> Result<Self, EmsError> {
        let row = ExtendedSegment { seg: Segment::new(rho, upper, lower)?, l, eta };
        row.check()?;
        Ok(row)
    }

    fn check(&self) -> Result<(), EmsError> {
        if self.upper() + self.lower() < HalfInt::ZERO {
            return Err(EmsError::NegativeSum(self.to_string()));
        }
        if 2 * self.l > self.b() {
            return Err(EmsError::LOutOfRange(self.to_string()));
        }
        Ok(())
    }

    pub fn rho(&self) -> &RhoSymbol {
        &self.seg.rho
    }

    pub fn upper(&self) -> HalfInt {
        self.seg.top
    }

    pub fn lower(&self) -> HalfInt {
        self.seg.bottom
    }

    /// `A - B + 1`.
    pub fn b(&self) -> u32 {
        self.seg.length()
    }

    /// `A + B + 1`.
    pub fn a(&self) -> u32 {
        ((self.upper() + self.lower()).twice() / 2 + 1) as u32
    }

    /// Whether `η` carries information (`l < b/2`).
    pub fn eta_matters(&self) -> bool {
        2 * self.l < self.b()
    }

    pub fn summand(&self) -> Summand {
        Summand::untwisted(self.rho().clone(), self.a(), self.b())
    }

    /// The factor `(-1)^{⌊b/2⌋ + l} η^b` of the sign condition.
    pub fn sign_factor(&self) -> Sign {
        Sign::pow_neg_one(i64::from(self.b() / 2 + self.l)) * self.eta.pow(i64::from(self.b()))
    }

    fn canonical(&self) -> ExtendedSegment {
        let mut out = self.clone();
        if !out.eta_matters() {
            out.eta = Sign::Plus;
        }
        out
    }

    fn weakly_equal(&self, other: &ExtendedSegment) -> bool {
        self.seg == other.seg && self.l == other.l && (!self.eta_matters() || self.eta == other.eta)
    }
}

impl fmt::Display for ExtendedSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}] l={} eta={}", self.upper(), self.lower(), self.l, self.eta)
    }
}

/// `α_i = Σ_{j<i} a_j` and `β_i = Σ_{j>i} b_j` for one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DualShiftRecord {
    pub alpha: u32,
    pub beta: u32,
}

/// Rows per `ρ`, each sequence in admissible order (first row minimal).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtendedMultiSegment {
    pub group: GroupTag,
    #[serde(with = "crate::multiset::pairs")]
    pub rows: BTreeMap<RhoSymbol, Vec<ExtendedSegment>>,
}

impl ExtendedMultiSegment {
    /// Files the rows under their `ρ`, preserving the given order.
    pub fn from_rows(group: GroupTag, rows: impl IntoIterator<Item = ExtendedSegment>) -> Self {
        let mut map: BTreeMap<RhoSymbol, Vec<ExtendedSegment>> = BTreeMap::new();
        for r in rows {
            map.entry(r.rho().clone()).or_default().push(r);
        }
        ExtendedMultiSegment { group, rows: map }
    }

    pub fn all_rows(&self) -> impl Iterator<Item = &ExtendedSegment> + '_ {
        self.rows.values().flatten()
    }

    /// Row checks, the order `(P)`, the parameter, and the sign condition.
    pub fn validate(&self) -> Result<(), EmsError> {
        for (rho, rows) in &self.rows {
            for r in rows {
                if r.rho() != rho {
                    return Err(EmsError::RhoMismatch { row: r.to_string(), key: rho.to_string() });
                }
                r.check()?;
            }
        }
        if let Some(rho) = self.first_order_violation(OrderMode::P) {
            return Err(EmsError::Order(rho.to_string(), OrderMode::P));
        }
        self.parameter()?;
        if !self.sign_condition() {
            return Err(EmsError::SignCondition);
        }
        Ok(())
    }

    fn first_order_violation(&self, mode: OrderMode) -> Option<&RhoSymbol> {
        self.rows.iter().find(|(_, rows)| !rows_in_order(rows, mode)).map(|(rho, _)| rho)
    }

    pub fn order_check(&self, mode: OrderMode) -> bool {
        let ok = self.first_order_violation(mode).is_none();
        debug_assert!(mode == OrderMode::P || !ok || self.first_order_violation(OrderMode::P).is_none());
        ok
    }

    pub fn sign_condition(&self) -> bool {
        self.all_rows().map(ExtendedSegment::sign_factor).product::<Sign>() == Sign::Plus
    }

    /// `ψ_E` without validation.
    pub fn parameter_unchecked(&self) -> ArthurParameter {
        ArthurParameter::new(self.group, self.all_rows().map(ExtendedSegment::summand))
    }

    /// `ψ_E = ⊕ ρ ⊗ S_{A+B+1} ⊗ S_{A-B+1}`, validated and of good parity.
    pub fn parameter(&self) -> Result<ArthurParameter, ParamError> {
        let p = self.parameter_unchecked();
        p.validate()?;
        p.require_good_parity()?;
        Ok(p)
    }

    /// `supp(E)`: the multi-set of segments.
    pub fn support(&self) -> MultiSet<Segment> {
        self.all_rows().map(|r| r.seg.clone()).collect()
    }

    pub fn weak_equivalent(&self, other: &ExtendedMultiSegment) -> bool {
        self.group == other.group
            && self.rows.len() == other.rows.len()
            && self.rows.iter().all(|(rho, rows)| {
                other.rows.get(rho).is_some_and(|o| {
                    o.len() == rows.len() && rows.iter().zip(o).all(|(x, y)| x.weakly_equal(y))
                })
            })
    }

    /// Sets `η = +1` on every row with `l = b/2`.
    pub fn canonical(&self) -> ExtendedMultiSegment {
        ExtendedMultiSegment {
            group: self.group,
            rows: self
                .rows
                .iter()
                .map(|(rho, rows)| (rho.clone(), rows.iter().map(ExtendedSegment::canonical).collect()))
                .collect(),
        }
    }

    /// Condition (L): `A+B` nondecreasing, `l = ⌊b/2⌋`, and rows with equal
    /// `A+B` and even `A-B` share `η`.
    pub fn satisfies_l(&self) -> bool {
        self.rows.values().all(|rows| {
            let sums_sorted = rows.windows(2).all(|w| w[0].a() <= w[1].a());
            let l_max = rows.iter().all(|r| r.l == r.b() / 2);
            let etas_agree = rows.iter().enumerate().all(|(i, r)| {
                rows[i + 1..].iter().all(|s| {
                    r.a() != s.a() || r.b() % 2 == 0 || s.b() % 2 == 0 || r.eta == s.eta
                })
            });
            sums_sorted && l_max && etas_agree
        })
    }

    /// `π(E)` for `E` satisfying (L): each row gives `Δ_ρ[B+k, -A+k]` for
    /// `0 <= k < l`, and rows with `A-B` even give `ρ ⊗ S_{A+B+1}` with `ε = η`.
    pub fn pi_of_l(&self) -> Result<LData, EmsError> {
        if !self.satisfies_l() {
            return Err(EmsError::NotL);
        }
        let mut segments = Vec::new();
        let mut phi = MultiSet::new();
        let mut eps = BTreeMap::new();
        for r in self.all_rows() {
            for k in 0..i64::from(r.l) {
                segments.push(GlSegment::steinberg(r.rho().clone(), r.lower() + k, -r.upper() + k)?);
            }
            if r.b() % 2 == 1 {
                let piece = TemperedPiece::new(r.rho().clone(), r.a());
                phi.insert(piece.clone());
                eps.insert(piece, r.eta);
            }
        }
        let tdim: u32 = phi.iter().map(|(p, m)| p.rho.dim() * p.a * m as u32).sum();
        let tgroup = self
            .group
            .with_big_n(tdim)
            .ok_or(LDataError::Dimension { expected: self.group.big_n(), found: tdim })?;
        Ok(make_ldata(self.group, segments, TemperedData::new(tgroup, phi, eps)?)?)
    }

    pub fn dual_shifts(&self) -> BTreeMap<RhoSymbol, Vec<DualShiftRecord>> {
        self.rows
            .iter()
            .map(|(rho, rows)| {
                let recs = (0..rows.len())
                    .map(|i| DualShiftRecord {
                        alpha: rows[..i].iter().map(ExtendedSegment::a).sum(),
                        beta: rows[i + 1..].iter().map(ExtendedSegment::b).sum(),
                    })
                    .collect();
                (rho.clone(), recs)
            })
            .collect()
    }

    /// The involution realizing the Aubert-Zelevinsky dual on `E`. Rows
    /// become `[A,-B]` in reversed order. Requires `(P')`.
    pub fn dual(&self) -> Result<ExtendedMultiSegment, EmsError> {
        if let Some(rho) = self.first_order_violation(OrderMode::Pprime) {
            return Err(EmsError::Order(rho.to_string(), OrderMode::Pprime));
        }
        let shifts = self.dual_shifts();
        let mut out = BTreeMap::new();
        for (rho, rows) in &self.rows {
            let mut new_rows = Vec::with_capacity(rows.len());
            for (r, s) in rows.iter().zip(&shifts[rho]) {
                let (alpha, beta) = (i64::from(s.alpha), i64::from(s.beta));
                let lower = r.lower();
                let (twice_l, eta) = if lower.is_integer() {
                    (2 * i64::from(r.l) + lower.twice(), Sign::pow_neg_one(alpha + beta) * r.eta)
                } else {
                    let eta = if r.eta_matters() { r.eta } else { Sign::pow_neg_one(alpha + 1) };
                    let shift = i64::from((Sign::pow_neg_one(alpha) * eta).to_i32());
                    (2 * i64::from(r.l) + lower.twice() + shift, Sign::pow_neg_one(alpha + beta + 1) * eta)
                };
                let new_b = i64::from(r.a());
                if twice_l < 0 || twice_l % 2 != 0 || twice_l > new_b {
                    return Err(EmsError::DualOutOfRange(r.to_string()));
                }
                let row = ExtendedSegment {
                    seg: Segment::new(rho.clone(), r.upper(), -lower)?,
                    l: (twice_l / 2) as u32,
                    eta,
                };
                new_rows.push(row.canonical());
            }
            new_rows.reverse();
            out.insert(rho.clone(), new_rows);
        }
        Ok(ExtendedMultiSegment { group: self.group, rows: out })
    }
}

impl fmt::Display for ExtendedMultiSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .rows
            .iter()
            .flat_map(|(rho, rows)| {
                rows.iter().enumerate().map(move |(i, r)| if i == 0 { format!("{rho} {r}") } else { r.to_string() })
            })
            .collect();
        write!(f, "ems {}", parts.join(" ; "))
    }
}

fn rows_in_order(rows: &[ExtendedSegment], mode: OrderMode) -> bool {
    rows.iter().enumerate().all(|(i, r)| {
        rows[i + 1..].iter().all(|s| match mode {
            OrderMode::P => !(r.upper() > s.upper() && r.lower() > s.lower()),
            OrderMode::Pprime => r.lower() <= s.lower(),
        })
    })
}

/// `Ω(F)` ascending and `Ω̄(F)` descending for the rows of one `ρ`.
pub fn omega_sets(rows: &[ExtendedSegment]) -> (Vec<HalfInt>, Vec<HalfInt>) {
    let mut up: Vec<HalfInt> = rows.iter().flat_map(|r| r.upper().down_to(r.lower())).collect();
    let mut down: Vec<HalfInt> = rows.iter().flat_map(|r| r.lower().down_to(-r.upper())).collect();
    up.sort();
    down.sort_by(|a, b| b.cmp(a));
    (up, down)
}

/// The extended multi-segments of `ψ` satisfying (L), one per weak
/// equivalence class. Rows are ordered by `(A+B, B, A)`.
pub fn l_class(psi: &ArthurParameter) -> Result<Vec<ExtendedMultiSegment>, EmsError> {
    psi.require_good_parity()?;
    let mut rows: Vec<ExtendedSegment> = Vec::new();
    for s in psi.summands.iter_expanded() {
        rows.push(ExtendedSegment::new(s.rho.clone(), s.upper(), s.lower(), s.b / 2, Sign::Plus)?);
    }
    rows.sort_by_key(|r| (r.rho().clone(), r.upper() + r.lower(), r.lower(), r.upper()));
    let mut groups: Vec<(RhoSymbol, u32)> = rows
        .iter()
        .filter(|r| r.eta_matters())
        .map(|r| (r.rho().clone(), r.a()))
        .collect();
    groups.dedup();
    assert!(groups.len() < 63, "too many sign groups");
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << groups.len()) {
        let assigned: Vec<ExtendedSegment> = rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if let Some(g) = groups.iter().position(|g| g.0 == *r.rho() && g.1 == r.a() && r.eta_matters()) {
                    r.eta = if mask >> g & 1 == 1 { Sign::Minus } else { Sign::Plus };
                }
                r
            })
            .collect();
        let e = ExtendedMultiSegment::from_rows(psi.group, assigned);
        if e.sign_condition() {
            out.push(e);
        }
    }
    Ok(out)
}
