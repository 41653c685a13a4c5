//! Hodge-Newton decomposition at the level of numerical invariants.
//!
//! A [`FilteredInvariant`] bundles the Newton slopes of an isocrystal with an
//! `O_F`-action, the per-embedding Hodge jumps of its filtration, and
//! optionally a Harder-Narasimhan polygon. When the Newton and Hodge polygons
//! share a break point of the Newton polygon away from the end points, the
//! data splits into two pieces (EL) or three pieces (PEL, at `x` and its
//! mirror `x̂`), each again satisfying the polygon-level admissibility
//! conditions with `t_N = t_H`.
//!
//! Admissibility here is only the polygon-level necessary condition; nothing
//! quantifies over sub-objects.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::el_pel::{validate_mu, CaseData, CaseKind, MuData};
use crate::error::{Error, Result};
use crate::isocrystal::{DualMode, FIsocrystal, SlopeMultiset};
use crate::polygon::{point_pair, ConcavePolygon, Point};
use crate::rat::Rat;

/// Filtration jumps per embedding, each list sorted in decreasing order and
/// of length `n`. Minuscule data has jumps in `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HodgeData {
    per_tau: Vec<Vec<i64>>,
}

impl HodgeData {
    pub fn new(mut per_tau: Vec<Vec<i64>>) -> Result<HodgeData> {
        let Some(first) = per_tau.first() else {
            return Err(Error::InvalidInvariant("no embeddings in Hodge data".into()));
        };
        let n = first.len();
        if per_tau.iter().any(|j| j.len() != n) {
            return Err(Error::InvalidInvariant("embeddings carry different ranks".into()));
        }
        for j in &mut per_tau {
            j.sort_unstable_by(|a, b| b.cmp(a));
        }
        Ok(HodgeData { per_tau })
    }

    pub fn from_mu(mu: &MuData) -> HodgeData {
        HodgeData {
            per_tau: mu
                .pairs
                .iter()
                .map(|&(p, q)| {
                    std::iter::repeat(1)
                        .take(p as usize)
                        .chain(std::iter::repeat(0).take(q as usize))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn per_tau(&self) -> &[Vec<i64>] {
        &self.per_tau
    }

    pub fn embeddings(&self) -> usize {
        self.per_tau.len()
    }

    pub fn rank(&self) -> usize {
        self.per_tau[0].len()
    }

    pub fn is_minuscule(&self) -> bool {
        self.per_tau.iter().flatten().all(|&j| j == 0 || j == 1)
    }

    pub fn to_mu(&self) -> Option<MuData> {
        if !self.is_minuscule() {
            return None;
        }
        Some(MuData::new(
            self.per_tau
                .iter()
                .map(|j| {
                    let p = j.iter().filter(|&&v| v == 1).count() as u64;
                    (p, j.len() as u64 - p)
                })
                .collect(),
        ))
    }

    pub fn tau_polygon(&self, tau: usize) -> ConcavePolygon {
        ConcavePolygon::from_slopes(self.per_tau[tau].iter().map(|&j| (Rat::int(j), Rat::one())))
            .expect("unit widths")
    }

    /// Average over embeddings of the per-embedding polygons; for minuscule
    /// data this is `μ̄`.
    pub fn polygon(&self) -> ConcavePolygon {
        let polys: Vec<ConcavePolygon> = (0..self.embeddings()).map(|t| self.tau_polygon(t)).collect();
        ConcavePolygon::average(&polys).expect("common rank")
    }

    /// `Σ_τ Σ_i jump`, not normalized.
    pub fn t_h(&self) -> Rat {
        Rat::int(self.per_tau.iter().flatten().sum())
    }

    /// Blocks of consecutive ranks per embedding, largest jumps first.
    fn split(&self, widths: &[usize]) -> Vec<HodgeData> {
        let mut out: Vec<HodgeData> = widths.iter().map(|_| HodgeData { per_tau: Vec::new() }).collect();
        for jumps in &self.per_tau {
            let mut start = 0;
            for (k, w) in widths.iter().enumerate() {
                out[k].per_tau.push(jumps[start..start + w].to_vec());
                start += w;
            }
        }
        out
    }

    /// Jumps under duality `j ↦ 1 − j`, embeddings permuted by `star`.
    fn mirrored(&self, star: impl Fn(usize) -> usize) -> HodgeData {
        let per_tau = (0..self.embeddings())
            .map(|t| {
                let mut v: Vec<i64> = self.per_tau[star(t)].iter().map(|j| 1 - j).collect();
                v.sort_unstable_by(|a, b| b.cmp(a));
                v
            })
            .collect();
        HodgeData { per_tau }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredInvariant {
    case: CaseData,
    newton: FIsocrystal,
    hodge: HodgeData,
    hn: Option<ConcavePolygon>,
}

impl FilteredInvariant {
    pub fn new(
        case: CaseData,
        newton: FIsocrystal,
        hodge: HodgeData,
        hn: Option<ConcavePolygon>,
    ) -> Result<FilteredInvariant> {
        let invalid = |s: String| Err(Error::InvalidInvariant(s));
        case.validate()?;
        if newton.d() != case.d {
            return invalid(format!("isocrystal has d = {}, datum has d = {}", newton.d(), case.d));
        }
        if newton.height() != case.d * case.n {
            return invalid(format!(
                "isocrystal height {} != d·n = {}",
                newton.height(),
                case.d * case.n
            ));
        }
        if hodge.embeddings() as u64 != case.d || hodge.rank() as u64 != case.n {
            return invalid(format!(
                "Hodge data has {} embeddings of rank {}, expected {} of rank {}",
                hodge.embeddings(),
                hodge.rank(),
                case.d,
                case.n
            ));
        }
        if let Some(mu) = hodge.to_mu() {
            if !newton.slopes().p_divisible_check() {
                return invalid("minuscule data needs Newton slopes in [0, 1]".into());
            }
            let v = validate_mu(&case, &mu);
            if !v.valid {
                return Err(Error::InvalidMu(v.reasons.join("; ")));
            }
        }
        if case.case.is_pel() && !newton.normalized_newton().is_symmetric(&Rat::one()) {
            return invalid("PEL data needs a symmetric Newton polygon".into());
        }
        if let Some(h) = &hn {
            if h.width() != Rat::from(case.n) {
                return invalid(format!("HN polygon has width {}, expected {}", h.width(), case.n));
            }
        }
        Ok(FilteredInvariant { case, newton, hodge, hn })
    }

    pub fn from_mu(
        case: CaseData,
        newton: FIsocrystal,
        mu: &MuData,
        hn: Option<ConcavePolygon>,
    ) -> Result<FilteredInvariant> {
        FilteredInvariant::new(case, newton, HodgeData::from_mu(mu), hn)
    }

    pub fn case(&self) -> &CaseData {
        &self.case
    }

    pub fn newton(&self) -> &FIsocrystal {
        &self.newton
    }

    pub fn hodge(&self) -> &HodgeData {
        &self.hodge
    }

    pub fn hn(&self) -> Option<&ConcavePolygon> {
        self.hn.as_ref()
    }

    pub fn is_minuscule(&self) -> bool {
        self.hodge.is_minuscule()
    }

    pub fn newton_polygon(&self) -> ConcavePolygon {
        self.newton.normalized_newton()
    }

    pub fn hodge_polygon(&self) -> ConcavePolygon {
        self.hodge.polygon()
    }

    pub fn t_n(&self) -> Rat {
        self.newton.t_n()
    }

    pub fn t_h(&self) -> Rat {
        self.hodge.t_h()
    }

    pub fn t_h_normalized(&self) -> Rat {
        self.t_h() / Rat::from(self.case.d)
    }

    fn star(&self) -> impl Fn(usize) -> usize + '_ {
        move |t| self.case.star(t).unwrap_or(t)
    }

    /// The dual datum: Newton slopes `λ ↦ 1 − λ`, jumps `j ↦ 1 − j`, HN
    /// polygon dualized.
    pub fn dual(&self) -> Result<FilteredInvariant> {
        FilteredInvariant::new(
            self.case,
            self.newton.dual(DualMode::PDual),
            self.hodge.mirrored(self.star()),
            self.hn.as_ref().map(|h| h.dual(&Rat::one())),
        )
    }

    /// Same data with a different HN polygon.
    pub fn with_hn(&self, hn: Option<ConcavePolygon>) -> Result<FilteredInvariant> {
        FilteredInvariant::new(self.case, self.newton.clone(), self.hodge.clone(), hn)
    }
}

#[derive(Serialize, Deserialize)]
struct FilteredInvariantRepr {
    #[serde(flatten)]
    case: CaseData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu: Option<MuData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    jumps: Option<Vec<Vec<i64>>>,
    newton: SlopeMultiset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hn: Option<ConcavePolygon>,
}

impl Serialize for FilteredInvariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mu = self.hodge.to_mu();
        let jumps = if mu.is_none() { Some(self.hodge.per_tau.clone()) } else { None };
        FilteredInvariantRepr {
            case: self.case,
            mu,
            jumps,
            newton: self.newton.slopes().clone(),
            hn: self.hn.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FilteredInvariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FilteredInvariantRepr::deserialize(d)?;
        let hodge = match (repr.mu, repr.jumps) {
            (Some(mu), None) => HodgeData::from_mu(&mu),
            (None, Some(j)) => HodgeData::new(j).map_err(D::Error::custom)?,
            _ => return Err(D::Error::custom("exactly one of \"mu\" and \"jumps\" is required")),
        };
        let newton = FIsocrystal::new(repr.newton, repr.case.d).map_err(D::Error::custom)?;
        FilteredInvariant::new(repr.case, newton, hodge, repr.hn).map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityVerdict {
    /// Polygon-level necessary conditions for weak admissibility. Passing
    /// does not prove admissibility.
    pub necessary_conditions_pass: bool,
    pub t_n: Rat,
    pub t_h: Rat,
    pub endpoint_match: bool,
    pub newton_below_hodge: bool,
    pub hn_below_newton: Option<bool>,
}

pub fn admissible_check(inv: &FilteredInvariant) -> AdmissibilityVerdict {
    let t_n = inv.t_n();
    let t_h = inv.t_h();
    let newton = inv.newton_polygon();
    let endpoint_match = t_n == t_h;
    let newton_below_hodge = newton.leq(&inv.hodge_polygon());
    let hn_below_newton = inv.hn.as_ref().map(|h| h.leq(&newton));
    AdmissibilityVerdict {
        necessary_conditions_pass: endpoint_match && newton_below_hodge && hn_below_newton.unwrap_or(true),
        t_n,
        t_h,
        endpoint_match,
        newton_below_hodge,
        hn_below_newton,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContactPair {
    #[serde(serialize_with = "point_pair::serialize")]
    pub x: Point,
    #[serde(serialize_with = "point_pair::serialize")]
    pub xhat: Point,
}

/// Candidate points for the Hodge-Newton decomposition. In the PEL cases
/// only `x` with `x.x <= n/2` are listed, paired with their mirror; in the
/// EL case every contact break point is listed with `xhat = x`.
pub fn detect_hn(inv: &FilteredInvariant) -> Result<Vec<ContactPair>> {
    let verdict = admissible_check(inv);
    if !verdict.necessary_conditions_pass {
        return Err(Error::NotAdmissible(format!(
            "t_N = {}, t_H = {}, Newt <= Hdg: {}, HN <= Newt: {:?}",
            verdict.t_n, verdict.t_h, verdict.newton_below_hodge, verdict.hn_below_newton
        )));
    }
    let newton = inv.newton_polygon();
    let contacts = newton.contact_break_points(&inv.hodge_polygon())?;
    if !inv.case.case.is_pel() {
        return Ok(contacts.into_iter().map(|x| ContactPair { xhat: x.clone(), x }).collect());
    }
    let half = Rat::from(inv.case.n) / Rat::int(2);
    contacts
        .into_iter()
        .filter(|x| x.x <= half)
        .map(|x| {
            let xhat = newton.symmetric_point(&x)?;
            Ok(ContactPair { x, xhat })
        })
        .collect()
}

/// True iff `hn` passes through `x` and `xhat` and both are break points.
pub fn hn_passes_contacts(hn: &ConcavePolygon, x: &Point, xhat: &Point) -> bool {
    [x, xhat]
        .into_iter()
        .all(|p| hn.contains_point(p) && hn.is_break_abscissa(&p.x))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub newton_split: bool,
    pub hodge_split: bool,
    pub hn_contacts: bool,
    pub duality: bool,
    pub pieces_admissible: bool,
    /// Checks that hold vacuously (no HN polygon, or EL duality).
    pub vacuous: Vec<String>,
    pub witness: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.newton_split && self.hodge_split && self.hn_contacts && self.duality && self.pieces_admissible
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HNDecomposition {
    #[serde(serialize_with = "point_pair::serialize")]
    pub x: Point,
    #[serde(serialize_with = "point_pair::serialize")]
    pub xhat: Point,
    pub pieces: Vec<FilteredInvariant>,
    #[serde(rename = "checks")]
    pub verdicts: VerificationReport,
}

fn piece_widths(inv: &FilteredInvariant, x: &Point, xhat: &Point) -> Result<Vec<usize>> {
    let n = Rat::from(inv.case.n);
    let as_usize = |r: &Rat, p: &Point| {
        r.to_i64().map(|v| v as usize).ok_or_else(|| Error::UnsplittableAt {
            x: p.x.clone(),
            y: p.y.clone(),
            reason: "abscissa is not an integer".into(),
        })
    };
    let w1 = as_usize(&x.x, x)?;
    if !inv.case.case.is_pel() || x == xhat {
        return Ok(vec![w1, as_usize(&(&n - &x.x), x)?]);
    }
    Ok(vec![w1, as_usize(&(&xhat.x - &x.x), xhat)?, as_usize(&(&n - &xhat.x), xhat)?])
}

fn piece_cases(inv: &FilteredInvariant, widths: &[usize]) -> Vec<CaseData> {
    widths
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let kind = if widths.len() == 3 && k == 1 { inv.case.case } else { CaseKind::El };
            CaseData::new(kind, inv.case.d, w as u64)
        })
        .collect()
}

fn split_polygon(p: &ConcavePolygon, x: &Point, xhat: &Point, pieces: usize) -> Result<Vec<ConcavePolygon>> {
    let (first, rest) = p.split_at(x)?;
    if pieces == 2 {
        return Ok(vec![first, rest]);
    }
    let (middle, last) = rest.split_at(&Point::new(&xhat.x - &x.x, &xhat.y - &x.y))?;
    Ok(vec![first, middle, last])
}

pub fn decompose(inv: &FilteredInvariant, x: &Point, xhat: &Point) -> Result<HNDecomposition> {
    let pairs = detect_hn(inv)?;
    if !pairs.iter().any(|p| &p.x == x && &p.xhat == xhat) {
        return Err(Error::NotContactPair { x: x.x.clone(), y: x.y.clone() });
    }
    let widths = piece_widths(inv, x, xhat)?;
    let newtons = if widths.len() == 2 {
        let (a, b) = inv.newton.hn_split(x)?;
        vec![a, b]
    } else {
        let (a, b, c) = inv.newton.three_way_split(x, xhat)?;
        vec![a, b, c]
    };
    let hodges = inv.hodge.split(&widths);
    let hns: Vec<Option<ConcavePolygon>> = match &inv.hn {
        Some(h) if h.contains_point(x) && h.contains_point(xhat) => {
            split_polygon(h, x, xhat, widths.len())?.into_iter().map(Some).collect()
        }
        _ => vec![None; widths.len()],
    };
    let cases = piece_cases(inv, &widths);

    let mut pieces = Vec::with_capacity(widths.len());
    for (index, (((case, newton), hodge), hn)) in cases.into_iter().zip(newtons).zip(hodges).zip(hns).enumerate() {
        let piece = FilteredInvariant::new(case, newton, hodge, hn)
            .map_err(|e| Error::PieceNotAdmissible { index, reason: e.to_string() })?;
        let v = admissible_check(&piece);
        if !v.necessary_conditions_pass {
            return Err(Error::PieceNotAdmissible {
                index,
                reason: format!("t_N = {}, t_H = {}", v.t_n, v.t_h),
            });
        }
        pieces.push(piece);
    }
    let mut dec = HNDecomposition { x: x.clone(), xhat: xhat.clone(), pieces, verdicts: VerificationReport::default() };
    dec.verdicts = verify(&dec, inv);
    Ok(dec)
}

/// Checks the polygon statements of the decomposition against the parent.
pub fn verify(dec: &HNDecomposition, parent: &FilteredInvariant) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let (x, xhat) = (&dec.x, &dec.xhat);
    let pieces = &dec.pieces;
    let k = pieces.len();

    // (a) Newton polygons of the pieces are the parts of the parent's.
    rep.newton_split = match split_polygon(&parent.newton_polygon(), x, xhat, k) {
        Ok(parts) if (k == 2 || k == 3) => {
            match parts.iter().zip(pieces).position(|(p, piece)| *p != piece.newton_polygon()) {
                None => true,
                Some(i) => {
                    rep.witness.insert("newton_split".into(), format!("piece {i}"));
                    false
                }
            }
        }
        Ok(_) => {
            rep.witness.insert("newton_split".into(), format!("{k} pieces"));
            false
        }
        Err(e) => {
            rep.witness.insert("newton_split".into(), e.to_string());
            false
        }
    };

    // (b) Hodge polygons split at the same abscissae, averaged and per embedding.
    let hodge_at = |p: &ConcavePolygon, q: &Point| {
        p.evaluate(&q.x).map(|y| Point::new(q.x.clone(), y))
    };
    let hodge_check = || -> std::result::Result<(), String> {
        let check_one = |poly: ConcavePolygon, label: &str, piece_poly: &dyn Fn(&FilteredInvariant) -> ConcavePolygon| {
            let px = hodge_at(&poly, x).map_err(|e| e.to_string())?;
            let pxh = hodge_at(&poly, xhat).map_err(|e| e.to_string())?;
            let parts = split_polygon(&poly, &px, &pxh, k).map_err(|e| e.to_string())?;
            match parts.iter().zip(pieces).position(|(p, piece)| *p != piece_poly(piece)) {
                None => Ok(()),
                Some(i) => Err(format!("piece {i}, {label}")),
            }
        };
        if pieces.iter().any(|p| p.hodge.embeddings() != parent.hodge.embeddings()) {
            return Err("embedding count differs".into());
        }
        for tau in 0..parent.hodge.embeddings() {
            check_one(parent.hodge.tau_polygon(tau), &format!("tau {tau}"), &|p| p.hodge.tau_polygon(tau))?;
        }
        check_one(parent.hodge_polygon(), "average", &|p| p.hodge_polygon())
    };
    rep.hodge_split = match hodge_check() {
        Ok(()) => true,
        Err(w) => {
            rep.witness.insert("hodge_split".into(), w);
            false
        }
    };

    // (c) The HN polygon passes the contact points and splits with the pieces.
    rep.hn_contacts = match &parent.hn {
        None => {
            rep.vacuous.push("hn_contacts".into());
            true
        }
        Some(h) => {
            if !hn_passes_contacts(h, x, xhat) {
                rep.witness.insert("hn_contacts".into(), "HN polygon misses a contact point".into());
                false
            } else {
                let parts: Option<Vec<&ConcavePolygon>> = pieces.iter().map(|p| p.hn.as_ref()).collect();
                let ok = match (parts, split_polygon(h, x, xhat, k)) {
                    (Some(ps), Ok(expected)) => ps.into_iter().zip(&expected).all(|(a, b)| a == b),
                    _ => false,
                };
                if !ok {
                    rep.witness.insert("hn_contacts".into(), "piece HN polygons do not concatenate".into());
                }
                ok
            }
        }
    };

    // (d) PEL duality between outer pieces, middle piece self-dual.
    rep.duality = if !parent.case.case.is_pel() {
        rep.vacuous.push("duality".into());
        true
    } else if k < 2 {
        false
    } else {
        let star = |t: usize| parent.case.star(t).unwrap_or(t);
        let (first, last) = (&pieces[0], &pieces[k - 1]);
        let mut fail = None;
        if first.newton.slopes() != &last.newton.slopes().dual(DualMode::PDual) {
            fail = Some("outer Newton pieces are not dual".to_string());
        } else if last.hodge != first.hodge.mirrored(star) {
            fail = Some("outer Hodge pieces are not dual".to_string());
        } else if k == 3 {
            let mid = &pieces[1];
            if mid.newton.slopes() != &mid.newton.slopes().dual(DualMode::PDual) {
                fail = Some("middle Newton piece is not self-dual".to_string());
            } else if mid.hodge != mid.hodge.mirrored(star) {
                fail = Some("middle Hodge piece is not self-dual".to_string());
            }
        }
        match fail {
            None => true,
            Some(w) => {
                rep.witness.insert("duality".into(), w);
                false
            }
        }
    };

    // (e) Each piece satisfies the necessary conditions with t_N = t_H.
    rep.pieces_admissible = match pieces.iter().position(|p| !admissible_check(p).necessary_conditions_pass) {
        None => true,
        Some(i) => {
            let v = admissible_check(&pieces[i]);
            rep.witness.insert(
                "pieces_admissible".into(),
                format!("piece {i}: t_N = {}, t_H = {}", v.t_n, v.t_h),
            );
            false
        }
    };
    rep
}

impl HNDecomposition {
    /// Replaces a piece without re-validating, for negative controls.
    pub fn with_piece(&self, index: usize, piece: FilteredInvariant) -> HNDecomposition {
        let mut out = self.clone();
        out.pieces[index] = piece;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::el_pel::{enumerate_b, mu_average};
    use crate::rat::r;

    fn i(n: i64) -> Rat {
        Rat::int(n)
    }

    fn pt(x: Rat, y: Rat) -> Point {
        Point::new(x, y)
    }

    fn iso(entries: &[(Rat, u64)], d: u64) -> FIsocrystal {
        FIsocrystal::new(SlopeMultiset::new(entries.iter().cloned(), true).unwrap(), d).unwrap()
    }

    fn gsp4_nonbasic() -> FilteredInvariant {
        FilteredInvariant::from_mu(
            CaseData::new(CaseKind::PelC, 1, 4),
            iso(&[(i(1), 1), (r(1, 2), 2), (i(0), 1)], 1),
            &MuData::new(vec![(2, 2)]),
            None,
        )
        .unwrap()
    }

    fn gu12_nonbasic() -> FilteredInvariant {
        FilteredInvariant::from_mu(
            CaseData::new(CaseKind::PelU, 2, 3),
            iso(&[(i(1), 2), (r(1, 2), 2), (i(0), 2)], 2),
            &MuData::new(vec![(1, 2), (2, 1)]),
            None,
        )
        .unwrap()
    }

    fn gl2_ordinary() -> FilteredInvariant {
        FilteredInvariant::from_mu(
            CaseData::new(CaseKind::El, 1, 2),
            iso(&[(i(1), 1), (i(0), 1)], 1),
            &MuData::new(vec![(1, 1)]),
            None,
        )
        .unwrap()
    }

    #[test]
    fn t_h_examples() {
        let gu = gu12_nonbasic();
        assert_eq!(gu.t_h(), i(3));
        assert_eq!(gu.t_h_normalized(), r(3, 2));
        let zero = HodgeData::from_mu(&MuData::new(vec![(0, 2)]));
        assert_eq!(zero.t_h(), i(0));
        assert_eq!(gl2_ordinary().t_h(), i(1));
    }

    #[test]
    fn admissible_examples() {
        assert!(admissible_check(&gl2_ordinary()).necessary_conditions_pass);
        let mismatch = FilteredInvariant::from_mu(
            CaseData::new(CaseKind::El, 1, 2),
            iso(&[(i(1), 2)], 1),
            &MuData::new(vec![(1, 1)]),
            None,
        )
        .unwrap();
        let v = admissible_check(&mismatch);
        assert!(!v.necessary_conditions_pass);
        assert!(!v.endpoint_match);
        assert_eq!((v.t_n, v.t_h), (i(2), i(1)));
        assert!(admissible_check(&gsp4_nonbasic()).necessary_conditions_pass);
    }

    #[test]
    fn admissible_rejects_hn_above_newton() {
        let inv = gl2_ordinary()
            .with_hn(Some(ConcavePolygon::from_slopes([(i(1), i(2))]).unwrap()))
            .unwrap();
        let v = admissible_check(&inv);
        assert_eq!(v.hn_below_newton, Some(false));
        assert!(!v.necessary_conditions_pass);
        assert_eq!(detect_hn(&inv).unwrap_err().code(), "NotAdmissible");
    }

    #[test]
    fn detect_examples() {
        assert_eq!(
            detect_hn(&gsp4_nonbasic()).unwrap(),
            vec![ContactPair { x: pt(i(1), i(1)), xhat: pt(i(3), i(2)) }]
        );
        let basic = FilteredInvariant::from_mu(
            CaseData::new(CaseKind::PelC, 1, 4),
            iso(&[(r(1, 2), 4)], 1),
            &MuData::new(vec![(2, 2)]),
            None,
        )
        .unwrap();
        assert!(detect_hn(&basic).unwrap().is_empty());
        assert_eq!(
            detect_hn(&gu12_nonbasic()).unwrap(),
            vec![ContactPair { x: pt(i(1), i(1)), xhat: pt(i(2), r(3, 2)) }]
        );
        assert_eq!(
            detect_hn(&gl2_ordinary()).unwrap(),
            vec![ContactPair { x: pt(i(1), i(1)), xhat: pt(i(1), i(1)) }]
        );
    }

    #[test]
    fn decompose_gsp4() {
        let inv = gsp4_nonbasic();
        let dec = decompose(&inv, &pt(i(1), i(1)), &pt(i(3), i(2))).unwrap();
        assert_eq!(dec.pieces.len(), 3);
        assert_eq!(dec.pieces[0].newton().slopes(), iso(&[(i(1), 1)], 1).slopes());
        assert_eq!(dec.pieces[1].newton().slopes(), iso(&[(r(1, 2), 2)], 1).slopes());
        assert_eq!(dec.pieces[2].newton().slopes(), iso(&[(i(0), 1)], 1).slopes());
        let mus: Vec<MuData> = dec.pieces.iter().map(|p| p.hodge().to_mu().unwrap()).collect();
        assert_eq!(
            mus,
            vec![MuData::new(vec![(1, 0)]), MuData::new(vec![(1, 1)]), MuData::new(vec![(0, 1)])]
        );
        assert_eq!(dec.pieces[1].case().case, CaseKind::PelC);
        assert!(dec.verdicts.all_pass(), "{:?}", dec.verdicts);
        assert!(dec.verdicts.vacuous.contains(&"hn_contacts".to_string()));
    }

    #[test]
    fn decompose_gu12() {
        let inv = gu12_nonbasic();
        let dec = decompose(&inv, &pt(i(1), i(1)), &pt(i(2), r(3, 2))).unwrap();
        let mus: Vec<MuData> = dec.pieces.iter().map(|p| p.hodge().to_mu().unwrap()).collect();
        assert_eq!(
            mus,
            vec![
                MuData::new(vec![(1, 0), (1, 0)]),
                MuData::new(vec![(0, 1), (1, 0)]),
                MuData::new(vec![(0, 1), (0, 1)]),
            ]
        );
        assert_eq!(dec.pieces[0].newton().slopes(), iso(&[(i(1), 2)], 2).slopes());
        assert_eq!(dec.pieces[1].newton().slopes(), iso(&[(r(1, 2), 2)], 2).slopes());
        assert!(dec.verdicts.all_pass(), "{:?}", dec.verdicts);
    }

    #[test]
    fn decompose_gl2() {
        let inv = gl2_ordinary();
        let x = pt(i(1), i(1));
        let dec = decompose(&inv, &x, &x).unwrap();
        assert_eq!(dec.pieces.len(), 2);
        assert_eq!(dec.pieces[0].hodge().to_mu().unwrap(), MuData::new(vec![(1, 0)]));
        assert_eq!(dec.pieces[1].hodge().to_mu().unwrap(), MuData::new(vec![(0, 1)]));
        assert!(dec.verdicts.all_pass());
        assert!(dec.verdicts.vacuous.contains(&"duality".to_string()));
    }

    #[test]
    fn decompose_rejects_non_contact() {
        let inv = gsp4_nonbasic();
        let err = decompose(&inv, &pt(i(3), i(2)), &pt(i(1), i(1))).unwrap_err();
        assert_eq!(err.code(), "NotContactPair");
    }

    #[test]
    fn verify_detects_swapped_hodge_pair() {
        let inv = gsp4_nonbasic();
        let dec = decompose(&inv, &pt(i(1), i(1)), &pt(i(3), i(2))).unwrap();
        let p0 = &dec.pieces[0];
        let corrupted = FilteredInvariant::new(
            *p0.case(),
            p0.newton().clone(),
            HodgeData::from_mu(&MuData::new(vec![(0, 1)])),
            None,
        )
        .unwrap();
        let bad = dec.with_piece(0, corrupted);
        let rep = verify(&bad, &inv);
        assert!(!rep.hodge_split);
        assert_eq!(rep.witness["hodge_split"], "piece 0, tau 0");
        assert!(rep.newton_split);
    }

    #[test]
    fn hn_decomposition_with_hn_polygon() {
        let inv = gsp4_nonbasic();
        let hn = inv.newton_polygon();
        let with = inv.with_hn(Some(hn)).unwrap();
        let dec = decompose(&with, &pt(i(1), i(1)), &pt(i(3), i(2))).unwrap();
        assert!(dec.verdicts.all_pass());
        assert!(dec.verdicts.vacuous.is_empty());
        assert!(dec.pieces.iter().all(|p| p.hn().is_some()));
    }

    #[test]
    fn passes_contacts_examples() {
        let inv = gsp4_nonbasic();
        let n = inv.newton_polygon();
        let (x, xh) = (pt(i(1), i(1)), pt(i(3), i(2)));
        assert!(hn_passes_contacts(&n, &x, &xh));
        let below = ConcavePolygon::from_slopes([(r(3, 4), i(1)), (r(1, 2), i(2)), (r(1, 4), i(1))]).unwrap();
        assert!(!hn_passes_contacts(&below, &x, &xh));
        let line = ConcavePolygon::from_slopes([(r(1, 2), i(4))]).unwrap();
        let mid = pt(i(2), i(1));
        assert!(line.contains_point(&mid));
        assert!(!hn_passes_contacts(&line, &mid, &mid));
    }

    #[test]
    fn invariant_validation() {
        let case = CaseData::new(CaseKind::PelC, 1, 4);
        let mu = MuData::new(vec![(2, 2)]);
        let asym = iso(&[(i(1), 2), (i(0), 2)], 1);
        assert!(FilteredInvariant::from_mu(case, asym, &mu, None).is_ok());
        let asym2 = iso(&[(i(1), 1), (r(1, 3), 3)], 1);
        assert_eq!(
            FilteredInvariant::from_mu(case, asym2, &mu, None).unwrap_err().code(),
            "InvalidInvariant"
        );
        let wrong_height = iso(&[(i(1), 1), (i(0), 1)], 1);
        assert!(FilteredInvariant::from_mu(case, wrong_height, &mu, None).is_err());
        let bad_mu = MuData::new(vec![(3, 1)]);
        assert_eq!(
            FilteredInvariant::from_mu(case, iso(&[(r(1, 2), 4)], 1), &bad_mu, None).unwrap_err().code(),
            "InvalidMu"
        );
    }

    #[test]
    fn general_jumps_mode() {
        let inv = FilteredInvariant::new(
            CaseData::new(CaseKind::El, 1, 3),
            FIsocrystal::new(SlopeMultiset::new([(i(2), 1), (i(1), 1), (i(0), 1)], true).unwrap(), 1).unwrap(),
            HodgeData::new(vec![vec![0, 2, 1]]).unwrap(),
            None,
        )
        .unwrap();
        assert!(!inv.is_minuscule());
        assert_eq!(inv.t_h(), i(3));
        let pairs = detect_hn(&inv).unwrap();
        assert_eq!(pairs.len(), 2);
        let dec = decompose(&inv, &pairs[0].x, &pairs[0].xhat).unwrap();
        assert!(dec.verdicts.all_pass());
        let json = serde_json::to_string(&inv).unwrap();
        assert!(json.contains("\"jumps\":[[2,1,0]]"));
        let back: FilteredInvariant = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inv);
    }

    #[test]
    fn json_round_trip() {
        let inv = gu12_nonbasic();
        let json = serde_json::to_string(&inv).unwrap();
        let back: FilteredInvariant = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inv);
        let dec = decompose(&inv, &pt(i(1), i(1)), &pt(i(2), r(3, 2))).unwrap();
        let v = serde_json::to_value(&dec).unwrap();
        assert_eq!(v["checks"]["newton_split"], serde_json::Value::Bool(true));
        assert_eq!(v["x"], serde_json::json!([[1, 1], [1, 1]]));
    }

    #[test]
    fn every_pel_stratum_round_trips() {
        let case = CaseData::new(CaseKind::PelU, 2, 5);
        let mu = MuData::new(vec![(1, 4), (4, 1)]);
        let hodge = mu_average(&case, &mu).unwrap();
        for nu in enumerate_b(&case, &mu).unwrap() {
            let inv = FilteredInvariant::from_mu(case, nu.slopes_raw.clone(), &mu, None).unwrap();
            assert_eq!(inv.hodge_polygon(), hodge);
            for pair in detect_hn(&inv).unwrap() {
                let dec = decompose(&inv, &pair.x, &pair.xhat).unwrap();
                assert!(dec.verdicts.all_pass(), "{nu:?}: {:?}", dec.verdicts);
            }
        }
    }
}
