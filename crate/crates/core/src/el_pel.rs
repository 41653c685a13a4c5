//! EL/PEL group data, minuscule cocharacters and Kottwitz sets.
//!
//! The three supported cases are `Res_{F|Q_p} GL_n` (EL), the symplectic
//! similitude group (PEL_C) and the unitary similitude group for an
//! unramified quadratic `F|F_0` (PEL_U). All polygons here are normalized by
//! `d = [F:Q_p]` and live over `[0, n]`.
//!
//! Newton points of `B(G, μ)` are enumerated as the concave polygons below
//! `μ̄` with the same end points whose break points have `x ∈ Z` and
//! `y ∈ (1/d)Z`, with slopes in `[0, 1]`, and symmetric in the PEL cases.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isocrystal::FIsocrystal;
use crate::polygon::{point_pair, ConcavePolygon, Point};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseKind {
    #[serde(rename = "EL")]
    El,
    #[serde(rename = "PEL_C")]
    PelC,
    #[serde(rename = "PEL_U")]
    PelU,
}

impl CaseKind {
    pub fn is_pel(self) -> bool {
        !matches!(self, CaseKind::El)
    }

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::El => "EL",
            CaseKind::PelC => "PEL_C",
            CaseKind::PelU => "PEL_U",
        }
    }
}

impl std::str::FromStr for CaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<CaseKind> {
        match s {
            "EL" => Ok(CaseKind::El),
            "PEL_C" => Ok(CaseKind::PelC),
            "PEL_U" => Ok(CaseKind::PelU),
            other => Err(Error::InvalidCase(format!("unknown case {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaseData {
    pub case: CaseKind,
    pub d: u64,
    pub n: u64,
}

impl CaseData {
    pub fn new(case: CaseKind, d: u64, n: u64) -> CaseData {
        CaseData { case, d, n }
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.d == 0 {
            out.push("d must be positive".to_string());
        }
        if self.n == 0 {
            out.push("n must be positive".to_string());
        }
        match self.case {
            CaseKind::PelC if self.n % 2 != 0 => {
                out.push(format!("PEL_C requires even n, got {}", self.n))
            }
            CaseKind::PelU if self.d % 2 != 0 => {
                out.push(format!("PEL_U requires even d, got {}", self.d))
            }
            _ => {}
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCase(problems.join("; ")))
        }
    }

    /// The involution `τ ↦ τ*` on embeddings, in the PEL cases.
    pub fn star(&self, tau: usize) -> Option<usize> {
        match self.case {
            CaseKind::El => None,
            CaseKind::PelC => Some(tau),
            CaseKind::PelU => Some((tau + self.d as usize / 2) % self.d as usize),
        }
    }
}

/// A minuscule cocharacter: one `(p_τ, q_τ)` pair per embedding `τ ∈ Z/dZ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MuData {
    pub pairs: Vec<(u64, u64)>,
}

impl MuData {
    pub fn new(pairs: Vec<(u64, u64)>) -> MuData {
        MuData { pairs }
    }

    /// Parses `p0,q0;p1,q1;...`.
    pub fn parse(s: &str) -> Result<MuData> {
        let mut pairs = Vec::new();
        for chunk in s.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (p, q) = chunk
                .split_once(',')
                .ok_or_else(|| Error::InvalidMu(format!("expected p,q in {chunk:?}")))?;
            let p = p.trim().parse().map_err(|_| Error::InvalidMu(format!("bad p in {chunk:?}")))?;
            let q = q.trim().parse().map_err(|_| Error::InvalidMu(format!("bad q in {chunk:?}")))?;
            pairs.push((p, q));
        }
        Ok(MuData { pairs })
    }
}

/// A case together with a cocharacter; the JSON shape
/// `{"case": .., "d": .., "n": .., "mu": [[p, q], ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDatum {
    #[serde(flatten)]
    pub case: CaseData,
    pub mu: MuData,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuValidation {
    pub valid: bool,
    pub reasons: Vec<String>,
}

pub fn validate_mu(case: &CaseData, mu: &MuData) -> MuValidation {
    let mut reasons = case.problems();
    if mu.pairs.len() as u64 != case.d {
        reasons.push(format!("expected {} pairs, got {}", case.d, mu.pairs.len()));
    }
    for (tau, &(p, q)) in mu.pairs.iter().enumerate() {
        if p + q != case.n {
            reasons.push(format!("tau {tau}: p + q = {} != n = {}", p + q, case.n));
        }
    }
    if reasons.is_empty() {
        match case.case {
            CaseKind::El => {}
            CaseKind::PelU => {
                for (tau, &(p, q)) in mu.pairs.iter().enumerate() {
                    let star = case.star(tau).expect("PEL case");
                    let (ps, qs) = mu.pairs[star];
                    if ps != q || qs != p {
                        reasons.push(format!(
                            "tau {tau}: (p, q) = ({p}, {q}) but tau* = {star} has ({ps}, {qs})"
                        ));
                    }
                }
            }
            CaseKind::PelC => {
                let half = case.n / 2;
                for (tau, &(p, q)) in mu.pairs.iter().enumerate() {
                    if p != half || q != half {
                        reasons.push(format!("tau {tau}: symplectic mu needs ({half}, {half})"));
                    }
                }
            }
        }
    }
    MuValidation { valid: reasons.is_empty(), reasons }
}

fn require_valid(case: &CaseData, mu: &MuData) -> Result<()> {
    let v = validate_mu(case, mu);
    if v.valid {
        Ok(())
    } else {
        Err(Error::InvalidMu(v.reasons.join("; ")))
    }
}

/// `μ̄`: the average over embeddings of the step polygons with `p_τ` slopes 1
/// and `q_τ` slopes 0.
pub fn mu_average(case: &CaseData, mu: &MuData) -> Result<ConcavePolygon> {
    require_valid(case, mu)?;
    let per_tau: Vec<ConcavePolygon> = mu
        .pairs
        .iter()
        .map(|&(p, q)| {
            let segs = [(Rat::one(), p), (Rat::zero(), q)]
                .into_iter()
                .filter(|(_, w)| *w > 0)
                .map(|(s, w)| (s, Rat::from(w)));
            ConcavePolygon::from_slopes(segs).expect("positive widths")
        })
        .collect();
    ConcavePolygon::average(&per_tau)
}

/// Rapoport-Zink space dimension.
pub fn rz_dimension(case: &CaseData, mu: &MuData) -> Result<Rat> {
    require_valid(case, mu)?;
    let sum_pq: u64 = mu.pairs.iter().map(|&(p, q)| p * q).sum();
    Ok(match case.case {
        CaseKind::El => Rat::from(sum_pq),
        CaseKind::PelU => Rat::from(sum_pq) / Rat::int(2),
        CaseKind::PelC => {
            let h = case.n / 2;
            Rat::from(case.d * h * (h + 1)) / Rat::int(2)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NewtonPoint {
    pub poly: ConcavePolygon,
    pub slopes_raw: FIsocrystal,
}

impl NewtonPoint {
    pub fn from_polygon(poly: ConcavePolygon, d: u64) -> Result<NewtonPoint> {
        let slopes_raw = FIsocrystal::from_normalized(&poly, d, true)?;
        Ok(NewtonPoint { poly, slopes_raw })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationConfig {
    /// Discard Newton points with a slope whose denominator exceeds this.
    pub max_denominator: Option<u64>,
    /// Fail with `SearchCapExceeded` beyond this many points.
    pub max_points: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig { max_denominator: None, max_points: 100_000 }
    }
}

pub fn enumerate_b(case: &CaseData, mu: &MuData) -> Result<Vec<NewtonPoint>> {
    enumerate_b_with(case, mu, &EnumerationConfig::default())
}

struct Search<'a> {
    n: i64,
    d: i64,
    hodge: &'a ConcavePolygon,
    end: Point,
    config: &'a EnumerationConfig,
    found: Vec<ConcavePolygon>,
    overflow: bool,
}

impl Search<'_> {
    // Depth-first over vertex sequences with strictly decreasing slopes.
    fn extend(&mut self, path: &mut Vec<Point>, prev_slope: Option<&Rat>) {
        if self.overflow {
            return;
        }
        let cur = path.last().expect("path starts at origin").clone();
        let cx = cur.x.to_i64().expect("integral abscissa");
        let one = Rat::one();
        for nx in (cx + 1)..=self.n {
            let xr = Rat::int(nx);
            let dx = Rat::int(nx - cx);
            let cap = self.hodge.evaluate(&xr).expect("in domain");
            let candidates: Vec<Rat> = if nx == self.n {
                vec![self.end.y.clone()]
            } else {
                // y ∈ (1/d)Z with cur.y <= y <= min(cap, cur.y + dx).
                let hi = cap.clone().min(&cur.y + &dx);
                let lo_k = (&cur.y * Rat::int(self.d)).to_i64().expect("grid ordinate");
                let hi_k = (&hi * Rat::int(self.d)).floor().to_i64().expect("bounded ordinate");
                (lo_k..=hi_k).map(|k| Rat::new(k, self.d)).collect()
            };
            for ny in candidates {
                if ny > cap {
                    continue;
                }
                let slope = (&ny - &cur.y) / &dx;
                if slope.is_negative() || slope > one {
                    continue;
                }
                if let Some(prev) = prev_slope {
                    if slope >= *prev {
                        continue;
                    }
                }
                if let Some(maxd) = self.config.max_denominator {
                    if slope.denom_u64().map_or(true, |den| den > maxd) {
                        continue;
                    }
                }
                path.push(Point::new(xr.clone(), ny));
                if nx == self.n {
                    let poly = ConcavePolygon::from_vertices(path).expect("concave by construction");
                    self.found.push(poly);
                    if self.found.len() > self.config.max_points {
                        self.overflow = true;
                    }
                } else {
                    self.extend(path, Some(&slope));
                }
                path.pop();
            }
        }
    }
}

fn lex_cmp(a: &ConcavePolygon, b: &ConcavePolygon) -> Ordering {
    a.slope_multiset().cmp(&b.slope_multiset())
}

/// Dominance-descending topological order; among the currently maximal
/// elements the lexicographically largest slope list comes first.
fn dominance_order(mut rest: Vec<ConcavePolygon>) -> Vec<ConcavePolygon> {
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let maximal: Vec<usize> = (0..rest.len())
            .filter(|&i| {
                !(0..rest.len()).any(|j| j != i && rest[i].leq(&rest[j]) && rest[i] != rest[j])
            })
            .collect();
        let pick = *maximal
            .iter()
            .max_by(|&&i, &&j| lex_cmp(&rest[i], &rest[j]))
            .expect("a finite poset has a maximal element");
        out.push(rest.remove(pick));
    }
    out
}

pub fn enumerate_b_with(
    case: &CaseData,
    mu: &MuData,
    config: &EnumerationConfig,
) -> Result<Vec<NewtonPoint>> {
    let hodge = mu_average(case, mu)?;
    let mut search = Search {
        n: case.n as i64,
        d: case.d as i64,
        hodge: &hodge,
        end: hodge.end_point(),
        config,
        found: Vec::new(),
        overflow: false,
    };
    let mut path = vec![Point::origin()];
    search.extend(&mut path, None);
    if search.overflow {
        return Err(Error::SearchCapExceeded(config.max_points));
    }
    let one = Rat::one();
    let polys: Vec<ConcavePolygon> = search
        .found
        .into_iter()
        .filter(|p| !case.case.is_pel() || p.is_symmetric(&one))
        .collect();
    debug_assert!(polys.iter().all(|p| p.leq(&hodge)));
    dominance_order(polys)
        .into_iter()
        .map(|p| NewtonPoint::from_polygon(p, case.d))
        .collect()
}

/// True iff `b` is the unique minimal element of `list`.
pub fn is_basic(b: &NewtonPoint, list: &[NewtonPoint]) -> Result<bool> {
    if !list.contains(b) {
        return Err(Error::NotMember);
    }
    let minimal: Vec<&NewtonPoint> = list
        .iter()
        .filter(|x| !list.iter().any(|y| y != *x && y.poly.leq(&x.poly)))
        .collect();
    Ok(minimal.len() == 1 && minimal[0] == b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumEntry {
    pub newton: NewtonPoint,
    pub basic: bool,
    #[serde(serialize_with = "point_pair::serialize_vec")]
    pub contact_break_points: Vec<Point>,
    pub hn_condition: bool,
    pub dim: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct StrataReport {
    pub strata: Vec<StratumEntry>,
}

impl StrataReport {
    pub fn non_basic(&self) -> impl Iterator<Item = &StratumEntry> {
        self.strata.iter().filter(|s| !s.basic)
    }
}

pub fn strata_report(case: &CaseData, mu: &MuData) -> Result<StrataReport> {
    strata_report_with(case, mu, &EnumerationConfig::default())
}

pub fn strata_report_with(
    case: &CaseData,
    mu: &MuData,
    config: &EnumerationConfig,
) -> Result<StrataReport> {
    let hodge = mu_average(case, mu)?;
    let dim = rz_dimension(case, mu)?;
    let points = enumerate_b_with(case, mu, config)?;
    let mut strata = Vec::with_capacity(points.len());
    for nu in &points {
        let contacts = nu.poly.contact_break_points(&hodge)?;
        strata.push(StratumEntry {
            newton: nu.clone(),
            basic: is_basic(nu, &points)?,
            hn_condition: !contacts.is_empty(),
            contact_break_points: contacts,
            dim: dim.clone(),
        });
    }
    Ok(StrataReport { strata })
}
