//! Harder-Narasimhan polygons of finite flat group schemes from their
//! numerical shadows.
//!
//! A group scheme is represented by the `(height, degree)` points of its
//! subgroups, a [`SubobjectCloud`]. The HN polygon is the concave envelope of
//! that cloud. Group-scheme Hodge polygons come from the elementary divisors
//! of the differentials, and p-divisible groups are approximated by finite
//! towers of their torsion levels.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{concave_envelope, point_pair, ConcavePolygon, Point};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FfgsInvariants {
    pub ht: u64,
    pub deg: Rat,
}

impl FfgsInvariants {
    pub fn slope(&self) -> Rat {
        &self.deg / Rat::from(self.ht)
    }
}

/// `(ht, deg)` points of subgroups of a finite flat group scheme. The trivial
/// subgroup and the whole group are always present.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCloud")]
pub struct SubobjectCloud {
    ht: u64,
    deg: Rat,
    #[serde(serialize_with = "point_pair::serialize_vec")]
    points: Vec<Point>,
}

#[derive(Deserialize)]
struct RawCloud {
    ht: u64,
    deg: Rat,
    points: Vec<Point>,
}

impl TryFrom<RawCloud> for SubobjectCloud {
    type Error = Error;

    fn try_from(raw: RawCloud) -> Result<SubobjectCloud> {
        SubobjectCloud::new(FfgsInvariants { ht: raw.ht, deg: raw.deg }, raw.points)
    }
}

impl SubobjectCloud {
    /// Validates `0 <= y <= x`, `y <= deg` and `deg − y <= ht − x` for every
    /// point (the last says the quotient also has slope at most 1).
    pub fn new(ambient: FfgsInvariants, points: Vec<Point>) -> Result<SubobjectCloud> {
        let FfgsInvariants { ht, deg } = ambient;
        if ht == 0 {
            return Err(Error::InvalidCloud("ht must be positive".into()));
        }
        let h = Rat::from(ht);
        if deg.is_negative() || deg > h {
            return Err(Error::InvalidCloud(format!("deg {deg} outside [0, {ht}]")));
        }
        let mut set: BTreeSet<Point> = points.into_iter().collect();
        set.insert(Point::origin());
        set.insert(Point::new(h.clone(), deg.clone()));
        for p in &set {
            let bad = p.x.is_negative()
                || p.x > h
                || p.y.is_negative()
                || p.y > p.x
                || p.y > deg
                || &deg - &p.y > &h - &p.x;
            if bad {
                return Err(Error::InvalidCloud(format!(
                    "point {p:?} is not a subobject of (ht, deg) = ({ht}, {deg})"
                )));
            }
        }
        Ok(SubobjectCloud { ht, deg, points: set.into_iter().collect() })
    }

    pub fn ambient(&self) -> FfgsInvariants {
        FfgsInvariants { ht: self.ht, deg: self.deg.clone() }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn end(&self) -> Point {
        Point::new(Rat::from(self.ht), self.deg.clone())
    }

    /// Scales every coordinate by `m`, e.g. to model `H[p^m]` from `H[p]`
    /// when the HN filtration is stable.
    pub fn dilate(&self, m: u64) -> SubobjectCloud {
        let k = Rat::from(m);
        SubobjectCloud {
            ht: self.ht * m,
            deg: &self.deg * &k,
            points: self.points.iter().map(|p| Point::new(&p.x * &k, &p.y * &k)).collect(),
        }
    }

    pub fn hn_polygon(&self) -> ConcavePolygon {
        concave_envelope(&self.points, &self.end()).expect("cloud invariants hold")
    }

    pub fn normalized_hn(&self, d: u64) -> Result<ConcavePolygon> {
        if d == 0 || self.ht % d != 0 {
            return Err(Error::DivisibilityViolated(format!("d = {d} does not divide ht = {}", self.ht)));
        }
        Ok(self.hn_polygon().normalize(d))
    }

    /// Every subobject has slope at most the slope of the whole.
    pub fn is_semistable(&self) -> bool {
        self.hn_polygon().segments().len() <= 1
    }

    /// Cloud of the Cartier dual: a subgroup `G'` corresponds to `(G/G')^D`.
    pub fn dual(&self) -> SubobjectCloud {
        let h = Rat::from(self.ht);
        let deg_dual = &h - &self.deg;
        let mut points: Vec<Point> = self
            .points
            .iter()
            .map(|p| {
                let qx = &h - &p.x;
                let qy = &qx - (&self.deg - &p.y);
                Point::new(qx, qy)
            })
            .collect();
        points.sort();
        SubobjectCloud { ht: self.ht, deg: deg_dual, points }
    }
}

/// First and last slope of a polygon.
pub fn mu_max_min(p: &ConcavePolygon) -> Option<(Rat, Rat)> {
    Some((p.mu_max()?, p.mu_min()?))
}

/// Sufficient criterion for `Hom(G1, G2) = 0`: `μ_min(G1) > μ_max(G2)`.
pub fn hom_vanishes(g1: &ConcavePolygon, g2: &ConcavePolygon) -> bool {
    match (g1.mu_min(), g2.mu_max()) {
        (Some(a), Some(b)) => a > b,
        _ => false,
    }
}

/// Exponents of `ω = ⊕ O_K/p^{a_i}` for each embedding `τ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawOmega")]
pub struct OmegaDivisors {
    d: u64,
    ht: u64,
    per_tau: Vec<Vec<Rat>>,
}

#[derive(Deserialize)]
struct RawOmega {
    d: u64,
    ht: u64,
    per_tau: Vec<Vec<Rat>>,
}

impl TryFrom<RawOmega> for OmegaDivisors {
    type Error = Error;

    fn try_from(raw: RawOmega) -> Result<OmegaDivisors> {
        OmegaDivisors::new(raw.d, raw.ht, raw.per_tau)
    }
}

impl OmegaDivisors {
    pub fn new(d: u64, ht: u64, per_tau: Vec<Vec<Rat>>) -> Result<OmegaDivisors> {
        if d == 0 || ht == 0 || ht % d != 0 {
            return Err(Error::InvalidOmega(format!("d = {d} must divide ht = {ht}")));
        }
        if per_tau.len() as u64 != d {
            return Err(Error::InvalidOmega(format!("expected {d} embeddings, got {}", per_tau.len())));
        }
        let rank = ht / d;
        for (tau, exps) in per_tau.iter().enumerate() {
            if exps.len() as u64 > rank {
                return Err(Error::InvalidOmega(format!(
                    "tau {tau} has {} exponents, more than ht/d = {rank}",
                    exps.len()
                )));
            }
            if let Some(a) = exps.iter().find(|a| a.is_negative()) {
                return Err(Error::InvalidOmega(format!("tau {tau} has negative exponent {a}")));
            }
        }
        Ok(OmegaDivisors { d, ht, per_tau })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn ht(&self) -> u64 {
        self.ht
    }

    pub fn per_tau(&self) -> &[Vec<Rat>] {
        &self.per_tau
    }

    /// Exponents for `τ`, padded with zeros to `ht/d` entries.
    pub fn padded(&self, tau: usize) -> Vec<Rat> {
        let mut v = self.per_tau[tau].clone();
        v.resize((self.ht / self.d) as usize, Rat::zero());
        v
    }

    /// `Hdg_τ`: its value at `i` is `deg ω_τ − ν(Fitt_i ω_τ)`, the sum of the
    /// `i` largest exponents.
    pub fn hodge_tau(&self, tau: usize) -> ConcavePolygon {
        ConcavePolygon::from_slopes(self.padded(tau).into_iter().map(|a| (a, Rat::one())))
            .expect("unit widths")
    }

    /// The Hodge polygon: average of the `Hdg_τ` over `[0, ht/d]`.
    pub fn fitting_hodge(&self) -> ConcavePolygon {
        let polys: Vec<ConcavePolygon> = (0..self.per_tau.len()).map(|t| self.hodge_tau(t)).collect();
        ConcavePolygon::average(&polys).expect("common width ht/d")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionTower {
    pub d: u64,
    pub clouds: Vec<SubobjectCloud>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainViolation {
    pub i: u64,
    pub m: u64,
    pub x: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerLimit {
    pub limit: ConcavePolygon,
    /// Number of levels the infimum was taken over.
    pub levels: u64,
    pub violations: Vec<ChainViolation>,
}

impl TorsionTower {
    fn check(&self) -> Result<()> {
        let first = self
            .clouds
            .first()
            .ok_or_else(|| Error::IncoherentTower("no levels".into()))?;
        if self.d == 0 || first.ht % self.d != 0 {
            return Err(Error::IncoherentTower(format!(
                "d = {} does not divide the height {} of the first level",
                self.d, first.ht
            )));
        }
        for (k, c) in self.clouds.iter().enumerate() {
            let m = k as u64 + 1;
            if c.ht != m * first.ht {
                return Err(Error::IncoherentTower(format!(
                    "level {m} has height {}, expected {}",
                    c.ht,
                    m * first.ht
                )));
            }
            if c.deg != &first.deg * Rat::from(m) {
                return Err(Error::IncoherentTower(format!(
                    "level {m} has degree {}, expected {}",
                    c.deg,
                    &first.deg * Rat::from(m)
                )));
            }
        }
        Ok(())
    }

    /// `Q_m(x) = (1/m) · normalized_hn(level m)(m·x)` for `m = 1..M`.
    pub fn rescaled_levels(&self) -> Result<Vec<ConcavePolygon>> {
        self.check()?;
        Ok(self
            .clouds
            .iter()
            .enumerate()
            .map(|(k, c)| c.hn_polygon().normalize(self.d * (k as u64 + 1)))
            .collect())
    }

    /// Pointwise infimum of the `Q_m` on the union of their break abscissae,
    /// returned as the concave polygon through those values, together with
    /// any violations of `Q_{im} <= Q_i`.
    pub fn limit(&self) -> Result<TowerLimit> {
        let qs = self.rescaled_levels()?;
        let grid: BTreeSet<Rat> = qs
            .iter()
            .flat_map(|q| q.vertices().into_iter().map(|v| v.x))
            .collect();
        let values: Vec<Vec<Rat>> = qs
            .iter()
            .map(|q| grid.iter().map(|x| q.evaluate(x).expect("common width")).collect())
            .collect();
        let mins: Vec<Point> = grid
            .iter()
            .enumerate()
            .map(|(g, x)| {
                let y = values.iter().map(|v| v[g].clone()).min().expect("at least one level");
                Point::new(x.clone(), y)
            })
            .collect();
        let end = mins.last().expect("grid holds the end point").clone();
        let limit = concave_envelope(&mins, &end).expect("values below the anchor");

        let big_m = qs.len() as u64;
        let mut violations = Vec::new();
        for i in 1..=big_m {
            for m in 2..=(big_m / i) {
                let (qi, qim) = (&values[(i - 1) as usize], &values[(i * m - 1) as usize]);
                if let Some((g, _)) = qim.iter().zip(qi).enumerate().find(|(_, (a, b))| a > b) {
                    let x = grid.iter().nth(g).expect("grid index").clone();
                    violations.push(ChainViolation { i, m, x });
                }
            }
        }
        Ok(TowerLimit { limit, levels: big_m, violations })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainVerdict {
    pub hn_leq_newton: bool,
    pub newton_leq_hodge: bool,
    /// First abscissa where `hn > newton`, if any.
    pub hn_newton_witness: Option<Rat>,
    /// First abscissa where `newton > hodge`, if any.
    pub newton_hodge_witness: Option<Rat>,
}

impl ChainVerdict {
    pub fn holds(&self) -> bool {
        self.hn_leq_newton && self.newton_leq_hodge
    }
}

/// Checks `HN <= Newt <= Hdg`.
pub fn chain_check(hn: &ConcavePolygon, newton: &ConcavePolygon, hodge: &ConcavePolygon) -> ChainVerdict {
    let a = hn.first_violation(newton);
    let b = newton.first_violation(hodge);
    ChainVerdict {
        hn_leq_newton: a.is_none(),
        newton_leq_hodge: b.is_none(),
        hn_newton_witness: a,
        newton_hodge_witness: b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::el_pel::{mu_average, CaseData, CaseKind, MuData};
    use crate::rat::r;

    fn i(n: i64) -> Rat {
        Rat::int(n)
    }

    fn pt(x: Rat, y: Rat) -> Point {
        Point::new(x, y)
    }

    fn poly(segs: &[(Rat, Rat)]) -> ConcavePolygon {
        ConcavePolygon::from_slopes(segs.iter().cloned()).unwrap()
    }

    fn cloud(ht: u64, deg: Rat, pts: &[(Rat, Rat)]) -> SubobjectCloud {
        SubobjectCloud::new(
            FfgsInvariants { ht, deg },
            pts.iter().map(|(x, y)| pt(x.clone(), y.clone())).collect(),
        )
        .unwrap()
    }

    fn mult_etale() -> SubobjectCloud {
        cloud(2, i(1), &[(i(0), i(0)), (i(1), i(1)), (i(2), i(1))])
    }

    #[test]
    fn hn_polygon_examples() {
        assert_eq!(cloud(2, i(1), &[]).hn_polygon(), poly(&[(r(1, 2), i(2))]));
        assert_eq!(mult_etale().hn_polygon(), poly(&[(i(1), i(1)), (i(0), i(1))]));
        let c = cloud(2, i(1), &[(i(1), i(1)), (i(1), r(1, 2))]);
        assert_eq!(c.hn_polygon(), poly(&[(i(1), i(1)), (i(0), i(1))]));
    }

    #[test]
    fn cloud_validation() {
        let inv = FfgsInvariants { ht: 2, deg: i(1) };
        let bad = |x: Rat, y: Rat| SubobjectCloud::new(inv.clone(), vec![pt(x, y)]).unwrap_err();
        assert_eq!(bad(i(1), i(2)).code(), "InvalidCloud");
        assert_eq!(bad(i(3), i(0)).code(), "InvalidCloud");
        assert_eq!(bad(i(1), r(-1, 2)).code(), "InvalidCloud");
        // Quotient of height 1 would have degree 2.
        let inv2 = FfgsInvariants { ht: 2, deg: i(2) };
        assert!(SubobjectCloud::new(inv2, vec![pt(i(1), i(0))]).is_err());
        assert!(SubobjectCloud::new(FfgsInvariants { ht: 2, deg: i(3) }, vec![]).is_err());
    }

    #[test]
    fn normalized_hn_examples() {
        assert_eq!(
            mult_etale().normalized_hn(2).unwrap(),
            poly(&[(i(1), r(1, 2)), (i(0), r(1, 2))])
        );
        assert_eq!(mult_etale().normalized_hn(1).unwrap(), mult_etale().hn_polygon());
        let c = cloud(4, i(3), &[(i(2), i(2))]);
        assert_eq!(c.normalized_hn(2).unwrap(), poly(&[(i(1), i(1)), (r(1, 2), i(1))]));
        assert_eq!(cloud(3, i(1), &[]).normalized_hn(2).unwrap_err().code(), "DivisibilityViolated");
    }

    #[test]
    fn semistable_examples() {
        assert!(cloud(2, i(1), &[]).is_semistable());
        assert!(!mult_etale().is_semistable());
        assert!(cloud(2, i(1), &[(i(1), r(1, 2))]).is_semistable());
    }

    #[test]
    fn mu_max_min_examples() {
        assert_eq!(mu_max_min(&poly(&[(i(1), i(1)), (i(0), i(1))])), Some((i(1), i(0))));
        assert_eq!(mu_max_min(&poly(&[(r(1, 2), i(4))])), Some((r(1, 2), r(1, 2))));
        assert_eq!(
            mu_max_min(&poly(&[(i(1), i(1)), (r(1, 2), i(2)), (i(0), i(1))])),
            Some((i(1), i(0)))
        );
        assert_eq!(mu_max_min(&ConcavePolygon::empty()), None);
    }

    #[test]
    fn hom_vanishing_examples() {
        assert!(hom_vanishes(&poly(&[(i(1), i(2))]), &poly(&[(i(0), i(2))])));
        assert!(!hom_vanishes(&poly(&[(r(1, 2), i(2))]), &poly(&[(r(1, 2), i(2))])));
        assert!(hom_vanishes(
            &poly(&[(i(1), i(1)), (r(1, 2), i(1))]),
            &poly(&[(r(1, 4), i(4))])
        ));
    }

    #[test]
    fn dual_cloud_examples() {
        // μ_p × Z/p is its own Cartier dual.
        assert_eq!(mult_etale().dual(), mult_etale());
        let ss = cloud(2, i(1), &[]);
        assert_eq!(ss.dual(), ss);
        let c = cloud(3, i(1), &[(i(1), i(1)), (i(2), i(1))]);
        assert_eq!(c.dual().dual(), c);
        assert_eq!(c.dual().hn_polygon(), c.hn_polygon().dual(&Rat::one()));
        // A cloud with an étale quotient of height 2 dualizes to one with a
        // multiplicative subgroup of height 2.
        assert_eq!(c.dual().points(), &[pt(i(0), i(0)), pt(i(1), i(1)), pt(i(2), i(2)), pt(i(3), i(2))]);
    }

    #[test]
    fn fitting_hodge_examples() {
        let o = OmegaDivisors::new(1, 3, vec![vec![i(2), i(1)]]).unwrap();
        assert_eq!(o.fitting_hodge(), poly(&[(i(2), i(1)), (i(1), i(1)), (i(0), i(1))]));
        let o = OmegaDivisors::new(1, 2, vec![vec![i(1), i(1)]]).unwrap();
        assert_eq!(o.fitting_hodge(), poly(&[(i(1), i(2))]));
        let o = OmegaDivisors::new(2, 4, vec![vec![i(1)], vec![i(1), i(1)]]).unwrap();
        assert_eq!(o.fitting_hodge(), poly(&[(i(1), i(1)), (r(1, 2), i(1))]));
    }

    #[test]
    fn omega_validation() {
        assert_eq!(OmegaDivisors::new(2, 3, vec![vec![], vec![]]).unwrap_err().code(), "InvalidOmega");
        assert!(OmegaDivisors::new(1, 1, vec![vec![i(1), i(1)]]).is_err());
        assert!(OmegaDivisors::new(1, 2, vec![vec![i(-1)]]).is_err());
        assert!(OmegaDivisors::new(2, 2, vec![vec![]]).is_err());
    }

    #[test]
    fn hodge_at_p_matches_mu_average() {
        // ω of H[p] for the ordinary GL_2 datum: one copy of O_K/p.
        let o = OmegaDivisors::new(1, 2, vec![vec![i(1)]]).unwrap();
        let c = CaseData::new(CaseKind::El, 1, 2);
        assert_eq!(o.fitting_hodge(), mu_average(&c, &MuData::new(vec![(1, 1)])).unwrap());
    }

    #[test]
    fn tower_constant() {
        let base = cloud(2, i(1), &[(i(1), r(1, 2))]);
        let tower = TorsionTower { d: 1, clouds: (1..=4).map(|m| base.dilate(m)).collect() };
        let lim = tower.limit().unwrap();
        assert_eq!(lim.limit, poly(&[(r(1, 2), i(2))]));
        assert_eq!(lim.levels, 4);
        assert!(lim.violations.is_empty());
    }

    #[test]
    fn tower_follows_lower_level() {
        let c1 = mult_etale();
        // Level 2 is semistable: Q_2 is the chord, strictly below Q_1 at x = 1.
        let c2 = cloud(4, i(2), &[(i(2), i(1))]);
        let tower = TorsionTower { d: 1, clouds: vec![c1, c2] };
        let lim = tower.limit().unwrap();
        assert_eq!(lim.limit, poly(&[(r(1, 2), i(2))]));
        assert_eq!(lim.limit.evaluate(&i(1)).unwrap(), r(1, 2));
        assert!(lim.violations.is_empty());
    }

    #[test]
    fn tower_reports_chain_violations() {
        let c1 = cloud(2, i(1), &[]);
        let c2 = cloud(4, i(2), &[(i(2), i(2))]);
        let lim = TorsionTower { d: 1, clouds: vec![c1, c2] }.limit().unwrap();
        assert_eq!(lim.violations, vec![ChainViolation { i: 1, m: 2, x: i(1) }]);
        assert_eq!(lim.limit, poly(&[(r(1, 2), i(2))]));
    }

    #[test]
    fn tower_sampled_on_polygon() {
        let p = poly(&[(i(1), i(1)), (r(1, 2), i(2)), (i(0), i(1))]);
        let verts: Vec<Point> = p.vertices();
        let clouds = (1..=3u64)
            .map(|m| {
                let k = Rat::from(m);
                let pts = verts.iter().map(|v| pt(&v.x * &k, &v.y * &k)).collect();
                SubobjectCloud::new(FfgsInvariants { ht: 4 * m, deg: i(2) * &k }, pts).unwrap()
            })
            .collect();
        let lim = TorsionTower { d: 1, clouds }.limit().unwrap();
        assert_eq!(lim.limit, p);
    }

    #[test]
    fn tower_incoherent() {
        let c1 = cloud(2, i(1), &[]);
        let c2 = cloud(3, i(1), &[]);
        let err = TorsionTower { d: 1, clouds: vec![c1.clone(), c2] }.limit().unwrap_err();
        assert_eq!(err.code(), "IncoherentTower");
        let err = TorsionTower { d: 1, clouds: vec![] }.limit().unwrap_err();
        assert_eq!(err.code(), "IncoherentTower");
        let c3 = cloud(4, i(1), &[]);
        assert!(TorsionTower { d: 1, clouds: vec![c1.clone(), c3] }.limit().is_err());
        assert!(TorsionTower { d: 4, clouds: vec![c1] }.limit().is_err());
    }

    #[test]
    fn chain_examples() {
        let ord = poly(&[(i(1), i(1)), (i(0), i(1))]);
        let ss = poly(&[(r(1, 2), i(2))]);
        let v = chain_check(&ss, &ord, &ord);
        assert!(v.hn_leq_newton && v.newton_leq_hodge);
        assert!(chain_check(&ord, &ord, &ord).holds());
        let v = chain_check(&ord, &ss, &ord);
        assert!(!v.hn_leq_newton);
        assert_eq!(v.hn_newton_witness, Some(i(1)));
        assert!(v.newton_leq_hodge);
    }

    #[test]
    fn json_schemas() {
        let c: SubobjectCloud =
            serde_json::from_str(r#"{"ht":2,"deg":[1,1],"points":[[[1,1],[1,1]]]}"#).unwrap();
        assert_eq!(c, mult_etale());
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"ht":2,"deg":[1,1],"points":[[[0,1],[0,1]],[[1,1],[1,1]],[[2,1],[1,1]]]}"#
        );
        let o: OmegaDivisors =
            serde_json::from_str(r#"{"d":2,"ht":4,"per_tau":[[[1,1]],[[1,1],[1,1]]]}"#).unwrap();
        assert_eq!(o.fitting_hodge(), poly(&[(i(1), i(1)), (r(1, 2), i(1))]));
        let t: TorsionTower = serde_json::from_str(
            r#"{"d":1,"clouds":[{"ht":2,"deg":1,"points":[]},{"ht":4,"deg":2,"points":[]}]}"#,
        )
        .unwrap();
        assert_eq!(t.limit().unwrap().limit, poly(&[(r(1, 2), i(2))]));
    }
}
