//! Slope data of isocrystals and their Newton polygons.
//!
//! An isocrystal is modelled by its Dieudonné-Manin slope multiset. An
//! `O_F`-action of degree `d` is modelled by requiring every slope
//! multiplicity to be divisible by `d` and by normalizing polygons by `d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{ConcavePolygon, Point};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlopeEntry {
    #[serde(rename = "lambda")]
    pub slope: Rat,
    pub mult: u64,
}

fn default_true() -> bool {
    true
}

/// Slopes with multiplicities, sorted by decreasing slope, slopes distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSlopes")]
pub struct SlopeMultiset {
    slopes: Vec<SlopeEntry>,
    strict_dm: bool,
}

#[derive(Deserialize)]
struct RawSlopes {
    slopes: Vec<SlopeEntry>,
    #[serde(default = "default_true")]
    strict_dm: bool,
}

impl TryFrom<RawSlopes> for SlopeMultiset {
    type Error = Error;

    fn try_from(raw: RawSlopes) -> Result<SlopeMultiset> {
        SlopeMultiset::new(raw.slopes.into_iter().map(|e| (e.slope, e.mult)), raw.strict_dm)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DualMode {
    /// `λ ↦ 1 − λ`, Cartier duality of p-divisible groups.
    PDual,
    /// `λ ↦ −λ`, plain isocrystal duality.
    Minus,
}

impl SlopeMultiset {
    /// Repeated slopes are merged. With `strict_dm`, a slope `a/b` in lowest
    /// terms must have multiplicity divisible by `b`.
    pub fn new<I>(entries: I, strict_dm: bool) -> Result<SlopeMultiset>
    where
        I: IntoIterator<Item = (Rat, u64)>,
    {
        let mut slopes: Vec<SlopeEntry> = Vec::new();
        for (slope, mult) in entries {
            if mult == 0 {
                return Err(Error::InvalidSlopes(format!("slope {slope} has multiplicity 0")));
            }
            slopes.push(SlopeEntry { slope, mult });
        }
        slopes.sort_by(|a, b| b.slope.cmp(&a.slope));
        let mut merged: Vec<SlopeEntry> = Vec::with_capacity(slopes.len());
        for e in slopes {
            match merged.last_mut() {
                Some(last) if last.slope == e.slope => last.mult += e.mult,
                _ => merged.push(e),
            }
        }
        if strict_dm {
            for e in &merged {
                let den = e.slope.denom_u64().unwrap_or(u64::MAX);
                if e.mult % den != 0 {
                    return Err(Error::InvalidSlopes(format!(
                        "slope {} has multiplicity {} not divisible by its denominator",
                        e.slope, e.mult
                    )));
                }
            }
        }
        Ok(SlopeMultiset { slopes: merged, strict_dm })
    }

    pub fn empty(strict_dm: bool) -> SlopeMultiset {
        SlopeMultiset { slopes: Vec::new(), strict_dm }
    }

    pub fn entries(&self) -> &[SlopeEntry] {
        &self.slopes
    }

    pub fn strict_dm(&self) -> bool {
        self.strict_dm
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }

    pub fn height(&self) -> u64 {
        self.slopes.iter().map(|e| e.mult).sum()
    }

    pub fn newton_polygon(&self) -> ConcavePolygon {
        ConcavePolygon::from_slopes(
            self.slopes.iter().map(|e| (e.slope.clone(), Rat::from(e.mult))),
        )
        .expect("multiplicities are positive")
    }

    /// `Σ λ · mult`.
    pub fn t_n(&self) -> Rat {
        self.slopes.iter().map(|e| &e.slope * Rat::from(e.mult)).sum()
    }

    pub fn dual(&self, mode: DualMode) -> SlopeMultiset {
        let one = Rat::one();
        let map = |s: &Rat| match mode {
            DualMode::PDual => &one - s,
            DualMode::Minus => -s,
        };
        SlopeMultiset::new(self.slopes.iter().map(|e| (map(&e.slope), e.mult)), self.strict_dm)
            .expect("denominators are preserved")
    }

    /// Every slope lies in `[0, 1]`.
    pub fn p_divisible_check(&self) -> bool {
        let (zero, one) = (Rat::zero(), Rat::one());
        self.slopes.iter().all(|e| e.slope >= zero && e.slope <= one)
    }

    /// Slope-multiset union.
    pub fn union(&self, other: &SlopeMultiset) -> SlopeMultiset {
        SlopeMultiset::new(
            self.slopes
                .iter()
                .chain(other.slopes.iter())
                .map(|e| (e.slope.clone(), e.mult)),
            self.strict_dm && other.strict_dm,
        )
        .expect("union of valid multisets")
    }
}

/// An isocrystal with an action of an unramified extension of degree `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIsocrystal")]
pub struct FIsocrystal {
    #[serde(flatten)]
    slopes: SlopeMultiset,
    d: u64,
}

#[derive(Deserialize)]
struct RawIsocrystal {
    slopes: Vec<SlopeEntry>,
    #[serde(default = "default_one")]
    d: u64,
    #[serde(default = "default_true")]
    strict_dm: bool,
}

fn default_one() -> u64 {
    1
}

impl TryFrom<RawIsocrystal> for FIsocrystal {
    type Error = Error;

    fn try_from(raw: RawIsocrystal) -> Result<FIsocrystal> {
        let slopes = SlopeMultiset::try_from(RawSlopes { slopes: raw.slopes, strict_dm: raw.strict_dm })?;
        FIsocrystal::new(slopes, raw.d)
    }
}

impl FIsocrystal {
    pub fn new(slopes: SlopeMultiset, d: u64) -> Result<FIsocrystal> {
        if d == 0 {
            return Err(Error::InvalidIsocrystal("d must be positive".into()));
        }
        if let Some(e) = slopes.entries().iter().find(|e| e.mult % d != 0) {
            return Err(Error::InvalidIsocrystal(format!(
                "slope {} has multiplicity {} not divisible by d = {d}",
                e.slope, e.mult
            )));
        }
        Ok(FIsocrystal { slopes, d })
    }

    /// Builds the isocrystal whose normalized Newton polygon is `poly`.
    pub fn from_normalized(poly: &ConcavePolygon, d: u64, strict_dm: bool) -> Result<FIsocrystal> {
        let dr = Rat::from(d);
        let mut entries = Vec::new();
        for s in poly.segments() {
            let m = &s.width * &dr;
            let mult = m
                .to_i64()
                .filter(|v| *v > 0)
                .ok_or_else(|| {
                    Error::InvalidIsocrystal(format!("width {} times d = {d} is not an integer", s.width))
                })?;
            entries.push((s.slope.clone(), mult as u64));
        }
        FIsocrystal::new(SlopeMultiset::new(entries, strict_dm)?, d)
    }

    pub fn slopes(&self) -> &SlopeMultiset {
        &self.slopes
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn height(&self) -> u64 {
        self.slopes.height()
    }

    /// Height divided by `d`, the rank over `F`.
    pub fn rank(&self) -> u64 {
        self.height() / self.d
    }

    /// `x ↦ (1/d) Newt(d·x)`, a polygon over `[0, h/d]`.
    pub fn normalized_newton(&self) -> ConcavePolygon {
        self.slopes.newton_polygon().normalize(self.d)
    }

    pub fn t_n(&self) -> Rat {
        self.slopes.t_n()
    }

    pub fn dual(&self, mode: DualMode) -> FIsocrystal {
        FIsocrystal { slopes: self.slopes.dual(mode), d: self.d }
    }

    /// Splits into the part of the normalized Newton polygon up to `x` and the
    /// remainder.
    pub fn hn_split(&self, x: &Point) -> Result<(FIsocrystal, FIsocrystal)> {
        let unsplittable = |reason: String| Error::UnsplittableAt {
            x: x.x.clone(),
            y: x.y.clone(),
            reason,
        };
        let poly = self.normalized_newton();
        if !poly.contains_point(x) {
            return Err(Error::NotOnPolygon { x: x.x.clone(), y: x.y.clone() });
        }
        let target = (&x.x * Rat::from(self.d))
            .to_i64()
            .ok_or_else(|| unsplittable(format!("d·x = {} is not an integer", &x.x * Rat::from(self.d))))?
            as u64;

        let strict = self.slopes.strict_dm();
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut taken = 0u64;
        for e in self.slopes.entries() {
            if taken >= target {
                right.push((e.slope.clone(), e.mult));
            } else if taken + e.mult <= target {
                left.push((e.slope.clone(), e.mult));
                taken += e.mult;
            } else {
                let part = target - taken;
                let rest = e.mult - part;
                if part % self.d != 0 {
                    return Err(unsplittable(format!(
                        "slope {} block would split as {part} + {rest}, not divisible by d = {}",
                        e.slope, self.d
                    )));
                }
                if strict {
                    let den = e.slope.denom_u64().unwrap_or(u64::MAX);
                    if part % den != 0 {
                        return Err(unsplittable(format!(
                            "slope {} block would split as {part} + {rest}, violating integrality",
                            e.slope
                        )));
                    }
                }
                left.push((e.slope.clone(), part));
                right.push((e.slope.clone(), rest));
                taken = target;
            }
        }
        let a = FIsocrystal::new(SlopeMultiset::new(left, strict)?, self.d)?;
        let b = FIsocrystal::new(SlopeMultiset::new(right, strict)?, self.d)?;
        Ok((a, b))
    }

    /// Three pieces: up to `x`, between `x` and `xhat`, and from `xhat` on.
    /// The middle piece is empty when `x == xhat`.
    pub fn three_way_split(
        &self,
        x: &Point,
        xhat: &Point,
    ) -> Result<(FIsocrystal, FIsocrystal, FIsocrystal)> {
        if x.x > xhat.x {
            return Err(Error::UnsplittableAt {
                x: x.x.clone(),
                y: x.y.clone(),
                reason: format!("x lies after xhat ({xhat:?})"),
            });
        }
        let (first, rest) = self.hn_split(x)?;
        let shifted = Point::new(&xhat.x - &x.x, &xhat.y - &x.y);
        let (middle, last) = rest.hn_split(&shifted).map_err(|e| match e {
            Error::NotOnPolygon { .. } => Error::NotOnPolygon { x: xhat.x.clone(), y: xhat.y.clone() },
            Error::UnsplittableAt { reason, .. } => Error::UnsplittableAt {
                x: xhat.x.clone(),
                y: xhat.y.clone(),
                reason,
            },
            other => other,
        })?;
        Ok((first, middle, last))
    }

    pub fn union(&self, other: &FIsocrystal) -> FIsocrystal {
        FIsocrystal { slopes: self.slopes.union(&other.slopes), d: self.d }
    }
}
