//! Exact polygon calculus for p-divisible groups with EL/PEL structure.
//!
//! Everything is computed with exact rationals: Newton polygons of
//! isocrystals, Hodge polygons of minuscule cocharacters, Harder-Narasimhan
//! polygons of finite flat group schemes, the Kottwitz set `B(G, μ)`, and the
//! Hodge-Newton decomposition at a contact break point.

pub mod el_pel;
pub mod error;
pub mod ffgs;
pub mod hodge_newton;
pub mod isocrystal;
pub mod polygon;
pub mod rat;

pub use el_pel::{
    enumerate_b, enumerate_b_with, is_basic, mu_average, rz_dimension, strata_report, strata_report_with,
    validate_mu, CaseData, CaseKind, EnumerationConfig, GroupDatum, MuData, MuValidation, NewtonPoint,
    StrataReport, StratumEntry,
};
pub use error::{Error, Result};
pub use ffgs::{
    chain_check, hom_vanishes, mu_max_min, ChainVerdict, ChainViolation, FfgsInvariants, OmegaDivisors,
    SubobjectCloud, TorsionTower, TowerLimit,
};
pub use hodge_newton::{
    admissible_check, decompose, detect_hn, hn_passes_contacts, verify, AdmissibilityVerdict, ContactPair,
    FilteredInvariant, HNDecomposition, HodgeData, VerificationReport,
};
pub use isocrystal::{DualMode, FIsocrystal, SlopeEntry, SlopeMultiset};
pub use polygon::{concave_envelope, ConcavePolygon, Point, SlopeSeg};
pub use rat::Rat;

/// The Hodge polygon of `H[p]` computed from `μ`; it coincides with `μ̄`.
pub fn hodge_from_mu_at_p(case: &CaseData, mu: &MuData) -> Result<ConcavePolygon> {
    mu_average(case, mu)
}
