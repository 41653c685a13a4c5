//! Shared inputs for the criterion benches.

use hnpoly_core::{CaseData, CaseKind, FfgsInvariants, MuData, Point, Rat, SubobjectCloud};

/// Signature `(1, n-1)` unitary datum over the quadratic unramified extension.
pub fn unitary(n: u64) -> (CaseData, MuData) {
    (CaseData::new(CaseKind::PelU, 2, n), MuData::new(vec![(1, n - 1), (n - 1, 1)]))
}

pub fn siegel(g: u64) -> (CaseData, MuData) {
    (CaseData::new(CaseKind::PelC, 1, 2 * g), MuData::new(vec![(g, g)]))
}

/// A deterministic cloud of height `ht` with a point at every height,
/// lying on or below the parabola-like profile `x - x^2/(2 ht)`.
pub fn dense_cloud(ht: u64) -> SubobjectCloud {
    let h = Rat::from(ht);
    let deg = &h / Rat::int(2);
    let points = (0..=ht)
        .flat_map(|x| {
            let xr = Rat::from(x);
            let top = &xr - &xr * &xr / (Rat::int(2) * &h);
            let floor = Rat::zero().max(&deg - (&h - &xr));
            let mid = (&top + &floor) / Rat::int(2);
            [Point::new(xr.clone(), top), Point::new(xr, mid)]
        })
        .collect();
    SubobjectCloud::new(FfgsInvariants { ht, deg }, points).expect("valid by construction")
}
