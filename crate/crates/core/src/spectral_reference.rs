//! Closed-form reference spectra and essential-spectrum thresholds.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::femassembly::SectorLabel;
use crate::geometry::{DomainKind, DomainSpec};
use crate::{Error, Result};

const PI2: f64 = PI * PI;

/// Bottom of the essential spectrum of every operator of the problem at
/// pair width `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCatalog {
    pub d: f64,
    pub pair_full_and_symmetric: f64,
    pub pair_antisymmetric: f64,
    pub arms_infimum: f64,
}

impl ThresholdCatalog {
    pub fn new(d: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "d must be positive, got {d}"
            )));
        }
        let base = PI2 / (2.0 * d * d);
        Ok(Self {
            d,
            pair_full_and_symmetric: base,
            pair_antisymmetric: 4.0 * base,
            arms_infimum: base,
        })
    }

    /// Threshold of a cross built from parameter `de` (arms of width `√2 de`).
    pub fn cross(&self, de: f64) -> f64 {
        PI2 / (2.0 * de * de)
    }

    pub fn sector(&self, sector: SectorLabel) -> f64 {
        match sector {
            SectorLabel::Full | SectorLabel::Symmetric => self.pair_full_and_symmetric,
            SectorLabel::Antisymmetric => self.pair_antisymmetric,
        }
    }
}

/// The first `count` Neumann eigenvalues of the square of side `√2 d`,
/// `π²(m² + n²)/(2d²)` with multiplicity.
pub fn square_neumann_spectrum(d: f64, count: usize) -> Vec<f64> {
    if count == 0 {
        return Vec::new();
    }
    // every (m, n) with m, n < count covers the lowest `count` levels
    let mut levels: Vec<u64> = Vec::with_capacity(count * count);
    for m in 0..count as u64 {
        for n in 0..count as u64 {
            levels.push(m * m + n * n);
        }
    }
    levels.sort_unstable();
    levels.truncate(count);
    levels
        .into_iter()
        .map(|s| PI2 * s as f64 / (2.0 * d * d))
        .collect()
}

/// Lowest transverse Dirichlet mode of an infinite strip: `π² / width²`.
pub fn strip_threshold(width: f64) -> f64 {
    PI2 / (width * width)
}

/// `π²/(2d²)` for the full and symmetric sectors, `2π²/d²` for the
/// antisymmetric one.
pub fn sector_threshold(sector: SectorLabel, d: f64) -> f64 {
    let base = PI2 / (2.0 * d * d);
    match sector {
        SectorLabel::Full | SectorLabel::Symmetric => base,
        SectorLabel::Antisymmetric => 4.0 * base,
    }
}

/// Essential-spectrum threshold of the domain actually meshed: for the
/// axis-aligned cross, square and arms it is recomputed from the snapped
/// strip width; for the diagonal cross from its effective `d`. For the pair
/// domain this is the threshold of `sector`.
pub fn domain_threshold(spec: &DomainSpec, sector: SectorLabel) -> f64 {
    match spec.kind() {
        DomainKind::PairDomain => sector_threshold(sector, spec.params().d()),
        DomainKind::CrossDiagonal => sector_threshold(SectorLabel::Full, spec.effective_d()),
        DomainKind::CrossAxis | DomainKind::NeumannSquare | DomainKind::ArmsDomain => {
            let w = spec
                .snapped_half_width()
                .unwrap_or_else(|| spec.half_width().unwrap_or(0.0));
            strip_threshold(2.0 * w)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_levels_with_multiplicity() {
        let s = square_neumann_spectrum(1.0, 6);
        let expect = [0.0, 0.5, 0.5, 1.0, 2.0, 2.0].map(|c| c * PI2);
        for (a, b) in s.iter().zip(expect) {
            assert!(libm::fabs(a - b) < 1e-12, "{a} vs {b}");
        }
        assert!(libm::fabs(s[1] - 4.934802200544679) < 1e-12);
        assert_eq!(square_neumann_spectrum(2.0, 1), [0.0]);
    }

    #[test]
    fn thresholds_agree() {
        assert!(libm::fabs(strip_threshold(core::f64::consts::SQRT_2) - PI2 / 2.0) < 1e-12);
        assert!(libm::fabs(strip_threshold(core::f64::consts::SQRT_2 / 2.0) - 2.0 * PI2) < 1e-12);
        assert!(libm::fabs(sector_threshold(SectorLabel::Antisymmetric, 2.0) - PI2 / 2.0) < 1e-12);
        for d in [0.5, 1.0, 3.0] {
            let a = sector_threshold(SectorLabel::Antisymmetric, d);
            assert!(
                libm::fabs(a - strip_threshold(core::f64::consts::SQRT_2 * d / 2.0)) < 1e-12 * a
            );
            let c = ThresholdCatalog::new(d).unwrap();
            assert_eq!(c.pair_antisymmetric, 4.0 * c.pair_full_and_symmetric);
        }
    }
}
