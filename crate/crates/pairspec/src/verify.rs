//! The full verification suite: one isolated eigenvalue per exchange sector,
//! the cross comparisons behind it, and the bracketing of the axis cross.

use pairspec_core::bracketing::dominates;
use pairspec_core::{
    assemble_domain, build_bracket_pair, domain_threshold, make_domain, reduce_to_sector,
    AssembledSystem, DomainKind, EigenOptions, EmbeddingMap, PairParameters, ScaleVariant,
    SectorLabel, SpectralResult,
};
use serde::Serialize;

use crate::error::{PairspecError, Result};
use crate::extrapolate::{extrapolate, Extrapolation};
use crate::solve::DEFAULT_DELTA;

/// Eigenpairs compared in the min-max domination checks.
pub const DOMINATION_DEPTH: usize = 5;
/// Energies on the bracketing grid.
pub const BRACKET_POINTS: usize = 20;
/// Simplicity floor: `λ₂ - λ₁` must be at least this fraction of the
/// threshold.
pub const GAP_FLOOR: f64 = 1e-3;
/// Absolute slack of the eigenvalue orderings, on top of solver residuals.
pub const ORDERING_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub d: f64,
    /// Defaults to `d/32`.
    pub spacing: Option<f64>,
    /// Defaults to `8d`.
    pub truncation: Option<f64>,
    pub delta: f64,
    pub tolerance: f64,
    pub seed: u64,
}

impl VerifyConfig {
    pub fn new(d: f64) -> Self {
        Self {
            d,
            spacing: None,
            truncation: None,
            delta: DEFAULT_DELTA,
            tolerance: 1e-8,
            seed: 0,
        }
    }

    pub fn params(&self) -> Result<PairParameters> {
        let h = self.spacing.unwrap_or(self.d / 32.0);
        let l = self.truncation.unwrap_or(8.0 * self.d);
        Ok(PairParameters::new(self.d, l, h)?)
    }

    fn options(&self) -> EigenOptions {
        EigenOptions {
            tolerance: self.tolerance,
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorReport {
    pub sector: String,
    pub threshold: f64,
    pub isolated_count: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Richardson estimate of `λ₁` from spacings `4h`, `2h`, `h`.
    pub lambda1_extrapolated: Option<Extrapolation>,
    /// `λ₂ - (1 - δ)·threshold`.
    pub lambda2_margin: f64,
    /// `λ₂ - λ₁`.
    pub gap: f64,
    pub gap_floor: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossAxisReport {
    pub snapped_width: f64,
    pub threshold: f64,
    pub isolated_count: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub pass: bool,
}

/// `λ_n(pair sector) >= λ_n(cross)` and the embedding energy identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub name: String,
    pub pair_eigenvalues: Vec<f64>,
    pub cross_eigenvalues: Vec<f64>,
    pub slack: f64,
    /// Largest relative difference between source and image Rayleigh
    /// quotients over the probe vectors.
    pub rayleigh_max_rel_diff: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketRow {
    #[serde(rename = "E")]
    pub energy: f64,
    pub cross: usize,
    pub square: usize,
    pub arms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketingReport {
    pub threshold: f64,
    pub rows: Vec<BracketRow>,
    pub pass: bool,
}

/// A statement checked and reported without affecting `pass`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub d: f64,
    #[serde(rename = "L")]
    pub truncation: f64,
    pub h: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub sectors: Vec<SectorReport>,
    pub cross_axis: Option<CrossAxisReport>,
    pub comparisons: Vec<ComparisonReport>,
    pub bracketing: Option<BracketingReport>,
    pub observations: Vec<Observation>,
    /// Names of the checks that did not pass.
    pub failing_checks: Vec<String>,
    /// Suites that could not run, with the reason.
    pub errors: Vec<String>,
    pub pass: bool,
}

/// Runs every suite. Suites that error are listed in `errors` and count as
/// failing; the report itself is only an `Err` for invalid configuration.
pub fn verify_theorem(config: &VerifyConfig) -> Result<VerificationReport> {
    if !(0.0..1.0).contains(&config.delta) {
        return Err(PairspecError::Input(format!(
            "delta must lie in [0, 1), got {}",
            config.delta
        )));
    }
    let params = config.params()?;
    let mut report = VerificationReport {
        d: params.d(),
        truncation: params.truncation(),
        h: params.spacing(),
        delta: config.delta,
        tolerance: config.tolerance,
        seed: config.seed,
        sectors: Vec::new(),
        cross_axis: None,
        comparisons: Vec::new(),
        bracketing: None,
        observations: Vec::new(),
        failing_checks: Vec::new(),
        errors: Vec::new(),
        pass: false,
    };

    let mut sector_runs: Vec<(SectorLabel, AssembledSystem, SpectralResult)> = Vec::new();
    match pair_sectors(config, params) {
        Ok(runs) => {
            for (sector, system, result, sector_report) in runs {
                if !sector_report.pass {
                    report.failing_checks.push(format!("sector {sector}"));
                }
                report.sectors.push(sector_report);
                sector_runs.push((sector, system, result));
            }
        }
        Err(e) => report.errors.push(format!("pair sectors: {e}")),
    }

    for (name, scale) in [
        ("cross-diag(d)", ScaleVariant::Unit),
        ("cross-diag(d/2)", ScaleVariant::Half),
    ] {
        let run = || -> Result<Vec<ComparisonReport>> {
            let spec = make_domain(DomainKind::CrossDiagonal, params, scale)?;
            let cross = assemble_domain(&spec)?;
            let lower = cross.lowest_eigenpairs(DOMINATION_DEPTH, &config.options())?;
            let mut out = Vec::new();
            for (sector, system, upper) in &sector_runs {
                let matches =
                    (*sector == SectorLabel::Antisymmetric) == (scale == ScaleVariant::Half);
                if matches {
                    out.push(compare(name, *sector, system, upper, &cross, &lower)?);
                }
            }
            Ok(out)
        };
        match run() {
            Ok(reports) => {
                for c in reports {
                    if !c.pass {
                        report.failing_checks.push(c.name.clone());
                    }
                    report.comparisons.push(c);
                }
            }
            Err(e) => report.errors.push(format!("{name} comparison: {e}")),
        }
    }

    match cross_axis(config, params) {
        Ok(c) => {
            if !c.pass {
                report
                    .failing_checks
                    .push("cross-axis isolated eigenvalue".into());
            }
            report.cross_axis = Some(c);
        }
        Err(e) => report.errors.push(format!("cross-axis: {e}")),
    }

    match bracketing(params) {
        Ok(b) => {
            if !b.pass {
                report.failing_checks.push("bracketing".into());
            }
            report.bracketing = Some(b);
        }
        Err(e) => report.errors.push(format!("bracketing: {e}")),
    }

    let lambda1 = |s: SectorLabel| {
        report
            .sectors
            .iter()
            .find(|r| r.sector == s.name())
            .and_then(|r| r.eigenvalues.first().copied())
    };
    if let (Some(f), Some(s), Some(a)) = (
        lambda1(SectorLabel::Full),
        lambda1(SectorLabel::Symmetric),
        lambda1(SectorLabel::Antisymmetric),
    ) {
        let m = s.min(a);
        let holds = (f - m).abs() <= 1e-9 * f.abs() + config.tolerance && s <= a;
        report.observations.push(Observation {
            name: "full ground state is exchange-symmetric".into(),
            holds,
            detail: format!("lambda1: full {f:?}, s {s:?}, a {a:?}"),
        });
    }

    report.pass = report.errors.is_empty()
        && report.failing_checks.is_empty()
        && report.sectors.len() == SectorLabel::ALL.len();
    Ok(report)
}

type SectorRun = (SectorLabel, AssembledSystem, SpectralResult, SectorReport);

fn pair_sectors(config: &VerifyConfig, params: PairParameters) -> Result<Vec<SectorRun>> {
    let spec = make_domain(DomainKind::PairDomain, params, ScaleVariant::Unit)?;
    let full = assemble_domain(&spec)?;
    let mut out = Vec::new();
    for sector in SectorLabel::ALL {
        let system = reduce_to_sector(&full, sector)?;
        let result = system.lowest_eigenpairs(DOMINATION_DEPTH, &config.options())?;
        let threshold = domain_threshold(&spec, sector);
        let cut = (1.0 - config.delta) * threshold;
        let isolated_count = system.inertia_counter()?.count_below_perturbed(cut)?.0;
        let (l1, l2) = (result.eigenvalues[0], result.eigenvalues[1]);
        let gap = l2 - l1;
        let gap_floor = GAP_FLOOR * threshold;
        let sector_report = SectorReport {
            sector: sector.name().into(),
            threshold,
            isolated_count,
            eigenvalues: result.eigenvalues.clone(),
            residuals: result.residuals.clone(),
            lambda1_extrapolated: extrapolated_ground_state(config, params, sector)?,
            lambda2_margin: l2 - cut,
            gap,
            gap_floor,
            pass: isolated_count == 1 && l2 >= cut && gap >= gap_floor,
        };
        out.push((sector, system, result, sector_report));
    }
    Ok(out)
}

/// `λ₁` at `4h`, `2h`, `h` extrapolated; `None` when the coarser meshes do
/// not conform to `d` and `L`.
fn extrapolated_ground_state(
    config: &VerifyConfig,
    params: PairParameters,
    sector: SectorLabel,
) -> Result<Option<Extrapolation>> {
    let h = params.spacing();
    let spacings = [4.0 * h, 2.0 * h, h];
    let mut values = Vec::new();
    for s in spacings {
        let Ok(p) = PairParameters::new(params.d(), params.truncation(), s) else {
            return Ok(None);
        };
        let Ok(spec) = make_domain(DomainKind::PairDomain, p, ScaleVariant::Unit) else {
            return Ok(None);
        };
        let system = reduce_to_sector(&assemble_domain(&spec)?, sector)?;
        values.push(system.lowest_eigenpairs(1, &config.options())?.eigenvalues[0]);
    }
    Ok(extrapolate(&spacings, &values).ok())
}

/// Deterministic probe vectors with entries in `(-1, 1)`.
fn probe(n: usize, j: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = (i as f64 * 12.9898 + j as f64 * 78.233).sin() * 43758.5453;
            2.0 * (t - t.floor()) - 1.0
        })
        .collect()
}

fn compare(
    cross_name: &str,
    sector: SectorLabel,
    pair: &AssembledSystem,
    upper: &SpectralResult,
    cross: &AssembledSystem,
    lower: &SpectralResult,
) -> Result<ComparisonReport> {
    let map = EmbeddingMap::new(pair.clone(), cross.clone())?;
    let mut worst: f64 = 0.0;
    let mut vectors: Vec<Vec<f64>> = upper.eigenvectors.clone();
    vectors.extend((0..8).map(|j| probe(pair.dim(), j)));
    for u in &vectors {
        let (s, t) = map.check_rayleigh_preservation(u)?;
        worst = worst.max((s - t).abs() / s.abs().max(f64::MIN_POSITIVE));
    }
    let slack = ORDERING_SLACK + upper.max_residual() + lower.max_residual();
    let ordered = dominates(&upper.eigenvalues, &lower.eigenvalues, slack);
    Ok(ComparisonReport {
        name: format!("pair sector {sector} dominates {cross_name}"),
        pair_eigenvalues: upper.eigenvalues.clone(),
        cross_eigenvalues: lower.eigenvalues.clone(),
        slack,
        rayleigh_max_rel_diff: worst,
        pass: ordered && worst <= 1e-9,
    })
}

fn cross_axis(config: &VerifyConfig, params: PairParameters) -> Result<CrossAxisReport> {
    let spec = make_domain(DomainKind::CrossAxis, params, ScaleVariant::Unit)?;
    let system = assemble_domain(&spec)?;
    let threshold = domain_threshold(&spec, SectorLabel::Full);
    let cut = (1.0 - config.delta) * threshold;
    let result = system.lowest_eigenpairs(3, &config.options())?;
    let isolated_count = system.inertia_counter()?.count_below_perturbed(cut)?.0;
    let gap = result.eigenvalues[1] - result.eigenvalues[0];
    Ok(CrossAxisReport {
        snapped_width: spec.snapped_half_width().unwrap_or(f64::NAN),
        threshold,
        isolated_count,
        pass: isolated_count == 1 && result.eigenvalues[1] >= cut && gap >= GAP_FLOOR * threshold,
        eigenvalues: result.eigenvalues,
        residuals: result.residuals,
    })
}

/// Energies `i/(n+1)·threshold`, `i = 1..n`.
pub fn bracket_grid(threshold: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| threshold * i as f64 / (n + 1) as f64)
        .collect()
}

fn bracketing(params: PairParameters) -> Result<BracketingReport> {
    let pair = build_bracket_pair(params)?;
    let spec = pair.cross.domain();
    let threshold = domain_threshold(spec, SectorLabel::Full);
    let counts = pair.counts(&bracket_grid(threshold, BRACKET_POINTS))?;
    let pass = counts.iter().all(|c| c.holds() && c.arms == 0);
    let rows = counts
        .iter()
        .map(|c| BracketRow {
            energy: c.energy,
            cross: c.cross,
            square: c.square,
            arms: c.arms,
        })
        .collect();
    Ok(BracketingReport {
        threshold,
        rows,
        pass,
    })
}
