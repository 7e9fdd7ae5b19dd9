//! Single-domain eigenvalue solves and counts.

use std::io::Write;

use pairspec_core::{
    assemble_domain, domain_threshold, make_domain, reduce_to_sector, AssembledSystem, DomainKind,
    DomainSpec, EigenOptions, PairParameters, ScaleVariant, SectorLabel,
};
use serde::Serialize;

use crate::error::{PairspecError, Result};

/// Default relative margin below a threshold for counting isolated
/// eigenvalues.
pub const DEFAULT_DELTA: f64 = 0.02;

/// A domain, sector and discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    pub domain: DomainKind,
    pub sector: SectorLabel,
    pub d: f64,
    /// Truncation length; defaults to `8d`.
    pub truncation: Option<f64>,
    /// Mesh spacing; defaults to `d/32`.
    pub spacing: Option<f64>,
}

impl Problem {
    pub fn params(&self) -> Result<PairParameters> {
        let l = self.truncation.unwrap_or(8.0 * self.d);
        let h = self.spacing.unwrap_or(self.d / 32.0);
        Ok(PairParameters::new(self.d, l, h)?)
    }

    pub fn spec(&self) -> Result<DomainSpec> {
        if self.sector != SectorLabel::Full && self.domain != DomainKind::PairDomain {
            return Err(PairspecError::Input(format!(
                "sector {} only applies to the pair domain",
                self.sector
            )));
        }
        Ok(make_domain(
            self.domain,
            self.params()?,
            ScaleVariant::Unit,
        )?)
    }

    pub fn assemble(&self) -> Result<AssembledSystem> {
        let full = assemble_domain(&self.spec()?)?;
        Ok(reduce_to_sector(&full, self.sector)?)
    }
}

/// Number of eigenvalues each domain has below its threshold.
pub fn expected_isolated(kind: DomainKind) -> usize {
    match kind {
        DomainKind::ArmsDomain => 0,
        _ => 1,
    }
}

/// Output of `solve`, in canonical field order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub domain: String,
    pub sector: String,
    pub d: f64,
    #[serde(rename = "L")]
    pub truncation: f64,
    pub h: f64,
    pub snapped_width: Option<f64>,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub threshold: f64,
    pub isolated_count: usize,
    pub pass: bool,
    pub delta: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub dimension: usize,
    /// `(E, number of eigenvalues below E)` from the certifying inertia
    /// counts.
    pub count_thresholds: Vec<(f64, usize)>,
}

/// Lowest `k` eigenpairs plus the isolated count below `(1 - delta)` times
/// the threshold. `pass` holds when the count is the expected one and, for
/// `k >= 2`, the next eigenvalue clears the margin.
pub fn solve(
    problem: &Problem,
    k: usize,
    delta: f64,
    options: &EigenOptions,
) -> Result<SolveReport> {
    if !(0.0..1.0).contains(&delta) {
        return Err(PairspecError::Input(format!(
            "delta must lie in [0, 1), got {delta}"
        )));
    }
    let spec = problem.spec()?;
    let system = problem.assemble()?;
    let result = system.lowest_eigenpairs(k, options)?;
    let threshold = domain_threshold(&spec, problem.sector);
    let cut = (1.0 - delta) * threshold;
    let isolated_count = system.inertia_counter()?.count_below_perturbed(cut)?.0;
    let expected = expected_isolated(problem.domain);
    let next_clear = result.eigenvalues.get(expected).is_none_or(|&l| l >= cut);
    let params = spec.params();
    Ok(SolveReport {
        domain: problem.domain.to_string(),
        sector: problem.sector.to_string(),
        d: params.d(),
        truncation: params.truncation(),
        h: params.spacing(),
        snapped_width: spec.snapped_half_width(),
        eigenvalues: result.eigenvalues,
        residuals: result.residuals,
        threshold,
        isolated_count,
        pass: isolated_count == expected && next_clear,
        delta,
        tolerance: options.tolerance,
        seed: options.seed,
        dimension: system.dim(),
        count_thresholds: result.count_thresholds,
    })
}

/// One row per eigenvalue: `domain,sector,d,L,h,n,eigenvalue,residual`.
pub fn write_solve_csv<W: Write>(report: &SolveReport, mut out: W) -> std::io::Result<()> {
    writeln!(out, "domain,sector,d,L,h,n,eigenvalue,residual")?;
    for (n, (l, r)) in report.eigenvalues.iter().zip(&report.residuals).enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{:?},{:e}",
            report.domain,
            report.sector,
            report.d,
            report.truncation,
            report.h,
            n + 1,
            l,
            r
        )?;
    }
    out.flush()
}

/// Output of `count`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub domain: String,
    pub sector: String,
    pub d: f64,
    #[serde(rename = "L")]
    pub truncation: f64,
    pub h: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub count: usize,
    pub dimension: usize,
}

/// Exact number of eigenvalues below `energy`.
pub fn count(problem: &Problem, energy: f64) -> Result<CountReport> {
    if !energy.is_finite() {
        return Err(PairspecError::Input(format!(
            "E must be finite, got {energy}"
        )));
    }
    let spec = problem.spec()?;
    let system = problem.assemble()?;
    let count = system.count_below(energy)?;
    let params = spec.params();
    Ok(CountReport {
        domain: problem.domain.to_string(),
        sector: problem.sector.to_string(),
        d: params.d(),
        truncation: params.truncation(),
        h: params.spacing(),
        energy,
        count,
        dimension: system.dim(),
    })
}
