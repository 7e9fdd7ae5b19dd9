//! Tables of eigenvalues over grids of mesh spacings and truncation lengths.

use std::io::Write;
use std::path::Path;

use pairspec_core::{domain_threshold, DomainKind, EigenOptions, SectorLabel};
use serde::{Deserialize, Serialize};

use crate::error::{PairspecError, Result};
use crate::extrapolate::{extrapolate, Extrapolation};
use crate::solve::{Problem, DEFAULT_DELTA};

fn default_tolerance() -> f64 {
    1e-8
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

/// Sweep description as read from a plan file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub domain: String,
    #[serde(default = "full_sector")]
    pub sector: String,
    pub d: f64,
    /// Nested spacings, each half the previous.
    pub h: Vec<f64>,
    /// Increasing truncation lengths.
    #[serde(rename = "L")]
    pub truncation: Vec<f64>,
    pub k: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn full_sector() -> String {
    "full".into()
}

impl SweepPlan {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| PairspecError::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| PairspecError::Json {
            path: path.to_owned(),
            source,
        })
    }

    pub fn domain_kind(&self) -> Result<DomainKind> {
        Ok(self.domain.parse()?)
    }

    pub fn sector_label(&self) -> Result<SectorLabel> {
        Ok(self.sector.parse()?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PairspecError::Input(m));
        self.domain_kind()?;
        self.sector_label()?;
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if self.h.is_empty() || self.truncation.is_empty() {
            return bad("h and L lists must be non-empty".into());
        }
        for w in self.h.windows(2) {
            if (w[1] - w[0] / 2.0).abs() > 1e-12 * w[0] {
                return bad(format!("h values must halve: {} then {}", w[0], w[1]));
            }
        }
        if self.truncation.windows(2).any(|w| w[1] <= w[0]) {
            return bad("L values must increase".into());
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 || !(0.0..1.0).contains(&self.delta) {
            return bad("tolerance must be positive and delta in [0, 1)".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub h: f64,
    #[serde(rename = "L")]
    pub truncation: f64,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub threshold: Option<f64>,
    pub isolated_count: Option<usize>,
    /// `λ₁` minus `λ₁` at the previous (coarser) spacing and the same `L`.
    pub delta_h: Option<f64>,
    /// `λ₁` minus `λ₁` at the previous (shorter) `L` and the same spacing.
    #[serde(rename = "delta_L")]
    pub delta_truncation: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub plan: SweepPlan,
    pub cells: Vec<SweepCell>,
    /// Richardson estimate of `λ₁` over the spacings, per `L` (needs at
    /// least three spacings).
    pub extrapolated: Vec<Option<Extrapolation>>,
}

impl SweepTable {
    pub fn cell(&self, h: f64, l: f64) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.h == h && c.truncation == l)
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }
}

/// Solves every `(h, L)` cell. A failing cell is recorded and the sweep
/// continues. Cells run in a fixed order so the table is reproducible.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepTable> {
    plan.validate()?;
    let domain = plan.domain_kind()?;
    let sector = plan.sector_label()?;
    let options = EigenOptions {
        tolerance: plan.tolerance,
        seed: plan.seed,
        ..Default::default()
    };
    let mut cells = Vec::new();
    for &l in &plan.truncation {
        for &h in &plan.h {
            let problem = Problem {
                domain,
                sector,
                d: plan.d,
                truncation: Some(l),
                spacing: Some(h),
            };
            let mut cell = SweepCell {
                h,
                truncation: l,
                eigenvalues: Vec::new(),
                residuals: Vec::new(),
                threshold: None,
                isolated_count: None,
                delta_h: None,
                delta_truncation: None,
                error: None,
            };
            let outcome = (|| -> Result<()> {
                let spec = problem.spec()?;
                let system = problem.assemble()?;
                let t = domain_threshold(&spec, sector);
                cell.threshold = Some(t);
                let r = system.lowest_eigenpairs(plan.k, &options)?;
                cell.eigenvalues = r.eigenvalues;
                cell.residuals = r.residuals;
                let counter = system.inertia_counter()?;
                cell.isolated_count =
                    Some(counter.count_below_perturbed((1.0 - plan.delta) * t)?.0);
                Ok(())
            })();
            if let Err(e) = outcome {
                cell.error = Some(e.to_string());
            }
            cells.push(cell);
        }
    }

    let lambda1 = |cells: &[SweepCell], h: f64, l: f64| {
        cells
            .iter()
            .find(|c| c.h == h && c.truncation == l)
            .and_then(|c| c.eigenvalues.first().copied())
    };
    let snapshot = cells.clone();
    for cell in &mut cells {
        let Some(here) = cell.eigenvalues.first().copied() else {
            continue;
        };
        let hi = plan.h.iter().position(|&h| h == cell.h).unwrap_or(0);
        let li = plan
            .truncation
            .iter()
            .position(|&l| l == cell.truncation)
            .unwrap_or(0);
        if hi > 0 {
            cell.delta_h =
                lambda1(&snapshot, plan.h[hi - 1], cell.truncation).map(|prev| here - prev);
        }
        if li > 0 {
            cell.delta_truncation =
                lambda1(&snapshot, cell.h, plan.truncation[li - 1]).map(|prev| here - prev);
        }
    }

    let extrapolated = plan
        .truncation
        .iter()
        .map(|&l| {
            let values: Option<Vec<f64>> = plan.h.iter().map(|&h| lambda1(&cells, h, l)).collect();
            match values {
                Some(v) if v.len() >= 3 => extrapolate(&plan.h, &v).ok(),
                _ => None,
            }
        })
        .collect();
    Ok(SweepTable {
        plan: plan.clone(),
        cells,
        extrapolated,
    })
}

/// Plot-ready rows `h,L,n,eigenvalue,residual,isolated_count,delta_h,delta_L`.
pub fn write_sweep_csv<W: Write>(table: &SweepTable, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "h,L,n,eigenvalue,residual,isolated_count,delta_h,delta_L"
    )?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:?}"));
    for c in &table.cells {
        for (n, (l, r)) in c.eigenvalues.iter().zip(&c.residuals).enumerate() {
            writeln!(
                out,
                "{},{},{},{:?},{:e},{},{},{}",
                c.h,
                c.truncation,
                n + 1,
                l,
                r,
                c.isolated_count.map_or(String::new(), |v| v.to_string()),
                if n == 0 {
                    opt(c.delta_h)
                } else {
                    String::new()
                },
                if n == 0 {
                    opt(c.delta_truncation)
                } else {
                    String::new()
                },
            )?;
        }
    }
    out.flush()
}
