//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p pairspec --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use pairspec::extrapolate::extrapolate;
use pairspec_core::bracketing::dominates;
use pairspec_core::{
    assemble_domain, build_bracket_pair, count_below, dense_generalized_eigen, domain_threshold,
    make_domain, reduce_to_sector, square_neumann_spectrum, AssembledSystem, DomainKind,
    EigenOptions, PairParameters, ScaleVariant, SectorLabel, SymCsr,
};

const DELTA: f64 = 0.02;
const SQUARE_REL_ERROR: f64 = 0.005;
const ORDER_TARGET: f64 = 2.0;
const ORDER_TOLERANCE: f64 = 0.2;
const GAP_FRACTION: f64 = 1e-3;
const DOMINATION_SLACK: f64 = 1e-6;
const SPLIT_TOLERANCE: f64 = 1e-9;
const DILATION_TOLERANCE: f64 = 1e-6;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn system(kind: DomainKind, d: f64, l: f64, h: f64, scale: ScaleVariant) -> AssembledSystem {
    let p = PairParameters::new(d, l, h).unwrap();
    assemble_domain(&make_domain(kind, p, scale).unwrap()).unwrap()
}

fn sector_system(sector: SectorLabel, d: f64, l: f64, h: f64) -> AssembledSystem {
    let full = system(DomainKind::PairDomain, d, l, h, ScaleVariant::Unit);
    reduce_to_sector(&full, sector).unwrap()
}

fn lowest(s: &AssembledSystem, k: usize) -> (Vec<f64>, f64) {
    let r = s.lowest_eigenpairs(k, &EigenOptions::default()).unwrap();
    let res = r.max_residual();
    (r.eigenvalues, res)
}

fn isolated(s: &AssembledSystem, cut: f64) -> usize {
    s.inertia_counter()
        .unwrap()
        .count_below_perturbed(cut)
        .unwrap()
        .0
}

/// Neumann square, d = 1, h = 1/64: six eigenvalues against the closed form,
/// and the observed convergence order from h = 1/16, 1/32, 1/64.
fn square_oracle() -> Outcome {
    let exact = square_neumann_spectrum(1.0, 6);
    let mut levels = Vec::new();
    for h in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
        let p = PairParameters::new(1.0, 4.0, h).unwrap();
        let spec = make_domain(DomainKind::NeumannSquare, p, ScaleVariant::Unit).unwrap();
        let (vals, _) = lowest(&assemble_domain(&spec).unwrap(), 6);
        levels.push((spec.grid_spacing(), vals));
    }
    let finest = &levels[2].1;
    let mut worst_rel: f64 = 0.0;
    for (x, y) in finest.iter().zip(&exact) {
        let err = if *y == 0.0 {
            x.abs()
        } else {
            (x - y).abs() / y
        };
        worst_rel = worst_rel.max(err);
    }
    let spacings: Vec<f64> = levels.iter().map(|l| l.0).collect();
    let mut orders = Vec::new();
    for n in 1..6 {
        let values: Vec<f64> = levels.iter().map(|l| l.1[n]).collect();
        let e = extrapolate(&spacings, &values).map_err(|e| e.to_string())?;
        orders.push(
            e.order
                .ok_or(format!("no order for eigenvalue {}", n + 1))?,
        );
    }
    let orders_ok = orders
        .iter()
        .all(|p| (p - ORDER_TARGET).abs() <= ORDER_TOLERANCE);
    let msg = format!("max rel error {worst_rel:.2e} (<= {SQUARE_REL_ERROR}), orders {orders:.3?}");
    if worst_rel <= SQUARE_REL_ERROR && orders_ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Cross-axis, d = 1, L = 8, h = 1/32: one eigenvalue below the snapped
/// threshold margin, and the second above it.
fn cross_axis_isolated() -> Outcome {
    let p = PairParameters::new(1.0, 8.0, 1.0 / 32.0).unwrap();
    let spec = make_domain(DomainKind::CrossAxis, p, ScaleVariant::Unit).unwrap();
    let s = assemble_domain(&spec).unwrap();
    let cut = (1.0 - DELTA) * domain_threshold(&spec, SectorLabel::Full);
    let count = isolated(&s, cut);
    let (vals, _) = lowest(&s, 2);
    let msg = format!(
        "w_h {:.5}, count {count}, lambda1 {:.6}, lambda2 {:.6}, cut {cut:.6}",
        spec.snapped_half_width().unwrap(),
        vals[0],
        vals[1]
    );
    if count == 1 && vals[1] >= cut {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Pair domain, d = 1, L = 8, h = 1/32: one isolated eigenvalue per sector
/// and a simple ground state.
fn pair_sectors_isolated() -> Outcome {
    let p = PairParameters::new(1.0, 8.0, 1.0 / 32.0).unwrap();
    let spec = make_domain(DomainKind::PairDomain, p, ScaleVariant::Unit).unwrap();
    let full = assemble_domain(&spec).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for sector in SectorLabel::ALL {
        let s = reduce_to_sector(&full, sector).unwrap();
        let threshold = domain_threshold(&spec, sector);
        let count = isolated(&s, (1.0 - DELTA) * threshold);
        let (vals, _) = lowest(&s, 2);
        let gap = vals[1] - vals[0];
        ok &= count == 1 && gap >= GAP_FRACTION * threshold;
        parts.push(format!(
            "{sector}: count {count}, lambda1 {:.6}, gap {gap:.4}",
            vals[0]
        ));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Cross ≤ square + arms at 20 energies below the snapped threshold, with
/// no arms eigenvalue there.
fn bracketing() -> Outcome {
    let p = PairParameters::new(1.0, 8.0, 1.0 / 32.0).unwrap();
    let pair = build_bracket_pair(p).unwrap();
    let threshold = domain_threshold(pair.cross.domain(), SectorLabel::Full);
    let grid: Vec<f64> = (1..=20).map(|i| threshold * i as f64 / 21.0).collect();
    let counts = pair.counts(&grid).unwrap();
    let bad: Vec<_> = counts
        .iter()
        .filter(|c| !c.holds() || c.arms != 0)
        .collect();
    let max_cross = counts.iter().map(|c| c.cross).max().unwrap_or(0);
    let max_square = counts.iter().map(|c| c.square).max().unwrap_or(0);
    let msg = format!(
        "{} energies, max counts cross {max_cross} square {max_square}, {} violations",
        counts.len(),
        bad.len()
    );
    if bad.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: {bad:?}"))
    }
}

/// λ_n(pair, j) ≥ λ_n(cross-diag) for n = 1..5 on matched meshes.
fn domination() -> Outcome {
    let (d, l, h) = (1.0, 8.0, 1.0 / 32.0);
    let (cross, cross_res) = lowest(
        &system(DomainKind::CrossDiagonal, d, l, h, ScaleVariant::Unit),
        5,
    );
    let (half, half_res) = lowest(
        &system(DomainKind::CrossDiagonal, d, l, h, ScaleVariant::Half),
        5,
    );
    let mut ok = true;
    let mut parts = Vec::new();
    for sector in SectorLabel::ALL {
        let (upper, res) = lowest(&sector_system(sector, d, l, h), 5);
        let (lower, lower_res) = match sector {
            SectorLabel::Antisymmetric => (&half, half_res),
            _ => (&cross, cross_res),
        };
        let slack = DOMINATION_SLACK + res + lower_res;
        let holds = dominates(&upper, lower, slack);
        ok &= holds;
        let margin = upper
            .iter()
            .zip(lower)
            .map(|(u, l)| u - l)
            .fold(f64::INFINITY, f64::min);
        parts.push(format!("{sector}: min margin {margin:.3e}"));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Dense spectrum of the full pair system equals the merged sector spectra.
fn exchange_split() -> Outcome {
    let full = system(DomainKind::PairDomain, 1.0, 4.0, 0.125, ScaleVariant::Unit);
    if full.dim() >= 2000 {
        return Err(format!(
            "dimension {} too large for a dense solve",
            full.dim()
        ));
    }
    let eig = |s: &AssembledSystem| {
        dense_generalized_eigen(s.dim(), &s.stiffness.to_dense(), &s.mass.to_dense(), false)
            .unwrap()
            .values
    };
    let whole = eig(&full);
    let mut merged = eig(&reduce_to_sector(&full, SectorLabel::Symmetric).unwrap());
    merged.extend(eig(
        &reduce_to_sector(&full, SectorLabel::Antisymmetric).unwrap()
    ));
    merged.sort_by(f64::total_cmp);
    if merged.len() != whole.len() {
        return Err(format!("{} vs {} eigenvalues", whole.len(), merged.len()));
    }
    let worst = whole
        .iter()
        .zip(&merged)
        .map(|(a, b)| (a - b).abs() / a.abs())
        .fold(0.0, f64::max);
    let msg = format!("dimension {}, max rel diff {worst:.2e}", full.dim());
    if worst <= SPLIT_TOLERANCE {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_pair(n: usize, seed: u64) -> (SymCsr, SymCsr) {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let (mut ta, mut tb) = (Vec::new(), Vec::new());
    for i in 0..n {
        ta.push((i, i, 4.0 * next()));
        let mut row_sum = 0.0;
        for j in i + 1..n.min(i + 6) {
            if next() > 0.0 {
                ta.push((i, j, next()));
            }
            let v = 0.2 * next();
            row_sum += v.abs();
            tb.push((i, j, v));
        }
        tb.push((i, i, 2.5 + row_sum + next().abs()));
    }
    (SymCsr::from_triplets(n, &ta), SymCsr::from_triplets(n, &tb))
}

fn oracle_eigenvalues(a: &SymCsr, b: &SymCsr) -> Vec<f64> {
    let n = a.dim();
    let am = DMatrix::from_row_slice(n, n, &a.to_dense());
    let bm = DMatrix::from_row_slice(n, n, &b.to_dense());
    let linv = bm.cholesky().unwrap().l().try_inverse().unwrap();
    let c = &linv * am * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Inertia counts on 100 random pairs against nalgebra.
fn inertia_oracle() -> Outcome {
    let mut probes_checked = 0;
    for seed in 0..100u64 {
        let n = 5 + (seed as usize * 37) % 196;
        let (a, b) = random_pair(n, seed);
        let oracle = oracle_eigenvalues(&a, &b);
        let mut probes = vec![oracle[0] - 1.0, oracle[n - 1] + 1.0];
        probes.extend(
            oracle
                .windows(2)
                .filter(|w| w[1] - w[0] > 1e-8)
                .map(|w| 0.5 * (w[0] + w[1])),
        );
        for e in probes {
            let expected = oracle.iter().filter(|&&l| l < e).count();
            let got = count_below(&a, &b, e).map_err(|e| format!("seed {seed}: {e}"))?;
            if got != expected {
                return Err(format!("seed {seed}, n {n}, E {e}: {got} vs {expected}"));
            }
            probes_checked += 1;
        }
    }
    Ok(format!("100 pairs, {probes_checked} energies, all exact"))
}

/// Monotonicity under refinement and truncation, dilation scaling, and the
/// antisymmetric ground state above the full-sector margin.
fn properties() -> Outcome {
    let mut failures = Vec::new();
    for sector in SectorLabel::ALL {
        let l1 = |l: f64, h: f64| lowest(&sector_system(sector, 1.0, l, h), 1).0[0];
        let base = l1(4.0, 1.0 / 8.0);
        let fine = l1(4.0, 1.0 / 16.0);
        let long = l1(8.0, 1.0 / 8.0);
        if fine > base {
            failures.push(format!("{sector}: h-halving {base} -> {fine}"));
        }
        if long > base {
            failures.push(format!("{sector}: L-doubling {base} -> {long}"));
        }
    }
    let mut worst_dilation: f64 = 0.0;
    for kind in [
        DomainKind::PairDomain,
        DomainKind::CrossAxis,
        DomainKind::NeumannSquare,
    ] {
        let (a, _) = lowest(&system(kind, 1.0, 4.0, 1.0 / 8.0, ScaleVariant::Unit), 3);
        let (b, _) = lowest(&system(kind, 2.0, 8.0, 1.0 / 4.0, ScaleVariant::Unit), 3);
        for (x, y) in a.iter().zip(&b) {
            let err = (y - x / 4.0).abs() / y.abs().max(1.0);
            worst_dilation = worst_dilation.max(err);
        }
    }
    if worst_dilation > DILATION_TOLERANCE {
        failures.push(format!("dilation error {worst_dilation:.2e}"));
    }
    let anti = lowest(
        &sector_system(SectorLabel::Antisymmetric, 1.0, 8.0, 1.0 / 32.0),
        1,
    )
    .0[0];
    let floor = (1.0 - DELTA) * PI * PI / 2.0;
    if anti < floor {
        failures.push(format!("lambda1(a) {anti} below {floor}"));
    }
    let msg = format!(
        "monotone in h and L, dilation error {worst_dilation:.2e}, lambda1(a) {anti:.4} >= {floor:.4}"
    );
    if failures.is_empty() {
        Ok(msg)
    } else {
        Err(failures.join("; "))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 square closed form and order", square_oracle),
        ("2 cross-axis single eigenvalue", cross_axis_isolated),
        ("3 pair sectors single eigenvalue", pair_sectors_isolated),
        ("4 bracketing counts", bracketing),
        ("5 min-max domination", domination),
        ("6 exchange split", exchange_split),
        ("7 inertia oracle", inertia_oracle),
        ("8 property suite", properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome =
            std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1} s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
