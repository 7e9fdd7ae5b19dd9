use pairspec_core::bracketing::dominates;
use pairspec_core::{
    build_bracket_pair, build_embedding, domain_threshold, make_domain, square_neumann_spectrum,
    strip_threshold, DomainKind, DomainSpec, EigenOptions, PairParameters, ScaleVariant,
    SectorLabel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> PairParameters {
    PairParameters::new(1.0, 4.0, 0.125).unwrap()
}

#[test]
fn embeddings_preserve_rayleigh_quotients() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for sector in SectorLabel::ALL {
        let map = build_embedding(sector, params()).unwrap();
        let expected_copies = match sector {
            SectorLabel::Full => 4,
            SectorLabel::Symmetric => 8,
            SectorLabel::Antisymmetric => 2,
        };
        assert_eq!(map.copies(), expected_copies);
        for _ in 0..100 {
            let u: Vec<f64> = (0..map.source.dim())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let (s, t) = map.check_rayleigh_preservation(&u).unwrap();
            assert!((s - t).abs() <= 1e-9 * s.abs(), "{sector}: {s} vs {t}");
            assert_eq!(map.dirichlet_leak(&u), 0.0);
            // energy and norm scale by the number of copies
            let v = map.apply(&u).unwrap();
            let ratio = map.target.mass.quadratic_form(&v) / map.source.mass.quadratic_form(&u);
            assert!(
                (ratio - expected_copies as f64).abs() < 1e-9 * ratio,
                "{sector}: {ratio}"
            );
        }
    }
}

#[test]
fn embedding_is_injective_per_copy() {
    for sector in SectorLabel::ALL {
        let map = build_embedding(sector, params()).unwrap();
        for m in &map.node_maps {
            let mut seen = m.clone();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), m.len(), "{sector}");
        }
    }
}

#[test]
fn antisymmetric_embedding_needs_even_cells() {
    let p = PairParameters::new(1.0, 4.0, 1.0 / 3.0).unwrap();
    assert!(build_embedding(SectorLabel::Antisymmetric, p).is_err());
    assert!(build_embedding(SectorLabel::Symmetric, p).is_ok());
}

#[test]
fn pair_sectors_dominate_their_crosses() {
    let opts = EigenOptions::default();
    for sector in SectorLabel::ALL {
        let map = build_embedding(sector, params()).unwrap();
        let upper = map.source.lowest_eigenpairs(5, &opts).unwrap();
        let lower = map.target.lowest_eigenpairs(5, &opts).unwrap();
        let slack = 1e-6 + upper.max_residual() + lower.max_residual();
        assert!(
            dominates(&upper.eigenvalues, &lower.eigenvalues, slack),
            "{sector}: {:?} vs {:?}",
            upper.eigenvalues,
            lower.eigenvalues
        );
    }
}

#[test]
fn bracketing_counts_hold_on_a_grid() {
    let p = PairParameters::new(1.0, 4.0, 0.125).unwrap();
    let pair = build_bracket_pair(p).unwrap();
    let threshold = strip_threshold(2.0 * pair.half_width);
    let grid: Vec<f64> = (1..=20).map(|i| threshold * i as f64 / 21.0).collect();
    for c in pair.counts(&grid).unwrap() {
        assert!(c.holds(), "{c:?}");
        assert_eq!(c.arms, 0, "{c:?}");
        assert_eq!(c.square, 1, "{c:?}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u: Vec<f64> = (0..pair.cross.dim())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let (whole, parts) = pair.split_forms(&u).unwrap();
    assert!((whole[0] - parts[0]).abs() < 1e-10 * whole[0]);
    assert!((whole[1] - parts[1]).abs() < 1e-10 * whole[1]);
}

#[test]
fn square_reference_spectrum_is_approached_from_above() {
    let p = PairParameters::new(1.0, 4.0, 1.0 / 16.0).unwrap();
    let sq = make_domain(DomainKind::NeumannSquare, p, ScaleVariant::Unit).unwrap();
    let sys = pairspec_core::assemble_domain(&sq).unwrap();
    let r = sys.lowest_eigenpairs(6, &EigenOptions::default()).unwrap();
    let exact = square_neumann_spectrum(1.0, 6);
    assert!(r.eigenvalues[0].abs() < 1e-8);
    for (x, y) in r.eigenvalues.iter().zip(&exact).skip(1) {
        assert!(x >= y && (x - y) / y < 0.01, "{x} vs {y}");
    }
}

#[test]
fn snapped_thresholds_follow_the_meshed_width() {
    let p = PairParameters::new(1.0, 8.0, 1.0 / 32.0).unwrap();
    let cross = make_domain(DomainKind::CrossAxis, p, ScaleVariant::Unit).unwrap();
    let w = 23.0 / 32.0;
    let t = domain_threshold(&cross, SectorLabel::Full);
    assert!((t - strip_threshold(2.0 * w)).abs() < 1e-12);
    let square = DomainSpec::snapped_square(p).unwrap();
    assert_eq!(domain_threshold(&square, SectorLabel::Full), t);
}
