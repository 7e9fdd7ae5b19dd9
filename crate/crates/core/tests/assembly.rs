use pairspec_core::{
    assemble_domain, assemble_unconstrained, dense_generalized_eigen, make_domain,
    reduce_to_sector, triangulate, DomainKind, EigenOptions, PairParameters, ScaleVariant,
    SectorLabel,
};

#[test]
fn affine_functions_are_integrated_exactly() {
    let p = PairParameters::new(1.0, 4.0, 0.25).unwrap();
    for kind in DomainKind::ALL {
        let m = triangulate(&make_domain(kind, p, ScaleVariant::Unit).unwrap()).unwrap();
        let sys = assemble_unconstrained(&m).unwrap();
        let area = m.total_area();
        for (a, b, c) in [(1.0, 0.0, 0.0), (0.3, -1.7, 2.0), (0.0, 0.0, 1.0)] {
            let u = sys.interpolate(|q| a * q[0] + b * q[1] + c);
            let energy = sys.stiffness.quadratic_form(&u);
            assert!(
                (energy - (a * a + b * b) * area).abs() < 1e-9 * (1.0 + energy),
                "{kind}"
            );
        }
        let one = vec![1.0; sys.dim()];
        assert!((sys.mass.quadratic_form(&one) - area).abs() < 1e-9 * area);
        // ∫ x² over each domain by the exact quadrature for P1 products
        let x = sys.interpolate(|q| q[0]);
        let second_moment: f64 = m
            .triangles
            .iter()
            .zip(&m.element_area)
            .map(|(t, &ar)| {
                let xs = t.map(|i| m.nodes[i][0]);
                let s: f64 = xs.iter().sum();
                let sq: f64 = xs.iter().map(|v| v * v).sum();
                ar * (sq + s * s) / 12.0
            })
            .sum();
        assert!((sys.mass.quadratic_form(&x) - second_moment).abs() < 1e-9 * second_moment);
    }
}

#[test]
fn matrices_are_symmetric_and_mass_is_definite() {
    let p = PairParameters::new(1.0, 4.0, 0.25).unwrap();
    for kind in DomainKind::ALL {
        let s = assemble_domain(&make_domain(kind, p, ScaleVariant::Unit).unwrap()).unwrap();
        assert!(s.stiffness.is_symmetric(0.0) && s.mass.is_symmetric(0.0));
        assert!(s.mass.diagonal().iter().all(|&d| d > 0.0));
    }
}

#[test]
fn exchange_split_is_exact() {
    let p = PairParameters::new(1.0, 4.0, 0.125).unwrap();
    let full =
        assemble_domain(&make_domain(DomainKind::PairDomain, p, ScaleVariant::Unit).unwrap())
            .unwrap();
    assert!(full.dim() < 2000);
    let eig = |s: &pairspec_core::AssembledSystem| {
        dense_generalized_eigen(s.dim(), &s.stiffness.to_dense(), &s.mass.to_dense(), false)
            .unwrap()
            .values
    };
    let whole = eig(&full);
    let sym = reduce_to_sector(&full, SectorLabel::Symmetric).unwrap();
    let anti = reduce_to_sector(&full, SectorLabel::Antisymmetric).unwrap();
    assert_eq!(sym.dim() + anti.dim(), full.dim());
    let mut merged = eig(&sym);
    merged.extend(eig(&anti));
    merged.sort_by(f64::total_cmp);
    for (a, b) in whole.iter().zip(&merged) {
        assert!((a - b).abs() <= 1e-9 * a.abs(), "{a} vs {b}");
    }
}

#[test]
fn ground_state_decreases_under_refinement_and_truncation() {
    let opts = EigenOptions::default();
    let lambda1 = |d: f64, l: f64, h: f64, sector: SectorLabel| {
        let p = PairParameters::new(d, l, h).unwrap();
        let full =
            assemble_domain(&make_domain(DomainKind::PairDomain, p, ScaleVariant::Unit).unwrap())
                .unwrap();
        reduce_to_sector(&full, sector)
            .unwrap()
            .lowest_eigenpairs(2, &opts)
            .unwrap()
            .eigenvalues[0]
    };
    for sector in SectorLabel::ALL {
        let coarse = lambda1(1.0, 4.0, 0.25, sector);
        let fine = lambda1(1.0, 4.0, 0.125, sector);
        let long = lambda1(1.0, 8.0, 0.25, sector);
        assert!(fine <= coarse, "{sector}: h-halving {coarse} -> {fine}");
        assert!(long <= coarse, "{sector}: L-doubling {coarse} -> {long}");
    }
}

#[test]
fn dilation_scales_eigenvalues() {
    let opts = EigenOptions::default();
    let p1 = PairParameters::new(1.0, 4.0, 0.125).unwrap();
    let p2 = p1.dilated(2.0).unwrap();
    for kind in [DomainKind::PairDomain, DomainKind::CrossAxis] {
        let a = assemble_domain(&make_domain(kind, p1, ScaleVariant::Unit).unwrap()).unwrap();
        let b = assemble_domain(&make_domain(kind, p2, ScaleVariant::Unit).unwrap()).unwrap();
        let la = a.lowest_eigenpairs(3, &opts).unwrap().eigenvalues;
        let lb = b.lowest_eigenpairs(3, &opts).unwrap().eigenvalues;
        for (x, y) in la.iter().zip(&lb) {
            assert!((y - x / 4.0).abs() <= 1e-9 * y, "{kind}: {x} {y}");
        }
    }
}
