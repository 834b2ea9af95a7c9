use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tnnflow_core::embedding::{build_rep, eigenchart, lambda_for, ChartPoint};
use tnnflow_core::flow::*;
use tnnflow_core::totpos::Sl3Coords;

fn set(v: &[usize]) -> BTreeSet<usize> {
    v.iter().copied().collect()
}

#[test]
fn commutation_on_random_flags() {
    for (n, j) in [(3, set(&[])), (4, set(&[])), (4, set(&[2])), (3, set(&[1]))] {
        let rep = build_rep(&lambda_for(n, &j).unwrap()).unwrap();
        let chart = eigenchart(&rep).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let g = sample_tnn_flag(&mut rng, rep.pinning(), 0.3).unwrap().to_f64();
            for t in [0.0, 0.1, 1.0, 5.0] {
                let r = flow_on_flag(&chart, &g, &j, t).unwrap();
                worst = worst.max(r.discrepancy);
            }
        }
        assert!(worst <= COMMUTATION_TOL, "n={n} J={j:?} worst {worst}");
    }
}

#[test]
fn convergence_to_sl3_fixed_point() {
    let rep = build_rep(&lambda_for(3, &set(&[])).unwrap()).unwrap();
    let chart = eigenchart(&rep).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let want = sl3_fixed_point();
    for _ in 0..10 {
        let g = sample_tnn_flag(&mut rng, rep.pinning(), 0.0).unwrap().to_f64();
        let c = converge_flag(&chart, &g, &set(&[]), 1e-10).unwrap();
        assert!(c.convergence.time <= c.convergence.analytic_bound + 1e-9);
        let limit = c.limit_sl3.unwrap();
        for (a, b) in limit.iter().zip(want.coords()) {
            assert!((a - b).abs() < 1e-8, "{limit:?}");
        }
        assert!(c.distance_to_fixed_flag < 1e-8);
    }
    let fixed = Sl3Coords::from_matrix(&fixed_flag(rep.pinning())).unwrap();
    let p = chart
        .chart_coords(&rep.psi_matrix_f64(&fixed_flag(rep.pinning())).unwrap())
        .unwrap();
    assert!(p.norm() < 1e-12, "{fixed:?}");
}

#[test]
fn converge_origin_is_immediate() {
    let spec = FlowSpec::new(vec![-1.0, -2.0]).unwrap();
    let c = converge(&spec, &ChartPoint(vec![0.0, 0.0]), 1e-6).unwrap();
    assert_eq!(c.time, 0.0);
}

#[test]
fn boundary_points_flow_inside() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rep3 = build_rep(&lambda_for(3, &set(&[])).unwrap()).unwrap();
    let samples = sample_boundary(&mut rng, &rep3, InteriorOracle::Sl3, 50).unwrap();
    for t in [0.1, 1.0, 5.0] {
        let r = invariance_check(&rep3, InteriorOracle::Sl3, &samples, t, 1e-10).unwrap();
        assert!(r.all_interior(), "{r:?}");
    }
    let r = invariance_check(&rep3, InteriorOracle::Sl3, &samples, 0.0, 1e-10).unwrap();
    assert_eq!(r.interior, 0);

    for (n, k) in [(4, 2), (5, 2), (4, 1)] {
        let j: BTreeSet<usize> = (1..n).filter(|&i| i != k).collect();
        let rep = build_rep(&lambda_for(n, &j).unwrap()).unwrap();
        let samples = sample_boundary(&mut rng, &rep, InteriorOracle::Minuscule, 30).unwrap();
        for t in [0.1, 1.0, 5.0] {
            let r = invariance_check(&rep, InteriorOracle::Minuscule, &samples, t, 1e-10).unwrap();
            assert!(r.all_interior(), "n={n} k={k} t={t} {r:?}");
        }
        let r = invariance_check(&rep, InteriorOracle::Minuscule, &samples, 0.0, 1e-10).unwrap();
        assert_eq!(r.interior, 0);
    }
}

#[test]
fn crossing_is_unique_and_idempotent() {
    let rep = build_rep(&lambda_for(3, &set(&[])).unwrap()).unwrap();
    let spec = FlowSpec::from_chart(&eigenchart(&rep).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        use rand::Rng;
        let p = ChartPoint((0..spec.dim()).map(|_| rng.random_range(-10.0..10.0)).collect());
        let r = rng.random_range(0.01..5.0);
        let a = sphere_crossing(&spec, &p, r).unwrap();
        assert!((a.point.norm() - r).abs() <= 1e-12 * r * 1.0001);
        for step in [0.01, 0.3, 7.0, 100.0] {
            let b = sphere_crossing_from(&spec, &p, r, step).unwrap();
            assert!((a.t - b.t).abs() < 1e-10);
        }
        let again = sphere_crossing(&spec, &a.point, r).unwrap();
        assert!(again.t.abs() < 1e-10);
    }
}
