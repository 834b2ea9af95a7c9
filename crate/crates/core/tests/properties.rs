mod common;

use std::collections::BTreeSet;

use num_traits::One;
use proptest::prelude::*;
use tnnflow_core::chevalley::{build_pinning, Factor, GroupElement, OneParam};
use tnnflow_core::embedding::ChartPoint;
use tnnflow_core::flow::{flow, sphere_crossing_from, FlowSpec};
use tnnflow_core::folding::build_folding;
use tnnflow_core::scalar::{q, q_from_f64};
use tnnflow_core::totpos::{
    flag_of, is_tnn_matrix, sample_positive, standard_word_w0, FactorizationParams, Side, TnnClass,
};
use tnnflow_core::{Matrix, Scalar, Q};

fn rational() -> impl Strategy<Value = Q> {
    (-30i64..=30, 1i64..=12).prop_map(|(a, b)| q(a, b))
}

fn positive() -> impl Strategy<Value = Q> {
    (1i64..=40, 1i64..=12).prop_map(|(a, b)| q(a, b))
}

fn unipotent_upper(n: usize) -> impl Strategy<Value = Matrix<Q>> {
    prop::collection::vec(rational(), n * n).prop_map(move |v| {
        Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => Q::one(),
            std::cmp::Ordering::Less => v[i * n + j].clone(),
            std::cmp::Ordering::Greater => q(0, 1),
        })
    })
}

fn group_word(n: usize) -> impl Strategy<Value = Vec<Factor<Q>>> {
    prop::collection::vec((0usize..3, 1..n, rational()), 1..8).prop_map(|fs| {
        fs.into_iter()
            .map(|(k, i, t)| match k {
                0 => Factor::X(i, t),
                1 => Factor::Y(i, t),
                _ => Factor::SDot(i),
            })
            .collect()
    })
}

fn positive_params(n: usize) -> impl Strategy<Value = FactorizationParams<Q>> {
    let word = standard_word_w0(n).unwrap();
    let len = word.len();
    (
        prop::collection::vec(positive(), len),
        prop::collection::vec(positive(), n - 1),
    )
        .prop_map(move |(t, torus)| FactorizationParams::new(word.clone(), t, Some(torus)).unwrap())
}

fn deltas() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..-0.05, 1..8)
}

fn chart_point(dim: usize) -> impl Strategy<Value = ChartPoint> {
    prop::collection::vec(-10.0f64..10.0, dim).prop_map(ChartPoint)
}

fn spec_and_point() -> impl Strategy<Value = (FlowSpec, ChartPoint)> {
    deltas().prop_flat_map(|d| {
        let dim = d.len();
        (Just(FlowSpec::new(d).unwrap()), chart_point(dim))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_params_compose_additively(n in 2usize..5, i in 1usize..4, s in rational(), t in rational()) {
        let i = 1 + (i - 1) % (n - 1);
        let p = build_pinning(n).unwrap();
        for kind in [OneParam::X, OneParam::Y] {
            let a = p.one_param(kind, i, s.clone()).unwrap();
            let b = p.one_param(kind, i, t.clone()).unwrap();
            prop_assert_eq!(&a * &b, p.one_param(kind, i, &s + &t).unwrap());
            prop_assert!(a.det().is_one());
        }
    }

    #[test]
    fn exp_tau_matches_series(n in 2usize..5, t in -5.0f64..5.0) {
        let p = build_pinning(n).unwrap();
        let spectral = p.exp_tau(t);
        let series = common::expm_series(&p.tau().to_f64().scale(&t));
        prop_assert!(spectral.max_abs_diff(&series) <= 1e-10);
    }

    #[test]
    fn exp_tau_is_unimodular(n in 2usize..5, t in -3.0f64..3.0) {
        let e = build_pinning(n).unwrap().exp_tau(t);
        let exact = Matrix::from_fn(n, n, |i, j| q_from_f64(e[(i, j)]).unwrap());
        prop_assert!((exact.det().to_f64() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn positive_factorizations_are_totally_positive(params in positive_params(3)) {
        let p = build_pinning(3).unwrap();
        let g = sample_positive(&p, &params, Side::Group).unwrap();
        prop_assert_eq!(is_tnn_matrix(&GroupElement::exact(g).unwrap()).unwrap(), TnnClass::TotallyPositive);
    }

    #[test]
    fn closures_stay_nonnegative(params in positive_params(4), mask in 0u32..64) {
        let p = build_pinning(4).unwrap();
        let t: Vec<Q> = params
            .t()
            .iter()
            .enumerate()
            .map(|(k, x)| if mask >> k & 1 == 1 { q(0, 1) } else { x.clone() })
            .collect();
        let closed = FactorizationParams::new(params.word().clone(), t, None).unwrap();
        let g = sample_positive(&p, &closed, Side::Lower).unwrap();
        let class = is_tnn_matrix(&GroupElement::exact(g).unwrap()).unwrap();
        prop_assert!(class.is_nonnegative(), "{:?}", class);
    }

    #[test]
    fn flag_ignores_right_upper_factor(word in group_word(4), u in unipotent_upper(4), jmask in 0u32..8) {
        let p = build_pinning(4).unwrap();
        let g = p.product(&word).unwrap();
        let j: BTreeSet<usize> = (1..4).filter(|i| jmask >> (i - 1) & 1 == 1).collect();
        prop_assert_eq!(flag_of(&(&g * &u), &j).unwrap(), flag_of(&g, &j).unwrap());
    }

    #[test]
    fn flow_norm_strictly_decreases((spec, p) in spec_and_point()) {
        prop_assume!(p.norm() > 1e-6);
        let norms: Vec<f64> = (0..20).map(|k| flow(&spec, 0.25 * k as f64, &p).norm()).collect();
        prop_assert!(norms.windows(2).all(|w| w[1] < w[0]), "{:?}", norms);
    }

    #[test]
    fn flow_semigroup((spec, p) in spec_and_point(), t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
        let direct = flow(&spec, t1 + t2, &p);
        let composed = flow(&spec, t1, &flow(&spec, t2, &p));
        prop_assert!(direct.dist(&composed) <= 1e-12 * (1.0 + p.norm()));
    }

    #[test]
    fn crossing_ignores_initial_bracket((spec, p) in spec_and_point(), r in 0.01f64..5.0, step in 0.001f64..50.0) {
        prop_assume!(p.norm() > 1e-6);
        let a = sphere_crossing_from(&spec, &p, r, 1.0).unwrap();
        let b = sphere_crossing_from(&spec, &p, r, step).unwrap();
        prop_assert!((a.t - b.t).abs() <= 1e-10);
    }

    #[test]
    fn sigma_is_an_involutive_homomorphism(a in group_word(4), b in group_word(4)) {
        let f = build_folding(4).unwrap();
        let g = f.pinning().product(&a).unwrap();
        let h = f.pinning().product(&b).unwrap();
        let sg = f.apply(&g).unwrap();
        prop_assert_eq!(f.apply(&sg).unwrap(), g.clone());
        prop_assert_eq!(f.apply(&(&g * &h)).unwrap(), &sg * &f.apply(&h).unwrap());
    }

    #[test]
    fn sigma_swaps_one_parameter_subgroups(i in 1usize..4, t in rational()) {
        let f = build_folding(4).unwrap();
        let p = f.pinning();
        for kind in [OneParam::X, OneParam::Y] {
            let g = p.one_param(kind, i, t.clone()).unwrap();
            prop_assert_eq!(f.apply(&g).unwrap(), p.one_param(kind, 4 - i, t.clone()).unwrap());
        }
    }
}
