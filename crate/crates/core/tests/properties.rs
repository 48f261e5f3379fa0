use gramxent::estimators::{mirrored_cross_entropy, nonmirrored_cross_entropy, Alpha};
use gramxent::experiments::{
    run_convergence, run_mean_shift, run_tripartite, run_variance_scale, ExperimentConfig, ExperimentKind, Measure,
};
use gramxent::kernels::{
    eval_kernel, gram_univariate, hadamard_joint, normalize_trace, GramMatrix, KernelSpec, Normalization, SampleSet,
};
use gramxent::psd_linalg::{matrix_power, support_included, sym_eig, trace_product, DEFAULT_SUPPORT_TOLERANCE};
use gramxent::verification::{pinch, random_gram, standard_normal_samples, Partition};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn samples() -> impl Strategy<Value = SampleSet> {
    (1usize..12, 1usize..5).prop_flat_map(|(n, d)| {
        prop::collection::vec(-2.0f64..2.0, n * d).prop_map(move |data| SampleSet::from_flat(n, d, data).unwrap())
    })
}

fn gaussian() -> impl Strategy<Value = KernelSpec> {
    (0.1f64..3.0).prop_map(|s| KernelSpec::gaussian(s).unwrap())
}

fn any_kernel() -> impl Strategy<Value = KernelSpec> {
    prop_oneof![gaussian(), (0.05f64..0.5).prop_map(|s| KernelSpec::exponential_inner_product(s).unwrap())]
}

fn min_eigenvalue_ok(m: &DMatrix<f64>) -> bool {
    let eig = sym_eig(m).unwrap();
    let ev = eig.eigenvalues();
    ev[ev.len() - 1] >= -(1e-12 * ev[0].abs().max(1.0) * ev.len() as f64)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.amax()
}

/// Rank-r Gram X·Xᵀ from an n×r factor.
fn low_rank(n: usize, r: usize, seed: u64) -> DMatrix<f64> {
    let s = standard_normal_samples(seed, n, r);
    let x = DMatrix::from_row_slice(n, r, s.as_flat());
    &x * x.transpose()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_gram_is_translation_invariant(x in samples(), spec in gaussian(), c in -3.0f64..3.0) {
        let shifted = x.affine(1.0, &vec![c; x.d()]).unwrap();
        let a = gram_univariate(&spec, &x).unwrap();
        let b = gram_univariate(&spec, &shifted).unwrap();
        prop_assert!(max_abs(&(a.values() - b.values())) < 1e-12);
    }

    #[test]
    fn gram_is_symmetric_psd_and_matches_pointwise(x in samples(), spec in any_kernel()) {
        let g = gram_univariate(&spec, &x).unwrap();
        prop_assert_eq!(g.values(), &g.values().transpose());
        prop_assert!(min_eigenvalue_ok(g.values()));
        prop_assert_eq!(g.normalization(), Normalization::Raw);
        for i in 0..x.n() {
            for j in 0..x.n() {
                let k = eval_kernel(&spec, x.row(i), x.row(j)).unwrap();
                prop_assert!((g.values()[(i, j)] - k).abs() <= 1e-15 * k.max(1.0));
            }
        }
    }

    #[test]
    fn normalize_trace_is_idempotent(x in samples(), spec in any_kernel()) {
        let once = normalize_trace(&gram_univariate(&spec, &x).unwrap()).unwrap();
        let twice = normalize_trace(&once).unwrap();
        prop_assert!((once.trace() - 1.0).abs() < 1e-12);
        prop_assert!(once.is_unit_trace());
        prop_assert_eq!(once.values(), twice.values());
    }

    #[test]
    fn schur_product_stays_psd(x in samples(), s1 in gaussian(), s2 in any_kernel()) {
        let g1 = gram_univariate(&s1, &x).unwrap();
        let g2 = gram_univariate(&s2, &x).unwrap();
        let joint = hadamard_joint(&g1, &g2).unwrap();
        prop_assert!(min_eigenvalue_ok(joint.values()));
    }

    #[test]
    fn matrix_powers_add_and_commute(seed in any::<u64>(), n in 2usize..10, a in 0.1f64..2.0, b in 0.1f64..2.0) {
        let g = random_gram(seed, n, 3, &KernelSpec::gaussian(1.0).unwrap()).unwrap();
        let g = g.values();
        let pa = matrix_power(g, a).unwrap().matrix;
        let pb = matrix_power(g, b).unwrap().matrix;
        let pab = matrix_power(g, a + b).unwrap().matrix;
        let scale = max_abs(&pab).max(1.0);
        prop_assert!(max_abs(&(&pa * &pb - &pab)) <= 1e-8 * scale);
        prop_assert!(max_abs(&(&pa * g - g * &pa)) <= 1e-8 * max_abs(&pa).max(1.0) * max_abs(g));
    }

    #[test]
    fn trace_product_is_symmetric(seed in any::<u64>(), n in 1usize..10) {
        let a = low_rank(n, 3, seed);
        let b = low_rank(n, 2, seed ^ 1);
        prop_assert_eq!(trace_product(&a, &b).unwrap(), trace_product(&b, &a).unwrap());
    }

    #[test]
    fn support_inclusion_is_reflexive_and_monotone(seed in any::<u64>(), n in 4usize..12, r in 1usize..3) {
        let g = low_rank(n, r, seed);
        let h = low_rank(n, r, seed.wrapping_add(7));
        prop_assert!(support_included(&g, &g, DEFAULT_SUPPORT_TOLERANCE).unwrap().included);
        let sum = &g + &h;
        prop_assert!(support_included(&g, &sum, DEFAULT_SUPPORT_TOLERANCE).unwrap().included);
        // two independent rank-r ranges in dimension n ≥ 2r + 2 are generically not nested
        prop_assert!(!support_included(&sum, &g, DEFAULT_SUPPORT_TOLERANCE).unwrap().included);
    }

    #[test]
    fn pinch_is_idempotent_and_respects_refinement(seed in any::<u64>(), half in 1usize..6) {
        let n = 4 * half;
        let g = normalize_trace(&random_gram(seed, n, 3, &KernelSpec::gaussian(1.0).unwrap()).unwrap()).unwrap();
        let coarse = Partition::contiguous(n, 2).unwrap();
        let fine = Partition::contiguous(n, 4).unwrap();
        prop_assert!(fine.refines(&coarse));
        let once = pinch(&g, &coarse).unwrap();
        prop_assert_eq!(&pinch(&once, &coarse).unwrap().into_values(), once.values());
        prop_assert_eq!(pinch(&once, &fine).unwrap().into_values(), pinch(&g, &fine).unwrap().into_values());
        prop_assert!((once.trace() - 1.0).abs() < 1e-12);
        prop_assert!(once.is_unit_trace());
    }

    #[test]
    fn random_gram_has_gram_invariants(seed in any::<u64>(), n in 1usize..20, d in 1usize..6, spec in gaussian()) {
        let g = random_gram(seed, n, d, &spec).unwrap();
        let again = random_gram(seed, n, d, &spec).unwrap();
        prop_assert_eq!(g.values(), again.values());
        prop_assert_eq!(g.values(), &g.values().transpose());
        prop_assert!(g.is_unit_trace());
        let diag = 1.0 / n as f64;
        for i in 0..n {
            prop_assert!((g.values()[(i, i)] - diag).abs() < 1e-15);
            for j in 0..n {
                let v = g.values()[(i, j)];
                prop_assert!(v >= 0.0 && v <= diag * (1.0 + 1e-15));
            }
        }
        prop_assert!(min_eigenvalue_ok(g.values()));
    }

    #[test]
    fn estimators_vanish_on_identical_arguments(seed in any::<u64>(), n in 2usize..12, a in 0.3f64..4.0) {
        prop_assume!((a - 1.0).abs() > 0.05);
        let g = normalize_trace(&random_gram(seed, n, 4, &KernelSpec::gaussian(1.0).unwrap()).unwrap()).unwrap();
        let alpha = Alpha::new(a).unwrap();
        prop_assert!(nonmirrored_cross_entropy(&g, &g, alpha).unwrap().value.abs() < 1e-10);
        prop_assert!(mirrored_cross_entropy(&g, &g, alpha).unwrap().value.abs() < 1e-10);
    }
}

#[test]
fn exponential_inner_product_kernel_is_not_translation_invariant() {
    let spec = KernelSpec::exponential_inner_product(1.0).unwrap();
    assert!(!spec.translation_invariant());
    let x = SampleSet::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
    let shifted = x.affine(1.0, &[0.5, 0.5]).unwrap();
    let a = gram_univariate(&spec, &x).unwrap();
    let b = gram_univariate(&spec, &shifted).unwrap();
    assert!(max_abs(&(a.values() - b.values())) > 0.1);
}

#[test]
fn identity_gram_is_unit_diagonal() {
    let g = GramMatrix::identity(3).unwrap();
    assert_eq!(g.trace(), 3.0);
}

fn small(kind: ExperimentKind) -> ExperimentConfig {
    ExperimentConfig {
        alphas: vec![0.5, 2.0],
        n_grid: vec![6, 9],
        d_grid: vec![2, 3],
        shift_grid: vec![-1.0, 0.0, 1.0],
        scale_grid: vec![0.5, 1.0],
        measures: vec![Measure::Nonmirrored, Measure::Mirrored],
        seed: 5,
        ..ExperimentConfig::defaults(kind)
    }
}

#[test]
fn runner_row_counts_match_the_grid() {
    let cfg = small(ExperimentKind::Convergence);
    assert_eq!(run_convergence(&cfg).unwrap().len(), 2 * 2 * 2 * 2 * cfg.kernels.len());

    let cfg = small(ExperimentKind::MeanShift);
    let per_cell = cfg.kernels.len() * 2 * 2 * 3;
    assert_eq!(run_mean_shift(&cfg).unwrap().len(), per_cell * 2 * 2);

    let cfg = small(ExperimentKind::VarianceScale);
    assert_eq!(run_variance_scale(&cfg).unwrap().len(), cfg.kernels.len() * 2 * 2 * 2 * 2 * 2);

    let cfg = small(ExperimentKind::Tripartite);
    assert_eq!(run_tripartite(&cfg).unwrap().len(), cfg.kernels.len() * 2 * 2 * 2 * (3 + 2));
}

#[test]
fn runners_are_deterministic() {
    for kind in [
        ExperimentKind::Convergence,
        ExperimentKind::MeanShift,
        ExperimentKind::VarianceScale,
        ExperimentKind::Tripartite,
    ] {
        let cfg = small(kind);
        let run = |c: &ExperimentConfig| match kind {
            ExperimentKind::Convergence => run_convergence(c),
            ExperimentKind::MeanShift => run_mean_shift(c),
            ExperimentKind::VarianceScale => run_variance_scale(c),
            _ => run_tripartite(c),
        };
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.value.to_bits(), y.value.to_bits(), "{kind}");
            assert_eq!((x.n, x.d, x.alpha.to_bits(), &x.measure), (y.n, y.d, y.alpha.to_bits(), &y.measure));
        }
        let other = ExperimentConfig { seed: 6, ..cfg.clone() };
        assert!(run(&other).unwrap().iter().zip(&a).any(|(x, y)| x.value != y.value), "{kind}");
    }
}
