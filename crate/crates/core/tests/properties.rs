use manifold_rkhs::accel::{aitken_iterated, richardson};
use manifold_rkhs::curves::EmbeddedCurve;
use manifold_rkhs::exec::{sum_indexed, Execution};
use manifold_rkhs::kernels::{Evaluator, KernelSpec, SpectralKernel, Weighting};
use manifold_rkhs::rkhs::{
    apply_bessel_potential, gram_with, heat_propagate, norm_equivalence_bracket, sobolev_norm_sq, NormVariant,
    Potential, SpectralFunction,
};
use manifold_rkhs::specfun::{gegenbauer_normalized, GegenbauerParams};
use manifold_rkhs::spectra::{distance, sample_points, Manifold, Point, Zonal};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn manifold() -> impl Strategy<Value = Manifold> {
    prop_oneof![
        Just(Manifold::Circle),
        Just(Manifold::sphere(3).unwrap()),
        Just(Manifold::sphere(4).unwrap()),
        Just(Manifold::sphere(5).unwrap()),
    ]
}

fn diagonal(m: &Manifold) -> Zonal {
    match m {
        Manifold::Circle => Zonal::Angle(0.0),
        _ => Zonal::Cosine(1.0),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized_gegenbauer_is_bounded_with_parity(nu in 0.0f64..4.0, ell in 0usize..60, z in -1.0f64..=1.0) {
        let p = GegenbauerParams::new(nu, ell).unwrap();
        let b = gegenbauer_normalized(p, z).unwrap();
        let b_neg = gegenbauer_normalized(p, -z).unwrap();
        prop_assert!(b.abs() <= 1.0 + 1e-12);
        let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((b_neg - sign * b).abs() <= 1e-12);
        prop_assert!((gegenbauer_normalized(p, 1.0).unwrap() - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn kernels_are_bitwise_symmetric(m in manifold(), seed in 0u64..1000, ds in 1.0f64..3.0) {
        let s = m.rkhs_threshold() + ds;
        let ev = Evaluator::new(m, KernelSpec::sobolev(s).with_tail_bound(1e-6)).unwrap();
        let pts = sample_points(&m, 2, seed);
        let ab = ev.eval(&pts[0], &pts[1]).unwrap().value;
        let ba = ev.eval(&pts[1], &pts[0]).unwrap().value;
        prop_assert_eq!(ab.to_bits(), ba.to_bits());
    }

    #[test]
    fn heat_kernels_are_symmetric_and_positive(m in manifold(), seed in 0u64..1000, t in 0.05f64..5.0) {
        let ev = Evaluator::new(m, KernelSpec::heat(t)).unwrap();
        let pts = sample_points(&m, 2, seed);
        let ab = ev.eval(&pts[0], &pts[1]).unwrap().value;
        let ba = ev.eval(&pts[1], &pts[0]).unwrap().value;
        prop_assert_eq!(ab.to_bits(), ba.to_bits());
        prop_assert!(ab > 0.0);
    }

    #[test]
    fn diagonal_decreases_with_smoothness(m in manifold(), s in 3.0f64..5.0, ds in 0.05f64..1.0) {
        let g = m.geometry().unwrap();
        let lo = SpectralKernel::new(g, &KernelSpec::sobolev(s)).unwrap();
        let hi = SpectralKernel::new(g, &KernelSpec::sobolev(s + ds)).unwrap();
        let d_lo = lo.eval(&diagonal(&m)).unwrap().value;
        let d_hi = hi.eval(&diagonal(&m)).unwrap().value;
        prop_assert!(d_hi < d_lo);
    }

    #[test]
    fn off_diagonal_bounded_by_diagonal(m in manifold(), seed in 0u64..1000, ds in 1.0f64..3.0) {
        let s = m.rkhs_threshold() + ds;
        let ev = Evaluator::new(m, KernelSpec::sobolev(s).with_tail_bound(1e-8)).unwrap();
        let pts = sample_points(&m, 2, seed);
        let off = ev.eval(&pts[0], &pts[1]).unwrap().value;
        let diag = ev.eval(&pts[0], &pts[0]).unwrap().value;
        prop_assert!(off.abs() <= diag + 1e-7);
    }

    #[test]
    fn sobolev_norms_increase_with_s(m in manifold(), seed in 0u64..1000, s in 0.0f64..3.0, ds in 0.0f64..2.0) {
        let f = SpectralFunction::random(m, 6, seed).unwrap();
        prop_assert!(sobolev_norm_sq(&f, s + ds, NormVariant::Bessel) >= sobolev_norm_sq(&f, s, NormVariant::Bessel) * (1.0 - 1e-14));
        let (c, big_c) = norm_equivalence_bracket(&m, s, 6).unwrap();
        let q = sobolev_norm_sq(&f, s, NormVariant::InversePower) / sobolev_norm_sq(&f, s, NormVariant::Bessel);
        prop_assert!(q >= c * (1.0 - 1e-12) && q <= big_c * (1.0 + 1e-12));
    }

    #[test]
    fn bessel_potentials_compose(m in manifold(), seed in 0u64..1000, s1 in 0.0f64..3.0, s2 in 0.0f64..3.0) {
        let f = SpectralFunction::random(m, 5, seed).unwrap();
        let two_steps = apply_bessel_potential(&apply_bessel_potential(&f, s1, Potential::Bessel), s2, Potential::Bessel);
        let one_step = apply_bessel_potential(&f, s1 + s2, Potential::Bessel);
        for (idx, c) in one_step.coefficients() {
            prop_assert!((two_steps.get(idx.level, idx.k) - c).abs() <= 1e-13 * c.abs().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn heat_flow_is_a_semigroup_and_contracts(m in manifold(), seed in 0u64..1000, t in 0.0f64..2.0, s in 0.0f64..2.0) {
        let f = SpectralFunction::random(m, 5, seed).unwrap();
        let composed = heat_propagate(&heat_propagate(&f, t), s);
        let direct = heat_propagate(&f, t + s);
        for (idx, c) in direct.coefficients() {
            prop_assert!((composed.get(idx.level, idx.k) - c).abs() <= 1e-14 * (1.0 + c.abs()));
        }
        prop_assert!(direct.l2_norm_sq() <= f.l2_norm_sq() * (1.0 + 1e-14));
    }

    #[test]
    fn arc_length_inverts(a in 0.5f64..3.0, b in 0.5f64..3.0, theta in 0.0f64..TAU) {
        let curve = EmbeddedCurve::ellipse(a, b).unwrap();
        let s = curve.arc_length(theta).unwrap();
        let back = curve.inverse_arc_length(s).unwrap();
        prop_assert!((back - theta).abs() <= 1e-9);
    }

    #[test]
    fn arc_length_is_additive(a in 0.5f64..3.0, b in 0.5f64..3.0, x in 0.0f64..TAU, y in 0.0f64..TAU) {
        let curve = EmbeddedCurve::ellipse(a, b).unwrap();
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let whole = curve.length();
        let parts = curve.arc_length(lo).unwrap()
            + (curve.arc_length(hi).unwrap() - curve.arc_length(lo).unwrap())
            + (whole - curve.arc_length(hi).unwrap());
        prop_assert!((parts - whole).abs() <= 1e-12 * whole);
        prop_assert!(curve.arc_length(hi).unwrap() >= curve.arc_length(lo).unwrap());
    }

    #[test]
    fn execution_policy_does_not_change_results(seed in 0u64..1000, n in 2usize..40) {
        let m = Manifold::sphere(3).unwrap();
        let spec = KernelSpec::sobolev(2.0).with_tail_bound(1e-6);
        let pts = sample_points(&m, n, seed);
        let seq = gram_with(Execution::Sequential, &m, &spec, &pts).unwrap();
        let par = gram_with(Execution::Parallel, &m, &spec, &pts).unwrap();
        prop_assert!(seq.entries.iter().zip(par.entries.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
        let f = |i: usize| ((i as f64) * 0.1 + seed as f64).sin();
        prop_assert_eq!(sum_indexed(Execution::Sequential, 5000, f).to_bits(), sum_indexed(Execution::Parallel, 5000, f).to_bits());
    }

    #[test]
    fn extrapolation_recovers_geometric_limits(limit in -5.0f64..5.0, c in 0.1f64..3.0, q in 0.2f64..0.7) {
        let xs: Vec<f64> = (0..12).map(|k| limit + c * q.powi(k)).collect();
        prop_assert!((aitken_iterated(&xs) - limit).abs() <= 1e-10);
        let hs: Vec<f64> = (0..10).map(|k| 0.5f64.powi(k + 2)).collect();
        let ys: Vec<f64> = hs.iter().map(|h| limit + c * h - c * c * h * h).collect();
        prop_assert!((richardson(&hs, &ys) - limit).abs() <= 1e-11);
    }

    #[test]
    fn sphere_distance_is_symmetric(m in manifold(), seed in 0u64..1000) {
        prop_assume!(m != Manifold::Circle);
        let pts = sample_points(&m, 2, seed);
        let ab = distance(&m, &pts[0], &pts[1]).unwrap();
        let ba = distance(&m, &pts[1], &pts[0]).unwrap();
        prop_assert_eq!(ab.to_bits(), ba.to_bits());
        let Zonal::Cosine(z) = Zonal::between(&m, &pts[0], &pts[1]).unwrap() else { unreachable!() };
        prop_assert!((ab.cos() - z).abs() < 1e-14);
    }

    #[test]
    fn point_constructors_reduce_and_validate(theta in -50.0f64..50.0) {
        let p = Point::angle(theta);
        let Point::Circle(x) = p else { unreachable!() };
        prop_assert!((0.0..TAU).contains(&x));
        prop_assert!(((x - theta) / TAU - ((x - theta) / TAU).round()).abs() < 1e-12);
    }
}

#[test]
fn inverse_power_weighting_is_positive_definite_on_the_circle() {
    let m = Manifold::Circle;
    let spec = KernelSpec::sobolev(1.5)
        .with_weighting(Weighting::InversePower)
        .with_tail_bound(1e-8);
    let pts = sample_points(&m, 60, 1);
    let g = gram_with(Execution::default(), &m, &spec, &pts).unwrap();
    assert!(g.is_psd(), "λ_min = {}", g.min_eig_bound);
}
