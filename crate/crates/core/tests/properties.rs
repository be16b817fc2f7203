use hilbert_ineq::continuous::test_function_ratio;
use hilbert_ineq::eulermaclaurin::{tail_lower_bound, tail_upper_bound};
use hilbert_ineq::kernels::{check_homogeneity, EvalMode, HomogeneitySample, Kernel};
use hilbert_ineq::numerics::{
    format_decimal, parse_fraction, parse_number, powi, Enclosure, Precision, Rational, Rounding,
};
use hilbert_ineq::quadform::{
    power_iteration_lambda_max, quadform_fast_max, quadform_naive, rayleigh_quotient, CoefficientSequence,
};
use hilbert_ineq::schur::{certify, Certificate, CertifyOptions};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-100_000i64..=100_000, 1i64..=1000).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=10_000, 1i64..=1000).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn enclosure() -> impl Strategy<Value = (Enclosure, Rational)> {
    (rational(), 0i64..=1000, 1i64..=1000, 0i64..=16).prop_map(|(lo, wp, wq, t)| {
        let w = Rational::new(wp.into(), wq.into());
        let x = &lo + &w * Rational::new(t.into(), 16.into());
        (Enclosure::new(lo.clone(), lo + w).unwrap(), x)
    })
}

/// α with denominator at most 4, in (0, 2].
fn small_alpha() -> impl Strategy<Value = Rational> {
    (1i64..=8).prop_map(|p| Rational::new(p.into(), 4.into()))
}

fn coefficients(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn arithmetic_contains_exact_results((a, x) in enclosure(), (b, y) in enclosure()) {
        prop_assert!((&a + &b).contains(&(&x + &y)));
        prop_assert!((&a - &b).contains(&(&x - &y)));
        prop_assert!((&a * &b).contains(&(&x * &y)));
        prop_assert!(a.powi(2).contains(&powi(&x, 2)));
        if let Ok(q) = a.checked_div(&b) {
            prop_assert!(q.contains(&(&x / &y)));
        }
    }

    #[test]
    fn outward_rounding_widens((a, x) in enclosure(), bits in 1u32..80) {
        let r = a.clone().round_outward(bits);
        prop_assert!(r.contains_enclosure(&a));
        prop_assert!(r.contains(&x));
    }

    #[test]
    fn hull_and_intersection((a, x) in enclosure(), (b, _) in enclosure()) {
        let h = a.hull(&b);
        prop_assert!(h.contains_enclosure(&a) && h.contains_enclosure(&b));
        match a.intersect(&b) {
            Some(i) => prop_assert!(a.overlaps(&b) && a.contains_enclosure(&i)),
            None => prop_assert!(!a.overlaps(&b)),
        }
        prop_assert!(a.contains(&x));
    }

    #[test]
    fn fraction_literals_round_trip(r in rational()) {
        prop_assert_eq!(parse_fraction(&r.to_string()).unwrap(), r.clone());
        prop_assert_eq!(parse_number(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn decimal_rounding_brackets(r in rational(), digits in 0usize..12) {
        let down = parse_number(&format_decimal(&r, digits, Rounding::Down)).unwrap();
        let up = parse_number(&format_decimal(&r, digits, Rounding::Up)).unwrap();
        prop_assert!(down <= r && r <= up);
    }

    #[test]
    fn max_kernel_is_symmetric_and_homogeneous(
        alpha in small_alpha(),
        x in positive_rational(),
        y in positive_rational(),
        lambda in positive_rational(),
    ) {
        let k = Kernel::max_family(alpha).unwrap();
        let mode = EvalMode::Enclosure(Precision::new(96));
        let kxy = k.eval(&x, &y, &mode).unwrap().enclosure().unwrap();
        let kyx = k.eval(&y, &x, &mode).unwrap().enclosure().unwrap();
        prop_assert!(kxy.overlaps(&kyx));
        let report = check_homogeneity(&k, &[HomogeneitySample::new(x, y, lambda)], &mode).unwrap();
        prop_assert!(report.passed, "{:?}", report);
    }

    #[test]
    fn tail_bounds_sandwich_float_tail(alpha in small_alpha(), m in 1u64..200) {
        let p = Precision::new(96);
        let a = alpha.clone();
        let af = hilbert_ineq::numerics::to_f64(&a);
        let lo = tail_lower_bound(&alpha, m, &p).unwrap().enclosure;
        let hi = tail_upper_bound(&alpha, m, &p).unwrap().enclosure;
        let t = hilbert_ineq::eulermaclaurin::float_tail(af, m);
        let scale = t * 1e-12;
        prop_assert!(lo.hi_f64() <= t + scale, "lower {} vs {}", lo.hi_f64(), t);
        prop_assert!(hi.lo_f64() >= t - scale, "upper {} vs {}", hi.lo_f64(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_form_matches_naive(a in coefficients(300), alpha in 0.05f64..2.0) {
        let seq = CoefficientSequence::from_real(a).unwrap();
        let naive = quadform_naive(&Kernel::max_family_f64(alpha).unwrap(), &seq);
        let fast = quadform_fast_max(alpha, &seq);
        prop_assert!((naive - fast).abs() <= 1e-12 * naive.abs().max(1e-300), "{} vs {}", naive, fast);
    }

    #[test]
    fn form_is_positive(a in coefficients(64), alpha in 0.05f64..2.0) {
        let seq = CoefficientSequence::from_real(a).unwrap();
        prop_assert!(quadform_fast_max(alpha, &seq) > 0.0);
    }

    #[test]
    fn rayleigh_quotients_respect_the_constant(a in coefficients(200), alpha in 0.1f64..1.5) {
        // C_α = 2/α on (0, 3/2]
        let seq = CoefficientSequence::from_real(a).unwrap();
        let q = rayleigh_quotient(&Kernel::max_family_f64(alpha).unwrap(), &seq).unwrap();
        prop_assert!(q <= 2.0 / alpha + 1e-9, "{} > {}", q, 2.0 / alpha);
    }

    #[test]
    fn scaled_form_is_nondecreasing_in_alpha(a in coefficients(32), a1 in 0.05f64..2.0, d in 0.0f64..1.0) {
        let seq = CoefficientSequence::from_real(a).unwrap();
        let a2 = a1 + d;
        let f1 = a1 * quadform_fast_max(a1, &seq);
        let f2 = a2 * quadform_fast_max(a2, &seq);
        prop_assert!(f2 >= f1 * (1.0 - 1e-12), "{} < {}", f2, f1);
    }

    #[test]
    fn finite_sections_below_constant(n in 1usize..300) {
        let e = power_iteration_lambda_max(1.5, n, 1e-12, 100_000).unwrap();
        prop_assert!(e.lambda_max <= 4.0 / 3.0 + 1e-9);
        prop_assert!(e.lambda_max >= 1.0 - 1e-12);
    }

    #[test]
    fn test_ratios_increase_to_constant(alpha in small_alpha(), e1 in 0.001f64..2.0, e2 in 0.001f64..2.0) {
        let k = Kernel::max_family(alpha.clone()).unwrap();
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let r_small = test_function_ratio(&k, lo).unwrap();
        let r_big = test_function_ratio(&k, hi).unwrap();
        let b = 2.0 / hilbert_ineq::numerics::to_f64(&alpha);
        prop_assert!(r_big <= r_small && r_small < b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn certificates_survive_json(p in 1i64..8) {
        let alpha = Rational::new(p.into(), 4.into());
        let opts = CertifyOptions { finite_m: 8, tail_split: 256, precision: Precision::new(64), ..Default::default() };
        let cert = certify(&alpha, &opts).unwrap();
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        prop_assert_eq!(&back, &cert);
        let r = back.recheck(&Precision::new(64)).unwrap();
        prop_assert!(r.matches);
    }
}

#[test]
fn zero_and_one_enclosures() {
    assert!(Enclosure::zero().contains(&Rational::zero()));
    assert!(Enclosure::one().contains(&Rational::one()));
}
