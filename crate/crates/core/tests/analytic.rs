use evreg::analytic::{
    analyticity_radius, analyticity_seminorm, default_ladder, default_resolution, series_eval,
    CauchyFit,
};
use evreg::finitediff::derivative_estimate;
use evreg::kernel::{Orbit, Resolution, VerdictKind, C64};
use evreg::numeric::ln_factorial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exp_orbit() -> Orbit {
    Orbit::real(0.0, f64::exp).with_real_oracle(|_, t| t.exp())
}

/// `1/(c − t)` with `f^{(k)}(t) = k!/(c − t)^{k+1}`.
fn pole(c: f64) -> Orbit {
    Orbit::real(0.0, move |t| 1.0 / (c - t))
        .with_real_oracle(move |k, t| (ln_factorial(k) - (k as f64 + 1.0) * (c - t).ln()).exp())
}

#[test]
fn seminorm_examples() {
    let g = pole(1.5);
    let v = analyticity_seminorm(&g, 0.5, 0.5, 30, &default_resolution()).unwrap();
    assert_eq!(v.kind, VerdictKind::Finite);
    assert!((v.value.unwrap() - 2.0).abs() <= 1e-3, "{:?}", v.value);

    let v = analyticity_seminorm(&g, 0.5, 0.9, 24, &default_resolution()).unwrap();
    assert_eq!(v.kind, VerdictKind::Diverging);

    let c = Orbit::real(0.0, |_| -3.0).with_real_oracle(|k, _| if k == 0 { -3.0 } else { 0.0 });
    let v = analyticity_seminorm(&c, 2.0, 1.0, 24, &default_resolution()).unwrap();
    // Values pass through log space, so allow a few ulps.
    assert_eq!(v.kind, VerdictKind::Finite);
    assert!((v.value.unwrap() - 3.0).abs() <= 4.0 * f64::EPSILON * 3.0);
}

#[test]
fn radius_examples() {
    let ladder = [1.0, 0.5, 0.25];
    assert_eq!(
        analyticity_radius(&exp_orbit(), 3.0, &ladder, 24)
            .unwrap()
            .radius,
        Some(1.0)
    );
    assert_eq!(
        analyticity_radius(&pole(1.5), 0.5, &ladder, 24)
            .unwrap()
            .radius,
        Some(0.5)
    );
    assert_eq!(
        analyticity_radius(&pole(1.5), 0.5, &default_ladder(), 24)
            .unwrap()
            .radius,
        Some(0.5)
    );

    let factorial_squared =
        Orbit::real(0.0, |_| 1.0).with_real_oracle(|k, _| (2.0 * ln_factorial(k)).exp());
    assert_eq!(
        analyticity_radius(&factorial_squared, 2.0, &ladder, 24)
            .unwrap()
            .radius,
        None
    );

    assert!(analyticity_radius(&exp_orbit(), 3.0, &[0.5, 1.0], 24).is_err());
    assert!(analyticity_radius(&exp_orbit(), 3.0, &[2.0, 1.0], 24).is_err());
}

#[test]
fn finite_verdicts_shrink_with_the_radius() {
    for (f, t) in [(pole(1.5), 0.5), (pole(2.0), 1.2), (exp_orbit(), 2.0)] {
        let report = analyticity_radius(&f, t, &default_ladder(), 24).unwrap();
        let finite: Vec<f64> = report
            .per_radius
            .iter()
            .filter_map(|(_, v)| v.value)
            .collect();
        let first_finite = report
            .per_radius
            .iter()
            .position(|(_, v)| v.is_finite())
            .unwrap();
        assert!(report.per_radius[first_finite..]
            .iter()
            .all(|(_, v)| v.is_finite()));
        assert!(finite.windows(2).all(|w| w[1] <= w[0]), "{finite:?}");
    }
}

#[test]
fn series_examples() {
    let exp = exp_orbit();
    let fit = CauchyFit::at_center(&exp, 0.0, 2.0, 40).unwrap();
    let s = series_eval(&exp, C64::new(1.0, 0.0), 20, &fit).unwrap();
    let err = (s.value[0] - std::f64::consts::E).norm();
    assert!(err <= 1e-15 * std::f64::consts::E * 2.0, "{err:e}");
    assert!(err <= s.error_bound());

    let at_center = series_eval(&exp, C64::new(0.0, 0.0), 0, &fit).unwrap();
    assert_eq!(at_center.value[0], C64::new(1.0, 0.0));
    assert_eq!(at_center.tail_bound, 0.0);

    let geo = pole(1.0);
    let fit = CauchyFit::at_center(&geo, 0.0, 1.0, 40).unwrap();
    let s = series_eval(&geo, C64::new(0.5, 0.0), 30, &fit).unwrap();
    assert!((s.value[0].re - 2.0).abs() <= s.error_bound());

    assert!(series_eval(&geo, C64::new(0.0, 1.0), 10, &fit).is_err());
}

#[test]
fn series_error_stays_below_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let exp = exp_orbit();
    let exp_fit = CauchyFit::at_center(&exp, 0.5, 1.0, 40).unwrap();
    let geo = pole(1.0);
    let geo_fit = CauchyFit::at_center(&geo, 0.0, 1.0, 40).unwrap();
    for _ in 0..100 {
        let z = C64::from_polar(
            rng.gen_range(0.0..0.95),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        let k = rng.gen_range(5..40);
        let s = series_eval(&exp, z + 0.5, k, &exp_fit).unwrap();
        assert!(
            (s.value[0] - (z + 0.5).exp()).norm() <= s.error_bound(),
            "exp at {z}"
        );
        let s = series_eval(&geo, z, k, &geo_fit).unwrap();
        assert!(
            (s.value[0] - 1.0 / (1.0 - z)).norm() <= s.error_bound(),
            "geometric at {z}, K = {k}"
        );
    }
}

#[test]
fn estimates_agree_with_oracles() {
    for (f, t) in [(exp_orbit(), 2.0), (pole(3.0), 1.0)] {
        for k in 1..=4 {
            let est = derivative_estimate(&f.clone().without_oracle(), t, k, 0.1, 8).unwrap();
            let exact = f.derivative(k, t).unwrap();
            assert!(
                (&est.value - &exact).norm() <= est.error.max(1e-12 * exact.norm()) * 8.0,
                "k = {k}"
            );
        }
    }
    let res = Resolution::new(16, 3).unwrap();
    for (f, t, r) in [
        (exp_orbit(), 3.0, 0.5),
        (pole(1.5), 0.5, 0.5),
        (pole(1.5), 0.5, 0.9),
    ] {
        let with = analyticity_seminorm(&f, t, r, 6, &res).unwrap();
        let without = analyticity_seminorm(&f.clone().without_oracle(), t, r, 6, &res);
        match without {
            Ok(without) => assert_eq!(with.kind, without.kind, "t = {t}, r = {r}"),
            // No estimate exists there, so there is nothing to compare.
            Err(e) => assert!(matches!(e, evreg::Error::Inconclusive { .. }), "{e}"),
        }
    }
}
