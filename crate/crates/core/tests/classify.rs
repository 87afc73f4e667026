use evreg::classify::{
    default_scan, orbit_threshold, probe_vectors, uniform_threshold, uniform_threshold_for,
    ClassifyOptions, Property, RegularityReport,
};
use evreg::gallery::{make_example, ExampleSpec};
use evreg::kernel::{ComplexValue, Orbit, Vector, VerdictKind, C64};
use evreg::seminorm::SeminormProperty;
use proptest::prelude::*;

fn bounded() -> Property {
    Property::seminorm(SeminormProperty::SupNorm)
}

fn opts(probes: usize) -> ClassifyOptions {
    ClassifyOptions {
        probes,
        ..ClassifyOptions::default()
    }
}

/// Differentiable everywhere except at 2.5.
fn kink() -> Orbit {
    Orbit::real(0.0, |t| (t - 2.5).abs())
}

fn once() -> Property {
    Property::Differentiable { k: 1 }
}

/// Local windows reach no closer than 1/16 past the lattice point.
const LOCAL_BIAS: f64 = 1.0 / 16.0 + 1.0 / 64.0;

#[test]
fn orbit_threshold_examples() {
    let shift = make_example(&ExampleSpec::NilpotentShift { delta: 0.01 }).unwrap();
    let n = shift.dim();
    let x = Vector::from_fn(n, |i, _| C64::new(if i >= n / 2 { 1.0 } else { 0.0 }, 0.0));
    let th = orbit_threshold(
        &shift.orbit(x).unwrap(),
        "half",
        &Property::Zero,
        &default_scan(),
        &opts(0),
    )
    .unwrap();
    assert!(
        (th.threshold.unwrap() - 0.5).abs() <= 1.0 / 64.0,
        "{:?}",
        th.threshold
    );
    assert_eq!(th.verdict(), VerdictKind::Finite);

    let lin = Orbit::real(0.0, |t| t);
    let th = orbit_threshold(&lin, "t", &bounded(), &default_scan(), &opts(0)).unwrap();
    assert_eq!(th.threshold, None);
    assert_eq!(th.verdict(), VerdictKind::Diverging);

    let decay = Orbit::real(0.0, |t| (-t).exp());
    let th = orbit_threshold(&decay, "exp", &bounded(), &default_scan(), &opts(0)).unwrap();
    assert_eq!(th.threshold, Some(0.0));

    let th = orbit_threshold(&kink(), "kink", &once(), &default_scan(), &opts(0)).unwrap();
    assert_eq!(th.witness_n, Some(3));
    let u = th.threshold.unwrap();
    assert!((2.5 - LOCAL_BIAS..=2.5).contains(&u), "{u}");
}

#[test]
fn scan_must_start_at_zero_and_increase() {
    let decay = Orbit::real(0.0, |t| (-t).exp());
    for scan in [vec![1, 2], vec![0, 2, 2], vec![]] {
        assert!(
            orbit_threshold(&decay, "x", &bounded(), &scan, &opts(0)).is_err(),
            "{scan:?}"
        );
    }
}

#[test]
fn nilpotent_shift_thresholds() {
    let f = make_example(&ExampleSpec::NilpotentShift { delta: 1.0 / 64.0 }).unwrap();
    let report = uniform_threshold(&f, &Property::Zero, &default_scan(), &opts(8)).unwrap();
    assert_eq!(report.uniform_threshold, Some(1.0));
    assert_eq!(report.lattice, None);
    for (j, o) in report.per_orbit.iter().take(64).enumerate() {
        assert_eq!(o.orbit_id, format!("e{j}"));
        assert_eq!(o.threshold, Some((64 - j) as f64 / 64.0));
    }
    let max = report
        .per_orbit
        .iter()
        .filter_map(|o| o.threshold)
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(report.uniform_threshold, Some(max));
}

#[test]
fn uniform_examples() {
    let diag = make_example(&ExampleSpec::DiagonalAnalytic {
        lambdas: vec![
            ComplexValue { re: -1.0, im: 0.0 },
            ComplexValue { re: -0.5, im: 2.0 },
        ],
    })
    .unwrap();
    let r = uniform_threshold(&diag, &Property::Analytic, &default_scan(), &opts(2)).unwrap();
    assert_eq!(r.uniform_threshold, Some(0.0));

    let poly = make_example(&ExampleSpec::MatrixPoly).unwrap();
    let r = uniform_threshold(
        &poly,
        &Property::Differentiable { k: 1 },
        &default_scan(),
        &opts(4),
    )
    .unwrap();
    assert_eq!(r.uniform_threshold, Some(0.0));
    let r = uniform_threshold(&poly, &bounded(), &default_scan(), &opts(4)).unwrap();
    assert_eq!(r.uniform_threshold, None);
    assert_eq!(r.uniform_verdict(), VerdictKind::Diverging);
    assert!(r.witness_orbit.is_some());
}

#[test]
fn probe_vectors_are_seeded() {
    let a = probe_vectors(3, 5, 1);
    assert_eq!(a, probe_vectors(3, 5, 1));
    assert_ne!(a, probe_vectors(3, 5, 2));
    assert_eq!(a.len(), 8);
    assert_eq!(a[0].0, "e0");
    assert_eq!(a[3].0, "probe0");
}

#[test]
fn adding_probes_never_lowers_the_threshold() {
    let f = make_example(&ExampleSpec::NilpotentShift { delta: 1.0 / 16.0 }).unwrap();
    let all = probe_vectors(f.dim(), 0, 3);
    let mut previous = f64::NEG_INFINITY;
    for take in [1, 4, 9, 16] {
        let r = uniform_threshold_for(
            &f,
            &Property::Zero,
            &all[16 - take..],
            &default_scan(),
            &opts(0),
        )
        .unwrap();
        let u = r.uniform_threshold.unwrap();
        assert!(u >= previous);
        previous = u;
    }
    assert!(uniform_threshold_for(&f, &Property::Zero, &[], &default_scan(), &opts(0)).is_err());
}

#[test]
fn reports_serialize() {
    let f = make_example(&ExampleSpec::NilpotentShift { delta: 0.25 }).unwrap();
    let r = uniform_threshold(&f, &Property::Zero, &default_scan(), &opts(2)).unwrap();
    let back: RegularityReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("orbit_id,property,threshold,verdict,witness_n")
    );
    assert_eq!(csv.lines().count(), 1 + 4 + 2 + 1);
    assert!(csv
        .lines()
        .last()
        .unwrap()
        .starts_with("uniform,Zero,1.0000000000000000e0,Finite"));
}

#[test]
fn property_json_shape() {
    let p: Property =
        serde_json::from_str(r#"{"name": "Seminorm", "property": "Holder", "alpha": 0.5}"#)
            .unwrap();
    assert_eq!(
        p,
        Property::Seminorm {
            property: SeminormProperty::Holder,
            alpha: 0.5,
            delta_cap: 1.0
        }
    );
    let d: Property = serde_json::from_str(r#"{"name": "Differentiable", "k": 2}"#).unwrap();
    assert_eq!(d, Property::Differentiable { k: 2 });
    assert!(
        serde_json::from_str::<Property>(r#"{"name": "Differentiable", "k": 2, "x": 1}"#).is_err()
    );
    assert!(serde_json::from_str::<Property>(r#"{"name": "Holomorphic"}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn thresholds_ignore_nonzero_scaling(re in -4.0f64..4.0, im in -4.0f64..4.0) {
        let lambda = C64::new(re, im);
        prop_assume!(lambda.norm() > 1e-2);
        let shift = make_example(&ExampleSpec::NilpotentShift { delta: 1.0 / 32.0 }).unwrap();
        let x = Vector::from_fn(shift.dim(), |i, _| C64::new(((i * 7) % 5) as f64 - 2.0, (i % 3) as f64));
        let cases = [
            (shift.orbit(x).unwrap(), Property::Zero),
            (kink(), once()),
            (Orbit::real(0.0, |t| t.sqrt()), Property::seminorm(SeminormProperty::UniformContinuity)),
        ];
        for (orbit, property) in cases {
            let a = orbit_threshold(&orbit, "x", &property, &default_scan(), &opts(0)).unwrap();
            let b = orbit_threshold(&orbit.scaled(lambda), "x", &property, &default_scan(), &opts(0)).unwrap();
            prop_assert_eq!(a.threshold, b.threshold, "{}", property.label());
        }
    }
}
