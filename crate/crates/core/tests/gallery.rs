use evreg::gallery::{growth_scan, growth_scan_with, make_example, symbol, ExampleSpec};
use evreg::holoext::semigroup_defect;
use evreg::kernel::{ComplexValue, Operator, Vector, C64};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn cv(re: f64, im: f64) -> ComplexValue {
    ComplexValue { re, im }
}

const LADDER: [f64; 4] = [1e3, 1e4, 1e5, 1e6];

#[test]
fn matrix_poly() {
    let f = make_example(&ExampleSpec::MatrixPoly).unwrap();
    assert_eq!(f.eval(0.0), Operator::zeros(2));
    let d = semigroup_defect(&f, &[1.0]).unwrap();
    let gap = Operator::Dense(DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(3.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    ));
    assert!((d - gap.norm()).abs() <= 1e-12);
    assert!(d > 0.0);
}

#[test]
fn multiplication_semigroup() {
    assert_eq!(symbol(0.0), C64::new(0.0, 0.0));
    let f = make_example(&ExampleSpec::MultiplicationC0 {
        s_max: 1e3,
        points: 128,
    })
    .unwrap();
    let v = f.eval(2.5);
    assert_eq!(v.entry(0, 0), C64::new(1.0, 0.0));
    let grid: Vec<f64> = (0..8).map(|j| 0.37 * j as f64).collect();
    assert!(semigroup_defect(&f, &grid).unwrap() <= 1e-13);
    assert!(make_example(&ExampleSpec::MultiplicationC0 {
        s_max: -1.0,
        points: 128
    })
    .is_err());
}

#[test]
fn nilpotent_shift() {
    let spec = ExampleSpec::NilpotentShift { delta: 0.01 };
    let f = make_example(&spec).unwrap();
    assert_eq!(spec.time_lattice(), Some(0.01));
    let n = f.dim();
    let x = Vector::from_fn(n, |i, _| C64::new(if i >= n / 2 { 1.0 } else { 0.0 }, 0.0));
    let orbit = f.orbit(x).unwrap();
    assert!(orbit.eval(0.5).iter().all(|z| *z == C64::new(0.0, 0.0)));
    assert!(orbit.eval(0.49).iter().any(|z| *z != C64::new(0.0, 0.0)));
    for t in [1.0, 1.3, 17.0] {
        assert_eq!(f.eval(t).norm(), 0.0);
    }
    let lattice: Vec<f64> = (0..=24).map(|j| j as f64 * 0.05).collect();
    assert_eq!(semigroup_defect(&f, &lattice).unwrap(), 0.0);
    assert!(make_example(&ExampleSpec::NilpotentShift { delta: 0.3 }).is_err());
}

#[test]
fn jordan_polynomial_entries() {
    let spec = ExampleSpec::JordanNilpotentExp {
        dim: 4,
        lambda: None,
    };
    let f = make_example(&spec).unwrap();
    let t: f64 = 1.7;
    let u = f.eval(t);
    for i in 0..4 {
        for j in 0..4 {
            let want = if j >= i {
                t.powi((j - i) as i32) / (1..=(j - i)).product::<usize>() as f64
            } else {
                0.0
            };
            assert!(
                (u.entry(i, j) - C64::new(want, 0.0)).norm() <= 1e-15,
                "({i}, {j})"
            );
        }
    }
    assert!(f.derivative(4, t).unwrap().norm() <= 1e-15);
}

#[test]
fn dense_agrees_with_diagonal_for_normal_matrices() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // A unitary built from a rotation and phases.
    let (c, sn) = (0.6, 0.8);
    let u = DMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(c, 0.0),
            C64::new(0.0, sn),
            C64::new(0.0, 0.0),
            C64::new(0.0, sn * s),
            C64::new(c * s, 0.0),
            C64::new(s, 0.0),
            C64::new(0.0, -sn * s),
            C64::new(-c * s, 0.0),
            C64::new(s, 0.0),
        ],
    );
    assert!((u.adjoint() * &u - DMatrix::<C64>::identity(3, 3)).camax() <= 1e-15);
    let lambdas = [
        C64::new(-0.5, 2.0),
        C64::new(-1.5, 0.0),
        C64::new(-0.1, -4.0),
    ];
    let a = &u * DMatrix::from_diagonal(&DVector::from_column_slice(&lambdas)) * u.adjoint();
    let dense = make_example(&ExampleSpec::DenseMatrixExp {
        matrix: (0..3)
            .map(|i| (0..3).map(|j| a[(i, j)].into()).collect())
            .collect(),
    })
    .unwrap();
    let diag = make_example(&ExampleSpec::DiagonalAnalytic {
        lambdas: lambdas.iter().map(|&l| l.into()).collect(),
    })
    .unwrap();
    for t in [0.0, 0.1, 1.0, 3.3, 10.0] {
        let rotated = u.adjoint() * dense.eval(t).to_dense() * &u;
        assert!(
            (rotated - diag.eval(t).to_dense()).camax() <= 1e-10,
            "t = {t}"
        );
    }
}

#[test]
fn parameter_validation() {
    assert!(make_example(&ExampleSpec::DiagonalAnalytic {
        lambdas: vec![cv(0.5, 0.0)]
    })
    .is_err());
    assert!(make_example(&ExampleSpec::DiagonalAnalytic { lambdas: vec![] }).is_err());
    assert!(make_example(&ExampleSpec::DenseMatrixExp {
        matrix: vec![vec![cv(1.0, 0.0)], vec![]]
    })
    .is_err());
    assert!(make_example(&ExampleSpec::JordanNilpotentExp {
        dim: 0,
        lambda: None
    })
    .is_err());
    let e = make_example(&ExampleSpec::DiagonalAnalytic {
        lambdas: vec![cv(0.5, 0.0)],
    })
    .unwrap_err();
    assert!(e.to_string().contains("lambdas"), "{e}");
}

#[test]
fn example_specs_round_trip_through_json() {
    let specs = [
        ExampleSpec::MatrixPoly,
        ExampleSpec::MultiplicationC0 {
            s_max: 10.0,
            points: 16,
        },
        ExampleSpec::NilpotentShift { delta: 0.125 },
        ExampleSpec::DiagonalAnalytic {
            lambdas: vec![cv(-1.0, 2.0)],
        },
        ExampleSpec::DenseMatrixExp {
            matrix: vec![vec![cv(1.0, 0.0)]],
        },
        ExampleSpec::JordanNilpotentExp {
            dim: 3,
            lambda: Some(cv(-0.5, 0.0)),
        },
    ];
    for s in specs {
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<ExampleSpec>(&text).unwrap(), s);
    }
    let defaulted: ExampleSpec =
        serde_json::from_str(r#"{"name": "NilpotentShift", "params": {}}"#).unwrap();
    assert_eq!(defaulted, ExampleSpec::NilpotentShift { delta: 1.0 / 64.0 });
    assert!(serde_json::from_str::<ExampleSpec>(r#"{"name": "Nope"}"#).is_err());
}

#[test]
fn growth_exponents() {
    for (n, t) in [(2, 1.0), (3, 1.0), (3, 2.0)] {
        let s = growth_scan(n, t, &LADDER).unwrap().slope;
        assert!((s - (n as f64 - t)).abs() <= 0.05, "({n}, {t}): {s}");
    }
    for (n, t) in [(1, 1.5), (2, 2.5), (3, 3.5), (1, 3.0)] {
        let s = growth_scan(n, t, &LADDER).unwrap().slope;
        assert!(s <= 0.05, "({n}, {t}): {s}");
    }
    let bounded = growth_scan(2, 2.0, &LADDER).unwrap().slope;
    assert!(bounded.abs() <= 0.1, "{bounded}");
    assert!(growth_scan(2, 1.0, &LADDER[..2]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sups_grow_with_the_window(n in 1u32..4, t in 0.0f64..4.0) {
        let g = growth_scan_with(n, t, &LADDER, 20_000).unwrap();
        prop_assert!(g.log_sups.windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn multiplier_semigroup_law(s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let f = make_example(&ExampleSpec::MultiplicationC0 { s_max: 100.0, points: 64 }).unwrap();
        let lhs = f.eval(s + t);
        let rhs = f.eval(s).compose(&f.eval(t));
        prop_assert!(lhs.sub(&rhs).norm() <= 8.0 * f64::EPSILON);
    }
}
