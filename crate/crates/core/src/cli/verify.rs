//! Invariant suite behind `reg verify`. Each check is a small, seeded,
//! self-contained run of one invariant.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    analyticity_radius, analyticity_seminorm, default_ladder, default_resolution, series_eval,
    CauchyFit,
};
use crate::classify::{default_scan, uniform_threshold, ClassifyOptions, Property};
use crate::error::{Error, Result};
use crate::finitediff::{
    diff_quotient, diff_quotient_pair, equal_step_weights, stencil_quotient, StepBox, Strategy,
};
use crate::gallery::{growth_scan, make_example, ExampleSpec};
use crate::holoext::{
    derivative_composition_defect, extend_eval, omega_membership, render_svg, sector_membership,
    semigroup_defect, ComplexPoint, HolomorphyDomain,
};
use crate::kernel::{
    assemble_derivative_operator, eval_orbit, ComplexValue, Operator, OperatorFunction, Orbit,
    Resolution, TimeWindow, Vector, C64,
};
use crate::mollifier::{mollify_deriv, smoothness_probe, MollifierFamily};
use crate::numeric::ln_factorial;
use crate::seminorm::{total_variation, SeminormProperty, SeminormSpec};

pub const SUITES: [&str; 9] = [
    "all",
    "kernel",
    "seminorm",
    "finitediff",
    "mollifier",
    "analytic",
    "holoext",
    "gallery",
    "classify",
];

const SEED: u64 = 0x5eed_0001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

type Outcome = std::result::Result<String, String>;
type Check = (&'static str, &'static str, fn() -> Outcome);

fn ensure(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

fn cv(re: f64, im: f64) -> ComplexValue {
    ComplexValue { re, im }
}

fn exp_orbit() -> Orbit {
    Orbit::real(0.0, f64::exp).with_real_oracle(|_, t| t.exp())
}

fn sin_orbit() -> Orbit {
    Orbit::real(0.0, f64::sin).with_real_oracle(|k, t| match k % 4 {
        0 => t.sin(),
        1 => t.cos(),
        2 => -t.sin(),
        _ => -t.cos(),
    })
}

fn dense_example() -> ExampleSpec {
    ExampleSpec::DenseMatrixExp {
        matrix: vec![
            vec![cv(-0.5, 0.2), cv(0.3, 0.0), cv(0.0, 0.1)],
            vec![cv(0.1, 0.0), cv(-1.0, 0.0), cv(0.2, -0.3)],
            vec![cv(0.0, 0.0), cv(0.4, 0.1), cv(-0.7, 0.5)],
        ],
    }
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn kernel_linearity() -> Outcome {
    let f = lift(make_example(&dense_example()))?;
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (x, y) = (random_vector(&mut rng, 3), random_vector(&mut rng, 3));
        let (a, b) = (
            C64::new(rng.gen_range(-2.0..2.0), 0.5),
            C64::new(-0.3, rng.gen_range(-2.0..2.0)),
        );
        let t = rng.gen_range(0.0..4.0);
        let lhs = lift(eval_orbit(&f, &(&x * a + &y * b), t))?;
        let rhs = lift(eval_orbit(&f, &x, t))? * a + lift(eval_orbit(&f, &y, t))? * b;
        worst = worst.max((lhs - &rhs).norm() / rhs.norm().max(1.0));
    }
    ensure(worst <= 1e-13, format!("max relative defect {worst:.3e}"))
}

fn kernel_assembly() -> Outcome {
    let f = lift(make_example(&dense_example()))?;
    let g = f.clone();
    let bare = OperatorFunction::new("bare", f.rep.clone(), move |t| g.eval(t));
    let mut worst: f64 = 0.0;
    for k in 1..=2 {
        for t in [0.5, 1.5] {
            let est = lift(assemble_derivative_operator(&bare, k, t))?;
            let exact = f.derivative(k, t).expect("oracle");
            worst = worst.max(est.max_entry_diff(&exact) / exact.norm().max(1.0));
        }
    }
    ensure(worst <= 1e-7, format!("max entry gap {worst:.3e}"))
}

fn random_orbit(rng: &mut ChaCha8Rng) -> Orbit {
    let c: [f64; 4] = [
        rng.gen_range(0.1..2.0),
        rng.gen_range(0.1..3.0),
        rng.gen_range(0.1..2.0),
        rng.gen_range(0.0..1.0),
    ];
    Orbit::scalar(0.0, move |t| {
        C64::new(c[0] * (c[1] * t).sin(), c[2] * (-c[3] * t).exp())
    })
}

fn seminorm_axioms() -> Outcome {
    let mut rng = rng();
    let window = TimeWindow::new(0.5, 2.5).map_err(|e| e.to_string())?;
    let res = Resolution {
        per_unit: 16,
        levels: 4,
    };
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let (x, y) = (random_orbit(&mut rng), random_orbit(&mut rng));
        let lambda = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let sum = lift(x.sum(&y))?;
        let scaled = x.scaled(lambda);
        for p in SeminormProperty::ALL {
            let spec = SeminormSpec::new(p, window)
                .with_alpha(0.5)
                .with_delta_cap(0.5)
                .with_resolution(res);
            let (px, py, ps, pl) = (
                lift(spec.evaluate(&x))?,
                lift(spec.evaluate(&y))?,
                lift(spec.evaluate(&sum))?,
                lift(spec.evaluate(&scaled))?,
            );
            if px.kind != pl.kind {
                return Err(format!("{p:?}: kind changed under scaling"));
            }
            if let (Some(a), Some(b), Some(s), Some(l)) = (px.value, py.value, ps.value, pl.value) {
                let scale = a + b + 1.0;
                worst = worst
                    .max((l - lambda.norm() * a).abs() / scale)
                    .max((s - a - b) / scale);
            }
        }
    }
    ensure(worst <= 1e-9, format!("max scaled defect {worst:.3e}"))
}

fn seminorm_variation() -> Outcome {
    let res = Resolution::default();
    let tv = lift(total_variation(
        &sin_orbit(),
        0.0,
        2.0 * std::f64::consts::PI,
        &res,
    ))?;
    let v = tv.value.ok_or("sin variation not finite")?;
    let f = Orbit::scalar(0.0, |t| C64::new((3.0 * t).sin(), t.cos() * t));
    let whole = lift(total_variation(&f, 0.0, 2.0, &res))?
        .value
        .unwrap_or(f64::NAN);
    let parts = lift(total_variation(&f, 0.0, 1.0, &res))?
        .value
        .unwrap_or(f64::NAN)
        + lift(total_variation(&f, 1.0, 2.0, &res))?
            .value
            .unwrap_or(f64::NAN);
    let gap = (whole - parts).abs() / whole;
    ensure(
        (v - 4.0).abs() <= 1e-4 && gap <= 1e-6,
        format!("TV(sin) = {v:.9}, split gap {gap:.3e}"),
    )
}

fn finitediff_strategies() -> Outcome {
    let mut rng = rng();
    let mut worst_nested: f64 = 0.0;
    let mut worst_integral: f64 = 0.0;
    for _ in 0..24 {
        let k = rng.gen_range(1..=10);
        let t = rng.gen_range(1.0..5.0);
        let h: Vec<f64> = (0..k)
            .map(|_| rng.gen_range(0.01..0.2) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let b = lift(StepBox::new(t, 0.2, h))?;
        let f = exp_orbit();
        let (s, n) = lift(diff_quotient_pair(&f, &b))?;
        worst_nested = worst_nested.max((&s - &n).norm() / s.norm());
        if k <= 3 {
            let q = lift(diff_quotient(&f, &b, Strategy::Integral))?;
            worst_integral = worst_integral.max((&s - &q).norm() / q.norm());
        }
    }
    ensure(
        worst_nested <= 1e-12 && worst_integral <= 1e-8,
        format!("nested {worst_nested:.3e}, integral (k ≤ 3) {worst_integral:.3e}"),
    )
}

fn finitediff_stencils() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=8usize {
        let f = Orbit::real(0.0, move |t| t.powi(k as i32));
        let d = lift(stencil_quotient(&f, 1.3, k, 0.05))?[0].re;
        let fact = ln_factorial(k).exp().round();
        // Rounding of a k-th difference grows like 2^k ε sup|f| / h^k.
        let noise =
            8.0 * f64::EPSILON * 2f64.powi(k as i32) * (1.3 + 0.05 * k as f64).powi(k as i32)
                / 0.05f64.powi(k as i32);
        worst = worst.max((d - fact).abs() / (noise + 1e-12 * fact));
        let w = equal_step_weights(k);
        let binom_ok = w.iter().enumerate().all(|(j, &x)| {
            let c = (ln_factorial(k) - ln_factorial(j) - ln_factorial(k - j))
                .exp()
                .round();
            x == if (k - j) % 2 == 0 { c } else { -c }
        });
        if !binom_ok {
            return Err(format!("weights of order {k} are not binomial"));
        }
    }
    let cubic = Orbit::real(0.0, |t| 2.0 - t + 3.0 * t * t - 0.5 * t.powi(3));
    let b = lift(StepBox::new(2.0, 0.2, vec![0.11, -0.07, 0.19, 0.05]))?;
    let annihilated = lift(diff_quotient(&cubic, &b, Strategy::SubsetSum))?[0].norm();
    ensure(
        worst <= 1.0 && annihilated <= 1e-9 * 8.0 / (0.11 * 0.07 * 0.19 * 0.05),
        format!("t^k stencil error / rounding bound {worst:.3e}, annihilation {annihilated:.3e}"),
    )
}

fn mollifier_mass() -> Outcome {
    let mut worst: f64 = 0.0;
    for l in 1..=64 {
        worst = worst.max((lift(MollifierFamily::new(l, 0))?.mass() - 1.0).abs());
    }
    ensure(worst <= 1e-10, format!("max |∫ϱ_l − 1| = {worst:.3e}"))
}

fn mollifier_identity() -> Outcome {
    let f = exp_orbit();
    let mut worst: f64 = 0.0;
    for k in 1..=3 {
        for l in [1, 2, 4] {
            let lhs = lift(mollify_deriv(&f, l, k, 2.0))?[0].re;
            let rhs = lift(mollify_deriv(&f, l, 0, 2.0))?[0].re;
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
    }
    ensure(worst <= 1e-8, format!("max relative gap {worst:.3e}"))
}

fn mollifier_probe() -> Outcome {
    let window = TimeWindow::new(1.0, 2.0).map_err(|e| e.to_string())?;
    let smooth = lift(smoothness_probe(
        &exp_orbit(),
        &window,
        3,
        &[2, 4, 8, 16, 32, 64],
    ))?;
    let kink = Orbit::real(0.0, |t| (t - 1.5).abs());
    let rough = lift(smoothness_probe(&kink, &window, 1, &[2, 4, 8, 16, 32, 64]))?;
    ensure(
        smooth.is_smooth_to(3) && rough.smooth_to == Some(0),
        format!(
            "exp smooth to {:?}, |t − 1.5| smooth to {:?}",
            smooth.smooth_to, rough.smooth_to
        ),
    )
}

fn geometric() -> Orbit {
    Orbit::real(0.0, |t| 1.0 / (1.5 - t))
        .with_real_oracle(|k, t| (ln_factorial(k) - (k as f64 + 1.0) * (1.5 - t).ln()).exp())
}

fn analytic_detector() -> Outcome {
    let g = geometric();
    let radius = lift(analyticity_radius(&g, 0.5, &default_ladder(), 24))?.radius;
    let p = lift(analyticity_seminorm(
        &g,
        0.5,
        0.5,
        24,
        &default_resolution(),
    ))?;
    let far = lift(analyticity_seminorm(
        &g,
        0.5,
        0.9,
        24,
        &default_resolution(),
    ))?;
    ensure(
        radius == Some(0.5)
            && p.value.is_some_and(|v| (v - 2.0).abs() <= 1e-3)
            && far.is_diverging(),
        format!(
            "radius {radius:?}, p = {:?}, r = 0.9 {:?}",
            p.value, far.kind
        ),
    )
}

fn analytic_series() -> Outcome {
    let mut rng = rng();
    let exp = exp_orbit();
    let fit = lift(CauchyFit::at_center(&exp, 0.0, 2.0, 40))?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (rad, phi) = (rng.gen_range(0.0..1.9), rng.gen_range(-3.1..3.1));
        let z = C64::from_polar(rad, phi);
        let s = lift(series_eval(&exp, z, 20, &fit))?;
        worst = worst.max((s.value[0] - z.exp()).norm() / s.error_bound().max(f64::MIN_POSITIVE));
    }
    ensure(worst <= 1.0, format!("max error / bound = {worst:.3e}"))
}

fn holo_geometry() -> Outcome {
    let dom = lift(HolomorphyDomain::new(2.3, 0.3, 6))?;
    let mut rng = rng();
    let mut members = Vec::new();
    while members.len() < 200 {
        let z = cv(rng.gen_range(0.0..30.0), rng.gen_range(-4.0..4.0));
        if omega_membership(&dom, z).is_some() {
            members.push(z);
        }
    }
    for pair in members.chunks(2) {
        let s = cv(pair[0].re + pair[1].re, pair[0].im + pair[1].im);
        if omega_membership(&dom, s).is_none() {
            return Err(format!("{:?} + {:?} left the domain", pair[0], pair[1]));
        }
    }
    for z in &members {
        if omega_membership(&dom, cv(z.re + rng.gen_range(0.0..50.0), z.im)).is_none() {
            return Err(format!("translate of {z:?} left the domain"));
        }
    }
    for _ in 0..200 {
        let (rad, phi) = (
            rng.gen_range(0.0..50.0),
            rng.gen_range(-1.0..1.0) * dom.theta(),
        );
        let z = C64::new(dom.t(), 0.0) + C64::from_polar(rad, phi);
        let z = cv(z.re, z.im);
        if sector_membership(&dom, z) && omega_membership(&dom, z).is_none() {
            return Err(format!("sector point {z:?} outside Ω_t"));
        }
    }
    ensure(
        render_svg(&dom) == render_svg(&dom),
        "closure, translation, sector containment".into(),
    )
}

fn holo_extension() -> Outcome {
    let spec = ExampleSpec::JordanNilpotentExp {
        dim: 4,
        lambda: Some(cv(-0.3, 0.5)),
    };
    let f = lift(make_example(&spec))?;
    let dom = lift(HolomorphyDomain::new(1.0, 0.5, 6))?;
    let mut rng = rng();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < 40 {
        let z = cv(rng.gen_range(0.5..8.0), rng.gen_range(-3.0..3.0));
        if omega_membership(&dom, z).is_none() {
            continue;
        }
        let e = lift(extend_eval(&f, &dom, z, 40))?;
        let exact = lift(spec.closed_form(z.into()))?.expect("closed form");
        worst = worst.max(e.value.max_entry_diff(&exact) / e.error_bound());
        checked += 1;
    }
    let mut defect: f64 = 0.0;
    for l in 0..=3 {
        for k in 0..=(6 - l).min(3) {
            defect = defect.max(lift(derivative_composition_defect(&f, l, k, 0.7, 1.1))?);
        }
    }
    ensure(
        worst <= 1.0 && defect <= 1e-10,
        format!("max error / bound {worst:.3e}, composition defect {defect:.3e}"),
    )
}

fn gallery_semigroups() -> Outcome {
    let shift = lift(make_example(&ExampleSpec::NilpotentShift {
        delta: 1.0 / 16.0,
    }))?;
    let lattice: Vec<f64> = (0..20).map(|j| j as f64 / 16.0).collect();
    let d_shift = lift(semigroup_defect(&shift, &lattice))?;
    let mult = lift(make_example(&ExampleSpec::MultiplicationC0 {
        s_max: 100.0,
        points: 64,
    }))?;
    let d_mult = lift(semigroup_defect(&mult, &[0.0, 0.3, 1.0, 2.5]))?;
    let poly = lift(make_example(&ExampleSpec::MatrixPoly))?;
    let d_poly = lift(semigroup_defect(&poly, &[1.0]))?;
    let expected = Operator::Dense(DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(3.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    ))
    .norm();
    ensure(
        d_shift == 0.0 && d_mult <= 1e-14 && (d_poly - expected).abs() <= 1e-12,
        format!("shift {d_shift:e}, multiplier {d_mult:.3e}, MatrixPoly {d_poly:.15}"),
    )
}

fn gallery_growth() -> Outcome {
    let ladder = [1e3, 1e4, 1e5, 1e6];
    let mut detail = Vec::new();
    let mut ok = true;
    for (n, t) in [(2u32, 1.0), (3, 1.0), (3, 2.0)] {
        let s = lift(growth_scan(n, t, &ladder))?.slope;
        ok &= (s - (n as f64 - t)).abs() <= 0.05;
        detail.push(format!("({n},{t}) {s:.4}"));
    }
    for (n, t) in [(1u32, 1.5), (2, 2.5)] {
        let s = lift(growth_scan(n, t, &ladder))?.slope;
        ok &= s <= 0.05;
        detail.push(format!("({n},{t}) {s:.4}"));
    }
    ensure(ok, detail.join(", "))
}

fn gallery_normal() -> Outcome {
    // A = U diag(λ) U* with a unitary U.
    let lambdas = [C64::new(-1.0, 0.5), C64::new(-0.2, -1.0)];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let u = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(s, 0.0),
            C64::new(0.0, s),
            C64::new(0.0, s),
            C64::new(s, 0.0),
        ],
    );
    let a =
        &u * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&lambdas)) * u.adjoint();
    let dense = lift(make_example(&ExampleSpec::DenseMatrixExp {
        matrix: (0..2)
            .map(|i| (0..2).map(|j| a[(i, j)].into()).collect())
            .collect(),
    }))?;
    let diag = lift(make_example(&ExampleSpec::DiagonalAnalytic {
        lambdas: lambdas.iter().map(|&l| l.into()).collect(),
    }))?;
    let mut worst: f64 = 0.0;
    for t in [0.0, 0.4, 1.7, 5.0] {
        let rotated = u.adjoint() * dense.eval(t).to_dense() * &u;
        worst = worst.max((rotated - diag.eval(t).to_dense()).camax());
    }
    ensure(worst <= 1e-10, format!("max entry gap {worst:.3e}"))
}

fn classify_shift() -> Outcome {
    let f = lift(make_example(&ExampleSpec::NilpotentShift {
        delta: 1.0 / 16.0,
    }))?;
    let opts = ClassifyOptions {
        probes: 4,
        ..ClassifyOptions::default()
    };
    let report = lift(uniform_threshold(
        &f,
        &Property::Zero,
        &default_scan(),
        &opts,
    ))?;
    let exact = report
        .per_orbit
        .iter()
        .take(16)
        .enumerate()
        .all(|(j, o)| o.threshold == Some((16 - j) as f64 / 16.0));
    let max = report
        .per_orbit
        .iter()
        .filter_map(|o| o.threshold)
        .fold(0.0, f64::max);
    ensure(
        exact && report.uniform_threshold == Some(1.0) && report.uniform_threshold == Some(max),
        format!(
            "uniform {:?}, basis thresholds exact: {exact}",
            report.uniform_threshold
        ),
    )
}

const CHECKS: [Check; 19] = [
    ("kernel", "eval_orbit linearity", kernel_linearity),
    ("kernel", "derivative assembly vs oracle", kernel_assembly),
    (
        "seminorm",
        "homogeneity and triangle inequality",
        seminorm_axioms,
    ),
    ("seminorm", "variation additivity", seminorm_variation),
    ("finitediff", "strategy equivalence", finitediff_strategies),
    ("finitediff", "stencil identities", finitediff_stencils),
    ("mollifier", "unit mass", mollifier_mass),
    ("mollifier", "derivative transfer", mollifier_identity),
    ("mollifier", "smoothness probe", mollifier_probe),
    ("analytic", "radius detector", analytic_detector),
    ("analytic", "series tail bound", analytic_series),
    ("holoext", "domain geometry", holo_geometry),
    ("holoext", "extension and composition", holo_extension),
    ("gallery", "semigroup defects", gallery_semigroups),
    ("gallery", "growth exponents", gallery_growth),
    ("gallery", "dense vs diagonal", gallery_normal),
    ("classify", "nilpotent thresholds", classify_shift),
    ("analytic", "estimator agreement", analytic_estimator),
    ("holoext", "functional equation", holo_functional),
];

fn analytic_estimator() -> Outcome {
    let res = Resolution {
        per_unit: 16,
        levels: 3,
    };
    let with = lift(analyticity_seminorm(&exp_orbit(), 3.0, 0.5, 6, &res))?;
    let without = lift(analyticity_seminorm(
        &exp_orbit().without_oracle(),
        3.0,
        0.5,
        6,
        &res,
    ))?;
    ensure(
        with.kind == without.kind,
        format!("oracle {:?}, estimates {:?}", with.kind, without.kind),
    )
}

fn holo_functional() -> Outcome {
    let spec = ExampleSpec::DiagonalAnalytic {
        lambdas: vec![cv(-1.0, 0.0), cv(-2.0, 3.0)],
    };
    let f = lift(make_example(&spec))?;
    let dom = lift(HolomorphyDomain::new(1.0, 0.5, 6))?;
    let mut rng = rng();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < 30 {
        let z = cv(rng.gen_range(0.5..4.0), rng.gen_range(-1.5..1.5));
        let w = cv(rng.gen_range(0.5..4.0), rng.gen_range(-1.5..1.5));
        let s: ComplexPoint = cv(z.re + w.re, z.im + w.im);
        if omega_membership(&dom, z).is_none() || omega_membership(&dom, w).is_none() {
            continue;
        }
        let (ez, ew, es) = (
            lift(extend_eval(&f, &dom, z, 40))?,
            lift(extend_eval(&f, &dom, w, 40))?,
            lift(extend_eval(&f, &dom, s, 40))?,
        );
        let defect = es.value.sub(&ez.value.compose(&ew.value)).norm();
        let bound = es.error_bound()
            + ez.error_bound() * ew.value.norm()
            + ez.value.norm() * ew.error_bound()
            + ez.error_bound() * ew.error_bound()
            + 16.0 * f64::EPSILON * (es.value.norm() + ez.value.norm() * ew.value.norm());
        worst = worst.max(defect / bound);
        checked += 1;
    }
    ensure(
        worst <= 1.0,
        format!("max defect / combined bound {worst:.3e}"),
    )
}

/// Runs the named suite; `all` runs every check.
pub fn run_suite(suite: &str) -> Result<SuiteReport> {
    if !SUITES.contains(&suite) {
        return Err(Error::config(
            "suite",
            format!(
                "unknown suite {suite:?}; expected one of {}",
                SUITES.join(", ")
            ),
        ));
    }
    let checks = CHECKS
        .iter()
        .filter(|(group, _, _)| suite == "all" || *group == suite)
        .map(|(group, name, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                name: format!("{group}: {name}"),
                passed,
                detail,
            }
        })
        .collect();
    Ok(SuiteReport {
        suite: suite.to_string(),
        checks,
    })
}
