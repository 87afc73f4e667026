//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use evreg::analytic::{
    analyticity_radius, analyticity_seminorm, default_ladder, default_resolution,
};
use evreg::classify::{default_scan, probe_vectors, uniform_threshold, ClassifyOptions, Property};
use evreg::finitediff::{
    diff_quotient, equal_step_weights, integral_nodes_per_axis, stencil_quotient, StepBox,
    Strategy, INTEGRAL_NODES,
};
use evreg::gallery::{growth_scan, make_example, ExampleSpec};
use evreg::holoext::{
    derivative_composition_defect, domain_svg, extend_eval, omega_membership, sector_membership,
    semigroup_defect, ComplexPoint, HolomorphyDomain,
};
use evreg::kernel::{ComplexValue, Operator, Orbit, Resolution, TimeWindow, VerdictKind, C64};
use evreg::mollifier::{smoothness_probe, MollifierFamily};
use evreg::numeric::{factorial, ln_factorial};
use evreg::seminorm::{total_variation, SeminormProperty, SeminormSpec};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(budget: Duration, start: Instant, detail: String, ok: bool) -> Outcome {
    let took = start.elapsed();
    ensure(
        ok && took < budget,
        format!(
            "{detail}; {:.2} s of {} s",
            took.as_secs_f64(),
            budget.as_secs()
        ),
    )
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + stream)
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

fn quintic() -> Orbit {
    Orbit::real(0.0, |t| t.powi(5)).with_real_oracle(|k, t| {
        if k > 5 {
            0.0
        } else {
            factorial(5) / factorial(5 - k) * t.powi(5 - k as i32)
        }
    })
}

/// A uniform draw from `[−δ, δ]` away from the excluded origin.
fn increment(rng: &mut ChaCha8Rng, delta: f64) -> f64 {
    loop {
        let h: f64 = rng.gen_range(-delta..=delta);
        if h.abs() >= delta * 2f64.powi(-20) {
            return h;
        }
    }
}

fn triple_equivalence() -> Outcome {
    const DRAWS: usize = 8;
    let start = Instant::now();
    let mut rng = rng(1);
    let mut nested = [0.0f64; 7];
    let mut integral = [0.0f64; 7];
    for (_, f) in [
        ("exp", exp_orbit()),
        ("sin", sin_orbit()),
        ("t^5", quintic()),
    ] {
        for k in 1..=6 {
            for _ in 0..DRAWS {
                let t = rng.gen_range(1.0..5.0);
                let h: Vec<f64> = (0..k).map(|_| increment(&mut rng, 0.2)).collect();
                let b = StepBox::new(t, 0.2, h).map_err(|e| e.to_string())?;
                let s = diff_quotient(&f, &b, Strategy::SubsetSum).map_err(|e| e.to_string())?;
                let n = diff_quotient(&f, &b, Strategy::Nested).map_err(|e| e.to_string())?;
                let q = diff_quotient(&f, &b, Strategy::Integral).map_err(|e| e.to_string())?;
                let rel = |a: f64, b: f64| {
                    let scale = a.abs().max(b.abs());
                    if scale == 0.0 {
                        0.0
                    } else {
                        (a - b).abs() / scale
                    }
                };
                nested[k] = nested[k].max(rel(s[0].re, n[0].re));
                integral[k] = integral[k].max(rel(s[0].re, q[0].re));
            }
        }
    }
    let ok = nested[1..].iter().all(|&e| e <= 1e-12) && integral[1..].iter().all(|&e| e <= 1e-8);
    let per_k: Vec<String> = (1..=6)
        .map(|k| {
            format!(
                "k={k} nested {:.1e} integral {:.1e}",
                nested[k], integral[k]
            )
        })
        .collect();
    let nodes: Vec<usize> = (1..=6).map(integral_nodes_per_axis).collect();
    within(
        Duration::from_secs(10),
        start,
        format!(
            "{}; GL nodes per axis {nodes:?} (nominal {INTEGRAL_NODES})",
            per_k.join(", ")
        ),
        ok,
    )
}

fn stencil_identities() -> Outcome {
    // Exact for every h; rounding grows like h^{-k}, so the step stays moderate.
    let (t, h) = (1.3, 0.5);
    let mut worst_rel: f64 = 0.0;
    let mut worst_poly: f64 = 0.0;
    for k in 1..=8usize {
        let f = Orbit::real(0.0, move |s| s.powi(k as i32));
        let d = stencil_quotient(&f, t, k, h).map_err(|e| e.to_string())?[0].re;
        worst_rel = worst_rel.max((d - factorial(k)).abs() / factorial(k));

        // Degree k − 1 with unit coefficients; scale is its sup over the stencil divided by h^k.
        let p = Orbit::real(0.0, move |s| (0..k).map(|j| s.powi(j as i32)).sum());
        let top = t + k as f64 * h;
        let scale = (0..k).map(|j| top.powi(j as i32)).sum::<f64>() / h.powi(k as i32);
        let z = stencil_quotient(&p, t, k, h).map_err(|e| e.to_string())?[0].norm();
        worst_poly = worst_poly.max(z / scale);

        let w = equal_step_weights(k);
        let binomial = w.iter().enumerate().all(|(j, &x)| {
            let c = (ln_factorial(k) - ln_factorial(j) - ln_factorial(k - j))
                .exp()
                .round();
            x == if (k - j) % 2 == 0 { c } else { -c }
        });
        if !binomial {
            return Err(format!("equal-step weights of order {k} are not binomial"));
        }
    }
    ensure(
        worst_rel <= 1e-9 && worst_poly <= 1e-9,
        format!("t^k vs k! relative {worst_rel:.2e}, lower degree / scale {worst_poly:.2e}, weights binomial"),
    )
}

fn random_orbit(rng: &mut ChaCha8Rng) -> Orbit {
    let c: [f64; 5] = [
        rng.gen_range(0.1..2.0),
        rng.gen_range(0.1..3.0),
        rng.gen_range(0.1..2.0),
        rng.gen_range(0.0..1.0),
        rng.gen_range(-1.0..1.0),
    ];
    Orbit::scalar(0.0, move |t| {
        C64::new(c[0] * (c[1] * t).sin() + c[4] * t, c[2] * (-c[3] * t).exp())
    })
}

fn seminorm_axioms() -> Outcome {
    let mut rng = rng(3);
    let window = TimeWindow::new(0.5, 2.5).map_err(|e| e.to_string())?;
    let res = Resolution::new(16, 3).map_err(|e| e.to_string())?;
    let mut worst_hom: f64 = 0.0;
    let mut worst_tri: f64 = 0.0;
    for _ in 0..200 {
        let (x, y) = (random_orbit(&mut rng), random_orbit(&mut rng));
        let lambda = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let sum = x.sum(&y).map_err(|e| e.to_string())?;
        let scaled = x.scaled(lambda);
        for p in SeminormProperty::ALL {
            let spec = SeminormSpec::new(p, window)
                .with_alpha(0.5)
                .with_delta_cap(0.5)
                .with_resolution(res);
            let eval = |o: &Orbit| spec.evaluate(o).map_err(|e| format!("{p:?}: {e}"));
            let (px, py, ps, pl) = (eval(&x)?, eval(&y)?, eval(&sum)?, eval(&scaled)?);
            if px.kind != pl.kind {
                return Err(format!(
                    "{p:?}: {:?} became {:?} under scaling",
                    px.kind, pl.kind
                ));
            }
            if ps.kind == VerdictKind::Diverging
                && px.kind != VerdictKind::Diverging
                && py.kind != VerdictKind::Diverging
            {
                return Err(format!("{p:?}: sum diverges while both terms are finite"));
            }
            if let (Some(a), Some(b)) = (px.value, py.value) {
                let scale = a + b + 1.0;
                if let Some(l) = pl.value {
                    worst_hom = worst_hom.max((l - lambda.norm() * a).abs() / scale);
                }
                if let Some(s) = ps.value {
                    worst_tri = worst_tri.max((s - a - b) / scale);
                }
            }
        }
    }
    ensure(
        worst_hom <= 1e-9 && worst_tri <= 1e-9,
        format!("homogeneity defect {worst_hom:.2e}, triangle excess {worst_tri:.2e} (relative to scale)"),
    )
}

fn variation_additivity() -> Outcome {
    let res = Resolution::default();
    let mut rng = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let f = random_orbit(&mut rng);
        let a = rng.gen_range(0.0..1.0);
        let c = a + rng.gen_range(0.5..3.0);
        let b = rng.gen_range(a + 0.05..c - 0.05);
        let tv = |lo, hi| -> Result<f64, String> {
            total_variation(&f, lo, hi, &res)
                .map_err(|e| e.to_string())?
                .value
                .ok_or_else(|| format!("variation on [{lo}, {hi}] not finite"))
        };
        let whole = tv(a, c)?;
        worst = worst.max((whole - tv(a, b)? - tv(b, c)?).abs() / whole);
    }
    let sin = total_variation(&sin_orbit(), 0.0, 2.0 * PI, &res).map_err(|e| e.to_string())?;
    let v = sin.value.ok_or("TV(sin) not finite")?;
    ensure(
        worst <= 1e-6 && (v - 4.0).abs() <= 1e-4,
        format!(
            "split gap {worst:.2e}, TV(sin, [0, 2π]) = {v:.9} over {} levels",
            sin.refinement_trace.len()
        ),
    )
}

fn mollifier_suite() -> Outcome {
    let start = Instant::now();
    let mut worst_mass: f64 = 0.0;
    for l in 1..=64 {
        let m = MollifierFamily::new(l, 0)
            .map_err(|e| e.to_string())?
            .mass();
        worst_mass = worst_mass.max((m - 1.0).abs());
    }
    let f = exp_orbit();
    let t = 2.0;
    // Worst ratio of the identity gap to its quadrature tolerance.
    let mut worst_ratio: f64 = 0.0;
    for l in [1, 2, 4, 8] {
        let rhs = MollifierFamily::new(l, 0)
            .map_err(|e| e.to_string())?
            .apply(&f, t)[0]
            .re;
        for k in 1..=6 {
            let fam = MollifierFamily::new(l, k).map_err(|e| e.to_string())?;
            let lhs = fam.apply(&f, t)[0].re;
            let sup = (t + 1.0 / l as f64).exp();
            let tol = 8.0 * f64::EPSILON * sup * fam.abs_mass() + 1e-10 * rhs.abs();
            worst_ratio = worst_ratio.max((lhs - rhs).abs() / tol);
        }
    }
    let window = TimeWindow::new(1.0, 2.0).map_err(|e| e.to_string())?;
    let ladder = [2, 4, 8, 16, 32, 64];
    let smooth = smoothness_probe(&f, &window, 3, &ladder).map_err(|e| e.to_string())?;
    let kink = Orbit::real(0.0, |s| (s - 1.4).abs());
    let rough = smoothness_probe(&kink, &window, 1, &ladder).map_err(|e| e.to_string())?;
    let ok = worst_mass <= 1e-10
        && worst_ratio <= 1.0
        && smooth.is_smooth_to(3)
        && !rough.is_smooth_to(1);
    within(
        Duration::from_secs(30),
        start,
        format!(
            "max |mass − 1| {worst_mass:.2e}, identity gap / tolerance {worst_ratio:.2e}, exp smooth to {:?}, |t − 1.4| smooth to {:?}",
            smooth.smooth_to, rough.smooth_to
        ),
        ok,
    )
}

fn growth_exponents() -> Outcome {
    let start = Instant::now();
    let ladder = [1e3, 1e4, 1e5, 1e6];
    let mut ok = true;
    let mut detail = Vec::new();
    for (n, t) in [(2u32, 1.0), (3, 1.0), (3, 2.0)] {
        let s = growth_scan(n, t, &ladder).map_err(|e| e.to_string())?.slope;
        ok &= (s - (n as f64 - t)).abs() <= 0.05;
        detail.push(format!("({n},{t}) {s:.4}"));
    }
    for (n, t) in [(1u32, 1.5), (2, 2.5), (3, 3.5), (1, 3.0), (2, 4.0)] {
        let s = growth_scan(n, t, &ladder).map_err(|e| e.to_string())?.slope;
        ok &= s <= 0.05;
        detail.push(format!("({n},{t}) {s:.4}"));
    }
    within(
        Duration::from_secs(60),
        start,
        format!("slopes {}", detail.join(", ")),
        ok,
    )
}

fn random_member(rng: &mut ChaCha8Rng, dom: &HolomorphyDomain, re_max: f64) -> ComplexPoint {
    loop {
        let z = cv(
            rng.gen_range(0.0..re_max),
            rng.gen_range(-0.6..0.6) * re_max * dom.r() / dom.t(),
        );
        if omega_membership(dom, z).is_some() {
            return z;
        }
    }
}

fn domain_geometry() -> Outcome {
    let dom = HolomorphyDomain::new(2.3, 0.3, 6).map_err(|e| e.to_string())?;
    let mut rng = rng(7);
    let mut sector_points = 0;
    while sector_points < 500 {
        let z = C64::new(dom.t(), 0.0)
            + C64::from_polar(
                rng.gen_range(0.0..200.0),
                rng.gen_range(-1.0..1.0) * dom.theta(),
            );
        let z = cv(z.re, z.im);
        if !sector_membership(&dom, z) {
            continue;
        }
        if omega_membership(&dom, z).is_none() {
            return Err(format!("sector point {z:?} outside the domain"));
        }
        sector_points += 1;
    }
    for _ in 0..500 {
        let (a, b) = (
            random_member(&mut rng, &dom, 40.0),
            random_member(&mut rng, &dom, 40.0),
        );
        if omega_membership(&dom, cv(a.re + b.re, a.im + b.im)).is_none() {
            return Err(format!("{a:?} + {b:?} left the domain"));
        }
        let s = rng.gen_range(0.0..100.0);
        if omega_membership(&dom, cv(a.re + s, a.im)).is_none() {
            return Err(format!("{a:?} + {s} left the domain"));
        }
    }
    let theta_gap = (dom.theta() - (0.3f64 / 2.3).asin()).abs();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (x, y) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    domain_svg(&dom, &x).map_err(|e| e.to_string())?;
    domain_svg(&dom, &y).map_err(|e| e.to_string())?;
    let same = std::fs::read(&x).map_err(|e| e.to_string())?
        == std::fs::read(&y).map_err(|e| e.to_string())?;
    ensure(
        theta_gap <= 1e-12 && same,
        format!("500 sector points, 500 sums and translates inside; θ gap {theta_gap:.1e}; svg identical: {same}"),
    )
}

fn extension_correctness() -> Outcome {
    let dom = HolomorphyDomain::new(1.0, 0.5, 6).map_err(|e| e.to_string())?;
    let mut rng = rng(8);
    let specs = [
        ExampleSpec::DiagonalAnalytic {
            lambdas: vec![cv(-1.0, 0.0), cv(-2.0, 3.0)],
        },
        ExampleSpec::JordanNilpotentExp {
            dim: 4,
            lambda: None,
        },
    ];
    let mut worst_ratio: f64 = 0.0;
    let mut worst_defect: f64 = 0.0;
    for spec in &specs {
        let f = make_example(spec).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let z = random_member(&mut rng, &dom, 6.0);
            let e = extend_eval(&f, &dom, z, 40).map_err(|e| e.to_string())?;
            let exact = spec
                .closed_form(C64::from(z))
                .map_err(|e| e.to_string())?
                .ok_or("no closed form")?;
            worst_ratio = worst_ratio.max(e.value.max_entry_diff(&exact) / e.error_bound());
        }
        for l in 0..=6 {
            for k in 0..=(6 - l) {
                let scale = f.derivative(l + k, 2.0).ok_or("no oracle")?.norm().max(1.0);
                let d =
                    derivative_composition_defect(&f, l, k, 1.0, 1.0).map_err(|e| e.to_string())?;
                worst_defect = worst_defect.max(d / scale);
            }
        }
    }
    ensure(
        worst_ratio <= 1.0 && worst_defect <= 1e-10,
        format!("error / reported bound {worst_ratio:.2e}, composition defect / scale {worst_defect:.2e}"),
    )
}

fn thresholds() -> Outcome {
    let spec = ExampleSpec::NilpotentShift { delta: 1.0 / 64.0 };
    let f = make_example(&spec).map_err(|e| e.to_string())?;
    let opts = ClassifyOptions {
        probes: 8,
        ..ClassifyOptions::default()
    };
    let report = uniform_threshold(&f, &Property::Zero, &default_scan(), &opts)
        .map_err(|e| e.to_string())?;
    let n = f.dim();
    let vectors = probe_vectors(n, opts.probes, opts.seed);
    // Support arithmetic: the orbit of x vanishes once the lowest nonzero coordinate has shifted out.
    let mut mismatches = Vec::new();
    for ((id, x), o) in vectors.iter().zip(&report.per_orbit) {
        let lowest = x.iter().position(|z| *z != C64::new(0.0, 0.0)).unwrap_or(n);
        let expected = (n - lowest) as f64 / 64.0;
        if o.orbit_id != *id || o.threshold != Some(expected) {
            mismatches.push(format!("{id}: {:?} vs {expected}", o.threshold));
        }
    }
    let u = report.uniform_threshold.unwrap_or(f64::INFINITY);
    let poly = make_example(&ExampleSpec::MatrixPoly).map_err(|e| e.to_string())?;
    let d = semigroup_defect(&poly, &[1.0]).map_err(|e| e.to_string())?;
    let gap = Operator::Dense(DMatrix::from_row_slice(
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
        (u - 1.0).abs() <= 1.0 / 64.0 && mismatches.is_empty() && (d - gap).abs() <= 1e-12,
        format!(
            "uniform {u}, {} orbits, mismatches {mismatches:?}; MatrixPoly defect {d:.15} vs {gap:.15}",
            report.per_orbit.len()
        ),
    )
}

fn analyticity_detector() -> Outcome {
    let g = Orbit::real(0.0, |t| 1.0 / (1.5 - t))
        .with_real_oracle(|k, t| (ln_factorial(k) - (k as f64 + 1.0) * (1.5 - t).ln()).exp());
    let radius = analyticity_radius(&g, 0.5, &default_ladder(), 24)
        .map_err(|e| e.to_string())?
        .radius;
    let p =
        analyticity_seminorm(&g, 0.5, 0.5, 24, &default_resolution()).map_err(|e| e.to_string())?;
    let far =
        analyticity_seminorm(&g, 0.5, 0.9, 24, &default_resolution()).map_err(|e| e.to_string())?;
    ensure(
        radius == Some(0.5)
            && p.value.is_some_and(|v| (v - 2.0).abs() <= 1e-3)
            && far.is_diverging(),
        format!(
            "radius {radius:?}, p(0.5, 0.5) = {:?}, r = 0.9 {:?}",
            p.value, far.kind
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("difference-quotient triple equivalence", triple_equivalence),
        ("stencil identities", stencil_identities),
        ("seminorm axioms", seminorm_axioms),
        ("variation additivity", variation_additivity),
        ("mollifier suite", mollifier_suite),
        ("growth exponents", growth_exponents),
        ("domain geometry", domain_geometry),
        ("extension correctness", extension_correctness),
        ("thresholds", thresholds),
        ("analyticity detector", analyticity_detector),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (status, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{status} criterion {}: {name}: {detail}", i + 1);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
