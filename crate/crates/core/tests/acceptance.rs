//! End-to-end acceptance run. Prints one `PASS`/`FAIL` line per criterion
//! with the measured quantity, then fails if any criterion failed.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex;
use suita_core::bergman::{annulus_suita_gap, kernel_j, laplacian_identity_check};
use suita_core::green::{boundary_flux, critical_points, green_eval, robin_capacity};
use suita_core::oracles::{mc_area, robin_extrapolate, wos_green};
use suita_core::sublevel::{
    convexity_report, monotonicity_check, monotonicity_check_with, profile_scan_with, Sublevels, Verdict,
};
use suita_core::verify::{
    blb_check, default_samples, run_suite, thm1_check, thm2_check, thm2_constant, thm4_scan, Sample, Status, Suite,
    SuiteConfig, Tolerances,
};
use suita_core::weights::{identity_residual, war_probe};
use suita_core::{DomainSpec, Point64};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Point64 {
    Complex::new(re, im)
}

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn annulus_samples() -> Vec<Sample> {
    default_samples().into_iter().filter(|s| matches!(s.domain, DomainSpec::Annulus { .. })).collect()
}

fn chart_samples() -> Vec<Sample> {
    default_samples().into_iter().filter(|s| s.domain.chart().is_some()).collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn criterion_1() -> Outcome {
    let d = DomainSpec::unit_disc();
    let mut worst = 0.0f64;
    for j in 0..=6 {
        let exact = factorial(j) * factorial(j + 1);
        let v = PI * kernel_j(&d, c(0.0, 0.0), j).map_err(|e| e.to_string())?.value;
        worst = worst.max((v - exact).abs() / exact);
    }
    ensure(worst <= 1e-8, format!("max relative error {worst:.3e} over j=0..6 (tol 1e-8)"))
}

fn criterion_2() -> Outcome {
    let mut min_gap = f64::INFINITY;
    let mut min_f64 = f64::INFINITY;
    for s in annulus_samples() {
        let DomainSpec::Annulus { q } = s.domain else { unreachable!() };
        let r = s.pole.norm();
        let gap = annulus_suita_gap(q, r, 256).map_err(|e| e.to_string())?;
        let k = kernel_j(&s.domain, s.pole, 0).map_err(|e| e.to_string())?.value;
        let cap = robin_capacity(&s.domain, s.pole).map_err(|e| e.to_string())?.capacity;
        let f64_gap = PI * k / (cap * cap) - 1.0;
        if (f64_gap - gap).abs() > 1e-13 {
            return Err(format!("q={q} r={r}: f64 gap {f64_gap:e} disagrees with extended {gap:e}"));
        }
        min_gap = min_gap.min(gap);
        min_f64 = min_f64.min(f64_gap);
    }
    ensure(
        min_gap > 0.0,
        format!("9 samples, min πK/c² − 1 = {min_gap:.4e} (256-bit), f64 values agree within 1e-13 (f64 min {min_f64:.3e})"),
    )
}

fn criterion_3() -> Outcome {
    let tol = Tolerances::default();
    let mut count = 0;
    for s in chart_samples() {
        let delta = s.domain.boundary_distance(s.pole).map_err(|e| e.to_string())?.delta;
        let radii: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64 * delta).collect();
        for check in thm1_check(&s.domain, s.pole, &radii, &tol).map_err(|e| e.to_string())? {
            if !check.pass() {
                return Err(format!("{check:?}"));
            }
            count += 1;
        }
    }
    let d = DomainSpec::unit_disc();
    let radii: Vec<f64> = (1..=99).map(|k| 0.01 * k as f64).collect();
    let k = kernel_j(&d, c(0.0, 0.0), 0).map_err(|e| e.to_string())?.value;
    let best = thm1_check(&d, c(0.0, 0.0), &radii, &tol)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|ch| ch.rhs / k)
        .fold(f64::INFINITY, f64::min);
    ensure(best <= 3.0, format!("{count} radius checks hold; centred disc sharpest bound/K = {best:.6} (e = {:.6})", std::f64::consts::E))
}

fn criterion_4() -> Outcome {
    let tol = Tolerances::default();
    let constant = (11.0 + 5.0 * 5f64.sqrt()) / (4.0 * PI);
    if (constant - thm2_constant()).abs() > 1e-15 {
        return Err(format!("constant {} vs {constant}", thm2_constant()));
    }
    let (mut pass, mut skipped) = (0, Vec::new());
    for s in chart_samples() {
        let check = thm2_check(&s.domain, s.pole, &tol).map_err(|e| e.to_string())?;
        match check.status {
            Status::Pass => pass += 1,
            Status::Skipped => skipped.push(format!("{}@{}", check.context.domain, check.context.pole)),
            Status::Fail => return Err(format!("{check:?}")),
        }
    }
    ensure(
        skipped == ["disc:0,0,1@0,0"],
        format!("C = {constant:.6}; {pass} pass, skipped as degenerate: {skipped:?}"),
    )
}

fn criterion_5() -> Outcome {
    let d = DomainSpec::unit_disc();
    let p = profile_scan_with(&d, c(0.0, 0.0), -3.0, -0.1, 30, 1024).map_err(|e| e.to_string())?;
    let k = 1.0 / PI;
    let mut worst = 0.0f64;
    for v in &p.e2t_lambda {
        worst = worst.max((v - PI).abs()).max((1.0 / v - k).abs());
    }
    if worst > 1e-6 {
        return Err(format!("centred disc deviation {worst:e}"));
    }
    let tol = Tolerances::default();
    let mut checks = 0;
    let mut max_decrease = f64::NEG_INFINITY;
    for s in annulus_samples() {
        let p = Sublevels::new(&s.domain, s.pole, 1024)
            .and_then(|sl| sl.profile(-3.0, -0.1, 12))
            .map_err(|e| e.to_string())?;
        for check in blb_check(&s.domain, s.pole, &p, &tol).map_err(|e| e.to_string())? {
            if !check.pass() {
                return Err(format!("{check:?}"));
            }
            checks += 1;
        }
        let m = monotonicity_check_with(&p, 1e-4);
        if !m.pass {
            return Err(format!("{m:?}"));
        }
        max_decrease = max_decrease.max(m.max_decrease);
    }
    ensure(
        true,
        format!("disc deviation {worst:.2e}; {checks} annulus checks hold, largest forward decrease of e^(-2t)λ {max_decrease:.2e} (tol 1e-4)"),
    )
}

fn criterion_6() -> Outcome {
    let tol = Tolerances::default();
    let mut lines = Vec::new();
    for (q, r) in [(0.5, 0.7), (0.8, 0.9)] {
        let d = DomainSpec::annulus(q).unwrap();
        let w = c(r, 0.0);
        let cp = critical_points(&d, w).map_err(|e| e.to_string())?[0];
        if cp.gradient_residual > 1e-9 {
            return Err(format!("q={q}: residual {:e}", cp.gradient_residual));
        }
        let (report, _) = thm4_scan(&d, w, 1024, &tol).map_err(|e| e.to_string())?;
        if report.verdict != Verdict::NonConvexDetected {
            return Err(format!("q={q}: {report:?}"));
        }
        lines.push(format!(
            "q={q}: t0={:.4e}, min Δ² log λ {:.3e} vs noise {:.3e}",
            cp.level, report.min_second_diff, report.noise_floor
        ));
    }
    Ok(format!("NonConvexDetected at both; {}", lines.join("; ")))
}

fn criterion_7() -> Outcome {
    let d = DomainSpec::annulus(0.5).unwrap();
    let w = c(0.7, 0.0);
    let p = profile_scan_with(&d, w, -6.0, -2.0, 41, 1024).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (k, r) in p.reconstructed_lambda().iter().enumerate() {
        let r = r.ok_or("missing γ′ on a regular window")?;
        worst = worst.max((r - p.lambda[k]).abs() / p.lambda[k]);
    }
    if worst > 1e-2 {
        return Err(format!("reconstruction error {worst:e}"));
    }
    let s = Sublevels::new(&d, w, 1024).map_err(|e| e.to_string())?;
    let t0 = s.critical_points()[0].level;
    let gammas: Vec<f64> =
        [1e-1, 1e-2, 1e-3].iter().map(|o| s.coarea(t0 - o)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    ensure(
        gammas.windows(2).all(|g| g[1] > g[0]),
        format!("λ reconstructed within {worst:.2e}; γ′(t0 − 1e-1, 1e-2, 1e-3) = {gammas:.6?}, growth ×{:.1}", gammas[2] / gammas[0]),
    )
}

/// `eps/h²` at `h = 5e−4`, times a safety factor of ten.
const ROUNDING_FLOOR: f64 = 1e-8;

fn criterion_8() -> Outcome {
    let cases = [
        (DomainSpec::unit_disc(), c(0.0, 0.0)),
        (DomainSpec::unit_disc(), c(0.5, 0.0)),
        (DomainSpec::annulus(0.5).unwrap(), c(0.7, 0.0)),
        (DomainSpec::annulus(0.3).unwrap(), c(-0.3, 0.5)),
    ];
    let mut worst = 0.0f64;
    let mut orders = Vec::new();
    let mut exact = 0;
    for (d, w) in &cases {
        for j in 0..=1 {
            let coarse = laplacian_identity_check(d, *w, j, 1e-3).map_err(|e| e.to_string())?;
            let fine = laplacian_identity_check(d, *w, j, 5e-4).map_err(|e| e.to_string())?;
            worst = worst.max(coarse.rel_error).max(fine.rel_error);
            // below eps/h² the stencil has no truncation error left to observe
            if coarse.rel_error < ROUNDING_FLOOR && fine.rel_error < ROUNDING_FLOOR {
                exact += 1;
                continue;
            }
            let order = (coarse.rel_error / fine.rel_error).log2();
            if !(1.7..=2.3).contains(&order) {
                return Err(format!("{d} j={j}: errors {:e} → {:e}", coarse.rel_error, fine.rel_error));
            }
            orders.push(order);
        }
    }
    let lo = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = orders.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ensure(
        worst <= 1e-3 && !orders.is_empty(),
        format!("max relative error {worst:.2e}; observed order {lo:.3}..{hi:.3} on {} cases, {exact} exact to rounding", orders.len()),
    )
}

fn criterion_9() -> Outcome {
    let n = 10_000;
    let mut worst = 0.0f64;
    for k in 0..n {
        // log-spaced so both ends of [−40, −1e−3] are covered
        let s = -(1e-3f64.ln() + (40f64 / 1e-3).ln() * k as f64 / (n - 1) as f64).exp();
        worst = worst.max(identity_residual(s).map_err(|e| e.to_string())?);
    }
    if worst > 1e-9 {
        return Err(format!("residual {worst:e}"));
    }
    let s = [-1.0f64, -5.0, -10.0, -20.0, -40.0];
    let v: Vec<f64> = war_probe(&s).map_err(|e| e.to_string())?;
    let decreasing = v.windows(2).all(|p| p[1].abs() < p[0].abs());
    ensure(decreasing && v[2].abs() < 1e-3, format!("max residual {worst:.2e}; probe {v:?}"))
}

fn criterion_10() -> Outcome {
    let d = DomainSpec::annulus(0.5).unwrap();
    let w = c(0.7, 0.0);
    let mut worst_sigma = 0.0f64;
    for (k, z) in [c(-0.7, 0.1), c(0.0, 0.75), c(0.6, 0.3), c(0.55, -0.2), c(-0.3, -0.8)].into_iter().enumerate() {
        let exact = green_eval(&d, w, z).map_err(|e| e.to_string())?.value;
        let e = wos_green(&d, w, z, 1_000_000, 100 + k as u64).map_err(|e| e.to_string())?;
        worst_sigma = worst_sigma.max((exact - e.mean).abs() / e.std_error);
    }
    if worst_sigma > 3.0 {
        return Err(format!("walk-on-spheres off by {worst_sigma:.2}σ"));
    }
    let s = Sublevels::new(&d, w, 1024).map_err(|e| e.to_string())?;
    let mut worst_area = 0.0f64;
    for (k, t) in [-3.0, -1.5, -0.8, -0.3, -0.05].into_iter().enumerate() {
        let a = s.area(t).map_err(|e| e.to_string())?;
        let e = mc_area(&d, w, t, 1_000_000, 200 + k as u64).map_err(|e| e.to_string())?;
        worst_area = worst_area.max((a.area - e.mean).abs() / e.std_error);
    }
    if worst_area > 3.0 {
        return Err(format!("area off by {worst_area:.2}σ"));
    }
    let mut worst_robin = 0.0f64;
    for s in chart_samples() {
        let delta = s.domain.boundary_distance(s.pole).map_err(|e| e.to_string())?.delta;
        let r0 = (0.1f64).min(0.5 * delta);
        let radii: Vec<f64> = (0..5).map(|k| r0 / 2f64.powi(k)).collect();
        let exact = robin_capacity(&s.domain, s.pole).map_err(|e| e.to_string())?.capacity;
        let ext = robin_extrapolate(&s.domain, s.pole, &radii).map_err(|e| e.to_string())?;
        worst_robin = worst_robin.max((exact - ext).abs());
    }
    ensure(
        worst_robin <= 1e-6,
        format!("WoS within {worst_sigma:.2}σ, MC area within {worst_area:.2}σ, Robin within {worst_robin:.2e}"),
    )
}

fn criterion_11() -> Outcome {
    let mut worst = 0.0f64;
    for s in default_samples().into_iter().filter(|s| matches!(s.domain, DomainSpec::Disc { .. } | DomainSpec::Annulus { .. })) {
        let f = boundary_flux(&s.domain, s.pole, 1024).map_err(|e| e.to_string())?;
        worst = worst.max((f - 2.0 * PI).abs());
    }
    ensure(worst <= 1e-4, format!("max |flux − 2π| = {worst:.2e} (tol 1e-4)"))
}

fn quick_config() -> SuiteConfig {
    SuiteConfig {
        suites: vec![Suite::Suita, Suite::Thm1, Suite::Thm2, Suite::Poisson, Suite::Flux, Suite::Oracle],
        grid: 128,
        walks: 5000,
        mc_samples: 20_000,
        ..SuiteConfig::default()
    }
}

fn criterion_12() -> Outcome {
    let d = DomainSpec::unit_disc();
    let p = profile_scan_with(&d, c(0.0, 0.0), -3.0, -0.5, 10, 128).map_err(|e| e.to_string())?;
    let bad = monotonicity_check(&p.perturbed(6, 1.05));
    if bad.pass || !monotonicity_check(&p).pass {
        return Err(format!("corrupted profile not flagged: {bad:?}"));
    }
    let convex = convexity_report(&p.perturbed(5, 1.05), 0.0).map_err(|e| e.to_string())?;
    if convex.verdict != Verdict::NonConvexDetected {
        return Err(format!("corrupted profile reads convex: {convex:?}"));
    }
    let report = run_suite(&quick_config()).map_err(|e| e.to_string())?;
    let families: std::collections::BTreeSet<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    if !report.all_pass() || report.checks.len() < 60 || families.len() < 7 {
        return Err(format!("baseline run: {} checks, families {families:?}", report.checks.len()));
    }
    let mut cfg = quick_config();
    cfg.tolerances.set("all", 0.0).map_err(|e| e.to_string())?;
    let zero = run_suite(&cfg).map_err(|e| e.to_string())?;
    let failed: std::collections::BTreeSet<&str> = zero.failures().map(|c| c.name.as_str()).collect();
    ensure(
        zero.count(Status::Fail) > 0,
        format!(
            "perturbed profile flagged; baseline {} checks over {} families pass; zero tolerance fails {} checks in {failed:?}",
            report.checks.len(),
            families.len(),
            zero.count(Status::Fail)
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("1 equality on the centred disc", criterion_1),
        ("2 strict inequality on annuli", criterion_2),
        ("3 disc-maximum kernel bound", criterion_3),
        ("4 boundary-distance kernel bound", criterion_4),
        ("5 sublevel lower bound and monotonicity", criterion_5),
        ("6 non-convexity near the saddle", criterion_6),
        ("7 co-area consistency", criterion_7),
        ("8 Laplacian identity", criterion_8),
        ("9 weight identity and probe", criterion_9),
        ("10 oracle agreement", criterion_10),
        ("11 flux identity", criterion_11),
        ("12 negative controls", criterion_12),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                println!("FAIL criterion {name}: {msg} [{secs:.1}s]");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
