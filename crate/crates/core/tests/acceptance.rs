//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Criterion 6 asks for strictly positive classical margins on dilated
//! Gaussians, but every normalized dilated Gaussian is an extremal of that
//! inequality (both sides shift by (N/2) log λ), so its margin is zero. The
//! line prints FAIL with the measured margins; the test asserts the analytic
//! truth (margin 0 within the same 1e-6) instead.

use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use biharmonic_core::energy::reduced_energy;
use biharmonic_core::logsobolev::{
    biharmonic_lsi_check, classical_lsi_check, constant_from_energy, interpolation_check,
};
use biharmonic_core::solver::minimize;
use biharmonic_core::testfields::{
    dilated_gaussian, normalized, random_fields, random_positive_members, unit_gaussian,
    DEFAULT_SEED,
};
use biharmonic_core::{GroundStateResult, Nonlinearity, RadialGrid, SolverConfig};
use rayon::prelude::*;

mod common;
use common::gradient_errors;

struct Verdict {
    id: usize,
    pass: bool,
    detail: String,
}

fn verdict(id: usize, pass: bool, detail: String) -> Verdict {
    Verdict { id, pass, detail }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Log,
    PowerMass,
}

fn model(kind: Kind, n: usize) -> Nonlinearity {
    match kind {
        Kind::Log => Nonlinearity::logarithmic(n).unwrap(),
        // p = 4 is critical at N = 8
        Kind::PowerMass => {
            Nonlinearity::power_mass(n, if n == 8 { 3.0 } else { 4.0 }, 1.0).unwrap()
        }
    }
}

struct Solve {
    n: usize,
    kind: Kind,
    radius: f64,
    result: GroundStateResult,
    seconds: f64,
}

fn solve_all() -> Vec<Solve> {
    let mut cases = Vec::new();
    for n in [5, 6, 8] {
        for kind in [Kind::Log, Kind::PowerMass] {
            cases.push((n, kind, 20.0, 2001));
        }
    }
    cases.push((5, Kind::Log, 30.0, 3001));
    cases.push((5, Kind::PowerMass, 30.0, 3001));
    cases
        .par_iter()
        .map(|&(n, kind, radius, nodes)| {
            let grid = Arc::new(RadialGrid::new(n, radius, nodes).unwrap());
            let t = Instant::now();
            let result = minimize(&model(kind, n), &grid, &SolverConfig::default()).unwrap();
            Solve {
                n,
                kind,
                radius,
                result,
                seconds: t.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

fn find(solves: &[Solve], n: usize, kind: Kind, radius: f64) -> &GroundStateResult {
    &solves
        .iter()
        .find(|s| s.n == n && s.kind == kind && s.radius == radius)
        .unwrap()
        .result
}

fn label(kind: Kind) -> &'static str {
    match kind {
        Kind::Log => "log",
        Kind::PowerMass => "power_mass",
    }
}

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let g = RadialGrid::with_defaults(5).unwrap();
    let v = g.integrate_fn(|r| (-r * r).exp());
    let secs = t.elapsed().as_secs_f64();
    let exact = PI.powf(2.5);
    let rel = (v - exact).abs() / exact;
    verdict(
        1,
        rel <= 1e-8 && secs < 0.1,
        format!("∫e^(−|x|²) = {v:.10} vs π^(5/2), rel {rel:.1e}, {secs:.4} s"),
    )
}

fn criterion_2() -> Verdict {
    let g = Arc::new(RadialGrid::with_defaults(5).unwrap());
    let n = unit_gaussian(&g).norms();
    let ok = (n.l2_sq - 1.0).abs() <= 1e-8
        && (n.grad_sq - 2.5).abs() <= 1e-6
        && (n.bilap_sq - 8.75).abs() / 8.75 <= 1e-4;
    verdict(
        2,
        ok,
        format!(
            "‖u‖² = {:.12}, ‖∇u‖² = {:.10}, ‖Δu‖² = {:.8}",
            n.l2_sq, n.grad_sq, n.bilap_sq
        ),
    )
}

fn criterion_3() -> Verdict {
    let errors = gradient_errors(100);
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    verdict(
        3,
        errors.len() == 100 && worst <= 1e-6,
        format!("100 (u, v, ε) triples, worst relative error {worst:.2e}"),
    )
}

fn criterion_4(solves: &[Solve]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for s in solves.iter().filter(|s| s.radius == 20.0) {
        let r = s.result.pohozaev_relative_residual;
        ok &= r <= 1e-4 && s.seconds <= 60.0;
        parts.push(format!(
            "N={} {} {:.1e} ({:.1} s)",
            s.n,
            label(s.kind),
            r,
            s.seconds
        ));
    }
    verdict(4, ok, parts.join(", "))
}

fn criterion_5() -> Verdict {
    // u(½·) doubles the support, which must still fit inside R
    let g = Arc::new(RadialGrid::new(5, 40.0, 4001).unwrap());
    let mut worst: f64 = 0.0;
    for kind in [Kind::Log, Kind::PowerMass] {
        let nl = model(kind, 5);
        for u in random_positive_members(&g, &nl, DEFAULT_SEED, 20).unwrap() {
            let base = reduced_energy(&u, &nl, None).unwrap().unwrap();
            for l in [0.5, 2.0] {
                let d = reduced_energy(&u.dilated(l), &nl, None).unwrap().unwrap();
                worst = worst.max((d - base).abs() / base);
            }
        }
    }
    verdict(
        5,
        worst <= 1e-6,
        format!("20 members per model, λ ∈ {{½, 2}}, worst relative change {worst:.2e}"),
    )
}

/// Returns the verdict and whether the analytically correct statement (all
/// three margins zero within 1e-6) holds.
fn criterion_6() -> (Verdict, bool) {
    let g = Arc::new(RadialGrid::with_defaults(5).unwrap());
    let m1 = classical_lsi_check(&unit_gaussian(&g), "gaussian")
        .unwrap()
        .margin;
    let dil: Vec<f64> = [0.5, 2.0]
        .iter()
        .map(|l| {
            classical_lsi_check(&dilated_gaussian(&g, *l), "dilated")
                .unwrap()
                .margin
        })
        .collect();
    // "strictly positive" must exceed the 1e-6 that counts as zero above
    let pass = m1.abs() <= 1e-6 && dil.iter().all(|m| *m > 1e-6);
    let truth = m1.abs() <= 1e-6 && dil.iter().all(|m| m.abs() <= 1e-6);
    let v = verdict(
        6,
        pass,
        format!(
            "Gaussian margin {m1:.1e}; dilated λ=½: {:.1e}, λ=2: {:.1e} — dilated Gaussians are \
             extremals (both sides shift by (N/2) log λ), so positive margins cannot occur",
            dil[0], dil[1]
        ),
    );
    (v, truth)
}

fn criterion_7() -> Verdict {
    let g = Arc::new(RadialGrid::with_defaults(5).unwrap());
    let gauss = interpolation_check(&unit_gaussian(&g), "gaussian").unwrap();
    let mut ok = gauss.margin > 0.0
        && (gauss.lhs - 2.958_039_9).abs() < 1e-5
        && (gauss.rhs - 2.5).abs() < 1e-6;
    let mut min_rel = f64::INFINITY;
    for u in random_fields(&g, DEFAULT_SEED, 50).unwrap() {
        let r = interpolation_check(&u, "random").unwrap();
        ok &= r.holds && r.margin > 0.0;
        min_rel = min_rel.min(r.margin / r.lhs);
    }
    verdict(
        7,
        ok,
        format!(
            "Gaussian {:.7} > {:.7}; 50 random fields strict, smallest relative gap {min_rel:.3}",
            gauss.lhs, gauss.rhs
        ),
    )
}

fn criterion_8(solves: &[Solve]) -> Verdict {
    let r = find(solves, 5, Kind::Log, 20.0);
    let ratio = r.bilap_sq / r.profile.l2_sq();
    verdict(
        8,
        (ratio - 1.25).abs() <= 0.0125,
        format!("∫|Δu₀|²/∫u₀² = {ratio:.8}"),
    )
}

fn criterion_9(solves: &[Solve]) -> Verdict {
    let r = find(solves, 5, Kind::Log, 20.0);
    let k = constant_from_energy(5, r.energy).unwrap();
    let g = r.profile.grid().clone();
    let mut fields = vec![unit_gaussian(&g)];
    for l in [0.5, 1.0, 2.0] {
        fields.push(dilated_gaussian(&g, l));
    }
    let u0 = normalized(&r.profile).unwrap();
    fields.extend(random_fields(&g, DEFAULT_SEED, 50).unwrap());
    let mut holds = 0;
    let mut min_margin = f64::INFINITY;
    for u in &fields {
        let rep = biharmonic_lsi_check(u, k.lsi_constant, "battery").unwrap();
        holds += usize::from(rep.holds);
        min_margin = min_margin.min(rep.margin);
    }
    let eq = biharmonic_lsi_check(&u0, k.lsi_constant, "ground_state").unwrap();
    let total = fields.len() + 1;
    holds += usize::from(eq.holds);
    verdict(
        9,
        k.lsi_constant < k.bound && holds == total && eq.margin.abs() <= 1e-3,
        format!(
            "lsi constant {:.6e} < {:.6e}; {holds}/{total} battery checks hold (smallest \
             margin off the ground state {min_margin:.3e}); ground-state margin {:.1e}",
            k.lsi_constant, k.bound, eq.margin
        ),
    )
}

fn criterion_10(solves: &[Solve]) -> Verdict {
    // the 1e-8 slack is relative: stage energies range from ~10³ to ~10⁶
    let mut worst_drop: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    for s in solves {
        for w in s.result.stages.windows(2) {
            worst_drop = worst_drop.max((w[0].energy - w[1].energy) / w[0].energy);
            worst_abs = worst_abs.max(w[0].energy - w[1].energy);
        }
    }
    let mut ok = worst_drop <= 1e-8;
    let mut parts = vec![format!(
        "largest stage-energy drop {worst_drop:.1e} relative ({worst_abs:.1e} absolute) over {} solves",
        solves.len()
    )];
    for kind in [Kind::Log, Kind::PowerMass] {
        let a = find(solves, 5, kind, 20.0).energy;
        let b = find(solves, 5, kind, 30.0).energy;
        let rel = (a - b).abs() / a;
        ok &= rel <= 5e-3;
        parts.push(format!("{} refinement change {rel:.1e}", label(kind)));
    }
    verdict(10, ok, parts.join("; "))
}

fn criterion_11() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(
        &cfg,
        "nonlinearity = \"power_mass\"\npower_mass.p = 4\npower_mass.mu = 1\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_biharm"))
            .args(args)
            .args([
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap()
            .status
            .code()
            .unwrap()
    };
    let solve = run(&["solve"]);
    let verify = run(&["verify"]);
    let text = fs::read_to_string(out.join("profile.csv")).unwrap_or_default();
    let mut scaled = String::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            scaled.push_str(line);
        } else {
            let (r, u) = line.split_once(',').unwrap();
            scaled.push_str(&format!("{r},{:e}", 1.1 * u.parse::<f64>().unwrap()));
        }
        scaled.push('\n');
    }
    let scaled_path = tmp.path().join("scaled.csv");
    fs::write(&scaled_path, scaled).unwrap();
    let perturbed = run(&["verify", "--profile", scaled_path.to_str().unwrap()]);
    verdict(
        11,
        solve == 0 && verify == 0 && perturbed == 5,
        format!("solve exit {solve}, verify exit {verify}, ×1.1 profile exit {perturbed}"),
    )
}

#[test]
fn acceptance() {
    let solves = solve_all();
    let (c6, c6_truth) = criterion_6();
    let verdicts = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(&solves),
        criterion_5(),
        c6,
        criterion_7(),
        criterion_8(&solves),
        criterion_9(&solves),
        criterion_10(&solves),
        criterion_11(),
    ];
    for v in &verdicts {
        println!(
            "criterion {:>2}: {} — {}",
            v.id,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    assert!(
        c6_truth,
        "classical margins of the Gaussian family must vanish"
    );
    let failed: Vec<String> = verdicts
        .iter()
        .filter(|v| !v.pass && v.id != 6)
        .map(|v| format!("{}: {}", v.id, v.detail))
        .collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
