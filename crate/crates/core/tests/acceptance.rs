//! Acceptance gate: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xv_pjt::analysis::{apes_scan, delta_splitting, spectrum_report};
use xv_pjt::cli::ScanRange;
use xv_pjt::eigensolver::{
    converge_cutoff, solve, solve_params, Method, SolveRequest, DEGENERACY_TOLERANCE,
};
use xv_pjt::hamiltonian::{
    assemble_with_cutoff, classical_apes, couplings_from_ejt, ejt_from_couplings,
    symmetry_transform, CouplingOrder,
};
use xv_pjt::presets::Defect;
use xv_pjt::PjtParams;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn delta_reproduction() -> Check {
    let mut notes = Vec::new();
    for d in Defect::ALL {
        let want = d.reference_delta();
        let got = delta_splitting(&d.params(), 15).map_err(|e| format!("{d}: {e}"))?;
        ensure(
            (got - want).abs() <= 0.1 * want,
            format!("{d}: delta {got:.3} meV outside {want} ± 10%"),
        )?;
        notes.push(format!("{d} {got:.2}/{want}"));
    }
    Ok(notes.join(", "))
}

fn level_ordering() -> Check {
    let mut notes = Vec::new();
    for d in Defect::ALL {
        let r = spectrum_report(&d.params(), 15, 3).map_err(|e| format!("{d}: {e}"))?;
        let e: Vec<f64> = r.states.iter().map(|s| s.energy).collect();
        let w = r.states[0].character.a2u;
        ensure(
            e[1] - e[0] > DEGENERACY_TOLERANCE,
            format!("{d}: ground level is degenerate"),
        )?;
        ensure(w > 0.45, format!("{d}: ground w_A2u = {w:.4}"))?;
        ensure(
            (e[2] - e[1]).abs() <= DEGENERACY_TOLERANCE,
            format!("{d}: states 1-2 split by {:.2e} meV", e[2] - e[1]),
        )?;
        notes.push(format!(
            "{d} w_A2u={w:.3} |E2-E1|={:.1e}",
            (e[2] - e[1]).abs()
        ));
    }
    Ok(notes.join(", "))
}

fn character_mixing() -> Check {
    let r = spectrum_report(&Defect::SiV.params(), 15, 1).map_err(|e| e.to_string())?;
    let c = r.states[0].character;
    ensure(
        (0.45..=0.60).contains(&c.a2u) && (0.40..=0.55).contains(&c.eu()),
        format!("SiV ground w_A2u={:.4} w_Eu={:.4}", c.a2u, c.eu()),
    )?;
    Ok(format!("SiV ground w_A2u={:.4} w_Eu={:.4}", c.a2u, c.eu()))
}

fn jahn_teller_consistency() -> Check {
    let e = ejt_from_couplings(&Defect::SiV.params());
    ensure(
        (e.e_jt1 - 258.0).abs() <= 1.0,
        format!("E_JT1 = {:.3}", e.e_jt1),
    )?;
    let (f_g, f_u) = couplings_from_ejt(258.0, 0.47, 75.9, CouplingOrder::UDominant)
        .map_err(|e| e.to_string())?;
    ensure(
        (f_g - 95.0).abs() <= 2.5 && (f_u - 103.0).abs() <= 2.5,
        format!("F_g={f_g:.3} F_u={f_u:.3}"),
    )?;
    Ok(format!("E_JT1={:.2} F_g={f_g:.2} F_u={f_u:.2}", e.e_jt1))
}

fn apes_anchor_points() -> Check {
    let grid = ScanRange::default().grid();
    let mut notes = Vec::new();
    for d in Defect::ALL {
        let p = d.params();
        let origin = classical_apes(&p, 0.0, 0.0)
            .map_err(|e| e.to_string())?
            .energies;
        let want = [-p.lambda_corr, -p.xi_corr, -p.xi_corr, p.lambda_corr];
        ensure(
            origin == want,
            format!("{d}: origin {origin:?} != {want:?}"),
        )?;
        let min = apes_scan(&p, &grid, 0.0)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|s| s.point.energies[0])
            .fold(f64::INFINITY, f64::min);
        let e_jt1 = ejt_from_couplings(&p).e_jt1;
        ensure(
            min <= -e_jt1,
            format!("{d}: sheet minimum {min:.2} > -E_JT1 {:.2}", -e_jt1),
        )?;
        notes.push(format!("{d} min={min:.1}"));
    }
    Ok(notes.join(", "))
}

fn quench_inequality() -> Check {
    let mut notes = Vec::new();
    for d in Defect::ALL {
        let p = d.params();
        let delta = delta_splitting(&p, 15).map_err(|e| e.to_string())?;
        let gap = p.lambda_corr - p.xi_corr;
        ensure(delta < gap, format!("{d}: delta {delta:.3} >= {gap:.3}"))?;
        notes.push(format!("{d} {delta:.2}<{gap:.1}"));
    }
    Ok(notes.join(", "))
}

fn hermiticity() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..100 {
        let p = PjtParams::new(
            rng.random_range(1.0..150.0),
            rng.random_range(0.0..150.0),
            rng.random_range(0.0..150.0),
            rng.random_range(0.0..150.0),
            rng.random_range(0.0..150.0),
        )
        .unwrap();
        let h = assemble_with_cutoff(&p, 15).map_err(|e| e.to_string())?;
        ensure(
            h.matrix().is_symmetric(),
            format!("set {i} {p:?} not symmetric"),
        )?;
    }
    Ok(())
}

fn monotonicity() -> Result<(), String> {
    for d in Defect::ALL {
        let table = converge_cutoff(
            &d.params(),
            &SolveRequest::new(1),
            &[5, 10, 15, 20, 25],
            1e-3,
        )
        .map_err(|e| e.to_string())?;
        for row in &table.rows {
            row.energies
                .as_ref()
                .map_err(|e| format!("{d} cutoff {}: {e}", row.cutoff))?;
        }
        ensure(
            table.is_monotone(),
            format!("{d}: E0 increases with cutoff"),
        )?;
    }
    Ok(())
}

fn dense_vs_lanczos() -> Result<(), String> {
    let h = assemble_with_cutoff(&Defect::SiV.params(), 15).map_err(|e| e.to_string())?;
    let dense =
        solve(&h, &SolveRequest::new(10).with_method(Method::Dense)).map_err(|e| e.to_string())?;
    let lanczos = solve(&h, &SolveRequest::new(10).with_method(Method::Iterative))
        .map_err(|e| e.to_string())?;
    let worst = dense
        .energies
        .iter()
        .zip(&lanczos.energies)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(
        worst <= 1e-8,
        format!("dense vs Lanczos differ by {worst:.2e} meV"),
    )
}

fn decoupled_limit() -> Result<(), String> {
    let siv = Defect::SiV.params();
    let p = siv.without_coupling();
    let cutoff = 6u32;
    let mut expected: Vec<(f64, usize)> = Vec::new();
    for k in 0..=cutoff {
        let shell = p.hbar_omega * (k + 1) as f64;
        for (w, mult) in [(-p.lambda_corr, 1), (-p.xi_corr, 2), (p.lambda_corr, 1)] {
            expected.push((shell + w, mult * (k as usize + 1)));
        }
    }
    expected.sort_by(|a, b| a.0.total_cmp(&b.0));
    let dim = 4 * (cutoff as usize + 1) * (cutoff as usize + 2) / 2;
    let r = solve_params(
        &p,
        cutoff,
        &SolveRequest::new(dim).with_method(Method::Dense),
    )
    .map_err(|e| e.to_string())?;
    let levels = r.multiplets(DEGENERACY_TOLERANCE);
    ensure(
        levels.len() == expected.len(),
        format!("{} levels, expected {}", levels.len(), expected.len()),
    )?;
    for (level, (energy, mult)) in levels.iter().zip(&expected) {
        let e = r.energies[level.start];
        ensure(
            level.len() == *mult && (e - energy).abs() < 1e-9,
            format!("level at {e:.6} x{} vs {energy:.6} x{mult}", level.len()),
        )?;
    }
    Ok(())
}

fn uncorrelated_a2u_overlap() -> Result<(), String> {
    let p = Defect::SiV.params().without_correlation();
    let u = symmetry_transform();
    for rho in [0.5, 1.7, 3.0] {
        for k in 0..8 {
            let phi = k as f64 * std::f64::consts::TAU / 8.0 + 0.2;
            let apes =
                classical_apes(&p, rho * phi.cos(), rho * phi.sin()).map_err(|e| e.to_string())?;
            let a2u = (u * apes.vectors.column(0))[0];
            ensure(
                (a2u * a2u - 0.5).abs() < 1e-12,
                format!("rho={rho} phi={phi:.3}: overlap² {:.6}", a2u * a2u),
            )?;
        }
    }
    Ok(())
}

fn property_suite() -> Check {
    hermiticity().map_err(|e| format!("hermiticity: {e}"))?;
    monotonicity().map_err(|e| format!("monotonicity: {e}"))?;
    dense_vs_lanczos().map_err(|e| format!("dense/Lanczos: {e}"))?;
    decoupled_limit().map_err(|e| format!("decoupled limit: {e}"))?;
    uncorrelated_a2u_overlap().map_err(|e| format!("W=0 overlap: {e}"))?;
    Ok("hermiticity x100, E0 monotone over 5..25, dense=Lanczos k=10, decoupled multiplicities, W=0 overlap² = 1/2 at 24 points".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 delta reproduction", delta_reproduction),
        ("2 level ordering", level_ordering),
        ("3 character mixing", character_mixing),
        ("4 Jahn-Teller energy consistency", jahn_teller_consistency),
        ("5 classical APES anchor points", apes_anchor_points),
        ("6 quench inequality", quench_inequality),
        ("7 property suite", property_suite),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1} s): {detail}");
            }
        }
    }
    println!("SKIP criterion 8 ZPL energies and stress/temperature response: out of scope");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
