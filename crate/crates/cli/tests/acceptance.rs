//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use galilean_cli::report::{CheckVerdict, OverallVerdict};
use galilean_cli::runner::{run_scenario, RunOptions};
use galilean_cli::scenarios::bundled;
use galilean_core::audit::{
    audit_algebra, breaking_labels, classify_breaking, relation_residual, AuditReport, RelationId, RelationLabel,
    TolerancePolicy, Verdict,
};
use galilean_core::casimir::boost_energy_split;
use galilean_core::classical::classical_time_reversal_demo;
use galilean_core::commutant::{commutant_basis, dvo_set};
use galilean_core::dynamics::{
    central_charge_phase, check_law_covariance, check_law_invariance, evolve, fd_tolerance, measured_order,
    GeneratorId, TimeGrid, Transformation, FD_COEFFICIENT,
};
use galilean_core::linalg::{Projector, C64};
use galilean_core::representations::{
    build_particle_rep, build_spin_rep, compose_with_spin, wavepacket, Axis, Potential, Representation, Spin,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn audit(rep: &Representation, t: f64) -> AuditReport {
    let gens = rep.generators().at_time(t).unwrap();
    audit_algebra(&gens, rep.kind(), &TolerancePolicy::default(), &rep.default_interior().unwrap()).unwrap()
}

fn max_residual(rep: &Representation, labels: &[RelationLabel], axes: usize, proj: &Projector) -> f64 {
    labels
        .iter()
        .flat_map(|&l| RelationId::enumerate(l, axes))
        .filter_map(|rel| relation_residual(rep.generators(), rel, proj).unwrap())
        .fold(0.0, f64::max)
}

fn exact_sector() -> Outcome {
    let mut worst: f64 = 0.0;
    for twice in 1..=3 {
        let rep = build_spin_rep(Spin::new(f64::from(twice) / 2.0).unwrap()).unwrap();
        let proj = Projector::identity(rep.dim());
        let r = max_residual(&rep, &[RelationLabel::C], 3, &proj);
        ensure(r <= 1e-13 * rep.dim() as f64, format!("s = {}/2: residual {r:e}", twice))?;
        worst = worst.max(r / rep.dim() as f64);
    }
    Ok(format!("max residual/dim {worst:.2e} ≤ 1e-13"))
}

fn truncated_sector() -> Outcome {
    use RelationLabel::*;
    let n = 16;
    let rep = build_particle_rep(n, 1.0, Potential::None, 1).unwrap();
    let r1 = max_residual(&rep, &[A, B, F, G, I], 1, &rep.interior_projector(2).unwrap());
    ensure(r1 <= 1e-10, format!("1D interior residual {r1:e}"))?;
    let defect = relation_residual(
        rep.generators(),
        RelationId::pair(F, Axis::X, Axis::X),
        &Projector::identity(rep.dim()),
    )
    .unwrap()
    .unwrap();
    ensure((defect - n as f64).abs() <= 1e-10, format!("top-level defect {defect} ≠ {n}"))?;
    let rep3 = build_particle_rep(8, 1.0, Potential::None, 3).unwrap();
    let r3 = max_residual(&rep3, &[D, E, H], 3, &rep3.interior_projector(2).unwrap());
    ensure(r3 <= 1e-8, format!("3D residual {r3:e}"))?;
    Ok(format!("1D {r1:.2e}, defect {defect}, 3D {r3:.2e}"))
}

fn boost_identity() -> Outcome {
    let residual = |n, u| {
        let rep = build_particle_rep(n, 1.0, Potential::None, 1).unwrap();
        boost_energy_split(&rep, Axis::X, u, &rep.unitary_interior().unwrap())
            .unwrap()
            .max_residual()
    };
    for u in [-1.0, -0.4, 0.2, 0.7] {
        let r = residual(32, u);
        ensure(r <= 1e-8, format!("u = {u}: {r:e}"))?;
    }
    let (coarse, fine) = (residual(32, 1.0), residual(64, 1.0));
    ensure(coarse <= 1e-8, format!("N = 32, u = 1: {coarse:e}"))?;
    ensure(coarse / fine >= 5.0, format!("doubling ratio {}", coarse / fine))?;
    Ok(format!("N=32 {coarse:.2e}, N=64 {fine:.2e}, ratio {:.1}", coarse / fine))
}

struct LawSweep {
    invariance: Vec<f64>,
    covariance: Vec<f64>,
    invariance_pass: Vec<bool>,
    covariance_pass: Vec<bool>,
}

fn sweep(rep: &Representation, t: &Transformation, alphas: &[C64], proj: Option<&Projector>) -> LawSweep {
    let h = rep.generators().hamiltonian.clone().unwrap();
    let psi = wavepacket(rep, alphas).unwrap();
    let mut s = LawSweep {
        invariance: Vec::new(),
        covariance: Vec::new(),
        invariance_pass: Vec::new(),
        covariance_pass: Vec::new(),
    };
    for dt in [0.05, 0.025, 0.0125] {
        let traj = evolve(&h, &psi, TimeGrid::span(0.5, dt).unwrap()).unwrap();
        let tol = fd_tolerance(FD_COEFFICIENT, dt);
        let i = check_law_invariance(rep.generators(), t, &traj, tol, proj).unwrap();
        let c = check_law_covariance(rep.generators(), t, &traj, tol, proj).unwrap();
        s.invariance.push(i.max_residual);
        s.covariance.push(c.max_residual);
        s.invariance_pass.push(i.verdict == Verdict::Pass);
        s.covariance_pass.push(c.verdict == Verdict::Pass);
    }
    s
}

fn orders(r: &[f64]) -> Vec<f64> {
    r.windows(2).map(|w| measured_order(w[0], w[1])).collect()
}

fn second_order(name: &str, r: &[f64]) -> Result<(), String> {
    let o = orders(r);
    ensure(o.iter().all(|x| (x - 2.0).abs() <= 0.1), format!("{name}: orders {o:?} from {r:?}"))
}

fn dynamics_invariance() -> Outcome {
    let rep = build_particle_rep(32, 1.0, Potential::None, 1).unwrap();
    let alphas = [C64::new(0.8, 0.0)];
    let mut worst: f64 = 0.0;
    for (name, t) in [
        ("time translation", Transformation::fixed(GeneratorId::TimeTranslation, 0.3).unwrap()),
        ("space translation", Transformation::fixed(GeneratorId::SpaceTranslation(Axis::X), 0.5).unwrap()),
        ("boost", Transformation::boost(Axis::X, 0.2).unwrap()),
    ] {
        let s = sweep(&rep, &t, &alphas, None);
        ensure(s.invariance_pass.iter().all(|&p| p), format!("{name}: {:?}", s.invariance))?;
        second_order(name, &s.invariance)?;
        worst = orders(&s.invariance).iter().fold(worst, |w, o| w.max((o - 2.0).abs()));
    }
    let rep3 = build_particle_rep(8, 1.0, Potential::None, 3).unwrap();
    let shell = rep3.shell_interior().unwrap();
    let rotation = Transformation::fixed(GeneratorId::Rotation(Axis::Z), 0.4).unwrap();
    let alphas3 = [C64::new(0.3, 0.2), C64::new(-0.2, 0.1), C64::new(0.1, 0.0)];
    let s = sweep(&rep3, &rotation, &alphas3, Some(&shell));
    ensure(s.invariance_pass.iter().all(|&p| p), format!("rotation: {:?}", s.invariance))?;
    second_order("rotation", &s.invariance)?;
    worst = orders(&s.invariance).iter().fold(worst, |w, o| w.max((o - 2.0).abs()));
    Ok(format!("all pass at 10·dt², |order − 2| ≤ {worst:.3}"))
}

fn field_covariance() -> Outcome {
    let rep = build_particle_rep(32, 1.0, Potential::Harmonic { omega: 1.0 }, 1).unwrap();
    let t = Transformation::boost(Axis::X, 0.2).unwrap();
    let s = sweep(&rep, &t, &[C64::new(0.8, 0.0)], None);
    ensure(s.covariance_pass.iter().all(|&p| p), format!("covariance {:?}", s.covariance))?;
    second_order("covariance", &s.covariance)?;
    ensure(s.invariance_pass.iter().all(|&p| !p), format!("invariance {:?}", s.invariance))?;
    let floor = *s.covariance.last().unwrap();
    let low = s.invariance.iter().copied().fold(f64::MAX, f64::min);
    let high = s.invariance.iter().copied().fold(f64::MIN, f64::max);
    ensure(low >= 10.0 * floor, format!("plateau {low:e} vs floor {floor:e}"))?;
    ensure(high / low < 1.2, format!("plateau varies with dt: {:?}", s.invariance))?;
    Ok(format!("plateau {low:.3e}..{high:.3e}, floor {floor:.2e}"))
}

fn symmetry_breaking() -> Outcome {
    use RelationLabel::*;
    let force = 0.7;
    let free = build_particle_rep(16, 1.0, Potential::None, 1).unwrap();
    let field = build_particle_rep(16, 1.0, Potential::Linear { force }, 1).unwrap();
    let after = audit(&field, 1.0);
    let newly = breaking_labels(&classify_breaking(&audit(&free, 1.0), &after).unwrap());
    ensure(newly == [G, I].into_iter().collect(), format!("newly failing {newly:?}"))?;
    let rank = field.default_interior().unwrap().rank() as f64;
    let ph = after.entry(RelationId::single(G, Axis::X)).unwrap().residual.unwrap();
    let want = force * rank.sqrt();
    ensure((ph - want).abs() <= 1e-10, format!("[P,H] {ph} vs {want}"))?;

    let aniso = build_particle_rep(
        8,
        1.0,
        Potential::Anisotropic {
            omega_x: 1.0,
            omega_y: 1.5,
        },
        3,
    )
    .unwrap();
    let jz = audit(&aniso, 0.0).entry(RelationId::single(H, Axis::Z)).unwrap().clone();
    ensure(jz.verdict == Verdict::Fail, "anisotropic [J_z,H] passes")?;

    let linear = run_scenario(&bundled("linear_field_breaking").unwrap().unwrap(), &RunOptions::default()).unwrap();
    ensure(linear.verdict == OverallVerdict::ExpectedFail, "linear scenario verdict")?;
    ensure(
        linear.checks[0].details["newly_failing"] == serde_json::json!(["5g", "5i"]),
        format!("scenario newly failing {}", linear.checks[0].details["newly_failing"]),
    )?;
    Ok(format!("newly failing {{5g, 5i}}, [P,H] = {ph:.12} = |f|√{rank}; [J_z,H] fails"))
}

fn casimir_suite() -> Outcome {
    let report = run_scenario(&bundled("two_particle_casimir").unwrap().unwrap(), &RunOptions::default()).unwrap();
    let check = &report.checks[0];
    ensure(check.verdict == CheckVerdict::Pass, format!("failing {:?}", check.failing_elements()))?;
    let w_commutators: Vec<_> = check.elements.iter().filter(|e| e.name.starts_with("[W,")).collect();
    ensure(!w_commutators.is_empty(), "no [W, K] elements")?;
    let worst_comm = w_commutators.iter().map(|e| e.residual.unwrap()).fold(0.0, f64::max);
    ensure(worst_comm <= 1e-8, format!("[W,K] {worst_comm:e}"))?;
    let levels: Vec<_> = check.elements.iter().filter(|e| e.name.starts_with("W level")).collect();
    ensure(levels.len() == 5, "five W levels")?;
    let worst_level = levels.iter().map(|e| e.residual.unwrap()).fold(0.0, f64::max);
    ensure(worst_level <= 1e-6, format!("level error {worst_level:e}"))?;
    Ok(format!("[W,K] ≤ {worst_comm:.2e}, level rel. error ≤ {worst_level:.2e}"))
}

fn central_charge() -> Outcome {
    let rep = build_particle_rep(32, 1.0, Potential::None, 1).unwrap();
    let proj = rep.unitary_interior().unwrap();
    let phase = central_charge_phase(rep.generators(), Axis::X, 0.5, 0.3, &proj).unwrap();
    let err = (phase.phase.abs() - 0.15).abs();
    ensure(err <= 1e-6, format!("phase {}", phase.phase))?;
    Ok(format!("phase {:.12}, |error| {err:.1e}", phase.phase))
}

fn commutant_oracle() -> Outcome {
    let mut sets = oracle::bundled_sets()
        .into_iter()
        .map(|(n, o)| (n.to_string(), o))
        .collect::<Vec<_>>();
    sets.extend(oracle::random_sets(&mut ChaCha8Rng::seed_from_u64(2024), 6));
    for (name, ops) in &sets {
        let v = commutant_basis(ops).unwrap().len();
        let e = oracle::exhaustive_commutant_dim(ops);
        ensure(v == e, format!("{name}: vectorized {v}, exhaustive {e}"))?;
    }
    let particle = build_particle_rep(2, 1.0, Potential::None, 3).unwrap();
    let spin = build_spin_rep(Spin::new(0.5).unwrap()).unwrap();
    let rep = compose_with_spin(&particle, &spin).unwrap();
    let dvo = dvo_set(&rep, 1e-8).unwrap();
    let sz = dvo.memberships.iter().find(|m| m.observable == "S_z").unwrap();
    ensure(sz.in_commutant && sz.commutant_residual <= 1e-8, format!("S_z commutant {:e}", sz.commutant_residual))?;
    ensure(
        !sz.in_invariant_subset && sz.invariant_residual > 0.1,
        format!("S_z invariant {:e}", sz.invariant_residual),
    )?;
    Ok(format!(
        "{} sets agree; S_z residuals {:.1e} / {:.3}",
        sets.len(),
        sz.commutant_residual,
        sz.invariant_residual
    ))
}

fn classical_reversal() -> Outcome {
    let odd = classical_time_reversal_demo(1.0, 0.0, 1.0, 10.0, 0.01).unwrap();
    let even = classical_time_reversal_demo(1.0, 1.0, 0.0, 10.0, 0.01).unwrap();
    for r in [&odd, &even] {
        ensure(r.reversed_residual <= 1e-8, format!("Hamilton residual {:e}", r.reversed_residual))?;
    }
    ensure(odd.sup_distance >= 0.5, format!("(0,1) distance {}", odd.sup_distance))?;
    ensure(even.sup_distance <= 1e-8, format!("(1,0) distance {:e}", even.sup_distance))?;
    Ok(format!(
        "residuals {:.1e}/{:.1e}, distances {:.3}/{:.1e}",
        odd.reversed_residual, even.reversed_residual, odd.sup_distance, even.sup_distance
    ))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn galilean(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_galilean")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn without_wall_clock(doc: &[u8]) -> Vec<u8> {
    String::from_utf8_lossy(doc)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_clock_seconds\""))
        .flat_map(|l| l.bytes().chain(std::iter::once(b'\n')))
        .collect()
}

fn harness_determinism() -> Outcome {
    for target in [fixture("pass.cfg"), "central_charge_phase".to_string()] {
        let args = ["run", target.as_str(), "--format", "structured", "--seed", "31"];
        let (c1, a) = galilean(&args);
        let (c2, b) = galilean(&args);
        ensure(c1 == 0 && c2 == 0, format!("{target}: exit {c1}, {c2}"))?;
        ensure(without_wall_clock(&a) == without_wall_clock(&b), format!("{target}: reports differ"))?;
    }
    let cases = [
        (fixture("pass.cfg"), 0),
        ("spin_half_algebra".to_string(), 0),
        (fixture("expected_fail.cfg"), 0),
        ("linear_field_breaking".to_string(), 0),
        (fixture("wrong_expectation.cfg"), 1),
        (fixture("malformed.cfg"), 2),
    ];
    for (target, want) in &cases {
        let (code, _) = galilean(&["run", target]);
        ensure(code == *want, format!("{target}: exit {code}, want {want}"))?;
    }
    Ok("byte-identical reports; exit codes 0/0/0/0/1/2".to_string())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("exact-sector algebra", exact_sector),
        ("truncated-sector algebra", truncated_sector),
        ("boost Hamiltonian identity", boost_identity),
        ("dynamics invariance", dynamics_invariance),
        ("covariance under fields", field_covariance),
        ("symmetry breaking", symmetry_breaking),
        ("Casimir suite", casimir_suite),
        ("central charge", central_charge),
        ("commutant oracle", commutant_oracle),
        ("classical time reversal", classical_reversal),
        ("harness determinism", harness_determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".to_string()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {:>2}: {name}: {msg} ({secs:.1} s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {msg} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
