use galilean_core::audit::{
    audit_algebra, breaking_labels, classify_breaking, relation_residual, RelationId, RelationLabel, TolerancePolicy,
    Verdict,
};
use galilean_core::casimir::{boost_energy_split, casimirs, check_casimir_invariance, distinct_levels};
use galilean_core::commutant::dvo_set;
use galilean_core::dynamics::{
    central_charge_phase, check_law_covariance, check_law_invariance, evolve, fd_tolerance, measured_order,
    transform_observable, GeneratorId, TimeGrid, Transformation, FD_COEFFICIENT,
};
use galilean_core::linalg::{eigenvalues, Projector, C64};
use galilean_core::representations::{
    build_particle_rep, build_spin_rep, build_two_particle_rep, compose_with_spin, wavepacket, Axis, Potential,
    Representation, Spin,
};
use std::collections::BTreeSet;

fn labels(codes: &[RelationLabel]) -> BTreeSet<RelationLabel> {
    codes.iter().copied().collect()
}

fn audit(rep: &Representation, t: f64) -> galilean_core::audit::AuditReport {
    let gens = rep.generators().at_time(t).unwrap();
    audit_algebra(&gens, rep.kind(), &TolerancePolicy::default(), &rep.default_interior().unwrap()).unwrap()
}

#[test]
fn spin_algebra_is_exact() {
    for twice in 1..=3 {
        let rep = build_spin_rep(Spin::new(f64::from(twice) / 2.0).unwrap()).unwrap();
        let proj = Projector::identity(rep.dim());
        for rel in RelationId::enumerate(RelationLabel::C, 3) {
            let r = relation_residual(rep.generators(), rel, &proj).unwrap().unwrap();
            assert!(r <= 1e-13 * rep.dim() as f64, "{rel}: {r}");
        }
    }
}

#[test]
fn truncated_1d_algebra_and_top_level_defect() {
    let n = 16;
    let rep = build_particle_rep(n, 1.0, Potential::None, 1).unwrap();
    let proj = rep.interior_projector(2).unwrap();
    use RelationLabel::*;
    for label in [A, B, F, G, I] {
        for rel in RelationId::enumerate(label, 1) {
            let r = relation_residual(rep.generators(), rel, &proj).unwrap().unwrap();
            assert!(r <= 1e-10, "{rel}: {r}");
        }
    }
    let full = Projector::identity(rep.dim());
    let defect = relation_residual(rep.generators(), RelationId::pair(F, Axis::X, Axis::X), &full)
        .unwrap()
        .unwrap();
    assert!((defect - n as f64).abs() <= 1e-10, "{defect}");
}

#[test]
fn free_3d_audit_passes_everywhere() {
    let rep = build_particle_rep(8, 1.0, Potential::None, 3).unwrap();
    let report = audit(&rep, 0.0);
    assert_eq!(report.summary.failed, 0, "{:?}", report.failing_labels());
    assert_eq!(report.summary.not_applicable, 0);
}

#[test]
fn two_particle_audit() {
    let rep = build_two_particle_rep(12, 1.0, 1.0, 1.0).unwrap();
    let report = audit(&rep, 0.0);
    use RelationLabel::*;
    for label in [A, F, G] {
        let applicable: Vec<_> = report.entries_for(label).filter(|e| e.verdict != Verdict::NotApplicable).collect();
        assert!(!applicable.is_empty());
        assert!(applicable.iter().all(|e| e.verdict == Verdict::Pass), "{label:?}");
    }
    for label in [C, D, E, H] {
        assert!(report.entries_for(label).all(|e| e.verdict == Verdict::NotApplicable), "{label:?}");
    }
}

#[test]
fn isotropic_harmonic_keeps_rotations() {
    let free = build_particle_rep(6, 1.0, Potential::None, 3).unwrap();
    let field = build_particle_rep(6, 1.0, Potential::Harmonic { omega: 1.0 }, 3).unwrap();
    let report = audit(&field, 0.0);
    assert!(report.entries_for(RelationLabel::H).all(|e| e.verdict == Verdict::Pass));
    assert!(report.failing_labels().contains(&RelationLabel::G));
    let broken = breaking_labels(&classify_breaking(&audit(&free, 0.0), &report).unwrap());
    assert!(!broken.contains(&RelationLabel::H));
}

#[test]
fn anisotropic_harmonic_breaks_jz() {
    let field = build_particle_rep(
        6,
        1.0,
        Potential::Anisotropic {
            omega_x: 1.0,
            omega_y: 1.5,
        },
        3,
    )
    .unwrap();
    let report = audit(&field, 0.0);
    let jz = report.entry(RelationId::single(RelationLabel::H, Axis::Z)).unwrap();
    assert_eq!(jz.verdict, Verdict::Fail);
    assert!(report.failing_labels().contains(&RelationLabel::H));
}

#[test]
fn linear_field_breaks_exactly_translations_and_boosts() {
    let force = 0.7;
    let free = build_particle_rep(16, 1.0, Potential::None, 1).unwrap();
    let field = build_particle_rep(16, 1.0, Potential::Linear { force }, 1).unwrap();
    let before = audit(&free, 1.0);
    let after = audit(&field, 1.0);
    let breaking = classify_breaking(&before, &after).unwrap();
    use RelationLabel::*;
    assert_eq!(breaking_labels(&breaking), labels(&[G, I]));
    let rank = field.default_interior().unwrap().rank() as f64;
    let ph = after.entry(RelationId::single(G, Axis::X)).unwrap().residual.unwrap();
    assert!((ph - force * rank.sqrt()).abs() <= 1e-10, "{ph}");
    // At t = 0 the boost relation still holds for any V(Q).
    assert!(!audit(&field, 0.0).failing_labels().contains(&I));
}

#[test]
fn mismatched_reports_are_rejected() {
    let a = audit(&build_particle_rep(8, 1.0, Potential::None, 1).unwrap(), 0.0);
    let b = audit(&build_spin_rep(Spin::new(0.5).unwrap()).unwrap(), 0.0);
    assert!(classify_breaking(&a, &b).is_err());
}

fn law_orders(
    rep: &Representation,
    t: &Transformation,
    alphas: &[C64],
    proj: Option<&Projector>,
) -> (Vec<f64>, Vec<f64>, Vec<bool>) {
    let h = rep.generators().hamiltonian.clone().unwrap();
    let psi = wavepacket(rep, alphas).unwrap();
    let (mut inv, mut cov, mut inv_pass) = (Vec::new(), Vec::new(), Vec::new());
    for dt in [0.05, 0.025, 0.0125] {
        let traj = evolve(&h, &psi, TimeGrid::span(0.5, dt).unwrap()).unwrap();
        let tol = fd_tolerance(FD_COEFFICIENT, dt);
        let i = check_law_invariance(rep.generators(), t, &traj, tol, proj).unwrap();
        let c = check_law_covariance(rep.generators(), t, &traj, tol, proj).unwrap();
        if i.verdict == Verdict::Pass {
            assert_eq!(c.verdict, Verdict::Pass, "invariance without covariance");
        }
        inv_pass.push(i.verdict == Verdict::Pass);
        inv.push(i.max_residual);
        cov.push(c.max_residual);
    }
    (inv, cov, inv_pass)
}

fn assert_second_order(r: &[f64]) {
    for w in r.windows(2) {
        let order = measured_order(w[0], w[1]);
        assert!((order - 2.0).abs() <= 0.1, "order {order} from {r:?}");
    }
}

#[test]
fn free_1d_law_is_invariant() {
    let rep = build_particle_rep(32, 1.0, Potential::None, 1).unwrap();
    let alphas = [C64::new(0.8, 0.0)];
    for t in [
        Transformation::fixed(GeneratorId::TimeTranslation, 0.3).unwrap(),
        Transformation::fixed(GeneratorId::SpaceTranslation(Axis::X), 0.5).unwrap(),
        Transformation::boost(Axis::X, 0.2).unwrap(),
    ] {
        let (inv, cov, pass) = law_orders(&rep, &t, &alphas, None);
        assert!(pass.iter().all(|&p| p), "{t:?}: {inv:?}");
        assert_second_order(&inv);
        assert_second_order(&cov);
    }
}

#[test]
fn free_3d_rotation_is_invariant_on_the_shell_interior() {
    let rep = build_particle_rep(8, 1.0, Potential::None, 3).unwrap();
    let proj = rep.shell_interior().unwrap();
    let t = Transformation::fixed(GeneratorId::Rotation(Axis::Z), 0.4).unwrap();
    let alphas = [C64::new(0.3, 0.2), C64::new(-0.2, 0.1), C64::new(0.1, 0.0)];
    let (inv, _, pass) = law_orders(&rep, &t, &alphas, Some(&proj));
    assert!(pass.iter().all(|&p| p), "{inv:?}");
    assert_second_order(&inv);
}

#[test]
fn harmonic_field_boost_is_covariant_not_invariant() {
    let rep = build_particle_rep(32, 1.0, Potential::Harmonic { omega: 1.0 }, 1).unwrap();
    let t = Transformation::boost(Axis::X, 0.2).unwrap();
    let (inv, cov, pass) = law_orders(&rep, &t, &[C64::new(0.8, 0.0)], None);
    assert!(pass.iter().all(|&p| !p));
    assert_second_order(&cov);
    let floor = cov.last().unwrap();
    assert!(inv.iter().all(|r| *r >= 10.0 * floor));
    let spread = inv.iter().copied().fold(f64::MIN, f64::max) / inv.iter().copied().fold(f64::MAX, f64::min);
    assert!(spread < 1.2, "plateau should not depend on dt: {inv:?}");
}

#[test]
fn weyl_phase_is_m_u_rho() {
    let rep = build_particle_rep(32, 1.0, Potential::None, 1).unwrap();
    let proj = rep.unitary_interior().unwrap();
    let phase = central_charge_phase(rep.generators(), Axis::X, 0.5, 0.3, &proj).unwrap();
    assert!((phase.phase.abs() - 0.15).abs() <= 1e-6, "{}", phase.phase);
    assert!(phase.fit_residual < 1e-8);
    assert!(phase.unprojected_residual > 1e-3);
}

#[test]
fn boost_split_identities_and_spectrum() {
    let rep = build_particle_rep(32, 1.0, Potential::None, 1).unwrap();
    let split = boost_energy_split(&rep, Axis::X, 0.4, &rep.unitary_interior().unwrap()).unwrap();
    assert!(split.max_residual() <= 1e-8, "{split:?}");
    for (a, b) in split.spectrum_before.iter().zip(&split.spectrum_after) {
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
    let zero = boost_energy_split(&rep, Axis::X, 0.0, &rep.unitary_interior().unwrap()).unwrap();
    assert!(zero.max_residual() <= 1e-12);
    let field = build_particle_rep(8, 1.0, Potential::Linear { force: 1.0 }, 1).unwrap();
    assert!(boost_energy_split(&field, Axis::X, 0.4, &field.default_interior().unwrap()).is_err());
}

#[test]
fn boost_split_converges_under_doubling() {
    let residual = |n| {
        let rep = build_particle_rep(n, 1.0, Potential::None, 1).unwrap();
        boost_energy_split(&rep, Axis::X, 1.0, &rep.unitary_interior().unwrap())
            .unwrap()
            .max_residual()
    };
    let (coarse, fine) = (residual(32), residual(64));
    assert!(coarse <= 1e-8);
    assert!(coarse / fine >= 5.0, "{coarse} → {fine}");
}

#[test]
fn casimir_labels() {
    let free = build_particle_rep(8, 1.0, Potential::None, 1).unwrap();
    let cs = casimirs(&free).unwrap();
    assert_eq!(cs.labels.internal_energy, Some(0.0));
    assert_eq!(cs.labels.mass, Some(1.0));

    let particle = build_particle_rep(2, 1.0, Potential::None, 3).unwrap();
    let spin = build_spin_rep(Spin::new(0.5).unwrap()).unwrap();
    let composite = compose_with_spin(&particle, &spin).unwrap();
    let s2 = casimirs(&composite).unwrap().labels.spin_squared.unwrap();
    assert!((s2 - 0.75).abs() < 1e-12);
}

#[test]
fn two_particle_internal_energy() {
    let rep = build_two_particle_rep(24, 1.0, 1.0, 1.0).unwrap();
    let cs = casimirs(&rep).unwrap();
    let proj = rep.interior_projector(4).unwrap();
    for e in check_casimir_invariance(&cs, rep.generators(), 1e-8, &proj).unwrap() {
        assert_eq!(e.verdict, Verdict::Pass, "[{}, {}] = {}", e.left, e.right, e.residual);
    }
    let w = eigenvalues(&cs.internal_energy).unwrap();
    let levels = distinct_levels(&w, 1e-9);
    let omega = 2.0_f64.sqrt();
    for (n, level) in levels.iter().take(5).enumerate() {
        let want = (n as f64 + 0.5) * omega;
        assert!((level - want).abs() <= 1e-6 * want, "{level} vs {want}");
    }
    let dvo = dvo_set(&rep, 1e-8);
    // The two-particle commutant exceeds the vectorized budget at this size.
    assert!(dvo.is_err());
}

#[test]
fn two_particle_w_is_galilean_invariant() {
    let rep = build_two_particle_rep(4, 1.0, 1.0, 1.0).unwrap();
    let dvo = dvo_set(&rep, 1e-8).unwrap();
    let w = dvo.memberships.iter().find(|m| m.observable == "W").unwrap();
    assert!(w.in_commutant);
    assert!(w.in_invariant_subset, "{w:?}");
}

#[test]
fn spin_half_dvo_and_boost_stability() {
    let particle = build_particle_rep(2, 1.0, Potential::None, 3).unwrap();
    let spin = build_spin_rep(Spin::new(0.5).unwrap()).unwrap();
    let rep = compose_with_spin(&particle, &spin).unwrap();
    let dvo = dvo_set(&rep, 1e-8).unwrap();
    let sz = dvo.memberships.iter().find(|m| m.observable == "S_z").unwrap();
    assert!(sz.in_commutant && sz.commutant_residual <= 1e-8);
    assert!(!sz.in_invariant_subset && sz.invariant_residual > 0.1);
    for member in dvo.invariant_subset.members() {
        assert!(dvo.commutant.projection_residual(member).unwrap() <= 1e-8);
        for u in [0.3, -1.1] {
            let moved = transform_observable(member, &Transformation::boost(Axis::X, u).unwrap(), rep.generators())
                .unwrap();
            assert!(dvo.invariant_subset.projection_residual(&moved).unwrap() <= 1e-6);
        }
    }
}
