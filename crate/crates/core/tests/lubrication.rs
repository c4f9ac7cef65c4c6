mod common;

use common::film::{
    cavitation_case, closure_defect, cold, conservation_defect, flooded_mismatch, journal, slider_study, tight, ETA,
    P_AMB, RHO,
};
use common::gre_strip;
use ebfvm::elements::ElementKind;
use ebfvm::solvers::sor_p_theta;

#[test]
fn slider_converges_to_closed_form() {
    let (errors, orders) = slider_study();
    assert!(errors[2] <= 1e-2, "{errors:?}");
    assert!(orders.iter().all(|&o| o >= 1.8), "{orders:?} from {errors:?}");
}

#[test]
fn divergent_gap_cavitates_and_conserves_mass() {
    let c = cavitation_case();
    assert!(c.cavitated > 10, "{c:?}");
    assert!(c.theta_in_range);
    assert!(c.complementarity <= 1e-6, "{c:?}");
    // the film ruptures downstream of the minimum gap
    assert!(c.downstream_only);
    assert!(c.mass_defect <= 1e-6, "{c:?}");
}

#[test]
fn flooded_film_matches_direct_solve() {
    let (dev, flooded) = flooded_mismatch();
    assert!(flooded);
    assert!(dev <= 1e-8, "{dev}");
}

#[test]
fn still_film_keeps_ambient_pressure() {
    let s = gre_strip(|_| 2e-5, 16, 0.01, 0.0, P_AMB, RHO, ETA);
    let (p0, t0) = cold(s.mesh.nodes.len(), 3e5);
    let r = sor_p_theta(&s.system, &p0, &t0, &tight()).unwrap();
    for p in &r.p {
        assert!((p - P_AMB).abs() <= 1e-9 * P_AMB);
    }
}

fn check_conservation(kind: ElementKind) {
    let (worst, checked, cavitated) = conservation_defect(&journal(kind));
    assert!(cavitated);
    assert!(checked > 200);
    assert!(worst <= 1e-6, "{kind:?}: {worst}");
}

#[test]
fn periodic_quad_film_conserves_mass() {
    check_conservation(ElementKind::Quad4);
}

#[test]
fn periodic_tri_film_conserves_mass() {
    check_conservation(ElementKind::Tri3);
}

#[test]
fn interior_control_volumes_close() {
    for kind in [ElementKind::Quad4, ElementKind::Tri3] {
        let d = closure_defect(&journal(kind));
        assert!(d <= 1e-12, "{kind:?}: {d}");
    }
}
