use cnt_casimir::film::{Sheet, PERFECT_CONDUCTOR_SURROGATE};
use cnt_casimir::lifshitz::{CasimirPoint, FilmPair, Mode};

fn metal_pair() -> FilmPair {
    FilmPair::identical(Sheet::Uniform {
        s_xx: PERFECT_CONDUCTOR_SURROGATE,
        s_yy: PERFECT_CONDUCTOR_SURROGATE,
    })
}

#[test]
fn uniform_sheet_energy_is_negative_and_rises_with_separation() {
    let films = FilmPair::identical(Sheet::Uniform { s_xx: 0.3, s_yy: 0.3 });
    let mut last = f64::NEG_INFINITY;
    for d in [50.0, 100.0, 200.0, 400.0] {
        let e = films.energy(&CasimirPoint::new(d, 0.4, 0.0, Mode::Quantum)).unwrap().value;
        assert!(e < 0.0, "{d}: {e}");
        assert!(e > last, "{d}: {e} <= {last}");
        last = e;
    }
}

#[test]
fn perfect_conductor_surrogate_reaches_ideal_metal() {
    let pt = CasimirPoint::new(1000.0, 0.0, 0.0, Mode::Quantum);
    let e = metal_pair().energy(&pt).unwrap().value;
    let ratio = e / pt.e_m();
    assert!((ratio - 1.0).abs() < 1e-2, "{ratio}");
}

#[test]
fn isotropic_sheets_feel_no_torque() {
    let films = FilmPair::identical(Sheet::Uniform { s_xx: 0.5, s_yy: 0.5 });
    let t = films.torque(&CasimirPoint::new(100.0, 0.3, 0.0, Mode::Quantum)).unwrap().value;
    let e = films.energy(&CasimirPoint::new(100.0, 0.3, 0.0, Mode::Quantum)).unwrap().value;
    assert!(t.abs() < 1e-6 * e.abs(), "{t} vs {e}");
}

#[test]
fn thermal_mode_matches_closed_form_for_metals() {
    let pt = CasimirPoint::new(500.0, 0.0, 300.0, Mode::Thermal);
    let e = metal_pair().energy(&pt).unwrap().value;
    assert!((e / pt.e_t() - 1.0).abs() < 1e-4, "{} {}", e, pt.e_t());
}

#[test]
fn invalid_points_are_rejected() {
    let films = metal_pair();
    assert!(films.energy(&CasimirPoint::new(-1.0, 0.0, 0.0, Mode::Quantum)).is_err());
    assert!(films.energy(&CasimirPoint::new(100.0, 0.0, 0.0, Mode::Matsubara)).is_err());
}
