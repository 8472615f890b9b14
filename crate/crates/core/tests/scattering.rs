use hartree_core::scattering::{
    born_functional, pairing, s_full, scaled_born, wave_operator, ScatterConfig, WaveSign,
};
use hartree_core::spectral::Profile;
use hartree_core::{ComplexField, Error, Grid3, ModelParams, ProfileSpec};

fn setup() -> (ModelParams, ScatterConfig, ComplexField) {
    let g = Grid3::new(16, 24.0).unwrap();
    let cfg = ScatterConfig::new(g, 4.0, 0.02).unwrap();
    let p = ProfileSpec::gaussian(1.5).normalized();
    (ModelParams::nls(0.5, 1.0, 1.25, 2.0).unwrap(), cfg, ComplexField::from_fn(g, |x| p.value(x)))
}

#[test]
fn pairing_is_cubic_and_tends_to_born() {
    let (m, cfg, phi) = setup();
    let born = born_functional(&m, &cfg, &phi).unwrap();
    let mut prev = f64::INFINITY;
    for eps in [0.2, 0.1, 0.05] {
        let (p, _) = pairing(&m, &cfg.with_epsilon(eps), &phi).unwrap();
        // i eps^{-3} <(S - id)(eps phi), phi> -> K[phi]
        let k = (num_complex::Complex64::i() * p).re / eps.powi(3);
        let gap = (k - born).abs();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev < 0.02 * born.abs());
}

#[test]
fn wave_operators_are_isometries_and_invert() {
    let (m, cfg, phi) = setup();
    let w = wave_operator(WaveSign::Minus, false, m.v0, &cfg, &phi).unwrap();
    assert!((w.norm() - phi.norm()).abs() < 1e-12);
    let back = wave_operator(WaveSign::Minus, true, m.v0, &cfg, &w).unwrap();
    assert!(back.distance(&phi).unwrap() < 1e-10);
}

#[test]
fn single_sweep_preserves_mass() {
    let (m, mut cfg, phi) = setup();
    cfg.richardson = false;
    let data = phi.scale_real(0.1);
    let r = s_full(&m, &cfg, &data).unwrap();
    assert!((r.phi_plus.norm() - data.norm()).abs() < 1e-12 * data.norm());
    assert!(r.horizon_sensitivity.is_finite() && r.defect.is_finite());
}

#[test]
fn born_is_linear_in_the_coupling() {
    let (m, cfg, phi) = setup();
    let a = scaled_born(&m, &cfg, &phi, 2.0).unwrap();
    let doubled = m.with_v1(hartree_core::YukawaParams::new(2.5, 2.0).unwrap());
    let b = scaled_born(&doubled, &cfg, &phi, 2.0).unwrap();
    assert!((b - 2.0 * a).abs() < 1e-12 * b.abs());
}

#[test]
fn large_data_is_refused() {
    let (m, cfg, phi) = setup();
    assert!(matches!(s_full(&m, &cfg, &phi), Err(Error::Smallness { .. })));
    let other = ComplexField::zeros(Grid3::new(8, 24.0).unwrap());
    assert!(matches!(s_full(&m, &cfg, &other), Err(Error::GridMismatch)));
}
