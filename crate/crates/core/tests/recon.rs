use hartree_core::harness::{extrapolate, ExtrapolationModel};
use hartree_core::recon::{digit_extract, recon_ratio, DigitOptions, RatioMode};
use hartree_core::scattering::ScatterConfig;
use hartree_core::spectral::Profile;
use hartree_core::{ComplexField, Error, Grid3, ModelParams, ProfileSpec, YukawaParams};

fn psi(a: f64) -> hartree_core::Result<f64> {
    Ok(a * 4.0 / (a.abs() + 1.0))
}

#[test]
fn digits_of_an_exact_functional() {
    let opts = DigitOptions {
        depth: 10,
        cap: 16,
        noise: 0.0,
    };
    for truth in [0.0, 0.5, 1.25, 3.0 + 0.5f64.powi(10), 7.75] {
        let s = digit_extract(psi, psi(truth).unwrap(), opts).unwrap();
        assert_eq!(s.value(), truth, "{}", s.digit_string());
    }
    assert!(matches!(
        digit_extract(psi, 100.0, opts),
        Err(Error::CapExceeded { .. })
    ));
    assert!(digit_extract(psi, -1.0, opts).is_err());
}

#[test]
fn extrapolation_models() {
    let inv: Vec<_> = [2.0, 4.0, 8.0, 16.0].iter().map(|&l: &f64| (l, 0.3 + 0.7 / (l * l))).collect();
    let r = extrapolate(&inv, ExtrapolationModel::PowerInInverseParam).unwrap();
    assert!((r.estimate - 0.3).abs() < 1e-10);
    assert!((r.order.unwrap() - 2.0).abs() < 1e-8);
    assert!(r.within(0.3, 1e-6));
    let sq: Vec<_> = [0.2, 0.1, 0.05].iter().map(|&h: &f64| (h, 2.0 - h * h + h.powi(4))).collect();
    let r = extrapolate(&sq, ExtrapolationModel::PowerInParamSquared).unwrap();
    assert!((r.estimate - 2.0).abs() < 1e-12);
    assert!(extrapolate(&sq[..2], ExtrapolationModel::PowerInParamSquared).is_err());
}

#[test]
fn ratio_flips_with_the_coupling_sign() {
    let g = Grid3::new(16, 24.0).unwrap();
    let cfg = ScatterConfig::new(g, 4.0, 0.02).unwrap();
    let p = ProfileSpec::gaussian(1.5).normalized();
    let phi = ComplexField::from_fn(g, |x| p.value(x)).scale_real(0.5);
    let m = ModelParams::nls(0.5, 1.0, 1.25, 2.0).unwrap();
    let flipped = m.with_v1(YukawaParams::new(-1.25, 2.0).unwrap());
    let a = recon_ratio(&m, &cfg, &phi, &[1.0, 2.0], RatioMode::Production).unwrap();
    let b = recon_ratio(&flipped, &cfg, &phi, &[1.0, 2.0], RatioMode::Production).unwrap();
    assert!(a.ratio > 0.0);
    assert_eq!(b.ratio, -a.ratio);
    assert!(recon_ratio(&m, &cfg, &phi, &[2.0, 1.0], RatioMode::Production).is_err());
    let srh = ModelParams::srh(1.0, 1.0).unwrap();
    assert!(recon_ratio(&srh, &cfg, &phi, &[1.0, 2.0], RatioMode::Production).is_err());
}
