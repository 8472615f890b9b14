use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use hartree_core::spectral::{
    apply_multiplier, inner, norm, read_field_dump, translate, write_field_dump, Multiplier, Profile,
};
use hartree_core::{ComplexField, Grid3, ProfileSpec, Space};

fn gaussian(g: Grid3, width: f64) -> ComplexField {
    let p = ProfileSpec::gaussian(width);
    ComplexField::from_fn(g, |x| p.value(x))
}

#[test]
fn roundtrip_and_parseval() {
    let g = Grid3::new(16, 12.0).unwrap();
    let f = ComplexField::from_fn(g, |x| Complex64::new(x[0].sin() * (-x[1] * x[1]).exp(), x[2].cos() * 0.1));
    let spec = f.to_frequency();
    assert_eq!(spec.space(), Space::Frequency);
    assert!(spec.to_physical().distance(&f).unwrap() < 1e-12 * f.norm());
    assert_relative_eq!(spec.norm(), f.norm(), max_relative = 1e-12);
}

#[test]
fn profile_normalization_matches_grid_norm() {
    let g = Grid3::new(32, 24.0).unwrap();
    let p = ProfileSpec::gaussian(2.0).normalized();
    let f = ComplexField::from_fn(g, |x| p.value(x));
    assert_relative_eq!(f.norm(), 1.0, max_relative = 1e-8);
    let parsed: ProfileSpec = "gaussian:width=2,unit".parse().unwrap();
    assert_eq!(parsed, p);
    assert!("triangle:width=1".parse::<ProfileSpec>().is_err());
}

#[test]
fn lattice_translation_is_a_permutation() {
    let g = Grid3::new(16, 16.0).unwrap();
    let f = gaussian(g, 1.5);
    let h = g.spacing();
    let shifted = translate(&f, [2.0 * h, 0.0, -h]);
    let mut a: Vec<f64> = f.values().iter().map(|v| v.re).collect();
    let mut b: Vec<f64> = shifted.values().iter().map(|v| v.re).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
    let back = translate(&shifted, [-2.0 * h, 0.0, h]);
    assert!(back.distance(&f).unwrap() < 1e-12);
}

#[test]
fn identity_multiplier_is_identity() {
    let g = Grid3::new(8, 8.0).unwrap();
    let f = gaussian(g, 1.0);
    let out = apply_multiplier(&f, &Multiplier::identity()).unwrap();
    assert!(out.distance(&f).unwrap() < 1e-13);
}

#[test]
fn norms_and_inner_product() {
    let g = Grid3::new(16, 16.0).unwrap();
    let f = gaussian(g, 2.0);
    assert_relative_eq!(norm(&f, 2.0).unwrap(), f.norm(), max_relative = 1e-12);
    assert!(norm(&f, 0.5).is_err());
    let ip = inner(&f, &f.scale(Complex64::i())).unwrap();
    assert_relative_eq!(ip.im.abs(), f.norm().powi(2), max_relative = 1e-12);
    assert!(ip.re.abs() < 1e-12);
    let other = ComplexField::zeros(Grid3::new(8, 16.0).unwrap());
    assert!(f.distance(&other).is_err());
}

#[test]
fn field_dump_roundtrip() {
    let g = Grid3::new(8, 10.0).unwrap();
    let f = gaussian(g, 1.0).scale(Complex64::from_polar(1.0, 0.4));
    let mut bytes = Vec::new();
    write_field_dump(&f, &mut bytes).unwrap();
    assert_eq!(bytes.len(), 8 + 8 + 8 + 16 * 512);
    let back = read_field_dump(bytes.as_slice()).unwrap();
    assert_eq!(back.grid(), f.grid());
    assert_eq!(back.values(), f.to_physical().values());
    assert!(read_field_dump(&bytes[..20]).is_err());
}

#[test]
fn invalid_grids_are_rejected() {
    assert!(Grid3::new(0, 1.0).is_err());
    assert!(Grid3::new(9, 1.0).is_err());
    assert!(Grid3::new(8, -1.0).is_err());
    assert!(Grid3::new(8, f64::NAN).is_err());
}

proptest! {
    #[test]
    fn index_split_roundtrip(half in 4usize..9, seed in 0usize..10_000) {
        let g = Grid3::new(2 * half, 5.0).unwrap();
        let idx = seed % g.len();
        prop_assert_eq!(g.index(g.split(idx)), idx);
    }

    #[test]
    fn parseval_for_random_fields(values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 512)) {
        let g = Grid3::new(8, 3.0).unwrap();
        let v: Vec<Complex64> = values.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let f = ComplexField::from_values(g, v, Space::Physical).unwrap();
        let n = f.norm();
        prop_assert!((f.to_frequency().norm() - n).abs() <= 1e-12 * n.max(1e-300));
    }
}
