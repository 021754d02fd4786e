use foliakit::numeric::Classification;
use foliakit_web::{kernel, pullback, singularities};

#[test]
fn plane_has_seven_hyperbolic_points() {
    let s = singularities(3, 2, 0).unwrap();
    assert_eq!((s.expected, s.found), (7, 7));
    assert!(s.points.iter().all(|p| p.classification == Some(Classification::Hyperbolic)));
    assert!(s.points.iter().all(|p| p.coordinates.len() == 3 && p.residual < 1e-10));
}

#[test]
fn standard_pullback_summary() {
    let p = pullback(2, 2, 4).unwrap();
    assert_eq!(p.coefficient_degree, Some(8));
    assert_eq!(p.degree, 7);
    assert!(p.decomposable && p.integrable);
}

#[test]
fn kernel_of_a_single_square() {
    let k = kernel(&["x0^2".into(), "0".into()]).unwrap();
    assert_eq!(k.level, 1);
    assert!(k.kernel_dim > 0);
    let cyclic = kernel(&["x1^2".into(), "x2^2".into(), "x0^2".into()]).unwrap();
    assert_eq!(cyclic.kernel_dim, 0);
}

#[test]
fn out_of_range_parameters_are_rejected() {
    assert!(singularities(7, 2, 0).is_err());
    assert!(pullback(2, 2, 9).is_err());
    assert!(kernel(&["x0^2".into(), "x1".into()]).is_err());
}
