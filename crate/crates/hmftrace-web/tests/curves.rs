use hmftrace_web::{spherical_curves_json, transform_curves_json, zeta_line_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

fn column(v: &Value, key: &str) -> Vec<f64> {
    v[key].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn transform_curves_shapes() {
    let v = parse(transform_curves_json(4.5, 4.5, 10.0, 25).unwrap());
    for key in ["w", "q", "u", "g", "r", "h"] {
        assert_eq!(column(&v, key).len(), 25, "{key}");
    }
    let g = column(&v, "g");
    assert!(g[0] > 0.0);
    assert!(g[24].abs() < 1e-12);
    assert!(transform_curves_json(4.5, 4.5, 10.0, 1).is_err());
    assert!(transform_curves_json(4.5, 0.0, 10.0, 10).is_err());
}

#[test]
fn trivial_eigenvalue_is_flat() {
    let v = parse(spherical_curves_json(0.0, 0.0, 3.0, 12).unwrap());
    assert!(column(&v, "radial_re").iter().all(|x| (x - 1.0).abs() < 1e-12));
    assert!(column(&v, "angular_re").iter().all(|x| (x - 1.0).abs() < 1e-12));
}

#[test]
fn zeta_line_at_two() {
    let v = parse(zeta_line_json(2, 0, 2.0, 1.0, 2).unwrap());
    assert_eq!(v["field"], "Q(sqrt 2)");
    let re = column(&v, "re");
    assert!((re[0] - 5.7398857).abs() < 1e-6, "{re:?}");
    assert!(zeta_line_json(4, 0, 2.0, 1.0, 2).is_err());
}
