use geoflow_web::{bryant_profile_json, rho_sweep_json, warped_scan_json};
use serde_json::Value;

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn steady_profile_survives() {
    let v: Value = serde_json::from_str(&bryant_profile_json(3, 0.0, 0.0, 1.0, 50.0).unwrap()).unwrap();
    assert!((v["t_end"].as_f64().unwrap() - 50.0).abs() < 1e-9);
    assert!(v["stop"].is_null());
    assert!(v["positivity_lost_at"].is_null());
    assert!(v["max_residual"].as_f64().unwrap() < 1e-6);
    let t = floats(&v["t"]);
    assert!(t.len() <= 2000 && t.windows(2).all(|w| w[1] > w[0]));
    assert!(floats(&v["r"]).iter().all(|&r| r > 0.0));
    assert_eq!(floats(&v["h"]).len(), t.len());
}

#[test]
fn flat_fiber_scan_has_nonpositive_mu() {
    let spec = "n=3;fiber=flat;h=sqrt(t^2+1);f=(4*ln(t^2+1)+2*t^2+1)/12";
    let json = warped_scan_json(spec, 1.0 / 3.0, 1.0 / 3.0, -3.0, 3.0, 31).unwrap();
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(floats(&v["t"]).len(), 31);
    assert!(floats(&v["mu"]).iter().all(|&m| m <= 1e-6));
    assert!(floats(&v["soliton_residual"]).iter().all(|&r| r < 1e-8));
}

#[test]
fn sweep_marks_the_singular_value() {
    let v: Value = serde_json::from_str(&rho_sweep_json(3, 0.2, 0.3, 3, 5.0).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["error"].is_null());
    assert!((rows[1]["rho"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(rows[1]["error"].is_string());
}

#[test]
fn bad_inputs_are_errors() {
    assert!(warped_scan_json("n=3;h=", 0.0, 0.0, 0.0, 1.0, 5).is_err());
    assert!(warped_scan_json("n=3;fiber=flat;h=1;f=0", 0.0, 0.0, 1.0, 0.0, 5).is_err());
    assert!(rho_sweep_json(3, 0.0, 1.0, 0, 5.0).is_err());
    assert!(bryant_profile_json(3, 0.25, 0.0, 1.0, 5.0).is_err());
}
