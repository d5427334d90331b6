#![allow(dead_code)]

use num_complex::Complex64;
use serde_json::Value;
use std::sync::OnceLock;

pub fn reference() -> &'static Value {
    static REF: OnceLock<Value> = OnceLock::new();
    REF.get_or_init(|| {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/reference.json");
        let text = std::fs::read_to_string(path).expect("reference fixture");
        serde_json::from_str(&text).expect("valid json")
    })
}

pub fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

pub fn cplx(v: &Value) -> Complex64 {
    Complex64::new(num(&v[0]), num(&v[1]))
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

pub fn crel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(1e-300)
}
