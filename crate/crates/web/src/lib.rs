//! wasm-bindgen entry points. Each returns a JSON string; failures come
//! back as `{"error": {"kind", "message"}}`.

use drinfeld_core::jobs::{error_json, run_job, to_text, Job};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest x-precision accepted from the page.
pub const MAX_PREC: i64 = 64;

fn run(job: Job) -> String {
    match run_job(&job) {
        Ok(v) => to_text(&v),
        Err(e) => to_text(&json!({"error": error_json(&e)})),
    }
}

/// Φ^C_℘ and its reduction mod ℘.
#[wasm_bindgen]
pub fn carlitz_eisenstein(q: u32, wp: &str) -> String {
    run(Job::new("carlitz.eisenstein", q as u64).wp(wp))
}

/// The Taguchi dual of θ + a1 τ + a2 τ² over F_{q^(d·ext)}.
#[wasm_bindgen]
pub fn drinfeld_dual(q: u32, wp: &str, ext: u32, a1: &str, a2: &str) -> String {
    run(Job::new("drinfeld.dual", q as u64)
        .wp(wp)
        .param("ext", json!(ext))
        .param("a1", json!(a1))
        .param("a2", json!(a2)))
}

/// a1(x), a2(x), the exponential and the checks for TD(fΛ).
#[wasm_bindgen]
pub fn tate_expand(q: u32, wp: &str, f: &str, prec: i32) -> String {
    let prec = prec as i64;
    if !(1..=MAX_PREC).contains(&prec) {
        return to_text(&json!({"error": {"kind": "domain", "message": format!("precision must lie in 1..={MAX_PREC}")}}));
    }
    run(Job::new("tate.expand", q as u64).wp(wp).f(f).prec(prec))
}
