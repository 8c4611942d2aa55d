//! Browser bindings for the congruence-kernel engine.
//!
//! Each operation has a plain Rust function returning JSON (tested natively)
//! and a thin `wasm_bindgen` wrapper for the page in `www/`.

use congruence_kernel::algebra::graded_dims;
use congruence_kernel::group::{GroupParams, GroupTable};
use congruence_kernel::luck::{run_scan, ScanConfig, ScanKind};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest quotient the page will build; keeps the tab responsive.
pub const MAX_ORDER: u64 = 1 << 14;

fn checked(p: u64, d: usize, u: u32, t: u32) -> Result<GroupParams, String> {
    let params = GroupParams::new(p, d, u).map_err(|e| e.to_string())?;
    if t == 0 {
        return Err("level must be at least 1".into());
    }
    match params.order(t) {
        Some(n) if n <= MAX_ORDER => Ok(params),
        _ => Err(format!("quotient too large for the browser (limit {MAX_ORDER} elements)")),
    }
}

pub fn graded_dims_json(p: u64, d: usize, u: u32, t: u32) -> Result<String, String> {
    let params = checked(p, d, u, t)?;
    let dims = graded_dims(params, t).map_err(|e| e.to_string())?;
    let order = params.order(t).unwrap_or(0);
    Ok(json!({ "order": order, "dims": dims }).to_string())
}

pub fn depth_profile_json(p: u64, d: usize, u: u32, t: u32) -> Result<String, String> {
    let params = checked(p, d, u, t)?;
    let table = GroupTable::new(params, t).map_err(|e| e.to_string())?;
    Ok(json!({ "order": table.order(), "profile": table.depth_profile() }).to_string())
}

/// Runs a scan from a JSON config; `kind` is `scalar`, `extension` or `matrix`.
pub fn scan_json(kind: &str, config: &str) -> Result<String, String> {
    let kind = match kind {
        "scalar" => ScanKind::Scalar,
        "extension" => ScanKind::Extension,
        "matrix" => ScanKind::Matrix,
        other => return Err(format!("unknown scan kind {other:?}")),
    };
    let cfg = ScanConfig::from_json(config).map_err(|e| e.to_string())?;
    let top = cfg.levels[1] + cfg.j;
    checked(cfg.p, cfg.d, cfg.u, top.max(1))?;
    let report = run_scan(kind, &cfg).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = gradedDims)]
pub fn graded_dims_js(p: u32, d: u32, u: u32, t: u32) -> Result<String, JsValue> {
    graded_dims_json(p as u64, d as usize, u, t).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = depthProfile)]
pub fn depth_profile_js(p: u32, d: u32, u: u32, t: u32) -> Result<String, JsValue> {
    depth_profile_json(p as u64, d as usize, u, t).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = scan)]
pub fn scan_js(kind: &str, config: &str) -> Result<String, JsValue> {
    scan_json(kind, config).map_err(|e| JsValue::from_str(&e))
}
