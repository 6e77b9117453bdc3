//! WebAssembly entry points for the static demo page in `www/`.
//!
//! Every export returns a JSON string. The `*_json` functions hold the
//! logic and are what the native tests exercise; the exports only turn
//! errors into JS exceptions.

use ringrep::charkit::SlTable;
use ringrep::dims::{compare_dimensions, DimensionReport};
use ringrep::dlgeom::{degree_counts, DecompositionReport, DlContext, ItemizationRow, Variety};
use ringrep::gfield::ambient_tower;
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn check_q(q: u32) -> Result<u64, String> {
    match q {
        2 | 3 => Ok(q as u64),
        _ => Err(format!("q = {q}: the demo runs q = 2 or 3")),
    }
}

#[derive(Serialize)]
struct TableSummary {
    q: u64,
    r: usize,
    order: usize,
    classes: usize,
    /// `(degree, count)` pairs, increasing degree.
    degrees: Vec<(u64, usize)>,
    sum_of_squares: u64,
    /// Comparison with the reference level-two table.
    reference: Option<DimensionReport>,
}

pub fn table_summary_json(q: u32, r: u32) -> Result<String, String> {
    let q = check_q(q)?;
    let r = r as usize;
    if !(1..=2).contains(&r) {
        return Err(format!("r = {r}: the demo runs r = 1 or 2"));
    }
    let t = SlTable::compute(ambient_tower(q).map_err(|e| e.to_string())?, 2, q, r).map_err(|e| e.to_string())?;
    let degrees = t.table.degrees();
    let reference = if r == 2 { Some(compare_dimensions(q, &degrees).map_err(|e| e.to_string())?) } else { None };
    let summary = TableSummary {
        q,
        r,
        order: t.group.order(),
        classes: t.classes.len(),
        degrees: degree_counts(&t).into_iter().collect(),
        sum_of_squares: degrees.iter().map(|d| d * d).sum(),
        reference,
    };
    Ok(serde_json::to_string(&summary).expect("summary serializes"))
}

#[derive(Serialize)]
struct Decomposition {
    q: u64,
    variety: Variety,
    pieces: Vec<DecompositionReport>,
    checks: Vec<ItemizationRow>,
}

/// Isotypic pieces of one covering; `variety` is `xtil`, `xtil-prime` or `xtil-pp`.
pub fn decomposition_json(q: u32, variety: &str) -> Result<String, String> {
    let q = check_q(q)?;
    let variety = Variety::parse(variety).map_err(|e| e.to_string())?;
    let ctx = DlContext::new(q).map_err(|e| e.to_string())?;
    let run = || -> ringrep::Result<Decomposition> {
        let pieces = ctx.assemble_all(variety)?.iter().map(|vc| ctx.report(vc)).collect();
        let checks = match variety {
            Variety::Xtil => ctx.xtil_itemization()?,
            Variety::XtilPrime => ctx.xtil_prime_itemization()?,
            Variety::XtilPp => ctx.xtilpp_itemization()?,
        };
        Ok(Decomposition { q, variety, pieces, checks })
    };
    let d = run().map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&d).expect("decomposition serializes"))
}

#[wasm_bindgen]
pub fn table_summary(q: u32, r: u32) -> Result<String, JsValue> {
    table_summary_json(q, r).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn decomposition(q: u32, variety: &str) -> Result<String, JsValue> {
    decomposition_json(q, variety).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn summary_at_two() {
        let v: Value = serde_json::from_str(&table_summary_json(2, 2).unwrap()).unwrap();
        assert_eq!(v["order"], 48);
        assert_eq!(v["sum_of_squares"], 48);
        assert_eq!(v["degrees"], serde_json::json!([[1, 4], [2, 2], [3, 4]]));
        assert!(table_summary_json(5, 2).is_err());
        assert!(table_summary_json(2, 3).is_err());
    }

    #[test]
    fn nonsplit_pieces_at_three() {
        let v: Value = serde_json::from_str(&decomposition_json(3, "xtil-pp").unwrap()).unwrap();
        let pieces = v["pieces"].as_array().unwrap();
        assert_eq!(pieces.len(), 12);
        assert_eq!(pieces.iter().filter(|p| p["virtual_degree"] == 6).count(), 8);
        assert!(decomposition_json(3, "nope").is_err());
    }
}
