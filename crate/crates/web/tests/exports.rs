use ringrep_web::{decomposition_json, table_summary_json};
use serde_json::Value;

#[test]
fn reference_comparison_at_three() {
    let v: Value = serde_json::from_str(&table_summary_json(3, 2).unwrap()).unwrap();
    assert_eq!(v["order"], 648);
    assert_eq!(v["sum_of_squares"], 648);
    let rows = v["reference"]["rows"].as_array().unwrap();
    let bad: Vec<&Value> = rows.iter().filter(|r| r["status"] != "pass").collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0]["computed"], 12);
}

#[test]
fn level_one_has_no_reference() {
    let v: Value = serde_json::from_str(&table_summary_json(2, 1).unwrap()).unwrap();
    assert_eq!(v["order"], 6);
    assert!(v["reference"].is_null());
}

#[test]
fn outputs_are_stable() {
    assert_eq!(decomposition_json(2, "xtil").unwrap(), decomposition_json(2, "xtil").unwrap());
    assert_eq!(table_summary_json(2, 2).unwrap(), table_summary_json(2, 2).unwrap());
}
