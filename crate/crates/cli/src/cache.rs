//! On-disk cache of character tables, one JSON file per `(n, q, r, format)`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ringrep::charkit::{CharacterTableJson, TABLE_FORMAT_VERSION};
use serde::Serialize;
use serde_json::Value;

pub const CACHE_ENV: &str = "RINGREP_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".ringrep-cache";

/// Explicit directory, else the environment variable, else the default.
pub fn cache_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

pub fn cache_file(dir: &Path, n: usize, q: u64, r: usize) -> PathBuf {
    dir.join(format!("sl{n}-q{q}-r{r}-v{TABLE_FORMAT_VERSION}.json"))
}

pub fn read(path: &Path) -> Result<Option<CharacterTableJson>, String> {
    match fs::read(path) {
        Ok(bytes) => serde_json::from_slice(&bytes).map(Some).map_err(|e| format!("{}: {e}", path.display())),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(format!("{}: {e}", path.display())),
    }
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn to_pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("reports serialize");
    bytes.push(b'\n');
    bytes
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Difference {
    /// JSON pointer into the table.
    pub path: String,
    pub cached: Value,
    pub computed: Value,
}

/// Leaf-level differences between two JSON documents, at most `limit`.
pub fn json_diff(cached: &Value, computed: &Value, limit: usize) -> Vec<Difference> {
    let mut out = Vec::new();
    walk("", cached, computed, limit, &mut out);
    out
}

fn walk(path: &str, a: &Value, b: &Value, limit: usize, out: &mut Vec<Difference>) {
    if out.len() >= limit || a == b {
        return;
    }
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                let (va, vb) = (x.get(k).unwrap_or(&Value::Null), y.get(k).unwrap_or(&Value::Null));
                walk(&format!("{path}/{k}"), va, vb, limit, out);
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                walk(&format!("{path}/{i}"), va, vb, limit, out);
            }
        }
        _ => out.push(Difference { path: path.to_string(), cached: a.clone(), computed: b.clone() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn diff_reports_leaf_paths() {
        let a = json!({"group": {"order": 48}, "classes": [1, 2, 3]});
        let b = json!({"group": {"order": 24}, "classes": [1, 5, 3]});
        let d = json_diff(&a, &b, 10);
        let paths: Vec<&str> = d.iter().map(|x| x.path.as_str()).collect();
        assert_eq!(paths, ["/classes/1", "/group/order"]);
        assert!(json_diff(&a, &a, 10).is_empty());
        assert_eq!(json_diff(&a, &b, 1).len(), 1);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("x.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn file_name_carries_the_key() {
        let p = cache_file(Path::new("c"), 2, 3, 2);
        assert_eq!(p, Path::new("c").join(format!("sl2-q3-r2-v{TABLE_FORMAT_VERSION}.json")));
    }
}
