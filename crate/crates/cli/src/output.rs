use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use cvbell::bell::{BellSettings, MeasurementSetting};
use serde_json::{Map, Value};

use crate::{Format, OUT_DIR_ENV};

/// A header row and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Flattens settings into named columns: `*_theta, *_phi` for pseudospin,
/// `*_re, *_im` for displacements and `*_theta` for projector angles.
pub fn settings_columns(s: &BellSettings) -> (Vec<String>, Vec<f64>) {
    let mut names = Vec::new();
    let mut values = Vec::new();
    for (label, m) in [("a", s.a), ("a_prime", s.a_prime), ("b", s.b), ("b_prime", s.b_prime)] {
        match m {
            MeasurementSetting::Pseudospin(p) => {
                names.extend([format!("{label}_theta"), format!("{label}_phi")]);
                values.extend([p.theta, p.phi]);
            }
            MeasurementSetting::Displacement(d) => {
                names.extend([format!("{label}_re"), format!("{label}_im")]);
                values.extend([d.alpha.re, d.alpha.im]);
            }
            MeasurementSetting::Projector(p) => {
                names.push(format!("{label}_theta"));
                values.push(p.theta);
            }
        }
    }
    (names, values)
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn render_csv(table: &Table, stamp: bool) -> io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    if stamp {
        writeln!(buf, "# generated_unix={}", timestamp())?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|x| x.to_string()))?;
        }
        w.flush()?;
    }
    Ok(buf)
}

/// One JSON object with `config`, `results` and `diagnostics` keys.
pub fn render_json(config: Value, results: Value, diagnostics: Value, stamp: bool) -> io::Result<Vec<u8>> {
    let mut doc = Map::new();
    if stamp {
        doc.insert("generated_unix".into(), Value::from(timestamp()));
    }
    doc.insert("config".into(), config);
    doc.insert("results".into(), results);
    doc.insert("diagnostics".into(), diagnostics);
    let mut buf = serde_json::to_vec_pretty(&Value::Object(doc))?;
    buf.push(b'\n');
    Ok(buf)
}

/// Explicit path, then `$CVBELL_OUT_DIR/<default_name>`, then stdout.
pub fn destination(out: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    out.map(Path::to_path_buf).or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(default_name))
    })
}

pub fn emit(bytes: &[u8], dest: Option<PathBuf>) -> io::Result<()> {
    match dest {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, bytes)
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cvbell::Complex64;

    #[test]
    fn csv_without_stamp_is_header_then_rows() {
        let t = Table {
            columns: vec!["r".into(), "B".into()],
            rows: vec![vec![0.0, 2.0], vec![0.5, 2.1234567890123457]],
        };
        let s = String::from_utf8(render_csv(&t, false).unwrap()).unwrap();
        assert_eq!(s, "r,B\n0,2\n0.5,2.1234567890123457\n");
        let s = String::from_utf8(render_csv(&t, true).unwrap()).unwrap();
        assert!(s.starts_with("# generated_unix="));
    }

    #[test]
    fn json_has_required_keys() {
        let v: Value = serde_json::from_slice(&render_json(Value::Null, Value::Null, Value::Null, false).unwrap()).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["config", "diagnostics", "results"]);
    }

    #[test]
    fn displacement_columns() {
        let z = |x| Complex64::new(x, -x);
        let (names, values) = settings_columns(&BellSettings::displacements(z(1.0), z(2.0), z(3.0), z(4.0)));
        assert_eq!(names[0], "a_re");
        assert_eq!(names[7], "b_prime_im");
        assert_eq!(values[7], -4.0);
    }
}
