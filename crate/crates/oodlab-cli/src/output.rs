//! CSV and JSON sidecar emission.
//!
//! The curve CSV schema is fixed: header `m,value,std_err,ci95_lo,ci95_hi,alpha`
//! with empty fields where a column does not apply, values printed with 12
//! significant digits, LF line endings. The sidecar records the command name
//! and every effective parameter, so a run can be re-executed from the
//! sidecar alone and reproduce identical CSV bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

/// Prints `x` with 12 significant digits, plain decimal where reasonable.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

fn opt12(x: Option<f64>) -> String {
    x.map(fmt12).unwrap_or_default()
}

/// One row of the standard curve schema.
pub struct CurveRow {
    pub m: usize,
    pub value: f64,
    pub std_err: Option<f64>,
    pub ci95_lo: Option<f64>,
    pub ci95_hi: Option<f64>,
    pub alpha: Option<f64>,
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("m,value,std_err,ci95_lo,ci95_hi,alpha\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.m,
            fmt12(row.value),
            opt12(row.std_err),
            opt12(row.ci95_lo),
            opt12(row.ci95_hi),
            opt12(row.alpha),
        ));
    }
    out
}

/// The bound comparison uses its own three-column schema.
pub fn bound_csv(rows: &[(usize, f64, f64)]) -> String {
    let mut out = String::from("m,true_error,upper_bound\n");
    for (m, true_error, upper_bound) in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            m,
            fmt12(*true_error),
            fmt12(*upper_bound)
        ));
    }
    out
}

/// Serialized run record: the invoked command, its effective parameters, and
/// optional derived quantities (ignored on re-execution).
#[derive(Debug, Serialize)]
pub struct RunRecord<'a, P: Serialize> {
    pub command: &'a str,
    pub params: &'a P,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived: Option<serde_json::Value>,
}

pub fn write_outputs<P: Serialize>(
    out_base: &str,
    record: &RunRecord<'_, P>,
    csv: &str,
    svg: Option<&str>,
) -> Result<(), String> {
    let base = Path::new(out_base);
    if let Some(parent) = base.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| format!("creating {parent:?}: {e}"))?;
        }
    }
    write_file(&base.with_extension("csv"), csv.as_bytes())?;
    let sidecar =
        serde_json::to_string_pretty(record).map_err(|e| format!("serializing sidecar: {e}"))?;
    write_file(
        &base.with_extension("json"),
        format!("{sidecar}\n").as_bytes(),
    )?;
    if let Some(svg) = svg {
        write_file(&base.with_extension("svg"), svg.as_bytes())?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let mut file = fs::File::create(path).map_err(|e| format!("creating {path:?}: {e}"))?;
    file.write_all(bytes)
        .map_err(|e| format!("writing {path:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(0.3094112345678901), "0.309411234568");
        assert_eq!(fmt12(28.0), "28.0000000000");
        assert_eq!(fmt12(-0.5), "-0.500000000000");
        assert_eq!(fmt12(1.0e-7), "1.00000000000e-7");
    }

    #[test]
    fn csv_schema_and_empty_fields() {
        let rows = vec![CurveRow {
            m: 28,
            value: 0.25,
            std_err: None,
            ci95_lo: None,
            ci95_hi: None,
            alpha: Some(0.5),
        }];
        let csv = curve_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "m,value,std_err,ci95_lo,ci95_hi,alpha"
        );
        assert_eq!(lines.next().unwrap(), "28,0.250000000000,,,,0.500000000000");
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }
}
