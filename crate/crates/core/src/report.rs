//! Text formats: sweep CSV, count CSV and JSON documents.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SweepRecord;
use crate::qmath::ComplexMatrix;
use crate::tomography::CountRecord;

pub const SWEEP_HEADER: [&str; 7] = ["phi_X_deg", "phi_Y_deg", "phi_A_deg", "F_H", "F_chi", "P_S", "feasible"];

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `printf("%.12g")`: twelve significant digits, trailing zeros trimmed,
/// exponent form outside `[1e-4, 1e12)`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in records {
        w.write_record([
            format_sig(r.phi_x_deg),
            opt(r.phi_y_deg),
            opt(r.phi_a_deg),
            opt(r.f_h),
            opt(r.f_chi),
            opt(r.p_s),
            r.feasible.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn sweep_csv(records: &[SweepRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_sweep_csv(records, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(SWEEP_HEADER) {
        return Err(Error::Format(format!("unexpected sweep header {header:?}")));
    }
    rdr.deserialize()
        .map(|row| {
            let r: SweepRecord = row?;
            let metrics = [r.phi_y_deg, r.phi_a_deg, r.f_h, r.f_chi, r.p_s];
            if metrics.iter().any(|m| m.is_some() != r.feasible) {
                return Err(Error::Format(format!(
                    "row at phi_X = {} mixes feasibility and metric fields",
                    r.phi_x_deg
                )));
            }
            Ok(r)
        })
        .collect()
}

pub fn write_counts_csv<W: Write>(counts: &[CountRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in counts {
        w.serialize(c)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_counts_csv<R: Read>(input: R) -> Result<Vec<CountRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let counts = rdr
        .deserialize()
        .collect::<std::result::Result<Vec<CountRecord>, _>>()?;
    for c in &counts {
        c.cell()?;
    }
    Ok(counts)
}

/// Complex matrix as separate real and imaginary row-major arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let rows = 0..m.rows();
        Self {
            re: rows.clone().map(|i| m.row(i).iter().map(|c| c.re).collect()).collect(),
            im: rows.map(|i| m.row(i).iter().map(|c| c.im).collect()).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(m: &MatrixJson) -> Result<Self> {
        let rows = m.re.len();
        let cols = m.re.first().map_or(0, Vec::len);
        if m.im.len() != rows || m.re.iter().chain(&m.im).any(|r| r.len() != cols) {
            return Err(Error::Format("ragged matrix".into()));
        }
        ComplexMatrix::new(
            rows,
            cols,
            m.re.iter()
                .flatten()
                .zip(m.im.iter().flatten())
                .map(|(&re, &im)| crate::qmath::c64(re, im))
                .collect(),
        )
    }
}

/// Top-level JSON document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Document<C, R> {
    pub config: C,
    pub results: R,
    pub version: String,
}

impl<C: Serialize, R: Serialize> Document<C, R> {
    pub fn new(config: C, results: R) -> Self {
        Self {
            config,
            results,
            version: VERSION.to_string(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::c64;

    #[test]
    fn significant_digits() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.333333333333"),
            (0.888_276_543_210_987_6, "0.888276543211"),
            (20.0, "20"),
            (123456789012.7, "123456789013"),
            (1e12, "1e+12"),
            (1.5e-7, "1.5e-07"),
            (0.0001, "0.0001"),
            (9.9999999999999e-6, "1e-05"),
            (0.010684809145487, "0.0106848091455"),
        ];
        for (x, want) in cases {
            assert_eq!(format_sig(x), want, "{x}");
        }
    }

    #[test]
    fn sweep_round_trip() {
        let records = vec![
            SweepRecord {
                phi_x_deg: 0.0,
                phi_y_deg: None,
                phi_a_deg: None,
                f_h: None,
                f_chi: None,
                p_s: None,
                feasible: false,
            },
            SweepRecord {
                phi_x_deg: 19.6875,
                phi_y_deg: Some(-17.5),
                phi_a_deg: Some(41.25),
                f_h: Some(0.8123456789012345),
                f_chi: Some(0.888),
                p_s: Some(0.0112),
                feasible: true,
            },
        ];
        let text = sweep_csv(&records).unwrap();
        assert!(text.starts_with("phi_X_deg,phi_Y_deg,phi_A_deg,F_H,F_chi,P_S,feasible\n0,,,,,,false\n"));
        let back = read_sweep_csv(text.as_bytes()).unwrap();
        assert_eq!(back[0], records[0]);
        assert!((back[1].f_h.unwrap() - records[1].f_h.unwrap()).abs() < 1e-12);
        assert_eq!(sweep_csv(&back).unwrap(), text);
    }

    #[test]
    fn sweep_rejects_inconsistent_rows() {
        let text = "phi_X_deg,phi_Y_deg,phi_A_deg,F_H,F_chi,P_S,feasible\n1,2,3,,0.5,0.1,true\n";
        assert!(read_sweep_csv(text.as_bytes()).is_err());
        assert!(read_sweep_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn counts_round_trip() {
        let counts = vec![
            CountRecord {
                input_idx: 0,
                basis_idx: 8,
                outcome_idx: 3,
                count: 17,
            },
            CountRecord {
                input_idx: 35,
                basis_idx: 0,
                outcome_idx: 0,
                count: 0,
            },
        ];
        let mut buf = Vec::new();
        write_counts_csv(&counts, &mut buf).unwrap();
        assert!(buf.starts_with(b"input_idx,basis_idx,outcome_idx,count\n0,8,3,17\n"));
        assert_eq!(read_counts_csv(buf.as_slice()).unwrap(), counts);
        let bad = "input_idx,basis_idx,outcome_idx,count\n36,0,0,1\n";
        assert!(read_counts_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn matrix_json() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| c64(i as f64, -(j as f64)));
        let j = MatrixJson::from(&m);
        assert_eq!(j.re, vec![vec![0.0; 3], vec![1.0; 3]]);
        assert_eq!(j.im[1], vec![0.0, -1.0, -2.0]);
        assert_eq!(ComplexMatrix::try_from(&j).unwrap(), m);
        let doc = Document::new("cfg", &j).to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["results"]["im"][1][2], -2.0);
    }
}
