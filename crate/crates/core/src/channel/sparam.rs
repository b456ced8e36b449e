//! Single-frequency S-parameter CSV documents.
//!
//! ```text
//! # sparam v1, f_hz=13560000, n_tx=8, n_rx=8
//! row,col,re,im
//! 1,1,1.0e0,0.0e0
//! ...
//! ```
//!
//! Ports `1..=n_tx` are transmit ports and `n_tx+1..=n_tx+n_rx` receive
//! ports. Every one of the `(n_tx+n_rx)²` entries must appear exactly once.
//! The `row,col,re,im` column header is optional and further `#` lines are
//! comments.

use std::path::Path;

use num_complex::Complex64;

use super::{ChannelMatrix, ChannelSource};
use crate::error::{Error, Result};
use crate::linalg::CMat;

#[derive(Debug, Clone, PartialEq)]
pub struct SParameterDocument {
    pub frequency: f64,
    pub n_tx: usize,
    pub n_rx: usize,
    /// Full `(n_tx + n_rx)²` scattering matrix.
    pub s: CMat,
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::SParameter(format!("line {line}: {msg}"))
}

fn parse_header(line_no: usize, line: &str) -> Result<(f64, usize, usize)> {
    let body = line
        .strip_prefix('#')
        .map(str::trim)
        .and_then(|b| b.strip_prefix("sparam v1"))
        .ok_or_else(|| bad(line_no, "expected header '# sparam v1, f_hz=<f>, n_tx=<N>, n_rx=<N>'"))?;
    let (mut f, mut nt, mut nr) = (None, None, None);
    for field in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| bad(line_no, format!("header field '{field}' is not key=value")))?;
        match k.trim() {
            "f_hz" => f = Some(v.trim().parse::<f64>().map_err(|e| bad(line_no, format!("f_hz: {e}")))?),
            "n_tx" => nt = Some(v.trim().parse::<usize>().map_err(|e| bad(line_no, format!("n_tx: {e}")))?),
            "n_rx" => nr = Some(v.trim().parse::<usize>().map_err(|e| bad(line_no, format!("n_rx: {e}")))?),
            other => return Err(bad(line_no, format!("unknown header field '{other}'"))),
        }
    }
    let f = f.ok_or_else(|| bad(line_no, "missing f_hz"))?;
    let nt = nt.ok_or_else(|| bad(line_no, "missing n_tx"))?;
    let nr = nr.ok_or_else(|| bad(line_no, "missing n_rx"))?;
    if !(f.is_finite() && f > 0.0) {
        return Err(bad(line_no, format!("f_hz must be positive, got {f}")));
    }
    if nt == 0 || nr == 0 {
        return Err(bad(line_no, "port counts must be at least 1"));
    }
    Ok((f, nt, nr))
}

impl SParameterDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::SParameter("empty document".into()))?;
        let (frequency, n_tx, n_rx) = parse_header(hl, header)?;
        let ports = n_tx + n_rx;
        let mut values: Vec<Option<Complex64>> = vec![None; ports * ports];
        for (no, line) in lines {
            if line.starts_with('#') || line.replace(' ', "") == "row,col,re,im" {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(bad(no, format!("expected 4 fields, found {}", parts.len())));
            }
            let row: usize = parts[0].parse().map_err(|e| bad(no, format!("row: {e}")))?;
            let col: usize = parts[1].parse().map_err(|e| bad(no, format!("col: {e}")))?;
            let re: f64 = parts[2].parse().map_err(|e| bad(no, format!("re: {e}")))?;
            let im: f64 = parts[3].parse().map_err(|e| bad(no, format!("im: {e}")))?;
            if row == 0 || row > ports || col == 0 || col > ports {
                return Err(bad(no, format!("entry ({row}, {col}) outside 1..={ports}")));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(bad(no, format!("entry ({row}, {col}) is not finite")));
            }
            let slot = &mut values[(row - 1) * ports + (col - 1)];
            if slot.is_some() {
                return Err(bad(no, format!("duplicate entry ({row}, {col})")));
            }
            *slot = Some(Complex64::new(re, im));
        }
        if let Some(idx) = values.iter().position(Option::is_none) {
            return Err(Error::SParameter(format!(
                "missing entry ({}, {})",
                idx / ports + 1,
                idx % ports + 1
            )));
        }
        let s = CMat::from_fn(ports, ports, |i, j| values[i * ports + j].expect("checked above"));
        Ok(SParameterDocument { frequency, n_tx, n_rx, s })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# sparam v1, f_hz={}, n_tx={}, n_rx={}\nrow,col,re,im\n", self.frequency, self.n_tx, self.n_rx);
        for i in 0..self.s.nrows() {
            for j in 0..self.s.ncols() {
                let z = self.s[(i, j)];
                out.push_str(&format!("{},{},{:.17e},{:.17e}\n", i + 1, j + 1, z.re, z.im));
            }
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Document whose receive-by-transmit quarter is `h` and whose remaining
    /// blocks are given by `rest(row, col)` (0-based port indices).
    pub fn embedding(h: &CMat, frequency: f64, rest: impl Fn(usize, usize) -> Complex64) -> Self {
        let (n_rx, n_tx) = h.shape();
        let ports = n_tx + n_rx;
        let s = CMat::from_fn(ports, ports, |i, j| {
            if i >= n_tx && j < n_tx {
                h[(i - n_tx, j)]
            } else {
                rest(i, j)
            }
        });
        SParameterDocument { frequency, n_tx, n_rx, s }
    }
}

/// Extracts rows `N_t+1..N_t+N_r`, columns `1..N_t`.
pub fn import_s_parameters(doc: &SParameterDocument) -> Result<ChannelMatrix> {
    let ports = doc.n_tx + doc.n_rx;
    if doc.s.shape() != (ports, ports) {
        return Err(Error::SParameter(format!(
            "matrix is {:?} but header declares {ports} ports",
            doc.s.shape()
        )));
    }
    let h = doc.s.view((doc.n_tx, 0), (doc.n_rx, doc.n_tx)).into_owned();
    ChannelMatrix::from_matrix(h, doc.frequency, ChannelSource::Imported)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_h() -> CMat {
        CMat::from_fn(3, 2, |i, j| Complex64::new(0.1 * i as f64 - 0.3, 1.0 / (j as f64 + 3.0)))
    }

    #[test]
    fn identity_gives_zero_channel() {
        let doc = SParameterDocument { frequency: 1e6, n_tx: 2, n_rx: 3, s: CMat::identity(5, 5) };
        let ch = import_s_parameters(&doc).unwrap();
        assert_eq!(ch.h, CMat::zeros(3, 2));
        assert_eq!(ch.source, ChannelSource::Imported);
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let h = sample_h();
        let doc = SParameterDocument::embedding(&h, 13.56e6, |i, j| Complex64::new((i * 7 + j) as f64 / 3.0, -0.1));
        let back = SParameterDocument::parse(&doc.to_csv()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(import_s_parameters(&back).unwrap().h, h);
    }

    #[test]
    fn missing_entry_is_named() {
        let doc = SParameterDocument::embedding(&sample_h(), 1e6, |_, _| Complex64::new(0.0, 0.0));
        let text: String = doc.to_csv().lines().filter(|l| !l.starts_with("2,4,")).map(|l| format!("{l}\n")).collect();
        match SParameterDocument::parse(&text) {
            Err(Error::SParameter(msg)) => assert_eq!(msg, "missing entry (2, 4)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_documents_rejected() {
        let good = SParameterDocument::embedding(&sample_h(), 1e6, |_, _| Complex64::new(0.0, 0.0)).to_csv();
        assert!(SParameterDocument::parse("").is_err());
        assert!(SParameterDocument::parse(&good.replacen("sparam v1", "sparam v2", 1)).is_err());
        assert!(SParameterDocument::parse(&good.replacen("n_tx=2", "n_tx=3", 1)).is_err());
        assert!(SParameterDocument::parse(&format!("{good}1,1,0,0\n")).is_err());
        let nan: String = good
            .lines()
            .map(|l| if l.starts_with("1,1,") { "1,1,NaN,0\n".to_string() } else { format!("{l}\n") })
            .collect();
        assert!(matches!(SParameterDocument::parse(&nan), Err(Error::SParameter(m)) if m.contains("not finite")));
        assert!(SParameterDocument::parse(&format!("{good}9,1,0,0\n")).is_err());
    }
}
