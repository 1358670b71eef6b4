//! Comma-separated tables with a mandatory header and lossless 17-digit reals.

use std::path::Path;

use crate::error::{bad_arg, CliResult};

/// Scientific notation with 17 significant digits; parses back to the same bits.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_reals(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| real(*v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| bad_arg(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| bad_arg(e.to_string()))
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(String::from).collect();
        let rows = r.records().map(|rec| rec.map(|r| r.iter().map(String::from).collect())).collect::<Result<_, _>>()?;
        Ok(Self { header, rows })
    }

    /// Column `name` parsed as reals.
    pub fn column(&self, name: &str) -> CliResult<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name).ok_or_else(|| bad_arg(format!("no column `{name}`")))?;
        self.rows
            .iter()
            .map(|r| r[j].trim().parse::<f64>().map_err(|e| bad_arg(format!("column `{name}`: {e}"))))
            .collect()
    }
}

/// Reads a two-column (x, y) file. A header row is optional.
pub fn read_xy(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(bad_arg(format!("{}: line {} has {} fields, expected 2", path.display(), line + 1, rec.len())));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                x.push(a);
                y.push(b);
            }
            _ if line == 0 => continue,
            _ => return Err(bad_arg(format!("{}: line {} is not numeric", path.display(), line + 1))),
        }
    }
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn reals_round_trip_bit_exactly(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let mut t = Table::new(&["v"]);
            t.push_reals(&[v]);
            let back = Table::parse(&t.to_csv().unwrap()).unwrap().column("v").unwrap();
            prop_assert_eq!(back[0].to_bits(), v.to_bits());
        }
    }

    #[test]
    fn header_is_written() {
        let mut t = Table::new(&["a", "b"]);
        t.push_reals(&[1.0, 0.1]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n1.0000000000000000e0,1.0000000000000001e-1\n");
    }
}
