//! CSV tables: a `# config: <json>` line, a header row, then the body.

use std::io::Write;

use msa_core::MaybeInfinite;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<MaybeInfinite> for Cell {
    fn from(v: MaybeInfinite) -> Self {
        match v {
            MaybeInfinite::Finite(x) => Cell::Num(x),
            MaybeInfinite::Infinite => Cell::Num(f64::INFINITY),
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Num(v.unwrap_or(f64::NAN))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Shortest round-trip decimal, in exponent form outside [10⁻⁴, 10¹⁵);
/// infinities as `inf`/`-inf`, NaN as `nan`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, config_json: &str, mut out: W) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io(e.to_string());
        writeln!(out, "# config: {config_json}").map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(csv_err)?;
        }
        w.flush().map_err(io)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_and_sentinels() {
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(2.5e-7), "2.5e-7");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-3e20), "-3e20");
        for v in [1.2345678901234567e-9, 0.00047, 123456.789] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(Cell::from(MaybeInfinite::Infinite).render(), "inf");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["alpha", "note"]);
        t.push(vec![3.0.into(), "a,b".into()]);
        let mut buf = Vec::new();
        t.write_csv("{\"x\":1}", &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# config: {\"x\":1}\nalpha,note\n3,\"a,b\"\n"
        );
    }
}
