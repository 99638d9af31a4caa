//! Record sinks: RFC 4180 CSV or JSON lines, to stdout or a file.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::args::Format;

pub fn open(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// 17 significant digits, enough to round-trip any double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |i| format!("{prefix}{i}"))
}

/// A table written either as CSV (header plus string rows) or as one JSON
/// object per line.
pub struct Table<W: Write> {
    format: Format,
    csv: Option<csv::Writer<W>>,
    raw: Option<W>,
}

impl<W: Write> Table<W> {
    pub fn new(format: Format, sink: W, header: &[String]) -> io::Result<Self> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(sink);
                w.write_record(header)?;
                Ok(Self { format, csv: Some(w), raw: None })
            }
            Format::Json => Ok(Self { format, csv: None, raw: Some(sink) }),
        }
    }

    pub fn row<R: Serialize>(&mut self, cells: impl FnOnce() -> Vec<String>, record: &R) -> io::Result<()> {
        match self.format {
            Format::Csv => self.csv.as_mut().expect("csv writer").write_record(cells())?,
            Format::Json => {
                let w = self.raw.as_mut().expect("json writer");
                serde_json::to_writer(&mut *w, record)?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    /// Writes a trailing JSON line (JSON mode only).
    pub fn json_line<R: Serialize>(&mut self, record: &R) -> io::Result<()> {
        if let Some(w) = self.raw.as_mut() {
            serde_json::to_writer(&mut *w, record)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn finish(self) -> io::Result<()> {
        if let Some(mut w) = self.csv {
            w.flush()?;
        }
        if let Some(mut w) = self.raw {
            w.flush()?;
        }
        Ok(())
    }
}
