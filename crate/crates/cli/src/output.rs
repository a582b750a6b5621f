use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Row sink on standard output: JSON lines or CSV with a header taken from
/// the first row's field names.
pub struct Emitter {
    format: Format,
    csv: Option<csv::Writer<io::Stdout>>,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        let csv = (format == Format::Csv).then(|| csv::Writer::from_writer(io::stdout()));
        Self { format, csv }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn row<T: Serialize>(&mut self, row: &T) -> io::Result<()> {
        match &mut self.csv {
            Some(w) => w.serialize(row).map_err(io::Error::other),
            None => {
                let line = serde_json::to_string(row).map_err(io::Error::other)?;
                writeln!(io::stdout().lock(), "{line}")
            }
        }
    }

    pub fn finish(mut self) -> io::Result<()> {
        if let Some(w) = &mut self.csv {
            w.flush()?;
        }
        io::stdout().flush()
    }
}
