//! CSV ingestion and export.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};

/// Which column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    /// Zero-based.
    Index(usize),
    Last,
}

impl LabelColumn {
    /// Interprets a command-line value: digits are a zero-based index,
    /// anything else a header name.
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_owned()),
        }
    }

    fn resolve(&self, header: Option<&csv::StringRecord>, width: usize) -> Result<usize> {
        let found = match self {
            LabelColumn::Last => width.checked_sub(1),
            LabelColumn::Name(name) => header.and_then(|h| h.iter().position(|c| c.trim() == name)),
            LabelColumn::Index(i) => (*i < width).then_some(*i),
        };
        found.ok_or_else(|| {
            Error::LabelColumnNotFound(match self {
                LabelColumn::Name(n) => format!("{n:?}"),
                LabelColumn::Index(i) => format!("{i} (input has {width} columns)"),
                LabelColumn::Last => "(last)".into(),
            })
        })
    }
}

/// Loads a CSV file. See [`read_csv`].
pub fn load_csv(path: &Path, label: &LabelColumn, has_header: bool) -> Result<LabeledDataset> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    read_csv(file, label, has_header)
}

/// Parses CSV from any reader. Feature cells must be finite numbers; the
/// label column is read as text. Row numbers in errors count data rows from 1.
pub fn read_csv<R: Read>(reader: R, label: &LabelColumn, has_header: bool) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_reader(reader);
    let header = if has_header {
        Some(rdr.headers()?.clone())
    } else {
        None
    };

    let mut records = rdr.records().peekable();
    let width = match (&header, records.peek()) {
        (Some(h), _) => h.len(),
        (None, Some(Ok(r))) => r.len(),
        (None, Some(Err(_))) => 0,
        (None, None) => return Err(Error::NoRows),
    };
    let label_col = label.resolve(header.as_ref(), width)?;
    if width < 2 {
        return Err(Error::NoFeatures);
    }

    let d = width - 1;
    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for (i, record) in records.enumerate() {
        let record = record?;
        let row = i + 1;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::RaggedRow {
                row,
                line,
                found: record.len(),
                expected: width,
            });
        }
        for (col, cell) in record.iter().enumerate() {
            if col == label_col {
                let l = cell.trim();
                if l.is_empty() {
                    return Err(Error::EmptyLabel { row, line });
                }
                raw_labels.push(l.to_owned());
            } else {
                match cell.trim().parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(v),
                    _ => {
                        return Err(Error::UnparseableCell {
                            row,
                            line,
                            column: col,
                            value: cell.to_owned(),
                        })
                    }
                }
            }
        }
    }
    if raw_labels.is_empty() {
        return Err(Error::NoRows);
    }
    let feature_names = header.map(|h| {
        h.iter()
            .enumerate()
            .filter(|&(c, _)| c != label_col)
            .map(|(_, name)| name.trim().to_owned())
            .collect()
    });
    let values = Array2::from_shape_vec((raw_labels.len(), d), values)
        .expect("row width was checked for every record");
    LabeledDataset::from_raw_labels(values, &raw_labels, feature_names)
}

/// Writes features followed by a `label` column, with a header row. Values
/// use the shortest representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(ds: &LabeledDataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..ds.n_features()).map(|j| ds.feature_name(j)).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (row, &label) in ds.values().rows().into_iter().zip(ds.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(ds.class_names()[label].clone());
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
