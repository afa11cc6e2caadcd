//! The shared CSV dataset format.
//!
//! Header row `x1,...,xd[,label]`, one point per row, UTF-8, `.` decimal
//! separator, comma delimiter. The label column is optional and holds
//! non-negative integers. Every module that reads or writes point files uses
//! this format.

use std::path::Path;

use crate::dataset::{Dataset, Partition};
use crate::error::{Error, Result};

/// A dataset file: points plus an optional label column.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub dataset: Dataset,
    pub labels: Option<Vec<usize>>,
}

impl LabeledDataset {
    /// Interprets the label column as a partition with `k = max label + 1`.
    pub fn partition(&self) -> Option<Partition> {
        self.labels.as_ref().map(|labels| {
            let k = labels.iter().copied().max().map_or(1, |m| m + 1);
            Partition::new(labels.clone(), k)
        })
    }
}

/// Reads a dataset CSV, detecting the optional trailing `label` column.
pub fn read_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.is_empty() {
        return Err(Error::MalformedFile("empty header row".into()));
    }
    let has_label = *cols.last().unwrap() == "label";
    let dim = if has_label { cols.len() - 1 } else { cols.len() };
    if dim == 0 {
        return Err(Error::MalformedFile("no coordinate columns before `label`".into()));
    }
    for (j, name) in cols.iter().take(dim).enumerate() {
        let expected = format!("x{}", j + 1);
        if *name != expected {
            return Err(Error::MalformedFile(format!(
                "coordinate column {} is named `{name}`, expected `{expected}`",
                j + 1
            )));
        }
    }

    let mut coords = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != cols.len() {
            return Err(Error::MalformedFile(format!(
                "row {} has {} fields, expected {}",
                row + 1,
                record.len(),
                cols.len()
            )));
        }
        for field in record.iter().take(dim) {
            let value: f64 = field.trim().parse().map_err(|_| {
                Error::MalformedFile(format!("row {}: `{field}` is not a number", row + 1))
            })?;
            if !value.is_finite() {
                return Err(Error::MalformedFile(format!(
                    "row {}: non-finite coordinate {value}",
                    row + 1
                )));
            }
            coords.push(value);
        }
        if has_label {
            let field = &record[dim];
            let label: usize = field.trim().parse().map_err(|_| {
                Error::MalformedFile(format!(
                    "row {}: label `{field}` is not a non-negative integer",
                    row + 1
                ))
            })?;
            labels.push(label);
        }
    }
    let dataset = Dataset::from_flat(dim, coords)?;
    Ok(LabeledDataset { dataset, labels: if has_label { Some(labels) } else { None } })
}

/// Writes a dataset CSV; pass labels to append the `label` column.
pub fn write_csv(
    path: impl AsRef<Path>,
    dataset: &Dataset,
    labels: Option<&[usize]>,
) -> Result<()> {
    if let Some(labels) = labels {
        if labels.len() != dataset.len() {
            return Err(Error::InvalidParam(format!(
                "{} labels for {} points",
                labels.len(),
                dataset.len()
            )));
        }
    }
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header: Vec<String> = (1..=dataset.dim()).map(|j| format!("x{j}")).collect();
    if labels.is_some() {
        header.push("label".into());
    }
    writer.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for (i, p) in dataset.points().enumerate() {
        row.clear();
        row.extend(p.iter().map(|c| format_coord(*c)));
        if let Some(labels) = labels {
            row.push(labels[i].to_string());
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Shortest representation that parses back to the identical f64.
fn format_coord(c: f64) -> String {
    format!("{c}")
}
