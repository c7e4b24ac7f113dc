//! Trial and cohort CSV files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crossover_core::simulation::BaselineCohort;
use crossover_core::{Matrix, Sequence, TrialDataset};

use crate::error::CliError;

const COVARIATE_PREFIX: &str = "x_";
pub const MIN_TRIAL_ROWS: usize = 4;

/// A parsed trial file: the dataset plus what the dataset does not carry.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTable {
    pub data: TrialDataset,
    /// Covariate names without the `x_` prefix, in header order.
    pub covariate_names: Vec<String>,
    pub ids: Option<Vec<String>>,
}

struct Cells {
    source: String,
    lines: Vec<u64>,
    /// `columns[j][i]`: value of column `j` in data row `i`, `None` if blank.
    columns: Vec<Vec<Option<f64>>>,
}

fn parse_error(source: &str, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse { source_name: source.to_string(), line, message: message.into() }
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

/// Read numeric columns `wanted` (by header index) from every record.
/// Header is line 1.
fn read_cells<R: Read>(
    reader: &mut csv::Reader<R>,
    source: &str,
    wanted: &[usize],
    mut text_column: Option<(usize, &mut Vec<String>)>,
) -> Result<Cells, CliError> {
    let mut lines = Vec::new();
    let mut columns = vec![Vec::new(); wanted.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(source, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        for (col, &j) in columns.iter_mut().zip(wanted) {
            let raw = record.get(j).unwrap_or("").trim();
            if raw.is_empty() {
                col.push(None);
                continue;
            }
            let value: f64 = raw
                .parse()
                .map_err(|_| parse_error(source, line, format!("`{raw}` is not a number")))?;
            if !value.is_finite() {
                return Err(parse_error(source, line, format!("`{raw}` is not finite")));
            }
            col.push(Some(value));
        }
        if let Some((j, ids)) = text_column.as_mut() {
            ids.push(record.get(*j).unwrap_or("").trim().to_string());
        }
        lines.push(line);
    }
    Ok(Cells { source: source.to_string(), lines, columns })
}

fn mode(values: &[Option<f64>]) -> Option<f64> {
    let mut counts: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for v in values.iter().flatten() {
        counts.entry(v.to_bits()).or_insert((*v, 0)).1 += 1;
    }
    // ties go to the smallest value
    counts
        .into_values()
        .fold(None, |best: Option<(f64, usize)>, (v, c)| match best {
            Some((bv, bc)) if bc > c || (bc == c && bv <= v) => Some((bv, bc)),
            _ => Some((v, c)),
        })
        .map(|(v, _)| v)
}

impl Cells {
    fn require(&self, col: usize, what: &str) -> Result<Vec<f64>, CliError> {
        self.columns[col]
            .iter()
            .zip(&self.lines)
            .map(|(v, &line)| v.ok_or_else(|| parse_error(&self.source, line, format!("missing {what}"))))
            .collect()
    }

    fn covariate(&self, col: usize, name: &str, fill: Option<f64>) -> Result<Vec<f64>, CliError> {
        match fill {
            Some(f) => Ok(self.columns[col].iter().map(|v| v.unwrap_or(f)).collect()),
            None => self.require(col, &format!("covariate `{name}`")),
        }
    }
}

fn header_of<R: Read>(reader: &mut csv::Reader<R>, source: &str) -> Result<Vec<String>, CliError> {
    let header = reader.headers().map_err(|e| parse_error(source, 1, e.to_string()))?;
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(parse_error(source, 1, format!("duplicate column `{name}`")));
        }
    }
    Ok(names)
}

fn covariate_columns(header: &[String], source: &str, known: &[&str]) -> Result<Vec<(usize, String)>, CliError> {
    let mut out = Vec::new();
    for (j, name) in header.iter().enumerate() {
        if let Some(stripped) = name.strip_prefix(COVARIATE_PREFIX) {
            if stripped.is_empty() {
                return Err(parse_error(source, 1, "covariate column needs a name after `x_`"));
            }
            out.push((j, stripped.to_string()));
        } else if !known.contains(&name.as_str()) {
            return Err(parse_error(source, 1, format!("unexpected column `{name}`")));
        }
    }
    Ok(out)
}

fn position(header: &[String], name: &str, source: &str) -> Result<usize, CliError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| parse_error(source, 1, format!("missing required column `{name}`")))
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader)
}

/// Parse a trial CSV (`arm,y1,y2`, optional `x_*` and `id`).
///
/// Blank covariate cells are a parse error unless `impute_mode` is set, in
/// which case each column's most frequent value is used.
pub fn read_trial_csv<R: Read>(reader: R, source: &str, pi1: f64, impute_mode: bool) -> Result<TrialTable, CliError> {
    let mut reader = csv_reader(reader);
    let header = header_of(&mut reader, source)?;
    let arm = position(&header, "arm", source)?;
    let y1 = position(&header, "y1", source)?;
    let y2 = position(&header, "y2", source)?;
    let covs = covariate_columns(&header, source, &["arm", "y1", "y2", "id"])?;
    let id = header.iter().position(|h| h == "id");

    let mut wanted = vec![arm, y1, y2];
    wanted.extend(covs.iter().map(|(j, _)| *j));
    let mut ids = Vec::new();
    let cells = read_cells(&mut reader, source, &wanted, id.map(|j| (j, &mut ids)))?;
    let n = cells.lines.len();
    if n < MIN_TRIAL_ROWS {
        return Err(CliError::Data(format!("{source}: {n} data row(s), at least {MIN_TRIAL_ROWS} required")));
    }

    let arms = cells.require(0, "arm")?;
    let mut sequences = Vec::with_capacity(n);
    for (a, &line) in arms.iter().zip(&cells.lines) {
        let seq = match *a {
            v if v == 0.0 => Sequence::ControlFirst,
            v if v == 1.0 => Sequence::TreatFirst,
            v => return Err(parse_error(source, line, format!("arm must be 0 or 1, found {v}"))),
        };
        sequences.push(seq);
    }
    let y1 = cells.require(1, "outcome y1")?;
    let y2 = cells.require(2, "outcome y2")?;

    let mut x = Vec::with_capacity(n * covs.len());
    let mut columns = Vec::with_capacity(covs.len());
    for (k, (_, name)) in covs.iter().enumerate() {
        let fill = if impute_mode { mode(&cells.columns[3 + k]) } else { None };
        columns.push(cells.covariate(3 + k, name, fill)?);
    }
    for i in 0..n {
        x.extend(columns.iter().map(|c| c[i]));
    }
    let covariates = Matrix::new(n, covs.len(), x)?;
    let data = TrialDataset::from_columns(sequences, covariates, y1, y2, pi1)?;
    Ok(TrialTable {
        data,
        covariate_names: covs.into_iter().map(|(_, name)| name).collect(),
        ids: id.map(|_| ids),
    })
}

pub fn read_trial_file(path: &Path, pi1: f64, impute_mode: bool) -> Result<TrialTable, CliError> {
    read_trial_csv(open(path)?, &path.display().to_string(), pi1, impute_mode)
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Data(format!("writing CSV: {e}"))
}

/// Write a trial table in the layout [`read_trial_csv`] accepts.
pub fn write_trial_csv<W: Write>(writer: W, table: &TrialTable) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = Vec::new();
    if table.ids.is_some() {
        header.push("id".into());
    }
    header.extend(["arm", "y1", "y2"].map(String::from));
    header.extend(table.covariate_names.iter().map(|n| format!("{COVARIATE_PREFIX}{n}")));
    w.write_record(&header).map_err(csv_error)?;
    let data = &table.data;
    for i in 0..data.len() {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        if let Some(ids) = &table.ids {
            row.push(ids[i].clone());
        }
        row.push(data.sequences()[i].indicator().to_string());
        row.push(data.y1()[i].to_string());
        row.push(data.y2()[i].to_string());
        row.extend(data.covariates().row(i).iter().map(f64::to_string));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| CliError::Data(format!("writing CSV: {e}")))
}

/// Parse a cohort CSV (`y0` then `x_*`).
///
/// With `impute_mode`, blank cells in 0/1 columns become 0 and blank cells
/// elsewhere take the column's most frequent value.
pub fn read_cohort_csv<R: Read>(reader: R, source: &str, impute_mode: bool) -> Result<BaselineCohort, CliError> {
    let mut reader = csv_reader(reader);
    let header = header_of(&mut reader, source)?;
    let y0 = position(&header, "y0", source)?;
    let covs = covariate_columns(&header, source, &["y0", "id"])?;
    let mut wanted = vec![y0];
    wanted.extend(covs.iter().map(|(j, _)| *j));
    let cells = read_cells(&mut reader, source, &wanted, None)?;
    let n = cells.lines.len();
    if n == 0 {
        return Err(CliError::Data(format!("{source}: cohort has no rows")));
    }
    let outcome = cells.require(0, "baseline outcome y0")?;
    if let Some((_, &line)) = outcome.iter().zip(&cells.lines).find(|(v, _)| **v != 0.0 && **v != 1.0) {
        return Err(parse_error(source, line, "y0 must be 0 or 1"));
    }
    let mut columns = Vec::with_capacity(covs.len());
    for (k, (_, name)) in covs.iter().enumerate() {
        let col = &cells.columns[1 + k];
        let fill = if !impute_mode {
            None
        } else if col.iter().flatten().all(|&v| v == 0.0 || v == 1.0) {
            Some(0.0)
        } else {
            mode(col)
        };
        columns.push(cells.covariate(1 + k, name, fill)?);
    }
    let mut x = Vec::with_capacity(n * covs.len());
    for i in 0..n {
        x.extend(columns.iter().map(|c| c[i]));
    }
    let names = covs.into_iter().map(|(_, name)| name).collect();
    Ok(BaselineCohort::new(names, Matrix::new(n, columns.len(), x)?, outcome)?)
}

pub fn read_cohort_file(path: &Path, impute_mode: bool) -> Result<BaselineCohort, CliError> {
    read_cohort_csv(open(path)?, &path.display().to_string(), impute_mode)
}

pub fn write_cohort_csv<W: Write>(writer: W, cohort: &BaselineCohort) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["y0".to_string()];
    header.extend(cohort.covariate_names().iter().map(|n| format!("{COVARIATE_PREFIX}{n}")));
    w.write_record(&header).map_err(csv_error)?;
    for i in 0..cohort.len() {
        let mut row = vec![cohort.y0()[i].to_string()];
        row.extend(cohort.covariates().row(i).iter().map(f64::to_string));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| CliError::Data(format!("writing CSV: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_prefers_frequent_then_small() {
        assert_eq!(mode(&[Some(2.0), Some(1.0), Some(2.0), None]), Some(2.0));
        assert_eq!(mode(&[Some(3.0), Some(1.0)]), Some(1.0));
        assert_eq!(mode(&[None]), None);
    }
}
