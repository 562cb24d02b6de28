//! CSV ingestion for the two file formats: wide truth-table files
//! (`id,weight,D000,...`) and stratified count files with declared
//! exposure, stratum and count columns.

use std::io::Read;
use std::path::Path;

use crate::empirical::{Design, StratifiedCounts};
use crate::error::{Error, Result};
use crate::outcome::{Individual, OutcomeTable, Population, WeightMode};

fn parse_bit(field: &str, row: usize, what: &str) -> Result<bool> {
    match field.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::Parse {
            row,
            msg: format!("{what} must be 0 or 1, got `{other}`"),
        }),
    }
}

fn parse_count(field: &str, row: usize, what: &str) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        row,
        msg: format!("{what} must be a number, got `{field}`"),
    })?;
    if v < 0.0 || !v.is_finite() {
        return Err(Error::Parse {
            row,
            msg: format!("{what} must be nonnegative, got `{field}`"),
        });
    }
    Ok(v)
}

/// Reads a wide truth-table CSV: header `id,weight,D<bits>...` with one
/// column per assignment in index order.
pub fn read_truth_table<R: Read>(reader: R, mode: WeightMode) -> Result<Population> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse { row: 1, msg: e.to_string() })?
        .clone();
    if headers.len() < 3 || headers.get(0) != Some("id") || headers.get(1) != Some("weight") {
        return Err(Error::Parse {
            row: 1,
            msg: "truth-table header must start with id,weight".to_string(),
        });
    }
    let n_cols = headers.len() - 2;
    if !n_cols.is_power_of_two() {
        return Err(Error::Parse {
            row: 1,
            msg: format!("expected a power-of-two number of D columns, got {n_cols}"),
        });
    }
    let k = n_cols.trailing_zeros() as usize;
    for idx in 0..n_cols {
        let expected: String = format!(
            "D{}",
            (0..k)
                .map(|j| if idx >> (k - 1 - j) & 1 == 1 { '1' } else { '0' })
                .collect::<String>()
        );
        let got = headers.get(idx + 2).unwrap_or("");
        if got != expected {
            return Err(Error::Parse {
                row: 1,
                msg: format!("column {} must be `{expected}` (index order), got `{got}`", idx + 3),
            });
        }
    }

    let mut members = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                row,
                msg: format!("expected {} fields, got {}", headers.len(), record.len()),
            });
        }
        let id = record.get(0).unwrap_or("").to_string();
        if id.is_empty() {
            return Err(Error::Parse { row, msg: "empty id".to_string() });
        }
        if members.iter().any(|m: &Individual| m.id == id) {
            return Err(Error::Parse { row, msg: format!("duplicate id `{id}`") });
        }
        let weight = parse_count(record.get(1).unwrap_or(""), row, "weight")?;
        let outcomes = (0..n_cols)
            .map(|idx| parse_bit(record.get(idx + 2).unwrap_or(""), row, "outcome"))
            .collect::<Result<Vec<bool>>>()?;
        members.push(Individual {
            id,
            weight,
            table: OutcomeTable::new(k, outcomes)?,
        });
    }
    Population::new(members, mode)
}

pub fn read_truth_table_path(path: &Path, mode: WeightMode) -> Result<Population> {
    read_truth_table(std::fs::File::open(path)?, mode)
}

/// Reads a stratified counts CSV. Column roles are declared by the
/// caller: `exposures` are 0/1 columns, `strata` arbitrary label columns,
/// and the count columns are `cases,controls` (case-control) or
/// `events,total` (cohort).
pub fn read_counts<R: Read>(
    reader: R,
    design: Design,
    exposures: &[String],
    strata: &[String],
) -> Result<StratifiedCounts> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse { row: 1, msg: e.to_string() })?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse {
                row: 1,
                msg: format!("missing column `{name}`"),
            })
    };
    let exposure_cols = exposures.iter().map(|e| col(e)).collect::<Result<Vec<_>>>()?;
    let strata_cols = strata.iter().map(|s| col(s)).collect::<Result<Vec<_>>>()?;
    let (events_name, denom_name) = match design {
        Design::Cohort => ("events", "total"),
        Design::CaseControl => ("cases", "controls"),
    };
    let events_col = col(events_name)?;
    let denom_col = col(denom_name)?;

    let k = exposures.len();
    let mut counts = StratifiedCounts::new(k, exposures.to_vec(), strata.to_vec(), design)?;
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
        let mut assignment = 0usize;
        for (j, &c) in exposure_cols.iter().enumerate() {
            let bit = parse_bit(record.get(c).unwrap_or(""), row, &exposures[j])?;
            if bit {
                assignment |= 1 << (k - 1 - j);
            }
        }
        let stratum = if strata_cols.is_empty() {
            "*".to_string()
        } else {
            strata_cols
                .iter()
                .enumerate()
                .map(|(j, &c)| format!("{}={}", strata[j], record.get(c).unwrap_or("")))
                .collect::<Vec<_>>()
                .join(",")
        };
        let events = parse_count(record.get(events_col).unwrap_or(""), row, events_name)?;
        let denom = parse_count(record.get(denom_col).unwrap_or(""), row, denom_name)?;
        counts
            .insert_cell(stratum, assignment, events, denom)
            .map_err(|e| Error::Parse { row, msg: e.to_string() })?;
    }
    Ok(counts)
}

pub fn read_counts_path(
    path: &Path,
    design: Design,
    exposures: &[String],
    strata: &[String],
) -> Result<StratifiedCounts> {
    read_counts(std::fs::File::open(path)?, design, exposures, strata)
}
