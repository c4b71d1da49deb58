//! Parsing, validation, normalization and alignment of the cohort inputs:
//! two expression matrices (features × samples) and one clinical table.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense features × samples matrix for a single modality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressionMatrix {
    pub modality_name: String,
    pub feature_ids: Vec<String>,
    pub sample_ids: Vec<String>,
    /// Row-major, `feature_ids.len()` rows by `sample_ids.len()` columns.
    values: Vec<f64>,
    pub transform_log: bool,
    pub transform_zscore: bool,
}

impl ExpressionMatrix {
    /// Builds a raw matrix from row vectors, checking ids and shape.
    pub fn from_rows(
        modality_name: impl Into<String>,
        feature_ids: Vec<String>,
        sample_ids: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_unique_ids("feature", &feature_ids)?;
        check_unique_ids("sample", &sample_ids)?;
        if feature_ids.is_empty() || sample_ids.is_empty() {
            return Err(Error::EmptyBody("matrix has no features or no samples".into()));
        }
        if rows.len() != feature_ids.len() {
            return Err(Error::RaggedRow {
                line: rows.len() + 1,
                expected: feature_ids.len(),
                found: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(feature_ids.len() * sample_ids.len());
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != sample_ids.len() {
                return Err(Error::RaggedRow {
                    line: r + 2,
                    expected: sample_ids.len() + 1,
                    found: row.len() + 1,
                });
            }
            for (c, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonNumeric {
                        line: r + 2,
                        column: c + 2,
                        value: v.to_string(),
                    });
                }
            }
            values.extend(row);
        }
        Ok(Self {
            modality_name: modality_name.into(),
            feature_ids,
            sample_ids,
            values,
            transform_log: false,
            transform_zscore: false,
        })
    }

    pub fn n_features(&self) -> usize {
        self.feature_ids.len()
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn get(&self, feature: usize, sample: usize) -> f64 {
        self.values[feature * self.n_samples() + sample]
    }

    pub fn row(&self, feature: usize) -> &[f64] {
        let n = self.n_samples();
        &self.values[feature * n..(feature + 1) * n]
    }

    pub fn feature_index(&self, id: &str) -> Option<usize> {
        self.feature_ids.iter().position(|f| f == id)
    }

    /// Serializes to the comma-separated layout accepted by
    /// [`parse_expression_matrix`]. Values use the shortest round-trip
    /// representation, so parsing the output reproduces every cell exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature_id");
        for s in &self.sample_ids {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for (f, id) in self.feature_ids.iter().enumerate() {
            out.push_str(id);
            for v in self.row(f) {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Applies `log2(x + 1)` and/or per-feature standardization.
    ///
    /// Standardization uses the sample standard deviation (n − 1); rows
    /// without variation become all-zero rows.
    pub fn normalize(&self, log_transform: bool, zscore: bool) -> Result<Self> {
        let mut out = self.clone();
        let n = self.n_samples();
        if log_transform {
            for (f, row) in out.values.chunks_mut(n).enumerate() {
                for v in row.iter_mut() {
                    if *v < 0.0 {
                        return Err(Error::NegativeForLog {
                            feature: self.feature_ids[f].clone(),
                            value: *v,
                        });
                    }
                    *v = (*v + 1.0).log2();
                }
            }
            out.transform_log = true;
        }
        if zscore {
            for row in out.values.chunks_mut(n) {
                let first = row[0];
                if n < 2 || row.iter().all(|&v| v == first) {
                    row.iter_mut().for_each(|v| *v = 0.0);
                    continue;
                }
                let mean = row.iter().sum::<f64>() / n as f64;
                let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                let sd = var.sqrt();
                row.iter_mut().for_each(|v| *v = (*v - mean) / sd);
            }
            out.transform_zscore = true;
        }
        Ok(out)
    }

    /// Restricts and reorders columns to `ids`, which must all be present.
    fn select_samples(&self, ids: &[String]) -> Self {
        let pos: HashMap<&str, usize> = self
            .sample_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let cols: Vec<usize> = ids.iter().map(|s| pos[s.as_str()]).collect();
        let mut values = Vec::with_capacity(self.n_features() * cols.len());
        for f in 0..self.n_features() {
            let row = self.row(f);
            values.extend(cols.iter().map(|&c| row[c]));
        }
        Self {
            modality_name: self.modality_name.clone(),
            feature_ids: self.feature_ids.clone(),
            sample_ids: ids.to_vec(),
            values,
            transform_log: self.transform_log,
            transform_zscore: self.transform_zscore,
        }
    }
}

fn check_unique_ids(kind: &'static str, ids: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if id.is_empty() {
            return Err(Error::InvalidField {
                line: 1,
                column: kind.to_string(),
                value: String::new(),
            });
        }
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId {
                kind,
                id: id.clone(),
            });
        }
    }
    Ok(())
}

/// Header-driven delimiter detection: tab if the header has one, else comma.
fn detect_delimiter(header: &str) -> char {
    if header.contains('\t') {
        '\t'
    } else {
        ','
    }
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn split_cells(line: &str, delim: char) -> Vec<&str> {
    line.split(delim).map(str::trim).collect()
}

fn parse_finite(cell: &str, line: usize, column: usize) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NonNumeric {
            line,
            column,
            value: cell.to_string(),
        }),
    }
}

/// Parses a delimiter-separated expression table: a header row whose first
/// cell names the feature-id column and whose remaining cells are sample
/// ids, followed by one row per feature.
pub fn parse_expression_matrix(text: &str, modality_name: &str) -> Result<ExpressionMatrix> {
    let mut lines = content_lines(text);
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::EmptyBody("no header row".into()))?;
    let delim = detect_delimiter(header);
    let header_cells = split_cells(header, delim);
    let sample_ids: Vec<String> = header_cells[1..].iter().map(|s| s.to_string()).collect();
    if sample_ids.is_empty() {
        return Err(Error::EmptyBody("header has no sample columns".into()));
    }
    check_unique_ids("sample", &sample_ids)?;

    let mut feature_ids = Vec::new();
    let mut rows = Vec::new();
    for (line_no, line) in lines {
        let cells = split_cells(line, delim);
        if cells.len() != header_cells.len() {
            return Err(Error::RaggedRow {
                line: line_no,
                expected: header_cells.len(),
                found: cells.len(),
            });
        }
        let row = cells[1..]
            .iter()
            .enumerate()
            .map(|(c, cell)| parse_finite(cell, line_no, c + 2))
            .collect::<Result<Vec<f64>>>()?;
        feature_ids.push(cells[0].to_string());
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyBody("no feature rows".into()));
    }
    check_unique_ids("feature", &feature_ids)?;
    ExpressionMatrix::from_rows(modality_name, feature_ids, sample_ids, rows)
}

/// One patient's clinical annotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClinicalRecord {
    pub sample_id: String,
    pub age: Option<f64>,
    pub tumor_grade: Option<u8>,
    pub survival_time: f64,
    /// `true` when the event (death) was observed, `false` when right-censored.
    pub event: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClinicalTable {
    records: Vec<ClinicalRecord>,
    index: HashMap<String, usize>,
}

impl ClinicalTable {
    pub fn from_records(records: Vec<ClinicalRecord>) -> Result<Self> {
        let mut index = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.survival_time < 0.0 || !r.survival_time.is_finite() {
                return Err(Error::NegativeSurvivalTime {
                    line: i + 2,
                    value: r.survival_time,
                });
            }
            if index.insert(r.sample_id.clone(), i).is_some() {
                return Err(Error::DuplicateId {
                    kind: "sample",
                    id: r.sample_id.clone(),
                });
            }
        }
        Ok(Self { records, index })
    }

    pub fn get(&self, sample_id: &str) -> Option<&ClinicalRecord> {
        self.index.get(sample_id).map(|&i| &self.records[i])
    }

    pub fn records(&self) -> &[ClinicalRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn sample_ids(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.sample_id.as_str())
    }

    pub fn event_count(&self) -> usize {
        self.records.iter().filter(|r| r.event).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_id,age,tumor_grade,survival_time,survival_status\n");
        for r in &self.records {
            let age = r.age.map(|a| a.to_string()).unwrap_or_default();
            let grade = r.tumor_grade.map(|g| g.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.sample_id,
                age,
                grade,
                r.survival_time,
                u8::from(r.event)
            ));
        }
        out
    }

    fn subset(&self, ids: &[String]) -> Self {
        let records: Vec<ClinicalRecord> = ids
            .iter()
            .map(|id| self.get(id).expect("id present").clone())
            .collect();
        let index = ids.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Self { records, index }
    }
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan")
}

/// Parses the clinical table. Required columns: `sample_id`,
/// `survival_time`, `survival_status`; optional: `age`, `tumor_grade`.
/// Unknown columns are ignored.
pub fn parse_clinical_table(text: &str) -> Result<ClinicalTable> {
    let mut lines = content_lines(text);
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::EmptyBody("no header row".into()))?;
    let delim = detect_delimiter(header);
    let cols = split_cells(header, delim);
    let find = |name: &str| cols.iter().position(|c| c.eq_ignore_ascii_case(name));
    let col_id = find("sample_id").ok_or_else(|| Error::MissingColumn("sample_id".into()))?;
    let col_time =
        find("survival_time").ok_or_else(|| Error::MissingColumn("survival_time".into()))?;
    let col_status =
        find("survival_status").ok_or_else(|| Error::MissingColumn("survival_status".into()))?;
    let col_age = find("age");
    let col_grade = find("tumor_grade");

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (line_no, line) in lines {
        let cells = split_cells(line, delim);
        if cells.len() != cols.len() {
            return Err(Error::RaggedRow {
                line: line_no,
                expected: cols.len(),
                found: cells.len(),
            });
        }
        let sample_id = cells[col_id].to_string();
        if sample_id.is_empty() {
            return Err(Error::InvalidField {
                line: line_no,
                column: "sample_id".into(),
                value: String::new(),
            });
        }
        if !seen.insert(sample_id.clone()) {
            return Err(Error::DuplicateId {
                kind: "sample",
                id: sample_id,
            });
        }
        let survival_time = parse_finite(cells[col_time], line_no, col_time + 1)?;
        if survival_time < 0.0 {
            return Err(Error::NegativeSurvivalTime {
                line: line_no,
                value: survival_time,
            });
        }
        let event = match cells[col_status] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::InvalidStatus {
                    line: line_no,
                    value: other.to_string(),
                })
            }
        };
        let age = match col_age.map(|c| cells[c]) {
            Some(cell) if !is_missing(cell) => match cell.parse::<f64>() {
                Ok(a) if a.is_finite() && a >= 0.0 => Some(a),
                _ => {
                    return Err(Error::InvalidField {
                        line: line_no,
                        column: "age".into(),
                        value: cell.to_string(),
                    })
                }
            },
            _ => None,
        };
        let tumor_grade = match col_grade.map(|c| cells[c]) {
            Some(cell) if !is_missing(cell) => Some(cell.parse::<u8>().map_err(|_| {
                Error::InvalidField {
                    line: line_no,
                    column: "tumor_grade".into(),
                    value: cell.to_string(),
                }
            })?),
            _ => None,
        };
        records.push(ClinicalRecord {
            sample_id,
            age,
            tumor_grade,
            survival_time,
            event,
        });
    }
    ClinicalTable::from_records(records)
}

/// Ids each source contributed that did not make it into the cohort.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub dropped_a: Vec<String>,
    pub dropped_b: Vec<String>,
    pub dropped_clinical: Vec<String>,
}

/// Three inputs restricted to their common samples, in sorted id order.
#[derive(Debug, Clone)]
pub struct Cohort {
    pub matrix_a: ExpressionMatrix,
    pub matrix_b: ExpressionMatrix,
    pub clinical: ClinicalTable,
    pub sample_ids: Vec<String>,
    pub report: AlignmentReport,
}

impl Cohort {
    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }
}

pub fn align_cohort(
    a: &ExpressionMatrix,
    b: &ExpressionMatrix,
    clinical: &ClinicalTable,
) -> Result<Cohort> {
    let set_a: BTreeSet<&str> = a.sample_ids.iter().map(String::as_str).collect();
    let set_b: BTreeSet<&str> = b.sample_ids.iter().map(String::as_str).collect();
    let set_c: BTreeSet<&str> = clinical.sample_ids().collect();
    let common: Vec<String> = set_a
        .iter()
        .filter(|s| set_b.contains(*s) && set_c.contains(*s))
        .map(|s| s.to_string())
        .collect();
    if common.len() < 2 {
        return Err(Error::CohortTooSmall(common.len()));
    }
    let keep: HashSet<&str> = common.iter().map(String::as_str).collect();
    let dropped = |ids: &mut dyn Iterator<Item = &str>| -> Vec<String> {
        let mut d: Vec<String> = ids.filter(|s| !keep.contains(s)).map(str::to_string).collect();
        d.sort();
        d
    };
    let report = AlignmentReport {
        dropped_a: dropped(&mut a.sample_ids.iter().map(String::as_str)),
        dropped_b: dropped(&mut b.sample_ids.iter().map(String::as_str)),
        dropped_clinical: dropped(&mut clinical.sample_ids()),
    };
    Ok(Cohort {
        matrix_a: a.select_samples(&common),
        matrix_b: b.select_samples(&common),
        clinical: clinical.subset(&common),
        sample_ids: common,
        report,
    })
}
