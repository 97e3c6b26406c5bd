use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use super::{ArrayError, Dataset, Matrix};

/// Which CSV column carries the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Bare integers select by position, anything else by header name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

impl std::fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelColumn::Name(n) => write!(f, "{n}"),
            LabelColumn::Index(i) => write!(f, "{i}"),
        }
    }
}

/// Reads a headed CSV file. Feature columns keep their file order; rows are
/// reported 1-based counting data rows only.
pub fn load_csv(path: impl AsRef<Path>, label_column: &LabelColumn) -> Result<Dataset, ArrayError> {
    let (points, labels) = read_csv(path.as_ref(), Some(label_column))?;
    Dataset::new(points, labels)
}

/// Reads a headed CSV file in which every column is a feature.
pub fn load_csv_unlabeled(path: impl AsRef<Path>) -> Result<Matrix, ArrayError> {
    read_csv(path.as_ref(), None).map(|(points, _)| points)
}

fn read_csv(path: &Path, label_column: Option<&LabelColumn>) -> Result<(Matrix, Vec<usize>), ArrayError> {
    let file = File::open(path).map_err(|source| ArrayError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = match label_column {
        None => None,
        Some(LabelColumn::Name(name)) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| ArrayError::UnknownLabelColumn(name.clone()))?,
        ),
        Some(LabelColumn::Index(i)) if *i < headers.len() => Some(*i),
        Some(LabelColumn::Index(i)) => return Err(ArrayError::UnknownLabelColumn(i.to_string())),
    };
    let cols = headers.len();
    let features = cols - usize::from(label_idx.is_some());
    if features < 1 {
        return Err(ArrayError::InvalidParameter(
            "need at least one feature column besides the label".into(),
        ));
    }

    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record?;
        if record.len() != cols {
            return Err(ArrayError::RaggedRow {
                row,
                expected: cols,
                found: record.len(),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            if Some(c) == label_idx {
                let label = cell.parse::<usize>().map_err(|_| ArrayError::BadLabel {
                    row,
                    column: headers[c].clone(),
                    value: cell.to_string(),
                })?;
                labels.push(label);
            } else {
                let v = cell.parse::<f64>().map_err(|_| ArrayError::NonNumeric {
                    row,
                    column: headers[c].clone(),
                    value: cell.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(ArrayError::NonFinite { row, column: c });
                }
                data.push(v);
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(ArrayError::NoDataRows);
    }
    Ok((Matrix::new(rows, features, data)?, labels))
}

/// Writes `x0..x{d-1}` feature columns followed by the label column. Values use
/// the shortest decimal form that parses back to the identical double.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>, label_name: &str) -> Result<(), ArrayError> {
    write_csv(dataset.points(), Some((dataset.labels(), label_name)), path.as_ref())
}

/// Writes `x0..x{d-1}` feature columns only.
pub fn save_csv_unlabeled(points: &Matrix, path: impl AsRef<Path>) -> Result<(), ArrayError> {
    write_csv(points, None, path.as_ref())
}

fn write_csv(points: &Matrix, labels: Option<(&[usize], &str)>, path: &Path) -> Result<(), ArrayError> {
    let io_err = |source| ArrayError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut header: Vec<String> = (0..points.cols()).map(|j| format!("x{j}")).collect();
    if let Some((_, name)) = labels {
        header.push(name.to_string());
    }
    let mut out = header.join(",");
    out.push('\n');
    for (i, row) in points.iter_rows().enumerate() {
        let mut cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        if let Some((l, _)) = labels {
            cells.push(l[i].to_string());
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let mut f = File::create(path).map_err(io_err)?;
    f.write_all(out.as_bytes()).map_err(io_err)
}
