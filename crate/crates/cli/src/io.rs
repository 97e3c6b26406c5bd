use std::fs::File;
use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hullscope::arrays::{load_csv, load_csv_unlabeled, load_matrix, LabelColumn, HSM1_MAGIC};
use hullscope::{Dataset, Matrix};

use crate::UsageError;

pub struct Input {
    pub dataset: Dataset,
    pub labeled: bool,
}

fn is_hsm1(path: &Path) -> Result<bool> {
    let mut head = [0u8; 4];
    let mut file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let n = file.read(&mut head)?;
    Ok(n == 4 && head == HSM1_MAGIC)
}

fn split_label_column(m: &Matrix, col: usize, path: &Path) -> Result<Dataset> {
    if col >= m.cols() {
        bail!("{}: label column {col} out of range ({} columns)", path.display(), m.cols());
    }
    if m.cols() < 2 {
        bail!("{}: no feature columns besides the label", path.display());
    }
    let mut data = Vec::with_capacity(m.rows() * (m.cols() - 1));
    let mut labels = Vec::with_capacity(m.rows());
    for (i, row) in m.iter_rows().enumerate() {
        let v = row[col];
        if !(v >= 0.0 && v.fract() == 0.0 && v < u32::MAX as f64) {
            bail!("{}: row {}: label {v} is not a non-negative integer", path.display(), i + 1);
        }
        labels.push(v as usize);
        data.extend(row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| *x));
    }
    Ok(Dataset::new(Matrix::new(m.rows(), m.cols() - 1, data)?, labels)?)
}

/// Loads CSV or HSM1 (detected by magic bytes).
///
/// CSV files use the `label` column unless told otherwise; a file without
/// that column is read as unlabeled unless `require_labels`. HSM1 files carry
/// labels only when `label_col` names a column index.
pub fn load_input(path: &Path, label_col: Option<&str>, require_labels: bool) -> Result<Input> {
    if is_hsm1(path)? {
        let m = load_matrix(path).with_context(|| format!("cannot read {}", path.display()))?;
        return match label_col {
            Some(s) => {
                let col: usize = s
                    .parse()
                    .map_err(|_| UsageError(format!("HSM1 input {} needs a numeric --label-col, got {s:?}", path.display())))?;
                Ok(Input {
                    dataset: split_label_column(&m, col, path)?,
                    labeled: true,
                })
            }
            None if require_labels => Err(UsageError(format!(
                "{} is HSM1 and has no label column; pass --label-col <index>",
                path.display()
            ))
            .into()),
            None => Ok(Input {
                dataset: Dataset::unlabeled(m)?,
                labeled: false,
            }),
        };
    }
    let column: LabelColumn = label_col.unwrap_or("label").parse().unwrap();
    match load_csv(path, &column) {
        Ok(dataset) => Ok(Input { dataset, labeled: true }),
        Err(hullscope::arrays::ArrayError::UnknownLabelColumn(_)) if !require_labels => Ok(Input {
            dataset: Dataset::unlabeled(load_csv_unlabeled(path)?)?,
            labeled: false,
        }),
        Err(e) => Err(e).with_context(|| format!("cannot read {}", path.display())),
    }
}

pub fn load_labeled(path: &Path, label_col: Option<&str>) -> Result<Dataset> {
    Ok(load_input(path, label_col, true)?.dataset)
}

pub fn load_points(path: &Path, label_col: Option<&str>) -> Result<Matrix> {
    Ok(load_input(path, label_col, false)?.dataset.points().clone())
}

/// Points of labels 0 and 1, rejecting any other label.
pub fn two_classes(ds: &Dataset) -> Result<(Matrix, Matrix)> {
    if let Some(&l) = ds.labels().iter().find(|&&l| l > 1) {
        bail!("expected labels 0 and 1 only, found {l}");
    }
    let (x, y) = (ds.class_points(0), ds.class_points(1));
    if x.rows() == 0 || y.rows() == 0 {
        bail!("both labels 0 and 1 need at least one point");
    }
    Ok((x, y))
}
