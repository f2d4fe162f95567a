//! Gaussian RBF dictionaries over 2-D state coordinates.
//!
//! Column 0 is the bias (constant 1). Gaussian column `1 + i·V + j` is centred
//! on center `i` with variance `variances[j]`:
//! `φ(x) = exp(−‖x − c‖² / (2v))`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variances used by the room-domain experiments.
pub const ROOM_VARIANCES: [f64; 7] = [2.0, 5.0, 10.0, 15.0, 25.0, 50.0, 75.0];

pub const BIAS_INDEX: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Peak value 1 at the center.
    #[default]
    None,
    /// Each Gaussian column sums to 1 over a reference grid.
    UnitL1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Column {
    Bias,
    Gaussian {
        center_index: usize,
        center: [f64; 2],
        variance: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDictionary {
    centers: Vec<[f64; 2]>,
    variances: Vec<f64>,
    normalization: Normalization,
    /// Multiplier per Gaussian column (1 unless normalised).
    scales: Vec<f64>,
}

/// Builds a dictionary with one Gaussian per (center, variance) plus bias.
///
/// `grid` is only consulted for [`Normalization::UnitL1`]. Duplicate centers
/// are kept and give identical columns.
pub fn build_dictionary(
    centers: &[[f64; 2]],
    variances: &[f64],
    normalization: Normalization,
    grid: &[[f64; 2]],
) -> Result<FeatureDictionary> {
    let dict = FeatureDictionary::new(centers.to_vec(), variances.to_vec())?;
    match normalization {
        Normalization::None => Ok(dict),
        Normalization::UnitL1 => dict.normalized_over(grid),
    }
}

impl FeatureDictionary {
    pub fn new(centers: Vec<[f64; 2]>, variances: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidArgument("dictionary needs at least one center".into()));
        }
        if variances.is_empty() {
            return Err(Error::InvalidArgument("dictionary needs at least one variance".into()));
        }
        if let Some(v) = variances.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidArgument(format!("variance {v} must be positive")));
        }
        let scales = vec![1.0; centers.len() * variances.len()];
        Ok(Self {
            centers,
            variances,
            normalization: Normalization::None,
            scales,
        })
    }

    /// Bias-only dictionary (one column).
    pub fn bias_only() -> Self {
        Self {
            centers: Vec::new(),
            variances: Vec::new(),
            normalization: Normalization::None,
            scales: Vec::new(),
        }
    }

    /// Rescales every Gaussian column to unit L1 norm over `grid`.
    pub fn normalized_over(mut self, grid: &[[f64; 2]]) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidArgument("normalisation grid is empty".into()));
        }
        for col in 1..self.n_columns() {
            let raw: f64 = grid.iter().map(|x| self.raw_gaussian(col, x)).sum();
            self.scales[col - 1] = 1.0 / raw;
        }
        self.normalization = Normalization::UnitL1;
        Ok(self)
    }

    pub fn n_columns(&self) -> usize {
        self.centers.len() * self.variances.len() + 1
    }

    pub fn centers(&self) -> &[[f64; 2]] {
        &self.centers
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn column(&self, j: usize) -> Column {
        if j == BIAS_INDEX {
            return Column::Bias;
        }
        let k = j - 1;
        let nv = self.variances.len();
        Column::Gaussian {
            center_index: k / nv,
            center: self.centers[k / nv],
            variance: self.variances[k % nv],
        }
    }

    fn raw_gaussian(&self, j: usize, x: &[f64; 2]) -> f64 {
        let k = j - 1;
        let nv = self.variances.len();
        let c = self.centers[k / nv];
        let v = self.variances[k % nv];
        let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
        (-d2 / (2.0 * v)).exp()
    }

    /// `φ_j(x)`.
    pub fn value(&self, j: usize, x: &[f64; 2]) -> f64 {
        if j == BIAS_INDEX {
            1.0
        } else {
            self.scales[j - 1] * self.raw_gaussian(j, x)
        }
    }

    /// Full feature row `Φ(x)`.
    pub fn row(&self, x: &[f64; 2]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_columns());
        out.push(1.0);
        let nv = self.variances.len();
        for (i, c) in self.centers.iter().enumerate() {
            let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
            for (j, v) in self.variances.iter().enumerate() {
                out.push(self.scales[i * nv + j] * (-d2 / (2.0 * v)).exp());
            }
        }
        out
    }
}

/// Evaluated features, one row per listed state.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    states: Vec<usize>,
    n_cols: usize,
    data: Vec<f64>,
}

/// Evaluates `Φ(s)` for each of `states`, looking coordinates up in `coords`.
pub fn evaluate_features(
    dict: &FeatureDictionary,
    coords: &[[f64; 2]],
    states: &[usize],
) -> Result<FeatureMatrix> {
    if states.is_empty() {
        return Err(Error::InvalidArgument("no states to evaluate".into()));
    }
    if let Some(&s) = states.iter().find(|&&s| s >= coords.len()) {
        return Err(Error::InvalidArgument(format!("state {s} has no coordinates")));
    }
    let n_cols = dict.n_columns();
    let mut data = Vec::with_capacity(states.len() * n_cols);
    for &s in states {
        data.extend(dict.row(&coords[s]));
    }
    Ok(FeatureMatrix {
        states: states.to_vec(),
        n_cols,
        data,
    })
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.states.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_cols)
    }

    /// `Φ w`.
    pub fn mul_vec(&self, w: &[f64]) -> Vec<f64> {
        self.rows().map(|r| dot(r, w)).collect()
    }

    /// `state,f0,f1,...` with the bias as `f0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state");
        for j in 0..self.n_cols {
            let _ = write!(out, ",f{j}");
        }
        out.push('\n');
        for (i, &s) in self.states.iter().enumerate() {
            let _ = write!(out, "{s}");
            for x in self.row(i) {
                let _ = write!(out, ",{x:?}");
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
