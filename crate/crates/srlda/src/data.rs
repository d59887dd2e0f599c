//! Labeled datasets for binary classification.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::{Error, Result};

/// A single observation with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    /// Class index, 0 or 1.
    pub label: u8,
}

/// A labeled dataset stored row-major: one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn new(features: Array2<f64>, labels: Vec<u8>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                got: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::Config(format!("label {bad} is not 0 or 1")));
        }
        Ok(Self { features, labels })
    }

    pub fn from_samples(samples: &[LabeledSample]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::InsufficientSamples { n: 0, min: 1 });
        }
        let p = samples[0].features.len();
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != p {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("feature length {} != {}", s.features.len(), p),
                });
            }
        }
        let mut features = Array2::zeros((n, p));
        let mut labels = Vec::with_capacity(n);
        for (i, s) in samples.iter().enumerate() {
            features
                .row_mut(i)
                .assign(&ArrayView1::from(s.features.as_slice()));
            labels.push(s.label);
        }
        Self::new(features, labels)
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn count(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Rows of the requested class, as an owned matrix.
    pub fn class_rows(&self, label: u8) -> Array2<f64> {
        let idx: Vec<usize> = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i)
            .collect();
        self.features.select(Axis(0), &idx)
    }

    /// Splits into (class-0 rows, class-1 rows).
    pub fn split_classes(&self) -> (Array2<f64>, Array2<f64>) {
        (self.class_rows(0), self.class_rows(1))
    }

    /// Dataset consisting of the given row indices, in order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let features = self.features.select(Axis(0), indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Dataset { features, labels }
    }

    /// Standardizes columns to zero mean and unit standard deviation using
    /// the statistics of `self`, applying the same affine map to `others`.
    /// Constant columns are left unscaled.
    pub fn standardize_with(&mut self, others: &mut [&mut Dataset]) {
        let n = self.n_samples() as f64;
        let mean = self.features.mean_axis(Axis(0)).expect("non-empty");
        let mut sd = Array1::zeros(self.n_features());
        for (j, col) in self.features.axis_iter(Axis(1)).enumerate() {
            let m = mean[j];
            let ss: f64 = col.iter().map(|v| (v - m) * (v - m)).sum();
            let s = (ss / (n - 1.0)).sqrt();
            sd[j] = if s > 0.0 { s } else { 1.0 };
        }
        let apply = |f: &mut Array2<f64>| {
            for mut row in f.rows_mut() {
                row -= &mean;
                row /= &sd;
            }
        };
        apply(&mut self.features);
        for d in others {
            apply(&mut d.features);
        }
    }
}
