//! JSON encodings of operators and channels.
//!
//! Floats are written in shortest round-trip form, so a read after a write
//! reproduces every bit.

use std::fs;
use std::path::Path;

use qfig_core::{CMat, Complex64, DensityOperator, HermitianOperator, QuantumChannel};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `{"dim": d, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl OperatorJson {
    pub fn from_matrix(m: &CMat) -> Self {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        OperatorJson { dim: m.nrows(), re: rows(|z| z.re), im: Some(rows(|z| z.im)) }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let d = self.dim;
        let shape_ok = |a: &[Vec<f64>]| a.len() == d && a.iter().all(|r| r.len() == d);
        if d == 0 || !shape_ok(&self.re) || !self.im.as_deref().is_none_or(shape_ok) {
            return Err(Error::config(format!("operator arrays must be {d}x{d}")));
        }
        Ok(CMat::from_fn(d, d, |i, j| {
            Complex64::new(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))
        }))
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        Ok(DensityOperator::new(self.to_matrix()?)?)
    }

    pub fn to_hermitian(&self) -> Result<HermitianOperator> {
        Ok(HermitianOperator::new(self.to_matrix()?)?)
    }
}

/// `{"dim_in": d, "dim_out": e, "kraus": [operator, ..]}`; Kraus operators
/// are `e×d`, so `dim` is the row count and `re`/`im` may be rectangular.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<KrausJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl ChannelJson {
    pub fn from_channel(c: &QuantumChannel) -> Self {
        let kraus = c
            .kraus()
            .iter()
            .map(|k| {
                let op = OperatorJson::from_matrix(k);
                KrausJson { dim: (k.nrows() == k.ncols()).then_some(op.dim), re: op.re, im: op.im }
            })
            .collect();
        ChannelJson { dim_in: c.dim_in(), dim_out: c.dim_out(), kraus }
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let (rows, cols) = (self.dim_out, self.dim_in);
        let shape_ok = |a: &[Vec<f64>]| a.len() == rows && a.iter().all(|r| r.len() == cols);
        let kraus = self
            .kraus
            .iter()
            .map(|k| {
                if k.dim.is_some_and(|d| d != rows || d != cols) || !shape_ok(&k.re) || !k.im.as_deref().is_none_or(shape_ok) {
                    return Err(Error::config(format!("Kraus operators must be {rows}x{cols}")));
                }
                Ok(CMat::from_fn(rows, cols, |i, j| {
                    Complex64::new(k.re[i][j], k.im.as_ref().map_or(0.0, |im| im[i][j]))
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        if kraus.is_empty() {
            return Err(Error::config("channel needs at least one Kraus operator"));
        }
        Ok(QuantumChannel::new(kraus)?)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
