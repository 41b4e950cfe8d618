//! Standardize -> PCA -> linear SVM, and its plain-text model file.

use std::fmt::Write as _;

use super::pca::{pca_fit, pca_project, PcaModel};
use super::svm::{svm_decide, svm_train, SvmModel};
use super::{Label, LabeledSample, LearnError};
use crate::features::{FeatureVector, FEATURE_DIM};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub variance_keep: f64,
    pub c_param: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { variance_keep: 0.95, c_param: 10.0, epochs: 100, seed: 0 }
    }
}

/// Trained feature pipeline. Scores are SVM decision values in PCA space.
#[derive(Clone, Debug, PartialEq)]
pub struct SignClassifier {
    /// Per-dimension training mean.
    pub mean: Vec<f64>,
    /// Per-dimension training standard deviation (1 where constant).
    pub scale: Vec<f64>,
    pub pca: PcaModel,
    pub svm: SvmModel,
}

impl SignClassifier {
    pub fn train(rows: &[(FeatureVector, Label)], cfg: &TrainConfig) -> Result<Self, LearnError> {
        if rows.len() < 2 {
            return Err(LearnError::TooFewSamples { needed: 2, got: rows.len() });
        }
        let raw: Vec<[f64; FEATURE_DIM]> = rows.iter().map(|(f, _)| f.to_array()).collect();
        let n = raw.len() as f64;
        let mut mean = vec![0.0; FEATURE_DIM];
        for r in &raw {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v / n;
            }
        }
        let scale: Vec<f64> = (0..FEATURE_DIM)
            .map(|j| {
                let var = raw.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let standardized: Vec<Vec<f64>> =
            raw.iter().map(|r| r.iter().zip(&mean).zip(&scale).map(|((v, m), s)| (v - m) / s).collect()).collect();
        let pca = pca_fit(&standardized, cfg.variance_keep)?;
        let samples = standardized
            .iter()
            .zip(rows)
            .map(|(z, (_, label))| Ok(LabeledSample { features: pca_project(&pca, z)?, label: *label }))
            .collect::<Result<Vec<_>, LearnError>>()?;
        let svm = svm_train(&samples, cfg.c_param, cfg.epochs, cfg.seed)?;
        Ok(Self { mean, scale, pca, svm })
    }

    pub fn standardize(&self, f: &FeatureVector) -> Vec<f64> {
        f.to_array().iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| (v - m) / s).collect()
    }

    pub fn decide(&self, f: &FeatureVector) -> (f64, Label) {
        let z = pca_project(&self.pca, &self.standardize(f)).expect("dimensions fixed at training");
        svm_decide(&self.svm, &z).expect("dimensions fixed at training")
    }

    /// Serializes to the line-oriented text format. Floats use shortest
    /// round-trip formatting, so parsing restores every bit.
    pub fn to_text(&self) -> String {
        let row = |v: &[f64]| v.iter().map(|x| format!(" {x}")).collect::<String>();
        let mut s = String::new();
        writeln!(s, "dims {} {}", self.mean.len(), self.pca.output_dim()).unwrap();
        writeln!(s, "mean{}", row(&self.mean)).unwrap();
        writeln!(s, "scale{}", row(&self.scale)).unwrap();
        writeln!(s, "pca_mean{}", row(&self.pca.mean)).unwrap();
        for (i, c) in self.pca.components.iter().enumerate() {
            writeln!(s, "pca_component_{i}{}", row(c)).unwrap();
        }
        writeln!(s, "pca_variance{}", row(&self.pca.explained_variance)).unwrap();
        writeln!(s, "svm_w{}", row(&self.svm.weights)).unwrap();
        writeln!(s, "svm_b {}", self.svm.bias).unwrap();
        writeln!(s, "c_param {}", self.svm.c_param).unwrap();
        s
    }

    pub fn from_text(text: &str) -> Result<Self, LearnError> {
        let bad = |line: usize, msg: &str| LearnError::ModelFormat { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next = |key: &str| -> Result<(usize, Vec<f64>), LearnError> {
            let (i, l) = lines.next().ok_or_else(|| bad(0, &format!("missing `{key}` line")))?;
            let mut parts = l.split_whitespace();
            if parts.next() != Some(key) {
                return Err(bad(i + 1, &format!("expected `{key}`")));
            }
            let vals = parts
                .map(|p| p.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| bad(i + 1, "non-numeric value"))?;
            Ok((i + 1, vals))
        };
        let (ln, dims) = next("dims")?;
        let [d, k] = dims[..] else { return Err(bad(ln, "dims needs two integers")) };
        if d.fract() != 0.0 || k.fract() != 0.0 || d < 1.0 || k < 0.0 || k > d {
            return Err(bad(ln, "invalid dims"));
        }
        let (d, k) = (d as usize, k as usize);
        let want = |(ln, v): (usize, Vec<f64>), len: usize, what: &str| {
            if v.len() == len {
                Ok(v)
            } else {
                Err(bad(ln, &format!("{what} needs {len} values, got {}", v.len())))
            }
        };
        let mean = want(next("mean")?, d, "mean")?;
        let scale = want(next("scale")?, d, "scale")?;
        if scale.iter().any(|&s| s <= 0.0) {
            return Err(bad(0, "scale values must be positive"));
        }
        let pca_mean = want(next("pca_mean")?, d, "pca_mean")?;
        let mut components = Vec::with_capacity(k);
        for i in 0..k {
            let key = format!("pca_component_{i}");
            components.push(want(next(&key)?, d, &key)?);
        }
        let explained_variance = want(next("pca_variance")?, k, "pca_variance")?;
        let weights = want(next("svm_w")?, k, "svm_w")?;
        let bias = want(next("svm_b")?, 1, "svm_b")?[0];
        let c_param = want(next("c_param")?, 1, "c_param")?[0];
        if c_param <= 0.0 {
            return Err(bad(0, "c_param must be positive"));
        }
        Ok(Self {
            mean,
            scale,
            pca: PcaModel { mean: pca_mean, components, explained_variance },
            svm: SvmModel { weights, bias, c_param },
        })
    }
}
