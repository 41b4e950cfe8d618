use nalgebra::{DMatrix, SymmetricEigen};

use super::LearnError;

/// Principal axes of a sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k` orthonormal rows of length `d`.
    pub components: Vec<Vec<f64>>,
    /// Eigenvalues of the kept components, descending.
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }
}

/// Sample covariance (`n - 1` denominator) around the column means.
pub fn covariance(samples: &[Vec<f64>]) -> (Vec<f64>, DMatrix<f64>) {
    let n = samples.len();
    let d = samples[0].len();
    let mut mean = vec![0.0; d];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for s in samples {
        for i in 0..d {
            let di = s[i] - mean[i];
            for j in i..d {
                cov[(i, j)] += di * (s[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / (n as f64 - 1.0);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    (mean, cov)
}

/// Keeps the fewest leading components whose eigenvalues reach
/// `variance_keep` of the total. Identical samples give a `k = 0` model.
pub fn pca_fit(samples: &[Vec<f64>], variance_keep: f64) -> Result<PcaModel, LearnError> {
    if samples.len() < 2 {
        return Err(LearnError::TooFewSamples { needed: 2, got: samples.len() });
    }
    if !(variance_keep > 0.0 && variance_keep <= 1.0) {
        return Err(LearnError::InvalidParameter(format!("variance_keep must lie in (0, 1], got {variance_keep}")));
    }
    let d = samples[0].len();
    if let Some(bad) = samples.iter().find(|s| s.len() != d) {
        return Err(LearnError::DimensionMismatch { expected: d, got: bad.len() });
    }
    let (mean, cov) = covariance(samples);
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Ok(PcaModel { mean, components: Vec::new(), explained_variance: Vec::new() });
    }

    let target = variance_keep * total * (1.0 - 1e-9);
    let mut k = 0;
    let mut cum = 0.0;
    while k < d && cum < target {
        cum += values[k];
        k += 1;
    }

    let components = order[..k]
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            // sign convention: largest-magnitude entry positive
            let pivot = v.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    Ok(PcaModel { mean, components, explained_variance: values[..k].to_vec() })
}

pub fn pca_project(model: &PcaModel, v: &[f64]) -> Result<Vec<f64>, LearnError> {
    if v.len() != model.input_dim() {
        return Err(LearnError::DimensionMismatch { expected: model.input_dim(), got: v.len() });
    }
    Ok(model
        .components
        .iter()
        .map(|c| c.iter().zip(v).zip(&model.mean).map(|((c, x), m)| c * (x - m)).sum())
        .collect())
}

/// Maps a projection back to the input space.
pub fn pca_reconstruct(model: &PcaModel, z: &[f64]) -> Vec<f64> {
    let mut out = model.mean.clone();
    for (c, &w) in model.components.iter().zip(z) {
        for (o, ci) in out.iter_mut().zip(c) {
            *o += w * ci;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_line() {
        let pts: Vec<Vec<f64>> = (-3..=3).map(|t| vec![t as f64, 2.0 * t as f64]).collect();
        let m = pca_fit(&pts, 1.0).unwrap();
        assert_eq!(m.output_dim(), 1);
        let s5 = 5f64.sqrt();
        assert!((m.components[0][0] - 1.0 / s5).abs() < 1e-12 && (m.components[0][1] - 2.0 / s5).abs() < 1e-12);
        let z = pca_project(&m, &[1.0, 2.0]).unwrap();
        assert!((z[0] - s5).abs() < 1e-12);
        assert_eq!(pca_project(&m, &m.mean.clone()).unwrap(), vec![0.0]);
    }

    #[test]
    fn full_rank_keeps_everything() {
        let pts = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0], vec![0.5, 0.5]];
        let m = pca_fit(&pts, 1.0).unwrap();
        assert_eq!(m.output_dim(), 2);
        let dot: f64 = m.components[0].iter().zip(&m.components[1]).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_invalid() {
        let same = vec![vec![2.0, 3.0]; 4];
        let m = pca_fit(&same, 0.95).unwrap();
        assert_eq!(m.output_dim(), 0);
        assert_eq!(pca_project(&m, &[1.0, 1.0]).unwrap(), Vec::<f64>::new());
        assert!(matches!(pca_fit(&same[..1], 0.9), Err(LearnError::TooFewSamples { .. })));
        assert!(pca_fit(&same, 0.0).is_err());
        assert!(pca_fit(&[vec![1.0], vec![1.0, 2.0]], 0.9).is_err());
        assert_eq!(pca_project(&m, &[1.0]), Err(LearnError::DimensionMismatch { expected: 2, got: 1 }));
    }
}
