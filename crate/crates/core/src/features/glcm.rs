//! Gray-level co-occurrence matrix and the four texture statistics used by
//! the classifier.

use super::Patch32;

/// Horizontal, vertical and both diagonals at distance 1.
pub const DEFAULT_OFFSETS: [(i32, i32); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

/// Normalized, symmetric co-occurrence matrix over `levels` gray levels.
#[derive(Clone, Debug, PartialEq)]
pub struct Glcm {
    levels: usize,
    matrix: Vec<f64>,
}

impl Glcm {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.levels + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Builds from raw probabilities, e.g. hand-written fixtures. Returns
    /// `None` unless the entries are non-negative and sum to 1 within 1e-9.
    pub fn from_probabilities(levels: usize, matrix: Vec<f64>) -> Option<Self> {
        let ok = levels > 0
            && matrix.len() == levels * levels
            && matrix.iter().all(|&v| v >= 0.0 && v.is_finite())
            && (matrix.iter().sum::<f64>() - 1.0).abs() <= 1e-9;
        ok.then_some(Self { levels, matrix })
    }
}

/// Counts ordered pairs `(p, p + offset)` inside the grid for every offset,
/// adds each pair in both orders, and normalizes. `None` when no pair fits
/// (a grid smaller than every offset) or a level is out of range.
pub fn glcm_from_levels(
    width: usize,
    height: usize,
    levels: &[u8],
    n_levels: usize,
    offsets: &[(i32, i32)],
) -> Option<Glcm> {
    if levels.len() != width * height || n_levels == 0 || levels.iter().any(|&l| l as usize >= n_levels) {
        return None;
    }
    let mut counts = vec![0u64; n_levels * n_levels];
    for &(dx, dy) in offsets {
        for y in 0..height as i32 {
            let ny = y + dy;
            if ny < 0 || ny >= height as i32 {
                continue;
            }
            for x in 0..width as i32 {
                let nx = x + dx;
                if nx < 0 || nx >= width as i32 {
                    continue;
                }
                let i = levels[y as usize * width + x as usize] as usize;
                let j = levels[ny as usize * width + nx as usize] as usize;
                counts[i * n_levels + j] += 1;
                counts[j * n_levels + i] += 1;
            }
        }
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return None;
    }
    let matrix = counts.iter().map(|&c| c as f64 / total as f64).collect();
    Some(Glcm { levels: n_levels, matrix })
}

/// Binary-patch GLCM with two levels.
pub fn compute_glcm(patch: &Patch32, offsets: &[(i32, i32)]) -> Glcm {
    let side = super::patch::PATCH_SIDE;
    glcm_from_levels(side, side, &patch.levels(), 2, offsets).expect("32x32 patch always has pairs")
}

/// Uniform quantization of `[0, 1]` values into `n_levels` bins, for
/// grayscale experiments with [`glcm_from_levels`].
pub fn quantize(values: &[f64], n_levels: usize) -> Vec<u8> {
    assert!((1..=256).contains(&n_levels), "n_levels must be in 1..=256");
    values
        .iter()
        .map(|&v| ((v.clamp(0.0, 1.0) * n_levels as f64) as usize).min(n_levels - 1) as u8)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Haralick {
    /// Sum of squared probabilities (angular second moment form).
    pub hom: f64,
    pub corr: f64,
    pub var: f64,
    /// `sum k^2 p_{x-y}(k)`.
    pub diff_var: f64,
}

pub fn haralick_features(g: &Glcm) -> Haralick {
    let n = g.levels();
    let mut px = vec![0.0; n];
    let mut py = vec![0.0; n];
    let mut diff = vec![0.0; n];
    let (mut hom, mut sum_ij) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let p = g.get(i, j);
            hom += p * p;
            sum_ij += (i * j) as f64 * p;
            px[i] += p;
            py[j] += p;
            diff[i.abs_diff(j)] += p;
        }
    }
    let moments = |marg: &[f64]| {
        let mean: f64 = marg.iter().enumerate().map(|(i, p)| i as f64 * p).sum();
        let sq: f64 = marg.iter().enumerate().map(|(i, p)| (i * i) as f64 * p).sum();
        (mean, (sq - mean * mean).max(0.0).sqrt())
    };
    let (mu_x, sd_x) = moments(&px);
    let (mu_y, sd_y) = moments(&py);
    let denom = sd_x * sd_y;
    let corr = if denom > 0.0 { ((sum_ij - mu_x * mu_y) / denom).clamp(-1.0, 1.0) } else { 0.0 };

    let mut var = 0.0;
    for i in 0..n {
        let d = i as f64 - mu_x;
        for j in 0..n {
            var += d * d * g.get(i, j);
        }
    }
    let diff_var = diff.iter().enumerate().map(|(k, p)| (k * k) as f64 * p).sum();
    Haralick { hom, corr, var, diff_var }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_patch() {
        let g = compute_glcm(&Patch32::default(), &DEFAULT_OFFSETS);
        assert_eq!(g.get(0, 0), 1.0);
        assert_eq!(g.get(0, 1) + g.get(1, 0) + g.get(1, 1), 0.0);
        let h = haralick_features(&g);
        assert_eq!((h.hom, h.corr, h.var, h.diff_var), (1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn two_by_two_checkerboard() {
        let g = glcm_from_levels(2, 2, &[0, 1, 1, 0], 2, &[(1, 0)]).unwrap();
        assert_eq!(g.matrix(), &[0.0, 0.5, 0.5, 0.0]);
        let h = haralick_features(&g);
        assert_eq!((h.hom, h.corr, h.var, h.diff_var), (0.5, -1.0, 0.25, 1.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(glcm_from_levels(1, 1, &[0], 2, &DEFAULT_OFFSETS).is_none());
        assert!(glcm_from_levels(2, 1, &[0, 2], 2, &[(1, 0)]).is_none());
        assert!(glcm_from_levels(2, 2, &[0, 0, 0], 2, &[(1, 0)]).is_none());
        assert!(Glcm::from_probabilities(2, vec![0.5, 0.5, 0.5, 0.0]).is_none());
    }

    #[test]
    fn quantized_grayscale_glcm() {
        let vals = [0.0, 0.3, 0.6, 1.0];
        let q = quantize(&vals, 4);
        assert_eq!(q, vec![0, 1, 2, 3]);
        let g = glcm_from_levels(4, 1, &q, 4, &[(1, 0)]).unwrap();
        assert_eq!(g.levels(), 4);
        assert!((g.get(1, 2) - 1.0 / 6.0).abs() < 1e-15);
        let h = haralick_features(&g);
        assert!((h.diff_var - 1.0).abs() < 1e-15);
    }
}
