//! Texture and moment descriptors of a detected region.
//!
//! A candidate region is resampled to a 32x32 binary patch. Four statistics
//! come from its two-level co-occurrence matrix, two from the magnitudes of
//! the pseudo-Zernike moments `Z00` and `Z10`.

mod glcm;
mod patch;
mod zernike;

pub use glcm::{compute_glcm, glcm_from_levels, haralick_features, quantize, Glcm, Haralick, DEFAULT_OFFSETS};
pub use patch::{resize_binary, resize_region, Patch32, PATCH_SIDE};
pub use zernike::{pseudo_zernike, radial_polynomial};

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::learn::Label;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("invalid pseudo-Zernike indices n={n}, m={m} (need |m| <= n)")]
    InvalidIndices { n: usize, m: i32 },
    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

pub const FEATURE_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureVector {
    pub hom: f64,
    pub corr: f64,
    pub var: f64,
    pub diff_var: f64,
    pub z00_mag: f64,
    pub z10_mag: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_DIM] {
        [self.hom, self.corr, self.var, self.diff_var, self.z00_mag, self.z10_mag]
    }

    pub fn from_array(v: [f64; FEATURE_DIM]) -> Self {
        Self { hom: v[0], corr: v[1], var: v[2], diff_var: v[3], z00_mag: v[4], z10_mag: v[5] }
    }
}

pub fn feature_vector(patch: &Patch32) -> FeatureVector {
    let h = haralick_features(&compute_glcm(patch, &DEFAULT_OFFSETS));
    let z00 = pseudo_zernike(patch, 0, 0).expect("valid indices").norm();
    let z10 = pseudo_zernike(patch, 1, 0).expect("valid indices").norm();
    FeatureVector { hom: h.hom, corr: h.corr, var: h.var, diff_var: h.diff_var, z00_mag: z00, z10_mag: z10 }
}

pub const CSV_HEADER: &str = "hom,corr,var,diff_var,z00,z10,label";

/// Writes `hom,corr,var,diff_var,z00,z10[,label]` rows under a header.
pub fn write_csv<W: Write>(mut out: W, rows: &[(FeatureVector, Option<Label>)]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (f, label) in rows {
        let vals: Vec<String> = f.to_array().iter().map(|v| v.to_string()).collect();
        match label {
            Some(l) => writeln!(out, "{},{}", vals.join(","), l.value())?,
            None => writeln!(out, "{}", vals.join(","))?,
        }
    }
    Ok(())
}

/// Reads rows written by [`write_csv`]; the header line is optional.
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<(FeatureVector, Option<Label>)>, FeatureError> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| FeatureError::Csv { line: line_no, msg: e.to_string() })?;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("hom")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != FEATURE_DIM && fields.len() != FEATURE_DIM + 1 {
            return Err(FeatureError::Csv { line: line_no, msg: format!("expected 6 or 7 fields, got {}", fields.len()) });
        }
        let mut v = [0.0; FEATURE_DIM];
        for (slot, s) in v.iter_mut().zip(&fields) {
            *slot = s
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| FeatureError::Csv { line: line_no, msg: format!("bad number `{s}`") })?;
        }
        let label = match fields.get(FEATURE_DIM) {
            None => None,
            Some(s) => Some(
                s.parse::<i32>()
                    .ok()
                    .and_then(Label::from_value)
                    .ok_or_else(|| FeatureError::Csv { line: line_no, msg: format!("label must be 1 or -1, got `{s}`") })?,
            ),
        };
        rows.push((FeatureVector::from_array(v), label));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_patch_vector() {
        let f = feature_vector(&Patch32::default());
        assert_eq!(f.to_array(), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn checkerboard_patch_texture() {
        // diagonal offsets pair equal values, so check the horizontal one alone
        let cb = Patch32::from_fn(|x, y| (x + y) % 2 == 1);
        let g = compute_glcm(&cb, &[(1, 0)]);
        let h = haralick_features(&g);
        assert_eq!((h.hom, h.corr, h.var, h.diff_var), (0.5, -1.0, 0.25, 1.0));
        let f = feature_vector(&cb);
        assert!(f.hom > 0.0 && f.hom <= 1.0 && f.corr.abs() <= 1.0);
    }

    #[test]
    fn disk_moments_rotation() {
        let disk = Patch32::from_fn(|x, y| {
            let (u, v) = (x as f64 - 12.0, y as f64 - 17.5);
            u * u + v * v <= 64.0
        });
        let a = feature_vector(&disk);
        let b = feature_vector(&disk.rotated_90());
        assert!((a.z00_mag - b.z00_mag).abs() <= 0.02 * a.z00_mag);
        assert!((a.z10_mag - b.z10_mag).abs() <= 0.02 * a.z10_mag.max(1e-9));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let rows = vec![
            (FeatureVector::from_array([0.5, -0.25, 0.1, 1e-17, 0.3333333333333333, 2.0]), Some(Label::Sign)),
            (FeatureVector::from_array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), Some(Label::NonSign)),
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap(), rows);

        assert!(matches!(read_csv(&b"1,2,3\n"[..]), Err(FeatureError::Csv { line: 1, .. })));
        assert!(read_csv(&b"1,2,3,4,5,6,0\n"[..]).is_err());
        assert!(read_csv(&b"1,2,3,4,5,x\n"[..]).is_err());
        assert_eq!(read_csv(&b"1,2,3,4,5,6\n"[..]).unwrap()[0].1, None);
    }
}
