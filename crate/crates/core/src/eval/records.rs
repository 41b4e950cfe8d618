//! Tab-separated detection and ground-truth files.

use std::io::{BufRead, Write};

use thiserror::Error;

use super::{GroundTruth, SignColor, SignShape};
use crate::rht::EllipseParams;

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionRecord {
    pub image_id: String,
    pub ellipse: EllipseParams,
    pub svm_score: f64,
    pub accepted: bool,
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// `image_id cx cy a b theta score accepted`, one per line.
pub fn write_detections<W: Write>(mut out: W, dets: &[DetectionRecord]) -> std::io::Result<()> {
    for d in dets {
        let e = &d.ellipse;
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            d.image_id,
            e.center.0,
            e.center.1,
            e.semi_major,
            e.semi_minor,
            e.theta,
            d.svm_score,
            d.accepted as u8
        )?;
    }
    Ok(())
}

/// `image_id cx cy radius shape color`, one per line.
pub fn write_ground_truth<W: Write>(mut out: W, gts: &[GroundTruth]) -> std::io::Result<()> {
    for g in gts {
        writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", g.image_id, g.center.0, g.center.1, g.radius, g.shape.name(), g.color.name())?;
    }
    Ok(())
}

fn rows<R: BufRead>(input: R, width: usize) -> Result<Vec<(usize, Vec<String>)>, RecordError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(|f| f.trim().to_string()).collect();
        if fields.len() != width {
            return Err(RecordError::Format { line: i + 1, msg: format!("expected {width} tab-separated fields, got {}", fields.len()) });
        }
        out.push((i + 1, fields));
    }
    Ok(out)
}

fn num(line: usize, s: &str) -> Result<f64, RecordError> {
    s.parse::<f64>().ok().filter(|v| !v.is_nan()).ok_or_else(|| RecordError::Format { line, msg: format!("bad number `{s}`") })
}

pub fn read_detections<R: BufRead>(input: R) -> Result<Vec<DetectionRecord>, RecordError> {
    rows(input, 8)?
        .into_iter()
        .map(|(line, f)| {
            let v = f[1..7].iter().map(|s| num(line, s)).collect::<Result<Vec<f64>, _>>()?;
            if v[..5].iter().any(|x| !x.is_finite()) || v[2] <= 0.0 || v[3] <= 0.0 {
                return Err(RecordError::Format { line, msg: "invalid ellipse".into() });
            }
            let accepted = match f[7].as_str() {
                "1" => true,
                "0" => false,
                s => return Err(RecordError::Format { line, msg: format!("accepted must be 0 or 1, got `{s}`") }),
            };
            let ellipse = EllipseParams { center: (v[0], v[1]), semi_major: v[2], semi_minor: v[3], theta: v[4], ..EllipseParams::circle((0.0, 0.0), 1.0) };
            Ok(DetectionRecord { image_id: f[0].clone(), ellipse, svm_score: v[5], accepted })
        })
        .collect()
}

pub fn read_ground_truth<R: BufRead>(input: R) -> Result<Vec<GroundTruth>, RecordError> {
    rows(input, 6)?
        .into_iter()
        .map(|(line, f)| {
            let (x, y, r) = (num(line, &f[1])?, num(line, &f[2])?, num(line, &f[3])?);
            if !(r > 0.0 && r.is_finite() && x.is_finite() && y.is_finite()) {
                return Err(RecordError::Format { line, msg: "invalid center or radius".into() });
            }
            let shape = match f[4].as_str() {
                "circle" => SignShape::Circle,
                "octagon" => SignShape::Octagon,
                s => return Err(RecordError::Format { line, msg: format!("unknown shape `{s}`") }),
            };
            let color = match f[5].as_str() {
                "red" => SignColor::Red,
                "blue" => SignColor::Blue,
                s => return Err(RecordError::Format { line, msg: format!("unknown color `{s}`") }),
            };
            Ok(GroundTruth { image_id: f[0].clone(), center: (x, y), radius: r, shape, color })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detection_round_trip() {
        let dets = vec![
            DetectionRecord {
                image_id: "scene_00001".into(),
                ellipse: EllipseParams::new((10.25, 20.5), 14.0, 12.1, 0.3),
                svm_score: -0.125,
                accepted: false,
            },
            DetectionRecord { image_id: "x".into(), ellipse: EllipseParams::circle((1.0, 2.0), 3.0), svm_score: 1e-20, accepted: true },
        ];
        let mut buf = Vec::new();
        write_detections(&mut buf, &dets).unwrap();
        let back = read_detections(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in back.iter().zip(&dets) {
            assert_eq!((a.ellipse.center, a.ellipse.semi_major, a.ellipse.semi_minor, a.ellipse.theta), (b.ellipse.center, b.ellipse.semi_major, b.ellipse.semi_minor, b.ellipse.theta));
            assert_eq!((&a.image_id, a.svm_score, a.accepted), (&b.image_id, b.svm_score, b.accepted));
        }
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "x\t1\t2\t3\t3\t0\t0.00000000000000000001\t1");
    }

    #[test]
    fn ground_truth_round_trip() {
        let gts = vec![GroundTruth { image_id: "a".into(), center: (3.5, 4.0), radius: 12.0, shape: SignShape::Octagon, color: SignColor::Blue }];
        let mut buf = Vec::new();
        write_ground_truth(&mut buf, &gts).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "a\t3.5\t4\t12\toctagon\tblue\n");
        assert_eq!(read_ground_truth(&buf[..]).unwrap(), gts);
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(read_ground_truth(&b"a\t1\t2\t3\tcircle\n"[..]), Err(RecordError::Format { line: 1, .. })));
        assert!(read_ground_truth(&b"a\t1\t2\t-3\tcircle\tred\n"[..]).is_err());
        assert!(read_ground_truth(&b"a\t1\t2\t3\tsquare\tred\n"[..]).is_err());
        assert!(read_detections(&b"a\t1\t2\t3\t3\t0\t0.5\tyes\n"[..]).is_err());
        assert!(matches!(read_detections(&b"\n\na\t1\t2\tq\t3\t0\t0.5\t1\n"[..]), Err(RecordError::Format { line: 3, .. })));
    }
}
