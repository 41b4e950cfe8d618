use super::{BinaryMask, Blob, Pixel, NEIGHBORS_8};

/// Boundary pixels of a region: each point has at least one background
/// 8-neighbor (off-frame counts as background).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeSet {
    points: Vec<Pixel>,
}

impl EdgeSet {
    /// Sorts and deduplicates the points.
    pub fn new(mut points: Vec<Pixel>) -> Self {
        points.sort_unstable_by_key(|&(x, y)| (y, x));
        points.dedup();
        Self { points }
    }

    pub fn points(&self) -> &[Pixel] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same edge set shifted by `(dx, dy)`.
    pub fn translated(&self, dx: i32, dy: i32) -> Self {
        Self::new(self.points.iter().map(|&(x, y)| (x + dx, y + dy)).collect())
    }
}

impl FromIterator<Pixel> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Pixel>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

pub fn extract_edges(mask: &BinaryMask, blob: &Blob) -> EdgeSet {
    let points = blob
        .pixels()
        .iter()
        .copied()
        .filter(|&(x, y)| {
            NEIGHBORS_8
                .iter()
                .any(|&(dx, dy)| !mask.get_or_bg((x + dx) as i64, (y + dy) as i64))
        })
        .collect();
    // blob pixels are already row-major sorted
    EdgeSet { points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::connected_components;

    #[test]
    fn single_pixel_blob_is_its_own_edge() {
        let m = BinaryMask::from_fn(3, 3, |x, y| x == 1 && y == 1).unwrap();
        let b = &connected_components(&m, 1)[0];
        assert_eq!(extract_edges(&m, b).points(), &[(1, 1)]);
    }

    #[test]
    fn filled_square_perimeter() {
        let m = BinaryMask::from_fn(9, 9, |x, y| (2..7).contains(&x) && (2..7).contains(&y)).unwrap();
        let b = &connected_components(&m, 1)[0];
        let e = extract_edges(&m, b);
        assert_eq!(e.len(), 16);
        assert!(e.points().iter().all(|&(x, y)| x == 2 || x == 6 || y == 2 || y == 6));
    }

    #[test]
    fn frame_border_counts_as_background() {
        let m = BinaryMask::from_fn(4, 4, |_, _| true).unwrap();
        let b = &connected_components(&m, 1)[0];
        assert_eq!(extract_edges(&m, b).len(), 12);
    }

    #[test]
    fn disk_edge_count_near_circumference() {
        let r = 10.0f64;
        let m = BinaryMask::from_fn(41, 41, |x, y| {
            let (dx, dy) = (x as f64 - 20.0, y as f64 - 20.0);
            dx * dx + dy * dy <= r * r
        })
        .unwrap();
        let b = &connected_components(&m, 1)[0];
        let n = extract_edges(&m, b).len() as f64;
        let c = 2.0 * std::f64::consts::PI * r;
        assert!(n >= 0.8 * c && n <= 1.3 * c, "edge count {n}");
    }
}
