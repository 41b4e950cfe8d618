use super::{BinaryMask, Blob, Pixel, NEIGHBORS_8};

/// Labels 8-connected foreground components and keeps those with at least
/// `min_area` pixels. Blobs come out in row-major order of their first pixel.
pub fn connected_components(mask: &BinaryMask, min_area: usize) -> Vec<Blob> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut blobs = Vec::new();
    let mut stack: Vec<Pixel> = Vec::new();

    for start in 0..w * h {
        if seen[start] || !mask.data()[start] {
            continue;
        }
        seen[start] = true;
        stack.push(((start % w) as i32, (start / w) as i32));
        let mut pixels = Vec::new();
        while let Some((x, y)) = stack.pop() {
            pixels.push((x, y));
            for (dx, dy) in NEIGHBORS_8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let i = ny as usize * w + nx as usize;
                if !seen[i] && mask.data()[i] {
                    seen[i] = true;
                    stack.push((nx, ny));
                }
            }
        }
        if pixels.len() >= min_area.max(1) {
            blobs.extend(Blob::from_pixels(pixels));
        }
    }
    blobs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::BBox;

    fn mask_from(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        BinaryMask::from_fn(w, h, |x, y| rows[y].as_bytes()[x] == b'#').unwrap()
    }

    #[test]
    fn empty_mask_has_no_blobs() {
        let m = BinaryMask::empty(7, 5).unwrap();
        assert!(connected_components(&m, 1).is_empty());
    }

    #[test]
    fn single_square() {
        let m = mask_from(&[".....", ".###.", ".###.", ".###.", "....."]);
        let blobs = connected_components(&m, 1);
        assert_eq!(blobs.len(), 1);
        assert_eq!(blobs[0].area(), 9);
        assert_eq!(blobs[0].bbox(), BBox { x_min: 1, y_min: 1, x_max: 3, y_max: 3 });
    }

    #[test]
    fn separated_squares_and_diagonal_link() {
        let m = mask_from(&["##.##", "##.##"]);
        assert_eq!(connected_components(&m, 1).len(), 2);
        // diagonal contact joins under 8-connectivity
        let d = mask_from(&["#..", ".#.", "..#"]);
        assert_eq!(connected_components(&d, 1).len(), 1);
    }

    #[test]
    fn min_area_filters_small_components() {
        let m = mask_from(&["#...###", "....###"]);
        let blobs = connected_components(&m, 2);
        assert_eq!(blobs.len(), 1);
        assert_eq!(blobs[0].area(), 6);
    }
}
