use super::BinaryMask;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphOp {
    Open,
    Close,
}

/// Opening or closing with a `(2r+1)`-square structuring element.
///
/// The mask is evaluated on a frame padded by `radius` background pixels:
/// erosion never sees foreground outside the image, while dilation may grow
/// into the padding so that closing does not eat objects touching the frame.
/// Both operators are idempotent under this convention.
pub fn morph_filter(mask: &BinaryMask, op: MorphOp, radius: usize) -> BinaryMask {
    let r = radius.max(1);
    let (w, h) = (mask.width(), mask.height());
    let (pw, ph) = (w + 2 * r, h + 2 * r);
    let mut padded = vec![false; pw * ph];
    for y in 0..h {
        for x in 0..w {
            padded[(y + r) * pw + x + r] = mask.get(x, y);
        }
    }

    let out = match op {
        MorphOp::Open => dilate(&erode(&padded, pw, ph, r), pw, ph, r),
        MorphOp::Close => erode(&dilate(&padded, pw, ph, r), pw, ph, r),
    };

    BinaryMask::from_fn(w, h, |x, y| out[(y + r) * pw + x + r]).expect("same dimensions as input")
}

fn erode(src: &[bool], w: usize, h: usize, r: usize) -> Vec<bool> {
    sweep(src, w, h, r, true)
}

fn dilate(src: &[bool], w: usize, h: usize, r: usize) -> Vec<bool> {
    sweep(src, w, h, r, false)
}

/// Separable square min (erode) / max (dilate) filter. Out-of-range samples
/// are background.
fn sweep(src: &[bool], w: usize, h: usize, r: usize, is_erode: bool) -> Vec<bool> {
    let pass = |get: &dyn Fn(usize, usize) -> bool, len: usize, lines: usize, idx: &dyn Fn(usize, usize) -> usize| {
        let mut out = vec![false; w * h];
        for line in 0..lines {
            for i in 0..len {
                let lo = i as isize - r as isize;
                let hi = i + r;
                let v = if is_erode {
                    lo >= 0 && hi < len && (lo as usize..=hi).all(|k| get(line, k))
                } else {
                    (lo.max(0) as usize..=hi.min(len - 1)).any(|k| get(line, k))
                };
                out[idx(line, i)] = v;
            }
        }
        out
    };
    let rows = pass(&|y, x| src[y * w + x], w, h, &|y, x| y * w + x);
    pass(&|x, y| rows[y * w + x], h, w, &|x, y| y * w + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct structuring-element sweep on the unpadded frame, used as oracle.
    fn brute(mask: &BinaryMask, op: MorphOp, r: i64) -> BinaryMask {
        let (w, h) = (mask.width() as i64, mask.height() as i64);
        let dil = |m: &dyn Fn(i64, i64) -> bool, x: i64, y: i64| {
            (-r..=r).any(|dy| (-r..=r).any(|dx| m(x + dx, y + dy)))
        };
        let ero = |m: &dyn Fn(i64, i64) -> bool, x: i64, y: i64| {
            (-r..=r).all(|dy| (-r..=r).all(|dx| m(x + dx, y + dy)))
        };
        let base = |x: i64, y: i64| mask.get_or_bg(x, y);
        let inside = |x: i64, y: i64| x >= -r && y >= -r && x < w + r && y < h + r;
        BinaryMask::from_fn(w as usize, h as usize, |x, y| {
            let (x, y) = (x as i64, y as i64);
            match op {
                MorphOp::Open => {
                    let e = |a: i64, b: i64| inside(a, b) && ero(&base, a, b);
                    dil(&e, x, y)
                }
                MorphOp::Close => {
                    let d = |a: i64, b: i64| inside(a, b) && dil(&base, a, b);
                    ero(&d, x, y)
                }
            }
        })
        .unwrap()
    }

    #[test]
    fn full_mask_opens_to_itself() {
        let m = BinaryMask::from_fn(10, 10, |_, _| true).unwrap();
        assert_eq!(morph_filter(&m, MorphOp::Open, 1), m);
        assert_eq!(morph_filter(&m, MorphOp::Close, 1), m);
    }

    #[test]
    fn opening_removes_speck() {
        let m = BinaryMask::from_fn(9, 9, |x, y| x == 4 && y == 4).unwrap();
        assert_eq!(morph_filter(&m, MorphOp::Open, 1).count(), 0);
    }

    #[test]
    fn closing_fills_hole() {
        let m = BinaryMask::from_fn(9, 9, |x, y| !(x == 4 && y == 4)).unwrap();
        assert_eq!(morph_filter(&m, MorphOp::Close, 1).count(), 81);
    }

    #[test]
    fn matches_brute_force_sweep() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        for trial in 0..40 {
            let (w, h) = (5 + trial % 7, 4 + trial % 5);
            let m = BinaryMask::from_fn(w, h, |_, _| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state % 3 != 0
            })
            .unwrap();
            for r in 1..=2 {
                for op in [MorphOp::Open, MorphOp::Close] {
                    assert_eq!(morph_filter(&m, op, r), brute(&m, op, r as i64), "{op:?} r={r}");
                }
            }
        }
    }
}
