//! Texture and moment features of a few binary patches.

use signscan::features::{compute_glcm, feature_vector, haralick_features, Patch32};

fn main() {
    let patches = [
        ("filled", Patch32::filled()),
        ("disk", Patch32::from_fn(|x, y| (x as f64 - 15.5).hypot(y as f64 - 15.5) < 14.0)),
        ("ring", Patch32::from_fn(|x, y| (11.0..15.5).contains(&(x as f64 - 15.5).hypot(y as f64 - 15.5)))),
        ("stripes", Patch32::from_fn(|x, _| x % 4 < 2)),
        ("checker", Patch32::from_fn(|x, y| (x + y) % 2 == 0)),
    ];
    println!("{:8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}", "patch", "hom", "corr", "var", "diff_var", "|Z00|", "|Z10|");
    for (name, p) in &patches {
        let f = feature_vector(p);
        println!(
            "{name:8} {:8.4} {:8.4} {:8.4} {:8.4} {:8.4} {:8.4}",
            f.hom, f.corr, f.var, f.diff_var, f.z00_mag, f.z10_mag
        );
    }

    // a single horizontal offset isolates the checkerboard's alternation
    let h = haralick_features(&compute_glcm(&patches[4].1, &[(1, 0)]));
    assert_eq!(h.corr, -1.0);
    println!("checker, offset (1,0) only: {h:?}");
}
