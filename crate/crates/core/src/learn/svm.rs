use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Label, LabeledSample, LearnError};

/// Linear soft-margin classifier `score = w . x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c_param: f64,
}

/// Primal objective `0.5 |w|^2 + C * sum max(0, 1 - y (w . x + b))`.
pub fn svm_objective(model: &SvmModel, samples: &[LabeledSample]) -> f64 {
    let reg = 0.5 * model.weights.iter().map(|w| w * w).sum::<f64>();
    let hinge: f64 = samples
        .iter()
        .map(|s| (1.0 - s.label.sign() * (dot(&model.weights, &s.features) + model.bias)).max(0.0))
        .sum();
    reg + model.c_param * hinge
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Stochastic subgradient (Pegasos) training with seeded shuffling.
///
/// Runs `epochs` passes with step `1 / (lambda t)`, `lambda = 1 / (C n)`,
/// averaging the iterates of the second half. The bias rides along as a
/// constant feature during the stochastic phase and is then set to the exact
/// minimizer of the objective for the averaged weights.
pub fn svm_train(samples: &[LabeledSample], c_param: f64, epochs: usize, seed: u64) -> Result<SvmModel, LearnError> {
    if !(c_param > 0.0 && c_param.is_finite()) {
        return Err(LearnError::InvalidParameter(format!("c_param must be positive, got {c_param}")));
    }
    let has_pos = samples.iter().any(|s| s.label == Label::Sign);
    let has_neg = samples.iter().any(|s| s.label == Label::NonSign);
    if !(has_pos && has_neg) {
        return Err(LearnError::SingleClassData);
    }
    let d = samples[0].features.len();
    if let Some(bad) = samples.iter().find(|s| s.features.len() != d) {
        return Err(LearnError::DimensionMismatch { expected: d, got: bad.features.len() });
    }

    let n = samples.len();
    let lambda = 1.0 / (c_param * n as f64);
    let total_steps = epochs.max(1) * n;
    let avg_from = total_steps / 2;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut w_avg = vec![0.0; d];
    let mut avg_count = 0usize;
    let mut t = 0usize;

    for _ in 0..epochs.max(1) {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let s = &samples[i];
            let y = s.label.sign();
            let eta = 1.0 / (lambda * t as f64);
            let margin = y * (dot(&w, &s.features) + b);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|wi| *wi *= shrink);
            b *= shrink;
            if margin < 1.0 {
                for (wi, xi) in w.iter_mut().zip(&s.features) {
                    *wi += eta * y * xi;
                }
                b += eta * y;
            }
            if t > avg_from {
                avg_count += 1;
                let k = 1.0 / avg_count as f64;
                for (a, wi) in w_avg.iter_mut().zip(&w) {
                    *a += (wi - *a) * k;
                }
            }
        }
    }

    let bias = optimal_bias(&w_avg, samples);
    Ok(SvmModel { weights: w_avg, bias, c_param })
}

/// Exact minimizer over `b` of the hinge sum for fixed weights. The
/// objective is piecewise linear in `b` with kinks at `y_i - w . x_i`;
/// walk the kinks until the right derivative turns non-negative.
fn optimal_bias(w: &[f64], samples: &[LabeledSample]) -> f64 {
    let mut kinks: Vec<(f64, Label)> = samples.iter().map(|s| (s.label.sign() - dot(w, &s.features), s.label)).collect();
    kinks.sort_by(|a, b| a.0.total_cmp(&b.0));
    // right derivative / C = #neg with kink <= b  -  #pos with kink > b
    let mut pos_above = samples.iter().filter(|s| s.label == Label::Sign).count() as i64;
    let mut neg_below = 0i64;
    let mut i = 0;
    while i < kinks.len() {
        let at = kinks[i].0;
        while i < kinks.len() && kinks[i].0 == at {
            match kinks[i].1 {
                Label::Sign => pos_above -= 1,
                Label::NonSign => neg_below += 1,
            }
            i += 1;
        }
        if neg_below - pos_above >= 0 {
            return at;
        }
    }
    kinks.last().map_or(0.0, |k| k.0)
}

/// Score and label; a zero score is labeled positive.
pub fn svm_decide(model: &SvmModel, v: &[f64]) -> Result<(f64, Label), LearnError> {
    if v.len() != model.weights.len() {
        return Err(LearnError::DimensionMismatch { expected: model.weights.len(), got: v.len() });
    }
    let score = dot(&model.weights, v) + model.bias;
    Ok((score, if score >= 0.0 { Label::Sign } else { Label::NonSign }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &[f64], label: Label) -> LabeledSample {
        LabeledSample { features: x.to_vec(), label }
    }

    #[test]
    fn one_dimensional_separable() {
        let data = vec![
            s(&[-2.0], Label::NonSign),
            s(&[-1.0], Label::NonSign),
            s(&[1.0], Label::Sign),
            s(&[2.0], Label::Sign),
        ];
        let m = svm_train(&data, 10.0, 200, 1).unwrap();
        for d in &data {
            assert_eq!(svm_decide(&m, &d.features).unwrap().1, d.label);
        }
        let boundary = -m.bias / m.weights[0];
        assert!(boundary > -1.0 && boundary < 1.0, "{boundary}");
    }

    #[test]
    fn xor_is_not_separable() {
        let data = vec![
            s(&[0.0, 0.0], Label::NonSign),
            s(&[1.0, 1.0], Label::NonSign),
            s(&[0.0, 1.0], Label::Sign),
            s(&[1.0, 0.0], Label::Sign),
        ];
        let m = svm_train(&data, 1.0, 100, 3).unwrap();
        assert!(svm_objective(&m, &data) > 0.0);
        let errors = data.iter().filter(|d| svm_decide(&m, &d.features).unwrap().1 != d.label).count();
        assert!(errors > 0);
    }

    #[test]
    fn decide_examples() {
        let m = SvmModel { weights: vec![1.0, 0.0], bias: -1.0, c_param: 1.0 };
        assert_eq!(svm_decide(&m, &[3.0, 5.0]).unwrap(), (2.0, Label::Sign));
        assert_eq!(svm_decide(&m, &[0.0, 0.0]).unwrap(), (-1.0, Label::NonSign));
        assert_eq!(svm_decide(&m, &[1.0, 7.0]).unwrap(), (0.0, Label::Sign));
        assert!(svm_decide(&m, &[1.0]).is_err());
    }

    #[test]
    fn rejects_single_class_and_bad_c() {
        let data = vec![s(&[1.0], Label::Sign), s(&[2.0], Label::Sign)];
        assert_eq!(svm_train(&data, 1.0, 10, 0), Err(LearnError::SingleClassData));
        let both = vec![s(&[1.0], Label::Sign), s(&[-2.0], Label::NonSign)];
        assert!(svm_train(&both, 0.0, 10, 0).is_err());
    }

    #[test]
    fn optimal_bias_is_a_minimizer() {
        let data: Vec<LabeledSample> = (0..15)
            .map(|i| {
                let x = (i as f64 * 0.37).sin() * 3.0;
                s(&[x], if (i * 7) % 3 == 0 { Label::Sign } else { Label::NonSign })
            })
            .collect();
        let w = [0.8];
        let b = optimal_bias(&w, &data);
        let obj = |b: f64| svm_objective(&SvmModel { weights: w.to_vec(), bias: b, c_param: 1.0 }, &data);
        for k in -300..300 {
            let other = k as f64 * 0.02;
            assert!(obj(b) <= obj(other) + 1e-12, "b={b} other={other}");
        }
    }
}
