/// Weighted isotonic regression onto nondecreasing sequences
/// (pool-adjacent-violators). Input is `(value, weight)` in x order.
pub fn isotonic_nondecreasing(points: &[(f64, f64)]) -> Vec<f64> {
    // Blocks of (weighted mean, total weight, length).
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(points.len());
    for &(y, w) in points {
        blocks.push((y, w, 1));
        while blocks.len() > 1 {
            let (y2, w2, n2) = blocks[blocks.len() - 1];
            let (y1, w1, n1) = blocks[blocks.len() - 2];
            if y1 <= y2 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            let w = w1 + w2;
            let mean = if w > 0.0 {
                (y1 * w1 + y2 * w2) / w
            } else {
                (y1 + y2) / 2.0
            };
            blocks.push((mean, w, n1 + n2));
        }
    }
    blocks
        .into_iter()
        .flat_map(|(y, _, n)| std::iter::repeat_n(y, n))
        .collect()
}

/// Ranks with ties given their average 1-based rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of the tie-averaged ranks.
/// `None` for fewer than two points or a constant input.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pava_pools_violators() {
        let fit = isotonic_nondecreasing(&[(1.0, 1.0), (3.0, 1.0), (2.0, 1.0), (4.0, 1.0)]);
        assert_eq!(fit, vec![1.0, 2.5, 2.5, 4.0]);
        let fit = isotonic_nondecreasing(&[(3.0, 3.0), (0.0, 1.0)]);
        assert_eq!(fit, vec![2.25, 2.25]);
        assert!(isotonic_nondecreasing(&[]).is_empty());
    }

    #[test]
    fn spearman_known_values() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(spearman(&x, &[2.0, 4.0, 8.0, 16.0, 32.0]), Some(1.0));
        assert_eq!(spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]), Some(-1.0));
        // d = (0, 0, 1, -1, 0): 1 - 6 * 2 / (5 * 24) = 0.9.
        let rho = spearman(&x, &[1.0, 2.0, 4.0, 3.0, 5.0]).unwrap();
        assert!((rho - 0.9).abs() < 1e-12);
        assert_eq!(spearman(&x, &[1.0; 5]), None);
        assert_eq!(spearman(&[1.0], &[1.0]), None);
    }

    proptest! {
        #[test]
        fn isotonic_output_is_monotone_and_preserves_mass(
            pts in prop::collection::vec((0.0f64..1.0, 0.1f64..10.0), 0..40)
        ) {
            let fit = isotonic_nondecreasing(&pts);
            prop_assert_eq!(fit.len(), pts.len());
            prop_assert!(fit.windows(2).all(|w| w[0] <= w[1] + 1e-12));
            let before: f64 = pts.iter().map(|(y, w)| y * w).sum();
            let after: f64 = pts.iter().zip(&fit).map(|((_, w), f)| w * f).sum();
            prop_assert!((before - after).abs() <= 1e-9 * before.abs().max(1.0));
        }
    }
}
