//! Weighted pool-adjacent-violators.

/// Weighted least-squares projection of `y` onto nondecreasing sequences.
pub fn pava(y: &[f64], w: &[f64]) -> Vec<f64> {
    debug_assert_eq!(y.len(), w.len());
    // (weighted mean, total weight, count)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(y.len());
    for (&yi, &wi) in y.iter().zip(w) {
        let mut cur = (yi, wi, 1usize);
        while let Some(&(m, wt, c)) = blocks.last() {
            if m <= cur.0 {
                break;
            }
            blocks.pop();
            let tw = wt + cur.1;
            cur = ((m * wt + cur.0 * cur.1) / tw, tw, c + cur.2);
        }
        blocks.push(cur);
    }
    let mut out = Vec::with_capacity(y.len());
    for (m, _, c) in blocks {
        out.extend(std::iter::repeat_n(m, c));
    }
    out
}

/// Worst normalized violation of the monotone-cone optimality conditions for `theta` as the fit of `y`.
pub fn monotone_kkt(y: &[f64], w: &[f64], theta: &[f64]) -> f64 {
    let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let wsum: f64 = w.iter().sum();
    let mut worst = 0.0f64;
    let mut cum = 0.0;
    for i in 0..y.len() {
        cum += w[i] * (theta[i] - y[i]);
        if i + 1 < y.len() {
            let gap = theta[i + 1] - theta[i];
            let lambda = -cum / (scale * wsum);
            worst = worst.max((-gap).max(0.0) / scale);
            worst = worst.max((-lambda).max(0.0));
            worst = worst.max(lambda.abs() * gap.abs() / scale);
        }
    }
    worst.max(cum.abs() / (scale * wsum))
}
