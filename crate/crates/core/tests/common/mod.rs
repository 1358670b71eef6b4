//! Brute-force reference solvers used only by tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn objective(y: &[f64], w: &[f64], t: &[f64]) -> f64 {
    y.iter().zip(w).zip(t).map(|((y, w), t)| w * (y - t) * (y - t)).sum::<f64>() * 0.5
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Minimizes over all partitions into consecutive blocks whose means are nondecreasing.
pub fn isotonic_enum(y: &[f64], w: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let mut t = vec![0.0; n];
        let mut start = 0;
        let mut prev = f64::NEG_INFINITY;
        let mut ok = true;
        for i in 0..n {
            let cut = i + 1 == n || mask & (1 << i) != 0;
            if cut {
                let (sw, swy) = (start..=i).fold((0.0, 0.0), |(a, b), k| (a + w[k], b + w[k] * y[k]));
                let m = swy / sw;
                if m < prev - 1e-12 {
                    ok = false;
                    break;
                }
                prev = m;
                t[start..=i].iter_mut().for_each(|v| *v = m);
                start = i + 1;
            }
        }
        if ok {
            let obj = objective(y, w, &t);
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, t));
            }
        }
    }
    best.unwrap().1
}

fn weighted_ls(basis: &DMatrix<f64>, y: &[f64], w: &[f64]) -> Vec<f64> {
    let n = y.len();
    let sw = DVector::from_iterator(n, w.iter().map(|v| v.sqrt()));
    let mut a = basis.clone();
    for i in 0..n {
        for j in 0..a.ncols() {
            a[(i, j)] *= sw[i];
        }
    }
    let b = DVector::from_iterator(n, y.iter().zip(w).map(|(y, w)| y * w.sqrt()));
    let beta = a.svd(true, true).solve(&b, 1e-13).unwrap();
    (basis * beta).iter().copied().collect()
}

fn kinks(x: &[f64], t: &[f64]) -> Vec<f64> {
    (1..x.len() - 1)
        .map(|k| (t[k + 1] - t[k]) / (x[k + 1] - x[k]) - (t[k] - t[k - 1]) / (x[k] - x[k - 1]))
        .collect()
}

/// Minimizes over all kink sets: least-squares linear splines that turn out convex.
pub fn convex_enum(x: &[f64], y: &[f64], w: &[f64]) -> Vec<f64> {
    let n = x.len();
    let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << (n - 2)) {
        let knots: Vec<usize> = (1..n - 1).filter(|k| mask & (1 << (k - 1)) != 0).collect();
        let basis = DMatrix::from_fn(n, 2 + knots.len(), |i, j| match j {
            0 => 1.0,
            1 => x[i],
            _ => (x[i] - x[knots[j - 2]]).max(0.0),
        });
        let t = weighted_ls(&basis, y, w);
        if kinks(x, &t).iter().all(|&d| d >= -1e-9 * scale) {
            let obj = objective(y, w, &t);
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, t));
            }
        }
    }
    best.unwrap().1
}

/// Minimizes over all tight-sign patterns of adjacent Lipschitz constraints.
pub fn lipschitz_enum(x: &[f64], y: &[f64], w: &[f64], lip: f64) -> Vec<f64> {
    let n = x.len();
    let c: Vec<f64> = (0..n - 1).map(|i| lip * (x[i + 1] - x[i])).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let total = 3usize.pow((n - 1) as u32);
    for code in 0..total {
        let mut sign = vec![0i32; n - 1];
        let mut r = code;
        for s in sign.iter_mut() {
            *s = (r % 3) as i32 - 1;
            r /= 3;
        }
        let mut t = vec![0.0; n];
        let mut start = 0;
        while start < n {
            let mut end = start;
            let mut offs = vec![0.0];
            while end + 1 < n && sign[end] != 0 {
                let o = offs[offs.len() - 1] + sign[end] as f64 * c[end];
                offs.push(o);
                end += 1;
            }
            let (sw, swy) = (start..=end).fold((0.0, 0.0), |(a, b), k| (a + w[k], b + w[k] * (y[k] - offs[k - start])));
            for k in start..=end {
                t[k] = swy / sw + offs[k - start];
            }
            start = end + 1;
        }
        if (0..n - 1).all(|i| (t[i + 1] - t[i]).abs() <= c[i] * (1.0 + 1e-12) + 1e-12) {
            let obj = objective(y, w, &t);
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, t));
            }
        }
    }
    best.unwrap().1
}

/// Dense QP with every pairwise Hölder constraint.
pub fn holder_qp(x: &[f64], y: &[f64], w: &[f64], gamma: f64, lip: f64) -> Vec<f64> {
    let n = x.len();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = w[i];
    }
    let cvec: Vec<f64> = y.iter().zip(w).map(|(y, w)| -y * w).collect();
    let mut amat = Vec::new();
    let mut bvec = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let b = lip * (x[j] - x[i]).powf(gamma);
            for s in [1.0, -1.0] {
                let mut row = vec![0.0; n];
                row[j] = s;
                row[i] = -s;
                amat.extend(row);
                bvec.push(b);
            }
        }
    }
    quadprog::solve_qp(&mut q, &cvec, &amat, &bvec, 0, false).unwrap().sol
}

/// Dense QP with the convex second-difference constraints.
pub fn convex_qp(x: &[f64], y: &[f64], w: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = w[i];
    }
    let cvec: Vec<f64> = y.iter().zip(w).map(|(y, w)| -y * w).collect();
    let mut amat = Vec::new();
    for k in 1..n - 1 {
        let (a, b) = (x[k] - x[k - 1], x[k + 1] - x[k]);
        let mut row = vec![0.0; n];
        // −(slope_right − slope_left) ≤ 0
        row[k - 1] = -1.0 / a;
        row[k] = 1.0 / a + 1.0 / b;
        row[k + 1] = -1.0 / b;
        amat.extend(row);
    }
    let bvec = vec![0.0; n - 2];
    quadprog::solve_qp(&mut q, &cvec, &amat, &bvec, 0, false).unwrap().sol
}

/// Sorted, well-separated abscissae in [0, 1].
pub fn random_design<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let min_gap = 1e-3f64.min(0.01 / (n * n) as f64);
    loop {
        let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        x.sort_by(f64::total_cmp);
        if x.windows(2).all(|p| p[1] - p[0] > min_gap) {
            return x;
        }
    }
}

pub fn random_values<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * (rng.random::<f64>() * 2.0 - 1.0)).collect()
}

pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| if rng.random::<f64>() < 0.3 { rng.random_range(1..4) as f64 } else { 1.0 }).collect()
}
