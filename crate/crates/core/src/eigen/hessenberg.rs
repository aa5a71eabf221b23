
/// Householder vector for `x`: returns `(beta, tau)` and overwrites
/// `x[1..]` with `v[1..]` (`v[0] = 1`) such that `(I − τvvᵀ)x = βe₁`.
///
/// The sign of `beta` is opposite to `x[0]`, which avoids cancellation.
pub(crate) fn householder(x: &mut [f64]) -> (f64, f64) {
    let alpha = x[0];
    let tail_norm = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
    if tail_norm == 0.0 {
        return (alpha, 0.0);
    }
    let beta = -alpha.signum() * alpha.hypot(tail_norm);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for v in &mut x[1..] {
        *v *= scale;
    }
    (beta, tau)
}

/// Reduces row-major `a` (n×n) to upper Hessenberg form in place by
/// orthogonal similarity. Entries below the first subdiagonal are zeroed.
pub(crate) fn reduce_to_hessenberg(a: &mut [f64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let v = &mut v[..len];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = a[(k + 1 + i) * n + k];
        }
        let (beta, tau) = householder(v);
        if tau == 0.0 {
            continue;
        }
        v[0] = 1.0;

        // Left: rows k+1.., columns k+1.. (column k is set explicitly below).
        let w = &mut w[k + 1..n];
        w.iter_mut().for_each(|x| *x = 0.0);
        for (i, &vi) in v.iter().enumerate() {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            for (wj, &r) in w.iter_mut().zip(row) {
                *wj += vi * r;
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            let f = tau * vi;
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            for (r, &wj) in row.iter_mut().zip(w.iter()) {
                *r -= f * wj;
            }
        }
        a[(k + 1) * n + k] = beta;
        for i in k + 2..n {
            a[i * n + k] = 0.0;
        }

        // Right: all rows, columns k+1..
        for r in 0..n {
            let row = &mut a[r * n + k + 1..(r + 1) * n];
            let s: f64 = row.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
            if s == 0.0 {
                continue;
            }
            let f = tau * s;
            for (x, &vi) in row.iter_mut().zip(v.iter()) {
                *x -= f * vi;
            }
        }
    }
}
