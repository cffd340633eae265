use nalgebra::{DMatrix, DVector};

/// Nonnegative least squares `min ||A x - b||` subject to `x >= 0`
/// (Lawson-Hanson active set). Columns are normalized internally.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let (rows, cols) = a.shape();
    let scales: Vec<f64> = (0..cols)
        .map(|j| {
            let n = a.column(j).norm();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    for (j, s) in scales.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*s);
    }

    let tol = 10.0 * f64::EPSILON * (rows.max(cols) as f64) * b.norm().max(1.0);
    let mut x = DVector::<f64>::zeros(cols);
    let mut passive = vec![false; cols];

    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let idx: Vec<usize> = (0..cols).filter(|&j| passive[j]).collect();
        let mut sub = DMatrix::<f64>::zeros(rows, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            sub.set_column(k, &scaled.column(j));
        }
        let sol = sub
            .svd(true, true)
            .solve(b, f64::EPSILON)
            .unwrap_or_else(|_| DVector::zeros(idx.len()));
        let mut full = DVector::zeros(cols);
        for (k, &j) in idx.iter().enumerate() {
            full[j] = sol[k];
        }
        full
    };

    for _ in 0..(3 * cols + 10) {
        let gradient = scaled.transpose() * (b - &scaled * &x);
        let candidate = (0..cols)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| gradient[i].total_cmp(&gradient[j]));
        let Some(j) = candidate.filter(|&j| gradient[j] > tol) else {
            break;
        };
        passive[j] = true;

        loop {
            let s = solve_passive(&passive);
            let blocked: Vec<usize> = (0..cols).filter(|&i| passive[i] && s[i] <= 0.0).collect();
            if blocked.is_empty() {
                x = s;
                break;
            }
            let alpha = blocked
                .iter()
                .map(|&i| x[i] / (x[i] - s[i]))
                .fold(f64::INFINITY, f64::min);
            x += (s - &x) * alpha;
            for i in 0..cols {
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }

    for (j, s) in scales.iter().enumerate() {
        x[j] /= s;
    }
    x
}
