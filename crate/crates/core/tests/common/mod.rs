//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use tnnflow_core::Matrix;

/// Weyl dimension formula for SL(n): `Π_{i<j} (λ_i − λ_j + j − i)/(j − i)`
/// with `λ_i = Σ_{k ≥ i} c_k`.
pub fn weyl_dimension(coeffs: &[u32]) -> u64 {
    let n = coeffs.len() + 1;
    let lam: Vec<i64> = (0..n)
        .map(|i| coeffs[i.min(n - 1)..].iter().map(|&c| c as i64).sum())
        .collect();
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 0..n {
        for j in i + 1..n {
            num *= (lam[i] - lam[j] + (j - i) as i64) as i128;
            den *= (j - i) as i128;
        }
    }
    assert_eq!(num % den, 0);
    (num / den) as u64
}

/// `exp(A)` by scaling and squaring of a truncated Taylor series.
pub fn expm_series(a: &Matrix<f64>) -> Matrix<f64> {
    let n = a.rows();
    let norm = a.max_abs() * n as f64;
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(&(0.5f64).powi(s));
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..30 {
        term = (&term * &scaled).scale(&(1.0 / k as f64));
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Dominant eigenvalue of a symmetric matrix by shifted power iteration.
pub fn power_iteration_top(a: &Matrix<f64>, shift: f64) -> f64 {
    let n = a.rows();
    let shifted = &*a + &Matrix::from_fn(n, n, |i, j| if i == j { shift } else { 0.0 });
    let mut v = vec![1.0; n];
    for (i, x) in v.iter_mut().enumerate() {
        *x += 0.01 * i as f64;
    }
    let mut lambda = 0.0;
    for _ in 0..20000 {
        let w = shifted.mul_vec(&v);
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let next: Vec<f64> = w.iter().map(|x| x / nw).collect();
        let diff: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = next;
        lambda = nw;
        if diff < 1e-15 {
            break;
        }
    }
    lambda - shift
}

fn inversions(p: &[usize]) -> usize {
    (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count()
}

/// Bruhat order on permutations via the tableau criterion: sorted prefixes
/// compare entrywise.
fn bruhat_le(u: &[usize], w: &[usize]) -> bool {
    (1..=u.len()).all(|k| {
        let mut a = u[..k].to_vec();
        let mut b = w[..k].to_vec();
        a.sort();
        b.sort();
        a.iter().zip(&b).all(|(x, y)| x <= y)
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Number of Bruhat intervals `[u, w]` in `S_n` of each length
/// `ℓ(w) − ℓ(u)`.
#[allow(dead_code)]
pub fn bruhat_interval_counts(n: usize) -> Vec<usize> {
    let perms = permutations(n);
    let top = n * (n - 1) / 2;
    let mut counts = vec![0; top + 1];
    for u in &perms {
        for w in &perms {
            if bruhat_le(u, w) {
                counts[inversions(w) - inversions(u)] += 1;
            }
        }
    }
    counts
}
