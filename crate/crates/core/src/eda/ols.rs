//! Least squares via Householder QR.

use crate::error::{Error, Result};

/// Relative threshold below which a column's residual norm marks it as
/// linearly dependent on the columns before it.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

/// Column-oriented QR state: `kept` lists the design columns that were
/// independent of their predecessors; `r` is upper triangular over them.
struct Qr {
    kept: Vec<usize>,
    r: Vec<Vec<f64>>,
    qty: Vec<f64>,
}

fn householder(columns: &[Vec<f64>], target: &[f64]) -> Qr {
    let n = target.len();
    let mut work: Vec<Vec<f64>> = columns.to_vec();
    let mut qty = target.to_vec();
    let mut reflectors: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut kept = Vec::new();
    let mut r_cols: Vec<Vec<f64>> = Vec::new();

    for (j, original) in columns.iter().enumerate() {
        let k = kept.len();
        if k >= n {
            break;
        }
        let col = &mut work[j];
        for (start, v) in &reflectors {
            apply(v, *start, col);
        }
        let scale = original.iter().map(|x| x * x).sum::<f64>().sqrt();
        let tail_norm = col[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if scale == 0.0 || tail_norm <= RANK_TOL * scale {
            continue;
        }
        let alpha = if col[k] > 0.0 { -tail_norm } else { tail_norm };
        let mut v = vec![0.0; n - k];
        v[0] = col[k] - alpha;
        v[1..].copy_from_slice(&col[k + 1..]);
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            v.iter_mut().for_each(|x| *x /= vnorm);
            apply(&v, k, col);
            apply(&v, k, &mut qty);
            reflectors.push((k, v));
        }
        col[k] = alpha;
        r_cols.push(col[..=k].to_vec());
        kept.push(j);
    }
    // r[i][c] for row i, kept column c
    let p = kept.len();
    let mut r = vec![vec![0.0; p]; p];
    for (c, col) in r_cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            r[i][c] = *v;
        }
    }
    Qr { kept, r, qty }
}

fn apply(v: &[f64], start: usize, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(&x[start..]).map(|(a, b)| a * b).sum();
    for (xi, vi) in x[start..].iter_mut().zip(v) {
        *xi -= 2.0 * dot * vi;
    }
}

fn back_substitute(r: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let p = r.len();
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = ((i + 1)..p).map(|j| r[i][j] * beta[j]).sum();
        beta[i] = (rhs[i] - s) / r[i][i];
    }
    beta
}

fn r_squared(target: &[f64], residuals: &[f64]) -> Result<f64> {
    let mean = target.iter().sum::<f64>() / target.len() as f64;
    let tss: f64 = target.iter().map(|y| (y - mean) * (y - mean)).sum();
    if tss == 0.0 {
        return Err(Error::ZeroVariance(Some("regression target".into())));
    }
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    Ok((1.0 - rss / tss).clamp(0.0, 1.0))
}

fn columns_of(design: &[Vec<f64>], n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..p).map(|j| (0..n).map(|i| design[i][j]).collect()).collect()
}

fn check_shape(design: &[Vec<f64>], target: &[f64]) -> Result<usize> {
    let n = design.len();
    if n != target.len() {
        return Err(Error::DimensionMismatch(format!(
            "design has {n} rows, target has {}",
            target.len()
        )));
    }
    let p = design.first().map_or(0, Vec::len);
    if design.iter().any(|row| row.len() != p) {
        return Err(Error::DimensionMismatch("ragged design rows".into()));
    }
    if p == 0 || n <= p {
        return Err(Error::DimensionMismatch(format!("need n > p, got n = {n}, p = {p}")));
    }
    Ok(p)
}

/// Least-squares fit of `target` on the rows of `design` (which should
/// include an intercept column). `r_squared = 1 - RSS/TSS`.
pub fn ols_fit(design: &[Vec<f64>], target: &[f64]) -> Result<OlsFit> {
    let p = check_shape(design, target)?;
    let n = design.len();
    let qr = householder(&columns_of(design, n, p), target);
    if qr.kept.len() < p {
        return Err(Error::RankDeficient);
    }
    let coefficients = back_substitute(&qr.r, &qr.qty[..p]);
    let residuals: Vec<f64> = (0..n)
        .map(|i| target[i] - design[i].iter().zip(&coefficients).map(|(x, b)| x * b).sum::<f64>())
        .collect();
    let r_squared = r_squared(target, &residuals)?;
    Ok(OlsFit {
        coefficients,
        r_squared,
        residuals,
    })
}

/// R² of the projection of `target` onto the span of `columns`, which may be
/// linearly dependent (dependent columns are skipped).
pub(crate) fn projection_r_squared(columns: &[Vec<f64>], target: &[f64]) -> Result<f64> {
    let qr = householder(columns, target);
    let p = qr.kept.len();
    // residual = Q [0; (Qᵀy)[p..]]; its norm is the tail norm of Qᵀy
    let rss: f64 = qr.qty[p..].iter().map(|x| x * x).sum();
    let mean = target.iter().sum::<f64>() / target.len() as f64;
    let tss: f64 = target.iter().map(|y| (y - mean) * (y - mean)).sum();
    if tss == 0.0 {
        return Err(Error::ZeroVariance(Some("regression target".into())));
    }
    Ok((1.0 - rss / tss).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_intercept(cols: &[&[f64]]) -> Vec<Vec<f64>> {
        (0..cols[0].len())
            .map(|i| std::iter::once(1.0).chain(cols.iter().map(|c| c[i])).collect())
            .collect()
    }

    /// Solves XᵀX b = Xᵀy by Gaussian elimination with partial pivoting.
    fn normal_equations(design: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        let p = design[0].len();
        let mut a = vec![vec![0.0; p + 1]; p];
        for (row, yi) in design.iter().zip(y) {
            for i in 0..p {
                for j in 0..p {
                    a[i][j] += row[i] * row[j];
                }
                a[i][p] += row[i] * yi;
            }
        }
        for c in 0..p {
            let piv = (c..p).max_by(|&x, &z| a[x][c].abs().total_cmp(&a[z][c].abs())).unwrap();
            a.swap(c, piv);
            for r in 0..p {
                if r != c {
                    let f = a[r][c] / a[c][c];
                    for k in c..=p {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
        (0..p).map(|i| a[i][p] / a[i][i]).collect()
    }

    #[test]
    fn exact_fit_on_one_predictor() {
        let x1 = [1.0, 2.0, 4.0, 7.0, 3.0];
        let x2 = [5.0, 1.0, 2.0, 2.0, 9.0];
        let fit = ols_fit(&with_intercept(&[&x1, &x2]), &x1).unwrap();
        assert!((fit.coefficients[0]).abs() < 1e-10);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-10);
        assert!(fit.coefficients[2].abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_target_has_zero_slopes() {
        // centered predictor orthogonal to a centered target
        let x = [-1.0, 1.0, -1.0, 1.0];
        let y = [1.0, 1.0, -1.0, -1.0];
        let fit = ols_fit(&with_intercept(&[&x]), &y).unwrap();
        assert!(fit.coefficients[1].abs() < 1e-12);
        assert!(fit.r_squared.abs() < 1e-12);
    }

    #[test]
    fn matches_normal_equations() {
        let x1 = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x2 = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0];
        let y = [3.1, 3.9, 7.2, 7.8, 11.1, 12.2];
        let design = with_intercept(&[&x1, &x2]);
        let fit = ols_fit(&design, &y).unwrap();
        let oracle = normal_equations(&design, &y);
        for (a, b) in fit.coefficients.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn rank_deficiency_and_shape_errors() {
        let x1 = [1.0, 2.0, 3.0, 4.0];
        let x2 = [2.0, 4.0, 6.0, 8.0];
        assert!(matches!(
            ols_fit(&with_intercept(&[&x1, &x2]), &[1.0, 0.0, 1.0, 3.0]),
            Err(Error::RankDeficient)
        ));
        assert!(matches!(
            ols_fit(&with_intercept(&[&x1]), &[1.0, 2.0]),
            Err(Error::DimensionMismatch(_))
        ));
        let r2 = projection_r_squared(&[vec![1.0; 4], x1.to_vec(), x2.to_vec()], &[2.0, 4.0, 6.0, 8.5]).unwrap();
        assert!(r2 > 0.9 && r2 < 1.0);
    }
}
