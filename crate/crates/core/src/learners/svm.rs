use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::Classifier;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

#[inline]
fn kernel_unchecked(kernel: Kernel, x: &[f64], y: &[f64]) -> f64 {
    match kernel {
        Kernel::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
        Kernel::Rbf { gamma } => (-gamma * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).exp(),
    }
}

pub fn kernel_eval(kernel: Kernel, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ArityMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(kernel_unchecked(kernel, x, y))
}

/// Binary decision function `f(x) = Σ coefᵢ K(svᵢ, x) + bias` with `coefᵢ = αᵢ yᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryMachine {
    pub support_vectors: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub kernel: Kernel,
    pub c: f64,
}

impl BinaryMachine {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, a)| a * kernel_unchecked(self.kernel, sv, x))
            .sum::<f64>()
            + self.bias
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoParams {
    pub c: f64,
    pub tol: f64,
    /// Cap on full or non-bound sweeps over the training set.
    pub max_passes: usize,
}

impl Default for SmoParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BinaryFit {
    pub machine: BinaryMachine,
    /// Dual variables for every training row, in input order.
    pub alphas: Vec<f64>,
    /// Dual objective after each accepted step.
    pub objective_trace: Vec<f64>,
    /// False when `max_passes` was reached before the KKT conditions held.
    pub converged: bool,
    pub passes: usize,
    /// Steps where the new α had to be clipped back into `[0, C]` after rounding.
    pub clipped: usize,
}

const ALPHA_EPS: f64 = 1e-12;
const STEP_EPS: f64 = 1e-10;
/// Kernel matrices up to this many rows are precomputed.
const FULL_KERNEL_LIMIT: usize = 4096;

struct Smo<'a> {
    x: &'a [&'a [f64]],
    y: &'a [f64],
    kernel: Kernel,
    gram: Option<Vec<f64>>,
    c: f64,
    tol: f64,
    alpha: Vec<f64>,
    /// `f_i = Σ_j α_j y_j K(j, i)`, excluding the bias.
    f: Vec<f64>,
    b: f64,
    objective: f64,
    trace: Vec<f64>,
    clipped: usize,
}

impl<'a> Smo<'a> {
    fn new(x: &'a [&'a [f64]], y: &'a [f64], kernel: Kernel, params: &SmoParams) -> Self {
        let n = x.len();
        let gram = (n <= FULL_KERNEL_LIMIT).then(|| {
            let mut g = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = kernel_unchecked(kernel, x[i], x[j]);
                    g[i * n + j] = v;
                    g[j * n + i] = v;
                }
            }
            g
        });
        Self {
            x,
            y,
            kernel,
            gram,
            c: params.c,
            tol: params.tol,
            alpha: vec![0.0; n],
            f: vec![0.0; n],
            b: 0.0,
            objective: 0.0,
            trace: Vec::new(),
            clipped: 0,
        }
    }

    #[inline]
    fn k(&self, i: usize, j: usize) -> f64 {
        match &self.gram {
            Some(g) => g[i * self.x.len() + j],
            None => kernel_unchecked(self.kernel, self.x[i], self.x[j]),
        }
    }

    #[inline]
    fn error(&self, i: usize) -> f64 {
        self.f[i] + self.b - self.y[i]
    }

    fn non_bound(&self, i: usize) -> bool {
        self.alpha[i] > ALPHA_EPS && self.alpha[i] < self.c - ALPHA_EPS
    }

    /// Part of the dual objective that depends on the pair (i1, i2) when
    /// they take values (a1, a2) and every other α stays fixed.
    fn pair_objective(&self, i1: usize, i2: usize, a1: f64, a2: f64) -> f64 {
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (k11, k12, k22) = (self.k(i1, i1), self.k(i1, i2), self.k(i2, i2));
        let v1 = self.f[i1] - self.alpha[i1] * y1 * k11 - self.alpha[i2] * y2 * k12;
        let v2 = self.f[i2] - self.alpha[i1] * y1 * k12 - self.alpha[i2] * y2 * k22;
        a1 + a2 - 0.5 * (a1 * a1 * k11 + a2 * a2 * k22 + 2.0 * y1 * y2 * a1 * a2 * k12) - y1 * a1 * v1 - y2 * a2 * v2
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (e1, e2) = (self.error(i1), self.error(i2));
        let s = y1 * y2;
        let c = self.c;
        let (lo, hi) = if s < 0.0 {
            ((a2 - a1).max(0.0), (c + a2 - a1).min(c))
        } else {
            ((a1 + a2 - c).max(0.0), (a1 + a2).min(c))
        };
        if hi - lo <= ALPHA_EPS {
            return false;
        }
        let (k11, k12, k22) = (self.k(i1, i1), self.k(i1, i2), self.k(i2, i2));
        let eta = k11 + k22 - 2.0 * k12;
        let mut a2_new = if eta > 0.0 {
            (a2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // objective is linear (or convex) along the constraint line: pick the better end
            let at = |a2x: f64| self.pair_objective(i1, i2, a1 + s * (a2 - a2x), a2x);
            let (w_lo, w_hi) = (at(lo), at(hi));
            if w_lo > w_hi + STEP_EPS {
                lo
            } else if w_hi > w_lo + STEP_EPS {
                hi
            } else {
                a2
            }
        };
        if a2_new < ALPHA_EPS {
            a2_new = 0.0;
        } else if a2_new > c - ALPHA_EPS {
            a2_new = c;
        }
        if (a2_new - a2).abs() < STEP_EPS * (a2_new + a2 + STEP_EPS) {
            return false;
        }
        let mut a1_new = a1 + s * (a2 - a2_new);
        if a1_new < 0.0 {
            a2_new += s * a1_new;
            a1_new = 0.0;
            self.clipped += 1;
        } else if a1_new > c {
            a2_new += s * (a1_new - c);
            a1_new = c;
            self.clipped += 1;
        }
        if a1_new < ALPHA_EPS {
            a1_new = 0.0;
        } else if a1_new > c - ALPHA_EPS {
            a1_new = c;
        }

        let before = self.pair_objective(i1, i2, a1, a2);
        let after = self.pair_objective(i1, i2, a1_new, a2_new);
        if after < before {
            return false;
        }

        let (d1, d2) = (y1 * (a1_new - a1), y2 * (a2_new - a2));
        let b1 = self.b - e1 - d1 * k11 - d2 * k12;
        let b2 = self.b - e2 - d1 * k12 - d2 * k22;
        let interior = |a: f64| a > ALPHA_EPS && a < c - ALPHA_EPS;
        self.b = if interior(a1_new) {
            b1
        } else if interior(a2_new) {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        for i in 0..self.x.len() {
            self.f[i] += d1 * self.k(i1, i) + d2 * self.k(i2, i);
        }
        self.alpha[i1] = a1_new;
        self.alpha[i2] = a2_new;
        self.objective += after - before;
        self.trace.push(self.objective);
        true
    }

    fn violates_kkt(&self, i: usize) -> bool {
        let r = self.error(i) * self.y[i];
        (r < -self.tol && self.alpha[i] < self.c - ALPHA_EPS) || (r > self.tol && self.alpha[i] > ALPHA_EPS)
    }

    fn examine(&mut self, i2: usize) -> bool {
        if !self.violates_kkt(i2) {
            return false;
        }
        let n = self.x.len();
        let e2 = self.error(i2);
        // second choice: non-bound point with the largest |E1 - E2|
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|&i| self.non_bound(i)) {
            let gap = (self.error(i) - e2).abs();
            if best.is_none_or(|(_, g)| gap > g) {
                best = Some((i, gap));
            }
        }
        if let Some((i1, _)) = best {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        for offset in 1..n {
            let i1 = (i2 + offset) % n;
            if self.non_bound(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        for offset in 1..n {
            let i1 = (i2 + offset) % n;
            if !self.non_bound(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    /// Platt's outer loop; returns (converged, passes used).
    fn run(&mut self, max_passes: usize) -> (bool, usize) {
        let n = self.x.len();
        let mut examine_all = true;
        let mut passes = 0;
        loop {
            if passes >= max_passes {
                return (false, passes);
            }
            passes += 1;
            let mut changed = 0;
            for i in 0..n {
                if (examine_all || self.non_bound(i)) && self.examine(i) {
                    changed += 1;
                }
            }
            if examine_all {
                if changed == 0 {
                    return (true, passes);
                }
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }
    }

    /// Bias from the average over interior points, or the middle of the
    /// feasible interval when every α is at a bound.
    fn settle_bias(&mut self) {
        let interior: Vec<f64> = (0..self.x.len())
            .filter(|&i| self.non_bound(i))
            .map(|i| self.y[i] - self.f[i])
            .collect();
        if !interior.is_empty() {
            self.b = interior.iter().sum::<f64>() / interior.len() as f64;
            return;
        }
        let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..self.x.len() {
            let bound = self.y[i] - self.f[i];
            let at_zero = self.alpha[i] <= ALPHA_EPS;
            if (self.y[i] > 0.0) == at_zero {
                lower = lower.max(bound);
            } else {
                upper = upper.min(bound);
            }
        }
        self.b = match (lower.is_finite(), upper.is_finite()) {
            (true, true) => 0.5 * (lower + upper),
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => 0.0,
        };
    }
}

/// KKT residual of one training point: how far `y f(x)` is from the side
/// required by its α (0: ≥ 1, C: ≤ 1, interior: = 1).
pub fn kkt_residual(alpha: f64, c: f64, y: f64, decision: f64) -> f64 {
    let r = y * decision - 1.0;
    if alpha <= ALPHA_EPS {
        (-r).max(0.0)
    } else if alpha >= c - ALPHA_EPS {
        r.max(0.0)
    } else {
        r.abs()
    }
}

/// Sequential minimal optimization for one binary problem with labels ±1.
pub fn smo_train_binary(rows: &[&[f64]], y: &[f64], kernel: Kernel, params: &SmoParams) -> Result<BinaryFit> {
    if rows.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: y.len(),
        });
    }
    if !(y.iter().any(|&v| v > 0.0) && y.iter().any(|&v| v < 0.0)) {
        return Err(Error::SingleClass);
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::BadParams("binary labels must be +1 or -1".into()));
    }
    if !(params.c > 0.0) {
        return Err(Error::BadParams(format!("C must be positive, got {}", params.c)));
    }
    let mut smo = Smo::new(rows, y, kernel, params);
    let (mut converged, mut passes) = smo.run(params.max_passes);
    smo.settle_bias();
    // the averaged bias can leave points just outside tolerance; resume from there
    for _ in 0..10 {
        if !converged || !(0..rows.len()).any(|i| smo.violates_kkt(i)) {
            break;
        }
        let (c, p) = smo.run(params.max_passes.saturating_sub(passes).max(1));
        converged = c;
        passes += p;
        smo.settle_bias();
    }
    if !converged {
        log::warn!("SMO stopped after {passes} passes without meeting the KKT tolerance");
    }
    let support: Vec<usize> = (0..rows.len()).filter(|&i| smo.alpha[i] > ALPHA_EPS).collect();
    let machine = BinaryMachine {
        support_vectors: support.iter().map(|&i| rows[i].to_vec()).collect(),
        coefficients: support.iter().map(|&i| smo.alpha[i] * y[i]).collect(),
        bias: smo.b,
        kernel,
        c: params.c,
    };
    Ok(BinaryFit {
        machine,
        alphas: smo.alpha,
        objective_trace: smo.trace,
        converged,
        passes,
        clipped: smo.clipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelChoice {
    Linear,
    /// `gamma = None` means `1 / p`.
    Rbf {
        gamma: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: KernelChoice,
    pub tol: f64,
    pub max_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            kernel: KernelChoice::Rbf { gamma: None },
            tol: 1e-3,
            max_passes: 10_000,
        }
    }
}

impl SvmParams {
    pub fn resolved_kernel(&self, p: usize) -> Kernel {
        match self.kernel {
            KernelChoice::Linear => Kernel::Linear,
            KernelChoice::Rbf { gamma } => Kernel::Rbf {
                gamma: gamma.unwrap_or(1.0 / p.max(1) as f64),
            },
        }
    }
}

/// One-vs-one machine for classes `positive < negative`; positive is +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMachine {
    pub positive: usize,
    pub negative: usize,
    pub machine: BinaryMachine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub machines: Vec<PairMachine>,
    pub kernel: Kernel,
    pub c: f64,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDiagnostics {
    pub positive: usize,
    pub negative: usize,
    pub converged: bool,
    pub passes: usize,
    pub n_support: usize,
}

#[derive(Debug, Clone)]
pub struct SvmFit {
    pub model: SvmModel,
    pub diagnostics: Vec<PairDiagnostics>,
    /// Class pairs skipped because one side had no training rows.
    pub omitted_pairs: Vec<(usize, usize)>,
}

pub fn svm_train_multiclass(x: &FeatureMatrix, labels: &[usize], class_names: &[String], params: &SvmParams) -> Result<SvmFit> {
    if labels.len() != x.n_rows {
        return Err(Error::LengthMismatch {
            left: x.n_rows,
            right: labels.len(),
        });
    }
    let k = class_names.len();
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(Error::UnknownLabel(format!("class index {bad}")));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    if by_class.iter().filter(|rows| !rows.is_empty()).count() < 2 {
        return Err(Error::SingleClass);
    }
    let kernel = params.resolved_kernel(x.n_cols);
    let smo = SmoParams {
        c: params.c,
        tol: params.tol,
        max_passes: params.max_passes,
    };
    let mut pairs = Vec::new();
    let mut omitted = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            if by_class[i].is_empty() || by_class[j].is_empty() {
                omitted.push((i, j));
            } else {
                pairs.push((i, j));
            }
        }
    }
    if !omitted.is_empty() {
        log::info!("{} class pairs omitted: a class has no training rows", omitted.len());
    }
    let fits = pairs
        .par_iter()
        .map(|&(i, j)| {
            let idx: Vec<usize> = by_class[i].iter().chain(&by_class[j]).copied().collect();
            let rows: Vec<&[f64]> = idx.iter().map(|&r| x.row(r)).collect();
            let y: Vec<f64> = idx.iter().map(|&r| if labels[r] == i { 1.0 } else { -1.0 }).collect();
            smo_train_binary(&rows, &y, kernel, &smo).map(|fit| (i, j, fit))
        })
        .collect::<Result<Vec<_>>>()?;
    let diagnostics = fits
        .iter()
        .map(|(i, j, f)| PairDiagnostics {
            positive: *i,
            negative: *j,
            converged: f.converged,
            passes: f.passes,
            n_support: f.machine.support_vectors.len(),
        })
        .collect();
    let machines = fits
        .into_iter()
        .map(|(positive, negative, fit)| PairMachine {
            positive,
            negative,
            machine: fit.machine,
        })
        .collect();
    Ok(SvmFit {
        model: SvmModel {
            machines,
            kernel,
            c: params.c,
            feature_names: x.feature_names.clone(),
            class_names: class_names.to_vec(),
        },
        diagnostics,
        omitted_pairs: omitted,
    })
}

/// One-vs-one vote. Ties go to the class with the larger summed |f| over the
/// machines it won, then to the lowest index.
pub fn svm_predict(model: &SvmModel, x: &[f64]) -> Result<(usize, Vec<usize>)> {
    if x.len() != model.feature_names.len() {
        return Err(Error::ArityMismatch {
            expected: model.feature_names.len(),
            got: x.len(),
        });
    }
    let k = model.class_names.len();
    let mut votes = vec![0usize; k];
    let mut margin = vec![0.0f64; k];
    for pm in &model.machines {
        let f = pm.machine.decision(x);
        let winner = if f > 0.0 { pm.positive } else { pm.negative };
        votes[winner] += 1;
        margin[winner] += f.abs();
    }
    let mut best = 0;
    for c in 1..k {
        if votes[c] > votes[best] || (votes[c] == votes[best] && margin[c] > margin[best]) {
            best = c;
        }
    }
    Ok((best, votes))
}

impl Classifier for SvmModel {
    fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn class_names(&self) -> &[String] {
        &self.class_names
    }

    fn scores(&self, x: &[f64]) -> Result<(usize, Vec<f64>)> {
        svm_predict(self, x).map(|(c, v)| (c, v.into_iter().map(|n| n as f64).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        assert_eq!(
            kernel_eval(Kernel::Rbf { gamma: 0.3 }, &[1.0, 2.0], &[1.0, 2.0]).unwrap(),
            1.0
        );
        assert_eq!(kernel_eval(Kernel::Linear, &[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        let v = kernel_eval(Kernel::Rbf { gamma: 0.5 }, &[0.0, 0.0], &[2.0, 0.0]).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.13534).abs() < 1e-5);
        assert!(matches!(
            kernel_eval(Kernel::Linear, &[1.0], &[1.0, 2.0]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn two_point_problem() {
        let a = [-1.0];
        let b = [1.0];
        let rows: Vec<&[f64]> = vec![&a, &b];
        let fit = smo_train_binary(
            &rows,
            &[-1.0, 1.0],
            Kernel::Linear,
            &SmoParams {
                c: 10.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((fit.alphas[0] - 0.5).abs() < 1e-9 && (fit.alphas[1] - 0.5).abs() < 1e-9);
        assert!(fit.machine.bias.abs() < 1e-9);
        for x in [-2.0, 0.3, 1.7] {
            assert!((fit.machine.decision(&[x]) - x).abs() < 1e-9);
        }
        assert!(fit.converged);
    }

    #[test]
    fn duplicated_point_with_both_labels_hits_bounds() {
        let p = [0.5, 0.5];
        let rows: Vec<&[f64]> = vec![&p, &p];
        let c = 0.1;
        let fit = smo_train_binary(
            &rows,
            &[1.0, -1.0],
            Kernel::Rbf { gamma: 1.0 },
            &SmoParams { c, ..Default::default() },
        )
        .unwrap();
        assert_eq!(fit.alphas, vec![c, c]);
    }

    #[test]
    fn single_class_rejected() {
        let p = [0.0];
        let rows: Vec<&[f64]> = vec![&p, &p];
        assert!(matches!(
            smo_train_binary(&rows, &[1.0, 1.0], Kernel::Linear, &SmoParams::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn three_classes_give_three_machines() {
        let rows: Vec<Vec<f64>> = (0..9).map(|i| vec![(i / 3) as f64 * 3.0, (i % 3) as f64 * 0.1]).collect();
        let labels: Vec<usize> = (0..9).map(|i| i / 3).collect();
        let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let x = FeatureMatrix::from_unnamed(&rows).unwrap();
        let fit = svm_train_multiclass(&x, &labels, &names, &SvmParams::default()).unwrap();
        assert_eq!(fit.model.machines.len(), 3);
        assert_eq!(fit.omitted_pairs, vec![(0, 3), (1, 3), (2, 3)]);
        for (i, &label) in labels.iter().enumerate() {
            assert_eq!(svm_predict(&fit.model, x.row(i)).unwrap().0, label);
        }
    }

    #[test]
    fn vote_ties_break_by_margin() {
        let machine = |bias: f64| BinaryMachine {
            support_vectors: vec![],
            coefficients: vec![],
            bias,
            kernel: Kernel::Linear,
            c: 1.0,
        };
        // a beats b, b beats c, c beats a: one vote each, c has the largest margin
        let model = SvmModel {
            machines: vec![
                PairMachine {
                    positive: 0,
                    negative: 1,
                    machine: machine(0.2),
                },
                PairMachine {
                    positive: 0,
                    negative: 2,
                    machine: machine(-0.9),
                },
                PairMachine {
                    positive: 1,
                    negative: 2,
                    machine: machine(0.5),
                },
            ],
            kernel: Kernel::Linear,
            c: 1.0,
            feature_names: vec!["x".into()],
            class_names: vec!["a".into(), "b".into(), "c".into()],
        };
        let (class, votes) = svm_predict(&model, &[0.0]).unwrap();
        assert_eq!(votes, vec![1, 1, 1]);
        assert_eq!(class, 2);
    }
}
