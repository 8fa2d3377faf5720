// A binary SMO fit on a toy problem, then a one-vs-one multiclass SVM.

use agrorec::features::{encode_apply, encode_fit, EncodingConfig};
use agrorec::learners::{
    accuracy_score, kkt_residual, smo_train_binary, svm_train_multiclass, Classifier, Kernel, SmoParams, SvmParams,
};
use agrorec::synth::{generate_synthetic, SyntheticSpec};

pub fn run_example() -> agrorec::Result<()> {
    let rows: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![0.2, 0.4], vec![2.0, 2.0], vec![2.2, 1.6]];
    let y = [1.0, 1.0, -1.0, -1.0];
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    let fit = smo_train_binary(&refs, &y, Kernel::Linear, &SmoParams::default())?;
    println!(
        "alphas {:?}, bias {:.4}, converged {}",
        fit.alphas, fit.machine.bias, fit.converged
    );
    let worst = rows
        .iter()
        .zip(&y)
        .zip(&fit.alphas)
        .map(|((x, yi), a)| kkt_residual(*a, 1.0, *yi, fit.machine.decision(x)))
        .fold(0.0, f64::max);
    println!("largest KKT residual {worst:.2e}");

    let data = generate_synthetic(&SyntheticSpec {
        n_rows: 300,
        n_crops: 5,
        ..Default::default()
    })?;
    let encoding = encode_fit(&data, &EncodingConfig::default())?;
    let (x, labels, _) = encode_apply(&data, &encoding)?;
    let multi = svm_train_multiclass(&x, &labels, &encoding.class_names, &SvmParams::default())?;
    println!(
        "{} pairwise machines, {} omitted (classes absent from training)",
        multi.model.machines.len(),
        multi.omitted_pairs.len()
    );
    println!(
        "training accuracy {:.4}",
        accuracy_score(&labels, &multi.model.predict_matrix(&x)?)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> agrorec::Result<()> {
    run_example()
}
