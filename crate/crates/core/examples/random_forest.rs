// Trains a random forest, reports out-of-bag error, and ranks features by
// mean decrease in impurity and by permutation importance.

use agrorec::features::{encode_apply, encode_fit, EncodingConfig};
use agrorec::learners::{accuracy_score, permutation_importance, rf_importance, rf_train, Classifier, RfParams};
use agrorec::synth::{generate_synthetic, SyntheticSpec};

pub fn run_example() -> agrorec::Result<()> {
    let data = generate_synthetic(&SyntheticSpec {
        n_rows: 600,
        ..Default::default()
    })?;
    let encoding = encode_fit(&data, &EncodingConfig::default())?;
    let (x, y, _) = encode_apply(&data, &encoding)?;

    let params = RfParams {
        n_trees: 60,
        ..Default::default()
    };
    let fit = rf_train(&x, &y, &encoding.class_names, &params, 7)?;
    let model = &fit.model;
    println!(
        "{} trees, mtry {}, oob error {:?}",
        model.trees.len(),
        model.mtry,
        model.oob_error
    );

    let mdi = rf_importance(model).aggregate_one_hot();
    println!("top features by impurity decrease: {:?}", mdi.top(5));

    let perm = permutation_importance(model, &x, &y, accuracy_score, 2, 7)?;
    println!("top features by permutation: {:?}", perm.top(5));

    let train_acc = accuracy_score(&y, &model.predict_matrix(&x)?);
    println!("training accuracy {train_acc:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> agrorec::Result<()> {
    run_example()
}
