// Confusion-matrix metrics, an exact binomial interval for accuracy, and
// the no-information-rate test.

use agrorec::evaluation::{accuracy_ci, classification_metrics, nir_test, ConfusionMatrix};

pub fn run_example() -> agrorec::Result<()> {
    let names = vec!["Wheat".to_string(), "Paddy".to_string()];
    let cm = ConfusionMatrix::from_counts(&names, vec![vec![40, 10], vec![20, 30]])?;
    let m = classification_metrics(&cm)?;
    println!("accuracy {:.4} kappa {:?} macro F1 {:?}", m.accuracy, m.kappa, m.macro_f1);
    for c in &m.per_class {
        println!(
            "{:<6} precision {:?} recall {:?} specificity {:?} f1 {:?}",
            c.class, c.precision, c.recall, c.specificity, c.f1
        );
    }
    let (lo, hi) = accuracy_ci(cm.correct(), cm.total(), 0.95)?;
    println!("95% interval ({lo:.4}, {hi:.4})");
    let (nir, p) = nir_test(&cm)?;
    println!("no information rate {nir:.2}, p(acc > nir) = {p:.3e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> agrorec::Result<()> {
    run_example()
}
