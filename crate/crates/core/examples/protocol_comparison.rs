// Runs the three evaluation protocols with a random forest on synthetic
// drift data and prints accuracy for each.
//
// cargo run --release --example protocol_comparison -- [n_rows] [n_trees]

use agrorec::evaluation::{run_approach, Approach, EvaluationReport, LearnerSpec, ProtocolConfig};
use agrorec::learners::RfParams;
use agrorec::synth::{generate_synthetic, SyntheticSpec};

pub fn compare(n_rows: usize, n_trees: usize) -> agrorec::Result<Vec<EvaluationReport>> {
    let data = generate_synthetic(&SyntheticSpec {
        n_rows,
        ..Default::default()
    })?;
    let learner = LearnerSpec::RandomForest(RfParams {
        n_trees,
        ..Default::default()
    });
    let protocol = ProtocolConfig::default();
    Approach::ALL
        .iter()
        .map(|a| run_approach(&data, *a, &learner, &protocol, 42, "example").map(|o| o.report))
        .collect()
}

fn print(reports: &[EvaluationReport]) {
    for r in reports {
        println!(
            "A{} {:<18} accuracy={:.4} kappa={} features={}",
            r.approach,
            r.approach_name,
            r.accuracy,
            r.kappa.map_or("n/a".into(), |k| format!("{k:.4}")),
            r.n_features,
        );
    }
}

pub fn run_example() -> agrorec::Result<()> {
    print(&compare(300, 10)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> agrorec::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_rows = args.next().and_then(|a| a.parse().ok()).unwrap_or(2000);
    let n_trees = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    print(&compare(n_rows, n_trees)?);
    Ok(())
}
