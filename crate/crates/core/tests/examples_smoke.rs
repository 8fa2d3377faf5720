mod ingest_and_clean {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ingest_and_clean.rs"));
}

mod exploratory_analysis {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exploratory_analysis.rs"));
}

mod lag_features {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/lag_features.rs"));
}

mod random_forest {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/random_forest.rs"));
}

mod svm_smo {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/svm_smo.rs"));
}

mod classification_metrics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/classification_metrics.rs"));
}

mod protocol_comparison {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/protocol_comparison.rs"));
}

mod recommend_crop {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/recommend_crop.rs"));
}

mod deterministic_training {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/deterministic_training.rs"));
}

mod run_config {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/run_config.rs"));
}

#[test]
fn ingest_and_clean_example_runs() {
    ingest_and_clean::run_example().expect("ingest_and_clean example should run");
}

#[test]
fn exploratory_analysis_example_runs() {
    exploratory_analysis::run_example().expect("exploratory_analysis example should run");
}

#[test]
fn lag_features_example_runs() {
    lag_features::run_example().expect("lag_features example should run");
}

#[test]
fn random_forest_example_runs() {
    random_forest::run_example().expect("random_forest example should run");
}

#[test]
fn svm_smo_example_runs() {
    svm_smo::run_example().expect("svm_smo example should run");
}

#[test]
fn classification_metrics_example_runs() {
    classification_metrics::run_example().expect("classification_metrics example should run");
}

#[test]
fn protocol_comparison_example_runs() {
    protocol_comparison::run_example().expect("protocol_comparison example should run");
}

#[test]
fn recommend_crop_example_runs() {
    recommend_crop::run_example().expect("recommend_crop example should run");
}

#[test]
fn deterministic_training_example_runs() {
    deterministic_training::run_example().expect("deterministic_training example should run");
}

#[test]
fn run_config_example_runs() {
    run_config::run_example().expect("run_config example should run");
}
