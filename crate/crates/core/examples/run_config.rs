// Loading, validating and hashing a run configuration.

use agrorec::config::RunConfig;
use agrorec::Error;

pub fn run_example() -> agrorec::Result<()> {
    let config = RunConfig::from_toml_str(
        r#"
seed = 7

[rf]
n_trees = 200

[protocol]
folds = 5
train_fraction = 0.75
"#,
    )?;
    println!(
        "seed {} trees {} folds {} hash {}",
        config.seed,
        config.rf.n_trees,
        config.protocol.folds,
        config.hash()
    );

    match RunConfig::from_toml_str("[svm]\nkernal = \"linear\"\n") {
        Err(Error::ConfigInvalid { key, message }) => println!("rejected {key}: {message}"),
        other => println!("unexpected: {other:?}"),
    }

    println!("--- defaults ---\n{}", RunConfig::default().to_toml()?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> agrorec::Result<()> {
    run_example()
}
