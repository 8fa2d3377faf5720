// The same seed gives the same serialized forest whatever the thread count.

use agrorec::features::{encode_apply, encode_fit, EncodingConfig};
use agrorec::learners::{rf_train, RfParams};
use agrorec::synth::{generate_synthetic, SyntheticSpec};

fn forest_json(threads: usize) -> agrorec::Result<String> {
    let data = generate_synthetic(&SyntheticSpec {
        n_rows: 400,
        ..Default::default()
    })?;
    let encoding = encode_fit(&data, &EncodingConfig::default())?;
    let (x, y, _) = encode_apply(&data, &encoding)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    let fit = pool.install(|| {
        rf_train(
            &x,
            &y,
            &encoding.class_names,
            &RfParams {
                n_trees: 25,
                ..Default::default()
            },
            99,
        )
    })?;
    Ok(serde_json::to_string(&fit.model)?)
}

pub fn run_example() -> agrorec::Result<()> {
    let one = forest_json(1)?;
    let eight = forest_json(8)?;
    println!(
        "1 thread: {} bytes, 8 threads: {} bytes, identical: {}",
        one.len(),
        eight.len(),
        one == eight
    );
    assert_eq!(one, eight);
    Ok(())
}

#[allow(dead_code)]
fn main() -> agrorec::Result<()> {
    run_example()
}
