// Trains a model, writes it to disk, loads it back and ranks crops for a
// new record.

use agrorec::features::{encode_apply, encode_fit, EncodingConfig};
use agrorec::learners::{load_model, rf_train, save_model, Model, ModelBundle, RfParams};
use agrorec::recommend::{parse_key_values, recommend};
use agrorec::synth::{generate_synthetic, SyntheticSpec};

pub fn run_example() -> agrorec::Result<()> {
    let data = generate_synthetic(&SyntheticSpec {
        n_rows: 600,
        ..Default::default()
    })?;
    let encoding = encode_fit(&data, &EncodingConfig::default())?;
    let (x, y, _) = encode_apply(&data, &encoding)?;
    let forest = rf_train(
        &x,
        &y,
        &encoding.class_names,
        &RfParams {
            n_trees: 40,
            ..Default::default()
        },
        1,
    )?
    .model;

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("crop.model");
    save_model(
        &ModelBundle {
            model: Model::RandomForest(forest),
            encoding,
            config_hash: "example".into(),
        },
        &path,
    )?;
    let bundle = load_model(&path)?;

    // reuse the first synthetic row without its crop label
    let r = &data.records[0];
    let input = parse_key_values(&format!(
        "state={},season={},soil_type={},area={},temperature={},wind_speed={},precipitation={},humidity={},\
         n={},p={},k={},production={},yield={},operational_cost={},fixed_cost={},total_cost={},msp={}",
        r.state,
        r.season.name(),
        r.soil_type,
        r.area,
        r.temperature,
        r.wind_speed,
        r.precipitation,
        r.humidity,
        r.n,
        r.p,
        r.k,
        r.production.unwrap_or_default(),
        r.yield_.unwrap_or_default(),
        r.operational_cost,
        r.fixed_cost,
        r.total_cost,
        r.msp
    ))?;
    println!("actual crop: {}", r.crop);
    for rec in recommend(&bundle, &input)?.iter().take(5) {
        println!("{}. {:<12} {:.3}", rec.rank, rec.crop, rec.score);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> agrorec::Result<()> {
    run_example()
}
