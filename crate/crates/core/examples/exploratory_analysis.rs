// Skewness, pairwise correlation and variance inflation factors on
// synthetic data, plus the collinearity check on the cost columns.

use agrorec::eda::{correlation_matrix, skewness, vif_table};
use agrorec::synth::{generate_synthetic, SyntheticSpec};
use agrorec::Error;

pub fn run_example() -> agrorec::Result<()> {
    let data = generate_synthetic(&SyntheticSpec {
        n_rows: 800,
        ..Default::default()
    })?;

    for column in ["yield", "precipitation", "msp"] {
        println!("skewness {column:<14} {:>8.4}", skewness(&data.numeric_column(column)?)?);
    }

    let cm = correlation_matrix(&data, &["temperature", "precipitation", "humidity"])?;
    println!(
        "r(temperature, precipitation) = {:.4}",
        cm.get("temperature", "precipitation").unwrap_or(f64::NAN)
    );

    for e in vif_table(&data, &["operational_cost", "fixed_cost", "msp", "temperature"])? {
        println!("vif {:<18} {:>10.3} {:?}", e.column, e.vif, e.severity);
    }

    // total_cost is the sum of the other two cost columns
    match vif_table(&data, &["operational_cost", "fixed_cost", "total_cost"]) {
        Ok(entries) => {
            for e in entries.iter().filter(|e| e.perfect_collinearity) {
                println!("{} is an exact linear combination of the others", e.column);
            }
        }
        Err(Error::RankDeficient) => println!("cost columns are rank deficient"),
        Err(e) => return Err(e),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> agrorec::Result<()> {
    run_example()
}
