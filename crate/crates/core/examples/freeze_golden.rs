//! Regenerates the reference tables in `tests/data` from the
//! arbitrary-precision series oracle.
//!
//! Run with `cargo run --release -p signflip --example freeze_golden`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use signflip::special_functions::{golden_csv_row, series_oracle_j, series_oracle_y, Order, GOLDEN_CSV_HEADER};

const ORDERS: [f64; 10] = [0.0, 0.5, 1.0, 2.5, 5.0, 10.0, 17.5, 25.0, 40.0, 60.0];
const RADII: [f64; 10] = [0.1, 0.3, 1.0, 2.0, 3.7, 5.0, 8.0, 12.5, 16.0, 20.0];
const DIGITS: u32 = 20;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    fs::create_dir_all(&dir)?;
    for (name, oracle) in [
        ("bessel_j_golden.csv", series_oracle_j as fn(Order, f64, u32) -> _),
        ("bessel_y_golden.csv", series_oracle_y),
    ] {
        let mut out = String::new();
        writeln!(out, "{GOLDEN_CSV_HEADER}")?;
        for &nu in &ORDERS {
            let order = Order::new(nu)?;
            for &r in &RADII {
                let value = oracle(order, r, DIGITS)?;
                writeln!(out, "{}", golden_csv_row(order, r, &value))?;
            }
        }
        fs::write(dir.join(name), out)?;
    }
    Ok(())
}
