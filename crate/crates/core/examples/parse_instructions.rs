//! Extracts the temporal modifier from free-text instructions and derives a
//! trapezoidal satisfaction function for each.
//!
//! ```text
//! cargo run --example parse_instructions
//! cargo run --example parse_instructions -- "Vacuum the floor in about 20 minutes"
//! ```

use fuzzy_time::nlparse::{derive_satisfaction, LookupConfig, STUDY_INSTRUCTIONS};

fn main() {
    let cfg = LookupConfig::default();
    let custom: Vec<String> = std::env::args().skip(1).collect();
    let texts: Vec<String> =
        if custom.is_empty() { STUDY_INSTRUCTIONS.iter().map(|s| s.text.to_string()).collect() } else { custom };

    for text in &texts {
        match derive_satisfaction(text, &cfg) {
            Ok((spec, psi)) => {
                let [a, b, c, d] = psi.as_trapezoid().expect("lookup yields trapezoids").corners();
                println!(
                    "{:<58} {:>6} fuzzy={:<5} t={:>6}s  ψ=({a}, {b}, {c}, {d})",
                    text,
                    format!("{:?}", spec.preposition),
                    spec.fuzzy,
                    spec.t_spec.seconds()
                );
            }
            Err(e) => println!("{text:<58} error: {e}"),
        }
    }
}
