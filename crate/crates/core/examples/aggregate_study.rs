//! Generates a synthetic satisfaction study, aggregates one instruction and
//! writes the envelope plot.
//!
//! ```text
//! cargo run --example aggregate_study -- in_approx_10min /tmp/plot.svg
//! ```

use fuzzy_time::aggregate::{density_variance, summarize, DEFAULT_MODE_BIN_WIDTH};
use fuzzy_time::cli::{ensemble_for, svg, synthesize, SynthConfig};
use fuzzy_time::nlparse::{study_instruction, LookupConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let tag = args.next().unwrap_or_else(|| "in_approx_10min".into());
    let out = args.next().unwrap_or_else(|| std::env::temp_dir().join(format!("{tag}.svg")).display().to_string());
    let instruction = study_instruction(&tag).ok_or_else(|| format!("unknown instruction tag {tag}"))?;

    let rows = synthesize(&SynthConfig::new(32, 7), &LookupConfig::default())?;
    let ensemble = ensemble_for(&rows, &tag, None)?;
    let summary = summarize(&ensemble, &[0.25, 0.75], DEFAULT_MODE_BIN_WIDTH)?;

    println!("{}: {} participants", instruction.text, ensemble.len());
    let grid = ensemble.grid();
    for minute in (0..=30).step_by(3) {
        let j = grid.nearest_index(minute as f64 * 60.0);
        println!(
            "  {minute:>2} min  mean {:.2}  median {:.2}  mode {:.3}  iqr [{:.2}, {:.2}]",
            summary.mean.values()[j],
            summary.median.values()[j],
            summary.mode.values()[j],
            summary.quantile(0.25).unwrap().values()[j],
            summary.quantile(0.75).unwrap().values()[j],
        );
    }
    println!("median density variance {:.0} s²", density_variance(&summary.median)?);
    println!("mode ties at {} grid steps", summary.mode_ties.len());

    std::fs::write(&out, svg::render_summary(&summary, instruction.text))?;
    println!("plot written to {out}");
    Ok(())
}
