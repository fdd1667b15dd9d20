//! Fits trapezoid and bell models to aggregated study functions and reports
//! which model explains each instruction better.

use fuzzy_time::aggregate::pointwise_median;
use fuzzy_time::cli::{ensemble_for, synthesize, SynthConfig};
use fuzzy_time::fit::{best_fit, fit_bell, fit_trapezoid, FitConfig};
use fuzzy_time::nlparse::{LookupConfig, STUDY_INSTRUCTIONS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = synthesize(&SynthConfig::new(32, 7), &LookupConfig::default())?;
    let cfg = FitConfig::default();

    println!("{:<18} {:>10} {:>10}  best fit", "instruction", "trapezoid", "bell");
    for s in &STUDY_INSTRUCTIONS {
        let median = pointwise_median(&ensemble_for(&rows, s.tag, None)?);
        let t = fit_trapezoid(&median, &cfg)?;
        let b = fit_bell(&median, &cfg)?;
        let best = best_fit(&median, &cfg)?;
        let params: Vec<String> = best.params.iter().map(|p| format!("{p:.0}")).collect();
        println!("{:<18} {:>10.4} {:>10.4}  {:?}({})", s.tag, t.error, b.error, best.model, params.join(", "));
    }
    Ok(())
}
