//! Builds each kind of satisfaction function, samples it on a grid and prints
//! a coarse text plot.

use fuzzy_time::aggregate::{density_mean, density_variance};
use fuzzy_time::model::{Bell, SampledFunction, SamplingGrid, SatisfactionFunction, TimePoint, Trapezoid};

fn plot(name: &str, f: &SatisfactionFunction, grid: &SamplingGrid) {
    let sampled = f.to_sampled(grid);
    let row: String = sampled
        .values()
        .iter()
        .step_by(grid.len() / 60)
        .map(|v| match (v * 4.0).round() as u8 {
            0 => ' ',
            1 => '.',
            2 => ':',
            3 => '+',
            _ => '#',
        })
        .collect();
    let mean = density_mean(&sampled).unwrap();
    let var = density_variance(&sampled).unwrap();
    println!("{name:<12} |{row}| mean {mean:7.1}s  sd {:6.1}s", var.sqrt());
}

fn main() -> fuzzy_time::Result<()> {
    let grid = SamplingGrid::with_period(0.0, 1800.0, 5.0)?;

    let trapezoid: SatisfactionFunction = Trapezoid::new(300.0, 480.0, 720.0, 900.0)?.into();
    let bell: SatisfactionFunction = Bell::new(900.0, 150.0)?.into();
    let values = grid.times().map(|t| if (1200.0..1500.0).contains(&t) { 0.8 } else { 0.1 }).collect();
    let sampled: SatisfactionFunction = SampledFunction::new(grid.clone(), values)?.into();
    let stretched = trapezoid.clone().transform(2.0, 300.0, TimePoint::new(600.0)?)?;

    plot("trapezoid", &trapezoid, &grid);
    plot("bell", &bell, &grid);
    plot("sampled", &sampled, &grid);
    plot("transformed", &stretched, &grid);

    for t in [0.0, 450.0, 600.0, 850.0] {
        println!("ψ_trapezoid({t}) = {:.3}, ψ_bell({t}) = {:.3}", trapezoid.eval(t), bell.eval(t));
    }
    Ok(())
}
