//! Seeded synthetic study data shaped like the fourteen-instruction
//! satisfaction survey.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::table::{EnsembleRow, Group};
use crate::error::{Error, Result};
use crate::model::{trapezoid_value, TimePoint};
use crate::nlparse::{lookup_satisfaction, LookupConfig, TimeSpec, STUDY_INSTRUCTIONS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub participants: usize,
    pub seed: u64,
    /// Width multiplier about the specified time for robot-group drawings.
    pub robot_width: f64,
    pub person_width: f64,
    /// Corner jitter deviation as a fraction of the specified time.
    pub jitter_frac: f64,
    /// Minimum corner jitter deviation in seconds.
    pub jitter_floor: f64,
    /// Half-range of the uniform value noise added inside the support.
    pub value_noise: f64,
    pub grid_end: f64,
    pub period: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            participants: 32,
            seed: 0,
            robot_width: 1.15,
            person_width: 1.0,
            jitter_frac: 0.1,
            jitter_floor: 15.0,
            value_noise: 0.05,
            grid_end: 3600.0,
            period: 4.5,
        }
    }
}

impl SynthConfig {
    pub fn new(participants: usize, seed: u64) -> Self {
        SynthConfig { participants, seed, ..SynthConfig::default() }
    }

    /// Even participants (0-based) are robot, odd ones person.
    pub fn group_of(participant: usize) -> Group {
        if participant.is_multiple_of(2) {
            Group::Robot
        } else {
            Group::Person
        }
    }
}

pub fn participant_id(participant: usize) -> String {
    format!("p{:03}", participant + 1)
}

/// Rows for every participant and study instruction, participant-major.
///
/// Each drawing starts from the default derived trapezoid of the instruction,
/// widens it about the specified time by the group multiplier, jitters the
/// four corners with seeded Gaussian noise, and adds uniform value noise
/// where the drawing is positive, clipped to `[0, 1]`.
pub fn synthesize(cfg: &SynthConfig, lookup: &LookupConfig) -> Result<Vec<EnsembleRow>> {
    if cfg.participants == 0 {
        return Err(Error::InvalidConfig("participants must be at least 1".into()));
    }
    let grid = crate::model::SamplingGrid::with_period(0.0, cfg.grid_end, cfg.period)?;
    let times: Vec<f64> = grid.times().collect();
    let mut bases = Vec::with_capacity(STUDY_INSTRUCTIONS.len());
    for s in &STUDY_INSTRUCTIONS {
        let spec = TimeSpec {
            preposition: s.preposition,
            fuzzy: s.fuzzy,
            t_spec: TimePoint::new(s.t_spec)?,
            raw_tokens: vec![],
        };
        let psi = lookup_satisfaction(&spec, lookup)?;
        let corners = psi.as_trapezoid().expect("study shapes are trapezoids").corners();
        bases.push((s.tag, s.t_spec, corners));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = cfg.value_noise;
    let mut rows = Vec::with_capacity(cfg.participants * bases.len() * times.len());
    for p in 0..cfg.participants {
        let group = SynthConfig::group_of(p);
        let width = match group {
            Group::Robot => cfg.robot_width,
            Group::Person => cfg.person_width,
        };
        let id = participant_id(p);
        for &(tag, t_spec, corners) in &bases {
            let sd = (cfg.jitter_frac * t_spec).max(cfg.jitter_floor);
            let jitter = Normal::new(0.0, sd).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            let mut c = corners.map(|x| (t_spec + (x - t_spec) * width + jitter.sample(&mut rng)).max(0.0));
            c.sort_by(f64::total_cmp);
            for &t in &times {
                let clean = trapezoid_value(c[0], c[1], c[2], c[3], t);
                let u: f64 = if noise > 0.0 { rng.random_range(-noise..=noise) } else { 0.0 };
                let value = if clean > 0.0 { (clean + u).clamp(0.0, 1.0) } else { 0.0 };
                rows.push(EnsembleRow {
                    participant_id: id.clone(),
                    instruction_tag: tag.to_owned(),
                    group,
                    time_s: t,
                    satisfaction: value,
                });
            }
        }
    }
    Ok(rows)
}
