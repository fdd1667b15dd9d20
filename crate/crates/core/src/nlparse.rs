//! Temporal-modifier extraction from instructions and derivation of
//! satisfaction functions by lookup and adapt.
//!
//! The recognized clause is
//!
//! ```text
//! [in | after | before | within] [fuzziness] [the next] [fuzziness] TIME
//! TIME := now | soon | NUMBER UNIT | the next UNIT
//! ```
//!
//! where fuzziness is one of `about`, `approximately`, `roughly`, `around`,
//! numbers are digits or the words zero to sixty, and units are seconds,
//! minutes or hours. Matching is case-insensitive.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SatisfactionFunction, TimePoint, Trapezoid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preposition {
    In,
    Before,
    After,
}

impl fmt::Display for Preposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preposition::In => "in",
            Preposition::Before => "before",
            Preposition::After => "after",
        })
    }
}

/// Time requirement extracted from an instruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSpec {
    pub preposition: Preposition,
    pub fuzzy: bool,
    pub t_spec: TimePoint,
    pub raw_tokens: Vec<String>,
}

/// Base shapes and adaptation constants for [`lookup_satisfaction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LookupConfig {
    /// Plateau half-width of `in` shapes as a fraction of the specified time.
    pub plateau_frac: f64,
    /// Shoulder width of `in` and `before` shapes as a fraction of the specified time.
    pub shoulder_frac: f64,
    /// Minimum plateau half-width in seconds.
    pub min_plateau: f64,
    /// Minimum shoulder width in seconds.
    pub min_shoulder: f64,
    /// Time scale applied when a fuzziness modifier is present, in (0, 1).
    pub fuzzy_widen: f64,
    /// Width of the rising shoulder of `after` shapes in seconds.
    pub after_left_window: f64,
    /// Plateau of `after` shapes as a fraction of the remaining horizon.
    pub after_plateau_frac: f64,
    /// End of the planning horizon in seconds.
    pub horizon: f64,
}

impl Default for LookupConfig {
    fn default() -> Self {
        LookupConfig {
            plateau_frac: 0.10,
            shoulder_frac: 0.15,
            min_plateau: 15.0,
            min_shoulder: 30.0,
            fuzzy_widen: 0.5,
            after_left_window: 12.0,
            after_plateau_frac: 0.25,
            horizon: 3600.0,
        }
    }
}

impl LookupConfig {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("plateau_frac", self.plateau_frac),
            ("shoulder_frac", self.shoulder_frac),
            ("min_plateau", self.min_plateau),
            ("min_shoulder", self.min_shoulder),
            ("after_plateau_frac", self.after_plateau_frac),
            ("horizon", self.horizon),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.fuzzy_widen > 0.0 && self.fuzzy_widen < 1.0) {
            return Err(Error::InvalidConfig(format!("fuzzy_widen must lie in (0, 1), got {}", self.fuzzy_widen)));
        }
        if !(self.after_left_window.is_finite() && self.after_left_window > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "after_left_window must be positive, got {}",
                self.after_left_window
            )));
        }
        Ok(())
    }
}

const FUZZY_WORDS: [&str; 4] = ["about", "approximately", "roughly", "around"];

const SMALL_NUMBERS: [&str; 20] = [
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
];

const TENS: [(&str, u32); 5] = [("twenty", 20), ("thirty", 30), ("forty", 40), ("fifty", 50), ("sixty", 60)];

fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !(c.is_alphanumeric() || c == '.'))
        .map(|t| t.trim_matches('.'))
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

fn unit_seconds(word: &str) -> Option<f64> {
    match word {
        "second" | "seconds" | "sec" | "secs" => Some(1.0),
        "minute" | "minutes" | "min" | "mins" => Some(60.0),
        "hour" | "hours" | "hr" | "hrs" => Some(3600.0),
        _ => None,
    }
}

fn small_number(word: &str) -> Option<u32> {
    SMALL_NUMBERS.iter().position(|w| *w == word).map(|i| i as u32)
}

/// Number starting at `tokens[i]`: value and tokens consumed.
fn number_at(tokens: &[String], i: usize) -> Option<(f64, usize)> {
    let word = tokens[i].as_str();
    if word.starts_with(|c: char| c.is_ascii_digit()) {
        return word.parse::<f64>().ok().filter(|v| v.is_finite()).map(|v| (v, 1));
    }
    if word == "a" || word == "an" {
        return Some((1.0, 1));
    }
    if let Some(v) = small_number(word) {
        return Some((v as f64, 1));
    }
    let tens = TENS.iter().find(|(w, _)| *w == word).map(|(_, v)| *v)?;
    if tens < 60 {
        if let Some(unit) = tokens.get(i + 1).and_then(|w| small_number(w)).filter(|v| (1..10).contains(v)) {
            return Some(((tens + unit) as f64, 2));
        }
    }
    Some((tens as f64, 1))
}

#[derive(Debug)]
struct Anchor {
    start: usize,
    end: usize,
    seconds: f64,
    /// `now` or `soon`
    immediate: bool,
    soon: bool,
}

fn anchor_at(tokens: &[String], i: usize) -> Option<Anchor> {
    match tokens[i].as_str() {
        "now" => return Some(Anchor { start: i, end: i + 1, seconds: 0.0, immediate: true, soon: false }),
        "soon" => return Some(Anchor { start: i, end: i + 1, seconds: 0.0, immediate: true, soon: true }),
        _ => {}
    }
    if let Some(unit) = unit_seconds(&tokens[i]) {
        // "the next minute"
        if i >= 1 && tokens[i - 1] == "next" {
            return Some(Anchor { start: i, end: i + 1, seconds: unit, immediate: false, soon: false });
        }
        return None;
    }
    let (value, used) = number_at(tokens, i)?;
    let unit = unit_seconds(tokens.get(i + used)?)?;
    Some(Anchor { start: i, end: i + used + 1, seconds: value * unit, immediate: false, soon: false })
}

/// Finds the temporal clause of an instruction.
///
/// Fails with [`Error::NoTemporalModifier`] when no time is named and with
/// [`Error::AmbiguousTime`] when more than one is.
pub fn extract_time_spec(instruction: &str) -> Result<TimeSpec> {
    let tokens = tokenize(instruction);
    let mut anchors = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        match anchor_at(&tokens, i) {
            Some(a) => {
                i = a.end;
                anchors.push(a);
            }
            None => i += 1,
        }
    }
    let anchor = match anchors.as_slice() {
        [] => return Err(Error::NoTemporalModifier),
        [a] => a,
        [a, b, ..] => {
            return Err(Error::AmbiguousTime {
                first: tokens[a.start..a.end].join(" "),
                second: tokens[b.start..b.end].join(" "),
            })
        }
    };

    let mut j = anchor.start;
    let mut fuzzy = false;
    let mut next = false;
    let mut preposition = None;
    while j > 0 {
        let word = tokens[j - 1].as_str();
        if !fuzzy && FUZZY_WORDS.contains(&word) {
            fuzzy = true;
            j -= 1;
            continue;
        }
        if !next && word == "next" && j >= 2 && tokens[j - 2] == "the" {
            next = true;
            j -= 2;
            continue;
        }
        preposition = match word {
            "in" => Some(Preposition::In),
            "after" => Some(Preposition::After),
            "before" | "within" => Some(Preposition::Before),
            _ => None,
        };
        if preposition.is_some() {
            j -= 1;
        }
        break;
    }

    let (preposition, fuzzy) = if anchor.immediate {
        (Preposition::In, fuzzy || anchor.soon)
    } else {
        (preposition.unwrap_or(Preposition::In), fuzzy)
    };
    Ok(TimeSpec {
        preposition,
        fuzzy,
        t_spec: TimePoint::new(anchor.seconds)?,
        raw_tokens: tokens[j..anchor.end].to_vec(),
    })
}

/// Derives a satisfaction function from a time requirement.
///
/// Looks up the base trapezoid for the preposition and adapts it to the
/// specified time; fuzziness widens the result around the specified time.
pub fn lookup_satisfaction(spec: &TimeSpec, cfg: &LookupConfig) -> Result<SatisfactionFunction> {
    cfg.validate()?;
    let t = spec.t_spec.seconds();
    let t_max = cfg.horizon;
    if t > t_max {
        return Err(Error::BeyondHorizon { t_spec: t, t_max });
    }
    let widen = if spec.fuzzy { 1.0 / cfg.fuzzy_widen } else { 1.0 };
    match spec.preposition {
        Preposition::In => {
            let plateau = cfg.min_plateau.max(cfg.plateau_frac * t);
            let shoulder = cfg.min_shoulder.max(cfg.shoulder_frac * t);
            let b = (t - plateau).max(0.0);
            let c = t + plateau;
            let a = (b - shoulder).max(0.0);
            let d = c + shoulder;
            let base: SatisfactionFunction = Trapezoid::new(a, b, c, d)?.into();
            if spec.fuzzy {
                base.transform(cfg.fuzzy_widen, 0.0, spec.t_spec)
            } else {
                Ok(base)
            }
        }
        Preposition::Before => {
            let shoulder = cfg.min_shoulder.max(cfg.shoulder_frac * t) * widen;
            let d = (t + shoulder).min(t_max);
            Ok(Trapezoid::new(0.0, 0.0, t, d)?.into())
        }
        Preposition::After => {
            let a = (t - cfg.after_left_window * widen).max(0.0);
            let c = t + cfg.after_plateau_frac * (t_max - t);
            Ok(Trapezoid::new(a, t, c, t_max)?.into())
        }
    }
}

/// Extracts the time requirement of `instruction` and derives its
/// satisfaction function.
pub fn derive_satisfaction(instruction: &str, cfg: &LookupConfig) -> Result<(TimeSpec, SatisfactionFunction)> {
    let spec = extract_time_spec(instruction)?;
    let psi = lookup_satisfaction(&spec, cfg)?;
    Ok((spec, psi))
}

/// One of the fourteen instruction variants of the satisfaction study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyInstruction {
    pub tag: &'static str,
    pub text: &'static str,
    pub preposition: Preposition,
    pub fuzzy: bool,
    pub t_spec: f64,
}

const fn study(
    tag: &'static str,
    text: &'static str,
    preposition: Preposition,
    fuzzy: bool,
    t_spec: f64,
) -> StudyInstruction {
    StudyInstruction { tag, text, preposition, fuzzy, t_spec }
}

/// Instructions of the form "The assignment should start PREPOSITION
/// FUZZINESS TIME!" with prepositions in / after / before the next,
/// optional "approximately" (only for ten minutes and now, which becomes
/// "soon"), and "now" only with "in".
pub const STUDY_INSTRUCTIONS: [StudyInstruction; 14] = [
    study("in_now", "The assignment should start now!", Preposition::In, false, 0.0),
    study("in_soon", "The assignment should start soon!", Preposition::In, true, 0.0),
    study("in_1min", "The assignment should start in one minute!", Preposition::In, false, 60.0),
    study("in_10min", "The assignment should start in 10 minutes!", Preposition::In, false, 600.0),
    study("in_approx_10min", "The assignment should start in approximately 10 minutes!", Preposition::In, true, 600.0),
    study("in_30min", "The assignment should start in 30 minutes!", Preposition::In, false, 1800.0),
    study("after_1min", "The assignment should start after one minute!", Preposition::After, false, 60.0),
    study("after_10min", "The assignment should start after 10 minutes!", Preposition::After, false, 600.0),
    study(
        "after_approx_10min",
        "The assignment should start after approximately 10 minutes!",
        Preposition::After,
        true,
        600.0,
    ),
    study("after_30min", "The assignment should start after 30 minutes!", Preposition::After, false, 1800.0),
    study("before_1min", "The assignment should start before the next minute!", Preposition::Before, false, 60.0),
    study("before_10min", "The assignment should start before the next 10 minutes!", Preposition::Before, false, 600.0),
    study(
        "before_approx_10min",
        "The assignment should start before approximately the next ten minutes!",
        Preposition::Before,
        true,
        600.0,
    ),
    study(
        "before_30min",
        "The assignment should start before the next 30 minutes!",
        Preposition::Before,
        false,
        1800.0,
    ),
];

pub fn study_instruction(tag: &str) -> Option<&'static StudyInstruction> {
    STUDY_INSTRUCTIONS.iter().find(|s| s.tag == tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(p: Preposition, fuzzy: bool, t: f64) -> TimeSpec {
        TimeSpec { preposition: p, fuzzy, t_spec: TimePoint::new(t).unwrap(), raw_tokens: vec![] }
    }

    fn corners(f: &SatisfactionFunction) -> [f64; 4] {
        f.as_trapezoid().unwrap().corners()
    }

    #[test]
    fn extracts_plain_in() {
        let s = extract_time_spec("The assignment should start in 30 minutes!").unwrap();
        assert_eq!((s.preposition, s.fuzzy, s.t_spec.seconds()), (Preposition::In, false, 1800.0));
        assert_eq!(s.raw_tokens, ["in", "30", "minutes"]);
    }

    #[test]
    fn extracts_fuzzy_word_number() {
        let s = extract_time_spec("Place the pan on the stove in about four minutes.").unwrap();
        assert_eq!((s.preposition, s.fuzzy, s.t_spec.seconds()), (Preposition::In, true, 240.0));
    }

    #[test]
    fn extracts_now_and_soon() {
        let s = extract_time_spec("The assignment should start now!").unwrap();
        assert_eq!((s.preposition, s.fuzzy, s.t_spec.seconds()), (Preposition::In, false, 0.0));
        let s = extract_time_spec("Start soon.").unwrap();
        assert_eq!((s.preposition, s.fuzzy, s.t_spec.seconds()), (Preposition::In, true, 0.0));
    }

    #[test]
    fn reordered_before_form() {
        let s = extract_time_spec("The assignment should start before approximately the next ten minutes.").unwrap();
        assert_eq!((s.preposition, s.fuzzy, s.t_spec.seconds()), (Preposition::Before, true, 600.0));
        assert_eq!(s.raw_tokens, ["before", "approximately", "the", "next", "ten", "minutes"]);
    }

    #[test]
    fn compound_numbers_units_and_case() {
        let s = extract_time_spec("Water the plants AFTER Twenty-Five Seconds").unwrap();
        assert_eq!((s.preposition, s.t_spec.seconds()), (Preposition::After, 25.0));
        let s = extract_time_spec("call me in 1.5 hours").unwrap();
        assert_eq!(s.t_spec.seconds(), 5400.0);
        let s = extract_time_spec("in sixty seconds").unwrap();
        assert_eq!(s.t_spec.seconds(), 60.0);
        let s = extract_time_spec("roughly 5 minutes from here").unwrap();
        assert_eq!((s.preposition, s.fuzzy), (Preposition::In, true));
    }

    #[test]
    fn missing_and_ambiguous() {
        assert_eq!(extract_time_spec("Wipe the table."), Err(Error::NoTemporalModifier));
        assert_eq!(extract_time_spec(""), Err(Error::NoTemporalModifier));
        assert!(matches!(
            extract_time_spec("Start in 5 minutes and stop after 10 minutes."),
            Err(Error::AmbiguousTime { .. })
        ));
        // a number without a unit is not a time
        assert_eq!(extract_time_spec("Place four cups on the table."), Err(Error::NoTemporalModifier));
    }

    #[test]
    fn study_instructions_parse() {
        for s in &STUDY_INSTRUCTIONS {
            let got = extract_time_spec(s.text).unwrap();
            assert_eq!(got.preposition, s.preposition, "{}", s.tag);
            assert_eq!(got.fuzzy, s.fuzzy, "{}", s.tag);
            assert_eq!(got.t_spec.seconds(), s.t_spec, "{}", s.tag);
        }
    }

    // Expected corners below are the plug-in values worked by hand:
    // in 1800: p = max(15, 180) = 180, s = max(30, 270) = 270
    //   -> b = 1620, c = 1980, a = 1350, d = 2250
    // before 600: d = 600 + max(30, 90) = 690
    // after 600: a = 600 - 12, c = 600 + 0.25 * 3000 = 1350
    // in 0: p = 15, s = 30 -> (0, 0, 15, 45)
    #[test]
    fn lookup_shapes() {
        let cfg = LookupConfig::default();
        let f = lookup_satisfaction(&spec(Preposition::In, false, 1800.0), &cfg).unwrap();
        assert_eq!(corners(&f), [1350.0, 1620.0, 1980.0, 2250.0]);
        let f = lookup_satisfaction(&spec(Preposition::Before, false, 600.0), &cfg).unwrap();
        assert_eq!(corners(&f), [0.0, 0.0, 600.0, 690.0]);
        let f = lookup_satisfaction(&spec(Preposition::After, false, 600.0), &cfg).unwrap();
        assert_eq!(corners(&f), [588.0, 600.0, 1350.0, 3600.0]);
        let f = lookup_satisfaction(&spec(Preposition::In, false, 0.0), &cfg).unwrap();
        assert_eq!(corners(&f), [0.0, 0.0, 15.0, 45.0]);
    }

    #[test]
    fn fuzzy_lookup_widens() {
        let cfg = LookupConfig::default();
        let f = lookup_satisfaction(&spec(Preposition::In, true, 600.0), &cfg).unwrap();
        assert!(matches!(f, SatisfactionFunction::Transformed(_)));
        // inner (450, 540, 660, 750) scaled by 1/0.5 about 600
        assert_eq!(corners(&f), [300.0, 480.0, 720.0, 900.0]);
        let f = lookup_satisfaction(&spec(Preposition::Before, true, 600.0), &cfg).unwrap();
        assert_eq!(corners(&f), [0.0, 0.0, 600.0, 780.0]);
        let f = lookup_satisfaction(&spec(Preposition::After, true, 600.0), &cfg).unwrap();
        assert_eq!(corners(&f), [576.0, 600.0, 1350.0, 3600.0]);
    }

    #[test]
    fn lookup_rejects_beyond_horizon_and_bad_config() {
        let cfg = LookupConfig::default();
        assert!(matches!(
            lookup_satisfaction(&spec(Preposition::In, false, 4000.0), &cfg),
            Err(Error::BeyondHorizon { .. })
        ));
        let bad = LookupConfig { fuzzy_widen: 1.5, ..LookupConfig::default() };
        assert!(lookup_satisfaction(&spec(Preposition::In, false, 60.0), &bad).is_err());
        let bad = LookupConfig { after_left_window: 0.0, ..LookupConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn before_clipped_at_horizon() {
        let cfg = LookupConfig::default();
        let f = lookup_satisfaction(&spec(Preposition::Before, false, 3500.0), &cfg).unwrap();
        assert_eq!(corners(&f), [0.0, 0.0, 3500.0, 3600.0]);
    }

    #[test]
    fn partial_config_json_uses_defaults() {
        let cfg: LookupConfig = serde_json::from_str(r#"{"plateau_frac": 0.2}"#).unwrap();
        assert_eq!(cfg.plateau_frac, 0.2);
        assert_eq!(cfg.horizon, 3600.0);
    }

    fn arb_spec() -> impl Strategy<Value = TimeSpec> {
        let prep = prop_oneof![Just(Preposition::In), Just(Preposition::Before), Just(Preposition::After)];
        (prep, any::<bool>(), 0.0..3500.0f64).prop_map(|(p, f, t)| spec(p, f, t))
    }

    proptest! {
        #[test]
        fn peak_at_specified_time(s in arb_spec()) {
            let f = lookup_satisfaction(&s, &LookupConfig::default()).unwrap();
            prop_assert_eq!(f.eval_at(s.t_spec), 1.0);
            if s.preposition == Preposition::Before {
                for i in 0..=50 {
                    let t = (s.t_spec.seconds() * i as f64 / 50.0).min(s.t_spec.seconds());
                    prop_assert_eq!(f.eval(t), 1.0);
                }
            }
        }

        #[test]
        fn after_left_shoulder_steeper(fuzzy in any::<bool>(), t in 12.0..3500.0f64) {
            let f = lookup_satisfaction(&spec(Preposition::After, fuzzy, t), &LookupConfig::default()).unwrap();
            let [a, b, c, d] = corners(&f);
            let left = 1.0 / (b - a);
            let right = 1.0 / (d - c);
            prop_assert!(left > right);
        }

        #[test]
        fn extraction_is_total_and_deterministic(text in "[a-zA-Z0-9 .!,-]{0,60}") {
            let first = extract_time_spec(&text);
            prop_assert_eq!(first, extract_time_spec(&text));
        }

        #[test]
        fn digits_round_trip(n in 0u32..1000, unit in prop_oneof![Just(("seconds", 1.0)), Just(("minutes", 60.0)), Just(("hours", 3600.0))]) {
            let s = extract_time_spec(&format!("Do it after {n} {}.", unit.0)).unwrap();
            prop_assert_eq!(s.preposition, Preposition::After);
            prop_assert_eq!(s.t_spec.seconds(), n as f64 * unit.1);
        }
    }
}
