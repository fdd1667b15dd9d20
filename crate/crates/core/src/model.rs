//! Satisfaction functions, skills and time grids.
//!
//! All times are seconds since the instruction was issued. A satisfaction
//! function maps a candidate start time to a value in `[0, 1]`, where 0 is
//! no satisfaction and 1 is complete satisfaction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-negative number of seconds since the instruction was issued.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TimePoint(f64);

impl TimePoint {
    pub const ZERO: TimePoint = TimePoint(0.0);

    pub fn new(seconds: f64) -> Result<Self> {
        if seconds.is_finite() && seconds >= 0.0 {
            Ok(TimePoint(seconds))
        } else {
            Err(Error::InvalidTime(seconds))
        }
    }

    pub fn from_minutes(minutes: f64) -> Result<Self> {
        Self::new(minutes * 60.0)
    }

    pub fn seconds(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TimePoint {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        TimePoint::new(value)
    }
}

impl From<TimePoint> for f64 {
    fn from(t: TimePoint) -> f64 {
        t.0
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} s", self.0)
    }
}

/// Uniform sampling of the interval `[start, end)` at `rate` samples per second.
///
/// The grid has `k = floor(rate * (end - start))` steps; step `j` sits at
/// `start + j / rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct SamplingGrid {
    start: f64,
    end: f64,
    rate: f64,
    period: f64,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    start_s: f64,
    end_s: f64,
    rate: f64,
}

impl TryFrom<GridRepr> for SamplingGrid {
    type Error = Error;

    fn try_from(r: GridRepr) -> Result<Self> {
        SamplingGrid::new(r.start_s, r.end_s, r.rate)
    }
}

impl From<SamplingGrid> for GridRepr {
    fn from(g: SamplingGrid) -> Self {
        GridRepr { start_s: g.start, end_s: g.end, rate: g.rate }
    }
}

impl SamplingGrid {
    /// Grid over `[start, end)` at `rate` samples per second.
    pub fn new(start: f64, end: f64, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidGrid(format!("rate must be positive, got {rate}")));
        }
        Self::build(start, end, rate, 1.0 / rate)
    }

    /// Grid over `[start, end)` with one sample every `period` seconds.
    pub fn with_period(start: f64, end: f64, period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        Self::build(start, end, 1.0 / period, period)
    }

    fn build(start: f64, end: f64, rate: f64, period: f64) -> Result<Self> {
        TimePoint::new(start).map_err(|_| Error::InvalidGrid(format!("bad start {start}")))?;
        TimePoint::new(end).map_err(|_| Error::InvalidGrid(format!("bad end {end}")))?;
        if end <= start {
            return Err(Error::InvalidGrid(format!("end {end} must exceed start {start}")));
        }
        let exact = rate * (end - start);
        // absorb representation error so that e.g. 3600 s at 1/4.5 Hz gives 800
        let k = (exact + 1e-9 * exact.max(1.0)).floor();
        if k < 1.0 {
            return Err(Error::InvalidGrid("grid has no time steps".into()));
        }
        Ok(SamplingGrid { start, end, rate, period, k: k as usize })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn span(&self) -> f64 {
        self.end - self.start
    }

    pub fn time(&self, j: usize) -> f64 {
        self.start + j as f64 * self.period
    }

    pub fn last_time(&self) -> f64 {
        self.time(self.k - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.k).map(move |j| self.time(j))
    }

    /// Fractional step position of `t`, snapped to an integer when within
    /// rounding distance of one.
    pub fn position(&self, t: f64) -> f64 {
        let pos = (t - self.start) / self.period;
        let nearest = pos.round();
        if (pos - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
            nearest
        } else {
            pos
        }
    }

    /// Index of the grid step nearest to `t`, clamped to the grid.
    pub fn nearest_index(&self, t: f64) -> usize {
        let pos = self.position(t).round();
        pos.clamp(0.0, (self.k - 1) as f64) as usize
    }
}

/// Trapezoidal satisfaction: 0 outside `[a, d]`, rising on `[a, b]`, 1 on
/// `[b, c]`, falling on `[c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrapezoidRepr")]
pub struct Trapezoid {
    pub(crate) a: f64,
    pub(crate) b: f64,
    pub(crate) c: f64,
    pub(crate) d: f64,
}

#[derive(Deserialize)]
struct TrapezoidRepr {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl TryFrom<TrapezoidRepr> for Trapezoid {
    type Error = Error;

    fn try_from(r: TrapezoidRepr) -> Result<Self> {
        Trapezoid::new(r.a, r.b, r.c, r.d)
    }
}

impl Trapezoid {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) || a < 0.0 {
            return Err(Error::InvalidFunction(format!(
                "trapezoid corners must be finite and non-negative: ({a}, {b}, {c}, {d})"
            )));
        }
        if !(a <= b && b <= c && c <= d) {
            return Err(Error::InvalidFunction(format!("trapezoid corners must be ordered: ({a}, {b}, {c}, {d})")));
        }
        Ok(Trapezoid { a, b, c, d })
    }

    pub fn corners(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn eval(&self, t: f64) -> f64 {
        trapezoid_value(self.a, self.b, self.c, self.d, t)
    }
}

/// Trapezoid membership for ordered corners; shared with the fitter, which
/// evaluates unvalidated parameter vectors.
pub(crate) fn trapezoid_value(a: f64, b: f64, c: f64, d: f64, t: f64) -> f64 {
    if t < a || t > d {
        0.0
    } else if t < b {
        (t - a) / (b - a)
    } else if t <= c {
        1.0
    } else {
        (d - t) / (d - c)
    }
}

/// Unit-amplitude Gaussian `exp(-(t - mu)^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BellRepr")]
pub struct Bell {
    pub(crate) mu: f64,
    pub(crate) sigma: f64,
}

#[derive(Deserialize)]
struct BellRepr {
    mu: f64,
    sigma: f64,
}

impl TryFrom<BellRepr> for Bell {
    type Error = Error;

    fn try_from(r: BellRepr) -> Result<Self> {
        Bell::new(r.mu, r.sigma)
    }
}

impl Bell {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidFunction(format!("bell mean must be non-negative, got {mu}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidFunction(format!("bell width must be positive, got {sigma}")));
        }
        Ok(Bell { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn eval(&self, t: f64) -> f64 {
        let z = (t - self.mu) / self.sigma;
        (-0.5 * z * z).exp()
    }
}

/// Satisfaction values on a grid, linearly interpolated between steps and 0
/// outside the sampled span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledRepr")]
pub struct SampledFunction {
    grid: SamplingGrid,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct SampledRepr {
    grid: SamplingGrid,
    values: Vec<f64>,
}

impl TryFrom<SampledRepr> for SampledFunction {
    type Error = Error;

    fn try_from(r: SampledRepr) -> Result<Self> {
        SampledFunction::new(r.grid, r.values)
    }
}

impl SampledFunction {
    pub fn new(grid: SamplingGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidFunction(format!("expected {} samples, got {}", grid.len(), values.len())));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidFunction(format!("sample {v} outside [0, 1]")));
        }
        Ok(SampledFunction { grid, values })
    }

    /// Builds from arbitrary reals, clipping each into `[0, 1]`.
    pub fn clipped(grid: SamplingGrid, values: Vec<f64>) -> Result<Self> {
        let values = values.into_iter().map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) }).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: SamplingGrid, value: f64) -> Result<Self> {
        let values = vec![value; grid.len()];
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        let pos = self.grid.position(t);
        let last = (self.values.len() - 1) as f64;
        if !(0.0..=last).contains(&pos) {
            return 0.0;
        }
        let lo = pos.floor();
        let frac = pos - lo;
        let i = lo as usize;
        if frac == 0.0 {
            self.values[i]
        } else {
            self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
        }
    }
}

/// Satisfaction of an inner function after scaling time about a pivot and
/// shifting it: `inner(pivot + (t + shift - pivot) * scale)`.
///
/// A scale below 1 widens the function around the pivot. `pivot = 0`
/// reproduces the plain `psi(scale * t)` form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransformedRepr")]
pub struct TransformedFunction {
    inner: SatisfactionFunction,
    scale: f64,
    shift: f64,
    pivot: f64,
}

#[derive(Deserialize)]
struct TransformedRepr {
    inner: SatisfactionFunction,
    scale: f64,
    shift: f64,
    pivot: f64,
}

impl TryFrom<TransformedRepr> for TransformedFunction {
    type Error = Error;

    fn try_from(r: TransformedRepr) -> Result<Self> {
        TransformedFunction::new(r.inner, r.scale, r.shift, TimePoint::new(r.pivot)?)
    }
}

impl TransformedFunction {
    pub fn new(inner: SatisfactionFunction, scale: f64, shift: f64, pivot: TimePoint) -> Result<Self> {
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::InvalidScale(scale));
        }
        if !(shift.is_finite() && shift >= 0.0) {
            return Err(Error::InvalidShift(shift));
        }
        Ok(TransformedFunction { inner, scale, shift, pivot: pivot.seconds() })
    }

    pub fn inner(&self) -> &SatisfactionFunction {
        &self.inner
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn pivot(&self) -> f64 {
        self.pivot
    }

    /// Time at which the inner function is evaluated.
    pub fn inner_time(&self, t: f64) -> f64 {
        self.pivot + (t + self.shift - self.pivot) * self.scale
    }

    /// Outer time corresponding to an inner time (inverse of `inner_time`).
    pub fn outer_time(&self, inner_t: f64) -> f64 {
        self.pivot + (inner_t - self.pivot) / self.scale - self.shift
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.inner.eval(self.inner_time(t)).clamp(0.0, 1.0)
    }
}

/// A mapping from start time to satisfaction in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SatisfactionFunction {
    Trapezoid(Trapezoid),
    Bell(Bell),
    Sampled(SampledFunction),
    Transformed(Box<TransformedFunction>),
}

impl From<Trapezoid> for SatisfactionFunction {
    fn from(t: Trapezoid) -> Self {
        SatisfactionFunction::Trapezoid(t)
    }
}

impl From<Bell> for SatisfactionFunction {
    fn from(b: Bell) -> Self {
        SatisfactionFunction::Bell(b)
    }
}

impl From<SampledFunction> for SatisfactionFunction {
    fn from(s: SampledFunction) -> Self {
        SatisfactionFunction::Sampled(s)
    }
}

impl From<TransformedFunction> for SatisfactionFunction {
    fn from(t: TransformedFunction) -> Self {
        SatisfactionFunction::Transformed(Box::new(t))
    }
}

impl SatisfactionFunction {
    /// Satisfaction at `t` seconds. Total: times before 0 are evaluated with
    /// the same formulas and still land in `[0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SatisfactionFunction::Trapezoid(f) => f.eval(t),
            SatisfactionFunction::Bell(f) => f.eval(t),
            SatisfactionFunction::Sampled(f) => f.eval(t),
            SatisfactionFunction::Transformed(f) => f.eval(t),
        }
    }

    pub fn eval_at(&self, t: TimePoint) -> f64 {
        self.eval(t.seconds())
    }

    /// Scales time by `scale` about `pivot`, then shifts it by `shift`.
    pub fn transform(self, scale: f64, shift: f64, pivot: TimePoint) -> Result<SatisfactionFunction> {
        TransformedFunction::new(self, scale, shift, pivot).map(Into::into)
    }

    pub fn to_sampled(&self, grid: &SamplingGrid) -> SampledFunction {
        if let SatisfactionFunction::Sampled(s) = self {
            if s.grid() == grid {
                return s.clone();
            }
        }
        let values = grid.times().map(|t| self.eval(t)).collect();
        SampledFunction { grid: grid.clone(), values }
    }

    /// Closed-form trapezoid equivalent, available for trapezoids and
    /// positively scaled transforms of them that stay on `t >= 0`.
    pub fn as_trapezoid(&self) -> Option<Trapezoid> {
        match self {
            SatisfactionFunction::Trapezoid(t) => Some(*t),
            SatisfactionFunction::Transformed(f) if f.scale > 0.0 => {
                let inner = f.inner.as_trapezoid()?;
                let [a, b, c, d] = inner.corners().map(|x| f.outer_time(x));
                Trapezoid::new(a, b, c, d).ok()
            }
            _ => None,
        }
    }
}

/// Opaque key-value parameters carried by skills.
pub type Params = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SkillId(pub String);

impl fmt::Display for SkillId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SkillId {
    fn from(s: &str) -> Self {
        SkillId(s.to_owned())
    }
}

impl From<String> for SkillId {
    fn from(s: String) -> Self {
        SkillId(s)
    }
}

fn check_duration(duration: f64) -> Result<()> {
    if duration.is_finite() && duration > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTask(format!("duration must be positive, got {duration}")))
    }
}

/// Fully parameterized operation with an explicit start time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecificSkill {
    pub id: SkillId,
    pub start: TimePoint,
    pub duration: f64,
    pub params: Params,
    /// Keys in `params` that came from fuzzy parameters and were passed
    /// through without being resolved.
    pub unresolved: BTreeSet<String>,
}

impl SpecificSkill {
    pub fn new(id: impl Into<SkillId>, start: TimePoint, duration: f64, params: Params) -> Result<Self> {
        check_duration(duration)?;
        Ok(SpecificSkill { id: id.into(), start, duration, params, unresolved: BTreeSet::new() })
    }
}

/// Operation with a vague time requirement expressed as a satisfaction function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzySkill {
    pub id: SkillId,
    pub psi: SatisfactionFunction,
    pub duration: f64,
    pub fuzzy_params: Params,
    pub specific_params: Params,
}

impl FuzzySkill {
    pub fn new(id: impl Into<SkillId>, psi: impl Into<SatisfactionFunction>, duration: f64) -> Result<Self> {
        check_duration(duration)?;
        Ok(FuzzySkill {
            id: id.into(),
            psi: psi.into(),
            duration,
            fuzzy_params: Params::new(),
            specific_params: Params::new(),
        })
    }

    pub fn with_fuzzy_param(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.fuzzy_params.insert(key.into(), value.into());
        self
    }

    pub fn with_specific_param(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.specific_params.insert(key.into(), value.into());
        self
    }
}

/// Unordered set of fuzzy skills. Skills are kept sorted by id, which fixes
/// the coordinate order of start vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzyTask {
    skills: Vec<FuzzySkill>,
}

impl FuzzyTask {
    pub fn new(mut skills: Vec<FuzzySkill>) -> Result<Self> {
        if skills.is_empty() {
            return Err(Error::InvalidTask("task has no skills".into()));
        }
        for s in &skills {
            check_duration(s.duration)?;
        }
        skills.sort_by(|x, y| x.id.cmp(&y.id));
        if let Some(w) = skills.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidTask(format!("duplicate skill id {}", w[0].id)));
        }
        Ok(FuzzyTask { skills })
    }

    pub fn skills(&self) -> &[FuzzySkill] {
        &self.skills
    }

    pub fn len(&self) -> usize {
        self.skills.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skills.is_empty()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.skills.iter().map(|s| s.duration).collect()
    }
}
