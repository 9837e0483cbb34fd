use crate::error::ensure;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Initial survival curve `S₀(t) = exp(−∫₀ᵗ h)` with piecewise-constant
/// hazard: `h_k` applies on `(T_{k−1}, T_k]`, and the last hazard continues
/// beyond the last pillar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct SurvivalCurve {
    pillars: Vec<f64>,
    hazards: Vec<f64>,
}

impl SurvivalCurve {
    /// From `(pillar_years, hazard_rate)` records.
    pub fn new(records: Vec<(f64, f64)>) -> Result<Self> {
        ensure(!records.is_empty(), || "a survival curve needs at least one pillar".into())?;
        let mut prev = 0.0;
        for &(t, h) in &records {
            ensure(t > prev && t.is_finite(), || format!("pillars must be positive and strictly increasing (at {t})"))?;
            ensure(h >= 0.0 && h.is_finite(), || format!("hazard rates must be finite and >= 0 (got {h} at {t})"))?;
            prev = t;
        }
        let (pillars, hazards) = records.into_iter().unzip();
        Ok(Self { pillars, hazards })
    }

    /// Constant hazard `h`.
    pub fn flat(h: f64) -> Result<Self> {
        Self::new(vec![(1.0, h)])
    }

    /// Parses `pillar_years,hazard_rate` lines. Blank lines, `#` comments and
    /// a non-numeric header line are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed = match fields.as_slice() {
                [t, h] => t.parse::<f64>().and_then(|t| h.parse::<f64>().map(|h| (t, h))),
                _ => return Err(Error::Parse(format!("line {}: expected `pillar_years,hazard_rate`", i + 1))),
            };
            match parsed {
                Ok(rec) => records.push(rec),
                Err(_) if records.is_empty() && i == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("line {}: {e}", i + 1))),
            }
        }
        Self::new(records)
    }

    pub fn records(&self) -> Vec<(f64, f64)> {
        self.pillars.iter().copied().zip(self.hazards.iter().copied()).collect()
    }

    /// Hazard rate in force at `t`.
    pub fn hazard(&self, t: f64) -> f64 {
        let i = self.pillars.partition_point(|&p| p < t).min(self.hazards.len() - 1);
        self.hazards[i]
    }

    /// `∫₀ᵗ h(s) ds`.
    pub fn cumulative_hazard(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut left = 0.0;
        for (k, (&p, &h)) in self.pillars.iter().zip(&self.hazards).enumerate() {
            let last = k + 1 == self.pillars.len();
            if t <= p || last {
                return acc + h * (t - left).max(0.0);
            }
            acc += h * (p - left);
            left = p;
        }
        unreachable!("loop returns on the last pillar")
    }

    /// `S₀(t)`.
    pub fn survival(&self, t: f64) -> f64 {
        (-self.cumulative_hazard(t.max(0.0))).exp()
    }
}

impl TryFrom<Vec<(f64, f64)>> for SurvivalCurve {
    type Error = Error;
    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SurvivalCurve> for Vec<(f64, f64)> {
    fn from(c: SurvivalCurve) -> Self {
        c.records()
    }
}
