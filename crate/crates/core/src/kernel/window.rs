use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Open time interval `(lo, hi)`; `hi = None` stands for `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WindowDoc")]
pub struct TimeWindow {
    lo: f64,
    hi: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowDoc {
    lo: f64,
    #[serde(default)]
    hi: Option<f64>,
}

impl TryFrom<WindowDoc> for TimeWindow {
    type Error = Error;

    fn try_from(doc: WindowDoc) -> Result<Self> {
        TimeWindow::new(doc.lo, doc.hi.unwrap_or(f64::INFINITY))
    }
}

impl TimeWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && lo >= 0.0) {
            return Err(Error::config(
                "window.lo",
                format!("must be a finite time ≥ 0, got {lo}"),
            ));
        }
        if hi.is_nan() || hi <= lo {
            return Err(Error::config(
                "window.hi",
                format!("must exceed lo = {lo}, got {hi}"),
            ));
        }
        Ok(TimeWindow {
            lo,
            hi: hi.is_finite().then_some(hi),
        })
    }

    /// The half-line `(lo, ∞)`.
    pub fn unbounded(lo: f64) -> Result<Self> {
        Self::new(lo, f64::INFINITY)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> Option<f64> {
        self.hi
    }

    pub fn is_compact(&self) -> bool {
        self.hi.is_some()
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && self.hi.is_none_or(|h| t < h)
    }
}

/// Sampling density and number of dyadic refinement levels.
///
/// Compact windows start from `ceil(per_unit · width)` midpoint samples and
/// double the count per level. Unbounded windows keep `per_unit` samples per
/// unit time and double the horizon `(lo, lo + 2^j)` per level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub per_unit: usize,
    pub levels: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            per_unit: 64,
            levels: 8,
        }
    }
}

impl Resolution {
    pub fn new(per_unit: usize, levels: usize) -> Result<Self> {
        if per_unit == 0 {
            return Err(Error::config("resolution.per_unit", "must be positive"));
        }
        if levels == 0 {
            return Err(Error::config("resolution.levels", "must be positive"));
        }
        Ok(Resolution { per_unit, levels })
    }
}

/// One refinement level: the sample times plus the abscissa recorded in the trace.
#[derive(Debug, Clone)]
pub struct SampleLevel {
    pub resolution: f64,
    pub times: Vec<f64>,
}

/// Midpoint sample schedule over a window.
pub fn sample_levels(window: &TimeWindow, res: &Resolution) -> Vec<SampleLevel> {
    let lo = window.lo();
    match window.hi() {
        Some(hi) => {
            let width = hi - lo;
            let base = ((res.per_unit as f64 * width).ceil() as usize).max(1);
            (0..res.levels)
                .map(|j| {
                    let n = base << j;
                    SampleLevel {
                        resolution: n as f64,
                        times: (0..n)
                            .map(|i| lo + width * (i as f64 + 0.5) / n as f64)
                            .collect(),
                    }
                })
                .collect()
        }
        None => (0..res.levels)
            .map(|j| {
                let horizon = (1u64 << j) as f64;
                let n = res.per_unit << j;
                SampleLevel {
                    resolution: lo + horizon,
                    times: (0..n)
                        .map(|i| lo + (i as f64 + 0.5) / res.per_unit as f64)
                        .collect(),
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_and_negative_windows() {
        assert!(TimeWindow::new(2.0, 1.0).is_err());
        assert!(TimeWindow::new(-1.0, 1.0).is_err());
        assert!(TimeWindow::new(1.0, 1.0).is_err());
        assert!(TimeWindow::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn deserialization_validates() {
        let w: TimeWindow = serde_json::from_str(r#"{"lo": 1.0}"#).unwrap();
        assert_eq!(w, TimeWindow::unbounded(1.0).unwrap());
        assert!(serde_json::from_str::<TimeWindow>(r#"{"lo": 2.0, "hi": 1.0}"#).is_err());
        let back: TimeWindow = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn samples_stay_strictly_inside() {
        let w = TimeWindow::new(0.0, 1.0).unwrap();
        for level in sample_levels(&w, &Resolution::new(4, 3).unwrap()) {
            assert!(level.times.iter().all(|&t| w.contains(t)));
        }
        let u = TimeWindow::unbounded(2.0).unwrap();
        let levels = sample_levels(&u, &Resolution::new(8, 4).unwrap());
        assert_eq!(levels[3].times.len(), 64);
        assert_eq!(levels[3].resolution, 10.0);
        assert!(levels[3].times.iter().all(|&t| t > 2.0 && t < 10.0));
    }

    #[test]
    fn unbounded_levels_are_nested_prefixes() {
        let u = TimeWindow::unbounded(0.0).unwrap();
        let levels = sample_levels(&u, &Resolution::new(3, 3).unwrap());
        assert_eq!(levels[1].times[..3], levels[0].times[..]);
    }
}
