use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::Real;

/// Axis-aligned rectangle `[x1.0, x1.1] × [x2.0, x2.1]` in the strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x1: (Real, Real),
    pub x2: (Real, Real),
}

impl Rect {
    /// The whole strip `[0, 2π] × [0, 1]`.
    pub fn full_domain() -> Self {
        Rect { x1: (0.0, 2.0 * PI), x2: (0.0, 1.0) }
    }

    pub fn area(&self) -> Real {
        (self.x1.1 - self.x1.0) * (self.x2.1 - self.x2.0)
    }

    pub fn contains(&self, x1: Real, x2: Real) -> bool {
        (self.x1.0..=self.x1.1).contains(&x1) && (self.x2.0..=self.x2.1).contains(&x2)
    }
}

/// Observation/control region: a rectangle strictly inside the strip in x₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Rect", into = "Rect")]
pub struct ObservationRegion(Rect);

impl ObservationRegion {
    pub fn new(x1: (Real, Real), x2: (Real, Real)) -> Result<Self> {
        let (a1, b1) = x1;
        let (a2, b2) = x2;
        if ![a1, b1, a2, b2].iter().all(|v| v.is_finite()) {
            return Err(invalid("region bounds must be finite"));
        }
        if !(0.0 <= a1 && a1 < b1 && b1 <= 2.0 * PI) {
            return Err(invalid(format!("region x1 = [{a1}, {b1}] must satisfy 0 <= a1 < b1 <= 2π")));
        }
        if !(0.0 < a2 && a2 < b2 && b2 < 1.0) {
            return Err(invalid(format!("region x2 = [{a2}, {b2}] must satisfy 0 < a2 < b2 < 1")));
        }
        Ok(ObservationRegion(Rect { x1, x2 }))
    }

    pub fn rect(&self) -> &Rect {
        &self.0
    }
}

impl std::ops::Deref for ObservationRegion {
    type Target = Rect;
    fn deref(&self) -> &Rect {
        &self.0
    }
}

impl TryFrom<Rect> for ObservationRegion {
    type Error = crate::Error;
    fn try_from(r: Rect) -> Result<Self> {
        ObservationRegion::new(r.x1, r.x2)
    }
}

impl From<ObservationRegion> for Rect {
    fn from(r: ObservationRegion) -> Rect {
        r.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ObservationRegion::new((0.0, PI), (0.3, 0.7)).is_ok());
        assert!(ObservationRegion::new((0.0, PI), (0.0, 0.7)).is_err());
        assert!(ObservationRegion::new((0.0, PI), (0.3, 1.0)).is_err());
        assert!(ObservationRegion::new((1.0, 1.0), (0.3, 0.7)).is_err());
        assert!(ObservationRegion::new((0.0, 7.0), (0.3, 0.7)).is_err());
        assert!(ObservationRegion::new((0.0, 1.0), (0.5, 0.5)).is_err());
    }

    #[test]
    fn serde_revalidates() {
        let bad = r#"{"x1":[0.0,1.0],"x2":[0.0,0.5]}"#;
        assert!(serde_json::from_str::<ObservationRegion>(bad).is_err());
        let ok = r#"{"x1":[0.0,1.0],"x2":[0.2,0.5]}"#;
        assert!(serde_json::from_str::<ObservationRegion>(ok).is_ok());
    }
}
