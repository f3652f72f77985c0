use serde::{Deserialize, Serialize};

/// Regions of the `(rho, x)` quadrant used by the dispatcher and by the
/// bound certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegimeTag {
    /// `rho >= 2 x^2`.
    SeriesSmall,
    /// `x <= rho - C' rho^{1/3} (log rho)^{1/3}`.
    DecaySmall,
    /// Between the decay region and the turning-point band.
    GapSmall,
    /// `|x - rho| <= C rho^{1/3}`.
    Transition,
    /// `rho + C rho^{1/3} < x < rho + C rho^alpha`.
    Oscillatory,
    /// `x >= rho + C rho^alpha`.
    FarOscillatory,
}

impl RegimeTag {
    pub const ALL: [RegimeTag; 6] = [
        RegimeTag::SeriesSmall,
        RegimeTag::DecaySmall,
        RegimeTag::GapSmall,
        RegimeTag::Transition,
        RegimeTag::Oscillatory,
        RegimeTag::FarOscillatory,
    ];
}

/// Largest order for which [`C_PRIME`] was calibrated.
pub const C_PRIME_CALIBRATION_RHO_MAX: f64 = 1000.0;

/// Smallest two-decimal `C'` with `z >= log rho` at the decay edge for every
/// `rho <= 1000`. The required value grows like `(log rho)^{1/3}`, so this is
/// only a finite-range calibration.
pub const C_PRIME: f64 = 1.96;

/// Regime boundary constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub c: f64,
    pub c_prime: f64,
    pub alpha: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { c: 1.0, c_prime: C_PRIME, alpha: 13.0 / 15.0 }
    }
}

impl Thresholds {
    pub fn is_series_small(&self, rho: f64, x: f64) -> bool {
        rho >= 2.0 * x * x
    }

    /// Depth of the decay edge below `rho`, never less than the half-width of
    /// the turning-point band, so the regions stay disjoint when
    /// `C' (log rho)^{1/3} < C`.
    fn decay_depth(&self, rho: f64) -> f64 {
        let l = rho.ln().max(0.0).cbrt();
        (self.c_prime * l).max(self.c) * rho.cbrt()
    }

    /// Lower edge of the gap band.
    pub fn decay_edge(&self, rho: f64) -> f64 {
        rho - self.decay_depth(rho)
    }

    // The band predicates below all compare `d = x - rho` against the same
    // expressions, so that rounding cannot leave a point uncovered.

    pub fn is_decay_small(&self, rho: f64, x: f64) -> bool {
        !self.is_series_small(rho, x) && x - rho <= -self.decay_depth(rho)
    }

    pub fn is_gap_small(&self, rho: f64, x: f64) -> bool {
        let d = x - rho;
        !self.is_series_small(rho, x) && d > -self.decay_depth(rho) && d < -self.c * rho.cbrt()
    }

    pub fn is_transition(&self, rho: f64, x: f64) -> bool {
        !self.is_series_small(rho, x) && (x - rho).abs() <= self.c * rho.cbrt()
    }

    pub fn is_oscillatory(&self, rho: f64, x: f64) -> bool {
        let d = x - rho;
        !self.is_series_small(rho, x) && d > self.c * rho.cbrt() && d < self.c * rho.powf(self.alpha)
    }

    pub fn is_far_oscillatory(&self, rho: f64, x: f64) -> bool {
        let d = x - rho;
        !self.is_series_small(rho, x) && d >= self.c * rho.powf(self.alpha) && d > self.c * rho.cbrt()
    }

    pub fn holds(&self, tag: RegimeTag, rho: f64, x: f64) -> bool {
        match tag {
            RegimeTag::SeriesSmall => self.is_series_small(rho, x),
            RegimeTag::DecaySmall => self.is_decay_small(rho, x),
            RegimeTag::GapSmall => self.is_gap_small(rho, x),
            RegimeTag::Transition => self.is_transition(rho, x),
            RegimeTag::Oscillatory => self.is_oscillatory(rho, x),
            RegimeTag::FarOscillatory => self.is_far_oscillatory(rho, x),
        }
    }

    /// Every tag whose predicate holds; exactly one for `x >= 0`.
    pub fn matching(&self, rho: f64, x: f64) -> Vec<RegimeTag> {
        RegimeTag::ALL.iter().copied().filter(|t| self.holds(*t, rho, x)).collect()
    }

    /// Argument `z` of the decaying Langer formula at the decay edge, or
    /// `None` when the edge is not positive.
    pub fn z_at_decay_edge(&self, rho: f64) -> Option<f64> {
        let x = rho - self.c_prime * rho.cbrt() * rho.ln().max(0.0).cbrt();
        if x <= 0.0 || x >= rho {
            return None;
        }
        let w = ((rho - x) * (rho + x)).sqrt() / rho;
        Some(rho * (w.atanh() - w))
    }
}

/// A classified point with the thresholds that produced the tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselRegime {
    pub tag: RegimeTag,
    pub thresholds: Thresholds,
}

pub fn classify_with(th: Thresholds, rho: f64, x: f64) -> BesselRegime {
    let tag = RegimeTag::ALL
        .iter()
        .copied()
        .find(|t| th.holds(*t, rho, x))
        .expect("regime predicates cover the quadrant");
    BesselRegime { tag, thresholds: th }
}

pub fn classify(rho: f64, x: f64) -> BesselRegime {
    classify_with(Thresholds::default(), rho, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exactly_one_tag_on_random_points() {
        let th = Thresholds::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let rho: f64 = rng.gen_range(1.0..500.0);
            let x: f64 = rng.gen_range(0.0..2.0 * rho + 50.0);
            assert_eq!(th.matching(rho, x).len(), 1, "rho={rho} x={x}");
        }
    }

    #[test]
    fn exactly_one_tag_on_boundaries() {
        let th = Thresholds::default();
        for rho in [1.0f64, 1.5, 2.0, 8.0, 64.0, 80.0, 100.0, 499.0] {
            let r3 = rho.cbrt();
            for x in [
                0.0,
                (rho / 2.0).sqrt(),
                th.decay_edge(rho),
                rho - r3,
                rho,
                rho + r3,
                rho + rho.powf(th.alpha),
                84.30886938006377,
            ] {
                if x >= 0.0 {
                    assert_eq!(th.matching(rho, x).len(), 1, "rho={rho} x={x}");
                }
            }
        }
    }

    #[test]
    fn c_prime_makes_decay_edge_deep_enough() {
        let th = Thresholds::default();
        let mut rho = 1.01;
        while rho <= C_PRIME_CALIBRATION_RHO_MAX {
            if let Some(z) = th.z_at_decay_edge(rho) {
                assert!(z >= rho.ln(), "rho={rho} z={z}");
            }
            rho *= 1.01;
        }
        // The calibration is tight: a slightly smaller constant fails somewhere.
        let loose = Thresholds { c_prime: C_PRIME - 0.01, ..th };
        let mut violated = false;
        let mut rho = 1.01;
        while rho <= C_PRIME_CALIBRATION_RHO_MAX {
            if let Some(z) = loose.z_at_decay_edge(rho) {
                violated |= z < rho.ln();
            }
            rho *= 1.01;
        }
        assert!(violated);
    }

    #[test]
    fn documented_classifications() {
        assert_eq!(classify(400.0, 1.0).tag, RegimeTag::SeriesSmall);
        assert_eq!(classify(100.0, 100.0).tag, RegimeTag::Transition);
        assert_eq!(classify(100.0, 50.0).tag, RegimeTag::DecaySmall);
        assert_eq!(classify(100.0, 120.0).tag, RegimeTag::Oscillatory);
        assert_eq!(classify(100.0, 200.0).tag, RegimeTag::FarOscillatory);
        assert_eq!(classify(100.0, 93.0).tag, RegimeTag::GapSmall);
    }

    proptest! {
        #[test]
        fn partition(rho in 1.0f64..500.0, t in 0.0f64..3.0) {
            let x = t * rho;
            prop_assert_eq!(Thresholds::default().matching(rho, x).len(), 1);
        }
    }
}
