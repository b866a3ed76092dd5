//! Seeded admissible sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{Point, Symbol};
use crate::forms::{Chart, Guard};

/// Grid values `k/6` for `k = 2..=18`, covering `[1/3, 3]`.
const GRID: std::ops::RangeInclusive<u32> = 2..=18;
const ATTEMPTS: usize = 2000;

/// Seeded source of points on the rational grid in `[1/3, 3]`.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn value(&mut self) -> f64 {
        self.rng.gen_range(GRID) as f64 / 6.0
    }

    /// A point assigning every chart coordinate, extending `fixed` (usually
    /// parameter values), redrawn until the chart guards and `extra` hold.
    pub fn point(&mut self, chart: &Chart, fixed: &Point, extra: &[Guard]) -> Result<Point> {
        self.point_for(chart.coords(), fixed, |p| {
            chart.check(p).is_ok() && extra.iter().all(|g| g.holds(p).unwrap_or(false))
        })
        .ok_or_else(|| {
            Error::GuardViolation(format!("no admissible point found on chart {}", chart.name()))
        })
    }

    /// Draws values for `coords` until `accept` holds.
    pub fn point_for(
        &mut self,
        coords: &[Symbol],
        fixed: &Point,
        accept: impl Fn(&Point) -> bool,
    ) -> Option<Point> {
        for _ in 0..ATTEMPTS {
            let mut p = fixed.clone();
            for c in coords {
                let v = self.value();
                p.insert(c.clone(), v);
            }
            if accept(&p) {
                return Some(p);
            }
        }
        None
    }
}

/// `n` admissible points on `chart`.
pub fn admissible_points(
    chart: &Chart,
    fixed: &Point,
    extra: &[Guard],
    n: usize,
    seed: u64,
) -> Result<Vec<Point>> {
    let mut s = Sampler::new(seed);
    (0..n).map(|_| s.point(chart, fixed, extra)).collect()
}
