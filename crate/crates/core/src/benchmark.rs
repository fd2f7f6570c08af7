//! Two-dimensional test functions, shifted so each global minimum is zero.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchmarkFunction {
    Branin,
    Easom,
    GoldsteinPrice,
    MartinGaddy,
    SixHumpCamel,
}

pub type Bounds = [(f64, f64); 2];

impl BenchmarkFunction {
    pub const ALL: [BenchmarkFunction; 5] = [
        Self::Branin,
        Self::Easom,
        Self::GoldsteinPrice,
        Self::MartinGaddy,
        Self::SixHumpCamel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Branin => "branin",
            Self::Easom => "easom",
            Self::GoldsteinPrice => "goldstein-price",
            Self::MartinGaddy => "martin-gaddy",
            Self::SixHumpCamel => "six-hump-camel",
        }
    }

    pub fn bounds(self) -> Bounds {
        match self {
            Self::Branin => [(-5.0, 10.0), (0.0, 15.0)],
            Self::Easom => [(-100.0, 100.0), (-100.0, 100.0)],
            Self::GoldsteinPrice => [(-2.0, 2.0), (-2.0, 2.0)],
            Self::MartinGaddy => [(0.0, 10.0), (0.0, 10.0)],
            Self::SixHumpCamel => [(-3.0, 3.0), (-2.0, 2.0)],
        }
    }

    /// Raw global minimum, subtracted by [`Self::eval`].
    pub fn min_offset(self) -> f64 {
        match self {
            // 5 / (4 pi)
            Self::Branin => 0.397_887_357_729_738_4,
            Self::Easom => -1.0,
            Self::GoldsteinPrice => 3.0,
            Self::MartinGaddy => 0.0,
            Self::SixHumpCamel => -1.031_628_453_489_877_4,
        }
    }

    /// Known global minimizers inside the domain.
    pub fn minimizers(self) -> &'static [(f64, f64)] {
        match self {
            Self::Branin => &[(-PI, 12.275), (PI, 2.275), (3.0 * PI, 2.475)],
            Self::Easom => &[(PI, PI)],
            Self::GoldsteinPrice => &[(0.0, -1.0)],
            Self::MartinGaddy => &[(5.0, 5.0)],
            Self::SixHumpCamel => &[
                (0.089_842_013_683_013_31, -0.712_656_403_270_413_5),
                (-0.089_842_013_683_013_31, 0.712_656_403_270_413_5),
            ],
        }
    }

    /// The literature formula, unshifted.
    pub fn raw(self, x: f64, y: f64) -> f64 {
        match self {
            Self::Branin => {
                let b = 5.1 / (4.0 * PI * PI);
                let c = 5.0 / PI;
                let t = 1.0 / (8.0 * PI);
                (y - b * x * x + c * x - 6.0).powi(2) + 10.0 * (1.0 - t) * x.cos() + 10.0
            }
            Self::Easom => -x.cos() * y.cos() * (-((x - PI).powi(2) + (y - PI).powi(2))).exp(),
            Self::GoldsteinPrice => {
                let a = 1.0
                    + (x + y + 1.0).powi(2)
                        * (19.0 - 14.0 * x + 3.0 * x * x - 14.0 * y + 6.0 * x * y + 3.0 * y * y);
                let b = 30.0
                    + (2.0 * x - 3.0 * y).powi(2)
                        * (18.0 - 32.0 * x + 12.0 * x * x + 48.0 * y - 36.0 * x * y + 27.0 * y * y);
                a * b
            }
            Self::MartinGaddy => (x - y).powi(2) + ((x + y - 10.0) / 3.0).powi(2),
            Self::SixHumpCamel => {
                let x2 = x * x;
                (4.0 - 2.1 * x2 + x2 * x2 / 3.0) * x2 + x * y + (-4.0 + 4.0 * y * y) * y * y
            }
        }
    }

    /// Zero-normalized value without the domain check.
    pub fn value(self, x: f64, y: f64) -> f64 {
        self.raw(x, y) - self.min_offset()
    }

    pub fn contains(self, x: f64, y: f64) -> bool {
        let [(xl, xh), (yl, yh)] = self.bounds();
        (xl..=xh).contains(&x) && (yl..=yh).contains(&y)
    }

    /// Zero-normalized value; points outside the domain are rejected.
    pub fn eval(self, x: f64, y: f64) -> Result<f64> {
        if !self.contains(x, y) {
            return Err(invalid(format!(
                "({x}, {y}) lies outside the {} domain",
                self.name()
            )));
        }
        Ok(self.value(x, y))
    }
}

impl fmt::Display for BenchmarkFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|f| f.name()).collect();
                invalid(format!(
                    "unknown function {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Uniform point in a bound rectangle.
pub fn sample_in(bounds: &Bounds, rng: &mut RngStream) -> (f64, f64) {
    let [(xl, xh), (yl, yh)] = *bounds;
    (rng.gen_range(xl..=xh), rng.gen_range(yl..=yh))
}

pub fn sample_uniform(f: BenchmarkFunction, rng: &mut RngStream) -> (f64, f64) {
    sample_in(&f.bounds(), rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_zeros() {
        assert_eq!(BenchmarkFunction::MartinGaddy.eval(5.0, 5.0).unwrap(), 0.0);
        assert_eq!(BenchmarkFunction::Easom.raw(PI, PI), -1.0);
        assert_eq!(BenchmarkFunction::Easom.eval(PI, PI).unwrap(), 0.0);
        assert_eq!(BenchmarkFunction::GoldsteinPrice.raw(0.0, -1.0), 3.0);
        assert_eq!(
            BenchmarkFunction::GoldsteinPrice.eval(0.0, -1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn documented_points_near_zero() {
        assert!(BenchmarkFunction::Branin.eval(PI, 2.275).unwrap().abs() <= 1e-6);
        assert!(
            BenchmarkFunction::SixHumpCamel
                .eval(0.0898, -0.7126)
                .unwrap()
                .abs()
                <= 1e-6
        );
        for f in BenchmarkFunction::ALL {
            for &(x, y) in f.minimizers() {
                let v = f.eval(x, y).unwrap();
                assert!((-1e-9..=1e-6).contains(&v), "{f} at ({x}, {y}) = {v}");
            }
        }
    }

    #[test]
    fn out_of_domain_rejected() {
        assert!(BenchmarkFunction::GoldsteinPrice.eval(2.5, 0.0).is_err());
        assert!(BenchmarkFunction::Branin.eval(0.0, -0.1).is_err());
        assert!(BenchmarkFunction::Easom.eval(-100.0, 100.0).is_ok());
    }

    #[test]
    fn names_round_trip() {
        for f in BenchmarkFunction::ALL {
            assert_eq!(f.name().parse::<BenchmarkFunction>().unwrap(), f);
        }
        let err = "rastrigin"
            .parse::<BenchmarkFunction>()
            .unwrap_err()
            .to_string();
        assert!(err.contains("martin-gaddy"));
    }

    #[test]
    fn samples_inside_and_seeded() {
        for f in BenchmarkFunction::ALL {
            let mut rng = RngStream::new(11);
            for _ in 0..100_000 {
                let (x, y) = sample_uniform(f, &mut rng);
                assert!(f.contains(x, y));
            }
            assert_eq!(
                sample_uniform(f, &mut RngStream::new(4)),
                sample_uniform(f, &mut RngStream::new(4))
            );
        }
    }

    #[test]
    fn sample_mean_approaches_centre() {
        for f in BenchmarkFunction::ALL {
            let mut rng = RngStream::new(2024);
            let n = 1_000_000;
            let (mut sx, mut sy) = (0.0, 0.0);
            for _ in 0..n {
                let (x, y) = sample_uniform(f, &mut rng);
                sx += x;
                sy += y;
            }
            let [(xl, xh), (yl, yh)] = f.bounds();
            let (cx, cy) = ((xl + xh) / 2.0, (yl + yh) / 2.0);
            // 1% of the side length, so centres at zero are handled.
            assert!((sx / n as f64 - cx).abs() <= 0.01 * (xh - xl), "{f} x");
            assert!((sy / n as f64 - cy).abs() <= 0.01 * (yh - yl), "{f} y");
        }
    }
}
