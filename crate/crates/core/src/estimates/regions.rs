use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionTag {
    D1,
    D2,
    D3,
    D4,
    D5,
    FullUpper,
}

impl RegionTag {
    pub const TILES: [RegionTag; 5] = [RegionTag::D1, RegionTag::D2, RegionTag::D3, RegionTag::D4, RegionTag::D5];
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionTag::D1 => "D1",
            RegionTag::D2 => "D2",
            RegionTag::D3 => "D3",
            RegionTag::D4 => "D4",
            RegionTag::D5 => "D5",
            RegionTag::FullUpper => "FullUpper",
        };
        f.write_str(s)
    }
}

impl FromStr for RegionTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "D1" => RegionTag::D1,
            "D2" => RegionTag::D2,
            "D3" => RegionTag::D3,
            "D4" => RegionTag::D4,
            "D5" => RegionTag::D5,
            "FullUpper" | "full" => RegionTag::FullUpper,
            _ => return Err(Error::Parse(format!("unknown region {s:?}"))),
        })
    }
}

/// A t-slab {t0 < t < t1, max(lo, t − lo_shift) < r < min(hi, t − hi_shift)}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub t0: f64,
    pub t1: f64,
    pub lo: f64,
    pub lo_shift: f64,
    pub hi: f64,
    pub hi_shift: f64,
}

impl Piece {
    /// 0 < r < t over t0 < t < t1.
    pub fn triangle(t0: f64, t1: f64) -> Self {
        Piece {
            t0,
            t1,
            lo: 0.0,
            lo_shift: f64::INFINITY,
            hi: f64::INFINITY,
            hi_shift: 0.0,
        }
    }

    /// lo < r < hi, independent of t.
    pub fn rect(t0: f64, t1: f64, lo: f64, hi: f64) -> Self {
        Piece {
            t0,
            t1,
            lo,
            lo_shift: f64::INFINITY,
            hi,
            hi_shift: f64::NEG_INFINITY,
        }
    }

    pub fn r_range(&self, t: f64) -> (f64, f64) {
        (self.lo.max(t - self.lo_shift), self.hi.min(t - self.hi_shift))
    }

    pub fn contains(&self, r: f64, t: f64) -> bool {
        let (lo, hi) = self.r_range(t);
        self.t0 < t && t < self.t1 && lo < r && r < hi
    }
}

/// One of the regions splitting {0 < r < t}, for Bessel order μ and speed ratio a.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionSpec {
    pub tag: RegionTag,
    pub mu: f64,
    pub a: f64,
}

impl RegionSpec {
    /// D2–D5 need μ ≥ 2a + 1 so that μ/(2a) lies beyond 1 + 1/(2a).
    pub fn new(tag: RegionTag, mu: f64, a: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParams(format!("mu must be positive, got {mu}")));
        }
        if !(a >= 1.0 && a.is_finite()) {
            return Err(Error::InvalidParams(format!("a must be at least 1, got {a}")));
        }
        if !matches!(tag, RegionTag::D1 | RegionTag::FullUpper) && mu < 2.0 * a + 1.0 {
            return Err(Error::InvalidParams(format!(
                "region {tag} needs mu >= 2a + 1 = {}, got {mu}",
                2.0 * a + 1.0
            )));
        }
        Ok(RegionSpec { tag, mu, a })
    }

    /// μ + 2 − (μ + 2)^{1/3}
    pub fn turning(&self) -> f64 {
        let m = self.mu + 2.0;
        m - m.cbrt()
    }

    /// Truncation radius for the unbounded regions.
    pub fn t_max(&self) -> f64 {
        let m = self.mu + 2.0;
        m + (10.0 * m.cbrt()).max(50.0)
    }

    /// Power of a multiplying the second product in the cancelled integrand.
    pub fn a_power(&self) -> i32 {
        match self.tag {
            RegionTag::FullUpper => 1,
            _ => 2,
        }
    }

    pub fn pieces(&self) -> Vec<Piece> {
        let a = self.a;
        let c1 = 1.0 + 0.5 / a;
        let m2 = self.mu / (2.0 * a);
        let tt = self.turning();
        let inf = f64::INFINITY;
        match self.tag {
            RegionTag::D1 => vec![Piece::triangle(0.0, c1)],
            RegionTag::D2 => vec![Piece {
                lo_shift: 1.0 / a,
                ..Piece::triangle(c1, m2)
            }],
            RegionTag::D3 => vec![
                Piece {
                    hi_shift: 1.0 / a,
                    ..Piece::triangle(c1, m2)
                },
                Piece::rect(m2, tt, 0.0, m2 - 1.0 / a),
            ],
            RegionTag::D4 => vec![Piece {
                lo: m2 - 1.0 / a,
                ..Piece::triangle(m2, tt)
            }],
            RegionTag::D5 => vec![Piece::triangle(tt, inf)],
            RegionTag::FullUpper => vec![Piece::triangle(0.0, inf)],
        }
    }

    pub fn contains(&self, r: f64, t: f64) -> bool {
        self.pieces().iter().any(|p| p.contains(r, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d3_pieces_meet_d2_and_d4() {
        let a = 2f64.sqrt();
        let d2 = RegionSpec::new(RegionTag::D2, 40.0, a).unwrap();
        let d3 = RegionSpec::new(RegionTag::D3, 40.0, a).unwrap();
        let d4 = RegionSpec::new(RegionTag::D4, 40.0, a).unwrap();
        let t = 5.0;
        assert!(d2.contains(t - 0.5 / a, t));
        assert!(d3.contains(t - 1.5 / a, t));
        let t = 20.0;
        let edge = 40.0 / (2.0 * a) - 1.0 / a;
        assert!(d3.contains(edge - 1e-9, t) && d4.contains(edge + 1e-9, t));
        assert!(RegionSpec::new(RegionTag::D2, 3.0, a).is_err());
    }
}
