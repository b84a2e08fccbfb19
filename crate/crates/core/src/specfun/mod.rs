//! Special functions: Bessel/Hankel for integer and half-integer orders,
//! spherical Bessel functions, Debye leading terms with error envelopes,
//! associated Legendre functions and spherical harmonics.

mod bessel;
mod debye;
mod gamma;
mod legendre;
mod spherical;
pub mod selftest;

use std::fmt;

use crate::error::{Error, Result};

pub use bessel::{
    bessel_j, bessel_j_scaled, bessel_y, bessel_y_int_series, bessel_y_scaled, hankel1,
    hankel1_scaled, small_arg_leading, ArgKind, Scaled, ScaledComplex,
};
pub use debye::{calibrate_debye_c0, debye_frame, debye_phi, debye_phi_derivative, DebyeFrame, DEBYE_C0};
pub use gamma::{digamma_int, factorial, gamma, ln_gamma, EULER_GAMMA};
pub use legendre::{assoc_legendre, sph_harm, SphHarmIndex};
pub use spherical::{spherical_bessel, SphericalKind};

/// Largest |2μ| accepted by the Bessel routines.
pub const MAX_TWICE_ORDER: i32 = 1000;

/// A Bessel order μ stored as 2μ so integers and half-integers are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Order {
    twice: i32,
}

impl Order {
    pub const fn from_twice(twice: i32) -> Self {
        Order { twice }
    }

    pub const fn int(n: i32) -> Self {
        Order { twice: 2 * n }
    }

    /// The half-integer order n + 1/2.
    pub const fn half(n: i32) -> Self {
        Order { twice: 2 * n + 1 }
    }

    pub fn try_from_f64(v: f64) -> Result<Self> {
        let t = 2.0 * v;
        if !t.is_finite() || t.fract() != 0.0 || t.abs() > MAX_TWICE_ORDER as f64 {
            return Err(Error::Domain(format!(
                "order {v} is not an integer or half-integer in range"
            )));
        }
        Ok(Order { twice: t as i32 })
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        0.5 * self.twice as f64
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// μ + m for an integer shift m.
    pub const fn shift(self, m: i32) -> Self {
        Order {
            twice: self.twice + 2 * m,
        }
    }

    pub const fn neg(self) -> Self {
        Order { twice: -self.twice }
    }
}

impl From<i32> for Order {
    fn from(n: i32) -> Self {
        Order::int(n)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_roundtrip() {
        let o = Order::try_from_f64(16.5).unwrap();
        assert_eq!(o.twice(), 33);
        assert!(!o.is_integer());
        assert_eq!(o.shift(2).value(), 18.5);
        assert_eq!(Order::half(3), Order::from_twice(7));
        assert_eq!(o.to_string(), "33/2");
        assert!(Order::try_from_f64(0.3).is_err());
    }
}
