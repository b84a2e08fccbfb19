use std::collections::BTreeMap;

use num_complex::Complex64;

use super::modes::{solve, Jacobian};
use super::{c2_norm, ModeSource, C2, C2_ZERO};
use crate::error::{Error, Result};
use crate::fundsol::LameParams;
use crate::specfun::{hankel1, Order};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// coef · H⁽¹⁾_order(k r) e^{i·order·θ}
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutgoingTerm {
    pub order: i32,
    pub k: f64,
    pub coef: C2,
}

/// A field outside the source support: a finite sum of outgoing cylindrical waves.
#[derive(Clone, Debug, PartialEq)]
pub struct OutgoingField {
    pub terms: Vec<OutgoingTerm>,
    /// Valid for |x| ≥ r_min.
    pub r_min: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiationReport {
    pub k: f64,
    pub r1: f64,
    pub r2: f64,
    /// θ-RMS of |(∂_r − ik)u| at r1 and r2.
    pub m1: f64,
    pub m2: f64,
    pub ratio: f64,
    /// sqrt(r1/r2)·1.2, the ceiling for a field that decays faster than r^{−1/2}.
    pub threshold: f64,
    pub pass: bool,
}

fn merge(terms: impl IntoIterator<Item = OutgoingTerm>) -> Vec<OutgoingTerm> {
    let mut map: BTreeMap<(i32, u64), C2> = BTreeMap::new();
    for t in terms {
        let e = map.entry((t.order, t.k.to_bits())).or_insert(C2_ZERO);
        e[0] += t.coef[0];
        e[1] += t.coef[1];
    }
    map.into_iter()
        .map(|((order, kb), coef)| OutgoingTerm {
            order,
            k: f64::from_bits(kb),
            coef,
        })
        .collect()
}

impl OutgoingField {
    /// The exterior expansion of u = ∫Φ(·,y)f(y)dy for |x| beyond the support.
    pub fn from_source(src: &dyn ModeSource, p: &LameParams) -> Result<Self> {
        let b = src.support().1;
        let sol = solve(src, p, &[b])?;
        let mut terms = Vec::new();
        for (&n, m) in &sol.modes {
            for (ki, &k) in m.ks.iter().enumerate() {
                terms.push(OutgoingTerm {
                    order: n,
                    k,
                    coef: m.atoms[0].h[ki],
                });
            }
        }
        Ok(OutgoingField {
            terms: merge(terms),
            r_min: b,
        })
    }

    fn check(&self, r: f64) -> Result<()> {
        if r < self.r_min * (1.0 - 1e-12) {
            return Err(Error::Domain(format!(
                "exterior expansion used at r = {r} inside the support radius {}",
                self.r_min
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: [f64; 2]) -> Result<C2> {
        let (r, th) = (x[0].hypot(x[1]), x[1].atan2(x[0]));
        self.check(r)?;
        let mut out = C2_ZERO;
        for t in &self.terms {
            let g = hankel1(Order::int(t.order), t.k * r)? * Complex64::from_polar(1.0, t.order as f64 * th);
            out[0] += g * t.coef[0];
            out[1] += g * t.coef[1];
        }
        Ok(out)
    }

    pub fn jacobian(&self, x: [f64; 2]) -> Result<Jacobian> {
        let mut jac = [[Complex64::new(0.0, 0.0); 2]; 2];
        for a in 0..2 {
            let d = self.derivative(a);
            let v = d.eval(x)?;
            jac[a] = v;
        }
        Ok(jac)
    }

    /// ∂_a of every component, a = 0 for x₁ and 1 for x₂.
    pub fn derivative(&self, a: usize) -> OutgoingField {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            let h = Complex64::new(0.5 * t.k, 0.0);
            let (lo, hi) = if a == 0 { (h, -h) } else { (I * h, I * h) };
            out.push(OutgoingTerm {
                order: t.order - 1,
                k: t.k,
                coef: [t.coef[0] * lo, t.coef[1] * lo],
            });
            out.push(OutgoingTerm {
                order: t.order + 1,
                k: t.k,
                coef: [t.coef[0] * hi, t.coef[1] * hi],
            });
        }
        OutgoingField {
            terms: merge(out),
            r_min: self.r_min,
        }
    }

    /// div u as a field whose first component carries the scalar.
    pub fn divergence(&self) -> OutgoingField {
        let d1 = self.derivative(0);
        let d2 = self.derivative(1);
        let terms = d1
            .terms
            .iter()
            .map(|t| OutgoingTerm {
                coef: [t.coef[0], Complex64::new(0.0, 0.0)],
                ..*t
            })
            .chain(d2.terms.iter().map(|t| OutgoingTerm {
                coef: [t.coef[1], Complex64::new(0.0, 0.0)],
                ..*t
            }));
        OutgoingField {
            terms: merge(terms),
            r_min: self.r_min,
        }
    }

    // ∇ of the scalar held in component 0.
    fn gradient_of_scalar(&self) -> OutgoingField {
        let scalar = OutgoingField {
            terms: self
                .terms
                .iter()
                .map(|t| OutgoingTerm {
                    coef: [t.coef[0], t.coef[0]],
                    ..*t
                })
                .collect(),
            r_min: self.r_min,
        };
        let d1 = scalar.derivative(0);
        let d2 = scalar.derivative(1);
        let terms = d1
            .terms
            .iter()
            .map(|t| OutgoingTerm {
                coef: [t.coef[0], Complex64::new(0.0, 0.0)],
                ..*t
            })
            .chain(d2.terms.iter().map(|t| OutgoingTerm {
                coef: [Complex64::new(0.0, 0.0), t.coef[1]],
                ..*t
            }));
        OutgoingField {
            terms: merge(terms),
            r_min: self.r_min,
        }
    }

    pub fn scale(&self, s: Complex64) -> OutgoingField {
        OutgoingField {
            terms: self
                .terms
                .iter()
                .map(|t| OutgoingTerm {
                    coef: [t.coef[0] * s, t.coef[1] * s],
                    ..*t
                })
                .collect(),
            r_min: self.r_min,
        }
    }

    pub fn sub(&self, o: &OutgoingField) -> OutgoingField {
        let neg = o.scale(Complex64::new(-1.0, 0.0));
        OutgoingField {
            terms: merge(self.terms.iter().chain(&neg.terms).copied()),
            r_min: self.r_min.max(o.r_min),
        }
    }

    /// u_p = −(1/k_p²)∇div u.
    pub fn p_part(&self, p: &LameParams) -> OutgoingField {
        self.divergence()
            .gradient_of_scalar()
            .scale(Complex64::new(-1.0 / (p.k_p * p.k_p), 0.0))
    }

    /// u_s = u − u_p.
    pub fn s_part(&self, p: &LameParams) -> OutgoingField {
        self.sub(&self.p_part(p))
    }

    /// Terms at a single wave number.
    pub fn at_wave_number(&self, k: f64) -> OutgoingField {
        OutgoingField {
            terms: self.terms.iter().filter(|t| t.k == k).copied().collect(),
            r_min: self.r_min,
        }
    }

    /// θ-RMS of |(∂_r − ik)u| at radius r, exact by Parseval over the angular orders.
    pub fn sommerfeld_rms(&self, k: f64, r: f64) -> Result<f64> {
        self.check(r)?;
        let mut by_order: BTreeMap<i32, C2> = BTreeMap::new();
        for t in &self.terms {
            let o = Order::int(t.order);
            let z = t.k * r;
            let dr = (hankel1(o.shift(-1), z)? - hankel1(o.shift(1), z)?) * (0.5 * t.k);
            let g = dr - I * k * hankel1(o, z)?;
            let e = by_order.entry(t.order).or_insert(C2_ZERO);
            e[0] += g * t.coef[0];
            e[1] += g * t.coef[1];
        }
        Ok(by_order.values().map(|v| c2_norm(*v).powi(2)).sum::<f64>().sqrt())
    }

    pub fn radiation(&self, k: f64, r1: f64, r2: f64) -> Result<RadiationReport> {
        let m1 = self.sommerfeld_rms(k, r1)?;
        let m2 = self.sommerfeld_rms(k, r2)?;
        let ratio = if m1 > 0.0 { m2 / m1 } else { 0.0 };
        let threshold = (r1 / r2).sqrt() * 1.2;
        Ok(RadiationReport {
            k,
            r1,
            r2,
            m1,
            m2,
            ratio,
            threshold,
            pass: ratio <= threshold,
        })
    }
}
