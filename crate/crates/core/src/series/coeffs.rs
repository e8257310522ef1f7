//! Windowed coefficient families and their resonant special cases.

use std::f64::consts::PI;

use serde::Serialize;

use crate::heat1d::{closed_form_coefficient, factors, quadrature_coefficient, sin_pi_ratio, Parity, TrigPoly};
use crate::Result;

/// Coefficient families indexed by wavenumber for a fixed window parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// cosine coefficients of 1 + cos
    C,
    /// cosine coefficients of cos + cos 2
    D,
    /// sine coefficients of sin
    A1,
    /// cosine coefficients of −cos 2
    B1,
    /// π·a₁/(2p)
    BigA,
    /// π·b₁/2
    BigB,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::C, Family::D, Family::A1, Family::B1, Family::BigA, Family::BigB];

    pub fn name(self) -> &'static str {
        match self {
            Family::C => "c",
            Family::D => "d",
            Family::A1 => "a1",
            Family::B1 => "b1",
            Family::BigA => "A",
            Family::BigB => "B",
        }
    }

    fn source(self) -> (TrigPoly, Parity) {
        match self {
            Family::C => (factors::one_plus_cos(), Parity::Cos),
            Family::D => (factors::cos_cos2(), Parity::Cos),
            Family::A1 | Family::BigA => (factors::sin1(), Parity::Sin),
            Family::B1 | Family::BigB => (factors::neg_cos2(), Parity::Cos),
        }
    }

    fn scale(self, p: usize) -> f64 {
        match self {
            Family::BigA => PI / (2.0 * p as f64),
            Family::BigB => PI / 2.0,
            _ => 1.0,
        }
    }

    /// The value from the windowed-integral machinery of `heat1d`.
    pub fn windowed(self, p: usize, k: usize) -> f64 {
        let (f, parity) = self.source();
        self.scale(p) * closed_form_coefficient(&f, parity, p, k)
    }

    /// Adaptive quadrature of the defining integral.
    pub fn quadrature(self, p: usize, k: usize, tol: f64) -> Result<f64> {
        let (f, parity) = self.source();
        Ok(self.scale(p) * quadrature_coefficient(&f, parity, p, k, tol)?)
    }

    /// Closed-form value with the resonant special cases.
    pub fn closed(self, p: usize, k: usize) -> f64 {
        let pf = p as f64;
        let kf = k as f64;
        let s = sin_pi_ratio(k as i64, p as i64);
        match self {
            Family::C => {
                if k == 0 {
                    2.0 / pf
                } else if k == p {
                    1.0 / pf
                } else {
                    2.0 * pf * pf * s / (PI * kf * (pf * pf - kf * kf))
                }
            }
            Family::D => {
                if k == p || k == 2 * p {
                    1.0 / pf
                } else {
                    6.0 * pf * pf * kf * s / (PI * (pf * pf - kf * kf) * (4.0 * pf * pf - kf * kf))
                }
            }
            Family::A1 => {
                if k == p {
                    1.0 / pf
                } else {
                    2.0 * pf * s / (PI * (pf * pf - kf * kf))
                }
            }
            Family::B1 => {
                if k == 2 * p {
                    -1.0 / pf
                } else {
                    2.0 * kf * s / (PI * (4.0 * pf * pf - kf * kf))
                }
            }
            Family::BigA => big_a(p, k),
            Family::BigB => big_b(p, k),
        }
    }
}

/// sin(πk/p)/(p²−k²), with A(p) = π/(2p²).
pub fn big_a(p: usize, k: usize) -> f64 {
    let pf = p as f64;
    if k == p {
        return PI / (2.0 * pf * pf);
    }
    let kf = k as f64;
    sin_pi_ratio(k as i64, p as i64) / (pf * pf - kf * kf)
}

/// k·sin(πk/p)/(4p²−k²), with B(2p) = −π/(2p).
pub fn big_b(p: usize, k: usize) -> f64 {
    let pf = p as f64;
    if k == 2 * p {
        return -PI / (2.0 * pf);
    }
    let kf = k as f64;
    kf * sin_pi_ratio(k as i64, p as i64) / (4.0 * pf * pf - kf * kf)
}

pub fn c_coef(p: usize, k: usize) -> f64 {
    Family::C.closed(p, k)
}

pub fn d_coef(p: usize, k: usize) -> f64 {
    Family::D.closed(p, k)
}

/// 1/(k(k²−p²)).
pub fn c_rational(p: usize, k: usize) -> f64 {
    let (pf, kf) = (p as f64, k as f64);
    1.0 / (kf * (kf * kf - pf * pf))
}

/// k/((k²−p²)(k²−4p²)).
pub fn d_rational(p: usize, k: usize) -> f64 {
    let (pf, kf) = (p as f64, k as f64);
    kf / ((kf * kf - pf * pf) * (kf * kf - 4.0 * pf * pf))
}

/// 1/(k²−p²).
pub fn a_rational(p: usize, k: usize) -> f64 {
    let (pf, kf) = (p as f64, k as f64);
    1.0 / (kf * kf - pf * pf)
}

/// k/(k²−4p²).
pub fn b_rational(p: usize, k: usize) -> f64 {
    let (pf, kf) = (p as f64, k as f64);
    kf / (kf * kf - 4.0 * pf * pf)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CoeffRow {
    pub p: usize,
    pub k: usize,
    pub name: &'static str,
    pub value: f64,
    pub quadrature: f64,
}

/// Fixed-p tables of every family for k = 0..=k_max.
#[derive(Debug, Clone)]
pub struct CoeffTables {
    pub p: usize,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub a1: Vec<f64>,
    pub b1: Vec<f64>,
    pub big_a: Vec<f64>,
    pub big_b: Vec<f64>,
}

impl CoeffTables {
    pub fn new(p: usize, k_max: usize) -> Self {
        let col = |f: Family| (0..=k_max).map(|k| f.closed(p, k)).collect::<Vec<_>>();
        Self {
            p,
            c: col(Family::C),
            d: col(Family::D),
            a1: col(Family::A1),
            b1: col(Family::B1),
            big_a: col(Family::BigA),
            big_b: col(Family::BigB),
        }
    }

    pub fn get(&self, f: Family, k: usize) -> f64 {
        let v = match f {
            Family::C => &self.c,
            Family::D => &self.d,
            Family::A1 => &self.a1,
            Family::B1 => &self.b1,
            Family::BigA => &self.big_a,
            Family::BigB => &self.big_b,
        };
        v.get(k).copied().unwrap_or_else(|| f.closed(self.p, k))
    }

    pub fn k_max(&self) -> usize {
        self.c.len() - 1
    }
}

/// Every closed-form value beside its quadrature for 0 ≤ k ≤ k_max (k ≥ 1 for sine families).
pub fn coefficient_rows(p: usize, k_max: usize, tol: f64) -> Result<Vec<CoeffRow>> {
    let mut rows = Vec::new();
    for f in Family::ALL {
        let k0 = usize::from(matches!(f, Family::A1 | Family::BigA));
        for k in k0..=k_max {
            rows.push(CoeffRow { p, k, name: f.name(), value: f.closed(p, k), quadrature: f.quadrature(p, k, tol)? });
        }
    }
    Ok(rows)
}

pub fn write_coeff_csv<W: std::io::Write>(rows: &[CoeffRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "k", "name", "value", "quadrature"])?;
    for r in rows {
        w.write_record([r.p.to_string(), r.k.to_string(), r.name.to_string(), format!("{:e}", r.value), format!("{:e}", r.quadrature)])?;
    }
    w.flush()?;
    Ok(())
}

/// Sign of a coefficient predicted from its family's interval pattern.
pub fn predicted_sign(f: Family, p: usize, k: usize) -> i8 {
    if k == 0 {
        return match f {
            Family::C => 1,
            _ => 0,
        };
    }
    let j = k / p;
    let on_line = k % p == 0;
    match f {
        Family::C | Family::BigA | Family::A1 => {
            if on_line {
                return if j == 1 { 1 } else { 0 };
            }
            if j <= 1 || j % 2 == 1 {
                1
            } else {
                -1
            }
        }
        Family::D => {
            if on_line {
                return if j <= 2 { 1 } else { 0 };
            }
            if j <= 2 || j % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Family::BigB | Family::B1 => {
            if on_line {
                return if j == 2 { -1 } else { 0 };
            }
            if j == 0 {
                1
            } else if j <= 2 || j % 2 == 0 {
                -1
            } else {
                1
            }
        }
    }
}

pub fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}
