//! Sign distribution of the coefficient products on the (m, l) lattice.

use serde::Serialize;

use super::coeffs::{big_a, big_b, c_coef, d_coef, predicted_sign, sign_of, Family};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProductKind {
    /// c(m)d(l)c(m+l)
    Cdc,
    /// c(m)c(l)d(m+l)
    Ccd,
    /// A(k)A(k+l)B(l)
    Aab,
    /// −A(k)A(l)B(k+l)
    AabNeg,
}

impl ProductKind {
    pub const ALL: [ProductKind; 4] = [ProductKind::Cdc, ProductKind::Ccd, ProductKind::Aab, ProductKind::AabNeg];

    pub fn name(self) -> &'static str {
        match self {
            ProductKind::Cdc => "cdc",
            ProductKind::Ccd => "ccd",
            ProductKind::Aab => "AAB",
            ProductKind::AabNeg => "AAB2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }

    pub fn value(self, p: usize, m: usize, l: usize) -> f64 {
        match self {
            ProductKind::Cdc => c_coef(p, m) * d_coef(p, l) * c_coef(p, m + l),
            ProductKind::Ccd => c_coef(p, m) * c_coef(p, l) * d_coef(p, m + l),
            ProductKind::Aab => big_a(p, m) * big_a(p, m + l) * big_b(p, l),
            ProductKind::AabNeg => -big_a(p, m) * big_a(p, l) * big_b(p, m + l),
        }
    }

    /// Product of the per-factor interval signs.
    pub fn factor_sign(self, p: usize, m: usize, l: usize) -> i8 {
        let s = |f: Family, k: usize| predicted_sign(f, p, k);
        match self {
            ProductKind::Cdc => s(Family::C, m) * s(Family::D, l) * s(Family::C, m + l),
            ProductKind::Ccd => s(Family::C, m) * s(Family::C, l) * s(Family::D, m + l),
            ProductKind::Aab => s(Family::BigA, m) * s(Family::BigA, m + l) * s(Family::BigB, l),
            ProductKind::AabNeg => -s(Family::BigA, m) * s(Family::BigA, l) * s(Family::BigB, m + l),
        }
    }

    /// Region prediction for points strictly inside a p-square (None on grid lines).
    pub fn region_sign(self, p: usize, m: usize, l: usize) -> Option<i8> {
        if m % p == 0 || l % p == 0 {
            return None;
        }
        let (a, b) = (m / p, l / p);
        let n = m + l;
        let diag = p * (a + b + 1);
        let below_above = |below: i8| -> i8 {
            if n < diag {
                below
            } else if n > diag {
                -below
            } else {
                0
            }
        };
        let strip = |idx: usize, below: i8| -> i8 {
            let cut = p * (idx + 1);
            if n < cut {
                below
            } else if n > cut {
                -below
            } else {
                0
            }
        };
        let mut preds: Vec<i8> = Vec::new();
        match self {
            ProductKind::Cdc => {
                if m < 2 * p && l < 2 * p && n < 2 * p {
                    preds.push(1);
                }
                if (a >= 1 && (b == 0 || b >= 2)) || (a == 0 && b == 1) {
                    preds.push(below_above(1));
                }
                if (a == 0 && b >= 2) || (a >= 1 && b == 1) {
                    preds.push(below_above(-1));
                }
            }
            ProductKind::Ccd => {
                if a >= 1 && b >= 1 {
                    preds.push(below_above(1));
                }
                if a >= 2 && b == 0 {
                    preds.push(strip(a, -1));
                }
                if a == 0 && b >= 2 {
                    preds.push(strip(b, -1));
                }
                if m < 2 * p && l < 2 * p && n < 3 * p {
                    preds.push(1);
                }
            }
            ProductKind::Aab => {
                if a >= 1 && b >= 2 {
                    preds.push(below_above(-1));
                }
                if a >= 1 && b <= 1 {
                    preds.push(below_above(1));
                }
                if a == 0 && b >= 2 {
                    preds.push(strip(b, 1));
                }
                if a == 0 && b == 1 {
                    preds.push(strip(1, -1));
                }
                if a == 0 && b == 0 {
                    preds.push(1);
                }
            }
            ProductKind::AabNeg => {
                if a >= 1 && b >= 1 {
                    preds.push(below_above(1));
                }
                if a >= 2 && b == 0 {
                    preds.push(strip(a, -1));
                }
                if a == 0 && b >= 2 {
                    preds.push(strip(b, -1));
                }
                if (a == 1 && b == 0) || (a == 0 && b == 1) {
                    preds.push(1);
                }
                if a == 0 && b == 0 {
                    preds.push(strip(0, -1));
                }
            }
        }
        let first = *preds.first()?;
        if preds.iter().all(|&s| s == first) {
            Some(first)
        } else {
            // Overlapping regions that disagree: report as a mismatch downstream.
            Some(i8::MIN)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SignCell {
    pub m: usize,
    pub l: usize,
    pub value: f64,
    pub sign: i8,
    pub factor_sign: i8,
    pub region_sign: Option<i8>,
}

impl SignCell {
    pub fn mismatch(&self) -> bool {
        self.sign != self.factor_sign || self.region_sign.is_some_and(|r| r != self.sign)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SignMap {
    pub kind: ProductKind,
    pub p: usize,
    pub extent: usize,
    pub cells: Vec<SignCell>,
}

impl SignMap {
    pub fn mismatches(&self) -> Vec<&SignCell> {
        self.cells.iter().filter(|c| c.mismatch()).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["kind", "p", "m", "l", "m_over_p", "l_over_p", "value", "sign", "factor_sign", "region_sign"])?;
        let pf = self.p as f64;
        for c in &self.cells {
            w.write_record([
                self.kind.name().to_string(),
                self.p.to_string(),
                c.m.to_string(),
                c.l.to_string(),
                format!("{}", c.m as f64 / pf),
                format!("{}", c.l as f64 / pf),
                format!("{:e}", c.value),
                c.sign.to_string(),
                c.factor_sign.to_string(),
                c.region_sign.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Signs of one product over (0, extent]², with both predictions attached.
pub fn sign_map(kind: ProductKind, p: usize, extent: usize) -> Result<SignMap> {
    if p < 2 || extent == 0 || extent % p != 0 {
        return Err(Error::InvalidParameter(format!("extent {extent} must be a positive multiple of p = {p}")));
    }
    let mut cells = Vec::with_capacity(extent * extent);
    for m in 1..=extent {
        for l in 1..=extent {
            let value = kind.value(p, m, l);
            cells.push(SignCell {
                m,
                l,
                value,
                sign: sign_of(value),
                factor_sign: kind.factor_sign(p, m, l),
                region_sign: kind.region_sign(p, m, l),
            });
        }
    }
    Ok(SignMap { kind, p, extent, cells })
}
