//! Dense sampling of the continuous majorants behind the lattice ratio bounds.

use std::f64::consts::PI;

use serde::Serialize;

use super::ratios::{BoundReport, Direction, RatioEval, Tracker};

pub const DEFAULT_STEP: f64 = 1e-3;

fn open(lo: f64, hi: f64, h: f64) -> impl Iterator<Item = f64> + Clone {
    let n = ((hi - lo) / h).round() as usize;
    (1..n).map(move |i| lo + i as f64 * h)
}

fn value(v: f64) -> RatioEval {
    RatioEval { value: v, rate_ok: true, sign_ok: true }
}

struct Sweep {
    h: f64,
}

impl Sweep {
    fn line(&self, dir: Direction, f: impl Fn(f64) -> f64) -> Tracker {
        let mut tr = Tracker::new(dir);
        for x in open(0.0, 1.0, self.h) {
            tr.push(value(f(x)), || format!("x={x:.3}"));
        }
        tr
    }

    /// 0 < x < z < 1.
    fn wedge(&self, dir: Direction, f: impl Fn(f64, f64) -> f64) -> Tracker {
        let mut tr = Tracker::new(dir);
        for x in open(0.0, 1.0, self.h) {
            for z in open(x, 1.0, self.h) {
                tr.push(value(f(x, z)), || format!("x={x:.3} z={z:.3}"));
            }
        }
        tr
    }

    /// Points of the open triangle x, y > 0, x + y < 1 shifted by (x0, y0).
    fn triangle(&self, x0: f64, y0: f64, upper: bool, f: impl Fn(f64, f64) -> f64, tr: &mut Tracker) {
        for u in open(0.0, 1.0, self.h) {
            for v in open(0.0, 1.0 - u, self.h) {
                // `upper` mirrors the triangle onto the far corner of the unit square.
                let (x, y) = if upper { (x0 + 1.0 - u, y0 + 1.0 - v) } else { (x0 + u, y0 + v) };
                tr.push(value(f(x, y)), || format!("x={x:.3} y={y:.3}"));
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeSuite {
    /// Majorants whose constants the lattice bounds rely on.
    pub checks: Vec<BoundReport>,
    /// Intermediate one-factor bounds that are reported but not relied upon.
    pub notes: Vec<BoundReport>,
}

impl EnvelopeSuite {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|r| r.passed())
    }
}

/// The sign-pattern function of the symmetric pair sums, in units of p.
pub fn pair_kernel(x: f64, y: f64) -> f64 {
    let s = x + y;
    6.0 * x * y * s * (12.0 + x * y - s * s) * (PI * x).sin() * (PI * y).sin() * (PI * s).sin()
        / ((1.0 - x * x) * (1.0 - y * y) * (1.0 - s * s) * (4.0 - x * x) * (4.0 - y * y) * (4.0 - s * s))
}

pub fn envelope_suite(h: f64, a_max: usize) -> EnvelopeSuite {
    use Direction::*;
    let sw = Sweep { h };
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let fin = |tr: Tracker, id: String, desc: &str, c: f64| tr.finish(&id, desc, format!("step={h}"), None, c, 0.0);
    let af = |a: usize| a as f64;

    checks.push(fin(
        sw.line(Below, |x| x / (1.0 + x) * (2.0 - x).powi(2) * (3.0 - x) / ((3.0 + x).powi(2) * (4.0 + x))),
        "env_j10_a2".into(),
        "first strip term of the diagonal series",
        1.0 / 6.0,
    ));
    for a in 3..=a_max {
        let a_ = af(a);
        let tr = sw.line(Below, |x| {
            x * x * (1.0 + x) / ((a_ - 1.0 + x).powi(2) * (a_ - 2.0 + x)) * (2.0 - x).powi(2) * (3.0 - x)
                / ((a_ + 1.0 + x).powi(2) * (a_ + 2.0 + x))
        });
        checks.push(fin(tr, format!("env_j10_a{a}"), "diagonal strip term", 24.0 / ((a_ - 1.0) * a_ * a_ * (a_ + 1.0).powi(2) * (a_ + 2.0))));
    }

    let j12_f1 = |a: f64, x: f64| (1.0 + x) / (a + x) * x / (a - 1.0 + x) * (2.0 + x) / (a + 1.0 + x);
    let j12_f2 = |a: f64, z: f64| {
        z / (a - 2.0 + z) * (a + z) / (a + 1.0 + z) * (2.0 + z) / (a - 1.0 + z) * (3.0 + z) / (a + 2.0 + z) * (1.0 - z) / (1.0 + z)
    };
    for (a, c) in [(2usize, 0.25), (3, 2.0 / 75.0), (4, 1.0 / 120.0)] {
        let a_ = af(a);
        checks.push(fin(sw.wedge(Below, |x, z| j12_f1(a_, x) * j12_f2(a_, z)), format!("env_j12_strip_a{a}"), "F12 strip majorant", c));
    }
    for a in 5..=a_max {
        let a_ = af(a);
        let c = 72.0 / ((a_ - 1.0) * a_ * a_ * (a_ + 2.0).powi(2) * (a_ + 3.0));
        checks.push(fin(sw.wedge(Below, |x, z| j12_f1(a_, x) * j12_f2(a_, z)), format!("env_j12_strip_a{a}"), "F12 strip majorant", c));
    }

    checks.push(fin(sw.line(Below, |y| (1.0 + y).powi(2) / (3.0 + y)), "env_f2_below_1".into(), "(1+y)²/(3+y)", 1.0));

    let x1_f1 = |a: f64, x: f64| x / (a - 1.0 + x) * (1.0 + x) / (a + x) * (1.0 - x) / (a + 1.0 + x);
    let x1_f3 = |a: f64, z: f64| z / (1.0 + z) * (2.0 + z) / (a + 1.0 + z) * (3.0 + z) / (a + 2.0 + z) / (a + z);
    checks.push(fin(sw.wedge(Below, |x, z| x1_f1(1.0, x) * x1_f3(1.0, z)), "env_j12_j11_row_a1".into(), "F11/F12 row majorant", 0.125));
    for a in 2..=a_max {
        let a_ = af(a);
        let c = 12.0 / (a_ * a_ * (a_ + 1.0).powi(2) * (a_ + 2.0) * (a_ + 3.0));
        checks.push(fin(sw.wedge(Below, |x, z| x1_f1(a_, x) * x1_f3(a_, z)), format!("env_j12_j11_row_a{a}"), "F11/F12 row majorant", c));
    }

    let f4 = |a: f64, y: f64| (a + y) / (a + 1.0 + y) * (1.0 + y) / (a - 1.0 + y) * y / (a - 2.0 + y) * (2.0 + y) / (a + 2.0 + y);
    let f5 = |a: f64, z: f64| z / (1.0 + z) * (2.0 + z) / (a + 1.0 + z) * (3.0 + z) / (a + 2.0 + z) * (1.0 - z) / (a + z);
    checks.push(fin(sw.line(AtMost, |z| z * (1.0 - z) * (2.0 + z) * (3.0 + z)), "env_f5_numerator".into(), "z(1−z)(2+z)(3+z)", 2.25));
    for a in 2..=a_max {
        let a_ = af(a);
        let c = 27.0 / (2.0 * a_ * a_ * (a_ - 1.0) * (a_ + 2.0).powi(2) * (a_ + 3.0));
        checks.push(fin(sw.wedge(Below, |y, z| f4(a_, y) * f5(a_, z)), format!("env_j12_j11_column_a{a}"), "F11/F12 column majorant", c));
    }

    checks.push(fin(
        sw.wedge(Above, |x, z| (1.0 + x) * (3.0 - x) / (2.0 * (1.0 - x).powi(2)) * (3.0 - z).powi(2) / ((1.0 - z) * (5.0 - z))),
        "env_j12_over_j11".into(),
        "g₁(x)g₂(z)",
        2.7,
    ));
    checks.push(fin(
        sw.wedge(Below, |y, z| 2.0 * (2.0 - y).powi(2) / ((3.0 - y) * (4.0 - y)) * z * (1.0 - z) / (2.0 - z).powi(2)),
        "env_j11_corner".into(),
        "g₃(y)g₄(z)",
        1.0 / 6.0,
    ));

    let h1 = |a: f64, x: f64| x / (a - 1.0 - x) * (1.0 - x) / (a - x) * (2.0 - x) / (a + 1.0 - x);
    let h2 = |a: f64, z: f64| (1.0 - z) / (a - z) * (2.0 - z) / (a + 1.0 - z) * (3.0 - z) / (a + 2.0 - z);
    for a in 2..=a_max {
        let a_ = af(a);
        let c = 12.0 / (a_.powi(3) * (a_ + 1.0).powi(2) * (a_ + 2.0));
        checks.push(fin(sw.wedge(Below, |x, z| h1(a_, x) * h2(a_, z)), format!("env_j11_strip_a{a}"), "h₁(x)h₂(z)", c));
        notes.push(fin(sw.line(Below, |x| h1(a_, x)), format!("note_h1_a{a}"), "h₁ alone", 2.0 / (a_ * a_ * (a_ + 1.0))));
        notes.push(fin(sw.line(Below, |z| h2(a_, z)), format!("note_h2_a{a}"), "h₂ alone", 6.0 / (a_ * (a_ + 1.0) * (a_ + 2.0))));
    }

    checks.push(fin(sw.line(AtMost, |x| x * (2.0 - x) * (1.0 - x * x)), "env_l_quartic".into(), "x(2−x)(1−x²)", 9.0 / 16.0));
    for a in 3..=a_max {
        let a_ = af(a);
        let c = 27.0 * a_ / (16.0 * (a_ * a_ - 4.0) * (a_ * a_ - 1.0));
        let tr = sw.wedge(Below, |x, z| {
            let y = z - x;
            x * (2.0 - x) / ((a_ - 1.0 + x) * (a_ + 1.0 + x)) * (3.0 - y) / (1.0 + y).powi(2) * (1.0 - z * z) * (a_ + z)
                / ((a_ + 2.0 + z) * (a_ - 2.0 + z))
        });
        checks.push(fin(tr, format!("env_l_strip_a{a}"), "F2 strip majorant", c));
    }

    for b in 3..=8usize {
        let b_ = af(b);
        for a in 2..=a_max.min(12) {
            let a_ = af(a);
            let c = b_ * (b_ + 2.0) / ((a_ - 1.0) * (a_ + 1.0) * (a_ + b_) * (a_ + b_ + 2.0));
            let tr = sw.wedge(Below, |x, z| {
                (x + 1.0) * (1.0 - x) / ((a_ - 1.0 + x) * (a_ + 1.0 + x)) * (b_ - 1.0 + z) / (a_ + b_ - 1.0 + z) * (b_ + 1.0 + z)
                    / (a_ + b_ + 1.0 + z)
            });
            checks.push(fin(tr, format!("env_i_strip_b{b}_a{a}"), "F1 strip majorant", c));
        }
    }

    for (a, c) in [(1usize, 1.0 / 3.0), (2, 1.0 / 15.0)] {
        let a_ = af(a);
        let mut tr = Tracker::new(Below);
        sw.triangle(
            0.0,
            0.0,
            false,
            |x, y| {
                let w = x + y;
                x * (2.0 - x) / ((a_ - x) * (a_ + 2.0 - x)) * (1.0 - w) / (a_ + 1.0 - w) * (3.0 - w) / (a_ + 3.0 - w)
            },
            &mut tr,
        );
        checks.push(fin(tr, format!("env_i_corner_a{a}"), "F1 corner majorant", c));
    }

    for a in 4..=a_max {
        let a_ = af(a);
        let c = 32.0 * a_ / ((a_ - 2.0) * (a_ + 1.0) * (a_ + 3.0).powi(2));
        let tr = sw.wedge(Below, |x, z| {
            (a_ + x) / (1.0 + x) * (1.0 - x) / (a_ - 2.0 + x) * (3.0 + x) / (a_ + 2.0 + x) * (1.0 + z) / (a_ + z) * (3.0 + z) / (a_ + 2.0 + z)
        });
        checks.push(fin(tr, format!("env_i_column_a{a}"), "F1 column majorant", c));
    }
    let chain = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 11.0, 1.0 / 17.0, 1.0 / 24.0];
    for (i, c) in chain.into_iter().enumerate() {
        let a = 4 + i;
        let a_ = af(a);
        let v = 32.0 * a_ / ((a_ - 2.0) * (a_ + 1.0) * (a_ + 3.0).powi(2));
        let mut tr = Tracker::new(AtMost);
        tr.push(value(v), || format!("a={a}"));
        checks.push(fin(tr, format!("chain_i_column_a{a}"), "column chain term", c));
    }
    let mut chain_total = Tracker::new(Below);
    chain_total.push(value(chain.iter().sum::<f64>() + 16.0 / 64.0), || "a in [4,8] + tail".into());
    checks.push(fin(chain_total, "chain_i_column_total".into(), "column chain with integral tail", 1.0));

    for a in 3..=a_max {
        let a_ = af(a);
        let c = 8.0 / (a_ * (a_ - 2.0) * (a_ + 1.0) * (a_ + 3.0));
        let tr = sw.wedge(Below, |x, z| {
            x * (2.0 - x) / ((a_ - 1.0 - x) * (a_ + 1.0 - x)) * (2.0 - z) / (a_ + 1.0 - z) * (4.0 - z) / (a_ + 3.0 - z)
        });
        checks.push(fin(tr, format!("env_i_row_a{a}"), "F1 row majorant", c));
    }
    let mut partner = Tracker::new(Below);
    sw.triangle(
        0.0,
        0.0,
        false,
        |x, y| {
            let z = x + y;
            (2.0 - x) / (2.0 + x) * (4.0 - y) / (2.0 - y) * y / (1.0 + y) * (3.0 + y) / (5.0 + y) * (2.0 - z) * (4.0 - z) / ((3.0 + z) * (5.0 + z))
        },
        &mut partner,
    );
    checks.push(fin(partner, "env_i_row_partner".into(), "F1 row partner majorant", 8.0 / 15.0));

    for a in 1..=a_max {
        let a_ = af(a);
        let c = 6.0 / (a_ * (a_ + 1.0) * (a_ + 2.0) * (a_ + 4.0));
        let tr = sw.wedge(Below, |x, z| x / (a_ - 1.0 + x) * (2.0 - x) / (a_ + 1.0 + x) * z / (a_ + 1.0 + z) * (2.0 + z) / (a_ + 3.0 + z));
        checks.push(fin(tr, format!("env_il_row_a{a}"), "F1/F2 row majorant", c));
    }
    let il_f2 = |z: f64| (1.0 - z) / (3.0 - z).powi(2);
    checks.push(fin(sw.wedge(Below, |x, z| (3.0 - x).powi(2) / (5.0 - x) * il_f2(z)), "env_il_upper".into(), "F1/F2 upper majorant", 0.2));
    checks.push(fin(sw.wedge(Below, |x, z| (2.0 - x).powi(2) / (4.0 - x) * il_f2(z)), "env_il_corner".into(), "F1/F2 corner majorant", 1.0 / 9.0));

    let mut kpos = Tracker::new(Above);
    sw.triangle(0.0, 0.0, false, pair_kernel, &mut kpos);
    for shift in 1..=2 {
        let s = shift as f64;
        sw.triangle(s, 0.0, false, pair_kernel, &mut kpos);
        sw.triangle(0.0, s, false, pair_kernel, &mut kpos);
    }
    for a in 3..=a_max.min(12) {
        let a_ = af(a);
        sw.triangle(0.0, a_, true, pair_kernel, &mut kpos);
        sw.triangle(a_, 0.0, true, pair_kernel, &mut kpos);
    }
    checks.push(fin(kpos, "env_pair_kernel_positive".into(), "K(x,y) on its positivity sets", 0.0));

    let quad = |x: f64, y: f64| 12.0 + x * y - (x + y).powi(2);
    let mut fmax = Tracker::new(AtMost);
    let n = (1.0 / h).round() as usize;
    for i in 0..=(17 * n) {
        let x = 3.0 + i as f64 * h;
        for j in 0..=n {
            let y = j as f64 * h;
            if x + y >= 4.0 - 1e-12 {
                fmax.push(value(quad(x, y)), || format!("x={x:.3} y={y:.3}"));
                fmax.push(value(quad(y, x)), || format!("x={y:.3} y={x:.3}"));
            }
        }
    }
    let attained = fmax.clone().finish("", "", String::new(), None, -1.0, 0.0);
    let mut rep = fin(fmax, "env_quadratic_max".into(), "max of 12+xy−(x+y)² on the far strips", -1.0);
    if (attained.worst + 1.0).abs() > 1e-12 {
        rep.verdict = super::ratios::Verdict::Fail;
    }
    checks.push(rep);
    let mut literal = Tracker::new(AtMost);
    literal.push(value(12.0 - 3.0 - 16.0), || "x=3 y=1".into());
    notes.push(fin(literal, "note_quadratic_literal".into(), "12−xy−(x+y)² at (3,1)", -1.0));

    EnvelopeSuite { checks, notes }
}
