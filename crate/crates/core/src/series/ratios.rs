//! Ratio inequalities between positive and negative lattice terms of the
//! J-series, checked at t = 0 with decay-rate ordering for t > 0.

use serde::Serialize;

use super::coeffs::{big_a, big_b, c_coef, d_coef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    /// The finite part is inside the bound but the tail majorant is too coarse to decide.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// The checked quantity must stay strictly below the constant.
    Below,
    /// The checked quantity must stay strictly above the constant.
    Above,
    /// The checked quantity may reach the constant but not exceed it.
    AtMost,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub id: String,
    pub description: String,
    pub ranges: String,
    pub p: Option<usize>,
    pub direction: Direction,
    pub constant: f64,
    /// Largest (Below) or smallest (Above) observed value over all instances.
    pub worst: f64,
    pub worst_at: String,
    pub tail: f64,
    /// Distance from worst ± tail to the constant; positive iff inside.
    pub margin: f64,
    pub instances: usize,
    /// Every dominated term decays at least as fast as its dominating term.
    pub rate_ok: bool,
    /// Every dominating term has the expected sign.
    pub sign_ok: bool,
    pub verdict: Verdict,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn table_row(&self) -> String {
        format!(
            "{:<26} {:>3} {:>2} {:>12.6e} worst {:>12.6e} tail {:>9.2e} margin {:>10.3e} n={:<6} {:?}",
            self.id,
            self.p.map(|p| p.to_string()).unwrap_or_else(|| "-".into()),
            match self.direction {
                Direction::Below => "<",
                Direction::Above => ">",
                Direction::AtMost => "<=",
            },
            self.constant,
            self.worst,
            self.tail,
            self.margin,
            self.instances,
            self.verdict
        )
    }
}

/// Running extremum over the instances of one check.
#[derive(Debug, Clone)]
pub struct Tracker {
    direction: Direction,
    worst: f64,
    worst_at: String,
    instances: usize,
    rate_ok: bool,
    sign_ok: bool,
}

impl Tracker {
    pub fn new(direction: Direction) -> Self {
        let worst = match direction {
            Direction::Below | Direction::AtMost => f64::NEG_INFINITY,
            Direction::Above => f64::INFINITY,
        };
        Self { direction, worst, worst_at: String::new(), instances: 0, rate_ok: true, sign_ok: true }
    }

    pub fn push(&mut self, eval: RatioEval, at: impl FnOnce() -> String) {
        self.instances += 1;
        self.rate_ok &= eval.rate_ok;
        self.sign_ok &= eval.sign_ok;
        let worse = match self.direction {
            Direction::Below | Direction::AtMost => eval.value > self.worst,
            Direction::Above => eval.value < self.worst,
        };
        if worse || eval.value.is_nan() {
            self.worst = eval.value;
            self.worst_at = at();
        }
    }

    pub fn finish(self, id: &str, description: &str, ranges: String, p: Option<usize>, constant: f64, tail: f64) -> BoundReport {
        let (margin, base_margin) = if self.instances == 0 {
            // Empty finite part: sums reduce to their tail, ratio sweeps are vacuous.
            match self.direction {
                Direction::Below | Direction::AtMost if tail > 0.0 => (constant - tail, constant),
                _ => (f64::INFINITY, f64::INFINITY),
            }
        } else {
            match self.direction {
                Direction::Below => (constant - (self.worst + tail), constant - self.worst),
                Direction::Above => ((self.worst - tail) - constant, self.worst - constant),
                Direction::AtMost => {
                    let slack = 1e-12 * constant.abs().max(1.0);
                    (constant - (self.worst + tail) + slack, constant - self.worst + slack)
                }
            }
        };
        let verdict = if !(self.rate_ok && self.sign_ok) || !(base_margin > 0.0) {
            Verdict::Fail
        } else if margin > 0.0 {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        };
        BoundReport {
            id: id.to_string(),
            description: description.to_string(),
            ranges,
            p,
            direction: self.direction,
            constant,
            worst: if self.instances == 0 { f64::NAN } else { self.worst },
            worst_at: self.worst_at,
            tail,
            margin,
            instances: self.instances,
            rate_ok: self.rate_ok,
            sign_ok: self.sign_ok,
            verdict,
        }
    }
}

/// A lattice term at t = 0 with its exponential decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub value: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    /// c(m)d(l)c(m+l)
    F11,
    /// c(m)c(l)d(m+l)
    F12,
    /// A(k)A(k+l)B(l)
    F1,
    /// −A(k)A(l)B(k+l)
    F2,
}

pub fn term(p: usize, s: Series, m: usize, l: usize) -> Term {
    let value = match s {
        Series::F11 => c_coef(p, m) * d_coef(p, l) * c_coef(p, m + l),
        Series::F12 => c_coef(p, m) * c_coef(p, l) * d_coef(p, m + l),
        Series::F1 => big_a(p, m) * big_a(p, m + l) * big_b(p, l),
        Series::F2 => -big_a(p, m) * big_a(p, l) * big_b(p, m + l),
    };
    let (x, y) = (m as f64, l as f64);
    Term { value, rate: 2.0 * (x * x + y * y + x * y) }
}

/// c(k)d(k) with decay e^{−2k²t}.
pub fn diagonal_term(p: usize, k: usize) -> Term {
    Term { value: c_coef(p, k) * d_coef(p, k), rate: 2.0 * (k * k) as f64 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEval {
    pub value: f64,
    pub rate_ok: bool,
    pub sign_ok: bool,
}

/// Σ|small|/big, requiring big > 0 and every small term to decay at least as fast.
pub fn ratio_sum(big: Term, small: impl IntoIterator<Item = Term>) -> RatioEval {
    let mut sum = 0.0;
    let mut rate_ok = true;
    for s in small {
        sum += s.value.abs();
        rate_ok &= s.rate >= big.rate;
    }
    RatioEval { value: sum / big.value, rate_ok, sign_ok: big.value > 0.0 }
}

/// big/|small| with big > 0 > small.
pub fn dominance(big: Term, small: Term) -> RatioEval {
    RatioEval {
        value: big.value / small.value.abs(),
        rate_ok: small.rate >= big.rate,
        sign_ok: big.value > 0.0 && small.value < 0.0,
    }
}

/// Open lattice triangle {m, l ≥ 1, m + l < p}.
pub fn triangle(p: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..p).flat_map(move |m| (1..p.saturating_sub(m)).map(move |l| (m, l)))
}

/// Triangle with vertices in (ℤp)²: membership of a lattice point in its open interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleSet {
    pub vertices: [(i64, i64); 3],
}

impl TriangleSet {
    /// Vertices given in units of p.
    pub fn scaled(p: usize, v: [(i64, i64); 3]) -> Self {
        let p = p as i64;
        Self { vertices: v.map(|(x, y)| (x * p, y * p)) }
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        let [a, b, c] = self.vertices;
        let cross = |(x1, y1): (i64, i64), (x2, y2): (i64, i64)| (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1);
        let (d1, d2, d3) = (cross(a, b), cross(b, c), cross(c, a));
        (d1 > 0 && d2 > 0 && d3 > 0) || (d1 < 0 && d2 < 0 && d3 < 0)
    }

    pub fn points(&self) -> Vec<(i64, i64)> {
        let xs = self.vertices.map(|v| v.0);
        let ys = self.vertices.map(|v| v.1);
        let (x0, x1) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
        let (y0, y1) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
        let mut out = Vec::new();
        for x in x0..=x1 {
            for y in y0..=y1 {
                if self.contains(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

/// Sweep limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteConfig {
    /// Last index of the explicit partial sums over a.
    pub a_cap: usize,
    /// Largest a, b swept by the dominance checks.
    pub dominance_cap: usize,
    /// Largest strip index b swept by the column-sum check.
    pub b_cap: usize,
}

impl SuiteConfig {
    pub fn new(a_cap: usize) -> Self {
        Self { a_cap, dominance_cap: a_cap.min(48), b_cap: 16 }
    }
}

fn range_label(p: usize, cfg: &SuiteConfig, what: &str) -> String {
    format!("p={p}; {what}; a<={}", cfg.a_cap)
}

fn pow(x: usize, e: i32) -> f64 {
    (x as f64).powi(e)
}

/// F(pa+m, p(b+1)−m−s) against F(pa+m+s, p(b+1)−m) for the positive/negative triangle pairing.
fn dominance_check(p: usize, cfg: &SuiteConfig, s: Series, b_min: usize) -> Tracker {
    let mut tr = Tracker::new(Direction::Above);
    for shift in 1..p.saturating_sub(1) {
        for m in 1..(p - shift) {
            for a in 1..=cfg.dominance_cap {
                for b in b_min..=cfg.dominance_cap {
                    let big = term(p, s, p * a + m, p * (b + 1) - m - shift);
                    let small = term(p, s, p * a + m + shift, p * (b + 1) - m);
                    tr.push(dominance(big, small), || format!("s={shift} m={m} a={a} b={b}"));
                }
            }
        }
    }
    tr
}

/// All lattice ratio checks for one p.
pub fn lemma_reports(p: usize, cfg: &SuiteConfig) -> Vec<BoundReport> {
    use Series::*;
    let cap = cfg.a_cap;
    let mut out = Vec::new();
    let tri = || triangle(p);

    let mut tot = Tracker::new(Direction::Below);
    let mut first = Tracker::new(Direction::Below);
    for m in 1..p {
        let big = diagonal_term(p, p - m);
        tot.push(ratio_sum(big, (2..=cap).map(|a| diagonal_term(p, a * p + m))), || format!("m={m}"));
        first.push(ratio_sum(big, [diagonal_term(p, 2 * p + m)]), || format!("m={m}"));
    }
    out.push(tot.finish(
        "j10_strip_sum",
        "Σ_{a≥2}|c(ap+m)d(ap+m)| / c(p−m)d(p−m)",
        range_label(p, cfg, "m in [1,p-1]"),
        Some(p),
        1.0,
        24.0 / (5.0 * pow(cap, 5)),
    ));
    out.push(first.finish("j10_first_term", "|c(2p+m)d(2p+m)| / c(p−m)d(p−m)", format!("p={p}; m in [1,p-1]"), Some(p), 1.0 / 6.0, 0.0));

    let dom = dominance_check(p, cfg, F12, 1);
    out.push(dom.finish(
        "j12_dominance",
        "F12 positive-triangle term over its paired negative term",
        format!("p={p}; s in [1,p-2]; a,b in [1,{}]", cfg.dominance_cap),
        Some(p),
        1.0,
        0.0,
    ));

    let mut strip = Tracker::new(Direction::Below);
    let mut per_a: Vec<Tracker> = (0..3).map(|_| Tracker::new(Direction::Below)).collect();
    for (m, l) in tri() {
        let big = term(p, F12, p + m, l);
        strip.push(ratio_sum(big, (2..=cap).map(|a| term(p, F12, p * a + m, l))), || format!("m={m} l={l}"));
        for (i, a) in (2..=4).enumerate() {
            per_a[i].push(ratio_sum(big, [term(p, F12, p * a + m, l)]), || format!("m={m} l={l}"));
        }
    }
    out.push(strip.finish(
        "j12_strip_sum",
        "Σ_{a≥2}|F12(pa+m,l)| / F12(p+m,l)",
        range_label(p, cfg, "m+l<p"),
        Some(p),
        0.3,
        72.0 / (5.0 * pow(cap, 5)),
    ));
    for ((tr, c), a) in per_a.into_iter().zip([1.0 / 4.0, 2.0 / 75.0, 1.0 / 120.0]).zip(2..) {
        out.push(tr.finish(
            &format!("j12_strip_a{a}"),
            "single strip term |F12(pa+m,l)| / F12(p+m,l)",
            format!("p={p}; m+l<p"),
            Some(p),
            c,
            0.0,
        ));
    }

    let mut x1 = Tracker::new(Direction::Below);
    let mut x2 = Tracker::new(Direction::Below);
    let mut neg = Tracker::new(Direction::Above);
    let mut turq = Tracker::new(Direction::Below);
    let mut j11 = Tracker::new(Direction::Below);
    for (m, l) in tri() {
        let big = term(p, F12, m, p + l);
        x1.push(ratio_sum(big, (1..=cap).map(|a| term(p, F11, a * p + m, p + l))), || format!("m={m} l={l}"));
        x2.push(ratio_sum(big, (2..=cap).map(|a| term(p, F11, m, a * p + l))), || format!("m={m} l={l}"));
        let pos = term(p, F12, 2 * p - m, p - l);
        let bad = term(p, F11, 2 * p - m, p - l);
        neg.push(dominance(Term { value: pos.value / 2.0, ..pos }, bad), || format!("m={m} l={l}"));
        let base = term(p, F12, p - m, p - l);
        let t11 = term(p, F11, p - m, 2 * p - l);
        turq.push(ratio_sum(base, [Term { value: 2.0 * t11.value, ..t11 }]), || format!("m={m} l={l}"));
        let own = term(p, F11, p - m, p - l);
        j11.push(ratio_sum(own, (2..=cap).map(|a| term(p, F11, p * a - m, p - l))), || format!("m={m} l={l}"));
    }
    out.push(x1.finish(
        "j12_j11_row_sum",
        "Σ_{a≥1}|F11(ap+m,p+l)| / F12(m,p+l)",
        range_label(p, cfg, "m+l<p"),
        Some(p),
        0.2,
        12.0 / (5.0 * pow(cap, 5)),
    ));
    out.push(x2.finish(
        "j12_j11_column_sum",
        "Σ_{a≥2}|F11(m,ap+l)| / F12(m,p+l)",
        range_label(p, cfg, "m+l<p"),
        Some(p),
        3.0 / 50.0,
        27.0 / (10.0 * pow(cap, 5)),
    ));
    out.push(neg.finish(
        "j12_over_j11_same_point",
        "F12(2p−m,p−l) / (2|F11(2p−m,p−l)|)",
        format!("p={p}; m+l<p"),
        Some(p),
        2.7,
        0.0,
    ));
    out.push(turq.finish(
        "j11_corner_ratio",
        "2|F11(p−m,2p−l)| / F12(p−m,p−l)",
        format!("p={p}; m+l<p"),
        Some(p),
        1.0 / 6.0,
        0.0,
    ));

    let dom11 = dominance_check(p, cfg, F11, 2);
    out.push(dom11.finish(
        "j11_dominance",
        "F11 positive-triangle term over its paired negative term",
        format!("p={p}; s in [1,p-2]; a in [1,{0}], b in [2,{0}]", cfg.dominance_cap),
        Some(p),
        1.0,
        0.0,
    ));
    out.push(j11.finish(
        "j11_strip_sum",
        "Σ_{a≥2}|F11(pa−m,p−l)| / F11(p−m,p−l)",
        range_label(p, cfg, "m+l<p"),
        Some(p),
        7.0 / 60.0,
        12.0 / (5.0 * pow(cap, 5)),
    ));

    let dom2 = dominance_check(p, cfg, F2, 1);
    out.push(dom2.finish(
        "l_dominance",
        "F2 positive-triangle term over its paired negative term",
        format!("p={p}; s in [1,p-2]; a,b in [1,{}]", cfg.dominance_cap),
        Some(p),
        1.0,
        0.0,
    ));

    let mut l2 = Tracker::new(Direction::Below);
    for (m, l) in tri() {
        let big = term(p, F2, p - m, l + m);
        let eval = ratio_sum(big, (3..=cap).map(|a| term(p, F2, p * a + m, l)));
        l2.push(RatioEval { value: 2.0 * eval.value, ..eval }, || format!("m={m} l={l}"));
    }
    let cap2 = pow(cap, 2);
    out.push(l2.finish(
        "l_strip_sum",
        "2Σ_{a≥3}|F2(pa+m,l)| / F2(p−m,l+m)",
        range_label(p, cfg, "m+l<p"),
        Some(p),
        189.0 / 320.0,
        27.0 / 16.0 / (cap2 - 4.0),
    ));

    let mut ib = Tracker::new(Direction::Below);
    for b in 3..=cfg.b_cap {
        for (k, l) in tri() {
            let big = term(p, F1, k, p * b + l);
            ib.push(ratio_sum(big, (2..=cap).map(|a| term(p, F1, p * a + k, p * b + l))), || format!("b={b} k={k} l={l}"));
        }
    }
    out.push(ib.finish(
        "i_strip_sum",
        "Σ_{a≥2}|F1(pa+k,pb+l)| / F1(k,pb+l)",
        format!("p={p}; k+l<p; b in [3,{}]; a<={cap}", cfg.b_cap),
        Some(p),
        0.75,
        0.5 * (1.0 / cap as f64 + 1.0 / (cap as f64 + 1.0)),
    ));

    let mut c1 = Tracker::new(Direction::Below);
    let mut c2 = Tracker::new(Direction::Below);
    let mut col = Tracker::new(Direction::Below);
    let mut yel = Tracker::new(Direction::Below);
    let mut yel1 = Tracker::new(Direction::Below);
    let mut il1 = Tracker::new(Direction::Below);
    let mut il2 = Tracker::new(Direction::Below);
    let mut il3 = Tracker::new(Direction::Below);
    for (k, l) in tri() {
        let at = || format!("k={k} l={l}");
        let base = term(p, F1, p - k, p - l);
        c1.push(ratio_sum(base, [term(p, F1, 2 * p - k, p - l)]), at);
        c2.push(ratio_sum(base, [term(p, F1, 3 * p - k, p - l)]), at);
        let cb = term(p, F1, p + k, p + l);
        col.push(ratio_sum(cb, (4..=cap).map(|a| term(p, F1, p + k, p * a + l))), at);
        let yb = term(p, F1, p - k, 2 * p - l);
        yel.push(ratio_sum(yb, (3..=cap).map(|a| term(p, F1, a * p - k, 2 * p - l))), at);
        yel1.push(ratio_sum(yb, [term(p, F1, p + k, 3 * p + l)]), at);
        let lb = term(p, F2, p - k, p + k + l);
        il1.push(ratio_sum(lb, (1..=cap).map(|a| term(p, F1, a * p + k, 2 * p + l))), at);
        il2.push(ratio_sum(term(p, F2, p - k, 2 * p - l), [term(p, F1, p - k, 3 * p - l)]), at);
        il3.push(ratio_sum(term(p, F2, 2 * p - k, p - l), [term(p, F1, 2 * p - k, 2 * p - l)]), at);
    }
    let tri_label = format!("p={p}; k+l<p");
    out.push(c1.finish("i_corner_a1", "|F1(2p−k,p−l)| / F1(p−k,p−l)", tri_label.clone(), Some(p), 1.0 / 3.0, 0.0));
    out.push(c2.finish("i_corner_a2", "|F1(3p−k,p−l)| / F1(p−k,p−l)", tri_label.clone(), Some(p), 1.0 / 15.0, 0.0));
    out.push(col.finish(
        "i_column_sum",
        "Σ_{a≥4}|F1(p+k,pa+l)| / F1(p+k,p+l)",
        range_label(p, cfg, "k+l<p"),
        Some(p),
        1.0,
        16.0 / cap2,
    ));
    out.push(yel.finish(
        "i_row_sum",
        "Σ_{a≥3}|F1(ap−k,2p−l)| / F1(p−k,2p−l)",
        range_label(p, cfg, "k+l<p"),
        Some(p),
        17.0 / 81.0,
        8.0 / (3.0 * pow(cap, 3)),
    ));
    out.push(yel1.finish("i_row_partner", "|F1(p+k,3p+l)| / F1(p−k,2p−l)", tri_label.clone(), Some(p), 8.0 / 15.0, 0.0));
    out.push(il1.finish(
        "il_row_sum",
        "Σ_{a≥1}|F1(ap+k,2p+l)| / F2(p−k,p+k+l)",
        range_label(p, cfg, "k+l<p"),
        Some(p),
        0.5,
        2.0 / pow(cap, 3),
    ));
    out.push(il2.finish("il_upper_pair", "|F1(p−k,3p−l)| / F2(p−k,2p−l)", tri_label.clone(), Some(p), 0.2, 0.0));
    out.push(il3.finish("il_corner_pair", "|F1(2p−k,2p−l)| / F2(2p−k,p−l)", tri_label, Some(p), 1.0 / 9.0, 0.0));
    out
}

/// Lattice checks for every p in the range.
pub fn lemma_ratio_suite(p_range: impl IntoIterator<Item = usize>, cfg: &SuiteConfig) -> Vec<BoundReport> {
    p_range.into_iter().flat_map(|p| lemma_reports(p, cfg)).collect()
}

/// Σ_{k,l ≥ 1, k,l < p, keep(k,l)} (2F₁ + F₂)(k, l; t).
pub fn pair_decay_sum(p: usize, t: f64, keep: impl Fn(usize, usize) -> bool) -> f64 {
    let mut acc = 0.0;
    for k in 1..p {
        for l in 1..p {
            if keep(k, l) {
                let w = super::jfun::pair_decay(k, l, t);
                acc += (2.0 * big_a(p, k) * big_a(p, k + l) * big_b(p, l) - big_a(p, k) * big_a(p, l) * big_b(p, k + l)) * w;
            }
        }
    }
    acc
}
