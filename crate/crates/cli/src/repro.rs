//! `reproduce` targets: each runs a scaled experiment and compares observed values
//! against pinned expectations.

use nsdistill::distill::sweep::argmax;
use nsdistill::distill::{
    chsh_n_lambda, hardy_mixture, limit_distilled_hardy, optimal_copies, peak_chsh_lambda, sweep,
    tsirelson_gain, two_copy_ball_radius, two_copy_threshold, Axis, Grid, Quantity,
};
use nsdistill::nsbox::catalog::{b_q_max, h_ns, h_ns_prime, h_q_max};
use nsdistill::nsbox::{
    basis_boxes, decompose_simplex, hardy_test, mix, p_l, quantum_hardy_max, SimplexDecomposition,
    DEFAULT_HARDY_TOL,
};
use nsdistill::pqdetect::{hardy_bound_detector, ic_check, ntcc_check};
use nsdistill::wiring::{chsh_after_two_copy, wire_n_closed, wire_pair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const KEYS: [&str; 8] = [
    "thm1-hardy",
    "thm2-gain",
    "thm3-ball",
    "prop1-copies",
    "figA1",
    "figA2",
    "figD1",
    "appE-postquantum",
];

pub enum Expected {
    /// `|observed − value| ≤ tol`.
    Near { value: f64, tol: f64 },
    /// `|observed − value| ≤ rel·|value|`.
    Relative { value: f64, rel: f64 },
    /// `lo < observed < hi`.
    Between { lo: f64, hi: f64 },
    Below(f64),
    Flag(bool),
}

impl Expected {
    fn holds(&self, v: f64) -> bool {
        match *self {
            Expected::Near { value, tol } => (v - value).abs() <= tol,
            Expected::Relative { value, rel } => (v - value).abs() <= rel * value.abs(),
            Expected::Between { lo, hi } => lo < v && v < hi,
            Expected::Below(b) => v < b,
            Expected::Flag(f) => (v != 0.0) == f,
        }
    }

    pub fn describe(&self, fmt: &dyn Fn(f64) -> String) -> String {
        match *self {
            Expected::Near { value, tol } => format!("{} ± {}", fmt(value), fmt(tol)),
            Expected::Relative { value, rel } => format!("{} ± {}%", fmt(value), fmt(rel * 100.0)),
            Expected::Between { lo, hi } => format!("in ({}, {})", fmt(lo), fmt(hi)),
            Expected::Below(b) => format!("< {}", fmt(b)),
            Expected::Flag(f) => f.to_string(),
        }
    }
}

pub struct Row {
    pub key: &'static str,
    pub label: &'static str,
    pub observed: f64,
    pub expected: Expected,
    /// Whether `observed` is a flag (0/1) rather than a number.
    pub is_flag: bool,
}

impl Row {
    pub fn pass(&self) -> bool {
        self.expected.holds(self.observed)
    }
}

fn near(key: &'static str, label: &'static str, observed: f64, value: f64, tol: f64) -> Row {
    Row { key, label, observed, expected: Expected::Near { value, tol }, is_flag: false }
}

fn flag(key: &'static str, label: &'static str, observed: bool, want: bool) -> Row {
    Row {
        key,
        label,
        observed: if observed { 1.0 } else { 0.0 },
        expected: Expected::Flag(want),
        is_flag: true,
    }
}

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn two_copy_gain(lambda: f64) -> bool {
    let g = golden();
    let b = hardy_mixture(g, g, lambda).expect("valid mixture");
    let parent = hardy_test(&b, DEFAULT_HARDY_TOL).success;
    let child = hardy_test(&wire_n_closed(&b, 2).expect("wiring"), DEFAULT_HARDY_TOL).success;
    child > parent
}

fn thm1() -> Vec<Row> {
    const K: &str = "thm1-hardy";
    let g = golden();
    let b = hardy_mixture(g, g, 1e-6).expect("valid mixture");
    let c = decompose_simplex(&b).expect("Hardy-form box");
    let opt = optimal_copies(c.c(0), c.c(1)).expect("valid weights");
    vec![
        near(K, "H_Q_max hardy success", hardy_test(&h_q_max(), DEFAULT_HARDY_TOL).success, quantum_hardy_max(), 1e-12),
        near(K, "distilled success at lambda=1e-6", opt.value_opt, 0.0410237, 1e-3),
        flag(K, "2-copy gain at lambda=1/phi-1e-6", two_copy_gain(g - 1e-6), true),
        flag(K, "2-copy gain at lambda=1/phi+1e-6", two_copy_gain(g + 1e-6), false),
    ]
}

fn thm2() -> Vec<Row> {
    const K: &str = "thm2-gain";
    let lambda = 1e-7;
    let peak = peak_chsh_lambda(lambda).expect("lambda in range");
    let gain = tsirelson_gain(chsh_n_lambda(lambda, 1).expect("lambda in range"), peak.value);
    let t = two_copy_threshold();
    let gains = |l: f64| chsh_n_lambda(l, 2).unwrap() > chsh_n_lambda(l, 1).unwrap();
    let wired_gains = |l: f64| {
        let b = mix(&[l, 1.0 - l], &[b_q_max(), p_l(1)]).expect("valid mixture");
        wire_pair(&b, &b).chsh() > b.chsh()
    };
    vec![
        near(K, "peak CHSH at lambda=1e-7", peak.value, 2.32928, 1e-4),
        Row {
            key: K,
            label: "peak copy count",
            observed: peak.n_opt as f64,
            expected: Expected::Relative { value: 1.04739e7, rel: 0.01 },
            is_flag: false,
        },
        near(K, "Tsirelson gain (%)", gain, 39.748, 0.01),
        near(K, "two-copy threshold", t, 0.55501, 1e-5),
        flag(K, "2-copy gain below threshold", gains(t - 1e-6) && wired_gains(t - 1e-6), true),
        flag(K, "2-copy gain above threshold", gains(t + 1e-6) || wired_gains(t + 1e-6), false),
    ]
}

fn thm3() -> Vec<Row> {
    const K: &str = "thm3-ball";
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let basis = basis_boxes();
    let random_weights = |rng: &mut ChaCha8Rng| {
        let raw: [f64; 9] = std::array::from_fn(|_| -(1.0 - rng.random::<f64>()).ln());
        let total: f64 = raw.iter().sum();
        raw.map(|w| w / total)
    };
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let w = random_weights(&mut rng);
        let direct = wire_n_closed(&mix(&w, &basis).unwrap(), 2).unwrap().chsh();
        let poly = chsh_after_two_copy(&SimplexDecomposition::from_weights(w)).unwrap();
        worst = worst.max((poly - direct).abs());
    }
    let mut inside = 0;
    for _ in 0..100 {
        let mut w = random_weights(&mut rng);
        let c0 = 0.05 + 0.95 * rng.random::<f64>();
        let rest: f64 = w[1..].iter().sum();
        for x in &mut w[1..] {
            *x *= (1.0 - c0) / rest;
        }
        w[0] = c0;
        let lambda = two_copy_ball_radius(c0).unwrap() * (0.01 + 0.98 * rng.random::<f64>());
        let b = mix(&[lambda, 1.0 - lambda], &[mix(&w, &basis).unwrap(), p_l(1)]).unwrap();
        if wire_pair(&b, &b).chsh() > b.chsh() {
            inside += 1;
        }
    }
    vec![
        near(K, "max |K2 polynomial - direct|", worst, 0.0, 1e-10),
        near(K, "ball radius for c0=1", two_copy_ball_radius(1.0).unwrap(), 2.0 / 3.0, 1e-15),
        near(K, "mixtures inside the ball that distil", inside as f64, 100.0, 0.0),
    ]
}

fn prop1() -> Vec<Row> {
    const K: &str = "prop1-copies";
    let c = decompose_simplex(&h_ns()).expect("H_NS is Hardy-form");
    let opt = optimal_copies(c.c(0), c.c(1)).expect("valid weights");
    let x = opt.n_star.unwrap_or(f64::NAN);
    let wired = hardy_test(&wire_n_closed(&h_ns(), 8).unwrap(), DEFAULT_HARDY_TOL).success;
    vec![
        Row {
            key: K,
            label: "stationary point x*",
            observed: x,
            expected: Expected::Between { lo: 7.0, hi: 8.0 },
            is_flag: false,
        },
        near(K, "floor(x*)", x.floor(), 7.0, 0.0),
        near(K, "optimal copies", opt.n_opt as f64, 8.0, 0.0),
        near(K, "optimal hardy success", opt.value_opt, 0.157977, 1e-6),
        near(K, "8-copy wired hardy success", wired, 0.157977, 1e-6),
    ]
}

fn unit_grid(n: usize) -> Grid {
    let axis = Axis::Range { min: 0.0, max: 1.0, count: n };
    Grid { r: Some(axis), s: Some(axis), lambda: None }
}

fn fig_a1() -> Vec<Row> {
    const K: &str = "figA1";
    let recs = sweep(&unit_grid(200), Quantity::Gap).expect("valid grid");
    let best = recs.iter().fold(&recs[0], |b, r| if r.gap > b.gap { r } else { b });
    let cell = 1.0 / 200.0;
    vec![
        near(K, "max distillation gap", best.gap, 0.0101896, 1e-4),
        near(K, "argmax r", best.r.unwrap(), 0.1241, cell),
        near(K, "argmax s", best.s.unwrap(), 0.8896, cell),
        near(K, "n_opt at argmax", best.n_opt.unwrap_or(0) as f64, 4.0, 0.0),
    ]
}

fn fig_a2() -> Vec<Row> {
    const K: &str = "figA2";
    let recs = sweep(&unit_grid(200), Quantity::Limit).expect("valid grid");
    let best = argmax(&recs).expect("non-empty grid");
    let cell = 1.0 / 200.0;
    vec![
        near(K, "limit at (1/2, 2/3)", limit_distilled_hardy(0.5, 2.0 / 3.0).unwrap(), 0.0433049, 1e-5),
        near(K, "grid max of limit", best.distilled_value, 0.0433049, 1e-5),
        near(K, "argmax r", best.r.unwrap(), 0.5, cell),
        near(K, "argmax s", best.s.unwrap(), 2.0 / 3.0, cell),
    ]
}

fn fig_d1() -> Vec<Row> {
    const K: &str = "figD1";
    let lambda = 1e-7;
    let peak = peak_chsh_lambda(lambda).expect("lambda in range");
    // the curve undershoots 2 after the peak before saturating
    let dip = (1..=200u64)
        .map(|k| chsh_n_lambda(lambda, peak.n_opt * k / 4).unwrap())
        .fold(f64::INFINITY, f64::min);
    let tail = chsh_n_lambda(lambda, (1000.0 / lambda) as u64).unwrap();
    vec![
        near(K, "peak CHSH", peak.value, 2.32928, 1e-4),
        Row { key: K, label: "minimum after the peak", observed: dip, expected: Expected::Below(2.0), is_flag: false },
        near(K, "CHSH at n=1000/lambda", tail, 2.0, 1e-9),
    ]
}

fn app_e() -> Vec<Row> {
    const K: &str = "appE-postquantum";
    let b = h_ns();
    let eight = wire_n_closed(&b, 8).unwrap();
    let hb = hardy_bound_detector(&b, 8).unwrap();
    let prime = hardy_bound_detector(&h_ns_prime(), 2).unwrap();
    vec![
        near(K, "H_NS chsh", b.chsh(), 2.2, 1e-9),
        near(K, "H_NS 8-copy chsh", eight.chsh(), 2.63088, 1e-5),
        near(K, "H_NS IC quantity", ic_check(&b).quantity, 0.9578, 1e-4),
        near(K, "H_NS 8-copy IC quantity", ic_check(&eight).quantity, 0.9565, 1e-4),
        flag(K, "H_NS ntcc positive", ntcc_check(&b).positive, false),
        flag(K, "H_NS hardy_bound positive", hb.positive, true),
        near(K, "H_NS_prime 2-copy hardy success", prime.quantity, 0.0925, 1e-4),
        flag(K, "H_NS_prime hardy_bound positive", prime.positive, true),
        flag(K, "H_NS_prime ntcc positive", ntcc_check(&h_ns_prime()).positive, false),
        flag(K, "H_NS_prime ic positive", ic_check(&h_ns_prime()).positive, false),
    ]
}

pub fn run(key: &str) -> Option<Vec<Row>> {
    Some(match key {
        "thm1-hardy" => thm1(),
        "thm2-gain" => thm2(),
        "thm3-ball" => thm3(),
        "prop1-copies" => prop1(),
        "figA1" => fig_a1(),
        "figA2" => fig_a2(),
        "figD1" => fig_d1(),
        "appE-postquantum" => app_e(),
        _ => return None,
    })
}
