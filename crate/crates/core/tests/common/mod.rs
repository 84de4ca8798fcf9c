#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strominger_core::chart::{ChartId, ChartPoint};
use strominger_core::jet::{Jet, JetSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Twistor point with `0.2 ≤ |ζ|`, fiber coordinates in `[−1.2, 1.2]` and
/// `|x| ≥ 0.2`.
pub fn twistor_point(r: &mut ChaCha8Rng) -> ChartPoint {
    let z = loop {
        let z = c(r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
        if z.norm() > 0.2 {
            break z;
        }
    };
    ChartPoint::twistor(z, fiber_coords(r)).unwrap()
}

pub fn fiber_coords(r: &mut ChaCha8Rng) -> [f64; 4] {
    loop {
        let x = [0; 4].map(|_| r.gen_range(-1.2..1.2));
        if x.iter().map(|v| v * v).sum::<f64>() > 0.04 {
            return x;
        }
    }
}

pub fn fiber_point(r: &mut ChaCha8Rng) -> ChartPoint {
    ChartPoint::new(ChartId::Fiber, fiber_coords(r).to_vec()).unwrap()
}

pub fn kcp1(r: &mut ChaCha8Rng) -> ChartPoint {
    let z = c(r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
    let t = loop {
        let t = c(r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
        if t.norm() > 0.1 {
            break t;
        }
    };
    strominger_core::calabi::kcp1_point(z, t).unwrap()
}

/// Central differences along `multi` with step `h`.
fn central(f: &dyn Fn(&[f64]) -> f64, x: &[f64], multi: &[usize], h: f64) -> f64 {
    match multi.split_first() {
        None => f(x),
        Some((&i, rest)) => {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            (central(f, &p, rest, h) - central(f, &m, rest, h)) / (2.0 * h)
        }
    }
}

fn richardson(f: &dyn Fn(&[f64]) -> f64, x: &[f64], multi: &[usize], h: f64) -> f64 {
    (4.0 * central(f, x, multi, h / 2.0) - central(f, x, multi, h)) / 3.0
}

fn multi_indices(n: usize, order: usize) -> Vec<Vec<usize>> {
    if order == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for m in multi_indices(n, order - 1) {
        let start = m.last().copied().unwrap_or(0);
        for i in start..n {
            let mut m2 = m.clone();
            m2.push(i);
            out.push(m2);
        }
    }
    out
}

/// Largest gap between jet partials of orders 1..=3 and Richardson-extrapolated
/// central differences of the real part.
pub fn ad_fd_gap(eval: &dyn Fn(&[Jet]) -> Jet, x: &[f64]) -> f64 {
    let n = x.len();
    let jet = eval(&Jet::coordinates(&JetSpace::shared(n, 3), x));
    let scalar = |y: &[f64]| eval(&Jet::coordinates(&JetSpace::shared(n, 0), y)).re();
    let mut gap = 0.0f64;
    for order in 1..=3 {
        for m in multi_indices(n, order) {
            let ad = jet.partial_value(&m).unwrap().re;
            let fd = richardson(&scalar, x, &m, if order == 3 { 5e-3 } else { 1e-3 });
            gap = gap.max((ad - fd).abs());
        }
    }
    gap
}
