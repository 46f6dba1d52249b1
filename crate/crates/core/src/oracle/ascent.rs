//! Projected-gradient ascent of a sum of quadratic forms over a product of
//! spheres, optionally restricted to the nonnegative orthant.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;

pub const GRADIENT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 10_000;

const ARMIJO: f64 = 1e-4;
const MAX_STEP: f64 = 1e6;
const MIN_STEP: f64 = 1e-14;

#[derive(Debug, Clone)]
pub(crate) struct QuadTerm {
    pub idx: Vec<usize>,
    /// Row-major `idx.len()²` symmetric matrix.
    pub q: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Group {
    pub idx: Vec<usize>,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub dim: usize,
    pub terms: Vec<QuadTerm>,
    pub groups: Vec<Group>,
    pub nonneg: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct Ascent {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

impl Problem {
    pub fn value(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for t in &self.terms {
            let k = t.idx.len();
            for a in 0..k {
                let xa = x[t.idx[a]];
                if xa == 0.0 {
                    continue;
                }
                let mut row = 0.0;
                for b in 0..k {
                    row += t.q[a * k + b] * x[t.idx[b]];
                }
                total += xa * row;
            }
        }
        total
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        g.iter_mut().for_each(|v| *v = 0.0);
        for t in &self.terms {
            let k = t.idx.len();
            for a in 0..k {
                let mut row = 0.0;
                for b in 0..k {
                    row += t.q[a * k + b] * x[t.idx[b]];
                }
                g[t.idx[a]] += 2.0 * row;
            }
        }
    }

    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        let mut out = z.to_vec();
        for grp in &self.groups {
            if self.nonneg {
                let (mut best, mut best_val) = (grp.idx[0], f64::NEG_INFINITY);
                for &i in &grp.idx {
                    if z[i] > best_val {
                        best = i;
                        best_val = z[i];
                    }
                    out[i] = out[i].max(0.0);
                }
                let norm = norm_of(&out, &grp.idx);
                if norm == 0.0 {
                    out[best] = grp.radius;
                    continue;
                }
                grp.idx.iter().for_each(|&i| out[i] *= grp.radius / norm);
            } else {
                let norm = norm_of(&out, &grp.idx);
                if norm == 0.0 {
                    out[grp.idx[0]] = grp.radius;
                    continue;
                }
                grp.idx.iter().for_each(|&i| out[i] *= grp.radius / norm);
            }
        }
        out
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let z: Vec<f64> = (0..self.dim)
            .map(|_| {
                let u: f64 = rng.random();
                if self.nonneg {
                    u
                } else {
                    2.0 * u - 1.0
                }
            })
            .collect();
        self.project(&z)
    }

    fn stationarity(&self, x: &[f64], g: &[f64]) -> f64 {
        let z: Vec<f64> = x.iter().zip(g).map(|(a, b)| a + b).collect();
        let p = self.project(&z);
        math::sqrt(p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum())
    }

    pub fn ascend(&self, x0: Vec<f64>) -> Ascent {
        let mut x = x0;
        let mut fx = self.value(&x);
        let mut g = vec![0.0; self.dim];
        let mut step = 1.0;
        for _ in 0..MAX_ITERATIONS {
            self.gradient(&x, &mut g);
            if self.stationarity(&x, &g) < GRADIENT_TOL {
                return Ascent { x, value: fx, converged: true };
            }
            let mut accepted = false;
            while step >= MIN_STEP {
                let z: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b).collect();
                let y = self.project(&z);
                let fy = self.value(&y);
                let dir: f64 = g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| gi * (yi - xi)).sum();
                // Near the optimum the value change drops below rounding long
                // before the gradient tolerance is met; keep stepping then.
                let tie = math::abs(fy - fx) <= 4.0 * f64::EPSILON * math::abs(fx).max(1.0);
                if fy >= fx + ARMIJO * dir.max(0.0) || tie {
                    accepted = true;
                    x = y;
                    fx = fy;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                // No ascent step left at machine resolution.
                let converged = self.stationarity(&x, &g) < GRADIENT_TOL;
                return Ascent { x, value: fx, converged };
            }
            step = (step * 2.0).min(MAX_STEP);
        }
        self.gradient(&x, &mut g);
        let converged = self.stationarity(&x, &g) < GRADIENT_TOL;
        Ascent { x, value: fx, converged }
    }

    /// Restart `i` draws its start from stream `i` of a generator seeded by
    /// `seed`, so the whole run is reproducible.
    pub fn multistart(&self, restarts: usize, seed: u64) -> Vec<Ascent> {
        (0..restarts)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let x0 = self.random_start(&mut rng);
                self.ascend(x0)
            })
            .collect()
    }
}

fn norm_of(x: &[f64], idx: &[usize]) -> f64 {
    math::sqrt(idx.iter().map(|&i| x[i] * x[i]).sum())
}
