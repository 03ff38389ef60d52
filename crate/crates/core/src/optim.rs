//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

use log::debug;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub max_iters: usize,
    /// Stop once the gradient infinity norm is at or below this.
    pub grad_tol: f64,
    pub memory: usize,
    /// Stop after five consecutive iterations whose relative decrease is
    /// below this.
    pub stall_tol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            grad_tol: 1e-6,
            memory: 12,
            stall_tol: 1e-15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_inf: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Whether the gradient criterion was met.
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Point {
    alpha: f64,
    f: f64,
    g: Vec<f64>,
    dphi: f64,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

struct LineSearch<'a, F> {
    func: &'a mut F,
    x: &'a [f64],
    d: &'a [f64],
    f0: f64,
    dphi0: f64,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> (f64, Vec<f64>)> LineSearch<'_, F> {
    fn eval(&mut self, alpha: f64) -> Point {
        let xt: Vec<f64> = self
            .x
            .iter()
            .zip(self.d)
            .map(|(x, d)| x + alpha * d)
            .collect();
        let (f, g) = (self.func)(&xt);
        self.evaluations += 1;
        let dphi = dot(&g, self.d);
        Point { alpha, f, g, dphi }
    }

    fn armijo(&self, p: &Point) -> bool {
        p.f <= self.f0 + C1 * p.alpha * self.dphi0
    }

    fn curvature(&self, p: &Point) -> bool {
        p.dphi.abs() <= -C2 * self.dphi0
    }

    fn run(&mut self, alpha0: f64) -> Option<Point> {
        let mut prev = Point {
            alpha: 0.0,
            f: self.f0,
            g: Vec::new(),
            dphi: self.dphi0,
        };
        let mut alpha = alpha0;
        for i in 0..25 {
            let p = self.eval(alpha);
            if !p.f.is_finite() {
                alpha *= 0.1;
                continue;
            }
            if !self.armijo(&p) || (i > 0 && p.f >= prev.f) {
                return self.zoom(prev, p);
            }
            if self.curvature(&p) {
                return Some(p);
            }
            if p.dphi >= 0.0 {
                return self.zoom(p, prev);
            }
            alpha = p.alpha * 2.0;
            prev = p;
        }
        None
    }

    fn zoom(&mut self, mut lo: Point, mut hi: Point) -> Option<Point> {
        for _ in 0..30 {
            let alpha = cubic_minimizer(&lo, &hi);
            let p = self.eval(alpha);
            if !self.armijo(&p) || p.f >= lo.f {
                hi = p;
            } else {
                if self.curvature(&p) {
                    return Some(p);
                }
                if p.dphi * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = p;
            }
            if (hi.alpha - lo.alpha).abs() < 1e-16 * lo.alpha.abs().max(1.0) {
                break;
            }
        }
        // Accept a point with sufficient decrease even if the curvature
        // condition could not be met.
        (lo.alpha > 0.0 && lo.f < self.f0 && !lo.g.is_empty()).then_some(lo)
    }
}

/// Safeguarded minimizer of the cubic through two bracketing points.
fn cubic_minimizer(lo: &Point, hi: &Point) -> f64 {
    let (a, b) = (lo.alpha, hi.alpha);
    let d1 = lo.dphi + hi.dphi - 3.0 * (lo.f - hi.f) / (a - b);
    let disc = d1 * d1 - lo.dphi * hi.dphi;
    let (lo_b, hi_b) = (a.min(b), a.max(b));
    let width = hi_b - lo_b;
    let mid = 0.5 * (a + b);
    if disc < 0.0 || !disc.is_finite() {
        return mid;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (hi.dphi + d2 - d1) / (hi.dphi - lo.dphi + 2.0 * d2);
    if !t.is_finite() || t < lo_b + 0.1 * width || t > hi_b - 0.1 * width {
        mid
    } else {
        t
    }
}

/// Minimizes `func`, which returns the value and gradient at a point.
pub fn minimize_lbfgs<F>(mut func: F, x0: &[f64], opts: &LbfgsOptions) -> OptimResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0.to_vec();
    let (mut f, mut g) = func(&x);
    let mut evaluations = 1;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut stalled = 0;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        if inf_norm(&g) <= opts.grad_tol {
            break;
        }
        iterations += 1;

        // Two-loop recursion for d = -H g.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        let gamma = history
            .back()
            .map_or(1.0, |(s, y, _)| dot(s, y) / dot(y, y));
        q.iter_mut().for_each(|v| *v *= gamma);
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut dphi0 = dot(&g, &d);
        if !(dphi0 < 0.0) {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            dphi0 = dot(&g, &d);
        }
        let alpha0 = if history.is_empty() {
            (1.0 / inf_norm(&g)).min(1.0)
        } else {
            1.0
        };

        let mut ls = LineSearch {
            func: &mut func,
            x: &x,
            d: &d,
            f0: f,
            dphi0,
            evaluations: 0,
        };
        let found = ls.run(alpha0);
        evaluations += ls.evaluations;
        let Some(p) = found else {
            if history.is_empty() {
                debug!("line search failed along steepest descent; stopping");
                break;
            }
            history.clear();
            continue;
        };

        let s: Vec<f64> = d.iter().map(|v| p.alpha * v).collect();
        let y: Vec<f64> = p.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            history.push_back((s.clone(), y, 1.0 / sy));
            if history.len() > opts.memory {
                history.pop_front();
            }
        }
        x.iter_mut().zip(&s).for_each(|(xi, si)| *xi += si);
        let decrease = f - p.f;
        f = p.f;
        g = p.g;
        if decrease <= opts.stall_tol * f.abs().max(1.0) {
            stalled += 1;
            if stalled >= 5 {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    let grad_inf = inf_norm(&g);
    OptimResult {
        x,
        f,
        grad_inf,
        iterations,
        evaluations,
        converged: grad_inf <= opts.grad_tol,
    }
}

/// Runs `n_starts` independent minimizations (in parallel) from points drawn
/// by `init`, each with its own random stream, and returns them in start
/// order.
pub fn multistart<F, I>(
    func: F,
    init: I,
    n_starts: usize,
    seed: u64,
    opts: &LbfgsOptions,
) -> Vec<OptimResult>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>) + Sync,
    I: Fn(usize, &mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    (0..n_starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let x0 = init(k, &mut rng);
            minimize_lbfgs(&func, &x0, opts)
        })
        .collect()
}

/// Lowest-value result; ties go to the earlier start.
pub fn best_of(results: Vec<OptimResult>) -> OptimResult {
    results
        .into_iter()
        .reduce(|best, r| if r.f < best.f { r } else { best })
        .expect("at least one start")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> (f64, Vec<f64>) {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![
            -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
            200.0 * (b - a * a),
        ];
        (f, g)
    }

    #[test]
    fn minimizes_rosenbrock() {
        let r = minimize_lbfgs(rosenbrock, &[-1.2, 1.0], &LbfgsOptions::default());
        assert!(r.converged, "{r:?}");
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quadratic_converges_quickly() {
        let f = |x: &[f64]| {
            let v: f64 = x
                .iter()
                .enumerate()
                .map(|(i, xi)| (i + 1) as f64 * xi * xi)
                .sum();
            let g = x
                .iter()
                .enumerate()
                .map(|(i, xi)| 2.0 * (i + 1) as f64 * xi)
                .collect();
            (v, g)
        };
        let r = minimize_lbfgs(f, &[1.0; 10], &LbfgsOptions::default());
        assert!(r.converged && r.iterations < 60, "{r:?}");
    }

    #[test]
    fn multistart_is_deterministic() {
        let init = |_: usize, rng: &mut ChaCha8Rng| {
            use rand::Rng;
            vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]
        };
        let a = multistart(rosenbrock, init, 4, 11, &LbfgsOptions::default());
        let b = multistart(rosenbrock, init, 4, 11, &LbfgsOptions::default());
        assert_eq!(a, b);
    }
}
