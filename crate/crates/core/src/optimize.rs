//! Derivative-free minimizers: golden-section line search and Nelder–Mead simplex.

use serde::{Deserialize, Serialize};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimize a unimodal function on `[lo, hi]` until the bracket is narrower than `x_tol`.
///
/// Returns `(x, f(x))` for the best point evaluated.
pub fn golden_section<F, E>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > x_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Convergence on the spread of objective values across the simplex (absolute).
    pub f_tol: f64,
    /// Convergence on the largest vertex distance from the best vertex (per coordinate).
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            f_tol: 1e-9,
            x_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best objective value after every iteration.
    pub history: Vec<f64>,
}

/// Nelder–Mead with the standard coefficients (reflection 1, expansion 2, contraction ½,
/// shrink ½). `steps` gives the initial simplex edge along each coordinate.
pub fn nelder_mead<F, E>(
    mut f: F,
    start: &[f64],
    steps: &[f64],
    opts: &NelderMeadOptions,
) -> Result<Minimum, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let n = start.len();
    assert_eq!(n, steps.len(), "one step per coordinate");
    assert!(n > 0, "at least one free coordinate");

    let mut evaluations = 0;
    let mut eval = |x: &[f64], count: &mut usize| -> Result<f64, E> {
        *count += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(start, &mut evaluations)?;
    simplex.push((start.to_vec(), f0));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += steps[i];
        let fx = eval(&x, &mut evaluations)?;
        simplex.push((x, fx));
    }

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread_x = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (worst - best).abs() <= opts.f_tol && spread_x <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(1.0);
        let f_r = eval(&reflected, &mut evaluations)?;
        if f_r < best {
            let expanded = along(2.0);
            let f_e = eval(&expanded, &mut evaluations)?;
            simplex[n] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < simplex[n - 1].1 {
            simplex[n] = (reflected, f_r);
        } else {
            let (contracted, f_c) = if f_r < worst {
                let x = along(0.5);
                let fx = eval(&x, &mut evaluations)?;
                (x, fx)
            } else {
                let x = along(-0.5);
                let fx = eval(&x, &mut evaluations)?;
                (x, fx)
            };
            if f_c < worst.min(f_r) {
                simplex[n] = (contracted, f_c);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = anchor
                        .iter()
                        .zip(&vertex.0)
                        .map(|(a, v)| a + 0.5 * (v - a))
                        .collect();
                    let fx = eval(&x, &mut evaluations)?;
                    *vertex = (x, fx);
                }
            }
        }
        let current = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        history.push(current);
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Ok(Minimum {
        x,
        value,
        iterations,
        evaluations,
        converged,
        history,
    })
}
