//! Derivative-free local minimization (Nelder-Mead) and the softmax map
//! from unconstrained coordinates onto the probability simplex.

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iters: usize,
    /// Stop once the spread of objective values across the simplex is below this.
    pub f_tol: f64,
    /// ...and the simplex diameter (max-norm) is below this.
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            f_tol: 1e-10,
            x_tol: 1e-8,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl NelderMead {
    /// Minimizes `f` from `x0`. Non-finite objective values are treated as `+∞`.
    ///
    /// Uses the dimension-adaptive coefficients of Gao and Han.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        let mut eval = |x: &[f64]| {
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };
        if n == 0 {
            let value = eval(x0);
            return Minimum {
                x: vec![],
                value,
                iterations: 0,
                converged: true,
            };
        }

        let nf = n as f64;
        let reflect = 1.0;
        let expand = 1.0 + 2.0 / nf;
        let contract = 0.75 - 1.0 / (2.0 * nf);
        let shrink = 1.0 - 1.0 / nf;

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += self.initial_step;
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iters {
            iterations += 1;
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread = values[n] - values[0];
            let diameter = simplex[1..]
                .iter()
                .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread.abs() <= self.f_tol && diameter <= self.x_tol {
                converged = true;
                break;
            }

            let mut centroid = vec![0.0; n];
            for v in &simplex[..n] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / nf;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(reflect);
            let fr = eval(&xr);
            if fr < values[0] {
                let xe = along(reflect * expand);
                let fe = eval(&xe);
                if fe < fr {
                    simplex[n] = xe;
                    values[n] = fe;
                } else {
                    simplex[n] = xr;
                    values[n] = fr;
                }
                continue;
            }
            if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
                continue;
            }
            let (xc, fc) = if fr < values[n] {
                let xc = along(reflect * contract);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-contract);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
                continue;
            }
            let best = simplex[0].clone();
            for i in 1..=n {
                let v: Vec<f64> = best
                    .iter()
                    .zip(&simplex[i])
                    .map(|(b, x)| b + shrink * (x - b))
                    .collect();
                values[i] = eval(&v);
                simplex[i] = v;
            }
        }

        let best = (0..=n)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .expect("simplex is non-empty");
        Minimum {
            x: simplex[best].clone(),
            value: values[best],
            iterations,
            converged,
        }
    }
}

/// Softmax of `(θ_1, …, θ_{n-1}, 0)`, then every coordinate raised to at
/// least `floor` and renormalized. `n = theta.len() + 1`.
pub fn simplex_from_logits(theta: &[f64], floor: f64) -> Vec<f64> {
    let mut logits: Vec<f64> = theta.to_vec();
    logits.push(0.0);
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|t| (t - m).exp()).collect();
    let s: f64 = exps.iter().sum();
    let mut q: Vec<f64> = exps.iter().map(|e| (e / s).max(floor)).collect();
    let s: f64 = q.iter().sum();
    q.iter_mut().for_each(|x| *x /= s);
    q
}

/// Inverse of [`simplex_from_logits`] on the interior: `θ_i = ln(q_i / q_n)`.
pub fn logits_from_simplex(q: &[f64], floor: f64) -> Vec<f64> {
    let last = q[q.len() - 1].max(floor);
    q[..q.len() - 1]
        .iter()
        .map(|&x| (x.max(floor) / last).ln())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::assert_close;

    #[test]
    fn minimizes_rosenbrock() {
        let nm = NelderMead {
            max_iters: 20_000,
            f_tol: 1e-14,
            x_tol: 1e-10,
            initial_step: 0.5,
        };
        let m = nm.minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
        );
        assert!(m.converged);
        assert_close(m.x[0], 1.0, 1e-5);
        assert_close(m.x[1], 1.0, 1e-5);
    }

    #[test]
    fn minimizes_shifted_quadratic_in_eight_dims() {
        let target: Vec<f64> = (0..8).map(|i| i as f64 * 0.3 - 1.0).collect();
        let m = NelderMead::default().minimize(
            |x| x.iter().zip(&target).map(|(a, b)| (a - b) * (a - b) * 1.5).sum(),
            &[0.0; 8],
        );
        for (a, b) in m.x.iter().zip(&target) {
            assert_close(*a, *b, 1e-4);
        }
    }

    #[test]
    fn non_finite_values_are_avoided() {
        let m = NelderMead::default().minimize(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.25).powi(2) },
            &[1.0],
        );
        assert_close(m.x[0], 0.25, 1e-6);
    }

    #[test]
    fn logit_round_trip() {
        let q = [0.2, 0.5, 0.3];
        let back = simplex_from_logits(&logits_from_simplex(&q, 1e-14), 1e-14);
        for (a, b) in back.iter().zip(q) {
            assert_close(*a, b, 1e-15);
        }
    }

    #[test]
    fn floor_keeps_interior() {
        let q = simplex_from_logits(&[-800.0, 0.0], 1e-14);
        assert!(q.iter().all(|&x| x >= 1e-14 * 0.999));
        assert_close(q.iter().sum::<f64>(), 1.0, 1e-15);
    }
}
