//! Nelder-Mead downhill simplex.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct NelderMead {
    /// Initial simplex edge along every coordinate.
    pub step: f64,
    /// Stop once the simplex values span less than this.
    pub f_tol: f64,
    /// ... and every vertex is within this distance of the best one.
    pub x_tol: f64,
    pub max_evals: usize,
    /// Number of times the simplex is rebuilt around the best point after
    /// convergence, guarding against a collapsed simplex.
    pub rebuilds: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            step: 0.1,
            f_tol: 1e-14,
            x_tol: 1e-9,
            max_evals: 4000,
            rebuilds: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

impl NelderMead {
    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    pub fn minimize(&self, mut f: impl FnMut(&[f64]) -> f64, start: &[f64]) -> Minimum {
        let mut best = Minimum {
            x: start.to_vec(),
            value: f(start),
            evals: 1,
        };
        let mut step = self.step;
        for _ in 0..=self.rebuilds {
            let run = self.run(&mut f, &best.x, step);
            let evals = best.evals + run.evals;
            let improved = best.value - run.value;
            if run.value <= best.value {
                best = Minimum { evals, ..run };
            } else {
                best.evals = evals;
            }
            if improved <= self.f_tol {
                break;
            }
            step *= 0.1;
        }
        best
    }

    fn run(&self, f: &mut impl FnMut(&[f64]) -> f64, start: &[f64], step: f64) -> Minimum {
        let dim = start.len();
        if dim == 0 {
            return Minimum {
                x: Vec::new(),
                value: f(start),
                evals: 1,
            };
        }
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
        simplex.push(start.to_vec());
        for i in 0..dim {
            let mut v = start.to_vec();
            v[i] += step;
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
        let mut evals = dim + 1;
        let mut centroid = vec![0.0; dim];
        let mut trial = vec![0.0; dim];
        let mut second = vec![0.0; dim];

        while evals < self.max_evals {
            sort_simplex(&mut simplex, &mut values);
            let spread = values[dim] - values[0];
            let size = simplex[1..]
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(&simplex[0])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread <= self.f_tol && size <= self.x_tol {
                break;
            }

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for v in &simplex[..dim] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / dim as f64;
                }
            }
            let worst = simplex[dim].clone();
            along(&centroid, &worst, -1.0, &mut trial);
            let fr = f(&trial);
            evals += 1;

            if fr < values[0] {
                along(&centroid, &worst, -2.0, &mut second);
                let fe = f(&second);
                evals += 1;
                if fe < fr {
                    simplex[dim].copy_from_slice(&second);
                    values[dim] = fe;
                } else {
                    simplex[dim].copy_from_slice(&trial);
                    values[dim] = fr;
                }
                continue;
            }
            if fr < values[dim - 1] {
                simplex[dim].copy_from_slice(&trial);
                values[dim] = fr;
                continue;
            }
            // contraction, outside if the reflection beat the worst vertex
            let coef = if fr < values[dim] { -0.5 } else { 0.5 };
            along(&centroid, &worst, coef, &mut second);
            let fc = f(&second);
            evals += 1;
            if fc < values[dim].min(fr) {
                simplex[dim].copy_from_slice(&second);
                values[dim] = fc;
                continue;
            }
            // shrink toward the best vertex
            let (head, tail) = simplex.split_at_mut(1);
            for (v, val) in tail.iter_mut().zip(values[1..].iter_mut()) {
                for (x, b) in v.iter_mut().zip(&head[0]) {
                    *x = b + 0.5 * (*x - b);
                }
                *val = f(v);
                evals += 1;
            }
        }
        sort_simplex(&mut simplex, &mut values);
        Minimum {
            x: simplex.swap_remove(0),
            value: values[0],
            evals,
        }
    }
}

// out = c + t (w - c)
fn along(c: &[f64], w: &[f64], t: f64, out: &mut [f64]) {
    for ((o, ci), wi) in out.iter_mut().zip(c).zip(w) {
        *o = ci + t * (wi - ci);
    }
}

fn sort_simplex(simplex: &mut [Vec<f64>], values: &mut [f64]) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sv: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
    let vv: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    simplex.iter_mut().zip(sv).for_each(|(d, s)| *d = s);
    values.copy_from_slice(&vv);
}
