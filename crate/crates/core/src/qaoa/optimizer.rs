//! Nelder-Mead simplex search with a hard evaluation budget.

/// Reflection, expansion, contraction and shrink coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexCoefficients {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for SimplexCoefficients {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub coefficients: SimplexCoefficients,
    /// Offset of each initial vertex along one coordinate axis.
    pub initial_step: f64,
    /// Maximum number of objective evaluations.
    pub budget: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            coefficients: SimplexCoefficients::default(),
            initial_step: 0.3,
            budget: 80,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

struct Budgeted<F> {
    f: F,
    used: usize,
    budget: usize,
    best: Option<(Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Budgeted<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.used >= self.budget {
            return None;
        }
        self.used += 1;
        let v = (self.f)(x);
        let better = match &self.best {
            None => true,
            Some((_, b)) => v < *b,
        };
        if better {
            self.best = Some((x.to_vec(), v));
        }
        Some(v)
    }
}

impl NelderMead {
    pub fn with_budget(budget: usize) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }

    /// Minimizes `f` from `x0`. Returns the best point ever evaluated.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, f: F, x0: &[f64]) -> Minimum {
        let mut obj = Budgeted {
            f,
            used: 0,
            budget: self.budget.max(1),
            best: None,
        };
        self.run(&mut obj, x0);
        let (x, value) = obj.best.expect("at least one evaluation");
        Minimum {
            x,
            value,
            evaluations: obj.used,
        }
    }

    fn run<F: FnMut(&[f64]) -> f64>(&self, obj: &mut Budgeted<F>, x0: &[f64]) -> Option<()> {
        let SimplexCoefficients {
            reflection,
            expansion,
            contraction,
            shrink,
        } = self.coefficients;
        let dim = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        simplex.push((x0.to_vec(), obj.eval(x0)?));
        for j in 0..dim {
            let mut v = x0.to_vec();
            v[j] += self.initial_step;
            let fv = obj.eval(&v)?;
            simplex.push((v, fv));
        }
        loop {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let centroid: Vec<f64> = (0..dim)
                .map(|k| simplex[..dim].iter().map(|(v, _)| v[k]).sum::<f64>() / dim as f64)
                .collect();
            let worst = simplex[dim].clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(reflection);
            let fr = obj.eval(&xr)?;
            if fr < simplex[0].1 {
                let xe = along(reflection * expansion);
                let fe = obj.eval(&xe)?;
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let xc = along(reflection * contraction);
                let fc = obj.eval(&xc)?;
                (xc, fc)
            } else {
                let xc = along(-contraction);
                let fc = obj.eval(&xc)?;
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[dim] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let v: Vec<f64> = best
                    .iter()
                    .zip(&vertex.0)
                    .map(|(b, x)| b + shrink * (x - b))
                    .collect();
                let fv = obj.eval(&v)?;
                *vertex = (v, fv);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_one_returns_start() {
        let mut calls = 0;
        let r = NelderMead::with_budget(1).minimize(
            |x| {
                calls += 1;
                x[0] * x[0]
            },
            &[0.7, 0.2],
        );
        assert_eq!(calls, 1);
        assert_eq!(r.x, vec![0.7, 0.2]);
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn finds_quadratic_minimum() {
        let r = NelderMead::with_budget(400).minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
        );
        assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] + 0.5).abs() < 1e-3);
        assert!(r.evaluations <= 400);
    }

    #[test]
    fn rosenbrock_improves() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = NelderMead::with_budget(2000).minimize(f, &[-1.2, 1.0]);
        assert!(r.value < 1e-6, "value {}", r.value);
    }

    #[test]
    fn never_exceeds_budget() {
        for budget in [1, 2, 3, 5, 17, 80] {
            let mut calls = 0;
            NelderMead::with_budget(budget).minimize(
                |x| {
                    calls += 1;
                    x.iter().map(|v| v.sin()).sum()
                },
                &[0.1, 0.2, 0.3],
            );
            assert_eq!(calls, budget);
        }
    }
}
