//! Derivative-free simplex minimisation.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop once every vertex value is within `f_tol * (1 + |f_best|)` of the best.
    pub f_tol: f64,
    /// ...and every vertex lies within `x_tol` of the best in the max norm.
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            f_tol: 1e-12,
            x_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimises `f` from `x0` with an axis-aligned initial simplex of size
/// `step`. Non-finite values are treated as `+inf`, so infeasible regions can
/// be signalled by returning `f64::INFINITY`.
pub fn minimize(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    opts: &SimplexOptions,
) -> SimplexOutcome {
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        let v = eval(x0, &mut evals);
        return SimplexOutcome {
            x: Vec::new(),
            f: v,
            iterations: 0,
            evaluations: evals,
            converged: true,
        };
    }

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while evals < opts.max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let best = vals[0];
        if best == f64::INFINITY {
            break;
        }
        let spread = vals[n] - best;
        let size = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if best.is_finite() && spread <= opts.f_tol * (1.0 + best.abs()) && size <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();
        let towards = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = towards(1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < vals[0] {
            let expanded = towards(2.0);
            let fe = eval(&expanded, &mut evals);
            if fe < fr {
                pts[n] = expanded;
                vals[n] = fe;
            } else {
                pts[n] = reflected;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = reflected;
            vals[n] = fr;
            continue;
        }
        let contracted = towards(if fr < vals[n] { 0.5 } else { -0.5 });
        let fc = eval(&contracted, &mut evals);
        if fc < vals[n].min(fr) {
            pts[n] = contracted;
            vals[n] = fc;
            continue;
        }
        let anchor = pts[0].clone();
        for i in 1..=n {
            pts[i] = anchor
                .iter()
                .zip(&pts[i])
                .map(|(a, p)| a + 0.5 * (p - a))
                .collect();
            vals[i] = eval(&pts[i], &mut evals);
        }
    }

    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    SimplexOutcome {
        x: pts[best].clone(),
        f: vals[best],
        iterations,
        evaluations: evals,
        converged,
    }
}
