//! Damped Newton maximization in log-parameter coordinates.
//!
//! Both likelihood and product-spacing objectives are maximized over
//! `z = (ln alpha, ln beta)` so positivity is structural. The step is the
//! Newton direction when the Hessian is usable and an ascent direction,
//! otherwise a bounded gradient step; steps are halved until the objective
//! increases.

pub(crate) struct MaximizeOptions {
    pub grad_tol: f64,
    pub step_tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self { grad_tol: 1e-11, step_tol: 1e-12, max_iter: 200, max_halvings: 30 }
    }
}

pub(crate) struct MaximizeOutcome {
    pub z: [f64; 2],
    pub value: f64,
    pub iterations: usize,
}

const MAX_STEP: f64 = 4.0;

pub(crate) fn maximize2<F, G, H>(
    f: F,
    grad: G,
    hess: H,
    z0: [f64; 2],
    opts: &MaximizeOptions,
) -> MaximizeOutcome
where
    F: Fn([f64; 2]) -> f64,
    G: Fn([f64; 2]) -> [f64; 2],
    H: Fn([f64; 2]) -> [[f64; 2]; 2],
{
    let mut z = z0;
    let mut fz = f(z);
    let mut iterations = 0;
    if !fz.is_finite() {
        return MaximizeOutcome { z, value: fz, iterations };
    }
    for _ in 0..opts.max_iter {
        iterations += 1;
        let g = grad(z);
        if !(g[0].is_finite() && g[1].is_finite()) {
            break;
        }
        let gsup = g[0].abs().max(g[1].abs());
        if gsup < opts.grad_tol {
            return MaximizeOutcome { z, value: fz, iterations };
        }
        let mut step = newton_step(&hess, z, g).unwrap_or_else(|| ascent_step(g));
        if step[0] * g[0] + step[1] * g[1] <= 0.0 {
            step = ascent_step(g);
        }
        step[0] = step[0].clamp(-MAX_STEP, MAX_STEP);
        step[1] = step[1].clamp(-MAX_STEP, MAX_STEP);

        let mut improved = false;
        for _ in 0..=opts.max_halvings {
            let cand = [z[0] + step[0], z[1] + step[1]];
            let fc = f(cand);
            if fc.is_finite() && fc > fz {
                z = cand;
                fz = fc;
                improved = true;
                break;
            }
            step[0] *= 0.5;
            step[1] *= 0.5;
        }
        if !improved {
            break;
        }
        if step[0].abs().max(step[1].abs()) < opts.step_tol {
            break;
        }
    }
    MaximizeOutcome { z, value: fz, iterations }
}

fn newton_step<H>(hess: &H, z: [f64; 2], g: [f64; 2]) -> Option<[f64; 2]>
where
    H: Fn([f64; 2]) -> [[f64; 2]; 2],
{
    let h = hess(z);
    if h.iter().flatten().any(|v| !v.is_finite()) {
        return None;
    }
    crate::numeric::solve_sym2(h, [-g[0], -g[1]])
}

fn ascent_step(g: [f64; 2]) -> [f64; 2] {
    let scale = 1.0 / g[0].abs().max(g[1].abs()).max(1.0);
    [g[0] * scale, g[1] * scale]
}
