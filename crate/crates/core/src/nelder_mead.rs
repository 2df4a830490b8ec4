//! Fixed-dimension Nelder-Mead simplex minimizer.

/// Standard coefficients: reflection, expansion, contraction, shrink.
const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Relative spread of objective values across the simplex.
    pub tolerance: f64,
    /// Absolute spread that also counts as converged, for objectives whose
    /// minimum is zero and the relative test cannot be met.
    pub absolute_floor: f64,
    /// Step added to each coordinate of the start point to build the simplex.
    pub initial_step: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Minimum<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn converged(best: f64, worst: f64, opts: &NelderMeadOptions) -> bool {
    let spread = worst - best;
    spread <= opts.tolerance * 0.5 * (best.abs() + worst.abs()) || spread <= opts.absolute_floor
}

fn lerp<const N: usize>(from: &[f64; N], to: &[f64; N], t: f64) -> [f64; N] {
    std::array::from_fn(|i| from[i] + t * (to[i] - from[i]))
}

/// Minimizes `f` starting from `x0`.
///
/// Ties in the vertex ordering are broken by vertex age so that the search path
/// is a deterministic function of `f` and `x0`.
pub fn minimize<const N: usize, F>(mut f: F, x0: [f64; N], opts: &NelderMeadOptions) -> Minimum<N>
where
    F: FnMut(&[f64; N]) -> f64,
{
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((x0, f(&x0)));
    for i in 0..N {
        let mut x = x0;
        x[i] += opts.initial_step;
        simplex.push((x, f(&x)));
    }

    let mut iterations = 0;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[N].1;
        if converged(best, worst, opts) {
            return Minimum {
                x: simplex[0].0,
                value: best,
                iterations,
                converged: true,
            };
        }
        if iterations >= opts.max_iterations {
            return Minimum {
                x: simplex[0].0,
                value: best,
                iterations,
                converged: false,
            };
        }
        iterations += 1;

        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi;
            }
        }
        for c in &mut centroid {
            *c /= N as f64;
        }

        let worst_x = simplex[N].0;
        let second_worst = simplex[N - 1].1;
        let reflected = lerp(&centroid, &worst_x, -ALPHA);
        let f_reflected = f(&reflected);

        if f_reflected < best {
            let expanded = lerp(&centroid, &worst_x, -GAMMA);
            let f_expanded = f(&expanded);
            simplex[N] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < second_worst {
            simplex[N] = (reflected, f_reflected);
            continue;
        }

        let (contracted, f_contracted) = if f_reflected < worst {
            let x = lerp(&centroid, &reflected, RHO);
            (x, f(&x))
        } else {
            let x = lerp(&centroid, &worst_x, RHO);
            (x, f(&x))
        };
        if f_contracted < f_reflected.min(worst) {
            simplex[N] = (contracted, f_contracted);
            continue;
        }

        let best_x = simplex[0].0;
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&best_x, &vertex.0, SIGMA);
            *vertex = (x, f(&x));
        }
    }
}
