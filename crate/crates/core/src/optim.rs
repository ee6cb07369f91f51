//! Derivative-free Nelder–Mead minimiser over fixed-dimension points.

/// Stopping rules and initial simplex size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iterations: usize,
    /// Converged once the largest vertex-to-vertex distance falls below this.
    pub diameter_tolerance: f64,
    /// Offset of the initial vertices from the start along each axis.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iterations: 500, diameter_tolerance: 1e-6, initial_step: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<const N: usize> {
    pub point: [f64; N],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn diameter<const N: usize>(simplex: &[[f64; N]]) -> f64 {
    let mut widest = 0.0f64;
    for (i, a) in simplex.iter().enumerate() {
        for b in &simplex[i + 1..] {
            let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            widest = widest.max(d2);
        }
    }
    libm::sqrt(widest)
}

fn lerp<const N: usize>(from: &[f64; N], to: &[f64; N], t: f64) -> [f64; N] {
    core::array::from_fn(|i| from[i] + t * (to[i] - from[i]))
}

impl NelderMead {
    pub fn minimize<const N: usize, F>(&self, mut f: F, start: [f64; N]) -> Minimum<N>
    where
        F: FnMut(&[f64; N]) -> f64,
    {
        // N + 1 vertices; kept on the stack-free path through a small Vec
        let mut simplex: alloc::vec::Vec<[f64; N]> = alloc::vec::Vec::with_capacity(N + 1);
        simplex.push(start);
        for i in 0..N {
            let mut v = start;
            v[i] += self.initial_step;
            simplex.push(v);
        }
        let mut values: alloc::vec::Vec<f64> = simplex.iter().map(|v| sanitize(f(v))).collect();

        let mut iterations = 0;
        let mut converged = false;
        loop {
            // order vertices best to worst; stable so ties keep insertion order
            let mut order: alloc::vec::Vec<usize> = (0..=N).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i]).collect();
            values = order.iter().map(|&i| values[i]).collect();

            if diameter(&simplex) < self.diameter_tolerance {
                converged = true;
                break;
            }
            if iterations >= self.max_iterations {
                break;
            }
            iterations += 1;

            let centroid: [f64; N] = core::array::from_fn(|i| {
                simplex[..N].iter().map(|v| v[i]).sum::<f64>() / N as f64
            });
            let worst = simplex[N];
            let reflected = lerp(&centroid, &worst, -REFLECT);
            let fr = sanitize(f(&reflected));

            if fr < values[0] {
                let expanded = lerp(&centroid, &worst, -EXPAND);
                let fe = sanitize(f(&expanded));
                if fe < fr {
                    simplex[N] = expanded;
                    values[N] = fe;
                } else {
                    simplex[N] = reflected;
                    values[N] = fr;
                }
                continue;
            }
            if fr < values[N - 1] {
                simplex[N] = reflected;
                values[N] = fr;
                continue;
            }
            // contraction: outside if the reflection beat the worst vertex
            let (candidate, bound) = if fr < values[N] {
                (lerp(&centroid, &reflected, CONTRACT), fr)
            } else {
                (lerp(&centroid, &worst, CONTRACT), values[N])
            };
            let fc = sanitize(f(&candidate));
            if fc < bound {
                simplex[N] = candidate;
                values[N] = fc;
                continue;
            }
            let best = simplex[0];
            for k in 1..=N {
                simplex[k] = lerp(&best, &simplex[k], SHRINK);
                values[k] = sanitize(f(&simplex[k]));
            }
        }
        Minimum { point: simplex[0], value: values[0], iterations, converged }
    }
}
