//! Plain Nelder–Mead simplex minimizer for the counterexample search.
//!
//! No gradients, no randomness: given the same start and objective it
//! always walks the same path. The caller supplies the standard four
//! coefficients and an evaluation budget; convergence is declared when
//! the simplex diameter (max L∞ distance to the best vertex) drops below
//! `diameter_tol`.

use std::cmp::Ordering;

pub(crate) struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_evals: u32,
    pub diameter_tol: f64,
}

pub(crate) struct NmOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: u32,
    pub converged: bool,
}

struct Vertex {
    x: Vec<f64>,
    value: f64,
}

impl NelderMead {
    pub(crate) fn minimize(
        &self,
        x0: &[f64],
        steps: &[f64],
        f: &mut dyn FnMut(&[f64]) -> f64,
    ) -> NmOutcome {
        let dim = x0.len();
        assert!(dim >= 1, "objective must have at least one coordinate");
        assert_eq!(steps.len(), dim);

        let mut evals: u32 = 0;
        let mut eval = |x: &[f64], evals: &mut u32| -> f64 {
            *evals += 1;
            f(x)
        };

        let mut simplex: Vec<Vertex> = Vec::with_capacity(dim + 1);
        let value0 = eval(x0, &mut evals);
        simplex.push(Vertex {
            x: x0.to_vec(),
            value: value0,
        });
        for k in 0..dim {
            let mut x = x0.to_vec();
            x[k] += steps[k];
            let value = eval(&x, &mut evals);
            simplex.push(Vertex { x, value });
        }

        let mut converged = false;
        loop {
            simplex.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal));
            if diameter(&simplex) < self.diameter_tol {
                converged = true;
                break;
            }
            if evals >= self.max_evals {
                break;
            }

            let worst = simplex.len() - 1;
            let mut centroid = vec![0.0; dim];
            for vertex in &simplex[..worst] {
                for (c, xi) in centroid.iter_mut().zip(&vertex.x) {
                    *c += xi;
                }
            }
            for c in &mut centroid {
                *c /= worst as f64;
            }

            let reflected = blend(&centroid, &simplex[worst].x, -self.reflection);
            let f_reflected = eval(&reflected, &mut evals);

            if f_reflected < simplex[0].value {
                let expanded = blend(&centroid, &reflected, self.expansion);
                let f_expanded = eval(&expanded, &mut evals);
                simplex[worst] = if f_expanded < f_reflected {
                    Vertex {
                        x: expanded,
                        value: f_expanded,
                    }
                } else {
                    Vertex {
                        x: reflected,
                        value: f_reflected,
                    }
                };
            } else if f_reflected < simplex[worst - 1].value {
                simplex[worst] = Vertex {
                    x: reflected,
                    value: f_reflected,
                };
            } else {
                // contract, outside when the reflection improved on the
                // worst vertex and inside otherwise
                let (candidate, against) = if f_reflected < simplex[worst].value {
                    (blend(&centroid, &reflected, self.contraction), f_reflected)
                } else {
                    (
                        blend(&centroid, &simplex[worst].x, self.contraction),
                        simplex[worst].value,
                    )
                };
                let f_candidate = eval(&candidate, &mut evals);
                if f_candidate < against {
                    simplex[worst] = Vertex {
                        x: candidate,
                        value: f_candidate,
                    };
                } else {
                    for k in 1..simplex.len() {
                        let shrunk: Vec<f64> = simplex[k]
                            .x
                            .iter()
                            .zip(&simplex[0].x)
                            .map(|(xi, bi)| bi + self.shrink * (xi - bi))
                            .collect();
                        let value = eval(&shrunk, &mut evals);
                        simplex[k] = Vertex { x: shrunk, value };
                    }
                }
            }
        }

        simplex.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal));
        let best = simplex.into_iter().next().expect("simplex is non-empty");
        NmOutcome {
            x: best.x,
            value: best.value,
            evals,
            converged,
        }
    }
}

/// centroid + t · (point − centroid)
fn blend(centroid: &[f64], point: &[f64], t: f64) -> Vec<f64> {
    centroid
        .iter()
        .zip(point)
        .map(|(c, p)| c + t * (p - c))
        .collect()
}

fn diameter(simplex: &[Vertex]) -> f64 {
    let best = &simplex[0].x;
    simplex[1..]
        .iter()
        .map(|v| {
            v.x.iter()
                .zip(best)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
