#![allow(dead_code)]

use graphene_dg_core::collision::ScatteringTable;
use graphene_dg_core::mesh::PolarMesh;
use graphene_dg_core::{Band, SolutionState};
use proptest::test_runner::{RngAlgorithm, TestRng};
use proptest::prelude::Rng;

/// Deterministic uniform samples in [0, 1).
pub struct Uniform(TestRng);

impl Uniform {
    pub fn new(seed: u8) -> Self {
        Self(TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
    }

    pub fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// State with averages in [0, 1] and slopes keeping both endpoints in [0, 1].
pub fn random_state(nx: usize, ne: usize, nt: usize, seed: u8) -> SolutionState {
    let mut rng = Uniform::new(seed);
    let mut s = SolutionState::zeros(nx, ne, nt);
    for band in Band::ALL {
        for i in 0..nx {
            for k in 0..ne {
                for n in 0..nt {
                    let a = rng.next();
                    let room = a.min(1.0 - a);
                    let b = (2.0 * rng.next() - 1.0) * room;
                    s.set(band, i, k, n, a, b);
                }
            }
        }
    }
    s
}

/// Q0 and Q1 at spatial cell `i` by direct summation over every cell pair.
pub fn naive_collision(state: &SolutionState, table: &ScatteringTable, i: usize, dx: f64) -> [[Vec<f64>; 2]; 2] {
    let (ne, nt) = (state.ne, state.nt);
    let mut q0 = [vec![0.0; ne * nt], vec![0.0; ne * nt]];
    let mut q1 = [vec![0.0; ne * nt], vec![0.0; ne * nt]];
    for s in Band::ALL {
        for k in 0..ne {
            for n in 0..nt {
                let (a, b) = state.get(s, i, k, n);
                let mut g0 = 0.0;
                let mut g1 = 0.0;
                for sp in Band::ALL {
                    for kp in 0..ne {
                        for np in 0..nt {
                            let (ap, bp) = state.get(sp, i, kp, np);
                            let gain = table.rate(sp, kp, np, s, k, n);
                            let loss = table.rate(s, k, n, sp, kp, np);
                            g0 += gain * ap * (1.0 - a) - loss * a * (1.0 - ap);
                            g0 -= (gain * bp * b - loss * b * bp) / 3.0;
                            g1 += gain * (ap * b - (1.0 - a) * bp) - loss * (a * bp - (1.0 - ap) * b);
                        }
                    }
                }
                q0[s.index()][k * nt + n] = g0 * dx;
                q1[s.index()][k * nt + n] = -g1 * dx / 3.0;
            }
        }
    }
    [q0, q1]
}

/// Largest |x − y| over all entries divided by the largest |y|.
pub fn relative_gap(x: &[[Vec<f64>; 2]; 2], y: &[[Vec<f64>; 2]; 2]) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (xa, ya) in x.iter().flatten().zip(y.iter().flatten()) {
        for (p, q) in xa.iter().zip(ya) {
            diff = diff.max((p - q).abs());
            scale = scale.max(q.abs());
        }
    }
    diff / scale
}

/// Midpoint rule with `m` points per side over two angle cells `dn` apart,
/// Richardson-extrapolated from `m` and `2m`.
pub fn angular_quadrature(dn: usize, d: f64, e: f64, dtheta: f64) -> f64 {
    let rule = |m: usize| {
        let h = dtheta / m as f64;
        let mut acc = 0.0;
        for p in 0..m {
            let t = dn as f64 * dtheta + (p as f64 + 0.5) * h;
            for q in 0..m {
                let tp = (q as f64 + 0.5) * h;
                acc += d + e * (t - tp).cos();
            }
        }
        acc * h * h
    };
    let (coarse, fine) = (rule(200), rule(400));
    (4.0 * fine - coarse) / 3.0
}

/// Richardson-extrapolated midpoint rule on [lo, hi]; exact for quadratics.
pub fn line_quadrature(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let rule = |m: usize| {
        let h = (hi - lo) / m as f64;
        (0..m).map(|p| f(lo + (p as f64 + 0.5) * h)).sum::<f64>() * h
    };
    (4.0 * rule(2000) - rule(1000)) / 3.0
}

/// ∫ ε ε' over the part of energy cell `k` whose image ε' = (sε + c)/s'
/// falls in cell `kp`, with the interval found by hand and integrated by
/// [`line_quadrature`].
pub fn clipped_integral(mesh: &PolarMesh, k: usize, kp: usize, s: f64, sp: f64, c: f64) -> f64 {
    let (lo, hi) = (mesh.e_edges[k], mesh.e_edges[k + 1]);
    let (dlo, dhi) = (mesh.e_edges[kp], mesh.e_edges[kp + 1]);
    // ε' is linear in ε with slope s/s' = ±1
    let pre = |ep: f64| (sp * ep - c) / s;
    let (a, b) = (pre(dlo), pre(dhi));
    let (a, b) = (a.min(b), a.max(b));
    let (x0, x1) = (lo.max(a), hi.min(b));
    if x1 <= x0 {
        return 0.0;
    }
    line_quadrature(|e| e * (s * e + c) / sp, x0, x1)
}

/// Emission plus absorption energy block with occupation `nq`.
pub fn block_oracle(mesh: &PolarMesh, k: usize, kp: usize, from: Band, to: Band, hw: f64, nq: f64) -> f64 {
    let (s, sp) = (from.sign(), to.sign());
    if hw == 0.0 {
        return (nq + 1.0) * clipped_integral(mesh, k, kp, s, sp, 0.0);
    }
    (nq + 1.0) * clipped_integral(mesh, k, kp, s, sp, -hw) + nq * clipped_integral(mesh, k, kp, s, sp, hw)
}
