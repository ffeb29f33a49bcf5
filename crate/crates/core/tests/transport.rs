mod common;

use graphene_dg_core::convergence::fitted_order;
use graphene_dg_core::mesh::{PolarMesh, SpatialGrid};
use graphene_dg_core::physics::PhysicalParams;
use graphene_dg_core::stepping::{ssp_rk3_step, Rk3Workspace};
use graphene_dg_core::transport::*;
use graphene_dg_core::{Band, SolutionState};
use proptest::prelude::*;

use common::random_state;

fn constant_boundary(ne: usize, c: f64) -> BoundarySpec {
    BoundarySpec {
        left: [vec![c; ne], vec![c; ne]],
        right: [vec![c; ne], vec![c; ne]],
    }
}

fn free_disc(nx: usize, ne: usize, nt: usize, boundary: BoundarySpec) -> Discretization {
    let p = PhysicalParams::default();
    Discretization::new(
        SpatialGrid::new(100.0, nx).unwrap(),
        PolarMesh::new(1.2, ne, nt).unwrap(),
        p.vf(),
        p.hbar_vf(),
        FluxBlend::upwind(),
        boundary,
        None,
    )
    .unwrap()
}

fn rhs_of(disc: &Discretization, state: &SolutionState, field: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; state.coeffs.len()];
    let mut ws = disc.workspace();
    disc.rhs(&state.coeffs, field, &mut out, &mut ws);
    out
}

#[test]
fn flux_examples() {
    let close = |x: f64, y: f64| (x - y).abs() < 1e-15;
    let central = FluxBlend::new(1.0).unwrap();
    let up = FluxBlend::upwind();
    assert!(close(spatial_flux(0.2, 0.6, 1.0, central), 0.4));
    assert!(close(spatial_flux(0.2, 0.6, -1.0, central), 0.4));
    assert!(close(spatial_flux(0.2, 0.6, 3.0, up), 0.2));
    assert!(close(spatial_flux(0.2, 0.6, -3.0, up), 0.6));
    let half = FluxBlend::new(0.5).unwrap();
    assert!(close(spatial_flux(0.2, 0.6, 1.0, half), 0.3));
    for eta in [0.0, 0.3, 1.0] {
        let b = FluxBlend::new(eta).unwrap();
        assert!(close(spatial_flux(0.7, 0.7, 1.0, b), 0.7));
        assert!(close(spatial_flux(0.7, 0.7, -1.0, b), 0.7));
    }
    assert!(FluxBlend::new(-0.1).is_err());
    assert!(FluxBlend::new(1.5).is_err());
}

#[test]
fn uno_examples() {
    for w in [-1.0, 0.0, 1.0] {
        assert_eq!(uno_interface(0.4, 0.4, 0.4, 0.4, w, 0.1), 0.4);
    }
    let c = 3.0;
    let dz = 0.25;
    let g = |z: f64| c * z;
    let v = uno_interface(g(0.0), g(dz), g(2.0 * dz), g(3.0 * dz), 1.0, dz);
    assert!((v - (g(dz) + c * dz / 2.0)).abs() < 1e-14);
    let v = uno_interface(g(0.0), g(dz), g(2.0 * dz), g(3.0 * dz), -1.0, dz);
    assert!((v - (g(2.0 * dz) - c * dz / 2.0)).abs() < 1e-14);
    assert_eq!(uno_interface(0.0, 1.0, 0.0, 5.0, 1.0, 0.1), 1.0);
    assert_eq!(uno_interface(0.2, 0.4, 0.6, 0.6, 0.0, 0.1), 0.5);
    assert_eq!(minmod(1.0, -2.0), 0.0);
    assert_eq!(minmod(-1.0, -2.0), -1.0);
    assert_eq!(minmod(3.0, 2.0), 2.0);
}

#[test]
fn flux_coefficients_are_the_exact_cell_integral() {
    let mesh = PolarMesh::new(1.2, 5, 8).unwrap();
    let p = PhysicalParams::default();
    let m = FluxCoefficients::new(&mesh, p.vf(), p.hbar_vf());
    let scale = p.vf() / (p.hbar_vf() * p.hbar_vf());
    for k in 0..5 {
        for n in 0..8 {
            // ∫∫ ε cos θ dε dθ by a fine midpoint rule
            let (e0, e1) = (mesh.e_edges[k], mesh.e_edges[k + 1]);
            let (t0, t1) = (mesh.t_edges[n], mesh.t_edges[n + 1]);
            let steps = 400;
            let (he, ht) = ((e1 - e0) / steps as f64, (t1 - t0) / steps as f64);
            let mut er = 0.0;
            let mut tr = 0.0;
            for j in 0..steps {
                er += (e0 + (j as f64 + 0.5) * he) * he;
                tr += (t0 + (j as f64 + 0.5) * ht).cos() * ht;
            }
            let expect = scale * er * tr;
            let got = m.get(Band::Conduction, k, n);
            assert!((got - expect).abs() < 1e-5 * expect.abs().max(1e-3 * scale * er));
            assert_eq!(m.get(Band::Valence, k, n), -got);
            assert_eq!(got > 0.0, mesh.cos_mids[n] > 0.0);
        }
    }
}

#[test]
fn inflow_sets_split_at_the_vertical() {
    let mesh = PolarMesh::new(1.2, 4, 16).unwrap();
    for n in 0..16 {
        let right_moving = mesh.cos_mids[n] > 0.0;
        assert_eq!(BoundarySpec::inflow_left(&mesh, Band::Conduction, n), right_moving);
        assert_eq!(BoundarySpec::inflow_right(&mesh, Band::Conduction, n), !right_moving);
        // valence carriers move against their wave vector
        assert_eq!(BoundarySpec::inflow_left(&mesh, Band::Valence, n), !right_moving);
    }
}

#[test]
fn mass_factors() {
    let disc = free_disc(4, 6, 8, constant_boundary(6, 0.0));
    let h2 = disc.hbar_vf * disc.hbar_vf;
    for k in 0..6 {
        let expect = disc.polar.dtheta * disc.polar.de2[k] / (2.0 * h2);
        assert!((disc.mass()[k] - expect).abs() < 1e-15 * expect);
    }
}

#[test]
fn boundary_data_must_match_the_mesh() {
    let p = PhysicalParams::default();
    let r = Discretization::new(
        SpatialGrid::new(100.0, 4).unwrap(),
        PolarMesh::new(1.2, 6, 8).unwrap(),
        p.vf(),
        p.hbar_vf(),
        FluxBlend::upwind(),
        constant_boundary(5, 0.0),
        None,
    );
    assert!(r.is_err());
}

#[test]
fn constant_state_is_preserved_by_free_streaming() {
    for eta in [0.0, 0.4, 1.0] {
        let c = 0.37;
        let mut disc = free_disc(12, 6, 8, constant_boundary(6, c));
        disc.blend = FluxBlend::new(eta).unwrap();
        let mut s = disc.zero_state();
        s.a_mut().fill(c);
        let du = rhs_of(&disc, &s, &[0.0; 12]);
        assert!(du.iter().all(|v| v.abs() < 1e-12), "eta {eta}");
    }
}

#[test]
fn zero_field_gives_no_drift() {
    let disc = free_disc(3, 5, 8, constant_boundary(5, 0.0));
    let s = random_state(3, 5, 8, 4);
    let g = disc.drift_projection(&s, &[0.0; 3], 1);
    assert!(g.iter().flatten().flatten().all(|v| *v == 0.0));
}

/// G0 and G1 for one band at one spatial cell, assembled directly from the
/// interface formulas with explicit ghost cells.
fn drift_oracle(disc: &Discretization, s: &SolutionState, band: Band, i: usize, e: f64) -> [Vec<f64>; 2] {
    let p = &disc.polar;
    let (ne, nt) = (p.ne, p.nt);
    let pref = e * disc.vf / (disc.hbar_vf * disc.hbar_vf) * disc.spatial.dx;
    let vacuum = disc.vacuum[band.index()];
    let mut out = [vec![0.0; ne * nt], vec![0.0; ne * nt]];
    for (m, coeff) in [0usize, 1].into_iter().zip([vacuum, 0.0]) {
        let g = |k: isize, n: isize| -> f64 {
            let n = n.rem_euclid(nt as isize) as usize;
            if k < 0 {
                let (a, b) = s.get(band, i, 0, n);
                if m == 0 { a } else { b }
            } else if k as usize >= ne {
                coeff
            } else {
                let (a, b) = s.get(band, i, k as usize, n);
                if m == 0 { a } else { b }
            }
        };
        // interface between energy cells k−1 and k
        let radial = |k: usize, n: usize| -> f64 {
            if k == 0 {
                return 0.0;
            }
            if k == ne {
                return coeff;
            }
            let w = (-e * p.dsin[n]).signum();
            let (k, n) = (k as isize, n as isize);
            uno_interface(g(k - 2, n), g(k - 1, n), g(k, n), g(k + 1, n), w, p.de)
        };
        // interface between angle cells n−1 and n
        let angular = |k: usize, n: usize| -> f64 {
            let w = if p.sin_edges[n] == 0.0 { 0.0 } else { (e * p.sin_edges[n]).signum() };
            let (k, n) = (k as isize, n as isize);
            uno_interface(g(k, n - 2), g(k, n - 1), g(k, n), g(k, n + 1), w, p.dtheta)
        };
        for k in 0..ne {
            for n in 0..nt {
                let r = (p.e_edges[k + 1] * radial(k + 1, n) - p.e_edges[k] * radial(k, n)) * p.dsin[n];
                let t = (p.sin_edges[n + 1] * angular(k, (n + 1) % nt) - p.sin_edges[n] * angular(k, n)) * p.de;
                out[m][k * nt + n] = (r - t) * pref * if m == 0 { 1.0 } else { 1.0 / 3.0 };
            }
        }
    }
    out
}

#[test]
fn drift_matches_direct_evaluation_on_a_small_mesh() {
    let disc = free_disc(2, 3, 4, constant_boundary(3, 0.0));
    for e in [-2e-3, 1.5e-3] {
        let mut s = disc.zero_state();
        for band in Band::ALL {
            for k in 0..3 {
                for n in 0..4 {
                    s.set(band, 1, k, n, 0.3, 0.05);
                }
            }
        }
        s.set(Band::Conduction, 1, 1, 2, 0.8, -0.1);
        s.set(Band::Valence, 1, 2, 0, 0.9, 0.02);
        let field = [e, e];
        let got = disc.drift_projection(&s, &field, 1);
        for band in Band::ALL {
            let want = drift_oracle(&disc, &s, band, 1, e);
            for m in 0..2 {
                for (x, y) in got[m][band.index()].iter().zip(&want[m]) {
                    assert!((x - y).abs() < 1e-13 * y.abs().max(1e-6), "{band:?} m {m}: {x} vs {y}");
                }
            }
        }
    }
}

#[test]
fn drift_matches_direct_evaluation_for_random_states() {
    let disc = free_disc(3, 7, 8, constant_boundary(7, 0.0));
    let s = random_state(3, 7, 8, 21);
    let field = [-3e-3, 2e-3, 0.5e-3];
    for i in 0..3 {
        let got = disc.drift_projection(&s, &field, i);
        for band in Band::ALL {
            let want = drift_oracle(&disc, &s, band, i, field[i]);
            for m in 0..2 {
                for (x, y) in got[m][band.index()].iter().zip(&want[m]) {
                    assert!((x - y).abs() < 1e-12 * y.abs().max(1e-3));
                }
            }
        }
    }
}

#[test]
fn drift_accelerates_electrons_against_the_field() {
    let disc = free_disc(2, 20, 16, constant_boundary(20, 0.0));
    let mut s = disc.zero_state();
    for k in 0..20 {
        let f = 1.0 / (1.0 + ((disc.polar.e_mids[k] - 0.25) / 0.0259).exp());
        for n in 0..16 {
            s.set(Band::Conduction, 0, k, n, f, 0.0);
        }
    }
    let field = [-1e-3, -1e-3];
    let g = disc.drift_projection(&s, &field, 0);
    // d/dt Σ a R̄ is proportional to Σ G0 Δsin θ_n
    let mut flux_rate = 0.0;
    for k in 0..20 {
        for n in 0..16 {
            flux_rate += g[0][0][k * 16 + n] * disc.polar.dsin[n];
        }
    }
    assert!(flux_rate > 0.0);
}

#[test]
fn drift_conserves_particles_when_the_top_is_empty() {
    let (ne, nt) = (12, 16);
    let disc = free_disc(4, ne, nt, constant_boundary(ne, 0.0));
    for seed in 0..6u8 {
        let mut s = random_state(4, ne, nt, seed);
        for i in 0..4 {
            for k in ne - 2..ne {
                for n in 0..nt {
                    s.set(Band::Conduction, i, k, n, 0.0, 0.0);
                    let (a, _) = s.get(Band::Valence, i, k, n);
                    s.set(Band::Valence, i, k, n, a, 0.0);
                }
            }
        }
        let field = [2e-3, -1e-3, 4e-3, -5e-3];
        for i in 0..4 {
            let g = disc.drift_projection(&s, &field, i);
            for band in Band::ALL {
                let g0 = &g[0][band.index()];
                let total: f64 = g0.iter().sum();
                let scale: f64 = g0.iter().map(|v| v.abs()).sum();
                assert!(total.abs() < 1e-12 * scale, "{band:?}: {total:e} of {scale:e}");
            }
        }
    }
}

#[test]
fn upwind_moves_a_jump_downstream() {
    let (nx, ne, nt) = (10, 3, 8);
    let mut bc = constant_boundary(ne, 0.0);
    bc.left = [vec![1.0; ne], vec![1.0; ne]];
    let disc = free_disc(nx, ne, nt, bc);
    let mut s = disc.zero_state();
    let jump = 5;
    for band in Band::ALL {
        for i in 0..jump {
            for k in 0..ne {
                for n in 0..nt {
                    s.set(band, i, k, n, 1.0, 0.0);
                }
            }
        }
    }
    let du = rhs_of(&disc, &s, &[0.0; 10]);
    for k in 0..ne {
        for n in 0..nt {
            let right_moving = disc.polar.cos_mids[n] > 0.0;
            let at = |band: Band, i: usize| du[s.index(band, i, k, n)];
            if right_moving {
                assert!(at(Band::Conduction, jump) > 0.0);
                assert_eq!(at(Band::Conduction, jump - 1), 0.0);
            } else {
                assert!(at(Band::Conduction, jump - 1) < 0.0);
                assert_eq!(at(Band::Conduction, jump), 0.0);
            }
            // valence velocity points the other way
            if right_moving {
                assert!(at(Band::Valence, jump - 1) < 0.0);
            } else {
                assert!(at(Band::Valence, jump) > 0.0);
            }
        }
    }
}

/// Exact free-streaming solution for a bump that vanishes with its slope at
/// both ends, sampled as a cell average and a first moment.
fn bump(x: f64, length: f64) -> f64 {
    if (0.0..=length).contains(&x) {
        0.5 + 0.25 * (std::f64::consts::PI * x / length).sin().powi(2)
    } else {
        0.5
    }
}

fn project(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let m = 64;
    let h = (hi - lo) / m as f64;
    let (mut a, mut b) = (0.0, 0.0);
    for j in 0..m {
        let x = lo + (j as f64 + 0.5) * h;
        let psi = 2.0 * (x - 0.5 * (lo + hi)) / (hi - lo);
        a += f(x) * h;
        b += f(x) * psi * h;
    }
    let dx = hi - lo;
    (a / dx, 3.0 * b / dx)
}

fn free_streaming_error(nx: usize) -> f64 {
    let (ne, nt) = (2, 4);
    let disc = free_disc(nx, ne, nt, constant_boundary(ne, 0.5));
    let length = disc.spatial.length;
    let speed = |band: Band, n: usize| band.sign() * disc.vf * disc.polar.dsin[n] / disc.polar.dtheta;
    let mut s = disc.zero_state();
    for band in Band::ALL {
        for i in 0..nx {
            let (a, b) = project(|x| bump(x, length), disc.spatial.edges[i], disc.spatial.edges[i + 1]);
            for k in 0..ne {
                for n in 0..nt {
                    s.set(band, i, k, n, a, b);
                }
            }
        }
    }
    let t_end = 0.03;
    let steps = (t_end / (0.1 * disc.spatial.dx / disc.vf)).ceil() as usize;
    let dt = t_end / steps as f64;
    let field = vec![0.0; nx];
    let mut ws = disc.workspace();
    let mut rk = Rk3Workspace::new(s.coeffs.len());
    for _ in 0..steps {
        ssp_rk3_step(
            &mut s.coeffs,
            dt,
            &mut rk,
            |_, u, du| {
                disc.rhs(u, &field, du, &mut ws);
                Ok(())
            },
            |_, _| Ok(()),
        )
        .unwrap();
    }
    let mut err = 0.0;
    for band in Band::ALL {
        for n in 0..nt {
            let u = speed(band, n);
            for i in 0..nx {
                let (exact, _) = project(|x| bump(x - u * t_end, length), disc.spatial.edges[i], disc.spatial.edges[i + 1]);
                let (a, _) = s.get(band, i, 0, n);
                err += (a - exact).abs() * disc.spatial.dx;
            }
        }
    }
    err
}

#[test]
fn free_streaming_converges_at_second_order() {
    let errors: Vec<f64> = [20, 40, 80, 160].iter().map(|&nx| free_streaming_error(nx)).collect();
    let order = fitted_order(&errors);
    assert!(order >= 1.8, "errors {errors:?}, order {order}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn first_order_upwind_stays_in_the_hull(
        init in prop::collection::vec(0.1f64..0.9, 10),
        left in 0.1f64..0.9,
        right in 0.1f64..0.9,
        cfl in 0.1f64..1.0,
    ) {
        let (nx, ne, nt) = (10, 2, 8);
        let bc = BoundarySpec {
            left: [vec![left; ne], vec![left; ne]],
            right: [vec![right; ne], vec![right; ne]],
        };
        let disc = free_disc(nx, ne, nt, bc);
        let lo = init.iter().cloned().fold(left.min(right), f64::min);
        let hi = init.iter().cloned().fold(left.max(right), f64::max);
        let mut s = disc.zero_state();
        for band in Band::ALL {
            for (i, v) in init.iter().enumerate() {
                for k in 0..ne {
                    for n in 0..nt {
                        s.set(band, i, k, n, *v, 0.0);
                    }
                }
            }
        }
        let dt = cfl * disc.spatial.dx / disc.vf;
        let field = vec![0.0; nx];
        let mut ws = disc.workspace();
        let mut du = vec![0.0; s.coeffs.len()];
        let half = s.coeffs.len() / 2;
        for _ in 0..40 {
            disc.rhs(&s.coeffs, &field, &mut du, &mut ws);
            for (x, d) in s.coeffs[..half].iter_mut().zip(&du[..half]) {
                *x += dt * d;
            }
            s.coeffs[half..].fill(0.0);
            for v in &s.coeffs[..half] {
                prop_assert!(*v >= lo - 1e-12 && *v <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn spatial_flux_lies_between_the_traces(fm in 0.0f64..1.0, fp in 0.0f64..1.0, m in -1.0f64..1.0, eta in 0.0f64..1.0) {
        let v = spatial_flux(fm, fp, m, FluxBlend::new(eta).unwrap());
        prop_assert!(v >= fm.min(fp) - 1e-15 && v <= fm.max(fp) + 1e-15);
    }

    #[test]
    fn uno_interface_is_bounded_by_its_neighbours(
        g in prop::array::uniform4(0.0f64..1.0),
        w in prop::sample::select(vec![-1.0, 0.0, 1.0]),
    ) {
        let v = uno_interface(g[0], g[1], g[2], g[3], w, 0.1);
        prop_assert!(v >= g[1].min(g[2]) - 1e-15 && v <= g[1].max(g[2]) + 1e-15);
    }
}
