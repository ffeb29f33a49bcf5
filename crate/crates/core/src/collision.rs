//! Cell-pair collision coefficients and the projected gain–loss operator.
//!
//! The coefficient for a transition from cell `(s, k, n)` to cell
//! `(s', k', n')` factorizes as `W_λ[n − n'] · B_λ[s, s'][k, k'] / (ħv_F)⁴`.
//! Every phonon kernel has the form `D + E·cos ϑ`, so the angular
//! convolution collapses onto three angular moments of the source data and
//! the operator costs `O(N_ε N_θ)` per spatial cell plus the energy links.
//! Impurity scattering keeps a tabulated kernel and a direct convolution.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::mesh::PolarMesh;
use crate::physics::{
    impurity_potential, impurity_potential_at_zero, mechanisms, MechanismKind, MechanismSpec,
    PhysicalParams,
};
use crate::state::{Band, SolutionState};

/// Sub-intervals per angle cell in the impurity kernel quadrature.
pub const IMPURITY_QUADRATURE: usize = 8;

/// ∬ (D + E cos(θ − θ')) dθ dθ' over two angle cells `Δn` apart.
pub fn angular_weight(dn: usize, d: f64, e: f64, dtheta: f64) -> f64 {
    let s = libm::sin(0.5 * dtheta);
    d * dtheta * dtheta + 4.0 * e * s * s * libm::cos(dn as f64 * dtheta)
}

/// Energy integral of a transition from energy cell `k` of band `from` into
/// energy cell `kp` of band `to`.
///
/// Emission (weight `n_q + 1`) lands at `ε' = (s/s')ε − ħω/s'`, absorption
/// (weight `n_q`) at `ε' = (s/s')ε + ħω/s'`; the integrand is `ε·ε'` over
/// the part of cell `k` that maps into cell `kp`. With `phonon_energy == 0`
/// the transition is elastic: intraband only, unit weight, `ε' = ε`.
pub fn energy_block(
    mesh: &PolarMesh,
    k: usize,
    kp: usize,
    from: Band,
    to: Band,
    phonon_energy: f64,
    occupation: f64,
) -> f64 {
    let src = (mesh.e_edges[k], mesh.e_edges[k + 1]);
    let dst = (mesh.e_edges[kp], mesh.e_edges[kp + 1]);
    let r = from.sign() / to.sign();
    if phonon_energy == 0.0 {
        if from != to {
            return 0.0;
        }
        return shell_integral(src, dst, r, 0.0);
    }
    let c = phonon_energy / to.sign();
    (occupation + 1.0) * shell_integral(src, dst, r, -c) + occupation * shell_integral(src, dst, r, c)
}

/// ∫ ε(rε + c) dε over `{ε ∈ src : rε + c ∈ dst}`.
fn shell_integral(src: (f64, f64), dst: (f64, f64), r: f64, c: f64) -> f64 {
    let (lo, hi) = if r > 0.0 {
        (dst.0 - c, dst.1 - c)
    } else {
        (c - dst.1, c - dst.0)
    };
    let lo = lo.max(src.0);
    let hi = hi.min(src.1);
    if hi <= lo {
        return 0.0;
    }
    let f = |e: f64| e * e * (r * e / 3.0 + 0.5 * c);
    (f(hi) - f(lo)).max(0.0)
}

/// Tabulated coefficients of one `D + E cos ϑ` mechanism.
#[derive(Debug, Clone)]
pub struct MechanismTable {
    pub spec: MechanismSpec,
    /// `blocks[from][to]`, dense `N_ε × N_ε` with source energy as row.
    blocks: [[Option<Vec<f64>>; 2]; 2],
    /// `W_λ[Δn]`.
    pub angular: Vec<f64>,
    ne: usize,
}

impl MechanismTable {
    pub fn allows(&self, from: Band, to: Band) -> bool {
        self.blocks[from.index()][to.index()].is_some()
    }

    pub fn block(&self, from: Band, to: Band, k: usize, kp: usize) -> f64 {
        match &self.blocks[from.index()][to.index()] {
            Some(b) => b[k * self.ne + kp],
            None => 0.0,
        }
    }
}

/// All collision coefficients for one polar mesh.
#[derive(Debug, Clone)]
pub struct ScatteringTable {
    pub ne: usize,
    pub nt: usize,
    pub dtheta: f64,
    /// 1/(ħv_F)⁴ in (eV·nm)⁻⁴.
    pub jacobian: f64,
    pub mechanisms: Vec<MechanismTable>,
    /// `K_imp[k][Δn]`, including the Jacobian; present with a substrate.
    pub impurity: Option<Vec<f64>>,
}

impl ScatteringTable {
    pub fn build(mesh: &PolarMesh, params: &PhysicalParams, substrate_on: bool) -> Result<Self> {
        let specs = mechanisms(params, substrate_on)?;
        let hv = params.hbar_vf();
        let jacobian = 1.0 / (hv * hv * hv * hv);
        let ne = mesh.ne;
        let mut tables = Vec::new();
        let mut impurity = None;
        for spec in specs {
            if spec.kind == MechanismKind::Impurity {
                impurity = Some(impurity_kernel(mesh, params, jacobian)?);
                continue;
            }
            let mut blocks: [[Option<Vec<f64>>; 2]; 2] = Default::default();
            for from in Band::ALL {
                for to in Band::ALL {
                    if from != to && !spec.interband {
                        continue;
                    }
                    let mut b = vec![0.0; ne * ne];
                    for k in 0..ne {
                        for kp in 0..ne {
                            b[k * ne + kp] = energy_block(
                                mesh,
                                k,
                                kp,
                                from,
                                to,
                                spec.phonon_energy,
                                spec.occupation,
                            );
                        }
                    }
                    blocks[from.index()][to.index()] = Some(b);
                }
            }
            let angular = (0..mesh.nt)
                .map(|dn| angular_weight(dn, spec.d_coeff, spec.e_coeff, mesh.dtheta))
                .collect();
            tables.push(MechanismTable {
                spec,
                blocks,
                angular,
                ne,
            });
        }
        Ok(Self {
            ne,
            nt: mesh.nt,
            dtheta: mesh.dtheta,
            jacobian,
            mechanisms: tables,
            impurity,
        })
    }

    /// Coefficient of the transition `(from, k, n) → (to, kp, np)`.
    pub fn rate(&self, from: Band, k: usize, n: usize, to: Band, kp: usize, np: usize) -> f64 {
        let dn = (n + self.nt - np) % self.nt;
        let mut a = 0.0;
        for m in &self.mechanisms {
            a += m.angular[dn] * m.block(from, to, k, kp);
        }
        a *= self.jacobian;
        if let Some(kernel) = &self.impurity {
            if from == to && k == kp {
                a += kernel[k * self.nt + dn];
            }
        }
        a
    }

    /// Flat rows `(mechanism, from, to, k, kp, B)` of every stored energy block.
    pub fn block_rows(&self) -> impl Iterator<Item = (&'static str, Band, Band, usize, usize, f64)> + '_ {
        self.mechanisms.iter().flat_map(move |m| {
            Band::ALL.into_iter().flat_map(move |from| {
                Band::ALL.into_iter().flat_map(move |to| {
                    let present = m.allows(from, to);
                    (0..if present { self.ne * self.ne } else { 0 }).map(move |idx| {
                        let (k, kp) = (idx / self.ne, idx % self.ne);
                        (m.spec.kind.name(), from, to, k, kp, m.block(from, to, k, kp))
                    })
                })
            })
        })
    }
}

/// `K_imp[k][Δn]` by midpoint quadrature over each pair of angle cells.
fn impurity_kernel(mesh: &PolarMesh, params: &PhysicalParams, jacobian: f64) -> Result<Vec<f64>> {
    let sub = params
        .substrate
        .as_ref()
        .ok_or_else(|| crate::error::config("impurity scattering needs substrate parameters"))?;
    let prefactor = params.impurity_prefactor()?;
    let at_zero = impurity_potential_at_zero(params)?;
    let hv = params.hbar_vf();
    let m = IMPURITY_QUADRATURE;
    let h = mesh.dtheta / m as f64;
    let (ne, nt) = (mesh.ne, mesh.nt);
    let mut kernel = vec![0.0; ne * nt];
    for k in 0..ne {
        let kmag = 2.0 * mesh.e_mids[k] / hv;
        let radial = mesh.de3[k] / 3.0;
        for dn in 0..nt {
            let mut acc = 0.0;
            for p in 0..m {
                for q in 0..m {
                    let diff = (dn as f64 + (p as f64 - q as f64) / m as f64) * mesh.dtheta;
                    let qv = kmag * libm::fabs(libm::sin(0.5 * diff));
                    let amp = if qv > 1e-12 * kmag {
                        impurity_potential(qv, sub.impurity_distance_nm, params)?
                    } else {
                        at_zero
                    };
                    acc += amp * 0.5 * (1.0 + libm::cos(diff));
                }
            }
            kernel[k * nt + dn] = jacobian * radial * prefactor * acc * h * h;
        }
    }
    Ok(kernel)
}

#[derive(Debug, Clone, Copy)]
struct Link {
    band: usize,
    k: usize,
    wd: f64,
    we: f64,
}

/// Fast evaluation of the projected collision operator.
#[derive(Debug, Clone)]
pub struct CollisionOperator {
    ne: usize,
    nt: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
    sum_cos: f64,
    sum_sin: f64,
    gain_start: Vec<usize>,
    gain: Vec<Link>,
    loss_start: Vec<usize>,
    loss: Vec<Link>,
    impurity: Option<Vec<f64>>,
    impurity_sum: Vec<f64>,
}

/// Work buffers for [`CollisionOperator::apply`].
#[derive(Debug, Clone, Default)]
pub struct CollisionScratch {
    moments: Vec<f64>,
    conv_a: Vec<f64>,
    conv_b: Vec<f64>,
    ring_a: Vec<f64>,
    ring_b: Vec<f64>,
}

impl CollisionOperator {
    pub fn new(table: &ScatteringTable, mesh: &PolarMesh) -> Self {
        let (ne, nt) = (mesh.ne, mesh.nt);
        let s = libm::sin(0.5 * mesh.dtheta);
        let fd = mesh.dtheta * mesh.dtheta * table.jacobian;
        let fe = 4.0 * s * s * table.jacobian;
        let mut gain_start = vec![0];
        let mut loss_start = vec![0];
        let mut gain = Vec::new();
        let mut loss = Vec::new();
        let mut acc = vec![(0.0, 0.0); 2 * ne];
        for band in Band::ALL {
            for k in 0..ne {
                for (incoming, list, starts) in [
                    (true, &mut gain, &mut gain_start),
                    (false, &mut loss, &mut loss_start),
                ] {
                    acc.iter_mut().for_each(|v| *v = (0.0, 0.0));
                    for m in &table.mechanisms {
                        for other in Band::ALL {
                            let (from, to) = if incoming { (other, band) } else { (band, other) };
                            if !m.allows(from, to) {
                                continue;
                            }
                            for kp in 0..ne {
                                let b = if incoming {
                                    m.block(from, to, kp, k)
                                } else {
                                    m.block(from, to, k, kp)
                                };
                                if b != 0.0 {
                                    let slot = &mut acc[other.index() * ne + kp];
                                    slot.0 += fd * m.spec.d_coeff * b;
                                    slot.1 += fe * m.spec.e_coeff * b;
                                }
                            }
                        }
                    }
                    for (idx, &(wd, we)) in acc.iter().enumerate() {
                        if wd != 0.0 || we != 0.0 {
                            list.push(Link {
                                band: idx / ne,
                                k: idx % ne,
                                wd,
                                we,
                            });
                        }
                    }
                    starts.push(list.len());
                }
            }
        }
        let impurity_sum = match &table.impurity {
            Some(kern) => (0..ne).map(|k| kern[k * nt..(k + 1) * nt].iter().sum()).collect(),
            None => Vec::new(),
        };
        Self {
            ne,
            nt,
            cos: mesh.cos_mids.clone(),
            sin: mesh.sin_mids.clone(),
            sum_cos: mesh.cos_mids.iter().sum(),
            sum_sin: mesh.sin_mids.iter().sum(),
            gain_start,
            gain,
            loss_start,
            loss,
            impurity: table.impurity.clone(),
            impurity_sum,
        }
    }

    /// Number of gain and loss links across all rows.
    pub fn link_counts(&self) -> (usize, usize) {
        (self.gain.len(), self.loss.len())
    }

    pub fn scratch(&self) -> CollisionScratch {
        CollisionScratch {
            moments: vec![0.0; 2 * self.ne * 6],
            conv_a: vec![0.0; self.nt],
            conv_b: vec![0.0; self.nt],
            ring_a: vec![0.0; 2 * self.nt],
            ring_b: vec![0.0; 2 * self.nt],
        }
    }

    /// Evaluates `Q0/Δx` and `3·Q1/Δx` for one spatial cell.
    ///
    /// `a[band]`, `b[band]` and the outputs are polar blocks of length
    /// `N_ε·N_θ`. Results are added to the outputs.
    pub fn apply(
        &self,
        a: [&[f64]; 2],
        b: [&[f64]; 2],
        q0: [&mut [f64]; 2],
        q1: [&mut [f64]; 2],
        scratch: &mut CollisionScratch,
    ) {
        let (ne, nt) = (self.ne, self.nt);
        let mom = &mut scratch.moments;
        for band in 0..2 {
            for k in 0..ne {
                let ra = &a[band][k * nt..(k + 1) * nt];
                let rb = &b[band][k * nt..(k + 1) * nt];
                let mut m = [0.0; 6];
                for n in 0..nt {
                    let (c, s) = (self.cos[n], self.sin[n]);
                    m[0] += ra[n];
                    m[1] += c * ra[n];
                    m[2] += s * ra[n];
                    m[3] += rb[n];
                    m[4] += c * rb[n];
                    m[5] += s * rb[n];
                }
                mom[(band * ne + k) * 6..(band * ne + k + 1) * 6].copy_from_slice(&m);
            }
        }
        let [q0p, q0m] = q0;
        let [q1p, q1m] = q1;
        let mut outs = [(q0p, q1p), (q0m, q1m)];
        for band in 0..2 {
            let (out0, out1) = &mut outs[band];
            for k in 0..ne {
                let row = band * ne + k;
                let mut ga = [0.0; 3];
                let mut gb = [0.0; 3];
                for l in &self.gain[self.gain_start[row]..self.gain_start[row + 1]] {
                    let m = &mom[(l.band * ne + l.k) * 6..(l.band * ne + l.k + 1) * 6];
                    ga[0] += l.wd * m[0];
                    ga[1] += l.we * m[1];
                    ga[2] += l.we * m[2];
                    gb[0] += l.wd * m[3];
                    gb[1] += l.we * m[4];
                    gb[2] += l.we * m[5];
                }
                let mut lh = [0.0; 3];
                let mut lb = [0.0; 3];
                for l in &self.loss[self.loss_start[row]..self.loss_start[row + 1]] {
                    let m = &mom[(l.band * ne + l.k) * 6..(l.band * ne + l.k + 1) * 6];
                    lh[0] += l.wd * (nt as f64 - m[0]);
                    lh[1] += l.we * (self.sum_cos - m[1]);
                    lh[2] += l.we * (self.sum_sin - m[2]);
                    lb[0] += l.wd * m[3];
                    lb[1] += l.we * m[4];
                    lb[2] += l.we * m[5];
                }
                let ra = &a[band][k * nt..(k + 1) * nt];
                let rb = &b[band][k * nt..(k + 1) * nt];
                let has_imp = if let Some(kern) = &self.impurity {
                    let kr = &kern[k * nt..(k + 1) * nt];
                    let CollisionScratch { conv_a, conv_b, ring_a, ring_b, .. } = scratch;
                    ring_a[..nt].copy_from_slice(ra);
                    ring_a[nt..].copy_from_slice(ra);
                    ring_b[..nt].copy_from_slice(rb);
                    ring_b[nt..].copy_from_slice(rb);
                    conv_a.fill(0.0);
                    conv_b.fill(0.0);
                    // conv[n] = Σ_d K[d] g[(n − d) mod N_θ]
                    for (d, &w) in kr.iter().enumerate() {
                        for (x, g) in conv_a.iter_mut().zip(&ring_a[nt - d..2 * nt - d]) {
                            *x += w * g;
                        }
                        for (x, g) in conv_b.iter_mut().zip(&ring_b[nt - d..2 * nt - d]) {
                            *x += w * g;
                        }
                    }
                    true
                } else {
                    false
                };
                let o0 = &mut out0[k * nt..(k + 1) * nt];
                let o1 = &mut out1[k * nt..(k + 1) * nt];
                for n in 0..nt {
                    let (c, s) = (self.cos[n], self.sin[n]);
                    let mut g_a = ga[0] + ga[1] * c + ga[2] * s;
                    let mut g_b = gb[0] + gb[1] * c + gb[2] * s;
                    let mut l_h = lh[0] + lh[1] * c + lh[2] * s;
                    let mut l_b = lb[0] + lb[1] * c + lb[2] * s;
                    if has_imp {
                        g_a += scratch.conv_a[n];
                        g_b += scratch.conv_b[n];
                        l_h += self.impurity_sum[k] - scratch.conv_a[n];
                        l_b += scratch.conv_b[n];
                    }
                    let (av, bv) = (ra[n], rb[n]);
                    o0[n] += (1.0 - av) * g_a - bv * g_b / 3.0 - av * l_h + bv * l_b / 3.0;
                    o1[n] -= bv * g_a - (1.0 - av) * g_b - av * l_b + bv * l_h;
                }
            }
        }
    }
}

/// Projected collision terms `(Q0, Q1)` at spatial cell `i`, each indexed
/// `[band][k·N_θ + n]` and including the Δx and Δx/3 factors.
pub fn apply_collision(
    state: &SolutionState,
    op: &CollisionOperator,
    i: usize,
    dx: f64,
) -> [[Vec<f64>; 2]; 2] {
    let len = state.polar_len();
    let mut q0 = [vec![0.0; len], vec![0.0; len]];
    let mut q1 = [vec![0.0; len], vec![0.0; len]];
    let a = [state.a_cell(Band::Conduction, i), state.a_cell(Band::Valence, i)];
    let b = [state.b_cell(Band::Conduction, i), state.b_cell(Band::Valence, i)];
    let mut scratch = op.scratch();
    {
        let [q0p, q0m] = &mut q0;
        let [q1p, q1m] = &mut q1;
        op.apply(a, b, [q0p, q0m], [q1p, q1m], &mut scratch);
    }
    q0.iter_mut().flatten().for_each(|v| *v *= dx);
    q1.iter_mut().flatten().for_each(|v| *v *= dx / 3.0);
    [q0, q1]
}
