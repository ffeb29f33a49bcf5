//! Physical constants, equilibrium distributions and scattering couplings.
//!
//! User-facing parameters keep the units of the literature tables (cm/s,
//! g/cm², eV/cm, cm⁻²). Couplings are converted once to eV·nm²/ps.

use core::f64::consts::PI;

use crate::error::{config, Error, Result};
use crate::state::Band;

pub const HBAR_EV_PS: f64 = 6.582_119_569e-4;
pub const HBAR_J_S: f64 = 1.054_571_817e-34;
pub const BOLTZMANN_EV_K: f64 = 8.617_333_262e-5;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;
/// e²/(4πϵ₀) in eV·nm.
pub const COULOMB_EV_NM: f64 = ELEMENTARY_CHARGE / (4.0 * PI * VACUUM_PERMITTIVITY) * 1e9;
/// e/ϵ₀ in V·nm.
pub const CHARGE_OVER_EPS0_V_NM: f64 = ELEMENTARY_CHARGE / VACUUM_PERMITTIVITY * 1e9;

/// J·m²/s to eV·nm²/ps.
const SI_RATE_TO_INTERNAL: f64 = 1e6 / ELEMENTARY_CHARGE;

/// Screening Fermi level below which the density fallback may apply (eV).
pub const SCREENING_FALLBACK_THRESHOLD: f64 = 0.04;

/// Material and lattice parameters of the graphene layer.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    pub fermi_velocity_cm_s: f64,
    pub areal_mass_density_g_cm2: f64,
    pub optical_phonon_energy_ev: f64,
    pub k_phonon_energy_ev: f64,
    pub sound_velocity_cm_s: f64,
    pub acoustic_deformation_ev: f64,
    pub optical_coupling_ev_cm: f64,
    pub k_coupling_ev_cm: f64,
    pub temperature_k: f64,
    pub screening: Screening,
    /// Oxide substrate data; `None` leaves the substrate mechanisms undefined.
    pub substrate: Option<SubstrateParams>,
}

/// Remote phonon and charged impurity data of an oxide substrate.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstrateParams {
    pub phonon_energy_ev: f64,
    pub phonon_coupling_ev_cm: f64,
    pub impurity_density_cm2: f64,
    pub impurity_distance_nm: f64,
    pub kappa_top: f64,
    pub kappa_bottom: f64,
}

/// How the Fermi wavenumber entering the RPA screening is chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct Screening {
    pub fermi_level_ev: f64,
    /// Carrier density (nm⁻²) used when `|fermi_level_ev|` is below
    /// [`SCREENING_FALLBACK_THRESHOLD`]. `None` keeps the fallback off.
    pub fallback_density_nm2: Option<f64>,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            fermi_velocity_cm_s: 1e8,
            areal_mass_density_g_cm2: 7.6e-8,
            optical_phonon_energy_ev: 0.1646,
            k_phonon_energy_ev: 0.124,
            sound_velocity_cm_s: 2e6,
            acoustic_deformation_ev: 6.8,
            optical_coupling_ev_cm: 1e9,
            k_coupling_ev_cm: 3.5e8,
            temperature_k: 300.0,
            screening: Screening {
                fermi_level_ev: 0.25,
                fallback_density_nm2: None,
            },
            substrate: Some(SubstrateParams::default()),
        }
    }
}

impl Default for SubstrateParams {
    /// SiO₂ below the sheet, vacuum above.
    fn default() -> Self {
        Self {
            phonon_energy_ev: 0.055,
            phonon_coupling_ev_cm: 5.14e7,
            impurity_density_cm2: 2.5e11,
            impurity_distance_nm: 1.0,
            kappa_top: 1.0,
            kappa_bottom: 3.9,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(config(alloc::format!("{name} must be positive, got {v}")))
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        positive("fermi velocity", self.fermi_velocity_cm_s)?;
        positive("areal mass density", self.areal_mass_density_g_cm2)?;
        positive("optical phonon energy", self.optical_phonon_energy_ev)?;
        positive("K phonon energy", self.k_phonon_energy_ev)?;
        positive("sound velocity", self.sound_velocity_cm_s)?;
        positive("acoustic deformation potential", self.acoustic_deformation_ev)?;
        positive("optical coupling", self.optical_coupling_ev_cm)?;
        positive("K coupling", self.k_coupling_ev_cm)?;
        positive("temperature", self.temperature_k)?;
        if !self.screening.fermi_level_ev.is_finite() {
            return Err(config("screening Fermi level must be finite"));
        }
        if let Some(sub) = &self.substrate {
            positive("substrate phonon energy", sub.phonon_energy_ev)?;
            positive("substrate phonon coupling", sub.phonon_coupling_ev_cm)?;
            positive("impurity density", sub.impurity_density_cm2)?;
            positive("dielectric constant above", sub.kappa_top)?;
            positive("dielectric constant below", sub.kappa_bottom)?;
            if !(sub.impurity_distance_nm >= 0.0) {
                return Err(config("impurity distance must be non-negative"));
            }
        }
        Ok(())
    }

    /// v_F in nm/ps.
    pub fn vf(&self) -> f64 {
        self.fermi_velocity_cm_s * 1e-5
    }

    /// ħv_F in eV·nm.
    pub fn hbar_vf(&self) -> f64 {
        HBAR_EV_PS * self.vf()
    }

    /// k_BT in eV.
    pub fn kt(&self) -> f64 {
        BOLTZMANN_EV_K * self.temperature_k
    }

    fn sigma_si(&self) -> f64 {
        self.areal_mass_density_g_cm2 * 10.0
    }

    fn omega_si(energy_ev: f64) -> f64 {
        energy_ev * ELEMENTARY_CHARGE / HBAR_J_S
    }

    fn ev_per_cm_si(d: f64) -> f64 {
        d * 100.0 * ELEMENTARY_CHARGE
    }

    /// Elastic acoustic weight 2n_q|G|²/(1 + cos ϑ) in eV·nm²/ps.
    pub fn acoustic_coupling(&self) -> f64 {
        let d = self.acoustic_deformation_ev * ELEMENTARY_CHARGE;
        let kt = self.kt() * ELEMENTARY_CHARGE;
        let vp = self.sound_velocity_cm_s * 1e-2;
        let si = PI * d * d * kt / (2.0 * HBAR_J_S * self.sigma_si() * vp * vp);
        si / (4.0 * PI * PI) * SI_RATE_TO_INTERNAL
    }

    /// |G_LO|² + |G_TO|² in eV·nm²/ps.
    pub fn optical_coupling(&self) -> f64 {
        let d = Self::ev_per_cm_si(self.optical_coupling_ev_cm);
        let w = Self::omega_si(self.optical_phonon_energy_ev);
        2.0 * PI * d * d / (self.sigma_si() * w) / (4.0 * PI * PI) * SI_RATE_TO_INTERNAL
    }

    /// |G_K|²/(1 − cos ϑ) in eV·nm²/ps.
    pub fn k_coupling(&self) -> f64 {
        let d = Self::ev_per_cm_si(self.k_coupling_ev_cm);
        let w = Self::omega_si(self.k_phonon_energy_ev);
        2.0 * PI * d * d / (self.sigma_si() * w) / (4.0 * PI * PI) * SI_RATE_TO_INTERNAL
    }

    fn require_substrate(&self) -> Result<&SubstrateParams> {
        self.substrate
            .as_ref()
            .ok_or_else(|| config("substrate scattering requested without substrate parameters"))
    }

    /// |G_LO-sub|² + |G_TO-sub|² in eV·nm²/ps.
    pub fn remote_phonon_coupling(&self) -> Result<f64> {
        let sub = self.require_substrate()?;
        let d = Self::ev_per_cm_si(sub.phonon_coupling_ev_cm);
        let w = Self::omega_si(sub.phonon_energy_ev);
        Ok(2.0 * PI * d * d / (self.sigma_si() * w) / (4.0 * PI * PI) * SI_RATE_TO_INTERNAL)
    }

    /// Average relative permittivity (κ_top + κ_bottom)/2.
    pub fn kappa_mean(&self) -> Result<f64> {
        let sub = self.require_substrate()?;
        Ok(0.5 * (sub.kappa_top + sub.kappa_bottom))
    }

    /// Fermi wavenumber used for screening (nm⁻¹).
    pub fn fermi_wavenumber(&self) -> f64 {
        let s = &self.screening;
        match s.fallback_density_nm2 {
            Some(n) if libm::fabs(s.fermi_level_ev) < SCREENING_FALLBACK_THRESHOLD => {
                // k_F = sqrt(4πn/(g_s g_v)) with g_s = g_v = 2
                libm::sqrt(PI * n)
            }
            _ => libm::fabs(s.fermi_level_ev) / self.hbar_vf(),
        }
    }

    /// Thomas–Fermi wavenumber q_s = 4e²k_F/(κ̃ħv_F) in nm⁻¹.
    pub fn thomas_fermi_wavenumber(&self) -> Result<f64> {
        let kappa = self.kappa_mean()?;
        Ok(4.0 * COULOMB_EV_NM / kappa * self.fermi_wavenumber() / self.hbar_vf())
    }

    /// (2π/ħ)·n_i/(2π)² in 1/(eV·ps·nm²).
    pub fn impurity_prefactor(&self) -> Result<f64> {
        let sub = self.require_substrate()?;
        let ni_nm2 = sub.impurity_density_cm2 * 1e-14;
        Ok(2.0 * PI / HBAR_EV_PS * ni_nm2 / (4.0 * PI * PI))
    }
}

/// Occupancy 1/(1 + exp((sε − ε_F)/k_BT)).
pub fn fermi_dirac(energy: f64, fermi_level: f64, band: Band, temperature_k: f64) -> f64 {
    let x = (band.sign() * energy - fermi_level) / (BOLTZMANN_EV_K * temperature_k);
    1.0 / (1.0 + libm::exp(x))
}

/// Phonon occupation 1/(exp(ħω/k_BT) − 1).
pub fn bose_einstein(energy: f64, temperature_k: f64) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::Domain {
            what: "Bose-Einstein occupation",
            value: energy,
        });
    }
    Ok(1.0 / libm::expm1(energy / (BOLTZMANN_EV_K * temperature_k)))
}

/// Static RPA dielectric function of graphene at wavenumber `q` (nm⁻¹).
pub fn rpa_dielectric(q: f64, params: &PhysicalParams) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::Domain {
            what: "RPA dielectric function",
            value: q,
        });
    }
    let kf = params.fermi_wavenumber();
    let qs = params.thomas_fermi_wavenumber()?;
    let two_kf = 2.0 * kf;
    Ok(if q < two_kf {
        1.0 + qs / q - PI * qs / (8.0 * kf)
    } else {
        1.0 + qs / q
            - qs * libm::sqrt(q * q - two_kf * two_kf) / (2.0 * q * q)
            - qs / (4.0 * kf) * libm::asin(two_kf / q)
    })
}

/// Squared screened impurity amplitude |V_i(q, d)/ϵ(q)|² in eV²·nm⁴.
pub fn impurity_potential(q: f64, distance_nm: f64, params: &PhysicalParams) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::Domain {
            what: "impurity potential",
            value: q,
        });
    }
    let e2 = COULOMB_EV_NM / params.kappa_mean()?;
    let v = 2.0 * PI * e2 * libm::exp(-distance_nm * q) / q;
    let r = v / rpa_dielectric(q, params)?;
    Ok(r * r)
}

/// Limit of [`impurity_potential`] as q → 0, where ϵ ~ q_s/q cancels the 1/q.
pub fn impurity_potential_at_zero(params: &PhysicalParams) -> Result<f64> {
    let e2 = COULOMB_EV_NM / params.kappa_mean()?;
    let r = 2.0 * PI * e2 / params.thomas_fermi_wavenumber()?;
    Ok(r * r)
}

/// Scattering mechanisms of the collision operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanismKind {
    Acoustic,
    Optical,
    KPhonon,
    RemoteOxide,
    Impurity,
}

impl MechanismKind {
    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::Acoustic => "acoustic",
            MechanismKind::Optical => "optical",
            MechanismKind::KPhonon => "k-phonon",
            MechanismKind::RemoteOxide => "remote-oxide",
            MechanismKind::Impurity => "impurity",
        }
    }
}

/// One mechanism with a kernel of the form D + E·cos ϑ.
///
/// `d_coeff` and `e_coeff` are in eV·nm²/ps and already include 1/(2π)².
/// For the impurity mechanism both are zero; its kernel is tabulated by
/// quadrature instead.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismSpec {
    pub kind: MechanismKind,
    pub phonon_energy: f64,
    pub occupation: f64,
    pub d_coeff: f64,
    pub e_coeff: f64,
    pub interband: bool,
    pub substrate_only: bool,
}

/// Mechanisms active for the given substrate setting.
pub fn mechanisms(params: &PhysicalParams, substrate_on: bool) -> Result<alloc::vec::Vec<MechanismSpec>> {
    params.validate()?;
    let t = params.temperature_k;
    let c_ac = params.acoustic_coupling();
    let c_o = params.optical_coupling();
    let c_k = params.k_coupling();
    let mut out = alloc::vec![
        MechanismSpec {
            kind: MechanismKind::Acoustic,
            phonon_energy: 0.0,
            occupation: 0.0,
            d_coeff: c_ac,
            e_coeff: c_ac,
            interband: false,
            substrate_only: false,
        },
        MechanismSpec {
            kind: MechanismKind::Optical,
            phonon_energy: params.optical_phonon_energy_ev,
            occupation: bose_einstein(params.optical_phonon_energy_ev, t)?,
            d_coeff: c_o,
            e_coeff: 0.0,
            interband: true,
            substrate_only: false,
        },
        MechanismSpec {
            kind: MechanismKind::KPhonon,
            phonon_energy: params.k_phonon_energy_ev,
            occupation: bose_einstein(params.k_phonon_energy_ev, t)?,
            d_coeff: c_k,
            e_coeff: -c_k,
            interband: true,
            substrate_only: false,
        },
    ];
    if substrate_on {
        let sub = params.require_substrate()?;
        out.push(MechanismSpec {
            kind: MechanismKind::RemoteOxide,
            phonon_energy: sub.phonon_energy_ev,
            occupation: bose_einstein(sub.phonon_energy_ev, t)?,
            d_coeff: params.remote_phonon_coupling()?,
            e_coeff: 0.0,
            interband: true,
            substrate_only: true,
        });
        out.push(MechanismSpec {
            kind: MechanismKind::Impurity,
            phonon_energy: 0.0,
            occupation: 0.0,
            d_coeff: 0.0,
            e_coeff: 0.0,
            interband: false,
            substrate_only: true,
        });
    }
    Ok(out)
}
