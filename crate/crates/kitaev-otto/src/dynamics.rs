//! Dissipative occupation relaxation under the global (quasiparticle-local)
//! master equation, thermal internal energy, and the slow-ramp
//! adiabaticity diagnostic.

use ndarray::Array2;

use crate::couplings::CouplingSpec;
use crate::error::{Error, Result};
use crate::spectrum::ModeTable;

/// Thermal reservoirs coupled to quasiparticle modes: `temperatures[n]`
/// and a rate matrix `rates[[n, k]] >= 0` (bath `n`, mode `k`).
#[derive(Debug, Clone)]
pub struct BathSpec {
    pub temperatures: Vec<f64>,
    pub rates: Array2<f64>,
}

impl BathSpec {
    pub fn new(temperatures: Vec<f64>, rates: Array2<f64>) -> Result<Self> {
        if temperatures.is_empty() {
            return Err(Error::Config("at least one bath is required".into()));
        }
        if temperatures.iter().any(|&t| !t.is_finite() || t <= 0.0) {
            return Err(Error::Config("bath temperatures must be positive".into()));
        }
        if rates.nrows() != temperatures.len() {
            return Err(Error::Config(format!(
                "rate matrix has {} rows for {} baths",
                rates.nrows(),
                temperatures.len()
            )));
        }
        if rates.iter().any(|&g| g < 0.0 || !g.is_finite()) {
            return Err(Error::Config("rates must be non-negative".into()));
        }
        Ok(Self {
            temperatures,
            rates,
        })
    }

    /// Uniform rate `gamma0` for every bath and mode.
    pub fn uniform(temperatures: Vec<f64>, gamma0: f64, n_modes: usize) -> Result<Self> {
        let n_baths = temperatures.len();
        Self::new(temperatures, Array2::from_elem((n_baths, n_modes), gamma0))
    }

    pub fn n_modes(&self) -> usize {
        self.rates.ncols()
    }

    /// Total decay rate `sum_n gamma_{nk}` for mode `k`.
    pub fn gamma_sum(&self, k: usize) -> f64 {
        (0..self.temperatures.len())
            .map(|n| self.rates[[n, k]])
            .sum()
    }
}

/// Linear field ramp `h(t) = h_start + v t` (or decreasing, run backward).
#[derive(Debug, Clone, Copy)]
pub struct RampSpec {
    pub h_start: f64,
    pub h_end: f64,
    pub velocity: f64,
}

impl RampSpec {
    pub fn new(h_start: f64, h_end: f64, velocity: f64) -> Result<Self> {
        if !velocity.is_finite() || velocity <= 0.0 {
            return Err(Error::Domain(format!(
                "ramp velocity must be positive, got {velocity}"
            )));
        }
        if !h_start.is_finite() || !h_end.is_finite() {
            return Err(Error::Domain("ramp endpoints must be finite".into()));
        }
        Ok(Self {
            h_start,
            h_end,
            velocity,
        })
    }
}

/// Rate-weighted bath occupation
/// `f~_k = sum_n gamma_{nk} f_n(omega) / sum_n gamma_{nk}`.
pub fn bath_average(bath: &BathSpec, omega: f64, k: usize) -> Result<f64> {
    if k >= bath.n_modes() {
        return Err(Error::Config(format!(
            "mode index {k} out of range for {} modes",
            bath.n_modes()
        )));
    }
    let total = bath.gamma_sum(k);
    if total <= 0.0 {
        return Err(Error::Config(format!(
            "all coupling rates vanish for mode {k}"
        )));
    }
    let mut acc = 0.0;
    for (n, &t) in bath.temperatures.iter().enumerate() {
        acc += bath.rates[[n, k]] * crate::otto::fermi_occupation(t, omega);
    }
    Ok(acc / total)
}

/// Occupation relaxation
/// `n(t) = f~ (1 - e^{-2 gamma t}) + n0 e^{-2 gamma t}`, computed in the
/// contraction form `f~ + (n0 - f~) e^{-2 gamma t}` so that
/// `|n(t) - f~| = |n0 - f~| e^{-2 gamma t}` holds to rounding error.
pub fn occupation_at(t: f64, n0: f64, f_tilde: f64, gamma_sum: f64) -> f64 {
    debug_assert!(t >= 0.0 && gamma_sum > 0.0);
    f_tilde + (n0 - f_tilde) * (-2.0 * gamma_sum * t).exp()
}

/// Internal energy `sum_k omega_k (n_k - 1/2)` of a set of mode
/// occupations. Any additive offset of the underlying Hamiltonian is the
/// caller's to add.
pub fn internal_energy(occupations: &[f64], omegas: &[f64]) -> Result<f64> {
    if occupations.len() != omegas.len() {
        return Err(Error::Config(format!(
            "{} occupations for {} mode energies",
            occupations.len(),
            omegas.len()
        )));
    }
    Ok(occupations
        .iter()
        .zip(omegas)
        .map(|(&n, &w)| w * (n - 0.5))
        .sum())
}

/// Per-mode adiabaticity estimate for a linear ramp.
#[derive(Debug, Clone, Copy)]
pub struct ModeAdiabaticity {
    pub k: f64,
    /// Transition-probability estimate; meaningful when well below 1.
    pub p: f64,
    /// Set when the mode closes its gap inside the ramp window, where the
    /// adiabatic theorem gives no guarantee. Such modes have no coupling
    /// between their two levels (`delta_k = 0`), so `p` is still 0.
    pub gapless: bool,
}

#[derive(Debug, Clone)]
pub struct AdiabaticityReport {
    pub modes: Vec<ModeAdiabaticity>,
    /// Largest estimate over the gapped modes.
    pub max_p: f64,
}

/// Slow-ramp diagnostic. Each momentum mode is a two-level problem with
/// gap `omega_k(h)` and field-derivative matrix element `2 delta_k /
/// omega_k` between its levels, so first-order adiabatic perturbation
/// theory bounds the transition probability by
///
/// ```text
/// P_k = v^2 (2 delta_k)^2 / omega_k^6
/// ```
///
/// evaluated at the minimum-gap field along the ramp (worst case). The
/// estimate scales exactly as `v^2` and vanishes identically for the
/// uncoupled `delta_k = 0` modes. The ramp is effectively adiabatic when
/// `max_p` is far below 1.
pub fn adiabaticity_metric(ramp: &RampSpec, spec: &CouplingSpec) -> Result<AdiabaticityReport> {
    let table = ModeTable::new(spec)?;
    let lo = ramp.h_start.min(ramp.h_end);
    let hi = ramp.h_start.max(ramp.h_end);
    let mut modes = Vec::with_capacity(table.len());
    let mut max_p = 0.0f64;
    for i in 0..table.len() {
        let (k, t, d) = (table.k[i], table.t[i], table.delta[i]);
        // the gap 2 sqrt((h-t)^2 + d^2) is smallest at h = t, clamped to the ramp
        let h_star = t.clamp(lo, hi);
        let omega = 2.0 * (h_star - t).hypot(d);
        if d == 0.0 {
            let gapless = omega == 0.0;
            modes.push(ModeAdiabaticity { k, p: 0.0, gapless });
            continue;
        }
        let p = ramp.velocity.powi(2) * (2.0 * d).powi(2) / omega.powi(6);
        max_p = max_p.max(p);
        modes.push(ModeAdiabaticity {
            k,
            p,
            gapless: false,
        });
    }
    Ok(AdiabaticityReport { modes, max_p })
}
