//! Momentum grid, single-mode Bogoliubov data, quasiparticle dispersion,
//! spectral gap, and the empirical critical-field heuristic.

use crate::couplings::{fourier_couplings, CouplingSpec};
use crate::error::{Error, Result};

/// Momentum grid `k_n = 2 pi n / N` for `n = -N/2+1, ..., N/2`, ascending.
/// Contains `k = 0` and `k = pi`; `-pi` is excluded.
pub fn momentum_grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "momentum grid requires even n >= 2, got {n}"
        )));
    }
    let half = n as i64 / 2;
    let nf = n as f64;
    Ok((-half + 1..=half)
        .map(|m| {
            if m == half {
                // bit-exact pi at the zone edge
                std::f64::consts::PI
            } else {
                2.0 * std::f64::consts::PI * m as f64 / nf
            }
        })
        .collect())
}

/// One momentum mode at a given field: couplings, Bogoliubov angle, energy.
#[derive(Debug, Clone, Copy)]
pub struct MomentumMode {
    pub k: f64,
    pub t: f64,
    pub delta: f64,
    pub theta: f64,
    pub omega: f64,
}

/// Quasiparticle energy `omega_k(h) = 2 sqrt((h - t_k)^2 + delta_k^2)`.
pub fn dispersion(k: f64, h: f64, spec: &CouplingSpec) -> f64 {
    let (t, d) = fourier_couplings(k, spec);
    2.0 * (h - t).hypot(d)
}

/// Bogoliubov angle via the two-argument arctangent of `(delta_k, h - t_k)`,
/// so that `2(h - t_k) = omega_k cos(theta)` and `2 delta_k = omega_k sin(theta)`
/// hold in every quadrant. Fails on an exactly gapless mode, where the
/// angle is undefined.
pub fn bogoliubov_angle(k: f64, h: f64, spec: &CouplingSpec) -> Result<f64> {
    let (t, d) = fourier_couplings(k, spec);
    if h - t == 0.0 && d == 0.0 {
        return Err(Error::Domain(format!(
            "Bogoliubov angle undefined for gapless mode k={k} at h={h}"
        )));
    }
    Ok(d.atan2(h - t))
}

/// Full mode data at `(k, h)`.
pub fn momentum_mode(k: f64, h: f64, spec: &CouplingSpec) -> Result<MomentumMode> {
    let (t, d) = fourier_couplings(k, spec);
    if h - t == 0.0 && d == 0.0 {
        return Err(Error::Domain(format!(
            "Bogoliubov angle undefined for gapless mode k={k} at h={h}"
        )));
    }
    Ok(MomentumMode {
        k,
        t,
        delta: d,
        theta: d.atan2(h - t),
        omega: 2.0 * (h - t).hypot(d),
    })
}

/// Precomputed `(k, t_k, delta_k)` table over the full grid. Immutable
/// after construction; `omega` evaluates the dispersion at any field
/// without recomputing the coupling sums.
#[derive(Debug, Clone)]
pub struct ModeTable {
    pub k: Vec<f64>,
    pub t: Vec<f64>,
    pub delta: Vec<f64>,
}

impl ModeTable {
    pub fn new(spec: &CouplingSpec) -> Result<Self> {
        let grid = momentum_grid(spec.n)?;
        let mut t = Vec::with_capacity(grid.len());
        let mut delta = Vec::with_capacity(grid.len());
        for &k in &grid {
            let (tk, dk) = fourier_couplings(k, spec);
            t.push(tk);
            delta.push(dk);
        }
        Ok(Self { k: grid, t, delta })
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// Mode energies `omega_k(h)` in grid order.
    pub fn omega(&self, h: f64) -> Vec<f64> {
        self.t
            .iter()
            .zip(&self.delta)
            .map(|(&t, &d)| 2.0 * (h - t).hypot(d))
            .collect()
    }
}

/// Minimum of the dispersion over the momentum grid.
pub fn spectral_gap(h: f64, spec: &CouplingSpec) -> Result<f64> {
    let table = ModeTable::new(spec)?;
    Ok(table.omega(h).into_iter().fold(f64::INFINITY, f64::min))
}

/// Empirical critical field of the ferro-to-paramagnetic transition:
/// `h_c = 1` for `alpha <= 1`, `0.35 (3.2 - alpha)` for `1 < alpha < 2`.
///
/// This is a labeling heuristic (used to split peak-search windows); it is
/// never used inside thermodynamic formulas. The interpolation jumps at
/// `alpha = 1` and is not valid at or above `alpha = 2`.
pub fn critical_field(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!(
            "critical-field heuristic valid only for 0 < alpha < 2, got {alpha}"
        )));
    }
    if alpha <= 1.0 {
        Ok(1.0)
    } else {
        Ok(0.35 * (3.2 - alpha))
    }
}
