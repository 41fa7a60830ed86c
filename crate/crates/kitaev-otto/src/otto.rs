//! Ideal Otto-cycle thermodynamics: occupations, heats, work,
//! efficiencies, operation-mode classification, Carnot bounds, and the
//! near-Carnot scaling factors.
//!
//! Cycle convention: the working substance thermalizes with the **hot**
//! bath while the field sits at `h_f` and with the **cold** bath at `h_i`
//! (`h_i <= h_f`). Heats are positive when absorbed by the system, and
//! `W = Q_h + Q_c` is the work output. Temperatures (not inverse
//! temperatures) are the interface; `k_B = hbar = 1`.

use crate::bdg::{build_quadratic, diagonalize};
use crate::couplings::{Boundary, CouplingSpec};
use crate::error::{Error, Result};
use crate::spectrum::{dispersion, ModeTable};

/// Cycle parameters. `eps` is the relative tolerance used to classify
/// operation modes and detect Carnot poles.
#[derive(Debug, Clone, Copy)]
pub struct CycleParams {
    pub h_i: f64,
    pub h_f: f64,
    pub t_c: f64,
    pub t_h: f64,
    pub eps: f64,
}

impl CycleParams {
    pub const DEFAULT_EPS: f64 = 1e-12;

    /// `T_h >= T_c > 0` and `h_f >= h_i` are required. Equal temperatures
    /// or equal fields give a degenerate but well-defined cycle; the
    /// strict inequalities are the convention of interest.
    pub fn new(h_i: f64, h_f: f64, t_c: f64, t_h: f64, eps: f64) -> Result<Self> {
        for (name, x) in [("h_i", h_i), ("h_f", h_f), ("T_c", t_c), ("T_h", t_h)] {
            if !x.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {x}")));
            }
        }
        if t_c <= 0.0 {
            return Err(Error::Domain(format!("T_c must be positive, got {t_c}")));
        }
        if t_h < t_c {
            return Err(Error::Domain(format!(
                "temperatures must satisfy T_h >= T_c, got T_h={t_h}, T_c={t_c}"
            )));
        }
        if h_f < h_i {
            return Err(Error::Domain(format!(
                "fields must satisfy h_f >= h_i, got h_i={h_i}, h_f={h_f}"
            )));
        }
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        Ok(Self {
            h_i,
            h_f,
            t_c,
            t_h,
            eps,
        })
    }

    pub fn with_delta_h(h_i: f64, delta_h: f64, t_c: f64, t_h: f64) -> Result<Self> {
        Self::new(h_i, h_i + delta_h, t_c, t_h, Self::DEFAULT_EPS)
    }
}

/// Operation mode of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Engine,
    Refrigerator,
    Accelerator,
    Heater,
    Unclassified,
}

impl Mode {
    /// Single-letter label used in tabular output.
    pub fn letter(self) -> &'static str {
        match self {
            Mode::Engine => "E",
            Mode::Refrigerator => "R",
            Mode::Accelerator => "A",
            Mode::Heater => "H",
            Mode::Unclassified => "U",
        }
    }
}

/// Full outcome of one cycle. `eta` is present exactly in engine mode,
/// `eta_r` exactly in refrigerator mode, and the per-spin scaling factors
/// only in their modes with a strict thermal bias.
#[derive(Debug, Clone, Copy)]
pub struct CycleOutcome {
    pub q_h: f64,
    pub q_c: f64,
    pub w: f64,
    pub eta: Option<f64>,
    pub eta_r: Option<f64>,
    pub mode: Mode,
    pub pi_per_spin: Option<f64>,
    pub pi_r_per_spin: Option<f64>,
}

/// Fermi-Dirac occupation `1/(1 + e^{omega/T})`, overflow-safe for large
/// `omega/T`. Requires `T > 0`.
pub fn fermi_occupation(t: f64, omega: f64) -> f64 {
    debug_assert!(t > 0.0);
    let e = (-omega / t).exp();
    e / (1.0 + e)
}

/// Per-mode occupation difference
/// `f(T_h, omega_k(h_f)) - f(T_c, omega_k(h_i))`.
pub fn delta_f(k: f64, params: &CycleParams, spec: &CouplingSpec) -> f64 {
    fermi_occupation(params.t_h, dispersion(k, params.h_f, spec))
        - fermi_occupation(params.t_c, dispersion(k, params.h_i, spec))
}

/// Mode energies at field `h`, in a fixed order shared between fields.
///
/// Translation-invariant periodic chains use the momentum grid (one energy
/// per grid `k`, in grid order). Open or disordered chains go through the
/// Nambu diagonalization: energies `2 eps_mu` ascending, which is the
/// adiabatic pairing when the single-particle levels do not cross.
pub fn mode_energies(spec: &CouplingSpec, h: f64) -> Result<Vec<f64>> {
    if spec.boundary == Boundary::Periodic && spec.disorder.is_none() {
        Ok(ModeTable::new(spec)?.omega(h))
    } else {
        Ok(diagonalize(&build_quadratic(spec, h)?)?.quasiparticle_energies())
    }
}

/// The three cycle sums
/// `Q_h = sum omega(h_f) df`, `Q_c = -sum omega(h_i) df`,
/// `W = sum (omega(h_f) - omega(h_i)) df`.
pub fn cycle_heats(params: &CycleParams, spec: &CouplingSpec) -> Result<(f64, f64, f64)> {
    let omega_i = mode_energies(spec, params.h_i)?;
    let omega_f = mode_energies(spec, params.h_f)?;
    let mut q_h = 0.0;
    let mut q_c = 0.0;
    let mut w = 0.0;
    for (&wi, &wf) in omega_i.iter().zip(&omega_f) {
        let df = fermi_occupation(params.t_h, wf) - fermi_occupation(params.t_c, wi);
        q_h += wf * df;
        q_c -= wi * df;
        w += (wf - wi) * df;
    }
    Ok((q_h, q_c, w))
}

/// Sign-pattern classification with relative tolerance
/// `eps' = eps (|Q_h| + |Q_c| + |W| + 1e-300)`; outcomes with no component
/// beyond the tolerance stay unclassified.
pub fn classify_mode(q_h: f64, q_c: f64, w: f64, eps: f64) -> Mode {
    let tol = eps * (q_h.abs() + q_c.abs() + w.abs() + 1e-300);
    if q_c > tol && q_h < -tol && w < -tol {
        Mode::Refrigerator
    } else if q_c < -tol && q_h > tol && w < -tol {
        Mode::Accelerator
    } else if q_c < -tol && q_h > tol && w > tol {
        Mode::Engine
    } else if q_c < -tol && q_h < -tol && w < -tol {
        Mode::Heater
    } else {
        Mode::Unclassified
    }
}

/// `eta = W/Q_h` in engine mode, `eta_R = Q_c/|W|` in refrigerator mode,
/// absent otherwise.
pub fn efficiencies(q_h: f64, q_c: f64, w: f64, mode: Mode) -> (Option<f64>, Option<f64>) {
    match mode {
        Mode::Engine => (Some(w / q_h), None),
        Mode::Refrigerator => (None, Some(q_c / w.abs())),
        _ => (None, None),
    }
}

/// Carnot efficiency `1 - T_c/T_h`; requires a strict thermal bias.
pub fn carnot(t_c: f64, t_h: f64) -> Result<f64> {
    if t_h.is_nan() || t_c.is_nan() || t_h <= t_c || t_c <= 0.0 {
        return Err(Error::Domain(format!(
            "Carnot bound needs T_h > T_c > 0, got T_h={t_h}, T_c={t_c}"
        )));
    }
    Ok(1.0 - t_c / t_h)
}

/// Carnot coefficient of performance `1/(T_h/T_c - 1)`.
pub fn carnot_refrigerator(t_c: f64, t_h: f64) -> Result<f64> {
    if t_h.is_nan() || t_c.is_nan() || t_h <= t_c || t_c <= 0.0 {
        return Err(Error::Domain(format!(
            "Carnot bound needs T_h > T_c > 0, got T_h={t_h}, T_c={t_c}"
        )));
    }
    Ok(1.0 / (t_h / t_c - 1.0))
}

/// Engine scaling factor per spin `[W / (eta_C - W/Q_h)] / N`.
///
/// A denominator within `eps (1 + eta_C)` of zero (a Carnot-saturating
/// cycle) is a pole and is reported as an error, never clipped.
pub fn scaling_factor(w: f64, q_h: f64, t_c: f64, t_h: f64, n: usize, eps: f64) -> Result<f64> {
    let eta_c = carnot(t_c, t_h)?;
    let den = eta_c - w / q_h;
    if den <= eps * (1.0 + eta_c) {
        return Err(Error::Domain(format!(
            "scaling factor pole: efficiency within {eps:e} of the Carnot bound"
        )));
    }
    Ok(w / den / n as f64)
}

/// Refrigerator scaling factor per spin `[Q_c / (eta_RC - Q_c/|W|)] / N`.
pub fn scaling_factor_refrigerator(
    q_c: f64,
    w: f64,
    t_c: f64,
    t_h: f64,
    n: usize,
    eps: f64,
) -> Result<f64> {
    let eta_rc = carnot_refrigerator(t_c, t_h)?;
    let den = eta_rc - q_c / w.abs();
    if den <= eps * (1.0 + eta_rc) {
        return Err(Error::Domain(format!(
            "refrigerator scaling factor pole: COP within {eps:e} of the Carnot bound"
        )));
    }
    Ok(q_c / den / n as f64)
}

/// Run one full cycle: heats, classification, efficiencies, and (where the
/// mode and a strict thermal bias allow) the per-spin scaling factors.
pub fn run_cycle(params: &CycleParams, spec: &CouplingSpec) -> Result<CycleOutcome> {
    let (q_h, q_c, w) = cycle_heats(params, spec)?;
    let mode = classify_mode(q_h, q_c, w, params.eps);
    let (eta, eta_r) = efficiencies(q_h, q_c, w, mode);
    let biased = params.t_h > params.t_c;
    let pi_per_spin = match mode {
        Mode::Engine if biased => Some(scaling_factor(
            w, q_h, params.t_c, params.t_h, spec.n, params.eps,
        )?),
        _ => None,
    };
    let pi_r_per_spin = match mode {
        Mode::Refrigerator if biased => Some(scaling_factor_refrigerator(
            q_c, w, params.t_c, params.t_h, spec.n, params.eps,
        )?),
        _ => None,
    };
    Ok(CycleOutcome {
        q_h,
        q_c,
        w,
        eta,
        eta_r,
        mode,
        pi_per_spin,
        pi_r_per_spin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn draw_case(rng: &mut ChaCha8Rng) -> (CouplingSpec, CycleParams) {
        let n = 2 * rng.random_range(2..=50usize);
        let alpha = rng.random_range(0.01..3.0);
        let spec = CouplingSpec::uniform(n, alpha).unwrap();
        let (a, b) = (rng.random_range(0.0..2.5), rng.random_range(0.0..2.5));
        let (h_i, h_f) = if a <= b { (a, b) } else { (b, a) };
        let (c, d) = (rng.random_range(0.1..5.0), rng.random_range(0.1..5.0));
        let (t_c, t_h) = if c <= d { (c, d) } else { (d, c) };
        let params = CycleParams::new(h_i, h_f, t_c, t_h + 1e-6, CycleParams::DEFAULT_EPS).unwrap();
        (spec, params)
    }

    #[test]
    fn fermi_occupation_values() {
        assert_eq!(fermi_occupation(0.7, 0.0), 0.5);
        assert_eq!(fermi_occupation(1e-9, 1.0), 0.0);
        assert_abs_diff_eq!(
            fermi_occupation(1.0, 2.0),
            1.0 / (1.0 + 2f64.exp()),
            epsilon = 1e-15
        );
        // overflow-safe far into the tail
        assert_eq!(fermi_occupation(1e-3, 1e6), 0.0);
        assert!(fermi_occupation(5.0, 1e-12) <= 0.5);
    }

    #[test]
    fn delta_f_degenerate_cases() {
        let spec = CouplingSpec::uniform(8, 0.7).unwrap();
        let p = CycleParams::new(0.6, 0.6, 0.4, 0.4, 1e-12).unwrap();
        for &k in &crate::spectrum::momentum_grid(8).unwrap() {
            assert_eq!(delta_f(k, &p, &spec), 0.0);
        }
    }

    #[test]
    fn delta_f_matches_two_level_oracle_per_mode() {
        // the mode's hot-stroke heat is omega_f * delta_f, so the oracle's
        // per-mode trace difference pins delta_f mode by mode
        let spec = CouplingSpec::uniform(4, 30.0).unwrap();
        let p = CycleParams::new(0.5, 1.0, 0.38, 0.57, 1e-12).unwrap();
        let table = crate::spectrum::ModeTable::new(&spec).unwrap();
        for i in 0..table.len() {
            let k = table.k[i];
            let (q_h_mode, _, _) = crate::oracle::two_level_cycle(table.t[i], table.delta[i], &p);
            let omega_f = crate::spectrum::dispersion(k, p.h_f, &spec);
            assert!(omega_f > 0.0);
            assert_abs_diff_eq!(delta_f(k, &p, &spec), q_h_mode / omega_f, epsilon = 1e-13);
        }
    }

    #[test]
    fn heats_no_thermal_bias_forbids_engine() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = 2 * rng.random_range(2..=20usize);
            let spec = CouplingSpec::uniform(n, rng.random_range(0.1..2.5)).unwrap();
            let t = rng.random_range(0.2..3.0);
            let (a, b) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
            let (h_i, h_f) = if a <= b { (a, b) } else { (b, a) };
            let p = CycleParams::new(h_i, h_f, t, t, 1e-12).unwrap();
            let (q_h, q_c, w) = cycle_heats(&p, &spec).unwrap();
            assert!(w <= 1e-12 * (q_h.abs() + q_c.abs() + 1.0));
            assert_ne!(classify_mode(q_h, q_c, w, 1e-12), Mode::Engine);
        }
    }

    #[test]
    fn heats_equal_fields() {
        let spec = CouplingSpec::uniform(12, 0.4).unwrap();
        let p = CycleParams::new(0.8, 0.8, 0.38, 0.57, 1e-12).unwrap();
        let (q_h, q_c, w) = cycle_heats(&p, &spec).unwrap();
        assert_abs_diff_eq!(w, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q_h, -q_c, epsilon = 1e-14);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_mode(1.0, -0.5, 0.5, 1e-12), Mode::Engine);
        assert_eq!(classify_mode(-1.0, 0.4, -0.6, 1e-12), Mode::Refrigerator);
        assert_eq!(classify_mode(1.0, -1.4, -0.4, 1e-12), Mode::Accelerator);
        assert_eq!(classify_mode(-1.0, -0.4, -1.4, 1e-12), Mode::Heater);
        assert_eq!(classify_mode(0.0, 0.0, 0.0, 1e-12), Mode::Unclassified);
    }

    #[test]
    fn efficiency_examples() {
        let (eta, _) = efficiencies(1.0, -0.75, 0.25, Mode::Engine);
        assert_abs_diff_eq!(eta.unwrap(), 0.25, epsilon = 1e-15);
        let (_, eta_r) = efficiencies(-1.0, 0.4, -0.6, Mode::Refrigerator);
        assert_abs_diff_eq!(eta_r.unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(
            efficiencies(1.0, -1.4, -0.4, Mode::Accelerator),
            (None, None)
        );
    }

    #[test]
    fn carnot_values() {
        assert_abs_diff_eq!(carnot(0.5, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(carnot_refrigerator(0.5, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            carnot(1.11, 5.0).unwrap(),
            1.0 - 1.11 / 5.0,
            epsilon = 1e-15
        );
        assert!(carnot(1.0, 1.0).is_err());
        assert!(carnot_refrigerator(2.0, 1.0).is_err());
    }

    #[test]
    fn scaling_factor_algebra() {
        // W = 0 gives zero
        assert_eq!(scaling_factor(0.0, 1.0, 0.5, 1.0, 10, 1e-12).unwrap(), 0.0);
        // eta = eta_C/2 gives 2w/(eta_C N)
        let eta_c = carnot(0.5, 1.0).unwrap();
        let w = 0.3;
        let q_h = w / (eta_c / 2.0);
        let got = scaling_factor(w, q_h, 0.5, 1.0, 10, 1e-12).unwrap();
        assert_abs_diff_eq!(got, 2.0 * w / (eta_c * 10.0), epsilon = 1e-13);
        // saturating the bound is a pole, not a value
        let q_sat = w / eta_c;
        assert!(scaling_factor(w, q_sat, 0.5, 1.0, 10, 1e-12).is_err());
    }

    #[test]
    fn first_law_and_clausius_over_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let (spec, p) = draw_case(&mut rng);
            let (q_h, q_c, w) = cycle_heats(&p, &spec).unwrap();
            assert!((q_h + q_c - w).abs() <= 1e-10 * (q_h.abs() + q_c.abs() + 1e-300));
            assert!(q_h / p.t_h + q_c / p.t_c <= 1e-12);
            // second-law bounds per mode
            let out = run_cycle(&p, &spec).unwrap();
            if let Some(eta) = out.eta {
                assert!(eta > 0.0);
                assert!(eta <= carnot(p.t_c, p.t_h).unwrap() + 1e-10);
            }
            if let Some(eta_r) = out.eta_r {
                assert!(eta_r > 0.0);
                assert!(eta_r <= carnot_refrigerator(p.t_c, p.t_h).unwrap() + 1e-10);
            }
        }
    }

    #[test]
    fn mode_completeness_for_resolved_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut resolved = 0;
        for _ in 0..500 {
            let (spec, p) = draw_case(&mut rng);
            let (q_h, q_c, w) = cycle_heats(&p, &spec).unwrap();
            let tol = 1e3 * p.eps * (q_h.abs() + q_c.abs() + w.abs() + 1e-300);
            if q_h.abs() > tol && q_c.abs() > tol && w.abs() > tol {
                resolved += 1;
                assert_ne!(
                    classify_mode(q_h, q_c, w, p.eps),
                    Mode::Unclassified,
                    "q_h={q_h} q_c={q_c} w={w}"
                );
            }
        }
        assert!(resolved > 300, "draws mostly degenerate: {resolved}");
    }

    #[test]
    fn extensivity_for_short_range_couplings() {
        // W/N drift on doubling N; holds at the stated rate for
        // short-range exponents (convergence is slower for alpha <~ 2)
        for alpha in [3.0, 30.0] {
            for h_i in [0.4, 1.3] {
                let p = CycleParams::new(h_i, h_i + 0.5, 0.38, 0.57, 1e-12).unwrap();
                let mut w_per_spin = Vec::new();
                for n in [50usize, 100] {
                    let spec = CouplingSpec::uniform(n, alpha).unwrap();
                    let (_, _, w) = cycle_heats(&p, &spec).unwrap();
                    w_per_spin.push(w / n as f64);
                }
                let rel = (w_per_spin[1] - w_per_spin[0]).abs() / w_per_spin[0].abs();
                assert!(rel < 0.02, "alpha={alpha} h_i={h_i}: rel drift {rel}");
            }
        }
    }

    #[test]
    fn open_boundary_route_is_consistent() {
        // the BdG route must satisfy the same structural laws
        let spec = CouplingSpec::uniform_with_boundary(10, 0.7, Boundary::Open).unwrap();
        let p = CycleParams::new(0.5, 1.0, 0.38, 0.57, 1e-12).unwrap();
        let (q_h, q_c, w) = cycle_heats(&p, &spec).unwrap();
        assert!((q_h + q_c - w).abs() <= 1e-12 * (q_h.abs() + q_c.abs() + 1e-300));
        assert!(q_h / p.t_h + q_c / p.t_c <= 1e-12);
    }

    #[test]
    fn run_cycle_reference_point_is_classified() {
        let spec = CouplingSpec::uniform(100, 0.25).unwrap();
        let p = CycleParams::with_delta_h(0.5, 0.5, 0.38, 0.57).unwrap();
        let out = run_cycle(&p, &spec).unwrap();
        assert_ne!(out.mode, Mode::Unclassified);
        assert_eq!(out.eta.is_some(), out.mode == Mode::Engine);
        assert_eq!(out.eta_r.is_some(), out.mode == Mode::Refrigerator);
    }
}
