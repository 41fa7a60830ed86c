//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured numbers (run with `--nocapture` to see them all).
//!
//! Run single-threaded for readable output:
//! `cargo test --test acceptance -- --nocapture --test-threads=1`

use kitaev_otto::bdg::{diagonalize, particle_hole_check, QuadraticForm};
use kitaev_otto::couplings::{Boundary, CouplingSpec};
use kitaev_otto::dynamics::{adiabaticity_metric, occupation_at, RampSpec};
use kitaev_otto::oracle::{
    nn_chain_form, quasiparticle_spectrum, spin_ed_tfim, two_level_cycle_sum,
};
use kitaev_otto::otto::{
    carnot, carnot_refrigerator, cycle_heats, fermi_occupation, run_cycle, CycleParams, Mode,
};
use kitaev_otto::spectrum::ModeTable;
use kitaev_otto::sweep::{
    peak_scaling, regress_exponent, run_map, Axis, AxisName, Observable, SweepBase,
};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn draw_even_n(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    2 * rng.random_range(lo / 2..=hi / 2)
}

// the draw family shared by criteria 1 and 2
fn draw_case(rng: &mut ChaCha8Rng) -> (CouplingSpec, CycleParams) {
    let n = draw_even_n(rng, 4, 100);
    let alpha = rng.random_range(0.01..=3.0);
    let spec = CouplingSpec::uniform(n, alpha).unwrap();
    let (a, b) = (rng.random_range(0.0..2.5), rng.random_range(0.0..2.5));
    let (h_i, h_f) = if a <= b { (a, b) } else { (b, a) };
    let (t_c, t_h) = loop {
        let (c, d) = (rng.random_range(0.1..5.0), rng.random_range(0.1..5.0));
        if c != d {
            break if c < d { (c, d) } else { (d, c) };
        }
    };
    let params = CycleParams::new(h_i, h_f, t_c, t_h, CycleParams::DEFAULT_EPS).unwrap();
    (spec, params)
}

#[test]
fn acceptance_01_first_law() {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (spec, params) = draw_case(&mut rng);
        let (q_h, q_c, w) = cycle_heats(&params, &spec).unwrap();
        let rel = (q_h + q_c - w).abs() / (q_h.abs() + q_c.abs() + 1e-300);
        worst = worst.max(rel);
        assert!(
            rel <= 1e-10,
            "first-law violation {rel:e} at n={}, alpha={}",
            spec.n,
            spec.alpha1
        );
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "runtime {dt:?} exceeds 10 s");
    println!(
        "criterion 01 (first law, 1e4 draws): PASS — worst relative residual {worst:.3e}, {dt:?}"
    );
}

#[test]
fn acceptance_02_clausius_and_carnot_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001); // same draw family as criterion 1
    let mut worst_clausius = f64::NEG_INFINITY;
    let mut engines = 0usize;
    let mut fridges = 0usize;
    for _ in 0..10_000 {
        let (spec, params) = draw_case(&mut rng);
        let out = run_cycle(&params, &spec).unwrap();
        let clausius = out.q_h / params.t_h + out.q_c / params.t_c;
        worst_clausius = worst_clausius.max(clausius);
        assert!(clausius <= 1e-12, "Clausius sum {clausius:e} positive");
        if let Some(eta) = out.eta {
            engines += 1;
            let bound = carnot(params.t_c, params.t_h).unwrap();
            assert!(eta <= bound + 1e-10, "eta {eta} above Carnot {bound}");
        }
        if let Some(eta_r) = out.eta_r {
            fridges += 1;
            let bound = carnot_refrigerator(params.t_c, params.t_h).unwrap();
            assert!(eta_r <= bound + 1e-10, "eta_R {eta_r} above Carnot {bound}");
        }
    }
    assert!(
        engines > 100 && fridges > 100,
        "draws too degenerate: E={engines}, R={fridges}"
    );
    println!(
        "criterion 02 (Clausius + Carnot bounds): PASS — worst Clausius sum {worst_clausius:.3e}, \
         {engines} engine / {fridges} refrigerator draws checked"
    );
}

#[test]
fn acceptance_03_tfim_limit_dispersion() {
    let start = std::time::Instant::now();
    let spec = CouplingSpec::uniform(1000, 30.0).unwrap();
    let table = ModeTable::new(&spec).unwrap();
    let mut worst = 0.0f64;
    for h in [0.5, 1.0, 1.5] {
        let omegas = table.omega(h);
        for (i, &k) in table.k.iter().enumerate() {
            let reference = 2.0 * ((h - k.cos()).powi(2) + k.sin().powi(2)).sqrt();
            worst = worst.max((omegas[i] - reference).abs());
        }
    }
    let dt = start.elapsed();
    assert!(worst <= 1e-6, "max deviation {worst:e} above 1e-6");
    assert!(dt.as_secs_f64() < 1.0, "runtime {dt:?} exceeds 1 s");
    println!(
        "criterion 03 (TFIM limit, alpha=30, N=1000): PASS — max |omega - reference| = {worst:.3e}, {dt:?}"
    );
}

#[test]
fn acceptance_04_momentum_nambu_equivalence() {
    let start = std::time::Instant::now();
    let h = 0.7;
    let mut worst = 0.0f64;
    for n in [4usize, 10, 100] {
        for alpha in [0.25, 0.55, 1.2] {
            let spec = CouplingSpec::uniform(n, alpha).unwrap();
            let sys = diagonalize(&kitaev_otto::bdg::build_quadratic(&spec, h).unwrap()).unwrap();
            let qp = sys.quasiparticle_energies();
            let mut omegas = ModeTable::new(&spec).unwrap().omega(h);
            omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (got, want) in qp.iter().zip(&omegas) {
                let dev = (got - want).abs();
                worst = worst.max(dev);
                assert!(dev <= 1e-8, "n={n} alpha={alpha}: |2eps - omega| = {dev:e}");
            }
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "runtime {dt:?} exceeds 30 s");
    println!(
        "criterion 04 (momentum vs Nambu, N in {{4,10,100}}): PASS — worst deviation {worst:.3e}, {dt:?}"
    );
}

#[test]
fn acceptance_05_particle_hole_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    let mut worst_residual = 0.0f64;
    let mut worst_pairing = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=8usize);
        let mut a = Array2::zeros((n, n));
        let mut b = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let x: f64 = rng.random_range(-1.0..1.0);
                let y: f64 = rng.random_range(-1.0..1.0);
                a[[i, j]] += x / 2.0;
                a[[j, i]] += x / 2.0;
                b[[i, j]] += y / 2.0;
                b[[j, i]] -= y / 2.0;
            }
        }
        let q = QuadraticForm::new(a, b, 0.0).unwrap();
        let sys = diagonalize(&q).unwrap();
        let residual = particle_hole_check(&sys);
        worst_residual = worst_residual.max(residual);
        assert!(residual <= 1e-12, "PH residual {residual:e}");
        let eig = kitaev_otto::linalg::symmetric_eigen(sys.nambu_matrix()).unwrap();
        for i in 0..2 * n {
            let dev = (eig.values[i] + eig.values[2 * n - 1 - i]).abs();
            worst_pairing = worst_pairing.max(dev);
            assert!(dev <= 1e-10, "unpaired spectrum, deviation {dev:e}");
        }
    }
    println!(
        "criterion 05 (particle-hole symmetry, 100 random forms): PASS — \
         worst residual {worst_residual:.3e}, worst pairing deviation {worst_pairing:.3e}"
    );
}

#[test]
fn acceptance_06_many_body_oracle() {
    let start = std::time::Instant::now();
    let (n, j, h) = (8usize, 1.0, 0.9);
    let q = nn_chain_form(n, j, j, h, Boundary::Open).unwrap();
    let sys = diagonalize(&q).unwrap();
    let from_quasiparticles = quasiparticle_spectrum(&sys).unwrap();
    let from_spins = spin_ed_tfim(n, h, j).unwrap();
    assert_eq!(from_quasiparticles.len(), 256);
    let mut worst = 0.0f64;
    for (a, b) in from_quasiparticles.iter().zip(&from_spins) {
        worst = worst.max((a - b).abs());
    }
    assert!(worst <= 1e-8, "spectra disagree by {worst:e}");

    // canonical energies from the two routes
    let omegas = sys.quasiparticle_energies();
    let mut worst_canonical = 0.0f64;
    for t in [0.3, 1.0] {
        let beta = 1.0 / t;
        let z: f64 = from_spins.iter().map(|&e| (-beta * e).exp()).sum();
        let e_ed: f64 = from_spins
            .iter()
            .map(|&e| e * (-beta * e).exp())
            .sum::<f64>()
            / z;
        let occ: Vec<f64> = omegas.iter().map(|&w| fermi_occupation(t, w)).collect();
        let e_ff =
            kitaev_otto::dynamics::internal_energy(&occ, &omegas).unwrap() + sys.energy_offset();
        worst_canonical = worst_canonical.max((e_ff - e_ed).abs());
        assert!(
            (e_ff - e_ed).abs() <= 1e-8,
            "canonical energy mismatch {:e} at T={t}",
            (e_ff - e_ed).abs()
        );
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "runtime {dt:?} exceeds 60 s");
    println!(
        "criterion 06 (2^8 spectra + canonical energies vs spin ED): PASS — \
         worst spectrum deviation {worst:.3e}, worst canonical deviation {worst_canonical:.3e}, {dt:?}"
    );
}

#[test]
fn acceptance_07_per_mode_cycle_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = [4usize, 6, 8][rng.random_range(0..3)];
        let spec = CouplingSpec::uniform(n, rng.random_range(0.05..2.5)).unwrap();
        let (a, b) = (rng.random_range(0.0..2.5), rng.random_range(0.0..2.5));
        let (h_i, h_f) = if a <= b { (a, b) } else { (b, a) };
        let (c, d) = (rng.random_range(0.1..5.0), rng.random_range(0.1..5.0));
        let (t_c, t_h) = if c <= d { (c, d) } else { (d, c) };
        let params = CycleParams::new(h_i, h_f, t_c, t_h + 1e-3, 1e-12).unwrap();
        let (q_h, q_c, w) = two_level_cycle_sum(&params, &spec).unwrap();
        let (q_h_ref, q_c_ref, w_ref) = cycle_heats(&params, &spec).unwrap();
        let dev = (q_h - q_h_ref)
            .abs()
            .max((q_c - q_c_ref).abs())
            .max((w - w_ref).abs());
        worst = worst.max(dev);
        assert!(dev <= 1e-12, "oracle deviation {dev:e} at n={n}");
    }
    println!(
        "criterion 07 (two-level oracle vs cycle heats, 100 draws): PASS — worst deviation {worst:.3e}"
    );
}

fn reference_mode_map() -> Vec<kitaev_otto::sweep::SweepRow> {
    let base = SweepBase::uniform(100, 0.25, 0.0, 0.38, 0.57);
    let axes = [
        Axis::linspace(AxisName::Alpha, 0.0, 0.6, 60).unwrap(),
        Axis::linspace(AxisName::HI, 0.0, 2.0, 200).unwrap(),
    ];
    run_map(&base, &axes).unwrap()
}

#[test]
fn acceptance_08_mode_map_qualitative() {
    let start = std::time::Instant::now();
    let rows = reference_mode_map();
    assert_eq!(rows.len(), 60 * 200);
    let mut r_fields = Vec::new();
    let mut e_fields = Vec::new();
    let (mut n_a, mut n_h) = (0usize, 0usize);
    for row in &rows {
        match row.outcome.mode {
            Mode::Refrigerator => r_fields.push(row.h_i),
            Mode::Engine => e_fields.push(row.h_i),
            Mode::Accelerator => n_a += 1,
            Mode::Heater => n_h += 1,
            Mode::Unclassified => {}
        }
    }
    assert!(!r_fields.is_empty(), "no refrigerator region");
    assert!(!e_fields.is_empty(), "no engine region");
    assert!(n_a > 0, "no accelerator region");
    assert!(n_h > 0, "no heater region");
    let median = |v: &mut Vec<f64>| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let r_median = median(&mut r_fields);
    let e_median = median(&mut e_fields);
    assert!(
        r_median < e_median,
        "refrigerator median h_i {r_median} not below engine median {e_median}"
    );
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 120.0, "runtime {dt:?} exceeds 2 min");
    println!(
        "criterion 08 (mode map, 60x200): PASS — R={} A={n_a} E={} H={n_h} cells, \
         median h_i: R {r_median:.3} < E {e_median:.3}, {dt:?}",
        r_fields.len(),
        e_fields.len()
    );
}

#[test]
fn acceptance_09_relaxation_vs_ode() {
    let mut rng = ChaCha8Rng::seed_from_u64(9009);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n0 = rng.random_range(0.0..1.0);
        let f = rng.random_range(0.0..1.0);
        let g = rng.random_range(0.05..3.0);
        let t_end = rng.random_range(0.01..4.0);
        let steps = 4000usize;
        let dt = t_end / steps as f64;
        let mut n = n0;
        for _ in 0..steps {
            let rhs = |x: f64| 2.0 * g * (f - x);
            let k1 = rhs(n);
            let k2 = rhs(n + 0.5 * dt * k1);
            let k3 = rhs(n + 0.5 * dt * k2);
            let k4 = rhs(n + dt * k3);
            n += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        let dev = (occupation_at(t_end, n0, f, g) - n).abs();
        worst = worst.max(dev);
        assert!(dev <= 1e-8, "relaxation deviates from ODE by {dev:e}");
    }
    println!(
        "criterion 09 (relaxation formula vs RK4, 50 draws): PASS — worst deviation {worst:.3e}"
    );
}

// direct two-level Schrodinger integration across the ramp: final
// population of the instantaneous excited state
fn tdse_final_population(t_k: f64, d_k: f64, ramp: &RampSpec) -> f64 {
    let duration = (ramp.h_end - ramp.h_start).abs() / ramp.velocity;
    let steps = 200_000usize;
    let dt = duration / steps as f64;
    let eigvecs = |h: f64| {
        let a = h - t_k;
        let theta = d_k.atan2(a);
        let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        ([-s, c], [c, s]) // (ground, excited)
    };
    let (g0, _) = eigvecs(ramp.h_start);
    let mut psi = [Complex64::new(g0[0], 0.0), Complex64::new(g0[1], 0.0)];
    let rhs = |t: f64, y: [Complex64; 2]| {
        let a = ramp.h_start + ramp.velocity * t - t_k;
        let i = Complex64::new(0.0, 1.0);
        [-i * (a * y[0] + d_k * y[1]), -i * (d_k * y[0] - a * y[1])]
    };
    let add = |y: [Complex64; 2], k: [Complex64; 2], s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
    for step in 0..steps {
        let t = step as f64 * dt;
        let k1 = rhs(t, psi);
        let k2 = rhs(t + dt / 2.0, add(psi, k1, dt / 2.0));
        let k3 = rhs(t + dt / 2.0, add(psi, k2, dt / 2.0));
        let k4 = rhs(t + dt, add(psi, k3, dt));
        for c in 0..2 {
            psi[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
        psi[0] /= norm;
        psi[1] /= norm;
    }
    let (_, excited) = eigvecs(ramp.h_end);
    (psi[0] * excited[0] + psi[1] * excited[1]).norm_sqr()
}

#[test]
fn acceptance_10_adiabaticity_diagnostic() {
    let spec = CouplingSpec::uniform(20, 30.0).unwrap();
    let ramp = RampSpec::new(1.5, 2.0, 0.01).unwrap();
    let report = adiabaticity_metric(&ramp, &spec).unwrap();

    // exact v^2 scaling
    let doubled = RampSpec::new(1.5, 2.0, 0.02).unwrap();
    let report2 = adiabaticity_metric(&doubled, &spec).unwrap();
    for (m1, m2) in report.modes.iter().zip(&report2.modes) {
        if m1.p > 0.0 {
            let rel = (m2.p / (4.0 * m1.p) - 1.0).abs();
            assert!(rel <= 1e-12, "v^2 scaling off by {rel:e}");
        }
    }

    // factor-3 agreement with direct integration wherever P_k <= 1e-3
    let table = ModeTable::new(&spec).unwrap();
    let mut checked = 0usize;
    let mut ratios: Vec<f64> = Vec::new();
    for (i, m) in report.modes.iter().enumerate() {
        if m.p == 0.0 || m.p > 1e-3 {
            continue;
        }
        let p_exact = tdse_final_population(table.t[i], table.delta[i], &ramp);
        let ratio = p_exact / m.p;
        ratios.push(ratio);
        checked += 1;
        assert!(
            (1.0 / 3.0..=3.0).contains(&ratio),
            "mode k={:.4}: P_exact/P_k = {ratio:.3} outside [1/3, 3]",
            m.k
        );
    }
    assert!(checked >= 8, "too few modes checked: {checked}");
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
    println!(
        "criterion 10 (adiabaticity): PASS — v^2 scaling exact, \
         {checked} modes vs integration, ratio range [{lo:.3}, {hi:.3}]"
    );
}

#[test]
fn acceptance_11a_regression_exact_on_synthetic() {
    let a_true = -0.37;
    let c = 2.1;
    let pts: Vec<(f64, f64)> = (1..=10)
        .map(|i| {
            let n = (10 * i) as f64;
            (n, c * n.powf(a_true))
        })
        .collect();
    let fit = regress_exponent(&pts).unwrap();
    assert!(
        (fit.exponent - a_true).abs() <= 1e-10,
        "synthetic exponent off by {:e}",
        (fit.exponent - a_true).abs()
    );
    assert!(fit.residual <= 1e-12, "residual {:e}", fit.residual);
    println!(
        "criterion 11a (synthetic power law): PASS — |a - a_true| = {:.3e}, residual = {:.3e}",
        (fit.exponent - a_true).abs(),
        fit.residual
    );
}

fn scaling_study(alpha: f64, t_c: f64, t_h: f64) -> kitaev_otto::sweep::ScalingReport {
    let base = SweepBase::uniform(10, alpha, 0.0, t_c, t_h);
    let sizes: Vec<usize> = (1..=10).map(|i| 10 * i).collect();
    let hi_axis = Axis::range(AxisName::HI, 0.0, 2.0, 0.01).unwrap();
    peak_scaling(&base, &sizes, Observable::PiPerSpin, &hi_axis).unwrap()
}

#[test]
fn acceptance_11b_short_range_exponent_positive() {
    let start = std::time::Instant::now();
    let report = scaling_study(1.2, 1.11, 5.0);
    let ferro = report.ferro_fit.expect("ferro-branch fit");
    let para = report.para_fit.expect("para-branch fit");
    let soft = (ferro.exponent - 0.2355).abs() <= 0.15;
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 300.0, "runtime {dt:?} exceeds 5 min");
    assert!(
        ferro.exponent > 0.0,
        "alpha=1.2 ferro-peak exponent {} not positive",
        ferro.exponent
    );
    println!(
        "criterion 11b (alpha=1.2, T_h=5.0, T_c=1.11): PASS — exponents ferro {:+.4} / para {:+.4} \
         (sign positive as required; |a - 0.2355| <= 0.15 soft check: {}), {dt:?}",
        ferro.exponent,
        para.exponent,
        if soft { "yes" } else { "no" }
    );
}

#[test]
fn acceptance_11c_long_range_ferro_exponent_negative() {
    // Reference value for this parameter set is a = -0.1035 (soft band
    // +-0.15); the hard requirement is the sign.
    let start = std::time::Instant::now();
    let report = scaling_study(0.2, 0.5, 1.67);
    let ferro = report.ferro_fit.expect("ferro-branch fit");
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 300.0, "runtime {dt:?} exceeds 5 min");
    let soft = (ferro.exponent - (-0.1035)).abs() <= 0.15;
    println!(
        "criterion 11c (alpha=0.2, T_h=1.67, T_c=0.5): measured ferro-peak exponent {:+.4} \
         over {} sizes (residual {:.2e}; soft |a + 0.1035| <= 0.15: {})",
        ferro.exponent,
        ferro.points,
        ferro.residual,
        if soft { "yes" } else { "no" }
    );
    assert!(
        ferro.exponent < 0.0,
        "alpha=0.2 ferro-peak exponent {:+.4} is positive; the peak height grows \
         monotonically with N toward its thermodynamic-limit value under the model's \
         stated heat formulas (see the decisions ledger for the full analysis) — \
         the published negative sign is not reproducible from those formulas",
        ferro.exponent
    );
}

#[test]
fn acceptance_12_worker_count_determinism() {
    use kitaev_otto::cli::emit::{canonical_row, render_csv, Table, CANONICAL_COLUMNS};
    let render = |rows: &[kitaev_otto::sweep::SweepRow]| {
        let table = Table {
            columns: CANONICAL_COLUMNS.to_vec(),
            rows: rows.iter().map(canonical_row).collect(),
        };
        render_csv(&table, &[], &[], 12)
    };
    let pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
    };

    // criterion-8 map under different worker counts
    let map_1 = pool(1).install(reference_mode_map);
    let map_8 = pool(8).install(reference_mode_map);
    let bytes_1 = render(&map_1);
    let bytes_8 = render(&map_8);
    assert_eq!(bytes_1, bytes_8, "map output differs with worker count");

    // criterion-11 scaling run under different worker counts
    let study = || scaling_study(1.2, 1.11, 5.0);
    let s1 = pool(1).install(study);
    let s8 = pool(8).install(study);
    let f1 = s1.ferro_fit.unwrap();
    let f8 = s8.ferro_fit.unwrap();
    assert_eq!(f1.exponent.to_bits(), f8.exponent.to_bits());
    assert_eq!(f1.intercept.to_bits(), f8.intercept.to_bits());
    println!(
        "criterion 12 (determinism across workers): PASS — {} map bytes identical, \
         scaling fit bit-identical",
        bytes_1.len()
    );
}
