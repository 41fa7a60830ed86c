//! Deterministic parameter sweeps: operation-mode maps, observable curves,
//! peak extraction, and power-law exponent regression.
//!
//! Grid points are independent tasks executed data-parallel; results are
//! buffered and emitted in row-major grid order, so the output is a pure
//! function of the grid regardless of worker count.

use rayon::prelude::*;

use crate::couplings::{Boundary, CouplingSpec};
use crate::error::{Error, Result};
use crate::otto::{carnot, carnot_refrigerator, run_cycle, CycleOutcome, CycleParams};
use crate::spectrum::critical_field;

/// Sweepable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    Alpha,
    HI,
    N,
    TRatio,
    TC,
    TH,
}

impl AxisName {
    pub fn label(self) -> &'static str {
        match self {
            AxisName::Alpha => "alpha",
            AxisName::HI => "h_i",
            AxisName::N => "N",
            AxisName::TRatio => "T_ratio",
            AxisName::TC => "T_c",
            AxisName::TH => "T_h",
        }
    }
}

impl std::str::FromStr for AxisName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alpha" => Ok(AxisName::Alpha),
            "hi" | "h_i" => Ok(AxisName::HI),
            "n" => Ok(AxisName::N),
            "t-ratio" | "t_ratio" | "tratio" => Ok(AxisName::TRatio),
            "tc" | "t_c" => Ok(AxisName::TC),
            "th" | "t_h" => Ok(AxisName::TH),
            other => Err(Error::Config(format!("unknown sweep axis '{other}'"))),
        }
    }
}

/// One sweep axis: a name and its strictly increasing values.
#[derive(Debug, Clone)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn list(name: AxisName, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config(format!(
                "axis {} has no values",
                name.label()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "axis {} has non-finite values",
                name.label()
            )));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "axis {} values must be strictly increasing",
                name.label()
            )));
        }
        if name == AxisName::N {
            for &v in &values {
                if v.fract() != 0.0 || v < 2.0 || !(v as usize).is_multiple_of(2) {
                    return Err(Error::Config(format!(
                        "axis N values must be even integers >= 2, got {v}"
                    )));
                }
            }
        }
        Ok(Self { name, values })
    }

    /// Inclusive `start..=stop` with the given positive step.
    pub fn range(name: AxisName, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::Config(format!(
                "axis step must be positive, got {step}"
            )));
        }
        if !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(Error::Config(format!("bad axis range {start}..{stop}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        let values = (0..count).map(|i| start + i as f64 * step).collect();
        Self::list(name, values)
    }

    /// Evenly spaced axis with exactly `count` points from `start` to `stop`.
    pub fn linspace(name: AxisName, start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 || stop <= start {
            return Err(Error::Config(format!(
                "linspace needs count >= 2 and stop > start, got {count}, {start}..{stop}"
            )));
        }
        let step = (stop - start) / (count - 1) as f64;
        let values = (0..count).map(|i| start + i as f64 * step).collect();
        Self::list(name, values)
    }
}

/// How the final field is derived from the initial one.
#[derive(Debug, Clone, Copy)]
pub enum HfRule {
    /// `h_f = h_i + delta` (the usual convention).
    DeltaH(f64),
    /// `h_f` pinned independently of `h_i`.
    Fixed(f64),
}

/// Fixed parameters of a sweep; axes override individual fields per point.
#[derive(Debug, Clone)]
pub struct SweepBase {
    pub n: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub j: f64,
    pub kac: bool,
    pub boundary: Boundary,
    pub disorder: Option<ndarray::Array2<f64>>,
    pub h_i: f64,
    pub hf_rule: HfRule,
    pub t_c: f64,
    pub t_h: f64,
    pub eps: f64,
}

impl SweepBase {
    pub fn uniform(n: usize, alpha: f64, h_i: f64, t_c: f64, t_h: f64) -> Self {
        Self {
            n,
            alpha1: alpha,
            alpha2: alpha,
            j: 1.0,
            kac: true,
            boundary: Boundary::Periodic,
            disorder: None,
            h_i,
            hf_rule: HfRule::DeltaH(0.5),
            t_c,
            t_h,
            eps: CycleParams::DEFAULT_EPS,
        }
    }

    /// Apply axis assignments and build the per-point spec and parameters.
    /// `TRatio` resolves against the (possibly overridden) hot temperature,
    /// whatever the axis declaration order.
    pub fn resolve(&self, assignments: &[(AxisName, f64)]) -> Result<(CouplingSpec, CycleParams)> {
        let mut n = self.n;
        let mut alpha1 = self.alpha1;
        let mut alpha2 = self.alpha2;
        let mut h_i = self.h_i;
        let mut t_c = self.t_c;
        let mut t_h = self.t_h;
        let mut ratio: Option<f64> = None;
        for &(name, v) in assignments {
            match name {
                AxisName::Alpha => {
                    alpha1 = v;
                    alpha2 = v;
                }
                AxisName::HI => h_i = v,
                AxisName::N => n = v as usize,
                AxisName::TC => t_c = v,
                AxisName::TH => t_h = v,
                AxisName::TRatio => ratio = Some(v),
            }
        }
        if let Some(r) = ratio {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::Config(format!(
                    "temperature ratio must lie in (0, 1], got {r}"
                )));
            }
            t_c = r * t_h;
        }
        if self.disorder.is_some() && n != self.n {
            return Err(Error::Config(
                "cannot sweep N with a fixed disorder table attached".into(),
            ));
        }
        let spec = CouplingSpec::new(
            n,
            alpha1,
            alpha2,
            self.j,
            self.kac,
            self.boundary,
            self.disorder.clone(),
        )?;
        let h_f = match self.hf_rule {
            HfRule::DeltaH(d) => h_i + d,
            HfRule::Fixed(f) => f,
        };
        let params = CycleParams::new(h_i, h_f, t_c, t_h, self.eps)?;
        Ok((spec, params))
    }
}

/// One evaluated grid point with its resolved scalar parameters.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub alpha: f64,
    pub h_i: f64,
    pub h_f: f64,
    pub n: usize,
    pub t_c: f64,
    pub t_h: f64,
    pub outcome: CycleOutcome,
}

// structural laws every emitted row must satisfy, re-asserted as a guard
fn check_row_invariants(row: &SweepRow) -> Result<()> {
    let o = &row.outcome;
    if (o.q_h + o.q_c - o.w).abs() > 1e-10 * (o.q_h.abs() + o.q_c.abs() + 1e-300) {
        return Err(Error::Numeric(format!(
            "first-law violation in sweep row at h_i={}, alpha={}",
            row.h_i, row.alpha
        )));
    }
    if o.q_h / row.t_h + o.q_c / row.t_c > 1e-12 {
        return Err(Error::Numeric(format!(
            "Clausius violation in sweep row at h_i={}, alpha={}",
            row.h_i, row.alpha
        )));
    }
    if row.t_h > row.t_c {
        if let Some(eta) = o.eta {
            if eta > carnot(row.t_c, row.t_h)? + 1e-10 {
                return Err(Error::Numeric("efficiency above the Carnot bound".into()));
            }
        }
        if let Some(eta_r) = o.eta_r {
            if eta_r > carnot_refrigerator(row.t_c, row.t_h)? + 1e-10 {
                return Err(Error::Numeric("COP above the Carnot bound".into()));
            }
        }
    }
    Ok(())
}

fn evaluate_point(base: &SweepBase, assignments: &[(AxisName, f64)]) -> Result<SweepRow> {
    let (spec, params) = base.resolve(assignments)?;
    let outcome = run_cycle(&params, &spec)?;
    let row = SweepRow {
        alpha: spec.alpha1,
        h_i: params.h_i,
        h_f: params.h_f,
        n: spec.n,
        t_c: params.t_c,
        t_h: params.t_h,
        outcome,
    };
    check_row_invariants(&row)?;
    Ok(row)
}

/// Two-axis map, row-major in axis declaration order. Validates the whole
/// grid before computing anything; parallel execution never reorders rows.
pub fn run_map(base: &SweepBase, axes: &[Axis; 2]) -> Result<Vec<SweepRow>> {
    if axes[0].name == axes[1].name {
        return Err(Error::Config(format!(
            "map axes must differ, got {} twice",
            axes[0].name.label()
        )));
    }
    // pre-validate every grid point before any computation
    for &a in &axes[0].values {
        for &b in &axes[1].values {
            base.resolve(&[(axes[0].name, a), (axes[1].name, b)])?;
        }
    }
    let points: Vec<(f64, f64)> = axes[0]
        .values
        .iter()
        .flat_map(|&a| axes[1].values.iter().map(move |&b| (a, b)))
        .collect();
    let results: Vec<Result<SweepRow>> = points
        .par_iter()
        .map(|&(a, b)| evaluate_point(base, &[(axes[0].name, a), (axes[1].name, b)]))
        .collect();
    results.into_iter().collect()
}

/// Observable extracted from a row for curves and peak studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    WPerSpin,
    QcPerSpin,
    Eta,
    EtaR,
    PiPerSpin,
    PiRPerSpin,
}

impl Observable {
    pub fn label(self) -> &'static str {
        match self {
            Observable::WPerSpin => "W/N",
            Observable::QcPerSpin => "Qc/N",
            Observable::Eta => "eta",
            Observable::EtaR => "eta_R",
            Observable::PiPerSpin => "Pi/N",
            Observable::PiRPerSpin => "PiR/N",
        }
    }

    /// Value of this observable for a row; `None` where the row's mode
    /// does not define it.
    pub fn extract(self, row: &SweepRow) -> Option<f64> {
        let o = &row.outcome;
        match self {
            Observable::WPerSpin => Some(o.w / row.n as f64),
            Observable::QcPerSpin => Some(o.q_c / row.n as f64),
            Observable::Eta => o.eta,
            Observable::EtaR => o.eta_r,
            Observable::PiPerSpin => o.pi_per_spin,
            Observable::PiRPerSpin => o.pi_r_per_spin,
        }
    }
}

impl std::str::FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "w" | "w-per-spin" | "w/n" => Ok(Observable::WPerSpin),
            "qc" | "qc-per-spin" | "qc/n" => Ok(Observable::QcPerSpin),
            "eta" => Ok(Observable::Eta),
            "eta-r" | "etar" => Ok(Observable::EtaR),
            "pi" | "pi/n" => Ok(Observable::PiPerSpin),
            "pi-r" | "pir" | "pir/n" => Ok(Observable::PiRPerSpin),
            other => Err(Error::Config(format!("unknown observable '{other}'"))),
        }
    }
}

/// One curve sample: the family-axis value, the full row, and the
/// observable (missing where mode-incompatible).
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub family: f64,
    pub row: SweepRow,
    pub value: Option<f64>,
}

/// Observable vs `h_i`, one curve per family value. Rows come out
/// family-major, then ascending `h_i`.
pub fn run_curve(
    base: &SweepBase,
    observable: Observable,
    hi_axis: &Axis,
    family: &Axis,
) -> Result<Vec<CurvePoint>> {
    if hi_axis.name != AxisName::HI {
        return Err(Error::Config("curve x-axis must be h_i".into()));
    }
    if family.name == AxisName::HI {
        return Err(Error::Config("curve family axis cannot be h_i".into()));
    }
    let rows = run_map(base, &[family.clone(), hi_axis.clone()])?;
    Ok(rows
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let family_value = family.values[i / hi_axis.values.len()];
            let value = observable.extract(&row);
            CurvePoint {
                family: family_value,
                row,
                value,
            }
        })
        .collect())
}

/// Location and height of one curve maximum.
#[derive(Debug, Clone, Copy)]
pub struct Peak {
    pub h_i: f64,
    pub value: f64,
}

/// Maxima of a curve split at the critical field: `ferro` on `h_i < h_c`,
/// `para` on `h_i >= h_c`. Absent when the observable never takes a value
/// on that side.
#[derive(Debug, Clone, Copy, Default)]
pub struct PeakReport {
    pub ferro: Option<Peak>,
    pub para: Option<Peak>,
}

/// Split a sampled curve at `h_c` and take the maximum on each side, ties
/// resolved toward smaller `h_i`.
pub fn find_peaks(points: &[(f64, Option<f64>)], h_c: f64) -> PeakReport {
    let mut report = PeakReport::default();
    for &(h, value) in points {
        let Some(v) = value else { continue };
        let slot = if h < h_c {
            &mut report.ferro
        } else {
            &mut report.para
        };
        match slot {
            Some(peak) if v <= peak.value => {}
            _ => *slot = Some(Peak { h_i: h, value: v }),
        }
    }
    report
}

/// Least-squares fit of `ln(value) = a ln(N) + b`.
#[derive(Debug, Clone, Copy)]
pub struct Regression {
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Power-law exponent regression on `(N, value)` pairs. Needs at least
/// three points, all values strictly positive.
pub fn regress_exponent(points: &[(f64, f64)]) -> Result<Regression> {
    if points.len() < 3 {
        return Err(Error::Config(format!(
            "regression needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some((n, v)) = points.iter().find(|(_, v)| v.is_nan() || *v <= 0.0) {
        return Err(Error::Domain(format!(
            "regression values must be positive; got {v} at N={n}"
        )));
    }
    let m = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(n, v) in points {
        let x = n.ln();
        let y = v.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-14 {
        return Err(Error::Domain("regression abscissae are degenerate".into()));
    }
    let exponent = (m * sxy - sx * sy) / denom;
    let intercept = (sy - exponent * sx) / m;
    let mut ss = 0.0;
    for &(n, v) in points {
        let r = v.ln() - (exponent * n.ln() + intercept);
        ss += r * r;
    }
    Ok(Regression {
        exponent,
        intercept,
        residual: (ss / m).sqrt(),
        points: points.len(),
    })
}

/// Peak data for one chain size in a scaling study.
#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub n: usize,
    pub ferro: Option<CurvePoint>,
    pub para: Option<CurvePoint>,
}

/// Peak-height scaling of an observable across chain sizes, with both
/// branches regressed where at least three sizes produced a peak.
#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub h_c: f64,
    pub rows: Vec<ScalingRow>,
    pub ferro_fit: Option<Regression>,
    pub para_fit: Option<Regression>,
}

/// Sweep `h_i` for each chain size, split each curve at the critical-field
/// heuristic `h_c(alpha1)`, and regress the peak heights against `N`.
pub fn peak_scaling(
    base: &SweepBase,
    sizes: &[usize],
    observable: Observable,
    hi_axis: &Axis,
) -> Result<ScalingReport> {
    if sizes.len() < 3 {
        return Err(Error::Config(format!(
            "peak scaling needs at least 3 chain sizes, got {}",
            sizes.len()
        )));
    }
    let h_c = critical_field(base.alpha1)?;
    let family = Axis::list(AxisName::N, sizes.iter().map(|&n| n as f64).collect())?;
    let curve = run_curve(base, observable, hi_axis, &family)?;
    let per_n = hi_axis.values.len();

    let mut rows = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let chunk = &curve[i * per_n..(i + 1) * per_n];
        let sampled: Vec<(f64, Option<f64>)> = chunk.iter().map(|p| (p.row.h_i, p.value)).collect();
        let report = find_peaks(&sampled, h_c);
        let locate = |peak: Peak| {
            chunk
                .iter()
                .find(|p| p.row.h_i == peak.h_i)
                .cloned()
                .expect("peak sample exists")
        };
        rows.push(ScalingRow {
            n,
            ferro: report.ferro.map(locate),
            para: report.para.map(locate),
        });
    }
    let fit = |side: fn(&ScalingRow) -> Option<&CurvePoint>| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| side(r).and_then(|p| p.value.map(|v| (r.n as f64, v))))
            .collect();
        if pts.len() >= 3 && pts.iter().all(|&(_, v)| v > 0.0) {
            regress_exponent(&pts).ok()
        } else {
            None
        }
    };
    let ferro_fit = fit(|r| r.ferro.as_ref());
    let para_fit = fit(|r| r.para.as_ref());
    Ok(ScalingReport {
        h_c,
        rows,
        ferro_fit,
        para_fit,
    })
}
