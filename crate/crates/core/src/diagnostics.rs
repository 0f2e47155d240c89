//! Norms of grid fields, numerical monitors for the energy estimate, and
//! blow-up time fitting.
//!
//! `||u||_{H^2}` is represented by `(l2^2 + h2semi^2)^{1/2}` where `h2semi` is
//! `||Laplacian u||_{L^2}`.

use std::fmt::Write as _;

use ndarray::{Array2, ArrayView2};
use serde::Serialize;
use thiserror::Error;

use crate::solver::{discrete_biharmonic, discrete_laplacian, GridField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("degenerate field: denominator {0:e} below 1e-30")]
    DegenerateField(f64),
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("degenerate initial data: h2semi(0) = 0")]
    DegenerateInitial,
    #[error("malformed norm series CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error("samples must have strictly increasing t ({prev} then {next})")]
    NonMonotoneTime { prev: f64, next: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormSample {
    pub t: f64,
    pub dt: f64,
    pub l2: f64,
    pub h2semi: f64,
    pub grad_inf: f64,
    pub lap_l4: f64,
    /// Not part of the CSV format, so `None` after reading one back.
    pub bih_l2: Option<f64>,
    pub max_u: f64,
    pub min_u: f64,
}

impl NormSample {
    pub fn h2_norm(&self) -> f64 {
        self.l2.hypot(self.h2semi)
    }

    pub fn max_abs_u(&self) -> f64 {
        self.max_u.abs().max(self.min_u.abs())
    }
}

pub const NORM_CSV_HEADER: &str = "t,dt,l2,h2semi,grad_inf,lap_l4,max_u,min_u";

/// Time-ordered norm samples; time integrals use the trapezoid rule.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct NormSeries {
    pub samples: Vec<NormSample>,
}

impl NormSeries {
    pub fn new(samples: Vec<NormSample>) -> Result<Self, DiagnosticsError> {
        let mut s = Self::default();
        for sample in samples {
            s.try_push(sample)?;
        }
        Ok(s)
    }

    pub fn try_push(&mut self, sample: NormSample) -> Result<(), DiagnosticsError> {
        if let Some(last) = self.samples.last() {
            if !(sample.t > last.t) {
                return Err(DiagnosticsError::NonMonotoneTime {
                    prev: last.t,
                    next: sample.t,
                });
            }
        }
        self.samples.push(sample);
        Ok(())
    }

    /// Panics if `t` does not increase; the solver only appends later times.
    pub fn push(&mut self, sample: NormSample) {
        self.try_push(sample).expect("norm series times increase");
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(c) = comment {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str(NORM_CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let row = [s.t, s.dt, s.l2, s.h2semi, s.grad_inf, s.lap_l4, s.max_u, s.min_u];
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Reads the format written by [`Self::to_csv`]; `#` lines are skipped.
    pub fn from_csv(text: &str) -> Result<Self, DiagnosticsError> {
        let mut rows = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
        match rows.next() {
            Some((_, h)) if h.trim() == NORM_CSV_HEADER => {}
            Some((i, _)) => {
                return Err(DiagnosticsError::Csv {
                    line: i + 1,
                    reason: format!("expected header `{NORM_CSV_HEADER}`"),
                })
            }
            None => {
                return Err(DiagnosticsError::Csv {
                    line: 0,
                    reason: "empty input".into(),
                })
            }
        }
        let mut series = Self::default();
        for (i, line) in rows {
            let v = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| DiagnosticsError::Csv {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            if v.len() != 8 {
                return Err(DiagnosticsError::Csv {
                    line: i + 1,
                    reason: format!("expected 8 columns, got {}", v.len()),
                });
            }
            series.try_push(NormSample {
                t: v[0],
                dt: v[1],
                l2: v[2],
                h2semi: v[3],
                grad_inf: v[4],
                lap_l4: v[5],
                bih_l2: None,
                max_u: v[6],
                min_u: v[7],
            })?;
        }
        Ok(series)
    }
}

/// Tensor-product trapezoid weights times the integrand over the
/// boundary-inclusive nodes.
fn trapezoid(values: ArrayView2<'_, f64>, hx: f64, hy: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (na, nb) = values.dim();
    let mut sum = 0.0;
    for ((a, b), &v) in values.indexed_iter() {
        let wa = if a == 0 || a + 1 == na { 0.5 } else { 1.0 };
        let wb = if b == 0 || b + 1 == nb { 0.5 } else { 1.0 };
        sum += wa * wb * f(v);
    }
    sum * hx * hy
}

fn interior_l2(values: &Array2<f64>, hx: f64, hy: f64) -> f64 {
    (values.iter().map(|v| v * v).sum::<f64>() * hx * hy).sqrt()
}

/// Norms of a field whose ghosts are filled.
pub fn norms(field: &GridField) -> NormSample {
    let g = &field.grid;
    let (hx, hy) = (g.hx, g.hy);
    let l2 = trapezoid(field.closure(), hx, hy, |v| v * v).sqrt();
    let lap = discrete_laplacian(field);
    let h2semi = trapezoid(lap.view(), hx, hy, |v| v * v).sqrt();
    let lap_l4 = trapezoid(lap.view(), hx, hy, |v| v.powi(4)).powf(0.25);
    let u = &field.values;
    let mut grad_inf: f64 = 0.0;
    for a in 2..g.nx + 2 {
        for b in 2..g.ny + 2 {
            let ux = (u[[a + 1, b]] - u[[a - 1, b]]) / (2.0 * hx);
            let uy = (u[[a, b + 1]] - u[[a, b - 1]]) / (2.0 * hy);
            grad_inf = grad_inf.max(ux.hypot(uy));
        }
    }
    let bih_l2 = interior_l2(&discrete_biharmonic(field), hx, hy);
    let inner = field.interior();
    let max_u = inner.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_u = inner.iter().copied().fold(f64::INFINITY, f64::min);
    NormSample {
        t: field.time,
        dt: 0.0,
        l2,
        h2semi,
        grad_inf,
        lap_l4,
        bih_l2: Some(bih_l2),
        max_u,
        min_u,
    }
}

/// `||Laplacian grad u|| / (||Laplacian u||^{1/2} ||bilaplacian u||^{1/2})`, all over interior nodes.
pub fn gn_ratio(field: &GridField) -> Result<f64, DiagnosticsError> {
    let g = &field.grid;
    let (hx, hy) = (g.hx, g.hy);
    let lap = discrete_laplacian(field);
    let mut grad_sq = 0.0;
    let mut lap_sq = 0.0;
    for i in 1..g.nx + 1 {
        for j in 1..g.ny + 1 {
            let dx = (lap[[i + 1, j]] - lap[[i - 1, j]]) / (2.0 * hx);
            let dy = (lap[[i, j + 1]] - lap[[i, j - 1]]) / (2.0 * hy);
            grad_sq += dx * dx + dy * dy;
            lap_sq += lap[[i, j]] * lap[[i, j]];
        }
    }
    let num = (grad_sq * hx * hy).sqrt();
    let lap_l2 = (lap_sq * hx * hy).sqrt();
    let bih_l2 = interior_l2(&discrete_biharmonic(field), hx, hy);
    let den = (lap_l2 * bih_l2).sqrt();
    if !(den > 1e-30) {
        return Err(DiagnosticsError::DegenerateField(den));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallReport {
    /// Smallest `C` with `d/dt log ||Laplacian u||^2 <= C ||grad u||_inf^4` on every sampled interval.
    pub c_fit: f64,
    /// `(t, lhs, rhs)`: interval growth rate of `log h2semi^2` and `c_fit` times the
    /// trapezoid mean of `grad_inf^4`, stamped at the interval's right end.
    pub margin_series: Vec<(f64, f64, f64)>,
    /// `max_t log(h2semi(t)^2 / h2semi(0)^2) / int_0^t grad_inf^4`.
    pub integral_form_ratio: f64,
    /// `int_0^T grad_inf^4` by the trapezoid rule.
    pub grad_integral: f64,
}

/// Fits the differential and integral forms of the Gronwall step.
///
/// Rates are interval forward differences and integrals are trapezoid sums
/// over the same intervals, so `integral_form_ratio <= c_fit` holds exactly.
pub fn gronwall_monitor(series: &NormSeries) -> Result<GronwallReport, DiagnosticsError> {
    let s = &series.samples;
    if s.len() < 3 {
        return Err(DiagnosticsError::InsufficientData {
            needed: 3,
            got: s.len(),
        });
    }
    if !(s[0].h2semi > 0.0) {
        return Err(DiagnosticsError::DegenerateInitial);
    }
    let log_y: Vec<f64> = s.iter().map(|p| 2.0 * p.h2semi.ln()).collect();
    let g4: Vec<f64> = s.iter().map(|p| p.grad_inf.powi(4)).collect();
    let mut rates = Vec::with_capacity(s.len() - 1);
    let mut c_fit: f64 = 0.0;
    for k in 0..s.len() - 1 {
        let dt = s[k + 1].t - s[k].t;
        let rate = (log_y[k + 1] - log_y[k]) / dt;
        let mean = 0.5 * (g4[k] + g4[k + 1]);
        if rate > 0.0 {
            c_fit = c_fit.max(if mean > 0.0 { rate / mean } else { f64::INFINITY });
        }
        rates.push((s[k + 1].t, rate, mean, dt));
    }
    let margin_series = rates
        .iter()
        .map(|&(t, rate, mean, _)| (t, rate, c_fit * mean))
        .collect();
    let mut integral = 0.0;
    let mut ratio: f64 = 0.0;
    for (k, &(_, _, mean, dt)) in rates.iter().enumerate() {
        integral += mean * dt;
        if integral > 0.0 {
            ratio = ratio.max((log_y[k + 1] - log_y[0]) / integral);
        }
    }
    Ok(GronwallReport {
        c_fit,
        margin_series,
        integral_form_ratio: ratio,
        grad_integral: integral,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    MaxAbsU,
    H2Semi,
}

impl Channel {
    pub fn value(self, s: &NormSample) -> f64 {
        match self {
            Self::MaxAbsU => s.max_abs_u(),
            Self::H2Semi => s.h2semi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::MaxAbsU => "max_abs_u",
            Self::H2Semi => "h2semi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BlowUpFit {
    /// Root of the regression line of `1/y` against `t`.
    Fit {
        t_star_est: f64,
        residual: f64,
        slope: f64,
        intercept: f64,
    },
    NoBlowUpTrend {
        reason: String,
    },
}

/// Fits `y(t) ~ A/(T* - t)` by linear least squares on `1/y`.
pub fn fit_blowup_time(series: &NormSeries, channel: Channel) -> Result<BlowUpFit, DiagnosticsError> {
    let s = &series.samples;
    if s.len() < 5 {
        return Err(DiagnosticsError::InsufficientData {
            needed: 5,
            got: s.len(),
        });
    }
    let y: Vec<f64> = s.iter().map(|p| channel.value(p)).collect();
    if y.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Ok(BlowUpFit::NoBlowUpTrend {
            reason: format!("{} is not positive and finite at every sample", channel.name()),
        });
    }
    if !y.windows(2).all(|w| w[1] > w[0]) {
        return Ok(BlowUpFit::NoBlowUpTrend {
            reason: format!("{} is not increasing", channel.name()),
        });
    }
    let n = s.len() as f64;
    let t: Vec<f64> = s.iter().map(|p| p.t).collect();
    let z: Vec<f64> = y.iter().map(|v| 1.0 / v).collect();
    let tm = t.iter().sum::<f64>() / n;
    let zm = z.iter().sum::<f64>() / n;
    let sxx: f64 = t.iter().map(|v| (v - tm).powi(2)).sum();
    let sxz: f64 = t.iter().zip(&z).map(|(a, b)| (a - tm) * (b - zm)).sum();
    let slope = sxz / sxx;
    let intercept = zm - slope * tm;
    if !(slope < 0.0) {
        return Ok(BlowUpFit::NoBlowUpTrend {
            reason: format!("regression slope {slope:e} of 1/{} is not negative", channel.name()),
        });
    }
    let residual = (t
        .iter()
        .zip(&z)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(BlowUpFit::Fit {
        t_star_est: -intercept / slope,
        residual,
        slope,
        intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::SolutionFamily;
    use crate::polyalg::int;
    use crate::solver::{fill_ghosts, Grid};
    use proptest::prelude::*;

    fn square_field(n: usize, a0: i64, t: f64) -> GridField {
        let fam = SolutionFamily::square(int(a0)).numeric();
        GridField::from_family(Grid::unit_square(n).unwrap(), &fam, t).unwrap()
    }

    fn sample(t: f64, h2: f64, g: f64) -> NormSample {
        NormSample {
            t,
            dt: 0.0,
            l2: h2,
            h2semi: h2,
            grad_inf: g,
            lap_l4: h2,
            bih_l2: None,
            max_u: h2,
            min_u: -h2,
        }
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let s = norms(&square_field(9, 0, 0.0));
        assert_eq!(
            (s.l2, s.h2semi, s.grad_inf, s.lap_l4, s.bih_l2),
            (0.0, 0.0, 0.0, 0.0, Some(0.0))
        );
    }

    #[test]
    fn constant_and_linear_fields() {
        let g = Grid::unit_square(31).unwrap();
        let one = GridField::from_fn(g, 0.0, |_, _| 1.0);
        let s = norms(&one);
        assert!((s.l2 - 1.0).abs() < 1e-14);
        assert_eq!((s.grad_inf, s.h2semi), (0.0, 0.0));
        let x = GridField::from_fn(g, 0.0, |x, _| x);
        let s = norms(&x);
        assert!((s.grad_inf - 1.0).abs() < 1e-12);
        // trapezoid error for int x^2 is h^2/6
        let exact = (1.0f64 / 3.0).sqrt();
        assert!((s.l2 - exact).abs() < g.hx * g.hx);
    }

    #[test]
    fn h2semi_matches_the_closed_form() {
        // ||2x^2 + 2y^2||^2 over the unit square = 4 (2/5 + 2/9) = 112/45
        let exact = (112.0f64 / 45.0).sqrt();
        let mut prev = f64::INFINITY;
        for n in [15, 31, 63] {
            let s = norms(&square_field(n, 1, 0.0));
            let err = (s.h2semi - exact).abs();
            assert!(err < prev / 3.0, "n = {n}: {err}");
            prev = err;
        }
        // at t, the time factor scales it
        let t = 0.05;
        let f = 1.0 / (1.0 + 12.0 * t);
        let s0 = norms(&square_field(31, 1, 0.0)).h2semi;
        let st = norms(&square_field(31, 1, t)).h2semi;
        assert!((st - f * s0).abs() < 1e-10);
    }

    #[test]
    fn gn_ratio_is_stable_under_refinement() {
        let r: Vec<f64> = [33, 65, 129]
            .iter()
            .map(|&n| gn_ratio(&square_field(n, 1, 0.0)).unwrap())
            .collect();
        let (lo, hi) = r
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo - 1.0 < 0.1, "{r:?}");
        assert!(matches!(
            gn_ratio(&square_field(9, 0, 0.0)),
            Err(DiagnosticsError::DegenerateField(_))
        ));
    }

    #[test]
    fn gronwall_on_decaying_and_constant_series() {
        let mut series = NormSeries::default();
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            let f = 1.0 / (1.0 + 12.0 * t);
            series.push(sample(t, 1.58 * f, 2.0 * 2f64.sqrt() * f));
        }
        let r = gronwall_monitor(&series).unwrap();
        assert!(r.c_fit.is_finite());
        assert_eq!(r.c_fit, 0.0);
        let flat = NormSeries::new((0..5).map(|k| sample(k as f64, 2.0, 1.0)).collect()).unwrap();
        let r = gronwall_monitor(&flat).unwrap();
        assert_eq!((r.c_fit, r.integral_form_ratio), (0.0, 0.0));
        assert!(matches!(
            gronwall_monitor(&NormSeries::new(vec![sample(0.0, 1.0, 1.0)]).unwrap()),
            Err(DiagnosticsError::InsufficientData { .. })
        ));
        let zero = NormSeries::new((0..4).map(|k| sample(k as f64, 0.0, 0.0)).collect()).unwrap();
        assert_eq!(gronwall_monitor(&zero), Err(DiagnosticsError::DegenerateInitial));
    }

    #[test]
    fn fit_on_an_exact_pole() {
        let (a, ts) = (3.0, 0.25);
        let series = NormSeries::new(
            (0..20)
                .map(|k| {
                    let t = 0.2 * k as f64 / 19.0;
                    sample(t, a / (ts - t), 1.0)
                })
                .collect(),
        )
        .unwrap();
        match fit_blowup_time(&series, Channel::H2Semi).unwrap() {
            BlowUpFit::Fit { t_star_est, .. } => assert!((t_star_est - ts).abs() < 1e-10 * ts),
            other => panic!("{other:?}"),
        }
        let flat = NormSeries::new((0..6).map(|k| sample(k as f64, 1.0, 1.0)).collect()).unwrap();
        assert!(matches!(
            fit_blowup_time(&flat, Channel::H2Semi).unwrap(),
            BlowUpFit::NoBlowUpTrend { .. }
        ));
        let short = NormSeries::new((0..4).map(|k| sample(k as f64, k as f64 + 1.0, 1.0)).collect()).unwrap();
        assert!(matches!(
            fit_blowup_time(&short, Channel::MaxAbsU),
            Err(DiagnosticsError::InsufficientData { .. })
        ));
    }

    #[test]
    fn csv_round_trip_is_bit_identical() {
        let mut f = square_field(9, 1, 0.0);
        let fam = SolutionFamily::square(int(1)).numeric();
        let mut series = NormSeries::default();
        for k in 0..4 {
            let t = 0.01 * k as f64 + 1.0 / 3.0;
            f.values.mapv_inplace(|v| v * 1.1);
            fill_ghosts(&mut f, &fam, t).unwrap();
            let mut s = norms(&f);
            s.bih_l2 = None;
            s.dt = 0.1 / 3.0;
            series.push(s);
        }
        let text = series.to_csv(Some("hessflow test"));
        let back = NormSeries::from_csv(&text).unwrap();
        assert_eq!(back, series);
        assert_eq!(back.to_csv(Some("hessflow test")), text);
        assert!(NormSeries::from_csv("t,dt\n1,2\n").is_err());
    }

    proptest! {
        #[test]
        fn norms_are_absolutely_homogeneous(l in -5.0f64..5.0) {
            let f = square_field(11, 1, 0.0);
            let mut g = f.clone();
            g.values.mapv_inplace(|v| v * l);
            let (a, b) = (norms(&f), norms(&g));
            let close = |x: f64, y: f64| (x * l.abs() - y).abs() <= 1e-12 * (1.0 + y.abs());
            prop_assert!(close(a.l2, b.l2));
            prop_assert!(close(a.h2semi, b.h2semi));
            prop_assert!(close(a.grad_inf, b.grad_inf));
            prop_assert!(close(a.lap_l4, b.lap_l4));
            prop_assert!(close(a.bih_l2.unwrap(), b.bih_l2.unwrap()));
        }

        #[test]
        fn gn_ratio_is_scale_invariant(l in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3]) {
            let f = square_field(17, 1, 0.0);
            let mut g = f.clone();
            g.values.mapv_inplace(|v| v * l);
            let (a, b) = (gn_ratio(&f).unwrap(), gn_ratio(&g).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }

        #[test]
        fn exact_pole_is_recovered(a in 0.1f64..100.0, ts in 0.01f64..10.0) {
            let series = NormSeries::new(
                (0..12).map(|k| { let t = 0.9 * ts * k as f64 / 11.0; sample(t, a / (ts - t), 1.0) }).collect(),
            ).unwrap();
            match fit_blowup_time(&series, Channel::H2Semi).unwrap() {
                BlowUpFit::Fit { t_star_est, .. } => prop_assert!((t_star_est - ts).abs() < 1e-10 * ts),
                other => prop_assert!(false, "{:?}", other),
            }
        }

        #[test]
        fn integral_form_never_exceeds_the_differential_fit(
            v in proptest::collection::vec((0.1f64..3.0, 0.0f64..2.0), 3..20)
        ) {
            let series = NormSeries::new(
                v.iter().enumerate().map(|(k, &(h, g))| sample(0.1 * k as f64, h, g)).collect(),
            ).unwrap();
            let r = gronwall_monitor(&series).unwrap();
            prop_assert!(r.integral_form_ratio <= r.c_fit * (1.0 + 1e-12));
        }
    }
}
