//! Deterministic CSV and JSON emission.
//!
//! Floats print with 12 significant digits (the classic `%.12g` rule:
//! fixed notation for exponents in [-4, 12), scientific otherwise, trailing
//! zeros trimmed), so identical runs produce byte-identical files and a
//! re-parse recovers every value to printed precision.

use std::io::Write;

use serde::Serialize;

use superspin_core::analysis::{DensityRow, EpEvent, SweepResult};
use superspin_core::dynamics::TimeSeries;
use superspin_core::perturbation::{PerturbativeEigenvalue, SpectralLabel};
use superspin_core::C64;

/// `%.12g`-style float formatting.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let mant = trim_zeros(mant.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// One spectrum row: a labeled eigenvalue from either method.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub method: &'static str,
    pub re: f64,
    pub im: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sx: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mp: Option<f64>,
}

impl SpectrumRow {
    pub fn exact(value: C64) -> Self {
        SpectrumRow {
            method: "exact",
            re: value.re,
            im: value.im,
            s: None,
            sx: None,
            m: None,
            mp: None,
        }
    }

    pub fn perturbative(ev: &PerturbativeEigenvalue<f64>) -> Self {
        let value = ev.value();
        let (s, sx, m, mp) = match ev.label {
            SpectralLabel::SuperSpin { s, s_x } => (Some(s), Some(s_x), None, None),
            SpectralLabel::Magnetization { m, mp } => (None, None, Some(m), Some(mp)),
            SpectralLabel::Unlabeled => (None, None, None, None),
        };
        SpectrumRow {
            method: "perturbative",
            re: value.re,
            im: value.im,
            s,
            sx,
            m,
            mp,
        }
    }
}

fn opt_int(v: Option<i32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_float(v: Option<f64>) -> String {
    v.map(fmt_g).unwrap_or_default()
}

pub fn write_spectrum_csv<W: Write + ?Sized>(
    w: &mut W,
    rows: &[SpectrumRow],
) -> std::io::Result<()> {
    writeln!(w, "method,re,im,s,sx,m,mp")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.method,
            fmt_g(r.re),
            fmt_g(r.im),
            opt_int(r.s),
            opt_int(r.sx),
            opt_float(r.m),
            opt_float(r.mp),
        )?;
    }
    Ok(())
}

pub fn write_dynamics_csv<W: Write + ?Sized>(
    w: &mut W,
    series: &[&TimeSeries<f64>],
) -> std::io::Result<()> {
    writeln!(w, "t,jx,jy,jz,provenance")?;
    for ts in series {
        for i in 0..ts.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_g(ts.times[i]),
                fmt_g(ts.jx[i]),
                fmt_g(ts.jy[i]),
                fmt_g(ts.jz[i]),
                ts.provenance.name(),
            )?;
        }
    }
    Ok(())
}

pub fn write_density_csv<W: Write + ?Sized>(
    w: &mut W,
    rows: &[DensityRow<f64>],
) -> std::io::Result<()> {
    writeln!(w, "s_or_sx,d,g")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{}",
            fmt_g(r.s_bar),
            fmt_g(r.distance),
            fmt_g(r.density)
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write + ?Sized>(
    w: &mut W,
    sweep: &SweepResult<f64>,
) -> std::io::Result<()> {
    writeln!(w, "gamma,re,im")?;
    for (gamma, spectrum) in sweep.gammas.iter().zip(sweep.spectra.iter()) {
        for v in spectrum {
            writeln!(w, "{},{},{}", fmt_g(*gamma), fmt_g(v.re), fmt_g(v.im))?;
        }
    }
    Ok(())
}

pub fn write_ep_events_csv<W: Write + ?Sized>(
    w: &mut W,
    events: &[EpEvent<f64>],
) -> std::io::Result<()> {
    writeln!(w, "pair_id,gamma_star,confidence")?;
    for ev in events {
        writeln!(
            w,
            "{},{},{}",
            ev.pair_id,
            fmt_g(ev.gamma_star),
            if ev.low_confidence { "low" } else { "high" }
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct RunHeader {
    pub command: &'static str,
    pub model: &'static str,
    pub n: usize,
    pub omega: f64,
}

#[derive(Debug, Serialize)]
pub struct SpectrumJson {
    #[serde(flatten)]
    pub header: RunHeader,
    pub gamma: f64,
    pub rows: Vec<SpectrumRow>,
}

#[derive(Debug, Serialize)]
pub struct DynamicsPointJson {
    pub t: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub provenance: &'static str,
}

#[derive(Debug, Serialize)]
pub struct DynamicsJson {
    #[serde(flatten)]
    pub header: RunHeader,
    pub gamma: f64,
    pub t_max: f64,
    pub dt: f64,
    pub rows: Vec<DynamicsPointJson>,
}

#[derive(Debug, Serialize)]
pub struct DensityRowJson {
    pub s_or_sx: f64,
    pub d: f64,
    pub g: f64,
}

#[derive(Debug, Serialize)]
pub struct DensityJson {
    #[serde(flatten)]
    pub header: RunHeader,
    pub gamma: f64,
    pub rows: Vec<DensityRowJson>,
}

#[derive(Debug, Serialize)]
pub struct SweepPointJson {
    pub gamma: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize)]
pub struct EpEventJson {
    pub pair_id: usize,
    pub gamma_star: f64,
    pub confidence: &'static str,
}

#[derive(Debug, Serialize)]
pub struct SweepJson {
    #[serde(flatten)]
    pub header: RunHeader,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub steps: usize,
    pub rows: Vec<SweepPointJson>,
    pub ep_events: Vec<EpEventJson>,
}
