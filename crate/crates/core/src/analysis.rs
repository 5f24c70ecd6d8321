//! Spectral post-processing: the Liouvillian gap, sector distances and
//! densities, minimum-distance matching of exact against perturbative
//! spectra, and dissipation sweeps with exceptional-point detection.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use ndarray::Array2;
use num_complex::Complex;

use crate::eigensolve;
use crate::error::{Error, Result};
use crate::models::{assemble, ModelId, ModelSpec};
use crate::perturbation::closed_form_spectrum;
use crate::scalar::Real;

/// Spectral gap extraction result.
#[derive(Debug, Clone, Copy)]
pub struct GapResult<T: Real> {
    /// Smallest nonzero |Re lambda|; zero when the steady state is degenerate.
    pub gap: T,
    /// More than one eigenvalue sat within 1e-8 of zero.
    pub degenerate_steady_state: bool,
}

/// Liouvillian gap of a spectrum that contains a steady state.
pub fn liouvillian_gap<T: Real>(spectrum: &[Complex<T>]) -> Result<GapResult<T>> {
    if spectrum.is_empty() {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    let zero_tol = T::of(1e-8);
    let steady = spectrum.iter().filter(|z| z.norm() < zero_tol).count();
    if steady == 0 {
        return Err(Error::InvalidInput(
            "no steady state: no eigenvalue within 1e-8 of zero".into(),
        ));
    }
    if steady > 1 {
        return Ok(GapResult {
            gap: T::zero(),
            degenerate_steady_state: true,
        });
    }
    let gap = spectrum
        .iter()
        .map(|z| z.re.abs())
        .filter(|re| *re > zero_tol)
        .fold(T::infinity(), T::min);
    if gap.is_infinite() {
        return Ok(GapResult {
            gap: T::zero(),
            degenerate_steady_state: true,
        });
    }
    Ok(GapResult {
        gap,
        degenerate_steady_state: false,
    })
}

/// One row of the sector distance/density table.
#[derive(Debug, Clone, Copy)]
pub struct DensityRow<T: Real> {
    /// Normalized sector coordinate: `s/N` for the superspin sectors,
    /// the adjacent-pair midpoint `(s_x - 1/2)/N` for the dephasing model.
    pub s_bar: T,
    /// Distance along the real axis between the adjacent sectors/eigenmodes.
    pub distance: T,
    /// Closed-form sector density at `s_bar`.
    pub density: T,
}

/// Distances between adjacent sectors of the closed-form spectrum and the
/// matching density formula: `g = 1/(2 Gamma s_bar)` for the superspin
/// models, `g = 1/(4 Gamma |s_bar|)` for the dephasing model. The pumping
/// model has a constant gap and no densifying sectors.
pub fn sector_distance_and_density<T: Real>(
    model_id: ModelId,
    n: usize,
    gamma: T,
) -> Result<Vec<DensityRow<T>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n_spins must be at least 1".into()));
    }
    if !(gamma > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "sector density requires gamma > 0, got {gamma}"
        )));
    }
    let nf = T::of(n as f64);
    match model_id {
        ModelId::A => Err(Error::InvalidInput(
            "model a has a constant gap; sector density is not defined".into(),
        )),
        ModelId::Btc | ModelId::B => {
            let spectrum = closed_form_spectrum(&ModelSpec::new(model_id, n, T::one(), gamma)?)?;
            let at = |s: i32| -> Complex<T> {
                spectrum
                    .iter()
                    .find(|e| {
                        e.label == crate::perturbation::SpectralLabel::SuperSpin { s, s_x: 0 }
                    })
                    .expect("sector (s, 0) present")
                    .value()
            };
            let mut rows = Vec::with_capacity(n);
            for s in 1..=n as i32 {
                let d = (at(s) - at(s - 1)).norm();
                let s_bar = T::of(s as f64) / nf;
                rows.push(DensityRow {
                    s_bar,
                    distance: d,
                    density: T::one() / (T::of(2.0) * gamma * s_bar),
                });
            }
            Ok(rows)
        }
        ModelId::C => {
            let lam_re = |s_x: i32| -> T {
                let sxf = T::of(s_x as f64);
                -(T::of(2.0) * gamma / nf) * sxf * sxf
            };
            let mut rows = Vec::with_capacity(2 * n);
            for s_x in (-(n as i32) + 1)..=(n as i32) {
                let d = (lam_re(s_x) - lam_re(s_x - 1)).abs();
                let mid = T::of(s_x as f64) - T::of(0.5);
                let s_bar = mid / nf;
                rows.push(DensityRow {
                    s_bar,
                    distance: d,
                    density: T::one() / (T::of(4.0) * gamma * s_bar.abs()),
                });
            }
            Ok(rows)
        }
    }
}

/// One matched (exact, perturbative) pair.
#[derive(Debug, Clone, Copy)]
pub struct MatchedPair<T: Real> {
    pub exact: Complex<T>,
    pub perturbative: Complex<T>,
    pub distance: T,
}

/// A perfect matching between two spectra of equal cardinality.
#[derive(Debug, Clone)]
pub struct SpectrumMatch<T: Real> {
    pub pairs: Vec<MatchedPair<T>>,
    pub max_distance: T,
    pub mean_distance: T,
    /// Always zero: the assignment is perfect by construction.
    pub unmatched: usize,
}

/// Minimum-total-distance perfect matching between two spectra under the
/// Euclidean metric in the complex plane (Hungarian algorithm, O(n^3)).
pub fn match_spectra<T: Real>(
    exact: &[Complex<T>],
    perturbative: &[Complex<T>],
) -> Result<SpectrumMatch<T>> {
    if exact.len() != perturbative.len() {
        return Err(Error::InvalidInput(format!(
            "spectra cardinality mismatch: {} vs {}",
            exact.len(),
            perturbative.len()
        )));
    }
    if exact.is_empty() {
        return Err(Error::InvalidInput("empty spectra".into()));
    }
    let n = exact.len();
    let cost = Array2::from_shape_fn((n, n), |(i, j)| (exact[i] - perturbative[j]).norm());
    let assignment = min_cost_assignment(&cost);
    let mut pairs = Vec::with_capacity(n);
    let mut max_d = T::zero();
    let mut sum_d = T::zero();
    for (i, &j) in assignment.iter().enumerate() {
        let d = cost[[i, j]];
        max_d = max_d.max(d);
        sum_d += d;
        pairs.push(MatchedPair {
            exact: exact[i],
            perturbative: perturbative[j],
            distance: d,
        });
    }
    Ok(SpectrumMatch {
        pairs,
        max_distance: max_d,
        mean_distance: sum_d / T::of(n as f64),
        unmatched: 0,
    })
}

/// Hungarian algorithm with potentials; returns the column assigned to each
/// row of the square cost matrix.
fn min_cost_assignment<T: Real>(cost: &Array2<T>) -> Vec<usize> {
    let n = cost.nrows();
    let inf = T::infinity();
    // 1-based workspaces; column 0 is the virtual root
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut row_of_col = vec![0usize; n + 1]; // 0 = unassigned
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[[i0 - 1, j - 1]] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![usize::MAX; n];
    for j in 1..=n {
        if row_of_col[j] > 0 {
            assignment[row_of_col[j] - 1] = j - 1;
        }
    }
    assignment
}

/// A detected exceptional point: the dissipation strength where a tracked
/// conjugate pair's imaginary parts vanish.
#[derive(Debug, Clone, Copy)]
pub struct EpEvent<T: Real> {
    /// Identity of the tracked pair (assignment order at its first grid point).
    pub pair_id: usize,
    /// Refined crossing location.
    pub gamma_star: T,
    /// Tracking was ambiguous at some point for this pair.
    pub low_confidence: bool,
}

/// Exact spectra over a dissipation grid plus detected pair-merging events.
#[derive(Debug, Clone)]
pub struct SweepResult<T: Real> {
    pub gammas: Vec<T>,
    /// Exact spectrum per grid point, sorted (Re descending, Im ascending).
    pub spectra: Vec<Vec<Complex<T>>>,
    pub ep_events: Vec<EpEvent<T>>,
}

/// Exact spectra of `template` (its gamma replaced by each grid value) over
/// a uniform grid, optionally locating exceptional points. Grid points are
/// diagonalized on `threads` worker threads.
pub fn sweep_gamma<T: Real>(
    template: &ModelSpec<T>,
    gamma_min: T,
    gamma_max: T,
    steps: usize,
    detect_ep: bool,
    ep_threshold: T,
    threads: usize,
) -> Result<SweepResult<T>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(
            "sweep needs at least 2 steps".into(),
        ));
    }
    if !(gamma_min >= T::zero()) || !(gamma_max > gamma_min) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= gamma_min < gamma_max, got [{gamma_min}, {gamma_max}]"
        )));
    }
    if !(ep_threshold > T::zero()) {
        return Err(Error::InvalidArgument(
            "ep_threshold must be positive".into(),
        ));
    }
    let span = gamma_max - gamma_min;
    let gammas: Vec<T> = (0..steps)
        .map(|i| gamma_min + span * T::of(i as f64) / T::of(steps as f64 - 1.0))
        .collect();

    let spectra = parallel_spectra(template, &gammas, threads)?;

    let ep_events = if detect_ep {
        track_ep_events(template, &gammas, &spectra, ep_threshold, Branch::Upper)?
    } else {
        Vec::new()
    };

    Ok(SweepResult {
        gammas,
        spectra,
        ep_events,
    })
}

type SpectrumSlot<T> = Mutex<Option<Result<Vec<Complex<T>>>>>;

fn parallel_spectra<T: Real>(
    template: &ModelSpec<T>,
    gammas: &[T],
    threads: usize,
) -> Result<Vec<Vec<Complex<T>>>> {
    let threads = threads.max(1).min(gammas.len());
    let slots: Vec<SpectrumSlot<T>> = (0..gammas.len()).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= gammas.len() {
                    break;
                }
                let res = spectrum_at(template, gammas[i]);
                *slots[i].lock().expect("slot lock") = Some(res);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().expect("slot lock").expect("slot filled"))
        .collect()
}

fn spectrum_at<T: Real>(template: &ModelSpec<T>, gamma: T) -> Result<Vec<Complex<T>>> {
    let spec = template.with_gamma(gamma)?;
    let liou = assemble(&spec)?;
    eigensolve::eigenvalues(&liou.total)
}

/// Which conjugate branch to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Track eigenvalues with Im > threshold.
    Upper,
    /// Track eigenvalues with Im < -threshold.
    Lower,
}

impl Branch {
    fn signed_im<T: Real>(self, z: Complex<T>) -> T {
        match self {
            Branch::Upper => z.im,
            Branch::Lower => -z.im,
        }
    }
}

struct TrackedPair<T: Real> {
    id: usize,
    pos: Complex<T>,
    motion: Option<T>,
    low_confidence: bool,
    alive: bool,
}

impl<T: Real> TrackedPair<T> {
    /// Continuation guess at the next grid point. Real parts scale linearly
    /// in gamma to first order, imaginary parts stay put until a merging
    /// bends them; rescaling Re beats plain nearest-neighbor wherever the
    /// grid is coarse relative to the sector spacing.
    fn predicted(&self, gamma_curr: T, gamma_next: T) -> Complex<T> {
        if gamma_curr > T::zero() {
            Complex::new(self.pos.re * gamma_next / gamma_curr, self.pos.im)
        } else {
            self.pos
        }
    }
}

/// Detect pair mergings along the grid and refine each to a relative width
/// of 1e-4 in gamma.
///
/// Crossings are bracketed by the grid points where the merging pair's |Im|
/// falls below `threshold` (equivalently, where the count of eigenvalues
/// within `threshold` of the real axis jumps) and localized by bisection,
/// which stays reliable even where the spectrum moves fast between grid
/// points. Pair identities come from a nearest-neighbor continuation of the
/// oscillating branch; ambiguous continuations mark the pair, and its
/// events, low-confidence. Exposed for branch-symmetry checks;
/// [`sweep_gamma`] uses the upper branch.
pub fn track_ep_events<T: Real>(
    template: &ModelSpec<T>,
    gammas: &[T],
    spectra: &[Vec<Complex<T>>],
    threshold: T,
    branch: Branch,
) -> Result<Vec<EpEvent<T>>> {
    let count_real = |vals: &[Complex<T>]| vals.iter().filter(|z| z.im.abs() <= threshold).count();

    let mut pairs: Vec<TrackedPair<T>> = spectra[0]
        .iter()
        .filter(|z| branch.signed_im(**z) > threshold)
        .enumerate()
        .map(|(id, &pos)| TrackedPair {
            id,
            pos,
            motion: None,
            low_confidence: false,
            alive: true,
        })
        .collect();

    let mut events: Vec<EpEvent<T>> = Vec::new();
    for step in 1..gammas.len() {
        // locate mergings inside (gamma[step-1], gamma[step]]
        let c_prev = count_real(&spectra[step - 1]);
        let c_now = count_real(&spectra[step]);
        if c_now > c_prev {
            let mut brackets = Vec::new();
            locate_count_jumps(
                template,
                gammas[step - 1],
                gammas[step],
                c_prev,
                c_now,
                threshold,
                &mut brackets,
            )?;
            for (gamma_star, gamma_before, merged_pairs) in brackets {
                // the about-to-merge eigenvalues have the smallest |Im| among
                // the still-oscillating ones just below the crossing
                let probe = spectrum_at(template, gamma_before)?;
                let mut oscillating: Vec<Complex<T>> = probe
                    .into_iter()
                    .filter(|z| branch.signed_im(*z) > threshold)
                    .collect();
                oscillating.sort_by(|a, b| {
                    a.im.abs()
                        .partial_cmp(&b.im.abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                for merge_pos in oscillating.iter().take(merged_pairs) {
                    // walk the merging eigenvalue back to the grid point the
                    // tracked pairs sit on; geometric spacing keeps each hop
                    // small where the trajectory has its square-root kink
                    let back = continue_backward(
                        template,
                        gamma_before,
                        gammas[step - 1],
                        *merge_pos,
                        threshold,
                        branch,
                    )?;
                    let mut best: Option<(T, usize)> = None;
                    for (idx, p) in pairs.iter().enumerate() {
                        if !p.alive {
                            continue;
                        }
                        let d = (p.pos - back).norm();
                        if best.is_none_or(|(bd, _)| d < bd) {
                            best = Some((d, idx));
                        }
                    }
                    match best {
                        Some((dist, idx)) => {
                            let pair = &mut pairs[idx];
                            let mismatch = dist > T::of(1e-3) * (T::one() + back.norm());
                            events.push(EpEvent {
                                pair_id: pair.id,
                                gamma_star,
                                low_confidence: pair.low_confidence || mismatch,
                            });
                            pair.alive = false;
                        }
                        None => {
                            events.push(EpEvent {
                                pair_id: usize::MAX,
                                gamma_star,
                                low_confidence: true,
                            });
                        }
                    }
                }
            }
        }

        // continue the surviving pairs to the new grid point
        let candidates: Vec<Complex<T>> = spectra[step]
            .iter()
            .copied()
            .filter(|z| branch.signed_im(*z) > threshold)
            .collect();
        for pair in pairs.iter_mut().filter(|p| p.alive) {
            let predicted = pair.predicted(gammas[step - 1], gammas[step]);
            let prediction_jump = (predicted - pair.pos).norm();
            let mut best = T::infinity();
            let mut second = T::infinity();
            let mut best_z = pair.pos;
            for &z in &candidates {
                let d = (z - predicted).norm();
                if d < best {
                    second = best;
                    best = d;
                    best_z = z;
                } else if d < second {
                    second = d;
                }
            }
            let radius = pair
                .motion
                .map(|m| T::of(3.0) * m.max(prediction_jump).max(threshold))
                .unwrap_or(T::infinity());
            if best > radius || second < T::of(2.0) * best {
                pair.low_confidence = true;
            }
            pair.motion = Some((best_z - pair.pos).norm());
            pair.pos = best_z;
        }
    }
    events.sort_by(|a, b| {
        a.gamma_star
            .partial_cmp(&b.gamma_star)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.pair_id.cmp(&b.pair_id))
    });
    Ok(events)
}

/// Continue one oscillating eigenvalue from `gamma_hi` down to `gamma_lo`
/// through eigenvalue evaluations at geometrically spaced points.
fn continue_backward<T: Real>(
    template: &ModelSpec<T>,
    gamma_hi: T,
    gamma_lo: T,
    start: Complex<T>,
    threshold: T,
    branch: Branch,
) -> Result<Complex<T>> {
    let span = gamma_hi - gamma_lo;
    if !(span > T::zero()) {
        return Ok(start);
    }
    let mut z = start;
    for k in [32.0, 16.0, 8.0, 4.0, 2.0, 1.0] {
        let gamma = gamma_hi - span / T::of(k);
        let spectrum = spectrum_at(template, gamma)?;
        let nearest = spectrum
            .into_iter()
            .filter(|c| branch.signed_im(*c) > -threshold)
            .min_by(|a, b| {
                (*a - z)
                    .norm()
                    .partial_cmp(&(*b - z).norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        if let Some(nearest) = nearest {
            z = nearest;
        }
    }
    Ok(z)
}

/// Recursively bisect until every jump of the near-real-axis eigenvalue
/// count is bracketed to relative width 1e-4; emits
/// `(gamma_star, gamma_just_below, merged_pair_count)` per bracket.
fn locate_count_jumps<T: Real>(
    template: &ModelSpec<T>,
    lo: T,
    hi: T,
    c_lo: usize,
    c_hi: usize,
    threshold: T,
    out: &mut Vec<(T, T, usize)>,
) -> Result<()> {
    if c_hi <= c_lo {
        return Ok(());
    }
    let mid = (lo + hi) * T::of(0.5);
    if hi - lo <= T::of(1e-4) * mid.abs().max(T::min_positive_value()) {
        out.push((mid, lo, (c_hi - c_lo).div_euclid(2).max(1)));
        return Ok(());
    }
    let c_mid = spectrum_at(template, mid)?
        .iter()
        .filter(|z| z.im.abs() <= threshold)
        .count();
    locate_count_jumps(template, lo, mid, c_lo, c_mid, threshold, out)?;
    locate_count_jumps(template, mid, hi, c_mid, c_hi, threshold, out)
}
