//! Zero isolation by the argument principle.
//!
//! A square containing the disk is quadrisected recursively. The winding
//! number of each cell boundary is obtained by continuous phase tracking:
//! steps are accepted only when the observed phase increment agrees with the
//! first-order prediction `Im(h'/h dz)` at both ends, which forces small steps
//! near zeros close to the path. Cells with winding one are finished with
//! Newton's method and certified by the winding number of a small circle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Holomorphic, ZeroError};

/// One zero of a holomorphic function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: Complex64,
    pub multiplicity: u32,
    pub modulus: f64,
    pub certified: bool,
    /// Radius of the circle whose winding number certifies the multiplicity.
    pub certificate_radius: f64,
}

impl ZeroRecord {
    pub fn new(location: Complex64, multiplicity: u32, certified: bool, certificate_radius: f64) -> Self {
        ZeroRecord {
            location,
            multiplicity,
            modulus: location.norm(),
            certified,
            certificate_radius,
        }
    }
}

/// All zeros of a function in a closed disk, sorted by modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroLedger {
    pub radius: f64,
    pub requested_radius: f64,
    pub records: Vec<ZeroRecord>,
    pub fingerprint: String,
    /// Set when the radius was moved outward because a zero sat on the circle.
    pub perturbed: bool,
}

impl ZeroLedger {
    /// Ledger with no zeros, for functions known to be zero-free.
    pub fn empty(radius: f64, fingerprint: String) -> ZeroLedger {
        ZeroLedger {
            radius,
            requested_radius: radius,
            records: Vec::new(),
            fingerprint,
            perturbed: false,
        }
    }

    pub fn multiplicity_sum(&self) -> u64 {
        self.records.iter().map(|r| r.multiplicity as u64).sum()
    }

    /// `n(t)`, or the truncated `n_k(t)` when `k` is given.
    pub fn count(&self, t: f64, k: Option<u32>) -> u64 {
        self.records
            .iter()
            .take_while(|r| r.modulus <= t)
            .map(|r| truncate(r.multiplicity, k) as u64)
            .sum()
    }

    /// Counting function with lower limit 1:
    /// `N_k(r) = sum_{1<|a|<=r} min(m,k) log(r/|a|) + n_k(1) log r`.
    pub fn counting(&self, r: f64, k: Option<u32>) -> Result<f64, ZeroError> {
        if r > self.radius * (1.0 + 1e-12) {
            return Err(ZeroError::RadiusExceedsLedger {
                radius: r,
                ledger_radius: self.radius,
            });
        }
        if r < 1.0 {
            return Err(ZeroError::InvalidRadius(r));
        }
        let log_r = r.ln();
        Ok(self
            .records
            .iter()
            .take_while(|rec| rec.modulus <= r)
            .map(|rec| {
                let m = truncate(rec.multiplicity, k) as f64;
                if rec.modulus <= 1.0 {
                    m * log_r
                } else {
                    m * (r / rec.modulus).ln()
                }
            })
            .sum())
    }

    /// Counting function in Jensen's normalization,
    /// `sum_{0<|a|<r} m log(r/|a|)`; zeros at the origin are excluded.
    pub fn jensen_counting(&self, r: f64) -> f64 {
        self.records
            .iter()
            .take_while(|rec| rec.modulus < r)
            .filter(|rec| rec.modulus > 0.0)
            .map(|rec| rec.multiplicity as f64 * (r / rec.modulus).ln())
            .sum()
    }

    /// Multiplicity of a zero at (within `tol` of) the origin.
    pub fn order_at_origin(&self, tol: f64) -> u32 {
        self.records
            .iter()
            .take_while(|r| r.modulus <= tol)
            .map(|r| r.multiplicity)
            .sum()
    }

    /// Records of multiplicity at least `m`.
    pub fn with_multiplicity_at_least(&self, m: u32) -> impl Iterator<Item = &ZeroRecord> {
        self.records.iter().filter(move |r| r.multiplicity >= m)
    }

    /// Restriction to a smaller disk.
    pub fn restricted(&self, radius: f64) -> ZeroLedger {
        ZeroLedger {
            radius: radius.min(self.radius),
            requested_radius: radius.min(self.requested_radius),
            records: self
                .records
                .iter()
                .filter(|r| r.modulus <= radius)
                .copied()
                .collect(),
            fingerprint: self.fingerprint.clone(),
            perturbed: self.perturbed,
        }
    }
}

fn truncate(m: u32, k: Option<u32>) -> u32 {
    match k {
        Some(k) => m.min(k),
        None => m,
    }
}

/// Tunables for [`find_zeros_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroSettings {
    /// Location tolerance; also the boundary-zero tolerance.
    pub tol: f64,
    pub max_depth: u32,
    /// Largest accepted phase increment per tracking step (radians).
    pub max_phase_step: f64,
}

impl Default for ZeroSettings {
    fn default() -> Self {
        ZeroSettings {
            tol: 1e-10,
            max_depth: 48,
            max_phase_step: 0.7,
        }
    }
}

// Split fractions tried in turn when a zero sits on a dividing line.
const SPLITS: [f64; 5] = [0.513_7, 0.478_3, 0.531_1, 0.459_7, 0.547_9];
const SQUARE_MARGINS: [f64; 4] = [1.013_7, 1.021_9, 1.033_1, 1.047_3];

#[derive(Debug)]
enum TrackError {
    NearZero(Complex64),
    Eval(ZeroError),
}

impl From<TrackError> for ZeroError {
    fn from(e: TrackError) -> ZeroError {
        match e {
            TrackError::NearZero(z) => ZeroError::ZeroOnPath(z),
            TrackError::Eval(e) => e,
        }
    }
}

fn sample<H: Holomorphic + ?Sized>(h: &H, z: Complex64) -> Result<(f64, Complex64), TrackError> {
    match h.value_and_log_derivative(z) {
        Ok((v, l)) => {
            if v.is_zero() {
                Err(TrackError::NearZero(z))
            } else {
                Ok((v.arg(), l))
            }
        }
        Err(crate::exprjet::ExprError::ZeroAtPoint(z)) => Err(TrackError::NearZero(z)),
        Err(e) => Err(TrackError::Eval(ZeroError::Evaluation(e))),
    }
}

fn wrap(x: f64) -> f64 {
    let mut y = x % TAU;
    if y > PI {
        y -= TAU;
    } else if y < -PI {
        y += TAU;
    }
    y
}

/// Total phase change of `h` along a parametrized path `t in [0,1]`.
fn track<H, P>(h: &H, path: P, max_phase_step: f64) -> Result<f64, TrackError>
where
    H: Holomorphic + ?Sized,
    P: Fn(f64) -> (Complex64, Complex64),
{
    let (z0, dz0) = path(0.0);
    let (mut phase, mut logd) = sample(h, z0)?;
    let mut deriv = dz0;
    let speed = dz0.norm().max(1e-300);
    let mut t = 0.0;
    let mut dt = (0.25 / (logd.norm() * speed + 1e-300)).min(1.0 / 16.0);
    let mut total = 0.0;
    let tol_pred = 0.35 * max_phase_step / 0.7;
    while t < 1.0 {
        let step = dt.min(1.0 - t);
        let (z1, dz1) = path(t + step);
        let (phase1, logd1) = sample(h, z1)?;
        let (zm, _) = path(t + 0.5 * step);
        let (phasem, _) = sample(h, zm)?;
        let first = wrap(phasem - phase);
        let second = wrap(phase1 - phasem);
        let dphi = first + second;
        let pred0 = (logd * deriv * step).im;
        let pred1 = (logd1 * dz1 * step).im;
        let within_trust = (logd * deriv).norm() * step <= 2.0 && (logd1 * dz1).norm() * step <= 2.0;
        if dphi.abs() <= max_phase_step
            && (wrap(phase1 - phase) - dphi).abs() <= 1e-9
            && within_trust
            && (pred0 - dphi).abs() <= tol_pred
            && (pred1 - dphi).abs() <= tol_pred
        {
            total += dphi;
            t += step;
            phase = phase1;
            logd = logd1;
            deriv = dz1;
            dt = step * 1.6;
        } else {
            dt = step * 0.5;
            if dt * speed < 1e-11 * (1.0 + z1.norm()) {
                return Err(TrackError::NearZero(z1));
            }
        }
    }
    Ok(total)
}

fn segment_phase<H: Holomorphic + ?Sized>(h: &H, a: Complex64, b: Complex64, s: f64) -> Result<f64, TrackError> {
    let d = b - a;
    track(h, |t| (a + d * t, d), s)
}

fn to_winding(total_phase: f64, at: Complex64) -> Result<i64, TrackError> {
    let w = total_phase / TAU;
    let rounded = w.round();
    if (w - rounded).abs() > 0.1 {
        return Err(TrackError::NearZero(at));
    }
    Ok(rounded as i64)
}

fn circle_winding_raw<H: Holomorphic + ?Sized>(
    h: &H,
    center: Complex64,
    radius: f64,
    s: f64,
) -> Result<i64, TrackError> {
    let total = track(
        h,
        |t| {
            let e = Complex64::from_polar(1.0, TAU * t);
            (center + e * radius, Complex64::new(0.0, TAU) * e * radius)
        },
        s,
    )?;
    to_winding(total, center)
}

/// Winding number of `h` around the circle `|z - center| = radius`.
pub fn winding_number_circle<H: Holomorphic + ?Sized>(
    h: &H,
    center: Complex64,
    radius: f64,
) -> Result<i64, ZeroError> {
    circle_winding_raw(h, center, radius, ZeroSettings::default().max_phase_step).map_err(Into::into)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    lo: Complex64,
    hi: Complex64,
    winding: u32,
}

impl Cell {
    fn width(&self) -> f64 {
        (self.hi.re - self.lo.re).max(self.hi.im - self.lo.im)
    }

    fn center(&self) -> Complex64 {
        (self.lo + self.hi) * 0.5
    }

    fn contains(&self, z: Complex64) -> bool {
        z.re > self.lo.re && z.re < self.hi.re && z.im > self.lo.im && z.im < self.hi.im
    }

    fn distance_to_boundary(&self, z: Complex64) -> f64 {
        (z.re - self.lo.re)
            .min(self.hi.re - z.re)
            .min(z.im - self.lo.im)
            .min(self.hi.im - z.im)
    }

    fn distance_from_origin(&self) -> f64 {
        let dx = if self.lo.re > 0.0 {
            self.lo.re
        } else if self.hi.re < 0.0 {
            -self.hi.re
        } else {
            0.0
        };
        let dy = if self.lo.im > 0.0 {
            self.lo.im
        } else if self.hi.im < 0.0 {
            -self.hi.im
        } else {
            0.0
        };
        dx.hypot(dy)
    }
}

struct Finder<'a, H: Holomorphic + ?Sized> {
    h: &'a H,
    settings: ZeroSettings,
    keep_radius: f64,
}

impl<H: Holomorphic + ?Sized> Finder<'_, H> {
    fn rect_winding(&self, lo: Complex64, hi: Complex64) -> Result<i64, TrackError> {
        let s = self.settings.max_phase_step;
        let a = lo;
        let b = Complex64::new(hi.re, lo.im);
        let c = hi;
        let d = Complex64::new(lo.re, hi.im);
        let total = segment_phase(self.h, a, b, s)?
            + segment_phase(self.h, b, c, s)?
            + segment_phase(self.h, c, d, s)?
            + segment_phase(self.h, d, a, s)?;
        to_winding(total, (lo + hi) * 0.5)
    }

    fn newton(&self, cell: &Cell, multiplicity: f64) -> Option<Complex64> {
        let mut z = cell.center();
        let w = cell.width();
        for _ in 0..80 {
            let (_, l) = match self.h.value_and_log_derivative(z) {
                Ok(v) => v,
                Err(crate::exprjet::ExprError::ZeroAtPoint(_)) => return Some(z),
                Err(_) => return None,
            };
            if l.norm() == 0.0 || !l.norm().is_finite() {
                return None;
            }
            let step = multiplicity / l;
            z -= step;
            if (z - cell.center()).norm() > w {
                return None;
            }
            if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        None
    }

    fn try_isolate(&self, cell: &Cell) -> Result<Option<ZeroRecord>, ZeroError> {
        let wcount = cell.winding;
        let small = cell.width() < 1e-3 * (1.0 + self.keep_radius);
        if wcount != 1 && !small {
            return Ok(None);
        }
        let Some(z) = self.newton(cell, wcount as f64) else {
            return Ok(None);
        };
        if !cell.contains(z) {
            return Ok(None);
        }
        let d = cell.distance_to_boundary(z);
        let mut eps = (0.9 * d).min(0.25 * cell.width());
        if eps <= 1e-9 * (1.0 + z.norm()) {
            return Ok(None);
        }
        let s = self.settings.max_phase_step;
        match circle_winding_raw(self.h, z, eps, s) {
            Ok(m) if m == wcount as i64 => {}
            Ok(_) | Err(TrackError::NearZero(_)) => return Ok(None),
            Err(e) => return Err(e.into()),
        }
        if wcount > 1 {
            // A genuine multiple zero keeps its full winding on shrinking circles.
            // Below `cluster` the function is at the rounding floor and the
            // group is reported as one zero of the combined multiplicity.
            let floor = (10.0 * self.settings.tol).max(1e-9 * (1.0 + z.norm()));
            let cluster = 1e-6 * (1.0 + z.norm());
            while eps * 0.1 >= floor {
                match circle_winding_raw(self.h, z, eps * 0.1, s) {
                    Ok(m) if m == wcount as i64 => eps *= 0.1,
                    Ok(_) | Err(TrackError::NearZero(_)) if eps <= cluster => break,
                    Ok(_) | Err(TrackError::NearZero(_)) => return Ok(None),
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(Some(ZeroRecord::new(z, wcount, true, eps)))
    }

    fn solve(&self, cell: Cell, depth: u32) -> Result<Vec<ZeroRecord>, ZeroError> {
        if cell.winding == 0 {
            return Ok(Vec::new());
        }
        if cell.distance_from_origin() > self.keep_radius * (1.0 + 1e-9) + self.settings.tol {
            return Ok(Vec::new());
        }
        if let Some(rec) = self.try_isolate(&cell)? {
            return Ok(vec![rec]);
        }
        if depth >= self.settings.max_depth || cell.width() < self.settings.tol {
            let c = cell.center();
            let r = 0.75 * cell.width();
            let certified = matches!(
                circle_winding_raw(self.h, c, r, self.settings.max_phase_step),
                Ok(m) if m == cell.winding as i64
            );
            if cell.width() < 1e3 * self.settings.tol.max(1e-12 * (1.0 + c.norm())) {
                return Ok(vec![ZeroRecord::new(c, cell.winding, certified, r)]);
            }
            return Err(ZeroError::NonConvergence {
                center: c,
                half_width: cell.width() / 2.0,
                winding: cell.winding,
            });
        }
        let children = match self.split(&cell) {
            Ok(c) => c,
            Err(e) => {
                let c = cell.center();
                let r = cell.width();
                if r > 1e-6 * (1.0 + c.norm()) {
                    return Err(e);
                }
                return match circle_winding_raw(self.h, c, r, self.settings.max_phase_step) {
                    Ok(m) if m == cell.winding as i64 => Ok(vec![ZeroRecord::new(c, cell.winding, true, r)]),
                    _ => Err(e),
                };
            }
        };
        let results: Vec<Result<Vec<ZeroRecord>, ZeroError>> = children
            .into_par_iter()
            .map(|child| self.solve(child, depth + 1))
            .collect();
        let mut out = Vec::new();
        for r in results {
            out.extend(r?);
        }
        Ok(out)
    }

    fn split(&self, cell: &Cell) -> Result<Vec<Cell>, ZeroError> {
        let mut last = None;
        for (i, &fx) in SPLITS.iter().enumerate() {
            let fy = SPLITS[(i + 2) % SPLITS.len()];
            let mx = cell.lo.re + fx * (cell.hi.re - cell.lo.re);
            let my = cell.lo.im + fy * (cell.hi.im - cell.lo.im);
            let rects = [
                (cell.lo, Complex64::new(mx, my)),
                (Complex64::new(mx, cell.lo.im), Complex64::new(cell.hi.re, my)),
                (Complex64::new(cell.lo.re, my), Complex64::new(mx, cell.hi.im)),
                (Complex64::new(mx, my), cell.hi),
            ];
            let mut children = Vec::with_capacity(4);
            let mut failed = false;
            let mut sum = 0i64;
            for (lo, hi) in rects {
                let probe = Cell { lo, hi, winding: 1 };
                if probe.distance_from_origin() > self.keep_radius * (1.0 + 1e-9) + self.settings.tol {
                    // Outside the disk of interest: its zeros are discarded anyway.
                    children.push(Cell { lo, hi, winding: 0 });
                    sum = i64::MIN;
                    continue;
                }
                match self.rect_winding(lo, hi) {
                    Ok(w) if w >= 0 => {
                        if sum != i64::MIN {
                            sum += w;
                        }
                        children.push(Cell {
                            lo,
                            hi,
                            winding: w as u32,
                        });
                    }
                    Ok(w) => {
                        last = Some(ZeroError::NegativeWinding { center: (lo + hi) * 0.5, winding: w });
                        failed = true;
                        break;
                    }
                    Err(TrackError::NearZero(z)) => {
                        last = Some(ZeroError::ZeroOnPath(z));
                        failed = true;
                        break;
                    }
                    Err(TrackError::Eval(e)) => return Err(e),
                }
            }
            if failed {
                continue;
            }
            if sum != i64::MIN && sum != cell.winding as i64 {
                last = Some(ZeroError::NonConvergence {
                    center: cell.center(),
                    half_width: cell.width() / 2.0,
                    winding: cell.winding,
                });
                continue;
            }
            return Ok(children);
        }
        Err(last.unwrap_or(ZeroError::NonConvergence {
            center: cell.center(),
            half_width: cell.width() / 2.0,
            winding: cell.winding,
        }))
    }
}

/// Zeros of `h` in `|z| <= radius` with default settings and location
/// tolerance `tol`.
pub fn find_zeros<H: Holomorphic + ?Sized>(h: &H, radius: f64, tol: f64) -> Result<ZeroLedger, ZeroError> {
    find_zeros_with(
        h,
        radius,
        ZeroSettings {
            tol,
            ..ZeroSettings::default()
        },
    )
}

pub fn find_zeros_with<H: Holomorphic + ?Sized>(
    h: &H,
    radius: f64,
    settings: ZeroSettings,
) -> Result<ZeroLedger, ZeroError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(ZeroError::InvalidRadius(radius));
    }
    let mut keep = radius;
    let mut perturbed = false;
    let finder_radius = radius * 1.0 + 20.0 * settings.tol;
    let finder = Finder {
        h,
        settings,
        keep_radius: finder_radius,
    };
    let mut records = None;
    let mut last_err = None;
    for margin in SQUARE_MARGINS {
        let half = finder_radius * margin + 1e-3;
        let lo = Complex64::new(-half * 0.997_1, -half);
        let hi = Complex64::new(half, half * 0.998_3);
        let w = match finder.rect_winding(lo, hi) {
            Ok(w) if w >= 0 => w as u32,
            Ok(w) => {
                last_err = Some(ZeroError::NegativeWinding { center: Complex64::new(0.0, 0.0), winding: w });
                continue;
            }
            Err(TrackError::NearZero(z)) => {
                last_err = Some(ZeroError::ZeroOnPath(z));
                continue;
            }
            Err(TrackError::Eval(e)) => return Err(e),
        };
        match finder.solve(Cell { lo, hi, winding: w }, 0) {
            Ok(r) => {
                records = Some(r);
                break;
            }
            Err(ZeroError::ZeroOnPath(z)) => last_err = Some(ZeroError::ZeroOnPath(z)),
            Err(e) => return Err(e),
        }
    }
    let mut records = match records {
        Some(r) => r,
        None => return Err(last_err.expect("at least one attempt was made")),
    };
    if records
        .iter()
        .any(|r| (r.modulus - keep).abs() <= settings.tol)
    {
        keep += 10.0 * settings.tol;
        perturbed = true;
        if let Some(r) = records.iter().find(|r| (r.modulus - keep).abs() <= settings.tol) {
            return Err(ZeroError::BoundaryZero {
                radius: keep,
                location: r.location,
            });
        }
    }
    records.retain(|r| r.modulus <= keep);
    records.sort_by(|a, b| {
        a.modulus
            .total_cmp(&b.modulus)
            .then(a.location.arg().total_cmp(&b.location.arg()))
    });
    Ok(ZeroLedger {
        radius: keep,
        requested_radius: radius,
        records,
        fingerprint: h.fingerprint(),
        perturbed,
    })
}
