//! Numerical Fourier oracle on uniform grids.
//!
//! A [`Grid`] with half-width `T` and `N` samples places `t_k = -T + k h`,
//! `h = 2T/N`, `k = 0..N`. Its dual frequency grid has half-width `pi/h`
//! and step `pi/T`, so the transform of a time grid is again a [`Grid`].
//!
//! With that alignment the phase factor `e^{-i w_j t_k}` collapses to
//! `(-1)^{j+k} e^{-2 pi i jk/N}`, so the continuous transform is an FFT
//! between two sign flips. The rectangle sum over `N` samples is the
//! trapezoid rule on the periodic closure of `[-T, T]`.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfun::ExpPolyFunction;

pub const REFERENCE_HALF_WIDTH: f64 = 30.0;
pub const REFERENCE_SAMPLES: usize = 1 << 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "T")]
    half_width: f64,
    #[serde(rename = "N")]
    samples: usize,
}

impl Grid {
    pub fn new(half_width: f64, samples: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("T = {half_width} must be positive")));
        }
        if samples < 8 || !samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "N = {samples} must be a power of two >= 8"
            )));
        }
        Ok(Grid {
            half_width,
            samples,
        })
    }

    /// `T = 30`, `N = 2^14`.
    pub fn reference() -> Self {
        Grid {
            half_width: REFERENCE_HALF_WIDTH,
            samples: REFERENCE_SAMPLES,
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.samples as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.step()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples).map(|k| self.point(k))
    }

    /// The frequency grid paired with this time grid (and vice versa).
    pub fn dual(&self) -> Grid {
        Grid {
            half_width: PI / self.step(),
            samples: self.samples,
        }
    }

    /// Index of the sample nearest to `t`, if on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = ((t + self.half_width) / self.step()).round();
        (k >= 0.0 && (k as usize) < self.samples).then_some(k as usize)
    }

    fn same_as(&self, other: &Grid) -> bool {
        self.samples == other.samples
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: grid.point(k) });
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFunction {
            grid,
            values: vec![ZERO; grid.len()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, k: usize) -> Complex64 {
        self.values[k]
    }

    fn check_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "T={} N={} vs T={} N={}",
                self.grid.half_width, self.grid.samples, other.grid.half_width, other.grid.samples
            )))
        }
    }

    pub fn zip_with(
        &self,
        other: &SampledFunction,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<SampledFunction> {
        self.check_grid(other)?;
        Ok(SampledFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn map(&self, op: impl Fn(f64, Complex64) -> Complex64) -> SampledFunction {
        SampledFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(k, &v)| op(self.grid.point(k), v))
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> SampledFunction {
        self.map(|_, v| v * s)
    }

    /// `max_k |a_k - b_k|` over samples whose point satisfies `keep`.
    pub fn sup_diff_where(&self, other: &SampledFunction, keep: impl Fn(f64) -> bool) -> Result<f64> {
        self.check_grid(other)?;
        Ok((0..self.grid.len())
            .filter(|&k| keep(self.grid.point(k)))
            .map(|k| (self.values[k] - other.values[k]).norm())
            .fold(0.0, f64::max))
    }

    pub fn sup_diff(&self, other: &SampledFunction) -> Result<f64> {
        self.sup_diff_where(other, |_| true)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Writes the samples as `t,re,im` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "re", "im"])?;
        for (k, v) in self.values.iter().enumerate() {
            w.write_record([
                format!("{:.16e}", self.grid.point(k)),
                format!("{:.16e}", v.re),
                format!("{:.16e}", v.im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `t,re,im` rows; the grid is recovered from the time column,
    /// which must be uniform and start at `-T`.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["t", "re", "im"] {
            return Err(Error::Parse(format!("expected header t,re,im, found {headers:?}")));
        }
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != 3 {
                return Err(Error::Parse(format!("row with {} fields", rec.len())));
            }
            let num = |i: usize| -> Result<f64> {
                rec[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{:?}: {e}", &rec[i])))
            };
            ts.push(num(0)?);
            values.push(Complex64::new(num(1)?, num(2)?));
        }
        if ts.is_empty() {
            return Err(Error::Parse("no samples".into()));
        }
        let grid = Grid::new(-ts[0], ts.len())?;
        let h = grid.step();
        for (k, &t) in ts.iter().enumerate() {
            if (t - grid.point(k)).abs() > 1e-9 * grid.half_width.max(h) {
                return Err(Error::Parse(format!(
                    "row {k}: t = {t} is off the uniform grid (expected {})",
                    grid.point(k)
                )));
            }
        }
        SampledFunction::new(grid, values)
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))?;
        let sidecar = grid_sidecar_path(path);
        std::fs::write(sidecar, serde_json::to_string_pretty(&self.grid)? + "\n")?;
        Ok(())
    }

    pub fn read_csv_file(path: &Path) -> Result<Self> {
        let s = SampledFunction::read_csv(std::fs::File::open(path)?)?;
        let sidecar = grid_sidecar_path(path);
        if let Ok(text) = std::fs::read_to_string(&sidecar) {
            let g: Grid = serde_json::from_str(&text)?;
            let g = Grid::new(g.half_width, g.samples)?;
            if !g.same_as(&s.grid) {
                return Err(Error::GridMismatch(format!(
                    "{} declares T={} N={}, rows give T={} N={}",
                    sidecar.display(),
                    g.half_width,
                    g.samples,
                    s.grid.half_width,
                    s.grid.samples
                )));
            }
        }
        Ok(s)
    }
}

/// `out.csv` -> `out.grid.json`
pub fn grid_sidecar_path(csv: &Path) -> std::path::PathBuf {
    csv.with_extension("grid.json")
}

/// Samples `f` with the mean of one-sided limits, so jumps sit at their
/// midpoint.
pub fn sample(f: &ExpPolyFunction, grid: Grid) -> Result<SampledFunction> {
    sample_fn(|t| f.eval_avg(t), grid)
}

pub fn sample_fn(f: impl Fn(f64) -> Complex64, grid: Grid) -> Result<SampledFunction> {
    let values = grid.points().map(f).collect();
    SampledFunction::new(grid, values)
}

fn alternate(values: &mut [Complex64]) {
    for v in values.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
}

fn fft(values: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(values.len())
    } else {
        planner.plan_fft_forward(values.len())
    };
    plan.process(values);
}

/// Continuous transform `F(w_j) ~ int e^{-i w_j t} f(t) dt` on the dual grid.
pub fn ft_numeric(s: &SampledFunction) -> SampledFunction {
    let mut v = s.values.clone();
    alternate(&mut v);
    fft(&mut v, false);
    alternate(&mut v);
    let h = s.grid.step();
    for x in v.iter_mut() {
        *x *= h;
    }
    SampledFunction {
        grid: s.grid.dual(),
        values: v,
    }
}

/// [`ft_numeric`] with an error estimate: the Richardson difference against
/// the half-resolution transform (`O(h^2)` for `C^2` integrands) plus the
/// magnitude of the samples at the window edges as a truncation indicator.
pub fn ft_numeric_with_error(s: &SampledFunction) -> (SampledFunction, f64) {
    let fine = ft_numeric(s);
    let n = s.grid.len();
    let coarse_grid = Grid {
        half_width: s.grid.half_width,
        samples: n / 2,
    };
    let coarse_vals: Vec<Complex64> = s.values.iter().step_by(2).copied().collect();
    let coarse = ft_numeric(&SampledFunction {
        grid: coarse_grid,
        values: coarse_vals,
    });
    // the coarse spectrum covers the central half of the fine one
    let richardson = (0..n / 2)
        .map(|j| (fine.values[j + n / 4] - coarse.values[j]).norm())
        .fold(0.0, f64::max)
        / 3.0;
    let edge = 2.0 * s.grid.half_width * s.values[0].norm().max(s.values[n - 1].norm());
    (fine, richardson + edge)
}

/// Inverse transform `f(t_k) ~ (1/2pi) int e^{i w t_k} F(w) dw` on the dual grid.
///
/// A `1/(iw)` tail in the spectrum (a jump of `f` at `t = 0`) is estimated
/// from symmetric pairs of edge samples. When the estimate is stable it is
/// subtracted as `A/(iw + a)` and added back as `A e^{-a t} u(t)` in closed
/// form, which removes the Gibbs ringing that truncating a `1/w` spectrum
/// leaves next to the jump.
pub fn ift_numeric(spec: &SampledFunction) -> SampledFunction {
    let n = spec.grid.len();
    let time = spec.grid.dual();
    let jump = origin_jump_estimate(spec);
    let decay = (36.0 / time.half_width).max(1.0);
    let mut v = spec.values.clone();
    if let Some(a) = jump {
        for (j, x) in v.iter_mut().enumerate() {
            let w = spec.grid.point(j);
            *x -= a / (I * w + decay);
        }
    }
    alternate(&mut v);
    fft(&mut v, true);
    alternate(&mut v);
    // sum_j F_j e^{...} * dw/(2 pi), with dw/(2 pi) = 1/(N h_time)
    let norm = 1.0 / (n as f64 * time.step());
    for x in v.iter_mut() {
        *x *= norm;
    }
    if let Some(a) = jump {
        for (k, x) in v.iter_mut().enumerate() {
            let t = time.point(k);
            let step = if t > 0.0 {
                1.0
            } else if t == 0.0 {
                0.5
            } else {
                0.0
            };
            *x += a * step * (-decay * t).exp();
        }
    }
    SampledFunction { grid: time, values: v }
}

/// `A` in `F(w) ~ A/(iw)` near the edges of the spectrum, if consistent.
fn origin_jump_estimate(spec: &SampledFunction) -> Option<Complex64> {
    let n = spec.grid.len();
    let pairs = 4.min(n / 4);
    let estimates: Vec<Complex64> = (1..=pairs)
        .map(|j| {
            let (lo, hi) = (j, n - j);
            let wl = spec.grid.point(lo);
            let wh = spec.grid.point(hi);
            0.5 * (I * wl * spec.values[lo] + I * wh * spec.values[hi])
        })
        .collect();
    let first = estimates[0];
    let size = spec.sup_norm().max(f64::MIN_POSITIVE);
    if first.norm() <= 1e-9 * size {
        return None;
    }
    let stable = estimates
        .iter()
        .all(|e| (*e - first).norm() <= 1e-2 * first.norm());
    stable.then_some(first)
}

/// `(a * b)(t_m) ~ h sum_k a(t_m - t_k) b(t_k)`: linear convolution via a
/// zero-padded FFT, with the window on the original grid returned.
pub fn conv_numeric(a: &SampledFunction, b: &SampledFunction) -> Result<SampledFunction> {
    a.check_grid(b)?;
    let n = a.grid.len();
    let mut fa = vec![ZERO; 2 * n];
    let mut fb = vec![ZERO; 2 * n];
    fa[..n].copy_from_slice(&a.values);
    fb[..n].copy_from_slice(&b.values);
    fft(&mut fa, false);
    fft(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    fft(&mut fa, true);
    // t_m - t_k = t_{m - k + N/2}, so entry q = m + N/2 of the linear result
    let h = a.grid.step();
    let scale = h / (2 * n) as f64;
    let values = (0..n).map(|m| fa[m + n / 2] * scale).collect();
    Ok(SampledFunction {
        grid: a.grid,
        values,
    })
}

/// Trapezoid rule of `|s|` on the periodic closure of `[-T, T]`.
pub fn l1_norm_numeric(s: &SampledFunction) -> f64 {
    s.grid.step() * s.values.iter().map(|v| v.norm()).sum::<f64>()
}

/// [`l1_norm_numeric`] with the Richardson difference against every other
/// sample as the error estimate.
pub fn l1_norm_numeric_with_error(s: &SampledFunction) -> (f64, f64) {
    let fine = l1_norm_numeric(s);
    let coarse = 2.0 * s.grid.step() * s.values.iter().step_by(2).map(|v| v.norm()).sum::<f64>();
    (fine, (fine - coarse).abs() / 3.0)
}
