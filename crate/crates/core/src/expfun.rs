//! Exponential-polynomial functions `sum c * t^m * e^{z t}` restricted to
//! half-lines or bounded intervals.
//!
//! The class is closed under differentiation (with jumps kept as separate
//! records), convolution, translation and modulation, and the half-line part
//! maps to rational functions under the Fourier transform
//! `F(f)(w) = int e^{-iwt} f(t) dt`.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature;

/// Exponents closer than this are treated as equal (resonant convolution,
/// term merging, common denominators).
pub const EXPONENT_TIE_TOL: f64 = 1e-12;
/// Relative accuracy target of the quadrature behind multi-term L1 norms.
pub const NORM_REL_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    /// `t >= 0`
    Pos,
    /// `t <= 0`
    Neg,
    /// `a <= t <= b`
    Interval(f64, f64),
    Whole,
}

impl Support {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Support::Pos => (0.0, f64::INFINITY),
            Support::Neg => (f64::NEG_INFINITY, 0.0),
            Support::Interval(a, b) => (a, b),
            Support::Whole => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = self.bounds();
        lo <= t && t <= hi
    }

    /// Whether the support covers a right neighbourhood `[t, t + d)`.
    fn covers_right_of(&self, t: f64) -> bool {
        let (lo, hi) = self.bounds();
        lo <= t && t < hi
    }

    fn covers_left_of(&self, t: f64) -> bool {
        let (lo, hi) = self.bounds();
        lo < t && t <= hi
    }

    fn same_as(&self, other: &Support) -> bool {
        match (self, other) {
            (Support::Interval(a, b), Support::Interval(c, d)) => {
                close(*a, *c) && close(*b, *d)
            }
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Support::Neg => 0,
            Support::Pos => 1,
            Support::Interval(..) => 2,
            Support::Whole => 3,
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Pos => write!(f, "t >= 0"),
            Support::Neg => write!(f, "t <= 0"),
            Support::Interval(a, b) => write!(f, "[{a}, {b}]"),
            Support::Whole => write!(f, "R"),
        }
    }
}

/// `c * t^m * e^{z t}` on `support`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpPolyTerm {
    pub c: Complex64,
    pub m: u32,
    pub z: Complex64,
    pub support: Support,
}

impl ExpPolyTerm {
    pub fn new(c: Complex64, m: u32, z: Complex64, support: Support) -> Self {
        ExpPolyTerm { c, m, z, support }
    }

    /// Value of the analytic expression, ignoring the support.
    pub fn formula(&self, t: f64) -> Complex64 {
        if self.c == ZERO {
            return ZERO;
        }
        let tm = if self.m == 0 { 1.0 } else { t.powi(self.m as i32) };
        self.c * tm * (self.z * t).exp()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        if self.support.contains(t) {
            self.formula(t)
        } else {
            ZERO
        }
    }

    pub fn is_integrable(&self) -> bool {
        match self.support {
            Support::Interval(a, b) => a.is_finite() && b.is_finite(),
            Support::Pos => self.z.re < 0.0,
            Support::Neg => self.z.re > 0.0,
            Support::Whole => false,
        }
    }

    /// Closed-form `int |term|` for half-line supports: `|c| m! / |Re z|^{m+1}`.
    pub fn half_line_norm(&self) -> Option<f64> {
        match self.support {
            Support::Pos | Support::Neg if self.is_integrable() => {
                let a = self.z.re.abs();
                Some(self.c.norm() * factorial(self.m) / a.powi(self.m as i32 + 1))
            }
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.c.is_finite() || !self.z.is_finite() {
            return Err(Error::Parse("non-finite term parameter".into()));
        }
        if let Support::Interval(a, b) = self.support {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Parse(format!("interval [{a}, {b}] needs finite a < b")));
            }
        }
        Ok(())
    }
}

/// A jump discontinuity: `size` is the right limit minus the left limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub location: f64,
    pub size: Complex64,
}

/// A jump of the derivative of the given order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderedJump {
    pub order: usize,
    pub location: f64,
    pub size: Complex64,
}

/// Result of an L1 norm computation together with its error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norm {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExpPolyFunction {
    terms: Vec<ExpPolyTerm>,
}

#[derive(Deserialize)]
struct RawFunction {
    terms: Vec<ExpPolyTerm>,
}

impl<'de> Deserialize<'de> for ExpPolyFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFunction::deserialize(d)?;
        for t in &raw.terms {
            t.validate().map_err(serde::de::Error::custom)?;
        }
        Ok(ExpPolyFunction::new(raw.terms))
    }
}

impl ExpPolyFunction {
    /// Canonicalizing constructor.
    pub fn new(terms: Vec<ExpPolyTerm>) -> Self {
        let mut f = ExpPolyFunction { terms };
        f.canonicalize();
        f
    }

    pub fn zero() -> Self {
        ExpPolyFunction { terms: Vec::new() }
    }

    pub fn term(c: Complex64, m: u32, z: Complex64, support: Support) -> Self {
        ExpPolyFunction::new(vec![ExpPolyTerm::new(c, m, z, support)])
    }

    /// `e^{z t} u(t)` with real `z`.
    pub fn causal_exp(z: f64) -> Self {
        ExpPolyFunction::term(ONE, 0, Complex64::new(z, 0.0), Support::Pos)
    }

    pub fn terms(&self) -> &[ExpPolyTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn canonicalize(&mut self) {
        let mut merged: Vec<ExpPolyTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            if t.c == ZERO {
                continue;
            }
            match merged.iter_mut().find(|u| {
                u.m == t.m
                    && u.support.same_as(&t.support)
                    && (u.z - t.z).norm() <= EXPONENT_TIE_TOL * u.z.norm().max(1.0)
            }) {
                Some(u) => u.c += t.c,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.c != ZERO);
        merged.sort_by(|a, b| {
            let (al, ah) = a.support.bounds();
            let (bl, bh) = b.support.bounds();
            a.support
                .rank()
                .cmp(&b.support.rank())
                .then(al.total_cmp(&bl))
                .then(ah.total_cmp(&bh))
                .then(a.m.cmp(&b.m))
                .then(a.z.re.total_cmp(&b.z.re))
                .then(a.z.im.total_cmp(&b.z.im))
        });
        self.terms = merged;
    }

    pub fn is_integrable(&self) -> bool {
        self.terms.iter().all(ExpPolyTerm::is_integrable)
    }

    pub fn require_integrable(&self) -> Result<()> {
        match self.terms.iter().find(|t| !t.is_integrable()) {
            None => Ok(()),
            Some(t) => Err(Error::NotIntegrable(format!(
                "term with exponent {} on {} does not decay",
                t.z, t.support
            ))),
        }
    }

    /// Sum of the terms whose (closed) support contains `t`.
    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|x| x.eval(t)).sum()
    }

    pub fn left_limit(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .filter(|x| x.support.covers_left_of(t))
            .map(|x| x.formula(t))
            .sum()
    }

    pub fn right_limit(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .filter(|x| x.support.covers_right_of(t))
            .map(|x| x.formula(t))
            .sum()
    }

    /// Mean of the one-sided limits; equals `eval` wherever `f` is continuous.
    pub fn eval_avg(&self, t: f64) -> Complex64 {
        0.5 * (self.left_limit(t) + self.right_limit(t))
    }

    /// Sorted finite support endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .terms
            .iter()
            .flat_map(|t| {
                let (lo, hi) = t.support.bounds();
                [lo, hi]
            })
            .filter(|x| x.is_finite())
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| close(*a, *b));
        pts
    }

    pub fn add(&self, other: &ExpPolyFunction) -> ExpPolyFunction {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        ExpPolyFunction::new(terms)
    }

    pub fn sub(&self, other: &ExpPolyFunction) -> ExpPolyFunction {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, s: Complex64) -> ExpPolyFunction {
        ExpPolyFunction::new(
            self.terms
                .iter()
                .map(|t| ExpPolyTerm { c: t.c * s, ..*t })
                .collect(),
        )
    }

    /// Multiplication by `e^{i w0 t}`.
    pub fn modulate(&self, w0: f64) -> ExpPolyFunction {
        ExpPolyFunction::new(
            self.terms
                .iter()
                .map(|t| ExpPolyTerm {
                    z: t.z + I * w0,
                    ..*t
                })
                .collect(),
        )
    }

    /// Multiplication by `t^n`.
    pub fn mul_t_pow(&self, n: u32) -> ExpPolyFunction {
        ExpPolyFunction::new(
            self.terms
                .iter()
                .map(|t| ExpPolyTerm { m: t.m + n, ..*t })
                .collect(),
        )
    }

    /// Drops terms with `|c| <= tol`.
    pub fn prune(&self, tol: f64) -> ExpPolyFunction {
        ExpPolyFunction::new(
            self.terms
                .iter()
                .copied()
                .filter(|t| t.c.norm() > tol)
                .collect(),
        )
    }

    /// Largest amplitude of `self - other` after canonical merging.
    pub fn max_coeff_diff(&self, other: &ExpPolyFunction) -> f64 {
        self.sub(other)
            .terms
            .iter()
            .map(|t| t.c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest term amplitude.
    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.c.norm()).fold(0.0, f64::max)
    }

    /// `t -> f(t - shift)`.
    pub fn translate(&self, shift: f64) -> ExpPolyFunction {
        let mut out = Vec::new();
        for t in &self.terms {
            let (lo, hi) = t.support.bounds();
            let base = t.c * (-t.z * shift).exp();
            let mut pieces = Vec::with_capacity(t.m as usize + 1);
            for r in 0..=t.m {
                let coeff = base * binomial(t.m, r) * (-shift).powi((t.m - r) as i32);
                pieces.push((r, t.z, coeff));
            }
            emit_on_range(lo + shift, hi + shift, &pieces, &mut out);
        }
        ExpPolyFunction::new(out)
    }

    /// Classical derivative on each support, with the jumps of `self` at the
    /// support boundaries returned separately.
    pub fn derivative(&self) -> (ExpPolyFunction, Vec<Jump>) {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        let mut jumps = Vec::new();
        for t in &self.terms {
            if t.m > 0 {
                terms.push(ExpPolyTerm {
                    c: t.c * t.m as f64,
                    m: t.m - 1,
                    ..*t
                });
            }
            terms.push(ExpPolyTerm { c: t.c * t.z, ..*t });
            let (lo, hi) = t.support.bounds();
            if lo.is_finite() {
                jumps.push(Jump {
                    location: lo,
                    size: t.formula(lo),
                });
            }
            if hi.is_finite() {
                jumps.push(Jump {
                    location: hi,
                    size: -t.formula(hi),
                });
            }
        }
        (ExpPolyFunction::new(terms), merge_jumps(jumps, self.max_coeff()))
    }

    /// `int |f|`. A single half-line term uses the closed form; anything else
    /// goes through adaptive Gauss-Kronrod on a breakpoint-respecting
    /// partition with an analytic bound on the truncated exponential tails.
    pub fn l1_norm(&self) -> Result<Norm> {
        self.require_integrable()?;
        if self.terms.is_empty() {
            return Ok(Norm {
                value: 0.0,
                error: 0.0,
            });
        }
        if let [t] = self.terms.as_slice() {
            if let Some(v) = t.half_line_norm() {
                return Ok(Norm {
                    value: v,
                    error: 4.0 * f64::EPSILON * v,
                });
            }
        }

        let size: f64 = self
            .terms
            .iter()
            .map(|t| t.half_line_norm().unwrap_or(0.0) + t.c.norm())
            .sum();
        let tail_tol = 1e-16 * size;
        let bps = self.breakpoints();
        let first = *bps.first().unwrap_or(&0.0);
        let last = *bps.last().unwrap_or(&0.0);

        let neg_terms: Vec<&ExpPolyTerm> = self
            .terms
            .iter()
            .filter(|t| t.support == Support::Neg)
            .collect();
        let pos_terms: Vec<&ExpPolyTerm> = self
            .terms
            .iter()
            .filter(|t| t.support == Support::Pos)
            .collect();
        let (right, right_tail) = tail_cutoff(&pos_terms, last.max(0.0), tail_tol);
        let (left, left_tail) = tail_cutoff(&neg_terms, (-first).max(0.0), tail_tol);

        let mut edges = bps.clone();
        if !neg_terms.is_empty() {
            edges.push(-left);
        }
        if !pos_terms.is_empty() {
            edges.push(right);
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();

        // initial partition resolves the fastest decay/oscillation scale
        let rate = self
            .terms
            .iter()
            .map(|t| t.z.norm() + t.m as f64)
            .fold(1.0, f64::max);
        let mut grid = Vec::new();
        for w in edges.windows(2) {
            let pieces = (((w[1] - w[0]) * rate / 2.0).ceil() as usize).clamp(1, 4000);
            for k in 0..pieces {
                grid.push(w[0] + (w[1] - w[0]) * k as f64 / pieces as f64);
            }
        }
        if let Some(&e) = edges.last() {
            grid.push(e);
        }

        let est = quadrature::integrate(
            |t| self.eval(t).norm(),
            &grid,
            tail_tol,
            NORM_REL_TOL,
            200_000,
        );
        Ok(Norm {
            value: est.value,
            error: est.error + left_tail + right_tail,
        })
    }

    /// Closed-form convolution `(f * g)(t) = int f(t - x) g(x) dx`.
    pub fn convolve(&self, other: &ExpPolyFunction) -> Result<ExpPolyFunction> {
        self.require_integrable()?;
        other.require_integrable()?;
        let mut out = Vec::new();
        for f in &self.terms {
            for g in &other.terms {
                convolve_terms(f, g, &mut out);
            }
        }
        Ok(ExpPolyFunction::new(out))
    }

    /// Exact Fourier transform of a function made of half-line terms.
    ///
    /// `F(t^m e^{zt} u(t)) = m!/(iw - z)^{m+1}` for `Re z < 0`, and the
    /// anti-causal term `t^m e^{zt} u(-t)` with `Re z > 0` maps to minus the
    /// same expression.
    pub fn fourier_transform(&self) -> Result<RationalFunction> {
        self.require_integrable()?;
        if let Some(t) = self
            .terms
            .iter()
            .find(|t| !matches!(t.support, Support::Pos | Support::Neg))
        {
            return Err(Error::UnsupportedSupport(t.support.to_string()));
        }
        // group exponents and record the highest pole order per group
        let mut groups: Vec<(Complex64, u32)> = Vec::new();
        for t in &self.terms {
            match groups
                .iter_mut()
                .find(|(z, _)| (*z - t.z).norm() <= EXPONENT_TIE_TOL * z.norm().max(1.0))
            {
                Some(g) => g.1 = g.1.max(t.m + 1),
                None => groups.push((t.z, t.m + 1)),
            }
        }
        let factor = |z: Complex64| Poly::trimmed(vec![-z, I]);
        let den = groups
            .iter()
            .fold(Poly::constant(ONE), |acc, &(z, p)| acc.mul(&factor(z).pow(p as usize)));
        let mut num = Poly::zero();
        for t in &self.terms {
            let gi = groups
                .iter()
                .position(|(z, _)| (*z - t.z).norm() <= EXPONENT_TIE_TOL * z.norm().max(1.0))
                .expect("grouped above");
            let sign = if t.support == Support::Pos { 1.0 } else { -1.0 };
            let mut part = Poly::constant(t.c * sign * factorial(t.m));
            for (j, &(z, p)) in groups.iter().enumerate() {
                let power = if j == gi { p - t.m - 1 } else { p };
                part = part.mul(&factor(z).pow(power as usize));
            }
            num = num.add(&part);
        }
        Ok(RationalFunction { num, den })
    }
}

impl fmt::Display for ExpPolyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", t.c)?;
            match t.m {
                0 => {}
                1 => write!(f, "*t")?,
                m => write!(f, "*t^{m}")?,
            }
            write!(f, "*exp(({})t) on {}", t.z, t.support)?;
        }
        Ok(())
    }
}

/// `sum_k coeffs[k] * y^{(k)}` together with the jumps of `y^{(k)}` for
/// `k < degree`. Jumps of `y^{(n-1)}` are the delta part of `y^{(n)}`.
pub fn apply_ode_operator(p: &Poly, y: &ExpPolyFunction) -> (ExpPolyFunction, Vec<OrderedJump>) {
    let mut current = y.clone();
    let mut total = y.scale(p.coeffs()[0]);
    let mut jumps = Vec::new();
    for k in 1..=p.degree() {
        let (next, js) = current.derivative();
        jumps.extend(js.into_iter().map(|j| OrderedJump {
            order: k - 1,
            location: j.location,
            size: j.size,
        }));
        total = total.add(&next.scale(p.coeffs()[k]));
        current = next;
    }
    (total, jumps)
}

fn merge_jumps(mut jumps: Vec<Jump>, scale: f64) -> Vec<Jump> {
    jumps.sort_by(|a, b| a.location.total_cmp(&b.location));
    let mut out: Vec<Jump> = Vec::new();
    for j in jumps {
        match out.last_mut() {
            Some(last) if close(last.location, j.location) => last.size += j.size,
            _ => out.push(j),
        }
    }
    let floor = 1e-14 * scale.max(1.0);
    out.retain(|j| j.size.norm() > floor);
    out
}

/// Smallest cutoff `R >= start + 1` with `sum |c| int_R^inf t^m e^{-|Re z| t} dt`
/// below `tol`, along with the bound at `R`.
fn tail_cutoff(terms: &[&ExpPolyTerm], start: f64, tol: f64) -> (f64, f64) {
    if terms.is_empty() {
        return (start, 0.0);
    }
    let bound = |r: f64| -> f64 {
        terms
            .iter()
            .map(|t| {
                let a = t.z.re.abs();
                let m = t.m;
                let mut s = 0.0;
                for k in 0..=m {
                    s += factorial(m) / factorial(k) * r.powi(k as i32) / a.powi((m - k) as i32 + 1);
                }
                t.c.norm() * (-a * r).exp() * s
            })
            .sum()
    };
    let mut r = start + 1.0;
    let mut b = bound(r);
    while b > tol && r < 1e6 {
        r *= 1.25;
        b = bound(r);
    }
    (r, b)
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Writes `sum coeff * t^power * e^{z t}` restricted to `[lo, hi]` using
/// the available supports. Shifted half-lines become an origin half-line
/// plus or minus a bounded interval.
fn emit_on_range(lo: f64, hi: f64, parts: &[(u32, Complex64, Complex64)], out: &mut Vec<ExpPolyTerm>) {
    if !(hi > lo) {
        return;
    }
    let mut put = |support: Support, sign: f64| {
        for &(m, z, c) in parts {
            out.push(ExpPolyTerm::new(c * sign, m, z, support));
        }
    };
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => put(Support::Interval(lo, hi), 1.0),
        (true, false) => {
            put(Support::Pos, 1.0);
            match lo.partial_cmp(&0.0) {
                Some(Ordering::Greater) => put(Support::Interval(0.0, lo), -1.0),
                Some(Ordering::Less) => put(Support::Interval(lo, 0.0), 1.0),
                _ => {}
            }
        }
        (false, true) => {
            put(Support::Neg, 1.0);
            match hi.partial_cmp(&0.0) {
                Some(Ordering::Less) => put(Support::Interval(hi, 0.0), -1.0),
                Some(Ordering::Greater) => put(Support::Interval(0.0, hi), 1.0),
                _ => {}
            }
        }
        (false, false) => put(Support::Whole, 1.0),
    }
}

#[derive(Clone, Copy, Debug)]
enum Limit {
    Infinite,
    Const(f64),
    /// `x = t - k`
    Shift(f64),
}

/// `int x^p e^{delta x} dx`, as the coefficients `(power, coeff)` of
/// `e^{delta x} * sum coeff x^power` (non-resonant) or of the plain
/// polynomial `x^{p+1}/(p+1)` (resonant).
fn antiderivative(p: u32, delta: Complex64, resonant: bool) -> Vec<(u32, Complex64)> {
    if resonant {
        return vec![(p + 1, Complex64::new(1.0 / (p + 1) as f64, 0.0))];
    }
    let inv = ONE / delta;
    let mut out = Vec::with_capacity(p as usize + 1);
    // (-1)^j p!/(p-j)! x^{p-j} / delta^{j+1}
    let mut coef = inv;
    for j in 0..=p {
        out.push((p - j, coef));
        if j < p {
            coef = -coef * (p - j) as f64 * inv;
        }
    }
    out
}

fn convolve_terms(f: &ExpPolyTerm, g: &ExpPolyTerm, out: &mut Vec<ExpPolyTerm>) {
    let (lo1, hi1) = f.support.bounds();
    let (lo2, hi2) = g.support.bounds();
    let a = f.z;
    let b = g.z;
    let delta = b - a;
    let resonant = delta.norm() <= EXPONENT_TIE_TOL * a.norm().max(1.0);
    let outer_b = if resonant { a } else { b };

    let mut cuts: Vec<f64> = [lo1 + lo2, lo1 + hi2, hi1 + lo2, hi1 + hi2]
        .into_iter()
        .filter(|x| x.is_finite())
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(cuts);
    edges.push(f64::INFINITY);

    let prefactor = f.c * g.c;
    for w in edges.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        let probe = match (p0.is_finite(), p1.is_finite()) {
            (true, true) => 0.5 * (p0 + p1),
            (true, false) => p0 + 1.0,
            (false, true) => p1 - 1.0,
            (false, false) => 0.0,
        };
        // x ranges over [max(lo2, t - hi1), min(hi2, t - lo1)]
        let (lower, lower_val) = if lo2 >= probe - hi1 {
            (if lo2.is_finite() { Limit::Const(lo2) } else { Limit::Infinite }, lo2)
        } else {
            (if hi1.is_finite() { Limit::Shift(hi1) } else { Limit::Infinite }, probe - hi1)
        };
        let (upper, upper_val) = if hi2 <= probe - lo1 {
            (if hi2.is_finite() { Limit::Const(hi2) } else { Limit::Infinite }, hi2)
        } else {
            (if lo1.is_finite() { Limit::Shift(lo1) } else { Limit::Infinite }, probe - lo1)
        };
        if !(upper_val > lower_val) {
            continue;
        }

        let mut parts: Vec<(u32, Complex64, Complex64)> = Vec::new();
        let mut add = |power: u32, z: Complex64, c: Complex64| {
            match parts.iter_mut().find(|(m, zz, _)| *m == power && *zz == z) {
                Some(p) => p.2 += c,
                None => parts.push((power, z, c)),
            }
        };
        // (t-x)^m = sum_k C(m,k) t^{m-k} (-x)^k
        for k in 0..=f.m {
            let base = prefactor * binomial(f.m, k) * if k % 2 == 0 { 1.0 } else { -1.0 };
            let outer = f.m - k;
            let anti = antiderivative(g.m + k, delta, resonant);
            for (limit, sign) in [(upper, 1.0), (lower, -1.0)] {
                match limit {
                    Limit::Infinite => {}
                    Limit::Const(x) => {
                        let mut v: Complex64 = anti
                            .iter()
                            .map(|&(pw, c)| c * x.powi(pw as i32))
                            .sum();
                        if !resonant {
                            v *= (delta * x).exp();
                        }
                        add(outer, a, base * v * sign);
                    }
                    Limit::Shift(kk) => {
                        // polynomial in (t - kk), expanded in t
                        let scale = if resonant { ONE } else { (-delta * kk).exp() };
                        for &(pw, c) in &anti {
                            for r in 0..=pw {
                                let coef = c * binomial(pw, r) * (-kk).powi((pw - r) as i32);
                                add(outer + r, outer_b, base * scale * coef * sign);
                            }
                        }
                    }
                }
            }
        }
        emit_on_range(p0, p1, &parts, out);
    }
}

/// Ratio of polynomials in the transform variable `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Self {
        RationalFunction { num, den }
    }

    /// `1 / p(iw)`.
    pub fn inverse_symbol(p: &Poly) -> Self {
        RationalFunction {
            num: Poly::constant(ONE),
            den: p.scale_arg(I),
        }
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.num.eval(w) / self.den.eval(w)
    }

    pub fn eval_real(&self, w: f64) -> Complex64 {
        self.eval(Complex64::new(w, 0.0))
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> RationalFunction {
        RationalFunction {
            num: self.num.mul(p),
            den: self.den.clone(),
        }
    }

    pub fn derivative(&self) -> RationalFunction {
        let num = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        RationalFunction {
            num,
            den: self.den.mul(&self.den),
        }
    }

    /// `w -> R(w - w0)`.
    pub fn shift_arg(&self, w0: f64) -> RationalFunction {
        let w0 = Complex64::new(w0, 0.0);
        RationalFunction {
            num: self.num.shift_arg(w0),
            den: self.den.shift_arg(w0),
        }
    }

    /// Relative coefficient mismatch of the cross products `n1*d2` and `n2*d1`.
    pub fn cross_error(&self, other: &RationalFunction) -> f64 {
        let lhs = self.num.mul(&other.den);
        let rhs = other.num.mul(&self.den);
        let diff = lhs.sub(&rhs);
        let size = lhs.scale().max(rhs.scale()).max(f64::MIN_POSITIVE);
        diff.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max) / size
    }
}
