//! Complex polynomials: Horner evaluation, simultaneous root finding with
//! multiplicity clustering, deflation and partial fractions of `1/p`.
//!
//! Coefficients are stored in ascending degree, so `coeffs[k]` multiplies
//! `z^k`. The characteristic polynomial of an ODE is kept monic internally;
//! a user's leading coefficient is divided out and folded back into the
//! partial-fraction coefficients.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative distance below which two root approximations are the same root.
pub const CLUSTER_TOL: f64 = 1e-6;
/// Acceptance bound for `|p(r)|`, relative to `scale * max(1, |r|)^degree`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-8;
/// Acceptance bound for a deflation remainder, same normalization as above.
pub const DEFLATION_TOL: f64 = 1e-8;
/// Recombination error of the partial fractions that is still usable.
pub const RECOMBINATION_TOL: f64 = 1e-8;
/// Aberth sweeps per attempt.
pub const MAX_ITER: usize = 200;
/// Number of perturbed restarts before giving up.
pub const MAX_RESTARTS: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

#[derive(Deserialize)]
struct RawPoly {
    coeffs: Vec<Complex64>,
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPoly::deserialize(d)?;
        Poly::new(raw.coeffs).map_err(serde::de::Error::custom)
    }
}

impl Poly {
    /// Builds a polynomial from ascending coefficients. The leading
    /// coefficient must be nonzero.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        match coeffs.last() {
            None => Err(Error::Parse("polynomial needs at least one coefficient".into())),
            Some(c) if *c == ZERO => Err(Error::Parse(
                "leading coefficient is zero; drop trailing zeros".into(),
            )),
            Some(c) if !c.is_finite() => Err(Error::Parse("non-finite coefficient".into())),
            _ if coeffs.iter().any(|c| !c.is_finite()) => {
                Err(Error::Parse("non-finite coefficient".into()))
            }
            _ => Ok(Poly { coeffs }),
        }
    }

    /// Builds a polynomial, dropping exactly-zero high coefficients. An
    /// all-zero input becomes the zero polynomial `[0]`.
    pub fn trimmed(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![ZERO] }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// `w - root`
    pub fn linear(root: Complex64) -> Self {
        Poly {
            coeffs: vec![-root, ONE],
        }
    }

    /// Expands `prod (z - r)^m` over the given roots.
    pub fn from_roots(roots: &[(Complex64, usize)]) -> Self {
        let mut p = Poly::constant(ONE);
        for &(r, m) in roots {
            for _ in 0..m {
                p = p.mul(&Poly::linear(r));
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Largest coefficient magnitude.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Returns the monic polynomial and the leading coefficient divided out.
    pub fn monic(&self) -> (Poly, Complex64) {
        let lead = self.leading();
        let coeffs = self.coeffs.iter().map(|c| c / lead).collect();
        (Poly { coeffs }, lead)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value, first derivative and a running bound on the rounding error of
    /// the value.
    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64, f64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        let mut abs_sum = 0.0;
        let az = z.norm();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            abs_sum = abs_sum * az + c.norm();
        }
        let bound = 4.0 * (self.coeffs.len() as f64) * f64::EPSILON * abs_sum;
        (p, dp, bound)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::zero();
        }
        Poly::trimmed(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(ZERO)
                    + other.coeffs.get(k).copied().unwrap_or(ZERO)
            })
            .collect();
        Poly::trimmed(coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale_by(-ONE))
    }

    pub fn scale_by(&self, s: Complex64) -> Poly {
        Poly::trimmed(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::trimmed(out)
    }

    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly::constant(ONE), |acc, _| acc.mul(self))
    }

    /// `p(a * w)`; with `a = i` this turns `p(s)` into `p(iw)`.
    pub fn scale_arg(&self, a: Complex64) -> Poly {
        let mut ak = ONE;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let v = c * ak;
                ak *= a;
                v
            })
            .collect();
        Poly::trimmed(coeffs)
    }

    /// `p(w - w0)`.
    pub fn shift_arg(&self, w0: Complex64) -> Poly {
        let mut out = Poly::zero();
        let lin = Poly::linear(w0);
        for &c in self.coeffs.iter().rev() {
            out = out.mul(&lin).add(&Poly::constant(c));
        }
        out
    }

    /// Taylor coefficients of `p` about `a`, i.e. the coefficients of
    /// `p(a + s)` in ascending powers of `s`.
    pub fn taylor_at(&self, a: Complex64) -> Vec<Complex64> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let next = c[j + 1];
                c[j] += a * next;
            }
        }
        c
    }

    /// Divides by `(w - root)`. The remainder `p(root)` must be within the
    /// deflation tolerance; it is returned alongside the quotient.
    pub fn synthetic_divide(&self, root: Complex64) -> Result<(Poly, Complex64)> {
        if self.degree() == 0 {
            return Err(Error::DegreeZero);
        }
        let n = self.degree();
        let mut q = vec![ZERO; n];
        let mut acc = self.coeffs[n];
        for k in (0..n).rev() {
            q[k] = acc;
            acc = acc * root + self.coeffs[k];
        }
        let remainder = acc;
        let bound = DEFLATION_TOL * self.scale() * root.norm().max(1.0).powi(n as i32);
        if remainder.norm() > bound {
            return Err(Error::NotARoot {
                root,
                remainder: remainder.norm(),
                bound,
            });
        }
        Ok((Poly { coeffs: q }, remainder))
    }

    /// Roots with multiplicities.
    pub fn roots(&self) -> Result<RootMultiset> {
        if self.degree() == 0 {
            return Err(Error::DegreeZero);
        }
        let (monic, _) = self.monic();
        let scale = monic.scale();
        let n = monic.degree();
        if n == 1 {
            return Ok(RootMultiset {
                entries: vec![RootEntry {
                    root: -monic.coeffs[0] + Complex64::new(0.0, 0.0),
                    multiplicity: 1,
                }],
                scale,
            });
        }
        for attempt in 0..MAX_RESTARTS {
            let Some(approx) = aberth(&monic, attempt) else {
                continue;
            };
            let mut entries = cluster(&monic, &approx);
            // normalise signed zeros so that output never shows -0
            for e in &mut entries {
                e.root += Complex64::new(0.0, 0.0);
            }
            let ok = entries.iter().all(|e| {
                let bound = ROOT_RESIDUAL_TOL * scale.max(1.0) * e.root.norm().max(1.0).powi(n as i32);
                monic.eval(e.root).norm() <= bound
            });
            if ok {
                return Ok(RootMultiset { entries, scale });
            }
        }
        Err(Error::NonConvergence {
            attempts: MAX_RESTARTS,
        })
    }

    /// Partial fractions of `1/p` over the given roots.
    pub fn partial_fractions(&self, roots: &RootMultiset) -> Result<PartialFractions> {
        if self.degree() == 0 {
            return Err(Error::DegreeZero);
        }
        let (monic, lead) = self.monic();
        let mut terms = Vec::new();
        let mut cofactors = Vec::with_capacity(roots.entries.len());
        for entry in &roots.entries {
            let mut q = monic.clone();
            for _ in 0..entry.multiplicity {
                q = q.synthetic_divide(entry.root)?.0;
            }
            let taylor = q.taylor_at(entry.root);
            let recip = reciprocal_series(&taylor, entry.multiplicity);
            for order in 1..=entry.multiplicity {
                terms.push(PartialFraction {
                    root: entry.root,
                    order,
                    coeff: recip[entry.multiplicity - order] / lead,
                });
            }
            cofactors.push(q);
        }
        let pf = PartialFractions { terms };
        let error = pf.recombination_error_with(|root| {
            roots
                .entries
                .iter()
                .position(|e| e.root == root)
                .map(|i| cofactors[i].scale_by(lead))
        });
        if !(error <= RECOMBINATION_TOL) {
            return Err(Error::IllConditioned { error });
        }
        Ok(pf)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == ZERO && self.coeffs.len() > 1 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

/// First `len` coefficients of `1/a(s)` for a power series `a` with `a[0] != 0`.
fn reciprocal_series(a: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut b = vec![ZERO; len];
    b[0] = ONE / a[0];
    for k in 1..len {
        let mut acc = ZERO;
        for j in 1..=k.min(a.len() - 1) {
            acc += a[j] * b[k - j];
        }
        b[k] = -acc * b[0];
    }
    b
}

/// Fujiwara's bound on the root moduli of a monic polynomial.
fn root_bound(monic: &Poly) -> f64 {
    let n = monic.degree();
    let c = monic.coeffs();
    (1..=n)
        .map(|k| {
            let a = c[n - k].norm();
            if k == n {
                (a / 2.0).powf(1.0 / k as f64)
            } else {
                a.powf(1.0 / k as f64)
            }
        })
        .fold(0.0, f64::max)
        * 2.0
}

/// Aberth-Ehrlich iteration. Returns `None` when the sweep limit is hit.
fn aberth(monic: &Poly, attempt: usize) -> Option<Vec<Complex64>> {
    let n = monic.degree();
    let radius = root_bound(monic).max(1e-3) * (1.0 + 0.37 * attempt as f64);
    let offset = 0.4 + 0.91 * attempt as f64;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / n as f64 + offset))
        .collect();
    let mut frozen = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut moving = false;
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let (p, dp, noise) = monic.eval_with_derivative(z[i]);
            if p.norm() <= noise {
                frozen[i] = true;
                continue;
            }
            let ratio = if dp == ZERO {
                // stationary point; nudge off it
                Complex64::new(1e-8, 1e-8) * z[i].norm().max(1.0)
            } else {
                p / dp
            };
            let mut repulsion = ZERO;
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let d = z[i] - zj;
                    if d != ZERO {
                        repulsion += ONE / d;
                    }
                }
            }
            let step = ratio / (ONE - ratio * repulsion);
            if !step.is_finite() {
                return None;
            }
            z[i] -= step;
            if step.norm() > 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                moving = true;
            } else {
                frozen[i] = true;
            }
        }
        if !moving {
            return Some(z);
        }
    }
    None
}

/// Groups root approximations that are indistinguishable at working
/// precision: their inclusion disks overlap, or they lie within
/// `CLUSTER_TOL` relative distance. Multiple roots are refined with Newton
/// steps on the derivative of order `multiplicity - 1`.
fn cluster(monic: &Poly, approx: &[Complex64]) -> Vec<RootEntry> {
    let n = approx.len();
    let radii: Vec<f64> = (0..n)
        .map(|i| {
            let (p, _, noise) = monic.eval_with_derivative(approx[i]);
            let denom: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (approx[i] - approx[j]).norm())
                .product();
            if denom == 0.0 {
                f64::INFINITY
            } else {
                n as f64 * (p.norm() + noise) / denom
            }
        })
        .collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (approx[i] - approx[j]).norm();
            let tol = CLUSTER_TOL * approx[i].norm().max(approx[j].norm()).max(1.0);
            if d <= radii[i] + radii[j] || d <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[label[r]].push(i);
    }

    let mut entries: Vec<RootEntry> = groups
        .into_iter()
        .map(|g| {
            let m = g.len();
            let centroid = g.iter().map(|&i| approx[i]).sum::<Complex64>() / m as f64;
            let root = if m > 1 {
                let diameter = g
                    .iter()
                    .flat_map(|&i| g.iter().map(move |&j| (approx[i] - approx[j]).norm()))
                    .fold(0.0, f64::max);
                refine_multiple(monic, centroid, m, diameter)
            } else {
                centroid
            };
            RootEntry {
                root,
                multiplicity: m,
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        a.root
            .re
            .total_cmp(&b.root.re)
            .then(a.root.im.total_cmp(&b.root.im))
    });
    entries
}

fn refine_multiple(monic: &Poly, start: Complex64, m: usize, diameter: f64) -> Complex64 {
    let mut d = monic.clone();
    for _ in 0..m - 1 {
        d = d.derivative();
    }
    let dd = d.derivative();
    let mut z = start;
    for _ in 0..8 {
        let den = dd.eval(z);
        if den == ZERO {
            break;
        }
        let step = d.eval(z) / den;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= f64::EPSILON * z.norm().max(1.0) {
            break;
        }
    }
    let limit = diameter.max(1e-12) * 2.0 + 1e-12 * start.norm().max(1.0);
    if (z - start).norm() <= limit && monic.eval(z).norm() <= monic.eval(start).norm() * 10.0 {
        z
    } else {
        start
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    pub root: Complex64,
    pub multiplicity: usize,
}

/// Distinct roots with multiplicities. `scale` is the largest coefficient of
/// the monic source polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootMultiset {
    pub entries: Vec<RootEntry>,
    pub scale: f64,
}

impl RootMultiset {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn expand(&self) -> Poly {
        let pairs: Vec<_> = self.entries.iter().map(|e| (e.root, e.multiplicity)).collect();
        Poly::from_roots(&pairs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialFraction {
    pub root: Complex64,
    pub order: usize,
    pub coeff: Complex64,
}

/// `1/p(w) = sum coeff / (w - root)^order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialFractions {
    pub terms: Vec<PartialFraction>,
}

impl PartialFractions {
    /// Coefficient for `(root, order)`, if present.
    pub fn coeff(&self, root: Complex64, order: usize, tol: f64) -> Option<Complex64> {
        self.terms
            .iter()
            .find(|t| t.order == order && (t.root - root).norm() <= tol)
            .map(|t| t.coeff)
    }

    fn multiplicities(&self) -> Vec<(Complex64, usize)> {
        let mut out: Vec<(Complex64, usize)> = Vec::new();
        for t in &self.terms {
            match out.iter_mut().find(|(r, _)| *r == t.root) {
                Some(e) => e.1 = e.1.max(t.order),
                None => out.push((t.root, t.order)),
            }
        }
        out
    }

    /// Max coefficient deviation of `sum coeff * p(w)/(w - root)^order` from
    /// the constant 1, with the cofactors `p/(w-root)^multiplicity` rebuilt
    /// by multiplying out the other root factors and `p`'s leading coefficient.
    pub fn recombination_error(&self, p: &Poly) -> f64 {
        let mults = self.multiplicities();
        let lead = p.leading();
        self.recombination_error_with(|root| {
            let others: Vec<_> = mults.iter().copied().filter(|(r, _)| *r != root).collect();
            Some(Poly::from_roots(&others).scale_by(lead))
        })
    }

    fn recombination_error_with(
        &self,
        cofactor: impl Fn(Complex64) -> Option<Poly>,
    ) -> f64 {
        let mults = self.multiplicities();
        let mut total = Poly::zero();
        for t in &self.terms {
            let Some(q) = cofactor(t.root) else {
                return f64::INFINITY;
            };
            let m = mults.iter().find(|(r, _)| *r == t.root).map_or(0, |e| e.1);
            let term = q
                .mul(&Poly::linear(t.root).pow(m - t.order))
                .scale_by(t.coeff);
            total = total.add(&term);
        }
        let target = Poly::constant(ONE);
        let diff = total.sub(&target);
        diff.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(coeffs: &[f64]) -> Poly {
        Poly::from_real(coeffs).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = real(&[2.0, 3.0, 1.0]);
        assert_eq!(p.eval(c(-1.0, 0.0)), ZERO);
        assert_eq!(p.eval(ZERO), c(2.0, 0.0));
        let q = Poly::new(vec![c(0.0, 2.0), ONE]).unwrap();
        assert_eq!(q.eval(ONE), c(1.0, 2.0));
        assert_eq!(Poly::constant(c(3.0, -1.0)).eval(c(7.0, 7.0)), c(3.0, -1.0));
    }

    #[test]
    fn rejects_zero_leading_coefficient() {
        assert!(Poly::new(vec![ONE, ZERO]).is_err());
        assert!(Poly::new(vec![]).is_err());
        let parsed: std::result::Result<Poly, _> =
            serde_json::from_str(r#"{"coeffs": [[1,0],[0,0]]}"#);
        assert!(parsed.is_err());
        let ok: Poly = serde_json::from_str(r#"{"coeffs": [[2,0],[1,0]]}"#).unwrap();
        assert_eq!(ok.degree(), 1);
    }

    #[test]
    fn roots_of_simple_quadratic() {
        let r = real(&[2.0, 3.0, 1.0]).roots().unwrap();
        assert_eq!(r.entries.len(), 2);
        assert_abs_diff_eq!(r.entries[0].root.re, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.entries[1].root.re, -1.0, epsilon = 1e-12);
        assert!(r.entries.iter().all(|e| e.multiplicity == 1));
    }

    #[test]
    fn triple_root_is_clustered() {
        let r = real(&[1.0, 3.0, 3.0, 1.0]).roots().unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].multiplicity, 3);
        assert!((r.entries[0].root - c(-1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn quadruple_root_is_clustered() {
        let p = Poly::from_roots(&[(c(-1.0, 0.0), 4)]);
        let r = p.roots().unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].multiplicity, 4);
        assert!((r.entries[0].root - c(-1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn roots_of_z_squared_plus_one() {
        let r = real(&[1.0, 0.0, 1.0]).roots().unwrap();
        assert_eq!(r.entries.len(), 2);
        for target in [c(0.0, 1.0), c(0.0, -1.0)] {
            assert!(r.entries.iter().any(|e| (e.root - target).norm() < 1e-12));
        }
    }

    #[test]
    fn degree_zero_is_rejected() {
        assert!(matches!(
            Poly::constant(ONE).roots(),
            Err(Error::DegreeZero)
        ));
    }

    #[test]
    fn synthetic_division_examples() {
        let (q, rem) = real(&[2.0, 3.0, 1.0]).synthetic_divide(c(-1.0, 0.0)).unwrap();
        assert_eq!(q.coeffs(), &[c(2.0, 0.0), ONE]);
        assert_eq!(rem, ZERO);
        let (q, _) = real(&[1.0, 3.0, 3.0, 1.0])
            .synthetic_divide(c(-1.0, 0.0))
            .unwrap();
        assert_eq!(q.coeffs(), &[ONE, c(2.0, 0.0), ONE]);
        let p = real(&[1.0, 0.0, 1.0]);
        let (q, _) = p.synthetic_divide(c(0.0, 1.0)).unwrap();
        assert_eq!(q.coeffs(), &[c(0.0, 1.0), ONE]);
        let back = q.mul(&Poly::linear(c(0.0, 1.0)));
        assert_eq!(back, p);
    }

    #[test]
    fn synthetic_division_rejects_non_root() {
        let err = real(&[2.0, 3.0, 1.0]).synthetic_divide(ONE).unwrap_err();
        assert!(matches!(err, Error::NotARoot { .. }));
    }

    #[test]
    fn partial_fraction_examples() {
        // oracle: recombination 1/(w+1) - 1/(w+2) = 1/((w+1)(w+2))
        let p = real(&[2.0, 3.0, 1.0]);
        let pf = p.partial_fractions(&p.roots().unwrap()).unwrap();
        assert!((pf.coeff(c(-1.0, 0.0), 1, 1e-9).unwrap() - ONE).norm() < 1e-12);
        assert!((pf.coeff(c(-2.0, 0.0), 1, 1e-9).unwrap() + ONE).norm() < 1e-12);

        let p = real(&[1.0, 2.0, 1.0]);
        let pf = p.partial_fractions(&p.roots().unwrap()).unwrap();
        assert!((pf.coeff(c(-1.0, 0.0), 2, 1e-6).unwrap() - ONE).norm() < 1e-9);
        assert!(pf.coeff(c(-1.0, 0.0), 1, 1e-6).unwrap().norm() < 1e-9);

        // residue 1/p'(w_i) at simple roots
        let p = real(&[-1.0, 0.0, 1.0]);
        let pf = p.partial_fractions(&p.roots().unwrap()).unwrap();
        for t in &pf.terms {
            let expected = ONE / p.derivative().eval(t.root);
            assert!((t.coeff - expected).norm() < 1e-12);
        }
        assert!((pf.coeff(ONE, 1, 1e-9).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        assert!(pf.recombination_error(&p) < 1e-12);
    }

    #[test]
    fn non_monic_leading_coefficient_is_folded_in() {
        // 2(w+1)(w+2): every coefficient halves
        let p = real(&[4.0, 6.0, 2.0]);
        let pf = p.partial_fractions(&p.roots().unwrap()).unwrap();
        assert!((pf.coeff(c(-1.0, 0.0), 1, 1e-9).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        assert!(pf.recombination_error(&p) < 1e-12);
    }

    #[test]
    fn taylor_shift_matches_derivatives() {
        let p = real(&[1.0, -2.0, 0.5, 3.0]);
        let a = c(0.3, -0.7);
        let t = p.taylor_at(a);
        assert!((t[0] - p.eval(a)).norm() < 1e-12);
        assert!((t[1] - p.derivative().eval(a)).norm() < 1e-12);
        assert!((t[2] * 2.0 - p.derivative().derivative().eval(a)).norm() < 1e-12);
    }

    #[test]
    fn shift_and_scale_arg() {
        let p = real(&[1.0, 2.0, 3.0]);
        let w0 = c(0.5, 1.5);
        let z = c(-0.2, 0.9);
        assert!((p.shift_arg(w0).eval(z) - p.eval(z - w0)).norm() < 1e-12);
        let i = c(0.0, 1.0);
        assert!((p.scale_arg(i).eval(z) - p.eval(i * z)).norm() < 1e-12);
    }
}
