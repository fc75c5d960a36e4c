//! Green's functions of constant-coefficient operators and the stability
//! constant `M = ||G||_1`.
//!
//! With `s = iw`, `1/p(s) = sum lambda_ij / (s - z_i)^j`. A root in the left
//! half-plane contributes the causal term `lambda t^{j-1}/(j-1)! e^{z t} u(t)`,
//! a root in the right half-plane the anti-causal term
//! `-lambda t^{j-1}/(j-1)! e^{z t} u(-t)`. Both transform back to
//! `lambda/(iw - z)^j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfun::{apply_ode_operator, factorial, ExpPolyFunction, ExpPolyTerm, Support};
use crate::poly::{PartialFractions, Poly, RootMultiset};

/// Relative distance from the imaginary axis below which a root counts as
/// lying on it.
pub const AXIS_TOL: f64 = 1e-9;

/// Outcome of the hyperbolicity test.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperbolicity {
    pub hyperbolic: bool,
    /// Root closest to the imaginary axis (relative to `max(1, |z|)`).
    pub witness: Complex64,
    pub roots: RootMultiset,
}

pub fn check_hyperbolic(p: &Poly, axis_tol: f64) -> Result<Hyperbolicity> {
    if p.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let roots = p.roots()?;
    let closeness = |z: Complex64| z.re.abs() / z.norm().max(1.0);
    let witness = roots
        .entries
        .iter()
        .map(|e| e.root)
        .min_by(|a, b| closeness(*a).total_cmp(&closeness(*b)))
        .expect("degree >= 1 has a root");
    Ok(Hyperbolicity {
        hyperbolic: closeness(witness) > axis_tol,
        witness,
        roots,
    })
}

pub fn is_hyperbolic(p: &Poly) -> Result<bool> {
    Ok(check_hyperbolic(p, AXIS_TOL)?.hyperbolic)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreensFunction {
    pub charpoly: Poly,
    pub roots: RootMultiset,
    pub kernel: ExpPolyFunction,
    #[serde(rename = "M")]
    pub m: f64,
    /// Error bound on `M` from the norm computation (0 for closed forms).
    pub m_error: f64,
    pub hyperbolic: bool,
    #[serde(skip)]
    partial_fractions: Option<PartialFractions>,
}

pub fn green_function(p: &Poly) -> Result<GreensFunction> {
    green_function_with(p, AXIS_TOL)
}

pub fn green_function_with(p: &Poly, axis_tol: f64) -> Result<GreensFunction> {
    let check = check_hyperbolic(p, axis_tol)?;
    if !check.hyperbolic {
        return Err(Error::NotHyperbolic {
            witness: check.witness,
        });
    }
    let pf = p.partial_fractions(&check.roots)?;
    let terms = pf
        .terms
        .iter()
        .map(|t| {
            let m = (t.order - 1) as u32;
            let c = t.coeff / factorial(m);
            if t.root.re < 0.0 {
                ExpPolyTerm::new(c, m, t.root, Support::Pos)
            } else {
                ExpPolyTerm::new(-c, m, t.root, Support::Neg)
            }
        })
        .collect();
    let kernel = ExpPolyFunction::new(terms);
    let (m, m_error) = if p.degree() == 1 {
        (first_order_constant(p), 0.0)
    } else {
        let norm = kernel.l1_norm()?;
        (norm.value, norm.error)
    };
    Ok(GreensFunction {
        charpoly: p.clone(),
        roots: check.roots,
        kernel,
        m,
        m_error,
        hyperbolic: true,
        partial_fractions: Some(pf),
    })
}

/// `1/|Re a0|` for `z + a0`; in general `1/(|a1| |Re(a0/a1)|)`.
fn first_order_constant(p: &Poly) -> f64 {
    let a0 = p.coeffs()[0];
    let a1 = p.coeffs()[1];
    if a1 == Complex64::new(1.0, 0.0) {
        1.0 / a0.re.abs()
    } else {
        1.0 / (a1.norm() * (a0 / a1).re.abs())
    }
}

pub fn stability_constant(p: &Poly) -> Result<f64> {
    stability_constant_with(p, AXIS_TOL)
}

pub fn stability_constant_with(p: &Poly, axis_tol: f64) -> Result<f64> {
    if p.degree() == 1 {
        let root = -p.coeffs()[0] / p.coeffs()[1];
        if root.re.abs() / root.norm().max(1.0) <= axis_tol {
            return Err(Error::NotHyperbolic { witness: root });
        }
        return Ok(first_order_constant(p));
    }
    Ok(green_function_with(p, axis_tol)?.m)
}

impl GreensFunction {
    pub fn partial_fractions(&self) -> Option<&PartialFractions> {
        self.partial_fractions.as_ref()
    }

    /// Sum of the closed-form norms of the kernel terms, an upper bound for `M`.
    pub fn triangle_bound(&self) -> f64 {
        self.kernel
            .terms()
            .iter()
            .map(|t| t.half_line_norm().unwrap_or(f64::INFINITY))
            .sum()
    }

    /// Slowest decay rate `min |Re z|` among the kernel exponents.
    pub fn decay_rate(&self) -> f64 {
        self.roots
            .entries
            .iter()
            .map(|e| e.root.re.abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// How far `p(d/dt) G` is from the delta: the largest coefficient of the
    /// smooth part, of any jump below order `n - 1`, and the deviation of the
    /// order `n - 1` jump at the origin from `1/a_n`.
    pub fn delta_defect(&self) -> f64 {
        let n = self.charpoly.degree();
        let (smooth, jumps) = apply_ode_operator(&self.charpoly, &self.kernel);
        let target = Complex64::new(1.0, 0.0) / self.charpoly.leading();
        let mut top = Complex64::new(0.0, 0.0);
        let mut worst = smooth.max_coeff();
        for j in &jumps {
            if j.order + 1 == n && j.location == 0.0 {
                top += j.size;
            } else {
                worst = worst.max(j.size.norm());
            }
        }
        worst.max((top - target).norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expfun::RationalFunction;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(coeffs: &[(f64, f64)]) -> Poly {
        Poly::new(coeffs.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    #[test]
    fn hyperbolicity_examples() {
        assert!(is_hyperbolic(&poly(&[(2.0, 0.0), (1.0, 0.0)])).unwrap());
        let h = check_hyperbolic(&poly(&[(0.0, -1.0), (1.0, 0.0)]), AXIS_TOL).unwrap();
        assert!(!h.hyperbolic);
        assert!((h.witness - c(0.0, 1.0)).norm() < 1e-12);
        assert!(is_hyperbolic(&poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)])).unwrap());
        // z(z+1): Re(a_{n-1}) = 1 but the root 0 sits on the axis
        assert!(!is_hyperbolic(&poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0)])).unwrap());
    }

    #[test]
    fn first_order_kernel() {
        let g = green_function(&poly(&[(1.0, 0.0), (1.0, 0.0)])).unwrap();
        assert!(g.kernel.max_coeff_diff(&ExpPolyFunction::causal_exp(-1.0)) < 1e-14);
        assert_eq!(g.m, 1.0);
    }

    #[test]
    fn repeated_root_kernels() {
        // (z+1)^2: t e^{-t} u(t)
        let p2 = Poly::from_roots(&[(c(-1.0, 0.0), 2)]);
        let g = green_function(&p2).unwrap();
        let want = ExpPolyFunction::term(c(1.0, 0.0), 1, c(-1.0, 0.0), Support::Pos);
        assert!(g.kernel.max_coeff_diff(&want) < 1e-6, "{}", g.kernel);
        assert!((g.m - 1.0).abs() < 1e-6);

        // (z+1)^2 (z^2+2z+1) = (z+1)^4: t^3/3! e^{-t} u(t), also of norm 1
        let p4 = p2.mul(&poly(&[(1.0, 0.0), (2.0, 0.0), (1.0, 0.0)]));
        let g = green_function(&p4).unwrap();
        let want = ExpPolyFunction::term(c(1.0 / 6.0, 0.0), 3, c(-1.0, 0.0), Support::Pos);
        assert!(g.kernel.max_coeff_diff(&want) < 1e-6, "{}", g.kernel);
        assert!((g.m - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_sided_kernel() {
        let g = green_function(&poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)])).unwrap();
        let want = ExpPolyFunction::new(vec![
            ExpPolyTerm::new(c(-0.5, 0.0), 0, c(1.0, 0.0), Support::Neg),
            ExpPolyTerm::new(c(-0.5, 0.0), 0, c(-1.0, 0.0), Support::Pos),
        ]);
        assert!(g.kernel.max_coeff_diff(&want) < 1e-12, "{}", g.kernel);
        assert!((g.m - 1.0).abs() < 1e-10);
    }

    #[test]
    fn stability_constant_examples() {
        assert_eq!(stability_constant(&poly(&[(2.0, 0.0), (1.0, 0.0)])).unwrap(), 0.5);
        assert_eq!(stability_constant(&poly(&[(0.5, 0.0), (1.0, 0.0)])).unwrap(), 2.0);
        let p = Poly::from_roots(&[(c(-1.0, 0.0), 1), (c(-2.0, 0.0), 1)]);
        assert!((stability_constant(&p).unwrap() - 0.5).abs() < 1e-10);
        // anti-causal first-order kernel
        assert_eq!(stability_constant(&poly(&[(-2.0, 0.0), (1.0, 0.0)])).unwrap(), 0.5);
        // non-monic: 2z + 4 has kernel (1/2) e^{-2t} u(t)
        assert_eq!(stability_constant(&poly(&[(4.0, 0.0), (2.0, 0.0)])).unwrap(), 0.25);
    }

    #[test]
    fn non_hyperbolic_is_rejected() {
        let p = poly(&[(0.0, -1.0), (1.0, 0.0)]);
        assert!(matches!(green_function(&p), Err(Error::NotHyperbolic { .. })));
        assert!(matches!(stability_constant(&p), Err(Error::NotHyperbolic { .. })));
    }

    #[test]
    fn transform_and_delta_identity() {
        let p = Poly::from_roots(&[
            (c(-1.0, 2.0), 1),
            (c(-1.0, -2.0), 1),
            (c(0.5, 0.0), 2),
            (c(-3.0, 0.0), 1),
        ]);
        let g = green_function(&p).unwrap();
        let ft = g.kernel.fourier_transform().unwrap();
        assert!(ft.cross_error(&RationalFunction::inverse_symbol(&p)) < 1e-9);
        assert!(g.delta_defect() < 1e-9, "{}", g.delta_defect());
        assert!(g.m <= g.triangle_bound() * (1.0 + 1e-12));
    }

    #[test]
    fn serializes_with_m() {
        let g = green_function(&poly(&[(2.0, 0.0), (1.0, 0.0)])).unwrap();
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["M"], 0.5);
        assert_eq!(v["hyperbolic"], true);
        assert!(v["kernel"]["terms"].is_array());
        assert!(v["roots"]["entries"].is_array());
    }

    #[test]
    fn kernel_matches_numerical_inverse() {
        use crate::fourier::{ift_numeric, sample, sample_fn, Grid};
        let grid = Grid::reference();
        for p in [
            poly(&[(1.0, 0.0), (1.0, 0.0)]),
            poly(&[(-2.0, 1.0), (1.0, 0.0)]),
            poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]),
            Poly::from_roots(&[(c(-0.5, 3.0), 1), (c(1.5, 0.0), 2), (c(-2.0, -1.0), 1)]),
        ] {
            let g = green_function(&p).unwrap();
            let symbol = RationalFunction::inverse_symbol(&p);
            let spec = sample_fn(|w| symbol.eval_real(w), grid.dual()).unwrap();
            let err = ift_numeric(&spec)
                .sup_diff(&sample(&g.kernel, grid).unwrap())
                .unwrap();
            assert!(err < 2e-3, "{p}: {err}");
        }
    }
}
