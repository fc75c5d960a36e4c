//! Solving `p(d/dt) y = f` in L1, residuals of approximate solutions, and the
//! Hyers-Ulam bound `||y - y_a||_1 <= M ||p(d/dt) y - f||_1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfun::{apply_ode_operator, ExpPolyFunction, ExpPolyTerm, OrderedJump, Support};
use crate::fourier::{conv_numeric, l1_norm_numeric_with_error, sample, Grid, SampledFunction};
use crate::greens::{green_function_with, GreensFunction, AXIS_TOL};
use crate::poly::Poly;

/// Relative slack on `M * eps` before a bound counts as violated.
pub const VERIFY_SLACK: f64 = 1e-6;
/// Largest tolerated jump of a derivative of order `< n - 1`.
pub const JUMP_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A function given either in closed form or as samples on a grid.
#[derive(Clone, Debug, PartialEq)]
pub enum Signal {
    Closed(ExpPolyFunction),
    Sampled(SampledFunction),
}

impl Signal {
    pub fn grid(&self) -> Option<Grid> {
        match self {
            Signal::Closed(_) => None,
            Signal::Sampled(s) => Some(s.grid()),
        }
    }

    pub fn to_samples(&self, grid: Grid) -> Result<SampledFunction> {
        match self {
            Signal::Closed(f) => sample(f, grid),
            Signal::Sampled(s) if s.grid() == grid => Ok(s.clone()),
            Signal::Sampled(s) => Err(Error::GridMismatch(format!(
                "signal on T={} N={}, expected T={} N={}",
                s.grid().half_width(),
                s.grid().len(),
                grid.half_width(),
                grid.len()
            ))),
        }
    }

    pub fn as_closed(&self) -> Option<&ExpPolyFunction> {
        match self {
            Signal::Closed(f) => Some(f),
            Signal::Sampled(_) => None,
        }
    }
}

impl From<ExpPolyFunction> for Signal {
    fn from(f: ExpPolyFunction) -> Self {
        Signal::Closed(f)
    }
}

impl From<SampledFunction> for Signal {
    fn from(s: SampledFunction) -> Self {
        Signal::Sampled(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub charpoly: Poly,
    pub forcing: Signal,
    pub axis_tol: f64,
}

impl Problem {
    pub fn new(charpoly: Poly, forcing: impl Into<Signal>) -> Result<Self> {
        if charpoly.degree() == 0 {
            return Err(Error::DegreeZero);
        }
        let forcing = forcing.into();
        if let Signal::Closed(f) = &forcing {
            f.require_integrable()?;
        }
        Ok(Problem {
            charpoly,
            forcing,
            axis_tol: AXIS_TOL,
        })
    }

    pub fn with_axis_tol(mut self, axis_tol: f64) -> Self {
        self.axis_tol = axis_tol;
        self
    }

    pub fn order(&self) -> usize {
        self.charpoly.degree()
    }

    pub fn green(&self) -> Result<GreensFunction> {
        green_function_with(&self.charpoly, self.axis_tol)
    }
}

/// The particular L1 solution `y_a = G * f`.
pub fn solve(prob: &Problem) -> Result<Signal> {
    let g = prob.green()?;
    solve_with(prob, &g)
}

fn solve_with(prob: &Problem, g: &GreensFunction) -> Result<Signal> {
    match &prob.forcing {
        Signal::Closed(f) => Ok(Signal::Closed(g.kernel.convolve(f)?)),
        Signal::Sampled(f) => {
            let kernel = sample(&g.kernel, f.grid())?;
            Ok(Signal::Sampled(conv_numeric(&kernel, f)?))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    /// `p(d/dt) y - f` away from the jumps.
    pub h: Signal,
    pub norm: f64,
    pub norm_error: f64,
    /// Jumps of `y^{(n-1)}`: the delta part of `y^{(n)}`, left out of `norm`.
    pub jumps: Vec<OrderedJump>,
}

impl Residual {
    pub fn singular_part_excluded(&self) -> bool {
        !self.jumps.is_empty()
    }
}

pub fn residual(prob: &Problem, y: &Signal) -> Result<Residual> {
    match (y, &prob.forcing) {
        (Signal::Closed(y), Signal::Closed(f)) => closed_residual(&prob.charpoly, y, f),
        (Signal::Sampled(s), _) => sampled_residual(prob, s),
        (Signal::Closed(y), Signal::Sampled(f)) => {
            let s = sample(y, f.grid())?;
            sampled_residual(prob, &s)
        }
    }
}

fn closed_residual(p: &Poly, y: &ExpPolyFunction, f: &ExpPolyFunction) -> Result<Residual> {
    let n = p.degree();
    let (ly, jumps) = apply_ode_operator(p, y);
    if let Some(j) = jumps
        .iter()
        .find(|j| j.order + 1 < n && j.size.norm() > JUMP_TOL)
    {
        return Err(Error::ExcessJumps {
            order: j.order,
            location: j.location,
            size: j.size.norm(),
        });
    }
    let h = ly.sub(f);
    let norm = h.l1_norm()?;
    Ok(Residual {
        h: Signal::Closed(h),
        norm: norm.value,
        norm_error: norm.error,
        jumps: jumps.into_iter().filter(|j| j.order + 1 == n).collect(),
    })
}

/// Applies the fourth-order centered first-derivative stencil `order` times.
/// Each application leaves two more samples at either end undefined (zero).
pub fn finite_difference(s: &SampledFunction, order: usize) -> SampledFunction {
    let n = s.grid().len();
    let h = s.grid().step();
    let mut cur = s.values().to_vec();
    for pass in 0..order {
        let mut next = vec![ZERO; n];
        let margin = 2 * (pass + 1);
        for k in margin..n.saturating_sub(margin) {
            next[k] = (cur[k - 2] - 8.0 * cur[k - 1] + 8.0 * cur[k + 1] - cur[k + 2]) / (12.0 * h);
        }
        cur = next;
    }
    SampledFunction::new(s.grid(), cur).expect("finite differences of finite samples")
}

fn sampled_residual(prob: &Problem, y: &SampledFunction) -> Result<Residual> {
    let grid = y.grid();
    let f = prob.forcing.to_samples(grid)?;
    let n = prob.order();
    let margin = 2 * n;
    if grid.len() <= 4 * margin {
        return Err(Error::InvalidGrid(format!(
            "N = {} leaves no interior for an order-{n} stencil",
            grid.len()
        )));
    }
    let coeffs = prob.charpoly.coeffs();
    let mut values: Vec<Complex64> = y.values().iter().map(|v| coeffs[0] * v).collect();
    for (k, &a) in coeffs.iter().enumerate().skip(1) {
        let d = finite_difference(y, k);
        for (v, dv) in values.iter_mut().zip(d.values()) {
            *v += a * dv;
        }
    }
    for (k, v) in values.iter_mut().enumerate() {
        if k < margin || k >= grid.len() - margin {
            *v = ZERO;
        } else {
            *v -= f.at(k);
        }
    }
    let h = SampledFunction::new(grid, values)?;
    let (norm, norm_error) = l1_norm_numeric_with_error(&h);
    Ok(Residual {
        h: Signal::Sampled(h),
        norm,
        norm_error,
        jumps: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    #[serde(rename = "M")]
    pub m: f64,
    pub residual_norm: f64,
    pub distance: f64,
    pub bound: f64,
    pub satisfied: bool,
    /// `distance / bound`, absent when the bound is zero.
    pub ratio: Option<f64>,
    pub path: String,
    pub tolerances: Tolerances,
    /// Jumps of `y^{(n-1)}` whose delta contribution is not part of `residual_norm`.
    pub jumps: Vec<OrderedJump>,
    pub singular_part_excluded: bool,
    /// Largest coefficient of `(y - y_a) - G * (p(d/dt) y - f)`, closed form only.
    pub representation_error: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub relative_slack: f64,
    pub quadrature_slack: f64,
    pub axis_tol: f64,
    pub jump_tol: f64,
    #[serde(rename = "M_error")]
    pub m_error: f64,
    pub residual_error: f64,
    pub distance_error: f64,
}

pub fn verify(prob: &Problem, candidate: &Signal) -> Result<StabilityReport> {
    verify_with(prob, candidate, VERIFY_SLACK)
}

pub fn verify_with(prob: &Problem, candidate: &Signal, relative_slack: f64) -> Result<StabilityReport> {
    let g = prob.green()?;
    let res = residual(prob, candidate)?;
    let ya = solve_with(prob, &g)?;
    let closed = matches!((candidate, &ya), (Signal::Closed(_), Signal::Closed(_)));
    let (distance, distance_error, representation_error) = match (candidate, &ya) {
        (Signal::Closed(y), Signal::Closed(ya)) => {
            let diff = y.sub(ya);
            let norm = diff.l1_norm()?;
            let rep = match &res.h {
                Signal::Closed(h) => Some(representation_error(&g, &prob.charpoly, &diff, h, &res.jumps)?),
                Signal::Sampled(_) => None,
            };
            (norm.value, norm.error, rep)
        }
        _ => {
            let grid = candidate
                .grid()
                .or_else(|| ya.grid())
                .expect("one side is sampled");
            let diff = candidate.to_samples(grid)?.sub(&ya.to_samples(grid)?)?;
            let (d, e) = l1_norm_numeric_with_error(&diff);
            (d, e, None)
        }
    };
    let bound = g.m * res.norm;
    let quadrature_slack = distance_error + g.m * res.norm_error + g.m_error * res.norm;
    let satisfied = distance <= bound * (1.0 + relative_slack) + quadrature_slack;
    Ok(StabilityReport {
        m: g.m,
        residual_norm: res.norm,
        distance,
        bound,
        satisfied,
        ratio: (bound > 0.0).then(|| distance / bound),
        path: if closed { "closed" } else { "sampled" }.to_string(),
        tolerances: Tolerances {
            relative_slack,
            quadrature_slack,
            axis_tol: prob.axis_tol,
            jump_tol: JUMP_TOL,
            m_error: g.m_error,
            residual_error: res.norm_error,
            distance_error,
        },
        singular_part_excluded: res.singular_part_excluded(),
        jumps: res.jumps,
        representation_error,
    })
}

/// `y - y_a = G * (h + a_n sum_x J_x delta_x)`: the jumps `J_x` of
/// `y^{(n-1)}` enter as translated copies of the kernel.
fn representation_error(
    g: &GreensFunction,
    p: &Poly,
    diff: &ExpPolyFunction,
    h: &ExpPolyFunction,
    jumps: &[OrderedJump],
) -> Result<f64> {
    let mut rhs = g.kernel.convolve(h)?;
    for j in jumps {
        rhs = rhs.add(&g.kernel.translate(j.location).scale(p.leading() * j.size));
    }
    Ok(diff.max_coeff_diff(&rhs))
}

/// Families of approximate solutions of `y' - i y = 0`, whose only L1
/// solution is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeFamily {
    /// `e^{(i-1)t} u(t) + (eps/sqrt 2) e^{-t} u(t)`.
    PaperExample,
    /// `(eps/2) e^{it} (1 - |t|/T)` on `[-T, T]`.
    SlowModulation {
        #[serde(rename = "T")]
        t: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub family: ProbeFamily,
    pub eps: f64,
    pub residual_norm: f64,
    /// Distance to the zero function.
    pub distance_to_solution_set: f64,
    /// Any admissible `K(eps)` is at least the distance.
    pub implied_k_lower_bound: f64,
    pub ratio: f64,
    /// `1 - eps/sqrt 2`, for the paper family.
    pub claimed_lower_bound: Option<f64>,
    pub jumps: Vec<OrderedJump>,
}

impl ProbeReport {
    pub const CSV_HEADER: [&'static str; 4] = ["parameter", "residual", "distance", "ratio"];

    /// `(parameter, residual, distance, ratio)` with `T` (or `eps` for the
    /// paper family) as the parameter.
    pub fn csv_row(&self) -> [f64; 4] {
        let parameter = match self.family {
            ProbeFamily::SlowModulation { t } => t,
            ProbeFamily::PaperExample => self.eps,
        };
        [parameter, self.residual_norm, self.distance_to_solution_set, self.ratio]
    }
}

/// `z - i`.
pub fn rotation_operator() -> Poly {
    Poly::linear(Complex64::new(0.0, 1.0))
}

pub fn probe_function(eps: f64, family: ProbeFamily) -> ExpPolyFunction {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match family {
        ProbeFamily::PaperExample => ExpPolyFunction::new(vec![
            ExpPolyTerm::new(one, 0, Complex64::new(-1.0, 1.0), Support::Pos),
            ExpPolyTerm::new(
                Complex64::new(eps / 2f64.sqrt(), 0.0),
                0,
                Complex64::new(-1.0, 0.0),
                Support::Pos,
            ),
        ]),
        ProbeFamily::SlowModulation { t } => {
            let s = eps / 2.0;
            ExpPolyFunction::new(vec![
                ExpPolyTerm::new(s * one, 0, i, Support::Interval(-t, 0.0)),
                ExpPolyTerm::new((s / t) * one, 1, i, Support::Interval(-t, 0.0)),
                ExpPolyTerm::new(s * one, 0, i, Support::Interval(0.0, t)),
                ExpPolyTerm::new(-(s / t) * one, 1, i, Support::Interval(0.0, t)),
            ])
        }
    }
}

pub fn counterexample_probe(eps: f64, family: ProbeFamily) -> Result<ProbeReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("eps = {eps} must be positive")));
    }
    if let ProbeFamily::SlowModulation { t } = family {
        if !(t >= 1.0 && t.is_finite()) {
            return Err(Error::Config(format!("T = {t} must be at least 1")));
        }
    }
    let y = probe_function(eps, family);
    let prob = Problem::new(rotation_operator(), ExpPolyFunction::zero())?;
    let res = closed_residual(&prob.charpoly, &y, &ExpPolyFunction::zero())?;
    let distance = y.l1_norm()?.value;
    Ok(ProbeReport {
        family,
        eps,
        residual_norm: res.norm,
        distance_to_solution_set: distance,
        implied_k_lower_bound: distance,
        ratio: distance / res.norm,
        claimed_lower_bound: matches!(family, ProbeFamily::PaperExample)
            .then(|| 1.0 - eps / 2f64.sqrt()),
        jumps: res.jumps,
    })
}
