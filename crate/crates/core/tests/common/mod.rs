#![allow(dead_code)]

use hyers_ulam_l1::expfun::{ExpPolyFunction, ExpPolyTerm, Support};
use hyers_ulam_l1::poly::Poly;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x48_55_4c_31;

/// Seed of the random suites, overridable through `HU_L1_SEED`.
pub fn seed() -> u64 {
    std::env::var("HU_L1_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Independent stream per suite so that suites do not share draws.
pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex(rng: &mut impl Rng, r: f64) -> Complex64 {
    c(rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

/// `|Re z|` drawn from `re`, random sign, `|Im z| <= im`.
pub fn random_root(rng: &mut impl Rng, re: (f64, f64), im: f64) -> Complex64 {
    let a = rng.gen_range(re.0..=re.1);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    c(sign * a, rng.gen_range(-im..=im))
}

/// Monic polynomial of degree `1..=max_degree` with every root at least
/// 0.5 away from the imaginary axis, pairwise separated by 0.3, and an
/// occasional double root.
pub fn random_hyperbolic(rng: &mut impl Rng, max_degree: usize) -> Poly {
    let degree = rng.gen_range(1..=max_degree);
    let mut roots: Vec<(Complex64, usize)> = Vec::new();
    let mut total = 0;
    while total < degree {
        let z = random_root(rng, (0.5, 2.0), 3.0);
        if roots.iter().any(|(r, _)| (*r - z).norm() < 0.3) {
            continue;
        }
        let mult = if degree - total >= 2 && rng.gen_bool(0.2) { 2 } else { 1 };
        roots.push((z, mult));
        total += mult;
    }
    Poly::from_roots(&roots)
}

/// Integrable half-line term with `|Re z|` in `re`.
pub fn random_term(rng: &mut impl Rng, m: (u32, u32), re: (f64, f64)) -> ExpPolyTerm {
    let causal = rng.gen_bool(0.5);
    let a = rng.gen_range(re.0..=re.1);
    let z = c(if causal { -a } else { a }, rng.gen_range(-2.0..=2.0));
    let support = if causal { Support::Pos } else { Support::Neg };
    ExpPolyTerm::new(random_complex(rng, 1.0), rng.gen_range(m.0..=m.1), z, support)
}

pub fn random_function(rng: &mut impl Rng, max_terms: usize, m: (u32, u32), re: (f64, f64)) -> ExpPolyFunction {
    let n = rng.gen_range(1..=max_terms);
    ExpPolyFunction::new((0..n).map(|_| random_term(rng, m, re)).collect())
}

/// `1 + max |c|`, the scale used for termwise comparisons.
pub fn coeff_scale(f: &ExpPolyFunction) -> f64 {
    1.0 + f.max_coeff()
}

pub fn gaussian(t: f64) -> Complex64 {
    c((-t * t / 2.0).exp(), 0.0)
}
