//! Random generators and independent oracles shared by the integration
//! tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weylstar::classicality::{GaussianState, ModeGaussian};
use weylstar::scalar::{rat, Coefficient, GaussianRational};
use weylstar::{Monomial, OperatorPolynomial, PhasePolynomial, Var, VarKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random polynomial.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub dof: usize,
    pub max_degree: u32,
    pub max_terms: usize,
    pub hbar_min: i32,
    pub hbar_max: i32,
    pub complex: bool,
}

impl Shape {
    pub fn new(dof: usize, max_degree: u32, max_terms: usize) -> Self {
        Shape { dof, max_degree, max_terms, hbar_min: 0, hbar_max: 0, complex: false }
    }

    pub fn hbar(mut self, lo: i32, hi: i32) -> Self {
        self.hbar_min = lo;
        self.hbar_max = hi;
        self
    }

    pub fn complex(mut self) -> Self {
        self.complex = true;
        self
    }
}

pub fn small_rational<R: Rng>(rng: &mut R) -> BigRational {
    rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R) -> BigRational {
    loop {
        let r = small_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn random_scalar<R: Rng>(rng: &mut R, complex: bool) -> GaussianRational {
    let re = nonzero_rational(rng);
    let im = if complex && rng.gen_bool(0.5) { small_rational(rng) } else { BigRational::zero() };
    GaussianRational::new(re, im)
}

pub fn random_monomial<R: Rng>(rng: &mut R, dof: usize, max_degree: u32) -> Monomial {
    let degree = rng.gen_range(0..=max_degree);
    let mut exps = vec![0u32; 2 * dof];
    for _ in 0..degree {
        exps[rng.gen_range(0..2 * dof)] += 1;
    }
    Monomial::from_flat(exps)
}

pub fn random_coefficient<R: Rng>(rng: &mut R, shape: &Shape) -> Coefficient {
    Coefficient::term(rng.gen_range(shape.hbar_min..=shape.hbar_max), random_scalar(rng, shape.complex))
}

fn random_terms<R: Rng>(rng: &mut R, shape: &Shape) -> Vec<(Monomial, Coefficient)> {
    let n = rng.gen_range(1..=shape.max_terms);
    (0..n).map(|_| (random_monomial(rng, shape.dof, shape.max_degree), random_coefficient(rng, shape))).collect()
}

pub fn random_poly<R: Rng>(rng: &mut R, shape: &Shape) -> PhasePolynomial {
    PhasePolynomial::from_terms(shape.dof, random_terms(rng, shape))
}

pub fn random_real_poly<R: Rng>(rng: &mut R, dof: usize, max_degree: u32, max_terms: usize) -> PhasePolynomial {
    random_poly(rng, &Shape::new(dof, max_degree, max_terms))
}

/// A random operator built as a sum of arbitrary (unordered) words.
pub fn random_operator<R: Rng>(rng: &mut R, shape: &Shape) -> OperatorPolynomial {
    let n = rng.gen_range(1..=shape.max_terms);
    let mut acc = OperatorPolynomial::zero(shape.dof);
    for _ in 0..n {
        let word = random_word(rng, shape.dof, shape.max_degree as usize);
        let x = OperatorPolynomial::from_word(shape.dof, &weylstar::OperatorWord::new(word)).unwrap();
        acc = &acc + &x.scale(&random_coefficient(rng, shape));
    }
    acc
}

pub fn random_word<R: Rng>(rng: &mut R, dof: usize, max_len: usize) -> Vec<Var> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            let mode = rng.gen_range(0..dof);
            if rng.gen_bool(0.5) {
                Var::q(mode)
            } else {
                Var::p(mode)
            }
        })
        .collect()
}

pub fn random_point<R: Rng>(rng: &mut R, dof: usize) -> Vec<BigRational> {
    (0..2 * dof).map(|_| small_rational(rng)).collect()
}

pub fn positive_rational<R: Rng>(rng: &mut R) -> BigRational {
    rat(rng.gen_range(1..=8), rng.gen_range(1..=4))
}

/// Random admissible Gaussian state; saturates the uncertainty bound on
/// roughly half the modes.
pub fn random_state<R: Rng>(rng: &mut R, dof: usize) -> GaussianState {
    let hbar = positive_rational(rng);
    let modes = (0..dof)
        .map(|_| {
            let var_q = positive_rational(rng);
            let cov = if rng.gen_bool(0.5) {
                small_rational(rng) / BigRational::from_integer(2.into())
            } else {
                BigRational::zero()
            };
            // var_p chosen so that var_q var_p - cov^2 = hbar^2/4 + slack.
            let slack = if rng.gen_bool(0.5) { BigRational::zero() } else { positive_rational(rng) };
            let det = &hbar * &hbar / BigRational::from_integer(4.into()) + slack;
            let var_p = (det + &cov * &cov) / &var_q;
            ModeGaussian::new(small_rational(rng), small_rational(rng), var_q, var_p, cov)
        })
        .collect();
    GaussianState::new(hbar, modes).expect("constructed admissible")
}

/// Normal order by repeated random adjacent swaps, `ab = ba + [a, b]`. Works
/// on raw letter sequences and never calls the library product.
pub fn rewrite_normal_order<R: Rng>(
    rng: &mut R,
    dof: usize,
    terms: Vec<(Vec<Var>, Coefficient)>,
) -> OperatorPolynomial {
    let mut pending = terms;
    let mut done: BTreeMap<Vec<u32>, Coefficient> = BTreeMap::new();
    while !pending.is_empty() {
        let pick = rng.gen_range(0..pending.len());
        let (word, c) = pending.swap_remove(pick);
        let inversions: Vec<usize> = (0..word.len().saturating_sub(1)).filter(|&k| word[k] > word[k + 1]).collect();
        match inversions.choose(rng) {
            None => {
                let mut exps = vec![0u32; 2 * dof];
                for v in &word {
                    exps[v.index(dof)] += 1;
                }
                let slot = done.entry(exps).or_default();
                *slot += &c;
            }
            Some(&k) => {
                let (a, b) = (word[k], word[k + 1]);
                let mut swapped = word.clone();
                swapped.swap(k, k + 1);
                pending.push((swapped, c.clone()));
                if a.mode == b.mode && a.kind != b.kind {
                    // a > b forces a = P, b = Q: [P, Q] = -i hbar.
                    debug_assert_eq!(a.kind, VarKind::P);
                    let mut shorter = word[..k].to_vec();
                    shorter.extend_from_slice(&word[k + 2..]);
                    pending.push((shorter, &c * &Coefficient::term(1, -GaussianRational::i())));
                }
            }
        }
    }
    OperatorPolynomial::from_terms(dof, done.into_iter().map(|(e, c)| (Monomial::from_flat(e), c)))
}

fn permutations(items: &[Var]) -> Vec<Vec<Var>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// `(m)_+` as the average of all orderings of the letters of `m`.
pub fn permutation_average<R: Rng>(rng: &mut R, dof: usize, m: &Monomial) -> OperatorPolynomial {
    let mut letters = Vec::new();
    for v in Var::all(dof) {
        for _ in 0..m.exp(v) {
            letters.push(v);
        }
    }
    let perms = permutations(&letters);
    let weight = Coefficient::from_rational(BigRational::new(BigInt::one(), BigInt::from(perms.len())));
    let terms = perms.into_iter().map(|w| (w, weight.clone())).collect();
    rewrite_normal_order(rng, dof, terms)
}

/// Derivative at `s = 0` of `a(point + s e_v)` from exact Lagrange
/// interpolation through `degree + 1` samples.
pub fn directional_derivative(
    a: &PhasePolynomial,
    v: Var,
    point: &[BigRational],
    hbar: &BigRational,
) -> GaussianRational {
    let dof = a.dof();
    let n = a.degree().unwrap_or(0) as i64;
    let nodes: Vec<BigRational> = (0..=n).map(|k| rat(k - n / 2, 1)).collect();
    let values: Vec<GaussianRational> = nodes
        .iter()
        .map(|s| {
            let mut x = point.to_vec();
            x[v.index(dof)] += s;
            a.evaluate(&x, hbar).unwrap()
        })
        .collect();
    // L_k'(0) = sum_{j != k} 1/(s_k - s_j) prod_{l != k, j} (0 - s_l)/(s_k - s_l)
    let mut acc = GaussianRational::zero();
    for k in 0..nodes.len() {
        let mut dk = BigRational::zero();
        for j in 0..nodes.len() {
            if j == k {
                continue;
            }
            let mut term = BigRational::one() / (&nodes[k] - &nodes[j]);
            for l in 0..nodes.len() {
                if l != k && l != j {
                    term *= -&nodes[l] / (&nodes[k] - &nodes[l]);
                }
            }
            dk += term;
        }
        acc += &values[k].scale(&dk);
    }
    acc
}

/// Poisson bracket at a point, assembled from interpolated derivatives.
pub fn poisson_at(
    a: &PhasePolynomial,
    b: &PhasePolynomial,
    point: &[BigRational],
    hbar: &BigRational,
) -> GaussianRational {
    let mut acc = GaussianRational::zero();
    for i in 0..a.dof() {
        let (q, p) = (Var::q(i), Var::p(i));
        acc += &(&directional_derivative(a, q, point, hbar) * &directional_derivative(b, p, point, hbar));
        acc += &-(&directional_derivative(a, p, point, hbar) * &directional_derivative(b, q, point, hbar));
    }
    acc
}

/// Gauss-Hermite nodes and weights for the weight `exp(-x^2)`.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (j as f64 + 1.0)).sqrt() * p2 - ((j as f64) / (j as f64 + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.into_iter().zip(w).collect()
}

fn f64_of(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

/// `E[q^a p^b]` for one mode by two-dimensional Gauss-Hermite quadrature on
/// the Cholesky factor of the covariance. Returns the value and `E[|q^a p^b|]`
/// as a scale for relative comparison.
pub fn quadrature_moment(mode: &ModeGaussian, a: u32, b: u32, nodes: &[(f64, f64)]) -> (f64, f64) {
    let (mq, mp) = (f64_of(&mode.mean_q), f64_of(&mode.mean_p));
    let (vq, vp, c) = (f64_of(&mode.var_q), f64_of(&mode.var_p), f64_of(&mode.cov_qp));
    let l11 = vq.sqrt();
    let l21 = c / l11;
    let l22 = (vp - l21 * l21).sqrt();
    let norm = 1.0 / std::f64::consts::PI;
    let s2 = std::f64::consts::SQRT_2;
    let (mut value, mut scale) = (0.0, 0.0);
    for &(x1, w1) in nodes {
        for &(x2, w2) in nodes {
            let (z1, z2) = (s2 * x1, s2 * x2);
            let q = mq + l11 * z1;
            let p = mp + l21 * z1 + l22 * z2;
            let f = q.powi(a as i32) * p.powi(b as i32);
            value += w1 * w2 * f;
            scale += w1 * w2 * f.abs();
        }
    }
    (value * norm, scale * norm)
}

/// Quadrature expectation of a real-coefficient symbol with hbar evaluated.
pub fn quadrature_expectation(state: &GaussianState, a: &PhasePolynomial) -> (f64, f64) {
    let nodes = gauss_hermite(12);
    let (mut value, mut scale) = (0.0, 0.0);
    for (m, c) in a.terms() {
        let c = c.evaluate(state.hbar()).unwrap();
        assert!(c.is_real());
        let coeff = f64_of(&c.re);
        let (mut v, mut s) = (1.0, 1.0);
        for (k, mode) in state.modes().iter().enumerate() {
            let (mv, ms) = quadrature_moment(mode, m.q()[k], m.p()[k], &nodes);
            v *= mv;
            s *= ms;
        }
        value += coeff * v;
        scale += coeff.abs() * s;
    }
    (value, scale)
}

pub fn abs_rational(r: &BigRational) -> BigRational {
    r.abs()
}

/// Scope timer used by the acceptance suite.
pub struct Stopwatch(std::time::Instant);

impl Stopwatch {
    pub fn start() -> Self {
        Stopwatch(std::time::Instant::now())
    }

    pub fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
