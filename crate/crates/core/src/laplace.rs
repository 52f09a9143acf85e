//! Largest-eigenvalue density for `m = n` from the Laplace-transform route.
//!
//! The CDF of the largest eigenvalue is `K x^(m²-1) P(1/x)`, where `P(t)` is
//! the inverse Laplace transform of `det[Ψ_jl(s)]` and
//! `Ψ_jl(s) = ∫₀¹ e^(-su) u^(j+l) du`. Each entry is an exponential
//! polynomial in `s`, so the determinant can be expanded exactly and inverted
//! term by term: `e^(-as) s^(-p)` maps to `(t-a)^(p-1)/(p-1)! Θ(t-a)`.

use std::collections::BTreeMap;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactnum::{factorial, rational_serde, Poly, Rational};
use crate::steppoly::{StepPolyDensity, StepTerm};
use crate::Error;

/// `coefficient · s^(-inv_s_power) · e^(-exp_shift · s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpPolyTerm {
    #[serde(with = "rational_serde")]
    pub coefficient: Rational,
    pub inv_s_power: i64,
    pub exp_shift: usize,
}

/// Canonical sum of [`ExpPolyTerm`]s: one entry per `(exp_shift, inv_s_power)`,
/// zero coefficients dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPolyFunction {
    terms: BTreeMap<(usize, i64), Rational>,
}

impl ExpPolyFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut f = Self::zero();
        f.add_term(Rational::one(), 0, 0);
        f
    }

    pub fn from_terms<I: IntoIterator<Item = ExpPolyTerm>>(terms: I) -> Self {
        let mut f = Self::zero();
        for t in terms {
            f.add_term(t.coefficient, t.inv_s_power, t.exp_shift);
        }
        f
    }

    pub fn add_term(&mut self, c: Rational, inv_s_power: i64, exp_shift: usize) {
        if c.is_zero() {
            return;
        }
        let key = (exp_shift, inv_s_power);
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms ordered by `(exp_shift, inv_s_power)`.
    pub fn terms(&self) -> Vec<ExpPolyTerm> {
        self.terms
            .iter()
            .map(|(&(a, p), c)| ExpPolyTerm {
                coefficient: c.clone(),
                inv_s_power: p,
                exp_shift: a,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, other: &Self) {
        for (&(a, p), c) in &other.terms {
            self.add_term(c.clone(), p, a);
        }
    }

    pub fn sub(&mut self, other: &Self) {
        for (&(a, p), c) in &other.terms {
            self.add_term(-c.clone(), p, a);
        }
    }

    /// Numeric value at a real `s > 0`, for cross-checks only.
    pub fn eval_f64(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, p), c)| {
                crate::exactnum::rational_to_f64(c) * s.powi(-(p as i32)) * (-(a as f64) * s).exp()
            })
            .sum()
    }
}

impl Mul for &ExpPolyFunction {
    type Output = ExpPolyFunction;

    fn mul(self, rhs: &ExpPolyFunction) -> ExpPolyFunction {
        let mut out = ExpPolyFunction::zero();
        for (&(a1, p1), c1) in &self.terms {
            for (&(a2, p2), c2) in &rhs.terms {
                out.add_term(c1 * c2, p1 + p2, a1 + a2);
            }
        }
        out
    }
}

/// `Ψ_jl(s) = ∫₀¹ e^(-su) u^c du` with `c = j + l`, in closed form:
/// `c! s^(-(c+1)) - e^(-s) Σ_{r=0}^{c} c!/r! s^(r-c-1)`.
pub fn psi_entry(j: usize, l: usize) -> ExpPolyFunction {
    psi_with_exponent(j + l)
}

fn psi_with_exponent(c: usize) -> ExpPolyFunction {
    let cf = factorial(c);
    let mut f = ExpPolyFunction::zero();
    f.add_term(Rational::from_integer(cf.clone()), c as i64 + 1, 0);
    for r in 0..=c {
        let coef = Rational::new(cf.clone(), factorial(r));
        f.add_term(-coef, (c + 1 - r) as i64, 1);
    }
    f
}

/// Visits every permutation of `0..m` together with its sign.
fn for_each_permutation<F: FnMut(&[usize], bool)>(m: usize, mut f: F) {
    // Heap's algorithm; each swap flips the parity.
    let mut perm: Vec<usize> = (0..m).collect();
    let mut c = vec![0usize; m];
    let mut even = true;
    f(&perm, even);
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            even = !even;
            f(&perm, even);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// `det[Ψ_jl(s)]` for `j, l = 0..m-1`, expanded as a sum over permutations.
pub fn det_psi(m: usize) -> ExpPolyFunction {
    let entries: Vec<ExpPolyFunction> = (0..2 * m.max(1)).map(psi_with_exponent).collect();
    let mut det = ExpPolyFunction::zero();
    for_each_permutation(m, |perm, even| {
        let mut prod = ExpPolyFunction::one();
        for (row, &col) in perm.iter().enumerate() {
            prod = &prod * &entries[row + col];
        }
        if even {
            det.add(&prod);
        } else {
            det.sub(&prod);
        }
    });
    det
}

/// Term-by-term inverse Laplace transform. Returns, per shift `a`, the
/// polynomial in `t` multiplying `Θ(t - a)`.
pub fn inverse_laplace(f: &ExpPolyFunction) -> Result<BTreeMap<usize, Poly>, Error> {
    let mut pieces: BTreeMap<usize, Poly> = BTreeMap::new();
    for (&(a, p), c) in &f.terms {
        if p < 1 {
            return Err(Error::NonInvertibleTerm(p));
        }
        let e = (p - 1) as usize;
        let coef = c / Rational::from_integer(factorial(e));
        let shift = Rational::from_integer(BigInt::from(a));
        let piece = Poly::constant(coef).shift_power(&shift, e);
        *pieces.entry(a).or_default() += &piece;
    }
    pieces.retain(|_, p| !p.is_zero());
    Ok(pieces)
}

/// Sum of the inverse-transform pieces switched on at `t` (those with `a < t`).
pub fn eval_pieces_at(pieces: &BTreeMap<usize, Poly>, t: &Rational) -> Rational {
    pieces
        .iter()
        .filter(|(&a, _)| Rational::from_integer(BigInt::from(a)) < *t)
        .map(|(_, p)| p.eval(t))
        .fold(Rational::zero(), |x, y| x + y)
}

/// Constant `K` in `Q_m(x) = K x^(m²-1) P(1/x)`.
///
/// It is the joint-density normalisation `(m²-1)! / Π_j (m-1-j)! (m-j)!`
/// times the `m!` that the Andréief identity contributes when the
/// squared Vandermonde integral is rewritten as `m! det[Ψ_jl]`.
pub fn cdf_prefactor(m: usize) -> Rational {
    let mut den = BigInt::one();
    for j in 0..m {
        den *= factorial(m - 1 - j) * factorial(m - j);
    }
    Rational::new(factorial(m * m - 1) * factorial(m), den)
}

/// CDF of the largest eigenvalue: `Σ_a Q_a(x) Θ(1 - a x)`, with the `a = 0`
/// piece always switched on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargestCdf {
    pub m: usize,
    pub pieces: BTreeMap<usize, Poly>,
}

impl LargestCdf {
    pub fn eval(&self, x: &Rational) -> Rational {
        self.pieces
            .iter()
            .filter(|(&a, _)| Rational::from_integer(BigInt::from(a)) * x < Rational::one())
            .map(|(_, p)| p.eval(x))
            .fold(Rational::zero(), |u, v| u + v)
    }
}

/// `Q_m(x)`: substitutes `t = 1/x` into the inverse transform and multiplies
/// by `K x^(m²-1)`. Each `e^(-as) s^(-p)` term becomes
/// `x^(m²-p) (1 - a x)^(p-1) / (p-1)!`.
pub fn largest_cdf(m: usize) -> Result<LargestCdf, Error> {
    if m < 1 {
        return Err(Error::InvalidDims { m, n: m });
    }
    let det = det_psi(m);
    let top = (m * m) as i64;
    let k = cdf_prefactor(m);
    let mut pieces: BTreeMap<usize, Poly> = BTreeMap::new();
    for t in det.terms() {
        if t.inv_s_power < 1 {
            return Err(Error::NonInvertibleTerm(t.inv_s_power));
        }
        if t.inv_s_power > top {
            return Err(Error::NegativePower);
        }
        let e = (t.inv_s_power - 1) as usize;
        let coef = &k * &t.coefficient / Rational::from_integer(factorial(e));
        let a = Rational::from_integer(BigInt::from(t.exp_shift));
        let piece = Poly::one_minus_ax_pow(&a, e)
            .scale(&coef)
            .mul_x_power((top - t.inv_s_power) as usize);
        *pieces.entry(t.exp_shift).or_default() += &piece;
    }
    pieces.retain(|_, p| !p.is_zero());
    Ok(LargestCdf { m, pieces })
}

/// Density of the largest eigenvalue for `m = n`, `d Q_m / dx`, as a step
/// density with terms `Θ(1 - j x)`, `j = 1..m`.
pub fn largest_pdf(m: usize) -> Result<StepPolyDensity, Error> {
    if m < 2 {
        return Err(Error::InvalidDims { m, n: m });
    }
    let cdf = largest_cdf(m)?;
    let mut terms = Vec::new();
    for (&a, piece) in &cdf.pieces {
        let d = piece.diff();
        if a == 0 {
            // The always-on piece is the constant 1 beyond x = 1.
            if !d.is_zero() {
                return Err(Error::InvalidDensity(
                    "unshifted CDF piece is not constant".into(),
                ));
            }
            continue;
        }
        terms.push(StepTerm::new(a, d));
    }
    StepPolyDensity::new(m, m, m, terms)
}

/// Checks `Q_m(1/m) = 0`, `Q_m(1) = 1` and monotonicity on a `1/1000` grid.
pub fn cdf_monotone_check(m: usize) -> Result<bool, Error> {
    let cdf = largest_cdf(m)?;
    let lo = Rational::new(BigInt::one(), BigInt::from(m));
    if !cdf.eval(&lo).is_zero() || cdf.eval(&Rational::one()) != Rational::one() {
        return Ok(false);
    }
    let step = Rational::new(BigInt::one(), BigInt::from(1000));
    let mut x = lo.clone();
    let mut prev = cdf.eval(&x);
    while x < Rational::one() {
        x += &step;
        if x > Rational::one() {
            x = Rational::one();
        }
        let v = cdf.eval(&x);
        if v < prev {
            return Ok(false);
        }
        prev = v;
    }
    Ok(true)
}
