//! The full family of ordered-eigenvalue densities `p_k^(m,n)`, `1 ≤ k ≤ m`.
//!
//! Every density is a signed binomial combination of the same `m`
//! coefficient polynomials `A_j^(m,n)`:
//!
//! ```text
//! p_k(x) = (1/N) Σ_{j=m-k+1}^{m} (-1)^(m-k+j+1) C(j-1, m-k) A_j(x) Θ(1 - j x)
//! ```
//!
//! `A_j` comes from the largest-eigenvalue CDF with `Ψ_jl(s) = ∫₀¹ e^(-su) u^(α+j+l) du`:
//! for every choice of `a = m - j` rows that keep the pure power term of `Ψ`
//! (the other `j` rows take the `e^(-s)` tail), the signed permutation sum of
//! row products is collected as a polynomial in a bookkeeping variable `z`,
//! whose degree `d` fixes the inverse-transform power `(1/x - j)^(m-1+d)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactnum::{binomial, factorial, rational_serde, Poly, Rational};
use crate::steppoly::{summed_terms, StepPolyDensity, StepTerm};
use crate::Error;

/// Subsystem dimensions with `2 ≤ m ≤ n`; `alpha = n - m` for complex states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DimsRepr")]
pub struct SystemDims {
    m: usize,
    n: usize,
}

#[derive(Deserialize)]
struct DimsRepr {
    m: usize,
    n: usize,
}

impl TryFrom<DimsRepr> for SystemDims {
    type Error = Error;

    fn try_from(d: DimsRepr) -> Result<Self, Error> {
        Self::new(d.m, d.n)
    }
}

impl SystemDims {
    pub fn new(m: usize, n: usize) -> Result<Self, Error> {
        if m < 2 || n < m {
            return Err(Error::InvalidDims { m, n });
        }
        Ok(Self { m, n })
    }

    pub fn square(m: usize) -> Result<Self, Error> {
        Self::new(m, m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.n - self.m
    }

    pub fn check_order(&self, k: usize) -> Result<(), Error> {
        if k < 1 || k > self.m {
            return Err(Error::InvalidOrder { k, m: self.m });
        }
        Ok(())
    }
}

/// `p_1^(m)` for `m = n`: `m(m²-1) (1 - m x)^(m²-2) Θ(1 - m x)`.
pub fn smallest_pdf(m: usize) -> Result<StepPolyDensity, Error> {
    SystemDims::square(m)?;
    let c = Rational::from_integer(BigInt::from(m * (m * m - 1)));
    let step = Rational::from_integer(BigInt::from(m));
    let poly = Poly::one_minus_ax_pow(&step, m * m - 2).scale(&c);
    StepPolyDensity::new(m, m, 1, vec![StepTerm::new(m, poly)])
}

type IntPoly = Vec<BigInt>;

fn ipoly_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn ipoly_add_assign(acc: &mut IntPoly, b: &IntPoly, negate: bool) {
    if acc.len() < b.len() {
        acc.resize(b.len(), BigInt::zero());
    }
    for (x, y) in acc.iter_mut().zip(b) {
        if negate {
            *x -= y;
        } else {
            *x += y;
        }
    }
}

/// Row polynomial for entry `(row, col)`: with `c = α + row + col`, a kept
/// row contributes `c! z^c`; a tail row contributes `Σ_ℓ C(c,ℓ) ℓ! z^ℓ`.
fn entry_poly(c: usize, kept: bool) -> IntPoly {
    let cf = factorial(c);
    if kept {
        let mut v = vec![BigInt::zero(); c + 1];
        v[c] = cf;
        v
    } else {
        (0..=c).map(|l| &cf / factorial(c - l)).collect()
    }
}

/// Signed permutation sum `Σ_σ sgn σ Π_i f_(i, σ_i)(z)` for one set of kept
/// rows, expanded row by row over the bitmask of used columns.
fn permutation_sum(dims: SystemDims, kept_mask: u32) -> IntPoly {
    let m = dims.m;
    let alpha = dims.alpha();
    let full = (1usize << m) - 1;
    let mut dp: Vec<Option<IntPoly>> = vec![None; full + 1];
    dp[0] = Some(vec![BigInt::one()]);
    for mask in 0..full {
        let Some(cur) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        let kept = kept_mask & (1 << row) != 0;
        for col in 0..m {
            if mask & (1 << col) != 0 {
                continue;
            }
            // columns already used to the right of `col` are inversions
            let inversions = (mask >> (col + 1)).count_ones();
            let term = ipoly_mul(&cur, &entry_poly(alpha + row + col, kept));
            let slot = dp[mask | (1 << col)].get_or_insert_with(Vec::new);
            ipoly_add_assign(slot, &term, inversions % 2 == 1);
        }
    }
    dp[full].take().unwrap_or_default()
}

/// All `a`-element subsets of `0..m` as bitmasks.
fn subsets(m: usize, a: usize) -> Vec<u32> {
    (0u32..(1u32 << m))
        .filter(|s| s.count_ones() as usize == a)
        .collect()
}

/// `K = (mn-1)! m! / Π_i (n-1-i)! (m-i)!`, the joint-density normalisation
/// times the `m!` of the Andréief identity.
pub fn cdf_prefactor(dims: SystemDims) -> Rational {
    let (m, n) = (dims.m, dims.n);
    let mut den = BigInt::one();
    for i in 0..m {
        den *= factorial(n - 1 - i) * factorial(m - i);
    }
    Rational::new(factorial(m * n - 1) * factorial(m), den)
}

/// The coefficient polynomial `A_j^(m,n)(x)`, of degree `mn - 2`.
pub fn coeff_poly(dims: SystemDims, j: usize) -> Result<Poly, Error> {
    let (m, n) = (dims.m, dims.n);
    if j < 1 || j > m {
        return Err(Error::InvalidStep { j, m });
    }
    let a = m - j;
    let z_poly = subsets(m, a)
        .into_par_iter()
        .map(|s| permutation_sum(dims, s))
        .reduce(Vec::new, |mut acc, p| {
            ipoly_add_assign(&mut acc, &p, false);
            acc
        });

    // x^(mn-1) Σ_d r_d (1/x - j)^D / D!  with D = m-1+d
    //   = Σ_d r_d / D! x^(mn-1-D) (1 - j x)^D
    let top = m * n - 1;
    let step = Rational::from_integer(BigInt::from(j));
    let mut bracket = Poly::zero();
    for (d, r) in z_poly.iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        let big_d = m - 1 + d;
        if big_d > top {
            return Err(Error::NegativePower);
        }
        let coef = Rational::new(r.clone(), factorial(big_d));
        let piece = Poly::one_minus_ax_pow(&step, big_d)
            .scale(&coef)
            .mul_x_power(top - big_d);
        bracket += &piece;
    }
    Ok(bracket.diff().scale(&-cdf_prefactor(dims)))
}

/// All `A_1..A_m`, index `j - 1`.
pub fn coeff_polys(dims: SystemDims) -> Result<Vec<Poly>, Error> {
    (1..=dims.m)
        .into_par_iter()
        .map(|j| coeff_poly(dims, j))
        .collect()
}

/// Signed binomial weight of `A_j` in `p_k`; zero outside `j > m - k`.
pub fn binomial_weight(m: usize, k: usize, j: usize) -> BigInt {
    if j + k < m + 1 {
        return BigInt::zero();
    }
    let b = binomial(j - 1, m - k);
    if (m - k + j + 1).is_multiple_of(2) {
        b
    } else {
        -b
    }
}

fn assemble(
    dims: SystemDims,
    k: usize,
    polys: &[Poly],
) -> Result<(StepPolyDensity, Rational), Error> {
    dims.check_order(k)?;
    let m = dims.m;
    let terms = (m - k + 1..=m)
        .map(|j| {
            let w = Rational::from_integer(binomial_weight(m, k, j));
            StepTerm::new(j, polys[j - 1].scale(&w))
        })
        .collect();
    let raw = StepPolyDensity::new(m, dims.n, k, terms)?;
    let norm = raw.normalize_check();
    if !norm.is_positive() {
        return Err(Error::InvalidDensity(format!(
            "non-positive normalisation {norm} for k = {k}"
        )));
    }
    Ok((raw.scaled(&norm.recip()), norm))
}

/// Normalised density of the `k`-th smallest eigenvalue.
pub fn order_statistic_pdf(dims: SystemDims, k: usize) -> Result<StepPolyDensity, Error> {
    dims.check_order(k)?;
    let m = dims.m;
    let mut polys = vec![Poly::zero(); m];
    for j in m - k + 1..=m {
        polys[j - 1] = coeff_poly(dims, j)?;
    }
    assemble(dims, k, &polys).map(|(d, _)| d)
}

/// All `m` densities of one system, with the per-`k` normalisation constants.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumFamily {
    pub dims: SystemDims,
    pub densities: Vec<StepPolyDensity>,
    #[serde(skip)]
    pub coefficient_polys: Vec<Poly>,
    #[serde(skip)]
    pub normalizations: Vec<Rational>,
}

impl SpectrumFamily {
    pub fn density(&self, k: usize) -> &StepPolyDensity {
        &self.densities[k - 1]
    }

    /// `A_j` as computed (index `j`, 1-based).
    pub fn coefficient(&self, j: usize) -> &Poly {
        &self.coefficient_polys[j - 1]
    }

    /// True when every `k` needed the same normalisation constant.
    pub fn normalizations_agree(&self) -> bool {
        self.normalizations.windows(2).all(|w| w[0] == w[1])
    }

    pub fn means(&self) -> Vec<Rational> {
        self.densities.iter().map(|d| d.moment(1)).collect()
    }

    /// Steps `j ≥ 2` whose polynomials do not cancel in `Σ_k p_k`.
    pub fn surviving_inner_steps(&self) -> Vec<usize> {
        summed_terms(&self.densities)
            .into_iter()
            .filter(|(j, p)| *j >= 2 && !p.is_zero())
            .map(|(j, _)| j)
            .collect()
    }
}

pub fn spectrum_family(dims: SystemDims) -> Result<SpectrumFamily, Error> {
    let polys = coeff_polys(dims)?;
    let mut densities = Vec::with_capacity(dims.m);
    let mut normalizations = Vec::with_capacity(dims.m);
    for k in 1..=dims.m {
        let (d, norm) = assemble(dims, k, &polys)?;
        densities.push(d);
        normalizations.push(norm);
    }
    Ok(SpectrumFamily {
        dims,
        densities,
        coefficient_polys: polys,
        normalizations,
    })
}

/// `1/Γ(z)` at an integer `z`, zero at the poles `z ≤ 0`; `None` encodes zero.
fn inv_gamma_int(z: i64) -> Option<BigInt> {
    if z <= 0 {
        None
    } else {
        Some(factorial((z - 1) as usize))
    }
}

/// `⟨Tr ρ^q⟩` for `m = n`:
/// `Γ(m²)/Γ(m²+q) Σ_{i,p<m} Γ(p+q+1) Γ(q+1)² / ([Γ(1+i-p) Γ(1+q+p-i)]² p!)`.
pub fn trace_moment(m: usize, q: u32) -> Rational {
    let q = q as i64;
    let mi = m as i64;
    let mut sum = Rational::zero();
    let qf = factorial(q as usize);
    for i in 0..mi {
        for p in 0..mi {
            let (Some(g1), Some(g2)) = (inv_gamma_int(1 + i - p), inv_gamma_int(1 + q + p - i))
            else {
                continue;
            };
            let num = factorial((p + q) as usize) * &qf * &qf;
            let g = &g1 * &g2;
            let den = &g * &g * factorial(p as usize);
            sum += Rational::new(num, den);
        }
    }
    let m2 = m * m;
    sum * Rational::new(factorial(m2 - 1), factorial(m2 - 1 + q as usize))
}

/// `⟨Tr ρ²⟩ = (m + n)/(mn + 1)`, valid for any `n ≥ m`.
pub fn purity(dims: SystemDims) -> Rational {
    Rational::new(
        BigInt::from(dims.m + dims.n),
        BigInt::from(dims.m * dims.n + 1),
    )
}

/// One row of a [`family_moment_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentCheckRow {
    pub q: u32,
    #[serde(with = "rational_serde")]
    pub family_sum: Rational,
    #[serde(with = "rational_serde")]
    pub expected: Rational,
}

/// `Σ_k ⟨Λ_k^q⟩` against `⟨Tr ρ^q⟩` for `q = 1..=qmax`. For `n > m` only the
/// `q = 1` and `q = 2` identities are available and higher `q` are skipped.
pub fn family_moment_check(fam: &SpectrumFamily, qmax: u32) -> Result<Vec<MomentCheckRow>, Error> {
    let dims = fam.dims;
    let mut rows = Vec::new();
    for q in 1..=qmax {
        let expected = if dims.m == dims.n {
            trace_moment(dims.m, q)
        } else {
            match q {
                1 => Rational::one(),
                2 => purity(dims),
                _ => continue,
            }
        };
        let family_sum: Rational = fam.densities.iter().map(|d| d.moment(q)).sum();
        if family_sum != expected {
            return Err(Error::MomentMismatch {
                q,
                got: family_sum.to_string(),
                expected: expected.to_string(),
            });
        }
        rows.push(MomentCheckRow {
            q,
            family_sum,
            expected,
        });
    }
    Ok(rows)
}
