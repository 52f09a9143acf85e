//! Densities of the form `Σ_j A_j(x) Θ(1 - j x)` on `[0, 1]`.
//!
//! Every ordered-eigenvalue density is a signed sum of polynomials cut off
//! by unit steps at `x = 1/j`. Integrals, moments and pointwise values all
//! reduce to exact piecewise polynomial work over the breakpoints.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{rational_serde, rational_to_decimal, Poly, Rational};
use crate::Error;

/// One summand `poly(x) Θ(1 - step_index·x)`; the sign and any binomial
/// weight are already folded into `poly`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTerm {
    pub step_index: usize,
    #[serde(rename = "coefficients")]
    pub poly: Poly,
}

impl StepTerm {
    pub fn new(step_index: usize, poly: Poly) -> Self {
        Self { step_index, poly }
    }

    /// Right end of the interval on which this term is switched on.
    pub fn cutoff(&self) -> Rational {
        Rational::new(BigInt::one(), BigInt::from(self.step_index))
    }
}

/// Density of the `k`-th smallest eigenvalue for dimensions `m × n`.
///
/// Terms have distinct step indices, are sorted by descending step index and
/// never carry a zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepPolyDensity {
    m: usize,
    n: usize,
    k: usize,
    terms: Vec<StepTerm>,
}

/// Mean, variance, skewness `κ₃²/κ₂³` and excess kurtosis `κ₄/κ₂²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorSet {
    #[serde(with = "rational_serde")]
    pub mean: Rational,
    #[serde(with = "rational_serde")]
    pub variance: Rational,
    #[serde(with = "rational_serde")]
    pub skewness: Rational,
    #[serde(with = "rational_serde")]
    pub excess_kurtosis: Rational,
}

/// Cumulants `κ₁..κ₄` from raw moments `μ₁..μ₄`.
pub fn cumulants_from_raw(mu: &[Rational; 4]) -> [Rational; 4] {
    let [m1, m2, m3, m4] = mu;
    let r = |v: i64| Rational::from_integer(BigInt::from(v));
    let m1_2 = m1 * m1;
    let k1 = m1.clone();
    let k2 = m2 - &m1_2;
    let k3 = m3 - r(3) * m2 * m1 + r(2) * &m1_2 * m1;
    let k4 = m4 - r(4) * m3 * m1 - r(3) * m2 * m2 + r(12) * m2 * &m1_2 - r(6) * &m1_2 * &m1_2;
    [k1, k2, k3, k4]
}

/// Support `[lo, hi]` of the `k`-th smallest of `m` eigenvalues.
pub fn support_of(m: usize, k: usize) -> (Rational, Rational) {
    if k == m {
        (
            Rational::new(BigInt::one(), BigInt::from(m)),
            Rational::one(),
        )
    } else {
        (
            Rational::zero(),
            Rational::new(BigInt::one(), BigInt::from(m + 1 - k)),
        )
    }
}

/// Merges terms by step index, dropping any that cancel to zero.
fn canonical_terms(terms: Vec<StepTerm>) -> Vec<StepTerm> {
    let mut by_step: BTreeMap<usize, Poly> = BTreeMap::new();
    for t in terms {
        *by_step.entry(t.step_index).or_default() += &t.poly;
    }
    by_step
        .into_iter()
        .rev()
        .filter(|(_, p)| !p.is_zero())
        .map(|(j, p)| StepTerm::new(j, p))
        .collect()
}

impl StepPolyDensity {
    pub fn new(m: usize, n: usize, k: usize, terms: Vec<StepTerm>) -> Result<Self, Error> {
        if m < 1 || n < m {
            return Err(Error::InvalidDims { m, n });
        }
        if k < 1 || k > m {
            return Err(Error::InvalidOrder { k, m });
        }
        if let Some(t) = terms.iter().find(|t| t.step_index == 0) {
            return Err(Error::InvalidDensity(format!(
                "step index must be >= 1, got {}",
                t.step_index
            )));
        }
        Ok(Self {
            m,
            n,
            k,
            terms: canonical_terms(terms),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[StepTerm] {
        &self.terms
    }

    /// Polynomial attached to `Θ(1 - j x)`, zero if absent.
    pub fn term_poly(&self, j: usize) -> Poly {
        self.terms
            .iter()
            .find(|t| t.step_index == j)
            .map(|t| t.poly.clone())
            .unwrap_or_default()
    }

    pub fn support(&self) -> (Rational, Rational) {
        support_of(self.m, self.k)
    }

    /// Multiplies every term by `c`.
    pub fn scaled(&self, c: &Rational) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| StepTerm::new(t.step_index, t.poly.scale(c)))
            .collect();
        Self {
            m: self.m,
            n: self.n,
            k: self.k,
            terms: canonical_terms(terms),
        }
    }

    /// Sum of the polynomials of all terms with `j ≤ max_step`.
    fn active_poly(&self, max_step: usize) -> Poly {
        let mut acc = Poly::zero();
        for t in self.terms.iter().filter(|t| t.step_index <= max_step) {
            acc += &t.poly;
        }
        acc
    }

    /// Largest step index switched on at `x`, i.e. the largest `j` with `j x < 1`.
    fn max_active_step(x: &Rational) -> usize {
        if *x <= Rational::zero() {
            return usize::MAX;
        }
        // j x < 1  <=>  j < 1/x
        let inv = x.recip();
        let c = inv.ceil().to_integer();
        let j: BigInt = c - 1;
        usize::try_from(j).unwrap_or(usize::MAX)
    }

    /// Exact pointwise value: the sum of `poly(x)` over terms with `j x < 1`.
    pub fn evaluate(&self, x: &Rational) -> Rational {
        let max = Self::max_active_step(x);
        self.terms
            .iter()
            .filter(|t| t.step_index <= max)
            .map(|t| t.poly.eval(x))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Sign of the density at `x`, evaluated in integer arithmetic.
    pub fn sign_at(&self, x: &Rational) -> Ordering {
        self.active_poly(Self::max_active_step(x)).sign_at(x)
    }

    /// `∫₀¹ p(x) dx`, split at the breakpoints `1/j`.
    pub fn normalize_check(&self) -> Rational {
        self.moment(0)
    }

    /// Raw moment `∫ x^q p(x) dx`.
    pub fn moment(&self, q: u32) -> Rational {
        self.terms
            .iter()
            .map(|t| {
                t.poly
                    .mul_x_power(q as usize)
                    .integrate(&Rational::zero(), &t.cutoff())
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn cumulants(&self) -> [Rational; 4] {
        cumulants_from_raw(&[
            self.moment(1),
            self.moment(2),
            self.moment(3),
            self.moment(4),
        ])
    }

    pub fn descriptors(&self) -> Result<DescriptorSet, Error> {
        let [k1, k2, k3, k4] = self.cumulants();
        if k2.is_zero() {
            return Err(Error::DegenerateDensity);
        }
        let k2_sq = &k2 * &k2;
        Ok(DescriptorSet {
            mean: k1,
            skewness: &k3 * &k3 / (&k2_sq * &k2),
            excess_kurtosis: k4 / &k2_sq,
            variance: k2,
        })
    }

    /// Root multiplicity of the density at a support endpoint, using the
    /// polynomial piece active just inside the support.
    pub fn vanishing_order(&self, endpoint: &Rational) -> Result<usize, Error> {
        let (lo, hi) = self.support();
        let active = if *endpoint == lo {
            // just above: j·endpoint < 1
            if endpoint.is_zero() {
                self.active_poly(usize::MAX)
            } else {
                let j_strict = Self::max_active_step(endpoint);
                self.active_poly(j_strict)
            }
        } else if *endpoint == hi {
            // just below: j·endpoint <= 1
            let inv = endpoint.recip();
            let j = usize::try_from(inv.floor().to_integer()).unwrap_or(usize::MAX);
            self.active_poly(j)
        } else {
            return Err(Error::EndpointOutsideSupport(endpoint.to_string()));
        };
        active.root_multiplicity(endpoint).ok_or_else(|| {
            Error::InvalidDensity("density vanishes identically near endpoint".into())
        })
    }

    /// First grid point of spacing `step` over the support where the density
    /// is negative, or `None` if it is nonnegative everywhere on the grid.
    pub fn first_negative_on_grid(&self, step: &Rational) -> Option<Rational> {
        let (lo, hi) = self.support();
        // cumulative active polynomials, one per distinct active step
        let mut cache: BTreeMap<usize, Poly> = BTreeMap::new();
        let mut x = lo;
        while x <= hi {
            let j = Self::max_active_step(&x);
            let poly = cache.entry(j).or_insert_with(|| self.active_poly(j));
            if poly.sign_at(&x) == Ordering::Less {
                return Some(x);
            }
            x += step;
        }
        None
    }

    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        #[derive(Deserialize)]
        struct Raw {
            m: usize,
            n: usize,
            k: usize,
            terms: Vec<StepTerm>,
        }
        let raw: Raw = serde_json::from_str(s)?;
        if raw.terms.iter().any(|t| t.poly.is_zero()) {
            return Err(Error::InvalidDensity("zero polynomial term".into()));
        }
        let d = Self::new(raw.m, raw.n, raw.k, raw.terms)?;
        Ok(d)
    }

    /// Sampled curve on the support, `resolution` points per unit length,
    /// endpoints included. Columns `x,p` as 17-significant-digit decimals.
    pub fn curve_csv(&self, resolution: usize) -> String {
        let (lo, hi) = self.support();
        let width = &hi - &lo;
        let count = (&width * Rational::from_integer(BigInt::from(resolution.max(1))))
            .ceil()
            .to_integer();
        let count = usize::try_from(count).unwrap_or(1).max(1);
        let mut out = String::from("x,p\n");
        for i in 0..=count {
            let x = &lo + &width * Rational::new(BigInt::from(i), BigInt::from(count));
            let p = self.evaluate(&x);
            let _ = writeln!(
                out,
                "{},{}",
                rational_to_decimal(&x, 17),
                rational_to_decimal(&p, 17)
            );
        }
        out
    }
}

/// Sum of several densities' terms, merged by step index. Entries whose
/// polynomials cancel completely are kept as zero polynomials so callers can
/// see which steps vanished.
pub fn summed_terms(densities: &[StepPolyDensity]) -> BTreeMap<usize, Poly> {
    let mut by_step: BTreeMap<usize, Poly> = BTreeMap::new();
    for d in densities {
        for t in &d.terms {
            *by_step.entry(t.step_index).or_default() += &t.poly;
        }
    }
    by_step
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, ratio};
    use proptest::prelude::*;

    fn pw(a: i64, e: usize) -> Poly {
        Poly::one_minus_ax_pow(&int(a), e)
    }

    fn p1_m2() -> StepPolyDensity {
        StepPolyDensity::new(2, 2, 1, vec![StepTerm::new(2, pw(2, 2).scale(&int(6)))]).unwrap()
    }

    fn p2_m2() -> StepPolyDensity {
        let a = pw(2, 2).scale(&int(6));
        StepPolyDensity::new(
            2,
            2,
            2,
            vec![StepTerm::new(1, a.clone()), StepTerm::new(2, -a)],
        )
        .unwrap()
    }

    fn p1_m3() -> StepPolyDensity {
        StepPolyDensity::new(3, 3, 1, vec![StepTerm::new(3, pw(3, 7).scale(&int(24)))]).unwrap()
    }

    fn middle_quartic() -> Poly {
        Poly::from_integers(&[1, -15, 87, -165, 156])
    }

    fn p2_m3() -> StepPolyDensity {
        let a2 = (&pw(2, 3) * &middle_quartic()).scale(&int(48));
        let a3 = pw(3, 7).scale(&int(-48));
        StepPolyDensity::new(3, 3, 2, vec![StepTerm::new(2, a2), StepTerm::new(3, a3)]).unwrap()
    }

    fn p3_m3() -> StepPolyDensity {
        let a3 = pw(3, 7).scale(&int(24));
        let a2 = (&pw(2, 3) * &middle_quartic()).scale(&int(-48));
        let a1 = (&pw(1, 3) * &Poly::from_integers(&[1, -18, 132, -354, 309])).scale(&int(24));
        StepPolyDensity::new(
            3,
            3,
            3,
            vec![
                StepTerm::new(3, a3),
                StepTerm::new(2, a2),
                StepTerm::new(1, a1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn terms_are_canonical() {
        let d = StepPolyDensity::new(
            3,
            3,
            2,
            vec![
                StepTerm::new(2, Poly::one()),
                StepTerm::new(3, Poly::one()),
                StepTerm::new(2, -Poly::one()),
            ],
        )
        .unwrap();
        assert_eq!(d.terms().len(), 1);
        assert_eq!(d.terms()[0].step_index, 3);
        assert!(StepPolyDensity::new(3, 3, 4, vec![]).is_err());
        assert!(StepPolyDensity::new(3, 3, 1, vec![StepTerm::new(0, Poly::one())]).is_err());
    }

    #[test]
    fn pointwise_values() {
        assert_eq!(p1_m2().evaluate(&int(0)), int(6));
        assert_eq!(p1_m2().evaluate(&ratio(1, 2)), int(0));
        // direct substitution at x = 1/4, where only Θ(1-2x) and Θ(1-3x) are on
        let x = ratio(1, 4);
        let expected = int(48)
            * num_traits::pow(ratio(1, 2), 3)
            * (ratio(156, 256) - ratio(165, 64) + ratio(87, 16) - ratio(15, 4) + int(1))
            - int(48) * num_traits::pow(ratio(1, 4), 7);
        assert_eq!(p2_m3().evaluate(&x), expected);
        // above the support everything is switched off
        assert_eq!(p2_m3().evaluate(&ratio(2, 3)), int(0));
    }

    #[test]
    fn normalisation() {
        assert_eq!(p1_m3().normalize_check(), int(1));
        assert_eq!(p2_m3().normalize_check(), int(1));
        assert_eq!(p3_m3().normalize_check(), int(1));
        assert_eq!(p2_m2().normalize_check(), int(1));
    }

    fn fact(n: u64) -> Rational {
        Rational::from_integer((1..=n).product::<u64>().into())
    }

    #[test]
    fn closed_form_moments() {
        assert_eq!(p1_m2().moment(1), ratio(1, 8));
        for q in 0..=6u32 {
            let qf = fact(q as u64);
            let e2 = fact(3) * &qf / (num_traits::pow(int(2), q as usize) * fact(q as u64 + 3));
            assert_eq!(p1_m2().moment(q), e2, "m=2 q={q}");
            let e3 = fact(8) * &qf / (num_traits::pow(int(3), q as usize) * fact(q as u64 + 8));
            assert_eq!(p1_m3().moment(q), e3, "m=3 q={q}");
        }
    }

    #[test]
    fn descriptor_values() {
        let d = p1_m3().descriptors().unwrap();
        assert_eq!(d.mean, ratio(1, 27));
        assert_eq!(d.variance, ratio(4, 3645));
        assert_eq!(d.skewness, ratio(245, 121));
        assert_eq!(d.excess_kurtosis, ratio(201, 88));
        let d3 = p3_m3().descriptors().unwrap();
        assert_eq!(d3.mean, ratio(313, 432));
        assert_eq!(d3.variance, ratio(8179, 933120));
        let d2 = p2_m2().descriptors().unwrap();
        assert_eq!(d2.mean, ratio(7, 8));
        assert_eq!(d2.variance, ratio(3, 320));
        let point = StepPolyDensity::new(2, 2, 1, vec![StepTerm::new(1, Poly::zero())]).unwrap();
        assert!(matches!(point.descriptors(), Err(Error::DegenerateDensity)));
    }

    #[test]
    fn endpoint_orders() {
        assert_eq!(p2_m3().vanishing_order(&int(0)).unwrap(), 3);
        assert_eq!(p2_m3().vanishing_order(&ratio(1, 2)).unwrap(), 3);
        assert_eq!(p1_m3().vanishing_order(&int(0)).unwrap(), 0);
        assert_eq!(p3_m3().vanishing_order(&int(1)).unwrap(), 3);
        assert_eq!(p3_m3().vanishing_order(&ratio(1, 3)).unwrap(), 7);
        assert!(matches!(
            p3_m3().vanishing_order(&int(0)),
            Err(Error::EndpointOutsideSupport(_))
        ));
        assert!(p2_m3().vanishing_order(&ratio(1, 3)).is_err());
    }

    #[test]
    fn nonnegative_on_grid() {
        let step = ratio(1, 1000);
        for d in [p1_m2(), p2_m2(), p1_m3(), p2_m3(), p3_m3()] {
            assert_eq!(d.first_negative_on_grid(&step), None);
        }
        let neg = p1_m2().scaled(&int(-1));
        assert_eq!(neg.first_negative_on_grid(&step), Some(int(0)));
    }

    #[test]
    fn family_sum_has_no_inner_steps() {
        let sum = summed_terms(&[p1_m3(), p2_m3(), p3_m3()]);
        for (j, poly) in &sum {
            if *j >= 2 {
                assert!(poly.is_zero(), "step {j} survived");
            }
        }
        let means: Rational = [p1_m3(), p2_m3(), p3_m3()]
            .iter()
            .map(|d| d.moment(1))
            .sum();
        assert_eq!(means, int(1));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let d = p2_m3();
        let s = d.to_json().unwrap();
        assert!(s.contains("\"step_index\": 2"));
        assert!(s.contains("\"num\": \"48\""));
        let back = StepPolyDensity::from_json(&s).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json().unwrap(), s);
    }

    #[test]
    fn curve_csv_shape() {
        let csv = p1_m2().curve_csv(10);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,p");
        assert_eq!(lines[1], "0,6");
        assert_eq!(lines.len(), 2 + 5);
        assert_eq!(*lines.last().unwrap(), "0.5,0");
    }

    proptest! {
        #[test]
        fn two_level_mirror_symmetry(n in 0i64..10_000, d in 1i64..10_000) {
            let x = ratio(n % (d + 1), d);
            let one_minus = int(1) - &x;
            // p2(x) = p1(1 - x) in the open unit interval; the closed steps differ at 0 and 1
            prop_assume!(x > int(0) && x < int(1));
            prop_assert_eq!(p2_m2().evaluate(&x), p1_m2().evaluate(&one_minus));
        }
    }
}
