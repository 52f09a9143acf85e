use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use super::{binomial, Rational, RationalRepr};

/// Dense polynomial in one variable with exact rational coefficients.
///
/// `coeffs[i]` is the coefficient of `x^i`. Trailing zeros are always trimmed,
/// so the zero polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * x^degree`.
    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn from_big_integers<I: IntoIterator<Item = BigInt>>(coeffs: I) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(Rational::from_integer).collect())
    }

    /// `(1 - a x)^e`, the shape every step-function factor takes.
    pub fn one_minus_ax_pow(a: &Rational, e: usize) -> Self {
        let coeffs = (0..=e)
            .map(|i| {
                let b = Rational::from_integer(binomial(e, i));
                let t = pow_rational(&-a.clone(), i);
                b * t
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `x^k * self`.
    pub fn mul_x_power(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Formal derivative.
    pub fn diff(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c / Rational::from_integer(BigInt::from(i + 1))),
        );
        Self { coeffs }
    }

    /// Exact value at `x` by Horner's rule.
    pub fn eval(&self, x: &Rational) -> Rational {
        if self.is_zero() || x.is_zero() {
            return self.coeff(0);
        }
        // Horner over a common denominator: sum c_i a^i b^(d-i) / b^d.
        let a = x.numer();
        let b = x.denom();
        let mut acc = Rational::zero();
        let mut bpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc =
                acc * Rational::from_integer(a.clone()) + c * Rational::from_integer(bpow.clone());
            bpow *= b;
        }
        acc / Rational::from_integer(bpow / b)
    }

    /// `∫_lo^hi p(x) dx`.
    pub fn integrate(&self, lo: &Rational, hi: &Rational) -> Rational {
        let anti = self.antiderivative();
        anti.eval(hi) - anti.eval(lo)
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self * (x - a)^e`, fully expanded.
    pub fn shift_power(&self, a: &Rational, e: usize) -> Self {
        let neg_a = -a.clone();
        let factor = Self::from_coeffs(
            (0..=e)
                .map(|i| Rational::from_integer(binomial(e, i)) * pow_rational(&neg_a, e - i))
                .collect(),
        );
        self * &factor
    }

    /// Taylor shift: the polynomial `q(x) = p(x + a)`.
    pub fn translate(&self, a: &Rational) -> Self {
        let n = self.coeffs.len();
        let mut out = self.coeffs.clone();
        // Synthetic-division scheme, O(n^2) exact operations.
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &out[j + 1] * a;
                out[j] += t;
            }
        }
        Self::from_coeffs(out)
    }

    /// Multiplicity of `a` as a root; `None` for the zero polynomial.
    pub fn root_multiplicity(&self, a: &Rational) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let shifted = self.translate(a);
        shifted.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Least common multiple of all coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Sign of `p(x)` computed in integer arithmetic (avoids rational
    /// normalisation on every Horner step).
    pub fn sign_at(&self, x: &Rational) -> std::cmp::Ordering {
        if self.is_zero() {
            return std::cmp::Ordering::Equal;
        }
        let l = self.denominator_lcm();
        let a = x.numer();
        let b = x.denom();
        let mut acc = BigInt::zero();
        let mut bpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            let ci = c.numer() * (&l / c.denom());
            acc = acc * a + ci * &bpow;
            bpow *= b;
        }
        if acc.is_positive() {
            std::cmp::Ordering::Greater
        } else if acc.is_negative() {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Equal
        }
    }
}

pub(crate) fn pow_rational(r: &Rational, e: usize) -> Rational {
    num_traits::pow(r.clone(), e)
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*x")?,
                _ => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.trim();
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self.trim();
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<RationalRepr> = self.coeffs.iter().map(RationalRepr::from).collect();
        reprs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let reprs = Vec::<RationalRepr>::deserialize(d)?;
        let coeffs = reprs
            .iter()
            .map(Rational::try_from)
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        let p = Poly { coeffs };
        if p.coeffs.last().is_some_and(Zero::is_zero) {
            return Err(D::Error::custom("trailing zero coefficient"));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, ratio};
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_integers(c)
    }

    /// Schoolbook convolution, kept separate from `Mul` as an oracle.
    fn convolve(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for i in 0..out.len() {
            for j in 0..=i {
                if j < a.len() && i - j < b.len() {
                    out[i] += &a[j] * &b[i - j];
                }
            }
        }
        out
    }

    #[test]
    fn binomial_square() {
        let q = p(&[1, -2]);
        assert_eq!(&q * &q, p(&[1, -4, 4]));
        assert!((&q * &Poly::zero()).is_zero());
        assert_eq!(Poly::from_integers(&[0, 0, 0]).degree(), None);
    }

    #[test]
    fn repeated_squaring_matches_direct_convolution() {
        // 24 (1-3x)^7 times the quartic that accompanies it in the m = 3 largest-eigenvalue density.
        let base = p(&[1, -3]);
        let by_squaring = base.pow(7).scale(&int(24));
        let mut direct = vec![int(24)];
        for _ in 0..7 {
            direct = convolve(&direct, base.coeffs());
        }
        assert_eq!(by_squaring, Poly::from_coeffs(direct.clone()));
        let quartic = p(&[1, -18, 132, -354, 309]);
        let full = &by_squaring * &quartic;
        assert_eq!(full, Poly::from_coeffs(convolve(&direct, quartic.coeffs())));
        assert_eq!(full.degree(), Some(11));
    }

    #[test]
    fn derivative_rules() {
        assert_eq!(Poly::monomial(int(1), 3).diff(), Poly::monomial(int(3), 2));
        assert!(Poly::constant(int(5)).diff().is_zero());
    }

    #[test]
    fn normalised_integrals() {
        let six = p(&[1, -2]).pow(2).scale(&int(6));
        assert_eq!(six.integrate(&int(0), &ratio(1, 2)), int(1));
    }

    #[test]
    fn shift_power_examples() {
        assert_eq!(Poly::one().shift_power(&int(1), 2), p(&[1, -2, 1]));
        let q = p(&[3, 0, 5]);
        assert_eq!(q.shift_power(&int(0), 0), q);
        // binomial theorem: constant term of (x - 1/3)^8 is (1/3)^8
        let e = Poly::one().shift_power(&ratio(1, 3), 8);
        assert_eq!(e.coeff(0), ratio(1, 6561));
        assert_eq!(e.coeff(8), int(1));
        assert_eq!(e.coeff(7), ratio(-8, 3));
    }

    #[test]
    fn one_minus_ax() {
        assert_eq!(Poly::one_minus_ax_pow(&int(2), 2), p(&[1, -4, 4]));
        assert_eq!(Poly::one_minus_ax_pow(&int(3), 0), Poly::one());
    }

    #[test]
    fn translate_and_roots() {
        // (1 - 2x)^3 (x + 1) has a triple root at 1/2
        let q = &p(&[1, -2]).pow(3) * &p(&[1, 1]);
        assert_eq!(q.root_multiplicity(&ratio(1, 2)), Some(3));
        assert_eq!(q.root_multiplicity(&int(-1)), Some(1));
        assert_eq!(q.root_multiplicity(&int(0)), Some(0));
        assert_eq!(Poly::zero().root_multiplicity(&int(0)), None);
        assert_eq!(p(&[0, 0, 1]).translate(&int(1)), p(&[1, 2, 1]));
    }

    #[test]
    fn sign_matches_eval() {
        let q = p(&[1, -18, 132, -354, 309]).scale(&ratio(-7, 3));
        for i in 0..=20 {
            let x = ratio(i, 20);
            assert_eq!(q.sign_at(&x), q.eval(&x).cmp(&Rational::zero()));
        }
    }

    #[test]
    fn serde_round_trip() {
        let q = Poly::from_coeffs(vec![ratio(1, 3), int(0), ratio(-5, 2)]);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(
            s,
            r#"[{"num":"1","den":"3"},{"num":"0","den":"1"},{"num":"-5","den":"2"}]"#
        );
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<Poly>(r#"[{"num":"0","den":"1"}]"#).is_err());
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((-50i64..50, 1i64..9), 0..8)
            .prop_map(|v| Poly::from_coeffs(v.into_iter().map(|(n, d)| ratio(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn field_identities(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let x = ratio(a, b);
            let y = ratio(c, d);
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            if !y.is_zero() {
                prop_assert_eq!(&(&x * &y) / &y, x);
            }
        }

        #[test]
        fn diff_undoes_antiderivative(q in small_poly()) {
            prop_assert_eq!(q.antiderivative().diff(), q);
        }

        #[test]
        fn degree_is_additive(a in small_poly(), b in small_poly()) {
            let prod = &a * &b;
            match (a.degree(), b.degree()) {
                (Some(da), Some(db)) => prop_assert_eq!(prod.degree(), Some(da + db)),
                _ => prop_assert!(prod.is_zero()),
            }
        }

        #[test]
        fn integral_is_additive(q in small_poly(), a in -20i64..20, b in -20i64..20, c in -20i64..20) {
            let mut v = [a, b, c];
            v.sort();
            let (lo, mid, hi) = (ratio(v[0], 7), ratio(v[1], 7), ratio(v[2], 7));
            prop_assert_eq!(q.integrate(&lo, &mid) + q.integrate(&mid, &hi), q.integrate(&lo, &hi));
        }

        #[test]
        fn eval_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), n in -30i64..30, d in 1i64..12) {
            let x = ratio(n, d);
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
            prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
            prop_assert_eq!(a.translate(&x).eval(&Rational::zero()), a.eval(&x));
        }
    }
}
