//! Published closed forms and tables, embedded as a fixture corpus, and the
//! machinery to re-derive each one and compare exactly.
//!
//! Polynomials are stored in the factored shape they are usually printed in,
//! `c · x^e · (1 - j x)^p · (inner polynomial)`, and expanded at check time.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactnum::{parse_rational, Poly, Rational};
use crate::ordstat::{spectrum_family, SpectrumFamily, SystemDims};
use crate::steppoly::{StepPolyDensity, StepTerm};
use crate::Error;

/// `constant · x^x_power · (1 - step·x)^step_power · Σ inner[i] x^i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredPoly {
    pub constant: i64,
    #[serde(default)]
    pub x_power: usize,
    pub step: usize,
    pub step_power: usize,
    pub inner: Vec<i64>,
}

impl FactoredPoly {
    fn new(constant: i64, x_power: usize, step: usize, step_power: usize, inner: &[i64]) -> Self {
        Self {
            constant,
            x_power,
            step,
            step_power,
            inner: inner.to_vec(),
        }
    }

    pub fn expand(&self) -> Poly {
        let step = Rational::from_integer(BigInt::from(self.step));
        let base = Poly::one_minus_ax_pow(&step, self.step_power);
        (&base * &Poly::from_integers(&self.inner))
            .scale(&Rational::from_integer(BigInt::from(self.constant)))
            .mul_x_power(self.x_power)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Mean,
    Variance,
    Skewness,
    ExcessKurtosis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixtureKind {
    /// A density written out term by term: `(step index, polynomial)`.
    Density {
        m: usize,
        n: usize,
        k: usize,
        terms: Vec<(usize, FactoredPoly)>,
    },
    /// A coefficient polynomial `A_j^(m,n)`.
    Coefficient {
        m: usize,
        n: usize,
        j: usize,
        poly: FactoredPoly,
    },
    /// `p_k` as integer weights on the corpus's own `A_j^(m,n)` entries.
    Combination {
        m: usize,
        n: usize,
        k: usize,
        weights: Vec<(usize, i64)>,
    },
    /// An exact descriptor value, written `"p/q"`.
    Value {
        m: usize,
        n: usize,
        k: usize,
        quantity: Quantity,
        value: String,
    },
}

impl FixtureKind {
    fn dims(&self) -> (usize, usize) {
        match *self {
            Self::Density { m, n, .. }
            | Self::Coefficient { m, n, .. }
            | Self::Combination { m, n, .. }
            | Self::Value { m, n, .. } => (m, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub id: String,
    #[serde(flatten)]
    pub kind: FixtureKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureCorpus {
    pub fixtures: Vec<Fixture>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureOutcome {
    pub id: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureReport {
    pub outcomes: Vec<FixtureOutcome>,
}

impl FixtureReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FixtureOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

fn fp(constant: i64, step: usize, step_power: usize, inner: &[i64]) -> FactoredPoly {
    FactoredPoly::new(constant, 0, step, step_power, inner)
}

fn fpx(constant: i64, step: usize, step_power: usize, inner: &[i64]) -> FactoredPoly {
    FactoredPoly::new(constant, 1, step, step_power, inner)
}

fn density(
    id: &str,
    (m, n, k): (usize, usize, usize),
    terms: Vec<(usize, FactoredPoly)>,
) -> Fixture {
    Fixture {
        id: id.into(),
        kind: FixtureKind::Density { m, n, k, terms },
    }
}

fn coefficient(id: &str, (m, n): (usize, usize), j: usize, poly: FactoredPoly) -> Fixture {
    Fixture {
        id: id.into(),
        kind: FixtureKind::Coefficient { m, n, j, poly },
    }
}

fn combination(id: &str, (m, n, k): (usize, usize, usize), weights: &[(usize, i64)]) -> Fixture {
    Fixture {
        id: id.into(),
        kind: FixtureKind::Combination {
            m,
            n,
            k,
            weights: weights.to_vec(),
        },
    }
}

fn value(id: &str, (m, n, k): (usize, usize, usize), quantity: Quantity, v: &str) -> Fixture {
    Fixture {
        id: id.into(),
        kind: FixtureKind::Value {
            m,
            n,
            k,
            quantity,
            value: v.into(),
        },
    }
}

const M3_MIDDLE: &[i64] = &[1, -15, 87, -165, 156];
const M3_UPPER: &[i64] = &[1, -18, 132, -354, 309];

impl FixtureCorpus {
    /// Every published polynomial and table entry for `m ≤ 6`.
    pub fn embedded() -> Self {
        // m = n = 2
        let mut f = vec![
            density("m2n2.p1", (2, 2, 1), vec![(2, fp(6, 2, 2, &[1]))]),
            density(
                "m2n2.p2",
                (2, 2, 2),
                vec![(1, fp(6, 2, 2, &[1])), (2, fp(-6, 2, 2, &[1]))],
            ),
        ];

        // m = n = 3
        f.push(density("m3n3.p1", (3, 3, 1), vec![(3, fp(24, 3, 7, &[1]))]));
        f.push(density(
            "m3n3.p3",
            (3, 3, 3),
            vec![
                (3, fp(24, 3, 7, &[1])),
                (2, fp(-48, 2, 3, M3_MIDDLE)),
                (1, fp(24, 1, 3, M3_UPPER)),
            ],
        ));
        f.push(density(
            "m3n3.p2",
            (3, 3, 2),
            vec![(2, fp(48, 2, 3, M3_MIDDLE)), (3, fp(-48, 3, 7, &[1]))],
        ));
        let table1: [(usize, [&str; 4]); 3] = [
            (1, ["1/27", "4/3645", "245/121", "201/88"]),
            (
                2,
                [
                    "103/432",
                    "6499/933120",
                    "241916407220/33214290609379",
                    "-248949138/464607011",
                ],
            ),
            (
                3,
                [
                    "313/432",
                    "8179/933120",
                    "80059327220/66204269040019",
                    "-387186258/735856451",
                ],
            ),
        ];
        for (k, row) in table1 {
            let names = [
                ("kappa1", Quantity::Mean),
                ("kappa2", Quantity::Variance),
                ("skewness", Quantity::Skewness),
                ("excess_kurtosis", Quantity::ExcessKurtosis),
            ];
            for ((name, q), v) in names.into_iter().zip(row) {
                f.push(value(&format!("table1.k{k}.{name}"), (3, 3, k), q, v));
            }
        }

        // m = n = 4
        f.push(density(
            "m4n4.p1",
            (4, 4, 1),
            vec![(4, fp(60, 4, 14, &[1]))],
        ));
        let m44 = (4, 4);
        f.push(coefficient("m4n4.A4", m44, 4, fp(60, 4, 14, &[1])));
        f.push(coefficient(
            "m4n4.A3",
            m44,
            3,
            fp(60, 3, 8, &[3, -96, 1308, -6128, 29818, -70160, 67812]),
        ));
        f.push(coefficient(
            "m4n4.A2",
            m44,
            2,
            fp(
                30,
                2,
                6,
                &[
                    6, -264, 5208, -45920, 229936, -859040, 2706592, -5570528, 5517256,
                ],
            ),
        ));
        f.push(coefficient(
            "m4n4.A1",
            m44,
            1,
            fp(60, 1, 8, &[1, -48, 1044, -9904, 44934, -94128, 73116]),
        ));
        f.push(combination(
            "m4n4.p4",
            (4, 4, 4),
            &[(4, -1), (3, 1), (2, -1), (1, 1)],
        ));
        f.push(combination("m4n4.p2", (4, 4, 2), &[(4, -3), (3, 1)]));
        f.push(combination(
            "m4n4.p3",
            (4, 4, 3),
            &[(4, 3), (3, -2), (2, 1)],
        ));
        for (k, v) in ["1/64", "13727/139968", "617057/2239488", "1367807/2239488"]
            .into_iter()
            .enumerate()
        {
            f.push(value(
                &format!("m4n4.mean.k{}", k + 1),
                (4, 4, k + 1),
                Quantity::Mean,
                v,
            ));
        }

        // m = n = 5
        let m55 = (5, 5);
        f.push(coefficient("m5n5.A5", m55, 5, fp(120, 5, 23, &[1])));
        f.push(coefficient(
            "m5n5.A4",
            m55,
            4,
            fp(
                240,
                4,
                15,
                &[
                    2, -110, 2690, -20600, 304595, -1558835, 4852905, -10365975, 11082660,
                ],
            ),
        ));
        f.push(coefficient(
            "m5n5.A3",
            m55,
            3,
            fp(
                720,
                3,
                11,
                &[
                    1,
                    -82,
                    3124,
                    -55528,
                    656656,
                    -6833200,
                    60965520,
                    -390601200,
                    1733312295,
                    -5065359970,
                    10140970180,
                    -13794793180,
                    11635970460,
                ],
            ),
        ));
        f.push(coefficient(
            "m5n5.A2",
            m55,
            2,
            fp(
                240,
                2,
                11,
                &[
                    2,
                    -186,
                    8118,
                    -167464,
                    2021877,
                    -18428355,
                    161532525,
                    -1281331755,
                    7805513430,
                    -33503168380,
                    94797708060,
                    -158275026540,
                    119326518320,
                ],
            ),
        ));
        f.push(coefficient(
            "m5n5.A1",
            m55,
            1,
            fp(
                120,
                1,
                15,
                &[
                    1, -100, 4720, -104200, 1215160, -7812880, 27619440, -49896300, 35838555,
                ],
            ),
        ));
        let m5_weights: [&[(usize, i64)]; 5] = [
            &[(5, 1)],
            &[(5, -4), (4, 1)],
            &[(5, 6), (4, -3), (3, 1)],
            &[(5, -4), (4, 3), (3, -2), (2, 1)],
            &[(5, 1), (4, -1), (3, 1), (2, -1), (1, 1)],
        ];
        for (k, w) in m5_weights.iter().enumerate() {
            f.push(combination(&format!("m5n5.p{}", k + 1), (5, 5, k + 1), w));
        }

        // m = n = 6
        let m66 = (6, 6);
        f.push(coefficient("m6n6.A6", m66, 6, fp(210, 6, 34, &[1])));
        f.push(coefficient(
            "m6n6.A5",
            m66,
            5,
            fp(
                210,
                5,
                24,
                &[
                    5,
                    -420,
                    16080,
                    -160680,
                    6469230,
                    -40658112,
                    261366628,
                    -1595391672,
                    5683720173,
                    -11348219292,
                    11273058660,
                ],
            ),
        ));
        f.push(coefficient(
            "m6n6.A4",
            m66,
            4,
            fp(
                420,
                4,
                18,
                &[
                    5,
                    -660,
                    41220,
                    -1199200,
                    26188080,
                    -541359744,
                    9132924768,
                    -109228380096,
                    969229595664,
                    -6384003186176,
                    35245566675264,
                    -168039178157376,
                    674535601042864,
                    -2058660341189376,
                    4315240551175584,
                    -5476040960131392,
                    3527358922055856,
                ],
            ),
        ));
        f.push(coefficient(
            "m6n6.A3",
            m66,
            3,
            fp(
                420,
                3,
                16,
                &[
                    5,
                    -780,
                    58140,
                    -2125680,
                    50119740,
                    -1004003136,
                    19201278456,
                    -311887564848,
                    3949780543830,
                    -38228455420056,
                    283595869865088,
                    -1648254166845840,
                    7876735652844396,
                    -32847798731822496,
                    122296710227124168,
                    -385032778740807120,
                    925473909342876741,
                    -1465716247992173916,
                    1154580059692232388,
                ],
            ),
        ));
        f.push(coefficient(
            "m6n6.A2",
            m66,
            2,
            fp(
                210,
                2,
                18,
                &[
                    5,
                    -840,
                    67680,
                    -2641760,
                    60875040,
                    -1041040128,
                    17346863424,
                    -289429058688,
                    4135247214912,
                    -46316923954048,
                    395768314525056,
                    -2538512485868160,
                    11970268586045536,
                    -40164721924654464,
                    90652008902870976,
                    -123384033397219200,
                    76712186285087664,
                ],
            ),
        ));
        f.push(coefficient(
            "m6n6.A1",
            m66,
            1,
            fp(
                210,
                1,
                24,
                &[
                    1,
                    -180,
                    15600,
                    -657000,
                    15307350,
                    -210235104,
                    1758025460,
                    -8979492600,
                    27172972425,
                    -44490525420,
                    30241971348,
                ],
            ),
        ));
        let m6_weights: [&[(usize, i64)]; 6] = [
            &[(6, 1)],
            &[(6, -5), (5, 1)],
            &[(6, 10), (5, -4), (4, 1)],
            &[(6, -10), (5, 6), (4, -3), (3, 1)],
            &[(6, 5), (5, -4), (4, 3), (3, -2), (2, 1)],
            &[(6, -1), (5, 1), (4, -1), (3, 1), (2, -1), (1, 1)],
        ];
        for (k, w) in m6_weights.iter().enumerate() {
            f.push(combination(&format!("m6n6.p{}", k + 1), (6, 6, k + 1), w));
        }

        // m = 4, n = 5
        let m45 = (4, 5);
        f.push(coefficient(
            "m4n5.A4",
            m45,
            4,
            fpx(3420, 4, 14, &[1, 5, -20, 4]),
        ));
        f.push(coefficient(
            "m4n5.A3",
            m45,
            3,
            fpx(
                3420,
                3,
                9,
                &[3, -72, 552, 360, -19846, 145224, -430948, 580728, -188941],
            ),
        ));
        f.push(coefficient(
            "m4n5.A2",
            m45,
            2,
            fpx(
                3420,
                2,
                8,
                &[
                    3, -105, 1452, -8340, 8632, 174904, -1372976, 5366608, -11247836, 10332628,
                ],
            ),
        ));
        f.push(coefficient(
            "m4n5.A1",
            m45,
            1,
            fpx(3420, 1, 11, &[1, -40, 661, -5256, 21231, -41520, 31111]),
        ));
        let m45_weights: [&[(usize, i64)]; 4] = [
            &[(4, 1)],
            &[(4, -3), (3, 1)],
            &[(4, 3), (3, -2), (2, 1)],
            &[(4, -1), (3, 1), (2, -1), (1, 1)],
        ];
        for (k, w) in m45_weights.iter().enumerate() {
            f.push(combination(&format!("m4n5.p{}", k + 1), (4, 5, k + 1), w));
        }

        // means for the larger systems
        let table2: [((usize, usize), &str, &[&str]); 3] = [
            (
                (4, 5),
                "m4n5",
                &[
                    "125/4096",
                    "3188009/26873856",
                    "7552985/26873856",
                    "15312737/26873856",
                ],
            ),
            (
                (5, 5),
                "m5n5",
                &[
                    "1/125",
                    "813587/16384000",
                    "1182578796887/8707129344000",
                    "2440637328617/8707129344000",
                    "4581882694877/8707129344000",
                ],
            ),
            (
                (6, 6),
                "m6n6",
                &[
                    "1/216",
                    "301301927/10546875000",
                    "873543307049548733/11324620800000000000",
                    "75602489231060183229976073/487487792008396800000000000",
                    "132969850997476498208010743/487487792008396800000000000",
                    "225128892964655720357665283/487487792008396800000000000",
                ],
            ),
        ];
        for ((m, n), tag, means) in table2 {
            for (k, v) in means.iter().enumerate() {
                f.push(value(
                    &format!("table2.{tag}.k{}", k + 1),
                    (m, n, k + 1),
                    Quantity::Mean,
                    v,
                ));
            }
        }

        Self { fixtures: f }
    }

    pub fn get(&self, id: &str) -> Option<&Fixture> {
        self.fixtures.iter().find(|f| f.id == id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut Fixture> {
        self.fixtures.iter_mut().find(|f| f.id == id)
    }

    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(s)?)
    }

    /// Distinct `(m, n)` the corpus refers to.
    pub fn dims(&self) -> BTreeSet<(usize, usize)> {
        self.fixtures.iter().map(|f| f.kind.dims()).collect()
    }

    /// Re-derives every referenced family and compares each fixture exactly.
    pub fn check(&self) -> Result<FixtureReport, Error> {
        let dims: Vec<(usize, usize)> = self.dims().into_iter().collect();
        let families: BTreeMap<(usize, usize), SpectrumFamily> = dims
            .par_iter()
            .map(|&(m, n)| {
                let fam = spectrum_family(SystemDims::new(m, n)?)?;
                Ok(((m, n), fam))
            })
            .collect::<Result<_, Error>>()?;
        let outcomes = self
            .fixtures
            .iter()
            .map(|f| {
                let (m, n) = f.kind.dims();
                let detail = self.check_one(f, &families[&(m, n)]);
                FixtureOutcome {
                    id: f.id.clone(),
                    passed: detail.is_none(),
                    detail,
                }
            })
            .collect();
        Ok(FixtureReport { outcomes })
    }

    /// `None` on exact agreement, otherwise a description of the first difference.
    fn check_one(&self, fixture: &Fixture, fam: &SpectrumFamily) -> Option<String> {
        match &fixture.kind {
            FixtureKind::Density { m, n, k, terms } => {
                let expected = StepPolyDensity::new(
                    *m,
                    *n,
                    *k,
                    terms
                        .iter()
                        .map(|(j, p)| StepTerm::new(*j, p.expand()))
                        .collect(),
                );
                match expected {
                    Ok(e) => compare_densities(&e, fam.density(*k)),
                    Err(e) => Some(format!("malformed fixture: {e}")),
                }
            }
            FixtureKind::Coefficient { j, poly, .. } => {
                if *j < 1 || *j > fam.dims.m() {
                    return Some(format!("step index {j} out of range"));
                }
                compare_polys(&poly.expand(), fam.coefficient(*j)).map(|d| format!("A_{j}: {d}"))
            }
            FixtureKind::Combination { m, n, k, weights } => {
                let mut terms = Vec::new();
                for &(j, w) in weights {
                    let Some(a) = self.coefficient_fixture(*m, *n, j) else {
                        return Some(format!("no coefficient fixture for A_{j}^({m},{n})"));
                    };
                    terms.push(StepTerm::new(
                        j,
                        a.expand().scale(&Rational::from_integer(BigInt::from(w))),
                    ));
                }
                match StepPolyDensity::new(*m, *n, *k, terms) {
                    Ok(e) => compare_densities(&e, fam.density(*k)),
                    Err(e) => Some(format!("malformed fixture: {e}")),
                }
            }
            FixtureKind::Value {
                k, quantity, value, ..
            } => {
                let expected = match parse_rational(value) {
                    Ok(v) => v,
                    Err(e) => return Some(format!("malformed fixture: {e}")),
                };
                let d = fam.density(*k);
                let got = match quantity {
                    Quantity::Mean => Ok(d.moment(1)),
                    other => d.descriptors().map(|ds| match other {
                        Quantity::Variance => ds.variance,
                        Quantity::Skewness => ds.skewness,
                        _ => ds.excess_kurtosis,
                    }),
                };
                match got {
                    Ok(g) if g == expected => None,
                    Ok(g) => Some(format!("expected {expected}, derived {g}")),
                    Err(e) => Some(e.to_string()),
                }
            }
        }
    }

    fn coefficient_fixture(&self, m: usize, n: usize, j: usize) -> Option<&FactoredPoly> {
        self.fixtures.iter().find_map(|f| match &f.kind {
            FixtureKind::Coefficient {
                m: fm,
                n: fn_,
                j: fj,
                poly,
            } if *fm == m && *fn_ == n && *fj == j => Some(poly),
            _ => None,
        })
    }
}

fn compare_polys(expected: &Poly, derived: &Poly) -> Option<String> {
    let len = expected.coeffs().len().max(derived.coeffs().len());
    (0..len).find_map(|i| {
        let (e, d) = (expected.coeff(i), derived.coeff(i));
        (e != d).then(|| format!("coefficient of x^{i}: expected {e}, derived {d}"))
    })
}

fn compare_densities(expected: &StepPolyDensity, derived: &StepPolyDensity) -> Option<String> {
    let steps: BTreeSet<usize> = expected
        .terms()
        .iter()
        .chain(derived.terms())
        .map(|t| t.step_index)
        .collect();
    steps.into_iter().rev().find_map(|j| {
        compare_polys(&expected.term_poly(j), &derived.term_poly(j))
            .map(|d| format!("Θ(1-{j}x) term, {d}"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    #[test]
    fn factored_expansion() {
        let p = fpx(2, 3, 1, &[1, 1]).expand();
        // 2x(1-3x)(1+x) = 2x - 4x^2 - 6x^3
        assert_eq!(p, Poly::from_integers(&[0, 2, -4, -6]));
        assert_eq!(fp(6, 2, 2, &[1]).expand().eval(&int(0)), int(6));
    }

    #[test]
    fn ids_are_unique_and_corpus_round_trips() {
        let c = FixtureCorpus::embedded();
        let ids: BTreeSet<&str> = c.fixtures.iter().map(|f| f.id.as_str()).collect();
        assert_eq!(ids.len(), c.fixtures.len());
        assert!(c.get("table1.k2.kappa2").is_some());
        let json = c.to_json().unwrap();
        let back = FixtureCorpus::from_json(&json).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json().unwrap(), json);
    }

    #[test]
    fn small_corpus_passes_and_perturbation_is_named() {
        let mut c = FixtureCorpus::embedded();
        c.fixtures
            .retain(|f| matches!(f.kind.dims(), (2, 2) | (3, 3)));
        assert!(c.check().unwrap().all_passed());
        if let Some(Fixture {
            kind: FixtureKind::Value { value, .. },
            ..
        }) = c.get_mut("table1.k2.kappa2")
        {
            *value = "6500/933120".into();
        }
        let report = c.check().unwrap();
        let failed: Vec<&str> = report.failures().map(|o| o.id.as_str()).collect();
        assert_eq!(failed, vec!["table1.k2.kappa2"]);
    }

    #[test]
    fn coefficient_perturbation_reports_first_difference() {
        let mut c = FixtureCorpus::embedded();
        c.fixtures.retain(|f| f.kind.dims() == (3, 3));
        if let Some(Fixture {
            kind: FixtureKind::Density { terms, .. },
            ..
        }) = c.get_mut("m3n3.p2")
        {
            terms[0].1.inner[1] = -16;
        }
        let report = c.check().unwrap();
        let bad: Vec<_> = report.failures().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].id, "m3n3.p2");
        assert!(bad[0].detail.as_ref().unwrap().contains("x^1"));
    }
}
