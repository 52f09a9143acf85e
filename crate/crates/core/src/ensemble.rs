//! Monte Carlo ensemble of random complex pure states.
//!
//! States are drawn with i.i.d. standard normal real and imaginary parts and
//! normalised. The reduced density matrix `ψψ†` is diagonalised through its
//! real-symmetric embedding with cyclic Jacobi rotations. Sampling runs over a
//! fixed number of partitions, each with its own ChaCha stream, and partial
//! sums are merged in partition order, so results do not depend on how many
//! threads execute them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactnum::{rational_to_decimal, rational_to_f64, Rational};
use crate::ordstat::{purity, SpectrumFamily, SystemDims};
use crate::steppoly::support_of;
use crate::Error;

/// Independent RNG streams the sample index space is split across.
pub const PARTITIONS: usize = 64;
/// Highest power sum kept per order statistic (twice the highest reported moment).
const POWER_SUMS: usize = 8;
/// Highest reported sample moment.
pub const REPORTED_MOMENTS: usize = 4;
const MAX_SWEEPS: usize = 64;
/// Values this close outside a support edge are eigensolver noise.
const EDGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    m: usize,
    n: usize,
    /// Row-major `m × n`, `(re, im)`.
    amplitudes: Vec<(f64, f64)>,
}

impl PureState {
    /// Normalises the given amplitudes.
    pub fn from_amplitudes(m: usize, n: usize, amplitudes: Vec<(f64, f64)>) -> Result<Self, Error> {
        if amplitudes.len() != m * n {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for an {m}x{n} state",
                amplitudes.len()
            )));
        }
        let norm = amplitudes
            .iter()
            .map(|(re, im)| re * re + im * im)
            .sum::<f64>()
            .sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument(
                "state has zero or non-finite norm".into(),
            ));
        }
        let amplitudes = amplitudes
            .into_iter()
            .map(|(re, im)| (re / norm, im / norm))
            .collect();
        Ok(Self { m, n, amplitudes })
    }

    pub fn amplitude(&self, a: usize, b: usize) -> (f64, f64) {
        self.amplitudes[a * self.n + b]
    }

    pub fn squared_norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|(re, im)| re * re + im * im)
            .sum()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }
}

pub fn sample_state<R: Rng + ?Sized>(dims: SystemDims, rng: &mut R) -> PureState {
    let (m, n) = (dims.m(), dims.n());
    let amps = (0..m * n)
        .map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::from_amplitudes(m, n, amps).expect("gaussian draw has positive norm")
}

/// Eigenvalues of `ψψ†`, ascending.
pub fn reduced_spectrum(state: &PureState) -> Result<Vec<f64>, Error> {
    let (m, n) = (state.m, state.n);
    // ρ = R + iI, embedded as [[R, -I], [I, R]].
    let size = 2 * m;
    let mut a = vec![0.0; size * size];
    for p in 0..m {
        for q in 0..=p {
            let (mut re, mut im) = (0.0, 0.0);
            for b in 0..n {
                let (xr, xi) = state.amplitude(p, b);
                let (yr, yi) = state.amplitude(q, b);
                re += xr * yr + xi * yi;
                im += xi * yr - xr * yi;
            }
            for (r, c, v) in [
                (p, q, re),
                (q, p, re),
                (p + m, q + m, re),
                (q + m, p + m, re),
                (p + m, q, im),
                (q, p + m, im),
                (q + m, p, -im),
                (p, q + m, -im),
            ] {
                a[r * size + c] = v;
            }
        }
    }
    let mut eig = jacobi_eigenvalues(&mut a, size)?;
    eig.sort_by(f64::total_cmp);
    Ok(eig.into_iter().skip(1).step_by(2).collect())
}

/// Cyclic Jacobi on a dense symmetric matrix; returns the diagonal.
fn jacobi_eigenvalues(a: &mut [f64], size: usize) -> Result<Vec<f64>, Error> {
    let frob: f64 = a.iter().map(|v| v * v).sum::<f64>();
    let threshold = frob * 1e-30;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..size)
            .flat_map(|p| (p + 1..size).map(move |q| (p, q)))
            .map(|(p, q)| a[p * size + q] * a[p * size + q])
            .sum();
        if off <= threshold {
            return Ok((0..size).map(|i| a[i * size + i]).collect());
        }
        for p in 0..size {
            for q in p + 1..size {
                let apq = a[p * size + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * size + q] - a[p * size + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..size {
                    let (arp, arq) = (a[r * size + p], a[r * size + q]);
                    a[r * size + p] = c * arp - s * arq;
                    a[r * size + q] = s * arp + c * arq;
                }
                for r in 0..size {
                    let (apr, aqr) = (a[p * size + r], a[q * size + r]);
                    a[p * size + r] = c * apr - s * aqr;
                    a[q * size + r] = s * apr + c * aqr;
                }
            }
        }
    }
    Err(Error::EigenNotConverged(MAX_SWEEPS))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    pub counts: Vec<u64>,
    /// Samples further than the eigensolver slack outside `[lower, upper]`.
    pub out_of_support: u64,
}

impl Histogram {
    fn new(m: usize, k: usize, bins: usize) -> Self {
        let (lo, hi) = support_of(m, k);
        Self {
            k,
            lower: rational_to_f64(&lo),
            upper: rational_to_f64(&hi),
            counts: vec![0; bins],
            out_of_support: 0,
        }
    }

    pub fn bin_width(&self) -> f64 {
        (self.upper - self.lower) / self.counts.len() as f64
    }

    fn record(&mut self, x: f64) {
        if x < self.lower - EDGE_SLACK || x > self.upper + EDGE_SLACK {
            self.out_of_support += 1;
            return;
        }
        let bins = self.counts.len();
        let idx = ((x - self.lower) / self.bin_width()).floor();
        let idx = if idx < 0.0 {
            0
        } else {
            (idx as usize).min(bins - 1)
        };
        self.counts[idx] += 1;
    }

    fn merge(&mut self, other: &Self) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.out_of_support += other.out_of_support;
    }

    /// `(bin_left, bin_right, density)`, normalised by `total` samples.
    pub fn densities(&self, total: u64) -> Vec<(f64, f64, f64)> {
        let w = self.bin_width();
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let left = self.lower + w * i as f64;
                let right = self.lower + w * (i + 1) as f64;
                let d = if total == 0 {
                    0.0
                } else {
                    c as f64 / (w * total as f64)
                };
                (left, right, d)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub dims: SystemDims,
    /// Requested draws.
    pub sample_count: u64,
    /// Draws whose spectrum entered the statistics.
    pub accepted: u64,
    /// Non-converged eigensolves.
    pub discarded: u64,
    pub seed: u64,
    pub partitions: usize,
    pub histograms: Vec<Histogram>,
    /// `sample_moments[k-1][q-1]` for `q = 1..=4`.
    pub sample_moments: Vec<Vec<f64>>,
    /// Standard error of each sample moment.
    pub standard_errors: Vec<Vec<f64>>,
    /// Largest `|Σλ - 1|` seen.
    pub sum_check_max: f64,
    /// Most negative eigenvalue seen, or 0.
    pub min_eigenvalue: f64,
    /// Sample mean of `Σλ²`.
    pub purity_mean: f64,
    /// Raw power sums `Σ λ_k^q`, `q = 1..=8`.
    power_sums: Vec<Vec<f64>>,
    purity_sum: f64,
}

#[derive(Clone)]
struct Accumulator {
    accepted: u64,
    discarded: u64,
    histograms: Vec<Histogram>,
    power_sums: Vec<Vec<f64>>,
    purity_sum: f64,
    sum_check_max: f64,
    min_eigenvalue: f64,
}

impl Accumulator {
    fn new(m: usize, bins: usize) -> Self {
        Self {
            accepted: 0,
            discarded: 0,
            histograms: (1..=m).map(|k| Histogram::new(m, k, bins)).collect(),
            power_sums: vec![vec![0.0; POWER_SUMS]; m],
            purity_sum: 0.0,
            sum_check_max: 0.0,
            min_eigenvalue: 0.0,
        }
    }

    fn record(&mut self, spectrum: &[f64]) {
        self.accepted += 1;
        let total: f64 = spectrum.iter().sum();
        self.sum_check_max = self.sum_check_max.max((total - 1.0).abs());
        for (k, &x) in spectrum.iter().enumerate() {
            self.min_eigenvalue = self.min_eigenvalue.min(x);
            self.histograms[k].record(x);
            let mut pow = 1.0;
            for s in &mut self.power_sums[k] {
                pow *= x;
                *s += pow;
            }
        }
        self.purity_sum += spectrum.iter().map(|x| x * x).sum::<f64>();
    }

    fn merge(&mut self, other: &Self) {
        self.accepted += other.accepted;
        self.discarded += other.discarded;
        for (a, b) in self.histograms.iter_mut().zip(&other.histograms) {
            a.merge(b);
        }
        for (a, b) in self.power_sums.iter_mut().zip(&other.power_sums) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.purity_sum += other.purity_sum;
        self.sum_check_max = self.sum_check_max.max(other.sum_check_max);
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
    }
}

fn partition_rng(seed: u64, partition: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(partition as u64);
    rng
}

pub fn run_ensemble(
    dims: SystemDims,
    samples: u64,
    seed: u64,
    bins: usize,
) -> Result<EnsembleStats, Error> {
    if samples < 1 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if bins < 10 {
        return Err(Error::InvalidArgument("bins must be at least 10".into()));
    }
    let m = dims.m();
    let per = samples / PARTITIONS as u64;
    let extra = samples % PARTITIONS as u64;
    let partials: Vec<Accumulator> = (0..PARTITIONS)
        .into_par_iter()
        .map(|p| {
            let count = per + u64::from((p as u64) < extra);
            let mut rng = partition_rng(seed, p);
            let mut acc = Accumulator::new(m, bins);
            for _ in 0..count {
                let state = sample_state(dims, &mut rng);
                match reduced_spectrum(&state) {
                    Ok(spec) => acc.record(&spec),
                    Err(_) => acc.discarded += 1,
                }
            }
            acc
        })
        .collect();
    let mut acc = Accumulator::new(m, bins);
    for p in &partials {
        acc.merge(p);
    }

    let n = acc.accepted as f64;
    let mut sample_moments = Vec::with_capacity(m);
    let mut standard_errors = Vec::with_capacity(m);
    for sums in &acc.power_sums {
        let mean: Vec<f64> = sums.iter().map(|s| s / n).collect();
        let se = (0..REPORTED_MOMENTS)
            .map(|q| {
                if acc.accepted < 2 {
                    return f64::NAN;
                }
                let var = (mean[2 * q + 1] - mean[q] * mean[q]).max(0.0) * n / (n - 1.0);
                (var / n).sqrt()
            })
            .collect();
        sample_moments.push(mean[..REPORTED_MOMENTS].to_vec());
        standard_errors.push(se);
    }
    Ok(EnsembleStats {
        dims,
        sample_count: samples,
        accepted: acc.accepted,
        discarded: acc.discarded,
        seed,
        partitions: PARTITIONS,
        histograms: acc.histograms,
        sample_moments,
        standard_errors,
        sum_check_max: acc.sum_check_max,
        min_eigenvalue: acc.min_eigenvalue,
        purity_mean: acc.purity_sum / n,
        power_sums: acc.power_sums,
        purity_sum: acc.purity_sum,
    })
}

impl EnsembleStats {
    pub fn moment(&self, k: usize, q: usize) -> f64 {
        self.sample_moments[k - 1][q - 1]
    }

    pub fn standard_error(&self, k: usize, q: usize) -> f64 {
        self.standard_errors[k - 1][q - 1]
    }

    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(s)?)
    }

    /// `k,bin_left,bin_right,density` for every order statistic.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("k,bin_left,bin_right,density\n");
        for h in &self.histograms {
            out.push_str(&histogram_rows(h, self.accepted));
        }
        out
    }

    /// Histogram CSV restricted to one order statistic.
    pub fn histogram_csv_for(&self, k: usize) -> String {
        let mut out = String::from("k,bin_left,bin_right,density\n");
        out.push_str(&histogram_rows(&self.histograms[k - 1], self.accepted));
        out
    }
}

fn histogram_rows(h: &Histogram, total: u64) -> String {
    h.densities(total)
        .into_iter()
        .map(|(l, r, d)| format!("{},{l:.17e},{r:.17e},{d:.17e}\n", h.k))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub k: usize,
    pub q: usize,
    /// Exact moment as a decimal string.
    pub exact: String,
    pub sample: f64,
    pub abs_diff: f64,
    pub standard_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub dims: SystemDims,
    pub sample_count: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub rows: Vec<ComparisonRow>,
    pub pass: bool,
    /// `(k, q, |difference|)` of the largest deviation.
    pub worst: (usize, usize, f64),
    /// Mean of `Σλ²` against `(m+n)/(mn+1)`; informational.
    pub purity_exact: String,
    pub purity_sample: f64,
    /// Largest `|histogram - density|` at bin centres; informational.
    pub histogram_sup_deviation: f64,
}

impl ComparisonReport {
    pub fn max_abs_diff(&self) -> f64 {
        self.worst.2
    }

    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Moments `q = 1..=4` of every order statistic against the exact family.
pub fn compare(
    stats: &EnsembleStats,
    fam: &SpectrumFamily,
    tol: f64,
) -> Result<ComparisonReport, Error> {
    compare_up_to(stats, fam, tol, REPORTED_MOMENTS)
}

pub fn compare_up_to(
    stats: &EnsembleStats,
    fam: &SpectrumFamily,
    tol: f64,
    qmax: usize,
) -> Result<ComparisonReport, Error> {
    if stats.dims != fam.dims {
        return Err(Error::InvalidArgument(format!(
            "ensemble is {}x{}, family is {}x{}",
            stats.dims.m(),
            stats.dims.n(),
            fam.dims.m(),
            fam.dims.n()
        )));
    }
    if !(1..=REPORTED_MOMENTS).contains(&qmax) {
        return Err(Error::InvalidArgument(format!(
            "qmax must lie in 1..={REPORTED_MOMENTS}"
        )));
    }
    let mut rows = Vec::new();
    let mut worst = (0, 0, -1.0);
    for (idx, d) in fam.densities.iter().enumerate() {
        let k = idx + 1;
        for q in 1..=qmax {
            let exact = d.moment(q as u32);
            let sample = stats.moment(k, q);
            let diff = (sample - rational_to_f64(&exact)).abs();
            if diff.is_nan() || diff > worst.2 {
                worst = (k, q, diff);
            }
            rows.push(ComparisonRow {
                k,
                q,
                exact: rational_to_decimal(&exact, 17),
                sample,
                abs_diff: diff,
                standard_error: stats.standard_error(k, q),
                pass: diff < tol,
            });
        }
    }
    let mut sup = 0.0f64;
    for (h, d) in stats.histograms.iter().zip(&fam.densities) {
        let (lo, hi) = d.support();
        let bins = h.counts.len();
        let width = (&hi - &lo) / Rational::from_integer(bins.into());
        for (i, (_, _, density)) in h.densities(stats.accepted).into_iter().enumerate() {
            let centre = &lo + &width * Rational::new((2 * i + 1).into(), 2.into());
            let exact = rational_to_f64(&d.evaluate(&centre));
            sup = sup.max((density - exact).abs());
        }
    }
    let purity_exact = purity(fam.dims);
    Ok(ComparisonReport {
        dims: fam.dims,
        sample_count: stats.sample_count,
        seed: stats.seed,
        tolerance: tol,
        pass: rows.iter().all(|r| r.pass),
        rows,
        worst,
        purity_exact: rational_to_decimal(&purity_exact, 17),
        purity_sample: stats.purity_mean,
        histogram_sup_deviation: sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(m: usize, n: usize) -> SystemDims {
        SystemDims::new(m, n).unwrap()
    }

    #[test]
    fn sampled_states_are_normalized_and_replayable() {
        let mut a = partition_rng(7, 0);
        let mut b = partition_rng(7, 0);
        for _ in 0..100 {
            let s = sample_state(dims(3, 4), &mut a);
            assert!((s.squared_norm() - 1.0).abs() < 1e-12);
            assert_eq!(s, sample_state(dims(3, 4), &mut b));
        }
    }

    #[test]
    fn product_state_spectrum() {
        let mut amps = vec![(0.0, 0.0); 9];
        amps[0] = (1.0, 0.0);
        let s = PureState::from_amplitudes(3, 3, amps).unwrap();
        let spec = reduced_spectrum(&s).unwrap();
        for (x, e) in spec.iter().zip([0.0, 0.0, 1.0]) {
            assert!((x - e).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_state_spectrum() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = PureState::from_amplitudes(2, 2, vec![(h, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, h)])
            .unwrap();
        let spec = reduced_spectrum(&s).unwrap();
        assert!((spec[0] - 0.5).abs() < 1e-12 && (spec[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spectra_are_ordered_and_sum_to_one() {
        let mut rng = partition_rng(3, 5);
        for (m, n) in [(2, 2), (3, 5), (4, 4), (6, 8)] {
            for _ in 0..200 {
                let spec = reduced_spectrum(&sample_state(dims(m, n), &mut rng)).unwrap();
                assert_eq!(spec.len(), m);
                assert!((spec.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                assert!(spec.windows(2).all(|w| w[0] <= w[1]));
                assert!(spec[0] >= -1e-12 && spec[m - 1] <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn spectrum_matches_two_by_two_closed_form() {
        // Eigenvalues of a 2x2 Hermitian matrix from trace and determinant.
        let mut rng = partition_rng(11, 0);
        for _ in 0..100 {
            let s = sample_state(dims(2, 3), &mut rng);
            let entry = |p: usize, q: usize| {
                (0..3).fold((0.0, 0.0), |(re, im), b| {
                    let (xr, xi) = s.amplitude(p, b);
                    let (yr, yi) = s.amplitude(q, b);
                    (re + xr * yr + xi * yi, im + xi * yr - xr * yi)
                })
            };
            let (a, d) = (entry(0, 0).0, entry(1, 1).0);
            let (br, bi) = entry(0, 1);
            let disc = ((a - d) * (a - d) / 4.0 + br * br + bi * bi).sqrt();
            let spec = reduced_spectrum(&s).unwrap();
            assert!((spec[0] - ((a + d) / 2.0 - disc)).abs() < 1e-12);
            assert!((spec[1] - ((a + d) / 2.0 + disc)).abs() < 1e-12);
        }
    }

    #[test]
    fn smallest_eigenvalue_mean_two_by_two() {
        let stats = run_ensemble(dims(2, 2), 10_000, 0, 100).unwrap();
        assert!((stats.moment(1, 1) - 0.125).abs() < 1e-2);
        assert_eq!(stats.discarded, 0);
    }

    #[test]
    fn amplitude_weight_mean() {
        let mut rng = partition_rng(0, 0);
        let draws = 100_000;
        let mut total = 0.0;
        for _ in 0..draws {
            let (re, im) = sample_state(dims(2, 2), &mut rng).amplitude(0, 0);
            total += re * re + im * im;
        }
        assert!((total / draws as f64 - 0.25).abs() < 3e-3);
    }

    #[test]
    fn histograms_are_normalized_and_inside_support() {
        let stats = run_ensemble(dims(3, 3), 5_000, 2, 50).unwrap();
        for h in &stats.histograms {
            assert_eq!(h.out_of_support, 0);
            let mass: f64 = h
                .densities(stats.accepted)
                .iter()
                .map(|(l, r, d)| (r - l) * d)
                .sum();
            assert!((mass - 1.0).abs() < 1e-9);
        }
        assert!(stats.sum_check_max < 1e-10);
        assert!(stats.min_eigenvalue >= -1e-12);
    }

    #[test]
    fn runs_are_deterministic_across_thread_counts() {
        let a = run_ensemble(dims(3, 4), 3_001, 9, 20).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool
            .install(|| run_ensemble(dims(3, 4), 3_001, 9, 20))
            .unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = run_ensemble(dims(3, 4), 3_001, 10, 20).unwrap();
        assert_ne!(a.sample_moments, c.sample_moments);
    }

    #[test]
    fn stats_json_round_trips() {
        let a = run_ensemble(dims(2, 3), 500, 1, 10).unwrap();
        let json = a.to_json().unwrap();
        let b = EnsembleStats::from_json(&json).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_json().unwrap(), json);
    }

    #[test]
    fn histogram_csv_shape() {
        let a = run_ensemble(dims(2, 2), 200, 1, 10).unwrap();
        let csv = a.histogram_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,bin_left,bin_right,density");
        assert_eq!(lines.len(), 1 + 2 * 10);
        assert!(lines[1].starts_with("1,"));
        assert!(lines[20].starts_with("2,"));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(run_ensemble(dims(2, 2), 0, 0, 100).is_err());
        assert!(run_ensemble(dims(2, 2), 10, 0, 5).is_err());
    }

    #[test]
    fn undersampled_comparison_fails_with_worst_entry() {
        let fam = crate::ordstat::spectrum_family(dims(2, 2)).unwrap();
        let stats = run_ensemble(dims(2, 2), 100, 0, 10).unwrap();
        let rep = compare(&stats, &fam, 1e-3).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.rows.len(), 2 * REPORTED_MOMENTS);
        let worst = rep.rows.iter().map(|r| r.abs_diff).fold(0.0f64, f64::max);
        assert_eq!(rep.worst.2, worst);
    }

    #[test]
    fn comparison_rejects_mismatched_dims() {
        let fam = crate::ordstat::spectrum_family(dims(2, 3)).unwrap();
        let stats = run_ensemble(dims(2, 2), 100, 0, 10).unwrap();
        assert!(compare(&stats, &fam, 1e-3).is_err());
    }
}
