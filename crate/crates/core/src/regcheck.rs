//! Sampling checks for k-regular and affinely k-regular maps.
//!
//! A map `f: R^d -> R^N` is k-regular when any k pairwise distinct points go
//! to linearly independent vectors. Sampling can refute this but never prove
//! it, so reports end in [`SampleVerdict::NoCounterexampleFound`] at best.
//!
//! Maps are evaluated in exact rational arithmetic. Ranks are computed either
//! by fraction-free elimination over the integers or, in float mode, by
//! counting singular values of the row-normalised value matrix above a
//! tolerance.
//!
//! Random tuples are drawn from a ChaCha8 stream per trial, keyed by the seed
//! and the trial index, so reports are reproducible regardless of thread count.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

pub type Q = BigRational;

/// Default bound on sampled numerators and denominators.
pub const DEFAULT_SAMPLE_BOUND: u32 = 1000;

/// Minimum pairwise distance between sampled points in float mode.
pub const FLOAT_MIN_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegError {
    #[error("point has dimension {found}, map expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("tuple size must be at least 1")]
    EmptyTuple,
    #[error("tolerance must be positive and finite")]
    InvalidTolerance,
    #[error("sample bound must be at least 1")]
    InvalidBound,
    #[error("linear map rows have inconsistent lengths")]
    RaggedMatrix,
    #[error("grid has {points} distinct points, fewer than the tuple size {k}")]
    GridTooSmall { points: usize, k: usize },
    #[error("unknown map family `{0}`")]
    UnknownFamily(String),
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Renders as `p/q` even for integers.
pub fn rational_string(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn serialize_q<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(x))
}

fn serialize_points<S: Serializer>(points: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
    let rendered: Vec<Vec<String>> = points
        .iter()
        .map(|p| p.iter().map(rational_string).collect())
        .collect();
    rendered.serialize(s)
}

/// A linear map `x -> A x` given by rational coefficient rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    rows: Vec<Vec<Q>>,
    domain_dim: usize,
}

impl LinearMap {
    pub fn new(rows: Vec<Vec<Q>>) -> Result<Self, RegError> {
        let domain_dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != domain_dim) {
            return Err(RegError::RaggedMatrix);
        }
        Ok(Self { rows, domain_dim })
    }

    pub fn zero(domain_dim: usize, target_dim: usize) -> Self {
        Self {
            rows: vec![vec![Q::zero(); domain_dim]; target_dim],
            domain_dim,
        }
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.rows
    }

    fn apply(&self, x: &[Q]) -> Vec<Q> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapFamily {
    /// `x -> (1, x, ..., x^{k-1})`, `R -> R^k`.
    RealMoment(usize),
    /// `z -> (1, z, ..., z^{k-1})` realified, `R^2 -> R^{2k-1}`.
    ComplexMoment(usize),
    /// `x -> (1, sigma(x))`, `R^n -> R^{n+2}`.
    SphereLift(usize),
    /// `sigma: R^n -> S^n`, inverse stereographic projection from the north pole.
    InverseStereographic(usize),
    Identity(usize),
    /// `x -> (1, f(x))`.
    AffineLift(Box<MapFamily>),
    Custom(LinearMap),
}

impl MapFamily {
    pub fn affine_lift(inner: MapFamily) -> Self {
        MapFamily::AffineLift(Box::new(inner))
    }

    pub fn domain_dim(&self) -> usize {
        match self {
            MapFamily::RealMoment(_) => 1,
            MapFamily::ComplexMoment(_) => 2,
            MapFamily::SphereLift(n) | MapFamily::InverseStereographic(n) | MapFamily::Identity(n) => *n,
            MapFamily::AffineLift(inner) => inner.domain_dim(),
            MapFamily::Custom(m) => m.domain_dim,
        }
    }

    pub fn target_dim(&self) -> usize {
        match self {
            MapFamily::RealMoment(k) => *k,
            MapFamily::ComplexMoment(k) => (2 * k).saturating_sub(1),
            MapFamily::SphereLift(n) => n + 2,
            MapFamily::InverseStereographic(n) => n + 1,
            MapFamily::Identity(n) => *n,
            MapFamily::AffineLift(inner) => inner.target_dim() + 1,
            MapFamily::Custom(m) => m.rows.len(),
        }
    }

    /// Builds a family from its CLI name. `k` sizes the moment curves, `n` is
    /// the domain dimension of the others.
    pub fn from_name(name: &str, k: usize, n: usize) -> Result<Self, RegError> {
        let family = match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "real-moment" => MapFamily::RealMoment(k),
            "complex-moment" => MapFamily::ComplexMoment(k),
            "sphere-lift" => MapFamily::SphereLift(n),
            "inverse-stereographic" => MapFamily::InverseStereographic(n),
            "identity" => MapFamily::Identity(n),
            "affine-identity" => MapFamily::affine_lift(MapFamily::Identity(n)),
            "constant" => MapFamily::affine_lift(MapFamily::Custom(LinearMap::zero(n, 0))),
            _ => return Err(RegError::UnknownFamily(name.to_string())),
        };
        Ok(family)
    }

    pub fn evaluate(&self, point: &[Q]) -> Result<Vec<Q>, RegError> {
        if point.len() != self.domain_dim() {
            return Err(RegError::DimensionMismatch {
                expected: self.domain_dim(),
                found: point.len(),
            });
        }
        Ok(self.evaluate_unchecked(point))
    }

    fn evaluate_unchecked(&self, point: &[Q]) -> Vec<Q> {
        match self {
            MapFamily::RealMoment(k) => {
                let mut out = Vec::with_capacity(*k);
                let mut power = Q::one();
                for _ in 0..*k {
                    out.push(power.clone());
                    power *= &point[0];
                }
                out
            }
            MapFamily::ComplexMoment(k) => {
                let mut out = Vec::with_capacity(self.target_dim());
                if *k == 0 {
                    return out;
                }
                out.push(Q::one());
                let (a, b) = (&point[0], &point[1]);
                let (mut re, mut im) = (Q::one(), Q::zero());
                for _ in 1..*k {
                    let next_re = &re * a - &im * b;
                    let next_im = &re * b + &im * a;
                    re = next_re;
                    im = next_im;
                    out.push(re.clone());
                    out.push(im.clone());
                }
                out
            }
            MapFamily::SphereLift(_) => {
                let mut out = vec![Q::one()];
                out.extend(inverse_stereographic(point));
                out
            }
            MapFamily::InverseStereographic(_) => inverse_stereographic(point),
            MapFamily::Identity(_) => point.to_vec(),
            MapFamily::AffineLift(inner) => {
                let mut out = vec![Q::one()];
                out.extend(inner.evaluate_unchecked(point));
                out
            }
            MapFamily::Custom(m) => m.apply(point),
        }
    }
}

impl fmt::Display for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapFamily::RealMoment(k) => write!(f, "REAL_MOMENT({k})"),
            MapFamily::ComplexMoment(k) => write!(f, "COMPLEX_MOMENT({k})"),
            MapFamily::SphereLift(n) => write!(f, "SPHERE_LIFT({n})"),
            MapFamily::InverseStereographic(n) => write!(f, "INVERSE_STEREOGRAPHIC({n})"),
            MapFamily::Identity(n) => write!(f, "IDENTITY({n})"),
            MapFamily::AffineLift(inner) => write!(f, "AFFINE_LIFT({inner})"),
            MapFamily::Custom(m) => write!(f, "CUSTOM({}x{})", m.rows.len(), m.domain_dim),
        }
    }
}

impl Serialize for MapFamily {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `x -> (2x / (|x|^2 + 1), (|x|^2 - 1) / (|x|^2 + 1))`, landing on the unit
/// sphere with the north pole `(0, ..., 0, 1)` as the point at infinity.
pub fn inverse_stereographic(x: &[Q]) -> Vec<Q> {
    let norm_sq: Q = x.iter().map(|c| c * c).sum();
    let denom = &norm_sq + Q::one();
    let mut out: Vec<Q> = x.iter().map(|c| c * q(2) / &denom).collect();
    out.push((norm_sq - Q::one()) / denom);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Arithmetic {
    ExactRational,
    Float { tolerance: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sampler {
    /// Every k-subset of the given points, in lexicographic index order.
    Grid(Vec<Vec<Q>>),
    /// `trials` tuples of points with coordinates `p/q`, `|p| <= bound`, `1 <= q <= bound`.
    Random { seed: u64, trials: u64, bound: u32 },
}

impl Sampler {
    pub fn random(seed: u64, trials: u64) -> Self {
        Sampler::Random {
            seed,
            trials,
            bound: DEFAULT_SAMPLE_BOUND,
        }
    }

    /// The points `(i, j)` with `0 <= i, j < side`.
    pub fn square_grid(side: i64) -> Self {
        let points = (0..side)
            .flat_map(|i| (0..side).map(move |j| vec![q(i), q(j)]))
            .collect();
        Sampler::Grid(points)
    }
}

fn squared_distance(a: &[Q], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let diff = x - y;
            &diff * &diff
        })
        .sum()
}

fn min_squared_separation(points: &[Vec<Q>]) -> Option<Q> {
    let mut best: Option<Q> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let dist = squared_distance(&points[i], &points[j]);
            if best.as_ref().is_none_or(|b| dist < *b) {
                best = Some(dist);
            }
        }
    }
    best
}

fn acceptable(points: &[Vec<Q>], arithmetic: Arithmetic) -> bool {
    let pairs = (0..points.len()).flat_map(|i| (i + 1..points.len()).map(move |j| (i, j)));
    match arithmetic {
        Arithmetic::ExactRational => pairs.into_iter().all(|(i, j)| points[i] != points[j]),
        Arithmetic::Float { .. } => {
            let approx: Vec<Vec<f64>> = points
                .iter()
                .map(|p| p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
                .collect();
            pairs.into_iter().all(|(i, j)| {
                let dist_sq: f64 = approx[i]
                    .iter()
                    .zip(&approx[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                dist_sq >= FLOAT_MIN_DISTANCE * FLOAT_MIN_DISTANCE
            })
        }
    }
}

fn random_rational(rng: &mut ChaCha8Rng, bound: u32) -> Q {
    let bound = i64::from(bound);
    let num = rng.random_range(-bound..=bound);
    let den = rng.random_range(1..=bound);
    q_frac(num, den)
}

fn random_tuple(
    seed: u64,
    trial: u64,
    bound: u32,
    dim: usize,
    k: usize,
    arithmetic: Arithmetic,
) -> Vec<Vec<Q>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    loop {
        let tuple: Vec<Vec<Q>> = (0..k)
            .map(|_| (0..dim).map(|_| random_rational(&mut rng, bound)).collect())
            .collect();
        if acceptable(&tuple, arithmetic) {
            return tuple;
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The k-tuples a sampler produces for a map with the given domain dimension,
/// in trial order. Grid tuples that fail the separation rule are dropped.
pub fn sample_configurations(
    sampler: &Sampler,
    domain_dim: usize,
    k: usize,
    arithmetic: Arithmetic,
) -> Result<Vec<Vec<Vec<Q>>>, RegError> {
    if k == 0 {
        return Err(RegError::EmptyTuple);
    }
    match sampler {
        Sampler::Grid(points) => {
            if let Some(bad) = points.iter().find(|p| p.len() != domain_dim) {
                return Err(RegError::DimensionMismatch {
                    expected: domain_dim,
                    found: bad.len(),
                });
            }
            if points.len() < k {
                return Err(RegError::GridTooSmall {
                    points: points.len(),
                    k,
                });
            }
            Ok(combinations(points.len(), k)
                .into_iter()
                .map(|c| c.into_iter().map(|i| points[i].clone()).collect::<Vec<_>>())
                .filter(|t| acceptable(t, arithmetic))
                .collect())
        }
        Sampler::Random {
            seed,
            trials,
            bound,
        } => {
            if *bound == 0 {
                return Err(RegError::InvalidBound);
            }
            Ok((0..*trials)
                .into_par_iter()
                .map(|t| random_tuple(*seed, t, *bound, domain_dim, k, arithmetic))
                .collect())
        }
    }
}

fn integer_row(row: &[Q]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// Fraction-free elimination. Returns the rank and, for square input, the
/// determinant of the integer matrix.
fn bareiss(mut m: Vec<Vec<BigInt>>) -> (usize, Option<BigInt>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut negate = false;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != rank {
            m.swap(p, rank);
            negate = !negate;
        }
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&m[i][j] * &m[rank][c] - &m[i][c] * &m[rank][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    let det = (rows == cols).then(|| {
        if rank < rows {
            BigInt::zero()
        } else if rows == 0 {
            BigInt::one()
        } else if negate {
            -m[rows - 1][cols - 1].clone()
        } else {
            m[rows - 1][cols - 1].clone()
        }
    });
    (rank, det)
}

/// Exact rank of a rational matrix.
pub fn exact_rank(rows: &[Vec<Q>]) -> usize {
    bareiss(rows.iter().map(|r| integer_row(r)).collect()).0
}

/// Exact determinant of a square rational matrix.
pub fn determinant(rows: &[Vec<Q>]) -> Option<Q> {
    let scales: Vec<BigInt> = rows
        .iter()
        .map(|r| r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom())))
        .collect();
    let ints = rows.iter().map(|r| integer_row(r)).collect();
    let det = bareiss(ints).1?;
    let scale = scales.into_iter().fold(BigInt::one(), |a, b| a * b);
    Some(Q::new(det, scale))
}

fn normalised_float_rows(rows: &[Vec<Q>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| {
            let v: Vec<f64> = r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter().map(|x| x / norm).collect()
            } else {
                v
            }
        })
        .collect()
}

/// Singular values of the row-normalised matrix, in descending order.
pub fn normalised_singular_values(rows: &[Vec<Q>]) -> Vec<f64> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Vec::new();
    }
    let flat: Vec<f64> = normalised_float_rows(rows).into_iter().flatten().collect();
    let m = DMatrix::from_row_slice(nrows, ncols, &flat);
    let mut values: Vec<f64> = m.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Number of normalised singular values above `tolerance`.
pub fn float_rank(rows: &[Vec<Q>], tolerance: f64) -> usize {
    normalised_singular_values(rows)
        .into_iter()
        .filter(|s| *s > tolerance)
        .count()
}

/// `det(A A^T) / prod |a_i|^2`, the square of the product of the singular
/// values of the row-normalised matrix. Zero exactly when the rows are
/// dependent.
pub fn singular_value_proxy_squared(rows: &[Vec<Q>]) -> Q {
    let gram: Vec<Vec<Q>> = rows
        .iter()
        .map(|a| {
            rows.iter()
                .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect();
    let Some(det) = determinant(&gram) else {
        return Q::zero();
    };
    let norms: Q = (0..rows.len()).map(|i| gram[i][i].clone()).product();
    if norms.is_zero() {
        Q::zero()
    } else {
        det / norms
    }
}

pub fn rank(rows: &[Vec<Q>], arithmetic: Arithmetic) -> usize {
    match arithmetic {
        Arithmetic::ExactRational => exact_rank(rows),
        Arithmetic::Float { tolerance } => float_rank(rows, tolerance),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SampleVerdict {
    NoCounterexampleFound,
    Counterexample,
    /// `k` exceeds the target dimension, so no tuple can be independent.
    AutomaticFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub trial: u64,
    #[serde(serialize_with = "serialize_points")]
    pub points: Vec<Vec<Q>>,
    pub rank: usize,
    pub defect: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub family: MapFamily,
    pub k: usize,
    pub trials: u64,
    pub arithmetic: Arithmetic,
    pub verdict: SampleVerdict,
    pub failures: Vec<Failure>,
    /// Smallest squared pairwise distance among the points of any tested tuple.
    #[serde(serialize_with = "serialize_opt_q")]
    pub min_separation_squared: Option<Q>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<&'static str>,
}

fn serialize_opt_q<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => serialize_q(x, s),
        None => s.serialize_none(),
    }
}

impl RegularityReport {
    pub fn has_counterexample(&self) -> bool {
        !self.failures.is_empty()
    }
}

fn validate(arithmetic: Arithmetic) -> Result<(), RegError> {
    match arithmetic {
        Arithmetic::Float { tolerance } if !(tolerance.is_finite() && tolerance > 0.0) => {
            Err(RegError::InvalidTolerance)
        }
        _ => Ok(()),
    }
}

/// Tests linear independence of `f(x_1), ..., f(x_k)` on every sampled tuple.
pub fn check_k_regular(
    family: &MapFamily,
    k: usize,
    sampler: &Sampler,
    arithmetic: Arithmetic,
) -> Result<RegularityReport, RegError> {
    validate(arithmetic)?;
    let tuples = sample_configurations(sampler, family.domain_dim(), k, arithmetic)?;
    check_configurations(family, k, tuples, arithmetic)
}

/// Same as [`check_k_regular`] on caller-supplied k-tuples, numbered in the
/// given order. Tuples are used as given, without the separation rule.
pub fn check_configurations(
    family: &MapFamily,
    k: usize,
    tuples: Vec<Vec<Vec<Q>>>,
    arithmetic: Arithmetic,
) -> Result<RegularityReport, RegError> {
    validate(arithmetic)?;
    if k == 0 {
        return Err(RegError::EmptyTuple);
    }
    for point in tuples.iter().flatten() {
        if point.len() != family.domain_dim() {
            return Err(RegError::DimensionMismatch {
                expected: family.domain_dim(),
                found: point.len(),
            });
        }
    }
    if let Some(t) = tuples.iter().find(|t| t.len() != k) {
        return Err(RegError::DimensionMismatch {
            expected: k,
            found: t.len(),
        });
    }
    let outcomes: Vec<(Option<Failure>, Option<Q>)> = tuples
        .into_par_iter()
        .enumerate()
        .map(|(trial, points)| {
            let values: Vec<Vec<Q>> = points.iter().map(|p| family.evaluate_unchecked(p)).collect();
            let r = rank(&values, arithmetic);
            let sep = min_squared_separation(&points);
            let failure = (r < k).then(|| Failure {
                trial: trial as u64,
                points,
                rank: r,
                defect: k - r,
            });
            (failure, sep)
        })
        .collect();
    let trials = outcomes.len() as u64;
    let mut failures = Vec::new();
    let mut min_sep: Option<Q> = None;
    for (failure, sep) in outcomes {
        failures.extend(failure);
        if let Some(sep) = sep {
            if min_sep.as_ref().is_none_or(|m| sep < *m) {
                min_sep = Some(sep);
            }
        }
    }
    let verdict = if k > family.target_dim() {
        SampleVerdict::AutomaticFailure
    } else if failures.is_empty() {
        SampleVerdict::NoCounterexampleFound
    } else {
        SampleVerdict::Counterexample
    };
    Ok(RegularityReport {
        family: family.clone(),
        k,
        trials,
        arithmetic,
        verdict,
        failures,
        min_separation_squared: min_sep,
        reduction: None,
    })
}

/// Affine k-regularity of `f`, checked as (k+1)-regularity of `x -> (1, f(x))`.
/// The report describes the lifted check.
pub fn check_affinely_regular(
    family: &MapFamily,
    k: usize,
    sampler: &Sampler,
    arithmetic: Arithmetic,
) -> Result<RegularityReport, RegError> {
    let lifted = MapFamily::affine_lift(family.clone());
    let mut report = check_k_regular(&lifted, k + 1, sampler, arithmetic)?;
    report.reduction = Some("affinely k-regular f <=> (k+1)-regular x -> (1, f(x))");
    Ok(report)
}
