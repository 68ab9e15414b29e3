//! Sphere inversion orthogonal to the unit sphere, Möbius maps of the
//! punctured unit ball with f(0) = a, and the χ distortion bounds
//!
//! ```text
//! χ₀(x,y) ≤ χ_a(f(x),f(y)) ≤ χ₀(x,y) − ln(1 − |a|²).
//! ```

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{rng, sample_ball_point};
use crate::space::{euclidean, norm};

/// Inputs closer than this to the inversion pole are rejected.
pub const POLE_GUARD: f64 = 1e-14;
/// Points closer than this to a puncture are rejected.
pub const PUNCTURE_GUARD: f64 = 1e-14;
/// Accepted max |QᵀQ − I| entry for a supplied orthogonal matrix.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Inversion in the sphere S(a*, r) with a* = a/|a|² and r = √(1−|a|²)/|a|.
///
/// The sphere is orthogonal to the unit sphere and the inversion swaps `a`
/// and the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversionParams {
    pub dim: usize,
    pub a: Vec<f64>,
    pub a_star: Vec<f64>,
    pub r: f64,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        Err(Error::InvalidDimension(dim))
    } else {
        Ok(())
    }
}

pub fn make_inversion(a: &[f64]) -> Result<InversionParams> {
    check_dim(a.len())?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let len = norm(a);
    if len == 0.0 {
        return Err(Error::BaseAtOrigin);
    }
    if len >= 1.0 {
        return Err(Error::BaseOutsideBall { norm: len });
    }
    let len2 = len * len;
    Ok(InversionParams {
        dim: a.len(),
        a: a.to_vec(),
        a_star: a.iter().map(|v| v / len2).collect(),
        r: (1.0 - len2).sqrt() / len,
    })
}

impl InversionParams {
    /// |a*|² − r², which is 1 in exact arithmetic.
    pub fn power_identity(&self) -> f64 {
        let s = norm(&self.a_star);
        s * s - self.r * self.r
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: self.dim,
                found: x.len(),
            });
        }
        if euclidean(x, &self.a_star) < POLE_GUARD {
            return Err(Error::PoleInput);
        }
        Ok(())
    }
}

/// σ(x) = a* + (r / |x − a*|)² (x − a*).
pub fn apply_sigma(inv: &InversionParams, x: &[f64]) -> Result<Vec<f64>> {
    inv.check_point(x)?;
    let diff: Vec<f64> = x.iter().zip(&inv.a_star).map(|(xi, ci)| xi - ci).collect();
    let dist2: f64 = diff.iter().map(|v| v * v).sum();
    let k = inv.r * inv.r / dist2;
    Ok(inv.a_star.iter().zip(&diff).map(|(c, v)| c + k * v).collect())
}

/// Relative discrepancy of |σ(x) − σ(y)| · |x − a*| · |y − a*| = r² |x − y|.
pub fn sigma_distance_identity(inv: &InversionParams, x: &[f64], y: &[f64]) -> Result<f64> {
    let sx = apply_sigma(inv, x)?;
    let sy = apply_sigma(inv, y)?;
    let lhs = euclidean(&sx, &sy) * euclidean(x, &inv.a_star) * euclidean(y, &inv.a_star);
    let rhs = inv.r * inv.r * euclidean(x, y);
    Ok((lhs - rhs).abs() / rhs.max(1e-300))
}

/// Where the orthogonal part of a Möbius map comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum OrthogonalSource {
    Identity,
    Matrix(Vec<Vec<f64>>),
    /// Orthonormalized seeded Gaussian matrix.
    Seed(u64),
}

/// Row-major square matrix.
pub type Matrix = Vec<Vec<f64>>;

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// max |(QᵀQ − I)ᵢⱼ|.
pub fn orthogonality_defect(q: &[Vec<f64>]) -> f64 {
    let n = q.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = (0..n).map(|k| q[k][i] * q[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

/// Orthogonal matrix from a seeded Gaussian matrix by modified Gram–Schmidt
/// on its columns, with one reorthogonalization pass.
pub fn random_orthogonal(dim: usize, seed: u64) -> Matrix {
    let mut rng = rng(seed);
    loop {
        let mut cols: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let mut ok = true;
        for j in 0..dim {
            for _pass in 0..2 {
                for k in 0..j {
                    let proj: f64 = (0..dim).map(|t| cols[j][t] * cols[k][t]).sum();
                    for t in 0..dim {
                        cols[j][t] -= proj * cols[k][t];
                    }
                }
            }
            let len = norm(&cols[j]);
            if len < 1e-8 {
                ok = false;
                break;
            }
            cols[j].iter_mut().for_each(|v| *v /= len);
        }
        if ok {
            // column j of Q is cols[j]
            return (0..dim).map(|i| (0..dim).map(|j| cols[j][i]).collect()).collect();
        }
    }
}

fn mat_vec(q: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    q.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// f = σ ∘ q on the punctured unit ball; for a = 0 it is q alone.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusMap {
    a: Vec<f64>,
    inversion: Option<InversionParams>,
    q: Matrix,
}

pub fn make_moebius(a: &[f64], q: OrthogonalSource) -> Result<MoebiusMap> {
    let dim = a.len();
    check_dim(dim)?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let inversion = match make_inversion(a) {
        Ok(inv) => Some(inv),
        Err(Error::BaseAtOrigin) => None,
        Err(e) => return Err(e),
    };
    let q = match q {
        OrthogonalSource::Identity => identity(dim),
        OrthogonalSource::Seed(seed) => random_orthogonal(dim, seed),
        OrthogonalSource::Matrix(m) => {
            if m.len() != dim {
                return Err(Error::DimensionMismatch {
                    index: 0,
                    expected: dim,
                    found: m.len(),
                });
            }
            if let Some(index) = m.iter().position(|row| row.len() != dim) {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: m[index].len(),
                });
            }
            let deviation = orthogonality_defect(&m);
            if deviation.is_nan() || deviation > ORTHOGONALITY_TOL {
                return Err(Error::NotOrthogonal { deviation });
            }
            m
        }
    };
    Ok(MoebiusMap {
        a: a.to_vec(),
        inversion,
        q,
    })
}

impl MoebiusMap {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn q(&self) -> &[Vec<f64>] {
        &self.q
    }

    pub fn inversion(&self) -> Option<&InversionParams> {
        self.inversion.as_ref()
    }

    /// 1 / (1 − |a|²).
    pub fn scale_factor(&self) -> f64 {
        let len = norm(&self.a);
        1.0 / (1.0 - len * len)
    }

    /// −ln(1 − |a|²).
    pub fn bound_constant(&self) -> f64 {
        let len = norm(&self.a);
        -(-len * len).ln_1p()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: self.dim(),
                found: x.len(),
            });
        }
        let qx = mat_vec(&self.q, x);
        match &self.inversion {
            Some(inv) => apply_sigma(inv, &qx),
            None => Ok(qx),
        }
    }
}

/// χ_p(x,y) = ln(1 + |x−y| / (|x−p| |y−p|)) in Euclidean space.
pub fn chi_euclidean(p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    (euclidean(x, y) / (euclidean(x, p) * euclidean(y, p))).ln_1p()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub bound: String,
    pub pair_index: usize,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub a: Vec<f64>,
    pub pair_count: usize,
    /// max of χ₀(x,y) − χ_a(f(x),f(y)); ≤ 0 when the lower bound holds.
    pub max_lower_violation: f64,
    /// max of χ_a(f(x),f(y)) − χ₀(x,y) − bound_constant.
    pub max_upper_violation: f64,
    /// max |χ_a(f(x),f(y)) − ln(1 + |x−y| / ((1−|a|²)|x||y|))|.
    pub max_identity_discrepancy: f64,
    pub bound_constant: f64,
    pub tol: f64,
    pub bounds_hold: bool,
    pub witnesses: Vec<PairWitness>,
}

/// Per-pair quantities behind a [`DistortionReport`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDistortion {
    /// |x−y| / (|x||y|).
    pub ratio: f64,
    pub chi_origin: f64,
    pub chi_image: f64,
    pub chi_predicted: f64,
}

pub fn pair_distortion(map: &MoebiusMap, x: &[f64], y: &[f64], pair: usize) -> Result<PairDistortion> {
    let origin = vec![0.0; map.dim()];
    if norm(x) < PUNCTURE_GUARD || norm(y) < PUNCTURE_GUARD {
        return Err(Error::PointAtPuncture { pair });
    }
    let (fx, fy) = (map.apply(x)?, map.apply(y)?);
    if euclidean(&fx, map.a()) < PUNCTURE_GUARD || euclidean(&fy, map.a()) < PUNCTURE_GUARD {
        return Err(Error::PointAtPuncture { pair });
    }
    let ratio = euclidean(x, y) / (norm(x) * norm(y));
    Ok(PairDistortion {
        ratio,
        chi_origin: chi_euclidean(&origin, x, y),
        chi_image: chi_euclidean(map.a(), &fx, &fy),
        chi_predicted: (map.scale_factor() * ratio).ln_1p(),
    })
}

/// Evaluates both distortion bounds and the exact scaling identity on every pair.
pub fn distortion_check(map: &MoebiusMap, pairs: &[(Vec<f64>, Vec<f64>)], tol: f64) -> Result<DistortionReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("no point pairs supplied".into()));
    }
    let c = map.bound_constant();
    let mut lower = (f64::NEG_INFINITY, 0);
    let mut upper = (f64::NEG_INFINITY, 0);
    let mut identity: f64 = 0.0;
    for (k, (x, y)) in pairs.iter().enumerate() {
        if x.len() != map.dim() || y.len() != map.dim() {
            return Err(Error::DimensionMismatch {
                index: k,
                expected: map.dim(),
                found: if x.len() != map.dim() { x.len() } else { y.len() },
            });
        }
        let p = pair_distortion(map, x, y, k)?;
        let lo = p.chi_origin - p.chi_image;
        let up = p.chi_image - p.chi_origin - c;
        if lo > lower.0 {
            lower = (lo, k);
        }
        if up > upper.0 {
            upper = (up, k);
        }
        identity = identity.max((p.chi_image - p.chi_predicted).abs());
    }
    Ok(DistortionReport {
        a: map.a().to_vec(),
        pair_count: pairs.len(),
        max_lower_violation: lower.0,
        max_upper_violation: upper.0,
        max_identity_discrepancy: identity,
        bound_constant: c,
        tol,
        bounds_hold: lower.0 <= tol && upper.0 <= tol,
        witnesses: vec![
            PairWitness {
                bound: "lower".into(),
                pair_index: lower.1,
                violation: lower.0,
            },
            PairWitness {
                bound: "upper".into(),
                pair_index: upper.1,
                violation: upper.0,
            },
        ],
    })
}

/// `count` seeded pairs of distinct nonzero points in the open unit ball.
pub fn sample_pairs(count: usize, dim: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = rng(seed);
    let mut draw = || loop {
        let p = sample_ball_point(&mut rng, dim);
        if norm(&p) >= PUNCTURE_GUARD {
            return p;
        }
    };
    (0..count)
        .map(|_| loop {
            let (x, y) = (draw(), draw());
            if x != y {
                return (x, y);
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inversion_parameters() {
        let inv = make_inversion(&[0.5, 0.0, 0.0]).unwrap();
        assert_eq!(inv.a_star, vec![2.0, 0.0, 0.0]);
        assert!((inv.r - 3f64.sqrt()).abs() < 1e-15);
        assert!((inv.r - 1.7320508).abs() < 1e-7);
        assert!((inv.power_identity() - 1.0).abs() < 1e-12);

        let inv = make_inversion(&[0.3, 0.4]).unwrap();
        assert!((inv.r - 3f64.sqrt()).abs() < 1e-14);
        assert!((norm(&inv.a_star) - 2.0).abs() < 1e-15);

        let inv = make_inversion(&[1.0 - 1e-9, 0.0]).unwrap();
        assert!(inv.r < 1e-4);

        assert!(matches!(make_inversion(&[0.0, 0.0]), Err(Error::BaseAtOrigin)));
        assert!(matches!(make_inversion(&[1.0, 0.0]), Err(Error::BaseOutsideBall { .. })));
        assert!(matches!(make_inversion(&[0.5]), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn sigma_swaps_a_and_origin() {
        let inv = make_inversion(&[0.5, 0.0, 0.0]).unwrap();
        let s = apply_sigma(&inv, &[0.5, 0.0, 0.0]).unwrap();
        assert!(norm(&s) < 1e-15);
        let s = apply_sigma(&inv, &[0.0, 0.0, 0.0]).unwrap();
        assert!(euclidean(&s, &[0.5, 0.0, 0.0]) < 1e-15);
        assert!(matches!(apply_sigma(&inv, &[2.0, 0.0, 0.0]), Err(Error::PoleInput)));
        assert_eq!(sigma_distance_identity(&inv, &[0.1, 0.2, 0.0], &[0.1, 0.2, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn moebius_construction() {
        let f = make_moebius(&[0.5, 0.0, 0.0], OrthogonalSource::Identity).unwrap();
        let y = f.apply(&[0.5, 0.0, 0.0]).unwrap();
        assert!(norm(&y) < 1e-15);
        let near0 = f.apply(&[1e-9, 0.0, 0.0]).unwrap();
        assert!(euclidean(&near0, &[0.5, 0.0, 0.0]) < 1e-8);
        assert!((f.bound_constant() - 0.2876821).abs() < 1e-7);

        let bad = vec![vec![1.0, 0.1], vec![0.0, 1.0]];
        assert!(matches!(
            make_moebius(&[0.1, 0.0], OrthogonalSource::Matrix(bad)),
            Err(Error::NotOrthogonal { .. })
        ));
        let reflect = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
        assert!(make_moebius(&[0.1, 0.0], OrthogonalSource::Matrix(reflect)).is_ok());
        let zero = make_moebius(&[0.0, 0.0], OrthogonalSource::Seed(3)).unwrap();
        assert!(zero.inversion().is_none());
        assert_eq!(zero.bound_constant(), 0.0);
    }

    #[test]
    fn random_orthogonal_is_orthogonal_and_seeded() {
        for dim in 2..7 {
            let q = random_orthogonal(dim, 11);
            assert!(orthogonality_defect(&q) < 1e-14);
            assert_eq!(q, random_orthogonal(dim, 11));
        }
    }

    #[test]
    fn puncture_rejected() {
        let f = make_moebius(&[0.5, 0.0], OrthogonalSource::Identity).unwrap();
        let pairs = vec![(vec![0.0, 0.0], vec![0.1, 0.0])];
        assert!(matches!(
            distortion_check(&f, &pairs, 1e-10),
            Err(Error::PointAtPuncture { pair: 0 })
        ));
        // x = a maps to the origin, not the puncture a; x = 0 is the puncture
        let pairs = vec![(vec![0.2, 0.1], vec![0.5, 0.0])];
        assert!(distortion_check(&f, &pairs, 1e-10).is_ok());
        assert!(distortion_check(&f, &[], 1e-10).is_err());
    }

    #[test]
    fn pairs_are_seeded_and_valid() {
        let p = sample_pairs(50, 3, 4);
        assert_eq!(p, sample_pairs(50, 3, 4));
        assert!(p.iter().all(|(x, y)| x != y && norm(x) < 1.0 && norm(y) < 1.0));
    }
}
