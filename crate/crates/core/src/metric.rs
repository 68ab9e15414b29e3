//! Metric axioms, the Ptolemy inequality and the four- and five-point
//! sum/product inequalities on finite metric spaces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scan::Candidate;
use crate::space::{euclidean, pair_sums, FiniteMetricSpace, Pairing, PointCloud, QuadrupleWitness};

/// Floor for the denominator of relative Ptolemy defects.
pub const PTOLEMY_DENOMINATOR_FLOOR: f64 = 1e-300;

/// Default relative tolerance for inequality checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Euclidean distance matrix of a point cloud.
pub fn build_metric_from_points(cloud: &PointCloud) -> Result<FiniteMetricSpace> {
    let pts = cloud.points();
    let n = pts.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&pts[i], &pts[j]);
            if d == 0.0 {
                return Err(Error::DuplicatePoint { first: i, second: j });
            }
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    FiniteMetricSpace::from_flat(n, dist, "euclidean")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub symmetric: bool,
    pub identity_ok: bool,
    /// max over ordered triples of distinct points of d(x,y) − d(x,z) − d(z,y);
    /// 0 when the space has fewer than three points.
    pub worst_triangle_violation: f64,
    pub worst_triangle_triple: Option<[usize; 3]>,
    /// Every triangle violation is at most `tol · (d(x,z) + d(z,y))`.
    pub triangle_ok: bool,
    /// Every perimeter violation is at most `tol` times its right-hand side.
    pub perimeter_ok: bool,
    /// Worst d₁₂+d₃₄ − (d₁₃+d₁₄+d₂₃+d₂₄) over quadruples and pairings.
    pub worst_perimeter_witness: Option<QuadrupleWitness>,
    pub tol: f64,
}

impl AxiomReport {
    pub fn is_metric(&self) -> bool {
        self.symmetric && self.identity_ok && self.triangle_ok
    }
}

/// Checks symmetry, identity of indiscernibles, the triangle inequality and
/// the four-point perimeter inequality. Never fails; violations are reported.
pub fn check_metric_axioms(space: &FiniteMetricSpace, tol: f64) -> AxiomReport {
    let n = space.n();
    let mut symmetric = true;
    let mut identity_ok = true;
    for i in 0..n {
        identity_ok &= space.d(i, i) == 0.0;
        for j in (i + 1)..n {
            symmetric &= space.d(i, j) == space.d(j, i);
            identity_ok &= space.d(i, j) > 0.0;
        }
    }

    let (worst_triangle, triangle_ok) = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best: Option<(f64, [usize; 3])> = None;
            let mut ok = true;
            for y in 0..n {
                if y == x {
                    continue;
                }
                for z in 0..n {
                    if z == x || z == y {
                        continue;
                    }
                    let v = space.d(x, y) - space.d(x, z) - space.d(z, y);
                    ok &= v <= tol * (space.d(x, z) + space.d(z, y));
                    if best.is_none_or(|(b, _)| v > b) {
                        best = Some((v, [x, y, z]));
                    }
                }
            }
            (best, ok)
        })
        .reduce(
            || (None, true),
            |(a, oka), (b, okb)| {
                let best = match (a, b) {
                    (None, x) | (x, None) => x,
                    (Some(a), Some(b)) => {
                        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                            Some(b)
                        } else {
                            Some(a)
                        }
                    }
                };
                (best, oka && okb)
            },
        );

    let (perimeter, perimeter_ok) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = None;
            let mut ok = true;
            for_each_quadruple_from(n, i, |q| {
                let s = pair_sums(space, q);
                for (k, pairing) in Pairing::ALL.iter().enumerate() {
                    let rhs = s[(k + 1) % 3] + s[(k + 2) % 3];
                    let v = s[k] - rhs;
                    ok &= v <= tol * rhs;
                    Candidate::offer_max(&mut best, v, q, Some(*pairing));
                }
            });
            (best, ok)
        })
        .reduce(
            || (None, true),
            |(a, oka), (b, okb)| (Candidate::merge_max(a, b), oka && okb),
        );

    AxiomReport {
        symmetric,
        identity_ok,
        worst_triangle_violation: worst_triangle.map_or(0.0, |(v, _)| v),
        worst_triangle_triple: worst_triangle.map(|(_, t)| t),
        triangle_ok,
        perimeter_ok,
        worst_perimeter_witness: perimeter.map(Candidate::witness),
        tol,
    }
}

/// Calls `f` on every quadruple `[i, j, k, l]` with `i < j < k < l < n`, for a fixed `i`.
#[inline]
pub(crate) fn for_each_quadruple_from(n: usize, i: usize, mut f: impl FnMut([usize; 4])) {
    for j in (i + 1)..n {
        for k in (j + 1)..n {
            for l in (k + 1)..n {
                f([i, j, k, l]);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtolemyReport {
    /// max over quadruples and pairings of (d₁₂d₃₄ − d₁₃d₂₄ − d₁₄d₂₃) / max(d₁₃d₂₄ + d₁₄d₂₃, floor);
    /// 0 when the space has fewer than four points.
    pub max_relative_defect: f64,
    pub witness: Option<QuadrupleWitness>,
    pub is_ptolemy: bool,
    pub tol: f64,
}

#[inline]
fn ptolemy_products(space: &FiniteMetricSpace, q: [usize; 4]) -> [f64; 3] {
    let [i, j, k, l] = q;
    [
        space.d(i, j) * space.d(k, l),
        space.d(i, k) * space.d(j, l),
        space.d(i, l) * space.d(j, k),
    ]
}

/// Exhaustive relative Ptolemy defect over all quadruples and pairings.
pub fn ptolemy_defect(space: &FiniteMetricSpace, tol: f64) -> PtolemyReport {
    let n = space.n();
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = None;
            for_each_quadruple_from(n, i, |q| {
                let p = ptolemy_products(space, q);
                for (k, pairing) in Pairing::ALL.iter().enumerate() {
                    let rhs = p[(k + 1) % 3] + p[(k + 2) % 3];
                    let v = (p[k] - rhs) / rhs.max(PTOLEMY_DENOMINATOR_FLOOR);
                    Candidate::offer_max(&mut best, v, q, Some(*pairing));
                }
            });
            best
        })
        .reduce(|| None, Candidate::merge_max);
    let max_relative_defect = best.map_or(0.0, |c| c.value);
    PtolemyReport {
        max_relative_defect,
        witness: best.map(Candidate::witness),
        is_ptolemy: max_relative_defect <= tol,
        tol,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma22Report {
    pub base: usize,
    /// max of p₃p₄d₁₂ + p₁p₂d₃₄ − (p₁p₃d₂₄ + p₂p₄d₁₃ + p₂p₃d₁₄ + p₁p₄d₂₃), pᵢ = d(base, xᵢ).
    pub max_defect: f64,
    /// Indices refer to the input space.
    pub witness: QuadrupleWitness,
    /// Quadruple/pairing combinations within 1e-12 (relative) of equality.
    pub near_equality_count: usize,
}

#[inline]
fn lemma22_terms(p: [f64; 4], d: impl Fn(usize, usize) -> f64, pairing: Pairing) -> (f64, f64) {
    let [(u1, u2), (v1, v2)] = pairing.pairs();
    let lhs = p[v1] * p[v2] * d(u1, u2) + p[u1] * p[u2] * d(v1, v2);
    let rhs = p[u1] * p[v1] * d(u2, v2)
        + p[u1] * p[v2] * d(u2, v1)
        + p[u2] * p[v1] * d(u1, v2)
        + p[u2] * p[v2] * d(u1, v1);
    (lhs, rhs)
}

/// Scans the weighted five-point inequality over all quadruples avoiding `base`.
pub fn lemma22_defect(space: &FiniteMetricSpace, base: usize) -> Result<Lemma22Report> {
    let n = space.n();
    space.check_index(base)?;
    if n < 5 {
        return Err(Error::FewerThanFivePoints(n));
    }
    if let Some(index) = (0..n).find(|&i| i != base && space.d(base, i) == 0.0) {
        return Err(Error::ZeroBaseDistance { index });
    }
    let others: Vec<usize> = (0..n).filter(|&i| i != base).collect();
    let m = others.len();
    let (best, near) = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut best = None;
            let mut near = 0usize;
            for_each_quadruple_from(m, i, |pos| {
                let q = pos.map(|t| others[t]);
                let p = q.map(|x| space.d(base, x));
                let d = |a: usize, b: usize| space.d(q[a], q[b]);
                for pairing in Pairing::ALL {
                    let (lhs, rhs) = lemma22_terms(p, d, pairing);
                    let v = lhs - rhs;
                    if v.abs() <= 1e-12 * rhs {
                        near += 1;
                    }
                    Candidate::offer_max(&mut best, v, q, Some(pairing));
                }
            });
            (best, near)
        })
        .reduce(
            || (None, 0),
            |(a, na), (b, nb)| (Candidate::merge_max(a, b), na + nb),
        );
    let best = best.expect("n >= 5 leaves at least one quadruple");
    Ok(Lemma22Report {
        base,
        max_defect: best.value,
        witness: best.witness(),
        near_equality_count: near,
    })
}
