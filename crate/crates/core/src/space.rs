//! Point clouds, finite metric spaces and quadruple witnesses.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labeled points in Rⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
            if let Some(col) = p.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: index, col });
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != points.len() {
                return Err(Error::LabelCountMismatch {
                    labels: labels.len(),
                    points: points.len(),
                });
            }
            let mut seen = HashSet::with_capacity(labels.len());
            for l in labels {
                if !seen.insert(l.as_str()) {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
            }
        }
        Ok(Self { dim, points, labels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

/// Euclidean distance between two equal-length coordinate slices.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A finite metric space stored as a dense symmetric distance matrix.
///
/// Construction enforces a zero diagonal, exact symmetry, finiteness and
/// strictly positive off-diagonal entries. The triangle inequality is not
/// assumed; see [`crate::metric::check_metric_axioms`].
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
    excluded_base: Option<usize>,
    provenance: String,
}

impl FiniteMetricSpace {
    /// Builds a space from matrix rows.
    pub fn from_rows(rows: &[Vec<f64>], provenance: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let mut dist = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
            dist.extend_from_slice(r);
        }
        Self::from_flat(n, dist, provenance)
    }

    /// Builds a space from a row-major `n * n` buffer.
    pub fn from_flat(n: usize, dist: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        if dist.len() != n * n {
            return Err(Error::NotSquare {
                row: 0,
                len: dist.len(),
                expected: n * n,
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = dist[i * n + j];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if i == j {
                    if v != 0.0 {
                        return Err(Error::NonzeroDiagonal { index: i });
                    }
                } else {
                    if v != dist[j * n + i] {
                        return Err(Error::AsymmetricInput { row: i, col: j });
                    }
                    if v <= 0.0 {
                        return Err(Error::NonPositiveDistance { row: i, col: j });
                    }
                }
            }
        }
        Ok(Self {
            n,
            dist,
            excluded_base: None,
            provenance: provenance.into(),
        })
    }

    /// Fills the upper triangle from `f(i, j)` (i < j) and mirrors it.
    ///
    /// Callers guarantee finite positive values; this is checked in debug
    /// builds only.
    pub(crate) fn from_upper_fn(
        n: usize,
        provenance: String,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                debug_assert!(v.is_finite() && v >= 0.0, "bad entry {v} at ({i}, {j})");
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        Self {
            n,
            dist,
            excluded_base: None,
            provenance,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.dist
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Index of the removed base point, in the parent space's numbering.
    pub fn excluded_base(&self) -> Option<usize> {
        self.excluded_base
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub(crate) fn with_excluded_base(mut self, base: usize) -> Self {
        self.excluded_base = Some(base);
        self
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Maps an index of this (possibly punctured) space to the parent's numbering.
    pub fn original_index(&self, i: usize) -> usize {
        match self.excluded_base {
            Some(b) if i >= b => i + 1,
            _ => i,
        }
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, n: self.n })
        }
    }

    /// All distances multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(Self {
            n: self.n,
            dist: self.dist.iter().map(|d| d * factor).collect(),
            excluded_base: self.excluded_base,
            provenance: format!("scaled[{factor}]({})", self.provenance),
        })
    }

    /// The space relabeled so that new point `k` is old point `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::InvalidParameter(format!(
                "permutation has length {}, expected {n}",
                perm.len()
            )));
        }
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = self.d(perm[i], perm[j]);
            }
        }
        Ok(Self {
            n,
            dist,
            excluded_base: None,
            provenance: format!("permuted({})", self.provenance),
        })
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }
}

/// One of the three ways to split a quadruple (x₁, x₂, x₃, x₄) into two pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pairing {
    #[serde(rename = "12|34")]
    P12_34,
    #[serde(rename = "13|24")]
    P13_24,
    #[serde(rename = "14|23")]
    P14_23,
}

impl Pairing {
    pub const ALL: [Pairing; 3] = [Pairing::P12_34, Pairing::P13_24, Pairing::P14_23];

    /// The pair of index pairs, as positions into a 4-tuple.
    pub fn pairs(self) -> [(usize, usize); 2] {
        match self {
            Pairing::P12_34 => [(0, 1), (2, 3)],
            Pairing::P13_24 => [(0, 2), (1, 3)],
            Pairing::P14_23 => [(0, 3), (1, 2)],
        }
    }

    pub fn from_position(k: usize) -> Pairing {
        Self::ALL[k]
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pairing::P12_34 => "12|34",
            Pairing::P13_24 => "13|24",
            Pairing::P14_23 => "14|23",
        })
    }
}

/// The quadruple achieving an extremum of some scanned quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadrupleWitness {
    pub indices: [usize; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Pairing>,
    pub value: f64,
}

/// Pairing sums d₁₂+d₃₄, d₁₃+d₂₄, d₁₄+d₂₃ of a quadruple.
#[inline]
pub(crate) fn pair_sums(space: &FiniteMetricSpace, q: [usize; 4]) -> [f64; 3] {
    let [i, j, k, l] = q;
    [
        space.d(i, j) + space.d(k, l),
        space.d(i, k) + space.d(j, l),
        space.d(i, l) + space.d(j, k),
    ]
}
