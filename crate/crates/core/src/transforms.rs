//! Metric transforms: ln(1+d), s_p, S_p, χ_p, τ_p and the boundary metric h_{D,c}.
//!
//! All logarithms are natural. χ_p and τ_p are defined off the base point,
//! so their outputs drop it and record it as the excluded base; s_p and S_p
//! keep every point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{euclidean, FiniteMetricSpace, PointCloud};

/// Smallest constant for which h_{D,c} is known to be a metric.
pub const HDC_BEST_CONSTANT: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformKind {
    #[serde(rename = "log")]
    Log,
    #[serde(rename = "sp")]
    Sp,
    #[serde(rename = "Sp")]
    CapSp,
    #[serde(rename = "chi")]
    Chi,
    #[serde(rename = "tau")]
    Tau,
    #[serde(rename = "hdc")]
    Hdc,
}

impl TransformKind {
    pub fn needs_base(self) -> bool {
        matches!(
            self,
            TransformKind::Sp | TransformKind::CapSp | TransformKind::Chi | TransformKind::Tau
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TransformKind::Log => "log",
            TransformKind::Sp => "sp",
            TransformKind::CapSp => "Sp",
            TransformKind::Chi => "chi",
            TransformKind::Tau => "tau",
            TransformKind::Hdc => "hdc",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    /// Case-sensitive: `sp` is s_p, `Sp` is S_p.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "log" => TransformKind::Log,
            "sp" => TransformKind::Sp,
            "Sp" => TransformKind::CapSp,
            "chi" => TransformKind::Chi,
            "tau" => TransformKind::Tau,
            "hdc" => TransformKind::Hdc,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown transform kind {other:?}"
                )))
            }
        })
    }
}

/// A transform choice together with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl TransformSpec {
    pub fn new(kind: TransformKind, base: Option<usize>, c: Option<f64>) -> Self {
        Self { kind, base, c }
    }

    /// Checks parameter presence and returns any warnings.
    pub fn validate(&self, n: Option<usize>) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        match (self.kind.needs_base(), self.base) {
            (true, None) => {
                return Err(Error::InvalidParameter(format!(
                    "transform {} requires a base point",
                    self.kind
                )))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidParameter(format!(
                    "transform {} takes no base point",
                    self.kind
                )))
            }
            (true, Some(b)) => {
                if let Some(n) = n {
                    if b >= n {
                        return Err(Error::IndexOutOfRange { index: b, n });
                    }
                }
            }
            (false, None) => {}
        }
        if self.kind == TransformKind::Hdc {
            let c = self.c_or_default();
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
            }
            if c < HDC_BEST_CONSTANT {
                warnings.push(format!(
                    "c = {c} is below {HDC_BEST_CONSTANT}; the result need not be a metric"
                ));
            }
        } else if self.c.is_some() {
            return Err(Error::InvalidParameter(format!(
                "transform {} takes no c parameter",
                self.kind
            )));
        }
        Ok(warnings)
    }

    pub fn c_or_default(&self) -> f64 {
        self.c.unwrap_or(HDC_BEST_CONSTANT)
    }

    /// Applies a distance-matrix transform. `Hdc` needs coordinates and a
    /// boundary; use [`hdc_metric`] for it.
    pub fn apply(&self, space: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
        self.validate(Some(space.n()))?;
        let base = self.base.unwrap_or(0);
        match self.kind {
            TransformKind::Log => Ok(log_metric(space)),
            TransformKind::Sp => sp_metric(space, base),
            TransformKind::CapSp => cap_sp_metric(space, base),
            TransformKind::Chi => chi_metric(space, base),
            TransformKind::Tau => tau_metric(space, base),
            TransformKind::Hdc => Err(Error::InvalidParameter(
                "hdc operates on point clouds with a boundary set".into(),
            )),
        }
    }
}

/// ln(1 + d) entrywise.
pub fn log_metric(space: &FiniteMetricSpace) -> FiniteMetricSpace {
    FiniteMetricSpace::from_upper_fn(space.n(), format!("log({})", space.provenance()), |i, j| {
        space.d(i, j).ln_1p()
    })
}

/// d(x,y) / ((1 + d(x,p)) (1 + d(y,p))) on all points, base included.
pub fn sp_metric(space: &FiniteMetricSpace, base: usize) -> Result<FiniteMetricSpace> {
    space.check_index(base)?;
    let w: Vec<f64> = (0..space.n()).map(|i| 1.0 + space.d(i, base)).collect();
    Ok(FiniteMetricSpace::from_upper_fn(
        space.n(),
        format!("sp[{base}]({})", space.provenance()),
        |i, j| space.d(i, j) / (w[i] * w[j]),
    ))
}

/// ln(1 + s_p), computed as `log_metric(sp_metric(..))`.
pub fn cap_sp_metric(space: &FiniteMetricSpace, base: usize) -> Result<FiniteMetricSpace> {
    let sp = sp_metric(space, base)?;
    Ok(log_metric(&sp).with_provenance(format!("Sp[{base}]({})", space.provenance())))
}

fn punctured(
    space: &FiniteMetricSpace,
    base: usize,
    name: &str,
    f: impl Fn(f64, f64, f64) -> f64,
) -> Result<FiniteMetricSpace> {
    space.check_index(base)?;
    if space.n() < 2 {
        return Err(Error::InvalidParameter(format!(
            "{name} needs at least two points"
        )));
    }
    let keep: Vec<usize> = (0..space.n()).filter(|&i| i != base).collect();
    if let Some(&index) = keep.iter().find(|&&i| space.d(base, i) == 0.0) {
        return Err(Error::ZeroBaseDistance { index });
    }
    let out = FiniteMetricSpace::from_upper_fn(
        keep.len(),
        format!("{name}[{base}]({})", space.provenance()),
        |a, b| {
            let (i, j) = (keep[a], keep[b]);
            f(space.d(i, j), space.d(base, i), space.d(base, j))
        },
    );
    Ok(out.with_excluded_base(base))
}

/// ln(1 + d(x,y) / (d(p,x) d(p,y))) on the points other than `base`.
pub fn chi_metric(space: &FiniteMetricSpace, base: usize) -> Result<FiniteMetricSpace> {
    punctured(space, base, "chi", |d, px, py| (d / (px * py)).ln_1p())
}

/// ln(1 + 2 d(x,y) / √(d(p,x) d(p,y))) on the points other than `base`.
pub fn tau_metric(space: &FiniteMetricSpace, base: usize) -> Result<FiniteMetricSpace> {
    punctured(space, base, "tau", |d, px, py| {
        (2.0 * d / (px * py).sqrt()).ln_1p()
    })
}

/// A finite sample of a domain boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySet {
    dim: usize,
    boundary_points: Vec<Vec<f64>>,
}

impl BoundarySet {
    pub fn new(dim: usize, boundary_points: Vec<Vec<f64>>) -> Result<Self> {
        let cloud = PointCloud::new(dim, boundary_points, None)?;
        Ok(Self {
            dim,
            boundary_points: cloud.points().to_vec(),
        })
    }

    /// `count` equally spaced points on the circle of radius `radius` about the origin.
    pub fn circle(count: usize, radius: f64) -> Result<Self> {
        let pts = (0..count)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / count as f64;
                vec![radius * t.cos(), radius * t.sin()]
            })
            .collect();
        Self::new(2, pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.boundary_points
    }

    /// Distance from `x` to the nearest boundary sample.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        self.boundary_points
            .iter()
            .map(|b| euclidean(x, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest nearest-neighbour gap among the samples (0 for a single sample).
    ///
    /// For a densely sampled curve, sampled boundary distances overestimate
    /// the true ones by about half this value at most.
    pub fn sampling_resolution(&self) -> f64 {
        let pts = &self.boundary_points;
        if pts.len() < 2 {
            return 0.0;
        }
        pts.iter()
            .enumerate()
            .map(|(i, p)| {
                pts.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, q)| euclidean(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HdcDiagnostics {
    pub c: f64,
    /// c < 2: the output need not satisfy the triangle inequality.
    pub below_best_constant: bool,
    pub sampling_resolution: f64,
    pub boundary_distances: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HdcOutput {
    pub space: FiniteMetricSpace,
    pub diagnostics: HdcDiagnostics,
}

/// ln(1 + c |x−y| / √(d_D(x) d_D(y))) with d_D measured to the sampled boundary.
pub fn hdc_metric(cloud: &PointCloud, boundary: &BoundarySet, c: f64) -> Result<HdcOutput> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    if boundary.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch {
            index: 0,
            expected: cloud.dim(),
            found: boundary.dim(),
        });
    }
    let pts = cloud.points();
    let dd: Vec<f64> = pts.iter().map(|x| boundary.distance_to(x)).collect();
    if let Some(index) = dd.iter().position(|&v| v == 0.0) {
        return Err(Error::PointOnBoundary { index });
    }
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[i] == pts[j] {
                return Err(Error::DuplicatePoint { first: i, second: j });
            }
        }
    }
    let space = FiniteMetricSpace::from_upper_fn(pts.len(), format!("hdc[c={c}](euclidean)"), |i, j| {
        (c * euclidean(&pts[i], &pts[j]) / (dd[i] * dd[j]).sqrt()).ln_1p()
    });
    Ok(HdcOutput {
        space,
        diagnostics: HdcDiagnostics {
            c,
            below_best_constant: c < HDC_BEST_CONSTANT,
            sampling_resolution: boundary.sampling_resolution(),
            boundary_distances: dd,
        },
    })
}
