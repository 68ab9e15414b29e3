//! Gromov products, the hyperbolicity constant δ*, the maximal
//! strong-hyperbolicity parameter ε* and bolicity witnesses.
//!
//! Exhaustive scans stream over index ranges and are split across the rayon
//! pool by their outermost index. Witness selection is deterministic (see
//! [`crate::scan`]), so results do not depend on the number of workers.

use std::f64::consts::LN_2;
use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::rng;
use crate::metric::for_each_quadruple_from;
use crate::scan::Candidate;
use crate::space::{pair_sums, FiniteMetricSpace, Pairing, QuadrupleWitness};

pub const DEFAULT_SAMPLE_COUNT: usize = 200_000;
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
pub const MAX_BISECTION_STEPS: usize = 200;
/// Gaps at most this fraction of the largest half-sum count as ties.
pub const TIE_RELATIVE_GAP: f64 = 64.0 * f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Mode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exhaustive => f.write_str("exhaustive"),
            Mode::Sampled { .. } => f.write_str("sampled"),
        }
    }
}

/// A strong-hyperbolicity parameter bound; `Unbounded` means every ε > 0 works.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Epsilon {
    Finite(f64),
    Unbounded,
}

impl Epsilon {
    pub fn finite(self) -> Option<f64> {
        match self {
            Epsilon::Finite(e) => Some(e),
            Epsilon::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        self == Epsilon::Unbounded
    }

    /// Whether the condition is guaranteed at parameter `eps`.
    pub fn admits(self, eps: f64) -> bool {
        self.finite().is_none_or(|e| eps <= e)
    }
}

#[inline]
fn gp(d_ox: f64, d_oy: f64, d_xy: f64) -> f64 {
    (d_ox + d_oy - d_xy) / 2.0
}

/// (x|y)_o = (d(o,x) + d(o,y) − d(x,y)) / 2.
pub fn gromov_product(space: &FiniteMetricSpace, x: usize, y: usize, o: usize) -> f64 {
    gp(space.d(o, x), space.d(o, y), space.d(x, y))
}

/// Gromov products about `o` as a dense matrix.
fn products_about(space: &FiniteMetricSpace, o: usize) -> Vec<f64> {
    let n = space.n();
    let row_o = space.row(o);
    let mut g = vec![0.0; n * n];
    for x in 0..n {
        let row_x = space.row(x);
        for y in 0..n {
            g[x * n + y] = gp(row_o[x], row_o[y], row_x[y]);
        }
    }
    g
}

/// Scans all (x, y, z) for a fixed `o`; `stop` short-circuits on the first
/// tuple it accepts.
fn delta_scan_about(
    space: &FiniteMetricSpace,
    o: usize,
    mut stop: impl FnMut(f64) -> bool,
) -> (Option<Candidate>, bool) {
    let n = space.n();
    let g = products_about(space, o);
    let mut best = None;
    for x in 0..n {
        let gx = &g[x * n..(x + 1) * n];
        for y in 0..n {
            let gxy = gx[y];
            let gy = &g[y * n..(y + 1) * n];
            for z in 0..n {
                let v = gx[z].min(gy[z]) - gxy;
                Candidate::offer_max(&mut best, v, [x, y, z, o], None);
                if stop(v) {
                    return (Some(Candidate::new(v, [x, y, z, o], None)), true);
                }
            }
        }
    }
    (best, false)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaResult {
    pub delta_star: f64,
    /// Ordered (x, y, z, o); `value` is the unclamped maximum found.
    pub witness: QuadrupleWitness,
}

/// δ* = max over (x, y, z, o), repeats allowed, of min{(x|z)_o, (z|y)_o} − (x|y)_o,
/// clamped below at 0. Sampled mode returns a lower bound.
pub fn delta_hyperbolicity(space: &FiniteMetricSpace, mode: Mode) -> DeltaResult {
    let n = space.n();
    let best = match mode {
        Mode::Exhaustive => (0..n)
            .into_par_iter()
            .map(|o| delta_scan_about(space, o, |_| false).0)
            .reduce(|| None, Candidate::merge_max),
        Mode::Sampled { count, seed } => {
            let mut rng = rng(seed);
            let mut best = None;
            for _ in 0..count {
                let [x, y, z, o] = [0; 4].map(|_| rng.random_range(0..n));
                let v = gromov_product(space, x, z, o).min(gromov_product(space, z, y, o))
                    - gromov_product(space, x, y, o);
                best = Candidate::merge_max(best, Some(Candidate::new(v, [x, y, z, o], None)));
            }
            best
        }
    };
    let best = best.unwrap_or(Candidate::new(0.0, [0; 4], None));
    DeltaResult {
        delta_star: best.value.max(0.0),
        witness: best.witness(),
    }
}

/// Early-exit scan: the first tuple (in `o`-major order) whose δ-defect
/// exceeds `threshold`, or `None` when δ* ≤ threshold.
pub fn delta_exceeds(space: &FiniteMetricSpace, threshold: f64) -> Option<QuadrupleWitness> {
    (0..space.n()).into_par_iter().find_map_first(|o| {
        let (c, hit) = delta_scan_about(space, o, |v| v > threshold);
        hit.then(|| c.expect("hit implies candidate").witness())
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")))
    }
}

/// Root of exp(−εa) + exp(−εb) = 1 for gaps a, b > 0.
///
/// The root lies in [ln2 / max(a,b), ln2 / min(a,b)]; bisection runs on that
/// bracket until its width is at most `tol`.
fn gap_root(a: f64, b: f64, tol: f64) -> f64 {
    let (small, large) = if a < b { (a, b) } else { (b, a) };
    let mut lo = LN_2 / large;
    let mut hi = LN_2 / small;
    if lo == hi {
        return lo;
    }
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        // expm1 keeps the small-gap term accurate when εa ≪ 1
        if (-mid * small).exp_m1() + (-mid * large).exp() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) / 2.0
}

/// Index of the largest sum (first on ties) and its gaps to the other two.
#[inline]
fn top_and_gaps(s: [f64; 3]) -> (usize, f64, f64) {
    let mut top = 0;
    for k in 1..3 {
        if s[k] > s[top] {
            top = k;
        }
    }
    (top, s[top] - s[(top + 1) % 3], s[top] - s[(top + 2) % 3])
}

/// Largest ε for which exp(ε·m) ≤ exp(ε·s′) + exp(ε·s″), where m is the
/// largest of the three half-pairing sums and s′, s″ the other two.
pub fn quadruple_epsilon(s1: f64, s2: f64, s3: f64, tol: f64) -> Result<Epsilon> {
    if !(s1.is_finite() && s2.is_finite() && s3.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    check_tol(tol)?;
    let (top, a, b) = top_and_gaps([s1, s2, s3]);
    Ok(epsilon_from_gaps([s1, s2, s3][top], a, b, tol))
}

/// Ties, including rounding-level near-ties, leave ε unbounded.
#[inline]
fn is_tie(top: f64, gap: f64) -> bool {
    gap < f64::MIN_POSITIVE || gap <= TIE_RELATIVE_GAP * top.abs()
}

#[inline]
fn epsilon_from_gaps(top: f64, a: f64, b: f64, tol: f64) -> Epsilon {
    if is_tie(top, a) || is_tie(top, b) {
        Epsilon::Unbounded
    } else {
        Epsilon::Finite(gap_root(a, b, tol))
    }
}

#[inline]
fn half_sums(space: &FiniteMetricSpace, q: [usize; 4]) -> [f64; 3] {
    pair_sums(space, q).map(|s| s / 2.0)
}

/// ε-scan of one quadruple, skipping root-finding when the analytic lower
/// bound ln2 / max(a, b) already rules out improving on `best`.
#[inline]
fn offer_quadruple(space: &FiniteMetricSpace, q: [usize; 4], tol: f64, best: &mut Option<Candidate>) {
    let h = half_sums(space, q);
    let (top, a, b) = top_and_gaps(h);
    if let Some(c) = best {
        if a >= f64::MIN_POSITIVE && b >= f64::MIN_POSITIVE && LN_2 / a.max(b) >= c.value {
            return;
        }
    }
    if let Epsilon::Finite(e) = epsilon_from_gaps(h[top], a, b, tol) {
        Candidate::offer_min(best, e, q, Some(Pairing::from_position(top)));
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonResult {
    pub epsilon_star: Epsilon,
    /// Quadruple (sorted indices) attaining ε*; the pairing is the one with the
    /// largest sum. `None` when unbounded.
    pub witness: Option<QuadrupleWitness>,
}

/// ε* = min over quadruples of distinct points of [`quadruple_epsilon`].
pub fn strong_epsilon(space: &FiniteMetricSpace, mode: Mode, tol: f64) -> Result<EpsilonResult> {
    check_tol(tol)?;
    let n = space.n();
    let best = match mode {
        Mode::Exhaustive => (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best = None;
                for_each_quadruple_from(n, i, |q| offer_quadruple(space, q, tol, &mut best));
                best
            })
            .reduce(|| None, Candidate::merge_min),
        Mode::Sampled { count, seed } if n >= 4 => {
            let mut rng = rng(seed);
            let mut best = None;
            for _ in 0..count {
                let mut q = [0usize; 4];
                for (slot, v) in q.iter_mut().zip(sample(&mut rng, n, 4)) {
                    *slot = v;
                }
                q.sort_unstable();
                let h = half_sums(space, q);
                let (top, a, b) = top_and_gaps(h);
                if let Epsilon::Finite(e) = epsilon_from_gaps(h[top], a, b, tol) {
                    let c = Candidate::new(e, q, Some(Pairing::from_position(top)));
                    best = Candidate::merge_min(best, Some(c));
                }
            }
            best
        }
        Mode::Sampled { .. } => None,
    };
    Ok(EpsilonResult {
        epsilon_star: best.map_or(Epsilon::Unbounded, |c| Epsilon::Finite(c.value)),
        witness: best.map(Candidate::witness),
    })
}

/// Early-exit scan: the first quadruple (in lexicographic order of its
/// smallest index) whose ε₀ falls below `threshold`.
pub fn epsilon_below(space: &FiniteMetricSpace, threshold: f64, tol: f64) -> Result<Option<QuadrupleWitness>> {
    check_tol(tol)?;
    let n = space.n();
    Ok((0..n).into_par_iter().find_map_first(|i| {
        let mut found = None;
        for_each_quadruple_from(n, i, |q| {
            if found.is_some() {
                return;
            }
            let h = half_sums(space, q);
            let (top, a, b) = top_and_gaps(h);
            if let Epsilon::Finite(e) = epsilon_from_gaps(h[top], a, b, tol) {
                if e < threshold {
                    found = Some(QuadrupleWitness {
                        indices: q,
                        pairing: Some(Pairing::from_position(top)),
                        value: e,
                    });
                }
            }
        });
        found
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BolicityResult {
    pub r: f64,
    pub eta: f64,
    /// Smallest R excluding every violator; `None` when there are none.
    pub r_min: Option<f64>,
    pub vacuous: bool,
    pub violator_count: usize,
    /// Ordered (x, y, z, t) with the largest d(x,z) + d(y,t) among violators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<QuadrupleWitness>,
}

/// Smallest R such that, on this space, d(x,y)+d(z,t) ≤ r and
/// d(x,z)+d(y,t) ≥ R imply d(x,t)+d(y,z) ≤ d(x,z)+d(y,t)+η.
pub fn bolicity_r_min(space: &FiniteMetricSpace, r: f64, eta: f64) -> Result<BolicityResult> {
    if !(r.is_finite() && r > 0.0 && eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "r and eta must be positive, got r = {r}, eta = {eta}"
        )));
    }
    let n = space.n();
    let (best, count) = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best = None;
            let mut count = 0usize;
            for y in (0..n).filter(|&y| y != x) {
                for z in (0..n).filter(|&z| z != x && z != y) {
                    for t in (0..n).filter(|&t| t != x && t != y && t != z) {
                        if space.d(x, y) + space.d(z, t) > r {
                            continue;
                        }
                        let far = space.d(x, z) + space.d(y, t);
                        let slack = space.d(x, t) + space.d(y, z) - far;
                        if slack > eta {
                            count += 1;
                            Candidate::offer_max(&mut best, far, [x, y, z, t], Some(Pairing::P13_24));
                        }
                    }
                }
            }
            (best, count)
        })
        .reduce(
            || (None, 0),
            |(a, ca), (b, cb)| (Candidate::merge_max(a, b), ca + cb),
        );
    Ok(BolicityResult {
        r,
        eta,
        r_min: best.map(|c| c.value.next_up()),
        vacuous: best.is_none(),
        violator_count: count,
        witness: best.map(Candidate::witness),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicityReport {
    pub delta_star: f64,
    pub delta_witness: QuadrupleWitness,
    pub epsilon_star: Epsilon,
    pub epsilon_witness: Option<QuadrupleWitness>,
    pub mode: Mode,
    /// δ* ≤ ln2/ε* + tol, or ε* unbounded.
    pub consistency_ok: bool,
    pub tol: f64,
    pub root_tol: f64,
}

/// δ*, ε* and the bound δ* ≤ ln2/ε* implied by strong hyperbolicity.
pub fn analyze(space: &FiniteMetricSpace, mode: Mode, tol: f64) -> Result<HyperbolicityReport> {
    analyze_with_root_tol(space, mode, tol, DEFAULT_ROOT_TOL)
}

pub fn analyze_with_root_tol(
    space: &FiniteMetricSpace,
    mode: Mode,
    tol: f64,
    root_tol: f64,
) -> Result<HyperbolicityReport> {
    check_tol(tol)?;
    let delta = delta_hyperbolicity(space, mode);
    let eps = strong_epsilon(space, mode, root_tol)?;
    let consistency_ok = eps
        .epsilon_star
        .finite()
        .is_none_or(|e| delta.delta_star <= LN_2 / e + tol);
    Ok(HyperbolicityReport {
        delta_star: delta.delta_star,
        delta_witness: delta.witness,
        epsilon_star: eps.epsilon_star,
        epsilon_witness: eps.witness,
        mode,
        consistency_ok,
        tol,
        root_tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub consistency: f64,
    pub root: f64,
}

/// JSON form of [`HyperbolicityReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityRecord {
    pub delta_star: f64,
    pub delta_witness: [usize; 4],
    pub epsilon_star: Option<f64>,
    pub epsilon_unbounded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_witness: Option<QuadrupleWitness>,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub consistency_ok: bool,
    pub tolerances: Tolerances,
}

impl From<&HyperbolicityReport> for HyperbolicityRecord {
    fn from(r: &HyperbolicityReport) -> Self {
        let (sample_count, seed) = match r.mode {
            Mode::Exhaustive => (None, None),
            Mode::Sampled { count, seed } => (Some(count), Some(seed)),
        };
        Self {
            delta_star: r.delta_star,
            delta_witness: r.delta_witness.indices,
            epsilon_star: r.epsilon_star.finite(),
            epsilon_unbounded: r.epsilon_star.is_unbounded(),
            epsilon_witness: r.epsilon_witness,
            mode: r.mode.to_string(),
            sample_count,
            seed,
            consistency_ok: r.consistency_ok,
            tolerances: Tolerances {
                consistency: r.tol,
                root: r.root_tol,
            },
        }
    }
}
