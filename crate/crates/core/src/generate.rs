//! Seeded generators for test spaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::space::{norm, FiniteMetricSpace, PointCloud};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws one point uniformly from the open unit ball of R^dim.
pub(crate) fn sample_ball_point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&g);
        if len == 0.0 || !len.is_finite() {
            continue;
        }
        let u: f64 = rng.random();
        let radius = u.powf(1.0 / dim as f64);
        let p: Vec<f64> = g.iter().map(|x| x / len * radius).collect();
        if norm(&p) < 1.0 {
            return p;
        }
    }
}

/// `count` distinct points uniform in the open unit ball, deterministic in `seed`.
///
/// # Panics
/// If `count` or `dim` is zero.
pub fn gen_random_ball(count: usize, dim: usize, seed: u64) -> PointCloud {
    assert!(count >= 1 && dim >= 1, "count and dim must be positive");
    let mut rng = rng(seed);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(count);
    while points.len() < count {
        let p = sample_ball_point(&mut rng, dim);
        if !points.contains(&p) {
            points.push(p);
        }
    }
    PointCloud::new(dim, points, None).expect("generated cloud is valid")
}

/// Random recursive tree on `count` nodes with edge weights in [0.5, 2.0],
/// returned as its weighted shortest-path metric.
///
/// Node `k > 0` attaches to a uniformly chosen earlier node. Weights are
/// multiples of 1/1024, so path sums and Gromov products are exact in f64.
pub fn gen_tree_metric(count: usize, seed: u64) -> FiniteMetricSpace {
    assert!(count >= 1, "count must be positive");
    let mut rng = rng(seed);
    let mut parent = vec![(0usize, 0.0f64); count];
    for (k, slot) in parent.iter_mut().enumerate().skip(1) {
        let p = rng.random_range(0..k);
        let w = f64::from(rng.random_range(512u32..=2048)) / 1024.0;
        *slot = (p, w);
    }
    tree_metric_from_parents(&parent, "tree")
}

/// Path metric of a rooted tree given as `(parent, edge weight)` per node;
/// entry 0 is the root and its own entry is ignored. Parents must precede
/// their children.
pub fn tree_metric_from_parents(parent: &[(usize, f64)], provenance: &str) -> FiniteMetricSpace {
    let n = parent.len();
    // depth from root and ancestor chains give d(i,j) = depth_i + depth_j - 2 depth_lca
    let mut depth = vec![0.0; n];
    let mut level = vec![0usize; n];
    for k in 1..n {
        let (p, w) = parent[k];
        assert!(p < k, "parent of {k} must precede it");
        depth[k] = depth[p] + w;
        level[k] = level[p] + 1;
    }
    let lca = |mut a: usize, mut b: usize| {
        while level[a] > level[b] {
            a = parent[a].0;
        }
        while level[b] > level[a] {
            b = parent[b].0;
        }
        while a != b {
            a = parent[a].0;
            b = parent[b].0;
        }
        a
    };
    FiniteMetricSpace::from_upper_fn(n, provenance.to_string(), |i, j| {
        let c = lca(i, j);
        (depth[i] - depth[c]) + (depth[j] - depth[c])
    })
}
