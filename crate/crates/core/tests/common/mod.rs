//! Brute-force reference implementations used as test oracles.
//!
//! These deliberately avoid the library's scan machinery: plain nested loops
//! over index tuples and a Newton iteration for the strong-hyperbolicity root.

#![allow(dead_code)]

use hypan_core::FiniteMetricSpace;

pub fn d(s: &FiniteMetricSpace, i: usize, j: usize) -> f64 {
    s.to_rows()[i][j]
}

/// δ* by four nested loops over (x, y, z, o), repeats allowed.
pub fn delta_brute(s: &FiniteMetricSpace) -> f64 {
    let m = s.to_rows();
    let n = m.len();
    let g = |x: usize, y: usize, o: usize| (m[o][x] + m[o][y] - m[x][y]) / 2.0;
    let mut best = f64::NEG_INFINITY;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for o in 0..n {
                    let v = g(x, z, o).min(g(z, y, o)) - g(x, y, o);
                    if v > best {
                        best = v;
                    }
                }
            }
        }
    }
    best.max(0.0)
}

/// δ* via the four-point form: max over quadruples of half the gap between
/// the largest and second-largest pairing sums.
pub fn delta_four_point(s: &FiniteMetricSpace) -> f64 {
    let m = s.to_rows();
    let n = m.len();
    let mut best: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for t in 0..n {
                    let mut sums = [m[x][y] + m[z][t], m[x][z] + m[y][t], m[x][t] + m[y][z]];
                    sums.sort_by(|a, b| b.total_cmp(a));
                    best = best.max((sums[0] - sums[1]) / 2.0);
                }
            }
        }
    }
    best
}

/// Root of e^{-εa} + e^{-εb} = 1 by Newton's method from the left end of
/// the bracket, where the convex decreasing function is positive.
pub fn gap_root_newton(a: f64, b: f64) -> f64 {
    let mut e = std::f64::consts::LN_2 / a.max(b);
    for _ in 0..200 {
        let (small, large) = (a.min(b), a.max(b));
        let g = (-e * small).exp_m1() + (-e * large).exp();
        let dg = -a * (-e * a).exp() - b * (-e * b).exp();
        let next = e - g / dg;
        if (next - e).abs() <= 1e-15 * next.abs() {
            return next;
        }
        e = next;
    }
    e
}

/// ε* over all ordered 4-tuples of distinct points; `None` when unbounded.
pub fn epsilon_brute(s: &FiniteMetricSpace) -> Option<f64> {
    let m = s.to_rows();
    let n = m.len();
    let mut best: Option<f64> = None;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for t in 0..n {
                    if x == y || x == z || x == t || y == z || y == t || z == t {
                        continue;
                    }
                    let mut h = [
                        (m[x][y] + m[z][t]) / 2.0,
                        (m[x][z] + m[y][t]) / 2.0,
                        (m[x][t] + m[y][z]) / 2.0,
                    ];
                    h.sort_by(|a, b| b.total_cmp(a));
                    let (a, b) = (h[0] - h[1], h[0] - h[2]);
                    let tie = hypan_core::hyperbolicity::TIE_RELATIVE_GAP * h[0].abs();
                    if a <= tie || b <= tie {
                        continue;
                    }
                    let e = gap_root_newton(a, b);
                    best = Some(best.map_or(e, |v: f64| v.min(e)));
                }
            }
        }
    }
    best
}

/// max over ordered distinct triples of d(x,y) − d(x,z) − d(z,y).
pub fn triangle_brute(s: &FiniteMetricSpace) -> f64 {
    let m = s.to_rows();
    let n = m.len();
    let mut best = f64::NEG_INFINITY;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x != y && y != z && x != z {
                    best = best.max(m[x][y] - m[x][z] - m[z][y]);
                }
            }
        }
    }
    if best == f64::NEG_INFINITY {
        0.0
    } else {
        best
    }
}

/// Relative Ptolemy defect over all ordered 4-tuples of distinct points.
pub fn ptolemy_brute(s: &FiniteMetricSpace) -> f64 {
    let m = s.to_rows();
    let n = m.len();
    let mut best: f64 = if n < 4 { 0.0 } else { f64::NEG_INFINITY };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    if a == b || a == c || a == e || b == c || b == e || c == e {
                        continue;
                    }
                    let rhs = m[a][c] * m[b][e] + m[a][e] * m[b][c];
                    best = best.max((m[a][b] * m[c][e] - rhs) / rhs);
                }
            }
        }
    }
    best
}

/// Weighted graph metric by Floyd–Warshall on an edge list.
pub fn graph_metric(n: usize, edges: &[(usize, usize, f64)]) -> FiniteMetricSpace {
    let mut m = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, w) in edges {
        m[a][b] = w;
        m[b][a] = w;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if m[i][k] + m[k][j] < m[i][j] {
                    m[i][j] = m[i][k] + m[k][j];
                }
            }
        }
    }
    FiniteMetricSpace::from_rows(&m, "graph").unwrap()
}

pub fn four_cycle() -> FiniteMetricSpace {
    graph_metric(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)])
}
