//! Brute-force reference implementations shared by the integration tests.

#![allow(dead_code)]

use qdgen_core::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` points, either uniform or snapped to a coarse grid so that distance
/// ties and duplicates occur.
pub fn random_points(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let snap = seed % 3 == 0;
    (0..n)
        .map(|_| {
            let (x, y): (f64, f64) = (rng.random(), rng.random());
            if snap {
                Point::new((x * 4.0).round() / 4.0, (y * 4.0).round() / 4.0)
            } else {
                Point::new(x, y)
            }
        })
        .collect()
}

/// Out-neighbors by full sort on (squared distance, index).
pub fn knn(points: &[Point], k: usize) -> Vec<Vec<usize>> {
    (0..points.len())
        .map(|v| {
            let mut others: Vec<(f64, usize)> = (0..points.len())
                .filter(|&w| w != v)
                .map(|w| (points[v].dist2(&points[w]), w))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others.into_iter().take(k).map(|(_, w)| w).collect()
        })
        .collect()
}

/// Transitive closure by Floyd-Warshall; `reach[u][v]` iff v is reachable from u.
pub fn reachability(adj: &[Vec<usize>]) -> Vec<Vec<bool>> {
    let n = adj.len();
    let mut r = vec![vec![false; n]; n];
    for (u, list) in adj.iter().enumerate() {
        r[u][u] = true;
        for &v in list {
            r[u][v] = true;
        }
    }
    for m in 0..n {
        for u in 0..n {
            if r[u][m] {
                for v in 0..n {
                    if r[m][v] {
                        r[u][v] = true;
                    }
                }
            }
        }
    }
    r
}

/// Number of classes of the equivalence `same(u, v)`, and the largest class.
fn classes(n: usize, same: impl Fn(usize, usize) -> bool) -> (usize, usize) {
    let mut label = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for u in 0..n {
        if label[u] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        for v in u..n {
            if label[v] == usize::MAX && same(u, v) {
                label[v] = id;
                size += 1;
            }
        }
        sizes.push(size);
    }
    (sizes.len(), sizes.into_iter().max().unwrap_or(0))
}

/// Weak component count: reachability in the symmetrized graph.
pub fn weak_count(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let mut sym = vec![Vec::new(); n];
    for (u, list) in adj.iter().enumerate() {
        for &v in list {
            sym[u].push(v);
            sym[v].push(u);
        }
    }
    let r = reachability(&sym);
    classes(n, |u, v| r[u][v]).0
}

/// (strong component count, largest strong component) by mutual reachability.
pub fn strong_stats(adj: &[Vec<usize>]) -> (usize, usize) {
    let r = reachability(adj);
    classes(adj.len(), |u, v| r[u][v] && r[v][u])
}

/// Edges of the Prüfer-decoded tree of `seq` (length n - 2).
fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges.sort_unstable();
    edges
}

/// Minimum spanning tree by enumerating all n^(n-2) labeled trees.
pub fn brute_mst(points: &[Point]) -> (f64, Vec<(usize, usize)>) {
    let n = points.len();
    assert!((2..=8).contains(&n));
    if n == 2 {
        return (points[0].dist(&points[1]), vec![(0, 1)]);
    }
    let total = n.pow((n - 2) as u32);
    let mut best = (f64::INFINITY, Vec::new());
    for code in 0..total {
        let mut c = code;
        let seq: Vec<usize> = (0..n - 2)
            .map(|_| {
                let d = c % n;
                c /= n;
                d
            })
            .collect();
        let edges = prufer_edges(&seq, n);
        let w = edge_weight(points, &edges);
        if w < best.0 {
            best = (w, edges);
        }
    }
    best
}

/// Tree weight summed over ascending edge lengths. All minimum spanning
/// trees share the same multiset of edge lengths, so this is bit-identical
/// for every one of them.
pub fn edge_weight(points: &[Point], edges: &[(usize, usize)]) -> f64 {
    let mut lengths: Vec<f64> = edges.iter().map(|&(a, b)| points[a].dist(&points[b])).collect();
    lengths.sort_by(f64::total_cmp);
    lengths.iter().sum()
}

/// Optimal tour length by enumerating all tours through city 0.
pub fn brute_tsp(points: &[Point]) -> f64 {
    let n = points.len();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut rest, 0, &mut |perm| {
        let mut len = points[0].dist(&points[perm[0]]);
        for w in perm.windows(2) {
            len += points[w[0]].dist(&points[w[1]]);
        }
        len += points[perm[perm.len() - 1]].dist(&points[0]);
        if len < best {
            best = len;
        }
    });
    best
}

fn permute(items: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
    if i == items.len() {
        f(items);
        return;
    }
    for j in i..items.len() {
        items.swap(i, j);
        permute(items, i + 1, f);
        items.swap(i, j);
    }
}
