use crate::error::{Error, Result};
use crate::instance::Point;

use super::feature::HalfInt;

/// Euclidean minimum spanning tree rooted at node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MstTree {
    parent: Vec<usize>,
    depth: Vec<usize>,
    total_weight: f64,
}

impl MstTree {
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Parent of every node; the root is its own parent.
    pub fn parent(&self) -> &[usize] {
        &self.parent
    }

    pub fn depth(&self) -> &[usize] {
        &self.depth
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Tree edges as `(min index, max index)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .parent
            .iter()
            .enumerate()
            .filter(|&(v, &p)| v != p)
            .map(|(v, &p)| (v.min(p), v.max(p)))
            .collect();
        edges.sort_unstable();
        edges
    }

    /// Builds a tree from a parent array (root = the node that is its own
    /// parent, must be unique). Depths are derived; `total_weight` is taken
    /// as given.
    pub fn from_parents(parent: Vec<usize>, total_weight: f64) -> Result<Self> {
        let n = parent.len();
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v] == v).collect();
        if roots.len() != 1 || parent.iter().any(|&p| p >= n) {
            return Err(Error::InvalidParameter("parent array is not a rooted tree".into()));
        }
        let mut depth = vec![usize::MAX; n];
        depth[roots[0]] = 0;
        for start in 0..n {
            let mut chain = Vec::new();
            let mut v = start;
            while depth[v] == usize::MAX {
                if chain.len() > n {
                    return Err(Error::InvalidParameter("parent array has a cycle".into()));
                }
                chain.push(v);
                v = parent[v];
            }
            let mut d = depth[v];
            for &u in chain.iter().rev() {
                d += 1;
                depth[u] = d;
            }
        }
        Ok(Self {
            parent,
            depth,
            total_weight,
        })
    }
}

/// Dense Prim from node 0. Edges are compared by (squared length, min
/// endpoint, max endpoint), a strict total order, so the resulting tree is
/// the unique minimum under that order (the same one Kruskal would pick).
/// Zero-length edges between duplicate points sort first.
pub fn mst(points: &[Point]) -> Result<MstTree> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("MST needs n >= 2, got {n}")));
    }
    let mut in_tree = vec![false; n];
    let mut best_d2 = vec![f64::INFINITY; n];
    let mut best_from = vec![0usize; n];
    let mut parent = vec![0usize; n];
    let mut depth = vec![0usize; n];
    let mut total = 0.0;

    in_tree[0] = true;
    let mut last = 0;
    for _ in 1..n {
        let p = points[last];
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let d = p.dist2(&points[v]);
            if edge_less((d, last, v), (best_d2[v], best_from[v], v)) {
                best_d2[v] = d;
                best_from[v] = last;
            }
        }
        let mut pick = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            if pick == usize::MAX
                || edge_less(
                    (best_d2[v], best_from[v], v),
                    (best_d2[pick], best_from[pick], pick),
                )
            {
                pick = v;
            }
        }
        in_tree[pick] = true;
        parent[pick] = best_from[pick];
        depth[pick] = depth[best_from[pick]] + 1;
        total += best_d2[pick].sqrt();
        last = pick;
    }
    Ok(MstTree {
        parent,
        depth,
        total_weight: total,
    })
}

#[inline]
fn edge_less(a: (f64, usize, usize), b: (f64, usize, usize)) -> bool {
    let ka = (a.1.min(a.2), a.1.max(a.2));
    let kb = (b.1.min(b.2), b.1.max(b.2));
    a.0 < b.0 || (a.0 == b.0 && ka < kb)
}

/// Median of the node depths; the mean of the two central values for even
/// `n`, hence a half-integer.
pub fn mst_depth_median(tree: &MstTree) -> HalfInt {
    let mut depths = tree.depth.clone();
    depths.sort_unstable();
    let n = depths.len();
    if n % 2 == 1 {
        HalfInt::from_int(depths[n / 2] as i64)
    } else {
        HalfInt::from_doubled((depths[n / 2 - 1] + depths[n / 2]) as i64)
    }
}
