use super::knn::KnnGraph;

/// Weakly connected components (edge directions ignored, mutual edges
/// collapsed). Components are listed by smallest member, members ascending.
pub fn weak_components(g: &KnnGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut uf = UnionFind::new(n);
    for v in 0..n {
        for &w in g.out_edges(v) {
            uf.union(v, w);
        }
    }
    group_by_label(n, |v| uf.find(v))
}

pub fn weak_component_count(g: &KnnGraph) -> usize {
    let n = g.n();
    let mut uf = UnionFind::new(n);
    let mut count = n;
    for v in 0..n {
        for &w in g.out_edges(v) {
            if uf.union(v, w) {
                count -= 1;
            }
        }
    }
    count
}

/// Strongly connected components via iterative Tarjan. Same ordering
/// convention as [`weak_components`].
pub fn strong_components(g: &KnnGraph) -> Vec<Vec<usize>> {
    let labels = tarjan(g);
    group_by_label(g.n(), |v| labels[v])
}

/// Returns `(number of SCCs, size of the largest SCC)`.
pub fn strong_component_stats(g: &KnnGraph) -> (usize, usize) {
    let labels = tarjan(g);
    let count = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    (count, sizes.into_iter().max().unwrap_or(0))
}

fn group_by_label(n: usize, mut label: impl FnMut(usize) -> usize) -> Vec<Vec<usize>> {
    let mut slot = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let l = label(v);
        if slot[l] == usize::MAX {
            slot[l] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[l]].push(v);
    }
    groups
}

/// Component label per node, labels in `0..count`.
fn tarjan(g: &KnnGraph) -> Vec<usize> {
    const UNVISITED: usize = usize::MAX;
    let n = g.n();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack = Vec::with_capacity(n);
    // (node, next out-edge position)
    let mut call: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut next_index = 0;
    let mut next_comp = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos == 0 && index[v] == UNVISITED {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let edges = g.out_edges(v);
            if let Some(&w) = edges.get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
