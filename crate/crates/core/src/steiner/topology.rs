//! Combinatorial enumeration for the exact solver: full topologies (unrooted
//! binary trees with labeled leaves) and decompositions of a terminal set
//! into full components glued at shared terminals.

/// A full Steiner topology on `k` labeled terminals: an unrooted binary tree
/// whose leaves are nodes `0..k` and whose `k − 2` internal nodes are
/// `k..2k−2`, stored as an edge list.
#[derive(Debug, Clone)]
pub struct FullTopology {
    pub k: usize,
    pub edges: Vec<(usize, usize)>,
}

impl FullTopology {
    pub fn internal_count(&self) -> usize {
        self.k.saturating_sub(2)
    }

    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (u, v) in &self.edges {
            if *u == node {
                out.push(*v);
            } else if *v == node {
                out.push(*u);
            }
        }
        out.sort_unstable();
        out
    }

    /// Canonical encoding via leaf splits: for every internal edge take the
    /// side not containing leaf 0, as a sorted index list.
    pub fn canonical_id(&self) -> String {
        let mut splits: Vec<Vec<usize>> = Vec::new();
        for (idx, (u, v)) in self.edges.iter().enumerate() {
            if *u < self.k || *v < self.k {
                continue; // leaf edge, no split information
            }
            let mut side = self.leaves_reachable(*u, idx);
            if side.contains(&0) {
                let all: Vec<usize> = (0..self.k).collect();
                side = all.into_iter().filter(|x| !side.contains(x)).collect();
            }
            side.sort_unstable();
            splits.push(side);
        }
        splits.sort();
        let parts: Vec<String> = splits
            .iter()
            .map(|s| {
                let items: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        parts.join("")
    }

    /// Leaves reachable from `node` without crossing edge `forbidden`.
    fn leaves_reachable(&self, node: usize, forbidden: usize) -> Vec<usize> {
        let mut seen = vec![node];
        let mut stack = vec![node];
        let mut leaves = Vec::new();
        if node < self.k {
            leaves.push(node);
        }
        while let Some(x) = stack.pop() {
            for (idx, (u, v)) in self.edges.iter().enumerate() {
                if idx == forbidden {
                    continue;
                }
                let other = if *u == x {
                    *v
                } else if *v == x {
                    *u
                } else {
                    continue;
                };
                if !seen.contains(&other) {
                    seen.push(other);
                    stack.push(other);
                    if other < self.k {
                        leaves.push(other);
                    }
                }
            }
        }
        leaves
    }
}

/// All full topologies on `k ≥ 3` labeled leaves, generated by inserting each
/// new leaf into every edge of the smaller trees. Produces each topology
/// exactly once; counts are 1, 3, 15, 105 for k = 3..=6.
pub fn enumerate_full_topologies(k: usize) -> Vec<FullTopology> {
    assert!(k >= 3);
    let mut trees = vec![vec![(0usize, k), (1, k), (2, k)]];
    for leaf in 3..k {
        let internal = k + leaf - 2;
        let mut next = Vec::with_capacity(trees.len() * (2 * leaf - 3));
        for tree in &trees {
            for (i, &(u, v)) in tree.iter().enumerate() {
                let mut t = Vec::with_capacity(tree.len() + 2);
                t.extend(tree.iter().take(i).cloned());
                t.extend(tree.iter().skip(i + 1).cloned());
                t.push((u, internal));
                t.push((internal, v));
                t.push((leaf, internal));
                next.push(t);
            }
        }
        trees = next;
    }
    trees
        .into_iter()
        .map(|edges| FullTopology { k, edges })
        .collect()
}

/// A decomposition of terminals `0..n` into full components: subsets of size
/// ≥ 2 covering all terminals with `Σ(|C| − 1) = n − 1` and a connected
/// (hence acyclic) intersection structure. Components are bitmasks.
pub fn enumerate_decompositions(n: usize) -> Vec<Vec<u32>> {
    assert!((2..=16).contains(&n));
    let full: u32 = (1 << n) - 1;
    let mut subsets: Vec<u32> = (0..=full)
        .filter(|m| m.count_ones() >= 2)
        .collect();
    subsets.sort_unstable();
    let mut out = Vec::new();
    let mut current: Vec<u32> = Vec::new();
    fn rec(
        n: usize,
        subsets: &[u32],
        start: usize,
        budget: usize,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if budget == 0 {
            if is_hypertree(n, current) {
                out.push(current.clone());
            }
            return;
        }
        for i in start..subsets.len() {
            let size = subsets[i].count_ones() as usize;
            if size - 1 > budget {
                continue;
            }
            current.push(subsets[i]);
            rec(n, subsets, i + 1, budget - (size - 1), current, out);
            current.pop();
        }
    }
    rec(n, &subsets, 0, n - 1, &mut current, &mut out);
    out
}

/// Checks cover + exact spanning-tree union count: processing every component
/// must perform exactly `Σ(|C| − 1)` successful unions and connect everything.
fn is_hypertree(n: usize, components: &[u32]) -> bool {
    let mut covered: u32 = 0;
    for &c in components {
        covered |= c;
    }
    if covered != (1 << n) - 1 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let mut unions = 0usize;
    for &c in components {
        let members: Vec<usize> = (0..n).filter(|i| c & (1 << i) != 0).collect();
        for w in members.windows(2) {
            let (ra, rb) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if ra == rb {
                return false; // redundant gluing would create a cycle
            }
            parent[ra] = rb;
            unions += 1;
        }
    }
    unions == n - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_topology_counts() {
        assert_eq!(enumerate_full_topologies(3).len(), 1);
        assert_eq!(enumerate_full_topologies(4).len(), 3);
        assert_eq!(enumerate_full_topologies(5).len(), 15);
        assert_eq!(enumerate_full_topologies(6).len(), 105);
    }

    #[test]
    fn topology_canonical_ids_distinct() {
        let topos = enumerate_full_topologies(4);
        let ids: Vec<String> = topos.iter().map(|t| t.canonical_id()).collect();
        assert_eq!(ids.len(), 3);
        assert!(ids.iter().collect::<std::collections::BTreeSet<_>>().len() == 3);
    }

    #[test]
    fn degrees_are_binary() {
        for t in enumerate_full_topologies(5) {
            for leaf in 0..5 {
                assert_eq!(t.neighbors(leaf).len(), 1);
            }
            for internal in 5..8 {
                assert_eq!(t.neighbors(internal).len(), 3);
            }
        }
    }

    #[test]
    fn decompositions_small_counts() {
        // n = 2: only the single edge {0,1}.
        assert_eq!(enumerate_decompositions(2), vec![vec![0b11]]);
        // n = 3: three spanning pairs-of-edges plus the full triple.
        let d3 = enumerate_decompositions(3);
        assert_eq!(d3.len(), 4);
        assert!(d3.contains(&vec![0b111]));
        assert!(d3.contains(&vec![0b011, 0b101]));
        assert!(d3.contains(&vec![0b011, 0b110]));
        assert!(d3.contains(&vec![0b101, 0b110]));
    }

    #[test]
    fn decompositions_cover_and_budget() {
        for n in 2..=6usize {
            for d in enumerate_decompositions(n) {
                let covered = d.iter().fold(0u32, |acc, c| acc | c);
                assert_eq!(covered, (1 << n) - 1);
                let weight: usize = d.iter().map(|c| c.count_ones() as usize - 1).sum();
                assert_eq!(weight, n - 1);
            }
        }
    }
}
