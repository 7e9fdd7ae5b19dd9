//! Fill-reducing elimination order by nested dissection.
//!
//! Separators are middle levels of a breadth-first level structure rooted at
//! a pseudo-peripheral node. On the long strips and crosses produced by the
//! mesher these are short cuts across an arm, which keeps the factor sparse.

use alloc::vec;
use alloc::vec::Vec;

const LEAF_SIZE: usize = 48;
const DONE: u32 = u32::MAX;

struct Dissector<'a> {
    row_ptr: &'a [usize],
    cols: &'a [usize],
    region: Vec<u32>,
    next_region: u32,
    order: Vec<usize>,
    /// BFS level of each node, valid only for the current sweep.
    level: Vec<u32>,
    stamp: Vec<u32>,
    sweep: u32,
}

/// `perm[k]` is the original index of the `k`-th eliminated unknown.
pub(crate) fn nested_dissection(n: usize, row_ptr: &[usize], cols: &[usize]) -> Vec<usize> {
    let mut nd = Dissector {
        row_ptr,
        cols,
        region: vec![0; n],
        next_region: 1,
        order: Vec::with_capacity(n),
        level: vec![0; n],
        stamp: vec![0; n],
        sweep: 0,
    };
    let all: Vec<usize> = (0..n).collect();
    nd.dissect(all, 0);
    debug_assert_eq!(nd.order.len(), n);
    nd.order
}

impl Dissector<'_> {
    fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
            .iter()
            .copied()
            .filter(move |&j| j != i)
    }

    fn fresh_region(&mut self) -> u32 {
        let r = self.next_region;
        self.next_region += 1;
        r
    }

    fn emit(&mut self, nodes: &[usize]) {
        for &i in nodes {
            self.region[i] = DONE;
            self.order.push(i);
        }
    }

    /// Level structure of the component of `root` inside region `rid`.
    fn levels(&mut self, root: usize, rid: u32) -> Vec<Vec<usize>> {
        self.sweep += 1;
        let sweep = self.sweep;
        self.stamp[root] = sweep;
        self.level[root] = 0;
        let mut levels = vec![vec![root]];
        loop {
            let mut next = Vec::new();
            let depth = levels.len() as u32;
            for &i in levels.last().unwrap() {
                let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
                for &j in &self.cols[a..b] {
                    if self.region[j] == rid && self.stamp[j] != sweep {
                        self.stamp[j] = sweep;
                        self.level[j] = depth;
                        next.push(j);
                    }
                }
            }
            if next.is_empty() {
                return levels;
            }
            levels.push(next);
        }
    }

    fn degree_in(&self, i: usize, rid: u32) -> usize {
        self.neighbors(i).filter(|&j| self.region[j] == rid).count()
    }

    fn pseudo_peripheral(&mut self, start: usize, rid: u32) -> Vec<Vec<usize>> {
        let mut levels = self.levels(start, rid);
        for _ in 0..8 {
            let last = levels.last().unwrap();
            let candidate = *last
                .iter()
                .min_by_key(|&&i| self.degree_in(i, rid))
                .unwrap();
            let trial = self.levels(candidate, rid);
            if trial.len() > levels.len() {
                levels = trial;
            } else {
                break;
            }
        }
        levels
    }

    fn dissect(&mut self, nodes: Vec<usize>, rid: u32) {
        if nodes.len() <= LEAF_SIZE {
            self.emit(&nodes);
            return;
        }
        let levels = self.pseudo_peripheral(nodes[0], rid);
        let reached: usize = levels.iter().map(Vec::len).sum();
        if reached < nodes.len() {
            // Disconnected: split into components and treat each on its own.
            let mut components = Vec::new();
            let mut found: Vec<usize> = levels.into_iter().flatten().collect();
            let mut cursor = 0;
            loop {
                let id = self.fresh_region();
                for &i in &found {
                    self.region[i] = id;
                }
                components.push((found, id));
                while cursor < nodes.len() && self.region[nodes[cursor]] != rid {
                    cursor += 1;
                }
                if cursor == nodes.len() {
                    break;
                }
                found = self
                    .levels(nodes[cursor], rid)
                    .into_iter()
                    .flatten()
                    .collect();
            }
            for (comp, id) in components {
                self.dissect(comp, id);
            }
            return;
        }
        if levels.len() < 3 {
            self.emit(&nodes);
            return;
        }

        let total = nodes.len();
        let mut best = 1;
        let mut best_cost = usize::MAX;
        let mut before = levels[0].len();
        for (m, level) in levels.iter().enumerate().take(levels.len() - 1).skip(1) {
            let after = total - before - level.len();
            let cost = before.abs_diff(after) + 2 * level.len();
            if cost < best_cost {
                best_cost = cost;
                best = m;
            }
            before += level.len();
        }

        let (a_id, b_id, s_id) = (
            self.fresh_region(),
            self.fresh_region(),
            self.fresh_region(),
        );
        let mut part_a: Vec<usize> = levels[..best].iter().flatten().copied().collect();
        let part_b: Vec<usize> = levels[best + 1..].iter().flatten().copied().collect();
        let next_level = best as u32 + 1;
        let mut separator = Vec::new();
        for &s in &levels[best] {
            let touches_b = self
                .neighbors(s)
                .any(|j| self.region[j] == rid && self.level[j] == next_level);
            if touches_b {
                separator.push(s);
            } else {
                part_a.push(s);
            }
        }
        for &i in &part_a {
            self.region[i] = a_id;
        }
        for &i in &part_b {
            self.region[i] = b_id;
        }
        for &i in &separator {
            self.region[i] = s_id;
        }
        self.dissect(part_a, a_id);
        self.dissect(part_b, b_id);
        self.emit(&separator);
    }
}

/// Nested dissection for nodes of a criss-cross grid, given their integer
/// keys in units of half the spacing. Grid lines through cell corners
/// (`x` or `y` an even key) and diagonals with an even key sum or difference
/// are crossed by no mesh edge, so each is a vertex separator; at every
/// level the cheapest one of the four families is used.
pub(crate) fn grid_dissection(keys: &[[i64; 2]]) -> Vec<usize> {
    let mut order = Vec::with_capacity(keys.len());
    // separators are emitted after both halves, so they are pushed first
    let mut pending = vec![Part::Split((0..keys.len()).collect())];
    while let Some(part) = pending.pop() {
        match part {
            Part::Emit(nodes) => order.extend(nodes),
            Part::Split(nodes) => {
                if nodes.len() <= LEAF_SIZE {
                    order.extend(nodes);
                    continue;
                }
                match best_grid_cut(keys, &nodes) {
                    Some((a, sep, b)) => {
                        pending.push(Part::Emit(sep));
                        pending.push(Part::Split(b));
                        pending.push(Part::Split(a));
                    }
                    None => order.extend(nodes),
                }
            }
        }
    }
    order
}

enum Part {
    Split(Vec<usize>),
    Emit(Vec<usize>),
}

type Cut = (Vec<usize>, Vec<usize>, Vec<usize>);

fn best_grid_cut(keys: &[[i64; 2]], nodes: &[usize]) -> Option<Cut> {
    let projections: [fn([i64; 2]) -> i64; 4] =
        [|k| k[0], |k| k[1], |k| k[0] + k[1], |k| k[0] - k[1]];
    let total = nodes.len();
    let mut best: Option<(usize, usize, i64)> = None;
    for (dir, proj) in projections.iter().enumerate() {
        let mut values: Vec<i64> = nodes.iter().map(|&i| proj(keys[i])).collect();
        values.sort_unstable();
        let mut i = 0;
        while i < values.len() {
            let v = values[i];
            let mut j = i;
            while j < values.len() && values[j] == v {
                j += 1;
            }
            let (below, on, above) = (i, j - i, total - j);
            if v.rem_euclid(2) == 0 && below > 0 && above > 0 {
                let cost = below.abs_diff(above) + 2 * on;
                if best.is_none_or(|(c, _, _)| cost < c) {
                    best = Some((cost, dir, v));
                }
            }
            i = j;
        }
    }
    let (_, dir, v) = best?;
    let proj = projections[dir];
    let (mut a, mut sep, mut b) = (Vec::new(), Vec::new(), Vec::new());
    for &i in nodes {
        match proj(keys[i]).cmp(&v) {
            core::cmp::Ordering::Less => a.push(i),
            core::cmp::Ordering::Equal => sep.push(i),
            core::cmp::Ordering::Greater => b.push(i),
        }
    }
    Some((a, sep, b))
}
