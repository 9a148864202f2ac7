//! Canonical labeling of colored hypergraphs.
//!
//! A hypergraph here is a set of colored points plus a list of colored
//! blocks (point subsets). Code equivalence and design isomorphism both
//! reduce to isomorphism of such structures, so both are decided by
//! comparing canonical certificates.
//!
//! The search is the usual individualization-refinement scheme:
//!
//! * refinement splits the ordered point partition by a hash of the
//!   multiset of block values each point lies in, where a block's value
//!   hashes the multiset of its points' cells; it is iterated to a fixed
//!   point;
//! * the search tree individualizes each point of the first smallest
//!   non-singleton cell in turn;
//! * every node carries an invariant, a hash of its refinement trace, and
//!   every leaf (discrete partition) yields a certificate, the relabeled
//!   block list; the canonical leaf is the smallest by invariants along
//!   its path, then certificate. Subtrees whose invariants rank above the
//!   best path found so far are cut;
//! * leaves with equal certificates give automorphisms. At every node,
//!   children in the same orbit under the automorphisms fixing the current
//!   path are explored once, and a leaf equivalent to the first or best
//!   leaf abandons the search back to the node where the two paths split.

use std::cmp::Ordering;
use std::hash::Hasher;

use rustc_hash::FxHasher;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const BLOCK_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Default cap on search-tree leaves before giving up.
pub const DEFAULT_MAX_LEAVES: usize = 200_000;

#[derive(Clone, Debug, Default)]
pub struct Hypergraph {
    point_colors: Vec<u32>,
    block_colors: Vec<u32>,
    block_start: Vec<usize>,
    block_points: Vec<u32>,
}

impl Hypergraph {
    pub fn new(point_colors: Vec<u32>) -> Self {
        Hypergraph { point_colors, block_colors: Vec::new(), block_start: vec![0], block_points: Vec::new() }
    }

    pub fn add_block(&mut self, color: u32, points: impl IntoIterator<Item = u32>) {
        let start = self.block_points.len();
        self.block_points.extend(points);
        self.block_points[start..].sort_unstable();
        debug_assert!(self.block_points[start..].iter().all(|&p| (p as usize) < self.point_colors.len()));
        self.block_colors.push(color);
        self.block_start.push(self.block_points.len());
    }

    #[inline]
    pub fn num_points(&self) -> usize {
        self.point_colors.len()
    }

    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.block_colors.len()
    }

    #[inline]
    pub fn block(&self, b: usize) -> &[u32] {
        &self.block_points[self.block_start[b]..self.block_start[b + 1]]
    }

    #[inline]
    pub fn block_color(&self, b: usize) -> u32 {
        self.block_colors[b]
    }

    pub fn point_color(&self, p: usize) -> u32 {
        self.point_colors[p]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CanonStats {
    pub leaves: usize,
    pub automorphisms: usize,
}

/// Canonical labeling and the certificate it produces.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// `labeling[p]` is the canonical label of point `p`.
    pub labeling: Vec<u32>,
    /// The relabeled structure; equal certificates mean isomorphic inputs.
    pub certificate: Vec<u32>,
    pub digest: [u8; 32],
    /// Generators found for the automorphism group (point permutations).
    pub automorphisms: Vec<Vec<u32>>,
    pub stats: CanonStats,
}

impl CanonicalForm {
    pub fn digest_hex(&self) -> String {
        self.digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn canonical_form(h: &Hypergraph) -> Result<CanonicalForm> {
    canonical_form_with_limit(h, DEFAULT_MAX_LEAVES)
}

pub fn canonical_form_with_limit(h: &Hypergraph, max_leaves: usize) -> Result<CanonicalForm> {
    let mut s = Search::new(h, max_leaves);
    let init = s.initial_partition();
    let (root, inv) = s.refine(init);
    s.explore(root, inv, 0)?;
    let (certificate, labeling) = s.best.take().expect("search visits at least one leaf");
    let digest: [u8; 32] = Sha256::digest(
        certificate.iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<u8>>(),
    )
    .into();
    Ok(CanonicalForm {
        labeling,
        certificate,
        digest,
        automorphisms: s.automorphisms,
        stats: CanonStats { leaves: s.leaves, automorphisms: s.auts_found },
    })
}

/// Cell index per point, plus the number of cells.
#[derive(Clone)]
struct Partition {
    cell: Vec<u32>,
    count: usize,
}

struct Search<'a> {
    h: &'a Hypergraph,
    pt_start: Vec<usize>,
    pt_blocks: Vec<u32>,
    max_leaves: usize,
    leaves: usize,
    auts_found: usize,
    path: Vec<u32>,
    first_path: Vec<u32>,
    best_path: Vec<u32>,
    path_inv: Vec<u64>,
    best_inv: Vec<u64>,
    first: Option<(Vec<u32>, Vec<u32>)>,
    best: Option<(Vec<u32>, Vec<u32>)>,
    automorphisms: Vec<Vec<u32>>,
    // scratch
    block_value: Vec<u64>,
    point_value: Vec<u64>,
    order: Vec<u32>,
}

impl<'a> Search<'a> {
    fn new(h: &'a Hypergraph, max_leaves: usize) -> Self {
        let n = h.num_points();
        let mut deg = vec![0usize; n + 1];
        for &p in &h.block_points {
            deg[p as usize + 1] += 1;
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut fill = deg.clone();
        let mut pt_blocks = vec![0u32; h.block_points.len()];
        for b in 0..h.num_blocks() {
            for &p in h.block(b) {
                pt_blocks[fill[p as usize]] = b as u32;
                fill[p as usize] += 1;
            }
        }
        Search {
            h,
            pt_start: deg,
            pt_blocks,
            max_leaves,
            leaves: 0,
            auts_found: 0,
            path: Vec::new(),
            first_path: Vec::new(),
            best_path: Vec::new(),
            path_inv: Vec::new(),
            best_inv: Vec::new(),
            first: None,
            best: None,
            automorphisms: Vec::new(),
            block_value: vec![0; h.num_blocks()],
            point_value: Vec::new(),
            order: Vec::new(),
        }
    }

    fn initial_partition(&self) -> Partition {
        let mut colors = self.h.point_colors.clone();
        colors.sort_unstable();
        colors.dedup();
        let cell = self
            .h
            .point_colors
            .iter()
            .map(|c| colors.binary_search(c).unwrap() as u32)
            .collect();
        Partition { cell, count: colors.len() }
    }

    /// Iterates the refinement step to a fixed point. Also returns a hash of
    /// the refinement trace, which depends only on the structure and the
    /// ordered partition up to relabeling.
    fn refine(&mut self, mut part: Partition) -> (Partition, u64) {
        let n = self.h.num_points();
        let mut trace = FxHasher::default();
        trace.write_usize(part.count);
        while part.count < n {
            let next = self.refine_step(&part, &mut trace);
            if next.count == part.count {
                break;
            }
            part = next;
        }
        (part, trace.finish())
    }

    /// One round of refinement. Blocks get the sum of a mix of their
    /// points' cells, points the sum of a mix of their blocks' values, and
    /// cells split by that value. The sums depend only on cell indices, so
    /// the result is invariant under relabeling; a hash collision only
    /// leaves a cell coarser than it could be.
    fn refine_step(&mut self, part: &Partition, trace: &mut FxHasher) -> Partition {
        let h = self.h;
        let n = h.num_points();
        let cell_mix: Vec<u64> = (0..part.count as u64).map(mix).collect();
        for (b, value) in self.block_value.iter_mut().enumerate() {
            *value = h.block(b).iter().fold(mix(u64::from(h.block_colors[b]) ^ BLOCK_SALT), |acc, &p| {
                acc.wrapping_add(cell_mix[part.cell[p as usize] as usize])
            });
        }
        self.point_value.clear();
        self.point_value.extend((0..n).map(|p| {
            let blocks = &self.pt_blocks[self.pt_start[p]..self.pt_start[p + 1]];
            blocks.iter().fold(0u64, |acc, &b| acc.wrapping_add(mix(self.block_value[b as usize])))
        }));
        self.order.clear();
        self.order.extend(0..n as u32);
        let values = &self.point_value;
        let key = |p: u32| (part.cell[p as usize], values[p as usize]);
        self.order.sort_unstable_by_key(|&p| key(p));
        let mut cell = vec![0u32; n];
        let mut id = 0u32;
        for i in 0..n {
            if i > 0 && key(self.order[i]) != key(self.order[i - 1]) {
                trace.write_usize(i);
                trace.write_u64(values[self.order[i - 1] as usize]);
                id += 1;
            }
            cell[self.order[i] as usize] = id;
        }
        trace.write_u64(values[self.order[n - 1] as usize]);
        Partition { cell, count: id as usize + 1 }
    }

    fn target_cell(part: &Partition) -> Option<u32> {
        let mut size = vec![0usize; part.count];
        for &c in &part.cell {
            size[c as usize] += 1;
        }
        size.iter()
            .enumerate()
            .filter(|&(_, &s)| s > 1)
            .min_by_key(|&(i, &s)| (s, i))
            .map(|(i, _)| i as u32)
    }

    fn individualize(part: &Partition, cell: u32, p: u32) -> Partition {
        let v = part
            .cell
            .iter()
            .enumerate()
            .map(|(q, &c)| {
                if c > cell || (c == cell && q as u32 != p) {
                    c + 1
                } else {
                    c
                }
            })
            .collect();
        Partition { cell: v, count: part.count + 1 }
    }

    fn certificate(&self, labeling: &[u32]) -> Vec<u32> {
        let h = self.h;
        let nb = h.num_blocks();
        let n = h.num_points();
        let mut flat = Vec::with_capacity(h.block_points.len());
        let mut start = Vec::with_capacity(nb + 1);
        for b in 0..nb {
            start.push(flat.len());
            let s = flat.len();
            flat.extend(h.block(b).iter().map(|&p| labeling[p as usize]));
            flat[s..].sort_unstable();
        }
        start.push(flat.len());
        let key = |b: usize| (h.block_colors[b], &flat[start[b]..start[b + 1]]);
        let mut order: Vec<usize> = (0..nb).collect();
        order.sort_unstable_by(|&a, &b| key(a).cmp(&key(b)));

        let mut inverse = vec![0u32; n];
        for (p, &l) in labeling.iter().enumerate() {
            inverse[l as usize] = p as u32;
        }
        let mut cert = Vec::with_capacity(3 + n + 2 * nb + flat.len());
        cert.push(n as u32);
        cert.extend(inverse.iter().map(|&p| h.point_colors[p as usize]));
        cert.push(nb as u32);
        for b in order {
            let (color, pts) = key(b);
            cert.push(color);
            cert.push(pts.len() as u32);
            cert.extend_from_slice(pts);
        }
        cert
    }

    /// Orbit representative of every point under the automorphisms found
    /// so far that fix `prefix` pointwise.
    fn stabilizer_orbits(&self, prefix: &[u32]) -> Vec<u32> {
        let n = self.h.num_points();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for gamma in &self.automorphisms {
            if prefix.iter().any(|&v| gamma[v as usize] != v) {
                continue;
            }
            for (p, &q) in gamma.iter().enumerate() {
                let a = find(&mut parent, p as u32);
                let b = find(&mut parent, q);
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
        (0..n as u32).map(|p| find(&mut parent, p)).collect()
    }

    /// Returns `Some(level)` to abandon everything below the ancestor at
    /// depth `level`.
    fn explore(&mut self, part: Partition, inv: u64, level: usize) -> Result<Option<usize>> {
        self.path_inv.push(inv);
        let out = self.explore_node(part, level);
        self.path_inv.pop();
        out
    }

    /// Leaves are ranked by the invariants along their path, then by
    /// certificate; a node whose invariants already rank above the best
    /// path cannot hold the canonical leaf.
    fn dominated(&self) -> bool {
        if self.best.is_none() {
            return false;
        }
        let cur = &self.path_inv;
        let best = &self.best_inv;
        let common = cur.len().min(best.len());
        match cur[..common].cmp(&best[..common]) {
            Ordering::Less => false,
            Ordering::Greater => true,
            Ordering::Equal => cur.len() > best.len(),
        }
    }

    fn explore_node(&mut self, part: Partition, level: usize) -> Result<Option<usize>> {
        if self.dominated() {
            return Ok(None);
        }
        let Some(target) = Self::target_cell(&part) else {
            let jump = self.leaf(part.cell);
            self.check_budget()?;
            return Ok(jump);
        };
        let children: Vec<u32> =
            (0..part.cell.len() as u32).filter(|&p| part.cell[p as usize] == target).collect();
        let mut explored: Vec<u32> = Vec::new();
        let mut orbits: Option<(usize, Vec<u32>)> = None;
        for p in children {
            if !explored.is_empty() {
                // Any automorphism fixing the path so far maps the subtree
                // below `p` onto the subtree below each point of its orbit.
                if orbits.as_ref().is_none_or(|(seen, _)| *seen != self.automorphisms.len()) {
                    orbits = Some((self.automorphisms.len(), self.stabilizer_orbits(&self.path[..level])));
                }
                let (_, o) = orbits.as_ref().expect("computed above");
                if explored.iter().any(|&q| o[q as usize] == o[p as usize]) {
                    continue;
                }
            }
            explored.push(p);
            let (child, inv) = self.refine(Self::individualize(&part, target, p));
            self.path.push(p);
            let jump = self.explore(child, inv, level + 1);
            self.path.pop();
            match jump? {
                Some(l) if l < level => return Ok(Some(l)),
                _ => {}
            }
        }
        Ok(None)
    }

    fn common_prefix(&self, other: &[u32]) -> usize {
        self.path.iter().zip(other).take_while(|(a, b)| a == b).count()
    }

    /// Records the leaf; returns the depth to jump back to when the leaf is
    /// equivalent to one seen earlier.
    fn leaf(&mut self, labeling: Vec<u32>) -> Option<usize> {
        self.leaves += 1;
        let cert = self.certificate(&labeling);
        let Some((first_cert, first_lab)) = &self.first else {
            self.first_path = self.path.clone();
            self.best_path = self.path.clone();
            self.best_inv = self.path_inv.clone();
            self.best = Some((cert.clone(), labeling.clone()));
            self.first = Some((cert, labeling));
            return None;
        };
        if self.path_inv.len() == self.first_path.len() + 1 && cert == *first_cert {
            let gamma = compose_inverse(first_lab, &labeling);
            self.record_automorphism(gamma);
            return Some(self.common_prefix(&self.first_path));
        }
        let (best_cert, best_lab) = self.best.as_ref().expect("best set with first");
        match self.path_inv.cmp(&self.best_inv).then_with(|| cert.cmp(best_cert)) {
            Ordering::Less => {
                self.best = Some((cert, labeling));
                self.best_path = self.path.clone();
                self.best_inv = self.path_inv.clone();
                None
            }
            Ordering::Equal => {
                let gamma = compose_inverse(best_lab, &labeling);
                self.record_automorphism(gamma);
                Some(self.common_prefix(&self.best_path))
            }
            Ordering::Greater => None,
        }
    }

    fn record_automorphism(&mut self, gamma: Vec<u32>) {
        if gamma.iter().enumerate().all(|(i, &g)| g as usize == i) {
            return;
        }
        self.auts_found += 1;
        self.automorphisms.push(gamma);
    }
}

impl Search<'_> {
    fn check_budget(&self) -> Result<()> {
        if self.leaves > self.max_leaves {
            return Err(Error::Budget(format!("canonical labeling exceeded {} leaves", self.max_leaves)));
        }
        Ok(())
    }
}

/// `gamma(p) = target^{-1}(source(p))`: the permutation carrying points
/// labeled by `source` onto the points with the same label under `target`.
fn compose_inverse(target: &[u32], source: &[u32]) -> Vec<u32> {
    let mut inverse = vec![0u32; target.len()];
    for (p, &l) in target.iter().enumerate() {
        inverse[l as usize] = p as u32;
    }
    source.iter().map(|&l| inverse[l as usize]).collect()
}

/// Point map carrying `a` onto `b`, from two canonical forms with equal
/// certificates.
pub fn isomorphism(a: &CanonicalForm, b: &CanonicalForm) -> Option<Vec<u32>> {
    (a.certificate == b.certificate).then(|| compose_inverse(&b.labeling, &a.labeling))
}
