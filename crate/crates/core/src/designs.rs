//! Support designs of minimum-weight codewords.

use std::fmt::Write as _;

use crate::canon::{canonical_form, Hypergraph};
use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::infoset::min_weight_codewords;

/// Cap on the number of `t`-subsets tracked by [`verify_t_design`].
pub const MAX_TRACKED_SUBSETS: u64 = 50_000_000;

/// Blocks on points `0..v`, each a bitset of exactly `block_size` points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceStructure {
    v: usize,
    block_size: usize,
    blocks: Vec<u128>,
}

impl IncidenceStructure {
    /// Blocks are sorted; repeated blocks are rejected.
    pub fn new(v: usize, block_size: usize, mut blocks: Vec<u128>) -> Result<Self> {
        if v > 128 {
            return Err(Error::TooLong(v));
        }
        let outside = if v == 128 { 0 } else { !0u128 << v };
        if let Some(b) = blocks.iter().find(|&&b| b.count_ones() as usize != block_size || b & outside != 0) {
            return Err(Error::InvalidInput(format!("block {:?} is not a {block_size}-subset of 0..{v}", bits(*b))));
        }
        blocks.sort_unstable();
        if blocks.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("repeated block".into()));
        }
        Ok(IncidenceStructure { v, block_size, blocks })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[u128] {
        &self.blocks
    }

    /// One block per line, points in increasing order, separated by spaces.
    pub fn to_block_lines(&self) -> String {
        let mut out = String::new();
        for &b in &self.blocks {
            let pts: Vec<String> = bits(b).iter().map(usize::to_string).collect();
            writeln!(out, "{}", pts.join(" ")).expect("writing to a String");
        }
        out
    }
}

fn bits(mut b: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(b.count_ones() as usize);
    while b != 0 {
        out.push(b.trailing_zeros() as usize);
        b &= b - 1;
    }
    out
}

/// The distinct supports of the minimum-weight codewords.
pub fn support_design(c: &LinearCode) -> Result<IncidenceStructure> {
    let (d, words) = min_weight_codewords(c);
    let mut blocks: Vec<u128> = words.iter().map(|w| w.support()).collect();
    blocks.sort_unstable();
    blocks.dedup();
    IncidenceStructure::new(c.n(), d, blocks)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Colex rank of a sorted subset.
fn subset_rank(points: &[usize]) -> usize {
    points.iter().enumerate().map(|(i, &p)| binomial(p as u64, i as u64 + 1) as usize).sum()
}

fn subset_unrank(mut rank: u64, t: usize) -> Vec<usize> {
    let mut out = vec![0; t];
    for i in (0..t).rev() {
        let mut p = i as u64;
        while binomial(p + 1, i as u64 + 1) <= rank {
            p += 1;
        }
        rank -= binomial(p, i as u64 + 1);
        out[i] = p as usize;
    }
    out
}

fn for_each_subset(items: &[usize], t: usize, f: &mut impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..t).collect();
    let mut chosen = vec![0; t];
    loop {
        for (c, &i) in chosen.iter_mut().zip(&idx) {
            *c = items[i];
        }
        f(&chosen);
        let Some(pos) = (0..t).rev().find(|&j| idx[j] < items.len() - t + j) else {
            return;
        };
        idx[pos] += 1;
        for j in pos + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `λ` such that every `t`-subset of points lies in exactly `λ` blocks.
pub fn verify_t_design(d: &IncidenceStructure, t: usize) -> Result<u64> {
    if t > d.block_size {
        return Err(Error::InvalidInput(format!("t = {t} exceeds the block size {}", d.block_size)));
    }
    let b = d.num_blocks() as u64;
    if t == 0 {
        return Ok(b);
    }
    let subsets = binomial(d.v as u64, t as u64);
    if subsets > MAX_TRACKED_SUBSETS {
        return Err(Error::Budget(format!("{subsets} subsets of size {t}")));
    }
    let per_block = binomial(d.block_size as u64, t as u64);
    let mut count = vec![0u64; subsets as usize];
    for &blk in &d.blocks {
        for_each_subset(&bits(blk), t, &mut |s| count[subset_rank(s)] += 1);
    }
    let lambda = if (b * per_block) % subsets == 0 { b * per_block / subsets } else { count[0] };
    match count.iter().position(|&c| c != lambda) {
        None => Ok(lambda),
        Some(r) => Err(Error::NotADesign {
            t,
            subset: subset_unrank(r as u64, t),
            count: count[r],
            expected: lambda,
        }),
    }
}

/// `λ` of the same design viewed as a `t'`-design, `t' <= t`.
pub fn derived_lambda(v: usize, k: usize, t: usize, lambda: u64, t_prime: usize) -> u64 {
    let (v, k, t, tp) = (v as u64, k as u64, t as u64, t_prime as u64);
    lambda * binomial(v - tp, t - tp) / binomial(k - tp, t - tp)
}

/// Design strength guaranteed for the minimum-weight supports of an
/// extremal ternary self-dual code of length `n`.
pub fn extremal_design_strength(n: usize) -> Result<usize> {
    match n % 12 {
        0 => Ok(5),
        4 => Ok(3),
        8 => Ok(1),
        _ => Err(Error::InvalidLength(n)),
    }
}

fn design_hypergraph(d: &IncidenceStructure) -> Hypergraph {
    let mut h = Hypergraph::new(vec![0; d.v]);
    for &b in &d.blocks {
        h.add_block(0, bits(b).into_iter().map(|p| p as u32));
    }
    h
}

/// Hex digest identifying the design up to isomorphism.
pub fn design_certificate(d: &IncidenceStructure) -> Result<String> {
    Ok(canonical_form(&design_hypergraph(d))?.digest_hex())
}

pub fn designs_isomorphic(d1: &IncidenceStructure, d2: &IncidenceStructure) -> Result<bool> {
    if (d1.v, d1.block_size, d1.num_blocks()) != (d2.v, d2.block_size, d2.num_blocks()) {
        return Ok(false);
    }
    let a = canonical_form(&design_hypergraph(d1))?;
    let b = canonical_form(&design_hypergraph(d2))?;
    Ok(a.certificate == b.certificate)
}
