//! Exhaustive classification of extremal four-negacirculant codes.
//!
//! Pipeline for one length `n = 4m`:
//!
//! 1. first rows `r_A` run over the nonzero rows whose first nonzero entry
//!    is 1, in increasing [`f_order`]; `r_B` runs over the same rows plus the
//!    zero row with `f(r_B) <= f(r_A)`;
//! 2. self-dual pairs are found by a hash join on `r r^T`, since the pair is
//!    self-dual exactly when `r_A r_A^T + r_B r_B^T = 2`;
//! 3. a pair is kept only if it is the smallest reduced member of its
//!    [`extended_orbit`], which contains its [`pair_orbit`];
//! 4. the minimum weight is screened in three stages of increasing cost;
//! 5. survivors are classified up to equivalence.

use std::path::PathBuf;
use std::rc::Rc;
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::checkpoint::Checkpoint;
use crate::code::extremal_bound;
use crate::equivalence::{classify_up_to_equivalence, pair_orbit};
use crate::error::{Error, Result};
use crate::gf3::{Packed, Trit, TritVector};
use crate::infoset::{screen_min_weight, Screening};
use crate::negacirculant::{build_generator, gram_row, NegaPair, TritRow};

/// Largest block size the search accepts (`n <= 64`).
pub const MAX_SEARCH_BLOCK: usize = 16;

/// Leading patterns of `r_A` used for the partial search at length 56.
pub const RESTRICTED_56_PREFIXES: [[u8; 5]; 5] =
    [[0, 0, 0, 0, 0], [0, 0, 0, 0, 1], [0, 0, 0, 1, 0], [0, 0, 0, 1, 1], [0, 0, 0, 1, 2]];

/// Number of `r_A` values handled between checkpoint writes.
const CHUNK: u64 = 64;

/// `sum_i 3^i a_i`, with `a_0` least significant.
///
/// # Panics
/// If `a` is longer than 80, where the value no longer fits.
pub fn f_order(a: &TritVector) -> u128 {
    assert!(a.len() <= 80, "f_order is defined here for lengths up to 80");
    (0..a.len()).rev().fold(0u128, |acc, i| acc * 3 + a.get(i).value() as u128)
}

fn pair_rank(p: &NegaPair) -> (u128, u128) {
    (f_order(p.ra.coeffs()), f_order(p.rb.coeffs()))
}

fn normalize_row(r: &TritRow) -> TritRow {
    match r.leading_coefficient() {
        Some(c) => r.scale(c.inverse().expect("leading coefficient is nonzero")),
        None => *r,
    }
}

/// Scales both rows to a leading 1 and orders them so `f(r_A) >= f(r_B)`.
pub fn reduce_pair(p: &NegaPair) -> NegaPair {
    let a = normalize_row(&p.ra);
    let b = normalize_row(&p.rb);
    let (ra, rb) = if f_order(a.coeffs()) >= f_order(b.coeffs()) { (a, b) } else { (b, a) };
    NegaPair::new(ra, rb).expect("rows share a length")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub index: usize,
    pub total: usize,
}

impl Partition {
    pub const FULL: Partition = Partition { index: 0, total: 1 };

    pub fn new(index: usize, total: usize) -> Result<Self> {
        if total == 0 || index >= total {
            return Err(Error::InvalidInput(format!("partition {index} of {total}")));
        }
        Ok(Partition { index, total })
    }

    /// Half-open range of `r_A` ranks owned by this shard.
    pub fn range(&self, count: u64) -> (u64, u64) {
        let at = |i: usize| (count as u128 * i as u128 / self.total as u128) as u64;
        (at(self.index), at(self.index + 1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub n: usize,
    pub target_weight: usize,
    /// Allowed leading trits of `r_A`; `None` allows every row.
    pub prefix_filter: Option<Vec<Vec<u8>>>,
    pub partition: Partition,
}

impl SearchSpec {
    /// Full search at length `n` for the extremal weight.
    pub fn new(n: usize) -> Result<Self> {
        let target_weight = extremal_bound(n)?;
        if n / 4 > MAX_SEARCH_BLOCK {
            return Err(Error::TooLong(n));
        }
        Ok(SearchSpec { n, target_weight, prefix_filter: None, partition: Partition::FULL })
    }

    pub fn with_target(mut self, target_weight: usize) -> Self {
        self.target_weight = target_weight;
        self
    }

    pub fn with_prefixes(mut self, prefixes: Vec<Vec<u8>>) -> Result<Self> {
        for p in &prefixes {
            if p.len() > self.m() || p.iter().any(|&t| t > 2) {
                return Err(Error::InvalidInput(format!("prefix {p:?} does not fit rows of length {}", self.m())));
            }
        }
        self.prefix_filter = Some(prefixes);
        Ok(self)
    }

    pub fn with_partition(mut self, partition: Partition) -> Self {
        self.partition = partition;
        self
    }

    pub fn m(&self) -> usize {
        self.n / 4
    }

    /// Hex digest of every field that affects the output.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        Sha256::digest(json).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn admits(&self, ra: &TritRow) -> bool {
        match &self.prefix_filter {
            None => true,
            Some(prefixes) => prefixes.iter().any(|p| p.iter().enumerate().all(|(i, &t)| ra.get(i).value() == t)),
        }
    }
}

/// A row of length `m <= 16` packed as `ones | twos << 16`.
type Packed16 = u32;

fn pack(r: &TritRow) -> Packed16 {
    r.coeffs().ones() as u32 | (r.coeffs().twos() as u32) << 16
}

fn unpack(m: usize, p: Packed16) -> TritRow {
    let v = TritVector::from_planes(m, (p & 0xffff) as u128, (p >> 16) as u128).expect("planes fit the length");
    TritRow::new(v).expect("valid row length")
}

/// Nonzero rows of length `m` with first nonzero entry 1, in increasing
/// [`f_order`], as `(f, packed row)`.
fn reduced_rows(m: usize) -> Vec<(u32, Packed16)> {
    let total = 3u32.pow(m as u32);
    let mut out = Vec::with_capacity(total as usize / 2);
    for f in 1..total {
        let mut x = f;
        let mut low = 0;
        while x % 3 == 0 {
            x /= 3;
            low += 1;
        }
        if x % 3 != 1 {
            continue;
        }
        let (mut ones, mut twos, mut y) = (0u32, 0u32, f);
        for i in 0..m {
            match y % 3 {
                1 => ones |= 1 << i,
                2 => twos |= 1 << i,
                _ => {}
            }
            y /= 3;
        }
        debug_assert!(ones >> low & 1 == 1);
        out.push((f, ones | twos << 16));
    }
    out
}

/// Every `(r_A, r_B)` the search considers before the self-dual filter.
pub fn enumerate_candidates(spec: &SearchSpec) -> impl Iterator<Item = NegaPair> + '_ {
    let m = spec.m();
    let rows = reduced_rows(m);
    let (lo, hi) = spec.partition.range(rows.len() as u64);
    let owned: Rc<Vec<TritRow>> = Rc::new(rows.iter().map(|&(_, p)| unpack(m, p)).collect());
    let lookup = Rc::clone(&owned);
    (lo as usize..hi as usize).filter(move |&i| spec.admits(&lookup[i])).flat_map(move |i| {
        let ra = owned[i];
        let owned = Rc::clone(&owned);
        std::iter::once(TritRow::zero(m))
            .chain((0..=i).map(move |j| owned[j]))
            .map(move |rb| NegaPair::new(ra, rb).expect("rows share a length"))
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// `r_A` values admitted by the prefix filter.
    pub ra_values: u64,
    pub candidates: u64,
    pub self_dual: u64,
    pub orbit_minimal: u64,
    pub rejected_row_weight: u64,
    pub rejected_pair_weight: u64,
    pub rejected_min_weight: u64,
    pub survivors: u64,
}

impl SearchStats {
    fn add(&mut self, o: &SearchStats) {
        self.ra_values += o.ra_values;
        self.candidates += o.candidates;
        self.self_dual += o.self_dual;
        self.orbit_minimal += o.orbit_minimal;
        self.rejected_row_weight += o.rejected_row_weight;
        self.rejected_pair_weight += o.rejected_pair_weight;
        self.rejected_min_weight += o.rejected_min_weight;
        self.survivors += o.survivors;
    }
}

/// A pair that passed every screen, with its exact minimum weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survivor {
    pub pair: NegaPair,
    pub min_weight: usize,
}

/// Survivors of one shard, sorted by `(f(r_A), f(r_B))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardOutput {
    pub spec: SearchSpec,
    pub survivors: Vec<Survivor>,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRepresentative {
    pub pair: NegaPair,
    pub min_weight: usize,
    /// Survivors equivalent to this representative, itself included.
    pub class_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub n: usize,
    pub target_weight: usize,
    pub prefix_filter: Option<Vec<Vec<u8>>>,
    pub class_count: usize,
    pub survivor_count: usize,
    pub representatives: Vec<ClassRepresentative>,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Progress file; resumed from when it exists.
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many `r_A` values, leaving the checkpoint behind.
    pub stop_after_ranks: Option<u64>,
}

/// Result of a shard run that may have been cut short.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShardRun {
    Complete(ShardOutput),
    Interrupted { next_rank: u64, end_rank: u64 },
}

/// Lookup from `r r^T` to the rows producing it, each list in increasing `f`.
struct GramIndex {
    m: usize,
    rows: Vec<(u32, Packed16)>,
    by_gram: FxHashMap<Packed16, Vec<(u32, Packed16)>>,
}

impl GramIndex {
    fn new(m: usize) -> Self {
        let rows = reduced_rows(m);
        let mut by_gram: FxHashMap<Packed16, Vec<(u32, Packed16)>> = FxHashMap::default();
        by_gram.entry(0).or_default().push((0, 0));
        for &(f, p) in &rows {
            by_gram.entry(pack(&gram_row(&unpack(m, p)))).or_default().push((f, p));
        }
        GramIndex { m, rows, by_gram }
    }

    /// Rows `r_B` with `f(r_B) <= f(r_A)` completing `r_A` to a self-dual pair.
    fn partners(&self, ra: &TritRow, f_ra: u32) -> impl Iterator<Item = TritRow> + '_ {
        let mut need = TritVector::zero(self.m);
        need.set(0, Trit::TWO);
        let need = TritRow::new(need - *gram_row(ra).coeffs()).expect("valid row length");
        self.by_gram
            .get(&pack(&need))
            .into_iter()
            .flatten()
            .take_while(move |&&(f, _)| f <= f_ra)
            .map(|&(_, p)| unpack(self.m, p))
    }
}

/// Tables for the ring automorphisms `x -> x^j` of `F_3[x]/(x^m + 1)`, `j`
/// odd and prime to `2m`: entry `i` is the image position of `x^i` and
/// whether its sign flips.
fn ring_automorphisms(m: usize) -> Vec<Vec<(usize, bool)>> {
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    (1..2 * m)
        .step_by(2)
        .filter(|&j| gcd(j, 2 * m) == 1)
        .map(|j| {
            (0..m)
                .map(|i| {
                    let e = i * j % (2 * m);
                    (e % m, e >= m)
                })
                .collect()
        })
        .collect()
}

fn apply_ring_map(r: &TritRow, map: &[(usize, bool)]) -> TritRow {
    let mut out = TritVector::zero(r.m());
    for (i, &(to, flip)) in map.iter().enumerate() {
        let t = r.get(i);
        out.set(to, if flip { -t } else { t });
    }
    TritRow::new(out).expect("valid row length")
}

/// Pairs `(x^s σ(r_A), x^s σ(r_B))` over every ring automorphism `σ` and
/// shift `s`. Each generates a code equivalent to that of `p`: `σ` acts as
/// the same signed permutation on all four blocks, and a common shift is
/// undone by row operations and a signed permutation of the last two blocks.
pub fn ring_images(p: &NegaPair) -> Vec<NegaPair> {
    let m = p.m();
    let mut out = Vec::new();
    for map in ring_automorphisms(m) {
        let (a, b) = (apply_ring_map(&p.ra, &map), apply_ring_map(&p.rb, &map));
        for s in 0..m {
            out.push(NegaPair::new(a.shifted(s), b.shifted(s)).expect("rows share a length"));
        }
    }
    out
}

/// Reduced images of `p` under [`pair_orbit`] followed by [`ring_images`].
pub fn extended_orbit(p: &NegaPair) -> Vec<NegaPair> {
    let mut out: Vec<NegaPair> =
        pair_orbit(p, true).iter().flat_map(ring_images).map(|q| reduce_pair(&q)).collect();
    out.sort_by_key(pair_rank);
    out.dedup();
    out
}

/// Packed-row version of the [`extended_orbit`] minimality test.
///
/// After reduction, scaling and swapping the rows change nothing, and
/// transposing both rows is the automorphism `j = -1`, so transposing `r_A`
/// alone is the only [`pair_orbit`] move left to combine with the ring maps.
struct OrbitFilter {
    m: usize,
    /// `f` of a row with one nonzero plane, indexed by that plane.
    f_plane: Vec<u32>,
    maps: Vec<Vec<(u32, bool)>>,
    /// `(mask, ones, twos)` per admitted prefix.
    prefixes: Option<Vec<(u32, u32, u32)>>,
}

impl OrbitFilter {
    fn new(spec: &SearchSpec) -> Self {
        let m = spec.m();
        let f_plane = (0..1u32 << m)
            .map(|bits| (0..m).filter(|&i| bits >> i & 1 == 1).map(|i| 3u32.pow(i as u32)).sum())
            .collect();
        let maps = ring_automorphisms(m)
            .into_iter()
            .map(|t| t.into_iter().map(|(to, flip)| (to as u32, flip)).collect())
            .collect();
        let prefixes = spec.prefix_filter.as_ref().map(|ps| {
            ps.iter()
                .map(|p| {
                    let mask = (1u32 << p.len()) - 1;
                    let plane = |v: u8| p.iter().enumerate().filter(|&(_, &t)| t == v).fold(0, |acc, (i, _)| acc | 1 << i);
                    (mask, plane(1), plane(2))
                })
                .collect()
        });
        OrbitFilter { m, f_plane, maps, prefixes }
    }

    fn f(&self, r: Packed16) -> u32 {
        self.f_plane[(r & 0xffff) as usize] + 2 * self.f_plane[(r >> 16) as usize]
    }

    fn normalize(r: Packed16) -> Packed16 {
        let (ones, twos) = (r & 0xffff, r >> 16);
        let support = ones | twos;
        if support != 0 && twos & support & support.wrapping_neg() != 0 {
            twos | ones << 16
        } else {
            r
        }
    }

    fn shift(&self, r: Packed16) -> Packed16 {
        let top = self.m as u32 - 1;
        let mask = (1u32 << self.m) - 1;
        let (ones, twos) = (r & 0xffff, r >> 16);
        let o = (ones << 1 & mask) | (twos >> top & 1);
        let t = (twos << 1 & mask) | (ones >> top & 1);
        o | t << 16
    }

    fn map(r: Packed16, map: &[(u32, bool)]) -> Packed16 {
        let mut out = 0;
        for (i, &(to, flip)) in map.iter().enumerate() {
            let (o, t) = (r >> i & 1, r >> (16 + i) & 1);
            let (o, t) = if flip { (t, o) } else { (o, t) };
            out |= o << to | t << (16 + to);
        }
        out
    }

    fn admits(&self, ra: Packed16) -> bool {
        match &self.prefixes {
            None => true,
            Some(ps) => ps.iter().any(|&(mask, o, t)| ra & mask == o && (ra >> 16) & mask == t),
        }
    }

    /// Whether the reduced pair `(ra, rb)` is the smallest reduced,
    /// admitted member of its extended orbit.
    fn is_minimal(&self, ra: Packed16, rb: Packed16) -> bool {
        let own = (self.f(ra), self.f(rb));
        let transpose = self.maps.last().expect("j = 2m - 1 is always a unit");
        for a0 in [ra, Self::map(ra, transpose)] {
            for map in &self.maps {
                let (mut a, mut b) = (Self::map(a0, map), Self::map(rb, map));
                for _ in 0..self.m {
                    let (na, nb) = (Self::normalize(a), Self::normalize(b));
                    let (fa, fb) = (self.f(na), self.f(nb));
                    let (hi, lo, first) = if fa >= fb { (fa, fb, na) } else { (fb, fa, nb) };
                    if (hi, lo) < own && self.admits(first) {
                        return false;
                    }
                    a = self.shift(a);
                    b = self.shift(b);
                }
            }
        }
        true
    }
}

enum Screen {
    RowWeight,
    PairWeight,
    MinWeight,
    Pass(usize),
}

fn screen(p: &NegaPair, target: usize) -> Screen {
    if 1 + p.ra.weight() + p.rb.weight() < target {
        return Screen::RowWeight;
    }
    let g = build_generator(p);
    let rows: Vec<Packed<u64>> = g.rows().iter().map(|r| r.packed::<u64>()).collect();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if ((*a + *b).weight() as usize) < target || ((*a - *b).weight() as usize) < target {
                return Screen::PairWeight;
            }
        }
    }
    match screen_min_weight(&p.code(), target) {
        Screening::Below(_) => Screen::MinWeight,
        Screening::Certified(d) => Screen::Pass(d),
    }
}

fn process_ra(spec: &SearchSpec, index: &GramIndex, filter: &OrbitFilter, rank: usize) -> (Vec<Survivor>, SearchStats) {
    let mut stats = SearchStats::default();
    let mut survivors = Vec::new();
    let (f_ra, packed) = index.rows[rank];
    let ra = unpack(index.m, packed);
    if !spec.admits(&ra) {
        return (survivors, stats);
    }
    stats.ra_values = 1;
    stats.candidates = rank as u64 + 2;
    for rb in index.partners(&ra, f_ra) {
        stats.self_dual += 1;
        if !filter.is_minimal(packed, pack(&rb)) {
            continue;
        }
        let p = NegaPair::new(ra, rb).expect("rows share a length");
        stats.orbit_minimal += 1;
        match screen(&p, spec.target_weight) {
            Screen::RowWeight => stats.rejected_row_weight += 1,
            Screen::PairWeight => stats.rejected_pair_weight += 1,
            Screen::MinWeight => stats.rejected_min_weight += 1,
            Screen::Pass(d) => {
                stats.survivors += 1;
                survivors.push(Survivor { pair: p, min_weight: d });
            }
        }
    }
    // Partners arrive in increasing f(r_B) except that the zero row leads.
    survivors.sort_by_key(|s| pair_rank(&s.pair));
    (survivors, stats)
}

/// Number of `r_A` candidates before the prefix filter, `(3^m - 1) / 2`.
pub fn ra_count(m: usize) -> u64 {
    (3u64.pow(m as u32) - 1) / 2
}

/// Runs the screening stages over this shard's `r_A` range.
pub fn run_shard(spec: &SearchSpec, opts: &SearchOptions) -> Result<ShardRun> {
    let m = spec.m();
    if m == 0 || m > MAX_SEARCH_BLOCK || spec.n % 4 != 0 {
        return Err(Error::InvalidLength(spec.n));
    }
    let started = Instant::now();
    let mut state = match &opts.checkpoint {
        Some(path) if path.exists() => Checkpoint::load(path, spec)?,
        _ => Checkpoint::fresh(spec),
    };
    let index = GramIndex::new(m);
    let filter = OrbitFilter::new(spec);
    debug_assert_eq!(index.rows.len() as u64, ra_count(m));
    let (lo, hi) = spec.partition.range(index.rows.len() as u64);
    state.next_rank = state.next_rank.max(lo);
    let stop_at = opts.stop_after_ranks.map_or(hi, |k| (state.next_rank + k).min(hi));
    let base_elapsed = state.elapsed_ms;

    while state.next_rank < stop_at {
        let end = (state.next_rank + CHUNK).min(stop_at);
        let parts: Vec<(Vec<Survivor>, SearchStats)> = (state.next_rank..end)
            .into_par_iter()
            .map(|r| process_ra(spec, &index, &filter, r as usize))
            .collect();
        for (s, st) in parts {
            state.survivors.extend(s);
            state.stats.add(&st);
        }
        state.next_rank = end;
        state.elapsed_ms = base_elapsed + started.elapsed().as_millis() as u64;
        if let Some(path) = &opts.checkpoint {
            state.save(path)?;
        }
    }
    if let Some(path) = &opts.checkpoint {
        state.save(path)?;
    }
    if state.next_rank < hi {
        return Ok(ShardRun::Interrupted { next_rank: state.next_rank, end_rank: hi });
    }
    if spec.prefix_filter.is_none() && spec.partition == Partition::FULL && state.stats.ra_values != ra_count(m) {
        return Err(Error::InvalidInput(format!(
            "enumerated {} values of r_A, expected {}",
            state.stats.ra_values,
            ra_count(m)
        )));
    }
    Ok(ShardRun::Complete(ShardOutput { spec: spec.clone(), survivors: state.survivors, stats: state.stats }))
}

/// Joins shards of one search into a single sorted output.
pub fn merge_shards(mut shards: Vec<ShardOutput>) -> Result<ShardOutput> {
    let Some(first) = shards.first() else {
        return Err(Error::InvalidInput("no shards to merge".into()));
    };
    let total = first.spec.partition.total;
    let base = SearchSpec { partition: Partition::FULL, ..first.spec.clone() };
    shards.sort_by_key(|s| s.spec.partition.index);
    let indices: Vec<usize> = shards.iter().map(|s| s.spec.partition.index).collect();
    if indices != (0..total).collect::<Vec<_>>() {
        return Err(Error::InvalidInput(format!("shards {indices:?} do not cover 0..{total}")));
    }
    let mut out = ShardOutput { spec: base.clone(), survivors: Vec::new(), stats: SearchStats::default() };
    for s in shards {
        if (SearchSpec { partition: Partition::FULL, ..s.spec.clone() }) != base || s.spec.partition.total != total {
            return Err(Error::InvalidInput("shards come from different searches".into()));
        }
        out.survivors.extend(s.survivors);
        out.stats.add(&s.stats);
    }
    out.survivors.sort_by_key(|s| pair_rank(&s.pair));
    Ok(out)
}

/// Classifies the survivors of a complete search.
pub fn classify_survivors(output: &ShardOutput) -> Result<ClassificationResult> {
    let codes: Vec<_> = output.survivors.iter().map(|s| s.pair.code()).collect();
    let classes = classify_up_to_equivalence(&codes)?;
    let representatives = classes
        .iter()
        .map(|c| {
            let s = output.survivors[c.representative()];
            ClassRepresentative { pair: s.pair, min_weight: s.min_weight, class_size: c.members.len() }
        })
        .collect();
    Ok(ClassificationResult {
        n: output.spec.n,
        target_weight: output.spec.target_weight,
        prefix_filter: output.spec.prefix_filter.clone(),
        class_count: classes.len(),
        survivor_count: output.survivors.len(),
        representatives,
        stats: output.stats.clone(),
    })
}

/// Search plus classification; with a checkpoint, an interrupted run is
/// resumed and a finished one returns its stored result.
pub fn classify_length(spec: &SearchSpec, opts: &SearchOptions) -> Result<Option<ClassificationResult>> {
    if let Some(path) = &opts.checkpoint {
        if path.exists() {
            if let Some(done) = Checkpoint::load(path, spec)?.result {
                return Ok(Some(done));
            }
        }
    }
    let output = match run_shard(spec, opts)? {
        ShardRun::Complete(o) => o,
        ShardRun::Interrupted { .. } => return Ok(None),
    };
    let result = classify_survivors(&output)?;
    if let Some(path) = &opts.checkpoint {
        let mut state = Checkpoint::load(path, spec)?;
        state.complete = true;
        state.result = Some(result.clone());
        state.save(path)?;
    }
    Ok(Some(result))
}

/// The partial length-56 search over the five leading patterns of `r_A`.
pub fn restricted_search_56(spec: &SearchSpec, opts: &SearchOptions) -> Result<Option<ClassificationResult>> {
    if spec.n != 56 {
        return Err(Error::InvalidLength(spec.n));
    }
    let spec = spec.clone().with_prefixes(RESTRICTED_56_PREFIXES.iter().map(|p| p.to_vec()).collect())?;
    classify_length(&spec, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::are_equivalent_exact;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair(a: &[u8], b: &[u8]) -> NegaPair {
        NegaPair::from_trits(a, b).unwrap()
    }

    #[test]
    fn f_order_examples() {
        assert_eq!(f_order(&TritVector::from_trits(&[0, 0, 0]).unwrap()), 0);
        assert_eq!(f_order(&TritVector::from_trits(&[1, 0, 0]).unwrap()), 1);
        assert_eq!(f_order(&TritVector::from_trits(&[0, 1, 2]).unwrap()), 21);
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_pair(&pair(&[0, 2, 1], &[2, 0, 0])), pair(&[0, 1, 2], &[1, 0, 0]));
        assert_eq!(reduce_pair(&pair(&[1, 0, 0], &[0, 1, 0])), pair(&[0, 1, 0], &[1, 0, 0]));
        let p = pair(&[0, 1, 2], &[1, 0, 0]);
        assert_eq!(reduce_pair(&p), p);
    }

    #[test]
    fn reduce_preserves_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let mut checked = 0;
        while checked < 30 {
            let m = rng.random_range(1..4);
            let a: Vec<u8> = (0..m).map(|_| rng.random_range(0..3)).collect();
            let b: Vec<u8> = (0..m).map(|_| rng.random_range(0..3)).collect();
            let p = pair(&a, &b);
            if !p.is_self_dual() {
                continue;
            }
            let q = reduce_pair(&p);
            assert_eq!(reduce_pair(&q), q);
            assert!(are_equivalent_exact(&p.code(), &q.code()).unwrap().is_some());
            checked += 1;
        }
    }

    #[test]
    fn candidate_examples() {
        let spec = SearchSpec::new(4).unwrap();
        let c: Vec<NegaPair> = enumerate_candidates(&spec).collect();
        assert_eq!(c, vec![pair(&[1], &[0]), pair(&[1], &[1])]);

        let spec = SearchSpec::new(8).unwrap();
        let ra: Vec<Vec<u8>> = reduced_rows(2).iter().map(|&(_, p)| unpack(2, p).to_trits()).collect();
        assert_eq!(ra, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]]);
        let c: Vec<NegaPair> = enumerate_candidates(&spec).collect();
        assert_eq!(c.len(), 2 + 3 + 4 + 5);
        // Against reducing all 81 raw pairs.
        let raw: Vec<Vec<u8>> = (0..9u8).map(|x| vec![x % 3, x / 3]).collect();
        let mut reduced: Vec<NegaPair> = raw
            .iter()
            .flat_map(|a| raw.iter().map(move |b| pair(a, b)))
            .filter(|p| !p.ra.is_zero() || !p.rb.is_zero())
            .map(|p| reduce_pair(&p))
            .collect();
        reduced.sort_by_key(pair_rank);
        reduced.dedup();
        assert_eq!(c, reduced);
        assert!(c.iter().all(|p| !p.ra.is_zero()));
        for w in c.windows(2) {
            assert!(pair_rank(&w[0]) < pair_rank(&w[1]));
        }
    }

    #[test]
    fn join_matches_filter() {
        for m in 1..=5 {
            let spec = SearchSpec::new(4 * m).unwrap();
            let index = GramIndex::new(m);
            let mut joined: Vec<NegaPair> = index
                .rows
                .iter()
                .flat_map(|&(f, p)| {
                    let ra = unpack(m, p);
                    index.partners(&ra, f).map(move |rb| NegaPair::new(ra, rb).unwrap()).collect::<Vec<_>>()
                })
                .collect();
            joined.sort_by_key(pair_rank);
            let filtered: Vec<NegaPair> = enumerate_candidates(&spec).filter(NegaPair::is_self_dual).collect();
            assert_eq!(joined, filtered, "m = {m}");
        }
    }

    #[test]
    fn partitions_cover_ranks() {
        for total in 1..7 {
            let mut next = 0;
            for i in 0..total {
                let (lo, hi) = Partition::new(i, total).unwrap().range(40);
                assert_eq!(lo, next);
                next = hi;
            }
            assert_eq!(next, 40);
        }
        assert!(Partition::new(3, 3).is_err());
    }

    #[test]
    fn prefix_filter() {
        let spec = SearchSpec::new(20).unwrap().with_prefixes(vec![vec![0, 0, 0, 0, 1]]).unwrap();
        assert!(enumerate_candidates(&spec).all(|p| p.ra.to_trits() == vec![0, 0, 0, 0, 1]));
        let empty = SearchSpec::new(20).unwrap().with_prefixes(vec![]).unwrap();
        assert_eq!(enumerate_candidates(&empty).count(), 0);
        assert!(SearchSpec::new(8).unwrap().with_prefixes(vec![vec![0, 0, 0]]).is_err());
    }

    fn random_self_dual(rng: &mut ChaCha8Rng, m: usize) -> NegaPair {
        loop {
            let a: Vec<u8> = (0..m).map(|_| rng.random_range(0..3)).collect();
            let b: Vec<u8> = (0..m).map(|_| rng.random_range(0..3)).collect();
            let p = pair(&a, &b);
            if p.is_self_dual() && !p.ra.is_zero() {
                return reduce_pair(&p);
            }
        }
    }

    #[test]
    fn ring_images_are_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for m in 2..=5 {
            let p = random_self_dual(&mut rng, m);
            for q in ring_images(&p) {
                assert!(q.is_self_dual());
                assert!(are_equivalent_exact(&p.code(), &q.code()).unwrap().is_some(), "{p} vs {q}");
            }
        }
    }

    #[test]
    fn ring_automorphism_counts() {
        let counts: Vec<usize> = (1..=8).map(|m| ring_automorphisms(m).len()).collect();
        assert_eq!(counts, vec![1, 2, 2, 4, 4, 4, 6, 8]);
        for m in 1..=8 {
            let transpose = ring_automorphisms(m).pop().unwrap();
            let r = TritRow::from_trits(&(0..m).map(|i| (i % 3) as u8).collect::<Vec<_>>()).unwrap();
            assert_eq!(apply_ring_map(&r, &transpose), crate::negacirculant::nega_transpose_row(&r));
        }
    }

    #[test]
    fn packed_filter_matches_orbit() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for m in 2..=7 {
            for prefixes in [None, Some(vec![vec![0], vec![1, 1]])] {
                let mut spec = SearchSpec::new(4 * m).unwrap();
                if let Some(p) = prefixes {
                    spec = spec.with_prefixes(p).unwrap();
                }
                let filter = OrbitFilter::new(&spec);
                for _ in 0..40 {
                    let p = random_self_dual(&mut rng, m);
                    let own = pair_rank(&p);
                    let slow = extended_orbit(&p).iter().filter(|q| spec.admits(&q.ra)).all(|q| pair_rank(q) >= own);
                    assert_eq!(filter.is_minimal(pack(&p.ra), pack(&p.rb)), slow, "{p}");
                }
            }
        }
    }

    #[test]
    fn representatives_are_orbit_minimal() {
        let spec = SearchSpec::new(16).unwrap();
        let result = classify_length(&spec, &SearchOptions::default()).unwrap().unwrap();
        assert!(result.class_count > 0);
        for r in &result.representatives {
            assert!(r.pair.is_self_dual());
            assert!(r.min_weight >= spec.target_weight);
            let own = pair_rank(&r.pair);
            assert!(pair_orbit(&r.pair, true).iter().map(reduce_pair).all(|q| pair_rank(&q) >= own));
            assert!(extended_orbit(&r.pair).iter().all(|q| pair_rank(q) >= own));
        }
    }
}
