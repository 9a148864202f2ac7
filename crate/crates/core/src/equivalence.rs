//! Monomial equivalence of ternary codes.
//!
//! Two codes are equivalent when one is carried onto the other by permuting
//! coordinates and multiplying some of them by 2. The exact test encodes a
//! code as a hypergraph on its `2n` signed coordinates: point `2i` stands for
//! "coordinate `i` holds 1" and point `2i + 1` for "coordinate `i` holds 2".
//! Every coordinate contributes a pairing block `{2i, 2i + 1}`, and every
//! low-weight codeword (both signs) contributes the block of its signed
//! nonzero coordinates. Hypergraph isomorphisms preserve pairing blocks, so
//! they are exactly monomial maps carrying one codeword set onto the other.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::canon::{canonical_form, Hypergraph};
use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::gf3::{Trit, TritMatrix, TritVector};
use crate::infoset::{codewords_up_to_weight, min_weight};
use crate::negacirculant::{nega_transpose_row, NegaPair};

/// Cap on the number of codewords fed into one equivalence hypergraph.
pub const MAX_GRAPH_WORDS: usize = 400_000;

/// Coordinate `i` moves to `perm[i]` and is multiplied by `scale[i]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonomialMap {
    perm: Vec<usize>,
    scale: TritVector,
}

impl MonomialMap {
    pub fn new(perm: Vec<usize>, scale: TritVector) -> Result<Self> {
        let n = perm.len();
        if scale.len() != n {
            return Err(Error::Dimension { expected: n, found: scale.len() });
        }
        if scale.weight() != n {
            return Err(Error::InvalidInput("monomial scale entries must be nonzero".into()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(MonomialMap { perm, scale })
    }

    pub fn identity(n: usize) -> Self {
        MonomialMap { perm: (0..n).collect(), scale: TritVector::filled(n, Trit::ONE) }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn scale(&self) -> &TritVector {
        &self.scale
    }

    pub fn apply(&self, v: &TritVector) -> Result<TritVector> {
        if v.len() != self.len() {
            return Err(Error::Dimension { expected: self.len(), found: v.len() });
        }
        let mut out = TritVector::zero(v.len());
        for (i, &p) in self.perm.iter().enumerate() {
            out.set(p, v.get(i) * self.scale.get(i));
        }
        Ok(out)
    }

    /// `self` followed by `then`.
    pub fn compose(&self, then: &MonomialMap) -> Result<MonomialMap> {
        if then.len() != self.len() {
            return Err(Error::Dimension { expected: self.len(), found: then.len() });
        }
        let mut scale = TritVector::zero(self.len());
        let perm = (0..self.len())
            .map(|i| {
                let mid = self.perm[i];
                scale.set(i, self.scale.get(i) * then.scale.get(mid));
                then.perm[mid]
            })
            .collect();
        Ok(MonomialMap { perm, scale })
    }

    pub fn inverse(&self) -> MonomialMap {
        let n = self.len();
        let mut perm = vec![0; n];
        let mut scale = TritVector::zero(n);
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
            scale.set(p, self.scale.get(i).inverse().expect("scale entries are nonzero"));
        }
        MonomialMap { perm, scale }
    }
}

impl fmt::Debug for MonomialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonomialMap{{perm: {:?}, scale: {}}}", self.perm, self.scale)
    }
}

pub fn apply_monomial(c: &LinearCode, m: &MonomialMap) -> Result<LinearCode> {
    if m.len() != c.n() {
        return Err(Error::Dimension { expected: c.n(), found: m.len() });
    }
    let rows = c.generator().rows().iter().map(|r| m.apply(r)).collect::<Result<Vec<_>>>()?;
    LinearCode::from_rows(c.n(), rows)
}

/// Closure of `p` under row swap, doubling either row and, for self-dual
/// pairs, transposing either row. Sorted and without repeats.
pub fn pair_orbit(p: &NegaPair, self_dual: bool) -> Vec<NegaPair> {
    let mut orbit = vec![*p];
    let mut i = 0;
    while i < orbit.len() {
        let q = orbit[i];
        let mut next = vec![
            NegaPair::new(q.rb, q.ra).expect("rows share a length"),
            NegaPair::new(q.ra.scale(Trit::TWO), q.rb).expect("rows share a length"),
            NegaPair::new(q.ra, q.rb.scale(Trit::TWO)).expect("rows share a length"),
        ];
        if self_dual {
            next.push(NegaPair::new(nega_transpose_row(&q.ra), q.rb).expect("rows share a length"));
            next.push(NegaPair::new(q.ra, nega_transpose_row(&q.rb)).expect("rows share a length"));
        }
        for r in next {
            if !orbit.contains(&r) {
                orbit.push(r);
            }
        }
        i += 1;
    }
    orbit.sort_by_key(pair_key);
    orbit
}

fn pair_key(p: &NegaPair) -> (Vec<u8>, Vec<u8>) {
    (p.ra.to_trits(), p.rb.to_trits())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodeFingerprint {
    pub n: usize,
    pub k: usize,
    pub min_weight: usize,
    pub min_weight_count: u64,
    /// Hex SHA-256 of the sorted per-coordinate support degrees.
    pub support_multiset_hash: String,
    /// Intersection size to number of unordered pairs of distinct supports.
    pub pair_intersection_histogram: BTreeMap<usize, u64>,
    /// Hex SHA-256 of the sorted list of per-support intersection counts.
    pub intersection_profile_hash: String,
}

/// Monomial-invariant summary of the minimum-weight codewords.
pub fn fingerprint(c: &LinearCode) -> Result<CodeFingerprint> {
    let d = min_weight(c);
    let words = bounded_words(c, d)?;
    let mut supports: Vec<u128> = words.iter().map(TritVector::support).collect();
    supports.sort_unstable();
    supports.dedup();

    let mut degree = vec![0u64; c.n()];
    for s in &supports {
        let mut bits = *s;
        while bits != 0 {
            degree[bits.trailing_zeros() as usize] += 1;
            bits &= bits - 1;
        }
    }
    degree.sort_unstable();
    let digest = Sha256::digest(degree.iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<u8>>());

    // Intersection-size counts per support, then their sorted multiset.
    let width = c.n() + 1;
    let profile: Vec<u32> = supports
        .par_iter()
        .flat_map_iter(|a| {
            let mut row = vec![0u32; width];
            for b in &supports {
                row[(a & b).count_ones() as usize] += 1;
            }
            // Drop the support's intersection with itself.
            row[a.count_ones() as usize] -= 1;
            row
        })
        .collect();
    let mut hist = vec![0u64; width];
    let mut rows: Vec<&[u32]> = profile.chunks(width).collect();
    for r in &rows {
        for (k, &x) in r.iter().enumerate() {
            hist[k] += u64::from(x);
        }
    }
    rows.sort_unstable();
    let profile_digest = Sha256::digest(rows.iter().flat_map(|r| r.iter().flat_map(|x| x.to_le_bytes())).collect::<Vec<u8>>());
    Ok(CodeFingerprint {
        n: c.n(),
        k: c.k(),
        min_weight: d,
        min_weight_count: 2 * words.len() as u64,
        support_multiset_hash: digest.iter().map(|b| format!("{b:02x}")).collect(),
        pair_intersection_histogram: hist.into_iter().enumerate().filter(|&(_, h)| h > 0).map(|(k, h)| (k, h / 2)).collect(),
        intersection_profile_hash: profile_digest.iter().map(|b| format!("{b:02x}")).collect(),
    })
}

fn bounded_words(c: &LinearCode, max_weight: usize) -> Result<Vec<TritVector>> {
    let words = codewords_up_to_weight(c, max_weight);
    if words.len() > MAX_GRAPH_WORDS {
        return Err(Error::Budget(format!(
            "{} codewords of weight at most {max_weight}, limit {MAX_GRAPH_WORDS}",
            words.len()
        )));
    }
    Ok(words)
}

/// Canonical form of a code under monomial equivalence.
#[derive(Clone, Debug)]
pub struct CanonicalCertificate {
    /// Canonical label of each signed coordinate point.
    pub canonical_labeling: Vec<u32>,
    pub canonical_digest: [u8; 32],
    /// Largest codeword weight included in the hypergraph.
    pub spanning_weight: usize,
    certificate: Vec<u32>,
}

impl CanonicalCertificate {
    pub fn digest_hex(&self) -> String {
        self.canonical_digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl PartialEq for CanonicalCertificate {
    fn eq(&self, other: &Self) -> bool {
        self.spanning_weight == other.spanning_weight && self.certificate == other.certificate
    }
}

impl Eq for CanonicalCertificate {}

/// Smallest weight `w` such that the codewords of weight at most `w` span
/// the code, with those codewords.
pub fn spanning_codewords(c: &LinearCode) -> Result<(usize, Vec<TritVector>)> {
    let mut w = min_weight(c);
    loop {
        let words = bounded_words(c, w)?;
        if TritMatrix::from_rows(c.n(), words.clone())?.rank() == c.k() {
            return Ok((w, words));
        }
        w += 1;
    }
}

fn code_hypergraph(n: usize, words: &[TritVector]) -> Hypergraph {
    let mut h = Hypergraph::new(vec![0; 2 * n]);
    for i in 0..n as u32 {
        h.add_block(0, [2 * i, 2 * i + 1]);
    }
    for v in words {
        for s in [*v, v.negated()] {
            let points = (0..n).filter(|&i| !s.get(i).is_zero()).map(|i| (2 * i + (s.get(i) == Trit::TWO) as usize) as u32);
            h.add_block(1 + s.weight() as u32, points);
        }
    }
    h
}

pub fn canonical_certificate(c: &LinearCode) -> Result<CanonicalCertificate> {
    let (w, words) = spanning_codewords(c)?;
    let form = canonical_form(&code_hypergraph(c.n(), &words))?;
    let mut hasher = Sha256::new();
    hasher.update((w as u64).to_le_bytes());
    hasher.update(form.digest);
    Ok(CanonicalCertificate {
        canonical_labeling: form.labeling,
        canonical_digest: hasher.finalize().into(),
        spanning_weight: w,
        certificate: form.certificate,
    })
}

/// Monomial map carrying the code behind `a` onto the code behind `b`,
/// read off two equal certificates.
fn witness(a: &CanonicalCertificate, b: &CanonicalCertificate) -> MonomialMap {
    let mut inverse_b = vec![0u32; b.canonical_labeling.len()];
    for (p, &l) in b.canonical_labeling.iter().enumerate() {
        inverse_b[l as usize] = p as u32;
    }
    let n = a.canonical_labeling.len() / 2;
    let mut perm = vec![0; n];
    let mut scale = TritVector::zero(n);
    for i in 0..n {
        let target = inverse_b[a.canonical_labeling[2 * i] as usize] as usize;
        perm[i] = target / 2;
        scale.set(i, if target % 2 == 0 { Trit::ONE } else { Trit::TWO });
    }
    MonomialMap { perm, scale }
}

fn verified_witness(
    c1: &LinearCode,
    a: &CanonicalCertificate,
    c2: &LinearCode,
    b: &CanonicalCertificate,
) -> Result<MonomialMap> {
    let m = witness(a, b);
    if !apply_monomial(c1, &m)?.same_code(c2) {
        return Err(Error::InvalidInput(format!("equal certificates but witness {m:?} fails")));
    }
    Ok(m)
}

/// `Some(map)` with `c1 · map = c2` when the codes are equivalent.
pub fn are_equivalent_exact(c1: &LinearCode, c2: &LinearCode) -> Result<Option<MonomialMap>> {
    if c1.n() != c2.n() || c1.k() != c2.k() {
        return Ok(None);
    }
    let a = canonical_certificate(c1)?;
    let b = canonical_certificate(c2)?;
    if a != b {
        return Ok(None);
    }
    verified_witness(c1, &a, c2, &b).map(Some)
}

/// Brute-force equivalence over every monomial map, for tiny lengths.
pub fn are_equivalent_by_exhaustion(c1: &LinearCode, c2: &LinearCode) -> Result<Option<MonomialMap>> {
    const MAX_N: usize = 9;
    let n = c1.n();
    if n > MAX_N {
        return Err(Error::Budget(format!("exhaustive monomial search limited to length {MAX_N}")));
    }
    if c2.n() != n || c1.k() != c2.k() {
        return Ok(None);
    }
    let index = |v: &TritVector| (0..n).rev().fold(0usize, |acc, i| acc * 3 + v.get(i).value() as usize);
    let mut member = vec![false; 3usize.pow(n as u32)];
    crate::code::for_each_nonzero_codeword(c2, |v| member[index(v)] = true);
    let rows = c1.generator().rows();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        // The overall sign is irrelevant, so coordinate 0 keeps scale 1.
        for signs in 0u32..1 << n.saturating_sub(1) {
            let scale_of = |i: usize| if i > 0 && signs >> (i - 1) & 1 == 1 { Trit::TWO } else { Trit::ONE };
            let hit = rows.iter().all(|r| {
                let idx: usize = perm
                    .iter()
                    .enumerate()
                    .map(|(i, &to)| (r.get(i) * scale_of(i)).value() as usize * 3usize.pow(to as u32))
                    .sum();
                member[idx]
            });
            if hit {
                let mut scale = TritVector::zero(n);
                for i in 0..n {
                    scale.set(i, scale_of(i));
                }
                return Ok(Some(MonomialMap { perm, scale }));
            }
        }
        if !next_permutation(&mut perm) {
            return Ok(None);
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("a larger element exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// One equivalence class, as indices into the classified list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceClass {
    /// Increasing; the first member is the representative.
    pub members: Vec<usize>,
}

impl EquivalenceClass {
    pub fn representative(&self) -> usize {
        self.members[0]
    }
}

/// Partitions `codes` into equivalence classes, ordered by smallest member
/// index. Fingerprints split the input first; canonical forms are computed
/// only inside buckets with more than one code, and every merge is checked
/// with an explicit witness map.
pub fn classify_up_to_equivalence(codes: &[LinearCode]) -> Result<Vec<EquivalenceClass>> {
    let prints = codes.par_iter().map(fingerprint).collect::<Result<Vec<_>>>()?;
    let mut buckets: FxHashMap<&CodeFingerprint, Vec<usize>> = FxHashMap::default();
    for (i, f) in prints.iter().enumerate() {
        buckets.entry(f).or_default().push(i);
    }
    let mut crowded: Vec<Vec<usize>> = Vec::new();
    let mut classes: Vec<EquivalenceClass> = Vec::new();
    for members in buckets.into_values() {
        if members.len() == 1 {
            classes.push(EquivalenceClass { members });
        } else {
            crowded.push(members);
        }
    }
    let needs_cert: Vec<usize> = crowded.iter().flatten().copied().collect();
    let certs = needs_cert
        .par_iter()
        .map(|&i| canonical_certificate(&codes[i]).map(|c| (i, c)))
        .collect::<Result<FxHashMap<usize, CanonicalCertificate>>>()?;
    for members in crowded {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in members {
            match groups.iter_mut().find(|g| certs[&g[0]] == certs[&i]) {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        for g in groups {
            for &i in &g[1..] {
                verified_witness(&codes[g[0]], &certs[&g[0]], &codes[i], &certs[&i])?;
            }
            classes.push(EquivalenceClass { members: g });
        }
    }
    for c in &mut classes {
        c.members.sort_unstable();
    }
    classes.sort_by_key(EquivalenceClass::representative);
    Ok(classes)
}
