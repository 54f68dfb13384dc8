//! Rhombic tilings of the regular 2n-gon, their subset vertex labels, flips,
//! and piles.
//!
//! A tiling is stored purely combinatorially: one tile per pair `{i < j}`
//! of [n], each knowing the subset label of its base vertex; the tile's four
//! vertices are then `I`, `I+{i}`, `I+{j}`, `I+{i,j}`. Flips act on the three
//! tiles of a triple `{i < j < k}` when they share a hexagon vertex.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Vertex label: subset of [n] as a bitmask (element `i` is bit `i-1`).
pub type Label = u32;

pub const MAX_N: u8 = 30;

pub fn label_of(elems: &[u8]) -> Label {
    elems.iter().fold(0, |acc, e| acc | 1 << (e - 1))
}

pub fn label_string(label: Label) -> String {
    if label == 0 {
        return "{}".to_string();
    }
    let elems: Vec<String> = (1..=32u8)
        .filter(|e| label >> (e - 1) & 1 == 1)
        .map(|e| e.to_string())
        .collect();
    format!("{{{}}}", elems.join(","))
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum TilingError {
    #[error("n must lie in 3..={max} (got {0})", max = MAX_N)]
    BadN(u8),
    #[error("triple {0:?} is not flippable here")]
    NotFlippable((u8, u8, u8)),
    #[error("permutation is not admissible: 4-subset {0:?} violates the order condition")]
    NotAdmissible([u8; 4]),
    #[error("flip sequence leaves C(n): {0}")]
    InvalidPile(String),
    #[error("invalid tiling: {0}")]
    InvalidTiling(String),
}

/// Direction of a flip: a Delta-crossing becomes a nabla-crossing or back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlipDirection {
    DeltaToNabla,
    NablaToDelta,
}

/// A rhombic tiling of the 2n-gon: base label of the tile for each pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiamondTiling {
    n: u8,
    base: BTreeMap<(u8, u8), Label>,
}

/// Interval `{lo..=hi}` of [n] as a bitmask; empty when `lo > hi`.
fn interval(lo: u8, hi: u8) -> Label {
    if lo > hi {
        0
    } else {
        ((1u32 << hi) - 1) & !((1u32 << (lo - 1)) - 1)
    }
}

impl DiamondTiling {
    pub fn n(&self) -> u8 {
        self.n
    }

    /// The tiling whose vertex labels are exactly the consecutive intervals.
    pub fn minimal(n: u8) -> Result<Self, TilingError> {
        if !(3..=MAX_N).contains(&n) {
            return Err(TilingError::BadN(n));
        }
        let mut base = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                base.insert((i, j), interval(i + 1, j - 1));
            }
        }
        Ok(DiamondTiling { n, base })
    }

    /// The tiling whose vertex labels have consecutive complements.
    pub fn maximal(n: u8) -> Result<Self, TilingError> {
        if !(3..=MAX_N).contains(&n) {
            return Err(TilingError::BadN(n));
        }
        let full = interval(1, n);
        let mut base = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                base.insert((i, j), full & !interval(i, j));
            }
        }
        Ok(DiamondTiling { n, base })
    }

    pub fn tile_base(&self, i: u8, j: u8) -> Label {
        self.base[&(i.min(j), i.max(j))]
    }

    /// The four vertices of the tile for pair `{i, j}` in cyclic order:
    /// I, I+{i}, I+{i,j}, I+{j}.
    pub fn tile_corners(&self, i: u8, j: u8) -> [Label; 4] {
        let b = self.tile_base(i, j);
        let (bi, bj) = (1u32 << (i - 1), 1u32 << (j - 1));
        [b, b | bi, b | bi | bj, b | bj]
    }

    pub fn tiles(&self) -> impl Iterator<Item = ((u8, u8), Label)> + '_ {
        self.base.iter().map(|(&p, &b)| (p, b))
    }

    /// All vertex labels of the tiling.
    pub fn vertex_labels(&self) -> BTreeSet<Label> {
        let mut labels = BTreeSet::new();
        for ((i, j), _) in self.tiles() {
            labels.extend(self.tile_corners(i, j));
        }
        labels
    }

    /// Whether the triple has a Delta-crossing: branch j separates the
    /// crossing of branches i and k from the base vertex, i.e. j lies in the
    /// base label of the {i,k} tile.
    pub fn is_delta(&self, i: u8, j: u8, k: u8) -> bool {
        self.tile_base(i, k) >> (j - 1) & 1 == 1
    }

    /// The shared hexagon vertex of the triple's three tiles, when present.
    pub fn flip_center(&self, i: u8, j: u8, k: u8) -> Option<Label> {
        let sets: [BTreeSet<Label>; 3] = [
            self.tile_corners(i, j).into(),
            self.tile_corners(i, k).into(),
            self.tile_corners(j, k).into(),
        ];
        let common: Vec<Label> = sets[0]
            .iter()
            .filter(|l| sets[1].contains(l) && sets[2].contains(l))
            .copied()
            .collect();
        match common.len() {
            1 => Some(common[0]),
            0 => None,
            _ => unreachable!("three distinct tiles share at most one vertex"),
        }
    }

    /// All currently flippable triples with their direction.
    pub fn flippable(&self) -> Vec<((u8, u8, u8), FlipDirection)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                for k in j + 1..=self.n {
                    if self.flip_center(i, j, k).is_some() {
                        let dir = if self.is_delta(i, j, k) {
                            FlipDirection::DeltaToNabla
                        } else {
                            FlipDirection::NablaToDelta
                        };
                        out.push(((i, j, k), dir));
                    }
                }
            }
        }
        out
    }

    /// Apply the flip at `{i<j<k}`, replacing the hexagon center `I+{j}` by
    /// `I+{i,k}` (Delta to nabla) or conversely.
    pub fn flip(&self, triple: (u8, u8, u8)) -> Result<(DiamondTiling, FlipRecord), TilingError> {
        let (i, j, k) = triple;
        let center = self
            .flip_center(i, j, k)
            .ok_or(TilingError::NotFlippable(triple))?;
        let (bi, bj, bk) = (1u32 << (i - 1), 1u32 << (j - 1), 1u32 << (k - 1));
        let mut next = self.clone();
        let direction;
        let added;
        if self.is_delta(i, j, k) {
            // center is I+{j}; bases become (ij: I+k), (jk: I+i), (ik: I)
            let base = center & !bj;
            direction = FlipDirection::DeltaToNabla;
            added = base | bi | bk;
            next.base.insert((i, j), base | bk);
            next.base.insert((j, k), base | bi);
            next.base.insert((i, k), base);
        } else {
            // center is I+{i,k}; bases become (ij: I), (jk: I), (ik: I+j)
            let base = center & !(bi | bk);
            direction = FlipDirection::NablaToDelta;
            added = base | bj;
            next.base.insert((i, j), base);
            next.base.insert((j, k), base);
            next.base.insert((i, k), base | bj);
        }
        Ok((
            next,
            FlipRecord {
                triple,
                direction,
                removed: center,
                added,
            },
        ))
    }

    /// Structural validation: vertex count, boundary labels, Euler count.
    pub fn validate(&self) -> Result<(), TilingError> {
        let n = self.n;
        let labels = self.vertex_labels();
        let expected = (n as usize) * (n as usize - 1) / 2 + n as usize + 1;
        if labels.len() != expected {
            return Err(TilingError::InvalidTiling(format!(
                "expected {expected} distinct vertex labels, found {}",
                labels.len()
            )));
        }
        for j in 0..=n {
            if !labels.contains(&interval(1, j)) || !labels.contains(&interval(j.max(1), n)) {
                return Err(TilingError::InvalidTiling(
                    "boundary labels are not the consecutive runs".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One step of a pile: which triple flipped, in which direction, and which
/// vertex label was removed/added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipRecord {
    pub triple: (u8, u8, u8),
    pub direction: FlipDirection,
    pub removed: Label,
    pub added: Label,
}

/// A sequence of tilings connected by single flips, stored as the start
/// tiling plus the flip records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pile {
    start: DiamondTiling,
    steps: Vec<FlipRecord>,
}

impl Pile {
    pub fn trivial(start: DiamondTiling) -> Self {
        Pile {
            start,
            steps: Vec::new(),
        }
    }

    /// Apply the given triples in order, starting from `start`.
    pub fn from_flips(
        start: DiamondTiling,
        triples: &[(u8, u8, u8)],
    ) -> Result<Self, TilingError> {
        let mut steps = Vec::with_capacity(triples.len());
        let mut current = start.clone();
        for &t in triples {
            let (next, record) = current.flip(t)?;
            steps.push(record);
            current = next;
        }
        Ok(Pile { start, steps })
    }

    pub fn start(&self) -> &DiamondTiling {
        &self.start
    }

    pub fn steps(&self) -> &[FlipRecord] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn n(&self) -> u8 {
        self.start.n
    }

    /// The tiling after all flips.
    pub fn last_tiling(&self) -> DiamondTiling {
        let mut current = self.start.clone();
        for record in &self.steps {
            current = current.flip(record.triple).expect("recorded flip").0;
        }
        current
    }

    /// Concatenate another pile that starts where this one ends.
    pub fn then(&self, other: &Pile) -> Result<Pile, TilingError> {
        if self.last_tiling() != other.start {
            return Err(TilingError::InvalidPile(
                "concatenation endpoint mismatch".into(),
            ));
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Ok(Pile {
            start: self.start.clone(),
            steps,
        })
    }
}

fn triples(n: u8) -> Vec<(u8, u8, u8)> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                out.push((i, j, k));
            }
        }
    }
    out
}

/// Check the higher-Bruhat admissibility condition: within every 4-subset,
/// the four triples appear in lexicographic or reversed lexicographic order.
pub fn check_admissible(n: u8, sigma: &[(u8, u8, u8)]) -> Result<(), TilingError> {
    let all = triples(n);
    if sigma.len() != all.len() {
        return Err(TilingError::InvalidPile(format!(
            "expected a permutation of all {} triples",
            all.len()
        )));
    }
    let mut pos = BTreeMap::new();
    for (idx, &t) in sigma.iter().enumerate() {
        if pos.insert(t, idx).is_some() {
            return Err(TilingError::InvalidPile(format!("repeated triple {t:?}")));
        }
    }
    for &t in &all {
        if !pos.contains_key(&t) {
            return Err(TilingError::InvalidPile(format!("missing triple {t:?}")));
        }
    }
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                for d in c + 1..=n {
                    let quad = [a, b, c, d];
                    // triples of the 4-subset in lexicographic order
                    let ts = [
                        (a, b, c),
                        (a, b, d),
                        (a, c, d),
                        (b, c, d),
                    ];
                    let ps: Vec<usize> = ts.iter().map(|t| pos[t]).collect();
                    let increasing = ps.windows(2).all(|w| w[0] < w[1]);
                    let decreasing = ps.windows(2).all(|w| w[0] > w[1]);
                    if !increasing && !decreasing {
                        return Err(TilingError::NotAdmissible(quad));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Realize an admissible permutation of the triples as the unique pile from
/// the minimal to the maximal tiling with that flip order.
pub fn pile_from_admissible(n: u8, sigma: &[(u8, u8, u8)]) -> Result<Pile, TilingError> {
    check_admissible(n, sigma)?;
    let pile = Pile::from_flips(DiamondTiling::minimal(n)?, sigma)?;
    if pile.last_tiling() != DiamondTiling::maximal(n)? {
        return Err(TilingError::InvalidPile(
            "admissible sequence did not reach the maximal tiling".into(),
        ));
    }
    Ok(pile)
}

/// The pile whose flips run through all triples in lexicographic order; its
/// first C(n-1, 2) flips are the triples containing 1, and their bottom
/// vertices all lie on the start tiling.
pub fn lex_standard_pile(n: u8) -> Result<Pile, TilingError> {
    if !(3..=8).contains(&n) {
        return Err(TilingError::BadN(n));
    }
    pile_from_admissible(n, &triples(n))
}

/// All piles from the minimal to the maximal tiling of length C(n,3),
/// enumerated by depth-first descent over Delta-to-nabla flips. Exponential;
/// intended for small n.
pub fn enumerate_min_to_max_piles(n: u8) -> Result<Vec<Pile>, TilingError> {
    let start = DiamondTiling::minimal(n)?;
    let total = triples(n).len();
    let mut out = Vec::new();
    let mut stack: Vec<(u8, u8, u8)> = Vec::new();
    fn descend(
        tiling: &DiamondTiling,
        stack: &mut Vec<(u8, u8, u8)>,
        total: usize,
        start: &DiamondTiling,
        out: &mut Vec<Pile>,
    ) {
        let moves: Vec<(u8, u8, u8)> = tiling
            .flippable()
            .into_iter()
            .filter(|(_, d)| *d == FlipDirection::DeltaToNabla)
            .map(|(t, _)| t)
            .collect();
        if moves.is_empty() {
            if stack.len() == total {
                out.push(Pile::from_flips(start.clone(), stack).expect("replayed flips"));
            }
            return;
        }
        for t in moves {
            let (next, _) = tiling.flip(t).expect("flippable");
            stack.push(t);
            descend(&next, stack, total, start, out);
            stack.pop();
        }
    }
    descend(&start, &mut stack, total, &start, &mut out);
    Ok(out)
}

impl fmt::Display for DiamondTiling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiamondTiling(n={}, labels=", self.n)?;
        let labels: Vec<String> = self.vertex_labels().iter().map(|&l| label_string(l)).collect();
        write!(f, "{})", labels.join(" "))
    }
}

#[derive(Serialize, Deserialize)]
struct TileJson {
    pair: [u8; 2],
    base: Label,
}

#[derive(Serialize, Deserialize)]
struct TilingJson {
    n: u8,
    tiles: Vec<TileJson>,
}

impl Serialize for DiamondTiling {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TilingJson {
            n: self.n,
            tiles: self
                .tiles()
                .map(|((i, j), base)| TileJson { pair: [i, j], base })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiamondTiling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = TilingJson::deserialize(d)?;
        if !(3..=MAX_N).contains(&raw.n) {
            return Err(serde::de::Error::custom(TilingError::BadN(raw.n)));
        }
        let mut base = BTreeMap::new();
        for t in raw.tiles {
            let (i, j) = (t.pair[0], t.pair[1]);
            if i == 0 || j == 0 || i >= j || j > raw.n {
                return Err(serde::de::Error::custom(TilingError::InvalidTiling(
                    format!("bad pair {:?}", t.pair),
                )));
            }
            if base.insert((i, j), t.base).is_some() {
                return Err(serde::de::Error::custom(TilingError::InvalidTiling(
                    format!("repeated pair {:?}", t.pair),
                )));
            }
        }
        if base.len() != (raw.n as usize) * (raw.n as usize - 1) / 2 {
            return Err(serde::de::Error::custom(TilingError::InvalidTiling(
                "wrong tile count".into(),
            )));
        }
        let tiling = DiamondTiling { n: raw.n, base };
        tiling.validate().map_err(serde::de::Error::custom)?;
        Ok(tiling)
    }
}

#[derive(Serialize, Deserialize)]
struct PileJson {
    start: DiamondTiling,
    flips: Vec<[u8; 3]>,
}

impl Serialize for Pile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PileJson {
            start: self.start.clone(),
            flips: self
                .steps
                .iter()
                .map(|r| [r.triple.0, r.triple.1, r.triple.2])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PileJson::deserialize(d)?;
        let triples: Vec<(u8, u8, u8)> = raw.flips.iter().map(|f| (f[0], f[1], f[2])).collect();
        Pile::from_flips(raw.start, &triples).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_tiling_labels_n4() {
        let t = DiamondTiling::minimal(4).unwrap();
        t.validate().unwrap();
        let expected: BTreeSet<Label> = [
            label_of(&[]),
            label_of(&[1]),
            label_of(&[1, 2]),
            label_of(&[1, 2, 3]),
            label_of(&[1, 2, 3, 4]),
            label_of(&[2, 3, 4]),
            label_of(&[3, 4]),
            label_of(&[4]),
            label_of(&[2]),
            label_of(&[3]),
            label_of(&[2, 3]),
        ]
        .into();
        assert_eq!(t.vertex_labels(), expected);
    }

    #[test]
    fn maximal_tiling_contains_cointervals_n4() {
        let t = DiamondTiling::maximal(4).unwrap();
        t.validate().unwrap();
        let labels = t.vertex_labels();
        for l in [label_of(&[1, 4]), label_of(&[1, 3, 4]), label_of(&[1, 2, 4])] {
            assert!(labels.contains(&l));
        }
    }

    #[test]
    fn minimal_n3_has_one_interior_vertex() {
        let t = DiamondTiling::minimal(3).unwrap();
        t.validate().unwrap();
        // boundary has 2n = 6 labels; total 3+3+1 = 7; interior = {2}
        let labels = t.vertex_labels();
        assert_eq!(labels.len(), 7);
        assert!(labels.contains(&label_of(&[2])));
        assert_eq!(t.flippable().len(), 1);
    }

    #[test]
    fn flippable_counts_and_directions() {
        let tmin = DiamondTiling::minimal(4).unwrap();
        let flips = tmin.flippable();
        assert_eq!(flips.len(), 2);
        assert!(flips
            .iter()
            .all(|(_, d)| *d == FlipDirection::DeltaToNabla));

        let tmax = DiamondTiling::maximal(4).unwrap();
        let flips = tmax.flippable();
        assert_eq!(flips.len(), 2);
        assert!(flips
            .iter()
            .all(|(_, d)| *d == FlipDirection::NablaToDelta));
    }

    #[test]
    fn flip_replaces_center_and_is_involutive() {
        let tmin = DiamondTiling::minimal(4).unwrap();
        let (t1, record) = tmin.flip((1, 2, 3)).unwrap();
        assert_eq!(record.removed, label_of(&[2]));
        assert_eq!(record.added, label_of(&[1, 3]));
        let before = tmin.vertex_labels();
        let after = t1.vertex_labels();
        assert!(after.contains(&label_of(&[1, 3])) && !after.contains(&label_of(&[2])));
        assert_eq!(before.difference(&after).count(), 1);
        assert_eq!(after.difference(&before).count(), 1);
        // exactly three tile bases change
        let changed = tmin
            .tiles()
            .filter(|((i, j), b)| t1.tile_base(*i, *j) != *b)
            .count();
        assert_eq!(changed, 3);

        let (t2, _) = t1.flip((1, 2, 3)).unwrap();
        assert_eq!(t2, tmin);
    }

    #[test]
    fn admissible_piles_n4() {
        let p1 = pile_from_admissible(4, &[(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]).unwrap();
        assert_eq!(p1.len(), 4);
        assert_eq!(p1.last_tiling(), DiamondTiling::maximal(4).unwrap());

        let p2 = pile_from_admissible(4, &[(2, 3, 4), (1, 3, 4), (1, 2, 4), (1, 2, 3)]).unwrap();
        assert_eq!(p2.last_tiling(), DiamondTiling::maximal(4).unwrap());

        assert_eq!(
            pile_from_admissible(4, &[(1, 2, 3), (1, 3, 4), (1, 2, 4), (2, 3, 4)]),
            Err(TilingError::NotAdmissible([1, 2, 3, 4]))
        );
    }

    #[test]
    fn c4_has_exactly_two_piles() {
        let piles = enumerate_min_to_max_piles(4).unwrap();
        assert_eq!(piles.len(), 2);
        for p in &piles {
            assert_eq!(p.len(), 4);
        }
    }

    #[test]
    fn lex_pile_prefix_contains_one() {
        let p = lex_standard_pile(4).unwrap();
        let seq: Vec<(u8, u8, u8)> = p.steps().iter().map(|r| r.triple).collect();
        assert_eq!(seq, vec![(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]);
        for r in p.steps().iter().take(3) {
            assert_eq!(r.triple.0, 1);
        }

        let p5 = lex_standard_pile(5).unwrap();
        for r in p5.steps().iter().take(6) {
            assert_eq!(r.triple.0, 1);
        }
        assert_eq!(p5.len(), 10);
    }

    /// Interior vertex count of any tiling of P_n is C(n-1, 2).
    #[test]
    fn interior_vertex_count() {
        for n in 3..=7u8 {
            let t = DiamondTiling::minimal(n).unwrap();
            let total = t.vertex_labels().len();
            let boundary = 2 * n as usize;
            assert_eq!(
                total - boundary,
                (n as usize - 1) * (n as usize - 2) / 2,
                "n = {n}"
            );
        }
    }

    #[test]
    fn label_algebra_on_every_tile() {
        let mut t = DiamondTiling::minimal(5).unwrap();
        for step in 0..4 {
            for ((i, j), base) in t.clone().tiles() {
                let (bi, bj) = (1u32 << (i - 1), 1u32 << (j - 1));
                assert_eq!(base & (bi | bj), 0, "base must avoid its own pair");
                let corners = t.tile_corners(i, j);
                assert_eq!(corners[0] ^ corners[2], bi | bj);
                assert_eq!(corners[1] ^ corners[3], bi | bj);
            }
            let (next, _) = t.flip(t.flippable()[step % t.flippable().len()].0).unwrap();
            t = next;
        }
    }

    #[test]
    fn tiling_json_round_trip() {
        let t = DiamondTiling::minimal(5).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let back: DiamondTiling = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);

        let p = lex_standard_pile(4).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: Pile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
