//! Signed principal and almost-principal minor arrays of symmetric matrices,
//! the realizability decision for 2^n-tuples, and reconstruction of a matrix
//! from a realizable tuple.
//!
//! The sign convention puts `(-1)^{|I|/2 floor} det M_I^I` at subset `I`; an
//! almost-principal minor `det M_{I+i}^{I+j}` is odd when
//! `(i - j)(-1)^{|I|} > 0`.

use crate::complex::{Complex02Field, ComplexError, ComplexField, DirectedComplex};
use crate::exec;
use crate::kashaev::{kashaev_k, kashaev_kv};
use crate::scalar::Scalar;
use crate::tiling::{label_string, Label, Pile};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum MinorsError {
    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
    #[error("tuple must have x_empty = 1")]
    BadBase,
    #[error("tuple is not generic: L_{{{}, {{{},{}}}}} = 0", label_string(*.0), .1, .2)]
    Ungeneric(Label, u8, u8),
    #[error("tuple fails the realizability test at {0}")]
    NotRealizable(String),
    #[error("off-diagonal entry m_1{0} is degenerate")]
    DegenerateOffDiagonal(usize),
    #[error("matrix has a vanishing minor on label {}", label_string(*.0))]
    ZeroMinor(Label),
    #[error("vertex {0} has no usable subset label")]
    UnlabeledVertex(usize),
    #[error("tuple size mismatch: expected 2^{0} entries")]
    WrongSize(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Square symmetric matrix of scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    rows: Vec<Vec<Scalar>>,
}

impl SymMatrix {
    pub fn new(rows: Vec<Vec<Scalar>>) -> Result<Self, MinorsError> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MinorsError::NotSymmetric(i, row.len()));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(MinorsError::NotSymmetric(i, j));
                }
            }
        }
        Ok(SymMatrix { n, rows })
    }

    /// General (not necessarily symmetric) matrices are allowed where the
    /// caller explicitly wants them, e.g. negative controls.
    pub fn new_unchecked(rows: Vec<Vec<Scalar>>) -> Self {
        SymMatrix {
            n: rows.len(),
            rows,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.rows[i][j] == self.rows[j][i]))
    }

    /// Minor on the given row and column index sets (0-based, same length).
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Scalar {
        assert_eq!(rows.len(), cols.len());
        let m: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| self.rows[r][c].clone()).collect())
            .collect();
        det(m)
    }

    /// Principal minor on the subset encoded by `label` (element i of [n] is
    /// bit i-1). The empty minor is 1.
    pub fn principal_minor(&self, label: Label) -> Scalar {
        let idx: Vec<usize> = (0..self.n).filter(|i| label >> i & 1 == 1).collect();
        self.minor(&idx, &idx)
    }
}

/// Determinant by Gaussian elimination; exact on rational entries, partial
/// pivoting on floats.
pub fn det(mut m: Vec<Vec<Scalar>>) -> Scalar {
    let n = m.len();
    if n == 0 {
        return Scalar::one();
    }
    let float = m.iter().flatten().any(|v| !v.is_exact());
    let mut result = Scalar::one();
    for col in 0..n {
        let pivot_row = if float {
            (col..n).max_by(|&a, &b| {
                m[a][col]
                    .to_f64()
                    .abs()
                    .partial_cmp(&m[b][col].to_f64().abs())
                    .unwrap()
            })
        } else {
            (col..n).find(|&r| !m[r][col].is_zero())
        };
        let Some(p) = pivot_row else {
            return Scalar::zero();
        };
        if m[p][col].is_zero() {
            return Scalar::zero();
        }
        if p != col {
            m.swap(p, col);
            result = -result;
        }
        let pivot = m[col][col].clone();
        result = &result * &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..n {
                m[r][c] = &m[r][c] - &(&factor * &m[col][c]);
            }
        }
    }
    result
}

/// All 2^n signed principal minors of a matrix, indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorTuple {
    n: usize,
    entries: Vec<Scalar>,
}

impl MinorTuple {
    pub fn new(n: usize, entries: Vec<Scalar>) -> Result<Self, MinorsError> {
        if entries.len() != 1 << n {
            return Err(MinorsError::WrongSize(n));
        }
        Ok(MinorTuple { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, label: Label) -> &Scalar {
        &self.entries[label as usize]
    }

    pub fn set(&mut self, label: Label, value: Scalar) {
        self.entries[label as usize] = value;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|v| v.is_exact())
    }
}

fn half_floor_sign(cardinality: u32) -> Scalar {
    if (cardinality / 2) % 2 == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

/// `x_I = (-1)^{|I|/2 floor} det M_I^I` for every `I`.
pub fn signed_minor_tuple(m: &SymMatrix) -> MinorTuple {
    let labels: Vec<Label> = (0..1u32 << m.n()).collect();
    let entries = exec::map_collect(&labels, |&label| {
        &half_floor_sign(label.count_ones()) * &m.principal_minor(label)
    });
    MinorTuple {
        n: m.n(),
        entries,
    }
}

/// `L_{I,{i,j}} = x_I x_{I^{ij}} + x_{I^i} x_{I^j}` (superscripts denote
/// symmetric difference). Elements are 1-based.
pub fn l_term(t: &MinorTuple, label: Label, i: u8, j: u8) -> Scalar {
    assert!(i != j);
    let (bi, bj) = (1u32 << (i - 1), 1u32 << (j - 1));
    &(t.get(label) * t.get(label ^ bi ^ bj)) + &(t.get(label ^ bi) * t.get(label ^ bj))
}

fn minor_cube(t: &MinorTuple, label: Label, i: u8, j: u8, k: u8) -> [Scalar; 8] {
    let toggles = [1u32 << (i - 1), 1u32 << (j - 1), 1u32 << (k - 1)];
    std::array::from_fn(|bits| {
        let mut l = label;
        for (a, tg) in toggles.iter().enumerate() {
            if bits >> a & 1 == 1 {
                l ^= tg;
            }
        }
        t.get(l).clone()
    })
}

/// `K^{I,{i,j,k}}` and `K_{I,{i,j,k}}`: the Kashaev polynomial and its corner
/// derivative on the cube of values `x_{I Δ S}`, `S ⊆ {i,j,k}`, with the
/// derivative taken at the corner holding `x_I`.
pub fn k_terms(t: &MinorTuple, label: Label, i: u8, j: u8, k: u8) -> (Scalar, Scalar) {
    let cube = minor_cube(t, label, i, j, k);
    (kashaev_k(&cube), kashaev_kv(&cube, 0))
}

fn triples(n: usize) -> Vec<(u8, u8, u8)> {
    let mut out = Vec::new();
    for i in 1..=n as u8 {
        for j in i + 1..=n as u8 {
            for k in j + 1..=n as u8 {
                out.push((i, j, k));
            }
        }
    }
    out
}

fn quads(n: usize) -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    for a in 1..=n as u8 {
        for b in a + 1..=n as u8 {
            for c in b + 1..=n as u8 {
                for d in c + 1..=n as u8 {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Verdict of the realizability test, with the first violated identity as a
/// certificate on failure.
#[derive(Debug, Clone, PartialEq)]
pub enum Realizability {
    Pass,
    Fail { certificate: String },
}

impl Realizability {
    pub fn passed(&self) -> bool {
        matches!(self, Realizability::Pass)
    }
}

/// Decide whether the tuple consists of the signed principal minors of some
/// symmetric matrix: all cube identities `K^{I,J} = 0` must hold, and for
/// every `I` and 4-subset `A`, the product of the four corner derivatives
/// over triples of `A` must equal the product of the six `L` terms over
/// pairs of `A`. Requires `x_empty = 1` and all `L` terms nonzero.
pub fn realizability_test(t: &MinorTuple) -> Result<Realizability, MinorsError> {
    if t.get(0) != &Scalar::one() {
        return Err(MinorsError::BadBase);
    }
    let n = t.n();
    for label in 0..1u32 << n {
        for i in 1..=n as u8 {
            for j in i + 1..=n as u8 {
                if l_term(t, label, i, j).is_zero() {
                    return Err(MinorsError::Ungeneric(label, i, j));
                }
            }
        }
    }
    let labels: Vec<Label> = (0..1u32 << n).collect();
    let trips = triples(n);
    let qs = quads(n);
    let per_label: Vec<Option<String>> = exec::map_collect(&labels, |&label| {
        for &(i, j, k) in &trips {
            let (kc, _) = k_terms(t, label, i, j, k);
            if !kc.is_zero() {
                return Some(format!(
                    "K^({},{{{i},{j},{k}}}) = {kc}",
                    label_string(label)
                ));
            }
        }
        for quad in &qs {
            let mut lhs = Scalar::one();
            for (a, b, c) in [
                (quad[0], quad[1], quad[2]),
                (quad[0], quad[1], quad[3]),
                (quad[0], quad[2], quad[3]),
                (quad[1], quad[2], quad[3]),
            ] {
                let (_, kv) = k_terms(t, label, a, b, c);
                lhs = &lhs * &kv;
            }
            let mut rhs = Scalar::one();
            for x in 0..4 {
                for y in x + 1..4 {
                    rhs = &rhs * &l_term(t, label, quad[x], quad[y]);
                }
            }
            if lhs != rhs {
                return Some(format!(
                    "product identity at ({}, {{{},{},{},{}}})",
                    label_string(label),
                    quad[0],
                    quad[1],
                    quad[2],
                    quad[3]
                ));
            }
        }
        None
    });
    match per_label.into_iter().flatten().next() {
        None => Ok(Realizability::Pass),
        Some(certificate) => Ok(Realizability::Fail { certificate }),
    }
}

/// Rebuild a symmetric matrix from a realizable tuple, in float mode.
///
/// Diagonal entries come straight from the singleton minors; `m_{1j}` is the
/// principal square root of `L_{∅,{1,j}}`; the remaining entries are solved
/// from the 3x3 principal minors, which are linear in `m_{jk}` once `m_jk²`
/// is substituted from the 2x2 minor. The result is unique up to diagonal
/// ±1 conjugation, fixed by `m_{1j} >= 0`.
pub fn reconstruct_symmetric(t: &MinorTuple) -> Result<SymMatrix, MinorsError> {
    match realizability_test(t)? {
        Realizability::Pass => {}
        Realizability::Fail { certificate } => {
            return Err(MinorsError::NotRealizable(certificate));
        }
    }
    let n = t.n();
    let mut m = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        m[i][i] = t.get(1 << i).to_f64();
    }
    for j in 1..n {
        let l = l_term(t, 0, 1, j as u8 + 1).to_f64();
        if l < 0.0 {
            return Err(MinorsError::DegenerateOffDiagonal(j + 1));
        }
        m[0][j] = l.sqrt();
        m[j][0] = m[0][j];
        if m[0][j] == 0.0 {
            return Err(MinorsError::DegenerateOffDiagonal(j + 1));
        }
    }
    for j in 1..n {
        for k in j + 1..n {
            // minor on {1,j,k}: expand and use m_jk^2 = m_jj m_kk + x_{jk}
            let x_jk = t.get(1 << j | 1 << k).to_f64();
            let x_1jk = t.get(1 | 1 << j | 1 << k).to_f64();
            let numer = -x_1jk + m[0][0] * x_jk + m[j][j] * m[0][k] * m[0][k]
                + m[k][k] * m[0][j] * m[0][j];
            m[j][k] = numer / (2.0 * m[0][j] * m[0][k]);
            m[k][j] = m[j][k];
        }
    }
    let rows = m
        .into_iter()
        .map(|row| row.into_iter().map(Scalar::from_f64).collect())
        .collect();
    SymMatrix::new(rows)
}

/// Place tuple entries on the labeled vertices of a complex.
pub fn tuple_on_complex(
    t: &MinorTuple,
    complex: &DirectedComplex,
) -> Result<ComplexField, MinorsError> {
    let mut field = ComplexField::new();
    for v in 0..complex.vertex_count() {
        let label = complex.label(v).ok_or(MinorsError::UnlabeledVertex(v))?;
        if label >= 1 << t.n() {
            return Err(MinorsError::UnlabeledVertex(v));
        }
        field.insert(v, t.get(label).clone());
    }
    Ok(field)
}

/// The odd almost-principal minor value for the tile with base label `I` and
/// pair `{i, j}`: `(-1)^{(|I|+1)/2 floor} M_{I+a}^{I+b}` with `(a, b)`
/// ordered so that `(a - b)(-1)^{|I|} > 0`.
pub fn tile_minor_value(m: &SymMatrix, base: Label, i: u8, j: u8) -> Scalar {
    let (lo, hi) = (i.min(j), i.max(j));
    let (a, b) = if base.count_ones() % 2 == 0 {
        (hi, lo)
    } else {
        (lo, hi)
    };
    let idx: Vec<usize> = (0..m.n()).filter(|x| base >> x & 1 == 1).collect();
    let mut rows = idx.clone();
    rows.push(a as usize - 1);
    rows.sort_unstable();
    let mut cols = idx;
    cols.push(b as usize - 1);
    cols.sort_unstable();
    let sign = if ((base.count_ones() + 1) / 2) % 2 == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    };
    &sign * &m.minor(&rows, &cols)
}

/// The vertex-and-face array of a matrix on a pile complex: signed principal
/// minors on vertices, signed odd almost-principal minors on tiles.
pub fn matrix_khex_field(
    m: &SymMatrix,
    pile: &Pile,
) -> Result<(DirectedComplex, Complex02Field), MinorsError> {
    let complex = crate::complex::build_complex(pile)?;
    let mut vertices = ComplexField::new();
    for v in 0..complex.vertex_count() {
        let label = complex.label(v).ok_or(MinorsError::UnlabeledVertex(v))?;
        let value = &half_floor_sign(label.count_ones()) * &m.principal_minor(label);
        if value.is_zero() {
            return Err(MinorsError::ZeroMinor(label));
        }
        vertices.insert(v, value);
    }
    let mut faces = BTreeMap::new();
    for (s, sq) in complex.squares().iter().enumerate() {
        // recover the tile's base label and pair from its corner labels
        let labels: Vec<Label> = sq
            .iter()
            .map(|&v| complex.label(v).ok_or(MinorsError::UnlabeledVertex(v)))
            .collect::<Result<_, _>>()?;
        let base = *labels
            .iter()
            .find(|&&b| labels.iter().all(|&l| l & b == b))
            .expect("tile corners contain their base");
        let pair = labels.iter().fold(0u32, |acc, &l| acc | (l & !base));
        let elems: Vec<u8> = (1..=m.n() as u8)
            .filter(|e| pair >> (e - 1) & 1 == 1)
            .collect();
        debug_assert_eq!(elems.len(), 2);
        faces.insert(s, tile_minor_value(m, base, elems[0], elems[1]));
    }
    Ok((complex, Complex02Field { vertices, faces }))
}

#[derive(Serialize, Deserialize)]
struct TupleJson {
    n: usize,
    entries: BTreeMap<String, Scalar>,
}

impl Serialize for MinorTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TupleJson {
            n: self.n,
            entries: self
                .entries
                .iter()
                .enumerate()
                .map(|(i, v)| (i.to_string(), v.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MinorTuple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = TupleJson::deserialize(d)?;
        let size = 1usize << raw.n;
        let mut entries = vec![Scalar::zero(); size];
        let mut seen = vec![false; size];
        for (key, value) in raw.entries {
            let idx: usize = key.parse().map_err(serde::de::Error::custom)?;
            if idx >= size {
                return Err(serde::de::Error::custom(format!(
                    "entry key {idx} out of range for n = {}",
                    raw.n
                )));
            }
            entries[idx] = value;
            seen[idx] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(serde::de::Error::custom("missing tuple entries"));
        }
        Ok(MinorTuple {
            n: raw.n,
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ToleranceContext;
    use crate::tiling::{label_of, lex_standard_pile};

    pub(crate) fn m3() -> SymMatrix {
        let rows = vec![
            vec![Scalar::from_int(2), Scalar::from_int(1), Scalar::from_int(1)],
            vec![Scalar::from_int(1), Scalar::from_int(2), Scalar::from_int(1)],
            vec![Scalar::from_int(1), Scalar::from_int(1), Scalar::from_int(2)],
        ];
        SymMatrix::new(rows).unwrap()
    }

    #[test]
    fn signed_tuple_of_identity_and_diagonal() {
        let id = SymMatrix::new(vec![
            vec![Scalar::one(), Scalar::zero(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::one(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::zero(), Scalar::one()],
        ])
        .unwrap();
        let t = signed_minor_tuple(&id);
        for label in 0..8u32 {
            let expect = if (label.count_ones() / 2) % 2 == 0 { 1 } else { -1 };
            assert_eq!(t.get(label), &Scalar::from_int(expect));
        }

        let d = SymMatrix::new(vec![
            vec![Scalar::from_int(2), Scalar::zero(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::from_int(3), Scalar::zero()],
            vec![Scalar::zero(), Scalar::zero(), Scalar::from_int(5)],
        ])
        .unwrap();
        let t = signed_minor_tuple(&d);
        assert_eq!(t.get(label_of(&[1, 2])), &Scalar::from_int(-6));
        assert_eq!(t.get(label_of(&[1, 2, 3])), &Scalar::from_int(-30));
    }

    #[test]
    fn m3_tuple_values() {
        let t = signed_minor_tuple(&m3());
        assert_eq!(t.get(0), &Scalar::one());
        for e in 1..=3u8 {
            assert_eq!(t.get(label_of(&[e])), &Scalar::from_int(2));
        }
        for pair in [[1, 2], [1, 3], [2, 3]] {
            assert_eq!(t.get(label_of(&pair)), &Scalar::from_int(-3));
        }
        assert_eq!(t.get(label_of(&[1, 2, 3])), &Scalar::from_int(-4));
    }

    #[test]
    fn l_term_examples() {
        let t = signed_minor_tuple(&m3());
        assert_eq!(l_term(&t, 0, 1, 2), Scalar::from_int(1));

        // identity matrix: L vanishes (non-generic)
        let id = SymMatrix::new(vec![
            vec![Scalar::one(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::one()],
        ])
        .unwrap();
        let t = signed_minor_tuple(&id);
        assert!(l_term(&t, 0, 1, 2).is_zero());

        // diagonal: L_{empty,{i,j}} = m_ij^2 = 0
        let d = SymMatrix::new(vec![
            vec![Scalar::from_int(4), Scalar::zero()],
            vec![Scalar::zero(), Scalar::from_int(7)],
        ])
        .unwrap();
        let t = signed_minor_tuple(&d);
        assert!(l_term(&t, 0, 1, 2).is_zero());
    }

    #[test]
    fn k_terms_on_m3() {
        let t = signed_minor_tuple(&m3());
        let (kc, kv) = k_terms(&t, 0, 1, 2, 3);
        assert!(kc.is_zero());
        assert_eq!(kv, Scalar::from_int(-1));
        let (kc2, kv2) = k_terms(&t, label_of(&[2]), 1, 2, 3);
        assert!(kc2.is_zero());
        assert_eq!(kv2, Scalar::from_int(1));
    }

    #[test]
    fn realizability_of_m3_like_and_perturbed() {
        let m = SymMatrix::new(
            [
                [3, -3, 1, -3],
                [-3, -2, 4, 4],
                [1, 4, -2, 1],
                [-3, 4, 1, -2],
            ]
            .iter()
            .map(|row| row.iter().map(|&v| Scalar::from_int(v)).collect())
            .collect(),
        )
        .unwrap();
        let t = signed_minor_tuple(&m);
        assert!(realizability_test(&t).unwrap().passed());

        let mut bad = t.clone();
        let full = label_of(&[1, 2, 3, 4]);
        bad.set(full, &bad.get(full).clone() + &Scalar::one());
        match realizability_test(&bad).unwrap() {
            Realizability::Fail { .. } => {}
            Realizability::Pass => panic!("perturbed tuple must fail"),
        }
    }

    #[test]
    fn n3_vacuous_product_condition() {
        // for n = 3 there are no 4-subsets, so the K identities alone decide
        let t = signed_minor_tuple(&m3());
        assert!(realizability_test(&t).unwrap().passed());
    }

    #[test]
    fn reconstruct_m3_round_trip() {
        let t = signed_minor_tuple(&m3());
        let m = reconstruct_symmetric(&t).unwrap();
        let ctx = ToleranceContext::new(1e-8, 1e-10);
        for i in 0..3 {
            for j in 0..3 {
                assert!(ctx.eq_f64(m.entry(i, j).to_f64(), m3().entry(i, j).to_f64()));
            }
        }
    }

    #[test]
    fn reconstruct_generic_3x3() {
        // diagonal matrices are non-generic (L = 0); reconstruction needs
        // generic almost-principal minors by contract
        // first row positive, so reconstruction recovers it exactly
        let m = SymMatrix::new(
            [[3, 1, 4], [1, -3, 2], [4, 2, -2]]
                .iter()
                .map(|row| row.iter().map(|&v| Scalar::from_int(v)).collect())
                .collect(),
        )
        .unwrap();
        let t = signed_minor_tuple(&m);
        let back = reconstruct_symmetric(&t).unwrap();
        let ctx = ToleranceContext::new(1e-8, 1e-10);
        for i in 0..3 {
            for j in 0..3 {
                assert!(ctx.eq_f64(back.entry(i, j).to_f64(), m.entry(i, j).to_f64()));
            }
        }
    }

    #[test]
    fn negative_offdiagonal_recovers_up_to_conjugation() {
        let m = SymMatrix::new(vec![
            vec![Scalar::from_int(2), Scalar::from_int(-1), Scalar::from_int(1)],
            vec![Scalar::from_int(-1), Scalar::from_int(3), Scalar::from_int(1)],
            vec![Scalar::from_int(1), Scalar::from_int(1), Scalar::from_int(2)],
        ])
        .unwrap();
        let t = signed_minor_tuple(&m);
        let back = reconstruct_symmetric(&t).unwrap();
        // the recovered matrix has m_1j >= 0; conjugating by the sign of the
        // source's first row must recover the source
        let ctx = ToleranceContext::new(1e-8, 1e-10);
        let signs: Vec<f64> = (0..3)
            .map(|j| {
                if j == 0 || m.entry(0, j).to_f64() >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                let conj = signs[i] * signs[j] * back.entry(i, j).to_f64();
                assert!(ctx.eq_f64(conj, m.entry(i, j).to_f64()));
            }
        }
        // and the recovered matrix itself realizes the tuple
        let t2 = signed_minor_tuple(&back);
        for label in 0..8u32 {
            assert!(ctx.eq_f64(t2.get(label).to_f64(), t.get(label).to_f64()));
        }
    }

    #[test]
    fn m3_khex_field_on_lex_pile() {
        let pile = lex_standard_pile(3).unwrap();
        let (complex, field) = matrix_khex_field(&m3(), &pile).unwrap();
        // the tile over (empty, {2,3}) carries m_32 = 1
        let tile_value = complex
            .squares()
            .iter()
            .enumerate()
            .find_map(|(s, sq)| {
                let labels: Vec<Label> =
                    sq.iter().map(|&v| complex.label(v).unwrap()).collect();
                (labels.contains(&0)
                    && labels.contains(&label_of(&[2]))
                    && labels.contains(&label_of(&[3]))
                    && labels.contains(&label_of(&[2, 3])))
                .then(|| field.faces[&s].clone())
            })
            .unwrap();
        assert_eq!(tile_value, Scalar::from_int(1));
        // cube check passes with top vertex {1,3}
        let ctx = ToleranceContext::default();
        let report = crate::complex::check_complex_khex(&complex, &field, &ctx).unwrap();
        assert!(report.passed(), "{:?}", report.findings.first());
        assert_eq!(
            complex.label(complex.cubes()[0].top()),
            Some(label_of(&[1, 3]))
        );
    }

    #[test]
    fn tuple_json_round_trip() {
        let t = signed_minor_tuple(&m3());
        let json = serde_json::to_string(&t).unwrap();
        let back: MinorTuple = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
