//! Directed 3-dimensional cubical complexes built from piles of tilings:
//! one cube per flip, with the removed hexagon center as its bottom vertex
//! and the new one as its top. Kashaev, coherence, and K-hexahedron checks
//! run on such complexes, together with the GF(2) comfortableness decision
//! and the extension of coherent vertex arrays.
//!
//! Cube vertices use the same bit indexing as the lattice module: `verts[0]`
//! is the bottom, `verts[7]` the top, and bit `a` toggles along the cube's
//! `a`-th pair of opposite faces.

use crate::exec;
use crate::gf2::BitMatrix;
use crate::kashaev::{kashaev_k_sides, kashaev_kv, khex_step};
use crate::report::{Finding, NumericMode, Report};
use crate::scalar::{Scalar, ScalarError, ToleranceContext};
use crate::tiling::{label_string, Label, Pile, TilingError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum ComplexError {
    #[error("invalid pile: {0}")]
    InvalidPile(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("missing value at vertex {0}")]
    MissingValue(usize),
    #[error("vertex {0} carries a zero value")]
    ZeroVertexValue(usize),
    #[error("face expression vanishes on square {0}")]
    ZeroFaceExpression(usize),
    #[error("field is not a coherent Kashaev solution ({0})")]
    NotCoherent(String),
    #[error("complex is not comfortable: no sign-class repair exists for cube {0}")]
    NotComfortable(usize),
    #[error("vertex {0} has no subset label")]
    UnlabeledVertex(usize),
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error(transparent)]
    Kashaev(#[from] crate::kashaev::KashaevError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// One 3-cube: bit-indexed vertex ids plus, for each of the three axes, the
/// square ids of the bottom-containing and top-containing faces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub verts: [usize; 8],
    pub faces: [[usize; 2]; 3],
}

impl Cube {
    pub fn bottom(&self) -> usize {
        self.verts[0]
    }

    pub fn top(&self) -> usize {
        self.verts[7]
    }

    pub fn corner_index(&self, vertex: usize) -> Option<usize> {
        self.verts.iter().position(|&v| v == vertex)
    }
}

/// A directed cubical complex with optional subset labels on vertices.
#[derive(Debug, Clone)]
pub struct DirectedComplex {
    labels: Vec<Option<Label>>,
    squares: Vec<[usize; 4]>,
    cubes: Vec<Cube>,
    interior: BTreeSet<usize>,
    vertex_cubes: Vec<Vec<usize>>,
    vertex_squares: Vec<Vec<usize>>,
}

impl DirectedComplex {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: usize) -> Option<Label> {
        self.labels.get(v).copied().flatten()
    }

    pub fn squares(&self) -> &[[usize; 4]] {
        &self.squares
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn interior(&self) -> &BTreeSet<usize> {
        &self.interior
    }

    pub fn cubes_at(&self, v: usize) -> &[usize] {
        &self.vertex_cubes[v]
    }

    pub fn squares_at(&self, v: usize) -> &[usize] {
        &self.vertex_squares[v]
    }

    fn finish(
        labels: Vec<Option<Label>>,
        squares: Vec<[usize; 4]>,
        cubes: Vec<Cube>,
        interior: BTreeSet<usize>,
    ) -> Self {
        let n = labels.len();
        let mut vertex_cubes = vec![Vec::new(); n];
        let mut vertex_squares = vec![Vec::new(); n];
        for (idx, sq) in squares.iter().enumerate() {
            for &v in sq {
                vertex_squares[v].push(idx);
            }
        }
        for (idx, cube) in cubes.iter().enumerate() {
            for &v in &cube.verts {
                vertex_cubes[v].push(idx);
            }
        }
        DirectedComplex {
            labels,
            squares,
            cubes,
            interior,
            vertex_cubes,
            vertex_squares,
        }
    }

    /// Partition of the squares into sign classes: the transitive closure of
    /// "opposite faces of a cube". Returns per-square class indices and the
    /// class count.
    pub fn face_classes(&self) -> (Vec<usize>, usize) {
        let mut parent: Vec<usize> = (0..self.squares.len()).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for cube in &self.cubes {
            for axis in 0..3 {
                let a = find(&mut parent, cube.faces[axis][0]);
                let b = find(&mut parent, cube.faces[axis][1]);
                parent[a] = b;
            }
        }
        let mut ids = BTreeMap::new();
        let mut out = vec![0usize; self.squares.len()];
        for s in 0..self.squares.len() {
            let root = find(&mut parent, s);
            let next = ids.len();
            let id = *ids.entry(root).or_insert(next);
            out[s] = id;
        }
        (out, ids.len())
    }

    /// Necessary link conditions for the declared interior vertices: every
    /// incident square lies in exactly two incident cubes, and each incident
    /// edge lies in as many incident squares as incident cubes.
    pub fn validate_interior(&self) -> Result<(), ComplexError> {
        for &v in &self.interior {
            for &s in &self.vertex_squares[v] {
                let in_cubes = self.vertex_cubes[v]
                    .iter()
                    .filter(|&&c| self.cubes[c].faces.iter().flatten().any(|&f| f == s))
                    .count();
                if in_cubes != 2 {
                    return Err(ComplexError::InvalidComplex(format!(
                        "interior vertex {v}: square {s} lies in {in_cubes} incident cubes"
                    )));
                }
            }
            let mut edge_squares: BTreeMap<usize, usize> = BTreeMap::new();
            for &s in &self.vertex_squares[v] {
                let sq = self.squares[s];
                let pos = sq.iter().position(|&x| x == v).unwrap();
                for u in [sq[(pos + 1) % 4], sq[(pos + 3) % 4]] {
                    *edge_squares.entry(u).or_default() += 1;
                }
            }
            for (&u, &nsq) in &edge_squares {
                let ncubes = self.vertex_cubes[v]
                    .iter()
                    .filter(|&&c| {
                        let cube = &self.cubes[c];
                        let iv = cube.corner_index(v);
                        let iu = cube.corner_index(u);
                        matches!((iv, iu), (Some(a), Some(b)) if (a ^ b).count_ones() == 1)
                    })
                    .count();
                if nsq != ncubes {
                    return Err(ComplexError::InvalidComplex(format!(
                        "interior vertex {v}: edge to {u} lies in {nsq} squares but {ncubes} cubes"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Build the directed complex of a pile: start from the tiles of the first
/// tiling, then add one cube per flip with the removed vertex at the bottom.
pub fn build_complex(pile: &Pile) -> Result<DirectedComplex, ComplexError> {
    let t0 = pile.start().clone();
    t0.validate()?;
    let t0_labels: Vec<Label> = t0.vertex_labels().into_iter().collect();
    let mut labels: Vec<Option<Label>> = t0_labels.iter().map(|&l| Some(l)).collect();
    let mut current: BTreeMap<Label, usize> = t0_labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i))
        .collect();
    let mut squares: Vec<[usize; 4]> = Vec::new();
    let mut tile_square: BTreeMap<(u8, u8), usize> = BTreeMap::new();
    for ((i, j), _) in t0.tiles() {
        let corners = t0.tile_corners(i, j).map(|l| current[&l]);
        tile_square.insert((i, j), squares.len());
        squares.push(corners);
    }

    let mut cubes = Vec::new();
    let mut tiling = t0;
    for record in pile.steps() {
        let (i, j, k) = record.triple;
        let (next, rec) = tiling.flip(record.triple)?;
        debug_assert_eq!(rec.removed, record.removed);
        let w_label = record.removed;
        let w_id = current[&w_label];
        let v_id = labels.len();
        labels.push(Some(record.added));

        let toggles = [1u32 << (i - 1), 1u32 << (j - 1), 1u32 << (k - 1)];
        let verts: [usize; 8] = std::array::from_fn(|bits| {
            if bits == 7 {
                v_id
            } else if bits == 0 {
                w_id
            } else {
                let mut l = w_label;
                for (a, t) in toggles.iter().enumerate() {
                    if bits >> a & 1 == 1 {
                        l ^= t;
                    }
                }
                current[&l]
            }
        });

        // bit a toggles element (i, j, k)[a]; the faces perpendicular to bit a
        // are the tiles of the complementary pair
        let pair_for_axis = [(j, k), (i, k), (i, j)];
        let lower: [usize; 3] = std::array::from_fn(|a| tile_square[&pair_for_axis[a]]);

        current.remove(&w_label);
        current.insert(record.added, v_id);

        let mut upper = [0usize; 3];
        for (a, &(p, q)) in pair_for_axis.iter().enumerate() {
            let corners = next.tile_corners(p, q).map(|l| current[&l]);
            upper[a] = squares.len();
            tile_square.insert((p, q), squares.len());
            squares.push(corners);
        }
        cubes.push(Cube {
            verts,
            faces: [
                [lower[0], upper[0]],
                [lower[1], upper[1]],
                [lower[2], upper[2]],
            ],
        });
        tiling = next;
    }

    let final_ids: BTreeSet<usize> = current.values().copied().collect();
    let t0_count = t0_labels.len();
    let interior: BTreeSet<usize> = (t0_count..labels.len())
        .filter(|id| !final_ids.contains(id))
        .collect();
    Ok(DirectedComplex::finish(labels, squares, cubes, interior))
}

/// Raw parts of a generic complex, the JSON exchange format. Cube structure
/// is reconstructed from the square list; the interior set is taken as given
/// and checked against the link conditions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexParts {
    pub vertices: Vec<usize>,
    #[serde(default)]
    pub labels: BTreeMap<usize, Label>,
    pub squares: Vec<[usize; 4]>,
    pub cubes: Vec<CubePart>,
    pub interior: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubePart {
    pub verts: [usize; 8],
    pub top: usize,
}

impl DirectedComplex {
    pub fn from_parts(parts: &ComplexParts) -> Result<Self, ComplexError> {
        let nverts = parts.vertices.len();
        for (pos, &v) in parts.vertices.iter().enumerate() {
            if v != pos {
                return Err(ComplexError::InvalidComplex(
                    "vertex ids must be 0..n in order".into(),
                ));
            }
        }
        let labels: Vec<Option<Label>> = (0..nverts)
            .map(|v| parts.labels.get(&v).copied())
            .collect();
        for sq in &parts.squares {
            if sq.iter().any(|&v| v >= nverts) {
                return Err(ComplexError::InvalidComplex("square corner out of range".into()));
            }
        }
        // square lookup by sorted corner set
        let mut square_by_set: BTreeMap<[usize; 4], usize> = BTreeMap::new();
        for (idx, sq) in parts.squares.iter().enumerate() {
            let mut key = *sq;
            key.sort_unstable();
            if square_by_set.insert(key, idx).is_some() {
                return Err(ComplexError::InvalidComplex(format!(
                    "duplicate square {sq:?}"
                )));
            }
        }
        let mut cubes = Vec::with_capacity(parts.cubes.len());
        for part in &parts.cubes {
            cubes.push(reconstruct_cube(part, &parts.squares, &square_by_set)?);
        }
        let interior: BTreeSet<usize> = parts.interior.iter().copied().collect();
        let complex =
            DirectedComplex::finish(labels, parts.squares.clone(), cubes, interior);
        complex.validate_interior()?;
        Ok(complex)
    }

    pub fn to_parts(&self) -> ComplexParts {
        ComplexParts {
            vertices: (0..self.vertex_count()).collect(),
            labels: (0..self.vertex_count())
                .filter_map(|v| self.label(v).map(|l| (v, l)))
                .collect(),
            squares: self.squares.clone(),
            cubes: self
                .cubes
                .iter()
                .map(|c| CubePart {
                    verts: c.verts,
                    top: c.top(),
                })
                .collect(),
            interior: self.interior.iter().copied().collect(),
        }
    }
}

/// Rebuild the bit-indexed cube structure of an 8-vertex cube with a chosen
/// top, given the complex's square list.
fn reconstruct_cube(
    part: &CubePart,
    squares: &[[usize; 4]],
    square_by_set: &BTreeMap<[usize; 4], usize>,
) -> Result<Cube, ComplexError> {
    let vset: BTreeSet<usize> = part.verts.iter().copied().collect();
    if vset.len() != 8 {
        return Err(ComplexError::InvalidComplex("cube needs 8 distinct vertices".into()));
    }
    if !vset.contains(&part.top) {
        return Err(ComplexError::InvalidComplex("top vertex not in cube".into()));
    }
    let own_squares: Vec<usize> = square_by_set
        .iter()
        .filter(|(key, _)| key.iter().all(|v| vset.contains(v)))
        .map(|(_, &idx)| idx)
        .collect();
    if own_squares.len() != 6 {
        return Err(ComplexError::InvalidComplex(format!(
            "cube {:?} has {} faces in the square list, expected 6",
            part.verts,
            own_squares.len()
        )));
    }
    // cube adjacency from cyclic square edges
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &s in &own_squares {
        let sq = squares[s];
        for p in 0..4 {
            adj.entry(sq[p]).or_default().insert(sq[(p + 1) % 4]);
            adj.entry(sq[(p + 1) % 4]).or_default().insert(sq[p]);
        }
    }
    if adj.values().any(|n| n.len() != 3) {
        return Err(ComplexError::InvalidComplex(
            "cube adjacency is not 3-regular".into(),
        ));
    }
    let bottom = *vset
        .iter()
        .find(|&&v| {
            v != part.top
                && own_squares
                    .iter()
                    .all(|&s| !(squares[s].contains(&v) && squares[s].contains(&part.top)))
        })
        .ok_or_else(|| ComplexError::InvalidComplex("no antipode for top vertex".into()))?;
    let mut neighbors: Vec<usize> = adj[&bottom].iter().copied().collect();
    neighbors.sort_unstable();
    let fourth = |a: usize, b: usize, c: usize| -> Result<usize, ComplexError> {
        own_squares
            .iter()
            .map(|&s| squares[s])
            .find(|sq| sq.contains(&a) && sq.contains(&b) && sq.contains(&c))
            .and_then(|sq| sq.iter().find(|v| ![a, b, c].contains(v)).copied())
            .ok_or_else(|| ComplexError::InvalidComplex("missing cube face".into()))
    };
    let mut verts = [0usize; 8];
    verts[0] = bottom;
    verts[1] = neighbors[0];
    verts[2] = neighbors[1];
    verts[4] = neighbors[2];
    verts[3] = fourth(bottom, verts[1], verts[2])?;
    verts[5] = fourth(bottom, verts[1], verts[4])?;
    verts[6] = fourth(bottom, verts[2], verts[4])?;
    verts[7] = part.top;
    for (a, b) in [(3usize, 7usize), (5, 7), (6, 7)] {
        if !adj[&verts[a]].contains(&verts[b]) {
            return Err(ComplexError::InvalidComplex(
                "cube structure is inconsistent with its squares".into(),
            ));
        }
    }
    let mut faces = [[0usize; 2]; 3];
    for axis in 0..3 {
        for side in 0..2 {
            let mut key: [usize; 4] = {
                let mut sel = [0usize; 4];
                let mut idx = 0;
                for bits in 0..8usize {
                    if bits >> axis & 1 == side {
                        sel[idx] = verts[bits];
                        idx += 1;
                    }
                }
                sel
            };
            key.sort_unstable();
            faces[axis][side] = *square_by_set.get(&key).ok_or_else(|| {
                ComplexError::InvalidComplex("cube face missing from square list".into())
            })?;
        }
    }
    Ok(Cube { verts, faces })
}

/// Vertex values on a complex, keyed by vertex id.
pub type ComplexField = BTreeMap<usize, Scalar>;

/// Vertex-and-face values: faces keyed by square id.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Complex02Field {
    pub vertices: ComplexField,
    pub faces: BTreeMap<usize, Scalar>,
}

fn field_mode(field: &ComplexField) -> NumericMode {
    if field.values().all(|v| v.is_exact()) {
        NumericMode::Exact
    } else {
        NumericMode::Float
    }
}

fn cube_corners(
    complex: &DirectedComplex,
    field: &ComplexField,
    cube: &Cube,
) -> Result<[Scalar; 8], ComplexError> {
    let mut out: [Scalar; 8] = std::array::from_fn(|_| Scalar::zero());
    for (slot, &v) in out.iter_mut().zip(cube.verts.iter()) {
        *slot = field.get(&v).ok_or(ComplexError::MissingValue(v))?.clone();
    }
    let _ = complex;
    Ok(out)
}

fn loc_cube(complex: &DirectedComplex, idx: usize) -> String {
    match complex.label(complex.cubes[idx].top()) {
        Some(l) => format!("cube{idx}@top{}", label_string(l)),
        None => format!("cube{idx}"),
    }
}

/// Kashaev residual on every cube; direction-free.
pub fn check_complex_kashaev(
    complex: &DirectedComplex,
    field: &ComplexField,
    ctx: &ToleranceContext,
) -> Result<Report, ComplexError> {
    let idxs: Vec<usize> = (0..complex.cubes.len()).collect();
    let findings: Vec<Result<Option<Finding>, ComplexError>> =
        exec::map_collect(&idxs, |&idx| {
            let corners = cube_corners(complex, field, &complex.cubes[idx])?;
            let (lhs, rhs) = kashaev_k_sides(&corners);
            Ok((!lhs.approx_eq_coerced(&rhs, ctx))
                .then(|| Finding::mismatch("kashaev", loc_cube(complex, idx), lhs, rhs)))
        });
    let mut out = Vec::new();
    for f in findings {
        if let Some(f) = f? {
            out.push(f);
        }
    }
    Ok(Report::new(field_mode(field), out))
}

/// Coherence data at one vertex of a complex.
#[derive(Debug, Clone)]
pub struct ComplexCoherence {
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub ok: bool,
    pub degenerate: bool,
}

/// Product of `K^C_v` over incident cubes against the product of incident
/// face expressions.
pub fn coherence_at(
    complex: &DirectedComplex,
    field: &ComplexField,
    v: usize,
    ctx: &ToleranceContext,
) -> Result<ComplexCoherence, ComplexError> {
    let mut lhs = Scalar::one();
    for &c in complex.cubes_at(v) {
        let cube = &complex.cubes[c];
        let corners = cube_corners(complex, field, cube)?;
        let idx = cube.corner_index(v).expect("incidence");
        lhs = &lhs * &kashaev_kv(&corners, idx);
    }
    let mut rhs = Scalar::one();
    for &s in complex.squares_at(v) {
        let sq = complex.squares[s];
        let pos = sq.iter().position(|&x| x == v).unwrap();
        let xv = field.get(&v).ok_or(ComplexError::MissingValue(v))?;
        let get = |u: usize| field.get(&u).ok_or(ComplexError::MissingValue(u));
        let v1 = get(sq[(pos + 1) % 4])?;
        let v2 = get(sq[(pos + 2) % 4])?;
        let v3 = get(sq[(pos + 3) % 4])?;
        rhs = &rhs * &(&(xv * v2) + &(v1 * v3));
    }
    let ok = lhs.approx_eq_coerced(&rhs, ctx);
    let degenerate = lhs.is_zero() && rhs.is_zero();
    Ok(ComplexCoherence {
        lhs,
        rhs,
        ok,
        degenerate,
    })
}

/// Coherence at every interior vertex. Degenerate (0 = 0) comparisons are
/// flagged as findings of their own kind.
pub fn check_complex_coherence(
    complex: &DirectedComplex,
    field: &ComplexField,
    ctx: &ToleranceContext,
) -> Result<Report, ComplexError> {
    let mut findings = Vec::new();
    for &v in complex.interior() {
        let c = coherence_at(complex, field, v, ctx)?;
        if !c.ok {
            findings.push(Finding::mismatch(
                "coherence",
                format!("vertex{v}"),
                c.lhs,
                c.rhs,
            ));
        } else if c.degenerate {
            findings.push(Finding::mismatch(
                "coherence-degenerate",
                format!("vertex{v}"),
                c.lhs,
                c.rhs,
            ));
        }
    }
    Ok(Report::new(field_mode(field), findings))
}

/// K-hexahedron equations per cube (with the cube's own direction) and the
/// face condition per square.
pub fn check_complex_khex(
    complex: &DirectedComplex,
    field: &Complex02Field,
    ctx: &ToleranceContext,
) -> Result<Report, ComplexError> {
    for (&v, value) in &field.vertices {
        if value.is_zero() {
            return Err(ComplexError::ZeroVertexValue(v));
        }
    }
    let mut findings = Vec::new();
    for (&s, value) in &field.faces {
        let sq = complex.squares[s];
        let get = |u: usize| {
            field
                .vertices
                .get(&u)
                .ok_or(ComplexError::MissingValue(u))
        };
        let expr = &(get(sq[0])? * get(sq[2])?) + &(get(sq[1])? * get(sq[3])?);
        let lhs = value.square();
        if !lhs.approx_eq_coerced(&expr, ctx) {
            findings.push(Finding::mismatch(
                "face-square",
                format!("square{s}"),
                lhs,
                expr,
            ));
        }
    }
    for (idx, cube) in complex.cubes.iter().enumerate() {
        let corners = cube_corners(complex, &field.vertices, cube)?;
        let lower: [Scalar; 7] = std::array::from_fn(|b| corners[b].clone());
        let mut lf: [Scalar; 3] = std::array::from_fn(|_| Scalar::zero());
        let mut uf: [Scalar; 3] = std::array::from_fn(|_| Scalar::zero());
        for axis in 0..3 {
            lf[axis] = field
                .faces
                .get(&cube.faces[axis][0])
                .ok_or(ComplexError::MissingValue(cube.faces[axis][0]))?
                .clone();
            uf[axis] = field
                .faces
                .get(&cube.faces[axis][1])
                .ok_or(ComplexError::MissingValue(cube.faces[axis][1]))?
                .clone();
        }
        let (upper, top) = khex_step(&lower, &lf)?;
        for axis in 0..3 {
            if !upper[axis].approx_eq_coerced(&uf[axis], ctx) {
                findings.push(Finding::mismatch(
                    &format!("khex-face{}", axis + 1),
                    loc_cube(complex, idx),
                    uf[axis].clone(),
                    upper[axis].clone(),
                ));
            }
        }
        if !top.approx_eq_coerced(&corners[7], ctx) {
            findings.push(Finding::mismatch(
                "khex-top",
                loc_cube(complex, idx),
                corners[7].clone(),
                top,
            ));
        }
    }
    let mode = if field_mode(&field.vertices) == NumericMode::Exact
        && field.faces.values().all(|v| v.is_exact())
    {
        NumericMode::Exact
    } else {
        NumericMode::Float
    };
    Ok(Report::new(mode, findings))
}

/// Comfortableness data: the GF(2) image of the face-class sign map against
/// the interior-vertex parity space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComfortReport {
    pub comfortable: bool,
    pub dim_image_psi: usize,
    pub dim_c2_space: usize,
    pub image_in_c2: bool,
}

/// Decide comfortableness: the column space of the class-to-cube sign map
/// must equal the space of cube-sign vectors with product +1 around every
/// interior vertex.
pub fn is_comfortable(complex: &DirectedComplex) -> ComfortReport {
    let (classes, nclasses) = complex.face_classes();
    let ncubes = complex.cubes.len();

    let mut psi = BitMatrix::zero(0, nclasses);
    for cube in &complex.cubes {
        let row: Vec<usize> = (0..3).map(|a| classes[cube.faces[a][0]]).collect();
        psi.push_row(&row);
    }
    let dim_image = psi.rank();

    let mut parity = BitMatrix::zero(0, ncubes);
    for &v in complex.interior() {
        parity.push_row(complex.cubes_at(v));
    }
    let dim_c2 = parity.nullity();

    // containment: every column of psi must satisfy the parity constraints
    let mut image_in_c2 = true;
    for class in 0..nclasses {
        let indicator: Vec<bool> = (0..nclasses).map(|c| c == class).collect();
        let col = psi.apply(&indicator);
        if parity.apply(&col).iter().any(|&b| b) {
            image_in_c2 = false;
            break;
        }
    }

    ComfortReport {
        comfortable: dim_image == dim_c2 && image_in_c2,
        dim_image_psi: dim_image,
        dim_c2_space: dim_c2,
        image_in_c2,
    }
}

/// Extend a coherent vertex array on a pile complex to a K-hexahedron array:
/// choose square roots on the start tiling's tiles, sweep the cubes in pile
/// order, and repair wrong-root tops by flipping face sign classes solved
/// for over GF(2).
pub fn extend_on_complex(
    complex: &DirectedComplex,
    field: &ComplexField,
    ctx: &ToleranceContext,
) -> Result<Complex02Field, ComplexError> {
    for (&v, value) in field {
        if value.is_zero() {
            return Err(ComplexError::ZeroVertexValue(v));
        }
    }
    let kashaev = check_complex_kashaev(complex, field, ctx)?;
    if !kashaev.passed() {
        return Err(ComplexError::NotCoherent(format!(
            "Kashaev equation fails at {}",
            kashaev.findings[0].location
        )));
    }
    for &v in complex.interior() {
        let c = coherence_at(complex, field, v, ctx)?;
        if !c.ok {
            return Err(ComplexError::NotCoherent(format!(
                "coherence fails at vertex {v}"
            )));
        }
    }

    let upper_faces: BTreeSet<usize> = complex
        .cubes
        .iter()
        .flat_map(|c| (0..3).map(|a| c.faces[a][1]))
        .collect();
    let mut initial: BTreeMap<usize, Scalar> = BTreeMap::new();
    let needed: BTreeSet<usize> = complex
        .cubes
        .iter()
        .flat_map(|c| (0..3).map(|a| c.faces[a][0]))
        .filter(|s| !upper_faces.contains(s))
        .collect();
    for &s in &needed {
        let sq = complex.squares[s];
        let get = |u: usize| field.get(&u).ok_or(ComplexError::MissingValue(u));
        let expr = &(get(sq[0])? * get(sq[2])?) + &(get(sq[1])? * get(sq[3])?);
        if expr.is_zero() {
            return Err(ComplexError::ZeroFaceExpression(s));
        }
        initial.insert(s, expr.sqrt_principal()?);
    }

    let (classes, nclasses) = complex.face_classes();
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        if rounds > complex.cubes.len() + 2 {
            return Err(ComplexError::NotComfortable(0));
        }
        let mut faces = initial.clone();
        let mut mismatch = None;
        for (idx, cube) in complex.cubes.iter().enumerate() {
            let corners = cube_corners(complex, field, cube)?;
            let lower: [Scalar; 7] = std::array::from_fn(|b| corners[b].clone());
            let lf: [Scalar; 3] = std::array::from_fn(|a| {
                faces
                    .get(&cube.faces[a][0])
                    .expect("pile order provides lower faces")
                    .clone()
            });
            let (upper, top) = khex_step(&lower, &lf)?;
            for (a, value) in upper.into_iter().enumerate() {
                faces.insert(cube.faces[a][1], value);
            }
            if !top.approx_eq_coerced(&corners[7], ctx) {
                mismatch = Some(idx);
                break;
            }
        }
        let Some(k) = mismatch else {
            return Ok(Complex02Field {
                vertices: field.clone(),
                faces,
            });
        };
        let mut system = BitMatrix::zero(0, nclasses);
        let mut rhs = Vec::with_capacity(k + 1);
        for (idx, cube) in complex.cubes.iter().enumerate().take(k + 1) {
            let row: Vec<usize> = (0..3).map(|a| classes[cube.faces[a][0]]).collect();
            system.push_row(&row);
            rhs.push(idx == k);
        }
        let solution = system
            .solve(&rhs)
            .ok_or(ComplexError::NotComfortable(k))?;
        for (s, value) in initial.iter_mut() {
            if solution[classes[*s]] {
                *value = -&*value;
            }
        }
    }
}
