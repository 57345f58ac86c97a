//! Combinatorics of the boundary complex of a 4-dimensional cyclic polytope
//! on `n` vertices.
//!
//! The complex is generated from its distinguished Hamiltonian cycle: a
//! vertex 4-set is a facet exactly when it splits into two vertex-disjoint
//! cycle edges. An independent convex-hull oracle enumerates the same facets
//! from actual moment-curve coordinates and is used to validate the
//! construction.
//!
//! Vertices are indexed `0..n` with the distinguished cycle running through
//! consecutive indices mod `n`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;
use thiserror::Error;

/// Relative tolerance on Hadamard-normalized side determinants in the hull
/// oracle; smaller magnitudes are reported as numerically ambiguous.
pub const SIDE_DET_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ComplexError {
    #[error("a cyclic polytope boundary needs at least 5 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex index {v} out of range for {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("{tet:?} is not a facet of the complex")]
    NotAFacet { tet: [usize; 4] },
    #[error("moment-curve parameters must be strictly increasing")]
    NonIncreasingParams,
    #[error("expected {expected} moment-curve parameters, got {got}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("side determinant for {tet:?} too close to zero to orient")]
    AmbiguousSideTest { tet: [usize; 4] },
    #[error("facet {tet:?} classified as {ty} but its cyclic-distance multiset disagrees")]
    TypePatternMismatch { tet: [usize; 4], ty: TetraType },
}

/// Number of edges on the shortest arc of the distinguished cycle between
/// vertices `i` and `j`.
pub fn cyclic_distance(i: usize, j: usize, n: usize) -> Result<usize, ComplexError> {
    for v in [i, j] {
        if v >= n {
            return Err(ComplexError::VertexOutOfRange { v, n });
        }
    }
    Ok(dist_unchecked(i, j, n))
}

fn dist_unchecked(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Odd => write!(f, "odd"),
            Parity::Even => write!(f, "even"),
        }
    }
}

/// Combinatorial type of a facet, determined by the gap between its two
/// generating cycle edges.
///
/// `Standard(k)` is the generic type with gap `k < m`. At the maximal gap
/// `k = m` the facet degenerates into one of two symmetric forms depending
/// on the parity of `n`; the payload records `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TetraType {
    Standard(usize),
    OddMax(usize),
    EvenMax(usize),
}

impl TetraType {
    /// The gap level `k` (equal to `m` for the max types).
    pub fn level(&self) -> usize {
        match *self {
            TetraType::Standard(k) | TetraType::OddMax(k) | TetraType::EvenMax(k) => k,
        }
    }

    /// Sorted multiset of cyclic distances realized by the six edges.
    fn distance_pattern(&self) -> [usize; 6] {
        match *self {
            TetraType::Standard(k) => {
                let mut p = [1, 1, k, k + 1, k + 1, k + 2];
                p.sort_unstable();
                p
            }
            TetraType::OddMax(m) => [1, 1, m, m + 1, m + 1, m + 1],
            TetraType::EvenMax(m) => [1, 1, m, m, m + 1, m + 1],
        }
    }
}

impl fmt::Display for TetraType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TetraType::Standard(k) => write!(f, "T{k}"),
            TetraType::OddMax(m) => write!(f, "T{m}o"),
            TetraType::EvenMax(m) => write!(f, "T{m}e"),
        }
    }
}

impl Serialize for TetraType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The boundary complex on `n` vertices with all incidences precomputed.
///
/// Immutable after construction; safe to share across threads for reads.
#[derive(Clone, Debug)]
pub struct Complex {
    n: usize,
    m: usize,
    parity: Parity,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    tetrahedra: Vec<[usize; 4]>,
    types: Vec<TetraType>,
    cycle: Vec<usize>,
    edge_tetra: Vec<Vec<usize>>,
    vertex_star: Vec<Vec<usize>>,
    face_tetra: Vec<[usize; 2]>,
}

/// Convenience alias for [`Complex::build`].
pub fn build_complex(n: usize) -> Result<Complex, ComplexError> {
    Complex::build(n)
}

impl Complex {
    pub fn build(n: usize) -> Result<Self, ComplexError> {
        if n < 5 {
            return Err(ComplexError::TooFewVertices(n));
        }
        let (m, parity) = if n % 2 == 1 {
            ((n - 3) / 2, Parity::Odd)
        } else {
            ((n - 2) / 2, Parity::Even)
        };

        // Facets: unions of two vertex-disjoint cycle edges.
        let mut tet_set: BTreeSet<[usize; 4]> = BTreeSet::new();
        for a in 0..n {
            let e1 = [a, (a + 1) % n];
            for b in (a + 1)..n {
                let e2 = [b, (b + 1) % n];
                if e1.contains(&e2[0]) || e1.contains(&e2[1]) {
                    continue;
                }
                let mut t = [e1[0], e1[1], e2[0], e2[1]];
                t.sort_unstable();
                tet_set.insert(t);
            }
        }
        let tetrahedra: Vec<[usize; 4]> = tet_set.into_iter().collect();
        assert_eq!(
            tetrahedra.len(),
            n * (n - 3) / 2,
            "facet count must be n(n-3)/2"
        );

        // Faces with their two cofacets.
        let mut face_map: BTreeMap<[usize; 3], Vec<usize>> = BTreeMap::new();
        for (ti, t) in tetrahedra.iter().enumerate() {
            for skip in 0..4 {
                let mut face = [0usize; 3];
                let mut w = 0;
                for (k, &v) in t.iter().enumerate() {
                    if k != skip {
                        face[w] = v;
                        w += 1;
                    }
                }
                face_map.entry(face).or_default().push(ti);
            }
        }
        assert_eq!(face_map.len(), n * n - 3 * n, "face count must be n^2-3n");
        let mut faces = Vec::with_capacity(face_map.len());
        let mut face_tetra = Vec::with_capacity(face_map.len());
        for (face, cofacets) in face_map {
            assert_eq!(cofacets.len(), 2, "every face must border two facets");
            faces.push(face);
            face_tetra.push([cofacets[0], cofacets[1]]);
        }

        // Every vertex pair must occur as an edge of some facet (the complex
        // is neighborly), so the edge list is exactly the lex-ordered pairs.
        let mut seen_pairs: BTreeSet<[usize; 2]> = BTreeSet::new();
        for t in &tetrahedra {
            for x in 0..4 {
                for y in (x + 1)..4 {
                    seen_pairs.insert([t[x], t[y]]);
                }
            }
        }
        assert_eq!(seen_pairs.len(), n * (n - 1) / 2, "complex must be neighborly");
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push([i, j]);
            }
        }

        let mut complex = Complex {
            n,
            m,
            parity,
            edges,
            faces,
            tetrahedra,
            types: Vec::new(),
            cycle: Vec::new(),
            edge_tetra: vec![Vec::new(); n * (n - 1) / 2],
            vertex_star: vec![Vec::new(); n],
            face_tetra,
        };

        for (ti, t) in complex.tetrahedra.iter().enumerate() {
            for x in 0..4 {
                complex.vertex_star[t[x]].push(ti);
                for y in (x + 1)..4 {
                    let e = complex.edge_index(t[x], t[y]).unwrap();
                    complex.edge_tetra[e].push(ti);
                }
            }
        }

        complex.cycle = (0..n)
            .map(|i| complex.edge_index(i, (i + 1) % n).unwrap())
            .collect();

        complex.types = complex
            .tetrahedra
            .iter()
            .map(|&t| classify_raw(n, m, parity, t))
            .collect::<Result<_, _>>()?;

        Ok(complex)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The derived parameter `m`: `(n-3)/2` for odd `n`, `(n-2)/2` for even.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// All vertex pairs, lex-sorted; the complex is neighborly so every pair
    /// is an edge.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn tetrahedra(&self) -> &[[usize; 4]] {
        &self.tetrahedra
    }

    /// Types parallel to [`Complex::tetrahedra`].
    pub fn types(&self) -> &[TetraType] {
        &self.types
    }

    /// Edge indices of the distinguished cycle `{v_i, v_{i+1 mod n}}`.
    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    /// Indices of the tetrahedra containing edge `e`.
    pub fn edge_tetra(&self, e: usize) -> &[usize] {
        &self.edge_tetra[e]
    }

    /// Indices of the tetrahedra containing vertex `v`.
    pub fn vertex_star(&self, v: usize) -> &[usize] {
        &self.vertex_star[v]
    }

    /// The two cofacets of each face, parallel to [`Complex::faces`].
    pub fn face_tetra(&self) -> &[[usize; 2]] {
        &self.face_tetra
    }

    /// Canonical index of the edge `{i, j}` in lex order.
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        if i == j || i >= self.n || j >= self.n {
            return None;
        }
        let (i, j) = (i.min(j), i.max(j));
        Some(i * (2 * self.n - i - 1) / 2 + (j - i - 1))
    }

    /// Cyclic distance between two valid vertex indices.
    ///
    /// Panics if either index is out of range; use [`cyclic_distance`] for a
    /// checked variant.
    pub fn distance(&self, i: usize, j: usize) -> usize {
        assert!(i < self.n && j < self.n, "vertex index out of range");
        dist_unchecked(i, j, self.n)
    }

    /// Position of a facet in the canonical ordering.
    pub fn tetra_position(&self, tet: [usize; 4]) -> Option<usize> {
        let mut t = tet;
        t.sort_unstable();
        self.tetrahedra.binary_search(&t).ok()
    }

    /// Type of the facet with index `ti`.
    pub fn tetra_type(&self, ti: usize) -> TetraType {
        self.types[ti]
    }

    /// Classify an arbitrary vertex 4-set, verifying facet membership and
    /// cross-checking the resulting type against the cyclic-distance
    /// multiset the type implies.
    pub fn classify_tetra(&self, tet: [usize; 4]) -> Result<TetraType, ComplexError> {
        if self.tetra_position(tet).is_none() {
            return Err(ComplexError::NotAFacet { tet });
        }
        classify_raw(self.n, self.m, self.parity, tet)
    }

    /// Count of facets per type.
    pub fn type_census(&self) -> BTreeMap<TetraType, usize> {
        let mut census = BTreeMap::new();
        for &ty in &self.types {
            *census.entry(ty).or_insert(0) += 1;
        }
        census
    }

    /// Count of facets per type among those containing vertex `v`.
    pub fn vertex_star_census(&self, v: usize) -> BTreeMap<TetraType, usize> {
        let mut census = BTreeMap::new();
        for &ti in &self.vertex_star[v] {
            *census.entry(self.types[ti]).or_insert(0) += 1;
        }
        census
    }

    /// First facet index of each distinct type.
    pub fn type_representatives(&self) -> BTreeMap<TetraType, usize> {
        let mut reps = BTreeMap::new();
        for (ti, &ty) in self.types.iter().enumerate() {
            reps.entry(ty).or_insert(ti);
        }
        reps
    }

    /// True when both generators of the dihedral group (rotation `i -> i+1`
    /// and reflection `i -> -i`, mod `n`) map the facet set onto itself.
    pub fn verify_dihedral_symmetry(&self) -> bool {
        tetra_set_dihedral_invariant(self.n, &self.tetrahedra)
    }

    /// Canonical key/value + array serialization; byte-stable for a given
    /// `n`.
    pub fn to_canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("n,{}\n", self.n));
        out.push_str(&format!("m,{}\n", self.m));
        out.push_str(&format!("parity,{}\n", self.parity));
        out.push_str(&format!("edges,{}\n", self.edges.len()));
        for e in &self.edges {
            out.push_str(&format!("edge,{},{}\n", e[0], e[1]));
        }
        out.push_str(&format!("tetrahedra,{}\n", self.tetrahedra.len()));
        for (t, ty) in self.tetrahedra.iter().zip(&self.types) {
            out.push_str(&format!("tetra,{},{},{},{},{}\n", t[0], t[1], t[2], t[3], ty));
        }
        for (ty, count) in self.type_census() {
            out.push_str(&format!("census,{ty},{count}\n"));
        }
        out.push_str(&format!("dihedral_symmetry,{}\n", self.verify_dihedral_symmetry()));
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            n: usize,
            m: usize,
            parity: Parity,
            edge_count: usize,
            face_count: usize,
            tetrahedron_count: usize,
            edges: &'a [[usize; 2]],
            tetrahedra: &'a [[usize; 4]],
            types: Vec<String>,
            census: BTreeMap<String, usize>,
            dihedral_symmetry: bool,
        }
        crate::fmt::to_json_string(&Doc {
            n: self.n,
            m: self.m,
            parity: self.parity,
            edge_count: self.edges.len(),
            face_count: self.faces.len(),
            tetrahedron_count: self.tetrahedra.len(),
            edges: &self.edges,
            tetrahedra: &self.tetrahedra,
            types: self.types.iter().map(|t| t.to_string()).collect(),
            census: self
                .type_census()
                .into_iter()
                .map(|(ty, c)| (ty.to_string(), c))
                .collect(),
            dihedral_symmetry: self.verify_dihedral_symmetry(),
        })
    }
}

/// Whether a lex-sorted facet list is invariant under the dihedral action.
pub fn tetra_set_dihedral_invariant(n: usize, tets: &[[usize; 4]]) -> bool {
    let rotate = |v: usize| (v + 1) % n;
    let reflect = |v: usize| (n - v) % n;
    let maps: [&dyn Fn(usize) -> usize; 2] = [&rotate, &reflect];
    maps.iter().all(|map| {
        tets.iter().all(|t| {
            let mut img = t.map(map);
            img.sort_unstable();
            tets.binary_search(&img).is_ok()
        })
    })
}

/// Classification from the gap between the two generating cycle edges, with
/// a redundant cross-check of the cyclic-distance multiset. A mismatch would
/// indicate a wrap error at the cycle seam and is reported, not ignored.
fn classify_raw(
    n: usize,
    m: usize,
    parity: Parity,
    tet: [usize; 4],
) -> Result<TetraType, ComplexError> {
    let cycle_edges: Vec<[usize; 2]> = tet
        .iter()
        .filter(|&&v| tet.contains(&((v + 1) % n)))
        .map(|&v| [v, (v + 1) % n])
        .collect();
    let mut generators = None;
    'search: for x in 0..cycle_edges.len() {
        for y in (x + 1)..cycle_edges.len() {
            let (e1, e2) = (cycle_edges[x], cycle_edges[y]);
            if !e1.contains(&e2[0]) && !e1.contains(&e2[1]) {
                generators = Some((e1, e2));
                break 'search;
            }
        }
    }
    let Some(([a, _], [b, _])) = generators else {
        return Err(ComplexError::NotAFacet { tet });
    };

    // Arc lengths between the two cycle edges; they sum to n - 2.
    let arc1 = (b + n - (a + 1) % n) % n;
    let arc2 = ((a + n) - (b + 1) % n) % n;
    let gap = arc1.min(arc2);
    debug_assert!(arc1 + arc2 == n - 2 && gap >= 1 && gap <= m);

    let ty = if gap < m {
        TetraType::Standard(gap)
    } else {
        match parity {
            Parity::Odd => TetraType::OddMax(m),
            Parity::Even => TetraType::EvenMax(m),
        }
    };

    let mut distances = [0usize; 6];
    let mut w = 0;
    for x in 0..4 {
        for y in (x + 1)..4 {
            distances[w] = dist_unchecked(tet[x], tet[y], n);
            w += 1;
        }
    }
    distances.sort_unstable();
    if distances != ty.distance_pattern() {
        return Err(ComplexError::TypePatternMismatch { tet, ty });
    }
    Ok(ty)
}

/// Independent facet enumeration from actual moment-curve coordinates
/// `x(t) = (t, t^2, t^3, t^4)`: a 4-subset is a facet exactly when all
/// remaining points lie strictly on one side of its affine hyperplane.
///
/// Each orientation test affinely renormalizes its five parameters to
/// `[-1, 1]` (parameter translation and scaling act on R^4 with positive
/// determinant, so signs are preserved) and rejects Hadamard-normalized
/// determinants below [`SIDE_DET_REL_TOL`] as ambiguous.
pub fn gale_facets_oracle(n: usize, params: &[f64]) -> Result<Vec<[usize; 4]>, ComplexError> {
    if n < 5 {
        return Err(ComplexError::TooFewVertices(n));
    }
    if params.len() != n {
        return Err(ComplexError::ParamCountMismatch {
            expected: n,
            got: params.len(),
        });
    }
    if params.iter().any(|t| !t.is_finite()) || params.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ComplexError::NonIncreasingParams);
    }

    let mut facets = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    let tet = [a, b, c, d];
                    if is_facet(params, tet)? {
                        facets.push(tet);
                    }
                }
            }
        }
    }
    Ok(facets)
}

fn is_facet(params: &[f64], tet: [usize; 4]) -> Result<bool, ComplexError> {
    let mut positive = false;
    let mut negative = false;
    for q in 0..params.len() {
        if tet.contains(&q) {
            continue;
        }
        let (det, hadamard) = side_determinant(params, tet, q);
        if det.abs() <= SIDE_DET_REL_TOL * hadamard {
            return Err(ComplexError::AmbiguousSideTest { tet });
        }
        if det > 0.0 {
            positive = true;
        } else {
            negative = true;
        }
        if positive && negative {
            return Ok(false);
        }
    }
    Ok(true)
}

fn side_determinant(params: &[f64], tet: [usize; 4], q: usize) -> (f64, f64) {
    let ts = [
        params[tet[0]],
        params[tet[1]],
        params[tet[2]],
        params[tet[3]],
        params[q],
    ];
    let lo = ts.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let scale = 0.5 * (hi - lo);
    let pts = ts.map(|t| {
        let u = (t - center) / scale;
        Vector4::new(u, u * u, u * u * u, u * u * u * u)
    });
    let rows = [pts[1] - pts[0], pts[2] - pts[0], pts[3] - pts[0], pts[4] - pts[0]];
    let det = Matrix4::from_columns(&rows).determinant();
    let hadamard: f64 = rows.iter().map(|r| r.norm()).product();
    (det, hadamard)
}
