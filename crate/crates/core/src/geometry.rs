//! Metric geometry of a single Euclidean tetrahedron given by its six edge
//! lengths.
//!
//! Everything is derived from the lengths alone: realizability via the
//! Cayley-Menger determinant, face angles via the planar cosine law, dihedral
//! angles via the spherical cosine law, and circumcentric data (centers and
//! signed dual heights) via an explicit coordinate embedding.

use nalgebra::{Matrix2, Matrix3, Matrix5, Vector2, Vector3};
use thiserror::Error;

/// Local vertex pairs of a tetrahedron in canonical order.
pub const LOCAL_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Local faces of a tetrahedron, indexed by the opposite vertex.
pub const LOCAL_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Slack allowed when clamping an arccos argument to `[-1, 1]`. Larger
/// excursions are treated as genuine degeneracy, not roundoff.
pub const ACOS_CLAMP_TOL: f64 = 1e-12;

/// Scale-aware realizability threshold: the Cayley-Menger determinant must
/// exceed this times (mean length)^6 for the lengths to count as a metric
/// tetrahedron.
pub const REALIZABILITY_REL_TOL: f64 = 1e-12;

/// Relative threshold on the Gram determinant below which input points are
/// treated as affinely dependent.
const GRAM_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("edge lengths must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("triangle inequality violated for sides ({0}, {1}, {2})")]
    TriangleInequality(f64, f64, f64),
    #[error("lengths do not embed as a Euclidean tetrahedron (Cayley-Menger {cm:.3e})")]
    NotRealizable { cm: f64 },
    #[error("arccos argument {0} lies outside [-1, 1] beyond roundoff")]
    AcosDomain(f64),
    #[error("points are affinely dependent, circumcenter is not determined")]
    AffinelyDependent,
    #[error("circumcenter expects 1 to 4 points, got {0}")]
    BadPointCount(usize),
    #[error("{0:?} is not a face of the local tetrahedron")]
    BadFace([usize; 3]),
    #[error("({0}, {1}) is not an edge of the local tetrahedron")]
    BadEdge(usize, usize),
}

/// Clamp an arccos argument that drifted past `[-1, 1]` by roundoff.
fn checked_acos(x: f64) -> Result<f64, GeometryError> {
    if x.abs() > 1.0 + ACOS_CLAMP_TOL {
        return Err(GeometryError::AcosDomain(x));
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// Interior angle opposite side `a` in a triangle with sides `(a, b, c)`.
pub fn face_angle(a: f64, b: f64, c: f64) -> Result<f64, GeometryError> {
    check_triangle(a, b, c)?;
    checked_acos((b * b + c * c - a * a) / (2.0 * b * c))
}

/// Triangle area from its side lengths.
///
/// Uses Kahan's stable ordering of Heron's formula.
pub fn face_area(a: f64, b: f64, c: f64) -> Result<f64, GeometryError> {
    check_triangle(a, b, c)?;
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let [x, y, z] = s;
    let t = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    Ok(0.25 * t.max(0.0).sqrt())
}

fn check_triangle(a: f64, b: f64, c: f64) -> Result<(), GeometryError> {
    for &s in &[a, b, c] {
        if s <= 0.0 || !s.is_finite() {
            return Err(GeometryError::NonPositiveLength(s));
        }
    }
    if a >= b + c || b >= a + c || c >= a + b {
        return Err(GeometryError::TriangleInequality(a, b, c));
    }
    Ok(())
}

/// The six edge lengths of a tetrahedron, indexed by [`LOCAL_EDGES`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TetraLengths([f64; 6]);

impl TetraLengths {
    pub fn new(lengths: [f64; 6]) -> Result<Self, GeometryError> {
        for &l in &lengths {
            if l <= 0.0 || !l.is_finite() {
                return Err(GeometryError::NonPositiveLength(l));
            }
        }
        Ok(Self(lengths))
    }

    /// Length of the local edge `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> Result<f64, GeometryError> {
        let pair = (i.min(j), i.max(j));
        LOCAL_EDGES
            .iter()
            .position(|&e| e == pair)
            .map(|k| self.0[k])
            .ok_or(GeometryError::BadEdge(i, j))
    }

    pub fn as_array(&self) -> &[f64; 6] {
        &self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.map(|l| l * s))
    }

    fn sq(&self, i: usize, j: usize) -> f64 {
        let l = self.get(i, j).expect("local indices in 0..4");
        l * l
    }

    /// Bordered 5x5 Cayley-Menger determinant; equals `288 V^2` for a
    /// realizable tetrahedron and is non-positive for degenerate lengths.
    pub fn cayley_menger(&self) -> f64 {
        let m = Matrix5::from_fn(|r, c| match (r, c) {
            (0, 0) => 0.0,
            (0, _) | (_, 0) => 1.0,
            (r, c) if r == c => 0.0,
            (r, c) => self.sq(r - 1, c - 1),
        });
        m.determinant()
    }

    /// Scale-aware realizability check: all four faces must satisfy the
    /// strict triangle inequality and the Cayley-Menger determinant must
    /// clear [`REALIZABILITY_REL_TOL`] relative to (mean length)^6.
    pub fn check_realizable(&self) -> Result<(), GeometryError> {
        for face in LOCAL_FACES {
            let [i, j, k] = face;
            check_triangle(
                self.get(j, k).unwrap(),
                self.get(i, k).unwrap(),
                self.get(i, j).unwrap(),
            )?;
        }
        let cm = self.cayley_menger();
        let mean = self.0.iter().sum::<f64>() / 6.0;
        if cm <= REALIZABILITY_REL_TOL * mean.powi(6) {
            return Err(GeometryError::NotRealizable { cm });
        }
        Ok(())
    }

    pub fn is_realizable(&self) -> bool {
        self.check_realizable().is_ok()
    }

    /// Euclidean volume, `sqrt(CM / 288)`.
    pub fn volume(&self) -> Result<f64, GeometryError> {
        self.check_realizable()?;
        Ok((self.cayley_menger() / 288.0).sqrt())
    }

    /// Dihedral angle at the local edge `(i, j)` via the spherical cosine
    /// law applied to the three face angles at vertex `i`.
    pub fn dihedral_angle(&self, i: usize, j: usize) -> Result<f64, GeometryError> {
        self.check_realizable()?;
        self.get(i, j)?;
        self.dihedral_unchecked(i, j)
    }

    fn dihedral_unchecked(&self, i: usize, j: usize) -> Result<f64, GeometryError> {
        let mut rest = [0usize; 2];
        let mut r = 0;
        for v in 0..4 {
            if v != i && v != j {
                rest[r] = v;
                r += 1;
            }
        }
        let [k, l] = rest;
        // Face angles at vertex i: between (ij, ik), between (ij, il), and
        // between (ik, il).
        let g_k = face_angle(self.get(j, k)?, self.get(i, j)?, self.get(i, k)?)?;
        let g_l = face_angle(self.get(j, l)?, self.get(i, j)?, self.get(i, l)?)?;
        let g_kl = face_angle(self.get(k, l)?, self.get(i, k)?, self.get(i, l)?)?;
        checked_acos((g_kl.cos() - g_k.cos() * g_l.cos()) / (g_k.sin() * g_l.sin()))
    }

    /// All six dihedral angles in [`LOCAL_EDGES`] order, plus the volume.
    ///
    /// This is the embedding-free path used in functional evaluations.
    pub fn angles_and_volume(&self) -> Result<([f64; 6], f64), GeometryError> {
        self.check_realizable()?;
        let mut betas = [0.0; 6];
        for (slot, &(i, j)) in LOCAL_EDGES.iter().enumerate() {
            betas[slot] = self.dihedral_unchecked(i, j)?;
        }
        Ok((betas, (self.cayley_menger() / 288.0).sqrt()))
    }

    /// Coordinate realization with vertex 0 at the origin, vertex 1 on the
    /// positive x-axis, vertex 2 in the upper half xy-plane, vertex 3 with
    /// positive z.
    pub fn embed(&self) -> Result<EmbeddedTetra, GeometryError> {
        self.check_realizable()?;
        let l01 = self.get(0, 1).unwrap();
        let (d01, d02, d03) = (self.sq(0, 1), self.sq(0, 2), self.sq(0, 3));
        let (d12, d13, d23) = (self.sq(1, 2), self.sq(1, 3), self.sq(2, 3));

        let x2 = (d01 + d02 - d12) / (2.0 * l01);
        let y2sq = d02 - x2 * x2;
        if y2sq <= 0.0 {
            return Err(GeometryError::NotRealizable {
                cm: self.cayley_menger(),
            });
        }
        let y2 = y2sq.sqrt();

        let x3 = (d01 + d03 - d13) / (2.0 * l01);
        let y3 = ((d02 + d03 - d23) / 2.0 - x2 * x3) / y2;
        let z3sq = d03 - x3 * x3 - y3 * y3;
        if z3sq <= 0.0 {
            return Err(GeometryError::NotRealizable {
                cm: self.cayley_menger(),
            });
        }
        Ok(EmbeddedTetra {
            points: [
                Vector3::zeros(),
                Vector3::new(l01, 0.0, 0.0),
                Vector3::new(x2, y2, 0.0),
                Vector3::new(x3, y3, z3sq.sqrt()),
            ],
        })
    }

    /// Signed distance from the circumcenter of `face` to the circumcenter
    /// of the tetrahedron.
    ///
    /// Positive when the tetrahedron circumcenter lies on the same side of
    /// the face plane as the opposite vertex. This is the orientation for
    /// which the four signed contributions satisfy `sum_f h_f A_f = 3 V`.
    pub fn signed_height(&self, face: [usize; 3]) -> Result<f64, GeometryError> {
        let mut sorted = face;
        sorted.sort_unstable();
        let opposite = LOCAL_FACES
            .iter()
            .position(|f| *f == sorted)
            .ok_or(GeometryError::BadFace(face))?;
        let embedded = self.embed()?;
        embedded.signed_height(opposite)
    }

    /// One-pass summary of everything the curvature assembly needs.
    pub fn analyze(&self) -> Result<TetraData, GeometryError> {
        let (dihedrals, volume) = self.angles_and_volume()?;
        let embedded = self.embed()?;
        #[cfg(debug_assertions)]
        for (slot, &(i, j)) in LOCAL_EDGES.iter().enumerate() {
            let alt = embedded.dihedral_from_normals(i, j);
            debug_assert!(
                (dihedrals[slot] - alt).abs() < 1e-9,
                "dihedral routes disagree at edge ({i}, {j}): {} vs {alt}",
                dihedrals[slot]
            );
        }

        let mut face_areas = [0.0; 4];
        let mut heights = [0.0; 4];
        for (opposite, face) in LOCAL_FACES.iter().enumerate() {
            let [i, j, k] = *face;
            face_areas[opposite] =
                face_area(self.get(j, k)?, self.get(i, k)?, self.get(i, j)?)?;
            heights[opposite] = embedded.signed_height(opposite)?;
        }
        Ok(TetraData {
            volume,
            dihedrals,
            face_areas,
            heights,
        })
    }
}

/// Per-tetrahedron metric data: volume, dihedral angles in [`LOCAL_EDGES`]
/// order, face areas and signed circumcentric heights indexed by the
/// opposite vertex as in [`LOCAL_FACES`].
#[derive(Clone, Copy, Debug)]
pub struct TetraData {
    pub volume: f64,
    pub dihedrals: [f64; 6],
    pub face_areas: [f64; 4],
    pub heights: [f64; 4],
}

/// A coordinate realization of a [`TetraLengths`].
#[derive(Clone, Copy, Debug)]
pub struct EmbeddedTetra {
    points: [Vector3<f64>; 4],
}

impl EmbeddedTetra {
    pub fn points(&self) -> &[Vector3<f64>; 4] {
        &self.points
    }

    /// Signed volume, `det(edge vectors) / 6`; positive in the embedding
    /// frame convention.
    pub fn signed_volume(&self) -> f64 {
        let [p0, p1, p2, p3] = self.points;
        Matrix3::from_columns(&[p1 - p0, p2 - p0, p3 - p0]).determinant() / 6.0
    }

    /// Dihedral angle at edge `(i, j)` from the two face normals.
    pub fn dihedral_from_normals(&self, i: usize, j: usize) -> f64 {
        let mut rest = [0usize; 2];
        let mut r = 0;
        for v in 0..4 {
            if v != i && v != j {
                rest[r] = v;
                r += 1;
            }
        }
        let [k, l] = rest;
        let e = self.points[j] - self.points[i];
        let nk = e.cross(&(self.points[k] - self.points[i]));
        let nl = e.cross(&(self.points[l] - self.points[i]));
        (nk.dot(&nl) / (nk.norm() * nl.norm()))
            .clamp(-1.0, 1.0)
            .acos()
    }

    fn signed_height(&self, opposite: usize) -> Result<f64, GeometryError> {
        let [i, j, k] = LOCAL_FACES[opposite];
        let face_pts = [self.points[i], self.points[j], self.points[k]];
        let c_tet = circumcenter(&self.points)?;
        let c_face = circumcenter(&face_pts)?;
        let normal = (face_pts[1] - face_pts[0]).cross(&(face_pts[2] - face_pts[0]));
        let toward_opposite = normal.dot(&(self.points[opposite] - face_pts[0]));
        let h = (c_tet - c_face).dot(&normal) / normal.norm();
        Ok(h * toward_opposite.signum())
    }
}

/// Circumcenter of 1 to 4 affinely independent points: the unique point of
/// the affine span equidistant from all of them.
pub fn circumcenter(points: &[Vector3<f64>]) -> Result<Vector3<f64>, GeometryError> {
    let k = match points.len() {
        0 | 5.. => return Err(GeometryError::BadPointCount(points.len())),
        len => len - 1,
    };
    if k == 0 {
        return Ok(points[0]);
    }
    let d: Vec<Vector3<f64>> = points[1..].iter().map(|p| p - points[0]).collect();
    let rhs: Vec<f64> = d.iter().map(|v| v.norm_squared() / 2.0).collect();

    let coeffs = match k {
        1 => {
            let g = d[0].norm_squared();
            check_gram(g, g)?;
            vec![rhs[0] / g]
        }
        2 => {
            let g = Matrix2::new(d[0].dot(&d[0]), d[0].dot(&d[1]), d[1].dot(&d[0]), d[1].dot(&d[1]));
            check_gram(g.determinant(), g.m11 * g.m22)?;
            let sol = g
                .lu()
                .solve(&Vector2::new(rhs[0], rhs[1]))
                .ok_or(GeometryError::AffinelyDependent)?;
            vec![sol.x, sol.y]
        }
        3 => {
            let g = Matrix3::from_fn(|r, c| d[r].dot(&d[c]));
            check_gram(g.determinant(), g.m11 * g.m22 * g.m33)?;
            let sol = g
                .lu()
                .solve(&Vector3::new(rhs[0], rhs[1], rhs[2]))
                .ok_or(GeometryError::AffinelyDependent)?;
            vec![sol.x, sol.y, sol.z]
        }
        _ => unreachable!(),
    };

    let mut center = points[0];
    for (x, v) in coeffs.iter().zip(&d) {
        center += *x * v;
    }
    #[cfg(debug_assertions)]
    {
        let r0 = (center - points[0]).norm();
        for p in points {
            debug_assert!(
                ((center - p).norm() - r0).abs() <= 1e-10 * (1.0 + r0),
                "circumcenter equidistance residual too large"
            );
        }
    }
    Ok(center)
}

fn check_gram(det: f64, diag_product: f64) -> Result<(), GeometryError> {
    if det <= GRAM_REL_TOL * diag_product.max(f64::MIN_POSITIVE) {
        return Err(GeometryError::AffinelyDependent);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const REGULAR_UNIT: [f64; 6] = [1.0; 6];

    fn unit() -> TetraLengths {
        TetraLengths::new(REGULAR_UNIT).unwrap()
    }

    fn random_realizable(rng: &mut ChaCha8Rng) -> TetraLengths {
        loop {
            let ls = TetraLengths::new(std::array::from_fn(|_| rng.random_range(0.6..1.4)));
            if let Ok(t) = ls {
                if t.is_realizable() {
                    return t;
                }
            }
        }
    }

    #[test]
    fn cayley_menger_of_unit_regular_is_four() {
        // 288 * (sqrt(2)/12)^2 = 4
        assert_relative_eq!(unit().cayley_menger(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn cayley_menger_of_collinear_points_is_zero() {
        // Four points at positions 0, 1, 2, 3 on a line.
        let flat = TetraLengths::new([1.0, 2.0, 3.0, 1.0, 2.0, 1.0]).unwrap();
        assert_relative_eq!(flat.cayley_menger(), 0.0, epsilon = 1e-9);
        assert!(!flat.is_realizable());
    }

    #[test]
    fn cayley_menger_negative_for_too_long_edge() {
        let bad = TetraLengths::new([1.0, 1.0, 1.0, 1.0, 1.0, 2.0]).unwrap();
        assert!(bad.cayley_menger() < 0.0);
        // The face (1,2,3) with sides 1, 1, 2 already fails Heron's test.
        assert!(matches!(
            bad.check_realizable(),
            Err(GeometryError::TriangleInequality(..))
        ));
    }

    #[test]
    fn unit_regular_volume() {
        let v = unit().volume().unwrap();
        assert_relative_eq!(v, f64::sqrt(2.0) / 12.0, epsilon = 1e-15);
        assert_relative_eq!(v, 0.1178511302, epsilon = 1e-10);
    }

    #[test]
    fn volume_cross_checks_against_embedding() {
        let t = TetraLengths::new([1.0, 1.0, 1.0, 1.0, 1.0, 1.2]).unwrap();
        let v = t.volume().unwrap();
        let ve = t.embed().unwrap().signed_volume();
        assert_relative_eq!(v, ve, epsilon = 1e-13);
    }

    #[test]
    fn volume_scales_cubically() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let t = random_realizable(&mut rng);
            let s = rng.random_range(0.3..3.0);
            assert_relative_eq!(
                t.scaled(s).volume().unwrap(),
                s.powi(3) * t.volume().unwrap(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn face_angle_examples() {
        assert_relative_eq!(
            face_angle(1.0, 1.0, 1.0).unwrap(),
            std::f64::consts::FRAC_PI_3,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            face_angle(f64::sqrt(2.0), 1.0, 1.0).unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn face_angles_satisfy_law_of_sines() {
        let (a, b, c) = (1.5, 1.2, 1.1);
        let alpha = face_angle(a, b, c).unwrap();
        let beta = face_angle(b, a, c).unwrap();
        assert_relative_eq!(a / alpha.sin(), b / beta.sin(), epsilon = 1e-12);
    }

    #[test]
    fn face_angle_rejects_degenerate_triangle() {
        assert!(matches!(
            face_angle(2.0, 1.0, 1.0),
            Err(GeometryError::TriangleInequality(..))
        ));
    }

    #[test]
    fn unit_regular_dihedral() {
        let beta = unit().dihedral_angle(0, 1).unwrap();
        assert_relative_eq!(beta, (1.0f64 / 3.0).acos(), epsilon = 1e-14);
        assert_relative_eq!(beta, 1.2309594173, epsilon = 1e-10);
    }

    #[test]
    fn dihedral_matches_embedding_normals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let t = random_realizable(&mut rng);
            let e = t.embed().unwrap();
            for &(i, j) in &LOCAL_EDGES {
                assert_relative_eq!(
                    t.dihedral_angle(i, j).unwrap(),
                    e.dihedral_from_normals(i, j),
                    epsilon = 1e-10
                );
            }
        }
    }

    // With lengths l01 = l23 = a, l02 = b, l03 = l12 = c, l13 = d the two
    // equal-length pairs carry equal dihedral angles.
    #[test]
    fn equal_length_pairs_have_equal_dihedrals() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut tested = 0;
        while tested < 1000 {
            let a = rng.random_range(0.5..1.5);
            let b = rng.random_range(0.5..1.5);
            let c = rng.random_range(0.5..1.5);
            let d = rng.random_range(0.5..1.5);
            let t = match TetraLengths::new([a, b, c, c, d, a]) {
                Ok(t) if t.is_realizable() => t,
                _ => continue,
            };
            assert_relative_eq!(
                t.dihedral_angle(0, 3).unwrap(),
                t.dihedral_angle(1, 2).unwrap(),
                epsilon = 1e-12
            );
            assert_relative_eq!(
                t.dihedral_angle(0, 1).unwrap(),
                t.dihedral_angle(2, 3).unwrap(),
                epsilon = 1e-12
            );
            tested += 1;
        }
    }

    #[test]
    fn hinge_dihedrals_approach_pi_when_flattened() {
        // Nearly flat unit square folded along both diagonals: vertices at
        // (0,0), (1,0), (0,1), (1,1) with the last lifted by eps.
        let eps: f64 = 1e-4;
        let s2 = f64::sqrt(2.0);
        let l03 = (2.0 + eps * eps).sqrt();
        let l13 = (1.0 + eps * eps).sqrt();
        let t = TetraLengths::new([1.0, 1.0, l03, s2, l13, l13]).unwrap();
        assert!((t.dihedral_angle(0, 3).unwrap() - std::f64::consts::PI).abs() < 1e-3);
        assert!((t.dihedral_angle(1, 2).unwrap() - std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn embedding_respects_frame_convention() {
        let e = unit().embed().unwrap();
        let p = e.points();
        assert_relative_eq!(p[1].x, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p[2].x, 0.5, epsilon = 1e-14);
        assert_relative_eq!(p[2].y, f64::sqrt(3.0) / 2.0, epsilon = 1e-14);
        assert!(p[3].z > 0.0);
        assert!(e.signed_volume() > 0.0);
    }

    #[test]
    fn embedding_round_trips_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let t = random_realizable(&mut rng);
            let e = t.embed().unwrap();
            for &(i, j) in &LOCAL_EDGES {
                let d = (e.points()[i] - e.points()[j]).norm();
                assert_relative_eq!(d, t.get(i, j).unwrap(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn embedding_scales_linearly() {
        let t = TetraLengths::new([1.0, 1.1, 0.9, 1.2, 1.0, 0.95]).unwrap();
        let s = 2.5;
        let e1 = t.embed().unwrap();
        let e2 = t.scaled(s).embed().unwrap();
        for k in 0..4 {
            assert_relative_eq!((s * e1.points()[k] - e2.points()[k]).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn circumcenter_examples() {
        let tri = [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.5, f64::sqrt(3.0) / 2.0, 0.0),
        ];
        let c = circumcenter(&tri).unwrap();
        let centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
        assert_relative_eq!((c - centroid).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!((c - tri[0]).norm(), 1.0 / f64::sqrt(3.0), epsilon = 1e-14);

        let e = unit().embed().unwrap();
        let c = circumcenter(e.points()).unwrap();
        assert_relative_eq!((c - e.points()[0]).norm(), f64::sqrt(3.0 / 8.0), epsilon = 1e-13);

        let seg = [Vector3::new(-1.0, 0.0, 0.0), Vector3::new(1.0, 0.0, 0.0)];
        assert_relative_eq!(circumcenter(&seg).unwrap().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn circumcenter_rejects_collinear_points() {
        let pts = [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(2.0, 0.0, 0.0),
        ];
        assert_eq!(
            circumcenter(&pts).unwrap_err(),
            GeometryError::AffinelyDependent
        );
    }

    #[test]
    fn unit_regular_signed_height() {
        for face in LOCAL_FACES {
            let h = unit().signed_height(face).unwrap();
            assert_relative_eq!(h, (1.0f64 / 24.0).sqrt(), epsilon = 1e-13);
        }
    }

    #[test]
    fn sliver_has_negative_height_at_long_face() {
        // Equilateral base of side 2, apex just above the base centroid: the
        // circumcenter drops far below the base plane.
        let base = 2.0;
        let eps = 0.05;
        let r = base / f64::sqrt(3.0);
        let apex_dist = (r * r + eps * eps).sqrt();
        let t = TetraLengths::new([base, base, apex_dist, base, apex_dist, apex_dist]).unwrap();
        let h = t.signed_height([0, 1, 2]).unwrap();
        assert!(h < 0.0, "expected negative height, got {h}");
    }

    #[test]
    fn dual_heights_decompose_volume() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..1000 {
            let t = random_realizable(&mut rng);
            let data = t.analyze().unwrap();
            let sum: f64 = (0..4).map(|f| data.heights[f] * data.face_areas[f]).sum();
            assert_relative_eq!(sum, 3.0 * data.volume, max_relative = 1e-10);
        }
    }

    #[test]
    fn angles_are_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let t = random_realizable(&mut rng);
            let s = rng.random_range(0.2..5.0);
            let ts = t.scaled(s);
            for &(i, j) in &LOCAL_EDGES {
                assert_relative_eq!(
                    t.dihedral_angle(i, j).unwrap(),
                    ts.dihedral_angle(i, j).unwrap(),
                    epsilon = 1e-10
                );
            }
            for face in LOCAL_FACES {
                assert_relative_eq!(
                    ts.signed_height(face).unwrap(),
                    s * t.signed_height(face).unwrap(),
                    max_relative = 1e-9,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn face_area_examples() {
        assert_relative_eq!(face_area(1.0, 1.0, 1.0).unwrap(), f64::sqrt(3.0) / 4.0, epsilon = 1e-15);
        assert_relative_eq!(face_area(3.0, 4.0, 5.0).unwrap(), 6.0, epsilon = 1e-13);
        // Cross-check against the embedding cross product.
        let t = TetraLengths::new([1.1, 1.2, 1.0, 1.3, 1.0, 1.1]).unwrap();
        let e = t.embed().unwrap();
        let p = e.points();
        let area = 0.5 * (p[2] - p[1]).cross(&(p[3] - p[1])).norm();
        assert_relative_eq!(face_area(t.get(2, 3).unwrap(), t.get(1, 3).unwrap(), t.get(1, 2).unwrap()).unwrap(), area, epsilon = 1e-12);
    }
}
