//! Curvature assembly over a metrized complex.
//!
//! For each edge the curvature is the angle deficit times the length,
//! `K_e = (2π - Σ_t β_{e<t}) ℓ_e`, and each vertex carries half the sum over
//! its incident edges, `K_v = ½ Σ_{e>v} K_e`. Totalling the vertex
//! curvatures gives the discrete Einstein-Hilbert action, which is
//! normalized either by total length or by cbrt(total volume). Vertex length
//! and volume shares `L_v` and `V_v` enter the two constant-scalar-curvature
//! conditions `K_v = λ_L L_v` and `K_v = λ_V V_v`.

use std::f64::consts::TAU;

use serde::Serialize;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::complex::{Complex, TetraType};
use crate::fmt::g17;
use crate::geometry::{GeometryError, TetraData, TetraLengths, LOCAL_EDGES, LOCAL_FACES};

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("metric has {got} lengths but the complex has {expected} edges")]
    LengthCountMismatch { expected: usize, got: usize },
    #[error("edge length {0} is not positive and finite")]
    BadLength(f64),
    #[error("tetrahedron {tet:?} is degenerate: {source}")]
    DegenerateTetra {
        tet: [usize; 4],
        source: GeometryError,
    },
    #[error("cyclic levels make every {ty} tetrahedron degenerate: {source}")]
    NonRealizableLevels {
        ty: TetraType,
        source: GeometryError,
    },
    #[error("expected {expected} cyclic levels (one per distance), got {got}")]
    LevelCountMismatch { expected: usize, got: usize },
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
}

/// An edge-indexed vector of positive lengths under which every tetrahedron
/// of the complex embeds in Euclidean space. Construction validates
/// realizability, so a `Metric` value is always usable.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    lengths: Vec<f64>,
}

impl Metric {
    pub fn new(c: &Complex, lengths: Vec<f64>) -> Result<Self, CurvatureError> {
        if lengths.len() != c.edges().len() {
            return Err(CurvatureError::LengthCountMismatch {
                expected: c.edges().len(),
                got: lengths.len(),
            });
        }
        for &l in &lengths {
            if l <= 0.0 || !l.is_finite() {
                return Err(CurvatureError::BadLength(l));
            }
        }
        let metric = Metric { lengths };
        for ti in 0..c.tetrahedra().len() {
            metric
                .tetra_lengths(c, ti)
                .check_realizable()
                .map_err(|source| CurvatureError::DegenerateTetra {
                    tet: c.tetrahedra()[ti],
                    source,
                })?;
        }
        Ok(metric)
    }

    /// Skips per-tetrahedron validation; the caller must have verified
    /// realizability some other way.
    pub(crate) fn from_validated(lengths: Vec<f64>) -> Self {
        Metric { lengths }
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn scaled(&self, s: f64) -> Self {
        Metric {
            lengths: self.lengths.iter().map(|l| l * s).collect(),
        }
    }

    /// The six lengths of tetrahedron `ti` in [`LOCAL_EDGES`] order.
    pub fn tetra_lengths(&self, c: &Complex, ti: usize) -> TetraLengths {
        let t = c.tetrahedra()[ti];
        let mut ls = [0.0; 6];
        for (slot, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
            ls[slot] = self.lengths[c.edge_index(t[a], t[b]).unwrap()];
        }
        TetraLengths::new(ls).expect("metric lengths are positive")
    }
}

/// Level lengths of a cyclic length metric: entry `k` is the length shared
/// by all edges at cyclic distance `k + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicLevels(Vec<f64>);

impl CyclicLevels {
    pub fn new(levels: Vec<f64>) -> Result<Self, CurvatureError> {
        for &l in &levels {
            if l <= 0.0 || !l.is_finite() {
                return Err(CurvatureError::BadLength(l));
            }
        }
        Ok(CyclicLevels(levels))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Metric with `ℓ_ij = levels[D_ij - 1]`.
///
/// Realizability is verified on one representative tetrahedron per type
/// (tetrahedra of equal type carry the same length multiset, so this is
/// sufficient) and on every tetrahedron in debug builds.
pub fn cyclic_metric(c: &Complex, levels: &CyclicLevels) -> Result<Metric, CurvatureError> {
    if levels.0.len() != c.m() + 1 {
        return Err(CurvatureError::LevelCountMismatch {
            expected: c.m() + 1,
            got: levels.0.len(),
        });
    }
    let lengths: Vec<f64> = c
        .edges()
        .iter()
        .map(|&[i, j]| levels.0[c.distance(i, j) - 1])
        .collect();
    let metric = Metric::from_validated(lengths);
    for (ty, ti) in c.type_representatives() {
        metric
            .tetra_lengths(c, ti)
            .check_realizable()
            .map_err(|source| CurvatureError::NonRealizableLevels { ty, source })?;
    }
    #[cfg(debug_assertions)]
    for ti in 0..c.tetrahedra().len() {
        debug_assert!(
            metric.tetra_lengths(c, ti).is_realizable(),
            "representative check missed tetrahedron {ti}"
        );
    }
    Ok(metric)
}

/// Compensated (Kahan) accumulator for the scalar totals.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

fn local_edge_slot(t: &[usize; 4], i: usize, j: usize) -> usize {
    let a = t.iter().position(|&v| v == i).expect("vertex in tetra");
    let b = t.iter().position(|&v| v == j).expect("vertex in tetra");
    let pair = (a.min(b), a.max(b));
    LOCAL_EDGES.iter().position(|&e| e == pair).unwrap()
}

/// Curvature of a single edge: angle deficit times length.
pub fn edge_curvature(c: &Complex, g: &Metric, e: usize) -> Result<f64, CurvatureError> {
    let &[i, j] = c
        .edges()
        .get(e)
        .ok_or(CurvatureError::EdgeOutOfRange(e))?;
    let mut beta_sum = 0.0;
    for &ti in c.edge_tetra(e) {
        let t = c.tetrahedra()[ti];
        let slot = local_edge_slot(&t, i, j);
        let (a, b) = LOCAL_EDGES[slot];
        beta_sum += g
            .tetra_lengths(c, ti)
            .dihedral_angle(a, b)
            .map_err(|source| CurvatureError::DegenerateTetra { tet: t, source })?;
    }
    Ok((TAU - beta_sum) * g.lengths()[e])
}

/// Half the total curvature of the edges at `v`.
pub fn vertex_curvature(c: &Complex, g: &Metric, v: usize) -> Result<f64, CurvatureError> {
    if v >= c.n() {
        return Err(CurvatureError::VertexOutOfRange(v));
    }
    let mut sum = 0.0;
    for w in 0..c.n() {
        if w != v {
            sum += edge_curvature(c, g, c.edge_index(v, w).unwrap())?;
        }
    }
    Ok(0.5 * sum)
}

/// Everything the constant-scalar-curvature conditions refer to, assembled
/// in one deterministic pass over the tetrahedra.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    pub n: usize,
    /// ℓ_e per edge, in canonical edge order.
    pub edge_lengths: Vec<f64>,
    /// K_e per edge.
    pub edge_curvatures: Vec<f64>,
    /// K_v per vertex.
    pub vertex_curvatures: Vec<f64>,
    /// L_v = ½ Σ_{e>v} ℓ_e per vertex.
    pub vertex_lengths: Vec<f64>,
    /// V_v = ⅓ Σ_{t>v} Σ_{v<f<t} h_{f<t} A_f per vertex, attributing one
    /// third of each face's dual contribution to each of its vertices.
    pub vertex_volumes: Vec<f64>,
    /// β_{e<t} per tetrahedron in [`LOCAL_EDGES`] order.
    pub dihedrals: Vec<[f64; 6]>,
    pub total_length: f64,
    pub total_volume: f64,
    /// Σ_v K_v, the Einstein-Hilbert-Regge action.
    pub ehr: f64,
    /// EHR / total_length; also the length-normalized functional.
    pub lambda_length: f64,
    /// EHR / (3 · total_volume).
    pub lambda_volume: f64,
    /// EHR / total_volume^{1/3}, the volume-normalized functional.
    pub vehr: f64,
    /// K_v - λ_L L_v per vertex.
    pub lcsc_residuals: Vec<f64>,
    /// K_v - λ_V V_v per vertex.
    pub vcsc_residuals: Vec<f64>,
}

fn tetra_data(c: &Complex, g: &Metric, ti: usize) -> Result<TetraData, CurvatureError> {
    g.tetra_lengths(c, ti)
        .analyze()
        .map_err(|source| CurvatureError::DegenerateTetra {
            tet: c.tetrahedra()[ti],
            source,
        })
}

pub fn report(c: &Complex, g: &Metric) -> Result<CurvatureReport, CurvatureError> {
    let nt = c.tetrahedra().len();
    #[cfg(feature = "parallel")]
    let data: Vec<TetraData> = (0..nt)
        .into_par_iter()
        .map(|ti| tetra_data(c, g, ti))
        .collect::<Result<_, _>>()?;
    #[cfg(not(feature = "parallel"))]
    let data: Vec<TetraData> = (0..nt)
        .map(|ti| tetra_data(c, g, ti))
        .collect::<Result<_, _>>()?;

    let n = c.n();
    let ne = c.edges().len();
    let mut beta_sums = vec![0.0; ne];
    let mut dihedrals = Vec::with_capacity(nt);
    let mut vertex_volumes = vec![0.0; n];
    let mut total_volume = Kahan::default();

    // Sequential accumulation in canonical tetra order keeps the result
    // deterministic regardless of how the per-tetra pass was scheduled.
    for (ti, d) in data.iter().enumerate() {
        let t = c.tetrahedra()[ti];
        for (slot, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
            let e = c.edge_index(t[a], t[b]).unwrap();
            beta_sums[e] += d.dihedrals[slot];
        }
        for (opposite, face) in LOCAL_FACES.iter().enumerate() {
            let share = d.heights[opposite] * d.face_areas[opposite] / 3.0;
            for &lv in face {
                vertex_volumes[t[lv]] += share;
            }
        }
        total_volume.add(d.volume);
        dihedrals.push(d.dihedrals);
    }

    let edge_lengths = g.lengths().to_vec();
    let edge_curvatures: Vec<f64> = beta_sums
        .iter()
        .zip(&edge_lengths)
        .map(|(&bs, &l)| (TAU - bs) * l)
        .collect();

    let mut vertex_curvatures = vec![0.0; n];
    let mut vertex_lengths = vec![0.0; n];
    let mut total_length = Kahan::default();
    for (e, &[i, j]) in c.edges().iter().enumerate() {
        vertex_curvatures[i] += 0.5 * edge_curvatures[e];
        vertex_curvatures[j] += 0.5 * edge_curvatures[e];
        vertex_lengths[i] += 0.5 * edge_lengths[e];
        vertex_lengths[j] += 0.5 * edge_lengths[e];
        total_length.add(edge_lengths[e]);
    }

    let mut ehr = Kahan::default();
    for &kv in &vertex_curvatures {
        ehr.add(kv);
    }
    let ehr = ehr.value();
    let total_length = total_length.value();
    let total_volume = total_volume.value();
    let lambda_length = ehr / total_length;
    let lambda_volume = ehr / (3.0 * total_volume);
    let vehr = ehr / total_volume.cbrt();

    let lcsc_residuals: Vec<f64> = vertex_curvatures
        .iter()
        .zip(&vertex_lengths)
        .map(|(&k, &l)| k - lambda_length * l)
        .collect();
    let vcsc_residuals: Vec<f64> = vertex_curvatures
        .iter()
        .zip(&vertex_volumes)
        .map(|(&k, &v)| k - lambda_volume * v)
        .collect();

    Ok(CurvatureReport {
        n,
        edge_lengths,
        edge_curvatures,
        vertex_curvatures,
        vertex_lengths,
        vertex_volumes,
        dihedrals,
        total_length,
        total_volume,
        ehr,
        lambda_length,
        lambda_volume,
        vehr,
        lcsc_residuals,
        vcsc_residuals,
    })
}

/// The scalar functionals alone, via the embedding-free path. Used in inner
/// optimization loops where the full report would be wasted work.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Functionals {
    pub ehr: f64,
    pub total_length: f64,
    pub total_volume: f64,
    pub lehr: f64,
    pub vehr: f64,
}

pub fn functionals(c: &Complex, g: &Metric) -> Result<Functionals, CurvatureError> {
    let ne = c.edges().len();
    let mut beta_sums = vec![0.0; ne];
    let mut total_volume = Kahan::default();
    for ti in 0..c.tetrahedra().len() {
        let t = c.tetrahedra()[ti];
        let (betas, volume) = g
            .tetra_lengths(c, ti)
            .angles_and_volume()
            .map_err(|source| CurvatureError::DegenerateTetra { tet: t, source })?;
        for (slot, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
            beta_sums[c.edge_index(t[a], t[b]).unwrap()] += betas[slot];
        }
        total_volume.add(volume);
    }
    let mut ehr = Kahan::default();
    let mut total_length = Kahan::default();
    for (e, &bs) in beta_sums.iter().enumerate() {
        let l = g.lengths()[e];
        ehr.add((TAU - bs) * l);
        total_length.add(l);
    }
    let ehr = ehr.value();
    let total_length = total_length.value();
    let total_volume = total_volume.value();
    Ok(Functionals {
        ehr,
        total_length,
        total_volume,
        lehr: ehr / total_length,
        vehr: ehr / total_volume.cbrt(),
    })
}

/// Outcome of testing a report against both constant-scalar-curvature
/// conditions at a scale-aware threshold `tol · (|EHR|/n + 1)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CscCheck {
    pub lcsc: bool,
    pub vcsc: bool,
    pub max_lcsc_residual: f64,
    pub max_vcsc_residual: f64,
    pub tolerance: f64,
    pub threshold: f64,
}

pub fn check_csc(r: &CurvatureReport, tol: f64) -> CscCheck {
    let max_abs = |xs: &[f64]| xs.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let max_lcsc_residual = max_abs(&r.lcsc_residuals);
    let max_vcsc_residual = max_abs(&r.vcsc_residuals);
    let threshold = tol * (r.ehr.abs() / r.n as f64 + 1.0);
    CscCheck {
        lcsc: max_lcsc_residual <= threshold,
        vcsc: max_vcsc_residual <= threshold,
        max_lcsc_residual,
        max_vcsc_residual,
        tolerance: tol,
        threshold,
    }
}

impl CurvatureReport {
    pub fn to_json(&self, c: &Complex, csc: &CscCheck) -> String {
        #[derive(Serialize)]
        struct VertexRow {
            v: usize,
            k: f64,
            l: f64,
            vol: f64,
            lcsc_residual: f64,
            vcsc_residual: f64,
        }
        #[derive(Serialize)]
        struct EdgeRow {
            e: usize,
            i: usize,
            j: usize,
            d: usize,
            length: f64,
            k: f64,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            n: usize,
            total_length: f64,
            total_volume: f64,
            ehr: f64,
            lambda_length: f64,
            lambda_volume: f64,
            lehr: f64,
            vehr: f64,
            csc: &'a CscCheck,
            vertices: Vec<VertexRow>,
            edges: Vec<EdgeRow>,
            dihedrals: &'a [[f64; 6]],
        }
        crate::fmt::to_json_string(&Doc {
            n: self.n,
            total_length: self.total_length,
            total_volume: self.total_volume,
            ehr: self.ehr,
            lambda_length: self.lambda_length,
            lambda_volume: self.lambda_volume,
            lehr: self.lambda_length,
            vehr: self.vehr,
            csc,
            vertices: (0..self.n)
                .map(|v| VertexRow {
                    v,
                    k: self.vertex_curvatures[v],
                    l: self.vertex_lengths[v],
                    vol: self.vertex_volumes[v],
                    lcsc_residual: self.lcsc_residuals[v],
                    vcsc_residual: self.vcsc_residuals[v],
                })
                .collect(),
            edges: c
                .edges()
                .iter()
                .enumerate()
                .map(|(e, &[i, j])| EdgeRow {
                    e,
                    i,
                    j,
                    d: c.distance(i, j),
                    length: self.edge_lengths[e],
                    k: self.edge_curvatures[e],
                })
                .collect(),
            dihedrals: &self.dihedrals,
        })
    }

    /// Key/value summary rows, then one row per vertex, then one row per
    /// edge.
    pub fn to_csv(&self, c: &Complex, csc: &CscCheck) -> String {
        let verdict = |ok: bool| if ok { "pass" } else { "fail" };
        let mut out = String::new();
        out.push_str(&format!("n,{}\n", self.n));
        out.push_str(&format!("total_length,{}\n", g17(self.total_length)));
        out.push_str(&format!("total_volume,{}\n", g17(self.total_volume)));
        out.push_str(&format!("ehr,{}\n", g17(self.ehr)));
        out.push_str(&format!("lambda_length,{}\n", g17(self.lambda_length)));
        out.push_str(&format!("lambda_volume,{}\n", g17(self.lambda_volume)));
        out.push_str(&format!("vehr,{}\n", g17(self.vehr)));
        out.push_str(&format!("lcsc,{}\n", verdict(csc.lcsc)));
        out.push_str(&format!("vcsc,{}\n", verdict(csc.vcsc)));
        out.push_str(&format!(
            "max_lcsc_residual,{}\n",
            g17(csc.max_lcsc_residual)
        ));
        out.push_str(&format!(
            "max_vcsc_residual,{}\n",
            g17(csc.max_vcsc_residual)
        ));
        out.push_str("v,K_v,L_v,V_v,lcsc_residual,vcsc_residual\n");
        for v in 0..self.n {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                v,
                g17(self.vertex_curvatures[v]),
                g17(self.vertex_lengths[v]),
                g17(self.vertex_volumes[v]),
                g17(self.lcsc_residuals[v]),
                g17(self.vcsc_residuals[v]),
            ));
        }
        out.push_str("e,D_ij,l_e,K_e\n");
        for (e, &[i, j]) in c.edges().iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e,
                c.distance(i, j),
                g17(self.edge_lengths[e]),
                g17(self.edge_curvatures[e]),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pentachoron() -> (Complex, Metric) {
        let c = Complex::build(5).unwrap();
        let g = cyclic_metric(&c, &CyclicLevels::new(vec![1.0, 1.0]).unwrap()).unwrap();
        (c, g)
    }

    /// Edge curvature of the equilateral pentachoron: each edge lies in
    /// three tetrahedra with the regular dihedral arccos(1/3).
    fn pentachoron_edge_curvature() -> f64 {
        TAU - 3.0 * (1.0f64 / 3.0).acos()
    }

    #[test]
    fn pentachoron_edge_curvatures() {
        let (c, g) = pentachoron();
        for e in 0..10 {
            assert_eq!(c.edge_tetra(e).len(), 3);
            assert_relative_eq!(
                edge_curvature(&c, &g, e).unwrap(),
                pentachoron_edge_curvature(),
                epsilon = 1e-13
            );
        }
        assert_relative_eq!(
            edge_curvature(&c, &g, 0).unwrap(),
            2.5903070551572624,
            epsilon = 1e-12
        );
    }

    #[test]
    fn pentachoron_vertex_curvatures() {
        let (c, g) = pentachoron();
        for v in 0..5 {
            assert_relative_eq!(
                vertex_curvature(&c, &g, v).unwrap(),
                2.0 * pentachoron_edge_curvature(),
                epsilon = 1e-13
            );
        }
        assert_relative_eq!(
            vertex_curvature(&c, &g, 0).unwrap(),
            5.180_614_110_314_525,
            epsilon = 1e-12
        );
    }

    #[test]
    fn pentachoron_report_closed_forms() {
        let (c, g) = pentachoron();
        let r = report(&c, &g).unwrap();
        let ke = pentachoron_edge_curvature();
        assert_relative_eq!(r.total_length, 10.0, epsilon = 1e-12);
        assert_relative_eq!(r.total_volume, 5.0 * f64::sqrt(2.0) / 12.0, epsilon = 1e-12);
        assert_relative_eq!(r.ehr, 10.0 * ke, epsilon = 1e-10);
        assert_relative_eq!(r.lambda_length, ke, epsilon = 1e-12);
        for v in 0..5 {
            assert_relative_eq!(r.vertex_lengths[v], 2.0, epsilon = 1e-13);
            assert_relative_eq!(r.vertex_volumes[v], 0.3535534, epsilon = 1e-7);
            assert!(r.lcsc_residuals[v].abs() < 1e-12);
            assert!(r.vcsc_residuals[v].abs() < 1e-12);
        }
        let csc = check_csc(&r, 1e-9);
        assert!(csc.lcsc && csc.vcsc);
    }

    #[test]
    fn curvature_scales_linearly() {
        let (c, g) = pentachoron();
        let s = 3.7;
        let gs = g.scaled(s);
        for e in 0..10 {
            assert_relative_eq!(
                edge_curvature(&c, &gs, e).unwrap(),
                s * edge_curvature(&c, &g, e).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn report_scale_equivariance() {
        let c = Complex::build(8).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 1.05, 1.1, 1.12]).unwrap();
        let g = cyclic_metric(&c, &levels).unwrap();
        let s = 2.25;
        let r1 = report(&c, &g).unwrap();
        let r2 = report(&c, &g.scaled(s)).unwrap();
        assert_relative_eq!(r2.ehr, s * r1.ehr, max_relative = 1e-11);
        assert_relative_eq!(r2.total_length, s * r1.total_length, max_relative = 1e-12);
        assert_relative_eq!(r2.total_volume, s.powi(3) * r1.total_volume, max_relative = 1e-11);
        assert_relative_eq!(r2.lambda_length, r1.lambda_length, max_relative = 1e-11);
        assert_relative_eq!(r2.vehr, r1.vehr, max_relative = 1e-11);
    }

    #[test]
    fn vertex_curvature_sum_equals_edge_curvature_sum() {
        let c = Complex::build(7).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 1.2, 1.3]).unwrap();
        let r = report(&c, &cyclic_metric(&c, &levels).unwrap()).unwrap();
        let edge_total: f64 = r.edge_curvatures.iter().sum();
        let vertex_total: f64 = r.vertex_curvatures.iter().sum();
        assert_relative_eq!(edge_total, vertex_total, max_relative = 1e-12);
        assert_relative_eq!(edge_total, r.ehr, max_relative = 1e-12);
    }

    #[test]
    fn equal_distance_edges_have_equal_curvature() {
        let c = Complex::build(7).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 1.2, 1.3]).unwrap();
        let g = cyclic_metric(&c, &levels).unwrap();
        let r = report(&c, &g).unwrap();
        for (e, &[i, j]) in c.edges().iter().enumerate() {
            for (e2, &[i2, j2]) in c.edges().iter().enumerate() {
                if c.distance(i, j) == c.distance(i2, j2) {
                    assert_relative_eq!(
                        r.edge_curvatures[e],
                        r.edge_curvatures[e2],
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn eight_vertex_cyclic_metric_is_csc() {
        let c = Complex::build(8).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 1.05, 1.1, 1.12]).unwrap();
        let r = report(&c, &cyclic_metric(&c, &levels).unwrap()).unwrap();
        for v in 0..8 {
            assert!(r.lcsc_residuals[v].abs() < 1e-9);
            assert!(r.vcsc_residuals[v].abs() < 1e-9);
        }
    }

    #[test]
    fn vertex_curvature_constant_for_cyclic_metrics() {
        let c = Complex::build(9).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 1.1, 1.15, 1.18]).unwrap();
        let r = report(&c, &cyclic_metric(&c, &levels).unwrap()).unwrap();
        let k0 = r.vertex_curvatures[0];
        for v in 1..9 {
            assert!((r.vertex_curvatures[v] - k0).abs() < 1e-10 * (1.0 + k0.abs()));
        }
    }

    #[test]
    fn cyclic_metric_level_multiplicities() {
        let c = Complex::build(7).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 1.2, 1.3]).unwrap();
        let g = cyclic_metric(&c, &levels).unwrap();
        for &want in levels.values() {
            let count = g.lengths().iter().filter(|&&l| l == want).count();
            assert_eq!(count, 7);
        }
    }

    #[test]
    fn cyclic_metric_rejects_unrealizable_levels() {
        let c = Complex::build(7).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 10.0, 10.0]).unwrap();
        match cyclic_metric(&c, &levels) {
            Err(CurvatureError::NonRealizableLevels { ty, .. }) => {
                assert_eq!(ty, TetraType::Standard(1));
            }
            other => panic!("expected NonRealizableLevels, got {other:?}"),
        }
    }

    #[test]
    fn cyclic_metric_rejects_wrong_level_count() {
        let c = Complex::build(7).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            cyclic_metric(&c, &levels),
            Err(CurvatureError::LevelCountMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn metric_rejects_degenerate_lengths_naming_the_tetra() {
        let c = Complex::build(5).unwrap();
        let mut lengths = vec![1.0; 10];
        lengths[c.edge_index(0, 1).unwrap()] = 1.99;
        match Metric::new(&c, lengths) {
            Err(CurvatureError::DegenerateTetra { tet, .. }) => {
                assert!(tet.contains(&0) && tet.contains(&1));
            }
            other => panic!("expected DegenerateTetra, got {other:?}"),
        }
    }

    #[test]
    fn random_asymmetric_metric_is_generically_not_csc() {
        let c = Complex::build(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let lengths: Vec<f64> = (0..c.edges().len())
            .map(|_| rng.random_range(0.95..1.05))
            .collect();
        let g = Metric::new(&c, lengths).unwrap();
        let r = report(&c, &g).unwrap();
        let csc = check_csc(&r, 1e-9);
        assert!(!csc.lcsc && !csc.vcsc);
        assert!(csc.max_lcsc_residual > 1e-4);
    }

    #[test]
    fn functionals_agree_with_report() {
        let c = Complex::build(8).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 1.05, 1.1, 1.12]).unwrap();
        let g = cyclic_metric(&c, &levels).unwrap();
        let r = report(&c, &g).unwrap();
        let f = functionals(&c, &g).unwrap();
        assert_relative_eq!(f.ehr, r.ehr, max_relative = 1e-12);
        assert_relative_eq!(f.total_length, r.total_length, max_relative = 1e-14);
        assert_relative_eq!(f.total_volume, r.total_volume, max_relative = 1e-13);
        assert_relative_eq!(f.lehr, r.lambda_length, max_relative = 1e-12);
        assert_relative_eq!(f.vehr, r.vehr, max_relative = 1e-12);
    }

    #[test]
    fn vertex_shares_sum_to_totals() {
        let c = Complex::build(9).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 1.1, 1.15, 1.18]).unwrap();
        let r = report(&c, &cyclic_metric(&c, &levels).unwrap()).unwrap();
        let lv_sum: f64 = r.vertex_lengths.iter().sum();
        let vv_sum: f64 = r.vertex_volumes.iter().sum();
        assert_relative_eq!(lv_sum, r.total_length, max_relative = 1e-13);
        assert_relative_eq!(vv_sum, 3.0 * r.total_volume, max_relative = 1e-11);
        let lr_sum: f64 = r.lcsc_residuals.iter().sum();
        let vr_sum: f64 = r.vcsc_residuals.iter().sum();
        assert!(lr_sum.abs() < 1e-11 && vr_sum.abs() < 1e-11);
    }

    #[test]
    fn report_serialization_is_deterministic() {
        let c = Complex::build(6).unwrap();
        let levels = CyclicLevels::new(vec![1.0, 1.1, 1.2]).unwrap();
        let g = cyclic_metric(&c, &levels).unwrap();
        let r1 = report(&c, &g).unwrap();
        let r2 = report(&c, &g).unwrap();
        let csc1 = check_csc(&r1, 1e-9);
        let csc2 = check_csc(&r2, 1e-9);
        assert_eq!(r1.to_json(&c, &csc1), r2.to_json(&c, &csc2));
        assert_eq!(r1.to_csv(&c, &csc1), r2.to_csv(&c, &csc2));
    }
}
