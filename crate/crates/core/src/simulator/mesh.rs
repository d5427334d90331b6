//! Icosphere receiver mesh with hierarchical point location.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::SimError;

pub type Vec3 = [f64; 3];

pub const MAX_LEVEL: u8 = 6;

/// RNG stream reserved for receptor placement; realizations use streams
/// `0..n_realizations`.
pub(crate) const RECEPTOR_STREAM: u64 = u64::MAX;

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

fn midpoint(a: Vec3, b: Vec3) -> Vec3 {
    normalize([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
}

/// Area of the spherical triangle (unit sphere), Van Oosterom-Strackee.
pub fn spherical_area(t: &[Vec3; 3]) -> f64 {
    let [a, b, c] = *t;
    let num = dot(a, cross(b, c)).abs();
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

fn icosahedron() -> Vec<[Vec3; 3]> {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let v: [Vec3; 12] = [
        [-1.0, p, 0.0],
        [1.0, p, 0.0],
        [-1.0, -p, 0.0],
        [1.0, -p, 0.0],
        [0.0, -1.0, p],
        [0.0, 1.0, p],
        [0.0, -1.0, -p],
        [0.0, 1.0, -p],
        [p, 0.0, -1.0],
        [p, 0.0, 1.0],
        [-p, 0.0, -1.0],
        [-p, 0.0, 1.0],
    ];
    let faces: [[usize; 3]; 20] = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    faces
        .iter()
        .map(|f| {
            let (a, mut b, mut c) = (normalize(v[f[0]]), normalize(v[f[1]]), normalize(v[f[2]]));
            // Counter-clockwise seen from outside.
            if dot(cross([b[0] - a[0], b[1] - a[1], b[2] - a[2]], [c[0] - a[0], c[1] - a[1], c[2] - a[2]]), a) < 0.0 {
                std::mem::swap(&mut b, &mut c);
            }
            [a, b, c]
        })
        .collect()
}

/// Children of `t` in the fixed order used by point location.
fn subdivide(t: &[Vec3; 3]) -> [[Vec3; 3]; 4] {
    let [a, b, c] = *t;
    let (ab, bc, ca) = (midpoint(a, b), midpoint(b, c), midpoint(c, a));
    [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
}

/// Smallest of the three edge orientations of `x` against `t`; positive
/// strictly inside.
#[inline]
fn inside_margin(t: &[Vec3; 3], x: Vec3) -> f64 {
    let [a, b, c] = *t;
    dot(cross(a, b), x).min(dot(cross(b, c), x)).min(dot(cross(c, a), x))
}

/// Area statistics recorded at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub triangles: usize,
    pub total_area: f64,
    pub min_area: f64,
    pub max_area: f64,
    /// `max_area / min_area`.
    pub area_ratio: f64,
    /// Largest `| |v| - 1 |` over all vertices.
    pub max_radius_error: f64,
}

/// Subdivided icosahedron on the unit sphere with a receptor subset.
///
/// Triangle `i` at level `k` has children `4i..4i+4` at level `k + 1`, so a
/// direction is located by descending from the 20 faces.
#[derive(Debug, Clone)]
pub struct ReceiverMesh {
    level: u8,
    levels: Vec<Vec<[Vec3; 3]>>,
    is_receptor: Vec<bool>,
    receptor_ids: Vec<u32>,
    /// Mean triangle area `4π / count`.
    pub triangle_area: f64,
    pub stats: MeshStats,
}

/// Icosahedron subdivided `level` times, projected to the unit sphere.
pub fn build_mesh(level: u8) -> Result<ReceiverMesh, SimError> {
    if level > MAX_LEVEL {
        return Err(SimError::InvalidConfig(format!("subdivision level {level} exceeds {MAX_LEVEL}")));
    }
    let mut levels = vec![icosahedron()];
    for k in 0..level as usize {
        let next: Vec<[Vec3; 3]> = levels[k].iter().flat_map(subdivide).collect();
        levels.push(next);
    }
    let leaves = &levels[level as usize];
    let areas: Vec<f64> = leaves.iter().map(spherical_area).collect();
    let min_area = areas.iter().copied().fold(f64::INFINITY, f64::min);
    let max_area = areas.iter().copied().fold(0.0, f64::max);
    let max_radius_error = leaves
        .iter()
        .flat_map(|t| t.iter())
        .map(|v| (norm(*v) - 1.0).abs())
        .fold(0.0, f64::max);
    let count = leaves.len();
    let stats = MeshStats {
        triangles: count,
        total_area: areas.iter().sum(),
        min_area,
        max_area,
        area_ratio: max_area / min_area,
        max_radius_error,
    };
    Ok(ReceiverMesh {
        level,
        levels,
        is_receptor: vec![false; count],
        receptor_ids: Vec::new(),
        triangle_area: 4.0 * PI / count as f64,
        stats,
    })
}

/// Mark a uniformly random `m`-subset of triangles as receptors,
/// deterministically for a given `seed`.
pub fn assign_receptors(mut mesh: ReceiverMesh, m: usize, seed: u64) -> Result<ReceiverMesh, SimError> {
    let count = mesh.triangle_count();
    if m > count {
        return Err(SimError::InvalidConfig(format!("{m} receptors requested on a {count}-triangle mesh")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(RECEPTOR_STREAM);
    let mut ids: Vec<u32> = if m == count {
        (0..count as u32).collect()
    } else {
        sample(&mut rng, count, m).into_iter().map(|i| i as u32).collect()
    };
    ids.sort_unstable();
    mesh.is_receptor = vec![false; count];
    for &i in &ids {
        mesh.is_receptor[i as usize] = true;
    }
    mesh.receptor_ids = ids;
    Ok(mesh)
}

impl ReceiverMesh {
    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles().len()
    }

    pub fn triangles(&self) -> &[[Vec3; 3]] {
        &self.levels[self.level as usize]
    }

    /// Sorted receptor triangle indices.
    pub fn receptor_ids(&self) -> &[u32] {
        &self.receptor_ids
    }

    #[inline]
    pub fn is_receptor(&self, id: usize) -> bool {
        self.is_receptor[id]
    }

    /// Index of the leaf triangle containing direction `x` (any length).
    /// Points on shared edges resolve to one of the adjacent triangles.
    pub fn locate(&self, x: Vec3) -> usize {
        let best = |candidates: std::ops::Range<usize>, tris: &[[Vec3; 3]]| {
            let mut best = candidates.start;
            let mut margin = f64::NEG_INFINITY;
            for i in candidates {
                let m = inside_margin(&tris[i], x);
                if m > margin {
                    margin = m;
                    best = i;
                }
            }
            best
        };
        let mut idx = best(0..20, &self.levels[0]);
        for k in 1..=self.level as usize {
            idx = best(4 * idx..4 * idx + 4, &self.levels[k]);
        }
        idx
    }
}
