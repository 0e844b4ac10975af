use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MIN_DIRECTIONS: usize = 2;
pub const MAX_DIRECTIONS: usize = 16;

/// Smallest angle allowed between two mesh axes (or an axis and the
/// antipode of another).
const MIN_SEPARATION: f64 = 1e-6;

/// Finite set of Alice measurement axes together with the inradius of the
/// symmetric polytope `conv{±n_k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionMesh {
    directions: Vec<[f64; 3]>,
    eta: Option<f64>,
}

fn norm(v: [f64; 3]) -> f64 {
    dot(v, v).sqrt()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

impl DirectionMesh {
    /// Builds a mesh from arbitrary nonzero axes; vectors are normalized.
    /// The shrinking factor is computed eagerly and left empty when the hull
    /// is degenerate.
    pub fn from_directions(directions: Vec<[f64; 3]>) -> Result<Self> {
        if directions.len() < MIN_DIRECTIONS {
            return Err(Error::MeshTooSmall {
                min: MIN_DIRECTIONS,
                got: directions.len(),
            });
        }
        if directions.len() > MAX_DIRECTIONS {
            return Err(Error::MeshTooLarge {
                max: MAX_DIRECTIONS,
                got: directions.len(),
            });
        }
        let mut unit = Vec::with_capacity(directions.len());
        for d in directions {
            let n = norm(d);
            if !(n > 1e-12) || !n.is_finite() {
                return Err(Error::InvalidMesh(format!("direction {d:?} has zero length")));
            }
            unit.push([d[0] / n, d[1] / n, d[2] / n]);
        }
        for i in 0..unit.len() {
            for j in i + 1..unit.len() {
                if norm(cross(unit[i], unit[j])) < MIN_SEPARATION {
                    return Err(Error::InvalidMesh(format!(
                        "directions {i} and {j} are (anti)parallel"
                    )));
                }
            }
        }
        let eta = inradius(&unit).ok();
        Ok(Self {
            directions: unit,
            eta,
        })
    }

    pub fn directions(&self) -> &[[f64; 3]] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Cached shrinking factor.
    pub fn eta(&self) -> Result<f64> {
        self.eta.ok_or(Error::DegenerateHull)
    }

    /// A copy of this mesh with one more axis.
    pub fn with_direction(&self, d: [f64; 3]) -> Result<Self> {
        let mut dirs = self.directions.clone();
        dirs.push(d);
        Self::from_directions(dirs)
    }
}

/// Axes x, y, z: the octahedron.
pub fn octahedral_mesh() -> DirectionMesh {
    DirectionMesh::from_directions(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        .expect("octahedral mesh is valid")
}

/// The six vertex axes of the icosahedron.
pub fn icosahedral_mesh() -> DirectionMesh {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    DirectionMesh::from_directions(vec![
        [0.0, 1.0, phi],
        [0.0, 1.0, -phi],
        [1.0, phi, 0.0],
        [1.0, -phi, 0.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, 1.0],
    ])
    .expect("icosahedral mesh is valid")
}

/// `n` axes on a golden-angle spiral over the upper hemisphere, so that
/// together with their antipodes they cover the sphere evenly. `n = 3` and
/// `n = 6` return the octahedral and icosahedral meshes.
pub fn fibonacci_mesh(n: usize) -> Result<DirectionMesh> {
    if n < MIN_DIRECTIONS {
        return Err(Error::MeshTooSmall {
            min: MIN_DIRECTIONS,
            got: n,
        });
    }
    if n > MAX_DIRECTIONS {
        return Err(Error::MeshTooLarge {
            max: MAX_DIRECTIONS,
            got: n,
        });
    }
    match n {
        3 => return Ok(octahedral_mesh()),
        6 => return Ok(icosahedral_mesh()),
        _ => {}
    }
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let dirs = (0..n)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect();
    DirectionMesh::from_directions(dirs)
}

/// Recomputes the inradius of `conv{±n_k}` from scratch.
pub fn shrinking_factor(mesh: &DirectionMesh) -> Result<f64> {
    inradius(mesh.directions())
}

/// Inradius of `conv{±n_k}` by brute-force facet enumeration: every triple
/// of vertices spanning a supporting plane is a facet (or lies in one), and
/// the inradius is the smallest origin-to-plane distance among them.
fn inradius(dirs: &[[f64; 3]]) -> Result<f64> {
    let pts: Vec<[f64; 3]> = dirs
        .iter()
        .flat_map(|&d| [d, [-d[0], -d[1], -d[2]]])
        .collect();
    let n = pts.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut normal = cross(sub(pts[j], pts[i]), sub(pts[k], pts[i]));
                let len = norm(normal);
                if len < 1e-12 {
                    continue;
                }
                normal = [normal[0] / len, normal[1] / len, normal[2] / len];
                let mut offset = dot(normal, pts[i]);
                if offset < 0.0 {
                    normal = [-normal[0], -normal[1], -normal[2]];
                    offset = -offset;
                }
                if offset >= best {
                    continue;
                }
                let supporting = pts.iter().all(|&q| dot(normal, q) <= offset + 1e-12);
                if supporting {
                    best = offset;
                }
            }
        }
    }
    if !best.is_finite() || best < 1e-9 {
        return Err(Error::DegenerateHull);
    }
    Ok(best)
}
