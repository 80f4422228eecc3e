use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BBox, ConvexPolytope, Region, Scene, ThinTriangle};
use crate::error::SceneError;
use crate::exact::{HalfSpace, Point3, Scalar, Side};

pub const DEFAULT_MAX_FACETS: usize = 12;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    bbox: [[Scalar; 3]; 2],
    regions: Vec<RegionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RegionDoc {
    Polytope { id: usize, halfspaces: Vec<(Scalar, Scalar, Scalar, Scalar, Side)> },
    Triangle { id: usize, vertices: [[Scalar; 3]; 3] },
}

fn point([x, y, z]: [Scalar; 3]) -> Point3 {
    Point3::new(x, y, z)
}

fn coords(p: &Point3) -> [Scalar; 3] {
    [p.x.clone(), p.y.clone(), p.z.clone()]
}

impl Scene {
    /// Parses and validates a scene with the default facet limit.
    pub fn from_json_str(s: &str) -> Result<Scene, SceneError> {
        Self::from_json_str_with(s, DEFAULT_MAX_FACETS)
    }

    pub fn from_json_str_with(s: &str, max_facets: usize) -> Result<Scene, SceneError> {
        let doc: SceneDoc = serde_json::from_str(s).map_err(|e| SceneError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let [lo, hi] = doc.bbox;
        let bbox = BBox::new(point(lo), point(hi))?;
        let mut regions = Vec::with_capacity(doc.regions.len());
        for (expect, r) in doc.regions.into_iter().enumerate() {
            let (id, region) = match r {
                RegionDoc::Polytope { id, halfspaces } => {
                    let hs = halfspaces
                        .into_iter()
                        .map(|(a, b, c, d, side)| HalfSpace::new(a, b, c, d, side))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| SceneError::Invariant(format!("region {id}: {e}")))?;
                    let p = ConvexPolytope::bounded_by(hs, &bbox.lo, &bbox.hi)
                        .map_err(|e| SceneError::Invariant(format!("region {id}: {e}")))?;
                    (id, Region::Polytope(p))
                }
                RegionDoc::Triangle { id, vertices } => {
                    let t = ThinTriangle::new(vertices.map(point))
                        .map_err(|e| SceneError::Invariant(format!("region {id}: {e}")))?;
                    (id, Region::Triangle(t))
                }
            };
            if id != expect {
                return Err(SceneError::Invariant(format!("region ids must be 0..n in order; found {id} at {expect}")));
            }
            regions.push(region);
        }
        Scene::new(bbox, regions, max_facets)
    }

    pub fn to_json_string(&self) -> String {
        let doc = SceneDoc {
            bbox: [coords(&self.bbox.lo), coords(&self.bbox.hi)],
            regions: self
                .regions
                .iter()
                .enumerate()
                .map(|(id, r)| match r {
                    Region::Polytope(p) => RegionDoc::Polytope {
                        id,
                        halfspaces: p
                            .halfspaces()
                            .iter()
                            .map(|h| (h.plane.a.clone(), h.plane.b.clone(), h.plane.c.clone(), h.plane.d.clone(), h.side))
                            .collect(),
                    },
                    Region::Triangle(t) => {
                        RegionDoc::Triangle { id, vertices: [coords(&t.vertices()[0]), coords(&t.vertices()[1]), coords(&t.vertices()[2])] }
                    }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("scene serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scene, SceneError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SceneError> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}
