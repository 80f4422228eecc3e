//! Minimization diagrams of trivariate functions whose pairwise differences are affine.
//!
//! The cell of function `a` is the part of the box where `a` attains the lower envelope.
//! For linear functions and for squared distances to sites (offset paraboloids) every
//! comparison `f_a <= f_b` is a halfspace, so each cell is a convex polytope and its vertical
//! decomposition comes from [`vd_convex_cell`]. A prism of the diagram lifts to the
//! semi-unbounded 4D region below the envelope over it.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::EnvelopeError;
use crate::exact::{HalfSpace, Point3, Scalar, Side};
use crate::scene::{BBox, ConvexPolytope};
use crate::vd::{vd_convex_cell, Obstacle, Prism};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TrivariateFunction {
    /// `w = a x + b y + c z + d`.
    Linear { id: usize, coeffs: [Scalar; 4] },
    /// `w = |q - site|^2`.
    Paraboloid { id: usize, site: [Scalar; 3] },
}

impl TrivariateFunction {
    pub fn linear(id: usize, coeffs: [Scalar; 4]) -> Self {
        TrivariateFunction::Linear { id, coeffs }
    }

    pub fn paraboloid(id: usize, site: &Point3) -> Self {
        TrivariateFunction::Paraboloid { id, site: [site.x.clone(), site.y.clone(), site.z.clone()] }
    }

    pub fn id(&self) -> usize {
        match self {
            TrivariateFunction::Linear { id, .. } | TrivariateFunction::Paraboloid { id, .. } => *id,
        }
    }

    fn is_linear(&self) -> bool {
        matches!(self, TrivariateFunction::Linear { .. })
    }

    pub fn eval(&self, q: &Point3) -> Scalar {
        match self {
            TrivariateFunction::Linear { coeffs: [a, b, c, d], .. } => a * &q.x + b * &q.y + c * &q.z + d,
            TrivariateFunction::Paraboloid { site: [x, y, z], .. } => {
                let (dx, dy, dz) = (&q.x - x, &q.y - y, &q.z - z);
                &dx * &dx + &dy * &dy + &dz * &dz
            }
        }
    }

    /// Coefficients `[a, b, c, d]` of the affine function `self - other`.
    fn difference(&self, other: &Self) -> [Scalar; 4] {
        match (self, other) {
            (TrivariateFunction::Linear { coeffs: p, .. }, TrivariateFunction::Linear { coeffs: q, .. }) => {
                [&p[0] - &q[0], &p[1] - &q[1], &p[2] - &q[2], &p[3] - &q[3]]
            }
            (TrivariateFunction::Paraboloid { site: p, .. }, TrivariateFunction::Paraboloid { site: q, .. }) => {
                let two = Scalar::from(2);
                let sq = |s: &[Scalar; 3]| &s[0] * &s[0] + &s[1] * &s[1] + &s[2] * &s[2];
                [&two * (&q[0] - &p[0]), &two * (&q[1] - &p[1]), &two * (&q[2] - &p[2]), sq(p) - sq(q)]
            }
            _ => unreachable!("families are checked before comparing"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionsDoc {
    pub functions: Vec<TrivariateFunction>,
    pub bbox: [[Scalar; 3]; 2],
}

impl FunctionsDoc {
    pub fn new(functions: Vec<TrivariateFunction>, bbox: &BBox) -> Self {
        let c = |p: &Point3| [p.x.clone(), p.y.clone(), p.z.clone()];
        FunctionsDoc { functions, bbox: [c(&bbox.lo), c(&bbox.hi)] }
    }

    pub fn bbox(&self) -> Result<BBox, EnvelopeError> {
        let [lo, hi] = self.bbox.clone();
        let p = |[x, y, z]: [Scalar; 3]| Point3::new(x, y, z);
        BBox::new(p(lo), p(hi)).map_err(|e| EnvelopeError::DegenerateInput(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<FunctionsDoc, EnvelopeError> {
        let text = std::fs::read_to_string(path).map_err(|e| EnvelopeError::DegenerateInput(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| EnvelopeError::DegenerateInput(e.to_string()))
    }
}

/// Region of the box where one function attains the envelope.
#[derive(Clone, Debug)]
pub struct Cell {
    pub function: usize,
    pub polytope: ConvexPolytope,
}

#[derive(Clone, Debug)]
pub struct MinDiagram {
    pub bbox: BBox,
    pub functions: Vec<TrivariateFunction>,
    /// Nonempty cells in function order.
    pub cells: Vec<Cell>,
    /// Prisms of all cells; each is labeled with its function id.
    pub prisms: Vec<Prism>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvelopeValue {
    pub value: Scalar,
    /// Smallest id attaining the minimum.
    pub argmin: usize,
    /// Whether several functions attain the minimum.
    pub tie: bool,
}

pub fn envelope_value(functions: &[TrivariateFunction], q: &Point3) -> Option<EnvelopeValue> {
    let mut best: Option<EnvelopeValue> = None;
    for f in functions {
        let v = f.eval(q);
        best = Some(match best {
            None => EnvelopeValue { value: v, argmin: f.id(), tie: false },
            Some(b) if v < b.value => EnvelopeValue { value: v, argmin: f.id(), tie: false },
            Some(b) if v == b.value => EnvelopeValue { argmin: b.argmin.min(f.id()), tie: true, ..b },
            Some(b) => b,
        });
    }
    best
}

fn check_family(functions: &[TrivariateFunction]) -> Result<(), EnvelopeError> {
    let Some(first) = functions.first() else { return Err(EnvelopeError::Empty) };
    if functions.iter().any(|f| f.is_linear() != first.is_linear()) {
        return Err(EnvelopeError::MixedFamilies);
    }
    Ok(())
}

pub fn reduce_to_cells(functions: &[TrivariateFunction], bbox: &BBox) -> Result<Vec<Cell>, EnvelopeError> {
    check_family(functions)?;
    let cells: Vec<Option<Cell>> = functions
        .par_iter()
        .map(|f| cell_of(f, functions, bbox))
        .collect::<Result<_, _>>()?;
    Ok(cells.into_iter().flatten().collect())
}

fn cell_of(f: &TrivariateFunction, functions: &[TrivariateFunction], bbox: &BBox) -> Result<Option<Cell>, EnvelopeError> {
    let mut hs = bbox.halfspaces();
    for g in functions.iter().filter(|g| g.id() != f.id()) {
        let [a, b, c, d] = f.difference(g);
        if a.is_zero() && b.is_zero() && c.is_zero() {
            if d.is_zero() {
                return Err(EnvelopeError::DegenerateInput(format!("functions {} and {} coincide", f.id(), g.id())));
            }
            if d.is_positive() {
                return Ok(None);
            }
            continue;
        }
        hs.push(HalfSpace::new(a, b, c, d, Side::Le)?);
    }
    Ok(ConvexPolytope::bounded_by(hs, &bbox.lo, &bbox.hi).ok().map(|polytope| Cell { function: f.id(), polytope }))
}

pub fn build_min_diagram_vd(functions: &[TrivariateFunction], bbox: &BBox) -> Result<MinDiagram, EnvelopeError> {
    let cells = reduce_to_cells(functions, bbox)?;
    let per_cell: Vec<Vec<Prism>> = cells
        .par_iter()
        .map(|c| vd_convex_cell(&Obstacle::from_polytope(c.function, &c.polytope)?))
        .collect::<Result<_, _>>()?;
    Ok(MinDiagram { bbox: bbox.clone(), functions: functions.to_vec(), cells, prisms: per_cell.concat() })
}

impl MinDiagram {
    pub fn function(&self, id: usize) -> Option<&TrivariateFunction> {
        self.functions.iter().find(|f| f.id() == id)
    }

    /// First prism whose closure contains `q`.
    pub fn locate(&self, q: &Point3) -> Option<usize> {
        self.prisms.iter().position(|p| p.contains(q))
    }
}

/// `{(x, y, z, w) : (x, y, z) in prism, w <= f(x, y, z)}`.
#[derive(Clone, Debug)]
pub struct LiftedPrism {
    pub prism: Prism,
    pub function: TrivariateFunction,
}

impl LiftedPrism {
    pub fn contains(&self, q: &Point3, w: &Scalar) -> bool {
        self.prism.contains(q) && *w <= self.function.eval(q)
    }
}

pub fn lift_prism(diagram: &MinDiagram, prism: usize, function: usize) -> Result<LiftedPrism, EnvelopeError> {
    let p = &diagram.prisms[prism];
    let expected = p.label[0];
    if expected != function {
        return Err(EnvelopeError::LabelMismatch { expected, got: function });
    }
    let f = diagram.function(function).ok_or(EnvelopeError::LabelMismatch { expected, got: function })?;
    Ok(LiftedPrism { prism: p.clone(), function: f.clone() })
}

/// `n` squared-distance functions to random sites with coordinates on a 1/1024 grid inside `bbox`.
pub fn random_paraboloids(n: usize, seed: u64, bbox: &BBox) -> Vec<TrivariateFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coord = |lo: &Scalar, hi: &Scalar| {
        let t = Scalar::ratio(rng.gen_range(1..1024), 1024);
        lo + &(t * (hi - lo))
    };
    (0..n)
        .map(|id| {
            let site = Point3::new(
                coord(&bbox.lo.x, &bbox.hi.x),
                coord(&bbox.lo.y, &bbox.hi.y),
                coord(&bbox.lo.z, &bbox.hi.z),
            );
            TrivariateFunction::paraboloid(id, &site)
        })
        .collect()
}

/// `n` linear functions with small random integer coefficients and pairwise distinct gradients.
pub fn random_linear(n: usize, seed: u64) -> Vec<TrivariateFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let g = [0; 3].map(|_| rng.gen_range(-64i64..=64));
        if !seen.insert(g) {
            continue;
        }
        let d = rng.gen_range(-512i64..=512);
        out.push(TrivariateFunction::linear(out.len(), [g[0].into(), g[1].into(), g[2].into(), d.into()]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> BBox {
        BBox::new(Point3::from_ints(-1, -1, -1), Point3::from_ints(1, 1, 1)).unwrap()
    }

    fn lin(id: usize, c: [i64; 4]) -> TrivariateFunction {
        TrivariateFunction::linear(id, c.map(Scalar::from))
    }

    #[test]
    fn zero_and_x_split_the_box() {
        let fs = vec![lin(0, [0, 0, 0, 0]), lin(1, [1, 0, 0, 0])];
        let d = build_min_diagram_vd(&fs, &unit_box()).unwrap();
        assert_eq!(d.cells.len(), 2);
        assert_eq!(d.cells[0].polytope.volume(), Scalar::from(4));
        assert!(d.cells[0].polytope.contains(&Point3::from_ints(1, 0, 0)));
        assert!(d.cells[1].polytope.contains(&Point3::from_ints(-1, 0, 0)));
        let total: Scalar = d.prisms.iter().map(Prism::volume).sum();
        assert_eq!(total, Scalar::from(8));
        let e = envelope_value(&fs, &Point3::from_ints(-1, 0, 0)).unwrap();
        assert_eq!((e.value, e.argmin, e.tie), (Scalar::from(-1), 1, false));
    }

    #[test]
    fn single_function_is_the_box() {
        let d = build_min_diagram_vd(&[lin(0, [1, 2, 3, 4])], &unit_box()).unwrap();
        assert_eq!(d.prisms.len(), 1);
        assert_eq!(d.prisms[0].label, vec![0]);
    }

    #[test]
    fn two_sites_split_by_bisector() {
        let fs = vec![
            TrivariateFunction::paraboloid(0, &Point3::from_ints(-1, 0, 0)),
            TrivariateFunction::paraboloid(1, &Point3::from_ints(1, 0, 0)),
        ];
        let b = BBox::cube(-4, 4);
        let cells = reduce_to_cells(&fs, &b).unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].polytope.volume(), Scalar::from(256));
        let e = envelope_value(&fs, &Point3::from_ints(0, 3, 1)).unwrap();
        assert!(e.tie);
        assert_eq!(e.argmin, 0);
    }

    #[test]
    fn random_sites_each_own_their_cell() {
        let b = BBox::cube(0, 16);
        let fs = random_paraboloids(8, 3, &b);
        let d = build_min_diagram_vd(&fs, &b).unwrap();
        assert_eq!(d.cells.len(), 8);
        for (c, f) in d.cells.iter().zip(&fs) {
            let TrivariateFunction::Paraboloid { site: [x, y, z], .. } = f else { unreachable!() };
            assert!(c.polytope.contains(&Point3::new(x.clone(), y.clone(), z.clone())));
        }
        let total: Scalar = d.prisms.iter().map(Prism::volume).sum();
        assert_eq!(total, b.volume());
    }

    #[test]
    fn lifted_prism_membership() {
        let b = unit_box();
        let fs = vec![lin(0, [0, 0, 0, 0]), lin(1, [1, 0, 0, 0])];
        let d = build_min_diagram_vd(&fs, &b).unwrap();
        let q = Point3::new(Scalar::ratio(-1, 2), Scalar::ratio(1, 3), Scalar::ratio(1, 5));
        let i = d.locate(&q).unwrap();
        let e = envelope_value(&fs, &q).unwrap();
        let lifted = lift_prism(&d, i, e.argmin).unwrap();
        assert!(lifted.contains(&q, &(&e.value - &Scalar::one())));
        assert!(!lifted.contains(&q, &(&e.value + &Scalar::one())));
        assert!(matches!(lift_prism(&d, i, 1 - e.argmin), Err(EnvelopeError::LabelMismatch { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        let b = unit_box();
        assert!(matches!(reduce_to_cells(&[], &b), Err(EnvelopeError::Empty)));
        let mixed = vec![lin(0, [0, 0, 0, 0]), TrivariateFunction::paraboloid(1, &Point3::from_ints(0, 0, 0))];
        assert!(matches!(reduce_to_cells(&mixed, &b), Err(EnvelopeError::MixedFamilies)));
        let same = vec![lin(0, [1, 0, 0, 0]), lin(1, [1, 0, 0, 0])];
        assert!(matches!(reduce_to_cells(&same, &b), Err(EnvelopeError::DegenerateInput(_))));
        let offset = vec![lin(0, [1, 0, 0, 0]), lin(1, [1, 0, 0, 1])];
        assert_eq!(reduce_to_cells(&offset, &b).unwrap().len(), 1);
    }

    #[test]
    fn functions_json_round_trip() {
        let b = unit_box();
        let doc = FunctionsDoc::new(vec![lin(0, [1, 2, 3, 4])], &b);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains("\"type\":\"linear\""));
        let back: FunctionsDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.bbox().unwrap(), b);
    }
}
