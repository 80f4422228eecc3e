//! Floating-point filter for the interior-intersection test between a prism and a region.
//!
//! The footprint is clipped twice in `f64`, once with every constraint loosened by a
//! margin far above rounding error and once with every constraint tightened by it. An
//! empty loosened footprint proves the interiors are disjoint and a fat tightened one
//! proves they meet; anything in between is left to exact arithmetic.

use crate::exact::{Affine2, Trapezoid, ZPlane};

const MARGIN: f64 = 1e-9;

pub(crate) type Line = [f64; 3];

pub(crate) fn line_of(f: &Affine2) -> Line {
    [f.a.to_f64(), f.b.to_f64(), f.c.to_f64()]
}

pub(crate) fn zplane_of(z: &ZPlane) -> Line {
    [z.a.to_f64(), z.b.to_f64(), z.c.to_f64()]
}

pub(crate) fn corners_of(t: &Trapezoid) -> Vec<[f64; 2]> {
    t.corners().iter().map(|c| [c.x.to_f64(), c.y.to_f64()]).collect()
}

fn diff(a: &Line, b: &Line) -> Line {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn clip(poly: &[[f64; 2]], f: &Line, shift: f64) -> Vec<[f64; 2]> {
    let vals: Vec<f64> = poly.iter().map(|p| f[0] * p[0] + f[1] * p[1] + f[2] + shift).collect();
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let j = (i + 1) % poly.len();
        if vals[i] >= 0.0 {
            out.push(poly[i]);
        }
        if (vals[i] > 0.0 && vals[j] < 0.0) || (vals[i] < 0.0 && vals[j] > 0.0) {
            let t = vals[i] / (vals[i] - vals[j]);
            out.push([poly[i][0] + t * (poly[j][0] - poly[i][0]), poly[i][1] + t * (poly[j][1] - poly[i][1])]);
        }
    }
    out
}

fn area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1]).sum::<f64>() / 2.0
}

/// `Some(true)` if the constraints `f > 0` certainly cut a region of positive area out of
/// `base`, `Some(false)` if they certainly leave nothing, `None` if undecided.
pub(crate) fn decide(base: &[[f64; 2]], constraints: &[Line]) -> Option<bool> {
    let scale = base.iter().flat_map(|p| [p[0].abs(), p[1].abs()]).fold(1.0f64, f64::max);
    if !scale.is_finite() || constraints.iter().flatten().any(|c| !c.is_finite()) {
        return None;
    }
    let mut outer = base.to_vec();
    let mut inner = base.to_vec();
    for f in constraints {
        let slack = MARGIN * (f[0].abs() * scale + f[1].abs() * scale + f[2].abs());
        outer = clip(&outer, f, slack);
        if outer.len() < 3 {
            return Some(false);
        }
        if inner.len() >= 3 {
            inner = clip(&inner, f, -slack);
        }
    }
    if inner.len() >= 3 && area(&inner) > MARGIN * scale * scale {
        return Some(true);
    }
    None
}

pub(crate) fn minus(a: &Line, b: &Line) -> Line {
    diff(a, b)
}
