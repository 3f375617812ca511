//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Points and vectors cross the boundary as comma-separated coordinate
//! strings (`"1,0,1/2"`), results as flat `Float64Array`s or JSON strings.

use nilgeo::geodesy::{self, segment_between};
use nilgeo::scalar::parse_rational;
use nilgeo::similarity::fixed_point;
use nilgeo::{catalog, dynamics, Group, GroupPoint, HomogeneousNorm, Rational, Similarity};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn load(name: &str) -> Result<catalog::CatalogEntry, JsError> {
    catalog::get(name).map_err(err)
}

fn norm(group: &Group) -> Result<HomogeneousNorm, JsError> {
    HomogeneousNorm::new(group.clone(), 1.0).map_err(err)
}

fn point(text: &str, group: &Group) -> Result<GroupPoint<Rational>, JsError> {
    let coords = text
        .split(',')
        .map(|c| parse_rational(c.trim()).ok_or_else(|| JsError::new(&format!("`{c}` is not a number"))))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != group.dim() {
        return Err(JsError::new(&format!(
            "expected {} coordinates, found {}",
            group.dim(),
            coords.len()
        )));
    }
    Ok(GroupPoint::new(coords))
}

/// Catalog names with dimensions, as JSON.
#[wasm_bindgen]
pub fn catalog_json() -> String {
    serde_json::to_string(&catalog::list()).unwrap_or_default()
}

/// Gauge norms on an `n x n` grid over `[-extent, extent]^2` in the plane
/// spanned by coordinates `a` and `b`; the other coordinates are zero.
/// Row-major, first coordinate varying fastest.
#[wasm_bindgen]
pub fn gauge_slice(group: &str, a: usize, b: usize, extent: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let entry = load(group)?;
    let dim = entry.group.dim();
    if a >= dim || b >= dim || a == b {
        return Err(JsError::new(&format!("plane axes must be distinct and below {dim}")));
    }
    let norm = norm(&entry.group)?;
    let n = n.clamp(2, 1024);
    let step = 2.0 * extent / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    let mut coords = vec![0.0; dim];
    for row in 0..n {
        for col in 0..n {
            coords[a] = -extent + col as f64 * step;
            coords[b] = extent - row as f64 * step;
            out.push(norm.gauge_coords(&coords));
        }
    }
    Ok(out)
}

/// The geodesic segment from `x` to `y`: `samples + 1` rows of
/// `[t, x1..xn, gauge]`, flattened.
#[wasm_bindgen]
pub fn geodesic_trace(group: &str, x: &str, y: &str, samples: usize) -> Result<Vec<f64>, JsError> {
    let entry = load(group)?;
    let g = &entry.group;
    let seg = segment_between(g, &point(x, g)?, &point(y, g)?).map_err(err)?;
    let rows = geodesy::trace(&norm(g)?, &seg, samples.clamp(1, 2000)).map_err(err)?;
    Ok(rows
        .into_iter()
        .flat_map(|r| std::iter::once(r.t).chain(r.coords).chain(std::iter::once(r.gauge)))
        .collect())
}

/// Orbit of `x` under `f(y) = c . delta_lambda(P y)`, with `P` the group's
/// `rotation`-th sample rotation (0 for none), and the fixed point of `f`.
#[wasm_bindgen]
pub fn orbit_json(
    group: &str,
    lambda: &str,
    rotation: usize,
    translation: &str,
    x: &str,
    steps: usize,
) -> Result<String, JsError> {
    let entry = load(group)?;
    let g = &entry.group;
    let lambda = parse_rational(lambda).ok_or_else(|| JsError::new("lambda is not a number"))?;
    let p = match rotation {
        0 => nilgeo::linalg::Matrix::identity(g.dim()),
        k => entry
            .rotations
            .get(k - 1)
            .cloned()
            .ok_or_else(|| JsError::new(&format!("{group} has {} sample rotations", entry.rotations.len())))?,
    };
    let f = Similarity::new(g, lambda, p, point(translation, g)?).map_err(err)?;
    let n = norm(g)?;
    let orbit = dynamics::orbit(&f.to_f64(), &point(x, g)?.to_f64(), steps.min(500)).map_err(err)?;
    let fixed = fixed_point(&n, &f).ok().map(|fp| fp.point.to_f64().into_coords());
    Ok(json!({
        "orbit": orbit.iter().map(|q| q.coords().to_vec()).collect::<Vec<_>>(),
        "gauge": orbit.iter().map(|q| n.gauge_norm(q)).collect::<Vec<_>>(),
        "fixed_point": fixed,
    })
    .to_string())
}
