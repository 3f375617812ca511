//! Built-in groups.
//!
//! Names: `abelian<n>`, `heisenberg<2n+1>`, `engel4`, `free-nilpotent-2-3`,
//! `quaternionic-heisenberg7`, `damek-ricci6`, `rank2-counterexample`.
//! Every entry is validated when it is built.

use serde::Serialize;

use crate::algebra::{AlgebraConfig, LieAlgebra, LieAlgebraSpec};
use crate::error::{Error, Result};
use crate::group::{Group, GroupPoint};
use crate::linalg::Matrix;
use crate::scalar::{rational, Rational};
use crate::similarity::{validate_rotation, Similarity};

/// Largest dimension accepted for the parametrized families.
pub const MAX_FAMILY_DIM: usize = 31;

pub const LISTED: &[&str] = &[
    "abelian1",
    "abelian2",
    "abelian3",
    "abelian4",
    "heisenberg3",
    "heisenberg5",
    "engel4",
    "free-nilpotent-2-3",
    "quaternionic-heisenberg7",
    "damek-ricci6",
    "rank2-counterexample",
];

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub group: Group,
    /// Rotation parts of sample similarities, all validated.
    pub rotations: Vec<Matrix<Rational>>,
    /// Number of independent dilatation families (1 for homogeneous groups).
    pub rank: u8,
    pub note: &'static str,
    /// Similarities generating the sample holonomy.
    pub generators: Vec<Similarity<Rational>>,
    /// Holonomy elements that are not similarities of the single dilatation
    /// family, recorded as text.
    pub extra_generators: Vec<&'static str>,
}

impl CatalogEntry {
    pub fn spec(&self) -> &LieAlgebraSpec {
        self.group.algebra().spec()
    }

    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    pub fn step(&self) -> usize {
        self.group.algebra().step()
    }

    pub fn config(&self) -> AlgebraConfig {
        self.spec().to_config()
    }

    pub fn summary(&self) -> EntrySummary {
        EntrySummary {
            name: self.name.clone(),
            dim: self.dim(),
            step: self.step(),
            rank: self.rank,
            weights: self.group.algebra().weights().iter().map(|w| w.approx()).collect(),
            rotations: self.rotations.len(),
            note: self.note,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntrySummary {
    pub name: String,
    pub dim: usize,
    pub step: usize,
    pub rank: u8,
    pub weights: Vec<f64>,
    pub rotations: usize,
    pub note: &'static str,
}

pub fn list() -> Vec<EntrySummary> {
    LISTED.iter().map(|n| get(n).expect("listed entries build").summary()).collect()
}

pub fn get(name: &str) -> Result<CatalogEntry> {
    let unknown = || Error::UnknownGroup(name.to_string());
    let family_dim = |prefix: &str| -> Option<usize> {
        name.strip_prefix(prefix)
            .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
            .and_then(|d| d.parse().ok())
    };
    let built = match name {
        "engel4" => engel4(),
        "free-nilpotent-2-3" => free_nilpotent_2_3(),
        "quaternionic-heisenberg7" => quaternionic(3, "quaternionic-heisenberg7", QUATERNIONIC_NOTE),
        "damek-ricci6" => quaternionic(2, "damek-ricci6", DAMEK_RICCI_NOTE),
        "rank2-counterexample" => rank2(),
        _ => {
            if let Some(n) = family_dim("abelian") {
                if n == 0 || n > MAX_FAMILY_DIM {
                    return Err(unknown());
                }
                abelian(n)
            } else if let Some(n) = family_dim("heisenberg") {
                if n < 3 || n % 2 == 0 || n > MAX_FAMILY_DIM {
                    return Err(unknown());
                }
                heisenberg((n - 1) / 2)
            } else {
                return Err(unknown());
            }
        }
    };
    built.map_err(|e| Error::InvalidAlgebra(format!("catalog entry {name}: {e}")))
}

fn one() -> Rational {
    rational(1, 1)
}

fn weights(ws: &[i64]) -> Vec<Rational> {
    ws.iter().map(|&w| rational(w, 1)).collect()
}

/// Identity except for a Pythagorean (3/5, 4/5) rotation in the `(a, b)` plane.
fn planar(dim: usize, a: usize, b: usize) -> Matrix<Rational> {
    let mut m = Matrix::identity(dim);
    m[(a, a)] = rational(3, 5);
    m[(a, b)] = rational(-4, 5);
    m[(b, a)] = rational(4, 5);
    m[(b, b)] = rational(3, 5);
    m
}

fn diagonal(entries: &[i64]) -> Matrix<Rational> {
    let mut m = Matrix::identity(entries.len());
    for (i, &e) in entries.iter().enumerate() {
        m[(i, i)] = rational(e, 1);
    }
    m
}

fn build(
    name: &str,
    spec: LieAlgebraSpec,
    rotations: Vec<Matrix<Rational>>,
    note: &'static str,
) -> Result<CatalogEntry> {
    let group = Group::new(LieAlgebra::new(spec)?);
    for r in &rotations {
        validate_rotation(&group, r)?;
    }
    let mut generators = vec![Similarity::dilatation(&group, rational(1, 2))?];
    if let Some(r) = rotations.first() {
        generators.push(Similarity::new(&group, one(), r.clone(), group.identity())?);
    }
    Ok(CatalogEntry {
        name: name.to_string(),
        group,
        rotations,
        rank: 1,
        note,
        generators,
        extra_generators: Vec::new(),
    })
}

fn abelian(n: usize) -> Result<CatalogEntry> {
    let spec = LieAlgebraSpec::new(vec![one(); n]).with_declared_step(1);
    let rotations = if n >= 2 {
        vec![planar(n, 0, 1), diagonal(&[-1; 1].repeat(n))]
    } else {
        vec![diagonal(&[-1])]
    };
    build(&format!("abelian{n}"), spec, rotations, "Euclidean space with the standard dilatations.")
}

fn heisenberg(n: usize) -> Result<CatalogEntry> {
    let dim = 2 * n + 1;
    let mut ws = vec![1; 2 * n];
    ws.push(2);
    let mut spec = LieAlgebraSpec::new(weights(&ws)).with_declared_step(2);
    for i in 0..n {
        spec = spec.with_bracket(i, n + i, 2 * n, one());
    }
    let mut swap = Matrix::zeros(dim, dim);
    // (x, y, z) -> (y, -x, z) preserves the symplectic form.
    for i in 0..n {
        swap[(n + i, i)] = -one();
        swap[(i, n + i)] = one();
    }
    swap[(2 * n, 2 * n)] = one();
    build(
        &format!("heisenberg{dim}"),
        spec,
        vec![planar(dim, 0, n), swap],
        "Heisenberg group: [e_i, e_{n+i}] = e_{2n+1}, the nilpotent part of complex hyperbolic space.",
    )
}

fn engel4() -> Result<CatalogEntry> {
    let spec = LieAlgebraSpec::new(weights(&[1, 1, 2, 3]))
        .with_bracket(0, 1, 2, one())
        .with_bracket(0, 2, 3, one())
        .with_declared_step(3);
    build(
        "engel4",
        spec,
        vec![diagonal(&[-1, 1, -1, 1]), diagonal(&[1, -1, -1, -1])],
        "Filiform Carnot algebra [e1, e_i] = e_{i+1} of step 3.",
    )
}

fn free_nilpotent_2_3() -> Result<CatalogEntry> {
    // x1, x2; x3 = [x1, x2]; x4 = [x1, x3]; x5 = [x2, x3].
    let spec = LieAlgebraSpec::new(weights(&[1, 1, 2, 3, 3]))
        .with_bracket(0, 1, 2, one())
        .with_bracket(0, 2, 3, one())
        .with_bracket(1, 2, 4, one())
        .with_declared_step(3);
    let mut r = planar(5, 0, 1);
    r[(3, 3)] = rational(3, 5);
    r[(3, 4)] = rational(-4, 5);
    r[(4, 3)] = rational(4, 5);
    r[(4, 4)] = rational(3, 5);
    build(
        "free-nilpotent-2-3",
        spec,
        vec![r, diagonal(&[1, -1, -1, -1, 1])],
        "Free nilpotent Lie algebra on two generators of step 3.",
    )
}

/// Quaternion product on coefficient vectors `(1, i, j, k)`.
fn quaternion_mul(p: [i64; 4], q: [i64; 4]) -> [i64; 4] {
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

fn basis_quaternion(i: usize) -> [i64; 4] {
    let mut q = [0; 4];
    q[i] = 1;
    q
}

const QUATERNIONIC_NOTE: &str =
    "Quaternionic Heisenberg algebra: v = H, z = Im H, [p, q] = Im(conj(p) q); nilpotent part of quaternionic hyperbolic space.";
const DAMEK_RICCI_NOTE: &str =
    "H-type algebra with v = H and z spanned by the i and j parts of Im(conj(p) q); weights (1, 1, 1, 1, 2, 2).";

/// `v = H` with bracket the first `center` imaginary components of
/// `Im(conj(p) q)`. Left multiplication by a unit quaternion fixes the
/// bracket and is used as the sample rotation.
fn quaternionic(center: usize, name: &str, note: &'static str) -> Result<CatalogEntry> {
    let dim = 4 + center;
    let mut ws = vec![1; 4];
    ws.extend(std::iter::repeat_n(2, center));
    let mut spec = LieAlgebraSpec::new(weights(&ws)).with_declared_step(2);
    for a in 0..4 {
        for b in (a + 1)..4 {
            let mut conj = basis_quaternion(a);
            for c in &mut conj[1..] {
                *c = -*c;
            }
            let prod = quaternion_mul(conj, basis_quaternion(b));
            for (z, &c) in prod[1..=center].iter().enumerate() {
                if c != 0 {
                    spec = spec.with_bracket(a, b, 4 + z, rational(c, 1));
                }
            }
        }
    }
    // Left multiplication by u = (1 + i + j + k) / 2.
    let mut left = Matrix::identity(dim);
    for col in 0..4 {
        let image = quaternion_mul([1, 1, 1, 1], basis_quaternion(col));
        for row in 0..4 {
            left[(row, col)] = rational(image[row], 2);
        }
    }
    // Left multiplication by i.
    let mut by_i = Matrix::identity(dim);
    for col in 0..4 {
        let image = quaternion_mul([0, 1, 0, 0], basis_quaternion(col));
        for row in 0..4 {
            by_i[(row, col)] = rational(image[row], 1);
        }
    }
    build(name, spec, vec![left, by_i], note)
}

fn rank2() -> Result<CatalogEntry> {
    let spec = LieAlgebraSpec::new(vec![one(), one()]).with_declared_step(1);
    let group = Group::new(LieAlgebra::new(spec)?);
    let gamma1 = Similarity::translation_by(&group, GroupPoint::new(vec![one(), rational(0, 1)]))?;
    Ok(CatalogEntry {
        name: "rank2-counterexample".to_string(),
        group,
        rotations: vec![Matrix::identity(2)],
        rank: 2,
        note: "R^2 with the two dilatation families (x, y) -> (s x, y) and (x, y) -> (x, s y); \
               the translation gamma1 has no fixed point, so the rank-one argument does not apply.",
        generators: vec![gamma1],
        extra_generators: vec!["gamma2(x, y) = (x, 2y)"],
    })
}
