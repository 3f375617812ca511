//! Shared helpers for integration tests, including an independent oracle for
//! group products built from unipotent matrices.
#![allow(dead_code)]

use nilgeo::catalog;
use nilgeo::scalar::rational;
use nilgeo::{Group, GroupPoint, Rational};
use num_traits::{One, Zero};

type Mat = Vec<Vec<Rational>>;

fn zeros(n: usize) -> Mat {
    vec![vec![Rational::zero(); n]; n]
}

fn unit(n: usize, i: usize, j: usize) -> Mat {
    let mut m = zeros(n);
    m[i][j] = Rational::one();
    m
}

fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

fn scale(a: &Mat, c: &Rational) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

fn identity(n: usize) -> Mat {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

/// `exp` of a strictly upper triangular matrix (the series terminates).
fn mat_exp(x: &Mat) -> Mat {
    let n = x.len();
    let mut out = identity(n);
    let mut term = identity(n);
    for k in 1..n {
        term = scale(&mul(&term, x), &rational(1, k as i64));
        out = add(&out, &term);
    }
    out
}

/// `log` of a unipotent matrix.
fn mat_log(m: &Mat) -> Mat {
    let n = m.len();
    let nil = add(m, &scale(&identity(n), &rational(-1, 1)));
    let mut out = zeros(n);
    let mut power = identity(n);
    for k in 1..n {
        power = mul(&power, &nil);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        out = add(&out, &scale(&power, &rational(sign, k as i64)));
    }
    out
}

/// A faithful representation of a nilpotent Lie algebra by strictly upper
/// triangular matrices, one matrix per basis vector.
pub struct MatrixOracle {
    basis: Vec<Mat>,
    size: usize,
}

impl MatrixOracle {
    pub fn for_group(name: &str) -> Option<Self> {
        if let Some(n) = name.strip_prefix("heisenberg").and_then(|d| d.parse::<usize>().ok()) {
            let k = (n - 1) / 2;
            let size = k + 2;
            let mut basis = Vec::new();
            for i in 0..k {
                basis.push(unit(size, 0, i + 1));
            }
            for i in 0..k {
                basis.push(unit(size, i + 1, k + 1));
            }
            basis.push(unit(size, 0, k + 1));
            return Some(Self { basis, size });
        }
        if name == "engel4" {
            let n = add(&add(&unit(4, 0, 1), &unit(4, 1, 2)), &unit(4, 2, 3));
            let basis = vec![n, unit(4, 2, 3), unit(4, 1, 3), unit(4, 0, 3)];
            return Some(Self { basis, size: 4 });
        }
        None
    }

    fn embed(&self, coords: &[Rational]) -> Mat {
        let mut m = zeros(self.size);
        for (c, b) in coords.iter().zip(&self.basis) {
            m = add(&m, &scale(b, c));
        }
        m
    }

    /// Coordinates of a matrix in the span of the basis, by exact elimination.
    fn decode(&self, m: &Mat) -> Vec<Rational> {
        let dim = self.basis.len();
        let flat = |a: &Mat| a.iter().flatten().cloned().collect::<Vec<_>>();
        let cols: Vec<Vec<Rational>> = self.basis.iter().map(flat).collect();
        let rhs = flat(m);
        let rows = rhs.len();
        // Augmented system [cols | rhs] in row-major form.
        let mut a: Vec<Vec<Rational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<Rational> = (0..dim).map(|c| cols[c][r].clone()).collect();
                row.push(rhs[r].clone());
                row
            })
            .collect();
        let mut pivot_row = 0;
        let mut pivots = Vec::new();
        for col in 0..dim {
            let Some(p) = (pivot_row..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(pivot_row, p);
            let inv = Rational::one() / a[pivot_row][col].clone();
            a[pivot_row] = a[pivot_row].iter().map(|x| x * &inv).collect();
            for r in 0..rows {
                if r != pivot_row && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    let sub: Vec<Rational> = a[pivot_row].iter().map(|x| x * &f).collect();
                    a[r] = a[r].iter().zip(&sub).map(|(x, y)| x - y).collect();
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        assert!(
            a[pivot_row..].iter().all(|row| row[dim].is_zero()),
            "matrix is not in the span of the representation"
        );
        let mut out = vec![Rational::zero(); dim];
        for (r, &c) in pivots.iter().enumerate() {
            out[c] = a[r][dim].clone();
        }
        out
    }

    /// `log(exp(x_1) exp(x_2) ... exp(x_k))` in coordinates.
    pub fn product(&self, points: &[&GroupPoint<Rational>]) -> GroupPoint<Rational> {
        let mut m = identity(self.size);
        for p in points {
            m = mul(&m, &mat_exp(&self.embed(p.coords())));
        }
        GroupPoint::new(self.decode(&mat_log(&m)))
    }

    /// `[a, b]` computed as a matrix commutator.
    pub fn bracket(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let (x, y) = (self.embed(a), self.embed(b));
        self.decode(&add(&mul(&x, &y), &scale(&mul(&y, &x), &rational(-1, 1))))
    }
}

pub fn group(name: &str) -> Group {
    catalog::get(name).expect("catalog entry").group
}

/// Catalog entries with a single dilatation family.
pub fn rank_one_names() -> Vec<&'static str> {
    catalog::LISTED
        .iter()
        .copied()
        .filter(|n| catalog::get(n).unwrap().rank == 1)
        .collect()
}
