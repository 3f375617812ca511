//! Nilpotent Lie algebras with dilatation weights.
//!
//! A [`LieAlgebraSpec`] is raw data: exact structure constants
//! `c[i][j][k]` (meaning `[e_i, e_j] = sum_k c[i][j][k] e_k`) and one weight
//! `d_i` per basis vector. [`validate`] checks every axiom exactly over the
//! rationals and reports failures as data. A [`LieAlgebra`] can only be built
//! from a spec that validates, and carries the derived nilpotency step.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{span_basis, Matrix};
use crate::scalar::{format_rational, Constant, Rational, Scalar};

/// Highest nilpotency step the Campbell–Hausdorff table is generated for.
pub const MAX_STEP: usize = 6;

/// A vector of the Lie algebra in the adapted basis `e_1, ..., e_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraVector<S> {
    coords: Vec<S>,
}

impl<S: Scalar> AlgebraVector<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![S::zero(); dim])
    }

    /// The basis vector `e_{index+1}` (indices are 0-based in code).
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[index] = S::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.coords.iter().map(|a| a.clone() * s.clone()).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coords.iter().map(|a| -a.clone()).collect())
    }

    pub fn to_f64(&self) -> AlgebraVector<f64> {
        AlgebraVector::new(self.coords.iter().map(Scalar::to_f64).collect())
    }

    /// Euclidean norm of the coordinates, in `f64`.
    pub fn euclidean_norm(&self) -> f64 {
        self.coords
            .iter()
            .map(|c| {
                let x = c.to_f64();
                x * x
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Raw, unvalidated description of a graded Lie algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraSpec {
    dim: usize,
    /// Dense `dim^3` tensor, index `(i * dim + j) * dim + k`.
    constants: Vec<Rational>,
    weights: Vec<Rational>,
    declared_step: Option<usize>,
}

impl LieAlgebraSpec {
    /// An abelian spec with the given weights.
    pub fn new(weights: Vec<Rational>) -> Self {
        let dim = weights.len();
        Self {
            dim,
            constants: vec![Rational::zero(); dim * dim * dim],
            weights,
            declared_step: None,
        }
    }

    /// Sets `[e_i, e_j]` to contain `value * e_k` and `[e_j, e_i]` to contain
    /// `-value * e_k`. Indices are 0-based.
    pub fn with_bracket(mut self, i: usize, j: usize, k: usize, value: Rational) -> Self {
        self.set_constant(j, i, k, -value.clone());
        self.set_constant(i, j, k, value);
        self
    }

    pub fn with_declared_step(mut self, step: usize) -> Self {
        self.declared_step = Some(step);
        self
    }

    /// Writes a single constant without touching its antisymmetric partner.
    pub fn set_constant(&mut self, i: usize, j: usize, k: usize, value: Rational) {
        let idx = self.index(i, j, k);
        self.constants[idx] = value;
    }

    pub fn set_weight(&mut self, i: usize, value: Rational) {
        self.weights[i] = value;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn declared_step(&self) -> Option<usize> {
        self.declared_step
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.constants[self.index(i, j, k)]
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    /// All nonzero constants as `(i, j, k, value)`, 0-based.
    pub fn nonzero_constants(&self) -> impl Iterator<Item = (usize, usize, usize, &Rational)> + '_ {
        let n = self.dim;
        self.constants
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(idx, c)| (idx / (n * n), (idx / n) % n, idx % n, c))
    }

    fn bracket_exact(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, j, k, c) in self.nonzero_constants() {
            if !a[i].is_zero() && !b[j].is_zero() {
                out[k] += a[i].clone() * b[j].clone() * c.clone();
            }
        }
        out
    }

    pub fn to_config(&self) -> AlgebraConfig {
        let brackets = self
            .nonzero_constants()
            .filter(|(i, j, _, _)| i < j)
            .map(|(i, j, k, c)| BracketEntry {
                i: i + 1,
                j: j + 1,
                k: k + 1,
                num: c.numer().to_string().parse().unwrap_or(0),
                den: c.denom().to_string().parse().unwrap_or(1),
            })
            .collect();
        AlgebraConfig {
            dim: self.dim,
            brackets,
            weights: self
                .weights
                .iter()
                .map(|w| Fraction {
                    num: w.numer().to_string().parse().unwrap_or(0),
                    den: w.denom().to_string().parse().unwrap_or(1),
                })
                .collect(),
            step: self.declared_step,
        }
    }
}

/// One sparse structure constant in a JSON algebra config (1-based indices).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub num: i64,
    #[serde(default = "one_i64")]
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fraction {
    pub num: i64,
    #[serde(default = "one_i64")]
    pub den: i64,
}

fn one_i64() -> i64 {
    1
}

/// JSON algebra config: `dim`, sparse `brackets`, `weights`, optional `step`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    pub dim: usize,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
    pub weights: Vec<Fraction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

impl AlgebraConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(json_field(&e, text), e.to_string()))
    }

    /// Converts to a spec. An entry `(i, j, k)` also fills `(j, i, k)` with the
    /// negated value unless that entry is listed explicitly, in which case both
    /// are taken literally and antisymmetry is left to [`validate`].
    pub fn to_spec(&self) -> Result<LieAlgebraSpec> {
        if self.dim == 0 {
            return Err(Error::config("dim", "must be at least 1"));
        }
        if self.weights.len() != self.dim {
            return Err(Error::config(
                "weights",
                format!("expected {} entries, found {}", self.dim, self.weights.len()),
            ));
        }
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(idx, w)| fraction(w.num, w.den, &format!("weights[{idx}].den")))
            .collect::<Result<Vec<_>>>()?;
        let mut spec = LieAlgebraSpec::new(weights);
        if let Some(step) = self.step {
            spec = spec.with_declared_step(step);
        }
        let listed: std::collections::HashSet<(usize, usize, usize)> =
            self.brackets.iter().map(|b| (b.i, b.j, b.k)).collect();
        for (idx, b) in self.brackets.iter().enumerate() {
            for (name, v) in [("i", b.i), ("j", b.j), ("k", b.k)] {
                if v == 0 || v > self.dim {
                    return Err(Error::config(
                        format!("brackets[{idx}].{name}"),
                        format!("index {v} outside 1..={}", self.dim),
                    ));
                }
            }
            let value = fraction(b.num, b.den, &format!("brackets[{idx}].den"))?;
            let (i, j, k) = (b.i - 1, b.j - 1, b.k - 1);
            spec.set_constant(i, j, k, value.clone());
            if i != j && !listed.contains(&(b.j, b.i, b.k)) {
                spec.set_constant(j, i, k, -value);
            }
        }
        Ok(spec)
    }
}

fn fraction(num: i64, den: i64, field: &str) -> Result<Rational> {
    if den == 0 {
        return Err(Error::config(field, "denominator must be nonzero"));
    }
    Ok(crate::scalar::rational(num, den))
}

/// Best-effort name of the JSON field a serde error points at.
pub(crate) fn json_field(err: &serde_json::Error, text: &str) -> String {
    let msg = err.to_string();
    if let Some(start) = msg.find("field `") {
        if let Some(end) = msg[start + 7..].find('`') {
            return msg[start + 7..start + 7 + end].to_string();
        }
    }
    // Fall back to the last key before the error position.
    let line_start: usize = text
        .split_inclusive('\n')
        .take(err.line().saturating_sub(1))
        .map(str::len)
        .sum();
    let pos = (line_start + err.column()).min(text.len());
    let prefix = &text[..pos];
    prefix
        .rmatch_indices("\":")
        .next()
        .and_then(|(end, _)| prefix[..end].rfind('"').map(|start| prefix[start + 1..end].to_string()))
        .unwrap_or_else(|| "<document>".to_string())
}

/// Outcome of one axiom check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
    /// Nilpotency step from the lower central series, when it terminates.
    pub step: Option<usize>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{}: {}", c.name, if c.passed { "pass" } else { "FAIL" })?;
            if let Some(w) = &c.witness {
                write!(f, " ({w})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub const CHECK_ANTISYMMETRY: &str = "antisymmetry";
pub const CHECK_JACOBI: &str = "jacobi";
pub const CHECK_NILPOTENCY: &str = "nilpotency";
pub const CHECK_DILATATION: &str = "dilatation-compatibility";
pub const CHECK_WEIGHTS: &str = "weights-at-least-one";
pub const CHECK_DECLARED_STEP: &str = "declared-step";

/// Checks every algebra axiom exactly. Failures are report entries.
pub fn validate(spec: &LieAlgebraSpec) -> ValidationReport {
    let n = spec.dim;
    let mut checks = Vec::new();

    let antisymmetry_witness = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .find(|&(i, j, k)| *spec.constant(i, j, k) != -spec.constant(j, i, k).clone())
        .map(|(i, j, k)| {
            format!(
                "c[{}][{}][{}] = {} but c[{}][{}][{}] = {}",
                i + 1,
                j + 1,
                k + 1,
                format_rational(spec.constant(i, j, k)),
                j + 1,
                i + 1,
                k + 1,
                format_rational(spec.constant(j, i, k))
            )
        });
    checks.push(AxiomCheck {
        name: CHECK_ANTISYMMETRY,
        passed: antisymmetry_witness.is_none(),
        witness: antisymmetry_witness,
    });

    let basis = |i: usize| {
        let mut v = vec![Rational::zero(); n];
        v[i] = Rational::one();
        v
    };
    let mut jacobi_witness = None;
    'outer: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (a, b, c) = (basis(i), basis(j), basis(k));
                let t1 = spec.bracket_exact(&a, &spec.bracket_exact(&b, &c));
                let t2 = spec.bracket_exact(&b, &spec.bracket_exact(&c, &a));
                let t3 = spec.bracket_exact(&c, &spec.bracket_exact(&a, &b));
                if (0..n).any(|m| !(t1[m].clone() + t2[m].clone() + t3[m].clone()).is_zero()) {
                    jacobi_witness = Some(format!(
                        "cyclic sum for (e{}, e{}, e{}) is nonzero",
                        i + 1,
                        j + 1,
                        k + 1
                    ));
                    break 'outer;
                }
            }
        }
    }
    checks.push(AxiomCheck {
        name: CHECK_JACOBI,
        passed: jacobi_witness.is_none(),
        witness: jacobi_witness,
    });

    let step = lower_central_step(spec);
    checks.push(AxiomCheck {
        name: CHECK_NILPOTENCY,
        passed: step.is_some(),
        witness: step
            .is_none()
            .then(|| "lower central series does not reach {0}".to_string()),
    });

    let dilatation_witness = spec
        .nonzero_constants()
        .find(|&(i, j, k, _)| spec.weights[k] != spec.weights[i].clone() + spec.weights[j].clone())
        .map(|(i, j, k, c)| {
            format!(
                "c[{}][{}][{}] = {} but d_{} = {} != d_{} + d_{} = {}",
                i + 1,
                j + 1,
                k + 1,
                format_rational(c),
                k + 1,
                format_rational(&spec.weights[k]),
                i + 1,
                j + 1,
                format_rational(&(spec.weights[i].clone() + spec.weights[j].clone()))
            )
        });
    checks.push(AxiomCheck {
        name: CHECK_DILATATION,
        passed: dilatation_witness.is_none(),
        witness: dilatation_witness,
    });

    let weight_witness = spec
        .weights
        .iter()
        .position(|w| *w < Rational::one())
        .map(|i| format!("d_{} = {} < 1", i + 1, format_rational(&spec.weights[i])));
    checks.push(AxiomCheck {
        name: CHECK_WEIGHTS,
        passed: weight_witness.is_none(),
        witness: weight_witness,
    });

    if let Some(declared) = spec.declared_step {
        let passed = step == Some(declared);
        checks.push(AxiomCheck {
            name: CHECK_DECLARED_STEP,
            passed,
            witness: (!passed).then(|| format!("declared {declared}, computed {step:?}")),
        });
    }

    ValidationReport { checks, step }
}

/// Number of nonzero terms of the lower central series, or `None` if it
/// stabilizes away from zero.
fn lower_central_step(spec: &LieAlgebraSpec) -> Option<usize> {
    let n = spec.dim;
    let mut current: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            v
        })
        .collect();
    let mut step = 0;
    while !current.is_empty() {
        step += 1;
        if step > n {
            return None;
        }
        let products: Vec<Vec<Rational>> = (0..n)
            .flat_map(|i| {
                let mut e = vec![Rational::zero(); n];
                e[i] = Rational::one();
                current
                    .iter()
                    .map(|v| spec.bracket_exact(&e, v))
                    .collect::<Vec<_>>()
            })
            .collect();
        let next = span_basis(&products);
        if next.len() == current.len() {
            return None;
        }
        current = next;
    }
    Some(step)
}

/// A validated nilpotent Lie algebra with dilatation weights.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    spec: LieAlgebraSpec,
    weights: Vec<Constant>,
    /// `table[i][j]` lists `(k, c[i][j][k])` for the nonzero constants.
    table: Vec<Vec<Vec<(usize, Constant)>>>,
    step: usize,
}

impl LieAlgebra {
    /// Validates `spec` and builds the algebra; any failed axiom is an error.
    pub fn new(spec: LieAlgebraSpec) -> Result<Self> {
        let report = validate(&spec);
        if !report.all_passed() {
            let reasons: Vec<String> = report
                .failures()
                .map(|c| match &c.witness {
                    Some(w) => format!("{}: {w}", c.name),
                    None => c.name.to_string(),
                })
                .collect();
            return Err(Error::InvalidAlgebra(reasons.join("; ")));
        }
        let step = report.step.expect("nilpotency check passed");
        if step > MAX_STEP {
            return Err(Error::StepTooLarge { step, max: MAX_STEP });
        }
        let n = spec.dim;
        let mut table = vec![vec![Vec::new(); n]; n];
        for (i, j, k, c) in spec.nonzero_constants() {
            table[i][j].push((k, Constant::new(c.clone())));
        }
        let weights = spec.weights.iter().cloned().map(Constant::new).collect();
        Ok(Self {
            spec,
            weights,
            table,
            step,
        })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn weights(&self) -> &[Constant] {
        &self.weights
    }

    pub fn spec(&self) -> &LieAlgebraSpec {
        &self.spec
    }

    pub fn is_abelian(&self) -> bool {
        self.step == 1
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            })
        }
    }

    /// `[a, b]`, the bilinear extension of the structure constants.
    pub fn bracket<S: Scalar>(&self, a: &AlgebraVector<S>, b: &AlgebraVector<S>) -> Result<AlgebraVector<S>> {
        self.check_dim(a.dim())?;
        self.check_dim(b.dim())?;
        Ok(AlgebraVector::new(self.bracket_coords(a.coords(), b.coords())))
    }

    pub(crate) fn bracket_coords<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        let n = self.dim();
        let mut out = vec![S::zero(); n];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() || self.table[i][j].is_empty() {
                    continue;
                }
                let ab = ai.clone() * bj.clone();
                for (k, c) in &self.table[i][j] {
                    out[*k] = out[*k].clone() + ab.clone() * S::from_constant(c);
                }
            }
        }
        out
    }

    /// Matrix of `ad(a) = [a, .]`; column `j` holds `[a, e_j]`.
    pub fn adjoint_matrix<S: Scalar>(&self, a: &AlgebraVector<S>) -> Result<Matrix<S>> {
        self.check_dim(a.dim())?;
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self.bracket_coords(a.coords(), AlgebraVector::<S>::basis(n, j).coords());
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn int_weights(w: &[i64]) -> Vec<Rational> {
        w.iter().map(|&d| rational(d, 1)).collect()
    }

    fn heisenberg3() -> LieAlgebraSpec {
        LieAlgebraSpec::new(int_weights(&[1, 1, 2])).with_bracket(0, 1, 2, rational(1, 1))
    }

    fn engel4() -> LieAlgebraSpec {
        LieAlgebraSpec::new(int_weights(&[1, 1, 2, 3]))
            .with_bracket(0, 1, 2, rational(1, 1))
            .with_bracket(0, 2, 3, rational(1, 1))
    }

    fn e(n: usize, i: usize) -> AlgebraVector<Rational> {
        AlgebraVector::basis(n, i)
    }

    #[test]
    fn heisenberg_bracket_of_generators_is_center() {
        let alg = LieAlgebra::new(heisenberg3()).unwrap();
        assert_eq!(alg.bracket(&e(3, 0), &e(3, 1)).unwrap(), e(3, 2));
        assert_eq!(alg.bracket(&e(3, 1), &e(3, 0)).unwrap(), e(3, 2).neg());
    }

    #[test]
    fn bracket_with_self_vanishes() {
        let alg = LieAlgebra::new(engel4()).unwrap();
        let x = AlgebraVector::new(vec![rational(3, 2), rational(-1, 3), rational(5, 1), rational(1, 7)]);
        assert!(alg.bracket(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn abelian_bracket_is_zero() {
        let alg = LieAlgebra::new(LieAlgebraSpec::new(int_weights(&[1, 1, 1]))).unwrap();
        let x = AlgebraVector::new(vec![1.0, 2.0, 3.0]);
        let y = AlgebraVector::new(vec![-1.0, 0.5, 4.0]);
        assert!(alg.bracket(&x, &y).unwrap().is_zero());
    }

    #[test]
    fn bracket_rejects_wrong_dimension() {
        let alg = LieAlgebra::new(heisenberg3()).unwrap();
        let err = alg.bracket(&AlgebraVector::<f64>::zeros(2), &AlgebraVector::zeros(3));
        assert!(matches!(err, Err(Error::DimensionMismatch { expected: 3, found: 2 })));
    }

    #[test]
    fn validate_heisenberg_and_abelian() {
        let r = validate(&heisenberg3());
        assert!(r.all_passed(), "{r}");
        assert_eq!(r.step, Some(2));
        let r = validate(&LieAlgebraSpec::new(int_weights(&[1, 1, 1, 1])));
        assert!(r.all_passed());
        assert_eq!(r.step, Some(1));
    }

    #[test]
    fn validate_flags_incompatible_weight() {
        let spec = LieAlgebraSpec::new(int_weights(&[1, 1, 3])).with_bracket(0, 1, 2, rational(1, 1));
        let r = validate(&spec);
        assert!(!r.all_passed());
        let failed: Vec<_> = r.failures().map(|c| c.name).collect();
        assert_eq!(failed, vec![CHECK_DILATATION]);
        assert!(r.check(CHECK_DILATATION).unwrap().witness.as_ref().unwrap().contains("d_3 = 3"));
        assert!(matches!(LieAlgebra::new(spec), Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn validate_flags_broken_antisymmetry() {
        let mut spec = LieAlgebraSpec::new(int_weights(&[1, 1, 2]));
        spec.set_constant(0, 1, 2, rational(1, 1));
        let r = validate(&spec);
        assert!(!r.check(CHECK_ANTISYMMETRY).unwrap().passed);
    }

    #[test]
    fn validate_flags_jacobi_failure() {
        // [e1,e2]=e3, [e1,e3]=e4, [e2,e4]=e5: graded and nilpotent, but the
        // cyclic sum on (e1, e2, e3) is -e5.
        let spec = LieAlgebraSpec::new(int_weights(&[1, 1, 2, 3, 4]))
            .with_bracket(0, 1, 2, rational(1, 1))
            .with_bracket(0, 2, 3, rational(1, 1))
            .with_bracket(1, 3, 4, rational(1, 1));
        let r = validate(&spec);
        let failed: Vec<_> = r.failures().map(|c| c.name).collect();
        assert_eq!(failed, vec![CHECK_JACOBI]);
    }

    #[test]
    fn validate_flags_non_nilpotent() {
        // so(3): Jacobi holds, the lower central series is constant.
        let spec = LieAlgebraSpec::new(int_weights(&[1, 1, 1]))
            .with_bracket(0, 1, 2, rational(1, 1))
            .with_bracket(1, 2, 0, rational(1, 1))
            .with_bracket(2, 0, 1, rational(1, 1));
        let r = validate(&spec);
        assert!(r.check(CHECK_JACOBI).unwrap().passed);
        assert!(!r.check(CHECK_NILPOTENCY).unwrap().passed);
        assert_eq!(r.step, None);
    }

    #[test]
    fn validate_flags_small_weight_and_declared_step() {
        let spec = LieAlgebraSpec::new(vec![rational(1, 2), rational(1, 1)]).with_declared_step(2);
        let r = validate(&spec);
        let failed: Vec<_> = r.failures().map(|c| c.name).collect();
        assert_eq!(failed, vec![CHECK_WEIGHTS, CHECK_DECLARED_STEP]);
    }

    #[test]
    fn adjoint_matrices() {
        let alg = LieAlgebra::new(heisenberg3()).unwrap();
        let ad = alg.adjoint_matrix(&e(3, 0)).unwrap();
        let mut expected = Matrix::zeros(3, 3);
        expected[(2, 1)] = rational(1, 1);
        assert_eq!(ad, expected);
        assert!(alg.adjoint_matrix(&AlgebraVector::<Rational>::zeros(3)).unwrap().is_zero());

        let alg = LieAlgebra::new(engel4()).unwrap();
        let ad = alg.adjoint_matrix(&e(4, 0)).unwrap();
        let mut expected = Matrix::zeros(4, 4);
        expected[(2, 1)] = rational(1, 1);
        expected[(3, 2)] = rational(1, 1);
        assert_eq!(ad, expected);
        assert!(!ad.pow(2).is_zero());
        assert!(ad.pow(3).is_zero());
    }

    #[test]
    fn config_round_trip_and_errors() {
        let json = r#"{"dim":3,"brackets":[{"i":1,"j":2,"k":3,"num":1,"den":1}],
                       "weights":[{"num":1,"den":1},{"num":1,"den":1},{"num":2,"den":1}]}"#;
        let cfg = AlgebraConfig::from_json(json).unwrap();
        let spec = cfg.to_spec().unwrap();
        assert_eq!(spec, heisenberg3());
        assert_eq!(spec.to_config().to_spec().unwrap(), spec);

        let bad = r#"{"dim":3,"weights":[{"num":1}]}"#;
        let err = AlgebraConfig::from_json(bad).unwrap().to_spec().unwrap_err();
        assert!(err.to_string().contains("weights"), "{err}");

        let bad = r#"{"dim":2,"weights":[{"num":1},{"num":1}],"brackets":[{"i":1,"j":5,"k":2,"num":1}]}"#;
        let err = AlgebraConfig::from_json(bad).unwrap().to_spec().unwrap_err();
        assert!(err.to_string().contains("brackets[0].j"), "{err}");

        let err = AlgebraConfig::from_json(r#"{"dim":"x","weights":[]}"#).unwrap_err();
        assert!(err.to_string().contains("dim"), "{err}");
    }
}
