//! Campbell–Hausdorff series in Dynkin form.
//!
//! The series `log(exp X exp Y)` is expanded in the free associative algebra
//! on two letters up to degree [`MAX_STEP`], with exact rational
//! coefficients. Each homogeneous component of degree `n` is a Lie
//! polynomial, so the Dynkin–Specht–Wever map turns a word `x_1 ... x_n` with
//! coefficient `a` into the left-normed bracket `[[x_1, x_2], ..., x_n]` with
//! coefficient `a / n`. The resulting terms are stored in a prefix trie so
//! that evaluation shares bracket computations between words.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::algebra::{LieAlgebra, MAX_STEP};
use crate::scalar::{Constant, Rational, Scalar};

type Word = Vec<u8>;
type Series = BTreeMap<Word, Rational>;

const X: u8 = 0;
const Y: u8 = 1;

fn mul_truncated(a: &Series, b: &Series, max_degree: usize) -> Series {
    let mut out = Series::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > max_degree {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            *out.entry(w).or_insert_with(Rational::zero) += ca.clone() * cb.clone();
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn exp_letter(letter: u8, max_degree: usize) -> Series {
    let mut out = Series::new();
    let mut factorial = Rational::one();
    for k in 0..=max_degree {
        if k > 0 {
            factorial *= Rational::from_integer(k.into());
        }
        out.insert(vec![letter; k], Rational::one() / factorial.clone());
    }
    out
}

/// Coefficients of `log(exp X exp Y)` on words of length `1..=max_degree`.
pub(crate) fn log_of_product(max_degree: usize) -> Series {
    let product = mul_truncated(&exp_letter(X, max_degree), &exp_letter(Y, max_degree), max_degree);
    let mut z = product;
    z.remove(&Word::new());
    let mut result = Series::new();
    let mut power = z.clone();
    for k in 1..=max_degree {
        let sign = if k % 2 == 1 { Rational::one() } else { -Rational::one() };
        let factor = sign / Rational::from_integer(k.into());
        for (w, c) in &power {
            *result.entry(w.clone()).or_insert_with(Rational::zero) += c.clone() * factor.clone();
        }
        power = mul_truncated(&power, &z, max_degree);
    }
    result.retain(|_, c| !c.is_zero());
    result
}

/// Left-normed bracket coefficients: word -> `a_w / |w|`, with words whose
/// first two letters coincide dropped (their bracket is zero).
pub(crate) fn dynkin_terms(max_degree: usize) -> Vec<(Word, Rational)> {
    log_of_product(max_degree)
        .into_iter()
        .filter(|(w, _)| w.len() < 2 || w[0] != w[1])
        .map(|(w, c)| {
            let n = Rational::from_integer(w.len().into());
            (w, c / n)
        })
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

#[derive(Debug, Default)]
struct Node {
    children: [Option<Box<Node>>; 2],
    coefficient: Option<Constant>,
    /// Smallest degree of any term in this subtree (including this node).
    min_term_degree: usize,
}

impl Node {
    fn insert(&mut self, word: &[u8], depth: usize, coefficient: Constant) {
        self.min_term_degree = if self.min_term_degree == 0 {
            depth + word.len()
        } else {
            self.min_term_degree.min(depth + word.len())
        };
        match word.split_first() {
            None => self.coefficient = Some(coefficient),
            Some((&letter, rest)) => self.children[letter as usize]
                .get_or_insert_with(Default::default)
                .insert(rest, depth + 1, coefficient),
        }
    }
}

/// Dynkin terms of the Campbell–Hausdorff series through degree
/// [`MAX_STEP`], arranged as a trie over the letters `X`, `Y`.
#[derive(Debug)]
pub struct BchTable {
    root: Node,
    terms: usize,
}

pub static BCH_TABLE: Lazy<BchTable> = Lazy::new(|| BchTable::generate(MAX_STEP));

impl BchTable {
    pub fn generate(max_degree: usize) -> Self {
        let mut root = Node::default();
        let terms = dynkin_terms(max_degree);
        let count = terms.len();
        for (w, c) in terms {
            root.insert(&w, 0, Constant::new(c));
        }
        Self { root, terms: count }
    }

    pub fn term_count(&self) -> usize {
        self.terms
    }

    /// `H(a, b)` truncated at degree `alg.step()`, which is exact for an
    /// algebra of that nilpotency step.
    pub fn evaluate<S: Scalar>(&self, alg: &LieAlgebra, a: &[S], b: &[S]) -> Vec<S> {
        let max_degree = alg.step();
        let mut out = vec![S::zero(); a.len()];
        for letter in [X, Y] {
            if let Some(child) = &self.root.children[letter as usize] {
                let v = if letter == X { a } else { b };
                if v.iter().all(Zero::is_zero) {
                    continue;
                }
                Self::walk(alg, child, v.to_vec(), 1, max_degree, a, b, &mut out);
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn walk<S: Scalar>(
        alg: &LieAlgebra,
        node: &Node,
        value: Vec<S>,
        depth: usize,
        max_degree: usize,
        a: &[S],
        b: &[S],
        out: &mut [S],
    ) {
        if let Some(c) = &node.coefficient {
            let c = S::from_constant(c);
            for (o, v) in out.iter_mut().zip(&value) {
                if !v.is_zero() {
                    *o = o.clone() + c.clone() * v.clone();
                }
            }
        }
        if depth == max_degree {
            return;
        }
        for (letter, operand) in [(X, a), (Y, b)] {
            let Some(child) = &node.children[letter as usize] else {
                continue;
            };
            if child.min_term_degree > max_degree {
                continue;
            }
            let next = alg.bracket_coords(&value, operand);
            if next.iter().all(Zero::is_zero) {
                continue;
            }
            Self::walk(alg, child, next, depth + 1, max_degree, a, b, out);
        }
    }
}
