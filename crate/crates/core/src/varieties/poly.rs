//! Exact multivariate integer polynomials graded by a (product of)
//! projective space(s), with the handful of symbolic operations the catalog
//! needs: substitution, differentiation, and evaluation mod p.

use std::collections::BTreeMap;
use std::fmt;

use crate::charfield::PrimeModulus;
use crate::error::VarietyError;

/// One projective factor `P^dim`, optionally weighted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjectiveFactor {
    pub dim: usize,
    /// Coordinate weights, length `dim + 1`. All 1 for straight `P^n`.
    pub weights: Vec<u32>,
}

impl ProjectiveFactor {
    pub fn straight(dim: usize) -> Self {
        ProjectiveFactor {
            dim,
            weights: vec![1; dim + 1],
        }
    }

    pub fn weighted(weights: &[u32]) -> Self {
        ProjectiveFactor {
            dim: weights.len() - 1,
            weights: weights.to_vec(),
        }
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.iter().any(|&w| w != 1)
    }
}

/// The ambient space a polynomial lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ambient {
    /// Product of projective factors; coordinates are concatenated.
    Projective(Vec<ProjectiveFactor>),
    /// Plain affine space (used for the pencil fiber-product charts).
    Affine(usize),
}

impl Ambient {
    pub fn projective(dim: usize) -> Self {
        Ambient::Projective(vec![ProjectiveFactor::straight(dim)])
    }

    pub fn product(dims: &[usize]) -> Self {
        Ambient::Projective(dims.iter().map(|&d| ProjectiveFactor::straight(d)).collect())
    }

    pub fn coordinates(&self) -> usize {
        match self {
            Ambient::Projective(fs) => fs.iter().map(|f| f.dim + 1).sum(),
            Ambient::Affine(n) => *n,
        }
    }

    pub fn factors(&self) -> &[ProjectiveFactor] {
        match self {
            Ambient::Projective(fs) => fs,
            Ambient::Affine(_) => &[],
        }
    }

    /// (factor index, weight) of a coordinate.
    fn coordinate_factor(&self, var: usize) -> Option<(usize, u32)> {
        let Ambient::Projective(fs) = self else {
            return None;
        };
        let mut offset = 0;
        for (i, f) in fs.iter().enumerate() {
            if var < offset + f.dim + 1 {
                return Some((i, f.weights[var - offset]));
            }
            offset += f.dim + 1;
        }
        None
    }

    pub fn is_weighted(&self) -> bool {
        self.factors().iter().any(ProjectiveFactor::is_weighted)
    }

    /// The unique projective factor, when the ambient is not a product.
    pub fn single_factor(&self) -> Option<&ProjectiveFactor> {
        match self {
            Ambient::Projective(fs) if fs.len() == 1 => Some(&fs[0]),
            _ => None,
        }
    }
}

fn default_name(i: usize) -> String {
    format!("x{i}")
}

fn term_string(coeff: i64, exps: &[u16], names: Option<&[String]>) -> String {
    let mut s = String::new();
    let mut wrote_coeff = false;
    if coeff != 1 || exps.iter().all(|&e| e == 0) {
        s.push_str(&coeff.to_string());
        wrote_coeff = true;
    }
    for (i, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if wrote_coeff || !s.is_empty() {
            s.push('*');
        }
        let name = names
            .and_then(|ns| ns.get(i).cloned())
            .unwrap_or_else(|| default_name(i));
        s.push_str(&name);
        if e > 1 {
            s.push_str(&format!("^{e}"));
        }
        wrote_coeff = true;
    }
    s
}

/// Integer polynomial, homogeneous per projective factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiHomogPolynomial {
    ambient: Ambient,
    /// exponent vector -> coefficient; zero coefficients never stored
    terms: BTreeMap<Vec<u16>, i64>,
}

impl MultiHomogPolynomial {
    /// Build from `(coefficient, exponents)` pairs, checking homogeneity per
    /// factor (weighted degree constant across terms).
    pub fn new(ambient: Ambient, raw: &[(i64, Vec<u16>)]) -> Result<Self, VarietyError> {
        let n = ambient.coordinates();
        let mut terms: BTreeMap<Vec<u16>, i64> = BTreeMap::new();
        for (c, exps) in raw {
            if exps.len() != n {
                return Err(VarietyError::DimensionMismatch {
                    expected: n,
                    got: exps.len(),
                });
            }
            let e = terms.entry(exps.clone()).or_insert(0);
            *e += c;
            if *e == 0 {
                terms.remove(exps);
            }
        }
        let poly = MultiHomogPolynomial { ambient, terms };
        poly.check_homogeneous()?;
        Ok(poly)
    }

    pub fn zero(ambient: Ambient) -> Self {
        MultiHomogPolynomial {
            ambient,
            terms: BTreeMap::new(),
        }
    }

    fn check_homogeneous(&self) -> Result<(), VarietyError> {
        let Ambient::Projective(_) = self.ambient else {
            return Ok(());
        };
        let Some(expected) = self.terms.keys().next().map(|e| self.term_degrees(e)) else {
            return Ok(());
        };
        for (exps, &c) in &self.terms {
            let degs = self.term_degrees(exps);
            if degs != expected {
                for (factor, (&got, &want)) in degs.iter().zip(&expected).enumerate() {
                    if got != want {
                        return Err(VarietyError::NotHomogeneous {
                            term: term_string(c, exps, None),
                            expected: expected.iter().map(|&d| d as u32).collect(),
                            factor,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Weighted degree of one exponent vector, per projective factor.
    fn term_degrees(&self, exps: &[u16]) -> Vec<u64> {
        let factors = self.ambient.factors();
        let mut degs = vec![0u64; factors.len().max(1)];
        for (var, &e) in exps.iter().enumerate() {
            if let Some((f, w)) = self.ambient.coordinate_factor(var) {
                degs[f] += e as u64 * w as u64;
            } else {
                degs[0] += e as u64;
            }
        }
        degs
    }

    /// Multi-degree of the polynomial; `None` for the zero polynomial.
    pub fn multi_degree(&self) -> Option<Vec<u64>> {
        self.terms.keys().next().map(|e| self.term_degrees(e))
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, i64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Highest exponent of `var` over all terms.
    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms
            .keys()
            .map(|e| e.get(var).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn neg(&self) -> Self {
        MultiHomogPolynomial {
            ambient: self.ambient.clone(),
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, &c) in &other.terms {
            let v = terms.entry(e.clone()).or_insert(0);
            *v += c;
            if *v == 0 {
                terms.remove(e);
            }
        }
        MultiHomogPolynomial {
            ambient: self.ambient.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero(self.ambient.clone());
        }
        MultiHomogPolynomial {
            ambient: self.ambient.clone(),
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Vec<u16>, i64> = BTreeMap::new();
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                let v = terms.entry(e.clone()).or_insert(0);
                *v += ca * cb;
                if *v == 0 {
                    terms.remove(&e);
                }
            }
        }
        MultiHomogPolynomial {
            ambient: self.ambient.clone(),
            terms,
        }
    }

    /// Formal partial derivative with respect to coordinate `var`.
    pub fn derivative(&self, var: usize) -> Result<Self, VarietyError> {
        if var >= self.ambient.coordinates() {
            return Err(VarietyError::DimensionMismatch {
                expected: self.ambient.coordinates(),
                got: var + 1,
            });
        }
        let mut terms: BTreeMap<Vec<u16>, i64> = BTreeMap::new();
        for (e, &c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            let v = terms.entry(ne.clone()).or_insert(0);
            *v += c * e[var] as i64;
            if *v == 0 {
                terms.remove(&ne);
            }
        }
        Ok(MultiHomogPolynomial {
            ambient: self.ambient.clone(),
            terms,
        })
    }

    /// Substitute `x_i -> sign_i * x_{target_i}` (a signed coordinate map).
    pub fn substitute_signed(&self, targets: &[usize], signs: &[i8]) -> Result<Self, VarietyError> {
        let n = self.ambient.coordinates();
        if targets.len() != n || signs.len() != n {
            return Err(VarietyError::DimensionMismatch {
                expected: n,
                got: targets.len(),
            });
        }
        let mut terms: BTreeMap<Vec<u16>, i64> = BTreeMap::new();
        for (e, &c) in &self.terms {
            let mut ne = vec![0u16; n];
            let mut sign = 1i64;
            for (i, &ei) in e.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                ne[targets[i]] += ei;
                if signs[i] < 0 && ei % 2 == 1 {
                    sign = -sign;
                }
            }
            let v = terms.entry(ne.clone()).or_insert(0);
            *v += sign * c;
            if *v == 0 {
                terms.remove(&ne);
            }
        }
        Ok(MultiHomogPolynomial {
            ambient: self.ambient.clone(),
            terms,
        })
    }

    /// Substitute every coordinate by a linear form in the same coordinate set.
    pub fn substitute_linear(&self, images: &[Vec<(i64, usize)>]) -> Result<Self, VarietyError> {
        let n = self.ambient.coordinates();
        if images.len() != n {
            return Err(VarietyError::DimensionMismatch {
                expected: n,
                got: images.len(),
            });
        }
        let one = {
            let mut t = BTreeMap::new();
            t.insert(vec![0u16; n], 1i64);
            t
        };
        let mut acc: BTreeMap<Vec<u16>, i64> = BTreeMap::new();
        for (e, &c) in &self.terms {
            let mut prod = one.clone();
            for (i, &ei) in e.iter().enumerate() {
                for _ in 0..ei {
                    let mut next: BTreeMap<Vec<u16>, i64> = BTreeMap::new();
                    for (pe, &pc) in &prod {
                        for &(lc, lv) in &images[i] {
                            let mut ne = pe.clone();
                            ne[lv] += 1;
                            let v = next.entry(ne.clone()).or_insert(0);
                            *v += pc * lc;
                            if *v == 0 {
                                next.remove(&ne);
                            }
                        }
                    }
                    prod = next;
                }
            }
            for (pe, pc) in prod {
                let v = acc.entry(pe.clone()).or_insert(0);
                *v += c * pc;
                if *v == 0 {
                    acc.remove(&pe);
                }
            }
        }
        Ok(MultiHomogPolynomial {
            ambient: self.ambient.clone(),
            terms: acc,
        })
    }

    /// `Some(+1)` if equal, `Some(-1)` if equal to the negation, else `None`.
    pub fn compare_up_to_sign(&self, other: &Self) -> Option<i8> {
        if self.terms == other.terms {
            Some(1)
        } else if self.neg().terms == other.terms {
            Some(-1)
        } else {
            None
        }
    }

    /// Exact evaluation in `F_p` at a coordinate vector.
    pub fn evaluate_mod_p(&self, point: &[u64], p: &PrimeModulus) -> Result<u64, VarietyError> {
        let n = self.ambient.coordinates();
        if point.len() != n {
            return Err(VarietyError::DimensionMismatch {
                expected: n,
                got: point.len(),
            });
        }
        let pp = p.get();
        let mut acc = 0u64;
        for (e, &c) in &self.terms {
            let mut t = p.reduce(c);
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    t = t * p.pow(point[i] % pp, ei as u64) % pp;
                }
            }
            acc = (acc + t) % pp;
        }
        Ok(acc)
    }

    pub fn display<'a>(&'a self, names: Option<&'a [String]>) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

impl fmt::Display for MultiHomogPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(None))
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a MultiHomogPolynomial,
    names: Option<&'a [String]>,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, &c)) in self.poly.terms.iter().rev().enumerate() {
            if i == 0 {
                write!(f, "{}", term_string(c, e, self.names))?;
            } else if c < 0 {
                write!(f, " - {}", term_string(-c, e, self.names))?;
            } else {
                write!(f, " + {}", term_string(c, e, self.names))?;
            }
        }
        Ok(())
    }
}
