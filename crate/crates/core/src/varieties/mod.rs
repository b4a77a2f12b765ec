//! Exact representations of the cataloged threefolds: defining equations,
//! twist-family substitution rules, and involutions as signed coordinate
//! permutations.
//!
//! Varieties are stored as their singular models exactly as printed in the
//! sources; resolutions are metadata only. Equations with rational
//! coefficients are cleared to integers, with the clearing factor recorded.

mod catalog;
mod poly;
mod vdf;

pub use catalog::Catalog;
pub use poly::{Ambient, MultiHomogPolynomial, ProjectiveFactor};
pub use vdf::parse_definition_file;

use crate::error::VarietyError;

/// Images of each coordinate under a linear change, as sparse linear forms.
pub type LinearSubstitution = Vec<Vec<(i64, usize)>>;

/// Whether a cataloged twist construction is backed by a sign computation on
/// the holomorphic form or only conjectured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwistStatus {
    /// The attached involution provably acts as -1 on the holomorphic form.
    Proven,
    /// The substitution exists but its action on H^3 is an open question;
    /// pipelines report evidence only.
    Conjectural,
    /// Concrete instance shipped purely to exercise machinery.
    Plumbing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietyMetadata {
    /// Singular-point count quoted by the sources, when stated.
    pub nodes: Option<u32>,
    pub notes: String,
    /// Primes excluded from good-prime comparisons for this model
    /// (clearing factors, bad reduction, level divisors).
    pub bad_primes: Vec<u64>,
    pub twist_status: TwistStatus,
    /// Integer multiplier applied to clear denominators, if any.
    pub clearing_factor: Option<i64>,
}

impl Default for VarietyMetadata {
    fn default() -> Self {
        VarietyMetadata {
            nodes: None,
            notes: String::new(),
            bad_primes: vec![],
            twist_status: TwistStatus::Proven,
            clearing_factor: None,
        }
    }
}

/// A cataloged system of integer equations in a (product of) projective
/// space(s).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietySpec {
    pub id: String,
    pub ambient: Ambient,
    pub equations: Vec<MultiHomogPolynomial>,
    pub var_names: Vec<String>,
    pub metadata: VarietyMetadata,
}

impl VarietySpec {
    pub fn coordinates(&self) -> usize {
        self.ambient.coordinates()
    }
}

/// A pencil of plane cubics over `P^1`, combined with itself by fiber product
/// over the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PencilFiberProductSpec {
    pub id: String,
    /// Bi-degree (3, 1) equation on `P^2 x P^1` in ((x:y:z), (mu:lambda)).
    pub pencil: MultiHomogPolynomial,
}

impl PencilFiberProductSpec {
    pub fn new(id: &str, pencil: MultiHomogPolynomial) -> Result<Self, VarietyError> {
        if pencil.multi_degree() != Some(vec![3, 1]) {
            return Err(VarietyError::NotHomogeneous {
                term: format!("{pencil}"),
                expected: vec![3, 1],
                factor: 0,
            });
        }
        Ok(PencilFiberProductSpec {
            id: id.to_string(),
            pencil,
        })
    }
}

/// How to count points on an entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountShape {
    /// Common projective zeros of all equations.
    Projective,
    /// `y^2 = f` presentation; counted fiberwise with character sums.
    DoubleCover { cover_coordinate: usize },
    /// Self-fiber product of the pencil over `P^1`.
    PencilFiberProduct,
    /// Weierstrass cubic; counted affinely with the point at infinity.
    EllipticCurve { a: i64, b: i64, c: i64 },
}

/// A signed coordinate permutation `x_i -> sign_i * x_{target_i}`, optionally
/// permuting the equation list with per-equation signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutionSpec {
    pub name: String,
    pub targets: Vec<usize>,
    pub signs: Vec<i8>,
    /// Expected equation mapping `j -> (k, sign)`, verified by
    /// [`involution_check`]; `None` lets the check discover it.
    pub equation_map: Option<Vec<(usize, i8)>>,
}

impl InvolutionSpec {
    pub fn new(name: &str, targets: Vec<usize>, signs: Vec<i8>) -> Result<Self, VarietyError> {
        let n = targets.len();
        if signs.len() != n {
            return Err(VarietyError::DimensionMismatch {
                expected: n,
                got: signs.len(),
            });
        }
        // must square to the identity with composed signs +1
        let mut seen = vec![false; n];
        for (i, &t) in targets.iter().enumerate() {
            if t >= n || seen[t] {
                return Err(VarietyError::NotAnInvolution);
            }
            seen[t] = true;
            if targets[t] != i || signs[i] * signs[t] != 1 {
                return Err(VarietyError::NotAnInvolution);
            }
            if signs[i].abs() != 1 {
                return Err(VarietyError::NotAnInvolution);
            }
        }
        Ok(InvolutionSpec {
            name: name.to_string(),
            targets,
            signs,
            equation_map: None,
        })
    }

    pub fn identity(n: usize) -> Self {
        InvolutionSpec {
            name: "identity".to_string(),
            targets: (0..n).collect(),
            signs: vec![1; n],
            equation_map: None,
        }
    }

    /// Negate a single coordinate.
    pub fn negation(name: &str, n: usize, coordinate: usize) -> Self {
        let mut signs = vec![1i8; n];
        signs[coordinate] = -1;
        InvolutionSpec {
            name: name.to_string(),
            targets: (0..n).collect(),
            signs,
            equation_map: None,
        }
    }

    /// Swap two coordinates.
    pub fn swap(name: &str, n: usize, i: usize, j: usize) -> Self {
        let mut targets: Vec<usize> = (0..n).collect();
        targets.swap(i, j);
        InvolutionSpec {
            name: name.to_string(),
            targets,
            signs: vec![1; n],
            equation_map: None,
        }
    }

    pub fn apply(&self, poly: &MultiHomogPolynomial) -> Result<MultiHomogPolynomial, VarietyError> {
        poly.substitute_signed(&self.targets, &self.signs)
    }

    pub fn is_identity(&self) -> bool {
        self.targets.iter().enumerate().all(|(i, &t)| t == i) && self.signs.iter().all(|&s| s == 1)
    }
}

/// Outcome of checking that an involution maps the equation system to itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutionCheck {
    /// `equation_signs[j] = (k, sign)`: equation `j` pulls back to `sign *`
    /// equation `k`.
    pub equation_signs: Vec<(usize, i8)>,
}

/// Substitute the involution into every equation and confirm each image is
/// plus or minus an equation of the system.
pub fn involution_check(
    variety: &VarietySpec,
    involution: &InvolutionSpec,
) -> Result<InvolutionCheck, VarietyError> {
    if involution.targets.len() != variety.coordinates() {
        return Err(VarietyError::DimensionMismatch {
            expected: variety.coordinates(),
            got: involution.targets.len(),
        });
    }
    let mut equation_signs = Vec::with_capacity(variety.equations.len());
    for (j, eq) in variety.equations.iter().enumerate() {
        let image = involution.apply(eq)?;
        let mut found = None;
        for (k, candidate) in variety.equations.iter().enumerate() {
            if let Some(sign) = image.compare_up_to_sign(candidate) {
                found = Some((k, sign));
                break;
            }
        }
        let Some(hit) = found else {
            return Err(VarietyError::ImageNotInSystem { index: j });
        };
        if let Some(expected) = &involution.equation_map {
            if expected[j] != hit {
                return Err(VarietyError::ImageNotInSystem { index: j });
            }
        }
        equation_signs.push(hit);
    }
    Ok(InvolutionCheck { equation_signs })
}

/// Monomial pattern -> power of `d`: a term with exactly `degree` in
/// `coordinate` acquires `d^power` under specialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistPattern {
    pub coordinate: usize,
    pub degree: u16,
    pub power: u32,
}

/// Diagonal-plus-permutation coordinate change relating two specializations
/// whose parameters differ by a square: each coordinate with `scaling = 1`
/// gets multiplied by the square root of the parameter ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateChange {
    pub scaling: Vec<u8>,
    pub permutation: Option<Vec<usize>>,
}

impl CoordinateChange {
    pub fn diagonal(n: usize, scaled: &[usize]) -> Self {
        let mut scaling = vec![0u8; n];
        for &i in scaled {
            scaling[i] = 1;
        }
        CoordinateChange {
            scaling,
            permutation: None,
        }
    }

    /// The involution obtained by specializing the square root to -1; this is
    /// the Galois-conjugation cocycle of the change.
    pub fn involution_at_minus_one(&self, name: &str) -> InvolutionSpec {
        let n = self.scaling.len();
        let targets = self
            .permutation
            .clone()
            .unwrap_or_else(|| (0..n).collect());
        let signs = self
            .scaling
            .iter()
            .map(|&e| if e % 2 == 1 { -1 } else { 1 })
            .collect();
        InvolutionSpec {
            name: name.to_string(),
            targets,
            signs,
            equation_map: None,
        }
    }

    /// Apply the change to an `F_p` point, with `s` the chosen square root.
    pub fn apply_mod_p(&self, point: &[u64], s: u64, p: u64) -> Vec<u64> {
        let n = self.scaling.len();
        let mut scaled: Vec<u64> = point
            .iter()
            .zip(&self.scaling)
            .map(|(&x, &e)| if e % 2 == 1 { x * s % p } else { x })
            .collect();
        if let Some(perm) = &self.permutation {
            let mut out = vec![0u64; n];
            for (i, &t) in perm.iter().enumerate() {
                out[t] = scaled[i];
            }
            scaled = out;
        }
        scaled
    }
}

/// Rule sending a squarefree `d` to the `d`-parametrized variant of a base
/// variety, together with the coordinate change that witnesses square-class
/// invariance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistFamily {
    pub base_id: String,
    pub patterns: Vec<TwistPattern>,
    pub change: CoordinateChange,
}

impl TwistFamily {
    fn d_power(&self, exps: &[u16]) -> u32 {
        for pat in &self.patterns {
            if exps.get(pat.coordinate).copied().unwrap_or(0) == pat.degree {
                return pat.power;
            }
        }
        0
    }
}

/// Exact substituted system for a squarefree twist parameter.
/// `specialize_twist(family, 1)` returns the base system unchanged.
pub fn specialize_twist(
    family: &TwistFamily,
    base: &VarietySpec,
    d: i64,
) -> Result<VarietySpec, VarietyError> {
    if d == 0 || !crate::charfield::is_squarefree(d).map_err(|_| VarietyError::BadTwistParameter(d))? {
        return Err(VarietyError::BadTwistParameter(d));
    }
    let equations = base
        .equations
        .iter()
        .map(|eq| {
            let raw: Vec<(i64, Vec<u16>)> = eq
                .terms()
                .map(|(e, c)| (c * d.pow(family.d_power(e)), e.clone()))
                .collect();
            MultiHomogPolynomial::new(eq.ambient().clone(), &raw)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VarietySpec {
        id: if d == 1 {
            base.id.clone()
        } else {
            format!("{}@d={}", base.id, d)
        },
        ambient: base.ambient.clone(),
        equations,
        var_names: base.var_names.clone(),
        metadata: base.metadata.clone(),
    })
}

/// Where the modular coefficients attached to an entry come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModularSource {
    /// Eta-quotient record; coefficients come from expansion.
    Eta(crate::qseries::NewformRecord),
    /// Known level, but coefficients must be supplied by an external file.
    External { label: String, level: u64 },
    /// Calibration curve: the "form" is the curve itself, traces come from
    /// counting the base curve.
    EllipticSelf,
}

/// Default residue chart `(i0, I)` for the pullback-sign computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueChart {
    /// Distinguished nonvanishing coordinate; `None` on affine models.
    pub i0: Option<usize>,
    /// Column indices of the Jacobian minor.
    pub minor: Vec<usize>,
}

/// A catalog entry: the variety plus everything attached to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub variety: VarietySpec,
    pub shape: CountShape,
    pub involutions: Vec<InvolutionSpec>,
    pub twist: Option<TwistFamily>,
    pub modular: Option<ModularSource>,
    pub chart: Option<ResidueChart>,
    /// Companion coordinate system (e.g. the (u, v)-form of a quintic):
    /// catalog id plus the linear substitution into this entry's coordinates.
    pub companion: Option<(String, LinearSubstitution, i64)>,
}

impl CatalogEntry {
    /// The involution with the given name, or an error listing the entry.
    pub fn involution(&self, name: &str) -> Result<&InvolutionSpec, VarietyError> {
        self.involutions
            .iter()
            .find(|i| i.name == name)
            .ok_or_else(|| VarietyError::MissingAttachment {
                id: self.variety.id.clone(),
                what: format!("involution `{name}`"),
            })
    }

    pub fn twist_family(&self) -> Result<&TwistFamily, VarietyError> {
        self.twist
            .as_ref()
            .ok_or_else(|| VarietyError::MissingAttachment {
                id: self.variety.id.clone(),
                what: "twist family".to_string(),
            })
    }

    /// Branch polynomial of a `y^2 = f` presentation: the equation with the
    /// cover coordinate's square removed and the rest negated.
    pub fn branch_polynomial(&self) -> Result<MultiHomogPolynomial, VarietyError> {
        let CountShape::DoubleCover { cover_coordinate } = self.shape else {
            return Err(VarietyError::MissingAttachment {
                id: self.variety.id.clone(),
                what: "double-cover presentation".to_string(),
            });
        };
        let eq = &self.variety.equations[0];
        let mut raw = Vec::new();
        for (e, c) in eq.terms() {
            if e[cover_coordinate] == 2 && e.iter().enumerate().all(|(i, &x)| i == cover_coordinate || x == 0) {
                debug_assert_eq!(c, 1, "cover coordinate must enter as +y^2");
                continue;
            }
            raw.push((-c, e.clone()));
        }
        MultiHomogPolynomial::new(eq.ambient().clone(), &raw)
    }

    pub fn specialize(&self, d: i64) -> Result<VarietySpec, VarietyError> {
        if d == 1 {
            return Ok(self.variety.clone());
        }
        specialize_twist(self.twist_family()?, &self.variety, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schoen_uv() -> CatalogEntry {
        Catalog::builtin().get("schoen-quintic-uv").unwrap().clone()
    }

    #[test]
    fn involution_validation() {
        assert!(InvolutionSpec::new("ok", vec![1, 0, 2], vec![1, 1, -1]).is_ok());
        // signs must compose to +1 through the 2-cycle
        assert!(InvolutionSpec::new("bad", vec![1, 0], vec![1, -1]).is_err());
        assert!(InvolutionSpec::new("bad", vec![1, 2, 0], vec![1, 1, 1]).is_err());
        assert!(InvolutionSpec::new("bad", vec![0, 0], vec![1, 1]).is_err());
        // x -> -x through a swap is fine when both legs flip
        assert!(InvolutionSpec::new("ok", vec![1, 0], vec![-1, -1]).is_ok());
    }

    #[test]
    fn specialize_is_identity_at_one() {
        let entry = schoen_uv();
        let spec = entry.specialize(1).unwrap();
        assert_eq!(spec.equations, entry.variety.equations);
    }

    #[test]
    fn specialize_rejects_bad_parameters() {
        let entry = schoen_uv();
        assert!(entry.specialize(0).is_err());
        assert!(entry.specialize(12).is_err());
        assert!(entry.specialize(-4).is_err());
    }

    #[test]
    fn change_cocycle_is_the_attached_involution() {
        // Specializing the coordinate change at sqrt = -1 must reproduce the
        // cataloged involution for every diagonal-change family.
        for id in [
            "schoen-quintic-uv",
            "v33-uv",
            "v24",
            "vgn",
            "double-octic-template",
            "double-sextic-template",
            "elliptic-calibration",
            "beauville-V",
        ] {
            let cat = Catalog::builtin();
            let entry = cat.get(id).unwrap();
            let fam = entry.twist_family().unwrap();
            let derived = fam.change.involution_at_minus_one("derived");
            let attached = &entry.involutions[0];
            assert_eq!(derived.targets, attached.targets, "{id}");
            assert_eq!(derived.signs, attached.signs, "{id}");
        }
    }
}
