//! The residue-form denominator (a Jacobian minor) and the sign of an
//! involution's pullback action on the holomorphic form.
//!
//! For a complete intersection of k equations in P^n, the chart (i0, I) with
//! |I| = k gives the form `wedge_{j not in {i0} union I} dx_j / D_I` where
//! `D_I = det(df_i/dx_j)_{j in I}`. Pulling back along a signed coordinate
//! permutation multiplies the numerator by the wedge sign and the denominator
//! by the semi-invariance sign of `D_I`; the product is the scalar by which
//! the involution acts on the form. Pencil fiber products are handled on the
//! affine chart `z = mu = 1` with the two fiber copies and the base parameter
//! as coordinates.

use crate::error::FormsError;
use crate::varieties::{
    involution_check, Ambient, CatalogEntry, CountShape, InvolutionSpec, MultiHomogPolynomial,
    ResidueChart, VarietySpec,
};

/// Symbolic determinant of the k x k matrix `d f_i / d x_j`, `j in minor`.
/// The zero polynomial is a legitimate result (an inadmissible chart).
pub fn jacobian_minor(
    variety: &VarietySpec,
    minor: &[usize],
) -> Result<MultiHomogPolynomial, FormsError> {
    let k = variety.equations.len();
    if minor.len() != k {
        return Err(FormsError::WrongMinorSize {
            expected: k,
            got: minor.len(),
        });
    }
    let n = variety.coordinates();
    for &j in minor {
        if j >= n {
            return Err(FormsError::IndexOutOfRange(j));
        }
    }
    let mut matrix = Vec::with_capacity(k);
    for eq in &variety.equations {
        let row: Vec<MultiHomogPolynomial> = minor
            .iter()
            .map(|&j| eq.derivative(j))
            .collect::<Result<_, _>>()
            .map_err(FormsError::Involution)?;
        matrix.push(row);
    }
    Ok(determinant(&matrix))
}

/// Cofactor expansion along the first row. All catalog cases have k <= 4.
fn determinant(matrix: &[Vec<MultiHomogPolynomial>]) -> MultiHomogPolynomial {
    let k = matrix.len();
    if k == 1 {
        return matrix[0][0].clone();
    }
    let ambient = matrix[0][0].ambient().clone();
    let mut acc = MultiHomogPolynomial::zero(ambient);
    for col in 0..k {
        if matrix[0][col].is_zero() {
            continue;
        }
        let sub: Vec<Vec<MultiHomogPolynomial>> = matrix[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let cofactor = matrix[0][col].mul(&determinant(&sub));
        acc = if col % 2 == 0 {
            acc.add(&cofactor)
        } else {
            acc.sub(&cofactor)
        };
    }
    acc
}

/// A residue chart with its cached denominator.
#[derive(Debug, Clone)]
pub struct ResidueFormSpec {
    pub variety: VarietySpec,
    pub i0: Option<usize>,
    pub minor: Vec<usize>,
    denominator: MultiHomogPolynomial,
}

impl ResidueFormSpec {
    pub fn new(
        variety: VarietySpec,
        i0: Option<usize>,
        minor: Vec<usize>,
    ) -> Result<Self, FormsError> {
        if let Some(i0) = i0 {
            if i0 >= variety.coordinates() {
                return Err(FormsError::IndexOutOfRange(i0));
            }
            if minor.contains(&i0) {
                return Err(FormsError::OverlappingIndices(i0));
            }
        }
        let denominator = jacobian_minor(&variety, &minor)?;
        if denominator.is_zero() {
            return Err(FormsError::ZeroMinor);
        }
        Ok(ResidueFormSpec {
            variety,
            i0,
            minor,
            denominator,
        })
    }

    /// `D_I`, the Jacobian-minor denominator of the form.
    pub fn denominator(&self) -> &MultiHomogPolynomial {
        &self.denominator
    }

    /// Coordinates appearing in the numerator wedge.
    pub fn numerator_indices(&self) -> Vec<usize> {
        (0..self.variety.coordinates())
            .filter(|i| Some(*i) != self.i0 && !self.minor.contains(i))
            .collect()
    }
}

/// Parity-and-signs contribution of the involution on `wedge dx_j`, `j in
/// indices`: the permutation must stabilize the index set.
fn wedge_sign(involution: &InvolutionSpec, indices: &[usize]) -> Result<i8, FormsError> {
    let image: Vec<usize> = indices.iter().map(|&j| involution.targets[j]).collect();
    let mut sorted = image.clone();
    sorted.sort_unstable();
    if sorted != indices.to_vec() {
        return Err(FormsError::WedgeNotStable);
    }
    // permutation parity on the restricted set, by counting inversions
    let mut parity = 1i8;
    for a in 0..image.len() {
        for b in a + 1..image.len() {
            if image[a] > image[b] {
                parity = -parity;
            }
        }
    }
    let coordinate_signs: i8 = indices
        .iter()
        .map(|&j| involution.signs[j])
        .product();
    Ok(parity * coordinate_signs)
}

/// Restore the chart normalization `x_{i0} = 1` after applying the
/// involution. When the involution negates `x_{i0}`, composing with the
/// global rescale by -1 (which is the projective identity) fixes the chart;
/// the rescale contributes `(-1)^{weight}` to every coordinate. A chart whose
/// distinguished coordinate is permuted away, or negated with even weight, is
/// not admissible.
fn normalize_to_chart(
    form: &ResidueFormSpec,
    involution: &InvolutionSpec,
) -> Result<InvolutionSpec, FormsError> {
    let Some(i0) = form.i0 else {
        return Ok(involution.clone());
    };
    if involution.targets[i0] != i0 {
        return Err(FormsError::WedgeNotStable);
    }
    if involution.signs[i0] == 1 {
        return Ok(involution.clone());
    }
    let factor = form
        .variety
        .ambient
        .single_factor()
        .ok_or(FormsError::ChartNotSemiInvariant)?;
    if factor.weights[i0] % 2 == 0 {
        return Err(FormsError::ChartNotSemiInvariant);
    }
    let signs = involution
        .signs
        .iter()
        .zip(&factor.weights)
        .map(|(&s, &w)| if w % 2 == 1 { -s } else { s })
        .collect();
    Ok(InvolutionSpec {
        name: involution.name.clone(),
        targets: involution.targets.clone(),
        signs,
        equation_map: None,
    })
}

/// The scalar `s` with `iota* Omega = s Omega` on the given chart: the wedge
/// sign of the numerator times the semi-invariance sign of `D_I`, after
/// restoring the chart normalization.
pub fn pullback_sign(
    form: &ResidueFormSpec,
    involution: &InvolutionSpec,
) -> Result<i8, FormsError> {
    involution_check(&form.variety, involution)?;
    if form.i0.is_some() && form.variety.ambient.single_factor().is_none() {
        // the chart formula only applies to one projective factor; products
        // go through their affine fiber-product model
        return Err(FormsError::ChartNotSemiInvariant);
    }
    let involution = normalize_to_chart(form, involution)?;
    let numerator = form.numerator_indices();
    let s_num = wedge_sign(&involution, &numerator)?;
    let image = involution
        .apply(&form.denominator)
        .map_err(FormsError::Involution)?;
    let eps = image
        .compare_up_to_sign(&form.denominator)
        .ok_or(FormsError::ChartNotSemiInvariant)?;
    Ok(s_num * eps)
}

/// `iota* Omega = e1 e2 e3 Omega` for a fixed point with local diagonal signs,
/// together with the dimension of the local fixed locus.
pub fn local_fixed_sign(e1: i8, e2: i8, e3: i8) -> Result<(i8, usize), FormsError> {
    for e in [e1, e2, e3] {
        if e != 1 && e != -1 {
            return Err(FormsError::BadLocalSign);
        }
    }
    let fixed_dimension = [e1, e2, e3].iter().filter(|&&e| e == 1).count();
    Ok((e1 * e2 * e3, fixed_dimension))
}

/// Every admissible chart's sign. A chart is admissible when the minor is not
/// identically zero, the involution stabilizes the numerator wedge, and `D_I`
/// is semi-invariant. Used to verify chart independence.
pub fn all_chart_signs(
    variety: &VarietySpec,
    involution: &InvolutionSpec,
) -> Result<Vec<(Option<usize>, Vec<usize>, i8)>, FormsError> {
    involution_check(variety, involution)?;
    let n = variety.coordinates();
    let k = variety.equations.len();
    let affine = matches!(variety.ambient, Ambient::Affine(_));
    let mut out = Vec::new();
    let i0_choices: Vec<Option<usize>> = if affine {
        vec![None]
    } else {
        (0..n).map(Some).collect()
    };
    for i0 in i0_choices {
        let pool: Vec<usize> = (0..n).filter(|&i| Some(i) != i0).collect();
        for minor in combinations(&pool, k) {
            let Ok(form) = ResidueFormSpec::new(variety.clone(), i0, minor.clone()) else {
                continue;
            };
            match pullback_sign(&form, involution) {
                Ok(sign) => out.push((i0, minor, sign)),
                Err(FormsError::WedgeNotStable | FormsError::ChartNotSemiInvariant) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn combinations(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if pool.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &first) in pool.iter().enumerate() {
        for mut rest in combinations(&pool[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The affine fiber-product model of a cubic pencil: coordinates
/// `(x, y, u, v, t)` with the pencil equation at `z = mu = 1, lambda = t` in
/// both fiber copies.
pub fn pencil_fiber_product_model(
    entry: &CatalogEntry,
) -> Result<(VarietySpec, Vec<InvolutionSpec>), FormsError> {
    if entry.shape != CountShape::PencilFiberProduct {
        return Err(FormsError::Involution(
            crate::error::VarietyError::MissingAttachment {
                id: entry.variety.id.clone(),
                what: "pencil shape".to_string(),
            },
        ));
    }
    let pencil = &entry.variety.equations[0];
    let ambient = Ambient::Affine(5);
    let mut first_copy = Vec::new();
    let mut second_copy = Vec::new();
    for (e, c) in pencil.terms() {
        // drop z and mu (set to 1), rename lambda -> t
        first_copy.push((c, vec![e[0], e[1], 0, 0, e[4]]));
        second_copy.push((c, vec![0, 0, e[0], e[1], e[4]]));
    }
    let eq1 = MultiHomogPolynomial::new(ambient.clone(), &first_copy)
        .map_err(FormsError::Involution)?;
    let eq2 = MultiHomogPolynomial::new(ambient.clone(), &second_copy)
        .map_err(FormsError::Involution)?;
    let model = VarietySpec {
        id: format!("{}-fiber-product", entry.variety.id),
        ambient,
        equations: vec![eq1, eq2],
        var_names: ["x", "y", "u", "v", "t"].iter().map(|s| s.to_string()).collect(),
        metadata: entry.variety.metadata.clone(),
    };
    let mut involutions = Vec::new();
    for inv in &entry.involutions {
        involutions.push(transfer_pencil_involution(inv)?);
    }
    Ok((model, involutions))
}

/// Carry a diagonal involution of `P^2 x P^1` to the affine model, after
/// normalizing the per-factor sign ambiguity so that z and mu are fixed.
fn transfer_pencil_involution(inv: &InvolutionSpec) -> Result<InvolutionSpec, FormsError> {
    if inv.targets.iter().enumerate().any(|(i, &t)| t != i) {
        return Err(FormsError::Involution(
            crate::error::VarietyError::NotAnInvolution,
        ));
    }
    let sz = inv.signs[2];
    let smu = inv.signs[3];
    let sx = inv.signs[0] * sz;
    let sy = inv.signs[1] * sz;
    let st = inv.signs[4] * smu;
    Ok(InvolutionSpec {
        name: inv.name.clone(),
        targets: (0..5).collect(),
        signs: vec![sx, sy, sx, sy, st],
        equation_map: None,
    })
}

/// Pullback sign of a named catalog involution on the entry's default chart.
pub fn entry_pullback_sign(entry: &CatalogEntry, involution_name: &str) -> Result<i8, FormsError> {
    let (variety, involution) = if entry.shape == CountShape::PencilFiberProduct {
        let (model, invs) = pencil_fiber_product_model(entry)?;
        let inv = if involution_name == "identity" {
            InvolutionSpec::identity(5)
        } else {
            invs.into_iter()
                .find(|i| i.name == involution_name)
                .ok_or_else(|| {
                    FormsError::Involution(crate::error::VarietyError::MissingAttachment {
                        id: entry.variety.id.clone(),
                        what: format!("involution `{involution_name}`"),
                    })
                })?
        };
        (model, inv)
    } else {
        let inv = if involution_name == "identity" {
            InvolutionSpec::identity(entry.variety.coordinates())
        } else {
            entry.involution(involution_name).map_err(FormsError::Involution)?.clone()
        };
        (entry.variety.clone(), inv)
    };
    let chart = entry.chart.as_ref().ok_or_else(|| {
        FormsError::Involution(crate::error::VarietyError::MissingAttachment {
            id: entry.variety.id.clone(),
            what: "residue chart".to_string(),
        })
    })?;
    let ResidueChart { i0, minor } = chart.clone();
    let form = ResidueFormSpec::new(variety, i0, minor)?;
    pullback_sign(&form, &involution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varieties::Catalog;

    #[test]
    fn vgn_minor_is_sixteen_y0y1y2y3() {
        let cat = Catalog::builtin();
        let e = cat.get("vgn").unwrap();
        let d = jacobian_minor(&e.variety, &[4, 5, 6, 7]).unwrap();
        let expected = MultiHomogPolynomial::new(
            e.variety.ambient.clone(),
            &[(16, vec![0, 0, 0, 0, 1, 1, 1, 1])],
        )
        .unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn schoen_partial_is_the_x3_derivative() {
        let cat = Catalog::builtin();
        let e = cat.get("schoen-quintic").unwrap();
        let d = jacobian_minor(&e.variety, &[3]).unwrap();
        // df/dx3 = 5 x3^4 - 5 x0 x1 x2 x4
        let expected = MultiHomogPolynomial::new(
            e.variety.ambient.clone(),
            &[(5, vec![0, 0, 0, 4, 0]), (-5, vec![1, 1, 1, 0, 1])],
        )
        .unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn v33_minor_is_proportional_to_x1sq_x5sq() {
        let cat = Catalog::builtin();
        let e = cat.get("v33").unwrap();
        let d = jacobian_minor(&e.variety, &[1, 5]).unwrap();
        let expected = MultiHomogPolynomial::new(
            e.variety.ambient.clone(),
            &[(9, vec![0, 2, 0, 0, 0, 2])],
        )
        .unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn zero_minor_reported() {
        let cat = Catalog::builtin();
        let e = cat.get("v33").unwrap();
        // both columns from coordinates the second equation never sees
        let d = jacobian_minor(&e.variety, &[0, 1]).unwrap();
        assert!(d.is_zero());
        assert!(matches!(
            ResidueFormSpec::new(e.variety.clone(), Some(2), vec![0, 1]),
            Err(FormsError::ZeroMinor)
        ));
    }

    #[test]
    fn minor_size_and_ranges_checked() {
        let cat = Catalog::builtin();
        let e = cat.get("v33").unwrap();
        assert!(matches!(
            jacobian_minor(&e.variety, &[1]),
            Err(FormsError::WrongMinorSize {
                expected: 2,
                got: 1
            })
        ));
        assert!(matches!(
            jacobian_minor(&e.variety, &[1, 9]),
            Err(FormsError::IndexOutOfRange(9))
        ));
        assert!(matches!(
            ResidueFormSpec::new(e.variety.clone(), Some(1), vec![1, 5]),
            Err(FormsError::OverlappingIndices(1))
        ));
    }

    #[test]
    fn paper_involutions_all_act_by_minus_one() {
        let cat = Catalog::builtin();
        for (id, name) in [
            ("schoen-quintic", "swap-x0-x1"),
            ("schoen-quintic-uv", "negate-v"),
            ("beauville-V", "negate-xy-lambda"),
            ("v33", "swap-x2-x3"),
            ("v33-uv", "negate-v"),
            ("v24", "negate-x1"),
            ("vgn", "negate-x0"),
            ("double-octic-template", "negate-y"),
            ("double-sextic-template", "negate-w"),
            ("hirzebruch-quintic", "negate-y"),
            ("elliptic-calibration", "negate-y"),
        ] {
            let e = cat.get(id).unwrap();
            assert_eq!(entry_pullback_sign(e, name).unwrap(), -1, "{id}/{name}");
        }
    }

    #[test]
    fn identity_involution_acts_trivially() {
        let cat = Catalog::builtin();
        for id in ["schoen-quintic", "v33", "vgn", "beauville-V"] {
            let e = cat.get(id).unwrap();
            assert_eq!(entry_pullback_sign(e, "identity").unwrap(), 1, "{id}");
        }
    }

    #[test]
    fn sign_is_chart_independent() {
        let cat = Catalog::builtin();
        for (id, name, expected) in [
            ("schoen-quintic", "swap-x0-x1", -1i8),
            ("schoen-quintic-uv", "negate-v", -1),
            ("v33", "swap-x2-x3", -1),
            ("v24", "negate-x1", -1),
            ("vgn", "negate-x0", -1),
            ("hirzebruch-quintic", "negate-y", -1),
        ] {
            let e = cat.get(id).unwrap();
            let inv = e.involution(name).unwrap();
            let signs = all_chart_signs(&e.variety, inv).unwrap();
            assert!(!signs.is_empty(), "{id}");
            for (i0, minor, sign) in &signs {
                assert_eq!(*sign, expected, "{id} chart ({i0:?}, {minor:?})");
            }
        }
    }

    #[test]
    fn pencil_model_charts_agree() {
        let cat = Catalog::builtin();
        let e = cat.get("beauville-V").unwrap();
        let (model, invs) = pencil_fiber_product_model(e).unwrap();
        assert_eq!(model.equations.len(), 2);
        let signs = all_chart_signs(&model, &invs[0]).unwrap();
        assert!(!signs.is_empty());
        for (_, minor, sign) in &signs {
            assert_eq!(*sign, -1, "chart {minor:?}");
        }
    }

    #[test]
    fn local_fixed_sign_table() {
        assert_eq!(local_fixed_sign(-1, -1, -1).unwrap(), (-1, 0));
        assert_eq!(local_fixed_sign(1, 1, -1).unwrap(), (-1, 2));
        assert_eq!(local_fixed_sign(1, -1, -1).unwrap(), (1, 1));
        assert!(local_fixed_sign(0, 1, 1).is_err());
    }

    #[test]
    fn diagonal_involutions_match_the_local_model() {
        // V24 and vGN negate one coordinate; the fixed locus is a divisor, so
        // the local signs are (-1, +1, +1) and the products must agree.
        let cat = Catalog::builtin();
        let (expected, _) = local_fixed_sign(-1, 1, 1).unwrap();
        for (id, name) in [("v24", "negate-x1"), ("vgn", "negate-x0")] {
            let e = cat.get(id).unwrap();
            assert_eq!(entry_pullback_sign(e, name).unwrap(), expected, "{id}");
        }
    }

    #[test]
    fn pullback_squares_to_identity() {
        let cat = Catalog::builtin();
        for (id, name) in [("schoen-quintic", "swap-x0-x1"), ("v24", "negate-x1")] {
            let e = cat.get(id).unwrap();
            let s = entry_pullback_sign(e, name).unwrap();
            assert_eq!(s * s, 1, "{id}");
        }
    }
}
