//! Exact-arithmetic toolkit for checking, at desk scale, that quadratic
//! twisting of rigid Calabi-Yau threefolds matches quadratic twisting of
//! their attached weight-4 newforms.
//!
//! The pieces:
//! - [`charfield`]: prime moduli, squarefree checks, Kronecker characters;
//! - [`qseries`]: integer q-expansions of eta quotients, coefficient
//!   twisting, level arithmetic;
//! - [`varieties`]: the catalog of defining equations, twist families, and
//!   involutions;
//! - [`counting`]: exact point counts over `F_p` with a deterministic worker
//!   pool;
//! - [`forms`]: Jacobian-minor residue forms and involution pullback signs;
//! - [`harness`]: end-to-end verification pipelines and reports.

pub mod charfield;
pub mod counting;
pub mod error;
pub mod forms;
pub mod harness;
pub mod qseries;
pub mod varieties;

pub use charfield::{
    is_squarefree, kronecker, legendre_oracle, PrimeModulus, QuadraticCharacterSpec,
};
pub use counting::{
    character_sum, count_catalog_entry, count_double_cover, count_elliptic,
    count_pencil_fiber_product, count_projective, CountOptions, CountResult,
};
pub use forms::{
    all_chart_signs, entry_pullback_sign, jacobian_minor, local_fixed_sign, pullback_sign,
    ResidueFormSpec,
};
pub use qseries::{
    deligne_check, expand_eta_quotient, twist_expansion, twist_minimality_report, twisted_level,
    EtaQuotient, FormData, NewformRecord, QExpansion,
};
pub use varieties::{
    involution_check, specialize_twist, Catalog, CatalogEntry, InvolutionSpec,
    MultiHomogPolynomial, PencilFiberProductSpec, TwistFamily, VarietySpec,
};
