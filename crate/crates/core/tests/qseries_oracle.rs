//! Property check: the eta expander (incremental products plus one exact
//! series inversion) agrees with the independent binomial-theorem oracle on
//! random valid quotients, not just the cataloged ones.

mod common;

use cytwist::qseries::{expand_eta_quotient, EtaQuotient};
use proptest::prelude::*;

/// Random factor lists balanced so the weighted sum is a positive multiple
/// of 24 (a q-integral leading power at q^1 or later).
fn quotient_strategy() -> impl Strategy<Value = Vec<(u64, i32)>> {
    (
        proptest::collection::vec((1u64..=8, -6i32..=10), 1..=3),
        0i64..=3,
    )
        .prop_filter_map("needs a positive leading power", |(mut factors, extra)| {
            factors.retain(|&(_, r)| r != 0);
            let weighted: i64 = factors.iter().map(|&(m, r)| m as i64 * r as i64).sum();
            // balance with a power of eta(q) to reach 24 * (extra + ceil)
            let target = ((weighted.max(0) / 24) + 1 + extra) * 24;
            let balance = target - weighted;
            if balance != 0 {
                if balance.unsigned_abs() > 60 {
                    return None;
                }
                factors.push((1, balance as i32));
            }
            Some(factors)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expander_matches_binomial_oracle(factors in quotient_strategy()) {
        let eq = EtaQuotient::new(&factors).unwrap();
        prop_assume!(eq.leading_power() >= 1 && eq.leading_power() <= 40);
        let precision = 60usize;
        let f = expand_eta_quotient(&eq, precision).unwrap();
        let oracle = common::eta_oracle(&factors, precision);
        prop_assert_eq!(f.coeffs(), &oracle[..]);
    }

    #[test]
    fn twisting_preserves_magnitudes(factors in quotient_strategy(), d in -15i64..=15) {
        prop_assume!(d != 0 && d != 1 && cytwist::charfield::is_squarefree(d).unwrap());
        let eq = EtaQuotient::new(&factors).unwrap();
        prop_assume!(eq.leading_power() >= 1 && eq.leading_power() <= 40);
        let f = expand_eta_quotient(&eq, 60).unwrap();
        let spec = cytwist::charfield::QuadraticCharacterSpec::new(d).unwrap();
        let g = cytwist::qseries::twist_expansion(&f, &spec, 60).unwrap();
        for n in 1..=60usize {
            let fn_ = f.coefficient(n).unwrap();
            let gn = g.coefficient(n).unwrap();
            if num_integer::gcd(n as i64, spec.discriminant()) == 1 {
                // unit character value: same magnitude
                prop_assert_eq!(gn.magnitude(), fn_.magnitude(), "n = {}", n);
            } else {
                prop_assert_eq!(gn, &num_bigint::BigInt::ZERO);
            }
        }
    }
}
