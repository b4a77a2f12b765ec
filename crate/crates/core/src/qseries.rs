//! Exact integer q-expansion arithmetic for the modular side: eta-quotient
//! expansion, coefficient twisting by a quadratic character, level arithmetic,
//! and coefficient sanity reports.
//!
//! All coefficients are arbitrary-size integers; nothing in this module
//! touches floating point.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::charfield::QuadraticCharacterSpec;
use crate::error::QSeriesError;

/// Integer q-expansion `c_1 q + c_2 q^2 + ... + c_B q^B`, indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    coeffs: Vec<BigInt>,
}

impl QExpansion {
    /// Wrap coefficients `c_1, ..., c_B`. Precision is the vector length.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Result<Self, QSeriesError> {
        if coeffs.is_empty() {
            return Err(QSeriesError::EmptyPrecision);
        }
        Ok(QExpansion { coeffs })
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_n` for `1 <= n <= B`.
    pub fn coefficient(&self, n: usize) -> Result<&BigInt, QSeriesError> {
        if n == 0 || n > self.coeffs.len() {
            return Err(QSeriesError::OutOfPrecision {
                index: n,
                precision: self.coeffs.len(),
            });
        }
        Ok(&self.coeffs[n - 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Truncate to a smaller precision.
    pub fn truncated(&self, precision: usize) -> Result<Self, QSeriesError> {
        if precision == 0 {
            return Err(QSeriesError::EmptyPrecision);
        }
        if precision > self.coeffs.len() {
            return Err(QSeriesError::PrecisionExceeded {
                requested: precision,
                available: self.coeffs.len(),
            });
        }
        Ok(QExpansion {
            coeffs: self.coeffs[..precision].to_vec(),
        })
    }
}

impl fmt::Display for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let n = i + 1;
            if first {
                write!(f, "{c}*q^{n}")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}*q^{n}", -c)?;
            } else {
                write!(f, " + {c}*q^{n}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A formal product `prod_i eta(q^{m_i})^{r_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaQuotient {
    factors: Vec<(u64, i32)>,
}

impl EtaQuotient {
    /// Build from `(m, r)` pairs. Duplicate `m` merge; the total eta-power sum
    /// `sum m*r` must be divisible by 24 so the leading q-power is integral.
    pub fn new(factors: &[(u64, i32)]) -> Result<Self, QSeriesError> {
        let mut merged: BTreeMap<u64, i32> = BTreeMap::new();
        for &(m, r) in factors {
            if m == 0 {
                return Err(QSeriesError::BadEtaFactor(0));
            }
            *merged.entry(m).or_insert(0) += r;
        }
        merged.retain(|_, r| *r != 0);
        let weighted: i64 = merged.iter().map(|(&m, &r)| m as i64 * r as i64).sum();
        if weighted % 24 != 0 {
            return Err(QSeriesError::NotDivisibleBy24(weighted));
        }
        Ok(EtaQuotient {
            factors: merged.into_iter().collect(),
        })
    }

    pub fn factors(&self) -> &[(u64, i32)] {
        &self.factors
    }

    /// `sum m*r / 24`, the q-power of the leading term.
    pub fn leading_power(&self) -> i64 {
        self.factors
            .iter()
            .map(|&(m, r)| m as i64 * r as i64)
            .sum::<i64>()
            / 24
    }

    /// `sum r`; the weight of the quotient is half of this.
    pub fn exponent_sum(&self) -> i64 {
        self.factors.iter().map(|&(_, r)| r as i64).sum()
    }

    /// Smallest Gamma_0-level admitting this quotient: the least common
    /// multiple of the eta arguments, raised so that `N * sum(r/m)` is
    /// divisible by 24. Reproduces the catalog levels 9, 8, 5, 6, 16, 9.
    pub fn level(&self) -> u64 {
        let mut lcm_m: u64 = 1;
        for &(m, _) in &self.factors {
            lcm_m = num_integer::lcm(lcm_m, m);
        }
        // sum r/m = p/q in lowest terms, with everything scaled by lcm_m.
        let p_scaled: i64 = self
            .factors
            .iter()
            .map(|&(m, r)| (lcm_m / m) as i64 * r as i64)
            .sum();
        if p_scaled == 0 {
            return lcm_m;
        }
        let g = num_integer::gcd(p_scaled.unsigned_abs(), lcm_m);
        let p = p_scaled.unsigned_abs() / g;
        let q = lcm_m / g;
        // need 24*q | N*p, N a multiple of lcm_m
        let step = 24 * q / num_integer::gcd(p, 24 * q);
        num_integer::lcm(lcm_m, step)
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(m, r)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if m == 1 {
                write!(f, "eta(q)")?;
            } else {
                write!(f, "eta(q^{m})")?;
            }
            if r != 1 {
                write!(f, "^{r}")?;
            }
        }
        Ok(())
    }
}

/// Multiply `series` (dense, index = q-power) in place by `(1 - q^k)`.
fn mul_one_minus_qk(series: &mut [BigInt], k: usize) {
    for i in (k..series.len()).rev() {
        let t = &series[i] - &series[i - k];
        series[i] = t;
    }
}

/// Invert a series with unit constant term by the standard recurrence
/// `b_0 = 1, b_n = -sum_{j=1..n} a_j b_{n-j}`.
fn invert_unit_series(a: &[BigInt]) -> Vec<BigInt> {
    debug_assert!(a[0].is_one());
    let mut b = vec![BigInt::zero(); a.len()];
    b[0] = BigInt::one();
    for n in 1..a.len() {
        let mut acc = BigInt::zero();
        for j in 1..=n {
            if !a[j].is_zero() {
                acc += &a[j] * &b[n - j];
            }
        }
        b[n] = -acc;
    }
    b
}

fn mul_series(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Expand `prod eta(q^m)^r` to precision `B`, i.e. the coefficients of
/// `q^{sum mr/24} * prod_{m,r} prod_{n>=1} (1 - q^{mn})^r` at `q^1 ... q^B`.
///
/// Negative exponents go through one exact inversion of the unit-constant-term
/// product of the corresponding factors.
pub fn expand_eta_quotient(eq: &EtaQuotient, precision: usize) -> Result<QExpansion, QSeriesError> {
    if precision == 0 {
        return Err(QSeriesError::EmptyPrecision);
    }
    let lead = eq.leading_power();
    if lead < 1 || lead as usize > precision {
        return Err(QSeriesError::LeadingPowerBeyondPrecision {
            lead,
            precision,
        });
    }
    let unit_len = precision - lead as usize + 1;

    let mut numer = vec![BigInt::zero(); unit_len];
    numer[0] = BigInt::one();
    let mut denom = vec![BigInt::zero(); unit_len];
    denom[0] = BigInt::one();
    for &(m, r) in eq.factors() {
        let target = if r > 0 { &mut numer } else { &mut denom };
        for n in 1.. {
            let k = (m * n) as usize;
            if k >= unit_len {
                break;
            }
            for _ in 0..r.unsigned_abs() {
                mul_one_minus_qk(target, k);
            }
        }
    }
    let unit = if denom.iter().skip(1).all(BigInt::is_zero) {
        numer
    } else {
        mul_series(&numer, &invert_unit_series(&denom), unit_len)
    };

    let mut coeffs = vec![BigInt::zero(); precision];
    for (i, c) in unit.into_iter().enumerate() {
        let n = lead as usize + i;
        if n <= precision {
            coeffs[n - 1] = c;
        }
    }
    QExpansion::from_coeffs(coeffs)
}

/// `g` with `g_n = chi(n) * f_n` for `n <= precision`.
///
/// This agrees with the true twisted newform at every index coprime to the
/// level and discriminant, which is all the verification pipelines consume.
pub fn twist_expansion(
    f: &QExpansion,
    spec: &QuadraticCharacterSpec,
    precision: usize,
) -> Result<QExpansion, QSeriesError> {
    if precision == 0 {
        return Err(QSeriesError::EmptyPrecision);
    }
    if precision > f.precision() {
        return Err(QSeriesError::PrecisionExceeded {
            requested: precision,
            available: f.precision(),
        });
    }
    let coeffs = f.coeffs()[..precision]
        .iter()
        .enumerate()
        .map(|(i, c)| c * BigInt::from(spec.chi((i + 1) as i64)))
        .collect();
    QExpansion::from_coeffs(coeffs)
}

/// Level of the twist of a level-`N` form by `chi`: `N * D^2` when
/// `gcd(N, D) = 1`. A common factor leaves the level with no simple answer,
/// reported as an error.
pub fn twisted_level(level: u64, spec: &QuadraticCharacterSpec) -> Result<u64, QSeriesError> {
    let d_abs = spec.discriminant().unsigned_abs();
    if num_integer::gcd(level, d_abs) != 1 {
        return Err(QSeriesError::NoSimpleAnswer {
            n: level,
            d: spec.discriminant(),
        });
    }
    Ok(level * d_abs * d_abs)
}

/// One prime's verdict against the weight-4 coefficient bound `|a_p| <= 2 p^{3/2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeligneRow {
    pub p: u64,
    pub coefficient: BigInt,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeligneReport {
    pub rows: Vec<DeligneRow>,
}

impl DeligneReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn violations(&self) -> impl Iterator<Item = &DeligneRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// `a^2 <= 4 p^3`, the exact integer form of `|a| <= 2 p^{3/2}`.
pub fn satisfies_weight4_bound(coefficient: &BigInt, p: u64) -> bool {
    let bound = BigInt::from(4) * BigInt::from(p).pow(3);
    coefficient * coefficient <= bound
}

/// Flag every listed prime whose coefficient violates the weight-4 bound.
pub fn deligne_check(f: &QExpansion, primes: &[u64]) -> Result<DeligneReport, QSeriesError> {
    let mut rows = Vec::with_capacity(primes.len());
    for &p in primes {
        let c = f.coefficient(p as usize)?.clone();
        let pass = satisfies_weight4_bound(&c, p);
        rows.push(DeligneRow {
            p,
            coefficient: c,
            pass,
        });
    }
    Ok(DeligneReport { rows })
}

/// The eta description of a cataloged newform, when the sources give one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtaData {
    Quotient(EtaQuotient),
    NotEtaGiven,
}

/// A weight-4 newform known to the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewformRecord {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub eta: EtaData,
    /// Catalog id of the variety family this form is attached to.
    pub family: Option<String>,
}

impl NewformRecord {
    pub fn expansion(&self, precision: usize) -> Result<QExpansion, QSeriesError> {
        match &self.eta {
            EtaData::Quotient(eq) => expand_eta_quotient(eq, precision),
            EtaData::NotEtaGiven => Err(QSeriesError::NoCoefficientData(self.label.clone())),
        }
    }
}

/// Coefficient data for one form, dense (from an eta expansion) or sparse
/// (from an external coefficient file).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormData {
    pub label: String,
    pub level: u64,
    pub coeffs: BTreeMap<usize, BigInt>,
    /// Raw values quoted by an external source without normalization; kept
    /// separate so they are never mistaken for newform coefficients.
    pub claimed_raw: BTreeMap<usize, BigInt>,
}

impl FormData {
    pub fn from_expansion(label: &str, level: u64, f: &QExpansion) -> Self {
        let coeffs = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (i + 1, c.clone()))
            .collect();
        FormData {
            label: label.to_string(),
            level,
            coeffs,
            claimed_raw: BTreeMap::new(),
        }
    }

    pub fn from_record(record: &NewformRecord, precision: usize) -> Result<Self, QSeriesError> {
        Ok(Self::from_expansion(
            &record.label,
            record.level,
            &record.expansion(precision)?,
        ))
    }

    /// Parse the plain-text coefficient file format:
    ///
    /// ```text
    /// label <text>
    /// level <N>
    /// weight <k>
    /// coeff <n> <integer>
    /// claimed-raw <n> <integer>
    /// ```
    pub fn parse(text: &str) -> Result<Self, QSeriesError> {
        let mut label = None;
        let mut level = None;
        let mut coeffs = BTreeMap::new();
        let mut claimed_raw = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let key = it.next().unwrap();
            let err = |msg: &str| {
                QSeriesError::CoefficientFile(format!("line {}: {}", lineno + 1, msg))
            };
            match key {
                "label" => label = Some(it.next().ok_or_else(|| err("missing label"))?.to_string()),
                "level" => {
                    level = Some(
                        it.next()
                            .and_then(|s| s.parse::<u64>().ok())
                            .ok_or_else(|| err("bad level"))?,
                    )
                }
                "weight" => {
                    it.next().ok_or_else(|| err("missing weight"))?;
                }
                "coeff" | "claimed-raw" => {
                    let n: usize = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err("bad index"))?;
                    let v: BigInt = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err("bad integer"))?;
                    if n == 0 {
                        return Err(err("coefficient indices start at 1"));
                    }
                    if key == "coeff" {
                        coeffs.insert(n, v);
                    } else {
                        claimed_raw.insert(n, v);
                    }
                }
                other => return Err(err(&format!("unknown key `{other}`"))),
            }
        }
        Ok(FormData {
            label: label.ok_or_else(|| QSeriesError::CoefficientFile("missing label".into()))?,
            level: level.ok_or_else(|| QSeriesError::CoefficientFile("missing level".into()))?,
            coeffs,
            claimed_raw,
        })
    }

    pub fn load(path: &Path) -> Result<Self, QSeriesError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QSeriesError::CoefficientFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Per-candidate verdict of the twist-minimality comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistComparison {
    /// Some good prime has `|c_p|` differing from the reference, which rules
    /// out any quadratic-twist relation.
    Excluded { witness_p: u64, reference: BigInt, candidate: BigInt },
    CannotExclude { primes_tested: Vec<u64> },
    NoCommonData,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityRow {
    pub candidate: String,
    pub candidate_level: u64,
    pub comparison: TwistComparison,
}

/// A raw quoted value that cannot be a normalized newform coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawValueFlag {
    pub index: usize,
    pub claimed: BigInt,
    pub normalized: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityReport {
    pub reference: String,
    pub reference_level: u64,
    pub rows: Vec<MinimalityRow>,
    pub raw_value_flags: Vec<RawValueFlag>,
}

fn primes_up_to(n: usize) -> Vec<u64> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for q in 2..=n {
        if sieve[q] {
            out.push(q as u64);
            let mut k = q * q;
            while k <= n {
                sieve[k] = false;
                k += q;
            }
        }
    }
    out
}

/// Compare `|c_p|` of the reference form against each candidate at every prime
/// good for both levels where both sides have data. Any absolute-value
/// mismatch certifies that the candidate is not a quadratic twist of the
/// reference. Raw quoted values violating the weight-4 bound are flagged.
pub fn twist_minimality_report(
    reference: &FormData,
    candidates: &[FormData],
    pmax: usize,
) -> Result<MinimalityReport, QSeriesError> {
    if candidates.is_empty() {
        return Err(QSeriesError::NoCandidates);
    }
    let primes = primes_up_to(pmax);
    let mut rows = Vec::new();
    for cand in candidates {
        let mut comparison = TwistComparison::NoCommonData;
        let mut tested = Vec::new();
        for &p in &primes {
            if reference.level % p == 0 || cand.level % p == 0 {
                continue;
            }
            let (Some(rc), Some(cc)) = (
                reference.coeffs.get(&(p as usize)),
                cand.coeffs.get(&(p as usize)),
            ) else {
                continue;
            };
            if rc.abs() != cc.abs() {
                comparison = TwistComparison::Excluded {
                    witness_p: p,
                    reference: rc.clone(),
                    candidate: cc.clone(),
                };
                break;
            }
            tested.push(p);
        }
        if matches!(comparison, TwistComparison::NoCommonData) && !tested.is_empty() {
            comparison = TwistComparison::CannotExclude {
                primes_tested: tested,
            };
        }
        rows.push(MinimalityRow {
            candidate: cand.label.clone(),
            candidate_level: cand.level,
            comparison,
        });
    }
    let raw_value_flags = reference
        .claimed_raw
        .iter()
        .filter(|(&n, v)| {
            // only prime indices have a Deligne bound to test against
            n >= 2 && primes_up_to(n).contains(&(n as u64)) && !satisfies_weight4_bound(v, n as u64)
        })
        .map(|(&n, v)| RawValueFlag {
            index: n,
            claimed: v.clone(),
            normalized: reference.coeffs.get(&n).cloned(),
        })
        .collect();
    Ok(MinimalityReport {
        reference: reference.label.clone(),
        reference_level: reference.level,
        rows,
        raw_value_flags,
    })
}
