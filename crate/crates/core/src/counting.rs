//! Exact point counting over `F_p`: projective complete intersections,
//! double covers via character sums, pencil fiber products, and Weierstrass
//! curves.
//!
//! Enumeration uses normalized representatives (first nonzero coordinate of
//! each factor = 1) indexed lexicographically, so the domain splits into
//! disjoint blocks handed to a worker pool. Workers keep private tallies that
//! combine by addition; counts are identical for any worker count.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use crate::charfield::{legendre_table, PrimeModulus};
use crate::error::CountError;
use crate::varieties::{
    Ambient, CatalogEntry, CountShape, MultiHomogPolynomial, PencilFiberProductSpec, VarietySpec,
};

/// Worker count and enumeration budget for one counting invocation.
#[derive(Debug, Clone, Copy)]
pub struct CountOptions {
    pub threads: usize,
    /// Refuse enumerations larger than `2^budget_log2` points.
    pub budget_log2: u32,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            threads: 1,
            budget_log2: 33,
        }
    }
}

impl CountOptions {
    pub fn with_threads(threads: usize) -> Self {
        CountOptions {
            threads,
            ..Default::default()
        }
    }
}

/// Result of one exact count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub variety: String,
    pub p: u64,
    pub d: Option<i64>,
    pub count: u64,
    /// Per-fiber point counts for pencil fiber products, in base order.
    pub fibers: Option<Vec<u64>>,
    pub points_enumerated: u64,
    pub elapsed: Duration,
}

/// `#P^dim(F_p)` as a u128 (safe for any machine-word p).
fn projective_size(p: u64, dim: usize) -> u128 {
    (0..=dim).map(|j| (p as u128).pow(j as u32)).sum()
}

/// Normalized-representative enumerator for a product of projective factors.
struct ProductShape {
    p: u64,
    nvars: usize,
    total: u64,
    /// Per factor: (first coordinate index, dim, leading-position offsets).
    factors: Vec<(usize, usize, Vec<u64>)>,
    /// suffix[i] = product of totals of factors i+1.. (for mixed-radix decode)
    suffix: Vec<u64>,
}

impl ProductShape {
    fn new(p: u64, dims: &[usize], budget_log2: u32) -> Result<Self, CountError> {
        let mut total_128: u128 = 1;
        for &d in dims {
            total_128 = total_128.saturating_mul(projective_size(p, d));
        }
        if total_128 > 1u128 << budget_log2 {
            return Err(CountError::BudgetExceeded {
                points: total_128,
                budget_log2,
            });
        }
        let mut factors = Vec::new();
        let mut base = 0usize;
        for &d in dims {
            // leading position j owns p^(d-j) representatives
            let mut offsets = Vec::with_capacity(d + 2);
            let mut acc = 0u64;
            for j in 0..=d {
                offsets.push(acc);
                acc += p.pow((d - j) as u32);
            }
            offsets.push(acc);
            factors.push((base, d, offsets));
            base += d + 1;
        }
        let mut suffix = vec![1u64; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            let next_total = *factors[i + 1].2.last().unwrap();
            suffix[i] = suffix[i + 1] * next_total;
        }
        Ok(ProductShape {
            p,
            nvars: base,
            total: total_128 as u64,
            factors,
            suffix,
        })
    }

    /// Write the coordinates of global representative `idx` into `out`.
    fn decode(&self, mut idx: u64, out: &mut [u64]) {
        for (i, (base, dim, offsets)) in self.factors.iter().enumerate() {
            let u = idx / self.suffix[i];
            idx %= self.suffix[i];
            // leading position: last j with offsets[j] <= u
            let mut j = 0;
            while offsets[j + 1] <= u {
                j += 1;
            }
            let mut rem = u - offsets[j];
            for k in 0..*dim + 1 {
                out[base + k] = 0;
            }
            out[base + j] = 1;
            for t in (j + 1..=*dim).rev() {
                out[base + t] = rem % self.p;
                rem /= self.p;
            }
        }
    }
}

/// Sum `eval(point)` over every normalized representative, splitting the index
/// space into fixed blocks claimed atomically by workers. The factory runs
/// once per worker so evaluators can own scratch space.
fn parallel_block_sum<G, F>(shape: &ProductShape, threads: usize, factory: F) -> Result<i64, CountError>
where
    G: FnMut(&[u64]) -> i64,
    F: Fn() -> G + Sync,
    G: Send,
{
    if threads == 0 {
        return Err(CountError::NoWorkers);
    }
    const BLOCK: u64 = 1 << 14;
    let cursor = AtomicU64::new(0);
    let total = shape.total;
    let sum = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for _ in 0..threads {
            let cursor = &cursor;
            let factory = &factory;
            handles.push(scope.spawn(move || {
                let mut eval = factory();
                let mut coords = vec![0u64; shape.nvars];
                let mut local = 0i64;
                loop {
                    let block = cursor.fetch_add(1, Ordering::Relaxed);
                    let start = block.saturating_mul(BLOCK);
                    if start >= total {
                        break;
                    }
                    let end = (start + BLOCK).min(total);
                    for idx in start..end {
                        shape.decode(idx, &mut coords);
                        local += eval(&coords);
                    }
                }
                local
            }));
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("counting worker panicked"))
            .sum::<i64>()
    });
    Ok(sum)
}

/// One equation compiled for fast repeated evaluation mod p.
struct CompiledEquation {
    /// (coefficient mod p, sparse list of (pow-table offset + exponent) slots)
    terms: Vec<(u64, Vec<usize>)>,
}

struct CompiledSystem {
    p: u64,
    /// pow-table offset of each variable
    offsets: Vec<usize>,
    max_deg: Vec<u16>,
    table_len: usize,
    equations: Vec<CompiledEquation>,
}

impl CompiledSystem {
    fn compile(equations: &[&MultiHomogPolynomial], nvars: usize, p: u64) -> Self {
        let mut max_deg = vec![0u16; nvars];
        for eq in equations {
            for (e, _) in eq.terms() {
                for (v, &d) in e.iter().enumerate() {
                    max_deg[v] = max_deg[v].max(d);
                }
            }
        }
        let mut offsets = vec![0usize; nvars];
        let mut len = 0usize;
        for v in 0..nvars {
            offsets[v] = len;
            len += max_deg[v] as usize + 1;
        }
        let compiled = equations
            .iter()
            .map(|eq| {
                let terms = eq
                    .terms()
                    .filter_map(|(e, c)| {
                        let cm = c.rem_euclid(p as i64) as u64;
                        if cm == 0 {
                            return None;
                        }
                        let slots: Vec<usize> = e
                            .iter()
                            .enumerate()
                            .filter(|&(_, &d)| d > 0)
                            .map(|(v, &d)| offsets[v] + d as usize)
                            .collect();
                        Some((cm, slots))
                    })
                    .collect();
                CompiledEquation { terms }
            })
            .collect();
        CompiledSystem {
            p,
            offsets,
            max_deg,
            table_len: len,
            equations: compiled,
        }
    }

    fn fill_pows(&self, coords: &[u64], pows: &mut [u64]) {
        for (v, &off) in self.offsets.iter().enumerate() {
            pows[off] = 1;
            let base = coords[v];
            for e in 1..=self.max_deg[v] as usize {
                pows[off + e] = pows[off + e - 1] * base % self.p;
            }
        }
    }

    fn equation_value(&self, eq: usize, pows: &[u64]) -> u64 {
        let mut acc = 0u64;
        for (c, slots) in &self.equations[eq].terms {
            let mut t = *c;
            for &s in slots {
                t = t * pows[s] % self.p;
            }
            acc = (acc + t) % self.p;
        }
        acc
    }

    fn vanishes(&self, pows: &[u64]) -> bool {
        (0..self.equations.len()).all(|i| self.equation_value(i, pows) == 0)
    }
}

fn straight_dims(ambient: &Ambient, id: &str) -> Result<Vec<usize>, CountError> {
    match ambient {
        Ambient::Projective(fs) if !fs.iter().any(|f| f.is_weighted()) => {
            Ok(fs.iter().map(|f| f.dim).collect())
        }
        _ => Err(CountError::WrongShape(id.to_string())),
    }
}

/// Exact number of common projective zeros of the system over `F_p`.
pub fn count_projective(
    variety: &VarietySpec,
    p: &PrimeModulus,
    opts: &CountOptions,
) -> Result<CountResult, CountError> {
    let start = Instant::now();
    let dims = straight_dims(&variety.ambient, &variety.id)?;
    let shape = ProductShape::new(p.get(), &dims, opts.budget_log2)?;
    let eqs: Vec<&MultiHomogPolynomial> = variety.equations.iter().collect();
    let sys = &CompiledSystem::compile(&eqs, shape.nvars, p.get());
    let total = parallel_block_sum(&shape, opts.threads, || {
        let mut pows = vec![0u64; sys.table_len];
        move |coords: &[u64]| {
            sys.fill_pows(coords, &mut pows);
            i64::from(sys.vanishes(&pows))
        }
    })?;
    Ok(CountResult {
        variety: variety.id.clone(),
        p: p.get(),
        d: None,
        count: total as u64,
        fibers: None,
        points_enumerated: shape.total,
        elapsed: start.elapsed(),
    })
}

/// Count `d y^2 = f(x)` fiberwise over `P^n`: each point contributes
/// `1 + chi_p(d f(x))` solutions in `y`, with `chi_p(0) = 0`. Only defined for
/// even-degree `f`, which makes the fiber size independent of the chosen
/// representative.
pub fn count_double_cover(
    branch: &MultiHomogPolynomial,
    d: i64,
    p: &PrimeModulus,
    opts: &CountOptions,
) -> Result<CountResult, CountError> {
    let start = Instant::now();
    if !p.is_odd() {
        return Err(CountError::OddPrimeRequired);
    }
    if p.reduce(d) == 0 {
        return Err(CountError::PDividesTwist { p: p.get(), d });
    }
    let degree = branch
        .multi_degree()
        .map(|d| d[0] as u32)
        .unwrap_or(0);
    if degree % 2 == 1 {
        return Err(CountError::OddBranchDegree(degree));
    }
    let dims = straight_dims(branch.ambient(), "double-cover branch")?;
    let shape = ProductShape::new(p.get(), &dims, opts.budget_log2)?;
    let sys = &CompiledSystem::compile(&[branch], shape.nvars, p.get());
    let chi = &legendre_table(p);
    let d_red = p.reduce(d);
    let pp = p.get();
    let total = parallel_block_sum(&shape, opts.threads, || {
        let mut pows = vec![0u64; sys.table_len];
        move |coords: &[u64]| {
            sys.fill_pows(coords, &mut pows);
            let v = sys.equation_value(0, &pows);
            1 + chi[(v * d_red % pp) as usize] as i64
        }
    })?;
    Ok(CountResult {
        variety: "double-cover".to_string(),
        p: p.get(),
        d: Some(d),
        count: total as u64,
        fibers: None,
        points_enumerated: shape.total,
        elapsed: start.elapsed(),
    })
}

/// `A(p) = sum over P^n of chi_p(f(x))` with `chi_p(0) = 0`: the part of a
/// double-cover count that flips with the twist class, satisfying
/// `count_double_cover(f, d, p) = #P^n(F_p) + chi_p(d) A(p)`.
pub fn character_sum(
    branch: &MultiHomogPolynomial,
    p: &PrimeModulus,
    opts: &CountOptions,
) -> Result<i64, CountError> {
    if !p.is_odd() {
        return Err(CountError::OddPrimeRequired);
    }
    let degree = branch.multi_degree().map(|d| d[0] as u32).unwrap_or(0);
    if degree % 2 == 1 {
        return Err(CountError::OddBranchDegree(degree));
    }
    let dims = straight_dims(branch.ambient(), "character-sum branch")?;
    let shape = ProductShape::new(p.get(), &dims, opts.budget_log2)?;
    let sys = &CompiledSystem::compile(&[branch], shape.nvars, p.get());
    let chi = &legendre_table(p);
    parallel_block_sum(&shape, opts.threads, || {
        let mut pows = vec![0u64; sys.table_len];
        move |coords: &[u64]| {
            sys.fill_pows(coords, &mut pows);
            chi[sys.equation_value(0, &pows) as usize] as i64
        }
    })
}

/// Raw fiber-product count of a cubic pencil: for each `(mu:lambda)` in
/// `P^1(F_p)` the plane-cubic fiber is counted exactly, and the returned count
/// is the sum of squared fiber counts (the resolved threefold differs by
/// correction terms tracked downstream).
pub fn count_pencil_fiber_product(
    spec: &PencilFiberProductSpec,
    p: &PrimeModulus,
    opts: &CountOptions,
) -> Result<CountResult, CountError> {
    let start = Instant::now();
    if opts.threads == 0 {
        return Err(CountError::NoWorkers);
    }
    let pp = p.get();
    let plane = projective_size(pp, 2);
    let fibers_total = pp as u128 + 1;
    let points = fibers_total * plane;
    if points > 1u128 << opts.budget_log2 {
        return Err(CountError::BudgetExceeded {
            points,
            budget_log2: opts.budget_log2,
        });
    }

    // enumerate P^1 reps in the same order as ProductShape: (1, t) then (0, 1)
    let mut fiber_params = Vec::with_capacity(pp as usize + 1);
    for t in 0..pp {
        fiber_params.push((1u64, t));
    }
    fiber_params.push((0, 1));

    let plane_shape = ProductShape::new(pp, &[2], opts.budget_log2)?;
    let cursor = AtomicU64::new(0);
    let n_fibers = fiber_params.len() as u64;
    let fiber_counts: Vec<(usize, u64)> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for _ in 0..opts.threads {
            let cursor = &cursor;
            let fiber_params = &fiber_params;
            let plane_shape = &plane_shape;
            let pencil = &spec.pencil;
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                let mut coords = vec![0u64; 3];
                loop {
                    let i = cursor.fetch_add(1, Ordering::Relaxed);
                    if i >= n_fibers {
                        break;
                    }
                    let (mu, la) = fiber_params[i as usize];
                    // specialize (mu, lambda), leaving a plane cubic
                    let mut fiber_terms: std::collections::BTreeMap<[u16; 3], u64> =
                        std::collections::BTreeMap::new();
                    for (e, c) in pencil.terms() {
                        let scale = PrimeModulus::new(pp).unwrap();
                        let w = scale.reduce(c) * scale.pow(mu, e[3] as u64) % pp
                            * scale.pow(la, e[4] as u64)
                            % pp;
                        if w == 0 {
                            continue;
                        }
                        let key = [e[0], e[1], e[2]];
                        let v = fiber_terms.entry(key).or_insert(0);
                        *v = (*v + w) % pp;
                    }
                    fiber_terms.retain(|_, v| *v != 0);
                    let mut n_fiber = 0u64;
                    for idx in 0..plane_shape.total {
                        plane_shape.decode(idx, &mut coords);
                        let mut acc = 0u64;
                        for (e, &c) in &fiber_terms {
                            let mut t = c;
                            for (v, &d) in e.iter().enumerate() {
                                for _ in 0..d {
                                    t = t * coords[v] % pp;
                                }
                            }
                            acc = (acc + t) % pp;
                        }
                        if acc == 0 {
                            n_fiber += 1;
                        }
                    }
                    out.push((i as usize, n_fiber));
                }
                out
            }));
        }
        let mut all: Vec<(usize, u64)> = handles
            .into_iter()
            .flat_map(|h| h.join().expect("pencil worker panicked"))
            .collect();
        all.sort_unstable();
        all
    });

    let fibers: Vec<u64> = fiber_counts.into_iter().map(|(_, n)| n).collect();
    let count: u64 = fibers.iter().map(|&n| n * n).sum();
    Ok(CountResult {
        variety: spec.id.clone(),
        p: pp,
        d: None,
        count,
        fibers: Some(fibers),
        points_enumerated: points as u64,
        elapsed: start.elapsed(),
    })
}

/// Count `d y^2 = x^3 + a x^2 + b x + c` over `F_p` including the point at
/// infinity, and return the Frobenius trace `a_p = p + 1 - N`.
pub fn count_elliptic(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    p: &PrimeModulus,
) -> Result<(CountResult, i64), CountError> {
    let start = Instant::now();
    if !p.is_odd() {
        return Err(CountError::OddPrimeRequired);
    }
    if p.reduce(d) == 0 {
        return Err(CountError::PDividesTwist { p: p.get(), d });
    }
    // disc(x^3 + ax^2 + bx + c) up to the factor 16
    let disc = 18i128 * a as i128 * b as i128 * c as i128 - 4 * (a as i128).pow(3) * c as i128
        + (a as i128).pow(2) * (b as i128).pow(2)
        - 4 * (b as i128).pow(3)
        - 27 * (c as i128).pow(2);
    if disc.rem_euclid(p.get() as i128) == 0 {
        return Err(CountError::BadReduction(p.get()));
    }
    let pp = p.get();
    let chi = legendre_table(p);
    let (ar, br, cr, dr) = (p.reduce(a), p.reduce(b), p.reduce(c), p.reduce(d));
    let mut n = 1u64; // point at infinity
    for x in 0..pp {
        let fx = ((x * x % pp * x + ar * (x * x % pp)) % pp + br * x % pp + cr) % pp;
        if fx == 0 {
            n += 1;
        } else {
            n += (1 + chi[(fx * dr % pp) as usize] as i64) as u64;
        }
    }
    let a_p = pp as i64 + 1 - n as i64;
    Ok((
        CountResult {
            variety: "elliptic".to_string(),
            p: pp,
            d: Some(d),
            count: n,
            fibers: None,
            points_enumerated: pp,
            elapsed: start.elapsed(),
        },
        a_p,
    ))
}

/// Dispatch a catalog entry (optionally twisted by `d`) to the right counter.
pub fn count_catalog_entry(
    entry: &CatalogEntry,
    d: i64,
    p: &PrimeModulus,
    opts: &CountOptions,
) -> Result<CountResult, CountError> {
    let mut result = match &entry.shape {
        CountShape::Projective => {
            let spec = entry
                .specialize(d)
                .map_err(|e| CountError::WrongShape(e.to_string()))?;
            count_projective(&spec, p, opts)?
        }
        CountShape::DoubleCover { .. } => {
            let branch = branch_on_base(entry)?;
            let mut r = count_double_cover(&branch, d, p, opts)?;
            r.variety = entry.variety.id.clone();
            r
        }
        CountShape::PencilFiberProduct => {
            let spec = entry
                .specialize(d)
                .map_err(|e| CountError::WrongShape(e.to_string()))?;
            let pencil = PencilFiberProductSpec::new(&entry.variety.id, spec.equations[0].clone())
                .map_err(|e| CountError::WrongShape(e.to_string()))?;
            count_pencil_fiber_product(&pencil, p, opts)?
        }
        CountShape::EllipticCurve { a, b, c } => count_elliptic(*a, *b, *c, d, p)?.0,
    };
    result.variety = entry.variety.id.clone();
    result.d = Some(d);
    Ok(result)
}

/// The double-cover branch polynomial restricted to the base `P^{n-1}`
/// (dropping the cover coordinate, which no branch term uses).
pub fn branch_on_base(entry: &CatalogEntry) -> Result<MultiHomogPolynomial, CountError> {
    let CountShape::DoubleCover { cover_coordinate } = entry.shape else {
        return Err(CountError::WrongShape(entry.variety.id.clone()));
    };
    let branch = entry
        .branch_polynomial()
        .map_err(|e| CountError::WrongShape(e.to_string()))?;
    let n = entry.variety.coordinates();
    let raw: Vec<(i64, Vec<u16>)> = branch
        .terms()
        .map(|(e, c)| {
            debug_assert_eq!(e[cover_coordinate], 0);
            let trimmed: Vec<u16> = e
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != cover_coordinate)
                .map(|(_, &x)| x)
                .collect();
            (c, trimmed)
        })
        .collect();
    MultiHomogPolynomial::new(Ambient::projective(n - 2), &raw)
        .map_err(|e| CountError::WrongShape(e.to_string()))
}
