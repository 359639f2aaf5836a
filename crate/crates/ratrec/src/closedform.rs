//! Closed-form evaluation of single solution terms.
//!
//! The solution splits into four interleaved subsequences, indexed 4n-3,
//! 4n-2, 4n-1, and 4n. Terms at 4n-3 and 4n-1 depend on the seeds only
//! through the product b*d; terms at 4n-2 and 4n only through a*c. Three
//! equivalent formulas are implemented:
//!
//! * [`theorem1_term`]: products of the factors D_p = A^(2p+1) + B*u*v*S_2p
//!   and N_p = A^(2p+2) + B*u*v*S_(2p+1), where S_k = sum of A^i * alpha^(k-i)
//!   and u*v is the governing seed product. Valid for every parameter choice.
//! * [`corollary1_term`]: the same products telescoped through
//!   P_p = A^p * (A - alpha + B*u*v) - B*u*v * alpha^p, one factor per index.
//!   Requires A != alpha.
//! * [`corollary2_term`]: the A = alpha collapse, where every factor becomes
//!   a linear function of p and whole products reduce to rising factorials of
//!   e = A / (B*u*v).
//!
//! [`special_case_elsayed`] is the classical alpha = A = B = 1 formula kept
//! as an extra cross-check. All evaluators are exact: a vanishing
//! denominator factor is reported as [`ClosedFormError::ForbiddenInput`],
//! never as a float artifact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    rising_factorial, Mode, NumericsError, Rational, Scalar, DEFAULT_BIT_LIMIT,
};
use crate::recurrence::{InitialConditions, Parameters};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("closed-form evaluation requires exact-mode inputs")]
    ExactModeRequired,
    #[error("index {0} precedes the first seed")]
    IndexOutOfRange(i64),
    #[error("a denominator factor vanishes: the term is undefined for these inputs")]
    ForbiddenInput,
    #[error("this form requires A != alpha")]
    RequiresANeqAlpha,
    #[error("this form requires A = alpha")]
    RequiresAEqAlpha,
    #[error("this form requires alpha = A = B = 1")]
    RequiresUnitParameters,
}

/// Which of the two seed products governs a subsequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSelector {
    /// b*d, governing indices 4n-3 and 4n-1.
    Bd,
    /// a*c, governing indices 4n-2 and 4n.
    Ac,
}

impl std::fmt::Display for PairSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PairSelector::Bd => write!(f, "bd"),
            PairSelector::Ac => write!(f, "ac"),
        }
    }
}

/// One of the four interleaved subsequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsequenceId {
    /// Indices 4n-3 (1, 5, 9, ...), seeded by d.
    M3,
    /// Indices 4n-2 (2, 6, 10, ...), seeded by c.
    M2,
    /// Indices 4n-1 (3, 7, 11, ...), seeded by b.
    M1,
    /// Indices 4n (4, 8, 12, ...), seeded by a.
    M0,
}

impl SubsequenceId {
    /// Splits an index m >= 1 into its subsequence and the n >= 1 with
    /// m = 4n-3, 4n-2, 4n-1, or 4n.
    pub fn of_index(m: i64) -> Option<(SubsequenceId, u64)> {
        if m < 1 {
            return None;
        }
        let m = m as u64;
        Some(match m % 4 {
            1 => (SubsequenceId::M3, (m + 3) / 4),
            2 => (SubsequenceId::M2, (m + 2) / 4),
            3 => (SubsequenceId::M1, (m + 1) / 4),
            _ => (SubsequenceId::M0, m / 4),
        })
    }

    /// The index of this subsequence's n-th term, n >= 1.
    pub fn index(&self, n: u64) -> i64 {
        let n = n as i64;
        match self {
            SubsequenceId::M3 => 4 * n - 3,
            SubsequenceId::M2 => 4 * n - 2,
            SubsequenceId::M1 => 4 * n - 1,
            SubsequenceId::M0 => 4 * n,
        }
    }

    pub fn pair(&self) -> PairSelector {
        match self {
            SubsequenceId::M3 | SubsequenceId::M1 => PairSelector::Bd,
            SubsequenceId::M2 | SubsequenceId::M0 => PairSelector::Ac,
        }
    }
}

impl std::fmt::Display for SubsequenceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubsequenceId::M3 => write!(f, "x_(4n-3)"),
            SubsequenceId::M2 => write!(f, "x_(4n-2)"),
            SubsequenceId::M1 => write!(f, "x_(4n-1)"),
            SubsequenceId::M0 => write!(f, "x_(4n)"),
        }
    }
}

/// Which formula produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormUsed {
    InitialCondition,
    Theorem1,
    Corollary1,
    Corollary2,
    Elsayed,
}

impl std::fmt::Display for FormUsed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormUsed::InitialCondition => write!(f, "initial-condition"),
            FormUsed::Theorem1 => write!(f, "theorem1"),
            FormUsed::Corollary1 => write!(f, "corollary1"),
            FormUsed::Corollary2 => write!(f, "corollary2"),
            FormUsed::Elsayed => write!(f, "elsayed"),
        }
    }
}

struct ExactInputs {
    alpha: Rational,
    cap_a: Rational,
    cap_b: Rational,
    d: Rational,
    c: Rational,
    b: Rational,
    a: Rational,
}

impl ExactInputs {
    fn take(params: &Parameters, init: &InitialConditions) -> Result<Self, ClosedFormError> {
        if params.mode() != Mode::Exact || init.mode() != Mode::Exact {
            return Err(ClosedFormError::ExactModeRequired);
        }
        let get = |s: &Scalar| s.as_exact().expect("exact mode").clone();
        Ok(ExactInputs {
            alpha: get(params.alpha()),
            cap_a: get(params.cap_a()),
            cap_b: get(params.cap_b()),
            d: get(init.d()),
            c: get(init.c()),
            b: get(init.b()),
            a: get(init.a()),
        })
    }

    /// (u*v, leading seed) for a subsequence: M3 -> (bd, d), M2 -> (ac, c),
    /// M1 -> (bd, b), M0 -> (ac, a).
    fn pair_data(&self, id: SubsequenceId) -> (Rational, &Rational) {
        match id {
            SubsequenceId::M3 => (&self.b * &self.d, &self.d),
            SubsequenceId::M2 => (&self.a * &self.c, &self.c),
            SubsequenceId::M1 => (&self.b * &self.d, &self.b),
            SubsequenceId::M0 => (&self.a * &self.c, &self.a),
        }
    }

    fn pair_product(&self, pair: PairSelector) -> Rational {
        match pair {
            PairSelector::Bd => &self.b * &self.d,
            PairSelector::Ac => &self.a * &self.c,
        }
    }
}

/// Streams the factor pairs (D_p, N_p) of the always-valid product form.
///
/// D_p = A^(2p+1) + B*u*v*S_2p and N_p = A^(2p+2) + B*u*v*S_(2p+1), where
/// S_k = A^k + A^(k-1)*alpha + ... + alpha^k. The power sums are advanced
/// incrementally via S_(k+1) = A*S_k + alpha^(k+1).
struct FactorStream {
    alpha: Rational,
    cap_a: Rational,
    buv: Rational,
    power_sum: Rational,
    a_pow: Rational,
    alpha_pow: Rational,
}

impl FactorStream {
    fn new(alpha: &Rational, cap_a: &Rational, cap_b: &Rational, uv: &Rational) -> Self {
        FactorStream {
            alpha: alpha.clone(),
            cap_a: cap_a.clone(),
            buv: cap_b * uv,
            power_sum: Rational::one(),
            a_pow: cap_a.clone(),
            alpha_pow: alpha.clone(),
        }
    }

    fn advance_sum(&mut self) {
        self.power_sum = &(&self.cap_a * &self.power_sum) + &self.alpha_pow;
        self.a_pow = &self.a_pow * &self.cap_a;
        self.alpha_pow = &self.alpha_pow * &self.alpha;
    }

    /// The next (D_p, N_p), for p = 0, 1, 2, ... in order.
    fn next_pair(&mut self) -> (Rational, Rational) {
        let d_p = &self.a_pow + &(&self.buv * &self.power_sum);
        self.advance_sum();
        let n_p = &self.a_pow + &(&self.buv * &self.power_sum);
        self.advance_sum();
        (d_p, n_p)
    }
}

/// Streams the telescoped factors (P_(2p+1), P_(2p+2)) for A != alpha.
struct TelescopedStream {
    alpha: Rational,
    cap_a: Rational,
    buv: Rational,
    head: Rational,
    a_pow: Rational,
    alpha_pow: Rational,
}

impl TelescopedStream {
    fn new(alpha: &Rational, cap_a: &Rational, cap_b: &Rational, uv: &Rational) -> Self {
        let buv = cap_b * uv;
        TelescopedStream {
            alpha: alpha.clone(),
            cap_a: cap_a.clone(),
            head: &(cap_a - alpha) + &buv,
            buv,
            a_pow: cap_a.clone(),
            alpha_pow: alpha.clone(),
        }
    }

    fn current(&self) -> Rational {
        &(&self.a_pow * &self.head) - &(&self.buv * &self.alpha_pow)
    }

    fn bump(&mut self) {
        self.a_pow = &self.a_pow * &self.cap_a;
        self.alpha_pow = &self.alpha_pow * &self.alpha;
    }

    /// The next (P_(2p+1), P_(2p+2)), for p = 0, 1, 2, ... in order.
    fn next_pair(&mut self) -> (Rational, Rational) {
        let odd = self.current();
        self.bump();
        let even = self.current();
        self.bump();
        (odd, even)
    }
}

/// P_p = A^p * (A - alpha + B*u*v) - B*u*v * alpha^p.
///
/// For A != alpha this is (A - alpha) times the p-th product-form factor,
/// counting D and N factors in one sequence: P_(2p+1) = (A - alpha) * D_p
/// and P_(2p+2) = (A - alpha) * N_p. P_0 = A - alpha.
pub fn p_poly(
    p: u64,
    params: &Parameters,
    u: &Scalar,
    v: &Scalar,
) -> Result<Scalar, ClosedFormError> {
    let buv = params.cap_b().mul(&u.mul(v)?)?;
    let head = params.cap_a().sub(params.alpha())?.add(&buv)?;
    let lhs = params.cap_a().int_pow(p).mul(&head)?;
    let rhs = buv.mul(&params.alpha().int_pow(p))?;
    Ok(lhs.sub(&rhs)?)
}

fn split_index(m: i64) -> Result<(SubsequenceId, u64), ClosedFormError> {
    SubsequenceId::of_index(m).ok_or(ClosedFormError::IndexOutOfRange(m))
}

fn guarded_mul(acc: &Rational, factor: &Rational) -> Result<Rational, ClosedFormError> {
    let next = acc * factor;
    next.check_bits(DEFAULT_BIT_LIMIT)?;
    Ok(next)
}

fn finish_term(
    seed: &Rational,
    alpha: &Rational,
    n: u64,
    numerator: Rational,
    denominator: Rational,
) -> Result<Scalar, ClosedFormError> {
    if denominator.is_zero() {
        return Err(ClosedFormError::ForbiddenInput);
    }
    let scaled = &(seed * &alpha.pow_u64(n)) * &numerator;
    Ok(Scalar::Exact(
        scaled.checked_div(&denominator).expect("nonzero divisor"),
    ))
}

/// The m-th term (m >= 1) via the always-valid product form.
pub fn theorem1_term(
    params: &Parameters,
    init: &InitialConditions,
    m: i64,
) -> Result<Scalar, ClosedFormError> {
    let inputs = ExactInputs::take(params, init)?;
    let (id, n) = split_index(m)?;
    let (uv, seed) = inputs.pair_data(id);
    let mut stream = FactorStream::new(&inputs.alpha, &inputs.cap_a, &inputs.cap_b, &uv);
    let mut numerator = Rational::one();
    let mut denominator = Rational::one();
    for p in 0..n {
        let (d_p, n_p) = stream.next_pair();
        match id {
            SubsequenceId::M3 | SubsequenceId::M2 => {
                denominator = guarded_mul(&denominator, &d_p)?;
                if p + 1 < n {
                    numerator = guarded_mul(&numerator, &n_p)?;
                }
            }
            SubsequenceId::M1 | SubsequenceId::M0 => {
                numerator = guarded_mul(&numerator, &d_p)?;
                denominator = guarded_mul(&denominator, &n_p)?;
            }
        }
    }
    finish_term(seed, &inputs.alpha, n, numerator, denominator)
}

/// The m-th term (m >= 1) via the telescoped single-factor form; A != alpha.
pub fn corollary1_term(
    params: &Parameters,
    init: &InitialConditions,
    m: i64,
) -> Result<Scalar, ClosedFormError> {
    let inputs = ExactInputs::take(params, init)?;
    if inputs.cap_a == inputs.alpha {
        return Err(ClosedFormError::RequiresANeqAlpha);
    }
    let (id, n) = split_index(m)?;
    let (uv, seed) = inputs.pair_data(id);
    let mut stream = TelescopedStream::new(&inputs.alpha, &inputs.cap_a, &inputs.cap_b, &uv);
    let mut numerator = Rational::one();
    let mut denominator = Rational::one();
    for p in 0..n {
        let (odd, even) = stream.next_pair();
        match id {
            SubsequenceId::M3 | SubsequenceId::M2 => {
                denominator = guarded_mul(&denominator, &odd)?;
                if p + 1 < n {
                    numerator = guarded_mul(&numerator, &even)?;
                }
            }
            SubsequenceId::M1 | SubsequenceId::M0 => {
                numerator = guarded_mul(&numerator, &odd)?;
                denominator = guarded_mul(&denominator, &even)?;
            }
        }
    }
    if matches!(id, SubsequenceId::M3 | SubsequenceId::M2) {
        numerator = &numerator * &(&inputs.cap_a - &inputs.alpha);
    }
    finish_term(seed, &inputs.alpha, n, numerator, denominator)
}

/// The m-th term (m >= 1) for A = alpha, via rising factorials of
/// e = A / (B*u*v).
///
/// Poles of the collapsed form are exactly the forbidden inputs: for the
/// 4n-3 and 4n-2 subsequences these are negative odd integers e with
/// |e| <= 2n-1, for 4n-1 and 4n negative even integers with |e| <= 2n. A
/// negative integer e of the other parity inside the range zeroes the
/// numerator instead, and the term is exactly 0.
pub fn corollary2_term(
    params: &Parameters,
    init: &InitialConditions,
    m: i64,
) -> Result<Scalar, ClosedFormError> {
    let inputs = ExactInputs::take(params, init)?;
    if inputs.cap_a != inputs.alpha {
        return Err(ClosedFormError::RequiresAEqAlpha);
    }
    let (id, n) = split_index(m)?;

    if inputs.cap_a.is_zero() {
        // alpha = A = 0: the first four terms are 0 and every later step has
        // a zero denominator (B = 0 makes even the first step undefined).
        if inputs.cap_b.is_zero() || m > 4 {
            return Err(ClosedFormError::ForbiddenInput);
        }
        return Ok(Scalar::Exact(Rational::zero()));
    }
    if inputs.cap_b.is_zero() {
        // A = alpha with B = 0 reduces each step to x_{n+1} = x_{n-3}.
        let (_, seed) = inputs.pair_data(id);
        return Ok(Scalar::Exact(seed.clone()));
    }

    let (uv, _) = inputs.pair_data(id);
    let e = inputs
        .cap_a
        .checked_div(&(&inputs.cap_b * &uv))
        .expect("nonzero product of nonzero seeds");
    let half_shift = &(&e * &Rational::ratio(1, 2)) + &Rational::one();
    let two = Rational::from_integer(2);

    let pole = |max_abs: u64, want_even: bool| {
        e.is_negative_integer()
            && e.to_bigint()
                .map(|v| {
                    let mag = -v.clone();
                    let even = (v % 2u8) == num_bigint::BigInt::ZERO;
                    even == want_even && mag <= num_bigint::BigInt::from(max_abs)
                })
                .unwrap_or(false)
    };

    match id {
        SubsequenceId::M3 | SubsequenceId::M2 => {
            if pole(2 * n - 1, false) {
                return Err(ClosedFormError::ForbiddenInput);
            }
            let rising = rising_factorial(&half_shift, n - 1);
            if rising.is_zero() {
                return Ok(Scalar::Exact(Rational::zero()));
            }
            let lead = match id {
                SubsequenceId::M3 => &inputs.b,
                _ => &inputs.a,
            };
            let numerator = &(&inputs.cap_a * &two.pow_u64(2 * n - 2)) * &(&rising * &rising);
            let denominator =
                &(&inputs.cap_b * lead) * &rising_factorial(&(&e + &Rational::one()), 2 * n - 1);
            numerator
                .checked_div(&denominator)
                .map(Scalar::Exact)
                .map_err(|_| ClosedFormError::ForbiddenInput)
        }
        SubsequenceId::M1 | SubsequenceId::M0 => {
            if pole(2 * n, true) {
                return Err(ClosedFormError::ForbiddenInput);
            }
            let numerator_rising = rising_factorial(&(&e + &Rational::one()), 2 * n);
            if numerator_rising.is_zero() {
                return Ok(Scalar::Exact(Rational::zero()));
            }
            let lead = match id {
                SubsequenceId::M1 => &inputs.b,
                _ => &inputs.a,
            };
            let rising = rising_factorial(&half_shift, n);
            let numerator = lead * &numerator_rising;
            let denominator = &two.pow_u64(2 * n) * &(&rising * &rising);
            numerator
                .checked_div(&denominator)
                .map(Scalar::Exact)
                .map_err(|_| ClosedFormError::ForbiddenInput)
        }
    }
}

/// True when the parameters are the classical unit triple alpha = A = B = 1.
pub fn has_unit_parameters(params: &Parameters) -> bool {
    let one = Scalar::one(params.mode());
    params.alpha() == &one && params.cap_a() == &one && params.cap_b() == &one
}

/// The m-th term (m >= 1) of the alpha = A = B = 1 recurrence.
///
/// This is the classical formula for that parameter triple: products of
/// 1 + k*u*v over consecutive k. It must agree with [`theorem1_term`] at
/// unit parameters, and the tests hold it to that.
pub fn special_case_elsayed(
    init: &InitialConditions,
    m: i64,
) -> Result<Scalar, ClosedFormError> {
    if init.mode() != Mode::Exact {
        return Err(ClosedFormError::ExactModeRequired);
    }
    let get = |s: &Scalar| s.as_exact().expect("exact mode").clone();
    let (id, n) = split_index(m)?;
    let (uv, seed) = match id {
        SubsequenceId::M3 => (get(init.b()) * get(init.d()), get(init.d())),
        SubsequenceId::M2 => (get(init.a()) * get(init.c()), get(init.c())),
        SubsequenceId::M1 => (get(init.b()) * get(init.d()), get(init.b())),
        SubsequenceId::M0 => (get(init.a()) * get(init.c()), get(init.a())),
    };
    let term = |k: u64| &Rational::one() + &(&Rational::from_integer(k as i64) * &uv);
    let mut numerator = Rational::one();
    let mut denominator = Rational::one();
    for i in 0..n {
        let (num_k, den_k) = match id {
            SubsequenceId::M3 | SubsequenceId::M2 => (2 * i, 2 * i + 1),
            SubsequenceId::M1 | SubsequenceId::M0 => (2 * i + 1, 2 * i + 2),
        };
        numerator = guarded_mul(&numerator, &term(num_k))?;
        denominator = guarded_mul(&denominator, &term(den_k))?;
    }
    finish_term(&seed, &Rational::one(), 0, numerator, denominator)
}

/// The m-th solution value for any m >= -3, picking the applicable form.
///
/// Seeds come back as-is; later terms go through the telescoped form when
/// A != alpha and the rising-factorial collapse when A = alpha.
pub fn closed_form(
    params: &Parameters,
    init: &InitialConditions,
    m: i64,
) -> Result<Scalar, ClosedFormError> {
    closed_form_tagged(params, init, m).map(|(value, _)| value)
}

/// [`closed_form`] plus which formula produced the value.
pub fn closed_form_tagged(
    params: &Parameters,
    init: &InitialConditions,
    m: i64,
) -> Result<(Scalar, FormUsed), ClosedFormError> {
    if params.mode() != Mode::Exact || init.mode() != Mode::Exact {
        return Err(ClosedFormError::ExactModeRequired);
    }
    if (-3..=0).contains(&m) {
        return Ok((
            init.at(m).expect("seed index").clone(),
            FormUsed::InitialCondition,
        ));
    }
    if m < -3 {
        return Err(ClosedFormError::IndexOutOfRange(m));
    }
    if params.cap_a() == params.alpha() {
        corollary2_term(params, init, m).map(|v| (v, FormUsed::Corollary2))
    } else {
        corollary1_term(params, init, m).map(|v| (v, FormUsed::Corollary1))
    }
}

/// Every term from index 1 through `max_index` in one pass.
///
/// Runs the product-form factor streams cumulatively, so the whole scan
/// costs O(max_index) factor operations instead of one evaluation per term.
/// Stops with [`ClosedFormError::ForbiddenInput`] if a denominator factor
/// vanishes inside the range.
pub fn closed_form_scan(
    params: &Parameters,
    init: &InitialConditions,
    max_index: i64,
) -> Result<Vec<Scalar>, ClosedFormError> {
    let inputs = ExactInputs::take(params, init)?;
    if max_index < 1 {
        return Err(ClosedFormError::IndexOutOfRange(max_index));
    }
    let bd = inputs.pair_product(PairSelector::Bd);
    let ac = inputs.pair_product(PairSelector::Ac);
    let mut bd_stream = FactorStream::new(&inputs.alpha, &inputs.cap_a, &inputs.cap_b, &bd);
    let mut ac_stream = FactorStream::new(&inputs.alpha, &inputs.cap_a, &inputs.cap_b, &ac);

    // Running products up to the current block: d_prod over p <= n-1,
    // n_prod_prev over p <= n-2, n_prod over p <= n-1, per pair.
    struct PairProducts {
        d_prod: Rational,
        n_prod_prev: Rational,
        n_prod: Rational,
    }
    let fresh = || PairProducts {
        d_prod: Rational::one(),
        n_prod_prev: Rational::one(),
        n_prod: Rational::one(),
    };
    let (mut bd_prod, mut ac_prod) = (fresh(), fresh());
    let mut alpha_pow = Rational::one();
    let mut values = Vec::with_capacity(max_index as usize);

    let n_max = (max_index as u64 + 3) / 4;
    'outer: for _block in 1..=n_max {
        alpha_pow = &alpha_pow * &inputs.alpha;
        for (stream, prod) in [(&mut bd_stream, &mut bd_prod), (&mut ac_stream, &mut ac_prod)] {
            let (d_p, n_p) = stream.next_pair();
            prod.d_prod = guarded_mul(&prod.d_prod, &d_p)?;
            prod.n_prod_prev = prod.n_prod.clone();
            prod.n_prod = guarded_mul(&prod.n_prod, &n_p)?;
        }
        let quadruple = [
            (&inputs.d, &bd_prod.n_prod_prev, &bd_prod.d_prod),
            (&inputs.c, &ac_prod.n_prod_prev, &ac_prod.d_prod),
            (&inputs.b, &bd_prod.d_prod, &bd_prod.n_prod),
            (&inputs.a, &ac_prod.d_prod, &ac_prod.n_prod),
        ];
        for (seed, numerator, denominator) in quadruple {
            if values.len() as i64 >= max_index {
                break 'outer;
            }
            if denominator.is_zero() {
                return Err(ClosedFormError::ForbiddenInput);
            }
            let value = &(seed * &alpha_pow)
                * &numerator
                    .checked_div(denominator)
                    .expect("nonzero divisor");
            values.push(Scalar::Exact(value));
        }
    }
    Ok(values)
}

/// The smallest index m <= max_index whose product-form factor vanishes.
///
/// Factors are scanned in index order: index 4k+1 carries D_k of the bd
/// pair, 4k+2 carries D_k of the ac pair, 4k+3 carries N_k of bd, and
/// 4k+4 carries N_k of ac. A vanishing factor at index m makes the
/// iterated trajectory hit a zero step denominator at exactly that index,
/// so this scan predicts [`crate::recurrence::first_forbidden_index`]
/// without iterating.
pub fn first_vanishing_factor(
    params: &Parameters,
    init: &InitialConditions,
    max_index: i64,
) -> Result<Option<i64>, ClosedFormError> {
    let inputs = ExactInputs::take(params, init)?;
    if max_index < 1 {
        return Err(ClosedFormError::IndexOutOfRange(max_index));
    }
    let bd = inputs.pair_product(PairSelector::Bd);
    let ac = inputs.pair_product(PairSelector::Ac);
    let mut bd_stream = FactorStream::new(&inputs.alpha, &inputs.cap_a, &inputs.cap_b, &bd);
    let mut ac_stream = FactorStream::new(&inputs.alpha, &inputs.cap_a, &inputs.cap_b, &ac);
    let mut k = 0i64;
    loop {
        let base = 4 * k;
        if base + 1 > max_index {
            return Ok(None);
        }
        let (d_bd, n_bd) = bd_stream.next_pair();
        let (d_ac, n_ac) = ac_stream.next_pair();
        for (offset, factor) in [(1, d_bd), (2, d_ac), (3, n_bd), (4, n_ac)] {
            let index = base + offset;
            if index > max_index {
                return Ok(None);
            }
            if factor.is_zero() {
                return Ok(Some(index));
            }
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{simulate, TrajectoryStatus};

    fn params(alpha: (i64, i64), a: (i64, i64), b: (i64, i64)) -> Parameters {
        Parameters::new(
            Scalar::exact_ratio(alpha.0, alpha.1),
            Scalar::exact_ratio(a.0, a.1),
            Scalar::exact_ratio(b.0, b.1),
        )
        .unwrap()
    }

    fn init(d: (i64, i64), c: (i64, i64), b: (i64, i64), a: (i64, i64)) -> InitialConditions {
        InitialConditions::new(
            Scalar::exact_ratio(d.0, d.1),
            Scalar::exact_ratio(c.0, c.1),
            Scalar::exact_ratio(b.0, b.1),
            Scalar::exact_ratio(a.0, a.1),
        )
        .unwrap()
    }

    fn ones() -> InitialConditions {
        init((1, 1), (1, 1), (1, 1), (1, 1))
    }

    fn assert_matches_oracle(p: &Parameters, i: &InitialConditions, horizon: i64) {
        let traj = simulate(p, i, horizon as usize).unwrap();
        assert_eq!(traj.status(), TrajectoryStatus::Complete);
        for m in 1..=horizon {
            let term = theorem1_term(p, i, m).unwrap();
            assert_eq!(&term, traj.value_at(m).unwrap(), "m={m}");
        }
    }

    #[test]
    fn subsequence_split_and_rebuild() {
        for m in 1..200 {
            let (id, n) = SubsequenceId::of_index(m).unwrap();
            assert_eq!(id.index(n), m);
        }
        assert!(SubsequenceId::of_index(0).is_none());
        assert_eq!(
            SubsequenceId::of_index(1).unwrap(),
            (SubsequenceId::M3, 1)
        );
        assert_eq!(
            SubsequenceId::of_index(6).unwrap(),
            (SubsequenceId::M2, 2)
        );
    }

    #[test]
    fn product_form_frozen_values() {
        let p = params((1, 1), (2, 1), (1, 1));
        assert_eq!(
            theorem1_term(&p, &ones(), 1).unwrap(),
            Scalar::exact_ratio(1, 3)
        );
        let unit = params((1, 1), (1, 1), (1, 1));
        assert_eq!(
            theorem1_term(&unit, &ones(), 5).unwrap(),
            Scalar::exact_ratio(3, 8)
        );
    }

    #[test]
    fn product_form_matches_iteration_across_signs() {
        assert_matches_oracle(&params((1, 1), (2, 1), (1, 1)), &ones(), 40);
        assert_matches_oracle(
            &params((3, 2), (-2, 3), (5, 7)),
            &init((1, 2), (-2, 1), (4, 3), (-1, 5)),
            40,
        );
        // A = alpha exercises the collapse regime through the general form.
        assert_matches_oracle(
            &params((2, 3), (2, 3), (-1, 2)),
            &init((1, 1), (2, 1), (-1, 3), (1, 4)),
            40,
        );
        // alpha = 0 zeroes everything past the seeds.
        assert_matches_oracle(
            &params((0, 1), (3, 1), (1, 2)),
            &init((1, 1), (2, 1), (3, 1), (4, 1)),
            20,
        );
        // B = 0 gives plain geometric subsequences.
        assert_matches_oracle(
            &params((2, 1), (3, 1), (0, 1)),
            &init((1, 1), (2, 1), (3, 1), (4, 1)),
            20,
        );
    }

    #[test]
    fn telescoped_factor_values() {
        let p = params((1, 1), (2, 1), (1, 1));
        let one = Scalar::exact_int(1);
        // P_0 = A - alpha regardless of the pair.
        assert_eq!(p_poly(0, &p, &one, &one).unwrap(), Scalar::exact_int(1));
        assert_eq!(p_poly(1, &p, &one, &one).unwrap(), Scalar::exact_int(3));
        assert_eq!(p_poly(2, &p, &one, &one).unwrap(), Scalar::exact_int(7));
    }

    #[test]
    fn telescoped_form_frozen_value() {
        let p = params((1, 1), (2, 1), (1, 1));
        assert_eq!(
            corollary1_term(&p, &ones(), 3).unwrap(),
            Scalar::exact_ratio(3, 7)
        );
    }

    #[test]
    fn telescoped_form_agrees_with_product_form() {
        let cases = [
            (params((1, 1), (2, 1), (1, 1)), ones()),
            (
                params((3, 2), (-2, 3), (5, 7)),
                init((1, 2), (-2, 1), (4, 3), (-1, 5)),
            ),
            (
                params((-5, 2), (1, 3), (2, 1)),
                init((-1, 2), (1, 3), (2, 5), (-3, 1)),
            ),
        ];
        for (p, i) in &cases {
            for m in 1..=48 {
                assert_eq!(
                    corollary1_term(p, i, m).unwrap(),
                    theorem1_term(p, i, m).unwrap(),
                    "m={m}"
                );
            }
        }
    }

    #[test]
    fn telescoped_form_requires_distinct_parameters() {
        let p = params((2, 3), (2, 3), (1, 1));
        assert_eq!(
            corollary1_term(&p, &ones(), 1),
            Err(ClosedFormError::RequiresANeqAlpha)
        );
    }

    #[test]
    fn collapse_form_frozen_values() {
        let unit = params((1, 1), (1, 1), (1, 1));
        assert_eq!(
            corollary2_term(&unit, &ones(), 1).unwrap(),
            Scalar::exact_ratio(1, 2)
        );
        assert_eq!(
            corollary2_term(&unit, &ones(), 5).unwrap(),
            Scalar::exact_ratio(3, 8)
        );
        // Distinct seeds separate the prefactor seed from the pair product.
        let i = init((2, 1), (5, 1), (3, 1), (7, 1));
        assert_eq!(
            corollary2_term(&unit, &i, 1).unwrap(),
            Scalar::exact_ratio(2, 7)
        );
        assert_eq!(
            corollary2_term(&unit, &i, 3).unwrap(),
            Scalar::exact_ratio(21, 13)
        );
    }

    #[test]
    fn collapse_form_agrees_with_product_form() {
        let cases = [
            (params((1, 1), (1, 1), (1, 1)), ones()),
            (
                params((2, 3), (2, 3), (-1, 2)),
                init((1, 1), (2, 1), (-1, 3), (1, 4)),
            ),
            (
                params((-7, 5), (-7, 5), (3, 4)),
                init((2, 1), (-1, 3), (1, 6), (5, 2)),
            ),
        ];
        for (p, i) in &cases {
            for m in 1..=48 {
                assert_eq!(
                    corollary2_term(p, i, m).unwrap(),
                    theorem1_term(p, i, m).unwrap(),
                    "m={m}"
                );
            }
        }
    }

    #[test]
    fn collapse_form_requires_equal_parameters() {
        let p = params((1, 1), (2, 1), (1, 1));
        assert_eq!(
            corollary2_term(&p, &ones(), 1),
            Err(ClosedFormError::RequiresAEqAlpha)
        );
    }

    #[test]
    fn collapse_form_reports_poles_as_forbidden() {
        // e = A/(B*b*d) = -3: the second bd denominator factor vanishes, so
        // index 5 is forbidden; index 1 is still fine.
        let p = params((1, 1), (1, 1), (1, 1));
        let i = init((-1, 3), (1, 1), (1, 1), (1, 1));
        assert_eq!(
            corollary2_term(&p, &i, 1).unwrap(),
            Scalar::exact_ratio(-1, 2)
        );
        assert_eq!(
            corollary2_term(&p, &i, 5),
            Err(ClosedFormError::ForbiddenInput)
        );
        let traj = simulate(&p, &i, 10).unwrap();
        assert_eq!(traj.status(), TrajectoryStatus::ForbiddenAt { index: 5 });
    }

    #[test]
    fn collapse_form_even_pole_hits_other_subsequence() {
        // e = -2: index 3 forbidden (even pole), index 5 exactly zero
        // because the matching numerator factor vanishes first.
        let p = params((1, 1), (1, 1), (1, 1));
        let i = init((-1, 2), (1, 1), (1, 1), (1, 1));
        assert_eq!(
            corollary2_term(&p, &i, 3),
            Err(ClosedFormError::ForbiddenInput)
        );
        assert!(corollary2_term(&p, &i, 5).unwrap().is_zero());
        assert!(theorem1_term(&p, &i, 5).unwrap().is_zero());
        let traj = simulate(&p, &i, 10).unwrap();
        assert_eq!(traj.status(), TrajectoryStatus::ForbiddenAt { index: 3 });
    }

    #[test]
    fn collapse_form_handles_degenerate_parameters() {
        // A = alpha = 0 with B != 0: four zero terms, then forbidden.
        let p = params((0, 1), (0, 1), (1, 1));
        let i = ones();
        for m in 1..=4 {
            assert!(corollary2_term(&p, &i, m).unwrap().is_zero());
        }
        assert_eq!(
            corollary2_term(&p, &i, 5),
            Err(ClosedFormError::ForbiddenInput)
        );
        // A = alpha with B = 0: constant subsequences.
        let p = params((2, 3), (2, 3), (0, 1));
        let i = init((1, 1), (2, 1), (3, 1), (4, 1));
        for (m, expected) in [(1, 1), (2, 2), (3, 3), (4, 4), (5, 1), (8, 4)] {
            assert_eq!(
                corollary2_term(&p, &i, m).unwrap(),
                Scalar::exact_int(expected),
                "m={m}"
            );
        }
    }

    #[test]
    fn unit_parameter_form_frozen_values() {
        assert_eq!(
            special_case_elsayed(&ones(), 4).unwrap(),
            Scalar::exact_ratio(2, 3)
        );
        assert_eq!(
            special_case_elsayed(&ones(), 5).unwrap(),
            Scalar::exact_ratio(3, 8)
        );
    }

    #[test]
    fn unit_parameter_form_agrees_with_product_form() {
        let unit = params((1, 1), (1, 1), (1, 1));
        let cases = [
            ones(),
            init((2, 1), (5, 1), (3, 1), (7, 1)),
            init((1, 2), (-2, 7), (4, 3), (-1, 5)),
        ];
        for i in &cases {
            for m in 1..=48 {
                assert_eq!(
                    special_case_elsayed(i, m).unwrap(),
                    theorem1_term(&unit, i, m).unwrap(),
                    "m={m}"
                );
            }
        }
    }

    #[test]
    fn dispatcher_returns_seeds_and_picks_forms() {
        let p = params((1, 1), (2, 1), (1, 1));
        let i = init((1, 1), (2, 1), (3, 1), (4, 1));
        assert_eq!(
            closed_form_tagged(&p, &i, -3).unwrap(),
            (Scalar::exact_int(1), FormUsed::InitialCondition)
        );
        assert_eq!(
            closed_form_tagged(&p, &i, 0).unwrap(),
            (Scalar::exact_int(4), FormUsed::InitialCondition)
        );
        assert_eq!(
            closed_form_tagged(&p, &i, 1).unwrap().1,
            FormUsed::Corollary1
        );
        let eq = params((2, 3), (2, 3), (1, 1));
        assert_eq!(
            closed_form_tagged(&eq, &i, 1).unwrap().1,
            FormUsed::Corollary2
        );
        assert_eq!(
            closed_form(&p, &i, -4),
            Err(ClosedFormError::IndexOutOfRange(-4))
        );
    }

    #[test]
    fn scan_matches_per_term_evaluation() {
        let cases = [
            (params((1, 1), (2, 1), (1, 1)), ones()),
            (
                params((3, 2), (-2, 3), (5, 7)),
                init((1, 2), (-2, 1), (4, 3), (-1, 5)),
            ),
            (
                params((2, 3), (2, 3), (-1, 2)),
                init((1, 1), (2, 1), (-1, 3), (1, 4)),
            ),
        ];
        for (p, i) in &cases {
            let scan = closed_form_scan(p, i, 60).unwrap();
            assert_eq!(scan.len(), 60);
            for m in 1..=60i64 {
                assert_eq!(
                    scan[(m - 1) as usize],
                    theorem1_term(p, i, m).unwrap(),
                    "m={m}"
                );
            }
        }
    }

    #[test]
    fn vanishing_factor_scan_matches_iteration() {
        // A + B*b*d = 0 forbids the very first step.
        let p = params((1, 1), (1, 1), (1, 1));
        let i = init((-1, 1), (1, 1), (1, 1), (1, 1));
        assert_eq!(first_vanishing_factor(&p, &i, 50).unwrap(), Some(1));
        // e_bd = -3 forbids index 5.
        let i = init((-1, 3), (1, 1), (1, 1), (1, 1));
        assert_eq!(first_vanishing_factor(&p, &i, 50).unwrap(), Some(5));
        // e_bd = -2 forbids index 3.
        let i = init((-1, 2), (1, 1), (1, 1), (1, 1));
        assert_eq!(first_vanishing_factor(&p, &i, 50).unwrap(), Some(3));
        // A fully defined scenario has no vanishing factor.
        assert_eq!(first_vanishing_factor(&p, &ones(), 200).unwrap(), None);
    }

    #[test]
    fn exact_mode_is_required() {
        let p = params((1, 1), (2, 1), (1, 1)).to_float_mode();
        let i = ones().to_float_mode();
        assert_eq!(
            theorem1_term(&p, &i, 1),
            Err(ClosedFormError::ExactModeRequired)
        );
        assert_eq!(
            closed_form(&p, &i, 1),
            Err(ClosedFormError::ExactModeRequired)
        );
        assert_eq!(
            special_case_elsayed(&i, 1),
            Err(ClosedFormError::ExactModeRequired)
        );
    }

    #[test]
    fn out_of_range_indices_are_rejected() {
        let p = params((1, 1), (2, 1), (1, 1));
        assert_eq!(
            theorem1_term(&p, &ones(), 0),
            Err(ClosedFormError::IndexOutOfRange(0))
        );
        assert_eq!(
            corollary1_term(&p, &ones(), -1),
            Err(ClosedFormError::IndexOutOfRange(-1))
        );
    }
}
