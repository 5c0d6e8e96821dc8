//! Inverse Ackermann hierarchy, the inverse Ackermann function and the
//! `R_s(d)`, `D_s(d)` recurrence hierarchies, with exact big-integer values.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

thread_local! {
    static ALPHA_MEMO: RefCell<HashMap<(u32, u64), u64>> = RefCell::new(HashMap::new());
}

fn check_alpha_domain(d: u32, m: u64) -> Result<()> {
    if d < 1 || m < 1 {
        return Err(Error::domain(format!("alpha_d needs d >= 1 and m >= 1 (got d={d}, m={m})")));
    }
    Ok(())
}

/// `α_d(m)`: `α_1(m) = ⌈m/2⌉`, `α_d(1) = 0` for `d ≥ 2`, and
/// `α_d(m) = 1 + α_d(α_{d-1}(m))` otherwise. Memoized per thread.
pub fn alpha_d(d: u32, m: u64) -> Result<u64> {
    check_alpha_domain(d, m)?;
    Ok(alpha_memo(d, m))
}

fn alpha_memo(d: u32, m: u64) -> u64 {
    if d == 1 {
        return m.div_ceil(2);
    }
    if m == 1 {
        return 0;
    }
    if let Some(v) = ALPHA_MEMO.with(|t| t.borrow().get(&(d, m)).copied()) {
        return v;
    }
    let v = 1 + alpha_memo(d, alpha_memo(d - 1, m));
    ALPHA_MEMO.with(|t| t.borrow_mut().insert((d, m), v));
    v
}

/// Unmemoized unrolling of the same recurrence, used as a cross-check.
pub fn alpha_d_direct(d: u32, m: u64) -> Result<u64> {
    check_alpha_domain(d, m)?;
    fn go(d: u32, mut m: u64) -> u64 {
        if d == 1 {
            return m.div_ceil(2);
        }
        let mut steps = 0;
        while m > 1 {
            m = go(d - 1, m);
            steps += 1;
        }
        steps
    }
    Ok(go(d, m))
}

/// `α(m) = min{k : α_k(m) ≤ 3}`.
pub fn inv_ackermann(m: u64) -> Result<u32> {
    if m < 1 {
        return Err(Error::domain("inverse Ackermann needs m >= 1"));
    }
    let mut k = 1;
    while alpha_memo(k, m) > 3 {
        k += 1;
    }
    Ok(k)
}

/// Memo tables for the `R` and `D` hierarchies.
#[derive(Default)]
pub struct Recurrences {
    r: HashMap<(u32, u32), BigInt>,
    d: HashMap<(u32, u32), BigInt>,
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

impl Recurrences {
    pub fn new() -> Self {
        Self::default()
    }

    /// `R_s(d)` for `s ≥ 2`, `d ≥ 2`.
    pub fn r(&mut self, s: u32, d: u32) -> Result<BigUint> {
        if s < 2 || d < 2 {
            return Err(Error::domain(format!("R_s(d) needs s >= 2 and d >= 2 (got s={s}, d={d})")));
        }
        to_natural(self.r_int(s, d))
    }

    /// `D_s(d)` for `s ≥ 1`, `d ≥ 2`.
    pub fn d(&mut self, s: u32, d: u32) -> Result<BigUint> {
        if s < 1 || d < 2 {
            return Err(Error::domain(format!("D_s(d) needs s >= 1 and d >= 2 (got s={s}, d={d})")));
        }
        to_natural(self.d_int(s, d))
    }

    fn r_int(&mut self, s: u32, d: u32) -> BigInt {
        match (s, d) {
            (2, _) => return BigInt::from(2),
            (3, _) => return BigInt::from(3),
            (4, _) => return BigInt::from(2 * d as u64 + 1),
            (_, 2) => return pow2(s - 2) + 1,
            _ => {}
        }
        if let Some(v) = self.r.get(&(s, d)) {
            return v.clone();
        }
        let one = BigInt::one();
        let v: BigInt = 2 * (self.r_int(s - 1, d) - &one)
            + (self.r_int(s - 2, d) - &one) * (self.r_int(s, d - 1) - 3)
            + &one;
        self.r.insert((s, d), v.clone());
        v
    }

    fn d_int(&mut self, s: u32, d: u32) -> BigInt {
        match (s, d) {
            (1, _) => return BigInt::zero(),
            (2, _) => return BigInt::from(2),
            (_, 2) => return pow2(s - 1) + pow2(s - 2) - 1,
            _ => {}
        }
        if let Some(v) = self.d.get(&(s, d)) {
            return v.clone();
        }
        let r_prev = self.r_int(s, d - 1);
        let v: BigInt = 2 * self.d_int(s - 1, d)
            + (self.d_int(s - 2, d) + 1) * (&r_prev - 3)
            + self.d_int(s, d - 1)
            - r_prev
            + 1;
        self.d.insert((s, d), v.clone());
        v
    }
}

fn to_natural(v: BigInt) -> Result<BigUint> {
    if v.is_negative() {
        return Err(Error::PostconditionViolated(format!("recurrence produced negative value {v}")));
    }
    Ok(v.to_biguint().expect("nonnegative"))
}

pub fn recurrence_r(s: u32, d: u32) -> Result<BigUint> {
    Recurrences::new().r(s, d)
}

pub fn recurrence_d(s: u32, d: u32) -> Result<BigUint> {
    Recurrences::new().d(s, d)
}

/// Stand-in for the unspecified per-`s` constant of the fat-formation bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyParams {
    #[serde(serialize_with = "serialize_ratio")]
    pub c_prime: BigRational,
    pub notes: String,
}

pub(crate) fn serialize_ratio<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl HierarchyParams {
    pub fn new(c_prime: BigRational, notes: impl Into<String>) -> Result<Self> {
        if !c_prime.is_positive() {
            return Err(Error::invalid("hierarchy params", "cPrime must be positive"));
        }
        Ok(HierarchyParams {
            c_prime,
            notes: notes.into(),
        })
    }
}

impl Default for HierarchyParams {
    fn default() -> Self {
        HierarchyParams {
            c_prime: BigRational::one(),
            notes: "cPrime = 1 is a configured placeholder, not a derived constant".into(),
        }
    }
}

/// `β_s(m) = D_s(α(m))`, with the hierarchy index raised to 2 when `α(m) = 1`
/// since `D_s` starts at `d = 2`.
pub fn beta(s: u32, m: u64) -> Result<BigUint> {
    if s < 1 {
        return Err(Error::domain("beta needs s >= 1"));
    }
    let d = inv_ackermann(m)?.max(2);
    recurrence_d(s, d)
}

/// `γ_k(n) = 4 (β_{k+1}(n) + 2) c' (k+1)!`.
pub fn gamma(k: u32, n: u64, params: &HierarchyParams) -> Result<BigRational> {
    if k < 1 {
        return Err(Error::domain("gamma needs k >= 1"));
    }
    let b = BigInt::from(beta(k + 1, n)?);
    let fact: BigInt = (1..=k as u64 + 1).map(BigInt::from).product();
    let base = BigInt::from(4) * (b + 2) * fact;
    Ok(BigRational::from_integer(base) * &params.c_prime)
}

/// `μ_s(k) = 2^{C(k, (s-2)/2)}` for even `s ≥ 4`.
pub fn mu(s: u32, k: u32) -> Result<BigUint> {
    if s < 4 || s % 2 == 1 {
        return Err(Error::domain(format!("mu needs an even s >= 4 (got {s})")));
    }
    let e = binomial(k as u64, ((s - 2) / 2) as u64);
    let e = u32::try_from(e).map_err(|_| Error::CapExceeded(format!("exponent {e} too large")))?;
    Ok(BigUint::one() << e)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
