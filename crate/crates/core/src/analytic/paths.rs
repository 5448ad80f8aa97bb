//! Counting descent paths on the two-color tree.
//!
//! `rb_path_count` gives the number of nodes at depth `n` (equivalently, of
//! root-to-depth-`n` paths). Two independent routes are kept on purpose: a
//! closed form evaluated exactly in the quadratic field Q[sqrt(D)] with
//! rational coefficients, and the plain two-type branching recurrence in
//! `u128`. They must agree; the validation suite checks them against each
//! other and against literal tree enumeration.
//!
//! `rb_path_class_count` refines the count by the household signature of the
//! path: `k` households visited on one node, the rest on two, with
//! `alpha`/`beta` recording whether the source/endpoint household is among
//! the twice-visited ones.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn validate_params(d_c: usize, d_h: usize) -> Result<()> {
    if d_c == 0 {
        return Err(Error::invalid("d_c must be at least 1"));
    }
    if d_c == 1 && d_h == 0 {
        return Err(Error::invalid("(d_c, d_h) = (1, 0) is degenerate"));
    }
    Ok(())
}

/// Nodes at depth `n`: two-type branching recurrence over (red, blue)
/// frontier counts. Errors on u128 overflow.
pub fn rb_path_count_recurrence(d_c: usize, d_h: usize, n: usize) -> Result<u128> {
    validate_params(d_c, d_h)?;
    if n == 0 {
        return Ok(1);
    }
    let (dc, dh) = (d_c as u128, d_h as u128);
    let overflow = || Error::invalid(format!("path count overflows u128 at depth {n}"));
    let (mut r, mut b) = (dc, dh);
    for _ in 1..n {
        let nr = (dc - 1)
            .checked_mul(r)
            .and_then(|x| dc.checked_mul(b).and_then(|y| x.checked_add(y)))
            .ok_or_else(overflow)?;
        let nb = dh.checked_mul(r).ok_or_else(overflow)?;
        r = nr;
        b = nb;
    }
    r.checked_add(b).ok_or_else(overflow)
}

/// Element of Q[sqrt(delta)]: `a + b sqrt(delta)` with rational a, b.
/// Plain polynomial arithmetic mod x^2 - delta; works whether or not delta
/// is a perfect square, as long as inverted elements have nonzero norm.
#[derive(Clone, Debug, PartialEq)]
struct Quad {
    a: BigRational,
    b: BigRational,
    delta: BigInt,
}

impl Quad {
    fn rational(a: BigRational, delta: &BigInt) -> Self {
        Quad {
            a,
            b: BigRational::zero(),
            delta: delta.clone(),
        }
    }

    fn from_int(v: i64, delta: &BigInt) -> Self {
        Quad::rational(BigRational::from_integer(BigInt::from(v)), delta)
    }

    fn root(delta: &BigInt) -> Self {
        Quad {
            a: BigRational::zero(),
            b: BigRational::one(),
            delta: delta.clone(),
        }
    }

    fn add(&self, o: &Quad) -> Quad {
        Quad {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            delta: self.delta.clone(),
        }
    }

    fn mul(&self, o: &Quad) -> Quad {
        let delta = BigRational::from_integer(self.delta.clone());
        Quad {
            a: &self.a * &o.a + (&self.b * &o.b) * &delta,
            b: &self.a * &o.b + &self.b * &o.a,
            delta: self.delta.clone(),
        }
    }

    fn inv(&self) -> Quad {
        let delta = BigRational::from_integer(self.delta.clone());
        let norm = &self.a * &self.a - (&self.b * &self.b) * &delta;
        assert!(!norm.is_zero(), "inverting a zero-norm element");
        Quad {
            a: &self.a / &norm,
            b: -(&self.b / &norm),
            delta: self.delta.clone(),
        }
    }

    fn pow(&self, n: usize) -> Quad {
        let mut acc = Quad::from_int(1, &self.delta);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Nodes at depth `n` by the closed form: with `D = sqrt((d_c-1)^2 + 4 d_c d_h)`
/// and growth roots `t_{1,2} = (d_c - 1 +- D) / 2`, the count is
/// `l_1 t_1^n + l_2 t_2^n` for explicit conjugate coefficients `l_{1,2}`.
/// Evaluated symbolically, so the result is exact for any depth.
pub fn rb_path_count(d_c: usize, d_h: usize, n: usize) -> Result<BigInt> {
    validate_params(d_c, d_h)?;
    if n == 0 {
        return Ok(BigInt::one());
    }
    if d_h == 0 {
        // Pure red tree: d_c choices at the root, d_c - 1 afterwards. The
        // conjugate form degenerates here (D = d_c - 1 makes one coefficient
        // 0/0), hence the direct product.
        let dc = BigInt::from(d_c);
        let step = &dc - BigInt::one();
        return Ok(&dc * step.pow((n - 1) as u32));
    }
    let dc = d_c as i64;
    let dh = d_h as i64;
    let delta = BigInt::from((dc - 1) * (dc - 1) + 4 * dc * dh);
    let int = |v: i64| Quad::from_int(v, &delta);
    let d = Quad::root(&delta);
    let half = int(2).inv();

    // t = (d_c - 1 + s D) / 2, l = (d_c + 1 + s D)(2 d_h + d_c - 1 + s D)
    //   / (2 (s D) (d_c - 1 + s D)) for sign s in {+1, -1}.
    let term = |sign: i64| -> Quad {
        let sd = int(sign).mul(&d);
        let t = int(dc - 1).add(&sd).mul(&half);
        let num = int(dc + 1).add(&sd).mul(&int(2 * dh + dc - 1).add(&sd));
        let den = int(2).mul(&sd).mul(&int(dc - 1).add(&sd));
        let lambda = num.mul(&den.inv());
        lambda.mul(&t.pow(n))
    };

    let total = term(1).add(&term(-1));
    // The two terms are conjugate, so the irrational parts cancel exactly
    // and the rational part is a nonnegative integer.
    assert!(total.b.is_zero(), "conjugate parts failed to cancel");
    assert!(total.a.denom().is_one(), "count came out non-integer");
    let count = total.a.numer().clone();
    assert!(!count.is_negative());
    Ok(count)
}

/// Float route for the same count; the recurrence is numerically stable and
/// cheap at any depth used in practice.
pub fn rb_path_count_f64(d_c: usize, d_h: usize, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (dc, dh) = (d_c as f64, d_h as f64);
    let (mut r, mut b) = (dc, dh);
    for _ in 1..n {
        let nr = (dc - 1.0) * r + dc * b;
        let nb = dh * r;
        r = nr;
        b = nb;
    }
    r + b
}

/// All class signatures `(k, alpha, beta)` that can be nonzero at depth `n`.
pub fn class_indices(n: usize) -> Vec<(usize, usize, usize)> {
    match n {
        0 => return vec![(1, 0, 0)],
        1 => return vec![(0, 1, 1), (2, 0, 0)],
        _ => {}
    }
    let mut out = Vec::new();
    for alpha in 0..=1usize {
        for beta in 0..=1usize {
            let lo = 2usize.saturating_sub(alpha + beta);
            let hi = match (n + 1).checked_sub(2 * (alpha + beta)) {
                Some(h) => h,
                None => continue,
            };
            for k in lo..=hi {
                if (n + k) % 2 == 1 {
                    out.push((k, alpha, beta));
                }
            }
        }
    }
    out
}

fn binom_u128(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Multiply before dividing keeps it exact; the running value is a
        // binomial coefficient times a smaller one, still integral.
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::invalid("binomial overflows u128"))?;
        acc /= (i + 1) as u128;
    }
    Ok(acc)
}

fn pow_u128(base: u128, exp: usize) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc
            .checked_mul(base)
            .ok_or_else(|| Error::invalid("power overflows u128"))?;
    }
    Ok(acc)
}

/// Number of depth-`n` paths whose household signature is `(k, alpha, beta)`:
/// `k` households contribute one node each, the remaining `(n - k + 1) / 2`
/// contribute two adjacent nodes, `alpha`/`beta` flag the source/endpoint
/// households as two-node ones. Zero whenever the signature is impossible
/// (wrong parity or out of range).
pub fn rb_path_class_count(
    d_c: usize,
    d_h: usize,
    n: usize,
    k: usize,
    alpha: usize,
    beta: usize,
) -> Result<u128> {
    validate_params(d_c, d_h)?;
    if alpha > 1 || beta > 1 {
        return Err(Error::invalid("alpha and beta are indicator flags"));
    }
    match n {
        0 => return Ok(u128::from((k, alpha, beta) == (1, 0, 0))),
        1 => {
            return Ok(match (k, alpha, beta) {
                // Blue child: one household holds both path nodes.
                (0, 1, 1) => d_h as u128,
                // Red child: two households of one node each.
                (2, 0, 0) => d_c as u128,
                _ => 0,
            });
        }
        _ => {}
    }
    let ab = alpha + beta;
    let in_range = (n + k) % 2 == 1 && k + ab >= 2 && k + 2 * ab <= n + 1;
    if !in_range {
        return Ok(0);
    }
    let doubles = (n + 1 - k) / 2;
    let choose = binom_u128((n + k - 3) / 2, k + ab - 2)?;
    let term = pow_u128(d_h as u128, doubles)?
        .checked_mul(pow_u128(d_c as u128, (n + 3 - k) / 2 - ab)?)
        .and_then(|x| x.checked_mul(pow_u128((d_c - 1) as u128, k + ab - 2).ok()?))
        .and_then(|x| x.checked_mul(choose))
        .ok_or_else(|| Error::invalid("class count overflows u128"))?;
    Ok(term)
}

/// Float version of [`rb_path_class_count`] for depths past u128 range.
pub fn rb_path_class_count_f64(
    d_c: usize,
    d_h: usize,
    n: usize,
    k: usize,
    alpha: usize,
    beta: usize,
) -> f64 {
    match n {
        0 => return f64::from(u8::from((k, alpha, beta) == (1, 0, 0))),
        1 => {
            return match (k, alpha, beta) {
                (0, 1, 1) => d_h as f64,
                (2, 0, 0) => d_c as f64,
                _ => 0.0,
            };
        }
        _ => {}
    }
    let ab = alpha + beta;
    if alpha > 1 || beta > 1 || (n + k).is_multiple_of(2) || k + ab < 2 || k + 2 * ab > n + 1 {
        return 0.0;
    }
    // Within range k + 2(alpha+beta) <= n + 1 guarantees bot <= top.
    let (top, bot) = ((n + k - 3) / 2, k + ab - 2);
    let mut choose = 1.0;
    for i in 0..bot.min(top - bot) {
        choose *= (top - i) as f64 / (i + 1) as f64;
    }
    choose
        * (d_h as f64).powi(((n + 1 - k) / 2) as i32)
        * (d_c as f64).powi(((n + 3 - k) / 2 - ab) as i32)
        * ((d_c - 1) as f64).powi((k + ab - 2) as i32)
}
