//! Integer domains as finite unions of disjoint intervals whose endpoints may
//! be `inf` or `sup`, plus the interval images used by forward propagation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An extended integer: `inf < n < sup` for every integer `n`.
///
/// The derived ordering relies on the variant order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ext {
    Inf,
    Fin(BigInt),
    Sup,
}

impl Ext {
    pub fn fin(n: impl Into<BigInt>) -> Ext {
        Ext::Fin(n.into())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    pub fn as_fin(&self) -> Option<&BigInt> {
        match self {
            Ext::Fin(n) => Some(n),
            _ => None,
        }
    }

    pub fn neg(&self) -> Ext {
        match self {
            Ext::Inf => Ext::Sup,
            Ext::Sup => Ext::Inf,
            Ext::Fin(n) => Ext::Fin(-n),
        }
    }

    /// Sum of two extended integers. `inf + sup` has no value; callers only add
    /// lower bounds to lower bounds and upper bounds to upper bounds.
    pub fn add(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
            (Ext::Inf, Ext::Sup) | (Ext::Sup, Ext::Inf) => {
                unreachable!("inf + sup is undefined")
            }
            (Ext::Inf, _) | (_, Ext::Inf) => Ext::Inf,
            (Ext::Sup, _) | (_, Ext::Sup) => Ext::Sup,
        }
    }

    pub fn sub(&self, other: &Ext) -> Ext {
        self.add(&other.neg())
    }

    pub fn add_int(&self, k: &BigInt) -> Ext {
        match self {
            Ext::Fin(a) => Ext::Fin(a + k),
            other => other.clone(),
        }
    }

    /// Product with the interval-corner convention `0 * ±inf = 0`.
    pub fn mul(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a * b),
            (Ext::Fin(a), inf) | (inf, Ext::Fin(a)) => match a.sign() {
                num_bigint::Sign::NoSign => Ext::Fin(BigInt::zero()),
                num_bigint::Sign::Plus => inf.clone(),
                num_bigint::Sign::Minus => inf.neg(),
            },
            (a, b) if a == b => Ext::Sup,
            _ => Ext::Inf,
        }
    }

    fn sign(&self) -> Ordering {
        match self {
            Ext::Inf => Ordering::Less,
            Ext::Sup => Ordering::Greater,
            Ext::Fin(n) => n.cmp(&BigInt::zero()),
        }
    }

    fn abs(&self) -> Ext {
        match self {
            Ext::Fin(n) => Ext::Fin(n.abs()),
            _ => Ext::Sup,
        }
    }
}

impl From<BigInt> for Ext {
    fn from(n: BigInt) -> Ext {
        Ext::Fin(n)
    }
}

impl From<i64> for Ext {
    fn from(n: i64) -> Ext {
        Ext::Fin(n.into())
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Inf => f.write_str("inf"),
            Ext::Sup => f.write_str("sup"),
            Ext::Fin(n) => write!(f, "{n}"),
        }
    }
}

/// Closed interval `lo..hi`. `lo` is never `sup` and `hi` is never `inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Ext,
    pub hi: Ext,
}

impl Interval {
    fn new(lo: Ext, hi: Ext) -> Interval {
        debug_assert!(lo != Ext::Sup && hi != Ext::Inf && lo <= hi);
        Interval { lo, hi }
    }
}

/// Member count of a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cardinality {
    Finite(BigUint),
    Infinite,
}

impl PartialOrd for Cardinality {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cardinality {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => a.cmp(b),
            (Cardinality::Finite(_), Cardinality::Infinite) => Ordering::Less,
            (Cardinality::Infinite, Cardinality::Finite(_)) => Ordering::Greater,
            (Cardinality::Infinite, Cardinality::Infinite) => Ordering::Equal,
        }
    }
}

/// A normalized set of integers: sorted, disjoint, non-adjacent intervals.
/// The empty domain signals inconsistency.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    ivs: Vec<Interval>,
}

impl Domain {
    pub fn empty() -> Domain {
        Domain { ivs: Vec::new() }
    }

    pub fn full() -> Domain {
        Domain {
            ivs: vec![Interval::new(Ext::Inf, Ext::Sup)],
        }
    }

    pub fn singleton(n: BigInt) -> Domain {
        Domain {
            ivs: vec![Interval::new(Ext::Fin(n.clone()), Ext::Fin(n))],
        }
    }

    /// `lo..hi`; empty when `lo > hi`. `lo = sup` or `hi = inf` also give the
    /// empty domain.
    pub fn interval(lo: Ext, hi: Ext) -> Domain {
        if lo == Ext::Sup || hi == Ext::Inf || lo > hi {
            Domain::empty()
        } else {
            Domain {
                ivs: vec![Interval::new(lo, hi)],
            }
        }
    }

    pub fn range(lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Domain {
        Domain::interval(Ext::Fin(lo.into()), Ext::Fin(hi.into()))
    }

    /// Builds a normalized domain from arbitrary (possibly overlapping or
    /// empty) intervals.
    pub fn from_intervals(parts: impl IntoIterator<Item = (Ext, Ext)>) -> Domain {
        let mut ivs: Vec<Interval> = parts
            .into_iter()
            .filter(|(lo, hi)| *lo != Ext::Sup && *hi != Ext::Inf && lo <= hi)
            .map(|(lo, hi)| Interval::new(lo, hi))
            .collect();
        ivs.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            if let Some(last) = out.last_mut() {
                if touches(&last.hi, &iv.lo) {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        Domain { ivs: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.ivs
    }

    pub fn is_empty(&self) -> bool {
        self.ivs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        match (self.ivs.first(), self.ivs.last()) {
            (Some(first), Some(last)) => first.lo.is_finite() && last.hi.is_finite(),
            _ => true,
        }
    }

    pub fn as_singleton(&self) -> Option<&BigInt> {
        match self.ivs.as_slice() {
            [Interval {
                lo: Ext::Fin(a),
                hi: Ext::Fin(b),
            }] if a == b => Some(a),
            _ => None,
        }
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        let x = Ext::Fin(n.clone());
        self.ivs.iter().any(|iv| iv.lo <= x && x <= iv.hi)
    }

    /// Smallest and largest bound. Callers must not ask on the empty domain.
    pub fn bounds(&self) -> (Ext, Ext) {
        let first = self.ivs.first().expect("bounds of empty domain");
        let last = self.ivs.last().expect("bounds of empty domain");
        (first.lo.clone(), last.hi.clone())
    }

    pub fn lower(&self) -> Ext {
        self.bounds().0
    }

    pub fn upper(&self) -> Ext {
        self.bounds().1
    }

    pub fn cardinality(&self) -> Cardinality {
        if !self.is_finite() {
            return Cardinality::Infinite;
        }
        let mut total = BigInt::zero();
        for iv in &self.ivs {
            if let (Ext::Fin(a), Ext::Fin(b)) = (&iv.lo, &iv.hi) {
                total += b - a + 1;
            }
        }
        Cardinality::Finite(total.to_biguint().expect("non-negative count"))
    }

    pub fn intersect(&self, other: &Domain) -> Domain {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.ivs.len() && j < other.ivs.len() {
            let a = &self.ivs[i];
            let b = &other.ivs[j];
            let lo = (&a.lo).max(&b.lo);
            let hi = (&a.hi).min(&b.hi);
            if lo <= hi {
                out.push(Interval::new(lo.clone(), hi.clone()));
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Domain { ivs: out }
    }

    pub fn union(&self, other: &Domain) -> Domain {
        Domain::from_intervals(
            self.ivs
                .iter()
                .chain(other.ivs.iter())
                .map(|iv| (iv.lo.clone(), iv.hi.clone())),
        )
    }

    pub fn complement(&self) -> Domain {
        let mut parts = Vec::new();
        let mut cursor = Ext::Inf;
        for iv in &self.ivs {
            if let Ext::Fin(lo) = &iv.lo {
                parts.push((cursor.clone(), Ext::Fin(lo - 1)));
            }
            cursor = match &iv.hi {
                Ext::Fin(hi) => Ext::Fin(hi + 1),
                _ => Ext::Sup,
            };
        }
        if cursor != Ext::Sup {
            parts.push((cursor, Ext::Sup));
        }
        Domain::from_intervals(parts)
    }

    pub fn subtract(&self, other: &Domain) -> Domain {
        self.intersect(&other.complement())
    }

    pub fn remove_value(&self, v: &BigInt) -> Domain {
        if !self.contains(v) {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.ivs.len() + 1);
        let x = Ext::Fin(v.clone());
        for iv in &self.ivs {
            if iv.lo <= x && x <= iv.hi {
                if iv.lo < x {
                    out.push(Interval::new(iv.lo.clone(), Ext::Fin(v - 1)));
                }
                if x < iv.hi {
                    out.push(Interval::new(Ext::Fin(v + 1), iv.hi.clone()));
                }
            } else {
                out.push(iv.clone());
            }
        }
        Domain { ivs: out }
    }

    pub fn is_subset(&self, other: &Domain) -> bool {
        self.intersect(other) == *self
    }

    /// Smallest member strictly greater than `after` (or the minimum when
    /// `after` is `None`). `None` for domains unbounded below with no `after`.
    pub fn next_value(&self, after: Option<&BigInt>) -> Option<BigInt> {
        for iv in &self.ivs {
            let candidate = match (after, &iv.lo) {
                (None, Ext::Fin(lo)) => lo.clone(),
                (None, _) => return None,
                (Some(a), Ext::Fin(lo)) if lo > a => lo.clone(),
                (Some(a), _) => a + 1,
            };
            if Ext::Fin(candidate.clone()) <= iv.hi && Ext::Fin(candidate.clone()) >= iv.lo {
                return Some(candidate);
            }
        }
        None
    }

    /// Members of a finite domain in ascending order.
    pub fn values(&self) -> Option<Vec<BigInt>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = Vec::new();
        for iv in &self.ivs {
            if let (Ext::Fin(a), Ext::Fin(b)) = (&iv.lo, &iv.hi) {
                let mut x = a.clone();
                while &x <= b {
                    out.push(x.clone());
                    x += 1;
                }
            }
        }
        Some(out)
    }

    /// Hull `lo..hi` covering the domain.
    pub fn hull(&self) -> Domain {
        if self.is_empty() {
            return Domain::empty();
        }
        let (lo, hi) = self.bounds();
        Domain::interval(lo, hi)
    }

    /// The negative and positive parts of the domain, zero excluded.
    fn signed_parts(&self) -> [Option<(Ext, Ext)>; 2] {
        let neg = self.intersect(&Domain::interval(Ext::Inf, Ext::fin(-1)));
        let pos = self.intersect(&Domain::interval(Ext::fin(1), Ext::Sup));
        [
            (!neg.is_empty()).then(|| neg.bounds()),
            (!pos.is_empty()).then(|| pos.bounds()),
        ]
    }
}

/// `hi` and `lo` of consecutive intervals merge when no integer lies strictly
/// between them.
fn touches(hi: &Ext, lo: &Ext) -> bool {
    match (hi, lo) {
        (Ext::Sup, _) | (_, Ext::Inf) => true,
        (Ext::Fin(h), Ext::Fin(l)) => l <= &(h + 1),
        _ => false,
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ivs.is_empty() {
            return f.write_str("1..0");
        }
        for (i, iv) in self.ivs.iter().enumerate() {
            if i > 0 {
                f.write_str("\\/")?;
            }
            match (&iv.lo, &iv.hi) {
                (Ext::Fin(a), Ext::Fin(b)) if a == b => write!(f, "{a}")?,
                (lo, hi) => {
                    write!(f, "{lo}..")?;
                    if hi.sign() == Ordering::Less {
                        f.write_str(" ")?;
                    }
                    write!(f, "{hi}")?;
                }
            }
        }
        Ok(())
    }
}

/// Arithmetic operations whose interval images drive forward propagation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImageOp {
    Add,
    Sub,
    Mul,
    /// Integer division truncating toward zero.
    DivT,
    /// Absolute value; unary.
    Abs,
    Pow,
}

/// Results larger than this many bits are widened to an infinite bound in
/// interval images.
const POW_BIT_CAP: u64 = 1 << 22;

/// A superset of `{x op y | x in a, y in b}`. For `DivT` zero members of `b`
/// are ignored; for `Pow` negative members of `b` are ignored.
pub fn image(op: ImageOp, a: &Domain, b: Option<&Domain>) -> Domain {
    let full = Domain::full();
    let b = b.unwrap_or(&full);
    if a.is_empty() || b.is_empty() {
        return Domain::empty();
    }
    let (al, ah) = a.bounds();
    match op {
        ImageOp::Add => {
            let (bl, bh) = b.bounds();
            Domain::interval(al.add(&bl), ah.add(&bh))
        }
        ImageOp::Sub => {
            let (bl, bh) = b.bounds();
            Domain::interval(al.sub(&bh), ah.sub(&bl))
        }
        ImageOp::Mul => {
            let (bl, bh) = b.bounds();
            let corners = [al.mul(&bl), al.mul(&bh), ah.mul(&bl), ah.mul(&bh)];
            hull_of(corners)
        }
        ImageOp::DivT => {
            let mut out = Domain::empty();
            for (bl, bh) in b.signed_parts().into_iter().flatten() {
                let corners = [
                    div_corner(&al, &bl),
                    div_corner(&al, &bh),
                    div_corner(&ah, &bl),
                    div_corner(&ah, &bh),
                ];
                out = out.union(&hull_of(corners));
            }
            out.hull()
        }
        ImageOp::Abs => abs_image(&al, &ah),
        ImageOp::Pow => {
            let exps = b.intersect(&Domain::interval(Ext::fin(0), Ext::Sup));
            if exps.is_empty() {
                return Domain::empty();
            }
            pow_image(&al, &ah, &exps)
        }
    }
}

fn hull_of(corners: impl IntoIterator<Item = Ext>) -> Domain {
    let mut it = corners.into_iter();
    let first = it.next().expect("at least one corner");
    let (lo, hi) = it.fold((first.clone(), first), |(lo, hi), c| {
        (lo.min(c.clone()), hi.max(c))
    });
    // Mul corners can produce `sup` as a low corner or `inf` as a high one
    // only when every corner agrees, which cannot happen for nonempty inputs.
    Domain::interval(lo, hi)
}

/// Truncating quotient of two interval corners, `y` nonzero.
/// Limits: `n / ±inf = 0`, `±inf / n = ±inf` by sign.
fn div_corner(x: &Ext, y: &Ext) -> Ext {
    match (x, y) {
        (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a / b),
        (Ext::Fin(_), _) => Ext::fin(0),
        (inf, y) => {
            if y.sign() == Ordering::Greater {
                inf.clone()
            } else {
                inf.neg()
            }
        }
    }
}

fn abs_image(al: &Ext, ah: &Ext) -> Domain {
    if al.sign() != Ordering::Less {
        Domain::interval(al.clone(), ah.clone())
    } else if ah.sign() != Ordering::Greater {
        Domain::interval(ah.neg(), al.neg())
    } else {
        Domain::interval(Ext::fin(0), al.neg().max(ah.clone()))
    }
}

fn pow_image(al: &Ext, ah: &Ext, exps: &Domain) -> Domain {
    let (el, eh) = exps.bounds();
    let el = el.as_fin().cloned().unwrap_or_default();
    // Enumerate small exponent ranges exactly, otherwise widen.
    if let Ext::Fin(eh_n) = &eh {
        if eh_n - &el <= BigInt::from(64) {
            let mut out = Domain::empty();
            for e in exps.values().expect("finite exponent domain") {
                out = out.union(&pow_image_fixed(al, ah, &e));
            }
            return out.hull();
        }
    }
    let max_abs = al.abs().max(ah.abs());
    let one = Ext::fin(1);
    if max_abs <= one {
        let lo = if al.sign() == Ordering::Less { Ext::fin(-1) } else { Ext::fin(0) };
        return Domain::interval(lo, one);
    }
    let hi = pow_bound(&max_abs, &eh);
    if al.sign() == Ordering::Less {
        Domain::interval(hi.neg(), hi)
    } else {
        Domain::interval(Ext::fin(0), hi)
    }
}

/// `base ^ e` for a nonnegative base bound, widened to `sup` when the exact
/// value would exceed `POW_BIT_CAP` bits.
fn pow_bound(base: &Ext, e: &Ext) -> Ext {
    match (base, e) {
        (Ext::Fin(b), Ext::Fin(e)) => match checked_pow(b, e) {
            Some(v) => Ext::Fin(v),
            None => Ext::Sup,
        },
        (Ext::Fin(b), _) if b <= &BigInt::one() => Ext::Fin(b.clone()),
        _ => Ext::Sup,
    }
}

fn checked_pow(base: &BigInt, e: &BigInt) -> Option<BigInt> {
    if base.is_zero() {
        return Some(if e.is_zero() { BigInt::one() } else { BigInt::zero() });
    }
    if base.abs().is_one() {
        return Some(if base.is_negative() && e.is_odd() { -BigInt::one() } else { BigInt::one() });
    }
    let e = e.to_u64()?;
    if base.bits().saturating_mul(e) > POW_BIT_CAP {
        return None;
    }
    Some(num_traits::pow(base.clone(), e as usize))
}

fn pow_image_fixed(al: &Ext, ah: &Ext, e: &BigInt) -> Domain {
    if e.is_zero() {
        return Domain::singleton(BigInt::one());
    }
    let ext_e = Ext::Fin(e.clone());
    if e.is_odd() {
        let lo = match al {
            Ext::Fin(_) => pow_bound(&al.abs(), &ext_e),
            _ => Ext::Sup,
        };
        let lo = if al.sign() == Ordering::Less { lo.neg() } else { lo };
        let hi = match ah {
            Ext::Fin(_) => pow_bound(&ah.abs(), &ext_e),
            _ => Ext::Sup,
        };
        let hi = if ah.sign() == Ordering::Less { hi.neg() } else { hi };
        // Widening may only push bounds outward; a widened negative upper bound
        // falls back to `sup`.
        let hi = if ah.sign() == Ordering::Less && hi == Ext::Inf { Ext::Sup } else { hi };
        let lo = if al.sign() != Ordering::Less && lo == Ext::Sup { Ext::Inf } else { lo };
        Domain::interval(lo, hi)
    } else {
        let max_abs = al.abs().max(ah.abs());
        let min_abs = if al.sign() != Ordering::Greater && ah.sign() != Ordering::Less {
            Ext::fin(0)
        } else {
            al.abs().min(ah.abs())
        };
        let lo = match pow_bound(&min_abs, &ext_e) {
            Ext::Sup => Ext::fin(0),
            v => v,
        };
        Domain::interval(lo, pow_bound(&max_abs, &ext_e))
    }
}

/// Integer bounds for `x` given `x * y = z` with `y` in `[yl, yh]`, `yl >= 1`.
/// Returns `(ceil(min z/y), floor(max z/y))`.
pub(crate) fn quotient_bounds_pos(zl: &Ext, zh: &Ext, yl: &BigInt, yh: &Ext) -> (Ext, Ext) {
    let lo = match zl {
        Ext::Inf => Ext::Inf,
        Ext::Fin(z) if z.is_negative() => Ext::Fin(z.div_floor(yl) + ceil_adjust(z, yl)),
        Ext::Fin(z) if z.is_zero() => Ext::fin(0),
        Ext::Fin(z) => match yh {
            Ext::Fin(yh) => Ext::Fin(ceil_div(z, yh)),
            _ => Ext::fin(1),
        },
        Ext::Sup => unreachable!("lower bound is never sup"),
    };
    let hi = match zh {
        Ext::Sup => Ext::Sup,
        Ext::Fin(z) if !z.is_negative() => Ext::Fin(z.div_floor(yl)),
        Ext::Fin(z) => match yh {
            Ext::Fin(yh) => Ext::Fin(z.div_floor(yh)),
            _ => Ext::fin(-1),
        },
        Ext::Inf => unreachable!("upper bound is never inf"),
    };
    (lo, hi)
}

fn ceil_adjust(z: &BigInt, y: &BigInt) -> BigInt {
    if (z % y).is_zero() {
        BigInt::zero()
    } else {
        BigInt::one()
    }
}

pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Integer bounds for `x` given `x * y = z`, considering only the nonzero
/// parts of `y`. `None` when `y` has no nonzero member.
pub(crate) fn quotient_hull(z: &Domain, y: &Domain) -> Option<Domain> {
    let (zl, zh) = z.bounds();
    let mut out: Option<Domain> = None;
    for (i, part) in y.signed_parts().into_iter().enumerate() {
        let Some((pl, ph)) = part else { continue };
        let (lo, hi) = if i == 1 {
            quotient_bounds_pos(&zl, &zh, pl.as_fin().expect("positive part"), &ph)
        } else {
            // x * y = z with y < 0 is x * (-y) = -z.
            let (lo, hi) = quotient_bounds_pos(
                &zh.neg(),
                &zl.neg(),
                ph.neg().as_fin().expect("negative part"),
                &pl.neg(),
            );
            (lo, hi)
        };
        let d = Domain::interval(lo, hi);
        out = Some(match out {
            Some(acc) => acc.union(&d),
            None => d,
        });
    }
    out.map(|d| d.hull())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(parts: &[(i64, i64)]) -> Domain {
        Domain::from_intervals(parts.iter().map(|&(a, b)| (Ext::fin(a), Ext::fin(b))))
    }

    fn members(dom: &Domain, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).filter(|&n| dom.contains(&BigInt::from(n))).collect()
    }

    #[test]
    fn intersect_examples() {
        let up = Domain::interval(Ext::fin(1), Ext::Sup);
        assert_eq!(d(&[(0, 2)]).intersect(&up), d(&[(1, 2)]));
        assert_eq!(Domain::full().intersect(&Domain::full()), Domain::full());
        let holes = d(&[(0, 3), (7, 9)]).intersect(&d(&[(2, 8)]));
        assert_eq!(holes, d(&[(2, 3), (7, 8)]));
        // enumeration oracle
        let a = d(&[(0, 3), (7, 9)]);
        let b = d(&[(2, 8)]);
        let expected: Vec<i64> = (0..=9)
            .filter(|n| a.contains(&(*n).into()) && b.contains(&(*n).into()))
            .collect();
        assert_eq!(members(&holes, -2, 12), expected);
    }

    #[test]
    fn remove_value_examples() {
        assert_eq!(d(&[(0, 2)]).remove_value(&0.into()), d(&[(1, 2)]));
        assert_eq!(d(&[(1, 2)]).remove_value(&5.into()), d(&[(1, 2)]));
        let r = Domain::full().remove_value(&0.into());
        assert!(r.contains(&(-1).into()));
        assert!(!r.contains(&0.into()));
        assert!(r.contains(&1.into()));
        assert_eq!(r.to_string(), "inf.. -1\\/1..sup");
    }

    #[test]
    fn cardinality_examples() {
        assert_eq!(d(&[(0, 2)]).cardinality(), Cardinality::Finite(3u32.into()));
        assert_eq!(
            Domain::interval(Ext::fin(1), Ext::Sup).cardinality(),
            Cardinality::Infinite
        );
        let holes = d(&[(0, 3), (7, 9)]);
        let counted = members(&holes, -5, 20).len() as u32;
        assert_eq!(counted, 7);
        assert_eq!(holes.cardinality(), Cardinality::Finite(counted.into()));
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(d(&[(1, 5)]).bounds(), (Ext::fin(1), Ext::fin(5)));
        assert_eq!(Domain::full().bounds(), (Ext::Inf, Ext::Sup));
        assert_eq!(d(&[(0, 3), (7, 9)]).bounds(), (Ext::fin(0), Ext::fin(9)));
    }

    #[test]
    fn image_examples() {
        let m = image(ImageOp::Mul, &d(&[(0, 0)]), Some(&d(&[(1, 2)])));
        assert_eq!(m, d(&[(0, 0)]));
        assert_eq!(image(ImageOp::Add, &d(&[(1, 3)]), Some(&d(&[(2, 4)]))), d(&[(3, 7)]));
        let divisors = d(&[(-2, -1), (1, 2)]);
        let q = image(ImageOp::DivT, &d(&[(7, 7)]), Some(&divisors));
        assert_eq!(q.bounds(), (Ext::fin(-7), Ext::fin(7)));
        for v in [-7, -3, 3, 7] {
            assert!(q.contains(&v.into()));
        }
    }

    #[test]
    fn infinite_products_are_defined() {
        let zero = d(&[(0, 0)]);
        let up = Domain::interval(Ext::fin(1), Ext::Sup);
        assert_eq!(image(ImageOp::Mul, &zero, Some(&up)), zero);
        let m = image(ImageOp::Mul, &d(&[(-1, 0)]), Some(&up));
        assert_eq!(m, Domain::interval(Ext::Inf, Ext::fin(0)));
        assert_eq!(image(ImageOp::Mul, &Domain::full(), Some(&Domain::full())), Domain::full());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Domain::interval(Ext::fin(92), Ext::Sup).to_string(), "92..sup");
        assert_eq!(d(&[(3, 3)]).to_string(), "3");
        assert_eq!(d(&[(0, 3), (7, 9)]).to_string(), "0..3\\/7..9");
    }

    #[test]
    fn next_value_walks_holes() {
        let dom = d(&[(0, 1), (5, 6)]);
        assert_eq!(dom.next_value(None), Some(0.into()));
        assert_eq!(dom.next_value(Some(&1.into())), Some(5.into()));
        assert_eq!(dom.next_value(Some(&6.into())), None);
    }

    #[test]
    fn quotient_bounds_cover_exact_quotients() {
        for zl in -6i64..=6 {
            for zh in zl..=6 {
                for yl in -3i64..=3 {
                    for yh in yl..=3 {
                        let z = d(&[(zl, zh)]);
                        let y = d(&[(yl, yh)]);
                        let Some(h) = quotient_hull(&z, &y) else { continue };
                        for x in -10i64..=10 {
                            let hit = (zl..=zh).any(|zv| {
                                (yl..=yh).any(|yv| yv != 0 && x * yv == zv)
                            });
                            if hit {
                                assert!(h.contains(&x.into()), "x={x} z={z} y={y} h={h}");
                            }
                        }
                    }
                }
            }
        }
    }
}
