//! One enumeration sweep per cusp, bucketing contributions by discriminant
//! and residue class of `b`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::table::{CoefficientTable, Entry};
use super::{check_compatible, check_index, symmetry_sign, AdmissiblePair};
use crate::arith::{ceil_div, factorial, floor_div, isqrt, Rat};
use crate::error::{Error, Result};
use crate::modsym::{Cusp, ModularSymbol};
use crate::poly::bracket_weights;
use crate::qf::{BinaryQF, GenusCharacter};

/// Integer weights `v` with `sum_i n_i [P_i | Q^e] = (v . Q^e) / den` for all
/// terms sharing one cusp.
struct CuspWeights {
    cusp: Cusp,
    big: Vec<BigInt>,
    small: Option<Vec<i128>>,
}

fn cusp_weights(sigma: &ModularSymbol) -> (Vec<CuspWeights>, BigInt) {
    let w = sigma.poly_degree();
    let bw = bracket_weights(w);
    let wf = factorial(w);
    let mut grouped: BTreeMap<Cusp, Vec<Rat>> = BTreeMap::new();
    for t in sigma.terms() {
        if t.cusp.is_infinity() || t.n == 0 {
            continue;
        }
        let v = grouped.entry(t.cusp).or_insert_with(|| vec![Rat::zero(); w + 1]);
        for (j, slot) in v.iter_mut().enumerate() {
            let l = w - j;
            let p = &t.poly.coeffs()[l];
            if !p.is_zero() {
                *slot += p * Rat::from_integer(&bw[l] * t.n) / Rat::from_integer(wf.clone());
            }
        }
    }
    let den = grouped
        .values()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let out = grouped
        .into_iter()
        .filter(|(_, v)| v.iter().any(|x| !x.is_zero()))
        .map(|(cusp, v)| {
            let big: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect();
            let small = big.iter().map(ToPrimitive::to_i128).collect();
            CuspWeights { cusp, big, small }
        })
        .collect();
    (out, den)
}

/// Bucket sums: a dense `i128` array with a big-integer overflow side table.
struct Buckets {
    small: Vec<i128>,
    big: HashMap<usize, BigInt>,
}

impl Buckets {
    fn new(len: usize) -> Self {
        Buckets { small: vec![0; len], big: HashMap::new() }
    }

    fn add_small(&mut self, idx: usize, v: i128) {
        match self.small[idx].checked_add(v) {
            Some(s) => self.small[idx] = s,
            None => {
                let spill = BigInt::from(self.small[idx]) + v;
                *self.big.entry(idx).or_insert_with(BigInt::zero) += spill;
                self.small[idx] = 0;
            }
        }
    }

    fn add_big(&mut self, idx: usize, v: BigInt) {
        *self.big.entry(idx).or_insert_with(BigInt::zero) += v;
    }

    fn merge(&mut self, other: Buckets) {
        for (idx, v) in other.small.into_iter().enumerate() {
            if v != 0 {
                self.add_small(idx, v);
            }
        }
        for (idx, v) in other.big {
            self.add_big(idx, v);
        }
    }

    fn get(&self, idx: usize) -> BigInt {
        let mut v = BigInt::from(self.small[idx]);
        if let Some(b) = self.big.get(&idx) {
            v += b;
        }
        v
    }
}

/// Coefficients of `Q^e` in `i128`, or `None` on overflow.
fn qf_power_small(q: &BinaryQF, e: usize) -> Option<Vec<i128>> {
    let (a, b, c) = (q.a as i128, q.b as i128, q.c as i128);
    let mut cur = vec![1i128];
    for _ in 0..e {
        let mut next = vec![0i128; cur.len() + 2];
        for (i, &v) in cur.iter().enumerate() {
            next[i] = next[i].checked_add(v.checked_mul(c)?)?;
            next[i + 1] = next[i + 1].checked_add(v.checked_mul(b)?)?;
            next[i + 2] = next[i + 2].checked_add(v.checked_mul(a)?)?;
        }
        cur = next;
    }
    Some(cur)
}

fn dot_small(v: &[i128], q: &[i128]) -> Option<i128> {
    v.iter().zip(q).try_fold(0i128, |acc, (x, y)| acc.checked_add(x.checked_mul(*y)?))
}

struct Sweep<'a> {
    m: i64,
    d0_abs: i128,
    dmax: i64,
    e: usize,
    chi: &'a GenusCharacter,
}

impl Sweep<'_> {
    fn index(&self, disc: i128, b: i128) -> usize {
        let row = (disc / self.d0_abs) as usize;
        let two_m = 2 * self.m as i128;
        row * (2 * self.m as usize) + b.rem_euclid(two_m) as usize
    }

    fn len(&self) -> usize {
        (self.dmax as usize + 1) * 2 * self.m as usize
    }

    /// All forms `[a, b, c]` with `a` from `a_values`, `Q(s) < 0` and
    /// `0 < disc <= dmax |Δ0|`, `|Δ0| | disc`.
    fn run(&self, weights: &CuspWeights, a_values: impl Iterator<Item = i128>) -> Result<Buckets> {
        let mut out = Buckets::new(self.len());
        let (p, q) = (weights.cusp.p() as i128, weights.cusp.q() as i128);
        let dlim = self.dmax as i128 * self.d0_abs;
        let t_max = isqrt(dlim * q * q);
        for a in a_values {
            let lo = ceil_div(-t_max - 2 * a * p, q);
            let hi = floor_div(t_max - 2 * a * p, q);
            for b in lo..=hi {
                let c_hi = floor_div(-(a * p * p + b * p * q) - 1, q * q);
                let c_lo = ceil_div(b * b - dlim, 4 * a);
                if c_lo > c_hi {
                    continue;
                }
                // only discriminants divisible by |Δ0| are ever read
                let mut c = c_hi;
                let first = (b * b - 4 * a * c).rem_euclid(self.d0_abs);
                if first != 0 {
                    // each step down in c adds 4a to the discriminant
                    let step = (4 * a).rem_euclid(self.d0_abs);
                    let mut shift = 0;
                    let mut r = first;
                    while r != 0 && shift < self.d0_abs {
                        r = (r + step).rem_euclid(self.d0_abs);
                        shift += 1;
                    }
                    if r != 0 {
                        continue;
                    }
                    c -= shift;
                }
                let stride = self.d0_abs / self.d0_abs.gcd(&(4 * a));
                while c >= c_lo {
                    let disc = b * b - 4 * a * c;
                    self.add_form(&mut out, weights, a, b, c, disc)?;
                    c -= stride;
                }
            }
        }
        Ok(out)
    }

    fn add_form(&self, out: &mut Buckets, weights: &CuspWeights, a: i128, b: i128, c: i128, disc: i128) -> Result<()> {
        let fit = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("sweep form"));
        let form = BinaryQF::new(fit(a)?, fit(b)?, fit(c)?);
        let x = self.chi.eval(&form)?;
        if x == 0 {
            return Ok(());
        }
        let idx = self.index(disc, b);
        if let Some(v) = &weights.small {
            let term = if self.e == 0 {
                Some(v[0])
            } else {
                qf_power_small(&form, self.e).and_then(|pw| dot_small(v, &pw))
            };
            if let Some(t) = term {
                out.add_small(idx, t * x as i128);
                return Ok(());
            }
        }
        let pw = crate::poly::qf_power_int(&form, self.e);
        let t: BigInt = weights.big.iter().zip(&pw).map(|(x, y)| x * y).sum();
        out.add_big(idx, t * x);
        Ok(())
    }
}

/// Table of `c(Δ, r)` for `0 < |Δ| <= dmax` and `0 <= r <= m`, with
/// positions the pair cannot reach marked NA. `workers = 0` uses all cores.
pub fn batch_table(
    sigma: &ModularSymbol,
    pair: &AdmissiblePair,
    dmax: i64,
    workers: usize,
) -> Result<CoefficientTable> {
    check_compatible(sigma, pair)?;
    if dmax < 1 {
        return Err(Error::InvalidArgument(format!("dmax must be positive, got {dmax}")));
    }
    let m = pair.m();
    let d0_abs = pair.d0().abs() as i128;
    dmax.checked_mul(2 * m)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or(Error::Overflow("bucket array"))?;
    let dlim = dmax as i128 * d0_abs;
    let (weights, den) = cusp_weights(sigma);
    let chi = GenusCharacter::new(m, pair.d0());
    let sweep = Sweep { m, d0_abs, dmax, e: (sigma.weight() - 2) as usize, chi: &chi };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    // a is strided across chunks: small a carry most of the forms
    let chunks = pool.current_num_threads().max(1) * 4;
    let mut total = Buckets::new(sweep.len());
    for cw in &weights {
        let q = cw.cusp.q() as i128;
        let a_count = (dlim * q * q / 4) / m as i128;
        let parts: Vec<Result<Buckets>> = pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|j| {
                    let a_values = (j as i128..a_count).step_by(chunks).map(|i| (i + 1) * m as i128);
                    sweep.run(cw, a_values)
                })
                .collect()
        });
        for part in parts {
            total.merge(part?);
        }
    }

    let mut table = CoefficientTable::new(sigma.weight(), m, sigma.eps(), Some(*pair))?;
    let sign = symmetry_sign(sigma.weight(), sigma.eps());
    let two_m = 2 * m as i128;
    let scale = Rat::from_integer(den * 2);
    for abs in 1..=dmax {
        let delta = sigma.eps().value() * abs;
        for r in 0..=m {
            if check_index(m, sigma.eps(), delta, r).is_err() {
                continue;
            }
            if pair.is_na(delta) {
                table.insert(delta, r, Entry::na())?;
                continue;
            }
            let disc = abs as i128 * d0_abs;
            let class = r as i128 * pair.r0() as i128;
            let plus = total.get(sweep.index(disc, class));
            let minus = total.get(sweep.index(disc, (-class).rem_euclid(two_m)));
            let value = Rat::from_integer(plus + minus * sign) / &scale;
            table.insert(delta, r, Entry::value(value))?;
        }
    }
    Ok(table)
}
