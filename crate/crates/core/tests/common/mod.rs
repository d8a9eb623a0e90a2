#![allow(dead_code)]

use std::collections::BTreeSet;

use expramsey::{PatternKind, PatternSpec};
use num_bigint::BigUint;

pub type Inst = (Vec<u64>, Vec<u64>);

/// Every instance on `[1, n]`, by plain loops over both slots.
pub fn naive_instances(p: &PatternSpec, n: u64) -> BTreeSet<Inst> {
    let lo = p.min_element.max(1);
    let mut out = BTreeSet::new();
    for s in 1..=n {
        for t in 1..=n {
            let members: Option<Vec<u128>> = match p.kind {
                PatternKind::Schur => (s <= t).then(|| vec![s as u128, t as u128, (s + t) as u128]),
                PatternKind::Ap { len } => Some((0..len as u128).map(|i| s as u128 + i * t as u128).collect()),
                PatternKind::Brauer { ell } => {
                    let mut v = vec![s as u128, t as u128];
                    v.extend((1..=ell as u128).map(|i| s as u128 + i * t as u128));
                    Some(v)
                }
                PatternKind::GenSchur { ell } => Some(vec![s as u128, t as u128, s as u128 + ell as u128 * t as u128]),
                PatternKind::ExpTwoTriple => {
                    let z = (BigUint::from(1u8) << s) * t;
                    Some(vec![s as u128, t as u128, to_u128_capped(&z)])
                }
                PatternKind::ExpTriple => {
                    let z = BigUint::from(t).pow(s.min(200) as u32);
                    Some(vec![s as u128, t as u128, to_u128_capped(&z)])
                }
            };
            let Some(members) = members else { continue };
            // slots that are members must respect the lower bound; the AP difference is not a member
            let slot_ok = match p.kind {
                PatternKind::Ap { .. } => s >= lo,
                _ => s >= lo && t >= lo,
            };
            if !slot_ok || members.iter().any(|&m| m < lo as u128 || m > n as u128) {
                continue;
            }
            if p.require_distinct {
                let set: BTreeSet<_> = members.iter().collect();
                if set.len() != members.len() {
                    continue;
                }
            }
            out.insert((vec![s, t], members.iter().map(|&m| m as u64).collect()));
        }
    }
    out
}

fn to_u128_capped(v: &BigUint) -> u128 {
    if v.bits() > 100 {
        u128::MAX
    } else {
        v.iter_u64_digits().rev().fold(0u128, |acc, d| (acc << 64) | d as u128)
    }
}

/// `colors[m - 1]` is the color of `m`.
pub fn has_mono(colors: &[usize], instances: &BTreeSet<Inst>) -> bool {
    instances.iter().any(|(_, v)| v.iter().all(|&m| colors[m as usize - 1] == colors[v[0] as usize - 1]))
}

/// Does any `r`-coloring of `[1, n]` avoid every instance?
pub fn brute_force_avoider(n: u64, r: usize, p: &PatternSpec) -> Option<Vec<usize>> {
    let inst = naive_instances(p, n);
    let total = (r as u64).pow(n as u32);
    (0..total).map(|code| digits(code, n as usize, r)).find(|c| !has_mono(c, &inst))
}

pub fn digits(mut code: u64, n: usize, r: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let d = (code % r as u64) as usize;
            code /= r as u64;
            d
        })
        .collect()
}

/// `2^e * m mod k` without the library's set code.
pub fn pow2_times_mod(e: &BigUint, m: &BigUint, k: u64) -> u64 {
    let k = BigUint::from(k);
    let p = BigUint::from(2u8).modpow(e, &k);
    let r = (p * m) % &k;
    r.iter_u64_digits().next().unwrap_or(0)
}

/// `|{t <= w : 2^n t ≡ 0 (mod k)}|`
pub fn quotient_count_multiples(k: u64, n: u64, w: u64) -> u64 {
    let e = BigUint::from(n);
    (1..=w).filter(|&t| pow2_times_mod(&e, &BigUint::from(t), k) == 0).count() as u64
}
