//! 3-admissible conductors, formal cubic discriminants, and the factorization
//! d_L = f²·d of totally real cubic discriminants.
//!
//! A conductor f = 3^e·q₁⋯q_t is 3-admissible for K = Q(√d) when every
//! noncritical prime satisfies (d/q) ≡ q (mod 3) — inert q ≡ 2 (3), split
//! ℓ ≡ 1 (3) — and the critical exponent e obeys
//! e ∈ {0,2} for d ≡ ±1 (3), {0,1} for d ≡ 3 (9), {0,1,2} for d ≡ 6 (9).

use serde::Serialize;

use crate::arith::{factor, is_fundamental_discriminant, kronecker, perfect_square, SpfSieve};
use crate::{Error, Result};

/// How a restrictive prime (power) of the conductor sits in K.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    /// Splits in K — contributes to s.
    Split,
    /// Inert or ramified in K — contributes to n.
    NonSplit,
}

/// A factored 3-admissible conductor with its splitting counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conductor {
    pub f: u64,
    /// Exponent of 3 in f (0, 1, or 2).
    pub e: u32,
    /// Noncritical prime divisors (≠ 3), increasing.
    pub noncritical: Vec<u64>,
    /// Count of noncritical prime divisors.
    pub t: u32,
    /// Restrictive parts that split in K (noncritical ℓ ≡ 1 (3); the 3-part
    /// when d ≡ 1 (3)).
    pub s: u32,
    /// Restrictive parts that do not split (inert q ≡ 2 (3); the 3-part when
    /// d ≡ 2 (3) or 3 | d).
    pub n: u32,
    /// The w-invariant of the multiplicity formula ρ_f = ρ + t + w − δ(f).
    pub w: u32,
    #[serde(skip)]
    critical_splits: bool,
}

impl Conductor {
    /// Number of restrictive prime(power) parts = number of totally ramified
    /// primes of L/Q; always equals s + n.
    pub fn restrictive_parts(&self) -> u32 {
        self.t + if self.e > 0 { 1 } else { 0 }
    }

    /// The restrictive parts in canonical order: noncritical primes
    /// ascending, then the 3-part (as 3^e) if present.
    pub fn parts(&self) -> Vec<(u64, SplitKind)> {
        let mut out: Vec<(u64, SplitKind)> = self
            .noncritical
            .iter()
            .map(|&q| {
                let kind = if q % 3 == 1 { SplitKind::Split } else { SplitKind::NonSplit };
                (q, kind)
            })
            .collect();
        if self.e > 0 {
            let kind = if self.critical_splits { SplitKind::Split } else { SplitKind::NonSplit };
            out.push((3u64.pow(self.e), kind));
        }
        out
    }

    /// All divisors of f that are themselves 3-admissible for d, ascending.
    pub fn admissible_divisors(&self, d: i64) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &q in &self.noncritical {
            let len = divs.len();
            for i in 0..len {
                divs.push(divs[i] * q);
            }
        }
        if self.e > 0 {
            let len = divs.len();
            for ee in 1..=self.e {
                for i in 0..len {
                    divs.push(divs[i] * 3u64.pow(ee));
                }
            }
        }
        let mut out: Vec<u64> = divs
            .into_iter()
            .filter(|&c| is_admissible(c, d).unwrap_or(false))
            .collect();
        out.sort_unstable();
        out
    }

    fn build(f: u64, e: u32, noncritical: Vec<u64>, d: i64) -> Conductor {
        let t = noncritical.len() as u32;
        let mut s = noncritical.iter().filter(|&&q| q % 3 == 1).count() as u32;
        let mut n = noncritical.iter().filter(|&&q| q % 3 == 2).count() as u32;
        let critical_splits = d.rem_euclid(3) == 1;
        if e > 0 {
            if critical_splits {
                s += 1;
            } else {
                n += 1;
            }
        }
        let w = match e {
            0 => 0,
            1 => 1,
            2 => {
                if d.rem_euclid(9) == 6 {
                    2
                } else {
                    1
                }
            }
            _ => unreachable!(),
        };
        Conductor { f, e, noncritical, t, s, n, w, critical_splits }
    }
}

/// Formal cubic discriminant D = f²·d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalDiscriminant {
    pub value: i128,
    pub d: i64,
    pub conductor: Conductor,
}

/// Decide Def.-2.1 admissibility of f for the field of discriminant d.
pub fn is_admissible(f: u64, d: i64) -> Result<bool> {
    if f == 0 {
        return Err(Error::Malformed("conductor must be positive".into()));
    }
    if !is_fundamental_discriminant(d as i128) || d < 0 {
        return Err(Error::Malformed(format!("{d} is not a positive fundamental discriminant")));
    }
    let fac = factor(f as i128)?;
    let mut e = 0u32;
    for &(p, exp) in &fac.factors {
        if p == 3 {
            e = exp;
            if exp > 2 {
                return Ok(false);
            }
        } else {
            if exp > 1 {
                return Ok(false);
            }
            // Kronecker condition: (d/q) ≡ q (mod 3).
            let k = kronecker(d as i128, p);
            let want = if p % 3 == 1 { 1 } else { -1 };
            if k != want {
                return Ok(false);
            }
        }
    }
    let e_ok = match d.rem_euclid(9) {
        3 => e <= 1,
        6 => e <= 2,
        _ => e == 0 || e == 2, // d ≡ ±1 (mod 3)
    };
    Ok(e_ok)
}

/// Construct the [`Conductor`] for an admissible f (errors otherwise).
pub fn conductor(f: u64, d: i64) -> Result<Conductor> {
    if !is_admissible(f, d)? {
        return Err(Error::Malformed(format!("f={f} is not 3-admissible for d={d}")));
    }
    let fac = factor(f as i128)?;
    let mut e = 0u32;
    let mut noncritical = Vec::new();
    for &(p, exp) in &fac.factors {
        if p == 3 {
            e = exp;
        } else {
            noncritical.push(p as u64);
        }
    }
    Ok(Conductor::build(f, e, noncritical, d))
}

/// All admissible conductors with f²·d ≤ bound, ascending in f.
pub fn admissible_conductors(d: i64, bound: i128) -> Result<Vec<Conductor>> {
    if bound < 1 {
        return Err(Error::Malformed("bound must be ≥ 1".into()));
    }
    let mut out = Vec::new();
    let mut f = 1u64;
    while (f as i128) * (f as i128) * (d as i128) <= bound {
        if is_admissible(f, d)? {
            out.push(conductor(f, d)?);
        }
        f += 1;
    }
    Ok(out)
}

/// Resolvent data of a cubic discriminant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolvent {
    /// Non-Galois: d_L = f²·d with fundamental d > 1.
    S3 { d: i64, f: u64 },
    /// Cyclic cubic: d_L = f² is a perfect square of the conductor.
    Cyclic { f: u64 },
}

/// Split d_L into f²·d with d fundamental, or recognize the cyclic case.
pub fn split_cubic_discriminant(d_l: i128) -> Result<Resolvent> {
    if d_l <= 0 {
        return Err(Error::Malformed(format!("{d_l} is not a positive discriminant")));
    }
    if let Some(r) = perfect_square(d_l) {
        return Ok(Resolvent::Cyclic { f: r as u64 });
    }
    let fac = factor(d_l)?;
    let mut kernel: i128 = 1;
    let mut root: i128 = 1;
    for &(p, e) in &fac.factors {
        if e % 2 == 1 {
            kernel *= p;
        }
        root *= p.pow(e / 2);
    }
    let (d, f) = if kernel.rem_euclid(4) == 1 {
        (kernel, root)
    } else {
        // d = 4·kernel needs root even.
        if root % 2 != 0 {
            return Err(Error::Malformed(format!(
                "{d_l} is not of the form f²·d with d fundamental"
            )));
        }
        (4 * kernel, root / 2)
    };
    if d == 1 {
        return Err(Error::Malformed(format!("{d_l}: square case must use the cyclic marker")));
    }
    debug_assert!(is_fundamental_discriminant(d));
    debug_assert_eq!(f * f * d, d_l);
    Ok(Resolvent::S3 { d: d as i64, f: f as u64 })
}

/// Enumerate fundamental discriminants in (1, limit] with a sieve.
pub fn fundamental_discriminants_upto(limit: i64, sieve: &SpfSieve) -> Vec<i64> {
    let squarefree = |n: i64| sieve.factor(n as usize).iter().all(|&(_, e)| e == 1);
    let mut out = Vec::new();
    for d in 5..=limit {
        let keep = match d % 4 {
            1 => squarefree(d),
            0 => {
                let m = d / 4;
                (m % 4 == 2 || m % 4 == 3) && squarefree(m)
            }
            _ => false,
        };
        if keep {
            out.push(d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility_examples() {
        // (f=2, d=37): 2 inert (37 ≡ 5 mod 8 → (37/2) = −1), 2 ≡ 2 (3). ✓
        assert!(is_admissible(2, 37).unwrap());
        // (f=2, d=5): admissible though the multiplicity is 0.
        assert!(is_admissible(2, 5).unwrap());
        // (f=63 = 9·7, d=37): 7 ≡ 1 (3) splits ((37/7)=+1), e=2 allowed.
        assert!(is_admissible(63, 37).unwrap());
        // (f=3, d=37): 37 ≡ 1 (3) forbids e=1.
        assert!(!is_admissible(3, 37).unwrap());
    }

    #[test]
    fn conductor_counts() {
        // f=63, d=37: both parts split → s=2, n=0, t=1, e=2, w=1.
        let c = conductor(63, 37).unwrap();
        assert_eq!((c.e, c.t, c.s, c.n, c.w), (2, 1, 2, 0, 1));
        assert_eq!(c.restrictive_parts(), 2);
        // f=9, d=717 (717 ≡ 6 mod 9): irregular critical part, w=2.
        let c = conductor(9, 717).unwrap();
        assert_eq!((c.e, c.t, c.s, c.n, c.w), (2, 0, 0, 1, 2));
        // f=2, d=229: single inert prime.
        let c = conductor(2, 229).unwrap();
        assert_eq!((c.e, c.t, c.s, c.n, c.w), (0, 1, 0, 1, 0));
    }

    #[test]
    fn admissible_conductor_enumeration() {
        // d=37, bound 10⁵: includes 1, 2, 5, 9, 10, 45 (and 7, 14, …).
        let list: Vec<u64> = admissible_conductors(37, 100_000)
            .unwrap()
            .iter()
            .map(|c| c.f)
            .collect();
        for f in [1u64, 2, 5, 7, 9, 10, 45] {
            assert!(list.contains(&f), "missing f={f}");
        }
        assert!(!list.contains(&3));
        let c9 = conductor(9, 37).unwrap();
        assert_eq!(c9.s, 1, "3 splits for d ≡ 1 (mod 3)");

        // d=5, small bound: brute-force Def. 2.1 over f ≤ 9 gives {1, 2, 9}
        // (3 and 6 fail the e-condition since 5 ≡ 2 mod 3).
        let list: Vec<u64> = admissible_conductors(5, 500)
            .unwrap()
            .iter()
            .map(|c| c.f)
            .collect();
        assert_eq!(list, vec![1, 2, 9]);

        // d=229, bound 916: f ∈ {1, 2} (paper §4.1).
        let list: Vec<u64> = admissible_conductors(229, 916)
            .unwrap()
            .iter()
            .map(|c| c.f)
            .collect();
        assert_eq!(list, vec![1, 2]);
    }

    #[test]
    fn divisor_closure() {
        // Every admissible divisor of an enumerated conductor re-tests true.
        for d in [37i64, 229, 717, 733] {
            for c in admissible_conductors(d, 200_000).unwrap() {
                for div in c.admissible_divisors(d) {
                    assert!(is_admissible(div, d).unwrap(), "d={d} f={} c={div}", c.f);
                }
                assert_eq!(c.s + c.n, c.restrictive_parts());
            }
        }
    }

    #[test]
    fn split_examples() {
        assert_eq!(
            split_cubic_discriminant(148).unwrap(),
            Resolvent::S3 { d: 37, f: 2 }
        );
        assert_eq!(split_cubic_discriminant(3969).unwrap(), Resolvent::Cyclic { f: 63 });
        assert_eq!(
            split_cubic_discriminant(966_397).unwrap(),
            Resolvent::S3 { d: 2677, f: 19 }
        );
        assert_eq!(
            split_cubic_discriminant(229).unwrap(),
            Resolvent::S3 { d: 229, f: 1 }
        );
        assert!(split_cubic_discriminant(0).is_err());
    }
}
