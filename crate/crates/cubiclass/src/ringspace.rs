//! 3-ring spaces V(f), defects δ(f), ring class ranks ρ_f, multiplicities,
//! and heterogeneous-multiplet signatures.
//!
//! A 3-virtual unit α (coprime to f) lies in the ring space V(f) iff its
//! image in (O_K/p^{v_p(f)})^× is a rational residue times a cube for every
//! prime p | f; the congruence α = r·s·κ³ with s ≡ 1 (mod f) glues from the
//! local conditions by CRT and weak approximation. Each local obstruction
//! group Ω_p = (O_K/p^v)^× / ⟨rationals, cubes⟩ is elementary 3-abelian of
//! rank 1 for a noncritical prime, and of rank w at the critical prime —
//! rank 2 exactly in the irregular case v₃(f) = 2, d ≡ 6 (mod 9).
//!
//! The defect δ(f) is the rank of the stacked images of the Selmer basis
//! {η, θ₁, …, θ_ρ}; the ring class rank is ρ_f = ρ + t + w − δ(f), and the
//! multiplicities follow by inclusion–exclusion over the divisor lattice:
//! Σ_{c|f} m(c²d) = ½(3^{ρ_f} − 1).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::admissibility::{conductor, Conductor, SplitKind};
use crate::arith::{pow_mod_u64, sqrt_mod_p};
use crate::quadfield::{QuadBasis, QuadElt, QuadraticField, VirtualUnit};
use crate::{Error, Result};

/// The image data of the Selmer basis in the obstruction group mod f.
#[derive(Debug, Clone)]
pub struct RingSpace {
    pub conductor: Conductor,
    /// One row per Selmer generator (η first, then the θs); entries are the
    /// F₃ coordinates of its image across all local factors of f.
    pub basis_image: Vec<Vec<u8>>,
    /// Codimension of V(f) in V: rank of `basis_image` over F₃.
    pub defect: u32,
}

impl RingSpace {
    /// Exponent vectors (over the Selmer basis) spanning V(f) — the kernel
    /// of the image matrix.
    pub fn kernel_basis(&self) -> Vec<Vec<u8>> {
        f3_kernel(&self.basis_image)
    }
}

/// Predicted multiplicity record for the formal discriminant f²·d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityRecord {
    pub d: i64,
    pub f: u64,
    pub rho_f: u32,
    pub m: u64,
}

fn elt_mod(e: &QuadElt, m: u64) -> (u64, u64) {
    let mb = BigInt::from(m);
    let u = ((&e.u % &mb) + &mb) % &mb;
    let v = ((&e.v % &mb) + &mb) % &mb;
    (u.to_u64().unwrap(), v.to_u64().unwrap())
}

/// φ at an inert noncritical prime q: dlog of α^{(q²−1)/3} in F_{q²}.
fn phi_inert(basis: &QuadBasis, q: u64, alpha: &QuadElt) -> Result<Vec<u8>> {
    let t0 = (basis.t0 as i128).rem_euclid(q as i128) as u64;
    let q0 = (basis.q0 as i128).rem_euclid(q as i128) as u64;
    let mul = |x: (u64, u64), y: (u64, u64)| -> (u64, u64) {
        // (s1+t1ω)(s2+t2ω) with ω² = q0 + t0ω, all mod q.
        let qq = q as u128;
        let vv = (x.1 as u128 * y.1 as u128) % qq;
        let s = (x.0 as u128 * y.0 as u128 + vv * q0 as u128) % qq;
        let t = (x.0 as u128 * y.1 as u128 + x.1 as u128 * y.0 as u128 + vv * t0 as u128) % qq;
        (s as u64, t as u64)
    };
    let pow = |mut b: (u64, u64), mut e: u64| -> (u64, u64) {
        let mut acc = (1u64, 0u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    let exp = (q * q - 1) / 3;
    // Fixed nontrivial cube root of unity ζ.
    let mut zeta = None;
    'search: for s in 0..q.min(12) {
        for t in 1..q.min(12) {
            let cand = pow((s, t), exp);
            if cand != (1, 0) {
                zeta = Some(cand);
                break 'search;
            }
        }
    }
    let zeta = zeta.ok_or_else(|| Error::Inconsistent(format!("no ζ in F_{{{q}²}}")))?;
    let a = elt_mod(alpha, q);
    if a == (0, 0) {
        return Err(Error::Inconsistent(format!("α not coprime to inert {q}")));
    }
    let val = pow(a, exp);
    let z2 = mul(zeta, zeta);
    let coord = if val == (1, 0) {
        0
    } else if val == zeta {
        1
    } else if val == z2 {
        2
    } else {
        return Err(Error::Inconsistent(format!("α^((q²−1)/3) not in μ₃ at q={q}")));
    };
    Ok(vec![coord])
}

/// φ at a split noncritical prime ℓ: dlog of (α₁/α₂)^{(ℓ−1)/3} in F_ℓ.
fn phi_split(basis: &QuadBasis, l: u64, alpha: &QuadElt) -> Result<Vec<u8>> {
    let d = basis.d;
    let r = sqrt_mod_p((d as i128).rem_euclid(l as i128) as u64, l)
        .ok_or_else(|| Error::Inconsistent(format!("{l} not split for d={d}")))?;
    // Roots of ω: y± = (t0 ± r)/2 mod ℓ.
    let inv2 = pow_mod_u64(2, l - 2, l);
    let t0 = (basis.t0 as u64) % l;
    let y1 = (t0 + r) % l * inv2 % l;
    let y2 = (t0 + l - r % l) % l * inv2 % l;
    let (u, v) = elt_mod(alpha, l);
    let a1 = (u + v * y1) % l;
    let a2 = (u + v * y2) % l;
    if a1 == 0 || a2 == 0 {
        return Err(Error::Inconsistent(format!("α not coprime to split {l}")));
    }
    let ratio = a1 * pow_mod_u64(a2, l - 2, l) % l;
    let exp = (l - 1) / 3;
    let val = pow_mod_u64(ratio, exp, l);
    // Fixed primitive cube root mod ℓ.
    let mut zeta = 0u64;
    for g in 2..l {
        let z = pow_mod_u64(g, exp, l);
        if z != 1 {
            zeta = z;
            break;
        }
    }
    let coord = if val == 1 {
        0
    } else if val == zeta {
        1
    } else if val == zeta * zeta % l {
        2
    } else {
        return Err(Error::Inconsistent(format!("cubic character failure at ℓ={l}")));
    };
    Ok(vec![coord])
}

/// The obstruction map at the critical prime: (O_K/3^e)^× modulo rationals
/// and cubes, with coset discrete logs built by brute enumeration (≤ 81
/// residues). Returns the per-element map and the rank (which must match w).
struct CriticalMap {
    modulus: u64,
    rank: u32,
    /// coset id per unit (u,v), linearized as u·m + v; usize::MAX = non-unit.
    coord_of: Vec<[u8; 2]>,
    valid: Vec<bool>,
}

impl CriticalMap {
    fn build(basis: &QuadBasis, e: u32, expected_w: u32) -> Result<CriticalMap> {
        let m = 3u64.pow(e);
        let idx = |u: u64, v: u64| (u * m + v) as usize;
        let t0 = (basis.t0 as i128).rem_euclid(m as i128) as u64;
        let q0 = (basis.q0 as i128).rem_euclid(m as i128) as u64;
        let mul = |x: (u64, u64), y: (u64, u64)| -> (u64, u64) {
            let vv = x.1 * y.1 % m;
            ((x.0 * y.0 + vv * q0) % m, (x.0 * y.1 + x.1 * y.0 + vv * t0) % m)
        };
        // Units: norm not ≡ 0 mod 3.
        let norm3 = |u: u64, v: u64| -> u64 {
            let t0n = (basis.t0 as i128).rem_euclid(3) as u64;
            let q0n = (basis.q0 as i128).rem_euclid(3) as u64;
            (u * u + t0n * u * v % 3 + (3 - q0n % 3) % 3 * (v * v % 3)) % 3
        };
        let mut units: Vec<(u64, u64)> = Vec::new();
        for u in 0..m {
            for v in 0..m {
                if norm3(u % 3, v % 3) != 0 {
                    units.push((u, v));
                }
            }
        }
        // Subgroup H = ⟨rational units, cubes⟩, grown to closure.
        let mut in_h = vec![false; (m * m) as usize];
        let mut h: Vec<(u64, u64)> = Vec::new();
        let push = |x: (u64, u64), in_h: &mut Vec<bool>, h: &mut Vec<(u64, u64)>| {
            if !in_h[idx(x.0, x.1)] {
                in_h[idx(x.0, x.1)] = true;
                h.push(x);
            }
        };
        for r in 1..m {
            if r % 3 != 0 {
                push((r, 0), &mut in_h, &mut h);
            }
        }
        for &x in &units {
            let c = mul(mul(x, x), x);
            push(c, &mut in_h, &mut h);
        }
        // Closure under multiplication.
        let mut i = 0;
        while i < h.len() {
            let a = h[i];
            for j in 0..h.len() {
                let p = mul(a, h[j]);
                push(p, &mut in_h, &mut h);
            }
            i += 1;
        }
        let quotient = units.len() / h.len();
        let rank = match quotient {
            1 => 0u32,
            3 => 1,
            9 => 2,
            _ => {
                return Err(Error::Inconsistent(format!(
                    "critical obstruction at 3^{e} has size {quotient}"
                )))
            }
        };
        if rank != expected_w {
            return Err(Error::Inconsistent(format!(
                "critical rank {rank} ≠ w={expected_w} at 3^{e}, d={}",
                basis.d
            )));
        }
        // Coset coordinates via successive generators.
        let mut coord_of = vec![[0u8; 2]; (m * m) as usize];
        let mut valid = vec![false; (m * m) as usize];
        for &(u, v) in &h {
            valid[idx(u, v)] = true;
        }
        let mut assigned: Vec<(u64, u64, [u8; 2])> = h.iter().map(|&x| (x.0, x.1, [0, 0])).collect();
        for dim in 0..rank as usize {
            // First unassigned unit is the new generator.
            let g = *units
                .iter()
                .find(|&&(u, v)| !valid[idx(u, v)])
                .expect("quotient not exhausted");
            let snapshot = assigned.clone();
            for mult in 1..=2u8 {
                let gm = if mult == 1 { g } else { mul(g, g) };
                for &(u, v, c) in &snapshot {
                    let p = mul(gm, (u, v));
                    let mut c2 = c;
                    c2[dim] = mult;
                    if !valid[idx(p.0, p.1)] {
                        valid[idx(p.0, p.1)] = true;
                        coord_of[idx(p.0, p.1)] = c2;
                        assigned.push((p.0, p.1, c2));
                    }
                }
            }
        }
        if assigned.len() != units.len() {
            return Err(Error::Inconsistent("critical coset table incomplete".into()));
        }
        for (u, v, c) in assigned {
            coord_of[idx(u, v)] = c;
        }
        Ok(CriticalMap { modulus: m, rank, coord_of, valid })
    }

    fn phi(&self, alpha: &QuadElt) -> Result<Vec<u8>> {
        let (u, v) = elt_mod(alpha, self.modulus);
        let i = (u * self.modulus + v) as usize;
        if !self.valid[i] {
            return Err(Error::Inconsistent("α not coprime to 3".into()));
        }
        Ok(self.coord_of[i][..self.rank as usize].to_vec())
    }
}

/// Gaussian elimination rank over F₃.
pub fn f3_rank(rows: &[Vec<u8>]) -> u32 {
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let cols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut rank = 0usize;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, pivot);
        let inv = if m[rank][c] == 1 { 1 } else { 2 };
        for x in m[rank].iter_mut() {
            *x = (*x * inv) % 3;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let factor = m[r][c];
                for cc in 0..cols {
                    m[r][cc] = (m[r][cc] + (3 - factor) * m[rank][cc]) % 3;
                }
            }
        }
        rank += 1;
    }
    rank as u32
}

/// Kernel basis of the row-space map v ↦ v·M over F₃ (v over the rows).
pub fn f3_kernel(rows: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let n = rows.len();
    if n == 0 {
        return vec![];
    }
    // Solve vᵀ·rows = 0 by eliminating the transposed matrix.
    let cols = rows[0].len();
    let mut m: Vec<Vec<u8>> = (0..cols).map(|c| (0..n).map(|r| rows[r][c]).collect()).collect();
    // Row-reduce m (cols×n); kernel of x ↦ m·x.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0usize;
    for c in 0..n {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        let inv = if m[rank][c] == 1 { 1 } else { 2 };
        for x in m[rank].iter_mut() {
            *x = (*x * inv) % 3;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for cc in 0..n {
                    m[r][cc] = (m[r][cc] + (3 - f) * m[rank][cc]) % 3;
                }
            }
        }
        pivots.push((rank, c));
        rank += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![0u8; n];
        v[free] = 1;
        for &(r, c) in &pivots {
            // x_c = −m[r][free]·x_free
            v[c] = (3 - m[r][free]) % 3 * 1 % 3;
        }
        basis.push(v);
    }
    basis
}

/// Per-discriminant cache of Selmer generators and derived ring-space data.
pub struct RingSpaceEngine<'a> {
    pub field: &'a QuadraticField,
    selmer: Vec<VirtualUnit>,
    /// φ-vectors per (prime-part, generator), keyed by the part modulus.
    part_cache: HashMap<u64, Vec<Vec<u8>>>,
    critical_cache: HashMap<u32, Vec<Vec<u8>>>,
}

impl<'a> RingSpaceEngine<'a> {
    pub fn new(field: &'a QuadraticField) -> Result<RingSpaceEngine<'a>> {
        let selmer = field.virtual_units(&[])?;
        Ok(RingSpaceEngine { field, selmer, part_cache: HashMap::new(), critical_cache: HashMap::new() })
    }

    pub fn selmer_generators(&self) -> &[VirtualUnit] {
        &self.selmer
    }

    /// Image rows of the Selmer basis at a single noncritical prime q.
    fn part_rows(&mut self, q: u64, kind: SplitKind) -> Result<Vec<Vec<u8>>> {
        if let Some(rows) = self.part_cache.get(&q) {
            return Ok(rows.clone());
        }
        let basis = &self.field.basis;
        let mut rows = Vec::with_capacity(self.selmer.len());
        for gen in &self.selmer_compatible(q)? {
            let row = match kind {
                SplitKind::Split => phi_split(basis, q, gen)?,
                SplitKind::NonSplit => phi_inert(basis, q, gen)?,
            };
            rows.push(row);
        }
        self.part_cache.insert(q, rows.clone());
        Ok(rows)
    }

    /// The Selmer generators with representatives coprime to q, re-choosing
    /// the θ whose supporting ideal collides with q.
    fn selmer_compatible(&self, q: u64) -> Result<Vec<QuadElt>> {
        let mut out = Vec::with_capacity(self.selmer.len());
        for gen in &self.selmer {
            let collides = gen
                .cube_root_ideal
                .map(|j| (j.a as u64) % q == 0)
                .unwrap_or(false);
            if !collides {
                out.push(gen.element.clone());
            } else {
                let j = gen.cube_root_ideal.unwrap();
                let class = self.field.class_of(j);
                let j2 = self.field.ideal_in_class(class, &[q])?;
                let j3 = self.field.compose(self.field.compose(j2, j2), j2);
                let theta = self
                    .field
                    .principal_generator(j3)
                    .ok_or_else(|| Error::Inconsistent("re-chosen j³ not principal".into()))?;
                out.push(theta);
            }
        }
        Ok(out)
    }

    fn critical_rows(&mut self, e: u32, expected_w: u32) -> Result<Vec<Vec<u8>>> {
        if let Some(rows) = self.critical_cache.get(&e) {
            return Ok(rows.clone());
        }
        let map = CriticalMap::build(&self.field.basis, e, expected_w)?;
        let mut rows = Vec::with_capacity(self.selmer.len());
        for gen in &self.selmer {
            rows.push(map.phi(&gen.element)?);
        }
        self.critical_cache.insert(e, rows.clone());
        Ok(rows)
    }

    /// The ring space mod f: stacked Selmer images and their rank.
    pub fn ring_space(&mut self, cond: &Conductor) -> Result<RingSpace> {
        let ngen = self.selmer.len();
        let mut rows: Vec<Vec<u8>> = vec![vec![]; ngen];
        for (part, kind) in cond.parts() {
            let part_rows = if part % 3 == 0 {
                self.critical_rows(cond.e, cond.w)?
            } else {
                self.part_rows(part, kind)?
            };
            for (row, pr) in rows.iter_mut().zip(part_rows) {
                row.extend(pr);
            }
        }
        let defect = f3_rank(&rows);
        Ok(RingSpace { conductor: cond.clone(), basis_image: rows, defect })
    }

    pub fn defect(&mut self, f: u64) -> Result<u32> {
        let cond = conductor(f, self.field.d)?;
        Ok(self.ring_space(&cond)?.defect)
    }

    /// Ring class rank ρ_f = ρ + t + w − δ(f).
    pub fn ring_class_rank(&mut self, cond: &Conductor) -> Result<u32> {
        let delta = self.ring_space(cond)?.defect;
        let raw = self.field.rho3 + cond.t + cond.w;
        if delta > raw {
            return Err(Error::Inconsistent(format!(
                "δ(f) = {delta} exceeds ρ+t+w = {raw} for d={}, f={}",
                self.field.d, cond.f
            )));
        }
        Ok(raw - delta)
    }

    /// Multiplicity of the formal discriminant f²·d by inclusion–exclusion.
    pub fn multiplicity(&mut self, cond: &Conductor) -> Result<MultiplicityRecord> {
        let mut memo: HashMap<u64, u64> = HashMap::new();
        let m = self.multiplicity_memo(cond, &mut memo)?;
        let rho_f = self.ring_class_rank(cond)?;
        Ok(MultiplicityRecord { d: self.field.d, f: cond.f, rho_f, m })
    }

    fn multiplicity_memo(&mut self, cond: &Conductor, memo: &mut HashMap<u64, u64>) -> Result<u64> {
        if let Some(&m) = memo.get(&cond.f) {
            return Ok(m);
        }
        let rho_f = self.ring_class_rank(cond)?;
        let total = (3u64.pow(rho_f) - 1) / 2;
        let mut below = 0u64;
        for c in cond.admissible_divisors(self.field.d) {
            if c == cond.f {
                continue;
            }
            let sub = conductor(c, self.field.d)?;
            below += self.multiplicity_memo(&sub, memo)?;
        }
        if below > total {
            return Err(Error::Inconsistent(format!(
                "negative multiplicity at d={}, f={}: Σ={total}, below={below}",
                self.field.d, cond.f
            )));
        }
        let m = total - below;
        memo.insert(cond.f, m);
        Ok(m)
    }

    /// Signature of the heterogeneous multiplet: (c, m(c²d)) over admissible
    /// divisors of f, ordered by (number of prime parts, c).
    pub fn hetero_signature(&mut self, cond: &Conductor) -> Result<Vec<(u64, u64)>> {
        let mut memo = HashMap::new();
        let mut out = Vec::new();
        for c in cond.admissible_divisors(self.field.d) {
            let sub = conductor(c, self.field.d)?;
            let m = self.multiplicity_memo(&sub, &mut memo)?;
            out.push((c, m));
        }
        out.sort_by_key(|&(c, _)| {
            let parts = crate::arith::factor(c as i128).map(|f| f.omega()).unwrap_or(0);
            (parts, c)
        });
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SpfSieve;

    fn engine_for(d: i64, sieve: &SpfSieve) -> QuadraticField {
        QuadraticField::new(d, sieve).unwrap()
    }

    #[test]
    fn defect_paper_examples() {
        let sieve = SpfSieve::new(30_000);
        // d=229, f=2: δ(2)=1 (paper §4.1: M_{916} is a nilet).
        let k = engine_for(229, &sieve);
        let mut eng = RingSpaceEngine::new(&k).unwrap();
        assert_eq!(eng.defect(2).unwrap(), 1);
        // d=37, f=2: δ=0 (singlet at 148).
        let k = engine_for(37, &sieve);
        let mut eng = RingSpaceEngine::new(&k).unwrap();
        assert_eq!(eng.defect(2).unwrap(), 0);
        // d=733, f=10: δ(10)=2 (paper Example 6.3: total nilet).
        let k = engine_for(733, &sieve);
        let mut eng = RingSpaceEngine::new(&k).unwrap();
        assert_eq!(eng.defect(10).unwrap(), 2);
    }

    #[test]
    fn multiplicity_paper_examples() {
        let sieve = SpfSieve::new(30_000);
        let cases: &[(i64, u64, u64)] = &[
            (37, 2, 1),   // singlet at 148
            (5, 2, 0),    // nilet at 20
            (7053, 2, 3), // triplet at 28212
            (717, 9, 3),  // triplet at 58077 …
            (717, 3, 1),  // … with m=1 at c=3
        ];
        for &(d, f, want) in cases {
            let k = engine_for(d, &sieve);
            let mut eng = RingSpaceEngine::new(&k).unwrap();
            let cond = conductor(f, d).unwrap();
            let rec = eng.multiplicity(&cond).unwrap();
            assert_eq!(rec.m, want, "m({f}²·{d})");
        }
    }

    #[test]
    fn unramified_multiplicity_formula() {
        // f=1: m = (3^ρ − 1)/2.
        let sieve = SpfSieve::new(30_000);
        for (d, want) in [(5i64, 0u64), (229, 1), (32009, 4)] {
            let k = engine_for(d, &sieve);
            let mut eng = RingSpaceEngine::new(&k).unwrap();
            let cond = conductor(1, d).unwrap();
            assert_eq!(eng.multiplicity(&cond).unwrap().m, want, "d={d}");
        }
    }

    #[test]
    fn hetero_signature_examples() {
        let sieve = SpfSieve::new(30_000);
        // d=37, f=70: divisors (1;2,5,7;10,14,35;70), m = [0;1,0,0;0,0,1;2].
        let k = engine_for(37, &sieve);
        let mut eng = RingSpaceEngine::new(&k).unwrap();
        let cond = conductor(70, 37).unwrap();
        let sig = eng.hetero_signature(&cond).unwrap();
        let expected: Vec<(u64, u64)> = vec![
            (1, 0),
            (2, 1),
            (5, 0),
            (7, 0),
            (10, 0),
            (14, 0),
            (35, 1),
            (70, 2),
        ];
        assert_eq!(sig, expected);
        // d=733, f=10: total ramified nilet (1,0),(2,0),(5,0),(10,0) with ρ=1.
        let k = engine_for(733, &sieve);
        let mut eng = RingSpaceEngine::new(&k).unwrap();
        let sig = eng.hetero_signature(&conductor(10, 733).unwrap()).unwrap();
        assert_eq!(sig, vec![(1, 1), (2, 0), (5, 0), (10, 0)]);
        // d=3173, f=10: (1,1),(2,0),(5,0),(10,3).
        let k = engine_for(3173, &sieve);
        let mut eng = RingSpaceEngine::new(&k).unwrap();
        let sig = eng.hetero_signature(&conductor(10, 3173).unwrap()).unwrap();
        assert_eq!(sig, vec![(1, 1), (2, 0), (5, 0), (10, 3)]);
    }

    #[test]
    fn defect_monotone_under_divisibility() {
        let sieve = SpfSieve::new(30_000);
        for d in [37i64, 229, 733, 3173, 717] {
            let k = engine_for(d, &sieve);
            let mut eng = RingSpaceEngine::new(&k).unwrap();
            for cond in crate::admissibility::admissible_conductors(d, 500_000).unwrap() {
                let df = eng.defect(cond.f).unwrap();
                for c in cond.admissible_divisors(d) {
                    let dc = eng.defect(c).unwrap();
                    assert!(dc <= df, "monotonicity violated: d={d}, {c} | {}", cond.f);
                }
            }
        }
    }
}
