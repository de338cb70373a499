//! Irreducible factorization over ℚ (Zassenhaus: modular factorization,
//! Hensel lifting, factor recombination) and over ℚ(i) (Trager's norm
//! method on top of the rational factorization).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Integer, Rational};

use super::field::Field;
use super::gauss::Gq;
use super::poly::Poly;

/// Coefficient field in which a characteristic polynomial is factored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Domain {
    Rationals,
    GaussianRationals,
}

impl Domain {
    pub fn of(coeffs: &[Gq]) -> Domain {
        if coeffs.iter().all(Gq::is_real) {
            Domain::Rationals
        } else {
            Domain::GaussianRationals
        }
    }
}

/// Monic irreducible factors with multiplicities, sorted by degree then by
/// coefficients so that the output is deterministic.
pub fn factor(f: &Poly<Gq>, domain: Domain) -> Vec<(Poly<Gq>, usize)> {
    let mut out = Vec::new();
    for (part, mult) in f.squarefree_decomposition() {
        let pieces = match domain {
            Domain::Rationals => {
                assert!(part.coeffs().iter().all(Gq::is_real), "rational factorization of a non-real polynomial");
                factor_squarefree_rational(&part)
            }
            Domain::GaussianRationals => factor_squarefree_gaussian(&part),
        };
        out.extend(pieces.into_iter().map(|p| (p, mult)));
    }
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.to_string().cmp(&b.0.to_string())));
    out
}

/// True when `f` is irreducible over `domain` (and non-constant).
pub fn is_irreducible(f: &Poly<Gq>, domain: Domain) -> bool {
    let fs = factor(f, domain);
    fs.len() == 1 && fs[0].1 == 1
}

fn factor_squarefree_gaussian(g: &Poly<Gq>) -> Vec<Poly<Gq>> {
    if g.degree() <= 1 {
        return vec![g.monic()];
    }
    for s in 0..64i64 {
        let shift = Gq::gauss(0, -s);
        let h = g.shift(&shift);
        let h_bar = h.map(Gq::conj);
        let norm = h.mul(&h_bar);
        if norm.gcd(&norm.derivative()).degree() > 0 {
            continue;
        }
        let mut out = Vec::new();
        for nj in factor_squarefree_rational(&norm) {
            let piece = h.gcd(&nj);
            if piece.degree() > 0 {
                out.push(piece.shift(&Gq::gauss(0, s)).monic());
            }
        }
        return out;
    }
    unreachable!("no square-free norm found for a square-free polynomial")
}

fn factor_squarefree_rational(f: &Poly<Gq>) -> Vec<Poly<Gq>> {
    if f.degree() <= 1 {
        return vec![f.monic()];
    }
    let z = primitive_integer(f);
    zassenhaus(&z).into_iter().map(|g| int_to_poly(&g).monic()).collect()
}

type ZPoly = Vec<Integer>;

fn trim(mut v: ZPoly) -> ZPoly {
    while v.last().is_some_and(|x| x.cmp0().is_eq()) {
        v.pop();
    }
    v
}

/// Clears denominators and content; leading coefficient made positive.
pub(crate) fn primitive_integer(f: &Poly<Gq>) -> ZPoly {
    let mut den = Integer::from(1);
    for c in f.coeffs() {
        den.lcm_mut(c.re.denom());
    }
    let mut z: ZPoly = f
        .coeffs()
        .iter()
        .map(|c| {
            let v = Rational::from(&c.re * &den);
            v.numer().clone()
        })
        .collect();
    let mut content = Integer::new();
    for c in &z {
        content.gcd_mut(c);
    }
    if content.cmp0().is_ne() {
        for c in z.iter_mut() {
            *c /= &content;
        }
    }
    if z.last().is_some_and(|x| x.cmp0().is_lt()) {
        for c in z.iter_mut() {
            *c = Integer::from(-&*c);
        }
    }
    trim(z)
}

fn int_to_poly(z: &[Integer]) -> Poly<Gq> {
    Poly::new(z.iter().map(|c| Gq::from(c.clone())).collect())
}

fn zmul(a: &[Integer], b: &[Integer]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Integer::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Integer::from(x * y);
        }
    }
    trim(out)
}

fn zreduce(a: &[Integer], m: &Integer) -> ZPoly {
    trim(a.iter().map(|x| Integer::from(x.modulo_ref(m))).collect())
}

fn zsymmetric(a: &[Integer], m: &Integer) -> ZPoly {
    let half = Integer::from(m >> 1);
    trim(
        a.iter()
            .map(|x| {
                let r = Integer::from(x.modulo_ref(m));
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn zadd(a: &[Integer], b: &[Integer]) -> ZPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let mut v = a.get(i).cloned().unwrap_or_default();
                if let Some(y) = b.get(i) {
                    v += y;
                }
                v
            })
            .collect(),
    )
}

fn zsub(a: &[Integer], b: &[Integer]) -> ZPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let mut v = a.get(i).cloned().unwrap_or_default();
                if let Some(y) = b.get(i) {
                    v -= y;
                }
                v
            })
            .collect(),
    )
}

/// Division by a monic polynomial modulo `m`.
fn zdivrem_monic(a: &[Integer], d: &[Integer], m: &Integer) -> (ZPoly, ZPoly) {
    let mut r = zreduce(a, m);
    let dd = d.len() - 1;
    if r.len() < d.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Integer::new(); r.len() - dd];
    for k in (0..q.len()).rev() {
        let coef = r[k + dd].clone();
        if coef.cmp0().is_eq() {
            continue;
        }
        for (j, dc) in d.iter().enumerate() {
            r[k + j] -= Integer::from(&coef * dc);
            r[k + j].modulo_mut(m);
        }
        q[k] = coef;
    }
    r.truncate(dd);
    (trim(q), trim(r))
}

/// Exact division over ℤ, `None` if `d` does not divide `a`.
fn zexact_div(a: &[Integer], d: &[Integer]) -> Option<ZPoly> {
    if d.is_empty() {
        return None;
    }
    let mut r: ZPoly = a.to_vec();
    if r.len() < d.len() {
        return r.is_empty().then(Vec::new);
    }
    let dd = d.len() - 1;
    let lc = &d[dd];
    let mut q = vec![Integer::new(); r.len() - dd];
    for k in (0..q.len()).rev() {
        if r[k + dd].cmp0().is_eq() {
            continue;
        }
        if !r[k + dd].is_divisible(lc) {
            return None;
        }
        let coef = Integer::from(r[k + dd].div_exact_ref(lc));
        for (j, dc) in d.iter().enumerate() {
            r[k + j] -= Integer::from(&coef * dc);
        }
        q[k] = coef;
    }
    r.iter().all(|x| x.cmp0().is_eq()).then(|| trim(q))
}

// ---------- arithmetic in F_p[x], p < 2^31 ----------

type PPoly = Vec<u64>;

fn ptrim(mut v: PPoly) -> PPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn pinv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> PPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    ptrim(out)
}

fn psub(a: &[u64], b: &[u64], p: u64) -> PPoly {
    let n = a.len().max(b.len());
    ptrim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p).collect())
}

fn pdivrem(a: &[u64], d: &[u64], p: u64) -> (PPoly, PPoly) {
    let mut r = a.to_vec();
    if r.len() < d.len() {
        return (Vec::new(), ptrim(r));
    }
    let dd = d.len() - 1;
    let inv = pinv(d[dd], p);
    let mut q = vec![0u64; r.len() - dd];
    for k in (0..q.len()).rev() {
        let coef = r[k + dd] * inv % p;
        if coef == 0 {
            continue;
        }
        for (j, &dc) in d.iter().enumerate() {
            r[k + j] = (r[k + j] + p - coef * dc % p) % p;
        }
        q[k] = coef;
    }
    r.truncate(dd);
    (ptrim(q), ptrim(r))
}

fn pmonic(a: &[u64], p: u64) -> PPoly {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let inv = pinv(l, p);
            a.iter().map(|&x| x * inv % p).collect()
        }
    }
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> PPoly {
    let (mut a, mut b) = (ptrim(a.to_vec()), ptrim(b.to_vec()));
    while !b.is_empty() {
        let r = pdivrem(&a, &b, p).1;
        a = b;
        b = r;
    }
    pmonic(&a, p)
}

/// `(g, s, t)` with `s a + t b = g` monic.
fn pxgcd(a: &[u64], b: &[u64], p: u64) -> (PPoly, PPoly, PPoly) {
    let (mut r0, mut r1) = (ptrim(a.to_vec()), ptrim(b.to_vec()));
    let (mut s0, mut s1): (PPoly, PPoly) = (vec![1], vec![]);
    let (mut t0, mut t1): (PPoly, PPoly) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = pdivrem(&r0, &r1, p);
        let s2 = psub(&s0, &pmul(&q, &s1, p), p);
        let t2 = psub(&t0, &pmul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    let inv = pinv(*r0.last().expect("nonzero gcd"), p);
    let sc = |v: &[u64]| ptrim(v.iter().map(|&x| x * inv % p).collect());
    (sc(&r0), sc(&s0), sc(&t0))
}

fn ppowmod(base: &[u64], e: &Integer, m: &[u64], p: u64) -> PPoly {
    let mut acc: PPoly = vec![1];
    let b = pdivrem(base, m, p).1;
    let bits = e.significant_bits();
    for i in (0..bits).rev() {
        acc = pdivrem(&pmul(&acc, &acc, p), m, p).1;
        if e.get_bit(i) {
            acc = pdivrem(&pmul(&acc, &b, p), m, p).1;
        }
    }
    pdivrem(&acc, m, p).1
}

fn pderiv(a: &[u64], p: u64) -> PPoly {
    ptrim(a.iter().enumerate().skip(1).map(|(i, &x)| (i as u64 % p) * x % p).collect())
}

fn reduce_mod_p(z: &[Integer], p: u64) -> PPoly {
    let pi = Integer::from(p);
    ptrim(z.iter().map(|c| Integer::from(c.modulo_ref(&pi)).to_u64().expect("small")).collect())
}

/// Distinct-degree then equal-degree (Cantor–Zassenhaus) factorization of a
/// monic square-free polynomial over F_p, p odd.
fn factor_mod_p(f: &[u64], p: u64, rng: &mut ChaCha8Rng) -> Vec<PPoly> {
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let x: PPoly = vec![0, 1];
    let mut h = x.clone();
    let pz = Integer::from(p);
    let mut d = 1usize;
    while rest.len() > 2 * d {
        h = ppowmod(&h, &pz, &rest, p);
        let g = pgcd(&rest, &psub(&h, &x, p), p);
        if g.len() > 1 {
            out.extend(equal_degree_split(&g, d, p, rng));
            rest = pdivrem(&rest, &g, p).0;
            h = pdivrem(&h, &rest, p).1;
        }
        d += 1;
    }
    if rest.len() > 1 {
        out.push(pmonic(&rest, p));
    }
    out
}

fn equal_degree_split(g: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<PPoly> {
    let n = g.len() - 1;
    if n == d {
        return vec![pmonic(g, p)];
    }
    let e = (Integer::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a: PPoly = ptrim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() < 2 {
            continue;
        }
        let b = psub(&ppowmod(&a, &e, g, p), &[1], p);
        let c = pgcd(g, &b, p);
        if c.len() > 1 && c.len() < g.len() {
            let other = pdivrem(g, &c, p).0;
            let mut out = equal_degree_split(&c, d, p, rng);
            out.extend(equal_degree_split(&other, d, p, rng));
            return out;
        }
    }
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
}

/// Factors a primitive square-free integer polynomial with positive leading
/// coefficient into irreducible primitive factors.
fn zassenhaus(f: &[Integer]) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    let lc = f[n].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);

    // pick the prime with the fewest modular factors among a few good ones
    let mut best: Option<(u64, Vec<PPoly>)> = None;
    let mut tried = 0;
    for p in small_primes().skip(2) {
        if Integer::from(lc.mod_u(p as u32)) == 0 {
            continue;
        }
        let fp = reduce_mod_p(f, p);
        if fp.len() != f.len() || pgcd(&fp, &pderiv(&fp, p), p).len() > 1 {
            continue;
        }
        let fac = factor_mod_p(&pmonic(&fp, p), p, &mut rng);
        if fac.len() == 1 {
            return vec![f.to_vec()];
        }
        if best.as_ref().is_none_or(|(_, b)| fac.len() < b.len()) {
            best = Some((p, fac));
        }
        tried += 1;
        if tried >= 5 {
            break;
        }
    }
    let (p, modular) = best.expect("a good prime exists");

    // Landau–Mignotte style bound on factor coefficients
    let norm2: Integer = f.iter().map(|c| Integer::from(c * c)).sum();
    let bound = (Integer::from(1) << n as u32) * (norm2.sqrt() + 1u32) * lc.clone().abs() * 2u32;
    let mut modulus = Integer::from(p);
    while modulus <= bound {
        modulus *= p;
    }
    let lifted = hensel_lift(f, &modular, p, &modulus);
    recombine(f, lifted, &modulus)
}

/// Lifts `f ≡ lc · ∏ factors (mod p)` to a factorization modulo `target`
/// (a power of `p`), returning monic lifted factors.
fn hensel_lift(f: &[Integer], factors: &[PPoly], p: u64, target: &Integer) -> Vec<ZPoly> {
    let r = factors.len();
    let to_z = |v: &PPoly| -> ZPoly { v.iter().map(|&x| Integer::from(x)).collect() };
    let lc = f.last().expect("nonzero").clone();
    if r == 1 {
        let inv = lc.invert_ref(target).map(Integer::from).expect("lc invertible mod p^k");
        let g: ZPoly = f.iter().map(|c| Integer::from(c * &inv)).collect();
        return vec![zreduce(&g, target)];
    }
    let (left, right) = factors.split_at(r / 2);
    let pp = |v: &[PPoly]| v.iter().fold(vec![1u64], |acc, x| pmul(&acc, x, p));
    let lcp = Integer::from(lc.modulo_ref(&Integer::from(p))).to_u64().expect("small");
    let g0: PPoly = pmul(&[lcp], &pp(left), p);
    let h0: PPoly = pp(right);
    let (_, s0, t0) = pxgcd(&g0, &h0, p);

    let (mut g, mut h, mut s, mut t) = (to_z(&g0), to_z(&h0), to_z(&s0), to_z(&t0));
    let mut m = Integer::from(p);
    while &m < target {
        let m2 = Integer::from(&m * &m);
        // one quadratic Hensel step modulo m^2
        let e = zreduce(&zsub(f, &zmul(&g, &h)), &m2);
        let (q, rr) = zdivrem_monic(&zmul(&s, &e), &h, &m2);
        let g_new = zreduce(&zadd(&zadd(&g, &zmul(&t, &e)), &zmul(&q, &g)), &m2);
        let h_new = zreduce(&zadd(&h, &rr), &m2);
        let b = zreduce(&zsub(&zadd(&zmul(&s, &g_new), &zmul(&t, &h_new)), &[Integer::from(1)]), &m2);
        let (c, d) = zdivrem_monic(&zmul(&s, &b), &h_new, &m2);
        s = zreduce(&zsub(&s, &d), &m2);
        t = zreduce(&zsub(&zsub(&t, &zmul(&t, &b)), &zmul(&c, &g_new)), &m2);
        g = g_new;
        h = h_new;
        m = m2;
    }
    let g = zreduce(&g, target);
    let h = zreduce(&h, target);
    let mut out = hensel_lift_from(&g, left, p, target, &lc);
    out.extend(hensel_lift_from(&h, right, p, target, &Integer::from(1)));
    out
}

fn hensel_lift_from(g: &[Integer], factors: &[PPoly], p: u64, target: &Integer, lc: &Integer) -> Vec<ZPoly> {
    // `g` already holds the lifted product with leading coefficient `lc` (mod target)
    let mut gg = g.to_vec();
    if let Some(last) = gg.last_mut() {
        *last = lc.clone();
    }
    hensel_lift(&gg, factors, p, target)
}

fn recombine(f: &[Integer], mut factors: Vec<ZPoly>, modulus: &Integer) -> Vec<ZPoly> {
    let mut result = Vec::new();
    let mut f = f.to_vec();
    let mut s = 1usize;
    while 2 * s <= factors.len() {
        let mut found = None;
        for subset in combinations(factors.len(), s) {
            let lc = f.last().expect("nonzero").clone();
            let mut g = vec![lc];
            for &i in &subset {
                g = zreduce(&zmul(&g, &factors[i]), modulus);
            }
            let g = primitive_part(zsymmetric(&g, modulus));
            if g.len() < 2 {
                continue;
            }
            if f[0].cmp0().is_ne() && (g[0].cmp0().is_eq() || !f[0].is_divisible(&g[0])) {
                continue;
            }
            if let Some(q) = zexact_div(&f, &g) {
                found = Some((subset, g, q));
                break;
            }
        }
        match found {
            Some((subset, g, q)) => {
                result.push(g);
                f = q;
                factors = factors.into_iter().enumerate().filter(|(i, _)| !subset.contains(i)).map(|(_, v)| v).collect();
            }
            None => s += 1,
        }
    }
    let f = primitive_part(f);
    if f.len() > 1 {
        result.push(f);
    }
    result
}

fn primitive_part(mut z: ZPoly) -> ZPoly {
    let mut content = Integer::new();
    for c in &z {
        content.gcd_mut(c);
    }
    if content.cmp0().is_ne() && content != 1 {
        for c in z.iter_mut() {
            *c /= &content;
        }
    }
    if z.last().is_some_and(|x| x.cmp0().is_lt()) {
        for c in z.iter_mut() {
            *c = Integer::from(-&*c);
        }
    }
    z
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Euler's totient.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            while n.is_multiple_of(d) {
                n /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The `n`-th cyclotomic polynomial over ℚ.
pub fn cyclotomic(n: u64) -> Poly<Gq> {
    let mut poly = Poly::monomial(Gq::one(), n as usize).sub(&Poly::one());
    for d in 1..n {
        if n.is_multiple_of(d) {
            poly = poly.exact_div(&cyclotomic(d)).expect("Φ_d divides x^n - 1");
        }
    }
    poly
}
