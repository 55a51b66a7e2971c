//! Finite root systems from Cartan matrices.
//!
//! Roots and weights are integer vectors in simple-root coordinates. The
//! bilinear form is `(α_i, α_j) = d_i A_ij` with the minimal symmetrizer, so
//! short roots have norm 2 and every pairing the algorithms need is an
//! integer.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalars::{AffineExponent, MAX_RANK};

pub type Root = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootSystem {
    pub name: String,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub sym: Vec<i64>,
    /// Sorted by height, then lexicographically.
    pub positive_roots: Vec<Root>,
    /// `2ρ` in simple-root coordinates.
    pub two_rho: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    F4,
    G2,
}

impl FromStr for CartanType {
    type Err = Error;
    fn from_str(s: &str) -> Result<CartanType> {
        let bad = || Error::Unsupported(format!("unknown Cartan type `{s}`"));
        let s = s.trim();
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        let t = match (letter, n) {
            ('A', 1..=4) => CartanType::A(n),
            ('B', 2..=4) => CartanType::B(n),
            ('C', 2..=4) => CartanType::C(n),
            ('D', 4) => CartanType::D(4),
            ('F', 4) => CartanType::F4,
            ('G', 2) => CartanType::G2,
            _ => return Err(bad()),
        };
        Ok(t)
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanType::A(n) => write!(f, "A{n}"),
            CartanType::B(n) => write!(f, "B{n}"),
            CartanType::C(n) => write!(f, "C{n}"),
            CartanType::D(n) => write!(f, "D{n}"),
            CartanType::F4 => write!(f, "F4"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

impl CartanType {
    /// Bourbaki numbering; `A_ij = 2(α_i, α_j)/(α_i, α_i)`.
    pub fn cartan_matrix(self) -> Vec<Vec<i64>> {
        let chain = |n: usize| {
            let mut a = vec![vec![0i64; n]; n];
            for i in 0..n {
                a[i][i] = 2;
                if i + 1 < n {
                    a[i][i + 1] = -1;
                    a[i + 1][i] = -1;
                }
            }
            a
        };
        match self {
            CartanType::A(n) => chain(n),
            CartanType::B(n) => {
                let mut a = chain(n);
                a[n - 1][n - 2] = -2;
                a
            }
            CartanType::C(n) => {
                let mut a = chain(n);
                a[n - 2][n - 1] = -2;
                a
            }
            CartanType::D(n) => {
                let mut a = chain(n);
                a[n - 2][n - 1] = 0;
                a[n - 1][n - 2] = 0;
                a[n - 3][n - 1] = -1;
                a[n - 1][n - 3] = -1;
                a
            }
            CartanType::F4 => {
                let mut a = chain(4);
                a[1][2] = -2;
                a
            }
            CartanType::G2 => vec![vec![2, -3], vec![-1, 2]],
        }
    }
}

impl RootSystem {
    pub fn of_type(t: CartanType) -> RootSystem {
        let mut rs = RootSystem::from_cartan(&t.cartan_matrix()).expect("built-in Cartan matrix is valid");
        rs.name = t.to_string();
        rs
    }

    pub fn parse(name: &str) -> Result<RootSystem> {
        Ok(RootSystem::of_type(name.parse()?))
    }

    pub fn from_cartan(cartan: &[Vec<i64>]) -> Result<RootSystem> {
        let r = cartan.len();
        if r == 0 || r > MAX_RANK {
            return Err(Error::InvalidCartan(format!("rank {r} outside 1..={MAX_RANK}")));
        }
        for (i, row) in cartan.iter().enumerate() {
            if row.len() != r {
                return Err(Error::InvalidCartan("matrix is not square".into()));
            }
            for (j, &a) in row.iter().enumerate() {
                if i == j && a != 2 {
                    return Err(Error::InvalidCartan(format!("diagonal entry ({i},{j}) is {a}")));
                }
                if i != j && (a > 0 || (a == 0) != (cartan[j][i] == 0)) {
                    return Err(Error::InvalidCartan(format!("bad off-diagonal entry ({i},{j})")));
                }
            }
        }
        let sym = symmetrizer(cartan)?;
        let mut rs = RootSystem {
            name: String::new(),
            rank: r,
            cartan: cartan.to_vec(),
            sym,
            positive_roots: Vec::new(),
            two_rho: vec![0; r],
        };
        rs.check_positive_definite()?;
        rs.positive_roots = rs.reflection_closure()?;
        for root in &rs.positive_roots {
            for (t, c) in rs.two_rho.iter_mut().zip(root) {
                *t += c;
            }
        }
        for i in 0..r {
            let e = rs.simple(i);
            if rs.form(&rs.two_rho, &e) != rs.form(&e, &e) {
                return Err(Error::InvalidCartan("Weyl vector check failed".into()));
            }
        }
        Ok(rs)
    }

    pub fn simple(&self, i: usize) -> Root {
        let mut v = vec![0; self.rank];
        v[i] = 1;
        v
    }

    pub fn simple_roots(&self) -> Vec<Root> {
        (0..self.rank).map(|i| self.simple(i)).collect()
    }

    /// `(a, b)` for `a, b ∈ Γ`.
    pub fn form(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..self.rank {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                s += a[i] * b[j] * self.sym[i] * self.cartan[i][j];
            }
        }
        s
    }

    pub fn norm2(&self, a: &[i64]) -> i64 {
        self.form(a, a)
    }

    /// `(ρ, μ)`; an integer under the chosen normalization.
    pub fn rho_pairing(&self, mu: &[i64]) -> i64 {
        let twice = self.form(&self.two_rho, mu);
        debug_assert!(twice % 2 == 0);
        twice / 2
    }

    /// `(μ, ρ) - ||μ||²/2`.
    pub fn eta_scalar(&self, mu: &[i64]) -> i64 {
        let n = self.norm2(mu);
        debug_assert!(n % 2 == 0);
        self.rho_pairing(mu) - n / 2
    }

    /// `η_μ` evaluated at weight `w`.
    pub fn eta(&self, mu: &[i64], w: &Weight) -> AffineExponent {
        w.pair_root(self, mu) + AffineExponent::constant(self.eta_scalar(mu))
    }

    pub fn height(mu: &[i64]) -> i64 {
        mu.iter().sum()
    }

    pub fn coroot_pairing(&self, beta: &[i64], i: usize) -> i64 {
        (0..self.rank).map(|j| beta[j] * self.cartan[i][j]).sum()
    }

    pub fn reflect(&self, beta: &[i64], i: usize) -> Root {
        let c = self.coroot_pairing(beta, i);
        let mut out = beta.to_vec();
        out[i] -= c;
        out
    }

    /// `(ω_k, α_i) = δ_ik d_i` as numeric pairings.
    pub fn fundamental(&self, k: usize) -> Vec<i64> {
        let mut p = vec![0; self.rank];
        p[k] = self.sym[k];
        p
    }

    /// Pairings `(Λ, α_i)` of the weight with Dynkin labels `labels`.
    pub fn weight_from_labels(&self, labels: &[i64]) -> Result<Vec<i64>> {
        if labels.len() != self.rank {
            return Err(Error::InvalidWeight(format!("expected {} labels", self.rank)));
        }
        Ok(labels.iter().zip(&self.sym).map(|(l, d)| l * d).collect())
    }

    /// Dynkin labels of a numeric weight given by its pairings.
    pub fn labels(&self, pairings: &[i64]) -> Result<Vec<i64>> {
        pairings
            .iter()
            .zip(&self.sym)
            .map(
                |(p, d)| {
                    if p % d == 0 {
                        Ok(p / d)
                    } else {
                        Err(Error::InvalidWeight("weight is not integral".into()))
                    }
                },
            )
            .collect()
    }

    fn check_positive_definite(&self) -> Result<()> {
        // Leading principal minors of the symmetrized matrix, exactly.
        let r = self.rank;
        let b: Vec<Vec<i128>> =
            (0..r).map(|i| (0..r).map(|j| (self.sym[i] * self.cartan[i][j]) as i128).collect()).collect();
        for k in 1..=r {
            let mut m: Vec<Vec<i128>> = b[..k].iter().map(|row| row[..k].to_vec()).collect();
            let mut prev = 1i128;
            for p in 0..k {
                if m[p][p] == 0 {
                    return Err(Error::InvalidCartan("not of finite type".into()));
                }
                for i in p + 1..k {
                    for j in p + 1..k {
                        m[i][j] = (m[i][j] * m[p][p] - m[i][p] * m[p][j]) / prev;
                    }
                }
                prev = m[p][p];
            }
            if prev <= 0 {
                return Err(Error::InvalidCartan("not of finite type".into()));
            }
        }
        Ok(())
    }

    fn reflection_closure(&self) -> Result<Vec<Root>> {
        let mut seen: BTreeSet<Root> = BTreeSet::new();
        let mut queue: VecDeque<Root> = self.simple_roots().into();
        while let Some(b) = queue.pop_front() {
            if !seen.insert(b.clone()) {
                continue;
            }
            if seen.len() > 1000 {
                return Err(Error::InvalidCartan("reflection closure does not terminate".into()));
            }
            for i in 0..self.rank {
                let c = self.reflect(&b, i);
                if !seen.contains(&c) {
                    queue.push_back(c);
                }
            }
        }
        let mut pos: Vec<Root> = seen.into_iter().filter(|b| b.iter().all(|&c| c >= 0)).collect();
        pos.sort_by_key(|b| (RootSystem::height(b), b.clone()));
        Ok(pos)
    }
}

fn symmetrizer(a: &[Vec<i64>]) -> Result<Vec<i64>> {
    use num_integer::Integer;
    use num_rational::Rational64;
    let r = a.len();
    let mut d: Vec<Option<Rational64>> = vec![None; r];
    for start in 0..r {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Rational64::from_integer(1));
        let mut component = vec![start];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..r {
                if i == j || a[i][j] == 0 {
                    continue;
                }
                // d_i a_ij = d_j a_ji
                let dj = d[i].unwrap() * Rational64::new(a[i][j], a[j][i]);
                match d[j] {
                    None => {
                        d[j] = Some(dj);
                        component.push(j);
                        stack.push(j);
                    }
                    Some(x) if x != dj => return Err(Error::InvalidCartan("not symmetrizable".into())),
                    Some(_) => {}
                }
            }
        }
        // Scale the component to minimal positive integers.
        let den = component.iter().fold(1i64, |acc, &i| acc.lcm(d[i].unwrap().denom()));
        let ints: Vec<i64> = component.iter().map(|&i| (d[i].unwrap() * den).to_integer()).collect();
        let g = ints.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        for (&i, &v) in component.iter().zip(&ints) {
            d[i] = Some(Rational64::from_integer(v / g));
        }
    }
    Ok(d.into_iter().map(|x| x.unwrap().to_integer()).collect())
}

/// A weight `t·λ + Λ + offset`: `t` multiplies the generic weight, `Λ` is a
/// numeric weight given by its pairings with the simple roots, and `offset`
/// lies in the root lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Weight {
    pub lambda: i64,
    pub numeric: Vec<i64>,
    pub offset: Vec<i64>,
}

impl Weight {
    pub fn lattice(offset: Vec<i64>) -> Weight {
        let r = offset.len();
        Weight { lambda: 0, numeric: vec![0; r], offset }
    }

    pub fn has_base(&self) -> bool {
        self.lambda != 0 || self.numeric.iter().any(|&x| x != 0)
    }

    pub fn shifted(&self, delta: &[i64]) -> Weight {
        let mut w = self.clone();
        for (o, d) in w.offset.iter_mut().zip(delta) {
            *o += d;
        }
        w
    }

    /// `(w, μ)` for `μ ∈ Γ`.
    pub fn pair_root(&self, rs: &RootSystem, mu: &[i64]) -> AffineExponent {
        let mut lambda = [0i64; MAX_RANK];
        let mut c = rs.form(&self.offset, mu);
        for i in 0..rs.rank {
            lambda[i] = self.lambda * mu[i];
            c += self.numeric[i] * mu[i];
        }
        AffineExponent { constant: c, lambda }
    }

    /// Bilinear pairing; at most one side may carry a non-lattice part.
    pub fn pairing(&self, rs: &RootSystem, other: &Weight) -> Result<AffineExponent> {
        match (self.has_base(), other.has_base()) {
            (true, true) => Err(Error::Unsupported("pairing of two weights with non-lattice parts".into())),
            (false, _) => Ok(other.pair_root(rs, &self.offset)),
            (true, false) => Ok(self.pair_root(rs, &other.offset)),
        }
    }
}

/// Number of ways to write `nu` as a sum of positive roots.
pub fn kostant_partitions(rs: &RootSystem, nu: &[i64]) -> u64 {
    fn go(roots: &[Root], idx: usize, rest: &mut Vec<i64>) -> u64 {
        if rest.iter().all(|&x| x == 0) {
            return 1;
        }
        if idx == roots.len() {
            return 0;
        }
        let mut total = go(roots, idx + 1, rest);
        let root = &roots[idx];
        let mut k = 0;
        loop {
            if rest.iter().zip(root).any(|(r, c)| r < c) {
                break;
            }
            for (r, c) in rest.iter_mut().zip(root) {
                *r -= c;
            }
            k += 1;
            total += go(roots, idx + 1, rest);
        }
        for (r, c) in rest.iter_mut().zip(root) {
            *r += c * k;
        }
        total
    }
    go(&rs.positive_roots, 0, &mut nu.to_vec())
}

/// All `ν ∈ Γ⁺` with height at most `cutoff`, by height then lexicographically.
pub fn weights_up_to(rank: usize, cutoff: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for h in 0..=cutoff as i64 {
        let mut level = Vec::new();
        compositions(rank, h, &mut vec![0; rank], 0, &mut level);
        level.sort();
        out.extend(level);
    }
    out
}

fn compositions(rank: usize, rest: i64, cur: &mut Vec<i64>, idx: usize, out: &mut Vec<Vec<i64>>) {
    if idx == rank - 1 {
        cur[idx] = rest;
        out.push(cur.clone());
        return;
    }
    for v in 0..=rest {
        cur[idx] = v;
        compositions(rank, rest - v, cur, idx + 1, out);
    }
}
