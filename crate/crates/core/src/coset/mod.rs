//! Coset spaces of parahoric subgroups and double-coset decompositions.
//!
//! A left coset `gK` with `g ∈ G(Q)` is identified by a key: the Hermite
//! normal form `h` of the lattice `g Z_p^4`, together with the images of the
//! standard flag under `h⁻¹g ∈ GL4(Z_p)` reduced modulo `p^depth`.

pub mod cache;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{
    iwasawa_ntk, mat_identity, root_element, unipotent, unipotent_coords, GroupElement, Mat, Parabolic, Root,
    TorusElement,
};
use crate::scalar::rational::{mod_inverse, ppow, rat, reduce_mod_ppow, residue, valuation, Rational};

pub const SUPPORTED_PRIMES: [u32; 3] = [2, 3, 5];
pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LevelKind {
    Hyperspecial,
    Siegel,
    Klingen,
    Iwahori,
}

/// A parahoric congruence subgroup: `G(Z_p)`, or the elements of `G(Z_p)`
/// whose reduction modulo `p^depth` lies in a standard parabolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Level {
    pub kind: LevelKind,
    pub depth: u32,
}

impl Level {
    pub const SPHERICAL: Level = Level { kind: LevelKind::Hyperspecial, depth: 0 };

    pub fn siegel(depth: u32) -> Level {
        Level { kind: LevelKind::Siegel, depth }
    }

    pub fn klingen(depth: u32) -> Level {
        Level { kind: LevelKind::Klingen, depth }
    }

    pub fn iwahori(depth: u32) -> Level {
        Level { kind: LevelKind::Iwahori, depth }
    }

    pub fn parabolic(&self) -> Option<Parabolic> {
        match self.kind {
            LevelKind::Hyperspecial => None,
            LevelKind::Siegel => Some(Parabolic::Siegel),
            LevelKind::Klingen => Some(Parabolic::Klingen),
            LevelKind::Iwahori => Some(Parabolic::Borel),
        }
    }

    /// Number of leading basis vectors spanning each stabilized subspace.
    fn flag_dims(&self) -> &'static [usize] {
        match self.kind {
            LevelKind::Hyperspecial => &[],
            LevelKind::Siegel => &[2],
            LevelKind::Klingen => &[1],
            LevelKind::Iwahori => &[1, 2],
        }
    }

    /// `self ⊆ other` as subgroups of `G(Z_p)`.
    pub fn is_contained_in(&self, other: &Level) -> bool {
        use LevelKind::*;
        if other.kind == Hyperspecial {
            return true;
        }
        let refines = match (self.kind, other.kind) {
            (a, b) if a == b => true,
            (Iwahori, Siegel) | (Iwahori, Klingen) => true,
            _ => false,
        };
        refines && self.depth >= other.depth
    }

    pub fn name(&self) -> String {
        match self.kind {
            LevelKind::Hyperspecial => "sph".into(),
            LevelKind::Siegel => format!("sieg{}", self.depth),
            LevelKind::Klingen => format!("kl{}", self.depth),
            LevelKind::Iwahori => format!("iw{}", self.depth),
        }
    }

    /// Accepts `sph`, `sieg`, `kl`, `iw`, optionally followed by a depth.
    pub fn parse(s: &str) -> Result<Level> {
        let s = s.trim().to_ascii_lowercase();
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (head, tail) = s.split_at(split);
        let depth: u32 = if tail.is_empty() { 1 } else { tail.parse().map_err(|_| Error::Parse(format!("bad level depth: {s:?}")))? };
        match head {
            "sph" | "spherical" | "hyperspecial" | "g" => Ok(Level::SPHERICAL),
            "sieg" | "siegel" => Ok(Level::siegel(depth)),
            "kl" | "klingen" => Ok(Level::klingen(depth)),
            "iw" | "iwahori" | "borel" => Ok(Level::iwahori(depth)),
            _ => Err(Error::Parse(format!("unknown level: {s:?}"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

// ---------------------------------------------------------------------------
// generators

fn unit_generators(p: u32) -> Vec<i64> {
    if p == 2 {
        return vec![-1, 5];
    }
    let p = p as i64;
    let m = p * p;
    let order = p * (p - 1);
    (2..m)
        .find(|&g| {
            let mut x = 1i64;
            for k in 1..=order {
                x = x * g % m;
                if x == 1 {
                    return k == order;
                }
            }
            false
        })
        .map(|g| vec![g])
        .expect("primitive root")
}

/// Integer element of `SL2(Z)` congruent to `diag(u, u⁻¹)` modulo `p^m`,
/// placed in the coordinate pair `(i, j)`.
fn torus_lift(p: u32, m: u32, u: i64, i: usize, j: usize) -> GroupElement {
    let q = BigInt::from(p).pow(m);
    let q2 = &q * &q;
    let ub = BigInt::from(u);
    let d = mod_inverse(&(((&ub % &q2) + &q2) % &q2), &q2).expect("unit");
    let s = (&ub * &d - BigInt::one()) / &q2;
    let mut mm = mat_identity();
    mm[i][i] = Rational::from_integer(ub);
    mm[i][j] = Rational::from_integer(q.clone());
    mm[j][i] = Rational::from_integer(&q * s);
    mm[j][j] = Rational::from_integer(d);
    GroupElement::new(mm).expect("torus lift is symplectic")
}

fn similitude_gen(u: i64) -> GroupElement {
    let mut m = mat_identity();
    m[2][2] = rat(u);
    m[3][3] = rat(u);
    GroupElement::new(m).expect("similitude generator")
}

/// Integer generators of `level`, exact modulo `p^lift`.
pub fn level_generators(level: &Level, p: u32, lift: u32) -> Vec<GroupElement> {
    let zero = level.parabolic().map(|b| b.zero_positions()).unwrap_or(&[]);
    let pm = ppow(p, level.depth as i32);
    let one = Rational::one();
    let mut out = Vec::new();
    for r in Root::ALL {
        out.push(root_element(r, false, &one));
        let lower = root_element(r, true, &one);
        let constrained = (0..4).any(|i| (0..i).any(|j| !lower.entry(i, j).is_zero() && zero.contains(&(i, j))));
        out.push(root_element(r, true, if constrained { &pm } else { &one }));
    }
    for u in unit_generators(p) {
        out.push(torus_lift(p, lift, u, 0, 3));
        out.push(torus_lift(p, lift, u, 1, 2));
        out.push(similitude_gen(u));
    }
    out
}

/// Exact generators of `B(Z_p)` (rational diagonal torus elements).
fn borel_generators(p: u32) -> Vec<GroupElement> {
    let mut out: Vec<GroupElement> = Root::ALL.iter().map(|&r| root_element(r, false, &Rational::one())).collect();
    for u in unit_generators(p) {
        let uq = rat(u);
        let ui = uq.recip();
        let one = Rational::one();
        out.push(GroupElement::diag([uq.clone(), one.clone(), one.clone(), ui.clone()]).unwrap());
        out.push(GroupElement::diag([one.clone(), uq.clone(), ui, one.clone()]).unwrap());
        out.push(GroupElement::diag([one.clone(), one, uq.clone(), uq]).unwrap());
    }
    out
}

// ---------------------------------------------------------------------------
// keys

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetKey {
    lattice: Vec<Rational>,
    flag: Vec<u64>,
}

/// Column Hermite form over `Z_(p)`: returns `(h, k)` with `g = h·k`,
/// `h` upper triangular with `p`-power diagonal and reduced entries,
/// `k ∈ GL4(Z_p)`.
pub fn lattice_hnf(g: &Mat, p: u32) -> (Mat, Mat) {
    let mut h = g.clone();
    let mut k = mat_identity();
    // Column op bookkeeping: h ← h·E, k ← E⁻¹·k.
    let add_col = |h: &mut Mat, k: &mut Mat, src: usize, dst: usize, c: &Rational| {
        if c.is_zero() {
            return;
        }
        for row in h.iter_mut() {
            let v = &row[src] * c;
            row[dst] += v;
        }
        // E = I + c E_{src,dst}; E⁻¹ = I - c E_{src,dst}: row src of k -= c · row dst.
        for col in 0..4 {
            let v = &k[dst][col] * c;
            k[src][col] -= v;
        }
    };
    for r in (0..4).rev() {
        let j = (0..=r)
            .filter(|&j| !h[r][j].is_zero())
            .min_by_key(|&j| (valuation(&h[r][j], p).unwrap(), std::cmp::Reverse(j)))
            .expect("full rank");
        if j != r {
            for row in h.iter_mut() {
                row.swap(j, r);
            }
            k.swap(j, r);
        }
        let e = valuation(&h[r][r], p).unwrap();
        let unit = &h[r][r] * ppow(p, -e);
        let uinv = unit.recip();
        for row in h.iter_mut() {
            row[r] = &row[r] * &uinv;
        }
        for c in 0..4 {
            k[r][c] = &k[r][c] * &unit;
        }
        for jj in 0..r {
            let c = -(&h[r][jj] / &h[r][r]);
            add_col(&mut h, &mut k, r, jj, &c);
        }
    }
    let e: Vec<i32> = (0..4).map(|i| valuation(&h[i][i], p).unwrap()).collect();
    for j in 1..4 {
        for i in (0..j).rev() {
            let red = reduce_mod_ppow(&h[i][j], p, e[i]);
            let c = -((&h[i][j] - &red) / &h[i][i]);
            add_col(&mut h, &mut k, i, j, &c);
        }
    }
    (h, k)
}

fn rref_columns(cols: &[[i128; 4]], p: i128, q: i128) -> Vec<u64> {
    let d = cols.len();
    // Pivot rows: first rows where the rank modulo p grows.
    let mut pivots = Vec::new();
    let mut basis: Vec<[i128; 4]> = cols.iter().map(|c| c.map(|x| x.rem_euclid(p))).collect();
    for r in 0..4 {
        if pivots.len() == d {
            break;
        }
        let k = pivots.len();
        if let Some(c) = (k..d).find(|&c| basis[c][r] != 0) {
            basis.swap(k, c);
            let inv = mod_inv_i(basis[k][r], p);
            for x in basis[k].iter_mut() {
                *x = (*x * inv).rem_euclid(p);
            }
            for c2 in 0..d {
                if c2 != k && basis[c2][r] != 0 {
                    let f = basis[c2][r];
                    for i in 0..4 {
                        basis[c2][i] = (basis[c2][i] - f * basis[k][i]).rem_euclid(p);
                    }
                }
            }
            pivots.push(r);
        }
    }
    assert_eq!(pivots.len(), d, "flag columns are not a direct summand");
    // Solve cols · A = canonical with canonical restricted to pivots = identity.
    let sub: Vec<Vec<i128>> = pivots.iter().map(|&r| cols.iter().map(|c| c[r].rem_euclid(q)).collect()).collect();
    let inv = mat_inv_mod(&sub, q);
    let mut out = Vec::with_capacity(4 * d);
    for r in 0..4 {
        for j in 0..d {
            let mut s = 0i128;
            for (c, col) in cols.iter().enumerate() {
                s = (s + col[r] * inv[c][j]).rem_euclid(q);
            }
            out.push(s as u64);
        }
    }
    out
}

fn mod_inv_i(a: i128, m: i128) -> i128 {
    let (mut t, mut nt, mut r, mut nr) = (0i128, 1i128, m, a.rem_euclid(m));
    while nr != 0 {
        let qq = r / nr;
        (t, nt) = (nt, t - qq * nt);
        (r, nr) = (nr, r - qq * nr);
    }
    assert_eq!(r, 1, "not invertible");
    t.rem_euclid(m)
}

fn mat_inv_mod(a: &[Vec<i128>], q: i128) -> Vec<Vec<i128>> {
    match a.len() {
        1 => vec![vec![mod_inv_i(a[0][0], q)]],
        2 => {
            let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).rem_euclid(q);
            let di = mod_inv_i(det, q);
            vec![
                vec![(a[1][1] * di).rem_euclid(q), (-a[0][1] * di).rem_euclid(q)],
                vec![(-a[1][0] * di).rem_euclid(q), (a[0][0] * di).rem_euclid(q)],
            ]
        }
        _ => unreachable!("flags have dimension at most two"),
    }
}

fn flag_data(k: &Mat, level: &Level, p: u32) -> Vec<u64> {
    let dims = level.flag_dims();
    if dims.is_empty() {
        return Vec::new();
    }
    let q = (p as i128).pow(level.depth);
    let col = |j: usize| -> [i128; 4] {
        std::array::from_fn(|i| {
            let r = residue(&k[i][j], p, level.depth);
            i128::try_from(r).expect("residue fits")
        })
    };
    let mut out = Vec::new();
    for &d in dims {
        let cols: Vec<[i128; 4]> = (0..d).map(col).collect();
        out.extend(rref_columns(&cols, p as i128, q));
    }
    out
}

/// The key of `gK` for the given level.
pub fn coset_key(g: &GroupElement, level: &Level, p: u32) -> CosetKey {
    let (h, k) = lattice_hnf(g.matrix(), p);
    CosetKey { lattice: h.into_iter().flatten().collect(), flag: flag_data(&k, level, p) }
}

/// Key of `kK` for `k ∈ G(Z_p)` (lattice part omitted).
pub fn flag_key(k: &GroupElement, level: &Level, p: u32) -> Vec<u64> {
    flag_data(k.matrix(), level, p)
}

// ---------------------------------------------------------------------------
// tables

/// Representatives of `G(Z_p)/level`, with the index of each flag point.
#[derive(Clone, Debug)]
pub struct CosetTable {
    pub prime: u32,
    pub level: Level,
    pub reps: Vec<GroupElement>,
    pub index: HashMap<Vec<u64>, usize>,
}

impl CosetTable {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn lookup(&self, k: &GroupElement) -> usize {
        *self.index.get(&flag_key(k, &self.level, self.prime)).expect("flag point not in table")
    }
}

fn check_prime(p: u32) -> Result<()> {
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("prime {p}; supported primes are {SUPPORTED_PRIMES:?}")))
    }
}

/// Enumerate `G(Z_p)/level` by orbit search from the identity.
pub fn enumerate_cosets(p: u32, level: Level) -> Result<CosetTable> {
    check_prime(p)?;
    enumerate_cosets_with_budget(p, level, DEFAULT_BUDGET)
}

pub fn enumerate_cosets_with_budget(p: u32, level: Level, budget: usize) -> Result<CosetTable> {
    check_prime(p)?;
    let gens = level_generators(&Level::SPHERICAL, p, level.depth.max(1));
    let mut reps = vec![GroupElement::identity()];
    let mut index = HashMap::new();
    index.insert(flag_key(&reps[0], &level, p), 0);
    let mut i = 0;
    while i < reps.len() {
        for g in &gens {
            let h = g.mul(&reps[i]);
            let key = flag_key(&h, &level, p);
            if !index.contains_key(&key) {
                if reps.len() >= budget {
                    return Err(Error::Budget(format!("more than {budget} cosets for {level} at p = {p}")));
                }
                index.insert(key, reps.len());
                reps.push(h);
            }
        }
        i += 1;
    }
    Ok(CosetTable { prime: p, level, reps, index })
}

/// The flag variety `G(Z_p)/level` with its `B(Z_p)`-orbits (Bruhat cells).
#[derive(Clone, Debug)]
pub struct FlagVariety {
    pub table: CosetTable,
    /// Cell of each flag point.
    pub cell_of: Vec<usize>,
    /// Flag points in each cell; the first is the cell representative.
    pub cells: Vec<Vec<usize>>,
}

impl FlagVariety {
    pub fn new(p: u32, level: Level) -> Result<FlagVariety> {
        let table = enumerate_cosets(p, level)?;
        let n = table.len();
        let gens = borel_generators(p);
        let mut cell_of = vec![usize::MAX; n];
        let mut cells = Vec::new();
        for start in 0..n {
            if cell_of[start] != usize::MAX {
                continue;
            }
            let c = cells.len();
            let mut members = vec![start];
            cell_of[start] = c;
            let mut i = 0;
            while i < members.len() {
                let x = &table.reps[members[i]];
                for g in &gens {
                    let j = table.lookup(&g.mul(x));
                    if cell_of[j] == usize::MAX {
                        cell_of[j] = c;
                        members.push(j);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            cells.push(members);
        }
        Ok(FlagVariety { table, cell_of, cells })
    }

    pub fn level(&self) -> Level {
        self.table.level
    }

    pub fn prime(&self) -> u32 {
        self.table.prime
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_rep(&self, c: usize) -> &GroupElement {
        &self.table.reps[self.cells[c][0]]
    }

    pub fn cell_size(&self, c: usize) -> usize {
        self.cells[c].len()
    }

    /// Cell containing the flag point of `k ∈ G(Z_p)`.
    pub fn cell_of_element(&self, k: &GroupElement) -> usize {
        self.cell_of[self.table.lookup(k)]
    }
}

fn flag_memo() -> &'static Mutex<HashMap<(u32, Level), Arc<FlagVariety>>> {
    static M: OnceLock<Mutex<HashMap<(u32, Level), Arc<FlagVariety>>>> = OnceLock::new();
    M.get_or_init(Default::default)
}

/// Memoized [`FlagVariety::new`].
pub fn flag_variety(p: u32, level: Level) -> Result<Arc<FlagVariety>> {
    if let Some(f) = flag_memo().lock().unwrap().get(&(p, level)) {
        return Ok(f.clone());
    }
    let f = Arc::new(FlagVariety::new(p, level)?);
    flag_memo().lock().unwrap().insert((p, level), f.clone());
    Ok(f)
}

/// Representatives of `bigger/smaller`, lifted to integral matrices.
pub fn quotient_cosets(p: u32, bigger: Level, smaller: Level) -> Result<Vec<GroupElement>> {
    check_prime(p)?;
    if !smaller.is_contained_in(&bigger) {
        return Err(Error::NotNested(smaller.name(), bigger.name()));
    }
    let gens = level_generators(&bigger, p, smaller.depth.max(1));
    let mut reps = vec![GroupElement::identity()];
    let mut seen = HashMap::new();
    seen.insert(flag_key(&reps[0], &smaller, p), 0usize);
    let mut i = 0;
    while i < reps.len() {
        for g in &gens {
            let h = g.mul(&reps[i]);
            let key = flag_key(&h, &smaller, p);
            if !seen.contains_key(&key) {
                if reps.len() >= DEFAULT_BUDGET {
                    return Err(Error::Budget(format!("{bigger}/{smaller} at p = {p}")));
                }
                seen.insert(key, reps.len());
                reps.push(h);
            }
        }
        i += 1;
    }
    Ok(reps)
}

// ---------------------------------------------------------------------------
// double cosets

/// `K t K = ⊔ g_i K` for a parahoric `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCosetDecomposition {
    pub t: TorusElement,
    pub level: Level,
    pub prime: u32,
    /// Reduction depth used for the representatives.
    pub depth: u32,
    pub reps: Vec<GroupElement>,
}

impl DoubleCosetDecomposition {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Default reduction depth for a torus element with the given spread.
pub fn default_depth(level: &Level, t: &TorusElement) -> u32 {
    level.depth.max(1) + 2 * t.spread() as u32
}

/// A tidy representative of `gK`: `n'·t·f` with `f` from the flag table and
/// the unipotent coordinates of `n` reduced modulo `p^depth`.
fn tidy_rep(g: &GroupElement, level: &Level, p: u32, depth: u32, flags: &FlagVariety) -> GroupElement {
    let (n, t, k) = iwasawa_ntk(g, p);
    let f = &flags.table.reps[flags.table.lookup(&k)];
    let c = unipotent_coords(&n).expect("unipotent");
    let red: Vec<Rational> = c.iter().map(|x| reduce_mod_ppow(x, p, depth as i32)).collect();
    let cand = unipotent([&red[0], &red[1], &red[2], &red[3]]).mul(&t.to_element(p)).mul(f);
    if coset_key(&cand, level, p) == coset_key(g, level, p) {
        cand
    } else {
        g.clone()
    }
}

fn decompose_uncached(t: &TorusElement, level: Level, p: u32, depth: u32) -> Result<DoubleCosetDecomposition> {
    check_prime(p)?;
    let flag_level = if level.kind == LevelKind::Hyperspecial { Level::SPHERICAL } else { level };
    let flags = flag_variety(p, flag_level)?;
    let gens = level_generators(&level, p, depth);
    let start = t.to_element(p);
    let mut reps = vec![start.clone()];
    let mut seen = HashMap::new();
    seen.insert(coset_key(&start, &level, p), 0usize);
    let mut i = 0;
    while i < reps.len() {
        for g in &gens {
            let h = g.mul(&reps[i]);
            let key = coset_key(&h, &level, p);
            if !seen.contains_key(&key) {
                if reps.len() >= DEFAULT_BUDGET {
                    return Err(Error::Budget(format!("double coset of {t} at {level}")));
                }
                seen.insert(key, reps.len());
                reps.push(h);
            }
        }
        i += 1;
    }
    let reps: Vec<GroupElement> = reps.iter().map(|g| tidy_rep(g, &level, p, depth, &flags)).collect();
    // Disjointness: g_i⁻¹ g_j ∉ K for i ≠ j.
    let mut keys = HashMap::new();
    for (i, g) in reps.iter().enumerate() {
        if keys.insert(coset_key(g, &level, p), i).is_some() {
            return Err(Error::Exhaustion(format!("duplicate coset among representatives of {t}")));
        }
    }
    Ok(DoubleCosetDecomposition { t: *t, level, prime: p, depth, reps })
}

type DecompKey = (TorusElement, Level, u32, u32);

fn decomp_memo() -> &'static Mutex<HashMap<DecompKey, Arc<DoubleCosetDecomposition>>> {
    static M: OnceLock<Mutex<HashMap<DecompKey, Arc<DoubleCosetDecomposition>>>> = OnceLock::new();
    M.get_or_init(Default::default)
}

/// Decompose `K t K` into left cosets at the default reduction depth.
pub fn decompose_double_coset(t: &TorusElement, level: Level, p: u32) -> Result<Arc<DoubleCosetDecomposition>> {
    decompose_at_depth(t, level, p, default_depth(&level, t))
}

pub fn decompose_at_depth(t: &TorusElement, level: Level, p: u32, depth: u32) -> Result<Arc<DoubleCosetDecomposition>> {
    let key = (*t, level, p, depth);
    if let Some(d) = decomp_memo().lock().unwrap().get(&key) {
        return Ok(d.clone());
    }
    let d = Arc::new(decompose_uncached(t, level, p, depth)?);
    decomp_memo().lock().unwrap().insert(key, d.clone());
    Ok(d)
}

/// Decompose, consulting and filling the on-disk cache.
pub fn decompose_cached(cache: &cache::Cache, t: &TorusElement, level: Level, p: u32) -> Result<Arc<DoubleCosetDecomposition>> {
    let depth = default_depth(&level, t);
    if let Some(d) = cache.load(p, &level, t, depth) {
        return Ok(Arc::new(d));
    }
    let d = decompose_at_depth(t, level, p, depth)?;
    cache.store(&d)?;
    Ok(d)
}

/// `t` from a diagonal group element with `p`-power entries.
pub fn torus_of(g: &GroupElement, p: u32) -> Result<TorusElement> {
    let m = g.matrix();
    let mut e = [0i32; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j && !m[i][j].is_zero() {
                return Err(Error::Parse("element is not diagonal".into()));
            }
        }
        let v = valuation(&m[i][i], p).ok_or_else(|| Error::Parse("zero on the diagonal".into()))?;
        if m[i][i] != ppow(p, v) {
            return Err(Error::Parse("diagonal entries must be powers of p".into()));
        }
        e[i] = v;
    }
    TorusElement::from_diag_exps(e).ok_or_else(|| Error::Parse("not a similitude".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_variety_sizes() {
        assert_eq!(enumerate_cosets(2, Level::iwahori(1)).unwrap().len(), 45);
        assert_eq!(enumerate_cosets(2, Level::siegel(1)).unwrap().len(), 15);
        assert_eq!(enumerate_cosets(3, Level::klingen(1)).unwrap().len(), 40);
    }

    #[test]
    fn hnf_reconstructs() {
        let p = 3;
        let g = crate::group::make_u_kl().mul(&TorusElement::new(2, 1, 2).to_element(p));
        let (h, k) = lattice_hnf(g.matrix(), p);
        assert_eq!(crate::group::mat_mul(&h, &k), *g.matrix());
    }

    #[test]
    fn identity_double_coset() {
        let d = decompose_double_coset(&TorusElement::identity(), Level::klingen(1), 2).unwrap();
        assert_eq!(d.reps, vec![GroupElement::identity()]);
    }

    #[test]
    fn level_parsing() {
        assert_eq!(Level::parse("sieg").unwrap(), Level::siegel(1));
        assert_eq!(Level::parse("kl2").unwrap(), Level::klingen(2));
        assert!(Level::parse("foo").is_err());
    }
}
