//! Finitely generated semigroups in the plane: the saturation point `A` with
//! `(A + S) ∩ Λ ⊂ G`, a membership oracle, and the invariant-point simulator
//! of the `D_φ`-saturation argument.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::SemigroupError;
use crate::rational::{fmt_rational, rat, Rational, RationalRef};

pub type Point = [Rational; 2];

pub fn point(x: i64, y: i64) -> Point {
    [rat(x), rat(y)]
}

fn cross(u: &Point, v: &Point) -> Rational {
    &u[0] * &v[1] - &u[1] * &v[0]
}

fn dot(u: &Point, v: &Point) -> Rational {
    &u[0] * &v[0] + &u[1] * &v[1]
}

fn add(u: &Point, v: &Point) -> Point {
    [&u[0] + &v[0], &u[1] + &v[1]]
}

fn scale(c: &Rational, u: &Point) -> Point {
    [c * &u[0], c * &u[1]]
}

pub fn fmt_point(p: &Point) -> String {
    format!("({}, {})", fmt_rational(&p[0]), fmt_rational(&p[1]))
}

fn ser_point<S: Serializer>(p: &Point, s: S) -> Result<S::Ok, S::Error> {
    [RationalRef(&p[0]), RationalRef(&p[1])].serialize(s)
}

/// Generators with the lattice they generate and the sector they span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupInstance {
    generators: Vec<Point>,
    /// Hermite basis `(p, q), (0, r)` with `p, r > 0`.
    lattice_basis: [Point; 2],
    /// Indices of the generators on the clockwise and counterclockwise boundary rays.
    extremal: [usize; 2],
    /// Coordinates of each generator in the basis of the two extremal generators.
    sector_coords: Vec<Point>,
}

/// The group generated by rational points, as an integer-lattice Hermite
/// basis scaled back by the common denominator.
fn lattice_basis(gens: &[Point]) -> Option<[Point; 2]> {
    let mut den = BigInt::one();
    for g in gens {
        for c in g {
            den = den.lcm(c.denom());
        }
    }
    let scale_r = Rational::from_integer(den.clone());
    let ints: Vec<[BigInt; 2]> =
        gens.iter().map(|g| [(&g[0] * &scale_r).to_integer(), (&g[1] * &scale_r).to_integer()]).collect();
    let mut head: Option<[BigInt; 2]> = None;
    let mut r = BigInt::zero();
    for v in ints {
        let mut v = v;
        match head.take() {
            None if v[0].is_zero() => r = r.gcd(&v[1]),
            None => head = Some(v),
            Some(mut a) => {
                // Euclid on the first coordinate
                while !v[0].is_zero() {
                    let q = a[0].div_floor(&v[0]);
                    let next = [&a[0] - &q * &v[0], &a[1] - &q * &v[1]];
                    a = std::mem::replace(&mut v, next);
                }
                r = r.gcd(&v[1]);
                head = Some(a);
            }
        }
    }
    let mut a = head?;
    if r.is_zero() {
        return None;
    }
    if a[0].is_negative() {
        a = [-&a[0], -&a[1]];
    }
    a[1] = a[1].mod_floor(&r);
    let d = Rational::from_integer(den);
    Some([
        [Rational::from_integer(a[0].clone()) / &d, Rational::from_integer(a[1].clone()) / &d],
        [Rational::zero(), Rational::from_integer(r) / &d],
    ])
}

/// Index of the generator bounding the sector on the clockwise side (or the
/// counterclockwise side when `ccw`), the shortest one if several share that ray.
fn boundary(gens: &[Point], ccw: bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, u) in gens.iter().enumerate() {
        let ok = gens.iter().all(|v| {
            let c = if ccw { cross(v, u) } else { cross(u, v) };
            c.is_positive() || (c.is_zero() && dot(u, v).is_positive())
        });
        if ok && best.is_none_or(|b| dot(u, u) < dot(&gens[b], &gens[b])) {
            best = Some(i);
        }
    }
    best
}

pub fn sector_and_lattice(generators: &[Point]) -> Result<SemigroupInstance, SemigroupError> {
    let mut gens: Vec<Point> = Vec::new();
    for g in generators {
        if !(g[0].is_zero() && g[1].is_zero()) && !gens.contains(g) {
            gens.push(g.clone());
        }
    }
    let rank = if gens.is_empty() {
        0
    } else if gens.iter().all(|v| cross(&gens[0], v).is_zero()) {
        1
    } else {
        2
    };
    if rank < 2 {
        return Err(SemigroupError::DegenerateLattice(rank));
    }
    let (Some(right), Some(left)) = (boundary(&gens, false), boundary(&gens, true)) else {
        let half_plane = gens.iter().any(|u| gens.iter().all(|v| !cross(u, v).is_negative()));
        return Err(if half_plane {
            SemigroupError::HalfPlaneSector
        } else {
            SemigroupError::NonconvexSector
        });
    };
    if !cross(&gens[right], &gens[left]).is_positive() {
        return Err(SemigroupError::NonconvexSector);
    }
    let lattice = lattice_basis(&gens).ok_or(SemigroupError::DegenerateLattice(1))?;
    let mut inst = SemigroupInstance {
        generators: gens,
        lattice_basis: lattice,
        extremal: [right, left],
        sector_coords: Vec::new(),
    };
    inst.sector_coords = inst.generators.iter().map(|g| inst.to_sector(g)).collect();
    Ok(inst)
}

impl SemigroupInstance {
    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn lattice_basis(&self) -> &[Point; 2] {
        &self.lattice_basis
    }

    /// The two generators spanning the boundary rays, clockwise one first.
    pub fn extremal(&self) -> [&Point; 2] {
        [&self.generators[self.extremal[0]], &self.generators[self.extremal[1]]]
    }

    /// Coordinates of every generator in the extremal basis.
    pub fn sector_coords(&self) -> &[Point] {
        &self.sector_coords
    }

    /// Coordinates `(s, t)` with `p = s·u + t·w` for the extremal pair `(u, w)`.
    pub fn to_sector(&self, p: &Point) -> Point {
        let [u, w] = self.extremal();
        let det = cross(u, w);
        [cross(p, w) / &det, cross(u, p) / &det]
    }

    pub fn from_sector(&self, c: &Point) -> Point {
        let [u, w] = self.extremal();
        add(&scale(&c[0], u), &scale(&c[1], w))
    }

    pub fn in_sector(&self, p: &Point) -> bool {
        let c = self.to_sector(p);
        !c[0].is_negative() && !c[1].is_negative()
    }

    /// Integer coordinates in the lattice basis, if `p ∈ Λ`.
    pub fn lattice_coords(&self, p: &Point) -> Option<[BigInt; 2]> {
        let [b1, b2] = &self.lattice_basis;
        let m = &p[0] / &b1[0];
        if !m.is_integer() {
            return None;
        }
        let n = (&p[1] - &m * &b1[1]) / &b2[1];
        if !n.is_integer() {
            return None;
        }
        Some([m.to_integer(), n.to_integer()])
    }

    pub fn from_lattice_coords(&self, m: &BigInt, n: &BigInt) -> Point {
        let [b1, b2] = &self.lattice_basis;
        let (m, n) = (Rational::from_integer(m.clone()), Rational::from_integer(n.clone()));
        add(&scale(&m, b1), &scale(&n, b2))
    }
}

/// Least positive `a` with `a·(s, t)` integral: the order of a generator
/// modulo the sublattice spanned by the extremal pair.
fn residue_modulus(c: &Point) -> BigInt {
    c[0].denom().lcm(c[1].denom())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundVariant {
    /// Residues `0 ≤ ᾱ_i < a_i` in both coordinates.
    Strict,
    /// Residues `ᾱ_i < a_i` for the first coordinate and `ᾱ_i ≤ a_i` for the second.
    Printed,
}

/// Candidate points `A` from the residue construction. Both candidates are
/// reported; `a` is the strict one unless the membership oracle rejects it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaturationBound {
    #[serde(serialize_with = "ser_point")]
    pub a: Point,
    pub variant: BoundVariant,
    /// `(X_0, Y_0)` of the chosen variant, in extremal coordinates.
    #[serde(serialize_with = "ser_point")]
    pub sector_point: Point,
    #[serde(serialize_with = "ser_point")]
    pub strict: Point,
    #[serde(serialize_with = "ser_point")]
    pub printed: Point,
    /// `a_i` for each non-extremal generator, by generator index.
    pub moduli: Vec<(usize, String)>,
    pub strict_verified: bool,
    pub verify_radius: i64,
}

pub const DEFAULT_RADIUS: i64 = 10;
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// `(X_0, Y_0)` for both residue conventions, in extremal coordinates:
/// `X_0 = Σ (a_i - 1) s_i`, `Y_0 = Σ (a_i - 1) t_i` or `Σ a_i t_i`.
pub fn residue_maxima(inst: &SemigroupInstance) -> (Point, Point, Vec<(usize, BigInt)>) {
    let mut strict = [Rational::zero(), Rational::zero()];
    let mut y_printed = Rational::zero();
    let mut moduli = Vec::new();
    for (i, c) in inst.sector_coords.iter().enumerate() {
        if inst.extremal.contains(&i) {
            continue;
        }
        let a = residue_modulus(c);
        let a_r = Rational::from_integer(a.clone());
        let am1 = &a_r - Rational::one();
        strict[0] += &am1 * &c[0];
        strict[1] += &am1 * &c[1];
        y_printed += &a_r * &c[1];
        moduli.push((i, a));
    }
    let printed = [strict[0].clone(), y_printed];
    (strict, printed, moduli)
}

pub fn saturation_bound(inst: &SemigroupInstance) -> Result<SaturationBound, SemigroupError> {
    let (strict_c, printed_c, moduli) = residue_maxima(inst);
    let strict = inst.from_sector(&strict_c);
    let printed = inst.from_sector(&printed_c);
    let strict_verified = matches!(verify_bound(inst, &strict, DEFAULT_RADIUS), Ok(Verdict::Holds { .. }));
    let (a, variant, sector_point) = if strict_verified {
        (strict.clone(), BoundVariant::Strict, strict_c)
    } else {
        (printed.clone(), BoundVariant::Printed, printed_c)
    };
    Ok(SaturationBound {
        a,
        variant,
        sector_point,
        strict,
        printed,
        moduli: moduli.into_iter().map(|(i, a)| (i, a.to_string())).collect(),
        strict_verified,
        verify_radius: DEFAULT_RADIUS,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Holds {
        checked: usize,
    },
    Counterexample {
        #[serde(serialize_with = "ser_point")]
        point: Point,
        checked: usize,
    },
}

pub fn verify_bound(inst: &SemigroupInstance, a: &Point, radius: i64) -> Result<Verdict, SemigroupError> {
    verify_bound_with_budget(inst, a, radius, DEFAULT_BUDGET)
}

fn to_i64(x: &BigInt) -> Result<i64, SemigroupError> {
    x.to_i64().ok_or_else(|| SemigroupError::Precondition("coordinate exceeds the i64 range".into()))
}

/// Checks every lattice point `P ∈ A + S` with `|P - A|_∞ ≤ radius` for
/// membership in the semigroup by exhaustive search over generator sums.
pub fn verify_bound_with_budget(
    inst: &SemigroupInstance,
    a: &Point,
    radius: i64,
    budget: usize,
) -> Result<Verdict, SemigroupError> {
    if radius < 1 {
        return Err(SemigroupError::Precondition(format!("window radius {radius} < 1")));
    }
    let r = rat(radius);
    let [b1, b2] = inst.lattice_basis.clone();
    // lattice points with x = m·b1x in [ax - r, ax + r]
    let m_lo = ((&a[0] - &r) / &b1[0]).ceil().to_integer();
    let m_hi = ((&a[0] + &r) / &b1[0]).floor().to_integer();
    let mut targets: Vec<([i64; 2], Point)> = Vec::new();
    let mut m = m_lo;
    while m <= m_hi {
        let mr = Rational::from_integer(m.clone());
        let base_y = &mr * &b1[1];
        let n_lo = ((&a[1] - &r - &base_y) / &b2[1]).ceil().to_integer();
        let n_hi = ((&a[1] + &r - &base_y) / &b2[1]).floor().to_integer();
        let mut n = n_lo;
        while n <= n_hi {
            let p = inst.from_lattice_coords(&m, &n);
            let rel = [&p[0] - &a[0], &p[1] - &a[1]];
            if inst.in_sector(&rel) {
                targets.push(([to_i64(&m)?, to_i64(&n)?], p));
            }
            n += 1;
        }
        m += 1;
    }

    // height ℓ = s + t on lattice coordinates, scaled to integers
    let l1 = {
        let c = inst.to_sector(&b1);
        &c[0] + &c[1]
    };
    let l2 = {
        let c = inst.to_sector(&b2);
        &c[0] + &c[1]
    };
    let den = l1.denom().lcm(l2.denom());
    let l1 = to_i64(&(&l1 * Rational::from_integer(den.clone())).to_integer())?;
    let l2 = to_i64(&(&l2 * Rational::from_integer(den)).to_integer())?;
    let height = |c: [i64; 2]| c[0] as i128 * l1 as i128 + c[1] as i128 * l2 as i128;

    let steps: Vec<[i64; 2]> = inst
        .generators
        .iter()
        .map(|g| {
            let c = inst.lattice_coords(g).expect("generators lie in their lattice");
            Ok([to_i64(&c[0])?, to_i64(&c[1])?])
        })
        .collect::<Result<_, SemigroupError>>()?;
    let max_height = targets.iter().map(|(c, _)| height(*c)).max().unwrap_or(0);

    let mut seen: HashSet<[i64; 2]> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert([0, 0]);
    queue.push_back([0i64, 0i64]);
    while let Some(c) = queue.pop_front() {
        for s in &steps {
            let next = [c[0] + s[0], c[1] + s[1]];
            if height(next) <= max_height && seen.insert(next) {
                if seen.len() > budget {
                    return Err(SemigroupError::Inconclusive(budget));
                }
                queue.push_back(next);
            }
        }
    }

    targets.sort_by(|(c1, p1), (c2, p2)| height(*c1).cmp(&height(*c2)).then(p1.cmp(p2)));
    let checked = targets.len();
    for (c, p) in targets {
        if !seen.contains(&c) {
            return Ok(Verdict::Counterexample { point: p, checked });
        }
    }
    Ok(Verdict::Holds { checked })
}

/// `(k/2, ord + k/2)` together with the slope parameter `𝒦` of the critical
/// line `y = (2𝒦 + 1) x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantPoint {
    pub i1: Rational,
    pub i2: Rational,
    pub kappa: Rational,
}

impl InvariantPoint {
    pub fn new(i1: Rational, i2: Rational, kappa: Rational) -> Self {
        InvariantPoint { i1, i2, kappa }
    }

    pub fn on_critical_line(&self) -> bool {
        on_line(&self.i1, &self.i2, &self.kappa)
    }

    fn integer_coords(&self) -> Option<[i64; 2]> {
        if self.i1.is_integer() && self.i2.is_integer() {
            Some([self.i1.to_integer().to_i64()?, self.i2.to_integer().to_i64()?])
        } else {
            None
        }
    }
}

impl std::fmt::Display for InvariantPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", fmt_rational(&self.i1), fmt_rational(&self.i2))
    }
}

fn on_line(x: &Rational, y: &Rational, kappa: &Rational) -> bool {
    *y == (rat(2) * kappa + rat(1)) * x
}

pub fn invariant_point(k: u32, ord: Rational, kappa: Rational) -> Result<InvariantPoint, SemigroupError> {
    if !k.is_multiple_of(2) {
        return Err(SemigroupError::Precondition(format!("odd weight {k}")));
    }
    if !kappa.is_positive() {
        return Err(SemigroupError::Precondition("the slope parameter must be positive".into()));
    }
    let half = rat(k as i64 / 2);
    Ok(InvariantPoint { i2: ord + &half, i1: half, kappa })
}

/// The jump `β` of `D_φ` at points on the critical line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JumpRule {
    /// `β = 0` everywhere.
    Never,
    Constant(i64),
    /// Per-point jumps with a fallback.
    Table {
        default: i64,
        overrides: BTreeMap<[i64; 2], i64>,
    },
}

impl JumpRule {
    /// Parses `none` or `beta=N`.
    pub fn parse(s: &str) -> Result<JumpRule, SemigroupError> {
        let s = s.trim();
        if s == "none" || s == "never" {
            return Ok(JumpRule::Never);
        }
        let Some(v) = s.strip_prefix("beta=") else {
            return Err(SemigroupError::InvalidRule(format!("expected `none` or `beta=N`, got `{s}`")));
        };
        let b: i64 = v
            .trim()
            .parse()
            .map_err(|_| SemigroupError::InvalidRule(format!("β must be an integer, got `{v}`")))?;
        if b < 0 {
            return Err(SemigroupError::InvalidRule(format!("β = {b} is negative")));
        }
        Ok(JumpRule::Constant(b))
    }

    fn beta_at(&self, p: Option<[i64; 2]>) -> Result<i64, SemigroupError> {
        let b = match self {
            JumpRule::Never => 0,
            JumpRule::Constant(b) => *b,
            JumpRule::Table { default, overrides } => {
                p.and_then(|p| overrides.get(&p).copied()).unwrap_or(*default)
            }
        };
        if b < 0 {
            return Err(SemigroupError::InvalidRule(format!("β = {b} is negative")));
        }
        Ok(b)
    }
}

impl std::fmt::Display for JumpRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JumpRule::Never => write!(f, "none"),
            JumpRule::Constant(b) => write!(f, "beta={b}"),
            JumpRule::Table { default, overrides } => {
                write!(f, "table(default={default}, {} overrides)", overrides.len())
            }
        }
    }
}

/// `I(D_φ f) = I(f) + (1, β)` with `β = 0` off the critical line.
pub fn dphi_step(p: &InvariantPoint, rule: &JumpRule) -> Result<InvariantPoint, SemigroupError> {
    let beta = if p.on_critical_line() { rule.beta_at(p.integer_coords())? } else { 0 };
    Ok(InvariantPoint { i1: &p.i1 + rat(1), i2: &p.i2 + rat(beta), kappa: p.kappa.clone() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SaturateOptions {
    pub stage_cap: usize,
    /// Points are tracked in `[0, window]²`.
    pub window: i64,
}

impl Default for SaturateOptions {
    fn default() -> Self {
        SaturateOptions { stage_cap: 20, window: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub occupied: usize,
    pub new_generators: usize,
    /// `E(R_j)`: ordinates in the window with no occupied point.
    pub missing_lines: Vec<i64>,
    pub x_threshold: i64,
    pub y_threshold: i64,
}

/// Final state of the simulated saturation. `stage` is the first `n_0` with
/// `E(R_{n_0}) = E(R_{n_0+1}) = E(R_{n_0+2})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaturationState {
    pub stage: usize,
    #[serde(serialize_with = "ser_rational")]
    pub kappa: Rational,
    pub window: i64,
    pub missing_lines: BTreeSet<i64>,
    pub x_threshold: i64,
    pub y_threshold: i64,
    /// Whether the occupied set itself stopped changing at stage `n_0 + 1`.
    pub occupied_stationary: bool,
    pub log: Vec<StageRecord>,
    #[serde(skip)]
    grid: Grid,
}

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    RationalRef(r).serialize(s)
}

impl SaturationState {
    pub fn is_occupied(&self, x: i64, y: i64) -> bool {
        self.grid.get(x, y)
    }

    /// Occupied points, row by row.
    pub fn occupied_points(&self) -> Vec<[i64; 2]> {
        self.grid.points()
    }
}

/// Occupancy of `[0, w]²`, closed under addition of its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Grid {
    w: i64,
    cells: Vec<bool>,
}

impl Grid {
    fn new(w: i64) -> Self {
        let side = (w + 1) as usize;
        let mut g = Grid { w, cells: vec![false; side * side] };
        g.set(0, 0);
        g
    }

    fn idx(&self, x: i64, y: i64) -> usize {
        (x * (self.w + 1) + y) as usize
    }

    fn inside(&self, x: i64, y: i64) -> bool {
        (0..=self.w).contains(&x) && (0..=self.w).contains(&y)
    }

    fn get(&self, x: i64, y: i64) -> bool {
        self.inside(x, y) && self.cells[self.idx(x, y)]
    }

    fn set(&mut self, x: i64, y: i64) {
        let i = self.idx(x, y);
        self.cells[i] = true;
    }

    /// Adds `g` as a semigroup generator. One lexicographic sweep suffices
    /// because `g` has nonnegative coordinates.
    fn add_generator(&mut self, g: [i64; 2]) {
        debug_assert!(g[0] >= 0 && g[1] >= 0 && g != [0, 0]);
        for x in 0..=self.w - g[0] {
            for y in 0..=self.w - g[1] {
                if self.cells[self.idx(x, y)] {
                    self.set(x + g[0], y + g[1]);
                }
            }
        }
    }

    fn points(&self) -> Vec<[i64; 2]> {
        let mut out = Vec::new();
        for y in 0..=self.w {
            for x in 0..=self.w {
                if self.get(x, y) {
                    out.push([x, y]);
                }
            }
        }
        out
    }

    fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    fn row_occupied(&self, y: i64) -> bool {
        (0..=self.w).any(|x| self.get(x, y))
    }

    fn missing_lines(&self) -> BTreeSet<i64> {
        (0..=self.w).filter(|&y| !self.row_occupied(y)).collect()
    }

    /// Least `y_0` with every `(x, y)`, `x > y ≥ y_0`, occupied.
    fn y_threshold(&self) -> i64 {
        let mut y0 = self.w + 1;
        while y0 > 0 {
            let y = y0 - 1;
            if !(y + 1..=self.w).all(|x| self.get(x, y)) {
                break;
            }
            y0 = y;
        }
        y0
    }

    /// Least `x_0` such that each occupied row below `y_threshold` is filled
    /// from `x_0` to the window edge.
    fn x_threshold(&self, y_threshold: i64) -> i64 {
        let mut x0 = 0;
        for y in 0..y_threshold.min(self.w + 1) {
            if !self.row_occupied(y) {
                continue;
            }
            let last_gap = (0..=self.w).rev().find(|&x| !self.get(x, y));
            if let Some(g) = last_gap {
                x0 = x0.max(g + 1);
            }
        }
        x0
    }
}

fn record(stage: usize, grid: &Grid, new_generators: usize) -> StageRecord {
    let y_threshold = grid.y_threshold();
    StageRecord {
        stage,
        occupied: grid.count(),
        new_generators,
        missing_lines: grid.missing_lines().into_iter().collect(),
        x_threshold: grid.x_threshold(y_threshold),
        y_threshold,
    }
}

/// Point-level model of `R_{j+1} = ⟨R_j, D_φ(R_j)⟩`: forms are replaced by
/// their invariant points and products by sums. The origin stands for the
/// constants and is not differentiated.
pub fn saturate(
    initial: &[InvariantPoint],
    rule: &JumpRule,
    opts: &SaturateOptions,
) -> Result<SaturationState, SemigroupError> {
    let Some(first) = initial.first() else {
        return Err(SemigroupError::Precondition("no initial points".into()));
    };
    let kappa = first.kappa.clone();
    if !kappa.is_positive() {
        return Err(SemigroupError::Precondition("the slope parameter must be positive".into()));
    }
    if opts.window < 2 {
        return Err(SemigroupError::Precondition("window must be at least 2".into()));
    }
    let mut grid = Grid::new(opts.window);
    let mut seeds = Vec::new();
    for p in initial {
        if p.kappa != kappa {
            return Err(SemigroupError::Precondition("initial points disagree on 𝒦".into()));
        }
        let c = p
            .integer_coords()
            .ok_or_else(|| SemigroupError::Precondition(format!("point {p} is not an integer point")))?;
        if !grid.inside(c[0], c[1]) {
            return Err(SemigroupError::Precondition(format!("point {p} lies outside the window")));
        }
        seeds.push(c);
    }
    if !seeds.contains(&[2, 0]) {
        return Err(SemigroupError::Precondition("initial points must contain the ω-point (2, 0)".into()));
    }
    for &s in &seeds {
        if s != [0, 0] && !grid.get(s[0], s[1]) {
            grid.add_generator(s);
        }
    }
    let line_num = rat(2) * &kappa + rat(1);
    let mut log = vec![record(0, &grid, seeds.len())];
    let mut grids = vec![grid.clone()];
    for stage in 1..=opts.stage_cap {
        let mut images = Vec::new();
        for [x, y] in grid.points() {
            if x == 0 && y == 0 {
                continue;
            }
            let beta = if rat(y) == &line_num * rat(x) { rule.beta_at(Some([x, y]))? } else { 0 };
            images.push([x + 1, y + beta]);
        }
        let mut added = 0;
        for [x, y] in images {
            if grid.inside(x, y) && !grid.get(x, y) {
                grid.add_generator([x, y]);
                added += 1;
            }
        }
        let rec = record(stage, &grid, added);
        debug_assert!(rec.missing_lines.iter().all(|y| log[stage - 1].missing_lines.contains(y)));
        log.push(rec);
        grids.push(grid.clone());
        if stage >= 2 && log[stage - 2].missing_lines == log[stage].missing_lines {
            let n0 = stage - 2;
            let at = &log[n0];
            return Ok(SaturationState {
                stage: n0,
                kappa,
                window: opts.window,
                missing_lines: at.missing_lines.iter().copied().collect(),
                x_threshold: at.x_threshold,
                y_threshold: at.y_threshold,
                occupied_stationary: grids[n0 + 1] == grids[n0],
                log,
                grid: grids.swap_remove(n0),
            });
        }
    }
    Err(SemigroupError::NotStationary(opts.stage_cap))
}

/// A named simulator input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub name: &'static str,
    pub initial: Vec<InvariantPoint>,
    pub rule: JumpRule,
}

fn ip(x: i64, y: i64, kappa: &Rational) -> InvariantPoint {
    InvariantPoint::new(rat(x), rat(y), kappa.clone())
}

pub fn bundled_scenarios() -> Vec<Scenario> {
    let one = rat(1);
    let half = crate::rational::ratio(1, 2);
    vec![
        Scenario { name: "no-jump", initial: vec![ip(2, 0, &one), ip(3, 0, &one)], rule: JumpRule::Never },
        Scenario {
            name: "on-line-jump",
            initial: vec![ip(2, 0, &one), ip(3, 0, &one), ip(1, 3, &one)],
            rule: JumpRule::Constant(1),
        },
        Scenario {
            name: "steep-jump",
            initial: vec![ip(2, 0, &half), ip(3, 0, &half), ip(1, 2, &half), ip(3, 5, &half)],
            rule: JumpRule::Constant(2),
        },
        Scenario {
            name: "mixed-table",
            initial: vec![ip(2, 0, &one), ip(3, 0, &one), ip(2, 6, &one)],
            rule: JumpRule::Table {
                default: 1,
                overrides: [([2, 6], 3), ([4, 12], 0)].into_iter().collect(),
            },
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn inst(pts: &[(i64, i64)]) -> Result<SemigroupInstance, SemigroupError> {
        let p: Vec<Point> = pts.iter().map(|&(x, y)| point(x, y)).collect();
        sector_and_lattice(&p)
    }

    #[test]
    fn sectors_and_lattices() {
        let i = inst(&[(1, 0), (0, 1)]).unwrap();
        assert_eq!(i.lattice_basis(), &[point(1, 0), point(0, 1)]);
        assert_eq!(i.extremal(), [&point(1, 0), &point(0, 1)]);

        let i = inst(&[(2, 1), (1, 2), (1, 1)]).unwrap();
        assert_eq!(i.lattice_basis(), &[point(1, 0), point(0, 1)]);
        assert_eq!(i.extremal(), [&point(2, 1), &point(1, 2)]);
        assert_eq!(i.to_sector(&point(1, 1)), [ratio(1, 3), ratio(1, 3)]);

        assert_eq!(inst(&[(1, 0), (2, 0)]), Err(SemigroupError::DegenerateLattice(1)));
        assert_eq!(inst(&[(1, 0), (0, 1), (-1, -1)]), Err(SemigroupError::NonconvexSector));
        assert_eq!(inst(&[(1, 0), (0, 1), (-1, 0)]), Err(SemigroupError::HalfPlaneSector));
    }

    #[test]
    fn lattice_of_rational_points() {
        let i =
            sector_and_lattice(&[[ratio(1, 2), rat(0)], [rat(0), ratio(1, 3)], [ratio(1, 2), ratio(1, 2)]])
                .unwrap();
        // generated by (1/2, 0) and (0, 1/6)
        assert_eq!(i.lattice_basis(), &[[ratio(1, 2), rat(0)], [rat(0), ratio(1, 6)]]);
        let i = inst(&[(2, 0), (1, 3), (0, 6)]).unwrap();
        assert_eq!(i.lattice_basis(), &[point(1, 3), point(0, 6)]);
        assert!(i.lattice_coords(&point(1, 1)).is_none());
        assert_eq!(i.lattice_coords(&point(3, 3)).unwrap(), [BigInt::from(3), BigInt::from(-1)]);
    }

    #[test]
    fn bound_examples() {
        let b = saturation_bound(&inst(&[(1, 0), (0, 1)]).unwrap()).unwrap();
        assert_eq!(b.a, point(0, 0));
        let b = saturation_bound(&inst(&[(2, 1), (1, 2), (1, 1)]).unwrap()).unwrap();
        assert_eq!(b.a, point(2, 2));
        assert_eq!(b.variant, BoundVariant::Strict);
        assert_eq!(b.sector_point, [ratio(2, 3), ratio(2, 3)]);
        assert_eq!(b.printed, [ratio(7, 3), ratio(8, 3)]);
        assert_eq!(b.moduli, vec![(2, "3".to_string())]);
        let b = saturation_bound(&inst(&[(1, 0), (0, 1), (1, 1)]).unwrap()).unwrap();
        assert_eq!(b.a, point(0, 0));
    }

    #[test]
    fn verify_examples() {
        let i = inst(&[(2, 1), (1, 2), (1, 1)]).unwrap();
        assert!(matches!(verify_bound(&i, &point(2, 2), 10), Ok(Verdict::Holds { .. })));
        // this semigroup is saturated, so even the apex passes
        assert!(matches!(verify_bound(&i, &point(0, 0), 10), Ok(Verdict::Holds { .. })));
        let i = inst(&[(1, 0), (0, 1)]).unwrap();
        assert!(matches!(verify_bound(&i, &point(0, 0), 10), Ok(Verdict::Holds { .. })));

        let i = inst(&[(2, 0), (0, 1), (1, 1)]).unwrap();
        assert_eq!(
            verify_bound(&i, &point(0, 0), 10).unwrap(),
            Verdict::Counterexample { point: point(1, 0), checked: 121 }
        );
        let b = saturation_bound(&i).unwrap();
        assert_eq!(b.a, point(1, 1));
        assert!(matches!(verify_bound(&i, &b.a, 10), Ok(Verdict::Holds { .. })));
        assert!(matches!(verify_bound_with_budget(&i, &b.a, 10, 5), Err(SemigroupError::Inconclusive(5))));
        assert!(verify_bound(&i, &b.a, 0).is_err());
    }

    #[test]
    fn residue_maxima_match_enumeration() {
        let i = inst(&[(3, 1), (1, 4), (2, 3), (1, 1), (5, 4)]).unwrap();
        let (strict, printed, moduli) = residue_maxima(&i);
        let coords: Vec<&Point> = moduli.iter().map(|(j, _)| &i.sector_coords()[*j]).collect();
        let ranges: Vec<i64> = moduli.iter().map(|(_, a)| a.to_i64().unwrap()).collect();
        let mut best_x = Rational::zero();
        let mut best_y_strict = Rational::zero();
        let mut best_y_printed = Rational::zero();
        let mut idx = vec![0i64; ranges.len()];
        loop {
            let mut sx = Rational::zero();
            let mut sy = Rational::zero();
            for (k, c) in coords.iter().enumerate() {
                sx += rat(idx[k]) * &c[0];
                sy += rat(idx[k]) * &c[1];
            }
            best_x = best_x.max(sx);
            best_y_strict = best_y_strict.max(sy);
            // ranges up to a_i inclusive for the printed second coordinate
            let mut sy_p = Rational::zero();
            for (k, c) in coords.iter().enumerate() {
                sy_p += rat(idx[k] + 1) * &c[1];
            }
            best_y_printed = best_y_printed.max(sy_p);
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < ranges[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        assert_eq!(strict, [best_x.clone(), best_y_strict]);
        assert_eq!(printed, [best_x, best_y_printed]);
    }

    #[test]
    fn invariant_points() {
        let k = rat(1);
        assert_eq!(invariant_point(4, rat(0), k.clone()).unwrap(), ip(2, 2, &k));
        // ω has a double pole at i, which puts it at (2, 0)
        assert_eq!(invariant_point(4, rat(-2), k.clone()).unwrap(), ip(2, 0, &k));
        assert_eq!(invariant_point(0, rat(0), k.clone()).unwrap(), ip(0, 0, &k));
        assert!(invariant_point(3, rat(0), k).is_err());
    }

    #[test]
    fn dphi_steps() {
        let k = rat(1);
        assert_eq!(dphi_step(&ip(2, 0, &k), &JumpRule::Constant(1)).unwrap(), ip(3, 0, &k));
        assert_eq!(dphi_step(&ip(1, 3, &k), &JumpRule::Constant(1)).unwrap(), ip(2, 4, &k));
        assert_eq!(dphi_step(&ip(5, 2, &k), &JumpRule::Constant(1)).unwrap(), ip(6, 2, &k));
        assert!(matches!(
            dphi_step(&ip(1, 3, &k), &JumpRule::Constant(-1)),
            Err(SemigroupError::InvalidRule(_))
        ));
        assert_eq!(JumpRule::parse("beta=2").unwrap(), JumpRule::Constant(2));
        assert!(JumpRule::parse("beta=-1").is_err());
        assert!(JumpRule::parse("beta=1/2").is_err());
    }

    #[test]
    fn no_jump_is_stationary_at_once() {
        let k = rat(1);
        let s =
            saturate(&[ip(2, 0, &k), ip(3, 0, &k)], &JumpRule::Never, &SaturateOptions::default()).unwrap();
        assert_eq!(s.stage, 0);
        assert!(s.occupied_stationary);
        assert_eq!(s.missing_lines, (1..=200).collect());
        assert!(s.is_occupied(2, 0) && s.is_occupied(3, 0) && s.is_occupied(150, 0));
        assert!(!s.is_occupied(1, 0));
    }

    #[test]
    fn on_line_jumps_fill_lines() {
        let k = rat(1);
        let init = [ip(2, 0, &k), ip(3, 0, &k), ip(1, 3, &k)];
        let s = saturate(&init, &JumpRule::Constant(1), &SaturateOptions::default()).unwrap();
        assert!(s.stage <= 20);
        assert!(s.log[1].missing_lines.len() < s.log[0].missing_lines.len());
        assert!(!s.missing_lines.contains(&0));
        assert_eq!(s.missing_lines, [1, 2, 5].into_iter().collect());
        for w in s.log.windows(2) {
            assert!(w[1].missing_lines.iter().all(|y| w[0].missing_lines.contains(y)));
        }
    }

    #[test]
    fn saturate_preconditions() {
        let k = rat(1);
        assert!(matches!(
            saturate(&[ip(3, 0, &k)], &JumpRule::Never, &SaturateOptions::default()),
            Err(SemigroupError::Precondition(_))
        ));
        assert!(saturate(&[], &JumpRule::Never, &SaturateOptions::default()).is_err());
        let opts = SaturateOptions { stage_cap: 1, window: 50 };
        assert_eq!(saturate(&[ip(2, 0, &k)], &JumpRule::Never, &opts), Err(SemigroupError::NotStationary(1)));
    }

    #[test]
    fn bundled_scenarios_are_monotone_and_stationary() {
        for sc in bundled_scenarios() {
            let s = saturate(&sc.initial, &sc.rule, &SaturateOptions::default())
                .unwrap_or_else(|e| panic!("{}: {e}", sc.name));
            for w in s.log.windows(2) {
                assert!(w[1].missing_lines.iter().all(|y| w[0].missing_lines.contains(y)), "{}", sc.name);
            }
        }
    }
}
