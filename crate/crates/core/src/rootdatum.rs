//! Root data with torsion: the lattice `Λ = Z^r ⊕ ⊕ Z/n_i`, its roots and
//! coroots, the finite Weyl group `W₀`, the parameter function and the
//! saturation order on antidominant elements.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{DatumError, Error, Result};
use crate::intlin::{self, rat, Rat};

/// Upper bound on `|W₀|` before the enumeration is declared infinite.
pub const MAX_FINITE_WEYL: usize = 60_000;
/// Largest `|W₀|` for which a full multiplication table is stored.
const TABLE_LIMIT: usize = 4096;

/// The on-disk description of a root datum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub free_rank: usize,
    #[serde(default)]
    pub torsion_invariants: Vec<u32>,
    pub simple_coroots: Vec<Vec<i64>>,
    pub simple_roots: Vec<Vec<i64>>,
    /// `s_i(λ) = M_i λ`; either `r × r` on the free part or
    /// `(r+k) × (r+k)` including the torsion coordinates.
    pub finite_generators: Vec<Vec<Vec<i64>>>,
    /// `L(s)` keyed by `"s<k>"`; missing generators default to 1.
    #[serde(default)]
    pub affine_parameters: BTreeMap<String, u32>,
    pub component_highest_roots: Vec<Vec<i64>>,
}

impl DatumConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
        })
    }
}

/// An element of `Λ`: free coordinates and torsion residues.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct LatticeElt {
    pub free: SmallVec<[i64; 4]>,
    pub tors: SmallVec<[u32; 2]>,
}

impl LatticeElt {
    pub fn new(free: &[i64], tors: &[u32]) -> Self {
        LatticeElt { free: free.into(), tors: tors.into() }
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|&x| x == 0) && self.tors.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for LatticeElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free: Vec<String> = self.free.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", free.join(","))?;
        if !self.tors.is_empty() {
            let t: Vec<String> = self.tors.iter().map(|x| x.to_string()).collect();
            write!(f, ";{}", t.join(","))?;
        }
        Ok(())
    }
}

/// A root together with its coroot.
#[derive(Clone, Debug)]
pub struct Root {
    /// Coordinates in the simple roots.
    pub coeffs: Vec<i64>,
    /// The root as an integer functional on `Z^r`.
    pub covec: Vec<i64>,
    /// The coroot as a vector in `Z^r`.
    pub coroot: Vec<i64>,
    pub component: usize,
}

#[derive(Clone, Debug)]
pub struct FiniteElt {
    /// Row-major `r × r` matrix on the free part.
    pub mat: Vec<i64>,
    /// Reduced word in finite simple indices (`0..n`).
    pub word: Vec<u8>,
    pub inv: u16,
    /// Image of each root index (see [`Datum::roots`]).
    pub root_perm: Vec<u32>,
}

/// What validation reports about an accepted datum.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub name: String,
    pub weyl_order: usize,
    pub positive_roots: usize,
    pub generators: Vec<String>,
    /// Coxeter matrix of `S_aff`; `0` encodes `∞`.
    pub coxeter_matrix: Vec<Vec<u32>>,
    pub parameters: Vec<u32>,
    pub equal_parameters: bool,
    pub simply_laced: bool,
    /// Length-zero elements generating `Ω` modulo torsion, in textual form.
    pub omega_generators: Vec<String>,
    pub torsion_invariants: Vec<u32>,
    pub central_rank: usize,
}

/// A validated root datum. Immutable once built.
#[derive(Debug)]
pub struct Datum {
    pub config: DatumConfig,
    pub r: usize,
    /// Semisimple rank: the number of simple roots.
    pub n: usize,
    pub torsion: Vec<u32>,
    pub coroots: Vec<Vec<i64>>,
    pub simple_roots: Vec<Vec<i64>>,
    /// `cartan[i][j] = ⟨α_i∨, α_j⟩`.
    pub cartan: Vec<Vec<i64>>,
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    /// Positive roots first, then their negatives in the same order.
    pub roots: Vec<Root>,
    pub num_pos: usize,
    pub w0: Vec<FiniteElt>,
    w0_index: HashMap<Vec<i64>, u16>,
    w0_table: Option<Vec<u16>>,
    simple_idx: Vec<u16>,
    /// Action of each finite simple reflection on root indices.
    simple_root_action: Vec<Vec<u32>>,
    pub longest: u16,
    pub simple_root_idx: Vec<usize>,
    pub highest_root_idx: Vec<usize>,
    /// Affine generators: per component `(θ∨, s_θ)`.
    pub affine_gens: Vec<(Vec<i64>, u16)>,
    pub params: Vec<u32>,
    pub coxeter: Vec<Vec<u32>>,
    pub equal_parameters: bool,
    pub simply_laced: bool,
    /// Basis of `Λ_z = {λ : ⟨λ, α⟩ = 0 ∀α}` in the free part.
    pub central_basis: Vec<Vec<i64>>,
    /// `2ρ∨` of each component.
    pub rho2_coroot: Vec<Vec<i64>>,
    /// `E(e_j)` on the free basis; `E` vanishes on torsion.
    pub exponent_basis: Vec<i64>,
    pub omega_generators: Vec<crate::affweyl::ExtWeylElt>,
}

fn malformed(msg: impl Into<String>) -> Error {
    DatumError::Malformed(msg.into()).into()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn matmul(a: &[i64], b: &[i64], r: usize) -> Vec<i64> {
    let mut c = vec![0; r * r];
    for i in 0..r {
        for k in 0..r {
            let x = a[i * r + k];
            if x != 0 {
                for j in 0..r {
                    c[i * r + j] += x * b[k * r + j];
                }
            }
        }
    }
    c
}

impl Datum {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::new(DatumConfig::from_json_str(text)?)
    }

    /// Validates `cfg` and builds all derived tables.
    pub fn new(cfg: DatumConfig) -> Result<Self> {
        let r = cfg.free_rank;
        let n = cfg.simple_roots.len();
        let k = cfg.torsion_invariants.len();
        if cfg.simple_coroots.len() != n {
            return Err(malformed(format!(
                "{} simple roots but {} simple coroots",
                n,
                cfg.simple_coroots.len()
            )));
        }
        if cfg.finite_generators.len() != n {
            return Err(malformed(format!(
                "{} simple roots but {} finite generators",
                n,
                cfg.finite_generators.len()
            )));
        }
        for (i, v) in cfg.simple_roots.iter().chain(&cfg.simple_coroots).enumerate() {
            if v.len() != r {
                return Err(malformed(format!("root/coroot vector {i} has length {} != free_rank {r}", v.len())));
            }
        }
        if let Some(t) = cfg.torsion_invariants.iter().find(|&&t| t < 2) {
            return Err(malformed(format!("torsion invariant {t} must be at least 2")));
        }
        if n > 32 {
            return Err(malformed("more than 32 simple roots"));
        }

        // Cartan matrix and crystallographic checks.
        let cartan: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| dot(&cfg.simple_coroots[i], &cfg.simple_roots[j])).collect())
            .collect();
        for i in 0..n {
            if cartan[i][i] != 2 {
                return Err(DatumError::NonCrystallographic(format!(
                    "Cartan check: <a{i}^v, a{i}> = {} (expected 2)",
                    cartan[i][i]
                ))
                .into());
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (a, b) = (cartan[i][j], cartan[j][i]);
                if a > 0 || (a == 0) != (b == 0) || !(0..=3).contains(&(a * b)) {
                    return Err(DatumError::NonCrystallographic(format!(
                        "Cartan check: entries ({i},{j}) = {a} and ({j},{i}) = {b} are not crystallographic"
                    ))
                    .into());
                }
            }
        }
        if intlin::rank(&cfg.simple_coroots) != n {
            return Err(malformed("simple coroots are linearly dependent"));
        }
        if intlin::rank(&cfg.simple_roots) != n {
            return Err(malformed("simple roots are linearly dependent"));
        }

        // Generator matrices: reflection formula and torsion action.
        let mut gen_mats = Vec::with_capacity(n);
        for (i, m) in cfg.finite_generators.iter().enumerate() {
            let dim = m.len();
            if dim != r && dim != r + k {
                return Err(malformed(format!("finite generator {i} has {dim} rows")));
            }
            if m.iter().any(|row| row.len() != dim) {
                return Err(malformed(format!("finite generator {i} is not square")));
            }
            if dim == r + k && k > 0 {
                for a in 0..dim {
                    for b in 0..dim {
                        if a >= r || b >= r {
                            let expect = i64::from(a == b);
                            let got = m[a][b];
                            let ok = if a >= r && b >= r && a == b {
                                (got - 1).rem_euclid(cfg.torsion_invariants[a - r] as i64) == 0
                            } else if a >= r && b >= r {
                                got.rem_euclid(cfg.torsion_invariants[a - r] as i64) == 0
                            } else {
                                got == expect
                            };
                            if !ok {
                                return Err(DatumError::TorsionNotFixed(i).into());
                            }
                        }
                    }
                }
            }
            let mut mat = vec![0i64; r * r];
            for a in 0..r {
                for b in 0..r {
                    mat[a * r + b] = m[a][b];
                    let expect = i64::from(a == b) - cfg.simple_coroots[i][a] * cfg.simple_roots[i][b];
                    if m[a][b] != expect {
                        return Err(DatumError::NonCrystallographic(format!(
                            "generator {i} is not the reflection λ ↦ λ - <λ,a{i}> a{i}^v"
                        ))
                        .into());
                    }
                }
            }
            gen_mats.push(mat);
        }

        // Connected components of the Dynkin diagram.
        let mut component_of = vec![usize::MAX; n];
        let mut components: Vec<Vec<usize>> = Vec::new();
        for s in 0..n {
            if component_of[s] != usize::MAX {
                continue;
            }
            let c = components.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            component_of[s] = c;
            while let Some(i) = stack.pop() {
                members.push(i);
                for j in 0..n {
                    if cartan[i][j] != 0 && component_of[j] == usize::MAX {
                        component_of[j] = c;
                        stack.push(j);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        let c = components.len();
        if cfg.component_highest_roots.len() != c {
            return Err(DatumError::HighestRoot(format!(
                "{} components but {} highest roots",
                c,
                cfg.component_highest_roots.len()
            ))
            .into());
        }

        // Root system by closure under simple reflections, in coordinates.
        let reflect_root = |i: usize, b: &[i64]| -> Vec<i64> {
            let mut out = b.to_vec();
            out[i] -= (0..n).map(|j| cartan[i][j] * b[j]).sum::<i64>();
            out
        };
        let reflect_coroot = |i: usize, b: &[i64]| -> Vec<i64> {
            let mut out = b.to_vec();
            out[i] -= (0..n).map(|j| b[j] * cartan[j][i]).sum::<i64>();
            out
        };
        let mut seen: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
        let mut queue: VecDeque<(Vec<i64>, Vec<i64>)> = VecDeque::new();
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            seen.insert(e.clone(), e.clone());
            queue.push_back((e.clone(), e));
        }
        while let Some((b, cb)) = queue.pop_front() {
            if seen.len() > 2 * MAX_FINITE_WEYL {
                return Err(DatumError::InfiniteFiniteWeyl(MAX_FINITE_WEYL).into());
            }
            for i in 0..n {
                let nb = reflect_root(i, &b);
                if !seen.contains_key(&nb) {
                    let nc = reflect_coroot(i, &cb);
                    seen.insert(nb.clone(), nc.clone());
                    queue.push_back((nb, nc));
                }
            }
        }
        let mut pos: Vec<(Vec<i64>, Vec<i64>)> = seen
            .into_iter()
            .filter(|(b, _)| b.iter().all(|&x| x >= 0))
            .collect();
        pos.sort_by(|a, b| {
            let ha: i64 = a.0.iter().sum();
            let hb: i64 = b.0.iter().sum();
            ha.cmp(&hb).then_with(|| b.0.cmp(&a.0))
        });
        let num_pos = pos.len();
        let make_root = |coeffs: Vec<i64>, cc: Vec<i64>| -> Root {
            let covec: Vec<i64> = (0..r)
                .map(|a| (0..n).map(|j| coeffs[j] * cfg.simple_roots[j][a]).sum())
                .collect();
            let coroot: Vec<i64> = (0..r)
                .map(|a| (0..n).map(|j| cc[j] * cfg.simple_coroots[j][a]).sum())
                .collect();
            let component = (0..n).find(|&j| coeffs[j] != 0).map_or(0, |j| component_of[j]);
            Root { coeffs, covec, coroot, component }
        };
        let mut roots: Vec<Root> = pos.iter().map(|(b, cb)| make_root(b.clone(), cb.clone())).collect();
        for (b, cb) in &pos {
            let nb: Vec<i64> = b.iter().map(|x| -x).collect();
            let nc: Vec<i64> = cb.iter().map(|x| -x).collect();
            roots.push(make_root(nb, nc));
        }
        let root_index: HashMap<Vec<i64>, u32> = roots
            .iter()
            .enumerate()
            .map(|(i, rt)| (rt.coeffs.clone(), i as u32))
            .collect();
        let simple_root_action: Vec<Vec<u32>> = (0..n)
            .map(|i| roots.iter().map(|rt| root_index[&reflect_root(i, &rt.coeffs)]).collect())
            .collect();

        // Finite Weyl group by breadth-first search on matrices.
        let identity: Vec<i64> = (0..r * r).map(|x| i64::from(x / r.max(1) == x % r.max(1))).collect();
        let mut w0: Vec<FiniteElt> = vec![FiniteElt {
            mat: identity.clone(),
            word: Vec::new(),
            inv: 0,
            root_perm: (0..roots.len() as u32).collect(),
        }];
        let mut w0_index: HashMap<Vec<i64>, u16> = HashMap::new();
        w0_index.insert(identity, 0);
        let mut right_gen: Vec<Vec<u16>> = Vec::new();
        let mut head = 0;
        while head < w0.len() {
            let mut row = Vec::with_capacity(n);
            for i in 0..n {
                let m = matmul(&w0[head].mat, &gen_mats[i], r);
                let idx = match w0_index.get(&m) {
                    Some(&j) => j,
                    None => {
                        if w0.len() >= MAX_FINITE_WEYL {
                            return Err(DatumError::InfiniteFiniteWeyl(MAX_FINITE_WEYL).into());
                        }
                        let mut word = w0[head].word.clone();
                        word.push(i as u8);
                        let perm = simple_root_action[i]
                            .iter()
                            .map(|&b| w0[head].root_perm[b as usize])
                            .collect();
                        let j = w0.len() as u16;
                        w0_index.insert(m.clone(), j);
                        w0.push(FiniteElt { mat: m, word, inv: 0, root_perm: perm });
                        j
                    }
                };
                row.push(idx);
            }
            right_gen.push(row);
            head += 1;
        }
        let order = w0.len();
        let w0_table = if order <= TABLE_LIMIT {
            let mut table = vec![0u16; order * order];
            for a in 0..order {
                // Follow b's word from a by right multiplication.
                for b in 0..order {
                    let mut x = a as u16;
                    for &g in &w0[b].word {
                        x = right_gen[x as usize][g as usize];
                    }
                    table[a * order + b] = x;
                }
            }
            Some(table)
        } else {
            None
        };
        for a in 0..order {
            let mut x = 0u16;
            for &g in w0[a].word.iter().rev() {
                x = right_gen[x as usize][g as usize];
            }
            w0[a].inv = x;
        }
        let longest = (0..order).max_by_key(|&a| w0[a].word.len()).unwrap_or(0) as u16;

        let simple_root_idx: Vec<usize> = (0..n)
            .map(|i| {
                let e: Vec<i64> = (0..n).map(|j| i64::from(i == j)).collect();
                root_index[&e] as usize
            })
            .collect();

        // Highest roots and affine generators.
        let mut highest_root_idx = Vec::with_capacity(c);
        let mut affine_gens = Vec::with_capacity(c);
        for (ci, theta) in cfg.component_highest_roots.iter().enumerate() {
            let idx = (0..num_pos).find(|&i| roots[i].covec == *theta).ok_or_else(|| {
                Error::from(DatumError::HighestRoot(format!("component {ci}: {theta:?} is not a positive root")))
            })?;
            let rt = &roots[idx];
            if rt.component != ci {
                return Err(DatumError::HighestRoot(format!("component {ci}: root lies in component {}", rt.component)).into());
            }
            for &i in &components[ci] {
                let mut up = rt.coeffs.clone();
                up[i] += 1;
                if root_index.contains_key(&up) {
                    return Err(DatumError::HighestRoot(format!(
                        "component {ci}: adding simple root {i} gives a root"
                    ))
                    .into());
                }
            }
            let refl: Vec<i64> = (0..r * r)
                .map(|x| {
                    let (a, b) = (x / r, x % r);
                    i64::from(a == b) - rt.coroot[a] * rt.covec[b]
                })
                .collect();
            let u = *w0_index.get(&refl).ok_or_else(|| {
                Error::from(DatumError::HighestRoot(format!("component {ci}: reflection not in W0")))
            })?;
            affine_gens.push((rt.coroot.clone(), u));
            highest_root_idx.push(idx);
        }

        // Parameters.
        let num_gens = c + n;
        let mut params = vec![1u32; num_gens];
        for (key, &val) in &cfg.affine_parameters {
            let idx: usize = key
                .strip_prefix('s')
                .and_then(|s| s.parse().ok())
                .filter(|&i: &usize| i < num_gens)
                .ok_or_else(|| Error::from(DatumError::InvalidParameter(format!("unknown generator {key:?}"))))?;
            if val == 0 {
                return Err(DatumError::InvalidParameter(format!("{key} must be positive")).into());
            }
            params[idx] = val;
        }

        let central_basis = intlin::integer_kernel(&cfg.simple_roots, r);
        let rho2_coroot: Vec<Vec<i64>> = (0..c)
            .map(|ci| {
                let mut v = vec![0i64; r];
                for rt in roots[..num_pos].iter().filter(|rt| rt.component == ci) {
                    for a in 0..r {
                        v[a] += rt.coroot[a];
                    }
                }
                v
            })
            .collect();
        let simply_laced = (0..n).all(|i| (0..n).all(|j| i == j || cartan[i][j] * cartan[j][i] <= 1));

        let mut datum = Datum {
            r,
            n,
            torsion: cfg.torsion_invariants.clone(),
            coroots: cfg.simple_coroots.clone(),
            simple_roots: cfg.simple_roots.clone(),
            cartan,
            components,
            component_of,
            roots,
            num_pos,
            w0,
            w0_index,
            w0_table,
            simple_idx: right_gen[0].clone(),
            simple_root_action,
            longest,
            simple_root_idx,
            highest_root_idx,
            affine_gens,
            params,
            coxeter: Vec::new(),
            equal_parameters: false,
            simply_laced,
            central_basis,
            rho2_coroot,
            exponent_basis: Vec::new(),
            omega_generators: Vec::new(),
            config: cfg,
        };
        datum.coxeter = datum.compute_coxeter_matrix();
        datum.check_parameters()?;
        datum.equal_parameters = datum.params.iter().all(|&p| p == datum.params[0]);
        datum.exponent_basis = (0..r)
            .map(|j| {
                let mut e = vec![0i64; r];
                e[j] = 1;
                datum.exponent_by_length(&datum.lattice(&e, &[]))
            })
            .collect();
        Ok(datum)
    }

    /// Checks that `L` agrees on odd braid pairs and is invariant under
    /// conjugation by the length-zero elements.
    fn check_parameters(&mut self) -> Result<()> {
        let g = self.num_generators();
        for a in 0..g {
            for b in a + 1..g {
                let m = self.coxeter[a][b];
                if m % 2 == 1 && self.params[a] != self.params[b] {
                    return Err(DatumError::ParameterBraidMismatch(a, b).into());
                }
            }
        }
        self.omega_generators = self.compute_omega_generators();
        for om in &self.omega_generators {
            let oinv = self.inverse(om);
            for s in 0..g {
                let conj = self.compose(&self.compose(om, &self.generator(s)), &oinv);
                let t = (0..g).find(|&t| self.generator(t) == conj);
                match t {
                    Some(t) if self.params[t] == self.params[s] => {}
                    Some(t) => return Err(DatumError::ParameterBraidMismatch(s, t).into()),
                    None => {
                        return Err(DatumError::InvalidParameter(format!(
                            "length-zero element {} does not permute the generators",
                            self.format_elt(om)
                        ))
                        .into())
                    }
                }
            }
        }
        Ok(())
    }

    /// Coxeter matrix of `S_aff` from element orders; `0` encodes `∞`.
    fn compute_coxeter_matrix(&self) -> Vec<Vec<u32>> {
        let g = self.num_generators();
        let mut m = vec![vec![1u32; g]; g];
        for a in 0..g {
            for b in 0..g {
                if a == b {
                    continue;
                }
                let st = self.compose(&self.generator(a), &self.generator(b));
                let mut x = st.clone();
                let mut order = 0;
                for k in 1..=6 {
                    if x == self.identity() {
                        order = k;
                        break;
                    }
                    x = self.compose(&x, &st);
                }
                m[a][b] = order;
            }
        }
        m
    }

    fn compute_omega_generators(&self) -> Vec<crate::affweyl::ExtWeylElt> {
        let mut out: Vec<crate::affweyl::ExtWeylElt> = Vec::new();
        for j in 0..self.r {
            let mut e = vec![0i64; self.r];
            e[j] = 1;
            let t = self.translation(&self.lattice(&e, &[]));
            let (_, om) = self.reduced_word(&t);
            if om != self.identity() && !out.contains(&om) {
                out.push(om);
            }
        }
        for (i, _) in self.torsion.iter().enumerate() {
            let mut tors = vec![0u32; self.torsion.len()];
            tors[i] = 1;
            out.push(self.translation(&self.lattice(&vec![0; self.r], &tors)));
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// `|S_aff|`: one affine generator per component plus the finite simples.
    pub fn num_generators(&self) -> usize {
        self.components.len() + self.n
    }

    /// The `S_aff` index of finite simple reflection `i`.
    pub fn finite_generator_index(&self, i: usize) -> usize {
        self.components.len() + i
    }

    /// Generators of the affine component containing finite simple `i`, and
    /// for affine index `k < c` the generators of component `k`.
    pub fn component_generators(&self, comp: usize) -> Vec<usize> {
        let mut v = vec![comp];
        v.extend(self.components[comp].iter().map(|&i| self.finite_generator_index(i)));
        v
    }

    pub fn report(&self) -> ValidationReport {
        let g = self.num_generators();
        ValidationReport {
            name: self.config.name.clone(),
            weyl_order: self.w0.len(),
            positive_roots: self.num_pos,
            generators: (0..g).map(|s| self.format_elt(&self.generator(s))).collect(),
            coxeter_matrix: self.coxeter.clone(),
            parameters: self.params.clone(),
            equal_parameters: self.equal_parameters,
            simply_laced: self.simply_laced,
            omega_generators: self.omega_generators.iter().map(|o| self.format_elt(o)).collect(),
            torsion_invariants: self.torsion.clone(),
            central_rank: self.central_basis.len(),
        }
    }

    // ---- lattice arithmetic -------------------------------------------

    pub fn lattice(&self, free: &[i64], tors: &[u32]) -> LatticeElt {
        let mut t: SmallVec<[u32; 2]> = SmallVec::with_capacity(self.torsion.len());
        for (i, &n) in self.torsion.iter().enumerate() {
            t.push(tors.get(i).copied().unwrap_or(0) % n);
        }
        LatticeElt { free: free.into(), tors: t }
    }

    pub fn zero(&self) -> LatticeElt {
        self.lattice(&vec![0; self.r], &[])
    }

    pub fn add(&self, a: &LatticeElt, b: &LatticeElt) -> LatticeElt {
        LatticeElt {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            tors: a
                .tors
                .iter()
                .zip(&b.tors)
                .zip(&self.torsion)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        }
    }

    pub fn neg(&self, a: &LatticeElt) -> LatticeElt {
        LatticeElt {
            free: a.free.iter().map(|x| -x).collect(),
            tors: a.tors.iter().zip(&self.torsion).map(|(x, n)| (n - x) % n).collect(),
        }
    }

    pub fn sub(&self, a: &LatticeElt, b: &LatticeElt) -> LatticeElt {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &LatticeElt, k: i64) -> LatticeElt {
        LatticeElt {
            free: a.free.iter().map(|x| x * k).collect(),
            tors: a
                .tors
                .iter()
                .zip(&self.torsion)
                .map(|(&x, &n)| (x as i64 * k).rem_euclid(n as i64) as u32)
                .collect(),
        }
    }

    pub fn from_free(&self, free: &[i64]) -> LatticeElt {
        self.lattice(free, &[])
    }

    /// `⟨free(m), β⟩` for the root with index `b`.
    pub fn pair_root(&self, m: &LatticeElt, b: usize) -> i64 {
        dot(&m.free, &self.roots[b].covec)
    }

    pub fn pair_simple(&self, m: &LatticeElt, i: usize) -> i64 {
        dot(&m.free, &self.simple_roots[i])
    }

    // ---- finite Weyl group --------------------------------------------

    pub fn w0_order(&self) -> usize {
        self.w0.len()
    }

    pub fn w0_mul(&self, a: u16, b: u16) -> u16 {
        match &self.w0_table {
            Some(t) => t[a as usize * self.w0.len() + b as usize],
            None => self.w0_index[&matmul(&self.w0[a as usize].mat, &self.w0[b as usize].mat, self.r)],
        }
    }

    pub fn w0_inv(&self, a: u16) -> u16 {
        self.w0[a as usize].inv
    }

    /// The W₀ element of finite simple reflection `i`.
    pub fn simple_reflection(&self, i: usize) -> u16 {
        self.simple_idx[i]
    }

    pub fn w0_from_word(&self, word: &[u8]) -> u16 {
        let mut m: Vec<i64> = self.w0[0].mat.clone();
        for &g in word {
            let gm = &self.w0[self.simple_idx[g as usize] as usize].mat;
            m = matmul(&m, gm, self.r);
        }
        self.w0_index[&m]
    }

    /// Image of root index `b` under `u`.
    pub fn root_image(&self, u: u16, b: usize) -> usize {
        self.w0[u as usize].root_perm[b] as usize
    }

    pub fn is_positive_root(&self, b: usize) -> bool {
        b < self.num_pos
    }

    pub fn simple_root_index(&self, i: usize) -> usize {
        self.simple_root_idx[i]
    }

    /// `u(m)`; torsion is fixed.
    pub fn act_finite(&self, u: u16, m: &LatticeElt) -> LatticeElt {
        let mat = &self.w0[u as usize].mat;
        let r = self.r;
        let free = (0..r).map(|a| (0..r).map(|b| mat[a * r + b] * m.free[b]).sum()).collect();
        LatticeElt { free, tors: m.tors.clone() }
    }

    /// Applies a word in finite simple indices (rightmost acts first).
    pub fn act_word(&self, word: &[u8], m: &LatticeElt) -> LatticeElt {
        self.act_finite(self.w0_from_word(word), m)
    }

    /// Reflection action of the simple root action table (used by the root closure).
    pub fn simple_action_on_roots(&self, i: usize) -> &[u32] {
        &self.simple_root_action[i]
    }

    // ---- dominance and the coroot lattice ------------------------------

    pub fn is_antidominant(&self, m: &LatticeElt) -> bool {
        (0..self.n).all(|i| self.pair_simple(m, i) <= 0)
    }

    pub fn is_dominant(&self, m: &LatticeElt) -> bool {
        (0..self.n).all(|i| self.pair_simple(m, i) >= 0)
    }

    /// The antidominant element of the W₀-orbit of `m`.
    pub fn antidominant_rep(&self, m: &LatticeElt) -> LatticeElt {
        let mut x = m.clone();
        loop {
            let Some(i) = (0..self.n).find(|&i| self.pair_simple(&x, i) > 0) else {
                return x;
            };
            let k = self.pair_simple(&x, i);
            for a in 0..self.r {
                x.free[a] -= k * self.coroots[i][a];
            }
        }
    }

    /// The W₀-orbit of `m`, sorted, each point once.
    pub fn orbit(&self, m: &LatticeElt) -> Vec<LatticeElt> {
        let set: BTreeSet<LatticeElt> = (0..self.w0.len() as u16).map(|u| self.act_finite(u, m)).collect();
        set.into_iter().collect()
    }

    /// Integer coordinates of `m` over the simple coroots, when they exist.
    pub fn in_coroot_lattice(&self, m: &LatticeElt) -> Option<Vec<i64>> {
        if m.tors.iter().any(|&t| t != 0) {
            return None;
        }
        let a: Vec<Vec<Rat>> = (0..self.r)
            .map(|row| (0..self.n).map(|j| rat(self.coroots[j][row])).collect())
            .collect();
        let b: Vec<Rat> = m.free.iter().map(|&x| rat(x)).collect();
        let sol = if self.n == 0 {
            if m.free.iter().all(|&x| x == 0) {
                Some(Vec::new())
            } else {
                None
            }
        } else {
            intlin::solve_unique(&a, &b)
        }?;
        sol.iter()
            .map(|x| if intlin::is_integral(x) { x.to_integer().to_i64() } else { None })
            .collect()
    }

    /// Rational coordinates `c` with `proj(m) = -Σ c_i α_i∨`, where `proj` is
    /// the projection onto the span of the coroots along `Λ_z`. For
    /// antidominant `m` all `c_i ≥ 0`.
    pub fn neg_coroot_coords(&self, m: &LatticeElt) -> Vec<Rat> {
        if self.n == 0 {
            return Vec::new();
        }
        // Σ_j c'_j ⟨α_j∨, α_i⟩ = ⟨m, α_i⟩, c = -c'.
        let a: Vec<Vec<Rat>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| rat(self.cartan[j][i])).collect())
            .collect();
        let b: Vec<Rat> = (0..self.n).map(|i| rat(self.pair_simple(m, i))).collect();
        intlin::solve_unique(&a, &b)
            .expect("Cartan matrix is invertible")
            .into_iter()
            .map(|x| -x)
            .collect()
    }

    /// Coordinates of the central part of `m` over [`Datum::central_basis`].
    pub fn central_coords(&self, m: &LatticeElt) -> Vec<Rat> {
        let k = self.central_basis.len();
        if k == 0 {
            return Vec::new();
        }
        let cols = self.n + k;
        let a: Vec<Vec<Rat>> = (0..self.r)
            .map(|row| {
                (0..cols)
                    .map(|j| {
                        if j < self.n {
                            rat(self.coroots[j][row])
                        } else {
                            rat(self.central_basis[j - self.n][row])
                        }
                    })
                    .collect()
            })
            .collect();
        let b: Vec<Rat> = m.free.iter().map(|&x| rat(x)).collect();
        let sol = intlin::solve_unique(&a, &b).expect("coroots and Λ_z span Λ ⊗ Q");
        sol[self.n..].to_vec()
    }

    /// `⌈Σ c_i⌉` for the coordinates of [`Datum::neg_coroot_coords`].
    pub fn height(&self, m: &LatticeElt) -> i64 {
        let s: Rat = self.neg_coroot_coords(m).into_iter().fold(rat(0), |a, b| a + b);
        intlin::ceil(&s).to_i64().unwrap_or(i64::MAX)
    }

    /// `m ≼ x`: both antidominant and `m - x` is an `N`-combination of simple
    /// coroots.
    pub fn saturation_le(&self, m: &LatticeElt, x: &LatticeElt) -> bool {
        if !self.is_antidominant(m) || !self.is_antidominant(x) {
            return false;
        }
        match self.in_coroot_lattice(&self.sub(m, x)) {
            Some(c) => c.iter().all(|&ci| ci >= 0),
            None => false,
        }
    }

    /// All antidominant `m ≼ x`, sorted with `x` first and by decreasing rank.
    pub fn saturation_predecessors(&self, x: &LatticeElt) -> Result<Vec<LatticeElt>> {
        if !self.is_antidominant(x) {
            return Err(Error::NotAntidominant(x.to_string()));
        }
        let bounds: Vec<i64> = self
            .neg_coroot_coords(x)
            .iter()
            .map(|c| intlin::floor(c).to_i64().unwrap_or(0).max(0))
            .collect();
        let mut out = Vec::new();
        let mut steps = vec![0i64; self.n];
        loop {
            let mut m = x.clone();
            for (i, &k) in steps.iter().enumerate() {
                for a in 0..self.r {
                    m.free[a] += k * self.coroots[i][a];
                }
            }
            if self.is_antidominant(&m) {
                out.push((steps.iter().sum::<i64>(), m));
            }
            // Odometer over the box 0 ≤ steps_i ≤ bounds_i.
            let mut i = 0;
            while i < self.n {
                if steps[i] < bounds[i] {
                    steps[i] += 1;
                    break;
                }
                steps[i] = 0;
                i += 1;
            }
            if i == self.n {
                break;
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        Ok(out.into_iter().map(|(_, m)| m).collect())
    }

    /// Representatives of antidominant elements of height at most `h`,
    /// one per class modulo the central translations `Λ_z`, chosen with
    /// central coordinates in `[-1/2, 1/2)`. Sorted by (height, element).
    pub fn antidominant_up_to_height(&self, h: i64) -> Vec<LatticeElt> {
        let r = self.r;
        let half = Rat::new(1.into(), 2.into());
        let mut bound = vec![0i64; r];
        for a in 0..r {
            let s: i64 = (0..self.n).map(|i| self.coroots[i][a].abs()).sum::<i64>() * h.max(0);
            let z: i64 = self.central_basis.iter().map(|v| v[a].abs()).sum();
            bound[a] = s + z;
        }
        let tors_all = self.all_torsion();
        let mut out: Vec<(i64, LatticeElt)> = Vec::new();
        let mut v: Vec<i64> = bound.iter().map(|b| -b).collect();
        if r == 0 {
            for t in &tors_all {
                out.push((0, self.lattice(&[], t)));
            }
        } else {
            loop {
                let m = self.from_free(&v);
                if self.is_antidominant(&m) {
                    let ht = self.height(&m);
                    let central_ok = self
                        .central_coords(&m)
                        .iter()
                        .all(|t| *t >= -half.clone() && *t < half);
                    if ht <= h && central_ok {
                        for t in &tors_all {
                            out.push((ht, self.lattice(&v, t)));
                        }
                    }
                }
                let mut a = 0;
                while a < r {
                    if v[a] < bound[a] {
                        v[a] += 1;
                        break;
                    }
                    v[a] = -bound[a];
                    a += 1;
                }
                if a == r {
                    break;
                }
            }
        }
        out.sort();
        out.into_iter().map(|(_, m)| m).collect()
    }

    /// Every torsion residue tuple.
    pub fn all_torsion(&self) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = vec![Vec::new()];
        for &n in &self.torsion {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..n).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Canonical antidominant shift `m∘` with `m + m∘` antidominant: per
    /// component `k_c · (-2ρ∨_c)` with `k_c` minimal.
    pub fn canonical_shift(&self, m: &LatticeElt) -> LatticeElt {
        let mut out = self.zero();
        for (ci, comp) in self.components.iter().enumerate() {
            let k = comp
                .iter()
                .map(|&i| {
                    let p = self.pair_simple(m, i);
                    (p + 1).div_euclid(2)
                })
                .max()
                .unwrap_or(0)
                .max(0);
            for a in 0..self.r {
                out.free[a] -= k * self.rho2_coroot[ci][a];
            }
        }
        out
    }

    /// The homomorphism `E : Λ → Z` with `E(m) = L(t_m)` on antidominant `m`.
    pub fn exponent_e(&self, m: &LatticeElt) -> i64 {
        dot(&m.free, &self.exponent_basis)
    }

    fn exponent_by_length(&self, m: &LatticeElt) -> i64 {
        let shift = self.canonical_shift(m);
        let total = self.add(m, &shift);
        let lw = |x: &LatticeElt| -> i64 {
            let (word, _) = self.reduced_word(&self.translation(x));
            word.iter().map(|&s| self.params[s as usize] as i64).sum()
        };
        lw(&total) - lw(&shift)
    }

    /// A stable hash-free fingerprint of the configuration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.config).expect("config serializes")
    }
}

/// Convenience for tests and callers that hold free coordinates only.
pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn is_nonnegative(x: &Rat) -> bool {
    !x.is_negative() || x.is_zero()
}
