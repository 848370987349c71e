//! Group-model towers `B_n ⊂ C_n ⊂ A_n`, their Bratteli data, Markov
//! checks and first relative commutants.
//!
//! Level `n` lives in `M_{p^n} ⊗ M_m` with `m = |Γ|`, flat index `i·m + s`,
//! where `s` indexes `Γ` for even `n` and `Γ'` for odd `n`. Then
//! `A_n = M_{p^n} ⊗ Δ`, `B_n = M_{p^n} ⊗ 1` and `C_n = B_n ⊗ Δ_{·/H}`.

pub mod bratteli;
pub mod experimental;

use num_traits::{One, Zero};

pub use bratteli::BratteliGraph;

use crate::error::{Error, Result};
use crate::exact::{
    check_dim, commutant_in, inclusion_from_blocks, intersection, inclusion_matrix, q, Block, ConditionalExpectation, ExactMatrix,
    Inclusion, Rational, SubAlgebra, TraceForm,
};
use crate::groups::{left_cosets, OrbitData};
use crate::perm::Perm;
use crate::report::Report;
use crate::squares::{is_commuting, is_symmetric, SquareSpec};

pub const MAX_DEPTH: usize = 4;

#[derive(Clone, Debug)]
pub struct Level {
    pub n: usize,
    pub ambient: usize,
    pub a: SubAlgebra,
    pub b: SubAlgebra,
    pub c: SubAlgebra,
}

#[derive(Clone, Debug)]
pub struct GroupLadder {
    od: OrbitData,
    p: usize,
    m: usize,
    depth: usize,
    h: Vec<usize>,
    sets: [Vec<Perm>; 2],
    /// `sigma[par][α][s]`: where the inclusion sends label `s` of parity `par`.
    sigma: [Vec<Vec<usize>>; 2],
    /// `mu[par][g][s]`: index of `s g⁻¹`.
    mu: [Vec<Vec<usize>>; 2],
    cosets: [Vec<Vec<usize>>; 2],
    levels: Vec<Level>,
    graph: BratteliGraph,
}

fn index_of(set: &[Perm], x: &Perm) -> usize {
    set.binary_search(x).expect("element of the labelled set")
}

fn label(g: &Perm) -> String {
    let v: Vec<String> = g.to_one_indexed().iter().map(usize::to_string).collect();
    format!("[{}]", v.join(","))
}

impl GroupLadder {
    /// Builds levels `0..=depth` and checks the level-one square and the
    /// action `μ` on `𝒢`.
    pub fn build(od: &OrbitData, depth: usize) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::capacity(format!("ladder depth {depth} exceeds {MAX_DEPTH}")));
        }
        let p = od.p();
        let m = od.gamma.len();
        if p == 0 || m == 0 {
            return Err(Error::input("orbit data has an empty family or group"));
        }
        let ambient = p
            .checked_pow(depth as u32)
            .and_then(|x| x.checked_mul(m))
            .ok_or_else(|| Error::capacity("ladder ambient dimension overflows"))?;
        check_dim(ambient)?;

        let sets = [od.gamma.clone(), od.gamma_prime.clone()];
        let nu_inv: Vec<Perm> = od.nu.iter().map(Perm::inverse).collect();
        let sigma: [Vec<Vec<usize>>; 2] = [
            nu_inv.iter().map(|v| sets[0].iter().map(|g| index_of(&sets[1], &v.compose(g))).collect()).collect(),
            od.nu.iter().map(|v| sets[1].iter().map(|s| index_of(&sets[0], &v.compose(s))).collect()).collect(),
        ];
        let mu: [Vec<Vec<usize>>; 2] = [0, 1].map(|par| {
            od.gamma
                .iter()
                .map(|g| {
                    let gi = g.inverse();
                    sets[par].iter().map(|s| index_of(&sets[par], &s.compose(&gi))).collect()
                })
                .collect()
        });
        let h: Vec<usize> = od.h().iter().map(|x| index_of(&od.gamma, x)).collect();
        let cosets: [Vec<Vec<usize>>; 2] = [0, 1].map(|par| {
            left_cosets(&sets[par], od.h())
                .iter()
                .map(|c| c.iter().map(|x| index_of(&sets[par], x)).collect())
                .collect()
        });

        let mut multiplicities = vec![vec![0u64; m]; m];
        for row in &sigma[0] {
            for (g, &s) in row.iter().enumerate() {
                multiplicities[g][s] += 1;
            }
        }
        let graph = BratteliGraph {
            even_vertices: sets[0].iter().map(label).collect(),
            odd_vertices: sets[1].iter().map(label).collect(),
            multiplicities,
            even_weights: vec![q(1, m as i64); m],
            odd_weights: vec![q(1, (p * m) as i64); m],
        };

        let mut gl = GroupLadder {
            od: od.clone(),
            p,
            m,
            depth,
            h,
            sets,
            sigma,
            mu,
            cosets,
            levels: Vec::new(),
            graph,
        };
        gl.levels = (0..=depth).map(|n| gl.make_level(n)).collect();
        gl.construction_report()?.ensure()?;
        Ok(gl)
    }

    fn make_level(&self, n: usize) -> Level {
        let (m, big) = (self.m, self.p.pow(n as u32));
        let ambient = big * m;
        let unit = |r: usize, c: usize| ExactMatrix::unit(ambient, r, c);
        let mut a = Vec::with_capacity(big * big * m);
        let mut b = Vec::with_capacity(big * big);
        let mut c = Vec::new();
        for i in 0..big {
            for j in 0..big {
                for s in 0..m {
                    a.push(unit(i * m + s, j * m + s));
                }
                b.push(ExactMatrix::from_entries(ambient, (0..m).map(|s| (i * m + s, j * m + s, Rational::one()))));
                for coset in &self.cosets[n % 2] {
                    c.push(ExactMatrix::from_entries(
                        ambient,
                        coset.iter().map(|&s| (i * m + s, j * m + s, Rational::one())),
                    ));
                }
            }
        }
        Level {
            n,
            ambient,
            a: SubAlgebra::new_unchecked(ambient, a),
            b: SubAlgebra::new_unchecked(ambient, b),
            c: SubAlgebra::new_unchecked(ambient, c),
        }
    }

    pub fn orbit_data(&self) -> &OrbitData {
        &self.od
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n]
    }

    /// The graph `𝒢` of `Δ_Γ ⊂ M_p ⊗ Δ_{Γ'}`.
    pub fn graph(&self) -> &BratteliGraph {
        &self.graph
    }

    /// The labels of level `n`: `Γ` or `Γ'`.
    pub fn labels(&self, n: usize) -> &[Perm] {
        &self.sets[n % 2]
    }

    pub fn stabilizer(&self) -> Vec<&Perm> {
        self.h.iter().map(|&i| &self.od.gamma[i]).collect()
    }

    /// The inclusion of level `n - 1` into level `n`:
    /// `F ⊗ x_s ↦ Σ_α F ⊗ e_αα ⊗ x_{σ_α(s)}`.
    pub fn embed(&self, n: usize, x: &ExactMatrix) -> Result<ExactMatrix> {
        if n == 0 || n > self.depth {
            return Err(Error::input(format!("no inclusion into level {n}")));
        }
        let (m, p) = (self.m, self.p);
        if x.dim() != self.levels[n - 1].ambient {
            return Err(Error::input("matrix does not live at the previous level"));
        }
        let sigma = &self.sigma[(n - 1) % 2];
        let mut entries = Vec::with_capacity(x.nnz() * p);
        for (r, c, v) in x.entries() {
            let (i, s, j, t) = (r / m, r % m, c / m, c % m);
            if s != t {
                return Err(Error::input("matrix is not diagonal in the group factor"));
            }
            for (alpha, row) in sigma.iter().enumerate() {
                let s2 = row[s];
                entries.push(((i * p + alpha) * m + s2, (j * p + alpha) * m + s2, v.clone()));
            }
        }
        Ok(ExactMatrix::from_entries(self.levels[n].ambient, entries))
    }

    fn embed_algebra(&self, n: usize, alg: &SubAlgebra) -> Result<SubAlgebra> {
        let basis = alg.basis().iter().map(|x| self.embed(n, x)).collect::<Result<Vec<_>>>()?;
        Ok(SubAlgebra::new_unchecked(self.levels[n].ambient, basis))
    }

    /// Flat permutation implementing `μ_g` at level `n`.
    pub fn mu_permutation(&self, n: usize, g: usize) -> Vec<usize> {
        let m = self.m;
        let table = &self.mu[n % 2][g];
        (0..self.levels[n].ambient).map(|idx| (idx / m) * m + table[idx % m]).collect()
    }

    /// `μ_g(F ⊗ x_s) = F ⊗ x_{s g⁻¹}`; `g` indexes the sorted `Γ`.
    pub fn mu(&self, n: usize, g: usize, x: &ExactMatrix) -> ExactMatrix {
        x.permute(&self.mu_permutation(n, g))
    }

    fn average(&self, n: usize, group: &[usize], x: &ExactMatrix) -> ExactMatrix {
        let sum = group
            .iter()
            .fold(ExactMatrix::zeros(x.dim()), |acc, &g| &acc + &self.mu(n, g, x));
        sum.scale(&q(1, group.len() as i64))
    }

    /// `E^Γ` at level `n`.
    pub fn average_gamma(&self, n: usize, x: &ExactMatrix) -> ExactMatrix {
        let all: Vec<usize> = (0..self.m).collect();
        self.average(n, &all, x)
    }

    /// `E^H` at level `n`.
    pub fn average_h(&self, n: usize, x: &ExactMatrix) -> ExactMatrix {
        self.average(n, &self.h, x)
    }

    /// `1_{p^{n-2}} ⊗ (1/p) Σ_{α,β} e_αβ ⊗ e_αβ ⊗ 1`, the Jones projection of
    /// `A_{n-2} ⊂ A_{n-1}` at level `n ≥ 2`.
    pub fn jones_projection(&self, n: usize) -> Result<ExactMatrix> {
        if !(2..=self.depth).contains(&n) {
            return Err(Error::input(format!("Jones projection needs 2 ≤ n ≤ depth, got {n}")));
        }
        let (p, m) = (self.p, self.m);
        let w = q(1, p as i64);
        let outer = p.pow(n as u32 - 2);
        let mut entries = Vec::with_capacity(outer * p * p * m);
        for i in 0..outer {
            for a in 0..p {
                for b in 0..p {
                    for s in 0..m {
                        let r = ((i * p + a) * p + a) * m + s;
                        let c = ((i * p + b) * p + b) * m + s;
                        entries.push((r, c, w.clone()));
                    }
                }
            }
        }
        Ok(ExactMatrix::from_entries(self.levels[n].ambient, entries))
    }

    /// Blocks `1 ⊗ x_{sH}` of `C_n`.
    fn c_blocks(&self, n: usize) -> Vec<Block> {
        let (m, big) = (self.m, self.p.pow(n as u32));
        self.cosets[n % 2]
            .iter()
            .map(|coset| Block {
                projection: ExactMatrix::from_entries(
                    big * m,
                    (0..big).flat_map(|i| coset.iter().map(move |&s| (i * m + s, i * m + s, Rational::one()))),
                ),
                size: big,
                rep_multiplicity: coset.len(),
            })
            .collect()
    }

    /// Inclusion data of `C_{n-1} ⊂ C_n` from the closed-form blocks.
    pub fn c_inclusion(&self, n: usize) -> Result<Inclusion> {
        let sub = self
            .c_blocks(n - 1)
            .into_iter()
            .map(|b| {
                Ok(Block {
                    projection: self.embed(n, &b.projection)?,
                    size: b.size,
                    rep_multiplicity: b.rep_multiplicity * self.p,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        inclusion_from_blocks(sub, self.c_blocks(n))
    }

    /// `ℂ ⊂ M_p` below `i(Δ_Γ) ⊂ M_p ⊗ Δ_{Γ'}`.
    pub fn grpsq(&self) -> Result<SquareSpec> {
        if self.depth < 1 {
            return Err(Error::input("the group square needs depth ≥ 1"));
        }
        let l1 = &self.levels[1];
        let l0 = &self.levels[0];
        Ok(SquareSpec::new(
            self.embed_algebra(1, &l0.b)?,
            l1.b.clone(),
            self.embed_algebra(1, &l0.a)?,
            l1.a.clone(),
            TraceForm::normalized(l1.ambient),
        )?
        .with_labels("C", "M_p", "Δ_Γ", "M_p⊗Δ_Γ'"))
    }

    fn construction_report(&self) -> Result<Report> {
        let mut r = Report::new();
        if self.depth >= 1 {
            let sq = self.grpsq()?;
            r.check("grpsq.commuting", is_commuting(&sq));
            r.check("grpsq.symmetric", is_symmetric(&sq));
            r.check("grpsq.connected_top", self.graph.is_connected());
        }
        let (m, g) = (self.m, &self.graph);
        let mut automorphism = true;
        for gi in 0..m {
            let (ev, od) = (&self.mu[0][gi], &self.mu[1][gi]);
            for v in 0..m {
                for w in 0..m {
                    automorphism &= g.multiplicities[ev[v]][od[w]] == g.multiplicities[v][w];
                }
                automorphism &= g.even_weights[ev[v]] == g.even_weights[v] && g.odd_weights[od[v]] == g.odd_weights[v];
            }
        }
        r.check("mu.graph_automorphism", automorphism);
        let mut action = true;
        for (a, x) in self.od.gamma.iter().enumerate() {
            for (b, y) in self.od.gamma.iter().enumerate() {
                let ab = index_of(&self.od.gamma, &x.compose(y));
                for par in 0..2 {
                    action &= (0..m).all(|s| self.mu[par][ab][s] == self.mu[par][a][self.mu[par][b][s]]);
                }
            }
        }
        r.check("mu.group_action", action);
        Ok(r)
    }

    /// The square-level and tower-level claims of the group model, level by level.
    pub fn check_group_expectations(&self) -> Result<Report> {
        let mut r = self.construction_report()?;
        for n in 0..=self.depth {
            let lv = &self.levels[n];
            let big = self.p.pow(n as u32);
            r.check(
                format!("level{n}.dimensions"),
                lv.b.dim() == big * big
                    && lv.a.dim() == big * big * self.m
                    && lv.c.dim() == big * big * self.cosets[n % 2].len(),
            );
            r.check(format!("level{n}.B⊂C⊂A"), lv.c.contains_algebra(&lv.b) && lv.a.contains_algebra(&lv.c));
            let tr = TraceForm::normalized(lv.ambient);
            for (name, target, h_only) in [("E^Γ(A)=B", &lv.b, false), ("E^H(A)=C", &lv.c, true)] {
                let avg = |x: &ExactMatrix| if h_only { self.average_h(n, x) } else { self.average_gamma(n, x) };
                let images: Vec<ExactMatrix> = lv.a.basis().iter().map(avg).collect();
                let onto = images.iter().all(|y| target.contains(y)) && SubAlgebra::span_rank(&images) == target.dim();
                let fixes = target.basis().iter().all(|x| avg(x) == *x);
                let traced = lv.a.basis().iter().zip(&images).all(|(x, y)| tr.eval(x) == tr.eval(y));
                r.check(format!("level{n}.{name}"), onto && fixes && traced);
            }
            let mu_preserves = (0..self.m).all(|g| lv.a.permuted(&self.mu_permutation(n, g)).same_span(&lv.a));
            r.check(format!("level{n}.mu_preserves_A"), mu_preserves);

            if n >= 1 {
                let prev = &self.levels[n - 1];
                let inc = |alg: &SubAlgebra, target: &SubAlgebra| -> Result<bool> {
                    Ok(alg.basis().iter().map(|x| self.embed(n, x)).collect::<Result<Vec<_>>>()?.iter().all(|y| target.contains(y)))
                };
                r.check(
                    format!("level{n}.inclusions"),
                    inc(&prev.a, &lv.a)? && inc(&prev.b, &lv.b)? && inc(&prev.c, &lv.c)?,
                );
                let mut consistent = true;
                for x in prev.a.basis() {
                    let ex = self.embed(n, x)?;
                    for g in 0..self.m {
                        consistent &= self.embed(n, &self.mu(n - 1, g, x))? == self.mu(n, g, &ex);
                    }
                }
                r.check(format!("level{n}.mu_consistent"), consistent);
            }
            if n == 1 {
                let l0 = &self.levels[0];
                let tr1 = TraceForm::normalized(lv.ambient);
                let upper = SquareSpec::new(
                    self.embed_algebra(1, &l0.c)?,
                    lv.c.clone(),
                    self.embed_algebra(1, &l0.a)?,
                    lv.a.clone(),
                    tr1.clone(),
                )?;
                let lower = SquareSpec::new(
                    self.embed_algebra(1, &l0.b)?,
                    lv.b.clone(),
                    self.embed_algebra(1, &l0.c)?,
                    lv.c.clone(),
                    tr1.clone(),
                )?;
                r.check("ibc.upper_left_commuting", is_commuting(&upper));
                r.check("ibc.upper_left_symmetric", is_symmetric(&upper));
                r.check("ibc.lower_left_commuting", is_commuting(&lower));
                r.check("ibc.lower_left_symmetric", is_symmetric(&lower));
                // E^H is the trace-preserving expectation onto C_1
                let e = ConditionalExpectation::new(&lv.c, &tr1)?;
                let same = lv.a.basis().iter().all(|x| e.apply(x).map(|y| y == self.average_h(1, x)).unwrap_or(false));
                r.check("level1.E^H_is_conditional_expectation", same);
                let rc = first_relative_commutant(&self.grpsq()?)?;
                r.check_details("grpsq.relative_commutant_scalars", rc.dim() == 1, format!("dim = {}", rc.dim()));
                let one_delta = SubAlgebra::new_unchecked(
                    lv.ambient,
                    (0..self.m)
                        .map(|s| ExactMatrix::from_entries(lv.ambient, (0..self.p).map(|i| (i * self.m + s, i * self.m + s, Rational::one()))))
                        .collect(),
                );
                let meet = intersection(&self.embed_algebra(1, &l0.a)?, &one_delta)?;
                r.check_details("grpsq.Δ_Γ∩(1⊗Δ_Γ')_scalars", meet.dim() == 1, format!("dim = {}", meet.dim()));
            }
            if n >= 2 {
                self.jones_checks(n, &mut r)?;
                let now = self.c_inclusion(n)?.multiplicities;
                let before = self.c_inclusion(n - 1)?.multiplicities;
                let transposed: Vec<Vec<u64>> = (0..before.first().map_or(0, Vec::len))
                    .map(|j| before.iter().map(|row| row[j]).collect())
                    .collect();
                r.check(format!("level{n}.C_bratteli_transpose"), now == transposed);
            }
        }
        Ok(r)
    }

    fn jones_checks(&self, n: usize, r: &mut Report) -> Result<()> {
        let e = self.jones_projection(n)?;
        let lv = &self.levels[n];
        let tr = TraceForm::normalized(lv.ambient);
        let a2_in_1 = self.embed_algebra(n - 1, &self.levels[n - 2].a)?;
        let a2_in_n = self.embed_algebra(n, &a2_in_1)?;
        let a1_in_n = self.embed_algebra(n, &self.levels[n - 1].a)?;
        r.check(format!("level{n}.jones.in_C"), lv.c.contains(&e));
        r.check(format!("level{n}.jones.projection"), e.is_projection());
        r.check(format!("level{n}.jones.trace"), tr.eval(&e) == q(1, (self.p * self.p) as i64));
        r.check(
            format!("level{n}.jones.commutes_with_A_(n-2)"),
            a2_in_n.basis().iter().all(|x| x.commutes_with(&e)),
        );
        let prev_tr = TraceForm::normalized(self.levels[n - 1].ambient);
        let cond = ConditionalExpectation::new(&a2_in_1, &prev_tr)?;
        let mut implements = true;
        for x in self.levels[n - 1].a.basis() {
            let lhs = &(&e * &self.embed(n, x)?) * &e;
            let rhs = &self.embed(n, &cond.apply(x)?)? * &e;
            implements &= lhs == rhs;
        }
        r.check(format!("level{n}.jones.implements_expectation"), implements);
        let mut products = Vec::new();
        for a in a1_in_n.basis() {
            let ae = a * &e;
            if ae.is_zero() {
                continue;
            }
            for b in a1_in_n.basis() {
                let x = &ae * b;
                if !x.is_zero() {
                    products.push(x);
                }
            }
        }
        let spanned = SubAlgebra::new_unchecked(lv.ambient, products);
        r.check(format!("level{n}.jones.generates_A_n"), spanned.same_span(&lv.a));
        Ok(())
    }
}

/// `A1′ ∩ B0`, the finite-level first relative commutant of a square.
pub fn first_relative_commutant(sq: &SquareSpec) -> Result<SubAlgebra> {
    commutant_in(sq.a1(), sq.b0())
}

pub fn is_irreducible(sq: &SquareSpec) -> Result<bool> {
    Ok(first_relative_commutant(sq)?.dim() == 1)
}

/// Inclusion matrix, trace vectors and Markov eigenvalue of `sub ⊂ amb`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovData {
    pub matrix: Vec<Vec<u64>>,
    pub sub_trace: Vec<Rational>,
    pub amb_trace: Vec<Rational>,
    pub beta: Rational,
}

/// `Gᵀ G s = β s` and `G Gᵀ t = β t` with `t = G s`, `s` the trace vector
/// of `amb`. No rational `β` is reported as out of scope.
pub fn markov_data(sub: &SubAlgebra, amb: &SubAlgebra, trace: &TraceForm) -> Result<MarkovData> {
    let inc = inclusion_matrix(sub, amb)?;
    let g = &inc.multiplicities;
    let weight = |b: &Block| trace.eval(&b.projection) / Rational::from_integer(b.size.into());
    let s: Vec<Rational> = inc.amb_blocks.iter().map(weight).collect();
    let to_q = |x: u64| Rational::from_integer(x.into());
    let t: Vec<Rational> = g
        .iter()
        .map(|row| row.iter().zip(&s).map(|(&x, w)| to_q(x) * w).sum())
        .collect();
    let sub_trace: Vec<Rational> = inc.sub_blocks.iter().map(weight).collect();
    if sub_trace != t {
        return Err(Error::OutOfScope("trace is not compatible with the inclusion".into()));
    }
    let gt_t: Vec<Rational> = (0..s.len())
        .map(|j| g.iter().zip(&t).map(|(row, x)| to_q(row[j]) * x).sum())
        .collect();
    let g_gt_t: Vec<Rational> = g
        .iter()
        .map(|row| row.iter().zip(&gt_t).map(|(&x, w)| to_q(x) * w).sum())
        .collect();
    let beta = match t.iter().zip(&g_gt_t).find(|(x, _)| !x.is_zero()) {
        Some((x, y)) => y / x,
        None => return Err(Error::OutOfScope("trace vector vanishes".into())),
    };
    let ok_t = t.iter().zip(&g_gt_t).all(|(x, y)| x * &beta == *y);
    let ok_s = s.iter().zip(&gt_t).all(|(x, y)| x * &beta == *y);
    if !(ok_t && ok_s) {
        return Err(Error::OutOfScope(
            "trace vector is not an eigenvector of the inclusion with rational eigenvalue".into(),
        ));
    }
    Ok(MarkovData { matrix: g.clone(), sub_trace: t, amb_trace: s, beta })
}

/// Markov eigen-equations for the horizontal `B0 ⊂ B1` and vertical
/// `A1 ⊂ B1` inclusions.
pub fn markov_check(sq: &SquareSpec) -> Result<Report> {
    let mut r = Report::new();
    for (name, sub) in [("horizontal", sq.b0()), ("vertical", sq.a1())] {
        let md = markov_data(sub, sq.b1(), sq.trace())?;
        let uniform = md.amb_trace.windows(2).all(|w| w[0] == w[1]);
        r.check_details(
            format!("{name}.markov"),
            true,
            format!("beta = {}, G = {:?}, uniform trace = {uniform}", md.beta, md.matrix),
        );
    }
    Ok(r)
}
