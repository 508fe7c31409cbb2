//! The identity suite for `Q_D`, organised in independent check groups.
//!
//! Groups run concurrently under [`Execution::Parallel`]; the report lists
//! them in the fixed order of [`CheckGroup::ALL`] whichever way they ran.

use std::fmt::Display;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alike::{
    bij_action_on_ws, bij_with_adjacency, characterization_residual, closed_form_sym_basis,
    coordinate_pairs, is_alike_with_adjacency, restriction_to_e1, solve_alike_with_cap,
    BRUTE_FORCE_CAP,
};
use crate::exactlinalg::{
    format_rational, rank, rat, ratio, ExactMatrix, ExactVector, SubspaceBasis,
};
use crate::graph::Graph;
use crate::hypercube::{binomial, HypercubeContext, IDEMPOTENT_CAP_D};
use crate::parallel::{self, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CheckGroup {
    /// α/α* relations, Kronecker factorizations, `A = Σ α_i`, hypercube distances.
    Alpha,
    /// Actions of α_i, α*_i and A on the scaled eigenvectors; orthogonality.
    Eigenbasis,
    /// Dense primitive idempotents (D <= 8).
    Idempotents,
    /// Support characterization through the four-term residual.
    Characterization,
    SymBasis,
    AntisymBasis,
    /// Brute-force solver against the closed-form bases.
    Brute,
    /// Restriction of B_ij to E_1 V.
    Restriction,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 8] = [
        CheckGroup::Alpha,
        CheckGroup::Eigenbasis,
        CheckGroup::Idempotents,
        CheckGroup::Characterization,
        CheckGroup::SymBasis,
        CheckGroup::AntisymBasis,
        CheckGroup::Brute,
        CheckGroup::Restriction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckGroup::Alpha => "alpha",
            CheckGroup::Eigenbasis => "eigenbasis",
            CheckGroup::Idempotents => "idempotents",
            CheckGroup::Characterization => "characterization",
            CheckGroup::SymBasis => "sym",
            CheckGroup::AntisymBasis => "antisym",
            CheckGroup::Brute => "brute",
            CheckGroup::Restriction => "restriction",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub groups: Vec<CheckGroup>,
    pub seed: u64,
    /// Random matrices per direction in the characterization group.
    pub random_cases: usize,
    /// Subsets sampled when `2^D` exceeds `2^exhaustive_subsets_max_d`.
    pub subset_samples: usize,
    pub exhaustive_subsets_max_d: usize,
    /// Vertex cap for the brute-force group.
    pub brute_force_cap: usize,
    pub execution: Execution,
    pub record_timings: bool,
    /// Test hook: toggles the symmetric pair `(x, y)` of the adjacency matrix
    /// used by every group before checking.
    pub corrupt_adjacency: Option<(usize, usize)>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            groups: CheckGroup::ALL.to_vec(),
            seed: 0,
            random_cases: 10,
            subset_samples: 128,
            exhaustive_subsets_max_d: 6,
            brute_force_cap: BRUTE_FORCE_CAP,
            execution: Execution::Parallel,
            record_timings: false,
            corrupt_adjacency: None,
        }
    }
}

impl VerifyOptions {
    pub fn without(mut self, skip: &[CheckGroup]) -> Self {
        self.groups.retain(|g| !skip.contains(g));
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupStatus {
    Pass,
    Fail,
    /// Outside the group's dimension cap.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupReport {
    pub group: &'static str,
    pub status: GroupStatus,
    pub checks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub d: usize,
    pub seed: u64,
    pub all_pass: bool,
    pub groups: Vec<GroupReport>,
}

impl VerifyReport {
    pub fn group(&self, g: CheckGroup) -> Option<&GroupReport> {
        self.groups.iter().find(|r| r.group == g.name())
    }
}

/// Counts checks and keeps the first failure.
#[derive(Default)]
struct Checker {
    checks: usize,
    witness: Option<String>,
}

impl Checker {
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn eq_matrix(
        &mut self,
        left: &ExactMatrix,
        right: &ExactMatrix,
        label: impl FnOnce() -> String,
    ) {
        let diff = left.first_difference(right);
        self.check(diff.is_none(), || {
            let (r, c) = diff.expect("differs");
            if left.dims() != right.dims() {
                return format!(
                    "{}: shapes {:?} vs {:?}",
                    label(),
                    left.dims(),
                    right.dims()
                );
            }
            format!(
                "{}: entry ({r}, {c}) is {} vs {}",
                label(),
                format_rational(&left.get(r, c)),
                format_rational(&right.get(r, c))
            )
        });
    }

    fn eq_vector(
        &mut self,
        left: &ExactVector,
        right: &ExactVector,
        label: impl FnOnce() -> String,
    ) {
        self.check(left == right, || {
            let k = (0..left.len().max(right.len()))
                .find(|&k| left.get(k) != right.get(k))
                .unwrap_or(0);
            format!(
                "{}: entry {k} is {} vs {}",
                label(),
                format_rational(&left.get(k)),
                format_rational(&right.get(k))
            )
        });
    }

    fn ok<T, E: Display>(&mut self, r: Result<T, E>, label: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || format!("{}: {e}", label()));
                None
            }
        }
    }

    fn merge(mut self, other: Checker) -> Checker {
        self.checks += other.checks;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self
    }
}

/// Matrices shared by all groups.
struct Fixture {
    ctx: HypercubeContext,
    graph: Graph,
    a: ExactMatrix,
    alphas: Vec<ExactMatrix>,
    stars: Vec<ExactMatrix>,
    pairs: Vec<(usize, usize)>,
    bijs: Vec<ExactMatrix>,
    subsets: Vec<usize>,
    exhaustive_subsets: bool,
}

impl Fixture {
    fn new(ctx: HypercubeContext, opts: &VerifyOptions) -> Self {
        let d = ctx.d();
        let graph = ctx.graph();
        let mut a = graph.adjacency();
        if let Some((x, y)) = opts.corrupt_adjacency {
            a = toggle_symmetric(&a, x, y);
        }
        let alphas = (1..=d).map(|i| ctx.alpha(i).expect("i in range")).collect();
        let stars = (1..=d)
            .map(|i| ctx.alpha_star(i).expect("i in range"))
            .collect();
        let pairs = coordinate_pairs(d);
        let bijs = parallel::map(opts.execution, &pairs, |&(i, j)| {
            bij_with_adjacency(&ctx, &a, i, j).expect("pair in range")
        });
        let exhaustive_subsets = d <= opts.exhaustive_subsets_max_d;
        let subsets = if exhaustive_subsets {
            (0..ctx.n()).collect()
        } else {
            sample_subsets(&ctx, opts.subset_samples, opts.seed)
        };
        Self {
            ctx,
            graph,
            a,
            alphas,
            stars,
            pairs,
            bijs,
            subsets,
            exhaustive_subsets,
        }
    }

    fn d(&self) -> usize {
        self.ctx.d()
    }

    fn n(&self) -> usize {
        self.ctx.n()
    }

    fn eigvec(&self, s: usize) -> ExactVector {
        self.ctx.scaled_eigenvector(s).expect("subset in range").vec
    }
}

fn toggle_symmetric(a: &ExactMatrix, x: usize, y: usize) -> ExactMatrix {
    let flip = if a.get(x, y) == rat(0) {
        rat(1)
    } else {
        rat(-1)
    };
    let mut t = vec![(x, y, flip.clone())];
    if x != y {
        t.push((y, x, flip));
    }
    let delta = ExactMatrix::from_triplets(a.rows(), a.cols(), t).expect("corruption in range");
    a.add(&delta).expect("same shape")
}

/// Distinct random subsets, always including the empty and the full set, sorted.
fn sample_subsets(ctx: &HypercubeContext, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let n = ctx.n();
    let mut picked: Vec<usize> = sample(&mut rng, n, count.min(n)).into_vec();
    picked.push(0);
    picked.push(n - 1);
    picked.sort_unstable();
    picked.dedup();
    picked
}

/// Runs the selected groups on `Q_D`.
pub fn verify_all(ctx: &HypercubeContext, opts: &VerifyOptions) -> VerifyReport {
    let fixture = Fixture::new(*ctx, opts);
    let groups: Vec<CheckGroup> = CheckGroup::ALL
        .into_iter()
        .filter(|g| opts.groups.contains(g))
        .collect();
    let reports = parallel::map(opts.execution, &groups, |&g| run_group(g, &fixture, opts));
    VerifyReport {
        d: ctx.d(),
        seed: opts.seed,
        all_pass: reports.iter().all(|r| r.status != GroupStatus::Fail),
        groups: reports,
    }
}

fn run_group(group: CheckGroup, fx: &Fixture, opts: &VerifyOptions) -> GroupReport {
    let start = Instant::now();
    let outcome = match group {
        CheckGroup::Alpha => Ok(alpha_group(fx, opts)),
        CheckGroup::Eigenbasis => Ok(eigenbasis_group(fx)),
        CheckGroup::Idempotents => idempotent_group(fx),
        CheckGroup::Characterization => Ok(characterization_group(fx, opts)),
        CheckGroup::SymBasis => Ok(sym_group(fx, opts)),
        CheckGroup::AntisymBasis => Ok(antisym_group(fx, opts)),
        CheckGroup::Brute => brute_group(fx, opts),
        CheckGroup::Restriction => Ok(restriction_group(fx, opts)),
    };
    let elapsed_ms = opts
        .record_timings
        .then(|| start.elapsed().as_millis() as u64);
    match outcome {
        Ok((checker, note)) => GroupReport {
            group: group.name(),
            status: if checker.witness.is_none() {
                GroupStatus::Pass
            } else {
                GroupStatus::Fail
            },
            checks: checker.checks,
            witness: checker.witness,
            note,
            elapsed_ms,
        },
        Err(reason) => GroupReport {
            group: group.name(),
            status: GroupStatus::Skipped,
            checks: 0,
            witness: None,
            note: Some(reason),
            elapsed_ms,
        },
    }
}

type GroupOutcome = (Checker, Option<String>);

fn sampling_note(fx: &Fixture) -> Option<String> {
    (!fx.exhaustive_subsets).then(|| format!("{} of {} subsets sampled", fx.subsets.len(), fx.n()))
}

fn alpha_group(fx: &Fixture, opts: &VerifyOptions) -> GroupOutcome {
    let d = fx.d();
    let n = fx.n();
    let id = ExactMatrix::identity(n);
    let per_coord = parallel::map_range(opts.execution, d, |k| {
        let i = k + 1;
        let mut c = Checker::default();
        let (al, st) = (&fx.alphas[k], &fx.stars[k]);
        c.eq_matrix(&al.matmul(al).unwrap(), &id, || format!("alpha_{i}^2 = I"));
        c.eq_matrix(&st.matmul(st).unwrap(), &id, || format!("alpha*_{i}^2 = I"));
        c.eq_matrix(al, &fx.ctx.alpha_via_kron(i).unwrap(), || {
            format!("alpha_{i} Kronecker form")
        });
        c.eq_matrix(st, &fx.ctx.alpha_star_via_kron(i).unwrap(), || {
            format!("alpha*_{i} Kronecker form")
        });
        c.eq_matrix(&al.matmul(st).unwrap(), &-&st.matmul(al).unwrap(), || {
            format!("alpha_{i} alpha*_{i} = -alpha*_{i} alpha_{i}")
        });
        for l in 0..d {
            let j = l + 1;
            if l > k {
                c.eq_matrix(
                    &al.matmul(&fx.alphas[l]).unwrap(),
                    &fx.alphas[l].matmul(al).unwrap(),
                    || format!("alpha_{i} alpha_{j} = alpha_{j} alpha_{i}"),
                );
                c.eq_matrix(
                    &st.matmul(&fx.stars[l]).unwrap(),
                    &fx.stars[l].matmul(st).unwrap(),
                    || format!("alpha*_{i} alpha*_{j} = alpha*_{j} alpha*_{i}"),
                );
            }
            if l != k {
                c.eq_matrix(
                    &al.matmul(&fx.stars[l]).unwrap(),
                    &fx.stars[l].matmul(al).unwrap(),
                    || format!("alpha_{i} alpha*_{j} = alpha*_{j} alpha_{i}"),
                );
            }
        }
        c
    });
    let mut c = per_coord
        .into_iter()
        .fold(Checker::default(), Checker::merge);

    let sum = fx
        .alphas
        .iter()
        .fold(ExactMatrix::zeros(n, n), |acc, m| acc.add(m).unwrap());
    c.eq_matrix(&sum, &fx.a, || "A = sum of alpha_i".into());

    // BFS distance equals Hamming distance; exhaustive up to 1024 vertices.
    let sources: Vec<usize> = if n <= 1024 {
        (0..n).collect()
    } else {
        sample_subsets(&fx.ctx, 64, opts.seed)
    };
    for x in sources {
        let dist = fx.graph.distances_from(x);
        let bad = (0..n).find(|&y| dist[y] != Some((x ^ y).count_ones() as usize));
        c.check(bad.is_none(), || {
            format!("dist({x}, {}) differs from Hamming distance", bad.unwrap())
        });
    }
    if d <= 6 {
        match fx.graph.distance_regularity() {
            Ok(dr) => {
                c.check(dr.is_regular(), || {
                    format!("Q_{d} reported not distance-regular: {dr:?}")
                });
                c.check(dr.intersection_number(0, 1, 1) == Some(d), || {
                    "valency k != D".into()
                });
                c.check(dr.intersection_number(1, 1, 1) == Some(0), || {
                    "p^1_11 != 0".into()
                });
            }
            Err(e) => c.check(false, || format!("distance regularity: {e}")),
        }
    }
    (c, None)
}

fn eigenbasis_group(fx: &Fixture) -> GroupOutcome {
    let d = fx.d() as i64;
    let mut c = Checker::default();
    let vectors: Vec<ExactVector> = fx.subsets.iter().map(|&s| fx.eigvec(s)).collect();
    for (&s, w) in fx.subsets.iter().zip(&vectors) {
        c.check(
            w.nnz() == fx.n()
                && w.entries()
                    .iter()
                    .all(|(_, q)| *q == rat(1) || *q == rat(-1)),
            || format!("W_{s:#b} has entries other than +-1"),
        );
        c.eq_vector(w, &fx.ctx.scaled_eigenvector_via_kron(s).unwrap(), || {
            format!("W_{s:#b} Kronecker form")
        });
        for i in 1..=fx.d() {
            let mask = fx.ctx.coord_mask(i).unwrap();
            let sign = if s & mask != 0 { rat(-1) } else { rat(1) };
            c.eq_vector(
                &fx.alphas[i - 1].mul_vec(w).unwrap(),
                &w.scale(&sign),
                || format!("alpha_{i} W_{s:#b}"),
            );
            c.eq_vector(
                &fx.stars[i - 1].mul_vec(w).unwrap(),
                &fx.eigvec(s ^ mask),
                || format!("alpha*_{i} W_{s:#b} = W_(S xor {i})"),
            );
        }
        let theta = d - 2 * s.count_ones() as i64;
        c.eq_vector(&fx.a.mul_vec(w).unwrap(), &w.scale(&rat(theta)), || {
            format!("A W_{s:#b} = {theta} W_{s:#b}")
        });
    }
    let norm = rat(fx.n() as i64);
    let pairs: Vec<(usize, usize)> = if fx.exhaustive_subsets {
        (0..vectors.len())
            .flat_map(|p| (p..vectors.len()).map(move |q| (p, q)))
            .collect()
    } else {
        (0..vectors.len())
            .flat_map(|p| [(p, p), (p, (p + 1) % vectors.len())])
            .collect()
    };
    for (p, q) in pairs {
        let expected = if p == q { norm.clone() } else { rat(0) };
        let got = vectors[p].inner(&vectors[q]).unwrap();
        c.check(got == expected, || {
            format!(
                "<W_{:#b}, W_{:#b}> = {}",
                fx.subsets[p],
                fx.subsets[q],
                format_rational(&got)
            )
        });
    }
    (c, sampling_note(fx))
}

fn idempotent_group(fx: &Fixture) -> Result<GroupOutcome, String> {
    let d = fx.d();
    if d > IDEMPOTENT_CAP_D {
        return Err(format!(
            "D = {d} exceeds the dense idempotent cap {IDEMPOTENT_CAP_D}"
        ));
    }
    let n = fx.n();
    let data = fx.ctx.eigen_data().map_err(|e| e.to_string())?;
    let mut c = Checker::default();
    let zero = ExactMatrix::zeros(n, n);
    let mut sum = zero.clone();
    let mut weighted = zero.clone();
    for (i, space) in data.spaces.iter().enumerate() {
        let e = &space.idempotent;
        c.check(space.theta == d as i64 - 2 * i as i64, || {
            format!("theta_{i} = {}", space.theta)
        });
        c.check(space.multiplicity == binomial(d, i), || {
            format!("m_{i} = {}", space.multiplicity)
        });
        c.check(e.is_symmetric(), || format!("E_{i} not symmetric"));
        let r = rank(e);
        c.check(r == binomial(d, i), || format!("rank E_{i} = {r}"));
        for (j, other) in data.spaces.iter().enumerate().skip(i) {
            let expected = if i == j { e } else { &zero };
            c.eq_matrix(&e.matmul(&other.idempotent).unwrap(), expected, || {
                format!("E_{i} E_{j} = delta E_{i}")
            });
        }
        sum = sum.add(e).unwrap();
        weighted = weighted.add_scaled(e, &rat(space.theta)).unwrap();
    }
    c.eq_matrix(&sum, &ExactMatrix::identity(n), || "sum E_i = I".into());
    c.eq_matrix(&weighted, &fx.a, || "sum theta_i E_i = A".into());
    c.eq_matrix(
        &data.spaces[0].idempotent,
        &ExactMatrix::ones(n, n).scale(&ratio(1, n as i64)),
        || "E_0 = J / 2^D".into(),
    );
    for &s in &fx.subsets {
        let w = fx.eigvec(s);
        let level = s.count_ones() as usize;
        c.eq_vector(
            &data.spaces[level].idempotent.mul_vec(&w).unwrap(),
            &w,
            || format!("W_{s:#b} lies in E_{level} V"),
        );
    }
    Ok((c, sampling_note(fx)))
}

/// Random integer matrix supported on equal-or-adjacent pairs of `Q_D`.
/// Every support position is filled for `n <= 64`; larger cubes get
/// `max_entries` random positions.
pub fn random_supported_matrix(
    ctx: &HypercubeContext,
    rng: &mut ChaCha8Rng,
    max_entries: usize,
) -> ExactMatrix {
    let n = ctx.n();
    let d = ctx.d();
    let positions: Vec<(usize, usize)> = if n <= 64 {
        (0..n)
            .flat_map(|x| std::iter::once((x, x)).chain((0..d).map(move |b| (x, x ^ (1 << b)))))
            .collect()
    } else {
        (0..max_entries)
            .map(|_| {
                let x = rng.gen_range(0..n);
                let b = rng.gen_range(0..=d);
                (x, if b == d { x } else { x ^ (1 << b) })
            })
            .collect()
    };
    let triplets: Vec<_> = positions
        .into_iter()
        .map(|(x, y)| (x, y, rat(rng.gen_range(-3..=3))))
        .collect();
    ExactMatrix::from_triplets(n, n, triplets).expect("in range")
}

/// A random pair of vertices at distance at least 2.
fn random_far_pair(ctx: &HypercubeContext, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let n = ctx.n();
    loop {
        let x = rng.gen_range(0..n);
        let y = rng.gen_range(0..n);
        if (x ^ y).count_ones() >= 2 {
            return (x, y);
        }
    }
}

/// Outcome of the seeded random-matrix trials for the support characterization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterizationTrials {
    pub supported_cases: usize,
    pub unsupported_cases: usize,
    pub failures: Vec<String>,
}

/// Both directions of the characterization on random matrices.
///
/// Supported matrices must have every residual `i < j` vanish; matrices with
/// one to three extra entries at distance >= 2 must show a nonzero residual at
/// each such entry for some `i < j`. Residual entries are also compared with
/// the closed formula `(s_i(x) - s_i(y)) (s_j(x) - s_j(y)) B_xy`.
pub fn characterization_trials(
    ctx: &HypercubeContext,
    cases_per_direction: usize,
    seed: u64,
    exec: Execution,
) -> CharacterizationTrials {
    let pairs = coordinate_pairs(ctx.d());
    let sign = |x: usize, i: usize| -> i64 {
        if ctx.coordinate(x, i) == 0 {
            1
        } else {
            -1
        }
    };
    let run_case = |case: usize| -> Option<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2 + case as u64);
        let supported = case < cases_per_direction;
        let mut b = random_supported_matrix(ctx, &mut rng, 256);
        let mut far = Vec::new();
        if !supported {
            let extra = rng.gen_range(1..=3);
            let mut t = Vec::new();
            for _ in 0..extra {
                let (x, y) = random_far_pair(ctx, &mut rng);
                let mut v = rng.gen_range(1..=3i64);
                if rng.gen_bool(0.5) {
                    v = -v;
                }
                far.push((x, y));
                t.push((x, y, rat(v)));
            }
            b = ExactMatrix::from_triplets(
                ctx.n(),
                ctx.n(),
                b.triplets().map(|(r, c, q)| (r, c, q.clone())).chain(t),
            )
            .expect("in range");
        }
        let mut hit = vec![false; far.len()];
        for &(i, j) in &pairs {
            let res = characterization_residual(ctx, &b, i, j).expect("valid pair");
            // entry-wise formula on the support of B; residual support is contained in it
            for (x, y, q) in b.triplets() {
                let f = (sign(x, i) - sign(y, i)) * (sign(x, j) - sign(y, j));
                let expected = q * rat(f);
                if res.get(x, y) != expected {
                    return Some(format!(
                        "case {case}: residual ({i},{j}) at ({x},{y}) disagrees with formula"
                    ));
                }
            }
            if res.nnz() > b.nnz() {
                return Some(format!(
                    "case {case}: residual ({i},{j}) has entries outside supp(B)"
                ));
            }
            if supported && !res.is_zero() {
                let (x, y, _) = res.triplets().next().expect("nonzero");
                return Some(format!(
                    "case {case}: supported B has nonzero residual ({i},{j}) at ({x},{y})"
                ));
            }
            for (k, &(x, y)) in far.iter().enumerate() {
                if b.get(x, y) != rat(0) && res.get(x, y) != rat(0) {
                    hit[k] = true;
                }
            }
        }
        // an extra entry may have landed on the zero of a cancelled value; only live ones count
        for (k, &(x, y)) in far.iter().enumerate() {
            if b.get(x, y) != rat(0) && !hit[k] {
                return Some(format!(
                    "case {case}: off-support entry ({x},{y}) not detected by any residual"
                ));
            }
        }
        if !supported && far.iter().all(|&(x, y)| b.get(x, y) == rat(0)) {
            return Some(format!(
                "case {case}: generated matrix has no off-support entry"
            ));
        }
        None
    };
    let failures: Vec<String> = parallel::map_range(exec, 2 * cases_per_direction, run_case)
        .into_iter()
        .flatten()
        .collect();
    CharacterizationTrials {
        supported_cases: cases_per_direction,
        unsupported_cases: cases_per_direction,
        failures,
    }
}

fn characterization_group(fx: &Fixture, opts: &VerifyOptions) -> GroupOutcome {
    let mut c = Checker::default();
    let id = ExactMatrix::identity(fx.n());
    let mut named: Vec<(String, &ExactMatrix)> = vec![("I".into(), &id), ("A".into(), &fx.a)];
    for (k, m) in fx.alphas.iter().enumerate() {
        named.push((format!("alpha_{}", k + 1), m));
    }
    for (&(i, j), m) in fx.pairs.iter().zip(&fx.bijs) {
        named.push((format!("B_{i}{j}"), m));
    }
    // Beyond the exhaustive range, matrices other than I and A meet a seeded
    // sample of pairs.
    let sampled_pairs: Vec<(usize, usize)> = if fx.exhaustive_subsets {
        fx.pairs.clone()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(4);
        let mut idx = sample(&mut rng, fx.pairs.len(), 8.min(fx.pairs.len())).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|k| fx.pairs[k]).collect()
    };
    let results = parallel::map_range(opts.execution, named.len(), |k| {
        let (name, m) = &named[k];
        let pairs = if k < 2 { &fx.pairs } else { &sampled_pairs };
        let mut c = Checker::default();
        for &(i, j) in pairs {
            let res = characterization_residual(&fx.ctx, m, i, j).unwrap();
            c.check(res.is_zero(), || {
                let (x, y, q) = res.triplets().next().expect("nonzero");
                format!(
                    "residual ({i},{j}) of {name} is {} at ({x},{y}): {name} has support outside equal-or-adjacent pairs",
                    format_rational(q)
                )
            });
        }
        c
    });
    for r in results {
        c = c.merge(r);
    }
    if fx.d() >= 2 {
        let trials = characterization_trials(&fx.ctx, opts.random_cases, opts.seed, opts.execution);
        c.checks += trials.supported_cases + trials.unsupported_cases;
        if c.witness.is_none() {
            c.witness = trials.failures.into_iter().next();
        }
    }
    let note = if fx.exhaustive_subsets {
        format!("seed {}", opts.seed)
    } else {
        format!(
            "seed {}; fixed matrices beyond I and A checked on {} pairs",
            opts.seed,
            sampled_pairs.len()
        )
    };
    (c, Some(note))
}

/// Geodesic-square relations `B_xy = B_zw`, `B_yz = B_wx` for every `x` in
/// `sources` and every pair of coordinates.
fn check_squares(c: &mut Checker, fx: &Fixture, b: &ExactMatrix, name: &str, sources: &[usize]) {
    for &x in sources {
        for &(i, j) in &fx.pairs {
            let mi = fx.ctx.coord_mask(i).unwrap();
            let mj = fx.ctx.coord_mask(j).unwrap();
            let (y, z, w) = (x ^ mi, x ^ mi ^ mj, x ^ mj);
            c.check(
                b.get(x, y) == b.get(z, w) && b.get(y, z) == b.get(w, x),
                || format!("{name}: square x={x}, z={z} violates B_xy = B_zw or B_yz = B_wx"),
            );
        }
    }
}

fn check_equal_diagonal(c: &mut Checker, b: &ExactMatrix, name: &str) {
    let d0 = b.get(0, 0);
    let bad = (0..b.rows()).find(|&x| b.get(x, x) != d0);
    c.check(bad.is_none(), || {
        format!("{name}: diagonal not constant at {}", bad.unwrap())
    });
}

fn square_sources(fx: &Fixture, opts: &VerifyOptions) -> Vec<usize> {
    if fx.n() <= 256 {
        (0..fx.n()).collect()
    } else {
        sample_subsets(&fx.ctx, 64, opts.seed ^ 0x5157)
    }
}

fn sym_group(fx: &Fixture, opts: &VerifyOptions) -> GroupOutcome {
    let d = fx.d();
    let n = fx.n();
    let mut c = Checker::default();
    let basis = closed_form_sym_basis(&fx.ctx);
    let names: Vec<String> = std::iter::once("I".to_string())
        .chain((1..=d).map(|i| format!("alpha_{i}")))
        .collect();
    let sources = square_sources(fx, opts);
    let checks = parallel::map_range(opts.execution, basis.len(), |k| {
        let mut c = Checker::default();
        let (b, name) = (&basis[k], &names[k]);
        c.check(b.is_symmetric(), || format!("{name} not symmetric"));
        if let Some(r) = c.ok(is_alike_with_adjacency(&fx.graph, &fx.a, b), || {
            name.clone()
        }) {
            c.check(r.holds(), || format!("{name} not A-like: {r:?}"));
        }
        check_equal_diagonal(&mut c, b, name);
        check_squares(&mut c, fx, b, name, &sources);
        c
    });
    for r in checks {
        c = c.merge(r);
    }
    let span = SubspaceBasis::from_matrices(n, n, &basis).unwrap();
    c.check(span.dim() == d + 1, || {
        format!("I, alpha_1..alpha_{d} span dimension {}", span.dim())
    });
    // A random combination inherits the structural relations.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(3);
    let combo = basis.iter().fold(ExactMatrix::zeros(n, n), |acc, b| {
        acc.add_scaled(b, &rat(rng.gen_range(-5..=5))).unwrap()
    });
    check_equal_diagonal(&mut c, &combo, "random symmetric combination");
    check_squares(&mut c, fx, &combo, "random symmetric combination", &sources);
    (c, None)
}

fn antisym_group(fx: &Fixture, opts: &VerifyOptions) -> GroupOutcome {
    let d = fx.d();
    let n = fx.n();
    let ones = ExactVector::from_dense(vec![rat(1); n]);
    let per_pair = parallel::map_range(opts.execution, fx.pairs.len(), |k| {
        let (i, j) = fx.pairs[k];
        let b = &fx.bijs[k];
        let name = format!("B_{i}{j}");
        let mut c = Checker::default();
        let (si, sj) = (&fx.stars[i - 1], &fx.stars[j - 1]);
        let (ai, aj) = (&fx.alphas[i - 1], &fx.alphas[j - 1]);
        let factored = si
            .matmul(sj)
            .unwrap()
            .matmul(&ai.sub(aj).unwrap())
            .unwrap()
            .scale(&rat(2));
        c.eq_matrix(b, &factored, || {
            format!("{name} = 2 alpha*_{i} alpha*_{j} (alpha_{i} - alpha_{j})")
        });
        c.eq_matrix(&b.transpose(), &-b, || format!("{name} antisymmetric"));
        c.eq_matrix(
            &b.commutator(&fx.a).unwrap(),
            &ExactMatrix::zeros(n, n),
            || format!("{name} commutes with A"),
        );
        if let Some(r) = c.ok(is_alike_with_adjacency(&fx.graph, &fx.a, b), || {
            name.clone()
        }) {
            c.check(r.holds(), || format!("{name} not A-like: {r:?}"));
        }
        for (l, al) in fx.alphas.iter().enumerate() {
            let ell = l + 1;
            let right = al.matmul(b).unwrap();
            let expected = if ell == i || ell == j { -&right } else { right };
            c.eq_matrix(&b.matmul(al).unwrap(), &expected, || {
                let rel = if ell == i || ell == j {
                    "anticommutes"
                } else {
                    "commutes"
                };
                format!("{name} {rel} with alpha_{ell}")
            });
        }
        c.check(b.mul_vec(&ones).unwrap().is_zero(), || {
            format!("{name} 1 != 0")
        });
        for &s in &fx.subsets {
            let got = b.mul_vec(&fx.eigvec(s)).unwrap();
            let expected = match bij_action_on_ws(&fx.ctx, i, j, s).unwrap() {
                Some(t) => fx.eigvec(t.subset).scale(&rat(t.coefficient)),
                None => ExactVector::zeros(n),
            };
            c.eq_vector(&got, &expected, || format!("{name} W_{s:#b} action table"));
        }
        c
    });
    let mut c = per_pair
        .into_iter()
        .fold(Checker::default(), Checker::merge);
    let span = SubspaceBasis::from_matrices(n, n, &fx.bijs).unwrap();
    let expected = binomial(d, 2);
    c.check(span.dim() == expected, || {
        format!("B_ij span dimension {} != {expected}", span.dim())
    });
    (c, sampling_note(fx))
}

fn brute_group(fx: &Fixture, opts: &VerifyOptions) -> Result<GroupOutcome, String> {
    let d = fx.d();
    let n = fx.n();
    if n > opts.brute_force_cap {
        return Err(format!(
            "{n} vertices exceed the brute-force cap {}",
            opts.brute_force_cap
        ));
    }
    let mut c = Checker::default();
    let Some(dec) = c.ok(
        solve_alike_with_cap(&fx.graph, opts.brute_force_cap),
        || "solve_alike".into(),
    ) else {
        return Ok((c, None));
    };
    let dims = dec.dims();
    let (sym, anti) = (d + 1, binomial(d, 2));
    c.check(dims.sym == sym, || {
        format!("dim sym = {} != {sym}", dims.sym)
    });
    c.check(dims.antisym == anti, || {
        format!("dim antisym = {} != {anti}", dims.antisym)
    });
    c.check(dims.total == 1 + d + anti, || {
        format!("dim total = {} != {}", dims.total, 1 + d + anti)
    });

    let sym_basis = closed_form_sym_basis(&fx.ctx);
    let closed_sym = SubspaceBasis::from_matrices(n, n, &sym_basis).unwrap();
    let closed_anti = SubspaceBasis::from_matrices(n, n, &fx.bijs).unwrap();
    let closed_full = closed_sym.sum(&closed_anti).unwrap();
    c.check(dec.symmetric == closed_sym, || {
        "solver symmetric part != span{I, alpha_i}".into()
    });
    c.check(dec.antisymmetric == closed_anti, || {
        "solver antisymmetric part != span{B_ij}".into()
    });
    c.check(dec.full == closed_full, || {
        "solver A-like space != closed-form span".into()
    });

    let ones = ExactVector::from_dense(vec![rat(1); n]);
    let all: Vec<usize> = (0..n).collect();
    for (k, b) in dec.matrices(&dec.antisymmetric).iter().enumerate() {
        c.check(b.mul_vec(&ones).unwrap().is_zero(), || {
            format!("solver antisym #{k} does not kill 1")
        });
        c.check(b.is_antisymmetric(), || {
            format!("solver antisym #{k} not antisymmetric")
        });
    }
    for (k, b) in dec.matrices(&dec.symmetric).iter().enumerate() {
        let name = format!("solver sym #{k}");
        c.check(b.is_symmetric(), || format!("{name} not symmetric"));
        check_equal_diagonal(&mut c, b, &name);
        check_squares(&mut c, fx, b, &name, &all);
    }
    for (k, b) in dec.matrices(&dec.full).iter().enumerate() {
        let r = is_alike_with_adjacency(&fx.graph, &fx.a, b).unwrap();
        c.check(r.holds(), || format!("solver basis #{k} not A-like: {r:?}"));
    }
    Ok((c, None))
}

fn restriction_group(fx: &Fixture, opts: &VerifyOptions) -> GroupOutcome {
    let d = fx.d();
    let n = fx.n();
    let results = parallel::map_range(opts.execution, fx.pairs.len(), |k| {
        let (i, j) = fx.pairs[k];
        restriction_to_e1(&fx.ctx, &fx.bijs[k]).map(|m| (i, j, m))
    });
    let mut c = Checker::default();
    let mut restricted = Vec::new();
    for r in results {
        let Some((i, j, m)) = c.ok(r, || "restriction of B_ij".into()) else {
            continue;
        };
        let expected =
            ExactMatrix::from_triplets(d, d, [(i - 1, j - 1, rat(4)), (j - 1, i - 1, rat(-4))])
                .unwrap();
        c.eq_matrix(&m, &expected, || {
            format!("B_{i}{j} on E_1V = 4(e_{i} e_{j}^T - e_{j} e_{i}^T)")
        });
        c.check(m.is_antisymmetric(), || {
            format!("restriction of B_{i}{j} not antisymmetric")
        });
        restricted.push(m);
    }
    let span = SubspaceBasis::from_matrices(d, d, &restricted).unwrap();
    let target_gens: Vec<ExactMatrix> = fx
        .pairs
        .iter()
        .map(|&(i, j)| {
            ExactMatrix::from_triplets(d, d, [(i - 1, j - 1, rat(1)), (j - 1, i - 1, rat(-1))])
                .unwrap()
        })
        .collect();
    let target = SubspaceBasis::from_matrices(d, d, &target_gens).unwrap();
    c.check(span == target && span.dim() == binomial(d, 2), || {
        format!(
            "restrictions span dimension {} of the antisymmetric {d}x{d} space",
            span.dim()
        )
    });
    if let Some(m) = c.ok(restriction_to_e1(&fx.ctx, &fx.a), || {
        "restriction of A".into()
    }) {
        c.eq_matrix(&m, &ExactMatrix::scalar(d, rat(d as i64 - 2)), || {
            "A on E_1V = (D-2) I".into()
        });
    }
    if let Some(m) = c.ok(
        restriction_to_e1(&fx.ctx, &ExactMatrix::identity(n)),
        || "restriction of I".into(),
    ) {
        c.eq_matrix(&m, &ExactMatrix::identity(d), || "I on E_1V = I".into());
    }
    (c, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: usize) -> HypercubeContext {
        HypercubeContext::new(d).unwrap()
    }

    #[test]
    fn group_names_round_trip() {
        for g in CheckGroup::ALL {
            assert_eq!(CheckGroup::from_name(g.name()), Some(g));
        }
        assert_eq!(CheckGroup::from_name("nope"), None);
    }

    #[test]
    fn d3_all_groups_pass() {
        let report = verify_all(&ctx(3), &VerifyOptions::default());
        for g in &report.groups {
            assert_eq!(g.status, GroupStatus::Pass, "{g:?}");
        }
        assert!(report.all_pass);
        assert_eq!(report.groups.len(), 8);
    }

    #[test]
    fn d1_degenerate_cube_passes() {
        let report = verify_all(&ctx(1), &VerifyOptions::default());
        assert!(report.all_pass, "{report:?}");
    }

    #[test]
    fn corrupted_adjacency_is_caught_with_witness() {
        let opts = VerifyOptions {
            corrupt_adjacency: Some((0, 3)),
            ..VerifyOptions::default()
        };
        let report = verify_all(&ctx(2), &opts);
        assert!(!report.all_pass);
        let ch = report.group(CheckGroup::Characterization).unwrap();
        assert_eq!(ch.status, GroupStatus::Fail);
        assert!(ch.witness.as_ref().unwrap().contains("(0,3)"), "{ch:?}");
    }

    #[test]
    fn caps_skip_groups() {
        let opts = VerifyOptions {
            brute_force_cap: 4,
            groups: vec![CheckGroup::Brute],
            ..VerifyOptions::default()
        };
        let report = verify_all(&ctx(3), &opts);
        assert_eq!(report.groups[0].status, GroupStatus::Skipped);
        assert!(report.all_pass);
    }

    #[test]
    fn sequential_and_parallel_reports_match() {
        let base = VerifyOptions {
            seed: 11,
            ..VerifyOptions::default()
        };
        let seq = verify_all(
            &ctx(4),
            &VerifyOptions {
                execution: Execution::Sequential,
                ..base.clone()
            },
        );
        let par = verify_all(&ctx(4), &base);
        assert_eq!(seq, par);
    }

    #[test]
    fn trials_detect_both_directions() {
        let t = characterization_trials(&ctx(3), 5, 42, Execution::Sequential);
        assert!(t.failures.is_empty(), "{:?}", t.failures);
        assert_eq!(t.supported_cases + t.unsupported_cases, 10);
    }

    #[test]
    fn subset_sampling_is_deterministic() {
        let c = ctx(10);
        let a = sample_subsets(&c, 128, 5);
        assert_eq!(a, sample_subsets(&c, 128, 5));
        assert!(a.len() >= 100);
        assert!(a.contains(&0) && a.contains(&1023));
    }
}
