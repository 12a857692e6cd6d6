//! Subcommands.

use std::path::PathBuf;

use bellcut::inequalities::symmetry::{canonicalize, DEFAULT_MAX_GROUP};
use bellcut::inequalities::{
    catalog, catalog_names, classify, triangular_eliminate, zero_lift, Canonicalization, LinearInequality, Space,
};
use bellcut::mappings::{
    center_marginals, covariance, covariance_inv, iota, iota_inv, project_correlations, zero_root_lift, AnyVector,
    CorrelationVector, SuspensionVector,
};
use bellcut::polyhedra::{
    cut_vectors, dd_h_to_v, dd_v_to_h, facet_check, max_over, parse_representation, rcmet_hrep, rmet_hrep, DdOptions,
    HRep, Representation, VRep,
};
use bellcut::sdp::{
    cut_condition, elliptope_max, elliptope_membership, elliptope_rmet_max, gap_probe, precise_options,
    EdgeWeightedObjective, SolverOptions,
};
use bellcut::{Error, Rational, Result, Scalar, Shape};
use clap::{Args, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::io::{self, Context};

#[derive(Subcommand)]
pub enum Command {
    /// Convert vectors between behavior, COR, suspension and correlation coordinates.
    Map(MapArgs),
    /// Maximize an inequality over the cut vectors of its graph.
    CheckValid(CheckArgs),
    /// Decide whether an inequality is a facet of its cut polytope.
    CheckFacet(CheckArgs),
    /// Canonical representative under relabelings and switchings.
    Canonicalize(CanonArgs),
    /// Group inequalities into equivalence classes.
    Classify(CanonArgs),
    /// Facets of a cut polytope or of the hull of a V-representation.
    EnumerateFacets(FacetsArgs),
    /// Vertices of RCMet, RMet or of an H-representation.
    EnumerateVertices(VerticesArgs),
    /// Maximize an inequality over the elliptope, optionally intersected with RMet.
    SdpMax(SdpArgs),
    /// Decide elliptope membership of a vector.
    Membership(SolveArgs),
    /// Test the arcsine condition for membership in the elliptope of K_{m,n}.
    CutCondition(InputArg),
    /// Triangular elimination of a complete-graph inequality.
    Trielim(InputArg),
    /// Pad an inequality with zero coefficients for more settings.
    ZeroLift(ZeroLiftArgs),
    /// Print a named inequality, or list the names.
    Catalog(CatalogArgs),
    /// Sample RMet points and look for ones outside the elliptope whose projection is inside.
    SearchGap(SearchArgs),
}

#[derive(Args)]
pub struct InputArg {
    /// Input file; standard input when absent or `-`.
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MapOp {
    /// COR to behavior.
    Iota,
    /// Behavior to COR.
    IotaInv,
    /// COR to suspension.
    Phi,
    /// Suspension to COR.
    PhiInv,
    /// Suspension to correlation.
    Pi,
    /// COR with marginals moved to 1/2.
    Center,
    /// Correlation to suspension with zero root edges.
    Lift,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Args)]
pub struct MapArgs {
    #[arg(value_enum)]
    op: MapOp,
    #[arg(long, value_enum, default_value_t = Backend::Exact)]
    backend: Backend,
    #[command(flatten)]
    input: InputArg,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Graph to test on. Smaller bipartite inequalities are zero-lifted to it.
    #[arg(long)]
    graph: Option<Shape>,
    #[command(flatten)]
    input: InputArg,
}

#[derive(Args)]
pub struct CanonArgs {
    /// Search rows only and place columns by sorting; no orbit sizes.
    #[arg(long)]
    pruned: bool,
    /// Largest symmetry group searched exhaustively.
    #[arg(long, default_value_t = DEFAULT_MAX_GROUP)]
    max_group: u64,
    #[command(flatten)]
    input: InputArg,
}

#[derive(Args)]
pub struct FacetsArgs {
    /// Enumerate the facets of Cut(G) for this graph instead of reading a V-representation.
    #[arg(long)]
    graph: Option<Shape>,
    /// Write the H-representation in the line format instead of JSON lines.
    #[arg(long)]
    text: bool,
    #[command(flatten)]
    input: InputArg,
}

#[derive(Args)]
pub struct VerticesArgs {
    /// Vertices of RCMet(K_{m,n}) in COR coordinates.
    #[arg(long, conflicts_with = "rmet")]
    rcmet: Option<Shape>,
    /// Vertices of RMet of a suspension graph.
    #[arg(long)]
    rmet: Option<Shape>,
    /// Write the V-representation in the line format instead of JSON lines.
    #[arg(long)]
    text: bool,
    #[command(flatten)]
    input: InputArg,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Relative duality-gap tolerance.
    #[arg(long, env = "BELLCUT_TOL")]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[command(flatten)]
    input: InputArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Constraints {
    None,
    Rmet,
}

#[derive(Args)]
pub struct SdpArgs {
    #[arg(long, value_enum, default_value_t = Constraints::None)]
    constraints: Constraints,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args)]
pub struct ZeroLiftArgs {
    /// Target settings as `m,n`.
    #[arg(long, value_parser = io::pair)]
    to: (usize, usize),
    #[command(flatten)]
    input: InputArg,
}

#[derive(Args)]
pub struct CatalogArgs {
    name: Option<String>,
}

#[derive(Args)]
pub struct SearchArgs {
    #[arg(long, default_value = "SK2,2")]
    graph: Shape,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "BELLCUT_TOL")]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Map(_) => "map",
            Command::CheckValid(_) => "check-valid",
            Command::CheckFacet(_) => "check-facet",
            Command::Canonicalize(_) => "canonicalize",
            Command::Classify(_) => "classify",
            Command::EnumerateFacets(_) => "enumerate-facets",
            Command::EnumerateVertices(_) => "enumerate-vertices",
            Command::SdpMax(_) => "sdp-max",
            Command::Membership(_) => "membership",
            Command::CutCondition(_) => "cut-condition",
            Command::Trielim(_) => "trielim",
            Command::ZeroLift(_) => "zero-lift",
            Command::Catalog(_) => "catalog",
            Command::SearchGap(_) => "search-gap",
        }
    }
}

pub fn run(ctx: &Context, cmd: Command) -> Result<()> {
    let name = cmd.name();
    match cmd {
        Command::Map(a) => map(ctx, name, a),
        Command::CheckValid(a) => check(ctx, name, a, false),
        Command::CheckFacet(a) => check(ctx, name, a, true),
        Command::Canonicalize(a) => canonical(ctx, name, a),
        Command::Classify(a) => classify_cmd(ctx, name, a),
        Command::EnumerateFacets(a) => facets(ctx, name, a),
        Command::EnumerateVertices(a) => vertices(ctx, name, a),
        Command::SdpMax(a) => sdp_max(ctx, name, a),
        Command::Membership(a) => membership(ctx, name, a),
        Command::CutCondition(a) => cut_condition_cmd(ctx, name, a),
        Command::Trielim(a) => trielim(ctx, name, a),
        Command::ZeroLift(a) => zero_lift_cmd(ctx, name, a),
        Command::Catalog(a) => catalog_cmd(ctx, name, a),
        Command::SearchGap(a) => search_gap(ctx, name, a),
    }
}

fn read_inequalities(input: &InputArg) -> Result<Vec<LinearInequality>> {
    io::inequalities(&io::read_input(input.input.as_deref())?)
}

fn read_vectors<T: Scalar>(input: &InputArg) -> Result<Vec<AnyVector<T>>> {
    io::vectors(&io::read_input(input.input.as_deref())?)
}

fn solver_options(base: SolverOptions, tol: Option<f64>, max_iter: Option<usize>) -> Result<SolverOptions> {
    let mut opts = base;
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Invalid(format!("tolerance must be positive, got {t}")));
        }
        opts.gap_tol = t;
    }
    if let Some(k) = max_iter {
        if k == 0 {
            return Err(Error::Invalid("max-iter must be positive".into()));
        }
        opts.max_iter = k;
    }
    Ok(opts)
}

fn dd_options(ctx: &Context, dim: usize, rows: usize) -> DdOptions {
    let opts = DdOptions { force: ctx.force, ..DdOptions::default() };
    if ctx.force {
        if let Some(reason) = opts.refusal(dim, rows) {
            ctx.forced(reason);
        }
    }
    opts
}

fn strings(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(Scalar::to_json).collect())
}

fn mismatch(op: &str, want: &str, got: &str) -> Error {
    Error::Invalid(format!("{op} expects a {want} vector, got {got}"))
}

fn apply<T: Scalar>(op: MapOp, v: AnyVector<T>) -> Result<AnyVector<T>> {
    Ok(match (op, v) {
        (MapOp::Iota, AnyVector::Cor(p)) => AnyVector::Behavior(iota(&p)),
        (MapOp::IotaInv, AnyVector::Behavior(q)) => AnyVector::Cor(iota_inv(&q)?),
        (MapOp::Phi, AnyVector::Cor(p)) => AnyVector::Suspension(covariance(&p)),
        (MapOp::PhiInv, AnyVector::Suspension(x)) => AnyVector::Cor(covariance_inv(&x)),
        (MapOp::Pi, AnyVector::Suspension(x)) => AnyVector::Correlation(project_correlations(&x)),
        (MapOp::Center, AnyVector::Cor(p)) => AnyVector::Cor(center_marginals(&p)),
        (MapOp::Lift, AnyVector::Correlation(x)) => AnyVector::Suspension(zero_root_lift(&x)),
        (op, v) => {
            let (name, want) = match op {
                MapOp::Iota => ("iota", "cor"),
                MapOp::IotaInv => ("iota-inv", "behavior"),
                MapOp::Phi => ("phi", "cor"),
                MapOp::PhiInv => ("phi-inv", "suspension"),
                MapOp::Pi => ("pi", "suspension"),
                MapOp::Center => ("center", "cor"),
                MapOp::Lift => ("lift", "correlation"),
            };
            return Err(mismatch(name, want, v.kind()));
        }
    })
}

fn map_all<T: Scalar>(ctx: &Context, name: &str, a: &MapArgs) -> Result<()> {
    for v in read_vectors::<T>(&a.input)? {
        ctx.emit(name, apply(a.op, v)?.to_json())?;
    }
    Ok(())
}

fn map(ctx: &Context, name: &str, a: MapArgs) -> Result<()> {
    match a.backend {
        Backend::Exact => map_all::<Rational>(ctx, name, &a),
        Backend::Float => map_all::<f64>(ctx, name, &a),
    }
}

/// Moves COR inequalities to suspension coordinates and, given a graph,
/// brings the inequality onto it.
fn on_graph(q: LinearInequality, graph: Option<&Shape>) -> Result<LinearInequality> {
    let q = match q.space {
        Space::Cor { .. } => q.cor_to_suspension()?,
        _ => q,
    };
    let Some(g) = graph else { return Ok(q) };
    let target = Space::of_graph(g);
    if target == q.space {
        return Ok(q);
    }
    match (q.space, target) {
        (Space::Correlation { .. }, Space::Correlation { m, n })
        | (Space::Suspension { .. }, Space::Suspension { m, n }) => zero_lift(&q, m, n),
        (Space::Correlation { .. }, Space::Suspension { m, n }) => zero_lift(&q.correlation_to_suspension()?, m, n),
        _ => Err(Error::Invalid(format!("an inequality over {} does not live on {g}", q.space))),
    }
}

fn check(ctx: &Context, name: &str, a: CheckArgs, facet: bool) -> Result<()> {
    for q in read_inequalities(&a.input)? {
        let q = on_graph(q, a.graph.as_ref())?;
        let graph = q.space.graph()?;
        let cuts = cut_vectors(&graph)?;
        let mut out = if facet {
            serde_json::to_value(facet_check(&q.halfspace(), &cuts)?).map_err(|e| Error::Invalid(e.to_string()))?
        } else {
            let (max, arg) = max_over(&q.a, &cuts).ok_or_else(|| Error::Invalid("graph has no cut vectors".into()))?;
            json!({
                "valid": max <= q.rhs,
                "max": max.to_json(),
                "slack": (&q.rhs - &max).to_json(),
                "maximizer": strings(&arg),
            })
        };
        out["rhs"] = q.rhs.to_json();
        out["graph"] = json!(graph.to_string());
        ctx.emit(name, out)?;
    }
    Ok(())
}

fn how(a: &CanonArgs) -> Canonicalization {
    if a.pruned {
        Canonicalization::Pruned
    } else {
        Canonicalization::Exhaustive { max_group: a.max_group }
    }
}

fn canonical(ctx: &Context, name: &str, a: CanonArgs) -> Result<()> {
    for q in read_inequalities(&a.input)? {
        let c = canonicalize(&q, how(&a))?;
        ctx.emit_inequality(name, &c.form, json!({"orbit_size": c.orbit_size, "group_size": c.group_size}))?;
    }
    Ok(())
}

fn classify_cmd(ctx: &Context, name: &str, a: CanonArgs) -> Result<()> {
    let qs = read_inequalities(&a.input)?;
    let classes = classify(&qs, how(&a))?;
    if ctx.pretty {
        for c in &classes {
            let orbit = c.orbit_size.map_or_else(|| "unknown".to_string(), |k| k.to_string());
            ctx.line(&format!("# {} member(s), orbit size {orbit}", c.members.len()))?;
            ctx.line(c.representative.pretty().trim_end())?;
        }
        return Ok(());
    }
    ctx.emit_header(name, "classes", json!({"inputs": qs.len(), "classes": classes.len()}))?;
    for c in &classes {
        ctx.item(&json!({
            "representative": c.representative.to_json(),
            "members": c.members,
            "orbit_size": c.orbit_size,
        }))?;
    }
    Ok(())
}

fn read_representation(input: &InputArg) -> Result<Representation> {
    parse_representation(&io::read_input(input.input.as_deref())?)
}

fn text_output(ctx: &Context, name: &str, body: &str) -> Result<()> {
    ctx.line(&format!("# {}", ctx.provenance(name)))?;
    ctx.line(body.trim_end())
}

fn facets(ctx: &Context, name: &str, a: FacetsArgs) -> Result<()> {
    let (vrep, space): (VRep, Option<Space>) = match &a.graph {
        Some(g) => (cut_vectors(g)?, Some(Space::of_graph(g))),
        None => match read_representation(&a.input)? {
            Representation::V(v) => (v, None),
            Representation::H(_) => return Err(Error::Invalid("enumerate-facets needs a V-representation".into())),
        },
    };
    let hrep = dd_v_to_h(&vrep, dd_options(ctx, vrep.dim, vrep.len()))?;
    if a.text {
        return text_output(ctx, name, &hrep.to_text());
    }
    let Some(space) = space else {
        return stream_hrep(ctx, name, &hrep);
    };
    if !ctx.pretty {
        ctx.emit_header(name, "facets", json!({"space": space.to_string(), "count": hrep.inequalities.len()}))?;
    }
    for h in hrep.inequalities {
        let q = LinearInequality::from_halfspace(space, h)?;
        if ctx.pretty {
            ctx.line(q.pretty().trim_end())?;
        } else {
            ctx.item(&q.to_json())?;
        }
    }
    Ok(())
}

fn stream_hrep(ctx: &Context, name: &str, hrep: &HRep) -> Result<()> {
    ctx.emit_header(
        name,
        "facets",
        json!({"dim": hrep.dim, "count": hrep.inequalities.len(), "equations": hrep.equations.len()}),
    )?;
    for e in &hrep.equations {
        ctx.item(&json!({"a": strings(&e.a), "rhs": e.b.to_json(), "equation": true}))?;
    }
    for h in &hrep.inequalities {
        ctx.item(&json!({"a": strings(&h.a), "rhs": h.b.to_json()}))?;
    }
    Ok(())
}

fn vertices(ctx: &Context, name: &str, a: VerticesArgs) -> Result<()> {
    // Wraps each vertex as a typed vector when the coordinates are known.
    type Wrap = Box<dyn Fn(Vec<Rational>) -> Result<AnyVector<Rational>>>;
    let (hrep, wrap): (HRep, Option<Wrap>) = match (&a.rcmet, &a.rmet) {
        (Some(Shape::Bipartite(b)), _) => {
            let b = *b;
            (rcmet_hrep(b), Some(Box::new(move |p| Ok(AnyVector::Cor(bellcut::mappings::CorVector::new(b, p)?)))))
        }
        (Some(other), _) => return Err(Error::InvalidShape(format!("RCMet is defined on K_{{m,n}}, got {other}"))),
        (None, Some(g)) => {
            let s = match g {
                Shape::Suspension(s) => *s,
                Shape::Bipartite(b) => b.suspension(),
                other => return Err(Error::InvalidShape(format!("RMet is defined on suspension graphs, got {other}"))),
            };
            (rmet_hrep(s), Some(Box::new(move |p| Ok(AnyVector::Suspension(SuspensionVector::new(s, p)?)))))
        }
        (None, None) => match read_representation(&a.input)? {
            Representation::H(h) => (h, None),
            Representation::V(_) => return Err(Error::Invalid("enumerate-vertices needs an H-representation".into())),
        },
    };
    let rows = hrep.inequalities.len() + hrep.equations.len();
    let vrep = dd_h_to_v(&hrep, dd_options(ctx, hrep.dim, rows))?;
    if a.text {
        return text_output(ctx, name, &vrep.to_text());
    }
    ctx.emit_header(name, "vertices", json!({"dim": vrep.dim, "count": vrep.len()}))?;
    for p in vrep.points {
        match &wrap {
            Some(w) => ctx.item(&w(p)?.to_json())?,
            None => ctx.item(&json!({"coords": strings(&p)}))?,
        }
    }
    Ok(())
}

fn sdp_max(ctx: &Context, name: &str, a: SdpArgs) -> Result<()> {
    let opts = solver_options(SolverOptions::default(), a.solve.tol, a.solve.max_iter)?;
    for q in read_inequalities(&a.solve.input)? {
        let q = on_graph(q, None)?;
        let obj = EdgeWeightedObjective::from_inequality(&q)?;
        let sol = match a.constraints {
            Constraints::None => elliptope_max(&obj, &opts)?,
            Constraints::Rmet => elliptope_rmet_max(&obj, &opts)?,
        };
        let mut out = sol.to_json();
        out["rhs"] = q.rhs.to_json();
        out["space"] = json!(q.space.to_string());
        out["constraints"] = json!(if a.constraints == Constraints::Rmet { "rmet" } else { "none" });
        ctx.emit(name, out)?;
    }
    Ok(())
}

fn to_suspension(v: AnyVector<f64>) -> Result<SuspensionVector<f64>> {
    match v {
        AnyVector::Behavior(q) => Ok(covariance(&iota_inv(&q)?)),
        AnyVector::Cor(p) => Ok(covariance(&p)),
        AnyVector::Suspension(x) => Ok(x),
        AnyVector::Correlation(_) => Err(mismatch("conversion", "behavior, cor or suspension", "correlation")),
    }
}

fn membership(ctx: &Context, name: &str, a: SolveArgs) -> Result<()> {
    let opts = solver_options(precise_options(), a.tol, a.max_iter)?;
    for v in read_vectors::<f64>(&a.input)? {
        let kind = v.kind();
        let (shape, x): (Shape, Vec<f64>) = match v {
            AnyVector::Correlation(c) => (c.shape.into(), c.x),
            other => {
                let s = to_suspension(other)?;
                (s.shape.into(), s.x)
            }
        };
        let mut out = elliptope_membership(&shape, &x, &opts)?.to_json();
        out["input_kind"] = json!(kind);
        out["graph"] = json!(shape.to_string());
        ctx.emit(name, out)?;
    }
    Ok(())
}

fn cut_condition_cmd(ctx: &Context, name: &str, a: InputArg) -> Result<()> {
    for v in read_vectors::<f64>(&a)? {
        let x: CorrelationVector<f64> = match v {
            AnyVector::Correlation(c) => c,
            other => project_correlations(&to_suspension(other)?),
        };
        ctx.emit(name, cut_condition(&x)?.to_json())?;
    }
    Ok(())
}

fn trielim(ctx: &Context, name: &str, a: InputArg) -> Result<()> {
    for q in read_inequalities(&a)? {
        let out = triangular_eliminate(&q)?;
        let eliminated: Vec<Value> = out
            .eliminated
            .iter()
            .map(|e| json!({"edge": format!("{}{}", e.u, e.v), "coefficient": e.coefficient.to_json(), "new_node": e.label()}))
            .collect();
        ctx.emit_inequality(
            name,
            &out.inequality,
            json!({"already_bipartite": out.already_bipartite, "eliminated": eliminated}),
        )?;
    }
    Ok(())
}

fn zero_lift_cmd(ctx: &Context, name: &str, a: ZeroLiftArgs) -> Result<()> {
    let (m, n) = a.to;
    for q in read_inequalities(&a.input)? {
        ctx.emit_inequality(name, &zero_lift(&q, m, n)?, json!({}))?;
    }
    Ok(())
}

fn catalog_cmd(ctx: &Context, name: &str, a: CatalogArgs) -> Result<()> {
    match a.name {
        Some(n) => ctx.emit_inequality(name, &catalog(&n)?, json!({"name": n})),
        None if ctx.pretty => catalog_names().iter().try_for_each(|n| ctx.line(n)),
        None => ctx.emit(name, json!({"names": catalog_names()})),
    }
}

/// A uniform point of `RMet(∇K_{m,n})`: roots uniform in `[-1, 1]`, then
/// each edge uniform in the interval its two roots allow.
fn sample_rmet(rng: &mut ChaCha8Rng, s: bellcut::SuspensionShape) -> Result<SuspensionVector<f64>> {
    let (m, n) = (s.m(), s.n());
    let roots: Vec<f64> = (0..m + n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mut x = roots.clone();
    for i in 0..m {
        for j in 0..n {
            let (ra, rb): (f64, f64) = (roots[i], roots[m + j]);
            let (lo, hi) = (-1.0 + (ra + rb).abs(), 1.0 - (ra - rb).abs());
            x.push(lo + rng.gen::<f64>() * (hi - lo));
        }
    }
    SuspensionVector::new(s, x)
}

fn search_gap(ctx: &Context, name: &str, a: SearchArgs) -> Result<()> {
    let s = match a.graph {
        Shape::Suspension(s) => s,
        Shape::Bipartite(b) => b.suspension(),
        other => return Err(Error::InvalidShape(format!("search-gap needs a suspension graph, got {other}"))),
    };
    let opts = solver_options(precise_options(), a.tol, a.max_iter)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    ctx.emit_header(
        name,
        "gap-candidates",
        json!({"graph": bellcut::Shape::from(s).to_string(), "samples": a.samples, "seed": a.seed}),
    )?;
    let (mut candidates, mut failures, mut outside) = (0usize, 0usize, 0usize);
    for k in 0..a.samples {
        let x = sample_rmet(&mut rng, s)?;
        match gap_probe(&x, &opts) {
            Ok(p) => {
                if p.suspension_margin < 0.0 {
                    outside += 1;
                }
                if p.is_candidate() {
                    candidates += 1;
                    ctx.item(&json!({
                        "sample": k,
                        "point": AnyVector::Suspension(x).to_json(),
                        "probe": serde_json::to_value(&p).map_err(|e| Error::Invalid(e.to_string()))?,
                    }))?;
                }
            }
            Err(e) if e.kind() == bellcut::ErrorKind::Solver => failures += 1,
            Err(e) => return Err(e),
        }
    }
    ctx.item(&json!({"summary": {
        "samples": a.samples,
        "outside_elliptope": outside,
        "candidates": candidates,
        "solver_failures": failures,
    }}))
}
