//! `freearr` command-line interface. Every command writes one JSON document
//! to stdout.
//!
//! Exit codes: 0 success, 1 negative verdict (report still written), 2 error,
//! 3 cap exceeded (partial report written).

mod input;

use std::collections::BTreeMap;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use freearr::accuracy::{check_accuracy, scan_unique_witnesses, AccuracyReport, Mode, Strategy, Verdict, WitnessHint};
use freearr::arrangement::LatticeError;
use freearr::deformations::{
    build_catalan, build_ideal_shi, build_shi, shi_accuracy_report, shi_pipeline_certificate, shi_witnesses,
    Deformation, DeformationError,
};
use freearr::exactmath::{IntPoly, Scalar};
use freearr::graphic::{
    chromatic_polynomial, exponents_from_elimination, fixture, perfect_elimination_order, Fixture, Graph, GraphError,
    DEFAULT_CHROMATIC_EDGE_CAP,
};
use freearr::intermediate::{
    bruteforce_accuracy, closed_form_accuracy, localization_fixture_check, symbolic_accuracy,
    symbolic_accuracy_by_dimension, IntermediateError, Label,
};
use freearr::io::{AnyArrangement, ArrangementFile, FlatJson, ReportJson};
use freearr::matfree::{
    accuracy_witnesses, certify_partition, search_mat_partition, MatCertificate, MatError, SearchOutcome,
    SearchStrategy, Witness, DEFAULT_NODE_CAP,
};
use freearr::{Arrangement, LatticeOptions};
use input::{ideal, parse_indices, read_graph, root_system, ArrInput};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "freearr", version, about = "Exact lattices, MAT-certificates and accuracy checks for hyperplane arrangements")]
struct Cli {
    /// Cap on the number of flats of any lattice built.
    #[arg(long, global = true, default_value_t = freearr::arrangement::DEFAULT_MAX_FLATS)]
    max_flats: usize,
    /// Build lattices only up to this rank where a partial lattice suffices.
    #[arg(long, global = true)]
    max_rank: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lattice computations on a single arrangement.
    #[command(subcommand)]
    Arr(ArrCmd),
    /// Weyl arrangements.
    #[command(subcommand)]
    Weyl(WeylCmd),
    /// Ideals of the positive root poset.
    #[command(subcommand)]
    Ideal(IdealCmd),
    /// MAT-partitions.
    #[command(subcommand)]
    Mat(MatCmd),
    /// Accuracy checks.
    #[command(subcommand)]
    Accuracy(AccuracyCmd),
    /// Shi and Catalan deformations.
    #[command(subcommand)]
    Deform(DeformCmd),
    /// Graphic arrangements.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Intermediate arrangements between G(r,r,l) and G(r,1,l).
    #[command(subcommand)]
    Inter(InterCmd),
}

#[derive(Subcommand, Debug)]
enum ArrCmd {
    /// Characteristic polynomial, constant term first.
    Charpoly(ArrInput),
    /// Level sizes, Moebius data and structural certificates.
    Lattice {
        #[command(flatten)]
        input: ArrInput,
        /// List every flat.
        #[arg(long)]
        flats: bool,
        /// Search for a divisional flag.
        #[arg(long)]
        divisional: bool,
    },
    /// Restriction to the intersection of the given hyperplanes.
    Restrict {
        #[command(flatten)]
        input: ArrInput,
        /// Comma-separated hyperplane indices.
        #[arg(long)]
        hyperplanes: String,
    },
    /// Localization at the intersection of the given hyperplanes.
    Localize {
        #[command(flatten)]
        input: ArrInput,
        #[arg(long)]
        hyperplanes: String,
    },
}

#[derive(Subcommand, Debug)]
enum WeylCmd {
    /// Positive roots, exponents and the Weyl arrangement.
    Build {
        #[arg(long = "type")]
        root_type: String,
    },
}

#[derive(Subcommand, Debug)]
enum IdealCmd {
    /// All ideals, as lists of simple-root coefficient vectors.
    Enumerate {
        #[arg(long = "type")]
        root_type: String,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// The ideal arrangement and its root-height partition.
    Arrangement {
        #[arg(long = "type")]
        root_type: String,
        /// Generators `1,1,0;0,1,1`; omitted means the whole root poset.
        #[arg(long)]
        generators: Option<String>,
    },
}

#[derive(Args, Debug)]
struct PartitionArg {
    /// Partition as JSON, e.g. `[[0,1],[2]]`; defaults to the root-height
    /// partition for `--type` input.
    #[arg(long)]
    partition: Option<String>,
}

#[derive(Subcommand, Debug)]
enum MatCmd {
    /// Verify a MAT-partition.
    Certify {
        #[command(flatten)]
        input: ArrInput,
        #[command(flatten)]
        partition: PartitionArg,
    },
    /// Search for a MAT-partition.
    Search {
        #[command(flatten)]
        input: ArrInput,
        #[command(flatten)]
        partition: PartitionArg,
        /// Backtrack over all partitions instead of trying the hint.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: usize,
    },
    /// Accuracy witnesses read off a verified MAT-partition.
    Witnesses {
        #[command(flatten)]
        input: ArrInput,
        #[command(flatten)]
        partition: PartitionArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Almost,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    WitnessFirst,
    Exhaustive,
}

#[derive(Subcommand, Debug)]
enum AccuracyCmd {
    /// Decide (almost) accuracy.
    Check {
        #[command(flatten)]
        input: ArrInput,
        /// Comma-separated exponents; defaults to certified or
        /// characteristic-polynomial exponents.
        #[arg(long)]
        exponents: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::WitnessFirst)]
        strategy: StrategyArg,
    },
    /// All flats of dimension `d` whose restriction exponents are the prefix.
    Scan {
        #[command(flatten)]
        input: ArrInput,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        exponents: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Shi,
    Catalan,
    /// `Shi_I^k` for the ideal given by `--generators`.
    Ideal,
}

#[derive(Args, Debug)]
struct DeformArgs {
    #[arg(long = "type")]
    root_type: String,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Family::Shi)]
    family: Family,
    /// Ideal generators for `--family ideal`.
    #[arg(long)]
    generators: Option<String>,
}

#[derive(Subcommand, Debug)]
enum DeformCmd {
    /// Hyperplanes of the deformation with their origin tags.
    Build(DeformArgs),
    /// MAT-certificate from the free base.
    Certify(DeformArgs),
    /// Pipeline witnesses and the accuracy report.
    Witnesses(DeformArgs),
}

#[derive(Args, Debug)]
struct GraphInput {
    #[arg(long, group = "graph_source")]
    file: Option<std::path::PathBuf>,
    #[arg(long, group = "graph_source")]
    fixture: Option<Fixture>,
}

#[derive(Subcommand, Debug)]
enum GraphCmd {
    /// Graphic arrangement of a graph.
    Build(GraphInput),
    /// Accuracy of the graphic arrangement.
    Accuracy(GraphInput),
    /// Chromatic polynomial by deletion-contraction.
    Chromatic {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = DEFAULT_CHROMATIC_EDGE_CAP)]
        edge_cap: usize,
    },
    /// An embedded fixture graph.
    Fixture {
        #[arg(long)]
        which: Fixture,
    },
}

#[derive(Subcommand, Debug)]
enum InterCmd {
    /// Accuracy of `A^k_l(r)`.
    Check {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, group = "method")]
        symbolic: bool,
        #[arg(long, group = "method")]
        bruteforce: bool,
        #[arg(long, group = "method")]
        both: bool,
    },
    /// Compare the localization of `A^1_l(r)` with `A^0_{l-1}(r)`.
    LocalizationFixture {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        r: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Negative,
    Capped,
}

struct Output {
    value: Value,
    status: Status,
}

impl Output {
    fn ok(value: Value) -> Self {
        Output { value, status: Status::Ok }
    }

    fn verdict(value: Value, positive: bool) -> Self {
        Output { value, status: if positive { Status::Ok } else { Status::Negative } }
    }
}

struct Ctx {
    opts: LatticeOptions,
}

macro_rules! with_arr {
    ($any:expr, $a:ident => $body:expr) => {
        match $any {
            AnyArrangement::Rational($a) => $body,
            AnyArrangement::Cyclotomic($a) => $body,
        }
    };
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn poly(p: &IntPoly) -> Value {
    to_value(&p.coeffs())
}

fn split_roots(p: &IntPoly) -> Option<Vec<usize>> {
    p.nonnegative_integer_roots().map(|v| v.into_iter().map(|e| e as usize).collect())
}

fn witness_json<S: Scalar>(d: usize, w: &Witness<S>) -> Value {
    json!({
        "d": d,
        "block": w.block,
        "subset": w.subset,
        "flat": FlatJson::new(&w.flat),
        "exponents": w.exponents,
        "evidence": w.evidence,
    })
}

fn report_output<S: Scalar>(r: &AccuracyReport<S>, exponents: &[usize]) -> Output {
    let mut v = to_value(&ReportJson::new(r));
    v["exponents"] = to_value(&exponents);
    let status = match r.verdict {
        Verdict::Accurate => Status::Ok,
        Verdict::NotAccurate => Status::Negative,
        Verdict::Inconclusive => Status::Capped,
    };
    Output { value: v, status }
}

fn parse_partition(text: &str) -> Result<Vec<Vec<usize>>> {
    serde_json::from_str(text).context("partition must be a JSON array of index arrays")
}

fn partition_for(arg: &PartitionArg, height: Option<Vec<Vec<usize>>>) -> Result<Vec<Vec<usize>>> {
    match (&arg.partition, height) {
        (Some(p), _) => parse_partition(p),
        (None, Some(h)) => Ok(h),
        (None, None) => bail!("--partition is required unless the arrangement comes from --type"),
    }
}

fn certificate_output(result: Result<MatCertificate, MatError>) -> Result<Output> {
    match result {
        Ok(c) => Ok(Output::ok(json!({ "valid": true, "certificate": c }))),
        Err(e @ (MatError::Violation { .. } | MatError::DualMismatch { .. })) => {
            Ok(Output::verdict(json!({ "valid": false, "reason": e.to_string() }), false))
        }
        Err(e) => Err(e.into()),
    }
}

fn hints_from<S: Scalar>(
    a: &Arrangement<S>,
    partition: Option<&[Vec<usize>]>,
    opts: LatticeOptions,
) -> Result<(Option<Vec<usize>>, BTreeMap<usize, WitnessHint<S>>)> {
    let Some(p) = partition else {
        return Ok((None, BTreeMap::new()));
    };
    let Ok(cert) = certify_partition(a, p) else {
        return Ok((None, BTreeMap::new()));
    };
    let hints = accuracy_witnesses(&cert, a, opts)?.into_iter().map(|(d, w)| (d, w.into())).collect();
    Ok((Some(cert.exponents), hints))
}

fn graph_exponents(g: &Graph) -> Option<Vec<usize>> {
    perfect_elimination_order(g).map(|o| exponents_from_elimination(g, &o).expect("valid elimination order"))
}

fn accuracy_check<S: Scalar>(
    ctx: &Ctx,
    a: &Arrangement<S>,
    partition: Option<&[Vec<usize>]>,
    known: Option<Vec<usize>>,
    exponents: Option<&str>,
    mode: Mode,
    strategy: Strategy,
) -> Result<Output> {
    let (certified, hints) = hints_from(a, partition, ctx.opts)?;
    let exps = match (exponents, certified.or(known)) {
        (Some(e), _) => parse_indices(e)?,
        (None, Some(e)) => e,
        (None, None) => {
            let chi = a.characteristic_polynomial_with(ctx.opts)?;
            match split_roots(&chi) {
                Some(e) => e,
                None => {
                    let v = json!({
                        "verdict": Verdict::NotAccurate,
                        "reason": "characteristic polynomial does not split over the nonnegative integers",
                        "charpoly": poly(&chi),
                    });
                    return Ok(Output::verdict(v, false));
                }
            }
        }
    };
    if exps.len() != a.dim() {
        bail!("expected {} exponents, got {}", a.dim(), exps.len());
    }
    let r = check_accuracy(a, &exps, mode, strategy, &hints, ctx.opts);
    Ok(report_output(&r, &exps))
}

fn arr_lattice<S: Scalar>(ctx: &Ctx, a: &Arrangement<S>, flats: bool, divisional: bool) -> Result<Output> {
    let opts = LatticeOptions { max_rank: ctx.opts.max_rank, ..ctx.opts };
    let lattice = a.lattice_with(opts)?;
    let mut v = json!({
        "dim": a.dim(),
        "rank": a.rank(),
        "hyperplanes": a.len(),
        "complete": lattice.is_complete(),
        "level_sizes": lattice.level_sizes(),
        "flat_count": lattice.len(),
    });
    if flats {
        let list: Vec<Value> = (0..lattice.len())
            .map(|x| {
                let mut f = to_value(&FlatJson::new(lattice.flat(x)));
                f["mobius"] = json!(lattice.mobius(x));
                f
            })
            .collect();
        v["flats"] = Value::Array(list);
    }
    if lattice.is_complete() {
        let chi = lattice.characteristic_polynomial();
        v["charpoly"] = poly(&chi);
        v["exponents"] = to_value(&split_roots(&chi));
        v["supersolvable"] = to_value(&lattice.supersolvable_certificate().map(|c| c.exponents));
        if divisional {
            v["divisional_flag"] = to_value(&lattice.divisional_flag_search().map(|f| {
                json!({
                    "flag": f.flag.iter().map(|&x| FlatJson::new(lattice.flat(x))).collect::<Vec<_>>(),
                    "polynomials": f.polynomials.iter().map(poly).collect::<Vec<_>>(),
                })
            }));
        }
    }
    Ok(Output::ok(v))
}

fn run_arr(ctx: &Ctx, cmd: ArrCmd) -> Result<Output> {
    match cmd {
        ArrCmd::Charpoly(input) => with_arr!(input.load()?.arr, a => {
            let chi = a.characteristic_polynomial_with(ctx.opts)?;
            Ok(Output::ok(json!({ "charpoly": poly(&chi), "exponents": split_roots(&chi) })))
        }),
        ArrCmd::Lattice { input, flats, divisional } => {
            with_arr!(input.load()?.arr, a => arr_lattice(ctx, &a, flats, divisional))
        }
        ArrCmd::Restrict { input, hyperplanes } => {
            let idx = parse_indices(&hyperplanes)?;
            with_arr!(input.load()?.arr, a => {
                check_indices(&idx, a.len())?;
                let x = a.intersection(idx);
                let r = a.restriction(&x);
                Ok(Output::ok(json!({ "flat": FlatJson::new(&x), "arrangement": ArrangementFile::from_arrangement(&r) })))
            })
        }
        ArrCmd::Localize { input, hyperplanes } => {
            let idx = parse_indices(&hyperplanes)?;
            with_arr!(input.load()?.arr, a => {
                check_indices(&idx, a.len())?;
                let x = a.intersection(idx);
                let l = a.localization(&x);
                Ok(Output::ok(json!({ "flat": FlatJson::new(&x), "arrangement": ArrangementFile::from_arrangement(&l) })))
            })
        }
    }
}

fn check_indices(idx: &[usize], n: usize) -> Result<()> {
    if let Some(i) = idx.iter().find(|&&i| i >= n) {
        bail!("hyperplane index {i} out of range (arrangement has {n})");
    }
    Ok(())
}

fn run_weyl(cmd: WeylCmd) -> Result<Output> {
    let WeylCmd::Build { root_type } = cmd;
    let rs = root_system(&root_type)?;
    let roots: Vec<Value> = rs
        .positive_roots()
        .iter()
        .map(|r| json!({ "simple_coeffs": r.simple_coeffs, "height": r.height }))
        .collect();
    Ok(Output::ok(json!({
        "type": rs.root_type().to_string(),
        "rank": rs.rank(),
        "coxeter_number": rs.coxeter_number(),
        "exponents": rs.exponents(),
        "positive_roots": roots,
        "arrangement": ArrangementFile::from_arrangement(&rs.weyl_arrangement()),
    })))
}

fn run_ideal(cmd: IdealCmd) -> Result<Output> {
    match cmd {
        IdealCmd::Enumerate { root_type, cap } => {
            let rs = root_system(&root_type)?;
            let ideals = rs.enumerate_ideals(cap)?;
            let list: Vec<Vec<Vec<i64>>> = ideals.iter().map(|i| i.simple_coeffs(&rs)).collect();
            Ok(Output::ok(json!({ "type": rs.root_type().to_string(), "count": list.len(), "ideals": list })))
        }
        IdealCmd::Arrangement { root_type, generators } => {
            let rs = root_system(&root_type)?;
            let i = ideal(&rs, generators.as_deref())?;
            Ok(Output::ok(json!({
                "type": rs.root_type().to_string(),
                "roots": i.simple_coeffs(&rs),
                "height_partition": rs.root_height_partition(&i),
                "arrangement": ArrangementFile::from_arrangement(&rs.ideal_arrangement(&i)),
            })))
        }
    }
}

fn run_mat(ctx: &Ctx, cmd: MatCmd) -> Result<Output> {
    match cmd {
        MatCmd::Certify { input, partition } => {
            let loaded = input.load()?;
            let p = partition_for(&partition, loaded.height_partition)?;
            with_arr!(loaded.arr, a => certificate_output(certify_partition(&a, &p)))
        }
        MatCmd::Search { input, partition, exhaustive, node_cap } => {
            let loaded = input.load()?;
            let strategy = if exhaustive {
                SearchStrategy::Exhaustive
            } else {
                SearchStrategy::Hint(partition_for(&partition, loaded.height_partition)?)
            };
            let outcome = with_arr!(loaded.arr, a => search_mat_partition(&a, &strategy, node_cap, ctx.opts)?);
            Ok(match outcome {
                SearchOutcome::Found(c) => Output::ok(json!({ "found": true, "certificate": c })),
                SearchOutcome::NotFound { conclusive } => {
                    Output::verdict(json!({ "found": false, "conclusive": conclusive }), false)
                }
            })
        }
        MatCmd::Witnesses { input, partition } => {
            let loaded = input.load()?;
            let p = partition_for(&partition, loaded.height_partition)?;
            with_arr!(loaded.arr, a => {
                let cert = match certify_partition(&a, &p) {
                    Ok(c) => c,
                    Err(e) => return certificate_output(Err(e)),
                };
                let w = accuracy_witnesses(&cert, &a, ctx.opts)?;
                let list: Vec<Value> = w.iter().map(|(d, w)| witness_json(*d, w)).collect();
                Ok(Output::ok(json!({ "exponents": cert.exponents, "witnesses": list })))
            })
        }
    }
}

fn run_accuracy(ctx: &Ctx, cmd: AccuracyCmd) -> Result<Output> {
    match cmd {
        AccuracyCmd::Check { input, exponents, mode, strategy } => {
            let loaded = input.load()?;
            let mode = match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Almost => Mode::Almost,
            };
            let strategy = match strategy {
                StrategyArg::WitnessFirst => Strategy::WitnessFirst,
                StrategyArg::Exhaustive => Strategy::Exhaustive,
            };
            let known = loaded.graph.as_ref().and_then(graph_exponents);
            let part = loaded.height_partition.as_deref();
            with_arr!(loaded.arr, a => accuracy_check(ctx, &a, part, known, exponents.as_deref(), mode, strategy))
        }
        AccuracyCmd::Scan { input, d, exponents } => {
            let loaded = input.load()?;
            with_arr!(loaded.arr, a => {
                if d == 0 || d > a.dim() {
                    bail!("d must lie in 1..={}", a.dim());
                }
                let lattice = a.lattice_with(LatticeOptions { max_rank: None, ..ctx.opts })?;
                let exps = match exponents {
                    Some(e) => parse_indices(&e)?,
                    None => split_roots(&lattice.characteristic_polynomial())
                        .context("characteristic polynomial does not split; pass --exponents")?,
                };
                let found: Vec<FlatJson> =
                    scan_unique_witnesses(&lattice, &exps, d).into_iter().map(|x| FlatJson::new(lattice.flat(x))).collect();
                let positive = !found.is_empty();
                Ok(Output::verdict(json!({ "d": d, "exponents": exps, "witnesses": found }), positive))
            })
        }
    }
}

fn deformation_ideal(rs: &freearr::rootsys::RootSystem, args: &DeformArgs) -> Result<freearr::rootsys::Ideal> {
    match args.family {
        Family::Shi => Ok(rs.ideal_from_roots(&[])?),
        Family::Catalan => Ok(rs.full_ideal()),
        Family::Ideal => ideal(rs, Some(args.generators.as_deref().context("--family ideal needs --generators")?)),
    }
}

fn deformation_json(def: &Deformation) -> Value {
    json!({
        "k": def.k,
        "base_len": def.base_len,
        "tags": def.tags,
        "arrangement": ArrangementFile::from_arrangement(&def.arrangement),
    })
}

fn run_deform(ctx: &Ctx, cmd: DeformCmd) -> Result<Output> {
    match cmd {
        DeformCmd::Build(args) => {
            let rs = root_system(&args.root_type)?;
            let def = match args.family {
                Family::Shi => build_shi(&rs, args.k)?,
                Family::Catalan => build_catalan(&rs, args.k)?,
                Family::Ideal => build_ideal_shi(&rs, args.k, &deformation_ideal(&rs, &args)?)?,
            };
            Ok(Output::ok(deformation_json(&def)))
        }
        DeformCmd::Certify(args) => {
            let rs = root_system(&args.root_type)?;
            let i = deformation_ideal(&rs, &args)?;
            match shi_pipeline_certificate(&rs, args.k, &i) {
                Ok((def, cert)) => Ok(Output::ok(json!({ "valid": true, "deformation": deformation_json(&def), "certificate": cert }))),
                Err(DeformationError::Mat(e)) => certificate_output(Err(e)),
                Err(e @ DeformationError::ExponentMismatch { .. }) => {
                    Ok(Output::verdict(json!({ "valid": false, "reason": e.to_string() }), false))
                }
                Err(e) => Err(e.into()),
            }
        }
        DeformCmd::Witnesses(args) => {
            let rs = root_system(&args.root_type)?;
            let i = deformation_ideal(&rs, &args)?;
            let (def, cert) = shi_pipeline_certificate(&rs, args.k, &i)?;
            let w = shi_witnesses(&def, &cert, ctx.opts)?;
            let r = shi_accuracy_report(&rs, args.k, &i, ctx.opts)?;
            let mut out = report_output(&r, &cert.exponents);
            out.value["witnesses"] = Value::Array(w.iter().map(|(d, w)| witness_json(*d, w)).collect());
            Ok(out)
        }
    }
}

fn load_graph(input: &GraphInput) -> Result<Graph> {
    match (&input.file, input.fixture) {
        (Some(p), _) => read_graph(p),
        (None, Some(f)) => Ok(fixture(f)),
        (None, None) => bail!("give --file or --fixture"),
    }
}

fn run_graph(ctx: &Ctx, cmd: GraphCmd) -> Result<Output> {
    match cmd {
        GraphCmd::Build(input) => {
            let g = load_graph(&input)?;
            let a = freearr::graphic::graphic_arrangement(&g);
            Ok(Output::ok(json!({
                "graph": g,
                "chordal": perfect_elimination_order(&g).is_some(),
                "exponents": graph_exponents(&g),
                "arrangement": ArrangementFile::from_arrangement(&a),
            })))
        }
        GraphCmd::Accuracy(input) => {
            let g = load_graph(&input)?;
            let a = freearr::graphic::graphic_arrangement(&g);
            accuracy_check(ctx, &a, None, graph_exponents(&g), None, Mode::Exact, Strategy::Exhaustive)
        }
        GraphCmd::Chromatic { input, edge_cap } => {
            let g = load_graph(&input)?;
            let p = chromatic_polynomial(&g, edge_cap)?;
            Ok(Output::ok(json!({ "chromatic": poly(&p), "roots": split_roots(&p) })))
        }
        GraphCmd::Fixture { which } => Ok(Output::ok(to_value(&fixture(which)))),
    }
}

fn run_inter(ctx: &Ctx, cmd: InterCmd) -> Result<Output> {
    match cmd {
        InterCmd::Check { l, r, k, symbolic: _, bruteforce, both } => {
            let label = Label::new(l, r, k)?;
            let sym = symbolic_accuracy(label);
            let mut v = json!({
                "label": label.to_string(),
                "exponents": label.exponents(),
                "hyperplanes": label.hyperplane_count(),
                "closed_form": closed_form_accuracy(label),
            });
            let mut accurate = sym;
            if !bruteforce {
                let by_d: Vec<Value> = symbolic_accuracy_by_dimension(label)
                    .into_iter()
                    .map(|(d, ok)| json!({ "d": d, "witness": ok }))
                    .collect();
                v["symbolic"] = json!({ "accurate": sym, "dimensions": by_d });
            }
            if bruteforce || both {
                let report = bruteforce_accuracy(label, ctx.opts)?;
                accurate = report.is_accurate();
                v["bruteforce"] = to_value(&ReportJson::new(&report));
                if both && accurate != sym {
                    bail!("symbolic and brute-force verdicts disagree for {label}");
                }
            }
            v["accurate"] = json!(accurate);
            Ok(Output::verdict(v, accurate))
        }
        InterCmd::LocalizationFixture { l, r } => {
            let rep = localization_fixture_check(l, r, ctx.opts)?;
            let ok = rep.localization_matches && rep.arrangement_accurate && !rep.localization_accurate;
            Ok(Output::verdict(to_value(&rep), ok))
        }
    }
}

/// The cap error behind `e`, if a cap stopped the computation.
fn cap_error(e: &anyhow::Error) -> Option<String> {
    let lattice = |l: &LatticeError| Some(l.to_string());
    let mat = |m: &MatError| match m {
        MatError::Lattice(l) => lattice(l),
        MatError::NodeCapExceeded(_) => Some(m.to_string()),
        _ => None,
    };
    if let Some(l) = e.downcast_ref::<LatticeError>() {
        return lattice(l);
    }
    if let Some(m) = e.downcast_ref::<MatError>() {
        return mat(m);
    }
    if let Some(DeformationError::Mat(m)) = e.downcast_ref::<DeformationError>() {
        return mat(m);
    }
    match e.downcast_ref::<IntermediateError>() {
        Some(IntermediateError::Lattice(l)) => return lattice(l),
        Some(b @ IntermediateError::BeyondCaps { .. }) => return Some(b.to_string()),
        _ => {}
    }
    match e.downcast_ref::<GraphError>() {
        Some(g @ GraphError::CapExceeded { .. }) => Some(g.to_string()),
        _ => None,
    }
}

fn run(cli: Cli) -> Result<Output> {
    let ctx = Ctx { opts: LatticeOptions { max_rank: cli.max_rank, max_flats: cli.max_flats } };
    match cli.command {
        Command::Arr(c) => run_arr(&ctx, c),
        Command::Weyl(c) => run_weyl(c),
        Command::Ideal(c) => run_ideal(c),
        Command::Mat(c) => run_mat(&ctx, c),
        Command::Accuracy(c) => run_accuracy(&ctx, c),
        Command::Deform(c) => run_deform(&ctx, c),
        Command::Graph(c) => run_graph(&ctx, c),
        Command::Inter(c) => run_inter(&ctx, c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = match run(cli) {
        Ok(o) => o,
        Err(e) => match cap_error(&e) {
            Some(msg) => Output { value: json!({ "cap_error": msg }), status: Status::Capped },
            None => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
    };
    println!("{}", serde_json::to_string_pretty(&out.value).expect("serializable"));
    ExitCode::from(match out.status {
        Status::Ok => 0,
        Status::Negative => 1,
        Status::Capped => 3,
    })
}
