//! `hnpoly` command-line driver: JSON in, JSON out.
//!
//! Every successful result is wrapped as `{"schema": "hnpoly/1", "result": ..}`;
//! domain errors as `{"schema": "hnpoly/1", "error": code, "detail": ..}`.

pub mod svg;

use std::fs;
use std::io::{Read, Write};

use clap::{Parser, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use hnpoly_core::polygon::point_pair;
use hnpoly_core::{
    admissible_check, chain_check, concave_envelope, decompose, detect_hn, enumerate_b_with, hn_passes_contacts,
    hodge_from_mu_at_p, hom_vanishes, is_basic, mu_average, mu_max_min, rz_dimension, strata_report_with,
    validate_mu, CaseData, CaseKind, ConcavePolygon, DualMode, EnumerationConfig, Error, FIsocrystal,
    FilteredInvariant, GroupDatum, MuData, NewtonPoint, OmegaDivisors, Point, Rat, SubobjectCloud,
    TorsionTower,
};

use svg::{render_svg, Style, SvgRender};

pub const SCHEMA: &str = "hnpoly/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Polygon,
    Newton,
    Mu,
    Bgmu,
    Strata,
    Ffgs,
    Tower,
    Hn,
}

#[derive(Debug, Parser)]
#[command(name = "hnpoly", version, about = "Exact Newton, Hodge and Harder-Narasimhan polygon tools")]
pub struct Args {
    pub verb: Verb,
    /// Operation; `bgmu`, `strata` and `tower` have a default.
    pub subverb: Option<String>,
    /// Input JSON file, `-` for stdin (the default).
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<String>,
    /// Output file, `-` for stdout (the default).
    #[arg(long = "out", value_name = "PATH")]
    pub output: Option<String>,
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    /// `p0,q0;p1,q1;...`
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long, value_name = "N")]
    pub max_denominator: Option<u64>,
    /// Also write an SVG drawing of the polygons involved.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain { code: String, detail: String },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Domain { code: e.code().to_string(), detail: e.to_string() }
    }
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure::Domain { code: "InvalidInput".into(), detail: e.to_string() }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

type Outcome = Result<(Value, Option<SvgRender>), Failure>;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

fn pair(p: &Point) -> Value {
    point_pair::serialize(p, serde_json::value::Serializer).expect("serializable point")
}

fn pairs(ps: &[Point]) -> Value {
    Value::Array(ps.iter().map(pair).collect())
}

struct Ctx<'a> {
    args: &'a Args,
    stdin: &'a mut dyn Read,
    doc: Option<Value>,
}

impl Ctx<'_> {
    fn doc(&mut self) -> Result<&Value, Failure> {
        if self.doc.is_none() {
            let text = match self.args.input.as_deref() {
                None | Some("-") => {
                    let mut s = String::new();
                    self.stdin.read_to_string(&mut s).map_err(input_error)?;
                    s
                }
                Some(path) => fs::read_to_string(path).map_err(|e| Failure::Domain {
                    code: "InputUnreadable".into(),
                    detail: format!("{path}: {e}"),
                })?,
            };
            let mut v: Value = serde_json::from_str(&text).map_err(input_error)?;
            if let Value::Object(map) = &mut v {
                if let Some(s) = map.remove("schema") {
                    if s != SCHEMA {
                        return Err(Failure::Domain {
                            code: "SchemaMismatch".into(),
                            detail: format!("expected schema {SCHEMA:?}, found {s}"),
                        });
                    }
                    // Output of a previous invocation: take its payload.
                    if map.len() == 1 {
                        if let Some(inner) = map.remove("result") {
                            v = inner;
                        }
                    }
                }
            }
            self.doc = Some(v);
        }
        Ok(self.doc.as_ref().expect("loaded"))
    }

    fn whole<T: DeserializeOwned>(&mut self) -> Result<T, Failure> {
        T::deserialize(self.doc()?).map_err(input_error)
    }

    fn field<T: DeserializeOwned>(&mut self, key: &str) -> Result<T, Failure> {
        let v = self
            .doc()?
            .get(key)
            .ok_or_else(|| input_error(format!("missing field {key:?}")))?;
        T::deserialize(v).map_err(|e| input_error(format!("field {key:?}: {e}")))
    }

    fn opt_field<T: DeserializeOwned>(&mut self, key: &str) -> Result<Option<T>, Failure> {
        match self.doc()?.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => T::deserialize(v).map(Some).map_err(|e| input_error(format!("field {key:?}: {e}"))),
        }
    }

    /// Either the whole document or its `key` member, when present.
    fn nested<T: DeserializeOwned>(&mut self, key: &str) -> Result<T, Failure> {
        if self.doc()?.get(key).is_some() {
            self.field(key)
        } else {
            self.whole()
        }
    }

    /// The group datum from flags when `--case` is given, else from the input.
    fn datum(&mut self) -> Result<GroupDatum, Failure> {
        let a = self.args;
        match &a.case {
            Some(c) => {
                let case: CaseKind = c.parse().map_err(|_| usage(format!("unknown case {c:?}")))?;
                let n = a.n.ok_or_else(|| usage("--n is required with --case"))?;
                let mu = a.mu.as_deref().ok_or_else(|| usage("--mu is required with --case"))?;
                Ok(GroupDatum { case: CaseData::new(case, a.d.unwrap_or(1), n), mu: MuData::parse(mu)? })
            }
            None => {
                if a.d.is_some() || a.n.is_some() || a.mu.is_some() {
                    return Err(usage("--d, --n and --mu need --case"));
                }
                self.whole()
            }
        }
    }

    fn config(&self) -> EnumerationConfig {
        EnumerationConfig { max_denominator: self.args.max_denominator, ..EnumerationConfig::default() }
    }
}

#[derive(Deserialize)]
struct Decomposable {
    invariant: FilteredInvariant,
    x: Option<Point>,
    xhat: Option<Point>,
}

fn polygon_cmd(ctx: &mut Ctx, sub: &str) -> Outcome {
    let one = Rat::one();
    let single = |p: &ConcavePolygon, label: &str| SvgRender::default().layer(p.clone(), label, Style::Solid);
    match sub {
        "from-slopes" => {
            let raw: Vec<(Rat, Rat)> = ctx.field("slopes")?;
            let p = ConcavePolygon::from_slopes(raw)?;
            let svg = single(&p, "polygon");
            Ok((to_value(&p), Some(svg)))
        }
        "evaluate" => {
            let p: ConcavePolygon = ctx.field("polygon")?;
            let x: Rat = ctx.field("x")?;
            Ok((to_value(&p.evaluate(&x)?), Some(single(&p, "polygon"))))
        }
        "leq" => {
            let p: ConcavePolygon = ctx.field("p")?;
            let q: ConcavePolygon = ctx.field("q")?;
            let svg = SvgRender::default().layer(p.clone(), "p", Style::Solid).layer(q.clone(), "q", Style::Dashed);
            Ok((json!(p.leq(&q)), Some(svg)))
        }
        "break-points" => {
            let p: ConcavePolygon = ctx.nested("polygon")?;
            Ok((pairs(&p.break_points()), Some(single(&p, "polygon"))))
        }
        "contact-break-points" => {
            let lower: ConcavePolygon = ctx.field("lower")?;
            let upper: ConcavePolygon = ctx.field("upper")?;
            let contacts = lower.contact_break_points(&upper)?;
            let mut svg = SvgRender::default()
                .layer(upper.clone(), "upper", Style::Dashed)
                .layer(lower.clone(), "lower", Style::Solid);
            for c in &contacts {
                svg = svg.mark(c.clone(), "x");
            }
            Ok((pairs(&contacts), Some(svg)))
        }
        "normalize" => {
            let p: ConcavePolygon = ctx.field("polygon")?;
            let d: u64 = ctx.field("d")?;
            if d == 0 {
                return Err(Error::NonPositiveWidth(Rat::zero()).into());
            }
            let q = p.normalize(d);
            Ok((to_value(&q), Some(single(&q, "normalized"))))
        }
        "average" => {
            let ps: Vec<ConcavePolygon> = ctx.field("polygons")?;
            let avg = ConcavePolygon::average(&ps)?;
            let mut svg = SvgRender::default();
            for (k, p) in ps.iter().enumerate() {
                svg = svg.layer(p.clone(), format!("P{k}"), Style::Dotted);
            }
            Ok((to_value(&avg), Some(svg.layer(avg.clone(), "average", Style::Solid))))
        }
        "dual" => {
            let p: ConcavePolygon = ctx.nested("polygon")?;
            let c: Rat = ctx.opt_field("c")?.unwrap_or(one);
            let q = p.dual(&c);
            let svg = single(&p, "polygon").layer(q.clone(), "dual", Style::Dashed);
            Ok((to_value(&q), Some(svg)))
        }
        "is-symmetric" => {
            let p: ConcavePolygon = ctx.nested("polygon")?;
            let c: Rat = ctx.opt_field("c")?.unwrap_or(one);
            Ok((json!(p.is_symmetric(&c)), Some(single(&p, "polygon"))))
        }
        "symmetric-point" => {
            let p: ConcavePolygon = ctx.field("polygon")?;
            let x: Point = ctx.field("point")?;
            let xhat = p.symmetric_point(&x)?;
            let svg = single(&p, "polygon").mark(x, "x").mark(xhat.clone(), "x̂");
            Ok((pair(&xhat), Some(svg)))
        }
        "split-at" => {
            let p: ConcavePolygon = ctx.field("polygon")?;
            let x: Point = ctx.field("point")?;
            let (a, b) = p.split_at(&x)?;
            Ok((json!([to_value(&a), to_value(&b)]), Some(single(&p, "polygon").mark(x, "x"))))
        }
        "envelope" => {
            let points: Vec<Point> = ctx.field("points")?;
            let end: Point = ctx.field("end")?;
            let env = concave_envelope(&points, &end)?;
            Ok((to_value(&env), Some(single(&env, "envelope"))))
        }
        other => Err(usage(format!("unknown polygon operation {other:?}"))),
    }
}

fn newton_cmd(ctx: &mut Ctx, sub: &str) -> Outcome {
    let single = |p: &ConcavePolygon, label: &str| SvgRender::default().layer(p.clone(), label, Style::Solid);
    match sub {
        "polygon" => {
            let iso: FIsocrystal = ctx.nested("isocrystal")?;
            let p = iso.slopes().newton_polygon();
            Ok((to_value(&p), Some(single(&p, "Newton"))))
        }
        "normalized" => {
            let iso: FIsocrystal = ctx.nested("isocrystal")?;
            let p = iso.normalized_newton();
            Ok((to_value(&p), Some(single(&p, "Newton"))))
        }
        "t-n" => {
            let iso: FIsocrystal = ctx.nested("isocrystal")?;
            Ok((to_value(&iso.t_n()), None))
        }
        "dual" => {
            let iso: FIsocrystal = ctx.nested("isocrystal")?;
            let mode: DualMode = ctx.opt_field("mode")?.unwrap_or(DualMode::PDual);
            Ok((to_value(&iso.dual(mode)), None))
        }
        "p-divisible" => {
            let iso: FIsocrystal = ctx.nested("isocrystal")?;
            Ok((json!(iso.slopes().p_divisible_check()), None))
        }
        "split" => {
            let iso: FIsocrystal = ctx.field("isocrystal")?;
            let x: Point = ctx.field("x")?;
            let (a, b) = iso.hn_split(&x)?;
            Ok((json!([to_value(&a), to_value(&b)]), Some(single(&iso.normalized_newton(), "Newton").mark(x, "x"))))
        }
        "split3" => {
            let iso: FIsocrystal = ctx.field("isocrystal")?;
            let x: Point = ctx.field("x")?;
            let xhat: Point = ctx.field("xhat")?;
            let (a, b, c) = iso.three_way_split(&x, &xhat)?;
            let svg = single(&iso.normalized_newton(), "Newton").mark(x, "x").mark(xhat, "x̂");
            Ok((json!([to_value(&a), to_value(&b), to_value(&c)]), Some(svg)))
        }
        other => Err(usage(format!("unknown newton operation {other:?}"))),
    }
}

fn mu_cmd(ctx: &mut Ctx, sub: &str) -> Outcome {
    let g = ctx.datum()?;
    match sub {
        "validate" => Ok((to_value(&validate_mu(&g.case, &g.mu)), None)),
        "average" => {
            let p = mu_average(&g.case, &g.mu)?;
            Ok((to_value(&p), Some(SvgRender::default().layer(p.clone(), "μ̄", Style::Dashed))))
        }
        "hodge-at-p" => {
            let p = hodge_from_mu_at_p(&g.case, &g.mu)?;
            Ok((to_value(&p), Some(SvgRender::default().layer(p.clone(), "Hodge of H[p]", Style::Dashed))))
        }
        "dimension" => Ok((to_value(&rz_dimension(&g.case, &g.mu)?), None)),
        other => Err(usage(format!("unknown mu operation {other:?}"))),
    }
}

fn bgmu_cmd(ctx: &mut Ctx, sub: &str) -> Outcome {
    let g = ctx.datum()?;
    let hodge = mu_average(&g.case, &g.mu)?;
    let points = enumerate_b_with(&g.case, &g.mu, &ctx.config())?;
    let mut svg = SvgRender::default().layer(hodge, "μ̄", Style::Dashed);
    for (k, nu) in points.iter().enumerate() {
        svg = svg.layer(nu.poly.clone(), format!("ν{k}"), Style::Solid);
    }
    match sub {
        "enumerate" => Ok((to_value(&points), Some(svg))),
        "basic" => {
            let mut basic: Vec<&NewtonPoint> = Vec::new();
            for nu in &points {
                if is_basic(nu, &points)? {
                    basic.push(nu);
                }
            }
            Ok((to_value(&basic), Some(svg)))
        }
        other => Err(usage(format!("unknown bgmu operation {other:?}"))),
    }
}

fn strata_cmd(ctx: &mut Ctx, sub: &str) -> Outcome {
    if sub != "report" {
        return Err(usage(format!("unknown strata operation {sub:?}")));
    }
    let g = ctx.datum()?;
    let hodge = mu_average(&g.case, &g.mu)?;
    let report = strata_report_with(&g.case, &g.mu, &ctx.config())?;
    let mut svg = SvgRender::default().layer(hodge, "μ̄", Style::Dashed);
    for (k, s) in report.strata.iter().enumerate() {
        svg = svg.layer(s.newton.poly.clone(), format!("ν{k}"), Style::Solid);
        for c in &s.contact_break_points {
            svg = svg.mark(c.clone(), format!("x (ν{k})"));
        }
    }
    Ok((to_value(&report), Some(svg)))
}

fn ffgs_cmd(ctx: &mut Ctx, sub: &str) -> Outcome {
    let single = |p: &ConcavePolygon, label: &str| SvgRender::default().layer(p.clone(), label, Style::Solid);
    match sub {
        "hn" => {
            let c: SubobjectCloud = ctx.nested("cloud")?;
            let p = c.hn_polygon();
            Ok((to_value(&p), Some(single(&p, "HN"))))
        }
        "normalized-hn" => {
            let c: SubobjectCloud = ctx.field("cloud")?;
            let d: u64 = ctx.field("d")?;
            let p = c.normalized_hn(d)?;
            Ok((to_value(&p), Some(single(&p, "HN"))))
        }
        "semistable" => {
            let c: SubobjectCloud = ctx.nested("cloud")?;
            Ok((json!(c.is_semistable()), None))
        }
        "mu-max-min" => {
            let p: ConcavePolygon = ctx.nested("polygon")?;
            Ok((to_value(&mu_max_min(&p)), None))
        }
        "hom-vanishes" => {
            let g1: ConcavePolygon = ctx.field("g1")?;
            let g2: ConcavePolygon = ctx.field("g2")?;
            Ok((json!(hom_vanishes(&g1, &g2)), None))
        }
        "dual-cloud" => {
            let c: SubobjectCloud = ctx.nested("cloud")?;
            Ok((to_value(&c.dual()), None))
        }
        "fitting-hodge" => {
            let w: OmegaDivisors = ctx.nested("omega")?;
            let p = w.fitting_hodge();
            Ok((to_value(&p), Some(single(&p, "Hodge"))))
        }
        "chain" => {
            let hn: ConcavePolygon = ctx.field("hn")?;
            let newton: ConcavePolygon = ctx.field("newton")?;
            let hodge: ConcavePolygon = ctx.field("hodge")?;
            let verdict = chain_check(&hn, &newton, &hodge);
            let svg = SvgRender::default()
                .layer(hodge, "Hodge", Style::Dashed)
                .layer(newton, "Newton", Style::Solid)
                .layer(hn, "HN", Style::Dotted);
            Ok((to_value(&verdict), Some(svg)))
        }
        other => Err(usage(format!("unknown ffgs operation {other:?}"))),
    }
}

fn tower_cmd(ctx: &mut Ctx, sub: &str) -> Outcome {
    if sub != "limit" {
        return Err(usage(format!("unknown tower operation {sub:?}")));
    }
    let t: TorsionTower = ctx.nested("tower")?;
    let lim = t.limit()?;
    let mut svg = SvgRender::default();
    for (k, q) in t.rescaled_levels()?.into_iter().enumerate() {
        svg = svg.layer(q, format!("Q{}", k + 1), Style::Dotted);
    }
    let svg = svg.layer(lim.limit.clone(), "limit", Style::Solid);
    Ok((to_value(&lim), Some(svg)))
}

fn overlay(inv: &FilteredInvariant) -> SvgRender {
    let mut svg = SvgRender::default()
        .layer(inv.hodge_polygon(), "Hodge", Style::Dashed)
        .layer(inv.newton_polygon(), "Newton", Style::Solid);
    if let Some(h) = inv.hn() {
        svg = svg.layer(h.clone(), "HN", Style::Dotted);
    }
    svg
}

fn decomposition_input(ctx: &mut Ctx) -> Result<(FilteredInvariant, Point, Point), Failure> {
    let (inv, x, xhat) = if ctx.doc()?.get("invariant").is_some() {
        let d: Decomposable = ctx.whole()?;
        (d.invariant, d.x, d.xhat)
    } else {
        (ctx.whole::<FilteredInvariant>()?, None, None)
    };
    match (x, xhat) {
        (Some(x), Some(xhat)) => Ok((inv, x, xhat)),
        (None, None) => {
            let first = detect_hn(&inv)?
                .into_iter()
                .min_by(|a, b| a.x.x.cmp(&b.x.x))
                .ok_or_else(|| Failure::Domain {
                    code: "NoContactPoint".into(),
                    detail: "Newton polygon has no contact break point with the Hodge polygon".into(),
                })?;
            Ok((inv, first.x, first.xhat))
        }
        _ => Err(input_error("give both \"x\" and \"xhat\" or neither")),
    }
}

fn hn_cmd(ctx: &mut Ctx, sub: &str) -> Outcome {
    match sub {
        "t-h" => {
            let inv: FilteredInvariant = ctx.nested("invariant")?;
            Ok((to_value(&inv.t_h()), None))
        }
        "admissible" => {
            let inv: FilteredInvariant = ctx.nested("invariant")?;
            Ok((to_value(&admissible_check(&inv)), Some(overlay(&inv))))
        }
        "detect" => {
            let inv: FilteredInvariant = ctx.nested("invariant")?;
            let found = detect_hn(&inv)?;
            let mut svg = overlay(&inv);
            for c in &found {
                svg = svg.mark(c.x.clone(), "x");
                if c.xhat != c.x {
                    svg = svg.mark(c.xhat.clone(), "x̂");
                }
            }
            Ok((to_value(&found), Some(svg)))
        }
        "decompose" | "verify" => {
            let (inv, x, xhat) = decomposition_input(ctx)?;
            let dec = decompose(&inv, &x, &xhat)?;
            let mut svg = overlay(&inv).mark(x.clone(), "x");
            if xhat != x {
                svg = svg.mark(xhat, "x̂");
            }
            let out = if sub == "decompose" { to_value(&dec) } else { to_value(&dec.verdicts) };
            Ok((out, Some(svg)))
        }
        "passes-contacts" => {
            let hn: ConcavePolygon = ctx.field("hn")?;
            let x: Point = ctx.field("x")?;
            let xhat: Point = ctx.field("xhat")?;
            let svg = SvgRender::default().layer(hn.clone(), "HN", Style::Solid).mark(x.clone(), "x").mark(xhat.clone(), "x̂");
            Ok((json!(hn_passes_contacts(&hn, &x, &xhat)), Some(svg)))
        }
        other => Err(usage(format!("unknown hn operation {other:?}"))),
    }
}

fn dispatch(ctx: &mut Ctx) -> Outcome {
    let default = match ctx.args.verb {
        Verb::Bgmu => Some("enumerate"),
        Verb::Strata => Some("report"),
        Verb::Tower => Some("limit"),
        _ => None,
    };
    let sub = match (ctx.args.subverb.clone(), default) {
        (Some(s), _) => s,
        (None, Some(d)) => d.to_string(),
        (None, None) => return Err(usage("missing operation")),
    };
    match ctx.args.verb {
        Verb::Polygon => polygon_cmd(ctx, &sub),
        Verb::Newton => newton_cmd(ctx, &sub),
        Verb::Mu => mu_cmd(ctx, &sub),
        Verb::Bgmu => bgmu_cmd(ctx, &sub),
        Verb::Strata => strata_cmd(ctx, &sub),
        Verb::Ffgs => ffgs_cmd(ctx, &sub),
        Verb::Tower => tower_cmd(ctx, &sub),
        Verb::Hn => hn_cmd(ctx, &sub),
    }
}

fn envelope(body: Map<String, Value>) -> String {
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA));
    map.extend(body);
    let mut s = serde_json::to_string(&Value::Object(map)).expect("json");
    s.push('\n');
    s
}

fn emit(args: &Args, text: &str, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let written = match args.output.as_deref() {
        None | Some("-") => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
        Some(path) => fs::write(path, text).map_err(|e| format!("{path}: {e}")),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "hnpoly: cannot write output: {e}");
            1
        }
    }
}

/// Runs one invocation; `argv[0]` is the program name. Returns the exit code.
pub fn run<I, S>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    2
                }
            };
            return code;
        }
    };
    let mut ctx = Ctx { args: &args, stdin, doc: None };
    match dispatch(&mut ctx) {
        Ok((value, drawing)) => {
            if let Some(path) = &args.svg {
                let doc = render_svg(&drawing.unwrap_or_default());
                if let Err(e) = fs::write(path, doc) {
                    let _ = writeln!(stderr, "hnpoly: cannot write {path}: {e}");
                    return 1;
                }
            }
            let mut body = Map::new();
            body.insert("result".into(), value);
            emit(&args, &envelope(body), stdout, stderr)
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "hnpoly: {msg}\n\nUsage: hnpoly <VERB> [SUBVERB] [OPTIONS]; see --help");
            2
        }
        Err(Failure::Domain { code, detail }) => {
            let mut body = Map::new();
            body.insert("error".into(), json!(code));
            body.insert("detail".into(), json!(detail));
            let status = emit(&args, &envelope(body), stdout, stderr);
            if status == 0 {
                1
            } else {
                status
            }
        }
    }
}
