//! Command dispatch for the `subhyp` binary. All commands emit a JSON report
//! (stdout or `--out`), optionally CSV tables and SVG figures, and encode
//! verdicts in their exit status: 0 positive, 1 negative, 2 inconclusive.
//! Usage errors exit 64, domain file errors 65, numeric failures 70.

use crate::certify::{self, CertifyParams};
use crate::chains;
use crate::error::Error;
use crate::geometry::{Norm, PlanarDomain, Point};
use crate::metric::{self, GeoParams};
use crate::report::{render_json, Report, Svg};
use crate::selfimprove::{self, DecomposeParams};
use crate::sharpmax::{self, dyadic_radii, ScalarField};
use crate::{catalog, pool};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DOMAIN: i32 = 65;
pub const EXIT_NUMERIC: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "subhyp", version, about = "Subhyperbolic metrics and Sobolev extension criteria on planar domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CommonArgs {
    /// domain file path or catalog:NAME
    #[arg(long)]
    pub domain: String,
    /// RNG seed for sampling commands
    #[arg(long, default_value_t = 17)]
    pub seed: u64,
    /// write the JSON report here instead of stdout
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weighted shortest path between two points
    Geodesic {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Estimate the subhyperbolicity constant and classify boundedness
    Certify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 120)]
        budget: usize,
        #[arg(long)]
        h: Option<f64>,
        /// per-scale ratio table
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sobolev extension verdict through the exponent map
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 120)]
        budget: usize,
        #[arg(long)]
        h: Option<f64>,
    },
    /// Classify a grid of exponents, bracketing the critical one
    ScanAlpha {
        #[command(flatten)]
        common: CommonArgs,
        /// grid as lo:hi:step
        #[arg(long)]
        alphas: String,
        #[arg(long, default_value_t = 80)]
        budget: usize,
        #[arg(long)]
        h: Option<f64>,
    },
    /// Cantor decomposition of a near-geodesic and its exponent record
    Selfimprove {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
        #[arg(long)]
        eps: f64,
        /// working constant; estimated when omitted
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Cube chain along a near-geodesic
    Chain {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
        #[arg(long, default_value_t = 1e-2)]
        slack: f64,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Sharp maximal function of an analytic test function
    Sharpmax {
        #[command(flatten)]
        common: CommonArgs,
        /// expression over x and y, e.g. "x^2*y + sin(3*x)*cos(2*y)"
        #[arg(long)]
        function: String,
        #[arg(long)]
        k: u32,
        /// integrability exponent for the norms ("inf" for the sup norm)
        #[arg(long, default_value = "1")]
        q: String,
        #[arg(long)]
        h: Option<f64>,
        /// radius set as dyadic:jmin:jmax
        #[arg(long, default_value = "dyadic:1:5")]
        radii: String,
        /// cell dump of the sharp field
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Extension criterion: L_q norms of f and its sharp maximal function
    ExtendCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        function: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, default_value = "dyadic:1:5")]
        radii: String,
    },
    /// List or materialize the built-in domain catalog
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    List,
    Emit {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn parse_point(s: &str) -> Result<Point, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected x,y but got '{s}'"));
    }
    let x: f64 = parts[0].trim().parse().map_err(|_| format!("bad x coordinate '{}'", parts[0]))?;
    let y: f64 = parts[1].trim().parse().map_err(|_| format!("bad y coordinate '{}'", parts[1]))?;
    Ok(Point::new(x, y))
}

fn parse_alphas(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidParameter(format!("alphas must be lo:hi:step, got '{s}'")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| Error::InvalidParameter("bad alphas lo".into()))?;
    let hi: f64 = parts[1].parse().map_err(|_| Error::InvalidParameter("bad alphas hi".into()))?;
    let step: f64 =
        parts[2].parse().map_err(|_| Error::InvalidParameter("bad alphas step".into()))?;
    if !(step > 0.0) || hi < lo {
        return Err(Error::InvalidParameter("alphas range must ascend".into()));
    }
    let mut out = Vec::new();
    let mut a = lo;
    while a <= hi + 1e-12 {
        out.push((a * 1e12).round() / 1e12);
        a += step;
    }
    Ok(out)
}

fn parse_radii(s: &str, h: f64) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 || parts[0] != "dyadic" {
        return Err(Error::InvalidParameter(format!("radii must be dyadic:jmin:jmax, got '{s}'")));
    }
    let jmin: i32 =
        parts[1].parse().map_err(|_| Error::InvalidParameter("bad radii jmin".into()))?;
    let jmax: i32 =
        parts[2].parse().map_err(|_| Error::InvalidParameter("bad radii jmax".into()))?;
    if jmax < jmin {
        return Err(Error::InvalidParameter("radii jmax must be at least jmin".into()));
    }
    Ok(dyadic_radii(h, jmin, jmax))
}

fn parse_q(s: &str) -> Result<f64, Error> {
    if s == "inf" || s == "INF" {
        return Ok(f64::INFINITY);
    }
    s.parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad q '{s}'")))
}

fn load_domain(spec: &str) -> Result<PlanarDomain, Error> {
    if let Some(name) = spec.strip_prefix("catalog:") {
        return catalog::get(name);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::InvalidDomain(format!("cannot read '{spec}': {e}")))?;
    let file: crate::geometry::DomainFile = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidDomain(format!("cannot parse '{spec}': {e}")))?;
    PlanarDomain::from_file(file)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) | Error::BadExponent(_) => EXIT_USAGE,
        Error::InvalidDomain(_) => EXIT_DOMAIN,
        _ => EXIT_NUMERIC,
    }
}

#[derive(Serialize)]
struct ErrorReport {
    command: String,
    error: String,
    message: String,
}

fn write_artifact(path: &PathBuf, content: &str) -> Result<(), Error> {
    std::fs::write(path, content)
        .map_err(|e| Error::InvalidParameter(format!("cannot write {path:?}: {e}")))
}

struct Ctx {
    json: String,
    code: i32,
}

/// Execute a parsed command; returns (exit code, JSON report).
pub fn run(command: &Command) -> (i32, String) {
    let name = command_name(command);
    match dispatch(command) {
        Ok(ctx) => (ctx.code, ctx.json),
        Err(err) => {
            let rep = ErrorReport {
                command: name.to_string(),
                error: err.name().to_string(),
                message: err.to_string(),
            };
            (exit_code_for(&err), render_json(&rep))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Geodesic { .. } => "geodesic",
        Command::Certify { .. } => "certify",
        Command::Classify { .. } => "classify",
        Command::ScanAlpha { .. } => "scan-alpha",
        Command::Selfimprove { .. } => "selfimprove",
        Command::Chain { .. } => "chain",
        Command::Sharpmax { .. } => "sharpmax",
        Command::ExtendCheck { .. } => "extend-check",
        Command::Catalog { .. } => "catalog",
    }
}

fn dispatch(command: &Command) -> Result<Ctx, Error> {
    match command {
        Command::Geodesic { common, alpha, from, to, h, tol, svg } => {
            let domain = load_domain(&common.domain)?;
            let h = h.unwrap_or(domain.diam(Norm::Euclidean) / 64.0);
            let res = metric::subhyp_distance(&domain, *alpha, *from, *to, h, *tol)?;
            if let Some(path) = svg {
                let mut canvas = Svg::new(&domain);
                canvas.domain(&domain);
                canvas.curve(&res.curve, "#c0392b");
                canvas.dot(*from, "#1a1a1a");
                canvas.dot(*to, "#1a1a1a");
                write_artifact(path, &canvas.finish())?;
            }
            #[derive(Serialize)]
            struct Config {
                domain: String,
                alpha: f64,
                from: Point,
                to: Point,
                h: f64,
                tol: f64,
            }
            #[derive(Serialize)]
            struct Out {
                value: f64,
                gap: f64,
                curve: Vec<[f64; 2]>,
            }
            let result = Out {
                value: res.value,
                gap: res.gap,
                curve: res.curve.vertices().iter().map(|p| [p.x, p.y]).collect(),
            };
            let json = render_json(&Report {
                command: "geodesic".into(),
                statement: "subhyperbolic-distance".into(),
                seed: common.seed,
                resolutions: vec![res.h],
                config: Config {
                    domain: common.domain.clone(),
                    alpha: *alpha,
                    from: *from,
                    to: *to,
                    h,
                    tol: *tol,
                },
                result,
            });
            Ok(Ctx { json, code: 0 })
        }
        Command::Certify { common, alpha, theta, budget, h, csv } => {
            let domain = load_domain(&common.domain)?;
            let mut params = CertifyParams::new(&domain, *alpha);
            params.seed = common.seed;
            params.budget = *budget;
            params.workers = pool::default_workers();
            if let Some(t) = theta {
                params.theta = *t;
            }
            if let Some(h) = h {
                params.h = *h;
            }
            let cert = certify::estimate_constant(&domain, &params)?;
            if let Some(path) = csv {
                let mut table = String::from("scale,pairs,max_ratio,mean_ratio\n");
                for row in &cert.per_scale {
                    table.push_str(&format!(
                        "{},{},{},{}\n",
                        row.scale, row.pairs, row.max_ratio, row.mean_ratio
                    ));
                }
                write_artifact(path, &table)?;
            }
            let code = cert.verdict.exit_code();
            let json = render_json(&Report {
                command: "certify".into(),
                statement: "alpha-subhyperbolic-certificate".into(),
                seed: common.seed,
                resolutions: vec![params.h],
                config: params,
                result: cert,
            });
            Ok(Ctx { json, code })
        }
        Command::Classify { common, p, n, budget, h } => {
            let domain = load_domain(&common.domain)?;
            let alpha = certify::alpha_from_p(*p, *n)?;
            let mut params = CertifyParams::new(&domain, alpha);
            params.seed = common.seed;
            params.budget = *budget;
            if let Some(h) = h {
                params.h = *h;
            }
            let report = certify::classify_extension(&domain, *p, *n, &params)?;
            let code = report.verdict.exit_code();
            let json = render_json(&Report {
                command: "classify".into(),
                statement: "sobolev-extension-criterion".into(),
                seed: common.seed,
                resolutions: vec![params.h],
                config: params,
                result: report,
            });
            Ok(Ctx { json, code })
        }
        Command::ScanAlpha { common, alphas, budget, h } => {
            let domain = load_domain(&common.domain)?;
            let grid = parse_alphas(alphas)?;
            let mut params = CertifyParams::new(&domain, grid[0]);
            params.seed = common.seed;
            params.budget = *budget;
            if let Some(h) = h {
                params.h = *h;
            }
            let scan = certify::scan_alpha(&domain, &grid, &params)?;
            let json = render_json(&Report {
                command: "scan-alpha".into(),
                statement: "critical-exponent-scan".into(),
                seed: common.seed,
                resolutions: vec![params.h],
                config: params,
                result: scan,
            });
            Ok(Ctx { json, code: 0 })
        }
        Command::Selfimprove { common, alpha, from, to, eps, c, h, svg } => {
            let domain = load_domain(&common.domain)?;
            let h = h.unwrap_or(domain.diam(Norm::Euclidean) / 64.0);
            let c = match c {
                Some(c) => *c,
                None => {
                    let mut params = CertifyParams::new(&domain, *alpha);
                    params.seed = common.seed;
                    params.budget = 40;
                    params.hillclimb_rounds = 5;
                    certify::estimate_constant(&domain, &params)?.c_est.max(1.0)
                }
            };
            let dec_params = DecomposeParams::new(h);
            let dec = selfimprove::cantor_decompose(&domain, *alpha, c, *from, *to, *eps, &dec_params)?;
            let verify = selfimprove::verify_decomposition(&domain, &dec, None, *eps);
            if let Some(path) = svg {
                let mut canvas = Svg::new(&domain);
                canvas.domain(&domain);
                canvas.curve(&dec.curve, "#9aa7c7");
                let spans: Vec<(f64, f64)> =
                    dec.selection.selected.iter().map(|s| (s.t_lo, s.t_hi)).collect();
                canvas.curve_segments(&dec.curve, &spans, "#c0392b");
                write_artifact(path, &canvas.finish())?;
            }
            #[derive(Serialize)]
            struct Config {
                domain: String,
                alpha: f64,
                from: Point,
                to: Point,
                eps: f64,
                c: f64,
                h: f64,
            }
            #[derive(Serialize)]
            struct Out<'a> {
                record: &'a selfimprove::ExponentRecord,
                k_materialized: u32,
                intervals: Vec<[u64; 2]>,
                verification: &'a selfimprove::VerifyReport,
            }
            let intervals: Vec<[u64; 2]> = dec
                .selection
                .selected
                .iter()
                .map(|s| [s.level as u64, s.index])
                .collect();
            let json = render_json(&Report {
                command: "selfimprove".into(),
                statement: "cantor-self-improvement".into(),
                seed: common.seed,
                resolutions: vec![h],
                config: Config {
                    domain: common.domain.clone(),
                    alpha: *alpha,
                    from: *from,
                    to: *to,
                    eps: *eps,
                    c,
                    h,
                },
                result: Out {
                    record: &dec.record,
                    k_materialized: dec.k_materialized,
                    intervals,
                    verification: &verify,
                },
            });
            Ok(Ctx { json, code: 0 })
        }
        Command::Chain { common, alpha, from, to, slack, h, svg } => {
            let domain = load_domain(&common.domain)?;
            let h = h.unwrap_or(domain.diam(Norm::Euclidean) / 64.0);
            let gp = GeoParams::new(*alpha, h);
            let curve = metric::near_geodesic(&domain, *alpha, *from, *to, *slack, &gp)?;
            let chain = chains::build_chain(&domain, &curve)?;
            let verify = chains::verify_chain(&domain, &chain, &curve);
            if let Some(path) = svg {
                let mut canvas = Svg::new(&domain);
                canvas.domain(&domain);
                for q in &chain.cubes {
                    canvas.cube(&q.dilate(2.0), "#b7c3e0", 0.8);
                }
                for q in &chain.cubes {
                    canvas.cube(q, "#2980b9", 1.2);
                }
                canvas.curve(&curve, "#c0392b");
                write_artifact(path, &canvas.finish())?;
            }
            #[derive(Serialize)]
            struct Config {
                domain: String,
                alpha: f64,
                from: Point,
                to: Point,
                slack: f64,
                h: f64,
            }
            #[derive(Serialize)]
            struct Out<'a> {
                chain: &'a chains::CubeChain,
                verification: &'a chains::ChainReport,
            }
            let json = render_json(&Report {
                command: "chain".into(),
                statement: "cube-chain".into(),
                seed: common.seed,
                resolutions: vec![h],
                config: Config {
                    domain: common.domain.clone(),
                    alpha: *alpha,
                    from: *from,
                    to: *to,
                    slack: *slack,
                    h,
                },
                result: Out { chain: &chain, verification: &verify },
            });
            Ok(Ctx { json, code: 0 })
        }
        Command::Sharpmax { common, function, k, q, h, radii, csv } => {
            let domain = load_domain(&common.domain)?;
            let h = h.unwrap_or(domain.diam(Norm::Euclidean) / 64.0);
            let q = parse_q(q)?;
            let source = sharpmax::parse_function(function)?;
            let field = ScalarField::from_function(&domain, h, source)?;
            let radii = parse_radii(radii, h)?;
            let sharp = sharpmax::sharp_maximal(&field, *k, &radii)?;
            if let Some(path) = csv {
                let mut table = String::from("x,y,sharp\n");
                for (i, j) in sharp.values.inside_cells() {
                    let c = sharp.values.cell_center(i, j);
                    table.push_str(&format!("{},{},{}\n", c.x, c.y, sharp.values.value(i, j)));
                }
                write_artifact(path, &table)?;
            }
            #[derive(Serialize)]
            struct Config {
                domain: String,
                function: String,
                k: u32,
                q: f64,
                h: f64,
                radii: Vec<f64>,
            }
            #[derive(Serialize)]
            struct Out {
                sharp_lq_norm: f64,
                sharp_max: f64,
                f_lq_norm: f64,
                cells: usize,
            }
            let q_norm = if q.is_infinite() { 1.0 } else { q };
            let sharp_max = sharp
                .values
                .inside_cells()
                .map(|(i, j)| sharp.values.value(i, j))
                .fold(0.0f64, f64::max);
            let result = Out {
                sharp_lq_norm: sharp.values.lq_norm(q_norm),
                sharp_max,
                f_lq_norm: field.lq_norm(q_norm),
                cells: field.inside_cells().count(),
            };
            let json = render_json(&Report {
                command: "sharpmax".into(),
                statement: "sharp-maximal-function".into(),
                seed: common.seed,
                resolutions: vec![h],
                config: Config {
                    domain: common.domain.clone(),
                    function: function.clone(),
                    k: *k,
                    q,
                    h,
                    radii,
                },
                result,
            });
            Ok(Ctx { json, code: 0 })
        }
        Command::ExtendCheck { common, function, k, q, h, radii } => {
            let domain = load_domain(&common.domain)?;
            let h = h.unwrap_or(domain.diam(Norm::Euclidean) / 48.0);
            let source = sharpmax::parse_function(function)?;
            let field = ScalarField::from_function(&domain, h, source.clone())?;
            let fine = ScalarField::from_function(&domain, h / 2.0, source)?;
            let radii = parse_radii(radii, h)?;
            let report = sharpmax::extension_criterion(&field, Some(&fine), &domain, *k, *q, &radii)?;
            let code = match report.verdict {
                sharpmax::ExtendVerdict::Extendable => 0,
                sharpmax::ExtendVerdict::NotExtendable => 1,
            };
            #[derive(Serialize)]
            struct Config {
                domain: String,
                function: String,
                k: u32,
                q: f64,
                h: f64,
                radii: Vec<f64>,
            }
            let json = render_json(&Report {
                command: "extend-check".into(),
                statement: "sharp-maximal-extension-criterion".into(),
                seed: common.seed,
                resolutions: vec![h, h / 2.0],
                config: Config {
                    domain: common.domain.clone(),
                    function: function.clone(),
                    k: *k,
                    q: *q,
                    h,
                    radii,
                },
                result: report,
            });
            Ok(Ctx { json, code })
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                #[derive(Serialize)]
                struct Out {
                    names: Vec<String>,
                }
                let json = render_json(&Report {
                    command: "catalog".into(),
                    statement: "domain-catalog".into(),
                    seed: 0,
                    resolutions: vec![],
                    config: "list",
                    result: Out {
                        names: catalog::NAMES.iter().map(|s| s.to_string()).collect(),
                    },
                });
                Ok(Ctx { json, code: 0 })
            }
            CatalogAction::Emit { name, out } => {
                let content = catalog::emit(name)?;
                if let Some(path) = out {
                    write_artifact(path, &content)?;
                    #[derive(Serialize)]
                    struct Out {
                        written: String,
                    }
                    let json = render_json(&Report {
                        command: "catalog".into(),
                        statement: "domain-catalog".into(),
                        seed: 0,
                        resolutions: vec![],
                        config: name.clone(),
                        result: Out { written: path.display().to_string() },
                    });
                    Ok(Ctx { json, code: 0 })
                } else {
                    Ok(Ctx { json: content, code: 0 })
                }
            }
        },
    }
}

/// Entry point used by the binary: parse, run, write the report.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with successful exit
            if e.use_stderr() {
                eprint!("{e}");
                return EXIT_USAGE;
            }
            print!("{e}");
            return 0;
        }
    };
    let (code, json) = run(&cli.command);
    let out = match &cli.command {
        Command::Geodesic { common, .. }
        | Command::Certify { common, .. }
        | Command::Classify { common, .. }
        | Command::ScanAlpha { common, .. }
        | Command::Selfimprove { common, .. }
        | Command::Chain { common, .. }
        | Command::Sharpmax { common, .. }
        | Command::ExtendCheck { common, .. } => common.out.clone(),
        Command::Catalog { .. } => None,
    };
    match out {
        Some(path) => {
            if std::fs::write(&path, &json).is_err() {
                eprintln!("cannot write report to {}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{json}"),
    }
    code
}
