//! Subcommand definitions and dispatch.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use maxdist_core::energy::{energy, find_energetic, EnergeticWitness, PointCloud, ETA_REL};
use maxdist_core::geometry::Point;
use maxdist_core::minlab::{
    criterion_check, fixtures, horseshoe, trimmed_tree, CriterionVerdict,
};
use maxdist_core::optimizer::{optimize, OptimizerConfig};
use maxdist_core::sigma::SigmaGraph;
use maxdist_core::steiner::steiner_exact;
use maxdist_core::validator::{validate, ValidatorOptions, Verdict};

use crate::svg::render_svg;

#[derive(Debug, Parser)]
#[command(name = "maxdist", version, about = "Construction, optimization and verification of maximal-distance minimizers in the plane")]
pub struct Cli {
    /// Directory receiving all emitted artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Steiner minimal tree over 2..=6 terminals.
    Steiner {
        /// Point cloud JSON file holding the terminals.
        #[arg(long, conflicts_with = "points")]
        input: Option<PathBuf>,
        /// Inline terminals: "x,y x,y ...".
        #[arg(long)]
        points: Option<String>,
        /// Also emit steiner.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Maximal distance F_M(Σ) of a candidate.
    Energy {
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Finite-M minimality certificate.
    Criterion {
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        r: f64,
    },
    /// Steiner tree of the cloud with terminal edges shortened by r.
    Trim {
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        svg: bool,
    },
    /// Horseshoe candidate for a circular cloud.
    Horseshoe {
        /// Radius R of the circle M.
        #[arg(long = "big-r")]
        big_r: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 5000)]
        samples: usize,
        #[arg(long)]
        svg: bool,
    },
    /// Penalized length descent under the coverage constraint.
    Optimize {
        #[arg(long)]
        cloud: PathBuf,
        /// OptimizerConfig JSON (strict: unknown fields rejected).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Full rule set of necessary minimizer conditions.
    Validate {
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        tol_angle: Option<f64>,
        #[arg(long)]
        rho_iso: Option<f64>,
        /// Ahlfors radii, comma separated.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        svg: bool,
    },
    /// Scene rendering without any verdict.
    Render {
        #[arg(long)]
        cloud: Option<PathBuf>,
        #[arg(long)]
        sigma: Option<PathBuf>,
        /// Draw witness balls of this radius (requires cloud and sigma).
        #[arg(long)]
        r: Option<f64>,
    },
    /// Positive and negative fixture suites.
    Suite,
}

fn read_cloud(path: &Path) -> Result<PointCloud> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(PointCloud::from_json(&text)?)
}

fn read_sigma(path: &Path) -> Result<SigmaGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(SigmaGraph::from_json(&text)?)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value)?)?;
    Ok(path)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

fn parse_inline_points(text: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        let (x, y) = token
            .split_once(',')
            .with_context(|| format!("expected x,y got {token}"))?;
        out.push(Point::new(x.trim().parse()?, y.trim().parse()?));
    }
    Ok(out)
}

/// Dispatches one parsed invocation; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let dir = &cli.out_dir;
    match &cli.command {
        Command::Steiner { input, points, svg } => {
            let terminals: Vec<Point> = match (input, points) {
                (Some(path), None) => {
                    let cloud = read_cloud(path)?;
                    (0..cloud.len()).map(|i| cloud.point(i)).collect()
                }
                (None, Some(text)) => parse_inline_points(text)?,
                _ => bail!("provide exactly one of --input or --points"),
            };
            let tree = steiner_exact(&terminals)?;
            let path = write_json(dir, "steiner.json", &tree)?;
            println!("length {}", tree.length);
            println!("wrote {}", path.display());
            if *svg {
                let g = tree.to_sigma_graph("steiner tree")?;
                let m = PointCloud::finite(&terminals)?;
                let doc = render_svg(Some(&m), Some(&g), &[], None);
                write_text(dir, "steiner.svg", &doc)?;
            }
            Ok(0)
        }
        Command::Energy { cloud, sigma } => {
            let m = read_cloud(cloud)?;
            let g = read_sigma(sigma)?;
            let result = energy(&m, &g)?;
            let path = write_json(dir, "energy.json", &result)?;
            println!("energy {}", result.value);
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Criterion { cloud, sigma, r } => {
            let m = read_cloud(cloud)?;
            let g = read_sigma(sigma)?;
            let report = criterion_check(&m, &g, *r)?;
            let path = write_json(dir, "criterion.json", &report)?;
            println!(
                "verdict {:?} margin {} bound {}",
                report.verdict, report.margin, report.bound
            );
            println!("wrote {}", path.display());
            Ok(if report.verdict == CriterionVerdict::CertifiedMinimizer {
                0
            } else {
                2
            })
        }
        Command::Trim { cloud, r, svg } => {
            let m = read_cloud(cloud)?;
            let g = trimmed_tree(&m, *r)?;
            let path = write_json(dir, "trimmed.json", &g)?;
            println!("length {}", g.total_length());
            println!("wrote {}", path.display());
            if *svg {
                let doc = render_svg(Some(&m), Some(&g), &[], None);
                write_text(dir, "trimmed.svg", &doc)?;
            }
            Ok(0)
        }
        Command::Horseshoe {
            big_r,
            r,
            samples,
            svg,
        } => {
            let (m, g, params) = horseshoe(*big_r, *r, *samples)?;
            write_json(dir, "horseshoe_cloud.json", &m)?;
            write_json(dir, "horseshoe_sigma.json", &g)?;
            let path = write_json(dir, "horseshoe_params.json", &params)?;
            println!(
                "arc sweep {} tangent {} total length {}",
                params.arc_sweep, params.tangent_length, params.total_length
            );
            println!("wrote {}", path.display());
            if *svg {
                let witnesses = find_energetic(&m, &g, *r, ETA_REL * r)?;
                let doc = render_svg(Some(&m), Some(&g), &witnesses, Some(*r));
                write_text(dir, "horseshoe.svg", &doc)?;
            }
            Ok(0)
        }
        Command::Optimize { cloud, config, svg } => {
            let m = read_cloud(cloud)?;
            let text = fs::read_to_string(config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg: OptimizerConfig =
                serde_json::from_str(&text).context("parsing optimizer config")?;
            let trace = optimize(&m, &cfg)?;
            write_json(dir, "final_sigma.json", &trace.final_sigma)?;
            let path = write_json(dir, "trace.json", &trace)?;
            let last = trace.iterations.last().expect("nonempty trace");
            println!(
                "length {} violation {} converged {}",
                last.length, trace.final_violation, trace.converged
            );
            println!("wrote {}", path.display());
            if *svg {
                let doc = filmstrip(&m, &trace.snapshots);
                write_text(dir, "filmstrip.svg", &doc)?;
            }
            Ok(if trace.converged { 0 } else { 2 })
        }
        Command::Validate {
            cloud,
            sigma,
            r,
            tol_angle,
            rho_iso,
            radii,
            svg,
        } => {
            let m = read_cloud(cloud)?;
            let g = read_sigma(sigma)?;
            let mut opts = ValidatorOptions::default();
            if let Some(t) = tol_angle {
                opts.tol_angle = *t;
            }
            opts.rho_iso = *rho_iso;
            opts.radii = radii.clone();
            let report = validate(&m, &g, *r, &opts)?;
            let path = write_json(dir, "validation.json", &report)?;
            for rule in &report.rules {
                println!(
                    "{} {} margin {}",
                    rule.name,
                    if rule.pass { "pass" } else { "FAIL" },
                    rule.margin
                );
            }
            println!("verdict {:?}", report.verdict);
            println!("wrote {}", path.display());
            if *svg {
                let witnesses = find_energetic(&m, &g, *r, ETA_REL * r)?;
                let doc = render_svg(Some(&m), Some(&g), &witnesses, Some(*r));
                write_text(dir, "validation.svg", &doc)?;
            }
            Ok(if report.verdict == Verdict::Pass { 0 } else { 2 })
        }
        Command::Render { cloud, sigma, r } => {
            let m = match cloud {
                Some(path) => Some(read_cloud(path)?),
                None => None,
            };
            let g = match sigma {
                Some(path) => Some(read_sigma(path)?),
                None => None,
            };
            let witnesses: Vec<EnergeticWitness> = match (&m, &g, r) {
                (Some(m), Some(g), Some(r)) => find_energetic(m, g, *r, ETA_REL * r)?,
                _ => Vec::new(),
            };
            let doc = render_svg(m.as_ref(), g.as_ref(), &witnesses, *r);
            let path = write_text(dir, "render.svg", &doc)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Suite => {
            let positives = fixtures::validate_example_suite()?;
            let negatives = fixtures::negative_example_suite()?;
            #[derive(Serialize)]
            struct SuiteEntry {
                name: String,
                verdict: String,
                failing_rules: Vec<String>,
                expected_failure: Option<String>,
                ok: bool,
            }
            let mut entries = Vec::new();
            let mut healthy = true;
            for (name, report) in &positives {
                let ok = report.verdict == Verdict::Pass;
                healthy &= ok;
                entries.push(SuiteEntry {
                    name: name.clone(),
                    verdict: format!("{:?}", report.verdict),
                    failing_rules: report
                        .failing_rules()
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                    expected_failure: None,
                    ok,
                });
            }
            for (name, report, expected) in &negatives {
                let failing: Vec<String> = report
                    .failing_rules()
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                let ok = failing == vec![expected.clone()];
                healthy &= ok;
                entries.push(SuiteEntry {
                    name: name.clone(),
                    verdict: format!("{:?}", report.verdict),
                    failing_rules: failing,
                    expected_failure: Some(expected.clone()),
                    ok,
                });
            }
            for e in &entries {
                println!(
                    "{} {} {}",
                    if e.ok { "ok  " } else { "FAIL" },
                    e.name,
                    e.verdict
                );
            }
            let path = write_json(dir, "suite.json", &entries)?;
            println!("wrote {}", path.display());
            Ok(if healthy { 0 } else { 2 })
        }
    }
}

/// Side-by-side panels of optimizer snapshots over the cloud.
pub fn filmstrip(m: &PointCloud, snapshots: &[SigmaGraph]) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let n = snapshots.len().max(1);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} 100\">\n",
        n * 100
    ));
    for (i, snap) in snapshots.iter().enumerate() {
        let inner = render_svg(Some(m), Some(snap), &[], None);
        // Drop the XML prolog, keep the svg element with panel placement.
        let body = inner
            .lines()
            .skip(1)
            .collect::<Vec<&str>>()
            .join("\n")
            .replacen(
                "<svg xmlns=\"http://www.w3.org/2000/svg\"",
                &format!(
                    "<svg x=\"{}\" y=\"0\" width=\"100\" height=\"100\"",
                    i * 100
                ),
                1,
            );
        out.push_str(&body);
        out.push('\n');
    }
    out.push_str("</svg>\n");
    out
}
