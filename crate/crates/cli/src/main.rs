//! convlab: batch CLI over the pluripotential-theory and series-synthesis
//! library. Every run is a pure function of its inputs and the seed; all
//! randomness flows from `--seed` through counter-based streams.
//!
//! Exit codes: 0 success, 2 INDETERMINATE-dominated verification, 1 errors.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use convlab_core::pluri::{
    bernstein_constant, capacity, extremal_lower, ghull_member, saddulaev_transform,
    transfinite_diameter, CapacityBudget, ExtremalBudget, FeketeBudget, WeightFunction,
};
use convlab_core::region::Region;
use convlab_core::rng::Rng;
use convlab_core::series::{classify, ClassifyConfig, SeriesSpec, VerdictKind};
use convlab_core::synth::{
    synth_block, synth_enumeration, synth_projective, synth_variety, verify, BlockConfig,
    EnumConfig, SynthesisReport, TargetSet, VarietyConfig,
};
use convlab_core::{point_norm, Complex64, Point};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "convlab", about = "Pluripotential quantities and convergence-set synthesis")]
struct Cli {
    /// Master seed; identical configurations reproduce identical outputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory for reports and CSV tables.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Cap on worker threads (also honored from CONVLAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fekete configuration of degree k on a region.
    Fekete {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 400)]
        pool: usize,
        #[arg(long, default_value_t = 4)]
        sweeps: usize,
    },
    /// d_k sequence and extrapolated transfinite diameter.
    Tdiam {
        #[arg(long)]
        region: PathBuf,
        #[arg(long, default_value_t = 8)]
        kmax: u32,
        #[arg(long, default_value_t = 400)]
        pool: usize,
    },
    /// Capacity bracket via Chebyshev-type growth factors.
    Capacity {
        #[arg(long)]
        region: PathBuf,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
        /// Comma-separated radii for the limsup schedule.
        #[arg(long, default_value = "4,8,16,32")]
        r: String,
    },
    /// Extremal-function lower bound at a point.
    Extremal {
        #[arg(long)]
        region: PathBuf,
        /// Point as comma-separated re,im pairs, one pair per coordinate.
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
    },
    /// G-hull membership at a point.
    Ghull {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 1e6)]
        phimax: f64,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
    },
    /// Empirical Bernstein-constant diagnostic.
    Bernstein {
        #[arg(long)]
        region: PathBuf,
        #[arg(long, default_value_t = 6)]
        dmax: u32,
        #[arg(long, default_value_t = 24)]
        trials: usize,
    },
    /// L-completion of a weight function.
    Saddulaev {
        /// WeightFunction JSON file.
        #[arg(long)]
        u: PathBuf,
        #[arg(long, default_value_t = 40)]
        jmax: u32,
        #[arg(long, default_value_t = 500)]
        grid: usize,
    },
    /// Build a divergent series with a prescribed convergence set.
    Synthesize {
        /// TargetSet JSON file.
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_parser = ["variety", "enumeration", "block", "projective"])]
        mode: String,
        #[arg(long, default_value_t = 2.0)]
        window: f64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 64)]
        horizon: u64,
        /// File name (inside --out) for the emitted series spec.
        #[arg(long, default_value = "spec.json")]
        out_spec: PathBuf,
    },
    /// Independently re-check a synthesis report.
    Verify {
        /// SynthesisReport JSON (as written by synthesize).
        #[arg(long)]
        report: PathBuf,
        /// Optional probe-plan JSON: a list of points.
        #[arg(long)]
        probes: Option<PathBuf>,
    },
    /// Classify the restriction of a series spec at a point.
    ConvTest {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 64)]
        horizon: u64,
        #[arg(long)]
        projective: bool,
    },
    /// Joint (n+1)-variable root test of a series spec.
    Hartogs {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 64)]
        horizon: u64,
    },
}

fn parse_point(s: &str) -> Result<Point> {
    let nums: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().context("bad coordinate"))
        .collect::<Result<_>>()?;
    if nums.is_empty() || nums.len() % 2 != 0 {
        bail!("points are comma-separated re,im pairs (one pair per coordinate)");
    }
    Ok(nums.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value)?)?;
    Ok(path)
}

fn write_csv(dir: &Path, name: &str, header: &str, rows: &[String]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(&path, text)?;
    Ok(path)
}

fn main() {
    let cli = Cli::parse();
    convlab_core::configure_threads(cli.threads);
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let out = &cli.out;
    let seed = cli.seed;
    match cli.command {
        Command::Fekete {
            region,
            k,
            pool,
            sweeps,
        } => {
            let region: Region = load_json(&region)?;
            let budget = FeketeBudget { pool, sweeps };
            let cfg = convlab_core::pluri::fekete_search(&region, k, &budget, seed)?;
            write_csv(
                out,
                "fekete.csv",
                "k,log_v,d_k",
                &[format!("{},{},{}", cfg.k, cfg.log_v, cfg.d_k)],
            )?;
            let pts: Vec<String> = cfg
                .points
                .iter()
                .map(|p| {
                    p.iter()
                        .map(|z| format!("{},{}", z.re, z.im))
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            write_csv(out, "fekete_points.csv", "re,im", &pts)?;
            write_json(out, "fekete_report.json", &cfg)?;
            println!("fekete k={} log|V|={:.6} d_k={:.6}", cfg.k, cfg.log_v, cfg.d_k);
            Ok(0)
        }
        Command::Tdiam { region, kmax, pool } => {
            let region: Region = load_json(&region)?;
            let budget = FeketeBudget {
                pool,
                ..Default::default()
            };
            let report = transfinite_diameter(&region, kmax, &budget, seed)?;
            let rows: Vec<String> = report
                .per_k
                .iter()
                .map(|f| format!("{},{},{}", f.k, f.log_v, f.d_k))
                .collect();
            write_csv(out, "tdiam.csv", "k,log_v,d_k", &rows)?;
            write_json(out, "tdiam_report.json", &report)?;
            println!(
                "tdiam d = {:.6} +- {:.6} (pluripolar: {})",
                report.extrapolated, report.uncertainty, report.pluripolar_flag
            );
            Ok(0)
        }
        Command::Capacity { region, kmax, r } => {
            let region: Region = load_json(&region)?;
            let radii: Vec<f64> = r
                .split(',')
                .map(|t| t.trim().parse::<f64>().context("bad radius"))
                .collect::<Result<_>>()?;
            let est = capacity(&region, kmax, &radii, &CapacityBudget::default(), seed)?;
            let rows: Vec<String> = est
                .per_kr
                .iter()
                .map(|e| format!("{},{},{}", e.k, e.r, e.value))
                .collect();
            write_csv(out, "capacity.csv", "k,R,L_kR", &rows)?;
            let lr: Vec<String> = est.l_r.iter().map(|(r, l)| format!("{r},{l}")).collect();
            write_csv(out, "capacity_LR.csv", "R,L_R", &lr)?;
            write_json(out, "capacity_report.json", &est)?;
            println!(
                "capacity c in [{:.6}, {:.6}] (vanishing witness: {})",
                est.c_lower, est.c_upper, est.vanishing_witness
            );
            Ok(0)
        }
        Command::Extremal { region, at, kmax } => {
            let region: Region = load_json(&region)?;
            let x = parse_point(&at)?;
            let est = extremal_lower(&region, &x, kmax, &ExtremalBudget::default(), seed)?;
            #[derive(serde::Serialize)]
            struct Out {
                lower: f64,
                weight: u32,
                method: String,
                constraint_sup: f64,
                witness: convlab_core::poly::Polynomial,
            }
            write_json(
                out,
                "extremal_report.json",
                &Out {
                    lower: est.lower,
                    weight: est.weight,
                    method: format!("{:?}", est.method),
                    constraint_sup: est.constraint_sup,
                    witness: est.witness.clone(),
                },
            )?;
            println!("extremal lower bound {:.6} (weight {})", est.lower, est.weight);
            Ok(0)
        }
        Command::Ghull {
            region,
            at,
            phimax,
            kmax,
        } => {
            let region: Region = load_json(&region)?;
            let x = parse_point(&at)?;
            let verdict =
                ghull_member(&region, &x, phimax, kmax, &ExtremalBudget::default(), seed)?;
            write_json(out, "ghull_report.json", &verdict)?;
            println!("ghull verdict: {verdict:?}");
            Ok(0)
        }
        Command::Bernstein {
            region,
            dmax,
            trials,
        } => {
            let region: Region = load_json(&region)?;
            let report = bernstein_constant(&region, dmax, trials, seed)?;
            let rows: Vec<String> = report
                .per_degree
                .iter()
                .map(|(d, v)| format!("{d},{v}"))
                .collect();
            write_csv(out, "bernstein.csv", "degree,ratio", &rows)?;
            write_json(out, "bernstein_report.json", &report)?;
            println!(
                "bernstein: max ratio {:.4}, unbounded: {}",
                report
                    .per_degree
                    .iter()
                    .map(|&(_, v)| v)
                    .fold(0.0f64, f64::max),
                report.unbounded
            );
            Ok(0)
        }
        Command::Saddulaev { u, jmax, grid } => {
            let weight: WeightFunction = load_json(&u)?;
            let mut rng = Rng::new(seed).stream(0x5ADD);
            let mut pts: Vec<Point> = Vec::with_capacity(grid);
            for i in 0..grid {
                let r = if i % 3 == 0 { 1.0 } else { rng.range(0.05, 8.0) };
                pts.push((0..weight.n).map(|_| rng.on_circle(r)).collect());
            }
            let origin = vec![Complex64::new(0.0, 0.0); weight.n];
            let (v, report) = saddulaev_transform(&weight, &[origin], &pts, jmax)?;
            let rows: Vec<String> = pts
                .iter()
                .zip(&report.off_values)
                .map(|(x, val)| format!("{},{}", point_norm(x), val))
                .collect();
            write_csv(out, "saddulaev.csv", "abs_x,v", &rows)?;
            write_json(out, "saddulaev_weight.json", &v)?;
            #[derive(serde::Serialize)]
            struct Out<'a> {
                m_values: &'a [f64],
                tail_bound: f64,
                monotone_everywhere: bool,
            }
            write_json(
                out,
                "saddulaev_report.json",
                &Out {
                    m_values: &report.m_values,
                    tail_bound: report.tail_bound,
                    monotone_everywhere: report.monotone_from.iter().all(|m| m.is_some()),
                },
            )?;
            println!(
                "saddulaev: {} grid points, tail bound {:.3e}",
                pts.len(),
                report.tail_bound
            );
            Ok(0)
        }
        Command::Synthesize {
            target,
            mode,
            window,
            eps,
            horizon,
            out_spec,
        } => {
            let target: TargetSet = load_json(&target)?;
            let report: SynthesisReport = match mode.as_str() {
                "variety" => {
                    if target.factors.len() != 1 {
                        bail!("variety mode takes a single-factor target");
                    }
                    let cfg = VarietyConfig {
                        horizon,
                        window_radius: window,
                        min_distance: eps,
                        seed,
                        ..Default::default()
                    };
                    synth_variety(&target.factors[0], &cfg)?
                }
                "enumeration" => {
                    let roots = target.chain_roots();
                    if roots.is_empty() {
                        bail!("enumeration mode needs a finite 1-D target (linear chain factors)");
                    }
                    let region =
                        Region::finite(target.n, roots.into_iter().map(|(p, _)| p).collect());
                    synth_enumeration(
                        &region,
                        &EnumConfig {
                            seed,
                            ..Default::default()
                        },
                    )?
                }
                "block" => synth_block(
                    &target,
                    &BlockConfig {
                        window_radius: window,
                        eps,
                        seed,
                        m_max: target.levels().min(8),
                        ..Default::default()
                    },
                )?,
                "projective" => synth_projective(
                    &target,
                    &BlockConfig {
                        eps,
                        seed,
                        m_max: target.levels().clamp(3, 8),
                        resolution: 0.05,
                        ..Default::default()
                    },
                )?,
                other => bail!("unknown mode {other}"),
            };
            fs::create_dir_all(out)?;
            fs::write(
                out.join(&out_spec),
                serde_json::to_string_pretty(&report.spec)?,
            )?;
            let rows: Vec<String> = report
                .probes
                .iter()
                .map(|p| {
                    format!(
                        "{},{},{:?},{}",
                        p.probe
                            .iter()
                            .map(|z| format!("{}+{}i", z.re, z.im))
                            .collect::<Vec<_>>()
                            .join(";"),
                        p.on_target,
                        p.verdict.kind,
                        p.verdict.margin
                    )
                })
                .collect();
            write_csv(
                out,
                "synthesis_margins.csv",
                "probe,on_target,verdict,margin",
                &rows,
            )?;
            write_json(out, "synthesis_report.json", &report)?;
            let ok = report.all_consistent();
            println!(
                "synthesize mode={} probes={} consistent={} hartogs={:?}",
                mode,
                report.probes.len(),
                ok,
                report.hartogs.kind
            );
            Ok(if ok { 0 } else { 2 })
        }
        Command::Verify { report, probes } => {
            let report: SynthesisReport = load_json(&report)?;
            let plan: Vec<Point> = match probes {
                Some(path) => load_json(&path)?,
                None => report.probes.iter().map(|p| p.probe.clone()).collect(),
            };
            let vr = verify(&report, &plan, seed)?;
            let rows: Vec<String> = vr
                .probes
                .iter()
                .zip(&vr.em)
                .map(|(p, em)| {
                    format!(
                        "{},{},{:?},{},{:?},{}",
                        p.probe
                            .iter()
                            .map(|z| format!("{}+{}i", z.re, z.im))
                            .collect::<Vec<_>>()
                            .join(";"),
                        p.on_target,
                        p.verdict.kind,
                        p.verdict.margin,
                        em.level,
                        em.sup_root
                    )
                })
                .collect();
            write_csv(
                out,
                "verify_margins.csv",
                "probe,on_target,verdict,margin,em_level,sup_root",
                &rows,
            )?;
            write_json(out, "verify_report.json", &vr)?;
            println!(
                "verify: {} probes, conflicts {}, indeterminate {}",
                vr.probes.len(),
                vr.conflicts.len(),
                vr.indeterminate.len()
            );
            if !vr.consistent {
                return Ok(1);
            }
            if vr.indeterminate.len() * 2 > vr.probes.len() {
                return Ok(2);
            }
            Ok(0)
        }
        Command::ConvTest {
            spec,
            at,
            horizon,
            projective,
        } => {
            let spec: SeriesSpec = load_json(&spec)?;
            let x = parse_point(&at)?;
            let stream = if projective {
                spec.restrict_projective(&x, horizon)?
            } else {
                spec.restrict_affine(&x, horizon)?
            };
            let verdict = classify(&stream.log_mags, &ClassifyConfig::default())?;
            let rows: Vec<String> = stream
                .values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let r = if j == 0 {
                        0.0
                    } else {
                        (stream.log_mags[j] / j as f64).exp()
                    };
                    format!("{j},{},{},{r}", v.re, v.im)
                })
                .collect();
            write_csv(out, "stream.csv", "j,re,im,r_j", &rows)?;
            write_json(out, "conv_test_report.json", &verdict)?;
            println!(
                "conv-test verdict {:?} growth {:.4} margin {:.4}",
                verdict.kind, verdict.growth_estimate, verdict.margin
            );
            Ok(match verdict.kind {
                VerdictKind::Indeterminate => 2,
                _ => 0,
            })
        }
        Command::Hartogs { spec, horizon } => {
            let spec: SeriesSpec = load_json(&spec)?;
            let verdict = spec.hartogs_joint(horizon, &ClassifyConfig::default())?;
            write_json(out, "hartogs_report.json", &verdict)?;
            println!("hartogs verdict {:?}", verdict.kind);
            Ok(match verdict.kind {
                VerdictKind::Indeterminate => 2,
                _ => 0,
            })
        }
    }
}
