//! Task farming and persistence.
//!
//! Every experiment is split into a fixed list of tasks before any work
//! starts; the pool only changes who runs a task, never what it computes.

use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use surflearn::duality::is_self_dual;
use surflearn::ensemble::{kl_from_histogram, EnsembleHistogram, SpherePixelization};
use surflearn::fermion::{fit_arc, run_trajectory, Boundary, Chord, TrajectoryConfig, TrajectoryRecord};
use surflearn::floquet::{
    heff_classify, quasi_energies, steady_state_density, FloquetPoint, HeffPoint, STEADY_TOL,
};
use surflearn::io::{
    write_csv, ArcRow, CoherentRow, DualityRow, EnsembleRow, HeffRow, KlRow, LogicalRow, ProfileRow, SpectrumRow,
    TrajectoryRow,
};
use surflearn::protocol::ProtocolPoint;
use surflearn::seed::derive_seed;
use surflearn::statevector::{
    coherent_information, exhaustive_records, projected_ensemble, sampled_records, CodeLayout, LogicalRecord, Plan,
    KAPPA_CONVENTION,
};

use crate::config::{ConfigError, ExperimentConfig, GridPoint, Kind, PlanKind};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Engine(#[from] surflearn::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TaskSeed {
    pub point: usize,
    pub trajectory: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailedTask {
    pub point: usize,
    pub trajectory: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub rows: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub manifest_sha256: String,
    pub version: String,
    pub kind: &'static str,
    pub master_seed: u64,
    pub config: ExperimentConfig,
    pub threads: usize,
    pub wall_clock_seconds: f64,
    pub files: Vec<OutputFile>,
    pub tasks: Vec<TaskSeed>,
    pub failed: Vec<FailedTask>,
}

/// SHA-256 over the config (output path excluded), code version and seed.
pub fn manifest_hash(cfg: &ExperimentConfig) -> String {
    let mut c = cfg.clone();
    c.output = None;
    let mut h = Sha256::new();
    h.update(serde_json::to_string(&c).expect("config serializes").as_bytes());
    h.update(b"\n");
    h.update(VERSION.as_bytes());
    h.update(b"\n");
    h.update(c.master_seed.to_le_bytes());
    hex::encode(h.finalize())
}

struct Writer<'a> {
    dir: &'a Path,
    comments: Vec<(String, String)>,
    files: Vec<OutputFile>,
}

impl Writer<'_> {
    fn write<T: Serialize>(&mut self, name: &str, rows: &[T], extra: &[(&str, &str)]) -> Result<(), RunError> {
        let mut comments = self.comments.clone();
        comments.extend(extra.iter().map(|(k, v)| (k.to_string(), v.to_string())));
        let n = write_csv(&self.dir.join(name), &comments, rows)?;
        self.files.push(OutputFile {
            path: name.to_string(),
            rows: n,
        });
        Ok(())
    }
}

/// Runs `cfg`, writing CSVs and `manifest.json` into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path, threads: Option<usize>) -> Result<RunManifest, RunError> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let start = Instant::now();
    let hash = manifest_hash(cfg);
    let mut writer = Writer {
        dir: out,
        comments: vec![
            ("manifest_sha256".into(), hash.clone()),
            ("kind".into(), cfg.kind.name().into()),
            ("master_seed".into(), cfg.master_seed.to_string()),
            ("version".into(), VERSION.into()),
        ],
        files: Vec::new(),
    };
    let points = cfg.grid.points();
    let (tasks, failed) = pool.install(|| match cfg.kind {
        Kind::EntropyScan => entropy_scan(cfg, &points, &mut writer),
        Kind::CoherentInfo => coherent_scan(cfg, &points, &mut writer),
        Kind::Ensemble => ensemble_scan(cfg, &points, &mut writer),
        Kind::FloquetScan => floquet_scan(cfg, &points, &mut writer),
        Kind::DualityTable => duality_table(&points, &mut writer),
    })?;
    let manifest = RunManifest {
        manifest_sha256: hash,
        version: VERSION.into(),
        kind: cfg.kind.name(),
        master_seed: cfg.master_seed,
        config: cfg.clone(),
        threads: pool.current_num_threads(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        files: writer.files,
        tasks,
        failed,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(out.join("manifest.json"), json + "\n")?;
    Ok(manifest)
}

type Outcome = Result<(Vec<TaskSeed>, Vec<FailedTask>), RunError>;

fn protocol(g: &GridPoint) -> surflearn::Result<ProtocolPoint> {
    ProtocolPoint::new(g.theta, g.phi, g.t)
}

/// Runs one closure per point, in parallel, keeping results in point order.
fn per_point<T: Send>(
    points: &[GridPoint],
    seeds: impl Fn(usize) -> u64 + Sync,
    f: impl Fn(usize, &GridPoint, u64) -> surflearn::Result<T> + Sync,
) -> (Vec<TaskSeed>, Vec<(usize, surflearn::Result<T>)>) {
    let tasks: Vec<TaskSeed> = (0..points.len())
        .map(|i| TaskSeed {
            point: i,
            trajectory: 0,
            seed: seeds(i),
        })
        .collect();
    let results = tasks
        .par_iter()
        .map(|t| (t.point, f(t.point, &points[t.point], t.seed)))
        .collect();
    (tasks, results)
}

fn failure(point: usize, trajectory: usize, e: &surflearn::Error) -> FailedTask {
    log::warn!("task ({point}, {trajectory}) failed: {e}");
    FailedTask {
        point,
        trajectory,
        error: e.to_string(),
    }
}

fn entropy_scan(cfg: &ExperimentConfig, points: &[GridPoint], w: &mut Writer) -> Outcome {
    let f = cfg.fermion.as_ref().expect("validated");
    let traj_cfg = TrajectoryConfig {
        sites: f.sites,
        depth: f.depth.unwrap_or(f.sites),
        boundary: f.boundary,
        record_history: false,
        profile_stride: f.profile_stride,
    };
    let chord = f.chord.unwrap_or(match f.boundary {
        Boundary::Open => Chord::Open,
        Boundary::Periodic => Chord::Periodic,
    });
    let boundary = match f.boundary {
        Boundary::Open => "open",
        Boundary::Periodic => "periodic",
    };
    let tasks: Vec<TaskSeed> = (0..points.len())
        .flat_map(|i| {
            (0..f.trajectories).map(move |j| TaskSeed {
                point: i,
                trajectory: j,
                seed: derive_seed(cfg.master_seed, i as u64, j as u64),
            })
        })
        .collect();
    let results: Vec<surflearn::Result<TrajectoryRecord>> = tasks
        .par_iter()
        .map(|t| run_trajectory(&protocol(&points[t.point])?, &traj_cfg, t.seed))
        .collect();

    let half = f.sites / 2;
    let mut failed = Vec::new();
    let mut rows = Vec::new();
    let mut profiles = vec![Vec::new(); points.len()];
    for (t, r) in tasks.iter().zip(results) {
        let g = &points[t.point];
        match r {
            Ok(rec) => {
                rows.push(TrajectoryRow {
                    seed: t.seed,
                    sites: f.sites,
                    depth: traj_cfg.depth,
                    theta: g.theta,
                    phi: g.phi,
                    layer: traj_cfg.depth,
                    cut: half,
                    entropy_bits: rec.entropy_profile[half - 1],
                    log_weight: rec.log_weight,
                });
                profiles[t.point].push(rec.entropy_profile);
            }
            Err(e) => failed.push(failure(t.point, t.trajectory, &e)),
        }
    }

    let mut profile_rows = Vec::new();
    let mut arc_rows = Vec::new();
    for (i, ps) in profiles.iter().enumerate() {
        if ps.is_empty() {
            continue;
        }
        let g = &points[i];
        let n = ps.len() as f64;
        let mut mean_nats = Vec::with_capacity(f.sites - 1);
        for cut in 1..f.sites {
            let xs = ps.iter().map(|p| p[cut - 1]);
            let mean = xs.clone().sum::<f64>() / n;
            let var = if ps.len() > 1 {
                xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            profile_rows.push(ProfileRow {
                point: i,
                sites: f.sites,
                theta: g.theta,
                phi: g.phi,
                boundary: boundary.into(),
                cut,
                mean_bits: mean,
                std_err_bits: (var / n).sqrt(),
                trajectories: ps.len(),
            });
            mean_nats.push(mean * LN_2);
        }
        match fit_arc(&mean_nats, f.sites, chord) {
            Ok(fit) => arc_rows.push(ArcRow {
                point: i,
                sites: f.sites,
                theta: g.theta,
                phi: g.phi,
                boundary: boundary.into(),
                chord: chord.name().into(),
                v: fit.v,
                c_prime: fit.c_prime,
                c: fit.c,
                a: fit.a,
                residual_rms: fit.residual_rms,
                half_cut_bits: mean_nats[half - 1] / LN_2,
                trajectories: ps.len(),
            }),
            Err(e) => failed.push(failure(i, usize::MAX, &e)),
        }
    }
    w.write("trajectories.csv", &rows, &[])?;
    w.write("profiles.csv", &profile_rows, &[])?;
    w.write("arcs.csv", &arc_rows, &[("arc_units", "nats")])?;
    Ok((tasks, failed))
}

fn coherent_scan(cfg: &ExperimentConfig, points: &[GridPoint], w: &mut Writer) -> Outcome {
    let s = cfg.statevector.as_ref().expect("validated");
    let layout = Arc::new(CodeLayout::new(s.d)?);
    let master = cfg.master_seed;
    let (tasks, results) = per_point(
        points,
        |i| derive_seed(master, i as u64, 0),
        |_, g, seed| {
            let plan = match s.plan {
                PlanKind::Exhaustive => Plan::Exhaustive,
                PlanKind::MonteCarlo => Plan::MonteCarlo {
                    samples: s.samples.unwrap_or(0),
                    seed,
                },
            };
            let p = protocol(g)?;
            let records = match plan {
                Plan::Exhaustive => exhaustive_records(&p, layout.clone())?,
                Plan::MonteCarlo { samples, seed } => sampled_records(&p, layout.clone(), samples, seed)?,
            };
            let records: Vec<LogicalRow> =
                records.iter().map(|r| logical_row(r, seed, s.d, g)).collect();
            Ok((coherent_information(&p, layout.clone(), plan)?, records))
        },
    );
    let plan = match s.plan {
        PlanKind::Exhaustive => "exhaustive",
        PlanKind::MonteCarlo => "monte_carlo",
    };
    let mut failed = Vec::new();
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (i, r) in results {
        match r {
            Ok((c, rec)) => {
                records.extend(rec);
                rows.push(CoherentRow {
                point: i,
                d: s.d,
                theta: points[i].theta,
                phi: points[i].phi,
                t: points[i].t,
                plan: plan.into(),
                i_c: c.i_c,
                std_err: c.std_err,
                count: c.count,
                total_probability: c.total_probability,
                })
            }
            Err(e) => failed.push(failure(i, 0, &e)),
        }
    }
    w.write("coherent.csv", &rows, &[("i_c_units", "bits")])?;
    w.write("records.csv", &records, &[("kappa_convention", KAPPA_CONVENTION), ("i_s_units", "bits")])?;
    Ok((tasks, failed))
}

fn logical_row(r: &LogicalRecord, seed: u64, d: usize, g: &GridPoint) -> LogicalRow {
    LogicalRow {
        seed,
        d,
        theta: g.theta,
        phi: g.phi,
        t: g.t,
        p_pp: r.p_pp,
        p_mm: r.p_mm,
        re_p_pm: r.p_pm_re,
        im_p_pm: r.p_pm_im,
        kx: r.kappa[0],
        ky: r.kappa[1],
        kz: r.kappa[2],
        c: r.c,
        i_s: r.i_s,
        log_p: r.weight.ln(),
    }
}

fn ensemble_scan(cfg: &ExperimentConfig, points: &[GridPoint], w: &mut Writer) -> Outcome {
    let e = cfg.ensemble.as_ref().expect("validated");
    let layout = Arc::new(CodeLayout::new(e.d)?);
    let pix = SpherePixelization::new(e.order)?;
    let mut sizes = e.kl_samples.clone();
    sizes.push(e.samples);
    sizes.sort_unstable();
    sizes.dedup();
    let master = cfg.master_seed;
    let (tasks, results) = per_point(
        points,
        |i| derive_seed(master, i as u64, 0),
        |i, g, seed| {
            let records = projected_ensemble(&protocol(g)?, layout.clone(), e.samples, seed)?;
            let mut hist = EnsembleHistogram::new(&pix);
            let mut kl = Vec::new();
            let mut next = sizes.iter().peekable();
            for (n, r) in records.iter().enumerate() {
                hist.add(&pix, r.signed_bloch)?;
                if next.peek() == Some(&&(n + 1)) {
                    next.next();
                    let k = kl_from_histogram(&hist)?;
                    kl.push(KlRow {
                        point: i,
                        order: k.order,
                        patches: k.patches,
                        samples: k.samples,
                        d: k.d,
                        d_normalized: k.d_normalized,
                    });
                }
            }
            let rows: Vec<EnsembleRow> = records
                .iter()
                .enumerate()
                .map(|(n, r)| EnsembleRow {
                    point: i,
                    sample: n,
                    d: e.d,
                    theta: g.theta,
                    phi: g.phi,
                    bx: r.signed_bloch[0],
                    by: r.signed_bloch[1],
                    bz: r.signed_bloch[2],
                    weight: r.weight,
                })
                .collect();
            Ok((rows, kl))
        },
    );
    let mut failed = Vec::new();
    let mut rows = Vec::new();
    let mut kl_rows = Vec::new();
    for (i, r) in results {
        match r {
            Ok((s, k)) => {
                rows.extend(s);
                kl_rows.extend(k);
            }
            Err(err) => failed.push(failure(i, 0, &err)),
        }
    }
    w.write("ensemble.csv", &rows, &[("kappa_convention", KAPPA_CONVENTION)])?;
    w.write("kl.csv", &kl_rows, &[("kl_units", "nats")])?;
    Ok((tasks, failed))
}

fn floquet_scan(cfg: &ExperimentConfig, points: &[GridPoint], w: &mut Writer) -> Outcome {
    let momenta = cfg.floquet.as_ref().expect("validated").momenta;
    let (tasks, results) = per_point(
        points,
        |_| 0,
        |_, g, _| {
            let fp = FloquetPoint::from_protocol(&protocol(g)?)?;
            let table = quasi_energies(&fp, momenta)?;
            let mut spectrum = Vec::with_capacity(2 * momenta);
            for (n, &k) in table.k.iter().enumerate() {
                for band in 0..2 {
                    spectrum.push(SpectrumRow {
                        j: fp.j,
                        phi: fp.phi,
                        j_d: fp.j_d,
                        phid: fp.phi_d,
                        k,
                        band: band as u8,
                        eps_re: table.eps_re[n][band],
                        eps_im: table.eps_im[n][band],
                    });
                }
            }
            let heff = HeffPoint::from_floquet(&fp)?;
            let rho = steady_state_density(&table, STEADY_TOL);
            let row = HeffRow {
                theta: g.theta,
                phi_basis: g.phi,
                h: heff.h,
                lambda: heff.lambda,
                label: heff_classify(heff.h, heff.lambda)?.label().into(),
                rho_0: rho.fraction,
                rho_0_per_pi: rho.per_pi,
                self_dual_residual: is_self_dual(g.theta, g.phi)?.residual,
            };
            Ok((spectrum, row))
        },
    );
    let mut failed = Vec::new();
    let mut spectrum = Vec::new();
    let mut heff = Vec::new();
    for (i, r) in results {
        match r {
            Ok((s, h)) => {
                spectrum.extend(s);
                heff.push(h);
            }
            Err(e) => failed.push(failure(i, 0, &e)),
        }
    }
    w.write("spectrum.csv", &spectrum, &[])?;
    w.write("heff.csv", &heff, &[])?;
    Ok((tasks, failed))
}

fn duality_table(points: &[GridPoint], w: &mut Writer) -> Outcome {
    let (tasks, results) = per_point(
        points,
        |_| 0,
        |_, g, _| {
            let p = protocol(g)?;
            Ok(DualityRow {
                theta: g.theta,
                phi: g.phi,
                t: g.t,
                j: p.j.to_f64(),
                k: p.k.to_f64(),
                phi_folded: p.phi_folded,
                j_d: p.j_d.to_f64(),
                phid: p.phi_d,
                self_dual_residual: is_self_dual(g.theta, g.phi)?.residual,
            })
        },
    );
    let mut failed = Vec::new();
    let mut rows = Vec::new();
    for (i, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failed.push(failure(i, 0, &e)),
        }
    }
    w.write("duality.csv", &rows, &[])?;
    Ok((tasks, failed))
}

/// Output directory: `--out`, else the config's `output`, else `./out/<kind>`.
pub fn output_dir(cfg: &ExperimentConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.kind.name()))
}
