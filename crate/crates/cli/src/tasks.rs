//! Task implementations. Each returns its outputs in memory; nothing touches
//! the filesystem until the whole task has succeeded.

use eigenbath::analysis::*;
use eigenbath::dynamics::*;
use eigenbath::ensembles::RngSeed;
use eigenbath::family::{build_instance, Family, Instance};
use eigenbath::subspace::{canonical_inversion, BandPair};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, Task};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, svg_path, Artifacts, Table};
use crate::svg::{Bars, Plot, Series};

pub fn run(cfg: &RunConfig) -> CliResult<Artifacts> {
    if let Some(out) = &cfg.out {
        if cfg.task != Task::Report && out.extension().is_some_and(|e| e == "svg") {
            return Err(CliError::config(
                "field `out` names the CSV file; the .svg view is derived from it",
            ));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Compute(e.to_string()))?;
    pool.install(|| match cfg.task {
        Task::LambdaDist => lambda_dist(cfg),
        Task::Evolve => evolve(cfg),
        Task::Sweep => sweep(cfg),
        Task::GuePdf => gue_pdf(cfg),
        Task::Report => report(cfg),
    })
}

fn member_seed(cfg: &RunConfig, i: usize) -> RngSeed {
    RngSeed(cfg.seed).derive(i as u64)
}

fn instance(cfg: &RunConfig, i: usize) -> CliResult<Instance> {
    Ok(build_instance(cfg.family(), &cfg.params, member_seed(cfg, i))?)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

struct Member {
    lambdas: Vec<f64>,
    relative_strength: Option<f64>,
}

/// Inversions of one ensemble member. The resonant degenerate family uses
/// the rank of its coupling block, which is immune to eigensolver rotations
/// inside the degenerate levels.
fn member(cfg: &RunConfig, i: usize) -> CliResult<(BandPair, Member)> {
    let inst = instance(cfg, i)?;
    let band_pair = *inst.band_pair();
    let relative_strength = relative_strength(&inst.hamiltonian, &band_pair).ok();
    let lambdas = match (&inst.interaction, inst.family) {
        (Some(v), Family::StructuredDegenerate) if cfg.params.detuning == 0.0 => {
            degenerate_peaks(v.as_ref())?.lambdas()
        }
        _ => eigendecompose(&inst.hamiltonian, &inst.basis)?.lambdas().to_vec(),
    };
    Ok((band_pair, Member { lambdas, relative_strength }))
}

fn pooled(cfg: &RunConfig) -> CliResult<(LambdaDistribution, Option<f64>)> {
    let members: Vec<(BandPair, Member)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| member(cfg, i))
        .collect::<CliResult<_>>()?;
    let band_pair = members[0].0;
    let vr: Vec<f64> = members.iter().filter_map(|(_, m)| m.relative_strength).collect();
    let vr = (!vr.is_empty()).then(|| median(vr));
    let samples = members.into_iter().flat_map(|(_, m)| m.lambdas).collect();
    Ok((LambdaDistribution::from_samples(band_pair, samples, cfg.bins)?, vr))
}

fn base_table(cfg: &RunConfig, header: &[&str], band_pair: &BandPair) -> Table {
    let mut t = Table::new(header)
        .meta("task", cfg.task)
        .meta("family", cfg.family())
        .meta("g", band_pair.g())
        .meta("g_prime", band_pair.g_prime());
    if cfg.family().is_spin() {
        t = t.meta("n_env", cfg.params.n_env).meta("band_k", cfg.params.band_k);
    }
    t.meta("seed", cfg.seed).meta("samples", cfg.samples)
}

fn lambda_dist(cfg: &RunConfig) -> CliResult<Artifacts> {
    let (dist, _) = pooled(cfg)?;
    let (g, gp) = (dist.band_pair.g(), dist.band_pair.g_prime());
    let gue = cfg.family() == Family::Gue;
    let header: &[&str] = if gue {
        &["bin_center", "count", "analytic_pdf"]
    } else {
        &["bin_center", "count"]
    };
    let mut table = base_table(cfg, header, &dist.band_pair)
        .meta("bins", cfg.bins)
        .meta("mean", fmt_f64(dist.mean))
        .meta("variance", fmt_f64(dist.variance));
    if gue {
        table = table.meta("gue_variance", fmt_f64(gue_variance_closed_form(g, gp)));
    }
    let hist = &dist.histogram;
    for (c, &n) in hist.centers().into_iter().zip(&hist.counts) {
        let mut row = vec![c, n as f64];
        if gue {
            row.push(gue_lambda_pdf(c, g, gp));
        }
        table.push(row);
    }

    let mut art = Artifacts::default();
    art.primary(cfg.out.as_deref(), table.to_csv());
    if let Some(out) = &cfg.out {
        let density = hist.density();
        let xs: Vec<f64> = (0..=400).map(|k| -1.0 + k as f64 / 200.0).collect();
        let pdf: Vec<f64> = xs.iter().map(|&x| gue_lambda_pdf(x, g, gp)).collect();
        let mut series = Vec::new();
        if gue {
            series.push(Series {
                label: "GUE density",
                xs: &xs,
                ys: &pdf,
                dashed: false,
            });
        }
        let plot = Plot {
            title: format!(
                "{} (g={g}, g'={gp}): variance {:.5}, {} samples",
                cfg.family(),
                dist.variance,
                cfg.samples
            ),
            x_label: "eigenvector inversion lambda",
            y_label: "density",
            bars: Some(Bars {
                edges: &hist.edges,
                heights: &density,
            }),
            series,
            refs: vec![],
        };
        art.file(svg_path(out), plot.render());
    }
    Ok(art)
}

fn evolve(cfg: &RunConfig) -> CliResult<Artifacts> {
    let inst = instance(cfg, 0)?;
    let eig = eigendecompose(&inst.hamiltonian, &inst.basis)?;
    let rho0 = initial_mixed_band_state(&inst.basis);
    let times: Vec<f64> = match cfg.t_max {
        Some(t) => (0..cfg.time_samples)
            .map(|k| t * k as f64 / (cfg.time_samples - 1) as f64)
            .collect(),
        None => default_time_grid(&eig, cfg.time_samples),
    };
    let traj = evolve_bloch_z(&eig, &rho0, &times)?;
    let diag = diagonal_ensemble_inversion(&eig, &rho0)?;
    let bp = *inst.band_pair();
    let canonical = canonical_inversion(bp.g(), bp.g_prime());

    let mut table = base_table(cfg, &["t", "bloch_z", "running_average"], &bp)
        .meta("diagonal_ensemble", fmt_f64(diag))
        .meta("canonical", fmt_f64(canonical));
    for k in 0..times.len() {
        table.push(vec![traj.times[k], traj.bloch_z[k], traj.running_average[k]]);
    }

    let mut art = Artifacts::default();
    art.primary(cfg.out.as_deref(), table.to_csv());
    if let Some(out) = &cfg.out {
        let plot = Plot {
            title: format!("{} (g={}, g'={}): Bloch z", cfg.family(), bp.g(), bp.g_prime()),
            x_label: "t",
            y_label: "<sigma_z>",
            bars: None,
            series: vec![
                Series {
                    label: "bloch_z",
                    xs: &traj.times,
                    ys: &traj.bloch_z,
                    dashed: false,
                },
                Series {
                    label: "running average",
                    xs: &traj.times,
                    ys: &traj.running_average,
                    dashed: true,
                },
            ],
            refs: vec![
                (canonical, format!("canonical {canonical:.3}")),
                (diag, format!("time average {diag:.3}")),
            ],
        };
        art.file(svg_path(out), plot.render());
    }
    Ok(art)
}

fn sweep(cfg: &RunConfig) -> CliResult<Artifacts> {
    let curves: Vec<(BandPair, Vec<SweepPoint>)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let inst = instance(cfg, i)?;
            let pts = sweep_variance_vs_vr(&inst.hamiltonian, &inst.basis, &cfg.scales)?;
            Ok((*inst.band_pair(), pts))
        })
        .collect::<CliResult<_>>()?;
    let bp = curves[0].0;
    let column = |k: usize, f: fn(&SweepPoint) -> f64| median(curves.iter().map(|c| f(&c.1[k])).collect());
    let vr: Vec<f64> = (0..cfg.scales.len()).map(|k| column(k, |p| p.relative_strength)).collect();
    let var: Vec<f64> = (0..cfg.scales.len()).map(|k| column(k, |p| p.variance)).collect();

    let mut table = base_table(cfg, &["s", "v_r", "variance"], &bp)
        .meta("aggregate", "median")
        .meta("vr_gue", fmt_f64(vr_gue(bp.g(), bp.g_prime())));
    for k in 0..cfg.scales.len() {
        table.push(vec![cfg.scales[k], vr[k], var[k]]);
    }

    let mut art = Artifacts::default();
    art.primary(cfg.out.as_deref(), table.to_csv());
    if let Some(out) = &cfg.out {
        let plot = Plot {
            title: format!(
                "{} (g={}, g'={}): variance vs V_R, V_R,GUE = {:.3}",
                cfg.family(),
                bp.g(),
                bp.g_prime(),
                vr_gue(bp.g(), bp.g_prime())
            ),
            x_label: "relative strength V_R",
            y_label: "variance of lambda",
            bars: None,
            series: vec![Series {
                label: "median variance",
                xs: &vr,
                ys: &var,
                dashed: false,
            }],
            refs: vec![],
        };
        art.file(svg_path(out), plot.render());
    }
    Ok(art)
}

fn gue_pdf(cfg: &RunConfig) -> CliResult<Artifacts> {
    let (g, gp) = (cfg.params.g, cfg.params.g_prime);
    let n = cfg.pdf_points;
    let mut table = Table::new(&["lambda", "pdf", "cdf"])
        .meta("task", cfg.task)
        .meta("g", g)
        .meta("g_prime", gp)
        .meta("variance", fmt_f64(gue_variance_closed_form(g, gp)))
        .meta("vr_gue", fmt_f64(vr_gue(g, gp)));
    let xs: Vec<f64> = (0..n).map(|k| -1.0 + 2.0 * k as f64 / (n - 1) as f64).collect();
    let pdf: Vec<f64> = xs.iter().map(|&x| gue_lambda_pdf(x, g, gp)).collect();
    for (k, &x) in xs.iter().enumerate() {
        table.push(vec![x, pdf[k], gue_lambda_cdf(x, g, gp)]);
    }
    let mut art = Artifacts::default();
    art.primary(cfg.out.as_deref(), table.to_csv());
    if let Some(out) = &cfg.out {
        let plot = Plot {
            title: format!("GUE inversion density, g={g}, g'={gp}"),
            x_label: "eigenvector inversion lambda",
            y_label: "density",
            bars: None,
            series: vec![Series {
                label: "analytic density",
                xs: &xs,
                ys: &pdf,
                dashed: false,
            }],
            refs: vec![],
        };
        art.file(svg_path(out), plot.render());
    }
    Ok(art)
}

#[derive(Debug, Serialize)]
struct Report {
    task: String,
    family: String,
    g: usize,
    g_prime: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_env: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    band_k: Option<usize>,
    seed: u64,
    samples: usize,
    mean: f64,
    variance: f64,
    canonical_inversion: f64,
    predicted_inversion: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_strength: Option<f64>,
    gue_variance: f64,
    vr_gue: f64,
}

fn report(cfg: &RunConfig) -> CliResult<Artifacts> {
    let (dist, vr) = pooled(cfg)?;
    let (g, gp) = (dist.band_pair.g(), dist.band_pair.g_prime());
    let spin = cfg.family().is_spin();
    let rec = Report {
        task: cfg.task.to_string(),
        family: cfg.family().to_string(),
        g,
        g_prime: gp,
        n_env: spin.then_some(cfg.params.n_env),
        band_k: spin.then_some(cfg.params.band_k),
        seed: cfg.seed,
        samples: cfg.samples,
        mean: dist.mean,
        variance: dist.variance,
        canonical_inversion: canonical_inversion(g, gp),
        predicted_inversion: dist.predicted_inversion(),
        relative_strength: vr,
        gue_variance: gue_variance_closed_form(g, gp),
        vr_gue: vr_gue(g, gp),
    };
    let text = toml::to_string(&rec).map_err(|e| CliError::Compute(e.to_string()))?;
    let mut art = Artifacts::default();
    art.primary(cfg.out.as_deref(), text);
    if let Some(path) = &cfg.matrix_out {
        let inst = instance(cfg, 0)?;
        let h = inst.hamiltonian.as_mat();
        let d = h.nrows();
        let header: Vec<String> = (0..d).flat_map(|j| [format!("re_{j}"), format!("im_{j}")]).collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut table = base_table(cfg, &header, &dist.band_pair).meta("member", 0);
        for i in 0..d {
            table.push((0..d).flat_map(|j| [h[(i, j)].re, h[(i, j)].im]).collect());
        }
        art.file(path.clone(), table.to_csv());
    }
    Ok(art)
}
