use crate::args::{AnalyzeArgs, DistanceArg, EmbeddingFormatArg};
use crate::output::{coords_csv, display_name, read_file, sha256_hex, FileEntry, OutputDir};
use crate::{svg, CliError, Result};
use riskfield::distances::{bound_report, energy_distance_matrix};
use riskfield::inference::{mantel_test, MantelResult, MantelVariant};
use riskfield::ingest::{
    aggregate_embeddings, embedding_cloud_energy_matrix, embedding_distance_matrix, load_embeddings, load_labels,
    load_profiles, load_returns, EmbeddingFormat,
};
use riskfield::matrix::euclidean_distances;
use riskfield::projections::{metric_mds, pca_project, procrustes_align, silhouette, MdsOptions};
use riskfield::simulator::{empirical_moments, return_distance_matrix};
use riskfield::{DistanceMatrix, SensitivityProfile};
use serde::Serialize;
use std::collections::BTreeSet;
use std::path::Path;

pub const MDS_DIM: usize = 2;
pub const PCA_DIM: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputEcho {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeConfig {
    pub distance: &'static str,
    pub w_power: u8,
    pub seed: u64,
    pub permutations: usize,
    pub mantel_variant: MantelVariant,
    pub mds_dim: usize,
    pub mds_max_iter: usize,
    pub mds_tol: f64,
    pub mds_restarts: usize,
    pub pca_dim: usize,
    pub risk_free: Option<String>,
    pub returns: InputEcho,
    pub embeddings: Option<InputEcho>,
    pub profiles: Option<InputEcho>,
    pub labels: Option<InputEcho>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssetSummary {
    pub used: Vec<String>,
    /// In W but missing from the returns panel.
    pub dropped_from_distance: Vec<String>,
    /// In the returns panel but missing from W.
    pub dropped_from_returns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SilhouetteRow {
    pub method: &'static str,
    pub space: &'static str,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MdsSummary {
    pub stress: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaSummary {
    pub explained_variance: Vec<f64>,
    pub procrustes_scale: f64,
    pub procrustes_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSummary {
    pub pairs: usize,
    pub violations: usize,
    pub violation_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: AnalyzeConfig,
    pub assets: AssetSummary,
    pub mantel: MantelResult,
    pub silhouette: Option<Vec<SilhouetteRow>>,
    pub mds: MdsSummary,
    pub pca: PcaSummary,
    pub bound: Option<BoundSummary>,
    pub files: Vec<FileEntry>,
}

fn echo(path: &Path, bytes: &[u8]) -> InputEcho {
    InputEcho {
        name: display_name(path),
        sha256: sha256_hex(bytes),
    }
}

fn resolve_distance(args: &AnalyzeArgs) -> Result<DistanceArg> {
    let distance = match args.distance {
        Some(d) => d,
        None if args.embeddings.is_some() => DistanceArg::Angular,
        None if args.profiles.is_some() => DistanceArg::Energy,
        None => return Err(CliError::Usage("one of --embeddings or --profiles is required".into())),
    };
    match distance {
        DistanceArg::Energy if args.profiles.is_none() => {
            Err(CliError::Usage("--distance energy needs --profiles".into()))
        }
        DistanceArg::Angular | DistanceArg::EnergySamples if args.embeddings.is_none() => {
            Err(CliError::Usage(format!("--distance {} needs --embeddings", distance.name())))
        }
        _ => Ok(distance),
    }
}

/// Runs the full pipeline and writes `report.json`, `w_matrix.csv`,
/// `d_matrix.csv`, `mds_coords.csv`, `pca_coords.csv`, `mds.svg` and `pca.svg`.
pub fn run(args: &AnalyzeArgs) -> Result<RunReport> {
    let distance = resolve_distance(args)?;
    if args.mds_tol.is_nan() || args.mds_tol <= 0.0 {
        return Err(CliError::Usage("--mds-tol must be positive".into()));
    }

    let returns_bytes = read_file(&args.returns)?;
    let panel = load_returns(returns_bytes.as_slice(), args.risk_free.as_deref())?;

    let mut embeddings_echo = None;
    let mut profiles_echo = None;
    let mut profiles: Option<(Vec<String>, Vec<SensitivityProfile>)> = None;
    let w_full: DistanceMatrix = match distance {
        DistanceArg::Energy => {
            let path = args.profiles.as_ref().expect("checked above");
            let bytes = read_file(path)?;
            profiles_echo = Some(echo(path, &bytes));
            let (labels, prof) = load_profiles(bytes.as_slice())?;
            let mut order: Vec<usize> = (0..labels.len()).collect();
            order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
            let labels: Vec<String> = order.iter().map(|&i| labels[i].clone()).collect();
            let prof: Vec<SensitivityProfile> = order.iter().map(|&i| prof[i].clone()).collect();
            let w = energy_distance_matrix(labels.clone(), &prof, args.w_power)?;
            profiles = Some((labels, prof));
            w
        }
        DistanceArg::Angular | DistanceArg::EnergySamples => {
            let path = args.embeddings.as_ref().expect("checked above");
            let bytes = read_file(path)?;
            embeddings_echo = Some(echo(path, &bytes));
            let format = match args.embeddings_format {
                Some(EmbeddingFormatArg::Jsonl) => EmbeddingFormat::Jsonl,
                Some(EmbeddingFormatArg::Csv) => EmbeddingFormat::Csv,
                None => EmbeddingFormat::from_path(path),
            };
            let records = load_embeddings(bytes.as_slice(), format)?;
            if distance == DistanceArg::Angular {
                let w = embedding_distance_matrix(&aggregate_embeddings(&records)?)?;
                if args.w_power == 2 {
                    w.powi(2)
                } else {
                    w
                }
            } else {
                embedding_cloud_energy_matrix(&records, args.w_power)?
            }
        }
    };

    let w_labels: BTreeSet<&String> = w_full.labels().iter().collect();
    let r_labels: BTreeSet<&String> = panel.labels().iter().collect();
    let used: Vec<String> = w_labels.intersection(&r_labels).map(|s| (*s).clone()).collect();
    if used.is_empty() {
        return Err(riskfield::Error::LabelMismatch("distance and returns inputs share no assets".into()).into());
    }
    let assets = AssetSummary {
        dropped_from_distance: w_labels.difference(&r_labels).map(|s| (*s).clone()).collect(),
        dropped_from_returns: r_labels.difference(&w_labels).map(|s| (*s).clone()).collect(),
        used: used.clone(),
    };

    let w = w_full.select(&used)?;
    let panel = panel.select(&used)?;
    let moments = empirical_moments(&panel)?;
    let d = return_distance_matrix(&moments)?;

    let variant: MantelVariant = args.mantel_variant.into();
    let mantel = mantel_test(&w, &d, args.permutations, args.seed, variant)?;

    let mds = metric_mds(
        &w,
        &MdsOptions {
            dim: MDS_DIM,
            max_iter: args.mds_max_iter,
            tol: args.mds_tol,
            seed: args.seed,
            restarts: args.mds_restarts,
        },
    )?;
    let pca = pca_project(&moments.cov, PCA_DIM.min(used.len()))?;
    let pca_aligned = if pca.coords.ncols() == mds.coords.ncols() {
        procrustes_align(&pca.coords, &mds.coords)?
    } else {
        return Err(CliError::Usage(format!(
            "need at least {MDS_DIM} assets for the projections, got {}",
            used.len()
        )));
    };

    let mut labels_echo = None;
    let mut groups: Option<(Vec<usize>, Vec<String>, Vec<String>)> = None;
    if let Some(path) = &args.labels {
        let bytes = read_file(path)?;
        labels_echo = Some(echo(path, &bytes));
        let map = load_labels(bytes.as_slice())?;
        let per_asset = used
            .iter()
            .map(|a| {
                map.get(a)
                    .cloned()
                    .ok_or_else(|| riskfield::Error::LabelMismatch(format!("asset `{a}` has no label")))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let names: Vec<String> = per_asset.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let ids = per_asset
            .iter()
            .map(|l| names.binary_search(l).expect("name present"))
            .collect();
        groups = Some((ids, names, per_asset));
    }

    let silhouette_rows = match &groups {
        Some((ids, _, _)) => {
            let mds_space = euclidean_distances(used.clone(), &mds.coords)?;
            let pca_space = euclidean_distances(used.clone(), &pca_aligned.aligned)?;
            Some(vec![
                SilhouetteRow {
                    method: "Energy Distance (original space)",
                    space: "distance",
                    score: silhouette(&w, ids)?.mean,
                },
                SilhouetteRow {
                    method: "Metric-MDS",
                    space: "mds",
                    score: silhouette(&mds_space, ids)?.mean,
                },
                SilhouetteRow {
                    method: "PCA",
                    space: "pca",
                    score: silhouette(&pca_space, ids)?.mean,
                },
            ])
        }
        None => None,
    };

    let bound = match &profiles {
        Some((labels, prof)) => {
            let selected: Vec<SensitivityProfile> = used
                .iter()
                .map(|a| prof[labels.iter().position(|l| l == a).expect("label in profiles")].clone())
                .collect();
            let report = bound_report(&selected, &moments.corr)?;
            Some(BoundSummary {
                pairs: report.pairs.len(),
                violations: report.violations(),
                violation_rate: report.violation_rate,
            })
        }
        None => None,
    };

    let group_names = groups.as_ref().map(|(_, _, per)| per.as_slice());
    let svg_groups = groups.as_ref().map(|(ids, names, _)| (ids.as_slice(), names.as_slice()));
    let mut out = OutputDir::create(&args.out)?;
    out.write("w_matrix.csv", w.to_csv().as_bytes())?;
    out.write("d_matrix.csv", d.to_csv().as_bytes())?;
    out.write("mds_coords.csv", coords_csv(&used, &mds.coords, group_names).as_bytes())?;
    out.write("pca_coords.csv", coords_csv(&used, &pca_aligned.aligned, group_names).as_bytes())?;
    out.write(
        "mds.svg",
        svg::scatter("Metric MDS of asset distances", &used, &mds.coords, svg_groups).as_bytes(),
    )?;
    out.write(
        "pca.svg",
        svg::scatter("PCA of return covariance (aligned to MDS)", &used, &pca_aligned.aligned, svg_groups).as_bytes(),
    )?;

    let report = RunReport {
        tool: "riskfield",
        version: env!("CARGO_PKG_VERSION"),
        config: AnalyzeConfig {
            distance: distance.name(),
            w_power: args.w_power,
            seed: args.seed,
            permutations: args.permutations,
            mantel_variant: variant,
            mds_dim: MDS_DIM,
            mds_max_iter: args.mds_max_iter,
            mds_tol: args.mds_tol,
            mds_restarts: args.mds_restarts,
            pca_dim: PCA_DIM,
            risk_free: args.risk_free.clone(),
            returns: echo(&args.returns, &returns_bytes),
            embeddings: embeddings_echo,
            profiles: profiles_echo,
            labels: labels_echo,
        },
        assets,
        mantel,
        silhouette: silhouette_rows,
        mds: MdsSummary {
            stress: mds.stress,
            iterations: mds.iterations,
        },
        pca: PcaSummary {
            explained_variance: pca.explained_variance,
            procrustes_scale: pca_aligned.scale,
            procrustes_residual: pca_aligned.residual,
        },
        bound,
        files: out.manifest().to_vec(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    out.write_unlisted("report.json", format!("{json}\n").as_bytes())?;
    Ok(report)
}
