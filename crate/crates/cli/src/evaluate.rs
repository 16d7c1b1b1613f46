use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{ArgGroup, Args, ValueEnum};
use serde::{Deserialize, Serialize};
use tabstruct_core::detections::{
    filter_by_score, parse_detection_document, parse_ground_truth, GroundTruthPage, FORMAT_VERSION,
};
use tabstruct_core::eval::{
    format_f1_table, icdar13_metrics, icdar19_metrics, structure_metrics, tablebank_metrics,
    weighted_avg_f1, F1Row, PageBoxes, DEFAULT_THRESHOLDS,
};
use tabstruct_core::pipeline::{parse_structures, PageStructure};
use tabstruct_core::raster::BBox;
use tabstruct_core::PipelineConfig;

use crate::{json_bytes, read_file, write_file, EXIT_OK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Icdar19,
    Tablebank,
    Icdar13,
    /// Grid shape and span map of recognized tables.
    Structure,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["pred", "f1_table"])))]
pub struct EvaluateArgs {
    /// Predictions: detection, ground-truth or structure JSON.
    #[arg(long, requires = "gt")]
    pub pred: Option<PathBuf>,
    #[arg(long)]
    pub gt: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "icdar19")]
    pub protocol: Protocol,
    /// IoU thresholds for icdar19.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_THRESHOLDS)]
    pub thresholds: Vec<f64>,
    /// Minimum IoU for pairing tables under the structure protocol.
    #[arg(long, default_value_t = 0.5)]
    pub pairing_iou: f64,
    /// Print the weighted-average F1 table for stored per-threshold F1 rows.
    #[arg(long, conflicts_with_all = ["pred", "gt"])]
    pub f1_table: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    format_version: &'static str,
    protocol: &'a str,
    config: &'a PipelineConfig,
    result: T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct F1Fixture {
    rows: Vec<F1Row>,
}

#[derive(Serialize)]
struct F1TableRow<'a> {
    name: &'a str,
    f1: &'a [(f64, f64)],
    weighted_avg_f1: f64,
}

pub fn run(args: &EvaluateArgs, config: &PipelineConfig) -> anyhow::Result<i32> {
    if let Some(path) = &args.f1_table {
        let fixture: F1Fixture = serde_json::from_slice(&read_file(path)?)
            .with_context(|| format!("F1 table {}", path.display()))?;
        let text = format_f1_table(&fixture.rows)?;
        print!("{text}");
        let rows = fixture
            .rows
            .iter()
            .map(|r| {
                Ok(F1TableRow {
                    name: &r.name,
                    f1: &r.f1,
                    weighted_avg_f1: weighted_avg_f1(&r.f1)?,
                })
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        return finish(args, "f1-table", config, rows);
    }
    let pred_path = args
        .pred
        .as_deref()
        .expect("clap enforces --pred or --f1-table");
    let gt_path = args.gt.as_deref().expect("clap enforces --gt with --pred");
    let gt = parse_ground_truth(&read_file(gt_path)?)
        .with_context(|| format!("ground truth {}", gt_path.display()))?;
    let pred = Predictions::load(&read_file(pred_path)?, config.score_threshold)
        .with_context(|| format!("predictions {}", pred_path.display()))?;
    check_ids(
        pred.ids(),
        gt.pages.iter().map(|p| p.image_id.clone()).collect(),
    )?;

    match args.protocol {
        Protocol::Structure => {
            let Predictions::Structures(structs) = &pred else {
                bail!("the structure protocol needs a structure JSON as --pred");
            };
            let by_id: BTreeMap<&str, &PageStructure> =
                structs.iter().map(|p| (p.image_id.as_str(), p)).collect();
            let report = structure_metrics(
                gt.pages.iter().map(|g| {
                    (
                        by_id[g.image_id.as_str()].tables.as_slice(),
                        g.tables.as_slice(),
                    )
                }),
                args.pairing_iou,
            );
            println!(
                "structure: {}/{} tables exact ({:.4}), {} shape matches, {} paired",
                report.exact_matches,
                report.gt_tables,
                report.exact_rate,
                report.shape_matches,
                report.paired
            );
            finish(args, "structure", config, report)
        }
        protocol => {
            let pages = pred.page_boxes(&gt.pages);
            match protocol {
                Protocol::Icdar19 => {
                    let report = icdar19_metrics(&pages, &args.thresholds)?;
                    let row = F1Row {
                        name: "pred".into(),
                        f1: report
                            .thresholds
                            .iter()
                            .map(|s| (s.iou_threshold, s.f1))
                            .collect(),
                    };
                    print!("{}", format_f1_table(&[row])?);
                    finish(args, "icdar19", config, report)
                }
                Protocol::Tablebank => {
                    let s = tablebank_metrics(&pages);
                    println!(
                        "tablebank: P={:.4} R={:.4} F1={:.4}",
                        s.precision, s.recall, s.f1
                    );
                    finish(args, "tablebank", config, s)
                }
                _ => {
                    let s = icdar13_metrics(&pages)?;
                    println!(
                        "icdar13: P={:.4} R={:.4} F1={:.4}",
                        s.precision, s.recall, s.f1
                    );
                    finish(args, "icdar13", config, s)
                }
            }
        }
    }
}

fn finish<T: Serialize>(
    args: &EvaluateArgs,
    protocol: &str,
    config: &PipelineConfig,
    result: T,
) -> anyhow::Result<i32> {
    if let Some(path) = &args.report {
        let report = Report {
            format_version: FORMAT_VERSION,
            protocol,
            config,
            result,
        };
        write_file(path, &json_bytes(&report))?;
    }
    Ok(EXIT_OK)
}

fn check_ids(pred: BTreeSet<String>, gt: BTreeSet<String>) -> anyhow::Result<()> {
    if pred != gt {
        let only_pred: Vec<_> = pred.difference(&gt).collect();
        let only_gt: Vec<_> = gt.difference(&pred).collect();
        bail!("image_id sets differ: only in predictions {only_pred:?}, only in ground truth {only_gt:?}");
    }
    Ok(())
}

/// Table boxes per page, from whichever document kind was supplied.
enum Predictions {
    Boxes(BTreeMap<String, Vec<BBox>>),
    Structures(Vec<PageStructure>),
}

impl Predictions {
    fn load(bytes: &[u8], score_threshold: f64) -> anyhow::Result<Self> {
        let det_err = match parse_detection_document(bytes) {
            Ok(doc) => {
                let boxes = doc
                    .pages
                    .iter()
                    .map(|p| {
                        let kept = filter_by_score(p, score_threshold);
                        (
                            p.image_id.clone(),
                            kept.tables().map(|t| t.region()).collect(),
                        )
                    })
                    .collect();
                return Ok(Predictions::Boxes(boxes));
            }
            Err(e) => e,
        };
        let gt_err = match parse_ground_truth(bytes) {
            Ok(doc) => {
                let boxes = doc
                    .pages
                    .iter()
                    .map(|p| {
                        (
                            p.image_id.clone(),
                            p.tables.iter().map(|t| t.bbox).collect(),
                        )
                    })
                    .collect();
                return Ok(Predictions::Boxes(boxes));
            }
            Err(e) => e,
        };
        match parse_structures(bytes) {
            Ok(pages) => {
                let mut seen = BTreeSet::new();
                if let Some(p) = pages.iter().find(|p| !seen.insert(p.image_id.clone())) {
                    bail!("duplicate image_id {:?}", p.image_id);
                }
                Ok(Predictions::Structures(pages))
            }
            Err(s_err) => bail!(
                "not a detection, ground-truth or structure document\n  as detections: {det_err}\n  as ground truth: {gt_err}\n  as structures: {s_err}"
            ),
        }
    }

    fn ids(&self) -> BTreeSet<String> {
        match self {
            Predictions::Boxes(m) => m.keys().cloned().collect(),
            Predictions::Structures(v) => v.iter().map(|p| p.image_id.clone()).collect(),
        }
    }

    fn page_boxes(&self, gt: &[GroundTruthPage]) -> Vec<PageBoxes> {
        gt.iter()
            .map(|g| {
                let preds = match self {
                    Predictions::Boxes(m) => m[&g.image_id].clone(),
                    Predictions::Structures(v) => v
                        .iter()
                        .find(|p| p.image_id == g.image_id)
                        .map(|p| p.tables.iter().map(|t| t.bbox).collect())
                        .unwrap_or_default(),
                };
                PageBoxes {
                    image_id: g.image_id.clone(),
                    preds,
                    gts: g.tables.iter().map(|t| t.bbox).collect(),
                }
            })
            .collect()
    }
}
