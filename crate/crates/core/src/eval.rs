//! Region-detection metrics and structure comparison.
//!
//! * ICDAR-19: greedy one-to-one IoU matching at several thresholds, P/R/F1 per
//!   threshold, and the IoU-weighted average F1 `Σ tᵢ·F1ᵢ / Σ tᵢ`.
//! * TableBank: overlap, prediction and ground-truth areas summed over the
//!   corpus before forming precision and recall.
//! * ICDAR-13: per-table completeness (recall) and purity (precision) averaged
//!   over tables. This works on region area; character-level sub-objects are
//!   not part of the detection contract.

use serde::{Deserialize, Serialize};

use crate::detections::GtTable;
use crate::error::{Error, Result};
use crate::raster::geometry::{iou, union_area, union_intersection_area, BBox};
use crate::structure::TableStructure;

pub const DEFAULT_THRESHOLDS: [f64; 4] = [0.6, 0.7, 0.8, 0.9];

/// Predictions and ground truth for one page.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PageBoxes {
    pub image_id: String,
    pub preds: Vec<BBox>,
    pub gts: Vec<BBox>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScores {
    pub iou_threshold: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ThresholdScores {
    pub fn from_counts(iou_threshold: f64, tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Self {
            iou_threshold,
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `2PR / (P + R)`, zero when both are zero.
pub fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub pred: usize,
    pub gt: usize,
    pub iou: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<MatchPair>,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Greedy one-to-one matching in descending IoU order, ties by (pred, gt) index.
pub fn match_boxes(preds: &[BBox], gts: &[BBox], threshold: f64) -> Matching {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (p, pb) in preds.iter().enumerate() {
        for (g, gb) in gts.iter().enumerate() {
            let v = iou(pb, gb);
            if v > 0.0 && v >= threshold {
                candidates.push((v, p, g));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut pred_used = vec![false; preds.len()];
    let mut gt_used = vec![false; gts.len()];
    let mut pairs = Vec::new();
    for (v, p, g) in candidates {
        if !pred_used[p] && !gt_used[g] {
            pred_used[p] = true;
            gt_used[g] = true;
            pairs.push(MatchPair {
                pred: p,
                gt: g,
                iou: v,
            });
        }
    }
    let tp = pairs.len();
    Matching {
        pairs,
        tp,
        fp: preds.len() - tp,
        fn_: gts.len() - tp,
    }
}

/// `Σ tᵢ·F1ᵢ / Σ tᵢ` over `(threshold, f1)` pairs.
pub fn weighted_avg_f1(f1s: &[(f64, f64)]) -> Result<f64> {
    if f1s.is_empty() {
        return Err(Error::Metric("weighted average of an empty F1 set".into()));
    }
    let weight: f64 = f1s.iter().map(|(t, _)| t).sum();
    if weight <= 0.0 {
        return Err(Error::Metric("IoU thresholds must be positive".into()));
    }
    Ok(f1s.iter().map(|(t, f)| t * f).sum::<f64>() / weight)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageMatches {
    pub image_id: String,
    pub n_pred: usize,
    pub n_gt: usize,
    /// Matched pairs at each threshold, in threshold order.
    pub matches: Vec<Vec<MatchPair>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Icdar19Report {
    pub thresholds: Vec<ThresholdScores>,
    pub weighted_avg_f1: f64,
    pub pages: Vec<PageMatches>,
}

/// ICDAR-19 region evaluation, counts pooled over all pages.
pub fn icdar19_metrics(pages: &[PageBoxes], thresholds: &[f64]) -> Result<Icdar19Report> {
    if thresholds.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::Metric("IoU thresholds must lie in (0, 1]".into()));
    }
    let mut totals = vec![(0usize, 0usize, 0usize); thresholds.len()];
    let mut page_reports = Vec::with_capacity(pages.len());
    for page in pages {
        let mut matches = Vec::with_capacity(thresholds.len());
        for (i, &t) in thresholds.iter().enumerate() {
            let m = match_boxes(&page.preds, &page.gts, t);
            totals[i].0 += m.tp;
            totals[i].1 += m.fp;
            totals[i].2 += m.fn_;
            matches.push(m.pairs);
        }
        page_reports.push(PageMatches {
            image_id: page.image_id.clone(),
            n_pred: page.preds.len(),
            n_gt: page.gts.len(),
            matches,
        });
    }
    let scores: Vec<ThresholdScores> = thresholds
        .iter()
        .zip(&totals)
        .map(|(&t, &(tp, fp, fn_))| ThresholdScores::from_counts(t, tp, fp, fn_))
        .collect();
    let pairs: Vec<(f64, f64)> = scores.iter().map(|s| (s.iou_threshold, s.f1)).collect();
    Ok(Icdar19Report {
        weighted_avg_f1: weighted_avg_f1(&pairs)?,
        thresholds: scores,
        pages: page_reports,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// TableBank: per page, overlap = |∪preds ∩ ∪gts|, prediction area = |∪preds|,
/// ground-truth area = |∪gts|; all three are summed over pages.
pub fn tablebank_metrics(pages: &[PageBoxes]) -> RegionScores {
    let (mut overlap, mut pred_area, mut gt_area) = (0i64, 0i64, 0i64);
    for page in pages {
        overlap += union_intersection_area(&page.preds, &page.gts);
        pred_area += union_area(&page.preds);
        gt_area += union_area(&page.gts);
    }
    match (pred_area, gt_area) {
        (0, 0) => RegionScores {
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
        },
        (0, _) | (_, 0) => RegionScores {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        },
        _ => {
            let precision = overlap as f64 / pred_area as f64;
            let recall = overlap as f64 / gt_area as f64;
            RegionScores {
                precision,
                recall,
                f1: harmonic_mean(precision, recall),
            }
        }
    }
}

/// ICDAR-13 style: recall averaged over ground-truth tables, precision over
/// predicted tables, F1 from the two averages. Errors when the corpus has no
/// ground-truth tables.
pub fn icdar13_metrics(pages: &[PageBoxes]) -> Result<RegionScores> {
    let (mut recall_sum, mut n_gt) = (0.0, 0usize);
    let (mut precision_sum, mut n_pred) = (0.0, 0usize);
    for page in pages {
        for g in &page.gts {
            recall_sum += union_intersection_area(std::slice::from_ref(g), &page.preds) as f64
                / g.area() as f64;
            n_gt += 1;
        }
        for p in &page.preds {
            precision_sum += union_intersection_area(std::slice::from_ref(p), &page.gts) as f64
                / p.area() as f64;
            n_pred += 1;
        }
    }
    if n_gt == 0 {
        return Err(Error::Metric(
            "no ground-truth tables: ICDAR-13 scores are undefined".into(),
        ));
    }
    let recall = recall_sum / n_gt as f64;
    let precision = if n_pred == 0 {
        0.0
    } else {
        precision_sum / n_pred as f64
    };
    Ok(RegionScores {
        precision,
        recall,
        f1: harmonic_mean(precision, recall),
    })
}

/// How a recovered table compares with its ground truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureMatch {
    pub shape: bool,
    /// Same set of span rectangles, hence the same slot occupancy.
    pub spans: bool,
}

impl StructureMatch {
    pub fn exact(&self) -> bool {
        self.shape && self.spans
    }
}

/// Compares grid shape and span map. Ground truth without cells only matches a 1×1 empty grid.
pub fn compare_structure(pred: &TableStructure, gt: &GtTable) -> StructureMatch {
    let gt_cells = gt.cells.as_deref().unwrap_or(&[]);
    let shape = gt.shape().unwrap_or((1, 1)) == (pred.n_rows, pred.n_cols);
    let mut gt_spans: Vec<[u32; 4]> = gt_cells
        .iter()
        .map(|c| [c.row[0], c.row[1], c.col[0], c.col[1]])
        .collect();
    gt_spans.sort_unstable();
    StructureMatch {
        shape,
        spans: gt_spans == pred.span_map(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub gt_tables: usize,
    pub pred_tables: usize,
    /// Ground-truth tables paired with a prediction at IoU ≥ `pairing_iou`.
    pub paired: usize,
    pub shape_matches: usize,
    pub exact_matches: usize,
    pub exact_rate: f64,
    pub pairing_iou: f64,
}

/// Pairs predicted and ground-truth tables per page (greedy IoU ≥ `pairing_iou`)
/// and counts exact structure matches over ground-truth tables.
pub fn structure_metrics<'a>(
    pages: impl IntoIterator<Item = (&'a [TableStructure], &'a [GtTable])>,
    pairing_iou: f64,
) -> StructureReport {
    let (mut gt_tables, mut pred_tables, mut paired, mut shape_matches, mut exact) =
        (0, 0, 0, 0, 0);
    for (preds, gts) in pages {
        gt_tables += gts.len();
        pred_tables += preds.len();
        let pb: Vec<BBox> = preds.iter().map(|t| t.bbox).collect();
        let gb: Vec<BBox> = gts.iter().map(|t| t.bbox).collect();
        for pair in match_boxes(&pb, &gb, pairing_iou).pairs {
            paired += 1;
            let m = compare_structure(&preds[pair.pred], &gts[pair.gt]);
            shape_matches += m.shape as usize;
            exact += m.exact() as usize;
        }
    }
    StructureReport {
        gt_tables,
        pred_tables,
        paired,
        shape_matches,
        exact_matches: exact,
        exact_rate: if gt_tables == 0 {
            1.0
        } else {
            exact as f64 / gt_tables as f64
        },
        pairing_iou,
    }
}

/// A named row of per-threshold F1 values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct F1Row {
    pub name: String,
    pub f1: Vec<(f64, f64)>,
}

/// Plain-text F1 table with a weighted-average column.
pub fn format_f1_table(rows: &[F1Row]) -> Result<String> {
    let Some(first) = rows.first() else {
        return Ok(String::new());
    };
    let name_w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(7);
    let mut out = format!("{:<name_w$}", "Dataset");
    for (t, _) in &first.f1 {
        out.push_str(&format!("  IoU={t:.1}"));
    }
    out.push_str("  WAvg.\n");
    for row in rows {
        out.push_str(&format!("{:<name_w$}", row.name));
        for (_, f) in &row.f1 {
            out.push_str(&format!("  {f:>7.3}"));
        }
        out.push_str(&format!("  {:>5.3}\n", weighted_avg_f1(&row.f1)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x0: i32, y0: i32, x1: i32, y1: i32) -> BBox {
        BBox::new(x0, y0, x1, y1).unwrap()
    }

    #[test]
    fn identical_boxes_match_fully() {
        let boxes = vec![b(0, 0, 10, 10), b(20, 20, 40, 30)];
        for t in DEFAULT_THRESHOLDS {
            let m = match_boxes(&boxes, &boxes, t);
            assert_eq!((m.tp, m.fp, m.fn_), (2, 0, 0));
        }
    }

    #[test]
    fn disjoint_pair() {
        let m = match_boxes(&[b(0, 0, 10, 10)], &[b(50, 50, 60, 60)], 0.5);
        assert_eq!((m.tp, m.fp, m.fn_), (0, 1, 1));
    }

    #[test]
    fn two_preds_one_gt() {
        // IoU 0.8 and 0.7 against the same ground truth
        let gt = b(0, 0, 100, 10);
        let preds = [b(0, 0, 80, 10), b(30, 0, 100, 10)];
        assert!((iou(&preds[0], &gt) - 0.8).abs() < 1e-12);
        assert!((iou(&preds[1], &gt) - 0.7).abs() < 1e-12);
        let m = match_boxes(&preds, &[gt], 0.75);
        assert_eq!((m.tp, m.fp, m.fn_), (1, 1, 0));
        assert_eq!(m.pairs[0].pred, 0);
    }

    #[test]
    fn wavg_basics() {
        assert!(weighted_avg_f1(&[]).is_err());
        let ones: Vec<_> = DEFAULT_THRESHOLDS.iter().map(|&t| (t, 1.0)).collect();
        assert!((weighted_avg_f1(&ones).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_denominators() {
        let s = ThresholdScores::from_counts(0.5, 0, 0, 0);
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn tablebank_degenerate_cases() {
        let empty = PageBoxes::default();
        assert_eq!(tablebank_metrics(&[empty]).f1, 1.0);
        let only_gt = PageBoxes {
            gts: vec![b(0, 0, 5, 5)],
            ..Default::default()
        };
        assert_eq!(tablebank_metrics(&[only_gt]).f1, 0.0);
    }

    #[test]
    fn icdar13_examples() {
        let g = b(0, 0, 10, 10);
        let exact = PageBoxes {
            preds: vec![g],
            gts: vec![g],
            ..Default::default()
        };
        let s = icdar13_metrics(&[exact]).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));

        let half = PageBoxes {
            preds: vec![b(0, 0, 5, 10)],
            gts: vec![g],
            ..Default::default()
        };
        let s = icdar13_metrics(&[half]).unwrap();
        assert_eq!((s.precision, s.recall), (1.0, 0.5));

        let missed = PageBoxes {
            preds: vec![g],
            gts: vec![g, b(50, 50, 60, 60)],
            ..Default::default()
        };
        let s = icdar13_metrics(&[missed]).unwrap();
        assert_eq!((s.precision, s.recall), (1.0, 0.5));

        assert!(icdar13_metrics(&[PageBoxes::default()]).is_err());
    }

    #[test]
    fn f1_table_layout() {
        let rows = vec![F1Row {
            name: "Original".into(),
            f1: vec![(0.6, 0.836), (0.7, 0.816), (0.8, 0.787), (0.9, 0.634)],
        }];
        let text = format_f1_table(&rows).unwrap();
        assert!(text.starts_with("Dataset   IoU=0.6"));
        assert!(text.trim_end().ends_with("0.758"), "{text}");
    }
}
