#pragma once

#include "mvprop/scene_io.hpp"

#include <map>
#include <set>

namespace mvp {

double iou_2d(const Box2D& a, const Box2D& b);

struct RecallReport {
  std::vector<std::string> classes;
  std::vector<double> thresholds;
  std::vector<std::vector<double>> recall;  // [class][threshold]
  double proposals_per_image = 0;

  double at(size_t cls, size_t thr) const { return recall[cls][thr]; }
};

/// Recall over an IoU-threshold grid: a ground-truth instance is covered at
/// threshold t when any proposal in its frame overlaps it with IoU >= t.
/// Frames are matched by id; proposals are class-agnostic.
RecallReport recall_report(const std::vector<FrameBoxes>& proposals,
                           const std::vector<FrameBoxes>& gt,
                           const std::vector<double>& thresholds);

/// Unweighted mean over classes not in `exclude`. Throws ValidationError
/// when nothing remains.
double class_average(const std::map<std::string, double>& per_class,
                     const std::set<std::string>& exclude = {});

enum class LabelKind { Positive, Background, Ignore };

struct ProposalLabel {
  LabelKind kind = LabelKind::Background;
  std::string class_name;  // set for Positive
};

/// Per-proposal training labels against the max-IoU ground truth in the same
/// frame: IoU > 0.5 -> positive, IoU < 0.3 -> background, else ignore.
/// Output is flat, frame by frame in input order, proposals in frame order.
std::vector<ProposalLabel> label_proposals(const std::vector<FrameBoxes>& proposals,
                                           const std::vector<FrameBoxes>& gt);

struct ScoredDetection {
  std::string frame_id;
  Box2D box;  // label field = predicted class
  double score = 0;
};

struct ApReport {
  std::map<std::string, double> per_class;   // classes with >= 1 gt instance
  std::set<std::string> undefined_classes;   // predicted but no gt
  double mean_ap = 0;
};

/// Greedy score-ordered matching at the given IoU threshold; duplicates on a
/// matched ground truth count as false positives. AP is the area under the
/// precision-recall curve with all-points interpolation.
ApReport average_precision(const std::vector<ScoredDetection>& detections,
                           const std::vector<FrameBoxes>& gt, double iou_threshold);

}  // namespace mvp
