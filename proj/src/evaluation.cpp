#include "mvprop/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace mvp {

double iou_2d(const Box2D& a, const Box2D& b) {
  const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (iw <= 0 || ih <= 0) return 0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0;
}

namespace {

std::map<std::string, const std::vector<FrameBoxEntry>*> frame_index(
    const std::vector<FrameBoxes>& frames) {
  std::map<std::string, const std::vector<FrameBoxEntry>*> idx;
  for (const auto& fb : frames) idx[fb.frame_id] = &fb.boxes;
  return idx;
}

}  // namespace

RecallReport recall_report(const std::vector<FrameBoxes>& proposals,
                           const std::vector<FrameBoxes>& gt,
                           const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw ValidationError("recall_report: empty threshold list");
  const auto prop_idx = frame_index(proposals);

  std::set<std::string> class_set;
  for (const auto& fb : gt) {
    for (const auto& entry : fb.boxes) class_set.insert(entry.box.label);
  }

  RecallReport report;
  report.classes.assign(class_set.begin(), class_set.end());
  report.thresholds = thresholds;
  std::map<std::string, size_t> class_row;
  for (size_t c = 0; c < report.classes.size(); ++c) class_row[report.classes[c]] = c;

  std::vector<std::vector<size_t>> covered(report.classes.size(),
                                           std::vector<size_t>(thresholds.size(), 0));
  std::vector<size_t> total(report.classes.size(), 0);

  size_t proposal_count = 0;
  for (const auto& fb : gt) {
    const auto it = prop_idx.find(fb.frame_id);
    const std::vector<FrameBoxEntry>* props = it == prop_idx.end() ? nullptr : it->second;
    proposal_count += props ? props->size() : 0;
    for (const auto& g : fb.boxes) {
      const size_t row = class_row[g.box.label];
      ++total[row];
      double best = 0;
      if (props) {
        for (const auto& p : *props) best = std::max(best, iou_2d(p.box, g.box));
      }
      for (size_t t = 0; t < thresholds.size(); ++t) {
        if (best >= thresholds[t]) ++covered[row][t];
      }
    }
  }

  report.recall.assign(report.classes.size(), std::vector<double>(thresholds.size(), 0));
  for (size_t c = 0; c < report.classes.size(); ++c) {
    for (size_t t = 0; t < thresholds.size(); ++t) {
      report.recall[c][t] =
          total[c] ? static_cast<double>(covered[c][t]) / static_cast<double>(total[c]) : 0;
    }
  }
  report.proposals_per_image =
      gt.empty() ? 0 : static_cast<double>(proposal_count) / static_cast<double>(gt.size());
  return report;
}

double class_average(const std::map<std::string, double>& per_class,
                     const std::set<std::string>& exclude) {
  double sum = 0;
  size_t count = 0;
  for (const auto& [name, value] : per_class) {
    if (exclude.contains(name)) continue;
    sum += value;
    ++count;
  }
  if (count == 0) throw ValidationError("class_average: no classes left after exclusion");
  return sum / static_cast<double>(count);
}

std::vector<ProposalLabel> label_proposals(const std::vector<FrameBoxes>& proposals,
                                           const std::vector<FrameBoxes>& gt) {
  const auto gt_idx = frame_index(gt);
  std::vector<ProposalLabel> labels;
  for (const auto& fb : proposals) {
    const auto it = gt_idx.find(fb.frame_id);
    const std::vector<FrameBoxEntry>* gts = it == gt_idx.end() ? nullptr : it->second;
    for (const auto& p : fb.boxes) {
      double best = 0;
      const Box2D* best_gt = nullptr;
      if (gts) {
        for (const auto& g : *gts) {
          const double iou = iou_2d(p.box, g.box);
          if (iou > best) {
            best = iou;
            best_gt = &g.box;
          }
        }
      }
      ProposalLabel label;
      if (best > 0.5 && best_gt) {
        label.kind = LabelKind::Positive;
        label.class_name = best_gt->label;
      } else if (best < 0.3) {
        label.kind = LabelKind::Background;
      } else {
        label.kind = LabelKind::Ignore;
      }
      labels.push_back(std::move(label));
    }
  }
  return labels;
}

ApReport average_precision(const std::vector<ScoredDetection>& detections,
                           const std::vector<FrameBoxes>& gt, double iou_threshold) {
  for (const auto& d : detections) {
    if (!std::isfinite(d.score)) throw ValidationError("average_precision: non-finite score");
  }
  // Ground truth grouped by (class, frame).
  std::map<std::string, std::map<std::string, std::vector<const Box2D*>>> gt_by_class;
  std::map<std::string, size_t> gt_count;
  for (const auto& fb : gt) {
    for (const auto& g : fb.boxes) {
      gt_by_class[g.box.label][fb.frame_id].push_back(&g.box);
      ++gt_count[g.box.label];
    }
  }

  std::set<std::string> det_classes;
  for (const auto& d : detections) det_classes.insert(d.box.label);

  ApReport report;
  for (const auto& cls : det_classes) {
    if (!gt_count.contains(cls)) report.undefined_classes.insert(cls);
  }

  for (const auto& [cls, per_frame] : gt_by_class) {
    std::vector<const ScoredDetection*> dets;
    for (const auto& d : detections) {
      if (d.box.label == cls) dets.push_back(&d);
    }
    std::stable_sort(dets.begin(), dets.end(),
                     [](const ScoredDetection* a, const ScoredDetection* b) {
                       if (a->score != b->score) return a->score > b->score;
                       return a->frame_id < b->frame_id;
                     });

    std::map<std::string, std::vector<char>> matched;
    for (const auto& [fid, boxes] : per_frame) matched[fid].assign(boxes.size(), 0);

    const size_t n_gt = gt_count[cls];
    std::vector<char> is_tp(dets.size(), 0);
    for (size_t k = 0; k < dets.size(); ++k) {
      const auto it = per_frame.find(dets[k]->frame_id);
      if (it == per_frame.end()) continue;
      const auto& boxes = it->second;
      auto& used = matched[dets[k]->frame_id];
      double best = 0;
      int best_j = -1;
      for (size_t j = 0; j < boxes.size(); ++j) {
        if (used[j]) continue;
        const double iou = iou_2d(dets[k]->box, *boxes[j]);
        if (iou > best) {
          best = iou;
          best_j = static_cast<int>(j);
        }
      }
      if (best_j >= 0 && best >= iou_threshold) {
        is_tp[k] = 1;
        used[best_j] = 1;
      }
    }

    // Area under the precision-recall curve, all-points interpolation.
    double ap = 0;
    size_t tp = 0;
    std::vector<double> precisions(dets.size()), recalls(dets.size());
    for (size_t k = 0; k < dets.size(); ++k) {
      tp += is_tp[k];
      precisions[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
      recalls[k] = static_cast<double>(tp) / static_cast<double>(n_gt);
    }
    double envelope = 0;
    double prev_recall = 0;
    // Walk from the end so `envelope` is the max precision at >= this recall.
    std::vector<double> interp(dets.size());
    for (size_t k = dets.size(); k-- > 0;) {
      envelope = std::max(envelope, precisions[k]);
      interp[k] = envelope;
    }
    for (size_t k = 0; k < dets.size(); ++k) {
      ap += (recalls[k] - prev_recall) * interp[k];
      prev_recall = recalls[k];
    }
    report.per_class[cls] = ap;
  }

  if (!report.per_class.empty()) {
    double sum = 0;
    for (const auto& [cls, ap] : report.per_class) sum += ap;
    report.mean_ap = sum / static_cast<double>(report.per_class.size());
  }
  return report;
}

}  // namespace mvp
