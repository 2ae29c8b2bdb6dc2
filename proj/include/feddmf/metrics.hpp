#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace feddmf {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
};

// Predicted positive iff score > threshold (strict, so ties go negative).
inline ConfusionCounts confusion(std::span<const double> scores, std::span<const double> labels,
                                 double threshold) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("confusion: scores length " + std::to_string(scores.size()) +
                                " != labels length " + std::to_string(labels.size()));
  if (scores.empty()) throw std::invalid_argument("confusion: empty input");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("confusion: threshold must be in (0,1)");
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] > threshold;
    const bool pos = labels[i] > 0.5;
    if (pred && pos)
      ++c.tp;
    else if (pred && !pos)
      ++c.fp;
    else if (!pred && pos)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

struct MetricsReport {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  ConfusionCounts counts;
};

// Degenerate denominators yield 0 by convention.
inline MetricsReport f1_report(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("f1_report: no scored pairs");
  MetricsReport r;
  r.counts = c;
  r.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                                  : 0.0;
  r.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                               : 0.0;
  r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                                        : 0.0;
  return r;
}

struct MetricsSummary {
  double mean_precision = 0.0, std_precision = 0.0;
  double mean_recall = 0.0, std_recall = 0.0;
  double mean_f1 = 0.0, std_f1 = 0.0;
  std::size_t count = 0;
};

// Arithmetic mean and population standard deviation per metric.
inline MetricsSummary aggregate(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
  MetricsSummary s;
  s.count = reports.size();
  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    s.mean_precision += r.precision / n;
    s.mean_recall += r.recall / n;
    s.mean_f1 += r.f1 / n;
  }
  for (const auto& r : reports) {
    s.std_precision += (r.precision - s.mean_precision) * (r.precision - s.mean_precision) / n;
    s.std_recall += (r.recall - s.mean_recall) * (r.recall - s.mean_recall) / n;
    s.std_f1 += (r.f1 - s.mean_f1) * (r.f1 - s.mean_f1) / n;
  }
  s.std_precision = std::sqrt(s.std_precision);
  s.std_recall = std::sqrt(s.std_recall);
  s.std_f1 = std::sqrt(s.std_f1);
  return s;
}

}  // namespace feddmf
