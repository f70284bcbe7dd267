#include "mlrpca/eval.hpp"

#include <ostream>

#include "mlrpca/error.hpp"

namespace mlrpca::eval {

ConfusionMatrix confusion(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.size() != gt.size()) throw Error(ErrorCode::DimensionMismatch, "prediction and ground truth differ in size");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const bool p = pred.data[i] != 0, g = gt.data[i] != 0;
    if (p && g)
      ++cm.tp;
    else if (p)
      ++cm.fp;
    else if (g)
      ++cm.fn;
    else
      ++cm.tn;
  }
  return cm;
}

namespace {
bool perfect_negative(const ConfusionMatrix& cm) { return cm.tp == 0 && cm.fp == 0 && cm.fn == 0; }
}  // namespace

double precision(const ConfusionMatrix& cm) {
  if (perfect_negative(cm)) return 1.0;
  return cm.tp + cm.fp == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
}

double recall(const ConfusionMatrix& cm) {
  if (perfect_negative(cm)) return 1.0;
  return cm.tp + cm.fn == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

double f_measure(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

double f_measure(const ConfusionMatrix& cm) {
  if (perfect_negative(cm)) return 1.0;
  if (cm.tp == 0) return 0.0;
  return f_measure(precision(cm), recall(cm));
}

EvalReport report(std::span<const FrameInput> frames, const nlohmann::json& config) {
  EvalReport r;
  r.config_echo = config;
  double sum = 0.0;
  for (const auto& f : frames) {
    if (!f.gt) {
      r.excluded.push_back(f.id);
      continue;
    }
    FrameScore s;
    s.id = f.id;
    s.cm = confusion(f.pred, *f.gt);
    s.precision = precision(s.cm);
    s.recall = recall(s.cm);
    s.f_measure = f_measure(s.cm);
    sum += s.f_measure;
    r.per_frame.push_back(std::move(s));
  }
  if (r.per_frame.empty()) throw Error(ErrorCode::NoGroundTruth, "no frame has a ground-truth mask");
  r.average_f_measure = sum / static_cast<double>(r.per_frame.size());
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& s : r.per_frame)
    frames.push_back({{"frame", s.id},
                      {"tp", s.cm.tp},
                      {"fp", s.cm.fp},
                      {"tn", s.cm.tn},
                      {"fn", s.cm.fn},
                      {"precision", s.precision},
                      {"recall", s.recall},
                      {"f_measure", s.f_measure}});
  return {{"per_frame", std::move(frames)},
          {"excluded_without_gt", r.excluded},
          {"summary",
           {{"frames_scored", r.per_frame.size()},
            {"average_f_measure", r.average_f_measure},
            {"conventions",
             "f = 0 when tp = 0; empty prediction on empty ground truth scores 1; scored at working resolution"}}},
          {"config_echo", r.config_echo}};
}

void write_csv(const EvalReport& r, std::ostream& out) {
  const auto old = out.precision(17);
  out << "frame,tp,fp,tn,fn,precision,recall,f_measure\n";
  for (const auto& s : r.per_frame)
    out << s.id << ',' << s.cm.tp << ',' << s.cm.fp << ',' << s.cm.tn << ',' << s.cm.fn << ',' << s.precision << ','
        << s.recall << ',' << s.f_measure << '\n';
  out << "average,,,,,,," << r.average_f_measure << '\n';
  out.precision(old);
}

}  // namespace mlrpca::eval
