#include "lazyppl/meas.hpp"

#include <numbers>

#include "lazyppl/errors.hpp"

namespace lazyppl {

LogWeight LogWeight::from_log(double value) {
  if (std::isnan(value) || value == std::numeric_limits<double>::infinity()) {
    throw InvalidScore("log-weight must be finite or -inf");
  }
  LogWeight w;
  w.value_ = value;
  return w;
}

LogWeight LogWeight::from_weight(double weight) {
  if (!(weight >= 0.0) || std::isinf(weight)) {
    throw InvalidScore("score requires a non-negative weight, got " +
                       std::to_string(weight));
  }
  return weight == 0.0 ? zero() : from_log(std::log(weight));
}

MeasComp<Unit> score(double r) {
  LogWeight delta = LogWeight::from_weight(r);
  return MeasComp<Unit>([delta](const TreeHandle&, LogWeight& w) {
    w += delta;
    return Unit{};
  });
}

MeasComp<Unit> score_log(double log_r) {
  LogWeight delta = LogWeight::from_log(log_r);
  return MeasComp<Unit>([delta](const TreeHandle&, LogWeight& w) {
    w += delta;
    return Unit{};
  });
}

void MeasScope::score(double r) {
  next();
  *weight_ += LogWeight::from_weight(r);
}

void MeasScope::score_log(double log_r) {
  next();
  *weight_ += LogWeight::from_log(log_r);
}

double normal_pdf(double mu, double sigma, double x) {
  if (!(sigma > 0.0)) throw InvalidParameter("normal_pdf: sigma must be > 0");
  double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double normal_log_pdf(double mu, double sigma, double x) {
  if (!(sigma > 0.0)) throw InvalidParameter("normal_pdf: sigma must be > 0");
  double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace lazyppl
