#include "vaxsite/travel.hpp"

#include <algorithm>
#include <cmath>

namespace vaxsite::travel {

double commuter_cost(const TravelMatrix& c, std::size_t u, std::size_t v, std::size_t w) {
  const double home = c(u, w) + c(w, u);
  const double work = c(v, w) + c(w, v);
  const double after_work = c(v, w) + c(w, u) - c(v, u);
  const double before_work = c(u, w) + c(w, v) - c(u, v);
  return std::min({home, work, after_work, before_work});
}

double noncommuter_cost(const TravelMatrix& c, std::size_t u, std::size_t w) {
  return c(u, w) + c(w, u);
}

TravelModel::TravelModel(TravelMatrix c) : c_(std::move(c)) {
  const auto n = size();
  roundtrip_ = Matrix<double>(n, n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t w = 0; w < n; ++w) roundtrip_(u, w) = noncommuter_cost(c_, u, w);
  }
  if (n <= kEagerLimit) {
    d_.resize(n * n * n);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t w = 0; w < n; ++w) {
          d_[(u * n + v) * n + w] = commuter_cost(c_, u, v, w);
        }
      }
    }
  }
}

double acceptance_score(std::span<const double> open_options, double assigned) {
  if (open_options.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "acceptance needs at least one open site");
  }
  const auto [lo, hi] = std::minmax_element(open_options.begin(), open_options.end());
  const double spread = *hi - *lo;
  if (spread <= 0.0) return 0.0;
  double total = 0.0;
  for (double option : open_options) total += option - assigned;
  return total / spread;
}

double logistic(double score) {
  // exp(s) / (1 + exp(s)), evaluated without overflow.
  if (score >= 0.0) return 1.0 / (1.0 + std::exp(-score));
  const double e = std::exp(score);
  return e / (1.0 + e);
}

double acceptance_likelihood(const TravelModel& model, std::size_t u, std::size_t v,
                             std::size_t assigned, std::span<const std::size_t> open_sites) {
  if (std::find(open_sites.begin(), open_sites.end(), assigned) == open_sites.end()) {
    throw Error(ErrorCode::kSiteNotOpen, "site " + std::to_string(assigned) + " is not open");
  }
  std::vector<double> options;
  options.reserve(open_sites.size());
  for (auto w : open_sites) options.push_back(model.d(u, v, w));
  return logistic(acceptance_score(options, model.d(u, v, assigned)));
}

AcceptanceModel::AcceptanceModel(const TravelModel& model, std::vector<std::size_t> open_sites)
    : n_(model.size()), open_(std::move(open_sites)), slot_of_(model.size(), -1) {
  if (open_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "acceptance model needs an open site");
  }
  std::sort(open_.begin(), open_.end());
  open_.erase(std::unique(open_.begin(), open_.end()), open_.end());
  for (std::size_t k = 0; k < open_.size(); ++k) {
    if (open_[k] >= n_) throw Error(ErrorCode::kInvalidArgument, "site index out of range");
    slot_of_[open_[k]] = static_cast<std::ptrdiff_t>(k);
  }
  const auto m = open_.size();
  nu_.resize(n_ * n_ * m);
  std::vector<double> options(m);
  for (std::size_t u = 0; u < n_; ++u) {
    for (std::size_t v = 0; v < n_; ++v) {
      for (std::size_t k = 0; k < m; ++k) options[k] = model.d(u, v, open_[k]);
      for (std::size_t k = 0; k < m; ++k) {
        nu_[(u * n_ + v) * m + k] = acceptance_score(options, options[k]);
      }
    }
  }
}

std::size_t AcceptanceModel::slot(std::size_t w) const {
  if (w >= n_ || slot_of_[w] < 0) {
    throw Error(ErrorCode::kSiteNotOpen, "site " + std::to_string(w) + " is not open");
  }
  return static_cast<std::size_t>(slot_of_[w]);
}

double AcceptanceModel::nu(std::size_t u, std::size_t v, std::size_t w) const {
  return nu_[(u * n_ + v) * open_.size() + slot(w)];
}

double AcceptanceModel::likelihood(std::size_t u, std::size_t v, std::size_t w) const {
  return logistic(nu(u, v, w));
}

}  // namespace vaxsite::travel
