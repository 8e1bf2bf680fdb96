#pragma once

// Travel inconvenience of getting vaccinated at a site, for non-commuters
// (home -> site -> home) and for commuters (best of four ways to fit the trip
// around the home/work commute), plus the logit acceptance likelihood.

#include <span>
#include <vector>

#include "vaxsite/common.hpp"
#include "vaxsite/ingest.hpp"

namespace vaxsite::travel {

using ingest::TravelMatrix;

// min of: home round trip, work round trip, on the way home from work,
// on the way to work. Can be negative when `c` breaks the triangle inequality.
double commuter_cost(const TravelMatrix& c, std::size_t u, std::size_t v, std::size_t w);

// c(u, w) + c(w, u).
double noncommuter_cost(const TravelMatrix& c, std::size_t u, std::size_t w);

class TravelModel {
 public:
  // Materializes d eagerly for up to this many districts.
  static constexpr std::size_t kEagerLimit = 64;

  explicit TravelModel(TravelMatrix c);

  std::size_t size() const noexcept { return c_.size(); }
  const TravelMatrix& matrix() const noexcept { return c_; }
  bool materialized() const noexcept { return !d_.empty(); }

  double d(std::size_t u, std::size_t v, std::size_t w) const {
    if (!d_.empty()) return d_[(u * size() + v) * size() + w];
    return commuter_cost(c_, u, v, w);
  }
  double roundtrip(std::size_t u, std::size_t w) const { return roundtrip_(u, w); }

 private:
  TravelMatrix c_;
  Matrix<double> roundtrip_;
  std::vector<double> d_;
};

// Logit acceptance from the inconvenience of every open option and of the
// assigned one. Degenerate spread (one option, or all equal) gives 0.5.
double acceptance_score(std::span<const double> open_options, double assigned);
double logistic(double score);

// l(u, v, assigned) over the given open sites; throws SiteNotOpen.
double acceptance_likelihood(const TravelModel& model, std::size_t u, std::size_t v,
                             std::size_t assigned, std::span<const std::size_t> open_sites);

class AcceptanceModel {
 public:
  AcceptanceModel(const TravelModel& model, std::vector<std::size_t> open_sites);

  const std::vector<std::size_t>& open_sites() const noexcept { return open_; }
  // Throws SiteNotOpen for a closed w.
  double nu(std::size_t u, std::size_t v, std::size_t w) const;
  double likelihood(std::size_t u, std::size_t v, std::size_t w) const;

 private:
  std::size_t slot(std::size_t w) const;

  std::size_t n_;
  std::vector<std::size_t> open_;
  std::vector<std::ptrdiff_t> slot_of_;
  std::vector<double> nu_;  // (u, v, slot)
};

}  // namespace vaxsite::travel
