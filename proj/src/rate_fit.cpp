#include "lbs/rate_fit.hpp"

#include "lbs/error.hpp"

#include <cmath>
#include <set>

namespace lbs {

namespace {

RateFit fit_points(const std::vector<double>& h, const std::vector<double>& e, std::vector<int> idx,
                   std::vector<int> excluded) {
  std::set<double> distinct;
  for (int i : idx) distinct.insert(h[i]);
  if (idx.size() < 3 || distinct.size() < 3)
    throw Error(ErrorKind::InsufficientData, "rate fit needs >= 3 positive errors at distinct h");
  const double n = static_cast<double>(idx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i : idx) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - fit.slope * sx) / n;
  double rss = 0;
  for (int i : idx) {
    const double r = std::log(e[i]) - (icpt + fit.slope * std::log(h[i]));
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  for (std::size_t j = 1; j < idx.size(); ++j) fit.eocs.push_back(std::log2(e[idx[j - 1]] / e[idx[j]]));
  fit.used = std::move(idx);
  fit.excluded = std::move(excluded);
  return fit;
}

void split(const std::vector<double>& h, const std::vector<double>& e, std::vector<int>& used,
           std::vector<int>& excluded) {
  if (h.size() != e.size()) throw Error(ErrorKind::InvalidArgument, "h and error lists differ in length");
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(h[i] > 0)) throw Error(ErrorKind::InvalidArgument, "mesh sizes must be positive");
    if (std::isfinite(e[i]) && e[i] >= kNoiseFloor)
      used.push_back(static_cast<int>(i));
    else
      excluded.push_back(static_cast<int>(i));
  }
}

}  // namespace

RateFit fit_rate(const std::vector<double>& h, const std::vector<double>& errors) {
  std::vector<int> used, excluded;
  split(h, errors, used, excluded);
  return fit_points(h, errors, std::move(used), std::move(excluded));
}

RateFit fit_rate_tail(const std::vector<double>& h, const std::vector<double>& errors, int count) {
  std::vector<int> used, excluded;
  split(h, errors, used, excluded);
  if (static_cast<int>(used.size()) > count) used.erase(used.begin(), used.end() - count);
  return fit_points(h, errors, std::move(used), std::move(excluded));
}

}  // namespace lbs
