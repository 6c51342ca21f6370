#include "tivstat/numeric.hpp"

#include "tivstat/error.hpp"

namespace tivstat {

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DataError("loglog_slope: need two or more matched points");
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: non-positive value");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double mx = mean(lx);
  const double my = mean(ly);
  CompensatedSum sxy, sxx;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx.value() > 0.0)) throw DomainError("loglog_slope: degenerate abscissa");
  return sxy.value() / sxx.value();
}

}  // namespace tivstat
