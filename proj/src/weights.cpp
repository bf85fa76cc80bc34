#include "beamsel/weights.hpp"

#include <cmath>

#include "beamsel/errors.hpp"

namespace beamsel {

Index WeightMatrix::active_count() const {
  return active.cast<Index>().sum();
}

double WeightMatrix::radiated_power_w() const {
  return per_element_power_w * (amplitudes * amplitudes).sum();
}

MatrixXcd WeightMatrix::excitation() const {
  const Index p = rows(), q = cols();
  MatrixXcd e(p, q);
  for (Index j = 0; j < q; ++j)
    for (Index i = 0; i < p; ++i)
      e(i, j) = active(i, j)
                    ? std::polar(amplitudes(i, j), phases_rad(i, j))
                    : Complex(0.0, 0.0);
  return e;
}

void WeightMatrix::canonicalize() {
  const Index p = rows(), q = cols();
  double peak = 0.0;
  for (Index j = 0; j < q; ++j) {
    for (Index i = 0; i < p; ++i) {
      if (!active(i, j)) {
        amplitudes(i, j) = 0.0;
        phases_rad(i, j) = 0.0;
        continue;
      }
      phases_rad(i, j) = wrap_phase(phases_rad(i, j));
      peak = std::max(peak, amplitudes(i, j));
    }
  }
  if (!(peak > 0.0))
    throw DomainError("weights: no active element with positive amplitude");
  if (peak != 1.0) {
    for (Index j = 0; j < q; ++j)
      for (Index i = 0; i < p; ++i)
        if (active(i, j)) amplitudes(i, j) /= peak;
    per_element_power_w *= peak * peak;
  }
}

void WeightMatrix::validate() const {
  const Index p = rows(), q = cols();
  if (p < 1 || q < 1) throw DomainError("weights: empty grid");
  if (phases_rad.rows() != p || phases_rad.cols() != q ||
      active.rows() != p || active.cols() != q)
    throw DomainError("weights: amplitude/phase/mask shapes disagree");
  if (!(per_element_power_w > 0.0) || !std::isfinite(per_element_power_w))
    throw DomainError("weights: per-element power must be positive");
  double peak = 0.0;
  bool any_active = false;
  for (Index j = 0; j < q; ++j) {
    for (Index i = 0; i < p; ++i) {
      const double a = amplitudes(i, j);
      const double ph = phases_rad(i, j);
      if (!std::isfinite(a) || !std::isfinite(ph))
        throw DomainError("weights: non-finite entry");
      if (!active(i, j)) {
        if (a != 0.0)
          throw DomainError("weights: inactive element with nonzero amplitude");
        continue;
      }
      any_active = true;
      if (a < 0.0) throw DomainError("weights: negative amplitude");
      if (ph < -kPi || ph >= kPi)
        throw DomainError("weights: phase not wrapped to [-pi, pi)");
      peak = std::max(peak, a);
    }
  }
  if (!any_active) throw DomainError("weights: no active elements");
  if (std::abs(peak - 1.0) > 1e-12)
    throw DomainError("weights: max active amplitude must be 1");
}

WeightMatrix WeightMatrix::uniform(Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw DomainError("weights: empty grid");
  WeightMatrix w;
  w.amplitudes = ArrayXXd::Ones(rows, cols);
  w.phases_rad = ArrayXXd::Zero(rows, cols);
  w.active = ArrayXXb::Constant(rows, cols, true);
  w.per_element_power_w = 1.0;
  return w;
}

}  // namespace beamsel
