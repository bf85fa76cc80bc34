#include "beamsel/synthesis.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "beamsel/errors.hpp"

namespace beamsel {

ArrayXXd steering_phases(const ArrayGeometry& g, double theta0_rad,
                         double phi0_rad, Index rows, Index cols) {
  g.validate();
  if (rows < 1 || cols < 1)
    throw DomainError("steering: aperture must be at least 1x1");
  if (rows > g.chain_rows || cols > g.chain_cols)
    throw DomainError("steering: aperture exceeds the chain grid");
  if (!(theta0_rad >= 0.0) || theta0_rad >= 0.5 * kPi)
    throw DomainError("steering: scan angle must lie in [0, pi/2)");

  const double k = g.wavenumber();
  const double d = g.subarray_pitch_m;
  const double u0 = std::sin(theta0_rad) * std::cos(phi0_rad);
  const double v0 = std::sin(theta0_rad) * std::sin(phi0_rad);
  const double cy = 0.5 * static_cast<double>(rows - 1);
  const double cx = 0.5 * static_cast<double>(cols - 1);

  ArrayXXd phases(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const double y = (static_cast<double>(i) - cy) * d;
    for (Index j = 0; j < cols; ++j) {
      const double x = (static_cast<double>(j) - cx) * d;
      phases(i, j) = wrap_phase(-k * (x * u0 + y * v0));
    }
  }
  return phases;
}

ArrayXd chebyshev_taper(Index m, double design_sll_db) {
  if (m < 2) throw DomainError("taper: need at least 2 elements");
  if (!(design_sll_db < 0.0))
    throw DomainError("taper: design sidelobe level must be negative dB");
  if (m == 2 || design_sll_db >= kUniformSllDb) return ArrayXd::Ones(m);

  // Pattern polynomial zeros on the unit circle: psi_i maps the Chebyshev
  // zeros cos((2i-1)pi/(2(m-1)))/x0 back through the psi <-> x substitution.
  const double ratio = std::pow(10.0, -design_sll_db / 20.0);
  const double x0 =
      std::cosh(std::acosh(ratio) / static_cast<double>(m - 1));
  std::vector<Complex> poly{Complex(1.0, 0.0)};
  poly.reserve(static_cast<std::size_t>(m));
  for (Index i = 1; i < m; ++i) {
    const double arg =
        std::cos((2.0 * static_cast<double>(i) - 1.0) * kPi /
                 (2.0 * static_cast<double>(m - 1))) /
        x0;
    const double psi = 2.0 * std::acos(arg);
    const Complex root = std::polar(1.0, psi);
    // Multiply the polynomial by (z - root).
    poly.push_back(Complex(0.0, 0.0));
    for (std::size_t t = poly.size() - 1; t > 0; --t)
      poly[t] = poly[t - 1] - root * poly[t];
    poly[0] *= -root;
  }

  ArrayXd coeff(m);
  for (Index i = 0; i < m; ++i) coeff(i) = poly[static_cast<std::size_t>(i)].real();
  // The zeros come in conjugate pairs, so the coefficients are real and
  // symmetric up to rounding; make the symmetry exact.
  for (Index i = 0; i < m / 2; ++i) {
    const double avg = 0.5 * (coeff(i) + coeff(m - 1 - i));
    coeff(i) = avg;
    coeff(m - 1 - i) = avg;
  }
  const double peak = coeff.maxCoeff();
  if (!(peak > 0.0)) throw DomainError("taper: degenerate coefficient set");
  return coeff / peak;
}

WeightMatrix inject_null(const ArrayGeometry& g, const WeightMatrix& w,
                         double null_theta_rad, double null_phi_rad) {
  g.validate();
  if (w.rows() != g.chain_rows || w.cols() != g.chain_cols)
    throw DomainError("null: weight grid does not match geometry");
  if (w.active_count() < 2)
    throw DomainError("null: need at least two active elements");

  const ArrayXXd null_phases = steering_phases(g, null_theta_rad,
                                               null_phi_rad, w.rows(), w.cols());
  const MatrixXcd e = w.excitation();

  Complex sw(0.0, 0.0);  // <s, w> with conjugation on s
  double ss = 0.0;       // <s, s>
  double ww = 0.0;
  for (Index j = 0; j < w.cols(); ++j) {
    for (Index i = 0; i < w.rows(); ++i) {
      if (!w.active(i, j)) continue;
      const Complex s = std::polar(1.0, null_phases(i, j));
      sw += std::conj(s) * e(i, j);
      ss += 1.0;
      ww += std::norm(e(i, j));
    }
  }
  const double correlation = std::abs(sw) / std::sqrt(ss * ww);
  if (correlation >= 0.5)
    throw RejectionError(
        "null: direction overlaps the main lobe (correlation " +
        std::to_string(correlation) + ")");

  const Complex scale = sw / ss;
  WeightMatrix out = w;
  for (Index j = 0; j < w.cols(); ++j) {
    for (Index i = 0; i < w.rows(); ++i) {
      if (!out.active(i, j)) continue;
      const Complex ew = e(i, j) - scale * std::polar(1.0, null_phases(i, j));
      out.amplitudes(i, j) = std::abs(ew);
      out.phases_rad(i, j) = std::arg(ew);
    }
  }
  out.canonicalize();
  return out;
}

WeightMatrix synthesize(const ArrayGeometry& g, const SynthesisParams& params,
                        const TaperBounds& bounds) {
  g.validate();
  const Index p = g.chain_rows, q = g.chain_cols;
  if (params.active_rows < 1 || params.active_rows > p ||
      params.active_cols < 1 || params.active_cols > q)
    throw DomainError("synthesize: active window outside the chain grid");
  if (!(bounds.min_db < bounds.max_db) || !(bounds.max_db < 0.0))
    throw DomainError("synthesize: malformed taper bounds");
  for (double t : {params.taper_sll_az_db, params.taper_sll_el_db})
    if (t < bounds.min_db || t > bounds.max_db)
      throw DomainError("synthesize: taper level outside configured bounds");
  if (!(params.power_scale > 0.0))
    throw DomainError("synthesize: power scale must be positive");

  const ArrayXd row_taper =
      params.active_rows == 1
          ? ArrayXd::Ones(1)
          : chebyshev_taper(params.active_rows, params.taper_sll_el_db);
  const ArrayXd col_taper =
      params.active_cols == 1
          ? ArrayXd::Ones(1)
          : chebyshev_taper(params.active_cols, params.taper_sll_az_db);

  WeightMatrix w;
  w.amplitudes = ArrayXXd::Zero(p, q);
  // Steering phases are computed on the full grid so they encode the true
  // physical element positions whatever the mask parity does to the
  // window's geometric center.
  w.phases_rad = steering_phases(g, params.steer_theta_rad,
                                 params.steer_phi_rad, p, q);
  w.active = ArrayXXb::Constant(p, q, false);
  w.per_element_power_w = params.power_scale;

  const Index r0 = (p - params.active_rows) / 2;
  const Index c0 = (q - params.active_cols) / 2;
  for (Index ii = 0; ii < params.active_rows; ++ii) {
    for (Index jj = 0; jj < params.active_cols; ++jj) {
      w.active(r0 + ii, c0 + jj) = true;
      w.amplitudes(r0 + ii, c0 + jj) = row_taper(ii) * col_taper(jj);
    }
  }
  w.canonicalize();

  for (const NullDirection& nd : params.nulls)
    w = inject_null(g, w, nd.theta_rad, nd.phi_rad);
  return w;
}

}  // namespace beamsel
