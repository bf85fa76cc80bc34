#include "beamsel/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beamsel/errors.hpp"

namespace beamsel {

namespace {

// Samples 80 dB below the cut peak saturate many plots; 400 dB keeps exact
// nulls finite without pretending they carry pattern information.
constexpr double kCutFloorDb = -400.0;

void check_grid_match(const ArrayGeometry& g, const WeightMatrix& w) {
  if (w.rows() != g.chain_rows || w.cols() != g.chain_cols)
    throw DomainError("pattern: weight grid does not match geometry");
}

/// Axis factor of one uniform subarray: sum of unit phasors at centered
/// element offsets. Imaginary parts cancel by symmetry, so it is a plain
/// cosine sum and may go negative between lobes.
double subarray_axis(double k_element_pitch, int n, double s) {
  double acc = 0.0;
  const double c = 0.5 * static_cast<double>(n - 1);
  for (int t = 0; t < n; ++t)
    acc += std::cos(k_element_pitch * (static_cast<double>(t) - c) * s);
  return acc;
}

void subarray_axis_into(double k_element_pitch, int n, const ArrayXd& s,
                        ArrayXd& out) {
  const double c = 0.5 * static_cast<double>(n - 1);
  out.setZero(s.size());
  for (int t = 0; t < n; ++t) {
    const double off = static_cast<double>(t) - c;
    if (off > 0.0)
      out += 2.0 * (k_element_pitch * off * s).cos();
    else if (off == 0.0)
      out += 1.0;
  }
}

/// Evaluates sum_j c(j) * z^j elementwise. Centered-index base phasors are
/// deliberately dropped throughout this file: they have unit modulus and
/// factor out of every sum, and only |AF| is ever consumed here.
void horner_into(const VectorXcd& c, const ArrayXcd& z, ArrayXcd& out) {
  const Index m = c.size();
  out.setConstant(z.size(), c(m - 1));
  for (Index j = m - 2; j >= 0; --j) out = out * z + c(j);
}

Complex horner_scalar(const VectorXcd& c, Complex z) {
  Complex acc = c(c.size() - 1);
  for (Index j = c.size() - 2; j >= 0; --j) acc = acc * z + c(j);
  return acc;
}

struct ThetaNodes {
  ArrayXd theta_rad;
  ArrayXd weight;  // includes the d-theta factor
};

void append_trapezoid_panel(double a, double b, int n, ThetaNodes& nodes) {
  const Index base = nodes.theta_rad.size();
  nodes.theta_rad.conservativeResize(base + n);
  nodes.weight.conservativeResize(base + n);
  const double h = (b - a) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) {
    nodes.theta_rad(base + i) = a + h * static_cast<double>(i);
    nodes.weight(base + i) = (i == 0 || i == n - 1) ? 0.5 * h : h;
  }
}

ThetaNodes build_theta_nodes(const QuadratureGrid& grid) {
  if (grid.n_theta < 8 || grid.n_phi < 8)
    throw DomainError("quadrature: grid too small to mean anything");
  if (!(grid.panel_split_deg > 0.0) || !(grid.panel_split_deg < 90.0))
    throw DomainError("quadrature: panel split must lie in (0, 90) degrees");
  if (!(grid.panel_fraction > 0.0) || !(grid.panel_fraction < 1.0))
    throw DomainError("quadrature: panel fraction must lie in (0, 1)");
  const int n1 = std::max(
      2, static_cast<int>(std::llround(grid.panel_fraction * grid.n_theta)));
  const int n2 = std::max(2, grid.n_theta - n1);
  ThetaNodes nodes;
  append_trapezoid_panel(0.0, deg2rad(grid.panel_split_deg), n1, nodes);
  append_trapezoid_panel(deg2rad(grid.panel_split_deg), 0.5 * kPi, n2, nodes);
  return nodes;
}

/// Integral of |AF_total|^2 sin(theta) over the visible hemisphere.
/// The chain-grid sum is evaluated through a thin SVD of the excitation:
/// steering-phase-times-separable-taper matrices have rank 1 (plus one per
/// injected null), so each theta row costs a handful of 1-D Horner sweeps
/// instead of a dense 2-D sum per direction.
double pattern_power_integral(const ArrayGeometry& g, const WeightMatrix& w,
                              const QuadratureGrid& grid) {
  const ThetaNodes nodes = build_theta_nodes(grid);
  const int nphi = grid.n_phi;
  const double dphi = 2.0 * kPi / static_cast<double>(nphi);

  const MatrixXcd e = w.excitation();
  Eigen::JacobiSVD<MatrixXcd> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  Index rank = 1;
  while (rank < sv.size() && sv(rank) > sv(0) * 1e-12) ++rank;

  const double k = g.wavenumber();
  const double kdx = k * g.subarray_pitch_m;
  const double kep = k * g.element_pitch_m;
  const double two_q = 2.0 * g.element_exponent;

  ArrayXd cphi(nphi), sphi(nphi);
  for (int t = 0; t < nphi; ++t) {
    const double phi = dphi * static_cast<double>(t);
    cphi(t) = std::cos(phi);
    sphi(t) = std::sin(phi);
  }

  ArrayXd u(nphi), v(nphi), sfx(nphi), sfy(nphi), arg(nphi);
  ArrayXcd zx(nphi), zy(nphi), acc(nphi), termx(nphi), termy(nphi);

  double integral = 0.0;
  for (Index it = 0; it < nodes.theta_rad.size(); ++it) {
    const double theta = nodes.theta_rad(it);
    const double st = std::sin(theta);
    const double ct = std::cos(theta);

    u = st * cphi;
    v = st * sphi;
    arg = kdx * u;
    zx.real() = arg.cos();
    zx.imag() = arg.sin();
    arg = kdx * v;
    zy.real() = arg.cos();
    zy.imag() = arg.sin();

    acc.setZero(nphi);
    for (Index r = 0; r < rank; ++r) {
      // E = U S V^H, so E(i,j) = sum_r s_r U(i,r) conj(V(j,r)); columns j
      // step along x (pairs with u), rows i along y (pairs with v).
      horner_into(svd.matrixV().col(r).conjugate(), zx, termx);
      horner_into(svd.matrixU().col(r), zy, termy);
      acc += sv(r) * termx * termy;
    }

    subarray_axis_into(kep, g.elements_per_subarray, u, sfx);
    subarray_axis_into(kep, g.elements_per_subarray, v, sfy);

    const double elem2 = std::pow(std::max(ct, 0.0), two_q);
    const double row =
        (acc.abs2() * (sfx * sfy).square()).sum() * elem2;
    integral += nodes.weight(it) * st * dphi * row;
  }
  return integral;
}

double refine_peak_angle(const PatternCut& cut, Index pk) {
  if (pk <= 0 || pk + 1 >= cut.size()) return cut.angle_deg(pk);
  const double l = cut.mag_db(pk - 1);
  const double c = cut.mag_db(pk);
  const double r = cut.mag_db(pk + 1);
  const double denom = l - 2.0 * c + r;
  if (denom >= 0.0) return cut.angle_deg(pk);  // not a proper max
  double delta = 0.5 * (l - r) / denom;
  delta = std::clamp(delta, -1.0, 1.0);
  return cut.angle_deg(pk) + delta * cut.step_deg;
}

}  // namespace

Direction Direction::from_el_az_deg(double el_deg, double az_deg) {
  return Direction{std::sin(deg2rad(az_deg)), std::sin(deg2rad(el_deg))};
}

Direction Direction::from_theta_phi(double theta_rad, double phi_rad) {
  const double st = std::sin(theta_rad);
  return Direction{st * std::cos(phi_rad), st * std::sin(phi_rad)};
}

double Direction::theta_rad() const {
  return std::asin(std::min(1.0, std::hypot(u, v)));
}

double Direction::phi_rad() const {
  return (u == 0.0 && v == 0.0) ? 0.0 : std::atan2(v, u);
}

double Direction::cos_theta() const {
  return std::sqrt(std::max(0.0, 1.0 - u * u - v * v));
}

Complex array_factor(const ArrayGeometry& g, const WeightMatrix& w,
                     const Direction& d) {
  g.validate();
  check_grid_match(g, w);
  const double k = g.wavenumber();
  const double dxy = g.subarray_pitch_m;
  const Index p = w.rows(), q = w.cols();
  const double cy = 0.5 * static_cast<double>(p - 1);
  const double cx = 0.5 * static_cast<double>(q - 1);

  Complex acc(0.0, 0.0);
  for (Index i = 0; i < p; ++i) {
    const double y = (static_cast<double>(i) - cy) * dxy;
    for (Index j = 0; j < q; ++j) {
      if (!w.active(i, j)) continue;
      const double x = (static_cast<double>(j) - cx) * dxy;
      const double ph = w.phases_rad(i, j) + k * (x * d.u + y * d.v);
      acc += std::polar(w.amplitudes(i, j), ph);
    }
  }
  const double kep = k * g.element_pitch_m;
  const double sf = subarray_axis(kep, g.elements_per_subarray, d.u) *
                    subarray_axis(kep, g.elements_per_subarray, d.v);
  const double elem = std::pow(d.cos_theta(), g.element_exponent);
  return acc * (sf * elem);
}

Complex array_factor(const ArrayGeometry& g, const WeightMatrix& w,
                     double theta_rad, double phi_rad) {
  return array_factor(g, w, Direction::from_theta_phi(theta_rad, phi_rad));
}

PatternCut compute_cut(const ArrayGeometry& g, const WeightMatrix& w,
                       CutKind kind, double center_el_deg,
                       double center_az_deg, double half_span_deg,
                       double step_deg) {
  g.validate();
  check_grid_match(g, w);
  if (!(step_deg > 0.0)) throw DomainError("cut: step must be positive");
  if (half_span_deg < 10.0 * step_deg)
    throw DomainError("cut: half-span must cover at least 10 steps");
  const double center =
      kind == CutKind::azimuth ? center_az_deg : center_el_deg;
  const double fixed = kind == CutKind::azimuth ? center_el_deg : center_az_deg;
  if (std::abs(center) + half_span_deg >= 90.0 || std::abs(fixed) >= 90.0)
    throw DomainError("cut: span reaches past the visible hemisphere");
  const long long n_half = std::llround(half_span_deg / step_deg);
  const long long n = 2 * n_half + 1;
  if (n > 10'000'000)
    throw ResourceError("cut: more than 1e7 samples requested");

  const double k = g.wavenumber();
  const double kdx = k * g.subarray_pitch_m;
  const double kep = k * g.element_pitch_m;
  const MatrixXcd e = w.excitation();
  const double fixed_s = std::sin(deg2rad(fixed));

  // Collapse the fixed axis once; the sweep is then a 1-D Horner sum.
  VectorXcd coll;
  if (kind == CutKind::azimuth) {
    coll.resize(e.cols());
    for (Index j = 0; j < e.cols(); ++j) {
      Complex s(0.0, 0.0);
      for (Index i = 0; i < e.rows(); ++i)
        s += e(i, j) * std::polar(1.0, kdx * fixed_s * static_cast<double>(i));
      coll(j) = s;
    }
  } else {
    coll.resize(e.rows());
    for (Index i = 0; i < e.rows(); ++i) {
      Complex s(0.0, 0.0);
      for (Index j = 0; j < e.cols(); ++j)
        s += e(i, j) * std::polar(1.0, kdx * fixed_s * static_cast<double>(j));
      coll(i) = s;
    }
  }
  const double sf_fixed = subarray_axis(kep, g.elements_per_subarray, fixed_s);

  PatternCut cut;
  cut.kind = kind;
  cut.fixed_angle_deg = fixed;
  cut.step_deg = step_deg;
  cut.start_deg = center - step_deg * static_cast<double>(n_half);
  cut.mag_db.resize(n);

  ArrayXd power(n);
  for (long long s = 0; s < n; ++s) {
    const double ang = cut.angle_deg(s);
    const double sweep_s = std::sin(deg2rad(ang));
    const double uu = kind == CutKind::azimuth ? sweep_s : fixed_s;
    const double vv = kind == CutKind::azimuth ? fixed_s : sweep_s;
    const Complex z = std::polar(1.0, kdx * sweep_s);
    const Complex af = horner_scalar(coll, z);
    const double sf = sf_fixed * subarray_axis(kep, g.elements_per_subarray,
                                               sweep_s);
    const double ct2 = std::max(0.0, 1.0 - uu * uu - vv * vv);
    const double elem2 = std::pow(ct2, g.element_exponent);  // cos^2q
    power(s) = std::norm(af) * sf * sf * elem2;
  }

  Index pk = 0;
  const double pmax = power.maxCoeff(&pk);
  if (!(pmax > 0.0))
    throw DomainError("cut: pattern is identically zero along the cut");
  const double ref_db = 10.0 * std::log10(pmax);
  for (Index i = 0; i < n; ++i) {
    const double p = power(i);
    cut.mag_db(i) =
        p > 0.0 ? std::max(10.0 * std::log10(p) - ref_db, kCutFloorDb)
                : kCutFloorDb;
  }
  return cut;
}

double measure_beamwidth(const PatternCut& cut) {
  const Index n = cut.size();
  if (n < 3) throw MeasurementError("beamwidth: cut has too few samples");
  Index pk = 0;
  cut.mag_db.maxCoeff(&pk);
  if (pk == 0 || pk == n - 1)
    throw MeasurementError("beamwidth: cut peak sits on the span edge");

  auto crossing = [&](Index from, Index step) -> double {
    for (Index i = from + step; i >= 0 && i < n; i += step) {
      if (cut.mag_db(i) < -3.0) {
        const double m0 = cut.mag_db(i - step);
        const double m1 = cut.mag_db(i);
        const double t = (-3.0 - m0) / (m1 - m0);
        return cut.angle_deg(i - step) +
               t * (cut.angle_deg(i) - cut.angle_deg(i - step));
      }
    }
    throw MeasurementError("beamwidth: no -3 dB crossing inside the cut");
  };
  const double left = crossing(pk, -1);
  const double right = crossing(pk, +1);
  return right - left;
}

double measure_sll(const PatternCut& cut, const SllWindow& window) {
  if (!(window.period_u > 0.0) || !(window.span_periods > 0.0))
    throw DomainError("sll: window period and span must be positive");
  const Index n = cut.size();
  if (n < 5) throw MeasurementError("sll: cut has too few samples");
  Index pk = 0;
  cut.mag_db.maxCoeff(&pk);
  if (pk == 0 || pk == n - 1)
    throw MeasurementError("sll: cut peak sits on the span edge");

  Index left = pk;
  while (left > 0 && cut.mag_db(left - 1) < cut.mag_db(left)) --left;
  Index right = pk;
  while (right + 1 < n && cut.mag_db(right + 1) < cut.mag_db(right)) ++right;

  auto u_of = [](double ang_deg) { return std::sin(deg2rad(ang_deg)); };
  const double u_pk = u_of(cut.angle_deg(pk));
  const double half_excl =
      0.5 * (u_of(cut.angle_deg(right)) - u_of(cut.angle_deg(left)));
  const double span_u = window.period_u * window.span_periods;

  double best = -std::numeric_limits<double>::infinity();
  for (Index i = 1; i + 1 < n; ++i) {
    if (i >= left && i <= right) continue;  // main lobe
    const double du = std::abs(u_of(cut.angle_deg(i)) - u_pk);
    if (du > span_u) continue;
    const double m = std::round(du / window.period_u);
    if (m >= 1.0 && std::abs(du - m * window.period_u) < half_excl)
      continue;  // grating-lobe neighborhood
    if (cut.mag_db(i) >= cut.mag_db(i - 1) && cut.mag_db(i) >= cut.mag_db(i + 1))
      best = std::max(best, cut.mag_db(i));
  }
  if (!std::isfinite(best))
    throw MeasurementError("sll: no sidelobe inside the search window");
  return best;
}

double directivity_dbi(const ArrayGeometry& g, const WeightMatrix& w,
                       double steer_el_deg, double steer_az_deg,
                       const QuadratureGrid& grid) {
  g.validate();
  check_grid_match(g, w);
  if (w.active_count() < 1) throw DomainError("directivity: all-inactive matrix");
  const double num =
      std::norm(array_factor(g, w, Direction::from_el_az_deg(steer_el_deg,
                                                             steer_az_deg)));
  if (!(num > 0.0))
    throw MeasurementError("directivity: pattern is zero toward the steer");
  const double integral = pattern_power_integral(g, w, grid);
  return 10.0 * std::log10(4.0 * kPi * num / integral);
}

double compute_eirp(const ArrayGeometry& g, const WeightMatrix& w,
                    double steer_el_deg, double steer_az_deg,
                    const QuadratureGrid& grid) {
  if (w.active_count() < 1) throw DomainError("eirp: all-inactive matrix");
  const double prad = w.radiated_power_w();
  if (!(prad > 0.0)) throw DomainError("eirp: radiated power is zero");
  return 10.0 * std::log10(prad) +
         directivity_dbi(g, w, steer_el_deg, steer_az_deg, grid);
}

PatternMetrics measure_metrics(const ArrayGeometry& g, const WeightMatrix& w,
                               double center_el_deg, double center_az_deg,
                               const MeasurementConfig& cfg) {
  const PatternCut az = compute_cut(g, w, CutKind::azimuth, center_el_deg,
                                    center_az_deg, cfg.cut_half_span_deg,
                                    cfg.cut_step_deg);
  const PatternCut el = compute_cut(g, w, CutKind::elevation, center_el_deg,
                                    center_az_deg, cfg.cut_half_span_deg,
                                    cfg.cut_step_deg);
  const SllWindow window =
      cfg.sll_window.period_u > 0.0 ? cfg.sll_window : SllWindow::for_geometry(g);

  PatternMetrics m;
  m.beamwidth_az_deg = measure_beamwidth(az);
  m.beamwidth_el_deg = measure_beamwidth(el);
  m.sll_az_db = measure_sll(az, window);
  m.sll_el_db = measure_sll(el, window);
  m.directivity_dbi =
      directivity_dbi(g, w, center_el_deg, center_az_deg, cfg.quadrature);
  m.eirp_dbw = 10.0 * std::log10(w.radiated_power_w()) + m.directivity_dbi;

  Index pk_az = 0, pk_el = 0;
  az.mag_db.maxCoeff(&pk_az);
  el.mag_db.maxCoeff(&pk_el);
  m.peak_az_deg = refine_peak_angle(az, pk_az);
  m.peak_el_deg = refine_peak_angle(el, pk_el);
  return m;
}

}  // namespace beamsel
