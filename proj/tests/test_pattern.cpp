#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "beamsel/errors.hpp"
#include "beamsel/pattern.hpp"
#include "beamsel/rng.hpp"
#include "beamsel/synthesis.hpp"
#include "beamsel/weights.hpp"
#include "oracles.hpp"

using namespace beamsel;

namespace {

/// Small array so the direct-summation oracle stays affordable.
ArrayGeometry small_geometry(int rows = 5, int cols = 4) {
  ArrayGeometry g;
  g.carrier_frequency_hz = 19.0e9;
  g.wavelength_m = kSpeedOfLight / g.carrier_frequency_hz;
  g.chain_rows = rows;
  g.chain_cols = cols;
  g.elements_per_subarray = 2;
  g.element_pitch_m = 0.6 * g.wavelength_m;
  g.subarray_pitch_m = 1.2 * g.wavelength_m;
  g.efficiency = 0.9;
  g.element_exponent = 1.0;
  return g;
}

WeightMatrix random_matrix(Rng& rng, Index rows, Index cols) {
  WeightMatrix w = WeightMatrix::uniform(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      w.amplitudes(i, j) = rng.next_double(0.1, 1.0);
      w.phases_rad(i, j) = rng.next_double(-kPi, kPi);
      w.active(i, j) = rng.next_double() > 0.2;
    }
  if (!w.active.any()) w.active(0, 0) = true;
  w.per_element_power_w = rng.next_double(0.5, 2.0);
  w.canonicalize();
  return w;
}

}  // namespace

TEST_CASE("direction conversions") {
  const Direction d = Direction::from_el_az_deg(3.0, -5.0);
  CHECK(d.u == doctest::Approx(std::sin(deg2rad(-5.0))));
  CHECK(d.v == doctest::Approx(std::sin(deg2rad(3.0))));

  const Direction t = Direction::from_theta_phi(d.theta_rad(), d.phi_rad());
  CHECK(t.u == doctest::Approx(d.u).epsilon(1e-12));
  CHECK(t.v == doctest::Approx(d.v).epsilon(1e-12));

  const Direction bs = Direction::from_el_az_deg(0.0, 0.0);
  CHECK(bs.theta_rad() == 0.0);
  CHECK(bs.cos_theta() == 1.0);
}

TEST_CASE("array factor magnitude matches direct summation") {
  Rng rng(4242);
  const ArrayGeometry g = small_geometry();
  for (int trial = 0; trial < 10; ++trial) {
    const WeightMatrix w = random_matrix(rng, g.chain_rows, g.chain_cols);
    for (int s = 0; s < 20; ++s) {
      const double u = rng.next_double(-0.7, 0.7);
      const double v = rng.next_double(-0.7, 0.7);
      if (u * u + v * v >= 0.98) continue;
      const Complex af =
          array_factor(g, w, Direction{u, v}.theta_rad(),
                       Direction{u, v}.phi_rad());
      const double want = oracles::direct_power(g, w, u, v);
      CHECK(std::norm(af) == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("array factor respects the element exponent") {
  Rng rng(7);
  ArrayGeometry g = small_geometry();
  const WeightMatrix w = random_matrix(rng, g.chain_rows, g.chain_cols);
  const Direction d = Direction::from_el_az_deg(14.0, 9.0);

  g.element_exponent = 0.0;
  const double p0 = std::norm(array_factor(g, w, d));
  g.element_exponent = 1.0;
  const double p1 = std::norm(array_factor(g, w, d));
  // One power of cos(theta) in amplitude is cos^2 in power.
  const double ct = d.cos_theta();
  CHECK(p1 / p0 == doctest::Approx(ct * ct).epsilon(1e-12));
}

TEST_CASE("cuts agree with the dense direct scan") {
  Rng rng(11);
  const ArrayGeometry g = small_geometry();
  const WeightMatrix w = random_matrix(rng, g.chain_rows, g.chain_cols);

  for (CutKind kind : {CutKind::azimuth, CutKind::elevation}) {
    const double fixed = 2.0;  // held elevation for az cuts, azimuth for el
    const PatternCut cut =
        kind == CutKind::azimuth
            ? compute_cut(g, w, kind, fixed, 0.0, 20.0, 0.05)
            : compute_cut(g, w, kind, 0.0, fixed, 20.0, 0.05);
    std::vector<double> angles(static_cast<std::size_t>(cut.size()));
    for (Index i = 0; i < cut.size(); ++i)
      angles[static_cast<std::size_t>(i)] = cut.angle_deg(i);
    const std::vector<double> want =
        oracles::direct_cut_db(g, w, kind, fixed, angles);
    for (Index i = 0; i < cut.size(); ++i) {
      if (want[static_cast<std::size_t>(i)] < -200.0) continue;  // noise floor
      CHECK(cut.mag_db(i) ==
            doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(5e-7));
    }
  }
}

TEST_CASE("cut peak is exactly 0 dB") {
  Rng rng(12);
  const ArrayGeometry g = small_geometry();
  const WeightMatrix w = random_matrix(rng, g.chain_rows, g.chain_cols);
  const PatternCut cut =
      compute_cut(g, w, CutKind::azimuth, 0.0, 0.0, 15.0, 0.02);
  CHECK(cut.mag_db.maxCoeff() == 0.0);
}

TEST_CASE("cut argument guards") {
  const ArrayGeometry g = ArrayGeometry::standard();
  const WeightMatrix w =
      WeightMatrix::uniform(g.chain_rows, g.chain_cols);
  CHECK_THROWS_AS(compute_cut(g, w, CutKind::azimuth, 0.0, 0.0, 1.0, 0.0),
                  DomainError);
  CHECK_THROWS_AS(compute_cut(g, w, CutKind::azimuth, 0.0, 0.0, 0.05, 0.01),
                  DomainError);
  CHECK_THROWS_AS(compute_cut(g, w, CutKind::azimuth, 0.0, 85.0, 8.0, 0.01),
                  DomainError);
  CHECK_THROWS_AS(compute_cut(g, w, CutKind::azimuth, 0.0, 0.0, 80.0, 1e-6),
                  ResourceError);
  WeightMatrix mismatched = WeightMatrix::uniform(4, 4);
  CHECK_THROWS_AS(compute_cut(g, mismatched, CutKind::azimuth, 0.0, 0.0),
                  DomainError);
}

TEST_CASE("beamwidth of the reference uniform aperture") {
  const ArrayGeometry g = ArrayGeometry::standard();
  const WeightMatrix w =
      WeightMatrix::uniform(g.chain_rows, g.chain_cols);
  const PatternCut cut =
      compute_cut(g, w, CutKind::azimuth, 0.0, 0.0, 2.0, 0.005);
  const double bw = measure_beamwidth(cut);

  // Independent scan with the shared crossing logic from the test oracle.
  std::vector<double> angles(static_cast<std::size_t>(cut.size()));
  for (Index i = 0; i < cut.size(); ++i)
    angles[static_cast<std::size_t>(i)] = cut.angle_deg(i);
  const std::vector<double> db =
      oracles::direct_cut_db(g, w, CutKind::azimuth, 0.0, angles);
  CHECK(bw == doctest::Approx(oracles::scan_beamwidth_deg(db, angles))
                  .epsilon(1e-6));

  // 0.886 lambda / L radians for a long uniform aperture of 144 elements.
  const double l = 144.0 * g.element_pitch_m;
  CHECK(bw == doctest::Approx(rad2deg(0.886 * g.wavelength_m / l))
                  .epsilon(0.02));
}

TEST_CASE("beamwidth failures are loud") {
  const ArrayGeometry g = ArrayGeometry::standard();
  const WeightMatrix w =
      WeightMatrix::uniform(g.chain_rows, g.chain_cols);
  // Peak outside the cut: the edge sample is the maximum.
  const PatternCut off =
      compute_cut(g, w, CutKind::azimuth, 0.0, 5.0, 2.0, 0.01);
  CHECK_THROWS_AS(measure_beamwidth(off), MeasurementError);
  // Cut narrower than the main lobe: no -3 dB crossing.
  const PatternCut narrow =
      compute_cut(g, w, CutKind::azimuth, 0.0, 0.0, 0.1, 0.01);
  CHECK_THROWS_AS(measure_beamwidth(narrow), MeasurementError);
}

TEST_CASE("uniform taper measures the classic -13.26 dB sidelobe") {
  const ArrayGeometry g = ArrayGeometry::standard();
  const WeightMatrix w =
      WeightMatrix::uniform(g.chain_rows, g.chain_cols);
  const PatternCut cut =
      compute_cut(g, w, CutKind::azimuth, 0.0, 0.0, 8.7, 0.01);
  const double sll = measure_sll(cut, SllWindow::for_geometry(g));
  CHECK(sll == doctest::Approx(-13.26).epsilon(0.01));
}

TEST_CASE("grating lobes are excluded from the sidelobe search") {
  const ArrayGeometry g = ArrayGeometry::standard();
  SynthesisParams p;
  p.steer_theta_rad = deg2rad(8.0);
  p.steer_phi_rad = 0.0;  // along +u, an azimuth steer
  p.taper_sll_az_db = -13.0;
  p.taper_sll_el_db = -13.0;
  p.active_rows = g.chain_rows;
  p.active_cols = g.chain_cols;
  const WeightMatrix w = synthesize(g, p);

  // Wide cut that contains both first-order grating lobes (about -8.4 and
  // +25.2 degrees for an 8-degree steer at 3.5-wavelength pitch).
  const PatternCut cut =
      compute_cut(g, w, CutKind::azimuth, 0.0, 8.0, 30.0, 0.01);
  const double sll = measure_sll(cut, SllWindow::for_geometry(g));
  // Without the exclusions the near grating lobe (a few dB down at most)
  // would swamp the real sidelobes.
  CHECK(sll < -12.0);
  CHECK(sll > -15.0);
}

TEST_CASE("directivity of the uniform aperture sits at the area bound") {
  const ArrayGeometry g = ArrayGeometry::standard();
  const WeightMatrix w =
      WeightMatrix::uniform(g.chain_rows, g.chain_cols);
  const double d = directivity_dbi(g, w, 0.0, 0.0);
  const double side = 144.0 * g.element_pitch_m;
  const double bound =
      10.0 * std::log10(4.0 * kPi * side * side /
                        (g.wavelength_m * g.wavelength_m));
  CHECK(d <= bound + 1e-6);
  CHECK(d > bound - 0.15);
}

TEST_CASE("directivity integral agrees with dense direct quadrature") {
  Rng rng(21);
  const ArrayGeometry g = small_geometry(6, 6);
  const WeightMatrix w = random_matrix(rng, 6, 6);
  const double fast = directivity_dbi(g, w, 0.0, 0.0);

  const double integral = oracles::direct_hemisphere_integral(g, w, 384, 512);
  const double num = std::norm(array_factor(g, w, 0.0, 0.0));
  const double want = 10.0 * std::log10(4.0 * kPi * num / integral);
  CHECK(fast == doctest::Approx(want).epsilon(0.01));
}

TEST_CASE("eirp stacks radiated power on directivity") {
  const ArrayGeometry g = ArrayGeometry::standard();
  WeightMatrix w = WeightMatrix::uniform(g.chain_rows, g.chain_cols);
  w.per_element_power_w = 2.5;
  const double d = directivity_dbi(g, w, 0.0, 0.0);
  const double eirp = compute_eirp(g, w, 0.0, 0.0);
  CHECK(eirp ==
        doctest::Approx(10.0 * std::log10(2.5 * 1296.0) + d).epsilon(1e-9));
}

TEST_CASE("tapering trades directivity for sidelobes") {
  const ArrayGeometry g = ArrayGeometry::standard();
  SynthesisParams p;
  p.taper_sll_az_db = -30.0;
  p.taper_sll_el_db = -30.0;
  p.active_rows = g.chain_rows;
  p.active_cols = g.chain_cols;
  const WeightMatrix tapered = synthesize(g, p);
  const WeightMatrix flat =
      WeightMatrix::uniform(g.chain_rows, g.chain_cols);
  CHECK(directivity_dbi(g, tapered, 0.0, 0.0) <
        directivity_dbi(g, flat, 0.0, 0.0));
}

TEST_CASE("measure_metrics bundles cuts and the power integral") {
  const ArrayGeometry g = ArrayGeometry::standard();
  SynthesisParams p;
  p.steer_theta_rad = deg2rad(3.0);
  p.steer_phi_rad = deg2rad(90.0);  // elevation steer
  p.taper_sll_az_db = -25.0;
  p.taper_sll_el_db = -25.0;
  p.active_rows = g.chain_rows;
  p.active_cols = g.chain_cols;
  const WeightMatrix w = synthesize(g, p);

  MeasurementConfig cfg;
  cfg.cut_half_span_deg = 3.0;
  const PatternMetrics m = measure_metrics(g, w, 3.0, 0.0, cfg);
  CHECK(m.beamwidth_az_deg == doctest::Approx(0.456).epsilon(0.02));
  CHECK(m.beamwidth_el_deg == doctest::Approx(0.456).epsilon(0.03));
  CHECK(m.sll_az_db == doctest::Approx(-25.0).epsilon(0.01));
  // Steering in elevation tilts the boresight-locked subarray/element
  // envelope across the cut: sidelobes on the boresight side ride up by
  // the envelope droop at the steer angle, so the elevation SLL sits above
  // the taper design level by exactly that amount.
  const auto envelope_db = [&](double theta_rad) {
    const double psi = 2.0 * kPi * (g.element_pitch_m / g.wavelength_m) *
                       std::sin(theta_rad);
    const int n = g.elements_per_subarray;
    const double s =
        psi == 0.0 ? 1.0 : std::sin(0.5 * n * psi) / (n * std::sin(0.5 * psi));
    return 20.0 * std::log10(std::abs(s)) +
           20.0 * g.element_exponent * std::log10(std::cos(theta_rad));
  };
  CHECK(m.sll_el_db ==
        doctest::Approx(-25.0 - envelope_db(deg2rad(3.0))).epsilon(0.01));
  CHECK(m.peak_el_deg == doctest::Approx(3.0).epsilon(0.01));
  CHECK(std::abs(m.peak_az_deg) < 0.01);
  CHECK(m.eirp_dbw ==
        doctest::Approx(10.0 * std::log10(w.radiated_power_w()) +
                        m.directivity_dbi)
            .epsilon(1e-9));
}

TEST_CASE("quadrature grid guards") {
  const ArrayGeometry g = ArrayGeometry::standard();
  const WeightMatrix w =
      WeightMatrix::uniform(g.chain_rows, g.chain_cols);
  QuadratureGrid bad;
  bad.n_theta = 2;
  CHECK_THROWS_AS(directivity_dbi(g, w, 0.0, 0.0, bad), DomainError);
  bad = QuadratureGrid{};
  bad.panel_fraction = 1.5;
  CHECK_THROWS_AS(directivity_dbi(g, w, 0.0, 0.0, bad), DomainError);
}
