#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scatloc/reference.hpp"
#include "scatloc/rng.hpp"
#include "scatloc/scatter.hpp"

using namespace scatloc;

namespace {

const std::vector<double> kAxis = fft_freq_axis(1024, 16000);

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd ca = a.array() - a.mean();
  const Eigen::VectorXd cb = b.array() - b.mean();
  return ca.dot(cb) / (ca.norm() * cb.norm());
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

/// Mean Pearson correlation between all pairs of squared-magnitude rows,
/// restricted to bins at or above the cutoff.
double mean_pairwise_correlation(const DirectionalResponseSet& set, double cutoff_hz) {
  std::vector<Eigen::Index> bins;
  for (std::size_t k = 0; k < set.freq_axis.size(); ++k)
    if (set.freq_axis[k] >= cutoff_hz) bins.push_back(static_cast<Eigen::Index>(k));
  const Eigen::Index d = set.num_directions();
  Eigen::MatrixXd rows(d, static_cast<Eigen::Index>(bins.size()));
  for (Eigen::Index i = 0; i < d; ++i)
    for (std::size_t k = 0; k < bins.size(); ++k)
      rows(i, static_cast<Eigen::Index>(k)) = set.mags(i, bins[k]) * set.mags(i, bins[k]);
  double acc = 0.0;
  int pairs = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      acc += pearson(rows.row(i).transpose(), rows.row(j).transpose());
      ++pairs;
    }
  return acc / pairs;
}

}  // namespace

TEST_SUITE("scatter") {
  TEST_CASE("unit impulse has a flat response") {
    const DirectionalResponseSet set =
        from_impulse_responses({{1.0}}, {0.0}, 16000, 1024);
    CHECK((set.mags.array() - 1.0).abs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("pure delay has a flat magnitude") {
    std::vector<double> ir(64, 0.0);
    ir.back() = 1.0;
    const DirectionalResponseSet set = from_impulse_responses({ir}, {0.0}, 16000, 1024);
    CHECK((set.mags.array() - 1.0).abs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("magnitudes match the brute-force DFT oracle") {
    Rng rng(31);
    std::vector<double> ir(200);
    for (double& v : ir) v = rng.gaussian();
    const DirectionalResponseSet set = from_impulse_responses({ir}, {0.0}, 16000, 1024);
    REQUIRE(set.num_bins() == 513);
    const Eigen::VectorXd want = reference::dft_magnitude(ir, 1024);
    for (Eigen::Index k = 0; k < 513; ++k)
      CHECK(std::abs(set.mags(0, k) - want(k)) <= 1e-9 * std::max(1.0, want(k)));
  }

  TEST_CASE("rough scatterer is flat below the cutoff") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(36, kAxis, 3000.0, 75.0, 10.0, 5);
    // 3000 Hz / (16000/1024) = bin 192: bins 0..191 are below the cutoff.
    for (Eigen::Index d = 0; d < 36; ++d)
      for (Eigen::Index k = 0; k < 192; ++k) CHECK(set.mags(d, k) == 1.0);
    CHECK(set.mags.col(192).minCoeff() != 1.0);
  }

  TEST_CASE("rough scatterer rows decorrelate above the cutoff") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(36, kAxis, 3000.0, 75.0, 10.0, 6);
    CHECK(mean_pairwise_correlation(set, 3000.0) < 0.5);
  }

  TEST_CASE("smooth scatterer has near-identical neighbors") {
    const DirectionalResponseSet set = synth_smooth_scatterer(36, kAxis, 6);
    for (Eigen::Index d = 0; d + 1 < 36; ++d)
      CHECK(cosine(set.mags.row(d).transpose(), set.mags.row(d + 1).transpose()) >= 0.95);
  }

  TEST_CASE("rough is less self-similar than smooth") {
    const DirectionalResponseSet rough =
        synth_rough_scatterer(36, kAxis, 3000.0, 75.0, 10.0, 7);
    const DirectionalResponseSet smooth = synth_smooth_scatterer(36, kAxis, 7);
    CHECK(mean_pairwise_correlation(rough, 3000.0) <
          mean_pairwise_correlation(smooth, 300.0));
  }

  TEST_CASE("single-direction smooth set is valid") {
    const DirectionalResponseSet set = synth_smooth_scatterer(1, kAxis, 8);
    CHECK(set.num_directions() == 1);
    CHECK(set.has_irs());
  }

  TEST_CASE("infinite roughness degenerates to identical directions") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(12, kAxis, 300.0, 1e9, 1e9, 9);
    for (Eigen::Index d = 1; d < 12; ++d)
      CHECK((set.mags.row(d) - set.mags.row(0)).cwiseAbs().maxCoeff() <= 1e-9);
  }

  TEST_CASE("impulse responses reproduce the stored magnitudes") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(8, kAxis, 3000.0, 75.0, 10.0, 10);
    CHECK(set.ir_consistency_error() <= 1e-9);
  }

  TEST_CASE("generation is deterministic per seed") {
    const DirectionalResponseSet a = synth_rough_scatterer(16, kAxis, 3000.0, 75.0, 10.0, 11);
    const DirectionalResponseSet b = synth_rough_scatterer(16, kAxis, 3000.0, 75.0, 10.0, 11);
    CHECK(a.mags == b.mags);
    CHECK(a.impulse_responses == b.impulse_responses);
    const DirectionalResponseSet c = synth_rough_scatterer(16, kAxis, 3000.0, 75.0, 10.0, 12);
    CHECK(a.mags != c.mags);
  }

  TEST_CASE("band 3000-8000 selects bins 192..512") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(4, kAxis, 3000.0, 75.0, 10.0, 13);
    const auto [restricted, band] = band_select(set, 3000.0, 8000.0);
    REQUIRE(band.bin_indices.size() == 321);
    CHECK(band.bin_indices.front() == 192);
    CHECK(band.bin_indices.back() == 512);
    CHECK(restricted.num_bins() == 321);
    CHECK(restricted.freq_axis.front() == 3000.0);
    CHECK(restricted.freq_axis.back() == 8000.0);
  }

  TEST_CASE("full band selection is the identity") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(4, kAxis, 3000.0, 75.0, 10.0, 14);
    const auto [restricted, band] = band_select(set, 0.0, 8000.0);
    CHECK(band.bin_indices.size() == 513);
    CHECK(restricted.mags == set.mags);
  }

  TEST_CASE("band selection rejects bad bands") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(4, kAxis, 3000.0, 75.0, 10.0, 15);
    CHECK_THROWS_AS(band_select(set, 5000.0, 4000.0), std::invalid_argument);
    CHECK_THROWS_AS(band_select(set, 8001.0, 8002.0), std::invalid_argument);
  }

  TEST_CASE("band selection is idempotent") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(4, kAxis, 3000.0, 75.0, 10.0, 16);
    const auto [once, band1] = band_select(set, 3000.0, 8000.0);
    const auto [twice, band2] = band_select(once, 3000.0, 8000.0);
    CHECK(once.mags == twice.mags);
  }

  TEST_CASE("interpolation to the same grid is the identity") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(12, kAxis, 3000.0, 75.0, 10.0, 17);
    const DirectionalResponseSet same = interpolate_to_grid(set, set.azimuths_deg);
    CHECK(same.mags == set.mags);
  }

  TEST_CASE("360 to 36 subsampling keeps every tenth row") {
    const DirectionalResponseSet fine =
        synth_rough_scatterer(360, kAxis, 3000.0, 75.0, 10.0, 18);
    std::vector<double> targets;
    for (int i = 0; i < 36; ++i) targets.push_back(10.0 * i);
    const DirectionalResponseSet model = interpolate_to_grid(fine, targets);
    for (int i = 0; i < 36; ++i) {
      CHECK(model.mags.row(i) == fine.mags.row(10 * i));
      CHECK(model.impulse_responses[static_cast<std::size_t>(i)] ==
            fine.impulse_responses[static_cast<std::size_t>(10 * i)]);
    }
    // Re-subsampling equals subsampling directly.
    std::vector<double> coarser;
    for (int i = 0; i < 12; ++i) coarser.push_back(30.0 * i);
    const DirectionalResponseSet a = interpolate_to_grid(model, coarser);
    const DirectionalResponseSet b = interpolate_to_grid(fine, coarser);
    CHECK(a.mags == b.mags);
  }

  TEST_CASE("device file round trip is lossless") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(10, kAxis, 3000.0, 75.0, 10.0, 19);
    const std::string path = "test_device.sdev";
    save_device(set, path);
    const DirectionalResponseSet loaded = load_device(path);
    CHECK(loaded.mags == set.mags);
    CHECK(loaded.azimuths_deg == set.azimuths_deg);
    CHECK(loaded.freq_axis == set.freq_axis);
    CHECK(loaded.sample_rate == set.sample_rate);
    CHECK(loaded.window_len == set.window_len);
    REQUIRE(loaded.has_irs());
    for (std::size_t d = 0; d < set.impulse_responses.size(); ++d)
      CHECK(loaded.impulse_responses[d] == set.impulse_responses[d]);

    // Saving again produces identical bytes.
    const std::string path2 = "test_device2.sdev";
    save_device(set, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    std::remove(path.c_str());
    std::remove(path2.c_str());
  }

  TEST_CASE("minimum-phase construction hits the requested magnitude") {
    Rng rng(20);
    Eigen::VectorXd mag(513);
    for (Eigen::Index k = 0; k < 513; ++k) mag(k) = std::exp(0.8 * rng.gaussian());
    const std::vector<double> ir = minimum_phase_ir(mag, 1024);
    const Eigen::VectorXd got = reference::dft_magnitude(ir, 1024);
    CHECK(((got - mag).cwiseAbs().array() / mag.array()).maxCoeff() <= 1e-9);
  }

  TEST_CASE("CSV export has one row per direction") {
    const DirectionalResponseSet set =
        synth_rough_scatterer(6, kAxis, 3000.0, 75.0, 10.0, 21);
    const std::string path = "test_mags.csv";
    export_mags_csv(set, path);
    std::ifstream f(path);
    std::string line;
    int rows = 0;
    while (std::getline(f, line)) ++rows;
    CHECK(rows == 7);  // header + 6 directions
    std::remove(path.c_str());
  }

  TEST_CASE("validation rejects malformed sets") {
    DirectionalResponseSet set = synth_rough_scatterer(4, kAxis, 3000.0, 75.0, 10.0, 22);
    set.azimuths_deg[2] = set.azimuths_deg[1];  // not strictly increasing
    CHECK_THROWS_AS(set.validate(), std::invalid_argument);
    set = synth_rough_scatterer(4, kAxis, 3000.0, 75.0, 10.0, 22);
    set.azimuths_deg[3] = 400.0;
    CHECK_THROWS_AS(set.validate(), std::invalid_argument);
    set = synth_rough_scatterer(4, kAxis, 3000.0, 75.0, 10.0, 22);
    set.mags(1, 1) = -0.5;
    CHECK_THROWS_AS(set.validate(), std::invalid_argument);
  }
}
