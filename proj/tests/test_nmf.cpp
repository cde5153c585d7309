#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scatloc/nmf.hpp"
#include "scatloc/reference.hpp"
#include "scatloc/rng.hpp"
#include "scatloc/scatter.hpp"

using namespace scatloc;

namespace {

Eigen::MatrixXd positive_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng,
                                double offset = 0.01) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform() + offset;
  return m;
}

struct Instance {
  MixingMatrix a;
  Activations x;
  Eigen::MatrixXd y;
};

Instance random_instance(Eigen::Index f, Eigen::Index k, Eigen::Index d, Eigen::Index n,
                         std::uint64_t seed) {
  Rng rng(seed);
  Instance inst;
  inst.a.atoms_per_group = k;
  inst.a.num_groups = d;
  inst.a.values = positive_matrix(f, k * d, rng);
  inst.x.atoms_per_group = k;
  inst.x.num_groups = d;
  inst.x.values = positive_matrix(k * d, n, rng);
  inst.y = positive_matrix(f, n, rng);
  return inst;
}

}  // namespace

TEST_SUITE("nmf") {
  TEST_CASE("Itakura-Saito divergence of equal inputs is zero") {
    Rng rng(1);
    const Eigen::MatrixXd v = positive_matrix(6, 4, rng);
    CHECK(beta_divergence(v, v, Divergence::kItakuraSaito) == doctest::Approx(0.0));
  }

  TEST_CASE("d_IS(1 || e) = 1/e") {
    Eigen::MatrixXd v(1, 1), vhat(1, 1);
    v << 1.0;
    vhat << std::exp(1.0);
    CHECK(beta_divergence(v, vhat, Divergence::kItakuraSaito) ==
          doctest::Approx(0.36787944117144233).epsilon(1e-12));
  }

  TEST_CASE("Itakura-Saito divergence is scale invariant") {
    Rng rng(2);
    const Eigen::MatrixXd v = positive_matrix(8, 5, rng);
    const Eigen::MatrixXd vhat = positive_matrix(8, 5, rng);
    const double base = beta_divergence(v, vhat, Divergence::kItakuraSaito);
    const double scaled = beta_divergence(7.3 * v, 7.3 * vhat, Divergence::kItakuraSaito);
    CHECK(std::abs(scaled - base) <= 1e-12 * std::abs(base));
  }

  TEST_CASE("Euclidean divergence is half the squared distance") {
    Eigen::MatrixXd v(1, 2), vhat(1, 2);
    v << 3.0, 0.0;
    vhat << 0.0, 4.0;
    CHECK(beta_divergence(v, vhat, Divergence::kEuclidean) == doctest::Approx(12.5));
  }

  TEST_CASE("Itakura-Saito rejects a zero model entry") {
    Eigen::MatrixXd v(1, 1), vhat(1, 1);
    v << 1.0;
    vhat << 0.0;
    CHECK_THROWS_AS(beta_divergence(v, vhat, Divergence::kItakuraSaito),
                    std::invalid_argument);
  }

  TEST_CASE("objective vanishes at an exact unpenalized fit") {
    Instance inst = random_instance(6, 2, 3, 5, 3);
    inst.y = inst.a.values * inst.x.values;
    SolverConfig cfg;
    cfg.divergence = Divergence::kEuclidean;
    CHECK(objective(inst.y, inst.a, inst.x, cfg) == doctest::Approx(0.0));
    cfg.divergence = Divergence::kItakuraSaito;
    CHECK(objective(inst.y, inst.a, inst.x, cfg) == doctest::Approx(0.0).epsilon(1e-10));
  }

  TEST_CASE("objective at X = 0 is the Euclidean energy of Y") {
    Instance inst = random_instance(6, 2, 3, 5, 4);
    inst.x.values.setZero();
    SolverConfig cfg;
    cfg.divergence = Divergence::kEuclidean;
    CHECK(objective(inst.y, inst.a, inst.x, cfg) ==
          doctest::Approx(0.5 * inst.y.squaredNorm()).epsilon(1e-12));
  }

  TEST_CASE("objective matches the scalar-loop oracle") {
    for (auto divergence : {Divergence::kItakuraSaito, Divergence::kEuclidean}) {
      Instance inst = random_instance(7, 3, 4, 6, 5);
      SolverConfig cfg;
      cfg.divergence = divergence;
      cfg.lambda = 0.7;
      cfg.gamma = 0.3;
      const double got = objective(inst.y, inst.a, inst.x, cfg);
      const double want = reference::objective(inst.y, inst.a, inst.x, cfg);
      CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
  }

  TEST_CASE("objective rejects mismatched shapes") {
    Instance inst = random_instance(6, 2, 3, 5, 6);
    SolverConfig cfg;
    Eigen::MatrixXd bad = inst.y.leftCols(3);
    CHECK_THROWS_AS(objective(bad, inst.a, inst.x, cfg), std::invalid_argument);
  }

  TEST_CASE("exact Euclidean fit is a fixed point") {
    Instance inst = random_instance(6, 2, 3, 5, 7);
    inst.y = inst.a.values * inst.x.values;
    SolverConfig cfg;
    cfg.divergence = Divergence::kEuclidean;
    const Activations next = mu_step(inst.x, inst.a, inst.y, cfg);
    CHECK(next.values == inst.x.values);
  }

  TEST_CASE("zero activations are absorbing") {
    Instance inst = random_instance(6, 2, 3, 5, 8);
    inst.x.values(3, 2) = 0.0;
    for (auto divergence : {Divergence::kItakuraSaito, Divergence::kEuclidean}) {
      SolverConfig cfg;
      cfg.divergence = divergence;
      cfg.lambda = 0.1;
      cfg.gamma = 0.1;
      const Activations next = mu_step(inst.x, inst.a, inst.y, cfg);
      CHECK(next.values(3, 2) == 0.0);
    }
  }

  TEST_CASE("scalar fixed-point example evaluates to 2") {
    MixingMatrix a;
    a.atoms_per_group = 1;
    a.num_groups = 1;
    a.values = Eigen::MatrixXd::Constant(1, 1, 2.0);
    Activations x;
    x.atoms_per_group = 1;
    x.num_groups = 1;
    x.values = Eigen::MatrixXd::Constant(1, 1, 1.0);
    Eigen::MatrixXd y = Eigen::MatrixXd::Constant(1, 1, 4.0);
    SolverConfig cfg;
    cfg.divergence = Divergence::kEuclidean;
    const Activations next = mu_step(x, a, y, cfg);
    CHECK(next.values(0, 0) == 2.0);
  }

  TEST_CASE("updates preserve non-negativity under fuzzing") {
    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
      const Eigen::Index f = 2 + static_cast<Eigen::Index>(rng.integer(6));
      const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng.integer(3));
      const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.integer(4));
      const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.integer(5));
      Instance inst = random_instance(f, k, d, n, derive_seed(10, static_cast<std::uint64_t>(t)));
      if (t % 3 == 0) inst.x.values(0, 0) = 0.0;
      SolverConfig cfg;
      cfg.divergence = t % 2 == 0 ? Divergence::kItakuraSaito : Divergence::kEuclidean;
      cfg.lambda = rng.uniform() * 10.0;
      cfg.gamma = rng.uniform() * 10.0;
      const Activations next = mu_step(inst.x, inst.a, inst.y, cfg);
      CHECK((next.values.array() >= 0.0).all());
      CHECK(next.values.allFinite());
    }
  }

  TEST_CASE("mu_step matches the scalar-loop reference") {
    for (auto divergence : {Divergence::kItakuraSaito, Divergence::kEuclidean}) {
      Instance inst = random_instance(9, 2, 4, 11, 11);
      SolverConfig cfg;
      cfg.divergence = divergence;
      cfg.lambda = 1.3;
      cfg.gamma = 0.2;
      const Activations got = mu_step(inst.x, inst.a, inst.y, cfg);
      const Activations want = reference::mu_step(inst.x, inst.a, inst.y, cfg);
      const double scale = want.values.cwiseAbs().maxCoeff();
      CHECK((got.values - want.values).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }
  }

  TEST_CASE("unpenalized Euclidean updates are monotone") {
    for (int t = 0; t < 100; ++t) {
      Instance inst = random_instance(8, 2, 3, 6, derive_seed(12, static_cast<std::uint64_t>(t)));
      SolverConfig cfg;
      cfg.divergence = Divergence::kEuclidean;
      cfg.iters = 30;
      const FactorizeResult res = factorize(inst.y, inst.a, cfg);
      for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
        CHECK(res.objective_trace[i] <=
              res.objective_trace[i - 1] * (1.0 + 1e-9) + 1e-15);
    }
  }

  TEST_CASE("penalized updates usually do not increase the objective") {
    int ok = 0;
    for (int t = 0; t < 200; ++t) {
      Instance inst =
          random_instance(8, 2, 3, 6, derive_seed(13, static_cast<std::uint64_t>(t)));
      Rng rng(derive_seed(14, static_cast<std::uint64_t>(t)));
      SolverConfig cfg;
      cfg.divergence = t % 2 == 0 ? Divergence::kItakuraSaito : Divergence::kEuclidean;
      cfg.lambda = rng.uniform() * 2.0;
      cfg.gamma = rng.uniform() * 2.0;
      cfg.iters = 50;
      const FactorizeResult res = factorize(inst.y, inst.a, cfg);
      if (res.objective_trace.back() <= res.objective_trace.front() * (1.0 + 1e-9))
        ++ok;
    }
    CHECK(ok >= 190);
  }

  TEST_CASE("sparse-group solver recovers a one-group planted solution") {
    Rng rng(15);
    const Eigen::Index f = 8, k = 2, d = 3, n = 12;
    MixingMatrix a;
    a.atoms_per_group = k;
    a.num_groups = d;
    a.values = positive_matrix(f, k * d, rng);

    Activations truth;
    truth.atoms_per_group = k;
    truth.num_groups = d;
    truth.values = Eigen::MatrixXd::Zero(k * d, n);
    const Eigen::Index active_group = 1;
    for (Eigen::Index c = 0; c < n; ++c)
      truth.values(active_group * k + static_cast<Eigen::Index>(rng.integer(k)), c) =
          rng.uniform() + 0.5;
    const Eigen::MatrixXd y = a.values * truth.values;

    SolverConfig cfg;
    cfg.divergence = Divergence::kItakuraSaito;
    cfg.lambda = 0.5;
    cfg.gamma = 0.01;
    cfg.iters = 200;
    const FactorizeResult res = factorize(y, a, cfg);

    double total = 0.0, active = 0.0;
    for (Eigen::Index g = 0; g < d; ++g) {
      const double e = res.x.group(g).cwiseAbs().sum();
      total += e;
      if (g == active_group) active = e;
    }
    CHECK(active >= 0.9 * total);
  }

  TEST_CASE("zero observation collapses all group energies") {
    Instance inst = random_instance(6, 2, 3, 4, 16);
    inst.y.setZero();
    SolverConfig cfg;
    cfg.divergence = Divergence::kEuclidean;
    cfg.iters = 10;
    const FactorizeResult res = factorize(inst.y, inst.a, cfg);
    CHECK(res.x.values.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("group permutation equivariance") {
    Instance inst = random_instance(10, 3, 4, 7, 17);
    SolverConfig cfg;
    cfg.divergence = Divergence::kItakuraSaito;
    cfg.lambda = 0.5;
    cfg.gamma = 0.1;
    cfg.iters = 40;
    const FactorizeResult base = factorize(inst.y, inst.a, cfg);

    // Reverse the direction blocks of A.
    MixingMatrix perm = inst.a;
    for (Eigen::Index g = 0; g < inst.a.num_groups; ++g)
      perm.values.middleCols(g * 3, 3) =
          inst.a.values.middleCols((inst.a.num_groups - 1 - g) * 3, 3);
    const FactorizeResult permuted = factorize(inst.y, perm, cfg);

    for (Eigen::Index g = 0; g < inst.a.num_groups; ++g) {
      const double a_energy = base.x.group(g).cwiseAbs().sum();
      const double b_energy =
          permuted.x.group(inst.a.num_groups - 1 - g).cwiseAbs().sum();
      CHECK(a_energy == doctest::Approx(b_energy).epsilon(1e-10));
    }
  }

  TEST_CASE("IS data term is invariant to a common rescaling") {
    Instance inst = random_instance(6, 2, 3, 5, 18);
    const Eigen::MatrixXd yh = inst.a.values * inst.x.values;
    const double base = beta_divergence(inst.y, yh, Divergence::kItakuraSaito);
    const double scaled =
        beta_divergence(3.7 * inst.y, 3.7 * yh, Divergence::kItakuraSaito);
    CHECK(std::abs(scaled - base) <= 1e-12 * std::abs(base));
  }

  TEST_CASE("rank-1 Euclidean learning approaches the SVD bound") {
    Rng rng(19);
    const Eigen::MatrixXd v = positive_matrix(12, 30, rng, 0.1);
    MagSpectrogram spec;
    spec.values = v;
    spec.freq_axis.assign(12, 0.0);
    const Dictionary dict =
        learn_dictionary({{"s", spec}}, 1, Divergence::kEuclidean, 500, 20);

    // Best rank-1 approximation, clamped to non-negative entries.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd rank1 = svd.singularValues()(0) * svd.matrixU().col(0) *
                            svd.matrixV().col(0).transpose();
    rank1 = rank1.cwiseMax(0.0);
    const double svd_err = (v - rank1).norm();

    const Eigen::VectorXd atom = dict.atoms.col(0);
    const Eigen::VectorXd coeffs = atom.transpose() * v;  // optimal given the unit atom
    const double nmf_err = (v - atom * coeffs.transpose()).norm();
    CHECK(nmf_err <= svd_err * (1.0 + 1e-6));
  }

  TEST_CASE("atoms are non-negative with unit norm and carry labels") {
    Rng rng(21);
    std::vector<std::pair<std::string, MagSpectrogram>> training;
    for (int s = 0; s < 5; ++s) {
      MagSpectrogram spec;
      spec.values = positive_matrix(10, 20, rng);
      spec.freq_axis.assign(10, 0.0);
      training.emplace_back("spk" + std::to_string(s), spec);
    }
    const Dictionary dict =
        learn_dictionary(training, 10, Divergence::kItakuraSaito, 80, 22);
    REQUIRE(dict.num_atoms() == 50);
    for (Eigen::Index c = 0; c < 50; ++c) {
      CHECK((dict.atoms.col(c).array() >= 0.0).all());
      CHECK(dict.atoms.col(c).norm() == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(dict.atom_meta[0] == "spk0");
    CHECK(dict.atom_meta[49] == "spk4");
  }

  TEST_CASE("50 speakers at K=10 give a 500-atom model") {
    Rng rng(23);
    std::vector<std::pair<std::string, MagSpectrogram>> training;
    for (int s = 0; s < 50; ++s) {
      MagSpectrogram spec;
      spec.values = positive_matrix(6, 4, rng);
      spec.freq_axis.assign(6, 0.0);
      training.emplace_back("spk" + std::to_string(s), spec);
    }
    const Dictionary dict = learn_dictionary(training, 10, Divergence::kEuclidean, 15, 24);
    CHECK(dict.num_atoms() == 500);
  }

  TEST_CASE("learning rejects all-zero training data") {
    MagSpectrogram spec;
    spec.values = Eigen::MatrixXd::Zero(4, 6);
    spec.freq_axis.assign(4, 0.0);
    CHECK_THROWS_AS(learn_dictionary({{"s", spec}}, 2, Divergence::kEuclidean, 10, 25),
                    std::invalid_argument);
  }

  TEST_CASE("mixing matrix blocks are diag(H_d) W") {
    Rng rng(26);
    DirectionalResponseSet set;
    set.azimuths_deg = {0.0, 120.0, 240.0};
    set.mags = positive_matrix(3, 6, rng);
    set.freq_axis = {0, 1, 2, 3, 4, 5};
    set.sample_rate = 16000;
    set.window_len = 10;

    Dictionary w;
    w.atoms = positive_matrix(6, 2, rng);
    w.freq_axis = set.freq_axis;
    w.atom_meta = {"a", "b"};

    const MixingMatrix a = build_mixing_matrix(set, w);
    REQUIRE(a.values.cols() == 6);
    for (Eigen::Index d = 0; d < 3; ++d)
      for (Eigen::Index k = 0; k < 2; ++k)
        for (Eigen::Index f = 0; f < 6; ++f)
          CHECK(a.values(f, d * 2 + k) == set.mags(d, f) * w.atoms(f, k));

    // All-ones responses reproduce W itself.
    set.mags.setOnes();
    const MixingMatrix eye = build_mixing_matrix(set, w);
    for (Eigen::Index d = 0; d < 3; ++d)
      CHECK(eye.values.middleCols(d * 2, 2) == w.atoms);

    w.freq_axis[2] = 99.0;
    CHECK_THROWS_AS(build_mixing_matrix(set, w), std::invalid_argument);
  }

  TEST_CASE("dictionary file round trip") {
    Rng rng(27);
    Dictionary w;
    w.atoms = positive_matrix(8, 4, rng);
    w.freq_axis = {0, 1, 2, 3, 4, 5, 6, 7};
    w.atom_meta = {"a", "a", "b", "b"};
    const std::string path = "test_dict.sdict";
    save_dictionary(w, path);
    const Dictionary loaded = load_dictionary(path);
    CHECK(loaded.atoms == w.atoms);
    CHECK(loaded.atom_meta == w.atom_meta);
    CHECK(loaded.freq_axis == w.freq_axis);
    std::remove(path.c_str());
  }
}
