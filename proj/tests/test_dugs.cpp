#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "cggibbs/dugs.hpp"
#include "cggibbs/gaussian_target.hpp"
#include "cggibbs/rng.hpp"
#include "test_helpers.hpp"

using namespace cggibbs;

namespace {

Eigen::MatrixXd corr2(double r) {
    Eigen::MatrixXd s(2, 2);
    s << 1.0, r, r, 1.0;
    return s;
}

Eigen::MatrixXd random_spd(Eigen::Index d, RngStream& rng, double ridge = 0.5) {
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.normal();
    Eigen::MatrixXd s = g * g.transpose() / static_cast<double>(d) +
                        ridge * Eigen::MatrixXd::Identity(d, d);
    return 0.5 * (s + s.transpose());
}

} // namespace

TEST_CASE("spectral radius of small fixtures", "[dugs]") {
    Eigen::MatrixXd diag2(2, 2);
    diag2 << 0.5, 0.0, 0.0, -0.25;
    REQUIRE(spectral_radius(diag2) == Catch::Approx(0.5).epsilon(1e-12));

    Eigen::MatrixXd rot(2, 2); // eigenvalues +-0.9i
    rot << 0.0, 0.9, -0.9, 0.0;
    REQUIRE(spectral_radius(rot) == Catch::Approx(0.9).epsilon(1e-12));

    Eigen::MatrixXd nilpotent(2, 2);
    nilpotent << 0.0, 1.0, 0.0, 0.0;
    REQUIRE(spectral_radius(nilpotent) == Catch::Approx(0.0).margin(1e-12));

    REQUIRE_THROWS_AS(spectral_radius(Eigen::MatrixXd::Zero(2, 3)),
                      std::invalid_argument);
}

TEST_CASE("spectral radius norm-growth path on a large matrix", "[dugs]") {
    // Above the dense-eigensolver cutoff: an orthogonal similarity transform
    // of a known spectrum with top eigenvalue 0.77.
    const Eigen::Index d = 600;
    RngStream rng(17u);
    Eigen::VectorXd lambda(d);
    for (Eigen::Index i = 0; i < d; ++i)
        lambda[i] = 0.77 * std::pow(0.995, static_cast<double>(i));
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.normal();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    const Eigen::MatrixXd m = q * lambda.asDiagonal() * q.transpose();
    const double rho = spectral_radius(m);
    REQUIRE(rho == Catch::Approx(0.77).epsilon(1e-5));
}

TEST_CASE("sweep matrices for the 2x2 equicorrelated target", "[dugs]") {
    const double r = 0.6;
    const DugsMatrices m = build_dugs_matrices(corr2(r));
    Eigen::MatrixXd a_expected(2, 2), b_expected(2, 2);
    a_expected << 0.0, r, r, 0.0;
    b_expected << 0.0, r, 0.0, r * r;
    REQUIRE((m.a - a_expected).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((m.b - b_expected).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(m.l(1, 0) == Catch::Approx(r).epsilon(1e-12));
    REQUIRE(m.l.cwiseAbs().sum() == Catch::Approx(r).epsilon(1e-12));
    REQUIRE(m.u(0, 1) == Catch::Approx(r).epsilon(1e-12));
    REQUIRE((m.a - (m.l + m.u)).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(spectral_radius(m.b) == Catch::Approx(r * r).epsilon(1e-10));
}

TEST_CASE("sweep matrix structure holds for random targets", "[dugs]") {
    RngStream rng(5u);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.uniform_index(6));
        const Eigen::MatrixXd sigma = random_spd(d, rng);
        const DugsMatrices m = build_dugs_matrices(sigma);
        // A has a zero diagonal and equals I - D^{-1} Q up to the diagonal.
        REQUIRE(m.a.diagonal().cwiseAbs().maxCoeff() == 0.0);
        GaussianTarget target(Eigen::VectorXd::Zero(d), sigma);
        const Eigen::MatrixXd& q = target.precision();
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                if (i != j)
                    REQUIRE(m.a(i, j) == Catch::Approx(-q(i, j) / q(i, i)).margin(1e-12));
        // (I - L) B = U  (the defining triangular system).
        const Eigen::MatrixXd residual =
            (Eigen::MatrixXd::Identity(d, d) - m.l) * m.b - m.u;
        REQUIRE(residual.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("diagonal targets converge in one sweep", "[dugs]") {
    Eigen::MatrixXd sigma = Eigen::Vector3d(2.0, 0.5, 1.5).asDiagonal();
    const DugsMatrices m = build_dugs_matrices(sigma);
    REQUIRE(m.b.cwiseAbs().maxCoeff() == 0.0);
    GaussianTarget target(Eigen::VectorXd::Zero(3), sigma);
    Eigen::VectorXd mu0(3);
    mu0 << 5.0, -4.0, 3.0;
    const GaussianMoments one = dugs_moments(target, mu0, Eigen::MatrixXd::Zero(3, 3), 1);
    REQUIRE((one.mu - target.mu()).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE((one.sigma - sigma).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("the target moments are a fixed point of the sweep map", "[dugs]") {
    RngStream rng(31u);
    const Eigen::Index d = 4;
    const Eigen::MatrixXd sigma = random_spd(d, rng);
    Eigen::VectorXd mu(d);
    for (Eigen::Index i = 0; i < d; ++i) mu[i] = rng.normal();
    GaussianTarget target(mu, sigma);
    for (std::uint64_t t : {1ull, 5ull, 20ull}) {
        const GaussianMoments m = dugs_moments(target, mu, sigma, t);
        REQUIRE((m.mu - mu).cwiseAbs().maxCoeff() < 1e-10);
        REQUIRE((m.sigma - sigma).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("t-sweep moments equal the iterated one-sweep recursion", "[dugs]") {
    RngStream rng(41u);
    const Eigen::Index d = 5;
    const Eigen::MatrixXd sigma = random_spd(d, rng);
    Eigen::VectorXd mu(d), mu0(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        mu[i] = rng.normal();
        mu0[i] = rng.normal(0.0, 2.0);
    }
    const Eigen::MatrixXd sigma0 = random_spd(d, rng, 0.1);
    GaussianTarget target(mu, sigma);
    const Eigen::MatrixXd b = build_dugs_matrices(target).b;

    Eigen::VectorXd mu_t = mu0;
    Eigen::MatrixXd sigma_t = sigma0;
    for (int t = 0; t <= 7; ++t) {
        const GaussianMoments m =
            dugs_moments(target, mu0, sigma0, static_cast<std::uint64_t>(t));
        REQUIRE((m.mu - mu_t).cwiseAbs().maxCoeff() < 1e-10);
        REQUIRE((m.sigma - sigma_t).cwiseAbs().maxCoeff() < 1e-10);
        mu_t = mu + b * (mu_t - mu);
        sigma_t = sigma + b * (sigma_t - sigma) * b.transpose();
        sigma_t = 0.5 * (sigma_t + sigma_t.transpose()).eval();
    }

    REQUIRE_THROWS_AS(dugs_moments(target, Eigen::VectorXd::Zero(3), sigma0, 1),
                      std::invalid_argument);
}

TEST_CASE("matrix_power agrees with repeated multiplication", "[dugs]") {
    RngStream rng(51u);
    Eigen::MatrixXd m(3, 3);
    for (Eigen::Index j = 0; j < 3; ++j)
        for (Eigen::Index i = 0; i < 3; ++i) m(i, j) = rng.normal(0.0, 0.4);
    REQUIRE((matrix_power(m, 0) - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    Eigen::MatrixXd slow = Eigen::MatrixXd::Identity(3, 3);
    for (int t = 0; t < 13; ++t) slow = (slow * m).eval();
    REQUIRE((matrix_power(m, 13) - slow).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("simulated deterministic-scan Gibbs matches the algebraic moments", "[dugs]") {
    // Monte Carlo cross-check: many replicas of t sweeps from a fixed start
    // must land on the analytic t-sweep mean and covariance.
    RngStream master(61u);
    const Eigen::Index d = 3;
    const Eigen::MatrixXd sigma = random_spd(d, master);
    Eigen::VectorXd mu(d);
    mu << 0.5, -0.3, 0.8;
    GaussianTarget target(mu, sigma);
    Eigen::VectorXd start(d);
    start << 2.0, -1.0, 1.0;

    const int replicas = 40000;
    const std::uint64_t t = 3;
    Eigen::MatrixXd draws(replicas, d);
    for (int rep = 0; rep < replicas; ++rep) {
        RngStream rng = master.split(static_cast<std::uint64_t>(rep));
        Eigen::VectorXd theta = start;
        for (std::uint64_t s = 0; s < t; ++s)
            for (Eigen::Index j = 0; j < d; ++j)
                theta[j] = exact_gaussian_gibbs_update(target, theta, j, rng);
        draws.row(rep) = theta.transpose();
    }

    const GaussianMoments expected =
        dugs_moments(target, start, Eigen::MatrixXd::Zero(d, d), t);
    const Eigen::VectorXd mean = draws.colwise().mean().transpose();
    Eigen::MatrixXd centered = draws.rowwise() - mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / (replicas - 1);

    REQUIRE((mean - expected.mu).cwiseAbs().maxCoeff() < 0.03);
    REQUIRE((cov - expected.sigma).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("decay curves start at the exact t=0 divergence", "[dugs]") {
    const double r = 0.8;
    GaussianTarget target(Eigen::VectorXd::Zero(2), corr2(r));
    Eigen::VectorXd mu0(2);
    mu0 << 1.0, 1.0;
    const auto w2 = divergence_decay_curve(target, mu0, Eigen::MatrixXd::Zero(2, 2),
                                           DivergenceKind::W2, 5);
    REQUIRE(w2.size() == 6);
    // Point start: W2^2(delta_mu0, target) = |mu0|^2 + tr(sigma).
    REQUIRE(w2[0] == Catch::Approx(std::sqrt(2.0 + 2.0)).epsilon(1e-10));
    for (std::size_t i = 1; i < w2.size(); ++i) REQUIRE(w2[i] < w2[i - 1]);
}

TEST_CASE("divergence curves decay at the squared-B spectral rate", "[dugs]") {
    const double r = 0.9;
    const double rho = r * r; // spectral radius of the sweep map
    GaussianTarget target(Eigen::VectorXd::Zero(2), corr2(r));
    Eigen::VectorXd mu0(2);
    mu0 << 1.5, -0.5;

    // The fit floor sits well above the ~1e-7 numerical noise of the W2
    // trace formula so the flat roundoff tail stays out of the regression.
    const auto w2 = divergence_decay_curve(target, mu0, Eigen::MatrixXd::Zero(2, 2),
                                           DivergenceKind::W2, 110);
    const double w2_slope = log_decay_slope(w2, 8, 1e-6);
    REQUIRE(w2_slope == Catch::Approx(std::log(rho)).epsilon(0.01));

    // KL is quadratic in the mean error, so its log-slope is twice as steep.
    const auto kl = divergence_decay_curve(target, mu0, Eigen::MatrixXd::Zero(2, 2),
                                           DivergenceKind::Kl, 55);
    const double kl_slope = log_decay_slope(kl, 8, 1e-9);
    REQUIRE(kl_slope == Catch::Approx(2.0 * std::log(rho)).epsilon(0.015));

    // The TV upper bound is sqrt(KL/2) pointwise and halves the KL slope.
    const auto tv = divergence_decay_curve(target, mu0, Eigen::MatrixXd::Zero(2, 2),
                                           DivergenceKind::TvUpperBound, 55);
    for (std::size_t t = 0; t < tv.size(); ++t)
        REQUIRE(tv[t] == Catch::Approx(std::sqrt(0.5 * kl[t])).epsilon(1e-10));
}

TEST_CASE("log_decay_slope recovers exact geometric rates", "[dugs]") {
    std::vector<double> curve;
    for (int t = 0; t <= 40; ++t) curve.push_back(3.0 * std::pow(0.7, t));
    REQUIRE(log_decay_slope(curve) == Catch::Approx(std::log(0.7)).epsilon(1e-12));
    // Entries at or below the floor are ignored.
    curve.push_back(0.0);
    curve.push_back(1e-300);
    REQUIRE(log_decay_slope(curve, 0, 1e-12) == Catch::Approx(std::log(0.7)).epsilon(1e-12));
    // The skip excludes a corrupted transient.
    std::vector<double> with_transient = curve;
    with_transient[0] = 500.0;
    REQUIRE(log_decay_slope(with_transient, 1, 1e-12) ==
            Catch::Approx(std::log(0.7)).epsilon(1e-12));

    REQUIRE_THROWS_AS(log_decay_slope(std::vector<double>{1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(log_decay_slope(std::vector<double>{1e-15, 1e-16}),
                      std::invalid_argument);
}
