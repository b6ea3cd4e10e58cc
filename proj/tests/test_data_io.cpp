// Dataset loading, saving, preprocessing, feature subsampling, and the
// synthetic logistic-regression generators.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cggibbs/data_io.hpp"
#include "cggibbs/dataset.hpp"

#include "test_helpers.hpp"

using namespace cggibbs;
using Catch::Matchers::ContainsSubstring;
using cggibbs_test::scratch_dir;
using cggibbs_test::write_text_file;

namespace {

Eigen::Index find_column(const Dataset& ds, const std::string& name) {
    const auto& names = ds.feature_names();
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return static_cast<Eigen::Index>(j);
    FAIL("column '" << name << "' not found");
    return -1;
}

} // namespace

TEST_CASE("csv save then load round-trips doubles exactly", "[data_io]") {
    const auto dir = scratch_dir("csv_roundtrip");
    const std::string path = (dir / "data.csv").string();

    Eigen::MatrixXd x(3, 2);
    x << 1.0 / 3.0, 3.141592653589793, -2.5e77, 1e-300, 0.0,
        std::nextafter(1.0, 2.0);
    Eigen::VectorXd y(3);
    y << 1.0, 0.0, 1.0;
    const Dataset original(x, y, {"alpha", "beta"});

    save_csv(original, path);
    const Dataset loaded = load_csv(path);

    REQUIRE(loaded.n() == 3);
    REQUIRE(loaded.d() == 2);
    REQUIRE(loaded.feature_names() == std::vector<std::string>{"alpha", "beta"});
    for (Eigen::Index i = 0; i < 3; ++i) {
        REQUIRE(loaded.y()[i] == original.y()[i]);
        for (Eigen::Index j = 0; j < 2; ++j)
            REQUIRE(loaded.x(i, j) == original.x(i, j));
    }
}

TEST_CASE("csv save invents x0.. names for unnamed datasets", "[data_io]") {
    const auto dir = scratch_dir("csv_unnamed");
    const std::string path = (dir / "data.csv").string();

    Eigen::MatrixXd x(2, 3);
    x << 1, 2, 3, 4, 5, 6;
    Eigen::VectorXd y(2);
    y << 0, 1;
    save_csv(Dataset(x, y), path);

    const Dataset loaded = load_csv(path);
    REQUIRE(loaded.feature_names() == std::vector<std::string>{"x0", "x1", "x2"});
    REQUIRE(loaded.x(1, 2) == 6.0);
}

TEST_CASE("csv label column may sit anywhere and may be renamed", "[data_io]") {
    const auto dir = scratch_dir("csv_ycol");

    const std::string mid = (dir / "mid.csv").string();
    write_text_file(mid, "a,y,b\n1,0,2\n3,1,4\n");
    const Dataset ds_mid = load_csv(mid);
    REQUIRE(ds_mid.feature_names() == std::vector<std::string>{"a", "b"});
    REQUIRE(ds_mid.x(0, 0) == 1.0);
    REQUIRE(ds_mid.x(0, 1) == 2.0);
    REQUIRE(ds_mid.x(1, 0) == 3.0);
    REQUIRE(ds_mid.x(1, 1) == 4.0);
    REQUIRE(ds_mid.y()[0] == 0.0);
    REQUIRE(ds_mid.y()[1] == 1.0);

    const std::string first = (dir / "first.csv").string();
    write_text_file(first, "label,a\n1,7\n-1,8\n");
    const Dataset ds_first = load_csv(first, "label");
    REQUIRE(ds_first.d() == 1);
    REQUIRE(ds_first.y()[0] == 1.0);
    REQUIRE(ds_first.y()[1] == 0.0); // -1 is the on-disk negative class
    REQUIRE(ds_first.x(1, 0) == 8.0);
}

TEST_CASE("csv loader tolerates CRLF line endings and blank lines", "[data_io]") {
    const auto dir = scratch_dir("csv_crlf");
    const std::string path = (dir / "data.csv").string();
    write_text_file(path, "x0,y\r\n\r\n1.5,-1\r\n\n2.5,1\r\n");

    const Dataset ds = load_csv(path);
    REQUIRE(ds.n() == 2);
    REQUIRE(ds.feature_names() == std::vector<std::string>{"x0"});
    REQUIRE(ds.x(0, 0) == 1.5);
    REQUIRE(ds.y()[0] == 0.0);
    REQUIRE(ds.y()[1] == 1.0);
}

TEST_CASE("csv loader rejects malformed inputs with file:line context",
          "[data_io]") {
    const auto dir = scratch_dir("csv_errors");
    const auto path_of = [&](const std::string& name, const std::string& body) {
        const std::string p = (dir / name).string();
        write_text_file(p, body);
        return p;
    };

    REQUIRE_THROWS_WITH(load_csv((dir / "missing.csv").string()),
                        ContainsSubstring("cannot open"));

    REQUIRE_THROWS_WITH(load_csv(path_of("empty.csv", "")),
                        ContainsSubstring("is empty"));

    REQUIRE_THROWS_WITH(load_csv(path_of("dup.csv", "y,a,y\n0,1,1\n")),
                        ContainsSubstring("duplicate label column"));

    REQUIRE_THROWS_WITH(load_csv(path_of("noy.csv", "a,b\n1,2\n")),
                        ContainsSubstring("label column 'y' not found"));

    REQUIRE_THROWS_WITH(load_csv(path_of("onlyy.csv", "y\n1\n")),
                        ContainsSubstring("at least one feature"));

    const std::string badcount =
        path_of("badcount.csv", "x0,y\n1,0\n1,0,extra\n");
    REQUIRE_THROWS_WITH(load_csv(badcount),
                        ContainsSubstring(badcount + ":3") &&
                            ContainsSubstring("expected 2 fields, got 3"));

    const std::string badnum = path_of("badnum.csv", "x0,y\n1.0,abc\n");
    REQUIRE_THROWS_WITH(load_csv(badnum),
                        ContainsSubstring(badnum + ":2") &&
                            ContainsSubstring("cannot parse number 'abc'"));

    REQUIRE_THROWS_WITH(load_csv(path_of("badlabel.csv", "x0,y\n1.0,2\n")),
                        ContainsSubstring("non-binary label"));

    REQUIRE_THROWS_WITH(load_csv(path_of("norows.csv", "x0,y\n")),
                        ContainsSubstring("no data rows"));

    // A trailing comma adds an (empty) field and breaks the count.
    REQUIRE_THROWS_WITH(load_csv(path_of("trailing.csv", "x0,y\n1,0,\n")),
                        ContainsSubstring("expected 2 fields, got 3"));
}

TEST_CASE("libsvm loader places 1-based indices into 0-based columns",
          "[data_io]") {
    const auto dir = scratch_dir("libsvm_basic");
    const std::string path = (dir / "data.svm").string();
    write_text_file(path, "1 3:0.5\n-1 1:2 2:-3\n");

    SECTION("declared feature count pads with zero columns") {
        const Dataset ds = load_libsvm(path, 4);
        REQUIRE(ds.n() == 2);
        REQUIRE(ds.d() == 4);
        REQUIRE(ds.y()[0] == 1.0);
        REQUIRE(ds.y()[1] == 0.0);
        REQUIRE(ds.x(0, 0) == 0.0);
        REQUIRE(ds.x(0, 2) == 0.5);
        REQUIRE(ds.x(0, 3) == 0.0);
        REQUIRE(ds.x(1, 0) == 2.0);
        REQUIRE(ds.x(1, 1) == -3.0);
        REQUIRE(ds.x(1, 2) == 0.0);
    }

    SECTION("d = 0 infers the width from the largest index") {
        const Dataset ds = load_libsvm(path);
        REQUIRE(ds.d() == 3);
        REQUIRE(ds.x(0, 2) == 0.5);
    }

    SECTION("an index beyond the declared width is an error") {
        REQUIRE_THROWS_WITH(load_libsvm(path, 2),
                            ContainsSubstring("exceeds declared d=2"));
    }
}

TEST_CASE("libsvm loader accepts label-only rows as all-zero rows",
          "[data_io]") {
    const auto dir = scratch_dir("libsvm_zero_row");
    const std::string path = (dir / "data.svm").string();
    write_text_file(path, "1 2:0.5\n0\n");

    const Dataset ds = load_libsvm(path);
    REQUIRE(ds.n() == 2);
    REQUIRE(ds.d() == 2);
    REQUIRE(ds.x(1, 0) == 0.0);
    REQUIRE(ds.x(1, 1) == 0.0);
    REQUIRE(ds.y()[1] == 0.0);
}

TEST_CASE("libsvm loader rejects malformed inputs", "[data_io]") {
    const auto dir = scratch_dir("libsvm_errors");
    const auto path_of = [&](const std::string& name, const std::string& body) {
        const std::string p = (dir / name).string();
        write_text_file(p, body);
        return p;
    };

    REQUIRE_THROWS_WITH(load_libsvm((dir / "missing.svm").string()),
                        ContainsSubstring("cannot open"));
    REQUIRE_THROWS_WITH(load_libsvm(path_of("empty.svm", "")),
                        ContainsSubstring("no data rows"));
    REQUIRE_THROWS_WITH(load_libsvm(path_of("nofeat.svm", "1\n0\n")),
                        ContainsSubstring("no features found"));

    REQUIRE_THROWS_WITH(load_libsvm(path_of("nocolon.svm", "1 35\n")),
                        ContainsSubstring("malformed index:value pair '35'"));
    REQUIRE_THROWS_WITH(load_libsvm(path_of("noidx.svm", "1 :5\n")),
                        ContainsSubstring("malformed index:value pair"));
    REQUIRE_THROWS_WITH(load_libsvm(path_of("noval.svm", "1 3:\n")),
                        ContainsSubstring("malformed index:value pair"));

    REQUIRE_THROWS_WITH(load_libsvm(path_of("fracidx.svm", "1 2.5:1.0\n")),
                        ContainsSubstring("must be a positive integer"));
    REQUIRE_THROWS_WITH(load_libsvm(path_of("zeroidx.svm", "1 0:1.0\n")),
                        ContainsSubstring("must be a positive integer"));
    REQUIRE_THROWS_WITH(load_libsvm(path_of("negidx.svm", "1 -3:1.0\n")),
                        ContainsSubstring("must be a positive integer"));

    const std::string badval = path_of("badval.svm", "1 2:abc\n");
    REQUIRE_THROWS_WITH(load_libsvm(badval),
                        ContainsSubstring(badval + ":1") &&
                            ContainsSubstring("cannot parse number 'abc'"));
    REQUIRE_THROWS_WITH(load_libsvm(path_of("badlabel.svm", "7 1:1\n")),
                        ContainsSubstring("non-binary label"));
}

TEST_CASE("standardize rescales to population mean zero and sd one",
          "[data_io]") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 10, 2, 20, 3, 30;
    Eigen::VectorXd y(3);
    y << 0, 1, 0;
    PreprocessSpec spec;
    spec.mode = PreprocessSpec::Mode::Standardize;

    const PreprocessResult res = preprocess(Dataset(x, y), spec);
    REQUIRE(res.mode_used == PreprocessSpec::Mode::Standardize);
    REQUIRE(res.warnings.empty());
    REQUIRE(res.dataset.y() == y);

    const double sd0 = std::sqrt(2.0 / 3.0);
    for (Eigen::Index j = 0; j < 2; ++j) {
        REQUIRE(res.dataset.X().col(j).mean() == Catch::Approx(0.0).margin(1e-15));
        const double sd = std::sqrt(res.dataset.X().col(j).squaredNorm() / 3.0);
        REQUIRE(sd == Catch::Approx(1.0).epsilon(1e-12));
    }
    REQUIRE(res.dataset.x(0, 0) == Catch::Approx(-1.0 / sd0).epsilon(1e-14));
    REQUIRE(res.dataset.x(1, 0) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(res.dataset.x(2, 0) == Catch::Approx(1.0 / sd0).epsilon(1e-14));
}

TEST_CASE("standardize rejects zero-variance columns", "[data_io]") {
    Eigen::MatrixXd x(3, 1);
    x << 5, 5, 5;
    Eigen::VectorXd y(3);
    y << 0, 1, 0;
    PreprocessSpec spec;
    spec.mode = PreprocessSpec::Mode::Standardize;
    REQUIRE_THROWS_MATCHES(preprocess(Dataset(x, y), spec), std::invalid_argument,
                           Catch::Matchers::MessageMatches(
                               ContainsSubstring("zero-variance column 'x0'")));
}

TEST_CASE("sparse max-abs scaling divides by the column peak and keeps zeros",
          "[data_io]") {
    Eigen::MatrixXd x(3, 2);
    x << 0, -4, 0, 2, 3, 0;
    Eigen::VectorXd y(3);
    y << 1, 0, 1;
    PreprocessSpec spec;
    spec.mode = PreprocessSpec::Mode::SparseMaxAbs;

    const PreprocessResult res = preprocess(Dataset(x, y), spec);
    REQUIRE(res.mode_used == PreprocessSpec::Mode::SparseMaxAbs);
    REQUIRE(res.dataset.x(0, 0) == 0.0);
    REQUIRE(res.dataset.x(1, 0) == 0.0);
    REQUIRE(res.dataset.x(2, 0) == 1.0);
    REQUIRE(res.dataset.x(0, 1) == -1.0);
    REQUIRE(res.dataset.x(1, 1) == 0.5);
    REQUIRE(res.dataset.x(2, 1) == 0.0);
}

TEST_CASE("sparse max-abs leaves an all-zero column alone with a warning",
          "[data_io]") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 0, 2, 0, 4, 0;
    Eigen::VectorXd y(3);
    y << 1, 0, 1;
    PreprocessSpec spec;
    spec.mode = PreprocessSpec::Mode::SparseMaxAbs;

    const PreprocessResult res = preprocess(Dataset(x, y), spec);
    REQUIRE(res.warnings.size() == 1);
    REQUIRE_THAT(res.warnings[0], ContainsSubstring("all-zero column 'x1'"));
    REQUIRE(res.dataset.X().col(1).isZero(0.0));
    REQUIRE(res.dataset.x(2, 0) == 1.0);
}

TEST_CASE("auto mode picks the scaler from the design's zero fraction",
          "[data_io]") {
    Eigen::VectorXd y(5);
    y << 0, 1, 0, 1, 0;
    PreprocessSpec spec; // Auto, threshold 0.85

    SECTION("mostly dense goes to standardize") {
        Eigen::MatrixXd x(5, 2);
        x << 1, 5, 2, 0, 0, 6, 0, 0, 0, 0; // 6 zeros of 10 -> 0.6
        const PreprocessResult res = preprocess(Dataset(x, y), spec);
        REQUIRE(res.mode_used == PreprocessSpec::Mode::Standardize);
    }

    SECTION("mostly zero goes to sparse max-abs") {
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(5, 2);
        x(0, 0) = 1.0; // 9 zeros of 10 -> 0.9
        const PreprocessResult res = preprocess(Dataset(x, y), spec);
        REQUIRE(res.mode_used == PreprocessSpec::Mode::SparseMaxAbs);
        REQUIRE(res.warnings.size() == 1); // the untouched all-zero column
        REQUIRE(res.dataset.x(0, 0) == 1.0);
    }
}

TEST_CASE("preprocess never rescales an intercept column", "[data_io]") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 1, 1, 2, 1, 3, 1, 4;
    Eigen::VectorXd y(4);
    y << 0, 1, 0, 1;
    const Dataset input(x, y, {kInterceptName, "x1"});

    PreprocessSpec spec;
    spec.mode = PreprocessSpec::Mode::Standardize;
    // An all-ones column would be rejected as zero-variance if it were scaled.
    const PreprocessResult res = preprocess(input, spec);
    REQUIRE(res.dataset.X().col(0) == Eigen::VectorXd::Ones(4));
    REQUIRE(res.dataset.X().col(1).mean() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("add_intercept prepends an all-ones named column", "[data_io]") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 2, 3, 4, 5, 6;
    Eigen::VectorXd y(3);
    y << 0, 1, 1;

    PreprocessSpec spec;
    spec.mode = PreprocessSpec::Mode::SparseMaxAbs;
    spec.add_intercept = true;

    const PreprocessResult res = preprocess(Dataset(x, y, {"a", "b"}), spec);
    REQUIRE(res.dataset.d() == 3);
    REQUIRE(res.dataset.feature_names() ==
            std::vector<std::string>{kInterceptName, "a", "b"});
    REQUIRE(res.dataset.X().col(0) == Eigen::VectorXd::Ones(3));
    REQUIRE(res.dataset.x(2, 1) == 1.0); // 5 / 5
    REQUIRE(res.dataset.x(0, 2) == Catch::Approx(2.0 / 6.0));

    SECTION("a second intercept is rejected") {
        REQUIRE_THROWS_AS(preprocess(res.dataset, spec), std::invalid_argument);
    }
}

TEST_CASE("auto sparsity counting ignores a freshly added intercept",
          "[data_io]") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 0, 0, 1; // 3/4 zero
    Eigen::VectorXd y(4);
    y << 0, 1, 0, 1;

    PreprocessSpec spec;
    spec.sparsity_threshold = 0.5;
    spec.add_intercept = true;
    // Counting the ones column too would give 3/8 <= 0.5 and standardize.
    const PreprocessResult res = preprocess(Dataset(x, y), spec);
    REQUIRE(res.mode_used == PreprocessSpec::Mode::SparseMaxAbs);
    REQUIRE(res.dataset.x(3, 1) == 1.0);
}

TEST_CASE("preprocess validates the sparsity threshold", "[data_io]") {
    Eigen::MatrixXd x(2, 1);
    x << 1, 2;
    Eigen::VectorXd y(2);
    y << 0, 1;
    PreprocessSpec spec;
    spec.sparsity_threshold = 1.5;
    REQUIRE_THROWS_AS(preprocess(Dataset(x, y), spec), std::invalid_argument);
    spec.sparsity_threshold = -0.1;
    REQUIRE_THROWS_AS(preprocess(Dataset(x, y), spec), std::invalid_argument);
}

TEST_CASE("feature subsampling keeps nested prefixes per seed", "[data_io]") {
    Eigen::MatrixXd x(4, 5);
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 5; ++j)
            x(i, j) = static_cast<double>(10 * j + i);
    Eigen::VectorXd y(4);
    y << 0, 1, 1, 0;
    const Dataset input(x, y, {"a", "b", "c", "d", "e"});

    const Dataset sub3 = subsample_features(input, 3, 77);
    const Dataset sub5 = subsample_features(input, 5, 77);

    REQUIRE(sub3.d() == 3);
    REQUIRE(sub5.d() == 5);
    for (Eigen::Index j = 0; j < 3; ++j)
        REQUIRE(sub3.feature_names()[static_cast<std::size_t>(j)] ==
                sub5.feature_names()[static_cast<std::size_t>(j)]);

    // Full-width subsampling is a permutation of the original columns.
    std::vector<std::string> sorted5 = sub5.feature_names();
    std::sort(sorted5.begin(), sorted5.end());
    REQUIRE(sorted5 == std::vector<std::string>{"a", "b", "c", "d", "e"});

    // Every kept column carries its original content and y is untouched.
    for (Eigen::Index j = 0; j < sub3.d(); ++j) {
        const Eigen::Index src = find_column(
            input, sub3.feature_names()[static_cast<std::size_t>(j)]);
        REQUIRE(sub3.X().col(j) == input.X().col(src));
    }
    REQUIRE(sub3.y() == y);

    SECTION("same seed reproduces, other seeds eventually differ") {
        const Dataset again = subsample_features(input, 5, 77);
        REQUIRE(again.feature_names() == sub5.feature_names());
        bool any_different = false;
        for (std::uint64_t seed = 1; seed <= 8 && !any_different; ++seed)
            any_different = subsample_features(input, 5, seed).feature_names() !=
                            sub5.feature_names();
        REQUIRE(any_different);
    }

    SECTION("out-of-range widths are rejected") {
        REQUIRE_THROWS_AS(subsample_features(input, 0, 1), std::invalid_argument);
        REQUIRE_THROWS_AS(subsample_features(input, 6, 1), std::invalid_argument);
    }
}

TEST_CASE("iid-normal synthesis draws every column and coefficient fresh",
          "[data_io]") {
    SyntheticSpec spec;
    spec.n = 200;
    spec.d = 4;
    spec.scenario = SyntheticSpec::Scenario::IidNormal;
    spec.intercept = 0.7;
    spec.seed = 5;

    const SyntheticData synth = generate_synthetic(spec);
    REQUIRE(synth.dataset.n() == 200);
    REQUIRE(synth.dataset.d() == 4);
    REQUIRE(synth.true_theta.size() == 4);
    REQUIRE(synth.dataset.feature_names() ==
            std::vector<std::string>{"x0", "x1", "x2", "x3"});
    // No design column carries the intercept.
    for (Eigen::Index j = 0; j < 4; ++j)
        REQUIRE(synth.dataset.X().col(j) != Eigen::VectorXd::Ones(200));
    for (Eigen::Index i = 0; i < synth.dataset.n(); ++i) {
        const double yi = synth.dataset.y()[i];
        REQUIRE((yi == 0.0 || yi == 1.0));
    }

    const SyntheticData again = generate_synthetic(spec);
    REQUIRE(again.dataset.X() == synth.dataset.X());
    REQUIRE(again.dataset.y() == synth.dataset.y());
    REQUIRE(again.true_theta == synth.true_theta);

    SyntheticSpec other = spec;
    other.seed = 6;
    REQUIRE(generate_synthetic(other).dataset.X() != synth.dataset.X());
}

TEST_CASE("prefix scenario 1 pads with fresh noise columns", "[data_io]") {
    SyntheticSpec spec;
    spec.n = 50;
    spec.d = 8;
    spec.scenario = SyntheticSpec::Scenario::PrefixSignificant1;
    spec.n_significant = 3;
    spec.intercept = 0.25;
    spec.seed = 11;

    const SyntheticData synth = generate_synthetic(spec);
    const Dataset& ds = synth.dataset;
    REQUIRE(ds.feature_names()[0] == kInterceptName);
    REQUIRE(ds.feature_names()[1] == "x1");
    REQUIRE(ds.feature_names()[7] == "x7");
    REQUIRE(ds.X().col(0) == Eigen::VectorXd::Ones(50));

    REQUIRE(synth.true_theta.size() == 8);
    REQUIRE(synth.true_theta[0] == 0.25);
    for (Eigen::Index j = 1; j <= 3; ++j)
        REQUIRE(synth.true_theta[j] != 0.0);
    for (Eigen::Index j = 4; j < 8; ++j)
        REQUIRE(synth.true_theta[j] == 0.0);

    for (Eigen::Index j = 4; j < 8; ++j) {
        REQUIRE_FALSE(ds.X().col(j).isZero(0.0));
        REQUIRE(ds.X().col(j) != ds.X().col(1));
    }
}

TEST_CASE("prefix scenario 2 copies the first significant column",
          "[data_io]") {
    SyntheticSpec spec;
    spec.n = 40;
    spec.d = 6;
    spec.scenario = SyntheticSpec::Scenario::PrefixSignificant2;
    spec.n_significant = 2;
    spec.seed = 12;

    const SyntheticData synth = generate_synthetic(spec);
    for (Eigen::Index j = 3; j < 6; ++j)
        REQUIRE(synth.dataset.X().col(j) == synth.dataset.X().col(1));
    REQUIRE(synth.dataset.X().col(2) != synth.dataset.X().col(1));
}

TEST_CASE("prefix scenario 3 pads with identically zero columns", "[data_io]") {
    SyntheticSpec spec;
    spec.n = 40;
    spec.d = 6;
    spec.scenario = SyntheticSpec::Scenario::PrefixSignificant3;
    spec.n_significant = 2;
    spec.seed = 13;

    const SyntheticData synth = generate_synthetic(spec);
    for (Eigen::Index j = 3; j < 6; ++j)
        REQUIRE(synth.dataset.X().col(j).isZero(0.0));
    REQUIRE_FALSE(synth.dataset.X().col(1).isZero(0.0));
    for (Eigen::Index j = 3; j < 6; ++j)
        REQUIRE(synth.true_theta[j] == 0.0);
}

TEST_CASE("n_significant equal to d saturates at d - 1 significant columns",
          "[data_io]") {
    SyntheticSpec spec;
    spec.n = 30;
    spec.d = 4;
    spec.scenario = SyntheticSpec::Scenario::PrefixSignificant1;
    spec.n_significant = 4;
    spec.seed = 14;

    const SyntheticData synth = generate_synthetic(spec);
    REQUIRE(synth.dataset.d() == 4);
    for (Eigen::Index j = 1; j < 4; ++j)
        REQUIRE(synth.true_theta[j] != 0.0);
}

TEST_CASE("synthetic class balance follows the intercept", "[data_io]") {
    // With no significant columns the success probability is exactly
    // logistic(intercept) for every row.
    SyntheticSpec spec;
    spec.n = 400;
    spec.d = 3;
    spec.scenario = SyntheticSpec::Scenario::PrefixSignificant3;
    spec.n_significant = 0;
    spec.seed = 15;

    spec.intercept = 0.0;
    const double balanced = generate_synthetic(spec).dataset.y().mean();
    REQUIRE(std::abs(balanced - 0.5) <= 3.0 * 0.5 / std::sqrt(400.0));

    spec.intercept = 4.0;
    const double skewed = generate_synthetic(spec).dataset.y().mean();
    REQUIRE(skewed >= 0.9);
}

TEST_CASE("synthetic specs are validated", "[data_io]") {
    SyntheticSpec spec;
    spec.n = 10;
    spec.d = 4;
    spec.scenario = SyntheticSpec::Scenario::PrefixSignificant1;

    SyntheticSpec bad = spec;
    bad.n = 0;
    REQUIRE_THROWS_AS(generate_synthetic(bad), std::invalid_argument);
    bad = spec;
    bad.d = 0;
    REQUIRE_THROWS_AS(generate_synthetic(bad), std::invalid_argument);
    bad = spec;
    bad.n_significant = -1;
    REQUIRE_THROWS_AS(generate_synthetic(bad), std::invalid_argument);
    bad = spec;
    bad.n_significant = 5;
    REQUIRE_THROWS_AS(generate_synthetic(bad), std::invalid_argument);
    bad = spec;
    bad.scenario = SyntheticSpec::Scenario::PrefixSignificant2;
    bad.n_significant = 0;
    REQUIRE_THROWS_AS(generate_synthetic(bad), std::invalid_argument);
}

TEST_CASE("bundled real dataset loads and preprocesses when present",
          "[data_io]") {
#ifdef CGGIBBS_TEST_SOURCE_DIR
    const std::string path =
        std::string(CGGIBBS_TEST_SOURCE_DIR) + "/fixtures/colon.csv";
#else
    const std::string path = "tests/fixtures/colon.csv";
#endif
    if (!std::filesystem::exists(path)) {
        SKIP("fixture not present: " << path);
    }
    const Dataset ds = load_csv(path);
    REQUIRE(ds.n() >= 1);
    REQUIRE(ds.d() >= 1);
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        const double yi = ds.y()[i];
        REQUIRE((yi == 0.0 || yi == 1.0));
    }
    PreprocessSpec spec;
    const PreprocessResult res = preprocess(ds, spec);
    REQUIRE(res.mode_used != PreprocessSpec::Mode::Auto);
}
