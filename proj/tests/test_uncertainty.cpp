#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "w2w/errors.hpp"
#include "w2w/rng.hpp"
#include "w2w/uncertainty.hpp"

using namespace w2w;

namespace {

// Eq. written out the slow way, one term at a time, sharing nothing with
// the library implementation.
struct NaiveResult {
    std::vector<std::vector<double>> alea, epis;
};

NaiveResult naive_decompose(const std::vector<std::vector<double>>& passes) {
    const std::size_t T = passes.size();
    const std::size_t C = passes[0].size();
    NaiveResult r;
    r.alea.assign(C, std::vector<double>(C, 0.0));
    r.epis.assign(C, std::vector<double>(C, 0.0));

    std::vector<double> mean(C, 0.0);
    for (std::size_t i = 0; i < C; ++i) {
        for (std::size_t t = 0; t < T; ++t) mean[i] += passes[t][i];
        mean[i] /= static_cast<double>(T);
    }
    for (std::size_t i = 0; i < C; ++i)
        for (std::size_t j = 0; j < C; ++j) {
            for (std::size_t t = 0; t < T; ++t) {
                const double diag = (i == j) ? passes[t][i] : 0.0;
                r.alea[i][j] += diag - passes[t][i] * passes[t][j];
                r.epis[i][j] += (passes[t][i] - mean[i]) * (passes[t][j] - mean[j]);
            }
            r.alea[i][j] /= static_cast<double>(T);
            r.epis[i][j] /= static_cast<double>(T);
        }
    return r;
}

std::vector<double> random_simplex(Rng& rng, std::size_t c) {
    std::vector<double> p(c);
    double sum = 0.0;
    for (double& v : p) {
        v = -std::log(1.0 - rng.next_double());
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

// Jacobi eigenvalues for a small symmetric matrix.
std::vector<double> sym_eigenvalues(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-15) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    return ev;
}

McSample sample_of(std::vector<std::vector<double>> passes) {
    McSample s;
    s.passes = std::move(passes);
    return s;
}

ModelParameters tiny_model(double dropout) {
    ArchSpec spec;
    spec.layers = {dense_layer(6), dense_layer(3)};
    spec.class_count = 3;
    spec.input = {1, 1, 4};
    spec.dropout_rate = dropout;
    return init_model(spec, 404);
}

Tensor tiny_input() {
    Tensor x({1, 1, 4});
    x.data = {0.5, -0.25, 0.75, 0.1};
    return x;
}

} // namespace

TEST_CASE("identical one-hot passes carry zero uncertainty") {
    auto r = decompose(sample_of({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}));
    for (double v : r.aleatoric.data) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
    for (double v : r.epistemic.data) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.total == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("identical uniform passes are pure aleatoric") {
    auto r = decompose(sample_of({{0.5, 0.5}, {0.5, 0.5}}));
    for (double v : r.epistemic.data) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.aleatoric.data[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.aleatoric.data[3] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.total == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("disagreeing one-hot passes are pure epistemic") {
    auto r = decompose(sample_of({{1.0, 0.0}, {0.0, 1.0}}));
    for (double v : r.aleatoric.data) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.epistemic.data[0] + r.epistemic.data[3] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.total == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("decompose matches the naive loop on random draws") {
    Rng rng(8100);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t c = 2 + rng.next_below(9);  // C in [2,10]
        const std::size_t t = 2 + rng.next_below(49); // T in [2,50]
        std::vector<std::vector<double>> passes;
        for (std::size_t k = 0; k < t; ++k) passes.push_back(random_simplex(rng, c));

        auto got = decompose(sample_of(passes));
        auto want = naive_decompose(passes);
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                REQUIRE(std::abs(got.aleatoric.data[i * c + j] - want.alea[i][j]) < 1e-10);
                REQUIRE(std::abs(got.epistemic.data[i * c + j] - want.epis[i][j]) < 1e-10);
            }

        // diagonal identity: alea_ii + epis_ii = E[p_i] - E[p_i]^2... stated
        // directly as mean - mean-of-squares + variance
        for (std::size_t i = 0; i < c; ++i) {
            double m = 0.0, m2 = 0.0;
            for (std::size_t k = 0; k < t; ++k) {
                m += passes[k][i];
                m2 += passes[k][i] * passes[k][i];
            }
            m /= static_cast<double>(t);
            m2 /= static_cast<double>(t);
            double var = 0.0;
            for (std::size_t k = 0; k < t; ++k)
                var += (passes[k][i] - m) * (passes[k][i] - m);
            var /= static_cast<double>(t);
            const double lhs = got.aleatoric.data[i * c + i] + got.epistemic.data[i * c + i];
            REQUIRE(std::abs(lhs - (m - m2 + var)) < 1e-10);
        }

        REQUIRE(got.total >= 0.0);
        REQUIRE(got.total <= static_cast<double>(c) / 2.0 + 1e-9);

        // symmetry of both matrices
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = i + 1; j < c; ++j) {
                REQUIRE(got.aleatoric.data[i * c + j] ==
                        doctest::Approx(got.aleatoric.data[j * c + i]).epsilon(1e-12));
                REQUIRE(got.epistemic.data[i * c + j] ==
                        doctest::Approx(got.epistemic.data[j * c + i]).epsilon(1e-12));
            }
    }
}

TEST_CASE("epistemic matrix is positive semidefinite") {
    Rng rng(8200);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t c = 2 + rng.next_below(9);
        const std::size_t t = 2 + rng.next_below(29);
        std::vector<std::vector<double>> passes;
        for (std::size_t k = 0; k < t; ++k) passes.push_back(random_simplex(rng, c));
        auto r = decompose(sample_of(passes));
        std::vector<std::vector<double>> e(c, std::vector<double>(c));
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = 0; j < c; ++j) e[i][j] = r.epistemic.data[i * c + j];
        for (double ev : sym_eigenvalues(e)) CHECK(ev >= -1e-9);
    }
}

TEST_CASE("total_uncertainty is the trace sum") {
    UncertaintyRecord r;
    r.aleatoric = Tensor({2, 2});
    r.epistemic = Tensor({2, 2});
    CHECK(total_uncertainty(r) == 0.0);
    r.aleatoric.data = {0.1, 9.0, 9.0, 0.2}; // off-diagonals must not count
    r.epistemic.data = {0.05, -9.0, -9.0, 0.05};
    CHECK(total_uncertainty(r) == doctest::Approx(0.4).epsilon(1e-12));
    r.total = 0.4;
    CHECK(total_uncertainty(r) == doctest::Approx(r.total).epsilon(1e-12));
}

TEST_CASE("decompose input validation") {
    CHECK_THROWS_AS(decompose(sample_of({{1.0, 0.0}})), DataError); // T=1
    CHECK_THROWS_AS(decompose(sample_of({{0.5, 0.5}, {0.5, 0.25, 0.25}})), DataError);
    CHECK_THROWS_AS(decompose(sample_of({{0.9, 0.3}, {0.9, 0.3}})), DataError); // not simplex
    McConfig one;
    one.passes = 1;
    CHECK_THROWS_AS(one.validate(), ConfigError);
}

TEST_CASE("mc_predict with zero dropout collapses to the plain forward") {
    auto params = tiny_model(0.0);
    auto x = tiny_input();
    McConfig cfg;
    cfg.passes = 5;
    cfg.base_seed = 7;
    auto s = mc_predict(params, x, cfg);
    REQUIRE(s.passes.size() == 5);
    auto plain = forward(params, x);
    for (const auto& p : s.passes) CHECK(p == plain);
    // and the decomposition is exactly degenerate
    auto r = decompose(s);
    CHECK(r.epistemic.data[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("mc_predict is reproducible and seed-sensitive") {
    auto params = tiny_model(0.3);
    auto x = tiny_input();
    McConfig cfg;
    cfg.passes = 7;
    cfg.base_seed = 99;
    auto a = mc_predict(params, x, cfg);
    auto b = mc_predict(params, x, cfg);
    REQUIRE(a.passes.size() == 7);
    CHECK(a.passes == b.passes);
    for (const auto& p : a.passes) CHECK(is_probability_vector(p));

    cfg.base_seed = 100;
    auto c = mc_predict(params, x, cfg);
    CHECK(a.passes != c.passes);

    // passes are index-keyed: a fresh evaluator reproduces pass by pass
    Evaluator eval(params);
    auto d = mc_predict(eval, x, cfg);
    CHECK(c.passes == d.passes);
}

TEST_CASE("mc_predict wraps numeric failures with the pass index") {
    auto params = tiny_model(0.3);
    params.layers[0].weights.data[0] = std::nan("");
    McConfig cfg;
    cfg.passes = 3;
    try {
        mc_predict(params, tiny_input(), cfg);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("pass 0") != std::string::npos);
    }
}

TEST_CASE("uncertainty csv rows") {
    McSample s = sample_of({{0.5, 0.5}, {0.5, 0.5}});
    auto r = decompose(s);
    std::ostringstream out;
    write_uncertainty_rows(out, {42}, {r});
    CHECK(out.str() == "id,aleatoric,epistemic,total\n42,0.5,0,0.5\n");

    std::ostringstream bad;
    CHECK_THROWS_AS(write_uncertainty_rows(bad, {1, 2}, {r}), DataError);
}
