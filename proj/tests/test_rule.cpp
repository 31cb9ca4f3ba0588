#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "suprb/random.hpp"
#include "suprb/rule.hpp"

using namespace suprb;
using Catch::Approx;

namespace {

Bounds box(std::initializer_list<double> lo, std::initializer_list<double> hi)
{
    Bounds b{Vector(static_cast<Eigen::Index>(lo.size())), Vector(static_cast<Eigen::Index>(hi.size()))};
    std::copy(lo.begin(), lo.end(), b.lower.data());
    std::copy(hi.begin(), hi.end(), b.upper.data());
    return b;
}

Matrix uniform_matrix(Rng& rng, Eigen::Index n, Eigen::Index d)
{
    Matrix X(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) X(r, c) = -1.0 + 2.0 * rng.uniform();
    }
    return X;
}

} // namespace

TEST_CASE("matches uses closed intervals")
{
    const Bounds full = box({-1, -1, -1}, {1, 1, 1});
    CHECK(matches(full, (Vector(3) << 0.3, -1.0, 1.0).finished()));

    const Bounds b = box({0, 0}, {0.5, 0.5});
    CHECK(matches(b, (Vector(2) << 0.5, 0.5).finished()));
    CHECK(matches(b, (Vector(2) << 0.0, 0.0).finished()));
    CHECK_FALSE(matches(b, (Vector(2) << 0.50001, 0.0).finished()));
    CHECK_THROWS_AS(matches(b, Vector::Zero(3)), InvalidArgument);
}

TEST_CASE("match_set")
{
    Rng rng(5);
    const Matrix X = uniform_matrix(rng, 40, 2);

    std::vector<std::size_t> all(40);
    std::iota(all.begin(), all.end(), std::size_t{0});
    CHECK(match_set(box({-1, -1}, {1, 1}), X) == all);

    const Vector row = X.row(17).transpose();
    CHECK(match_set(Bounds{row, row}, X) == std::vector<std::size_t>{17});

    CHECK_THROWS_AS(match_set(box({-1}, {1}), X), InvalidArgument);
}

TEST_CASE("match_set equals a per-row loop on random 1-D rules")
{
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix X = uniform_matrix(rng, 50, 1);
        const double a = -1.0 + 2.0 * rng.uniform();
        const double b = -1.0 + 2.0 * rng.uniform();
        const Bounds bb = box({std::min(a, b)}, {std::max(a, b)});
        std::vector<std::size_t> expected;
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            if (X(r, 0) >= bb.lower[0] && X(r, 0) <= bb.upper[0]) expected.push_back(static_cast<std::size_t>(r));
        }
        CHECK(match_set(bb, X) == expected);
    }
}

TEST_CASE("fit_submodel recovers an exact linear target")
{
    Rng rng(21);
    const Matrix X = uniform_matrix(rng, 60, 3);
    const Vector w = (Vector(3) << 1.5, -0.7, 0.25).finished();
    const Vector y = (X * w).array() + 0.4;

    const Rule r = fit_submodel(box({-1, -1, -1}, {1, 1, 1}), X, y, 0.0);
    CHECK(r.experience == 60);
    CHECK(r.volume == 1.0);
    for (int i = 0; i < 3; ++i) CHECK(r.coefficients[i] == Approx(w[i]).margin(1e-8));
    CHECK(r.intercept == Approx(0.4).margin(1e-8));
    CHECK(r.in_sample_mse < 1e-16);
}

TEST_CASE("fit_submodel with zero ridge equals the augmented normal equations")
{
    Rng rng(99);
    const Matrix X = uniform_matrix(rng, 80, 4);
    Vector y(80);
    for (Eigen::Index i = 0; i < 80; ++i) y[i] = X(i, 0) - 2.0 * X(i, 3) + 0.3 * rng.normal();
    const Bounds b = box({-0.8, -1, -1, -0.5}, {0.9, 1, 0.6, 1});

    const Rule r = fit_submodel(b, X, y, 0.0);
    std::vector<std::vector<double>> rows;
    std::vector<double> ys;
    for (auto i : match_set(b, X)) {
        const auto ri = static_cast<Eigen::Index>(i);
        rows.push_back({X(ri, 0), X(ri, 1), X(ri, 2), X(ri, 3)});
        ys.push_back(y[ri]);
    }
    const auto beta = oracle::normal_equations(rows, ys);
    for (int i = 0; i < 4; ++i) CHECK(r.coefficients[i] == Approx(beta[static_cast<std::size_t>(i)]).epsilon(1e-8));
    CHECK(r.intercept == Approx(beta[4]).epsilon(1e-8));
}

TEST_CASE("fit_submodel edge cases")
{
    Rng rng(4);
    const Matrix X = uniform_matrix(rng, 30, 2);
    Vector y(30);
    for (Eigen::Index i = 0; i < 30; ++i) y[i] = rng.normal();

    SECTION("one matched example shrinks to its value")
    {
        const Vector row = X.row(4).transpose();
        const Rule r = fit_submodel(Bounds{row, row}, X, y, 0.01);
        CHECK(r.experience == 1);
        CHECK(r.coefficients.norm() == 0.0);
        CHECK(r.intercept == Approx(y[4]).epsilon(1e-14));
        CHECK(r.in_sample_mse == Approx(0.0).margin(1e-28));
        CHECK(r.volume == 0.0);
    }
    SECTION("constant target")
    {
        const Vector c = Vector::Constant(30, 1.75);
        const Rule r = fit_submodel(box({-1, -0.3}, {0.5, 1}), X, c, 0.01);
        CHECK(r.coefficients.norm() < 1e-12);
        CHECK(r.intercept == Approx(1.75).epsilon(1e-12));
        CHECK(r.in_sample_mse < 1e-24);
    }
    SECTION("no matched example")
    {
        CHECK_THROWS_AS(fit_submodel(box({2, 2}, {3, 3}), X, y, 0.01), EmptyMatchError);
    }
    SECTION("negative ridge")
    {
        CHECK_THROWS_AS(fit_submodel(box({-1, -1}, {1, 1}), X, y, -1.0), InvalidArgument);
    }
}

TEST_CASE("larger ridge never grows the coefficient norm")
{
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix X = uniform_matrix(rng, 40, 3);
        Vector y(40);
        for (Eigen::Index i = 0; i < 40; ++i) y[i] = 3.0 * X(i, 1) - X(i, 2) + rng.normal();
        double prev = std::numeric_limits<double>::infinity();
        for (double lam : {0.0, 1e-3, 0.01, 0.1, 1.0, 10.0, 100.0}) {
            const double norm = fit_submodel(box({-1, -1, -1}, {1, 1, 1}), X, y, lam).coefficients.norm();
            CHECK(norm <= prev + 1e-12);
            prev = norm;
        }
    }
}

TEST_CASE("in-sample error does not depend on row order")
{
    Rng rng(77);
    const Matrix X = uniform_matrix(rng, 50, 2);
    Vector y(50);
    for (Eigen::Index i = 0; i < 50; ++i) y[i] = std::sin(3.0 * X(i, 0)) + X(i, 1);
    std::vector<Eigen::Index> perm(50);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[3], perm[40]);
    Matrix Xp(50, 2);
    Vector yp(50);
    for (Eigen::Index i = 0; i < 50; ++i) {
        Xp.row(i) = X.row(perm[static_cast<std::size_t>(i)]);
        yp[i] = y[perm[static_cast<std::size_t>(i)]];
    }
    const Bounds b = box({-0.5, -1}, {1, 0.7});
    CHECK(fit_submodel(b, X, y, 0.01).in_sample_mse == Approx(fit_submodel(b, Xp, yp, 0.01).in_sample_mse).epsilon(1e-12));
}

TEST_CASE("rule_fitness")
{
    Rule r;
    r.bounds = box({-1}, {1});
    r.coefficients = Vector::Zero(1);
    r.experience = 10;

    r.in_sample_mse = 0.0;
    r.volume = 1.0;
    CHECK(rule_fitness(r, {}) == 1.0);

    r.in_sample_mse = 0.5;
    r.volume = 0.25;
    CHECK(rule_fitness(r, {0.05, 2.0}) == Approx(0.36744737641940006).epsilon(1e-14));

    r.volume = 0.0;
    CHECK(rule_fitness(r, {}) == 0.0);

    Rule unfitted;
    unfitted.bounds = r.bounds;
    CHECK_THROWS_AS(rule_fitness(unfitted, {}), StateError);
}

TEST_CASE("predict_rule is the submodel's linear output")
{
    Rule r;
    r.bounds = Bounds{Vector::Constant(8, -1.0), Vector::Constant(8, 1.0)};
    r.coefficients = (Vector(8) << 2.38, 2.29, 0.68, -1.26, -0.67, 0.71, 0.60, 2.07).finished();
    r.intercept = 3.9160;
    CHECK(predict_rule(r, Vector::Zero(8)) == 3.9160);

    Rule c;
    c.coefficients = Vector::Zero(2);
    c.intercept = -0.25;
    CHECK(predict_rule(c, (Vector(2) << 0.9, -0.3).finished()) == -0.25);

    Rule one;
    one.coefficients = Vector::Ones(1);
    CHECK(predict_rule(one, Vector::Constant(1, 0.5)) == 0.5);
    CHECK_THROWS_AS(predict_rule(one, Vector::Zero(2)), InvalidArgument);
}

TEST_CASE("pool is append-only with stable indices")
{
    Pool pool;
    Rule a;
    a.intercept = 1.0;
    Rule b;
    b.intercept = 2.0;
    pool.append(a);
    pool.append(std::vector<Rule>{b, a});
    REQUIRE(pool.size() == 3);
    CHECK(pool[0].intercept == 1.0);
    CHECK(pool[1].intercept == 2.0);
    CHECK(pool[2].intercept == 1.0);
}
