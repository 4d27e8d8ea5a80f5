#include "flowtube/lsq.hpp"

#include "oracles/finite_difference.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

using namespace flowtube;

namespace {

// y = p0 exp(-p1 t) + p2
double decay(std::span<const double> p, double t, std::span<double> g) {
    const double e = std::exp(-p[1] * t);
    g[0] = e;
    g[1] = -p[0] * t * e;
    g[2] = 1.0;
    return p[0] * e + p[2];
}

// y = p0 + p1 t: the covariance estimators have closed forms
double line(std::span<const double> p, double t, std::span<double> g) {
    g[0] = 1.0;
    g[1] = t;
    return p[0] + p[1] * t;
}

struct LineCase {
    std::vector<double> t, y;
    double b00, b01, b11;  // (J^T J)^-1
    std::vector<double> r, h;
};

LineCase line_case() {
    LineCase c;
    for (int i = 0; i < 15; ++i) {
        c.t.push_back(0.5 * i);
        c.y.push_back((2.0 + 0.8 * c.t.back()) * (1.0 + 0.05 * std::sin(2.3 * i)));
    }
    double s0 = 0, s1 = 0, s2 = 0, sy = 0, sty = 0;
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        s0 += 1; s1 += c.t[i]; s2 += c.t[i] * c.t[i]; sy += c.y[i]; sty += c.t[i] * c.y[i];
    }
    const double det = s0 * s2 - s1 * s1;
    c.b00 = s2 / det;
    c.b01 = -s1 / det;
    c.b11 = s0 / det;
    const double p1 = (s0 * sty - s1 * sy) / det;
    const double p0 = (sy - p1 * s1) / s0;
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        c.r.push_back(p0 + p1 * c.t[i] - c.y[i]);
        c.h.push_back(c.b00 + 2.0 * c.b01 * c.t[i] + c.b11 * c.t[i] * c.t[i]);
    }
    return c;
}

// B diag(w) B for the line Jacobian
std::array<double, 3> sandwich(const LineCase& c, const std::vector<double>& w) {
    double m00 = 0, m01 = 0, m11 = 0;
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        m00 += w[i]; m01 += w[i] * c.t[i]; m11 += w[i] * c.t[i] * c.t[i];
    }
    const double a00 = c.b00 * m00 + c.b01 * m01, a01 = c.b00 * m01 + c.b01 * m11;
    const double a10 = c.b01 * m00 + c.b11 * m01, a11 = c.b01 * m01 + c.b11 * m11;
    return {a00 * c.b00 + a01 * c.b01, a00 * c.b01 + a01 * c.b11, a10 * c.b01 + a11 * c.b11};
}

} // namespace

TEST_SUITE("lsq") {

TEST_CASE("covariance estimators match their closed forms") {
    const auto c = line_case();
    const double n = static_cast<double>(c.t.size());

    lsq::Options opt;
    opt.covariance = lsq::Covariance::classical;
    auto r = lsq::fit_curve(c.t, c.y, line, {0.0, 0.0}, {true, true}, opt);
    REQUIRE(r.converged);
    double ssr = 0.0;
    for (double v : c.r) ssr += v * v;
    const double s2 = ssr / (n - 2.0);
    CHECK(r.covariance(0, 0) == doctest::Approx(s2 * c.b00).epsilon(1e-8));
    CHECK(r.covariance(0, 1) == doctest::Approx(s2 * c.b01).epsilon(1e-8));
    CHECK(r.covariance(1, 1) == doctest::Approx(s2 * c.b11).epsilon(1e-8));

    std::vector<double> w;
    for (std::size_t i = 0; i < c.r.size(); ++i) w.push_back(std::pow(c.r[i] / (1.0 - c.h[i]), 2));
    auto hc3 = sandwich(c, w);
    opt.covariance = lsq::Covariance::robust;
    r = lsq::fit_curve(c.t, c.y, line, {0.0, 0.0}, {true, true}, opt);
    CHECK(r.covariance(0, 0) == doctest::Approx(hc3[0]).epsilon(1e-8));
    CHECK(r.covariance(0, 1) == doctest::Approx(hc3[1]).epsilon(1e-8));
    CHECK(r.covariance(1, 1) == doctest::Approx(hc3[2]).epsilon(1e-8));

    double rel2 = 0.0;
    for (std::size_t i = 0; i < c.r.size(); ++i) rel2 += std::pow(c.r[i] / (c.y[i] + c.r[i]), 2);
    w.clear();
    for (std::size_t i = 0; i < c.r.size(); ++i) w.push_back(rel2 / (n - 2.0) * std::pow(c.y[i] + c.r[i], 2));
    const auto prop = sandwich(c, w);
    opt.covariance = lsq::Covariance::proportional;
    r = lsq::fit_curve(c.t, c.y, line, {0.0, 0.0}, {true, true}, opt);
    CHECK(r.covariance(0, 0) == doctest::Approx(prop[0]).epsilon(1e-8));
    CHECK(r.covariance(0, 1) == doctest::Approx(prop[1]).epsilon(1e-8));
    CHECK(r.covariance(1, 1) == doctest::Approx(prop[2]).epsilon(1e-8));
}

TEST_CASE("robust covariance is the default") {
    CHECK(lsq::Options{}.covariance == lsq::Covariance::robust);
}


TEST_CASE("exact data is recovered") {
    std::vector<double> t, y;
    for (int i = 0; i < 30; ++i) {
        t.push_back(0.2 * i);
        y.push_back(5.0 * std::exp(-0.7 * t.back()) + 0.3);
    }
    const auto r = lsq::fit_curve(t, y, decay, {1.0, 0.1, 0.0}, {true, true, true});
    CHECK(r.converged);
    CHECK(r.params[0] == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(r.params[1] == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(r.params[2] == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("frozen parameters never move") {
    std::vector<double> t, y;
    for (int i = 0; i < 30; ++i) {
        t.push_back(0.2 * i);
        y.push_back(5.0 * std::exp(-0.7 * t.back()) + 0.3 + 0.01 * std::sin(7.0 * i));
    }
    const double frozen = 0.123456789;
    const auto r = lsq::fit_curve(t, y, decay, {1.0, 0.5, frozen}, {true, true, false});
    CHECK(r.params[2] == frozen);
    CHECK(std::isnan(r.sigma(2)));
    CHECK(r.free_count() == 2);
}

TEST_CASE("badly scaled parameters converge") {
    std::vector<double> t, y;
    for (int i = 0; i < 12; ++i) {
        t.push_back(0.4 + i);
        y.push_back(2e13 * std::exp(-0.39 * t.back()) + 1e11 * (1.0 + 0.01 * std::cos(3.0 * i)));
    }
    const auto r = lsq::fit_curve(t, y, decay, {1e13, 0.2, 0.0}, {true, true, true});
    CHECK(r.converged);
    CHECK(r.params[1] == doctest::Approx(0.39).epsilon(1e-3));
    CHECK(std::isfinite(r.sigma(1)));
}

TEST_CASE("gradient at the solution matches finite differences") {
    std::vector<double> t, y;
    for (int i = 0; i < 40; ++i) {
        t.push_back(0.15 * i);
        y.push_back(3.0 * std::exp(-1.1 * t.back()) + 0.5 + 0.02 * std::sin(5.0 * i));
    }
    const auto r = lsq::fit_curve(t, y, decay, {1.0, 0.5, 0.0}, {true, true, true});
    REQUIRE(r.converged);
    const auto ssr = [&](const std::vector<double>& p) { return lsq::sum_squared_residuals(t, y, decay, p); };
    const auto fd = oracle::ssr_gradient(ssr, r.params, r.free);
    double y2 = 0.0;
    for (double v : y) y2 += v * v;
    CHECK(oracle::norm(fd) < 1e-6 * y2);
    for (std::size_t i = 0; i < fd.size(); ++i) {
        CHECK(std::abs(fd[i] - r.ssr_gradient[static_cast<Eigen::Index>(i)]) < 1e-6 * y2);
    }
}

TEST_CASE("AICc formula") {
    CHECK(lsq::aicc(2.0, 10, 3) == doctest::Approx(10.0 * std::log(0.2) + 6.0 + 24.0 / 6.0));
    CHECK(std::isinf(lsq::aicc(1.0, 4, 3)));
}

}
